/* Build: cargo build -p radnav-ffi --release
 * cc -I crates/ffi/include crates/ffi/examples/mission.c \
 *    target/release/libradnav_ffi.a -lpthread -ldl -lm -o mission */
#include <stdio.h>
#include "radnav.h"

int main(void) {
    RadnavScenario *scenario = NULL;
    RadnavMission *mission = NULL;
    if (radnav_scenario_reference(100, &scenario) != RADNAV_STATUS_OK) {
        fprintf(stderr, "scenario: %s\n", radnav_last_error());
        return 1;
    }
    if (radnav_mission_new(scenario, 7, &mission) != RADNAV_STATUS_OK) {
        fprintf(stderr, "mission: %s\n", radnav_last_error());
        radnav_scenario_free(scenario);
        return 1;
    }
    for (;;) {
        RadnavStep step;
        uint8_t done = 0;
        if (radnav_mission_step(mission, &step, &done) != RADNAV_STATUS_OK) {
            fprintf(stderr, "step: %s\n", radnav_last_error());
            break;
        }
        if (done) {
            break;
        }
        printf("k=%zu cell=(%zu,%zu) entropy=%.3f distance=%.2f\n",
               step.k, step.x, step.y, step.entropy, step.distance_to_target);
    }
    radnav_mission_free(mission);
    radnav_scenario_free(scenario);
    return 0;
}
