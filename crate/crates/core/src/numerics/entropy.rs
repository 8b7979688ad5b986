/// Binary entropy in nats, `-p ln p - (1-p) ln(1-p)` with `0 ln 0 = 0`.
pub fn binary_entropy(p: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&p), "probability out of range: {p}");
    let p = p.clamp(0.0, 1.0);
    let xlnx = |v: f64| if v > 0.0 { v * v.ln() } else { 0.0 };
    -xlnx(p) - xlnx(1.0 - p)
}

/// Binary entropy of the Bernoulli law with log-odds `l`.
///
/// Computed from the smaller of the two probabilities so that saturated
/// beliefs on either side give the same value.
pub fn binary_entropy_from_log_odds(l: f64) -> f64 {
    let small = 1.0 / (1.0 + l.abs().exp());
    let xlnx = |v: f64| if v > 0.0 { v * v.ln() } else { 0.0 };
    -xlnx(small) - (1.0 - small) * (-small).ln_1p()
}
