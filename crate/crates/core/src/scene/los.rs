//! Exact grid traversal between cell centers.
//!
//! Crossings of vertical and horizontal grid lines are ordered with integer
//! arithmetic. A segment through an exact grid corner steps diagonally: it
//! touches the two side cells at a single point and does not cross their
//! interior.

/// Cells whose interior is crossed by the segment between the centers of
/// `from` and `to`, excluding both endpoint cells, in traversal order.
pub fn traverse(from: (usize, usize), to: (usize, usize)) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    walk(from, to, |cell| {
        out.push(cell);
        false
    });
    out
}

/// Visit the interior cells between two cell centers; stops early when
/// `visit` returns `true`. Returns whether it stopped early.
pub fn walk(
    from: (usize, usize),
    to: (usize, usize),
    mut visit: impl FnMut((usize, usize)) -> bool,
) -> bool {
    let (x0, y0) = (from.0 as i64, from.1 as i64);
    let (x1, y1) = (to.0 as i64, to.1 as i64);
    let (dx, dy) = (x1 - x0, y1 - y0);
    let (sx, sy) = (dx.signum(), dy.signum());
    let (nx, ny) = (dx.abs(), dy.abs());
    let (mut ix, mut iy) = (0i64, 0i64);
    let (mut cx, mut cy) = (x0, y0);

    while ix < nx || iy < ny {
        // next crossings at t = (2i+1)/(2n); compare cross-multiplied
        let step_x = if ix >= nx {
            false
        } else if iy >= ny {
            true
        } else {
            let tx = (2 * ix + 1) * ny;
            let ty = (2 * iy + 1) * nx;
            if tx == ty {
                cx += sx;
                cy += sy;
                ix += 1;
                iy += 1;
                if (cx, cy) != (x1, y1) && visit((cx as usize, cy as usize)) {
                    return true;
                }
                continue;
            }
            tx < ty
        };
        if step_x {
            cx += sx;
            ix += 1;
        } else {
            cy += sy;
            iy += 1;
        }
        if (cx, cy) != (x1, y1) && visit((cx as usize, cy as usize)) {
            return true;
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn straight_lines() {
        assert_eq!(traverse((0, 0), (3, 0)), vec![(1, 0), (2, 0)]);
        assert_eq!(traverse((2, 5), (2, 2)), vec![(2, 4), (2, 3)]);
        assert!(traverse((4, 4), (5, 4)).is_empty());
        assert!(traverse((4, 4), (4, 4)).is_empty());
    }

    #[test]
    fn diagonal_passes_through_corners_only() {
        assert_eq!(traverse((0, 0), (3, 3)), vec![(1, 1), (2, 2)]);
        assert!(traverse((0, 0), (1, 1)).is_empty());
    }

    #[test]
    fn shallow_slope() {
        // centers (0.5,0.5) -> (4.5,1.5): x-crossings at t = 1/8, 3/8, 5/8, 7/8, y at 1/2
        let cells = traverse((0, 0), (4, 1));
        assert_eq!(cells, vec![(1, 0), (2, 0), (2, 1), (3, 1)]);
    }
}
