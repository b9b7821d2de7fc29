//! Error norms and wave-shape measurements used to compare numerical and
//! exact solutions.

/// `Σ |a_i − b_i| · dx`.
pub fn l1_distance(a: &[f64], b: &[f64], dx: f64) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() * dx
}

/// Number of cells whose value lies strictly inside
/// `(min(lo, hi) + delta, max(lo, hi) − delta)`: the smeared part of a
/// jump between the plateau values `lo` and `hi`.
pub fn transition_width(values: &[f64], lo: f64, hi: f64, delta: f64) -> usize {
    let (a, b) = (lo.min(hi) + delta, lo.max(hi) - delta);
    values.iter().filter(|&&v| v > a && v < b).count()
}

/// Index range `[start, end)` of cells whose centres lie in `[x0, x1)`.
pub fn window(xs: &[f64], x0: f64, x1: f64) -> std::ops::Range<usize> {
    let start = xs.iter().position(|&x| x >= x0).unwrap_or(xs.len());
    let end = xs.iter().position(|&x| x >= x1).unwrap_or(xs.len());
    start..end.max(start)
}

/// Relative change `|after − before| / |before|`.
pub fn relative_drift(before: f64, after: f64) -> f64 {
    if before == 0.0 {
        after.abs()
    } else {
        ((after - before) / before).abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn width_counts_intermediate_cells() {
        let v = [0.8, 0.8, 0.79, 0.75, 0.72, 0.7, 0.7];
        assert_eq!(transition_width(&v, 0.8, 0.7, 0.01), 2);
        assert_eq!(transition_width(&v, 0.7, 0.8, 0.0), 3);
    }

    #[test]
    fn l1_of_identical_profiles_is_zero() {
        assert_eq!(l1_distance(&[1.0, 2.0], &[1.0, 2.0], 0.1), 0.0);
        assert!((l1_distance(&[1.0, 2.0], &[1.5, 1.0], 0.1) - 0.15).abs() < 1e-15);
    }

    #[test]
    fn window_selects_centres() {
        let xs = [0.05, 0.15, 0.25, 0.35];
        assert_eq!(window(&xs, 0.1, 0.3), 1..3);
        assert_eq!(window(&xs, 0.5, 0.9), 4..4);
    }
}
