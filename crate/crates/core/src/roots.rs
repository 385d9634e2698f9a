//! Scalar root finding shared by the neck solvers.

/// Root of an increasing function on `[lo, hi]` by bisection, polished with
/// safeguarded Newton steps. `f` returns the value and its derivative.
///
/// Iterates until the bracket collapses to a few ulps or the Newton step is
/// negligible, so the residual ends at rounding level.
pub(crate) fn increasing_root<F>(f: F, mut lo: f64, mut hi: f64) -> f64
where
    F: Fn(f64) -> (f64, f64),
{
    let mut x = 0.5 * (lo + hi);
    for _ in 0..400 {
        let (v, dv) = f(x);
        if v == 0.0 {
            return x;
        }
        if v < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - v / dv;
        let next = if dv > 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= 2.0 * f64::EPSILON * x.abs()
            || hi - lo <= 4.0 * f64::EPSILON * hi.abs()
        {
            return next;
        }
        x = next;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt_two() {
        let r = increasing_root(|x| (x * x - 2.0, 2.0 * x), 0.0, 3.0);
        assert!((r - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn survives_flat_derivative() {
        let r = increasing_root(|x| ((x - 1.0).powi(3), 3.0 * (x - 1.0).powi(2)), 0.0, 3.0);
        assert!((r - 1.0).abs() < 1e-5);
    }
}
