//! Small numeric helpers shared across the physics modules.

/// Unnormalized sinc, sin(x)/x, with a series expansion near zero.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        // sin(x)/x = 1 - x^2/6 + O(x^4); the quadratic term is below
        // machine epsilon at this threshold but keeps the function smooth.
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Bisection root refinement on a bracketing interval [a, b] with f(a)·f(b) ≤ 0.
/// Refines until the interval is narrower than `tol` (absolute, in x).
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let mut fa = f(a);
    if fa == 0.0 {
        return a;
    }
    while b - a > tol {
        let mid = 0.5 * (a + b);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if fa * fm < 0.0 {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }
    0.5 * (a + b)
}

/// Ordinary least-squares line fit; returns (slope, intercept, r_squared).
pub fn linear_regression(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my) * (v - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, intercept, r2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn sinc_at_zero_is_one() {
        assert_eq!(sinc(0.0), 1.0);
        assert_relative_eq!(sinc(1e-9), 1.0, max_relative = 1e-15);
    }

    #[test]
    fn sinc_matches_direct_evaluation() {
        for &x in &[0.1, 0.5, 1.0, 3.0, -2.0] {
            assert_relative_eq!(sinc(x), x.sin() / x, max_relative = 1e-15);
        }
    }

    #[test]
    fn bisect_finds_sqrt2() {
        let root = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-12);
        assert_relative_eq!(root, 2.0_f64.sqrt(), epsilon = 1e-11);
    }

    #[test]
    fn regression_exact_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 5.0, 7.0];
        let (m, b, r2) = linear_regression(&x, &y);
        assert_relative_eq!(m, 2.0, epsilon = 1e-12);
        assert_relative_eq!(b, 1.0, epsilon = 1e-12);
        assert_relative_eq!(r2, 1.0, epsilon = 1e-12);
    }
}
