use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult<T> {
    pub value: T,
    pub error_estimate: T,
    pub refinement_levels: u32,
}

/// Composite Simpson weights for an odd number of uniformly spaced samples.
pub fn simpson_weights<T: Real>(n: usize, dx: T) -> Vec<T> {
    assert!(n >= 3 && n % 2 == 1, "simpson needs an odd sample count >= 3");
    let third = dx / lit(3.0);
    (0..n)
        .map(|i| {
            if i == 0 || i == n - 1 {
                third
            } else if i % 2 == 1 {
                third * lit(4.0)
            } else {
                third * lit(2.0)
            }
        })
        .collect()
}

pub fn simpson<T: Real>(values: &[T], dx: T) -> T {
    let n = values.len();
    assert!(n >= 3 && n % 2 == 1, "simpson needs an odd sample count >= 3");
    let mut odd = T::zero();
    let mut even = T::zero();
    for (i, v) in values.iter().enumerate().take(n - 1).skip(1) {
        if i % 2 == 1 {
            odd = odd + *v;
        } else {
            even = even + *v;
        }
    }
    (values[0] + values[n - 1] + odd * lit(4.0) + even * lit(2.0)) * dx / lit(3.0)
}

/// Composite Simpson on `values` and on every other sample, combined by one
/// Richardson step. Needs `4m + 1` samples.
pub fn integrate_samples<T: Real>(values: &[T], dx: T) -> Result<QuadratureResult<T>> {
    let n = values.len();
    if n < 5 || (n - 1) % 4 != 0 {
        return Err(Error::invalid(
            "density",
            format!("need 4m+1 samples (m >= 1) for one grid doubling, got {n}"),
        ));
    }
    if !(dx > T::zero()) {
        return Err(Error::invalid("dx", "spacing must be positive"));
    }
    let fine = simpson(values, dx);
    let coarse_values: Vec<T> = values.iter().step_by(2).copied().collect();
    let coarse = simpson(&coarse_values, dx + dx);
    let delta = (fine - coarse) / lit(15.0);
    Ok(QuadratureResult {
        value: fine + delta,
        error_estimate: delta.abs(),
        refinement_levels: 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::erf::erf;
    use std::f64::consts::PI;

    fn grid(a: f64, b: f64, n: usize) -> (Vec<f64>, f64) {
        let dx = (b - a) / (n - 1) as f64;
        ((0..n).map(|i| a + i as f64 * dx).collect(), dx)
    }

    #[test]
    fn constant_density() {
        let l = 3.7;
        let (xs, dx) = grid(-l, l, 4097);
        let r = integrate_samples(&vec![1.0; xs.len()], dx).unwrap();
        assert!((r.value - 2.0 * l).abs() < 1e-12);
        assert!(r.error_estimate < 1e-12);
        assert_eq!(r.refinement_levels, 1);
    }

    #[test]
    fn gaussian_density_over_ten_sigma() {
        let sigma = 0.18e-3;
        let (xs, dx) = grid(-10.0 * sigma, 10.0 * sigma, 2049);
        let ys: Vec<f64> = xs.iter().map(|x| (-x * x / (2.0 * sigma * sigma)).exp()).collect();
        let r = integrate_samples(&ys, dx).unwrap();
        let exact = (2.0 * PI).sqrt() * sigma * erf(10.0 / 2f64.sqrt());
        assert!((exact - (2.0 * PI).sqrt() * sigma).abs() < 1e-20);
        assert!((r.value - exact).abs() < 1e-10 * sigma, "{} vs {}", r.value, exact);
    }

    #[test]
    fn error_shrinks_at_fourth_order() {
        // Smooth oscillatory integrand: ∫₀^π sin(5x)·e^{-x} dx.
        let exact = 5.0 * (1.0 + (-PI).exp()) / 26.0;
        let mut errs = Vec::new();
        for m in [16usize, 32, 64, 128] {
            let (xs, dx) = grid(0.0, PI, 4 * m + 1);
            let ys: Vec<f64> = xs.iter().map(|x| (5.0 * x).sin() * (-x).exp()).collect();
            let fine = simpson(&ys, dx);
            errs.push((fine - exact).abs());
            let r = integrate_samples(&ys, dx).unwrap();
            assert!((r.value - exact).abs() <= (fine - exact).abs());
        }
        for w in errs.windows(2) {
            assert!(w[0] / w[1] >= 4.0, "ratio {}", w[0] / w[1]);
        }
    }

    #[test]
    fn error_estimate_tracks_true_error() {
        let (xs, dx) = grid(0.0, 1.0, 33);
        let ys: Vec<f64> = xs.iter().map(|x| (7.0 * x).cos()).collect();
        let r = integrate_samples(&ys, dx).unwrap();
        let exact = (7.0f64).sin() / 7.0;
        let coarse_err = (simpson(&ys, dx) - exact).abs();
        assert!(r.error_estimate > 0.1 * coarse_err && r.error_estimate < 10.0 * coarse_err);
    }

    #[test]
    fn rejects_bad_sample_counts() {
        assert!(integrate_samples(&[1.0; 4], 0.1).is_err());
        assert!(integrate_samples(&[1.0; 7], 0.1).is_err());
        assert!(integrate_samples(&[1.0; 9], 0.0).is_err());
    }
}
