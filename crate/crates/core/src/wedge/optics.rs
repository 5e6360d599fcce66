use num_complex::Complex;
use rayon::prelude::*;

use super::quadrature::simpson_weights;
use super::{WedgeGeometry, WedgePath, UNCLIPPED_WINDOW_SIGMAS};
use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Complex scalar field sampled on a uniform transverse grid. Amplitudes
/// are densities in `m^{-1/2}` so `∫|field|² dx` is a probability.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamProfile<T> {
    pub start: T,
    pub step: T,
    pub field: Vec<Complex<T>>,
}

impl<T: Real> BeamProfile<T> {
    pub fn len(&self) -> usize {
        self.field.len()
    }

    pub fn is_empty(&self) -> bool {
        self.field.is_empty()
    }

    pub fn x(&self, i: usize) -> T {
        self.start + self.step * lit(i as f64)
    }

    pub fn end(&self) -> T {
        self.x(self.len() - 1)
    }

    pub fn grid(&self) -> Vec<T> {
        (0..self.len()).map(|i| self.x(i)).collect()
    }

    /// `∫|field|² dx` by composite Simpson.
    pub fn power(&self) -> T {
        let w = simpson_weights(self.len(), self.step);
        self.field.iter().zip(w).map(|(f, w)| f.norm_sqr() * w).sum()
    }

    /// Intensity-weighted mean and standard deviation of `x`.
    pub fn centroid_width(&self) -> (T, T) {
        let w = simpson_weights(self.len(), self.step);
        let p = self.power();
        let mean = (0..self.len())
            .map(|i| self.x(i) * self.field[i].norm_sqr() * w[i])
            .sum::<T>()
            / p;
        let var = (0..self.len())
            .map(|i| {
                let d = self.x(i) - mean;
                d * d * self.field[i].norm_sqr() * w[i]
            })
            .sum::<T>()
            / p;
        (mean, var.sqrt())
    }
}

/// Field of one path in the wedge plane: a unit-power Gaussian of intensity
/// width `beam_sigma` centred `aperture_halfwidth` from the apex, zero beyond
/// `±aperture_halfwidth` of its centre when truncation is on. a₁ lies on the
/// `x > 0` side, a₂ is its mirror image.
pub fn truncated_aperture_field<T: Real>(
    geom: &WedgeGeometry<T>,
    path: WedgePath,
) -> Result<BeamProfile<T>> {
    geom.validate()?;
    let sigma = geom.beam_sigma;
    let centre = geom.aperture_halfwidth;
    let half = if geom.truncate {
        geom.aperture_halfwidth
    } else {
        geom.aperture_halfwidth.max(sigma * lit(UNCLIPPED_WINDOW_SIGMAS))
    };
    let n = geom.samples_aperture;
    let start = centre - half;
    let step = (half + half) / lit((n - 1) as f64);
    let norm = (T::TAU() * sigma * sigma).powf(lit(-0.25));
    let four_var = sigma * sigma * lit(4.0);
    let field: Vec<Complex<T>> = (0..n)
        .map(|i| {
            let d = start + step * lit(i as f64) - centre;
            Complex::new(norm * (-(d * d) / four_var).exp(), T::zero())
        })
        .collect();
    let a1 = BeamProfile { start, step, field };
    Ok(match path {
        WedgePath::A1 => a1,
        WedgePath::A2 => {
            let end = a1.end();
            let mut field = a1.field;
            field.reverse();
            BeamProfile {
                start: -end,
                step,
                field,
            }
        }
    })
}

/// Power lost to the hard window, `erfc(h / (σ√2))`.
pub fn analytic_truncation_loss<T: Real>(geom: &WedgeGeometry<T>) -> f64 {
    let sigma = geom.beam_sigma.to_f64().unwrap_or(f64::NAN);
    let half = if geom.truncate {
        geom.aperture_halfwidth.to_f64().unwrap_or(f64::NAN)
    } else {
        geom.aperture_halfwidth
            .max(geom.beam_sigma * lit(UNCLIPPED_WINDOW_SIGMAS))
            .to_f64()
            .unwrap_or(f64::NAN)
    };
    libm::erfc(half / (sigma * std::f64::consts::SQRT_2))
}

/// Paraxial Fresnel propagation of `profile` over `geom.propagation_distance`
/// onto the detector grid, after a linear phase ramp that tilts the beam by
/// `tilt` (positive steers towards `+x`). At zero distance the tilted input
/// is returned on its own grid.
pub fn fresnel_propagate<T: Real>(
    profile: &BeamProfile<T>,
    geom: &WedgeGeometry<T>,
    tilt: T,
) -> Result<BeamProfile<T>> {
    geom.validate()?;
    if profile.len() < 3 || profile.len() % 2 == 0 {
        return Err(Error::invalid("profile", "needs an odd number of samples >= 3"));
    }
    let k = geom.wavenumber();
    let kt = k * tilt.sin();
    let ramped: Vec<Complex<T>> = profile
        .field
        .iter()
        .enumerate()
        .map(|(i, f)| *f * Complex::from_polar(T::one(), kt * profile.x(i)))
        .collect();

    let z = geom.propagation_distance;
    if z == T::zero() {
        return Ok(BeamProfile {
            start: profile.start,
            step: profile.step,
            field: ramped,
        });
    }

    let d = geom.detector_halfwidth;
    let shift = z * tilt.sin();
    let (u0, u1) = (profile.start, profile.end());
    let span = [u0 - d, u0 + d, u1 - d, u1 + d]
        .iter()
        .map(|v| (*v + shift).abs())
        .fold(T::zero(), T::max);
    let max_step = geom.wavelength * z / (span + span);
    if profile.step > max_step {
        let extent = (u1 - u0).to_f64().unwrap_or(f64::INFINITY);
        let needed = (extent / max_step.to_f64().unwrap_or(0.0)).ceil() as usize + 1;
        return Err(Error::Sampling {
            reason: format!(
                "aperture step {:e} m exceeds the Fresnel kernel Nyquist step {:e} m",
                profile.step.to_f64().unwrap_or(f64::NAN),
                max_step.to_f64().unwrap_or(f64::NAN)
            ),
            required: needed | 1,
        });
    }

    let weights = simpson_weights(profile.len(), profile.step);
    let source: Vec<(T, Complex<T>)> = ramped
        .iter()
        .zip(&weights)
        .enumerate()
        .map(|(i, (f, w))| (profile.x(i), *f * *w))
        .collect();
    // 1/sqrt(iλz)
    let prefactor = Complex::from_polar((geom.wavelength * z).sqrt().recip(), -T::FRAC_PI_4());
    let half_k_over_z = k / (z + z);

    let out = BeamProfile {
        start: -d,
        step: geom.detector_step(),
        field: Vec::new(),
    };
    let field = (0..geom.samples_detector)
        .into_par_iter()
        .map(|j| {
            let x = out.x(j);
            let acc = source.iter().fold(Complex::new(T::zero(), T::zero()), |acc, (u, g)| {
                let r = x - *u;
                acc + *g * Complex::from_polar(T::one(), half_k_over_z * r * r)
            });
            acc * prefactor
        })
        .collect();
    Ok(BeamProfile { field, ..out })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom() -> WedgeGeometry<f64> {
        WedgeGeometry::default()
    }

    #[test]
    fn untruncated_field_has_unit_power() {
        let g = WedgeGeometry { truncate: false, ..geom() };
        for path in [WedgePath::A1, WedgePath::A2] {
            let p = truncated_aperture_field(&g, path).unwrap();
            assert!((p.power() - 1.0).abs() < 1e-10);
        }
        // a wide aperture behaves the same with truncation on
        let wide = geom().with_aperture(40.0 * geom().beam_sigma);
        let wide = WedgeGeometry { samples_aperture: 8193, ..wide };
        let p = truncated_aperture_field(&wide, WedgePath::A1).unwrap();
        assert!((p.power() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn default_truncation_loses_a_sliver() {
        let loss = analytic_truncation_loss(&geom());
        assert!(loss > 0.0 && loss < 1e-20);
        let p = truncated_aperture_field(&geom(), WedgePath::A1).unwrap().power();
        assert!(p <= 1.0 + 1e-12 && p > 1.0 - 1e-6);
        let g5 = geom().with_aperture(5.0 * geom().beam_sigma);
        let loss5 = analytic_truncation_loss(&g5);
        assert!(loss5 > 5e-7 && loss5 < 6e-7);
        let p5 = truncated_aperture_field(&g5, WedgePath::A1).unwrap().power();
        assert!((1.0 - p5 - loss5).abs() < 1e-9);
    }

    #[test]
    fn paths_are_mirror_images() {
        let a1 = truncated_aperture_field(&geom(), WedgePath::A1).unwrap();
        let a2 = truncated_aperture_field(&geom(), WedgePath::A2).unwrap();
        assert_eq!(a1.len(), a2.len());
        let n = a1.len();
        for i in 0..n {
            assert!((a1.x(i) + a2.x(n - 1 - i)).abs() < 1e-14);
            assert!((a1.field[i] - a2.field[n - 1 - i]).norm() < 1e-14);
        }
        assert!(a1.start.abs() < 1e-18 && a2.end().abs() < 1e-15);
    }

    #[test]
    fn zero_distance_is_identity() {
        let g = WedgeGeometry { propagation_distance: 0.0, ..geom() };
        let a1 = truncated_aperture_field(&g, WedgePath::A1).unwrap();
        let out = fresnel_propagate(&a1, &g, 0.0).unwrap();
        assert_eq!(out.len(), a1.len());
        for (a, b) in a1.field.iter().zip(&out.field) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn gaussian_spreads_like_closed_form() {
        // Centred, untruncated, untilted beam on a wide detector.
        let base = geom();
        let g = WedgeGeometry {
            aperture_halfwidth: 5.0 * base.beam_sigma,
            truncate: false,
            tilt_angle: 0.0,
            detector_halfwidth: 20.0 * base.beam_sigma,
            samples_detector: 8193,
            ..base
        };
        let mut beam = truncated_aperture_field(&g, WedgePath::A1).unwrap();
        beam.start -= g.aperture_halfwidth;
        let out = fresnel_propagate(&beam, &g, 0.0).unwrap();

        let w0 = 2.0 * g.beam_sigma;
        let rayleigh = std::f64::consts::PI * w0 * w0 / g.wavelength;
        let z = g.propagation_distance;
        let want = g.beam_sigma * (1.0 + (z / rayleigh).powi(2)).sqrt();
        let (mean, width) = out.centroid_width();
        assert!(mean.abs() < 1e-12);
        assert!(((width - want) / want).abs() < 1e-6, "{width} vs {want}");
        assert!((out.power() - beam.power()).abs() < 1e-6);
    }

    #[test]
    fn tilted_beam_lands_on_axis_and_conserves_power() {
        let g = geom();
        let a1 = truncated_aperture_field(&g, WedgePath::A1).unwrap();
        let out = fresnel_propagate(&a1, &g, -g.tilt_angle).unwrap();
        let (mean, _) = out.centroid_width();
        assert!(mean.abs() < 1e-3 * g.beam_sigma, "centroid {mean}");
        assert!(((out.power() - a1.power()) / a1.power()).abs() < 1e-6);
    }

    #[test]
    fn clipped_edge_rings() {
        // Clipping at 5σ leaves ripples riding on the smooth diffracted
        // Gaussian: the magnitude difference keeps changing sign.
        let clipped = geom().with_aperture(5.0 * geom().beam_sigma);
        let open = WedgeGeometry { truncate: false, ..clipped };
        let magnitude = |g: &WedgeGeometry<f64>| -> Vec<f64> {
            let a1 = truncated_aperture_field(g, WedgePath::A1).unwrap();
            let out = fresnel_propagate(&a1, g, -g.tilt_angle).unwrap();
            out.field.iter().map(|f| f.norm()).collect()
        };
        let (mc, mo) = (magnitude(&clipped), magnitude(&open));
        let peak = mo.iter().cloned().fold(0.0, f64::max);
        let diff: Vec<f64> = mc
            .iter()
            .zip(&mo)
            .filter(|(_, o)| **o > 1e-3 * peak)
            .map(|(c, o)| c - o)
            .collect();
        let crossings = diff.windows(2).filter(|w| w[0] * w[1] < 0.0).count();
        assert!(crossings > 3, "{crossings} sign changes");
        let ripple = diff.iter().cloned().fold(0.0, |m: f64, d| m.max(d.abs()));
        assert!(ripple > 1e-4 * peak && ripple < 1e-1 * peak, "ripple {ripple}");
    }

    #[test]
    fn coarse_aperture_sampling_is_rejected() {
        let g = WedgeGeometry {
            samples_aperture: 65,
            propagation_distance: 0.01,
            ..geom()
        };
        let a1 = truncated_aperture_field(&g, WedgePath::A1).unwrap();
        match fresnel_propagate(&a1, &g, -g.tilt_angle) {
            Err(Error::Sampling { required, .. }) => assert!(required > 65 && required % 2 == 1),
            other => panic!("expected sampling error, got {other:?}"),
        }
    }
}
