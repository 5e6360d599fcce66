//! Three-detector wedge-mirror configuration.
//!
//! Alice's two paths leave the wedge side by side, each a Gaussian beam whose
//! tail is clipped at the wedge apex, and are steered towards one detector
//! where they overlap. Fields are propagated with a 1-D paraxial Fresnel
//! integral, combined with Bob's amplitudes into position-resolved
//! coincidence densities and integrated over the detector face.
//!
//! Coordinates: the apex sits at `x = 0` in the wedge plane, path a₁'s beam
//! centre at `+aperture_halfwidth` and a₂'s at `−aperture_halfwidth`. The
//! detector is centred on the optical axis.

mod detector;
mod optics;
mod quadrature;

pub use detector::{
    integrate_detector, joint_density_at_detector, max_abs_diff, signal_difference_map,
    BobOutcome, CellDiff, DetectorDensity, DetectorFields, DiffCell,
};
pub use optics::{analytic_truncation_loss, fresnel_propagate, truncated_aperture_field, BeamProfile};
pub use quadrature::{integrate_samples, simpson, simpson_weights, QuadratureResult};

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Half-width, in beam sigmas, of the window sampled around an unclipped
/// beam. The field there is below `e^{-49}` of its peak.
pub const UNCLIPPED_WINDOW_SIGMAS: f64 = 14.0;

/// Minimum detector samples per interference fringe.
pub const SAMPLES_PER_FRINGE: f64 = 32.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WedgePath {
    A1,
    A2,
}

/// Lengths in metres, angles in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WedgeGeometry<T> {
    pub wavelength: T,
    /// Standard deviation of the beam's intensity profile at the wedge.
    pub beam_sigma: T,
    /// Distance from each beam centre to the apex; the sampled aperture of
    /// each path is `±aperture_halfwidth` around its centre.
    pub aperture_halfwidth: T,
    pub propagation_distance: T,
    /// Steering angle magnitude; a₁ is tilted by `−tilt_angle`, a₂ by `+`.
    pub tilt_angle: T,
    pub detector_halfwidth: T,
    pub samples_aperture: usize,
    pub samples_detector: usize,
    /// Clip each beam at the apex. Off means full Gaussians.
    pub truncate: bool,
}

impl<T: Real> Default for WedgeGeometry<T> {
    fn default() -> Self {
        let sigma: T = lit(0.18e-3);
        Self {
            wavelength: lit(810e-9),
            beam_sigma: sigma,
            aperture_halfwidth: sigma * lit(10.0),
            propagation_distance: T::one(),
            tilt_angle: (sigma * lit(10.0)).asin(),
            detector_halfwidth: sigma * lit(12.0),
            samples_aperture: 2049,
            samples_detector: 4097,
            truncate: true,
        }
    }
}

impl<T: Real> WedgeGeometry<T> {
    /// Tilt that brings both beam centres to the middle of the detector.
    pub fn converging_tilt(&self) -> T {
        if self.propagation_distance > T::zero() {
            (self.aperture_halfwidth / self.propagation_distance).min(T::one()).asin()
        } else {
            T::zero()
        }
    }

    /// Sets the aperture and re-steers the beams onto the detector centre.
    pub fn with_aperture(mut self, halfwidth: T) -> Self {
        self.aperture_halfwidth = halfwidth;
        self.tilt_angle = self.converging_tilt();
        self
    }

    pub fn wavenumber(&self) -> T {
        T::TAU() / self.wavelength
    }

    /// Fringe period where the two tilted beams cross, `None` without tilt.
    pub fn fringe_period(&self) -> Option<T> {
        let s = self.tilt_angle.sin().abs();
        (s > T::zero()).then(|| self.wavelength / (s + s))
    }

    pub fn detector_step(&self) -> T {
        (self.detector_halfwidth + self.detector_halfwidth) / lit((self.samples_detector - 1) as f64)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("wavelength", self.wavelength),
            ("beam_sigma", self.beam_sigma),
            ("aperture_halfwidth", self.aperture_halfwidth),
            ("detector_halfwidth", self.detector_halfwidth),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > T::zero()) {
                return Err(Error::invalid(name, "must be a positive length"));
            }
        }
        if !(self.propagation_distance.is_finite() && self.propagation_distance >= T::zero()) {
            return Err(Error::invalid("propagation_distance", "must be finite and >= 0"));
        }
        if !self.tilt_angle.is_finite() {
            return Err(Error::invalid("tilt_angle", "must be finite"));
        }
        if self.aperture_halfwidth / self.beam_sigma < lit(5.0) {
            return Err(Error::invalid(
                "aperture_halfwidth",
                "must be at least 5 beam sigmas",
            ));
        }
        if self.samples_aperture < 64 || self.samples_aperture % 2 == 0 {
            return Err(Error::invalid("samples_aperture", "must be odd and >= 64"));
        }
        if self.samples_detector < 64 || (self.samples_detector - 1) % 4 != 0 {
            return Err(Error::invalid("samples_detector", "must be of the form 4m+1 and >= 64"));
        }
        Ok(())
    }
}
