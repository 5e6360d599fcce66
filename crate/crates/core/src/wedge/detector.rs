use num_complex::Complex;
use rayon::prelude::*;

use super::optics::{fresnel_propagate, truncated_aperture_field, BeamProfile};
use super::quadrature::{integrate_samples, QuadratureResult};
use super::{WedgeGeometry, WedgePath, SAMPLES_PER_FRINGE};
use crate::amplitude::{make_source_state, Basis};
use crate::error::{Error, Result};
use crate::path::{bob_output_map, bob_singles_closed_form};
use crate::scalar::{lit, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BobOutcome {
    B1,
    B0,
}

impl BobOutcome {
    pub const ALL: [BobOutcome; 2] = [Self::B1, Self::B0];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::B1 => "B1",
            Self::B0 => "B0",
        }
    }
}

/// Both paths propagated to the detector plane. Independent of the source
/// state and of every phase setting, so one instance serves a whole map.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorFields<T> {
    pub geometry: WedgeGeometry<T>,
    pub a1: BeamProfile<T>,
    pub a2: BeamProfile<T>,
}

/// Coincidence density with one of Bob's detectors, sampled on the detector
/// grid, in `m^{-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorDensity<T> {
    pub outcome: BobOutcome,
    pub start: T,
    pub step: T,
    pub values: Vec<T>,
}

impl<T: Real> DetectorFields<T> {
    pub fn compute(geom: &WedgeGeometry<T>) -> Result<Self> {
        geom.validate()?;
        let a1 = truncated_aperture_field(geom, WedgePath::A1)?;
        let a2 = truncated_aperture_field(geom, WedgePath::A2)?;
        Ok(Self {
            geometry: *geom,
            a1: fresnel_propagate(&a1, geom, -geom.tilt_angle)?,
            a2: fresnel_propagate(&a2, geom, geom.tilt_angle)?,
        })
    }

    /// Weights `β_k` of path `a_k` in the two-photon amplitude that ends in
    /// Bob's `outcome`.
    fn path_weights(&self, alpha: T, phi_a: T, phi_b: T, outcome: BobOutcome) -> Result<[Complex<T>; 2]> {
        let state = make_source_state(alpha, Basis::Path)?;
        let bob = bob_output_map(phi_b);
        let row = bob.m[outcome.index()];
        let shifter = Complex::from_polar(T::one(), phi_a);
        let mut beta = [Complex::new(T::zero(), T::zero()); 2];
        for (k, b) in beta.iter_mut().enumerate() {
            for (j, m) in row.iter().enumerate() {
                *b = *b + state.coeff(k, j) * *m;
            }
        }
        beta[0] = beta[0] * shifter;
        Ok(beta)
    }

    pub fn density(&self, alpha: T, phi_a: T, phi_b: T, outcome: BobOutcome) -> Result<DetectorDensity<T>> {
        if self.a1.len() != self.a2.len() || self.a1.start != self.a2.start {
            return Err(Error::invalid("fields", "paths are sampled on different grids"));
        }
        let [b1, b2] = self.path_weights(alpha, phi_a, phi_b, outcome)?;
        let values = self
            .a1
            .field
            .iter()
            .zip(&self.a2.field)
            .map(|(f1, f2)| (b1 * *f1 + b2 * *f2).norm_sqr())
            .collect();
        Ok(DetectorDensity {
            outcome,
            start: self.a1.start,
            step: self.a1.step,
            values,
        })
    }
}

/// Position-resolved coincidence density between Alice's detector and Bob's
/// `outcome` detector. Propagates both paths; reuse [`DetectorFields`] when
/// evaluating many settings.
pub fn joint_density_at_detector<T: Real>(
    alpha: T,
    phi_a: T,
    phi_b: T,
    outcome: BobOutcome,
    geom: &WedgeGeometry<T>,
) -> Result<DetectorDensity<T>> {
    DetectorFields::compute(geom)?.density(alpha, phi_a, phi_b, outcome)
}

/// Integrates a density over the detector face. The grid must resolve the
/// fringes set by the tilt with at least 32 samples per period.
pub fn integrate_detector<T: Real>(
    density: &DetectorDensity<T>,
    geom: &WedgeGeometry<T>,
) -> Result<QuadratureResult<T>> {
    if let Some(period) = geom.fringe_period() {
        let needed = period / lit(SAMPLES_PER_FRINGE);
        if density.step > needed {
            let width = density.step * lit((density.values.len().max(1) - 1) as f64);
            let intervals = (width / needed).ceil().to_usize().unwrap_or(usize::MAX);
            return Err(Error::Sampling {
                reason: format!(
                    "detector step {:e} m resolves fewer than {SAMPLES_PER_FRINGE} samples per {:e} m fringe",
                    density.step.to_f64().unwrap_or(f64::NAN),
                    period.to_f64().unwrap_or(f64::NAN)
                ),
                required: intervals.div_ceil(4) * 4 + 1,
            });
        }
    }
    integrate_samples(&density.values, density.step)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellDiff<T> {
    pub diff_b1: T,
    pub diff_b0: T,
    pub err_b1: T,
    pub err_b0: T,
}

impl<T: Real> CellDiff<T> {
    pub fn max_abs(&self) -> T {
        self.diff_b1.abs().max(self.diff_b0.abs())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffCell<T> {
    pub alpha: T,
    pub phi_b: T,
    pub result: Result<CellDiff<T>>,
}

fn cell<T: Real>(fields: &DetectorFields<T>, alpha: T, phi_a: T, phi_b: T) -> Result<CellDiff<T>> {
    let want = bob_singles_closed_form(alpha, phi_b);
    let mut got = [QuadratureResult {
        value: T::zero(),
        error_estimate: T::zero(),
        refinement_levels: 0,
    }; 2];
    for outcome in BobOutcome::ALL {
        let density = fields.density(alpha, phi_a, phi_b, outcome)?;
        got[outcome.index()] = integrate_detector(&density, &fields.geometry)?;
    }
    Ok(CellDiff {
        diff_b1: got[0].value - want.p_b1,
        diff_b0: got[1].value - want.p_b0,
        err_b1: got[0].error_estimate,
        err_b0: got[1].error_estimate,
    })
}

impl<T: Real> DetectorFields<T> {
    /// Integrated Bob singles minus the Alice-independent prediction over an
    /// alpha-major `(alpha, phi_b)` grid. Failures are recorded per cell.
    pub fn difference_map(&self, alphas: &[T], phi_bs: &[T], phi_a: T) -> Result<Vec<DiffCell<T>>> {
        map_cells(Ok(self), alphas, phi_bs, phi_a)
    }
}

fn map_cells<T: Real>(
    fields: Result<&DetectorFields<T>>,
    alphas: &[T],
    phi_bs: &[T],
    phi_a: T,
) -> Result<Vec<DiffCell<T>>> {
    if alphas.is_empty() {
        return Err(Error::invalid("alpha_grid", "grid is empty"));
    }
    if phi_bs.is_empty() {
        return Err(Error::invalid("phi_b_grid", "grid is empty"));
    }
    let points: Vec<(T, T)> = alphas
        .iter()
        .flat_map(|&a| phi_bs.iter().map(move |&p| (a, p)))
        .collect();
    Ok(points
        .par_iter()
        .map(|&(alpha, phi_b)| DiffCell {
            alpha,
            phi_b,
            result: match &fields {
                Ok(f) => cell(f, alpha, phi_a, phi_b),
                Err(e) => Err(e.clone()),
            },
        })
        .collect())
}

/// [`DetectorFields::difference_map`] for a geometry. If the fields cannot
/// be propagated every cell carries that error.
pub fn signal_difference_map<T: Real>(
    alphas: &[T],
    phi_bs: &[T],
    phi_a: T,
    geom: &WedgeGeometry<T>,
) -> Result<Vec<DiffCell<T>>> {
    let fields = DetectorFields::compute(geom);
    map_cells(fields.as_ref().map_err(Clone::clone), alphas, phi_bs, phi_a)
}

/// Largest `|diff|` over the successful cells with its `(alpha, phi_b)`.
pub fn max_abs_diff<T: Real>(cells: &[DiffCell<T>]) -> Option<(T, T, T)> {
    cells
        .iter()
        .filter_map(|c| c.result.as_ref().ok().map(|d| (d.max_abs(), c.alpha, c.phi_b)))
        .fold(None, |best, cur| match best {
            Some(b) if b.0 >= cur.0 => Some(b),
            _ => Some(cur),
        })
}
