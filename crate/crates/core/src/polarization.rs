//! Four-detector polarization bench: Alice's polarimeter is rotated by θ
//! relative to Bob's, both sort photons into H and V.

use num_complex::Complex;
use rayon::prelude::*;

use crate::amplitude::{
    distribution_from_amplitudes, make_source_state, Amplitudes, Basis, JointDistribution,
    MarginalDistribution, Mat2,
};
use crate::error::{Error, Result};
use crate::scalar::{canonical_angle, Real};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationConfig<T> {
    alpha: T,
    theta: T,
}

impl<T: Real> PolarizationConfig<T> {
    pub fn new(alpha: T, theta: T) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::invalid("alpha", "must be finite"));
        }
        if !theta.is_finite() {
            return Err(Error::invalid("theta", "must be finite"));
        }
        Ok(Self {
            alpha: canonical_angle(alpha),
            theta: canonical_angle(theta),
        })
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn theta(&self) -> T {
        self.theta
    }
}

/// Alice's polarization, then Bob's.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolarOutcome {
    HH,
    HV,
    VH,
    VV,
}

impl PolarOutcome {
    pub const ALL: [PolarOutcome; 4] = [Self::HH, Self::HV, Self::VH, Self::VV];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::HH => "HH",
            Self::HV => "HV",
            Self::VH => "VH",
            Self::VV => "VV",
        }
    }

    /// 0 for Bob H, 1 for Bob V.
    pub fn bob_index(self) -> usize {
        self.index() % 2
    }
}

/// Projectors onto Alice's rotated analyzer axes, rows `⟨H'|`, `⟨V'|`.
fn analyzer<T: Real>(theta: T) -> Mat2<T> {
    let (s, c) = theta.sin_cos();
    let z = T::zero();
    Mat2::from_rows(
        [Complex::new(c, z), Complex::new(s, z)],
        [Complex::new(-s, z), Complex::new(c, z)],
    )
}

fn identity<T: Real>() -> Mat2<T> {
    let one = Complex::new(T::one(), T::zero());
    Mat2::diag(one, one)
}

/// Joint amplitudes `Ψ_HH, Ψ_HV, Ψ_VH, Ψ_VV` obtained by projecting the
/// source state onto Alice's rotated axes and Bob's fixed axes.
pub fn polar_joint_amplitudes<T: Real>(cfg: &PolarizationConfig<T>) -> Amplitudes<T> {
    let state = make_source_state(cfg.alpha, Basis::Polarization)
        .expect("config angles are finite");
    state.apply_local(&analyzer(cfg.theta), &identity())
}

pub fn polar_joint_probabilities<T: Real>(cfg: &PolarizationConfig<T>) -> JointDistribution<T> {
    distribution_from_amplitudes(&polar_joint_amplitudes(cfg))
        .expect("analyzer projection is unitary")
}

/// Bob's H and V singles, `P_HH + P_VH` and `P_HV + P_VV`.
pub fn polar_bob_marginals<T: Real>(cfg: &PolarizationConfig<T>) -> MarginalDistribution<T> {
    polar_joint_probabilities(cfg).bob_marginals()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarRow<T> {
    pub alpha: T,
    pub theta: T,
    pub joint: JointDistribution<T>,
}

/// One row per `(alpha, theta)`, alpha-major, in input order.
pub fn polar_sweep<T: Real>(alphas: &[T], thetas: &[T]) -> Result<Vec<PolarRow<T>>> {
    if alphas.is_empty() {
        return Err(Error::invalid("alpha_list", "grid is empty"));
    }
    if thetas.is_empty() {
        return Err(Error::invalid("theta_grid", "grid is empty"));
    }
    let configs = alphas
        .iter()
        .flat_map(|&a| thetas.iter().map(move |&t| PolarizationConfig::new(a, t)))
        .collect::<Result<Vec<_>>>()?;
    Ok(configs
        .par_iter()
        .map(|cfg| PolarRow {
            alpha: cfg.alpha,
            theta: cfg.theta,
            joint: polar_joint_probabilities(cfg),
        })
        .collect())
}
