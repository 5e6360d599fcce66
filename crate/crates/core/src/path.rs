//! Dual Mach-Zehnder bench. Each side sorts the source into two paths,
//! puts a phase on path 1, routes both paths towards its final 50/50
//! splitter and counts at detectors 1 and 0. Alice can pull her splitter
//! out (path detection) or block her photon before it enters the
//! interferometer.

use num_complex::Complex;
use rayon::prelude::*;

use crate::amplitude::{
    distribution_from_amplitudes, make_source_state, Amplitudes, Basis, JointDistribution,
    MarginalDistribution, Mat2,
};
use crate::error::{Error, Result};
use crate::scalar::{canonical_angle, lit, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AliceMode {
    SplitterIn,
    SplitterOut,
    BeamStop,
}

impl AliceMode {
    pub const ALL: [AliceMode; 3] = [Self::SplitterIn, Self::SplitterOut, Self::BeamStop];

    pub fn label(self) -> &'static str {
        match self {
            Self::SplitterIn => "in",
            Self::SplitterOut => "out",
            Self::BeamStop => "stop",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathConfig<T> {
    alpha: T,
    phi_a: T,
    phi_b: T,
    alice_mode: AliceMode,
}

impl<T: Real> PathConfig<T> {
    pub fn new(alpha: T, phi_a: T, phi_b: T, alice_mode: AliceMode) -> Result<Self> {
        for (name, v) in [("alpha", alpha), ("phi_a", phi_a), ("phi_b", phi_b)] {
            if !v.is_finite() {
                return Err(Error::invalid(name, "must be finite"));
            }
        }
        Ok(Self {
            alpha: canonical_angle(alpha),
            phi_a: canonical_angle(phi_a),
            phi_b: canonical_angle(phi_b),
            alice_mode,
        })
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }
    pub fn phi_a(&self) -> T {
        self.phi_a
    }
    pub fn phi_b(&self) -> T {
        self.phi_b
    }
    pub fn alice_mode(&self) -> AliceMode {
        self.alice_mode
    }
}

/// Detector pair for a coincidence, or Bob's detector alone when Alice's
/// photon is blocked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PathOutcome {
    A1B1,
    A1B0,
    A0B1,
    A0B0,
    B1,
    B0,
}

impl PathOutcome {
    pub const JOINT: [PathOutcome; 4] = [Self::A1B1, Self::A1B0, Self::A0B1, Self::A0B0];
    pub const BOB_ONLY: [PathOutcome; 2] = [Self::B1, Self::B0];

    pub fn outcomes(mode: AliceMode) -> &'static [PathOutcome] {
        match mode {
            AliceMode::BeamStop => &Self::BOB_ONLY,
            _ => &Self::JOINT,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Self::A1B1 => "A1B1",
            Self::A1B0 => "A1B0",
            Self::A0B1 => "A0B1",
            Self::A0B0 => "A0B0",
            Self::B1 => "B1",
            Self::B0 => "B0",
        }
    }

    /// 0 for D_B1, 1 for D_B0.
    pub fn bob_index(self) -> usize {
        match self {
            Self::A1B1 | Self::A0B1 | Self::B1 => 0,
            _ => 1,
        }
    }
}

fn cx<T: Real>(re: f64, im: f64) -> Complex<T> {
    Complex::new(lit(re), lit(im))
}

/// Phase shifter on path 1.
pub fn phase_shifter<T: Real>(phi: T) -> Mat2<T> {
    Mat2::diag(Complex::from_polar(T::one(), phi), cx(1.0, 0.0))
}

/// Mirror routing from (path 1, path 2) to the (port 1, port 0) inputs of
/// the final splitter position. Path 2 runs straight to port 1, path 1
/// picks up a −π/2 phase on its way to port 0.
pub fn routing<T: Real>() -> Mat2<T> {
    Mat2::from_rows([cx(0.0, 0.0), cx(1.0, 0.0)], [cx(0.0, -1.0), cx(0.0, 0.0)])
}

/// Lossless 50/50 splitter with `i` on reflection, rows (D₁, D₀).
pub fn splitter<T: Real>() -> Mat2<T> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    Mat2::from_rows([cx(r, 0.0), cx(0.0, r)], [cx(0.0, r), cx(r, 0.0)])
}

/// Map from Bob's (b₁, b₂) path amplitudes to his (D_B1, D_B0) detectors.
pub fn bob_output_map<T: Real>(phi_b: T) -> Mat2<T> {
    splitter().mul(&routing()).mul(&phase_shifter(phi_b))
}

/// Map from Alice's (a₁, a₂) path amplitudes to her (D_A1, D_A0) detectors.
pub fn alice_output_map<T: Real>(phi_a: T, mode: AliceMode) -> Result<Mat2<T>> {
    let routed = routing().mul(&phase_shifter(phi_a));
    match mode {
        AliceMode::SplitterIn => Ok(splitter().mul(&routed)),
        AliceMode::SplitterOut => Ok(routed),
        AliceMode::BeamStop => Err(Error::Mode(mode)),
    }
}

/// Joint amplitudes in order `A1B1, A1B0, A0B1, A0B0`.
pub fn mz_joint_amplitudes<T: Real>(cfg: &PathConfig<T>) -> Result<Amplitudes<T>> {
    let alice = alice_output_map(cfg.phi_a, cfg.alice_mode)?;
    let state = make_source_state(cfg.alpha, Basis::Path)?;
    Ok(state.apply_local(&alice, &bob_output_map(cfg.phi_b)))
}

pub fn mz_joint_probabilities<T: Real>(cfg: &PathConfig<T>) -> Result<JointDistribution<T>> {
    distribution_from_amplitudes(&mz_joint_amplitudes(cfg)?)
}

/// Bob's singles. With Alice's detectors present this sums the joint table
/// over her outcomes; with the beam stop it reads the diagonal of Bob's
/// reduced state after his interferometer.
pub fn mz_bob_marginals<T: Real>(cfg: &PathConfig<T>) -> Result<MarginalDistribution<T>> {
    match cfg.alice_mode {
        AliceMode::BeamStop => {
            let rho = make_source_state(cfg.alpha, Basis::Path)?.bob_reduced();
            let out = bob_output_map(cfg.phi_b).conjugate(&rho);
            Ok(MarginalDistribution {
                p_b1: out.m[0][0].re,
                p_b0: out.m[1][1].re,
            })
        }
        _ => Ok(mz_joint_probabilities(cfg)?.bob_marginals()),
    }
}

/// Alice-independent singles prediction `[1 ± sin 2α sin φ_B]/2`.
pub fn bob_singles_closed_form<T: Real>(alpha: T, phi_b: T) -> MarginalDistribution<T> {
    let m = (alpha + alpha).sin() * phi_b.sin();
    let half: T = lit(0.5);
    MarginalDistribution {
        p_b1: (T::one() + m) * half,
        p_b0: (T::one() - m) * half,
    }
}

/// Fringe visibility of Bob's singles as φ_B varies, `|sin 2α|`.
pub fn bob_visibility<T: Real>(alpha: T) -> T {
    (alpha + alpha).sin().abs()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MzRow<T> {
    pub alpha: T,
    pub phi_a: T,
    pub phi_b: T,
    pub mode: AliceMode,
    /// `None` in beam-stop mode.
    pub joint: Option<JointDistribution<T>>,
    pub marginals: MarginalDistribution<T>,
}

/// Rows ordered by `(alpha, phi_a, phi_b, mode)` grid index.
pub fn mz_sweep<T: Real>(
    alphas: &[T],
    phi_as: &[T],
    phi_bs: &[T],
    modes: &[AliceMode],
) -> Result<Vec<MzRow<T>>> {
    for (name, empty) in [
        ("alpha_list", alphas.is_empty()),
        ("phi_a_grid", phi_as.is_empty()),
        ("phi_b_grid", phi_bs.is_empty()),
        ("modes", modes.is_empty()),
    ] {
        if empty {
            return Err(Error::invalid(name, "grid is empty"));
        }
    }
    let mut configs = Vec::with_capacity(alphas.len() * phi_as.len() * phi_bs.len() * modes.len());
    for &a in alphas {
        for &pa in phi_as {
            for &pb in phi_bs {
                for &m in modes {
                    configs.push(PathConfig::new(a, pa, pb, m)?);
                }
            }
        }
    }
    configs
        .par_iter()
        .map(|cfg| {
            let joint = match cfg.alice_mode {
                AliceMode::BeamStop => None,
                _ => Some(mz_joint_probabilities(cfg)?),
            };
            Ok(MzRow {
                alpha: cfg.alpha,
                phi_a: cfg.phi_a,
                phi_b: cfg.phi_b,
                mode: cfg.alice_mode,
                joint,
                marginals: mz_bob_marginals(cfg)?,
            })
        })
        .collect()
}
