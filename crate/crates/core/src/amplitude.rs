//! Complex amplitudes, the tunable-entanglement source state and the
//! probability tables both analytic benches produce.
//!
//! Two-photon states live in a 2×2 product basis. Index `(alice, bob)` maps
//! to slot `2 * alice + bob`, so the four slots read `x₁y₁, x₁y₂, x₂y₁, x₂y₂`
//! with `(x, y)` either `(H, V)` polarization or `(path 1, path 2)`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{lit, Real};

/// Four joint amplitudes in slot order `(11, 12, 21, 22)`.
pub type Amplitudes<T> = [Complex<T>; 4];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Basis {
    Polarization,
    Path,
}

/// Pure state of a photon pair over a 2×2 product basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoPhotonState<T> {
    coeffs: Amplitudes<T>,
    basis: Basis,
}

impl<T: Real> TwoPhotonState<T> {
    /// Builds a state from raw coefficients, rejecting anything that is not
    /// normalized.
    pub fn new(coeffs: Amplitudes<T>, basis: Basis) -> Result<Self> {
        let deficit = (norm_sqr(&coeffs) - T::one()).abs();
        if !(deficit <= T::norm_tolerance()) {
            return Err(Error::Unitarity {
                deficit: deficit.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self { coeffs, basis })
    }

    pub fn coeffs(&self) -> &Amplitudes<T> {
        &self.coeffs
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    /// Coefficient of `|x_alice⟩|y_bob⟩`, zero-based.
    pub fn coeff(&self, alice: usize, bob: usize) -> Complex<T> {
        self.coeffs[2 * alice + bob]
    }

    pub fn norm_sqr(&self) -> T {
        norm_sqr(&self.coeffs)
    }

    /// Concurrence `2|c₁₁c₂₂ − c₁₂c₂₁|`.
    pub fn concurrence(&self) -> T {
        let [a, b, c, d] = self.coeffs;
        (a * d - b * c).norm() * lit(2.0)
    }

    /// Reduced density matrix of Bob's photon, `ρ_B = Tr_A |Ψ⟩⟨Ψ|`.
    pub fn bob_reduced(&self) -> Mat2<T> {
        let mut rho = Mat2::zero();
        for j in 0..2 {
            for k in 0..2 {
                rho.m[j][k] = (0..2)
                    .map(|a| self.coeff(a, j) * self.coeff(a, k).conj())
                    .fold(Complex::new(T::zero(), T::zero()), |acc, z| acc + z);
            }
        }
        rho
    }

    /// Applies local 2×2 operators, `(A ⊗ B)|Ψ⟩`, returning raw amplitudes
    /// indexed by the operators' output rows.
    pub fn apply_local(&self, alice: &Mat2<T>, bob: &Mat2<T>) -> Amplitudes<T> {
        let zero = Complex::new(T::zero(), T::zero());
        let mut out = [zero; 4];
        for a in 0..2 {
            for b in 0..2 {
                let mut acc = zero;
                for j in 0..2 {
                    for k in 0..2 {
                        acc = acc + alice.m[a][j] * bob.m[b][k] * self.coeff(j, k);
                    }
                }
                out[2 * a + b] = acc;
            }
        }
        out
    }
}

fn norm_sqr<T: Real>(amps: &[Complex<T>]) -> T {
    amps.iter().map(|z| z.norm_sqr()).sum()
}

/// Source state with tunable entanglement:
/// correlated terms carry `(cos β + sin β)/2`, anti-correlated terms
/// `±i(cos β − sin β)/2`, with `β = α − π/4`.
pub fn make_source_state<T: Real>(alpha: T, basis: Basis) -> Result<TwoPhotonState<T>> {
    if !alpha.is_finite() {
        return Err(Error::invalid("alpha", "must be finite"));
    }
    let beta = alpha - T::FRAC_PI_4();
    let (s, c) = beta.sin_cos();
    let half: T = lit(0.5);
    let corr = Complex::new((c + s) * half, T::zero());
    let anti = Complex::new(T::zero(), (c - s) * half);
    Ok(TwoPhotonState {
        coeffs: [corr, anti, -anti, corr],
        basis,
    })
}

/// Concurrence of the source state at `alpha`. Equals `|cos 2α|`.
pub fn entanglement_degree<T: Real>(alpha: T) -> Result<T> {
    Ok(make_source_state(alpha, Basis::Path)?.concurrence())
}

/// Probabilities over four joint outcomes. Slot order is `(11, 10, 01, 00)`
/// in detector-label terms, i.e. Alice's outcome major and Bob's minor, with
/// the "first" detector of each side (H or D₁) listed first.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointDistribution<T> {
    p: [T; 4],
}

impl<T: Real> JointDistribution<T> {
    /// Wraps raw probabilities, checking range and total.
    pub fn new(p: [T; 4]) -> Result<Self> {
        if p.iter().any(|v| !(*v >= T::zero() && *v <= T::one() + T::norm_tolerance())) {
            return Err(Error::invalid("p", "each probability must lie in [0, 1]"));
        }
        let deficit = (p.iter().copied().sum::<T>() - T::one()).abs();
        if !(deficit <= T::norm_tolerance()) {
            return Err(Error::Unitarity {
                deficit: deficit.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self { p })
    }

    pub fn probs(&self) -> [T; 4] {
        self.p
    }

    pub fn p11(&self) -> T {
        self.p[0]
    }
    pub fn p10(&self) -> T {
        self.p[1]
    }
    pub fn p01(&self) -> T {
        self.p[2]
    }
    pub fn p00(&self) -> T {
        self.p[3]
    }

    pub fn total(&self) -> T {
        self.p.iter().copied().sum()
    }

    /// Bob's singles: sums over Alice's outcome.
    pub fn bob_marginals(&self) -> MarginalDistribution<T> {
        MarginalDistribution {
            p_b1: self.p[0] + self.p[2],
            p_b0: self.p[1] + self.p[3],
        }
    }

    /// Correlation `E = P(same) − P(different)` with outcome-1 ↔ +1.
    pub fn correlation(&self) -> T {
        self.p[0] + self.p[3] - self.p[1] - self.p[2]
    }
}

/// Bob's two singles probabilities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginalDistribution<T> {
    pub p_b1: T,
    pub p_b0: T,
}

impl<T: Real> MarginalDistribution<T> {
    pub fn total(&self) -> T {
        self.p_b1 + self.p_b0
    }
}

/// Modulus-squared rule: `p_k = |amp_k|²`.
pub fn distribution_from_amplitudes<T: Real>(amps: &Amplitudes<T>) -> Result<JointDistribution<T>> {
    let deficit = (norm_sqr(amps) - T::one()).abs();
    if !(deficit <= T::norm_tolerance()) {
        return Err(Error::Unitarity {
            deficit: deficit.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(JointDistribution {
        p: amps.map(|z| z.norm_sqr()),
    })
}

/// Dense 2×2 complex matrix, row-major, acting on one photon's two modes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat2<T> {
    pub m: [[Complex<T>; 2]; 2],
}

impl<T: Real> Mat2<T> {
    pub fn zero() -> Self {
        let z = Complex::new(T::zero(), T::zero());
        Self { m: [[z, z], [z, z]] }
    }

    pub fn from_rows(r0: [Complex<T>; 2], r1: [Complex<T>; 2]) -> Self {
        Self { m: [r0, r1] }
    }

    pub fn diag(a: Complex<T>, b: Complex<T>) -> Self {
        let z = Complex::new(T::zero(), T::zero());
        Self { m: [[a, z], [z, b]] }
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = Self::zero();
        for i in 0..2 {
            for j in 0..2 {
                out.m[i][j] = self.m[i][0] * rhs.m[0][j] + self.m[i][1] * rhs.m[1][j];
            }
        }
        out
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero();
        for i in 0..2 {
            for j in 0..2 {
                out.m[i][j] = self.m[j][i].conj();
            }
        }
        out
    }

    /// `M ρ M†`
    pub fn conjugate(&self, rho: &Self) -> Self {
        self.mul(rho).mul(&self.adjoint())
    }
}
