//! Monte Carlo click streams drawn from the analytic benches, empirical
//! estimators and the CHSH statistic.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::amplitude::{JointDistribution, MarginalDistribution};
use crate::error::{Error, Result};
use crate::path::{mz_bob_marginals, mz_joint_probabilities, AliceMode, PathConfig, PathOutcome};
use crate::polarization::{polar_joint_probabilities, PolarOutcome, PolarizationConfig};
use crate::scalar::{lit, Real};

/// Events per independently seeded RNG stream.
pub const CHUNK_SIZE: u64 = 65_536;

/// Minimum pairs per setting for [`estimate_chsh`].
pub const MIN_CHSH_PAIRS: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bench<T> {
    Polarization(PolarizationConfig<T>),
    Path(PathConfig<T>),
    /// An arbitrary four-outcome table in `(11, 10, 01, 00)` order.
    Table(JointDistribution<T>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Polar(PolarOutcome),
    Path(PathOutcome),
    /// Slot of a [`Bench::Table`], 0 to 3.
    Slot(u8),
}

impl Outcome {
    pub fn label(&self) -> String {
        match self {
            Self::Polar(o) => o.label().to_string(),
            Self::Path(o) => o.label().to_string(),
            Self::Slot(s) => format!("o{}", s + 1),
        }
    }

    /// 0 when Bob's first detector (H or B1) fired, 1 otherwise.
    pub fn bob_index(&self) -> usize {
        match self {
            Self::Polar(o) => o.bob_index(),
            Self::Path(o) => o.bob_index(),
            Self::Slot(s) => (*s as usize) % 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EventRecord<T> {
    pub index: u64,
    pub outcome: Outcome,
    pub alpha: T,
    /// Alice's and Bob's settings: `(θ, 0)` for polarization, `(φ_A, φ_B)`
    /// for the interferometer.
    pub setting: (T, T),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerSpec<T> {
    pub seed: u64,
    pub n: u64,
    pub bench: Bench<T>,
}

struct Table<T> {
    outcomes: Vec<Outcome>,
    cdf: Vec<f64>,
    alpha: T,
    setting: (T, T),
}

fn cumulative<T: Real>(probs: &[T]) -> Vec<f64> {
    let mut acc = 0.0;
    probs
        .iter()
        .map(|p| {
            acc += p.to_f64().unwrap_or(0.0).max(0.0);
            acc
        })
        .collect()
}

fn table<T: Real>(bench: &Bench<T>) -> Result<Table<T>> {
    Ok(match bench {
        Bench::Polarization(cfg) => Table {
            outcomes: PolarOutcome::ALL.iter().map(|o| Outcome::Polar(*o)).collect(),
            cdf: cumulative(&polar_joint_probabilities(cfg).probs()),
            alpha: cfg.alpha(),
            setting: (cfg.theta(), T::zero()),
        },
        Bench::Path(cfg) => {
            let outcomes = PathOutcome::outcomes(cfg.alice_mode());
            let cdf = if cfg.alice_mode() == AliceMode::BeamStop {
                let m = mz_bob_marginals(cfg)?;
                cumulative(&[m.p_b1, m.p_b0])
            } else {
                cumulative(&mz_joint_probabilities(cfg)?.probs())
            };
            Table {
                outcomes: outcomes.iter().map(|o| Outcome::Path(*o)).collect(),
                cdf,
                alpha: cfg.alpha(),
                setting: (cfg.phi_a(), cfg.phi_b()),
            }
        }
        Bench::Table(dist) => Table {
            outcomes: (0..4).map(Outcome::Slot).collect(),
            cdf: cumulative(&dist.probs()),
            alpha: T::zero(),
            setting: (T::zero(), T::zero()),
        },
    })
}

/// Index of the outcome selected by `u ∈ [0, 1)`. Rounding in the table can
/// leave the last cumulative value just under `u`; the draw then goes to
/// the last outcome with nonzero weight.
fn pick(cdf: &[f64], u: f64) -> usize {
    let total = cdf.last().copied().unwrap_or(0.0);
    let u = u * total;
    cdf.iter().position(|&c| u < c).unwrap_or_else(|| {
        let mut prev = 0.0;
        let mut last = 0;
        for (i, &c) in cdf.iter().enumerate() {
            if c > prev {
                last = i;
            }
            prev = c;
        }
        last
    })
}

fn chunk_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn chunk_bounds(n: u64) -> impl IndexedParallelIterator<Item = (u64, u64)> {
    let chunks = n.div_ceil(CHUNK_SIZE) as usize;
    (0..chunks).into_par_iter().map(move |c| {
        let c = c as u64;
        let start = c * CHUNK_SIZE;
        (c, (start + CHUNK_SIZE).min(n) - start)
    })
}

/// `spec.n` i.i.d. events. The stream depends only on the seed and the
/// bench, never on the size of the thread pool.
pub fn sample_events<T: Real>(spec: &SamplerSpec<T>) -> Result<Vec<EventRecord<T>>> {
    let t = table(&spec.bench)?;
    let chunks: Vec<Vec<EventRecord<T>>> = chunk_bounds(spec.n)
        .map(|(c, len)| {
            let mut rng = chunk_rng(spec.seed, c);
            (0..len)
                .map(|i| EventRecord {
                    index: c * CHUNK_SIZE + i,
                    outcome: t.outcomes[pick(&t.cdf, rng.random::<f64>())],
                    alpha: t.alpha,
                    setting: t.setting,
                })
                .collect()
        })
        .collect();
    Ok(chunks.into_iter().flatten().collect())
}

/// Outcome counts for `n` draws with the same streams as [`sample_events`],
/// without materialising the events.
pub fn sample_counts<T: Real>(spec: &SamplerSpec<T>) -> Result<Vec<(Outcome, u64)>> {
    let t = table(&spec.bench)?;
    let k = t.outcomes.len();
    let counts = chunk_bounds(spec.n)
        .map(|(c, len)| {
            let mut rng = chunk_rng(spec.seed, c);
            let mut counts = vec![0u64; k];
            for _ in 0..len {
                counts[pick(&t.cdf, rng.random::<f64>())] += 1;
            }
            counts
        })
        .reduce(
            || vec![0u64; k],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    Ok(t.outcomes.into_iter().zip(counts).collect())
}

pub fn outcome_counts<T>(events: &[EventRecord<T>]) -> Vec<(Outcome, u64)> {
    let mut counts: Vec<(Outcome, u64)> = Vec::new();
    for e in events {
        match counts.iter_mut().find(|(o, _)| *o == e.outcome) {
            Some((_, c)) => *c += 1,
            None => counts.push((e.outcome, 1)),
        }
    }
    counts
}

/// Bob's singles frequencies with binomial standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalMarginals {
    pub marginals: MarginalDistribution<f64>,
    pub se_b1: f64,
    pub se_b0: f64,
    pub n: u64,
}

pub fn binomial_se(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

pub fn empirical_marginals<T>(events: &[EventRecord<T>]) -> Result<EmpiricalMarginals> {
    if events.is_empty() {
        return Err(Error::EmptyInput("events"));
    }
    let n = events.len() as u64;
    let b1 = events.iter().filter(|e| e.outcome.bob_index() == 0).count() as f64;
    let p_b1 = b1 / n as f64;
    let p_b0 = 1.0 - p_b1;
    Ok(EmpiricalMarginals {
        marginals: MarginalDistribution { p_b1, p_b0 },
        se_b1: binomial_se(p_b1, n),
        se_b0: binomial_se(p_b0, n),
        n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshEstimate<T> {
    pub s: T,
    pub standard_error: T,
    /// `E(a,b), E(a,b'), E(a',b), E(a',b')`.
    pub correlations: [T; 4],
}

/// The four `(Alice, Bob)` angle pairs of a CHSH run, in the order the
/// correlations enter `S`.
fn settings<T: Real>(angles: [T; 4]) -> [(T, T); 4] {
    let [a, b, a2, b2] = angles;
    [(a, b), (a, b2), (a2, b), (a2, b2)]
}

fn chsh_check<T: Real>(alpha: T, angles: &[T; 4]) -> Result<()> {
    if !alpha.is_finite() || alpha.sin().abs() > lit(1e-12) {
        return Err(Error::Unsupported(
            "CHSH needs the rotation-invariant singlet, alpha = 0".into(),
        ));
    }
    if angles.iter().any(|a| !a.is_finite()) {
        return Err(Error::invalid("angles", "must be finite"));
    }
    Ok(())
}

fn combine<T: Real>(e: [T; 4]) -> T {
    (e[0] - e[1] + e[2] + e[3]).abs()
}

/// Exact `S` from the analytic correlations `E(θ) = −cos 2θ`.
pub fn chsh_analytic<T: Real>(alpha: T, angles: [T; 4]) -> Result<ChshEstimate<T>> {
    chsh_check(alpha, &angles)?;
    let mut e = [T::zero(); 4];
    for (slot, (a, b)) in e.iter_mut().zip(settings(angles)) {
        *slot = polar_joint_probabilities(&PolarizationConfig::new(alpha, a - b)?).correlation();
    }
    Ok(ChshEstimate {
        s: combine(e),
        standard_error: T::zero(),
        correlations: e,
    })
}

/// Sampled `S` with `n_per_setting` pairs for each of the four settings.
/// Angles are `(a, b, a', b')`. Setting `k` draws from seed `seed + k`.
pub fn estimate_chsh<T: Real>(
    alpha: T,
    angles: [T; 4],
    n_per_setting: u64,
    seed: u64,
) -> Result<ChshEstimate<f64>> {
    chsh_check(alpha, &angles)?;
    if n_per_setting < MIN_CHSH_PAIRS {
        return Err(Error::invalid(
            "n",
            format!("need at least {MIN_CHSH_PAIRS} pairs per setting"),
        ));
    }
    let mut e = [0.0; 4];
    let mut var = 0.0;
    for (k, (a, b)) in settings(angles).into_iter().enumerate() {
        let spec = SamplerSpec {
            seed: seed.wrapping_add(k as u64),
            n: n_per_setting,
            bench: Bench::Polarization(PolarizationConfig::new(alpha, a - b)?),
        };
        let mut same = 0u64;
        for (o, c) in sample_counts(&spec)? {
            if matches!(o, Outcome::Polar(PolarOutcome::HH | PolarOutcome::VV)) {
                same += c;
            }
        }
        let n = n_per_setting as f64;
        e[k] = (2.0 * same as f64 - n) / n;
        var += (1.0 - e[k] * e[k]) / n;
    }
    Ok(ChshEstimate {
        s: combine(e),
        standard_error: var.sqrt(),
        correlations: e,
    })
}
