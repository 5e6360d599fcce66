//! Checks that Bob's singles never depend on Alice's settings.

use rayon::prelude::*;

use nosig_core::path::{bob_singles_closed_form, mz_bob_marginals};
use nosig_core::polarization::polar_bob_marginals;
use nosig_core::wedge::{DetectorFields, WedgeGeometry};
use nosig_core::{AliceMode, PathConfig, PolarizationConfig, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AuditTarget {
    Polar,
    Mz,
    Wedge,
}

impl AuditTarget {
    pub fn name(self) -> &'static str {
        match self {
            Self::Polar => "polar",
            Self::Mz => "mz",
            Self::Wedge => "wedge",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [Self::Polar, Self::Mz, Self::Wedge]
            .into_iter()
            .find(|t| t.name() == s)
    }

    pub fn default_grid(self) -> usize {
        match self {
            Self::Polar => 100,
            Self::Mz => 50,
            Self::Wedge => 20,
        }
    }

    pub fn default_tolerance(self) -> f64 {
        match self {
            Self::Polar | Self::Mz => 1e-12,
            Self::Wedge => 1e-4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NoSignalReport {
    pub bench: AuditTarget,
    pub grid: String,
    /// Infinite when any cell failed to evaluate.
    pub max_abs_diff: f64,
    pub location: Vec<(&'static str, f64)>,
    pub tolerance: f64,
    pub failed_cells: Vec<String>,
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditGrid {
    /// Points per swept axis.
    pub points: usize,
    pub geometry: WedgeGeometry<f64>,
    /// Alice phases tried on the wedge bench.
    pub wedge_phi_a: Vec<f64>,
}

impl AuditGrid {
    pub fn new(points: usize, geometry: WedgeGeometry<f64>) -> Self {
        let q = std::f64::consts::FRAC_PI_2;
        Self {
            points,
            geometry,
            wedge_phi_a: vec![0.0, q, 2.0 * q, 3.0 * q],
        }
    }
}

pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

type Candidate = (f64, Vec<(&'static str, f64)>);

fn worst(cands: impl ParallelIterator<Item = Candidate>) -> Option<Candidate> {
    cands.reduce_with(|a, b| if b.0 > a.0 { b } else { a })
}

pub fn run_no_signal_audit(target: AuditTarget, grid: &AuditGrid, tolerance: f64) -> Result<NoSignalReport> {
    let n = grid.points.max(1);
    let tau = std::f64::consts::TAU;
    let mut failed = Vec::new();
    let (grid_summary, best) = match target {
        AuditTarget::Polar => {
            let alphas = linspace(0.0, std::f64::consts::PI, n);
            let thetas = linspace(0.0, tau, n);
            let best = alphas
                .par_iter()
                .flat_map_iter(|&a| thetas.iter().map(move |&t| (a, t)))
                .map(|(a, t)| {
                    let m = polar_bob_marginals(&PolarizationConfig::new(a, t)?);
                    let d = (m.p_b1 - 0.5).abs().max((m.p_b0 - 0.5).abs());
                    Ok((d, vec![("alpha", a), ("theta", t)]))
                })
                .collect::<Result<Vec<Candidate>>>()?;
            (format!("alpha {n} x theta {n}"), worst(best.into_par_iter()))
        }
        AuditTarget::Mz => {
            let axis = linspace(0.0, tau, n);
            let mut points = Vec::with_capacity(n * n * n * 3);
            for &a in &axis {
                for &pa in &axis {
                    for &pb in &axis {
                        for mode in AliceMode::ALL {
                            points.push((a, pa, pb, mode));
                        }
                    }
                }
            }
            let best = points
                .par_iter()
                .map(|&(a, pa, pb, mode)| {
                    let got = mz_bob_marginals(&PathConfig::new(a, pa, pb, mode)?)?;
                    let want = bob_singles_closed_form(a, pb);
                    let d = (got.p_b1 - want.p_b1).abs().max((got.p_b0 - want.p_b0).abs());
                    let mode_index = AliceMode::ALL.iter().position(|m| *m == mode).unwrap_or(0);
                    Ok((d, vec![("alpha", a), ("phi_a", pa), ("phi_b", pb), ("mode", mode_index as f64)]))
                })
                .collect::<Result<Vec<Candidate>>>()?;
            (
                format!("alpha {n} x phi_a {n} x phi_b {n} x 3 modes"),
                worst(best.into_par_iter()),
            )
        }
        AuditTarget::Wedge => {
            let fields = DetectorFields::compute(&grid.geometry)?;
            let alphas = linspace(0.0, std::f64::consts::FRAC_PI_2, n);
            let phi_bs = linspace(0.0, tau, n);
            let mut cands = Vec::new();
            for &pa in &grid.wedge_phi_a {
                for c in fields.difference_map(&alphas, &phi_bs, pa)? {
                    match c.result {
                        Ok(d) => cands.push((d.max_abs(), vec![("alpha", c.alpha), ("phi_b", c.phi_b), ("phi_a", pa)])),
                        Err(e) => failed.push(format!("alpha={:?} phi_b={:?} phi_a={pa:?}: {e}", c.alpha, c.phi_b)),
                    }
                }
            }
            (
                format!("alpha {n} x phi_b {n} x phi_a {}", grid.wedge_phi_a.len()),
                worst(cands.into_par_iter()),
            )
        }
    };
    let (mut max_abs_diff, location) = best.unwrap_or((f64::INFINITY, Vec::new()));
    if !failed.is_empty() {
        max_abs_diff = f64::INFINITY;
    }
    let verdict = if max_abs_diff <= tolerance { Verdict::Pass } else { Verdict::Fail };
    Ok(NoSignalReport {
        bench: target,
        grid: grid_summary,
        max_abs_diff,
        location,
        tolerance,
        failed_cells: failed,
        verdict,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polarization_audit_passes() {
        let r = run_no_signal_audit(AuditTarget::Polar, &AuditGrid::new(100, WedgeGeometry::default()), 1e-12).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(r.max_abs_diff <= 1e-12);
        assert_eq!(r.location.len(), 2);
    }

    #[test]
    fn interferometer_audit_passes_for_all_modes() {
        let r = run_no_signal_audit(AuditTarget::Mz, &AuditGrid::new(12, WedgeGeometry::default()), 1e-12).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(r.grid.contains("3 modes"));
    }

    #[test]
    fn verdict_follows_tolerance() {
        let g = AuditGrid::new(5, WedgeGeometry::default());
        let r = run_no_signal_audit(AuditTarget::Wedge, &g, 1e-4).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert!(r.max_abs_diff > 0.0);
        let strict = run_no_signal_audit(AuditTarget::Wedge, &g, r.max_abs_diff / 2.0).unwrap();
        assert_eq!(strict.verdict, Verdict::Fail);
    }

    #[test]
    fn failed_cells_force_a_fail() {
        let geometry = WedgeGeometry {
            samples_detector: 65,
            ..WedgeGeometry::default()
        };
        let r = run_no_signal_audit(AuditTarget::Wedge, &AuditGrid::new(2, geometry), 1e-4).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.failed_cells.len(), 16);
        assert!(r.max_abs_diff.is_infinite());
    }

    #[test]
    fn linspace_endpoints() {
        assert_eq!(linspace(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
        assert_eq!(linspace(2.0, 5.0, 1), vec![2.0]);
        assert!(linspace(0.0, 1.0, 0).is_empty());
    }
}
