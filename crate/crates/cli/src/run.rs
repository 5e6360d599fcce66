use std::f64::consts::{FRAC_PI_2, PI, TAU};

use nosig_core::path::mz_sweep;
use nosig_core::polarization::polar_sweep;
use nosig_core::sampler::{chsh_analytic, estimate_chsh, sample_events, Bench, SamplerSpec};
use nosig_core::wedge::{signal_difference_map, DetectorFields};
use nosig_core::{PathConfig, PolarizationConfig};

use crate::audit::{linspace, run_no_signal_audit, AuditGrid, AuditTarget, NoSignalReport, Verdict};
use crate::config::{BenchKind, RunConfig};
use crate::table::{Cell, Table};
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct Execution {
    pub table: Table,
    /// Set by the audit bench.
    pub verdict: Option<Verdict>,
    /// Notes for standard error, such as cells that failed to evaluate.
    pub warnings: Vec<String>,
}

impl Execution {
    fn table(table: Table) -> Self {
        Self {
            table,
            verdict: None,
            warnings: Vec::new(),
        }
    }
}

/// Points over `[0, 2π)`.
fn periodic(n: usize) -> Vec<f64> {
    (0..n).map(|i| TAU * i as f64 / n as f64).collect()
}

fn grid_points(cfg: &RunConfig) -> usize {
    cfg.count("grid").unwrap_or(1).max(1) as usize
}

pub fn execute(cfg: &RunConfig) -> Result<Execution, CliError> {
    match cfg.bench {
        BenchKind::Polar => polar(cfg),
        BenchKind::Mz => mz(cfg),
        BenchKind::Wedge => wedge(cfg),
        BenchKind::Sample => sample(cfg),
        BenchKind::Chsh => chsh(cfg),
        BenchKind::Diffmap => diffmap(cfg),
        BenchKind::Audit => audit(cfg),
    }
}

fn polar(cfg: &RunConfig) -> Result<Execution, CliError> {
    let thetas = cfg
        .optional_angles("theta")
        .unwrap_or_else(|| linspace(0.0, PI, grid_points(cfg)));
    let mut t = Table::new(&["alpha", "theta", "p_hh", "p_hv", "p_vh", "p_vv"]);
    for row in polar_sweep(&cfg.angles("alpha"), &thetas)? {
        let mut cells = vec![Cell::Real(row.alpha), Cell::Real(row.theta)];
        cells.extend(row.joint.probs().into_iter().map(Cell::Real));
        t.push(cells);
    }
    Ok(Execution::table(t))
}

fn mz(cfg: &RunConfig) -> Result<Execution, CliError> {
    let phi_bs = cfg
        .optional_angles("phi_b")
        .unwrap_or_else(|| periodic(grid_points(cfg)));
    let rows = mz_sweep(
        &cfg.angles("alpha"),
        &[cfg.angle("phi_a")],
        &phi_bs,
        &[cfg.alice_mode()],
    )?;
    let mut t = Table::new(&["alpha", "phi_b", "p_b1", "p_b0"]);
    for r in rows {
        t.push(vec![
            Cell::Real(r.alpha),
            Cell::Real(r.phi_b),
            Cell::Real(r.marginals.p_b1),
            Cell::Real(r.marginals.p_b0),
        ]);
    }
    Ok(Execution::table(t))
}

fn wedge(cfg: &RunConfig) -> Result<Execution, CliError> {
    let fields = DetectorFields::compute(&cfg.geometry())?;
    let (a, pa, pb) = (cfg.angle("alpha"), cfg.angle("phi_a"), cfg.angle("phi_b"));
    let b1 = fields.density(a, pa, pb, nosig_core::wedge::BobOutcome::B1)?;
    let b0 = fields.density(a, pa, pb, nosig_core::wedge::BobOutcome::B0)?;
    let mut t = Table::new(&["x", "abs_a1", "abs_a2", "density_b1", "density_b0"]);
    for i in 0..fields.a1.len() {
        t.push(vec![
            Cell::Real(fields.a1.x(i)),
            Cell::Real(fields.a1.field[i].norm()),
            Cell::Real(fields.a2.field[i].norm()),
            Cell::Real(b1.values[i]),
            Cell::Real(b0.values[i]),
        ]);
    }
    Ok(Execution::table(t))
}

fn sample(cfg: &RunConfig) -> Result<Execution, CliError> {
    let alpha = cfg.angle("alpha");
    let bench = match cfg.word("source") {
        Some("mz") => Bench::Path(PathConfig::new(
            alpha,
            cfg.angle("phi_a"),
            cfg.angle("phi_b"),
            cfg.alice_mode(),
        )?),
        _ => Bench::Polarization(PolarizationConfig::new(alpha, cfg.angle("theta"))?),
    };
    let spec = SamplerSpec {
        seed: cfg.count("seed").unwrap_or(0),
        n: cfg.count("n").unwrap_or(0),
        bench,
    };
    let mut t = Table::new(&["index", "outcome", "alpha", "setting_a", "setting_b"]);
    for e in sample_events(&spec)? {
        t.push(vec![
            Cell::Int(e.index),
            Cell::Text(e.outcome.label()),
            Cell::Real(e.alpha),
            Cell::Real(e.setting.0),
            Cell::Real(e.setting.1),
        ]);
    }
    Ok(Execution::table(t))
}

fn chsh(cfg: &RunConfig) -> Result<Execution, CliError> {
    let a = cfg.angles("angles");
    let angles = [a[0], a[1], a[2], a[3]];
    let alpha = cfg.angle("alpha");
    let (est, n) = if cfg.flag("analytic") {
        (chsh_analytic(alpha, angles)?, 0)
    } else {
        let n = cfg.count("n").unwrap_or(0);
        (estimate_chsh(alpha, angles, n, cfg.count("seed").unwrap_or(0))?, n)
    };
    let mut t = Table::new(&[
        "s",
        "standard_error",
        "e_ab",
        "e_ab_prime",
        "e_a_prime_b",
        "e_a_prime_b_prime",
        "n_per_setting",
    ]);
    let mut row = vec![Cell::Real(est.s), Cell::Real(est.standard_error)];
    row.extend(est.correlations.into_iter().map(Cell::Real));
    row.push(Cell::Int(n));
    t.push(row);
    Ok(Execution::table(t))
}

fn diffmap(cfg: &RunConfig) -> Result<Execution, CliError> {
    let n = grid_points(cfg);
    let cells = signal_difference_map(
        &linspace(0.0, FRAC_PI_2, n),
        &linspace(0.0, TAU, n),
        cfg.angle("phi_a"),
        &cfg.geometry(),
    )?;
    let mut t = Table::new(&["alpha", "phi_b", "diff_b1", "diff_b0", "err_b1", "err_b0"]);
    let mut warnings = Vec::new();
    for c in cells {
        let vals = match &c.result {
            Ok(d) => [d.diff_b1, d.diff_b0, d.err_b1, d.err_b0],
            Err(e) => {
                warnings.push(format!("alpha={:?} phi_b={:?}: {e}", c.alpha, c.phi_b));
                [f64::NAN; 4]
            }
        };
        let mut row = vec![Cell::Real(c.alpha), Cell::Real(c.phi_b)];
        row.extend(vals.into_iter().map(Cell::Real));
        t.push(row);
    }
    Ok(Execution {
        table: t,
        verdict: None,
        warnings,
    })
}

pub fn report_table(r: &NoSignalReport) -> Table {
    let location: Vec<String> = r.location.iter().map(|(k, v)| format!("{k}={v:?}")).collect();
    let mut t = Table::new(&[
        "bench",
        "grid",
        "max_abs_diff",
        "location",
        "tolerance",
        "failed_cells",
        "verdict",
    ]);
    t.push(vec![
        Cell::Text(r.bench.name().into()),
        Cell::Text(r.grid.clone()),
        Cell::Real(r.max_abs_diff),
        Cell::Text(location.join(" ")),
        Cell::Real(r.tolerance),
        Cell::Int(r.failed_cells.len() as u64),
        Cell::Text(match r.verdict {
            Verdict::Pass => "pass".into(),
            Verdict::Fail => "fail".into(),
        }),
    ]);
    t
}

fn audit(cfg: &RunConfig) -> Result<Execution, CliError> {
    let target = AuditTarget::parse(cfg.word("target").unwrap_or("")).ok_or_else(|| {
        CliError::Usage("audit needs target=polar, mz or wedge".into())
    })?;
    let points = cfg
        .count("grid")
        .map(|g| g as usize)
        .unwrap_or_else(|| target.default_grid());
    let tolerance = cfg.real("tolerance").unwrap_or_else(|| target.default_tolerance());
    let report = run_no_signal_audit(target, &AuditGrid::new(points, cfg.geometry()), tolerance)?;
    Ok(Execution {
        table: report_table(&report),
        verdict: Some(report.verdict),
        warnings: report.failed_cells.clone(),
    })
}
