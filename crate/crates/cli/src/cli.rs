use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::{parse_assignments, Assignment, BenchKind, RunConfig};
use crate::run::execute;
use crate::table::emit_table;
use crate::{CliError, Verdict};

#[derive(Debug, Parser)]
#[command(name = "nosig", version, about = "Two-photon interference benches and no-signaling checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Joint polarization probabilities over alpha and theta.
    Polar(RunArgs),
    /// Bob's singles in the interferometer over alpha and phi_b.
    Mz(RunArgs),
    /// Field magnitudes and coincidence densities across the wedge detector.
    Wedge(RunArgs),
    /// Monte Carlo click stream.
    Sample(RunArgs),
    /// CHSH statistic at alpha = 0.
    Chsh(RunArgs),
    /// Wedge singles minus the Alice-independent prediction.
    Diffmap(RunArgs),
    /// No-signaling audit; exits with 2 when it fails.
    Audit(RunArgs),
}

#[derive(Debug, Args, Default)]
pub struct RunArgs {
    /// key=value or JSON config; flags override its entries.
    #[arg(long)]
    pub config: Option<String>,
    /// Angle or comma-separated angles, e.g. 0,pi/8,pi/4.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub theta: Option<String>,
    #[arg(long = "phi-a", allow_hyphen_values = true)]
    pub phi_a: Option<String>,
    #[arg(long = "phi-b", allow_hyphen_values = true)]
    pub phi_b: Option<String>,
    /// Alice's output splitter: in, out or stop.
    #[arg(long = "bs-a")]
    pub bs_a: Option<String>,
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long)]
    pub n: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    /// Geometry override, repeatable: --geom beam_sigma=2e-4.
    #[arg(long = "geom", value_name = "KEY=VAL")]
    pub geom: Vec<String>,
    /// Source bench for `sample`: polar or mz.
    #[arg(long)]
    pub source: Option<String>,
    /// CHSH angles a,b,a',b'.
    #[arg(long, allow_hyphen_values = true)]
    pub angles: Option<String>,
    /// Exact CHSH value instead of sampling.
    #[arg(long)]
    pub analytic: bool,
    /// Audit target: polar, mz or wedge.
    #[arg(long)]
    pub bench: Option<String>,
    #[arg(long)]
    pub tolerance: Option<String>,
    /// Output path, `-` for standard output.
    #[arg(long)]
    pub out: Option<String>,
    /// csv or json.
    #[arg(long)]
    pub format: Option<String>,
    /// Worker threads; results do not depend on it.
    #[arg(long)]
    pub threads: Option<usize>,
}

impl Command {
    fn parts(&self) -> (BenchKind, &RunArgs) {
        match self {
            Command::Polar(a) => (BenchKind::Polar, a),
            Command::Mz(a) => (BenchKind::Mz, a),
            Command::Wedge(a) => (BenchKind::Wedge, a),
            Command::Sample(a) => (BenchKind::Sample, a),
            Command::Chsh(a) => (BenchKind::Chsh, a),
            Command::Diffmap(a) => (BenchKind::Diffmap, a),
            Command::Audit(a) => (BenchKind::Audit, a),
        }
    }
}

fn flag_assignments(args: &RunArgs) -> Result<Vec<Assignment>, CliError> {
    let mut out = Vec::new();
    let mut push = |k: &str, v: &Option<String>| {
        if let Some(v) = v {
            out.push(Assignment {
                key: k.to_string(),
                value: v.clone(),
                line: None,
            });
        }
    };
    push("alpha", &args.alpha);
    push("theta", &args.theta);
    push("phi_a", &args.phi_a);
    push("phi_b", &args.phi_b);
    push("bs_a", &args.bs_a);
    push("grid", &args.grid);
    push("n", &args.n);
    push("seed", &args.seed);
    push("source", &args.source);
    push("angles", &args.angles);
    push("target", &args.bench);
    push("tolerance", &args.tolerance);
    push("out", &args.out);
    push("format", &args.format);
    if args.analytic {
        push("analytic", &Some("true".into()));
    }
    for g in &args.geom {
        let (k, v) = g
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--geom expects key=value, got `{g}`")))?;
        out.push(Assignment {
            key: k.to_string(),
            value: v.to_string(),
            line: None,
        });
    }
    Ok(out)
}

/// Config for a subcommand: file entries first, then flags on top.
pub fn build_config(command: &Command) -> Result<RunConfig, CliError> {
    let (bench, args) = command.parts();
    let mut assignments = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
                path: path.clone(),
                source,
            })?;
            parse_assignments(&text)?
        }
        None => Vec::new(),
    };
    if let Some(a) = assignments.iter().find(|a| a.key == "bench") {
        if a.value != bench.name() {
            return Err(CliError::Usage(format!(
                "config is for bench `{}` but the subcommand is `{}`",
                a.value,
                bench.name()
            )));
        }
    }
    assignments.retain(|a| a.key != "bench");
    assignments.push(Assignment {
        key: "bench".into(),
        value: bench.name().into(),
        line: None,
    });
    for flag in flag_assignments(args)? {
        assignments.retain(|a| a.key != flag.key);
        assignments.push(flag);
    }
    Ok(RunConfig::from_assignments(&assignments)?)
}

fn run_inner(cli: &Cli) -> Result<Option<Verdict>, CliError> {
    let cfg = build_config(&cli.command)?;
    let exec = execute(&cfg)?;
    for w in &exec.warnings {
        eprintln!("warning: {w}");
    }
    emit_table(&exec.table, cfg.format, &cfg.output_path)?;
    Ok(exec.verdict)
}

/// Runs a parsed command line: 0 on success or a passing audit, 2 on a
/// failing audit, 1 on any error.
pub fn run(cli: Cli) -> ExitCode {
    let (_, args) = cli.command.parts();
    if let Some(n) = args.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot size thread pool: {e}");
            return ExitCode::from(1);
        }
    }
    match run_inner(&cli) {
        Ok(Some(Verdict::Fail)) => ExitCode::from(2),
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
