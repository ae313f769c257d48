use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use idgap_core::analysis::{analyze_files, load_outputs, AnalysisConfig, RecoveryInput};
use idgap_core::bundle::{build_bundle, parse_eval, parse_index_list, verify_bundle, write_bundle, ScenarioKind, ScenarioParams};
use idgap_core::format::ReportFormat;
use idgap_core::metrics::{consistency, MetricParams, TokenJaccard};
use idgap_core::simulator::PresetKind;
use idgap_core::{Error, Result};

#[derive(Parser)]
#[command(name = "idgap", version, about = "Occurrence versus co-instantiation analysis of agent identity traces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute persistence, gap ratio and the auxiliary metrics for one trace.
    Analyze(AnalyzeArgs),
    /// Write a scenario's trace(s), identity spec and expected-values sidecar.
    Simulate(SimulateArgs),
    /// Score the consistency of recorded outputs to one identity query.
    Probe(ProbeArgs),
    /// Re-analyse a simulated scenario directory and check its sidecar.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct MetricFlags {
    /// Identifiability threshold on state distance.
    #[arg(long = "delta-i")]
    delta_i: Option<f64>,
    /// Similarity threshold for consistency.
    #[arg(long = "delta-cons")]
    delta_cons: Option<f64>,
    /// Recovery regulariser.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Coherence weight on consistency.
    #[arg(long)]
    alpha: Option<f64>,
}

impl MetricFlags {
    fn params(&self) -> MetricParams {
        let d = MetricParams::default();
        MetricParams {
            delta_i: self.delta_i.unwrap_or(d.delta_i),
            delta_cons: self.delta_cons.unwrap_or(d.delta_cons),
            epsilon: self.epsilon.unwrap_or(d.epsilon),
            alpha: self.alpha.unwrap_or(d.alpha),
        }
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    trace: PathBuf,
    #[arg(long)]
    identity: PathBuf,
    /// Window horizon in objective steps.
    #[arg(long, default_value_t = 1)]
    delta: usize,
    #[arg(long, default_value_t = 1)]
    stride: usize,
    /// `all` or a comma-separated list of layer times.
    #[arg(long, default_value = "all")]
    eval: String,
    /// Search bound for minimal horizons.
    #[arg(long = "horizon-max", default_value_t = 64)]
    horizon_max: usize,
    #[command(flatten)]
    metrics: MetricFlags,
    /// Reference step for identifiability and recovery.
    #[arg(long = "ref-index", default_value_t = 0)]
    ref_index: usize,
    /// Drifted step for recovery.
    #[arg(long = "drift-index", requires = "recov_index")]
    drift_index: Option<usize>,
    /// Recovered step for recovery.
    #[arg(long = "recov-index", requires = "drift_index")]
    recov_index: Option<usize>,
    /// Comma-separated ingredient ids an intervention may act on.
    #[arg(long, requires = "drift_index")]
    controllable: Option<String>,
    /// Recorded outputs, one per line, for consistency and coherence.
    #[arg(long)]
    outputs: Option<PathBuf>,
    #[arg(long, default_value = "json")]
    format: ReportFormat,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Scenario name.
    #[arg(value_name = "SCENARIO", required_unless_present = "scenario_flag")]
    scenario: Option<String>,
    #[arg(long = "scenario", value_name = "NAME", conflicts_with = "scenario")]
    scenario_flag: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Trace length.
    #[arg(long)]
    length: Option<usize>,
    /// Context capacity of the capacity scenario.
    #[arg(long)]
    c: Option<usize>,
    /// Ingredient count.
    #[arg(long)]
    k: Option<usize>,
    /// Identity block size.
    #[arg(long)]
    block: Option<usize>,
    /// Filler tokens per retrieved passage.
    #[arg(long)]
    passage: Option<usize>,
    /// Context capacity of the displacement scenario.
    #[arg(long)]
    capacity: Option<usize>,
    /// Probe turns.
    #[arg(long)]
    turns: Option<usize>,
    /// Architecture preset for the preset scenario.
    #[arg(long)]
    preset: Option<PresetKind>,
    /// Comma-separated ingredient indices lost to drift.
    #[arg(long)]
    removed: Option<String>,
    /// Comma-separated ingredient indices an intervention may restore.
    #[arg(long)]
    controllable: Option<String>,
    /// Corrective steps.
    #[arg(long)]
    interventions: Option<usize>,
    #[arg(long)]
    epsilon: Option<f64>,
}

#[derive(Args)]
struct ProbeArgs {
    /// Recorded outputs, one per line.
    #[arg(long)]
    outputs: PathBuf,
    #[arg(long = "delta-cons", default_value_t = MetricParams::default().delta_cons)]
    delta_cons: f64,
    #[arg(long, default_value = "text")]
    format: ReportFormat,
}

#[derive(Args)]
struct VerifyArgs {
    /// Directory written by `simulate`.
    dir: PathBuf,
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            message: e.to_string(),
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_analyze(a: AnalyzeArgs) -> Result<ExitCode> {
    let recovery = match (a.drift_index, a.recov_index) {
        (Some(drift_index), Some(recov_index)) => Some(RecoveryInput {
            drift_index,
            recov_index,
            controllable: a
                .controllable
                .as_deref()
                .map(|s| s.split(',').map(|x| x.trim().to_string()).filter(|x| !x.is_empty()).collect()),
        }),
        _ => None,
    };
    let cfg = AnalysisConfig {
        horizon: a.delta,
        stride: a.stride,
        eval: parse_eval(&a.eval)?,
        horizon_max: a.horizon_max,
        params: a.metrics.params(),
        ref_index: a.ref_index,
        recovery,
        outputs: a.outputs.as_deref().map(load_outputs).transpose()?,
    };
    let report = analyze_files(&a.trace, &a.identity, &cfg)?;
    emit(&report.render(a.format), a.out.as_deref())?;
    if report.gap_ratio.is_none() {
        // The report is still written; the undefined gap is the metric error.
        let e = Error::Metric(format!(
            "gap ratio undefined: no layer time reaches ingredient-wise occurrence within horizon {}",
            report.horizon_max
        ));
        eprintln!("idgap: {e}");
        return Ok(ExitCode::from(e.exit_code()));
    }
    Ok(ExitCode::SUCCESS)
}

fn run_simulate(a: SimulateArgs) -> Result<ExitCode> {
    let name = a.scenario.or(a.scenario_flag).unwrap_or_default();
    let kind: ScenarioKind = name.parse()?;
    let params = ScenarioParams {
        length: a.length,
        c: a.c,
        k: a.k,
        block: a.block,
        passage: a.passage,
        capacity: a.capacity,
        turns: a.turns,
        preset: a.preset,
        removed: a.removed.as_deref().map(parse_index_list).transpose()?,
        controllable: a.controllable.as_deref().map(parse_index_list).transpose()?,
        interventions: a.interventions,
        epsilon: a.epsilon,
    };
    let bundle = build_bundle(kind, &params)?;
    let dir = a.out.unwrap_or_else(|| PathBuf::from(kind.name()));
    write_bundle(&bundle, &dir)?;
    for (file, _) in &bundle.traces {
        println!("{}", dir.join(file).display());
    }
    Ok(ExitCode::SUCCESS)
}

fn run_probe(a: ProbeArgs) -> Result<ExitCode> {
    let outputs = load_outputs(&a.outputs)?;
    let score = consistency(&outputs, &TokenJaccard, a.delta_cons)?;
    let text = match a.format {
        ReportFormat::Json => format!(
            "{{\"consistency\": {:.6}, \"pairs\": {}, \"agreeing\": {}, \"delta_cons\": {:.6}}}\n",
            score.score, score.pairs, score.agreeing, a.delta_cons
        ),
        ReportFormat::Text => format!(
            "consistency {:.6}\npairs {}\nagreeing {}\n",
            score.score, score.pairs, score.agreeing
        ),
    };
    print!("{text}");
    Ok(ExitCode::SUCCESS)
}

fn run_verify(a: VerifyArgs) -> Result<ExitCode> {
    let outcomes = verify_bundle(&a.dir)?;
    let mut failed = 0;
    for o in &outcomes {
        let tag = if o.passed { "PASS" } else { "FAIL" };
        println!("{tag} {} (observed {})", o.expectation, o.observed);
        failed += usize::from(!o.passed);
    }
    Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(a) => run_analyze(a),
        Command::Simulate(a) => run_simulate(a),
        Command::Probe(a) => run_probe(a),
        Command::Verify(a) => run_verify(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("idgap: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
