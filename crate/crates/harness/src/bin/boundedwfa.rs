use std::collections::BTreeSet;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use boundedwfa::experiment::{run_experiment, Algorithm, ExperimentParams};
use boundedwfa::generate::{generate, GenKind, GenSpec};
use boundedwfa::instance::{read_instance, Instance};
use boundedwfa::report::compare_report;
use boundedwfa::trace_csv::{fmt_float, read_trace, TraceFile};
use boundedwfa::{HarnessError, Result};
use boundedwfa_core::phases::{audit_condition1, PhaseAudit, PhaseParams};
use boundedwfa_core::Configuration;
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "boundedwfa", version, about = "Work Function Algorithm with bounded history")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check an instance document against the schema and the metric axioms.
    Validate { file: PathBuf },
    /// Generate a seeded instance document (BOUNDEDWFA_SEED overrides --seed).
    Gen {
        #[arg(long)]
        kind: GenKind,
        /// |S| for mts-random, number of points otherwise.
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        /// Number of requests.
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 10)]
        max_weight: u32,
        #[arg(long, default_value_t = 10)]
        max_cost: u32,
        /// Never request one of the k most recently requested points.
        #[arg(long)]
        avoid_recent: bool,
        /// Grow the requested region linearly over the run.
        #[arg(long)]
        expanding: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one algorithm and write its CSV trace.
    Run {
        #[arg(long)]
        alg: Algorithm,
        #[arg(long, default_value_t = 1.0)]
        epsilon: f64,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Skip the offline optimum in the summary.
        #[arg(long)]
        no_opt: bool,
        /// Close a phase after these steps regardless of the threshold (debugging aid for `audit`).
        #[arg(long, value_delimiter = ',')]
        force_restart_at: Vec<usize>,
    },
    /// Recompute the phase condition for a wfa-bounded trace; exits 1 if it fails.
    Audit {
        #[arg(long)]
        trace: PathBuf,
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Run several algorithms on one instance and write a comparison.
    Bench {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "wfa-full,wfa-bounded,opt")]
        algs: Vec<Algorithm>,
        #[arg(long, default_value_t = 1.0)]
        epsilon: f64,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        out: PathBuf,
        /// Also write each run's trace as <dir>/<algorithm>.csv.
        #[arg(long)]
        trace_dir: Option<PathBuf>,
    },
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn validate(file: &Path) -> Result<()> {
    let (doc, instance) = read_instance(file)?;
    let space = instance.space();
    let shape = match &instance {
        Instance::Mts(i) => format!("mts: {} states", i.state_count()),
        Instance::KServer(i) => format!("kserver: {} points, k={}", space.len(), i.k()),
    };
    println!(
        "{}: ok ({shape}, {} requests, diameter {}, fingerprint {})",
        file.display(),
        instance.request_count(),
        fmt_float(space.diameter()),
        doc.fingerprint()
    );
    Ok(())
}

fn run(alg: Algorithm, params: ExperimentParams, input: &Path, out: &Path) -> Result<()> {
    let (doc, instance) = read_instance(input)?;
    let mut sink = create(out)?;
    let e = run_experiment(&instance, &doc.fingerprint(), alg, &params, Some(&mut sink))?;
    sink.flush()?;
    print!("{}", e.summary.render());
    Ok(())
}

fn print_audit<S: std::fmt::Display>(audit: &PhaseAudit<f64, S>) {
    println!("phase,first_step,last_step,cost,required,condition,x,y,z");
    for p in &audit.phases {
        let condition = match (p.condition_required, p.condition_holds) {
            (false, _) => "n/a",
            (true, true) => "holds",
            (true, false) => "FAILS",
        };
        println!(
            "{},{},{},{},{},{},{},{},{}",
            p.phase,
            p.first_step,
            p.last_step,
            fmt_float(p.online_cost),
            fmt_float(p.required_cost),
            condition,
            p.suffix_opt_state,
            p.phase_opt_end,
            p.online_end
        );
    }
    println!(
        "total_cost={} opt_cost={} competitive={} minimality={} verdict={}",
        fmt_float(audit.total_cost),
        fmt_float(audit.opt_cost),
        audit.competitive,
        audit.minimality_holds(),
        audit.verdict()
    );
}

fn audit(trace_path: &Path, input: &Path) -> Result<bool> {
    let (doc, instance) = read_instance(input)?;
    let reader = BufReader::new(File::open(trace_path)?);
    let check_meta = |meta: &boundedwfa::TraceMeta| -> Result<PhaseParams<f64>> {
        if meta.instance != doc.fingerprint() {
            return Err(HarnessError::Mismatch(format!(
                "trace was recorded on instance {}, {} is {}",
                meta.instance,
                input.display(),
                doc.fingerprint()
            )));
        }
        let (Some(alpha), Some(epsilon)) = (meta.alpha, meta.epsilon) else {
            return Err(HarnessError::Trace("metadata lacks alpha/epsilon; only wfa-bounded traces can be audited".into()));
        };
        let k = match &instance {
            Instance::Mts(_) => None,
            Instance::KServer(i) => Some(i.k()),
        };
        Ok(PhaseParams { alpha, epsilon, delta_lb: None, k })
    };
    let verdict = match &instance {
        Instance::Mts(i) => {
            let file: TraceFile<usize> = read_trace(reader)?;
            let params = check_meta(&file.meta)?;
            let audit = audit_condition1(&file.trace, i, &params)?;
            print_audit(&audit);
            audit.verdict()
        }
        Instance::KServer(i) => {
            let file: TraceFile<Configuration> = read_trace(reader)?;
            let params = check_meta(&file.meta)?;
            let audit = audit_condition1(&file.trace, i, &params)?;
            print_audit(&audit);
            audit.verdict()
        }
    };
    Ok(verdict)
}

fn bench(input: &Path, algs: &[Algorithm], params: ExperimentParams, out: &Path, trace_dir: Option<&Path>) -> Result<()> {
    let (doc, instance) = read_instance(input)?;
    let fingerprint = doc.fingerprint();
    let mut summaries = Vec::with_capacity(algs.len());
    // Runs are sequential so their timings do not disturb each other.
    for &alg in algs {
        let e = match trace_dir {
            Some(dir) => {
                std::fs::create_dir_all(dir)?;
                let mut sink = create(&dir.join(format!("{alg}.csv")))?;
                let e = run_experiment(&instance, &fingerprint, alg, &params, Some(&mut sink))?;
                sink.flush()?;
                e
            }
            None => run_experiment(&instance, &fingerprint, alg, &params, None)?,
        };
        summaries.push(e.summary);
    }
    let report = compare_report(&summaries)?;
    std::fs::write(out, &report.csv)?;
    print!("{}", report.table);
    Ok(())
}

fn dispatch(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Validate { file } => validate(&file)?,
        Command::Gen { kind, size, k, n, max_weight, max_cost, avoid_recent, expanding, seed, out } => {
            let spec = GenSpec { kind, size, k, n, max_weight, max_cost, avoid_recent, expanding, seed }
                .with_env_seed()
                .map_err(|m| HarnessError::Schema { location: "seed".into(), message: m })?;
            spec.validate().map_err(|m| HarnessError::Schema { location: "gen".into(), message: m })?;
            let json = generate(&spec).to_json();
            match out {
                Some(path) => std::fs::write(path, json + "\n")?,
                None => writeln!(io::stdout(), "{json}")?,
            }
        }
        Command::Run { alg, epsilon, alpha, delta, input, out, no_opt, force_restart_at } => {
            let params = ExperimentParams {
                epsilon,
                alpha,
                delta,
                force_restart_at: force_restart_at.into_iter().collect::<BTreeSet<_>>(),
                compute_opt: !no_opt,
                ..ExperimentParams::default()
            };
            run(alg, params, &input, &out)?;
        }
        Command::Audit { trace, input } => return audit(&trace, &input),
        Command::Bench { input, algs, epsilon, alpha, out, trace_dir } => {
            let params = ExperimentParams { epsilon, alpha, ..ExperimentParams::default() };
            bench(&input, &algs, params, &out, trace_dir.as_deref())?;
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
