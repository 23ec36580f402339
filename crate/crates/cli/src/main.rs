use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cvtda_cli::output::{to_json, write_file, write_outputs};
use cvtda_cli::{run_pipeline, run_verification, CliError, CliResult, InputFormat, RunConfig, EXIT_CHECK_FAILED};
use cvtda_core::{appendix_sweep, EstimationMode, SweepConfig};

#[derive(Parser)]
#[command(name = "cvtda", version, about = "Betti numbers of point clouds, exact and by simulated homodyne phase estimation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep scales over a point cloud and report exact and estimated Betti numbers.
    Analyze(RunArgs),
    /// Run the self-check suites.
    Verify {
        #[command(flatten)]
        run: RunArgs,
        /// Run only these suites (repeatable).
        #[arg(long = "suite")]
        suites: Vec<String>,
    },
    /// Run the dual-rail gate identity sweep.
    Gates {
        /// Fock cutoffs to test (comma separated).
        #[arg(long, value_delimiter = ',')]
        n_max: Vec<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Write gates.json here instead of printing it.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Pure,
    Mixed,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

/// Flags override fields of `--config`.
#[derive(Args)]
struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Project points onto the unit sphere first.
    #[arg(long)]
    normalize: bool,
    /// Sweep the `2^m − 1` scales `x·2^(1−m)`.
    #[arg(long)]
    m: Option<u32>,
    /// Explicit scales (comma separated).
    #[arg(long, value_delimiter = ',')]
    epsilons: Option<Vec<f64>>,
    #[arg(long)]
    kmax: Option<usize>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long)]
    s: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    window: Option<f64>,
    /// Homodyne samples per (ε, k).
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Also run Grover amplification of each sector.
    #[arg(long)]
    grover: bool,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
}

impl RunArgs {
    fn resolve(self) -> CliResult<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        if self.m.is_some() || self.epsilons.is_some() {
            cfg.m = self.m;
            cfg.epsilons = self.epsilons;
        }
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field {
                    cfg.$field = Some(v);
                }
            )*};
        }
        set!(input, s, gamma, alpha, window, out, workers);
        if let Some(f) = self.format {
            cfg.format = Some(match f {
                FormatArg::Csv => InputFormat::Csv,
                FormatArg::Json => InputFormat::Json,
            });
        }
        if let Some(m) = self.mode {
            cfg.mode = match m {
                ModeArg::Pure => EstimationMode::Pure,
                ModeArg::Mixed => EstimationMode::Mixed,
            };
        }
        if let Some(k) = self.kmax {
            cfg.kmax = k;
        }
        if let Some(n) = self.samples {
            cfg.samples = n;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        cfg.normalize |= self.normalize;
        cfg.grover |= self.grover;
        Ok(cfg)
    }
}

fn analyze(args: RunArgs) -> CliResult<i32> {
    let cfg = args.resolve()?;
    let run = run_pipeline(&cfg)?;
    match &cfg.out {
        Some(dir) => {
            let written = write_outputs(&run, dir)?;
            eprintln!("wrote {} files to {}", written.len(), dir.display());
        }
        None => print!("{}", to_json(&run.report)),
    }
    for r in &run.report.records {
        eprintln!(
            "eps {:<8} k {}  |S_k| {:<5} exact {:<3} estimate {:.4}{}",
            r.epsilon,
            r.k,
            r.simplices,
            r.beta_exact,
            r.beta_estimate,
            if r.resolution_warning { "  (window overlaps a non-zero peak)" } else { "" }
        );
    }
    Ok(0)
}

fn verify(args: RunArgs, suites: Vec<String>) -> CliResult<i32> {
    let cfg = args.resolve()?;
    let report = run_verification(&cfg, &suites)?;
    for s in &report.suites {
        eprintln!(
            "{:<18} {}  checks {:<6} failures {:<4} max deviation {:e}",
            s.name,
            if s.passed { "PASS" } else { "FAIL" },
            s.checks,
            s.failures,
            s.max_deviation
        );
        for note in &s.notes {
            eprintln!("    {note}");
        }
    }
    if let Some(dir) = &cfg.out {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.clone(),
            source,
        })?;
        write_file(&dir.join("report.json"), &to_json(&report))?;
    }
    Ok(if report.passed { 0 } else { EXIT_CHECK_FAILED })
}

fn gates(n_max: Vec<usize>, seed: Option<u64>, out: Option<PathBuf>) -> CliResult<i32> {
    let mut cfg = SweepConfig::default();
    if !n_max.is_empty() {
        cfg.n_max_values = n_max;
    }
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let report = appendix_sweep(&cfg).map_err(CliError::core("gate sweep"))?;
    let text = to_json(&report);
    match out {
        Some(dir) => {
            std::fs::create_dir_all(&dir).map_err(|source| CliError::Io {
                path: dir.clone(),
                source,
            })?;
            write_file(&dir.join("gates.json"), &text)?;
        }
        None => print!("{text}"),
    }
    let failed = report.checks.iter().filter(|c| !c.passed).count();
    eprintln!(
        "{} checks, {failed} failed, max deviation {:e}",
        report.checks.len(),
        report.max_deviation
    );
    Ok(if report.passed { 0 } else { EXIT_CHECK_FAILED })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(args) => analyze(args),
        Command::Verify { run, suites } => verify(run, suites),
        Command::Gates { n_max, seed, out } => gates(n_max, seed, out),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
