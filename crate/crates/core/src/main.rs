use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use semicircle::combinatorics::{
    enumerate_ncpp, enumerate_pair_partitions, enumerate_partitions, tally_classes, ClassCount,
};
use semicircle::ensemble::{
    covariance_model, sample_matrix, EnsembleConfig, MarkovChainSpec, ProcessSpec, RawChain, Summability,
};
use semicircle::io::{
    format_float, write_counts_csv, write_csv, write_histogram_csv, write_json, write_moments_csv,
    write_spectrum_csv, CountRow,
};
use semicircle::spectral::{eigenvalues, empirical_distribution, kolmogorov_distance, moment_report, Bins, SemicircleLaw};
use semicircle::verify::{preset, run_plan, ExperimentPlan, PRESETS, RESULT_FILE};
use semicircle::{Error, DEFAULT_SEED};

const EXIT_VERDICT: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

/// Symmetric random matrices with independent correlated diagonals.
///
/// Every command is deterministic: identical arguments give byte-identical
/// files, whatever the thread count.
#[derive(Parser, Debug)]
#[command(name = "semicircle", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Worker threads for replica-parallel work (default: all cores). Never changes any output.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Eigenvalues of one matrix: spectrum.csv, histogram.csv and summary.json.
    Spectrum {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        /// Histogram bins: a positive count or "auto" (Freedman-Diaconis).
        #[arg(long, default_value = "auto", value_parser = parse_bins)]
        bins: Bins,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Spectral moments (1/n) tr X^k against the semicircle limits: moments.csv.
    Moments {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        /// Largest moment order.
        #[arg(long, default_value_t = 8)]
        max_k: u32,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Exhaustive pair-partition counts #S_n(π) and #S_n*(π): counts.csv and partition_counts.csv.
    Combinatorics {
        /// Tuple length; must be even.
        #[arg(long)]
        k: usize,
        /// Comma-separated matrix sizes, e.g. 5,10,20.
        #[arg(long, value_delimiter = ',', default_value = "5,10,20")]
        n_ladder: Vec<usize>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Exact along-diagonal covariance Cov(0..max_tau) and its summability: covariance.csv.
    Covariance {
        #[command(flatten)]
        process: ProcessArgs,
        /// Largest lag.
        #[arg(long, default_value_t = 20)]
        max_tau: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run an experiment plan and write result.json; exit 1 if any verdict fails.
    Verify {
        /// Built-in plan: theorem1, moments, lemmas, variance, toeplitz or covariance.
        #[arg(long, conflicts_with = "config")]
        preset: Option<String>,
        /// Experiment plan as JSON.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides the plan's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the plan's replica count.
        #[arg(long)]
        replicas: Option<u32>,
        /// Output directory for result.json and CSV files.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
}

#[derive(Args, Debug)]
struct ProcessArgs {
    /// Diagonal process.
    #[arg(long, value_enum)]
    process: Option<ProcessKind>,
    /// Lag-one correlation of the ar1 process, |rho| < 1.
    #[arg(long)]
    rho: Option<f64>,
    /// JSON file {"states": [...], "transition": [[...], ...]} for the markov process.
    #[arg(long)]
    chain: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EnsembleArgs {
    /// Matrix dimension.
    #[arg(long)]
    n: Option<usize>,
    #[command(flatten)]
    process: ProcessArgs,
    /// Ensemble as JSON {"n": ..., "seed": ..., "process": {...}}; other flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed (default 20240917).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// csv writes the tables plus a JSON summary; json writes everything as JSON.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ProcessKind {
    Iid,
    Ar1,
    Markov,
    Toeplitz,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

fn parse_bins(s: &str) -> Result<Bins, String> {
    if s == "auto" {
        return Ok(Bins::Auto);
    }
    match s.parse::<usize>() {
        Ok(b) if b > 0 => Ok(Bins::Count(b)),
        _ => Err(format!("expected a positive integer or \"auto\", got {s:?}")),
    }
}

/// A failure with its exit status.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Numerical(_) => EXIT_NUMERICAL,
            _ => EXIT_CONFIG,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn config_failure(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_CONFIG,
        message: message.into(),
    }
}

type CliResult<T> = std::result::Result<T, Failure>;

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> CliResult<T> {
    let text = fs::read_to_string(path).map_err(|e| config_failure(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| config_failure(format!("{}: {e}", path.display())))
}

impl ProcessArgs {
    /// `None` when no process flag is given.
    fn resolve(&self) -> CliResult<Option<ProcessSpec>> {
        let Some(kind) = self.process else {
            if self.rho.is_some() || self.chain.is_some() {
                return Err(config_failure("--rho and --chain require --process"));
            }
            return Ok(None);
        };
        if self.rho.is_some() && kind != ProcessKind::Ar1 {
            return Err(config_failure("--rho applies only to --process ar1"));
        }
        if self.chain.is_some() && kind != ProcessKind::Markov {
            return Err(config_failure("--chain applies only to --process markov"));
        }
        let spec = match kind {
            ProcessKind::Iid => ProcessSpec::Iid,
            ProcessKind::Toeplitz => ProcessSpec::ConstantDiagonal,
            ProcessKind::Ar1 => ProcessSpec::GaussAr1 {
                rho: self.rho.ok_or_else(|| config_failure("--process ar1 needs --rho"))?,
            },
            ProcessKind::Markov => {
                let path = self.chain.as_ref().ok_or_else(|| config_failure("--process markov needs --chain"))?;
                let raw: RawChain = read_json(path)?;
                ProcessSpec::FiniteMarkov(MarkovChainSpec::try_from(raw)?)
            }
        };
        spec.validate()?;
        Ok(Some(spec))
    }

    fn require(&self) -> CliResult<ProcessSpec> {
        self.resolve()?.ok_or_else(|| config_failure("--process is required"))
    }
}

impl EnsembleArgs {
    fn resolve(&self) -> CliResult<EnsembleConfig> {
        let base: Option<EnsembleConfig> = self.config.as_deref().map(read_json).transpose()?;
        let n = self.n.or(base.as_ref().map(|c| c.n)).ok_or_else(|| config_failure("--n is required"))?;
        let process = match self.process.resolve()? {
            Some(p) => p,
            None => base
                .as_ref()
                .map(|c| c.process.clone())
                .ok_or_else(|| config_failure("--process is required"))?,
        };
        let seed = self.seed.or(base.as_ref().map(|c| c.seed)).unwrap_or(DEFAULT_SEED);
        let config = EnsembleConfig::new(n, process, seed);
        config.validate()?;
        Ok(config)
    }
}

#[derive(Serialize)]
struct SpectrumSummary {
    n: usize,
    seed: u64,
    process: ProcessSpec,
    label: String,
    min: f64,
    max: f64,
    kolmogorov_distance: f64,
    m2: f64,
    m4: f64,
    bins: usize,
}

fn cmd_spectrum(ensemble: &EnsembleArgs, bins: Bins, output: &OutputArgs) -> CliResult<()> {
    let config = ensemble.resolve()?;
    let spectrum = eigenvalues(&sample_matrix(&config, 0)?)?;
    let emp = empirical_distribution(&spectrum, bins)?;
    let report = moment_report(&spectrum, 4)?;
    let summary = SpectrumSummary {
        n: config.n,
        seed: config.seed,
        label: config.process.label(),
        process: config.process.clone(),
        min: spectrum.min(),
        max: spectrum.max(),
        kolmogorov_distance: kolmogorov_distance(&emp, &SemicircleLaw),
        m2: report.rows[1].empirical,
        m4: report.rows[3].empirical,
        bins: emp.histogram().bins(),
    };
    let out = &output.out;
    match output.format {
        Format::Csv => {
            write_spectrum_csv(&out.join("spectrum.csv"), &spectrum)?;
            write_histogram_csv(&out.join("histogram.csv"), emp.histogram())?;
            write_json(&out.join("summary.json"), &summary)?;
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Full<'a> {
                summary: &'a SpectrumSummary,
                eigenvalues: &'a [f64],
                histogram: &'a semicircle::spectral::Histogram,
            }
            let full = Full {
                summary: &summary,
                eigenvalues: spectrum.values(),
                histogram: emp.histogram(),
            };
            write_json(&out.join("spectrum.json"), &full)?;
        }
    }
    println!(
        "n={} process={} KS distance {:.6}",
        summary.n, summary.label, summary.kolmogorov_distance
    );
    Ok(())
}

fn cmd_moments(ensemble: &EnsembleArgs, max_k: u32, output: &OutputArgs) -> CliResult<()> {
    let config = ensemble.resolve()?;
    let spectrum = eigenvalues(&sample_matrix(&config, 0)?)?;
    let report = moment_report(&spectrum, max_k)?;
    match output.format {
        Format::Csv => write_moments_csv(&output.out.join("moments.csv"), &report)?,
        Format::Json => write_json(&output.out.join("moments.json"), &report)?,
    }
    for row in &report.rows {
        println!("k={} empirical {} limit {}", row.k, format_float(row.empirical), row.limit);
    }
    Ok(())
}

#[derive(Serialize)]
struct PartitionCounts {
    k: usize,
    partitions: Option<u64>,
    pair_partitions: u64,
    noncrossing_pair_partitions: u64,
}

fn cmd_combinatorics(k: usize, ladder: &[usize], output: &OutputArgs) -> CliResult<()> {
    if k == 0 || k % 2 == 1 {
        return Err(config_failure(format!("pair partitions need even k >= 2, got {k}")));
    }
    if ladder.is_empty() || ladder.contains(&0) {
        return Err(config_failure("--n-ladder must list positive sizes"));
    }
    let pairs: Vec<_> = enumerate_pair_partitions(k)?.collect();
    let counts = PartitionCounts {
        k,
        // set partitions beyond the enumeration guard are omitted, not refused
        partitions: enumerate_partitions(k).ok().map(|p| p.count() as u64),
        pair_partitions: pairs.len() as u64,
        noncrossing_pair_partitions: enumerate_ncpp(k)?.count() as u64,
    };
    let mut rows = Vec::new();
    for &n in ladder {
        let tally = tally_classes(n, k)?;
        for pp in &pairs {
            let class = tally
                .iter()
                .find(|c| &c.partition == pp.partition())
                .cloned()
                .unwrap_or(ClassCount {
                    partition: pp.partition().clone(),
                    s_n: 0,
                    s_n_star: 0,
                });
            rows.push(CountRow {
                k,
                n,
                ratio_star: class.s_n_star as f64 / (n as f64).powi(k as i32 / 2 + 1),
                class,
            });
        }
    }
    let out = &output.out;
    match output.format {
        Format::Csv => {
            write_counts_csv(&out.join("counts.csv"), &rows)?;
            write_csv(
                &out.join("partition_counts.csv"),
                &["k", "partitions", "pair_partitions", "noncrossing_pair_partitions"],
                [[
                    k.to_string(),
                    counts.partitions.map_or(String::new(), |p| p.to_string()),
                    counts.pair_partitions.to_string(),
                    counts.noncrossing_pair_partitions.to_string(),
                ]],
            )?;
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Full<'a> {
                counts: &'a PartitionCounts,
                classes: &'a [CountRow],
            }
            write_json(&out.join("counts.json"), &Full { counts: &counts, classes: &rows })?;
        }
    }
    println!(
        "k={k}: {} pair partitions, {} non-crossing",
        counts.pair_partitions, counts.noncrossing_pair_partitions
    );
    Ok(())
}

fn cmd_covariance(process: &ProcessArgs, max_tau: usize, output: &OutputArgs) -> CliResult<()> {
    let spec = process.require()?;
    let model = covariance_model(&spec);
    let seq = model.sequence(max_tau);
    match output.format {
        Format::Csv => {
            write_csv(
                &output.out.join("covariance.csv"),
                &["tau", "cov"],
                seq.iter().enumerate().map(|(t, c)| [t.to_string(), format_float(*c)]),
            )?;
            write_json(&output.out.join("summability.json"), &model.abs_sum())?;
        }
        Format::Json => {
            #[derive(Serialize)]
            struct Full<'a> {
                process: &'a ProcessSpec,
                covariance: &'a [f64],
                summability: Summability,
            }
            write_json(
                &output.out.join("covariance.json"),
                &Full {
                    process: &spec,
                    covariance: &seq,
                    summability: model.abs_sum(),
                },
            )?;
        }
    }
    match model.abs_sum() {
        Summability::Finite { sum, .. } => println!("{}: sum |Cov| = {}", spec.label(), format_float(sum)),
        Summability::Divergent => println!("{}: sum |Cov| diverges", spec.label()),
    }
    Ok(())
}

fn cmd_verify(
    preset_name: Option<&str>,
    config: Option<&Path>,
    seed: Option<u64>,
    replicas: Option<u32>,
    out: &Path,
) -> CliResult<()> {
    let mut plan: ExperimentPlan = match (preset_name, config) {
        (Some(name), None) => preset(name).ok_or_else(|| {
            config_failure(format!("unknown preset {name:?}; expected one of {}", PRESETS.join(", ")))
        })?,
        (None, Some(path)) => read_json(path)?,
        _ => return Err(config_failure("give exactly one of --preset and --config")),
    };
    if let Some(s) = seed {
        plan.seed = s;
    }
    if let Some(r) = replicas {
        plan.replicas = r;
    }
    plan.output_dir = Some(out.to_path_buf());
    let result = run_plan(&plan)?;
    for v in &result.verdicts {
        let status = match (v.passed, v.gated) {
            (true, _) => "PASS",
            (false, true) => "FAIL",
            (false, false) => "WEAK",
        };
        println!("{status} {} ({})", v.name, v.detail);
    }
    println!("wrote {}", out.join(RESULT_FILE).display());
    if result.passed() {
        Ok(())
    } else {
        Err(Failure {
            code: EXIT_VERDICT,
            message: "at least one verdict failed".into(),
        })
    }
}

fn run(cli: Cli) -> CliResult<()> {
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(config_failure("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| config_failure(e.to_string()))?;
    }
    match &cli.command {
        Command::Spectrum { ensemble, bins, output } => cmd_spectrum(ensemble, *bins, output),
        Command::Moments { ensemble, max_k, output } => cmd_moments(ensemble, *max_k, output),
        Command::Combinatorics { k, n_ladder, output } => cmd_combinatorics(*k, n_ladder, output),
        Command::Covariance { process, max_tau, output } => cmd_covariance(process, *max_tau, output),
        Command::Verify {
            preset,
            config,
            seed,
            replicas,
            out,
        } => cmd_verify(preset.as_deref(), config.as_deref(), *seed, *replicas, out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    std::panic::set_hook(Box::new(|_| {}));
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(f)) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<String>()
                .map(String::as_str)
                .or_else(|| payload.downcast_ref::<&str>().copied())
                .unwrap_or("unknown");
            eprintln!("internal error: {msg}");
            ExitCode::from(EXIT_NUMERICAL)
        }
    }
}
