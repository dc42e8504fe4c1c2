//! `parity-decode`: code inspection, single decodes and benchmark drivers.
//!
//! Exit status is 0 on success, 1 when `decode` fails to decode, and 2 for
//! any usage, input or configuration error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use serde::Serialize;

use parity_decode::channels::{sample_iid_errors, LlrVector};
use parity_decode::code::LogicalState;
use parity_decode::decoders::{bp_decode, mwd_bruteforce, BpConfig, MWD_MAX_K};
use parity_decode::experiments::{
    bench_iid, cells_to_report, gen_instance, landscape_cells, trajectory_demo, BenchmarkReport,
    DecodeRow, IidBenchConfig, LandscapeConfig, ProblemInstance, Strategy, TrajectorySource,
};
use parity_decode::mcmc::{default_hybrid_budget, mcmc_decode_from, SlhzParams};
use parity_decode::rng::trial_rng;
use parity_decode::{
    bf_decode, BfConfig, DecoderKind, ParityCode, SpinMatrix, SyndromeFamily, TiePolicy,
};

const EXIT_DECODE_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;

#[derive(Parser, Serialize)]
#[command(
    name = "parity-decode",
    version,
    about = "Decoders for parity-encoded spin readouts"
)]
struct Cli {
    /// Worker threads for parallel trials (default: available parallelism).
    #[arg(long, global = true)]
    #[serde(skip)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Print sizes of the code and optionally its matrices.
    CodeInfo(CodeInfoArgs),
    /// Decode one readout, read from a file or generated with i.i.d. noise.
    Decode(DecodeArgs),
    /// Failure probability under i.i.d. readout noise.
    Bench(BenchArgs),
    /// Success landscape of MCMC and the MCMC-BF hybrid over a (beta, gamma) grid.
    Landscape(LandscapeArgs),
    /// Record the states visited while decoding one readout.
    Trajectory(TrajectoryArgs),
}

#[derive(Args, Serialize)]
struct SeedArg {
    /// Master seed.
    #[arg(long, env = "PARITY_DECODE_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Serialize)]
struct OutputArgs {
    /// Directory for report files.
    #[arg(long, default_value = "reports")]
    #[serde(skip)]
    out: PathBuf,
    /// Which report files to write.
    #[arg(long, value_enum, default_value_t = Format::Both)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
    Both,
}

#[derive(Args, Serialize)]
struct CodeInfoArgs {
    #[arg(long)]
    k: usize,
    /// Emit JSON instead of text.
    #[arg(long)]
    json: bool,
    /// Also print the generator and both parity-check matrices (K <= 8).
    #[arg(long)]
    matrices: bool,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum DecodeKind {
    Bf,
    Bp,
    Mcmc,
    Mwd,
}

#[derive(Args, Serialize)]
struct DecodeArgs {
    /// Readout matrix: K rows of K comma-separated ±1 entries, unit diagonal.
    #[arg(long, conflicts_with = "k")]
    input: Option<PathBuf>,
    /// Generate a readout of this size instead of reading one.
    #[arg(long, required_unless_present = "input")]
    k: Option<usize>,
    /// Decode towards this matrix; without it any codeword counts as success.
    #[arg(long)]
    target: Option<PathBuf>,
    /// Transmit a random codeword when generating (default: all-one).
    #[arg(long)]
    random_codeword: bool,
    #[arg(long, value_enum, default_value_t = DecodeKind::Bf)]
    decoder: DecodeKind,
    /// Flip probability used to generate noise and to set BP channel LLRs.
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    #[arg(long, default_value_t = 5)]
    iters: usize,
    /// Resolve zero votes by a seeded coin toss instead of keeping the spin.
    #[arg(long)]
    coin_toss: bool,
    /// MCMC samples (default: C(K,2)).
    #[arg(long)]
    budget: Option<usize>,
    /// MCMC penalty strength.
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, default_value = "weight3", value_parser = parse_family)]
    family: SyndromeFamily,
    #[command(flatten)]
    seed: SeedArg,
    /// Write the CSV row here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct BenchArgs {
    #[arg(long, value_parser = parse_decoder, default_value = "bf")]
    decoder: DecoderKind,
    /// Logical sizes, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    k: Vec<usize>,
    /// Flip probabilities, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    epsilon: Vec<f64>,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 5)]
    iters: usize,
    /// MCMC samples per trial (default: C(K,2)).
    #[arg(long)]
    budget: Option<usize>,
    /// MCMC penalty strength.
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    /// MCMC penalty family.
    #[arg(long, default_value = "weight3", value_parser = parse_family)]
    family: SyndromeFamily,
    #[arg(long)]
    random_codeword: bool,
    #[command(flatten)]
    seed: SeedArg,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, ValueEnum, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
enum StrategyArg {
    Mcmc,
    Hybrid,
    Both,
}

#[derive(Args, Serialize)]
struct LandscapeArgs {
    #[arg(long, default_value_t = 14)]
    k: usize,
    /// Number of random instances.
    #[arg(long, default_value_t = 12)]
    instances: u64,
    #[arg(long, value_enum, default_value_t = StrategyArg::Both)]
    strategy: StrategyArg,
    /// Beta grid, comma separated (default 0, 0.25, ..., 3).
    #[arg(long, value_delimiter = ',')]
    beta: Vec<f64>,
    /// Gamma grid, comma separated (default 0, 0.1, ..., 1.5).
    #[arg(long, value_delimiter = ',')]
    gamma: Vec<f64>,
    /// Samples per trial (default: 4 C(K,2)).
    #[arg(long)]
    budget: Option<usize>,
    /// Trials per cell and instance.
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 5)]
    iters: usize,
    #[arg(long, default_value = "weight4", value_parser = parse_family)]
    family: SyndromeFamily,
    #[command(flatten)]
    seed: SeedArg,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Serialize)]
struct TrajectoryArgs {
    #[arg(long, default_value_t = 20)]
    k: usize,
    /// Flip probability of the i.i.d. readout.
    #[arg(long, default_value_t = 0.15)]
    epsilon: f64,
    /// Take the readout from an MCMC chain on this instance instead.
    #[arg(long)]
    instance_seed: Option<u64>,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    /// Chain steps before the readout is taken.
    #[arg(long, default_value_t = 1000)]
    steps: usize,
    #[arg(long, default_value = "weight4", value_parser = parse_family)]
    family: SyndromeFamily,
    #[arg(long, value_parser = parse_decoder, default_value = "bf")]
    decoder: DecoderKind,
    #[arg(long, default_value_t = 5)]
    iters: usize,
    #[command(flatten)]
    seed: SeedArg,
    /// Write the trajectory here instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn parse_family(s: &str) -> Result<SyndromeFamily, String> {
    s.parse().map_err(|e: parity_decode::Error| e.to_string())
}

fn parse_decoder(s: &str) -> Result<DecoderKind, String> {
    s.parse().map_err(|e: parity_decode::Error| e.to_string())
}

type CliResult<T> = Result<T, String>;

fn fail(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let run_config = serde_json::to_value(&cli).expect("arguments serialize");
    let result = match &cli.command {
        Command::CodeInfo(a) => code_info(a).map(|()| true),
        Command::Decode(a) => decode(a),
        Command::Bench(a) => bench(a, &run_config).map(|()| true),
        Command::Landscape(a) => landscape(a, &run_config).map(|()| true),
        Command::Trajectory(a) => trajectory(a).map(|()| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_DECODE_FAILURE),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn code_info(a: &CodeInfoArgs) -> CliResult<()> {
    let code = ParityCode::new(a.k).map_err(fail)?;
    if a.matrices && a.k > 8 {
        return Err(format!("matrix dump supports K <= 8, got {}", a.k));
    }
    let h4 = code.checks(SyndromeFamily::Weight4);
    let h3 = code.checks(SyndromeFamily::Weight3);
    let mut info = serde_json::json!({
        "k": a.k,
        "n_v": code.n_v(),
        "checks4": h4.len(),
        "checks3": h3.len(),
        "check_weight4_max": h4.iter().map(<[usize]>::len).max().unwrap_or(0),
        "check_weight3": if h3.is_empty() { 0 } else { 3 },
        "d_v": code.weight3_column_weight(),
        "codewords": format!("2^{}", a.k - 1),
    });
    if a.matrices {
        info["generator"] = serde_json::json!(code.generator_matrix().to_rows());
        info["parity_check4"] =
            serde_json::json!(code.parity_check_matrix(SyndromeFamily::Weight4).to_rows());
        info["parity_check3"] =
            serde_json::json!(code.parity_check_matrix(SyndromeFamily::Weight3).to_rows());
    }
    if a.json {
        println!("{}", serde_json::to_string_pretty(&info).map_err(fail)?);
        return Ok(());
    }
    println!("K          {}", a.k);
    println!("N_v        {}", code.n_v());
    println!("checks4    {}", h4.len());
    println!("checks3    {}", h3.len());
    println!("d_v        {}", code.weight3_column_weight());
    println!("codewords  2^{}", a.k - 1);
    if a.matrices {
        for (name, key) in [
            ("G", "generator"),
            ("H (weight-4)", "parity_check4"),
            ("H' (weight-3)", "parity_check3"),
        ] {
            println!("\n{name}");
            for row in info[key].as_array().expect("rows") {
                let bits: Vec<String> = row
                    .as_array()
                    .expect("row")
                    .iter()
                    .map(|b| b.to_string())
                    .collect();
                println!("{}", bits.join(" "));
            }
        }
    }
    Ok(())
}

fn read_matrix(path: &Path) -> CliResult<SpinMatrix> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    SpinMatrix::parse_csv(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn generated_readout(a: &DecodeArgs, k: usize) -> CliResult<(SpinMatrix, SpinMatrix)> {
    let code = ParityCode::new(k).map_err(fail)?;
    let mut rng = trial_rng(a.seed.seed, 0);
    let sent = if a.random_codeword {
        let z: Vec<i8> = (0..k)
            .map(|_| if rng.random::<bool>() { -1 } else { 1 })
            .collect();
        code.encode(&LogicalState::new(z).map_err(fail)?)
            .map_err(fail)?
    } else {
        SpinMatrix::ones(k)
    };
    let e = sample_iid_errors(&code, a.epsilon, &mut rng).map_err(fail)?;
    Ok((sent.hadamard(&e).map_err(fail)?, sent))
}

fn decode(a: &DecodeArgs) -> CliResult<bool> {
    let (x, generated_target) = match (&a.input, a.k) {
        (Some(path), _) => (read_matrix(path)?, None),
        (None, Some(k)) => {
            let (x, sent) = generated_readout(a, k)?;
            (x, Some(sent))
        }
        (None, None) => return Err("either --input or --k is required".into()),
    };
    let k = x.k();
    let code = ParityCode::new(k).map_err(fail)?;
    let target = match &a.target {
        Some(path) => Some(read_matrix(path)?),
        None => generated_target,
    };
    if let Some(t) = &target {
        if t.k() != k {
            return Err(format!("target is {}x{}, readout is {k}x{k}", t.k(), t.k()));
        }
    }
    let policy = if a.coin_toss {
        TiePolicy::CoinToss { seed: a.seed.seed }
    } else {
        TiePolicy::Keep
    };
    let (iterations, success, ties, beta, gamma) = match a.decoder {
        DecodeKind::Bf => {
            let cfg = BfConfig {
                max_iters: a.iters,
                tie_policy: policy,
                record_trajectory: false,
            };
            let r = bf_decode(&code, &x, &cfg, target.as_ref()).map_err(fail)?;
            (r.iterations, r.success, r.ties, None, None)
        }
        DecodeKind::Bp => {
            let eps = a
                .epsilon
                .max(parity_decode::experiments::bench::BP_EPSILON_FLOOR);
            let llr = LlrVector::uniform(&x, eps).map_err(fail)?;
            let r = bp_decode(&code, &llr, &BpConfig::with_iters(a.iters), target.as_ref())
                .map_err(fail)?
                .result;
            (r.iterations, r.success, 0, None, None)
        }
        DecodeKind::Mcmc => {
            let params = SlhzParams::penalty_only(a.gamma, a.family).map_err(fail)?;
            let budget = a.budget.unwrap_or(code.n_v().max(1));
            let probe = target.clone().unwrap_or_else(|| SpinMatrix::ones(k));
            let out =
                mcmc_decode_from(&code, &params, &x, budget, &probe, a.seed.seed).map_err(fail)?;
            let success = if target.is_some() {
                out.success
            } else {
                out.any_codeword
            };
            let iterations = match (target.is_some(), out.first_hit) {
                (true, Some(i)) => i,
                (false, _) => out
                    .run
                    .samples
                    .iter()
                    .position(|s| code.logical_of(s).is_some())
                    .unwrap_or(budget),
                (true, None) => budget,
            };
            (iterations, success, 0, Some(0.0), Some(a.gamma))
        }
        DecodeKind::Mwd => {
            if k > MWD_MAX_K {
                return Err(format!("mwd supports K <= {MWD_MAX_K}, got {k}"));
            }
            let r = mwd_bruteforce(&code, &x, 1.0f64).map_err(fail)?;
            let success = match &target {
                Some(t) => &r.decoded == t,
                None => true,
            };
            (r.weight, success, 0, None, None)
        }
    };
    let row = DecodeRow {
        trial: 0,
        decoder: a
            .decoder
            .to_possible_value()
            .expect("named")
            .get_name()
            .to_string(),
        k,
        epsilon: a.input.is_none().then_some(a.epsilon),
        beta,
        gamma,
        iterations,
        success,
        ties,
    };
    let sink: Box<dyn Write> = match &a.output {
        Some(p) => Box::new(fs::File::create(p).map_err(|e| format!("{}: {e}", p.display()))?),
        None => Box::new(std::io::stdout()),
    };
    let mut w = csv::Writer::from_writer(sink);
    w.serialize(&row).map_err(fail)?;
    w.flush().map_err(fail)?;
    Ok(success)
}

fn with_run_config(mut report: BenchmarkReport, run: &serde_json::Value) -> BenchmarkReport {
    report.config = serde_json::json!({ "run": run, "experiment": report.config });
    report
}

fn emit(report: &BenchmarkReport, out: &OutputArgs, prefix: &str) -> CliResult<()> {
    fs::create_dir_all(&out.out).map_err(|e| format!("{}: {e}", out.out.display()))?;
    let stem = report.file_stem(prefix);
    let write = |ext: &str, body: String| {
        let path = out.out.join(format!("{stem}.{ext}"));
        fs::write(&path, body).map_err(|e| format!("{}: {e}", path.display()))?;
        eprintln!("wrote {}", path.display());
        Ok::<_, String>(())
    };
    if out.format != Format::Json {
        write("csv", report.to_csv_string().map_err(fail)?)?;
    }
    if out.format != Format::Csv {
        write("json", report.to_json().map_err(fail)?)?;
    }
    Ok(())
}

fn print_table(report: &BenchmarkReport) {
    println!(
        "{:<8} {:>4} {:>8} {:>6} {:>6} {:>8} {:>9} {:>10}",
        "decoder", "k", "epsilon", "beta", "gamma", "trials", "successes", "p_fail"
    );
    let opt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v}"));
    for r in &report.rows {
        println!(
            "{:<8} {:>4} {:>8} {:>6} {:>6} {:>8} {:>9} {:>10.5}",
            r.decoder,
            r.k,
            opt(r.epsilon),
            opt(r.beta),
            opt(r.gamma),
            r.trials,
            r.successes,
            r.failure_probability
        );
    }
}

fn bench(a: &BenchArgs, run: &serde_json::Value) -> CliResult<()> {
    let cfg = IidBenchConfig {
        decoder: a.decoder,
        ks: a.k.clone(),
        epsilons: a.epsilon.clone(),
        trials: a.trials,
        iters: a.iters,
        mcmc_budget: a.budget,
        mcmc_gamma: a.gamma,
        mcmc_family: a.family,
        random_codeword: a.random_codeword,
        seed: a.seed.seed,
    };
    let report = with_run_config(bench_iid(&cfg).map_err(fail)?, run);
    emit(&report, &a.output, &format!("bench-{}", a.decoder))?;
    print_table(&report);
    Ok(())
}

fn landscape(a: &LandscapeArgs, run: &serde_json::Value) -> CliResult<()> {
    let mut cfg = LandscapeConfig::new(
        a.budget.unwrap_or_else(|| default_hybrid_budget(a.k)),
        a.seed.seed,
    );
    if !a.beta.is_empty() {
        cfg.betas = a.beta.clone();
    }
    if !a.gamma.is_empty() {
        cfg.gammas = a.gamma.clone();
    }
    cfg.trials_per_cell = a.trials;
    cfg.bf_iters = a.iters;
    cfg.family = a.family;
    let instances: Vec<ProblemInstance<f64>> = (0..a.instances)
        .map(|i| gen_instance(a.k, parity_decode::rng::derive_seed(a.seed.seed, &[i])))
        .collect::<Result<_, _>>()
        .map_err(fail)?;
    let cells = landscape_cells(&instances, &cfg).map_err(fail)?;
    let strategies: &[Strategy] = match a.strategy {
        StrategyArg::Mcmc => &[Strategy::Mcmc],
        StrategyArg::Hybrid => &[Strategy::Hybrid],
        StrategyArg::Both => &[Strategy::Mcmc, Strategy::Hybrid],
    };
    for &s in strategies {
        let report = with_run_config(cells_to_report(&cells, a.k, s, &cfg).map_err(fail)?, run);
        emit(&report, &a.output, &format!("landscape-{s}"))?;
        print_table(&report);
    }
    Ok(())
}

fn trajectory(a: &TrajectoryArgs) -> CliResult<()> {
    let source = match a.instance_seed {
        None => TrajectorySource::Iid {
            k: a.k,
            epsilon: a.epsilon,
        },
        Some(s) => TrajectorySource::McmcSample {
            instance: gen_instance::<f64>(a.k, s).map_err(fail)?,
            beta: a.beta,
            gamma: a.gamma,
            steps: a.steps,
            family: a.family,
        },
    };
    let t = trajectory_demo(&source, a.decoder, a.iters, a.seed.seed).map_err(fail)?;
    let mut buf = Vec::new();
    t.write_csv(&mut buf).map_err(fail)?;
    match &a.output {
        Some(p) => fs::write(p, &buf).map_err(|e| format!("{}: {e}", p.display()))?,
        None => std::io::stdout().write_all(&buf).map_err(fail)?,
    }
    eprintln!(
        "errors per snapshot: {:?}, success: {}",
        t.errors, t.success
    );
    Ok(())
}
