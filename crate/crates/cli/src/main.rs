//! Batch front end: every library capability behind one subcommand, with
//! mandatory seeds on stochastic runs and reports that embed enough to
//! reproduce themselves byte-for-byte.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use qseal::adversary::{run_attack_campaign, AttackStrategy};
use qseal::analysis::eavesdropper::{
    accessible_info_bound, holevo_bound, DensityMatrix, DENSITY_MAX_QUBITS,
};
use qseal::analysis::nu::{bound_curve, class_count_bound, class_count_estimate};
use qseal::analysis::overhead::teleport_overhead;
use qseal::analysis::rates::{ambiguous_block_survey, NoiseRate};
use qseal::bits::BitVec;
use qseal::code::{builtin_code, builtin_codes, parse_catalog, Code, ValidationReport};
use qseal::protocol::{frame_montecarlo, run_session_trial, Backend, SessionConfig};
use qseal::report;
use qseal::sim::{ChannelModel, LogicalBasis};
use qseal::{Error, Result};

/// Desk-scale simulator and analysis toolkit for sealed-block quantum
/// transport.
#[derive(Parser)]
#[command(name = "qseal", version, disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one protocol session and print its report with the full
    /// classical transcript.
    Simulate(SimulateArgs),
    /// Estimate a code's logical failure rate with frame-backend trials
    /// and compare it against the analytic tail.
    Montecarlo(MontecarloArgs),
    /// Run an interception campaign and report detection and extraction
    /// statistics with confidence intervals.
    Attack(AttackArgs),
    /// Compute the transport cost breakdown and the reference comparison
    /// table.
    Overhead(OverheadArgs),
    /// Class-count census, analytic estimates, and bound curves.
    Nu(NuArgs),
    /// Leakage analysis: full-twirl deviation, discrimination bound over
    /// logical messages, and the accessible-information budget.
    Accinfo(AccinfoArgs),
    /// Re-derive and check every code in the catalog.
    Validate(ValidateArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    /// `key: value` lines with indented blocks (the native report form).
    StructuredText,
    /// The same report with the key column aligned.
    Table,
    /// Comma-separated values (curve and comparison outputs only).
    Csv,
}

#[derive(Parser)]
struct SimulateArgs {
    /// Catalog code name.
    #[arg(long)]
    code: Option<String>,
    /// Payload slots k′ (the remaining logical slots hold dummies).
    #[arg(long)]
    kprime: Option<usize>,
    /// Per-hop depolarizing rate.
    #[arg(long, default_value = "0")]
    p: String,
    /// Root seed.
    #[arg(long)]
    seed: Option<u64>,
    /// statevector | frame
    #[arg(long, default_value = "statevector")]
    backend: String,
    /// Hop count (hops − 1 relays between sender and receiver).
    #[arg(long, default_value_t = 1)]
    hops: usize,
    /// Adversary strategy: none | intercept-resend:<policy>[:probe].
    #[arg(long, default_value = "none")]
    attack: String,
    /// Hop index where the adversary operates.
    #[arg(long, default_value_t = 0)]
    attack_hop: usize,
    /// Session config file (replaces the individual session flags).
    #[arg(long, conflicts_with_all = ["code", "kprime", "seed"])]
    config: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Parser)]
struct MontecarloArgs {
    /// Catalog code name.
    #[arg(long)]
    code: String,
    /// Physical depolarizing rate.
    #[arg(long)]
    p: String,
    /// Number of independent blocks to simulate.
    #[arg(long)]
    trials: u64,
    /// Root seed.
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Parser)]
struct AttackArgs {
    /// Catalog code name.
    #[arg(long)]
    code: Option<String>,
    /// Payload slots k′.
    #[arg(long)]
    kprime: Option<usize>,
    /// Adversary strategy.
    #[arg(long, default_value = "intercept-resend:uniform-coset")]
    strategy: String,
    /// Number of independent sessions to attack.
    #[arg(long)]
    trials: u64,
    /// Root seed.
    #[arg(long)]
    seed: Option<u64>,
    /// statevector | frame
    #[arg(long, default_value = "frame")]
    backend: String,
    /// Session config file (replaces the individual session flags).
    #[arg(long, conflicts_with_all = ["code", "kprime", "seed"])]
    config: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Parser)]
struct OverheadArgs {
    /// Purification nesting depth.
    #[arg(long = "N")]
    nesting: u32,
    /// Raw pairs per segment at the bottom of the tree.
    #[arg(long = "Na")]
    pairs: u64,
    /// Qubits in each stage measurement register.
    #[arg(long = "nbsm")]
    bsm: u32,
    /// Physical rate for the block-failure comparison survey.
    #[arg(long, default_value = "0.01")]
    p: String,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Parser)]
struct NuArgs {
    /// Catalog code: report its class-count estimate (with --exact, the
    /// exhaustive census beside it).
    #[arg(long, conflicts_with_all = ["n", "rate", "steps"])]
    code: Option<String>,
    /// Run the exhaustive coset census.
    #[arg(long, requires = "code")]
    exact: bool,
    /// Block length for the analytic bound.
    #[arg(long)]
    n: Option<u64>,
    /// Code rate R for a single bound evaluation.
    #[arg(long, requires = "n", conflicts_with = "steps")]
    rate: Option<f64>,
    /// Sample the bound across rates i/steps and emit the curve as CSV.
    #[arg(long, requires = "n")]
    steps: Option<u32>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Parser)]
struct AccinfoArgs {
    /// Disturbance parameter ε of the transport bound.
    #[arg(long)]
    epsilon: f64,
    /// Transport block length n in the 2εn budget.
    #[arg(long)]
    n: u64,
    /// Code whose logical messages are twirled.
    #[arg(long, default_value = "833")]
    code: String,
    /// Payload slots enumerated as messages.
    #[arg(long, default_value_t = 1)]
    kprime: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Parser)]
struct ValidateArgs {
    /// External catalog file (defaults to the built-in catalog).
    #[arg(long)]
    catalog: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Parser)]
struct OutputArgs {
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = OutputFormat::StructuredText)]
    format: OutputFormat,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Simulate(args) => simulate(args),
        Command::Montecarlo(args) => montecarlo(args).map(|()| ExitCode::SUCCESS),
        Command::Attack(args) => attack(args).map(|()| ExitCode::SUCCESS),
        Command::Overhead(args) => overhead(args).map(|()| ExitCode::SUCCESS),
        Command::Nu(args) => nu(args).map(|()| ExitCode::SUCCESS),
        Command::Accinfo(args) => accinfo(args).map(|()| ExitCode::SUCCESS),
        Command::Validate(args) => validate(args).map(|()| ExitCode::SUCCESS),
    }
}

fn sha256_hex(text: &str) -> String {
    use sha2::{Digest, Sha256};
    Sha256::digest(text.as_bytes())
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

/// Align the key column of top-level `key: value` lines.
fn to_table(text: &str) -> String {
    let width = text
        .lines()
        .filter(|l| !l.starts_with(' '))
        .filter_map(|l| l.split_once(": ").map(|(k, _)| k.len()))
        .max()
        .unwrap_or(0);
    let mut out = String::new();
    for line in text.lines() {
        if !line.starts_with(' ') {
            if let Some((k, v)) = line.split_once(": ") {
                out.push_str(&format!("{k:<width$}  {v}\n"));
                continue;
            }
        }
        out.push_str(line);
        out.push('\n');
    }
    out
}

/// Render per the requested format and write to the chosen sink. `csv`
/// must be `Some` for subcommands that have a CSV form.
fn emit(output: &OutputArgs, text: &str, csv: Option<&str>) -> Result<()> {
    let body = match output.format {
        OutputFormat::StructuredText => text.to_string(),
        OutputFormat::Table => to_table(text),
        OutputFormat::Csv => csv
            .ok_or_else(|| {
                Error::Parameter("this subcommand has no csv form".to_string())
            })?
            .to_string(),
    };
    match &output.out {
        Some(path) => fs::write(path, body).map_err(Error::Io)?,
        None => print!("{body}"),
    }
    Ok(())
}

fn read_config_file(path: &PathBuf) -> Result<SessionConfig> {
    let text = fs::read_to_string(path).map_err(Error::Io)?;
    SessionConfig::parse(&text)
}

fn require<T>(value: Option<T>, flag: &str) -> Result<T> {
    value.ok_or_else(|| Error::Parameter(format!("--{flag} is required (or use --config)")))
}

/// Flag bundle shared by `simulate` and `attack` when no config file
/// is given.
struct SessionFlags<'a> {
    code: Option<String>,
    kprime: Option<usize>,
    seed: Option<u64>,
    p: &'a str,
    backend: &'a str,
    hops: usize,
    attack: &'a str,
    attack_hop: usize,
}

/// Assemble a session configuration from flags: `hops` identical
/// channels, depolarizing at rate `p` unless `p` is zero.
fn session_from_flags(flags: SessionFlags) -> Result<SessionConfig> {
    if flags.hops == 0 {
        return Err(Error::Parameter("need at least one hop".to_string()));
    }
    let mut config = SessionConfig::new(
        &require(flags.code, "code")?,
        require(flags.kprime, "kprime")?,
        require(flags.seed, "seed")?,
    );
    config.backend = Backend::parse(flags.backend)?;
    let rate = NoiseRate::parse(flags.p)?;
    let channel = if rate.value == 0.0 {
        ChannelModel::Ideal
    } else {
        ChannelModel::Depolarizing { p: rate.value }
    };
    config.channels = vec![channel; flags.hops];
    config.adversary = AttackStrategy::parse(flags.attack)?;
    config.attack_hop = flags.attack_hop;
    Ok(config)
}

fn simulate(args: SimulateArgs) -> Result<ExitCode> {
    let config = match &args.config {
        Some(path) => read_config_file(path)?,
        None => session_from_flags(SessionFlags {
            code: args.code,
            kprime: args.kprime,
            seed: args.seed,
            p: &args.p,
            backend: &args.backend,
            hops: args.hops,
            attack: &args.attack,
            attack_hop: args.attack_hop,
        })?,
    };
    let code = builtin_code(&config.code_name)?;
    let basis = match config.backend {
        Backend::StateVector => Some(LogicalBasis::for_code(&code)?),
        Backend::Frame => None,
    };
    let trial = run_session_trial(&code, basis.as_ref(), &config, 0)?;
    let hash = sha256_hex(&config.canonical_text());
    let text = report::session_report(&config, &hash, &trial);
    emit(&args.output, &text, None)?;
    Ok(if trial.outcome.is_delivered() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(3)
    })
}

fn montecarlo(args: MontecarloArgs) -> Result<()> {
    if args.trials == 0 {
        return Err(Error::Parameter("need at least one trial".to_string()));
    }
    let code = builtin_code(&args.code)?;
    let rate = NoiseRate::parse(&args.p)?;
    let mc = frame_montecarlo(&code, &rate, args.trials, args.seed)?;
    let canonical = format!(
        "montecarlo\ncode: {}\np: {}\ntrials: {}\nseed: {}\n",
        args.code, args.p, args.trials, args.seed
    );
    let text = report::montecarlo_report(&sha256_hex(&canonical), &mc);
    emit(&args.output, &text, None)
}

fn attack(args: AttackArgs) -> Result<()> {
    let config = match &args.config {
        Some(path) => read_config_file(path)?,
        None => {
            let config = session_from_flags(SessionFlags {
                code: args.code,
                kprime: args.kprime,
                seed: args.seed,
                p: "0",
                backend: &args.backend,
                hops: 1,
                attack: &args.strategy,
                attack_hop: 0,
            })?;
            if !config.adversary.is_active() {
                return Err(Error::Parameter(
                    "attack campaigns need an active strategy".to_string(),
                ));
            }
            config
        }
    };
    let campaign = run_attack_campaign(&config, args.trials)?;
    let hash = sha256_hex(&config.canonical_text());
    let text = report::attack_report(&config, &hash, &campaign);
    emit(&args.output, &text, None)
}

fn overhead(args: OverheadArgs) -> Result<()> {
    let breakdown = teleport_overhead(args.nesting, args.pairs, args.bsm)?;
    let rate = NoiseRate::parse(&args.p)?;
    let rows = ambiguous_block_survey(&rate)?;
    let text = format!(
        "{}{}",
        report::overhead_report(args.bsm, &breakdown),
        report::comparison_report(&rate, &rows)
    );
    let csv = report::comparison_csv(&rows);
    emit(&args.output, &text, Some(&csv))
}

fn nu(args: NuArgs) -> Result<()> {
    if let Some(name) = &args.code {
        let code = builtin_code(name)?;
        let estimate =
            class_count_estimate(code.n() as u64, code.k() as u64, code.radius() as u64)?;
        if args.exact {
            let census = code.census();
            let text = report::census_report(&code, &census, &estimate);
            return emit(&args.output, &text, None);
        }
        let rate = code.k() as f64 / code.n() as f64;
        let bound = class_count_bound(code.n() as u64, rate)?;
        let text = report::bound_report(code.n() as u64, rate, &bound);
        return emit(&args.output, &text, None);
    }
    let n = require(args.n, "n")?;
    if let Some(steps) = args.steps {
        let points = bound_curve(n, steps)?;
        let csv = report::curve_csv(n, &points);
        // The curve is inherently tabular; emit CSV regardless of format.
        return match &args.output.out {
            Some(path) => fs::write(path, csv).map_err(Error::Io),
            None => {
                print!("{csv}");
                Ok(())
            }
        };
    }
    let rate = require(args.rate, "rate")?;
    let bound = class_count_bound(n, rate)?;
    let text = report::bound_report(n, rate, &bound);
    emit(&args.output, &text, None)
}

fn accinfo(args: AccinfoArgs) -> Result<()> {
    let code = builtin_code(&args.code)?;
    if code.n() > DENSITY_MAX_QUBITS {
        return Err(Error::Parameter(format!(
            "code {} exceeds the {DENSITY_MAX_QUBITS}-qubit density-operator cap",
            code.name()
        )));
    }
    if args.kprime == 0 || args.kprime > code.k() {
        return Err(Error::Parameter(format!(
            "payload slots {} outside 1..={}",
            args.kprime,
            code.k()
        )));
    }
    let basis = LogicalBasis::for_code(&code)?;
    let messages = 1usize << args.kprime;
    let prior = 1.0 / messages as f64;
    let mut ensemble = Vec::with_capacity(messages);
    let mut worst_deviation = 0.0f64;
    for m in 0..messages {
        // Message bits occupy the payload slots; dummy slots stay |0⟩.
        let mut label = BitVec::zeros(code.k());
        for bit in 0..args.kprime {
            label.set(bit, (m >> (args.kprime - 1 - bit)) & 1 == 1);
        }
        let encoded = basis.codeword(label.to_index());
        let twirled = DensityMatrix::pure(encoded)?.twirl();
        worst_deviation = worst_deviation.max(twirled.max_deviation_from_uniform());
        ensemble.push((prior, twirled));
    }
    let holevo = holevo_bound(&ensemble)?;
    let budget = accessible_info_bound(args.epsilon, args.n)?;
    let text = report::accinfo_report(
        args.epsilon,
        args.n,
        messages,
        worst_deviation,
        holevo,
        budget,
    );
    emit(&args.output, &text, None)
}

fn validate(args: ValidateArgs) -> Result<()> {
    let codes: Vec<Code> = match &args.catalog {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(Error::Io)?;
            parse_catalog(&text)?
                .into_iter()
                .map(Code::build)
                .collect::<Result<_>>()?
        }
        None => builtin_codes()?,
    };
    let reports: Vec<ValidationReport> = codes
        .iter()
        .map(|c| c.validation_report().clone())
        .collect();
    let text = report::validation_report(&reports);
    emit(&args.output, &text, None)
}
