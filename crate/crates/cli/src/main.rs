//! `covering` command-line tool.
//!
//! Exit status: 0 success; 1 negative verdict (uncovered code, failed
//! corollary check); 2 usage, file or parse error; 3 infeasible bound or
//! construction parameters; 4 construction or search failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use covering_core::bounds::{self, BoundParams};
use covering_core::code::{verify_covering_sampled, verify_covering_with_guard};
use covering_core::construction::{ksv_construct, BasePolicy, ConstructOptions};
use covering_core::exact::{minimal_covering_code, SolveOptions, DEFAULT_EXACT_GUARD};
use covering_core::hamming::DEFAULT_ENUMERATION_GUARD;
use covering_core::{Code, Error, HammingSpace, SampledVerdict, Verdict};

const EXIT_NEGATIVE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_FAILURE: u8 = 4;

#[derive(Parser, Debug)]
#[command(name = "covering", version, about = "Covering codes in Hamming space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a covering code by the recursive split construction.
    Construct(ConstructArgs),
    /// Check that a code file covers its space.
    Verify(VerifyArgs),
    /// Find a minimum covering code of a tiny space.
    Solve(SolveArgs),
    /// Evaluate, tabulate and check the density bounds.
    Bounds {
        #[command(subcommand)]
        command: BoundsCommand,
    },
}

#[derive(Args, Debug)]
struct ConstructArgs {
    #[arg(long)]
    q: u32,
    #[arg(long)]
    n: usize,
    #[arg(long = "R")]
    radius: usize,
    #[arg(long)]
    x: f64,
    #[arg(long)]
    y: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "auto", value_parser = parse_policy)]
    base_policy: BasePolicy,
    #[arg(long, default_value_t = 100)]
    max_trials: usize,
    /// Fail instead of falling back to greedy domination.
    #[arg(long)]
    no_fallback: bool,
    /// Override the enumeration guard on q^n.
    #[arg(long)]
    guard: Option<u64>,
    #[arg(long)]
    out: PathBuf,
    /// Trace file; defaults to the code file with extension `trace.json`.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    code: PathBuf,
    #[arg(long = "R")]
    radius: usize,
    /// Spot-check this many random words instead of scanning the space.
    #[arg(long)]
    sampled: Option<u64>,
    #[arg(long, requires = "sampled")]
    seed: Option<u64>,
    #[arg(long, conflicts_with = "sampled")]
    guard: Option<u64>,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long)]
    q: u32,
    #[arg(long)]
    n: usize,
    #[arg(long = "R")]
    radius: usize,
    /// Seconds.
    #[arg(long)]
    time_budget: Option<f64>,
    #[arg(long)]
    node_budget: Option<u64>,
    #[arg(long)]
    guard: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum BoundsCommand {
    /// Every bound that applies at the given parameters.
    Eval(EvalArgs),
    /// Optimized and closed-form bounds for a range of radii.
    Table(TableArgs),
    /// Numeric check of each step leading to the closed-form corollary.
    CheckCorollary(CheckArgs),
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[arg(long = "R")]
    radius: u32,
    #[arg(long)]
    x: f64,
    #[arg(long)]
    y: f64,
    #[arg(long = "R1")]
    inner_radius: Option<u32>,
    #[arg(long, requires = "inner_radius")]
    mu: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args, Debug)]
struct TableArgs {
    #[arg(long = "R-min")]
    r_min: u32,
    #[arg(long = "R-max")]
    r_max: u32,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CheckArgs {
    #[arg(long = "R-min", default_value_t = 6)]
    r_min: u32,
    #[arg(long = "R-max")]
    r_max: u32,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

fn parse_policy(s: &str) -> Result<BasePolicy, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Usage(_) | Error::Parse(_) | Error::SpaceTooLarge { .. } => EXIT_USAGE,
            Error::Infeasible(_) => EXIT_INFEASIBLE,
            _ => EXIT_FAILURE,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Construct(args) => construct(args),
        Command::Verify(args) => verify(args),
        Command::Solve(args) => solve(args),
        Command::Bounds { command } => match command {
            BoundsCommand::Eval(args) => eval(args),
            BoundsCommand::Table(args) => table(args),
            BoundsCommand::CheckCorollary(args) => check_corollary(args),
        },
    }
}

fn guard_or(explicit: Option<u64>, default: u64) -> u64 {
    match explicit {
        Some(g) if g != default => {
            eprintln!("warning: enumeration guard overridden to {g} (default {default})");
            g
        }
        Some(g) => g,
        None => default,
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text)
        .map_err(|e| Failure::usage(format!("cannot write {}: {e}", path.display())))
}

fn construct(args: ConstructArgs) -> Outcome {
    let space = HammingSpace::new(args.q, args.n)?;
    let options = ConstructOptions {
        base_policy: args.base_policy,
        seed: args.seed,
        max_trials: args.max_trials,
        guard: guard_or(args.guard, DEFAULT_ENUMERATION_GUARD),
        greedy_fallback: !args.no_fallback,
        ..Default::default()
    };
    let built = ksv_construct(space, args.radius, args.x, args.y, &options)?;
    let trace_path = args
        .trace
        .unwrap_or_else(|| args.out.with_extension("trace.json"));
    write_file(&args.out, &built.code.to_json())?;
    write_file(&trace_path, &built.trace.to_json())?;
    println!(
        "size {} density {} levels {}",
        built.trace.total_size,
        built.trace.density,
        built.trace.levels.len()
    );
    Ok(0)
}

fn verify(args: VerifyArgs) -> Outcome {
    let text = fs::read_to_string(&args.code)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", args.code.display())))?;
    let code = Code::from_json(&text)?;
    let show = |w: &covering_core::Word| w.to_text(code.space().q());
    if let Some(samples) = args.sampled {
        return match verify_covering_sampled(&code, args.radius, samples, args.seed.unwrap_or(0))? {
            SampledVerdict::NoCounterexample { samples } => {
                println!("no-counterexample ({samples} samples)");
                Ok(0)
            }
            SampledVerdict::Uncovered { witness } => {
                println!("uncovered {}", show(&witness));
                Ok(EXIT_NEGATIVE)
            }
        };
    }
    let guard = guard_or(args.guard, DEFAULT_ENUMERATION_GUARD);
    match verify_covering_with_guard(&code, args.radius, guard)? {
        Verdict::Covered => {
            println!("covered");
            Ok(0)
        }
        Verdict::Uncovered { witness } => {
            println!("uncovered {}", show(&witness));
            Ok(EXIT_NEGATIVE)
        }
    }
}

fn solve(args: SolveArgs) -> Outcome {
    let space = HammingSpace::new(args.q, args.n)?;
    let time_budget = match args.time_budget {
        Some(t) if !(t > 0.0 && t.is_finite()) => {
            return Err(Failure::usage(
                "--time-budget must be a positive number of seconds",
            ))
        }
        t => t.map(Duration::from_secs_f64),
    };
    let options = SolveOptions {
        time_budget,
        node_budget: args.node_budget,
        guard: guard_or(args.guard, DEFAULT_EXACT_GUARD),
    };
    let result = minimal_covering_code(space, args.radius, &options)?;
    let json = result.to_json();
    match &args.out {
        Some(path) => write_file(path, &json)?,
        None => print!("{json}"),
    }
    Ok(0)
}

fn real(v: f64) -> String {
    bounds::format_real(v)
}

fn eval(args: EvalArgs) -> Outcome {
    if args.format == Format::Csv {
        return Err(Failure::usage("bounds eval supports --format text|json"));
    }
    let params = BoundParams::new(args.radius, args.x, args.y);
    let mut values: Vec<(&str, f64)> = vec![("t", bounds::feasibility(&params))];
    values.push(("theorem1", bounds::theorem1_bound(&params)?));
    values.push((
        "theorem1_closed_form",
        bounds::theorem1_bound_closed_form(&params)?,
    ));
    if let Some(r1) = args.inner_radius {
        let mu = match args.mu {
            Some(mu) => mu,
            None => bounds::default_inner_density(r1)?,
        };
        values.push(("mu_star_r1", mu));
        values.push((
            "theorem15",
            bounds::theorem15_bound(&params.with_inner(r1, mu))?,
        ));
    }
    if let Ok(v) = bounds::corollary_bound_new(args.radius) {
        values.push(("corollary_new", v));
    }
    if let Ok(v) = bounds::corollary_bound_ksv(2, args.radius) {
        values.push(("corollary_ksv_q2", v));
        values.push((
            "corollary_ksv_q3",
            bounds::corollary_bound_ksv(3, args.radius)?,
        ));
    }
    match args.format {
        Format::Json => {
            let map: serde_json::Map<String, serde_json::Value> = values
                .iter()
                .map(|(k, v)| (k.to_string(), serde_json::json!(v)))
                .collect();
            println!(
                "{}",
                serde_json::to_string_pretty(&map).expect("serializes")
            );
        }
        _ => {
            for (k, v) in values {
                println!("{k} = {}", real(v));
            }
        }
    }
    Ok(0)
}

fn table(args: TableArgs) -> Outcome {
    let rows = bounds::bound_table(args.r_min, args.r_max)?;
    let text = match args.format {
        Format::Csv => {
            let mut buf = Vec::new();
            bounds::write_bound_csv(&rows, &mut buf).expect("writing to memory");
            String::from_utf8(buf).expect("csv is ascii")
        }
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&rows).expect("serializes");
            s.push('\n');
            s
        }
        Format::Text => return Err(Failure::usage("bounds table supports --format csv|json")),
    };
    match &args.out {
        Some(path) => write_file(path, &text)?,
        None => print!("{text}"),
    }
    Ok(0)
}

fn check_corollary(args: CheckArgs) -> Outcome {
    if args.format == Format::Csv {
        return Err(Failure::usage(
            "bounds check-corollary supports --format text|json",
        ));
    }
    let sweep = bounds::corollary2_chain_sweep(args.r_min, args.r_max)?;
    if args.format == Format::Json {
        println!(
            "{}",
            serde_json::to_string_pretty(&sweep).expect("serializes")
        );
    } else {
        for report in &sweep.failures {
            for step in report.steps.iter().filter(|s| !s.holds) {
                println!(
                    "R={} fails {:?}: lhs {} rhs {}",
                    report.radius,
                    step.step,
                    real(step.lhs),
                    real(step.rhs)
                );
            }
        }
        let verdict = if sweep.holds() { "holds" } else { "fails" };
        println!(
            "{verdict} for R in [{}, {}] ({} radii checked, {} failing)",
            sweep.r_min,
            sweep.r_max,
            sweep.checked,
            sweep.failures.len()
        );
    }
    Ok(if sweep.holds() { 0 } else { EXIT_NEGATIVE })
}
