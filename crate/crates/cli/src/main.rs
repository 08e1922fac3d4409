//! Command-line harness wiring the exact engines, the sampler and the bound
//! verdicts: input parsing, scans, report emission.
//!
//! Exit codes are a stable contract: 0 success, 2 input/parse error,
//! 3 resource cap or budget exceeded, 4 scan aborted with partial output.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use permsum_core::bounds::{
    verdict_csv_row, verify, BoundKind, BoundSpec, QMethod, VerifyOptions, VERDICT_CSV_HEADER,
};
use permsum_core::dist::{
    exact_distribution_auto, exact_distribution_dp, exact_variance, EngineCaps, ExactDistribution,
};
use permsum_core::energy::{
    kappa_bruteforce, kappa_convolution, rnr_ratio, CoefficientTuple, EnergyBudget,
};
use permsum_core::multiset::{counterexample_pair, decompose, staircase, uniform_grid, WeightedMultiset};
use permsum_core::rational::parse_rational;
use permsum_core::sampler::{estimate_q, sample_distribution, SampleConfig};
use permsum_core::Error as CoreError;

#[derive(Parser)]
#[command(
    name = "permsum",
    version,
    about = "Exact distributions, point masses and energy statistics of random permutation sums"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    /// Exact law via whichever engine the caps admit.
    Exact,
    /// Force the subset DP engine.
    Dp,
    /// Seeded Monte Carlo sampling.
    Mc,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EnergyMethodArg {
    /// Iterated exact convolution of the Z law.
    Conv,
    /// Definitional index-tuple enumeration.
    Brute,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    /// A = B = {1, .., n}.
    #[value(name = "uniform-grid", alias = "uniform_grid")]
    UniformGrid,
    /// A = B = staircase((2, 1, .., 1)): one repeated low value.
    Staircase,
    /// A = {1..floor(n/2)} plus zeroes, B = {1, 0, .., 0}.
    Counterexample,
    /// Explicit pairs from --pairs FILE.
    #[value(name = "custom", alias = "custom-list")]
    Custom,
}

#[derive(Args)]
struct PairOpts {
    /// Multiset A: a path or inline JSON {"values": ["1", "1/2", ...]}.
    #[arg(long)]
    input_a: String,
    /// Multiset B: same format as --input-a.
    #[arg(long)]
    input_b: String,
}

#[derive(Args)]
struct CapOpts {
    /// Max n for the enumeration engine.
    #[arg(long, default_value_t = 11)]
    enum_cap: u64,
    /// Max n for the subset DP engine.
    #[arg(long, default_value_t = 16)]
    dp_cap: u64,
    /// DP live-state budget (states), or energy iteration budget (tuples).
    #[arg(long)]
    budget: Option<u64>,
}

impl CapOpts {
    fn engine_caps(&self) -> EngineCaps {
        EngineCaps {
            enum_cap: self.enum_cap,
            dp_cap: self.dp_cap,
            dp_state_budget: self.budget.unwrap_or(20_000_000),
        }
    }
}

#[derive(Args)]
struct McOpts {
    /// Seed for all randomness; omitting it selects the fixed default 0.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Monte Carlo sample count.
    #[arg(long, default_value_t = 10_000)]
    samples: u64,
    /// Worker count; tallies are merged by value, so results do not depend on it.
    #[arg(long, default_value_t = 1)]
    workers: u32,
}

impl McOpts {
    fn config(&self) -> SampleConfig {
        SampleConfig {
            seed: self.seed,
            samples: self.samples,
            workers: self.workers,
        }
    }
}

#[derive(Args)]
struct OutputOpts {
    /// Write here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Multiplicity profile and the diversity statistic M of one multiset.
    Profile {
        #[arg(long)]
        input_a: String,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Full distribution of the permutation sum.
    Dist {
        #[command(flatten)]
        pair: PairOpts,
        #[arg(long, value_enum, default_value_t = Method::Exact)]
        method: Method,
        #[command(flatten)]
        caps: CapOpts,
        #[command(flatten)]
        mc: McOpts,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Max point mass Q (exact) or its estimate (mc).
    Q {
        #[command(flatten)]
        pair: PairOpts,
        #[arg(long, value_enum, default_value_t = Method::Exact)]
        method: Method,
        #[command(flatten)]
        caps: CapOpts,
        #[command(flatten)]
        mc: McOpts,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Exact variance of the permutation sum.
    Var {
        #[command(flatten)]
        pair: PairOpts,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Additive-energy statistics kappa_c / K_c (and the collision-ratio diagnostic).
    Energy {
        #[command(flatten)]
        pair: PairOpts,
        /// Coefficient tuple, e.g. "1,-1".
        #[arg(long, default_value = "1,-1")]
        c: String,
        #[arg(long, value_enum, default_value_t = EnergyMethodArg::Conv)]
        method: EnergyMethodArg,
        /// Count only tuples with pairwise-distinct indices (K').
        #[arg(long)]
        distinct: bool,
        /// Emit the collision-energy ratio diagnostic instead of one kappa.
        #[arg(long)]
        rnr: bool,
        #[arg(long)]
        budget: Option<u64>,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Frequent-block decomposition certificate (m, r, witness).
    Decompose {
        #[arg(long)]
        input_a: String,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Evaluate bound formulas against computed Q and emit verdicts.
    Verify {
        #[command(flatten)]
        pair: PairOpts,
        /// Comma list: pawlowski, diversity, product-diversity, tightness, conjecture.
        #[arg(long)]
        bounds: String,
        #[arg(long, value_enum, default_value_t = Method::Exact)]
        method: Method,
        /// Pin the constant of the asymptotic bounds (turns them pass/fail).
        #[arg(long)]
        constant: Option<String>,
        /// Exponent slack in the M(A)M(B) >= n^(3+eps) precondition.
        #[arg(long, default_value = "1/10")]
        epsilon: String,
        #[command(flatten)]
        caps: CapOpts,
        #[command(flatten)]
        mc: McOpts,
        #[command(flatten)]
        output: OutputOpts,
    },
    /// Sweep a family over a range of n, one CSV row per (n, bound).
    Scan {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long)]
        n_min: Option<u64>,
        #[arg(long)]
        n_max: Option<u64>,
        /// Comma list: pawlowski, diversity, product-diversity, tightness, conjecture.
        #[arg(long)]
        bounds: String,
        #[arg(long, value_enum, default_value_t = Method::Exact)]
        method: Method,
        /// JSON file {"pairs": [{"a": {...}, "b": {...}}, ...]} for --family custom.
        #[arg(long)]
        pairs: Option<String>,
        #[arg(long, default_value = "1/10")]
        epsilon: String,
        #[command(flatten)]
        caps: CapOpts,
        #[command(flatten)]
        mc: McOpts,
        /// Output CSV path (stdout when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        let code = match &err {
            CoreError::Parse(_)
            | CoreError::InvalidInput(_)
            | CoreError::SizeMismatch { .. }
            | CoreError::NoDiversity => 2,
            CoreError::CapExceeded { .. }
            | CoreError::BudgetExceeded(_)
            | CoreError::Overflow(_) => 3,
        };
        Self {
            code,
            message: err.to_string(),
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn run() -> Result<(), CliError> {
    match Cli::parse().command {
        Command::Profile { input_a, output } => {
            let a = load_multiset(&input_a)?;
            let profile = a.multiplicity_profile();
            let doc = json!({
                "n": profile.size(),
                "parts": profile.parts(),
                "M": profile.diversity().to_string(),
            });
            emit_json(&output, &doc.to_string())
        }
        Command::Dist {
            pair,
            method,
            caps,
            mc,
            output,
        } => {
            let (a, b) = load_pair(&pair)?;
            let dist = distribution_by_method(&a, &b, method, &caps, &mc)?;
            emit_json(&output, &dist.to_json())
        }
        Command::Q {
            pair,
            method,
            caps,
            mc,
            output,
        } => {
            let (a, b) = load_pair(&pair)?;
            match method {
                Method::Mc => {
                    let est = estimate_q(&a, &b, &mc.config())?;
                    emit_json(&output, &est.to_json())
                }
                _ => {
                    let dist = distribution_by_method(&a, &b, method, &caps, &mc)?;
                    let report = dist.max_point_mass();
                    let doc = json!({
                        "method": if method == Method::Dp { "dp" } else { "exact" },
                        "q": report.q.to_string(),
                        "argmax": report.argmax.to_string(),
                        "support": report.support_size,
                    });
                    emit_json(&output, &doc.to_string())
                }
            }
        }
        Command::Var { pair, output } => {
            let (a, b) = load_pair(&pair)?;
            let variance = exact_variance(&a, &b)?;
            let doc = json!({
                "n": a.size(),
                "variance": variance.to_string(),
            });
            emit_json(&output, &doc.to_string())
        }
        Command::Energy {
            pair,
            c,
            method,
            distinct,
            rnr,
            budget,
            output,
        } => {
            let (a, b) = load_pair(&pair)?;
            let energy_budget = energy_budget(budget);
            if rnr {
                let report = rnr_ratio(&a, &b, &energy_budget)?;
                let doc = json!({
                    "kappa": report.kappa.to_string(),
                    "ratio": format!("{:.11e}", report.ratio),
                    "size_a": report.size_a,
                    "size_b": report.size_b,
                });
                return emit_json(&output, &doc.to_string());
            }
            let tuple = parse_tuple(&c)?;
            let report = match method {
                EnergyMethodArg::Conv => {
                    if distinct {
                        return Err(CliError::input(
                            "--distinct requires --method brute (convolution cannot \
                             restrict to distinct indices)",
                        ));
                    }
                    kappa_convolution(&a, &b, &tuple, &energy_budget)?
                }
                EnergyMethodArg::Brute => {
                    kappa_bruteforce(&a, &b, &tuple, distinct, &energy_budget)?
                }
            };
            emit_json(&output, &report.to_json())
        }
        Command::Decompose { input_a, output } => {
            let a = load_multiset(&input_a)?;
            let d = decompose(&a)?;
            let doc = json!({
                "n": a.size(),
                "m": d.m,
                "r": d.r,
                "chosen_index": d.chosen_index,
                "witness": d.witness.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            });
            emit_json(&output, &doc.to_string())
        }
        Command::Verify {
            pair,
            bounds,
            method,
            constant,
            epsilon,
            caps,
            mc,
            output,
        } => {
            let (a, b) = load_pair(&pair)?;
            let specs = parse_bound_specs(&bounds, constant.as_deref(), &epsilon)?;
            let opts = VerifyOptions {
                caps: caps.engine_caps(),
                sample: mc.config(),
            };
            let records = verify(&a, &b, &specs, q_method(method), &opts)?;
            match output.format {
                Format::Json => {
                    let body: Vec<String> = records.iter().map(|r| r.to_json()).collect();
                    emit_json(&output, &format!("[{}]", body.join(",")))
                }
                Format::Csv => {
                    let ma = a.diversity();
                    let mb = b.diversity();
                    let mut text = String::from(VERDICT_CSV_HEADER);
                    text.push('\n');
                    for rec in &records {
                        text.push_str(&verdict_csv_row(a.size(), "custom", &ma, &mb, rec));
                        text.push('\n');
                    }
                    write_text(&output.out, &text)
                }
            }
        }
        Command::Scan {
            family,
            n_min,
            n_max,
            bounds,
            method,
            pairs,
            epsilon,
            caps,
            mc,
            out,
        } => run_scan(
            family, n_min, n_max, &bounds, method, pairs.as_deref(), &epsilon, &caps, &mc, &out,
        ),
    }
}

fn q_method(method: Method) -> QMethod {
    match method {
        Method::Mc => QMethod::MonteCarlo,
        _ => QMethod::Exact,
    }
}

fn distribution_by_method(
    a: &WeightedMultiset,
    b: &WeightedMultiset,
    method: Method,
    caps: &CapOpts,
    mc: &McOpts,
) -> Result<ExactDistribution, CliError> {
    let engine_caps = caps.engine_caps();
    Ok(match method {
        Method::Exact => exact_distribution_auto(a, b, &engine_caps)?,
        Method::Dp => exact_distribution_dp(a, b, engine_caps.dp_cap, engine_caps.dp_state_budget)?,
        Method::Mc => sample_distribution(a, b, &mc.config())?,
    })
}

fn energy_budget(budget: Option<u64>) -> EnergyBudget {
    match budget {
        Some(n) => EnergyBudget {
            max_brute_iterations: n,
            max_convolution_atoms: n,
        },
        None => EnergyBudget::default(),
    }
}

fn load_multiset(source: &str) -> Result<WeightedMultiset, CliError> {
    let text = if source.trim_start().starts_with('{') {
        source.to_string()
    } else {
        fs::read_to_string(source)
            .map_err(|e| CliError::input(format!("cannot read `{source}`: {e}")))?
    };
    Ok(WeightedMultiset::parse_json(&text)?)
}

fn load_pair(pair: &PairOpts) -> Result<(WeightedMultiset, WeightedMultiset), CliError> {
    Ok((load_multiset(&pair.input_a)?, load_multiset(&pair.input_b)?))
}

fn parse_tuple(text: &str) -> Result<CoefficientTuple, CliError> {
    let entries = text
        .split(',')
        .map(|t| t.trim().parse::<i64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| CliError::input(format!("bad coefficient tuple `{text}`")))?;
    Ok(CoefficientTuple::new(entries)?)
}

fn parse_bound_specs(
    list: &str,
    constant: Option<&str>,
    epsilon: &str,
) -> Result<Vec<BoundSpec>, CliError> {
    let eps = parse_rational(epsilon)?;
    let pinned = constant.map(parse_rational).transpose()?;
    let mut specs = Vec::new();
    for token in list.split(',') {
        let kind = match token.trim() {
            "pawlowski" => BoundKind::Pawlowski,
            "diversity" | "main" => BoundKind::Diversity,
            "product-diversity" | "mamb" => BoundKind::ProductDiversity,
            "tightness" | "tightness-lower" => BoundKind::TightnessLower,
            "conjecture" | "extremal-conjecture" => BoundKind::ExtremalConjecture,
            other => {
                return Err(CliError::input(format!(
                    "unknown bound `{other}` (expected pawlowski, diversity, product-diversity, tightness, conjecture)"
                )))
            }
        };
        let mut spec = BoundSpec::new(kind);
        spec.epsilon = eps.clone();
        if matches!(kind, BoundKind::Diversity | BoundKind::ProductDiversity) {
            spec.constant = pinned.clone();
        }
        specs.push(spec);
    }
    if specs.is_empty() {
        return Err(CliError::input("no bounds requested"));
    }
    Ok(specs)
}

fn family_pair(
    family: Family,
    n: u64,
) -> Result<(WeightedMultiset, WeightedMultiset), CliError> {
    match family {
        Family::UniformGrid => {
            let g = uniform_grid(n)?;
            Ok((g.clone(), g))
        }
        Family::Staircase => {
            if n < 3 {
                return Err(CliError::input("staircase family requires n >= 3"));
            }
            let mut lambda = vec![1u64; (n - 1) as usize];
            lambda[0] = 2;
            let s = staircase(&lambda)?;
            Ok((s.clone(), s))
        }
        Family::Counterexample => Ok(counterexample_pair(n)?),
        Family::Custom => unreachable!("custom pairs are loaded from a file"),
    }
}

#[allow(clippy::too_many_arguments)]
fn run_scan(
    family: Family,
    n_min: Option<u64>,
    n_max: Option<u64>,
    bounds: &str,
    method: Method,
    pairs_file: Option<&str>,
    epsilon: &str,
    caps: &CapOpts,
    mc: &McOpts,
    out: &Option<PathBuf>,
) -> Result<(), CliError> {
    let specs = parse_bound_specs(bounds, None, epsilon)?;
    let opts = VerifyOptions {
        caps: caps.engine_caps(),
        sample: mc.config(),
    };

    let instances: Vec<(String, WeightedMultiset, WeightedMultiset)> = match family {
        Family::Custom => {
            let path = pairs_file
                .ok_or_else(|| CliError::input("--family custom requires --pairs FILE"))?;
            load_custom_pairs(path)?
        }
        _ => {
            let (lo, hi) = match (n_min, n_max) {
                (Some(lo), Some(hi)) => (lo, hi),
                _ => return Err(CliError::input("scan requires --n-min and --n-max")),
            };
            let label = match family {
                Family::UniformGrid => "uniform-grid",
                Family::Staircase => "staircase",
                Family::Counterexample => "counterexample",
                Family::Custom => unreachable!(),
            };
            let mut v = Vec::new();
            for n in lo..=hi {
                let (a, b) = family_pair(family, n)?;
                v.push((label.to_string(), a, b));
            }
            v
        }
    };

    // rows stream out so a failing instance leaves the finished prefix behind
    let mut sink = open_sink(out)?;
    writeln_sink(&mut sink, VERDICT_CSV_HEADER)?;
    for (label, a, b) in &instances {
        let records = match verify(a, b, &specs, q_method(method), &opts) {
            Ok(records) => records,
            Err(err) => {
                flush_sink(&mut sink)?;
                return Err(CliError {
                    code: 4,
                    message: format!(
                        "scan aborted at n = {} ({label}): {err}; partial output flushed",
                        a.size()
                    ),
                });
            }
        };
        let ma = a.diversity();
        let mb = b.diversity();
        for rec in &records {
            writeln_sink(&mut sink, &verdict_csv_row(a.size(), label, &ma, &mb, rec))?;
        }
    }
    flush_sink(&mut sink)
}

fn load_custom_pairs(
    path: &str,
) -> Result<Vec<(String, WeightedMultiset, WeightedMultiset)>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::input(format!("cannot read `{path}`: {e}")))?;
    let doc: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::input(format!("pairs file `{path}`: {e}")))?;
    let pairs = doc
        .get("pairs")
        .and_then(|p| p.as_array())
        .ok_or_else(|| CliError::input("pairs file must contain a `pairs` array"))?;
    let mut out = Vec::new();
    for (idx, entry) in pairs.iter().enumerate() {
        let field = |key: &str| -> Result<WeightedMultiset, CliError> {
            let value = entry
                .get(key)
                .ok_or_else(|| CliError::input(format!("pair {idx} is missing `{key}`")))?;
            Ok(WeightedMultiset::parse_json(&value.to_string())?)
        };
        out.push(("custom".to_string(), field("a")?, field("b")?));
    }
    Ok(out)
}

enum Sink {
    Stdout(std::io::Stdout),
    File(fs::File),
}

fn open_sink(out: &Option<PathBuf>) -> Result<Sink, CliError> {
    match out {
        None => Ok(Sink::Stdout(std::io::stdout())),
        Some(path) => fs::File::create(path)
            .map(Sink::File)
            .map_err(|e| CliError::input(format!("cannot create `{}`: {e}", path.display()))),
    }
}

fn writeln_sink(sink: &mut Sink, line: &str) -> Result<(), CliError> {
    let res = match sink {
        Sink::Stdout(s) => writeln!(s, "{line}"),
        Sink::File(f) => writeln!(f, "{line}"),
    };
    res.map_err(|e| CliError {
        code: 1,
        message: format!("write failed: {e}"),
    })
}

fn flush_sink(sink: &mut Sink) -> Result<(), CliError> {
    let res = match sink {
        Sink::Stdout(s) => s.flush(),
        Sink::File(f) => f.flush(),
    };
    res.map_err(|e| CliError {
        code: 1,
        message: format!("flush failed: {e}"),
    })
}

fn emit_json(output: &OutputOpts, body: &str) -> Result<(), CliError> {
    if output.format == Format::Csv {
        return Err(CliError::input(
            "csv output is only available for `verify` and `scan`",
        ));
    }
    write_text(&output.out, &format!("{body}\n"))
}

fn write_text(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(path) => fs::write(path, text).map_err(|e| CliError {
            code: 1,
            message: format!("cannot write `{}`: {e}", path.display()),
        }),
    }
}
