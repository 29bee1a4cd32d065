mod config;
mod report;

use std::collections::BTreeMap;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;
use pierce_lab::arith::exp_bounds;
use pierce_lab::constructions::VERIFIED_GAPS;
use pierce_lab::exponent::psi_s_first_exceeding;
use pierce_lab::lab::{
    covering_sum_with_precision, density_grid_witness, enumerate_lambda_k, hdim_upper_refined, mc_sample_digits,
    CoverParams, RNG_ALGORITHM,
};
use pierce_lab::{
    build_divergent_family, classify_divergence, digits_rational, dual_representation, fundamental_interval,
    lambda_certified, lambda_star_truncated, lambda_truncated, parse_rational, partial_sums, phi_eval, shift_orbit,
    witness_in_interval, BigRational, DigitPrefix, DigitRule, Error, PierceSeq, RatInterval, DEFAULT_PRECISION_BITS,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use config::{resolve_precision, FileConfig, PRECISION_ENV};
use report::{Provenance, ReportEnvelope, Sink};

/// Exit status for malformed command lines.
const EXIT_USAGE: u8 = 64;
const EXIT_DOMAIN: u8 = 2;
const EXIT_GUARD: u8 = 3;
const EXIT_IO: u8 = 74;

/// Default cap on the number of series terms `divergent` will sum.
const DEFAULT_MAX_TERMS: u64 = 100_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

/// Exact Pierce expansions, convergence exponents and covering experiments.
///
/// Rationals are written `p/q`; decimals are rejected. Reports go to stdout,
/// one object per line.
#[derive(Debug, Parser)]
#[command(name = "pierce-lab", version)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    /// Enclosure precision in bits (overrides the environment and config).
    #[arg(long, global = true)]
    precision_bits: Option<u32>,
    /// TOML file with `precision_bits` and `format`.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    PowerFloor,
    Tower,
    Linear,
    Monomial,
    Geometric,
    Binary,
}

#[derive(Debug, Args)]
struct RuleArgs {
    /// Infinite rule family continuing the prefix.
    #[arg(long, value_enum)]
    rule: Option<Family>,
    /// Exponent of the power-floor or binary family, `p/q`.
    #[arg(long)]
    alpha: Option<String>,
    /// Offset of the linear family `k + offset`.
    #[arg(long)]
    offset: Option<u64>,
    /// Exponent `e >= 1` of the monomial family `floor(k^e)`.
    #[arg(long)]
    exponent: Option<String>,
    /// Base of the geometric family.
    #[arg(long)]
    base: Option<u64>,
    /// Bit word of the binary family, e.g. `0110`.
    #[arg(long)]
    word: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Digits, dual representation, shift orbit and partial sums of `x`.
    Expand {
        x: String,
        /// Orbit length (defaults to the number of digits).
        #[arg(long)]
        orbit: Option<usize>,
    },
    /// Evaluates a prefix, or a rule continuing it, and its fundamental interval.
    Eval {
        #[arg(long, default_value = "")]
        prefix: String,
        #[command(flatten)]
        rule: RuleArgs,
        #[arg(long)]
        bits: Option<u32>,
    },
    /// Window diagnostic and certificate for the convergence exponent.
    Lambda {
        #[arg(long, default_value = "")]
        prefix: String,
        #[command(flatten)]
        rule: RuleArgs,
        #[arg(long, default_value_t = 1000)]
        window: u64,
        /// Use the digits shared by the interval `lo,hi` instead of a sequence.
        #[arg(long)]
        interval: Option<String>,
    },
    /// A witness with exponent `alpha` inside `lo,hi`.
    Construct {
        #[arg(long)]
        alpha: String,
        #[arg(long = "in")]
        within: String,
        #[arg(long)]
        bits: Option<u32>,
    },
    /// A continuation of the first `j` prefix digits whose `s`-series diverges.
    Divergent {
        #[arg(long)]
        s: String,
        #[arg(long)]
        prefix: String,
        #[arg(long)]
        j: usize,
        /// Partial-sum level to certify.
        #[arg(long, default_value = "10")]
        bound: String,
        #[arg(long, default_value_t = DEFAULT_MAX_TERMS)]
        max_terms: u64,
    },
    /// Terms, ratios and partial sums of the covering series.
    Cover {
        #[arg(long, default_value_t = 1)]
        n: u64,
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
        #[arg(long)]
        eps: String,
        #[arg(long)]
        s: String,
        #[arg(long)]
        kmax: u64,
    },
    /// Exact size of a covering layer and its binomial bound.
    Enumerate {
        #[arg(long, default_value_t = 1)]
        n: u64,
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
        #[arg(long)]
        eps: String,
        #[arg(long)]
        k: u64,
        /// Also list the tuples.
        #[arg(long)]
        list: bool,
    },
    /// Dimension bound from an `n`-part partition of `[alpha, beta]`.
    Refine {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
        #[arg(long)]
        parts: u64,
    },
    /// Witnesses in every dyadic cell of width `2^-depth`, one line per cell.
    Grid {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        depth: u32,
    },
    /// Digit statistics of seeded dyadic samples, one line per sample.
    Sample {
        #[arg(long)]
        bits: u32,
        #[arg(long)]
        count: u64,
        #[arg(long)]
        seed: u64,
    },
}

enum CliError {
    Usage(String),
    Lib(Error),
    Io(io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

type CliResult<T> = Result<T, CliError>;

fn rational(s: &str) -> CliResult<BigRational> {
    Ok(parse_rational(s)?)
}

fn prefix(s: &str) -> CliResult<DigitPrefix> {
    let digits = s
        .split(',')
        .map(str::trim)
        .filter(|d| !d.is_empty())
        .map(|d| {
            d.parse::<BigUint>()
                .map_err(|_| CliError::Lib(Error::Parse(d.to_string())))
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(DigitPrefix::new(digits)?)
}

fn interval(s: &str) -> CliResult<RatInterval> {
    let (lo, hi) = s
        .split_once(',')
        .ok_or_else(|| CliError::Usage(format!("expected `lo,hi`, got `{s}`")))?;
    Ok(RatInterval::new(rational(lo)?, rational(hi)?)?)
}

fn required<'a>(v: &'a Option<String>, flag: &str) -> CliResult<&'a str> {
    v.as_deref()
        .ok_or_else(|| CliError::Usage(format!("this --rule needs --{flag}")))
}

fn build_rule(prefix: &DigitPrefix, args: &RuleArgs) -> CliResult<Option<DigitRule>> {
    let Some(family) = args.rule else {
        return Ok(None);
    };
    let rule = match family {
        Family::PowerFloor => DigitRule::PowerFloor {
            prefix: prefix.clone(),
            alpha: rational(required(&args.alpha, "alpha")?)?,
        },
        Family::Tower => DigitRule::Tower { prefix: prefix.clone() },
        Family::Linear => DigitRule::Linear {
            offset: args.offset.unwrap_or(0),
        },
        Family::Monomial => DigitRule::Monomial {
            exponent: rational(required(&args.exponent, "exponent")?)?,
        },
        Family::Geometric => DigitRule::Geometric {
            base: args
                .base
                .ok_or_else(|| CliError::Usage("--rule geometric needs --base".into()))?,
        },
        Family::Binary => {
            let word = args.word.as_deref().unwrap_or("");
            let bits = word
                .chars()
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    _ => Err(CliError::Usage(format!(
                        "--word must contain only 0 and 1, got `{word}`"
                    ))),
                })
                .collect::<CliResult<Vec<_>>>()?;
            DigitRule::BinaryPerturbed {
                alpha: rational(required(&args.alpha, "alpha")?)?,
                bits,
            }
        }
    };
    rule.validate()?;
    rule.verify_increasing(prefix.len() + VERIFIED_GAPS)?;
    Ok(Some(rule))
}

fn to_json<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report values serialize to JSON")
}

fn strings<T: ToString>(xs: &[T]) -> Vec<String> {
    xs.iter().map(ToString::to_string).collect()
}

struct Ctx<W: Write> {
    sink: Sink<W>,
    precision_bits: u32,
}

impl<W: Write> Ctx<W> {
    fn emit(&mut self, command: &str, params: &Params, results: Value, provenance: Provenance) -> CliResult<()> {
        let env = ReportEnvelope {
            command: command.to_string(),
            params: params.0.clone(),
            results,
            provenance,
        };
        Ok(self.sink.emit(&env)?)
    }

    fn provenance(&self) -> Provenance {
        Provenance::new(self.precision_bits)
    }
}

#[derive(Default)]
struct Params(BTreeMap<String, String>);

impl Params {
    fn set(mut self, key: &str, value: impl ToString) -> Self {
        self.0.insert(key.to_string(), value.to_string());
        self
    }

    fn set_opt<T: ToString>(self, key: &str, value: &Option<T>) -> Self {
        match value {
            Some(v) => self.set(key, v.to_string()),
            None => self,
        }
    }

    fn rule(self, args: &RuleArgs) -> Self {
        self.set_opt(
            "rule",
            &args
                .rule
                .and_then(|f| f.to_possible_value())
                .map(|v| v.get_name().to_string()),
        )
        .set_opt("alpha", &args.alpha)
        .set_opt("offset", &args.offset)
        .set_opt("exponent", &args.exponent)
        .set_opt("base", &args.base)
        .set_opt("word", &args.word)
    }
}

fn run<W: Write>(command: Command, ctx: &mut Ctx<W>, cli_bits: Option<u32>) -> CliResult<()> {
    match command {
        Command::Expand { x, orbit } => {
            let value = rational(&x)?;
            let digits = digits_rational(&value)?;
            let tau = dual_representation(&value).ok().map(|(_, tau)| tau);
            let n = orbit.unwrap_or(digits.len());
            let orbit = shift_orbit(&value, n)?;
            let sums = if digits.is_empty() {
                Vec::new()
            } else {
                partial_sums(&digits)?
            };
            let results = json!({
                "x": value.to_string(),
                "digits": to_json(&digits),
                "tau": to_json(&tau),
                "orbit": strings(&orbit),
                "partial_sums": strings(&sums),
            });
            let params = Params::default().set("x", &x).set("orbit", n);
            ctx.emit("expand", &params, results, ctx.provenance())
        }
        Command::Eval { prefix: p, rule, bits } => {
            let bits = bits.or(cli_bits).unwrap_or(ctx.precision_bits);
            let pre = prefix(&p)?;
            let built = build_rule(&pre, &rule)?;
            let seq = match &built {
                Some(r) => PierceSeq::Infinite(r.clone()),
                None => PierceSeq::Finite(pre.clone()),
            };
            let phi = phi_eval(&seq, bits)?;
            let cell = if pre.is_empty() {
                None
            } else {
                Some(fundamental_interval(&pre)?)
            };
            let results = json!({
                "phi": to_json(&phi),
                "fundamental_interval": to_json(&cell),
                "rule": to_json(&built),
            });
            let params = Params::default().set("prefix", &p).set("bits", bits).rule(&rule);
            let mut prov = ctx.provenance();
            prov.precision_bits = bits;
            ctx.emit("eval", &params, results, prov)
        }
        Command::Lambda {
            prefix: p,
            rule,
            window,
            interval: iv,
        } => {
            let params = Params::default()
                .set("prefix", &p)
                .set("window", window)
                .set_opt("interval", &iv)
                .rule(&rule);
            let results = if let Some(iv) = iv {
                let x = interval(&iv)?;
                let est = lambda_star_truncated(&x, window as usize)?;
                json!({ "estimate": to_json(&est), "sequence": Value::Null, "certificate": to_json(&est.certificate_alpha.as_ref().map(|a| a.to_string())) })
            } else {
                let pre = prefix(&p)?;
                let built = build_rule(&pre, &rule)?;
                let (seq, cert) = match built {
                    Some(r) => {
                        let cert = lambda_certified(&r).map(|a| a.to_string()).ok();
                        (PierceSeq::Infinite(r), cert)
                    }
                    // Finite sequences have exponent 0.
                    None => (PierceSeq::Finite(pre), Some("0".to_string())),
                };
                let est = lambda_truncated(&seq, window)?;
                let seq_json = match &seq {
                    PierceSeq::Finite(p) => json!({ "finite": to_json(p) }),
                    PierceSeq::Infinite(r) => json!({ "rule": to_json(r) }),
                };
                json!({ "estimate": to_json(&est), "sequence": seq_json, "certificate": to_json(&cert) })
            };
            ctx.emit("lambda", &params, results, ctx.provenance())
        }
        Command::Construct { alpha, within, bits } => {
            let bits = bits.or(cli_bits).unwrap_or(ctx.precision_bits);
            let a = rational(&alpha)?;
            let u = interval(&within)?;
            let w = witness_in_interval(&u, &a, bits)?;
            let params = Params::default()
                .set("alpha", &alpha)
                .set("in", &within)
                .set("bits", bits);
            let mut prov = ctx.provenance();
            prov.precision_bits = bits;
            ctx.emit("construct", &params, to_json(&w), prov)
        }
        Command::Divergent {
            s,
            prefix: p,
            j,
            bound,
            max_terms,
        } => {
            let s_exp = rational(&s)?;
            let level = rational(&bound)?;
            let pre = prefix(&p)?;
            let rule = build_divergent_family(&pre, &s_exp, j)?;
            // floor((s_j + i)^(1/s))^s <= s_j + i, so the partial sums dominate
            // sum_i 1/(s_j + i) >= ln((s_j + m + 1)/(s_j + 1)), which passes
            // `level` once m >= (s_j + 1) e^level.
            let sj = &pre.digits()[j - 1];
            let e_level = exp_bounds(&level, ctx.precision_bits).hi().ceil().to_integer();
            let e_level = e_level
                .to_biguint()
                .ok_or_else(|| CliError::Lib(Error::Domain(format!("bound {level} must be non-negative"))))?;
            let n_bound = BigUint::from(j) + (sj + 1u32) * e_level;
            let n_bound = match u64::try_from(&n_bound) {
                Ok(n) if n <= max_terms => n,
                _ => {
                    return Err(CliError::Lib(Error::GuardExceeded {
                        what: "harmonic term bound",
                        value: n_bound.to_string(),
                        limit: max_terms.to_string(),
                    }))
                }
            };
            let seq = PierceSeq::Infinite(rule.clone());
            let first = psi_s_first_exceeding(&seq, &s_exp, &level, n_bound)?;
            let results = json!({
                "rule": to_json(&rule),
                "verdict": to_json(&classify_divergence(&rule, &s_exp)),
                "harmonic_term_bound": n_bound,
                "first_exceeding": first,
                "level": level.to_string(),
            });
            let params = Params::default()
                .set("s", &s)
                .set("prefix", &p)
                .set("j", j)
                .set("bound", &bound)
                .set("max_terms", max_terms);
            ctx.emit("divergent", &params, results, ctx.provenance())
        }
        Command::Cover {
            n,
            alpha,
            beta,
            eps,
            s,
            kmax,
        } => {
            let p = CoverParams::new(
                n,
                rational(&alpha)?,
                rational(&beta)?,
                rational(&eps)?,
                rational(&s)?,
                kmax,
            )?;
            let rep = covering_sum_with_precision(&p, ctx.precision_bits)?;
            let params = Params::default()
                .set("n", n)
                .set("alpha", &alpha)
                .set("beta", &beta)
                .set("eps", &eps)
                .set("s", &s)
                .set("kmax", kmax);
            ctx.emit("cover", &params, to_json(&rep), ctx.provenance())
        }
        Command::Enumerate {
            n,
            alpha,
            beta,
            eps,
            k,
            list,
        } => {
            // The series exponent plays no part in the layer itself.
            let one = BigRational::from_integer(1.into());
            let p = CoverParams::new(n, rational(&alpha)?, rational(&beta)?, rational(&eps)?, one, k.max(n))?;
            let count = enumerate_lambda_k(&p, k, list)?;
            let params = Params::default()
                .set("n", n)
                .set("alpha", &alpha)
                .set("beta", &beta)
                .set("eps", &eps)
                .set("k", k)
                .set("list", list);
            ctx.emit("enumerate", &params, to_json(&count), ctx.provenance())
        }
        Command::Refine { alpha, beta, parts } => {
            let (a, b) = (rational(&alpha)?, rational(&beta)?);
            let bound = hdim_upper_refined(&a, &b, parts)?;
            let limit = BigRational::from_integer(1.into()) - &a;
            let results = json!({
                "bound": bound.to_string(),
                "limit": limit.to_string(),
                "excess": (&bound - &limit).to_string(),
            });
            let params = Params::default()
                .set("alpha", &alpha)
                .set("beta", &beta)
                .set("parts", parts);
            ctx.emit("refine", &params, results, ctx.provenance())
        }
        Command::Grid { alpha, depth } => {
            let a = rational(&alpha)?;
            let rep = density_grid_witness(&a, depth)?;
            let params = Params::default().set("alpha", &alpha).set("depth", depth);
            for cell in &rep.cells {
                ctx.emit("grid", &params, to_json(cell), ctx.provenance())?;
            }
            let summary = json!({
                "alpha": rep.alpha.to_string(),
                "depth": rep.depth,
                "attempted": rep.attempted,
                "witnessed": rep.witnessed,
            });
            ctx.emit("grid-summary", &params, summary, ctx.provenance())
        }
        Command::Sample { bits, count, seed } => {
            let rep = mc_sample_digits(bits, count, seed)?;
            let params = Params::default()
                .set("bits", bits)
                .set("count", count)
                .set("seed", seed);
            let mut prov = ctx.provenance();
            prov.seed = Some(seed);
            prov.rng = Some(RNG_ALGORITHM);
            for sample in &rep.samples {
                ctx.emit("sample", &params, to_json(sample), prov.clone())?;
            }
            let mut summary = to_json(&rep);
            summary.as_object_mut().expect("report is an object").remove("samples");
            ctx.emit("sample-summary", &params, summary, prov)
        }
    }
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
    let file = match &cli.config {
        Some(path) => match FileConfig::load(path) {
            Ok(c) => c,
            Err(msg) => {
                eprintln!("error: {msg}");
                return ExitCode::from(EXIT_USAGE);
            }
        },
        None => FileConfig::default(),
    };
    let env = std::env::var(PRECISION_ENV).ok();
    let precision_bits = match resolve_precision(cli.precision_bits, env.as_deref(), &file, DEFAULT_PRECISION_BITS) {
        Ok(b) => b,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let format = cli.format.or(file.format).unwrap_or(OutputFormat::Json);
    let stdout = io::stdout().lock();
    let mut ctx = Ctx {
        sink: Sink::new(io::BufWriter::new(stdout), format),
        precision_bits,
    };
    let outcome = run(cli.command, &mut ctx, cli.precision_bits);
    let flushed = ctx.sink_flush();
    match outcome.and(flushed) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
        Err(CliError::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_domain() { EXIT_DOMAIN } else { EXIT_GUARD })
        }
        Err(CliError::Io(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_IO)
        }
    }
}

impl<W: Write> Ctx<W> {
    fn sink_flush(&mut self) -> CliResult<()> {
        Ok(self.sink.flush()?)
    }
}
