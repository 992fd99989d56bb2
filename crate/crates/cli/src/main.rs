//! `ratioset`: density verdicts, Waring quantities and witnesses from the shell.
//!
//! Output is compact JSON on stdout unless `--human` is given. Exit status
//! is 0 when a result was computed (a NotDense verdict included), 1 for bad
//! input, and 2 when a budget or the working precision ran out.

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use ratioset::denseness::{self, Status, Verdict, DEFAULT_POLY_BUDGET};
use ratioset::error::{Error, Result};
use ratioset::oracle::{self, DEFAULT_ORACLE_BUDGET};
use ratioset::padic::{parse_rational, PAdicContext, Rational};
use ratioset::poly::{parse_poly, FactoredPoly, PolyInput};
use ratioset::waring::{self, WaringResult};
use ratioset::witness;

#[derive(Parser, Debug)]
#[command(
    name = "ratioset",
    version,
    about = "Density of quotient sets in the p-adic numbers"
)]
struct Cli {
    /// Print prose instead of JSON.
    #[arg(long, global = true)]
    human: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Least g with 0 a sum of g nth powers mod b, one of them a unit.
    Theta {
        /// Exponent.
        #[arg(short)]
        n: u64,
        /// Modulus.
        #[arg(short)]
        b: u64,
        /// Largest g to try [default: b].
        #[arg(long)]
        cap: Option<u64>,
        /// Include the bases of a minimal representation.
        #[arg(long)]
        certificate: bool,
    },
    /// Least g with every residue mod b a sum of g nth powers.
    Gamma {
        /// Exponent.
        #[arg(short)]
        n: u64,
        /// Modulus.
        #[arg(short)]
        b: u64,
        /// Largest g to try [default: b].
        #[arg(long)]
        cap: Option<u64>,
    },
    /// Decide density of a quotient set in Q_p.
    #[command(subcommand)]
    Dense(DenseCommand),
    /// Build explicit approximations of a target ratio.
    #[command(subcommand)]
    Witness(WitnessCommand),
    /// Brute-force checks.
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Closure of sums of nth powers in Q_2, n in {4, 8, 16}.
    #[command(subcommand)]
    Closure(ClosureCommand),
}

#[derive(Subcommand, Debug)]
enum DenseCommand {
    /// Quotients of sums of m nth powers.
    Powersum {
        /// Number of summands.
        #[arg(short)]
        m: u64,
        /// Exponent.
        #[arg(short)]
        n: u64,
        /// Prime.
        #[arg(short)]
        p: u64,
    },
    /// Quotients of sums of two nth powers.
    S2 {
        /// Exponent.
        #[arg(short)]
        n: u64,
        /// Prime.
        #[arg(short)]
        p: u64,
    },
    /// Quotients of values of a polynomial at positive integers.
    Poly {
        /// `[c0,c1,...]` or a product like `2*(X+1)^6(X-3)`.
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
        /// Prime.
        #[arg(short)]
        p: u64,
        /// Most residues any root scan may visit.
        #[arg(long, default_value_t = DEFAULT_POLY_BUDGET)]
        budget: u64,
    },
}

#[derive(Args, Debug)]
struct Target {
    /// Target ratio, `NUM` or `NUM/DEN`.
    #[arg(short, allow_hyphen_values = true)]
    r: String,
    /// Required closeness: the result satisfies nu_p(quotient - r) > u.
    #[arg(short, allow_hyphen_values = true)]
    u: i64,
    /// Prime.
    #[arg(short)]
    p: u64,
    /// Working precision in base-p digits.
    #[arg(long, default_value_t = PAdicContext::DEFAULT_PRECISION)]
    precision: u32,
}

#[derive(Subcommand, Debug)]
enum WitnessCommand {
    /// x1, x2 with f(x1)/f(x2) close to r.
    Poly {
        /// Factored polynomial, e.g. `(X-1)^2(X+1)^3`.
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
        /// Zero-based factor indices `i,j` with coprime multiplicities.
        #[arg(long, value_delimiter = ',', required = true)]
        roots: Vec<usize>,
        #[command(flatten)]
        target: Target,
    },
    /// Two tuples of m nonnegative integers whose nth-power sums have quotient close to r.
    Powersum {
        /// Number of summands.
        #[arg(short)]
        m: u64,
        /// Exponent.
        #[arg(short)]
        n: u64,
        #[command(flatten)]
        target: Target,
    },
}

#[derive(Subcommand, Debug)]
enum OracleCommand {
    /// Valuations of f(1..=xmax) and which differences occur.
    Spectrum {
        #[arg(long, allow_hyphen_values = true)]
        poly: String,
        /// Prime.
        #[arg(short)]
        p: u64,
        #[arg(long, default_value_t = 10_000)]
        xmax: u64,
        /// Report differences modulo this.
        #[arg(long, default_value_t = 2)]
        modulus: u64,
        /// Largest accepted xmax.
        #[arg(long, default_value_t = 100_000)]
        budget: u64,
    },
    /// Theta by exhaustive search over residue tuples.
    Theta {
        /// Exponent.
        #[arg(short)]
        n: u64,
        /// Modulus.
        #[arg(short)]
        b: u64,
        #[arg(long)]
        gmax: u64,
        /// Most tuples to visit.
        #[arg(long, default_value_t = DEFAULT_ORACLE_BUDGET)]
        budget: u64,
    },
}

#[derive(Args, Debug)]
struct ClosureArgs {
    /// Number of summands.
    #[arg(short)]
    m: u64,
    /// Exponent.
    #[arg(short)]
    n: u64,
    /// `NUM` or `NUM/DEN`.
    #[arg(long, allow_hyphen_values = true)]
    value: String,
}

#[derive(Subcommand, Debug)]
enum ClosureCommand {
    /// Is the value in the closure of sums of m nth powers?
    Member {
        #[command(flatten)]
        args: ClosureArgs,
        /// 2-adic digits used to represent the value.
        #[arg(long, default_value_t = PAdicContext::DEFAULT_PRECISION)]
        precision: u32,
    },
    /// Is the value a quotient of two nonzero elements of that closure?
    Ratio {
        #[command(flatten)]
        args: ClosureArgs,
    },
}

/// What a command printed, in both renderings.
struct Output {
    json: serde_json::Value,
    human: String,
}

impl Output {
    fn new(value: &impl Serialize, human: String) -> Self {
        Output {
            json: serde_json::to_value(value).expect("outputs serialize"),
            human,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli.command) {
        Ok(out) => {
            if cli.human {
                println!("{}", out.human);
            } else {
                println!("{}", out.json);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_exhaustion() { 2 } else { 1 })
        }
    }
}

fn run(command: Command) -> Result<Output> {
    match command {
        Command::Theta {
            n,
            b,
            cap,
            certificate,
        } => {
            let mut res = waring::theta(n, b, cap.unwrap_or(b))?;
            if !certificate {
                res.certificate = None;
            }
            let human = waring_prose("theta", &res);
            Ok(Output::new(&res, human))
        }
        Command::Gamma { n, b, cap } => {
            let res = waring::gamma(n, b, cap.unwrap_or(b))?;
            let human = waring_prose("gamma", &res);
            Ok(Output::new(&res, human))
        }
        Command::Dense(cmd) => {
            let verdict = match cmd {
                DenseCommand::Powersum { m, n, p } => denseness::decide_power_sum(m, n, p)?,
                DenseCommand::S2 { n, p } => denseness::decide_s2(n, p)?,
                DenseCommand::Poly { poly, p, budget } => {
                    denseness::decide_poly(&parse_poly(&poly)?, p, budget)?
                }
            };
            let human = verdict_prose(&verdict);
            Ok(Output::new(&verdict, human))
        }
        Command::Witness(WitnessCommand::Poly {
            poly,
            roots,
            target,
        }) => {
            let f = factored(&poly)?;
            if roots.len() != 2 {
                return Err(Error::InvalidArgument(format!(
                    "--roots takes two indices i,j, got {}",
                    roots.len()
                )));
            }
            let (r, ctx) = target_parts(&target)?;
            let pair = witness::approximation_witness(&f, roots[0], roots[1], &r, target.u, &ctx)?;
            let human = format!(
                "f({}) / f({}) is within {}^-{} of {r} (exponent {})",
                pair.x1, pair.x2, pair.p, target.u, pair.exponent
            );
            Ok(Output::new(&pair, human))
        }
        Command::Witness(WitnessCommand::Powersum { m, n, target }) => {
            let (r, ctx) = target_parts(&target)?;
            let w = witness::power_sum_witness(m, n, target.p, &r, target.u, &ctx)?;
            let human = format!(
                "a = {:?}\nb = {:?}\nsum a_i^{n} / sum b_i^{n} is within {}^-{} of {r} (exponent {})",
                w.a.iter().map(ToString::to_string).collect::<Vec<_>>(),
                w.b.iter().map(ToString::to_string).collect::<Vec<_>>(),
                w.p,
                target.u,
                w.pair.exponent
            );
            Ok(Output::new(&w, human))
        }
        Command::Oracle(OracleCommand::Spectrum {
            poly,
            p,
            xmax,
            modulus,
            budget,
        }) => {
            let f = factored(&poly)?;
            let s = denseness::valuation_spectrum(&f, p, xmax, modulus, budget)?;
            let human = format!(
                "valuations {:?}\nresidues mod {modulus} of differences: hit {:?}, missed {:?}",
                s.counts.keys().collect::<Vec<_>>(),
                s.classes_hit,
                s.classes_missed
            );
            Ok(Output::new(&s, human))
        }
        Command::Oracle(OracleCommand::Theta { n, b, gmax, budget }) => {
            let t = oracle::brute_force_theta(n, b, gmax, budget)?;
            let human = match (t.value, &t.bases) {
                (Some(g), Some(xs)) => format!("theta({n}, {b}) = {g}, bases {xs:?}"),
                _ => format!("theta({n}, {b}) > {gmax}"),
            };
            Ok(Output::new(&t, human))
        }
        Command::Closure(ClosureCommand::Member { args, precision }) => {
            let q = parse_rational(&args.value)?;
            let ctx = PAdicContext::new(2, precision)?;
            let (member, cylinder) =
                denseness::t_closure_membership(&ctx.from_rational(&q), args.m, args.n)?;
            let human = match cylinder {
                Some(c) => format!(
                    "{q} lies in 2^({} v)({} + {} Z_2) with v = {}",
                    args.n, c.j, c.modulus, c.v
                ),
                None if member => format!("{q} is zero"),
                None => format!("{q} is not in the closure of S_{}^{}", args.m, args.n),
            };
            Ok(Output {
                json: json!({ "member": member, "cylinder": cylinder }),
                human,
            })
        }
        Command::Closure(ClosureCommand::Ratio { args }) => {
            let q = parse_rational(&args.value)?;
            let res = denseness::t_ratio_membership(&q, args.m, args.n)?;
            let human = if res.member {
                format!(
                    "{q} is a quotient of elements of the closure of S_{}^{}",
                    args.m, args.n
                )
            } else {
                format!(
                    "{q} is not a quotient of elements of the closure of S_{}^{}",
                    args.m, args.n
                )
            };
            Ok(Output::new(&res, human))
        }
    }
}

fn factored(poly: &str) -> Result<FactoredPoly> {
    match parse_poly(poly)? {
        PolyInput::Factored(f) => Ok(f),
        PolyInput::Dense(_) => Err(Error::InvalidArgument(
            "this command needs a factored polynomial like (X-1)^2(X+1)".into(),
        )),
    }
}

fn target_parts(t: &Target) -> Result<(Rational, PAdicContext)> {
    Ok((parse_rational(&t.r)?, PAdicContext::new(t.p, t.precision)?))
}

fn waring_prose(name: &str, res: &WaringResult) -> String {
    match res.value {
        Some(g) => {
            let mut s = format!("{name}({}, {}) = {g}", res.n, res.modulus);
            if let Some(xs) = &res.certificate {
                s.push_str(&format!(", bases {xs:?}"));
            }
            s
        }
        None => format!("{name}({}, {}) > {}", res.n, res.modulus, res.cap),
    }
}

fn verdict_prose(v: &Verdict) -> String {
    let status = match v.status {
        Status::Dense => "dense",
        Status::NotDense => "not dense",
        Status::Unknown => "undecided",
    };
    let reason = serde_json::to_value(&v.reason).expect("reason serializes");
    format!(
        "{status} ({})\nreason: {reason}\ncertificate: {}",
        v.theorem,
        serde_json::to_value(&v.certificate).expect("certificate serializes")
    )
}
