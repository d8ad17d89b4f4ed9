//! zpq: desk-scale experiments over two-prime signed power-sum equations,
//! slow-decreasing weight norms, and character-duality certificates.
//!
//! Every command prints one machine-readable document (JSON by default, CSV
//! on request) to stdout or to `--out`; diagnostics go to stderr. Exit code 0
//! means success, 2 a violated precondition or bad input, 3 a refused
//! resource budget.

mod render;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::{json, Value};

use render::{Document, Table};
use zpq_core::arith::{
    distinct_primes, format_rational, is_p_power_character, parse_rational, Prime, TorusElement,
};
use zpq_core::duality::{
    extend_subgroup_character, is_extendable_diag_char, separating_character, x1_witness,
    x2_witness,
};
use zpq_core::powersum::min_terms_with_witness;
use zpq_core::sunit::{
    admissible_sums, enumerate_joint_solutions, f_cumulative, f_set, saturation_report,
};
use zpq_core::topology::{convergence_certificate, interleave};
use zpq_core::weights::{build_delta, diagonal_discreteness_certificate, restricted_norm};
use zpq_core::{Error, SearchLimits, SubsumMode};

#[derive(Parser)]
#[command(
    name = "zpq",
    version,
    about = "Two-prime power-sum equations, weight norms, and duality certificates",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write the document to a file instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads for the enumeration core (default: all cores);
    /// results are identical for every thread count
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Refuse searches whose side-index estimate exceeds this entry count
    #[arg(long, global = true, default_value_t = 100_000_000)]
    memory_cap: u128,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Unrestricted,
    SideSubsumFree,
    FullySubsumFree,
}

impl From<ModeArg> for SubsumMode {
    fn from(mode: ModeArg) -> Self {
        match mode {
            ModeArg::Unrestricted => SubsumMode::Unrestricted,
            ModeArg::SideSubsumFree => SubsumMode::SideSubsumFree,
            ModeArg::FullySubsumFree => SubsumMode::FullySubsumFree,
        }
    }
}

#[derive(Args)]
struct PairArgs {
    /// First prime
    #[arg(long, default_value_t = 2)]
    p: u64,

    /// Second prime
    #[arg(long, default_value_t = 3)]
    q: u64,
}

impl PairArgs {
    fn primes(&self) -> Result<(Prime, Prime), Error> {
        distinct_primes(self.p, self.q)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate joint solutions of x_1+...+x_k = y_1+...+y_l in signed
    /// powers of the two primes
    Solve(SolveArgs),
    /// The p-powers occurring in side-subsum-free joint solutions with the
    /// given term bounds
    Fset(FsetArgs),
    /// Union of the F-sets over all term bounds up to s
    Fcum(FcumArgs),
    /// Integers reachable as bounded signed power sums over both primes,
    /// zeros and cancellations allowed
    Admissible(AdmissibleArgs),
    /// Tabulate the weight function of a prime pair
    Delta(DeltaArgs),
    /// Cap-restricted upper bound on the weighted norm of an integer
    Norm(NormArgs),
    /// Certify that jointly representable integers carry weight at least 1
    Diag(DiagArgs),
    /// Test whether a rational is a character of the p-power topology
    CharTest(CharTestArgs),
    /// The point that no character separates from the diagonal
    WitnessX1(PairArgs),
    /// The diagonal character that extends to no character of the product
    WitnessX2(PairArgs),
    /// A character separating an element from the subgroup p^m Z
    Separate(SeparateArgs),
    /// Extend a character of p^m Z to a character of the whole group
    Extend(ExtendArgs),
    /// Minimal number of signed p-powers summing to an integer
    Minterms(MintermsArgs),
    /// Certify the longest sequence tail with bounded-term representations
    Converge(ConvergeArgs),
    /// Interleave two integer sequences into the product group
    Interleave(InterleaveArgs),
    /// Solution counts along ascending exponent bounds
    Saturate(SaturateArgs),
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// Maximum p-side term count
    #[arg(long)]
    k: u32,
    /// Maximum q-side term count
    #[arg(long)]
    l: u32,
    /// Largest exponent searched
    #[arg(long, default_value_t = 40)]
    max_exp: u32,
    /// Subsum regime
    #[arg(long, value_enum, default_value_t = ModeArg::SideSubsumFree)]
    mode: ModeArg,
}

#[derive(Args)]
struct FsetArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// Maximum p-side term count
    #[arg(long)]
    k: u32,
    /// Maximum q-side term count
    #[arg(long)]
    l: u32,
    /// Largest exponent searched
    #[arg(long, default_value_t = 40)]
    max_exp: u32,
}

#[derive(Args)]
struct FcumArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// Term-count ceiling for both sides
    #[arg(long)]
    s: u32,
    /// Largest exponent searched
    #[arg(long, default_value_t = 40)]
    max_exp: u32,
}

#[derive(Args)]
struct AdmissibleArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// Maximum p-side term count
    #[arg(long)]
    k: u32,
    /// Maximum q-side term count
    #[arg(long)]
    l: u32,
    /// Largest exponent searched
    #[arg(long, default_value_t = 40)]
    max_exp: u32,
}

#[derive(Args)]
struct DeltaArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// Largest term-count ceiling tabulated
    #[arg(long)]
    s_max: u32,
    /// Largest exponent searched
    #[arg(long, default_value_t = 40)]
    max_exp: u32,
}

#[derive(Args)]
struct NormArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// Largest term-count ceiling for the weight table
    #[arg(long)]
    s_max: u32,
    /// Largest exponent searched
    #[arg(long, default_value_t = 40)]
    max_exp: u32,
    /// The integer to weigh
    #[arg(long, allow_hyphen_values = true)]
    u: BigInt,
    /// Representation term cap
    #[arg(long)]
    max_terms: u32,
}

#[derive(Args)]
struct DiagArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// Term-count ceiling for both sides
    #[arg(long)]
    s: u32,
    /// Largest exponent searched
    #[arg(long, default_value_t = 40)]
    max_exp: u32,
}

#[derive(Args)]
struct CharTestArgs {
    /// The rational to test, as "a/b"
    #[arg(long)]
    t: String,
    /// The prime of the topology
    #[arg(long, default_value_t = 2)]
    p: u64,
}

#[derive(Args)]
struct SeparateArgs {
    /// The prime of the topology
    #[arg(long, default_value_t = 2)]
    p: u64,
    /// Subgroup exponent: the subgroup is p^m Z
    #[arg(long)]
    m: u32,
    /// The element to separate from the subgroup
    #[arg(long, allow_hyphen_values = true)]
    g: BigInt,
}

#[derive(Args)]
struct ExtendArgs {
    /// The prime of the topology
    #[arg(long, default_value_t = 2)]
    p: u64,
    /// Subgroup exponent: the subgroup is p^m Z
    #[arg(long)]
    m: u32,
    /// Value of the subgroup character at the generator p^m, as "a/b"
    #[arg(long)]
    t: String,
}

#[derive(Args)]
struct MintermsArgs {
    /// The integer to represent
    #[arg(long, allow_hyphen_values = true)]
    u: BigInt,
    /// The prime base
    #[arg(long, default_value_t = 2)]
    p: u64,
    /// Report "exceeds cap" beyond this term count
    #[arg(long)]
    cap: u32,
}

#[derive(Args)]
struct ConvergeArgs {
    /// The prime of the topology
    #[arg(long, default_value_t = 2)]
    p: u64,
    /// Term cap for the representations
    #[arg(long)]
    k: u32,
    /// Largest exponent searched
    #[arg(long, default_value_t = 40)]
    max_exp: u32,
    /// Inline comma-separated sequence
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with = "seq_file")]
    seq: Option<Vec<BigInt>>,
    /// Newline-delimited sequence file
    #[arg(long)]
    seq_file: Option<PathBuf>,
}

#[derive(Args)]
struct InterleaveArgs {
    /// Inline comma-separated first sequence (omit for empty)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    seq_a: Option<Vec<BigInt>>,
    /// Inline comma-separated second sequence (omit for empty)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    seq_b: Option<Vec<BigInt>>,
    /// Newline-delimited file for the first sequence
    #[arg(long, conflicts_with = "seq_a")]
    seq_a_file: Option<PathBuf>,
    /// Newline-delimited file for the second sequence
    #[arg(long, conflicts_with = "seq_b")]
    seq_b_file: Option<PathBuf>,
}

#[derive(Args)]
struct SaturateArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// Maximum p-side term count
    #[arg(long)]
    k: u32,
    /// Maximum q-side term count
    #[arg(long)]
    l: u32,
    /// Subsum regime
    #[arg(long, value_enum, default_value_t = ModeArg::SideSubsumFree)]
    mode: ModeArg,
    /// Ascending comma-separated exponent bounds
    #[arg(long, value_delimiter = ',', required = true)]
    bounds: Vec<u32>,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        let code = match err {
            Error::ResourceLimit { .. } => 3,
            _ => 2,
        };
        Failure { code, message: err.to_string() }
    }
}

fn io_failure(context: &str, err: std::io::Error) -> Failure {
    Failure { code: 2, message: format!("{context}: {err}") }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let doc = match cli.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Failure { code: 2, message: e.to_string() })?
            .install(|| dispatch(cli))?,
        None => dispatch(cli)?,
    };
    let rendered = match cli.format {
        Format::Json => doc.render_json(),
        Format::Csv => doc.render_csv(),
    };
    match &cli.out {
        Some(path) => fs::write(path, rendered)
            .map_err(|e| io_failure(&format!("writing {}", path.display()), e))?,
        None => print!("{rendered}"),
    }
    Ok(())
}

fn parse_torus(raw: &str) -> Result<TorusElement, Error> {
    Ok(TorusElement::new(parse_rational(raw)?))
}

fn read_sequence(
    inline: &Option<Vec<BigInt>>,
    file: &Option<PathBuf>,
) -> Result<Vec<BigInt>, Failure> {
    if let Some(path) = file {
        let text = fs::read_to_string(path)
            .map_err(|e| io_failure(&format!("reading {}", path.display()), e))?;
        text.lines()
            .map(str::trim)
            .filter(|line| !line.is_empty())
            .map(|line| {
                line.parse::<BigInt>().map_err(|e| Failure {
                    code: 2,
                    message: format!("bad integer {line:?} in {}: {e}", path.display()),
                })
            })
            .collect()
    } else {
        Ok(inline.clone().unwrap_or_default())
    }
}

fn dispatch(cli: &Cli) -> Result<Document, Failure> {
    let limits = SearchLimits { memory_cap: cli.memory_cap };
    match &cli.command {
        Command::Solve(args) => {
            let (p, q) = args.pair.primes()?;
            let sols = enumerate_joint_solutions(
                p, q, args.k, args.l, args.max_exp, args.mode.into(), &limits,
            )?;
            let mut table = Table::new(vec!["value", "p_side", "q_side"]);
            for sol in &sols {
                table = table.row(vec![
                    sol.value().to_string(),
                    sol.p_side().to_string(),
                    sol.q_side().to_string(),
                ]);
            }
            Ok(Document {
                json: Value::Array(sols.iter().map(|s| s.to_json()).collect()),
                table,
            })
        }
        Command::Fset(args) => {
            let (p, q) = args.pair.primes()?;
            let f = f_set(p, q, args.k, args.l, args.max_exp, &limits)?;
            Ok(power_set_document(&f))
        }
        Command::Fcum(args) => {
            let (p, q) = args.pair.primes()?;
            let f = f_cumulative(p, q, args.s, args.max_exp, &limits)?;
            Ok(power_set_document(&f))
        }
        Command::Admissible(args) => {
            let (p, q) = args.pair.primes()?;
            let values = admissible_sums(p, q, args.k, args.l, args.max_exp, &limits)?;
            let mut table = Table::new(vec!["value"]);
            for v in &values {
                table = table.row(vec![v.to_string()]);
            }
            Ok(Document {
                json: json!({
                    "values": values.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                }),
                table,
            })
        }
        Command::Delta(args) => {
            let (p, q) = args.pair.primes()?;
            let tab = build_delta(p, q, args.s_max, args.max_exp, &limits)?;
            let mut table = Table::new(vec!["power", "weight", "min_s"]);
            for e in tab.entries() {
                table = table.row(vec![
                    format!("{}^{}", p, e.exp),
                    format_rational(&e.weight),
                    e.min_s.to_string(),
                ]);
            }
            Ok(Document { json: tab.to_json(), table })
        }
        Command::Norm(args) => {
            let (p, q) = args.pair.primes()?;
            let tab = build_delta(p, q, args.s_max, args.max_exp, &limits)?;
            let (bound, rep) = restricted_norm(&args.u, &tab, args.max_terms)?;
            let bound = format_rational(&bound);
            let rep = rep.to_string();
            Ok(Document {
                json: json!({ "upper_bound": bound, "rep": rep }),
                table: Table::new(vec!["upper_bound", "rep"]).row(vec![bound, rep]),
            })
        }
        Command::Diag(args) => {
            let (p, q) = args.pair.primes()?;
            let report = diagonal_discreteness_certificate(p, q, args.s, args.max_exp, &limits)?;
            let u_list = report
                .u_values
                .iter()
                .map(|u| u.to_string())
                .collect::<Vec<_>>()
                .join(" ");
            let table = Table::new(vec![
                "p", "q", "s", "max_exp", "pass", "solutions_checked", "u_values",
            ])
            .row(vec![
                report.p.to_string(),
                report.q.to_string(),
                report.s.to_string(),
                report.max_exp.to_string(),
                report.pass.to_string(),
                report.solutions_checked.to_string(),
                u_list,
            ]);
            Ok(Document { json: report.to_json(), table })
        }
        Command::CharTest(args) => {
            let p = Prime::new(args.p)?;
            let t = parse_torus(&args.t)?;
            let verdict = is_p_power_character(&t, p);
            Ok(Document {
                json: json!({
                    "t": t.to_string(),
                    "p": p.get(),
                    "is_character": verdict,
                }),
                table: Table::new(vec!["t", "p", "is_character"]).row(vec![
                    t.to_string(),
                    p.to_string(),
                    verdict.to_string(),
                ]),
            })
        }
        Command::WitnessX1(pair) => {
            let (p, q) = pair.primes()?;
            let witness = x1_witness(p, q)?;
            let json = witness.to_json();
            let table = witness_table(&json);
            Ok(Document { json, table })
        }
        Command::WitnessX2(pair) => {
            let (p, q) = pair.primes()?;
            let witness = x2_witness(p, q)?;
            let extendable = is_extendable_diag_char(&witness, p, q)?;
            let witness = witness.to_string();
            Ok(Document {
                json: json!({ "witness": witness, "extendable": extendable }),
                table: Table::new(vec!["witness", "extendable"])
                    .row(vec![witness, extendable.to_string()]),
            })
        }
        Command::Separate(args) => {
            let p = Prime::new(args.p)?;
            let chi = separating_character(p, args.m, &args.g)?;
            let modulus = p.power(args.m);
            let at_g = chi.scale(&args.g);
            let json = json!({
                "witness": chi.to_string(),
                "derivation": [
                    format!("{} lies outside the subgroup {} Z", args.g, modulus),
                    format!(
                        "chi = {chi} annihilates the subgroup: chi * {modulus} is the integer 1"
                    ),
                    format!("chi({}) = {at_g}, which is nonzero in T", args.g),
                ],
            });
            let table = witness_table(&json);
            Ok(Document { json, table })
        }
        Command::Extend(args) => {
            let p = Prime::new(args.p)?;
            let t = parse_torus(&args.t)?;
            let extended = extend_subgroup_character(p, args.m, &t)?;
            let modulus = p.power(args.m);
            let json = json!({
                "witness": extended.to_string(),
                "derivation": [
                    format!("the subgroup {modulus} Z is generated by {modulus}"),
                    format!(
                        "chi' = {extended} restricts to the given character: \
                         chi'({modulus}) = {t} in T"
                    ),
                ],
            });
            let table = witness_table(&json);
            Ok(Document { json, table })
        }
        Command::Minterms(args) => {
            let p = Prime::new(args.p)?;
            if args.cap < 1 {
                return Err(Error::InvalidParameter("cap must be at least 1".into()).into());
            }
            let found = min_terms_with_witness(&args.u, p, args.cap);
            let (count, rep) = match &found {
                Some((count, rep)) => (json!(count), json!(rep.to_string())),
                None => (Value::Null, Value::Null),
            };
            Ok(Document {
                json: json!({
                    "u": args.u.to_string(),
                    "p": p.get(),
                    "cap": args.cap,
                    "min_terms": count,
                    "rep": rep,
                }),
                table: Table::new(vec!["u", "p", "cap", "min_terms", "rep"]).row(vec![
                    args.u.to_string(),
                    p.to_string(),
                    args.cap.to_string(),
                    found.as_ref().map_or(String::new(), |(c, _)| c.to_string()),
                    found.as_ref().map_or(String::new(), |(_, r)| r.to_string()),
                ]),
            })
        }
        Command::Converge(args) => {
            let p = Prime::new(args.p)?;
            if args.seq.is_none() && args.seq_file.is_none() {
                return Err(Failure {
                    code: 2,
                    message: "one of --seq or --seq-file is required".into(),
                });
            }
            let seq = read_sequence(&args.seq, &args.seq_file)?;
            let outcome = convergence_certificate(&seq, p, args.k, args.max_exp)?;
            let json = outcome.to_json();
            let get = |key: &str| {
                json.get(key)
                    .map(|v| match v {
                        Value::String(s) => s.clone(),
                        other => other.to_string(),
                    })
                    .unwrap_or_default()
            };
            let witnesses = json
                .get("witnesses")
                .and_then(Value::as_array)
                .map(|ws| {
                    ws.iter()
                        .map(|w| w.as_str().unwrap_or_default())
                        .collect::<Vec<_>>()
                        .join("; ")
                })
                .unwrap_or_default();
            let table = Table::new(vec![
                "certified", "k", "tail_start", "index", "element", "cap", "min_terms",
                "witnesses",
            ])
            .row(vec![
                get("certified"),
                get("k"),
                get("tail_start"),
                get("index"),
                get("element"),
                get("cap"),
                get("min_terms"),
                witnesses,
            ]);
            Ok(Document { json, table })
        }
        Command::Interleave(args) => {
            let a = read_sequence(&args.seq_a, &args.seq_a_file)?;
            let b = read_sequence(&args.seq_b, &args.seq_b_file)?;
            let pairs = interleave(&a, &b);
            let mut table = Table::new(vec!["first", "second"]);
            for (x, y) in &pairs {
                table = table.row(vec![x.to_string(), y.to_string()]);
            }
            Ok(Document {
                json: json!({
                    "pairs": pairs
                        .iter()
                        .map(|(x, y)| json!([x.to_string(), y.to_string()]))
                        .collect::<Vec<_>>(),
                }),
                table,
            })
        }
        Command::Saturate(args) => {
            let (p, q) = args.pair.primes()?;
            let report = saturation_report(
                p, q, args.k, args.l, args.mode.into(), &args.bounds, &limits,
            )?;
            let saturated = report
                .saturated
                .map_or(String::new(), |s| s.to_string());
            let mut table = Table::new(vec!["max_exp", "count", "new_count", "saturated"]);
            for entry in &report.entries {
                table = table.row(vec![
                    entry.max_exp.to_string(),
                    entry.count.to_string(),
                    entry.new_count.map_or(String::new(), |n| n.to_string()),
                    saturated.clone(),
                ]);
            }
            Ok(Document { json: report.to_json(), table })
        }
    }
}

fn power_set_document(f: &zpq_core::PowerSet) -> Document {
    let mut table = Table::new(vec!["exponent", "power"]);
    for (exp, power) in f.exponents().zip(f.powers()) {
        table = table.row(vec![exp.to_string(), power.to_string()]);
    }
    Document { json: f.to_json(), table }
}

fn witness_table(json: &Value) -> Table {
    let witness = json["witness"].as_str().unwrap_or_default().to_string();
    let derivation = json["derivation"]
        .as_array()
        .map(|steps| {
            steps
                .iter()
                .map(|s| s.as_str().unwrap_or_default())
                .collect::<Vec<_>>()
                .join("; ")
        })
        .unwrap_or_default();
    Table::new(vec!["witness", "derivation"]).row(vec![witness, derivation])
}
