mod input;

use std::collections::BTreeMap;
use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use modinv::theorems::{self, CaseRecord, CaseVerdict, Engines, Report};
use modinv::{
    st_from_power_map, steenrod, BracketSpec, Element, Error, FieldConfig, Invariants,
    MilnorIndex, PowerMap,
};

use input::{int_list, parse_input, Input};

/// Exact computations with modular invariants and Steenrod operations.
#[derive(Parser)]
#[command(name = "modinv", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print a named invariant.
    Compute(ComputeArgs),
    /// Apply an operation to an element.
    Apply(ApplyArgs),
    /// Print the power-map image of an element.
    PowerMap(PowerMapArgs),
    /// Read one operation off the power-map expansion.
    StOracle(StOracleArgs),
    /// Run verification grids.
    Verify(VerifyArgs),
}

#[derive(Args, Clone)]
struct Common {
    /// Odd prime.
    #[arg(long, default_value_t = 3)]
    p: u32,
    #[arg(long, value_enum, default_value_t = Output::Text)]
    output: Output,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Text,
    Records,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Bracket,
    Dickson,
    Mui,
    #[value(name = "L")]
    L,
    #[value(name = "V")]
    V,
}

#[derive(Args)]
struct ComputeArgs {
    #[arg(value_enum)]
    kind: Kind,
    #[arg(long)]
    n: usize,
    /// Dickson index, or the lower index of `L_{n,s}`.
    #[arg(long)]
    s: Option<usize>,
    /// Mùi index, comma separated.
    #[arg(long = "S", allow_hyphen_values = true)]
    big_s: Option<String>,
    #[arg(long)]
    k: Option<usize>,
    /// Bracket exponents, comma separated.
    #[arg(long, allow_hyphen_values = true)]
    e: Option<String>,
    #[command(flatten)]
    common: Common,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Engine {
    Coaction,
    Oracle,
    Both,
}

#[derive(Args)]
struct ApplyArgs {
    /// `beta`, `P^k` or `St^{(s1,..),(r1,..)}`.
    #[arg(long)]
    op: String,
    #[arg(long)]
    input: String,
    #[arg(long, value_enum, default_value_t = Engine::Coaction)]
    engine: Engine,
    /// Coefficient rank for the oracle; defaults to the smallest usable one.
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    n: Option<usize>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct PowerMapArgs {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    input: String,
    #[arg(long)]
    n: Option<usize>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct StOracleArgs {
    #[arg(long = "S", default_value = "")]
    big_s: String,
    #[arg(long = "R", default_value = "")]
    big_r: String,
    #[arg(long)]
    m: Option<usize>,
    #[arg(long)]
    input: String,
    #[arg(long)]
    n: Option<usize>,
    #[command(flatten)]
    common: Common,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Theorem {
    T11,
    P12,
    T13,
    P43,
    P44,
    P45,
    L23,
    P22,
    All,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    theorem: Theorem,
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Milnor truncation; grids use 1 and 2 when not given.
    #[arg(long)]
    m: Option<usize>,
    /// Milnor-degree bound for control operations.
    #[arg(long, default_value_t = 20)]
    budget: u64,
    /// A single bracket for t11 (or a single tuple for l23).
    #[arg(long, allow_hyphen_values = true)]
    e: Option<String>,
    #[arg(long)]
    k: Option<usize>,
    /// Largest `t` in the t13 grid.
    #[arg(long)]
    tmax: Option<u64>,
    /// Skip the power-map engine.
    #[arg(long)]
    no_oracle: bool,
    #[command(flatten)]
    common: Common,
}

/// Failure of a subcommand, carrying its exit status.
enum Failure {
    Usage(String),
    Internal(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_internal() {
            Failure::Internal(e.to_string())
        } else {
            Failure::Usage(e.to_string())
        }
    }
}

type CmdResult = std::result::Result<bool, Failure>;

fn field(p: u32) -> std::result::Result<FieldConfig, Failure> {
    Ok(FieldConfig::new(p)?)
}

fn required<T>(v: Option<T>, flag: &str) -> std::result::Result<T, Failure> {
    v.ok_or_else(|| Failure::Usage(format!("--{flag} is required here")))
}

#[derive(Serialize)]
struct ElementRecord<'a> {
    inputs: &'a BTreeMap<&'static str, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    engine: Option<&'static str>,
    degree: Option<u64>,
    element: String,
}

fn emit_line(out: &mut impl Write, v: &impl Serialize) {
    let line = serde_json::to_string(v).expect("serializable");
    writeln!(out, "{line}").expect("stdout");
}

fn emit_element(
    out: &mut impl Write,
    mode: Output,
    inputs: &BTreeMap<&'static str, Value>,
    engine: Option<&'static str>,
    u: &Element,
) {
    match mode {
        Output::Text => match engine {
            Some(name) => writeln!(out, "{name}: {u}").expect("stdout"),
            None => writeln!(out, "{u}").expect("stdout"),
        },
        Output::Records => emit_line(
            out,
            &ElementRecord {
                inputs,
                engine,
                degree: u.degree(),
                element: u.render(),
            },
        ),
    }
}

fn compute(a: ComputeArgs, out: &mut impl Write) -> CmdResult {
    let f = field(a.common.p)?;
    let inv = Invariants::new(f, a.n)?;
    let mut inputs = BTreeMap::new();
    inputs.insert("p", json!(f.p()));
    inputs.insert("n", json!(a.n));
    let u = match a.kind {
        Kind::Bracket => {
            let e = int_list(&required(a.e, "e")?)?;
            let k = a.k.unwrap_or(a.n.saturating_sub(e.len()));
            inputs.insert("kind", json!("bracket"));
            inputs.insert("k", json!(k));
            inputs.insert("e", json!(e));
            inv.bracket(&BracketSpec::new(a.n, k, e)?)?
        }
        Kind::Dickson => {
            let s = required(a.s, "s")?;
            inputs.insert("kind", json!("dickson"));
            inputs.insert("s", json!(s));
            inv.q(a.n, s)?
        }
        Kind::Mui => {
            let s = int_list(&required(a.big_s, "S")?)?;
            inputs.insert("kind", json!("mui"));
            inputs.insert("S", json!(s));
            inv.mui(&s)?
        }
        Kind::L => {
            inputs.insert("kind", json!("L"));
            match a.s {
                Some(s) => {
                    inputs.insert("s", json!(s));
                    inv.l(a.n, s)?
                }
                None => inv.l_top(a.n),
            }
        }
        Kind::V => {
            inputs.insert("kind", json!("V"));
            inv.v(a.n)?
        }
    };
    emit_element(out, a.common.output, &inputs, None, &u);
    Ok(true)
}

fn apply(a: ApplyArgs, out: &mut impl Write) -> CmdResult {
    let f = field(a.common.p)?;
    let idx = MilnorIndex::parse(&a.op)?;
    let Input { n, element: u } = parse_input(f, &a.input, a.n)?;
    let m = a.m.unwrap_or_else(|| idx.minimal_m().max(1));
    let mut inputs = BTreeMap::new();
    inputs.insert("p", json!(f.p()));
    inputs.insert("n", json!(n));
    inputs.insert("op", json!(idx.to_string()));
    inputs.insert("input", json!(a.input));
    let mut values = Vec::new();
    if a.engine != Engine::Oracle {
        values.push(("coaction", steenrod::st(&idx, &u)?));
    }
    if a.engine != Engine::Coaction {
        inputs.insert("m", json!(m));
        values.push(("oracle", st_from_power_map(&idx, &u, m)?));
    }
    let agree = values.windows(2).all(|w| w[0].1 == w[1].1);
    let label = |name| (a.engine == Engine::Both).then_some(name);
    for (name, v) in &values {
        emit_element(out, a.common.output, &inputs, label(*name), v);
    }
    if a.engine == Engine::Both {
        let verdict = if agree { "match" } else { "mismatch" };
        match a.common.output {
            Output::Text => writeln!(out, "verdict: {verdict}").expect("stdout"),
            Output::Records => emit_line(out, &json!({ "verdict": verdict })),
        }
    }
    Ok(agree)
}

fn power_map(a: PowerMapArgs, out: &mut impl Write) -> CmdResult {
    let f = field(a.common.p)?;
    let Input { n, element: u } = parse_input(f, &a.input, a.n)?;
    let pm = PowerMap::over(u.table(), a.m)?;
    let image = pm.dp(&u)?;
    let mut inputs = BTreeMap::new();
    inputs.insert("p", json!(f.p()));
    inputs.insert("n", json!(n));
    inputs.insert("m", json!(a.m));
    inputs.insert("input", json!(a.input));
    emit_element(out, a.common.output, &inputs, None, &image);
    Ok(true)
}

fn st_oracle(a: StOracleArgs, out: &mut impl Write) -> CmdResult {
    let f = field(a.common.p)?;
    let idx = MilnorIndex::new(int_list(&a.big_s)?, int_list(&a.big_r)?)?;
    let Input { n, element: u } = parse_input(f, &a.input, a.n)?;
    let m = a.m.unwrap_or_else(|| idx.minimal_m().max(1));
    let v = st_from_power_map(&idx, &u, m)?;
    let mut inputs = BTreeMap::new();
    inputs.insert("p", json!(f.p()));
    inputs.insert("n", json!(n));
    inputs.insert("m", json!(m));
    inputs.insert("op", json!(idx.to_string()));
    inputs.insert("input", json!(a.input));
    emit_element(out, a.common.output, &inputs, None, &v);
    Ok(true)
}

const T11_POOL: [u32; 3] = [0, 1, 2];
const P12_POOL: [u32; 2] = [0, 1];

fn t11_ks(n: usize) -> Vec<usize> {
    match n {
        2 => vec![0, 1, 2],
        3 => vec![0, 1, 3],
        _ => (0..=n).collect(),
    }
}

/// Strictly increasing tuples of length `n` from `{0, 1, 2}` starting at 0.
fn l23_tuples(n: usize) -> Vec<Vec<u32>> {
    theorems::distinct_tuples(&T11_POOL, n)
        .into_iter()
        .filter(|e| e.first() == Some(&0) && e.windows(2).all(|w| w[0] < w[1]))
        .collect()
}

fn run_one(a: &VerifyArgs, which: Theorem, engines: &Engines) -> std::result::Result<Report, Failure> {
    let f = *engines.field();
    let n = a.n;
    let ms: Vec<usize> = a.m.map_or(vec![1, 2], |m| vec![m]);
    let report = match which {
        Theorem::T11 => match &a.e {
            Some(e) => {
                let e = int_list(e)?;
                let k = a.k.unwrap_or(n.saturating_sub(e.len()));
                let spec = BracketSpec::new(n, k, e)?;
                let mut r = Report::default();
                for &m in &ms {
                    r.extend(theorems::verify_theorem11(engines, &spec, m, a.budget)?);
                }
                r
            }
            None => {
                let ks = a.k.map_or_else(|| t11_ks(n), |k| vec![k]);
                theorems::verify_theorem11_grid(engines, n, &ks, &T11_POOL, &ms, a.budget)?
            }
        },
        Theorem::P12 => theorems::verify_prop12_grid(f, n, &P12_POOL)?,
        Theorem::T13 => theorems::verify_theorem13(engines, n, a.tmax)?,
        Theorem::P43 => theorems::verify_prop43(engines, n)?,
        Theorem::P44 => theorems::verify_prop44(engines, n)?,
        Theorem::P45 => theorems::verify_prop45(engines, n)?,
        Theorem::L23 => {
            let tuples = match &a.e {
                Some(e) => vec![int_list(e)?],
                None => l23_tuples(n),
            };
            theorems::verify_lemma23_grid(f, n, &tuples, &ms)?
        }
        Theorem::P22 => {
            let ms = a.m.map_or(vec![1], |m| vec![m]);
            theorems::verify_prop22iii(f, n, &ms)?
        }
        Theorem::All => unreachable!("expanded by the caller"),
    };
    Ok(report)
}

fn theorem_name(t: Theorem) -> &'static str {
    match t {
        Theorem::T11 => "t11",
        Theorem::P12 => "p12",
        Theorem::T13 => "t13",
        Theorem::P43 => "p43",
        Theorem::P44 => "p44",
        Theorem::P45 => "p45",
        Theorem::L23 => "l23",
        Theorem::P22 => "p22",
        Theorem::All => "all",
    }
}

fn clip(s: &str, width: usize) -> String {
    if s.chars().count() <= width {
        s.to_string()
    } else {
        let head: String = s.chars().take(width - 3).collect();
        format!("{head}...")
    }
}

fn print_text_record(out: &mut impl Write, r: &CaseRecord) {
    let verdict = match r.verdict {
        CaseVerdict::Pass => "pass",
        CaseVerdict::Explained => "explained",
        CaseVerdict::Mismatch => "MISMATCH",
    };
    writeln!(
        out,
        "{:<4} {:<16} {:<24} {:<9} {}",
        r.theorem,
        clip(&r.input, 16),
        clip(&r.operation, 24),
        verdict,
        clip(&r.expected, 48)
    )
    .expect("stdout");
    if r.verdict == CaseVerdict::Mismatch {
        for e in &r.engines {
            writeln!(out, "     {}: {}", e.engine, e.value).expect("stdout");
        }
    }
    if let Some(note) = &r.note {
        if r.verdict != CaseVerdict::Pass {
            writeln!(out, "     note: {note}").expect("stdout");
        }
    }
}

#[derive(Serialize)]
struct Summary {
    theorem: &'static str,
    p: u32,
    n: usize,
    cases: usize,
    pass: usize,
    explained: usize,
    mismatch: usize,
    oracle_cases: usize,
}

fn verify(a: VerifyArgs, out: &mut impl Write) -> CmdResult {
    let f = field(a.common.p)?;
    if a.n == 0 {
        return Err(Failure::Usage("--n must be at least 1".into()));
    }
    let engines = Engines::new(f, !a.no_oracle);
    let selected: Vec<Theorem> = match a.theorem {
        Theorem::All => vec![
            Theorem::T11,
            Theorem::P12,
            Theorem::T13,
            Theorem::P43,
            Theorem::P44,
            Theorem::P45,
            Theorem::L23,
            Theorem::P22,
        ],
        t => vec![t],
    };
    let mut clean = true;
    for which in selected {
        let report = run_one(&a, which, &engines)?;
        let summary = Summary {
            theorem: theorem_name(which),
            p: f.p(),
            n: a.n,
            cases: report.records.len(),
            pass: report.count(CaseVerdict::Pass),
            explained: report.count(CaseVerdict::Explained),
            mismatch: report.count(CaseVerdict::Mismatch),
            oracle_cases: report.oracle_cases(),
        };
        match a.common.output {
            Output::Text => {
                for r in &report.records {
                    print_text_record(out, r);
                }
                for note in &report.notes {
                    writeln!(out, "note: {note}").expect("stdout");
                }
                writeln!(
                    out,
                    "{}: {} cases, {} pass, {} explained, {} mismatch, {} with oracle",
                    summary.theorem,
                    summary.cases,
                    summary.pass,
                    summary.explained,
                    summary.mismatch,
                    summary.oracle_cases
                )
                .expect("stdout");
            }
            Output::Records => {
                for r in &report.records {
                    emit_line(out, r);
                }
                for note in &report.notes {
                    emit_line(out, &json!({ "theorem": summary.theorem, "note": note }));
                }
                emit_line(out, &json!({ "summary": summary }));
            }
        }
        out.flush().expect("stdout");
        clean &= report.is_clean();
    }
    Ok(clean)
}

fn configure_threads() -> std::result::Result<(), Failure> {
    let Ok(raw) = std::env::var("MODINV_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t >= 1)
        .ok_or_else(|| Failure::Usage(format!("MODINV_THREADS must be an integer >= 1, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Internal(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    let result = configure_threads().and_then(|()| match cli.command {
        Command::Compute(a) => compute(a, &mut out),
        Command::Apply(a) => apply(a, &mut out),
        Command::PowerMap(a) => power_map(a, &mut out),
        Command::StOracle(a) => st_oracle(a, &mut out),
        Command::Verify(a) => verify(a, &mut out),
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("internal error: {msg}");
            ExitCode::from(3)
        }
    }
}
