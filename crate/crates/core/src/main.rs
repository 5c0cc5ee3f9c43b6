use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use ideals::density::{self, Checkpoints, DensityError, OracleConfig};
use ideals::ideals::{member, IdealDesc, IdealError};
use ideals::natset::{exact_json, NatSet, SetError};
use ideals::rational::{format_q, parse_q, Q};
use ideals::sequences::{
    cluster_points, decompose, decompose_double, ideal_lim, join_q, limit_points, ClusterReport, DoubleSeq, SeqError,
    SymSeq,
};
use ideals::theorems::{self, CheckError, Verdict};

#[derive(Parser)]
#[command(name = "ideals", version, about = "Ideals on ω, densities and ideal convergence")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(clap::Args)]
struct Oracle {
    /// Largest prefix sampled by the density oracle.
    #[arg(long, default_value_t = 1_000_000)]
    budget: u64,
    #[arg(long, default_value = "geometric")]
    checkpoints: String,
}

#[derive(Subcommand)]
enum Cmd {
    /// Density functional of a set.
    Density {
        #[arg(long)]
        set: PathBuf,
        /// d*, d_*, log, alpha:<q> or polya.
        #[arg(long, default_value = "d*")]
        functional: String,
        #[command(flatten)]
        oracle: Oracle,
        #[arg(long)]
        json: bool,
    },
    /// Whether a set belongs to an ideal.
    Member {
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        ideal: String,
        #[command(flatten)]
        oracle: Oracle,
        #[arg(long)]
        json: bool,
    },
    /// The ideal limit of a sequence.
    Limit {
        #[arg(long)]
        seq: PathBuf,
        #[arg(long)]
        ideal: String,
        #[arg(long)]
        json: bool,
    },
    /// Ideal cluster points Γ and limit points Λ.
    Cluster {
        #[arg(long)]
        seq: PathBuf,
        #[arg(long)]
        ideal: String,
        #[arg(long)]
        json: bool,
    },
    /// Split x into y + z with y convergent and z supported on a small set.
    Decompose {
        #[arg(long)]
        seq: PathBuf,
        #[arg(long)]
        ideal: String,
        /// Defaults to the ideal limit.
        #[arg(long)]
        limit: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Run one catalog check, or `all`.
    Check {
        id: String,
        #[arg(long)]
        trials: Option<u64>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
}

enum Fail {
    Usage(String),
    Undecidable(String),
    Precondition(String),
    Check(String),
}

impl Fail {
    fn code(&self) -> u8 {
        match self {
            Fail::Usage(_) => 2,
            Fail::Undecidable(_) => 3,
            Fail::Precondition(_) => 4,
            Fail::Check(_) => 5,
        }
    }
}

impl From<SetError> for Fail {
    fn from(e: SetError) -> Self {
        match e {
            SetError::Schema(_) | SetError::Invalid(_) => Fail::Usage(e.to_string()),
            SetError::FiniteSetExhausted { .. } => Fail::Precondition(e.to_string()),
            SetError::Unsupported(_) | SetError::Overflow => Fail::Undecidable(e.to_string()),
        }
    }
}

impl From<IdealError> for Fail {
    fn from(e: IdealError) -> Self {
        match e {
            IdealError::UnknownIdeal(_) => Fail::Usage(e.to_string()),
            IdealError::Undecidable(_) | IdealError::UnsupportedFamily(_) => Fail::Undecidable(e.to_string()),
            _ => Fail::Precondition(e.to_string()),
        }
    }
}

impl From<SeqError> for Fail {
    fn from(e: SeqError) -> Self {
        match e {
            SeqError::Set(e) => e.into(),
            SeqError::Ideal(e) => e.into(),
            SeqError::Schema(_) | SeqError::Invalid(_) => Fail::Usage(e.to_string()),
            SeqError::Undecidable(_) | SeqError::Unsupported(_) => Fail::Undecidable(e.to_string()),
            SeqError::NotConvergent(_) | SeqError::HypothesisViolated(_) | SeqError::Precondition(_) => {
                Fail::Precondition(e.to_string())
            }
        }
    }
}

impl From<DensityError> for Fail {
    fn from(e: DensityError) -> Self {
        Fail::Usage(e.to_string())
    }
}

impl From<CheckError> for Fail {
    fn from(e: CheckError) -> Self {
        Fail::Usage(e.to_string())
    }
}

fn read_json(path: &Path) -> Result<Value, Fail> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Fail::Usage(format!("stdin: {e}")))?;
        s
    } else {
        fs::read_to_string(path).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))?
    };
    serde_json::from_str(&text).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))
}

/// An instance file may wrap the object under `key` or be the object itself.
fn unwrap_key<'a>(v: &'a Value, key: &str) -> &'a Value {
    v.get(key).unwrap_or(v)
}

fn ideal(name: &str) -> Result<IdealDesc, Fail> {
    name.parse().map_err(|e: IdealError| Fail::Usage(e.to_string()))
}

fn oracle(o: &Oracle) -> Result<OracleConfig, Fail> {
    let cfg = OracleConfig { budget: o.budget, checkpoints: o.checkpoints.parse::<Checkpoints>()?, ..Default::default() };
    cfg.validate()?;
    Ok(cfg)
}

fn rational(s: &str) -> Result<Q, Fail> {
    parse_q(s).map_err(|e| Fail::Usage(e.to_string()))
}

fn emit(json: bool, v: &Value, human: String) {
    if json {
        println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
    } else {
        println!("{human}");
    }
}

fn cmd_density(set: &Path, functional: &str, o: &Oracle, as_json: bool) -> Result<(), Fail> {
    let s = NatSet::from_json(unwrap_key(&read_json(set)?, "set"))?;
    let cfg = oracle(o)?;
    let report = density::by_name(&s, functional, &cfg)?;
    let mut v = report.to_json();
    v["functional"] = json!(functional);
    emit(as_json, &v, report.to_string());
    Ok(())
}

fn cmd_member(set: &Path, name: &str, o: &Oracle, as_json: bool) -> Result<(), Fail> {
    let s = NatSet::from_json(unwrap_key(&read_json(set)?, "set"))?;
    let i = ideal(name)?;
    let m = member(&i, &s, &oracle(o)?)?;
    let human = format!("{} {} {}", s.describe(), if m { "∈" } else { "∉" }, i.name());
    emit(as_json, &json!({"ideal": i.name(), "member": m}), human);
    Ok(())
}

fn load_seq(path: &Path) -> Result<SymSeq, Fail> {
    Ok(SymSeq::from_json(unwrap_key(&read_json(path)?, "sequence"))?)
}

fn cmd_limit(seq: &Path, name: &str, as_json: bool) -> Result<(), Fail> {
    let x = load_seq(seq)?;
    let i = ideal(name)?;
    let rep = ideal_lim(&x, &i)?;
    let certs: Vec<Value> = rep
        .certificates
        .iter()
        .map(|c| {
            json!({
                "center": format_q(&c.center),
                "eps": format_q(&c.eps),
                "set": exact_json(&c.set),
                "inIdeal": c.in_ideal,
            })
        })
        .collect();
    let v = json!({
        "ideal": i.name(),
        "limit": rep.limit.as_ref().map(format_q),
        "reason": rep.reason,
        "certificates": certs,
    });
    match &rep.limit {
        Some(l) => {
            emit(as_json, &v, format_q(l));
            Ok(())
        }
        None => {
            let why = rep.reason.unwrap_or_default();
            if as_json {
                emit(true, &v, String::new());
            }
            Err(Fail::Precondition(format!("not convergent along {}: {why}", i.name())))
        }
    }
}

fn cluster_json(r: &ClusterReport) -> Value {
    json!({
        "points": r.points.iter().map(format_q).collect::<Vec<_>>(),
        "exact": r.exact,
        "divergent": r.divergent.as_ref().map(|d| json!({"support": exact_json(&d.support), "inIdeal": d.in_ideal})),
    })
}

fn cmd_cluster(seq: &Path, name: &str, as_json: bool) -> Result<(), Fail> {
    let x = load_seq(seq)?;
    let i = ideal(name)?;
    let gamma = cluster_points(&x, &i)?;
    let lambda = limit_points(&x, &i)?;
    let mut human = format!("Γ = {{{}}}, Λ = {{{}}}", join_q(&gamma.points), join_q(&lambda.points));
    if let Some(d) = &gamma.divergent {
        let tag = if d.in_ideal { "in the ideal" } else { "positive" };
        human += &format!(", divergent mass: {} ({}-{tag})", d.support, i.name());
    }
    let v = json!({"ideal": i.name(), "gamma": cluster_json(&gamma), "lambda": cluster_json(&lambda)});
    emit(as_json, &v, human);
    Ok(())
}

fn cmd_decompose(seq: &Path, name: &str, limit: Option<&str>, out: Option<&Path>, as_json: bool) -> Result<(), Fail> {
    let doc = read_json(seq)?;
    let i = ideal(name)?;
    let limit = limit.map(rational).transpose()?;
    let (v, summary) = if let Some(d) = doc.get("doubleSequence") {
        let x = DoubleSeq::from_json(d)?;
        let l = match limit {
            Some(l) => l,
            None => double_limit(&x, &i)?,
        };
        let dd = decompose_double(&x, &l)?;
        let v = json!({
            "limit": format_q(&l),
            "y": dd.y.to_json(),
            "z": dd.z.to_json(),
            "zSupport": serde_json::to_value(&dd.z_support).expect("serializable"),
        });
        (v, format!("y → {} along pr, support of z in zpr", format_q(&l)))
    } else {
        let x = SymSeq::from_json(unwrap_key(&doc, "sequence"))?;
        let l = match limit {
            Some(l) => l,
            None => ideal_lim(&x, &i)?.limit.ok_or_else(|| {
                Fail::Precondition(format!("not convergent: no {}-limit to decompose against", i.name()))
            })?,
        };
        let d = decompose(&x, &i, &l)?;
        let v = json!({
            "limit": format_q(&l),
            "y": d.y.to_json(),
            "z": d.z.to_json(),
            "zSupport": exact_json(&d.z_support),
        });
        (v, format!("y → {}, support of z = {} in {}", format_q(&l), d.z_support, i.name()))
    };
    let text = serde_json::to_string_pretty(&v).expect("serializable");
    match out {
        Some(p) => {
            fs::write(p, text + "\n").map_err(|e| Fail::Usage(format!("{}: {e}", p.display())))?;
            emit(as_json, &json!({"written": p.display().to_string()}), summary);
        }
        None => println!("{text}"),
    }
    Ok(())
}

/// The value whose off-level set is small along a double ideal.
fn double_limit(x: &DoubleSeq, i: &IdealDesc) -> Result<Q, Fail> {
    let zpr = IdealDesc::density_pr();
    if i != &zpr {
        return Err(Fail::Precondition(format!("double sequences decompose along zpr, not {}", i.name())));
    }
    for v in x.piece_values().chain([x.default_value()]) {
        if x.converges_to(&zpr, v)? {
            return Ok(v.clone());
        }
    }
    Err(Fail::Precondition("not convergent along zpr".into()))
}

fn verdict_line(v: &Verdict) -> String {
    let mut s = format!("{:<10} {:<4} trials={} seed={}", v.id, if v.pass { "pass" } else { "FAIL" }, v.trials, v.seed);
    if let Some(c) = &v.counterexample {
        s += &format!("\n  trial {}: {}\n  {}", c.trial, c.explanation, c.instance);
    }
    s
}

fn cmd_check(id: &str, trials: Option<u64>, seed: u64, as_json: bool) -> Result<(), Fail> {
    let verdicts = if id == "all" {
        if trials.is_some() {
            theorems::catalog().iter().map(|e| theorems::check(e.id, trials, seed)).collect::<Result<Vec<_>, _>>()?
        } else {
            theorems::run_all(seed)
        }
    } else {
        vec![theorems::check(id, trials, seed)?]
    };
    let v = Value::Array(verdicts.iter().map(Verdict::to_json).collect());
    emit(as_json, &v, verdicts.iter().map(verdict_line).collect::<Vec<_>>().join("\n"));
    let failed: Vec<&str> = verdicts.iter().filter(|v| !v.pass).map(|v| v.id.as_str()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Fail::Check(format!("failing: {}", failed.join(", "))))
    }
}

fn run(cli: Cli) -> Result<(), Fail> {
    match cli.cmd {
        Cmd::Density { set, functional, oracle, json } => cmd_density(&set, &functional, &oracle, json),
        Cmd::Member { set, ideal, oracle, json } => cmd_member(&set, &ideal, &oracle, json),
        Cmd::Limit { seq, ideal, json } => cmd_limit(&seq, &ideal, json),
        Cmd::Cluster { seq, ideal, json } => cmd_cluster(&seq, &ideal, json),
        Cmd::Decompose { seq, ideal, limit, out, json } => {
            cmd_decompose(&seq, &ideal, limit.as_deref(), out.as_deref(), json)
        }
        Cmd::Check { id, trials, seed, json } => cmd_check(&id, trials, seed, json),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (Fail::Usage(m) | Fail::Undecidable(m) | Fail::Precondition(m) | Fail::Check(m)) = &f;
            eprintln!("error: {m}");
            ExitCode::from(f.code())
        }
    }
}
