//! Command-line front end. Every command reads JSON files and writes one JSON
//! report (stdout, or `--output`). Errors go to stderr as `{"error": …}` with
//! exit code 2 for invalid input and 1 for internal failures.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::channel::{self, CodeBook, NoiseKind, NoiseModel, Schedule};
use crate::codec::{self, Ensemble, LosslessCode, VectorFile};
use crate::error::{Error, Result};
use crate::oracle;
use crate::prefix::{self, PrefixBasis};
use crate::qstring::{BitString, QubitString, EPS};

#[derive(Parser, Debug)]
#[command(
    name = "qprefix",
    version,
    about = "Quantum prefix codes and lossless compression"
)]
struct Cli {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check prefix-freedom and the Kraft chain of a set of qubit strings.
    Verify {
        #[arg(long)]
        basis: PathBuf,
    },
    /// Optimal lossless rate of an ensemble.
    Rate {
        #[arg(long)]
        ensemble: PathBuf,
        /// List every distinct sequential projection with its score.
        #[arg(long)]
        all_projections: bool,
        /// Also write the optimal code to this file.
        #[arg(long)]
        code_out: Option<PathBuf>,
    },
    /// Encode an ambient vector with a code file.
    Encode {
        #[arg(long)]
        code: PathBuf,
        #[arg(long)]
        vector: PathBuf,
    },
    /// Decode a qubit string with a code file.
    Decode {
        #[arg(long)]
        code: PathBuf,
        #[arg(long)]
        qstring: PathBuf,
    },
    /// Monte Carlo simulation of the always-open channel.
    Simulate {
        #[arg(long)]
        code: PathBuf,
        #[arg(long)]
        message: PathBuf,
        #[command(flatten)]
        noise: NoiseArgs,
        #[arg(long)]
        lmax: usize,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
    /// Compare delivery rates of two classical code books under noise.
    Compare {
        #[arg(long = "bookA")]
        book_a: PathBuf,
        #[arg(long = "bookB")]
        book_b: PathBuf,
        #[arg(long)]
        dist: PathBuf,
        #[command(flatten)]
        noise: NoiseArgs,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
    /// Brute-force rate and length assignment.
    Oracle {
        #[arg(long)]
        ensemble: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum KindArg {
    None,
    Bitflip,
    Phaseflip,
    Depolarizing,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ScheduleArg {
    Constant,
    Linear,
}

#[derive(clap::Args, Debug)]
struct NoiseArgs {
    #[arg(long, value_enum, default_value_t = KindArg::None)]
    noise: KindArg,
    /// Error probability, or the slope for a linear schedule.
    #[arg(long, default_value_t = 0.0)]
    q: f64,
    #[arg(long, value_enum, default_value_t = ScheduleArg::Constant)]
    schedule: ScheduleArg,
    /// First step (1-based) where noise acts.
    #[arg(long)]
    first_step: Option<usize>,
    /// Last step where noise acts.
    #[arg(long)]
    last_step: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl NoiseArgs {
    fn model(&self, l_max: usize) -> Result<NoiseModel> {
        let kind = match self.noise {
            KindArg::None => NoiseKind::None,
            KindArg::Bitflip => NoiseKind::Bitflip,
            KindArg::Phaseflip => NoiseKind::Phaseflip,
            KindArg::Depolarizing => NoiseKind::Depolarizing,
        };
        let schedule = match self.schedule {
            ScheduleArg::Constant => Schedule::Constant { q: self.q },
            ScheduleArg::Linear => Schedule::Linear { q0: self.q },
        };
        let model = NoiseModel::new(kind, schedule, self.seed)?;
        match (self.first_step, self.last_step) {
            (None, None) => Ok(model),
            (a, b) => model.with_window(a.unwrap_or(1), b.unwrap_or(l_max.max(1))),
        }
    }
}

#[derive(Deserialize)]
struct BasisFile {
    vectors: Vec<QubitString>,
}

#[derive(Deserialize)]
struct DistFile {
    p: Vec<f64>,
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.display().to_string(),
        source,
    })
}

/// A code book file holds `codewords` (as written by `rate --code-out`) or
/// `words`, either as bit strings or as qubit strings.
fn read_book(path: &Path) -> Result<CodeBook> {
    let v: Value = read_json(path)?;
    let words = v
        .get("codewords")
        .or_else(|| v.get("words"))
        .and_then(Value::as_array)
        .ok_or_else(|| {
            Error::InvalidCodeBook(format!("{}: missing \"codewords\" array", path.display()))
        })?;
    let mut strings = Vec::with_capacity(words.len());
    for w in words {
        let q = match w {
            Value::String(s) => QubitString::basis(s.parse::<BitString>()?),
            other => serde_json::from_value(other.clone()).map_err(|source| Error::Json {
                path: path.display().to_string(),
                source,
            })?,
        };
        strings.push(q);
    }
    CodeBook::from_qubit_strings(&strings)
}

/// Rounds floats to 12 digits: decimal places for `|x| ≥ 1`, significant
/// digits below that.
fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or_default();
            let text = if x.abs() >= 1.0 {
                format!("{x:.12}")
            } else {
                format!("{x:.11e}")
            };
            let r: f64 = text.parse().unwrap_or(x);
            if let Some(m) = serde_json::Number::from_f64(r) {
                *n = m;
            }
        }
        Value::Array(xs) => xs.iter_mut().for_each(round_floats),
        Value::Object(m) => m.values_mut().for_each(round_floats),
        _ => {}
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Result<Value> {
    serde_json::to_value(x).map_err(|e| Error::Internal(e.to_string()))
}

fn verify(basis: &Path) -> Result<Value> {
    let file: BasisFile = read_json(basis)?;
    let vectors = file.vectors;
    let check = prefix::is_prefix_free(&vectors);
    let orthonormal = prefix::check_orthonormal(&vectors).is_ok();
    let kraft = if check.prefix_free && orthonormal {
        let chain = prefix::kraft_chain(&PrefixBasis::new(vectors.clone())?);
        Some(json!({
            "sumBase": chain.sum_base,
            "sumAvg": chain.sum_avg,
            "traceTerm": chain.trace_term,
            "values": chain.as_array(),
            "ordered": chain.is_ordered(EPS),
            "tight": chain.is_tight(EPS),
        }))
    } else {
        None
    };
    let distinguishable = match prefix::distinguishable_by_prefix(&vectors) {
        Ok(b) => Value::Bool(b),
        // only defined for orthonormal length eigenvectors within the dense cap
        Err(
            Error::FragmentTooLarge(_)
            | Error::NotLengthEigenvector(_)
            | Error::NotOrthonormal { .. }
            | Error::RegisterTooSmall { .. },
        ) => Value::Null,
        Err(e) => return Err(e),
    };
    Ok(json!({
        "command": "verify",
        "config": { "basis": basis.display().to_string(), "vectors": vectors.len() },
        "prefixFree": check.prefix_free,
        "witness": check.witness,
        "orthonormal": orthonormal,
        "kraft": kraft,
        "distinguishableByPrefix": distinguishable,
    }))
}

fn rate(path: &Path, all: bool, code_out: Option<&Path>) -> Result<Value> {
    let e: Ensemble = read_json(path)?;
    let code = codec::build_code(&e)?;
    let mut report = json!({
        "command": "rate",
        "config": { "ensemble": path.display().to_string(), "allProjections": all },
        "states": e.len(),
        "dimension": e.dimension(),
        "spanDimension": e.span_dimension(),
        "shannonEntropy": codec::shannon_entropy(&e.probabilities())?,
        "rate": code.rate(),
        "projection": code.projection(),
        "lengths": code.lengths(),
        "codewords": code.codewords(),
    });
    if all {
        report["projections"] = to_value(&codec::scored_projections(&e)?)?;
    }
    if let Some(out) = code_out {
        write_text(
            out,
            &serde_json::to_string_pretty(&code).map_err(|e| Error::Internal(e.to_string()))?,
        )?;
        report["config"]["codeOut"] = Value::String(out.display().to_string());
    }
    Ok(report)
}

fn encode(code: &Path, vector: &Path) -> Result<Value> {
    let c: LosslessCode = read_json(code)?;
    let v: VectorFile = read_json(vector)?;
    let q = c.encode(&v.to_ket())?;
    let base = q.base_length()?;
    let avg = q.avg_length().ok();
    Ok(json!({
        "command": "encode",
        "config": { "code": code.display().to_string(), "vector": vector.display().to_string() },
        "qstring": q,
        "baseLength": base,
        "avgLength": avg,
    }))
}

fn decode(code: &Path, qstring: &Path) -> Result<Value> {
    let c: LosslessCode = read_json(code)?;
    let q: QubitString = read_json(qstring)?;
    let v = c.decode(&q)?;
    Ok(json!({
        "command": "decode",
        "config": { "code": code.display().to_string(), "qstring": qstring.display().to_string() },
        "vector": VectorFile::from_ket(&v).amps,
    }))
}

fn simulate(
    code: &Path,
    message: &Path,
    noise: &NoiseArgs,
    l_max: usize,
    trials: usize,
) -> Result<Value> {
    let book = read_book(code)?;
    let msg: QubitString = read_json(message)?;
    let model = noise.model(l_max)?;
    let report = channel::run(&msg, &book, l_max, &model, trials)?;
    let mut v = to_value(&report)?;
    v["command"] = json!("simulate");
    v["config"] = json!({
        "code": code.display().to_string(),
        "message": message.display().to_string(),
        "lmax": l_max,
        "trials": trials,
        "seed": model.seed,
    });
    Ok(v)
}

fn compare(a: &Path, b: &Path, dist: &Path, noise: &NoiseArgs, trials: usize) -> Result<Value> {
    let book_a = read_book(a)?;
    let book_b = read_book(b)?;
    let d: DistFile = read_json(dist)?;
    let model = noise.model(book_a.max_len().max(book_b.max_len()))?;
    let report = channel::compare_codes(&d.p, &book_a, &book_b, &model, trials)?;
    let mut v = to_value(&report)?;
    v["command"] = json!("compare");
    v["config"] = json!({
        "bookA": a.display().to_string(),
        "bookB": b.display().to_string(),
        "dist": dist.display().to_string(),
        "trials": trials,
        "seed": model.seed,
    });
    Ok(v)
}

fn oracle_cmd(path: &Path) -> Result<Value> {
    let e: Ensemble = read_json(path)?;
    let r = oracle::rate_bruteforce(&e)?;
    let mut v = to_value(&r)?;
    v["command"] = json!("oracle");
    v["config"] = json!({ "ensemble": path.display().to_string() });
    Ok(v)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, format!("{text}\n")).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn execute(cli: &Cli) -> Result<()> {
    let mut report = match &cli.command {
        Command::Verify { basis } => verify(basis)?,
        Command::Rate {
            ensemble,
            all_projections,
            code_out,
        } => rate(ensemble, *all_projections, code_out.as_deref())?,
        Command::Encode { code, vector } => encode(code, vector)?,
        Command::Decode { code, qstring } => decode(code, qstring)?,
        Command::Simulate {
            code,
            message,
            noise,
            lmax,
            trials,
        } => simulate(code, message, noise, *lmax, *trials)?,
        Command::Compare {
            book_a,
            book_b,
            dist,
            noise,
            trials,
        } => compare(book_a, book_b, dist, noise, *trials)?,
        Command::Oracle { ensemble } => oracle_cmd(ensemble)?,
    };
    round_floats(&mut report);
    let text = serde_json::to_string_pretty(&report).map_err(|e| Error::Internal(e.to_string()))?;
    match &cli.output {
        Some(p) => write_text(p, &text),
        None => {
            use std::io::Write;
            // a closed pipe downstream is not our failure
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            Ok(())
        }
    }
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", json!({ "error": e.to_string() }));
            if e.is_validation() {
                2
            } else {
                1
            }
        }
    }
}
