use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use thiserror::Error;

use zcancel_core::blowups::extended_graph;
use zcancel_core::cancellation::{cylinders_isomorphic, generate_family, zariski_status};
use zcancel_core::covering::{cover_order, dpd_cover, hj_string, singularity_type};
use zcancel_core::equations::{classify, mm_classify, verify_witness};
use zcancel_core::invariants::report;
use zcancel_core::stretching::stretch;
use zcancel_core::{
    Classification, CylinderVerdict, DanielewskiForm, DpdDivisor, GraphDivisor, MmForm, MmOutcome, Mode, StretchSpec,
};

#[derive(Parser)]
#[command(name = "zcancel", version, about = "Cancellation questions for A1-fibered affine surfaces")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Dot,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum EqFamily {
    /// Danielewski forms `z^m t - g(z, u) = 0`.
    Gdw,
    /// Masuda-Miyanishi forms `z^m t - g(z, u) - 1 = 0`.
    Mm,
}

#[derive(Subcommand)]
enum Command {
    /// Invariants and Zariski status of a graph divisor.
    Analyze {
        path: PathBuf,
        /// Multiplicity data, e.g. "p1:1/2,p2:3/4".
        #[arg(long)]
        dpd: Option<String>,
    },
    /// Decide whether the cylinders over two divisors are isomorphic.
    Compare {
        first: PathBuf,
        second: PathBuf,
        #[arg(long)]
        over_base: bool,
        #[arg(long)]
        equivariant: bool,
    },
    /// Insert chains into the fibers of a divisor.
    Stretch {
        path: PathBuf,
        /// e.g. "b1:level=top,a=3;b2:level=-1,a=2"
        #[arg(long)]
        stretch: String,
    },
    /// Members 1..=k of the non-cancellation family of a divisor.
    Family {
        path: PathBuf,
        #[arg(long)]
        k: u64,
    },
    /// Compare two equations up to the normal-form group action.
    ClassifyEq {
        first: PathBuf,
        second: PathBuf,
        #[arg(long, value_enum, default_value_t = EqFamily::Gdw)]
        family: EqFamily,
    },
    /// Cyclic cover of a DPD divisor.
    Cover {
        #[arg(long)]
        dpd: String,
    },
    /// Hirzebruch-Jung string of the quotient singularity of type (n, q).
    Hj { n: u64, q: u64 },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{}: {source}", .path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", .path.display())]
    Input { path: PathBuf, source: zcancel_core::Error },
    #[error(transparent)]
    Core(#[from] zcancel_core::Error),
    #[error("{0}")]
    Usage(String),
}

/// A rendered answer and whether it was decisive.
struct Answer {
    body: String,
    decided: bool,
}

impl Answer {
    fn decided(body: String) -> Self {
        Answer { body, decided: true }
    }

    fn unknown(body: String) -> Self {
        Answer { body, decided: false }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load_divisor(path: &Path) -> Result<GraphDivisor, CliError> {
    let d = GraphDivisor::from_json(&read(path)?).map_err(|source| CliError::Input {
        path: path.to_path_buf(),
        source,
    })?;
    d.check().map_err(|source| CliError::Input {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(d)
}

fn load<T>(path: &Path, parse: impl Fn(&str) -> zcancel_core::Result<T>) -> Result<T, CliError> {
    parse(&read(path)?).map_err(|source| CliError::Input {
        path: path.to_path_buf(),
        source,
    })
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

fn no_dot(command: &str) -> CliError {
    CliError::Usage(format!("`{command}` has no DOT output"))
}

fn analyze(path: &Path, dpd: Option<&str>, format: Format) -> Result<Answer, CliError> {
    let d = load_divisor(path)?;
    let dpd = dpd.map(str::parse::<DpdDivisor>).transpose()?;
    if format == Format::Dot {
        return Ok(Answer::decided(extended_graph(&d).to_dot()));
    }
    let r = report(&d, dpd.as_ref())?;
    let status = zariski_status(&d, dpd.as_ref());
    let decided = status.kind != zcancel_core::ZariskiKind::Unknown;
    let body = match format {
        Format::Text => {
            let mut s = String::new();
            let rho = r.picard_number.map_or("undefined".to_string(), |x| x.to_string());
            let _ = writeln!(s, "vertices: {}", r.vertex_count);
            let _ = writeln!(s, "picard number: {rho}");
            let _ = writeln!(s, "class group: {}", serde_json::to_string(&r.class_group).unwrap_or_default());
            let _ = writeln!(s, "status: {:?} ({})", status.kind, status.citation);
            for f in &r.fibers {
                let _ = writeln!(
                    s,
                    "fiber {}: height {}, {} components, type {:?}, pseudominimal {}",
                    f.point, f.height, f.components, f.type_sequence, f.pseudominimal
                );
            }
            s
        }
        _ => {
            let mut v = serde_json::to_value(&r).expect("report serializes");
            v["zariski_status"] = serde_json::to_value(&status).expect("status serializes");
            pretty(&v)
        }
    };
    Ok(Answer { body, decided })
}

fn compare(first: &Path, second: &Path, mode: Mode, equivariant: bool, format: Format) -> Result<Answer, CliError> {
    let (d1, d2) = (load_divisor(first)?, load_divisor(second)?);
    let verdict = match cylinders_isomorphic(&d1, &d2, mode, equivariant) {
        CylinderVerdict::Yes(c) if !c.check(mode, equivariant) => {
            CylinderVerdict::Unknown("certificate failed its re-check".into())
        }
        v => v,
    };
    let body = match format {
        Format::Dot => return Err(no_dot("compare")),
        Format::Text => match &verdict {
            CylinderVerdict::Yes(c) => format!("yes: {}\n", c.citation),
            CylinderVerdict::No(s) => format!("no: {} differs ({} vs {})\n", s.invariant, s.left, s.right),
            CylinderVerdict::Unknown(r) => format!("unknown: {r}\n"),
        },
        Format::Json => pretty(&verdict.to_value()),
    };
    Ok(match verdict {
        CylinderVerdict::Unknown(_) => Answer::unknown(body),
        _ => Answer::decided(body),
    })
}

fn run_stretch(path: &Path, spec: &str, format: Format) -> Result<Answer, CliError> {
    let d = load_divisor(path)?;
    let spec: StretchSpec = spec.parse()?;
    let out = stretch(&d, &spec)?;
    Ok(Answer::decided(match format {
        Format::Dot => extended_graph(&out).to_dot(),
        _ => pretty(&out.to_value()),
    }))
}

fn family(path: &Path, k: u64, format: Format) -> Result<Answer, CliError> {
    let d = load_divisor(path)?;
    let members = generate_family(&d, k)?;
    let mut out = Vec::new();
    let mut text = String::new();
    for m in &members {
        let certificate = match cylinders_isomorphic(&d, &m.divisor, Mode::OverBase, false) {
            CylinderVerdict::Yes(c) if c.check(Mode::OverBase, false) => c.to_value(),
            _ if m.certificate.check(Mode::OverBase, false) => m.certificate.to_value(),
            _ => return Err(CliError::Usage(format!("member {} has no valid certificate", m.j))),
        };
        let _ = writeln!(text, "member {}: {} vertices", m.j, m.vertex_count);
        out.push(json!({
            "j": m.j,
            "vertex_count": m.vertex_count,
            "divisor": m.divisor.to_value(),
            "certificate": certificate,
        }));
    }
    Ok(Answer::decided(match format {
        Format::Dot => return Err(no_dot("family")),
        Format::Text => text,
        Format::Json => pretty(&Value::Array(out)),
    }))
}

fn classify_eq(first: &Path, second: &Path, family: EqFamily, format: Format) -> Result<Answer, CliError> {
    if format == Format::Dot {
        return Err(no_dot("classify-eq"));
    }
    let (value, text, decided) = match family {
        EqFamily::Gdw => {
            let g = load(first, DanielewskiForm::parse)?;
            let h = load(second, DanielewskiForm::parse)?;
            match classify(&g, &h) {
                Classification::Isomorphic(w) if verify_witness(&g, &h, &w) => (
                    json!({ "verdict": "isomorphic", "witness": w.to_value() }),
                    format!("isomorphic: {w}\n"),
                    true,
                ),
                Classification::Isomorphic(_) => (
                    json!({ "verdict": "unknown", "reason": "witness failed its re-check" }),
                    "unknown: witness failed its re-check\n".to_string(),
                    false,
                ),
                Classification::NotIsomorphic(r) => (
                    json!({ "verdict": "not-isomorphic", "reason": r }),
                    format!("not isomorphic: {r}\n"),
                    true,
                ),
                Classification::Unknown(r) => {
                    (json!({ "verdict": "unknown", "reason": r }), format!("unknown: {r}\n"), false)
                }
            }
        }
        EqFamily::Mm => {
            let g = load(first, MmForm::parse)?;
            let h = load(second, MmForm::parse)?;
            match mm_classify(&g, &h) {
                MmOutcome::Isomorphic { lambda } if g.rescaled(&lambda) == h => (
                    json!({ "verdict": "isomorphic", "lambda": lambda.to_string() }),
                    format!("isomorphic: lambda = {lambda}\n"),
                    true,
                ),
                MmOutcome::Isomorphic { .. } => (
                    json!({ "verdict": "unknown", "reason": "rescaling failed its re-check" }),
                    "unknown: rescaling failed its re-check\n".to_string(),
                    false,
                ),
                MmOutcome::NotIsomorphic => (
                    json!({ "verdict": "not-isomorphic" }),
                    "not isomorphic\n".to_string(),
                    true,
                ),
                MmOutcome::Unknown(r) => {
                    (json!({ "verdict": "unknown", "reason": r }), format!("unknown: {r}\n"), false)
                }
            }
        }
    };
    let body = if format == Format::Text { text } else { pretty(&value) };
    Ok(Answer { body, decided })
}

fn cover(dpd: &str, format: Format) -> Result<Answer, CliError> {
    let dpd: DpdDivisor = dpd.parse()?;
    let order = cover_order(&dpd.multiplicities())?;
    let coefficients = dpd_cover(&dpd, order)?;
    let mut points = Vec::new();
    let mut text = format!("cover order: {order}\n");
    for ((point, c), entry) in coefficients.iter().zip(&dpd.entries) {
        let singularity = match singularity_type(entry.e, entry.m) {
            Ok((n, q)) => {
                let s = hj_string(n, q)?;
                let _ = writeln!(text, "{point}: coefficient {c}, singularity ({n},{q}), string {s}");
                json!({ "type": [n, q], "hj": s })
            }
            Err(_) => {
                let _ = writeln!(text, "{point}: coefficient {c}, smooth");
                Value::Null
            }
        };
        points.push(json!({ "point": point, "coefficient": c, "singularity": singularity }));
    }
    Ok(Answer::decided(match format {
        Format::Dot => return Err(no_dot("cover")),
        Format::Text => text,
        Format::Json => pretty(&json!({ "order": order, "points": points })),
    }))
}

fn run(cli: Cli) -> Result<Answer, CliError> {
    let format = cli.format;
    match cli.command {
        Command::Analyze { path, dpd } => analyze(&path, dpd.as_deref(), format),
        Command::Compare {
            first,
            second,
            over_base,
            equivariant,
        } => {
            let mode = if over_base { Mode::OverBase } else { Mode::Abstract };
            compare(&first, &second, mode, equivariant, format)
        }
        Command::Stretch { path, stretch } => run_stretch(&path, &stretch, format),
        Command::Family { path, k } => family(&path, k, format),
        Command::ClassifyEq { first, second, family } => classify_eq(&first, &second, family, format),
        Command::Cover { dpd } => cover(&dpd, format),
        Command::Hj { n, q } => {
            if format == Format::Dot {
                return Err(no_dot("hj"));
            }
            Ok(Answer::decided(format!("{}\n", hj_string(n, q)?)))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(answer) => {
            print!("{}", answer.body);
            if answer.decided {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
