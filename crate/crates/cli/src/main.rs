//! `rectiform`: load a scene file, analyse curves and verify the conformal
//! transformation laws.
//!
//! Exit codes: 0 success, 1 check failure, 2 input error, 3 numerical degeneracy.

mod analyze;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rectiform::theorems::{run_checks, CheckSpec};
use rectiform::{Error, Scene, TheoremId};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "rectiform", version, about = "Rectifying curves under conformal maps of surfaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-sample curve table: curvature, torsion, normal and geodesic curvature, rectifying split.
    Analyze(AnalyzeArgs),
    /// Run the scene's checks and emit deviation reports.
    Verify(VerifyArgs),
    /// Dilation field and classification of each conformal pair.
    PairInfo(PairInfoArgs),
    /// Fundamental forms and Christoffel symbols on a sample grid.
    SurfaceInfo(SurfaceInfoArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct Output {
    /// Write files into this directory instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct AnalyzeArgs {
    scene: PathBuf,
    #[arg(long)]
    curve: String,
    #[arg(long, default_value_t = 64)]
    samples: usize,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct VerifyArgs {
    scene: PathBuf,
    /// Theorem id to run, or `all`.
    #[arg(long, default_value = "all")]
    check: String,
    #[arg(long)]
    pair: Option<String>,
    #[arg(long)]
    curve: Option<String>,
    /// Override every selected check's sample count.
    #[arg(long)]
    samples: Option<usize>,
    /// Override every selected check's tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Count documented formula discrepancies as failures.
    #[arg(long)]
    strict: bool,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct PairInfoArgs {
    scene: PathBuf,
    #[arg(long)]
    pair: Option<String>,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct SurfaceInfoArgs {
    scene: PathBuf,
    #[arg(long)]
    surface: Option<String>,
    /// Grid points per chart axis.
    #[arg(long, default_value_t = 3)]
    samples: usize,
    #[command(flatten)]
    out: Output,
}

struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
    pointer: Option<String>,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure {
            code: 2,
            kind: "usage",
            message: message.into(),
            pointer: None,
        }
    }

    fn io(path: &Path, e: std::io::Error) -> Failure {
        Failure {
            code: 2,
            kind: "io",
            message: format!("{}: {e}", path.display()),
            pointer: None,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let numerical = e.is_numerical();
        Failure {
            code: if numerical { 3 } else { 2 },
            kind: if numerical { "numerical" } else { "input" },
            pointer: e.pointer().map(str::to_string),
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let first = e.to_string();
            let message = first.lines().next().unwrap_or_default().trim_start_matches("error: ");
            return report(Failure::usage(message));
        }
    };
    let result = match cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Verify(a) => verify(a),
        Command::PairInfo(a) => pair_info(a),
        Command::SurfaceInfo(a) => surface_info(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => report(f),
    }
}

fn report(f: Failure) -> ExitCode {
    let mut diag = json!({ "error": f.kind, "exit_code": f.code, "message": f.message });
    if let Some(p) = f.pointer {
        diag["pointer"] = Value::String(p);
    }
    eprintln!("{diag}");
    ExitCode::from(f.code)
}

fn load(path: &Path) -> Result<Scene, Failure> {
    Ok(Scene::load(path)?)
}

/// Writes `body` to `dir/name` or, without a directory, to standard output.
fn emit(dir: Option<&Path>, name: &str, body: &str) -> Result<(), Failure> {
    match dir {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))?;
            let path = dir.join(name);
            std::fs::write(&path, body).map_err(|e| Failure::io(&path, e))
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(body.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Failure::io(Path::new("<stdout>"), e))
        }
    }
}

fn pretty(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

fn analyze(a: AnalyzeArgs) -> Result<u8, Failure> {
    let scene = load(&a.scene)?;
    let curve = scene
        .curve(&a.curve)
        .ok_or_else(|| Failure::usage(format!("no curve named {:?}", a.curve)))?;
    let rows = analyze::rows(curve, a.samples).map_err(|(k, e)| {
        let mut f = Failure::from(e);
        f.message = format!("sample {k}: {}", f.message);
        f
    })?;
    let flagged = rows.iter().filter(|r| r.flagged()).count();
    let mut summary = json!({
        "curve": a.curve,
        "surface": scene.curve_surface(&a.curve),
        "samples": rows.len(),
        "length": curve.length(),
        "flagged": flagged,
        "is_rectifying": Value::Null,
        "chen": Value::Null,
    });
    if flagged == 0 {
        let dec = curve.rectifying_decompose(a.samples).map_err(Failure::from)?;
        summary["is_rectifying"] = json!(dec.is_rectifying);
        summary["max_alpha_dot_n"] = json!(dec.max_residual);
        summary["chen"] = json!(dec.chen);
        summary["reconstruction_error"] = json!(dec.reconstruction_error);
    }
    let dir = a.out.output.as_deref();
    match a.out.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            emit(dir, &format!("{}.csv", a.curve), &csv_text(&analyze::COLUMNS, rows.iter().map(|r| r.record())))?;
            if dir.is_some() {
                emit(dir, &format!("{}.summary.json", a.curve), &pretty(&summary))?;
            }
        }
        Format::Json => {
            emit(dir, &format!("{}.json", a.curve), &pretty(&json!({ "summary": summary, "rows": rows })))?;
        }
    }
    Ok(if flagged > 0 { 3 } else { 0 })
}

fn verify(a: VerifyArgs) -> Result<u8, Failure> {
    let scene = load(&a.scene)?;
    let theorem = match a.check.as_str() {
        "all" => None,
        s => Some(s.parse::<TheoremId>().map_err(Failure::usage)?),
    };
    let selected: Vec<CheckSpec> = scene
        .checks()
        .iter()
        .filter(|c| theorem.is_none_or(|t| c.theorem == t))
        .filter(|c| a.pair.as_ref().is_none_or(|p| &c.pair == p))
        .filter(|c| a.curve.is_none() || c.curve == a.curve)
        .map(|c| {
            let mut c = c.clone();
            if let Some(t) = a.tol {
                c.tol = t;
            }
            if let Some(n) = a.samples {
                c.samples = n;
            }
            c
        })
        .collect();
    if selected.is_empty() {
        return Err(Failure::usage("no check in the scene matches the selection"));
    }
    let reports = run_checks(&scene, &selected);
    let dir = a.out.output.as_deref();
    match a.out.format.unwrap_or(Format::Json) {
        Format::Json => emit(dir, "reports.json", &pretty(&reports))?,
        Format::Csv => {
            let header = [
                "theorem_id",
                "pair",
                "curve",
                "samples",
                "residual_max",
                "residual_mean",
                "tol",
                "verdict",
            ];
            let rows = reports.iter().map(|r| {
                vec![
                    r.theorem_id.to_string(),
                    r.pair.clone(),
                    r.curve.clone().unwrap_or_default(),
                    r.samples.to_string(),
                    format!("{:.16e}", r.residual_max),
                    format!("{:.16e}", r.residual_mean),
                    format!("{:.16e}", r.tol),
                    r.verdict.as_str().to_string(),
                ]
            });
            emit(dir, "reports.csv", &csv_text(&header, rows))?;
        }
    }
    Ok(if reports.iter().all(|r| r.passed(a.strict)) { 0 } else { 1 })
}

fn pair_info(a: PairInfoArgs) -> Result<u8, Failure> {
    let scene = load(&a.scene)?;
    if let Some(p) = &a.pair {
        if scene.pair(p).is_none() {
            return Err(Failure::usage(format!("no pair named {p:?}")));
        }
    }
    let mut out = BTreeMap::new();
    for (name, pair) in scene.pairs() {
        if a.pair.as_ref().is_some_and(|p| p != name) {
            continue;
        }
        let s = pair.summary();
        let capabilities: Vec<&str> = if pair.is_ambient() {
            vec!["metric", "T1_RECTIFYING_IMAGE", "TANGENTIAL"]
        } else {
            vec!["metric"]
        };
        out.insert(
            name.clone(),
            json!({
                "mode": pair.mode_name(),
                "source": scene.pair_source(name),
                "image": pair.image().components().iter().map(|e| e.to_string()).collect::<Vec<_>>(),
                "classification": pair.classification(),
                "lambda_min": s.lambda_min,
                "lambda_max": s.lambda_max,
                "conformality_residual": s.residual,
                "worst_point": [s.worst.0, s.worst.1],
                "grid": pair.options().grid,
                "user_lambda": pair.user_lambda().map(|(e, err)| json!({ "expr": e.to_string(), "max_rel_error": err })),
                "capabilities": capabilities,
            }),
        );
    }
    let dir = a.out.output.as_deref();
    match a.out.format.unwrap_or(Format::Json) {
        Format::Json => emit(dir, "pairs.json", &pretty(&out))?,
        Format::Csv => {
            let header = ["pair", "mode", "classification", "lambda_min", "lambda_max", "conformality_residual"];
            let rows = out.iter().map(|(name, v)| {
                vec![
                    name.clone(),
                    v["mode"].as_str().unwrap_or_default().to_string(),
                    v["classification"]["kind"].as_str().unwrap_or_default().to_string(),
                    format!("{:.16e}", v["lambda_min"].as_f64().unwrap_or(f64::NAN)),
                    format!("{:.16e}", v["lambda_max"].as_f64().unwrap_or(f64::NAN)),
                    format!("{:.16e}", v["conformality_residual"].as_f64().unwrap_or(f64::NAN)),
                ]
            });
            emit(dir, "pairs.csv", &csv_text(&header, rows))?;
        }
    }
    Ok(0)
}

fn surface_info(a: SurfaceInfoArgs) -> Result<u8, Failure> {
    let scene = load(&a.scene)?;
    if let Some(s) = &a.surface {
        if scene.surface(s).is_none() {
            return Err(Failure::usage(format!("no surface named {s:?}")));
        }
    }
    let mut out = BTreeMap::new();
    let mut table = Vec::new();
    for (name, patch) in scene.surfaces() {
        if a.surface.as_ref().is_some_and(|s| s != name) {
            continue;
        }
        let mut points = Vec::new();
        for (u, v) in patch.domain().grid(a.samples) {
            let forms = patch.fundamental_forms(u, v)?;
            let gamma = patch.christoffel(u, v)?;
            let mut rec = vec![name.clone(), format!("{u:.16e}"), format!("{v:.16e}")];
            rec.extend([forms.e, forms.f, forms.g, forms.l, forms.m, forms.n, forms.w].map(|x| format!("{x:.16e}")));
            rec.extend(gamma.to_array().map(|x| format!("{x:.16e}")));
            table.push(rec);
            points.push(json!({ "u": u, "v": v, "forms": forms, "christoffel": gamma }));
        }
        out.insert(
            name.clone(),
            json!({
                "components": patch.components().iter().map(|e| e.to_string()).collect::<Vec<_>>(),
                "domain": patch.domain(),
                "monge": patch.is_monge(),
                "points": points,
            }),
        );
    }
    let dir = a.out.output.as_deref();
    match a.out.format.unwrap_or(Format::Json) {
        Format::Json => emit(dir, "surfaces.json", &pretty(&out))?,
        Format::Csv => {
            let header = [
                "surface", "u", "v", "E", "F", "G", "L", "M", "N", "W", "G1_11", "G2_11", "G1_12", "G2_12", "G1_22",
                "G2_22",
            ];
            emit(dir, "surfaces.csv", &csv_text(&header, table))?;
        }
    }
    Ok(0)
}
