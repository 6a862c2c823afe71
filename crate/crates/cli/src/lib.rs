//! Command-line front end: instance I/O, subcommands and reports.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use hyperlip_core::boxset::{
    default_window, detect_noncontraction, TraceSummary, Verdict, DIAGNOSTIC_WINDOWS,
};
use hyperlip_core::extension::{extend_into_set, kuratowski_embed};
use hyperlip_core::hull::{
    attach_point, enumerate_extremal_grid, extremal_zero_classification, in_delta, is_extremal,
};
use hyperlip_core::lipfun::verify_lipschitz_on_grid;
use hyperlip_core::metric::{check_metric_axioms, ConeDescriptor};
use hyperlip_core::reconstruct::{synthesize_bounds, verify_reconstruction, ReconstructionConfig};
use hyperlip_core::{BoxLipschitzSet, Error, FiniteMetricSpace, LipExpr, Point};

mod plot;
pub mod selftest;

/// Exit code for malformed input or unmet preconditions.
pub const EXIT_INPUT: i32 = 1;
/// Exit code for a failed mathematical contract (stalled iteration, failed
/// verification).
pub const EXIT_CONTRACT: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "hyperlip",
    version,
    about = "Lipschitz retractions in the sup norm"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Retract a point onto a set given by Lipschitz bounds.
    Retract(RetractArgs),
    /// Extend a 1-Lipschitz map from a subset of a finite metric space into a set.
    Extend(ExtendArgs),
    /// Functions on a finite metric space: extremality and grid enumeration.
    #[command(subcommand)]
    Hull(HullCommand),
    /// Rebuild bound functions from inside and outside samples.
    Reconstruct(ReconstructArgs),
    /// Brute-force checks.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Render a planar set, an iteration orbit and cones as SVG.
    Plot(PlotArgs),
    /// Run seeded checks and print a report.
    Selftest(SelftestArgs),
}

#[derive(Args, Debug)]
pub struct RetractArgs {
    #[arg(long)]
    pub set: PathBuf,
    #[arg(long)]
    pub point: PathBuf,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// A point of the set; needed for λ = 1 sets with unbounded bounds.
    #[arg(long)]
    pub witness: Option<PathBuf>,
    #[arg(long)]
    pub max_sweeps: Option<usize>,
    /// Write the displacement trace as CSV.
    #[arg(long)]
    pub trace_csv: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ExtendArgs {
    /// Distance matrix of B.
    #[arg(long, required_unless_present = "instance")]
    pub space: Option<PathBuf>,
    /// Comma-separated indices of A in B.
    #[arg(long, required_unless_present = "instance")]
    pub subset: Option<String>,
    /// Images of the points of A, in the order of --subset.
    #[arg(long, required_unless_present = "instance")]
    pub map: Option<PathBuf>,
    /// `{"metric": ..., "A": [...], "phi": [...]}` in one file.
    #[arg(long, conflicts_with_all = ["space", "subset", "map"])]
    pub instance: Option<PathBuf>,
    #[arg(long)]
    pub set: PathBuf,
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[arg(long)]
    pub witness: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum HullCommand {
    /// List the extremal functions on a grid.
    Enumerate {
        #[arg(long)]
        metric: PathBuf,
        #[arg(long)]
        resolution: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify one function.
    Extremal {
        #[arg(long)]
        metric: PathBuf,
        #[arg(long)]
        function: PathBuf,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Add a point at distances given by a function.
    Attach {
        #[arg(long)]
        metric: PathBuf,
        #[arg(long)]
        function: PathBuf,
    },
    /// Isometric embedding into the sup norm.
    Embed {
        #[arg(long)]
        metric: PathBuf,
        #[arg(long, default_value_t = 0)]
        basepoint: usize,
    },
}

#[derive(Args, Debug)]
pub struct ReconstructArgs {
    /// Points of the set.
    #[arg(long)]
    pub inside: PathBuf,
    /// Points outside the set.
    #[arg(long)]
    pub outside: PathBuf,
    #[arg(long, default_value_t = hyperlip_core::reconstruct::DEFAULT_A)]
    pub a: f64,
    /// Grid on which to compare the result with the samples; a grid point
    /// counts as inside iff it is listed in --inside.
    #[arg(long)]
    pub verify_grid: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum VerifyCommand {
    /// Check |f(y) − f(y′)| ≤ λ‖y − y′‖ on all grid pairs.
    Lipschitz {
        #[arg(long)]
        expr: PathBuf,
        #[arg(long)]
        grid: PathBuf,
        #[arg(long, default_value_t = 1.0)]
        lambda: f64,
    },
    /// Violation of each point.
    Set {
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        points: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        tol: f64,
    },
    /// Metric axioms of a distance matrix.
    Metric {
        #[arg(long)]
        metric: PathBuf,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
}

#[derive(Args, Debug)]
pub struct PlotArgs {
    #[arg(long)]
    pub set: PathBuf,
    /// `xmin,xmax,ymin,ymax`.
    #[arg(long, value_parser = parse_bbox, allow_hyphen_values = true)]
    pub bbox: [f64; 4],
    /// Start of a cyclic iteration orbit to draw.
    #[arg(long)]
    pub start: Option<PathBuf>,
    #[arg(long, default_value_t = 40)]
    pub steps: usize,
    /// JSON list of cones.
    #[arg(long)]
    pub cones: Option<PathBuf>,
    /// Raster cells per side.
    #[arg(long, default_value_t = 200)]
    pub cells: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct SelftestArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_bbox(s: &str) -> Result<[f64; 4], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<_, _>>()?;
    let [x0, x1, y0, y1] = v[..] else {
        return Err("expected xmin,xmax,ymin,ymax".into());
    };
    if !(x0 < x1 && y0 < y1) || v.iter().any(|c| !c.is_finite()) {
        return Err("bounding box must be finite with min < max".into());
    }
    Ok([x0, x1, y0, y1])
}

/// A command failure: exit code, message, and optional JSON detail for stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
    pub detail: Option<Value>,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: message.into(),
            detail: None,
        }
    }

    pub fn contract(message: impl Into<String>, detail: Value) -> Self {
        Failure {
            code: EXIT_CONTRACT,
            message: message.into(),
            detail: Some(detail),
        }
    }

    /// The text written to stderr.
    pub fn render(&self) -> String {
        let mut body = json!({ "error": self.message });
        if let Some(Value::Object(extra)) = &self.detail {
            body.as_object_mut().unwrap().extend(extra.clone());
        }
        serde_json::to_string(&body).unwrap()
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let detail = match &e {
            Error::NotLipschitz {
                first,
                second,
                excess,
            } => Some(json!({ "witness": [first, second], "excess": excess })),
            Error::NotAdmissible { first, second } => Some(json!({ "witness": [first, second] })),
            Error::ConeMeetsSet { exterior, inside } => {
                Some(json!({ "exterior": exterior, "inside": inside }))
            }
            _ => None,
        };
        let code = match e {
            Error::Stalled { .. }
            | Error::MaxSweepsExceeded { .. }
            | Error::ConeMeetsSet { .. }
            | Error::ZeroNotDistanceRow(_) => EXIT_CONTRACT,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
            detail,
        }
    }
}

type CmdResult = Result<(), Failure>;

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serialisable value");
    s.push('\n');
    s
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> CmdResult {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::input(format!("{}: {e}", p.display()))),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| Failure::input(format!("stdout: {e}"))),
    }
}

/// Caps the global thread pool from `HYPERLIP_THREADS` (0 or unset: automatic).
pub fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("HYPERLIP_THREADS") else {
        return Ok(());
    };
    let threads: usize = value
        .trim()
        .parse()
        .map_err(|_| Failure::input(format!("HYPERLIP_THREADS={value:?} is not a number")))?;
    if threads > 0 {
        // A pool that was already built keeps its size.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    Ok(())
}

pub fn run(cli: Cli, out: &mut dyn Write) -> CmdResult {
    configure_threads()?;
    match cli.command {
        Command::Retract(a) => cmd_retract(a, out),
        Command::Extend(a) => cmd_extend(a, out),
        Command::Hull(c) => cmd_hull(c, out),
        Command::Reconstruct(a) => cmd_reconstruct(a, out),
        Command::Verify(c) => cmd_verify(c, out),
        Command::Plot(a) => cmd_plot(a),
        Command::Selftest(a) => {
            let report = selftest::run(a.seed);
            emit(out, a.out.as_deref(), &to_json(&report))?;
            if report.all_passed {
                Ok(())
            } else {
                Err(Failure::contract("self-test checks failed", json!({})))
            }
        }
    }
}

#[derive(Serialize)]
struct RetractReport {
    method: &'static str,
    point: Point,
    violation: f64,
    sweeps: usize,
    trace_summary: TraceSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    shrink_index: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    violation_bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    radius: Option<f64>,
}

pub fn cmd_retract(args: RetractArgs, out: &mut dyn Write) -> CmdResult {
    let set: BoxLipschitzSet = read_json(&args.set)?;
    let x: Point = read_json(&args.point)?;
    if x.dim() != set.n() {
        return Err(Error::DimensionMismatch {
            expected: set.n(),
            found: x.dim(),
        }
        .into());
    }
    let lambda = set.lambda();
    let (report, trace) = if lambda < 1.0 {
        let (p, trace) = set.cyclic_retract(&x, args.tol, args.max_sweeps)?;
        let report = RetractReport {
            method: "cyclic",
            violation: set.violation(&p)?,
            point: p,
            sweeps: trace.summary().sweeps,
            trace_summary: trace.summary(),
            shrink_index: None,
            violation_bound: None,
            radius: None,
        };
        (report, trace)
    } else if lambda > 1.0 {
        return Err(Error::NotNonexpansive { lambda }.into());
    } else {
        let r = if let Some(bx) = set.global_box()? {
            set.retract_lambda_one_bounded(&x, args.tol, &bx)?
        } else if let Some(w) = &args.witness {
            let w: Point = read_json(w)?;
            set.retract_lambda_one_general(&w, &x, args.tol)?
        } else {
            let window = default_window(set.n());
            let trace = set.cyclic_iterate(&x, DIAGNOSTIC_WINDOWS * window)?;
            if detect_noncontraction(&trace, window)? == Verdict::Stalled {
                if let Some(path) = &args.trace_csv {
                    fs::write(path, trace.to_csv())
                        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
                }
                return Err(Failure::contract(
                    "cyclic iteration does not contract",
                    json!({ "verdict": "stalled", "window": window, "trace_summary": trace.summary() }),
                ));
            }
            return Err(Failure::input(
                "λ = 1 with unbounded bounds requires --witness",
            ));
        };
        let report = RetractReport {
            method: if r.radius.is_some() {
                "shrunk_truncated"
            } else {
                "shrunk_bounded"
            },
            violation: set.violation(&r.point)?,
            point: r.point.clone(),
            sweeps: r.trace.summary().sweeps,
            trace_summary: r.trace.summary(),
            shrink_index: Some(r.k),
            violation_bound: Some(r.violation_bound()),
            radius: r.radius,
        };
        (report, r.trace)
    };
    if let Some(path) = &args.trace_csv {
        fs::write(path, trace.to_csv())
            .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    }
    emit(out, args.out.as_deref(), &to_json(&report))
}

#[derive(Deserialize)]
struct ExtensionInstance {
    metric: FiniteMetricSpace,
    #[serde(rename = "A")]
    subset: Vec<usize>,
    phi: Vec<Point>,
}

fn parse_indices(s: &str) -> Result<Vec<usize>, Failure> {
    s.split(',')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|e| Failure::input(format!("subset entry {t:?}: {e}")))
        })
        .collect()
}

pub fn cmd_extend(args: ExtendArgs, out: &mut dyn Write) -> CmdResult {
    let inst = match &args.instance {
        Some(path) => read_json::<ExtensionInstance>(path)?,
        None => ExtensionInstance {
            metric: read_json(args.space.as_deref().expect("required by clap"))?,
            subset: parse_indices(args.subset.as_deref().expect("required by clap"))?,
            phi: read_json(args.map.as_deref().expect("required by clap"))?,
        },
    };
    let set: BoxLipschitzSet = read_json(&args.set)?;
    let witness: Option<Point> = args.witness.as_deref().map(read_json).transpose()?;
    let ext = extend_into_set(
        &inst.metric,
        &inst.subset,
        &inst.phi,
        &set,
        args.tol,
        witness.as_ref(),
    )?;
    emit(out, args.out.as_deref(), &to_json(&ext))
}

pub fn cmd_hull(cmd: HullCommand, out: &mut dyn Write) -> CmdResult {
    match cmd {
        HullCommand::Enumerate {
            metric,
            resolution,
            out: path,
        } => {
            let space: FiniteMetricSpace = read_json(&metric)?;
            let found = enumerate_extremal_grid(&space, resolution)?;
            emit(out, path.as_deref(), &to_json(&found))
        }
        HullCommand::Extremal {
            metric,
            function,
            tol,
        } => {
            let space: FiniteMetricSpace = read_json(&metric)?;
            let f: Vec<f64> = read_json(&function)?;
            let admissible = in_delta(&space, &f, tol)?;
            let mut report = json!({ "in_delta": admissible });
            if admissible {
                let extremal = is_extremal(&space, &f, tol)?;
                report["extremal"] = json!(extremal);
                if extremal {
                    report["zero"] =
                        serde_json::to_value(extremal_zero_classification(&space, &f, tol)?)
                            .expect("serialisable");
                }
            }
            emit(out, None, &to_json(&report))
        }
        HullCommand::Attach { metric, function } => {
            let space: FiniteMetricSpace = read_json(&metric)?;
            let f: Vec<f64> = read_json(&function)?;
            emit(out, None, &to_json(&attach_point(&space, &f)?))
        }
        HullCommand::Embed { metric, basepoint } => {
            let space: FiniteMetricSpace = read_json(&metric)?;
            emit(out, None, &to_json(&kuratowski_embed(&space, basepoint)?))
        }
    }
}

pub fn cmd_reconstruct(args: ReconstructArgs, out: &mut dyn Write) -> CmdResult {
    let inside: Vec<Point> = read_json(&args.inside)?;
    let outside: Vec<Point> = read_json(&args.outside)?;
    let listed = inside.clone();
    let membership = move |x: &Point| listed.contains(x);
    let cfg = ReconstructionConfig::new(args.a, inside, outside, membership)?;
    let rec = synthesize_bounds(&cfg)?;
    let mut report = json!({ "set": rec.set, "cones": rec.cones });
    let mut exact = true;
    if let Some(path) = &args.verify_grid {
        let grid: Vec<Point> = read_json(path)?;
        let v = verify_reconstruction(&cfg.membership, &rec.set, &grid)?;
        exact = v.is_exact();
        report["verification"] = serde_json::to_value(&v).expect("serialisable");
    }
    emit(out, args.out.as_deref(), &to_json(&report))?;
    if exact {
        Ok(())
    } else {
        Err(Failure::contract(
            "reconstruction disagrees with the samples",
            json!({}),
        ))
    }
}

pub fn cmd_verify(cmd: VerifyCommand, out: &mut dyn Write) -> CmdResult {
    let (report, ok) = match cmd {
        VerifyCommand::Lipschitz { expr, grid, lambda } => {
            let f: LipExpr = read_json(&expr)?;
            f.validate()?;
            let grid: Vec<Point> = read_json(&grid)?;
            let check = verify_lipschitz_on_grid(&f, &grid, lambda)?;
            let ok = check.is_ok();
            (serde_json::to_value(check).expect("serialisable"), ok)
        }
        VerifyCommand::Set { set, points, tol } => {
            let set: BoxLipschitzSet = read_json(&set)?;
            let points: Vec<Point> = read_json(&points)?;
            let violations = points
                .iter()
                .map(|p| set.violation(p))
                .collect::<Result<Vec<_>, _>>()?;
            let ok = violations.iter().all(|v| *v <= tol);
            (
                json!({ "violations": violations, "all_within_tol": ok }),
                ok,
            )
        }
        VerifyCommand::Metric { metric, tol } => {
            let m: Vec<Vec<f64>> = read_json(&metric)?;
            let report = check_metric_axioms(&m, tol);
            let ok = report.is_valid();
            (serde_json::to_value(report).expect("serialisable"), ok)
        }
    };
    emit(out, None, &to_json(&report))?;
    if ok {
        Ok(())
    } else {
        Err(Failure::contract("verification failed", json!({})))
    }
}

pub fn cmd_plot(args: PlotArgs) -> CmdResult {
    let set: BoxLipschitzSet = read_json(&args.set)?;
    if set.n() != 2 {
        return Err(Failure::input(format!("plots need n = 2, got {}", set.n())));
    }
    let orbit = match &args.start {
        Some(path) => {
            let x: Point = read_json(path)?;
            set.cyclic_iterate(&x, args.steps)?.iterates()
        }
        None => Vec::new(),
    };
    let cones: Vec<ConeDescriptor> = match &args.cones {
        Some(path) => read_json(path)?,
        None => Vec::new(),
    };
    if args.cells == 0 || args.cells > 2000 {
        return Err(Failure::input("--cells must be in 1..=2000"));
    }
    let svg = plot::render(&set, args.bbox, args.cells, &orbit, &cones)?;
    fs::write(&args.out, svg).map_err(|e| Failure::input(format!("{}: {e}", args.out.display())))
}
