//! The `scl` command line.
//!
//! Exit codes: 0 success, 1 failed check or internal error, 2 bad input,
//! 3 surface problem, 4 resource cap hit (partial results are still written).

use std::io::Write;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::census::{self, uniform_grid, CensusTable};
use crate::currents::{
    area, boundary_of, boundary_projection, format_weight, length_sc, parse_generators,
    Functional, RationalSubsetCurrent,
};
use crate::error::Error;
use crate::geometry::{geodesic_length, holonomy_trace, SurfaceStructure};
use crate::graphs::{
    fold, spanning_generators, subgroups_of_index_bounded, finite_index_subgroups_bounded,
    CoreGraph, Index, SubgroupClass, DEFAULT_MAX_INDEX,
};
use crate::mcg::{orbit_ball, twist_generators, OrbitBall, OrbitConfig, OrbitMode, DEFAULT_BALL_CAP,
    DEFAULT_MARGIN};
use crate::words::{conj_class, Letter, Word};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_SURFACE: i32 = 3;
pub const EXIT_RESOURCE: i32 = 4;

/// Environment variable overriding the orbit ball cap.
pub const MAX_BALL_ENV: &str = "SCL_MAX_BALL";

#[derive(Parser, Debug)]
#[command(name = "scl", version, about = "Subgroup classes and orbit censuses on cusped surfaces")]
pub struct Cli {
    /// Surface config JSON; the built-in modular torus when absent.
    #[arg(long, global = true)]
    pub surface: Option<PathBuf>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Omit the metadata header (makes output byte-reproducible).
    #[arg(long, global = true)]
    pub no_meta: bool,
    /// Cap on orbit elements visited.
    #[arg(long, global = true)]
    pub max_ball: Option<usize>,
    /// Largest index accepted by subgroup enumeration.
    #[arg(long, global = true, default_value_t = DEFAULT_MAX_INDEX)]
    pub max_index: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Current,
    Tuple,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Stallings graph of a subgroup.
    Fold {
        #[arg(long)]
        gens: String,
    },
    /// Convex-core boundary of a subgroup.
    Boundary {
        #[arg(long)]
        gens: String,
    },
    /// Area, exact χ and boundary projection of a current.
    Area {
        /// Current literal such as `1:aa,b;1/2:a`.
        #[arg(long)]
        current: String,
    },
    /// Geodesic length of a word, or ℓ_SC of a current.
    Length {
        #[arg(long, conflicts_with = "current", required_unless_present = "current")]
        word: Option<String>,
        #[arg(long)]
        current: Option<String>,
    },
    /// Cumulative orbit counts N(L) on a grid.
    OrbitCount {
        #[arg(long)]
        seed: String,
        #[arg(long, default_value = "lsc")]
        functional: String,
        #[arg(long = "L")]
        l: f64,
        #[arg(long, default_value_t = DEFAULT_MARGIN)]
        margin: f64,
        #[arg(long, default_value_t = 20)]
        grid: usize,
        #[arg(long, value_enum, default_value_t = ModeArg::Current)]
        mode: ModeArg,
    },
    /// Simple closed geodesic counts from the slope oracle.
    SccCount {
        #[arg(long = "L")]
        l: f64,
        #[arg(long, default_value_t = 20)]
        grid: usize,
    },
    /// Integer simple multicurve counts and N(L)/L².
    MlzCount {
        #[arg(long = "L")]
        l: f64,
        #[arg(long, default_value_t = 20)]
        grid: usize,
    },
    /// Fiber sizes of the boundary projection over an orbit ball.
    Fibers {
        #[arg(long)]
        seed: String,
        #[arg(long = "L")]
        l: f64,
        #[arg(long, default_value_t = DEFAULT_MARGIN)]
        margin: f64,
    },
    /// Index-k subgroups of the ambient group, or of a subgroup given by --gens.
    LowIndex {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        gens: Option<String>,
    },
    /// Reproduces the index-4 worked example.
    VerifyExample,
}

/// Resolved settings for one invocation.
#[derive(Debug)]
pub struct RunConfig {
    pub surface: SurfaceStructure,
    pub command: Command,
    pub out: Option<PathBuf>,
    pub meta: bool,
    pub max_ball: usize,
    pub max_index: usize,
}

enum Payload {
    Json(Value),
    Csv { header: String, rows: Vec<String> },
}

struct Outcome {
    payload: Payload,
    code: i32,
}

impl Outcome {
    fn ok(payload: Payload) -> Outcome {
        Outcome { payload, code: EXIT_OK }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Surface(_) | Error::Config(_) => EXIT_SURFACE,
        Error::ResourceLimit(_) | Error::BallLimit { .. } => EXIT_RESOURCE,
        Error::InternalConsistency(_) => EXIT_FAILED,
        _ => EXIT_INPUT,
    }
}

/// Parses `args` (including the program name), executes, and returns the exit code.
pub fn run(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    let cfg = match resolve(cli) {
        Ok(c) => c,
        Err(e) => {
            let _ = writeln!(err, "scl: {e}");
            return exit_code(&e);
        }
    };
    let outcome = match execute(&cfg, err) {
        Ok(o) => o,
        Err(e) => {
            let _ = writeln!(err, "scl: {e}");
            return exit_code(&e);
        }
    };
    let text = render(&cfg, outcome.payload);
    let written = match &cfg.out {
        Some(p) => std::fs::write(p, text.as_bytes()).map_err(|e| e.to_string()),
        None => out.write_all(text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(e) = written {
        let _ = writeln!(err, "scl: cannot write output: {e}");
        return EXIT_INPUT;
    }
    outcome.code
}

pub fn resolve(cli: Cli) -> crate::Result<RunConfig> {
    let surface = match &cli.surface {
        Some(p) => SurfaceStructure::load(p)?,
        None => SurfaceStructure::modular_torus(),
    };
    let max_ball = match cli.max_ball {
        Some(n) => n,
        None => match std::env::var(MAX_BALL_ENV) {
            Ok(v) => v
                .parse()
                .map_err(|_| Error::Input(format!("{MAX_BALL_ENV}={v:?} is not a count")))?,
            Err(_) => DEFAULT_BALL_CAP,
        },
    };
    if max_ball == 0 || cli.max_index == 0 {
        return Err(Error::Input("resource caps must be positive".into()));
    }
    Ok(RunConfig {
        surface,
        command: cli.command,
        out: cli.out,
        meta: !cli.no_meta,
        max_ball,
        max_index: cli.max_index,
    })
}

fn meta_value(cfg: &RunConfig) -> Value {
    let generated = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    json!({
        "tool": "scl",
        "version": env!("CARGO_PKG_VERSION"),
        "surface": cfg.surface.name,
        "generated_unix": generated,
    })
}

fn render(cfg: &RunConfig, payload: Payload) -> String {
    match payload {
        Payload::Json(mut v) => {
            if cfg.meta {
                if let Value::Object(m) = &mut v {
                    m.insert("meta".into(), meta_value(cfg));
                }
            }
            let mut s = serde_json::to_string_pretty(&v).expect("JSON values serialize");
            s.push('\n');
            s
        }
        Payload::Csv { header, rows } => {
            let mut s = String::new();
            if cfg.meta {
                let m = meta_value(cfg);
                s.push_str(&format!(
                    "# scl {} surface={} generated_unix={}\n",
                    m["version"].as_str().unwrap_or(""),
                    cfg.surface.name,
                    m["generated_unix"]
                ));
            }
            s.push_str(&header);
            s.push('\n');
            for r in rows {
                s.push_str(&r);
                s.push('\n');
            }
            s
        }
    }
}

fn execute(cfg: &RunConfig, err: &mut dyn Write) -> crate::Result<Outcome> {
    let s = &cfg.surface;
    match &cfg.command {
        Command::Fold { gens } => {
            let g = fold(s.rank, &parse_generators(gens, s.rank)?)?;
            Ok(Outcome::ok(Payload::Json(graph_json(&g))))
        }
        Command::Boundary { gens } => {
            let h = SubgroupClass::from_generators(&parse_generators(gens, s.rank)?, s)?;
            let report = boundary_of(&h, s)?;
            let b = boundary_projection(&RationalSubsetCurrent::single(h), s)?;
            let mut v = serde_json::to_value(&report).expect("report serializes");
            v["boundary_projection"] = serde_json::to_value(b.entries()).expect("entries serialize");
            Ok(Outcome::ok(Payload::Json(v)))
        }
        Command::Area { current } => {
            let eta = RationalSubsetCurrent::parse(current, s)?;
            let a = area(&eta);
            let b = boundary_projection(&eta, s)?;
            Ok(Outcome::ok(Payload::Json(json!({
                "current": eta.to_string(),
                "area": a.value,
                "exact_chi": format_weight(&a.exact_chi),
                "lsc": length_sc(&eta, s)?,
                "boundary_projection": b.entries(),
            }))))
        }
        Command::Length { word, current } => {
            if let Some(w) = word {
                let c = conj_class(&Word::parse(w, s.rank)?)?;
                let length = geodesic_length(&c, s)?;
                Ok(Outcome::ok(Payload::Json(json!({
                    "class": c.to_string(),
                    "trace": holonomy_trace(c.word(), s).to_string(),
                    "length": length,
                }))))
            } else {
                let lit = current.as_deref().unwrap_or_default();
                let eta = RationalSubsetCurrent::parse(lit, s)?;
                Ok(Outcome::ok(Payload::Json(json!({
                    "current": eta.to_string(),
                    "lsc": length_sc(&eta, s)?,
                }))))
            }
        }
        Command::OrbitCount {
            seed,
            functional,
            l,
            margin,
            grid,
            mode,
        } => {
            let eta = RationalSubsetCurrent::parse(seed, s)?;
            let mode = match mode {
                ModeArg::Current => OrbitMode::Current,
                ModeArg::Tuple => OrbitMode::Tuple,
            };
            let oc = OrbitConfig::new(Functional::parse(functional)?, *l)
                .margin(*margin)
                .cap(cfg.max_ball)
                .mode(mode);
            let grid = grid_values(*l, *grid)?;
            let (ball, code) = ball_or_partial(orbit_ball(&eta, &oc, s), err)?;
            let t = census::count_by_length(&ball, &grid)?;
            Ok(Outcome {
                payload: orbit_csv(&t, ball.frontier_exhausted),
                code,
            })
        }
        Command::SccCount { l, grid } => {
            let t = census::scc_census(s, *l, &grid_values(*l, *grid)?)?;
            Ok(Outcome::ok(census_csv(&t, false)))
        }
        Command::MlzCount { l, grid } => {
            let t = census::mlz_census(s, *l, &grid_values(*l, *grid)?)?;
            Ok(Outcome::ok(census_csv(&t, true)))
        }
        Command::Fibers { seed, l, margin } => {
            let eta = RationalSubsetCurrent::parse(seed, s)?;
            let oc = OrbitConfig::new(Functional::LSC, *l)
                .margin(*margin)
                .cap(cfg.max_ball);
            let (ball, code) = ball_or_partial(orbit_ball(&eta, &oc, s), err)?;
            if code != EXIT_OK {
                return Ok(Outcome {
                    payload: Payload::Json(json!({
                        "seed": eta.to_string(),
                        "L": l,
                        "elements": ball.len(),
                        "frontier_exhausted": false,
                        "histogram": Value::Null,
                    })),
                    code,
                });
            }
            let hist = census::fiber_histogram(&ball)?;
            let hist_json: serde_json::Map<String, Value> =
                hist.iter().map(|(k, v)| (k.to_string(), json!(v))).collect();
            Ok(Outcome::ok(Payload::Json(json!({
                "seed": eta.to_string(),
                "L": l,
                "elements": ball.len(),
                "fibers": hist.values().sum::<usize>(),
                "frontier_exhausted": ball.frontier_exhausted,
                "histogram": hist_json,
            }))))
        }
        Command::LowIndex { k, gens } => {
            let subgroups: Vec<Value> = match gens {
                None => subgroups_of_index_bounded(s.rank, *k, cfg.max_index)?
                    .iter()
                    .map(|g| json!({ "generators": words_json(&spanning_generators(g)) }))
                    .collect(),
                Some(list) => {
                    let h = SubgroupClass::from_generators(&parse_generators(list, s.rank)?, s)?;
                    finite_index_subgroups_bounded(&h, *k, cfg.max_index)?
                        .iter()
                        .map(|c| {
                            json!({
                                "generators": words_json(&c.generators()),
                                "euler_characteristic": c.euler_characteristic(),
                            })
                        })
                        .collect()
                }
            };
            Ok(Outcome::ok(Payload::Json(json!({
                "rank": s.rank,
                "k": k,
                "count": subgroups.len(),
                "subgroups": subgroups,
            }))))
        }
        Command::VerifyExample => {
            let report = verify_example(s)?;
            if !report.passed() {
                for c in report.checks.iter().filter(|c| !c.pass) {
                    let _ = writeln!(err, "{}: expected {}, got {}", c.name, c.expected, c.actual);
                }
            }
            let code = if report.passed() { EXIT_OK } else { EXIT_FAILED };
            Ok(Outcome {
                payload: Payload::Json(serde_json::to_value(&report).expect("report serializes")),
                code,
            })
        }
    }
}

fn grid_values(l: f64, n: usize) -> crate::Result<Vec<f64>> {
    if !(l > 0.0) || !l.is_finite() || n == 0 {
        return Err(Error::Input(format!("need L > 0 and a positive grid size, got L={l}, grid={n}")));
    }
    Ok(uniform_grid(l, n))
}

fn ball_or_partial(
    r: crate::Result<OrbitBall>,
    err: &mut dyn Write,
) -> crate::Result<(OrbitBall, i32)> {
    match r {
        Ok(b) => Ok((b, EXIT_OK)),
        Err(Error::BallLimit { cap, partial }) => {
            let _ = writeln!(err, "scl: orbit ball exceeded cap of {cap}; results are partial");
            Ok((*partial, EXIT_RESOURCE))
        }
        Err(e) => Err(e),
    }
}

fn fmt_l(l: f64) -> String {
    format!("{l}")
}

fn orbit_csv(t: &CensusTable, exhausted: bool) -> Payload {
    Payload::Csv {
        header: "L,count,frontier_exhausted".into(),
        rows: t
            .rows
            .iter()
            .map(|r| format!("{},{},{}", fmt_l(r.l), r.count, exhausted))
            .collect(),
    }
}

fn census_csv(t: &CensusTable, ratio: bool) -> Payload {
    let header = if ratio { "L,count,ratio" } else { "L,count" };
    Payload::Csv {
        header: header.into(),
        rows: t
            .rows
            .iter()
            .map(|r| {
                if ratio {
                    format!("{},{},{}", fmt_l(r.l), r.count, r.count as f64 / (r.l * r.l))
                } else {
                    format!("{},{}", fmt_l(r.l), r.count)
                }
            })
            .collect(),
    }
}

fn words_json(ws: &[Word]) -> Vec<String> {
    ws.iter().map(|w| w.to_string()).collect()
}

fn index_json(i: Index) -> Value {
    match i {
        Index::Finite(k) => json!(k),
        Index::Infinite => json!("infinite"),
    }
}

pub fn graph_json(g: &CoreGraph) -> Value {
    let edges: Vec<Value> = g
        .edges()
        .iter()
        .map(|&(u, gen, v)| json!([u, v, Letter::new(gen, false).to_char().to_string()]))
        .collect();
    json!({
        "vertices": g.vertex_count(),
        "edges": edges,
        "rank": g.subgroup_rank(),
        "index": index_json(crate::graphs::index(g)),
        "generators": words_json(&spanning_generators(g)),
    })
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct ExampleReport {
    pub subgroup: Vec<String>,
    pub image: Vec<String>,
    pub checks: Vec<Check>,
}

impl ExampleReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Generators of the index-4 subgroup of the worked example.
pub const EXAMPLE_SUBGROUP: [&str; 5] = ["aaaa", "ab", "bb", "aaba", "aaBa"];
/// Its image under the twist `a ↦ a, b ↦ ab`.
pub const EXAMPLE_IMAGE: [&str; 5] = ["aaaa", "aab", "abab", "aaaba", "aaB"];

/// Two non-conjugate index-4 subgroups exchanged by a twist, with equal χ and zero boundary projection.
pub fn verify_example(s: &SurfaceStructure) -> crate::Result<ExampleReport> {
    if s.rank != 2 {
        return Err(Error::Config("the worked example lives in a rank-2 group".into()));
    }
    let words = |ws: &[&str]| -> crate::Result<Vec<Word>> {
        ws.iter().map(|w| Word::parse(w, 2)).collect()
    };
    let h_gens = words(&EXAMPLE_SUBGROUP)?;
    let listed = words(&EXAMPLE_IMAGE)?;
    let twist = &twist_generators(&SurfaceStructure::modular_torus())?[0];
    let image: Vec<Word> = h_gens.iter().map(|w| twist.apply(w)).collect();

    let h = SubgroupClass::from_generators(&h_gens, s)?;
    let phi_h = SubgroupClass::from_generators(&image, s)?;
    let phi_listed = SubgroupClass::from_generators(&listed, s)?;
    let b_h = boundary_projection(&RationalSubsetCurrent::single(h.clone()), s)?;
    let b_phi = boundary_projection(&RationalSubsetCurrent::single(phi_h.clone()), s)?;

    let mut checks = Vec::new();
    let mut check = |name: &str, expected: String, actual: String| {
        let pass = expected == actual;
        checks.push(Check {
            name: name.into(),
            expected,
            actual,
            pass,
        });
    };
    let idx = |c: &SubgroupClass| match c.index() {
        Index::Finite(k) => k.to_string(),
        Index::Infinite => "infinite".into(),
    };
    check("index(H)", "4".into(), idx(&h));
    check("index(phi(H))", "4".into(), idx(&phi_h));
    check(
        "twist image equals listed generators",
        "true".into(),
        (phi_h == phi_listed).to_string(),
    );
    check("keys differ", "true".into(), (h.key() != phi_h.key()).to_string());
    check("B(H) is zero", "true".into(), b_h.is_zero().to_string());
    check("B(phi(H)) is zero", "true".into(), b_phi.is_zero().to_string());
    check("chi(H)", "-4".into(), h.euler_characteristic().to_string());
    check("chi(phi(H))", "-4".into(), phi_h.euler_characteristic().to_string());
    Ok(ExampleReport {
        subgroup: EXAMPLE_SUBGROUP.iter().map(|w| w.to_string()).collect(),
        image: image.iter().map(|w| w.to_string()).collect(),
        checks,
    })
}
