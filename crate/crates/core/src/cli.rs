//! Command-line front end.
//!
//! [`run`] parses an argument list, executes one subcommand and returns an
//! [`Invocation`]: the text for stdout and stderr plus the exit code. It never
//! panics on malformed input and never terminates the process itself.
//!
//! Exit codes: [`EXIT_OK`] on success, [`EXIT_NEGATIVE`] when a valid query
//! gets a negative verdict (outside, infeasible), [`EXIT_INPUT`] on malformed
//! input with a one-line diagnostic on stderr.

use std::ffi::OsString;
use std::io::Read;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::elliptope::{self, CorrelationTriple, Verdict};
use crate::events::{self, EventSystem};
use crate::polytope::{self, Certificate, HPolytope, Halfspace, Membership, VPolytope};
use crate::quantum;
use crate::raffles::{self, BalancedValueSet, Raffle, RaffleFeasibility, CHI_NAMES};
use crate::rational::{self, Rational};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

/// Fallback seed source when `--seed` is absent.
pub const SEED_ENV: &str = "CORRGEO_SEED";
/// Seed used when neither `--seed` nor the environment provides one.
pub const DEFAULT_SEED: u64 = 0;
/// Decimal places kept in floating-point `quantum chi` output.
pub const CHI_DECIMALS: i32 = 12;

#[derive(Parser, Debug)]
#[command(
    name = "corrgeo",
    version,
    about = "Correlation polytopes, the elliptope, raffles and spin-s singlet correlations",
    after_help = "Points are comma-separated, e.g. --point -0.5,-0.5,-0.5 or --point -1/2,-1/2,-1/2.\n\
                  File arguments accept '-' for stdin. The seed falls back to $CORRGEO_SEED, then 0."
)]
struct Cli {
    /// Print the full report (command, input echo, result, metadata) instead of the result alone
    #[arg(long, global = true)]
    report: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Consistent 0/1 vertices of an event system ({"atoms":n,"derived":[...]})
    Vertices {
        /// Event system JSON file
        file: String,
    },
    /// Facets of a vertex list ({"dim":d,"vertices":[...]}) or of an event system
    Facets {
        /// Vertex or event system JSON file
        file: String,
    },
    /// Membership of a point in a polytope, with a certificate
    Member {
        /// Polytope JSON, either {"dim","vertices"} or {"dim","halfspaces"}
        #[arg(long)]
        polytope: String,
        /// Comma-separated exact coordinates
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// The elliptope of anti-correlation triples
    Elliptope {
        #[command(subcommand)]
        cmd: ElliptopeCmd,
    },
    /// Singlet correlations of spin-s systems
    Quantum {
        #[command(subcommand)]
        cmd: QuantumCmd,
    },
    /// Local hidden-variable raffles
    Raffle {
        #[command(subcommand)]
        cmd: RaffleCmd,
    },
    /// Exact data behind the elliptope, tetrahedron and spin-1 figures
    Figure {
        name: FigureName,
        /// Output format (the elliptope figure defaults to csv)
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
}

#[derive(Subcommand, Debug)]
enum ElliptopeCmd {
    /// Classify a triple as INSIDE, BOUNDARY or OUTSIDE
    Check {
        /// chi_ab,chi_ac,chi_bc
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        /// Absolute tolerance on the determinant
        #[arg(long, default_value_t = elliptope::DEFAULT_TOL)]
        tol: f64,
    },
    /// Boundary points over an N×N grid of (chi_ab, chi_ac)
    Mesh {
        #[arg(long, default_value_t = 64)]
        resolution: usize,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Subcommand, Debug)]
enum QuantumCmd {
    /// Anti-correlations of the singlet for settings at the given mutual angles
    Chi {
        /// 2s, e.g. 1 for spin 1/2
        #[arg(long)]
        spin: u32,
        /// theta_ab,theta_ac,theta_bc in degrees
        #[arg(long, allow_hyphen_values = true)]
        angles: String,
    },
}

#[derive(Subcommand, Debug)]
enum RaffleCmd {
    /// Vertices and facets of the raffle correlation polytope
    Polytope {
        /// 2s, from 1 to 6
        #[arg(long)]
        spin: u32,
    },
    /// Exact LP: a witness raffle or a violated facet
    Feasible {
        #[arg(long)]
        spin: u32,
        /// chi_ab,chi_ac,chi_bc (exact decimals or fractions)
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Monte Carlo estimate of a raffle's anti-correlations
    Simulate {
        #[arg(long)]
        spin: u32,
        /// Raffle JSON file; defaults to the witness for --point, else the uniform raffle
        #[arg(long)]
        raffle: Option<String>,
        /// Simulate the LP witness for this triple
        #[arg(long, allow_hyphen_values = true, conflicts_with = "raffle")]
        point: Option<String>,
        /// Number of draws
        #[arg(long, default_value_t = 1_000_000)]
        n: u64,
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads; totals do not depend on this
        #[arg(long, default_value_t = 1)]
        shards: usize,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum FigureName {
    Elliptope,
    Tetrahedron,
    Spin1,
}

#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub version: String,
    pub seed: Option<u64>,
    pub elapsed_ms: f64,
}

/// Self-describing record of one command: re-running `input.argv` (with the
/// echoed files restored) reproduces `result`.
#[derive(Debug, Clone, Serialize)]
pub struct CommandReport {
    pub command: String,
    pub input: Value,
    pub result: Value,
    pub metadata: Metadata,
}

#[derive(Debug, Clone)]
pub struct Invocation {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
    pub report: Option<CommandReport>,
}

struct InputError(String);

impl<E: std::fmt::Display> From<E> for InputError {
    fn from(e: E) -> Self {
        InputError(e.to_string())
    }
}

enum Payload {
    Json(Value),
    Csv(String),
}

struct Output {
    payload: Payload,
    negative: bool,
    seed: Option<u64>,
}

impl Output {
    fn json(v: Value) -> Self {
        Output { payload: Payload::Json(v), negative: false, seed: None }
    }
}

#[derive(Default)]
struct Context {
    files: Map<String, Value>,
}

impl Context {
    fn read(&mut self, path: &str) -> Result<String, InputError> {
        let text = if path == "-" {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| InputError(format!("stdin: {e}")))?;
            s
        } else {
            std::fs::read_to_string(path).map_err(|e| InputError(format!("{path}: {e}")))?
        };
        let echo = serde_json::from_str(&text).unwrap_or(Value::String(text.clone()));
        self.files.insert(path.to_string(), echo);
        Ok(text)
    }
}

pub fn run<I, T>(args: I) -> Invocation
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Invocation {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                    report: None,
                },
                _ => Invocation {
                    code: EXIT_INPUT,
                    stdout: String::new(),
                    stderr: format!("{}\n", text.lines().next().unwrap_or("error: invalid arguments")),
                    report: None,
                },
            };
        }
    };
    let start = Instant::now();
    let mut ctx = Context::default();
    let name = command_name(&cli.command);
    let outcome = execute(&cli.command, &mut ctx);
    let elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    let out = match outcome {
        Ok(out) => out,
        Err(InputError(msg)) => {
            return Invocation {
                code: EXIT_INPUT,
                stdout: String::new(),
                stderr: format!("error: {}\n", msg.lines().next().unwrap_or("")),
                report: None,
            }
        }
    };
    let code = if out.negative { EXIT_NEGATIVE } else { EXIT_OK };
    let result = match &out.payload {
        Payload::Json(v) => v.clone(),
        Payload::Csv(s) => Value::String(s.clone()),
    };
    let argv_echo: Vec<String> = argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let report = CommandReport {
        command: name,
        input: json!({ "argv": argv_echo, "files": ctx.files }),
        result,
        metadata: Metadata {
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed: out.seed,
            elapsed_ms,
        },
    };
    let stdout = if cli.report {
        format!("{}\n", serde_json::to_string(&report).expect("serializable report"))
    } else {
        match &out.payload {
            Payload::Json(v) => format!("{v}\n"),
            Payload::Csv(s) => s.clone(),
        }
    };
    Invocation {
        code,
        stdout,
        stderr: String::new(),
        report: Some(report),
    }
}

fn command_name(c: &Command) -> String {
    match c {
        Command::Vertices { .. } => "vertices".into(),
        Command::Facets { .. } => "facets".into(),
        Command::Member { .. } => "member".into(),
        Command::Elliptope { cmd: ElliptopeCmd::Check { .. } } => "elliptope check".into(),
        Command::Elliptope { cmd: ElliptopeCmd::Mesh { .. } } => "elliptope mesh".into(),
        Command::Quantum { cmd: QuantumCmd::Chi { .. } } => "quantum chi".into(),
        Command::Raffle { cmd: RaffleCmd::Polytope { .. } } => "raffle polytope".into(),
        Command::Raffle { cmd: RaffleCmd::Feasible { .. } } => "raffle feasible".into(),
        Command::Raffle { cmd: RaffleCmd::Simulate { .. } } => "raffle simulate".into(),
        Command::Figure { name, .. } => format!("figure {}", figure_name(*name)),
    }
}

fn figure_name(f: FigureName) -> &'static str {
    match f {
        FigureName::Elliptope => "elliptope",
        FigureName::Tetrahedron => "tetrahedron",
        FigureName::Spin1 => "spin1",
    }
}

fn execute(c: &Command, ctx: &mut Context) -> Result<Output, InputError> {
    match c {
        Command::Vertices { file } => vertices(&ctx.read(file)?),
        Command::Facets { file } => facets(&ctx.read(file)?),
        Command::Member { polytope, point } => member(&ctx.read(polytope)?, point),
        Command::Elliptope { cmd } => match cmd {
            ElliptopeCmd::Check { point, tol } => elliptope_check(point, *tol),
            ElliptopeCmd::Mesh { resolution, format } => Ok(mesh(*resolution, *format)),
        },
        Command::Quantum { cmd: QuantumCmd::Chi { spin, angles } } => quantum_chi(*spin, angles),
        Command::Raffle { cmd } => match cmd {
            RaffleCmd::Polytope { spin } => raffle_polytope(*spin),
            RaffleCmd::Feasible { spin, point } => raffle_feasible(*spin, point),
            RaffleCmd::Simulate { spin, raffle, point, n, seed, shards } => {
                let raffle_text = raffle.as_deref().map(|p| ctx.read(p)).transpose()?;
                simulate(*spin, raffle_text.as_deref(), point.as_deref(), *n, *seed, *shards)
            }
        },
        Command::Figure { name, format } => figure(*name, *format),
    }
}

fn parse_exact_point(s: &str) -> Result<Vec<Rational>, InputError> {
    s.split(',')
        .map(|x| rational::parse(x.trim()).map_err(|e| InputError(format!("bad coordinate {x:?}: {e}"))))
        .collect()
}

fn parse_float_point<const N: usize>(s: &str) -> Result<[f64; N], InputError> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| InputError(format!("bad number {x:?}"))))
        .collect::<Result<_, _>>()?;
    parts
        .try_into()
        .map_err(|v: Vec<f64>| InputError(format!("expected {N} comma-separated numbers, got {}", v.len())))
}

fn triple(s: &str) -> Result<[Rational; 3], InputError> {
    let v = parse_exact_point(s)?;
    v.try_into()
        .map_err(|v: Vec<Rational>| InputError(format!("expected 3 coordinates, got {}", v.len())))
}

fn strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(rational::format).collect()
}

fn halfspace_json(h: &Halfspace, names: &[&str]) -> Value {
    json!({
        "a": strings(&h.a),
        "a0": rational::format(&h.a0),
        "text": h.to_inequality_string(names),
    })
}

fn hpolytope_json(h: &HPolytope, names: &[&str]) -> Value {
    json!({
        "dim": h.dim(),
        "equalities": h.equalities().iter().map(|e| halfspace_json(e, names)).collect::<Vec<_>>(),
        "facets": h.inequalities().iter().map(|f| halfspace_json(f, names)).collect::<Vec<_>>(),
    })
}

fn default_names(d: usize) -> Vec<String> {
    (0..d).map(|i| format!("x{i}")).collect()
}

fn vertices(text: &str) -> Result<Output, InputError> {
    let sys = EventSystem::from_json(text)?;
    let verts = events::enumerate_vertices(&sys)?;
    Ok(Output::json(json!({
        "dim": sys.dim(),
        "coordinates": sys.coordinate_names(),
        "count": verts.len(),
        "vertices": verts.iter().map(|v| v.0.clone()).collect::<Vec<_>>(),
    })))
}

fn facets(text: &str) -> Result<Output, InputError> {
    let raw: Value = serde_json::from_str(text)?;
    let (h, names) = if raw.get("atoms").is_some() {
        let sys = EventSystem::from_json(text)?;
        (events::boole_conditions(&sys)?, sys.coordinate_names())
    } else {
        let v = VPolytope::from_json(text)?;
        (polytope::facets(&v)?, default_names(v.dim()))
    };
    let refs: Vec<&str> = names.iter().map(String::as_str).collect();
    Ok(Output::json(hpolytope_json(&h, &refs)))
}

fn member(text: &str, point: &str) -> Result<Output, InputError> {
    let raw: Value = serde_json::from_str(text)?;
    let x = parse_exact_point(point)?;
    if raw.get("halfspaces").is_some() {
        let h = HPolytope::from_json(text)?;
        let names = default_names(h.dim());
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let m = polytope::contains(&h, &x)?;
        let (verdict, violated) = match &m {
            Membership::Inside => ("INSIDE", vec![]),
            Membership::Boundary => ("BOUNDARY", vec![]),
            Membership::Outside { violated } => ("OUTSIDE", violated.clone()),
        };
        let violated: Vec<Value> = violated
            .iter()
            .map(|&i| json!({ "index": i, "halfspace": halfspace_json(&h.halfspaces()[i], &refs) }))
            .collect();
        Ok(Output {
            payload: Payload::Json(json!({
                "representation": "H",
                "verdict": verdict,
                "violated": violated,
            })),
            negative: matches!(m, Membership::Outside { .. }),
            seed: None,
        })
    } else {
        let v = VPolytope::from_json(text)?;
        let names = default_names(v.dim());
        let refs: Vec<&str> = names.iter().map(String::as_str).collect();
        match polytope::lp_membership(&v, &x)? {
            Certificate::Inside { weights } => Ok(Output::json(json!({
                "representation": "V",
                "verdict": "INSIDE",
                "weights": strings(&weights),
            }))),
            Certificate::Outside { separator } => Ok(Output {
                payload: Payload::Json(json!({
                    "representation": "V",
                    "verdict": "OUTSIDE",
                    "separator": halfspace_json(&separator, &refs),
                })),
                negative: true,
                seed: None,
            }),
        }
    }
}

fn elliptope_check(point: &str, tol: f64) -> Result<Output, InputError> {
    let c: [f64; 3] = parse_float_point(point)?;
    if c.iter().any(|x| !x.is_finite()) {
        return Err(InputError("coordinates must be finite".into()));
    }
    let verdict = elliptope::classify(c, tol);
    Ok(Output {
        payload: Payload::Json(json!({
            "verdict": verdict,
            "value": elliptope::elliptope_value_raw(c),
        })),
        negative: verdict == Verdict::Outside,
        seed: None,
    })
}

fn mesh(resolution: usize, format: Format) -> Output {
    let m = elliptope::boundary_mesh(resolution);
    match format {
        Format::Csv => Output {
            payload: Payload::Csv(elliptope::mesh_to_csv(&m)),
            negative: false,
            seed: None,
        },
        Format::Json => Output::json(json!({
            "resolution": resolution.max(2),
            "columns": CHI_NAMES,
            "points": m.iter().map(|t| t.as_array()).collect::<Vec<_>>(),
        })),
    }
}

fn round_chi(x: f64) -> f64 {
    let scale = 10f64.powi(CHI_DECIMALS);
    let r = (x * scale).round() / scale;
    // avoid printing -0.0
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn quantum_chi(spin2: u32, angles: &str) -> Result<Output, InputError> {
    let deg: [f64; 3] = parse_float_point(angles)?;
    let cosines = deg.map(|d| d.to_radians().cos());
    let t = CorrelationTriple::from_array(cosines.map(|c| c.clamp(-1.0, 1.0)))?;
    let dirs = quantum::saturate(&t, spin2)
        .map_err(|e| InputError(format!("angles {angles} are not realizable in three dimensions: {e}")))?;
    let chi = quantum::chi_triple(spin2, &dirs)?;
    Ok(Output::json(json!({ "chi": chi.map(round_chi) })))
}

fn value_set(spin2: u32) -> Result<BalancedValueSet, InputError> {
    if spin2 == 0 || spin2 > raffles::MAX_SPIN2 {
        return Err(InputError(format!(
            "--spin takes 2s between 1 and {}, got {spin2}",
            raffles::MAX_SPIN2
        )));
    }
    Ok(BalancedValueSet::new(spin2))
}

fn polytope_json(v: &VPolytope, h: &HPolytope) -> Value {
    json!({
        "coordinates": CHI_NAMES,
        "vertices": v.vertices().iter().map(|x| strings(x)).collect::<Vec<_>>(),
        "facets": h.inequalities().iter().map(|f| halfspace_json(f, &CHI_NAMES)).collect::<Vec<_>>(),
    })
}

fn raffle_polytope(spin2: u32) -> Result<Output, InputError> {
    let vs = value_set(spin2)?;
    let v = raffles::raffle_polytope(&vs)?;
    let h = polytope::facets(&v)?;
    let mut body = polytope_json(&v, &h);
    body["spin2"] = json!(spin2);
    Ok(Output::json(body))
}

fn raffle_feasible(spin2: u32, point: &str) -> Result<Output, InputError> {
    let vs = value_set(spin2)?;
    let t = triple(point)?;
    Ok(match raffles::feasible(&vs, &t)? {
        RaffleFeasibility::Feasible(r) => {
            let witness: Value = serde_json::from_str(&r.to_json())?;
            Output::json(json!({ "verdict": "feasible", "witness": witness }))
        }
        RaffleFeasibility::Infeasible { facet } => Output {
            payload: Payload::Json(json!({
                "verdict": "infeasible",
                "facet": facet.to_inequality_string(&CHI_NAMES),
                "halfspace": { "a": strings(&facet.a), "a0": rational::format(&facet.a0) },
            })),
            negative: true,
            seed: None,
        },
    })
}

fn resolve_seed(seed: Option<u64>) -> Result<u64, InputError> {
    if let Some(s) = seed {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| InputError(format!("{SEED_ENV}={v:?} is not an unsigned 64-bit integer"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn simulate(
    spin2: u32,
    raffle_text: Option<&str>,
    point: Option<&str>,
    n: u64,
    seed: Option<u64>,
    shards: usize,
) -> Result<Output, InputError> {
    if n == 0 {
        return Err(InputError("--n must be at least 1".into()));
    }
    if shards == 0 {
        return Err(InputError("--shards must be at least 1".into()));
    }
    let seed = resolve_seed(seed)?;
    let vs = value_set(spin2)?;
    let r = match (raffle_text, point) {
        (Some(text), _) => {
            let r = Raffle::from_json(text)?;
            if r.value_set() != vs {
                return Err(InputError(format!(
                    "raffle has 2s = {}, but --spin is {spin2}",
                    r.value_set().spin2()
                )));
            }
            r
        }
        (None, Some(p)) => match raffles::feasible(&vs, &triple(p)?)? {
            RaffleFeasibility::Feasible(r) => r,
            RaffleFeasibility::Infeasible { facet } => {
                return Ok(Output {
                    payload: Payload::Json(json!({
                        "verdict": "infeasible",
                        "facet": facet.to_inequality_string(&CHI_NAMES),
                    })),
                    negative: true,
                    seed: Some(seed),
                })
            }
        },
        (None, None) => Raffle::uniform(vs, &vs.tickets())?,
    };
    let report = raffles::simulate(&r, n, seed, shards);
    let exact = raffles::chi_exact(&r).ok().map(|c| c.map(|x| rational::format(&x)));
    let mut body = serde_json::to_value(&report)?;
    body["exact_chi"] = json!(exact);
    Ok(Output {
        payload: Payload::Json(body),
        negative: false,
        seed: Some(seed),
    })
}

fn figure(name: FigureName, format: Option<Format>) -> Result<Output, InputError> {
    match name {
        FigureName::Elliptope => Ok(mesh(64, format.unwrap_or(Format::Csv))),
        FigureName::Tetrahedron | FigureName::Spin1 => {
            if format == Some(Format::Csv) {
                return Err(InputError(format!("figure {} is only available as json", figure_name(name))));
            }
            let spin2 = if name == FigureName::Tetrahedron { 1 } else { 2 };
            let v = raffles::raffle_polytope(&BalancedValueSet::new(spin2))?;
            for x in v.vertices() {
                let c: [Rational; 3] = [x[0].clone(), x[1].clone(), x[2].clone()];
                if rational::is_negative(&elliptope::elliptope_value_exact(&c)) {
                    return Err(InputError(format!("vertex {:?} lies outside the elliptope", strings(x))));
                }
            }
            let h = polytope::facets(&v)?;
            let mut body = polytope_json(&v, &h);
            body["spin2"] = json!(spin2);
            Ok(Output::json(body))
        }
    }
}
