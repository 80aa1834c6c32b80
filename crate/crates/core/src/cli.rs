//! Command-line front end. [`run`] parses an argument vector and returns
//! the exit status with the JSON document to print.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::error::{ContextKind, ContextValue, ErrorKind};
use clap::builder::TypedValueParser;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::arith::{BigReal, QuadVal, Rat};
use crate::cycle::{blowup_data, build_cycle, regulator_h4, regulator_sweep, BlowupLocalData, CyclePresentation};
use crate::error::Error;
use crate::geometry::Conic;
use crate::greens::{
    cross_check, green_k, greens_combo, hecke_green, hecke_green_direct, PrincipalPart, QOrder, TruncationPolicy,
    UHPoint,
};
use crate::kummer::{
    build_config, bw_cases, h4_h8_factors, hecke_components, humbert5_conic, humbert5_conic_printed,
    humbert5_discriminant, ModuliParams,
};
use crate::ns::{
    cm_cycle, cm_lattice_basis, cm_z, gram_matrix, humbert_norm, ns_pair, sigma_star, signature, EndElt, HomModule,
    NSClass,
};
use crate::verify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const PRECISION_ENV: &str = "MCYCLE_PRECISION";
pub const DEFAULT_PRECISION: u32 = 50;

/// Stable code reported for usage errors.
pub const USAGE_CODE: i32 = 100;

const BRANCH_CONVENTION: &str = "principal square root; the +sqrt root of each quadratic is listed first";

#[derive(Parser, Debug)]
#[command(name = "mcycle", version, about = "Kummer-plane geometry, Z5 regulators, NS lattices and Green's functions")]
struct Cli {
    /// Working precision in decimal digits.
    #[arg(long, global = true, env = PRECISION_ENV, default_value_t = DEFAULT_PRECISION,
          value_parser = clap::value_parser!(u32).range(10..=20_000))]
    precision: u32,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct ParamsArg {
    /// Moduli point `a1,a2,a3`; each entry `p/q` or a decimal.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_params)]
    params: (Rat, Rat, Rat),
}

#[derive(Args, Debug)]
struct H4Point {
    #[arg(long, allow_hyphen_values = true, value_parser = parse_rat)]
    a1: Rat,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_rat)]
    a3: Rat,
}

#[derive(Args, Debug)]
struct PointPair {
    /// First point `RE,IM` with `IM > 0`.
    #[arg(long, allow_hyphen_values = true, value_parser = parse_uh)]
    z1: (Rat, Rat),
    #[arg(long, allow_hyphen_values = true, value_parser = parse_uh)]
    z2: (Rat, Rat),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum QOrderArg {
    WeightMinusOne,
    Weight,
}

impl From<QOrderArg> for QOrder {
    fn from(q: QOrderArg) -> Self {
        match q {
            QOrderArg::WeightMinusOne => QOrder::WeightMinusOne,
            QOrderArg::Weight => QOrder::Weight,
        }
    }
}

#[derive(Args, Debug)]
struct TruncArgs {
    /// Largest matrix entry of the enumerated group elements.
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(10..))]
    bound: u64,
    /// Stopping tolerance of adaptive refinement.
    #[arg(long, default_value = "1e-6", value_parser = parse_positive)]
    tol: f64,
    /// Double the bound until successive values agree to `--tol`.
    #[arg(long)]
    adaptive: bool,
    #[arg(long, default_value_t = 1 << 14, value_parser = clap::value_parser!(u64).range(10..))]
    max_bound: u64,
    #[arg(long, value_enum, default_value = "weight-minus-one")]
    q_order: QOrderArg,
}

impl TruncArgs {
    fn policy(&self) -> TruncationPolicy {
        TruncationPolicy {
            matrix_bound: self.bound,
            target_tol: self.tol,
            adaptive: self.adaptive,
            max_bound: self.max_bound.max(self.bound),
            q_order: self.q_order.into(),
            ..Default::default()
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Lines, double points and sextic of the Kummer plane.
    Config(ParamsArg),
    /// Membership in the Humbert components Δ = 4, 5 or 8.
    Humbert {
        #[command(flatten)]
        params: ParamsArg,
        #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(["4", "5", "8"])
              .map(|s| s.parse::<u8>().unwrap()))]
        check: u8,
    },
    /// The conic through q12, q23, q34, q45, q51.
    Conic(ParamsArg),
    /// Blow-up data and the formal cycle on the Δ = 5 conic.
    Cycle(ParamsArg),
    /// Regulator value at `(a1, a1 a3, a3)`.
    Regulator {
        #[command(flatten)]
        point: H4Point,
        /// Try to identify the ratio as an algebraic number.
        #[arg(long)]
        recognize: bool,
    },
    /// Regulator values over many points, in input order.
    RegulatorSweep {
        /// `A1,A3`; may be repeated.
        #[arg(long = "point", allow_hyphen_values = true, value_parser = parse_pair)]
        points: Vec<(Rat, Rat)>,
        /// File with one `A1,A3` per line (`#` starts a comment).
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        recognize: bool,
    },
    /// Néron–Severi lattice of a product of elliptic curves.
    Ns {
        #[command(subcommand)]
        command: NsCommand,
    },
    /// Higher Green's functions.
    Greens {
        #[command(subcommand)]
        command: GreensCommand,
    },
    /// Rational-curve table rows with invariant Δ.
    BwCases {
        #[arg(long)]
        delta: u64,
    },
    /// Hecke components `m = (Δ - x²)/4` of a Humbert surface.
    HeckeComponents {
        #[arg(long)]
        delta: u64,
    },
    /// Run the built-in consistency checks.
    Verify,
}

#[derive(Subcommand, Debug)]
enum NsCommand {
    /// Intersection number of two classes.
    Pair {
        /// `zero`, `isogeny:DEG` or `cm:D`.
        #[arg(long, value_parser = parse_module)]
        module: HomModule,
        /// Class `a,b[,u[,v]]` meaning `a f1 + b f2 + (u + v√D)`.
        #[arg(long, allow_hyphen_values = true, value_parser = parse_class)]
        d1: ClassArg,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_class)]
        d2: ClassArg,
    },
    /// Humbert norm `(D·Θ)² - 2D²`.
    HumbertNorm {
        #[arg(long, value_parser = parse_module)]
        module: HomModule,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_class)]
        d: ClassArg,
    },
    /// The CM cycle class for a fundamental discriminant.
    CmCycle {
        #[arg(long, allow_hyphen_values = true)]
        disc: i64,
    },
}

#[derive(Subcommand, Debug)]
enum GreensCommand {
    /// `G_k(z1, z2)`.
    Eval {
        #[arg(long, default_value_t = 2)]
        k: u32,
        #[command(flatten)]
        points: PointPair,
        #[command(flatten)]
        trunc: TruncArgs,
    },
    /// Hecke translate `G_s^m(z1, z2)`.
    Hecke {
        #[arg(long, default_value_t = 2)]
        s: u32,
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        m: u64,
        /// Sum over all determinant-m matrices instead of coset representatives.
        #[arg(long)]
        direct: bool,
        #[command(flatten)]
        points: PointPair,
        #[command(flatten)]
        trunc: TruncArgs,
    },
    /// Combination of Hecke translates weighted by a principal part.
    Combo {
        /// JSON file `{"coeffs": {"m": "c", ...}}`.
        #[arg(long)]
        pp: PathBuf,
        #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
        j: u32,
        #[command(flatten)]
        points: PointPair,
        #[command(flatten)]
        trunc: TruncArgs,
    },
    /// Compare `log|R|` with `Σ a_τ G₂(τ, y)` for user-supplied boundary data.
    CrossCheck {
        #[command(flatten)]
        point: H4Point,
        /// JSON file `[{"tau": "RE,IM", "a": "p/q"}, ...]`.
        #[arg(long)]
        boundary: PathBuf,
        #[arg(long, allow_hyphen_values = true, value_parser = parse_uh)]
        y: (Rat, Rat),
        #[command(flatten)]
        trunc: TruncArgs,
    },
}

fn parse_rat(s: &str) -> Result<Rat, String> {
    Rat::parse(s).map_err(|e| e.to_string())
}

fn parse_list(s: &str, n: usize) -> Result<Vec<Rat>, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != n {
        return Err(format!("expected {n} comma-separated values, got {}", parts.len()));
    }
    parts.into_iter().map(parse_rat).collect()
}

fn parse_params(s: &str) -> Result<(Rat, Rat, Rat), String> {
    let mut v = parse_list(s, 3)?.into_iter();
    Ok((v.next().unwrap(), v.next().unwrap(), v.next().unwrap()))
}

fn parse_pair(s: &str) -> Result<(Rat, Rat), String> {
    let mut v = parse_list(s, 2)?.into_iter();
    Ok((v.next().unwrap(), v.next().unwrap()))
}

fn parse_uh(s: &str) -> Result<(Rat, Rat), String> {
    let (re, im) = parse_pair(s)?;
    if im.signum() <= 0 {
        return Err("imaginary part must be positive".into());
    }
    Ok((re, im))
}

fn parse_positive(s: &str) -> Result<f64, String> {
    let r = parse_rat(s)?;
    if r.signum() <= 0 {
        return Err("must be positive".into());
    }
    Ok(r.to_f64())
}

fn parse_module(s: &str) -> Result<HomModule, String> {
    let s = s.trim();
    if s == "zero" {
        return Ok(HomModule::Zero);
    }
    let (kind, n) = s.split_once(':').ok_or("expected zero, isogeny:DEG or cm:D")?;
    match kind {
        "isogeny" => {
            let d: u64 = n.parse().map_err(|e| format!("{e}"))?;
            if d == 0 {
                return Err("isogeny degree must be positive".into());
            }
            Ok(HomModule::Isogeny { h_degree: d })
        }
        "cm" => {
            let d: i64 = n.parse().map_err(|e| format!("{e}"))?;
            if d >= 0 {
                return Err("CM discriminant must be negative".into());
            }
            Ok(HomModule::Cm { disc: d })
        }
        _ => Err(format!("unknown module kind {kind:?}")),
    }
}

/// `(a, b, u, v)` of a class on the command line.
#[derive(Clone, Debug)]
struct ClassArg([Rat; 4]);

fn parse_class(s: &str) -> Result<ClassArg, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if !(2..=4).contains(&parts.len()) {
        return Err("expected a,b[,u[,v]]".into());
    }
    let mut v: Vec<Rat> = parts.into_iter().map(parse_rat).collect::<Result<_, _>>()?;
    v.resize(4, Rat::zero());
    let [a, b, u, w]: [Rat; 4] = v.try_into().expect("four entries");
    Ok(ClassArg([a, b, u, w]))
}

/// Machine-readable error payload.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorObject {
    pub kind: String,
    pub code: i32,
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flag: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
}

impl From<&Error> for ErrorObject {
    fn from(e: &Error) -> Self {
        ErrorObject {
            kind: e.kind().to_string(),
            code: e.code(),
            message: e.to_string(),
            flag: None,
            m: match e {
                Error::OnSingularLocus { m } => *m,
                _ => None,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConicReport {
    pub conic: Conic,
    pub determinant: QuadVal,
    pub smooth: bool,
    /// `p4² - 4 p1 p2`.
    pub discriminant: QuadVal,
    pub printed_form_matches: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CycleReport {
    pub presentation: CyclePresentation,
    pub blowup: BlowupLocalData,
    pub boundary_vanishes: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub index: usize,
    pub a1: Rat,
    pub a3: Rat,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<crate::cycle::RegulatorResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorObject>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairReport {
    pub pairing: Rat,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub humbert_norm: Rat,
    pub self_pairing: Rat,
    pub theta_pairing: Rat,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CmCycleReport {
    pub disc: i64,
    pub z: NSClass,
    pub sigma_z: NSClass,
    /// `Z - σ*Z`.
    pub cycle: NSClass,
    pub self_pairing: Rat,
    /// `c` with `(c(Z - σ*Z))² = -1`.
    pub normalization: BigReal,
    pub basis: Vec<NSClass>,
    pub gram: Vec<Vec<Rat>>,
    pub signature: (usize, usize, usize),
}

#[derive(Deserialize)]
struct BoundaryEntry {
    tau: String,
    a: Rat,
}

enum Failure {
    Domain(Error),
    Usage { flag: String, message: String },
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

type Outcome = std::result::Result<(Value, Value), Failure>;

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("output types serialize")
}

fn moduli(p: &(Rat, Rat, Rat)) -> Result<ModuliParams, Error> {
    ModuliParams::from_rats(p.0.clone(), p.1.clone(), p.2.clone())
}

fn uh(p: &(Rat, Rat), digits: u32) -> Result<UHPoint, Error> {
    UHPoint::from_rats(&p.0, &p.1, digits)
}

fn read_file(path: &Path, flag: &str) -> std::result::Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Usage {
        flag: flag.into(),
        message: format!("cannot read {}: {e}", path.display()),
    })
}

fn exact_settings(precision: u32) -> Value {
    json!({ "precision": precision, "arithmetic": "exact", "branch_convention": BRANCH_CONVENTION })
}

fn greens_settings(precision: u32, policy: &TruncationPolicy) -> Value {
    json!({
        "precision": precision,
        "truncation": policy,
        "q_order": policy.q_order,
        "summation": "hyperbolic ball cosh d <= T(bound), double precision with compensated summation",
    })
}

fn regulator_settings(precision: u32, recognize: bool) -> Value {
    json!({
        "precision": precision,
        "branch_convention": BRANCH_CONVENTION,
        "recognize": recognize,
        "recognition_coeff_bound": crate::cycle::RECOGNITION_COEFF_BOUND,
    })
}

fn dispatch(cli: &Cli) -> Outcome {
    let prec = cli.precision;
    match &cli.command {
        Command::Config(p) => {
            let cfg = build_config(&moduli(&p.params)?)?;
            Ok((to_value(&cfg), exact_settings(prec)))
        }
        Command::Humbert { params, check } => {
            let p = moduli(&params.params)?;
            let result = match check {
                4 => json!({ "on_h4": h4_h8_factors(&p).0.is_zero() }),
                8 => json!({ "on_h8": h4_h8_factors(&p).1.is_zero() }),
                _ => {
                    let d = humbert5_discriminant(&p)?;
                    json!({ "on_h5": d.is_zero(), "discriminant": d })
                }
            };
            Ok((result, exact_settings(prec)))
        }
        Command::Conic(p) => {
            let m = moduli(&p.params)?;
            let conic = humbert5_conic(&m)?;
            let report = ConicReport {
                determinant: conic.det()?,
                smooth: conic.is_smooth()?,
                discriminant: humbert5_discriminant(&m)?,
                printed_form_matches: humbert5_conic_printed(&m).is_ok(),
                conic,
            };
            Ok((to_value(&report), exact_settings(prec)))
        }
        Command::Cycle(p) => {
            let m = moduli(&p.params)?;
            let presentation = build_cycle(&m)?;
            let report = CycleReport {
                boundary_vanishes: presentation.formal_boundary().is_empty(),
                blowup: blowup_data(&m, prec)?,
                presentation,
            };
            Ok((to_value(&report), exact_settings(prec)))
        }
        Command::Regulator { point, recognize } => {
            let r = regulator_h4(&point.a1, &point.a3, prec, *recognize)?;
            Ok((to_value(&r), regulator_settings(prec, *recognize)))
        }
        Command::RegulatorSweep { points, input, recognize } => {
            let mut all = points.clone();
            if let Some(path) = input {
                let text = read_file(path, "--input")?;
                for (n, line) in text.lines().enumerate() {
                    let line = line.split('#').next().unwrap_or("").trim();
                    if line.is_empty() {
                        continue;
                    }
                    all.push(parse_pair(line).map_err(|e| Failure::Usage {
                        flag: "--input".into(),
                        message: format!("{}:{}: {e}", path.display(), n + 1),
                    })?);
                }
            }
            if all.is_empty() {
                return Err(Failure::Usage {
                    flag: "--point".into(),
                    message: "no points given; use --point or --input".into(),
                });
            }
            let results = regulator_sweep(&all, prec, *recognize);
            let entries: Vec<SweepEntry> = all
                .iter()
                .zip(results)
                .enumerate()
                .map(|(index, ((a1, a3), r))| {
                    let (result, error) = match r {
                        Ok(r) => (Some(r), None),
                        Err(e) => (None, Some(ErrorObject::from(&e))),
                    };
                    SweepEntry {
                        index,
                        a1: a1.clone(),
                        a3: a3.clone(),
                        result,
                        error,
                    }
                })
                .collect();
            Ok((to_value(&entries), regulator_settings(prec, *recognize)))
        }
        Command::Ns { command } => ns_command(command, prec),
        Command::Greens { command } => greens_command(command, prec),
        Command::BwCases { delta } => Ok((to_value(&bw_cases(*delta)), exact_settings(prec))),
        Command::HeckeComponents { delta } => Ok((to_value(&hecke_components(*delta)), exact_settings(prec))),
        Command::Verify => {
            let report = verify::run_all();
            Ok((to_value(&report), json!({ "precision": verify::VERIFY_DIGITS })))
        }
    }
}

fn class(module: HomModule, v: &ClassArg) -> Result<NSClass, Error> {
    let v = &v.0;
    let phi = match module {
        HomModule::Zero if v[2].is_zero() && v[3].is_zero() => EndElt::zero(module),
        _ => EndElt::new(v[2].clone(), v[3].clone(), module)?,
    };
    Ok(NSClass::new(v[0].clone(), v[1].clone(), phi))
}

fn ns_command(cmd: &NsCommand, prec: u32) -> Outcome {
    let settings = exact_settings(prec);
    match cmd {
        NsCommand::Pair { module, d1, d2 } => {
            let pairing = ns_pair(&class(*module, d1)?, &class(*module, d2)?)?;
            Ok((to_value(&PairReport { pairing }), settings))
        }
        NsCommand::HumbertNorm { module, d } => {
            let d = class(*module, d)?;
            let report = NormReport {
                humbert_norm: humbert_norm(&d)?,
                self_pairing: ns_pair(&d, &d)?,
                theta_pairing: ns_pair(&d, &NSClass::theta(*module))?,
            };
            Ok((to_value(&report), settings))
        }
        NsCommand::CmCycle { disc } => {
            let z = cm_z(*disc)?;
            let (cycle, normalization) = cm_cycle(*disc, prec)?;
            let basis = cm_lattice_basis(*disc)?.to_vec();
            let gram = gram_matrix(&basis)?;
            let report = CmCycleReport {
                disc: *disc,
                sigma_z: sigma_star(&z),
                self_pairing: ns_pair(&cycle, &cycle)?,
                z,
                cycle,
                normalization,
                signature: signature(&gram),
                basis,
                gram,
            };
            Ok((to_value(&report), settings))
        }
    }
}

fn greens_command(cmd: &GreensCommand, prec: u32) -> Outcome {
    match cmd {
        GreensCommand::Eval { k, points, trunc } => {
            let policy = trunc.policy();
            let g = green_k(*k, &uh(&points.z1, prec)?, &uh(&points.z2, prec)?, &policy)?;
            Ok((to_value(&g), greens_settings(prec, &policy)))
        }
        GreensCommand::Hecke {
            s,
            m,
            direct,
            points,
            trunc,
        } => {
            let policy = trunc.policy();
            let (z1, z2) = (uh(&points.z1, prec)?, uh(&points.z2, prec)?);
            let g = if *direct {
                hecke_green_direct(*s, *m, &z1, &z2, &policy)?
            } else {
                hecke_green(*s, *m, &z1, &z2, &policy)?
            };
            let mut settings = greens_settings(prec, &policy);
            settings["method"] = json!(if *direct { "direct" } else { "cosets" });
            Ok((to_value(&g), settings))
        }
        GreensCommand::Combo { pp, j, points, trunc } => {
            let text = read_file(pp, "--pp")?;
            let f: PrincipalPart = serde_json::from_str(&text).map_err(|e| Failure::Usage {
                flag: "--pp".into(),
                message: format!("{}: {e}", pp.display()),
            })?;
            let policy = trunc.policy();
            let g = greens_combo(&f, *j, &uh(&points.z1, prec)?, &uh(&points.z2, prec)?, &policy)?;
            Ok((to_value(&g), greens_settings(prec, &policy)))
        }
        GreensCommand::CrossCheck {
            point,
            boundary,
            y,
            trunc,
        } => {
            let text = read_file(boundary, "--boundary")?;
            let bad = |message: String| Failure::Usage {
                flag: "--boundary".into(),
                message,
            };
            let entries: Vec<BoundaryEntry> =
                serde_json::from_str(&text).map_err(|e| bad(format!("{}: {e}", boundary.display())))?;
            let mut data = Vec::with_capacity(entries.len());
            for e in entries {
                let tau = parse_uh(&e.tau).map_err(|m| bad(format!("tau {:?}: {m}", e.tau)))?;
                data.push((uh(&tau, prec)?, e.a));
            }
            let policy = trunc.policy();
            let reg = regulator_h4(&point.a1, &point.a3, prec, false)?;
            let report = cross_check(&reg, &data, &uh(y, prec)?, &policy)?;
            let mut settings = greens_settings(prec, &policy);
            settings["branch_convention"] = json!(BRANCH_CONVENTION);
            Ok((to_value(&report), settings))
        }
    }
}

fn command_name(args: &[OsString]) -> String {
    let mut names = Vec::new();
    for a in args.iter().skip(1) {
        let s = a.to_string_lossy();
        if s.starts_with('-') {
            break;
        }
        names.push(s.into_owned());
        if !matches!(names[0].as_str(), "ns" | "greens") || names.len() == 2 {
            break;
        }
    }
    names.join(" ")
}

fn metadata(command: &str, settings: Value) -> Value {
    json!({
        "tool": "mcycle",
        "version": env!("CARGO_PKG_VERSION"),
        "command": command,
        "settings": settings,
    })
}

fn render(doc: &Value) -> String {
    serde_json::to_string_pretty(doc).expect("JSON values render")
}

fn usage_flag(e: &clap::Error) -> Option<String> {
    match e.get(ContextKind::InvalidArg) {
        Some(ContextValue::String(s)) => Some(s.clone()),
        Some(ContextValue::Strings(v)) => v.first().cloned(),
        _ => None,
    }
    .map(|s| s.split_whitespace().next().unwrap_or_default().to_string())
}

fn usage_document(command: &str, flag: Option<String>, message: String) -> String {
    let err = ErrorObject {
        kind: "Usage".into(),
        code: USAGE_CODE,
        message,
        flag,
        m: None,
    };
    render(&json!({ "error": err, "metadata": metadata(command, json!({})) }))
}

/// Parses `args` (including the program name) and executes the command.
/// Returns the process exit status and the text to print on stdout.
pub fn run<I, T>(args: I) -> (i32, String)
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let command = command_name(&args);
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => (EXIT_OK, e.to_string()),
                ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => (EXIT_USAGE, e.to_string()),
                _ => {
                    let rendered = e.render().to_string();
                    let first = rendered.lines().next().unwrap_or("").trim_start_matches("error: ").to_string();
                    (EXIT_USAGE, usage_document(&command, usage_flag(&e), first))
                }
            };
        }
    };
    match dispatch(&cli) {
        Ok((result, settings)) => {
            let failed = matches!(cli.command, Command::Verify) && result["all_passed"] == json!(false);
            let doc = json!({ "result": result, "metadata": metadata(&command, settings) });
            (if failed { EXIT_DOMAIN } else { EXIT_OK }, render(&doc))
        }
        Err(Failure::Domain(e)) => {
            let doc = json!({ "error": ErrorObject::from(&e), "metadata": metadata(&command, json!({ "precision": cli.precision })) });
            (EXIT_DOMAIN, render(&doc))
        }
        Err(Failure::Usage { flag, message }) => (EXIT_USAGE, usage_document(&command, Some(flag), message)),
    }
}

/// Parses a document produced by [`run`] and returns its `result` field.
pub fn result_of(doc: &str) -> Option<Value> {
    let v: Value = serde_json::from_str(doc).ok()?;
    v.get("result").cloned()
}
