//! Command-line front end: grid generation, residual verification, Bell
//! polynomial rendering, and Backlund relation checks.
//!
//! Exit codes: 0 success, 1 verification failure, 2 parse/usage error,
//! 3 degenerate grid (more than half the points singular).

use crate::backlund::{
    check_proposition, BacklundParams, BilinearPair, PropositionReport,
};
use crate::bell::{bell_generate, bell_p_polynomial, BellPolynomial};
use crate::descriptor::{BuiltSolution, SolutionDescriptor};
use crate::error::{Error, Result};
use crate::funcs::NamedFn;
use crate::grassmann::{GeneratorSet, GrassmannElement};
use crate::jet::{cx, Cx, Jet, JetOrder};
use crate::residual::{
    default_points, residual_bilinear, residual_blmp, residual_susy_components,
    BilinearForm, BilinearInput, ResidualReport,
};
use crate::solutions::Family;
use crate::superfield::{Point, SuperValue, Superfield};
use crate::susy::schroedinger_check;
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::sync::Arc;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAIL: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_DEGENERATE: i32 = 3;

#[derive(Parser)]
#[command(name = "blmp", version, about = "Solution grids and residual verification for an integrable (2+1)-dimensional equation and its supersymmetric extension")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a solution on a grid and emit CSV
    Generate(GenerateArgs),
    /// Run the residual suites for one or more solution descriptors
    Verify(VerifyArgs),
    /// Print a Bell polynomial in derivative symbols
    Bell(BellArgs),
    /// Evaluate the Backlund relations for a seed/candidate pair
    Backlund(BacklundArgs),
}

#[derive(Args)]
struct DescriptorSource {
    /// Path to a JSON descriptor (verify also accepts a JSON array)
    #[arg(long)]
    config: Option<String>,
    /// Family tag, combined with --params into a descriptor
    #[arg(long)]
    family: Option<String>,
    /// Family parameters as a JSON object
    #[arg(long)]
    params: Option<String>,
}

impl DescriptorSource {
    fn load(&self) -> Result<Vec<SolutionDescriptor>> {
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)?;
            let value: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| Error::Descriptor(e.to_string()))?;
            let list = match value {
                serde_json::Value::Array(items) => items,
                single => vec![single],
            };
            return list
                .into_iter()
                .map(|v| {
                    serde_json::from_value(v).map_err(|e| Error::Descriptor(e.to_string()))
                })
                .collect();
        }
        let family = self
            .family
            .as_ref()
            .ok_or_else(|| Error::Descriptor("need --config or --family".into()))?;
        let params = self.params.as_deref().unwrap_or("{}");
        let mut obj: serde_json::Map<String, serde_json::Value> =
            serde_json::from_str(params).map_err(|e| Error::Descriptor(e.to_string()))?;
        obj.insert("family".into(), serde_json::Value::String(family.clone()));
        let d = serde_json::from_value(serde_json::Value::Object(obj))
            .map_err(|e| Error::Descriptor(e.to_string()))?;
        Ok(vec![d])
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    source: DescriptorSource,
    /// Swept axes, e.g. x=-3:3:41,y=-3:3:41
    #[arg(long)]
    grid: String,
    /// Fixed values for the remaining axes, e.g. t=2
    #[arg(long, default_value = "")]
    fix: String,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    source: DescriptorSource,
    /// Relative tolerance override (defaults: 1e-9 classical, 1e-8 super)
    #[arg(long)]
    tol: Option<f64>,
    /// Sample-point seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of sample points
    #[arg(long, default_value_t = 100)]
    points: usize,
    /// Output path for the JSON report stream (stdout when omitted)
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct BellArgs {
    /// Polynomial kind: Y (full), B (binary), P (equal-argument)
    kind: String,
    /// Order spec, e.g. "3x", "2x1y", "3xDy", "0"
    spec: String,
}

#[derive(Args)]
struct BacklundArgs {
    /// Path to the JSON pair configuration
    #[arg(long)]
    config: String,
    /// Relative tolerance for the per-relation pass flags
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Sample-point seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of sample points
    #[arg(long, default_value_t = 40)]
    points: usize,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<String>,
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are successful exits; everything else is usage
            let code = if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Generate(a) => cmd_generate(&a),
        Command::Verify(a) => cmd_verify(&a),
        Command::Bell(a) => cmd_bell(&a),
        Command::Backlund(a) => cmd_backlund(&a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::NoConvergence(_) => EXIT_VERIFY_FAIL,
                _ => EXIT_PARSE,
            }
        }
    }
}

fn open_out(path: &Option<String>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(std::fs::File::create(p)?),
        None => Box::new(std::io::stdout().lock()),
    })
}

// ---------------------------------------------------------------------------
// generate
// ---------------------------------------------------------------------------

struct GridAxis {
    axis: usize,
    lo: f64,
    hi: f64,
    n: usize,
}

fn axis_index(name: &str) -> Result<usize> {
    match name {
        "x" => Ok(0),
        "y" => Ok(1),
        "t" => Ok(2),
        other => Err(Error::Descriptor(format!("unknown axis `{other}`"))),
    }
}

fn parse_grid(spec: &str) -> Result<Vec<GridAxis>> {
    let mut axes = vec![];
    for part in spec.split(',').filter(|s| !s.is_empty()) {
        let (name, range) = part
            .split_once('=')
            .ok_or_else(|| Error::Descriptor(format!("bad grid part `{part}`")))?;
        let fields: Vec<&str> = range.split(':').collect();
        if fields.len() != 3 {
            return Err(Error::Descriptor(format!(
                "grid range `{range}` must be lo:hi:n"
            )));
        }
        let lo: f64 = fields[0]
            .parse()
            .map_err(|_| Error::Descriptor(format!("bad number `{}`", fields[0])))?;
        let hi: f64 = fields[1]
            .parse()
            .map_err(|_| Error::Descriptor(format!("bad number `{}`", fields[1])))?;
        let n: usize = fields[2]
            .parse()
            .map_err(|_| Error::Descriptor(format!("bad count `{}`", fields[2])))?;
        if n < 2 || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Descriptor(
                "grid needs finite bounds and at least 2 points per axis".into(),
            ));
        }
        axes.push(GridAxis { axis: axis_index(name)?, lo, hi, n });
    }
    if axes.is_empty() {
        return Err(Error::Descriptor("empty grid".into()));
    }
    Ok(axes)
}

fn parse_fix(spec: &str) -> Result<Vec<(usize, f64)>> {
    let mut fixed = vec![];
    for part in spec.split(',').filter(|s| !s.is_empty()) {
        let (name, value) = part
            .split_once('=')
            .ok_or_else(|| Error::Descriptor(format!("bad fix part `{part}`")))?;
        let v: f64 = value
            .parse()
            .map_err(|_| Error::Descriptor(format!("bad number `{value}`")))?;
        fixed.push((axis_index(name)?, v));
    }
    Ok(fixed)
}

/// 17 significant digits, enough to round-trip any f64.
fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Component columns of one built solution at a point.
struct RowEval {
    values: Vec<Cx>,
    singular: bool,
}

fn eval_row(built: &BuiltSolution, p: Point) -> RowEval {
    let values: Result<Vec<Cx>> = match built {
        BuiltSolution::Classical(u) => {
            u.eval_u(p, JetOrder::SCALAR).map(|jet| vec![jet.value()])
        }
        BuiltSolution::SuperSoliton(sol) => super_components(&sol.phi, p),
        BuiltSolution::Superpartner { phi, .. } => super_components(phi, p),
    };
    match values {
        Ok(values) => RowEval { values, singular: false },
        Err(_) => RowEval { values: vec![], singular: true },
    }
}

/// u followed by the coefficient of each single odd generator in xi.
fn super_components(phi: &Superfield, p: Point) -> Result<Vec<Cx>> {
    let v = phi.eval(p, JetOrder::SCALAR)?;
    let mut out = vec![v.theta1.body(JetOrder::SCALAR).value()];
    for i in 0..phi.gens().len() {
        let c = v
            .theta0
            .coeff(1 << i)
            .map(|j| j.value())
            .unwrap_or_default();
        out.push(c);
    }
    Ok(out)
}

fn component_names(built: &BuiltSolution) -> Vec<String> {
    match built {
        BuiltSolution::Classical(_) => vec!["u".into()],
        BuiltSolution::SuperSoliton(sol) => {
            let mut names = vec!["u".into()];
            for g in sol.phi.gens().names() {
                names.push(format!("xi_{g}"));
            }
            names
        }
        BuiltSolution::Superpartner { phi, .. } => {
            let mut names = vec!["u".into()];
            for g in phi.gens().names() {
                names.push(format!("xi_{g}"));
            }
            names
        }
    }
}

fn cmd_generate(args: &GenerateArgs) -> Result<i32> {
    let descriptors = args.source.load()?;
    let [descriptor] = descriptors.as_slice() else {
        return Err(Error::Descriptor(
            "generate takes exactly one descriptor".into(),
        ));
    };
    let built = descriptor.build()?;
    let axes = parse_grid(&args.grid)?;
    let fixed = parse_fix(&args.fix)?;
    let mut covered = [false; 3];
    for a in &axes {
        covered[a.axis] = true;
    }
    let mut base = [0.0f64; 3];
    for (axis, v) in &fixed {
        if covered[*axis] {
            return Err(Error::Descriptor("axis both swept and fixed".into()));
        }
        covered[*axis] = true;
        base[*axis] = *v;
    }
    if !covered.iter().all(|c| *c) {
        return Err(Error::Descriptor(
            "every axis must be swept (--grid) or fixed (--fix)".into(),
        ));
    }

    let names = component_names(&built);
    let mut header: Vec<String> = ["x", "y", "t"].iter().map(|s| s.to_string()).collect();
    for n in &names {
        header.push(format!("{n}_re"));
        header.push(format!("{n}_im"));
    }

    let mut rows = vec![];
    let mut singular = 0usize;
    let mut idx = vec![0usize; axes.len()];
    loop {
        let mut p = base;
        for (k, a) in axes.iter().enumerate() {
            p[a.axis] = a.lo + (a.hi - a.lo) * idx[k] as f64 / (a.n - 1) as f64;
        }
        let row = eval_row(&built, p);
        let mut cells: Vec<String> = p.iter().map(|v| fmt_f64(*v)).collect();
        if row.singular {
            singular += 1;
            for _ in &names {
                cells.push("nan".into());
                cells.push("nan".into());
            }
        } else {
            for v in row.values {
                cells.push(fmt_f64(v.re));
                cells.push(fmt_f64(v.im));
            }
        }
        rows.push(cells.join(","));
        // odometer over the swept axes, last axis fastest
        let mut k = axes.len();
        loop {
            if k == 0 {
                break;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < axes[k].n {
                break;
            }
            idx[k] = 0;
            if k == 0 {
                k = usize::MAX;
                break;
            }
        }
        if k == usize::MAX {
            break;
        }
    }

    let mut out = open_out(&args.out)?;
    writeln!(out, "{}", header.join(","))?;
    for r in &rows {
        writeln!(out, "{r}")?;
    }
    if singular * 2 > rows.len() {
        return Ok(EXIT_DEGENERATE);
    }
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

pub const DEFAULT_TOL_CLASSICAL: f64 = 1e-9;
pub const DEFAULT_TOL_SUPER: f64 = 1e-8;

#[derive(Serialize)]
struct VerifyRecord {
    descriptor: SolutionDescriptor,
    family: String,
    report: ResidualReport,
    tol: f64,
    pass: bool,
}

/// The residual suites one descriptor is subject to.
fn verify_reports(built: &BuiltSolution, seed: u64, n: usize) -> Vec<(ResidualReport, f64)> {
    let pts = default_points(seed, n);
    match built {
        BuiltSolution::Classical(u) => {
            let mut reports = vec![(residual_blmp(u, &pts), DEFAULT_TOL_CLASSICAL)];
            match u.family {
                Family::NSoliton { .. } => reports.push((
                    residual_bilinear(
                        BilinearForm::KdvEq4,
                        &BilinearInput::Tau(u),
                        &NamedFn::Zero,
                        &pts,
                    ),
                    DEFAULT_TOL_CLASSICAL,
                )),
                Family::TravelingWave => reports.push((
                    residual_bilinear(
                        BilinearForm::GeneralEq6,
                        &BilinearInput::Tau(u),
                        &u.m().clone(),
                        &pts,
                    ),
                    DEFAULT_TOL_CLASSICAL,
                )),
                _ => {}
            }
            reports
        }
        BuiltSolution::SuperSoliton(sol) => vec![
            (
                residual_bilinear(
                    BilinearForm::SusySbili,
                    &BilinearInput::Super(&sol.g),
                    &NamedFn::Zero,
                    &pts,
                ),
                DEFAULT_TOL_SUPER,
            ),
            (residual_susy_components(&sol.phi, &pts), DEFAULT_TOL_SUPER),
        ],
        BuiltSolution::Superpartner { phi, params } => {
            let w: Vec<f64> = (0..=40).map(|i| -2.0 + 0.1 * i as f64).collect();
            vec![
                (schroedinger_check(params, &w), DEFAULT_TOL_SUPER),
                (residual_susy_components(phi, &pts), DEFAULT_TOL_SUPER),
            ]
        }
    }
}

fn cmd_verify(args: &VerifyArgs) -> Result<i32> {
    let descriptors = args.source.load()?;
    let mut out = open_out(&args.out)?;
    let mut all_pass = true;
    for d in &descriptors {
        let built = d.build()?;
        for (report, default_tol) in verify_reports(&built, args.seed, args.points) {
            let tol = args.tol.unwrap_or(default_tol);
            let pass = report.passes(tol);
            all_pass &= pass;
            let record = VerifyRecord {
                descriptor: d.clone(),
                family: match &built {
                    BuiltSolution::Classical(u) => u.family.to_string(),
                    BuiltSolution::SuperSoliton(_) => "super_soliton".into(),
                    BuiltSolution::Superpartner { .. } => "superpartner".into(),
                },
                report,
                tol,
                pass,
            };
            writeln!(out, "{}", serde_json::to_string(&record)?)?;
        }
    }
    Ok(if all_pass { EXIT_OK } else { EXIT_VERIFY_FAIL })
}

// ---------------------------------------------------------------------------
// bell
// ---------------------------------------------------------------------------

/// Parses specs like "3x", "2x1y", "3xDy", "0" into classical orders and
/// supercovariant flags.
fn parse_bell_spec(spec: &str) -> Result<(usize, usize, usize, u8, u8)> {
    let (mut lx, mut ly, mut lt) = (0usize, 0usize, 0usize);
    let (mut kx, mut ky) = (0u8, 0u8);
    let bytes = spec.as_bytes();
    let mut i = 0;
    if spec == "0" {
        return Ok((0, 0, 0, 0, 0));
    }
    while i < bytes.len() {
        if bytes[i] == b'D' {
            i += 1;
            match bytes.get(i) {
                Some(b'x') => kx += 1,
                Some(b'y') => ky += 1,
                _ => return Err(Error::Descriptor(format!("bad spec `{spec}`"))),
            }
            i += 1;
            continue;
        }
        let start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        if start == i {
            return Err(Error::Descriptor(format!("bad spec `{spec}`")));
        }
        let count: usize = spec[start..i]
            .parse()
            .map_err(|_| Error::Descriptor(format!("bad spec `{spec}`")))?;
        match bytes.get(i) {
            Some(b'x') => lx += count,
            Some(b'y') => ly += count,
            Some(b't') => lt += count,
            _ => return Err(Error::Descriptor(format!("bad spec `{spec}`"))),
        }
        i += 1;
    }
    if kx > 1 || ky > 1 {
        return Err(Error::Descriptor(
            "supercovariant orders are at most 1 per variable".into(),
        ));
    }
    Ok((lx, ly, lt, kx, ky))
}

fn bell_render(kind: &str, spec: &str) -> Result<String> {
    let (lx, ly, lt, kx, ky) = parse_bell_spec(spec)?;
    let poly: BellPolynomial = match kind {
        "Y" | "y" => bell_generate(lx, ly, lt, kx, ky)?,
        "B" | "b" => crate::bell::bell_binary(&bell_generate(lx, ly, lt, kx, ky)?),
        "P" | "p" => bell_p_polynomial(lx, ly, lt, kx, ky)?,
        other => {
            return Err(Error::Descriptor(format!(
                "unknown polynomial kind `{other}` (expected Y, B, or P)"
            )))
        }
    };
    Ok(poly.to_string())
}

fn cmd_bell(args: &BellArgs) -> Result<i32> {
    println!("{}", bell_render(&args.kind, &args.spec)?);
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// backlund
// ---------------------------------------------------------------------------

/// One exponential term of a tau/mu factor: coeff * e^{kappa x + rho y +
/// omega t}, placed in the even body, an odd generator slot, or the theta
/// slot.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExpTerm {
    #[serde(default = "cx_one")]
    pub coeff: Cx,
    #[serde(default)]
    pub kappa: Cx,
    #[serde(default)]
    pub rho: Cx,
    #[serde(default)]
    pub omega: Cx,
    /// odd generator name carrying this term (body when omitted)
    #[serde(default)]
    pub generator: Option<String>,
    /// place the term in the theta component
    #[serde(default)]
    pub theta: bool,
}

fn cx_one() -> Cx {
    cx(1.0, 0.0)
}

/// tau or mu as constant + exponential terms.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TauDescriptor {
    #[serde(default = "cx_one")]
    pub constant: Cx,
    #[serde(default)]
    pub terms: Vec<ExpTerm>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PairDescriptor {
    pub tau: TauDescriptor,
    pub mu: TauDescriptor,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BacklundConfig {
    pub seed: PairDescriptor,
    pub candidate: PairDescriptor,
    #[serde(default = "cx_one")]
    pub alpha: Cx,
    #[serde(default)]
    pub beta: Cx,
    /// odd constant gamma = coeff * generator
    #[serde(default)]
    pub gamma: Option<(String, Cx)>,
    /// declaration-order generator names shared by all factors
    #[serde(default)]
    pub generators: Vec<String>,
    /// theta component of Lambda
    #[serde(default)]
    pub c: NamedFn,
}

fn build_tau(gens: &Arc<GeneratorSet>, d: &TauDescriptor) -> Result<Superfield> {
    for t in &d.terms {
        if let Some(name) = &t.generator {
            gens.index(name)?;
        }
    }
    let gens2 = gens.clone();
    let d = d.clone();
    Ok(Superfield::new(gens.clone(), move |p, ord| {
        let mut theta0 = GrassmannElement::scalar(
            gens2.clone(),
            Jet::constant(d.constant, ord),
        );
        let mut theta1 = GrassmannElement::zero(gens2.clone());
        for t in &d.terms {
            let x = Jet::var_re(crate::jet::Var::X, p[0], ord);
            let y = Jet::var_re(crate::jet::Var::Y, p[1], ord);
            let tj = Jet::var_re(crate::jet::Var::T, p[2], ord);
            let e = x
                .scale(t.kappa)
                .add(&y.scale(t.rho))
                .add(&tj.scale(t.omega))
                .exp()
                .scale(t.coeff);
            let elem = match &t.generator {
                Some(name) => GrassmannElement::generator(gens2.clone(), gens2.index(name)?, e),
                None => GrassmannElement::scalar(gens2.clone(), e),
            };
            if t.theta {
                theta1 = theta1.add(&elem)?;
            } else {
                theta0 = theta0.add(&elem)?;
            }
        }
        SuperValue::new(theta0, theta1)
    }))
}

#[derive(Serialize)]
struct BacklundRecord {
    relations: [ResidualReport; 4],
    relation_pass: [bool; 4],
    p1: ResidualReport,
    p2: ResidualReport,
    grading_violations: usize,
    tol: f64,
}

fn backlund_record(rep: &PropositionReport, tol: f64) -> BacklundRecord {
    BacklundRecord {
        relations: rep.relations.clone(),
        relation_pass: [
            rep.relations[0].passes(tol),
            rep.relations[1].passes(tol),
            rep.relations[2].passes(tol),
            rep.relations[3].passes(tol),
        ],
        p1: rep.p1.clone(),
        p2: rep.p2.clone(),
        grading_violations: rep.grading_violations,
        tol,
    }
}

fn cmd_backlund(args: &BacklundArgs) -> Result<i32> {
    let text = std::fs::read_to_string(&args.config)?;
    let cfg: BacklundConfig =
        serde_json::from_str(&text).map_err(|e| Error::Descriptor(e.to_string()))?;
    let gens = if cfg.generators.is_empty() {
        GeneratorSet::new(vec!["zeta"])?
    } else {
        GeneratorSet::new(cfg.generators.clone())?
    };
    let seed = BilinearPair::new(
        build_tau(&gens, &cfg.seed.tau)?,
        build_tau(&gens, &cfg.seed.mu)?,
    )?;
    let cand = BilinearPair::new(
        build_tau(&gens, &cfg.candidate.tau)?,
        build_tau(&gens, &cfg.candidate.mu)?,
    )?;
    let gamma = match &cfg.gamma {
        Some((name, coeff)) => GrassmannElement::generator(
            gens.clone(),
            gens.index(name)?,
            Jet::constant(*coeff, JetOrder::SCALAR),
        ),
        None => GrassmannElement::zero(gens.clone()),
    };
    let params = BacklundParams { alpha: cfg.alpha, beta: cfg.beta, gamma };
    let pts = default_points(args.seed, args.points);
    let rep = check_proposition(&seed, &cand, &params, &cfg.c, &pts)?;
    let record = backlund_record(&rep, args.tol);
    let mut out = open_out(&args.out)?;
    writeln!(out, "{}", serde_json::to_string_pretty(&record)?)?;
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------

pub fn main_from_env() -> i32 {
    run(std::env::args_os())
}
