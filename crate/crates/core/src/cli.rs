//! The `dkwaves` command-line front end.
//!
//! Four subcommands share one set of flags ([`RunConfig`]):
//!
//! * `eval` tabulates `U` (or a Dirac spinor) on a grid or at random points;
//! * `certify` runs every residual check and writes a JSON report;
//! * `expand` reports the expansion of the half-integer part of `V` over
//!   Dirac waves;
//! * `curved-scan` tabulates the curved-space obstruction against `χ`.
//!
//! A flat `key = value` file given by `--config` supplies defaults; flags on
//! the command line win. Exit codes: 0 success, 1 a check failed, 2 usage or
//! precondition error.

use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::curved::{self, CurvedRadialParams, Geometry};
use crate::error::invalid;
use crate::fermion_map::{self, GaugeOrdering};
use crate::fields::{self, BosonKind, BosonModeSpec, DiracModeSpec, SpacetimePoint, DEFAULT_FD_STEP};
use crate::radial::{self, RadialParams, Substitution};
use crate::wigner::{self, AngularPoint, HalfAngleFactor, IdentityKind};
use crate::{clifford, Error, HalfInt, Result, Sign};

pub const SCHEMA_VERSION: u32 = 1;

/// Seed used when neither `--seed` nor `DKWAVES_SEED` is given.
pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Parser, Debug)]
#[command(name = "dkwaves", version, about = "Spherical Dirac-Kahler waves: evaluation and certification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate the field matrix U, or a Dirac spinor with --kind dirac.
    #[command(args_override_self = true)]
    Eval(RunConfig),
    /// Run all residual checks and write a JSON report.
    #[command(args_override_self = true)]
    Certify(RunConfig),
    /// Report the expansion of the half-integer part over Dirac waves.
    #[command(args_override_self = true)]
    Expand(RunConfig),
    /// Tabulate the coefficient gap and the overdetermination residual on the sphere.
    #[command(args_override_self = true)]
    CurvedScan(RunConfig),
}

/// Which solution family a run evaluates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeKind {
    Boson(BosonKind),
    Dirac,
}

impl FromStr for ModeKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "dirac" | "Dirac" | "fermion" => Ok(ModeKind::Dirac),
            other => other.parse().map(ModeKind::Boson),
        }
    }
}

impl fmt::Display for ModeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModeKind::Boson(k) => k.fmt(f),
            ModeKind::Dirac => f.write_str("dirac"),
        }
    }
}

/// Output format.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// One grid axis: a single value `v` or `lo:hi:count` with both ends included.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridAxis {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl GridAxis {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.lo];
        }
        let step = (self.hi - self.lo) / (self.count - 1) as f64;
        (0..self.count).map(|i| if i + 1 == self.count { self.hi } else { self.lo + i as f64 * step }).collect()
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> f64 {
        if self.count == 1 || self.lo == self.hi {
            self.lo
        } else {
            rng.gen_range(self.lo..=self.hi)
        }
    }
}

impl FromStr for GridAxis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| invalid(format!("'{t}' is not a number")));
        let parts: Vec<&str> = s.split(':').collect();
        let axis = match parts.as_slice() {
            [v] => {
                let v = num(v)?;
                GridAxis { lo: v, hi: v, count: 1 }
            }
            [lo, hi, n] => {
                let count = n.trim().parse::<usize>().map_err(|_| invalid(format!("'{n}' is not a point count")))?;
                GridAxis { lo: num(lo)?, hi: num(hi)?, count }
            }
            _ => return Err(invalid(format!("grid '{s}' must be 'value' or 'lo:hi:count'"))),
        };
        if axis.count < 1 {
            return Err(invalid("grid counts must be at least 1"));
        }
        if !(axis.lo.is_finite() && axis.hi.is_finite()) || axis.hi < axis.lo {
            return Err(invalid(format!("grid '{s}' needs finite bounds with lo <= hi")));
        }
        Ok(axis)
    }
}

/// Flags shared by every subcommand.
#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Solution family: I, II, J0 or dirac.
    #[arg(long, default_value = "I")]
    pub kind: ModeKind,
    /// Total angular momentum (half-odd for dirac, e.g. 3/2).
    #[arg(long, default_value = "1")]
    pub j: HalfInt,
    /// Projection quantum number.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub m: HalfInt,
    /// Parity label.
    #[arg(long, default_value = "+", allow_hyphen_values = true)]
    pub delta: Sign,
    /// Sign of the linear constraint between the two radial quartets.
    #[arg(long, default_value = "+", allow_hyphen_values = true)]
    pub lambda: Sign,
    #[arg(long, default_value_t = 1.25)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0.75)]
    pub mass: f64,
    /// Spinor slot (1 to 4) for --kind dirac.
    #[arg(long, default_value_t = 1)]
    pub channel: u8,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub t: GridAxis,
    #[arg(long, default_value = "1:5:5")]
    pub r: GridAxis,
    #[arg(long, default_value = "0.4:2.7:5")]
    pub theta: GridAxis,
    #[arg(long, default_value = "0.3:5.9:5")]
    pub phi: GridAxis,
    /// Radial angle grid for curved-scan.
    #[arg(long, default_value = "0.1:1.5:15")]
    pub chi: GridAxis,
    /// Draw this many uniform random points inside the grid ranges instead of the grid.
    #[arg(long)]
    pub random_points: Option<usize>,
    #[arg(long, env = "DKWAVES_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Finite-difference step of the residual operators.
    #[arg(long, default_value_t = DEFAULT_FD_STEP)]
    pub h: f64,
    /// csv or json (certify defaults to json, everything else to csv).
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// File of `key = value` defaults.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Replace every certify tolerance by this value.
    #[arg(long)]
    pub tolerance_override: Option<f64>,
    /// Largest J swept by certify.
    #[arg(long, default_value_t = 3)]
    pub j_max: i32,
}

impl RunConfig {
    fn check(&self) -> Result<()> {
        if !(self.h > 0.0 && self.h.is_finite()) {
            return Err(invalid(format!("h = {} must be positive", self.h)));
        }
        if self.random_points == Some(0) {
            return Err(invalid("--random-points must be at least 1"));
        }
        if self.j_max < 1 {
            return Err(invalid(format!("--j-max must be at least 1, got {}", self.j_max)));
        }
        if let Some(t) = self.tolerance_override {
            if !(t >= 0.0) {
                return Err(invalid(format!("tolerance {t} must be non-negative")));
            }
        }
        Ok(())
    }

    /// The grid in `t, r, θ, φ` order (last index fastest), or the seeded
    /// random draw.
    pub fn points(&self) -> Vec<SpacetimePoint> {
        if let Some(n) = self.random_points {
            let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
            return (0..n)
                .map(|_| {
                    let t = self.t.sample(&mut rng);
                    let r = self.r.sample(&mut rng);
                    let theta = self.theta.sample(&mut rng);
                    let phi = self.phi.sample(&mut rng);
                    SpacetimePoint::new(t, r, theta, phi)
                })
                .collect();
        }
        let mut out = Vec::new();
        for &t in &self.t.values() {
            for &r in &self.r.values() {
                for &theta in &self.theta.values() {
                    for &phi in &self.phi.values() {
                        out.push(SpacetimePoint::new(t, r, theta, phi));
                    }
                }
            }
        }
        out
    }

    fn integer(&self, name: &str, v: HalfInt) -> Result<i32> {
        v.as_int().ok_or_else(|| invalid(format!("{name} = {v} must be an integer for kind {}", self.kind)))
    }

    pub fn boson_spec(&self) -> Result<BosonModeSpec> {
        let ModeKind::Boson(kind) = self.kind else {
            return Err(invalid("this command needs a boson kind (I, II or J0)"));
        };
        let spec = BosonModeSpec {
            epsilon: self.epsilon,
            mass: self.mass,
            j: self.integer("J", self.j)?,
            m: self.integer("M", self.m)?,
            delta: self.delta,
            lambda: self.lambda,
            kind,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn dirac_spec(&self) -> Result<DiracModeSpec> {
        let spec = DiracModeSpec {
            epsilon: self.epsilon,
            mass: self.mass,
            j: self.j,
            m: self.m,
            delta: self.delta,
            channel: self.channel,
        };
        spec.validate()?;
        Ok(spec)
    }

    fn format_or(&self, default: Format) -> Format {
        self.format.unwrap_or(default)
    }
}

/// A cell of an output table.
#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Missing,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => v.to_string(),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Missing => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => json!(v),
            Cell::Int(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Missing => Value::Null,
        }
    }
}

/// A rectangular table with named columns.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn render(&self, format: Format) -> Result<Vec<u8>> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                let io = |e: csv::Error| invalid(format!("csv output failed: {e}"));
                w.write_record(&self.columns).map_err(io)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(Cell::csv)).map_err(io)?;
                }
                w.into_inner().map_err(|e| invalid(format!("csv output failed: {e}")))
            }
            Format::Json => {
                let rows: Vec<Value> = self.rows.iter().map(|r| Value::Array(r.iter().map(Cell::json).collect())).collect();
                let doc = json!({ "schema_version": SCHEMA_VERSION, "columns": self.columns, "rows": rows });
                Ok(to_json_bytes(&doc))
            }
        }
    }
}

fn to_json_bytes<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("report values serialize");
    out.push(b'\n');
    out
}

fn coordinate_cells(p: &SpacetimePoint) -> Vec<Cell> {
    vec![Cell::Num(p.t), Cell::Num(p.r), Cell::Num(p.theta), Cell::Num(p.phi)]
}

fn coordinate_columns() -> Vec<String> {
    ["t", "r", "theta", "phi"].iter().map(|s| s.to_string()).collect()
}

/// Field values at every point of the run: 16 complex entries of `U`
/// (`Uab_re`, `Uab_im`, row-major, 1-based) or 4 of `Ψ`.
pub fn cmd_eval(cfg: &RunConfig) -> Result<Table> {
    let points = cfg.points();
    let mut columns = coordinate_columns();
    let rows: Vec<Vec<Cell>> = match cfg.kind {
        ModeKind::Dirac => {
            let spec = cfg.dirac_spec()?;
            for a in 1..=4 {
                columns.push(format!("psi{a}_re"));
                columns.push(format!("psi{a}_im"));
            }
            points
                .par_iter()
                .map(|p| {
                    let psi = fields::eval_psi(&spec, p)?;
                    let mut row = coordinate_cells(p);
                    row.extend(psi.iter().flat_map(|z| [Cell::Num(z.re), Cell::Num(z.im)]));
                    Ok(row)
                })
                .collect::<Result<_>>()?
        }
        ModeKind::Boson(_) => {
            let spec = cfg.boson_spec()?;
            for a in 1..=4 {
                for b in 1..=4 {
                    columns.push(format!("U{a}{b}_re"));
                    columns.push(format!("U{a}{b}_im"));
                }
            }
            points
                .par_iter()
                .map(|p| {
                    let u = fields::eval_u(&spec, p)?;
                    let mut row = coordinate_cells(p);
                    for a in 0..4 {
                        for b in 0..4 {
                            row.push(Cell::Num(u[(a, b)].re));
                            row.push(Cell::Num(u[(a, b)].im));
                        }
                    }
                    Ok(row)
                })
                .collect::<Result<_>>()?
        }
    };
    Ok(Table { columns, rows })
}

/// Expansion report per point: the branch, closed-form coefficients,
/// fitted coefficients and per-column residuals.
pub fn cmd_expand(cfg: &RunConfig) -> Result<Table> {
    let spec = cfg.boson_spec()?;
    fermion_map::expansion_case(&spec)?;
    let mut columns = coordinate_columns();
    columns.extend(["branch", "twice_j", "c1", "c2"].map(String::from));
    columns.extend((1..=4).map(|k| format!("fitted{k}")));
    columns.extend((1..=4).map(|k| format!("residual{k}")));
    columns.push("scale".into());
    let rows = cfg
        .points()
        .par_iter()
        .map(|p| {
            let rep = fermion_map::verify_expansion(&spec, p)?;
            let mut row = coordinate_cells(p);
            row.push(Cell::Text(rep.branch.to_string()));
            row.push(Cell::Int(i64::from(rep.twice_j)));
            row.push(Cell::Num(rep.coefficients.0));
            row.push(Cell::Num(rep.coefficients.1));
            row.extend(rep.fitted.iter().map(|f| f.map_or(Cell::Missing, Cell::Num)));
            row.extend(rep.column_residuals.iter().map(|&r| Cell::Num(r)));
            row.push(Cell::Num(rep.scale));
            Ok(row)
        })
        .collect::<Result<_>>()?;
    Ok(Table { columns, rows })
}

/// `chi, gap, measured_gap, dynamical_residual` along the `--chi` grid.
/// `dynamical_residual` is the overdetermination residual divided by the
/// local solution norm, which follows `tan(χ/2)`.
pub fn cmd_curved_scan(cfg: &RunConfig) -> Result<Table> {
    let j = cfg.integer("J", cfg.j)?;
    let params = CurvedRadialParams { epsilon: cfg.epsilon, mass: cfg.mass, j };
    let chis = cfg.chi.values();
    let witness = curved::overdetermination_witness(&params, cfg.chi.lo, cfg.chi.hi, cfg.chi.count)?;
    let (f, g) = (0.8, -0.35);
    let rows = chis
        .iter()
        .zip(&witness)
        .map(|(&chi, w)| {
            Ok(vec![
                Cell::Num(chi),
                Cell::Num(curved::obstruction_gap(j, chi)?),
                Cell::Num(curved::measured_gap(Geometry::Sphere, &params, chi, (f, g))?),
                Cell::Num(w.ratio()),
            ])
        })
        .collect::<Result<_>>()?;
    let columns = ["chi", "gap", "measured_gap", "dynamical_residual"].map(String::from).to_vec();
    Ok(Table { columns, rows })
}

/// One line of the certification report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub equation: String,
    pub max_residual: Option<f64>,
    pub tolerance: f64,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertifyReport {
    pub schema_version: u32,
    pub checks: Vec<CheckRecord>,
    pub all_pass: bool,
}

fn record(name: &str, equation: &str, tolerance: f64, outcome: Result<f64>) -> CheckRecord {
    let (max_residual, error) = match outcome {
        Ok(v) => (Some(v), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let pass = max_residual.is_some_and(|v| v.is_finite() && v <= tolerance);
    CheckRecord {
        name: name.into(),
        equation: equation.into(),
        max_residual,
        tolerance,
        verdict: if pass { Verdict::Pass } else { Verdict::Fail },
        error,
    }
}

fn max_of<I: IntoParallelIterator<Item = Result<f64>>>(items: I) -> Result<f64> {
    let all: Vec<f64> = items.into_par_iter().collect::<Result<_>>()?;
    Ok(all.into_iter().fold(0.0, f64::max))
}

fn boson_specs(cfg: &RunConfig, kind: BosonKind) -> Vec<BosonModeSpec> {
    let js: Vec<i32> = if kind == BosonKind::J0 { vec![0] } else { (1..=cfg.j_max).collect() };
    let mut out = Vec::new();
    for j in js {
        for m in -j..=j {
            for delta in Sign::BOTH {
                for lambda in Sign::BOTH {
                    out.push(BosonModeSpec { epsilon: cfg.epsilon, mass: cfg.mass, j, m, delta, lambda, kind });
                }
            }
        }
    }
    out
}

fn product<'a, A: Sync, B: Sync>(a: &'a [A], b: &'a [B]) -> Vec<(&'a A, &'a B)> {
    a.iter().flat_map(|x| b.iter().map(move |y| (x, y))).collect()
}

/// Runs the full check suite over `J ≤ j_max`, all `M`, both signs of `Δ`
/// and `λ`, at the configured points.
pub fn cmd_certify(cfg: &RunConfig) -> Result<CertifyReport> {
    if !(cfg.mass >= 0.0 && cfg.epsilon > cfg.mass) {
        return Err(invalid(format!(
            "need epsilon > mass >= 0, got epsilon = {}, mass = {}",
            cfg.epsilon, cfg.mass
        )));
    }
    let points = cfg.points();
    let angular: Vec<AngularPoint> = points.iter().map(SpacetimePoint::angular).collect();
    let radii: Vec<f64> = points.iter().map(|p| p.r).collect();
    let h = cfg.h;
    let tol = |t: f64| cfg.tolerance_override.unwrap_or(t);
    let jm: Vec<(i32, i32)> = (1..=cfg.j_max).flat_map(|j| (-j..=j).map(move |m| (j, m))).collect();
    let kind_i = boson_specs(cfg, BosonKind::I);
    let kind_ii = boson_specs(cfg, BosonKind::II);
    let kind_j0 = boson_specs(cfg, BosonKind::J0);
    let all_bosons: Vec<BosonModeSpec> = [kind_i.clone(), kind_ii.clone(), kind_j0.clone()].concat();
    let mut checks = Vec::new();

    let identities = max_of(product(&jm, &angular).into_par_iter().map(|(&(j, m), &p)| {
        IdentityKind::ALL
            .iter()
            .map(|&k| wigner::derivative_identity_residual(k, j, m, p))
            .try_fold(0.0, |acc: f64, r| r.map(|r| acc.max(r)))
    }));
    checks.push(record("derivative-identities", "1.3a", tol(1e-9), identities));

    let coupling_jm: Vec<(i32, i32)> = (0..=cfg.j_max).flat_map(|j| (-j..=j).map(move |m| (j, m))).collect();
    let coupling = max_of(product(&coupling_jm, &angular).into_par_iter().map(|(&(j, m), &p)| {
        let mut worst: f64 = 0.0;
        for f in HalfAngleFactor::ALL {
            for sigma in (-1..=1).filter(|s: &i32| s.abs() <= j) {
                let e = wigner::coupling_expand(f, sigma, j, m)?;
                let lhs = f.eval(p) * wigner::d_row(j, m, sigma, p);
                worst = worst.max((lhs - e.eval(p)).norm());
            }
        }
        Ok(worst)
    }));
    checks.push(record("half-angle-coupling", "sec2-coupling", tol(1e-11), coupling));

    let sigma = max_of(product(&jm, &angular).into_par_iter().map(|(&(j, m), &p)| fields::sigma_action_check(j, m, p)));
    checks.push(record("angular-operator", "1.3b", tol(1e-8), sigma));

    for (name, tag, specs) in [
        ("master-equation-type-I", "1.10a", &kind_i),
        ("master-equation-type-II", "1.10c", &kind_ii),
        ("master-equation-J0", "1.14", &kind_j0),
    ] {
        let res = max_of(product(specs, &points).into_par_iter().map(|(s, p)| Ok(fields::dk_residual(s, p, h)?.relative())));
        checks.push(record(name, tag, tol(1e-6), res));
    }

    let parity = max_of(product(&all_bosons, &points).into_par_iter().map(|(s, p)| {
        let u = fields::eval_u(s, p)?;
        let pu = clifford::parity_matrix_action(&fields::eval_u(s, &p.reflected())?);
        let expected = fields::expected_parity(s.j, s.delta).value();
        Ok((pu - u * crate::C64::from(expected)).norm() / u.norm())
    }));
    checks.push(record("parity", "1.4a", tol(1e-10), parity));

    let constraints = max_of(product(&kind_j0, &points).into_par_iter().map(|(s, p)| {
        let u = fields::eval_u(s, p)?;
        Ok(fields::j0_constraint_residual(&u, s.delta) / u.norm())
    }));
    checks.push(record("j0-reflection-constraints", "1.12a", tol(1e-12), constraints));

    let octet_specs: Vec<BosonModeSpec> = [kind_i.clone(), kind_ii.clone()].concat();
    let octet = max_of(product(&octet_specs, &radii).into_par_iter().map(|(s, &r)| {
        let sub = if s.kind == BosonKind::I { Substitution::I } else { Substitution::II };
        let params = s.radial_params();
        let cf = radial::closed_form_regular(&params)?;
        let oct = |x: f64| {
            let (f, g) = cf.values(x).unwrap_or((f64::NAN, f64::NAN));
            radial::octet_from_pair(sub, s.lambda, s.j, f, g)
        };
        radial::octet_residual(s.j, &params, &oct, r)
    }));
    checks.push(record("radial-octet", "1.6b", tol(1e-8), octet));

    let j0_radial = max_of(product(&kind_j0, &radii).into_par_iter().map(|(s, &r)| {
        let params = s.radial_params();
        let cf = radial::closed_form_regular(&params)?;
        let quad = |x: f64| {
            let (f, g) = cf.values(x).unwrap_or((f64::NAN, f64::NAN));
            radial::j0_quad_from_pair(s.lambda, f, g)
        };
        radial::j0_system_residual(&params, &quad, r)
    }));
    checks.push(record("radial-j0", "1.12c", tol(1e-8), j0_radial));

    let kappas = [-2, -1, 1, 2, 3];
    let oracle = max_of(kappas.par_iter().map(|&kappa| {
        let params = RadialParams::new(cfg.epsilon, cfg.mass, kappa);
        let cf = radial::closed_form_regular(&params)?;
        let (r0, r1) = (0.1, 20.0);
        let traj = radial::integrate_radial(&params, r0, r1, 1e-3, cf.values(r0)?)?;
        let mut worst: f64 = 0.0;
        for i in 0..traj.r.len() {
            let (f, g) = cf.values(traj.r[i])?;
            worst = worst.max((traj.f[i] - f).abs()).max((traj.g[i] - g).abs());
        }
        Ok(worst)
    }));
    checks.push(record("radial-oracle", "1.9a", tol(1e-8), oracle));

    let thetas = cfg.theta.values();
    let phis = cfg.phi.values();
    let cancel = max_of(product(&thetas, &phis).into_par_iter().map(|(&t, &p)| fermion_map::cancellation_residual(t, p)));
    checks.push(record("connection-cancellation", "2.2b", tol(1e-9), cancel));

    let split = max_of(product(&all_bosons, &points).into_par_iter().map(|(s, p)| {
        let cols = fermion_map::dirac_split_residual(s, p, h, GaugeOrdering::SecondIndex)?;
        Ok(cols.iter().map(|c| c.relative()).fold(0.0, f64::max))
    }));
    checks.push(record("dirac-splitting", "2.2c", tol(1e-6), split));

    let mut dirac_specs = Vec::new();
    for twice_j in (1..=2 * cfg.j_max + 1).step_by(2) {
        for twice_m in (-twice_j..=twice_j).step_by(2) {
            for delta in Sign::BOTH {
                for channel in 1..=4 {
                    dirac_specs.push(DiracModeSpec {
                        epsilon: cfg.epsilon,
                        mass: cfg.mass,
                        j: HalfInt::from_twice(twice_j),
                        m: HalfInt::from_twice(twice_m),
                        delta,
                        channel,
                    });
                }
            }
        }
    }
    let waves = max_of(product(&dirac_specs, &points).into_par_iter().map(|(s, p)| Ok(fields::psi_residual(s, p, h)?.relative())));
    checks.push(record("dirac-waves", "2.1a", tol(1e-6), waves));

    let selection = max_of(product(&all_bosons, &points).into_par_iter().map(|(s, p)| {
        let pair = fermion_map::split_half_integer(s, p)?;
        Ok(match s.kind {
            BosonKind::II => pair.v_plus.norm(),
            BosonKind::I | BosonKind::J0 => pair.v_minus.norm(),
        })
    }));
    checks.push(record("type-selection", "2.6", tol(1e-12), selection));

    let mut coefficient_error: Result<f64> = Ok(0.0);
    for (name, tag, specs) in [
        ("expansion-type-I", "2.9b", &kind_i),
        ("expansion-type-II", "2.12b", &kind_ii),
        ("expansion-J0", "2.13", &kind_j0),
    ] {
        let reports: Result<Vec<_>> =
            product(specs, &points).into_par_iter().map(|(s, p)| fermion_map::verify_expansion(s, p)).collect();
        let (res, coeff) = match reports {
            Ok(reps) => (
                Ok(reps.iter().map(|r| r.max_residual()).fold(0.0, f64::max)),
                Ok(reps.iter().map(|r| r.coefficient_error()).fold(0.0, f64::max)),
            ),
            Err(e) => (Err(e.clone()), Err(e)),
        };
        coefficient_error = match (coefficient_error, coeff) {
            (Ok(a), Ok(b)) => Ok(a.max(b)),
            (Err(e), _) | (_, Err(e)) => Err(e),
        };
        checks.push(record(name, tag, tol(1e-10), res));
    }
    checks.push(record("expansion-coefficients", "2.9a", tol(1e-13), coefficient_error));

    let chis = cfg.chi.values();
    let curved_js: Vec<i32> = (1..=cfg.j_max.max(5)).collect();
    let gap = max_of(product(&curved_js, &chis).into_par_iter().map(|(&j, &chi)| {
        let params = CurvedRadialParams { epsilon: cfg.epsilon, mass: cfg.mass, j };
        let want = curved::obstruction_gap(j, chi)?;
        let got = curved::measured_gap(Geometry::Sphere, &params, chi, (0.8, -0.35))?;
        Ok((got - want).abs() / want.max(1.0))
    }));
    checks.push(record("curved-gap", "3.3", tol(1e-12), gap));

    let flat = max_of(product(&curved_js, &chis).into_par_iter().map(|(&j, &chi)| {
        let params = CurvedRadialParams { epsilon: cfg.epsilon, mass: cfg.mass, j };
        Ok(curved::measured_gap(Geometry::Flat, &params, chi, (0.8, -0.35))?.abs() * chi)
    }));
    checks.push(record("flat-gap", "1.7b", tol(1e-14), flat));

    let witness = max_of(curved_js.par_iter().map(|&j| {
        let params = CurvedRadialParams { epsilon: cfg.epsilon, mass: cfg.mass, j };
        let samples = curved::overdetermination_witness(&params, cfg.chi.lo, cfg.chi.hi, cfg.chi.count)?;
        Ok(samples.iter().map(|s| (s.ratio() / (s.chi / 2.0).tan() - 1.0).abs()).fold(0.0, f64::max))
    }));
    checks.push(record("curved-overdetermination", "3.3", tol(0.05), witness));

    let all_pass = checks.iter().all(|c| c.verdict == Verdict::Pass);
    Ok(CertifyReport { schema_version: SCHEMA_VERSION, checks, all_pass })
}

fn certify_table(report: &CertifyReport) -> Table {
    let columns = ["name", "equation", "max_residual", "tolerance", "verdict"].map(String::from).to_vec();
    let rows = report
        .checks
        .iter()
        .map(|c| {
            vec![
                Cell::Text(c.name.clone()),
                Cell::Text(c.equation.clone()),
                c.max_residual.map_or(Cell::Missing, Cell::Num),
                Cell::Num(c.tolerance),
                Cell::Text(if c.verdict == Verdict::Pass { "pass" } else { "fail" }.into()),
            ]
        })
        .collect();
    Table { columns, rows }
}

/// Reads `key = value` lines (`#` starts a comment) into `--key=value` flags.
pub fn config_flags(text: &str) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| invalid(format!("config line {}: expected key = value", n + 1)))?;
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        if key == "config" {
            continue;
        }
        out.push(format!("--{key}={}", value.trim()));
    }
    Ok(out)
}

/// Puts config-file flags right after the subcommand so that later
/// command-line flags override them.
fn expand_config(args: Vec<String>) -> Result<Vec<String>> {
    let mut path = None;
    let mut iter = args.iter().skip(1);
    while let Some(a) = iter.next() {
        if a == "--config" {
            path = iter.next().cloned();
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
    }
    let Some(path) = path else { return Ok(args) };
    if args.len() < 2 {
        return Ok(args);
    }
    let text = std::fs::read_to_string(&path).map_err(|e| invalid(format!("cannot read config '{path}': {e}")))?;
    let mut out = args[..2].to_vec();
    out.extend(config_flags(&text)?);
    out.extend(args[2..].iter().cloned());
    Ok(out)
}

fn emit(cfg: &RunConfig, bytes: &[u8]) -> Result<()> {
    match &cfg.output {
        Some(path) => std::fs::write(path, bytes)
            .map_err(|e| invalid(format!("cannot write '{}': {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes).and_then(|_| out.flush()).map_err(|e| invalid(format!("cannot write output: {e}")))
        }
    }
}

fn execute(command: Command) -> Result<i32> {
    let (cfg, bytes, ok) = match command {
        Command::Eval(cfg) => {
            cfg.check()?;
            let bytes = cmd_eval(&cfg)?.render(cfg.format_or(Format::Csv))?;
            (cfg, bytes, true)
        }
        Command::Expand(cfg) => {
            cfg.check()?;
            let bytes = cmd_expand(&cfg)?.render(cfg.format_or(Format::Csv))?;
            (cfg, bytes, true)
        }
        Command::CurvedScan(cfg) => {
            cfg.check()?;
            let bytes = cmd_curved_scan(&cfg)?.render(cfg.format_or(Format::Csv))?;
            (cfg, bytes, true)
        }
        Command::Certify(cfg) => {
            cfg.check()?;
            let report = cmd_certify(&cfg)?;
            let bytes = match cfg.format_or(Format::Json) {
                Format::Json => to_json_bytes(&report),
                Format::Csv => certify_table(&report).render(Format::Csv)?,
            };
            for c in report.checks.iter().filter(|c| c.verdict == Verdict::Fail) {
                eprintln!(
                    "check {} failed: residual {} vs tolerance {}{}",
                    c.name,
                    c.max_residual.map_or("n/a".to_string(), |v| format!("{v:e}")),
                    c.tolerance,
                    c.error.as_ref().map_or(String::new(), |e| format!(" ({e})"))
                );
            }
            (cfg, bytes, report.all_pass)
        }
    };
    emit(&cfg, &bytes)?;
    Ok(if ok { 0 } else { 1 })
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn run<I: IntoIterator<Item = String>>(args: I) -> i32 {
    let args = match expand_config(args.into_iter().collect()) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
