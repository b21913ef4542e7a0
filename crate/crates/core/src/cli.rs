//! Command-line front end: argument parsing, command dispatch and report output.

use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;
use rayon::prelude::*;
use rug::{Complex, Float, Integer, Rational};
use serde::Serialize;
use serde_json::{json, Value};

use crate::arith::{
    dist_to_integers, format_rat, random_gamma0_2, random_samples, ComplexJson, IntMatrix, PrecisionContext,
    POLE_DELTA,
};
use crate::cocycle::{
    abs_f64, cocycle_defect_n, guarded_samples, max_abs_on_samples, phi_n, psi_delta, saff, sdelta_cocycle_defects,
    sdelta_star_counted, smult_cocycle, RatFunSum, DEFAULT_DET_CAP,
};
use crate::divisors::{format_delta, make_d_delta, parse_delta, Delta, EllipticDivisor};
use crate::elliptic::{
    e1_mod_defect, e1_period_defects, e1_star_distribution_defect, random_tau_z, sell_cocycle, sell_cocycle_defect,
    TauPoint,
};
use crate::error::Error;
use crate::hecke::{gaussian_binomial, intro_identity};
use crate::trigfun::{addition_value, dedekind_sum, distribution_defect};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAP: i32 = 3;

const DEDEKIND_CMAX_CAP: u64 = 500;
const GAUSS_N_CAP: u32 = 64;
const COUNT_CAP: usize = 10_000;
const MAX_RETRIES: usize = 10_000;

#[derive(Parser, Debug)]
#[command(name = "eiscoc", version, about = "Evaluate and check explicit Eisenstein cocycles")]
pub struct Cli {
    /// Working precision in bits
    #[arg(long, global = true, default_value_t = 128)]
    pub bits: u32,
    /// Pass threshold for numeric defects
    #[arg(long, global = true, default_value_t = 1e-30)]
    pub tol: f64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Number of random sample points
    #[arg(long, global = true, default_value_t = 20)]
    pub samples: usize,
    /// JSON output (the default)
    #[arg(long, global = true, conflicts_with = "csv")]
    pub json: bool,
    /// CSV output
    #[arg(long, global = true)]
    pub csv: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check a numeric identity on random samples
    Check(CheckArgs),
    /// Print a table of exact values
    Table(TableArgs),
    /// Evaluate a cocycle and optionally its cocycle defect
    Cocycle(CocycleArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Identity {
    Addition,
    Distribution,
    HeckeIntro,
    E1per,
    E1mod,
    E1starDist,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    pub name: Identity,
    #[arg(long, default_value_t = 2)]
    pub p: u64,
    #[arg(long, default_value_t = 2)]
    pub m: u32,
    #[arg(long, allow_hyphen_values = true, default_value = "1,0,1,1")]
    pub gamma: String,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableName {
    Dedekind,
    #[value(name = "phi-N")]
    PhiN,
    PsiDelta,
    GaussBinomial,
}

#[derive(Args, Debug)]
pub struct TableArgs {
    pub name: TableName,
    #[arg(long, default_value_t = 20)]
    pub cmax: u64,
    #[arg(long, default_value_t = 3)]
    pub n: u32,
    #[arg(long, default_value_t = 2)]
    pub p: u64,
    #[arg(long = "N", default_value_t = 6)]
    pub level: u64,
    #[arg(long, allow_hyphen_values = true, default_value = "1:1,2:-2,3:1")]
    pub delta: String,
    #[arg(long, default_value_t = 10)]
    pub count: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum CocycleKind {
    Aff,
    Mult,
    Ell,
    Sdelta,
}

#[derive(Args, Debug)]
pub struct CocycleArgs {
    pub kind: CocycleKind,
    /// Expected matrix size; inferred from the tuple when omitted
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long = "N", default_value_t = 6)]
    pub level: u64,
    #[arg(long, allow_hyphen_values = true, default_value = "1:1,2:-2,3:1")]
    pub delta: String,
    /// Matrices as comma-separated row-major entries, separated by spaces or ';'
    #[arg(long, value_delimiter = ';', allow_hyphen_values = true)]
    pub tuple: Vec<String>,
    /// One or two elements of Γ₀(N) for sdelta
    #[arg(long, value_delimiter = ';', allow_hyphen_values = true)]
    pub gamma: Vec<String>,
    /// Also report the cocycle defect
    #[arg(long)]
    pub defect: bool,
    #[arg(long = "cap-det", default_value_t = DEFAULT_DET_CAP)]
    pub cap_det: u64,
    /// τ as "re,im" for ell
    #[arg(long, allow_hyphen_values = true, default_value = "0.1,0.9")]
    pub tau: String,
}

#[derive(Serialize, Debug)]
pub struct Config {
    pub bits: u32,
    pub tol: f64,
    pub seed: u64,
    pub samples: usize,
}

#[derive(Serialize, Debug, Clone, Copy, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Serialize, Debug)]
pub struct RunReport {
    pub command: String,
    pub config: Config,
    pub results: Value,
    pub status: Status,
    pub wall_time_ms: u128,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Cap(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Cap(_) => EXIT_CAP,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Cap(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::DetCapExceeded { .. } => CliError::Cap(e.to_string()),
            other => CliError::Usage(other.to_string()),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

struct Outcome {
    results: Value,
    pass: bool,
}

// one named defect against its threshold
fn check_entry(name: &str, defect: f64, threshold: f64) -> (Value, bool) {
    let pass = defect <= threshold;
    (
        json!({"name": name, "defect": defect, "threshold": threshold, "pass": pass}),
        pass,
    )
}

fn checks_outcome(entries: Vec<(Value, bool)>, extra: Value) -> Outcome {
    let pass = entries.iter().all(|e| e.1);
    let mut results = json!({"checks": entries.into_iter().map(|e| e.0).collect::<Vec<_>>()});
    if let (Value::Object(r), Value::Object(x)) = (&mut results, extra) {
        r.extend(x);
    }
    Outcome { results, pass }
}

fn parse_matrix(s: &str) -> CliResult<IntMatrix> {
    s.parse::<IntMatrix>().map_err(CliError::from)
}

fn parse_tuple(items: &[String]) -> CliResult<Vec<IntMatrix>> {
    items
        .iter()
        .flat_map(|s| s.split_whitespace())
        .map(parse_matrix)
        .collect()
}

fn parse_tau(s: &str, ctx: &PrecisionContext) -> CliResult<TauPoint> {
    let (re, im) = s
        .split_once(',')
        .ok_or_else(|| CliError::Usage(format!("tau {s:?} is not \"re,im\"")))?;
    let re: f64 = re.trim().parse().map_err(|_| CliError::Usage(format!("tau real part {re:?}")))?;
    let im: f64 = im.trim().parse().map_err(|_| CliError::Usage(format!("tau imaginary part {im:?}")))?;
    Ok(TauPoint::from_f64(re, im, ctx)?)
}

fn parse_delta_arg(s: &str) -> CliResult<Delta> {
    Ok(parse_delta(s)?)
}

// draws until `f` succeeds, skipping draws that land on a pole or a thin τ
fn sample_retrying<T, F>(mut f: F) -> CliResult<T>
where
    F: FnMut() -> crate::Result<T>,
{
    for _ in 0..MAX_RETRIES {
        match f() {
            Ok(v) => return Ok(v),
            Err(Error::Pole { .. }) | Err(Error::TauTooThin(_)) => continue,
            Err(e) => return Err(e.into()),
        }
    }
    Err(Error::PoleGuardExhausted(MAX_RETRIES).into())
}

fn cmd_check(args: &CheckArgs, ctx: &PrecisionContext) -> CliResult<Outcome> {
    let tol = ctx.tol;
    match args.name {
        Identity::Addition => {
            let pts = random_samples(ctx, 2, |p| {
                let s = Complex::with_val(ctx.bits, &p[0] + &p[1]);
                p.iter().all(|x| dist_to_integers(x) >= POLE_DELTA) && dist_to_integers(&s) >= POLE_DELTA
            })?;
            let quarter = Float::with_val(ctx.bits, 0.25);
            let defects: Vec<f64> = pts
                .par_iter()
                .map(|p| addition_value(&p[0], &p[1], ctx).map(|v| abs_f64(&(v + &quarter))))
                .collect::<crate::Result<_>>()?;
            let max = defects.iter().copied().fold(0.0, f64::max);
            Ok(checks_outcome(
                vec![check_entry("addition", max, tol)],
                json!({"points": pts.len(), "constant": "-1/4"}),
            ))
        }
        Identity::Distribution => {
            let m = args.m;
            if m == 0 {
                return Err(CliError::Usage("--m must be positive".into()));
            }
            let pts = random_samples(ctx, 1, |p| {
                let z = &p[0];
                let mz = Complex::with_val(ctx.bits, z * m);
                dist_to_integers(&mz) >= POLE_DELTA
                    && (0..m).all(|j| {
                        let w = Complex::with_val(ctx.bits, z + Float::with_val(ctx.bits, j) / m);
                        dist_to_integers(&w) >= POLE_DELTA
                    })
            })?;
            let max = pts
                .par_iter()
                .map(|p| distribution_defect(&p[0], m, ctx).map(|v| abs_f64(&v)))
                .collect::<crate::Result<Vec<f64>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            Ok(checks_outcome(
                vec![check_entry("distribution", max, tol)],
                json!({"m": m, "points": pts.len()}),
            ))
        }
        Identity::HeckeIntro => {
            let r = intro_identity(args.p, ctx)?;
            let mut entries = vec![check_entry("constancy", r.deviation, tol)];
            if args.p == 2 {
                let quarter = Float::with_val(ctx.bits, 0.25);
                let d = abs_f64(&Complex::with_val(ctx.bits, &r.mean - &quarter));
                entries.push(check_entry("constant_equals_1/4", d, tol));
            }
            Ok(checks_outcome(
                entries,
                json!({"p": args.p, "constant": ComplexJson::from_complex(&r.mean), "points": r.points}),
            ))
        }
        Identity::E1per | Identity::E1mod | Identity::E1starDist => {
            let gamma = parse_matrix(&args.gamma)?;
            if args.name == Identity::E1mod && (gamma.dim() != 2 || gamma.det() != 1) {
                return Err(CliError::Usage(format!("--gamma {gamma} is not in SL_2(Z)")));
            }
            if args.name == Identity::E1starDist && args.m == 0 {
                return Err(CliError::Usage("--m must be positive".into()));
            }
            let mut rng = ctx.rng();
            let mut max = 0.0f64;
            for _ in 0..ctx.samples {
                let d = sample_retrying(|| {
                    let (tau, z) = random_tau_z(&mut rng, ctx);
                    match args.name {
                        Identity::E1per => {
                            let (a, b) = e1_period_defects(&tau, &z, ctx)?;
                            Ok(abs_f64(&a).max(abs_f64(&b)))
                        }
                        Identity::E1mod => Ok(abs_f64(&e1_mod_defect(&tau, &z, &gamma, ctx)?)),
                        _ => Ok(abs_f64(&e1_star_distribution_defect(&tau, &z, args.m, ctx)?)),
                    }
                })?;
                max = max.max(d);
            }
            let name = match args.name {
                Identity::E1per => "e1per",
                Identity::E1mod => "e1mod",
                _ => "e1star-dist",
            };
            Ok(checks_outcome(
                vec![check_entry(name, max, tol)],
                json!({"gamma": gamma, "m": args.m, "points": ctx.samples}),
            ))
        }
    }
}

fn table(columns: &[&str], rows: Vec<Vec<String>>, pass: bool, extra: Value) -> Outcome {
    let mut results = json!({"columns": columns, "rows": rows});
    if let (Value::Object(r), Value::Object(x)) = (&mut results, extra) {
        r.extend(x);
    }
    Outcome { results, pass }
}

fn homomorphism_table<F>(args: &TableArgs, ctx: &PrecisionContext, f: F) -> CliResult<Outcome>
where
    F: Fn(&IntMatrix) -> crate::Result<Rational>,
{
    if args.count > COUNT_CAP {
        return Err(CliError::Cap(format!("--count {} exceeds {COUNT_CAP}", args.count)));
    }
    let mut rng = ctx.rng();
    let gammas: Vec<IntMatrix> = (0..args.count).map(|_| random_gamma0_2(&mut rng, args.level, 50)).collect();
    let values: Vec<Rational> = gammas.iter().map(&f).collect::<crate::Result<_>>()?;
    let mut failures = 0usize;
    for i in 0..gammas.len().saturating_sub(1) {
        let prod = f(&(&gammas[i] * &gammas[i + 1]))?;
        if prod != Rational::from(&values[i] + &values[i + 1]) {
            failures += 1;
        }
    }
    let rows = gammas
        .iter()
        .zip(&values)
        .map(|(g, v)| vec![g.entries().iter().map(|e| e.to_string()).collect::<Vec<_>>().join(" "), format_rat(v)])
        .collect();
    Ok(table(
        &["gamma", "value"],
        rows,
        failures == 0,
        json!({"level": args.level, "homomorphism_pairs": gammas.len().saturating_sub(1), "homomorphism_failures": failures}),
    ))
}

fn cmd_table(args: &TableArgs, ctx: &PrecisionContext) -> CliResult<Outcome> {
    match args.name {
        TableName::Dedekind => {
            if args.cmax > DEDEKIND_CMAX_CAP {
                return Err(CliError::Cap(format!("--cmax {} exceeds {DEDEKIND_CMAX_CAP}", args.cmax)));
            }
            let mut rows = Vec::new();
            for c in 1..=args.cmax {
                for a in 0..c {
                    let (ai, ci) = (Integer::from(a), Integer::from(c));
                    if Integer::from(ai.gcd_ref(&ci)) != 1 {
                        continue;
                    }
                    let s = dedekind_sum(&ai, &ci)?;
                    rows.push(vec![a.to_string(), c.to_string(), format_rat(&s)]);
                }
            }
            Ok(table(&["a", "c", "D(a/c)"], rows, true, json!({})))
        }
        TableName::GaussBinomial => {
            if args.n > GAUSS_N_CAP {
                return Err(CliError::Cap(format!("--n {} exceeds {GAUSS_N_CAP}", args.n)));
            }
            let rows = (0..=args.n)
                .map(|k| vec![k.to_string(), gaussian_binomial(args.n, k, args.p).to_string()])
                .collect();
            Ok(table(&["k", "count"], rows, true, json!({"n": args.n, "p": args.p})))
        }
        TableName::PhiN => homomorphism_table(args, ctx, |g| phi_n(args.level, g)),
        TableName::PsiDelta => {
            let delta = parse_delta_arg(&args.delta)?;
            let mut out = homomorphism_table(args, ctx, |g| psi_delta(args.level, &delta, g))?;
            out.results["delta"] = json!(format_delta(&delta));
            Ok(out)
        }
    }
}

fn random_rational_points(n: usize, count: usize, ctx: &PrecisionContext, sums: &[&RatFunSum]) -> Vec<Vec<Rational>> {
    let mut rng = ctx.rng();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let p: Vec<Rational> = (0..n)
            .map(|_| Rational::from((rng.gen_range(-60i64..=60), rng.gen_range(1i64..=37))))
            .collect();
        if sums.iter().all(|s| s.is_regular_at(&p)) {
            out.push(p);
        }
    }
    out
}

fn tuple_dim(tuple: &[IntMatrix], expected: Option<usize>) -> CliResult<usize> {
    let n = tuple
        .first()
        .ok_or_else(|| CliError::Usage("--tuple is required".into()))?
        .dim();
    if tuple.iter().any(|g| g.dim() != n) {
        return Err(CliError::Usage("matrices in --tuple have different sizes".into()));
    }
    if let Some(e) = expected {
        if e != n {
            return Err(CliError::Usage(format!("--n {e} but the matrices are {n}×{n}")));
        }
    }
    Ok(n)
}

fn expect_len(tuple: &[IntMatrix], n: usize, defect: bool) -> CliResult<()> {
    let want = if defect { n + 1 } else { n };
    if tuple.len() != want {
        return Err(CliError::Usage(format!(
            "--tuple needs {want} matrices of size {n}, got {}",
            tuple.len()
        )));
    }
    Ok(())
}

fn cmd_cocycle(args: &CocycleArgs, ctx: &PrecisionContext) -> CliResult<Outcome> {
    let tol = ctx.tol;
    match args.kind {
        CocycleKind::Aff => {
            let tuple = parse_tuple(&args.tuple)?;
            let n = tuple_dim(&tuple, args.n)?;
            expect_len(&tuple, n, args.defect)?;
            if !args.defect {
                let v = saff(&tuple, true)?;
                return Ok(Outcome {
                    results: json!({"n": n, "value": v.to_json()}),
                    pass: true,
                });
            }
            let eval = |face: &[IntMatrix]| saff(face, true);
            let mut defect = RatFunSum::zero(n);
            for i in 0..tuple.len() {
                let face: Vec<IntMatrix> = tuple.iter().enumerate().filter(|(k, _)| *k != i).map(|(_, g)| g.clone()).collect();
                let v = eval(&face)?;
                if i % 2 == 0 {
                    defect += &v;
                } else {
                    defect -= &v;
                }
            }
            let pts = random_rational_points(n, ctx.samples, ctx, &[&defect]);
            let mut nonzero = 0usize;
            let mut max = Rational::new();
            for p in &pts {
                let v = defect.eval(p)?.abs();
                if v != 0 {
                    nonzero += 1;
                }
                if v > max {
                    max = v;
                }
            }
            Ok(Outcome {
                results: json!({
                    "n": n,
                    "points": pts.len(),
                    "max_abs_defect": format_rat(&max),
                    "nonzero_points": nonzero,
                }),
                pass: nonzero == 0,
            })
        }
        CocycleKind::Mult => {
            let delta = parse_delta_arg(&args.delta)?;
            let tuple = parse_tuple(&args.tuple)?;
            let n = tuple_dim(&tuple, args.n)?;
            expect_len(&tuple, n, args.defect)?;
            let d = make_d_delta(args.level, &delta, n)?;
            if !args.defect {
                let v = smult_cocycle(&d, &tuple, args.cap_det)?;
                return Ok(Outcome {
                    results: json!({"n": n, "terms": v.len(), "value": v.to_json()}),
                    pass: true,
                });
            }
            let eval = |face: &[IntMatrix]| smult_cocycle(&d, face, args.cap_det);
            let defect = cocycle_defect_n(&eval, &tuple)?;
            let max = max_abs_on_samples(&defect, ctx)?;
            Ok(checks_outcome(
                vec![check_entry("cocycle", max, tol)],
                json!({"n": n, "level": args.level, "delta": format_delta(&delta), "points": ctx.samples}),
            ))
        }
        CocycleKind::Ell => {
            let delta = parse_delta_arg(&args.delta)?;
            let tuple = parse_tuple(&args.tuple)?;
            let n = tuple_dim(&tuple, args.n)?;
            expect_len(&tuple, n, args.defect)?;
            let tau = parse_tau(&args.tau, ctx)?;
            let d = EllipticDivisor::from_torsion(&make_d_delta(args.level, &delta, n)?);
            let mut rng = ctx.rng();
            let mut values = Vec::new();
            let mut max = 0.0f64;
            for _ in 0..ctx.samples {
                let (z, v) = sample_retrying(|| {
                    let z: Vec<Complex> = (0..n)
                        .map(|_| {
                            let im = rng.gen_range(-0.5..0.5) * tau.im();
                            ctx.complex(rng.gen_range(0.0..1.0), im)
                        })
                        .collect();
                    let v = if args.defect {
                        sell_cocycle_defect(&d, &tuple, &tau, &z, args.cap_det, ctx)?
                    } else {
                        sell_cocycle(&d, &tuple, &tau, &z, args.cap_det, ctx)?
                    };
                    Ok((z, v))
                })?;
                max = max.max(abs_f64(&v));
                values.push(json!({
                    "z": z.iter().map(ComplexJson::from_complex).collect::<Vec<_>>(),
                    "value": ComplexJson::from_complex(&v),
                }));
            }
            let extra = json!({"n": n, "tau": ComplexJson::from_complex(tau.value()), "values": values});
            if args.defect {
                Ok(checks_outcome(vec![check_entry("cocycle", max, tol)], extra))
            } else {
                Ok(Outcome { results: extra, pass: true })
            }
        }
        CocycleKind::Sdelta => {
            let delta = parse_delta_arg(&args.delta)?;
            let gammas: Vec<IntMatrix> = args.gamma.iter().map(|g| parse_matrix(g)).collect::<CliResult<_>>()?;
            let g1 = gammas
                .first()
                .ok_or_else(|| CliError::Usage("--gamma is required".into()))?;
            let (value, count) = sdelta_star_counted(args.level, &delta, g1)?;
            let mut results = json!({
                "level": args.level,
                "delta": format_delta(&delta),
                "term_count": count,
                "terms": value.len(),
                "value": value.to_json(),
            });
            if !args.defect {
                return Ok(Outcome { results, pass: true });
            }
            let g2 = gammas.get(1).unwrap_or(g1);
            let (linear, transpose) = sdelta_cocycle_defects(args.level, &delta, g1, g2)?;
            let lin = max_abs_on_samples(&linear, ctx)?;
            let pts = guarded_samples(&[&transpose], 2, ctx)?;
            let tr = crate::cocycle::eval_at(&transpose, &pts, ctx)?
                .iter()
                .map(abs_f64)
                .fold(0.0, f64::max);
            results["transpose_action_defect"] = json!(tr);
            let (entry, pass) = check_entry("cocycle", lin, tol);
            results["checks"] = json!([entry]);
            Ok(Outcome { results, pass })
        }
    }
}

fn command_name(cli: &Cli) -> String {
    match &cli.command {
        Command::Check(a) => format!("check {}", a.name.to_possible_value().unwrap().get_name()),
        Command::Table(a) => format!("table {}", a.name.to_possible_value().unwrap().get_name()),
        Command::Cocycle(a) => format!("cocycle {}", a.kind.to_possible_value().unwrap().get_name()),
    }
}

/// Runs a parsed command line and returns the report.
pub fn execute(cli: &Cli) -> CliResult<RunReport> {
    let ctx = PrecisionContext::new(cli.bits, cli.tol, cli.seed, cli.samples)?;
    let start = Instant::now();
    let outcome = match &cli.command {
        Command::Check(a) => cmd_check(a, &ctx)?,
        Command::Table(a) => cmd_table(a, &ctx)?,
        Command::Cocycle(a) => cmd_cocycle(a, &ctx)?,
    };
    Ok(RunReport {
        command: command_name(cli),
        config: Config {
            bits: ctx.bits,
            tol: ctx.tol,
            seed: ctx.seed,
            samples: ctx.samples,
        },
        results: outcome.results,
        status: if outcome.pass { Status::Pass } else { Status::Fail },
        wall_time_ms: start.elapsed().as_millis(),
    })
}

fn csv_field(v: &Value) -> String {
    let s = match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s
    }
}

/// CSV rendering: tables print their rows, checks print one line per defect.
pub fn render_csv(report: &RunReport) -> String {
    let mut out = String::new();
    let r = &report.results;
    if let (Some(cols), Some(rows)) = (r["columns"].as_array(), r["rows"].as_array()) {
        out.push_str(&cols.iter().map(csv_field).collect::<Vec<_>>().join(","));
        out.push('\n');
        for row in rows {
            let cells = row.as_array().map(|c| c.iter().map(csv_field).collect::<Vec<_>>()).unwrap_or_default();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
    } else if let Some(checks) = r["checks"].as_array() {
        out.push_str("name,defect,threshold,pass\n");
        for c in checks {
            let cells: Vec<String> = ["name", "defect", "threshold", "pass"].iter().map(|k| csv_field(&c[*k])).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
    } else {
        out.push_str("command,status\n");
        out.push_str(&format!("{},{}\n", csv_field(&json!(report.command)), csv_field(&json!(report.status))));
    }
    out
}

/// Parses `args`, runs the command, prints the report and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(report) => {
            if cli.csv {
                print!("{}", render_csv(&report));
            } else {
                println!("{}", serde_json::to_string_pretty(&report).expect("serializable report"));
            }
            if report.status == Status::Pass {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(args: &[&str]) -> RunReport {
        let cli = Cli::try_parse_from(std::iter::once("eiscoc").chain(args.iter().copied())).unwrap();
        execute(&cli).unwrap()
    }

    #[test]
    fn dedekind_table_has_one_eighteenth() {
        let r = report(&["table", "dedekind", "--cmax", "20"]);
        let rows = r.results["rows"].as_array().unwrap();
        assert!(rows.iter().any(|row| row == &json!(["1", "3", "1/18"])));
    }

    #[test]
    fn gauss_row() {
        let r = report(&["table", "gauss-binomial", "--n", "3", "--p", "2"]);
        let counts: Vec<&str> = r.results["rows"].as_array().unwrap().iter().map(|row| row[1].as_str().unwrap()).collect();
        assert_eq!(counts, ["1", "7", "7", "1"]);
    }

    #[test]
    fn caps_and_usage() {
        let cli = Cli::try_parse_from(["eiscoc", "table", "dedekind", "--cmax", "100000"]).unwrap();
        assert_eq!(execute(&cli).unwrap_err().exit_code(), EXIT_CAP);
        let cli = Cli::try_parse_from(["eiscoc", "check", "e1mod", "--gamma", "2,0,0,1"]).unwrap();
        assert_eq!(execute(&cli).unwrap_err().exit_code(), EXIT_USAGE);
        assert!(Cli::try_parse_from(["eiscoc", "check", "nonsense"]).is_err());
    }

    #[test]
    fn sdelta_payload() {
        let r = report(&["cocycle", "sdelta", "--N", "6", "--gamma", "1,0,6,1"]);
        assert_eq!(r.results["term_count"], 11);
    }
}
