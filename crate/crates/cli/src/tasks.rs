//! Dispatch from a parsed problem to the library and back to a report.

use serde_json::{json, Map, Value};
use sparsecert_core::karlin::{self, certify_nonneg, decompose_halfline, decompose_interval, Decomposition, KarlinConfig};
use sparsecert_core::moments::{
    self, default_tolerance, hankel_psd_checks, moments_of, recover_atoms, signed_representation, sparse_feasible, Feasibility,
    FeasibilityConfig, PsdCheck, RecoveryConfig,
};
use sparsecert_core::tsystem::{is_et_system, is_t_system};
use sparsecert_core::{Error, SamplingConfig, SparsePolynomial, Verdict};

use crate::problem::{Mode, ParseError, ProblemFile, Support, Task};
use crate::report::{self, num, nums};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Overrides taken from the command line.
#[derive(Debug, Clone, Default)]
pub struct Options {
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub grid: Option<usize>,
    pub emit_samples: Option<usize>,
}

/// A finished run: the report, its exit code and optional plot samples.
#[derive(Debug)]
pub struct Outcome {
    pub report: Value,
    pub exit: i32,
    pub samples: Option<String>,
}

/// A run that produced no report.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub code: String,
    pub message: String,
    pub exit: i32,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure { code: "usage_error".into(), message: message.into(), exit: EXIT_USAGE }
    }
}

impl From<ParseError> for Failure {
    fn from(e: ParseError) -> Self {
        Failure { code: "parse_error".into(), message: e.0, exit: EXIT_USAGE }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: e.code().into(), message: e.to_string(), exit: exit_code(&e) }
    }
}

/// Bad input is a usage error, a disproved hypothesis is a failure, anything
/// else is numerical.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidExponents(_)
        | Error::InvalidInterval(_)
        | Error::Domain { .. }
        | Error::UnsupportedOrder { .. }
        | Error::Shape(_)
        | Error::Config(_)
        | Error::IndexTooLarge { .. }
        | Error::IdenticallyZero
        | Error::BadLeadingCoefficient(_)
        | Error::ExponentMismatch(_)
        | Error::NotDense => EXIT_USAGE,
        Error::NotStrictlyPositive { .. } | Error::TailNegative(_) | Error::NegativeSomewhere { .. } | Error::Infeasible { .. } => {
            EXIT_FAIL
        }
        Error::SingularSystem(_)
        | Error::DegenerateDeterminant(_)
        | Error::ConstructionFailed(_)
        | Error::NewtonDivergence { .. }
        | Error::TooManyZeros { .. }
        | Error::RecoveryFailed { .. } => EXIT_NUMERICAL,
    }
}

/// Report for a library error that disproves the task's hypothesis.
fn failure_report(task: Task, e: &Error) -> Option<Value> {
    let mut m = report::header(task.name(), "fail");
    m.insert("reason".into(), json!(e.code()));
    match e {
        Error::NotStrictlyPositive { witness, value } | Error::NegativeSomewhere { witness, value } => {
            m.insert("witness".into(), json!(num(*witness)));
            m.insert("value".into(), json!(num(*value)));
        }
        Error::TailNegative(lead) => {
            m.insert("leading_coefficient".into(), json!(num(*lead)));
        }
        Error::Infeasible { value } => {
            m.insert("status".into(), json!("infeasible"));
            m.insert("certificate_value".into(), json!(num(*value)));
        }
        _ => return None,
    }
    Some(Value::Object(m))
}

pub fn run_task(p: &ProblemFile, opts: &Options) -> Result<Outcome, Failure> {
    let seed = opts.seed.or(p.seed).unwrap_or(0);
    let tol = opts.tol.or(p.tolerance.map(|t| t.0));
    if let Some(t) = tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Failure::usage(format!("tolerance must be positive, got {t}")));
        }
    }
    if opts.emit_samples.is_some() && !matches!(p.task, Task::Decompose | Task::CertifyNonneg) {
        return Err(Failure::usage("--emit-samples only applies to decompose and certify-nonneg"));
    }
    let result = match p.task {
        Task::CheckTsystem | Task::CheckEtsystem => check_system(p, seed, tol, opts.grid),
        Task::Decompose | Task::CertifyNonneg => decompose(p, seed, tol, opts),
        Task::MomentCheck => moment_check(p, seed, tol, opts.grid),
        Task::RecoverAtoms => recover(p, seed, tol, opts.grid),
        Task::SignedRepr => signed(p),
        Task::Hankel => hankel(p),
    };
    match result {
        Err(TaskError::Library(e)) if exit_code(&e) == EXIT_FAIL => match failure_report(p.task, &e) {
            Some(report) => Ok(Outcome { report, exit: EXIT_FAIL, samples: None }),
            None => Err(e.into()),
        },
        Err(TaskError::Library(e)) => Err(e.into()),
        Err(TaskError::Other(f)) => Err(f),
        Ok(o) => Ok(o),
    }
}

enum TaskError {
    Library(Error),
    Other(Failure),
}

impl From<Error> for TaskError {
    fn from(e: Error) -> Self {
        TaskError::Library(e)
    }
}

impl From<ParseError> for TaskError {
    fn from(e: ParseError) -> Self {
        TaskError::Other(e.into())
    }
}

type TaskResult = Result<Outcome, TaskError>;

fn done(m: Map<String, Value>, exit: i32) -> TaskResult {
    Ok(Outcome { report: Value::Object(m), exit, samples: None })
}

fn check_system(p: &ProblemFile, seed: u64, tol: Option<f64>, grid: Option<usize>) -> TaskResult {
    let mode = match (p.task, p.mode) {
        (Task::CheckEtsystem, Some(Mode::T)) => {
            return Err(TaskError::Other(Failure::usage("check-etsystem cannot run in mode t")));
        }
        (Task::CheckEtsystem, _) | (_, Some(Mode::Et)) => Mode::Et,
        _ => Mode::T,
    };
    let fam = p.family()?;
    let iv = p.interval()?;
    let defaults = SamplingConfig::default();
    let cfg = SamplingConfig {
        seed,
        grid_points: grid.unwrap_or(defaults.grid_points),
        zero_tol: tol.unwrap_or(defaults.zero_tol),
        ..defaults
    };
    let verdict = match mode {
        Mode::T => is_t_system(&fam, &iv, &cfg)?,
        Mode::Et => is_et_system(&fam, &iv, &cfg)?,
    };
    let (status, exit) = match &verdict {
        Verdict::Pass => ("pass", EXIT_OK),
        Verdict::FailWithWitness(_) => ("fail", EXIT_FAIL),
        Verdict::Inconclusive { .. } => ("inconclusive", EXIT_NUMERICAL),
    };
    let mut m = report::header(p.task.name(), status);
    m.insert("mode".into(), json!(if mode == Mode::T { "t" } else { "et" }));
    m.insert("family".into(), json!(format!("{fam:?}")));
    m.insert("interval".into(), report::interval(&iv));
    m.insert("grid_points".into(), json!(cfg.grid_points));
    match verdict {
        Verdict::Pass => {}
        Verdict::FailWithWitness(t) => {
            m.insert("witness".into(), nums(&t));
        }
        Verdict::Inconclusive { tuple, rcond } => {
            m.insert("witness".into(), nums(&tuple));
            m.insert("rcond".into(), json!(num(rcond)));
        }
    }
    done(m, exit)
}

/// `sum_i c_i x^{alpha_i}` by direct powering, independent of the library's
/// evaluation routine.
fn eval_direct(p: &SparsePolynomial, x: f64) -> f64 {
    p.exps()
        .iter()
        .zip(p.coeffs())
        .map(|(a, c)| if *a == 0.0 { *c } else if x == 0.0 { 0.0 } else { c * x.powf(*a) })
        .sum()
}

/// Residual and minima recomputed on `grid`, in the layout of the report.
struct Recheck {
    residual: f64,
    min_star: f64,
    min_upper: f64,
    sup_f: f64,
    upper_at_b: f64,
}

fn sample_points(f: &SparsePolynomial, dec: &Decomposition, count: usize) -> Vec<f64> {
    let knots: Vec<f64> = dec.knots_star.locations().into_iter().chain(dec.knots_upper.locations()).collect();
    dec.interval.grid(count.max(2), karlin::halfline_horizon(f, &knots))
}

fn recheck(f: &SparsePolynomial, dec: &Decomposition, points: &[f64]) -> Recheck {
    let mut r = Recheck { residual: 0.0, min_star: f64::INFINITY, min_upper: f64::INFINITY, sup_f: 0.0, upper_at_b: 0.0 };
    for x in points {
        let (fv, s, u) = (eval_direct(f, *x), eval_direct(&dec.f_star, *x), eval_direct(&dec.f_upper, *x));
        r.sup_f = r.sup_f.max(fv.abs());
        r.residual = r.residual.max((fv - s - u).abs());
        r.min_star = r.min_star.min(s);
        r.min_upper = r.min_upper.min(u);
    }
    r.upper_at_b = if dec.interval.is_closed() {
        eval_direct(&dec.f_upper, dec.interval.right())
    } else {
        dec.f_upper.leading_coefficient()
    };
    r
}

fn decompose(p: &ProblemFile, seed: u64, tol: Option<f64>, opts: &Options) -> TaskResult {
    let f = p.polynomial()?;
    let iv = p.interval()?;
    let defaults = KarlinConfig::default();
    let cfg = KarlinConfig {
        seed,
        tol: tol.unwrap_or(defaults.tol),
        verify_grid: opts.grid.unwrap_or(defaults.verify_grid),
        ..defaults
    };
    let dec = match (p.task, iv.is_closed()) {
        (Task::CertifyNonneg, _) => certify_nonneg(&f, &iv, &cfg)?,
        (_, true) => decompose_interval(&f, &iv, &cfg)?,
        (_, false) => decompose_halfline(&f, &cfg)?,
    };

    let pts = sample_points(&f, &dec, cfg.verify_grid);
    let chk = recheck(&f, &dec, &pts);
    let bound = cfg.tol * chk.sup_f;
    let ok = chk.residual <= bound
        && chk.min_star >= -bound
        && chk.min_upper >= -bound
        && chk.upper_at_b.abs() <= bound.max(cfg.tol);
    if !ok {
        return Err(TaskError::Other(Failure {
            code: "verification_failed".into(),
            message: format!(
                "independent re-verification failed: residual {:e}, min f_* {:e}, min f^* {:e}, f^* end value {:e}, sup f {:e}",
                chk.residual, chk.min_star, chk.min_upper, chk.upper_at_b, chk.sup_f
            ),
            exit: EXIT_NUMERICAL,
        }));
    }

    let mut m = report::header(p.task.name(), "success");
    m.insert("interval".into(), report::interval(&iv));
    m.insert("f".into(), report::polynomial(&f));
    let part = |poly: &SparsePolynomial, ks, c: f64| {
        json!({
            "coefficients": nums(poly.coeffs()),
            "knots": report::knots(ks),
            "scale": num(c),
        })
    };
    m.insert("f_star".into(), part(&dec.f_star, &dec.knots_star, dec.c_star));
    m.insert("f_upper".into(), part(&dec.f_upper, &dec.knots_upper, dec.c_upper));
    m.insert("degenerate".into(), json!(dec.degenerate));
    m.insert("iterations".into(), json!(dec.iterations));
    m.insert(
        "verification".into(),
        json!({
            "grid_points": pts.len(),
            "residual": num(chk.residual),
            "min_f_star": num(chk.min_star),
            "min_f_upper": num(chk.min_upper),
            "sup_f": num(chk.sup_f),
            "f_upper_end": num(chk.upper_at_b),
            "tolerance": num(cfg.tol),
        }),
    );
    let samples = opts.emit_samples.map(|n| {
        let mut out = String::from("x,f,f_star,f_upper\n");
        for x in sample_points(&f, &dec, n) {
            out.push_str(&format!(
                "{},{},{},{}\n",
                num(x),
                num(eval_direct(&f, x)),
                num(eval_direct(&dec.f_star, x)),
                num(eval_direct(&dec.f_upper, x))
            ));
        }
        out
    });
    Ok(Outcome { report: Value::Object(m), exit: EXIT_OK, samples })
}

fn certificate(c: &moments::Certificate) -> Value {
    json!({
        "polynomial": report::polynomial(&c.polynomial),
        "knots": nums(&c.knots),
        "value": num(c.value),
    })
}

fn feasibility_config(seed: u64, tol: Option<f64>, grid: Option<usize>) -> FeasibilityConfig {
    let defaults = FeasibilityConfig::default();
    FeasibilityConfig { seed, tol, grid_points: grid.unwrap_or(defaults.grid_points), ..defaults }
}

fn moment_check(p: &ProblemFile, seed: u64, tol: Option<f64>, grid: Option<usize>) -> TaskResult {
    let s = p.sequence()?;
    let iv = p.interval()?;
    let cfg = feasibility_config(seed, tol, grid);
    let verdict = sparse_feasible(&s, &iv, &cfg)?;
    let (status, exit) = match &verdict {
        Feasibility::Feasible { .. } => ("feasible", EXIT_OK),
        Feasibility::Marginal(_) => ("marginal", EXIT_OK),
        Feasibility::Infeasible(_) => ("infeasible", EXIT_FAIL),
    };
    let mut m = report::header(p.task.name(), status);
    m.insert("interval".into(), report::interval(&iv));
    m.insert("min_value".into(), json!(num(verdict.min_value())));
    m.insert("tolerance".into(), json!(num(tol.unwrap_or_else(|| default_tolerance(&s)))));
    if let Some(c) = verdict.certificate() {
        m.insert("certificate".into(), certificate(c));
    }
    done(m, exit)
}

fn recover(p: &ProblemFile, seed: u64, tol: Option<f64>, grid: Option<usize>) -> TaskResult {
    let s = p.sequence()?;
    let iv = p.interval()?;
    let defaults = RecoveryConfig::default();
    let cfg = RecoveryConfig {
        feasibility: feasibility_config(seed, tol, None),
        grid_points: grid.unwrap_or(defaults.grid_points),
        ..defaults
    };
    let mu = recover_atoms(&s, &iv, &cfg)?;
    let back = moments_of(&mu, s.exps())?;
    let residual = back.values().iter().zip(s.values()).fold(0.0_f64, |r, (x, y)| r.max((x - y).abs()));
    let mut m = report::header(p.task.name(), "success");
    m.insert("interval".into(), report::interval(&iv));
    m.insert("atoms".into(), nums(mu.atoms()));
    m.insert("weights".into(), nums(mu.weights()));
    m.insert("moments".into(), nums(back.values()));
    m.insert("residual".into(), json!(num(residual)));
    done(m, EXIT_OK)
}

fn signed(p: &ProblemFile) -> TaskResult {
    let s = p.sequence()?;
    let pts = p.points()?;
    let w = signed_representation(&s, &pts)?;
    let residual = s
        .exps()
        .iter()
        .zip(s.values())
        .map(|(a, v)| {
            let got: f64 = pts.iter().zip(&w).map(|(x, wj)| wj * if *a == 0.0 { 1.0 } else { x.powf(*a) }).sum();
            (got - v).abs()
        })
        .fold(0.0_f64, f64::max);
    let mut m = report::header(p.task.name(), "success");
    m.insert("points".into(), nums(&pts));
    m.insert("weights".into(), nums(&w));
    m.insert("residual".into(), json!(num(residual)));
    done(m, EXIT_OK)
}

fn hankel(p: &ProblemFile) -> TaskResult {
    let s = p.sequence()?;
    let r = hankel_psd_checks(&s)?;
    let check = |c: &PsdCheck| json!({ "pass": c.pass, "min_eigenvalue": num(c.min_eigenvalue) });
    let (status, exit) = match p.support {
        None => ("success", EXIT_OK),
        Some(support) => {
            let c = match support {
                Support::Hamburger => r.hamburger,
                Support::Stieltjes => r.stieltjes,
                Support::Hausdorff => r.hausdorff,
                Support::Svecov => r.svecov,
            };
            if c.pass {
                ("pass", EXIT_OK)
            } else {
                ("fail", EXIT_FAIL)
            }
        }
    };
    let mut m = report::header(p.task.name(), status);
    m.insert("hamburger".into(), check(&r.hamburger));
    m.insert("stieltjes".into(), check(&r.stieltjes));
    m.insert("hausdorff".into(), check(&r.hausdorff));
    m.insert("svecov".into(), check(&r.svecov));
    done(m, exit)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_the_error_class() {
        assert_eq!(exit_code(&Error::NotDense), EXIT_USAGE);
        assert_eq!(exit_code(&Error::Infeasible { value: -1.0 }), EXIT_FAIL);
        let e = Error::NewtonDivergence { last_iterate: vec![], residual: 1.0, iterations: 3 };
        assert_eq!(exit_code(&e), EXIT_NUMERICAL);
    }

    #[test]
    fn direct_evaluation_handles_the_origin() {
        let p = SparsePolynomial::new(sparsecert_core::ExponentVector::new(vec![0.0, 0.5]).unwrap(), vec![2.0, 3.0]).unwrap();
        assert_eq!(eval_direct(&p, 0.0), 2.0);
        assert!((eval_direct(&p, 4.0) - 8.0).abs() < 1e-15);
    }
}
