//! Subcommand adapters: turn parsed parameters into library calls and a
//! [`RunReport`].

use std::fs;
use std::path::{Path, PathBuf};

use gravloop::cow_model::{
    arm_phases, gauge_residual, integrated_gauge_error, loop_factor, output_amplitude_limit,
};
use gravloop::deutsch_jozsa::run_dj;
use gravloop::loop_interferometer::{
    classify_series, convergence_trace, divergence_threshold, output_state_limit,
};
use gravloop::verify::{run_invariant_suite, VerifyOptions};
use gravloop::{
    BeamSplitterConfig64, BooleanFunction, Complex64, CowConfig64, LoopFactor64,
    PerturbationConfig64, SeriesKind,
};
use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde_json::Value;
use thiserror::Error;

use crate::report::{complex, normalize, num, Cell, RunReport};

/// Default pass mark for the loop trace's final distance to the limit.
pub const LOOP_TOLERANCE: f64 = 1e-9;
/// Default pass mark for the integrated gauge identity in `cow`.
pub const COW_TOLERANCE: f64 = 1e-6;
/// Upper bound on the number of rows of a `dj` sweep.
pub const MAX_SWEEP_ROWS: usize = 1_000_000;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<gravloop::Error> for CliError {
    fn from(e: gravloop::Error) -> Self {
        use gravloop::Error::*;
        match e {
            Pole { .. } | Divergent { .. } | NonUnitary { .. } => {
                CliError::Numerical(e.to_string())
            }
            Domain(_) | Precondition(_) | Resource(_) => CliError::Config(e.to_string()),
        }
    }
}

/// A finished report, plus the failure to signal once it has been written.
#[derive(Debug)]
pub struct Outcome {
    pub report: RunReport,
    pub failure: Option<CliError>,
}

impl Outcome {
    fn ok(report: RunReport) -> Self {
        Self {
            report,
            failure: None,
        }
    }
}

fn opt_num(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    let value: T = serde_path_to_error::deserialize(&mut *de).map_err(|e| {
        CliError::Config(format!(
            "{}: invalid field `{}`: {}",
            path.display(),
            e.path(),
            e.inner()
        ))
    })?;
    de.end()
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    Ok(value)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LoopU {
    Angle(f64),
    Complex(f64, f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoopParams {
    pub alpha: f64,
    pub u: LoopU,
    pub n_max: u32,
    pub tolerance: Option<f64>,
}

pub fn cmd_loop(p: &LoopParams) -> Result<Outcome, CliError> {
    let bs = BeamSplitterConfig64::from_alpha(p.alpha)?;
    let u = match p.u {
        LoopU::Angle(phi) => LoopFactor64::from_angle(phi)?,
        LoopU::Complex(re, im) => LoopFactor64::new(Complex64::new(re, im))?,
    };
    let class = classify_series(&bs, &u);
    let trace = convergence_trace(&bs, &u, p.n_max)?;
    let limit = if class.kind == SeriesKind::Convergent && bs.alpha() > 0.0 {
        Some(output_state_limit(&bs, &u)?)
    } else {
        None
    };
    let tol = p.tolerance.unwrap_or(LOOP_TOLERANCE);

    let mut r = RunReport::new(
        "loop",
        &["n", "re_out", "im_out", "re_loop", "im_loop", "distance"],
    );
    r.param("alpha", num(bs.alpha()));
    r.param("beta", num(bs.beta()));
    match p.u {
        LoopU::Angle(phi) => r.param("u_angle", num(phi)),
        LoopU::Complex(..) => r.param("u_angle", Value::Null),
    }
    r.param("u", complex(u.value().re, u.value().im));
    r.param("n_max", Value::from(p.n_max));
    r.param("tolerance", num(tol));
    for row in &trace {
        let s = row.state;
        r.push(vec![
            Cell::Int(row.n.into()),
            Cell::Num(s.out_amp.re),
            Cell::Num(s.out_amp.im),
            Cell::Num(s.loop_amp.re),
            Cell::Num(s.loop_amp.im),
            row.distance.map_or(Cell::Empty, Cell::Num),
        ]);
    }
    let final_distance = trace.last().and_then(|row| row.distance);
    r.summary("verdict", Value::String(class.kind.label().into()));
    r.summary("ratio", num(class.ratio));
    r.summary("unitary", Value::Bool(class.unitary));
    r.summary("divergence_threshold", num(divergence_threshold(&bs)));
    r.summary(
        "limit_out",
        limit.map_or(Value::Null, |l| complex(l.out_amp.re, l.out_amp.im)),
    );
    r.summary("final_distance", opt_num(final_distance));
    r.summary(
        "converged",
        Value::Bool(final_distance.is_some_and(|d| d < tol)),
    );

    let failure = (class.kind != SeriesKind::Convergent).then(|| {
        CliError::Numerical(format!(
            "loop series is {}: beta*|U| = {:e}",
            class.kind.label(),
            class.ratio
        ))
    });
    Ok(Outcome { report: r, failure })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CowParams {
    pub config: PathBuf,
    pub tolerance: Option<f64>,
}

pub fn cmd_cow(p: &CowParams) -> Result<Outcome, CliError> {
    let cfg: CowConfig64 = read_json(&p.config)?;
    let phases = arm_phases(&cfg)?;
    let u = loop_factor(&cfg)?;
    let out = output_amplitude_limit(&cfg)?;
    let residual = gauge_residual(&cfg)?;
    let action_err = integrated_gauge_error(&cfg)?;
    let tol = p.tolerance.unwrap_or(COW_TOLERANCE);

    let mut r = RunReport::new(
        "cow",
        &[
            "phi_g",
            "phi_a",
            "re_u",
            "im_u",
            "re_out",
            "im_out",
            "gauge_residual",
            "action_difference_error",
        ],
    );
    let echo = serde_json::to_value(&cfg).map_err(|e| CliError::Config(e.to_string()))?;
    r.param("config", normalize(echo));
    r.param("tolerance", num(tol));
    r.push(vec![
        Cell::Num(phases.phi_g),
        Cell::Num(phases.phi_a),
        Cell::Num(u.value().re),
        Cell::Num(u.value().im),
        Cell::Num(out.re),
        Cell::Num(out.im),
        Cell::Num(residual),
        Cell::Num(action_err),
    ]);
    r.summary("phi_g", num(phases.phi_g));
    r.summary("phi_a", num(phases.phi_a));
    r.summary("U", complex(u.value().re, u.value().im));
    r.summary("out_amp", complex(out.re, out.im));
    r.summary("arms_matched", Value::Bool(cfg.arms_matched()));
    r.summary("gauge_identity_ok", Value::Bool(action_err < tol));
    Ok(Outcome::ok(r))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedFunction {
    Constant0,
    Constant1,
    FirstBit,
    Parity,
}

impl NamedFunction {
    pub fn name(&self) -> &'static str {
        match self {
            NamedFunction::Constant0 => "constant0",
            NamedFunction::Constant1 => "constant1",
            NamedFunction::FirstBit => "first-bit",
            NamedFunction::Parity => "parity",
        }
    }

    pub fn build(&self, n: usize) -> gravloop::Result<BooleanFunction> {
        match self {
            NamedFunction::Constant0 => BooleanFunction::constant(n, false),
            NamedFunction::Constant1 => BooleanFunction::constant(n, true),
            NamedFunction::FirstBit => {
                BooleanFunction::from_fn(n, |x| (x >> (n.max(1) - 1)) & 1 == 1)
            }
            NamedFunction::Parity => BooleanFunction::from_fn(n, |x| x.count_ones() % 2 == 1),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FunctionSpec {
    Named { n: usize, function: NamedFunction },
    Table(PathBuf),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PhiSweep {
    Single(f64),
    Range { start: f64, end: f64, step: f64 },
}

impl PhiSweep {
    pub fn values(&self) -> Result<Vec<f64>, CliError> {
        match *self {
            PhiSweep::Single(phi) => Ok(vec![phi]),
            PhiSweep::Range { start, end, step } => {
                if step <= 0.0 || step.is_nan() {
                    return Err(CliError::Config(format!(
                        "phi step must be positive, got {step}"
                    )));
                }
                if end < start {
                    return Err(CliError::Config(format!(
                        "empty phi range: end {end} < start {start}"
                    )));
                }
                let count = ((end - start) / step + 1e-9).floor() + 1.0;
                if count > MAX_SWEEP_ROWS as f64 {
                    return Err(CliError::Config(format!(
                        "phi sweep would produce {count} rows, limit is {MAX_SWEEP_ROWS}"
                    )));
                }
                Ok((0..count as usize)
                    .map(|k| start + k as f64 * step)
                    .collect())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DjParams {
    pub function: FunctionSpec,
    pub sweep: PhiSweep,
    pub workers: usize,
    pub tolerance: Option<f64>,
}

pub fn cmd_dj(p: &DjParams) -> Result<Outcome, CliError> {
    let (f, name) = match &p.function {
        FunctionSpec::Named { n, function } => (function.build(*n)?, function.name()),
        FunctionSpec::Table(path) => (read_json::<BooleanFunction>(path)?, "table"),
    };
    let class = f.promised_class()?;
    let phis = p.sweep.values()?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(p.workers)
        .build()
        .map_err(|e| CliError::Config(format!("cannot start worker pool: {e}")))?;
    let outcomes = pool.install(|| {
        phis.par_iter()
            .map(|&phi| run_dj(&f, &PerturbationConfig64::new(phi)?))
            .collect::<gravloop::Result<Vec<_>>>()
    })?;

    let mut r = RunReport::new("dj", &["phi_g", "prob_zero", "verdict"]);
    r.param("n", Value::from(f.n()));
    r.param("function", Value::String(name.into()));
    r.param("table", Value::String(f.to_hex()));
    match p.sweep {
        PhiSweep::Single(phi) => r.param("phi", num(phi)),
        PhiSweep::Range { start, end, step } => {
            r.param("phi_start", num(start));
            r.param("phi_end", num(end));
            r.param("phi_step", num(step));
        }
    }
    r.param("tolerance", opt_num(p.tolerance));
    let mut flip = None;
    for (&phi, o) in phis.iter().zip(&outcomes) {
        if flip.is_none() && o.verdict != class {
            flip = Some(phi);
        }
        r.push(vec![
            Cell::Num(phi),
            Cell::Num(o.prob_zero),
            Cell::Text(o.verdict.to_string()),
        ]);
    }
    r.summary("true_class", Value::String(class.to_string()));
    r.summary("flip_phi", opt_num(flip));
    Ok(Outcome::ok(r))
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyParams {
    pub inject_u: Option<(f64, f64)>,
    pub tolerance: Option<f64>,
}

pub fn cmd_verify(p: &VerifyParams) -> Result<Outcome, CliError> {
    let opts = VerifyOptions {
        tolerance: p.tolerance,
        injected_loop_factor: p.inject_u.map(|(re, im)| Complex64::new(re, im)),
    };
    let checks = run_invariant_suite(&opts)?;

    let mut r = RunReport::new("verify", &["invariant", "passed", "residual", "tolerance"]);
    r.param("tolerance", opt_num(p.tolerance));
    r.param(
        "inject_u",
        p.inject_u.map_or(Value::Null, |(re, im)| complex(re, im)),
    );
    let mut failed = Vec::new();
    for c in &checks {
        let name = format!("{}/{}", c.module, c.name);
        if !c.passed {
            failed.push(name.clone());
        }
        r.push(vec![
            Cell::Text(name),
            Cell::Bool(c.passed),
            Cell::Num(c.residual),
            Cell::Num(c.tolerance),
        ]);
    }
    r.summary("checks", Value::from(checks.len()));
    r.summary("failed", Value::from(failed.len()));
    let failure = (!failed.is_empty()).then(|| {
        CliError::Verification(format!(
            "{} invariant(s) failed: {}",
            failed.len(),
            failed.join(", ")
        ))
    });
    Ok(Outcome { report: r, failure })
}

#[cfg(test)]
#[allow(clippy::approx_constant)]
mod tests {
    use super::*;
    use std::f64::consts::PI;
    use std::io::Write;

    fn row_num(r: &RunReport, row: usize, col: usize) -> f64 {
        match r.rows[row][col] {
            Cell::Num(x) => x,
            ref c => panic!("not a number: {c:?}"),
        }
    }

    #[test]
    fn loop_balanced_unit_factor_converges() {
        let o = cmd_loop(&LoopParams {
            alpha: 0.7071,
            u: LoopU::Angle(0.0),
            n_max: 30,
            tolerance: None,
        })
        .unwrap();
        assert!(o.failure.is_none());
        assert!(row_num(&o.report, 29, 5) < 1e-9);
        assert_eq!(o.report.summary["verdict"], "CONVERGENT");
    }

    #[test]
    fn loop_divergent_still_reports() {
        let o = cmd_loop(&LoopParams {
            alpha: 0.7071,
            u: LoopU::Complex(1.6, 0.0),
            n_max: 40,
            tolerance: None,
        })
        .unwrap();
        assert_eq!(o.failure.as_ref().map(CliError::exit_code), Some(3));
        assert_eq!(o.report.rows.len(), 40);
        assert_eq!(o.report.summary["verdict"], "DIVERGENT");
        let loops: Vec<f64> = (0..40).map(|i| row_num(&o.report, i, 3).abs()).collect();
        assert!(loops.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(o.report.rows[0][5], Cell::Empty);
    }

    #[test]
    fn loop_without_loop_branch() {
        let o = cmd_loop(&LoopParams {
            alpha: 1.0,
            u: LoopU::Angle(0.5),
            n_max: 5,
            tolerance: None,
        })
        .unwrap();
        for i in 0..5 {
            assert_eq!(row_num(&o.report, i, 1), 1.0);
            assert_eq!(row_num(&o.report, i, 2), 0.0);
        }
    }

    #[test]
    fn loop_pole_is_numerical_error() {
        let e = cmd_loop(&LoopParams {
            alpha: 0.0,
            u: LoopU::Angle(0.0),
            n_max: 5,
            tolerance: None,
        })
        .unwrap_err();
        assert_eq!(e.exit_code(), 3);
        let e = cmd_loop(&LoopParams {
            alpha: 1.5,
            u: LoopU::Angle(0.0),
            n_max: 5,
            tolerance: None,
        })
        .unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    fn temp_json(body: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(body.as_bytes()).unwrap();
        f
    }

    fn flat_config(g: f64) -> String {
        let zeros = vec!["0"; 101].join(",");
        let traj = format!(r#"{{"t_start":0,"t_end":1,"mass":1,"positions":[{zeros}]}}"#);
        format!(r#"{{"mass":1,"g":{g},"hbar":1,"traj_A":{traj},"traj_B":{traj}}}"#)
    }

    #[test]
    fn cow_flat_paths() {
        let f = temp_json(&flat_config(1.0));
        let o = cmd_cow(&CowParams {
            config: f.path().into(),
            tolerance: None,
        })
        .unwrap();
        assert_eq!(row_num(&o.report, 0, 0), 0.0);
        assert!((row_num(&o.report, 0, 1) - 1.0 / 6.0).abs() < 1e-12);
        assert!(row_num(&o.report, 0, 7) < 1e-6);
        assert_eq!(o.report.summary["gauge_identity_ok"], true);
    }

    #[test]
    fn cow_without_gravity_is_reflective() {
        let f = temp_json(&flat_config(0.0));
        let o = cmd_cow(&CowParams {
            config: f.path().into(),
            tolerance: None,
        })
        .unwrap();
        assert_eq!(row_num(&o.report, 0, 2), 1.0);
        assert!((row_num(&o.report, 0, 4) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cow_schema_error_names_the_field() {
        let f = temp_json(r#"{"mass":1,"g":"x","hbar":1,"traj_A":{},"traj_B":{}}"#);
        let e = cmd_cow(&CowParams {
            config: f.path().into(),
            tolerance: None,
        })
        .unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(e.to_string().contains("`g`"), "{e}");
        let e = cmd_cow(&CowParams {
            config: "/nonexistent/cow.json".into(),
            tolerance: None,
        })
        .unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    fn dj(function: NamedFunction, n: usize, sweep: PhiSweep) -> Outcome {
        cmd_dj(&DjParams {
            function: FunctionSpec::Named { n, function },
            sweep,
            workers: 2,
            tolerance: None,
        })
        .unwrap()
    }

    #[test]
    fn dj_constant_sweep_follows_closed_form() {
        let o = dj(
            NamedFunction::Constant0,
            4,
            PhiSweep::Range {
                start: 0.0,
                end: PI,
                step: PI / 8.0,
            },
        );
        assert_eq!(o.report.rows.len(), 9);
        for i in 0..9 {
            let phi = row_num(&o.report, i, 0);
            assert!((row_num(&o.report, i, 1) - (phi / 2.0).cos().powi(8)).abs() < 1e-12);
        }
        assert!(row_num(&o.report, 8, 1) < 1e-10);
    }

    #[test]
    fn dj_balanced_and_flip() {
        let o = dj(NamedFunction::Parity, 3, PhiSweep::Single(0.0));
        assert!(row_num(&o.report, 0, 1) < 1e-12);
        assert_eq!(o.report.rows[0][2], Cell::Text("Balanced".into()));
        assert_eq!(o.report.summary["flip_phi"], Value::Null);

        let o = dj(NamedFunction::Constant1, 2, PhiSweep::Single(PI / 2.0));
        assert!((row_num(&o.report, 0, 1) - 0.25).abs() < 1e-12);
        assert_eq!(o.report.rows[0][2], Cell::Text("Balanced".into()));
        assert_eq!(o.report.summary["flip_phi"], num(PI / 2.0));
    }

    #[test]
    fn dj_rows_do_not_depend_on_workers() {
        let sweep = PhiSweep::Range {
            start: 0.0,
            end: PI,
            step: PI / 64.0,
        };
        let f = FunctionSpec::Named {
            n: 5,
            function: NamedFunction::FirstBit,
        };
        let a = cmd_dj(&DjParams {
            function: f.clone(),
            sweep,
            workers: 1,
            tolerance: None,
        })
        .unwrap();
        let b = cmd_dj(&DjParams {
            function: f,
            sweep,
            workers: 4,
            tolerance: None,
        })
        .unwrap();
        assert_eq!(a.report.rows, b.report.rows);
    }

    #[test]
    fn dj_rejects_non_promise_table() {
        let f = temp_json(r#"{"n":2,"table":"8"}"#);
        let e = cmd_dj(&DjParams {
            function: FunctionSpec::Table(f.path().into()),
            sweep: PhiSweep::Single(0.0),
            workers: 1,
            tolerance: None,
        })
        .unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn sweep_bounds() {
        assert_eq!(
            PhiSweep::Range {
                start: 0.0,
                end: 1.0,
                step: 0.25
            }
            .values()
            .unwrap()
            .len(),
            5
        );
        assert!(PhiSweep::Range {
            start: 1.0,
            end: 0.0,
            step: 0.25
        }
        .values()
        .is_err());
        assert!(PhiSweep::Range {
            start: 0.0,
            end: 1.0,
            step: 0.0
        }
        .values()
        .is_err());
        assert!(PhiSweep::Range {
            start: 0.0,
            end: 1.0,
            step: 1e-9
        }
        .values()
        .is_err());
    }

    #[test]
    fn named_functions_are_promised() {
        for n in 1..=5 {
            for f in [
                NamedFunction::Constant0,
                NamedFunction::Constant1,
                NamedFunction::FirstBit,
                NamedFunction::Parity,
            ] {
                assert!(f.build(n).unwrap().promised_class().is_ok());
            }
        }
    }

    #[test]
    fn verify_negative_control() {
        let o = cmd_verify(&VerifyParams {
            inject_u: Some((1.2, 0.0)),
            tolerance: None,
        })
        .unwrap();
        assert_eq!(o.failure.as_ref().map(CliError::exit_code), Some(1));
        assert_eq!(o.report.summary["failed"], 1);
    }
}
