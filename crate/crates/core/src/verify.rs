//! Oracles that check the simulator and the shift rules against closed forms
//! and finite differences.

use std::fmt;
use std::io::Write;

use serde::Serialize;

use crate::error::{contract, Result};
use crate::losses::{global_fidelity_loss, Objective};
use crate::models::{build_toy, init_circuit_params};
use crate::qsim::{Circuit, StateVector};
use crate::rng::SeededRng;
use crate::shiftcalc::{
    fd_gradient_oracle, fd_hessian_oracle, loss_gradient, loss_hessian, ShiftConfig, DEFAULT_FD_EPS,
};

pub const GRADIENT_TOLERANCE: f64 = 1e-6;
pub const HESSIAN_TOLERANCE: f64 = 1e-5;
pub const CLOSED_FORM_TOLERANCE: f64 = 1e-10;

/// Qubit counts of the variance-scaling run.
pub const VARIANCE_QUBITS: [usize; 4] = [2, 4, 6, 8];
pub const VARIANCE_DRAWS: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleReport {
    pub name: String,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Free-form numbers behind the verdict.
    pub detail: String,
}

impl OracleReport {
    fn new(name: impl Into<String>, max_error: f64, tolerance: f64, detail: String) -> Self {
        Self {
            name: name.into(),
            max_error,
            tolerance,
            passed: max_error.is_finite() && max_error < tolerance,
            detail,
        }
    }
}

impl fmt::Display for OracleReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} max_error={:.3e} tolerance={:.1e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.max_error,
            self.tolerance
        )?;
        if !self.detail.is_empty() {
            write!(f, " {}", self.detail)?;
        }
        Ok(())
    }
}

/// Writes the reports as a JSON document `{"passed": bool, "reports": [...]}`.
pub fn write_json_summary<W: Write>(reports: &[OracleReport], mut out: W) -> Result<()> {
    #[derive(Serialize)]
    struct Summary<'a> {
        passed: bool,
        reports: &'a [OracleReport],
    }
    let summary = Summary {
        passed: reports.iter().all(|r| r.passed),
        reports,
    };
    serde_json::to_writer_pretty(&mut out, &summary).map_err(|e| contract(e.to_string()))?;
    writeln!(out)?;
    Ok(())
}

/// Simulated global loss against `1 - prod cos^2(theta_i/2)` at random points.
pub fn oracle_toy_closed_form(num_qubits: usize, trials: usize, seed: u64) -> Result<OracleReport> {
    if num_qubits == 0 || num_qubits > 10 {
        return Err(contract(format!("closed-form oracle needs 1..=10 qubits, got {num_qubits}")));
    }
    let circuit = build_toy(num_qubits)?;
    let target = StateVector::zero(num_qubits);
    let mut rng = SeededRng::new(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let theta = rng.uniform_vec(num_qubits, 0.0, std::f64::consts::TAU);
        let closed = 1.0 - theta.iter().map(|t| (t / 2.0).cos().powi(2)).product::<f64>();
        let sim = global_fidelity_loss(&circuit, &theta, &target)?;
        worst = worst.max((sim - closed).abs());
    }
    Ok(OracleReport::new(
        format!("toy_closed_form N={num_qubits}"),
        worst,
        CLOSED_FORM_TOLERANCE,
        format!("trials={trials}"),
    ))
}

/// Largest elementwise gap between the shift-rule loss derivatives and
/// central differences at `trials` uniform points in `[0, 2pi)^P`. The
/// gradient is compared with differences of the loss, the Hessian with
/// differences of the gradient. The report passes when both gaps are under
/// their tolerances; `max_error` is the larger of the two gaps.
pub fn oracle_shift_vs_fd(
    name: &str,
    circuit: &Circuit,
    objective: &Objective,
    trials: usize,
    seed: u64,
) -> Result<OracleReport> {
    let cfg = ShiftConfig::default();
    let p = circuit.num_params();
    let loss = |theta: &[f64]| objective.evaluate(circuit, theta).unwrap_or(f64::NAN);
    let grad = |theta: &[f64]| {
        loss_gradient(circuit, theta, objective, &cfg)
            .map(|g| g.gradient)
            .unwrap_or_else(|_| vec![f64::NAN; p])
    };
    let mut grad_err = 0.0f64;
    let mut hess_err = 0.0f64;
    for t in 0..trials {
        let theta = init_circuit_params(p, seed.wrapping_add(t as u64));
        let exact = loss_hessian(circuit, &theta, objective, &cfg)?;
        let fd_g = fd_gradient_oracle(loss, &theta, DEFAULT_FD_EPS);
        for (a, b) in exact.gradient.iter().zip(&fd_g) {
            grad_err = grad_err.max(nan_max((a - b).abs()));
        }
        let fd_h = fd_hessian_oracle(grad, &theta, DEFAULT_FD_EPS);
        hess_err = hess_err.max(nan_max((&exact.hessian - &fd_h).amax()));
    }
    let passed = grad_err < GRADIENT_TOLERANCE && hess_err < HESSIAN_TOLERANCE;
    Ok(OracleReport {
        name: format!("shift_vs_fd {name}"),
        max_error: hess_err.max(grad_err),
        tolerance: HESSIAN_TOLERANCE,
        passed,
        detail: format!(
            "params={p} trials={trials} gradient_error={grad_err:.3e} gradient_tolerance={GRADIENT_TOLERANCE:.1e} hessian_error={hess_err:.3e}"
        ),
    })
}

fn nan_max(x: f64) -> f64 {
    if x.is_nan() {
        f64::INFINITY
    } else {
        x
    }
}

/// `Var[d_1 l] = (1/8)(3/8)^(N-1)` for the toy global loss under uniform angles.
pub fn analytic_gradient_variance(num_qubits: usize) -> f64 {
    0.125 * 0.375f64.powi(num_qubits as i32 - 1)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VarianceScaling {
    pub qubits: Vec<usize>,
    pub variances: Vec<f64>,
    /// Least-squares slope of `ln Var` against `N`.
    pub slope: f64,
    /// `Var(N_max) / Var(N_min)`.
    pub ratio: f64,
    /// `|Var(2) / (3/64) - 1|`.
    pub relative_error_n2: f64,
    pub monotone: bool,
}

/// Unbiased sample variance of the first shift-rule gradient component of
/// the toy global loss over `draws` uniform angle vectors per qubit count.
pub fn variance_scaling(qubits: &[usize], draws: usize, seed: u64) -> Result<VarianceScaling> {
    if qubits.len() < 2 || draws < 2 {
        return Err(contract("variance scaling needs two qubit counts and two draws"));
    }
    let cfg = ShiftConfig::default();
    let mut variances = Vec::with_capacity(qubits.len());
    for (k, &n) in qubits.iter().enumerate() {
        let circuit = build_toy(n)?;
        let objective = Objective::state_loss(crate::losses::LossFunction::global(StateVector::zero(n)));
        let mut rng = SeededRng::new(seed.wrapping_add(k as u64));
        let samples = (0..draws)
            .map(|_| {
                let theta = rng.uniform_vec(n, 0.0, std::f64::consts::TAU);
                loss_gradient(&circuit, &theta, &objective, &cfg).map(|g| g.gradient[0])
            })
            .collect::<Result<Vec<f64>>>()?;
        let mean = samples.iter().sum::<f64>() / draws as f64;
        let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (draws - 1) as f64;
        variances.push(var);
    }
    let xs: Vec<f64> = qubits.iter().map(|&n| n as f64).collect();
    let ys: Vec<f64> = variances.iter().map(|v| v.ln()).collect();
    let xm = xs.iter().sum::<f64>() / xs.len() as f64;
    let ym = ys.iter().sum::<f64>() / ys.len() as f64;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - xm).powi(2)).sum();
    let n2 = qubits.iter().position(|&n| n == 2);
    Ok(VarianceScaling {
        qubits: qubits.to_vec(),
        slope: sxy / sxx,
        ratio: variances[variances.len() - 1] / variances[0],
        relative_error_n2: n2
            .map(|i| (variances[i] / analytic_gradient_variance(2) - 1.0).abs())
            .unwrap_or(f64::NAN),
        monotone: variances.windows(2).all(|w| w[1] < w[0]),
        variances,
    })
}

/// Variance scaling over `N = 2, 4, 6, 8` with 200 draws each. Passes when
/// the log-variance slope is below `ln(1/2)`, `Var(8)/Var(2) < 0.01`, the
/// `N = 2` estimate is within 25% of `3/64`, and the variances decrease.
pub fn oracle_variance_scaling(seed: u64) -> Result<OracleReport> {
    let v = variance_scaling(&VARIANCE_QUBITS, VARIANCE_DRAWS, seed)?;
    let passed = v.slope < 0.5f64.ln() && v.ratio < 0.01 && v.relative_error_n2 < 0.25 && v.monotone;
    let vars = v
        .variances
        .iter()
        .map(|x| format!("{x:.4e}"))
        .collect::<Vec<_>>()
        .join(",");
    Ok(OracleReport {
        name: "variance_scaling".into(),
        max_error: v.ratio,
        tolerance: 0.01,
        passed,
        detail: format!(
            "variances=[{vars}] slope={:.4} n2_relative_error={:.4} monotone={}",
            v.slope, v.relative_error_n2, v.monotone
        ),
    })
}
