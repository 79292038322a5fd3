//! Parameter-shift gradients and Hessians.
//!
//! For a circuit output `f` whose parameters enter through half-Pauli
//! rotations, with shift `s = pi/2`:
//!
//! ```text
//! d_i f      = [f(+s_i) - f(-s_i)] / 2
//! d_j d_i f  = [f(+s_i,+s_j) + f(-s_i,-s_j) - f(-s_i,+s_j) - f(+s_i,-s_j)] / 4
//! d_i d_i f  = [f(+2s_i) + f(-2s_i) - 2 f] / 4
//! ```
//!
//! Loss derivatives follow from the chain rule applied once and twice:
//! `d_i l = l'(f) d_i f` and `d_j d_i l = l'(f) d_j d_i f + l''(f) d_i f d_j f`.
//!
//! The generic routines take any `Fn(&[f64]) -> f64`. The circuit routines
//! produce the same values but reuse the simulated state in front of each
//! shifted gate, so only the remainder of the circuit is replayed.

use nalgebra::DMatrix;

use crate::error::Result;
use crate::losses::Objective;
use crate::qsim::{Circuit, StateVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftConfig {
    pub shift: f64,
    pub symmetrize: bool,
}

impl Default for ShiftConfig {
    fn default() -> Self {
        Self {
            shift: std::f64::consts::FRAC_PI_2,
            symmetrize: true,
        }
    }
}

/// Default step for the finite-difference oracles.
pub const DEFAULT_FD_EPS: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq)]
pub struct GradHess {
    pub value: f64,
    pub gradient: Vec<f64>,
    pub hessian: DMatrix<f64>,
    /// Number of circuit executions used.
    pub eval_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossGradient {
    pub value: f64,
    pub gradient: Vec<f64>,
    pub eval_count: usize,
}

/// Circuit runs for one gradient: `2P`.
pub fn gradient_eval_count(num_params: usize) -> usize {
    2 * num_params
}

/// Circuit runs for one shift Hessian: `4 P(P-1)/2 + 2P + 1`.
pub fn hessian_eval_count(num_params: usize) -> usize {
    2 * num_params * num_params.saturating_sub(1) + 2 * num_params + 1
}

pub fn shift_gradient<F>(f: F, params: &[f64], cfg: &ShiftConfig) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let mut work = params.to_vec();
    (0..params.len())
        .map(|i| {
            work[i] = params[i] + cfg.shift;
            let plus = f(&work);
            work[i] = params[i] - cfg.shift;
            let minus = f(&work);
            work[i] = params[i];
            0.5 * (plus - minus)
        })
        .collect()
}

/// Shift-rule Hessian over unordered pairs `i <= j`; returns the matrix and
/// the number of evaluations of `f`.
pub fn shift_hessian_raw<F>(f: F, params: &[f64], cfg: &ShiftConfig) -> (DMatrix<f64>, usize)
where
    F: Fn(&[f64]) -> f64,
{
    let p = params.len();
    let s = cfg.shift;
    let mut h = DMatrix::zeros(p, p);
    let mut work = params.to_vec();
    let base = f(&work);
    let mut evals = 1;
    for i in 0..p {
        work[i] = params[i] + 2.0 * s;
        let plus = f(&work);
        work[i] = params[i] - 2.0 * s;
        let minus = f(&work);
        work[i] = params[i];
        h[(i, i)] = 0.25 * (plus + minus - 2.0 * base);
        evals += 2;
        for j in i + 1..p {
            let mut at = |si: f64, sj: f64| {
                work[i] = params[i] + si;
                work[j] = params[j] + sj;
                let v = f(&work);
                work[i] = params[i];
                work[j] = params[j];
                v
            };
            let value = 0.25 * (at(s, s) + at(-s, -s) - at(-s, s) - at(s, -s));
            h[(i, j)] = value;
            h[(j, i)] = value;
            evals += 4;
        }
    }
    if cfg.symmetrize {
        h = symmetrize(&h);
    }
    (h, evals)
}

pub fn symmetrize(h: &DMatrix<f64>) -> DMatrix<f64> {
    (h + h.transpose()) * 0.5
}

/// `max |H - H^T|`.
pub fn max_asymmetry(h: &DMatrix<f64>) -> f64 {
    let n = h.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            worst = worst.max((h[(i, j)] - h[(j, i)]).abs());
        }
    }
    worst
}

/// Central differences `[f(theta + eps e_i) - f(theta - eps e_i)] / 2 eps`.
pub fn fd_gradient_oracle<F>(f: F, params: &[f64], eps: f64) -> Vec<f64>
where
    F: Fn(&[f64]) -> f64,
{
    assert!(eps > 0.0, "finite-difference step must be positive");
    let mut work = params.to_vec();
    (0..params.len())
        .map(|i| {
            work[i] = params[i] + eps;
            let plus = f(&work);
            work[i] = params[i] - eps;
            let minus = f(&work);
            work[i] = params[i];
            (plus - minus) / (2.0 * eps)
        })
        .collect()
}

/// Column `j` is the central difference of `grad` along `e_j`; not symmetrized.
pub fn fd_jacobian<G>(grad: G, params: &[f64], eps: f64) -> DMatrix<f64>
where
    G: Fn(&[f64]) -> Vec<f64>,
{
    assert!(eps > 0.0, "finite-difference step must be positive");
    let p = params.len();
    let mut out = DMatrix::zeros(p, p);
    let mut work = params.to_vec();
    for j in 0..p {
        work[j] = params[j] + eps;
        let plus = grad(&work);
        work[j] = params[j] - eps;
        let minus = grad(&work);
        work[j] = params[j];
        for i in 0..p {
            out[(i, j)] = (plus[i] - minus[i]) / (2.0 * eps);
        }
    }
    out
}

/// Symmetrized finite-difference Hessian from a gradient function.
pub fn fd_hessian_oracle<G>(grad: G, params: &[f64], eps: f64) -> DMatrix<f64>
where
    G: Fn(&[f64]) -> Vec<f64>,
{
    symmetrize(&fd_jacobian(grad, params, eps))
}

/// Value, gradient and optionally Hessian of `output(psi(theta, data))`.
struct OutputDerivatives {
    value: f64,
    gradient: Vec<f64>,
    hessian: Option<DMatrix<f64>>,
    evals: usize,
}

fn output_derivatives<O>(
    circuit: &Circuit,
    params: &[f64],
    data: &[f64],
    output: O,
    cfg: &ShiftConfig,
    with_hessian: bool,
) -> Result<OutputDerivatives>
where
    O: Fn(&StateVector) -> Result<f64>,
{
    let p = circuit.num_params();
    let end = circuit.num_ops();
    let s = cfg.shift;

    let mut order: Vec<usize> = (0..p).collect();
    order.sort_by_key(|&slot| circuit.param_op(slot));

    // Replays ops `op+1..` after applying `op` at angle `theta`.
    let finish = |state: &StateVector, op: usize, theta: f64| -> Result<f64> {
        let mut st = state.clone();
        circuit.apply_op_with_angle(&mut st, op, theta);
        circuit.apply_ops(&mut st, op + 1..end, params, data);
        output(&st)
    };

    let mut prefix = StateVector::zero(circuit.num_qubits());
    let value = {
        let mut st = prefix.clone();
        circuit.apply_ops(&mut st, 0..end, params, data);
        output(&st)?
    };
    let mut evals = 1;
    let mut gradient = vec![0.0; p];
    let mut hessian = with_hessian.then(|| DMatrix::zeros(p, p));
    let mut cursor = 0;

    for (rank, &a) in order.iter().enumerate() {
        let op_a = circuit.param_op(a);
        circuit.apply_ops(&mut prefix, cursor..op_a, params, data);
        cursor = op_a;
        let theta_a = circuit.op_angle(op_a, params, data);

        gradient[a] = 0.5 * (finish(&prefix, op_a, theta_a + s)? - finish(&prefix, op_a, theta_a - s)?);
        evals += 2;

        let Some(h) = hessian.as_mut() else { continue };
        let plus = finish(&prefix, op_a, theta_a + 2.0 * s)?;
        let minus = finish(&prefix, op_a, theta_a - 2.0 * s)?;
        h[(a, a)] = 0.25 * (plus + minus - 2.0 * value);
        evals += 2;

        let later = &order[rank + 1..];
        // f(sa, sb) for every later slot b, indexed [b][sign of sb].
        let mut corners = vec![[[0.0; 2]; 2]; later.len()];
        for (ia, sa) in [s, -s].into_iter().enumerate() {
            let mut st = prefix.clone();
            circuit.apply_op_with_angle(&mut st, op_a, theta_a + sa);
            let mut at = op_a + 1;
            for (k, &b) in later.iter().enumerate() {
                let op_b = circuit.param_op(b);
                circuit.apply_ops(&mut st, at..op_b, params, data);
                at = op_b;
                let theta_b = circuit.op_angle(op_b, params, data);
                corners[k][ia][0] = finish(&st, op_b, theta_b + s)?;
                corners[k][ia][1] = finish(&st, op_b, theta_b - s)?;
                evals += 2;
            }
        }
        for (k, &b) in later.iter().enumerate() {
            let [[pp, pm], [mp, mm]] = corners[k];
            let v = 0.25 * (pp + mm - mp - pm);
            h[(a, b)] = v;
            h[(b, a)] = v;
        }
    }

    if cfg.symmetrize {
        hessian = hessian.map(|h| symmetrize(&h));
    }
    Ok(OutputDerivatives {
        value,
        gradient,
        hessian,
        evals,
    })
}

/// Shift-rule gradient of the circuit output `output(psi(theta, data))`.
pub fn circuit_gradient<O>(
    circuit: &Circuit,
    params: &[f64],
    data: &[f64],
    output: O,
    cfg: &ShiftConfig,
) -> Result<Vec<f64>>
where
    O: Fn(&StateVector) -> Result<f64>,
{
    circuit.check_inputs(params, data)?;
    Ok(output_derivatives(circuit, params, data, output, cfg, false)?.gradient)
}

/// Shift-rule Hessian of the circuit output, with its evaluation count
/// (the gradient runs are not counted).
pub fn circuit_hessian<O>(
    circuit: &Circuit,
    params: &[f64],
    data: &[f64],
    output: O,
    cfg: &ShiftConfig,
) -> Result<(DMatrix<f64>, usize)>
where
    O: Fn(&StateVector) -> Result<f64>,
{
    circuit.check_inputs(params, data)?;
    let d = output_derivatives(circuit, params, data, output, cfg, true)?;
    let h = d.hessian.unwrap_or_else(|| DMatrix::zeros(0, 0));
    Ok((h, d.evals - gradient_eval_count(circuit.num_params())))
}

/// Chain-rule gradient of the objective, summed over its terms in order.
pub fn loss_gradient(
    circuit: &Circuit,
    params: &[f64],
    objective: &Objective,
    cfg: &ShiftConfig,
) -> Result<LossGradient> {
    objective.validate(circuit, params)?;
    let p = circuit.num_params();
    let mut value = 0.0;
    let mut gradient = vec![0.0; p];
    let mut eval_count = 0;
    for term in objective.terms() {
        let d = output_derivatives(circuit, params, &term.data, |st| term.loss.output(st), cfg, false)?;
        let l1 = term.loss.first_derivative(d.value);
        value += term.loss.value(d.value);
        for (g, df) in gradient.iter_mut().zip(&d.gradient) {
            *g += l1 * df;
        }
        eval_count += d.evals;
    }
    Ok(LossGradient {
        value,
        gradient,
        eval_count,
    })
}

/// Chain-rule Hessian of the objective: per term
/// `l'(f) H_f + l''(f) grad f grad f^T`, summed in term order.
pub fn loss_hessian(
    circuit: &Circuit,
    params: &[f64],
    objective: &Objective,
    cfg: &ShiftConfig,
) -> Result<GradHess> {
    objective.validate(circuit, params)?;
    let p = circuit.num_params();
    let mut value = 0.0;
    let mut gradient = vec![0.0; p];
    let mut hessian = DMatrix::zeros(p, p);
    let mut eval_count = 0;
    for term in objective.terms() {
        let d = output_derivatives(circuit, params, &term.data, |st| term.loss.output(st), cfg, true)?;
        let l1 = term.loss.first_derivative(d.value);
        let l2 = term.loss.second_derivative(d.value);
        value += term.loss.value(d.value);
        let hf = d.hessian.unwrap_or_else(|| DMatrix::zeros(p, p));
        for i in 0..p {
            gradient[i] += l1 * d.gradient[i];
            for j in 0..p {
                hessian[(i, j)] += l1 * hf[(i, j)] + l2 * d.gradient[i] * d.gradient[j];
            }
        }
        eval_count += d.evals;
    }
    Ok(GradHess {
        value,
        gradient,
        hessian,
        eval_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::generate_circle_dataset;
    use crate::losses::LossFunction;
    use crate::models::{build_layered, build_reuploading, build_toy};
    use crate::rng::SeededRng;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    fn max_abs_diff_mat(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        (a - b).abs().max()
    }

    fn toy_fidelity(n: usize) -> impl Fn(&[f64]) -> f64 {
        let c = build_toy(n).unwrap();
        let zero = StateVector::zero(n);
        move |p: &[f64]| c.run(p, &[]).unwrap().fidelity(&zero).unwrap()
    }

    /// d/dtheta_k prod_i cos^2(theta_i / 2)
    fn toy_analytic_gradient(theta: &[f64]) -> Vec<f64> {
        (0..theta.len())
            .map(|k| {
                let rest: f64 = theta
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != k)
                    .map(|(_, t)| (t / 2.0).cos().powi(2))
                    .product();
                -0.5 * theta[k].sin() * rest
            })
            .collect()
    }

    #[test]
    fn gradient_examples() {
        let f = toy_fidelity(1);
        let g = shift_gradient(&f, &[FRAC_PI_2], &ShiftConfig::default());
        assert_abs_diff_eq!(g[0], -0.5, epsilon = 1e-14);

        // slot 1 is never read by the function
        let ignore = |p: &[f64]| (p[0] / 2.0).cos().powi(2);
        let g = shift_gradient(ignore, &[0.4, 1.7], &ShiftConfig::default());
        assert_eq!(g[1], 0.0);
    }

    #[test]
    fn gradient_exact_on_toy_model() {
        let mut rng = SeededRng::new(21);
        for n in 1..=8 {
            let f = toy_fidelity(n);
            for _ in 0..100 / n {
                let theta = rng.uniform_vec(n, 0.0, 2.0 * PI);
                let g = shift_gradient(&f, &theta, &ShiftConfig::default());
                assert!(max_abs_diff(&g, &toy_analytic_gradient(&theta)) < 1e-10);
            }
        }
    }

    #[test]
    fn hessian_toy_anchors() {
        for n in [1, 2, 5] {
            let c = build_toy(n).unwrap();
            let obj = Objective::state_loss(LossFunction::global(StateVector::zero(n)));
            let gh = loss_hessian(&c, &vec![0.0; n], &obj, &ShiftConfig::default()).unwrap();
            let expected = DMatrix::<f64>::identity(n, n) * 0.5;
            assert!(max_abs_diff_mat(&gh.hessian, &expected) < 1e-12);
        }
        let c = build_toy(1).unwrap();
        let obj = Objective::state_loss(LossFunction::global(StateVector::zero(1)));
        let gh = loss_hessian(&c, &[FRAC_PI_2], &obj, &ShiftConfig::default()).unwrap();
        assert_abs_diff_eq!(gh.hessian[(0, 0)], 0.0, epsilon = 1e-14);
    }

    #[test]
    fn eval_counts_follow_schedule() {
        let calls = std::cell::Cell::new(0usize);
        let f = |p: &[f64]| {
            calls.set(calls.get() + 1);
            p.iter().map(|t| t.cos()).product::<f64>()
        };
        let theta = [0.1, 0.2, 0.3, 0.4, 0.5];
        let _ = shift_gradient(f, &theta, &ShiftConfig::default());
        assert_eq!(calls.get(), gradient_eval_count(5));
        calls.set(0);
        let (_, evals) = shift_hessian_raw(f, &theta, &ShiftConfig::default());
        assert_eq!(calls.get(), hessian_eval_count(5));
        assert_eq!(evals, 4 * 5 * 4 / 2 + 2 * 5 + 1);

        let c = build_layered(2, 2).unwrap();
        let target = StateVector::uniform(2);
        let params = vec![0.3; c.num_params()];
        let (_, evals) = circuit_hessian(&c, &params, &[], |s| s.fidelity(&target), &ShiftConfig::default()).unwrap();
        assert_eq!(evals, hessian_eval_count(c.num_params()));
        let obj = Objective::state_loss(LossFunction::global(target));
        let gh = loss_hessian(&c, &params, &obj, &ShiftConfig::default()).unwrap();
        assert_eq!(gh.eval_count, hessian_eval_count(12) + gradient_eval_count(12));
    }

    #[test]
    fn circuit_path_matches_generic_path() {
        let c = build_layered(3, 2).unwrap();
        let target = StateVector::uniform(3);
        let mut rng = SeededRng::new(5);
        let params = rng.uniform_vec(c.num_params(), 0.0, 2.0 * PI);
        let f = |p: &[f64]| c.run(p, &[]).unwrap().fidelity(&target).unwrap();
        let cfg = ShiftConfig::default();

        let g_generic = shift_gradient(f, &params, &cfg);
        let g_circuit = circuit_gradient(&c, &params, &[], |s| s.fidelity(&target), &cfg).unwrap();
        assert_eq!(g_generic, g_circuit);

        let (h_generic, _) = shift_hessian_raw(f, &params, &cfg);
        let (h_circuit, _) = circuit_hessian(&c, &params, &[], |s| s.fidelity(&target), &cfg).unwrap();
        assert!(max_abs_diff_mat(&h_generic, &h_circuit) < 1e-14);
    }

    #[test]
    fn hessian_symmetric_before_symmetrization() {
        let c = build_layered(3, 2).unwrap();
        let target = StateVector::uniform(3);
        let params = SeededRng::new(8).uniform_vec(c.num_params(), 0.0, 2.0 * PI);
        let cfg = ShiftConfig {
            symmetrize: false,
            ..Default::default()
        };
        let (h, _) = circuit_hessian(&c, &params, &[], |s| s.fidelity(&target), &cfg).unwrap();
        assert!(max_asymmetry(&h) < 1e-10);
    }

    #[test]
    fn loss_gradient_chain_rule_cases() {
        let c = build_toy(3).unwrap();
        let theta = [0.3, -1.1, 2.0];
        let obj = Objective::state_loss(LossFunction::global(StateVector::zero(3)));
        let lg = loss_gradient(&c, &theta, &obj, &ShiftConfig::default()).unwrap();
        let fg = shift_gradient(toy_fidelity(3), &theta, &ShiftConfig::default());
        for (a, b) in lg.gradient.iter().zip(&fg) {
            assert_eq!(*a, -b);
        }
        assert_eq!(lg.eval_count, 2 * 3 + 1);

        // f = <Z_0> = +1 at theta = 0, label +1: l' = 0
        let c = build_reuploading(2, 1).unwrap();
        let obj = Objective::Single {
            loss: LossFunction::square(1.0, 0),
            data: vec![0.0, 0.0],
        };
        let lg = loss_gradient(&c, &vec![0.0; c.num_params()], &obj, &ShiftConfig::default()).unwrap();
        assert!(lg.gradient.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn loss_hessian_global_is_negated_output_hessian() {
        let c = build_layered(2, 2).unwrap();
        let target = StateVector::ghz(2);
        let params = SeededRng::new(3).uniform_vec(c.num_params(), 0.0, 2.0 * PI);
        let cfg = ShiftConfig::default();
        let (hf, _) = circuit_hessian(&c, &params, &[], |s| s.fidelity(&target), &cfg).unwrap();
        let gh = loss_hessian(&c, &params, &Objective::state_loss(LossFunction::global(target)), &cfg).unwrap();
        assert!(max_abs_diff_mat(&gh.hessian, &(-hf)) < 1e-15);
    }

    #[test]
    fn square_loss_hessian_at_perfect_prediction_is_gauss_newton() {
        // theta = 0, x = 0 gives <Z_0> = 1; with label 1, l' = 0.
        let c = build_reuploading(2, 2).unwrap();
        let params = vec![0.0; c.num_params()];
        let obj = Objective::Single {
            loss: LossFunction::square(1.0, 0),
            data: vec![0.0, 0.0],
        };
        let cfg = ShiftConfig::default();
        let gh = loss_hessian(&c, &params, &obj, &cfg).unwrap();
        let gf = circuit_gradient(&c, &params, &[0.0, 0.0], |s| s.expectation_z(0), &cfg).unwrap();
        let gn = DMatrix::from_fn(gf.len(), gf.len(), |i, j| 2.0 * gf[i] * gf[j]);
        assert!(max_abs_diff_mat(&gh.hessian, &gn) < 1e-14);
        let min_eig = gh.hessian.clone().symmetric_eigen().eigenvalues.min();
        assert!(min_eig > -1e-12);
    }

    #[test]
    fn fd_gradient_oracle_properties() {
        let linear = |p: &[f64]| 3.0 * p[0] - 2.0 * p[1] + 0.5;
        let g = fd_gradient_oracle(linear, &[0.7, -0.2], 1e-3);
        assert_abs_diff_eq!(g[0], 3.0, epsilon = 1e-10);
        assert_abs_diff_eq!(g[1], -2.0, epsilon = 1e-10);

        // second-order convergence: halving eps cuts the error ~4x
        let f = toy_fidelity(2);
        let theta = [0.9, -0.4];
        let exact = toy_analytic_gradient(&theta);
        let err = |eps: f64| max_abs_diff(&fd_gradient_oracle(&f, &theta, eps), &exact);
        let (e1, e2) = (err(1e-2), err(5e-3));
        let ratio = e1 / e2;
        assert!((3.6..4.4).contains(&ratio), "ratio {ratio}");
        let shift = shift_gradient(&f, &theta, &ShiftConfig::default());
        assert!(max_abs_diff(&shift, &fd_gradient_oracle(&f, &theta, 1e-5)) < 1e-9);
    }

    #[test]
    fn fd_hessian_oracle_properties() {
        let a = DMatrix::from_row_slice(3, 3, &[2.0, -0.5, 0.3, -0.5, 1.0, 0.7, 0.3, 0.7, -1.5]);
        let a_grad = a.clone();
        let grad = move |p: &[f64]| {
            let v = nalgebra::DVector::from_column_slice(p);
            (&a_grad * v * 2.0).as_slice().to_vec()
        };
        let h = fd_hessian_oracle(grad, &[0.1, 0.2, -0.3], 1e-3);
        assert!(max_abs_diff_mat(&h, &(a * 2.0)) < 1e-8);

        let f = toy_fidelity(3);
        let h = fd_hessian_oracle(|p| shift_gradient(&f, p, &ShiftConfig::default()), &[0.0; 3], DEFAULT_FD_EPS);
        assert!(max_abs_diff_mat(&h, &(DMatrix::identity(3, 3) * -0.5)) < 1e-8);
    }

    fn check_against_oracles(c: &crate::qsim::Circuit, obj: &Objective, points: usize, seed: u64) {
        let cfg = ShiftConfig::default();
        let mut rng = SeededRng::new(seed);
        let loss = |p: &[f64]| obj.evaluate(c, p).unwrap();
        let grad = |p: &[f64]| loss_gradient(c, p, obj, &cfg).unwrap().gradient;
        for _ in 0..points {
            let theta = rng.uniform_vec(c.num_params(), 0.0, 2.0 * PI);
            let gh = loss_hessian(c, &theta, obj, &cfg).unwrap();
            let g_fd = fd_gradient_oracle(loss, &theta, DEFAULT_FD_EPS);
            assert!(max_abs_diff(&gh.gradient, &g_fd) < 1e-6);
            let h_fd = fd_hessian_oracle(grad, &theta, DEFAULT_FD_EPS);
            assert!(max_abs_diff_mat(&gh.hessian, &h_fd) < 1e-5);
        }
    }

    #[test]
    fn reuploading_matches_oracles_on_data() {
        let c = build_reuploading(2, 2).unwrap();
        let obj = Objective::risk(generate_circle_dataset(5, 2).unwrap());
        check_against_oracles(&c, &obj, 3, 17);
    }

    #[test]
    fn local_loss_matches_oracles() {
        let c = build_layered(3, 2).unwrap();
        check_against_oracles(&c, &Objective::state_loss(LossFunction::LocalZ), 3, 18);
    }
}
