//! Training loops: plain gradient descent, a Hessian-derived learning rate
//! `min(1/lambda_max, eta_cap)`, and the quantum natural gradient.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::data::{fmt_f64, Dataset};
use crate::error::{contract, Error, Result};
use crate::losses::Objective;
use crate::models::{ffnn_hessian, ffnn_risk_and_gradient, init_circuit_params, Ffnn};
use crate::qsim::{inner_product, Circuit};
use crate::rng::SeededRng;
use crate::shiftcalc::{loss_gradient, loss_hessian, ShiftConfig};
use crate::spectral::{eigendecompose, Spectrum};

/// `lambda_max` at or below this gives the capped learning rate.
pub const LAMBDA_FLOOR: f64 = 1e-8;

/// Anything that can be trained by the optimizers here.
pub trait Trainable {
    fn num_params(&self) -> usize;

    fn init_params(&self, seed: u64) -> Vec<f64>;

    fn loss(&self, params: &[f64]) -> Result<f64>;

    fn loss_and_gradient(&self, params: &[f64]) -> Result<(f64, Vec<f64>)>;

    fn hessian(&self, params: &[f64]) -> Result<DMatrix<f64>>;

    /// Fubini-Study metric of the prepared state, where one exists.
    fn metric(&self, _params: &[f64]) -> Result<DMatrix<f64>> {
        Err(contract("this model has no state metric"))
    }
}

/// A circuit trained on an objective with shift-rule derivatives.
#[derive(Debug, Clone)]
pub struct CircuitModel {
    pub circuit: Circuit,
    pub objective: Objective,
    pub shift: ShiftConfig,
}

impl CircuitModel {
    pub fn new(circuit: Circuit, objective: Objective) -> Self {
        Self {
            circuit,
            objective,
            shift: ShiftConfig::default(),
        }
    }
}

impl Trainable for CircuitModel {
    fn num_params(&self) -> usize {
        self.circuit.num_params()
    }

    fn init_params(&self, seed: u64) -> Vec<f64> {
        init_circuit_params(self.num_params(), seed)
    }

    fn loss(&self, params: &[f64]) -> Result<f64> {
        self.objective.evaluate(&self.circuit, params)
    }

    fn loss_and_gradient(&self, params: &[f64]) -> Result<(f64, Vec<f64>)> {
        let g = loss_gradient(&self.circuit, params, &self.objective, &self.shift)?;
        Ok((g.value, g.gradient))
    }

    fn hessian(&self, params: &[f64]) -> Result<DMatrix<f64>> {
        Ok(loss_hessian(&self.circuit, params, &self.objective, &self.shift)?.hessian)
    }

    fn metric(&self, params: &[f64]) -> Result<DMatrix<f64>> {
        match &self.objective {
            Objective::Single { data, .. } => fubini_study_metric(&self.circuit, params, data),
            Objective::Risk { .. } => Err(contract(
                "the natural gradient needs a data-free state-preparation objective",
            )),
        }
    }
}

/// The baseline network trained on the empirical square-loss risk.
#[derive(Debug, Clone)]
pub struct FfnnModel {
    pub sizes: Vec<usize>,
    pub dataset: Dataset,
}

impl FfnnModel {
    fn net(&self, params: &[f64]) -> Result<Ffnn> {
        Ffnn::new(&self.sizes, params.to_vec())
    }
}

impl Trainable for FfnnModel {
    fn num_params(&self) -> usize {
        crate::models::ffnn_param_count(&self.sizes)
    }

    fn init_params(&self, seed: u64) -> Vec<f64> {
        Ffnn::init(&self.sizes, seed)
            .map(|n| n.params().to_vec())
            .unwrap_or_default()
    }

    fn loss(&self, params: &[f64]) -> Result<f64> {
        Ok(ffnn_risk_and_gradient(&self.net(params)?, &self.dataset).0)
    }

    fn loss_and_gradient(&self, params: &[f64]) -> Result<(f64, Vec<f64>)> {
        Ok(ffnn_risk_and_gradient(&self.net(params)?, &self.dataset))
    }

    fn hessian(&self, params: &[f64]) -> Result<DMatrix<f64>> {
        Ok(ffnn_hessian(&self.net(params)?, &self.dataset))
    }
}

/// `g_ij = Re[<d_i psi|d_j psi> - <d_i psi|psi><psi|d_j psi>]`.
pub fn fubini_study_metric(circuit: &Circuit, params: &[f64], data: &[f64]) -> Result<DMatrix<f64>> {
    let psi = circuit.run(params, data)?;
    let p = circuit.num_params();
    let derivs: Vec<Vec<Complex64>> = (0..p)
        .map(|k| circuit.derivative_unchecked(params, data, k))
        .collect();
    let overlaps: Vec<Complex64> = derivs
        .iter()
        .map(|d| inner_product(psi.amplitudes(), d))
        .collect();
    let mut g = DMatrix::zeros(p, p);
    for i in 0..p {
        for j in i..p {
            let v = (inner_product(&derivs[i], &derivs[j]) - overlaps[i].conj() * overlaps[j]).re;
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    Ok(g)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OptimizerKind {
    Gd { eta: f64 },
    HessianLr { recompute_every: usize, eta_cap: f64 },
    Qng { eta: f64, lambda_reg: f64 },
}

impl OptimizerKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Gd { .. } => "gd",
            Self::HessianLr { .. } => "hessian_lr",
            Self::Qng { .. } => "qng",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Self::Gd { eta } => eta > 0.0,
            Self::HessianLr {
                recompute_every,
                eta_cap,
            } => recompute_every >= 1 && eta_cap > 0.0,
            Self::Qng { eta, lambda_reg } => eta > 0.0 && lambda_reg > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(contract(format!("invalid optimizer settings {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimizerConfig {
    pub kind: OptimizerKind,
    pub epochs: usize,
    /// Initialization seed, used when no explicit start point is given.
    pub seed: u64,
}

/// `theta - eta * grad`.
pub fn gd_step(params: &[f64], grad: &[f64], eta: f64) -> Vec<f64> {
    params.iter().zip(grad).map(|(p, g)| p - eta * g).collect()
}

/// `min(1/lambda_max, eta_cap)`, or `eta_cap` when `lambda_max <= 1e-8`.
pub fn hessian_learning_rate(lambda_max: f64, eta_cap: f64) -> f64 {
    if lambda_max <= LAMBDA_FLOOR {
        eta_cap
    } else {
        (1.0 / lambda_max).min(eta_cap)
    }
}

/// Most recent `lambda_max` and the epoch it was computed at.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LambdaCache {
    pub lambda_max: Option<f64>,
    pub computed_at: Option<usize>,
}

/// One step with the Hessian learning rate. The Hessian is recomputed when
/// `epoch % recompute_every == 0` or the cache is empty. Returns the new
/// parameters and the learning rate used.
pub fn hessian_lr_step<M: Trainable + ?Sized>(
    model: &M,
    params: &[f64],
    grad: &[f64],
    cache: &mut LambdaCache,
    epoch: usize,
    recompute_every: usize,
    eta_cap: f64,
) -> Result<(Vec<f64>, f64)> {
    if cache.lambda_max.is_none() || epoch.is_multiple_of(recompute_every) {
        cache.lambda_max = Some(power_iteration_lambda_max(&model.hessian(params)?)?);
        cache.computed_at = Some(epoch);
    }
    let eta = hessian_learning_rate(cache.lambda_max.unwrap_or(0.0), eta_cap);
    Ok((gd_step(params, grad, eta), eta))
}

/// Solves `(g + lambda_reg I) delta = grad` by Cholesky.
pub fn natural_gradient_direction(metric: &DMatrix<f64>, grad: &[f64], lambda_reg: f64) -> Result<Vec<f64>> {
    let p = grad.len();
    let a = metric + DMatrix::<f64>::identity(p, p) * lambda_reg;
    let chol = a
        .cholesky()
        .ok_or_else(|| Error::Numerical("regularized metric is not positive definite".into()))?;
    Ok(chol.solve(&DVector::from_column_slice(grad)).as_slice().to_vec())
}

pub fn qng_step<M: Trainable + ?Sized>(
    model: &M,
    params: &[f64],
    grad: &[f64],
    eta: f64,
    lambda_reg: f64,
) -> Result<Vec<f64>> {
    let delta = natural_gradient_direction(&model.metric(params)?, grad, lambda_reg)?;
    Ok(gd_step(params, &delta, eta))
}

/// Largest signed eigenvalue by power iteration on `H + sigma I` with
/// `sigma = ||H||_inf`. Stops when the residual drops below
/// `1e-8 * max(1, sigma)`; after 10000 iterations falls back to the full
/// Jacobi decomposition.
pub fn power_iteration_lambda_max(h: &DMatrix<f64>) -> Result<f64> {
    let n = h.nrows();
    if n == 0 || h.ncols() != n {
        return Err(contract("power iteration needs a non-empty square matrix"));
    }
    let sigma = h.row_iter().map(|r| r.abs().sum()).fold(0.0, f64::max);
    if sigma == 0.0 {
        return Ok(0.0);
    }
    let shifted = h + DMatrix::<f64>::identity(n, n) * sigma;
    let tol = 1e-8 * sigma.max(1.0);

    let mut rng = SeededRng::new(0x5EED);
    let mut v = DVector::from_fn(n, |_, _| rng.uniform_range(0.5, 1.5));
    v /= v.norm();
    for _ in 0..10_000 {
        let w = &shifted * &v;
        let mu = v.dot(&w);
        let residual = (&w - &v * mu).norm();
        if residual < tol {
            return Ok(mu - sigma);
        }
        let norm = w.norm();
        if norm == 0.0 {
            break;
        }
        v = w / norm;
    }
    Ok(eigendecompose(h)?.lambda_max())
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    /// Loss before this epoch's step.
    pub loss: f64,
    /// Euclidean norm of the gradient at the same point.
    pub grad_norm: f64,
    /// `None` on the final record, where no step is taken.
    pub learning_rate: Option<f64>,
    pub spectrum: Option<Spectrum>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingTrace {
    pub optimizer: &'static str,
    pub initial_params: Vec<f64>,
    pub final_params: Vec<f64>,
    /// Epochs `0..=epochs`; the last one records the final point.
    pub records: Vec<EpochRecord>,
}

impl TrainingTrace {
    pub fn final_loss(&self) -> f64 {
        self.records.last().map_or(f64::NAN, |r| r.loss)
    }

    pub fn initial_loss(&self) -> f64 {
        self.records.first().map_or(f64::NAN, |r| r.loss)
    }

    /// First epoch whose recorded loss is at or below `threshold`.
    pub fn epochs_to_reach(&self, threshold: f64) -> Option<usize> {
        self.records.iter().find(|r| r.loss <= threshold).map(|r| r.epoch)
    }

    pub fn snapshots(&self) -> Vec<(usize, Spectrum)> {
        self.records
            .iter()
            .filter_map(|r| r.spectrum.clone().map(|s| (r.epoch, s)))
            .collect()
    }

    /// CSV `epoch,loss,grad_norm,learning_rate`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["epoch", "loss", "grad_norm", "learning_rate"])?;
        for r in &self.records {
            w.write_record([
                r.epoch.to_string(),
                fmt_f64(r.loss),
                fmt_f64(r.grad_norm),
                r.learning_rate.map(fmt_f64).unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainOptions {
    /// Start point; drawn from `OptimizerConfig::seed` when absent.
    pub initial: Option<Vec<f64>>,
    /// Hessian spectrum every `k` epochs, and always at the final epoch.
    pub snapshot_every: Option<usize>,
}

/// Full-batch training for `config.epochs` steps. `on_epoch` sees every
/// record as it is produced.
pub fn train<M, F>(
    model: &M,
    config: &OptimizerConfig,
    options: &TrainOptions,
    mut on_epoch: F,
) -> Result<TrainingTrace>
where
    M: Trainable + ?Sized,
    F: FnMut(&EpochRecord),
{
    config.kind.validate()?;
    let initial = match &options.initial {
        Some(p) if p.len() == model.num_params() => p.clone(),
        Some(p) => {
            return Err(contract(format!(
                "initial point has {} entries, model has {} parameters",
                p.len(),
                model.num_params()
            )))
        }
        None => model.init_params(config.seed),
    };
    if options.snapshot_every == Some(0) {
        return Err(contract("snapshot interval must be at least 1"));
    }

    let mut params = initial.clone();
    let mut cache = LambdaCache::default();
    let mut records = Vec::with_capacity(config.epochs + 1);
    for epoch in 0..=config.epochs {
        let (loss, grad) = model.loss_and_gradient(&params)?;
        let grad_norm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        let last = epoch == config.epochs;
        let spectrum = match options.snapshot_every {
            Some(k) if epoch % k == 0 || last => Some(eigendecompose(&model.hessian(&params)?)?),
            _ => None,
        };

        let learning_rate = if last {
            None
        } else {
            let (next, eta) = match config.kind {
                OptimizerKind::Gd { eta } => (gd_step(&params, &grad, eta), eta),
                OptimizerKind::HessianLr {
                    recompute_every,
                    eta_cap,
                } => hessian_lr_step(model, &params, &grad, &mut cache, epoch, recompute_every, eta_cap)?,
                OptimizerKind::Qng { eta, lambda_reg } => {
                    (qng_step(model, &params, &grad, eta, lambda_reg)?, eta)
                }
            };
            params = next;
            Some(eta)
        };

        let record = EpochRecord {
            epoch,
            loss,
            grad_norm,
            learning_rate,
            spectrum,
        };
        on_epoch(&record);
        records.push(record);
    }
    Ok(TrainingTrace {
        optimizer: config.kind.name(),
        initial_params: initial,
        final_params: params,
        records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::losses::LossFunction;
    use crate::models::{build_layered, build_toy};
    use crate::qsim::StateVector;
    use approx::assert_abs_diff_eq;

    /// `l = sum_i lambda_i theta_i^2 / 2`.
    struct Quadratic(Vec<f64>);

    impl Trainable for Quadratic {
        fn num_params(&self) -> usize {
            self.0.len()
        }
        fn init_params(&self, _seed: u64) -> Vec<f64> {
            vec![1.0; self.0.len()]
        }
        fn loss(&self, p: &[f64]) -> Result<f64> {
            Ok(p.iter().zip(&self.0).map(|(t, l)| 0.5 * l * t * t).sum())
        }
        fn loss_and_gradient(&self, p: &[f64]) -> Result<(f64, Vec<f64>)> {
            Ok((self.loss(p)?, p.iter().zip(&self.0).map(|(t, l)| l * t).collect()))
        }
        fn hessian(&self, _p: &[f64]) -> Result<DMatrix<f64>> {
            Ok(DMatrix::from_diagonal(&DVector::from_vec(self.0.clone())))
        }
    }

    fn toy_model(n: usize) -> CircuitModel {
        CircuitModel::new(
            build_toy(n).unwrap(),
            Objective::state_loss(LossFunction::global(StateVector::zero(n))),
        )
    }

    #[test]
    fn gd_step_examples() {
        assert_eq!(gd_step(&[0.3, -0.2], &[0.0, 0.0], 0.7), vec![0.3, -0.2]);
        let lambda = 2.5;
        let q = Quadratic(vec![lambda]);
        let (_, g) = q.loss_and_gradient(&[0.8]).unwrap();
        assert_abs_diff_eq!(gd_step(&[0.8], &g, 1.0 / lambda)[0], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn gd_monotone_on_toy_model() {
        let m = toy_model(2);
        for eta in [0.1, 0.01] {
            let cfg = OptimizerConfig {
                kind: OptimizerKind::Gd { eta },
                epochs: 50,
                seed: 0,
            };
            let opts = TrainOptions {
                initial: Some(vec![0.3, 0.3]),
                ..Default::default()
            };
            let trace = train(&m, &cfg, &opts, |_| {}).unwrap();
            for w in trace.records.windows(2) {
                assert!(w[1].loss < w[0].loss);
            }
        }
    }

    #[test]
    fn hessian_rate_rules() {
        assert_eq!(hessian_learning_rate(0.5, 10.0), 2.0);
        assert_eq!(hessian_learning_rate(0.5, 1.5), 1.5);
        assert_eq!(hessian_learning_rate(1e-12, 2.0), 2.0);
        assert_eq!(hessian_learning_rate(-0.3, 2.0), 2.0);
    }

    #[test]
    fn hessian_lr_removes_stiff_error_in_one_step() {
        let q = Quadratic(vec![0.1, 1.0]);
        let theta = [1.0, 1.0];
        let (_, g) = q.loss_and_gradient(&theta).unwrap();
        let mut cache = LambdaCache::default();
        let (next, eta) = hessian_lr_step(&q, &theta, &g, &mut cache, 0, 1, 2.0).unwrap();
        assert_abs_diff_eq!(eta, 1.0, epsilon = 1e-8);
        assert_abs_diff_eq!(next[1], 0.0, epsilon = 1e-8);
        assert_abs_diff_eq!(next[0], 0.9, epsilon = 1e-8);
        assert_eq!(next, gd_step(&theta, &g, eta));
    }

    #[test]
    fn hessian_lr_cache_reuse() {
        let q = Quadratic(vec![0.5]);
        let mut cache = LambdaCache::default();
        let _ = hessian_lr_step(&q, &[1.0], &[0.5], &mut cache, 1, 3, 5.0).unwrap();
        assert_eq!(cache.computed_at, Some(1));
        let _ = hessian_lr_step(&q, &[1.0], &[0.5], &mut cache, 2, 3, 5.0).unwrap();
        assert_eq!(cache.computed_at, Some(1));
        let _ = hessian_lr_step(&q, &[1.0], &[0.5], &mut cache, 3, 3, 5.0).unwrap();
        assert_eq!(cache.computed_at, Some(3));
    }

    #[test]
    fn plateau_gets_capped_rate() {
        let q = Quadratic(vec![0.0, 0.0]);
        let mut cache = LambdaCache::default();
        let (_, eta) = hessian_lr_step(&q, &[1.0, 1.0], &[0.0, 0.0], &mut cache, 0, 1, 2.0).unwrap();
        assert_eq!(eta, 2.0);
    }

    #[test]
    fn power_iteration_examples() {
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![0.1, 0.9]));
        assert_abs_diff_eq!(power_iteration_lambda_max(&d).unwrap(), 0.9, epsilon = 1e-8);
        let half = DMatrix::<f64>::identity(5, 5) * 0.5;
        assert_abs_diff_eq!(power_iteration_lambda_max(&half).unwrap(), 0.5, epsilon = 1e-8);
        let neg = DMatrix::from_diagonal(&DVector::from_vec(vec![-3.0, -0.2]));
        assert_abs_diff_eq!(power_iteration_lambda_max(&neg).unwrap(), -0.2, epsilon = 1e-8);

        let mut rng = SeededRng::new(77);
        let m = DMatrix::from_fn(48, 48, |_, _| rng.uniform_range(-1.0, 1.0));
        let h = (&m + m.transpose()) * 0.5;
        let jac = eigendecompose(&h).unwrap().lambda_max();
        assert!((power_iteration_lambda_max(&h).unwrap() - jac).abs() < 1e-6);
    }

    #[test]
    fn isotropic_metric_reduces_to_scaled_gd() {
        let g = DMatrix::<f64>::identity(3, 3);
        let grad = [0.2, -0.4, 1.0];
        let reg = 0.5;
        let d = natural_gradient_direction(&g, &grad, reg).unwrap();
        for (a, b) in d.iter().zip(&grad) {
            assert_abs_diff_eq!(*a, b / (1.0 + reg), epsilon = 1e-15);
        }
    }

    #[test]
    fn toy_metric_is_quarter_identity() {
        for theta in [0.0, 0.7, 2.0, -1.4] {
            let g = fubini_study_metric(&build_toy(1).unwrap(), &[theta], &[]).unwrap();
            assert_abs_diff_eq!(g[(0, 0)], 0.25, epsilon = 1e-14);
        }
        let g = fubini_study_metric(&build_toy(3).unwrap(), &[0.0; 3], &[]).unwrap();
        assert!((g - DMatrix::<f64>::identity(3, 3) * 0.25).abs().max() < 1e-14);
    }

    #[test]
    fn metric_symmetric_psd_on_random_circuits() {
        let c = build_layered(3, 2).unwrap();
        for seed in 0..3 {
            let params = init_circuit_params(c.num_params(), seed);
            let g = fubini_study_metric(&c, &params, &[]).unwrap();
            assert!((&g - g.transpose()).abs().max() < 1e-10);
            assert!(eigendecompose(&g).unwrap().lambda_min() > -1e-10);
        }
    }

    #[test]
    fn metric_rejects_data_objectives() {
        let c = crate::models::build_reuploading(2, 1).unwrap();
        let d = crate::data::generate_circle_dataset(4, 1).unwrap();
        let m = CircuitModel::new(c, Objective::risk(d));
        assert!(m.metric(&[0.0; 6]).is_err());
    }

    #[test]
    fn zero_epochs_records_initial_loss_only() {
        let m = toy_model(2);
        let cfg = OptimizerConfig {
            kind: OptimizerKind::Gd { eta: 0.1 },
            epochs: 0,
            seed: 4,
        };
        let trace = train(&m, &cfg, &TrainOptions::default(), |_| {}).unwrap();
        assert_eq!(trace.records.len(), 1);
        assert_eq!(trace.records[0].learning_rate, None);
        assert_eq!(trace.final_params, trace.initial_params);
        assert_eq!(trace.initial_params, init_circuit_params(2, 4));
    }

    #[test]
    fn training_is_reproducible() {
        let m = CircuitModel::new(
            build_layered(2, 2).unwrap(),
            Objective::state_loss(LossFunction::global(StateVector::uniform(2))),
        );
        for kind in [
            OptimizerKind::Gd { eta: 0.2 },
            OptimizerKind::HessianLr { recompute_every: 2, eta_cap: 2.0 },
            OptimizerKind::Qng { eta: 0.1, lambda_reg: 1e-6 },
        ] {
            let cfg = OptimizerConfig { kind, epochs: 6, seed: 12 };
            let opts = TrainOptions { initial: None, snapshot_every: Some(3) };
            let a = train(&m, &cfg, &opts, |_| {}).unwrap();
            let b = train(&m, &cfg, &opts, |_| {}).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.snapshots().iter().map(|s| s.0).collect::<Vec<_>>(), vec![0, 3, 6]);
        }
    }

    #[test]
    fn gd_converges_on_small_state_prep() {
        let m = CircuitModel::new(
            build_layered(2, 1).unwrap(),
            Objective::state_loss(LossFunction::global(StateVector::zero(2))),
        );
        let cfg = OptimizerConfig {
            kind: OptimizerKind::Gd { eta: 0.5 },
            epochs: 300,
            seed: 3,
        };
        let trace = train(&m, &cfg, &TrainOptions::default(), |_| {}).unwrap();
        assert!(trace.final_loss() < 1e-6, "{}", trace.final_loss());
    }

    #[test]
    fn qng_differs_from_gd() {
        let m = CircuitModel::new(
            build_layered(3, 2).unwrap(),
            Objective::state_loss(LossFunction::global(StateVector::uniform(3))),
        );
        let run = |kind| {
            let cfg = OptimizerConfig { kind, epochs: 2, seed: 5 };
            train(&m, &cfg, &TrainOptions::default(), |_| {}).unwrap()
        };
        let gd = run(OptimizerKind::Gd { eta: 0.1 });
        let qng = run(OptimizerKind::Qng { eta: 0.1, lambda_reg: 1e-6 });
        assert_eq!(gd.records[0].loss, qng.records[0].loss);
        assert_ne!(gd.records[1].loss, qng.records[1].loss);
    }
}
