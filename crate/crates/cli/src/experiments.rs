//! The subcommands.

use std::path::PathBuf;

use nalgebra::DMatrix;
use qlandscape::data::{
    accuracy, fmt_f64, generate_circle_dataset, prediction_map, train_test_split, Dataset, PredictionGrid,
};
use qlandscape::losses::{LossFunction, Objective};
use qlandscape::models::{build_layered, build_reuploading, build_toy, Ffnn};
use qlandscape::optim::{
    train, CircuitModel, FfnnModel, OptimizerConfig, OptimizerKind, Trainable, TrainOptions, TrainingTrace,
};
use qlandscape::qsim::{Circuit, StateVector};
use qlandscape::shiftcalc::{loss_hessian, ShiftConfig};
use qlandscape::spectral::{
    classify_stationary, eigendecompose, perturbation_scan, spectrum_series, write_perturbation_csv,
    write_series_csv, write_spectrum_csv, PerturbationPoint, SeriesRow, Spectrum, StationaryClass,
};

use crate::config::{
    Experiment, ExperimentConfig, HessianScope, LossKind, ModelKind, OptimizerName, TargetKind,
};
use crate::output::OutputDir;
use crate::CliError;

/// Step along the flattest eigenvector used to test that it is flat.
pub const FLAT_PROBE_EPSILON: f64 = 0.1;

fn build_circuit(config: &ExperimentConfig) -> Result<Circuit, CliError> {
    let m = &config.model;
    Ok(match m.kind {
        ModelKind::Toy => build_toy(m.qubits)?,
        ModelKind::Layered => build_layered(m.qubits, m.layers)?,
        ModelKind::Reuploading => build_reuploading(m.qubits, m.layers)?,
        ModelKind::Ffnn => return Err(CliError::Config("the FFNN is not a circuit".into())),
    })
}

fn target_state(config: &ExperimentConfig) -> StateVector {
    let n = config.model.qubits;
    match config.loss.target {
        TargetKind::Zero => StateVector::zero(n),
        TargetKind::Uniform => StateVector::uniform(n),
        TargetKind::Ghz => StateVector::ghz(n),
    }
}

fn state_objective(config: &ExperimentConfig) -> Result<Objective, CliError> {
    match config.loss.kind {
        LossKind::Global => Ok(Objective::state_loss(LossFunction::global(target_state(config)))),
        LossKind::Local => Ok(Objective::state_loss(LossFunction::LocalZ)),
        LossKind::Square => Err(CliError::Config(format!(
            "`{}` needs loss.kind = global or local",
            config.experiment
        ))),
    }
}

fn circuit_model(config: &ExperimentConfig) -> Result<CircuitModel, CliError> {
    Ok(CircuitModel::new(build_circuit(config)?, state_objective(config)?))
}

fn optimizer_kind(config: &ExperimentConfig) -> OptimizerKind {
    let o = &config.optimizer;
    match o.kind {
        OptimizerName::Gd => OptimizerKind::Gd { eta: o.eta },
        OptimizerName::HessianLr => OptimizerKind::HessianLr {
            recompute_every: o.recompute_every,
            eta_cap: o.eta_cap,
        },
        OptimizerName::Qng => OptimizerKind::Qng {
            eta: o.eta,
            lambda_reg: o.lambda_reg,
        },
    }
}

fn optimizer_config(config: &ExperimentConfig, kind: OptimizerKind, seed: u64) -> OptimizerConfig {
    OptimizerConfig {
        kind,
        epochs: config.optimizer.epochs,
        seed,
    }
}

fn expect(config: &ExperimentConfig, experiment: Experiment) -> Result<(), CliError> {
    if config.experiment == experiment {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "config is for `{}`, not `{experiment}`",
            config.experiment
        )))
    }
}

fn write_spectrum(out: &mut OutputDir, name: &str, spectrum: &Spectrum) -> Result<PathBuf, CliError> {
    out.write(name, |b| Ok(write_spectrum_csv(spectrum, b)?))
}

fn write_trace(out: &mut OutputDir, name: &str, trace: &TrainingTrace) -> Result<PathBuf, CliError> {
    out.write(name, |b| Ok(trace.write_csv(b)?))
}

fn write_params(out: &mut OutputDir, name: &str, params: &[f64]) -> Result<PathBuf, CliError> {
    out.write(name, |b| {
        let mut w = csv::Writer::from_writer(b);
        w.write_record(["index", "value"])?;
        for (i, p) in params.iter().enumerate() {
            w.write_record([i.to_string(), fmt_f64(*p)])?;
        }
        w.flush()?;
        Ok(())
    })
}

/// Reads an `index,value` parameter file; `#` lines are comments.
pub fn read_params(path: &std::path::Path) -> Result<Vec<f64>, CliError> {
    let mut r = csv::ReaderBuilder::new().comment(Some(b'#')).from_path(path)?;
    let mut rows: Vec<(usize, f64)> = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let parse_err = || CliError::Config(format!("malformed row in {}", path.display()));
        let i = rec.get(0).and_then(|s| s.trim().parse().ok()).ok_or_else(parse_err)?;
        let v = rec.get(1).and_then(|s| s.trim().parse().ok()).ok_or_else(parse_err)?;
        rows.push((i, v));
    }
    if rows.iter().enumerate().any(|(k, (i, _))| k != *i) {
        return Err(CliError::Config(format!(
            "{} must list indices 0, 1, 2, ... in order",
            path.display()
        )));
    }
    Ok(rows.into_iter().map(|(_, v)| v).collect())
}

fn perturbation_grid(config: &ExperimentConfig) -> Vec<f64> {
    let steps = config.perturb.steps as i64;
    let h = config.perturb.max_epsilon / config.perturb.steps as f64;
    (-steps..=steps).map(|i| i as f64 * h).collect()
}

#[derive(Debug, Clone)]
pub struct MarkedPoint {
    pub theta: [f64; 2],
    pub loss: f64,
    pub spectrum: Spectrum,
    pub class: StationaryClass,
}

#[derive(Debug, Clone)]
pub struct TrainedPoint {
    pub trace: TrainingTrace,
    pub spectrum: Spectrum,
    pub class: StationaryClass,
    /// Eigenvalue closest to zero.
    pub flat_eigenvalue: f64,
    /// `max |l(theta +- 0.1 v) - l(theta)|` along its eigenvector `v`.
    pub flat_loss_change: f64,
}

#[derive(Debug, Clone)]
pub struct LandscapeReport {
    /// Lowest grid cell as `(theta1, theta2, loss)`.
    pub grid_min: (f64, f64, f64),
    pub marked: Vec<MarkedPoint>,
    pub trained: Option<TrainedPoint>,
    pub files: Vec<PathBuf>,
}

/// Loss over two free parameters, Hessians and classification at marked
/// points, and optionally a training run classified where it ends.
pub fn cmd_landscape(config: &ExperimentConfig) -> Result<LandscapeReport, CliError> {
    expect(config, Experiment::Landscape)?;
    let model = circuit_model(config)?;
    let p = model.num_params();
    let [a, b] = config.grid.free;
    if a >= p || b >= p {
        return Err(CliError::Config(format!(
            "grid.free = [{a}, {b}] but the circuit has {p} parameters"
        )));
    }
    let point = |t1: f64, t2: f64| {
        let mut theta = vec![config.grid.fixed; p];
        theta[a] = t1;
        theta[b] = t2;
        theta
    };
    let mut out = OutputDir::create(config)?;

    let g = &config.grid;
    let step = (g.max - g.min) / (g.resolution - 1) as f64;
    let axis: Vec<f64> = (0..g.resolution)
        .map(|i| if i + 1 == g.resolution { g.max } else { g.min + i as f64 * step })
        .collect();
    let mut cells = Vec::with_capacity(axis.len() * axis.len());
    for &t1 in &axis {
        for &t2 in &axis {
            cells.push((t1, t2, model.loss(&point(t1, t2))?));
        }
    }
    let grid_min = cells
        .iter()
        .copied()
        .fold((f64::NAN, f64::NAN, f64::INFINITY), |m, c| if c.2 < m.2 { c } else { m });
    out.write("landscape.csv", |buf| {
        let mut w = csv::Writer::from_writer(buf);
        w.write_record(["theta1", "theta2", "loss"])?;
        for (t1, t2, l) in &cells {
            w.write_record([fmt_f64(*t1), fmt_f64(*t2), fmt_f64(*l)])?;
        }
        w.flush()?;
        Ok(())
    })?;

    let cfg = ShiftConfig::default();
    let mut marked = Vec::new();
    for (k, m) in g.marked.iter().enumerate() {
        let theta = point(m[0], m[1]);
        let gh = loss_hessian(&model.circuit, &theta, &model.objective, &cfg)?;
        let (grad, hess) = match g.hessian {
            HessianScope::All => (gh.gradient, gh.hessian),
            HessianScope::Free => (
                vec![gh.gradient[a], gh.gradient[b]],
                DMatrix::from_fn(2, 2, |i, j| gh.hessian[(config.grid.free[i], config.grid.free[j])]),
            ),
        };
        let spectrum = eigendecompose(&hess)?;
        let class = classify_stationary(&grad, &spectrum, spectrum.default_tau());
        write_spectrum(&mut out, &format!("spectrum_point{k}.csv"), &spectrum)?;
        marked.push(MarkedPoint {
            theta: *m,
            loss: gh.value,
            spectrum,
            class,
        });
    }
    out.write("marked_points.csv", |buf| {
        let mut w = csv::Writer::from_writer(buf);
        w.write_record([
            "point", "theta1", "theta2", "loss", "label", "grad_norm", "negative", "zero", "positive", "tau",
        ])?;
        for (k, m) in marked.iter().enumerate() {
            w.write_record([
                k.to_string(),
                fmt_f64(m.theta[0]),
                fmt_f64(m.theta[1]),
                fmt_f64(m.loss),
                m.class.label.to_string(),
                fmt_f64(m.class.grad_norm),
                m.class.negative.to_string(),
                m.class.zero.to_string(),
                m.class.positive.to_string(),
                fmt_f64(m.class.tau),
            ])?;
        }
        w.flush()?;
        Ok(())
    })?;

    let trained = if g.train {
        let opt = optimizer_config(config, optimizer_kind(config), config.init_seed());
        let trace = train(&model, &opt, &TrainOptions::default(), |_| {})?;
        let theta = trace.final_params.clone();
        let gh = loss_hessian(&model.circuit, &theta, &model.objective, &cfg)?;
        let spectrum = eigendecompose(&gh.hessian)?;
        let class = classify_stationary(&gh.gradient, &spectrum, spectrum.default_tau());
        let flat = spectrum.flattest();
        let dir = spectrum.eigenvector(flat);
        let loss = |t: &[f64]| model.loss(t).unwrap_or(f64::NAN);
        let probe = perturbation_scan(
            loss,
            &theta,
            &dir,
            &[-FLAT_PROBE_EPSILON, FLAT_PROBE_EPSILON],
            None,
        )?;
        let flat_loss_change = probe
            .iter()
            .map(|q| (q.loss - gh.value).abs())
            .fold(0.0, f64::max);
        let scan = perturbation_scan(
            loss,
            &theta,
            &dir,
            &perturbation_grid(config),
            Some(spectrum.eigenvalues[flat]),
        )?;
        write_trace(&mut out, "trace.csv", &trace)?;
        write_params(&mut out, "trained_params.csv", &theta)?;
        write_spectrum(&mut out, "spectrum_trained.csv", &spectrum)?;
        out.write("perturb_trained_flat.csv", |b| Ok(write_perturbation_csv(&scan, b)?))?;
        out.write_summary(
            "trained.csv",
            &[
                ("loss".into(), fmt_f64(gh.value)),
                ("label".into(), class.label.to_string()),
                ("grad_norm".into(), fmt_f64(class.grad_norm)),
                ("tau".into(), fmt_f64(class.tau)),
                ("flat_eigenvalue".into(), fmt_f64(spectrum.eigenvalues[flat])),
                ("flat_loss_change".into(), fmt_f64(flat_loss_change)),
            ],
        )?;
        Some(TrainedPoint {
            trace,
            flat_eigenvalue: spectrum.eigenvalues[flat],
            spectrum,
            class,
            flat_loss_change,
        })
    } else {
        None
    };

    Ok(LandscapeReport {
        grid_min,
        marked,
        trained,
        files: out.written().to_vec(),
    })
}

#[derive(Debug, Clone)]
pub struct EvolutionReport {
    pub trace: TrainingTrace,
    pub series: Vec<SeriesRow>,
    pub snapshots: Vec<(usize, Spectrum)>,
    pub files: Vec<PathBuf>,
}

/// Trains a state-preparation circuit with Hessian snapshots every
/// `spectrum.every` epochs and at the end.
pub fn cmd_spectrum_evolution(config: &ExperimentConfig) -> Result<EvolutionReport, CliError> {
    expect(config, Experiment::SpectrumEvolution)?;
    let model = circuit_model(config)?;
    let opts = TrainOptions {
        initial: None,
        snapshot_every: Some(config.spectrum.every),
    };
    let opt = optimizer_config(config, optimizer_kind(config), config.init_seed());
    let trace = train(&model, &opt, &opts, |_| {})?;
    let snapshots = trace.snapshots();
    let series = spectrum_series(&snapshots)?;
    let mut out = OutputDir::create(config)?;
    write_trace(&mut out, "trace.csv", &trace)?;
    out.write("spectrum_series.csv", |b| Ok(write_series_csv(&series, b)?))?;
    write_params(&mut out, "final_params.csv", &trace.final_params)?;
    Ok(EvolutionReport {
        trace,
        series,
        snapshots,
        files: out.written().to_vec(),
    })
}

#[derive(Debug, Clone)]
pub struct PerturbCurve {
    /// `top`, `middle` or `flat`.
    pub name: &'static str,
    pub rank: usize,
    pub eigenvalue: f64,
    pub points: Vec<PerturbationPoint>,
}

#[derive(Debug, Clone)]
pub struct PerturbReport {
    pub params: Vec<f64>,
    pub loss: f64,
    pub spectrum: Spectrum,
    pub curves: Vec<PerturbCurve>,
    pub files: Vec<PathBuf>,
}

impl PerturbReport {
    pub fn curve(&self, name: &str) -> Option<&PerturbCurve> {
        self.curves.iter().find(|c| c.name == name)
    }
}

/// Loss along the top, a middle and the flattest Hessian eigenvector at a
/// converged point. The middle eigenpair is the median of the eigenvalues
/// above `tau`.
pub fn cmd_perturb(config: &ExperimentConfig) -> Result<PerturbReport, CliError> {
    expect(config, Experiment::Perturb)?;
    let model = circuit_model(config)?;
    let params = match &config.perturb.params {
        Some(path) => {
            let p = read_params(path)?;
            if p.len() != model.num_params() {
                return Err(CliError::Config(format!(
                    "{} holds {} parameters, the circuit has {}",
                    path.display(),
                    p.len(),
                    model.num_params()
                )));
            }
            p
        }
        None => {
            let opt = optimizer_config(config, optimizer_kind(config), config.init_seed());
            train(&model, &opt, &TrainOptions::default(), |_| {})?.final_params
        }
    };
    let loss_at = model.loss(&params)?;
    let spectrum = eigendecompose(&model.hessian(&params)?)?;
    let tau = spectrum.default_tau();
    let n = spectrum.len();
    let positive: Vec<usize> = (0..n).filter(|&i| spectrum.eigenvalues[i] > tau).collect();
    let middle = if positive.is_empty() { n / 2 } else { positive[positive.len() / 2] };
    let picks = [("top", n - 1), ("middle", middle), ("flat", spectrum.flattest())];

    let grid = perturbation_grid(config);
    let loss = |t: &[f64]| model.loss(t).unwrap_or(f64::NAN);
    let mut out = OutputDir::create(config)?;
    let mut curves = Vec::new();
    for (name, rank) in picks {
        let eigenvalue = spectrum.eigenvalues[rank];
        let points = perturbation_scan(loss, &params, &spectrum.eigenvector(rank), &grid, Some(eigenvalue))?;
        out.write(&format!("perturb_{name}.csv"), |b| Ok(write_perturbation_csv(&points, b)?))?;
        curves.push(PerturbCurve {
            name,
            rank,
            eigenvalue,
            points,
        });
    }
    out.write("perturb_eigenpairs.csv", |buf| {
        let mut w = csv::Writer::from_writer(buf);
        w.write_record(["direction", "rank", "eigenvalue"])?;
        for c in &curves {
            w.write_record([c.name.to_string(), c.rank.to_string(), fmt_f64(c.eigenvalue)])?;
        }
        w.flush()?;
        Ok(())
    })?;
    write_spectrum(&mut out, "spectrum.csv", &spectrum)?;
    Ok(PerturbReport {
        params,
        loss: loss_at,
        spectrum,
        curves,
        files: out.written().to_vec(),
    })
}

#[derive(Debug, Clone)]
pub struct ClassifierReport {
    pub num_params: usize,
    pub train_accuracy: f64,
    pub test_accuracy: f64,
    pub init_spectrum: Spectrum,
    pub final_spectrum: Spectrum,
    pub trace: TrainingTrace,
    pub prediction_init: PredictionGrid,
    pub prediction_final: PredictionGrid,
    /// FFNN runs: spectral radius of the reference QNN at initialization.
    pub reference_init_radius: Option<f64>,
    pub files: Vec<PathBuf>,
}

impl ClassifierReport {
    /// Eigenvalue counts `(negative, zero, positive)` under the default tolerance.
    pub fn init_counts(&self) -> (usize, usize, usize) {
        self.init_spectrum.sign_counts(self.init_spectrum.default_tau())
    }

    pub fn final_counts(&self) -> (usize, usize, usize) {
        self.final_spectrum.sign_counts(self.final_spectrum.default_tau())
    }
}

/// The generated (or loaded) dataset and its train/test split.
pub fn load_data(config: &ExperimentConfig) -> Result<(Dataset, Dataset, Dataset), CliError> {
    let full = match &config.dataset.path {
        Some(path) => Dataset::read_csv_file(path, config.data_seed())?,
        None => generate_circle_dataset(config.dataset.n, config.data_seed())?,
    };
    let (train_set, test_set) = train_test_split(&full, config.dataset.train_fraction, config.split_seed())?;
    Ok((full, train_set, test_set))
}

fn run_classifier<M, P>(
    config: &ExperimentConfig,
    model: &M,
    predict: P,
    train_set: &Dataset,
    test_set: &Dataset,
    reference_init_radius: Option<f64>,
) -> Result<ClassifierReport, CliError>
where
    M: Trainable,
    P: Fn(&[f64], [f64; 2]) -> f64,
{
    let init = model.init_params(config.init_seed());
    let init_spectrum = eigendecompose(&model.hessian(&init)?)?;
    let res = config.grid.prediction_resolution;
    let prediction_init = prediction_map(|x1, x2| predict(&init, [x1, x2]), res)?;
    let opts = TrainOptions {
        initial: Some(init),
        snapshot_every: None,
    };
    let trace = train(model, &optimizer_config(config, optimizer_kind(config), config.init_seed()), &opts, |_| {})?;
    let fin = trace.final_params.clone();
    let final_spectrum = eigendecompose(&model.hessian(&fin)?)?;
    let prediction_final = prediction_map(|x1, x2| predict(&fin, [x1, x2]), res)?;
    let train_accuracy = accuracy(train_set, |x| predict(&fin, x));
    let test_accuracy = accuracy(test_set, |x| predict(&fin, x));

    let mut out = OutputDir::create(config)?;
    out.write("dataset_train.csv", |b| Ok(train_set.write_csv(b)?))?;
    out.write("dataset_test.csv", |b| Ok(test_set.write_csv(b)?))?;
    out.write("prediction_init.csv", |b| Ok(prediction_init.write_csv(b)?))?;
    out.write("prediction_final.csv", |b| Ok(prediction_final.write_csv(b)?))?;
    write_spectrum(&mut out, "spectrum_init.csv", &init_spectrum)?;
    write_spectrum(&mut out, "spectrum_final.csv", &final_spectrum)?;
    write_trace(&mut out, "trace.csv", &trace)?;
    write_params(&mut out, "final_params.csv", &fin)?;

    let report = ClassifierReport {
        num_params: model.num_params(),
        train_accuracy,
        test_accuracy,
        init_spectrum,
        final_spectrum,
        trace,
        prediction_init,
        prediction_final,
        reference_init_radius,
        files: Vec::new(),
    };
    let (ni, zi, pi) = report.init_counts();
    let (nf, zf, pf) = report.final_counts();
    let mut rows = vec![
        ("num_params".to_string(), report.num_params.to_string()),
        ("train_points".into(), train_set.len().to_string()),
        ("test_points".into(), test_set.len().to_string()),
        ("train_accuracy".into(), fmt_f64(train_accuracy)),
        ("test_accuracy".into(), fmt_f64(test_accuracy)),
        ("initial_loss".into(), fmt_f64(report.trace.initial_loss())),
        ("final_loss".into(), fmt_f64(report.trace.final_loss())),
        ("init_lambda_min".into(), fmt_f64(report.init_spectrum.lambda_min())),
        ("init_lambda_max".into(), fmt_f64(report.init_spectrum.lambda_max())),
        ("init_tau".into(), fmt_f64(report.init_spectrum.default_tau())),
        ("init_negative".into(), ni.to_string()),
        ("init_zero".into(), zi.to_string()),
        ("init_positive".into(), pi.to_string()),
        ("final_lambda_min".into(), fmt_f64(report.final_spectrum.lambda_min())),
        ("final_lambda_max".into(), fmt_f64(report.final_spectrum.lambda_max())),
        ("final_tau".into(), fmt_f64(report.final_spectrum.default_tau())),
        ("final_negative".into(), nf.to_string()),
        ("final_zero".into(), zf.to_string()),
        ("final_positive".into(), pf.to_string()),
    ];
    if let Some(r) = reference_init_radius {
        rows.push(("qnn_init_spectral_radius".into(), fmt_f64(r)));
        rows.push((
            "init_spectral_radius_ratio_qnn_over_ffnn".into(),
            fmt_f64(r / report.init_spectrum.spectral_radius()),
        ));
    }
    out.write_summary("summary.csv", &rows)?;
    Ok(ClassifierReport {
        files: out.written().to_vec(),
        ..report
    })
}

/// Data-reuploading classifier trained on the empirical square-loss risk.
pub fn cmd_train_qnn(config: &ExperimentConfig) -> Result<ClassifierReport, CliError> {
    expect(config, Experiment::TrainQnn)?;
    if config.model.kind != ModelKind::Reuploading {
        return Err(CliError::Config("train-qnn needs model.kind = reuploading".into()));
    }
    let (_, train_set, test_set) = load_data(config)?;
    let circuit = build_circuit(config)?;
    let model = CircuitModel::new(circuit.clone(), Objective::risk(train_set.clone()));
    let predict = |p: &[f64], x: [f64; 2]| {
        circuit
            .run(p, &x)
            .and_then(|s| s.expectation_z(0))
            .unwrap_or(f64::NAN)
    };
    run_classifier(config, &model, predict, &train_set, &test_set, None)
}

/// The FFNN baseline on the same data and loss, plus the initial spectral
/// radius of a reuploading circuit with `model.qubits` and `model.layers`
/// for comparison.
pub fn cmd_train_ffnn(config: &ExperimentConfig) -> Result<ClassifierReport, CliError> {
    expect(config, Experiment::TrainFfnn)?;
    if config.model.kind != ModelKind::Ffnn {
        return Err(CliError::Config("train-ffnn needs model.kind = ffnn".into()));
    }
    let (_, train_set, test_set) = load_data(config)?;
    let mut sizes = vec![2];
    sizes.extend(&config.model.hidden);
    sizes.push(1);
    let model = FfnnModel {
        sizes: sizes.clone(),
        dataset: train_set.clone(),
    };

    let reference = CircuitModel::new(
        build_reuploading(config.model.qubits, config.model.layers)?,
        Objective::risk(train_set.clone()),
    );
    let reference_init = reference.init_params(config.init_seed());
    let reference_radius = eigendecompose(&reference.hessian(&reference_init)?)?.spectral_radius();

    let predict = |p: &[f64], x: [f64; 2]| {
        Ffnn::new(&sizes, p.to_vec()).map_or(f64::NAN, |net| net.forward(&x))
    };
    run_classifier(config, &model, predict, &train_set, &test_set, Some(reference_radius))
}

#[derive(Debug, Clone)]
pub struct CompareRun {
    pub seed: u64,
    /// GD, H-LR and QNG, in that order.
    pub traces: Vec<TrainingTrace>,
}

#[derive(Debug, Clone)]
pub struct CompareReport {
    pub runs: Vec<CompareRun>,
    /// Per optimizer, the median first epoch at or below the threshold;
    /// `None` when that median is not reached within the epoch budget.
    pub median_epochs: Vec<(&'static str, Option<f64>)>,
    pub files: Vec<PathBuf>,
}

impl CompareReport {
    pub fn median_for(&self, optimizer: &str) -> Option<f64> {
        self.median_epochs
            .iter()
            .find(|(n, _)| *n == optimizer)
            .and_then(|(_, m)| *m)
    }
}

/// Median with unreached entries ordered after every reached one.
pub fn median_epochs(values: &[Option<usize>]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v: Vec<f64> = values.iter().map(|e| e.map_or(f64::INFINITY, |x| x as f64)).collect();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    let m = if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) };
    m.is_finite().then_some(m)
}

/// GD, the Hessian learning rate and QNG from shared starting points.
pub fn cmd_compare_optimizers(config: &ExperimentConfig) -> Result<CompareReport, CliError> {
    expect(config, Experiment::CompareOptimizers)?;
    let model = circuit_model(config)?;
    let o = &config.optimizer;
    let kinds = [
        OptimizerKind::Gd { eta: o.eta },
        OptimizerKind::HessianLr {
            recompute_every: o.recompute_every,
            eta_cap: o.eta_cap,
        },
        OptimizerKind::Qng {
            eta: config.compare.qng_eta,
            lambda_reg: o.lambda_reg,
        },
    ];
    let mut out = OutputDir::create(config)?;
    let mut runs = Vec::new();
    for i in 0..config.compare.runs {
        let seed = config.seed.wrapping_add(i as u64);
        let opts = TrainOptions {
            initial: Some(model.init_params(seed)),
            snapshot_every: None,
        };
        let mut traces = Vec::new();
        for kind in kinds {
            let trace = train(&model, &optimizer_config(config, kind, seed), &opts, |_| {})?;
            write_trace(&mut out, &format!("trace_{}_run{i}.csv", kind.name()), &trace)?;
            traces.push(trace);
        }
        runs.push(CompareRun { seed, traces });
    }

    let threshold = config.compare.threshold;
    let median_epochs_by: Vec<(&'static str, Option<f64>)> = kinds
        .iter()
        .enumerate()
        .map(|(k, kind)| {
            let hits: Vec<Option<usize>> = runs.iter().map(|r| r.traces[k].epochs_to_reach(threshold)).collect();
            (kind.name(), median_epochs(&hits))
        })
        .collect();

    out.write("summary.csv", |buf| {
        let mut w = csv::Writer::from_writer(buf);
        w.write_record(["optimizer", "run", "seed", "initial_loss", "final_loss", "epochs_to_threshold"])?;
        for (i, r) in runs.iter().enumerate() {
            for t in &r.traces {
                w.write_record([
                    t.optimizer.to_string(),
                    i.to_string(),
                    r.seed.to_string(),
                    fmt_f64(t.initial_loss()),
                    fmt_f64(t.final_loss()),
                    t.epochs_to_reach(threshold).map(|e| e.to_string()).unwrap_or_default(),
                ])?;
            }
        }
        w.flush()?;
        Ok(())
    })?;
    out.write("medians.csv", |buf| {
        let mut w = csv::Writer::from_writer(buf);
        w.write_record(["optimizer", "median_epochs_to_threshold", "median_final_loss"])?;
        for (k, (name, m)) in median_epochs_by.iter().enumerate() {
            let mut finals: Vec<f64> = runs.iter().map(|r| r.traces[k].final_loss()).collect();
            finals.sort_by(f64::total_cmp);
            let n = finals.len();
            let med = if n % 2 == 1 { finals[n / 2] } else { 0.5 * (finals[n / 2 - 1] + finals[n / 2]) };
            w.write_record([name.to_string(), m.map(fmt_f64).unwrap_or_default(), fmt_f64(med)])?;
        }
        w.flush()?;
        Ok(())
    })?;
    out.write("median_loss.csv", |buf| {
        let mut w = csv::Writer::from_writer(buf);
        let mut head = vec!["epoch".to_string()];
        head.extend(kinds.iter().map(|k| k.name().to_string()));
        w.write_record(&head)?;
        for epoch in 0..=config.optimizer.epochs {
            let mut row = vec![epoch.to_string()];
            for k in 0..kinds.len() {
                let mut v: Vec<f64> = runs.iter().map(|r| r.traces[k].records[epoch].loss).collect();
                v.sort_by(f64::total_cmp);
                let n = v.len();
                row.push(fmt_f64(if n % 2 == 1 { v[n / 2] } else { 0.5 * (v[n / 2 - 1] + v[n / 2]) }));
            }
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    })?;
    Ok(CompareReport {
        runs,
        median_epochs: median_epochs_by,
        files: out.written().to_vec(),
    })
}

#[derive(Debug, Clone)]
pub struct GenDataReport {
    pub dataset: Dataset,
    pub negative_fraction: f64,
    pub files: Vec<PathBuf>,
}

/// The circle dataset and its label balance.
pub fn cmd_gen_data(config: &ExperimentConfig) -> Result<GenDataReport, CliError> {
    expect(config, Experiment::GenData)?;
    let dataset = generate_circle_dataset(config.dataset.n, config.data_seed())?;
    let negative_fraction = dataset.negative_fraction();
    let negatives = dataset.labels.iter().filter(|&&y| y < 0).count();
    let mut out = OutputDir::create(config)?;
    out.write("dataset.csv", |b| Ok(dataset.write_csv(b)?))?;
    out.write("balance.csv", |buf| {
        let mut w = csv::Writer::from_writer(buf);
        w.write_record(["label", "count", "fraction"])?;
        w.write_record(["-1".to_string(), negatives.to_string(), fmt_f64(negative_fraction)])?;
        w.write_record([
            "1".to_string(),
            (dataset.len() - negatives).to_string(),
            fmt_f64(1.0 - negative_fraction),
        ])?;
        w.flush()?;
        Ok(())
    })?;
    Ok(GenDataReport {
        dataset,
        negative_fraction,
        files: out.written().to_vec(),
    })
}

/// Runs `config.experiment` and returns the written files with a few
/// human-readable summary lines.
pub fn run(config: &ExperimentConfig) -> Result<(Vec<PathBuf>, Vec<String>), CliError> {
    Ok(match config.experiment {
        Experiment::Landscape => {
            let r = cmd_landscape(config)?;
            let mut lines: Vec<String> = r
                .marked
                .iter()
                .map(|m| {
                    format!(
                        "point ({:.4}, {:.4}): loss {:.6} {} eigenvalues [{:.4e}, {:.4e}]",
                        m.theta[0],
                        m.theta[1],
                        m.loss,
                        m.class.label,
                        m.spectrum.lambda_min(),
                        m.spectrum.lambda_max()
                    )
                })
                .collect();
            if let Some(t) = &r.trained {
                lines.push(format!(
                    "trained: loss {:.6} {} flat eigenvalue {:.3e} loss change {:.3e}",
                    t.trace.final_loss(),
                    t.class.label,
                    t.flat_eigenvalue,
                    t.flat_loss_change
                ));
            }
            (r.files, lines)
        }
        Experiment::SpectrumEvolution => {
            let r = cmd_spectrum_evolution(config)?;
            let last = &r.snapshots[r.snapshots.len() - 1].1;
            let lines = vec![format!(
                "final loss {:.6e}, final eigenvalues [{:.4e}, {:.4e}]",
                r.trace.final_loss(),
                last.lambda_min(),
                last.lambda_max()
            )];
            (r.files, lines)
        }
        Experiment::Perturb => {
            let r = cmd_perturb(config)?;
            let lines = r
                .curves
                .iter()
                .map(|c| format!("{}: rank {} eigenvalue {:.4e}", c.name, c.rank, c.eigenvalue))
                .collect();
            (r.files, lines)
        }
        Experiment::TrainQnn | Experiment::TrainFfnn => {
            let r = if config.experiment == Experiment::TrainQnn {
                cmd_train_qnn(config)?
            } else {
                cmd_train_ffnn(config)?
            };
            let lines = vec![
                format!(
                    "train accuracy {:.4}, test accuracy {:.4}",
                    r.train_accuracy, r.test_accuracy
                ),
                format!(
                    "eigenvalue counts (negative, zero, positive): init {:?}, final {:?}",
                    r.init_counts(),
                    r.final_counts()
                ),
            ];
            (r.files, lines)
        }
        Experiment::CompareOptimizers => {
            let r = cmd_compare_optimizers(config)?;
            let lines = r
                .median_epochs
                .iter()
                .map(|(n, m)| match m {
                    Some(e) => format!("{n}: median epochs to threshold {e}"),
                    None => format!("{n}: median run does not reach the threshold"),
                })
                .collect();
            (r.files, lines)
        }
        Experiment::GenData => {
            let r = cmd_gen_data(config)?;
            let lines = vec![format!(
                "{} points, negative fraction {:.4}",
                r.dataset.len(),
                r.negative_fraction
            )];
            (r.files, lines)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_handles_unreached() {
        assert_eq!(median_epochs(&[Some(3), None, Some(1)]), Some(3.0));
        assert_eq!(median_epochs(&[None, None, Some(1)]), None);
        assert_eq!(median_epochs(&[Some(2), Some(4)]), Some(3.0));
        assert_eq!(median_epochs(&[]), None);
    }

    #[test]
    fn perturbation_grid_is_symmetric() {
        let c = ExperimentConfig::defaults_for(Experiment::Perturb);
        let g = perturbation_grid(&c);
        assert_eq!(g.len(), 21);
        assert_eq!(g[10], 0.0);
        for i in 0..10 {
            assert_eq!(g[i], -g[20 - i]);
        }
    }
}
