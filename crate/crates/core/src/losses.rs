//! Losses over circuit outputs.
//!
//! A loss is split into a scalar circuit output `f` (an expectation value, so
//! shift-rule differentiable) and an outer function `l(f)` with closed-form
//! `l'(f)` and `l''(f)`, which the chain rule in [`crate::shiftcalc`] combines.

use crate::data::Dataset;
use crate::error::{contract, Error, Result};
use crate::qsim::{Circuit, StateVector};

#[derive(Debug, Clone, PartialEq)]
pub enum LossFunction {
    /// `f = |<target|psi>|^2`, `l = 1 - f`.
    GlobalFidelity { target: StateVector },
    /// `f = mean_i P(qubit i = 0)`, `l = 1 - f`.
    LocalZ,
    /// `f = <Z_qubit>`, `l = (f - label)^2`.
    SquareZ { label: f64, qubit: usize },
}

impl LossFunction {
    pub fn global(target: StateVector) -> Self {
        Self::GlobalFidelity { target }
    }

    pub fn square(label: f64, qubit: usize) -> Self {
        Self::SquareZ { label, qubit }
    }

    /// Checks that the loss can read the output of `circuit`.
    pub fn check(&self, circuit: &Circuit) -> Result<()> {
        match self {
            Self::GlobalFidelity { target } if target.num_qubits() != circuit.num_qubits() => {
                Err(contract(format!(
                    "target has {} qubits, circuit has {}",
                    target.num_qubits(),
                    circuit.num_qubits()
                )))
            }
            Self::SquareZ { qubit, .. } if *qubit >= circuit.num_qubits() => Err(Error::QubitIndex {
                index: *qubit,
                num_qubits: circuit.num_qubits(),
            }),
            _ => Ok(()),
        }
    }

    /// The scalar circuit output `f` this loss is a function of.
    pub fn output(&self, state: &StateVector) -> Result<f64> {
        match self {
            Self::GlobalFidelity { target } => state.fidelity(target),
            Self::LocalZ => {
                let n = state.num_qubits();
                let mut sum = 0.0;
                for q in 0..n {
                    sum += state.qubit_zero_probability(q)?;
                }
                Ok(sum / n as f64)
            }
            Self::SquareZ { qubit, .. } => state.expectation_z(*qubit),
        }
    }

    pub fn value(&self, f: f64) -> f64 {
        match self {
            Self::GlobalFidelity { .. } | Self::LocalZ => 1.0 - f,
            Self::SquareZ { label, .. } => (f - label) * (f - label),
        }
    }

    pub fn first_derivative(&self, f: f64) -> f64 {
        match self {
            Self::GlobalFidelity { .. } | Self::LocalZ => -1.0,
            Self::SquareZ { label, .. } => 2.0 * (f - label),
        }
    }

    pub fn second_derivative(&self, _f: f64) -> f64 {
        match self {
            Self::GlobalFidelity { .. } | Self::LocalZ => 0.0,
            Self::SquareZ { .. } => 2.0,
        }
    }

    pub fn evaluate(&self, state: &StateVector) -> Result<f64> {
        Ok(self.value(self.output(state)?))
    }
}

/// One `l(f(theta, x))` term of an objective.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub loss: LossFunction,
    pub data: Vec<f64>,
}

/// What a circuit is trained on: a single loss, or the empirical risk
/// `sum_a (<Z_qubit>(x_a) - y_a)^2` over a dataset.
#[derive(Debug, Clone, PartialEq)]
pub enum Objective {
    Single { loss: LossFunction, data: Vec<f64> },
    Risk { dataset: Dataset, qubit: usize },
}

impl Objective {
    pub fn state_loss(loss: LossFunction) -> Self {
        Self::Single { loss, data: Vec::new() }
    }

    pub fn risk(dataset: Dataset) -> Self {
        Self::Risk { dataset, qubit: 0 }
    }

    /// Terms in summation order.
    pub fn terms(&self) -> Vec<Term> {
        match self {
            Self::Single { loss, data } => vec![Term {
                loss: loss.clone(),
                data: data.clone(),
            }],
            Self::Risk { dataset, qubit } => dataset
                .iter()
                .map(|(x, y)| Term {
                    loss: LossFunction::square(y as f64, *qubit),
                    data: x.to_vec(),
                })
                .collect(),
        }
    }

    pub fn validate(&self, circuit: &Circuit, params: &[f64]) -> Result<()> {
        match self {
            Self::Single { loss, data } => {
                loss.check(circuit)?;
                circuit.check_inputs(params, data)
            }
            Self::Risk { dataset, qubit } => {
                if dataset.is_empty() {
                    return Err(contract("empirical risk over an empty dataset"));
                }
                LossFunction::square(1.0, *qubit).check(circuit)?;
                circuit.check_inputs(params, &dataset.points[0])
            }
        }
    }

    pub fn evaluate(&self, circuit: &Circuit, params: &[f64]) -> Result<f64> {
        self.validate(circuit, params)?;
        let mut total = 0.0;
        for t in self.terms() {
            total += t.loss.evaluate(&circuit.simulate(params, &t.data))?;
        }
        Ok(total)
    }
}

/// `1 - |<target|psi(theta)>|^2`.
pub fn global_fidelity_loss(circuit: &Circuit, params: &[f64], target: &StateVector) -> Result<f64> {
    let loss = LossFunction::global(target.clone());
    loss.check(circuit)?;
    loss.evaluate(&circuit.run(params, &[])?)
}

/// `1 - (1/N) sum_i P(qubit i = 0)`.
pub fn local_loss(circuit: &Circuit, params: &[f64]) -> Result<f64> {
    LossFunction::LocalZ.evaluate(&circuit.run(params, &[])?)
}

/// `(<Z_0>(theta, x) - y)^2`.
pub fn square_loss(circuit: &Circuit, params: &[f64], x: &[f64], y: f64) -> Result<f64> {
    LossFunction::square(y, 0).evaluate(&circuit.run(params, x)?)
}

/// Plain sum of [`square_loss`] over the dataset.
pub fn empirical_risk(circuit: &Circuit, params: &[f64], dataset: &Dataset) -> Result<f64> {
    Objective::risk(dataset.clone()).evaluate(circuit, params)
}
