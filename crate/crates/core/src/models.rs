//! Circuit architectures and the classical baseline network.

use nalgebra::DMatrix;

use crate::data::Dataset;
use crate::error::{contract, Result};
use crate::qsim::{Angle, Circuit, Gate};
use crate::rng::SeededRng;
use crate::shiftcalc::fd_hessian_oracle;

/// Step of the finite-difference FFNN Hessian.
pub const FFNN_HESSIAN_EPS: f64 = 1e-4;

/// `N` independent `RX` rotations, slot `i` on qubit `i`; no entanglers.
pub fn build_toy(num_qubits: usize) -> Result<Circuit> {
    if num_qubits == 0 {
        return Err(contract("toy circuit needs at least one qubit"));
    }
    let gates = (0..num_qubits)
        .map(|q| Gate::Rx {
            qubit: q,
            angle: Angle::Param(q),
        })
        .collect();
    Circuit::new(num_qubits, gates)
}

/// CZ pairs for layer `layer`: `(0,1),(2,3),...` on even layers and
/// `(1,2),(3,4),...` on odd layers. Open chain.
pub fn cz_pairs(num_qubits: usize, layer: usize) -> Vec<(usize, usize)> {
    (layer % 2..num_qubits.saturating_sub(1))
        .step_by(2)
        .map(|q| (q, q + 1))
        .collect()
}

fn layered_gates(num_qubits: usize, layers: usize, reupload: bool) -> Vec<Gate> {
    let mut gates = Vec::new();
    let mut slot = 0;
    for layer in 0..layers {
        if reupload {
            for q in 0..num_qubits {
                gates.push(Gate::Rot {
                    qubit: q,
                    angles: [Angle::Data(0), Angle::Data(1), Angle::Fixed(0.0)],
                });
            }
        }
        for q in 0..num_qubits {
            gates.push(Gate::Rot {
                qubit: q,
                angles: [Angle::Param(slot), Angle::Param(slot + 1), Angle::Param(slot + 2)],
            });
            slot += 3;
        }
        for (a, b) in cz_pairs(num_qubits, layer) {
            gates.push(Gate::Cz { a, b });
        }
    }
    gates
}

fn check_layered(num_qubits: usize, layers: usize) -> Result<()> {
    if num_qubits < 2 || layers < 1 {
        return Err(contract(format!(
            "layered circuits need N >= 2 and L >= 1, got N={num_qubits}, L={layers}"
        )));
    }
    Ok(())
}

/// `L` layers of general rotations on every qubit, each followed by a CZ
/// ladder alternating between even and odd starting qubits. `P = 3NL`.
pub fn build_layered(num_qubits: usize, layers: usize) -> Result<Circuit> {
    check_layered(num_qubits, layers)?;
    Circuit::new(num_qubits, layered_gates(num_qubits, layers, false))
}

/// [`build_layered`] with a data rotation `R(x1, x2, 0)` on every qubit at
/// the start of each layer. Two data slots, `P = 3NL`.
pub fn build_reuploading(num_qubits: usize, layers: usize) -> Result<Circuit> {
    check_layered(num_qubits, layers)?;
    Circuit::new(num_qubits, layered_gates(num_qubits, layers, true))
}

/// Uniform in `[0, 2pi)`.
pub fn init_circuit_params(num_params: usize, seed: u64) -> Vec<f64> {
    SeededRng::new(seed).uniform_vec(num_params, 0.0, 2.0 * std::f64::consts::PI)
}

/// Fully connected tanh network with a single tanh output.
///
/// Parameters are stored flat, layer by layer: the weight matrix row-major
/// (`out x in`) followed by the bias vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Ffnn {
    sizes: Vec<usize>,
    params: Vec<f64>,
}

/// Layer widths of the baseline classifier, `2 -> 12 -> 10 -> 1`.
pub const BASELINE_SIZES: [usize; 4] = [2, 12, 10, 1];

pub fn ffnn_param_count(sizes: &[usize]) -> usize {
    sizes.windows(2).map(|w| w[0] * w[1] + w[1]).sum()
}

impl Ffnn {
    pub fn new(sizes: &[usize], params: Vec<f64>) -> Result<Self> {
        if sizes.len() < 2 || *sizes.last().unwrap_or(&0) != 1 {
            return Err(contract("network needs an input layer and one output unit"));
        }
        let expected = ffnn_param_count(sizes);
        if params.len() != expected {
            return Err(contract(format!(
                "network expects {expected} parameters, got {}",
                params.len()
            )));
        }
        Ok(Self {
            sizes: sizes.to_vec(),
            params,
        })
    }

    pub fn zeros(sizes: &[usize]) -> Result<Self> {
        Self::new(sizes, vec![0.0; ffnn_param_count(sizes)])
    }

    /// Each layer uniform in `[-1/sqrt(fan_in), 1/sqrt(fan_in)]`.
    pub fn init(sizes: &[usize], seed: u64) -> Result<Self> {
        let mut rng = SeededRng::new(seed);
        let mut params = Vec::with_capacity(ffnn_param_count(sizes));
        for w in sizes.windows(2) {
            let a = 1.0 / (w[0] as f64).sqrt();
            params.extend(rng.uniform_vec(w[0] * w[1] + w[1], -a, a));
        }
        Self::new(sizes, params)
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn num_params(&self) -> usize {
        self.params.len()
    }

    /// Activations of every layer, input first.
    fn activations(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let mut acts = vec![x.to_vec()];
        let mut offset = 0;
        for w in self.sizes.windows(2) {
            let (fan_in, fan_out) = (w[0], w[1]);
            let weights = &self.params[offset..offset + fan_in * fan_out];
            let bias = &self.params[offset + fan_in * fan_out..offset + fan_in * fan_out + fan_out];
            offset += fan_in * fan_out + fan_out;
            let prev = acts.last().expect("input layer present");
            let next = (0..fan_out)
                .map(|o| {
                    let row = &weights[o * fan_in..(o + 1) * fan_in];
                    let z: f64 = row.iter().zip(prev).map(|(w, a)| w * a).sum::<f64>() + bias[o];
                    z.tanh()
                })
                .collect();
            acts.push(next);
        }
        acts
    }

    pub fn forward(&self, x: &[f64]) -> f64 {
        self.activations(x).last().map_or(0.0, |a| a[0])
    }

    /// Reverse-mode gradient of `(forward(x) - y)^2` with respect to the
    /// flat parameter vector.
    pub fn gradient(&self, x: &[f64], y: f64) -> Vec<f64> {
        let acts = self.activations(x);
        let out = acts.last().expect("output layer present")[0];
        let mut grad = vec![0.0; self.params.len()];

        let mut offsets = Vec::new();
        let mut offset = 0;
        for w in self.sizes.windows(2) {
            offsets.push(offset);
            offset += w[0] * w[1] + w[1];
        }

        // dL/da for the current layer's outputs
        let mut upstream = vec![2.0 * (out - y)];
        for layer in (0..self.sizes.len() - 1).rev() {
            let (fan_in, fan_out) = (self.sizes[layer], self.sizes[layer + 1]);
            let base = offsets[layer];
            let a_out = &acts[layer + 1];
            let a_in = &acts[layer];
            let delta: Vec<f64> = (0..fan_out)
                .map(|o| upstream[o] * (1.0 - a_out[o] * a_out[o]))
                .collect();
            for o in 0..fan_out {
                for i in 0..fan_in {
                    grad[base + o * fan_in + i] = delta[o] * a_in[i];
                }
                grad[base + fan_in * fan_out + o] = delta[o];
            }
            upstream = (0..fan_in)
                .map(|i| {
                    (0..fan_out)
                        .map(|o| self.params[base + o * fan_in + i] * delta[o])
                        .sum()
                })
                .collect();
        }
        grad
    }
}

pub fn ffnn_forward(net: &Ffnn, x: &[f64]) -> f64 {
    net.forward(x)
}

pub fn ffnn_gradient(net: &Ffnn, x: &[f64], y: f64) -> Vec<f64> {
    net.gradient(x, y)
}

/// `sum_a (out(x_a) - y_a)^2` and its gradient, summed in dataset order.
pub fn ffnn_risk_and_gradient(net: &Ffnn, dataset: &Dataset) -> (f64, Vec<f64>) {
    let mut risk = 0.0;
    let mut grad = vec![0.0; net.num_params()];
    for (x, y) in dataset.iter() {
        let y = y as f64;
        let out = net.forward(&x);
        risk += (out - y) * (out - y);
        for (g, gi) in grad.iter_mut().zip(net.gradient(&x, y)) {
            *g += gi;
        }
    }
    (risk, grad)
}

/// Hessian of the empirical risk by central differences of the exact
/// gradient (step [`FFNN_HESSIAN_EPS`]), symmetrized.
pub fn ffnn_hessian(net: &Ffnn, dataset: &Dataset) -> DMatrix<f64> {
    let sizes = net.sizes().to_vec();
    fd_hessian_oracle(
        |p: &[f64]| {
            let shifted = Ffnn {
                sizes: sizes.clone(),
                params: p.to_vec(),
            };
            ffnn_risk_and_gradient(&shifted, dataset).1
        },
        net.params(),
        FFNN_HESSIAN_EPS,
    )
}
