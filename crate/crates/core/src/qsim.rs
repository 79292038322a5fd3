//! Dense statevector simulation.
//!
//! Qubit 0 is the most significant bit of the basis-state index, so for three
//! qubits the amplitude of `|q0 q1 q2> = |100>` lives at index 4.
//!
//! Every rotation uses the half-angle convention `R_A(t) = exp(-i t sigma_A / 2)`.
//! The general single-qubit rotation is `R(p1, p2, p3) = RZ(p1) RY(p2) RZ(p3)`,
//! i.e. `RZ(p3)` acts first.

use std::ops::Range;

use num_complex::Complex64;

use crate::error::{contract, Error, Result};

const NORM_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Dense `2^N` amplitude vector with unit norm.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
    num_qubits: usize,
}

impl StateVector {
    /// `|0...0>` on `num_qubits` qubits.
    pub fn zero(num_qubits: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Self {
            amplitudes,
            num_qubits,
        }
    }

    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        if index >= 1 << num_qubits {
            return Err(contract(format!(
                "basis index {index} out of range for {num_qubits} qubits"
            )));
        }
        let mut state = Self::zero(num_qubits);
        state.amplitudes[0] = Complex64::new(0.0, 0.0);
        state.amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(state)
    }

    /// Equal superposition `2^{-N/2} sum_s |s>`.
    pub fn uniform(num_qubits: usize) -> Self {
        let dim = 1usize << num_qubits;
        let a = 1.0 / (dim as f64).sqrt();
        Self {
            amplitudes: vec![Complex64::new(a, 0.0); dim],
            num_qubits,
        }
    }

    /// `(|0...0> + |1...1>) / sqrt(2)`; needs `num_qubits >= 1`.
    pub fn ghz(num_qubits: usize) -> Self {
        let dim = 1usize << num_qubits;
        let a = std::f64::consts::FRAC_1_SQRT_2;
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[0] = Complex64::new(a, 0.0);
        amplitudes[dim - 1] += Complex64::new(a, 0.0);
        Self {
            amplitudes,
            num_qubits,
        }
    }

    /// Wraps raw amplitudes; the length must be a power of two and the norm 1.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(contract(format!(
                "amplitude count {len} is not a power of two >= 2"
            )));
        }
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(contract(format!("state norm {norm} is not 1")));
        }
        Ok(Self {
            num_qubits: len.trailing_zeros() as usize,
            amplitudes,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.check_same_dim(other)?;
        Ok(inner_product(&self.amplitudes, &other.amplitudes))
    }

    fn check_same_dim(&self, other: &StateVector) -> Result<()> {
        if self.num_qubits != other.num_qubits {
            return Err(contract(format!(
                "dimension mismatch: {} vs {} qubits",
                self.num_qubits, other.num_qubits
            )));
        }
        Ok(())
    }

    fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.num_qubits {
            return Err(Error::QubitIndex {
                index: qubit,
                num_qubits: self.num_qubits,
            });
        }
        Ok(())
    }

    fn mask(&self, qubit: usize) -> usize {
        1 << (self.num_qubits - 1 - qubit)
    }

    pub fn apply_rx(&mut self, qubit: usize, theta: f64) -> Result<()> {
        self.check_qubit(qubit)?;
        self.rotate(Axis::X, qubit, theta);
        Ok(())
    }

    pub fn apply_ry(&mut self, qubit: usize, theta: f64) -> Result<()> {
        self.check_qubit(qubit)?;
        self.rotate(Axis::Y, qubit, theta);
        Ok(())
    }

    pub fn apply_rz(&mut self, qubit: usize, theta: f64) -> Result<()> {
        self.check_qubit(qubit)?;
        self.rotate(Axis::Z, qubit, theta);
        Ok(())
    }

    /// `R(p1, p2, p3) = RZ(p1) RY(p2) RZ(p3)`.
    pub fn apply_rot(&mut self, qubit: usize, phi1: f64, phi2: f64, phi3: f64) -> Result<()> {
        self.check_qubit(qubit)?;
        self.rotate(Axis::Z, qubit, phi3);
        self.rotate(Axis::Y, qubit, phi2);
        self.rotate(Axis::Z, qubit, phi1);
        Ok(())
    }

    pub fn apply_cz(&mut self, q1: usize, q2: usize) -> Result<()> {
        self.check_qubit(q1)?;
        self.check_qubit(q2)?;
        if q1 == q2 {
            return Err(Error::InvalidGate(format!("CZ on a single qubit {q1}")));
        }
        self.cz(q1, q2);
        Ok(())
    }

    /// `<Z_qubit>`, +1 when the qubit reads 0.
    pub fn expectation_z(&self, qubit: usize) -> Result<f64> {
        Ok(2.0 * self.qubit_zero_probability(qubit)? - 1.0)
    }

    /// Marginal probability that `qubit` measures `|0>`.
    pub fn qubit_zero_probability(&self, qubit: usize) -> Result<f64> {
        self.check_qubit(qubit)?;
        let mask = self.mask(qubit);
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask == 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// `|<target|self>|^2`.
    pub fn fidelity(&self, target: &StateVector) -> Result<f64> {
        Ok(target.inner(self)?.norm_sqr())
    }

    pub(crate) fn rotate(&mut self, axis: Axis, qubit: usize, theta: f64) {
        let mask = self.mask(qubit);
        let (s, c) = (0.5 * theta).sin_cos();
        let amps = &mut self.amplitudes;
        match axis {
            Axis::X => for_each_pair(amps, mask, |a0, a1| {
                let (x0, x1) = (*a0, *a1);
                *a0 = Complex64::new(c * x0.re + s * x1.im, c * x0.im - s * x1.re);
                *a1 = Complex64::new(s * x0.im + c * x1.re, c * x1.im - s * x0.re);
            }),
            Axis::Y => for_each_pair(amps, mask, |a0, a1| {
                let (x0, x1) = (*a0, *a1);
                *a0 = x0 * c - x1 * s;
                *a1 = x0 * s + x1 * c;
            }),
            Axis::Z => {
                let lo = Complex64::new(c, -s);
                let hi = Complex64::new(c, s);
                for_each_pair(amps, mask, |a0, a1| {
                    *a0 *= lo;
                    *a1 *= hi;
                })
            }
        }
    }

    /// Multiplies by the generator factor `-i sigma_A / 2` (not unitary).
    pub(crate) fn apply_generator(&mut self, axis: Axis, qubit: usize) {
        let mask = self.mask(qubit);
        let minus_half_i = Complex64::new(0.0, -0.5);
        let amps = &mut self.amplitudes;
        match axis {
            Axis::X => for_each_pair(amps, mask, |a0, a1| {
                let (x0, x1) = (*a0, *a1);
                *a0 = minus_half_i * x1;
                *a1 = minus_half_i * x0;
            }),
            Axis::Y => for_each_pair(amps, mask, |a0, a1| {
                let (x0, x1) = (*a0, *a1);
                *a0 = -0.5 * x1;
                *a1 = 0.5 * x0;
            }),
            Axis::Z => for_each_pair(amps, mask, |a0, a1| {
                *a0 *= minus_half_i;
                *a1 *= -minus_half_i;
            }),
        }
    }

    pub(crate) fn cz(&mut self, q1: usize, q2: usize) {
        let both = self.mask(q1) | self.mask(q2);
        for (i, a) in self.amplitudes.iter_mut().enumerate() {
            if i & both == both {
                *a = -*a;
            }
        }
    }

    pub(crate) fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }
}

/// `<fidelity(state, target)>` as a free function.
pub fn fidelity(state: &StateVector, target: &StateVector) -> Result<f64> {
    state.fidelity(target)
}

/// `sum_i conj(a_i) b_i`.
pub fn inner_product(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

#[inline]
fn for_each_pair<F>(amps: &mut [Complex64], mask: usize, mut f: F)
where
    F: FnMut(&mut Complex64, &mut Complex64),
{
    for block in amps.chunks_exact_mut(mask << 1) {
        let (lo, hi) = block.split_at_mut(mask);
        for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
            f(a0, a1);
        }
    }
}

/// Source of a rotation angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Angle {
    /// Trainable parameter slot.
    Param(usize),
    /// Data slot (not trainable).
    Data(usize),
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    Rx { qubit: usize, angle: Angle },
    /// `R(a[0], a[1], a[2]) = RZ(a[0]) RY(a[1]) RZ(a[2])`.
    Rot { qubit: usize, angles: [Angle; 3] },
    Cz { a: usize, b: usize },
}

/// Primitive step of a compiled circuit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Op {
    Rotation { axis: Axis, qubit: usize, angle: Angle },
    Cz { a: usize, b: usize },
}

/// Ordered gate program acting on `|0...0>`.
///
/// Every parameter slot in `0..num_params` is used by exactly one rotation.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
    ops: Vec<Op>,
    param_ops: Vec<usize>,
    num_data_slots: usize,
}

impl Circuit {
    pub fn new(num_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        if num_qubits == 0 {
            return Err(contract("a circuit needs at least one qubit"));
        }
        let check = |q: usize| {
            if q >= num_qubits {
                Err(Error::QubitIndex {
                    index: q,
                    num_qubits,
                })
            } else {
                Ok(())
            }
        };

        let mut ops = Vec::new();
        for gate in &gates {
            match *gate {
                Gate::Rx { qubit, angle } => {
                    check(qubit)?;
                    push_rotation(&mut ops, Axis::X, qubit, angle);
                }
                Gate::Rot { qubit, angles } => {
                    check(qubit)?;
                    push_rotation(&mut ops, Axis::Z, qubit, angles[2]);
                    push_rotation(&mut ops, Axis::Y, qubit, angles[1]);
                    push_rotation(&mut ops, Axis::Z, qubit, angles[0]);
                }
                Gate::Cz { a, b } => {
                    check(a)?;
                    check(b)?;
                    if a == b {
                        return Err(Error::InvalidGate(format!("CZ on a single qubit {a}")));
                    }
                    ops.push(Op::Cz { a, b });
                }
            }
        }

        let mut slots: Vec<(usize, usize)> = Vec::new();
        let mut num_data_slots = 0;
        for (k, op) in ops.iter().enumerate() {
            if let Op::Rotation { angle, .. } = op {
                match *angle {
                    Angle::Param(slot) => slots.push((slot, k)),
                    Angle::Data(d) => num_data_slots = num_data_slots.max(d + 1),
                    Angle::Fixed(_) => {}
                }
            }
        }
        slots.sort_unstable();
        for (expected, &(slot, _)) in slots.iter().enumerate() {
            if slot != expected {
                return Err(Error::InvalidGate(format!(
                    "parameter slots must be used exactly once and cover 0..{}; found slot {slot} at position {expected}",
                    slots.len()
                )));
            }
        }
        let param_ops = slots.into_iter().map(|(_, k)| k).collect();

        Ok(Self {
            num_qubits,
            gates,
            ops,
            param_ops,
            num_data_slots,
        })
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_params(&self) -> usize {
        self.param_ops.len()
    }

    pub fn num_data_slots(&self) -> usize {
        self.num_data_slots
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub(crate) fn num_ops(&self) -> usize {
        self.ops.len()
    }

    /// Index of the primitive op driven by parameter `slot`.
    pub(crate) fn param_op(&self, slot: usize) -> usize {
        self.param_ops[slot]
    }

    pub fn check_inputs(&self, params: &[f64], data: &[f64]) -> Result<()> {
        if params.len() != self.num_params() {
            return Err(contract(format!(
                "expected {} parameters, got {}",
                self.num_params(),
                params.len()
            )));
        }
        if data.len() != self.num_data_slots {
            return Err(contract(format!(
                "expected {} data values, got {}",
                self.num_data_slots,
                data.len()
            )));
        }
        Ok(())
    }

    /// Runs the circuit on `|0...0>`.
    pub fn run(&self, params: &[f64], data: &[f64]) -> Result<StateVector> {
        self.check_inputs(params, data)?;
        Ok(self.simulate(params, data))
    }

    pub(crate) fn simulate(&self, params: &[f64], data: &[f64]) -> StateVector {
        let mut state = StateVector::zero(self.num_qubits);
        self.apply_ops(&mut state, 0..self.ops.len(), params, data);
        state
    }

    pub(crate) fn op_angle(&self, op: usize, params: &[f64], data: &[f64]) -> f64 {
        match self.ops[op] {
            Op::Rotation { angle, .. } => resolve(angle, params, data),
            Op::Cz { .. } => 0.0,
        }
    }

    /// Applies op `op` with an explicit rotation angle.
    pub(crate) fn apply_op_with_angle(&self, state: &mut StateVector, op: usize, theta: f64) {
        match self.ops[op] {
            Op::Rotation { axis, qubit, .. } => state.rotate(axis, qubit, theta),
            Op::Cz { a, b } => state.cz(a, b),
        }
    }

    pub(crate) fn apply_ops(
        &self,
        state: &mut StateVector,
        range: Range<usize>,
        params: &[f64],
        data: &[f64],
    ) {
        for op in &self.ops[range] {
            match *op {
                Op::Rotation { axis, qubit, angle } => {
                    state.rotate(axis, qubit, resolve(angle, params, data))
                }
                Op::Cz { a, b } => state.cz(a, b),
            }
        }
    }

    /// `d|psi>/d theta_slot`, obtained by inserting `-i sigma/2` next to the
    /// rotation driven by `slot`. The result is not normalized.
    pub fn state_derivative(
        &self,
        params: &[f64],
        data: &[f64],
        slot: usize,
    ) -> Result<Vec<Complex64>> {
        self.check_inputs(params, data)?;
        if slot >= self.num_params() {
            return Err(contract(format!(
                "parameter slot {slot} out of range for {} parameters",
                self.num_params()
            )));
        }
        Ok(self.derivative_unchecked(params, data, slot))
    }

    pub(crate) fn derivative_unchecked(
        &self,
        params: &[f64],
        data: &[f64],
        slot: usize,
    ) -> Vec<Complex64> {
        let k = self.param_ops[slot];
        let mut state = StateVector::zero(self.num_qubits);
        self.apply_ops(&mut state, 0..k + 1, params, data);
        if let Op::Rotation { axis, qubit, .. } = self.ops[k] {
            state.apply_generator(axis, qubit);
        }
        self.apply_ops(&mut state, k + 1..self.ops.len(), params, data);
        state.into_amplitudes()
    }
}

fn push_rotation(ops: &mut Vec<Op>, axis: Axis, qubit: usize, angle: Angle) {
    // Fixed zero angles are identities (e.g. the padded third data angle).
    if angle == Angle::Fixed(0.0) {
        return;
    }
    ops.push(Op::Rotation { axis, qubit, angle });
}

#[inline]
fn resolve(angle: Angle, params: &[f64], data: &[f64]) -> f64 {
    match angle {
        Angle::Param(i) => params[i],
        Angle::Data(i) => data[i],
        Angle::Fixed(t) => t,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_states_close(a: &StateVector, b: &StateVector, tol: f64) {
        for (x, y) in a.amplitudes().iter().zip(b.amplitudes()) {
            assert!((x - y).norm() < tol, "{x} vs {y}");
        }
    }

    fn toy(n: usize) -> Circuit {
        let gates = (0..n)
            .map(|q| Gate::Rx {
                qubit: q,
                angle: Angle::Param(q),
            })
            .collect();
        Circuit::new(n, gates).unwrap()
    }

    #[test]
    fn rx_zero_is_identity() {
        let mut s = StateVector::uniform(3);
        s.apply_ry(1, 0.7).unwrap();
        let before = s.clone();
        s.apply_rx(2, 0.0).unwrap();
        assert_eq!(s, before);
    }

    #[test]
    fn rx_pi_flips_to_minus_i_one() {
        let mut s = StateVector::zero(1);
        s.apply_rx(0, PI).unwrap();
        assert_abs_diff_eq!(s.amplitudes()[0].norm(), 0.0, epsilon = 1e-15);
        assert!((s.amplitudes()[1] - c(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn rx_half_pi_splits_probability() {
        let mut s = StateVector::zero(1);
        s.apply_rx(0, FRAC_PI_2).unwrap();
        assert_abs_diff_eq!(s.qubit_zero_probability(0).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(s.expectation_z(0).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn rot_special_cases() {
        let mut s = StateVector::uniform(2);
        let before = s.clone();
        s.apply_rot(0, 0.0, 0.0, 0.0).unwrap();
        assert_eq!(s, before);

        let theta = 1.1;
        let mut s = StateVector::zero(1);
        s.apply_rot(0, 0.0, theta, 0.0).unwrap();
        assert!((s.amplitudes()[0] - c((theta / 2.0).cos(), 0.0)).norm() < 1e-15);
        assert!((s.amplitudes()[1] - c((theta / 2.0).sin(), 0.0)).norm() < 1e-15);

        let mut s = StateVector::zero(1);
        s.apply_rot(0, 0.4, 0.0, -1.3).unwrap();
        assert_abs_diff_eq!(s.amplitudes()[0].norm(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.qubit_zero_probability(0).unwrap(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn cz_fires_only_on_both_ones() {
        let mut s = StateVector::zero(2);
        s.apply_cz(0, 1).unwrap();
        assert_eq!(s, StateVector::zero(2));

        let mut s = StateVector::basis(2, 3).unwrap();
        s.apply_cz(0, 1).unwrap();
        assert_eq!(s.amplitudes()[3], c(-1.0, 0.0));

        let mut s = StateVector::uniform(3);
        s.apply_ry(0, 0.3).unwrap();
        let before = s.clone();
        s.apply_cz(2, 0).unwrap();
        assert_ne!(s, before);
        s.apply_cz(2, 0).unwrap();
        assert_eq!(s, before);
    }

    #[test]
    fn index_errors() {
        let mut s = StateVector::zero(2);
        assert!(matches!(s.apply_rx(2, 0.1), Err(Error::QubitIndex { .. })));
        assert!(matches!(s.apply_rot(5, 0.0, 0.0, 0.0), Err(Error::QubitIndex { .. })));
        assert!(matches!(s.apply_cz(1, 1), Err(Error::InvalidGate(_))));
        assert!(s.expectation_z(2).is_err());
        assert!(Circuit::new(2, vec![Gate::Cz { a: 0, b: 0 }]).is_err());
        assert!(Circuit::new(
            2,
            vec![Gate::Rx {
                qubit: 3,
                angle: Angle::Param(0)
            }]
        )
        .is_err());
    }

    #[test]
    fn parameter_slots_must_be_unique_and_dense() {
        let shared = vec![
            Gate::Rx { qubit: 0, angle: Angle::Param(0) },
            Gate::Rx { qubit: 1, angle: Angle::Param(0) },
        ];
        assert!(Circuit::new(2, shared).is_err());
        let gap = vec![
            Gate::Rx { qubit: 0, angle: Angle::Param(0) },
            Gate::Rx { qubit: 1, angle: Angle::Param(2) },
        ];
        assert!(Circuit::new(2, gap).is_err());
    }

    #[test]
    fn run_checks_lengths() {
        let circ = toy(2);
        assert!(matches!(circ.run(&[0.1], &[]), Err(Error::Contract(_))));
        assert!(matches!(circ.run(&[0.1, 0.2], &[1.0]), Err(Error::Contract(_))));
    }

    #[test]
    fn toy_circuit_examples() {
        let circ = toy(3);
        assert_eq!(circ.run(&[0.0; 3], &[]).unwrap(), StateVector::zero(3));

        let circ = toy(2);
        let s = circ.run(&[PI, 0.0], &[]).unwrap();
        // qubit 0 is the MSB, so |10> is index 2
        assert_abs_diff_eq!(s.amplitudes()[2].norm(), 1.0, epsilon = 1e-15);

        let s = toy(3).run(&[FRAC_PI_2, FRAC_PI_2, 0.0], &[]).unwrap();
        let f = s.fidelity(&StateVector::zero(3)).unwrap();
        assert_abs_diff_eq!(f, FRAC_PI_4.cos().powi(4), epsilon = 1e-15);
        assert_abs_diff_eq!(f, 0.25, epsilon = 1e-15);
    }

    #[test]
    fn zero_probability_examples() {
        let s = StateVector::zero(4);
        for q in 0..4 {
            assert_eq!(s.qubit_zero_probability(q).unwrap(), 1.0);
        }
        let mut s = StateVector::zero(3);
        s.apply_rx(1, PI).unwrap();
        assert_abs_diff_eq!(s.qubit_zero_probability(1).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.expectation_z(1).unwrap(), -1.0, epsilon = 1e-15);

        let mut s = StateVector::zero(1);
        s.apply_rx(0, 2.0 * PI / 3.0).unwrap();
        assert_abs_diff_eq!(s.qubit_zero_probability(0).unwrap(), 0.25, epsilon = 1e-15);
    }

    #[test]
    fn fidelity_edge_cases() {
        let s = StateVector::uniform(2);
        assert_abs_diff_eq!(s.fidelity(&s).unwrap(), 1.0, epsilon = 1e-15);
        let a = StateVector::basis(2, 1).unwrap();
        let b = StateVector::basis(2, 2).unwrap();
        assert_eq!(a.fidelity(&b).unwrap(), 0.0);
        assert!(a.fidelity(&StateVector::zero(3)).is_err());
    }

    #[test]
    fn from_amplitudes_validates() {
        assert!(StateVector::from_amplitudes(vec![c(1.0, 0.0); 3]).is_err());
        assert!(StateVector::from_amplitudes(vec![c(1.0, 0.0); 2]).is_err());
        let s = StateVector::from_amplitudes(vec![c(0.6, 0.0), c(0.0, 0.8)]).unwrap();
        assert_eq!(s.num_qubits(), 1);
        assert_abs_diff_eq!(StateVector::ghz(3).norm_sqr(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn derivative_single_rx_at_zero() {
        let d = toy(1).state_derivative(&[0.0], &[], 0).unwrap();
        assert!(d[0].norm() < 1e-15);
        assert!((d[1] - c(0.0, -0.5)).norm() < 1e-15);
        assert!(toy(1).state_derivative(&[0.0], &[], 1).is_err());
    }

    fn random_rot_circuit(n: usize) -> Circuit {
        let mut gates = Vec::new();
        let mut slot = 0;
        for layer in 0..2 {
            for q in 0..n {
                gates.push(Gate::Rot {
                    qubit: q,
                    angles: [Angle::Param(slot), Angle::Param(slot + 1), Angle::Param(slot + 2)],
                });
                slot += 3;
            }
            for q in (layer % 2..n.saturating_sub(1)).step_by(2) {
                gates.push(Gate::Cz { a: q, b: q + 1 });
            }
        }
        Circuit::new(n, gates).unwrap()
    }

    #[test]
    fn derivative_matches_central_difference() {
        let circ = random_rot_circuit(3);
        let mut rng = crate::rng::SeededRng::new(11);
        let params = rng.uniform_vec(circ.num_params(), 0.0, 2.0 * PI);
        let eps = 1e-5;
        for slot in 0..circ.num_params() {
            let d = circ.state_derivative(&params, &[], slot).unwrap();
            let mut plus = params.clone();
            plus[slot] += eps;
            let mut minus = params.clone();
            minus[slot] -= eps;
            let sp = circ.run(&plus, &[]).unwrap();
            let sm = circ.run(&minus, &[]).unwrap();
            for (k, dk) in d.iter().enumerate() {
                let fd = (sp.amplitudes()[k] - sm.amplitudes()[k]) / (2.0 * eps);
                assert!((fd - dk).norm() < 1e-6);
            }
            let psi = circ.run(&params, &[]).unwrap();
            let overlap = inner_product(psi.amplitudes(), &d);
            assert!(overlap.re.abs() < 1e-12);
        }
    }

    #[test]
    fn evaluation_is_deterministic() {
        let circ = random_rot_circuit(4);
        let params: Vec<f64> = (0..circ.num_params()).map(|i| 0.37 * i as f64).collect();
        let a = circ.run(&params, &[]).unwrap();
        let b = circ.run(&params, &[]).unwrap();
        assert_eq!(a.amplitudes(), b.amplitudes());
    }

    #[derive(Debug, Clone)]
    enum RandGate {
        Rx(usize, f64),
        Rot(usize, f64, f64, f64),
        Cz(usize, usize),
    }

    fn gate_strategy(n: usize) -> impl Strategy<Value = RandGate> {
        let angle = -7.0..7.0f64;
        prop_oneof![
            (0..n, angle.clone()).prop_map(|(q, t)| RandGate::Rx(q, t)),
            (0..n, angle.clone(), angle.clone(), angle).prop_map(|(q, a, b, c)| RandGate::Rot(q, a, b, c)),
            (0..n, 1..n).prop_map(move |(a, d)| RandGate::Cz(a, (a + d) % n)),
        ]
    }

    fn sequence_strategy() -> impl Strategy<Value = (usize, Vec<RandGate>)> {
        (2usize..=8).prop_flat_map(|n| (Just(n), prop::collection::vec(gate_strategy(n), 1..40)))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn norm_preserved_after_every_gate((n, gates) in sequence_strategy()) {
            let mut s = StateVector::zero(n);
            for g in &gates {
                match *g {
                    RandGate::Rx(q, t) => s.apply_rx(q, t).unwrap(),
                    RandGate::Rot(q, a, b, c) => s.apply_rot(q, a, b, c).unwrap(),
                    RandGate::Cz(a, b) => s.apply_cz(a, b).unwrap(),
                }
                prop_assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
            }
        }
    }

    proptest! {
        #[test]
        fn gate_inverses((n, gates) in sequence_strategy(), q in 0usize..8, a in -7.0..7.0f64, b in -7.0..7.0f64, t in -7.0..7.0f64) {
            let q = q % n;
            let mut s = StateVector::zero(n);
            for g in &gates {
                match *g {
                    RandGate::Rx(q, t) => s.apply_rx(q, t).unwrap(),
                    RandGate::Rot(q, a, b, c) => s.apply_rot(q, a, b, c).unwrap(),
                    RandGate::Cz(a, b) => s.apply_cz(a, b).unwrap(),
                }
            }
            let start = s.clone();
            s.apply_rx(q, t).unwrap();
            s.apply_rx(q, -t).unwrap();
            assert_states_close(&s, &start, 1e-12);
            s.apply_rot(q, a, b, t).unwrap();
            s.apply_rot(q, -t, -b, -a).unwrap();
            assert_states_close(&s, &start, 1e-12);
        }

        #[test]
        fn toy_fidelity_closed_form(thetas in prop::collection::vec(0.0..(2.0 * PI), 1..=10)) {
            let n = thetas.len();
            let s = toy(n).run(&thetas, &[]).unwrap();
            let f = s.fidelity(&StateVector::zero(n)).unwrap();
            let closed: f64 = thetas.iter().map(|t| (t / 2.0).cos().powi(2)).product();
            prop_assert!((f - closed).abs() < 1e-10);
        }
    }
}
