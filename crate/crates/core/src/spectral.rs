//! Hessian eigenspectra and what they say about a point.
//!
//! [`eigendecompose`] is a cyclic Jacobi solver: it sweeps the upper triangle
//! with plane rotations until the off-diagonal Frobenius norm drops below
//! `1e-12 * ||H||_F` (at most 100 sweeps). Eigenpairs come out sorted
//! ascending, ties kept in Jacobi column order, and every eigenvector is
//! signed so its largest-magnitude component is positive.

use std::io::Write;

use nalgebra::DMatrix;

use crate::data::fmt_f64;
use crate::error::{contract, Error, Result};

const SYMMETRY_TOLERANCE: f64 = 1e-10;
const OFF_DIAGONAL_TOLERANCE: f64 = 1e-12;
const MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `i` pairs with `eigenvalues[i]`.
    pub eigenvectors: DMatrix<f64>,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn lambda_min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// Largest `|lambda|`.
    pub fn spectral_radius(&self) -> f64 {
        self.lambda_min().abs().max(self.lambda_max().abs())
    }

    pub fn eigenvector(&self, i: usize) -> Vec<f64> {
        self.eigenvectors.column(i).iter().copied().collect()
    }

    /// `1e-6 * max(1, lambda_max - lambda_min)`.
    pub fn default_tau(&self) -> f64 {
        1e-6 * (self.lambda_max() - self.lambda_min()).max(1.0)
    }

    /// Counts of eigenvalues below `-tau`, within `[-tau, tau]`, above `tau`.
    pub fn sign_counts(&self, tau: f64) -> (usize, usize, usize) {
        let neg = self.eigenvalues.iter().filter(|&&l| l < -tau).count();
        let pos = self.eigenvalues.iter().filter(|&&l| l > tau).count();
        (neg, self.len() - neg - pos, pos)
    }

    /// Index of the eigenvalue closest to zero (first on ties).
    pub fn flattest(&self) -> usize {
        let mut best = 0;
        for (i, l) in self.eigenvalues.iter().enumerate() {
            if l.abs() < self.eigenvalues[best].abs() {
                best = i;
            }
        }
        best
    }
}

pub fn eigendecompose(h: &DMatrix<f64>) -> Result<Spectrum> {
    let n = h.nrows();
    if h.ncols() != n {
        return Err(contract(format!("matrix is {}x{}, not square", n, h.ncols())));
    }
    let scale = h.abs().max().max(1.0);
    for i in 0..n {
        for j in i + 1..n {
            let d = (h[(i, j)] - h[(j, i)]).abs();
            if d > SYMMETRY_TOLERANCE * scale {
                return Err(contract(format!(
                    "matrix not symmetric: |H[{i},{j}] - H[{j},{i}]| = {d:e}"
                )));
            }
        }
    }

    let mut a = (h + h.transpose()) * 0.5;
    let mut v = DMatrix::<f64>::identity(n, n);
    let frob = a.norm();
    let target = OFF_DIAGONAL_TOLERANCE * frob;

    let mut converged = off_diagonal_norm(&a) <= target;
    let mut sweep = 0;
    while !converged && sweep < MAX_SWEEPS {
        let off = off_diagonal_norm(&a);
        // Early sweeps skip entries that are small relative to the rest.
        let threshold = if sweep < 3 {
            0.2 * off / (n * n) as f64
        } else {
            0.0
        };
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.abs() <= threshold || apq == 0.0 {
                    continue;
                }
                rotate(&mut a, &mut v, p, q);
            }
        }
        sweep += 1;
        converged = off_diagonal_norm(&a) <= target;
    }
    if !converged {
        return Err(Error::Numerical(format!(
            "Jacobi did not converge in {MAX_SWEEPS} sweeps"
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]).then(i.cmp(&j)));

    let eigenvalues = order.iter().map(|&i| a[(i, i)]).collect();
    let mut eigenvectors = DMatrix::zeros(n, n);
    for (col, &i) in order.iter().enumerate() {
        let mut lead = 0;
        for k in 0..n {
            if v[(k, i)].abs() > v[(lead, i)].abs() {
                lead = k;
            }
        }
        let sign = if v[(lead, i)] < 0.0 { -1.0 } else { 1.0 };
        for k in 0..n {
            eigenvectors[(k, col)] = sign * v[(k, i)];
        }
    }
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut sum = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            sum += 2.0 * a[(i, j)] * a[(i, j)];
        }
    }
    sum.sqrt()
}

/// Zeroes `a[p,q]` with one plane rotation and accumulates it into `v`.
fn rotate(a: &mut DMatrix<f64>, v: &mut DMatrix<f64>, p: usize, q: usize) {
    let n = a.nrows();
    let apq = a[(p, q)];
    let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    a[(p, p)] -= t * apq;
    a[(q, q)] += t * apq;
    a[(p, q)] = 0.0;
    a[(q, p)] = 0.0;
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let (akp, akq) = (a[(k, p)], a[(k, q)]);
        let new_p = c * akp - s * akq;
        let new_q = s * akp + c * akq;
        a[(k, p)] = new_p;
        a[(p, k)] = new_p;
        a[(k, q)] = new_q;
        a[(q, k)] = new_q;
    }
    for k in 0..n {
        let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StationaryLabel {
    Minimum,
    Maximum,
    Saddle,
    Plateau,
    NonStationary,
}

impl StationaryLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Minimum => "minimum",
            Self::Maximum => "maximum",
            Self::Saddle => "saddle",
            Self::Plateau => "plateau",
            Self::NonStationary => "non-stationary",
        }
    }
}

impl std::fmt::Display for StationaryLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StationaryClass {
    pub label: StationaryLabel,
    /// `max_i |grad_i|`.
    pub grad_norm: f64,
    pub negative: usize,
    pub zero: usize,
    pub positive: usize,
    pub tau: f64,
}

pub fn classify_stationary(grad: &[f64], spectrum: &Spectrum, tau: f64) -> StationaryClass {
    let grad_norm = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
    let (negative, zero, positive) = spectrum.sign_counts(tau);
    let label = if grad_norm > tau {
        StationaryLabel::NonStationary
    } else if negative == 0 && positive == 0 {
        StationaryLabel::Plateau
    } else if negative == 0 {
        StationaryLabel::Minimum
    } else if positive == 0 {
        StationaryLabel::Maximum
    } else {
        StationaryLabel::Saddle
    };
    StationaryClass {
        label,
        grad_norm,
        negative,
        zero,
        positive,
        tau,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationPoint {
    pub epsilon: f64,
    pub loss: f64,
    /// `l(theta) + lambda eps^2 / 2` when an eigenvalue was supplied.
    pub quadratic_model: Option<f64>,
}

/// Evaluates `loss(theta + eps * direction)` along `eps_grid`.
pub fn perturbation_scan<F>(
    loss: F,
    params: &[f64],
    direction: &[f64],
    eps_grid: &[f64],
    eigenvalue: Option<f64>,
) -> Result<Vec<PerturbationPoint>>
where
    F: Fn(&[f64]) -> f64,
{
    if direction.len() != params.len() {
        return Err(contract("direction and parameters differ in length"));
    }
    let norm = direction.iter().map(|d| d * d).sum::<f64>().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(contract(format!("direction has norm {norm}, expected 1")));
    }
    let base = loss(params);
    let mut work = params.to_vec();
    Ok(eps_grid
        .iter()
        .map(|&epsilon| {
            let loss_at = if epsilon == 0.0 {
                base
            } else {
                for (w, (p, d)) in work.iter_mut().zip(params.iter().zip(direction)) {
                    *w = p + epsilon * d;
                }
                loss(&work)
            };
            PerturbationPoint {
                epsilon,
                loss: loss_at,
                quadratic_model: eigenvalue.map(|l| base + 0.5 * l * epsilon * epsilon),
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesRow {
    pub epoch: usize,
    /// Position in ascending order, from 0.
    pub rank: usize,
    pub eigenvalue: f64,
}

/// Long-format `(epoch, rank, eigenvalue)` rows.
pub fn spectrum_series(snapshots: &[(usize, Spectrum)]) -> Result<Vec<SeriesRow>> {
    if snapshots.is_empty() {
        return Err(contract("no spectrum snapshots"));
    }
    Ok(snapshots
        .iter()
        .flat_map(|(epoch, s)| {
            s.eigenvalues.iter().enumerate().map(move |(rank, &eigenvalue)| SeriesRow {
                epoch: *epoch,
                rank,
                eigenvalue,
            })
        })
        .collect())
}

/// CSV `epoch,rank,eigenvalue`.
pub fn write_series_csv<W: Write>(rows: &[SeriesRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["epoch", "rank", "eigenvalue"])?;
    for r in rows {
        w.write_record([r.epoch.to_string(), r.rank.to_string(), fmt_f64(r.eigenvalue)])?;
    }
    w.flush()?;
    Ok(())
}

/// CSV `rank,eigenvalue` for a single spectrum.
pub fn write_spectrum_csv<W: Write>(spectrum: &Spectrum, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["rank", "eigenvalue"])?;
    for (rank, l) in spectrum.eigenvalues.iter().enumerate() {
        w.write_record([rank.to_string(), fmt_f64(*l)])?;
    }
    w.flush()?;
    Ok(())
}

/// CSV `epsilon,loss,quadratic_model`; the model column is empty when no
/// eigenvalue was supplied.
pub fn write_perturbation_csv<W: Write>(points: &[PerturbationPoint], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["epsilon", "loss", "quadratic_model"])?;
    for p in points {
        w.write_record([
            fmt_f64(p.epsilon),
            fmt_f64(p.loss),
            p.quadratic_model.map(fmt_f64).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn random_symmetric(n: usize, seed: u64) -> DMatrix<f64> {
        let mut rng = SeededRng::new(seed);
        let m = DMatrix::from_fn(n, n, |_, _| rng.uniform_range(-1.0, 1.0));
        (&m + m.transpose()) * 0.5
    }

    fn check_decomposition(h: &DMatrix<f64>, s: &Spectrum) {
        let n = h.nrows();
        let v = &s.eigenvectors;
        let vtv = v.transpose() * v;
        assert!((vtv - DMatrix::identity(n, n)).abs().max() < 1e-10);
        for i in 0..n {
            let vi = v.column(i);
            let resid = (h * vi - vi * s.eigenvalues[i]).abs().max();
            assert!(resid < 1e-8 * s.eigenvalues[i].abs().max(1.0));
        }
        let recon = v * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(s.eigenvalues.clone())) * v.transpose();
        let scale = h.abs().max();
        assert!((recon - h).abs().max() < 1e-8 * scale.max(f64::MIN_POSITIVE));
        let trace: f64 = s.eigenvalues.iter().sum();
        assert!((trace - h.trace()).abs() < 1e-9 * scale.max(f64::MIN_POSITIVE));
        assert!(s.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn scaled_identity() {
        let h = DMatrix::<f64>::identity(6, 6) * 0.5;
        let s = eigendecompose(&h).unwrap();
        assert!(s.eigenvalues.iter().all(|&l| l == 0.5));
        assert_eq!(s.eigenvectors, DMatrix::identity(6, 6));
    }

    #[test]
    fn diagonal_matrix() {
        let h = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, -1.0, 0.0]));
        let s = eigendecompose(&h).unwrap();
        assert_eq!(s.eigenvalues, vec![-1.0, 0.0, 2.0]);
        assert_eq!(s.eigenvector(0), vec![0.0, 1.0, 0.0]);
        assert_eq!(s.eigenvector(1), vec![0.0, 0.0, 1.0]);
        assert_eq!(s.eigenvector(2), vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn swap_matrix() {
        let h = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let s = eigendecompose(&h).unwrap();
        assert_abs_diff_eq!(s.eigenvalues[0], -1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(s.eigenvalues[1], 1.0, epsilon = 1e-15);
        check_decomposition(&h, &s);
    }

    #[test]
    fn rejects_bad_input() {
        let h = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.1, 0.0]);
        assert!(matches!(eigendecompose(&h), Err(Error::Contract(_))));
        assert!(eigendecompose(&DMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn zero_matrix_and_empty() {
        let s = eigendecompose(&DMatrix::zeros(4, 4)).unwrap();
        assert_eq!(s.eigenvalues, vec![0.0; 4]);
        assert!(eigendecompose(&DMatrix::zeros(0, 0)).unwrap().is_empty());
    }

    #[test]
    fn random_matrices_decompose() {
        for (n, seed) in [(5, 1), (17, 2), (48, 3), (96, 4)] {
            let h = random_symmetric(n, seed);
            check_decomposition(&h, &eigendecompose(&h).unwrap());
        }
    }

    #[test]
    fn matches_reference_solver() {
        let h = random_symmetric(30, 9);
        let mut ours = eigendecompose(&h).unwrap().eigenvalues;
        let mut theirs: Vec<f64> = h.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        ours.sort_by(f64::total_cmp);
        theirs.sort_by(f64::total_cmp);
        for (a, b) in ours.iter().zip(&theirs) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn deterministic_with_sign_convention() {
        let h = random_symmetric(20, 6);
        let a = eigendecompose(&h).unwrap();
        let b = eigendecompose(&h).unwrap();
        assert_eq!(a, b);
        for i in 0..20 {
            let col = a.eigenvector(i);
            let lead = col.iter().copied().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
            assert!(lead > 0.0);
        }
    }

    #[test]
    fn classification_examples() {
        let spec = |v: Vec<f64>| Spectrum {
            eigenvectors: DMatrix::identity(v.len(), v.len()),
            eigenvalues: v,
        };
        let c = classify_stationary(&[0.0; 3], &spec(vec![0.5; 3]), 1e-6);
        assert_eq!(c.label, StationaryLabel::Minimum);
        let c = classify_stationary(&[0.0; 3], &spec(vec![-1e-9, 0.0, 1e-9]), 1e-6);
        assert_eq!(c.label, StationaryLabel::Plateau);
        let c = classify_stationary(&[0.0; 3], &spec(vec![-0.3, 0.0, 0.4]), 1e-6);
        assert_eq!((c.label, c.negative, c.zero, c.positive), (StationaryLabel::Saddle, 1, 1, 1));
        let c = classify_stationary(&[0.0; 2], &spec(vec![-0.3, -0.1]), 1e-6);
        assert_eq!(c.label, StationaryLabel::Maximum);
        let c = classify_stationary(&[1e-3, 0.0], &spec(vec![0.3, 0.1]), 1e-6);
        assert_eq!(c.label, StationaryLabel::NonStationary);
    }

    #[test]
    fn perturbation_scan_basics() {
        let loss = |p: &[f64]| 0.5 * 3.0 * p[0] * p[0] + 0.1;
        let pts = perturbation_scan(loss, &[0.0, 0.0], &[1.0, 0.0], &[-0.1, 0.0, 0.2], Some(3.0)).unwrap();
        assert_eq!(pts[1].loss, 0.1);
        for p in &pts {
            assert_abs_diff_eq!(p.loss, p.quadratic_model.unwrap(), epsilon = 1e-15);
        }
        assert!(perturbation_scan(loss, &[0.0, 0.0], &[1.0, 1.0], &[0.1], None).is_err());
    }

    #[test]
    fn series_rows_and_csv() {
        let s = eigendecompose(&random_symmetric(4, 1)).unwrap();
        let rows = spectrum_series(&[(0, s.clone())]).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(spectrum_series(&[]).is_err());
        let mut buf = Vec::new();
        write_series_csv(&rows, &mut buf).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("epoch,rank,eigenvalue\n0,0,"));
    }

    proptest! {
        #[test]
        fn invariants_hold_for_random_matrices(n in 1usize..24, seed in any::<u64>()) {
            let h = random_symmetric(n, seed);
            check_decomposition(&h, &eigendecompose(&h).unwrap());
        }
    }
}
