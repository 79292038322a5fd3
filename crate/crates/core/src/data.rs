//! Circle classification data and prediction grids.
//!
//! Points are uniform on `[-1, 1]^2`. A point is labelled `-1` strictly inside
//! the disk of radius `sqrt(2/pi)` and `+1` otherwise (the boundary is
//! exterior). The disk covers half of the square, so labels are balanced in
//! expectation.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{contract, Result};
use crate::rng::SeededRng;

/// Squared radius of the class boundary, `2 / pi`.
pub const RADIUS_SQ: f64 = 2.0 / std::f64::consts::PI;

/// Label rule: `-1` inside the disk, `+1` on or outside the boundary.
pub fn circle_label(x1: f64, x2: f64) -> i8 {
    if x1 * x1 + x2 * x2 < RADIUS_SQ {
        -1
    } else {
        1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub points: Vec<[f64; 2]>,
    pub labels: Vec<i8>,
    pub seed: u64,
}

impl Dataset {
    pub fn from_points(points: Vec<[f64; 2]>, seed: u64) -> Self {
        let labels = points.iter().map(|p| circle_label(p[0], p[1])).collect();
        Self {
            points,
            labels,
            seed,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = ([f64; 2], i8)> + '_ {
        self.points.iter().copied().zip(self.labels.iter().copied())
    }

    /// Fraction of points labelled `-1`.
    pub fn negative_fraction(&self) -> f64 {
        let neg = self.labels.iter().filter(|&&y| y < 0).count();
        neg as f64 / self.len().max(1) as f64
    }

    /// Concatenates two datasets, keeping `self`'s seed.
    pub fn union(&self, other: &Dataset) -> Dataset {
        let mut out = self.clone();
        out.points.extend_from_slice(&other.points);
        out.labels.extend_from_slice(&other.labels);
        out
    }

    /// CSV `x1,x2,label` with 17 significant digits per float.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x1", "x2", "label"])?;
        for ([x1, x2], y) in self.iter() {
            w.write_record([fmt_f64(x1), fmt_f64(x2), y.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads the CSV written by [`Dataset::write_csv`]; `#` lines are comments.
    pub fn read_csv<R: Read>(input: R, seed: u64) -> Result<Dataset> {
        let mut r = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .from_reader(input);
        let mut points = Vec::new();
        let mut labels = Vec::new();
        for record in r.deserialize() {
            let (x1, x2, y): (f64, f64, i8) = record?;
            if y != 1 && y != -1 {
                return Err(contract(format!("label {y} is not +-1")));
            }
            points.push([x1, x2]);
            labels.push(y);
        }
        Ok(Dataset {
            points,
            labels,
            seed,
        })
    }

    pub fn read_csv_file(path: &Path, seed: u64) -> Result<Dataset> {
        Self::read_csv(std::fs::File::open(path)?, seed)
    }
}

/// Formats with 17 significant digits (lossless for `f64`).
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Draws `n` points uniformly from `[-1, 1]^2` and labels them.
pub fn generate_circle_dataset(n: usize, seed: u64) -> Result<Dataset> {
    if n == 0 {
        return Err(contract("dataset size must be at least 1"));
    }
    let mut rng = SeededRng::new(seed);
    let points = (0..n)
        .map(|_| {
            let x1 = rng.uniform_range(-1.0, 1.0);
            let x2 = rng.uniform_range(-1.0, 1.0);
            [x1, x2]
        })
        .collect();
    Ok(Dataset::from_points(points, seed))
}

/// Shuffles with `seed` and puts the first `round(fraction * n)` points in
/// the first half.
pub fn train_test_split(dataset: &Dataset, fraction: f64, seed: u64) -> Result<(Dataset, Dataset)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(contract(format!("split fraction {fraction} not in (0, 1)")));
    }
    let mut order: Vec<usize> = (0..dataset.len()).collect();
    SeededRng::new(seed).shuffle(&mut order);
    let cut = (fraction * dataset.len() as f64).round() as usize;
    let take = |idx: &[usize]| Dataset {
        points: idx.iter().map(|&i| dataset.points[i]).collect(),
        labels: idx.iter().map(|&i| dataset.labels[i]).collect(),
        seed: dataset.seed,
    };
    Ok((take(&order[..cut]), take(&order[cut..])))
}

/// Model output on a uniform grid over `[-1, 1]^2`.
///
/// Cell `(i, j)` sits at `x1 = -1 + 2i/(r-1)`, `x2 = -1 + 2j/(r-1)` and is
/// stored at `values[i * r + j]` (row-major, `x1` outer).
#[derive(Debug, Clone, PartialEq)]
pub struct PredictionGrid {
    pub resolution: usize,
    pub values: Vec<f64>,
}

impl PredictionGrid {
    pub fn coordinate(&self, i: usize) -> f64 {
        grid_coordinate(i, self.resolution)
    }

    pub fn cells(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let r = self.resolution;
        self.values
            .iter()
            .enumerate()
            .map(move |(k, &v)| (grid_coordinate(k / r, r), grid_coordinate(k % r, r), v))
    }

    /// Fraction of cells where `sign(value)` matches [`circle_label`].
    pub fn label_agreement(&self) -> f64 {
        let hits = self
            .cells()
            .filter(|&(x1, x2, v)| sign_label(v) == circle_label(x1, x2))
            .count();
        hits as f64 / self.values.len() as f64
    }

    /// CSV `x1,x2,expectation_z`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["x1", "x2", "expectation_z"])?;
        for (x1, x2, v) in self.cells() {
            w.write_record([fmt_f64(x1), fmt_f64(x2), fmt_f64(v)])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn grid_coordinate(i: usize, resolution: usize) -> f64 {
    if i + 1 == resolution {
        1.0
    } else {
        -1.0 + 2.0 * i as f64 / (resolution - 1) as f64
    }
}

/// Predicted label from a readout value: `+1` for `v >= 0`.
pub fn sign_label(v: f64) -> i8 {
    if v >= 0.0 {
        1
    } else {
        -1
    }
}

pub fn prediction_map<F>(evaluator: F, resolution: usize) -> Result<PredictionGrid>
where
    F: Fn(f64, f64) -> f64,
{
    if resolution < 2 {
        return Err(contract("prediction grid needs resolution >= 2"));
    }
    let mut values = Vec::with_capacity(resolution * resolution);
    for i in 0..resolution {
        for j in 0..resolution {
            values.push(evaluator(
                grid_coordinate(i, resolution),
                grid_coordinate(j, resolution),
            ));
        }
    }
    Ok(PredictionGrid { resolution, values })
}

/// Fraction of points where `sign(prediction)` equals the label.
pub fn accuracy<F>(dataset: &Dataset, predict: F) -> f64
where
    F: Fn([f64; 2]) -> f64,
{
    if dataset.is_empty() {
        return 0.0;
    }
    let hits = dataset
        .iter()
        .filter(|&(x, y)| sign_label(predict(x)) == y)
        .count();
    hits as f64 / dataset.len() as f64
}
