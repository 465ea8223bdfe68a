//! Independent entropy references: Markov partitions, Perron roots, and the
//! closed form for uniform maps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map_model::{AdmissiblePair, IntervalMap};

pub use crate::kneading::entropy_estimate_wordcount;

const POWER_ITERATION_CAP: usize = 10_000;
const SQUARINGS: u32 = 6;

/// Dominant eigenvalue of a non-negative square matrix.
///
/// Plain power iteration first. Periodic or reducible matrices can make the
/// norm ratio oscillate; then the matrix is shifted to `A + I` (same Perron
/// vector, every eigenvalue moved right by one, so the dominant one is
/// isolated), squared up to 2^6 times, and iterated again.
pub fn spectral_radius(matrix: &[Vec<f64>], tol: f64) -> Result<f64> {
    let n = matrix.len();
    if n == 0 || matrix.iter().any(|row| row.len() != n) {
        return Err(Error::BadMatrix);
    }
    if matrix.iter().flatten().any(|&v| !(v >= 0.0 && v.is_finite())) {
        return Err(Error::BadMatrix);
    }
    if matrix.iter().flatten().all(|&v| v == 0.0) {
        return Ok(0.0);
    }
    if let Some(rho) = power_iteration(matrix, tol) {
        return Ok(rho);
    }

    let mut b: Vec<Vec<f64>> = matrix.to_vec();
    for (i, row) in b.iter_mut().enumerate() {
        row[i] += 1.0;
    }
    // track log of the scale removed while squaring
    let mut log_scale = 0.0;
    for _ in 0..SQUARINGS {
        b = mat_mul(&b, &b);
        let max = b.iter().flatten().fold(0.0f64, |m, &v| m.max(v));
        b.iter_mut().flatten().for_each(|v| *v /= max);
        log_scale = 2.0 * log_scale + max.ln();
    }
    let rho_power = power_iteration(&b, tol * 1e-3)
        .ok_or_else(|| Error::OracleUnavailable("power iteration did not converge on the shifted matrix".into()))?;
    let power = f64::from(1u32 << SQUARINGS);
    let rho_shifted = ((rho_power.ln() + log_scale) / power).exp();
    Ok(rho_shifted - 1.0)
}

fn mat_mul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut out = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i][k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

/// Norm-ratio power iteration from the all-ones vector; `None` if the ratio
/// has not settled after the iteration cap.
fn power_iteration(matrix: &[Vec<f64>], tol: f64) -> Option<f64> {
    let n = matrix.len();
    let mut v = vec![1.0 / n as f64; n];
    let mut previous = f64::NAN;
    for _ in 0..POWER_ITERATION_CAP {
        let w: Vec<f64> = matrix.iter().map(|row| row.iter().zip(&v).map(|(a, x)| a * x).sum()).collect();
        let norm: f64 = w.iter().sum();
        if norm == 0.0 {
            return Some(0.0);
        }
        // v has unit l1 norm, so the ratio is just |w|
        let rho = norm;
        v = w.into_iter().map(|x| x / norm).collect();
        if (rho - previous).abs() < tol * rho.max(1.0) {
            return Some(rho);
        }
        previous = rho;
    }
    None
}

/// A finite partition of [0, 1] whose cells map onto unions of cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkovPartitionModel {
    pub interval_endpoints: Vec<f64>,
    pub adjacency: Vec<Vec<u8>>,
}

impl MarkovPartitionModel {
    pub fn matrix(&self) -> Vec<Vec<f64>> {
        self.adjacency.iter().map(|row| row.iter().map(|&v| f64::from(v)).collect()).collect()
    }

    pub fn spectral_radius(&self) -> Result<f64> {
        spectral_radius(&self.matrix(), 1e-13)
    }

    pub fn entropy(&self) -> Result<f64> {
        Ok(self.spectral_radius()?.max(1.0).ln())
    }
}

pub const MARKOV_TOL: f64 = 1e-9;

fn find_close(points: &[f64], x: f64) -> Option<usize> {
    points.iter().position(|&p| (p - x).abs() <= MARKOV_TOL)
}

/// Builds the partition from the forward orbits of both critical values.
///
/// An orbit stops when it comes back within `1e-9` of a point already in the
/// partition (including `0`, `q`, `1`); if either orbit runs `n_detect` steps
/// without doing so the map is treated as non-Markov.
pub fn build_markov<M: IntervalMap + ?Sized>(map: &M, n_detect: usize) -> Result<MarkovPartitionModel> {
    let q = map.critical_point();
    let mut points = vec![0.0, q, 1.0];
    for symbol in [0u8, 1] {
        let mut x = map.branch(symbol, q)?;
        let mut closed = false;
        for _ in 0..n_detect {
            if find_close(&points, x).is_some() {
                closed = true;
                break;
            }
            points.push(x);
            let side = u8::from(x > q);
            x = map.branch(side, x)?;
        }
        if !closed {
            return Err(Error::NotMarkov(format!("orbit of f{symbol}(q) did not recur within {n_detect} steps")));
        }
    }
    points.sort_by(f64::total_cmp);

    let cells = points.len() - 1;
    let mut adjacency = vec![vec![0u8; cells]; cells];
    for i in 0..cells {
        let (lo, hi) = (points[i], points[i + 1]);
        let side = u8::from(lo >= q);
        let (img_lo, img_hi) = (map.branch(side, lo)?, map.branch(side, hi)?);
        let (Some(from), Some(to)) = (find_close(&points, img_lo), find_close(&points, img_hi)) else {
            return Err(Error::NotMarkov(format!(
                "image [{img_lo}, {img_hi}] of cell [{lo}, {hi}] does not end on partition points"
            )));
        };
        let (from, to) = (from.min(to), from.max(to));
        for cell in adjacency[i].iter_mut().take(to).skip(from) {
            *cell = 1;
        }
    }
    Ok(MarkovPartitionModel { interval_endpoints: points, adjacency })
}

/// `h(U±_{a,p}) = ln a`.
pub fn parry_reference(pair: &AdmissiblePair) -> f64 {
    pair.a().ln()
}
