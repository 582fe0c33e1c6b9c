//! Distribution-map statistics: central moments and Shannon entropy.

use crate::error::{Error, Result};

const MASS_TOL: f64 = 1e-9;

/// Dense row-major 2D histogram.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    rows: usize,
    cols: usize,
    cells: Vec<f64>,
}

impl Grid {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Grid {
            rows,
            cols,
            cells: vec![0.0; rows * cols],
        }
    }

    pub fn from_cells(rows: usize, cols: usize, cells: Vec<f64>) -> Result<Self> {
        if cells.len() != rows * cols {
            return Err(Error::invalid(format!(
                "{} cells for a {rows}×{cols} grid",
                cells.len()
            )));
        }
        Ok(Grid { rows, cols, cells })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn cells(&self) -> &[f64] {
        &self.cells
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.cells[i * self.cols + j]
    }

    pub fn add(&mut self, i: usize, j: usize, w: f64) {
        self.cells[i * self.cols + j] += w;
    }

    pub fn sum(&self) -> f64 {
        self.cells.iter().sum()
    }

    /// Scale to unit mass; an all-zero grid stays zero.
    pub fn normalize(&mut self) {
        let s = self.sum();
        if s > 0.0 {
            self.cells.iter_mut().for_each(|c| *c /= s);
        }
    }

    fn check_distribution(&self) -> Result<()> {
        if let Some(c) = self.cells.iter().find(|c| !(**c >= 0.0)) {
            return Err(Error::invalid(format!(
                "grid has a negative or NaN cell ({c})"
            )));
        }
        let s = self.sum();
        if (s - 1.0).abs() > MASS_TOL {
            return Err(Error::invalid(format!("grid mass is {s}, expected 1")));
        }
        Ok(())
    }
}

/// Mass-weighted mean row and column, 1-based.
fn mean_indices(d: &Grid) -> (f64, f64) {
    let mut ib = 0.0;
    let mut jb = 0.0;
    for i in 0..d.rows {
        for j in 0..d.cols {
            let w = d.get(i, j);
            ib += (i + 1) as f64 * w;
            jb += (j + 1) as f64 * w;
        }
    }
    (ib, jb)
}

/// Central moment `μ_mn = Σ (i − ī)^m (j − j̄)^n D(i, j)` with 1-based indices.
pub fn central_moment(d: &Grid, m: u32, n: u32) -> Result<f64> {
    if m + n == 0 {
        return Err(Error::invalid("moment order m + n must be at least 1"));
    }
    d.check_distribution()?;
    Ok(central_moment_unchecked(d, m, n))
}

pub(crate) fn central_moment_unchecked(d: &Grid, m: u32, n: u32) -> f64 {
    let (ib, jb) = mean_indices(d);
    let mut mu = 0.0;
    for i in 0..d.rows {
        let di = ((i + 1) as f64 - ib).powi(m as i32);
        for j in 0..d.cols {
            let w = d.get(i, j);
            if w != 0.0 {
                mu += di * ((j + 1) as f64 - jb).powi(n as i32) * w;
            }
        }
    }
    mu
}

/// Shannon entropy with the natural logarithm and `0·ln 0 = 0`.
pub fn shannon_entropy(d: &Grid) -> Result<f64> {
    d.check_distribution()?;
    Ok(shannon_entropy_unchecked(d))
}

pub(crate) fn shannon_entropy_unchecked(d: &Grid) -> f64 {
    -d.cells
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.ln())
        .sum::<f64>()
}
