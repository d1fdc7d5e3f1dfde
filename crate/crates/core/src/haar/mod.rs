//! Radial part of the Haar measure in spectral-form coordinates.
//!
//! Densities are unnormalized; [`normalizer`] gives the constant that turns them into
//! probability densities of the free coordinates.

mod report;
pub mod stats;
mod verify;

pub use report::{GofComponent, GofReport, HistogramRow};
pub use verify::{
    branch_labels, det_sqrt_sampler, estimate_normalizer_n4, haar_n3_sampler, n3_cell_volumes,
    verify_branch_equiprobability, verify_pair_law, verify_uniform_n3, verify_uniform_n3_with, verify_weighted_n4,
    Box6, N3Sampler, QuadratureSpec, TestFunction, DEFAULT_BOX_HALF_WIDTH, MIN_SAMPLES,
};

use crate::coset::{eig_tol, CosetError, CosetTuple, SpectralForm};
use crate::linalg::{det, sym_eigenvalues_desc};
use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HaarError {
    #[error("{got} samples requested, at least {min} required")]
    InsufficientSamples { got: usize, min: usize },
    #[error("form lies outside the PSD domain (smallest eigenvalue {min_eigenvalue:e})")]
    NotInDomain { min_eigenvalue: f64 },
    #[error("invalid test box: {0}")]
    InvalidBox(String),
    #[error("n = {n} is below the minimum {min}")]
    TooShort { n: usize, min: usize },
    #[error(transparent)]
    Coset(#[from] CosetError),
}

pub type Result<T> = std::result::Result<T, HaarError>;

/// Unnormalized density with its logarithm. `0` pairs with `-inf`, `+inf` with `+inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DensityValue {
    pub value: f64,
    pub log_value: f64,
}

impl DensityValue {
    pub const ZERO: Self = Self {
        value: 0.0,
        log_value: f64::NEG_INFINITY,
    };
    pub const ONE: Self = Self {
        value: 1.0,
        log_value: 0.0,
    };
    pub const INFINITE: Self = Self {
        value: f64::INFINITY,
        log_value: f64::INFINITY,
    };

    pub fn from_log(log_value: f64) -> Self {
        Self {
            value: log_value.exp(),
            log_value,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0.0
    }

    pub fn is_infinite(&self) -> bool {
        self.value.is_infinite()
    }
}

/// `n` independent Haar elements.
pub fn sample_tuple<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<CosetTuple> {
    Ok(CosetTuple::random(n, rng)?)
}

/// Indicator of the 3×3 PSD body (closed).
pub fn density_n3(s12: f64, s13: f64, s23: f64) -> DensityValue {
    let m = DMatrix::from_row_slice(3, 3, &[1.0, s12, s13, s12, 1.0, s23, s13, s23, 1.0]);
    let min = sym_eigenvalues_desc(m)[2];
    if min >= -eig_tol(3) {
        DensityValue::ONE
    } else {
        DensityValue::ZERO
    }
}

/// `det(Δ)^{-1/2}` for a 4×4 symmetric matrix given by rows.
fn inverse_sqrt_det(rows: Vec<Vec<f64>>) -> Result<DensityValue> {
    let k = rows.len();
    let m = DMatrix::from_fn(k, k, |i, j| rows[i][j]);
    let min = *sym_eigenvalues_desc(m).last().unwrap_or(&0.0);
    let tol = eig_tol(k);
    if min < -tol {
        return Err(HaarError::NotInDomain { min_eigenvalue: min });
    }
    let d = det(&rows);
    if min <= tol || d <= 0.0 {
        return Ok(DensityValue::INFINITE);
    }
    Ok(DensityValue::from_log(-0.5 * d.ln()))
}

pub fn density_n4(f: &SpectralForm) -> Result<DensityValue> {
    if f.n() != 4 {
        return Err(CosetError::DimensionMismatch(format!("density_n4 needs n = 4, got {}", f.n())).into());
    }
    inverse_sqrt_det(f.principal(&[0, 1, 2, 3]))
}

/// `∏_{j≥4} det(Δ_j)^{-1/2}` with `Δ_j` the principal minor on `{1, 2, 3, j}`.
pub fn sequential_density(f: &SpectralForm) -> Result<DensityValue> {
    let n = f.n();
    if n < 4 {
        return Err(HaarError::TooShort { n, min: 4 });
    }
    let mut log = 0.0;
    let mut infinite = false;
    for j in 3..n {
        let d = inverse_sqrt_det(f.principal(&[0, 1, 2, j]))?;
        infinite |= d.is_infinite();
        log += if d.is_infinite() { 0.0 } else { d.log_value };
    }
    Ok(if infinite {
        DensityValue::INFINITE
    } else {
        DensityValue::from_log(log)
    })
}

/// Constant turning the unnormalized density of the free coordinates into a
/// probability density: `2/π²` for `n = 3` (the PSD body has volume `π²/2`), and an
/// extra `1/π²` for each further row.
pub fn normalizer(n: usize) -> Result<f64> {
    if n < 3 {
        return Err(HaarError::TooShort { n, min: 3 });
    }
    Ok(2.0 * PI.powi(-2 * (n as i32 - 2)))
}
