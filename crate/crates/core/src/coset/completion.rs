//! Rank-4 completion of a partially known spectral form.
//!
//! With the first three rows known, a missing entry `s_ij` is pinned down up to two
//! values by the vanishing of the 5×5 principal minor on `{0, 1, 2, i, j}`; the two
//! values correspond to reflecting `g_j` through the hyperplane spanned by `g₁, g₂, g₃`.

use nalgebra::{DMatrix, Matrix3, Rotation3, UnitQuaternion as NaQuaternion};

use super::form::{upper_index, upper_len};
use super::{eig_tol, validate_form, CosetError, Result, SpectralForm};
use crate::linalg::{det, sym_eigenvalues_desc};
use crate::su2::UnitQuaternion;

const DISCRIMINANT_TOL: f64 = 1e-9;
const LEADING_TOL: f64 = 1e-12;
/// Discriminants below this are treated as a double root.
const DOUBLE_ROOT_TOL: f64 = 1e-14;

/// A symmetric unit-diagonal matrix with some off-diagonal entries unknown.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialForm {
    n: usize,
    upper: Vec<Option<f64>>,
}

impl PartialForm {
    pub fn unknown(n: usize) -> Self {
        Self {
            n,
            upper: vec![None; upper_len(n)],
        }
    }

    /// Keeps the entries `(k, j)` with `k < rows`, blanks the rest.
    pub fn first_rows(f: &SpectralForm, rows: usize) -> Self {
        let n = f.n();
        let mut p = Self::unknown(n);
        for i in 0..rows.min(n) {
            for j in i + 1..n {
                p.set(i, j, f.get(i, j));
            }
        }
        p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> Option<f64> {
        if i == j {
            return Some(1.0);
        }
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        self.upper[upper_index(self.n, i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        self.upper[upper_index(self.n, i, j)] = Some(v);
    }

    pub fn blank(&mut self, i: usize, j: usize) {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        self.upper[upper_index(self.n, i, j)] = None;
    }

    fn require(&self, i: usize, j: usize) -> Result<f64> {
        self.get(i, j).ok_or(CosetError::MissingEntry { i, j })
    }

    pub fn to_form(&self) -> Result<SpectralForm> {
        let mut upper = Vec::with_capacity(self.upper.len());
        for i in 0..self.n {
            for j in i + 1..self.n {
                upper.push(self.require(i, j)?);
            }
        }
        SpectralForm::from_upper(self.n, upper)
    }
}

impl From<&SpectralForm> for PartialForm {
    fn from(f: &SpectralForm) -> Self {
        Self::first_rows(f, f.n())
    }
}

/// Real roots of the minor quadratic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MinorRoots {
    /// Two roots, ascending.
    Two(f64, f64),
    /// The reflection fixes the configuration; one root.
    Double(f64),
}

impl MinorRoots {
    pub fn roots(&self) -> Vec<f64> {
        match *self {
            MinorRoots::Two(a, b) => vec![a, b],
            MinorRoots::Double(a) => vec![a],
        }
    }

    /// Index (0 = lower, 1 = upper) of the root closest to `x`.
    pub fn closest(&self, x: f64) -> usize {
        match *self {
            MinorRoots::Two(a, b) => usize::from((b - x).abs() < (a - x).abs()),
            MinorRoots::Double(_) => 0,
        }
    }
}

/// Roots of `det M(x) = 0` where `M` is the principal submatrix on `{0, 1, 2, i, j}`
/// with `s_ij = x`. Every other entry of that submatrix must be known.
pub fn solve_minor_quadratic(f: &PartialForm, i: usize, j: usize) -> Result<MinorRoots> {
    let n = f.n();
    if i == j || i < 3 || j < 3 || i >= n || j >= n {
        return Err(CosetError::DimensionMismatch(format!(
            "minor indices ({i}, {j}) must be distinct and in 3..{n}"
        )));
    }
    let idx = [0, 1, 2, i, j];
    let mut base = vec![vec![0.0; 5]; 5];
    for a in 0..5 {
        for b in 0..5 {
            if (a, b) == (3, 4) || (a, b) == (4, 3) {
                continue;
            }
            base[a][b] = f.require(idx[a], idx[b])?;
        }
    }
    let det_at = |x: f64| {
        let mut m = base.clone();
        m[3][4] = x;
        m[4][3] = x;
        det(&m)
    };
    // det M(x) is exactly quadratic in x; interpolate at −1, 0, 1
    let (dm, d0, dp) = (det_at(-1.0), det_at(0.0), det_at(1.0));
    let a = (dp + dm) / 2.0 - d0;
    let b = (dp - dm) / 2.0;
    let c = d0;
    if a.abs() < LEADING_TOL {
        return Err(CosetError::DegenerateQuadratic { leading: a });
    }
    let disc = b * b - 4.0 * a * c;
    if disc < -DISCRIMINANT_TOL {
        return Err(CosetError::ComplexRoots { discriminant: disc });
    }
    if disc <= DOUBLE_ROOT_TOL {
        return Ok(MinorRoots::Double(-b / (2.0 * a)));
    }
    let sq = disc.sqrt();
    let q = -0.5 * (b + b.signum() * sq);
    let (r1, r2) = if q == 0.0 {
        (sq / (2.0 * a), -sq / (2.0 * a))
    } else {
        (q / a, c / q)
    };
    Ok(MinorRoots::Two(r1.min(r2), r1.max(r2)))
}

/// What [`complete_form`] does when both roots keep the grown matrix at rank 4.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    #[default]
    Error,
    Lower,
    Upper,
}

/// Sum of `|λ_k|` for `k ≥ 5` (descending order): distance from rank ≤ 4.
fn excess_rank(f: &PartialForm, idx: &[usize], i: usize, j: usize, x: f64) -> Result<f64> {
    let k = idx.len();
    let mut m = DMatrix::zeros(k, k);
    for a in 0..k {
        for b in 0..k {
            let (u, v) = (idx[a], idx[b]);
            m[(a, b)] = if (u, v) == (i, j) || (u, v) == (j, i) {
                x
            } else {
                f.require(u, v)?
            };
        }
    }
    Ok(sym_eigenvalues_desc(m).iter().skip(4).map(|l| l.abs()).sum())
}

/// Fills every `s_ij`, `4 ≤ i < j` (0-based), from the first four rows.
pub fn complete_form(rows: &PartialForm, tie: TieBreak) -> Result<SpectralForm> {
    let n = rows.n();
    if n < 4 {
        return Err(CosetError::TooShort { n, min: 4 });
    }
    for i in 0..4 {
        for j in i + 1..n {
            rows.require(i, j)?;
        }
    }
    let top = DMatrix::from_fn(4, 4, |a, b| rows.get(a, b).unwrap());
    let lambda_min = *sym_eigenvalues_desc(top).last().unwrap();
    if lambda_min <= eig_tol(4) {
        return Err(CosetError::RankDeficientBlock { lambda_min });
    }
    let mut out = rows.clone();
    let tol = eig_tol(6);
    for i in 4..n {
        for j in i + 1..n {
            let value = match solve_minor_quadratic(&out, i, j)? {
                MinorRoots::Double(x) => x,
                MinorRoots::Two(lo, hi) => {
                    let idx = [0, 1, 2, 3, i, j];
                    let e_lo = excess_rank(&out, &idx, i, j, lo)?;
                    let e_hi = excess_rank(&out, &idx, i, j, hi)?;
                    if e_lo <= tol && e_hi <= tol {
                        match tie {
                            TieBreak::Error => return Err(CosetError::AmbiguousBranch { i, j }),
                            TieBreak::Lower => lo,
                            TieBreak::Upper => hi,
                        }
                    } else if e_lo <= e_hi {
                        lo
                    } else {
                        hi
                    }
                }
            };
            out.set(i, j, value);
        }
    }
    let form = out.to_form()?;
    let report = validate_form(&form);
    if !report.pass {
        return Err(CosetError::InconsistentCompletion(report.failures().join("; ")));
    }
    Ok(form)
}

/// An `h` with `h⁻¹ g h = gᵗ` for both `g₂` and `g₃`.
///
/// Conjugation by `h⁻¹` rotates imaginary parts; transposition reflects the `b_re`
/// axis. The rotation sending `(u₂, u₃)` to their reflections is assembled from
/// orthonormal frames. Returns `None` if the imaginary parts of `g₂`, `g₃` are not
/// linearly independent.
pub fn reflection_conjugator(g2: UnitQuaternion, g3: UnitQuaternion) -> Option<UnitQuaternion> {
    let u2 = nalgebra::Vector3::from(g2.vector_part());
    let u3 = nalgebra::Vector3::from(g3.vector_part());
    let reflect = |v: nalgebra::Vector3<f64>| nalgebra::Vector3::new(v.x, -v.y, v.z);
    let frame = |a: nalgebra::Vector3<f64>, b: nalgebra::Vector3<f64>| -> Option<Matrix3<f64>> {
        let e1 = a.try_normalize(1e-12)?;
        let e2 = (b - e1 * e1.dot(&b)).try_normalize(1e-9)?;
        let e3 = e1.cross(&e2);
        Some(Matrix3::from_columns(&[e1, e2, e3]))
    };
    let src = frame(u2, u3)?;
    let dst = frame(reflect(u2), reflect(u3))?;
    let rot = Rotation3::from_matrix_unchecked(dst * src.transpose());
    let k = NaQuaternion::from_rotation_matrix(&rot);
    // k·v·k⁻¹ = R v, and h = k⁻¹
    let kq = UnitQuaternion::from_components([k.w, k.i, k.j, k.k]);
    Some(kq.inverse())
}
