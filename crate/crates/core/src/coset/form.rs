use nalgebra::{DMatrix, Matrix4};
use serde::{Deserialize, Serialize};

use super::{eig_tol, CosetError, CosetTuple, Result, BORDERLINE_TOL, EQUIV_TOL};
use crate::linalg::{oriented_volume, sym_eigenvalues_desc};

/// Off-diagonal entries may exceed 1 in magnitude by this much.
const ENTRY_BOUND_TOL: f64 = 1e-12;

/// Quadruples with `|det| ≥` this floor fix the orientation sign.
const SHEET_VOLUME_FLOOR: f64 = 1e-6;

/// Symmetric `n × n` matrix with unit diagonal, stored as its strict upper triangle
/// in row-major order `s₁₂, s₁₃, …, s₁ₙ, s₂₃, …`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FormRecord", into = "FormRecord")]
pub struct SpectralForm {
    n: usize,
    upper: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FormRecord {
    n: usize,
    upper: Vec<f64>,
}

impl TryFrom<FormRecord> for SpectralForm {
    type Error = CosetError;

    fn try_from(r: FormRecord) -> Result<Self> {
        SpectralForm::from_upper(r.n, r.upper)
    }
}

impl From<SpectralForm> for FormRecord {
    fn from(f: SpectralForm) -> Self {
        FormRecord { n: f.n, upper: f.upper }
    }
}

pub(crate) fn upper_len(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Position of `(i, j)`, `i < j`, in the strict upper triangle.
pub(crate) fn upper_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i < j && j < n);
    i * (2 * n - i - 1) / 2 + (j - i - 1)
}

impl SpectralForm {
    /// Checks shape and the entry bound `|s_ij| ≤ 1 + 1e−12`; PSD and rank are left to
    /// [`validate_form`].
    pub fn from_upper(n: usize, upper: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(CosetError::TooShort { n, min: 2 });
        }
        if upper.len() != upper_len(n) {
            return Err(CosetError::DimensionMismatch(format!(
                "n = {n} needs {} upper entries, got {}",
                upper_len(n),
                upper.len()
            )));
        }
        if let Some(bad) = upper.iter().find(|x| !x.is_finite() || x.abs() > 1.0 + ENTRY_BOUND_TOL) {
            return Err(CosetError::InvalidForm(format!("entry {bad} outside [-1, 1]")));
        }
        Ok(Self { n, upper })
    }

    /// Reads the strict upper triangle of `m`; the diagonal is taken to be 1.
    pub fn from_matrix(m: &DMatrix<f64>) -> Result<Self> {
        let n = m.nrows();
        let mut upper = Vec::with_capacity(upper_len(n));
        for i in 0..n {
            for j in i + 1..n {
                upper.push(m[(i, j)]);
            }
        }
        Self::from_upper(n, upper)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Equal => 1.0,
            Less => self.upper[upper_index(self.n, i, j)],
            Greater => self.upper[upper_index(self.n, j, i)],
        }
    }

    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        assert_ne!(i, j, "diagonal entries are fixed at 1");
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        let k = upper_index(self.n, i, j);
        self.upper[k] = value;
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.n, |i, j| self.get(i, j))
    }

    /// Principal submatrix on `idx`, as rows.
    pub fn principal(&self, idx: &[usize]) -> Vec<Vec<f64>> {
        idx.iter()
            .map(|&i| idx.iter().map(|&j| self.get(i, j)).collect())
            .collect()
    }

    /// The form of the tuple with its elements reordered: entry `(i, j)` of the result is
    /// entry `(order[i], order[j])` of `self`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        assert_eq!(order.len(), self.n);
        let mut upper = Vec::with_capacity(self.upper.len());
        for i in 0..self.n {
            for j in i + 1..self.n {
                upper.push(self.get(order[i], order[j]));
            }
        }
        Self { n: self.n, upper }
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.n, other.n);
        self.upper
            .iter()
            .zip(&other.upper)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        sym_eigenvalues_desc(self.to_matrix())
    }

    /// Number of eigenvalues above `1e−9·n`.
    pub fn numerical_rank(&self) -> usize {
        let tol = eig_tol(self.n);
        self.eigenvalues().iter().filter(|&&l| l > tol).count()
    }
}

/// A form together with the sheet label that resolves the two-point preimage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SheetedRecord", into = "SheetedRecord")]
pub struct SheetedForm {
    form: SpectralForm,
    sheet: i8,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SheetedRecord {
    n: usize,
    upper: Vec<f64>,
    sheet: i8,
}

impl TryFrom<SheetedRecord> for SheetedForm {
    type Error = CosetError;

    fn try_from(r: SheetedRecord) -> Result<Self> {
        SheetedForm::new(SpectralForm::from_upper(r.n, r.upper)?, r.sheet)
    }
}

impl From<SheetedForm> for SheetedRecord {
    fn from(s: SheetedForm) -> Self {
        SheetedRecord {
            n: s.form.n,
            upper: s.form.upper,
            sheet: s.sheet,
        }
    }
}

impl SheetedForm {
    /// Enforces `sheet ∈ {−1, 0, 1}` and `sheet = 0 ⇔ numerical rank ≤ 3`.
    pub fn new(form: SpectralForm, sheet: i8) -> Result<Self> {
        let rank = form.numerical_rank();
        let ok = match sheet {
            0 => rank <= 3,
            -1 | 1 => rank >= 4,
            _ => false,
        };
        if !ok {
            return Err(CosetError::SheetMismatch { sheet, rank });
        }
        Ok(Self { form, sheet })
    }

    pub fn of_tuple(t: &CosetTuple) -> Self {
        Self {
            form: spectral_form(t),
            sheet: sheet(t),
        }
    }

    #[cfg(test)]
    pub(crate) fn new_unchecked(form: SpectralForm, sheet: i8) -> Self {
        Self { form, sheet }
    }

    pub fn form(&self) -> &SpectralForm {
        &self.form
    }

    pub fn sheet(&self) -> i8 {
        self.sheet
    }

    pub fn into_parts(self) -> (SpectralForm, i8) {
        (self.form, self.sheet)
    }
}

/// `s_ij = ⟨g_i, g_j⟩`, the coefficients of `Q(λ) = det(Σ λ_j g_j)`.
pub fn spectral_form(t: &CosetTuple) -> SpectralForm {
    let g = t.elements();
    let n = g.len();
    let mut upper = Vec::with_capacity(upper_len(n));
    for i in 0..n {
        for j in i + 1..n {
            upper.push(g[i].inner(g[j]));
        }
    }
    SpectralForm { n, upper }
}

/// Orientation label of a configuration of unit vectors in ℝ⁴.
///
/// `0` when the vectors span at most three dimensions (smallest eigenvalue of the
/// scatter matrix `Σ v vᵀ` at most `1e−9·n`); otherwise the sign of `det[v_a v_b v_c v_d]`
/// for the lexicographically first quadruple with `|det| ≥ 1e−6`, falling back to the
/// quadruple of largest `|det|`.
pub fn sheet_of_vectors(vs: &[[f64; 4]]) -> i8 {
    let n = vs.len();
    if n < 4 {
        return 0;
    }
    let scatter = vs
        .iter()
        .fold(Matrix4::zeros(), |acc, v| acc + Matrix4::from_fn(|i, j| v[i] * v[j]));
    let lambda_min = scatter.symmetric_eigenvalues().min();
    if lambda_min <= eig_tol(n) {
        return 0;
    }
    let mut best = 0.0f64;
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    let vol = oriented_volume([vs[a], vs[b], vs[c], vs[d]]);
                    if vol.abs() >= SHEET_VOLUME_FLOOR {
                        return vol.signum() as i8;
                    }
                    if vol.abs() > best.abs() {
                        best = vol;
                    }
                }
            }
        }
    }
    if best == 0.0 {
        0
    } else {
        best.signum() as i8
    }
}

/// Sheet of a tuple: flips under elementwise transpose, invariant under `g ↦ h g q`.
pub fn sheet(t: &CosetTuple) -> i8 {
    sheet_of_vectors(&t.vectors())
}

/// Margins of a candidate form against the defining conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub n: usize,
    pub tolerance: f64,
    pub min_eigenvalue: f64,
    /// Fifth-largest eigenvalue, `None` for `n < 5`.
    pub fifth_eigenvalue: Option<f64>,
    pub max_entry_abs: f64,
    pub diagonal_deviation: f64,
    pub rank: usize,
    pub psd_ok: bool,
    pub rank_ok: bool,
    pub bounds_ok: bool,
    pub pass: bool,
}

impl ValidationReport {
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.psd_ok {
            out.push(format!("not PSD: smallest eigenvalue {:e}", self.min_eigenvalue));
        }
        if !self.rank_ok {
            out.push(format!("rank {} exceeds 4", self.rank));
        }
        if !self.bounds_ok {
            out.push(format!("entry magnitude {} exceeds 1", self.max_entry_abs));
        }
        out
    }
}

pub fn validate_form(f: &SpectralForm) -> ValidationReport {
    let tol = eig_tol(f.n);
    let eig = f.eigenvalues();
    let min_eigenvalue = *eig.last().unwrap();
    let fifth_eigenvalue = eig.get(4).copied();
    let rank = eig.iter().filter(|&&l| l > tol).count();
    let max_entry_abs = f.upper.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let psd_ok = min_eigenvalue >= -tol;
    let rank_ok = fifth_eigenvalue.is_none_or(|l| l <= tol);
    let bounds_ok = max_entry_abs <= 1.0 + ENTRY_BOUND_TOL;
    ValidationReport {
        n: f.n,
        tolerance: tol,
        min_eigenvalue,
        fifth_eigenvalue,
        max_entry_abs,
        // the diagonal is structural
        diagonal_deviation: 0.0,
        rank,
        psd_ok,
        rank_ok,
        bounds_ok,
        pass: psd_ok && rank_ok && bounds_ok,
    }
}

/// Double-coset equality via `ζ` and sheet, with the default tolerances.
///
/// Returns [`CosetError::Borderline`] when the ζ-distance lies in `(1e−8, 1e−6)`.
pub fn equivalent(t1: &CosetTuple, t2: &CosetTuple) -> Result<bool> {
    equivalent_with(t1, t2, EQUIV_TOL)
}

pub fn equivalent_with(t1: &CosetTuple, t2: &CosetTuple, tol: f64) -> Result<bool> {
    if t1.len() != t2.len() {
        return Err(CosetError::DimensionMismatch(format!("{} vs {}", t1.len(), t2.len())));
    }
    let distance = spectral_form(t1).max_abs_diff(&spectral_form(t2));
    if distance <= tol {
        Ok(sheet(t1) == sheet(t2))
    } else if distance < BORDERLINE_TOL.max(tol) {
        Err(CosetError::Borderline { distance })
    } else {
        Ok(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::su2::UnitQuaternion;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn uq(v: [f64; 4]) -> UnitQuaternion {
        UnitQuaternion::from_components(v)
    }

    #[test]
    fn identity_tuple_gives_all_ones() {
        let t = CosetTuple::new(vec![UnitQuaternion::IDENTITY; 3]).unwrap();
        let f = spectral_form(&t);
        assert!(f.upper().iter().all(|&x| x == 1.0));
        let r = validate_form(&f);
        assert!(r.pass);
        assert_eq!(r.rank, 1);
    }

    #[test]
    fn p_is_cos_phi() {
        let t = CosetTuple::new(vec![UnitQuaternion::IDENTITY, UnitQuaternion::diag(PI / 2.0)]).unwrap();
        assert!(spectral_form(&t).get(0, 1).abs() < 1e-16);
        let t = CosetTuple::new(vec![UnitQuaternion::IDENTITY, UnitQuaternion::diag(0.8)]).unwrap();
        assert!((spectral_form(&t).get(0, 1) - 0.8f64.cos()).abs() < 1e-15);
    }

    #[test]
    fn identity_5x5_fails_rank() {
        let f = SpectralForm::from_upper(5, vec![0.0; 10]).unwrap();
        let r = validate_form(&f);
        assert!(!r.pass && r.psd_ok && !r.rank_ok);
        assert_eq!(r.rank, 5);
    }

    #[test]
    fn upper_indexing_roundtrip() {
        let n = 6;
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                assert_eq!(upper_index(n, i, j), k);
                k += 1;
            }
        }
        assert_eq!(k, upper_len(n));
    }

    #[test]
    fn form_rejects_bad_shapes() {
        assert!(SpectralForm::from_upper(3, vec![0.0; 2]).is_err());
        assert!(SpectralForm::from_upper(2, vec![1.5]).is_err());
        assert!(SpectralForm::from_upper(2, vec![f64::NAN]).is_err());
    }

    #[test]
    fn standard_basis_has_positive_sheet() {
        let t = CosetTuple::new(vec![
            uq([1.0, 0.0, 0.0, 0.0]),
            uq([0.0, 1.0, 0.0, 0.0]),
            uq([0.0, 0.0, 1.0, 0.0]),
            uq([0.0, 0.0, 0.0, 1.0]),
        ])
        .unwrap();
        assert_eq!(sheet(&t), 1);
    }

    #[test]
    fn diagonal_tuples_have_zero_sheet() {
        let t = CosetTuple::new((0..5).map(|k| UnitQuaternion::diag(0.3 * k as f64)).collect()).unwrap();
        assert_eq!(sheet(&t), 0);
    }

    #[test]
    fn sheet_flips_under_transpose_and_survives_translation() {
        let mut rng = ChaCha8Rng::seed_from_u64(20);
        for _ in 0..200 {
            let t = CosetTuple::random(5, &mut rng).unwrap();
            let s = sheet(&t);
            assert_ne!(s, 0);
            assert_eq!(sheet(&t.transpose()), -s);
            let h = UnitQuaternion::haar_sample(&mut rng);
            let q = UnitQuaternion::haar_sample(&mut rng);
            assert_eq!(sheet(&t.translate(h, q)), s);
        }
    }

    #[test]
    fn sheeted_form_enforces_rank_rule() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let t = CosetTuple::random(5, &mut rng).unwrap();
        let f = spectral_form(&t);
        assert!(SheetedForm::new(f.clone(), 0).is_err());
        assert!(SheetedForm::new(f.clone(), 2).is_err());
        assert!(SheetedForm::new(f, -1).is_ok());
        let ones = SpectralForm::from_upper(3, vec![1.0; 3]).unwrap();
        assert!(SheetedForm::new(ones.clone(), 1).is_err());
        assert!(SheetedForm::new(ones, 0).is_ok());
    }

    #[test]
    fn equivalence_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let t = CosetTuple::random(5, &mut rng).unwrap();
        let h = UnitQuaternion::haar_sample(&mut rng);
        let q = UnitQuaternion::haar_sample(&mut rng);
        assert_eq!(equivalent(&t, &t.translate(h, q)), Ok(true));
        assert_eq!(equivalent(&t, &t.transpose()), Ok(false));
        // all b real: the configuration lies in the hyperplane b_im = 0
        let flat = CosetTuple::new(
            (0..5)
                .map(|_| {
                    let g = UnitQuaternion::haar_sample(&mut rng);
                    uq([g.a_re, g.a_im, g.b_re, 0.0])
                })
                .collect(),
        )
        .unwrap();
        assert_eq!(equivalent(&flat, &flat.transpose()), Ok(true));
    }

    #[test]
    fn borderline_is_signalled() {
        let t = CosetTuple::new(vec![UnitQuaternion::IDENTITY, UnitQuaternion::diag(0.5)]).unwrap();
        let u = CosetTuple::new(vec![UnitQuaternion::IDENTITY, UnitQuaternion::diag(0.5 + 1e-7)]).unwrap();
        assert!(matches!(equivalent(&t, &u), Err(CosetError::Borderline { .. })));
    }

    #[test]
    fn permuted_form_matches_permuted_tuple() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let t = CosetTuple::random(5, &mut rng).unwrap();
        let order = [0, 3, 1, 4, 2];
        let pt = CosetTuple::new(order.iter().map(|&k| t.get(k)).collect()).unwrap();
        assert!(spectral_form(&pt).max_abs_diff(&spectral_form(&t).permuted(&order)) < 1e-15);
    }
}
