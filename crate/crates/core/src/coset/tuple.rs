use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{CosetError, Result, DEGENERACY_TOL};
use crate::su2::UnitQuaternion;

/// An ordered tuple `(g₁, …, gₙ)`, `n ≥ 2`, standing for its double coset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TupleRecord", into = "TupleRecord")]
pub struct CosetTuple {
    elements: Vec<UnitQuaternion>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TupleRecord {
    n: usize,
    elements: Vec<[f64; 4]>,
}

impl TryFrom<TupleRecord> for CosetTuple {
    type Error = CosetError;

    fn try_from(r: TupleRecord) -> Result<Self> {
        if r.elements.len() != r.n {
            return Err(CosetError::DimensionMismatch(format!(
                "n = {} but {} elements",
                r.n,
                r.elements.len()
            )));
        }
        let elements = r
            .elements
            .into_iter()
            .enumerate()
            .map(|(index, v)| UnitQuaternion::try_from_unit(v).ok_or(CosetError::NotUnit { index }))
            .collect::<Result<Vec<_>>>()?;
        CosetTuple::new(elements)
    }
}

impl From<CosetTuple> for TupleRecord {
    fn from(t: CosetTuple) -> Self {
        TupleRecord {
            n: t.len(),
            elements: t.elements.iter().map(|g| g.to_array()).collect(),
        }
    }
}

impl CosetTuple {
    pub fn new(elements: Vec<UnitQuaternion>) -> Result<Self> {
        if elements.len() < 2 {
            return Err(CosetError::TooShort {
                n: elements.len(),
                min: 2,
            });
        }
        Ok(Self { elements })
    }

    /// `(1, r₁, …, r_{n−1})` from a conjugacy tuple.
    pub fn from_conjugacy(rs: &[UnitQuaternion]) -> Result<Self> {
        let mut elements = Vec::with_capacity(rs.len() + 1);
        elements.push(UnitQuaternion::IDENTITY);
        elements.extend_from_slice(rs);
        Self::new(elements)
    }

    /// `n` independent Haar-random elements.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        Self::new((0..n).map(|_| UnitQuaternion::haar_sample(rng)).collect())
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[UnitQuaternion] {
        &self.elements
    }

    pub fn into_elements(self) -> Vec<UnitQuaternion> {
        self.elements
    }

    pub fn get(&self, i: usize) -> UnitQuaternion {
        self.elements[i]
    }

    /// `elements[0]` equals the identity within 1e−12.
    pub fn is_normalized(&self) -> bool {
        self.elements[0].max_abs_diff(UnitQuaternion::IDENTITY) <= 1e-12
    }

    /// The elements after the leading one, i.e. the conjugacy tuple of a normalized tuple.
    pub fn tail(&self) -> &[UnitQuaternion] {
        &self.elements[1..]
    }

    /// `(h·g₁·q, …, h·gₙ·q)`.
    pub fn translate(&self, h: UnitQuaternion, q: UnitQuaternion) -> Self {
        Self {
            elements: self.elements.iter().map(|&g| h.compose(g).compose(q)).collect(),
        }
    }

    /// `(h·g₁·h⁻¹, …)`.
    pub fn conjugate_all(&self, h: UnitQuaternion) -> Self {
        Self {
            elements: self.elements.iter().map(|&g| g.conjugate(h)).collect(),
        }
    }

    /// Elementwise matrix transpose.
    pub fn transpose(&self) -> Self {
        Self {
            elements: self.elements.iter().map(|g| g.transpose()).collect(),
        }
    }

    /// The ℝ⁴ vectors of the elements.
    pub fn vectors(&self) -> Vec<[f64; 4]> {
        self.elements.iter().map(|g| g.to_array()).collect()
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.elements
            .iter()
            .zip(&other.elements)
            .map(|(a, b)| a.max_abs_diff(*b))
            .fold(0.0, f64::max)
    }
}

/// `(g₁, …, gₙ) ↦ (1, g₁⁻¹g₂, …, g₁⁻¹gₙ)`, a representative of the same double coset.
pub fn normalize_leading(t: &CosetTuple) -> CosetTuple {
    let inv = t.elements[0].inverse();
    let mut elements = Vec::with_capacity(t.len());
    elements.push(UnitQuaternion::IDENTITY);
    elements.extend(t.elements[1..].iter().map(|&g| inv.compose(g)));
    CosetTuple { elements }
}

/// How a canonicalization departed from the general-position recipe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Degeneracy {
    /// `g₂` is central; element `pivot` (0-based) was diagonalized instead.
    CentralSecond { pivot: usize },
    /// Every element is central; the tuple of signs is returned unchanged.
    AllCentral,
    /// `g₃` has `b = 0`; element `phase_pivot` fixed the residual phase.
    PhasePivotShifted { phase_pivot: usize },
    /// No element has `b ≠ 0` after diagonalization; the residual phase is free.
    NoPhasePivot,
}

/// Output of [`canonicalize`].
#[derive(Debug, Clone, PartialEq)]
pub struct Canonical {
    pub tuple: CosetTuple,
    /// Index (0-based) of the element brought to `diag(e^{iφ}, e^{−iφ})`.
    pub pivot: Option<usize>,
    /// Index (0-based) of the element whose `b` was made real and nonnegative.
    pub phase_pivot: Option<usize>,
    /// Set when the general-position hypothesis fails; the tuple is still a valid representative.
    pub degeneracy: Vec<Degeneracy>,
}

impl Canonical {
    pub fn is_degenerate(&self) -> bool {
        !self.degeneracy.is_empty()
    }
}

/// Quaternion `h` with `h·(0,u)·h⁻¹ = (0,e₁)` for a unit 3-vector `u`.
fn rotation_to_e1(u: [f64; 3]) -> UnitQuaternion {
    let dot = u[0];
    if 1.0 + dot < 1e-12 {
        // half-turn about the j axis sends e₁ to −e₁
        return UnitQuaternion::from_components([0.0, 0.0, 1.0, 0.0]);
    }
    // axis u × e₁ = (0, u₃, −u₂), half-angle construction
    UnitQuaternion::from_components([1.0 + dot, 0.0, u[2], -u[1]])
}

/// A representative `(1, diag(e^{iφ}, e^{−iφ}), g₃, …)` with `φ ∈ [0, π]` and `b(g₃) ≥ 0`.
///
/// Degenerate strata use a fallback: if `g₂` is central the first non-central element
/// is diagonalized instead, and if `b(g₃) = 0` the first later element with `b ≠ 0`
/// fixes the phase. The fallback is recorded in [`Canonical::degeneracy`].
pub fn canonicalize(t: &CosetTuple) -> Result<Canonical> {
    if t.len() < 3 {
        return Err(CosetError::TooShort { n: t.len(), min: 3 });
    }
    let r = normalize_leading(t);
    let mut degeneracy = Vec::new();

    let pivot = (1..r.len()).find(|&j| !r.elements[j].is_central(DEGENERACY_TOL));
    let Some(pivot) = pivot else {
        degeneracy.push(Degeneracy::AllCentral);
        return Ok(Canonical {
            tuple: r,
            pivot: None,
            phase_pivot: None,
            degeneracy,
        });
    };
    if pivot != 1 {
        degeneracy.push(Degeneracy::CentralSecond { pivot });
    }

    let v = r.elements[pivot].vector_part();
    let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    let h = rotation_to_e1([v[0] / norm, v[1] / norm, v[2] / norm]);
    let mut elements: Vec<UnitQuaternion> = r.elements.iter().map(|&g| g.conjugate(h)).collect();
    elements[0] = UnitQuaternion::IDENTITY;
    let p = &mut elements[pivot];
    *p = UnitQuaternion::from_components([p.a_re, p.a_im, 0.0, 0.0]);

    // conjugation by diag(e^{iα}) multiplies every b by e^{2iα}
    let phase_pivot = (1..elements.len()).find(|&j| {
        j != pivot && {
            let g = elements[j];
            g.b_re.hypot(g.b_im) > DEGENERACY_TOL
        }
    });
    match phase_pivot {
        Some(k) => {
            if pivot == 1 && k != 2 {
                degeneracy.push(Degeneracy::PhasePivotShifted { phase_pivot: k });
            }
            let g = elements[k];
            let alpha = -g.b_im.atan2(g.b_re) / 2.0;
            let d = UnitQuaternion::diag(alpha);
            for (j, e) in elements.iter_mut().enumerate() {
                if j != 0 && j != pivot {
                    *e = e.conjugate(d);
                }
            }
            let g = elements[k];
            elements[k] = UnitQuaternion::from_components([g.a_re, g.a_im, g.b_re.hypot(g.b_im), 0.0]);
        }
        None => degeneracy.push(Degeneracy::NoPhasePivot),
    }

    Ok(Canonical {
        tuple: CosetTuple { elements },
        pivot: Some(pivot),
        phase_pivot,
        degeneracy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coset::spectral_form;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn normalize_constant_tuple_gives_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let g = UnitQuaternion::haar_sample(&mut rng);
        let t = CosetTuple::new(vec![g; 4]).unwrap();
        let r = normalize_leading(&t);
        assert!(r
            .elements()
            .iter()
            .all(|e| e.max_abs_diff(UnitQuaternion::IDENTITY) < 1e-12));
    }

    #[test]
    fn normalize_is_idempotent_on_normalized() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let t = normalize_leading(&CosetTuple::random(5, &mut rng).unwrap());
        assert!(t.is_normalized());
        assert!(normalize_leading(&t).max_abs_diff(&t) < 1e-15);
    }

    #[test]
    fn normalize_preserves_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..100 {
            let t = CosetTuple::random(5, &mut rng).unwrap();
            let d = spectral_form(&t).max_abs_diff(&spectral_form(&normalize_leading(&t)));
            assert!(d < 1e-12);
        }
    }

    #[test]
    fn canonical_shape() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let t = CosetTuple::random(5, &mut rng).unwrap();
        let c = canonicalize(&t).unwrap();
        assert!(!c.is_degenerate());
        let g2 = c.tuple.get(1);
        assert_eq!((g2.b_re, g2.b_im), (0.0, 0.0));
        assert!(g2.a_im >= 0.0);
        let g3 = c.tuple.get(2);
        assert!(g3.b_re >= 0.0 && g3.b_im == 0.0);
        assert!(spectral_form(&c.tuple).max_abs_diff(&spectral_form(&t)) < 1e-12);
    }

    #[test]
    fn canonical_is_fixed_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let c = canonicalize(&CosetTuple::random(6, &mut rng).unwrap()).unwrap();
        let again = canonicalize(&c.tuple).unwrap();
        assert!(again.tuple.max_abs_diff(&c.tuple) < 1e-12);
    }

    #[test]
    fn canonical_is_coset_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..200 {
            let t = CosetTuple::random(5, &mut rng).unwrap();
            let h = UnitQuaternion::haar_sample(&mut rng);
            let q = UnitQuaternion::haar_sample(&mut rng);
            let a = canonicalize(&t).unwrap().tuple;
            let b = canonicalize(&t.translate(h, q)).unwrap().tuple;
            assert!(a.max_abs_diff(&b) < 1e-9, "{}", a.max_abs_diff(&b));
        }
    }

    #[test]
    fn all_identity_is_flagged() {
        let t = CosetTuple::new(vec![UnitQuaternion::IDENTITY; 4]).unwrap();
        let c = canonicalize(&t).unwrap();
        assert_eq!(c.degeneracy, vec![Degeneracy::AllCentral]);
        assert_eq!(c.tuple, t);
    }

    #[test]
    fn central_second_falls_back_to_next_element() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let g3 = UnitQuaternion::haar_sample(&mut rng);
        let g4 = UnitQuaternion::haar_sample(&mut rng);
        let t = CosetTuple::new(vec![
            UnitQuaternion::IDENTITY,
            UnitQuaternion::IDENTITY.negate(),
            g3,
            g4,
        ])
        .unwrap();
        let c = canonicalize(&t).unwrap();
        assert_eq!(c.pivot, Some(2));
        assert!(c.degeneracy.contains(&Degeneracy::CentralSecond { pivot: 2 }));
        let p = c.tuple.get(2);
        assert_eq!((p.b_re, p.b_im), (0.0, 0.0));
        assert_eq!(c.phase_pivot, Some(3));
        assert!(spectral_form(&c.tuple).max_abs_diff(&spectral_form(&t)) < 1e-12);
    }

    #[test]
    fn vanishing_b_shifts_phase_pivot() {
        let t = CosetTuple::new(vec![
            UnitQuaternion::IDENTITY,
            UnitQuaternion::diag(0.4),
            UnitQuaternion::diag(1.2),
            UnitQuaternion::from_components([0.3, 0.1, 0.5, -0.7]),
        ])
        .unwrap();
        let c = canonicalize(&t).unwrap();
        assert_eq!(c.degeneracy, vec![Degeneracy::PhasePivotShifted { phase_pivot: 3 }]);
        let g4 = c.tuple.get(3);
        assert!(g4.b_im == 0.0 && g4.b_re > 0.0);
    }

    #[test]
    fn short_tuple_rejected() {
        let t = CosetTuple::new(vec![UnitQuaternion::IDENTITY; 2]).unwrap();
        assert!(matches!(canonicalize(&t), Err(CosetError::TooShort { .. })));
        assert!(CosetTuple::new(vec![UnitQuaternion::IDENTITY]).is_err());
    }
}
