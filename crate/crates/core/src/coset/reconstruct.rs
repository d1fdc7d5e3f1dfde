use super::{eig_tol, sheet_of_vectors, validate_form, CosetError, CosetTuple, Result, SheetedForm};
use crate::linalg::sym_eigen_desc;
use crate::su2::UnitQuaternion;

/// Width of the ambiguity band above the rank threshold, as a multiple of it.
const RANK_BAND: f64 = 10.0;

/// A tuple whose form is `sf.form()` and whose sheet is `sf.sheet()`.
///
/// The Gram matrix is factored through its top four eigenpairs, `v_j = (U Λ^{1/2})_j`,
/// each row is rescaled to unit length and read as `a = v₁ + i v₂`, `b = v₃ + i v₄`.
/// If the orientation disagrees with the requested sheet the fourth coordinate is negated.
/// For sheet 0 the result is fixed by transposition up to equivalence.
pub fn reconstruct(sf: &SheetedForm) -> Result<CosetTuple> {
    let form = sf.form();
    let report = validate_form(form);
    if !report.pass {
        return Err(CosetError::InvalidForm(report.failures().join("; ")));
    }
    let n = form.n();
    let (values, vectors) = sym_eigen_desc(form.to_matrix());
    let tol = eig_tol(n);
    if let Some(&l4) = values.get(3) {
        if l4 > tol && l4 <= RANK_BAND * tol {
            return Err(CosetError::RankAmbiguous { lambda4: l4 });
        }
    }
    // eigenvalues at round-off level would contribute O(√ε) noise
    let scale: Vec<f64> = (0..4)
        .map(|k| values.get(k).map_or(0.0, |&l| if l > tol { l.sqrt() } else { 0.0 }))
        .collect();
    let mut vs: Vec<[f64; 4]> = (0..n)
        .map(|j| {
            let mut v = [0.0; 4];
            for (k, c) in v.iter_mut().enumerate().take(n.min(4)) {
                *c = vectors[(j, k)] * scale[k];
            }
            v
        })
        .collect();
    for v in &mut vs {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(CosetError::InvalidForm("zero row in the Gram factor".into()));
        }
        v.iter_mut().for_each(|x| *x /= norm);
    }
    if sf.sheet() != 0 && sheet_of_vectors(&vs) != sf.sheet() {
        vs.iter_mut().for_each(|v| v[3] = -v[3]);
    }
    CosetTuple::new(vs.into_iter().map(UnitQuaternion::from_components).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coset::{canonicalize, equivalent, sheet, spectral_form, SpectralForm};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn all_ones_reconstructs_to_equal_elements() {
        let f = SpectralForm::from_upper(4, vec![1.0; 6]).unwrap();
        let t = reconstruct(&SheetedForm::new(f.clone(), 0).unwrap()).unwrap();
        assert!(spectral_form(&t).max_abs_diff(&f) < 1e-12);
        assert!(t.elements().iter().all(|g| g.max_abs_diff(t.get(0)) < 1e-9));
    }

    #[test]
    fn roundtrip_lands_in_same_coset() {
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        for n in [2, 3, 4, 5, 7] {
            for _ in 0..50 {
                let t = CosetTuple::random(n, &mut rng).unwrap();
                let sf = SheetedForm::of_tuple(&t);
                let r = reconstruct(&sf).unwrap();
                assert!(spectral_form(&r).max_abs_diff(sf.form()) < 1e-9);
                assert_eq!(sheet(&r), sf.sheet());
                assert_eq!(equivalent(&t, &r), Ok(true));
            }
        }
    }

    #[test]
    fn opposite_sheets_give_distinct_cosets() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..20 {
            let t = CosetTuple::random(5, &mut rng).unwrap();
            let f = spectral_form(&t);
            let plus = reconstruct(&SheetedForm::new(f.clone(), 1).unwrap()).unwrap();
            let minus = reconstruct(&SheetedForm::new(f.clone(), -1).unwrap()).unwrap();
            assert!(spectral_form(&plus).max_abs_diff(&spectral_form(&minus)) < 1e-9);
            assert_eq!(equivalent(&plus, &minus), Ok(false));
            let cp = canonicalize(&plus).unwrap().tuple;
            let cm = canonicalize(&minus).unwrap().tuple;
            assert!(cp.max_abs_diff(&cm) > 1e-6);
        }
    }

    #[test]
    fn invalid_form_rejected() {
        let f = SpectralForm::from_upper(5, vec![0.0; 10]).unwrap();
        let sf = SheetedForm::new_unchecked(f, 1);
        assert!(matches!(reconstruct(&sf), Err(CosetError::InvalidForm(_))));
    }
}
