use num_complex::Complex64;
use proptest::prelude::*;
use spectral_cosets::actions::{act_tuple, form_invert, GeneratorToken, GroupWord};
use spectral_cosets::coset::{
    equivalent, normalize_leading, reconstruct, sheet, spectral_form, CosetTuple, SheetedForm,
};
use spectral_cosets::su2::UnitQuaternion;

fn unit() -> impl Strategy<Value = UnitQuaternion> {
    prop::array::uniform4(-1.0f64..1.0)
        .prop_filter("away from the origin", |v| v.iter().map(|x| x * x).sum::<f64>() > 0.01)
        .prop_map(UnitQuaternion::from_components)
}

fn tuple(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = CosetTuple> {
    prop::collection::vec(unit(), n).prop_map(|g| CosetTuple::new(g).unwrap())
}

/// `a + b j` as the complex matrix `[[a, b], [-b̄, ā]]`.
fn matrix(q: UnitQuaternion) -> [[Complex64; 2]; 2] {
    let [x0, x1, x2, x3] = q.to_array();
    let a = Complex64::new(x0, x1);
    let b = Complex64::new(x2, x3);
    [[a, b], [-b.conj(), a.conj()]]
}

fn mat_mul(x: [[Complex64; 2]; 2], y: [[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
    std::array::from_fn(|i| std::array::from_fn(|j| x[i][0] * y[0][j] + x[i][1] * y[1][j]))
}

fn mat_det(m: [[Complex64; 2]; 2]) -> Complex64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

fn close(x: [[Complex64; 2]; 2], y: [[Complex64; 2]; 2], tol: f64) -> bool {
    (0..2).all(|i| (0..2).all(|j| (x[i][j] - y[i][j]).norm() < tol))
}

fn token(n: usize) -> impl Strategy<Value = GeneratorToken> {
    prop_oneof![
        Just((2..=n).collect::<Vec<_>>())
            .prop_shuffle()
            .prop_map(GeneratorToken::Permute),
        (2..=n).prop_map(GeneratorToken::Invert),
        (2..=n, 2..=n)
            .prop_filter("distinct", |(j, k)| j != k)
            .prop_map(|(j, k)| GeneratorToken::LeftMultiply(j, k)),
        (1..=n - 2, prop::bool::ANY).prop_map(|(k, up)| GeneratorToken::BraidSigma(k, if up { 1 } else { -1 })),
    ]
}

fn word(n: usize) -> impl Strategy<Value = GroupWord> {
    prop::collection::vec(token(n), 0..8).prop_map(GroupWord::new)
}

proptest! {
    #[test]
    fn composition_matches_matrix_product(x in unit(), y in unit()) {
        prop_assert!(close(matrix(x.compose(y)), mat_mul(matrix(x), matrix(y)), 1e-14));
    }

    #[test]
    fn composition_is_associative(x in unit(), y in unit(), z in unit()) {
        prop_assert!(x.compose(y).compose(z).max_abs_diff(x.compose(y.compose(z))) < 1e-14);
    }

    #[test]
    fn inverse_and_transpose(x in unit(), y in unit()) {
        prop_assert!(x.compose(x.inverse()).max_abs_diff(UnitQuaternion::IDENTITY) < 1e-14);
        let lhs = x.compose(y).transpose();
        let rhs = y.transpose().compose(x.transpose());
        prop_assert!(lhs.max_abs_diff(rhs) < 1e-14);
    }

    #[test]
    fn inner_product_is_polarized_determinant(x in unit(), y in unit()) {
        let (mx, my) = (matrix(x), matrix(y));
        let sum = mat_det(std::array::from_fn(|i| std::array::from_fn(|j| mx[i][j] + my[i][j])));
        let diff = mat_det(std::array::from_fn(|i| std::array::from_fn(|j| mx[i][j] - my[i][j])));
        let polar = (sum - diff) / 4.0;
        prop_assert!((polar.re - x.inner(y)).abs() < 1e-14);
        prop_assert!(polar.im.abs() < 1e-14);
    }

    #[test]
    fn inner_product_is_biinvariant(x in unit(), y in unit(), h in unit(), q in unit()) {
        let moved = h.compose(x).compose(q).inner(h.compose(y).compose(q));
        prop_assert!((moved - x.inner(y)).abs() < 1e-14);
    }

    #[test]
    fn spectral_form_and_sheet_are_coset_invariants(t in tuple(2..=7), h in unit(), q in unit()) {
        let moved = t.translate(h, q);
        prop_assert!(spectral_form(&moved).max_abs_diff(&spectral_form(&t)) < 1e-13);
        prop_assert_eq!(sheet(&moved), sheet(&t));
        prop_assert!(matches!(equivalent(&t, &moved), Ok(true)));
    }

    #[test]
    fn transpose_flips_the_sheet(t in tuple(4..=7)) {
        prop_assert_eq!(sheet(&t.transpose()), -sheet(&t));
        prop_assert!(spectral_form(&t.transpose()).max_abs_diff(&spectral_form(&t)) < 1e-15);
    }

    #[test]
    fn reconstruction_roundtrip(t in tuple(2..=7)) {
        let back = reconstruct(&SheetedForm::of_tuple(&t)).unwrap();
        prop_assert!(equivalent(&t, &back).unwrap());
    }

    #[test]
    fn form_invert_is_an_involution(t in tuple(2..=7), k in 2usize..=7) {
        let f = spectral_form(&t);
        let k = 2 + (k - 2) % (t.len() - 1);
        let twice = form_invert(&form_invert(&f, k).unwrap(), k).unwrap();
        prop_assert!(twice.max_abs_diff(&f) < 1e-14);
    }

    #[test]
    fn word_display_roundtrips(w in word(6)) {
        let text = w.to_string();
        let back: GroupWord = text.parse().unwrap();
        prop_assert_eq!(back, w);
    }

    #[test]
    fn inverse_word_undoes_the_action(t in tuple(5..=5), w in word(5)) {
        let there = act_tuple(&t, &w).unwrap();
        // left multiplications have no single-token inverse
        let Some(inverse) = w.inverse() else { return Ok(()) };
        let back = act_tuple(&there, &inverse).unwrap();
        prop_assert!(back.max_abs_diff(&normalize_leading(&t)) < 1e-12);
    }
}
