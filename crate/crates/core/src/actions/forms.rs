//! Closed-form actions on spectral forms.
//!
//! With `p_x = Re x = s_{1x}` and `⟨x, y⟩ = s_xy`, the maps follow from three identities
//! for unit quaternions `x = x₀ + X`, `y`, `z`:
//!
//! ```text
//!     ⟨x⁻¹, y⟩     = 2 p_x p_y − ⟨x, y⟩
//!     ⟨xy, z⟩      = p_x ⟨y, z⟩ − p_z ⟨x, y⟩ + p_y ⟨x, z⟩ + det[1, x, y, z]
//!     ⟨xyx⁻¹, z⟩   = ⟨y, z⟩ − 2 D₃ + 2 p_x det[1, x, y, z]
//! ```
//!
//! where `D₃ = det[[1, p_x, p_z], [p_x, 1, ⟨x,z⟩], [p_y, ⟨x,y⟩, ⟨y,z⟩]]` and
//! `det[1, x, y, z]² ` is the Gram determinant of `(1, x, y, z)`. Only the sign of the
//! 4×4 determinant is not a function of the form; it comes from a representative on
//! the form's sheet.

use serde::{Deserialize, Serialize};

use super::{act_tuple, ActionError, GeneratorToken, GroupWord, Result};
use crate::coset::{
    coordinates_for_sheet, from_coordinates, normalize_leading, reconstruct, sheet, spectral_form,
    CanonicalCoordinates, CosetTuple, SheetedForm, SpectralForm,
};
use crate::linalg::{det, det3, oriented_volume};

/// Radicands in `[−RADICAND_CLAMP, 0)` are treated as 0.
pub const RADICAND_CLAMP: f64 = 1e-9;

/// Where the sign of the 4×4 determinant comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignRule {
    /// Sheet-resolved canonical coordinates: for the quadruple `(1, g₂, g₃, g_l)` take
    /// "minus" iff `sin(θ₁ − θ_l) ≥ 0`; other quadruples use the coordinate tuple.
    #[default]
    Theta,
    /// A representative reconstructed from the eigen-decomposition.
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActionPath {
    ClosedForm,
    /// Sheet 0: the closed form has no sign information, so the result is computed
    /// through reconstruct → act → ζ.
    OracleFallback,
}

/// Sign choice made for one entry involving a square root.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchInfo {
    /// 1-based position of the third slot of the quadruple `(1, a, b, l)`.
    pub position: usize,
    pub radicand: f64,
    /// `+1` adds the root, `−1` subtracts it.
    pub sign: i8,
    /// `sin(θ₁ − θ_l)` when the θ rule decided the sign.
    pub sin_theta_diff: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormAction {
    pub form: SheetedForm,
    pub path: ActionPath,
    pub branches: Vec<BranchInfo>,
}

/// `g_k ← g_k⁻¹` (1-based `k ≥ 2`): `s_kl ← 2 s_1k s_1l − s_kl`, everything else fixed.
pub fn form_invert(f: &SpectralForm, k: usize) -> Result<SpectralForm> {
    let n = f.n();
    GeneratorToken::Invert(k).validate(n)?;
    let a = k - 1;
    let mut out = f.clone();
    for l in 1..n {
        if l != a {
            out.set(a, l, 2.0 * f.get(0, a) * f.get(0, l) - f.get(a, l));
        }
    }
    Ok(out)
}

pub fn form_invert_sheeted(sf: &SheetedForm, k: usize) -> Result<FormAction> {
    let form = form_invert(sf.form(), k)?;
    let sheet = output_sheet(sf, &GeneratorToken::Invert(k))?;
    Ok(FormAction {
        form: SheetedForm::new(form, sheet)?,
        path: ActionPath::ClosedForm,
        branches: Vec::new(),
    })
}

/// Sign source for `det[1, g_a, g_b, g_c]` (0-based element indices).
enum Orienter {
    Theta {
        coords: CanonicalCoordinates,
        tuple: CosetTuple,
    },
    Tuple(CosetTuple),
}

impl Orienter {
    fn new(sf: &SheetedForm, rule: SignRule) -> Result<Self> {
        Ok(match rule {
            SignRule::Theta => {
                let coords = coordinates_for_sheet(sf.form(), sf.sheet())?;
                let tuple = from_coordinates(&coords)?;
                Orienter::Theta { coords, tuple }
            }
            SignRule::Oracle => Orienter::Tuple(normalize_leading(&reconstruct(sf)?)),
        })
    }

    fn sign(&self, a: usize, b: usize, c: usize) -> (i8, Option<f64>) {
        let tuple = match self {
            Orienter::Theta { coords, .. } if (a, b) == (1, 2) => {
                let s = (coords.points[0].theta - coords.points[c - 2].theta).sin();
                return (if s >= 0.0 { -1 } else { 1 }, Some(s));
            }
            Orienter::Theta { tuple, .. } | Orienter::Tuple(tuple) => tuple,
        };
        let g = tuple.elements();
        let v = oriented_volume([[1.0, 0.0, 0.0, 0.0], g[a].to_array(), g[b].to_array(), g[c].to_array()]);
        (if v >= 0.0 { 1 } else { -1 }, None)
    }
}

/// `±√det` of the Gram block on `{0, a, b, c}` with the sign from `orienter`.
fn signed_root(f: &SpectralForm, orienter: &Orienter, a: usize, b: usize, c: usize) -> Result<(f64, BranchInfo)> {
    let radicand = det(&f.principal(&[0, a, b, c]));
    if radicand < -RADICAND_CLAMP {
        return Err(ActionError::NegativeDiscriminant { value: radicand });
    }
    let (sign, sin_theta_diff) = orienter.sign(a, b, c);
    let info = BranchInfo {
        position: c + 1,
        radicand,
        sign,
        sin_theta_diff,
    };
    Ok((f64::from(sign) * radicand.max(0.0).sqrt(), info))
}

/// Sheet of the image, via a reconstructed representative.
fn output_sheet(sf: &SheetedForm, token: &GeneratorToken) -> Result<i8> {
    let rep = reconstruct(sf)?;
    Ok(sheet(&act_tuple(&rep, &GroupWord::new(vec![token.clone()]))?))
}

fn fallback(sf: &SheetedForm, token: &GeneratorToken) -> Result<FormAction> {
    let rep = reconstruct(sf)?;
    let out = act_tuple(&rep, &GroupWord::new(vec![token.clone()]))?;
    Ok(FormAction {
        form: SheetedForm::of_tuple(&out),
        path: ActionPath::OracleFallback,
        branches: Vec::new(),
    })
}

fn finish(
    sf: &SheetedForm,
    token: &GeneratorToken,
    form: SpectralForm,
    branches: Vec<BranchInfo>,
) -> Result<FormAction> {
    let sheet = output_sheet(sf, token)?;
    Ok(FormAction {
        form: SheetedForm::new(form, sheet)?,
        path: ActionPath::ClosedForm,
        branches,
    })
}

/// `g_k ← g_j·g_k` (1-based). For `(j, k) = (2, 3)` on `n = 5` in the usual
/// `p, q, r, t` names:
///
/// ```text
///     q̃₁ = −r₁ + 2 p q₁,   r̃₁ = q₁,   t̃₁ₗ = p t₁ₗ − q_l r₁ + q₁ r_l ∓ √D₄
/// ```
///
/// with "minus" iff `sin(θ₁ − θ_l) ≥ 0`. All other entries are unchanged.
pub fn form_left_multiply(sf: &SheetedForm, j: usize, k: usize, rule: SignRule) -> Result<FormAction> {
    let token = GeneratorToken::LeftMultiply(j, k);
    let f = sf.form();
    let n = f.n();
    token.validate(n)?;
    if sf.sheet() == 0 {
        return fallback(sf, &token);
    }
    let orienter = Orienter::new(sf, rule)?;
    let (a, b) = (j - 1, k - 1);
    let mut out = f.clone();
    let mut branches = Vec::new();
    out.set(0, b, 2.0 * f.get(0, a) * f.get(0, b) - f.get(a, b));
    out.set(a, b, f.get(0, b));
    for l in 1..n {
        if l == a || l == b {
            continue;
        }
        let (root, info) = signed_root(f, &orienter, a, b, l)?;
        branches.push(info);
        out.set(
            b,
            l,
            f.get(0, a) * f.get(b, l) - f.get(0, l) * f.get(a, b) + f.get(0, b) * f.get(a, l) + root,
        );
    }
    finish(sf, &token, out, branches)
}

/// `D₃` for the conjugation `y ← x y x⁻¹` against `z` (0-based indices).
fn conj_minor(f: &SpectralForm, x: usize, y: usize, z: usize) -> f64 {
    let rows = [0, x, y];
    let cols = [0, x, z];
    det3(std::array::from_fn(|r| {
        std::array::from_fn(|c| f.get(rows[r], cols[c]))
    }))
}

fn braid_token(sf: &SheetedForm, k: usize) -> Result<GeneratorToken> {
    let token = GeneratorToken::BraidSigma(k, 1);
    token.validate(sf.form().n())?;
    Ok(token)
}

/// `σ_k` in two steps: replace `c_{k+1}` by `c_k c_{k+1} c_k⁻¹` in place
/// (its `p`, and its pairing with `c_k`, do not change), then swap the two slots.
pub fn form_braid(sf: &SheetedForm, k: usize, rule: SignRule) -> Result<FormAction> {
    let token = braid_token(sf, k)?;
    if sf.sheet() == 0 {
        return fallback(sf, &token);
    }
    let f = sf.form();
    let n = f.n();
    let orienter = Orienter::new(sf, rule)?;
    let (x, y) = (k, k + 1);
    let mut conj = f.clone();
    let mut branches = Vec::new();
    for l in 1..n {
        if l == x || l == y {
            continue;
        }
        let (root, info) = signed_root(f, &orienter, x, y, l)?;
        branches.push(info);
        conj.set(
            y,
            l,
            f.get(y, l) - 2.0 * conj_minor(f, x, y, l) + 2.0 * f.get(0, x) * root,
        );
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.swap(x, y);
    finish(sf, &token, conj.permuted(&order), branches)
}

/// `σ_k` through the block display with `p_i = s_{1,i+1}`, `h_ij = s_{i+1,j+1}`:
///
/// ```text
///     p̃_k = p_{k+1},  p̃_{k+1} = p_k,  h̃_{(k+1)j} = h_kj,
///     h̃_kj = h_{(k+1)j} − 2 D₃ + 2 p_k det[1, c_k, c_{k+1}, c_j],
/// ```
///
/// all other entries unchanged.
pub fn form_braid_general(sf: &SheetedForm, k: usize, rule: SignRule) -> Result<FormAction> {
    let token = braid_token(sf, k)?;
    if sf.sheet() == 0 {
        return fallback(sf, &token);
    }
    let f = sf.form();
    let n = f.n();
    let orienter = Orienter::new(sf, rule)?;
    let (ck, ck1) = (k, k + 1);
    let mut out = f.clone();
    let mut branches = Vec::new();
    out.set(0, ck, f.get(0, ck1));
    out.set(0, ck1, f.get(0, ck));
    for j in 1..n {
        if j == ck || j == ck1 {
            continue;
        }
        let (root, info) = signed_root(f, &orienter, ck, ck1, j)?;
        branches.push(info);
        out.set(ck1, j, f.get(ck, j));
        out.set(
            ck,
            j,
            f.get(ck1, j) - 2.0 * conj_minor(f, ck, ck1, j) + 2.0 * f.get(0, ck) * root,
        );
    }
    finish(sf, &token, out, branches)
}

/// `ζ` of the matrix-level action, for comparisons.
/// Applies one token through its closed form; permutations relabel the form and `σₖ⁻¹`
/// goes through the oracle.
pub fn form_apply_token(sf: &SheetedForm, token: &GeneratorToken, rule: SignRule) -> Result<FormAction> {
    token.validate(sf.form().n())?;
    match token {
        GeneratorToken::Invert(k) => form_invert_sheeted(sf, *k),
        GeneratorToken::LeftMultiply(j, k) => form_left_multiply(sf, *j, *k, rule),
        GeneratorToken::BraidSigma(k, 1) => form_braid(sf, *k, rule),
        GeneratorToken::BraidSigma(..) => fallback(sf, token),
        GeneratorToken::Permute(sigma) => {
            let order: Vec<usize> = std::iter::once(0).chain(sigma.iter().map(|k| k - 1)).collect();
            finish(sf, token, sf.form().permuted(&order), Vec::new())
        }
    }
}

/// Applies a word token by token. The path is `OracleFallback` if any step fell back.
pub fn form_act(sf: &SheetedForm, w: &GroupWord, rule: SignRule) -> Result<FormAction> {
    w.validate(sf.form().n())?;
    let mut out = FormAction {
        form: sf.clone(),
        path: ActionPath::ClosedForm,
        branches: Vec::new(),
    };
    for token in &w.tokens {
        let step = form_apply_token(&out.form, token, rule)?;
        if step.path == ActionPath::OracleFallback {
            out.path = ActionPath::OracleFallback;
        }
        out.form = step.form;
        out.branches.extend(step.branches);
    }
    Ok(out)
}

pub(crate) fn oracle_form(t: &CosetTuple, token: GeneratorToken) -> Result<SpectralForm> {
    Ok(spectral_form(&act_tuple(t, &GroupWord::new(vec![token]))?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coset::to_coordinates;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sample(n: usize, rng: &mut ChaCha8Rng) -> (CosetTuple, SheetedForm) {
        let t = normalize_leading(&CosetTuple::random(n, rng).unwrap());
        let sf = SheetedForm::of_tuple(&t);
        (t, sf)
    }

    #[test]
    fn invert_arithmetic() {
        // p = 0.5, q = 0.2, r = 0.7
        let mut f = SpectralForm::from_upper(3, vec![0.5, 0.2, 0.7]).unwrap();
        f = form_invert(&f, 2).unwrap();
        assert!((f.get(1, 2) - (-0.5)).abs() < 1e-15);
        assert_eq!(f.get(0, 1), 0.5);
        assert_eq!(f.get(0, 2), 0.2);
    }

    #[test]
    fn invert_matches_oracle_and_is_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(100);
        for _ in 0..500 {
            let (t, sf) = sample(5, &mut rng);
            for k in 2..=5 {
                let once = form_invert(sf.form(), k).unwrap();
                assert!(once.max_abs_diff(&oracle_form(&t, GeneratorToken::Invert(k)).unwrap()) < 1e-10);
                assert!(form_invert(&once, k).unwrap().max_abs_diff(sf.form()) < 1e-14);
            }
        }
    }

    #[test]
    fn left_multiply_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        for _ in 0..500 {
            let (t, sf) = sample(5, &mut rng);
            let want = oracle_form(&t, GeneratorToken::LeftMultiply(2, 3)).unwrap();
            for rule in [SignRule::Theta, SignRule::Oracle] {
                let got = form_left_multiply(&sf, 2, 3, rule).unwrap();
                assert_eq!(got.path, ActionPath::ClosedForm);
                assert!(got.form.form().max_abs_diff(&want) < 1e-8, "{rule:?}");
                assert_eq!(got.form.form().get(0, 1), sf.form().get(0, 1));
            }
            let got = form_left_multiply(&sf, 4, 2, SignRule::Theta).unwrap();
            let want = oracle_form(&t, GeneratorToken::LeftMultiply(4, 2)).unwrap();
            assert!(got.form.form().max_abs_diff(&want) < 1e-8);
        }
    }

    #[test]
    fn left_multiply_with_diagonal_g3() {
        // g₃ diagonal: y₁ carries everything and q̃₁ is read off directly
        let mut rng = ChaCha8Rng::seed_from_u64(102);
        let (t, _) = sample(5, &mut rng);
        let mut g = t.into_elements();
        g[1] = crate::su2::UnitQuaternion::diag(0.7);
        g[2] = crate::su2::UnitQuaternion::diag(-1.9);
        let t = CosetTuple::new(g).unwrap();
        let sf = SheetedForm::of_tuple(&t);
        let f = sf.form();
        let got = form_left_multiply(&sf, 2, 3, SignRule::Oracle).unwrap();
        let q1 = got.form.form().get(0, 2);
        assert!((q1 - (-f.get(1, 2) + 2.0 * f.get(0, 1) * f.get(0, 2))).abs() < 1e-15);
        assert!((q1 - (0.7f64 - 1.9).cos()).abs() < 1e-12);
    }

    #[test]
    fn braid_routes_match_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(103);
        for _ in 0..300 {
            let (t, sf) = sample(6, &mut rng);
            for k in 1..=4 {
                let want = oracle_form(&t, GeneratorToken::BraidSigma(k, 1)).unwrap();
                let g = form_braid_general(&sf, k, SignRule::Theta).unwrap();
                assert!(g.form.form().max_abs_diff(&want) < 1e-8, "general k={k}");
                let l = form_braid(&sf, k, SignRule::Oracle).unwrap();
                assert!(l.form.form().max_abs_diff(&want) < 1e-8, "in place k={k}");
                assert_eq!(
                    g.form.sheet(),
                    sheet(&act_tuple(&t, &format!("s{k}").parse().unwrap()).unwrap())
                );
            }
        }
    }

    #[test]
    fn theta_rule_agrees_with_oracle_signs() {
        let mut rng = ChaCha8Rng::seed_from_u64(104);
        let (mut agree, mut total) = (0, 0);
        for _ in 0..2000 {
            let (_, sf) = sample(5, &mut rng);
            let a = form_left_multiply(&sf, 2, 3, SignRule::Theta).unwrap();
            let b = form_left_multiply(&sf, 2, 3, SignRule::Oracle).unwrap();
            for (x, y) in a.branches.iter().zip(&b.branches) {
                if x.sin_theta_diff.unwrap().abs() > 1e-6 {
                    total += 1;
                    agree += usize::from(x.sign == y.sign);
                }
            }
        }
        assert_eq!(agree, total);
    }

    #[test]
    fn untouched_entries_and_eigen_angles() {
        let mut rng = ChaCha8Rng::seed_from_u64(105);
        let (t, sf) = sample(6, &mut rng);
        let out = form_braid_general(&sf, 2, SignRule::Theta).unwrap();
        let (f, g) = (sf.form(), out.form.form());
        for (i, j) in [(1, 4), (1, 5), (4, 5), (0, 4), (0, 1)] {
            assert_eq!(f.get(i, j), g.get(i, j));
        }
        let image = act_tuple(&t, &"s2".parse().unwrap()).unwrap();
        let mut before: Vec<f64> = t.tail().iter().map(|g| g.a_re).collect();
        let mut after: Vec<f64> = image.tail().iter().map(|g| g.a_re).collect();
        before.sort_by(f64::total_cmp);
        after.sort_by(f64::total_cmp);
        for (x, y) in before.iter().zip(&after) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!(to_coordinates(&crate::coset::canonicalize(&image).unwrap().tuple).is_ok());
    }

    #[test]
    fn only_the_first_r_changes_under_left_multiply() {
        // r̃₂ = r₂ and r̃₃ = r₃; r̃₃ = q₃ would be off by O(1)
        let mut rng = ChaCha8Rng::seed_from_u64(107);
        let mut far = 0;
        for _ in 0..200 {
            let (t, _) = sample(5, &mut rng);
            let before = spectral_form(&t);
            let after = oracle_form(&t, GeneratorToken::LeftMultiply(2, 3)).unwrap();
            assert!((after.get(1, 3) - before.get(1, 3)).abs() < 1e-14);
            assert!((after.get(1, 4) - before.get(1, 4)).abs() < 1e-14);
            far += usize::from((after.get(1, 4) - before.get(0, 4)).abs() > 1e-3);
        }
        assert!(far > 190);
    }

    #[test]
    fn conjugation_needs_both_signs() {
        // a fixed "minus" in front of 2p·√D₄ matches the matrix action only on one sheet
        let mut rng = ChaCha8Rng::seed_from_u64(109);
        let (mut plus, mut minus) = (0, 0);
        for _ in 0..400 {
            let (t, sf) = sample(5, &mut rng);
            let f = sf.form();
            let want = oracle_form(&t, GeneratorToken::BraidSigma(1, 1)).unwrap();
            let base = f.get(2, 3) - 2.0 * conj_minor(f, 1, 2, 3);
            let root = 2.0 * f.get(0, 1) * det(&f.principal(&[0, 1, 2, 3])).max(0.0).sqrt();
            let got = want.get(1, 3);
            if (base - root - got).abs() < 1e-8 {
                minus += 1;
            } else if (base + root - got).abs() < 1e-8 {
                plus += 1;
            }
        }
        assert_eq!(plus + minus, 400);
        assert!(plus > 150 && minus > 150, "{plus} {minus}");
    }

    #[test]
    fn rank_three_falls_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(106);
        let flat = CosetTuple::new(
            (0..5)
                .map(|_| {
                    let g = crate::su2::UnitQuaternion::haar_sample(&mut rng);
                    crate::su2::UnitQuaternion::from_components([g.a_re, g.a_im, g.b_re, 0.0])
                })
                .collect(),
        )
        .unwrap();
        let sf = SheetedForm::of_tuple(&flat);
        assert_eq!(sf.sheet(), 0);
        let out = form_left_multiply(&sf, 2, 3, SignRule::Theta).unwrap();
        assert_eq!(out.path, ActionPath::OracleFallback);
        let want = oracle_form(&flat, GeneratorToken::LeftMultiply(2, 3)).unwrap();
        assert!(out.form.form().max_abs_diff(&want) < 1e-8);
    }

    #[test]
    fn word_action_matches_tuple_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        let w: GroupWord = "perm:3,2,5,4 s2 inv:4 lmul:3,5 s3^-1 s1".parse().unwrap();
        for _ in 0..50 {
            let (t, sf) = sample(5, &mut rng);
            let got = form_act(&sf, &w, SignRule::Theta).unwrap();
            let want = SheetedForm::of_tuple(&act_tuple(&t, &w).unwrap());
            assert!(got.form.form().max_abs_diff(want.form()) < 1e-8);
            assert_eq!(got.form.sheet(), want.sheet());
            assert_eq!(got.path, ActionPath::OracleFallback);
        }
    }
}
