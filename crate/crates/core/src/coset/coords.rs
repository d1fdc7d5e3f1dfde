//! Coordinates of a canonical representative `(1, diag(e^{iφ}, e^{−iφ}), g₃, …, gₙ)`.
//!
//! For each `g_{j+2}` write `a = x_j + i y_j`, `b = e^{iθ_j} √(1 − x_j² − y_j²)`. The form
//! entries are then
//!
//! ```text
//!     p      = cos φ
//!     q_j    = x_j
//!     r_j    = x_j cos φ + y_j sin φ
//!     t_ij   = x_i x_j + y_i y_j + ρ_i ρ_j cos(θ_i − θ_j)
//! ```
//!
//! and only differences of the `θ_j` are coset invariants; the gauge `θ₁ = 0` is used.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{sheet, CosetError, CosetTuple, Result, SpectralForm, DEGENERACY_TOL};
use crate::linalg::det3;
use crate::su2::UnitQuaternion;

/// Tolerance on `cos(θ_i − θ_j)` when checking a sign assignment.
const SIGN_CONSISTENCY_TOL: f64 = 1e-8;

/// Below this `|sin(θ_j)|` the sign of `θ_j` is immaterial.
const SIGN_PIVOT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointCoordinates {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CanonicalCoordinates {
    pub phi: f64,
    pub points: Vec<PointCoordinates>,
}

fn wrap_angle(a: f64) -> f64 {
    let mut w = a.rem_euclid(2.0 * PI);
    if w > PI {
        w -= 2.0 * PI;
    }
    w
}

impl CanonicalCoordinates {
    /// Shifts all θ so that `θ₁ = 0`, wrapping into `(−π, π]`.
    pub fn gauge_fixed(mut self) -> Self {
        if let Some(t0) = self.points.first().map(|p| p.theta) {
            for p in &mut self.points {
                p.theta = wrap_angle(p.theta - t0);
            }
        }
        self
    }

    /// Form entries computed directly from the coordinates.
    pub fn forward_form(&self) -> SpectralForm {
        let m = self.points.len();
        let n = m + 2;
        let (s, c) = self.phi.sin_cos();
        let rho = |p: &PointCoordinates| (1.0 - p.x * p.x - p.y * p.y).max(0.0).sqrt();
        let mut upper = Vec::with_capacity(n * (n - 1) / 2);
        upper.push(c);
        upper.extend(self.points.iter().map(|p| p.x));
        upper.extend(self.points.iter().map(|p| p.x * c + p.y * s));
        for i in 0..m {
            for j in i + 1..m {
                let (pi, pj) = (&self.points[i], &self.points[j]);
                upper.push(pi.x * pj.x + pi.y * pj.y + rho(pi) * rho(pj) * (pi.theta - pj.theta).cos());
            }
        }
        SpectralForm::from_upper(n, upper).expect("forward form has valid shape")
    }
}

/// Coordinates of a canonical tuple.
///
/// Requires `g₁ = 1` and `g₂` diagonal with `Im a ≥ 0`. Fails with
/// [`CosetError::DegenerateTuple`] when some `x_j² + y_j² = 1` within 1e−12.
pub fn to_coordinates(t: &CosetTuple) -> Result<CanonicalCoordinates> {
    if t.len() < 3 {
        return Err(CosetError::TooShort { n: t.len(), min: 3 });
    }
    if !t.is_normalized() {
        return Err(CosetError::NotCanonical("leading element is not the identity".into()));
    }
    let g2 = t.get(1);
    if g2.b_re.hypot(g2.b_im) > 1e-12 || g2.a_im < -1e-12 {
        return Err(CosetError::NotCanonical(
            "second element is not diag(e^{iφ}, e^{-iφ}), φ ∈ [0, π]".into(),
        ));
    }
    let phi = g2.a_im.max(0.0).atan2(g2.a_re);
    let points = t.elements()[2..]
        .iter()
        .enumerate()
        .map(|(j, g)| {
            let rho2 = 1.0 - g.a_re * g.a_re - g.a_im * g.a_im;
            if rho2 <= DEGENERACY_TOL {
                return Err(CosetError::DegenerateTuple(format!(
                    "element {} has b = 0; θ undefined",
                    j + 2
                )));
            }
            Ok(PointCoordinates {
                x: g.a_re,
                y: g.a_im,
                theta: g.b_im.atan2(g.b_re),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CanonicalCoordinates { phi, points }.gauge_fixed())
}

/// The canonical tuple with the given coordinates.
pub fn from_coordinates(c: &CanonicalCoordinates) -> Result<CosetTuple> {
    let mut elements = vec![UnitQuaternion::IDENTITY, UnitQuaternion::diag(c.phi)];
    for (j, p) in c.points.iter().enumerate() {
        let r2 = p.x * p.x + p.y * p.y;
        if r2 > 1.0 + 1e-12 || !r2.is_finite() {
            return Err(CosetError::DegenerateTuple(format!("point {j} has x² + y² = {r2} > 1")));
        }
        let rho = (1.0 - r2).max(0.0).sqrt();
        let (s, co) = p.theta.sin_cos();
        elements.push(UnitQuaternion::from_components([p.x, p.y, rho * co, rho * s]));
    }
    CosetTuple::new(elements)
}

/// `det [[1, p, q_i], [p, 1, r_i], [q_j, r_j, t_ij]]` with indices into the points.
fn minor3(f: &SpectralForm, i: usize, j: usize) -> f64 {
    let (pi, pj) = (i + 2, j + 2);
    det3([
        [1.0, f.get(0, 1), f.get(0, pi)],
        [f.get(0, 1), 1.0, f.get(1, pi)],
        [f.get(0, pj), f.get(1, pj), f.get(pi, pj)],
    ])
}

struct ThetaData {
    phi: f64,
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// `cos(θ_i − θ_j)` for all pairs.
    cos: Vec<Vec<f64>>,
}

fn theta_data(f: &SpectralForm) -> Result<ThetaData> {
    let n = f.n();
    if n < 3 {
        return Err(CosetError::TooShort { n, min: 3 });
    }
    let p = f.get(0, 1);
    let one_minus_p2 = 1.0 - p * p;
    if one_minus_p2 <= 1e-12 {
        return Err(CosetError::DegenerateForm(format!("1 − p² = {one_minus_p2:e}")));
    }
    let m = n - 2;
    let diag: Vec<f64> = (0..m).map(|j| minor3(f, j, j)).collect();
    if let Some((j, d)) = diag.iter().enumerate().find(|(_, &d)| d <= 1e-12) {
        return Err(CosetError::DegenerateForm(format!("3×3 minor for point {j} is {d:e}")));
    }
    let xs: Vec<f64> = (0..m).map(|j| f.get(0, j + 2)).collect();
    let ys: Vec<f64> = (0..m)
        .map(|j| (f.get(1, j + 2) - xs[j] * p) / one_minus_p2.sqrt())
        .collect();
    let cos = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| (minor3(f, i, j) / (diag[i] * diag[j]).sqrt()).clamp(-1.0, 1.0))
                .collect()
        })
        .collect();
    Ok(ThetaData {
        phi: p.clamp(-1.0, 1.0).acos(),
        xs,
        ys,
        cos,
    })
}

/// Inverse of [`CanonicalCoordinates::forward_form`].
///
/// `signs[k]` is the sign of `θ_{k+2} − θ₁` (one entry per point after the first); the
/// magnitudes come from `cos(θ_1 − θ_j)`. The assignment is checked against every
/// `cos(θ_i − θ_j)` in the form.
pub fn coordinates_from_form(f: &SpectralForm, signs: &[i8]) -> Result<CanonicalCoordinates> {
    let d = theta_data(f)?;
    let m = d.xs.len();
    if signs.len() != m - 1 {
        return Err(CosetError::DimensionMismatch(format!(
            "{} signs for {} points",
            signs.len(),
            m
        )));
    }
    let thetas: Vec<f64> = std::iter::once(0.0)
        .chain((1..m).map(|j| f64::from(signs[j - 1].signum()) * d.cos[0][j].acos()))
        .collect();
    for i in 1..m {
        for j in i + 1..m {
            let residual = ((thetas[i] - thetas[j]).cos() - d.cos[i][j]).abs();
            if residual > SIGN_CONSISTENCY_TOL {
                return Err(CosetError::InconsistentSigns { i, j, residual });
            }
        }
    }
    Ok(CanonicalCoordinates {
        phi: d.phi,
        points: (0..m)
            .map(|j| PointCoordinates {
                x: d.xs[j],
                y: d.ys[j],
                theta: thetas[j],
            })
            .collect(),
    })
}

/// One of the two consistent sign assignments (the other is its negation).
///
/// The first point with `|sin(θ_j − θ₁)| > 1e−6` is given sign `+1`; every other sign is
/// chosen to best match `cos(θ_pivot − θ_j)`.
pub fn resolve_theta_signs(f: &SpectralForm) -> Result<Vec<i8>> {
    let d = theta_data(f)?;
    let m = d.xs.len();
    let alpha: Vec<f64> = (0..m).map(|j| d.cos[0][j].acos()).collect();
    let pivot = (1..m).find(|&j| alpha[j].sin() > SIGN_PIVOT_TOL);
    let mut signs = vec![1i8; m.saturating_sub(1)];
    if let Some(k) = pivot {
        for j in 1..m {
            if j == k {
                continue;
            }
            let plus = ((alpha[k] - alpha[j]).cos() - d.cos[k][j]).abs();
            let minus = ((alpha[k] + alpha[j]).cos() - d.cos[k][j]).abs();
            if minus < plus {
                signs[j - 1] = -1;
            }
        }
    }
    Ok(signs)
}

/// Coordinates whose canonical tuple lies on the given sheet.
pub fn coordinates_for_sheet(f: &SpectralForm, target_sheet: i8) -> Result<CanonicalCoordinates> {
    let signs = resolve_theta_signs(f)?;
    let coords = coordinates_from_form(f, &signs)?;
    if target_sheet == 0 || sheet(&from_coordinates(&coords)?) == target_sheet {
        return Ok(coords);
    }
    let flipped: Vec<i8> = signs.iter().map(|s| -s).collect();
    coordinates_from_form(f, &flipped)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coset::{canonicalize, equivalent, spectral_form};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_canonical(n: usize, rng: &mut ChaCha8Rng) -> CosetTuple {
        canonicalize(&CosetTuple::random(n, rng).unwrap()).unwrap().tuple
    }

    #[test]
    fn pure_b_example() {
        let c = CanonicalCoordinates {
            phi: PI / 2.0,
            points: vec![
                PointCoordinates {
                    x: 0.0,
                    y: 0.0,
                    theta: 0.0
                };
                2
            ],
        };
        let t = from_coordinates(&c).unwrap();
        for g in &t.elements()[2..] {
            assert!(g.max_abs_diff(UnitQuaternion::from_components([0.0, 0.0, 1.0, 0.0])) < 1e-15);
        }
    }

    #[test]
    fn forward_map_matches_inner_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        for _ in 0..100 {
            let t = random_canonical(5, &mut rng);
            let c = to_coordinates(&t).unwrap();
            let f = spectral_form(&t);
            assert!(c.forward_form().max_abs_diff(&f) < 1e-12);
            for (j, p) in c.points.iter().enumerate() {
                let r = p.x * c.phi.cos() + p.y * c.phi.sin();
                assert!((r - t.get(1).inner(t.get(j + 2))).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn coordinates_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for _ in 0..1000 {
            let t = random_canonical(5, &mut rng);
            let back = from_coordinates(&to_coordinates(&t).unwrap()).unwrap();
            assert!(back.max_abs_diff(&t) < 1e-10);
            assert_eq!(equivalent(&back, &t), Ok(true));
        }
    }

    #[test]
    fn inverse_map_recovers_coordinates() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..500 {
            let t = random_canonical(6, &mut rng);
            let c = to_coordinates(&t).unwrap();
            let f = spectral_form(&t);
            let got = coordinates_for_sheet(&f, sheet(&t)).unwrap();
            assert!((got.phi - c.phi).abs() < 1e-9);
            for (a, b) in got.points.iter().zip(&c.points) {
                assert!((a.x - b.x).abs() < 1e-9 && (a.y - b.y).abs() < 1e-9);
                assert!(wrap_angle(a.theta - b.theta).abs() < 1e-9, "{} vs {}", a.theta, b.theta);
            }
        }
    }

    #[test]
    fn cos_theta_matches_determinant_ratio() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..200 {
            let t = random_canonical(5, &mut rng);
            let c = to_coordinates(&t).unwrap();
            let d = theta_data(&spectral_form(&t)).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    let direct = (c.points[i].theta - c.points[j].theta).cos();
                    assert!((direct - d.cos[i][j]).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn both_global_sign_choices_are_consistent() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        let t = random_canonical(6, &mut rng);
        let f = spectral_form(&t);
        let s = resolve_theta_signs(&f).unwrap();
        let neg: Vec<i8> = s.iter().map(|x| -x).collect();
        assert!(coordinates_from_form(&f, &s).is_ok());
        assert!(coordinates_from_form(&f, &neg).is_ok());
        let mut bad = s.clone();
        bad[1] = -bad[1];
        assert!(matches!(
            coordinates_from_form(&f, &bad),
            Err(CosetError::InconsistentSigns { .. })
        ));
    }

    #[test]
    fn unit_p_is_degenerate() {
        let f = SpectralForm::from_upper(3, vec![1.0, 0.2, 0.2]).unwrap();
        assert!(matches!(
            coordinates_from_form(&f, &[]),
            Err(CosetError::DegenerateForm(_))
        ));
        let f = SpectralForm::from_upper(3, vec![-1.0, 0.2, -0.2]).unwrap();
        assert!(matches!(
            coordinates_from_form(&f, &[]),
            Err(CosetError::DegenerateForm(_))
        ));
    }

    #[test]
    fn degenerate_b_rejected() {
        let t = CosetTuple::new(vec![
            UnitQuaternion::IDENTITY,
            UnitQuaternion::diag(0.5),
            UnitQuaternion::diag(1.0),
        ])
        .unwrap();
        assert!(matches!(to_coordinates(&t), Err(CosetError::DegenerateTuple(_))));
    }
}
