//! SU(2) as the unit sphere S³ ⊂ ℝ⁴.
//!
//! An element is stored as the four real components of the first row `(a, b)`
//! of the matrix
//!
//! ```text
//!     ⎡  a   b ⎤
//!     ⎣ -b̄   ā ⎦      |a|² + |b|² = 1
//! ```
//!
//! so unitarity and `det = 1` hold by construction. The coordinates
//! `(a_re, a_im, b_re, b_im)` coincide with the quaternion `x0 + x1·i + x2·j + x3·k`
//! under `i ↦ diag(i, -i)`, `j ↦ [[0, 1], [-1, 0]]`, `k ↦ [[0, i], [i, 0]]`.

use std::f64::consts::PI;
use std::fmt;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// Overshoot of `|cos| > 1` that is attributed to round-off and clamped.
pub const ARCCOS_CLAMP: f64 = 1e-12;

/// Allowed deviation of `|a|² + |b|²` from 1.
pub const UNIT_NORM_TOL: f64 = 1e-12;

#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct UnitQuaternion {
    pub a_re: f64,
    pub a_im: f64,
    pub b_re: f64,
    pub b_im: f64,
}

impl fmt::Debug for UnitQuaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{:+.6}{:+.6}i, {:+.6}{:+.6}i]",
            self.a_re, self.a_im, self.b_re, self.b_im
        )
    }
}

impl From<[f64; 4]> for UnitQuaternion {
    fn from(v: [f64; 4]) -> Self {
        Self::from_components(v)
    }
}

impl From<UnitQuaternion> for [f64; 4] {
    fn from(q: UnitQuaternion) -> Self {
        q.to_array()
    }
}

impl UnitQuaternion {
    pub const IDENTITY: Self = Self {
        a_re: 1.0,
        a_im: 0.0,
        b_re: 0.0,
        b_im: 0.0,
    };

    pub fn identity() -> Self {
        Self::IDENTITY
    }

    /// Builds an element from raw components, rescaling onto S³.
    ///
    /// The zero vector has no direction and maps to the identity.
    pub fn from_components(v: [f64; 4]) -> Self {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Self::IDENTITY;
        }
        Self {
            a_re: v[0] / norm,
            a_im: v[1] / norm,
            b_re: v[2] / norm,
            b_im: v[3] / norm,
        }
    }

    /// Builds an element from components that are already unit length.
    /// Returns `None` when the norm is off by more than [`UNIT_NORM_TOL`].
    pub fn try_from_unit(v: [f64; 4]) -> Option<Self> {
        let n2: f64 = v.iter().map(|x| x * x).sum();
        if (n2 - 1.0).abs() > UNIT_NORM_TOL || !n2.is_finite() {
            return None;
        }
        Some(Self {
            a_re: v[0],
            a_im: v[1],
            b_re: v[2],
            b_im: v[3],
        })
    }

    /// `diag(e^{iα}, e^{-iα})`.
    pub fn diag(alpha: f64) -> Self {
        Self {
            a_re: alpha.cos(),
            a_im: alpha.sin(),
            b_re: 0.0,
            b_im: 0.0,
        }
    }

    /// `cos φ + sin φ · axis` for a unit imaginary `axis = (x1, x2, x3)`.
    /// The result has eigen-angle `φ` when `φ ∈ [0, π]`.
    pub fn from_angle_axis(phi: f64, axis: [f64; 3]) -> Self {
        let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        let (s, c) = phi.sin_cos();
        if n == 0.0 {
            return Self::diag(phi);
        }
        Self::from_components([c, s * axis[0] / n, s * axis[1] / n, s * axis[2] / n])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.a_re, self.a_im, self.b_re, self.b_im]
    }

    pub fn norm_sqr(self) -> f64 {
        self.a_re * self.a_re + self.a_im * self.a_im + self.b_re * self.b_re + self.b_im * self.b_im
    }

    pub fn is_unit(self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= UNIT_NORM_TOL
    }

    fn renormalized(self) -> Self {
        let n = self.norm_sqr().sqrt();
        Self {
            a_re: self.a_re / n,
            a_im: self.a_im / n,
            b_re: self.b_re / n,
            b_im: self.b_im / n,
        }
    }

    /// Matrix product `self · other`, renormalized onto S³.
    pub fn compose(self, other: Self) -> Self {
        // a = a₁a₂ − b₁b̄₂,  b = a₁b₂ + b₁ā₂
        let (a1r, a1i, b1r, b1i) = (self.a_re, self.a_im, self.b_re, self.b_im);
        let (a2r, a2i, b2r, b2i) = (other.a_re, other.a_im, other.b_re, other.b_im);
        Self {
            a_re: a1r * a2r - a1i * a2i - (b1r * b2r + b1i * b2i),
            a_im: a1r * a2i + a1i * a2r - (b1i * b2r - b1r * b2i),
            b_re: a1r * b2r - a1i * b2i + (b1r * a2r + b1i * a2i),
            b_im: a1r * b2i + a1i * b2r + (b1i * a2r - b1r * a2i),
        }
        .renormalized()
    }

    /// `(ā, −b)`.
    pub fn inverse(self) -> Self {
        Self {
            a_re: self.a_re,
            a_im: -self.a_im,
            b_re: -self.b_re,
            b_im: -self.b_im,
        }
    }

    /// Matrix transpose, `(a, −b̄)`. In ℝ⁴ this is the reflection `b_re ↦ −b_re`.
    pub fn transpose(self) -> Self {
        Self {
            a_re: self.a_re,
            a_im: self.a_im,
            b_re: -self.b_re,
            b_im: self.b_im,
        }
    }

    /// `h · self · h⁻¹`.
    pub fn conjugate(self, h: Self) -> Self {
        h.compose(self).compose(h.inverse())
    }

    /// The point `−self` (the central element −1 times `self`).
    pub fn negate(self) -> Self {
        Self {
            a_re: -self.a_re,
            a_im: -self.a_im,
            b_re: -self.b_re,
            b_im: -self.b_im,
        }
    }

    /// Euclidean inner product in ℝ⁴, `Re(a_g ā_h + b_g b̄_h) = ½ Re tr(g h⁻¹)`.
    pub fn inner(self, other: Self) -> f64 {
        self.a_re * other.a_re + self.a_im * other.a_im + self.b_re * other.b_re + self.b_im * other.b_im
    }

    /// Spherical distance on S³.
    pub fn angular_distance(self, other: Self) -> f64 {
        clamped_acos(self.inner(other))
    }

    /// The angle `φ ∈ [0, π]` such that the eigenvalues are `e^{±iφ}`.
    pub fn eigen_angle(self) -> f64 {
        clamped_acos(self.a_re)
    }

    /// Imaginary (rotation axis) part `(a_im, b_re, b_im)`.
    pub fn vector_part(self) -> [f64; 3] {
        [self.a_im, self.b_re, self.b_im]
    }

    /// `±1` within `tol` on the imaginary part.
    pub fn is_central(self, tol: f64) -> bool {
        let [x, y, z] = self.vector_part();
        (x * x + y * y + z * z).sqrt() <= tol
    }

    pub fn max_abs_diff(self, other: Self) -> f64 {
        self.to_array()
            .iter()
            .zip(other.to_array())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }

    /// Haar-random element: four i.i.d. standard normals scaled to unit length.
    pub fn haar_sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let v: [f64; 4] = [
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
            ];
            let n2: f64 = v.iter().map(|x| x * x).sum();
            // probability of landing this close to 0 is ~1e-40; keeps the direction well defined
            if n2 > 1e-20 {
                return Self::from_components(v);
            }
        }
    }

    /// Uniform unit vector in ℝ³, used as a random rotation axis.
    pub fn random_axis<R: Rng + ?Sized>(rng: &mut R) -> [f64; 3] {
        loop {
            let v: [f64; 3] = [
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
            ];
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            if n > 1e-10 {
                return [v[0] / n, v[1] / n, v[2] / n];
            }
        }
    }
}

/// `arccos` that clamps round-off overshoot up to [`ARCCOS_CLAMP`].
///
/// # Panics
/// Panics when `|x| > 1 + ARCCOS_CLAMP`; that is a logic error upstream, not round-off.
pub fn clamped_acos(x: f64) -> f64 {
    assert!(
        x.abs() <= 1.0 + ARCCOS_CLAMP,
        "arccos argument {x} exceeds the round-off clamp"
    );
    if x >= 1.0 {
        0.0
    } else if x <= -1.0 {
        PI
    } else {
        x.acos()
    }
}

/// CDF of the eigen-angle law `(2/π) sin²φ` on `[0, π]`.
pub fn eigen_angle_cdf(phi: f64) -> f64 {
    let phi = phi.clamp(0.0, PI);
    (phi - phi.sin() * phi.cos()) / PI
}
