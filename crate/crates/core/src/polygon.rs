//! Closed polygonal curves on S³ with prescribed side lengths, and pure braids acting on them.
//!
//! A conjugacy tuple `(r₁, …, r_m)` with `r₁⋯r_m = 1` gives the closed curve through
//! the partial products `1, r₁, r₁r₂, …`; side `k` has length equal to the eigen-angle of `r_k`.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::actions::{act_tuple, ActionError, CheckReport, GroupWord};
use crate::coset::{equivalent, CosetError, CosetTuple};
use crate::parallel::{map_chunks, McConfig};
use crate::su2::UnitQuaternion;

pub const CLOSURE_TOL: f64 = 1e-9;
pub const SIDE_TOL: f64 = 1e-10;

/// Sides closer than this to 0 or π are degenerate.
const SIDE_DEGENERACY: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolygonError {
    #[error("product of the rotations is off the identity by {deviation:e}")]
    NotClosed { deviation: f64 },
    #[error("no closed polygon found in {attempts} attempts")]
    Unsamplable { attempts: usize },
    #[error("word induces the permutation {0:?}, not the identity")]
    NotPure(Vec<usize>),
    #[error("side {index} has length {value}, outside (0, π)")]
    InvalidSideLength { index: usize, value: f64 },
    #[error("{sides} sides given, at least {min} required")]
    TooFewSides { sides: usize, min: usize },
    #[error("invalid vertices: {0}")]
    InvalidVertices(String),
    #[error(transparent)]
    Action(#[from] ActionError),
}

impl From<CosetError> for PolygonError {
    fn from(e: CosetError) -> Self {
        PolygonError::Action(e.into())
    }
}

pub type Result<T> = std::result::Result<T, PolygonError>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolygonRecord", into = "PolygonRecord")]
pub struct SphericalPolygon {
    vertices: Vec<UnitQuaternion>,
    side_lengths: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolygonRecord {
    theta: Vec<f64>,
    vertices: Vec<[f64; 4]>,
}

impl TryFrom<PolygonRecord> for SphericalPolygon {
    type Error = PolygonError;

    fn try_from(r: PolygonRecord) -> Result<Self> {
        if r.theta.len() != r.vertices.len() {
            return Err(PolygonError::InvalidVertices(format!(
                "{} side lengths for {} vertices",
                r.theta.len(),
                r.vertices.len()
            )));
        }
        let vertices = r
            .vertices
            .iter()
            .enumerate()
            .map(|(i, v)| {
                UnitQuaternion::try_from_unit(*v)
                    .ok_or_else(|| PolygonError::InvalidVertices(format!("vertex {} is not a unit quaternion", i + 1)))
            })
            .collect::<Result<Vec<_>>>()?;
        let p = SphericalPolygon::from_vertices(&vertices)?;
        for (k, (&want, &got)) in r.theta.iter().zip(&p.side_lengths).enumerate() {
            if (want - got).abs() > SIDE_TOL {
                return Err(PolygonError::InvalidVertices(format!(
                    "side {} has length {got}, theta says {want}",
                    k + 1
                )));
            }
        }
        Ok(p)
    }
}

impl From<SphericalPolygon> for PolygonRecord {
    fn from(p: SphericalPolygon) -> Self {
        PolygonRecord {
            theta: p.side_lengths,
            vertices: p.vertices.iter().map(|v| v.to_array()).collect(),
        }
    }
}

fn product(rs: &[UnitQuaternion]) -> UnitQuaternion {
    rs.iter().fold(UnitQuaternion::IDENTITY, |acc, r| acc.compose(*r))
}

fn check_side(index: usize, theta: f64) -> Result<()> {
    if theta.is_finite() && theta > SIDE_DEGENERACY && theta < std::f64::consts::PI - SIDE_DEGENERACY {
        Ok(())
    } else {
        Err(PolygonError::InvalidSideLength { index, value: theta })
    }
}

impl SphericalPolygon {
    /// Vertices are the partial products `1, r₁, r₁r₂, …, r₁⋯r_{m−1}`.
    pub fn from_conjugacy_tuple(rs: &[UnitQuaternion]) -> Result<Self> {
        if rs.len() < 2 {
            return Err(PolygonError::TooFewSides {
                sides: rs.len(),
                min: 2,
            });
        }
        let deviation = product(rs).max_abs_diff(UnitQuaternion::IDENTITY);
        if deviation > CLOSURE_TOL {
            return Err(PolygonError::NotClosed { deviation });
        }
        let side_lengths: Vec<f64> = rs.iter().map(|r| r.eigen_angle()).collect();
        for (k, &t) in side_lengths.iter().enumerate() {
            check_side(k + 1, t)?;
        }
        let mut vertices = Vec::with_capacity(rs.len());
        let mut acc = UnitQuaternion::IDENTITY;
        for r in &rs[..rs.len() - 1] {
            vertices.push(acc);
            acc = acc.compose(*r);
        }
        vertices.push(acc);
        Ok(Self { vertices, side_lengths })
    }

    /// The curve through the given vertices, first vertex moved to the identity.
    pub fn from_vertices(vertices: &[UnitQuaternion]) -> Result<Self> {
        let Some(&first) = vertices.first() else {
            return Err(PolygonError::TooFewSides { sides: 0, min: 2 });
        };
        let a: Vec<UnitQuaternion> = vertices.iter().map(|v| first.inverse().compose(*v)).collect();
        let m = a.len();
        let rs: Vec<UnitQuaternion> = (0..m).map(|k| a[k].inverse().compose(a[(k + 1) % m])).collect();
        Self::from_conjugacy_tuple(&rs)
    }

    pub fn vertices(&self) -> &[UnitQuaternion] {
        &self.vertices
    }

    pub fn side_lengths(&self) -> &[f64] {
        &self.side_lengths
    }

    pub fn sides(&self) -> usize {
        self.vertices.len()
    }

    /// `r_k = A_k⁻¹ A_{k+1}`, cyclically.
    pub fn conjugacy_tuple(&self) -> Vec<UnitQuaternion> {
        let m = self.vertices.len();
        (0..m)
            .map(|k| self.vertices[k].inverse().compose(self.vertices[(k + 1) % m]))
            .collect()
    }

    /// `(A₁, …, A_m)` as a coset tuple; its ζ and sheet classify the polygon up to rotation.
    pub fn vertex_tuple(&self) -> CosetTuple {
        CosetTuple::new(self.vertices.clone()).expect("a polygon has at least two vertices")
    }

    /// Largest deviation of a side from its recorded length, and of the closing product from 1.
    pub fn invariant_residuals(&self) -> (f64, f64) {
        let m = self.vertices.len();
        let side = (0..m)
            .map(|k| (self.vertices[k].angular_distance(self.vertices[(k + 1) % m]) - self.side_lengths[k]).abs())
            .fold(0.0, f64::max);
        let closure = product(&self.conjugacy_tuple()).max_abs_diff(UnitQuaternion::IDENTITY);
        (side, closure)
    }
}

/// Equality in the polygon space: equal vertex Gram matrices and orientation.
pub fn polygons_equivalent(a: &SphericalPolygon, b: &SphericalPolygon) -> Result<bool> {
    Ok(equivalent(&a.vertex_tuple(), &b.vertex_tuple())?)
}

/// A rotation with eigen-angle `theta` about a uniformly random axis.
fn random_rotation<R: Rng + ?Sized>(theta: f64, rng: &mut R) -> UnitQuaternion {
    UnitQuaternion::from_angle_axis(theta, UnitQuaternion::random_axis(rng))
}

/// Solves `x·y = q` with eigen-angles `α` for `x` and `β` for `y`.
///
/// With `x = cos α + sin α·u` and `q = cos ψ + sin ψ·w`, `Re(x⁻¹q) = cos β` fixes
/// `u·w`; the component of `u` orthogonal to `w` is drawn at random.
fn close_pair<R: Rng + ?Sized>(
    alpha: f64,
    beta: f64,
    q: UnitQuaternion,
    rng: &mut R,
) -> Option<(UnitQuaternion, UnitQuaternion)> {
    let psi = q.eigen_angle();
    let (sa, ca) = alpha.sin_cos();
    let sp = psi.sin();
    if sp.abs() < 1e-9 {
        return None;
    }
    let c = (beta.cos() - ca * psi.cos()) / (sa * sp);
    if c.abs() > 1.0 {
        return None;
    }
    let v = q.vector_part();
    let w = nalgebra::Vector3::from(v).normalize();
    let e = loop {
        let r = nalgebra::Vector3::from(UnitQuaternion::random_axis(rng));
        if let Some(p) = (r - w * w.dot(&r)).try_normalize(1e-6) {
            break p;
        }
    };
    let u = w * c + e * (1.0 - c * c).max(0.0).sqrt();
    let x = UnitQuaternion::from_components([ca, sa * u.x, sa * u.y, sa * u.z]);
    let y = x.inverse().compose(q);
    Some((x, y))
}

/// A closed polygon with side lengths `theta` (at least three sides). All but the last
/// two rotations are drawn with random axes; the last two are then solved for.
pub fn sample_closed<R: Rng + ?Sized>(theta: &[f64], rng: &mut R, max_attempts: usize) -> Result<SphericalPolygon> {
    let m = theta.len();
    if m < 3 {
        return Err(PolygonError::TooFewSides { sides: m, min: 3 });
    }
    for (k, &t) in theta.iter().enumerate() {
        check_side(k + 1, t)?;
    }
    for _ in 0..max_attempts {
        let mut rs: Vec<UnitQuaternion> = theta[..m - 2].iter().map(|&t| random_rotation(t, rng)).collect();
        let q = product(&rs).inverse();
        let Some((x, y)) = close_pair(theta[m - 2], theta[m - 1], q, rng) else {
            continue;
        };
        rs.push(x);
        rs.push(y);
        let Ok(p) = SphericalPolygon::from_conjugacy_tuple(&rs) else {
            continue;
        };
        if p.side_lengths.iter().zip(theta).all(|(a, b)| (a - b).abs() <= SIDE_TOL) {
            return Ok(p);
        }
    }
    Err(PolygonError::Unsamplable { attempts: max_attempts })
}

/// Acts by a pure braid on the conjugacy tuple `(r₁, …, r_m)`.
pub fn pure_braid_act(p: &SphericalPolygon, w: &GroupWord) -> Result<SphericalPolygon> {
    let n = p.sides() + 1;
    let Some(perm) = w.underlying_permutation(n) else {
        return Err(PolygonError::Action(ActionError::Index(format!(
            "`{w}` is not a braid word"
        ))));
    };
    if perm.iter().enumerate().any(|(i, &k)| k != i + 2) {
        return Err(PolygonError::NotPure(perm));
    }
    let mut elements = vec![UnitQuaternion::IDENTITY];
    elements.extend(p.conjugacy_tuple());
    let out = act_tuple(&CosetTuple::new(elements)?, w)?;
    SphericalPolygon::from_conjugacy_tuple(out.tail())
}

/// Samples polygons with side lengths `theta`, applies `w`, and checks sides and closure.
pub fn verify_pure_braid_action(theta: &[f64], w: &GroupWord, trials: usize, cfg: &McConfig) -> Result<CheckReport> {
    let outcomes = map_chunks(trials, cfg, |count, rng| {
        (0..count)
            .map(|_| {
                let p = sample_closed(theta, rng, 1000)?;
                let q = pure_braid_act(&p, w)?;
                let side = q
                    .side_lengths()
                    .iter()
                    .zip(p.side_lengths())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                let (res_side, closure) = q.invariant_residuals();
                let moved = !matches!(polygons_equivalent(&p, &q), Ok(true));
                Ok((side.max(res_side), closure, moved))
            })
            .collect::<Result<Vec<_>>>()
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?
    .into_iter()
    .flatten()
    .collect::<Vec<_>>();
    let mut r = CheckReport::new("polygon-pure", trials);
    r.check(
        "side_length_deviation",
        outcomes.iter().map(|o| o.0).fold(0.0, f64::max),
        SIDE_TOL,
    );
    r.check(
        "closure_deviation",
        outcomes.iter().map(|o| o.1).fold(0.0, f64::max),
        CLOSURE_TOL,
    );
    let moved = outcomes.iter().filter(|o| o.2).count();
    r.notes.push(format!(
        "{moved}/{} polygons moved to a different point of the polygon space",
        outcomes.len()
    ));
    Ok(r)
}
