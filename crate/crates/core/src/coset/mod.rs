//! The double-coset space `K \ SU(2)ⁿ / K`.
//!
//! Points are represented by [`CosetTuple`]s; the complete invariant is the Gram
//! matrix of the tuple viewed as points of S³ (the [`SpectralForm`]) together with
//! an orientation bit (the sheet) that separates the two preimages of a rank-4 form.

mod completion;
mod coords;
mod form;
mod reconstruct;
mod tuple;

pub use completion::{complete_form, reflection_conjugator, solve_minor_quadratic, MinorRoots, PartialForm, TieBreak};
pub use coords::{
    coordinates_for_sheet, coordinates_from_form, from_coordinates, resolve_theta_signs, to_coordinates,
    CanonicalCoordinates, PointCoordinates,
};
pub use form::{
    equivalent, equivalent_with, sheet, sheet_of_vectors, spectral_form, validate_form, SheetedForm, SpectralForm,
    ValidationReport,
};
pub use reconstruct::reconstruct;
pub use tuple::{canonicalize, normalize_leading, Canonical, CosetTuple, Degeneracy};

use thiserror::Error;

/// Eigenvalue cutoff per unit of `n` for PSD and rank tests.
pub const EIG_TOL_PER_N: f64 = 1e-9;

/// Maximum ζ-distance at which two tuples are declared equivalent.
pub const EQUIV_TOL: f64 = 1e-8;

/// Upper end of the ambiguous ζ-distance band.
pub const BORDERLINE_TOL: f64 = 1e-6;

/// Threshold below which a rotation axis or a `b` component counts as vanishing.
pub const DEGENERACY_TOL: f64 = 1e-12;

pub fn eig_tol(n: usize) -> f64 {
    EIG_TOL_PER_N * n as f64
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CosetError {
    #[error("tuple has {n} elements, need at least {min}")]
    TooShort { n: usize, min: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("element {index} is not a unit quaternion")]
    NotUnit { index: usize },
    #[error("degenerate tuple: {0}")]
    DegenerateTuple(String),
    #[error("tuple is not in canonical form: {0}")]
    NotCanonical(String),
    #[error("invalid spectral form: {0}")]
    InvalidForm(String),
    #[error("numerical rank is ambiguous: 4th eigenvalue {lambda4:e} lies in the threshold band")]
    RankAmbiguous { lambda4: f64 },
    #[error("sheet {sheet} is inconsistent with a form of numerical rank {rank}")]
    SheetMismatch { sheet: i8, rank: usize },
    #[error("degenerate form: {0}")]
    DegenerateForm(String),
    #[error("signs violate θ-difference consistency at ({i}, {j}): residual {residual:e}")]
    InconsistentSigns { i: usize, j: usize, residual: f64 },
    #[error("entry ({i}, {j}) is missing")]
    MissingEntry { i: usize, j: usize },
    #[error("minor quadratic has complex roots (discriminant {discriminant:e})")]
    ComplexRoots { discriminant: f64 },
    #[error("minor quadratic degenerates (leading coefficient {leading:e})")]
    DegenerateQuadratic { leading: f64 },
    #[error("top-left 4×4 block is rank deficient (smallest eigenvalue {lambda_min:e})")]
    RankDeficientBlock { lambda_min: f64 },
    #[error("both roots for entry ({i}, {j}) keep rank 4; an explicit branch choice is required")]
    AmbiguousBranch { i: usize, j: usize },
    #[error("completed form fails validation: {0}")]
    InconsistentCompletion(String),
    #[error("ζ-distance {distance:e} is inside the borderline band")]
    Borderline { distance: f64 },
}

pub type Result<T> = std::result::Result<T, CosetError>;
