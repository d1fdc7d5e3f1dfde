pub mod actions;
pub mod coset;
pub mod haar;
pub mod json;
pub(crate) mod linalg;
pub mod parallel;
pub mod polygon;
pub mod su2;
