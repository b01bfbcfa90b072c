//! Word combinatorics of substitution shifts and the piecewise-affine
//! approximants `T_n` of their conjugate interval exchange transformations.
//!
//! The pipeline runs bottom-up:
//!
//! * [`substitution`]: morphisms, primitivity, fixed points, letter frequencies;
//! * [`language`]: factor tables with complexity and special factors;
//! * [`partition`]: the cylinder refinement on which the shift is an
//!   interval translation;
//! * [`measure`]: exact cylinder measure estimates and invariance defects;
//! * [`ietmap`]: the approximants, their discontinuities and limit data;
//! * [`coding`]: natural coding of finite exchanges (golden rotation);
//! * [`export`]: CSV and SVG output;
//! * [`checks`]: the invariant suite behind `verify`.

pub mod checks;
pub mod coding;
pub mod error;
pub mod export;
pub mod fixtures;
pub mod ietmap;
pub mod language;
pub mod measure;
pub mod partition;
pub mod substitution;
pub mod word;

pub use error::{Error, Result};
pub use fixtures::Fixture;
pub use ietmap::PiecewiseAffineMap;
pub use language::FactorTable;
pub use measure::MeasureTable;
pub use partition::{refine, Classification, PartitionResult};
pub use substitution::Substitution;
pub use word::{Alphabet, Letter, Word};
