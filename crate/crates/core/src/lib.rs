//! Exact symbolic engine for the infinitesimal symmetries of Goursat flags
//! and special 2-flags in (extended) Kumpera-Ruiz coordinates.
//!
//! * [`symexpr`]: canonical expressions, vector fields, brackets.
//! * [`flags`]: class codes, enumeration, the lookback index `s(j)`.
//! * [`frames`]: frame ladders, derived flags, membership, growth vectors,
//!   point classification.
//! * [`symmetry`]: generation and verification of symmetries.
//! * [`moduli`]: freeze analysis at reference points.

pub mod error;
pub mod flags;
pub mod frames;
pub mod linalg;
pub mod moduli;
pub mod sampling;
pub mod scalar;
pub mod symexpr;
pub mod symmetry;

pub use error::{AnalysisError, CodeError, ExprError, ParseError};
pub use flags::ClassCode;
pub use frames::Frame;
pub use scalar::{Rational, Scalar};
pub use symexpr::{Coord, DerivAtom, Expr, LinForm, Mode, PointSpec, VecField};
pub use symmetry::SymmetryField;
