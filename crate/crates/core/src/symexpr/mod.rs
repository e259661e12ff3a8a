//! Exact expressions polynomial in chart coordinates and affine in the
//! derivative atoms of the free base functions, with differentiation,
//! directional derivatives and Lie brackets.

mod coord;
mod expr;
mod field;
mod format;
mod linform;

pub use coord::{Base, Coord, CoordKind, DerivAtom, Mode, Mono};
pub use expr::{Expr, Term};
pub use field::{directional, lie_bracket, partial, VecField};
pub use format::{ExprRepr, TermRepr, VecFieldRepr};
pub use linform::{evaluate, substitute, LinForm, PointSpec};
