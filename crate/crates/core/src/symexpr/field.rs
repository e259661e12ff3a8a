use std::collections::BTreeMap;

use super::coord::{Coord, Mode};
use super::expr::Expr;
use crate::error::ExprError;
use crate::scalar::Scalar;

/// A polynomial vector field: finitely many nonzero components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VecField {
    mode: Mode,
    comps: BTreeMap<Coord, Expr>,
}

impl VecField {
    pub fn zero(mode: Mode) -> VecField {
        VecField { mode, comps: BTreeMap::new() }
    }

    /// The coordinate field `∂_c`.
    pub fn coord(c: Coord) -> VecField {
        let mut v = VecField::zero(c.mode());
        v.set(c, Expr::one(c.mode()));
        v
    }

    pub fn from_components(mode: Mode, comps: impl IntoIterator<Item = (Coord, Expr)>) -> VecField {
        let mut v = VecField::zero(mode);
        for (c, e) in comps {
            v.add_component(c, &e);
        }
        v
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn set(&mut self, c: Coord, e: Expr) {
        debug_assert_eq!(c.mode(), self.mode);
        if e.is_zero() {
            self.comps.remove(&c);
        } else {
            self.comps.insert(c, e);
        }
    }

    pub fn add_component(&mut self, c: Coord, e: &Expr) {
        let sum = &self.get(c) + e;
        self.set(c, sum);
    }

    pub fn get(&self, c: Coord) -> Expr {
        self.comps.get(&c).cloned().unwrap_or_else(|| Expr::zero(self.mode))
    }

    pub fn component(&self, c: Coord) -> Option<&Expr> {
        self.comps.get(&c)
    }

    /// Nonzero components in coordinate order.
    pub fn components(&self) -> impl Iterator<Item = (Coord, &Expr)> {
        self.comps.iter().map(|(c, e)| (*c, e))
    }

    pub fn has_atoms(&self) -> bool {
        self.comps.values().any(Expr::has_atoms)
    }

    pub fn add(&self, other: &VecField) -> VecField {
        let mut out = self.clone();
        for (c, e) in &other.comps {
            out.add_component(*c, e);
        }
        out
    }

    pub fn sub(&self, other: &VecField) -> VecField {
        self.add(&other.scale(&Scalar::from_int(-1)))
    }

    pub fn scale(&self, s: &Scalar) -> VecField {
        VecField::from_components(self.mode, self.comps.iter().map(|(c, e)| (*c, e.scale(s))))
    }

    /// Multiply every component by an expression.
    pub fn times(&self, e: &Expr) -> Result<VecField, ExprError> {
        let mut out = VecField::zero(self.mode);
        for (c, comp) in &self.comps {
            out.set(*c, comp.checked_mul(e)?);
        }
        Ok(out)
    }

    pub fn times_coord(&self, x: Coord) -> VecField {
        VecField::from_components(self.mode, self.comps.iter().map(|(c, e)| (*c, e.times_coord(x))))
    }

    /// Apply the field as a derivation: `Σ_v V_v · ∂_v e`.
    pub fn apply(&self, e: &Expr) -> Result<Expr, ExprError> {
        if self.mode != e.mode() {
            return Err(ExprError::ModeMismatch);
        }
        if self.has_atoms() && e.has_atoms() {
            return Err(ExprError::AtomProduct);
        }
        let mut out = Expr::zero(self.mode);
        for (c, comp) in &self.comps {
            let d = e.partial(*c);
            if !d.is_zero() {
                out.add_assign(&comp.checked_mul(&d)?);
            }
        }
        Ok(out)
    }

    /// `[self, other]`, componentwise `self(other_i) − other(self_i)`.
    pub fn bracket(&self, other: &VecField) -> Result<VecField, ExprError> {
        if self.mode != other.mode {
            return Err(ExprError::ModeMismatch);
        }
        if self.has_atoms() && other.has_atoms() {
            return Err(ExprError::AtomProduct);
        }
        let mut out = VecField::zero(self.mode);
        for (c, e) in &other.comps {
            out.add_component(*c, &self.apply(e)?);
        }
        for (c, e) in &self.comps {
            out.add_component(*c, &(-&other.apply(e)?));
        }
        Ok(out)
    }

    pub fn map_exprs(&self, mut f: impl FnMut(&Expr) -> Expr) -> VecField {
        VecField::from_components(self.mode, self.comps.iter().map(|(c, e)| (*c, f(e))))
    }
}

/// `∂_v e`.
pub fn partial(e: &Expr, v: Coord) -> Expr {
    e.partial(v)
}

/// `V(e)`, the directional derivative.
pub fn directional(v: &VecField, e: &Expr) -> Result<Expr, ExprError> {
    v.apply(e)
}

/// `[V, W]`.
pub fn lie_bracket(v: &VecField, w: &VecField) -> Result<VecField, ExprError> {
    v.bracket(w)
}
