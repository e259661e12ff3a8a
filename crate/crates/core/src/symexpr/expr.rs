use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, BTreeSet};
use std::ops::{Add, Mul, Neg, Sub};


use super::coord::{Coord, DerivAtom, Mode, Mono};
use crate::error::ExprError;
use crate::scalar::{int, Scalar};

/// One term `coeff * mono * atom` (the atom may be absent).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coeff: Scalar,
    pub mono: Mono,
    pub atom: Option<DerivAtom>,
}

impl Term {
    pub fn new(coeff: impl Into<Scalar>, mono: Mono, atom: Option<DerivAtom>) -> Self {
        Term { coeff: coeff.into(), mono, atom }
    }
}

type Key = (Option<DerivAtom>, Mono);

/// A canonical expression: polynomial in chart coordinates, affine in the
/// derivative atoms of the base functions.
///
/// Terms are keyed by `(atom, mono)`; zero coefficients never stored, so
/// structural equality is mathematical equality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    mode: Mode,
    terms: BTreeMap<Key, Scalar>,
}

impl Expr {
    pub fn zero(mode: Mode) -> Expr {
        Expr { mode, terms: BTreeMap::new() }
    }

    pub fn constant(mode: Mode, c: impl Into<Scalar>) -> Expr {
        let mut e = Expr::zero(mode);
        e.add_term(None, Mono::one(), c.into());
        e
    }

    pub fn one(mode: Mode) -> Expr {
        Expr::constant(mode, 1)
    }

    pub fn coord(c: Coord) -> Expr {
        let mut e = Expr::zero(c.mode());
        e.add_term(None, Mono::var(c), Scalar::one());
        e
    }

    pub fn atom(a: DerivAtom) -> Expr {
        let mut e = Expr::zero(a.mode());
        e.add_term(Some(a), Mono::one(), Scalar::one());
        e
    }

    pub fn monomial(mode: Mode, coeff: impl Into<Scalar>, mono: Mono, atom: Option<DerivAtom>) -> Expr {
        let mut e = Expr::zero(mode);
        e.add_term(atom, mono, coeff.into());
        e
    }

    /// Build the canonical form of an arbitrary term list: like terms merged,
    /// zero terms dropped, fixed `(atom, mono)` order.
    pub fn normalize(mode: Mode, terms: impl IntoIterator<Item = Term>) -> Expr {
        let mut e = Expr::zero(mode);
        for t in terms {
            e.add_term(t.atom, t.mono, t.coeff);
        }
        e
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in canonical order.
    pub fn terms(&self) -> impl Iterator<Item = Term> + '_ {
        self.terms.iter().map(|((a, m), c)| Term { coeff: c.clone(), mono: m.clone(), atom: *a })
    }

    pub(crate) fn raw_terms(&self) -> impl Iterator<Item = (&Option<DerivAtom>, &Mono, &Scalar)> {
        self.terms.iter().map(|((a, m), c)| (a, m, c))
    }

    pub fn coefficient(&self, atom: Option<DerivAtom>, mono: &Mono) -> Scalar {
        self.terms
            .get(&(atom, mono.clone()))
            .cloned()
            .unwrap_or_default()
    }

    /// `Some(c)` when the expression is the constant `c` (including zero).
    pub fn as_constant(&self) -> Option<Scalar> {
        match self.terms.len() {
            0 => Some(Scalar::zero()),
            1 => {
                let ((a, m), c) = self.terms.iter().next().unwrap();
                (a.is_none() && m.is_one()).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().is_some_and(|c| c.is_one())
    }

    pub fn has_atoms(&self) -> bool {
        // atom-free keys sort first
        self.terms.keys().next_back().is_some_and(|(a, _)| a.is_some())
    }

    pub fn atoms(&self) -> BTreeSet<DerivAtom> {
        self.terms.keys().filter_map(|(a, _)| *a).collect()
    }

    /// Coordinates occurring in some monomial.
    pub fn mono_coords(&self) -> BTreeSet<Coord> {
        self.terms.keys().flat_map(|(_, m)| m.coords()).collect()
    }

    /// Largest monomial degree (0 for the zero expression).
    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(|(_, m)| m.degree()).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, atom: Option<DerivAtom>, mono: Mono, coeff: Scalar) {
        if coeff.is_zero() {
            return;
        }
        debug_assert!(atom.is_none_or(|a| a.mode() == self.mode));
        match self.terms.entry((atom, mono)) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                let s = o.get() + &coeff;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add_assign(&mut self, other: &Expr) {
        debug_assert_eq!(self.mode, other.mode);
        for ((a, m), c) in &other.terms {
            self.add_term(*a, m.clone(), c.clone());
        }
    }

    pub fn sub_assign(&mut self, other: &Expr) {
        debug_assert_eq!(self.mode, other.mode);
        for ((a, m), c) in &other.terms {
            self.add_term(*a, m.clone(), -c);
        }
    }

    pub fn scale(&self, s: &Scalar) -> Expr {
        if s.is_zero() {
            return Expr::zero(self.mode);
        }
        Expr {
            mode: self.mode,
            terms: self.terms.iter().map(|(k, c)| (k.clone(), c * s)).collect(),
        }
    }

    pub fn mul_mono(&self, m: &Mono) -> Expr {
        Expr {
            mode: self.mode,
            terms: self
                .terms
                .iter()
                .map(|((a, mm), c)| ((*a, mm.mul(m)), c.clone()))
                .collect(),
        }
    }

    /// Multiply by a single coordinate.
    pub fn times_coord(&self, c: Coord) -> Expr {
        self.mul_mono(&Mono::var(c))
    }

    /// Product, rejecting atom times atom.
    pub fn checked_mul(&self, other: &Expr) -> Result<Expr, ExprError> {
        if self.mode != other.mode {
            return Err(ExprError::ModeMismatch);
        }
        if self.has_atoms() && other.has_atoms() {
            return Err(ExprError::AtomProduct);
        }
        let mut out = Expr::zero(self.mode);
        for ((a1, m1), c1) in &self.terms {
            for ((a2, m2), c2) in &other.terms {
                out.add_term(a1.or(*a2), m1.mul(m2), c1 * c2);
            }
        }
        Ok(out)
    }

    /// Partial derivative along `v`: product rule over the monomial and the atom.
    pub fn partial(&self, v: Coord) -> Expr {
        let mut out = Expr::zero(self.mode);
        let slot = v.base_slot();
        for ((a, m), c) in &self.terms {
            if let Some((k, lowered)) = m.lowered(v) {
                out.add_term(*a, lowered, c.scale(&int(k as i64)));
            }
            if let (Some(atom), Some(slot)) = (a, slot) {
                out.add_term(Some(atom.raised(slot)), m.clone(), c.clone());
            }
        }
        out
    }

    /// Replace each atom by an expression (atom-free monomial factors are kept).
    pub fn map_atoms(&self, mut f: impl FnMut(&DerivAtom) -> Expr) -> Expr {
        let mut out = Expr::zero(self.mode);
        let mut cache: BTreeMap<DerivAtom, Expr> = BTreeMap::new();
        for ((a, m), c) in &self.terms {
            match a {
                None => out.add_term(None, m.clone(), c.clone()),
                Some(atom) => {
                    let image = cache.entry(*atom).or_insert_with(|| f(atom));
                    for ((a2, m2), c2) in &image.terms {
                        out.add_term(*a2, m.mul(m2), c * c2);
                    }
                }
            }
        }
        out
    }

    /// Evaluate monomials at the given coordinate values, keeping atoms
    /// formal; returns the pieces `(atom, value)` in canonical order.
    pub(crate) fn eval_monos(
        &self,
        value: impl Fn(Coord) -> Option<Scalar>,
    ) -> Result<BTreeMap<Option<DerivAtom>, Scalar>, ExprError> {
        let mut out: BTreeMap<Option<DerivAtom>, Scalar> = BTreeMap::new();
        let mut cache: BTreeMap<Coord, Scalar> = BTreeMap::new();
        for ((a, m), c) in &self.terms {
            let mut v = c.clone();
            for &(coord, e) in m.pairs() {
                let x = match cache.get(&coord) {
                    Some(x) => x.clone(),
                    None => {
                        let x = value(coord).ok_or_else(|| ExprError::Unassigned(coord.name()))?;
                        cache.insert(coord, x.clone());
                        x
                    }
                };
                if x.is_zero() {
                    v = Scalar::zero();
                    break;
                }
                v = &v * &x.pow(e);
            }
            if v.is_zero() {
                continue;
            }
            let slot = out.entry(*a).or_default();
            *slot = &*slot + &v;
        }
        out.retain(|_, v| !v.is_zero());
        Ok(out)
    }

    /// Substitute a parameter in every coefficient.
    pub fn substitute_param(&self, name: &str, value: &Scalar) -> Expr {
        let mut out = Expr::zero(self.mode);
        for ((a, m), c) in &self.terms {
            out.add_term(*a, m.clone(), c.substitute(name, value));
        }
        out
    }
}

impl Add for &Expr {
    type Output = Expr;
    fn add(self, rhs: &Expr) -> Expr {
        let mut out = self.clone();
        out.add_assign(rhs);
        out
    }
}

impl Sub for &Expr {
    type Output = Expr;
    fn sub(self, rhs: &Expr) -> Expr {
        let mut out = self.clone();
        out.sub_assign(rhs);
        out
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr {
            mode: self.mode,
            terms: self.terms.iter().map(|(k, c)| (k.clone(), -c)).collect(),
        }
    }
}

/// Panics on atom times atom; use [`Expr::checked_mul`] to handle that case.
impl Mul for &Expr {
    type Output = Expr;
    fn mul(self, rhs: &Expr) -> Expr {
        self.checked_mul(rhs).expect("atom-linearity violated")
    }
}

impl Add for Expr {
    type Output = Expr;
    fn add(mut self, rhs: Expr) -> Expr {
        self.add_assign(&rhs);
        self
    }
}

impl Sub for Expr {
    type Output = Expr;
    fn sub(mut self, rhs: Expr) -> Expr {
        self.sub_assign(&rhs);
        self
    }
}
