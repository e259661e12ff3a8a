use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::Signed;

use super::coord::{Coord, DerivAtom, Mode};
use super::expr::Expr;
use crate::error::{ExprError, ParseError};
use crate::scalar::{Rational, Scalar};

/// An affine form `Σ coeff·atom + constant` in formal derivative values.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LinForm {
    terms: BTreeMap<DerivAtom, Scalar>,
    constant: Scalar,
}

impl LinForm {
    pub fn zero() -> LinForm {
        LinForm::default()
    }

    pub fn atom(a: DerivAtom) -> LinForm {
        LinForm::from_terms([(a, Scalar::one())], Scalar::zero())
    }

    pub fn constant_form(c: Scalar) -> LinForm {
        LinForm { terms: BTreeMap::new(), constant: c }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (DerivAtom, Scalar)>, constant: Scalar) -> LinForm {
        let mut out = LinForm { terms: BTreeMap::new(), constant };
        for (a, c) in terms {
            out.add_atom(a, &c);
        }
        out
    }

    pub fn add_atom(&mut self, a: DerivAtom, c: &Scalar) {
        let s = &self.coeff(&a) + c;
        if s.is_zero() {
            self.terms.remove(&a);
        } else {
            self.terms.insert(a, s);
        }
    }

    pub fn coeff(&self, a: &DerivAtom) -> Scalar {
        self.terms.get(a).cloned().unwrap_or_default()
    }

    pub fn constant(&self) -> &Scalar {
        &self.constant
    }

    pub fn terms(&self) -> impl Iterator<Item = (&DerivAtom, &Scalar)> {
        self.terms.iter()
    }

    pub fn atoms(&self) -> BTreeSet<DerivAtom> {
        self.terms.keys().copied().collect()
    }

    /// First atom in the fixed pivot order.
    pub fn leading_atom(&self) -> Option<DerivAtom> {
        self.terms.keys().next().copied()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.constant.is_zero()
    }

    pub fn is_homogeneous(&self) -> bool {
        self.constant.is_zero()
    }

    pub fn add(&self, other: &LinForm) -> LinForm {
        let mut out = self.clone();
        for (a, c) in &other.terms {
            out.add_atom(*a, c);
        }
        out.constant = &out.constant + &other.constant;
        out
    }

    pub fn sub(&self, other: &LinForm) -> LinForm {
        self.add(&other.scale(&Scalar::from_int(-1)))
    }

    pub fn scale(&self, s: &Scalar) -> LinForm {
        LinForm::from_terms(self.terms.iter().map(|(a, c)| (*a, c * s)), &self.constant * s)
    }

    pub fn map_coeffs(&self, f: impl Fn(&Scalar) -> Scalar) -> LinForm {
        LinForm::from_terms(self.terms.iter().map(|(a, c)| (*a, f(c))), f(&self.constant))
    }

    pub fn substitute_param(&self, name: &str, value: &Scalar) -> LinForm {
        self.map_coeffs(|c| c.substitute(name, value))
    }

    pub fn params(&self) -> BTreeSet<String> {
        self.terms
            .values()
            .chain(std::iter::once(&self.constant))
            .flat_map(|c| c.params())
            .collect()
    }

    /// Maximal degree of the coefficients in the given parameters.
    pub fn degree_in(&self, names: &[&str]) -> u32 {
        self.terms
            .values()
            .chain(std::iter::once(&self.constant))
            .map(|c| c.degree_in(names))
            .max()
            .unwrap_or(0)
    }

    pub fn to_latex(&self) -> String {
        let mut pieces: Vec<(bool, String)> = Vec::new();
        for (a, c) in &self.terms {
            pieces.push(signed_piece(c, &a.latex(), true));
        }
        if !self.constant.is_zero() {
            pieces.push(signed_piece(&self.constant, "", true));
        }
        join_signed(pieces, "0")
    }
}

impl fmt::Display for LinForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut pieces: Vec<(bool, String)> = Vec::new();
        for (a, c) in &self.terms {
            pieces.push(signed_piece(c, &a.name(), false));
        }
        if !self.constant.is_zero() {
            pieces.push(signed_piece(&self.constant, "", false));
        }
        f.write_str(&join_signed(pieces, "0"))
    }
}

/// Render `c·body` as `(negative?, magnitude text)`.
pub(crate) fn signed_piece(c: &Scalar, body: &str, latex: bool) -> (bool, String) {
    let (neg, coeff) = match c.as_rational() {
        Some(q) => {
            let mag = q.abs();
            let text = if latex {
                crate::scalar::latex_rational(&mag)
            } else {
                crate::scalar::fmt_rational(&mag)
            };
            (q.is_negative(), if num::One::is_one(&mag) && !body.is_empty() { String::new() } else { text })
        }
        None => {
            let text = if latex { c.to_latex() } else { c.to_string() };
            (false, format!("({text})"))
        }
    };
    let sep = if latex { " " } else { "*" };
    let s = match (coeff.is_empty(), body.is_empty()) {
        (true, _) => body.to_string(),
        (false, true) => coeff,
        (false, false) => format!("{coeff}{sep}{body}"),
    };
    (neg, s)
}

pub(crate) fn join_signed(pieces: Vec<(bool, String)>, zero: &str) -> String {
    if pieces.is_empty() {
        return zero.to_string();
    }
    let mut out = String::new();
    for (i, (neg, s)) in pieces.into_iter().enumerate() {
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        out.push_str(&s);
    }
    out
}

/// Values for the coordinates of a chart, exact and possibly parametric.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointSpec {
    mode: Mode,
    r: usize,
    values: BTreeMap<Coord, Scalar>,
}

impl PointSpec {
    pub fn origin(mode: Mode, r: usize) -> PointSpec {
        let values = mode.chart_coords(r).into_iter().map(|c| (c, Scalar::zero())).collect();
        PointSpec { mode, r, values }
    }

    /// Parse `name=value` pairs separated by commas; missing names are 0.
    pub fn parse(mode: Mode, r: usize, text: &str) -> Result<PointSpec, ParseError> {
        let mut p = PointSpec::origin(mode, r);
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (name, value) = item
                .split_once('=')
                .ok_or_else(|| ParseError::Point(item.to_string()))?;
            let c = Coord::parse(mode, name.trim())?;
            if !p.values.contains_key(&c) {
                return Err(ParseError::Coord(name.trim().to_string()));
            }
            let v = Scalar::parse(value.trim())?;
            p.values.insert(c, v);
        }
        Ok(p)
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn length(&self) -> usize {
        self.r
    }

    pub fn with(mut self, c: Coord, v: impl Into<Scalar>) -> PointSpec {
        self.set(c, v);
        self
    }

    pub fn set(&mut self, c: Coord, v: impl Into<Scalar>) {
        assert!(self.values.contains_key(&c), "coordinate {c} outside the chart");
        self.values.insert(c, v.into());
    }

    pub fn get(&self, c: Coord) -> Option<&Scalar> {
        self.values.get(&c)
    }

    pub fn values(&self) -> impl Iterator<Item = (Coord, &Scalar)> {
        self.values.iter().map(|(c, v)| (*c, v))
    }

    /// Drop the coordinates above level `j` (the projection onto the length-`j` chart).
    pub fn project(&self, j: usize) -> PointSpec {
        assert!(j <= self.r);
        let keep = self.mode.chart_coords(j);
        PointSpec {
            mode: self.mode,
            r: j,
            values: keep.into_iter().map(|c| (c, self.values[&c].clone())).collect(),
        }
    }

    /// Extend to a longer chart; new coordinates default to 0.
    pub fn extend(&self, r: usize) -> PointSpec {
        let mut p = PointSpec::origin(self.mode, r);
        for (c, v) in &self.values {
            p.values.insert(*c, v.clone());
        }
        p
    }

    pub fn params(&self) -> BTreeSet<String> {
        self.values.values().flat_map(|v| v.params()).collect()
    }

    pub fn is_numeric(&self) -> bool {
        self.values.values().all(Scalar::is_constant)
    }

    /// Rational coordinates, or an error naming the first parametric one.
    pub fn numeric(&self) -> Result<BTreeMap<Coord, Rational>, ExprError> {
        self.values
            .iter()
            .map(|(c, v)| {
                v.as_rational()
                    .cloned()
                    .map(|q| (*c, q))
                    .ok_or_else(|| ExprError::Parametric(format!("{c}={v}")))
            })
            .collect()
    }

    pub fn substitute_param(&self, name: &str, value: &Scalar) -> PointSpec {
        PointSpec {
            mode: self.mode,
            r: self.r,
            values: self.values.iter().map(|(c, v)| (*c, v.substitute(name, value))).collect(),
        }
    }
}

impl fmt::Display for PointSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.values.iter().map(|(c, v)| format!("{c}={v}")).collect();
        f.write_str(&items.join(","))
    }
}

/// Evaluate the monomials of `e` at `p`, keeping atoms formal. Base
/// coordinates missing from `p` evaluate to 0.
pub fn substitute(e: &Expr, p: &PointSpec) -> Result<LinForm, ExprError> {
    let pieces = e.eval_monos(|c| match p.get(c) {
        Some(v) => Some(v.clone()),
        None if c.is_base() => Some(Scalar::zero()),
        None => None,
    })?;
    let mut out = LinForm::zero();
    for (a, v) in pieces {
        match a {
            Some(atom) => out.add_atom(atom, &v),
            None => out.constant = &out.constant + &v,
        }
    }
    Ok(out)
}

/// Evaluate an atom-free expression to a scalar.
pub fn evaluate(e: &Expr, p: &PointSpec) -> Result<Scalar, ExprError> {
    if e.has_atoms() {
        return Err(ExprError::AtomProduct);
    }
    Ok(substitute(e, p)?.constant)
}
