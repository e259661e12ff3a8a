//! Text, LaTeX and JSON forms of expressions, fields and linear forms.
//!
//! JSON schema for an expression:
//! `{"mode": "flag2", "terms": [[coeff, {coord: exp, ...}, atom-or-null], ...]}`
//! where `coeff` is a scalar string (`"3/2"`, `"-c"`), coordinates are named
//! `t, x0, y0, x1, ...` (flag2) or `x1, x2, ...` (goursat), and atoms are
//! written `A`, `B_t_x0`, `f_x2_x3`. A vector field is
//! `{"mode": ..., "components": {coord: [terms...], ...}}`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::coord::{Coord, DerivAtom, Mode, Mono};
use super::expr::{Expr, Term};
use super::field::VecField;
use super::linform::{join_signed, signed_piece, LinForm, PointSpec};
use crate::error::ParseError;
use crate::scalar::Scalar;

fn mono_text(m: &Mono) -> String {
    m.pairs()
        .iter()
        .map(|(c, e)| if *e == 1 { c.name() } else { format!("{}^{e}", c.name()) })
        .collect::<Vec<_>>()
        .join("*")
}

fn mono_latex(m: &Mono) -> String {
    m.pairs()
        .iter()
        .map(|(c, e)| match (*e, *c == Coord::t()) {
            (1, _) => c.latex(),
            (_, true) => format!("t^{{{e}}}"),
            (_, false) => format!("({})^{{{e}}}", c.latex()),
        })
        .collect::<Vec<_>>()
        .join(" ")
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pieces = self
            .raw_terms()
            .map(|(a, m, c)| {
                let mut body = mono_text(m);
                if let Some(a) = a {
                    if !body.is_empty() {
                        body.push('*');
                    }
                    body.push_str(&a.name());
                }
                signed_piece(c, &body, false)
            })
            .collect();
        f.write_str(&join_signed(pieces, "0"))
    }
}

impl Expr {
    pub fn to_latex(&self) -> String {
        let pieces = self
            .raw_terms()
            .map(|(a, m, c)| {
                let mut body = mono_latex(m);
                if let Some(a) = a {
                    if !body.is_empty() {
                        body.push(' ');
                    }
                    body.push_str(&a.latex());
                }
                signed_piece(c, &body, true)
            })
            .collect();
        join_signed(pieces, "0")
    }
}

impl fmt::Display for VecField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self
            .components()
            .map(|(c, e)| {
                if e.is_one() {
                    format!("d_{}", c.name())
                } else if e.len() == 1 {
                    format!("{e}*d_{}", c.name())
                } else {
                    format!("({e})*d_{}", c.name())
                }
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

impl VecField {
    pub fn to_latex(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .components()
            .map(|(c, e)| {
                let d = format!("\\partial_{{{}}}", c.latex());
                if e.is_one() {
                    d
                } else if e.len() == 1 {
                    format!("{} {d}", e.to_latex())
                } else {
                    format!("\\left({}\\right) {d}", e.to_latex())
                }
            })
            .collect();
        parts.join(" + ")
    }
}

/// One serialized term: `[coeff, mono, atom]`.
pub type TermRepr = (String, BTreeMap<String, u32>, Option<String>);

fn term_repr(t: &Term) -> TermRepr {
    (
        t.coeff.to_string(),
        t.mono.pairs().iter().map(|(c, e)| (c.name(), *e)).collect(),
        t.atom.map(|a| a.name()),
    )
}

fn parse_terms(mode: Mode, terms: &[TermRepr]) -> Result<Expr, ParseError> {
    let mut out = Vec::with_capacity(terms.len());
    for (coeff, mono, atom) in terms {
        let coeff = Scalar::parse(coeff)?;
        let mut pairs = Vec::new();
        for (name, e) in mono {
            pairs.push((Coord::parse(mode, name)?, *e));
        }
        let atom = match atom {
            Some(s) => {
                let a = DerivAtom::parse(s)?;
                if a.mode() != mode {
                    return Err(ParseError::Atom(s.clone()));
                }
                Some(a)
            }
            None => None,
        };
        out.push(Term { coeff, mono: Mono::from_pairs(pairs), atom });
    }
    Ok(Expr::normalize(mode, out))
}

#[derive(Serialize, Deserialize)]
pub struct ExprRepr {
    pub mode: Mode,
    pub terms: Vec<TermRepr>,
}

impl From<&Expr> for ExprRepr {
    fn from(e: &Expr) -> Self {
        ExprRepr { mode: e.mode(), terms: e.terms().map(|t| term_repr(&t)).collect() }
    }
}

impl TryFrom<ExprRepr> for Expr {
    type Error = ParseError;
    fn try_from(r: ExprRepr) -> Result<Self, ParseError> {
        parse_terms(r.mode, &r.terms)
    }
}

impl Serialize for Expr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        ExprRepr::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Expr {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = ExprRepr::deserialize(d)?;
        Expr::try_from(r).map_err(serde::de::Error::custom)
    }
}

#[derive(Serialize, Deserialize)]
pub struct VecFieldRepr {
    pub mode: Mode,
    pub components: BTreeMap<String, Vec<TermRepr>>,
}

impl Serialize for VecField {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        VecFieldRepr {
            mode: self.mode(),
            components: self
                .components()
                .map(|(c, e)| (c.name(), e.terms().map(|t| term_repr(&t)).collect()))
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for VecField {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = VecFieldRepr::deserialize(d)?;
        let mut v = VecField::zero(r.mode);
        for (name, terms) in &r.components {
            let c = Coord::parse(r.mode, name).map_err(serde::de::Error::custom)?;
            let e = parse_terms(r.mode, terms).map_err(serde::de::Error::custom)?;
            v.add_component(c, &e);
        }
        Ok(v)
    }
}

impl Serialize for DerivAtom {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.name())
    }
}

/// A point serializes as `{"mode": ..., "length": r, "values": {coord: scalar}}`.
impl Serialize for PointSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr {
            mode: Mode,
            length: usize,
            values: BTreeMap<String, String>,
        }
        Repr {
            mode: self.mode(),
            length: self.length(),
            values: self.values().map(|(c, v)| (c.name(), v.to_string())).collect(),
        }
        .serialize(s)
    }
}

#[derive(Serialize, Deserialize)]
struct LinFormRepr {
    terms: Vec<(String, String)>,
    constant: String,
}

impl Serialize for LinForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        LinFormRepr {
            terms: self.terms().map(|(a, c)| (c.to_string(), a.name())).collect(),
            constant: self.constant().to_string(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LinForm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = LinFormRepr::deserialize(d)?;
        let mut terms = Vec::new();
        for (c, a) in &r.terms {
            let c = Scalar::parse(c).map_err(serde::de::Error::custom)?;
            let a = DerivAtom::parse(a).map_err(serde::de::Error::custom)?;
            terms.push((a, c));
        }
        let constant = Scalar::parse(&r.constant).map_err(serde::de::Error::custom)?;
        Ok(LinForm::from_terms(terms, constant))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::coord::Base;

    #[test]
    fn latex_atoms() {
        assert_eq!(DerivAtom::new(Base::A, [1, 0, 0]).latex(), "A_t");
        assert_eq!(DerivAtom::new(Base::B, [0, 2, 0]).latex(), "B_{x^{0} x^{0}}");
        assert_eq!(DerivAtom::new(Base::F, [0, 1, 1]).latex(), "f_{23}");
        assert_eq!(DerivAtom::new(Base::F, [0, 0, 1]).latex(), "f_3");
    }

    #[test]
    fn json_round_trip_expr() {
        let e = &Expr::monomial(
            Mode::Flag2,
            Scalar::param("c").scale(&crate::scalar::rat(-3, 2)),
            Mono::from_pairs([(Coord::x(1), 2), (Coord::y(3), 1)]),
            Some(DerivAtom::new(Base::C, [1, 1, 0])),
        ) + &Expr::constant(Mode::Flag2, 7);
        let text = serde_json::to_string(&e).unwrap();
        let back: Expr = serde_json::from_str(&text).unwrap();
        assert_eq!(back, e);
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }

    #[test]
    fn text_form() {
        let e = &Expr::monomial(Mode::Flag2, 2, Mono::var(Coord::x(1)), Some(DerivAtom::new(Base::B, [0, 1, 0])))
            - &Expr::atom(DerivAtom::new(Base::A, [1, 0, 0]));
        assert_eq!(e.to_string(), "-A_t + 2*x1*B_x0");
    }
}
