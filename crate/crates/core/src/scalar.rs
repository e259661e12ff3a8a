//! Exact coefficients: polynomials with rational coefficients in a finite set
//! of named formal parameters.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{BigInt, BigRational, One, Signed, Zero};

use crate::error::ParseError;

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// A monomial in the formal parameters, kept sorted by name with positive exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ParamMono(Vec<(String, u32)>);

impl ParamMono {
    pub fn one() -> Self {
        ParamMono(Vec::new())
    }

    pub fn var(name: &str) -> Self {
        ParamMono(vec![(name.to_string(), 1)])
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(String, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn degree_in(&self, names: &[&str]) -> u32 {
        self.0
            .iter()
            .filter(|(n, _)| names.contains(&n.as_str()))
            .map(|(_, e)| e)
            .sum()
    }

    pub fn exponent(&self, name: &str) -> u32 {
        self.0
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    fn mul(&self, other: &ParamMono) -> ParamMono {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        ParamMono(out)
    }

    /// `self / other` when `other` divides `self`.
    fn div(&self, other: &ParamMono) -> Option<ParamMono> {
        let mut out = Vec::new();
        for (n, e) in &self.0 {
            let d = other.exponent(n);
            if d > *e {
                return None;
            }
            if e - d > 0 {
                out.push((n.clone(), e - d));
            }
        }
        if other.0.iter().any(|(n, _)| self.exponent(n) == 0) {
            return None;
        }
        Some(ParamMono(out))
    }

    fn without(&self, name: &str) -> (u32, ParamMono) {
        let mut rest = Vec::new();
        let mut e = 0;
        for (n, k) in &self.0 {
            if n == name {
                e = *k;
            } else {
                rest.push((n.clone(), *k));
            }
        }
        (e, ParamMono(rest))
    }
}

impl fmt::Display for ParamMono {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (n, e)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str("*")?;
            }
            if *e == 1 {
                write!(f, "{n}")?;
            } else {
                write!(f, "{n}^{e}")?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Repr {
    Num(Rational),
    /// At least one non-constant monomial; sorted, no zero coefficients.
    Poly(Vec<(ParamMono, Rational)>),
}

/// Exact scalar. Canonical: a plain rational whenever no parameter occurs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Scalar(Repr);

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar(Repr::Num(Rational::zero()))
    }

    pub fn one() -> Self {
        Scalar(Repr::Num(Rational::one()))
    }

    pub fn from_int(n: i64) -> Self {
        Scalar(Repr::Num(int(n)))
    }

    pub fn from_rational(q: Rational) -> Self {
        Scalar(Repr::Num(q))
    }

    pub fn param(name: &str) -> Self {
        Scalar(Repr::Poly(vec![(ParamMono::var(name), Rational::one())]))
    }

    pub fn monomial(m: ParamMono, q: Rational) -> Self {
        Self::from_terms(vec![(m, q)])
    }

    fn from_terms(mut terms: Vec<(ParamMono, Rational)>) -> Self {
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(ParamMono, Rational)> = Vec::with_capacity(terms.len());
        for (m, q) in terms {
            match merged.last_mut() {
                Some((lm, lq)) if *lm == m => *lq += q,
                _ => merged.push((m, q)),
            }
        }
        merged.retain(|(_, q)| !q.is_zero());
        Self::canonical(merged)
    }

    fn canonical(terms: Vec<(ParamMono, Rational)>) -> Self {
        match terms.len() {
            0 => Scalar::zero(),
            1 if terms[0].0.is_one() => Scalar(Repr::Num(terms[0].1.clone())),
            _ => Scalar(Repr::Poly(terms)),
        }
    }

    /// Terms in canonical order (constant term first when present).
    pub fn terms(&self) -> Vec<(ParamMono, Rational)> {
        match &self.0 {
            Repr::Num(q) if q.is_zero() => Vec::new(),
            Repr::Num(q) => vec![(ParamMono::one(), q.clone())],
            Repr::Poly(t) => t.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(&self.0, Repr::Num(q) if q.is_zero())
    }

    pub fn is_one(&self) -> bool {
        matches!(&self.0, Repr::Num(q) if q.is_one())
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match &self.0 {
            Repr::Num(q) => Some(q),
            Repr::Poly(_) => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self.0, Repr::Num(_))
    }

    pub fn params(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .terms()
            .iter()
            .flat_map(|(m, _)| m.factors().iter().map(|(n, _)| n.clone()))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// Total degree in the given parameters (0 for the zero scalar).
    pub fn degree_in(&self, names: &[&str]) -> u32 {
        self.terms()
            .iter()
            .map(|(m, _)| m.degree_in(names))
            .max()
            .unwrap_or(0)
    }

    /// A single term `q * m`, if the scalar has that shape.
    pub fn as_monomial(&self) -> Option<(ParamMono, Rational)> {
        let t = self.terms();
        if t.len() == 1 {
            t.into_iter().next()
        } else {
            None
        }
    }

    pub fn scale(&self, q: &Rational) -> Scalar {
        if q.is_zero() {
            return Scalar::zero();
        }
        match &self.0 {
            Repr::Num(a) => Scalar(Repr::Num(a * q)),
            Repr::Poly(t) => Scalar(Repr::Poly(
                t.iter().map(|(m, a)| (m.clone(), a * q)).collect(),
            )),
        }
    }

    /// Exact division by a monomial divisor `q * m`; `None` if it does not divide.
    pub fn div_monomial(&self, m: &ParamMono, q: &Rational) -> Option<Scalar> {
        if q.is_zero() {
            return None;
        }
        let inv = q.recip();
        let mut out = Vec::new();
        for (tm, tq) in self.terms() {
            out.push((tm.div(m)?, tq * &inv));
        }
        Some(Self::from_terms(out))
    }

    /// Substitute `name := value` everywhere.
    pub fn substitute(&self, name: &str, value: &Scalar) -> Scalar {
        let Repr::Poly(terms) = &self.0 else {
            return self.clone();
        };
        let mut acc = Scalar::zero();
        for (m, q) in terms {
            let (e, rest) = m.without(name);
            let mut term = Scalar::monomial(rest, q.clone());
            for _ in 0..e {
                term = &term * value;
            }
            acc = &acc + &term;
        }
        acc
    }

    /// Substitute several parameters at once.
    pub fn substitute_all(&self, values: &BTreeMap<String, Scalar>) -> Scalar {
        values
            .iter()
            .fold(self.clone(), |acc, (n, v)| acc.substitute(n, v))
    }

    pub fn pow(&self, e: u32) -> Scalar {
        let mut acc = Scalar::one();
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Parse the textual form produced by `Display`, e.g. `3/2`, `-c`, `1 - 1/2*c + c^2`.
    pub fn parse(text: &str) -> Result<Scalar, ParseError> {
        let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(ParseError::Scalar(text.to_string()));
        }
        let bad = || ParseError::Scalar(text.to_string());
        let mut terms = Vec::new();
        let bytes: Vec<char> = s.chars().collect();
        let mut i = 0;
        while i < bytes.len() {
            let mut sign = Rational::one();
            if bytes[i] == '+' || bytes[i] == '-' {
                if bytes[i] == '-' {
                    sign = -sign;
                }
                i += 1;
            }
            let start = i;
            while i < bytes.len() && bytes[i] != '+' && bytes[i] != '-' {
                i += 1;
            }
            let chunk: String = bytes[start..i].iter().collect();
            if chunk.is_empty() {
                return Err(bad());
            }
            let mut coeff = sign;
            let mut mono = ParamMono::one();
            for factor in chunk.split('*') {
                if factor.is_empty() {
                    return Err(bad());
                }
                let first = factor.chars().next().unwrap();
                if first.is_ascii_digit() {
                    coeff *= parse_rational(factor).ok_or_else(bad)?;
                } else if first.is_ascii_alphabetic() || first == '_' {
                    let (name, exp) = match factor.split_once('^') {
                        Some((n, e)) => (n, e.parse::<u32>().map_err(|_| bad())?),
                        None => (factor, 1),
                    };
                    if !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                        return Err(bad());
                    }
                    if exp > 0 {
                        mono = mono.mul(&ParamMono(vec![(name.to_string(), exp)]));
                    }
                } else {
                    return Err(bad());
                }
            }
            terms.push((mono, coeff));
        }
        Ok(Self::from_terms(terms))
    }

    /// Evaluate with every parameter bound to a rational; `None` if one is missing.
    pub fn eval(&self, values: &BTreeMap<String, Rational>) -> Option<Rational> {
        let mut acc = Rational::zero();
        for (m, q) in self.terms() {
            let mut v = q;
            for (n, e) in m.factors() {
                let x = values.get(n)?;
                for _ in 0..*e {
                    v *= x;
                }
            }
            acc += v;
        }
        Some(acc)
    }
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Rational::new(n, d))
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<Rational> for Scalar {
    fn from(q: Rational) -> Self {
        Scalar::from_rational(q)
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        match (&self.0, &rhs.0) {
            (Repr::Num(a), Repr::Num(b)) => Scalar(Repr::Num(a + b)),
            _ => {
                let mut t = self.terms();
                t.extend(rhs.terms());
                Scalar::from_terms(t)
            }
        }
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        match (&self.0, &rhs.0) {
            (Repr::Num(a), Repr::Num(b)) => Scalar(Repr::Num(a - b)),
            _ => self + &(-rhs),
        }
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match &self.0 {
            Repr::Num(a) => Scalar(Repr::Num(-a)),
            Repr::Poly(t) => Scalar(Repr::Poly(
                t.iter().map(|(m, q)| (m.clone(), -q)).collect(),
            )),
        }
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        match (&self.0, &rhs.0) {
            (Repr::Num(a), Repr::Num(b)) => Scalar(Repr::Num(a * b)),
            (Repr::Num(a), _) => rhs.scale(a),
            (_, Repr::Num(b)) => self.scale(b),
            (Repr::Poly(x), Repr::Poly(y)) => {
                let mut t = Vec::with_capacity(x.len() * y.len());
                for (ma, qa) in x {
                    for (mb, qb) in y {
                        t.push((ma.mul(mb), qa * qb));
                    }
                }
                Scalar::from_terms(t)
            }
        }
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        &self + &rhs
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        &self - &rhs
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

pub(crate) fn fmt_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, q)) in terms.iter().enumerate() {
            let neg = q.is_negative();
            let mag = q.abs();
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            if m.is_one() {
                f.write_str(&fmt_rational(&mag))?;
            } else if mag.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{}*{m}", fmt_rational(&mag))?;
            }
        }
        Ok(())
    }
}

impl Scalar {
    /// LaTeX rendering, e.g. `\frac{3}{2} c^{2}`.
    pub fn to_latex(&self) -> String {
        let terms = self.terms();
        if terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (m, q)) in terms.iter().enumerate() {
            let neg = q.is_negative();
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mag = q.abs();
            let coeff = latex_rational(&mag);
            let mono = m
                .factors()
                .iter()
                .map(|(n, e)| {
                    if *e == 1 {
                        n.clone()
                    } else {
                        format!("{n}^{{{e}}}")
                    }
                })
                .collect::<Vec<_>>()
                .join(" ");
            match (m.is_one(), mag.is_one()) {
                (true, _) => out.push_str(&coeff),
                (false, true) => out.push_str(&mono),
                (false, false) => {
                    out.push_str(&coeff);
                    out.push(' ');
                    out.push_str(&mono);
                }
            }
        }
        out
    }
}

pub(crate) fn latex_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        let sign = if q.is_negative() { "-" } else { "" };
        format!("{sign}\\frac{{{}}}{{{}}}", q.numer().abs(), q.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_constants_collapse() {
        let c = Scalar::param("c");
        let z = &c - &c;
        assert!(z.is_zero());
        assert_eq!(z, Scalar::zero());
        let two = &(&c + &Scalar::from_int(2)) - &c;
        assert_eq!(two, Scalar::from_int(2));
        assert!(two.is_constant());
    }

    #[test]
    fn display_parse_round_trip() {
        let c = Scalar::param("c");
        let s = &(&(&c * &c) - &c.scale(&rat(1, 2))) + &Scalar::one();
        let text = s.to_string();
        assert_eq!(text, "1 - 1/2*c + c^2");
        assert_eq!(Scalar::parse(&text).unwrap(), s);
        assert_eq!(Scalar::parse("-3/2").unwrap(), Scalar::from_rational(rat(-3, 2)));
        assert!(Scalar::parse("1/0").is_err());
        assert!(Scalar::parse("2**c").is_err());
    }

    #[test]
    fn substitution_and_division() {
        let c = Scalar::param("c");
        let s = &c.scale(&int(3)) * &Scalar::param("d");
        assert_eq!(s.substitute("c", &Scalar::from_int(2)), Scalar::param("d").scale(&int(6)));
        let q = s.div_monomial(&ParamMono::var("c"), &int(3)).unwrap();
        assert_eq!(q, Scalar::param("d"));
        assert!(Scalar::param("d").div_monomial(&ParamMono::var("c"), &int(1)).is_none());
    }
}
