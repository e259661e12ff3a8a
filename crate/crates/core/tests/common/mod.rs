#![allow(dead_code)]

pub mod oracle;

use flagsym_core::symexpr::{Base, DerivAtom, Expr, LinForm};
use flagsym_core::{ClassCode, Mode, Scalar};

pub fn code(w: &str, mode: Mode) -> ClassCode {
    ClassCode::validate(w, mode).unwrap()
}

pub fn atom(b: Base, multi: [u32; 3]) -> Expr {
    Expr::atom(DerivAtom::new(b, multi))
}

pub fn form(terms: &[(i64, Base, [u32; 3])]) -> LinForm {
    LinForm::from_terms(
        terms.iter().map(|&(q, b, m)| (DerivAtom::new(b, m), Scalar::from_int(q))),
        Scalar::zero(),
    )
}

/// `q`, monomial exponents, optional atom.
pub type LiteralTerm<'a> = (i64, &'a [(flagsym_core::Coord, u32)], Option<(Base, [u32; 3])>);

/// `Σ q · mono · atom` from a literal term list.
pub fn expr(mode: Mode, terms: &[LiteralTerm]) -> Expr {
    use flagsym_core::symexpr::{Mono, Term};
    Expr::normalize(
        mode,
        terms
            .iter()
            .map(|(q, m, a)| {
                Term::new(*q, Mono::from_pairs(m.iter().copied()), a.map(|(b, k)| DerivAtom::new(b, k)))
            })
            .collect::<Vec<_>>(),
    )
}
