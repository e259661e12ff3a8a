//! Seeded random data for property checks: small rational numbers,
//! polynomial assignments of the free functions, and chart points.

use rand::Rng;

use crate::scalar::{rat, Rational, Scalar};
use crate::symexpr::{Coord, Expr, Mode, Mono, PointSpec};
use crate::symmetry::Assignment;

/// A rational `p/q` with `|p| <= 4`, `1 <= q <= 3`.
pub fn small_rational<R: Rng + ?Sized>(rng: &mut R) -> Rational {
    rat(rng.gen_range(-4..=4), rng.gen_range(1..=3))
}

pub fn nonzero_rational<R: Rng + ?Sized>(rng: &mut R) -> Rational {
    loop {
        let q = small_rational(rng);
        if q != Rational::from_integer(0.into()) {
            return q;
        }
    }
}

/// All monomials of degree at most `deg` in `vars`.
pub fn monomials(vars: &[Coord], deg: u32) -> Vec<Mono> {
    let mut out = vec![Mono::one()];
    for &v in vars {
        let mut next = Vec::new();
        for m in &out {
            for k in 0..=deg - m.degree() {
                next.push(m.mul(&Mono::from_pairs([(v, k)])));
            }
        }
        out = next;
    }
    out
}

/// A dense random polynomial of degree `<= deg` in the base coordinates.
pub fn random_base_poly<R: Rng + ?Sized>(rng: &mut R, mode: Mode, deg: u32) -> Expr {
    let mut e = Expr::zero(mode);
    for m in monomials(&mode.base_coords(), deg) {
        e.add_term(None, m, Scalar::from_rational(small_rational(rng)));
    }
    e
}

/// `A, B, C` of degree <= 2 (flag2) or `f` of degree <= 3 (goursat).
pub fn random_assignment<R: Rng + ?Sized>(rng: &mut R, mode: Mode) -> Assignment {
    match mode {
        Mode::Flag2 => Assignment::flag2(
            random_base_poly(rng, mode, 2),
            random_base_poly(rng, mode, 2),
            random_base_poly(rng, mode, 2),
        ),
        Mode::Goursat => Assignment::goursat(random_base_poly(rng, mode, 3)),
    }
    .expect("base polynomials are valid assignments")
}

/// A point of the length-`r` chart with nonzero small rational coordinates.
pub fn random_point<R: Rng + ?Sized>(rng: &mut R, mode: Mode, r: usize) -> PointSpec {
    let mut p = PointSpec::origin(mode, r);
    for c in mode.chart_coords(r) {
        p.set(c, nonzero_rational(rng));
    }
    p
}
