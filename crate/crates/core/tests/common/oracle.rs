//! Brute-force solver for symmetry components, independent of the recursion:
//! the next components are written as undetermined combinations of
//! `monomial × atom`, the tangency conditions are expanded symbolically, and
//! the resulting linear system is solved exactly.

use std::collections::{BTreeMap, HashMap};

use num::Zero;

use flagsym_core::scalar::{Rational, Scalar};
use flagsym_core::symexpr::{Base, Coord, DerivAtom, Expr, Mode, Mono, Term, VecField};

/// Hand-written ladders, for lengths up to 2 (flag2) and 3 (goursat).
pub fn flag2_ladder(letters: &[u8]) -> Vec<VecField> {
    let m = Mode::Flag2;
    let one = || Expr::one(m);
    let c = Expr::coord;
    let mut z = vec![VecField::from_components(
        m,
        [(Coord::t(), one()), (Coord::x(0), c(Coord::x(1))), (Coord::y(0), c(Coord::y(1)))],
    )];
    if letters.len() >= 2 {
        let z1 = &z[0];
        let z2 = match letters[1] {
            1 => z1
                .add(&VecField::coord(Coord::x(1)).times_coord(Coord::x(2)))
                .add(&VecField::coord(Coord::y(1)).times_coord(Coord::y(2))),
            _ => z1
                .times_coord(Coord::x(2))
                .add(&VecField::coord(Coord::x(1)))
                .add(&VecField::coord(Coord::y(1)).times_coord(Coord::y(2))),
        };
        z.push(z2);
    }
    z
}

pub fn goursat_ladder(letters: &[u8]) -> Vec<VecField> {
    let g = Coord::g;
    let y1 = VecField::coord(g(1)).add(&VecField::coord(g(2)).times_coord(g(3)));
    let y2 = y1.add(&VecField::coord(g(3)).times_coord(g(4)));
    let mut out = vec![y1, y2.clone()];
    if letters.len() >= 3 {
        let y3 = match letters[2] {
            1 => y2.add(&VecField::coord(g(4)).times_coord(g(5))),
            _ => y2.times_coord(g(5)).add(&VecField::coord(g(4))),
        };
        out.push(y3);
    }
    out
}

/// All monomials of total degree at most `deg` in `vars`.
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

/// All derivative atoms of `base` with order at most `order`.
pub fn atoms(base: Base, order: u32) -> Vec<DerivAtom> {
    let mut out = Vec::new();
    for a in 0..=order {
        for b in 0..=order - a {
            for c in 0..=order - a - b {
                out.push(DerivAtom::new(base, [a, b, c]));
            }
        }
    }
    out
}

/// An undetermined expression `Σ u_k · mono · atom`; unknowns are numbered
/// from `*next` on and named `u<k>`.
pub struct Ansatz {
    pub expr: Expr,
    pub unknowns: Vec<(usize, Mono, DerivAtom)>,
}

pub fn ansatz(mode: Mode, monos: &[Mono], atoms: &[DerivAtom], next: &mut usize) -> Ansatz {
    let mut terms = Vec::new();
    let mut unknowns = Vec::new();
    for m in monos {
        for a in atoms {
            let k = *next;
            *next += 1;
            terms.push(Term::new(Scalar::param(&format!("u{k}")), m.clone(), Some(*a)));
            unknowns.push((k, m.clone(), *a));
        }
    }
    Ansatz { expr: Expr::normalize(mode, terms), unknowns }
}

/// One linear equation `Σ coeff_k u_k + constant = 0`.
#[derive(Clone, Debug, Default)]
pub struct Equation {
    pub coeffs: BTreeMap<usize, Rational>,
    pub constant: Rational,
}

fn equation_of(s: &Scalar) -> Equation {
    let mut eq = Equation::default();
    for (m, q) in s.terms() {
        if m.is_one() {
            eq.constant += q;
            continue;
        }
        let f = m.factors();
        assert!(f.len() == 1 && f[0].1 == 1, "conditions are linear in the unknowns");
        let k: usize = f[0].0[1..].parse().expect("unknowns are named u<k>");
        *eq.coeffs.entry(k).or_insert_with(Rational::zero) += q;
    }
    eq
}

/// Equations stating that `w` lies in `span(main, ∂_fibre)`.
fn membership_equations(w: &VecField, main: &VecField, fibre: &[Coord], out: &mut Vec<Equation>) {
    let pivot = main
        .components()
        .find(|(c, e)| !fibre.contains(c) && e.is_one())
        .map(|(c, _)| c)
        .expect("a unit component");
    let a = w.get(pivot);
    let rest = w.sub(&main.times(&a).expect("main is atom-free"));
    for (c, e) in rest.components() {
        if fibre.contains(&c) {
            continue;
        }
        for t in e.terms() {
            out.push(equation_of(&t.coeff));
        }
    }
}

/// Tangency conditions of `y` with respect to `(main, ∂_fibre)`.
pub fn tangency_equations(y: &VecField, main: &VecField, fibre: &[Coord]) -> Vec<Equation> {
    let mut out = Vec::new();
    let mut gens = vec![main.clone()];
    gens.extend(fibre.iter().map(|c| VecField::coord(*c)));
    for g in &gens {
        let br = y.bracket(g).expect("generators are atom-free");
        membership_equations(&br, main, fibre, &mut out);
    }
    out
}

pub enum Solution {
    Unique(HashMap<usize, Rational>),
    Inconsistent,
    /// Number of free unknowns.
    Underdetermined(usize),
}

/// Sparse exact elimination.
pub fn solve(eqs: &[Equation], unknowns: usize) -> Solution {
    // pivot unknown -> row (pivot coefficient 1, other entries on non-pivots at insert time)
    let mut rows: HashMap<usize, Equation> = HashMap::new();
    let mut order: Vec<usize> = Vec::new();
    for eq in eqs {
        let mut r = eq.clone();
        loop {
            let hit = r.coeffs.keys().copied().find(|k| rows.contains_key(k));
            let Some(k) = hit else { break };
            let q = r.coeffs.remove(&k).expect("present");
            let p = &rows[&k];
            for (j, v) in &p.coeffs {
                let e = r.coeffs.entry(*j).or_insert_with(Rational::zero);
                *e -= &q * v;
                if e.is_zero() {
                    r.coeffs.remove(j);
                }
            }
            r.constant -= &q * &p.constant;
        }
        let Some((&k, lead)) = r.coeffs.iter().next() else {
            if !r.constant.is_zero() {
                return Solution::Inconsistent;
            }
            continue;
        };
        let inv = lead.recip();
        r.coeffs.remove(&k);
        for v in r.coeffs.values_mut() {
            *v *= &inv;
        }
        r.constant *= &inv;
        rows.insert(k, r);
        order.push(k);
    }
    if rows.len() < unknowns {
        return Solution::Underdetermined(unknowns - rows.len());
    }
    // back substitution in reverse insertion order
    let mut value: HashMap<usize, Rational> = HashMap::new();
    for k in order.iter().rev() {
        let r = &rows[k];
        let mut v = -r.constant.clone();
        for (j, c) in &r.coeffs {
            v -= c * &value[j];
        }
        value.insert(*k, v);
    }
    Solution::Unique(value)
}

/// Replace unknowns by their values.
pub fn substitute_solution(e: &Expr, values: &HashMap<usize, Rational>) -> Expr {
    let terms = e.terms().map(|t| {
        let mut c = Scalar::zero();
        for (m, q) in t.coeff.terms() {
            if m.is_one() {
                c = &c + &Scalar::from_rational(q);
            } else {
                let k: usize = m.factors()[0].0[1..].parse().unwrap();
                c = &c + &Scalar::from_rational(q * &values[&k]);
            }
        }
        Term::new(c, t.mono, t.atom)
    });
    Expr::normalize(e.mode(), terms.collect::<Vec<_>>())
}

/// Solve for the components of level `j` given the lower ones.
/// Flag2: `known = [A, B, C, F1, G1, ...]`, returns `(F^j, G^j)`.
pub fn flag2_level(letters: &[u8], known: &[Expr], j: usize) -> Result<Vec<Expr>, String> {
    let mode = Mode::Flag2;
    let ladder = flag2_ladder(letters);
    let jets: Vec<Coord> = (1..=j).flat_map(|k| [Coord::x(k), Coord::y(k)]).collect();
    let monos = monomials(&jets, 2 * j as u32 + 1);
    let ats: Vec<DerivAtom> = [Base::A, Base::B, Base::C].into_iter().flat_map(|b| atoms(b, j as u32)).collect();
    let mut next = 0;
    let fa = ansatz(mode, &monos, &ats, &mut next);
    let ga = ansatz(mode, &monos, &ats, &mut next);
    let mut y = VecField::zero(mode);
    let coord_of = |i: usize| match i {
        0 => Coord::t(),
        _ if i % 2 == 1 => Coord::x((i - 1) / 2),
        _ => Coord::y((i - 2) / 2),
    };
    for (i, e) in known.iter().enumerate() {
        y.add_component(coord_of(i), e);
    }
    y.add_component(Coord::x(j), &fa.expr);
    y.add_component(Coord::y(j), &ga.expr);
    let eqs = tangency_equations(&y, &ladder[j - 1], &[Coord::x(j), Coord::y(j)]);
    match solve(&eqs, next) {
        Solution::Unique(v) => Ok(vec![substitute_solution(&fa.expr, &v), substitute_solution(&ga.expr, &v)]),
        Solution::Inconsistent => Err("no solution in the ansatz".into()),
        Solution::Underdetermined(n) => Err(format!("{n} free unknowns")),
    }
}

/// Goursat: `known = [F1, ..., F^{j+1}]`, returns `F^{j+2}`.
pub fn goursat_level(letters: &[u8], known: &[Expr], j: usize) -> Result<Expr, String> {
    let mode = Mode::Goursat;
    let ladder = goursat_ladder(letters);
    let vars: Vec<Coord> = (3..=j + 2).map(Coord::g).collect();
    let monos = monomials(&vars, 2 * j as u32 - 1);
    let ats = atoms(Base::F, j as u32);
    let mut next = 0;
    let fa = ansatz(mode, &monos, &ats, &mut next);
    let mut y = VecField::zero(mode);
    for (i, e) in known.iter().enumerate() {
        y.add_component(Coord::g(i + 1), e);
    }
    y.add_component(Coord::g(j + 2), &fa.expr);
    let eqs = tangency_equations(&y, &ladder[j - 1], &[Coord::g(j + 2)]);
    match solve(&eqs, next) {
        Solution::Unique(v) => Ok(substitute_solution(&fa.expr, &v)),
        Solution::Inconsistent => Err("no solution in the ansatz".into()),
        Solution::Underdetermined(n) => Err(format!("{n} free unknowns")),
    }
}

/// The contact seed: given `F^1 = -f_3` and `F^2 = f - x_3 f_3`, solve for `F^3`.
pub fn goursat_seed_third(first: &Expr, second: &Expr) -> Result<Expr, String> {
    let mode = Mode::Goursat;
    let ladder = goursat_ladder(&[1, 1]);
    let monos = monomials(&[Coord::g(3)], 2);
    let ats = atoms(Base::F, 1);
    let mut next = 0;
    let fa = ansatz(mode, &monos, &ats, &mut next);
    let mut y = VecField::zero(mode);
    y.add_component(Coord::g(1), first);
    y.add_component(Coord::g(2), second);
    y.add_component(Coord::g(3), &fa.expr);
    let eqs = tangency_equations(&y, &ladder[0], &[Coord::g(3)]);
    match solve(&eqs, next) {
        Solution::Unique(v) => Ok(substitute_solution(&fa.expr, &v)),
        Solution::Inconsistent => Err("no solution in the ansatz".into()),
        Solution::Underdetermined(n) => Err(format!("{n} free unknowns")),
    }
}
