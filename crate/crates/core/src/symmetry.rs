//! Infinitesimal symmetries: the Goursat recursion driven by a contact
//! hamiltonian `f`, the special 2-flag recursion driven by `(A, B, C)`,
//! verification by brackets against `Δ^r`, and instantiation.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::error::{CodeError, ExprError};
use crate::flags::ClassCode;
use crate::frames::{decompose_in, Decomposition, Frame, NonMembership};
use crate::symexpr::{Base, Coord, DerivAtom, Expr, Mode, VecField};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetryField {
    code: ClassCode,
    comps: Vec<Expr>,
}

/// Name of the `i`-th component (0-based) in the component list of `mode`.
fn component_name(mode: Mode, i: usize) -> String {
    match mode {
        Mode::Goursat => format!("F{}", i + 1),
        Mode::Flag2 => match i {
            0 => "A".into(),
            1 => "B".into(),
            2 => "C".into(),
            _ => {
                let k = (i - 1) / 2;
                if i % 2 == 1 {
                    format!("F{k}")
                } else {
                    format!("G{k}")
                }
            }
        },
    }
}

fn component_coord(mode: Mode, i: usize) -> Coord {
    match mode {
        Mode::Goursat => Coord::g(i + 1),
        Mode::Flag2 => match i {
            0 => Coord::t(),
            _ if i % 2 == 1 => Coord::x((i - 1) / 2),
            _ => Coord::y((i - 2) / 2),
        },
    }
}

impl SymmetryField {
    pub fn code(&self) -> &ClassCode {
        &self.code
    }

    pub fn mode(&self) -> Mode {
        self.code.mode()
    }

    pub fn len(&self) -> usize {
        self.comps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn names(&self) -> Vec<String> {
        (0..self.comps.len()).map(|i| component_name(self.mode(), i)).collect()
    }

    pub fn components(&self) -> impl Iterator<Item = (String, &Expr)> {
        let mode = self.mode();
        self.comps.iter().enumerate().map(move |(i, e)| (component_name(mode, i), e))
    }

    pub fn get(&self, name: &str) -> Option<&Expr> {
        let i = (0..self.comps.len()).find(|&i| component_name(self.mode(), i) == name)?;
        Some(&self.comps[i])
    }

    /// The coordinate direction carrying component `name`.
    pub fn coord_of(&self, name: &str) -> Option<Coord> {
        (0..self.comps.len())
            .find(|&i| component_name(self.mode(), i) == name)
            .map(|i| component_coord(self.mode(), i))
    }

    /// Chart level of each component: `j` for `F^j, G^j`, 0 for `A, B, C`;
    /// in Goursat mode the index of the coordinate.
    fn level_of(&self, i: usize) -> usize {
        match self.mode() {
            Mode::Goursat => i + 1,
            Mode::Flag2 => component_coord(Mode::Flag2, i).level(),
        }
    }

    pub fn to_field(&self) -> VecField {
        let mode = self.mode();
        VecField::from_components(
            mode,
            self.comps.iter().enumerate().map(|(i, e)| (component_coord(mode, i), e.clone())),
        )
    }

    /// The components up to level `j`, as a symmetry of the truncated flag.
    pub fn truncate(&self, j: usize) -> SymmetryField {
        let keep = match self.mode() {
            Mode::Goursat => j + 2,
            Mode::Flag2 => 3 + 2 * j,
        };
        SymmetryField { code: self.code.prefix(j), comps: self.comps[..keep].to_vec() }
    }

    /// Components mentioning a coordinate above their own level (Goursat
    /// components `F^1..F^3` may use the three base coordinates).
    pub fn triangle_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (i, e) in self.comps.iter().enumerate() {
            let allowed = match self.mode() {
                Mode::Goursat => self.level_of(i).max(3),
                Mode::Flag2 => self.level_of(i),
            };
            let mut coords = e.mono_coords();
            for a in e.atoms() {
                coords.extend(a.derivative_coords());
            }
            if coords.iter().any(|c| c.level() > allowed) {
                out.push(component_name(self.mode(), i));
            }
        }
        out
    }

    pub fn manifest(&self) -> Manifest {
        Manifest {
            code: self.code.to_string(),
            mode: self.mode(),
            r: self.code.len(),
            terms: self.components().map(|(n, e)| (n, e.len())).collect(),
        }
    }

    pub fn to_latex(&self) -> String {
        let mut out = String::new();
        for (i, e) in self.comps.iter().enumerate() {
            let name = component_name(self.mode(), i);
            let lhs = match name.split_at(1) {
                (head, "") => head.to_string(),
                (head, idx) => format!("{head}^{{{idx}}}"),
            };
            out.push_str(&format!("{lhs} = {}\n", e.to_latex()));
        }
        out
    }
}

impl fmt::Display for SymmetryField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, e) in self.components() {
            writeln!(f, "{n} = {e}")?;
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct ComponentRepr<'a> {
    name: String,
    expr: &'a Expr,
}

impl Serialize for SymmetryField {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            code: String,
            mode: Mode,
            components: Vec<ComponentRepr<'a>>,
        }
        Repr {
            code: self.code.to_string(),
            mode: self.mode(),
            components: self.components().map(|(name, expr)| ComponentRepr { name, expr }).collect(),
        }
        .serialize(s)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub code: String,
    pub mode: Mode,
    pub r: usize,
    pub terms: Vec<(String, usize)>,
}

fn f_atom(multi: [u32; 3]) -> Expr {
    Expr::atom(DerivAtom::new(Base::F, multi))
}

fn apply(v: &VecField, e: &Expr) -> Expr {
    v.apply(e).expect("ladder fields are atom-free")
}

/// `(F^1, F^2, F^3) = (-f_3, f - x_3 f_3, f_1 + x_3 f_2)`.
pub fn goursat_seed() -> [Expr; 3] {
    let x3 = Coord::g(3);
    let f = f_atom([0, 0, 0]);
    let f1 = f_atom([1, 0, 0]);
    let f2 = f_atom([0, 1, 0]);
    let f3 = f_atom([0, 0, 1]);
    [-&f3, &f - &f3.times_coord(x3), &f1 + &f2.times_coord(x3)]
}

/// `F^{j+2}` from `F^1..F^{j+1}`, for `2 <= j <= r`.
pub fn goursat_prolong(frame: &Frame, comps: &[Expr], j: usize) -> Result<Expr, CodeError> {
    let code = frame.code();
    if code.mode() != Mode::Goursat {
        return Err(CodeError::GoursatOnly);
    }
    if j < 2 || j > code.len() || comps.len() < j + 1 {
        return Err(CodeError::OutOfRange { j, r: code.len() });
    }
    let xj = Coord::g(j + 2);
    let prev = apply(frame.level(j), &comps[j]);
    if j == 2 {
        let look = apply(frame.level(2), &comps[0]);
        return Ok(&prev - &look.times_coord(xj));
    }
    let s = code.lookback(j);
    let look = if s == 0 {
        apply(frame.level(2), &comps[0])
    } else {
        apply(frame.level(s), &comps[s])
    };
    Ok(match code.letter(j) {
        1 => &prev - &look.times_coord(xj),
        _ => (&look - &prev).times_coord(xj),
    })
}

fn f_comp(comps: &[Expr], k: usize) -> &Expr {
    &comps[1 + 2 * k]
}

fn g_comp(comps: &[Expr], k: usize) -> &Expr {
    &comps[2 + 2 * k]
}

/// `(F^1, G^1) = (Z[1]B - x^1 Z[1]A, Z[1]C - y^1 Z[1]A)`.
pub fn flag2_seed() -> (Expr, Expr) {
    let frame = Frame::build(&ClassCode::from_letters(Mode::Flag2, vec![1]).expect("valid"));
    let comps = pure_abc();
    flag2_step(&frame, &comps, 1)
}

fn pure_abc() -> Vec<Expr> {
    [Base::A, Base::B, Base::C].into_iter().map(|b| Expr::atom(DerivAtom::pure(b))).collect()
}

/// `(F^j, G^j)` from `A, B, C, F^1, G^1, ..., F^{j-1}, G^{j-1}`, for `2 <= j <= r`.
pub fn flag2_prolong(frame: &Frame, comps: &[Expr], j: usize) -> Result<(Expr, Expr), CodeError> {
    let code = frame.code();
    if code.mode() != Mode::Flag2 {
        return Err(CodeError::Flag2Only);
    }
    if j < 2 || j > code.len() || comps.len() < 1 + 2 * j {
        return Err(CodeError::OutOfRange { j, r: code.len() });
    }
    Ok(flag2_step(frame, comps, j))
}

fn flag2_step(frame: &Frame, comps: &[Expr], j: usize) -> (Expr, Expr) {
    let code = frame.code();
    let z = frame.level(j);
    let (xj, yj) = (Coord::x(j), Coord::y(j));
    let s = if j == 1 { 0 } else { code.lookback(j) };
    let look = match s {
        0 => apply(frame.level(1), &comps[0]),
        s if code.letter(s) == 2 => apply(frame.level(s), f_comp(comps, s - 1)),
        s => apply(frame.level(s), g_comp(comps, s - 1)),
    };
    let zf = apply(z, f_comp(comps, j - 1));
    let zg = apply(z, g_comp(comps, j - 1));
    match code.letter(j) {
        1 => (&zf - &look.times_coord(xj), &zg - &look.times_coord(yj)),
        2 => ((&look - &zf).times_coord(xj), &zg - &zf.times_coord(yj)),
        _ => ((&look - &zg).times_coord(xj), &zf - &zg.times_coord(yj)),
    }
}

/// The general symmetry of the flag with class `code`, in its chart.
pub fn build_symmetry(code: &ClassCode) -> SymmetryField {
    let frame = Frame::build(code);
    build_with_frame(&frame)
}

pub fn build_with_frame(frame: &Frame) -> SymmetryField {
    let code = frame.code().clone();
    let mut comps: Vec<Expr> = Vec::new();
    match code.mode() {
        Mode::Goursat => {
            comps.extend(goursat_seed());
            for j in 2..=code.len() {
                let next = goursat_prolong(frame, &comps, j).expect("index in range");
                comps.push(next);
            }
        }
        Mode::Flag2 => {
            comps.extend(pure_abc());
            for j in 1..=code.len() {
                let (f, g) = flag2_step(frame, &comps, j);
                comps.push(f);
                comps.push(g);
            }
        }
    }
    SymmetryField { code, comps }
}

/// One bracket `[Y, W]` with a generator `W` of `Δ^r`, decomposed.
#[derive(Clone, Debug, Serialize)]
pub struct BracketCheck {
    pub generator: String,
    pub decomposition: Option<Decomposition>,
    pub residual: Option<NonMembership>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub code: String,
    pub level: usize,
    pub checks: Vec<BracketCheck>,
    pub passed: bool,
}

fn generator_label(f: &Frame, i: usize) -> String {
    if i == 0 {
        let letter = if f.mode() == Mode::Flag2 { 'Z' } else { 'Y' };
        format!("{letter}[{}]", f.len())
    } else {
        format!("d_{}", f.fibre_coords(f.len())[i - 1].name())
    }
}

/// Decompose the brackets of `field` with every generator of `Δ^r`.
pub fn verify_field(field: &VecField, f: &Frame) -> Result<VerifyReport, ExprError> {
    let r = f.len();
    let main = f.top();
    let fibre = f.fibre_coords(r);
    let mut checks = Vec::new();
    for (i, g) in f.generators(r).iter().enumerate() {
        let br = field.bracket(g)?;
        let (decomposition, residual) = match decompose_in(&br, main, &fibre) {
            Ok(d) => (Some(d), None),
            Err(e) => (None, Some(e)),
        };
        checks.push(BracketCheck { generator: generator_label(f, i), decomposition, residual });
    }
    let passed = checks.iter().all(|c| c.residual.is_none());
    Ok(VerifyReport { code: f.code().to_string(), level: r, checks, passed })
}

pub fn verify_symmetry(y: &SymmetryField, f: &Frame) -> VerifyReport {
    verify_field(&y.to_field(), f).expect("frame fields are atom-free")
}

/// Verify every truncation `Y[j]` against `Δ^j`, `j = 1..=r`.
pub fn verify_levels(y: &SymmetryField, f: &Frame) -> Vec<VerifyReport> {
    let lo = if f.mode() == Mode::Goursat { 2 } else { 1 };
    (lo..=f.len())
        .map(|j| verify_symmetry(&y.truncate(j), &f.prefix(j)))
        .collect()
}

/// Polynomials in the base coordinates assigned to the free functions.
#[derive(Clone, Debug)]
pub struct Assignment {
    mode: Mode,
    polys: BTreeMap<Base, Expr>,
}

impl Assignment {
    pub fn flag2(a: Expr, b: Expr, c: Expr) -> Result<Assignment, ExprError> {
        Assignment::new(Mode::Flag2, [(Base::A, a), (Base::B, b), (Base::C, c)])
    }

    pub fn goursat(f: Expr) -> Result<Assignment, ExprError> {
        Assignment::new(Mode::Goursat, [(Base::F, f)])
    }

    fn new(mode: Mode, polys: impl IntoIterator<Item = (Base, Expr)>) -> Result<Assignment, ExprError> {
        let polys: BTreeMap<Base, Expr> = polys.into_iter().collect();
        for e in polys.values() {
            if e.mode() != mode {
                return Err(ExprError::ModeMismatch);
            }
            if e.has_atoms() {
                return Err(ExprError::AtomProduct);
            }
            if let Some(c) = e.mono_coords().into_iter().find(|c| !c.is_base()) {
                return Err(ExprError::NonBaseAssignment(c.name()));
            }
        }
        Ok(Assignment { mode, polys })
    }

    pub fn get(&self, b: Base) -> Option<&Expr> {
        self.polys.get(&b)
    }

    /// Componentwise sum of two assignments.
    pub fn sum(&self, other: &Assignment) -> Assignment {
        let mut polys = self.polys.clone();
        for (b, e) in &other.polys {
            let slot = polys.entry(*b).or_insert_with(|| Expr::zero(self.mode));
            slot.add_assign(e);
        }
        Assignment { mode: self.mode, polys }
    }

    /// The partial derivative of the assigned polynomial named by `atom`.
    pub fn derivative(&self, atom: &DerivAtom) -> Expr {
        let Some(p) = self.polys.get(&atom.base) else {
            return Expr::zero(self.mode);
        };
        let mut out = p.clone();
        for c in atom.derivative_coords() {
            out = out.partial(c);
        }
        out
    }
}

/// Replace every atom by the corresponding partial of the assignment.
pub fn instantiate_expr(e: &Expr, a: &Assignment) -> Expr {
    e.map_atoms(|atom| a.derivative(atom))
}

pub fn instantiate(y: &SymmetryField, a: &Assignment) -> Result<VecField, ExprError> {
    if a.mode != y.mode() {
        return Err(ExprError::ModeMismatch);
    }
    Ok(y.to_field().map_exprs(|e| instantiate_expr(e, a)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::Mono;

    fn code(w: &str, mode: Mode) -> ClassCode {
        ClassCode::validate(w, mode).unwrap()
    }

    fn atom(b: Base, m: [u32; 3]) -> Expr {
        Expr::atom(DerivAtom::new(b, m))
    }

    #[test]
    fn seed_f1_expansion() {
        let (f1, g1) = flag2_seed();
        let (x1, y1) = (Coord::x(1), Coord::y(1));
        let z1a = &(&atom(Base::A, [1, 0, 0]) + &atom(Base::A, [0, 1, 0]).times_coord(x1))
            + &atom(Base::A, [0, 0, 1]).times_coord(y1);
        let z1b = &(&atom(Base::B, [1, 0, 0]) + &atom(Base::B, [0, 1, 0]).times_coord(x1))
            + &atom(Base::B, [0, 0, 1]).times_coord(y1);
        assert_eq!(f1, &z1b - &z1a.times_coord(x1));
        assert_eq!(g1.len(), 6);
    }

    #[test]
    fn goursat_class_112() {
        let c = code("1.1.2", Mode::Goursat);
        let frame = Frame::build(&c);
        let y = build_symmetry(&c);
        assert_eq!(y.len(), 5);
        let f = |n: &str| y.get(n).unwrap().clone();
        let expect = (&frame.level(2).apply(&f("F1")).unwrap() - &frame.level(3).apply(&f("F4")).unwrap())
            .times_coord(Coord::g(5));
        assert_eq!(f("F5"), expect);
        assert!(verify_symmetry(&y, &frame).passed);
    }

    #[test]
    fn perturbed_field_fails() {
        let c = code("1.2", Mode::Flag2);
        let frame = Frame::build(&c);
        let y = build_symmetry(&c);
        let a = Assignment::flag2(
            Expr::coord(Coord::t()),
            Expr::coord(Coord::x(0)),
            Expr::zero(Mode::Flag2),
        )
        .unwrap();
        let v = instantiate(&y, &a).unwrap();
        assert!(verify_field(&v, &frame).unwrap().passed);
        let bad = v.add(&VecField::coord(Coord::x(0)).times_coord(Coord::x(2)));
        let rep = verify_field(&bad, &frame).unwrap();
        assert!(!rep.passed);
        let res = rep.checks.iter().find_map(|c| c.residual.clone()).unwrap();
        assert_eq!(res.coord, "x0");
        assert!(verify_field(&VecField::zero(Mode::Flag2), &frame).unwrap().passed);
    }

    #[test]
    fn scaling_field_at_length_one() {
        let y = build_symmetry(&code("1", Mode::Flag2));
        let a = Assignment::flag2(
            Expr::coord(Coord::t()),
            Expr::coord(Coord::x(0)),
            Expr::coord(Coord::y(0)),
        )
        .unwrap();
        let v = instantiate(&y, &a).unwrap();
        let expect = VecField::from_components(
            Mode::Flag2,
            [Coord::t(), Coord::x(0), Coord::y(0)].map(|c| (c, Expr::coord(c))),
        );
        assert_eq!(v, expect);
    }

    #[test]
    fn non_base_assignment_rejected() {
        let e = Assignment::flag2(Expr::coord(Coord::x(1)), Expr::zero(Mode::Flag2), Expr::zero(Mode::Flag2));
        assert_eq!(e.unwrap_err(), ExprError::NonBaseAssignment("x1".into()));
        let m = Expr::monomial(Mode::Goursat, 1, Mono::var(Coord::g(4)), None);
        assert!(Assignment::goursat(m).is_err());
    }

    #[test]
    fn names_and_levels() {
        let y = build_symmetry(&code("1.2.3", Mode::Flag2));
        assert_eq!(y.names(), ["A", "B", "C", "F1", "G1", "F2", "G2", "F3", "G3"]);
        assert_eq!(y.coord_of("G2"), Some(Coord::y(2)));
        assert!(y.triangle_violations().is_empty());
        assert_eq!(y.truncate(2).len(), 7);
    }
}
