//! Frame ladders `Z[1..r]` (special 2-flags) and `Y[1..r]` (Goursat flags),
//! the flag distributions `D^j`, membership decomposition, and pointwise
//! linear algebra: ranks, small growth vectors, singularity classes.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num::{One, Zero};
use serde::Serialize;

use crate::error::{AnalysisError, CodeError, ExprError};
use crate::flags::{ClassCode, Sandwich, SandwichWord};
use crate::linalg;
use crate::scalar::Rational;
use crate::symexpr::{Coord, CoordKind, Expr, Mode, Mono, VecField};

pub use crate::symexpr::PointSpec;

#[derive(Clone, Debug)]
pub struct Frame {
    code: ClassCode,
    ladder: Vec<VecField>,
}

impl Frame {
    /// Build the ladder for `code`, one step per letter.
    pub fn build(code: &ClassCode) -> Frame {
        let ladder = match code.mode() {
            Mode::Flag2 => flag2_ladder(code),
            Mode::Goursat => goursat_ladder(code),
        };
        Frame { code: code.clone(), ladder }
    }

    /// Frame of the first `j` letters (the chart of the truncated flag).
    pub fn prefix(&self, j: usize) -> Frame {
        Frame { code: self.code.prefix(j), ladder: self.ladder[..j].to_vec() }
    }

    pub fn code(&self) -> &ClassCode {
        &self.code
    }

    pub fn mode(&self) -> Mode {
        self.code.mode()
    }

    pub fn len(&self) -> usize {
        self.ladder.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ladder.is_empty()
    }

    /// `Z[j]` or `Y[j]`, 1-based.
    pub fn level(&self, j: usize) -> &VecField {
        &self.ladder[j - 1]
    }

    pub fn top(&self) -> &VecField {
        self.ladder.last().expect("frames have length >= 1")
    }

    pub fn ladder(&self) -> &[VecField] {
        &self.ladder
    }

    /// The fibre coordinates added at level `j`: `x^j, y^j` or `x_{j+2}`.
    pub fn fibre_coords(&self, j: usize) -> Vec<Coord> {
        match self.mode() {
            Mode::Flag2 => vec![Coord::x(j), Coord::y(j)],
            Mode::Goursat => vec![Coord::g(j + 2)],
        }
    }

    /// Generators of `Δ^j`: the ladder field and the new fibre directions.
    pub fn generators(&self, j: usize) -> Vec<VecField> {
        let mut out = vec![self.level(j).clone()];
        out.extend(self.fibre_coords(j).into_iter().map(VecField::coord));
        out
    }

    pub fn chart_coords(&self) -> Vec<Coord> {
        self.mode().chart_coords(self.len())
    }

    pub fn dim(&self) -> usize {
        self.mode().chart_dim(self.len())
    }

    /// Generators of the flag member `D^j` in the full chart, `0 <= j <= r`.
    pub fn flag_member(&self, j: usize) -> Vec<VecField> {
        if j == 0 {
            return self.chart_coords().into_iter().map(VecField::coord).collect();
        }
        let mut out = vec![self.level(j).clone()];
        for k in j..=self.len() {
            out.extend(self.fibre_coords(k).into_iter().map(VecField::coord));
        }
        out
    }

    /// Fibre coordinates spanned by coordinate fields in `D^j`.
    fn member_fibre(&self, j: usize) -> Vec<Coord> {
        (j..=self.len()).flat_map(|k| self.fibre_coords(k)).collect()
    }

    /// The covariant subdistribution `F = (∂_{x^i}, ∂_{y^i}; i >= 1)` (flag2).
    pub fn covariant(&self) -> Vec<VecField> {
        cauchy(self, 0)
    }
}

impl Frame {
    fn ladder_symbol(&self) -> &'static str {
        match self.mode() {
            Mode::Flag2 => "Z",
            Mode::Goursat => "Y",
        }
    }

    /// One `Z[j] = ...` line per level.
    pub fn to_latex(&self) -> String {
        let sym = self.ladder_symbol();
        self.ladder
            .iter()
            .enumerate()
            .map(|(i, v)| format!("{sym}[{}] = {}\n", i + 1, v.to_latex()))
            .collect()
    }
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.ladder.iter().enumerate() {
            writeln!(f, "{}[{}] = {v}", self.ladder_symbol(), i + 1)?;
        }
        Ok(())
    }
}

impl Serialize for Frame {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            code: String,
            mode: Mode,
            chart: Vec<String>,
            ladder: &'a [VecField],
        }
        Repr {
            code: self.code.to_string(),
            mode: self.mode(),
            chart: self.chart_coords().into_iter().map(Coord::name).collect(),
            ladder: &self.ladder,
        }
        .serialize(s)
    }
}

fn flag2_ladder(code: &ClassCode) -> Vec<VecField> {
    let mut ladder = Vec::with_capacity(code.len());
    let z1 = VecField::from_components(
        Mode::Flag2,
        [
            (Coord::t(), Expr::one(Mode::Flag2)),
            (Coord::x(0), Expr::coord(Coord::x(1))),
            (Coord::y(0), Expr::coord(Coord::y(1))),
        ],
    );
    ladder.push(z1);
    for j in 2..=code.len() {
        let prev = &ladder[j - 2];
        let (xj, yj) = (Coord::x(j), Coord::y(j));
        let (xp, yp) = (Coord::x(j - 1), Coord::y(j - 1));
        let next = match code.letter(j) {
            1 => {
                let mut z = prev.clone();
                z.add_component(xp, &Expr::coord(xj));
                z.add_component(yp, &Expr::coord(yj));
                z
            }
            2 => {
                let mut z = prev.times_coord(xj);
                z.add_component(xp, &Expr::one(Mode::Flag2));
                z.add_component(yp, &Expr::coord(yj));
                z
            }
            _ => {
                let mut z = prev.times_coord(xj);
                z.add_component(xp, &Expr::coord(yj));
                z.add_component(yp, &Expr::one(Mode::Flag2));
                z
            }
        };
        ladder.push(next);
    }
    ladder
}

fn goursat_ladder(code: &ClassCode) -> Vec<VecField> {
    let g = Coord::g;
    let mut ladder = Vec::with_capacity(code.len());
    ladder.push(VecField::from_components(
        Mode::Goursat,
        [(g(1), Expr::one(Mode::Goursat)), (g(2), Expr::coord(g(3)))],
    ));
    for j in 2..=code.len() {
        let prev = &ladder[j - 2];
        let next = if j == 2 || code.letter(j) == 1 {
            let mut y = prev.clone();
            y.add_component(g(j + 1), &Expr::coord(g(j + 2)));
            y
        } else {
            let mut y = prev.times_coord(g(j + 2));
            y.add_component(g(j + 1), &Expr::one(Mode::Goursat));
            y
        };
        ladder.push(next);
    }
    ladder
}

/// Generator sets of `D^r, D^{r-1}, ..., D^0`.
pub fn derived_flag(f: &Frame) -> Vec<Vec<VecField>> {
    (0..=f.len()).rev().map(|j| f.flag_member(j)).collect()
}

/// Coefficients of a field in `(main, ∂_fibre...)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Decomposition {
    pub main: Expr,
    pub fibre: Vec<(String, Expr)>,
}

/// Certificate that a field is not in the distribution: the first residual component.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NonMembership {
    pub coord: String,
    pub residual: Expr,
}

/// Solve `w = a·main + Σ b_k ∂_{fibre_k}`: read `a` at a component where
/// `main` is identically 1, read the fibre coefficients directly, then check
/// that nothing else remains.
pub fn decompose_in(w: &VecField, main: &VecField, fibre: &[Coord]) -> Result<Decomposition, NonMembership> {
    let pivot = main
        .components()
        .find(|(c, e)| !fibre.contains(c) && e.is_one())
        .map(|(c, _)| c)
        .expect("ladder fields always have a unit component");
    let a = w.get(pivot);
    let scaled = if a.is_zero() {
        VecField::zero(w.mode())
    } else {
        main.times(&a).expect("ladder fields are atom-free")
    };
    let residual = w.sub(&scaled);
    let mut coeffs = Vec::new();
    for &c in fibre {
        coeffs.push((c.name(), residual.get(c)));
    }
    if let Some((c, e)) = residual.components().find(|(c, _)| !fibre.contains(c)) {
        return Err(NonMembership { coord: c.name(), residual: e.clone() });
    }
    Ok(Decomposition { main: a, fibre: coeffs })
}

/// Decompose `w` over the generators of `Δ^r` of the frame.
pub fn decompose(w: &VecField, f: &Frame) -> Result<Decomposition, NonMembership> {
    decompose_in(w, f.top(), &f.fibre_coords(f.len()))
}

/// Check `[D^j, D^j] ⊆ D^{j-1}` symbolically, for `1 <= j <= r`.
pub fn lie_square_contained(f: &Frame, j: usize) -> Result<(), NonMembership> {
    let gens = f.flag_member(j);
    if j == 1 {
        return Ok(());
    }
    let main = f.level(j - 1);
    let fibre = f.member_fibre(j - 1);
    for (i, a) in gens.iter().enumerate() {
        for b in &gens[i + 1..] {
            let br = a.bracket(b).expect("frame fields are atom-free");
            decompose_in(&br, main, &fibre)?;
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// pointwise evaluation

pub type NumericPoint = BTreeMap<Coord, Rational>;

/// Value of an atom-free, parameter-free expression at a numeric point.
pub fn eval_numeric(e: &Expr, p: &NumericPoint) -> Result<Rational, ExprError> {
    let mut acc = Rational::zero();
    for t in e.terms() {
        if t.atom.is_some() {
            return Err(ExprError::AtomProduct);
        }
        let mut v = t
            .coeff
            .as_rational()
            .cloned()
            .ok_or_else(|| ExprError::Parametric(t.coeff.to_string()))?;
        for &(c, k) in t.mono.pairs() {
            let x = match p.get(&c) {
                Some(x) => x,
                None if c.is_base() => {
                    v = Rational::zero();
                    break;
                }
                None => return Err(ExprError::Unassigned(c.name())),
            };
            for _ in 0..k {
                v *= x;
            }
        }
        acc += v;
    }
    Ok(acc)
}

pub fn eval_field(v: &VecField, coords: &[Coord], p: &NumericPoint) -> Result<Vec<Rational>, ExprError> {
    coords
        .iter()
        .map(|c| match v.component(*c) {
            Some(e) => eval_numeric(e, p),
            None => Ok(Rational::zero()),
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Role {
    /// `D^j`
    Flag(usize),
    Covariant,
    /// `L(D^j)`
    Cauchy(usize),
    /// `V_i` of a small flag
    Small(usize),
}

/// A subspace of a tangent space, given by spanning coordinate vectors.
#[derive(Clone, Debug)]
pub struct EvaluatedDistribution {
    pub role: Role,
    pub coords: Vec<Coord>,
    pub vectors: Vec<Vec<Rational>>,
}

impl EvaluatedDistribution {
    pub fn at(role: Role, gens: &[VecField], coords: &[Coord], p: &NumericPoint) -> Result<Self, ExprError> {
        let vectors = gens
            .iter()
            .map(|g| eval_field(g, coords, p))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(EvaluatedDistribution { role, coords: coords.to_vec(), vectors })
    }

    pub fn rank(&self) -> usize {
        linalg::rank(&self.vectors)
    }

    pub fn is_subspace_of(&self, other: &EvaluatedDistribution) -> bool {
        linalg::span_contains(&other.vectors, &self.vectors)
    }

    pub fn intersect(&self, other: &EvaluatedDistribution, role: Role) -> EvaluatedDistribution {
        EvaluatedDistribution {
            role,
            coords: self.coords.clone(),
            vectors: linalg::intersection(&self.vectors, &other.vectors, self.coords.len()),
        }
    }
}

/// Ranks of `D^r, ..., D^0` at a numeric point.
pub fn flag_ranks(f: &Frame, p: &PointSpec) -> Result<Vec<usize>, ExprError> {
    let np = p.numeric()?;
    let coords = f.chart_coords();
    derived_flag(f)
        .iter()
        .enumerate()
        .map(|(i, gens)| Ok(EvaluatedDistribution::at(Role::Flag(f.len() - i), gens, &coords, &np)?.rank()))
        .collect()
}

/// Generators of the Cauchy characteristic `L(D^j)`: the coordinate fields
/// of level above `j` (for `j = 0` this is the covariant subdistribution `F`).
pub fn cauchy(f: &Frame, j: usize) -> Vec<VecField> {
    f.chart_coords()
        .into_iter()
        .filter(|c| c.level() > j && c.kind() != CoordKind::T)
        .map(VecField::coord)
        .collect()
}

pub fn cauchy_at(f: &Frame, j: usize, p: &NumericPoint) -> Result<EvaluatedDistribution, ExprError> {
    EvaluatedDistribution::at(Role::Cauchy(j), &cauchy(f, j), &f.chart_coords(), p)
}

/// The pointwise intersection `D^{j+1}(p) ∩ F(p)`; it equals `L(D^j)(p)` at
/// regular points and is larger where the flag is singular.
pub fn flag_meet_covariant(f: &Frame, j: usize, p: &NumericPoint) -> Result<EvaluatedDistribution, ExprError> {
    let coords = f.chart_coords();
    let cov = EvaluatedDistribution::at(Role::Covariant, &f.covariant(), &coords, p)?;
    let d = EvaluatedDistribution::at(Role::Flag(j + 1), &f.flag_member(j + 1), &coords, p)?;
    Ok(d.intersect(&cov, Role::Cauchy(j)))
}

/// Linear span over the rationals of symbolic vector fields, used to drop
/// generators that are constant combinations of earlier ones.
struct SymbolicSpan {
    rows: HashMap<(Coord, Mono), BTreeMap<(Coord, Mono), Rational>>,
}

impl SymbolicSpan {
    fn new() -> Self {
        SymbolicSpan { rows: HashMap::new() }
    }

    fn flatten(v: &VecField) -> BTreeMap<(Coord, Mono), Rational> {
        let mut out = BTreeMap::new();
        for (c, e) in v.components() {
            for t in e.terms() {
                let q = t.coeff.as_rational().cloned().expect("frame fields have rational coefficients");
                out.insert((c, t.mono), q);
            }
        }
        out
    }

    /// Insert `v`; returns false if it was already in the span.
    fn insert(&mut self, v: &VecField) -> bool {
        let mut row = Self::flatten(v);
        loop {
            let Some((key, lead)) = row.iter().next().map(|(k, q)| (k.clone(), q.clone())) else {
                return false;
            };
            match self.rows.get(&key) {
                Some(basis) => {
                    // basis rows are normalized to leading coefficient 1
                    for (k, q) in basis {
                        let e = row.entry(k.clone()).or_insert_with(Rational::zero);
                        *e -= &lead * q;
                        if e.is_zero() {
                            row.remove(k);
                        }
                    }
                }
                None => {
                    let inv = lead.recip();
                    for q in row.values_mut() {
                        *q *= &inv;
                    }
                    debug_assert!(row[&key].is_one());
                    self.rows.insert(key, row);
                    return true;
                }
            }
        }
    }
}

/// The small flag `V_1 = D, V_{i+1} = V_i + [D, V_i]` of the distribution
/// spanned by `gens`, evaluated at `p` for `i = 1..=levels` (or until the full
/// dimension is reached when `levels` is `None`).
pub fn small_flag(
    gens: &[VecField],
    coords: &[Coord],
    p: &NumericPoint,
    levels: Option<usize>,
) -> Result<Vec<EvaluatedDistribution>, ExprError> {
    let mut span = SymbolicSpan::new();
    let mut all: Vec<VecField> = Vec::new();
    for g in gens {
        if span.insert(g) {
            all.push(g.clone());
        }
    }
    let mut frontier = all.clone();
    let mut out = vec![EvaluatedDistribution::at(Role::Small(1), &all, coords, p)?];
    let full = coords.len();
    loop {
        let i = out.len();
        match levels {
            Some(n) if i >= n => break,
            None if out[i - 1].rank() == full => break,
            _ => {}
        }
        if frontier.is_empty() {
            // the module stopped growing; further levels repeat
            let last = out[i - 1].clone();
            if levels.is_none() {
                break;
            }
            out.push(EvaluatedDistribution { role: Role::Small(i + 1), ..last });
            continue;
        }
        let mut next = Vec::new();
        for d in gens {
            for v in &frontier {
                let b = d.bracket(v)?;
                if !b.is_zero() && span.insert(&b) {
                    next.push(b);
                }
            }
        }
        all.extend(next.iter().cloned());
        frontier = next;
        out.push(EvaluatedDistribution::at(Role::Small(i + 1), &all, coords, p)?);
    }
    Ok(out)
}

/// Dimensions of `V_1 ⊂ V_2 ⊂ ...` of `Δ^r` at `p`, up to the first maximal entry.
pub fn small_growth_vector(f: &Frame, p: &PointSpec) -> Result<Vec<usize>, ExprError> {
    let np = p.numeric()?;
    let coords = f.chart_coords();
    let flag = small_flag(&f.generators(f.len()), &coords, &np, None)?;
    let mut dims: Vec<usize> = flag.iter().map(EvaluatedDistribution::rank).collect();
    dims.dedup();
    Ok(dims)
}

/// Sandwich letters at `p`: position `j >= 2` is 2̲ iff `D^j(p) ⊂ L(D^{j-2})(p)`.
pub fn sandwich_at(f: &Frame, p: &PointSpec) -> Result<SandwichWord, AnalysisError> {
    if f.mode() != Mode::Flag2 {
        return Err(AnalysisError::Code(CodeError::Flag2Only));
    }
    let np = p.numeric()?;
    let coords = f.chart_coords();
    let mut word = vec![Sandwich::One];
    for j in 2..=f.len() {
        let d = EvaluatedDistribution::at(Role::Flag(j), &f.flag_member(j), &coords, &np)?;
        let l = cauchy_at(f, j - 2, &np)?;
        word.push(if d.is_subspace_of(&l) { Sandwich::Two } else { Sandwich::One });
    }
    Ok(SandwichWord(word))
}

/// Singularity class of the germ at `p` of the flag visible in the chart of `f`.
pub fn classify_point(f: &Frame, p: &PointSpec) -> Result<ClassCode, AnalysisError> {
    let sandwich = sandwich_at(f, p)?;
    let np = p.numeric()?;
    let mut letters = Vec::with_capacity(f.len());
    let mut prev_two: Option<usize> = None;
    for (idx, l) in sandwich.0.iter().enumerate() {
        let s = idx + 1;
        let letter = match (l, prev_two) {
            (Sandwich::One, _) => 1,
            (Sandwich::Two, None) => 2,
            (Sandwich::Two, Some(t)) => {
                let ones = s - t - 1;
                let sub = f.prefix(s);
                let sub_coords = sub.chart_coords();
                let sub_point: NumericPoint =
                    sub_coords.iter().map(|c| (*c, np[c].clone())).collect();
                let flag = small_flag(&sub.flag_member(s), &sub_coords, &sub_point, Some(2 * ones + 3))?;
                let v = &flag[2 * ones + 2];
                let l = cauchy_at(&sub, t - 2, &sub_point)?;
                if v.is_subspace_of(&l) {
                    3
                } else {
                    2
                }
            }
        };
        if *l == Sandwich::Two {
            prev_two = Some(s);
        }
        letters.push(letter);
    }
    Ok(ClassCode::from_letters(Mode::Flag2, letters)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn frame(w: &str, mode: Mode) -> Frame {
        Frame::build(&ClassCode::validate(w, mode).unwrap())
    }

    #[test]
    fn first_ladder_fields() {
        let f = frame("1.2", Mode::Flag2);
        assert_eq!(f.level(1).to_string(), "d_t + x1*d_x0 + y1*d_y0");
        // Z[2] = x^2 Z[1] + ∂_{x^1} + y^2 ∂_{y^1}
        let expect = f.level(1).times_coord(Coord::x(2))
            .add(&VecField::coord(Coord::x(1)))
            .add(&VecField::coord(Coord::y(1)).times_coord(Coord::y(2)));
        assert_eq!(f.level(2), &expect);
        let g = frame("1.1", Mode::Goursat);
        let expect = g.level(1).add(&VecField::coord(Coord::g(3)).times_coord(Coord::g(4)));
        assert_eq!(g.level(2), &expect);
    }

    #[test]
    fn decompose_examples() {
        let f = frame("1.2.1", Mode::Flag2);
        let d = decompose(f.top(), &f).unwrap();
        assert!(d.main.is_one());
        assert!(d.fibre.iter().all(|(_, e)| e.is_zero()));
        let err = decompose(&VecField::coord(Coord::x(0)), &f).unwrap_err();
        assert_eq!(err.coord, "x0");
        for w in ["1", "1.1", "1.2.3"] {
            let f = frame(w, Mode::Flag2);
            assert!(decompose(&VecField::coord(Coord::x(0)), &f).is_err());
        }
    }

    #[test]
    fn growth_vectors_of_length_two() {
        let f = frame("1.2", Mode::Flag2);
        let p0 = PointSpec::origin(Mode::Flag2, 2);
        assert_eq!(small_growth_vector(&f, &p0).unwrap(), vec![3, 5, 6, 7]);
        let p1 = PointSpec::origin(Mode::Flag2, 2).with(Coord::x(2), 1);
        assert_eq!(small_growth_vector(&f, &p1).unwrap(), vec![3, 5, 7]);
        let parametric = PointSpec::parse(Mode::Flag2, 2, "x2=c").unwrap();
        assert!(small_growth_vector(&f, &parametric).is_err());
    }

    #[test]
    fn flag_ranks_grow_regularly() {
        let f = frame("1.2", Mode::Flag2);
        let p = PointSpec::origin(Mode::Flag2, 2).with(Coord::x(2), int(2));
        assert_eq!(flag_ranks(&f, &p).unwrap(), vec![3, 5, 7]);
        let g = frame("1.1.2", Mode::Goursat);
        let p = PointSpec::origin(Mode::Goursat, 3).with(Coord::g(5), 1);
        assert_eq!(flag_ranks(&g, &p).unwrap(), vec![2, 3, 4, 5]);
    }

    #[test]
    fn origin_classes() {
        for w in ["1.2", "1.2.3", "1.2.2", "1.1.1", "1.2.1"] {
            let f = frame(w, Mode::Flag2);
            let p = PointSpec::origin(Mode::Flag2, f.len());
            assert_eq!(classify_point(&f, &p).unwrap().to_string(), w, "chart {w}");
        }
        let f = frame("1.2.1", Mode::Flag2);
        let p = PointSpec::origin(Mode::Flag2, 3).with(Coord::x(3), 1);
        assert_eq!(classify_point(&f, &p).unwrap().to_string(), "1.2.1");
    }

    #[test]
    fn cauchy_fields_preserve_the_flag() {
        let f = frame("1.2.1.3", Mode::Flag2);
        for j in 1..f.len() {
            let d = f.flag_member(j);
            for l in cauchy(&f, j) {
                for g in &d {
                    let br = l.bracket(g).unwrap();
                    assert!(decompose_in(&br, f.level(j), &f.member_fibre(j)).is_ok());
                }
            }
        }
    }
}
