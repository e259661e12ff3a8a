//! Freeze analysis: evaluate symmetry components at a reference point,
//! impose the vanishing of all but some of them, and decide by exact row
//! reduction whether the remaining ones are forced to vanish as well.

use std::collections::BTreeSet;
use std::fmt::{self, Write as _};

use serde::Serialize;

use crate::error::{AnalysisError, CodeError};
use crate::flags::ClassCode;
use crate::scalar::{ParamMono, Scalar};
use crate::symexpr::{substitute, Coord, DerivAtom, LinForm, Mode, PointSpec};
use crate::symmetry::{build_symmetry, SymmetryField};

/// Chart length in which component `name` lives.
fn component_length(y: &SymmetryField, name: &str) -> usize {
    let c = y.coord_of(name).expect("component of y");
    match y.mode() {
        Mode::Flag2 => c.level(),
        Mode::Goursat => c.level().max(3) - 2,
    }
}

/// Each component evaluated at the projection of `p` to its own chart.
pub fn evaluate_components(y: &SymmetryField, p: &PointSpec) -> Result<Vec<(String, LinForm)>, AnalysisError> {
    if p.mode() != y.mode() || p.length() != y.code().len() {
        return Err(AnalysisError::Invalid(format!(
            "point of a length-{} {} chart used with code {}",
            p.length(),
            p.mode(),
            y.code()
        )));
    }
    let mut out = Vec::with_capacity(y.len());
    for (name, e) in y.components() {
        let len = component_length(y, &name);
        let q = if y.mode() == Mode::Goursat && len < 2 { p.project(2) } else { p.project(len) };
        out.push((name, substitute(e, &q)?));
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct FreezeSystem {
    pub rows: Vec<(String, LinForm)>,
    pub assumptions: BTreeSet<String>,
    pub targets: Vec<(String, LinForm)>,
}

impl FreezeSystem {
    pub fn new(rows: Vec<(String, LinForm)>, targets: Vec<(String, LinForm)>) -> FreezeSystem {
        FreezeSystem { rows, assumptions: BTreeSet::new(), targets }
    }

    /// Declare a parameter nonzero.
    pub fn assume_nonzero(mut self, name: &str) -> FreezeSystem {
        self.assumptions.insert(name.to_string());
        self
    }
}

/// Rows: all non-exempt components; targets: the exempt ones.
pub fn freeze_system(y: &SymmetryField, p: &PointSpec, exempt: &[&str]) -> Result<FreezeSystem, AnalysisError> {
    for name in exempt {
        if y.get(name).is_none() {
            return Err(AnalysisError::UnknownComponent(name.to_string()));
        }
    }
    let (targets, rows) = evaluate_components(y, p)?
        .into_iter()
        .partition(|(n, _)| exempt.contains(&n.as_str()));
    Ok(FreezeSystem::new(rows, targets))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    /// The target lies in the span of the rows.
    ForcedZero,
    /// The target reduces to a nonzero constant: it is pinned, not free.
    ForcedRelation { value: LinForm },
    /// The reduced target still involves atoms not fixed by the rows.
    Free { reduced: LinForm },
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::ForcedZero => f.write_str("forced_zero"),
            Verdict::ForcedRelation { value } => write!(f, "forced_relation ({value})"),
            Verdict::Free { reduced } => write!(f, "free (reduces to {reduced})"),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Outcome {
    Done { verdicts: Vec<(String, Verdict)> },
    /// The rows are contradictory: an atom-free nonzero row.
    Inconsistent { row: String },
    /// A pivot coefficient that is neither a unit nor a monomial in parameters.
    Unresolved { pivot: DerivAtom, coefficient: String },
}

/// One case of the analysis, under its own assumptions.
#[derive(Clone, Debug, Serialize)]
pub struct Branch {
    /// Parameters (or parameter polynomials) assumed nonzero.
    pub nonzero: Vec<String>,
    /// Parameters set to zero.
    pub zero: Vec<String>,
    pub echelon: Vec<(DerivAtom, LinForm)>,
    pub outcome: Outcome,
}

#[derive(Clone, Debug, Serialize)]
pub struct Analysis {
    pub system: FreezeSystem,
    pub branches: Vec<Branch>,
}

impl Analysis {
    /// The verdict for `target` if every branch finished and all agree.
    pub fn verdict(&self, target: &str) -> Option<Verdict> {
        let mut found: Option<Verdict> = None;
        for b in &self.branches {
            let Outcome::Done { verdicts } = &b.outcome else {
                return None;
            };
            let v = verdicts.iter().find(|(n, _)| n == target)?.1.clone();
            match &found {
                None => found = Some(v),
                Some(prev) if std::mem::discriminant(prev) == std::mem::discriminant(&v) => {}
                Some(_) => return None,
            }
        }
        found
    }

    /// The verdict for the single target of the system.
    pub fn single_verdict(&self) -> Option<Verdict> {
        match self.system.targets.as_slice() {
            [(name, _)] => self.verdict(name),
            _ => None,
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "frozen components (set to zero):");
        for (n, row) in &self.system.rows {
            let _ = writeln!(out, "  {n}: {row}");
        }
        let _ = writeln!(out, "targets:");
        for (n, t) in &self.system.targets {
            let _ = writeln!(out, "  {n}: {t}");
        }
        if !self.system.assumptions.is_empty() {
            let names: Vec<_> = self.system.assumptions.iter().map(|a| format!("{a} != 0")).collect();
            let _ = writeln!(out, "assumptions: {}", names.join(", "));
        }
        for (i, b) in self.branches.iter().enumerate() {
            let mut cond: Vec<String> = b.nonzero.iter().map(|p| format!("{p} != 0")).collect();
            cond.extend(b.zero.iter().map(|p| format!("{p} = 0")));
            let cond = if cond.is_empty() { "no conditions".to_string() } else { cond.join(", ") };
            let _ = writeln!(out, "branch {} ({cond}):", i + 1);
            for (a, row) in &b.echelon {
                let _ = writeln!(out, "  pivot {a}: {row}");
            }
            match &b.outcome {
                Outcome::Done { verdicts } => {
                    for (n, v) in verdicts {
                        let _ = writeln!(out, "  {n}: {v}");
                    }
                }
                Outcome::Inconsistent { row } => {
                    let _ = writeln!(out, "  inconsistent row {row}");
                }
                Outcome::Unresolved { pivot, coefficient } => {
                    let _ = writeln!(out, "  unresolved: pivot {pivot} has coefficient {coefficient}");
                }
            }
        }
        out
    }

    pub fn to_latex(&self) -> String {
        let mut out = String::new();
        for (n, row) in &self.system.rows {
            let _ = writeln!(out, "{} = {} = 0 \\\\", latex_name(n), row.to_latex());
        }
        for (n, t) in &self.system.targets {
            let v = self.verdict(n).map_or("undecided".to_string(), |v| v.to_string());
            let _ = writeln!(out, "{} = {} \\quad \\text{{{v}}} \\\\", latex_name(n), t.to_latex());
        }
        out
    }
}

fn latex_name(n: &str) -> String {
    match n.split_at(1) {
        (h, "") => h.to_string(),
        (h, idx) => format!("{h}^{{{idx}}}"),
    }
}

struct Context {
    nonzero_params: BTreeSet<String>,
    nonzero_polys: Vec<Scalar>,
    zero: Vec<String>,
}

impl Context {
    fn nonzero_labels(&self) -> Vec<String> {
        self.nonzero_params
            .iter()
            .cloned()
            .chain(self.nonzero_polys.iter().map(|p| format!("({p})")))
            .collect()
    }

    /// Whether `s` is nonzero under the assumptions.
    fn is_unit(&self, s: &Scalar) -> bool {
        if let Some(q) = s.as_rational() {
            return !num::Zero::is_zero(q);
        }
        if let Some((m, _)) = s.as_monomial() {
            return m.factors().iter().all(|(p, _)| self.nonzero_params.contains(p));
        }
        self.nonzero_polys.iter().any(|p| same_up_to_constant(p, s))
    }
}

fn same_up_to_constant(a: &Scalar, b: &Scalar) -> bool {
    let (ta, tb) = (a.terms(), b.terms());
    if ta.len() != tb.len() || ta.is_empty() {
        return false;
    }
    let ratio = &tb[0].1 / &ta[0].1;
    ta.iter().zip(&tb).all(|((ma, qa), (mb, qb))| ma == mb && &(qa * &ratio) == qb)
}

/// Scale a row so that it is easier to read: rational rows get pivot 1.
fn tidy(row: LinForm) -> LinForm {
    let Some(lead) = row.leading_atom() else {
        return row;
    };
    if row.terms().all(|(_, c)| c.is_constant()) && row.constant().is_constant() {
        let q = row.coeff(&lead).as_rational().cloned().expect("constant");
        return row.scale(&Scalar::from_rational(q.recip()));
    }
    row
}

/// `p·row − q·basis`, eliminating the pivot of `basis` from `row`.
fn eliminate(row: &LinForm, pivot: &DerivAtom, basis: &LinForm) -> LinForm {
    let p = basis.coeff(pivot);
    let q = row.coeff(pivot);
    if p.is_one() {
        row.sub(&basis.scale(&q))
    } else {
        row.scale(&p).sub(&basis.scale(&q))
    }
}

/// Remove all pivot atoms from `row`, smallest first.
fn reduce(row: &LinForm, echelon: &[(DerivAtom, LinForm)]) -> LinForm {
    let mut row = row.clone();
    loop {
        let next = row
            .atoms()
            .into_iter()
            .find_map(|a| echelon.iter().find(|(p, _)| *p == a));
        match next {
            Some((p, b)) => row = eliminate(&row, p, b),
            None => return row,
        }
    }
}

/// The first parameter of a monomial coefficient not yet assumed nonzero.
fn splitting_param(m: &ParamMono, ctx: &Context) -> Option<String> {
    m.factors().iter().map(|(p, _)| p.clone()).find(|p| !ctx.nonzero_params.contains(p))
}

fn run(rows: &[(String, LinForm)], targets: &[(String, LinForm)], ctx: Context, out: &mut Vec<Branch>) {
    let mut echelon: Vec<(DerivAtom, LinForm)> = Vec::new();
    for (name, row) in rows {
        let r = reduce(row, &echelon);
        if r.is_zero() {
            continue;
        }
        let Some(lead) = r.leading_atom() else {
            out.push(Branch {
                nonzero: ctx.nonzero_labels(),
                zero: ctx.zero.clone(),
                echelon,
                outcome: Outcome::Inconsistent { row: format!("{name}: {r}") },
            });
            return;
        };
        let coeff = r.coeff(&lead);
        if ctx.is_unit(&coeff) {
            echelon.push((lead, tidy(r)));
            continue;
        }
        match coeff.as_monomial() {
            Some((m, _)) => {
                let param = splitting_param(&m, &ctx).expect("a non-unit monomial has an unassumed factor");
                let mut yes = Context {
                    nonzero_params: ctx.nonzero_params.clone(),
                    nonzero_polys: ctx.nonzero_polys.clone(),
                    zero: ctx.zero.clone(),
                };
                yes.nonzero_params.insert(param.clone());
                run(rows, targets, yes, out);
                let zero = Scalar::zero();
                let rows0: Vec<_> = rows.iter().map(|(n, r)| (n.clone(), r.substitute_param(&param, &zero))).collect();
                let targets0: Vec<_> =
                    targets.iter().map(|(n, r)| (n.clone(), r.substitute_param(&param, &zero))).collect();
                let mut no = ctx;
                no.zero.push(param);
                run(&rows0, &targets0, no, out);
            }
            None => {
                out.push(Branch {
                    nonzero: ctx.nonzero_labels(),
                    zero: ctx.zero.clone(),
                    echelon: echelon.clone(),
                    outcome: Outcome::Unresolved { pivot: lead, coefficient: coeff.to_string() },
                });
                let mut yes = ctx;
                yes.nonzero_polys.push(coeff);
                run(rows, targets, yes, out);
            }
        }
        return;
    }
    let verdicts = targets
        .iter()
        .map(|(n, t)| {
            let red = reduce(t, &echelon);
            let v = if red.is_zero() {
                Verdict::ForcedZero
            } else if red.atoms().is_empty() {
                Verdict::ForcedRelation { value: red }
            } else {
                Verdict::Free { reduced: red }
            };
            (n.clone(), v)
        })
        .collect();
    out.push(Branch {
        nonzero: ctx.nonzero_labels(),
        zero: ctx.zero.clone(),
        echelon,
        outcome: Outcome::Done { verdicts },
    });
}

/// Exact row reduction with the leftmost-atom pivot rule, splitting into
/// cases whenever a pivot coefficient may vanish.
pub fn forced_analysis(s: &FreezeSystem) -> Analysis {
    let ctx = Context {
        nonzero_params: s.assumptions.clone(),
        nonzero_polys: Vec::new(),
        zero: Vec::new(),
    };
    let mut branches = Vec::new();
    run(&s.rows, &s.targets, ctx, &mut branches);
    Analysis { system: s.clone(), branches }
}

/// The reference point with `x^3 = x^5 = 1`, `x^7 = c`, all else 0, in the
/// chart of 1.2.1.2.1.2.1.
pub fn modulus_point() -> (ClassCode, PointSpec) {
    let code = ClassCode::validate("1.2.1.2.1.2.1", Mode::Flag2).expect("valid code");
    let p = PointSpec::parse(Mode::Flag2, 7, "x3=1,x5=1,x7=c").expect("valid point");
    (code, p)
}

#[derive(Clone, Debug, Serialize)]
pub struct Orbit {
    pub name: String,
    pub point: PointSpec,
}

/// Representatives of the orbits in the class 1.2.1.1, given by
/// `(x^3, y^3, x^4, y^4)` with all lower coordinates 0.
pub fn orbit_table() -> Vec<Orbit> {
    let rows: [(&str, [i64; 4]); 6] = [
        ("1.2.1_{-s,tra}.1", [1, 0, 0, 0]),
        ("1.2.1_{-s,tan}.1_{-s,tra}", [0, 1, 1, 0]),
        ("1.2.1_{-s,tan}.1_{-s,tan}", [0, 1, 0, 0]),
        ("1.2.1_{+s}.1_{-s,tra}", [0, 0, 1, 0]),
        ("1.2.1_{+s}.1_{-s,tan}", [0, 0, 0, 1]),
        ("1.2.1.1_{+s}", [0, 0, 0, 0]),
    ];
    rows.iter()
        .map(|(name, v)| {
            let mut p = PointSpec::origin(Mode::Flag2, 4);
            for (c, x) in [Coord::x(3), Coord::y(3), Coord::x(4), Coord::y(4)].into_iter().zip(v) {
                p.set(c, *x);
            }
            Orbit { name: name.to_string(), point: p }
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ProlongForms {
    pub code: String,
    pub orbit: String,
    pub f5: LinForm,
    pub g5: LinForm,
    /// Maximal degree in the lifted coordinates `x^5, y^5` when left symbolic.
    pub lift_degree: u32,
}

impl ProlongForms {
    pub fn is_affine(&self) -> bool {
        self.lift_degree <= 1
    }
}

/// `F^5, G^5` of the class 1.2.1.1.i5 at the lift of an orbit point with
/// `x^5, y^5` given (scalars may be parameters).
pub fn prolong_forms_1211(i5: u8, orbit: &Orbit, x5: Scalar, y5: Scalar) -> Result<ProlongForms, AnalysisError> {
    let code = ClassCode::from_letters(Mode::Flag2, vec![1, 2, 1, 1, i5])?;
    if orbit.point.length() != 4 {
        return Err(AnalysisError::Code(CodeError::OutOfRange { j: orbit.point.length(), r: 4 }));
    }
    let y = build_symmetry(&code);
    let eval = |x5: Scalar, y5: Scalar| -> Result<(LinForm, LinForm), AnalysisError> {
        let q = orbit.point.extend(5).with(Coord::x(5), x5).with(Coord::y(5), y5);
        let f = substitute(y.get("F5").expect("F5"), &q)?;
        let g = substitute(y.get("G5").expect("G5"), &q)?;
        Ok((f, g))
    };
    let (fs, gs) = eval(Scalar::param("x5"), Scalar::param("y5"))?;
    let lift_degree = fs.degree_in(&["x5", "y5"]).max(gs.degree_in(&["x5", "y5"]));
    let (f5, g5) = eval(x5, y5)?;
    Ok(ProlongForms { code: code.to_string(), orbit: orbit.name.clone(), f5, g5, lift_degree })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::Base;

    fn at(b: Base, m: [u32; 3]) -> LinForm {
        LinForm::atom(DerivAtom::new(b, m))
    }

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    #[test]
    fn two_relations_force_both() {
        let at_ = at(Base::A, [1, 0, 0]);
        let bx = at(Base::B, [0, 1, 0]);
        let rows = vec![
            ("r1".to_string(), at_.scale(&s(3)).sub(&bx.scale(&s(2)))),
            ("r2".to_string(), bx.sub(&at_)),
        ];
        let sys = FreezeSystem::new(rows, vec![("t".into(), at_.clone())]);
        assert_eq!(forced_analysis(&sys).single_verdict(), Some(Verdict::ForcedZero));
    }

    #[test]
    fn empty_rows_leave_target_free() {
        let sys = FreezeSystem::new(vec![], vec![("t".into(), at(Base::B, [0, 0, 1]))]);
        assert!(matches!(forced_analysis(&sys).single_verdict(), Some(Verdict::Free { .. })));
    }

    #[test]
    fn parameter_pivot_splits() {
        let ct = at(Base::C, [1, 1, 0]);
        let rows = vec![("r".to_string(), ct.scale(&Scalar::param("c")))];
        let sys = FreezeSystem::new(rows.clone(), vec![("t".into(), ct.clone())]);
        let a = forced_analysis(&sys);
        assert_eq!(a.branches.len(), 2);
        assert_eq!(a.single_verdict(), None);
        let sys = FreezeSystem::new(rows, vec![("t".into(), ct)]).assume_nonzero("c");
        let a = forced_analysis(&sys);
        assert_eq!(a.branches.len(), 1);
        assert_eq!(a.single_verdict(), Some(Verdict::ForcedZero));
    }

    #[test]
    fn orbit_rows() {
        let t = orbit_table();
        assert_eq!(t.len(), 6);
        assert_eq!(t[0].point.to_string(), "t=0,x0=0,y0=0,x1=0,y1=0,x2=0,y2=0,x3=1,y3=0,x4=0,y4=0");
        assert_eq!(t[4].point.get(Coord::y(4)), Some(&s(1)));
    }
}
