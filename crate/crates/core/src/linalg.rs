//! Exact linear algebra over the rationals: fraction-free row reduction,
//! rank, null spaces and subspace intersections.

use num::{BigInt, Integer, One, Signed, Zero};

use crate::scalar::Rational;

/// Scale a rational row to a primitive integer row.
fn integer_row(row: &[Rational]) -> Vec<BigInt> {
    let lcm = row
        .iter()
        .fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
    let mut out: Vec<BigInt> = row.iter().map(|q| q.numer() * (&lcm / q.denom())).collect();
    make_primitive(&mut out);
    out
}

fn make_primitive(row: &mut [BigInt]) {
    let g = row.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in row.iter_mut() {
            *x /= &g;
        }
    }
}

/// Row echelon form by fraction-free elimination, pivoting on the first
/// row (in input order) with a nonzero entry in the current column.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub rows: Vec<Vec<BigInt>>,
    pub pivots: Vec<usize>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

pub fn echelon(rows: &[Vec<Rational>]) -> Echelon {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut m: Vec<Vec<BigInt>> = rows.iter().map(|r| integer_row(r)).collect();
    let mut pivots = Vec::new();
    let mut top = 0;
    for col in 0..ncols {
        let Some(p) = (top..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(top, p);
        let pivot_row = m[top].clone();
        let pv = pivot_row[col].clone();
        for row in m.iter_mut().skip(top + 1) {
            if row[col].is_zero() {
                continue;
            }
            let g = pv.gcd(&row[col]);
            let a = &pv / &g;
            let b = &row[col] / &g;
            for (x, y) in row.iter_mut().zip(&pivot_row) {
                *x = &*x * &a - y * &b;
            }
            make_primitive(row);
        }
        pivots.push(col);
        top += 1;
        if top == m.len() {
            break;
        }
    }
    m.truncate(top);
    Echelon { rows: m, pivots }
}

pub fn rank(rows: &[Vec<Rational>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    echelon(rows).rank()
}

/// Whether `v` lies in the span of `basis`.
pub fn in_span(basis: &[Vec<Rational>], v: &[Rational]) -> bool {
    if v.iter().all(Zero::is_zero) {
        return true;
    }
    let mut all = basis.to_vec();
    let r0 = rank(&all);
    all.push(v.to_vec());
    rank(&all) == r0
}

/// Whether `span(sub) ⊆ span(sup)`.
pub fn span_contains(sup: &[Vec<Rational>], sub: &[Vec<Rational>]) -> bool {
    let mut all = sup.to_vec();
    let r0 = rank(&all);
    all.extend(sub.iter().cloned());
    rank(&all) == r0
}

/// Basis of `{x : M x = 0}` for an `m × n` matrix given by rows.
pub fn nullspace(rows: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    if rows.is_empty() {
        return (0..ncols)
            .map(|i| (0..ncols).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
            .collect();
    }
    let ech = echelon(rows);
    // reduced row echelon over the rationals
    let mut rref: Vec<Vec<Rational>> = ech
        .rows
        .iter()
        .map(|r| r.iter().map(|x| Rational::from_integer(x.clone())).collect())
        .collect();
    for (i, &pc) in ech.pivots.iter().enumerate() {
        let inv = rref[i][pc].recip();
        for x in rref[i].iter_mut() {
            *x *= &inv;
        }
        for k in 0..rref.len() {
            if k != i && !rref[k][pc].is_zero() {
                let f = rref[k][pc].clone();
                let pr = rref[i].clone();
                for (x, y) in rref[k].iter_mut().zip(&pr) {
                    *x -= &f * y;
                }
            }
        }
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !ech.pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![Rational::zero(); ncols];
            v[fc] = Rational::one();
            for (i, &pc) in ech.pivots.iter().enumerate() {
                v[pc] = -rref[i][fc].clone();
            }
            v
        })
        .collect()
}

/// Basis of `span(u) ∩ span(w)` (vectors of equal length `n`).
pub fn intersection(u: &[Vec<Rational>], w: &[Vec<Rational>], n: usize) -> Vec<Vec<Rational>> {
    if u.is_empty() || w.is_empty() {
        return Vec::new();
    }
    // Σ a_i u_i − Σ b_j w_j = 0, one equation per coordinate
    let k = u.len() + w.len();
    let rows: Vec<Vec<Rational>> = (0..n)
        .map(|c| {
            u.iter()
                .map(|v| v[c].clone())
                .chain(w.iter().map(|v| -v[c].clone()))
                .collect()
        })
        .collect();
    let ns = nullspace(&rows, k);
    let mut out: Vec<Vec<Rational>> = ns
        .iter()
        .map(|coef| {
            let mut v = vec![Rational::zero(); n];
            for (a, ui) in coef.iter().zip(u) {
                if a.is_zero() {
                    continue;
                }
                for (x, y) in v.iter_mut().zip(ui) {
                    *x += a * y;
                }
            }
            v
        })
        .filter(|v| v.iter().any(|x| !x.is_zero()))
        .collect();
    // prune to an independent set
    let mut basis: Vec<Vec<Rational>> = Vec::new();
    for v in out.drain(..) {
        if !in_span(&basis, &v) {
            basis.push(v);
        }
    }
    basis
}

/// Sign-normalized primitive integer form, useful for comparing rows.
pub fn primitive(row: &[Rational]) -> Vec<BigInt> {
    let mut r = integer_row(row);
    if let Some(first) = r.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            for x in r.iter_mut() {
                *x = -&*x;
            }
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, rat};

    fn row(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| int(x)).collect()
    }

    #[test]
    fn rank_and_span() {
        let m = vec![row(&[1, 2, 3]), row(&[2, 4, 6]), row(&[0, 1, 1])];
        assert_eq!(rank(&m), 2);
        assert!(in_span(&m, &row(&[1, 3, 4])));
        assert!(!in_span(&m, &row(&[0, 0, 1])));
        let frac = vec![vec![rat(1, 2), rat(1, 3)], vec![int(3), int(2)]];
        assert_eq!(rank(&frac), 1);
    }

    #[test]
    fn nullspace_basis() {
        let m = vec![row(&[1, 1, 0]), row(&[0, 1, 1])];
        let ns = nullspace(&m, 3);
        assert_eq!(ns.len(), 1);
        assert_eq!(primitive(&ns[0]), vec![BigInt::from(1), BigInt::from(-1), BigInt::from(1)]);
    }

    #[test]
    fn subspace_intersection() {
        let u = vec![row(&[1, 0, 0]), row(&[0, 1, 0])];
        let w = vec![row(&[0, 1, 0]), row(&[0, 0, 1])];
        let i = intersection(&u, &w, 3);
        assert_eq!(i.len(), 1);
        assert!(in_span(&i, &row(&[0, 1, 0])));
    }
}
