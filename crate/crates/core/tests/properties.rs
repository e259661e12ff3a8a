//! Randomized invariants. Proptest cases honour `PROPTEST_RNG_SEED`; the
//! sampled-point checks use `FLAGSYM_SEED` (default 1).

mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::form;
use flagsym_core::flags::{enumerate, enumerate_sandwich, expected_count};
use flagsym_core::frames::{cauchy_at, flag_meet_covariant, flag_ranks, lie_square_contained};
use flagsym_core::moduli::{evaluate_components, forced_analysis, freeze_system, modulus_point, FreezeSystem};
use flagsym_core::sampling::random_point;
use flagsym_core::scalar::rat;
use flagsym_core::symexpr::{directional, lie_bracket, Base, DerivAtom, Mono, Term, VecField};
use flagsym_core::symmetry::{build_symmetry, verify_levels};
use flagsym_core::{linalg, ClassCode, Coord, Expr, Frame, LinForm, Mode, Rational, Scalar};

fn seed() -> u64 {
    std::env::var("FLAGSYM_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(1)
}

const VARS: [fn() -> Coord; 5] = [Coord::t, || Coord::x(0), || Coord::x(1), || Coord::y(1), || Coord::x(2)];

fn term(with_atoms: bool) -> impl Strategy<Value = Term> {
    let atom = if with_atoms {
        prop::option::of((0..3usize, prop::array::uniform3(0..3u32))).boxed()
    } else {
        Just(None).boxed()
    };
    (-6i64..=6, prop::array::uniform5(0..3u32), atom).prop_map(|(q, exps, a)| {
        let mono = Mono::from_pairs(VARS.iter().zip(exps).map(|(v, e)| (v(), e)));
        let atom = a.map(|(b, m)| DerivAtom::new([Base::A, Base::B, Base::C][b], m));
        Term::new(q, mono, atom)
    })
}

fn expr(with_atoms: bool) -> impl Strategy<Value = Expr> {
    prop::collection::vec(term(with_atoms), 0..6).prop_map(|ts| Expr::normalize(Mode::Flag2, ts))
}

fn coord() -> impl Strategy<Value = Coord> {
    (0..VARS.len()).prop_map(|i| VARS[i]())
}

fn frame_fields(r: usize) -> Vec<VecField> {
    let mut out = Vec::new();
    for c in (1..=r).flat_map(|k| enumerate(k, Mode::Flag2)) {
        let f = Frame::build(&c);
        out.extend(f.ladder().iter().cloned());
        out.extend(f.generators(f.len()));
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normalize_is_idempotent(e in expr(true)) {
        prop_assert_eq!(Expr::normalize(Mode::Flag2, e.terms()), e);
    }

    #[test]
    fn partials_commute(e in expr(true), u in coord(), v in coord()) {
        prop_assert_eq!(e.partial(u).partial(v), e.partial(v).partial(u));
    }

    #[test]
    fn directional_is_a_derivation(p in expr(false), e in expr(true), k in 0..40usize) {
        let fields = frame_fields(3);
        let v = &fields[k % fields.len()];
        let lhs = directional(v, &p.checked_mul(&e).unwrap()).unwrap();
        let rhs = directional(v, &p).unwrap().checked_mul(&e).unwrap()
            + p.checked_mul(&directional(v, &e).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn bracket_is_antisymmetric_and_satisfies_jacobi(i in 0..500usize, j in 0..500usize, k in 0..500usize) {
        let fields = frame_fields(4);
        let n = fields.len();
        let (a, b, c) = (&fields[i % n], &fields[j % n], &fields[k % n]);
        let ab = lie_bracket(a, b).unwrap();
        prop_assert_eq!(ab.add(&lie_bracket(b, a).unwrap()), VecField::zero(Mode::Flag2));
        let jacobi = lie_bracket(a, &lie_bracket(b, c).unwrap()).unwrap()
            .add(&lie_bracket(b, &lie_bracket(c, a).unwrap()).unwrap())
            .add(&lie_bracket(c, &ab).unwrap());
        prop_assert!(jacobi.is_zero());
    }

    #[test]
    fn verdicts_ignore_row_scaling_and_order(
        rows in prop::collection::vec(prop::collection::vec(-3i64..=3, 4), 1..5),
        target in prop::collection::vec(-3i64..=3, 4),
        scales in prop::collection::vec((1i64..=4, 1i64..=3, any::<bool>()), 5),
        perm in Just((0..5usize).collect::<Vec<_>>()).prop_shuffle(),
    ) {
        let to_form = |cs: &[i64]| {
            LinForm::from_terms(
                cs.iter().enumerate().map(|(i, &q)| (DerivAtom::new(Base::A, [i as u32, 0, 0]), Scalar::from_int(q))),
                Scalar::zero(),
            )
        };
        let named: Vec<_> = rows.iter().enumerate().map(|(i, r)| (format!("R{i}"), to_form(r))).collect();
        let targets = vec![("T".to_string(), to_form(&target))];
        let base = forced_analysis(&FreezeSystem::new(named.clone(), targets.clone())).single_verdict();
        let shuffled: Vec<_> = perm.iter().filter(|&&i| i < named.len()).map(|&i| {
            let (n, l) = &named[i];
            let (p, q, neg) = scales[i];
            let s = Scalar::from_rational(rat(if neg { -p } else { p }, q));
            (n.clone(), l.scale(&s))
        }).collect();
        let other = forced_analysis(&FreezeSystem::new(shuffled, targets)).single_verdict();
        prop_assert!(base.is_some());
        prop_assert_eq!(std::mem::discriminant(&base.unwrap()), std::mem::discriminant(&other.unwrap()));
    }
}

#[test]
fn enumeration_equals_filtered_words() {
    for mode in [Mode::Flag2, Mode::Goursat] {
        for r in 1..=6 {
            let mut words: Vec<Vec<u8>> = vec![Vec::new()];
            for _ in 0..r {
                words = words.into_iter().flat_map(|w| (1..=3).map(move |l| [w.clone(), vec![l]].concat())).collect();
            }
            let mut valid: Vec<ClassCode> =
                words.into_iter().filter_map(|l| ClassCode::from_letters(mode, l).ok()).collect();
            valid.sort();
            let mut listed = enumerate(r, mode);
            listed.sort();
            assert_eq!(valid, listed, "{mode:?} r={r}");
            assert_eq!(listed.len() as u64, expected_count(r, mode));
        }
    }
    for r in 2..=8 {
        assert_eq!(enumerate(r, Mode::Flag2).len() as u64, 3u64.pow(r as u32 - 1).div_ceil(2));
    }
}

#[test]
fn sandwich_words_partition_the_classes() {
    for r in 1..=6 {
        let words = enumerate_sandwich(r);
        assert_eq!(words.len(), 1 << (r - 1));
        let mut refined: Vec<ClassCode> = Vec::new();
        for w in &words {
            let codes = w.refinements();
            for c in &codes {
                assert_eq!(&c.sandwich().unwrap(), w);
            }
            refined.extend(codes);
        }
        refined.sort();
        let mut listed = enumerate(r, Mode::Flag2);
        listed.sort();
        assert_eq!(refined, listed, "r={r}");
    }
}

#[test]
fn lie_squares_and_ranks() {
    let mut rng = ChaCha8Rng::seed_from_u64(seed());
    for r in 1..=5 {
        for c in enumerate(r, Mode::Flag2) {
            let f = Frame::build(&c);
            for j in 1..=r {
                lie_square_contained(&f, j).unwrap_or_else(|e| panic!("{c} level {j}: {e:?}"));
            }
            let p = random_point(&mut rng, Mode::Flag2, r);
            let expected: Vec<usize> = (0..=r).map(|k| 3 + 2 * k).collect();
            assert_eq!(flag_ranks(&f, &p).unwrap(), expected, "{c} at {p}");
        }
    }
}

#[test]
fn covariant_meets_flag_in_corank_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(seed());
    for r in 1..=4 {
        for c in enumerate(r, Mode::Flag2) {
            let f = Frame::build(&c);
            let p = random_point(&mut rng, Mode::Flag2, r).numeric().unwrap();
            for j in 0..r {
                let meet = flag_meet_covariant(&f, j, &p).unwrap();
                assert_eq!(meet.rank() + 1, 3 + 2 * (r - j - 1), "{c} j={j}");
                assert_eq!(meet.rank(), cauchy_at(&f, j, &p).unwrap().rank(), "{c} j={j}");
            }
        }
    }
}

#[test]
fn covariant_fields_commute() {
    for r in 1..=4 {
        for c in enumerate(r, Mode::Flag2) {
            let cov = Frame::build(&c).covariant();
            for a in &cov {
                for b in &cov {
                    assert!(lie_bracket(a, b).unwrap().is_zero(), "{c}");
                }
            }
        }
    }
}

#[test]
fn every_truncation_is_a_symmetry() {
    for (mode, lengths) in [(Mode::Flag2, 1..=4), (Mode::Goursat, 2..=5)] {
        for c in lengths.flat_map(|r| enumerate(r, mode)) {
            let y = build_symmetry(&c);
            for rep in verify_levels(&y, &Frame::build(&c)) {
                assert!(rep.passed, "{c} level {}", rep.level);
            }
        }
    }
}

#[test]
fn no_base_coordinates_in_flag2_monomials() {
    for c in (1..=4).flat_map(|r| enumerate(r, Mode::Flag2)) {
        for (n, e) in build_symmetry(&c).components() {
            assert!(e.mono_coords().iter().all(|v| !v.is_base()), "{c} {n}");
        }
    }
}

#[test]
fn displayed_vanishings_span_the_frozen_rows() {
    let (cd, p) = modulus_point();
    let y = build_symmetry(&cd);
    let sys = freeze_system(&y, &p, &["F7"]).unwrap();
    let evals = evaluate_components(&y, &p).unwrap();
    assert_eq!(evals.len(), 17);
    let (at, bx) = ([1, 0, 0], [0, 1, 0]);
    let displayed = [form(&[(3, Base::A, at), (-2, Base::B, bx)]), form(&[(1, Base::B, bx), (-1, Base::A, at)])];
    for c in [Scalar::from_int(1), Scalar::from_int(2), Scalar::parse("-3/2").unwrap()] {
        let rows: Vec<LinForm> = sys.rows.iter().map(|(_, l)| l.substitute_param("c", &c)).collect();
        let replaced: Vec<LinForm> = sys
            .rows
            .iter()
            .map(|(n, l)| match n.as_str() {
                "F3" => displayed[0].clone(),
                "F5" => displayed[1].clone(),
                _ => l.substitute_param("c", &c),
            })
            .collect();
        let mut atoms: Vec<DerivAtom> = rows.iter().chain(&replaced).flat_map(|l| l.atoms()).collect();
        atoms.sort();
        atoms.dedup();
        let vecs = |ls: &[LinForm]| -> Vec<Vec<Rational>> {
            ls.iter().map(|l| atoms.iter().map(|a| l.coeff(a).as_rational().unwrap().clone()).collect()).collect()
        };
        let (a, b) = (vecs(&rows), vecs(&replaced));
        assert!(linalg::span_contains(&a, &b) && linalg::span_contains(&b, &a), "c = {c}");
    }
}

#[test]
fn dropping_the_f5_row_frees_the_target() {
    let (cd, p) = modulus_point();
    let sys = freeze_system(&build_symmetry(&cd), &p, &["F7"]).unwrap().assume_nonzero("c");
    let rows = sys.rows.iter().filter(|(n, _)| n != "F5").cloned().collect();
    let cut = FreezeSystem::new(rows, sys.targets.clone()).assume_nonzero("c");
    let v = forced_analysis(&cut).single_verdict().unwrap();
    assert!(!matches!(v, flagsym_core::moduli::Verdict::ForcedZero), "{v}");
}
