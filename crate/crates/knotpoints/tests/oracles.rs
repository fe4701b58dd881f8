//! Worked examples with known answers, and grid brute-force oracles for the
//! exact and certified `N`-set machinery.

mod common;

use common::*;
use knotpoints::bump::{interval_length_l, lemma_epsilon, make_bump, mu_constants, BumpSpec};
use knotpoints::enclosure::n_set_enclosure;
use knotpoints::indexcomb::{check_perm_a, check_s_k, index_set_a, DeltaSeq, IndexSeq};
use knotpoints::intervalsets::{ball, hausdorff, subset_within, FinitePointSet, IntervalSet};
use knotpoints::nsets::{continuity_delta, n_full_truncated, n_set_exact, sliding_window_max, window, Variant};
use knotpoints::rational::{from_f64, pow2_neg, q, qr, to_f64, Q};
use knotpoints::realfn::{random_c1, random_function, C1Function, Function, PwlFunction};

fn zigzag() -> PwlFunction {
    PwlFunction::new(vec![q(0), qr(1, 2), q(1)], vec![q(0), q(1), q(0)]).unwrap()
}

fn iv(l: Q, r: Q) -> IntervalSet {
    IntervalSet::interval(l, r).unwrap()
}

#[test]
fn evaluation_and_norms() {
    assert_eq!(PwlFunction::zero().eval(&qr(37, 100)).unwrap(), q(0));
    assert_eq!(PwlFunction::identity().eval(&qr(1, 3)).unwrap(), qr(1, 3));
    assert_eq!(zigzag().eval(&qr(1, 4)).unwrap(), qr(1, 2));
    assert_eq!(zigzag().sup_norm(), q(1));
    assert_eq!(PwlFunction::identity().sup_norm_diff(&PwlFunction::zero()), q(1));
    assert_eq!(C1Function::line(2.0, 0.0).deriv_sup_norm(), 2.0);
    assert_eq!(C1Function::zero().deriv_sup_norm(), 0.0);
}

#[test]
fn random_function_shapes() {
    assert_eq!(random_function(42, 10, 0.6).breakpoints().len(), 1025);
    assert_eq!(random_function(3, 0, 0.6).breakpoints().len(), 2);
    assert_eq!(random_function(9, 6, 0.5), random_function(9, 6, 0.5));
}

#[test]
fn hyperspace_examples() {
    let half = iv(q(0), qr(1, 2));
    assert_eq!(hausdorff(&IntervalSet::point(q(0)), &IntervalSet::empty()), q(1));
    assert_eq!(hausdorff(&half, &half), q(0));
    let mid = iv(qr(1, 4), qr(3, 4));
    assert_eq!(hausdorff(&half, &mid), qr(1, 4));
    // The same distance from a 1e-4 grid of the second set.
    let pts: Vec<f64> = (0..=5000).map(|i| 0.25 + i as f64 * 1e-4).collect();
    assert!((hausdorff_points(&[(0.0, 0.5)], &pts) - 0.25).abs() < 1e-9);

    assert!(ball(&IntervalSet::empty(), &qr(1, 4), false).unwrap().closure.is_empty());
    assert_eq!(ball(&IntervalSet::point(qr(1, 2)), &qr(1, 4), true).unwrap().closure, iv(qr(1, 4), qr(3, 4)));
    let ends = IntervalSet::new(vec![(q(0), q(0)), (q(1), q(1))]).unwrap();
    let b = ball(&ends, &qr(3, 10), true).unwrap().closure;
    assert_eq!(b, IntervalSet::new(vec![(q(0), qr(3, 10)), (qr(7, 10), q(1))]).unwrap());

    assert_eq!(subset_within(&IntervalSet::empty(), &IntervalSet::point(q(0)), &qr(1, 10)), Some(qr(1, 10)));
    assert_eq!(subset_within(&half, &IntervalSet::point(qr(1, 4)), &qr(3, 10)), Some(qr(1, 20)));
    assert_eq!(subset_within(&IntervalSet::point(q(1)), &IntervalSet::point(q(0)), &qr(1, 2)), None);
    assert_eq!(half.complement_in_unit(), iv(qr(1, 2), q(1)));
    let p = FinitePointSet::new(vec![q(0), qr(1, 4), q(1)]).unwrap();
    assert_eq!(p.min_gap(), Some(qr(1, 4)));
}

#[test]
fn window_max_against_grid() {
    let phi = zigzag().minus_linear(&q(0));
    let m = sliding_window_max(&phi, &qr(1, 4)).unwrap();
    let (xs, ys) = pwl_data(&zigzag());
    for i in 0..=7500 {
        let x = i as f64 * 1e-4;
        let brute = (0..=2500).map(|k| eval_pwl(&xs, &ys, x + k as f64 * 1e-4)).fold(f64::MIN, f64::max);
        assert!((to_f64(&m.eval(&from_f64(x)).unwrap()) - brute).abs() <= 1e-4, "x = {x}");
    }
}

#[test]
fn n_set_examples() {
    assert_eq!(n_set_exact(&PwlFunction::zero(), &q(1), Variant::PlusUpper).unwrap(), iv(q(0), qr(1, 2)));
    let two_x = PwlFunction::linear(q(2), q(0));
    assert!(n_set_exact(&two_x, &q(1), Variant::PlusUpper).unwrap().is_empty());
    assert_eq!(n_full_truncated(&PwlFunction::zero(), &[q(1)]).unwrap(), IntervalSet::unit());
    assert!(n_full_truncated(&zigzag(), &[]).unwrap().is_empty());
    let small = n_full_truncated(&zigzag(), &[q(1), q(2)]).unwrap();
    let big = n_full_truncated(&zigzag(), &[q(1), q(2), q(3)]).unwrap();
    assert!(small.is_subset(&big));
}

#[test]
fn zigzag_plus_upper_matches_the_grid() {
    let exact = n_set_exact(&zigzag(), &q(2), Variant::PlusUpper).unwrap();
    let grid = grid_n_set_pwl(&zigzag(), 2.0, 0.25, Variant::PlusUpper, 1e-4);
    assert!(hausdorff_points(&to_f64_intervals(&exact), &grid) <= 1e-3);
}

#[test]
fn random_pwl_sets_match_the_grid() {
    for seed in 0..12 {
        let f = random_function(seed, 5, 0.6);
        for a in [q(1), q(2), qr(5, 2)] {
            let delta = to_f64(&window(&a).unwrap());
            for v in Variant::BASIC {
                let exact = n_set_exact(&f, &a, v).unwrap();
                let grid = grid_n_set_pwl(&f, to_f64(&a), delta, v, 1e-4);
                let d = hausdorff_points(&to_f64_intervals(&exact), &grid);
                assert!(d <= 2e-4, "seed {seed}, a {a}, {v:?}: {d}");
            }
        }
    }
}

/// Inner members pass the grid test, and grid members lie in the outer
/// enclosure up to `slop` (the grid can miss a violation between its points).
fn assert_brackets(f: &C1Function, a: &Q, tol: f64, step: f64, slop: f64) {
    let delta = to_f64(&window(a).unwrap());
    let func = Function::C1(f.clone());
    for v in Variant::BASIC {
        let e = n_set_enclosure(&func, a, v, tol).unwrap();
        let (inner, outer) = (to_f64_intervals(&e.inner), to_f64_intervals(&e.outer));
        let dist = |ivs: &[(f64, f64)], x: f64| ivs.iter().map(|&(l, r)| (l - x).max(x - r).max(0.0)).fold(f64::INFINITY, f64::min);
        let mut worst: f64 = 0.0;
        for (x, gap) in grid_gaps_c1(f, to_f64(a), delta, v, step) {
            if dist(&inner, x) == 0.0 {
                assert!(gap <= SLACK, "{v:?}: {x} is in the inner enclosure but the grid refutes it by {gap:e}");
            }
            if gap <= SLACK {
                worst = worst.max(dist(&outer, x));
            }
        }
        assert!(worst <= slop, "{v:?}: a grid member lies {worst:e} from the outer enclosure");
    }
}

#[test]
fn enclosure_brackets_the_grid_for_a_random_cubic() {
    assert_brackets(&random_c1(7, 4, 0.5), &q(2), 1e-4, 1e-5, 1e-4);
}

#[test]
fn enclosure_examples() {
    let z = Function::C1(C1Function::zero());
    let e = n_set_enclosure(&z, &q(1), Variant::PlusUpper, 1e-6).unwrap();
    assert_eq!((e.inner.clone(), e.outer), (iv(q(0), qr(1, 2)), iv(q(0), qr(1, 2))));
    let steep = Function::C1(C1Function::line(3.0, 0.0));
    let e = n_set_enclosure(&steep, &q(2), Variant::PlusUpper, 1e-6).unwrap();
    assert!(e.inner.is_empty() && e.outer.is_empty());
}

#[test]
fn continuity_delta_examples() {
    assert_eq!(continuity_delta(&q(1), &q(2), &qr(1, 10)).unwrap(), qr(1, 40));
    assert!(continuity_delta(&q(1), &q(2), &qr(1, 4)).is_err());
}

#[test]
fn index_sets() {
    let n = IndexSeq::new(vec![1, 3, 6, 10]).unwrap();
    for m in 1..=5 {
        assert_eq!(index_set_a(1, m, &n).unwrap(), vec![1]);
    }
    assert_eq!(index_set_a(2, 3, &n).unwrap(), vec![1, 2, 3, 4]);
    assert_eq!(index_set_a(3, 5, &n).unwrap(), vec![1, 2, 3, 4, 5, 6, 7, 8, 11, 12]);
    assert_eq!(n.shift(1).unwrap().terms(), &[3, 6, 10]);
    assert_eq!(n.shift(0).unwrap(), n);
}

#[test]
fn s_k_hand_trace() {
    let n = IndexSeq::new(vec![1, 3, 6, 10]).unwrap();
    let delta = DeltaSeq::new((1..=4).map(pow2_neg).collect()).unwrap();
    let mut sets = vec![IntervalSet::point(q(0))];
    sets.extend((2..=12).map(|_| IntervalSet::point(q(1))));
    let v = check_s_k(&sets, &n, &delta, 0, 4).unwrap();
    assert!(v.is_fail());
    assert!(format!("{v:?}").contains("(2,3)"));
    assert!(check_s_k(&sets, &n, &delta, 0, 2).unwrap().is_pass());
    let same = vec![IntervalSet::point(qr(1, 3)); 12];
    assert!(check_s_k(&same, &n, &delta, 0, 4).unwrap().is_pass());
}

#[test]
fn transposition_respects_index_sets() {
    let n = IndexSeq::new(vec![1, 3, 6, 10]).unwrap();
    assert!(check_perm_a(&n, &[2, 1], 2, 4).unwrap().is_pass());
    assert!(check_perm_a(&n, &[1, 2, 3], 2, 4).unwrap().is_pass());
}

#[test]
fn bump_examples() {
    let pts = |v: &[f64]| FinitePointSet::from_f64(v.iter().copied()).unwrap();
    let spec = BumpSpec::new(pts(&[0.5]), pts(&[]), 1.0, 0.1).unwrap();
    let phi = make_bump(&spec).unwrap();
    assert_eq!((phi.sup_norm(), phi.eval(0.5).unwrap()), (1.0, 1.0));
    for i in 0..=1000 {
        let x = i as f64 / 1000.0;
        if !(0.4 < x && x < 0.6) {
            assert_eq!(eval_c1(&phi, x), 0.0, "{x}");
        }
    }
    let empty = BumpSpec::new(pts(&[]), pts(&[]), 1.0, 0.1).unwrap();
    assert!(make_bump(&empty).is_err());
}

#[test]
fn frozen_constants() {
    // Frozen from the first certified run; they move only if the search changes.
    let zero = mu_constants(&C1Function::zero(), &q(1), &q(2), 1.0).unwrap();
    assert_eq!(zero.mu, 0.5 * (zero.length.l / 2.0).min(0.25).min(0.5));
    assert_eq!(zero.length.eps, FROZEN_ZERO_EPS);
    assert_eq!(zero.mu, FROZEN_ZERO_MU);
    let line = C1Function::line(2.0, 0.0);
    let e = lemma_epsilon(&line, &qr(1, 2), &qr(3, 2), &q(1)).unwrap();
    let l = interval_length_l(&line, &qr(1, 2), &qr(3, 2)).unwrap();
    assert_eq!(e, FROZEN_LINE_EPS);
    assert!(l.l > 0.0);
    assert_eq!(l.l, FROZEN_LINE_L);
}

/// `ε₀ = 2^-b/4` certifies at once for the zero function.
const FROZEN_ZERO_EPS: f64 = 0.0625;
const FROZEN_ZERO_MU: f64 = 0.0078125;
/// `2^-1.5/4`: the first halving step already certifies for the line `2x`.
const FROZEN_LINE_EPS: f64 = 0.08838834764831845;
const FROZEN_LINE_L: f64 = 0.017677669529663688;

#[test]
fn lemma_epsilon_against_a_grid_scan() {
    for seed in [1u64, 4, 9] {
        let f = random_c1(seed, 3, 0.5);
        let (a, b) = (q(1), q(2));
        let c = (&a + &b) / q(2);
        let eps = lemma_epsilon(&f, &a, &b, &c).unwrap();
        let (cf, bf, wb) = (to_f64(&c), 2.0, 0.25);
        let step = 1e-4;
        for i in 0..=5000 {
            let x = i as f64 * step;
            // Exceptional: x ∉ N⁺(f,b), seen as some grid y in the b-window beating slope b.
            let exceptional = (1..=2500).any(|k| {
                let y = x + k as f64 * step;
                eval_c1(&f, y) - eval_c1(&f, x) > bf * (y - x) + SLACK
            });
            if !exceptional {
                continue;
            }
            let witness = (1..=25000).map(|k| x + k as f64 * 1e-5).filter(|y| *y > x + eps && *y <= x + wb).any(|y| eval_c1(&f, y) - eval_c1(&f, x) > cf * (y - x));
            assert!(witness, "seed {seed}: no witness for {x} beyond ε = {eps}");
        }
    }
}
