//! The round invariant `(★_m)` and sampling inside `B(g_m, β_m)`.

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{tilde_union, NSets, NamedVerdict, RoundRecord};
use crate::error::Result;
use crate::indexcomb::{index_set_a, set_minus, IndexSeq, ScaleLadder, Verdict};
use crate::intervalsets::{subset_within, IntervalSet};
use crate::nsets::Reading;
use crate::rational::{from_f64, Q};
use crate::realfn::C1Function;

fn reading_name(r: Reading) -> &'static str {
    match r {
        Reading::Hat => "hat",
        Reading::Check => "check",
    }
}

/// Three-valued inclusion `K ⊂ B(L, r)` from enclosures: `sure` is tried first,
/// `possible` decides between undecided and refuted.
fn graded(sure: bool, possible: bool, what: String) -> Verdict {
    if sure {
        Verdict::Pass
    } else if possible {
        Verdict::Undecided { witness: what }
    } else {
        Verdict::Fail { witness: what }
    }
}

/// Separation `dist(S, V) > w`; vacuous when either side is empty.
fn separated(s: &IntervalSet, v: &IntervalSet, w: &Q) -> bool {
    s.set_distance(v).is_none_or(|d| &d > w)
}

/// `(★_m)` for `f` against round `m`'s record: for every `j ∈ [m]` and both readings,
/// * `Ñ(f,a_j^{m,4}) ⊂ ⋃_{A_j^m} B(K̃_n^m, w_m)`,
/// * `⋃_{A_j^m} K̃_n^m ⊂ B(Ñ(f,b_j^{m,3}), w_m)`,
/// * `Ñ(f,a_j^{m,4}) ∩ ⋃_{[n_m]∖A_j^m} B̄(K̃_n^m, w_m) = ∅`.
///
/// `n` is `(n_1, …, n_m)`; `tol` is the enclosure tolerance.
pub fn check_star(record: &RoundRecord, f: &C1Function, ladder: &ScaleLadder, n: &IndexSeq, tol: f64) -> Result<Vec<NamedVerdict>> {
    let m = record.m;
    let nsets = NSets::new(f, tol);
    let w = &record.w;
    let all: Vec<usize> = (1..=record.n).collect();
    let mut out = Vec::new();
    for j in 1..=m {
        let a_idx = index_set_a(j, m, n)?;
        let rest = set_minus(&all, &a_idx);
        let a4 = ScaleLadder::a(j, m, 4);
        let b3 = ladder.b(j, m, 3)?;
        for reading in Reading::BOTH {
            let tag = format!("j={j}, m={m}, {}", reading_name(reading));
            let na = nsets.get(&a4, reading)?;
            let nb = nsets.get(&b3, reading)?;
            let u = tilde_union(&record.k_sets, &a_idx, reading);
            let v = tilde_union(&record.k_sets, &rest, reading);
            out.push(NamedVerdict::new(
                format!("star bullet 1 ({tag})"),
                graded(
                    subset_within(&na.outer, &u, w).is_some(),
                    subset_within(&na.inner, &u, w).is_some(),
                    format!("Ñ(f,a_{j}^{{{m},4}}) ⊄ ⋃B(K̃,w) ({tag})"),
                ),
            ));
            out.push(NamedVerdict::new(
                format!("star bullet 2 ({tag})"),
                graded(
                    subset_within(&u, &nb.inner, w).is_some(),
                    subset_within(&u, &nb.outer, w).is_some(),
                    format!("⋃K̃ ⊄ B(Ñ(f,b_{j}^{{{m},3}}),w) ({tag})"),
                ),
            ));
            out.push(NamedVerdict::new(
                format!("star bullet 3 ({tag})"),
                graded(
                    separated(&na.outer, &v, w),
                    separated(&na.inner, &v, w),
                    format!("Ñ(f,a_{j}^{{{m},4}}) meets ⋃B̄(K̃,w) off A ({tag})"),
                ),
            ));
        }
    }
    Ok(out)
}

/// A function `f ≠ g` on the same knots with a rigorous bound `‖f - g‖ < β`,
/// or `None` when no knot value or slope can move by a representable amount
/// below `β`.
///
/// On a cell of width `Δ` the Hermite basis gives
/// `‖f - g‖ ≤ max|Δy| + (4/27)·Δ·(|Δd_0| + |Δd_1|)`, evaluated exactly.
pub fn sample_in_ball(g: &C1Function, beta: &Q, seed: u64) -> Option<C1Function> {
    let b = crate::rational::to_f64(beta);
    if !(b > 0.0) {
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = b / 8.0;
    let bump = |v: f64, u: f64| {
        // Skip moves that rounding would distort by more than the move itself.
        if v.abs() * f64::EPSILON < c * 1e-3 {
            v + c * u
        } else {
            v
        }
    };
    let ys: Vec<f64> = g.values().iter().map(|&v| bump(v, rng.gen_range(-1.0..1.0))).collect();
    let ds: Vec<f64> = g.slopes().iter().map(|&v| bump(v, rng.gen_range(-1.0..1.0))).collect();
    if ys == g.values() && ds == g.slopes() {
        return None;
    }
    let f = C1Function::new(g.knots().to_vec(), ys, ds).ok()?;
    let dy = |i: usize| (from_f64(f.values()[i]) - from_f64(g.values()[i])).abs();
    let dd = |i: usize| (from_f64(f.slopes()[i]) - from_f64(g.slopes()[i])).abs();
    let mut bound = Q::zero();
    let xs = g.knots();
    for i in 0..xs.len() - 1 {
        let width = from_f64(xs[i + 1]) - from_f64(xs[i]);
        let cell = dy(i).max(dy(i + 1)) + Q::new(4.into(), 27.into()) * width * (dd(i) + dd(i + 1));
        if cell > bound {
            bound = cell;
        }
    }
    (&bound < beta).then_some(f)
}
