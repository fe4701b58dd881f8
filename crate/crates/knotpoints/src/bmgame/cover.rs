//! Finite nets and small perturbations used by every round.

use num_traits::{ToPrimitive, Zero};

use super::cert_err;
use crate::error::{Error, Result};
use crate::rational::{pow2_neg, q, qr, Q};
use crate::intervalsets::IntervalSet;

/// Greedy `P ⊂ carrier` with `s ⊂ B(P, r)` (open balls), scanning left to
/// right and placing each centre as far right as the carrier allows.
/// Fails with a witness point of `s` that no carrier point within `r` can
/// cover, or when the net outgrows `cap`.
pub fn greedy_cover(s: &IntervalSet, carrier: &IntervalSet, r: &Q, cap: usize, claim: &str) -> Result<Vec<Q>> {
    // ρ < r keeps every covered point strictly inside its ball.
    let rho = r * qr(15, 16);
    let mut out: Vec<Q> = Vec::new();
    let mut from = Q::zero();
    while let Some(s0) = s.min_from(&from) {
        let Some(c) = carrier.max_in(&(&s0 - &rho), &(&s0 + &rho)) else {
            return Err(cert_err(claim, format!("no admissible centre within {} of {}", crate::rational::fmt_q(r), s0)));
        };
        if out.last().is_some_and(|p| &c <= p) {
            return Err(cert_err(claim, format!("cover stalls at {s0}")));
        }
        out.push(c.clone());
        if out.len() > cap {
            return Err(Error::Resource(format!("{claim}: net exceeds {cap} points")));
        }
        // Every point of s in [s0, c+ρ] is within ρ of c.
        from = &c + &rho;
        if from > q(1) {
            break;
        }
    }
    Ok(out)
}

/// Moves every point by less than `budget` so that all points of all groups
/// become distinct dyadic rationals exactly representable as doubles.
/// Group shapes are preserved.
pub fn disjointify(groups: &[Vec<Q>], budget: &Q) -> Result<Vec<Vec<Q>>> {
    let mut all: Vec<(Q, usize, usize)> = Vec::new();
    for (g, pts) in groups.iter().enumerate() {
        for (i, p) in pts.iter().enumerate() {
            all.push((p.clone(), g, i));
        }
    }
    let mut out: Vec<Vec<Q>> = groups.iter().map(|g| vec![Q::zero(); g.len()]).collect();
    if all.is_empty() {
        return Ok(out);
    }
    all.sort();
    let mut distinct: Vec<Q> = all.iter().map(|(p, _, _)| p.clone()).collect();
    distinct.dedup();
    let gap = distinct.windows(2).map(|w| &w[1] - &w[0]).min();
    let mut mult = 1usize;
    let mut run = 1usize;
    for w in all.windows(2) {
        run = if w[0].0 == w[1].0 { run + 1 } else { 1 };
        mult = mult.max(run);
    }
    // η·mult ≤ budget/4 and η·mult ≤ gap/4: clusters stay apart and inside the budget.
    let mut bound = budget.clone();
    if let Some(g) = gap {
        bound = bound.min(g);
    }
    let bound = bound / q(4 * mult as i64);
    let mut k = 0u32;
    while pow2_neg(k) > bound {
        k += 1;
        if k > 52 {
            return Err(Error::Resource("perturbation budget below double resolution".into()));
        }
    }
    let eta = pow2_neg(k);
    let grid = Q::from_integer(num_bigint::BigInt::from(1u64 << k));
    let mut i = 0;
    while i < all.len() {
        let mut j = i;
        while j < all.len() && all[j].0 == all[i].0 {
            j += 1;
        }
        let base = (&all[i].0 * &grid).round() / &grid;
        let dir = if &base + &eta * q((j - i - 1) as i64) > q(1) { q(-1) } else { q(1) };
        for (t, (_, g, idx)) in all[i..j].iter().enumerate() {
            out[*g][*idx] = &base + &eta * &dir * q(t as i64);
        }
        i = j;
    }
    debug_assert!(out.iter().flatten().all(|p| p.to_f64().is_some()));
    Ok(out)
}

/// For each point, the index of its nearest target; ties go left.
pub(crate) fn nearest(points: &[Q], targets: &[Q]) -> Vec<usize> {
    points
        .iter()
        .map(|x| {
            let i = targets.partition_point(|t| t < x);
            match (i.checked_sub(1), (i < targets.len()).then_some(i)) {
                (Some(l), Some(r)) => {
                    if x - &targets[l] <= &targets[r] - x {
                        l
                    } else {
                        r
                    }
                }
                (Some(l), None) => l,
                (None, Some(r)) => r,
                (None, None) => 0,
            }
        })
        .collect()
}

/// Largest `2^-k` with `2^-k ≤ le` and `2^-k < lt`, or `None` below `floor`.
pub(crate) fn dyadic_below(le: &Q, lt: &Q, floor: f64) -> Option<Q> {
    let floor = crate::rational::from_f64(floor);
    let mut k = 0u32;
    loop {
        let w = pow2_neg(k);
        if w < floor {
            return None;
        }
        if &w <= le && &w < lt {
            return Some(w);
        }
        k += 1;
    }
}
