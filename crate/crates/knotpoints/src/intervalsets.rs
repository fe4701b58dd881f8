//! Closed subsets of `[0,1]` as finite unions of closed intervals, with the
//! Hausdorff metric (`d(K,∅) = 1` for nonempty `K`) and metric neighborhoods.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{arg, Error, Result};
use crate::rational::{fmt_q, from_f64, max_q, min_q, parse_q, q, Q};

/// Sorted, pairwise disjoint, non-touching closed intervals inside `[0,1]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct IntervalSet {
    ivs: Vec<(Q, Q)>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet { ivs: Vec::new() }
    }

    pub fn unit() -> Self {
        IntervalSet { ivs: vec![(q(0), q(1))] }
    }

    pub fn point(x: Q) -> Self {
        IntervalSet { ivs: vec![(x.clone(), x)] }
    }

    pub fn interval(l: Q, r: Q) -> Result<Self> {
        Self::new(vec![(l, r)])
    }

    /// Validates `0 ≤ l ≤ r ≤ 1` for each pair, then sorts and merges touching pieces.
    pub fn new(ivs: Vec<(Q, Q)>) -> Result<Self> {
        for (l, r) in &ivs {
            if l.is_negative() || r > &Q::one() || l > r {
                return arg(format!("[{}, {}] is not a subinterval of [0,1]", fmt_q(l), fmt_q(r)));
            }
        }
        Ok(Self::normalized(ivs))
    }

    /// Clips each interval to `[0,1]`, drops the empty ones, then normalizes.
    pub fn clipped(ivs: impl IntoIterator<Item = (Q, Q)>) -> Self {
        let ivs = ivs
            .into_iter()
            .map(|(l, r)| (max_q(&l, &q(0)), min_q(&r, &q(1))))
            .filter(|(l, r)| l <= r)
            .collect();
        Self::normalized(ivs)
    }

    /// From `f64` endpoints (taken exactly), clipped to `[0,1]`.
    pub fn from_f64_pairs(ivs: impl IntoIterator<Item = (f64, f64)>) -> Self {
        Self::clipped(ivs.into_iter().map(|(l, r)| (from_f64(l), from_f64(r))))
    }

    fn normalized(mut ivs: Vec<(Q, Q)>) -> Self {
        ivs.sort();
        let mut out: Vec<(Q, Q)> = Vec::with_capacity(ivs.len());
        for (l, r) in ivs {
            match out.last_mut() {
                Some(last) if l <= last.1 => {
                    if r > last.1 {
                        last.1 = r;
                    }
                }
                _ => out.push((l, r)),
            }
        }
        IntervalSet { ivs: out }
    }

    pub fn intervals(&self) -> &[(Q, Q)] {
        &self.ivs
    }

    pub fn is_empty(&self) -> bool {
        self.ivs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.ivs.len()
    }

    pub fn total_length(&self) -> Q {
        self.ivs.iter().map(|(l, r)| r - l).sum()
    }

    pub fn min(&self) -> Option<&Q> {
        self.ivs.first().map(|iv| &iv.0)
    }

    pub fn max(&self) -> Option<&Q> {
        self.ivs.last().map(|iv| &iv.1)
    }

    /// Index of the first interval whose right end is `>= x`.
    fn first_right_of(&self, x: &Q) -> usize {
        self.ivs.partition_point(|(_, r)| r < x)
    }

    pub fn contains_point(&self, x: &Q) -> bool {
        let i = self.first_right_of(x);
        i < self.ivs.len() && &self.ivs[i].0 <= x
    }

    /// `dist(x, self)`, or `None` for the empty set.
    pub fn dist_to(&self, x: &Q) -> Option<Q> {
        if self.ivs.is_empty() {
            return None;
        }
        let i = self.first_right_of(x);
        let right = self.ivs.get(i).map(|(l, _)| if l <= x { Q::zero() } else { l - x });
        let left = if i > 0 { Some(x - &self.ivs[i - 1].1) } else { None };
        match (left, right) {
            (Some(a), Some(b)) => Some(min_q(&a, &b)),
            (a, b) => a.or(b),
        }
    }

    /// `sup_{x ∈ self} dist(x, other)`: `Some(0)` for empty `self`, `None` when
    /// `self` is nonempty and `other` is empty.
    pub fn directed_distance(&self, other: &IntervalSet) -> Option<Q> {
        if self.ivs.is_empty() {
            return Some(Q::zero());
        }
        if other.ivs.is_empty() {
            return None;
        }
        // dist(·, other) is a tent over each gap of `other`, so its max on an
        // interval is at an endpoint or at a gap midpoint inside the interval.
        let mut best = Q::zero();
        let mut consider = |x: &Q| {
            let d = other.dist_to(x).unwrap();
            if d > best {
                best = d;
            }
        };
        let mids: Vec<Q> = other.ivs.windows(2).map(|w| (&w[0].1 + &w[1].0) / q(2)).collect();
        for (l, r) in &self.ivs {
            consider(l);
            consider(r);
            let from = mids.partition_point(|m| m < l);
            for m in mids[from..].iter().take_while(|m| *m <= r) {
                consider(m);
            }
        }
        Some(best)
    }

    /// `inf {|x-y| : x ∈ self, y ∈ other}`, or `None` if either is empty.
    pub fn set_distance(&self, other: &IntervalSet) -> Option<Q> {
        if self.ivs.is_empty() || other.ivs.is_empty() {
            return None;
        }
        let mut best: Option<Q> = None;
        for (l, r) in &self.ivs {
            let i = other.first_right_of(l);
            let mut cands = Vec::with_capacity(2);
            if let Some((ol, _)) = other.ivs.get(i) {
                if ol <= r {
                    return Some(Q::zero());
                }
                cands.push(ol - r);
            }
            if i > 0 {
                cands.push(l - &other.ivs[i - 1].1);
            }
            for c in cands {
                if best.as_ref().is_none_or(|b| c < *b) {
                    best = Some(c);
                }
            }
        }
        best
    }

    /// `max (self ∩ [lo,hi])`.
    pub fn max_in(&self, lo: &Q, hi: &Q) -> Option<Q> {
        let idx = self.ivs.partition_point(|(l, _)| l <= hi);
        let (_, r) = self.ivs.get(idx.checked_sub(1)?)?;
        (r >= lo).then(|| min_q(r, hi))
    }

    /// `min (self ∩ [x,1])`.
    pub fn min_from(&self, x: &Q) -> Option<Q> {
        let (l, _) = self.ivs.get(self.first_right_of(x))?;
        Some(max_q(l, x))
    }

    /// Closed dilation `B̄(self, r) ∩ [0,1]`.
    pub fn dilate(&self, r: &Q) -> IntervalSet {
        Self::clipped(self.ivs.iter().map(|(l, h)| (l - r, h + r)))
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        Self::normalized(self.ivs.iter().chain(&other.ivs).cloned().collect())
    }

    pub fn intersect(&self, other: &IntervalSet) -> IntervalSet {
        let (a, b) = (&self.ivs, &other.ivs);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            let lo = max_q(&a[i].0, &b[j].0);
            let hi = min_q(&a[i].1, &b[j].1);
            if lo <= hi {
                out.push((lo, hi));
            }
            if a[i].1 < b[j].1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self::normalized(out)
    }

    /// Closure of `[0,1] \ self`.
    pub fn complement_in_unit(&self) -> IntervalSet {
        // Gap closures; a degenerate piece is covered by the gaps on both sides.
        let mut out = Vec::new();
        let mut cursor = q(0);
        let mut started = false;
        for (l, r) in &self.ivs {
            if *l > cursor || (!started && l.is_positive()) {
                out.push((cursor.clone(), l.clone()));
            }
            cursor = r.clone();
            started = true;
        }
        if !started || cursor < Q::one() {
            out.push((cursor, q(1)));
        }
        Self::normalized(out)
    }

    /// Image under `x ↦ 1-x`.
    pub fn reflect(&self) -> IntervalSet {
        IntervalSet { ivs: self.ivs.iter().rev().map(|(l, r)| (q(1) - r, q(1) - l)).collect() }
    }

    /// `self ∩ cl([0,1] \ other)`, a closed superset of `self \ other`.
    pub fn minus_outer(&self, other: &IntervalSet) -> IntervalSet {
        self.intersect(&other.complement_in_unit())
    }

    pub fn is_subset(&self, other: &IntervalSet) -> bool {
        self.ivs.iter().all(|(l, r)| {
            let i = other.first_right_of(r);
            i < other.ivs.len() && &other.ivs[i].0 <= l
        })
    }

    /// Whether `x` lies in the interior of `self` relative to `[0,1]`.
    pub fn interior_contains(&self, x: &Q) -> bool {
        let i = self.first_right_of(x);
        let Some((l, r)) = self.ivs.get(i) else { return false };
        (l < x || (l.is_zero() && x.is_zero())) && (x < r || (r.is_one() && x.is_one()))
    }

    /// Whether `self` lies in the relative interior of `other`.
    pub fn in_interior_of(&self, other: &IntervalSet) -> bool {
        self.ivs.iter().all(|(l, r)| {
            let i = other.first_right_of(r);
            let Some((ol, or)) = other.ivs.get(i) else { return false };
            let left = ol < l || (ol.is_zero() && l.is_zero());
            let right = r < or || (or.is_one() && r.is_one());
            left && right
        })
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("left,right\n");
        for (l, r) in &self.ivs {
            s.push_str(&format!("{},{}\n", fmt_q(l), fmt_q(r)));
        }
        s
    }

    pub fn to_json(&self) -> IntervalSetJson {
        IntervalSetJson { intervals: self.ivs.iter().map(|(l, r)| [fmt_q(l), fmt_q(r)]).collect() }
    }

    pub fn from_json(j: &IntervalSetJson) -> Result<Self> {
        let ivs = j
            .intervals
            .iter()
            .map(|[l, r]| Ok((parse_q(l)?, parse_q(r)?)))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::Input(format!("field `intervals`: {e}")))?;
        Self::new(ivs).map_err(|e| Error::Input(format!("field `intervals`: {e}")))
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.ivs.is_empty() {
            return write!(f, "∅");
        }
        let parts: Vec<String> = self
            .ivs
            .iter()
            .map(|(l, r)| if l == r { format!("{{{}}}", fmt_q(l)) } else { format!("[{}, {}]", fmt_q(l), fmt_q(r)) })
            .collect();
        write!(f, "{}", parts.join(" ∪ "))
    }
}

impl Serialize for IntervalSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntervalSet {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = IntervalSetJson::deserialize(d)?;
        IntervalSet::from_json(&j).map_err(serde::de::Error::custom)
    }
}

/// External JSON form `{intervals: [[l, r], ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct IntervalSetJson {
    pub intervals: Vec<[String; 2]>,
}

/// Hausdorff distance with `d(∅,∅) = 0` and `d(K,∅) = 1` for nonempty `K`.
pub fn hausdorff(k: &IntervalSet, l: &IntervalSet) -> Q {
    match (k.is_empty(), l.is_empty()) {
        (true, true) => Q::zero(),
        (true, false) | (false, true) => Q::one(),
        _ => max_q(&k.directed_distance(l).unwrap(), &l.directed_distance(k).unwrap()),
    }
}

/// `B(A,r)` or `B̄(A,r)` intersected with `[0,1]`. Stored as the center and
/// radius; `closure` is the closed interval data, `open` the marker.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Neighborhood {
    pub center: IntervalSet,
    pub radius: Q,
    pub open: bool,
    pub closure: IntervalSet,
}

impl Neighborhood {
    /// Decides `k ⊂ self` exactly. For an open ball this is the strict
    /// inequality `sup_{x∈k} dist(x, A) < r`.
    pub fn contains_set(&self, k: &IntervalSet) -> bool {
        match k.directed_distance(&self.center) {
            None => false,
            Some(e) => {
                if k.is_empty() {
                    true
                } else if self.open {
                    e < self.radius
                } else {
                    e <= self.radius
                }
            }
        }
    }
}

pub fn ball(a: &IntervalSet, r: &Q, closed: bool) -> Result<Neighborhood> {
    if !r.is_positive() {
        return arg("ball radius must be positive");
    }
    Ok(Neighborhood { center: a.clone(), radius: r.clone(), open: !closed, closure: a.dilate(r) })
}

/// The largest `ε ≥ 0` with `K ⊂ B(L, r-ε)` in the limiting sense, i.e.
/// `r - sup_{x∈K} dist(x,L)`, when `K ⊂ B(L,r)`; `None` otherwise.
pub fn subset_within(k: &IntervalSet, l: &IntervalSet, r: &Q) -> Option<Q> {
    let e = k.directed_distance(l)?;
    if k.is_empty() {
        return Some(r.clone());
    }
    (e < *r).then(|| r - e)
}

/// `max_{n ≤ l} d(K_n, L_n)`.
pub fn prefix_distance(ks: &[IntervalSet], ls: &[IntervalSet], l: usize) -> Result<Q> {
    if ks.len() < l || ls.len() < l {
        return arg(format!("prefix_distance needs {l} terms, got {} and {}", ks.len(), ls.len()));
    }
    Ok(ks.iter().zip(ls).take(l).map(|(k, m)| hausdorff(k, m)).max().unwrap_or_else(Q::zero))
}

/// Sorted distinct finite subset of `[0,1]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct FinitePointSet {
    #[serde(with = "crate::rational::serde_q::vec")]
    points: Vec<Q>,
}

impl FinitePointSet {
    pub fn new(mut points: Vec<Q>) -> Result<Self> {
        if points.iter().any(|p| p.is_negative() || p > &Q::one()) {
            return arg("points must lie in [0,1]");
        }
        points.sort();
        points.dedup();
        Ok(FinitePointSet { points })
    }

    pub fn empty() -> Self {
        FinitePointSet { points: Vec::new() }
    }

    pub fn from_f64(points: impl IntoIterator<Item = f64>) -> Result<Self> {
        Self::new(points.into_iter().map(from_f64).collect())
    }

    pub fn points(&self) -> &[Q] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn contains(&self, x: &Q) -> bool {
        self.points.binary_search(x).is_ok()
    }

    pub fn union(&self, other: &FinitePointSet) -> FinitePointSet {
        let mut p: Vec<Q> = self.points.iter().chain(&other.points).cloned().collect();
        p.sort();
        p.dedup();
        FinitePointSet { points: p }
    }

    pub fn is_disjoint(&self, other: &FinitePointSet) -> bool {
        !self.points.iter().any(|p| other.contains(p))
    }

    /// Minimum distance between distinct points; `None` (meaning +∞) for fewer than two.
    pub fn min_gap(&self) -> Option<Q> {
        self.points.windows(2).map(|w| &w[1] - &w[0]).min()
    }

    pub fn to_interval_set(&self) -> IntervalSet {
        IntervalSet { ivs: self.points.iter().map(|p| (p.clone(), p.clone())).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qr;

    fn iv(l: Q, r: Q) -> IntervalSet {
        IntervalSet::interval(l, r).unwrap()
    }

    #[test]
    fn distances_and_queries() {
        let a = IntervalSet::new(vec![(q(0), qr(1, 4)), (qr(3, 4), q(1))]).unwrap();
        let b = IntervalSet::point(qr(1, 2));
        assert_eq!(a.set_distance(&b), Some(qr(1, 4)));
        assert_eq!(b.set_distance(&a), Some(qr(1, 4)));
        assert_eq!(a.set_distance(&IntervalSet::unit()), Some(q(0)));
        assert_eq!(a.set_distance(&IntervalSet::empty()), None);
        assert_eq!(a.max_in(&qr(1, 8), &qr(5, 8)), Some(qr(1, 4)));
        assert_eq!(a.max_in(&qr(3, 8), &qr(5, 8)), None);
        assert_eq!(a.max_in(&q(0), &qr(7, 8)), Some(qr(7, 8)));
        assert_eq!(a.min_from(&qr(1, 2)), Some(qr(3, 4)));
        assert_eq!(a.min_from(&qr(1, 8)), Some(qr(1, 8)));
        assert_eq!(b.min_from(&qr(3, 4)), None);
    }

    #[test]
    fn hausdorff_examples() {
        let k = IntervalSet::point(q(0));
        assert_eq!(hausdorff(&k, &IntervalSet::empty()), q(1));
        assert_eq!(hausdorff(&k, &k), q(0));
        assert_eq!(hausdorff(&IntervalSet::empty(), &IntervalSet::empty()), q(0));
        assert_eq!(hausdorff(&iv(q(0), qr(1, 2)), &iv(qr(1, 4), qr(3, 4))), qr(1, 4));
        // the far point of a gap is its midpoint
        let two = IntervalSet::new(vec![(q(0), q(0)), (q(1), q(1))]).unwrap();
        assert_eq!(hausdorff(&IntervalSet::unit(), &two), qr(1, 2));
    }

    #[test]
    fn ball_examples() {
        let r = qr(1, 4);
        assert!(ball(&IntervalSet::empty(), &r, true).unwrap().closure.is_empty());
        assert_eq!(ball(&IntervalSet::point(qr(1, 2)), &r, true).unwrap().closure, iv(qr(1, 4), qr(3, 4)));
        let ends = IntervalSet::new(vec![(q(0), q(0)), (q(1), q(1))]).unwrap();
        let b = ball(&ends, &qr(3, 10), false).unwrap();
        assert_eq!(b.closure, IntervalSet::new(vec![(q(0), qr(3, 10)), (qr(7, 10), q(1))]).unwrap());
        assert!(!b.contains_set(&IntervalSet::point(qr(3, 10))));
        assert!(ball(&ends, &qr(3, 10), true).unwrap().contains_set(&IntervalSet::point(qr(3, 10))));
        assert!(ball(&ends, &q(0), true).is_err());
    }

    #[test]
    fn subset_within_examples() {
        let r = qr(3, 10);
        assert_eq!(subset_within(&IntervalSet::empty(), &IntervalSet::point(q(0)), &r), Some(r.clone()));
        assert_eq!(subset_within(&iv(q(0), qr(1, 2)), &IntervalSet::point(qr(1, 4)), &r), Some(qr(1, 20)));
        assert_eq!(subset_within(&IntervalSet::point(q(1)), &IntervalSet::point(q(0)), &qr(1, 2)), None);
        assert_eq!(subset_within(&IntervalSet::point(q(1)), &IntervalSet::empty(), &qr(1, 2)), None);
    }

    #[test]
    fn set_algebra() {
        let k = iv(q(0), qr(1, 2));
        assert!(k.intersect(&IntervalSet::empty()).is_empty());
        assert_eq!(k.complement_in_unit(), iv(qr(1, 2), q(1)));
        assert_eq!(IntervalSet::unit().complement_in_unit(), IntervalSet::empty());
        assert_eq!(IntervalSet::empty().complement_in_unit(), IntervalSet::unit());
        assert_eq!(IntervalSet::point(qr(1, 2)).complement_in_unit(), IntervalSet::unit());
        assert_eq!(IntervalSet::point(q(0)).complement_in_unit(), IntervalSet::unit());
        let touching = IntervalSet::new(vec![(q(0), qr(1, 4)), (qr(1, 4), qr(1, 2))]).unwrap();
        assert_eq!(touching, k);
        assert!(k.contains_point(&qr(1, 3)) && !k.contains_point(&qr(2, 3)));
        assert!(iv(qr(1, 8), qr(1, 4)).is_subset(&k));
        assert!(iv(q(0), qr(1, 4)).in_interior_of(&k));
        assert!(!iv(qr(1, 8), qr(1, 2)).in_interior_of(&k));
    }

    #[test]
    fn point_sets() {
        let p = FinitePointSet::new(vec![q(1), q(0), qr(1, 4)]).unwrap();
        assert_eq!(p.min_gap(), Some(qr(1, 4)));
        assert_eq!(FinitePointSet::new(vec![q(0)]).unwrap().min_gap(), None);
        assert!(FinitePointSet::new(vec![q(2)]).is_err());
    }

    #[test]
    fn prefix_distance_examples() {
        let a = vec![IntervalSet::point(q(0)), IntervalSet::point(q(0))];
        assert_eq!(prefix_distance(&a, &a, 2).unwrap(), q(0));
        assert_eq!(prefix_distance(&a[..1], &[IntervalSet::empty()], 1).unwrap(), q(1));
        let b = vec![IntervalSet::point(qr(1, 10)), IntervalSet::point(qr(3, 10))];
        assert_eq!(prefix_distance(&a, &b, 2).unwrap(), qr(3, 10));
        assert!(prefix_distance(&a, &b, 3).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let k = IntervalSet::new(vec![(q(0), qr(1, 3)), (qr(1, 2), qr(1, 2))]).unwrap();
        let s = serde_json::to_string(&k).unwrap();
        assert_eq!(s, r#"{"intervals":[["0","1/3"],["0.5","0.5"]]}"#);
        assert_eq!(serde_json::from_str::<IntervalSet>(&s).unwrap(), k);
        assert!(serde_json::from_str::<IntervalSet>(r#"{"intervals":[["0.5","0.2"]]}"#).is_err());
    }
}
