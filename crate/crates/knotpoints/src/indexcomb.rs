//! Index combinatorics on finite prefixes: the growth-constrained sequences
//! `𝐧`, the index sets `A_j^m(𝐧)`, the shifted sequences `𝐧^k`, and the
//! inclusion chains `𝒮_k` and `𝒴_k` checked up to a caller-supplied depth.
//!
//! Indices are 1-based throughout, as in the definitions: `n[1]` is the first
//! term, `K_1` the first set.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::enclosure::NSetEnclosure;
use crate::error::{arg, Error, Result};
use crate::intervalsets::{subset_within, IntervalSet};
use crate::nsets::{n_set, NSetRequest, Variant};
use crate::rational::{fmt_q, pow2_neg, q, Q};
use crate::realfn::Function;

/// Prefix of `𝐧 ∈ Z`: positive integers with `n_{j+1} ≥ n_j + j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct IndexSeq(Vec<usize>);

impl TryFrom<Vec<usize>> for IndexSeq {
    type Error = Error;

    fn try_from(v: Vec<usize>) -> Result<Self> {
        IndexSeq::new(v)
    }
}

impl From<IndexSeq> for Vec<usize> {
    fn from(s: IndexSeq) -> Self {
        s.0
    }
}

impl IndexSeq {
    pub fn new(v: Vec<usize>) -> Result<Self> {
        if v.first() == Some(&0) {
            return arg("index sequence terms must be positive");
        }
        for (i, w) in v.windows(2).enumerate() {
            let j = i + 1;
            if w[1] < w[0] + j {
                return arg(format!("growth condition n_{} ≥ n_{} + {} fails: {} < {} + {}", j + 1, j, j, w[1], w[0], j));
            }
        }
        Ok(IndexSeq(v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> &[usize] {
        &self.0
    }

    /// `n_j`, 1-based.
    pub fn get(&self, j: usize) -> usize {
        self.0[j - 1]
    }

    /// `𝐧^k` with `n^k_j = n_{j+k}`.
    pub fn shift(&self, k: usize) -> Result<IndexSeq> {
        if self.0.len() <= k {
            return arg(format!("cannot shift a prefix of length {} by {k}", self.0.len()));
        }
        Ok(IndexSeq(self.0[k..].to_vec()))
    }

    /// Extends the prefix by one term, keeping the growth condition.
    pub fn push(&mut self, next: usize) -> Result<()> {
        let j = self.0.len();
        if let Some(&last) = self.0.last() {
            if next < last + j {
                return arg(format!("n_{} = {next} violates n_{} ≥ n_{} + {j}", j + 1, j + 1, j));
            }
        } else if next == 0 {
            return arg("index sequence terms must be positive");
        }
        self.0.push(next);
        Ok(())
    }

    /// Random admissible prefix: `n_1 ∈ [1,3]`, then gaps `j + U{0,1,2}`.
    pub fn random(rng: &mut impl Rng, len: usize) -> IndexSeq {
        let mut v = Vec::with_capacity(len);
        let mut cur = rng.gen_range(1..=3usize);
        for j in 1..=len {
            v.push(cur);
            cur += j + rng.gen_range(0..=2usize);
        }
        IndexSeq(v)
    }
}

/// `A_j^m(𝐧) = [n_j] ∪ ⋃_{i=j}^{m-1} {n_i+1, …, n_i+j-1}`, sorted.
pub fn index_set_a(j: usize, m: usize, n: &IndexSeq) -> Result<Vec<usize>> {
    if j == 0 || j > m {
        return arg(format!("A_j^m needs 1 ≤ j ≤ m, got j={j}, m={m}"));
    }
    let need = j.max(m - 1);
    if n.len() < need {
        return arg(format!("A_{j}^{m} needs {need} terms of n, prefix has {}", n.len()));
    }
    let mut out: Vec<usize> = (1..=n.get(j)).collect();
    for i in j..m {
        out.extend((1..j).map(|t| n.get(i) + t));
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

/// Sorted difference `a \ b` of sorted index lists.
pub fn set_minus(a: &[usize], b: &[usize]) -> Vec<usize> {
    a.iter().copied().filter(|x| b.binary_search(x).is_err()).collect()
}

pub fn is_subset(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|x| b.binary_search(x).is_ok())
}

/// Default refined scales `a_j^{m,k} = j + 2^-(3m+k)` and
/// `b_j^{m,k} = b_j - 2^-(2m+k)`, with base `a_j = j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleLadder {
    /// `b_1, b_2, …` as fixed so far.
    #[serde(with = "crate::rational::serde_q::vec")]
    pub b: Vec<Q>,
}

impl ScaleLadder {
    pub fn new() -> Self {
        ScaleLadder { b: Vec::new() }
    }

    pub fn a_base(j: usize) -> Q {
        q(j as i64)
    }

    /// `a_j^{m,k}` for `j ≤ m`, `k ∈ [4]`.
    pub fn a(j: usize, m: usize, k: usize) -> Q {
        debug_assert!(j >= 1 && j <= m && (1..=4).contains(&k));
        q(j as i64) + pow2_neg((3 * m + k) as u32)
    }

    /// `b_j^{m,k}` for `j ≤ m`, `k ∈ [3]`, once `b_j` is fixed.
    pub fn b(&self, j: usize, m: usize, k: usize) -> Result<Q> {
        debug_assert!(j >= 1 && j <= m && (1..=3).contains(&k));
        let bj = self.b.get(j - 1).ok_or_else(|| Error::Argument(format!("b_{j} is not fixed yet")))?;
        Ok(bj - pow2_neg((2 * m + k) as u32))
    }

    pub fn b_base(&self, j: usize) -> Result<&Q> {
        self.b.get(j - 1).ok_or_else(|| Error::Argument(format!("b_{j} is not fixed yet")))
    }

    /// Appends `b_j`; needs `b_j - 1 > j + 1` and `b_j > b_{j-1}`.
    pub fn push_b(&mut self, bj: Q) -> Result<()> {
        let j = self.b.len() + 1;
        if bj.clone() - q(1) <= q(j as i64 + 1) {
            return arg(format!("b_{j} = {} must exceed {}", fmt_q(&bj), j + 2));
        }
        if self.b.last().is_some_and(|p| *p >= bj) {
            return arg(format!("b_{j} must exceed b_{}", j - 1));
        }
        self.b.push(bj);
        Ok(())
    }

    /// Checks the chain conditions for every `j ≤ m ≤ m_max` with `b_j` fixed.
    pub fn check_chains(&self, m_max: usize) -> Result<()> {
        for j in 1..=m_max {
            let mut prev = q(j as i64 + 1);
            for m in j..=m_max {
                for k in 1..=4 {
                    let v = Self::a(j, m, k);
                    // a_j^{m,1} repeats a_j^{m-1,4}
                    let dec = if k == 1 && m > j { v == prev } else { v < prev };
                    if !(dec && v > q(j as i64)) {
                        return arg(format!("a-chain breaks at j={j}, m={m}, k={k}"));
                    }
                    prev = v;
                }
                if m < m_max && Self::a(j, m, 4) != Self::a(j, m + 1, 1) {
                    return arg(format!("a_j^{{m,4}} ≠ a_j^{{m+1,1}} at j={j}, m={m}"));
                }
            }
            let Ok(bj) = self.b_base(j) else { continue };
            let mut prev = bj - q(1);
            for m in j..=m_max {
                for k in 1..=3 {
                    let v = self.b(j, m, k)?;
                    let inc = if k == 1 && m > j { v == prev } else { v > prev };
                    if !(inc && v < *bj && v > q(j as i64 + 1)) {
                        return arg(format!("b-chain breaks at j={j}, m={m}, k={k}"));
                    }
                    prev = v;
                }
            }
        }
        Ok(())
    }
}

impl Default for ScaleLadder {
    fn default() -> Self {
        Self::new()
    }
}

/// Prefix of `𝛅 ∈ Y`: strictly decreasing in `(0,1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct DeltaSeq(Vec<Q>);

impl DeltaSeq {
    pub fn new(v: Vec<Q>) -> Result<Self> {
        if v.iter().any(|d| *d <= q(0) || *d >= q(1)) {
            return arg("δ terms must lie in (0,1)");
        }
        if v.windows(2).any(|w| w[1] >= w[0]) {
            return arg("δ must be strictly decreasing");
        }
        Ok(DeltaSeq(v))
    }

    /// `δ_m = 2^-(m+shift)`.
    pub fn geometric(len: usize, shift: u32) -> DeltaSeq {
        DeltaSeq((1..=len).map(|m| pow2_neg(m as u32 + shift)).collect())
    }

    pub fn get(&self, m: usize) -> &Q {
        &self.0[m - 1]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> &[Q] {
        &self.0
    }
}

impl TryFrom<Vec<String>> for DeltaSeq {
    type Error = Error;

    fn try_from(v: Vec<String>) -> Result<Self> {
        DeltaSeq::new(v.iter().map(|s| crate::rational::parse_q(s)).collect::<Result<_>>()?)
    }
}

impl From<DeltaSeq> for Vec<String> {
    fn from(d: DeltaSeq) -> Self {
        d.0.iter().map(fmt_q).collect()
    }
}

/// Prefix `K_1, K_2, …` of a sequence of closed sets.
pub type SeqOfSets = Vec<IntervalSet>;

fn union_of(k: &[IntervalSet], idx: &[usize]) -> Result<IntervalSet> {
    let mut out = IntervalSet::empty();
    for &n in idx {
        let s = k.get(n - 1).ok_or_else(|| Error::Argument(format!("K_{n} is beyond the prefix of length {}", k.len())))?;
        out = out.union(s);
    }
    Ok(out)
}

/// Outcome of a finite-depth check, with the first offending indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail { witness: String },
    Undecided { witness: String },
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    pub fn is_fail(&self) -> bool {
        matches!(self, Verdict::Fail { .. })
    }

    /// `Fail` dominates `Undecided`, which dominates `Pass`.
    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (f @ Verdict::Fail { .. }, _) | (_, f @ Verdict::Fail { .. }) => f,
            (u @ Verdict::Undecided { .. }, _) | (_, u @ Verdict::Undecided { .. }) => u,
            _ => Verdict::Pass,
        }
    }
}

/// `𝐊 ∈ 𝒮_k(𝐧,𝛅)` up to depth `m_max`: for `2 ≤ j ≤ m-1`, `m ≤ m_max`,
/// `⋃_{A_j^m(𝐧^k) \ A_j^{m-1}(𝐧^k)} K_n ⊂ ⋃_{A_{j-1}^{m-1}(𝐧^k)} B(K_n, δ_m)`.
pub fn check_s_k(k_sets: &[IntervalSet], n: &IndexSeq, delta: &DeltaSeq, k: usize, m_max: usize) -> Result<Verdict> {
    if m_max < 3 {
        return Ok(Verdict::Pass);
    }
    if delta.len() < m_max {
        return arg(format!("δ prefix has {} terms, depth {m_max} needs {m_max}", delta.len()));
    }
    let nk = n.shift(k)?;
    for m in 3..=m_max {
        for j in 2..m {
            let new = set_minus(&index_set_a(j, m, &nk)?, &index_set_a(j, m - 1, &nk)?);
            let lhs = union_of(k_sets, &new)?;
            let rhs = union_of(k_sets, &index_set_a(j - 1, m - 1, &nk)?)?;
            if subset_within(&lhs, &rhs, delta.get(m)).is_none() {
                return Ok(Verdict::Fail { witness: format!("S_{k}: inclusion fails at (j,m)=({j},{m})") });
            }
        }
    }
    Ok(Verdict::Pass)
}

/// `(𝐊, f, 𝐧, 𝛅, 𝐚, 𝐛) ∈ 𝒴_k` up to depth `m_max`. `N`-sets are exact for PWL
/// `f`; for C¹ `f` the outer enclosure is used where the set must be small and
/// the inner one where it must be large.
#[allow(clippy::too_many_arguments)]
pub fn check_y_k(
    k_sets: &[IntervalSet],
    f: &Function,
    n: &IndexSeq,
    delta: &DeltaSeq,
    a: &[Q],
    b: &[Q],
    k: usize,
    m_max: usize,
    tol: f64,
) -> Result<Verdict> {
    if a.len() < m_max || b.len() < m_max {
        return arg(format!("scale prefixes must have {m_max} terms"));
    }
    if delta.len() < m_max {
        return arg(format!("δ prefix has {} terms, depth {m_max} needs {m_max}", delta.len()));
    }
    let mut verdict = check_s_k(k_sets, n, delta, k, m_max)?;
    if verdict.is_fail() {
        return Ok(verdict);
    }
    let nk = n.shift(k)?;
    let nset = |s: &Q| -> Result<NSetEnclosure> {
        n_set(&NSetRequest { f: f.clone(), a: s.clone(), variant: Variant::Full }, tol)
    };
    for j in 1..=m_max {
        let na = nset(&a[j - 1])?;
        let nb = nset(&b[j - 1])?;
        for m in j..=m_max {
            let r = delta.get(m);
            let cover = union_of(k_sets, &index_set_a(j, m, &nk)?)?;
            let first = (subset_within(&na.outer, &cover, r).is_some(), subset_within(&na.inner, &cover, r).is_some());
            let sets = union_of(k_sets, &index_set_a(j, m, n)?)?;
            let second = (subset_within(&sets, &nb.inner, r).is_some(), subset_within(&sets, &nb.outer, r).is_some());
            for (name, (sure, possible)) in [("N(f,a_j) ⊂ ⋃B(K_n,δ_m)", first), ("⋃K_n ⊂ B(N(f,b_j),δ_m)", second)] {
                let v = if sure {
                    Verdict::Pass
                } else if possible {
                    Verdict::Undecided { witness: format!("Y_{k}: {name} undecided at (j,m)=({j},{m})") }
                } else {
                    Verdict::Fail { witness: format!("Y_{k}: {name} fails at (j,m)=({j},{m})") }
                };
                verdict = verdict.and(v);
                if verdict.is_fail() {
                    return Ok(verdict);
                }
            }
        }
    }
    Ok(verdict)
}

/// Finite surrogate of the `K_n` trick: the set
/// `⋂_{m=j}^{m_max} ⋃_{n∈A_j^m(𝐧^k)} B(K_n,δ_m)` must lie inside
/// `B(⋃_{n ≤ len} K_n, δ_{m_max})`, all balls open.
pub fn verify_k_n_trick(k_sets: &[IntervalSet], n: &IndexSeq, delta: &DeltaSeq, k: usize, j: usize, m_max: usize) -> Result<bool> {
    if j == 0 || j > m_max {
        return arg("K_n trick needs 1 ≤ j ≤ m_max");
    }
    if delta.len() < m_max {
        return arg("δ prefix too short");
    }
    let nk = n.shift(k)?;
    let mut acc: Option<OpenSet> = None;
    for m in j..=m_max {
        let u = union_of(k_sets, &index_set_a(j, m, &nk)?)?;
        let b = OpenSet::ball(&u, delta.get(m));
        acc = Some(match acc {
            None => b,
            Some(prev) => prev.intersect(&b),
        });
    }
    let all: Vec<usize> = (1..=k_sets.len()).collect();
    let target = union_of(k_sets, &all)?;
    Ok(acc.unwrap().within_open_ball(&target, delta.get(m_max)))
}

/// A relatively open subset of `[0,1]`: intervals `(l,r)`, closed at an end
/// only where that end is `0` or `1`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct OpenSet {
    /// `(l, r, l_closed, r_closed)`.
    ivs: Vec<(Q, Q, bool, bool)>,
}

impl OpenSet {
    fn ball(a: &IntervalSet, r: &Q) -> OpenSet {
        let mut ivs: Vec<(Q, Q, bool, bool)> = Vec::new();
        for (l, h) in a.intervals() {
            let (lo, hi) = (l - r, h + r);
            let (lo, lc) = if lo < q(0) { (q(0), true) } else { (lo, false) };
            let (hi, hc) = if hi > q(1) { (q(1), true) } else { (hi, false) };
            match ivs.last_mut() {
                Some(last) if lo < last.1 => {
                    last.1 = hi;
                    last.3 = hc;
                }
                _ => ivs.push((lo, hi, lc, hc)),
            }
        }
        OpenSet { ivs }
    }

    fn intersect(&self, other: &OpenSet) -> OpenSet {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.ivs.len() && j < other.ivs.len() {
            let (a, b) = (&self.ivs[i], &other.ivs[j]);
            let (lo, lc) = if a.0 > b.0 {
                (a.0.clone(), a.2)
            } else if b.0 > a.0 {
                (b.0.clone(), b.2)
            } else {
                (a.0.clone(), a.2 && b.2)
            };
            let (hi, hc) = if a.1 < b.1 {
                (a.1.clone(), a.3)
            } else if b.1 < a.1 {
                (b.1.clone(), b.3)
            } else {
                (a.1.clone(), a.3 && b.3)
            };
            if lo < hi || (lo == hi && lc && hc) {
                out.push((lo, hi, lc, hc));
            }
            if a.1 < b.1 {
                i += 1;
            } else {
                j += 1;
            }
        }
        OpenSet { ivs: out }
    }

    /// Whether every point has `dist(·, u) < r`.
    fn within_open_ball(&self, u: &IntervalSet, r: &Q) -> bool {
        if self.ivs.is_empty() {
            return true;
        }
        if u.is_empty() {
            return false;
        }
        // dist(·,u) is linear between these breakpoints.
        let mut bps: Vec<Q> = u.intervals().iter().flat_map(|(l, h)| [l.clone(), h.clone()]).collect();
        bps.extend(u.intervals().windows(2).map(|w| (&w[0].1 + &w[1].0) / q(2)));
        bps.sort();
        let d = |x: &Q| u.dist_to(x).unwrap();
        for (l, h, lc, hc) in &self.ivs {
            let mut pts = vec![l.clone()];
            pts.extend(bps.iter().filter(|p| *p > l && *p < h).cloned());
            pts.push(h.clone());
            let last = pts.len() - 1;
            for (i, p) in pts.iter().enumerate() {
                let dp = d(p);
                let closed_end = (i == 0 && *lc) || (i == last && *hc);
                let interior = i != 0 && i != last;
                if interior || closed_end {
                    if dp >= *r {
                        return false;
                    }
                } else if dp > *r {
                    return false;
                } else if dp == *r {
                    // an open end at distance exactly r: points just inside must be closer
                    let nb = if i == 0 { &pts[1] } else { &pts[last - 1] };
                    if d(&((p + nb) / q(2))) >= *r {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// `K'_n = K_{σ(n)}`, with `σ` a permutation of `[p]` extended by the identity.
pub fn apply_finite_permutation(k_sets: &[IntervalSet], sigma: &[usize]) -> Result<SeqOfSets> {
    validate_permutation(sigma)?;
    if sigma.len() > k_sets.len() {
        return arg("permutation moves indices beyond the prefix");
    }
    Ok((1..=k_sets.len()).map(|n| k_sets[perm_at(sigma, n) - 1].clone()).collect())
}

fn validate_permutation(sigma: &[usize]) -> Result<()> {
    let mut seen = vec![false; sigma.len() + 1];
    for &s in sigma {
        if s == 0 || s > sigma.len() || seen[s] {
            return arg("σ must be a permutation of 1..p");
        }
        seen[s] = true;
    }
    Ok(())
}

fn perm_at(sigma: &[usize], n: usize) -> usize {
    if n <= sigma.len() {
        sigma[n - 1]
    } else {
        n
    }
}

/// Both claims about finite permutations for all `j ≤ m ≤ m_max` whose index
/// sets the prefix determines:
/// `σ(A_j^m(𝐧^k)) = A_j^m(𝐧^k)` and `σ(A_j^m(𝐧)) ⊂ A_{max(j,k)}^{max(m,k)}(𝐧)`.
/// `σ` must fix every index above `n_k`.
pub fn check_perm_a(n: &IndexSeq, sigma: &[usize], k: usize, m_max: usize) -> Result<Verdict> {
    validate_permutation(sigma)?;
    if k == 0 || k > n.len() {
        return arg("check_perm_a needs 1 ≤ k ≤ prefix length");
    }
    let nk_val = n.get(k);
    if let Some(bad) = (nk_val + 1..=sigma.len()).find(|&i| sigma[i - 1] != i) {
        return arg(format!("σ moves {bad} > n_{k} = {nk_val}"));
    }
    let shifted = n.shift(k)?;
    let image = |s: &[usize]| {
        let mut v: Vec<usize> = s.iter().map(|&x| perm_at(sigma, x)).collect();
        v.sort_unstable();
        v
    };
    let fits = |j: usize, m: usize, len: usize| j.max(m - 1) <= len;
    for m in 1..=m_max {
        for j in 1..=m {
            if fits(j, m, shifted.len()) {
                let a = index_set_a(j, m, &shifted)?;
                if image(&a) != a {
                    return Ok(Verdict::Fail { witness: format!("σ(A_{j}^{m}(n^{k})) ≠ A_{j}^{m}(n^{k})") });
                }
            }
            let (bj, bm) = (j.max(k), m.max(k));
            if !fits(j, m, n.len()) || !fits(bj, bm, n.len()) {
                continue;
            }
            let a = index_set_a(j, m, n)?;
            let big = index_set_a(bj, bm, n)?;
            if !is_subset(&image(&a), &big) {
                return Ok(Verdict::Fail { witness: format!("σ(A_{j}^{m}(n)) ⊄ A_{}^{}(n)", j.max(k), m.max(k)) });
            }
        }
    }
    Ok(Verdict::Pass)
}

/// Random permutation of `[n_k]`.
pub fn random_admissible_permutation(rng: &mut impl Rng, n: &IndexSeq, k: usize) -> Vec<usize> {
    let p = n.get(k);
    let mut v: Vec<usize> = (1..=p).collect();
    for i in (1..p).rev() {
        let j = rng.gen_range(0..=i);
        v.swap(i, j);
    }
    v
}
