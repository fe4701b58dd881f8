//! Player II's moves: the first round and the general round.
//!
//! Each round builds its finite sets, certifies the conditions it relies on,
//! and only then commits the record and the new `b_m` to the game state.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::cover::{disjointify, dyadic_below, greedy_cover, nearest};
use super::player::{check_ball_rule, Move};
use super::star::{check_star, sample_in_ball};
use super::{cert_err, points_set, tilde_union, Certificate, GameState, NSets, NamedVerdict, RoundRecord, SplitSet};
use crate::bump::{check_bump_definition, make_bump, mu, mu_net, BumpSpec};
use crate::error::{Error, Result};
use crate::indexcomb::{index_set_a, set_minus, IndexSeq, ScaleLadder, Verdict};
use crate::intervalsets::{hausdorff, subset_within, FinitePointSet, IntervalSet};
use crate::nsets::{continuity_delta, window, Reading};
use crate::rational::{fmt_q, from_f64, max_q, min_q, pow2_neg, q, qr, to_f64, Q};
use crate::realfn::C1Function;

/// A cheap upper bound on `μ(f,a,b,h)` for one `j`: `ε` never exceeds its
/// starting value `2^-b/4`, so neither can the constants built from it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MuBound {
    pub j: usize,
    pub bound: f64,
}

pub fn mu_upper_bound(f: &C1Function, a: &Q, b: &Q, h: f64) -> Result<f64> {
    let wa = to_f64(&window(a)?);
    let wb = to_f64(&window(b)?);
    let d = f.deriv_sup_norm() + to_f64(a);
    let eps = wb / 4.0;
    let l = eps.min(wa - wb).min(to_f64(&((b - a) / q(2))) * eps / d);
    // The relative slack absorbs rounding in the bound itself.
    Ok(0.5 * (l / 2.0).min(wa / 2.0).min(h / (2.0 * d)) * (1.0 + 1e-9))
}

/// Refuses a round whose `μ_m` forces a cover of `I` by more than `cap` balls.
/// `alpha` only enters the message: `μ_m ≤ α_m/(4(‖f′‖+a))` underflows long
/// before `α_m` itself does.
fn require_net(m: usize, bounds: &[MuBound], cap: usize, alpha: &Q) -> Result<()> {
    for mb in bounds {
        if !(mb.bound > 0.0) || 1.0 / mb.bound > cap as f64 {
            let e = alpha.denom().bits() as i64 - alpha.numer().bits() as i64;
            return Err(Error::Resource(format!(
                "round {m}: μ_{m} ≤ {:.3e} (j = {}, α_{m} < 2^-{}), so covering I by μ-balls needs more than {cap} points",
                mb.bound,
                mb.j,
                e - 1
            )));
        }
    }
    Ok(())
}

fn tag(r: Reading) -> &'static str {
    match r {
        Reading::Hat => "hat",
        Reading::Check => "check",
    }
}

fn exact(ok: bool, what: String) -> Verdict {
    if ok {
        Verdict::Pass
    } else {
        Verdict::Fail { witness: what }
    }
}

fn graded(sure: bool, possible: bool, what: String) -> Verdict {
    if sure {
        Verdict::Pass
    } else if possible {
        Verdict::Undecided { witness: what }
    } else {
        Verdict::Fail { witness: what }
    }
}

fn first_failure(checks: &[NamedVerdict]) -> Option<&NamedVerdict> {
    checks.iter().find(|c| !c.verdict.is_pass())
}

fn min_opt(acc: &mut Option<Q>, x: Q) {
    if acc.as_ref().is_none_or(|a| x < *a) {
        *acc = Some(x);
    }
}

fn enclosure_tol(cfg_tol: f64, scales: &[f64]) -> f64 {
    scales.iter().fold(cfg_tol, |t, s| t.min(s / 64.0)).max(1e-12)
}

/// Round one: a `μ₁`-net split into alternating halves, snapped by the oracle.
pub fn round_one(state: &mut GameState, mv: &Move) -> Result<()> {
    if !state.rounds.is_empty() {
        return Err(Error::Argument("round one must be the first round".into()));
    }
    if mv.alpha <= Q::zero() {
        return Err(Error::Rule("α₁ must be positive".into()));
    }
    let cfg = state.config.clone();
    let f = &mv.f;
    let hf = to_f64(&(&mv.alpha / q(2)));
    let (a3, a2) = (ScaleLadder::a(1, 1, 3), ScaleLadder::a(1, 1, 2));
    require_net(1, &[MuBound { j: 1, bound: mu_upper_bound(f, &a3, &a2, hf)? }], cfg.max_net_points, &mv.alpha)?;
    let mu1 = mu(f, &a3, &a2, hf)?;
    let (hat, check) = mu_net(mu1)?;
    if hat.len() + check.len() > cfg.max_net_points {
        return Err(Error::Resource(format!("round 1: μ₁-net has {} points", hat.len() + check.len())));
    }
    let step = check.points()[0].clone();
    let mu_q = from_f64(mu1);
    let net = hat.union(&check);
    let oracle = state.oracle(1)?.clone();

    // Points move by less than half a step, so the nearest net point keeps its label.
    let mut eps = min_q(&(&mu_q - &step), &step) / q(2);
    let mut answer = None;
    for _ in 0..=cfg.max_retries {
        let ans = oracle.propose(std::slice::from_ref(&net), &eps)?;
        let k1 = &ans.sets[0];
        let labels = nearest(k1.points(), net.points());
        let (mut kh, mut kc) = (Vec::new(), Vec::new());
        for (x, i) in k1.points().iter().zip(labels) {
            if hat.contains(&net.points()[i]) {
                kh.push(x.clone());
            } else {
                kc.push(x.clone());
            }
        }
        let split = SplitSet::new(FinitePointSet::new(kh)?, FinitePointSet::new(kc)?);
        let covers = Reading::BOTH
            .iter()
            .all(|r| subset_within(&IntervalSet::unit(), &split.get(*r).to_interval_set(), &mu_q).is_some());
        if covers {
            answer = Some((ans, split));
            break;
        }
        eps /= q(2);
    }
    let Some((ans, split)) = answer else {
        return Err(cert_err("B(K̃₁¹, μ₁) = I", format!("no oracle answer covered I after {} retries", cfg.max_retries)));
    };
    let mut k_sets = vec![split];
    k_sets.extend(ans.sets[1..].iter().map(|s| SplitSet::new(s.clone(), FinitePointSet::empty())));
    let checks = Reading::BOTH
        .iter()
        .map(|r| NamedVerdict::new(format!("B(K̃₁¹,μ₁) = I ({})", tag(*r)), Verdict::Pass))
        .collect();
    let tol = enclosure_tol(cfg.enclosure_tol, &[mu1]);
    let nf = NSets::new(f, tol);
    let draft = Draft {
        m: 1,
        mv,
        hf,
        mu: mu1,
        zeta: None,
        l_sets: Vec::new(),
        k_sets,
        certificate: ans.certificate,
        bump_upto: 1,
        tol,
        checks,
        notes: Vec::new(),
    };
    finish_round(state, draft, &nf)
}

/// Round `m ≥ 2`.
pub fn round_m(state: &mut GameState, mv: &Move) -> Result<()> {
    let m = state.rounds.len() + 1;
    if m < 2 {
        return Err(Error::Argument("round_m needs a previous round".into()));
    }
    let cfg = state.config.clone();
    let prev = state.rounds.last().unwrap().clone();
    check_ball_rule(mv, &prev.g, &prev.beta)?;
    let f = &mv.f;
    let hf = to_f64(&(&mv.alpha / q(2)));
    let mut bounds = Vec::new();
    for j in 1..=m {
        bounds.push(MuBound { j, bound: mu_upper_bound(f, &ScaleLadder::a(j, m, 3), &ScaleLadder::a(j, m, 2), hf)? });
    }
    require_net(m, &bounds, cfg.max_net_points, &mv.alpha)?;
    let mut mu_m = f64::INFINITY;
    for j in 1..=m {
        mu_m = mu_m.min(mu(f, &ScaleLadder::a(j, m, 3), &ScaleLadder::a(j, m, 2), hf)?);
    }
    let tol = enclosure_tol(cfg.enclosure_tol, &[mu_m, to_f64(&prev.w)]);
    let ctx = Ctx {
        m,
        np: state.n_seq()?,
        nf: NSets::new(f, tol),
        mu: from_f64(mu_m),
        zeta: Q::zero(),
        cap: cfg.max_net_points,
        ladder: state.ladder.clone(),
        prev: &prev,
    };
    let zeta = ctx.zeta()?;
    let ctx = Ctx { zeta: zeta.clone(), ..ctx };
    let l_sets = ctx.l_sets()?;
    let (mut checks, margin) = ctx.claims(&l_sets, Family::L)?;
    if let Some(bad) = first_failure(&checks) {
        return Err(cert_err(bad.name.clone(), format!("{:?}", bad.verdict)));
    }
    let margin = match margin {
        Some(mg) if mg > Q::zero() => mg,
        _ => return Err(cert_err("L^m margins", "a strict condition on the L-sets has no positive margin")),
    };

    let oracle = state.oracle(m)?.clone();
    let top = ctx.top();
    let mut budget = margin / q(8);
    let mut done = None;
    let mut last_bad = String::new();
    for _ in 0..=cfg.max_retries {
        let groups: Vec<Vec<Q>> = l_sets
            .iter()
            .flat_map(|s| [s.hat.points().to_vec(), s.check.points().to_vec()])
            .collect();
        let qs = disjointify(&groups, &budget)?;
        let q_sets: Vec<SplitSet> = (0..top)
            .map(|n| Ok(SplitSet::new(FinitePointSet::new(qs[2 * n].clone())?, FinitePointSet::new(qs[2 * n + 1].clone())?)))
            .collect::<Result<_>>()?;
        let target: Vec<FinitePointSet> = q_sets.iter().map(|s| s.union()).collect();
        let mut eps = budget.clone();
        for t in &target {
            if let Some(g) = t.min_gap() {
                eps = min_q(&eps, &(g / q(4)));
            }
        }
        let ans = oracle.propose(&target, &eps)?;
        let mut k_sets = Vec::with_capacity(ans.sets.len());
        for (i, kn) in ans.sets.iter().enumerate() {
            let Some(qn) = q_sets.get(i) else {
                k_sets.push(SplitSet::new(kn.clone(), FinitePointSet::empty()));
                continue;
            };
            let t = &target[i];
            let (mut kh, mut kc) = (Vec::new(), Vec::new());
            for (x, j) in kn.points().iter().zip(nearest(kn.points(), t.points())) {
                if t.is_empty() || qn.hat.contains(&t.points()[j]) {
                    kh.push(x.clone());
                } else {
                    kc.push(x.clone());
                }
            }
            k_sets.push(SplitSet::new(FinitePointSet::new(kh)?, FinitePointSet::new(kc)?));
        }
        let (kc, _) = ctx.claims(&k_sets, Family::K)?;
        match first_failure(&kc) {
            None => {
                done = Some((ans, k_sets, kc));
                break;
            }
            Some(bad) => last_bad = bad.name.clone(),
        }
        budget /= q(2);
    }
    let Some((ans, k_sets, kc)) = done else {
        return Err(cert_err(last_bad, format!("K^{m} conditions still fail after {} retries", cfg.max_retries)));
    };
    checks.extend(kc);
    let draft = Draft {
        m,
        mv,
        hf,
        mu: mu_m,
        zeta: Some(zeta),
        l_sets,
        k_sets,
        certificate: ans.certificate,
        bump_upto: top,
        tol,
        checks,
        notes: Vec::new(),
    };
    let nf = ctx.nf;
    finish_round(state, draft, &nf)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Family {
    L,
    K,
}

/// Round-`m` data shared by the L-set construction and its claims.
struct Ctx<'a> {
    m: usize,
    prev: &'a RoundRecord,
    /// `(n_1, …, n_{m-1})`.
    np: IndexSeq,
    nf: NSets,
    mu: Q,
    zeta: Q,
    cap: usize,
    ladder: ScaleLadder,
}

impl Ctx<'_> {
    /// `n_{m-1} + m - 1`.
    fn top(&self) -> usize {
        self.prev.n + self.m - 1
    }

    fn a_prev(&self, j: usize) -> Result<Vec<usize>> {
        index_set_a(j, self.m - 1, &self.np)
    }

    fn a_cur(&self, j: usize) -> Result<Vec<usize>> {
        index_set_a(j, self.m, &self.np)
    }

    /// The least `j ∈ [m-1]` with `n ∈ A_j^{m-1}`.
    fn j_of(&self, n: usize) -> Result<usize> {
        for j in 1..self.m {
            if self.a_prev(j)?.binary_search(&n).is_ok() {
                return Ok(j);
            }
        }
        Err(Error::Construction(format!("index {n} lies in no A_j^{}", self.m - 1)))
    }

    fn kp(&self, idx: &[usize], r: Reading) -> IntervalSet {
        tilde_union(&self.prev.k_sets, idx, r)
    }

    /// Half the least margin of `Ñ(f_m,a_j^{m,1}) ⊂ ⋃_{A_j^{m-1}} B(K̃^{m-1}, w_{m-1})`,
    /// together with the margin of `⋃_{A_j^{m-1}} K̃^{m-1} ⊂ B(Ñ(f_m,b_j^{m,1}), w_{m-1})`
    /// which the L-set carriers need; both follow from `(★_{m-1})`.
    fn zeta(&self) -> Result<Q> {
        let wp = &self.prev.w;
        let mut best: Option<Q> = None;
        for j in 1..self.m {
            let idx = self.a_prev(j)?;
            for r in Reading::BOTH {
                let k = self.kp(&idx, r);
                let na = self.nf.get(&ScaleLadder::a(j, self.m, 1), r)?;
                let nb = self.nf.get(&self.ladder.b(j, self.m, 1)?, r)?;
                let m1 = subset_within(&na.outer, &k, wp).ok_or_else(|| {
                    cert_err("ζ_m", format!("Ñ(f_{0},a_{j}^{{{0},1}}) ⊄ ⋃B(K̃^{1},w_{1}) ({2})", self.m, self.m - 1, tag(r)))
                })?;
                let m2 = subset_within(&k, &nb.inner, wp).ok_or_else(|| {
                    cert_err("ζ_m", format!("⋃K̃^{1} ⊄ B(Ñ(f_{0},b_{j}^{{{0},1}}),w_{1}) ({2})", self.m, self.m - 1, tag(r)))
                })?;
                min_opt(&mut best, m1);
                min_opt(&mut best, m2);
            }
        }
        let z = best.unwrap_or_else(|| wp.clone()) / q(2);
        if z <= Q::zero() {
            return Err(cert_err("ζ_m", "no positive margin"));
        }
        Ok(z)
    }

    fn l_sets(&self) -> Result<Vec<SplitSet>> {
        let wp = &self.prev.w;
        let big_n = self.prev.n;
        let m = self.m;
        let mut total = 0usize;
        let mut per_reading: Vec<Vec<Vec<Q>>> = Vec::new();
        for r in Reading::BOTH {
            let mut ls: Vec<Vec<Q>> = Vec::with_capacity(self.top());
            for n in 1..=big_n {
                let k = self.kp(&[n], r);
                if k.is_empty() {
                    ls.push(Vec::new());
                    continue;
                }
                let j = self.j_of(n)?;
                let na = self.nf.get(&ScaleLadder::a(j, m, 1), r)?;
                let nb = self.nf.get(&self.ladder.b(j, m, 1)?, r)?;
                let carrier = nb.inner.intersect(&k.dilate(&(wp - &self.zeta / q(2))));
                let s1 = na.outer.intersect(&k.dilate(&(wp - &self.zeta)));
                let claim = format!("L^{m} net for n={n} ({})", tag(r));
                let mut pts = greedy_cover(&s1, &carrier, &self.mu, self.cap, &claim)?;
                pts.extend(greedy_cover(&k, &carrier, wp, self.cap, &claim)?);
                ls.push(pts);
            }
            for j in 2..m {
                let base = self.kp(&self.a_prev(j - 1)?, r);
                let na = self.nf.get(&ScaleLadder::a(j, m, 1), r)?;
                let na_prev = self.nf.get(&ScaleLadder::a(j - 1, m, 1), r)?;
                let na2_prev = self.nf.get(&ScaleLadder::a(j - 1, m, 2), r)?;
                let target = na
                    .outer
                    .intersect(&base.dilate(&(wp - &self.zeta)))
                    .intersect(&na_prev.inner.complement_in_unit());
                let carrier = na
                    .inner
                    .intersect(&base.dilate(&(wp - &self.zeta / q(2))))
                    .intersect(&na2_prev.outer.dilate(&(&self.mu / q(4))).complement_in_unit());
                let claim = format!("L^{m} net of P̃_{j} ({})", tag(r));
                ls.push(greedy_cover(&target, &carrier, &self.mu, self.cap, &claim)?);
            }
            let covered = points_set(ls.iter().flatten().cloned().collect());
            let rest = covered.dilate(&(&self.mu * qr(63, 64))).complement_in_unit();
            ls.push(greedy_cover(&rest, &rest, &self.mu, self.cap, &format!("L^{m} last net ({})", tag(r)))?);
            total += ls.iter().map(|v| v.len()).sum::<usize>();
            if total > self.cap {
                return Err(Error::Resource(format!("round {m}: L-sets exceed {} points", self.cap)));
            }
            per_reading.push(ls);
        }
        let (hat, check) = (&per_reading[0], &per_reading[1]);
        (0..self.top())
            .map(|i| Ok(SplitSet::new(FinitePointSet::new(hat[i].clone())?, FinitePointSet::new(check[i].clone())?)))
            .collect()
    }

    /// Claim L^m (1)–(6) for `Family::L`; conditions (1), (3)–(6) on `𝐊^m` for
    /// `Family::K`, where (3) asks for the interior of `Ñ(f_m,b_j^{m,2})`.
    /// The margin is the least slack of the strict conditions (1), (3)–(6),
    /// with (3) measured against the interior of `Ñ(f_m,b_j^{m,2})`.
    fn claims(&self, sets: &[SplitSet], fam: Family) -> Result<(Vec<NamedVerdict>, Option<Q>)> {
        let m = self.m;
        let wp = &self.prev.w;
        let top = self.top();
        let name = match fam {
            Family::L => "Claim L^m",
            Family::K => "K^m condition",
        };
        let mut out = Vec::new();
        let mut margin: Option<Q> = None;
        let all: Vec<usize> = (1..=top).collect();
        let unit = IntervalSet::unit();
        for r in Reading::BOTH {
            let t = tag(r);
            for n in 1..=self.prev.n {
                let d = hausdorff(&tilde_union(sets, &[n], r), &self.kp(&[n], r));
                out.push(NamedVerdict::new(
                    format!("{name} (1) n={n} {t}"),
                    exact(&d < wp, format!("d(·_{n}, K̃_{n}^{}) = {} ≥ w", m - 1, fmt_q(&d))),
                ));
                min_opt(&mut margin, wp - &d);
            }
            if fam == Family::L {
                let na = self.nf.get(&ScaleLadder::a(m - 1, m, 1), r)?;
                let lower: Vec<usize> = (1..top).collect();
                let u = tilde_union(sets, &lower, r);
                out.push(NamedVerdict::new(
                    format!("{name} (2) {t}"),
                    graded(
                        subset_within(&na.outer, &u, &self.mu).is_some(),
                        subset_within(&na.inner, &u, &self.mu).is_some(),
                        format!("Ñ(f_{m},a_{0}^{{{m},1}}) ⊄ ⋃B(L̃,μ)", m - 1),
                    ),
                ));
            }
            for j in 1..m {
                let u = tilde_union(sets, &self.a_cur(j)?, r);
                let b2 = self.nf.get(&self.ladder.b(j, m, 2)?, r)?;
                let v = match fam {
                    Family::L => {
                        let b1 = self.nf.get(&self.ladder.b(j, m, 1)?, r)?;
                        graded(u.is_subset(&b1.inner), u.is_subset(&b1.outer), format!("⋃L̃ ⊄ Ñ(f_{m},b_{j}^{{{m},1}})"))
                    }
                    Family::K => graded(
                        u.in_interior_of(&b2.inner),
                        u.in_interior_of(&b2.outer),
                        format!("⋃K̃ ⊄ Int Ñ(f_{m},b_{j}^{{{m},2}})"),
                    ),
                };
                out.push(NamedVerdict::new(format!("{name} (3) j={j} {t}"), v));
                if let Some(d) = u.set_distance(&b2.inner.complement_in_unit()) {
                    min_opt(&mut margin, d);
                }
            }
            let u = tilde_union(sets, &all, r);
            let cov = subset_within(&unit, &u, &self.mu);
            out.push(NamedVerdict::new(format!("{name} (4) {t}"), exact(cov.is_some(), "⋃B(·,μ) ≠ I".into())));
            min_opt(&mut margin, cov.unwrap_or_else(Q::zero));
            for j in 2..m {
                let lhs = tilde_union(sets, &set_minus(&self.a_cur(j)?, &self.a_prev(j)?), r);
                let rhs = tilde_union(sets, &self.a_prev(j - 1)?, r);
                let two_w = wp * q(2);
                let s = subset_within(&lhs, &rhs, &two_w);
                out.push(NamedVerdict::new(
                    format!("{name} (5) j={j} {t}"),
                    exact(s.is_some(), format!("new indices of A_{j}^{m} are not within 2w of A_{0}^{1}", j - 1, m - 1)),
                ));
                min_opt(&mut margin, s.unwrap_or_else(Q::zero));
            }
            for j in 1..m {
                let v = tilde_union(sets, &set_minus(&all, &self.a_cur(j)?), r);
                let na2 = self.nf.get(&ScaleLadder::a(j, m, 2), r)?;
                let d_out = v.set_distance(&na2.outer);
                let d_in = v.set_distance(&na2.inner);
                out.push(NamedVerdict::new(
                    format!("{name} (6) j={j} {t}"),
                    graded(
                        d_out.as_ref().is_none_or(|d| *d > Q::zero()),
                        d_in.as_ref().is_none_or(|d| *d > Q::zero()),
                        format!("Ñ(f_{m},a_{j}^{{{m},2}}) meets sets off A_{j}^{m}"),
                    ),
                ));
                if let Some(d) = d_out {
                    min_opt(&mut margin, d);
                }
            }
        }
        Ok((out, margin))
    }
}

/// What a round has built before `n_m`, `w_m`, `g_m`, `b_m` and `β_m`.
struct Draft<'a> {
    m: usize,
    mv: &'a Move,
    hf: f64,
    mu: f64,
    zeta: Option<Q>,
    l_sets: Vec<SplitSet>,
    k_sets: Vec<SplitSet>,
    certificate: Certificate,
    /// Bumps sit at `K_n^m` for `n ≤ bump_upto`.
    bump_upto: usize,
    tol: f64,
    checks: Vec<NamedVerdict>,
    notes: Vec<String>,
}

fn finish_round(state: &mut GameState, d: Draft, nf: &NSets) -> Result<()> {
    let cfg = state.config.clone();
    let m = d.m;
    let prev = state.rounds.last();
    let n_prev = prev.map_or(0, |p| p.n);
    let mut checks = d.checks;
    let mut notes = d.notes;

    let n = (n_prev + m - 1).max(d.certificate.l).max(d.k_sets.len()).max(1);
    let mut k_sets = d.k_sets;
    k_sets.resize(n, SplitSet::default());
    let all_pts = k_sets.iter().fold(FinitePointSet::empty(), |acc, s| acc.union(&s.union()));

    // w_m: the strict bounds collected as `lt`, the certificate radius as `le`.
    let mut lt: Option<Q> = None;
    if let Some(p) = prev {
        min_opt(&mut lt, &p.w / q(2));
        let np = state.n_seq()?;
        let upto: Vec<usize> = (1..=n_prev + m - 1).collect();
        for j in 1..m {
            let off = set_minus(&upto, &index_set_a(j, m, &np)?);
            for r in Reading::BOTH {
                let na2 = nf.get(&ScaleLadder::a(j, m, 2), r)?;
                if let Some(dist) = tilde_union(&k_sets, &off, r).set_distance(&na2.outer) {
                    if dist <= Q::zero() {
                        return Err(cert_err(
                            format!("w_{m} separation j={j} {}", tag(r)),
                            format!("Ñ(f_{m},a_{j}^{{{m},2}}) meets K̃ off A_{j}^{m}"),
                        ));
                    }
                    min_opt(&mut lt, dist);
                }
            }
        }
    }
    if let Some(g) = all_pts.min_gap() {
        min_opt(&mut lt, g / q(2));
    }
    let lt = lt.unwrap_or_else(|| q(1));
    let le = min_q(&d.certificate.r, &qr(1, 4));
    let w = dyadic_below(&le, &lt, cfg.floor)
        .ok_or_else(|| Error::Resource(format!("round {m}: w_{m} would fall below {:e}", cfg.floor)))?;

    let bump_idx: Vec<usize> = (1..=d.bump_upto).collect();
    let pick = |r: Reading| -> Result<FinitePointSet> {
        let mut pts = Vec::new();
        for &i in &bump_idx {
            pts.extend(k_sets[i - 1].get(r).points().iter().cloned());
        }
        FinitePointSet::new(pts)
    };
    let spec = BumpSpec::new(pick(Reading::Hat)?, pick(Reading::Check)?, d.hf, to_f64(&w))?;
    let phi = make_bump(&spec)?;
    checks.push(NamedVerdict::new(format!("bump φ_{m} definition"), check_bump_definition(&spec, &phi)?));
    let f = &d.mv.f;
    let g = f.add(&phi);

    // b_m > max{m+2, b_{m-1}} with b_m^{m,2} ≥ ‖g_m′‖.
    let floor_b = max_q(&q(m as i64 + 2), &state.ladder.b.last().cloned().unwrap_or_else(Q::zero));
    let need = from_f64(g.deriv_sup_norm() * (1.0 + 1e-9) + 1e-9) + pow2_neg(2 * m as u32 + 2);
    let b = max_q(&(floor_b.floor() + Q::one()), &need.ceil());
    let mut ladder = state.ladder.clone();
    ladder.push_b(b.clone())?;

    let mut ns: Vec<usize> = state.rounds.iter().map(|r| r.n).collect();
    ns.push(n);
    let n_seq = IndexSeq::new(ns)?;
    let ng = NSets::new(&g, d.tol);
    let all: Vec<usize> = (1..=n).collect();
    let mut eps: Option<Q> = None;
    for j in 1..=m {
        let a_idx = index_set_a(j, m, &n_seq)?;
        let off = set_minus(&all, &a_idx);
        for r in Reading::BOTH {
            let t = tag(r);
            let na3 = ng.get(&ScaleLadder::a(j, m, 3), r)?;
            let nb2 = ng.get(&ladder.b(j, m, 2)?, r)?;
            let u = tilde_union(&k_sets, &a_idx, r);
            let v = tilde_union(&k_sets, &off, r);
            let c1 = subset_within(&na3.outer, &u, &w);
            checks.push(NamedVerdict::new(
                format!("Claim g_m (1) j={j} {t}"),
                graded(c1.is_some(), subset_within(&na3.inner, &u, &w).is_some(), format!("Ñ(g_{m},a_{j}^{{{m},3}}) ⊄ ⋃B(K̃,w)")),
            ));
            checks.push(NamedVerdict::new(
                format!("Claim g_m (2) j={j} {t}"),
                graded(u.is_subset(&nb2.inner), u.is_subset(&nb2.outer), format!("⋃K̃ ⊄ Ñ(g_{m},b_{j}^{{{m},2}})")),
            ));
            let d_out = na3.outer.set_distance(&v);
            let d_in = na3.inner.set_distance(&v);
            checks.push(NamedVerdict::new(
                format!("Claim g_m (3) j={j} {t}"),
                graded(
                    d_out.as_ref().is_none_or(|x| x > &w),
                    d_in.as_ref().is_none_or(|x| x > &w),
                    format!("Ñ(g_{m},a_{j}^{{{m},3}}) meets ⋃B̄(K̃,w) off A_{j}^{m}"),
                ),
            ));
            if let Some(c) = c1 {
                min_opt(&mut eps, c);
            }
            if let Some(x) = d_out {
                min_opt(&mut eps, x - &w);
            }
        }
    }
    if let Some(bad) = first_failure(&checks) {
        return Err(cert_err(bad.name.clone(), format!("{:?}", bad.verdict)));
    }
    let eps = eps.unwrap_or_else(|| w.clone()) / q(2);

    // ‖g - f‖ ≤ h plus the rounding of the sum.
    let h = from_f64(d.hf);
    let slack = from_f64((f.sup_norm() + f.deriv_sup_norm() + d.hf + 1.0) * 2f64.powi(-50));
    let mut beta = &d.mv.alpha - &h - slack;
    for j in 1..=m {
        let (a4, a3) = (ScaleLadder::a(j, m, 4), ScaleLadder::a(j, m, 3));
        let (b2, b3) = (ladder.b(j, m, 2)?, ladder.b(j, m, 3)?);
        let ga = window(&a4)? - window(&a3)?;
        let gb = window(&b2)? - window(&b3)?;
        beta = min_q(&beta, &continuity_delta(&a4, &a3, &min_q(&eps, &(ga / q(2))))?);
        beta = min_q(&beta, &continuity_delta(&b2, &b3, &min_q(&w, &(gb / q(2))))?);
    }
    if beta <= Q::zero() {
        return Err(cert_err(format!("Claim beta_{m}"), "β would not be positive"));
    }

    let mut record = RoundRecord {
        m,
        f: f.clone(),
        alpha: d.mv.alpha.clone(),
        h,
        mu: d.mu,
        zeta: d.zeta,
        l_sets: d.l_sets,
        k_sets,
        certificate: d.certificate,
        n,
        w,
        g: g.clone(),
        b,
        eps,
        beta: beta.clone(),
        enclosure_tol: d.tol,
        checks: Vec::new(),
        notes: Vec::new(),
    };
    let star = check_star(&record, &g, &ladder, &n_seq, d.tol)?;
    checks.extend(star.into_iter().map(|c| NamedVerdict::new(format!("g_{m}: {}", c.name), c.verdict)));
    for s in 0..cfg.star_samples {
        match sample_in_ball(&g, &beta, 0x5eed ^ ((m as u64) << 16) ^ s as u64) {
            Some(fs) => {
                let star = check_star(&record, &fs, &ladder, &n_seq, d.tol)?;
                checks.extend(star.into_iter().map(|c| NamedVerdict::new(format!("sample {s}: {}", c.name), c.verdict)));
            }
            None => notes.push(format!("sample {s} skipped: no double-precision function differs from g_{m} by less than β_{m}")),
        }
    }
    if let Some(bad) = checks.iter().find(|c| c.verdict.is_fail()) {
        return Err(cert_err(bad.name.clone(), format!("{:?}", bad.verdict)));
    }
    record.checks = checks;
    record.notes = notes;
    state.ladder = ladder;
    state.rounds.push(record);
    Ok(())
}
