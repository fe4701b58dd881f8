//! Playing `M` rounds and verifying the limit object.

use serde::{Deserialize, Serialize};

use super::player::PlayerOne;
use super::star::check_star;
use super::strategy::{round_m, round_one};
use super::{GameConfig, GameState, NamedVerdict, Oracle, SplitSet};
use crate::bump::{make_bump, BumpSpec};
use crate::enclosure::n_set_enclosure;
use crate::error::{Error, Result};
use crate::indexcomb::{check_y_k, index_set_a, DeltaSeq, IndexSeq, ScaleLadder, Verdict};
use crate::intervalsets::{hausdorff, subset_within, FinitePointSet, IntervalSet};
use crate::nsets::{Reading, Variant};
use crate::rational::{fmt_q, max_q, q, to_f64, Q};
use crate::realfn::Function;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundFailure {
    pub round: usize,
    pub kind: String,
    pub error: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameReport {
    pub rounds_requested: usize,
    pub player: PlayerOne,
    pub state: GameState,
    /// The round that could not be completed, if any.
    pub failure: Option<RoundFailure>,
    pub monotone: Vec<NamedVerdict>,
    /// Limit checks (i)–(iv); empty unless every round completed.
    pub limit: Vec<NamedVerdict>,
}

impl GameReport {
    /// Every round played and every recorded verdict passes.
    pub fn passed(&self) -> bool {
        self.failure.is_none()
            && self.state.rounds.iter().flat_map(|r| &r.checks).all(|c| c.verdict.is_pass())
            && self.monotone.iter().chain(&self.limit).all(|c| c.verdict.is_pass())
    }
}

/// Plays up to `rounds` rounds. A ball-rule violation by Player I is an
/// error; any other failure ends the game early and is recorded.
pub fn run_game(player: &PlayerOne, oracles: Vec<Oracle>, rounds: usize, config: GameConfig) -> Result<GameReport> {
    if rounds == 0 {
        return Err(Error::Argument("a game needs at least one round".into()));
    }
    let mut state = GameState::new(config, oracles);
    state.oracle(1)?;
    let mut failure = None;
    for m in 1..=rounds {
        let prev = state.rounds.last().map(|r| (&r.g, &r.beta));
        let mv = player.next_move(m, prev)?;
        let res = if m == 1 { round_one(&mut state, &mv) } else { round_m(&mut state, &mv) };
        match res {
            Ok(()) => {}
            Err(e @ Error::Rule(_)) => return Err(e),
            Err(e) => {
                failure = Some(RoundFailure { round: m, kind: e.kind().into(), error: e.to_string() });
                break;
            }
        }
    }
    let monotone = monotone_checks(&state);
    let limit = if failure.is_none() { limit_checks(&state)? } else { Vec::new() };
    Ok(GameReport { rounds_requested: rounds, player: player.clone(), state, failure, monotone, limit })
}

fn pass_if(ok: bool, name: String, witness: String) -> NamedVerdict {
    NamedVerdict::new(name, if ok { Verdict::Pass } else { Verdict::Fail { witness } })
}

/// `w_m < w_{m-1}/2`, `n_m ≥ n_{m-1}+m-1`, `b_m > max{m+2, b_{m-1}}`,
/// `β_m ≤ α_m - h_m`, and disjointness of the balls `B̄(x, w_m)`.
pub fn monotone_checks(state: &GameState) -> Vec<NamedVerdict> {
    let mut out = Vec::new();
    for (i, r) in state.rounds.iter().enumerate() {
        let m = r.m;
        if m != i + 1 {
            out.push(pass_if(false, "round indices".into(), format!("record {i} has m = {m}")));
        }
        let (w_prev, n_prev, b_prev) = match i.checked_sub(1).map(|k| &state.rounds[k]) {
            Some(p) => (Some(&p.w), p.n, p.b.clone()),
            None => (None, 0, Q::from_integer(0.into())),
        };
        if let Some(wp) = w_prev {
            out.push(pass_if(r.w < (wp / q(2)), format!("w_{m} < w_{}/2", m - 1), fmt_q(&r.w)));
        }
        out.push(pass_if(r.n + 1 >= n_prev + m, format!("n_{m} ≥ n_{}+{}", m - 1, m - 1), r.n.to_string()));
        let bmin = max_q(&q(m as i64 + 2), &b_prev);
        out.push(pass_if(r.b > bmin, format!("b_{m} > max{{{},b_{}}}", m + 2, m - 1), fmt_q(&r.b)));
        out.push(pass_if(r.beta <= &r.alpha - &r.h, format!("β_{m} ≤ α_{m} - h_{m}"), fmt_q(&r.beta)));
        let pts = r.k_sets.iter().take(r.n).fold(FinitePointSet::empty(), |a, s| a.union(&s.union()));
        let ok = pts.min_gap().is_none_or(|g| q(2) * &r.w < g);
        out.push(pass_if(ok, format!("balls B̄(x,w_{m}) disjoint"), "two points within 2w".into()));
    }
    out
}

fn k_union(s: &SplitSet) -> IntervalSet {
    s.union().to_interval_set()
}

/// Limit checks with `K_n = K_n^M`:
/// (i) `d(K_n, K_n^m) ≤ 2w_m` and `d(K_n^{m'}, K_n^m) < 2w_m` for `m < m'`;
/// (ii) for `f = g_M`, `N(f,a_j) ⊂ ⋃_{A_j^m} B(K_n, 3w_m)` and `⋃_{A_j^m} K_n ⊂ B(N(f,b_j), 3w_m)`;
/// (iii) the `𝒴_0` membership with `δ_m = 4w_m + 2w_{m-1}` and `w_0 = 0`;
/// (iv) `𝐊` lies in every `Ū(𝐊^m, n_m, 2w_m)` and the oracle sets.
pub fn limit_checks(state: &GameState) -> Result<Vec<NamedVerdict>> {
    let mut out = Vec::new();
    let Some(last) = state.rounds.last() else {
        return Ok(out);
    };
    let big_m = state.rounds.len();
    let limit: Vec<IntervalSet> = last.k_sets.iter().take(last.n).map(k_union).collect();
    for r in &state.rounds {
        let m = r.m;
        let two_w = q(2) * &r.w;
        let mut worst = Q::from_integer(0.into());
        for n in 1..=r.n {
            worst = max_q(&worst, &hausdorff(&limit[n - 1], &k_union(&r.k_sets[n - 1])));
        }
        out.push(pass_if(worst <= two_w, format!("(i) d(K_n,K_n^{m}) ≤ 2w_{m}"), fmt_q(&worst)));
        for later in &state.rounds[m..] {
            let mut worst = Q::from_integer(0.into());
            for n in 1..=r.n {
                worst = max_q(&worst, &hausdorff(&k_union(&later.k_sets[n - 1]), &k_union(&r.k_sets[n - 1])));
            }
            out.push(pass_if(worst < two_w, format!("(i) d(K_n^{},K_n^{m}) < 2w_{m}", later.m), fmt_q(&worst)));
        }
    }

    let f = Function::C1(last.g.clone());
    let n_seq = IndexSeq::new(state.rounds.iter().map(|r| r.n).collect())?;
    let tol = last.enclosure_tol;
    for j in 1..=big_m {
        let na = n_set_enclosure(&f, &ScaleLadder::a_base(j), Variant::Full, tol)?;
        let nb = n_set_enclosure(&f, state.ladder.b_base(j)?, Variant::Full, tol)?;
        for r in &state.rounds[j - 1..] {
            let m = r.m;
            let three_w = q(3) * &r.w;
            let idx = index_set_a(j, m, &n_seq)?;
            let u = idx.iter().fold(IntervalSet::empty(), |acc, &n| acc.union(&limit[n - 1]));
            let first = if subset_within(&na.outer, &u, &three_w).is_some() {
                Verdict::Pass
            } else if subset_within(&na.inner, &u, &three_w).is_some() {
                Verdict::Undecided { witness: "N(f,a_j) inclusion undecided".into() }
            } else {
                Verdict::Fail { witness: "N(f,a_j) ⊄ ⋃B(K_n,3w)".into() }
            };
            out.push(NamedVerdict::new(format!("(ii) N(g_{big_m},a_{j}) ⊂ ⋃B(K_n,3w_{m})"), first));
            let second = if subset_within(&u, &nb.inner, &three_w).is_some() {
                Verdict::Pass
            } else if subset_within(&u, &nb.outer, &three_w).is_some() {
                Verdict::Undecided { witness: "K_n inclusion undecided".into() }
            } else {
                Verdict::Fail { witness: "⋃K_n ⊄ B(N(f,b_j),3w)".into() }
            };
            out.push(NamedVerdict::new(format!("(ii) ⋃K_n ⊂ B(N(g_{big_m},b_{j}),3w_{m})"), second));
        }
    }

    let mut deltas = Vec::with_capacity(big_m);
    for (i, r) in state.rounds.iter().enumerate() {
        let w_prev = if i == 0 { Q::from_integer(0.into()) } else { state.rounds[i - 1].w.clone() };
        deltas.push(q(4) * &r.w + q(2) * w_prev);
    }
    let a: Vec<Q> = (1..=big_m).map(ScaleLadder::a_base).collect();
    let b = state.ladder.b.clone();
    let v = check_y_k(&limit, &f, &n_seq, &DeltaSeq::new(deltas)?, &a, &b, 0, big_m, tol)?;
    out.push(NamedVerdict::new("(iii) (K, g_M) ∈ 𝒴_0 with δ_m = 4w_m + 2w_{m-1}", v));

    let limit_sets: Vec<FinitePointSet> = last.k_sets.iter().take(last.n).map(|s| s.union()).collect();
    for r in &state.rounds {
        let m = r.m;
        let ok_cert = r.n >= r.certificate.l && r.w <= r.certificate.r;
        out.push(pass_if(ok_cert, format!("(iv) Ū(K^{m},n_{m},2w_{m}) ⊂ Ū(K^{m},l,2r)"), format!("l={}, r={}", r.certificate.l, fmt_q(&r.certificate.r))));
        let oracle = state.oracle(m)?;
        out.push(pass_if(
            oracle.contains(&limit_sets, r.certificate.l),
            format!("(iv) K ∈ 𝒰_{m} ({})", oracle.label()),
            "limit prefix leaves the oracle's open set".into(),
        ));
    }
    Ok(out)
}

/// Recomputes every round of a saved state: the bump and `g_m`, `(★_m)` for
/// `g_m`, the ladder chains, the monotone data and the limit checks.
pub fn verify_game(state: &GameState) -> Result<Vec<NamedVerdict>> {
    let mut out = Vec::new();
    let mut ns = Vec::new();
    for (i, r) in state.rounds.iter().enumerate() {
        let m = r.m;
        ns.push(r.n);
        let upto = if i == 0 { 1 } else { state.rounds[i - 1].n + m - 1 };
        let pick = |rd: Reading| -> Result<FinitePointSet> {
            FinitePointSet::new(r.k_sets.iter().take(upto).flat_map(|s| s.get(rd).points().to_vec()).collect())
        };
        let spec = BumpSpec::new(pick(Reading::Hat)?, pick(Reading::Check)?, to_f64(&r.h), to_f64(&r.w))?;
        let g = r.f.add(&make_bump(&spec)?);
        out.push(pass_if(g == r.g, format!("g_{m} = f_{m} + φ_{m}"), "recomputed g differs".into()));
        let n_seq = IndexSeq::new(ns.clone())?;
        for c in check_star(r, &r.g, &state.ladder, &n_seq, r.enclosure_tol)? {
            out.push(NamedVerdict::new(format!("g_{m}: {}", c.name), c.verdict));
        }
    }
    let chains = state.ladder.check_chains(state.rounds.len());
    out.push(pass_if(chains.is_ok(), "ladder chains".into(), format!("{chains:?}")));
    out.extend(monotone_checks(state));
    out.extend(limit_checks(state)?);
    Ok(out)
}
