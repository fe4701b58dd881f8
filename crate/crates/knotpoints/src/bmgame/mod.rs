//! Banach–Mazur game in `C(I)`: Player I adversaries, dense open oracles
//! standing in for the sets `𝒰_m`, and Player II's strategy, which keeps the
//! invariant `(★_m)` tying the `N`-sets of every function in its ball to a
//! finite approximating sequence `𝐊^m`.
//!
//! Every "small enough" choice of the strategy is a computed margin, and every
//! inclusion it relies on is certified by exact interval arithmetic on the
//! finite sets together with `N`-set enclosures. When a certification fails,
//! or a net would exceed the configured size, the round stops with a
//! structured error instead of continuing on an unproved premise.

mod cover;
mod oracle;
mod play;
mod player;
mod star;
mod strategy;

use std::cell::RefCell;
use std::collections::HashMap;
use std::rc::Rc;

use serde::{Deserialize, Serialize};

use crate::enclosure::{n_set_enclosure, NSetEnclosure};
use crate::error::{Error, Result};
use crate::indexcomb::{IndexSeq, ScaleLadder, Verdict};
use crate::intervalsets::{FinitePointSet, IntervalSet};
use crate::nsets::{Reading, Variant};
use crate::rational::Q;
use crate::realfn::{C1Function, Function};

pub use cover::{disjointify, greedy_cover};
pub use oracle::{Oracle, OracleAnswer};
pub use play::{run_game, verify_game, GameReport, RoundFailure};
pub use player::{check_ball_rule, Move, PlayerOne};
pub use star::{check_star, sample_in_ball};
pub use strategy::{round_m, round_one, MuBound};

/// A finite set split as `K = K̂ ⊔ Ǩ`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSet {
    pub hat: FinitePointSet,
    pub check: FinitePointSet,
}

impl SplitSet {
    pub fn new(hat: FinitePointSet, check: FinitePointSet) -> Self {
        SplitSet { hat, check }
    }

    pub fn get(&self, reading: Reading) -> &FinitePointSet {
        match reading {
            Reading::Hat => &self.hat,
            Reading::Check => &self.check,
        }
    }

    pub fn union(&self) -> FinitePointSet {
        self.hat.union(&self.check)
    }
}

/// `⋃_{n ∈ idx} K̃_n` for 1-based indices; indices past the prefix are empty sets.
pub fn tilde_union(sets: &[SplitSet], idx: &[usize], reading: Reading) -> IntervalSet {
    let mut pts: Vec<Q> = Vec::new();
    for &n in idx {
        if let Some(s) = sets.get(n - 1) {
            pts.extend(s.get(reading).points().iter().cloned());
        }
    }
    points_set(pts)
}

/// `⋃_{n ∈ idx} K_n` with both parts.
pub fn plain_union(sets: &[SplitSet], idx: &[usize]) -> IntervalSet {
    tilde_union(sets, idx, Reading::Hat).union(&tilde_union(sets, idx, Reading::Check))
}

pub(crate) fn points_set(pts: Vec<Q>) -> IntervalSet {
    FinitePointSet::new(pts).map(|p| p.to_interval_set()).unwrap_or_default()
}

/// Resource caps and numeric floors for a game run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameConfig {
    /// Upper bound on the enclosure tolerance; rounds tighten it to `μ_m/64`.
    pub enclosure_tol: f64,
    /// Largest finite net any construction may build.
    pub max_net_points: usize,
    /// Geometric shrinking stops here.
    pub floor: f64,
    /// Retries with a halved perturbation budget before giving up.
    pub max_retries: usize,
    /// Extra functions sampled from `B(g_m, β_m)` for the `(★_m)` check.
    pub star_samples: usize,
}

impl Default for GameConfig {
    fn default() -> Self {
        GameConfig { enclosure_tol: 1e-6, max_net_points: 2_000_000, floor: 1e-12, max_retries: 8, star_samples: 2 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedVerdict {
    pub name: String,
    #[serde(flatten)]
    pub verdict: Verdict,
}

impl NamedVerdict {
    pub fn new(name: impl Into<String>, verdict: Verdict) -> Self {
        NamedVerdict { name: name.into(), verdict }
    }
}

/// The oracle's promise `Ū(𝐊, l, 2r) ⊂ 𝒰_m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub l: usize,
    #[serde(with = "crate::rational::serde_q")]
    pub r: Q,
}

/// Everything Player II builds in round `m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub m: usize,
    pub f: C1Function,
    #[serde(with = "crate::rational::serde_q")]
    pub alpha: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub h: Q,
    pub mu: f64,
    #[serde(with = "crate::rational::serde_q::option")]
    pub zeta: Option<Q>,
    pub l_sets: Vec<SplitSet>,
    pub k_sets: Vec<SplitSet>,
    pub certificate: Certificate,
    pub n: usize,
    #[serde(with = "crate::rational::serde_q")]
    pub w: Q,
    pub g: C1Function,
    #[serde(with = "crate::rational::serde_q")]
    pub b: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub eps: Q,
    #[serde(with = "crate::rational::serde_q")]
    pub beta: Q,
    pub enclosure_tol: f64,
    pub checks: Vec<NamedVerdict>,
    /// Checks that could not be run, with the reason.
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameState {
    pub config: GameConfig,
    pub ladder: ScaleLadder,
    pub oracles: Vec<Oracle>,
    pub rounds: Vec<RoundRecord>,
}

impl GameState {
    pub fn new(config: GameConfig, oracles: Vec<Oracle>) -> Self {
        GameState { config, ladder: ScaleLadder::new(), oracles, rounds: Vec::new() }
    }

    /// `(n_1, …, n_m)` so far.
    pub fn n_seq(&self) -> Result<IndexSeq> {
        IndexSeq::new(self.rounds.iter().map(|r| r.n).collect())
    }

    /// The oracle used in round `m`; the list repeats its last entry.
    pub fn oracle(&self, m: usize) -> Result<&Oracle> {
        self.oracles
            .get(m - 1)
            .or_else(|| self.oracles.last())
            .ok_or_else(|| Error::Argument("no oracle configured".into()))
    }
}

/// Memoised enclosures of `Ñ(f, a)` in one reading.
pub(crate) struct NSets {
    f: Function,
    tol: f64,
    cache: RefCell<HashMap<(Q, Variant), Rc<NSetEnclosure>>>,
}

impl NSets {
    pub(crate) fn new(f: &C1Function, tol: f64) -> Self {
        NSets { f: Function::C1(f.clone()), tol, cache: RefCell::new(HashMap::new()) }
    }

    pub(crate) fn get(&self, a: &Q, reading: Reading) -> Result<Rc<NSetEnclosure>> {
        let key = (a.clone(), reading.variant());
        if let Some(e) = self.cache.borrow().get(&key) {
            return Ok(e.clone());
        }
        let e = Rc::new(n_set_enclosure(&self.f, a, reading.variant(), self.tol)?);
        self.cache.borrow_mut().insert(key, e.clone());
        Ok(e)
    }
}

pub(crate) fn cert_err(claim: impl Into<String>, detail: impl Into<String>) -> Error {
    Error::Certification { claim: claim.into(), detail: detail.into() }
}
