//! Player I: picks a ball `B(f_m, α_m) ⊂ B(g_{m-1}, β_{m-1})`.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{fmt_q, from_f64, q, qr, Q};
use crate::realfn::{random_c1, C1Function};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Move {
    pub f: C1Function,
    #[serde(with = "crate::rational::serde_q")]
    pub alpha: Q,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PlayerOne {
    /// A seeded random C¹ function first, then random perturbations of `g_{m-1}`.
    Random { seed: u64 },
    /// Fixed moves; the game stops with a rule error if one leaves the allowed ball.
    Scripted { moves: Vec<Move> },
}

impl PlayerOne {
    pub fn next_move(&self, m: usize, prev: Option<(&C1Function, &Q)>) -> Result<Move> {
        match self {
            PlayerOne::Scripted { moves } => moves
                .get(m - 1)
                .cloned()
                .ok_or_else(|| Error::Argument(format!("scripted player has no move for round {m}"))),
            PlayerOne::Random { seed } => match prev {
                None => Ok(Move { f: random_c1(*seed, 3, 0.5).scale(0.25), alpha: qr(1, 256) }),
                Some((g, beta)) => Ok(perturb(g, beta, seed.wrapping_add(m as u64))),
            },
        }
    }
}

/// `g + ψ` with `‖ψ‖ ≈ β/4` when doubles can resolve it; otherwise `g` itself,
/// since a perturbation below rounding would break the ball rule.
fn perturb(g: &C1Function, beta: &Q, seed: u64) -> Move {
    let b = crate::rational::to_f64(beta);
    if b > 0.0 {
        let f = g.add(&random_c1(seed, 3, 0.5).scale(b / 4.0));
        let d = measured_distance(&f, g);
        let alpha = (beta - &d) / q(2);
        if alpha > Q::zero() {
            return Move { f, alpha };
        }
    }
    Move { f: g.clone(), alpha: beta / q(2) }
}

/// An upper bound on `‖f - g‖` with relative slack for rounding in the norm.
fn measured_distance(f: &C1Function, g: &C1Function) -> Q {
    if f == g {
        return Q::zero();
    }
    let d = f.add(&g.negate()).sup_norm();
    from_f64(d * (1.0 + 1e-9) + f64::MIN_POSITIVE)
}

/// `B(f, α) ⊂ B(g, β)`, checked as `‖f - g‖ + α ≤ β`.
pub fn check_ball_rule(mv: &Move, g: &C1Function, beta: &Q) -> Result<()> {
    if mv.alpha <= Q::zero() {
        return Err(Error::Rule(format!("α = {} must be positive", fmt_q(&mv.alpha))));
    }
    let d = measured_distance(&mv.f, g);
    if &d + &mv.alpha > *beta {
        return Err(Error::Rule(format!(
            "B(f, {}) is not inside B(g, {}): ‖f - g‖ ≤ {:.3e}",
            fmt_q(&mv.alpha),
            fmt_q(beta),
            crate::rational::to_f64(&d)
        )));
    }
    Ok(())
}
