//! The exception sets `N⁺, N₊, N⁻, N₋` and their unions, exactly for PWL input.
//!
//! `x ∈ N⁺(f,a)` iff `max_{y∈[x,x+δ]} φ(y) ≤ φ(x)` with `φ(y) = f(y) - a·y` and
//! `δ = 2^-a`. The other three sets reduce to `N⁺` through negation and the
//! reflection `R(x) = 1-x`:
//! `N₊(f,a) = N⁺(-f,a)`, `N⁻(f,a) = R N₊(f∘R,a)`, `N₋(f,a) = R N⁺(f∘R,a)`.

use std::collections::VecDeque;

use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::enclosure::{self, NSetEnclosure};
use crate::error::{arg, Result};
use crate::intervalsets::IntervalSet;
use crate::rational::{from_f64, max_q, min_q, pow2_neg, q, to_f64, Q};
use crate::realfn::{Function, PiecewiseLinear, PwlFunction};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// `N⁺`: forward window, `f(y)-f(x) ≤ a(y-x)`.
    PlusUpper,
    /// `N₊`: forward window, `f(y)-f(x) ≥ -a(y-x)`.
    PlusLower,
    /// `N⁻`: backward window, `f(y)-f(x) ≥ a(y-x)`.
    MinusUpper,
    /// `N₋`: backward window, `f(y)-f(x) ≤ -a(y-x)`.
    MinusLower,
    /// `N̂ = N⁺ ∪ N₋`.
    Hat,
    /// `Ň = N₊ ∪ N⁻`.
    Check,
    /// `N = N̂ ∪ Ň`.
    Full,
}

impl Variant {
    pub const BASIC: [Variant; 4] = [Variant::PlusUpper, Variant::PlusLower, Variant::MinusUpper, Variant::MinusLower];
    pub const ALL: [Variant; 7] = [
        Variant::PlusUpper,
        Variant::PlusLower,
        Variant::MinusUpper,
        Variant::MinusLower,
        Variant::Hat,
        Variant::Check,
        Variant::Full,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::PlusUpper => "plus_upper",
            Variant::PlusLower => "plus_lower",
            Variant::MinusUpper => "minus_upper",
            Variant::MinusLower => "minus_lower",
            Variant::Hat => "hat",
            Variant::Check => "check",
            Variant::Full => "full",
        }
    }

    pub fn parse(s: &str) -> Option<Variant> {
        Variant::ALL.into_iter().find(|v| v.name() == s)
    }

    /// The basic variants whose union this is.
    pub fn parts(self) -> &'static [Variant] {
        match self {
            Variant::PlusUpper => &[Variant::PlusUpper],
            Variant::PlusLower => &[Variant::PlusLower],
            Variant::MinusUpper => &[Variant::MinusUpper],
            Variant::MinusLower => &[Variant::MinusLower],
            Variant::Hat => &[Variant::PlusUpper, Variant::MinusLower],
            Variant::Check => &[Variant::PlusLower, Variant::MinusUpper],
            Variant::Full => &Variant::BASIC,
        }
    }
}

/// The two readings of `Ñ`: every tilde statement holds with `N̂` and with `Ň`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reading {
    Hat,
    Check,
}

impl Reading {
    pub const BOTH: [Reading; 2] = [Reading::Hat, Reading::Check];

    pub fn variant(self) -> Variant {
        match self {
            Reading::Hat => Variant::Hat,
            Reading::Check => Variant::Check,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NSetRequest {
    pub f: Function,
    pub a: Q,
    pub variant: Variant,
}

/// Window length `2^-a`: exact for integer `a`, otherwise `2^-⌊a⌋` times the
/// correctly rounded double `exp2(-{a})`, taken as an exact rational so large
/// scales never underflow.
pub fn window(a: &Q) -> Result<Q> {
    if !a.is_positive() {
        return arg("scale a must be positive");
    }
    let k = a.floor();
    let e = k.to_integer().to_u32().ok_or_else(|| crate::Error::Argument("scale a too large".into()))?;
    let frac = a - &k;
    if frac.is_zero() {
        return Ok(pow2_neg(e));
    }
    Ok(pow2_neg(e) * from_f64((-to_f64(&frac)).exp2()))
}

/// `M(x) = max_{y∈[x,x+δ]} φ(y)` on `[0, 1-δ]` for `φ` defined on `[0,1]`.
pub fn sliding_window_max(phi: &PiecewiseLinear, delta: &Q) -> Result<PiecewiseLinear> {
    check_unit_domain(phi)?;
    if !delta.is_positive() || *delta > q(1) {
        return arg("window length must lie in (0,1]");
    }
    let mut xs: Vec<Q> = Vec::new();
    let mut ys: Vec<Q> = Vec::new();
    for cell in window_cells(phi, delta) {
        let lines = cell.lines();
        let mut pts = vec![cell.u.clone(), cell.v.clone()];
        for i in 0..lines.len() {
            for j in i + 1..lines.len() {
                if let Some(x) = crossing(&lines[i], &lines[j]) {
                    if x > cell.u && x < cell.v {
                        pts.push(x);
                    }
                }
            }
        }
        pts.sort();
        pts.dedup();
        for x in pts {
            if xs.last() == Some(&x) {
                continue;
            }
            let y = lines.iter().map(|l| l.at(&x)).max().unwrap();
            xs.push(x);
            ys.push(y);
        }
    }
    Ok(PiecewiseLinear::from_parts(xs, ys))
}

fn check_unit_domain(phi: &PiecewiseLinear) -> Result<()> {
    let (lo, hi) = phi.domain();
    if !lo.is_zero() || *hi != q(1) {
        return arg("function must be defined on [0,1]");
    }
    Ok(())
}

/// `y = s·x + c`.
#[derive(Clone, Debug)]
struct Line {
    s: Q,
    c: Q,
}

impl Line {
    fn at(&self, x: &Q) -> Q {
        &self.s * x + &self.c
    }

    fn through(x0: &Q, y0: &Q, x1: &Q, y1: &Q) -> Line {
        let s = (y1 - y0) / (x1 - x0);
        let c = y0 - &s * x0;
        Line { s, c }
    }
}

fn crossing(a: &Line, b: &Line) -> Option<Q> {
    if a.s == b.s {
        return None;
    }
    Some((&b.c - &a.c) / (&a.s - &b.s))
}

/// A cell `[u,v]` of `[0,1-δ]` on which neither `x` nor `x+δ` crosses a
/// breakpoint, so that `M = max(φ(x), φ(x+δ), inner)` with `inner` the
/// largest breakpoint value strictly inside the window.
struct WindowCell {
    u: Q,
    v: Q,
    left: Line,
    right: Line,
    inner: Option<Q>,
}

impl WindowCell {
    fn lines(&self) -> Vec<Line> {
        let mut v = vec![self.left.clone(), self.right.clone()];
        if let Some(c) = &self.inner {
            v.push(Line { s: Q::zero(), c: c.clone() });
        }
        v
    }
}

fn line_on(phi: &PiecewiseLinear, lo: &Q, hi: &Q) -> Line {
    let ya = phi.eval(lo).unwrap();
    let yb = phi.eval(hi).unwrap();
    Line::through(lo, &ya, hi, &yb)
}

fn window_cells(phi: &PiecewiseLinear, delta: &Q) -> Vec<WindowCell> {
    let end = q(1) - delta;
    let ps = phi.breakpoints();
    let vs = phi.values();
    let mut ev: Vec<Q> = vec![q(0), end.clone()];
    for p in ps {
        if *p <= end {
            ev.push(p.clone());
        }
        let s = p - delta;
        if !s.is_negative() {
            ev.push(s);
        }
    }
    ev.sort();
    ev.dedup();
    if ev.len() == 1 {
        // δ = 1: a single degenerate cell at 0
        let y0 = vs[0].clone();
        let y1 = vs.last().unwrap().clone();
        let inner = vs[1..vs.len() - 1].iter().max().cloned();
        return vec![WindowCell {
            u: q(0),
            v: q(0),
            left: Line { s: Q::zero(), c: y0 },
            right: Line { s: Q::zero(), c: y1 },
            inner,
        }];
    }
    // Monotone deque of breakpoint indices with decreasing values.
    let mut dq: VecDeque<usize> = VecDeque::new();
    let mut next = 0usize;
    let mut cells = Vec::with_capacity(ev.len());
    for w in ev.windows(2) {
        let (u, v) = (&w[0], &w[1]);
        // Interior breakpoints for x in (u,v) are those with v ≤ p ≤ u+δ.
        let reach = u + delta;
        while next < ps.len() && ps[next] <= reach {
            while dq.back().is_some_and(|&j| vs[j] <= vs[next]) {
                dq.pop_back();
            }
            dq.push_back(next);
            next += 1;
        }
        while dq.front().is_some_and(|&j| ps[j] < *v) {
            dq.pop_front();
        }
        let inner = dq.front().map(|&j| vs[j].clone());
        let left = line_on(phi, u, v);
        // right(x) = φ(x+δ), as a line in x
        let right = Line::through(u, &phi.eval(&(u + delta)).unwrap(), v, &phi.eval(&(v + delta)).unwrap());
        cells.push(WindowCell { u: u.clone(), v: v.clone(), left, right, inner });
    }
    cells
}

/// `{x ∈ [0,1-δ] : max_{[x,x+δ]} φ ≤ φ(x)}` for `φ` on `[0,1]`.
pub(crate) fn window_max_zero_set(phi: &PiecewiseLinear, delta: &Q) -> IntervalSet {
    let mut out = Vec::new();
    for cell in window_cells(phi, delta) {
        // x qualifies iff right(x) ≤ left(x) and inner ≤ left(x): two half-lines.
        let (mut lo, mut hi) = (cell.u.clone(), cell.v.clone());
        let mut constraints = vec![(&cell.right.s - &cell.left.s, &cell.right.c - &cell.left.c)];
        if let Some(c) = &cell.inner {
            constraints.push((-cell.left.s.clone(), c - &cell.left.c));
        }
        let mut empty = false;
        for (s, c) in constraints {
            // s·x + c ≤ 0
            if s.is_zero() {
                if c.is_positive() {
                    empty = true;
                }
            } else {
                let root = -&c / &s;
                if s.is_positive() {
                    hi = min_q(&hi, &root);
                } else {
                    lo = max_q(&lo, &root);
                }
            }
        }
        if !empty && lo <= hi {
            out.push((lo, hi));
        }
    }
    IntervalSet::clipped(out)
}

/// `N⁺(f,a)` for `f` on `[0,1]`.
fn plus_upper(f: &PwlFunction, a: &Q, delta: &Q) -> IntervalSet {
    window_max_zero_set(&f.minus_linear(a), delta)
}

/// Exact `N`-set of a PWL function.
pub fn n_set_exact(f: &PwlFunction, a: &Q, variant: Variant) -> Result<IntervalSet> {
    let delta = window(a)?;
    let mut out = IntervalSet::empty();
    for part in variant.parts() {
        let s = match part {
            Variant::PlusUpper => plus_upper(f, a, &delta),
            Variant::PlusLower => plus_upper(&f.negate(), a, &delta),
            Variant::MinusUpper => plus_upper(&f.reflect().negate(), a, &delta).reflect(),
            Variant::MinusLower => plus_upper(&f.reflect(), a, &delta).reflect(),
            _ => unreachable!(),
        };
        out = out.union(&s);
    }
    Ok(out)
}

/// `N`-set of either class: exact for PWL (tolerance 0), certified enclosure for C¹.
pub fn n_set(req: &NSetRequest, tol: f64) -> Result<NSetEnclosure> {
    match &req.f {
        Function::Pwl(f) => {
            let s = n_set_exact(f, &req.a, req.variant)?;
            Ok(NSetEnclosure { inner: s.clone(), outer: s, tolerance: 0.0 })
        }
        Function::C1(_) => enclosure::n_set_enclosure(&req.f, &req.a, req.variant, tol),
    }
}

/// `⋃_{a ∈ list} N(f,a)`.
pub fn n_full_truncated(f: &PwlFunction, a_list: &[Q]) -> Result<IntervalSet> {
    if a_list.windows(2).any(|w| w[0] >= w[1]) {
        return arg("scale list must be strictly increasing");
    }
    let mut out = IntervalSet::empty();
    for a in a_list {
        out = out.union(&n_set_exact(f, a, Variant::Full)?);
    }
    Ok(out)
}

/// Checks the defining inequality of a basic variant at one point, directly
/// and without the symmetry reductions.
pub fn satisfies_definition(f: &PwlFunction, a: &Q, variant: Variant, x: &Q) -> Result<bool> {
    let delta = window(a)?;
    let one = q(1);
    let (lo, hi) = match variant {
        Variant::PlusUpper | Variant::PlusLower => (x.clone(), x + &delta),
        Variant::MinusUpper | Variant::MinusLower => (x - &delta, x.clone()),
        _ => {
            for p in variant.parts() {
                if satisfies_definition(f, a, *p, x)? {
                    return Ok(true);
                }
            }
            return Ok(false);
        }
    };
    if lo.is_negative() || hi > one {
        return Ok(false);
    }
    let fx = f.eval(x)?;
    // The quantity is linear in y between breakpoints, so window endpoints and
    // interior breakpoints suffice.
    let mut ys = vec![lo.clone(), hi.clone()];
    ys.extend(f.breakpoints().iter().filter(|p| **p > lo && **p < hi).cloned());
    for y in ys {
        let df = f.eval(&y)? - &fx;
        let dy = &y - x;
        let ok = match variant {
            Variant::PlusUpper => df <= a * &dy,
            Variant::PlusLower => df >= -(a * &dy),
            Variant::MinusUpper => df >= a * &dy,
            Variant::MinusLower => df <= -(a * &dy),
            _ => unreachable!(),
        };
        if !ok {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `δ = ε(b-a)/4`, strictly below the `ε(b-a)/2` bound, for `0 < ε < 2^-a - 2^-b`.
pub fn continuity_delta(a: &Q, b: &Q, eps: &Q) -> Result<Q> {
    if !a.is_positive() || a >= b {
        return arg("continuity_delta needs 0 < a < b");
    }
    let gap = window(a)? - window(b)?;
    if !eps.is_positive() || *eps >= gap {
        return arg(format!("ε must lie in (0, 2^-a - 2^-b) = (0, {})", to_f64(&gap)));
    }
    Ok(eps * (b - a) / q(4))
}
