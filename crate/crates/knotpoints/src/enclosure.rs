//! Certified inner/outer enclosures of `N`-sets for piecewise-cubic functions.
//!
//! Everything reduces to `N⁺` as in the exact path. For `ψ(y) = f(y) - a·y` a
//! cell `X = [x0,x1]` is certified *in* when every `x ∈ X` satisfies
//! `max_{[x,x+δ]} ψ ≤ ψ(x)` and *out* when each `x ∈ X` has a witness `y` in
//! its window with `ψ(y) > ψ(x)`. Undecided cells are bisected down to `tol`
//! and then counted in the outer set only.
//!
//! Bounds come from closed-form cubic extrema evaluated in `f64`; a relative
//! slack of `1e-12` on every comparison absorbs the rounding of those
//! evaluations. The window `δ = 2^-a` is carried as a bracket `[δ_lo, δ_hi]`
//! of doubles, so `a` may be large enough for `δ` to be tiny.

use serde::{Deserialize, Serialize};

use crate::error::{arg, Result};
use crate::intervalsets::IntervalSet;
use crate::nsets::{window, Variant};
use crate::pcw::{PiecewiseCubic, RangeIndex};
use crate::rational::{from_f64, to_f64, Q};
use crate::realfn::Function;

/// No bisection below this width.
pub const MIN_WIDTH: f64 = 1e-12;
pub(crate) const REL_SLACK: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NSetEnclosure {
    pub inner: IntervalSet,
    pub outer: IntervalSet,
    pub tolerance: f64,
}

impl NSetEnclosure {
    pub fn exact(s: IntervalSet) -> Self {
        NSetEnclosure { inner: s.clone(), outer: s, tolerance: 0.0 }
    }

    pub fn is_exact(&self) -> bool {
        self.inner == self.outer
    }

    /// Total length of `outer \ inner`.
    pub fn undecided_length(&self) -> f64 {
        to_f64(&(self.outer.total_length() - self.inner.total_length()))
    }

    pub fn union(&self, other: &NSetEnclosure) -> NSetEnclosure {
        NSetEnclosure {
            inner: self.inner.union(&other.inner),
            outer: self.outer.union(&other.outer),
            tolerance: self.tolerance.max(other.tolerance),
        }
    }

    fn reflect(&self) -> NSetEnclosure {
        NSetEnclosure { inner: self.inner.reflect(), outer: self.outer.reflect(), tolerance: self.tolerance }
    }
}

/// Doubles `lo ≤ x ≤ hi` bracketing a rational.
pub fn bracket(x: &Q) -> (f64, f64) {
    let d = to_f64(x);
    let e = from_f64(d);
    if e == *x {
        (d, d)
    } else if e < *x {
        (d, d.next_up())
    } else {
        (d.next_down(), d)
    }
}

/// Window bracket; a window that underflows is bracketed by `[0, MIN_POSITIVE]`.
pub fn window_bracket(a: &Q) -> Result<(f64, f64)> {
    let w = window(a)?;
    let (lo, hi) = bracket(&w);
    Ok((lo.max(0.0), if hi > 0.0 { hi } else { f64::from_bits(1) }))
}

/// Enclosure of an `N`-set of any function through its piecewise-cubic form.
pub fn n_set_enclosure(f: &Function, a: &Q, variant: Variant, tol: f64) -> Result<NSetEnclosure> {
    n_set_enclosure_pcw(&f.to_pcw(), a, variant, tol)
}

pub fn n_set_enclosure_pcw(p: &PiecewiseCubic, a: &Q, variant: Variant, tol: f64) -> Result<NSetEnclosure> {
    if !(tol > 0.0) {
        return arg("enclosure tolerance must be positive");
    }
    let (dlo, dhi) = window_bracket(a)?;
    let af = to_f64(a);
    let tol = tol.max(MIN_WIDTH);
    let mut acc: Option<NSetEnclosure> = None;
    for part in variant.parts() {
        let e = match part {
            Variant::PlusUpper => plus_upper(p, af, dlo, dhi, tol),
            Variant::PlusLower => plus_upper(&p.negate(), af, dlo, dhi, tol),
            Variant::MinusUpper => plus_upper(&p.reflect().negate(), af, dlo, dhi, tol).reflect(),
            Variant::MinusLower => plus_upper(&p.reflect(), af, dlo, dhi, tol).reflect(),
            _ => unreachable!(),
        };
        acc = Some(match acc {
            None => e,
            Some(prev) => prev.union(&e),
        });
    }
    Ok(acc.unwrap())
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Verdict {
    In,
    Out,
    Undecided,
}

struct Tester<'a> {
    idx: RangeIndex<'a>,
    dlo: f64,
    dhi: f64,
    vslack: f64,
    dslack: f64,
}

impl Tester<'_> {
    fn classify(&self, x0: f64, x1: f64) -> Verdict {
        let w = x1 - x0;
        let top = |y: f64| y.min(1.0);
        // In: ψ decreasing on [x0, x1+η], and the rest of every window stays below ψ(x1).
        let eta = self.dhi.min(w);
        let (_, dmax) = self.idx.deriv_range(x0, top(x1 + eta));
        if dmax < -self.dslack {
            let far = top(x1 + self.dhi);
            let rest_ok = if x1 + eta >= far {
                true
            } else {
                let (_, vmax) = self.idx.value_range(x1 + eta, far);
                vmax <= self.idx.eval(x1) - self.vslack
            };
            if rest_ok {
                return Verdict::In;
            }
        }
        if self.dlo > 0.0 {
            // Out: ψ strictly increasing from each x over a step inside the window.
            let eta = self.dlo.min(w);
            let (dmin, _) = self.idx.deriv_range(x0, top(x1 + eta));
            if dmin > self.dslack && x1 + eta <= 1.0 {
                return Verdict::Out;
            }
            // Out: a window segment shared by all of X rises above max ψ on X.
            let shared_end = top(x0 + self.dlo);
            if x1 < shared_end {
                let (_, common) = self.idx.value_range(x1, shared_end);
                let (_, here) = self.idx.value_range(x0, x1);
                if common - self.vslack > here + self.vslack {
                    return Verdict::Out;
                }
            }
        }
        Verdict::Undecided
    }
}

/// Enclosure of `N⁺` for the function with cells `p`, scale `a`, window in `[dlo,dhi]`.
fn plus_upper(p: &PiecewiseCubic, a: f64, dlo: f64, dhi: f64, tol: f64) -> NSetEnclosure {
    let psi = p.sub_linear(a);
    let idx = RangeIndex::new(&psi);
    let vscale = psi.sup_norm();
    let dscale = psi.deriv_sup_norm();
    let t = Tester { idx, dlo, dhi, vslack: REL_SLACK * (1.0 + vscale), dslack: REL_SLACK * (1.0 + dscale) };
    let inner_end = bracket(&(Q::from_integer(1.into()) - from_f64(dhi))).0.max(0.0);
    let outer_end = bracket(&(Q::from_integer(1.into()) - from_f64(dlo))).1.min(1.0);

    // Start from the knots and the knots shifted back by the window.
    let mut ev: Vec<f64> = vec![0.0, outer_end];
    if inner_end > 0.0 {
        ev.push(inner_end);
    }
    for c in psi.cells() {
        for x in [c.x0, c.x0 - dlo, c.x0 - dhi] {
            if x > 0.0 && x < outer_end {
                ev.push(x);
            }
        }
    }
    ev.sort_by(f64::total_cmp);
    ev.dedup();

    let mut inner: Vec<(f64, f64)> = Vec::new();
    let mut outer: Vec<(f64, f64)> = Vec::new();
    let mut stack: Vec<(f64, f64)> = ev.windows(2).rev().map(|w| (w[0], w[1])).collect();
    while let Some((x0, x1)) = stack.pop() {
        let past_inner = x1 > inner_end;
        match t.classify(x0, x1) {
            Verdict::Out => {}
            Verdict::In if !past_inner => {
                inner.push((x0, x1));
                outer.push((x0, x1));
            }
            v => {
                let mid = 0.5 * (x0 + x1);
                if x1 - x0 <= tol || mid <= x0 || mid >= x1 {
                    if v == Verdict::In && x0 <= inner_end {
                        inner.push((x0, inner_end));
                    }
                    outer.push((x0, x1));
                } else {
                    stack.push((mid, x1));
                    stack.push((x0, mid));
                }
            }
        }
    }
    NSetEnclosure {
        inner: IntervalSet::from_f64_pairs(inner),
        outer: IntervalSet::from_f64_pairs(outer),
        tolerance: tol,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nsets::n_set_exact;
    use crate::rational::{q, qr};
    use crate::realfn::{random_c1, random_function, C1Function, PwlFunction};

    #[test]
    fn zero_function_is_exact() {
        let e = n_set_enclosure(&Function::C1(C1Function::zero()), &q(1), Variant::PlusUpper, 1e-4).unwrap();
        assert_eq!(e.inner, IntervalSet::interval(q(0), qr(1, 2)).unwrap());
        assert!(e.is_exact());
    }

    #[test]
    fn steep_line_is_empty() {
        let e = n_set_enclosure(&Function::C1(C1Function::line(3.0, 0.0)), &q(2), Variant::PlusUpper, 1e-4).unwrap();
        assert!(e.inner.is_empty() && e.outer.is_empty());
    }

    #[test]
    fn brackets_exact_pwl_sets() {
        for seed in 0..8 {
            let f = random_function(seed, 5, 0.6);
            let g = Function::Pwl(f.clone());
            for a in [q(1), q(2), q(3)] {
                for v in Variant::ALL {
                    let exact = n_set_exact(&f, &a, v).unwrap();
                    let e = n_set_enclosure(&g, &a, v, 1e-6).unwrap();
                    assert!(e.inner.is_subset(&exact), "seed {seed} a {a} {v:?}: inner {} exact {}", e.inner, exact);
                    assert!(exact.is_subset(&e.outer), "seed {seed} a {a} {v:?}: exact {} outer {}", exact, e.outer);
                }
            }
        }
    }

    #[test]
    fn tightens_with_tolerance() {
        let f = Function::C1(random_c1(7, 5, 0.6));
        let coarse = n_set_enclosure(&f, &q(2), Variant::Full, 1e-3).unwrap();
        let fine = n_set_enclosure(&f, &q(2), Variant::Full, 1e-6).unwrap();
        assert!(fine.undecided_length() <= coarse.undecided_length() + 1e-12);
        assert!(coarse.inner.is_subset(&fine.outer));
        assert!(fine.inner.is_subset(&coarse.outer));
    }

    #[test]
    fn huge_scale_window() {
        let w = window_bracket(&q(2000)).unwrap();
        assert_eq!(w.0, 0.0);
        assert!(w.1 > 0.0);
        let f = Function::Pwl(PwlFunction::zero());
        let e = n_set_enclosure(&f, &q(60), Variant::PlusUpper, 1e-6).unwrap();
        assert!(e.inner.contains_point(&from_f64(0.999)));
        assert!(e.outer.is_subset(&IntervalSet::unit()));
    }
}
