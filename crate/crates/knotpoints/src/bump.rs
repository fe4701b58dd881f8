//! C¹ bump functions and the explicit constants `ε`, `l` and `μ` that make
//! a bump at a fine enough net push every `N`-set of `f + φ` into `N(f,b)`.
//!
//! A bump of height `h` is built from cubic smoothstep lobes: on `[p-ρ,p]`
//! the Hermite cubic with values `0, h` and zero slopes, mirrored on
//! `[p,p+ρ]`. Its Bernstein coefficients are `0, 0, h, h`, so the range
//! properties can be checked exactly from the cell data.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::enclosure::{n_set_enclosure, n_set_enclosure_pcw, window_bracket, REL_SLACK};
use crate::error::{arg, Error, Result};
use crate::indexcomb::Verdict;
use crate::intervalsets::{ball, FinitePointSet, IntervalSet};
use crate::nsets::{window, Reading, Variant};
use crate::pcw::{PiecewiseCubic, RangeIndex};
use crate::rational::{fmt_q, from_f64, q, to_f64, Q};
use crate::realfn::{C1Function, Function};

/// Bisection floor for the `ε` certification.
const EPS_MIN_WIDTH: f64 = 1e-12;
/// Smallest `ε` the halving search will try.
pub const EPS_FLOOR: f64 = 1e-9;
/// Enclosure tolerance used to locate the exceptional set of the lemma.
const EXCEPTIONAL_TOL: f64 = 1e-9;
/// Largest net `mu_net` will build.
pub const MAX_NET_POINTS: usize = 1 << 22;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BumpSpec {
    pub h_hat: FinitePointSet,
    pub h_check: FinitePointSet,
    pub h: f64,
    pub w: f64,
}

impl BumpSpec {
    pub fn new(h_hat: FinitePointSet, h_check: FinitePointSet, h: f64, w: f64) -> Result<Self> {
        let s = BumpSpec { h_hat, h_check, h, w };
        s.validate()?;
        Ok(s)
    }

    fn validate(&self) -> Result<()> {
        if !(self.h > 0.0 && self.h.is_finite()) || !(self.w > 0.0 && self.w.is_finite()) {
            return arg("bump height and width must be positive and finite");
        }
        if !self.h_hat.is_disjoint(&self.h_check) {
            return Err(Error::Construction("hat and check point sets overlap".into()));
        }
        Ok(())
    }

    /// `Ĥ` or `Ȟ`.
    pub fn points(&self, reading: Reading) -> &FinitePointSet {
        match reading {
            Reading::Hat => &self.h_hat,
            Reading::Check => &self.h_check,
        }
    }

    pub fn all_points(&self) -> FinitePointSet {
        self.h_hat.union(&self.h_check)
    }

    /// Lobe half-width `min(w/2, gap/3)`.
    pub fn lobe_radius(&self) -> f64 {
        let r = self.w / 2.0;
        match self.all_points().min_gap() {
            Some(g) => r.min(to_f64(&g) / 3.0),
            None => r,
        }
    }

    /// Advisory notes; the definition itself only needs disjointness.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(g) = self.all_points().min_gap() {
            if to_f64(&g) <= 2.0 * self.w {
                out.push(format!("min gap {} does not exceed 2w = {}", fmt_q(&g), 2.0 * self.w));
            }
        }
        out
    }

    /// `1.5·h/ρ`, the steepest slope of a smoothstep lobe.
    pub fn slope_bound(&self) -> f64 {
        1.5 * self.h / self.lobe_radius()
    }
}

/// Bump of height `h` located at `Ĥ` (value `+h`) and `Ȟ` (value `-h`).
///
/// A lobe cut by an end of `[0,1]` keeps its peak value up to that end, so
/// every cell is either a smoothstep, a constant, or zero.
pub fn make_bump(spec: &BumpSpec) -> Result<C1Function> {
    spec.validate()?;
    let all = spec.all_points();
    if all.is_empty() {
        return Err(Error::Construction("bump needs at least one point to reach norm h".into()));
    }
    let mut centres = Vec::with_capacity(all.len());
    for p in all.points() {
        let x = to_f64(p);
        if from_f64(x) != *p {
            return Err(Error::Construction(format!("bump point {} is not a double", fmt_q(p))));
        }
        let sign = if spec.h_hat.contains(p) { 1.0 } else { -1.0 };
        centres.push((x, sign * spec.h));
    }
    let rho = spec.lobe_radius();
    if !(rho > 0.0) {
        return Err(Error::Construction("lobe radius underflows".into()));
    }

    // (knot, value, slope); zero stretches between lobes need no knots.
    let mut pts: Vec<(f64, f64, f64)> = Vec::new();
    let mut push = |x: f64, y: f64| {
        if let Some(last) = pts.last() {
            if x <= last.0 {
                return Err(Error::Construction(format!("lobes overlap near {x}")));
            }
        }
        pts.push((x, y, 0.0));
        Ok(())
    };
    for (i, &(p, v)) in centres.iter().enumerate() {
        let lo = p - rho;
        if lo > 0.0 {
            push(lo, 0.0)?;
        } else if p > 0.0 {
            push(0.0, v)?;
        }
        push(p, v)?;
        let hi = p + rho;
        if hi < 1.0 {
            push(hi, 0.0)?;
        } else if p < 1.0 {
            push(1.0, v)?;
        }
        if let Some(&(next, _)) = centres.get(i + 1) {
            if next - rho <= hi {
                return Err(Error::Construction(format!("lobes at {p} and {next} overlap")));
            }
        }
    }
    if pts[0].0 > 0.0 {
        pts.insert(0, (0.0, 0.0, 0.0));
    }
    if pts.last().unwrap().0 < 1.0 {
        pts.push((1.0, 0.0, 0.0));
    }
    let (xs, rest): (Vec<f64>, Vec<(f64, f64)>) = pts.into_iter().map(|(x, y, d)| (x, (y, d))).unzip();
    let (ys, ds) = rest.into_iter().unzip();
    C1Function::new(xs, ys, ds)
}

/// Bernstein coefficients of one cell, exactly.
fn bernstein(x0: f64, x1: f64, y0: f64, y1: f64, d0: f64, d1: f64) -> [Q; 4] {
    let w = from_f64(x1) - from_f64(x0);
    let (y0, y1) = (from_f64(y0), from_f64(y1));
    let b1 = &y0 + &w * from_f64(d0) / q(3);
    let b2 = &y1 - &w * from_f64(d1) / q(3);
    [y0, b1, b2, y1]
}

/// Checks the three defining properties of a bump from the cell data, using
/// only exact arithmetic: `‖φ‖ = h`, `φ = ±h` on `Ĥ`/`Ȟ`, and
/// `{φ>0} ⊂ B(Ĥ,w)`, `{φ<0} ⊂ B(Ȟ,w)`.
///
/// The range of a cubic on a cell lies in the hull of its Bernstein
/// coefficients, so the checks are sound; they are also sharp for bumps from
/// [`make_bump`], whose cells have coefficients in `{0, ±h}`.
pub fn check_bump_definition(spec: &BumpSpec, phi: &C1Function) -> Result<Verdict> {
    spec.validate()?;
    let h = from_f64(spec.h);
    let w = from_f64(spec.w);
    let (xs, ys, ds) = (phi.knots(), phi.values(), phi.slopes());
    for (reading, sign) in [(Reading::Hat, 1), (Reading::Check, -1)] {
        for p in spec.points(reading).points() {
            let v = exact_eval(phi, p);
            if v != &h * q(sign) {
                return Ok(Verdict::Fail { witness: format!("φ({}) = {} instead of {}h", fmt_q(p), fmt_q(&v), sign) });
            }
        }
    }
    for i in 0..xs.len() - 1 {
        let b = bernstein(xs[i], xs[i + 1], ys[i], ys[i + 1], ds[i], ds[i + 1]);
        if b.iter().any(|c| c.abs() > h) {
            return Ok(Verdict::Fail { witness: format!("|φ| may exceed h on [{}, {}]", xs[i], xs[i + 1]) });
        }
        let (y0, y1) = (from_f64(ys[i]), from_f64(ys[i + 1]));
        for (reading, sign) in [(Reading::Hat, 1), (Reading::Check, -1)] {
            let signed: Vec<Q> = b.iter().map(|c| c * q(sign)).collect();
            if signed.iter().all(|c| !c.is_positive()) {
                continue;
            }
            let (x0, x1) = (from_f64(xs[i]), from_f64(xs[i + 1]));
            // An endpoint where the signed value is not positive is not in the sign-support.
            let open_left = !(&y0 * q(sign)).is_positive();
            let open_right = !(&y1 * q(sign)).is_positive();
            // Only centres in [x1-w, x0+w] can contain the cell.
            let cs = spec.points(reading).points();
            let from = cs.partition_point(|c| c < &(&x1 - &w));
            let hi = &x0 + &w;
            let ok = cs[from..].iter().take_while(|c| **c <= hi).any(|c| {
                let left = x0 > (c - &w) || (open_left && x0 >= c - &w);
                let right = x1 < (c + &w) || (open_right && x1 <= c + &w);
                left && right
            });
            if !ok {
                let name = if sign > 0 { "φ>0" } else { "φ<0" };
                return Ok(Verdict::Fail {
                    witness: format!("{name} on [{}, {}] not within w of the {reading:?} points", xs[i], xs[i + 1]),
                });
            }
        }
    }
    Ok(Verdict::Pass)
}

/// `φ(x)` for a rational `x` by de Casteljau on the exact cell data.
fn exact_eval(phi: &C1Function, x: &Q) -> Q {
    let xs = phi.knots();
    let xf = to_f64(x);
    let i = xs.partition_point(|k| *k <= xf).clamp(1, xs.len() - 1) - 1;
    let (ys, ds) = (phi.values(), phi.slopes());
    let mut b = bernstein(xs[i], xs[i + 1], ys[i], ys[i + 1], ds[i], ds[i + 1]).to_vec();
    let (x0, x1) = (from_f64(xs[i]), from_f64(xs[i + 1]));
    let t = (x - &x0) / (x1 - x0);
    let s = Q::from_integer(1.into()) - &t;
    while b.len() > 1 {
        b = b.windows(2).map(|p| &p[0] * &s + &p[1] * &t).collect();
    }
    b.pop().unwrap()
}

/// Alternating dyadic net with `B(Ĥ,μ) = B(Ȟ,μ) = [0,1]`: with step `s < μ`
/// the even multiples of `s` form `Ĥ` and the odd ones `Ȟ`.
pub fn mu_net(mu: f64) -> Result<(FinitePointSet, FinitePointSet)> {
    if !(mu > 0.0) {
        return arg("net radius must be positive");
    }
    let mut k = 1u32;
    while (0.5f64).powi(k as i32) >= mu {
        k += 1;
        if (1usize << k.min(63)) > MAX_NET_POINTS || k >= 63 {
            return Err(Error::Resource(format!("a {mu:e}-net needs more than {MAX_NET_POINTS} points")));
        }
    }
    let n = 1u64 << k;
    let step = Q::new(1.into(), n.into());
    let (mut hat, mut check) = (Vec::new(), Vec::new());
    for i in 0..=n {
        let p = &step * Q::from_integer(i.into());
        if i % 2 == 0 {
            hat.push(p);
        } else {
            check.push(p);
        }
    }
    Ok((FinitePointSet::new(hat)?, FinitePointSet::new(check)?))
}

/// `ε` such that every `x ∈ [0,1-2^-a] \ N⁺(f,b)` has a witness
/// `y ∈ (x+ε, x+2^-b]` with `f(y) - f(x) > c(y-x)`.
///
/// Halves from `2^-b/4` until a certification over the outer enclosure of
/// the exceptional set succeeds.
pub fn lemma_epsilon(f: &C1Function, a: &Q, b: &Q, c: &Q) -> Result<f64> {
    lemma_epsilon_pcw(&f.to_pcw(), a, b, c)
}

fn lemma_epsilon_pcw(p: &PiecewiseCubic, a: &Q, b: &Q, c: &Q) -> Result<f64> {
    if !a.is_positive() || a >= c || c >= b {
        return arg("lemma_epsilon needs 0 < a < c < b");
    }
    let exceptional = exceptional_set(p, a, b)?;
    let (dlo, _) = window_bracket(b)?;
    let psi = p.sub_linear(to_f64(c));
    let cert = WitnessSearch::new(&psi, dlo);
    let mut eps = dlo / 4.0;
    let mut last_failure = String::new();
    while eps >= EPS_FLOOR {
        match cert.certify(&exceptional, eps) {
            Ok(()) => return Ok(eps),
            Err(x) => last_failure = format!("no witness found near x = {x} at ε = {eps:e}"),
        }
        eps /= 2.0;
    }
    Err(Error::Certification { claim: "lemma_epsilon".into(), detail: last_failure })
}

/// Outer enclosure of `[0,1-2^-a] \ N⁺(f,b)`.
fn exceptional_set(p: &PiecewiseCubic, a: &Q, b: &Q) -> Result<IntervalSet> {
    let end = Q::from_integer(1.into()) - window(a)?;
    if end.is_negative() {
        return Ok(IntervalSet::empty());
    }
    let domain = IntervalSet::interval(Q::zero(), end)?;
    let n = n_set_enclosure_pcw(p, b, Variant::PlusUpper, EXCEPTIONAL_TOL)?;
    Ok(domain.minus_outer(&n.inner))
}

/// Per-cell witness certification for `ψ(y) = f(y) - c·y`.
struct WitnessSearch<'a> {
    idx: RangeIndex<'a>,
    dlo: f64,
    vslack: f64,
    dslack: f64,
}

impl<'a> WitnessSearch<'a> {
    fn new(psi: &'a PiecewiseCubic, dlo: f64) -> Self {
        let vslack = REL_SLACK * (1.0 + psi.sup_norm());
        let dslack = REL_SLACK * (1.0 + psi.deriv_sup_norm());
        WitnessSearch { idx: RangeIndex::new(psi), dlo, vslack, dslack }
    }

    /// Whether every `x ∈ [x0,x1]` has `y ∈ (x+ε, x+δ]` with `ψ(y) > ψ(x)`.
    fn cell_ok(&self, x0: f64, x1: f64, eps: f64) -> bool {
        // A window segment shared by all of X rises above max ψ on X.
        let lo = (x1 + eps).next_up();
        let hi = (x0 + self.dlo).min(1.0);
        if lo <= hi {
            let (_, there) = self.idx.value_range(lo, hi);
            let (_, here) = self.idx.value_range(x0, x1);
            if there - self.vslack > here + self.vslack {
                return true;
            }
        }
        // ψ strictly increasing from each x to x + 2ε, which is inside the window.
        let end = x1 + 2.0 * eps;
        if 2.0 * eps <= self.dlo && end <= 1.0 {
            let (dmin, _) = self.idx.deriv_range(x0, end);
            if dmin > self.dslack {
                return true;
            }
        }
        false
    }

    /// `Err(x)` names a point where bisection bottomed out.
    fn certify(&self, set: &IntervalSet, eps: f64) -> std::result::Result<(), f64> {
        let step = ((self.dlo - eps) / 2.0).max(EPS_MIN_WIDTH);
        let mut stack: Vec<(f64, f64)> = Vec::new();
        for (l, r) in set.intervals() {
            let (l, r) = (to_f64(l), to_f64(r));
            let pieces = (((r - l) / step).ceil() as usize).max(1);
            for i in (0..pieces).rev() {
                let x0 = l + (r - l) * i as f64 / pieces as f64;
                let x1 = if i + 1 == pieces { r } else { l + (r - l) * (i + 1) as f64 / pieces as f64 };
                stack.push((x0, x1));
            }
        }
        while let Some((x0, x1)) = stack.pop() {
            if self.cell_ok(x0, x1, eps) {
                continue;
            }
            let mid = 0.5 * (x0 + x1);
            if x1 - x0 <= EPS_MIN_WIDTH || mid <= x0 || mid >= x1 {
                return Err(x0);
            }
            stack.push((mid, x1));
            stack.push((x0, mid));
        }
        Ok(())
    }
}

/// The constants behind an interval length `l`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalLength {
    /// `(a+b)/2`.
    #[serde(with = "crate::rational::serde_q")]
    pub c: Q,
    /// Smallest certified `ε` over `f`, `-f`, `f∘R` and `-f∘R`.
    pub eps: f64,
    pub deriv_norm: f64,
    pub l: f64,
}

/// `l` such that each exceptional set of the four forms contains an open
/// interval of length `l`: `l = min{ε, 2^-a - 2^-b, (c-a)ε/(‖f′‖+a)}`.
pub fn interval_length_l(f: &C1Function, a: &Q, b: &Q) -> Result<IntervalLength> {
    if !a.is_positive() || a >= b {
        return arg("interval_length_l needs 0 < a < b");
    }
    let c = (a + b) / q(2);
    let p = f.to_pcw();
    let forms = [p.clone(), p.negate(), p.reflect(), p.reflect().negate()];
    let mut eps = f64::INFINITY;
    for form in &forms {
        eps = eps.min(lemma_epsilon_pcw(form, a, b, &c)?);
    }
    let (alo, _) = window_bracket(a)?;
    let (_, bhi) = window_bracket(b)?;
    let gap = alo - bhi;
    let deriv_norm = f.deriv_sup_norm();
    let af = to_f64(a);
    let l = eps.min(gap).min(to_f64(&(&c - a)) * eps / (deriv_norm + af));
    if !(l > 0.0) {
        return Err(Error::Certification { claim: "interval_length_l".into(), detail: format!("l = {l:e} is not positive") });
    }
    Ok(IntervalLength { c, eps, deriv_norm, l })
}

/// The constants behind `μ(f,a,b,h)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MuConstants {
    pub length: IntervalLength,
    pub mu: f64,
}

/// `μ = ½·min{l/2, 2^-a/2, h/(2(‖f′‖+a))}`, strictly inside the three
/// constraints `μ < l/2`, `2μ < 2^-a`, `2μ(‖f′‖+a) < h`.
pub fn mu_constants(f: &C1Function, a: &Q, b: &Q, h: f64) -> Result<MuConstants> {
    if !(h > 0.0) {
        return arg("bump height must be positive");
    }
    let length = interval_length_l(f, a, b)?;
    let (alo, _) = window_bracket(a)?;
    let fa = length.deriv_norm + to_f64(a);
    let mu = 0.5 * (length.l / 2.0).min(alo / 2.0).min(h / (2.0 * fa));
    let ok = mu > 0.0 && mu < length.l / 2.0 && 2.0 * mu < alo && 2.0 * mu * fa < h;
    if !ok {
        return Err(Error::Certification { claim: "mu".into(), detail: format!("μ = {mu:e} violates a defining bound") });
    }
    Ok(MuConstants { length, mu })
}

pub fn mu(f: &C1Function, a: &Q, b: &Q, h: f64) -> Result<f64> {
    Ok(mu_constants(f, a, b, h)?.mu)
}

/// Pointwise membership in the basic `N`-sets of a piecewise cubic, from
/// window maxima with the enclosure slack.
struct PointTester {
    forms: [PiecewiseCubic; 4],
    a: f64,
    dhi: f64,
    end: Q,
}

impl PointTester {
    fn new(p: &PiecewiseCubic, a: &Q) -> Result<Self> {
        let r = p.reflect();
        Ok(PointTester {
            forms: [p.sub_linear(to_f64(a)), p.negate(), r.negate(), r],
            a: to_f64(a),
            dhi: window_bracket(a)?.1,
            end: Q::from_integer(1.into()) - window(a)?,
        })
    }

    fn member(&self, variant: Variant, x: &Q) -> bool {
        let one = Q::from_integer(1.into());
        let (k, x) = match variant {
            Variant::PlusUpper => (0, x.clone()),
            Variant::PlusLower => (1, x.clone()),
            Variant::MinusUpper => (2, one - x),
            Variant::MinusLower => (3, one - x),
            _ => return variant.parts().iter().any(|v| self.member(*v, x)),
        };
        if x > self.end {
            return false;
        }
        let psi = if k == 0 { self.forms[0].clone() } else { self.forms[k].sub_linear(self.a) };
        let xf = to_f64(&x);
        let (_, mx) = psi.value_range(xf, (xf + self.dhi).min(1.0));
        mx - psi.eval(xf) <= REL_SLACK * (1.0 + psi.sup_norm())
    }
}

/// Checks `H̃ ∩ Ñ(f,a) ⊂ Ñ(f+φ,a)` at every point of `H̃`, for both readings.
pub fn check_bump_easy(f: &Function, a: &Q, spec: &BumpSpec, phi: &C1Function) -> Result<Verdict> {
    let pf = f.to_pcw();
    let pg = pf.add(&phi.to_pcw());
    let (tf, tg) = (PointTester::new(&pf, a)?, PointTester::new(&pg, a)?);
    for reading in Reading::BOTH {
        let v = reading.variant();
        for x in spec.points(reading).points() {
            if tf.member(v, x) && !tg.member(v, x) {
                return Ok(Verdict::Fail { witness: format!("{reading:?}: {} is in Ñ(f,a) but not in Ñ(f+φ,a)", fmt_q(x)) });
            }
        }
    }
    Ok(Verdict::Pass)
}

/// Outcome of the enclosure check of `Ñ(f+φ,a) ⊂ Ñ(f,b) ∩ B(H̃,w)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DifficultReport {
    pub verdict: Verdict,
    /// Length of the part of `Ñ(f+φ,a)`'s outer enclosure not certified inside.
    pub undecided_length: f64,
}

/// Enclosure certification of `Ñ(f+φ,a) ⊂ Ñ(f,b) ∩ B(H̃,w)` in both readings.
/// A point of the inner enclosure of the left side outside the outer
/// enclosure of the right side refutes the inclusion.
pub fn check_bump_difficult(f: &C1Function, a: &Q, b: &Q, spec: &BumpSpec, phi: &C1Function, tol: f64) -> Result<DifficultReport> {
    let g = Function::C1(f.add(phi));
    let f = Function::C1(f.clone());
    let w = from_f64(spec.w);
    let mut verdict = Verdict::Pass;
    let mut undecided = 0.0;
    for reading in Reading::BOTH {
        let v = reading.variant();
        let eg = n_set_enclosure(&g, a, v, tol)?;
        let ef = n_set_enclosure(&f, b, v, tol)?;
        let centres = spec.points(reading).to_interval_set();
        if eg.inner.is_empty() && eg.outer.is_empty() {
            continue;
        }
        if centres.is_empty() {
            let witness = format!("{reading:?}: Ñ(f+φ,a) may be nonempty with no bump points");
            if !eg.inner.is_empty() {
                return Ok(DifficultReport { verdict: Verdict::Fail { witness }, undecided_length: 0.0 });
            }
            verdict = verdict.and(Verdict::Undecided { witness });
            undecided += to_f64(&eg.outer.total_length());
            continue;
        }
        let nb = ball(&centres, &w, false)?;
        if !eg.inner.is_subset(&ef.outer) || !nb.contains_set(&eg.inner) {
            let witness = format!("{reading:?}: inner Ñ(f+φ,a) = {} escapes Ñ(f,b) ∩ B(H̃,w)", eg.inner);
            return Ok(DifficultReport { verdict: Verdict::Fail { witness }, undecided_length: 0.0 });
        }
        let loose = eg.outer.minus_outer(&ef.inner).union(&eg.outer.minus_outer(&nb.closure));
        if !loose.is_empty() {
            undecided += to_f64(&loose.total_length());
            verdict = verdict.and(Verdict::Undecided { witness: format!("{reading:?}: uncertified part {loose}") });
        }
    }
    Ok(DifficultReport { verdict, undecided_length: undecided })
}
