//! Brute-force oracles shared by the integration tests. Everything here works
//! in plain `f64` straight from the definitions and shares no code with the
//! exact algorithms it checks.

#![allow(dead_code)]

use knotpoints::intervalsets::IntervalSet;
use knotpoints::nsets::Variant;
use knotpoints::rational::to_f64;
use knotpoints::realfn::{C1Function, PwlFunction};

/// Slack for equality cases: values live on a `2^-30` grid, so genuine
/// violations are far larger than this.
pub const SLACK: f64 = 1e-12;

/// Range min/max over a fixed array in O(1) per query.
pub struct Sparse {
    max: Vec<Vec<f64>>,
    min: Vec<Vec<f64>>,
}

impl Sparse {
    pub fn new(v: &[f64]) -> Self {
        let mut max = vec![v.to_vec()];
        let mut min = vec![v.to_vec()];
        let mut k = 1;
        while (1 << k) <= v.len() {
            let h = 1 << (k - 1);
            let pm = &max[k - 1];
            let pn = &min[k - 1];
            let n = v.len() + 1 - (1 << k);
            max.push((0..n).map(|i| pm[i].max(pm[i + h])).collect());
            min.push((0..n).map(|i| pn[i].min(pn[i + h])).collect());
            k += 1;
        }
        Sparse { max, min }
    }

    /// `(min, max)` over `v[lo..hi]`, or `None` for an empty range.
    pub fn query(&self, lo: usize, hi: usize) -> Option<(f64, f64)> {
        if lo >= hi {
            return None;
        }
        let k = (usize::BITS - 1 - (hi - lo).leading_zeros()) as usize;
        let j = hi - (1 << k);
        Some((self.min[k][lo].min(self.min[k][j]), self.max[k][lo].max(self.max[k][j])))
    }
}

/// Plain linear interpolation.
pub fn eval_pwl(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let i = xs.partition_point(|t| *t <= x).clamp(1, xs.len() - 1);
    let (x0, x1) = (xs[i - 1], xs[i]);
    let t = (x - x0) / (x1 - x0);
    ys[i - 1] + t * (ys[i] - ys[i - 1])
}

pub fn pwl_data(f: &PwlFunction) -> (Vec<f64>, Vec<f64>) {
    (f.breakpoints().iter().map(to_f64).collect(), f.values().iter().map(to_f64).collect())
}

/// Sign conventions of the four basic sets: `u(y) = f(y) + c·a·y` must stay
/// below `u(x)` (`upper`) or above it over a forward or backward window.
fn form(variant: Variant) -> (f64, bool, bool) {
    match variant {
        // f(y)-f(x) ≤ a(y-x): max of f - a·y
        Variant::PlusUpper => (-1.0, true, true),
        // f(y)-f(x) ≥ -a(y-x): min of f + a·y
        Variant::PlusLower => (1.0, false, true),
        // y ≤ x, f(y)-f(x) ≥ a(y-x): min of f - a·y
        Variant::MinusUpper => (-1.0, false, false),
        // y ≤ x, f(y)-f(x) ≤ -a(y-x): max of f + a·y
        Variant::MinusLower => (1.0, true, false),
        _ => panic!("basic variants only"),
    }
}

/// Grid points in a basic `N`-set of a PWL function. The `x` grid is the
/// uniform grid of `step` plus the breakpoints and their `±δ` shifts; over
/// each window the extremum is taken at the ends and the interior
/// breakpoints, which is exact for PWL.
pub fn grid_n_set_pwl(f: &PwlFunction, a: f64, delta: f64, variant: Variant, step: f64) -> Vec<f64> {
    let (xs, ys) = pwl_data(f);
    let (c, upper, forward) = form(variant);
    let u: Vec<f64> = xs.iter().zip(&ys).map(|(x, y)| y + c * a * x).collect();
    let sp = Sparse::new(&u);
    let ux = |x: f64| eval_pwl(&xs, &ys, x) + c * a * x;
    let mut grid: Vec<f64> = (0..=((1.0 / step).round() as usize)).map(|i| (i as f64 * step).min(1.0)).collect();
    for &b in &xs {
        grid.extend([b, b - delta, b + delta]);
    }
    grid.retain(|x| (0.0..=1.0).contains(x));
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let (dom_lo, dom_hi) = if forward { (0.0, 1.0 - delta) } else { (delta, 1.0) };
    grid.into_iter()
        .filter(|&x| x >= dom_lo - 1e-15 && x <= dom_hi + 1e-15)
        .filter(|&x| {
            let (lo, hi) = if forward { (x, (x + delta).min(1.0)) } else { ((x - delta).max(0.0), x) };
            let i0 = xs.partition_point(|t| *t <= lo);
            let i1 = xs.partition_point(|t| *t < hi);
            let mut vals = vec![ux(lo), ux(hi)];
            if let Some((mn, mx)) = sp.query(i0, i1) {
                vals.extend([mn, mx]);
            }
            let here = ux(x);
            if upper {
                vals.iter().all(|v| *v - here <= SLACK)
            } else {
                vals.iter().all(|v| here - *v <= SLACK)
            }
        })
        .collect()
}

pub fn to_f64_intervals(s: &IntervalSet) -> Vec<(f64, f64)> {
    s.intervals().iter().map(|(l, r)| (to_f64(l), to_f64(r))).collect()
}

fn dist_to_intervals(ivs: &[(f64, f64)], x: f64) -> f64 {
    ivs.iter().map(|&(l, r)| if x < l { l - x } else if x > r { x - r } else { 0.0 }).fold(f64::INFINITY, f64::min)
}

fn dist_to_points(pts: &[f64], x: f64) -> f64 {
    let i = pts.partition_point(|p| *p < x);
    let mut d = f64::INFINITY;
    if i < pts.len() {
        d = d.min(pts[i] - x);
    }
    if i > 0 {
        d = d.min(x - pts[i - 1]);
    }
    d
}

/// Hausdorff distance between a finite union of intervals and a sorted point
/// set, with the empty-set convention `d(K,∅) = 1`.
pub fn hausdorff_points(ivs: &[(f64, f64)], pts: &[f64]) -> f64 {
    match (ivs.is_empty(), pts.is_empty()) {
        (true, true) => return 0.0,
        (true, false) | (false, true) => return 1.0,
        _ => {}
    }
    let mut d = pts.iter().map(|&p| dist_to_intervals(ivs, p)).fold(0.0, f64::max);
    for &(l, r) in ivs {
        // The farthest point of [l, r] from the grid set is an end or a midpoint of a gap.
        let mut cands = vec![l, r];
        let i0 = pts.partition_point(|p| *p < l);
        let i1 = pts.partition_point(|p| *p <= r);
        for w in pts[i0.saturating_sub(1)..(i1 + 1).min(pts.len())].windows(2) {
            let m = 0.5 * (w[0] + w[1]);
            if m > l && m < r {
                cands.push(m);
            }
        }
        for c in cands {
            d = d.max(dist_to_points(pts, c));
        }
    }
    d
}

/// Hermite evaluation written out from the basis polynomials.
pub fn eval_c1(f: &C1Function, x: f64) -> f64 {
    let (xs, ys, ds) = (f.knots(), f.values(), f.slopes());
    let i = xs.partition_point(|t| *t <= x).clamp(1, xs.len() - 1);
    let (x0, x1) = (xs[i - 1], xs[i]);
    let h = x1 - x0;
    let t = (x - x0) / h;
    let (t2, t3) = (t * t, t * t * t);
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + t;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    h00 * ys[i - 1] + h10 * h * ds[i - 1] + h01 * ys[i] + h11 * h * ds[i]
}

/// For each grid point `x = i·step` inside the domain, the worst grid
/// violation `gap ≥ 0` of the defining inequality. `gap > SLACK` refutes
/// membership; `gap ≤ SLACK` makes `x` a grid member, which may miss a
/// violation between grid points.
pub fn grid_gaps_c1(f: &C1Function, a: f64, delta: f64, variant: Variant, step: f64) -> Vec<(f64, f64)> {
    let (c, upper, forward) = form(variant);
    let n = (1.0 / step).round() as usize;
    let xs: Vec<f64> = (0..=n).map(|i| (i as f64 * step).min(1.0)).collect();
    let u: Vec<f64> = xs.iter().map(|&x| eval_c1(f, x) + c * a * x).collect();
    let sp = Sparse::new(&u);
    let w = (delta / step).round() as usize;
    xs.iter()
        .enumerate()
        .filter(|(i, _)| if forward { i + w <= n } else { *i >= w })
        .map(|(i, &x)| {
            let (lo, hi) = if forward { (i, i + w + 1) } else { (i - w, i + 1) };
            let (mn, mx) = sp.query(lo, hi).expect("window holds x");
            (x, if upper { mx - u[i] } else { u[i] - mn })
        })
        .collect()
}
