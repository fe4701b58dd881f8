//! Continuous functions on `[0,1]`: exact piecewise-linear and C¹ cubic Hermite.

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{arg, Error, Result};
use crate::pcw::{Cell, PiecewiseCubic};
use crate::rational::{fmt_q, from_f64, parse_q, q, to_f64, Q};

/// Piecewise-linear function with rational breakpoints on an arbitrary closed interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewiseLinear {
    xs: Vec<Q>,
    ys: Vec<Q>,
}

impl PiecewiseLinear {
    pub fn new(xs: Vec<Q>, ys: Vec<Q>) -> Result<Self> {
        if xs.is_empty() || xs.len() != ys.len() {
            return arg("breakpoints and values must be nonempty and of equal length");
        }
        if xs.windows(2).any(|w| w[0] >= w[1]) {
            return arg("breakpoints must be strictly increasing");
        }
        Ok(PiecewiseLinear { xs, ys })
    }

    pub(crate) fn from_parts(xs: Vec<Q>, ys: Vec<Q>) -> Self {
        debug_assert!(xs.windows(2).all(|w| w[0] < w[1]));
        PiecewiseLinear { xs, ys }
    }

    pub fn breakpoints(&self) -> &[Q] {
        &self.xs
    }

    pub fn values(&self) -> &[Q] {
        &self.ys
    }

    pub fn domain(&self) -> (&Q, &Q) {
        (&self.xs[0], self.xs.last().unwrap())
    }

    pub fn eval(&self, x: &Q) -> Result<Q> {
        let (lo, hi) = self.domain();
        if x < lo || x > hi {
            return Err(Error::Domain(format!("{} outside [{}, {}]", fmt_q(x), fmt_q(lo), fmt_q(hi))));
        }
        let i = self.xs.partition_point(|b| b < x);
        if self.xs[i] == *x {
            return Ok(self.ys[i].clone());
        }
        Ok(lerp(&self.xs[i - 1], &self.ys[i - 1], &self.xs[i], &self.ys[i], x))
    }
}

pub(crate) fn lerp(x0: &Q, y0: &Q, x1: &Q, y1: &Q, x: &Q) -> Q {
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

/// Continuous piecewise-linear function on `[0,1]` with exact rational data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PwlFunction {
    inner: PiecewiseLinear,
}

impl PwlFunction {
    pub fn new(xs: Vec<Q>, ys: Vec<Q>) -> Result<Self> {
        let inner = PiecewiseLinear::new(xs, ys)?;
        let (lo, hi) = inner.domain();
        if !lo.is_zero() || !hi.is_one() {
            return arg("breakpoints must start at 0 and end at 1");
        }
        Ok(PwlFunction { inner })
    }

    pub fn constant(c: Q) -> Self {
        PwlFunction { inner: PiecewiseLinear::from_parts(vec![q(0), q(1)], vec![c.clone(), c]) }
    }

    pub fn zero() -> Self {
        Self::constant(q(0))
    }

    pub fn identity() -> Self {
        PwlFunction { inner: PiecewiseLinear::from_parts(vec![q(0), q(1)], vec![q(0), q(1)]) }
    }

    pub fn linear(slope: Q, intercept: Q) -> Self {
        let y1 = &intercept + &slope;
        PwlFunction { inner: PiecewiseLinear::from_parts(vec![q(0), q(1)], vec![intercept, y1]) }
    }

    pub fn as_piecewise(&self) -> &PiecewiseLinear {
        &self.inner
    }

    pub fn breakpoints(&self) -> &[Q] {
        &self.inner.xs
    }

    pub fn values(&self) -> &[Q] {
        &self.inner.ys
    }

    pub fn eval(&self, x: &Q) -> Result<Q> {
        self.inner.eval(x)
    }

    pub fn sup_norm(&self) -> Q {
        self.values().iter().map(|v| v.abs()).max().unwrap_or_else(Q::zero)
    }

    pub fn sup_norm_diff(&self, other: &Self) -> Q {
        self.add(&other.negate()).sup_norm()
    }

    /// Values of both functions on the merged partition.
    fn merged(&self, other: &Self) -> (Vec<Q>, Vec<Q>, Vec<Q>) {
        let mut xs: Vec<Q> = self.breakpoints().iter().chain(other.breakpoints()).cloned().collect();
        xs.sort();
        xs.dedup();
        let a = xs.iter().map(|x| self.eval(x).unwrap()).collect();
        let b = xs.iter().map(|x| other.eval(x).unwrap()).collect();
        (xs, a, b)
    }

    pub fn add(&self, other: &Self) -> Self {
        let (xs, a, b) = self.merged(other);
        let ys = a.into_iter().zip(b).map(|(u, v)| u + v).collect();
        PwlFunction { inner: PiecewiseLinear::from_parts(xs, ys) }
    }

    pub fn scale(&self, c: &Q) -> Self {
        let ys = self.values().iter().map(|v| v * c).collect();
        PwlFunction { inner: PiecewiseLinear::from_parts(self.breakpoints().to_vec(), ys) }
    }

    pub fn negate(&self) -> Self {
        self.scale(&q(-1))
    }

    /// `x ↦ f(1-x)`.
    pub fn reflect(&self) -> Self {
        let xs = self.breakpoints().iter().rev().map(|x| q(1) - x).collect();
        let ys = self.values().iter().rev().cloned().collect();
        PwlFunction { inner: PiecewiseLinear::from_parts(xs, ys) }
    }

    /// `y ↦ f(y) - a·y`, the function whose window maxima decide `N⁺(f,a)`.
    pub fn minus_linear(&self, a: &Q) -> PiecewiseLinear {
        let ys = self.breakpoints().iter().zip(self.values()).map(|(x, y)| y - a * x).collect();
        PiecewiseLinear::from_parts(self.breakpoints().to_vec(), ys)
    }

    fn slopes(&self) -> Vec<Q> {
        let (xs, ys) = (self.breakpoints(), self.values());
        (0..xs.len() - 1).map(|i| (&ys[i + 1] - &ys[i]) / (&xs[i + 1] - &xs[i])).collect()
    }

    /// The C¹ function through the same points with slope equal to the average
    /// of the one-sided slopes at each interior breakpoint. Changes the function.
    pub fn promote(&self) -> C1Function {
        let s = self.slopes();
        let n = self.breakpoints().len();
        let ds: Vec<f64> = (0..n)
            .map(|i| {
                if i == 0 {
                    to_f64(&s[0])
                } else if i == n - 1 {
                    to_f64(&s[n - 2])
                } else {
                    to_f64(&((&s[i - 1] + &s[i]) / q(2)))
                }
            })
            .collect();
        C1Function {
            xs: self.breakpoints().iter().map(to_f64).collect(),
            ys: self.values().iter().map(to_f64).collect(),
            ds,
        }
    }

    /// The same function as floating-point cells (exact for dyadic data).
    pub fn to_pcw(&self) -> PiecewiseCubic {
        let (xs, ys) = (self.breakpoints(), self.values());
        let s = self.slopes();
        let cells = (0..xs.len() - 1)
            .map(|i| {
                let d = to_f64(&s[i]);
                Cell { x0: to_f64(&xs[i]), x1: to_f64(&xs[i + 1]), y0: to_f64(&ys[i]), y1: to_f64(&ys[i + 1]), d0: d, d1: d }
            })
            .collect();
        PiecewiseCubic::new(cells)
    }
}

/// C¹ piecewise-cubic Hermite function on `[0,1]`.
///
/// Knots are dyadic rationals carried as doubles; values and slopes are doubles.
#[derive(Clone, Debug, PartialEq)]
pub struct C1Function {
    xs: Vec<f64>,
    ys: Vec<f64>,
    ds: Vec<f64>,
}

impl C1Function {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>, ds: Vec<f64>) -> Result<Self> {
        if xs.len() < 2 || xs.len() != ys.len() || xs.len() != ds.len() {
            return arg("knots, values and slopes must have equal length >= 2");
        }
        if xs[0] != 0.0 || *xs.last().unwrap() != 1.0 {
            return arg("knots must start at 0 and end at 1");
        }
        if xs.windows(2).any(|w| !(w[0] < w[1])) {
            return arg("knots must be strictly increasing");
        }
        if ys.iter().chain(&ds).any(|v| !v.is_finite()) {
            return arg("values and slopes must be finite");
        }
        Ok(C1Function { xs, ys, ds })
    }

    pub fn zero() -> Self {
        C1Function { xs: vec![0.0, 1.0], ys: vec![0.0, 0.0], ds: vec![0.0, 0.0] }
    }

    /// `x ↦ slope·x + intercept`.
    pub fn line(slope: f64, intercept: f64) -> Self {
        C1Function { xs: vec![0.0, 1.0], ys: vec![intercept, intercept + slope], ds: vec![slope, slope] }
    }

    pub fn knots(&self) -> &[f64] {
        &self.xs
    }

    pub fn values(&self) -> &[f64] {
        &self.ys
    }

    pub fn slopes(&self) -> &[f64] {
        &self.ds
    }

    fn cell(&self, i: usize) -> Cell {
        Cell { x0: self.xs[i], x1: self.xs[i + 1], y0: self.ys[i], y1: self.ys[i + 1], d0: self.ds[i], d1: self.ds[i + 1] }
    }

    pub fn to_pcw(&self) -> PiecewiseCubic {
        PiecewiseCubic::new((0..self.xs.len() - 1).map(|i| self.cell(i)).collect())
    }

    fn from_pcw(p: &PiecewiseCubic) -> Self {
        let cells = p.cells();
        let mut xs = vec![cells[0].x0];
        let mut ys = vec![cells[0].y0];
        let mut ds = vec![cells[0].d0];
        for c in cells {
            xs.push(c.x1);
            ys.push(c.y1);
            ds.push(c.d1);
        }
        C1Function { xs, ys, ds }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        check_unit(x)?;
        let i = self.xs.partition_point(|k| *k < x).max(1) - 1;
        Ok(self.cell(i.min(self.xs.len() - 2)).eval(x))
    }

    pub fn deriv(&self, x: f64) -> Result<f64> {
        check_unit(x)?;
        let i = self.xs.partition_point(|k| *k < x).max(1) - 1;
        Ok(self.cell(i.min(self.xs.len() - 2)).deriv(x))
    }

    pub fn sup_norm(&self) -> f64 {
        self.to_pcw().sup_norm()
    }

    /// `‖f′‖` from the closed-form extrema of each cell's quadratic derivative.
    pub fn deriv_sup_norm(&self) -> f64 {
        self.to_pcw().deriv_sup_norm()
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_pcw(&self.to_pcw().add(&other.to_pcw()))
    }

    pub fn scale(&self, c: f64) -> Self {
        C1Function {
            xs: self.xs.clone(),
            ys: self.ys.iter().map(|v| v * c).collect(),
            ds: self.ds.iter().map(|v| v * c).collect(),
        }
    }

    pub fn negate(&self) -> Self {
        self.scale(-1.0)
    }

    pub fn reflect(&self) -> Self {
        Self::from_pcw(&self.to_pcw().reflect())
    }
}

fn check_unit(x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("{x} outside [0,1]")));
    }
    Ok(())
}

/// Either function class.
#[derive(Clone, Debug, PartialEq)]
pub enum Function {
    Pwl(PwlFunction),
    C1(C1Function),
}

impl From<PwlFunction> for Function {
    fn from(f: PwlFunction) -> Self {
        Function::Pwl(f)
    }
}

impl From<C1Function> for Function {
    fn from(f: C1Function) -> Self {
        Function::C1(f)
    }
}

impl Function {
    pub fn class(&self) -> &'static str {
        match self {
            Function::Pwl(_) => "pwl",
            Function::C1(_) => "c1",
        }
    }

    pub fn as_pwl(&self) -> Option<&PwlFunction> {
        match self {
            Function::Pwl(f) => Some(f),
            Function::C1(_) => None,
        }
    }

    pub fn to_pcw(&self) -> PiecewiseCubic {
        match self {
            Function::Pwl(f) => f.to_pcw(),
            Function::C1(f) => f.to_pcw(),
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        match self {
            Function::Pwl(f) => Ok(to_f64(&f.eval(&exact_unit(x)?)?)),
            Function::C1(f) => f.eval(x),
        }
    }

    pub fn sup_norm(&self) -> f64 {
        match self {
            Function::Pwl(f) => to_f64(&f.sup_norm()),
            Function::C1(f) => f.sup_norm(),
        }
    }

    /// `‖f-g‖`, exact for two PWL functions and closed-form per cell otherwise.
    pub fn sup_norm_diff(&self, other: &Function) -> f64 {
        match (self, other) {
            (Function::Pwl(a), Function::Pwl(b)) => to_f64(&a.sup_norm_diff(b)),
            _ => self.to_pcw().sup_norm_diff(&other.to_pcw()),
        }
    }

    /// Pointwise sum. A PWL operand joins a cubic one only when it has no
    /// interior kink, since otherwise the sum is not C¹; callers needing that
    /// sum work with `to_pcw().add(..)`.
    pub fn add(&self, other: &Function) -> Result<Function> {
        match (self, other) {
            (Function::Pwl(a), Function::Pwl(b)) => Ok(Function::Pwl(a.add(b))),
            (Function::C1(a), Function::C1(b)) => Ok(Function::C1(a.add(b))),
            (Function::Pwl(a), Function::C1(b)) | (Function::C1(b), Function::Pwl(a)) => {
                if a.breakpoints().len() > 2 && a.slopes().windows(2).any(|w| w[0] != w[1]) {
                    return arg("sum of a kinked PWL function and a C1 function is not C1");
                }
                Ok(Function::C1(a.promote().add(b)))
            }
        }
    }

    pub fn scale(&self, c: f64) -> Function {
        match self {
            Function::Pwl(f) => Function::Pwl(f.scale(&from_f64(c))),
            Function::C1(f) => Function::C1(f.scale(c)),
        }
    }

    pub fn negate(&self) -> Function {
        match self {
            Function::Pwl(f) => Function::Pwl(f.negate()),
            Function::C1(f) => Function::C1(f.negate()),
        }
    }

    pub fn reflect(&self) -> Function {
        match self {
            Function::Pwl(f) => Function::Pwl(f.reflect()),
            Function::C1(f) => Function::C1(f.reflect()),
        }
    }

    pub fn to_json(&self) -> FunctionJson {
        match self {
            Function::Pwl(f) => FunctionJson {
                class: "pwl".into(),
                knots: f.breakpoints().iter().map(fmt_q).collect(),
                values: f.values().iter().map(fmt_q).collect(),
                slopes: None,
            },
            Function::C1(f) => FunctionJson {
                class: "c1".into(),
                knots: f.knots().iter().map(|v| fmt_f64(*v)).collect(),
                values: f.values().iter().map(|v| fmt_f64(*v)).collect(),
                slopes: Some(f.slopes().iter().map(|v| fmt_f64(*v)).collect()),
            },
        }
    }

    pub fn from_json(j: &FunctionJson) -> Result<Function> {
        let field = |name: &str, e: Error| Error::Input(format!("field `{name}`: {e}"));
        match j.class.as_str() {
            "pwl" => {
                let xs = j.knots.iter().map(|s| parse_q(s)).collect::<Result<Vec<_>>>().map_err(|e| field("knots", e))?;
                let ys = j.values.iter().map(|s| parse_q(s)).collect::<Result<Vec<_>>>().map_err(|e| field("values", e))?;
                Ok(Function::Pwl(PwlFunction::new(xs, ys).map_err(|e| field("knots", e))?))
            }
            "c1" => {
                let xs = j.knots.iter().map(|s| parse_f64(s)).collect::<Result<Vec<_>>>().map_err(|e| field("knots", e))?;
                let ys = j.values.iter().map(|s| parse_f64(s)).collect::<Result<Vec<_>>>().map_err(|e| field("values", e))?;
                let slopes = j.slopes.as_ref().ok_or_else(|| Error::Input("field `slopes`: required for class c1".into()))?;
                let ds = slopes.iter().map(|s| parse_f64(s)).collect::<Result<Vec<_>>>().map_err(|e| field("slopes", e))?;
                Ok(Function::C1(C1Function::new(xs, ys, ds).map_err(|e| field("knots", e))?))
            }
            other => Err(Error::Input(format!("field `class`: unknown function class {other:?}"))),
        }
    }

    /// `x,f(x)` rows on a uniform grid of `n+1` points, with a header.
    pub fn to_csv(&self, n: usize) -> String {
        let mut s = String::from("x,f\n");
        for i in 0..=n {
            let x = i as f64 / n as f64;
            s.push_str(&format!("{},{}\n", fmt_f64(x), fmt_f64(self.eval(x).unwrap())));
        }
        s
    }
}

fn exact_unit(x: f64) -> Result<Q> {
    check_unit(x)?;
    Ok(from_f64(x))
}

/// Shortest round-trip decimal for a double.
pub fn fmt_f64(v: f64) -> String {
    if v == 0.0 || (1e-5..1e16).contains(&v.abs()) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

pub fn parse_f64(s: &str) -> Result<f64> {
    if s.contains('/') {
        return Ok(to_f64(&parse_q(s)?));
    }
    s.trim().parse::<f64>().map_err(|_| Error::Input(format!("not a number: {s:?}")))
}

/// External JSON form `{class, knots, values, slopes?}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct FunctionJson {
    pub class: String,
    pub knots: Vec<String>,
    pub values: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub slopes: Option<Vec<String>>,
}

impl Serialize for Function {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Function {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Function::from_json(&FunctionJson::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

impl Serialize for C1Function {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        Function::C1(self.clone()).to_json().serialize(s)
    }
}

impl<'de> Deserialize<'de> for C1Function {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match Function::from_json(&FunctionJson::deserialize(d)?).map_err(serde::de::Error::custom)? {
            Function::C1(f) => Ok(f),
            Function::Pwl(_) => Err(serde::de::Error::custom("field `class`: expected c1")),
        }
    }
}

/// Open sup-norm ball `B(center, radius)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SupNormBall {
    pub center: Function,
    pub radius: f64,
}

impl SupNormBall {
    pub fn new(center: Function, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return arg("ball radius must be positive");
        }
        Ok(SupNormBall { center, radius })
    }

    pub fn contains(&self, f: &Function) -> bool {
        self.center.sup_norm_diff(f) < self.radius
    }

    /// `B(g,β) ⊂ B(f,α)` holds when `‖g-f‖ + β ≤ α`.
    pub fn contains_ball(&self, other: &SupNormBall) -> bool {
        self.center.sup_norm_diff(&other.center) + other.radius <= self.radius
    }
}

/// Values are rounded to this dyadic grid so they are exact as doubles too.
const VALUE_GRID_BITS: i32 = 30;

/// Midpoint-displacement random function with `2^depth + 1` breakpoints.
///
/// Endpoints are uniform in `[-1,1]`; level `k` displaces midpoints by a uniform
/// amount of size at most `decay^k`.
pub fn random_function(seed: u64, depth: u32, decay: f64) -> PwlFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 1usize << depth;
    let mut v = vec![0.0f64; n + 1];
    v[0] = snap(rng.gen_range(-1.0..=1.0));
    v[n] = snap(rng.gen_range(-1.0..=1.0));
    let mut step = n;
    let mut amp = 1.0;
    while step > 1 {
        amp *= decay;
        let h = step / 2;
        for i in (h..n).step_by(step) {
            let mid = 0.5 * (v[i - h] + v[i + h]);
            v[i] = snap(mid + amp * rng.gen_range(-1.0..=1.0));
        }
        step = h;
    }
    let denom = num_bigint::BigInt::from(n);
    let xs = (0..=n).map(|i| Q::new(i.into(), denom.clone())).collect();
    let ys = v.iter().map(|y| from_f64(*y)).collect();
    PwlFunction { inner: PiecewiseLinear::from_parts(xs, ys) }
}

fn snap(y: f64) -> f64 {
    let s = (2.0f64).powi(VALUE_GRID_BITS);
    (y * s).round() / s
}

/// A random C¹ function: the promoted midpoint-displacement function.
pub fn random_c1(seed: u64, depth: u32, decay: f64) -> C1Function {
    random_function(seed, depth, decay).promote()
}
