//! Piecewise cubic functions in floating point, with closed-form cell extrema.
//!
//! This is the common numeric backend of both function classes: a C¹ Hermite
//! function is a piecewise cubic whose slopes agree at the knots, and a
//! piecewise-linear function is one whose cells are linear with independent
//! slopes. Cells are contiguous and cover `[0,1]`.

/// One cubic Hermite cell `[x0,x1]` with endpoint values and slopes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cell {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
    pub d0: f64,
    pub d1: f64,
}

impl Cell {
    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    /// Power-basis coefficients in the normalised variable `t = (x-x0)/width`.
    fn coeffs(&self) -> [f64; 4] {
        let h = self.width();
        let (y0, y1, m0, m1) = (self.y0, self.y1, h * self.d0, h * self.d1);
        [y0, m0, 3.0 * (y1 - y0) - 2.0 * m0 - m1, 2.0 * (y0 - y1) + m0 + m1]
    }

    fn t_of(&self, x: f64) -> f64 {
        ((x - self.x0) / self.width()).clamp(0.0, 1.0)
    }

    fn p(c: &[f64; 4], t: f64) -> f64 {
        ((c[3] * t + c[2]) * t + c[1]) * t + c[0]
    }

    fn dp(c: &[f64; 4], t: f64) -> f64 {
        (3.0 * c[3] * t + 2.0 * c[2]) * t + c[1]
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x <= self.x0 {
            return self.y0;
        }
        if x >= self.x1 {
            return self.y1;
        }
        let t = self.t_of(x);
        let (h00, h10, h01, h11) = hermite_basis(t);
        let h = self.width();
        h00 * self.y0 + h10 * h * self.d0 + h01 * self.y1 + h11 * h * self.d1
    }

    pub fn deriv(&self, x: f64) -> f64 {
        if x <= self.x0 {
            return self.d0;
        }
        if x >= self.x1 {
            return self.d1;
        }
        Self::dp(&self.coeffs(), self.t_of(x)) / self.width()
    }

    /// `(min, max)` of the cell's value over `[lo,hi] ∩ [x0,x1]`.
    pub fn value_range(&self, lo: f64, hi: f64) -> (f64, f64) {
        let lo = lo.max(self.x0);
        let hi = hi.min(self.x1);
        let (ta, tb) = (self.t_of(lo), self.t_of(hi));
        let c = self.coeffs();
        let (va, vb) = (self.eval(lo), self.eval(hi));
        let mut mn = va.min(vb);
        let mut mx = va.max(vb);
        for t in quadratic_roots(3.0 * c[3], 2.0 * c[2], c[1]) {
            if t > ta && t < tb {
                let v = Self::p(&c, t);
                mn = mn.min(v);
                mx = mx.max(v);
            }
        }
        (mn, mx)
    }

    /// `(min, max)` of the cell's derivative over `[lo,hi] ∩ [x0,x1]`.
    pub fn deriv_range(&self, lo: f64, hi: f64) -> (f64, f64) {
        let lo = lo.max(self.x0);
        let hi = hi.min(self.x1);
        let (ta, tb) = (self.t_of(lo), self.t_of(hi));
        let c = self.coeffs();
        let h = self.width();
        let da = if lo <= self.x0 { self.d0 } else { Self::dp(&c, ta) / h };
        let db = if hi >= self.x1 { self.d1 } else { Self::dp(&c, tb) / h };
        let mut mn = da.min(db);
        let mut mx = da.max(db);
        if c[3] != 0.0 {
            let t = -c[2] / (3.0 * c[3]);
            if t > ta && t < tb {
                let v = Self::dp(&c, t) / h;
                mn = mn.min(v);
                mx = mx.max(v);
            }
        }
        (mn, mx)
    }

    pub fn sub_linear(&self, a: f64) -> Cell {
        Cell {
            y0: self.y0 - a * self.x0,
            y1: self.y1 - a * self.x1,
            d0: self.d0 - a,
            d1: self.d1 - a,
            ..*self
        }
    }

    /// Restriction of the same cubic to `[lo,hi]`; exact up to rounding since
    /// Hermite interpolation reproduces cubics.
    pub fn restrict(&self, lo: f64, hi: f64) -> Cell {
        Cell {
            x0: lo,
            x1: hi,
            y0: self.eval(lo),
            y1: self.eval(hi),
            d0: self.deriv(lo),
            d1: self.deriv(hi),
        }
    }
}

pub fn hermite_basis(t: f64) -> (f64, f64, f64, f64) {
    let t2 = t * t;
    let t3 = t2 * t;
    (
        2.0 * t3 - 3.0 * t2 + 1.0,
        t3 - 2.0 * t2 + t,
        -2.0 * t3 + 3.0 * t2,
        t3 - t2,
    )
}

/// Real roots of `a t² + b t + c`.
fn quadratic_roots(a: f64, b: f64, c: f64) -> Vec<f64> {
    let scale = a.abs().max(b.abs()).max(c.abs());
    if scale == 0.0 {
        return vec![];
    }
    if a.abs() <= 1e-14 * scale {
        return if b != 0.0 { vec![-c / b] } else { vec![] };
    }
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return vec![];
    }
    let s = disc.sqrt();
    let q = -0.5 * (b + b.signum() * s);
    let mut r = vec![];
    if q != 0.0 {
        r.push(q / a);
        r.push(c / q);
    } else {
        r.push(0.0);
    }
    r
}

/// Contiguous cubic cells covering `[0,1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PiecewiseCubic {
    cells: Vec<Cell>,
}

impl PiecewiseCubic {
    pub fn new(cells: Vec<Cell>) -> Self {
        debug_assert!(!cells.is_empty());
        debug_assert!(cells.windows(2).all(|w| w[0].x1 == w[1].x0));
        PiecewiseCubic { cells }
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    /// Index of the cell containing `x` (the left one at a shared knot).
    pub fn locate(&self, x: f64) -> usize {
        let i = self.cells.partition_point(|c| c.x1 < x);
        i.min(self.cells.len() - 1)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.cells[self.locate(x)].eval(x)
    }

    pub fn sub_linear(&self, a: f64) -> Self {
        PiecewiseCubic { cells: self.cells.iter().map(|c| c.sub_linear(a)).collect() }
    }

    pub fn negate(&self) -> Self {
        let cells = self
            .cells
            .iter()
            .map(|c| Cell { y0: -c.y0, y1: -c.y1, d0: -c.d0, d1: -c.d1, ..*c })
            .collect();
        PiecewiseCubic { cells }
    }

    /// `x ↦ f(1-x)`.
    pub fn reflect(&self) -> Self {
        let cells = self
            .cells
            .iter()
            .rev()
            .map(|c| Cell {
                x0: 1.0 - c.x1,
                x1: 1.0 - c.x0,
                y0: c.y1,
                y1: c.y0,
                d0: -c.d1,
                d1: -c.d0,
            })
            .collect::<Vec<_>>();
        let mut cells = cells;
        let n = cells.len();
        cells[0].x0 = 0.0;
        cells[n - 1].x1 = 1.0;
        for i in 1..n {
            cells[i].x0 = cells[i - 1].x1;
        }
        PiecewiseCubic { cells }
    }

    /// Both functions restricted to the common refinement of their cells.
    pub fn merged_cells(&self, other: &Self) -> Vec<(Cell, Cell)> {
        let mut out = Vec::with_capacity(self.cells.len() + other.cells.len());
        let (mut i, mut j) = (0, 0);
        let mut x = 0.0;
        while i < self.cells.len() && j < other.cells.len() {
            let (a, b) = (&self.cells[i], &other.cells[j]);
            let end = a.x1.min(b.x1);
            if end > x {
                let ca = if a.x0 == x && a.x1 == end { *a } else { a.restrict(x, end) };
                let cb = if b.x0 == x && b.x1 == end { *b } else { b.restrict(x, end) };
                out.push((ca, cb));
                x = end;
            }
            if a.x1 <= end {
                i += 1;
            }
            if b.x1 <= end {
                j += 1;
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let cells = self
            .merged_cells(other)
            .into_iter()
            .map(|(a, b)| Cell { y0: a.y0 + b.y0, y1: a.y1 + b.y1, d0: a.d0 + b.d0, d1: a.d1 + b.d1, ..a })
            .collect();
        PiecewiseCubic { cells }
    }

    pub fn sup_norm(&self) -> f64 {
        self.cells
            .iter()
            .map(|c| {
                let (lo, hi) = c.value_range(c.x0, c.x1);
                lo.abs().max(hi.abs())
            })
            .fold(0.0, f64::max)
    }

    pub fn sup_norm_diff(&self, other: &Self) -> f64 {
        self.merged_cells(other)
            .into_iter()
            .map(|(a, b)| {
                let d = Cell { y0: a.y0 - b.y0, y1: a.y1 - b.y1, d0: a.d0 - b.d0, d1: a.d1 - b.d1, ..a };
                let (lo, hi) = d.value_range(d.x0, d.x1);
                lo.abs().max(hi.abs())
            })
            .fold(0.0, f64::max)
    }

    pub fn deriv_sup_norm(&self) -> f64 {
        self.cells
            .iter()
            .map(|c| {
                let (lo, hi) = c.deriv_range(c.x0, c.x1);
                lo.abs().max(hi.abs())
            })
            .fold(0.0, f64::max)
    }

    pub fn value_range(&self, lo: f64, hi: f64) -> (f64, f64) {
        let (i, k) = (self.locate(lo), self.locate(hi));
        let mut acc = (f64::INFINITY, f64::NEG_INFINITY);
        for c in &self.cells[i..=k] {
            let (a, b) = c.value_range(lo, hi);
            acc = (acc.0.min(a), acc.1.max(b));
        }
        acc
    }
}

/// Sparse tables over per-cell extrema for O(1) range queries.
pub struct RangeIndex<'a> {
    f: &'a PiecewiseCubic,
    vmax: Vec<Vec<f64>>,
    vmin: Vec<Vec<f64>>,
    dmax: Vec<Vec<f64>>,
    dmin: Vec<Vec<f64>>,
}

fn sparse(base: Vec<f64>, pick: fn(f64, f64) -> f64) -> Vec<Vec<f64>> {
    let n = base.len();
    let mut t = vec![base];
    let mut span = 1;
    while 2 * span <= n {
        let prev = t.last().unwrap();
        let next: Vec<f64> = (0..=n - 2 * span).map(|i| pick(prev[i], prev[i + span])).collect();
        t.push(next);
        span *= 2;
    }
    t
}

fn query(t: &[Vec<f64>], i: usize, j: usize, pick: fn(f64, f64) -> f64) -> f64 {
    let len = j - i + 1;
    let lvl = (usize::BITS - 1 - len.leading_zeros()) as usize;
    pick(t[lvl][i], t[lvl][j + 1 - (1 << lvl)])
}

impl<'a> RangeIndex<'a> {
    pub fn new(f: &'a PiecewiseCubic) -> Self {
        let (mut vmax, mut vmin, mut dmax, mut dmin) = (vec![], vec![], vec![], vec![]);
        for c in f.cells() {
            let (a, b) = c.value_range(c.x0, c.x1);
            vmin.push(a);
            vmax.push(b);
            let (a, b) = c.deriv_range(c.x0, c.x1);
            dmin.push(a);
            dmax.push(b);
        }
        RangeIndex {
            f,
            vmax: sparse(vmax, f64::max),
            vmin: sparse(vmin, f64::min),
            dmax: sparse(dmax, f64::max),
            dmin: sparse(dmin, f64::min),
        }
    }

    pub fn function(&self) -> &PiecewiseCubic {
        self.f
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.f.eval(x)
    }

    fn ranged(
        &self,
        lo: f64,
        hi: f64,
        cell: fn(&Cell, f64, f64) -> (f64, f64),
        tmin: &[Vec<f64>],
        tmax: &[Vec<f64>],
    ) -> (f64, f64) {
        let cells = self.f.cells();
        let (i, k) = (self.f.locate(lo), self.f.locate(hi));
        let (mut mn, mut mx) = cell(&cells[i], lo, hi);
        if k > i {
            let (a, b) = cell(&cells[k], lo, hi);
            mn = mn.min(a);
            mx = mx.max(b);
        }
        if k > i + 1 {
            mn = mn.min(query(tmin, i + 1, k - 1, f64::min));
            mx = mx.max(query(tmax, i + 1, k - 1, f64::max));
        }
        (mn, mx)
    }

    /// `(min, max)` of the function over `[lo,hi]`.
    pub fn value_range(&self, lo: f64, hi: f64) -> (f64, f64) {
        self.ranged(lo, hi, Cell::value_range, &self.vmin, &self.vmax)
    }

    /// `(min, max)` of the (one-sided) derivatives over `[lo,hi]`.
    pub fn deriv_range(&self, lo: f64, hi: f64) -> (f64, f64) {
        self.ranged(lo, hi, Cell::deriv_range, &self.dmin, &self.dmax)
    }
}
