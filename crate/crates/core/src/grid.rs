//! Uniform cell-centered grids, grid functions, balls and fast ball sums.
//!
//! Cell `(i_0, .., i_{d-1})` has center `-L + (i_k + 1/2) h` on axis `k`,
//! with `h = 2L / n`. Values are stored row-major with axis 0 slowest, so a
//! "row" is a run of cells along the last axis.
//!
//! A cell belongs to a ball when its center lies strictly inside it. When a
//! ball is centered exactly at a cell center the distance is computed from
//! integer lattice offsets (`|delta|^2 h^2 < r^2`), which makes membership
//! translation invariant and free of rounding ties.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{self, pairwise_sum};

pub const MAX_DIM: usize = 3;

/// A point of the ambient space; coordinates past the domain dimension are 0.
pub type Point = [f64; MAX_DIM];

/// Spans shorter than this are summed directly instead of through the
/// prefix table.
const SHORT_SPAN: i64 = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Domain {
    dim: usize,
    half_width: f64,
    cells_per_axis: usize,
    spacing: f64,
}

impl Domain {
    pub fn new(dim: usize, half_width: f64, cells_per_axis: usize) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::InvalidDimension(dim));
        }
        if !(half_width > 0.0 && half_width.is_finite()) || cells_per_axis < 2 {
            return Err(Error::NonPositiveSize);
        }
        Ok(Domain {
            dim,
            half_width,
            cells_per_axis,
            spacing: 2.0 * half_width / cells_per_axis as f64,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn cells_per_axis(&self) -> usize {
        self.cells_per_axis
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Total number of cells, `n^dim`.
    pub fn len(&self) -> usize {
        self.cells_per_axis.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of rows along the last axis, `n^(dim-1)`.
    pub fn rows(&self) -> usize {
        self.cells_per_axis.pow(self.dim as u32 - 1)
    }

    /// Volume of one cell, `h^dim`.
    pub fn cell_measure(&self) -> f64 {
        let mut m = 1.0;
        for _ in 0..self.dim {
            m *= self.spacing;
        }
        m
    }

    /// Center coordinate of index `i` on any axis. Indices outside `0..n`
    /// address the infinite extension of the lattice.
    #[inline]
    pub fn axis_coord(&self, i: i64) -> f64 {
        -self.half_width + (i as f64 + 0.5) * self.spacing
    }

    pub fn multi_index(&self, index: usize) -> [usize; MAX_DIM] {
        let n = self.cells_per_axis;
        let mut out = [0; MAX_DIM];
        let mut rest = index;
        for k in (0..self.dim).rev() {
            out[k] = rest % n;
            rest /= n;
        }
        out
    }

    pub fn linear_index(&self, idx: &[usize; MAX_DIM]) -> usize {
        let n = self.cells_per_axis;
        let mut out = 0;
        for &i in idx.iter().take(self.dim) {
            out = out * n + i;
        }
        out
    }

    pub fn center(&self, index: usize) -> Point {
        let idx = self.multi_index(index);
        let mut p = [0.0; MAX_DIM];
        for k in 0..self.dim {
            p[k] = self.axis_coord(idx[k] as i64);
        }
        p
    }

    /// Euclidean norm of the first `dim` coordinates.
    pub fn norm(&self, p: &Point) -> f64 {
        let mut s = 0.0;
        for &x in p.iter().take(self.dim) {
            s += x * x;
        }
        math::sqrt(s)
    }

    pub fn contains_point(&self, p: &Point) -> bool {
        p.iter()
            .take(self.dim)
            .all(|&x| x >= -self.half_width && x <= self.half_width)
    }

    /// The cell whose closed box contains `p`; points on the outer face
    /// belong to the last cell.
    pub fn locate(&self, p: &Point) -> Option<usize> {
        if !self.contains_point(p) {
            return None;
        }
        let n = self.cells_per_axis;
        let mut idx = [0; MAX_DIM];
        for k in 0..self.dim {
            let i = math::floor((p[k] + self.half_width) / self.spacing) as i64;
            idx[k] = i.clamp(0, n as i64 - 1) as usize;
        }
        Some(self.linear_index(&idx))
    }

    /// Geometric containment of the closed ball in the closed box.
    pub fn contains_ball(&self, ball: &Ball) -> bool {
        ball.center
            .iter()
            .take(self.dim)
            .all(|&c| math::abs(c) + ball.radius <= self.half_width)
    }

    /// Lattice index of `center` when it coincides with a cell center of the
    /// (extended) lattice, up to `1e-9 h` per axis.
    pub fn anchor(&self, center: &Point) -> Option<[i64; MAX_DIM]> {
        let mut out = [0i64; MAX_DIM];
        for k in 0..self.dim {
            let t = (center[k] + self.half_width) / self.spacing - 0.5;
            let i = libm::round(t);
            if math::abs(t - i) > 1e-9 {
                return None;
            }
            out[k] = i as i64;
        }
        Some(out)
    }

    /// Membership of a cell in a ball; the definition every fast path
    /// reproduces exactly.
    pub fn cell_in_ball(&self, index: usize, ball: &Ball) -> bool {
        let idx = self.multi_index(index);
        let r2 = ball.radius * ball.radius;
        match self.anchor(&ball.center) {
            Some(a) => {
                let mut s: i64 = 0;
                for k in 0..self.dim {
                    let d = idx[k] as i64 - a[k];
                    s += d * d;
                }
                (s as f64) * (self.spacing * self.spacing) < r2
            }
            None => {
                let mut s = 0.0;
                for k in 0..self.dim {
                    let d = self.axis_coord(idx[k] as i64) - ball.center[k];
                    s += d * d;
                }
                s < r2
            }
        }
    }

    /// Calls `visit(outer, lo, hi)` for every row segment of cells inside
    /// `ball`; `outer` holds the indices of the leading axes and `lo..=hi`
    /// the range on the last axis. With `clip` the segments are restricted
    /// to the domain, otherwise they range over the infinite lattice.
    pub(crate) fn for_each_span<F>(&self, ball: &Ball, clip: bool, mut visit: F)
    where
        F: FnMut(&[i64; MAX_DIM], i64, i64),
    {
        let n = self.cells_per_axis as i64;
        let last = self.dim - 1;
        let r2 = ball.radius * ball.radius;
        let (lo_bound, hi_bound) = if clip { (0, n - 1) } else { (i64::MIN / 4, i64::MAX / 4) };

        match self.anchor(&ball.center) {
            Some(a) => {
                let h2 = self.spacing * self.spacing;
                let k = math::ceil(ball.radius / self.spacing) as i64;
                let mut outer = [0i64; MAX_DIM];
                let mut ranges = [(0i64, 0i64); MAX_DIM];
                for ax in 0..last {
                    ranges[ax] = ((a[ax] - k).max(lo_bound), (a[ax] + k).min(hi_bound));
                    if ranges[ax].0 > ranges[ax].1 {
                        return;
                    }
                }
                for_each_outer(&ranges, last, &mut outer, &mut |outer| {
                    let mut s: i64 = 0;
                    for ax in 0..last {
                        let d = outer[ax] - a[ax];
                        s += d * d;
                    }
                    if (s as f64) * h2 >= r2 {
                        return;
                    }
                    let inside = |m: i64| ((s + m * m) as f64) * h2 < r2;
                    let mut m = math::floor(math::sqrt((r2 / h2 - s as f64).max(0.0))) as i64;
                    while m > 0 && !inside(m) {
                        m -= 1;
                    }
                    while inside(m + 1) {
                        m += 1;
                    }
                    let lo = (a[last] - m).max(lo_bound);
                    let hi = (a[last] + m).min(hi_bound);
                    if lo <= hi {
                        visit(outer, lo, hi);
                    }
                });
            }
            None => {
                let c = ball.center;
                let r = ball.radius;
                let h = self.spacing;
                let l = self.half_width;
                let mut ranges = [(0i64, 0i64); MAX_DIM];
                for ax in 0..last {
                    let lo = math::floor((c[ax] - r + l) / h - 0.5) as i64;
                    let hi = math::ceil((c[ax] + r + l) / h - 0.5) as i64;
                    ranges[ax] = (lo.max(lo_bound), hi.min(hi_bound));
                    if ranges[ax].0 > ranges[ax].1 {
                        return;
                    }
                }
                let mut outer = [0i64; MAX_DIM];
                for_each_outer(&ranges, last, &mut outer, &mut |outer| {
                    let mut partial = 0.0;
                    for ax in 0..last {
                        let d = self.axis_coord(outer[ax]) - c[ax];
                        partial += d * d;
                    }
                    if partial >= r2 {
                        return;
                    }
                    let inside = |j: i64| {
                        let d = self.axis_coord(j) - c[last];
                        partial + d * d < r2
                    };
                    let half = math::sqrt(r2 - partial);
                    let mut lo = math::ceil((c[last] - half + l) / h - 0.5) as i64;
                    let mut hi = math::floor((c[last] + half + l) / h - 0.5) as i64;
                    while inside(lo - 1) {
                        lo -= 1;
                    }
                    while lo <= hi && !inside(lo) {
                        lo += 1;
                    }
                    while inside(hi + 1) {
                        hi += 1;
                    }
                    while hi >= lo && !inside(hi) {
                        hi -= 1;
                    }
                    let lo = lo.max(lo_bound);
                    let hi = hi.min(hi_bound);
                    if lo <= hi {
                        visit(outer, lo, hi);
                    }
                });
            }
        }
    }

    /// Linear index of the first cell of the row addressed by `outer`
    /// (which must lie inside the domain).
    #[inline]
    pub(crate) fn row_base(&self, outer: &[i64; MAX_DIM]) -> usize {
        let n = self.cells_per_axis;
        let mut row = 0;
        for &o in outer.iter().take(self.dim - 1) {
            row = row * n + o as usize;
        }
        row * n
    }

    /// Indices of the cells inside `ball`, in increasing order.
    pub fn cells_in_ball(&self, ball: &Ball) -> Vec<usize> {
        let mut out = Vec::new();
        self.for_each_span(ball, true, |outer, lo, hi| {
            let base = self.row_base(outer);
            out.extend((lo..=hi).map(|j| base + j as usize));
        });
        out
    }

    /// Number of lattice points of the infinite grid extension inside `ball`.
    pub fn lattice_count(&self, ball: &Ball) -> usize {
        let mut count = 0;
        self.for_each_span(ball, false, |_, lo, hi| count += (hi - lo + 1) as usize);
        count
    }
}

fn for_each_outer<F>(
    ranges: &[(i64, i64); MAX_DIM],
    depth: usize,
    outer: &mut [i64; MAX_DIM],
    f: &mut F,
) where
    F: FnMut(&[i64; MAX_DIM]),
{
    fn go<F: FnMut(&[i64; MAX_DIM])>(
        ranges: &[(i64, i64); MAX_DIM],
        ax: usize,
        depth: usize,
        outer: &mut [i64; MAX_DIM],
        f: &mut F,
    ) {
        if ax == depth {
            f(outer);
            return;
        }
        for i in ranges[ax].0..=ranges[ax].1 {
            outer[ax] = i;
            go(ranges, ax + 1, depth, outer, f);
        }
    }
    go(ranges, 0, depth, outer, f)
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Ball {
    pub center: Point,
    pub radius: f64,
}

impl Ball {
    /// `center` may have up to three coordinates; missing ones are 0.
    pub fn new(center: &[f64], radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) || center.len() > MAX_DIM {
            return Err(Error::InvalidBall);
        }
        if center.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidBall);
        }
        let mut c = [0.0; MAX_DIM];
        c[..center.len()].copy_from_slice(center);
        Ok(Ball { center: c, radius })
    }

    /// The concentric ball with radius scaled by `beta`.
    pub fn dilate(&self, beta: f64) -> Ball {
        Ball { center: self.center, radius: self.radius * beta }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    domain: Domain,
    values: Vec<f64>,
    nonneg: bool,
}

impl GridFunction {
    pub fn new(domain: Domain, values: Vec<f64>) -> Result<Self> {
        if values.len() != domain.len() {
            return Err(Error::LengthMismatch { expected: domain.len(), found: values.len() });
        }
        if let Some(cell) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue { cell });
        }
        let nonneg = values.iter().all(|&v| v >= 0.0);
        Ok(GridFunction { domain, values, nonneg })
    }

    pub fn from_fn<F: Fn(&Point) -> f64>(domain: Domain, f: F) -> Result<Self> {
        let values = (0..domain.len()).map(|i| f(&domain.center(i))).collect();
        Self::new(domain, values)
    }

    /// Panics if `c` is not finite.
    pub fn constant(domain: Domain, c: f64) -> Self {
        assert!(c.is_finite(), "constant grid function must be finite");
        GridFunction { domain, values: vec![c; domain.len()], nonneg: c >= 0.0 }
    }

    pub fn zeros(domain: Domain) -> Self {
        Self::constant(domain, 0.0)
    }

    pub fn indicator(domain: Domain, ball: &Ball) -> Self {
        let mut values = vec![0.0; domain.len()];
        for i in domain.cells_in_ball(ball) {
            values[i] = 1.0;
        }
        GridFunction { domain, values, nonneg: true }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_nonneg(&self) -> bool {
        self.nonneg
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|&v| v == 0.0)
    }

    pub fn ensure_same_domain(&self, other: &GridFunction) -> Result<()> {
        if self.domain == other.domain {
            Ok(())
        } else {
            Err(Error::DomainMismatch)
        }
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Result<Self> {
        Self::new(self.domain, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn abs(&self) -> Self {
        GridFunction {
            domain: self.domain,
            values: self.values.iter().map(|v| math::abs(*v)).collect(),
            nonneg: true,
        }
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        self.map(|v| c * v)
    }

    pub fn zip_with<F: Fn(f64, f64) -> f64>(&self, other: &GridFunction, f: F) -> Result<Self> {
        self.ensure_same_domain(other)?;
        let values = self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect();
        Self::new(self.domain, values)
    }

    pub fn mul(&self, other: &GridFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn add(&self, other: &GridFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    /// Pointwise reciprocal of a strictly positive function.
    pub fn recip(&self) -> Result<Self> {
        self.ensure_positive()?;
        self.map(|v| 1.0 / v)
    }

    pub fn ensure_positive(&self) -> Result<()> {
        match self.values.iter().position(|&v| !(v > 0.0)) {
            Some(cell) => Err(Error::NonPositiveWeight { cell }),
            None => Ok(()),
        }
    }

    /// Copy that keeps the values on `cells` and zeroes the rest.
    pub fn restrict(&self, cells: &[usize]) -> Self {
        let mut values = vec![0.0; self.values.len()];
        for &i in cells {
            values[i] = self.values[i];
        }
        let nonneg = values.iter().all(|&v| v >= 0.0);
        GridFunction { domain: self.domain, values, nonneg }
    }
}

/// Midpoint-rule integral `h^dim * sum(values)`.
pub fn integrate(f: &GridFunction) -> f64 {
    f.domain.cell_measure() * pairwise_sum(&f.values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum Measure {
    /// `|B|` counts lattice points of the infinite grid extension.
    Full,
    /// `|B|` counts only the cells of `B` inside the domain.
    #[default]
    Clipped,
}

/// Sum of a grid function over a ball together with the cell counts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallSum {
    /// `h^dim * sum` over the cells of the ball inside the domain.
    pub integral: f64,
    pub cells: usize,
    pub lattice_cells: usize,
}

/// Per-row prefix sums: each row along the last axis carries its own
/// running sum, so any axis-aligned segment sums in O(1) and a ball in
/// O(rows it crosses).
#[derive(Debug, Clone)]
pub struct PrefixSums {
    domain: Domain,
    values: Vec<f64>,
    table: Vec<f64>,
}

impl PrefixSums {
    pub fn new(f: &GridFunction) -> Self {
        let domain = f.domain;
        let n = domain.cells_per_axis;
        let rows = domain.rows();
        let mut table = vec![0.0; rows * (n + 1)];
        for row in 0..rows {
            let mut acc = 0.0;
            let t = &mut table[row * (n + 1)..(row + 1) * (n + 1)];
            for j in 0..n {
                acc += f.values[row * n + j];
                t[j + 1] = acc;
            }
        }
        PrefixSums { domain, values: f.values.clone(), table }
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    /// Sum of cells `lo..=hi` of the row starting at linear index `base`.
    #[inline]
    fn span_sum(&self, base: usize, lo: i64, hi: i64) -> f64 {
        if hi - lo < SHORT_SPAN {
            let mut acc = 0.0;
            for j in lo..=hi {
                acc += self.values[base + j as usize];
            }
            acc
        } else {
            let n = self.domain.cells_per_axis;
            let row = base / n;
            let t = &self.table[row * (n + 1)..];
            t[hi as usize + 1] - t[lo as usize]
        }
    }

    /// Sum of the values of row `row` between `lo` and `hi` (inclusive).
    pub fn row_sum(&self, row: usize, lo: usize, hi: usize) -> f64 {
        let n = self.domain.cells_per_axis;
        self.span_sum(row * n, lo as i64, hi as i64)
    }

    /// Sum of the values over the inclusive axis-aligned index box.
    pub fn box_sum(&self, lo: [usize; MAX_DIM], hi: [usize; MAX_DIM]) -> f64 {
        let d = self.domain.dim;
        let last = d - 1;
        let mut ranges = [(0i64, 0i64); MAX_DIM];
        for ax in 0..last {
            ranges[ax] = (lo[ax] as i64, hi[ax] as i64);
        }
        let mut acc = 0.0;
        let mut outer = [0i64; MAX_DIM];
        for_each_outer(&ranges, last, &mut outer, &mut |outer| {
            let base = self.domain.row_base(outer);
            acc += self.span_sum(base, lo[last] as i64, hi[last] as i64);
        });
        acc
    }

    /// Raw sum of the values over the cells of `ball` inside the domain,
    /// and the number of those cells.
    pub fn clipped_sum(&self, ball: &Ball) -> (f64, usize) {
        let mut acc = 0.0;
        let mut cells = 0;
        self.domain.for_each_span(ball, true, |outer, lo, hi| {
            acc += self.span_sum(self.domain.row_base(outer), lo, hi);
            cells += (hi - lo + 1) as usize;
        });
        (acc, cells)
    }

    pub fn ball_sum(&self, ball: &Ball) -> BallSum {
        let (acc, cells) = self.clipped_sum(ball);
        BallSum {
            integral: self.domain.cell_measure() * acc,
            cells,
            lattice_cells: self.domain.lattice_count(ball),
        }
    }

    pub fn ball_average(&self, ball: &Ball, measure: Measure) -> Result<f64> {
        let s = self.ball_sum(ball);
        let count = match measure {
            Measure::Full => s.lattice_cells,
            Measure::Clipped => s.cells,
        };
        if count == 0 {
            return Err(Error::EmptyBall);
        }
        Ok(s.integral / (self.domain.cell_measure() * count as f64))
    }

    /// Raw sum and clipped cell count over a lattice ball given by
    /// precomputed row offsets.
    #[inline]
    pub(crate) fn stencil_sum(&self, cell: &[i64; MAX_DIM], stencil: &Stencil) -> (f64, usize) {
        let n = self.domain.cells_per_axis as i64;
        let last = self.domain.dim - 1;
        let mut acc = 0.0;
        let mut count = 0;
        'rows: for row in &stencil.rows {
            let mut outer = [0i64; MAX_DIM];
            for ax in 0..last {
                let i = cell[ax] + row.offset[ax];
                if i < 0 || i >= n {
                    continue 'rows;
                }
                outer[ax] = i;
            }
            let lo = (cell[last] - row.half).max(0);
            let hi = (cell[last] + row.half).min(n - 1);
            if lo <= hi {
                acc += self.span_sum(self.domain.row_base(&outer), lo, hi);
                count += (hi - lo + 1) as usize;
            }
        }
        (acc, count)
    }
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct StencilRow {
    offset: [i64; MAX_DIM],
    half: i64,
}

/// Row decomposition of a lattice-centered ball of fixed radius; applying
/// it at any cell gives the same cells as [`Domain::for_each_span`].
#[derive(Debug, Clone)]
pub(crate) struct Stencil {
    rows: Vec<StencilRow>,
    lattice_cells: usize,
}

impl Stencil {
    pub(crate) fn new(domain: &Domain, radius: f64) -> Self {
        let origin = [0i64; MAX_DIM];
        let mut center = [0.0; MAX_DIM];
        for k in 0..domain.dim {
            center[k] = domain.axis_coord(0);
        }
        let ball = Ball { center, radius };
        let mut rows = Vec::new();
        let mut lattice_cells = 0;
        domain.for_each_span(&ball, false, |outer, lo, hi| {
            lattice_cells += (hi - lo + 1) as usize;
            let mut offset = [0i64; MAX_DIM];
            for ax in 0..domain.dim - 1 {
                offset[ax] = outer[ax] - origin[ax];
            }
            debug_assert_eq!(lo, -hi);
            rows.push(StencilRow { offset, half: hi });
        });
        Stencil { rows, lattice_cells }
    }

    pub(crate) fn lattice_cells(&self) -> usize {
        self.lattice_cells
    }
}

/// Average of `|f|` over `ball`.
pub fn ball_average(f: &GridFunction, ball: &Ball, measure: Measure) -> Result<f64> {
    PrefixSums::new(&f.abs()).ball_average(ball, measure)
}

/// Lattice index of a cell as signed integers.
pub(crate) fn lattice_of(domain: &Domain, index: usize) -> [i64; MAX_DIM] {
    let idx = domain.multi_index(index);
    [idx[0] as i64, idx[1] as i64, idx[2] as i64]
}
