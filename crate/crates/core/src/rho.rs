//! Critical radius functions.
//!
//! `rho` is critical when there are `c >= 1`, `N0 >= 1` with
//!
//! ```text
//! c^-1 rho(x) (1 + |x-y|/rho(x))^-N0  <=  rho(y)  <=  c rho(x) (1 + |x-y|/rho(x))^(N0/(N0+1))
//! ```
//!
//! for all `x, y`. A ball `B(x, r)` is sub-critical when `r <= rho(x)`.

use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{Ball, Domain, GridFunction, Measure, Point, PrefixSums};
use crate::maximal::RadiusGrid;
use crate::math::{self, per_cell};

#[derive(Debug, Clone, PartialEq)]
pub struct RhoFunction {
    values: GridFunction,
}

impl RhoFunction {
    pub fn new(values: GridFunction) -> Result<Self> {
        if let Some(cell) = values.values().iter().position(|&v| !(v > 0.0)) {
            return Err(Error::NonPositiveRho { cell });
        }
        Ok(RhoFunction { values })
    }

    pub fn constant(domain: Domain, c: f64) -> Result<Self> {
        if !c.is_finite() {
            return Err(Error::NonPositiveRho { cell: 0 });
        }
        Self::new(GridFunction::constant(domain, c))
    }

    pub fn values(&self) -> &GridFunction {
        &self.values
    }

    pub fn as_slice(&self) -> &[f64] {
        self.values.values()
    }

    pub fn domain(&self) -> &Domain {
        self.values.domain()
    }

    #[inline]
    pub fn at(&self, cell: usize) -> f64 {
        self.values.values()[cell]
    }

    /// Value at the cell containing `p`.
    pub fn at_point(&self, p: &Point) -> Result<f64> {
        self.domain().locate(p).map(|c| self.at(c)).ok_or(Error::CenterOutsideDomain)
    }

    /// `beta * rho`.
    pub fn scaled(&self, beta: f64) -> Result<Self> {
        Self::new(self.values.scale(beta)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RhoConstants {
    pub c_rho: f64,
    pub n0: f64,
    /// Ordered pair `(x, y)` forcing the value of `c_rho`.
    pub worst_pair: (usize, usize),
}

/// Fits the constants of the critical-radius inequalities.
///
/// For every candidate `N0` the least admissible `c` over the pair sample is
/// computed; the candidate with the smallest `c` wins (ties go to the
/// smaller `N0`). All ordered pairs are used when there are at most
/// `pair_budget` of them, otherwise `pair_budget` random ordered pairs.
pub fn verify_critical(
    rho: &RhoFunction,
    n0_grid: &[f64],
    pair_budget: usize,
    seed: u64,
) -> Result<RhoConstants> {
    if n0_grid.is_empty() || n0_grid.iter().any(|&n| !(n >= 1.0) || !n.is_finite()) {
        return Err(Error::InvalidParameter("N0 candidates must be finite and at least 1"));
    }
    let mut cands: Vec<f64> = n0_grid.to_vec();
    cands.sort_by(f64::total_cmp);
    cands.dedup();

    let d = rho.domain();
    let len = d.len();
    let ln_rho: Vec<f64> = rho.as_slice().iter().map(|&r| math::ln(r)).collect();
    let centers: Vec<Point> = (0..len).map(|i| d.center(i)).collect();
    let dim = d.dim();

    // log of the least admissible c for the pair (x, y), per candidate
    let pair_logs = |x: usize, y: usize, out: &mut [(f64, (usize, usize))]| {
        let mut s = 0.0;
        for k in 0..dim {
            let t = centers[x][k] - centers[y][k];
            s += t * t;
        }
        let l = math::ln(1.0 + math::sqrt(s) / rho.at(x));
        for (slot, &n0) in out.iter_mut().zip(&cands) {
            let lower = ln_rho[x] - n0 * l - ln_rho[y];
            let upper = ln_rho[y] - ln_rho[x] - n0 / (n0 + 1.0) * l;
            let v = lower.max(upper);
            if v > slot.0 {
                *slot = (v, (x, y));
            }
        }
    };

    let fresh = || vec![(0.0f64, (0usize, 0usize)); cands.len()];
    let partials: Vec<Vec<(f64, (usize, usize))>> =
        if len.saturating_mul(len.saturating_sub(1)) <= pair_budget {
            per_cell(len, |x| {
                let mut out = fresh();
                for y in 0..len {
                    if y != x {
                        pair_logs(x, y, &mut out);
                    }
                }
                out
            })
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut out = fresh();
            let mut drawn = 0;
            while drawn < pair_budget {
                let x = rng.gen_range(0..len);
                let y = rng.gen_range(0..len);
                if x != y {
                    pair_logs(x, y, &mut out);
                    drawn += 1;
                }
            }
            vec![out]
        };

    let mut best = fresh();
    for part in &partials {
        for (b, p) in best.iter_mut().zip(part) {
            if p.0 > b.0 {
                *b = *p;
            }
        }
    }
    let mut choice = 0;
    for k in 1..cands.len() {
        if best[k].0 < best[choice].0 {
            choice = k;
        }
    }
    Ok(RhoConstants {
        c_rho: math::exp(best[choice].0),
        n0: cands[choice],
        worst_pair: best[choice].1,
    })
}

/// `B.radius <= rho(center)`, with `rho` read at the cell containing the center.
pub fn is_subcritical(rho: &RhoFunction, ball: &Ball) -> Result<bool> {
    Ok(ball.radius <= rho.at_point(&ball.center)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum Clamp {
    None,
    /// No radius of the grid was feasible; the smallest one is reported.
    Below,
    /// The largest radius of the grid was feasible.
    Above,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialRho {
    pub rho: RhoFunction,
    pub clamp: Vec<Clamp>,
}

impl PotentialRho {
    pub fn clamped_cells(&self) -> usize {
        self.clamp.iter().filter(|&&c| c != Clamp::None).count()
    }
}

pub const POTENTIAL_RELATIVE_WIDTH: f64 = 1e-6;

/// `rho_V(x) = sup { r : r^(2-d) int_{B(x,r)} V <= 1 }`, with the integral
/// clipped to the domain and `d` the domain dimension.
///
/// The largest feasible radius of `radii` is refined by bisection towards
/// the next grid radius. Results are clamped to the grid range.
pub fn rho_from_potential(v: &GridFunction, radii: &RadiusGrid) -> Result<PotentialRho> {
    if !v.is_nonneg() {
        return Err(Error::InvalidParameter("potential must be nonnegative"));
    }
    if v.is_zero() {
        return Err(Error::PotentialIdenticallyZero);
    }
    let d = *v.domain();
    let pre = PrefixSums::new(v);
    let expo = 2.0 - d.dim() as f64;
    let r = radii.radii();

    let results = per_cell(d.len(), |cell| {
        let center = d.center(cell);
        let f = |radius: f64| {
            let s = pre.clipped_sum(&Ball { center, radius }).0 * d.cell_measure();
            math::pow(radius, expo) * s
        };
        let feasible = r.iter().rposition(|&radius| f(radius) <= 1.0);
        match feasible {
            None => (r[0], Clamp::Below),
            Some(k) if k + 1 == r.len() => (r[k], Clamp::Above),
            Some(k) => {
                let (mut lo, mut hi) = (r[k], r[k + 1]);
                while hi - lo > POTENTIAL_RELATIVE_WIDTH * hi {
                    let mid = 0.5 * (lo + hi);
                    if f(mid) <= 1.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                (lo, Clamp::None)
            }
        }
    });
    let (values, clamp): (Vec<f64>, Vec<Clamp>) = results.into_iter().unzip();
    Ok(PotentialRho { rho: RhoFunction::new(GridFunction::new(d, values)?)?, clamp })
}

/// `sup_B (avg_B V^q)^(1/q) / avg_B V` over `balls`, clipped averages.
pub fn reverse_holder_constant(v: &GridFunction, q: f64, balls: &[Ball]) -> Result<f64> {
    if !(q > 1.0) {
        return Err(Error::InvalidParameter("reverse Hölder exponent must exceed 1"));
    }
    if balls.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let a = v.abs();
    let vq = a.map(|x| math::pow(x, q))?;
    let (p1, pq) = (PrefixSums::new(&a), PrefixSums::new(&vq));
    let mut best: f64 = 0.0;
    for (k, b) in balls.iter().enumerate() {
        let m1 = p1.ball_average(b, Measure::Clipped)?;
        if !(m1 > 0.0) {
            return Err(Error::ZeroMassBall { ball: k });
        }
        let mq = pq.ball_average(b, Measure::Clipped)?;
        best = best.max(math::pow(mq, 1.0 / q) / m1);
    }
    Ok(best)
}
