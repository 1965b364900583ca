//! Ball families, the two covering constructions and overlap audits.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::{Ball, Domain, Point};
use crate::math;
use crate::rho::{RhoConstants, RhoFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum FamilyTag {
    CriticalCover,
    SubcriticalCover,
    Sweep,
    User,
}

impl FamilyTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            FamilyTag::CriticalCover => "critical-cover",
            FamilyTag::SubcriticalCover => "subcritical-cover",
            FamilyTag::Sweep => "sweep",
            FamilyTag::User => "user",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct BallFamily {
    balls: Vec<Ball>,
    tag: FamilyTag,
}

impl BallFamily {
    pub fn new(balls: Vec<Ball>, tag: FamilyTag) -> Self {
        BallFamily { balls, tag }
    }

    pub fn balls(&self) -> &[Ball] {
        &self.balls
    }

    pub fn tag(&self) -> FamilyTag {
        self.tag
    }

    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    /// Keeps the balls satisfying `keep`, preserving order and tag.
    pub fn filter<F: FnMut(&Ball) -> bool>(&self, mut keep: F) -> Self {
        BallFamily { balls: self.balls.iter().copied().filter(|b| keep(b)).collect(), tag: self.tag }
    }
}

/// Greedy covering by critical balls: the first uncovered cell `x` (in
/// index order) contributes `B(x, rho(x))` until every cell is covered.
pub fn critical_covering(rho: &RhoFunction) -> BallFamily {
    let d = rho.domain();
    let mut covered = vec![false; d.len()];
    let mut balls = Vec::new();
    for cell in 0..d.len() {
        if covered[cell] {
            continue;
        }
        let ball = Ball { center: d.center(cell), radius: rho.at(cell) };
        for i in d.cells_in_ball(&ball) {
            covered[i] = true;
        }
        balls.push(ball);
    }
    BallFamily::new(balls, FamilyTag::CriticalCover)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SubcriticalCovering {
    pub family: BallFamily,
    pub delta0: f64,
    /// `c1 * beta^(d (N0 + 1))`.
    pub count_bound: f64,
    pub c1: f64,
    /// Every cell of `B0` lies in some ball of the family.
    pub covers_b0: bool,
}

/// Packing constant of the covering count bound: the chosen points are
/// `delta0/4`-separated inside `B0`, so at most `(1 + 8 r / delta0)^d` of
/// them fit, which is at most `(9 c 3^N0)^d beta^(d (N0+1))`.
pub fn count_constant(constants: &RhoConstants, dim: usize) -> f64 {
    math::pow(9.0 * constants.c_rho * math::pow(3.0, constants.n0), dim as f64)
}

/// Covering of `B0 = B(x0, r)` with `rho(x0) < r <= beta rho(x0)` by balls of
/// radius `delta0 / 4`, where
/// `delta0 = rho(x0) / (c (1 + 2r/rho(x0))^N0)` bounds `rho` from below on
/// `2 B0`. Centers form a maximal `delta0/4`-separated set of the cell
/// centers in `B0`, chosen greedily in index order, so the balls of radius
/// `delta0/8` are pairwise disjoint.
pub fn subcritical_covering(
    b0: &Ball,
    rho: &RhoFunction,
    beta: f64,
    constants: &RhoConstants,
) -> Result<SubcriticalCovering> {
    let d = *rho.domain();
    let rho0 = rho.at_point(&b0.center)?;
    let r = b0.radius;
    if !(beta > 1.0) || !(rho0 < r && r <= beta * rho0) {
        return Err(Error::HypothesisViolation { radius: r, rho_center: rho0, beta });
    }
    let delta0 = rho0 / (constants.c_rho * math::pow(1.0 + 2.0 * r / rho0, constants.n0));
    if delta0 / 8.0 < d.spacing() {
        return Err(Error::GridTooCoarse { delta0, spacing: d.spacing() });
    }
    let sep = delta0 / 4.0;
    let sep2 = sep * sep;
    let dim = d.dim();
    let key = |p: &Point| {
        let mut k = [0i64; 3];
        for a in 0..dim {
            k[a] = math::floor(p[a] / sep) as i64;
        }
        k
    };
    let mut buckets: BTreeMap<[i64; 3], Vec<Point>> = BTreeMap::new();
    let mut chosen: Vec<Point> = Vec::new();
    let cells = d.cells_in_ball(b0);
    for &cell in &cells {
        let p = d.center(cell);
        let k = key(&p);
        let mut ok = true;
        'search: for off in neighbours(dim) {
            let nk = [k[0] + off[0], k[1] + off[1], k[2] + off[2]];
            if let Some(pts) = buckets.get(&nk) {
                for q in pts {
                    let mut s = 0.0;
                    for a in 0..dim {
                        s += (p[a] - q[a]) * (p[a] - q[a]);
                    }
                    if s < sep2 {
                        ok = false;
                        break 'search;
                    }
                }
            }
        }
        if ok {
            buckets.entry(k).or_default().push(p);
            chosen.push(p);
        }
    }
    let balls: Vec<Ball> = chosen.iter().map(|&c| Ball { center: c, radius: sep }).collect();
    let mut hit = vec![false; d.len()];
    for b in &balls {
        for i in d.cells_in_ball(b) {
            hit[i] = true;
        }
    }
    let covers_b0 = cells.iter().all(|&i| hit[i]);
    let c1 = count_constant(constants, dim);
    Ok(SubcriticalCovering {
        family: BallFamily::new(balls, FamilyTag::SubcriticalCover),
        delta0,
        count_bound: c1 * math::pow(beta, dim as f64 * (constants.n0 + 1.0)),
        c1,
        covers_b0,
    })
}

fn neighbours(dim: usize) -> Vec<[i64; 3]> {
    let mut out = vec![[0i64; 3]];
    for a in 0..dim {
        let mut next = Vec::with_capacity(out.len() * 3);
        for o in &out {
            for s in [-1, 0, 1] {
                let mut v = *o;
                v[a] = s;
                next.push(v);
            }
        }
        out = next;
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct OverlapReport {
    pub dilation: f64,
    pub max_overlap: usize,
    /// Least-squares slope of `log max_overlap` against `log beta` over
    /// `beta in {1, 2, 4, 8}`.
    pub fitted_n1: f64,
    /// Every cell lies in some undilated ball.
    pub covered: bool,
    /// `(beta, max_overlap)` for the fitting ladder.
    pub ladder: Vec<(f64, usize)>,
}

pub const OVERLAP_LADDER: [f64; 4] = [1.0, 2.0, 4.0, 8.0];

/// Per-cell number of balls of `family` dilated by `beta` containing it.
pub fn overlap_counts(family: &BallFamily, domain: &Domain, beta: f64) -> Vec<u32> {
    let mut counts = vec![0u32; domain.len()];
    for b in family.balls() {
        domain.for_each_span(&b.dilate(beta), true, |outer, lo, hi| {
            let base = domain.row_base(outer);
            for j in lo..=hi {
                counts[base + j as usize] += 1;
            }
        });
    }
    counts
}

pub fn overlap_audit(family: &BallFamily, domain: &Domain, beta: f64) -> OverlapReport {
    let max_at = |b: f64| overlap_counts(family, domain, b).into_iter().max().unwrap_or(0) as usize;
    let base = overlap_counts(family, domain, 1.0);
    let covered = base.iter().all(|&c| c > 0);
    let ladder: Vec<(f64, usize)> = OVERLAP_LADDER.iter().map(|&b| (b, max_at(b))).collect();
    let pts: Vec<(f64, f64)> = ladder
        .iter()
        .filter(|(_, m)| *m > 0)
        .map(|&(b, m)| (math::ln(b), math::ln(m as f64)))
        .collect();
    let fitted_n1 = if pts.len() < 2 {
        0.0
    } else {
        let k = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        sxy / sxx
    };
    OverlapReport { dilation: beta, max_overlap: max_at(beta), fitted_n1, covered, ladder }
}
