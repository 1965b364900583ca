//! Muckenhoupt-type constants over finite ball sweeps.
//!
//! For a ball `B` the basic quotient is
//! `q(B) = |B|^-1 ||w chi_B||_p ||w^-1 chi_B||_p'`. The global constant is
//! its max over the sweep, the local one its max over sub-critical balls,
//! and the penalized profile the max of `q(B) (1 + r/rho(x))^-theta`.

use alloc::vec::Vec;

use crate::cover::{BallFamily, FamilyTag};
use crate::error::{Error, Result};
use crate::exponent::VariableExponent;
use crate::grid::{Ball, Domain, GridFunction};
use crate::math::{self, per_cell};
use crate::maximal::RadiusGrid;
use crate::norm::LogTerms;
use crate::rho::{is_subcritical, RhoFunction};

/// Balls centered on the cells whose indices are all multiples of
/// `stride`, one per radius, center-major.
pub fn sweep_balls(
    domain: &Domain,
    stride: usize,
    radii: &RadiusGrid,
    interior_only: bool,
) -> Result<BallFamily> {
    if stride == 0 {
        return Err(Error::InvalidParameter("stride must be at least 1"));
    }
    let n = domain.cells_per_axis();
    if stride > n {
        return Err(Error::EmptySweep);
    }
    let mut balls = Vec::new();
    for cell in 0..domain.len() {
        let idx = domain.multi_index(cell);
        if idx.iter().take(domain.dim()).any(|&i| i % stride != 0) {
            continue;
        }
        let center = domain.center(cell);
        for &r in radii.radii() {
            let b = Ball { center, radius: r };
            if !interior_only || domain.contains_ball(&b) {
                balls.push(b);
            }
        }
    }
    if balls.is_empty() {
        return Err(Error::EmptySweep);
    }
    Ok(BallFamily::new(balls, FamilyTag::Sweep))
}

/// A sup over a ball family and the ball attaining it (first one on ties).
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Witness {
    pub value: f64,
    pub ball: Ball,
    pub index: usize,
}

/// `w`, `w^-1`, `p` and `p'` prepared for repeated ball quotients.
#[derive(Debug, Clone)]
pub struct WeightPair {
    domain: Domain,
    w: Vec<f64>,
    w_inv: Vec<f64>,
    p: Vec<f64>,
    q: Vec<f64>,
}

impl WeightPair {
    pub fn new(w: &GridFunction, p: &VariableExponent) -> Result<Self> {
        if w.domain() != p.domain() {
            return Err(Error::DomainMismatch);
        }
        w.ensure_positive()?;
        let q = p.conjugate()?;
        Ok(WeightPair {
            domain: *w.domain(),
            w: w.values().to_vec(),
            w_inv: w.values().iter().map(|v| 1.0 / v).collect(),
            p: p.as_slice().to_vec(),
            q: q.as_slice().to_vec(),
        })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    /// `(||w chi_E||_p, ||w^-1 chi_E||_p')` for a cell set.
    pub fn norms_on(&self, cells: &[usize]) -> Result<(f64, f64)> {
        let a = LogTerms::on_cells(&self.w, &self.p, &self.domain, cells).norm()?.value;
        let b = LogTerms::on_cells(&self.w_inv, &self.q, &self.domain, cells).norm()?.value;
        Ok((a, b))
    }

    /// `|B|^-1 ||w chi_B||_p ||w^-1 chi_B||_p'`.
    pub fn quotient(&self, ball: &Ball) -> Result<f64> {
        let cells = self.domain.cells_in_ball(ball);
        if cells.is_empty() {
            return Err(Error::EmptyBall);
        }
        let (a, b) = self.norms_on(&cells)?;
        Ok(a * b / (self.domain.cell_measure() * cells.len() as f64))
    }

    pub fn quotients(&self, balls: &[Ball]) -> Result<Vec<f64>> {
        per_cell(balls.len(), |k| self.quotient(&balls[k])).into_iter().collect()
    }
}

fn argmax(values: &[f64], balls: &[Ball], keep: impl Fn(usize) -> bool) -> Option<Witness> {
    let mut best: Option<Witness> = None;
    for (k, &v) in values.iter().enumerate() {
        if keep(k) && best.is_none_or(|b| v > b.value) {
            best = Some(Witness { value: v, ball: balls[k], index: k });
        }
    }
    best
}

pub fn ap_constant(w: &GridFunction, p: &VariableExponent, balls: &BallFamily) -> Result<Witness> {
    let pair = WeightPair::new(w, p)?;
    let q = pair.quotients(balls.balls())?;
    argmax(&q, balls.balls(), |_| true).ok_or(Error::EmptyFamily)
}

fn subcritical_mask(rho: &RhoFunction, balls: &[Ball]) -> Result<Vec<bool>> {
    balls.iter().map(|b| is_subcritical(rho, b)).collect()
}

pub fn ap_local_constant(
    w: &GridFunction,
    p: &VariableExponent,
    rho: &RhoFunction,
    balls: &BallFamily,
) -> Result<Witness> {
    let pair = WeightPair::new(w, p)?;
    let sub = balls.filter(|b| is_subcritical(rho, b).unwrap_or(false));
    if sub.is_empty() {
        return Err(Error::NoSubcriticalBalls);
    }
    let q = pair.quotients(sub.balls())?;
    let w = argmax(&q, sub.balls(), |_| true).ok_or(Error::NoSubcriticalBalls)?;
    // report the index in the original family
    let index = balls.balls().iter().position(|b| *b == w.ball).unwrap_or(w.index);
    Ok(Witness { index, ..w })
}

/// One entry of the penalized profile.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ThetaEntry {
    pub theta: f64,
    pub sup: f64,
    pub witness: Ball,
}

fn profile_from(
    quotients: &[f64],
    balls: &[Ball],
    rho_at_center: &[f64],
    thetas: &[f64],
) -> Result<Vec<ThetaEntry>> {
    let mut out = Vec::with_capacity(thetas.len());
    for &theta in thetas {
        if !(theta >= 0.0) {
            return Err(Error::InvalidParameter("theta must be nonnegative"));
        }
        let vals: Vec<f64> = quotients
            .iter()
            .zip(balls)
            .zip(rho_at_center)
            .map(|((&q, b), &p)| q * math::exp(-theta * math::ln(1.0 + b.radius / p)))
            .collect();
        let w = argmax(&vals, balls, |_| true).ok_or(Error::EmptyFamily)?;
        out.push(ThetaEntry { theta, sup: w.value, witness: w.ball });
    }
    Ok(out)
}

fn rho_at_centers(rho: &RhoFunction, balls: &[Ball]) -> Result<Vec<f64>> {
    balls.iter().map(|b| rho.at_point(&b.center)).collect()
}

/// `sup_B q(B) (1 + r/rho(x))^-theta` for each theta.
pub fn ap_theta_profile(
    w: &GridFunction,
    p: &VariableExponent,
    rho: &RhoFunction,
    thetas: &[f64],
    balls: &BallFamily,
) -> Result<Vec<ThetaEntry>> {
    let pair = WeightPair::new(w, p)?;
    let q = pair.quotients(balls.balls())?;
    profile_from(&q, balls.balls(), &rho_at_centers(rho, balls.balls())?, thetas)
}

/// Default cap for [`theta_star`] relative to the local constant.
pub const THETA_CAP_FACTOR: f64 = 10.0;

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ClassReport {
    pub ap_constant: f64,
    pub ap_local_constant: f64,
    pub theta_profile: Vec<(f64, f64)>,
    /// Profile over the refined sweep, when one was given.
    pub refined_profile: Option<Vec<(f64, f64)>>,
    pub ap_witness: Ball,
    pub ap_local_witness: Ball,
    pub theta_witnesses: Vec<Ball>,
    /// Smallest listed theta whose sup stays below `cap` on both sweeps.
    pub theta_star: Option<f64>,
    pub cap: f64,
    pub balls: usize,
}

/// All three constants on one sweep. `refined` is a denser sweep used to
/// decide `theta_star`; `cap` defaults to `THETA_CAP_FACTOR` times the
/// local constant.
pub fn class_report(
    w: &GridFunction,
    p: &VariableExponent,
    rho: &RhoFunction,
    thetas: &[f64],
    balls: &BallFamily,
    refined: Option<&BallFamily>,
    cap: Option<f64>,
) -> Result<ClassReport> {
    let pair = WeightPair::new(w, p)?;
    let b = balls.balls();
    let q = pair.quotients(b)?;
    let ap = argmax(&q, b, |_| true).ok_or(Error::EmptyFamily)?;
    let sub = subcritical_mask(rho, b)?;
    let loc = argmax(&q, b, |k| sub[k]).ok_or(Error::NoSubcriticalBalls)?;
    let prof = profile_from(&q, b, &rho_at_centers(rho, b)?, thetas)?;
    let cap = cap.unwrap_or(THETA_CAP_FACTOR * loc.value);

    let refined_prof = match refined {
        Some(fam) => {
            let qr = pair.quotients(fam.balls())?;
            Some(profile_from(&qr, fam.balls(), &rho_at_centers(rho, fam.balls())?, thetas)?)
        }
        None => None,
    };
    let theta_star = thetas.iter().enumerate().find_map(|(k, &t)| {
        let ok = prof[k].sup <= cap && refined_prof.as_ref().is_none_or(|r| r[k].sup <= cap);
        ok.then_some(t)
    });
    Ok(ClassReport {
        ap_constant: ap.value,
        ap_local_constant: loc.value,
        theta_profile: prof.iter().map(|e| (e.theta, e.sup)).collect(),
        refined_profile: refined_prof.map(|r| r.iter().map(|e| (e.theta, e.sup)).collect()),
        ap_witness: ap.ball,
        ap_local_witness: loc.ball,
        theta_witnesses: prof.iter().map(|e| e.witness).collect(),
        theta_star,
        cap,
        balls: b.len(),
    })
}

/// `||chi_B w||_p |E| / (||chi_E w||_p |B|)` for a cell set `E` inside `B`.
pub fn subset_inequality_defect(
    w: &GridFunction,
    p: &VariableExponent,
    ball: &Ball,
    e: &[usize],
) -> Result<f64> {
    if e.is_empty() {
        return Err(Error::EmptyCellSet);
    }
    let d = *w.domain();
    let b = d.cells_in_ball(ball);
    if e.iter().any(|i| b.binary_search(i).is_err()) {
        return Err(Error::InvalidParameter("E must lie inside B"));
    }
    w.ensure_positive()?;
    let nb = LogTerms::on_cells(w.values(), p.as_slice(), &d, &b).norm()?.value;
    let ne = LogTerms::on_cells(w.values(), p.as_slice(), &d, e).norm()?.value;
    Ok(nb * e.len() as f64 / (ne * b.len() as f64))
}

/// Local constants for `rho` and `beta rho` over the same sweep.
pub fn beta_invariance_check(
    w: &GridFunction,
    p: &VariableExponent,
    rho: &RhoFunction,
    beta: f64,
    balls: &BallFamily,
) -> Result<(f64, f64)> {
    if !(beta > 0.0) {
        return Err(Error::InvalidParameter("beta must be positive"));
    }
    let pair = WeightPair::new(w, p)?;
    let b = balls.balls();
    let q = pair.quotients(b)?;
    let scaled = rho.scaled(beta)?;
    let s1 = subcritical_mask(rho, b)?;
    let s2 = subcritical_mask(&scaled, b)?;
    let a = argmax(&q, b, |k| s1[k]).ok_or(Error::NoSubcriticalBalls)?;
    let c = argmax(&q, b, |k| s2[k]).ok_or(Error::NoSubcriticalBalls)?;
    Ok((a.value, c.value))
}

/// Global constant of `w chi_Q` on `Q = B(x0, beta rho(x0))`, over the
/// sweep balls meeting `Q`. Norms only see the cells of `B` inside `Q`;
/// `|B|` is the measure of the whole ball.
pub fn restriction_constant(
    w: &GridFunction,
    p: &VariableExponent,
    rho: &RhoFunction,
    x0: &[f64],
    beta: f64,
    balls: &BallFamily,
) -> Result<Witness> {
    let pair = WeightPair::new(w, p)?;
    let d = *w.domain();
    let center = Ball::new(x0, 1.0)?.center;
    let q_ball = Ball { center, radius: beta * rho.at_point(&center)? };
    if !d.contains_ball(&q_ball) {
        return Err(Error::RegionOutsideDomain);
    }
    let mut in_q = alloc::vec![false; d.len()];
    for i in d.cells_in_ball(&q_ball) {
        in_q[i] = true;
    }
    let b = balls.balls();
    let vals = per_cell(b.len(), |k| -> Result<Option<f64>> {
        let cells = d.cells_in_ball(&b[k]);
        let inside: Vec<usize> = cells.iter().copied().filter(|&i| in_q[i]).collect();
        if inside.is_empty() {
            return Ok(None);
        }
        let (x, y) = pair.norms_on(&inside)?;
        Ok(Some(x * y / (d.cell_measure() * cells.len() as f64)))
    });
    let mut best: Option<Witness> = None;
    for (k, v) in vals.into_iter().enumerate() {
        if let Some(v) = v? {
            if best.is_none_or(|w| v > w.value) {
                best = Some(Witness { value: v, ball: b[k], index: k });
            }
        }
    }
    best.ok_or(Error::EmptyFamily)
}
