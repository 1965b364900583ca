//! Modular, Luxemburg norm and the estimates built on them.
//!
//! The modular is `rho(f / lambda) = h^d * sum |f_i / lambda|^{p_i}` and the
//! norm is the least `lambda` with `rho(f / lambda) <= 1`, found by
//! bisection. Weights act as multipliers: `||f||_{p, w} = ||f w||_p`.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exponent::VariableExponent;
use crate::grid::{integrate, Ball, Domain, GridFunction};
use crate::math::{self, pairwise_sum_by, per_cell};

pub const RELATIVE_WIDTH: f64 = 1e-12;
pub const MAX_ITERATIONS: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct NormResult {
    pub value: f64,
    pub iterations: usize,
    pub bracket: (f64, f64),
}

/// Nonzero cells of a function in log form: `(ln |f_i|, p_i)`.
#[derive(Debug, Clone)]
pub(crate) struct LogTerms {
    ln_f: Vec<f64>,
    p: Vec<f64>,
    p_min: f64,
    p_max: f64,
    cell_measure: f64,
}

impl LogTerms {
    pub(crate) fn new<I>(cell_measure: f64, cells: I) -> Self
    where
        I: IntoIterator<Item = (f64, f64)>,
    {
        let mut ln_f = Vec::new();
        let mut p = Vec::new();
        let mut p_min = f64::INFINITY;
        let mut p_max = f64::NEG_INFINITY;
        for (f, q) in cells {
            let a = math::abs(f);
            if a > 0.0 {
                ln_f.push(math::ln(a));
                p.push(q);
                p_min = p_min.min(q);
                p_max = p_max.max(q);
            }
        }
        LogTerms { ln_f, p, p_min, p_max, cell_measure }
    }

    pub(crate) fn on_cells(values: &[f64], p: &[f64], domain: &Domain, cells: &[usize]) -> Self {
        Self::new(domain.cell_measure(), cells.iter().map(|&i| (values[i], p[i])))
    }

    fn modular(&self, lambda: f64) -> f64 {
        let ll = math::ln(lambda);
        self.cell_measure
            * pairwise_sum_by(self.ln_f.len(), |i| math::exp(self.p[i] * (self.ln_f[i] - ll)))
    }

    pub(crate) fn norm(&self) -> Result<NormResult> {
        if self.ln_f.is_empty() {
            return Ok(NormResult { value: 0.0, iterations: 0, bracket: (0.0, 0.0) });
        }
        let q = self.p_min;
        let s = pairwise_sum_by(self.ln_f.len(), |i| math::exp(q * self.ln_f[i]));
        let lambda0 = math::exp((math::ln(self.cell_measure) + math::ln(s)) / q);
        let m0 = self.modular(lambda0);
        if !m0.is_finite() || !(lambda0 > 0.0) || !lambda0.is_finite() {
            return Err(Error::Overflow);
        }
        if self.p_min == self.p_max {
            // constant exponent: lambda0 is the norm, up to rounding
            let mut v = lambda0;
            let mut iterations = 0;
            while self.modular(v) > 1.0 && iterations < 64 {
                v += v * f64::EPSILON;
                iterations += 1;
            }
            return Ok(NormResult { value: v, iterations, bracket: (lambda0, v) });
        }
        let mut iterations = 0;
        let (mut lo, mut hi);
        if m0 > 1.0 {
            lo = lambda0;
            hi = 2.0 * lambda0;
            while self.modular(hi) > 1.0 {
                lo = hi;
                hi *= 2.0;
                iterations += 1;
                if !hi.is_finite() {
                    return Err(Error::Overflow);
                }
            }
        } else {
            hi = lambda0;
            lo = 0.5 * lambda0;
            while self.modular(lo) <= 1.0 {
                hi = lo;
                lo *= 0.5;
                iterations += 1;
                if lo == 0.0 {
                    return Err(Error::Overflow);
                }
            }
        }
        while hi - lo > RELATIVE_WIDTH * hi && iterations < MAX_ITERATIONS {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.modular(mid) > 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            iterations += 1;
        }
        Ok(NormResult { value: hi, iterations, bracket: (lo, hi) })
    }
}

fn check_domains(f: &GridFunction, p: &VariableExponent) -> Result<()> {
    if f.domain() == p.domain() {
        Ok(())
    } else {
        Err(Error::DomainMismatch)
    }
}

/// `h^d * sum (|f_i| / lambda)^{p_i}`. Panics if the domains differ.
pub fn modular(f: &GridFunction, p: &VariableExponent, lambda: f64) -> f64 {
    assert_eq!(f.domain(), p.domain(), "modular: domain mismatch");
    let terms = LogTerms::new(
        f.domain().cell_measure(),
        f.values().iter().copied().zip(p.as_slice().iter().copied()),
    );
    terms.modular(lambda)
}

pub fn luxemburg_norm(f: &GridFunction, p: &VariableExponent) -> Result<NormResult> {
    check_domains(f, p)?;
    LogTerms::new(
        f.domain().cell_measure(),
        f.values().iter().copied().zip(p.as_slice().iter().copied()),
    )
    .norm()
}

/// `||f w||_{p}` for a strictly positive weight `w`.
pub fn weighted_norm(f: &GridFunction, p: &VariableExponent, w: &GridFunction) -> Result<f64> {
    check_domains(f, p)?;
    f.ensure_same_domain(w)?;
    w.ensure_positive()?;
    Ok(luxemburg_norm(&f.mul(w)?, p)?.value)
}

/// `int |f g| / (||f||_p ||g||_{p'})`; at most 2 by Hölder's inequality.
pub fn holder_defect(f: &GridFunction, g: &GridFunction, p: &VariableExponent) -> Result<f64> {
    f.ensure_same_domain(g)?;
    let q = p.conjugate()?;
    let nf = luxemburg_norm(f, p)?.value;
    let ng = luxemburg_norm(g, &q)?.value;
    if nf == 0.0 || ng == 0.0 {
        return Err(Error::DivisionByZero);
    }
    let fg = f.mul(g)?.abs();
    Ok(integrate(&fg) / nf / ng)
}

/// Pairings `int |f| g` with `||g||_{p'} = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct DualityWitness {
    pub norm: f64,
    /// Pairing with `g = (|f| / ||f||)^{p - 1}`, normalized.
    pub canonical: f64,
    /// Largest pairing over the canonical and the random candidates.
    pub best: f64,
}

pub fn duality_lower_witness(
    f: &GridFunction,
    p: &VariableExponent,
    trials: usize,
    seed: u64,
) -> Result<DualityWitness> {
    check_domains(f, p)?;
    let q = p.conjugate()?;
    if f.is_zero() {
        return Err(Error::ZeroFunction);
    }
    let a = f.abs();
    let norm = luxemburg_norm(&a, p)?.value;
    let pairing = |g: &GridFunction| -> Result<f64> {
        let ng = luxemburg_norm(g, &q)?.value;
        if ng == 0.0 {
            return Ok(0.0);
        }
        Ok(integrate(&a.mul(g)?) / ng)
    };

    let ps = p.as_slice();
    let values = a.values().iter().zip(ps).map(|(&v, &e)| math::pow(v / norm, e - 1.0)).collect();
    let canonical = pairing(&GridFunction::new(*f.domain(), values)?)?;

    let mut best = canonical;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let values = a
            .values()
            .iter()
            .map(|&v| if v > 0.0 { rng.gen::<f64>() } else { 0.0 })
            .collect();
        best = best.max(pairing(&GridFunction::new(*f.domain(), values)?)?);
    }
    Ok(DualityWitness { norm, canonical, best })
}

/// Norm of the step function `sum_B chi_B ||f chi_B||_{p,w} / ||chi_B||_{p,w}`.
pub fn transfer_norm(
    f: &GridFunction,
    p: &VariableExponent,
    w: &GridFunction,
    balls: &[Ball],
) -> Result<f64> {
    check_domains(f, p)?;
    f.ensure_same_domain(w)?;
    w.ensure_positive()?;
    let d = *f.domain();
    let fw = f.mul(w)?;
    let ps = p.as_slice();
    let quotients = per_cell(balls.len(), |k| -> Result<(Vec<usize>, f64)> {
        let cells = d.cells_in_ball(&balls[k]);
        if cells.is_empty() {
            return Err(Error::EmptyBall);
        }
        let top = LogTerms::on_cells(fw.values(), ps, &d, &cells).norm()?.value;
        let bottom = LogTerms::on_cells(w.values(), ps, &d, &cells).norm()?.value;
        Ok((cells, top / bottom))
    });
    let mut step = alloc::vec![0.0; d.len()];
    for q in quotients {
        let (cells, q) = q?;
        for i in cells {
            step[i] += q;
        }
    }
    weighted_norm(&GridFunction::new(d, step)?, p, w)
}

/// Range of `|B| / (||chi_B||_p ||chi_B||_{p'})` over `balls`.
pub fn measure_norm_ratio(p: &VariableExponent, balls: &[Ball]) -> Result<(f64, f64)> {
    let q = p.conjugate()?;
    let d = *p.domain();
    let ones = alloc::vec![1.0; d.len()];
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for b in balls {
        let cells = d.cells_in_ball(b);
        if cells.is_empty() {
            return Err(Error::EmptyBall);
        }
        let np = LogTerms::on_cells(&ones, p.as_slice(), &d, &cells).norm()?.value;
        let nq = LogTerms::on_cells(&ones, q.as_slice(), &d, &cells).norm()?.value;
        let r = d.cell_measure() * cells.len() as f64 / (np * nq);
        lo = lo.min(r);
        hi = hi.max(r);
    }
    if balls.is_empty() {
        return Err(Error::EmptyFamily);
    }
    Ok((lo, hi))
}
