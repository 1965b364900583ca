//! Boundedness experiments for the maximal operators on weighted spaces.
//!
//! "Bounded" can only show up as a trend on a finite grid: the ratio
//! `||(T f) w||_p / ||f w||_p` is measured over a family of test functions
//! and compared across a ladder of growing boxes at fixed spacing.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exponent::VariableExponent;
use crate::grid::{Ball, Domain, GridFunction, Measure};
use crate::math;
use crate::maximal::{hl_maximal, local_maximal, penalized_average, theta_maximal, RadiusGrid};
use crate::norm::{luxemburg_norm, weighted_norm};
use crate::rho::{
    is_subcritical, reverse_holder_constant, rho_from_potential, verify_critical, PotentialRho,
    RhoConstants, RhoFunction,
};
use crate::weights::{ClassReport, WeightPair};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum Operator {
    /// Hardy–Littlewood maximal function.
    Hl,
    /// Local maximal function.
    Local,
    /// Penalized maximal function with the given theta.
    Theta(f64),
}

impl Operator {
    pub fn apply(
        &self,
        f: &GridFunction,
        rho: &RhoFunction,
        radii: &RadiusGrid,
        measure: Measure,
    ) -> Result<GridFunction> {
        match *self {
            Operator::Hl => hl_maximal(f, radii, measure),
            Operator::Local => local_maximal(f, rho, radii, measure),
            Operator::Theta(t) => theta_maximal(f, rho, t, radii, measure),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Operator::Hl => "M".into(),
            Operator::Local => "Mloc".into(),
            Operator::Theta(t) => format!("Mtheta({t})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    pub id: String,
    pub f: GridFunction,
}

/// Indicators of `balls`, point masses at their centers, the witnesses
/// `w^-1 chi_B`, and `random` uniform fields.
pub fn default_test_family(
    w: &GridFunction,
    balls: &[Ball],
    random: usize,
    seed: u64,
) -> Result<Vec<TestFunction>> {
    let d = *w.domain();
    let w_inv = w.recip()?;
    let mut out = Vec::new();
    for (k, b) in balls.iter().enumerate() {
        let chi = GridFunction::indicator(d, b);
        out.push(TestFunction { id: format!("ball{k}"), f: chi.clone() });
        if let Some(c) = d.locate(&b.center) {
            let mut v = alloc::vec![0.0; d.len()];
            v[c] = 1.0;
            out.push(TestFunction { id: format!("point{k}"), f: GridFunction::new(d, v)? });
        }
        out.push(TestFunction { id: format!("witness{k}"), f: chi.mul(&w_inv)? });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for k in 0..random {
        let v = (0..d.len()).map(|_| rng.gen::<f64>()).collect();
        out.push(TestFunction { id: format!("random{k}"), f: GridFunction::new(d, v)? });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct ExperimentReport {
    pub operator: String,
    pub ratios: Vec<(String, f64)>,
    pub max_ratio: f64,
    /// Test functions skipped because their weighted norm vanished.
    pub skipped: usize,
    pub class_constants: Option<ClassReport>,
    /// `max_ratio` over a ladder of domains, when measured.
    pub refinement_trend: Vec<f64>,
}

/// `||(T f) w||_p / ||f w||_p` for every test function.
pub fn boundedness_ratios(
    op: Operator,
    family: &[TestFunction],
    p: &VariableExponent,
    w: &GridFunction,
    rho: &RhoFunction,
    radii: &RadiusGrid,
    measure: Measure,
) -> Result<ExperimentReport> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    w.ensure_positive()?;
    p.require_conjugable()?;
    let mut ratios = Vec::with_capacity(family.len());
    let mut skipped = 0;
    for t in family {
        let base = weighted_norm(&t.f, p, w)?;
        if base == 0.0 {
            skipped += 1;
            continue;
        }
        let tf = op.apply(&t.f, rho, radii, measure)?;
        ratios.push((t.id.clone(), weighted_norm(&tf, p, w)? / base));
    }
    let max_ratio = ratios.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok(ExperimentReport {
        operator: op.label(),
        ratios,
        max_ratio,
        skipped,
        class_constants: None,
        refinement_trend: Vec::new(),
    })
}

/// Domains with the spacing of `base` and half-widths `L, 2L, 4L, ...`.
pub fn box_ladder(base: &Domain, levels: usize) -> Result<Vec<Domain>> {
    (0..levels)
        .map(|k| {
            let s = 1usize << k;
            Domain::new(base.dim(), base.half_width() * s as f64, base.cells_per_axis() * s)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct NecessityBall {
    pub ball: Ball,
    /// `q(B) psi_eta(B)`.
    pub quotient: f64,
    /// Operator ratio on the dual witness of `w^-1 chi_B`.
    pub witness_ratio: f64,
    /// Operator ratio on `w^-1 chi_B` itself.
    pub plain_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct NecessityReport {
    pub operator: String,
    pub eta: f64,
    pub theta: f64,
    pub max_quotient: f64,
    pub witness: Option<Ball>,
    /// Largest operator ratio over all witnesses.
    pub measured_norm: f64,
    /// `2^(d + eta) c^theta`.
    pub domination_constant: f64,
    /// `max_quotient <= 2 * domination_constant * measured_norm`.
    pub holds: bool,
    pub balls: Vec<NecessityBall>,
}

/// Class quotients penalized by `psi_eta` against the operator norm
/// measured on the witnesses that make the domination argument sharp.
///
/// For each ball the witness is `f = w^-1 u` with `u` the normalized dual
/// profile of `h = w^-1 chi_B` in `L^p'`, so that `||f w||_p = 1` and
/// `psi_eta(B) avg_B |f| ||w chi_B||_p = q(B) psi_eta(B)`. For the local
/// operator only sub-critical balls take part. The radius grid is extended
/// by `2r` for every ball radius `r`.
#[allow(clippy::too_many_arguments)]
pub fn necessity_bound(
    op: Operator,
    p: &VariableExponent,
    w: &GridFunction,
    rho: &RhoFunction,
    eta: f64,
    balls: &[Ball],
    constants: &RhoConstants,
    radii: &RadiusGrid,
    measure: Measure,
) -> Result<NecessityReport> {
    if !(eta >= 0.0) {
        return Err(Error::InvalidParameter("eta must be nonnegative"));
    }
    let d = *w.domain();
    let pair = WeightPair::new(w, p)?;
    let q = p.conjugate()?;
    let w_inv = w.recip()?;
    let theta = match op {
        Operator::Theta(t) => t,
        _ => eta / (constants.n0 + 1.0),
    };
    let doubled: Vec<f64> = balls.iter().map(|b| 2.0 * b.radius).collect();
    let radii = radii.with_extra(&doubled)?;

    let mut out = Vec::new();
    for b in balls {
        if op == Operator::Local && !is_subcritical(rho, b)? {
            continue;
        }
        let cells = d.cells_in_ball(b);
        if cells.is_empty() {
            return Err(Error::EmptyBall);
        }
        let psi = math::exp(-eta * math::ln(1.0 + b.radius / rho.at_point(&b.center)?));
        let quotient = pair.quotient(b)? * psi;

        let h = w_inv.restrict(&cells);
        let nh = luxemburg_norm(&h, &q)?.value;
        let qs = q.as_slice();
        let u: Vec<f64> = h.values().iter().zip(qs).map(|(&v, &e)| math::pow(v / nh, e - 1.0)).collect();
        let u = GridFunction::new(d, u)?;
        let nu = luxemburg_norm(&u, p)?.value;
        let f = u.scale(1.0 / nu)?.mul(&w_inv)?;
        let ratio = |f: &GridFunction| -> Result<f64> {
            let tf = op.apply(f, rho, &radii, measure)?;
            Ok(weighted_norm(&tf, p, w)? / weighted_norm(f, p, w)?)
        };
        out.push(NecessityBall { ball: *b, quotient, witness_ratio: ratio(&f)?, plain_ratio: ratio(&h)? });
    }
    let max = out.iter().fold(None::<&NecessityBall>, |acc, x| match acc {
        Some(a) if a.quotient >= x.quotient => Some(a),
        _ => Some(x),
    });
    let measured_norm = out.iter().map(|x| x.witness_ratio.max(x.plain_ratio)).fold(0.0, f64::max);
    let domination_constant =
        math::pow(2.0, d.dim() as f64 + eta) * math::pow(constants.c_rho, theta);
    let max_quotient = max.map_or(0.0, |m| m.quotient);
    Ok(NecessityReport {
        operator: op.label(),
        eta,
        theta,
        max_quotient,
        witness: max.map(|m| m.ball),
        measured_norm,
        domination_constant,
        holds: max_quotient <= 2.0 * domination_constant * measured_norm,
        balls: out,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchrodingerSettings<'a> {
    /// Balls for the reverse Hölder constant.
    pub rh_balls: &'a [Ball],
    /// Radii scanned for the potential's critical radius.
    pub rho_radii: &'a RadiusGrid,
    pub n0_grid: &'a [f64],
    pub pair_budget: usize,
    pub seed: u64,
    pub thetas: &'a [f64],
    pub family: &'a [TestFunction],
    pub measure: Measure,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SchrodingerReport {
    pub reverse_holder: f64,
    pub rho_min: f64,
    pub rho_max: f64,
    pub clamped_cells: usize,
    pub constants: RhoConstants,
    pub local: ExperimentReport,
    pub theta: Vec<ExperimentReport>,
}

/// Reverse Hölder constant, critical radius of `v`, its fitted constants
/// and the boundedness ratios of the local and penalized operators built
/// on it.
pub fn schrodinger_experiment(
    v: &GridFunction,
    q: f64,
    p: &VariableExponent,
    w: &GridFunction,
    radii: &RadiusGrid,
    s: &SchrodingerSettings<'_>,
) -> Result<(SchrodingerReport, PotentialRho)> {
    if v.is_zero() {
        return Err(Error::PotentialIdenticallyZero);
    }
    let reverse_holder = reverse_holder_constant(v, q, s.rh_balls)?;
    let rv = rho_from_potential(v, s.rho_radii)?;
    let constants = verify_critical(&rv.rho, s.n0_grid, s.pair_budget, s.seed)?;
    let local = boundedness_ratios(Operator::Local, s.family, p, w, &rv.rho, radii, s.measure)?;
    let theta = s
        .thetas
        .iter()
        .map(|&t| boundedness_ratios(Operator::Theta(t), s.family, p, w, &rv.rho, radii, s.measure))
        .collect::<Result<Vec<_>>>()?;
    let report = SchrodingerReport {
        reverse_holder,
        rho_min: rv.rho.values().min(),
        rho_max: rv.rho.values().max(),
        clamped_cells: rv.clamped_cells(),
        constants,
        local,
        theta,
    };
    Ok((report, rv))
}

/// `A^eta_B f <= factor * M_theta f` at every cell, with
/// `factor = 2^(d+eta) c^theta` and `theta = eta / (N0 + 1)`. Returns the
/// largest `A^eta_B f - factor M_theta f` (nonpositive when it holds).
pub fn domination_gap(
    f: &GridFunction,
    ball: &Ball,
    eta: f64,
    rho: &RhoFunction,
    constants: &RhoConstants,
    radii: &RadiusGrid,
    measure: Measure,
) -> Result<f64> {
    let theta = eta / (constants.n0 + 1.0);
    let a = penalized_average(f, ball, eta, rho)?;
    let radii = radii.with_extra(&[2.0 * ball.radius])?;
    let m = theta_maximal(f, rho, theta, &radii, measure)?;
    let factor = math::pow(2.0, f.domain().dim() as f64 + eta) * math::pow(constants.c_rho, theta);
    Ok(a.values()
        .iter()
        .zip(m.values())
        .map(|(x, y)| x - factor * y)
        .fold(f64::NEG_INFINITY, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::maximal::RadiusGrid;
    use crate::weights::sweep_balls;

    #[test]
    fn unit_weight_ratios() {
        let d = Domain::new(1, 2.0, 64).unwrap();
        let p = VariableExponent::constant(d, 2.0).unwrap();
        let one = GridFunction::constant(d, 1.0);
        let rho = RhoFunction::constant(d, 1.0).unwrap();
        let radii = RadiusGrid::default_for(&d);
        let balls = [Ball::new(&[0.0], 0.5).unwrap(), Ball::new(&[1.0], 0.25).unwrap()];
        let mut fam = default_test_family(&one, &balls, 3, 7).unwrap();
        fam.push(TestFunction { id: "zero".into(), f: GridFunction::zeros(d) });
        let hl = boundedness_ratios(Operator::Hl, &fam, &p, &one, &rho, &radii, Measure::Clipped).unwrap();
        let loc = boundedness_ratios(Operator::Local, &fam, &p, &one, &rho, &radii, Measure::Clipped).unwrap();
        assert_eq!(hl.skipped, 1);
        assert!(hl.max_ratio >= 1.0 && hl.max_ratio < 4.0);
        for (a, b) in loc.ratios.iter().zip(&hl.ratios) {
            assert!(a.1 <= b.1);
        }
        let t1 = boundedness_ratios(Operator::Theta(0.5), &fam, &p, &one, &rho, &radii, Measure::Clipped).unwrap();
        let t2 = boundedness_ratios(Operator::Theta(2.0), &fam, &p, &one, &rho, &radii, Measure::Clipped).unwrap();
        for (a, b) in t2.ratios.iter().zip(&t1.ratios) {
            assert!(a.1 <= b.1);
        }
    }

    #[test]
    fn necessity_with_unit_weight() {
        let d = Domain::new(1, 2.0, 64).unwrap();
        let p = VariableExponent::constant(d, 2.0).unwrap();
        let one = GridFunction::constant(d, 1.0);
        let rho = RhoFunction::constant(d, 1.0).unwrap();
        let k = RhoConstants { c_rho: 1.0, n0: 1.0, worst_pair: (0, 0) };
        let radii = RadiusGrid::default_for(&d);
        let balls = sweep_balls(&d, 8, &RadiusGrid::new(alloc::vec![0.3, 0.7]).unwrap(), true).unwrap();
        let r = necessity_bound(Operator::Theta(0.0), &p, &one, &rho, 0.0, balls.balls(), &k, &radii, Measure::Clipped).unwrap();
        assert!(r.balls.iter().all(|b| (b.quotient - 1.0).abs() < 1e-12));
        assert!(r.holds);
        let mut last = f64::INFINITY;
        for eta in [0.0, 0.5, 1.0, 2.0] {
            let r = necessity_bound(Operator::Theta(0.0), &p, &one, &rho, eta, balls.balls(), &k, &radii, Measure::Clipped).unwrap();
            assert!(r.max_quotient <= last);
            last = r.max_quotient;
        }
    }

    #[test]
    fn schrodinger_zero_potential() {
        let d = Domain::new(3, 1.0, 4).unwrap();
        let p = VariableExponent::constant(d, 2.0).unwrap();
        let one = GridFunction::constant(d, 1.0);
        let radii = RadiusGrid::default_for(&d);
        let s = SchrodingerSettings {
            rh_balls: &[],
            rho_radii: &radii,
            n0_grid: &[1.0],
            pair_budget: 100,
            seed: 0,
            thetas: &[],
            family: &[],
            measure: Measure::Clipped,
        };
        assert_eq!(
            schrodinger_experiment(&GridFunction::zeros(d), 2.0, &p, &one, &radii, &s).unwrap_err(),
            Error::PotentialIdenticallyZero
        );
    }
}
