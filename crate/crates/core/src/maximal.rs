//! Maximal operators over a discrete set of radii.
//!
//! Every operator takes averages of `|f|` over balls centered at cell
//! centers, so the sup over `r > 0` becomes a max over a [`RadiusGrid`]:
//!
//! * `M f(x) = max_r avg_{B(x,r)} |f|`
//! * `M_loc f(x)`: only `r <= rho(x)`, plus the endpoint `r = rho(x)`
//! * `M_theta f(x) = max_r (1 + r/rho(x))^-theta avg_{B(x,r)} |f|`
//!
//! The endpoint of the local operator is capped at the largest grid radius,
//! so a grid reaching past every `rho(x)` makes it agree with `M`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::{lattice_of, Ball, Domain, GridFunction, Measure, PrefixSums, Stencil};
use crate::math::{self, per_cell};
use crate::rho::RhoFunction;

/// Ascending, duplicate-free list of positive radii.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RadiusGrid {
    radii: Vec<f64>,
}

impl RadiusGrid {
    pub fn new(mut radii: Vec<f64>) -> Result<Self> {
        if radii.is_empty() || radii.iter().any(|&r| !(r > 0.0) || !r.is_finite()) {
            return Err(Error::InvalidParameter("radii must be positive and finite"));
        }
        radii.sort_by(f64::total_cmp);
        radii.dedup();
        Ok(RadiusGrid { radii })
    }

    /// `count` radii from `rmin` to `rmax` in geometric progression.
    pub fn log_spaced(rmin: f64, rmax: f64, count: usize) -> Result<Self> {
        if !(rmin > 0.0 && rmax >= rmin) || count == 0 {
            return Err(Error::InvalidParameter("need 0 < rmin <= rmax and count >= 1"));
        }
        if count == 1 {
            return Self::new(alloc::vec![rmin]);
        }
        let step = math::ln(rmax / rmin) / (count - 1) as f64;
        let mut radii: Vec<f64> = (0..count).map(|k| rmin * math::exp(step * k as f64)).collect();
        radii[count - 1] = rmax;
        Self::new(radii)
    }

    /// 24 radii from `h` to `2L`.
    pub fn default_for(domain: &Domain) -> Self {
        Self::log_spaced(domain.spacing(), 2.0 * domain.half_width(), 24)
            .expect("domain sizes are positive")
    }

    /// One radius per distinct lattice ball: `h sqrt(k + 1/2)` for every
    /// integer `k >= 0` with the radius in `[rmin, rmax]`. Any ball centered
    /// at a cell center with radius at most `rmax` selects the same cells as
    /// one of these.
    pub fn lattice_complete(domain: &Domain, rmin: f64, rmax: f64) -> Result<Self> {
        let h = domain.spacing();
        let kmax = math::floor((rmax / h) * (rmax / h)) as usize + 1;
        let radii: Vec<f64> = (0..=kmax)
            .map(|k| h * math::sqrt(k as f64 + 0.5))
            .filter(|&r| r >= rmin && r <= rmax)
            .collect();
        Self::new(radii)
    }

    /// Adds the geometric midpoint between each pair of neighbours.
    pub fn refined(&self) -> Self {
        let mut radii = self.radii.clone();
        for w in self.radii.windows(2) {
            radii.push(math::sqrt(w[0] * w[1]));
        }
        Self::new(radii).expect("refinement of a valid grid")
    }

    pub fn with_extra(&self, extra: &[f64]) -> Result<Self> {
        let mut radii = self.radii.clone();
        radii.extend_from_slice(extra);
        Self::new(radii)
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn max(&self) -> f64 {
        self.radii[self.radii.len() - 1]
    }

    pub fn min(&self) -> f64 {
        self.radii[0]
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Ball averages of `|f|` centered at cell centers.
struct Averager {
    domain: Domain,
    pre: PrefixSums,
    stencils: Vec<Stencil>,
    measure: Measure,
}

impl Averager {
    fn new(f: &GridFunction, radii: &RadiusGrid, measure: Measure) -> Self {
        let domain = *f.domain();
        let stencils = radii.radii().iter().map(|&r| Stencil::new(&domain, r)).collect();
        Averager { domain, pre: PrefixSums::new(&f.abs()), stencils, measure }
    }

    /// Average over the `k`-th grid radius, `None` for an empty ball.
    #[inline]
    fn grid(&self, cell: &[i64; 3], k: usize) -> Option<f64> {
        let st = &self.stencils[k];
        let (s, c) = self.pre.stencil_sum(cell, st);
        let count = match self.measure {
            Measure::Clipped => c,
            Measure::Full => st.lattice_cells(),
        };
        (c > 0).then(|| s / count as f64)
    }

    fn at_radius(&self, cell: usize, radius: f64) -> Option<f64> {
        let ball = Ball { center: self.domain.center(cell), radius };
        let (s, c) = self.pre.clipped_sum(&ball);
        let count = match self.measure {
            Measure::Clipped => c,
            Measure::Full => self.domain.lattice_count(&ball),
        };
        (c > 0).then(|| s / count as f64)
    }
}

fn check(f: &GridFunction, rho: &RhoFunction) -> Result<()> {
    if f.domain() == rho.domain() {
        Ok(())
    } else {
        Err(Error::DomainMismatch)
    }
}

#[inline]
fn penalty(theta: f64, r: f64, rho: f64) -> f64 {
    math::exp(-theta * math::ln(1.0 + r / rho))
}

/// Hardy–Littlewood maximal function over the grid radii.
pub fn hl_maximal(f: &GridFunction, radii: &RadiusGrid, measure: Measure) -> Result<GridFunction> {
    let d = *f.domain();
    let avg = Averager::new(f, radii, measure);
    let out = per_cell(d.len(), |cell| {
        let x = lattice_of(&d, cell);
        (0..radii.len()).filter_map(|k| avg.grid(&x, k)).reduce(f64::max).ok_or(Error::AllBallsEmpty { cell })
    });
    GridFunction::new(d, out.into_iter().collect::<Result<Vec<f64>>>()?)
}

/// Local maximal function: radii up to `rho(x)`, endpoint included (capped
/// at the largest grid radius).
pub fn local_maximal(
    f: &GridFunction,
    rho: &RhoFunction,
    radii: &RadiusGrid,
    measure: Measure,
) -> Result<GridFunction> {
    check(f, rho)?;
    let d = *f.domain();
    let avg = Averager::new(f, radii, measure);
    let r = radii.radii();
    let rmax = radii.max();
    let out = per_cell(d.len(), |cell| {
        let x = lattice_of(&d, cell);
        let p = rho.at(cell);
        let mut best = r
            .iter()
            .enumerate()
            .take_while(|(_, &rk)| rk <= p)
            .filter_map(|(k, _)| avg.grid(&x, k))
            .fold(0.0, f64::max);
        if let Some(v) = avg.at_radius(cell, p.min(rmax)) {
            best = best.max(v);
        }
        best
    });
    GridFunction::new(d, out)
}

/// Penalized maximal function `max_r (1 + r/rho(x))^-theta avg_{B(x,r)} |f|`.
pub fn theta_maximal(
    f: &GridFunction,
    rho: &RhoFunction,
    theta: f64,
    radii: &RadiusGrid,
    measure: Measure,
) -> Result<GridFunction> {
    Ok(theta_split(f, rho, theta, radii, measure)?.full)
}

/// The penalized maximal function split at `r = rho(x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaSplit {
    /// Max over grid radii `r <= rho(x)`.
    pub m1: GridFunction,
    /// Max over grid radii `r > rho(x)`; 0 where there are none.
    pub m2: GridFunction,
    /// The full penalized maximal function, `max(m1, m2)`.
    pub full: GridFunction,
    /// Dyadic shell `j` (with `2^(j-1) rho < r <= 2^j rho`) of the radius
    /// attaining `m2`.
    pub shell: Vec<Option<i32>>,
}

pub fn theta_split(
    f: &GridFunction,
    rho: &RhoFunction,
    theta: f64,
    radii: &RadiusGrid,
    measure: Measure,
) -> Result<ThetaSplit> {
    check(f, rho)?;
    if !(theta >= 0.0) || !theta.is_finite() {
        return Err(Error::InvalidParameter("theta must be nonnegative"));
    }
    let d = *f.domain();
    let avg = Averager::new(f, radii, measure);
    let r = radii.radii();
    let out = per_cell(d.len(), |cell| {
        let x = lattice_of(&d, cell);
        let p = rho.at(cell);
        let (mut m1, mut m2) = (0.0f64, 0.0f64);
        let mut arg2: Option<f64> = None;
        for (k, &rk) in r.iter().enumerate() {
            if let Some(a) = avg.grid(&x, k) {
                let v = penalty(theta, rk, p) * a;
                if rk <= p {
                    m1 = m1.max(v);
                } else if arg2.is_none() || v > m2 {
                    m2 = v;
                    arg2 = Some(rk);
                }
            }
        }
        let shell = arg2.map(|rk| math::ceil(libm::log2(rk / p)) as i32);
        (m1, m2, shell)
    });
    let mut m1 = Vec::with_capacity(d.len());
    let mut m2 = Vec::with_capacity(d.len());
    let mut shell = Vec::with_capacity(d.len());
    for (a, b, j) in out {
        m1.push(a);
        m2.push(b);
        shell.push(j);
    }
    let full = m1.iter().zip(&m2).map(|(a, b)| a.max(*b)).collect();
    Ok(ThetaSplit {
        m1: GridFunction::new(d, m1)?,
        m2: GridFunction::new(d, m2)?,
        full: GridFunction::new(d, full)?,
        shell,
    })
}

/// `psi_eta(B) avg_B |f| chi_B` with `psi_eta(B) = (1 + r/rho(x0))^-eta`.
pub fn penalized_average(
    f: &GridFunction,
    ball: &Ball,
    eta: f64,
    rho: &RhoFunction,
) -> Result<GridFunction> {
    check(f, rho)?;
    if !(eta >= 0.0) {
        return Err(Error::InvalidParameter("eta must be nonnegative"));
    }
    let d = *f.domain();
    let psi = penalty(eta, ball.radius, rho.at_point(&ball.center)?);
    let cells = d.cells_in_ball(ball);
    if cells.is_empty() {
        return Err(Error::EmptyBall);
    }
    let pre = PrefixSums::new(&f.abs());
    let (s, c) = pre.clipped_sum(ball);
    let value = psi * (s / c as f64);
    let mut out = alloc::vec![0.0; d.len()];
    for i in cells {
        out[i] = value;
    }
    GridFunction::new(d, out)
}
