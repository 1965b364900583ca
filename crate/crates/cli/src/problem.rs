//! Turns a [`RawConfig`] into library objects. Everything here fails with a
//! validation error; numerical failures only happen once a command runs.

use critrad_core::cover::BallFamily;
use critrad_core::weights::sweep_balls;
use critrad_core::{
    Domain, GridFunction, Measure, RadiusGrid, RhoFunction, VariableExponent,
};

use crate::config::{MeasureArg, RadiiKind, RawConfig};
use crate::error::CliError;

pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_PAIR_BUDGET: usize = 1_000_000;

#[derive(Debug)]
pub struct Problem {
    pub raw: RawConfig,
    pub domain: Domain,
}

fn at_line(raw: &RawConfig, section: &str, key: &str, msg: impl std::fmt::Display) -> CliError {
    match raw.line(section, key) {
        Some(l) => CliError::Validation(format!("line {l}: [{section}] {key}: {msg}")),
        None => CliError::Validation(format!("[{section}] {key}: {msg}")),
    }
}

impl Problem {
    pub fn new(raw: RawConfig) -> Result<Self, CliError> {
        let dim: usize = raw.require("domain", "dim")?;
        let half_width: f64 = raw.require("domain", "half_width")?;
        let n: usize = raw.require("domain", "n")?;
        let domain = Domain::new(dim, half_width, n)
            .map_err(|e| at_line(&raw, "domain", "dim", e))?;
        for key in ["p", "w", "v", "rho", "f"] {
            if let Some(e) = raw.expr(key)? {
                if e.max_variable() > dim {
                    return Err(at_line(
                        &raw,
                        "functions",
                        key,
                        format!("uses x{} on a {dim}-dimensional domain", e.max_variable()),
                    ));
                }
            }
        }
        Ok(Problem { raw, domain })
    }

    fn sampled(&self, key: &str) -> Result<Option<GridFunction>, CliError> {
        let Some(e) = self.raw.expr(key)? else { return Ok(None) };
        e.sample(&self.domain).map(Some).map_err(|m| at_line(&self.raw, "functions", key, m))
    }

    fn required(&self, key: &str) -> Result<GridFunction, CliError> {
        self.sampled(key)?
            .ok_or_else(|| CliError::Validation(format!("missing [functions] {key}")))
    }

    pub fn exponent(&self) -> Result<VariableExponent, CliError> {
        VariableExponent::new(self.required("p")?)
            .map_err(|e| at_line(&self.raw, "functions", "p", e))
    }

    /// The weight, `1` when absent.
    pub fn weight(&self) -> Result<GridFunction, CliError> {
        let w = self.sampled("w")?.unwrap_or_else(|| GridFunction::constant(self.domain, 1.0));
        w.ensure_positive().map_err(|e| at_line(&self.raw, "functions", "w", e))?;
        Ok(w)
    }

    pub fn rho(&self) -> Result<Option<RhoFunction>, CliError> {
        match self.sampled("rho")? {
            None => Ok(None),
            Some(r) => RhoFunction::new(r)
                .map(Some)
                .map_err(|e| at_line(&self.raw, "functions", "rho", e)),
        }
    }

    pub fn require_rho(&self) -> Result<RhoFunction, CliError> {
        self.rho()?.ok_or_else(|| CliError::Validation("missing [functions] rho".into()))
    }

    pub fn potential(&self) -> Result<Option<GridFunction>, CliError> {
        let v = self.sampled("v")?;
        if let Some(v) = &v {
            if !v.is_nonneg() {
                return Err(at_line(&self.raw, "functions", "v", "potential must be nonnegative"));
            }
        }
        Ok(v)
    }

    pub fn function(&self) -> Result<GridFunction, CliError> {
        self.required("f")
    }

    pub fn radii(&self) -> Result<RadiusGrid, CliError> {
        let raw = &self.raw;
        let kind = raw.get("radii", "kind")?.unwrap_or(RadiiKind::Log);
        let h = self.domain.spacing();
        let min = raw.get("radii", "min")?.unwrap_or(h);
        let max = raw.get("radii", "max")?.unwrap_or(2.0 * self.domain.half_width());
        let grid = match kind {
            RadiiKind::Log => {
                let count = raw.get("radii", "count")?.unwrap_or(24);
                RadiusGrid::log_spaced(min, max, count)
            }
            RadiiKind::Lattice => RadiusGrid::lattice_complete(&self.domain, min, max),
            RadiiKind::List => {
                let values = raw.list("radii", "values")?.ok_or_else(|| {
                    CliError::Validation("[radii] kind = list needs `values`".into())
                })?;
                RadiusGrid::new(values)
            }
        };
        grid.map_err(|e| at_line(raw, "radii", "kind", e))
    }

    /// `(stride, interior, radii)` of the ball sweep. The radii come from
    /// `[sweep] radii`, else from the radius grid.
    pub fn sweep_spec(&self) -> Result<(usize, bool, RadiusGrid), CliError> {
        let raw = &self.raw;
        let stride = raw.get("sweep", "stride")?.unwrap_or((self.domain.cells_per_axis() / 16).max(1));
        let interior = raw.get("sweep", "interior")?.unwrap_or(false);
        let radii = match raw.list("sweep", "radii")? {
            Some(v) => RadiusGrid::new(v).map_err(|e| at_line(raw, "sweep", "radii", e))?,
            None => self.radii()?,
        };
        Ok((stride, interior, radii))
    }

    pub fn sweep(&self, domain: &Domain) -> Result<BallFamily, CliError> {
        let (stride, interior, radii) = self.sweep_spec()?;
        sweep_balls(domain, stride, &radii, interior)
            .map_err(|e| at_line(&self.raw, "sweep", "stride", e))
    }

    /// Radii scanned for the critical radius of a potential: `count` (32)
    /// log-spaced radii from `h/2` to `2L` unless overridden.
    pub fn potential_radii(&self) -> Result<RadiusGrid, CliError> {
        let raw = &self.raw;
        let min = raw.get("radii", "potential_min")?.unwrap_or(self.domain.spacing() / 2.0);
        let max = raw.get("radii", "potential_max")?.unwrap_or(2.0 * self.domain.half_width());
        let count = raw.get("radii", "potential_count")?.unwrap_or(32);
        RadiusGrid::log_spaced(min, max, count).map_err(|e| at_line(raw, "radii", "potential_min", e))
    }

    pub fn measure(&self) -> Result<Measure, CliError> {
        Ok(self.raw.get::<MeasureArg>("run", "measure")?.map_or(Measure::Clipped, |m| m.0))
    }

    pub fn thetas(&self) -> Result<Vec<f64>, CliError> {
        let t = self.raw.list("run", "thetas")?.unwrap_or_else(|| vec![0.0, 0.5, 1.0, 2.0, 4.0]);
        if t.iter().any(|&x: &f64| !(x >= 0.0) || !x.is_finite()) {
            return Err(at_line(&self.raw, "run", "thetas", "theta must be finite and nonnegative"));
        }
        Ok(t)
    }

    pub fn n0_grid(&self) -> Result<Vec<f64>, CliError> {
        Ok(self.raw.list("run", "n0")?.unwrap_or_else(|| vec![1.0, 2.0, 3.0, 4.0]))
    }

    pub fn seed(&self) -> Result<u64, CliError> {
        Ok(self.raw.get("run", "seed")?.unwrap_or(DEFAULT_SEED))
    }

    pub fn pair_budget(&self) -> Result<usize, CliError> {
        Ok(self.raw.get("run", "pair_budget")?.unwrap_or(DEFAULT_PAIR_BUDGET))
    }

    pub fn positive(&self, key: &str, default: f64) -> Result<f64, CliError> {
        let v = self.raw.get("run", key)?.unwrap_or(default);
        if !(v > 0.0) || !f64::is_finite(v) {
            return Err(at_line(&self.raw, "run", key, "must be positive and finite"));
        }
        Ok(v)
    }

    /// Same problem on another domain, for box ladders.
    pub fn on(&self, domain: Domain) -> Problem {
        Problem { raw: self.raw.clone(), domain }
    }
}
