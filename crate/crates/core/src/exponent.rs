//! Variable exponents, conjugates and log-Hölder diagnostics.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::grid::{Domain, GridFunction};
use crate::math;

/// Domains with at most this many cells get an exhaustive pair scan.
pub const ALL_PAIRS_MAX_CELLS: usize = 4096;
/// Number of sampled pairs for larger domains.
pub const SAMPLED_PAIRS: usize = 1_000_000;
pub const PAIR_SEED: u64 = 0x10_6401;

/// A grid function with values in `[1, inf)` and cached extreme values.
#[derive(Debug, Clone, PartialEq)]
pub struct VariableExponent {
    values: GridFunction,
    p_minus: f64,
    p_plus: f64,
}

impl VariableExponent {
    pub fn new(values: GridFunction) -> Result<Self> {
        if let Some(cell) = values.values().iter().position(|&v| !(v >= 1.0)) {
            return Err(Error::ExponentOutOfRange { cell, value: values.values()[cell] });
        }
        Ok(VariableExponent { p_minus: values.min(), p_plus: values.max(), values })
    }

    pub fn constant(domain: Domain, p: f64) -> Result<Self> {
        if !p.is_finite() {
            return Err(Error::ExponentOutOfRange { cell: 0, value: p });
        }
        Self::new(GridFunction::constant(domain, p))
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

    pub fn p_minus(&self) -> f64 {
        self.p_minus
    }

    pub fn p_plus(&self) -> f64 {
        self.p_plus
    }

    pub fn is_constant(&self) -> bool {
        self.p_minus == self.p_plus
    }

    /// `p'(x) = p(x) / (p(x) - 1)`. Cells with `p = 1` would need
    /// `p' = inf`, which this library does not represent.
    pub fn conjugate(&self) -> Result<Self> {
        if let Some(cell) = self.as_slice().iter().position(|&v| v == 1.0) {
            return Err(Error::ConjugateOfOne { cell });
        }
        let values = self.values.map(|p| p / (p - 1.0))?;
        Self::new(values)
    }

    pub(crate) fn require_conjugable(&self) -> Result<()> {
        if let Some(cell) = self.as_slice().iter().position(|&v| v == 1.0) {
            return Err(Error::ConjugateOfOne { cell });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct LogHolderReport {
    pub c_local: f64,
    pub c_infty: f64,
    pub p_infty: f64,
    /// Pair of cells attaining `c_local`.
    pub max_violation_pair: (usize, usize),
}

/// Empirical log-Hölder constants:
/// `c_local = max |p(x) - p(y)| log(e + 1/|x - y|)` over cell pairs and
/// `c_infty = max |p(x) - p_infty| log(e + |x|)`.
///
/// `p_infty` defaults to the mean of `p` over the outermost shell of cells.
pub fn log_holder_constants(p: &VariableExponent, p_infty: Option<f64>) -> LogHolderReport {
    let d = p.domain();
    let v = p.as_slice();
    let len = d.len();

    let pair_term = |i: usize, j: usize| {
        let (a, b) = (d.center(i), d.center(j));
        let mut s = 0.0;
        for k in 0..d.dim() {
            s += (a[k] - b[k]) * (a[k] - b[k]);
        }
        math::abs(v[i] - v[j]) * math::ln(math::E + 1.0 / math::sqrt(s))
    };

    let mut c_local = 0.0;
    let mut pair = (0, 0);
    let mut consider = |i: usize, j: usize| {
        let t = pair_term(i, j);
        if t > c_local {
            c_local = t;
            pair = (i.min(j), i.max(j));
        }
    };
    if len <= ALL_PAIRS_MAX_CELLS {
        for i in 0..len {
            for j in i + 1..len {
                consider(i, j);
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(PAIR_SEED);
        for _ in 0..SAMPLED_PAIRS {
            let i = rng.gen_range(0..len);
            let j = rng.gen_range(0..len);
            if i != j {
                consider(i, j);
            }
        }
    }

    let p_infty = p_infty.unwrap_or_else(|| {
        let n = d.cells_per_axis();
        let (mut s, mut c) = (0.0, 0usize);
        for i in 0..len {
            let m = d.multi_index(i);
            if m.iter().take(d.dim()).any(|&k| k == 0 || k == n - 1) {
                s += v[i];
                c += 1;
            }
        }
        s / c as f64
    });
    let mut c_infty: f64 = 0.0;
    for i in 0..len {
        let x = d.norm(&d.center(i));
        c_infty = c_infty.max(math::abs(v[i] - p_infty) * math::ln(math::E + x));
    }
    LogHolderReport { c_local, c_infty, p_infty, max_violation_pair: pair }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::Expr;
    use alloc::vec::Vec;
    use proptest::prelude::*;

    fn sample(t: &str, d: &Domain) -> GridFunction {
        Expr::parse(t).unwrap().sample(d).unwrap()
    }

    #[test]
    fn make_exponent_examples() {
        let d = Domain::new(2, 1.0, 8).unwrap();
        let p = VariableExponent::constant(d, 2.0).unwrap();
        assert_eq!((p.p_minus(), p.p_plus()), (2.0, 2.0));

        let p = VariableExponent::new(sample("2 + 1/log(e + norm2(x))", &d)).unwrap();
        assert!(p.p_minus() > 2.0 && p.p_plus() <= 3.0);

        let mut vals = alloc::vec![2.0; d.len()];
        vals[5] = 0.9;
        let err = VariableExponent::new(GridFunction::new(d, vals).unwrap()).unwrap_err();
        assert_eq!(err, Error::ExponentOutOfRange { cell: 5, value: 0.9 });
    }

    #[test]
    fn conjugate_examples() {
        let d = Domain::new(1, 1.0, 4).unwrap();
        let c = VariableExponent::constant(d, 2.0).unwrap().conjugate().unwrap();
        assert!(c.as_slice().iter().all(|&v| v == 2.0));
        let c = VariableExponent::constant(d, 3.0).unwrap().conjugate().unwrap();
        assert!(c.as_slice().iter().all(|&v| v == 1.5));
        let p = VariableExponent::new(GridFunction::new(d, alloc::vec![2.0, 1.0, 3.0, 2.0]).unwrap()).unwrap();
        assert_eq!(p.conjugate(), Err(Error::ConjugateOfOne { cell: 1 }));
    }

    #[test]
    fn log_holder_examples() {
        let d = Domain::new(2, 2.0, 16).unwrap();
        let p = VariableExponent::constant(d, 2.5).unwrap();
        let r = log_holder_constants(&p, None);
        assert_eq!((r.c_local, r.c_infty), (0.0, 0.0));

        let p = VariableExponent::new(sample("2 + 1/log(e + norm2(x))", &d)).unwrap();
        let r = log_holder_constants(&p, Some(2.0));
        assert!(r.c_infty <= 1.0 + 1e-12);
        assert!(r.c_infty > 0.99);

        // a jump at the origin: adjacent cells across it differ by 1
        let c: Vec<f64> = [8usize, 16, 32, 64]
            .iter()
            .map(|&n| {
                let d = Domain::new(1, 1.0, n).unwrap();
                let p = VariableExponent::new(sample("2 + (x1 + abs(x1)) / (2 * abs(x1))", &d)).unwrap();
                log_holder_constants(&p, None).c_local
            })
            .collect();
        assert!(c.windows(2).all(|w| w[1] > w[0]), "{c:?}");
    }

    #[test]
    fn sampled_pairs_are_deterministic() {
        let d = Domain::new(2, 1.0, 80).unwrap();
        let p = VariableExponent::new(sample("2 + x1 * x2", &d)).unwrap();
        assert_eq!(log_holder_constants(&p, None), log_holder_constants(&p, None));
    }

    proptest! {
        #[test]
        fn conjugate_is_an_involution(vals in prop::collection::vec(1.01f64..20.0, 16)) {
            let d = Domain::new(2, 1.0, 4).unwrap();
            let p = VariableExponent::new(GridFunction::new(d, vals).unwrap()).unwrap();
            let q = p.conjugate().unwrap();
            let back = q.conjugate().unwrap();
            for i in 0..16 {
                let (a, b) = (p.as_slice()[i], q.as_slice()[i]);
                prop_assert!((back.as_slice()[i] - a).abs() <= 1e-12 * a);
                prop_assert!((1.0 / a + 1.0 / b - 1.0).abs() <= 1e-12);
            }
        }
    }
}
