//! Numerical experiments probing operator bounds between Morrey spaces.
//!
//! Every experiment produces rows of `(source norm, target norm, ratio)` or
//! curves whose log-log slope is compared with a predicted exponent.
//! Nothing here proves a bound: a ratio that stays put under refinement and
//! across a family of inputs is evidence, nothing more.

mod experiments;
mod registry;
mod rows;

pub use experiments::*;
pub use registry::*;
pub use rows::*;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::morrey::{Domain, MorreyParams, Side};

/// Relative tolerance for the equality hypotheses of the checked constructors.
const HYPOTHESIS_TOL: f64 = 1e-9;

/// Source and target spaces of an operator bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpacePair {
    pub source: MorreyParams,
    pub target: MorreyParams,
    /// Measure the target in the weak norm.
    #[serde(default)]
    pub weak_target: bool,
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= HYPOTHESIS_TOL * a.abs().max(b.abs()).max(1.0)
}

impl SpacePair {
    /// Any two valid parameter sets with the same side and domain.
    pub fn new(source: MorreyParams, target: MorreyParams, weak_target: bool) -> Result<Self> {
        source.validate()?;
        target.validate()?;
        if source.side != target.side {
            return Err(Error::param("side", "source and target must share a side"));
        }
        if source.domain != target.domain {
            return Err(Error::param("domain", "source and target must share a domain"));
        }
        Ok(SpacePair { source, target, weak_target })
    }

    /// `L^{1,λ}_+(ω) → WL^{1,λ}_+(ω)` on the whole line.
    pub fn weak_type(lambda: f64) -> Result<Self> {
        let params = MorreyParams::new(1.0, lambda, 1.0, Side::Plus, Domain::WholeLine)?;
        SpacePair::new(params, params, true)
    }

    /// `L^{p,β}_+(ω^p) → L^{q,λ}_+(ω^q)` on the whole line for the Weyl
    /// integral of order `α`. Requires `β/p = λ/q`, `1/p = 1/q + α` and
    /// `α − 1/q + (β − 1)/p + 1 < 0`.
    pub fn fractional(alpha: f64, p: f64, q: f64, beta: f64, lambda: f64) -> Result<Self> {
        if !close(beta / p, lambda / q) {
            return Err(Error::param("lambda", format!("β/p = {} differs from λ/q = {}", beta / p, lambda / q)));
        }
        if !close(1.0 / p, 1.0 / q + alpha) {
            return Err(Error::param("q", format!("1/p = {} differs from 1/q + α = {}", 1.0 / p, 1.0 / q + alpha)));
        }
        let gap = alpha - 1.0 / q + (beta - 1.0) / p + 1.0;
        if !(gap < 0.0) {
            return Err(Error::param("beta", format!("α − 1/q + (β − 1)/p + 1 = {gap} must be negative")));
        }
        SpacePair::new(
            MorreyParams::new(p, beta, p, Side::Plus, Domain::WholeLine)?,
            MorreyParams::new(q, lambda, q, Side::Plus, Domain::WholeLine)?,
            false,
        )
    }

    /// `L^{p,β}_+((0,T), ω^p) → L^{q,μ}_+((0,T), ω^q)` for `I^α_{0+}`.
    /// Requires `1 ≤ p < q` and `q + μ ≤ 2`.
    pub fn riemann_liouville(p: f64, q: f64, beta: f64, mu: f64, horizon: f64) -> Result<Self> {
        if !(p >= 1.0 && p < q) {
            return Err(Error::param("q", format!("need 1 <= p < q, got p = {p}, q = {q}")));
        }
        if !(q + mu <= 2.0 + HYPOTHESIS_TOL) {
            return Err(Error::param("mu", format!("q + μ = {} exceeds 2", q + mu)));
        }
        let domain = Domain::Local(horizon);
        SpacePair::new(
            MorreyParams::new(p, beta, p, Side::Plus, domain)?,
            MorreyParams::new(q, mu, q, Side::Plus, domain)?,
            false,
        )
    }

    /// `σ = 1/p − 1/q`.
    pub fn sigma(&self) -> f64 {
        1.0 / self.source.p - 1.0 / self.target.p
    }

    /// Scaling exponent `α + (1 − μ)/q − (1 − β)/p` of an order-`α` operator
    /// between the two spaces under `x ↦ x/T`, for homogeneous weights.
    pub fn scaling_exponent(&self, alpha: f64) -> f64 {
        alpha + (1.0 - self.target.lambda) / self.target.p - (1.0 - self.source.lambda) / self.source.p
    }

    /// Moves a local pair to `(0, T)`; whole-line pairs are unchanged.
    pub fn with_horizon(mut self, horizon: f64) -> Self {
        if let Domain::Local(_) = self.source.domain {
            self.source.domain = Domain::Local(horizon);
            self.target.domain = Domain::Local(horizon);
        }
        self
    }
}

/// Least-squares line through `(ln x, ln y)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    pub points: usize,
}

/// Fits `ln y = slope · ln x + intercept`. Needs `min_points` positive pairs
/// and at least two distinct `x`.
pub fn fit_loglog(xs: &[f64], ys: &[f64], min_points: usize, name: &str) -> Result<LogLogFit> {
    if xs.len() != ys.len() {
        return Err(Error::param(name, "abscissae and ordinates differ in length"));
    }
    if xs.len() < min_points {
        return Err(Error::param(name, format!("need at least {min_points} points, got {}", xs.len())));
    }
    if xs.iter().chain(ys).any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::param(name, "log-log fit needs positive finite values"));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::param(name, "all abscissae coincide"));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Ok(LogLogFit { slope, intercept: my - slope * mx, points: xs.len() })
}
