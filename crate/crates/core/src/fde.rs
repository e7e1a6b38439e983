//! The fractional Cauchy problem `D^α u = f(t, u)`, `I^{1−α} u(0) = 0`.
//!
//! Solved by Picard iteration on `u = I^α f(·, u)` over `(0, δ)`, with
//! δ-halving when the iteration blows up.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid1D, SampledFunction};
use crate::operators::{rl_derivative, rl_integral, FractionalOrder};
use crate::special;

/// Right-hand sides `f(t, u)`.
#[derive(Clone)]
pub enum Rhs {
    /// `f ≡ c`.
    Constant(f64),
    /// `Γ(μ+1)/Γ(μ+1−α) t^{μ−α} + c (u − t^μ)`, whose solution is `u = t^μ`.
    LinearManufactured { mu: f64, c: f64 },
    /// `λ t^γ u²`.
    PowerLaw { lambda_coef: f64, gamma: f64 },
    /// Arbitrary `f(t, u)`; no convergence promises.
    Custom(Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>),
}

impl fmt::Debug for Rhs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rhs::Constant(c) => write!(f, "Constant({c})"),
            Rhs::LinearManufactured { mu, c } => write!(f, "LinearManufactured {{ mu: {mu}, c: {c} }}"),
            Rhs::PowerLaw { lambda_coef, gamma } => {
                write!(f, "PowerLaw {{ lambda_coef: {lambda_coef}, gamma: {gamma} }}")
            }
            Rhs::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl Rhs {
    /// Pointwise evaluator for order `alpha`.
    fn evaluator(&self, alpha: f64) -> Arc<dyn Fn(f64, f64) -> f64 + Send + Sync> {
        match self.clone() {
            Rhs::Constant(c) => Arc::new(move |_, _| c),
            Rhs::LinearManufactured { mu, c } => {
                let k = special::gamma(mu + 1.0) / special::gamma(mu + 1.0 - alpha);
                Arc::new(move |t, u| k * t.powf(mu - alpha) + c * (u - t.powf(mu)))
            }
            Rhs::PowerLaw { lambda_coef, gamma } => Arc::new(move |t, u| lambda_coef * t.powf(gamma) * u * u),
            Rhs::Custom(f) => f,
        }
    }

    /// Lipschitz constant in `u`, where known globally.
    pub fn lipschitz(&self) -> Option<f64> {
        match self {
            Rhs::Constant(_) => Some(0.0),
            Rhs::LinearManufactured { c, .. } => Some(c.abs()),
            _ => None,
        }
    }
}

/// Function space data used by the contraction horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceParams {
    pub p: f64,
    pub q: f64,
    pub beta: f64,
    pub mu_exp: f64,
}

#[derive(Debug, Clone)]
pub struct CauchyProblem {
    pub alpha: FractionalOrder,
    pub rhs: Rhs,
    /// Horizon δ.
    pub horizon: f64,
    pub lipschitz: f64,
    pub space: Option<SpaceParams>,
}

impl CauchyProblem {
    pub fn new(alpha: FractionalOrder, rhs: Rhs, horizon: f64, lipschitz: f64) -> Result<Self> {
        let p = CauchyProblem { alpha, rhs, horizon, lipschitz, space: None };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.horizon.is_finite() && self.horizon > 0.0) {
            return Err(Error::param("horizon", format!("{} must be positive", self.horizon)));
        }
        if !(self.lipschitz.is_finite() && self.lipschitz >= 0.0) {
            return Err(Error::param("lipschitz", format!("{} must be non-negative", self.lipschitz)));
        }
        if let Rhs::PowerLaw { gamma, .. } = self.rhs {
            let s = self.alpha.value() + gamma;
            if !(s > 0.0 && s < 1.0) {
                return Err(Error::param("gamma", format!("alpha + gamma = {s} must lie in (0, 1)")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct PicardResult {
    pub u: SampledFunction,
    pub iterations: usize,
    /// Sup-norm of `u_{k+1} − u_k`, one entry per iteration.
    pub update_norms: Vec<f64>,
    pub final_update_norm: f64,
    pub converged: bool,
    pub diverged: bool,
    /// Horizon actually used after any halvings.
    pub horizon: f64,
    pub halvings: u32,
    /// `max |D^α u − f(t, u)|` over nodes in `[δ/8, δ]`.
    pub residual_sup: f64,
}

pub const MAX_HALVINGS: u32 = 6;

/// Picard iteration from `u_0 = 0` on `n` cells over `(0, δ)`.
///
/// Stops when the sup-norm update falls below `tol`. Three consecutive
/// growing updates (or a non-finite iterate) count as divergence; the
/// horizon is then halved, at most [`MAX_HALVINGS`] times.
pub fn picard_solve(problem: &CauchyProblem, n: usize, tol: f64, max_iter: usize) -> Result<PicardResult> {
    problem.validate()?;
    if !(tol > 0.0) {
        return Err(Error::param("tol", "must be positive"));
    }
    if max_iter == 0 {
        return Err(Error::param("max_iter", "must be at least 1"));
    }
    if n < 8 {
        return Err(Error::param("n", "need at least 8 cells"));
    }
    let f = problem.rhs.evaluator(problem.alpha.value());
    let mut horizon = problem.horizon;
    let mut halvings = 0;
    loop {
        let run = iterate(&*f, problem.alpha, horizon, n, tol, max_iter)?;
        if !run.diverged || halvings == MAX_HALVINGS {
            return finish(run, &*f, problem.alpha, horizon, halvings);
        }
        horizon *= 0.5;
        halvings += 1;
    }
}

struct Run {
    u: SampledFunction,
    norms: Vec<f64>,
    converged: bool,
    diverged: bool,
}

fn apply_rhs(f: &(dyn Fn(f64, f64) -> f64 + Send + Sync), u: &SampledFunction) -> Result<SampledFunction> {
    let g = u.grid();
    let values = g.nodes().zip(u.values()).map(|(t, &v)| f(t, v)).collect();
    SampledFunction::new(*g, values, false)
}

fn iterate(
    f: &(dyn Fn(f64, f64) -> f64 + Send + Sync),
    alpha: FractionalOrder,
    horizon: f64,
    n: usize,
    tol: f64,
    max_iter: usize,
) -> Result<Run> {
    let grid = Grid1D::over(0.0, horizon, n)?;
    let mut u = SampledFunction::zeros(grid, false);
    let mut norms: Vec<f64> = Vec::new();
    let mut growth = 0;
    for _ in 0..max_iter {
        let next = match apply_rhs(f, &u).and_then(|r| rl_integral(&r, alpha)) {
            Ok(next) => next,
            Err(Error::Data(_)) => return Ok(Run { u, norms, converged: false, diverged: true }),
            Err(e) => return Err(e),
        };
        let update = next
            .values()
            .iter()
            .zip(u.values())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if let Some(&last) = norms.last() {
            growth = if update > last { growth + 1 } else { 0 };
        }
        norms.push(update);
        u = next;
        if update < tol {
            return Ok(Run { u, norms, converged: true, diverged: false });
        }
        if growth >= 3 || !update.is_finite() {
            return Ok(Run { u, norms, converged: false, diverged: true });
        }
    }
    Ok(Run { u, norms, converged: false, diverged: false })
}

fn finish(
    run: Run,
    f: &(dyn Fn(f64, f64) -> f64 + Send + Sync),
    alpha: FractionalOrder,
    horizon: f64,
    halvings: u32,
) -> Result<PicardResult> {
    let residual_sup = if run.diverged {
        f64::INFINITY
    } else {
        let d = rl_derivative(&run.u, alpha)?;
        let rhs = apply_rhs(f, &run.u)?;
        let g = run.u.grid();
        g.nodes()
            .zip(d.values().iter().zip(rhs.values()))
            .filter(|(t, _)| *t >= 0.125 * horizon)
            .map(|(_, (a, b))| (a - b).abs())
            .fold(0.0, f64::max)
    };
    Ok(PicardResult {
        iterations: run.norms.len(),
        final_update_norm: run.norms.last().copied().unwrap_or(0.0),
        update_norms: run.norms,
        converged: run.converged,
        diverged: run.diverged,
        u: run.u,
        horizon,
        halvings,
        residual_sup,
    })
}

/// Contraction horizons for given space exponents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaReport {
    /// `e = (αp−1)/p + (1−μ)/q`.
    pub exponent: f64,
    /// With the factor `((αp−1)/(p−1))^{1/p'}`.
    pub existence: f64,
    /// With the factor `((αq−1)/(q−1))^{1/p'}`.
    pub uniqueness: f64,
}

/// `δ = [Γ(α) r^{1/p'} / (C C_F)]^{1/e}` for both choices of `r`.
pub fn contraction_delta(alpha: f64, p: f64, q: f64, mu_exp: f64, c: f64, c_f: f64) -> Result<DeltaReport> {
    let alpha = FractionalOrder::new(alpha)?.value();
    if !(p > 1.0 && p.is_finite()) {
        return Err(Error::param("p", format!("{p} must be finite and exceed 1")));
    }
    if !(q > 1.0 && q.is_finite()) {
        return Err(Error::param("q", format!("{q} must be finite and exceed 1")));
    }
    if !(alpha * p > 1.0) {
        return Err(Error::param("alpha", format!("need alpha * p > 1, got {}", alpha * p)));
    }
    if !(alpha * q > 1.0) {
        return Err(Error::param("alpha", format!("need alpha * q > 1, got {}", alpha * q)));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::param("C", format!("{c} must be positive")));
    }
    if !(c_f > 0.0 && c_f.is_finite()) {
        return Err(Error::param("C_F", format!("{c_f} must be positive")));
    }
    let exponent = (alpha * p - 1.0) / p + (1.0 - mu_exp) / q;
    if !(exponent > 0.0) {
        return Err(Error::param("exponent", format!("exponent {exponent} must be positive")));
    }
    let inv_pc = 1.0 - 1.0 / p;
    let g = special::gamma(alpha);
    let delta = |r: f64| (g * r.powf(inv_pc) / (c * c_f)).powf(1.0 / exponent);
    Ok(DeltaReport {
        exponent,
        existence: delta((alpha * p - 1.0) / (p - 1.0)),
        uniqueness: delta((alpha * q - 1.0) / (q - 1.0)),
    })
}

/// `u(t) = C t^{−(α+γ)}` solving `D^α u = λ t^γ u²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerSolution {
    pub coefficient: f64,
    pub exponent: f64,
}

/// `C = Γ(1−α−γ) / (λ Γ(1−2α−γ))`, exponent `−(α+γ)`.
pub fn exact_power_solution(alpha: f64, gamma: f64, lambda_coef: f64) -> Result<PowerSolution> {
    let alpha = FractionalOrder::new(alpha)?.value();
    let s = alpha + gamma;
    if !(s > 0.0 && s < 1.0) {
        return Err(Error::param("gamma", format!("alpha + gamma = {s} must lie in (0, 1)")));
    }
    if !(lambda_coef != 0.0 && lambda_coef.is_finite()) {
        return Err(Error::param("lambda_coef", "must be finite and non-zero"));
    }
    let num = special::gamma_checked(1.0 - s, "1-alpha-gamma")?;
    let den = special::gamma_checked(1.0 - 2.0 * alpha - gamma, "1-2*alpha-gamma")?;
    Ok(PowerSolution { coefficient: num / (lambda_coef * den), exponent: -s })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExactSolutionReport {
    pub solution: PowerSolution,
    pub n: usize,
    pub horizon: f64,
    pub interior_cut: f64,
    /// `max |D^α u − λ t^γ u²| / |λ t^γ u²|` on `[cut·δ, δ]`.
    pub max_relative_residual: f64,
}

/// Substitutes the exact power solution into the equation on `n` cells.
///
/// The node at 0 holds `u(δ/(2n))`; the first cell is integrated against the
/// exact power profile.
pub fn verify_exact_solution(
    alpha: f64,
    gamma: f64,
    lambda_coef: f64,
    horizon: f64,
    n: usize,
    interior_cut: f64,
) -> Result<ExactSolutionReport> {
    let solution = exact_power_solution(alpha, gamma, lambda_coef)?;
    if !(interior_cut > 0.0 && interior_cut < 1.0) {
        return Err(Error::param("interior_cut", format!("{interior_cut} must lie in (0, 1)")));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::param("horizon", format!("{horizon} must be positive")));
    }
    let grid = Grid1D::over(0.0, horizon, n)?;
    let PowerSolution { coefficient, exponent } = solution;
    let u = SampledFunction::from_fn_offset(grid, false, |t| coefficient * t.powf(exponent))?
        .with_origin_power(exponent)?;
    let d = rl_derivative(&u, FractionalOrder::new(alpha)?)?;
    let cut = interior_cut * horizon;
    let mut worst = 0.0f64;
    for (i, t) in grid.nodes().enumerate() {
        if t < cut {
            continue;
        }
        let uv = u.values()[i];
        let rhs = lambda_coef * t.powf(gamma) * uv * uv;
        worst = worst.max((d.values()[i] - rhs).abs() / rhs.abs());
    }
    Ok(ExactSolutionReport { solution, n, horizon, interior_cut, max_relative_residual: worst })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn half() -> FractionalOrder {
        FractionalOrder::new(0.5).unwrap()
    }

    #[test]
    fn zero_rhs_is_fixed_after_one_iteration() {
        let p = CauchyProblem::new(half(), Rhs::Constant(0.0), 1.0, 0.0).unwrap();
        let r = picard_solve(&p, 256, 1e-12, 50).unwrap();
        assert!(r.converged);
        assert_eq!(r.iterations, 1);
        assert!(r.u.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn constant_rhs_takes_two_iterations() {
        let p = CauchyProblem::new(half(), Rhs::Constant(1.0), 1.0, 0.0).unwrap();
        let r = picard_solve(&p, 1024, 1e-12, 50).unwrap();
        assert!(r.converged);
        assert_eq!(r.iterations, 2);
        let c = 1.0 / special::gamma(1.5);
        for (t, v) in r.u.grid().nodes().zip(r.u.values()).skip(1) {
            assert!((v - c * t.sqrt()).abs() < 1e-3 * c * t.sqrt() + 1e-12);
        }
    }

    #[test]
    fn manufactured_linear_problem() {
        let rhs = Rhs::LinearManufactured { mu: 1.0, c: 0.1 };
        let p = CauchyProblem::new(half(), rhs, 1.0, 0.1).unwrap();
        let r = picard_solve(&p, 1024, 1e-12, 50).unwrap();
        assert!(r.converged && r.iterations <= 50);
        let err = r.u.grid().nodes().zip(r.u.values()).map(|(t, v)| (v - t).abs()).fold(0.0, f64::max);
        assert!(err < 1e-3, "{err}");
        assert!(r.update_norms.windows(2).skip(1).all(|w| w[1] < w[0]), "{:?}", r.update_norms);
    }

    #[test]
    fn divergence_triggers_halving() {
        // u' = u^2-like blow-up: λ t^γ u² seeded by a constant
        let f: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync> = Arc::new(|_, u| 1.0 + 50.0 * u * u);
        let p = CauchyProblem::new(half(), Rhs::Custom(f), 4.0, 0.0).unwrap();
        let r = picard_solve(&p, 64, 1e-10, 200).unwrap();
        assert!(r.halvings > 0);
        assert!(r.horizon < 4.0);
    }

    #[test]
    fn delta_formula() {
        let d = contraction_delta(0.8, 2.0, 4.0, 0.0, 1.0, 1.0).unwrap();
        assert!((d.exponent - 0.55).abs() < 1e-15);
        // [Γ(0.8) · 0.6^{1/2}]^{1/0.55}
        assert!((d.existence - 0.82870).abs() < 1e-4, "{}", d.existence);
        assert!(contraction_delta(0.4, 2.0, 4.0, 0.0, 1.0, 1.0).is_err());
        assert_eq!(
            contraction_delta(0.8, 2.0, 4.0, 3.0, 1.0, 1.0).unwrap_err().parameter_name(),
            Some("exponent")
        );
        let d2 = contraction_delta(0.8, 2.0, 4.0, 0.0, 2.0, 1.0).unwrap();
        assert!((d2.existence - d.existence * 0.5f64.powf(1.0 / 0.55)).abs() < 1e-14);
    }

    #[test]
    fn exact_power_coefficient() {
        let s = exact_power_solution(0.8, 0.1, 1.0).unwrap();
        assert!((s.coefficient - -2.2260744834822).abs() < 1e-10, "{}", s.coefficient);
        assert!((s.exponent + 0.9).abs() < 1e-15);
        let s2 = exact_power_solution(0.8, 0.1, 2.0).unwrap();
        assert!((s2.coefficient - 0.5 * s.coefficient).abs() < 1e-15);
        let err = exact_power_solution(0.5, 0.0, 1.0).unwrap_err();
        assert_eq!(err.parameter_name(), Some("1-2*alpha-gamma"));
    }
}
