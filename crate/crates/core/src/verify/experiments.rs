use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{Grid1D, SampledFunction};
use crate::morrey::{self, Domain, MorreyParams};
use crate::operators::{rl_integral, FractionalOrder};
use crate::par;
use crate::weights::WeightSpec;

use super::{fit_loglog, LogLogFit, OperatorId, SpacePair, TestFunction};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RowStatus {
    Ok,
    /// Both norms vanish.
    Skipped,
    /// Zero source norm, nonzero target norm.
    Unbounded,
}

impl RowStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RowStatus::Ok => "ok",
            RowStatus::Skipped => "skipped",
            RowStatus::Unbounded => "unbounded",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioRow {
    pub id: String,
    pub function: TestFunction,
    pub weight: String,
    pub horizon: f64,
    pub n: usize,
    pub source_norm: f64,
    pub target_norm: f64,
    pub ratio: Option<f64>,
    pub status: RowStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioReport {
    pub operator: String,
    pub rows: Vec<RatioRow>,
    /// Largest ratio over `ok` rows; infinite if any row is unbounded.
    pub max_ratio: f64,
}

impl RatioReport {
    /// Largest relative change of a row's ratio between `self` and `finer`.
    /// Rows are paired by id; rows skipped in either report are ignored.
    pub fn drift(&self, finer: &RatioReport) -> f64 {
        let mut worst = 0.0f64;
        for row in &self.rows {
            let Some(other) = finer.rows.iter().find(|r| r.id == row.id) else { continue };
            match (row.ratio, other.ratio) {
                (Some(a), Some(b)) if a.is_finite() && b.is_finite() && a > 0.0 => {
                    worst = worst.max((b - a).abs() / a)
                }
                (Some(a), Some(b)) if a == b => {}
                (Some(_), Some(_)) => worst = f64::INFINITY,
                _ => {}
            }
        }
        worst
    }
}

fn norm(f: &SampledFunction, w: &WeightSpec, params: &MorreyParams, weak: bool) -> Result<f64> {
    Ok(if weak {
        morrey::weak_morrey_norm(f, w, params)?.value
    } else {
        morrey::morrey_norm(f, w, params)?.value
    })
}

fn ratio_row(id: String, function: TestFunction, weight: &WeightSpec, horizon: f64, n: usize, source: f64, target: f64) -> RatioRow {
    let (ratio, status) = if source > 0.0 {
        (Some(target / source), RowStatus::Ok)
    } else if target == 0.0 {
        (None, RowStatus::Skipped)
    } else {
        (Some(f64::INFINITY), RowStatus::Unbounded)
    };
    RatioRow { id, function, weight: weight.label(), horizon, n, source_norm: source, target_norm: target, ratio, status }
}

/// `‖T f‖_target / ‖f‖_source` for each template in `family`, rescaled to
/// `(0, horizon)` and sampled with `n` cells.
pub fn boundedness_experiment(
    op: OperatorId,
    pair: &SpacePair,
    family: &[TestFunction],
    weight: &WeightSpec,
    horizon: f64,
    n: usize,
) -> Result<RatioReport> {
    let pair = pair.with_horizon(horizon);
    if op.whole_line() != (pair.source.domain == Domain::WholeLine) {
        return Err(Error::param("domain", format!("operator {} does not act on this domain", op.label())));
    }
    let rows = par::map_slice(family, |f| -> Result<(f64, f64)> {
        let sample = f.sample(horizon, n)?;
        let source = norm(&sample, weight, &pair.source, false)?;
        let target = norm(&op.apply(&sample)?, weight, &pair.target, pair.weak_target)?;
        Ok((source, target))
    });
    let mut out = Vec::with_capacity(family.len());
    for (i, (f, r)) in family.iter().zip(rows).enumerate() {
        let (s, t) = r?;
        out.push(ratio_row(format!("{i:03}"), *f, weight, horizon, n, s, t));
    }
    let max_ratio = out.iter().filter_map(|r| r.ratio).fold(0.0, f64::max);
    Ok(RatioReport { operator: op.label(), rows: out, max_ratio })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub horizons: Vec<f64>,
    /// Largest family ratio at each horizon.
    pub max_ratios: Vec<f64>,
    pub fit: LogLogFit,
    /// `α + (1 − μ)/q − (1 − β)/p`.
    pub predicted: f64,
}

/// Fits the growth of the family's largest ratio against the horizon `T`.
pub fn scaling_exponent_fit(
    op: OperatorId,
    pair: &SpacePair,
    family: &[TestFunction],
    weight: &WeightSpec,
    horizons: &[f64],
    n: usize,
) -> Result<ScalingReport> {
    if horizons.len() < 4 {
        return Err(Error::param("horizons", format!("need at least 4 horizons, got {}", horizons.len())));
    }
    let mut max_ratios = Vec::with_capacity(horizons.len());
    for &t in horizons {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::param("horizons", format!("{t} is not a positive horizon")));
        }
        max_ratios.push(boundedness_experiment(op, pair, family, weight, t, n)?.max_ratio);
    }
    let fit = fit_loglog(horizons, &max_ratios, 4, "horizons")?;
    Ok(ScalingReport {
        horizons: horizons.to_vec(),
        max_ratios,
        fit,
        predicted: pair.scaling_exponent(op.order()),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompactnessReport {
    /// `sup_f ‖f‖`.
    pub uniform_bound: f64,
    /// Shifts in decreasing order and `sup_f ‖f(· + l) − f‖` for each.
    pub shifts: Vec<f64>,
    pub moduli: Vec<f64>,
    /// Radii in increasing order and `sup_f ‖f χ_{|x| > R}‖` for each.
    pub radii: Vec<f64>,
    pub tails: Vec<f64>,
    pub moduli_decreasing: bool,
    pub tails_decreasing: bool,
}

fn non_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12))
}

fn family_sup(family: &[SampledFunction], op: impl Fn(&SampledFunction) -> Result<f64> + Sync + Send) -> Result<f64> {
    par::map_slice(family, op).into_iter().try_fold(0.0f64, |m, v| Ok(m.max(v?)))
}

/// Fréchet–Kolmogorov style diagnostics of a finite family: uniform bound,
/// translation moduli and tails, all in the norm given by `params`.
pub fn compactness_diagnostics(
    family: &[SampledFunction],
    weight: &WeightSpec,
    params: &MorreyParams,
    shifts: &[f64],
    radii: &[f64],
) -> Result<CompactnessReport> {
    if family.is_empty() {
        return Err(Error::param("family", "is empty"));
    }
    if family.iter().any(|f| !f.grid().same_as(family[0].grid())) {
        return Err(Error::data("family members live on different grids"));
    }
    let mut shifts = shifts.to_vec();
    shifts.sort_by(|a, b| b.total_cmp(a));
    let mut radii = radii.to_vec();
    radii.sort_by(f64::total_cmp);
    let uniform_bound = family_sup(family, |f| norm(f, weight, params, false))?;
    let moduli = shifts
        .iter()
        .map(|&l| family_sup(family, |f| norm(&f.translated(l)?.zip_with(f, |a, b| a - b)?, weight, params, false)))
        .collect::<Result<Vec<_>>>()?;
    let tails = radii
        .iter()
        .map(|&r| {
            family_sup(family, |f| {
                let tail = SampledFunction::from_fn(*f.grid(), f.compact_support(), |x| x)?
                    .zip_with(f, |x, v| if x.abs() > r { v } else { 0.0 })?;
                norm(&tail, weight, params, false)
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CompactnessReport {
        uniform_bound,
        moduli_decreasing: non_increasing(&moduli),
        tails_decreasing: non_increasing(&tails),
        shifts,
        moduli,
        radii,
        tails,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquicontinuityReport {
    pub shifts: Vec<f64>,
    /// `sup ‖I^α f(· + y) − I^α f‖_target` over the normalised ball.
    pub moduli: Vec<f64>,
    pub fit: LogLogFit,
    /// `min(1 − α, (αp − 1)/p)`.
    pub predicted: f64,
}

/// Translation modulus of `I^α_{0+}` on the ball of radius `bound` in the
/// source space, spanned by `ball` (each template normalised to the bound).
/// Needs `(1 + 1/p)/2 < α` and at least two shifts.
#[allow(clippy::too_many_arguments)]
pub fn equicontinuity_exponent(
    alpha: FractionalOrder,
    pair: &SpacePair,
    ball: &[TestFunction],
    weight: &WeightSpec,
    horizon: f64,
    n: usize,
    bound: f64,
    shifts: &[f64],
) -> Result<EquicontinuityReport> {
    let pair = pair.with_horizon(horizon);
    let (a, p) = (alpha.value(), pair.source.p);
    if !(a > 0.5 * (1.0 + 1.0 / p)) {
        return Err(Error::param("alpha", format!("need (1 + 1/p)/2 < α, got α = {a}, p = {p}")));
    }
    if shifts.len() < 2 {
        return Err(Error::param("shifts", "need at least two shifts"));
    }
    if let Some(y) = shifts.iter().find(|y| !(**y > 0.0 && **y < horizon)) {
        return Err(Error::param("shifts", format!("{y} is not in (0, T)")));
    }
    if !(bound > 0.0 && bound.is_finite()) {
        return Err(Error::param("bound", "must be positive"));
    }
    let images = par::map_slice(ball, |f| -> Result<Option<SampledFunction>> {
        let g = f.sample(horizon, n)?;
        let s = norm(&g, weight, &pair.source, false)?;
        if s == 0.0 {
            return Ok(None);
        }
        Ok(Some(rl_integral(&g.scale(bound / s)?, alpha)?.without_origin_power()))
    })
    .into_iter()
    .filter_map(Result::transpose)
    .collect::<Result<Vec<_>>>()?;
    if images.is_empty() {
        return Err(Error::param("ball", "every template has zero norm"));
    }
    let moduli = shifts
        .iter()
        .map(|&y| family_sup(&images, |u| norm(&u.translated(y)?.zip_with(u, |a, b| a - b)?, weight, &pair.target, false)))
        .collect::<Result<Vec<_>>>()?;
    let fit = fit_loglog(shifts, &moduli, 2, "shifts")?;
    Ok(EquicontinuityReport {
        shifts: shifts.to_vec(),
        moduli,
        fit,
        predicted: (1.0 - a).min((a * p - 1.0) / p),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MembershipVerdict {
    /// Successive norms agree to within 10%.
    Converging,
    /// Every refinement grows the norm by at least 20%.
    Diverging,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MembershipReport {
    pub ns: Vec<usize>,
    pub norms: Vec<f64>,
    /// `norm[k+1] / norm[k]`.
    pub growth: Vec<f64>,
    pub verdict: MembershipVerdict,
}

pub const CAUCHY_TOLERANCE: f64 = 0.10;
pub const DIVERGENCE_GROWTH: f64 = 1.20;

/// Local norm of `t^exponent` on `(0, δ)` at `n0 · 2^k` cells,
/// `k = 0..=refinements`, sampling the singular node half a step inside.
pub fn morrey_membership_probe(
    exponent: f64,
    weight: &WeightSpec,
    params: &MorreyParams,
    n0: usize,
    refinements: usize,
) -> Result<MembershipReport> {
    params.validate()?;
    let Domain::Local(delta) = params.domain else {
        return Err(Error::param("domain", "membership probes need a local domain (0, δ)"));
    };
    if refinements < 3 {
        return Err(Error::param("refinements", "need at least three refinements"));
    }
    if n0 < 2 {
        return Err(Error::param("n", "need at least two cells"));
    }
    let mut ns = Vec::new();
    let mut norms = Vec::new();
    for k in 0..=refinements {
        let n = n0 << k;
        let f = SampledFunction::from_fn_offset(Grid1D::over(0.0, delta, n)?, true, |t| t.powf(exponent))?;
        ns.push(n);
        norms.push(norm(&f, weight, params, false)?);
    }
    let growth: Vec<f64> = norms.windows(2).map(|w| w[1] / w[0]).collect();
    let verdict = if growth.iter().all(|g| (g - 1.0).abs() < CAUCHY_TOLERANCE) {
        MembershipVerdict::Converging
    } else if growth.iter().all(|g| *g >= DIVERGENCE_GROWTH) {
        MembershipVerdict::Diverging
    } else {
        MembershipVerdict::Inconclusive
    };
    Ok(MembershipReport { ns, norms, growth, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Interval;
    use crate::morrey::Side;
    use crate::verify::polynomial_and_step_family;

    fn unit() -> WeightSpec {
        WeightSpec::constant(1.0, Interval::new(0.0, 1.0).unwrap()).unwrap()
    }

    #[test]
    fn zero_function_rows_are_skipped() {
        let pair = SpacePair::riemann_liouville(1.5, 2.0, 0.0, 0.0, 1.0).unwrap();
        let op = OperatorId::RlInt { alpha: FractionalOrder::new(0.8).unwrap() };
        let r = boundedness_experiment(op, &pair, &[TestFunction::Zero, TestFunction::Monomial(1.0)], &unit(), 1.0, 64).unwrap();
        assert_eq!(r.rows[0].status, RowStatus::Skipped);
        assert_eq!(r.rows[0].ratio, None);
        assert_eq!(r.rows[1].status, RowStatus::Ok);
        assert_eq!(r.max_ratio, r.rows[1].ratio.unwrap());
    }

    #[test]
    fn unweighted_case_is_lebesgue() {
        // λ = β = 0, ω ≡ 1: the local norms are plain L^p norms over (0, T)
        let pair = SpacePair::riemann_liouville(1.0, 2.0, 0.0, 0.0, 1.0).unwrap();
        let alpha = FractionalOrder::new(0.5).unwrap();
        let op = OperatorId::RlInt { alpha };
        let r = boundedness_experiment(op, &pair, &[TestFunction::Monomial(1.0)], &unit(), 1.0, 256).unwrap();
        let row = &r.rows[0];
        let f = TestFunction::Monomial(1.0).sample(1.0, 256).unwrap();
        let lp = |g: &SampledFunction, p: f64| crate::grid::Antiderivative::of_abs_pow(g, p).total().powf(1.0 / p);
        assert!((row.source_norm - lp(&f, 1.0)).abs() < 1e-6);
        assert!((row.target_norm - lp(&rl_integral(&f, alpha).unwrap(), 2.0)).abs() < 1e-6);
    }

    #[test]
    fn scaling_needs_four_horizons() {
        let pair = SpacePair::riemann_liouville(1.5, 2.0, 0.0, 0.0, 1.0).unwrap();
        let op = OperatorId::RlInt { alpha: FractionalOrder::new(0.8).unwrap() };
        let err = scaling_exponent_fit(op, &pair, &polynomial_and_step_family(), &unit(), &[1.0, 2.0, 4.0], 32).unwrap_err();
        assert_eq!(err.parameter_name(), Some("horizons"));
        let err = scaling_exponent_fit(op, &pair, &polynomial_and_step_family(), &unit(), &[1.0; 4], 32).unwrap_err();
        assert_eq!(err.parameter_name(), Some("horizons"));
    }

    #[test]
    fn equicontinuity_argument_checks() {
        let pair = SpacePair::new(
            MorreyParams::new(2.0, 0.0, 2.0, Side::Plus, Domain::Local(1.0)).unwrap(),
            MorreyParams::new(4.0, 0.0, 4.0, Side::Plus, Domain::Local(1.0)).unwrap(),
            false,
        )
        .unwrap();
        let ball = polynomial_and_step_family();
        let a = FractionalOrder::new(0.8).unwrap();
        let e = equicontinuity_exponent(a, &pair, &ball, &unit(), 1.0, 64, 1.0, &[0.125]).unwrap_err();
        assert_eq!(e.parameter_name(), Some("shifts"));
        let e = equicontinuity_exponent(FractionalOrder::new(0.4).unwrap(), &pair, &ball, &unit(), 1.0, 64, 1.0, &[0.125, 0.25]).unwrap_err();
        assert_eq!(e.parameter_name(), Some("alpha"));
    }

    #[test]
    fn indicator_membership_converges_to_one() {
        let params = MorreyParams::new(1.0, 0.0, 1.0, Side::Plus, Domain::Local(1.0)).unwrap();
        let r = morrey_membership_probe(0.0, &unit(), &params, 64, 3).unwrap();
        assert!(morrey_membership_probe(0.0, &unit(), &params, 64, 2).is_err());
        assert_eq!(r.verdict, MembershipVerdict::Converging);
        assert!((r.norms.last().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn compactness_of_a_single_bump() {
        let g = Grid1D::over(0.0, 1.0, 256).unwrap();
        let f = TestFunction::Bump { centre: 0.5, radius: 0.25 }.sample_on(g).unwrap();
        let params = MorreyParams::new(2.0, 0.25, 2.0, Side::Plus, Domain::Local(1.0)).unwrap();
        let r = compactness_diagnostics(&[f], &unit(), &params, &[1.0 / 64.0, 1.0 / 16.0, 1.0 / 4.0], &[0.25, 0.5, 0.75]).unwrap();
        assert!(r.moduli_decreasing && r.tails_decreasing, "{r:?}");
        assert_eq!(*r.tails.last().unwrap(), 0.0);
        assert!(r.uniform_bound > 0.0);
    }
}
