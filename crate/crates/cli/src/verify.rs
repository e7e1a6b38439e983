//! `verify --experiment ... --config exp.json`.

use morrey_core::morrey::{self, Domain, MorreyParams, Side};
use morrey_core::operators::{rl_integral, FractionalOrder};
use morrey_core::report::{format_number, Cell, Format, Table};
use morrey_core::verify::{self, MembershipVerdict, OperatorId, RatioReport, RowStatus, SpacePair, TestFunction};
use morrey_core::weights::WeightSpec;
use morrey_core::Interval;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::args::{Experiment, Global, VerifyArgs};
use crate::commands::read_config;
use crate::error::{CliError, CliResult};
use crate::output::write_text;

fn one() -> f64 {
    1.0
}
fn zero() -> f64 {
    0.0
}
fn drift_tol() -> f64 {
    0.2
}
fn slope_tol() -> f64 {
    0.1
}
fn equicont_tol() -> f64 {
    0.05
}
fn plus() -> Side {
    Side::Plus
}
fn exp_weight() -> String {
    "exp".into()
}
fn unit_weight() -> String {
    "const:1".into()
}
fn n256() -> usize {
    256
}
fn n512() -> usize {
    512
}
fn n1024() -> usize {
    1024
}
fn bumps() -> Vec<TestFunction> {
    verify::bump_family()
}
fn full() -> Vec<TestFunction> {
    verify::full_family()
}
fn smooth_and_steps() -> Vec<TestFunction> {
    let mut v = verify::polynomial_and_step_family();
    v.extend(verify::bump_family());
    v
}
fn dyadic_shifts() -> Vec<f64> {
    (3..=7).map(|k| 0.5f64.powi(k)).collect()
}
fn tail_radii() -> Vec<f64> {
    vec![0.5, 0.625, 0.75, 0.875]
}
fn three() -> usize {
    3
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Weak11Config {
    pub lambda: f64,
    #[serde(default = "plus")]
    pub side: Side,
    #[serde(default = "exp_weight")]
    pub weight: String,
    #[serde(default = "bumps")]
    pub family: Vec<TestFunction>,
    #[serde(default = "one")]
    pub horizon: f64,
    #[serde(default = "n256")]
    pub n: usize,
    #[serde(default = "drift_tol")]
    pub drift_tol: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum FracOperator {
    /// Weyl integral `I^±_α`.
    Weyl,
    /// Fractional maximal operator `M^±_α`.
    Maximal,
}

fn weyl() -> FracOperator {
    FracOperator::Weyl
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StrongFracConfig {
    pub alpha: f64,
    pub p: f64,
    pub q: f64,
    pub beta: f64,
    pub lambda: f64,
    #[serde(default = "weyl")]
    pub operator: FracOperator,
    #[serde(default = "plus")]
    pub side: Side,
    #[serde(default = "unit_weight")]
    pub weight: String,
    #[serde(default = "smooth_and_steps")]
    pub family: Vec<TestFunction>,
    #[serde(default = "one")]
    pub horizon: f64,
    #[serde(default = "n256")]
    pub n: usize,
    #[serde(default = "drift_tol")]
    pub drift_tol: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RlBoundConfig {
    pub alpha: f64,
    pub p: f64,
    pub q: f64,
    #[serde(default = "zero")]
    pub beta: f64,
    #[serde(default = "zero")]
    pub mu: f64,
    #[serde(default = "one")]
    pub horizon: f64,
    #[serde(default = "unit_weight")]
    pub weight: String,
    #[serde(default = "full")]
    pub family: Vec<TestFunction>,
    #[serde(default = "n512")]
    pub n: usize,
    #[serde(default = "drift_tol")]
    pub drift_tol: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RlScalingConfig {
    pub alpha: f64,
    pub p: f64,
    pub q: f64,
    #[serde(default = "zero")]
    pub beta: f64,
    #[serde(default = "zero")]
    pub mu: f64,
    pub horizons: Vec<f64>,
    #[serde(default = "unit_weight")]
    pub weight: String,
    #[serde(default = "full")]
    pub family: Vec<TestFunction>,
    #[serde(default = "n512")]
    pub n: usize,
    /// Allowed excess of the fitted slope over the predicted exponent.
    #[serde(default = "slope_tol")]
    pub tol: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompactnessConfig {
    pub alpha: f64,
    pub p: f64,
    pub q: f64,
    #[serde(default = "zero")]
    pub beta: f64,
    #[serde(default = "zero")]
    pub mu: f64,
    #[serde(default = "one")]
    pub horizon: f64,
    #[serde(default = "unit_weight")]
    pub weight: String,
    /// Templates spanning the ball; each is normalised to `bound`.
    #[serde(default = "full")]
    pub family: Vec<TestFunction>,
    #[serde(default = "one")]
    pub bound: f64,
    #[serde(default = "n512")]
    pub n: usize,
    #[serde(default = "dyadic_shifts")]
    pub shifts: Vec<f64>,
    #[serde(default = "tail_radii")]
    pub radii: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquicontConfig {
    pub alpha: f64,
    pub p: f64,
    pub q: f64,
    #[serde(default = "zero")]
    pub beta: f64,
    #[serde(default = "zero")]
    pub mu: f64,
    #[serde(default = "one")]
    pub horizon: f64,
    #[serde(default = "unit_weight")]
    pub weight: String,
    #[serde(default = "full")]
    pub ball: Vec<TestFunction>,
    #[serde(default = "one")]
    pub bound: f64,
    #[serde(default = "n1024")]
    pub n: usize,
    #[serde(default = "dyadic_shifts")]
    pub shifts: Vec<f64>,
    /// Allowed shortfall of the fitted slope below the predicted exponent.
    #[serde(default = "equicont_tol")]
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Expectation {
    Converging,
    Diverging,
    Inconclusive,
}

impl From<MembershipVerdict> for Expectation {
    fn from(v: MembershipVerdict) -> Self {
        match v {
            MembershipVerdict::Converging => Expectation::Converging,
            MembershipVerdict::Diverging => Expectation::Diverging,
            MembershipVerdict::Inconclusive => Expectation::Inconclusive,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Probe {
    pub id: String,
    /// Probes `t^exponent` on `(0, δ)`.
    pub exponent: f64,
    pub p: f64,
    pub lambda: f64,
    #[serde(default = "one")]
    pub theta: f64,
    #[serde(default = "unit_weight")]
    pub weight: String,
    #[serde(default = "one")]
    pub delta: f64,
    pub expect: Option<Expectation>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MembershipConfig {
    pub probes: Vec<Probe>,
    #[serde(default = "n256")]
    pub n0: usize,
    #[serde(default = "three")]
    pub refinements: usize,
}

fn to_value(c: &impl Serialize) -> CliResult<Value> {
    Ok(serde_json::to_value(c).map_err(morrey_core::Error::from)?)
}

fn num(x: f64) -> String {
    format_number(x)
}

fn order(alpha: f64) -> CliResult<FractionalOrder> {
    Ok(FractionalOrder::new(alpha)?)
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

/// Outcome of one experiment: the report table and the failed checks.
struct Outcome {
    table: Table,
    failures: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome { table: verify::verify_table(), failures: Vec::new() }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }
}

/// Runs a ratio experiment at `n · 2^k`, `k = 0..=refine`, and judges the
/// finest report: every row finite, and per-row drift against the previous
/// resolution within `drift_tol`.
#[allow(clippy::too_many_arguments)]
fn stable_ratios(
    out: &mut Outcome,
    experiment: &str,
    params: &str,
    op: OperatorId,
    pair: &SpacePair,
    family: &[TestFunction],
    weight: &WeightSpec,
    horizon: f64,
    n: usize,
    refine: usize,
    drift_tol: f64,
) -> CliResult<()> {
    if refine < 1 {
        return Err(CliError::param("refine", "ratio experiments need at least one refinement"));
    }
    if family.is_empty() {
        return Err(CliError::param("family", "is empty"));
    }
    let mut reports: Vec<RatioReport> = Vec::new();
    for k in 0..=refine {
        let r = verify::boundedness_experiment(op, pair, family, weight, horizon, n << k)?;
        r.append_rows(&mut out.table, experiment, &format!("r{k}-"), params)?;
        reports.push(r);
    }
    let fine = &reports[refine];
    let drift = reports[refine - 1].drift(fine);
    let finite = fine
        .rows
        .iter()
        .all(|r| r.status != RowStatus::Unbounded && r.ratio.is_none_or(f64::is_finite));
    let ok = finite && drift <= drift_tol;
    let extra = format!("drift_tol={};max_ratio={}", num(drift_tol), num(fine.max_ratio));
    let row_params = if params.is_empty() { extra } else { format!("{params};{extra}") };
    out.table.push(vec![
        experiment.into(),
        "summary".into(),
        row_params.into(),
        Cell::Missing,
        Cell::Missing,
        drift.into(),
        pass(ok).into(),
    ])?;
    out.check(finite, "some ratio is not finite");
    out.check(drift <= drift_tol, format!("drift {drift} exceeds {drift_tol}"));
    Ok(())
}

fn with_side(mut pair: SpacePair, side: Side) -> SpacePair {
    pair.source.side = side;
    pair.target.side = side;
    pair
}

fn weak11(global: &Global, cfg: &mut Weak11Config, out: &mut Outcome) -> CliResult<()> {
    if let Some(n) = global.n {
        cfg.n = n;
    }
    let pair = with_side(SpacePair::weak_type(cfg.lambda)?, cfg.side);
    let t = cfg.horizon;
    let w = WeightSpec::parse(&cfg.weight, Interval::new(-t, 2.0 * t)?)?;
    let op = OperatorId::Maximal { side: cfg.side, alpha: 0.0 };
    let params = verify::flatten(&[("lambda", num(cfg.lambda)), ("side", format!("{:?}", cfg.side).to_lowercase())]);
    let refine = global.refine.unwrap_or(1);
    stable_ratios(out, "weak11", &params, op, &pair, &cfg.family, &w, t, cfg.n, refine, cfg.drift_tol)
}

fn strong_frac(global: &Global, cfg: &mut StrongFracConfig, out: &mut Outcome) -> CliResult<()> {
    if let Some(n) = global.n {
        cfg.n = n;
    }
    let pair = with_side(SpacePair::fractional(cfg.alpha, cfg.p, cfg.q, cfg.beta, cfg.lambda)?, cfg.side);
    let op = match cfg.operator {
        FracOperator::Weyl => OperatorId::Weyl { side: cfg.side, alpha: order(cfg.alpha)? },
        FracOperator::Maximal => OperatorId::Maximal { side: cfg.side, alpha: cfg.alpha },
    };
    let t = cfg.horizon;
    let w = WeightSpec::parse(&cfg.weight, Interval::new(-t, 2.0 * t)?)?;
    let params = verify::flatten(&[
        ("alpha", num(cfg.alpha)),
        ("p", num(cfg.p)),
        ("q", num(cfg.q)),
        ("beta", num(cfg.beta)),
        ("lambda", num(cfg.lambda)),
    ]);
    let refine = global.refine.unwrap_or(1);
    stable_ratios(out, "strong-frac", &params, op, &pair, &cfg.family, &w, t, cfg.n, refine, cfg.drift_tol)
}

fn rl_params(alpha: f64, p: f64, q: f64, beta: f64, mu: f64) -> String {
    verify::flatten(&[("alpha", num(alpha)), ("p", num(p)), ("q", num(q)), ("beta", num(beta)), ("mu", num(mu))])
}

fn rl_bound(global: &Global, cfg: &mut RlBoundConfig, out: &mut Outcome) -> CliResult<()> {
    if let Some(n) = global.n {
        cfg.n = n;
    }
    let pair = SpacePair::riemann_liouville(cfg.p, cfg.q, cfg.beta, cfg.mu, cfg.horizon)?;
    let op = OperatorId::RlInt { alpha: order(cfg.alpha)? };
    let w = WeightSpec::parse(&cfg.weight, Interval::new(0.0, cfg.horizon)?)?;
    let params = rl_params(cfg.alpha, cfg.p, cfg.q, cfg.beta, cfg.mu);
    let refine = global.refine.unwrap_or(1);
    stable_ratios(out, "rl-bound", &params, op, &pair, &cfg.family, &w, cfg.horizon, cfg.n, refine, cfg.drift_tol)
}

fn rl_scaling(global: &Global, cfg: &mut RlScalingConfig, out: &mut Outcome) -> CliResult<()> {
    if let Some(n) = global.n {
        cfg.n = n;
    }
    if cfg.horizons.len() < 4 {
        return Err(CliError::param("horizons", format!("need at least 4 horizons, got {}", cfg.horizons.len())));
    }
    let top = cfg.horizons.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !(top > 0.0 && top.is_finite()) {
        return Err(CliError::param("horizons", "must be positive"));
    }
    let pair = SpacePair::riemann_liouville(cfg.p, cfg.q, cfg.beta, cfg.mu, top)?;
    let op = OperatorId::RlInt { alpha: order(cfg.alpha)? };
    let w = WeightSpec::parse(&cfg.weight, Interval::new(0.0, top)?)?;
    let r = verify::scaling_exponent_fit(op, &pair, &cfg.family, &w, &cfg.horizons, cfg.n)?;
    let params = rl_params(cfg.alpha, cfg.p, cfg.q, cfg.beta, cfg.mu);
    let ok = r.append_rows(&mut out.table, "rl-scaling", "", &params, cfg.tol)?;
    out.check(ok, format!("slope {} exceeds {} + {}", r.fit.slope, r.predicted, cfg.tol));
    Ok(())
}

fn compactness(global: &Global, cfg: &mut CompactnessConfig, out: &mut Outcome) -> CliResult<()> {
    if let Some(n) = global.n {
        cfg.n = n;
    }
    if !(cfg.bound > 0.0 && cfg.bound.is_finite()) {
        return Err(CliError::param("bound", "must be positive"));
    }
    let pair = SpacePair::riemann_liouville(cfg.p, cfg.q, cfg.beta, cfg.mu, cfg.horizon)?;
    let alpha = order(cfg.alpha)?;
    let w = WeightSpec::parse(&cfg.weight, Interval::new(0.0, cfg.horizon)?)?;
    let mut images = Vec::new();
    for f in &cfg.family {
        let g = f.sample(cfg.horizon, cfg.n)?;
        let s = morrey::morrey_norm(&g, &w, &pair.source)?.value;
        if s > 0.0 {
            images.push(rl_integral(&g.scale(cfg.bound / s)?, alpha)?.without_origin_power());
        }
    }
    if images.is_empty() {
        return Err(CliError::param("family", "every template has zero norm"));
    }
    let r = verify::compactness_diagnostics(&images, &w, &pair.target, &cfg.shifts, &cfg.radii)?;
    let params = rl_params(cfg.alpha, cfg.p, cfg.q, cfg.beta, cfg.mu);
    let ok = r.append_rows(&mut out.table, "compactness", "", &params)?;
    out.check(ok, "translation or tail curve is not non-increasing");
    Ok(())
}

fn equicont_rate(global: &Global, cfg: &mut EquicontConfig, out: &mut Outcome) -> CliResult<()> {
    if let Some(n) = global.n {
        cfg.n = n;
    }
    let domain = Domain::Local(cfg.horizon);
    let pair = SpacePair::new(
        MorreyParams::new(cfg.p, cfg.beta, cfg.p, Side::Plus, domain)?,
        MorreyParams::new(cfg.q, cfg.mu, cfg.q, Side::Plus, domain)?,
        false,
    )?;
    let w = WeightSpec::parse(&cfg.weight, Interval::new(0.0, cfg.horizon)?)?;
    let r = verify::equicontinuity_exponent(
        order(cfg.alpha)?,
        &pair,
        &cfg.ball,
        &w,
        cfg.horizon,
        cfg.n,
        cfg.bound,
        &cfg.shifts,
    )?;
    let params = rl_params(cfg.alpha, cfg.p, cfg.q, cfg.beta, cfg.mu);
    let ok = r.append_rows(&mut out.table, "equicont-rate", "", &params, cfg.tol)?;
    out.check(ok, format!("slope {} below {} - {}", r.fit.slope, r.predicted, cfg.tol));
    Ok(())
}

fn membership(global: &Global, cfg: &mut MembershipConfig, out: &mut Outcome) -> CliResult<()> {
    if let Some(n) = global.n {
        cfg.n0 = n;
    }
    if let Some(k) = global.refine {
        cfg.refinements = k;
    }
    if cfg.probes.is_empty() {
        return Err(CliError::param("probes", "is empty"));
    }
    let mut ids: Vec<&str> = cfg.probes.iter().map(|p| p.id.as_str()).collect();
    ids.sort_unstable();
    if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
        return Err(CliError::param("probes", format!("duplicate id `{}`", w[0])));
    }
    for probe in &cfg.probes {
        let params = MorreyParams::new(probe.p, probe.lambda, probe.theta, Side::Plus, Domain::Local(probe.delta))?;
        let w = WeightSpec::parse(&probe.weight, Interval::new(0.0, probe.delta)?)?;
        let r = verify::morrey_membership_probe(probe.exponent, &w, &params, cfg.n0, cfg.refinements)?;
        let flat = verify::flatten(&[
            ("probe", probe.id.clone()),
            ("exponent", num(probe.exponent)),
            ("p", num(probe.p)),
            ("lambda", num(probe.lambda)),
            ("theta", num(probe.theta)),
            ("weight", w.label()),
        ]);
        r.append_rows(&mut out.table, "membership", &format!("{}-", probe.id), &flat)?;
        let got = Expectation::from(r.verdict);
        if let Some(want) = probe.expect {
            out.check(got == want, format!("probe {} is {got:?}, expected {want:?}", probe.id));
        }
    }
    Ok(())
}

fn run_with<C>(
    global: &Global,
    args: &VerifyArgs,
    out: &mut Outcome,
    f: impl FnOnce(&Global, &mut C, &mut Outcome) -> CliResult<()>,
) -> CliResult<Value>
where
    C: Serialize + for<'de> Deserialize<'de>,
{
    let mut cfg: C = read_config(&args.config)?;
    f(global, &mut cfg, out)?;
    to_value(&cfg)
}

/// Runs the experiment, writes the report and returns the resolved config.
/// A failed pass criterion is returned alongside, after the report is
/// written.
pub fn run(global: &Global, args: &VerifyArgs) -> CliResult<(Value, Option<CliError>)> {
    let mut out = Outcome::new();
    let resolved = match args.experiment {
        Experiment::Weak11 => run_with(global, args, &mut out, weak11)?,
        Experiment::StrongFrac => run_with(global, args, &mut out, strong_frac)?,
        Experiment::RlBound => run_with(global, args, &mut out, rl_bound)?,
        Experiment::RlScaling => run_with(global, args, &mut out, rl_scaling)?,
        Experiment::Compactness => run_with(global, args, &mut out, compactness)?,
        Experiment::EquicontRate => run_with(global, args, &mut out, equicont_rate)?,
        Experiment::Membership => run_with(global, args, &mut out, membership)?,
    };
    let text = out.table.render(global.format.unwrap_or(Format::Csv))?;
    write_text(global.out.as_deref(), &text)?;
    let failure = (!out.failures.is_empty())
        .then(|| CliError::Verdict(format!("{}: {}", args.experiment.name(), out.failures.join("; "))));
    Ok((resolved, failure))
}

