use std::path::Path;

use morrey_core::abel::{solve_abel, AbelProblem};
use morrey_core::fde::{self, CauchyProblem, Rhs};
use morrey_core::morrey::{self, Domain, MorreyParams, Side};
use morrey_core::operators::{self, FractionalOrder};
use morrey_core::report::{Format, Table};
use morrey_core::verify::OperatorId;
use morrey_core::weights::{self, WeightSpec};
use morrey_core::{quad, Grid1D, Interval, SampledFunction};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::args::{
    AbelSolveArgs, FdeDeltaArgs, FdeExactArgs, FdeSolveArgs, Global, NormArgs, OpName, OpsApplyArgs, WeightClass,
    WeightsArgs,
};
use crate::error::{config_error, CliError, CliResult};
use crate::output::{function_text, json_text, write_text};

/// Reads a `t,value` CSV, resampled to `n` cells when given.
pub fn load_input(path: &Path, n: Option<usize>, origin_power: Option<f64>) -> CliResult<SampledFunction> {
    let mut f = SampledFunction::from_csv_path(path)?;
    if let Some(n) = n {
        if n == 0 {
            return Err(CliError::param("n", "must be positive"));
        }
        if n != f.grid().n {
            f = quad::resample(&f, Grid1D::new(f.grid().interval, n)?)?;
        }
    }
    Ok(match origin_power {
        Some(s) => f.with_origin_power(s)?,
        None => f,
    })
}

pub fn read_config<T: for<'de> Deserialize<'de>>(path: &Path) -> CliResult<T> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| morrey_core::Error::data(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| config_error(path, e))
}

fn json_only(global: &Global, what: &str) -> CliResult<()> {
    match global.format {
        Some(Format::Csv) => Err(CliError::param("format", format!("{what} reports are JSON only"))),
        _ => Ok(()),
    }
}

fn required_out<'a>(global: &'a Global, what: &str) -> CliResult<&'a Path> {
    global
        .out
        .as_deref()
        .ok_or_else(|| CliError::param("out", format!("{what} writes its solution to --out")))
}

fn order(alpha: Option<f64>) -> CliResult<FractionalOrder> {
    let a = alpha.ok_or_else(|| CliError::param("alpha", "required for this operator"))?;
    Ok(FractionalOrder::new(a)?)
}

pub fn norm(global: &Global, args: &NormArgs) -> CliResult<Value> {
    let f = load_input(&args.input, global.n, None)?;
    let domain = match args.local_t {
        Some(t) => Domain::Local(t),
        None => Domain::WholeLine,
    };
    let params = MorreyParams::new(args.p, args.lambda, args.theta, args.side, domain)?;
    let weight_domain = match domain {
        Domain::Local(t) => Interval::new(0.0, t)?,
        Domain::WholeLine => f.grid().interval,
    };
    let w = WeightSpec::parse(&args.weight, weight_domain)?;
    let est = if args.weak {
        morrey::weak_morrey_norm(&f, &w, &params)?
    } else {
        morrey::morrey_norm(&f, &w, &params)?
    };
    let text = match global.format.unwrap_or(Format::Json) {
        Format::Json => json_text(&est)?,
        Format::Csv => {
            let mut t = Table::new(["value", "argmax_x0", "argmax_h", "argmax_gamma"]);
            t.push(vec![est.value.into(), est.argmax_x0.into(), est.argmax_h.into(), est.argmax_gamma.into()])?;
            t.render(Format::Csv)?
        }
    };
    write_text(global.out.as_deref(), &text)?;
    Ok(json!({ "params": params, "weight": w.label(), "n": f.grid().n }))
}

pub fn ops_apply(global: &Global, args: &OpsApplyArgs) -> CliResult<Value> {
    let f = load_input(&args.input, global.n, args.origin_power)?;
    let g = *f.grid();
    let zero_order = |a: Option<f64>| -> CliResult<f64> {
        let a = a.unwrap_or(0.0);
        if !(0.0..1.0).contains(&a) {
            return Err(CliError::param("alpha", format!("{a} must lie in [0, 1)")));
        }
        Ok(a)
    };
    let out = match args.op {
        OpName::MaximalPlus => OperatorId::Maximal { side: Side::Plus, alpha: zero_order(args.alpha)? }.apply(&f)?,
        OpName::MaximalMinus => OperatorId::Maximal { side: Side::Minus, alpha: zero_order(args.alpha)? }.apply(&f)?,
        OpName::WeylPlus => OperatorId::Weyl { side: Side::Plus, alpha: order(args.alpha)? }.apply(&f)?,
        OpName::WeylMinus => OperatorId::Weyl { side: Side::Minus, alpha: order(args.alpha)? }.apply(&f)?,
        OpName::RlInt => operators::rl_integral(&f, order(args.alpha)?)?,
        OpName::RlDer => operators::rl_derivative(&f, order(args.alpha)?)?,
        OpName::Singular => OperatorId::Singular.apply(&f)?,
        OpName::Majorant => {
            let alpha = zero_order(args.alpha)?;
            let len = g.right() - g.left();
            let padded = Grid1D::over(g.left() - len, g.right() + len, 3 * g.n)?;
            let eps = (alpha == 0.0).then_some(g.step);
            let values = padded
                .nodes()
                .map(|x| operators::size_majorant(&f, alpha, x, eps))
                .collect::<morrey_core::Result<Vec<_>>>()?;
            SampledFunction::new(padded, values, true)?
        }
        OpName::MeanValue => {
            let t = args.window.ok_or_else(|| CliError::param("window", "required for meanvalue"))?;
            operators::mean_value_on(&f, t)?
        }
    };
    write_text(global.out.as_deref(), &function_text(&out, global.format.unwrap_or(Format::Csv))?)?;
    Ok(json!({ "n": g.n, "output_cells": out.grid().n }))
}

pub fn weights(global: &Global, args: &WeightsArgs) -> CliResult<Value> {
    json_only(global, "weight")?;
    let sweep = Grid1D::over(args.left, args.right, global.n.unwrap_or(512))?;
    let w = WeightSpec::parse(&args.weight, sweep.interval)?;
    let need_q = || args.q.ok_or_else(|| CliError::param("q", "required for this class"));
    let report = match args.class {
        WeightClass::Ap => serde_json::to_value(weights::ap_plus_constant(&w, args.p, sweep)?),
        WeightClass::Apq => serde_json::to_value(weights::apq_plus_constant(&w, args.p, need_q()?, sweep)?),
        WeightClass::Doubling => serde_json::to_value(weights::one_sided_doubling_ratio(&w, sweep)?),
        WeightClass::Growth => {
            serde_json::to_value(weights::dyadic_growth_check(&w, args.p, args.q, args.k_max, sweep)?)
        }
        WeightClass::Equivalence => {
            serde_json::to_value(weights::class_equivalence_check(&w, args.p, need_q()?, sweep)?)
        }
    }
    .map_err(morrey_core::Error::from)?;
    write_text(global.out.as_deref(), &json_text(&report)?)?;
    Ok(json!({ "weight": w.label(), "sweep_cells": sweep.n }))
}

pub fn abel_solve(global: &Global, args: &AbelSolveArgs) -> CliResult<Value> {
    let out = required_out(global, "abel solve")?;
    let f = load_input(&args.input, global.n, args.origin_power)?;
    let w = WeightSpec::parse(&args.weight, f.grid().interval)?;
    let problem = AbelProblem::new(f, FractionalOrder::new(args.alpha)?, args.lambda, w)?;
    let sol = solve_abel(&problem, args.force)?;
    write_text(Some(out), &function_text(&sol.phi, global.format.unwrap_or(Format::Csv))?)?;
    let report = json!({
        "solvable": sol.solvable,
        "residual_sup": sol.residual_sup,
        "diagnostics": sol.diagnostics,
    });
    write_text(None, &json_text(&report)?)?;
    Ok(json!({ "n": problem.f.grid().n, "weight": problem.weight.label() }))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case", deny_unknown_fields)]
pub enum RhsConfig {
    /// `f ≡ c`.
    Constant { c: f64 },
    /// Manufactured so that `u = t^μ`.
    LinearManufactured {
        #[serde(default = "one")]
        mu: f64,
        c: f64,
    },
    /// `λ t^γ u²`.
    PowerLaw { lambda_coef: f64, gamma: f64 },
}

fn one() -> f64 {
    1.0
}

impl From<&RhsConfig> for Rhs {
    fn from(r: &RhsConfig) -> Rhs {
        match *r {
            RhsConfig::Constant { c } => Rhs::Constant(c),
            RhsConfig::LinearManufactured { mu, c } => Rhs::LinearManufactured { mu, c },
            RhsConfig::PowerLaw { lambda_coef, gamma } => Rhs::PowerLaw { lambda_coef, gamma },
        }
    }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq, Default)]
#[serde(rename_all = "lowercase")]
pub enum DeltaVariant {
    #[default]
    Existence,
    Uniqueness,
}

/// Horizon from the contraction bound, used when no horizon is given.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContractionConfig {
    pub p: f64,
    pub q: f64,
    #[serde(default)]
    pub mu_exp: f64,
    #[serde(default = "one")]
    pub c: f64,
    /// Defaults to the rhs Lipschitz constant when that is known and positive.
    pub c_f: Option<f64>,
    #[serde(default)]
    pub variant: DeltaVariant,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FdeConfig {
    pub alpha: f64,
    pub rhs: RhsConfig,
    pub horizon: Option<f64>,
    pub contraction: Option<ContractionConfig>,
    pub lipschitz: Option<f64>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_fde_n")]
    pub n: usize,
}

fn default_tol() -> f64 {
    1e-10
}

fn default_max_iter() -> usize {
    100
}

fn default_fde_n() -> usize {
    1024
}

pub fn fde_solve(global: &Global, args: &FdeSolveArgs) -> CliResult<Value> {
    let out = required_out(global, "fde solve")?;
    let mut cfg: FdeConfig = read_config(&args.config)?;
    if let Some(n) = global.n {
        cfg.n = n;
    }
    let alpha = FractionalOrder::new(cfg.alpha)?;
    let rhs = Rhs::from(&cfg.rhs);
    let known_lipschitz = rhs.lipschitz();
    let horizon = match (cfg.horizon, &cfg.contraction) {
        (Some(h), _) => h,
        (None, Some(c)) => {
            let c_f = c
                .c_f
                .or(known_lipschitz.filter(|&l| l > 0.0))
                .ok_or_else(|| CliError::param("c_f", "needed to size the horizon for this rhs"))?;
            let d = fde::contraction_delta(cfg.alpha, c.p, c.q, c.mu_exp, c.c, c_f)?;
            match c.variant {
                DeltaVariant::Existence => d.existence,
                DeltaVariant::Uniqueness => d.uniqueness,
            }
        }
        (None, None) => return Err(CliError::param("horizon", "give a horizon or a contraction block")),
    };
    cfg.horizon = Some(horizon);
    let lipschitz = cfg.lipschitz.or(known_lipschitz).unwrap_or(0.0);
    cfg.lipschitz = Some(lipschitz);
    let problem = CauchyProblem::new(alpha, rhs, horizon, lipschitz)?;
    let r = fde::picard_solve(&problem, cfg.n, cfg.tol, cfg.max_iter)?;
    write_text(Some(out), &function_text(&r.u, global.format.unwrap_or(Format::Csv))?)?;
    let report = json!({
        "converged": r.converged,
        "diverged": r.diverged,
        "iterations": r.iterations,
        "final_update_norm": r.final_update_norm,
        "update_norms": r.update_norms,
        "horizon": r.horizon,
        "halvings": r.halvings,
        "residual_sup": r.residual_sup,
    });
    write_text(None, &json_text(&report)?)?;
    Ok(serde_json::to_value(&cfg).map_err(morrey_core::Error::from)?)
}

pub fn fde_exact(global: &Global, args: &FdeExactArgs) -> CliResult<Value> {
    json_only(global, "fde exact")?;
    let n = global.n.unwrap_or(8192);
    let r = fde::verify_exact_solution(args.alpha, args.gamma, args.lambda_coef, args.horizon, n, args.interior_cut)?;
    write_text(global.out.as_deref(), &json_text(&r)?)?;
    Ok(json!({ "n": n }))
}

pub fn fde_delta(global: &Global, args: &FdeDeltaArgs) -> CliResult<Value> {
    json_only(global, "fde delta")?;
    let r = fde::contraction_delta(args.alpha, args.p, args.q, args.mu, args.c, args.c_f)?;
    write_text(global.out.as_deref(), &json_text(&r)?)?;
    Ok(Value::Null)
}
