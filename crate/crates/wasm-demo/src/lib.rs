//! Browser bindings for three operations: R-L integral and derivative of a
//! registry function, Abel's equation, and the one-sided Morrey norm.
//!
//! Each binding wraps a plain function that native tests exercise directly.

use morrey_core::abel::{solve_abel, AbelProblem};
use morrey_core::morrey::{self, Domain, MorreyParams, Side};
use morrey_core::operators::{rl_derivative, rl_integral, FractionalOrder};
use morrey_core::verify::TestFunction;
use morrey_core::weights::WeightSpec;
use morrey_core::{Error, Interval, Result};
use wasm_bindgen::prelude::*;

const MAX_CELLS: usize = 4096;

fn template(name: &str, n: usize) -> Result<morrey_core::SampledFunction> {
    if !(16..=MAX_CELLS).contains(&n) {
        return Err(Error::param("n", format!("{n} must lie in 16..={MAX_CELLS}")));
    }
    name.parse::<TestFunction>()?.sample(1.0, n)
}

/// Samples of `f`, `I^α f` and `D^α f` on the nodes of `(0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Curves {
    pub t: Vec<f64>,
    pub f: Vec<f64>,
    pub integral: Vec<f64>,
    pub derivative: Vec<f64>,
}

pub fn fractional_curves(name: &str, alpha: f64, n: usize) -> Result<Curves> {
    let f = template(name, n)?;
    let a = FractionalOrder::new(alpha)?;
    Ok(Curves {
        t: f.grid().nodes().collect(),
        integral: rl_integral(&f, a)?.into_values(),
        derivative: rl_derivative(&f, a)?.into_values(),
        f: f.into_values(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbelOutcome {
    pub t: Vec<f64>,
    pub f: Vec<f64>,
    pub phi: Vec<f64>,
    pub residual: f64,
    pub solvable: bool,
}

/// Solves `I^α φ = f` with the registry function `f`, forcing past failed
/// solvability proxies so the page can show what goes wrong.
pub fn abel(name: &str, alpha: f64, lambda: f64, n: usize) -> Result<AbelOutcome> {
    let f = template(name, n)?;
    let w = WeightSpec::constant(1.0, f.grid().interval)?;
    let problem = AbelProblem::new(f, FractionalOrder::new(alpha)?, lambda, w)?;
    let sol = solve_abel(&problem, true)?;
    Ok(AbelOutcome {
        t: problem.f.grid().nodes().collect(),
        f: problem.f.values().to_vec(),
        phi: sol.phi.into_values(),
        residual: sol.residual_sup,
        solvable: sol.solvable,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormOutcome {
    pub value: f64,
    pub x0: f64,
    pub h: f64,
}

/// Whole-line Morrey norm of a registry function on `(0, 1)`, `θ = 1`.
pub fn norm(name: &str, p: f64, lambda: f64, side: &str, weight: &str, weak: bool, n: usize) -> Result<NormOutcome> {
    let f = template(name, n)?;
    let side: Side = side.parse()?;
    let params = MorreyParams::new(p, lambda, 1.0, side, Domain::WholeLine)?;
    if weight.starts_with("file:") {
        return Err(Error::param("weight", "tabulated weights are not available in the browser"));
    }
    let w = WeightSpec::parse(weight, Interval::new(-1.0, 2.0)?)?;
    let r = if weak {
        morrey::weak_morrey_norm(&f, &w, &params)?
    } else {
        morrey::morrey_norm(&f, &w, &params)?
    };
    Ok(NormOutcome { value: r.value, x0: r.argmax_x0, h: r.argmax_h })
}

fn js(e: Error) -> JsError {
    JsError::new(&e.to_string())
}

/// `[t.., f.., I^α f.., D^α f..]`, each of length `n + 1`.
#[wasm_bindgen(js_name = fractionalCurves)]
pub fn fractional_curves_js(name: &str, alpha: f64, n: usize) -> std::result::Result<Vec<f64>, JsError> {
    let c = fractional_curves(name, alpha, n).map_err(js)?;
    Ok([c.t, c.f, c.integral, c.derivative].concat())
}

/// `[residual, solvable, t.., f.., φ..]`.
#[wasm_bindgen(js_name = solveAbel)]
pub fn abel_js(name: &str, alpha: f64, lambda: f64, n: usize) -> std::result::Result<Vec<f64>, JsError> {
    let a = abel(name, alpha, lambda, n).map_err(js)?;
    let head = [a.residual, if a.solvable { 1.0 } else { 0.0 }];
    Ok([&head[..], &a.t, &a.f, &a.phi].concat())
}

/// `[value, argmax x0, argmax h]`.
#[wasm_bindgen(js_name = morreyNorm)]
#[allow(clippy::too_many_arguments)]
pub fn norm_js(
    name: &str,
    p: f64,
    lambda: f64,
    side: &str,
    weight: &str,
    weak: bool,
    n: usize,
) -> std::result::Result<Vec<f64>, JsError> {
    let r = norm(name, p, lambda, side, weight, weak, n).map_err(js)?;
    Ok(vec![r.value, r.x0, r.h])
}
