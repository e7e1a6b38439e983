//! Quadrature on sampled functions.
//!
//! Plain integrals use the trapezoidal rule on the piecewise-linear
//! interpolant. Integrals against the weakly singular kernel `|t − τ|^a`,
//! `-1 < a < 0`, use product integration: the smooth factor is replaced by
//! its interpolant and every cell moment of the kernel is evaluated in closed
//! form, so the singularity at `τ = t` costs no accuracy.

use crate::error::{Error, Result};
use crate::grid::{Antiderivative, Grid1D, Interval, SampledFunction};
use crate::par;
use crate::special;

/// Trapezoidal integral of `f` over `sub`.
///
/// Endpoints that fall between nodes are handled by linear interpolation, so
/// affine functions integrate exactly and the result is additive over
/// adjacent subintervals.
pub fn integrate(f: &SampledFunction, sub: Interval) -> Result<f64> {
    if !f.compact_support() && !f.grid().interval.contains_interval(&sub) {
        return Err(Error::domain(format!(
            "({}, {}) is not inside the sampled interval ({}, {})",
            sub.left,
            sub.right,
            f.grid().left(),
            f.grid().right()
        )));
    }
    Ok(Antiderivative::of(f).between(sub.left, sub.right))
}

fn check_kernel_exponent(a_exp: f64) -> Result<()> {
    if !(a_exp > -1.0 && a_exp < 0.0) {
        return Err(Error::param(
            "a_exp",
            format!("kernel exponent {a_exp} must lie in (-1, 0)"),
        ));
    }
    Ok(())
}

/// `∫ s^a · ℓ(s) ds` over `s ∈ (lo, hi)`, where `ℓ` is linear with
/// `ℓ(lo) = v_lo` and `ℓ(hi) = v_hi`.
#[inline]
fn linear_moment(lo: f64, hi: f64, v_lo: f64, v_hi: f64, a: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    let big_a = a + 1.0;
    let i0 = (hi.powf(big_a) - lo.powf(big_a)) / big_a;
    let i1 = (hi.powf(big_a + 1.0) - lo.powf(big_a + 1.0)) / (big_a + 1.0);
    v_lo * i0 + (v_hi - v_lo) / (hi - lo) * (i1 - lo * i0)
}

/// `∫_0^w (τ/w)^s (d − τ)^a dτ` with `d ≥ w` (the kernel singularity lies at
/// or beyond the right end of the head cell); if `d < w` the integral stops
/// at `τ = d`.
fn head_moment(w: f64, d: f64, s: f64, a: f64) -> f64 {
    let scale = w.powf(-s) * d.powf(s + a + 1.0);
    if d <= w {
        scale * special::beta(s + 1.0, a + 1.0)
    } else {
        scale * special::beta_inc(s + 1.0, a + 1.0, w / d)
    }
}

/// Product-integration value of the weakly singular integral.
///
/// With `from_left` this is `∫_{left}^{t} f(τ)(t − τ)^a dτ` (the
/// Riemann–Liouville side); otherwise `∫_{t}^{right} f(τ)(τ − t)^a dτ` (the
/// Weyl side). Compactly supported functions may be evaluated with `t`
/// outside the grid, in which case the whole support lies on one side.
pub fn integrate_singular(f: &SampledFunction, t: f64, a_exp: f64, from_left: bool) -> Result<f64> {
    check_kernel_exponent(a_exp)?;
    let g = f.grid();
    let v = f.values();
    let (lo_x, hi_x) = (g.left(), g.right());
    let outside = if from_left { t < lo_x } else { t > hi_x };
    if outside {
        if f.compact_support() {
            return Ok(0.0);
        }
        return Err(Error::domain(format!("t = {t} lies on the wrong side of the grid")));
    }
    if !f.compact_support() && !g.interval.contains(t) {
        return Err(Error::domain(format!("t = {t} outside ({lo_x}, {hi_x})")));
    }

    // evaluation points within roundoff of a node are moved onto it
    let t = match g.node_index(t, 1e-9) {
        Some(k) => g.node(k),
        None => t,
    };
    let mut acc = 0.0;
    if from_left {
        let end = t.min(hi_x);
        let (last, frac) = match g.node_index(end, 1e-9) {
            Some(k) if k > 0 => (k - 1, 1.0),
            _ => g.locate(end),
        };
        let head = f.origin_power();
        for j in 0..=last {
            let tau0 = g.node(j);
            let (tau1, v1) = if j == last {
                (tau0 + frac * g.step, v[j] + frac * (v[j + 1] - v[j]))
            } else {
                (g.node(j + 1), v[j + 1])
            };
            if tau1 <= tau0 {
                continue;
            }
            if j == 0 {
                if let Some(s) = head {
                    acc += v[1] * head_moment(g.step, t - tau0, s, a_exp);
                    continue;
                }
            }
            acc += linear_moment((t - tau1).max(0.0), t - tau0, v1, v[j], a_exp);
        }
    } else {
        let start = t.max(lo_x);
        let (first, frac) = if start <= lo_x { (0, 0.0) } else { g.locate(start) };
        for j in first..g.n {
            let (tau0, v0) = if j == first {
                (g.node(j) + frac * g.step, v[j] + frac * (v[j + 1] - v[j]))
            } else {
                (g.node(j), v[j])
            };
            let tau1 = g.node(j + 1);
            if tau1 <= tau0 {
                continue;
            }
            acc += linear_moment((tau0 - t).max(0.0), tau1 - t, v0, v[j + 1], a_exp);
        }
    }
    Ok(acc)
}

/// Cell weights of the node-aligned product rule in units of one step.
///
/// For the cell whose right end lies `d` steps before the evaluation node,
/// `lo[d]` multiplies the right-end sample and `hi[d]` the left-end sample.
struct ConvolutionWeights {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl ConvolutionWeights {
    fn new(n: usize, a: f64) -> Self {
        let big_a = a + 1.0;
        let mut lo = Vec::with_capacity(n);
        let mut hi = Vec::with_capacity(n);
        for d in 0..n {
            let d0 = d as f64;
            let d1 = d0 + 1.0;
            let i0 = (d1.powf(big_a) - d0.powf(big_a)) / big_a;
            let i1 = (d1.powf(big_a + 1.0) - d0.powf(big_a + 1.0)) / (big_a + 1.0);
            lo.push(d1 * i0 - i1);
            hi.push(i1 - d0 * i0);
        }
        ConvolutionWeights { lo, hi }
    }
}

/// `∫_{left}^{x_m} f(τ)(x_m − τ)^a dτ` at every node `x_m` of `f`'s grid.
///
/// Same rule as [`integrate_singular`] with `from_left`, specialised to
/// node-aligned evaluation points where the weights form a Toeplitz matrix.
pub fn singular_at_nodes(f: &SampledFunction, a_exp: f64) -> Result<Vec<f64>> {
    check_kernel_exponent(a_exp)?;
    let g = *f.grid();
    let v = f.values();
    let n = g.n;
    let w = ConvolutionWeights::new(n, a_exp);
    let scale = g.step.powf(a_exp + 1.0);
    let head = f.origin_power();
    let out = par::map_range(0..n + 1, |m| {
        if m == 0 {
            return 0.0;
        }
        let mut acc = 0.0;
        let first = usize::from(head.is_some());
        for j in first..m {
            let d = m - j - 1;
            acc += v[j + 1] * w.lo[d] + v[j] * w.hi[d];
        }
        let mut total = scale * acc;
        if let Some(s) = head {
            total += v[1] * head_moment(g.step, m as f64 * g.step, s, a_exp);
        }
        total
    });
    Ok(out)
}

/// Linear interpolation of `f` onto `target`'s nodes.
pub fn resample(f: &SampledFunction, target: Grid1D) -> Result<SampledFunction> {
    if f.grid().same_as(&target) {
        return Ok(f.clone());
    }
    if !f.compact_support() && !f.grid().interval.contains_interval(&target.interval) {
        return Err(Error::domain("target grid extends beyond the sampled interval"));
    }
    SampledFunction::from_fn(target, f.compact_support(), |x| f.eval_zero_ext(x))
}
