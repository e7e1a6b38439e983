//! Strong, weak and local one-sided weighted Morrey norms.
//!
//! Each norm is a supremum over windows `(x0, x0 + h)`; the normaliser
//! `Φ(x0, h)` is the weight's mass on the neighbouring interval, scaled by
//! `h^{λ−1}`. Windows come from a dyadic family of lengths crossed with every
//! grid-aligned left end, and the maximising window is reported.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Antiderivative, Grid1D, SampledFunction};
use crate::par;
use crate::weights::WeightSpec;

/// Default number of dyadic halvings of the window length.
pub const DEFAULT_LEVELS: u32 = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Plus,
    Minus,
}

impl std::str::FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" | "+" => Ok(Side::Plus),
            "minus" | "-" => Ok(Side::Minus),
            _ => Err(Error::param("side", format!("`{s}`: expected plus or minus"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    WholeLine,
    /// The interval `(0, T)`.
    Local(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MorreyParams {
    pub p: f64,
    pub lambda: f64,
    pub theta: f64,
    pub side: Side,
    pub domain: Domain,
}

impl MorreyParams {
    pub fn new(p: f64, lambda: f64, theta: f64, side: Side, domain: Domain) -> Result<Self> {
        let params = MorreyParams { p, lambda, theta, side, domain };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p.is_finite() && self.p >= 1.0) {
            return Err(Error::param("p", format!("{} must be finite and >= 1", self.p)));
        }
        if !(self.lambda >= 0.0 && self.lambda < 1.0) {
            return Err(Error::param("lambda", format!("{} must lie in [0, 1)", self.lambda)));
        }
        if !(self.theta.is_finite() && self.theta >= 1.0) {
            return Err(Error::param("theta", format!("{} must be finite and >= 1", self.theta)));
        }
        if let Domain::Local(t) = self.domain {
            if !(t.is_finite() && t > 0.0) {
                return Err(Error::param("T", format!("{t} must be positive")));
            }
        }
        Ok(())
    }
}

/// `h^{λ−1} · ω^θ(x0 − h, x0)` for the plus side, `ω^θ(x0, x0 + h)` for minus.
pub fn phi(w: &WeightSpec, lambda: f64, theta: f64, x0: f64, h: f64, side: Side) -> f64 {
    phi_powered(&w.powered(theta), lambda, x0, h, side)
}

fn phi_powered(wt: &WeightSpec, lambda: f64, x0: f64, h: f64, side: Side) -> f64 {
    let mass = match side {
        Side::Plus => wt.mass(x0 - h, x0),
        Side::Minus => wt.mass(x0, x0 + h),
    };
    h.powf(lambda - 1.0) * mass
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepInfo {
    pub grid: Grid1D,
    pub levels: u32,
    pub windows: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormEstimate {
    pub value: f64,
    pub argmax_x0: f64,
    pub argmax_h: f64,
    pub sweep: SweepInfo,
    pub weak: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub argmax_gamma: Option<f64>,
}

#[derive(Debug, Clone, Copy)]
struct Window {
    x0: f64,
    h: f64,
    /// Integration range, after intersecting with the local domain.
    a: f64,
    b: f64,
}

/// Dyadic window family for `f` under `params`.
fn windows(f: &SampledFunction, params: &MorreyParams, levels: u32) -> Vec<Window> {
    let g = f.grid();
    let mut out = Vec::new();
    match params.domain {
        Domain::Local(t) => {
            let x0s: Vec<f64> = g.nodes().filter(|&x| (0.0..t).contains(&x)).collect();
            for j in 0..=levels {
                let h = t / (1u64 << j) as f64;
                for &x0 in &x0s {
                    let (a, b) = (x0.max(0.0), (x0 + h).min(t));
                    if b > a {
                        out.push(Window { x0, h, a, b });
                    }
                }
            }
        }
        Domain::WholeLine => {
            let len = g.right() - g.left();
            let pad = g.n as i64;
            for j in -(levels as i32)..=1 {
                let h = len * 2f64.powi(j);
                for k in -pad..=2 * pad {
                    let x0 = if k == g.n as i64 { g.right() } else { g.left() + k as f64 * g.step };
                    out.push(Window { x0, h, a: x0, b: x0 + h });
                }
            }
        }
    }
    out
}

struct Prepared {
    wt: WeightSpec,
    windows: Vec<Window>,
    info: SweepInfo,
}

fn prepare(f: &SampledFunction, w: &WeightSpec, params: &MorreyParams, levels: u32) -> Result<Prepared> {
    params.validate()?;
    let windows = windows(f, params, levels);
    if windows.is_empty() {
        return Err(Error::param("windows", "the window family is empty"));
    }
    let info = SweepInfo { grid: *f.grid(), levels, windows: windows.len() };
    Ok(Prepared { wt: w.powered(params.theta), windows, info })
}

fn ratio(mass: f64, phi: f64) -> f64 {
    if mass == 0.0 {
        0.0
    } else {
        mass / phi
    }
}

/// Strong norm over the default window family.
pub fn morrey_norm(f: &SampledFunction, w: &WeightSpec, params: &MorreyParams) -> Result<NormEstimate> {
    morrey_norm_with(f, w, params, DEFAULT_LEVELS)
}

/// Strong norm `sup (Φ^{−1} ∫_window |f|^p)^{1/p}` with `levels` dyadic lengths.
pub fn morrey_norm_with(
    f: &SampledFunction,
    w: &WeightSpec,
    params: &MorreyParams,
    levels: u32,
) -> Result<NormEstimate> {
    let prep = prepare(f, w, params, levels)?;
    let anti = Antiderivative::of_abs_pow(f, params.p);
    let values = strong_window_values(&prep, &anti, params);
    let (best, idx) = argmax(&values);
    let win = prep.windows[idx];
    Ok(NormEstimate {
        value: best.powf(1.0 / params.p),
        argmax_x0: win.x0,
        argmax_h: win.h,
        sweep: prep.info,
        weak: false,
        argmax_gamma: None,
    })
}

fn strong_window_values(prep: &Prepared, anti: &Antiderivative, params: &MorreyParams) -> Vec<f64> {
    par::map_range(0..prep.windows.len(), |i| {
        let win = prep.windows[i];
        let mass = anti.between(win.a, win.b);
        ratio(mass, phi_powered(&prep.wt, params.lambda, win.x0, win.h, params.side))
    })
}

/// First index of the largest value.
fn argmax(values: &[f64]) -> (f64, usize) {
    let mut best = (values[0], 0);
    for (i, &v) in values.iter().enumerate().skip(1) {
        if v > best.0 {
            best = (v, i);
        }
    }
    best
}

/// Weak norm over the default window family.
pub fn weak_morrey_norm(f: &SampledFunction, w: &WeightSpec, params: &MorreyParams) -> Result<NormEstimate> {
    weak_morrey_norm_with(f, w, params, DEFAULT_LEVELS)
}

/// Weak norm `sup_window sup_γ (Φ^{−1} γ^p |{|f| > γ} ∩ window|)^{1/p}`.
///
/// The level-set measure is that of the piecewise-linear interpolant of
/// `|f|`. Per window it is piecewise linear in `γ`, so the inner supremum
/// is found exactly by checking each breakpoint and the stationary point of
/// `γ^p (A − Bγ)` on every piece. Windows are visited in decreasing order of
/// their strong value, which bounds the weak value from above, and skipped
/// once that bound falls below the best weak value found so far.
pub fn weak_morrey_norm_with(
    f: &SampledFunction,
    w: &WeightSpec,
    params: &MorreyParams,
    levels: u32,
) -> Result<NormEstimate> {
    let prep = prepare(f, w, params, levels)?;
    let anti = Antiderivative::of_abs_pow(f, params.p);
    let bounds = strong_window_values(&prep, &anti, params);
    let mut order: Vec<usize> = (0..bounds.len()).filter(|&i| bounds[i] > 0.0).collect();
    order.sort_by(|&i, &j| bounds[j].total_cmp(&bounds[i]).then(i.cmp(&j)));

    // (value, window index, gamma)
    let mut best = (0.0f64, 0usize, 0.0f64);
    const BATCH: usize = 256;
    for chunk in order.chunks(BATCH) {
        // strictly below the best: cannot win, not even a tie
        if bounds[chunk[0]] < best.0 {
            break;
        }
        let results = par::map_range(0..chunk.len(), |c| {
            let i = chunk[c];
            if bounds[i] < best.0 {
                return None;
            }
            let win = prep.windows[i];
            let (level_sup, gamma) = sup_level_product(f, win.a, win.b, params.p);
            let phi = phi_powered(&prep.wt, params.lambda, win.x0, win.h, params.side);
            Some((ratio(level_sup, phi), i, gamma))
        });
        for (v, i, gamma) in results.into_iter().flatten() {
            if v > best.0 || (v == best.0 && v > 0.0 && i < best.1) {
                best = (v, i, gamma);
            }
        }
    }
    let win = prep.windows[best.1];
    Ok(NormEstimate {
        value: best.0.powf(1.0 / params.p),
        argmax_x0: win.x0,
        argmax_h: win.h,
        sweep: prep.info,
        weak: true,
        argmax_gamma: if best.0 > 0.0 { Some(best.2) } else { None },
    })
}

/// `sup_γ γ^p |{x ∈ (a, b) : |f̃(x)| > γ}|` and a maximising level, where
/// `f̃` is the zero-extended linear interpolant.
fn sup_level_product(f: &SampledFunction, a: f64, b: f64, p: f64) -> (f64, f64) {
    let g = f.grid();
    let v = f.values();
    let lo = a.max(g.left());
    let hi = b.min(g.right());
    if hi <= lo {
        return (0.0, 0.0);
    }
    // Events: (level, dA, dB) with m(γ) = A − Bγ between events.
    let mut events: Vec<(f64, f64, f64)> = Vec::new();
    let mut a0 = 0.0;
    let (first, frac0) = g.locate(lo);
    let mut j = first;
    let mut x_left = lo;
    let mut u_left = (v[first] + frac0 * (v[first + 1] - v[first])).abs();
    while x_left < hi && j < g.n {
        let cell_right = g.node(j + 1);
        let x_right = cell_right.min(hi);
        let frac = ((x_right - g.node(j)) / g.step).clamp(0.0, 1.0);
        let u_right = (v[j] + frac * (v[j + 1] - v[j])).abs();
        let len = x_right - x_left;
        if len > 0.0 {
            push_cell(&mut events, &mut a0, len, u_left, u_right);
        }
        x_left = x_right;
        u_left = u_right;
        j += 1;
    }
    if events.is_empty() {
        return (0.0, 0.0);
    }
    events.sort_by(|x, y| x.0.total_cmp(&y.0));

    let mut a_coef = a0;
    let mut b_coef = 0.0;
    let mut prev = 0.0f64;
    let mut best = (0.0, 0.0);
    let consider = |gamma: f64, m: f64, best: &mut (f64, f64)| {
        let val = gamma.powf(p) * m.max(0.0);
        if val > best.0 {
            *best = (val, gamma);
        }
    };
    let mut k = 0;
    while k < events.len() {
        let level = events[k].0;
        if level > prev {
            // piece (prev, level): m(γ) = A − Bγ
            consider(level, a_coef - b_coef * level, &mut best);
            if b_coef > 0.0 {
                let star = p * a_coef / ((p + 1.0) * b_coef);
                if star > prev && star < level {
                    consider(star, a_coef - b_coef * star, &mut best);
                }
            }
            prev = level;
        }
        while k < events.len() && events[k].0 == level {
            a_coef += events[k].1;
            b_coef += events[k].2;
            k += 1;
        }
    }
    best
}

/// Adds the level-measure contribution of a linear piece of length `len`
/// running from `|f| = u` to `|f| = w`.
fn push_cell(events: &mut Vec<(f64, f64, f64)>, a0: &mut f64, len: f64, u: f64, w: f64) {
    let (lo, hi) = if u <= w { (u, w) } else { (w, u) };
    if hi <= 0.0 {
        return;
    }
    *a0 += len;
    if hi == lo {
        events.push((lo, -len, 0.0));
        return;
    }
    let slope = len / (hi - lo);
    // below lo the whole piece counts; between lo and hi the measure is
    // slope·(hi − γ); above hi nothing
    events.push((lo, -len + slope * hi, slope));
    events.push((hi, -slope * hi, -slope));
}

/// Strong-norm window quantity `(Φ^{−1} ∫_{window} |f|^p)^{1/p}` for one window.
pub fn window_value(f: &SampledFunction, w: &WeightSpec, params: &MorreyParams, x0: f64, h: f64) -> f64 {
    let (a, b) = match params.domain {
        Domain::Local(t) => (x0.max(0.0), (x0 + h).min(t)),
        Domain::WholeLine => (x0, x0 + h),
    };
    let anti = Antiderivative::of_abs_pow(f, params.p);
    let mass = if b > a { anti.between(a, b) } else { 0.0 };
    ratio(mass, phi(w, params.lambda, params.theta, x0, h, params.side)).powf(1.0 / params.p)
}
