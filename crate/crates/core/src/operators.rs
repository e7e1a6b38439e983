//! One-sided maximal, fractional and singular operators, and the
//! Riemann–Liouville pair on `(0, T)`.
//!
//! Whole-line operators take compactly supported input and truncate every
//! infinite integral at the support.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Antiderivative, Grid1D, SampledFunction};
use crate::morrey::Side;
use crate::par;
use crate::quad;
use crate::special;

/// Fractional order `α ∈ (0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct FractionalOrder(f64);

impl FractionalOrder {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::param("alpha", format!("{alpha} must lie in (0, 1)")));
        }
        Ok(FractionalOrder(alpha))
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// `1 − α`.
    pub fn complement(self) -> FractionalOrder {
        FractionalOrder(1.0 - self.0)
    }
}

impl TryFrom<f64> for FractionalOrder {
    type Error = Error;

    fn try_from(alpha: f64) -> Result<Self> {
        FractionalOrder::new(alpha)
    }
}

impl From<FractionalOrder> for f64 {
    fn from(a: FractionalOrder) -> f64 {
        a.0
    }
}

/// Window lengths `len · 2^j` for `j = −down, …, up`.
pub fn dyadic_lengths(len: f64, down: u32, up: u32) -> Vec<f64> {
    (-(down as i32)..=up as i32).map(|j| len * 2f64.powi(j)).collect()
}

/// Default length family for maximal operators on `f`: support length
/// times `2^j`, `j = −10, …, 2`.
pub fn default_lengths(f: &SampledFunction) -> Vec<f64> {
    let g = f.grid();
    dyadic_lengths(g.right() - g.left(), 10, 2)
}

fn window(side: Side, x: f64, h: f64) -> (f64, f64) {
    match side {
        Side::Plus => (x, x + h),
        Side::Minus => (x - h, x),
    }
}

/// `max_h h^{α−1} ∫ |f|` over the one-sided windows `(x, x+h)` (plus) or
/// `(x−h, x)` (minus), `h` ranging over `lengths`.
pub fn maximal(f: &SampledFunction, side: Side, alpha: f64, x: f64, lengths: &[f64]) -> Result<f64> {
    let anti = Antiderivative::of_abs_pow(f, 1.0);
    maximal_with(&anti, side, alpha, x, lengths)
}

fn maximal_with(anti: &Antiderivative, side: Side, alpha: f64, x: f64, lengths: &[f64]) -> Result<f64> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::param("alpha", format!("{alpha} must lie in [0, 1)")));
    }
    if lengths.is_empty() {
        return Err(Error::param("lengths", "no window lengths given"));
    }
    let mut best = 0.0f64;
    for &h in lengths {
        let (a, b) = window(side, x, h);
        best = best.max(h.powf(alpha - 1.0) * anti.between(a, b));
    }
    Ok(best)
}

/// The maximal operator sampled on the nodes of `target`.
pub fn maximal_on(
    f: &SampledFunction,
    side: Side,
    alpha: f64,
    target: Grid1D,
    lengths: &[f64],
) -> Result<SampledFunction> {
    let anti = Antiderivative::of_abs_pow(f, 1.0);
    maximal_with(&anti, side, alpha, target.left(), lengths)?;
    let values = par::map_range(0..target.n + 1, |i| {
        maximal_with(&anti, side, alpha, target.node(i), lengths).unwrap_or(0.0)
    });
    SampledFunction::new(target, values, true)
}

fn require_compact(f: &SampledFunction) -> Result<()> {
    if !f.compact_support() {
        return Err(Error::domain("whole-line operators need compactly supported input"));
    }
    Ok(())
}

/// Weyl fractional integral: `∫_x^∞ f(y)(y−x)^{α−1} dy` for the plus side,
/// `∫_{−∞}^x f(y)(x−y)^{α−1} dy` for minus.
pub fn weyl_integral(f: &SampledFunction, alpha: FractionalOrder, side: Side, x: f64) -> Result<f64> {
    require_compact(f)?;
    quad::integrate_singular(f, x, alpha.value() - 1.0, side == Side::Minus)
}

/// Weyl integral on the nodes of `target`.
pub fn weyl_on(f: &SampledFunction, alpha: FractionalOrder, side: Side, target: Grid1D) -> Result<SampledFunction> {
    require_compact(f)?;
    let values: Result<Vec<f64>> = par::map_range(0..target.n + 1, |i| {
        weyl_integral(f, alpha, side, target.node(i))
    })
    .into_iter()
    .collect();
    SampledFunction::new(target, values?, true)
}

/// Riemann–Liouville integral `I^α f` based at the left end of `f`'s grid,
/// on the same grid. The node at the left end is 0.
///
/// If `f` carries an origin power `s`, its head `c t^s` with
/// `c = f(x_1)/x_1^s` is integrated exactly,
/// `I^α t^s = Γ(s+1)/Γ(s+1+α) t^{s+α}`, and only the remainder goes through
/// product integration. The result carries origin power `s + α`; when that
/// is negative the node-0 value is the head evaluated half a step inside.
pub fn rl_integral(f: &SampledFunction, alpha: FractionalOrder) -> Result<SampledFunction> {
    let a = alpha.value();
    let grid = *f.grid();
    let scale = 1.0 / special::gamma(a);
    let Some((s, c, rest)) = split_head(f)? else {
        let raw = quad::singular_at_nodes(f, a - 1.0)?;
        return SampledFunction::new(grid, raw.into_iter().map(|v| v * scale).collect(), f.compact_support());
    };
    let k = c * special::gamma(s + 1.0) / special::gamma(s + 1.0 + a);
    let raw = quad::singular_at_nodes(&rest, a - 1.0)?;
    let values = raw
        .into_iter()
        .enumerate()
        .map(|(i, v)| v * scale + k * head_point(&grid, i, s + a).powf(s + a))
        .collect();
    SampledFunction::new(grid, values, f.compact_support())?.with_origin_power(s + a)
}

/// Splits `f` with origin power `s` into `(s, c, f − c t^s)`, the remainder
/// vanishing at node 0 and carrying no head.
fn split_head(f: &SampledFunction) -> Result<Option<(f64, f64, SampledFunction)>> {
    let Some(s) = f.origin_power() else { return Ok(None) };
    let grid = *f.grid();
    let c = f.values()[1] / grid.step.powf(s);
    let mut rest: Vec<f64> = grid
        .nodes()
        .zip(f.values())
        .map(|(t, v)| v - c * (t - grid.left()).powf(s))
        .collect();
    rest[0] = 0.0;
    Ok(Some((s, c, SampledFunction::new(grid, rest, f.compact_support())?)))
}

/// Distance from the left end used to evaluate a power `e` at node `i`:
/// half a step for node 0 when the power is singular there.
fn head_point(grid: &Grid1D, i: usize, e: f64) -> f64 {
    if i == 0 && e < 0.0 {
        0.5 * grid.step
    } else {
        grid.node(i) - grid.left()
    }
}

/// Riemann–Liouville derivative `D^α f = d/dt I^{1−α} f`.
///
/// `g = I^{1−α} f` is differenced centrally inside, with a second-order
/// one-sided stencil at the right end and the forward difference (the mean
/// slope of `g` on the first cell) at node 0.
///
/// If `f` carries an origin power `s`, its head `c t^s` with `c = f(x_1)/x_1^s`
/// is differentiated exactly, `D^α t^s = Γ(s+1)/Γ(s+1−α) t^{s−α}`, and only
/// the remainder `f − c t^s` goes through the difference quotient. The result
/// then carries origin power `s − α` when that exceeds −1; when `s − α` is
/// negative the node-0 value is the head evaluated half a step inside.
pub fn rl_derivative(f: &SampledFunction, alpha: FractionalOrder) -> Result<SampledFunction> {
    let grid = *f.grid();
    if grid.n < 8 {
        return Err(Error::param("n", format!("grid of {} cells is too coarse; need at least 8", grid.n)));
    }
    let a = alpha.value();
    let h = grid.step;
    let Some((s, c, rest)) = split_head(f)? else {
        let d = difference_quotient(rl_integral(f, alpha.complement())?.values(), h);
        return SampledFunction::new(grid, d, f.compact_support());
    };
    let mut d = difference_quotient(rl_integral(&rest, alpha.complement())?.values(), h);
    // Γ(s+1)/Γ(s+1−α); s + 1 − α > −α, so its only possible pole is at 0
    let k = if (s + 1.0 - a).abs() < 1e-12 { 0.0 } else { special::gamma(s + 1.0) / special::gamma(s + 1.0 - a) };
    if k != 0.0 {
        for (i, di) in d.iter_mut().enumerate() {
            *di += k * c * head_point(&grid, i, s - a).powf(s - a);
        }
    }
    let out = SampledFunction::new(grid, d, f.compact_support())?;
    if s - a > -1.0 {
        out.with_origin_power(s - a)
    } else {
        Ok(out)
    }
}

/// Forward difference at node 0, central inside, second-order backward at the end.
fn difference_quotient(g: &[f64], h: f64) -> Vec<f64> {
    let n = g.len() - 1;
    let mut d = vec![0.0; n + 1];
    d[0] = (g[1] - g[0]) / h;
    for i in 1..n {
        d[i] = (g[i + 1] - g[i - 1]) / (2.0 * h);
    }
    d[n] = (3.0 * g[n] - 4.0 * g[n - 1] + g[n - 2]) / (2.0 * h);
    d
}

/// Convolution kernel for the one-sided singular operator.
#[derive(Debug, Clone, PartialEq)]
pub enum KernelSpec {
    /// `K(x) = sin(log|x|) / (x log|x|)` for `x < 0`, zero for `x > 0`.
    LogSinc,
    /// Tabulated kernel, zero outside `support`.
    Sampled { table: SampledFunction, support: SupportSide },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SupportSide {
    NegativeAxis,
    PositiveAxis,
}

/// `sin(u)/u`, with its Taylor series near 0 so that `|sinc| ≤ 1` holds
/// in floating point.
#[inline]
pub fn sinc(u: f64) -> f64 {
    if u.abs() < 1e-4 {
        1.0 - u * u / 6.0
    } else {
        u.sin() / u
    }
}

impl KernelSpec {
    pub fn support(&self) -> SupportSide {
        match self {
            KernelSpec::LogSinc => SupportSide::NegativeAxis,
            KernelSpec::Sampled { support, .. } => *support,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let inside = match self.support() {
            SupportSide::NegativeAxis => x < 0.0,
            SupportSide::PositiveAxis => x > 0.0,
        };
        if !inside {
            return 0.0;
        }
        match self {
            KernelSpec::LogSinc => sinc(x.abs().ln()) / x,
            KernelSpec::Sampled { table, .. } => table.eval_zero_ext(x),
        }
    }
}

/// Gauss–Legendre nodes and weights on `[−1, 1]`.
const GAUSS8: [(f64, f64); 8] = [
    (-0.9602898564975362, 0.10122853629037669),
    (-0.7966664774136267, 0.22238103445337434),
    (-0.525532409916329, 0.31370664587788705),
    (-0.18343464249564978, 0.36268378337836177),
    (0.18343464249564978, 0.36268378337836177),
    (0.525532409916329, 0.31370664587788705),
    (0.7966664774136267, 0.22238103445337434),
    (0.9602898564975362, 0.10122853629037669),
];

/// `∫ φ(d) ρ(f̃(x ± d)) dd / d` over `d ≥ eps` in log-distance `s = ln d`,
/// one Gauss rule per grid cell. `ρ` post-processes the interpolated value;
/// `φ` is a bounded function of `s`.
fn log_distance_integral(
    f: &SampledFunction,
    x: f64,
    eps: f64,
    forward: bool,
    phi: impl Fn(f64) -> f64,
    rho: impl Fn(f64) -> f64,
) -> f64 {
    let g = f.grid();
    let (lo, hi) = if forward {
        ((x + eps).max(g.left()), g.right())
    } else {
        (g.left(), (x - eps).min(g.right()))
    };
    if hi <= lo {
        return 0.0;
    }
    let dist = |y: f64| if forward { y - x } else { x - y };
    let mut acc = 0.0;
    let (first, _) = g.locate(lo);
    let mut y0 = lo;
    let mut j = first;
    while y0 < hi && j < g.n {
        let y1 = g.node(j + 1).min(hi);
        if y1 > y0 {
            let (s0, s1) = {
                let (a, b) = (dist(y0).ln(), dist(y1).ln());
                if a < b { (a, b) } else { (b, a) }
            };
            let (mid, half) = (0.5 * (s0 + s1), 0.5 * (s1 - s0));
            for (t, w) in GAUSS8 {
                let s = mid + half * t;
                let y = if forward { x + s.exp() } else { x - s.exp() };
                acc += w * half * phi(s) * rho(f.eval_zero_ext(y));
            }
        }
        y0 = y1;
        j += 1;
    }
    acc
}

/// ε-truncated one-sided singular integral `∫_{|x−y|>ε} K(x−y) f(y) dy`
/// restricted to the half-line where `K(x−y)` can be non-zero.
pub fn one_sided_singular(f: &SampledFunction, kernel: &KernelSpec, x: f64, eps: f64) -> Result<f64> {
    require_compact(f)?;
    if !(eps >= f.grid().step * (1.0 - 1e-12)) {
        return Err(Error::param(
            "eps",
            format!("truncation {eps} is below the grid step {}", f.grid().step),
        ));
    }
    // K(x − y) ≠ 0 needs y > x for negative support, y < x for positive
    let forward = kernel.support() == SupportSide::NegativeAxis;
    Ok(match kernel {
        // K(−d) d = −sinc(ln d)
        KernelSpec::LogSinc => log_distance_integral(f, x, eps, true, |s| -sinc(s), |v| v),
        KernelSpec::Sampled { .. } => log_distance_integral(
            f,
            x,
            eps,
            forward,
            |s| {
                let d = s.exp();
                let z = if forward { -d } else { d };
                kernel.eval(z) * d
            },
            |v| v,
        ),
    })
}

/// The ε sweep of [`one_sided_singular`]: `eps = eps_max / 2^k` down to the
/// grid step. The limit is declared when successive values differ by less
/// than `1e-6`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsSweep {
    pub eps: Vec<f64>,
    pub values: Vec<f64>,
    pub settled: bool,
}

pub fn singular_eps_sweep(f: &SampledFunction, kernel: &KernelSpec, x: f64, eps_max: f64) -> Result<EpsSweep> {
    let step = f.grid().step;
    let mut eps = Vec::new();
    let mut e = eps_max;
    while e >= step * (1.0 - 1e-12) {
        eps.push(e);
        e *= 0.5;
    }
    if eps.is_empty() {
        return Err(Error::param("eps", "eps_max is below the grid step"));
    }
    let values = eps
        .iter()
        .map(|&e| one_sided_singular(f, kernel, x, e))
        .collect::<Result<Vec<_>>>()?;
    let settled = values.windows(2).last().is_some_and(|w| (w[1] - w[0]).abs() < 1e-6);
    Ok(EpsSweep { eps, values, settled })
}

/// Size-condition majorant `∫_{y>x} |f(y)| (y−x)^{α−1} dy`.
///
/// For `α > 0` this uses the product rule. For `α = 0` the integral runs over
/// `y > x + eps` with the same log-distance rule as
/// [`one_sided_singular`], so `|T⁺_ε f(x)| ≤ sup|xK(x)| · S⁺_0 f(x)` holds
/// node by node; `eps` may be omitted only when `x` lies left of the data.
pub fn size_majorant(f: &SampledFunction, alpha: f64, x: f64, eps: Option<f64>) -> Result<f64> {
    require_compact(f)?;
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::param("alpha", format!("{alpha} must lie in [0, 1)")));
    }
    if alpha > 0.0 {
        let abs = f.map(f64::abs)?;
        return quad::integrate_singular(&abs, x, alpha - 1.0, false);
    }
    let left = f.grid().left();
    let eps = match eps {
        Some(e) if e > 0.0 => e,
        Some(e) => return Err(Error::param("eps", format!("truncation {e} must be positive"))),
        None if x < left => 0.0,
        None => {
            return Err(Error::param(
                "eps",
                "the order-0 majorant needs a truncation radius when x is not left of the data",
            ))
        }
    };
    let eps = eps.max((left - x).max(0.0));
    if eps == 0.0 {
        return Err(Error::param("eps", "x touches the data; give a truncation radius"));
    }
    Ok(log_distance_integral(f, x, eps, true, |_| 1.0, f64::abs))
}

/// Sliding average `(1/t) ∫_x^{x+t} f` with zero extension.
pub fn mean_value(f: &SampledFunction, t: f64, x: f64) -> Result<f64> {
    if !(t >= f.grid().step * (1.0 - 1e-12)) {
        return Err(Error::param("t", format!("{t} is below the grid step {}", f.grid().step)));
    }
    Ok(Antiderivative::of(f).between(x, x + t) / t)
}

/// [`mean_value`] on every node of `f`'s grid.
pub fn mean_value_on(f: &SampledFunction, t: f64) -> Result<SampledFunction> {
    mean_value(f, t, f.grid().left())?;
    let anti = Antiderivative::of(f);
    let g = *f.grid();
    let values = g.nodes().map(|x| anti.between(x, x + t) / t).collect();
    SampledFunction::new(g, values, f.compact_support())
}

/// Empirical suprema of the three kernel conditions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OczkReport {
    /// `sup_{a<b} |∫_{a<|x|<b} K|` over the swept `(a, b)`.
    pub cancellation_sup: f64,
    /// `sup |x K(x)|`.
    pub size_sup: f64,
    /// `sup |K(x−y) − K(x)| |x|^2 / |y|` over `|x| > 2|y| > 0`.
    pub hormander_sup: f64,
    /// `|∫_{1<|x|<e^π} K|`.
    pub unit_to_e_pi: f64,
    /// The same three suprema with half the sweep points.
    pub coarse: [f64; 3],
}

/// Sweeps `a_min ≤ |x| ≤ b_max` with `points` log-spaced samples.
pub fn oczk_check(kernel: &KernelSpec, a_min: f64, b_max: f64, points: usize) -> Result<OczkReport> {
    if !(a_min > 0.0 && b_max > a_min) {
        return Err(Error::param("a_min", format!("need 0 < a_min < b_max, got {a_min}, {b_max}")));
    }
    if points < 16 {
        return Err(Error::param("points", "need at least 16 sweep points"));
    }
    let fine = oczk_sups(kernel, a_min, b_max, points);
    let coarse = oczk_sups(kernel, a_min, b_max, points / 2);
    let unit_to_e_pi = cancellation_integral(kernel, 1.0, std::f64::consts::PI.exp(), 4096).abs();
    Ok(OczkReport {
        cancellation_sup: fine[0],
        size_sup: fine[1],
        hormander_sup: fine[2],
        unit_to_e_pi,
        coarse,
    })
}

/// `∫_{a<|x|<b} K = ∫_{ln a}^{ln b} (K(e^u) + K(−e^u)) e^u du`, cumulative
/// Simpson on `2m` panels; returns the running integral at every node.
fn cumulative_log_integral(kernel: &KernelSpec, a: f64, b: f64, m: usize) -> (Vec<f64>, Vec<f64>) {
    let (u0, u1) = (a.ln(), b.ln());
    let n = 2 * m;
    let du = (u1 - u0) / n as f64;
    let integrand = |u: f64| {
        let x = u.exp();
        (kernel.eval(x) + kernel.eval(-x)) * x
    };
    let us: Vec<f64> = (0..=n).map(|i| u0 + i as f64 * du).collect();
    let vals: Vec<f64> = us.iter().map(|&u| integrand(u)).collect();
    let mut cum = vec![0.0; n + 1];
    for i in (2..=n).step_by(2) {
        let panel = du / 3.0 * (vals[i - 2] + 4.0 * vals[i - 1] + vals[i]);
        // midpoint of the panel by the quadratic through its three nodes
        let half = du / 12.0 * (5.0 * vals[i - 2] + 8.0 * vals[i - 1] - vals[i]);
        cum[i - 1] = cum[i - 2] + half;
        cum[i] = cum[i - 2] + panel;
    }
    (us, cum)
}

fn cancellation_integral(kernel: &KernelSpec, a: f64, b: f64, m: usize) -> f64 {
    let (_, cum) = cumulative_log_integral(kernel, a, b, m);
    cum[cum.len() - 1]
}

fn oczk_sups(kernel: &KernelSpec, a_min: f64, b_max: f64, points: usize) -> [f64; 3] {
    // every (a, b) pair of sweep nodes: the range of the running integral
    let (_, cum) = cumulative_log_integral(kernel, a_min, b_max, points);
    let hi = cum.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let lo = cum.iter().cloned().fold(f64::INFINITY, f64::min);
    let cancellation = hi - lo;

    let (l0, l1) = (a_min.ln(), b_max.ln());
    let xs: Vec<f64> = (0..=points)
        .map(|i| (l0 + (l1 - l0) * i as f64 / points as f64).exp())
        .collect();
    let size = xs
        .iter()
        .flat_map(|&r| [r, -r])
        .map(|x| (x * kernel.eval(x)).abs())
        .fold(0.0, f64::max);

    let ratios: Vec<f64> = (1..=32).map(|k| 0.5 * 2f64.powf(-(k as f64) / 4.0)).collect();
    let rows = par::map_range(0..xs.len(), |i| {
        let mut best = 0.0f64;
        for x in [xs[i], -xs[i]] {
            let kx = kernel.eval(x);
            for &r in &ratios {
                for y in [r * x.abs(), -r * x.abs()] {
                    let v = (kernel.eval(x - y) - kx).abs() * x * x / y.abs();
                    best = best.max(v);
                }
            }
        }
        best
    });
    let hormander = rows.into_iter().fold(0.0, f64::max);
    [cancellation, size, hormander]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chi01(n: usize) -> SampledFunction {
        SampledFunction::from_fn(Grid1D::over(0.0, 1.0, n).unwrap(), true, |_| 1.0).unwrap()
    }

    fn order(a: f64) -> FractionalOrder {
        FractionalOrder::new(a).unwrap()
    }

    #[test]
    fn fractional_order_range() {
        for bad in [0.0, 1.0, -0.2, f64::NAN] {
            assert_eq!(FractionalOrder::new(bad).unwrap_err().parameter_name(), Some("alpha"));
        }
        assert_eq!(order(0.3).complement().value(), 0.7);
    }

    #[test]
    fn maximal_examples() {
        let f = chi01(256);
        let hs = default_lengths(&f);
        assert!((maximal(&f, Side::Plus, 0.0, -1.0, &hs).unwrap() - 0.5).abs() < 1e-12);
        assert!((maximal(&f, Side::Plus, 0.0, 0.5, &hs).unwrap() - 1.0).abs() < 1e-12);
        let z = SampledFunction::zeros(*f.grid(), true);
        assert_eq!(maximal(&z, Side::Minus, 0.3, 0.5, &hs).unwrap(), 0.0);
        assert!(maximal(&f, Side::Plus, 1.0, 0.5, &hs).is_err());
    }

    #[test]
    fn weyl_examples() {
        let f = chi01(1024);
        assert!((weyl_integral(&f, order(0.5), Side::Plus, 0.0).unwrap() - 2.0).abs() < 1e-4);
        let v = weyl_integral(&f, order(0.5), Side::Plus, -1.0).unwrap();
        assert!((v - 2.0 * (2f64.sqrt() - 1.0)).abs() < 1e-4);
        // mirror image on the other side
        let v = weyl_integral(&f, order(0.5), Side::Minus, 2.0).unwrap();
        assert!((v - 2.0 * (2f64.sqrt() - 1.0)).abs() < 1e-4);
        let open = SampledFunction::from_fn(*f.grid(), false, |_| 1.0).unwrap();
        assert!(weyl_integral(&open, order(0.5), Side::Plus, 0.0).is_err());
    }

    #[test]
    fn rl_integral_power_rule() {
        let g = Grid1D::over(0.0, 1.0, 2048).unwrap();
        let f = SampledFunction::from_fn(g, false, |t| t).unwrap();
        let r = rl_integral(&f, order(0.5)).unwrap();
        let c = 1.0 / special::gamma(2.5);
        for (t, v) in g.nodes().zip(r.values()).skip(1) {
            assert!((v - c * t.powf(1.5)).abs() <= 1e-3 * c * t.powf(1.5));
        }
        assert_eq!(r.values()[0], 0.0);
    }

    #[test]
    fn declared_heads_are_handled_exactly() {
        let g = Grid1D::over(0.0, 1.0, 64).unwrap();
        let a = FractionalOrder::new(0.3).unwrap();
        let f = SampledFunction::from_fn_offset(g, false, |t| 2.0 * t.powf(-0.4)).unwrap().with_origin_power(-0.4).unwrap();
        let i = rl_integral(&f, a).unwrap();
        let d = rl_derivative(&f, a).unwrap();
        assert!((i.origin_power().unwrap() + 0.1).abs() < 1e-15);
        assert!((d.origin_power().unwrap() + 0.7).abs() < 1e-15);
        let ki = 2.0 * special::gamma(0.6) / special::gamma(0.9);
        let kd = 2.0 * special::gamma(0.6) / special::gamma(0.3);
        for (t, (vi, vd)) in g.nodes().zip(i.values().iter().zip(d.values())).skip(1) {
            assert!((vi - ki * t.powf(-0.1)).abs() < 1e-12 * vi.abs());
            assert!((vd - kd * t.powf(-0.7)).abs() < 1e-12 * vd.abs());
        }
        // node 0 holds the head half a step inside
        assert!((i.values()[0] - ki * (0.5 * g.step).powf(-0.1)).abs() < 1e-12 * i.values()[0]);
        // D^α t^{α−1} = 0
        let h = SampledFunction::from_fn_offset(g, false, |t| t.powf(-0.7)).unwrap().with_origin_power(-0.7).unwrap();
        assert!(rl_derivative(&h, a).unwrap().values().iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn rl_derivative_of_constant() {
        let g = Grid1D::over(0.0, 1.0, 4096).unwrap();
        let f = SampledFunction::from_fn(g, false, |_| 2.0).unwrap();
        let d = rl_derivative(&f, order(0.5)).unwrap();
        for (t, v) in g.nodes().zip(d.values()).filter(|(t, _)| *t >= 0.125) {
            let exact = 2.0 / std::f64::consts::PI.sqrt() / t.sqrt();
            assert!((v - exact).abs() < 1e-2 * exact);
        }
        let coarse = Grid1D::over(0.0, 1.0, 7).unwrap();
        let f = SampledFunction::from_fn(coarse, false, |_| 2.0).unwrap();
        assert_eq!(rl_derivative(&f, order(0.5)).unwrap_err().parameter_name(), Some("n"));
    }

    #[test]
    fn log_sinc_kernel_values() {
        let k = KernelSpec::LogSinc;
        assert_eq!(k.eval(0.5), 0.0);
        assert_eq!(k.eval(2.0), 0.0);
        assert!((k.eval(-1.0) + 1.0).abs() < 1e-15);
        let x = -(2f64).exp();
        assert!((k.eval(x) - (2f64).sin() / (x * 2.0)).abs() < 1e-15);
    }

    #[test]
    fn singular_linear_and_eps_checked() {
        let g = Grid1D::over(0.0, 1.0, 256).unwrap();
        let f = SampledFunction::from_fn(g, true, |x| (3.0 * x).sin()).unwrap();
        let k = KernelSpec::LogSinc;
        let a = one_sided_singular(&f, &k, -0.5, 0.01).unwrap();
        let b = one_sided_singular(&f.scale(2.0).unwrap(), &k, -0.5, 0.01).unwrap();
        assert!((b - 2.0 * a).abs() < 1e-14);
        assert_eq!(one_sided_singular(&f, &k, 0.5, 1e-4).unwrap_err().parameter_name(), Some("eps"));
        let z = SampledFunction::zeros(g, true);
        assert_eq!(one_sided_singular(&z, &k, 0.5, 0.01).unwrap(), 0.0);
    }

    #[test]
    fn singular_eps_sweep_settles_left_of_support() {
        let f = chi01(1024);
        let s = singular_eps_sweep(&f, &KernelSpec::LogSinc, -0.5, 0.25).unwrap();
        assert!(s.settled);
    }

    #[test]
    fn majorant_examples_and_domination() {
        let f = chi01(1024);
        assert!((size_majorant(&f, 0.5, 0.0, None).unwrap() - 2.0).abs() < 1e-4);
        // ∫_0^1 dy / (y + 1) = ln 2
        assert!((size_majorant(&f, 0.0, -1.0, None).unwrap() - 2f64.ln()).abs() < 1e-12);
        assert_eq!(size_majorant(&f, 0.0, 0.5, None).unwrap_err().parameter_name(), Some("eps"));
        let g = Grid1D::over(0.0, 1.0, 256).unwrap();
        let h = SampledFunction::from_fn(g, true, |x| (9.0 * x).cos()).unwrap();
        for x in [-0.7, -0.1, 0.2, 0.6] {
            for eps in [g.step, 0.05, 0.3] {
                let t = one_sided_singular(&h, &KernelSpec::LogSinc, x, eps).unwrap();
                let s = size_majorant(&h, 0.0, x, Some(eps)).unwrap();
                assert!(t.abs() <= s, "x={x} eps={eps}");
            }
        }
    }

    #[test]
    fn mean_value_examples() {
        let f = chi01(256);
        assert!((mean_value(&f, 0.25, 0.5).unwrap() - 1.0).abs() < 1e-14);
        assert!((mean_value(&f, 0.2, 0.9).unwrap() - 0.5).abs() < 1e-12);
        assert!(mean_value(&f, 1e-4, 0.5).is_err());
        let c = SampledFunction::from_fn(Grid1D::over(-1.0, 1.0, 64).unwrap(), false, |_| 3.0).unwrap();
        assert!((mean_value(&c, 0.5, -0.25).unwrap() - 3.0).abs() < 1e-14);
    }

    #[test]
    fn oczk_log_sinc_kernel() {
        let r = oczk_check(&KernelSpec::LogSinc, 1e-3, 1e3, 4096).unwrap();
        assert!(r.size_sup <= 1.0);
        assert!(r.cancellation_sup <= 4.0);
        assert!((r.unit_to_e_pi - 1.851937).abs() < 1e-3, "{}", r.unit_to_e_pi);
        assert!(r.hormander_sup.is_finite());
        assert!(oczk_check(&KernelSpec::LogSinc, 2.0, 1.0, 64).is_err());
    }
}
