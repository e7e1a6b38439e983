//! One-sided weights and estimators for their class constants.
//!
//! Suprema over triples `a < b < c` are two-stage: every triple of a coarse
//! candidate lattice (128 cells by default), then every triple of the full
//! sweep grid within one coarse spacing of the best coarse triple. Suprema
//! over windows `(x, h)` use all grid-aligned lengths.

use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{Antiderivative, Grid1D, Interval, SampledFunction};
use crate::par;

/// Number of cells of the coarse candidate lattice in triple sweeps.
pub const COARSE_CELLS: usize = 128;

/// Relative change under the last refinement below which an estimate is
/// reported as converged.
pub const CONVERGENCE_THRESHOLD: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub enum WeightKind {
    /// `ω ≡ c`.
    Constant(f64),
    /// `ω(x) = e^{rate·x}`.
    Exponential { rate: f64 },
    /// `ω(x) = |x|^δ`.
    Power(f64),
    /// Tabulated weight, linear between nodes and constant beyond the table.
    Sampled {
        table: SampledFunction,
        mass: Antiderivative,
    },
}

/// A positive weight on the real line.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightSpec {
    kind: WeightKind,
    domain: Interval,
}

impl WeightSpec {
    pub fn constant(c: f64, domain: Interval) -> Result<Self> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::param("weight", format!("constant weight {c} must be positive")));
        }
        Ok(WeightSpec { kind: WeightKind::Constant(c), domain })
    }

    /// `e^x`.
    pub fn exponential(domain: Interval) -> Self {
        WeightSpec {
            kind: WeightKind::Exponential { rate: 1.0 },
            domain,
        }
    }

    /// `|x|^δ`, locally integrable for `δ > −1`.
    pub fn power(delta: f64, domain: Interval) -> Result<Self> {
        if !(delta.is_finite() && delta > -1.0) {
            return Err(Error::param(
                "weight",
                format!("power weight exponent {delta} must exceed -1"),
            ));
        }
        Ok(WeightSpec { kind: WeightKind::Power(delta), domain })
    }

    pub fn sampled(table: SampledFunction) -> Result<Self> {
        if let Some(i) = table.values().iter().position(|&v| v <= 0.0) {
            return Err(Error::data(format!(
                "weight table is not positive at x = {}",
                table.grid().node(i)
            )));
        }
        let domain = table.grid().interval;
        let mass = Antiderivative::of(&table);
        Ok(WeightSpec {
            kind: WeightKind::Sampled { table, mass },
            domain,
        })
    }

    /// Parses `const:<c>`, `exp`, `pow:<δ>` or `file:<path>`.
    pub fn parse(spec: &str, domain: Interval) -> Result<Self> {
        let bad = |why: &str| Error::param("weight", format!("`{spec}`: {why}"));
        let number = |s: &str| s.trim().parse::<f64>().map_err(|_| bad("expected a number"));
        match spec.split_once(':') {
            None if spec == "exp" => Ok(WeightSpec::exponential(domain)),
            Some(("const", c)) => WeightSpec::constant(number(c)?, domain),
            Some(("pow", d)) => WeightSpec::power(number(d)?, domain),
            Some(("file", path)) => {
                WeightSpec::sampled(SampledFunction::from_csv_path(Path::new(path))?)
            }
            _ => Err(bad("expected const:<c>, exp, pow:<delta> or file:<path>")),
        }
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn with_domain(mut self, domain: Interval) -> Self {
        self.domain = domain;
        self
    }

    /// Short registry-style name.
    pub fn label(&self) -> String {
        match &self.kind {
            WeightKind::Constant(c) => format!("const:{c}"),
            WeightKind::Exponential { rate } if *rate == 1.0 => "exp".to_string(),
            WeightKind::Exponential { rate } => format!("exp({rate}x)"),
            WeightKind::Power(d) => format!("pow:{d}"),
            WeightKind::Sampled { .. } => "sampled".to_string(),
        }
    }

    /// True when the weight can be infinite at some point of `grid`'s nodes.
    pub fn singular_on(&self, grid: &Grid1D) -> bool {
        match self.kind {
            WeightKind::Power(d) if d < 0.0 => grid.node_index(0.0, 1e-9).is_some(),
            _ => false,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match &self.kind {
            WeightKind::Constant(c) => *c,
            WeightKind::Exponential { rate } => (rate * x).exp(),
            WeightKind::Power(d) => x.abs().powf(*d),
            WeightKind::Sampled { table, .. } => {
                let g = table.grid();
                table.eval_zero_ext(x.clamp(g.left(), g.right()))
            }
        }
    }

    /// `ω^θ` in the same representation.
    pub fn powered(&self, theta: f64) -> WeightSpec {
        let kind = match &self.kind {
            WeightKind::Constant(c) => WeightKind::Constant(c.powf(theta)),
            WeightKind::Exponential { rate } => WeightKind::Exponential { rate: rate * theta },
            WeightKind::Power(d) => WeightKind::Power(d * theta),
            WeightKind::Sampled { table, .. } => {
                let table = table.map(|v| v.powf(theta)).expect("powers of positive samples are finite");
                let mass = Antiderivative::of(&table);
                WeightKind::Sampled { table, mass }
            }
        };
        WeightSpec { kind, domain: self.domain }
    }

    /// `∫_a^b ω`, possibly `+∞` for non-integrable powers.
    pub fn mass(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        match &self.kind {
            WeightKind::Constant(c) => c * (b - a),
            WeightKind::Exponential { rate } => {
                if *rate == 0.0 {
                    b - a
                } else {
                    // e^{rb} − e^{ra} without cancellation
                    (rate * a).exp() * (rate * (b - a)).exp_m1() / rate
                }
            }
            WeightKind::Power(d) => power_mass(*d, a, b),
            WeightKind::Sampled { table, mass } => {
                let g = table.grid();
                let (l, r) = (g.left(), g.right());
                let v = table.values();
                let below = (l.min(b) - a).max(0.0) * v[0];
                let above = (b - r.max(a)).max(0.0) * v[g.n];
                let inside = mass.between(a.max(l), b.min(r));
                below + inside + above
            }
        }
    }
}

fn power_mass(d: f64, a: f64, b: f64) -> f64 {
    // antiderivative of |x|^d on one side of 0
    let side = |lo: f64, hi: f64| -> f64 {
        // 0 ≤ lo < hi
        if d == -1.0 {
            if lo == 0.0 {
                f64::INFINITY
            } else {
                (hi / lo).ln()
            }
        } else if d < -1.0 && lo == 0.0 {
            f64::INFINITY
        } else {
            (hi.powf(d + 1.0) - lo.powf(d + 1.0)) / (d + 1.0)
        }
    };
    if a >= 0.0 {
        side(a, b)
    } else if b <= 0.0 {
        side(-b, -a)
    } else {
        side(0.0, -a) + side(0.0, b)
    }
}

/// Where a supremum was attained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Maximizer {
    Triple { a: f64, b: f64, c: f64 },
    Window { x0: f64, h: f64 },
    /// Window together with the dyadic dilation exponent `k`.
    DyadicWindow { x0: f64, h: f64, k: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightClassReport {
    pub constant_estimate: f64,
    pub maximizer: Maximizer,
    pub grid: Grid1D,
    /// Estimate on the grid with half as many cells.
    pub coarse_estimate: f64,
    pub converged: bool,
}

impl WeightClassReport {
    pub fn is_finite(&self) -> bool {
        self.constant_estimate.is_finite()
    }
}

fn relative_change(coarse: f64, fine: f64) -> f64 {
    if coarse == fine {
        0.0
    } else {
        (fine - coarse).abs() / fine.abs().max(coarse.abs())
    }
}

/// Runs `estimate` on `sweep` and on the grid with half the cells.
fn with_refinement(
    sweep: Grid1D,
    estimate: impl Fn(&Grid1D) -> Result<(f64, Maximizer)>,
) -> Result<WeightClassReport> {
    let (value, maximizer) = estimate(&sweep)?;
    let coarse_estimate = if sweep.n >= 4 {
        let half = Grid1D::new(sweep.interval, sweep.n / 2)?;
        estimate(&half)?.0
    } else {
        value
    };
    let converged = value.is_finite()
        && coarse_estimate.is_finite()
        && relative_change(coarse_estimate, value) < CONVERGENCE_THRESHOLD;
    Ok(WeightClassReport {
        constant_estimate: value,
        maximizer,
        grid: sweep,
        coarse_estimate,
        converged,
    })
}

#[derive(Debug, Clone, Copy)]
struct Best {
    value: f64,
    idx: (usize, usize, usize),
}

impl Best {
    const NONE: Best = Best { value: f64::NEG_INFINITY, idx: (0, 0, 0) };

    /// Larger value wins; the earlier candidate is kept on ties.
    fn merge(self, other: Best) -> Best {
        if other.value > self.value {
            other
        } else {
            self
        }
    }
}

/// `(c−a)^{−e0} · L(a,b)^{e1} · R(b,c)^{e2}` maximised over grid triples.
struct TripleFunctional<'a> {
    left: &'a WeightSpec,
    right: &'a WeightSpec,
    e0: f64,
    e1: f64,
    e2: f64,
}

impl TripleFunctional<'_> {
    /// Exhaustive search over `i < j < k` with indices in the given ranges
    /// of `nodes`.
    fn search(&self, nodes: &[f64], ri: (usize, usize), rj: (usize, usize), rk: (usize, usize)) -> Best {
        let rows = par::map_range(ri.0..ri.1 + 1, |i| {
            let mut best = Best::NONE;
            for j in rj.0.max(i + 1)..=rj.1 {
                let l = self.left.mass(nodes[i], nodes[j]).powf(self.e1);
                for k in rk.0.max(j + 1)..=rk.1 {
                    let r = self.right.mass(nodes[j], nodes[k]).powf(self.e2);
                    let mut v = (nodes[k] - nodes[i]).powf(-self.e0) * l * r;
                    if v.is_nan() {
                        v = f64::INFINITY;
                    }
                    best = best.merge(Best { value: v, idx: (i, j, k) });
                }
            }
            best
        });
        rows.into_iter().fold(Best::NONE, Best::merge)
    }

    fn sup(&self, sweep: &Grid1D) -> Result<(f64, Maximizer)> {
        if sweep.n < 2 {
            return Err(Error::param("sweep", "triple sweep needs at least two cells"));
        }
        let coarse_cells = COARSE_CELLS.min(sweep.n);
        let stride = sweep.n / coarse_cells;
        let coarse: Vec<f64> = (0..=coarse_cells)
            .map(|i| sweep.node((i * stride).min(sweep.n)))
            .collect();
        let last = coarse.len() - 1;
        let b0 = self.search(&coarse, (0, last), (0, last), (0, last));
        let (ci, cj, ck) = b0.idx;
        let fine: Vec<f64> = sweep.nodes().collect();
        let window = |c: usize| {
            let centre = (c * stride).min(sweep.n);
            (centre.saturating_sub(stride), (centre + stride).min(sweep.n))
        };
        // the coarse optimum is itself a fine triple inside these windows
        let best = self.search(&fine, window(ci), window(cj), window(ck));
        let (i, j, k) = best.idx;
        let (a, b, c) = (fine[i], fine[j], fine[k]);
        Ok((best.value, Maximizer::Triple { a, b, c }))
    }
}

/// Evaluation points for pointwise quantities: the nodes, or the cell
/// midpoints when the weight is singular at a node.
fn sample_points(w: &WeightSpec, sweep: &Grid1D) -> Vec<f64> {
    if w.singular_on(sweep) {
        (0..sweep.n).map(|i| sweep.node(i) + 0.5 * sweep.step).collect()
    } else {
        sweep.nodes().collect()
    }
}

/// `sup (M⁻ω)(x) / ω(x)` over sample points `x` and grid-aligned `h` with
/// `x − h` inside the sweep.
fn left_maximal_ratio(w: &WeightSpec, sweep: &Grid1D) -> (f64, Maximizer) {
    let pts = sample_points(w, sweep);
    let step = sweep.step;
    let rows = par::map_range(0..pts.len(), |i| {
        let x = pts[i];
        let wx = w.eval(x);
        let mut best = Best::NONE;
        for k in 1..=i {
            let h = k as f64 * step;
            let v = w.mass(x - h, x) / h / wx;
            best = best.merge(Best { value: v, idx: (i, k, 0) });
        }
        best
    });
    let best = rows.into_iter().fold(Best::NONE, Best::merge);
    if best.value == f64::NEG_INFINITY {
        return (0.0, Maximizer::Window { x0: pts[0], h: step });
    }
    let (i, k, _) = best.idx;
    (best.value, Maximizer::Window { x0: pts[i], h: k as f64 * step })
}

fn conjugate(p: f64) -> f64 {
    p / (p - 1.0)
}

fn check_p(p: f64) -> Result<()> {
    if !(p.is_finite() && p >= 1.0) {
        return Err(Error::param("p", format!("{p} must be a finite number >= 1")));
    }
    Ok(())
}

/// Estimate of the one-sided Muckenhoupt constant `A_p^+(ω)`.
///
/// For `p > 1` this is the supremum over `a < b < c` of
/// `(c−a)^{−p} ω(a,b) (σ(b,c))^{p−1}` with `σ = ω^{1−p'}`; for `p = 1` the
/// supremum of `M⁻ω / ω`.
pub fn ap_plus_constant(w: &WeightSpec, p: f64, sweep: Grid1D) -> Result<WeightClassReport> {
    check_p(p)?;
    if p == 1.0 {
        return with_refinement(sweep, |g| Ok(left_maximal_ratio(w, g)));
    }
    let sigma = w.powered(1.0 - conjugate(p));
    let functional = TripleFunctional { left: w, right: &sigma, e0: p, e1: 1.0, e2: p - 1.0 };
    with_refinement(sweep, |g| functional.sup(g))
}

/// Estimate of the constant of the two-exponent class `A_{(p,q)}^+`.
pub fn apq_plus_constant(w: &WeightSpec, p: f64, q: f64, sweep: Grid1D) -> Result<WeightClassReport> {
    check_p(p)?;
    if !(q.is_finite() && q > p) {
        return Err(Error::param("q", format!("{q} must be finite and exceed p = {p}")));
    }
    let alpha = 1.0 / p - 1.0 / q;
    let wq = w.powered(q);
    if p == 1.0 {
        return with_refinement(sweep, |g| Ok(left_maximal_ratio(&wq, g)));
    }
    let pc = conjugate(p);
    let sigma = w.powered(-pc);
    let functional = TripleFunctional {
        left: &wq,
        right: &sigma,
        e0: 1.0 - alpha,
        e1: 1.0 / q,
        e2: 1.0 / pc,
    };
    with_refinement(sweep, |g| functional.sup(g))
}

/// Supremum of `ω(x0−h, x0+h) / ω(x0, x0+h)` over grid-aligned windows.
pub fn one_sided_doubling_ratio(w: &WeightSpec, sweep: Grid1D) -> Result<WeightClassReport> {
    with_refinement(sweep, |g| {
        let n = g.n;
        let rows = par::map_range(1..n, |i| {
            let x0 = g.node(i);
            let mut best = Best::NONE;
            for k in 1..=i.min(n - i) {
                let h = k as f64 * g.step;
                let v = w.mass(x0 - h, x0 + h) / w.mass(x0, x0 + h);
                best = best.merge(Best { value: v, idx: (i, k, 0) });
            }
            best
        });
        let best = rows.into_iter().fold(Best::NONE, Best::merge);
        if best.value == f64::NEG_INFINITY {
            return Err(Error::param("sweep", "no window fits inside the sweep"));
        }
        let (i, k, _) = best.idx;
        Ok((best.value, Maximizer::Window { x0: g.node(i), h: k as f64 * g.step }))
    })
}

/// Supremum over windows and `1 ≤ k ≤ k_max` of
/// `ν(x0−h−2^k h, x0−h) / (2^{k e} ν(x0−h, x0))`.
///
/// Without `q`, `ν = ω` and `e = p`. With `q`, `ν = ω^q` and `e = q` for
/// `p > 1` or `e = 1` for `p = 1`. Lengths `h` run over the dyadic
/// multiples of the grid step.
pub fn dyadic_growth_check(
    w: &WeightSpec,
    p: f64,
    q: Option<f64>,
    k_max: u32,
    sweep: Grid1D,
) -> Result<WeightClassReport> {
    check_p(p)?;
    if k_max < 1 {
        return Err(Error::param("k_max", "must be at least 1"));
    }
    let (nu, e) = match q {
        None => (w.clone(), p),
        Some(q) => {
            if !(q.is_finite() && q >= p) {
                return Err(Error::param("q", format!("{q} must be finite and at least p")));
            }
            (w.powered(q), if p > 1.0 { q } else { 1.0 })
        }
    };
    with_refinement(sweep, |g| {
        let n = g.n;
        let rows = par::map_range(0..n + 1, |i| {
            let x0 = g.node(i);
            let mut best = Best::NONE;
            let mut m = 1usize;
            while m <= i {
                let h = m as f64 * g.step;
                for k in 1..=k_max {
                    let reach = m * ((1usize << k) + 1);
                    if reach > i {
                        break;
                    }
                    let far = nu.mass(x0 - h - (1u64 << k) as f64 * h, x0 - h);
                    let near = nu.mass(x0 - h, x0);
                    let v = far / ((2f64).powf(k as f64 * e) * near);
                    best = best.merge(Best { value: v, idx: (i, m, k as usize) });
                }
                m *= 2;
            }
            best
        });
        let best = rows.into_iter().fold(Best::NONE, Best::merge);
        if best.value == f64::NEG_INFINITY {
            return Err(Error::param("sweep", "no dilated window fits inside the sweep"));
        }
        let (i, m, k) = best.idx;
        Ok((
            best.value,
            Maximizer::DyadicWindow { x0: g.node(i), h: m as f64 * g.step, k: k as u32 },
        ))
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EquivalenceReport {
    /// `A_{(p,q)}^+` estimate for `ω`.
    pub two_exponent: WeightClassReport,
    /// `A_{q(1−α)}^+` estimate for `ω^q`.
    pub one_exponent: WeightClassReport,
    pub exponent: f64,
    /// Both finite and converged, or neither.
    pub consistent: bool,
}

/// Compares `ω ∈ A_{(p,q)}^+` with `ω^q ∈ A_{q(1−α)}^+`, `α = 1/p − 1/q`.
pub fn class_equivalence_check(w: &WeightSpec, p: f64, q: f64, sweep: Grid1D) -> Result<EquivalenceReport> {
    let alpha = 1.0 / p - 1.0 / q;
    if !(p > 1.0 && q > p && alpha > 0.0 && alpha < 1.0) {
        return Err(Error::param(
            "alpha",
            format!("need 1 < p < q with 1/p − 1/q in (0, 1), got p = {p}, q = {q}"),
        ));
    }
    let two_exponent = apq_plus_constant(w, p, q, sweep)?;
    let exponent = q * (1.0 - alpha);
    let one_exponent = ap_plus_constant(&w.powered(q), exponent, sweep)?;
    let ok = |r: &WeightClassReport| r.is_finite() && r.converged;
    let consistent = ok(&two_exponent) == ok(&one_exponent);
    Ok(EquivalenceReport { two_exponent, one_exponent, exponent, consistent })
}
