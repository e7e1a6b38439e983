//! Intervals, uniform grids and sampled functions.
//!
//! A [`SampledFunction`] is the carrier for every function the crate works
//! with: right-hand sides, weights given as tables, operator outputs. Values
//! live on the `n + 1` nodes of a uniform [`Grid1D`] and are interpolated
//! linearly in between.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Open interval `(left, right)` with `left < right`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub left: f64,
    pub right: f64,
}

impl Interval {
    pub fn new(left: f64, right: f64) -> Result<Self> {
        if !(left.is_finite() && right.is_finite()) {
            return Err(Error::param("interval", "endpoints must be finite"));
        }
        if left >= right {
            return Err(Error::param(
                "interval",
                format!("left {left} must be strictly less than right {right}"),
            ));
        }
        Ok(Interval { left, right })
    }

    /// The unit-length window `I = (x0, x0 + h)`.
    pub fn window(x0: f64, h: f64) -> Result<Self> {
        Interval::new(x0, x0 + h)
    }

    #[inline]
    pub fn len(&self) -> f64 {
        self.right - self.left
    }

    #[inline]
    pub fn contains(&self, x: f64) -> bool {
        x >= self.left && x <= self.right
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        other.left >= self.left && other.right <= self.right
    }

    /// `λI = (x0, x0 + λh)`.
    pub fn dilate(&self, lambda: f64) -> Result<Self> {
        Interval::new(self.left, self.left + lambda * self.len())
    }

    /// `(λI)⁻₋ = (x0 − (λ+1)h, x0 − h)`.
    pub fn left_shifted(&self, lambda: f64) -> Result<Self> {
        let h = self.len();
        Interval::new(self.left - (lambda + 1.0) * h, self.left - h)
    }

    /// `I⁻ = (x0 − h, x0)`, the window immediately to the left.
    pub fn left_neighbour(&self) -> Self {
        Interval {
            left: self.left - self.len(),
            right: self.left,
        }
    }

    /// `I⁺ = (x0 + h, x0 + 2h)`.
    pub fn right_neighbour(&self) -> Self {
        Interval {
            left: self.right,
            right: self.right + self.len(),
        }
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let l = self.left.max(other.left);
        let r = self.right.min(other.right);
        (l < r).then_some(Interval { left: l, right: r })
    }
}

/// Uniform grid with `n` cells over an interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    pub interval: Interval,
    pub n: usize,
    pub step: f64,
}

impl Grid1D {
    pub fn new(interval: Interval, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("n", "grid needs at least one cell"));
        }
        Ok(Grid1D {
            interval,
            n,
            step: interval.len() / n as f64,
        })
    }

    pub fn over(left: f64, right: f64, n: usize) -> Result<Self> {
        Grid1D::new(Interval::new(left, right)?, n)
    }

    /// Grid over `interval` with `per_unit` cells per unit length (at least one).
    pub fn with_density(interval: Interval, per_unit: usize) -> Result<Self> {
        let n = ((interval.len() * per_unit as f64).round() as usize).max(1);
        Grid1D::new(interval, n)
    }

    #[inline]
    pub fn left(&self) -> f64 {
        self.interval.left
    }

    #[inline]
    pub fn right(&self) -> f64 {
        self.interval.right
    }

    /// Number of nodes.
    #[inline]
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.n + 1
    }

    #[inline]
    pub fn node(&self, i: usize) -> f64 {
        if i == self.n {
            self.interval.right
        } else {
            self.interval.left + i as f64 * self.step
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.n).map(move |i| self.node(i))
    }

    /// Same interval, `factor` times as many cells.
    pub fn refined(&self, factor: usize) -> Self {
        Grid1D {
            interval: self.interval,
            n: self.n * factor,
            step: self.interval.len() / (self.n * factor) as f64,
        }
    }

    /// Cell index and fractional position of `x`, clamped to the grid.
    #[inline]
    pub fn locate(&self, x: f64) -> (usize, f64) {
        let s = (x - self.interval.left) / self.step;
        if s <= 0.0 {
            return (0, s.max(0.0));
        }
        let i = (s.floor() as usize).min(self.n - 1);
        (i, (s - i as f64).min(1.0))
    }

    /// Index of the node nearest to `x`, if `x` lies on a node within `tol` steps.
    pub fn node_index(&self, x: f64, tol: f64) -> Option<usize> {
        let s = (x - self.interval.left) / self.step;
        let k = s.round();
        if k < 0.0 || k > self.n as f64 || (s - k).abs() > tol {
            return None;
        }
        Some(k as usize)
    }

    pub fn same_as(&self, other: &Grid1D) -> bool {
        self.n == other.n
            && self.interval.left == other.interval.left
            && self.interval.right == other.interval.right
    }
}

/// A real function sampled on the nodes of a uniform grid.
///
/// With `compact_support` set the function is zero outside the grid.
/// `origin_power` optionally records that near the left endpoint the function
/// behaves like `c·(x − left)^s`; the singular product quadrature then
/// integrates the first cell against that profile instead of the linear
/// interpolant, and the node-0 value is only a finite proxy.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    grid: Grid1D,
    values: Vec<f64>,
    compact_support: bool,
    origin_power: Option<f64>,
}

impl SampledFunction {
    pub fn new(grid: Grid1D, values: Vec<f64>, compact_support: bool) -> Result<Self> {
        if values.len() != grid.n + 1 {
            return Err(Error::data(format!(
                "expected {} samples for a grid of {} cells, got {}",
                grid.n + 1,
                grid.n,
                values.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::data(format!(
                "sample {i} at x = {} is not finite",
                grid.node(i)
            )));
        }
        Ok(SampledFunction {
            grid,
            values,
            compact_support,
            origin_power: None,
        })
    }

    /// Samples `f` on every node of `grid`.
    pub fn from_fn(grid: Grid1D, compact_support: bool, f: impl Fn(f64) -> f64) -> Result<Self> {
        let values = grid.nodes().map(f).collect();
        SampledFunction::new(grid, values, compact_support)
    }

    /// Samples `f` with the node at the left endpoint replaced by `f(left + step/2)`.
    ///
    /// Used for functions that are singular at the left endpoint.
    pub fn from_fn_offset(
        grid: Grid1D,
        compact_support: bool,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        let mut values: Vec<f64> = grid.nodes().map(&f).collect();
        values[0] = f(grid.left() + 0.5 * grid.step);
        SampledFunction::new(grid, values, compact_support)
    }

    pub fn zeros(grid: Grid1D, compact_support: bool) -> Self {
        SampledFunction {
            grid,
            values: vec![0.0; grid.n + 1],
            compact_support,
            origin_power: None,
        }
    }

    pub fn with_origin_power(mut self, s: f64) -> Result<Self> {
        if !(s.is_finite() && s > -1.0) {
            return Err(Error::param(
                "origin_power",
                format!("exponent {s} must exceed -1 for the head to be integrable"),
            ));
        }
        self.origin_power = Some(s);
        Ok(self)
    }

    pub fn without_origin_power(mut self) -> Self {
        self.origin_power = None;
        self
    }

    #[inline]
    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn compact_support(&self) -> bool {
        self.compact_support
    }

    #[inline]
    pub fn origin_power(&self) -> Option<f64> {
        self.origin_power
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Applies `op` to every sample, keeping grid and flags.
    pub fn map(&self, op: impl Fn(f64) -> f64) -> Result<Self> {
        let mut out = SampledFunction::new(
            self.grid,
            self.values.iter().map(|&v| op(v)).collect(),
            self.compact_support,
        )?;
        out.origin_power = self.origin_power;
        Ok(out)
    }

    pub fn scale(&self, c: f64) -> Result<Self> {
        self.map(|v| c * v)
    }

    /// Pointwise combination of two functions on the same grid.
    pub fn zip_with(&self, other: &SampledFunction, op: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if !self.grid.same_as(&other.grid) {
            return Err(Error::data("functions live on different grids"));
        }
        SampledFunction::new(
            self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| op(a, b))
                .collect(),
            self.compact_support && other.compact_support,
        )
    }

    /// Linear interpolant, zero outside the grid.
    #[inline]
    pub fn eval_zero_ext(&self, x: f64) -> f64 {
        if x < self.grid.left() || x > self.grid.right() {
            return 0.0;
        }
        self.interp(x)
    }

    #[inline]
    fn interp(&self, x: f64) -> f64 {
        let (i, t) = self.grid.locate(x);
        let a = self.values[i];
        let b = self.values[i + 1];
        a + t * (b - a)
    }

    /// Linear interpolant; outside the grid this is 0 for compactly supported
    /// functions and a domain error otherwise.
    pub fn value_at(&self, x: f64) -> Result<f64> {
        if self.grid.interval.contains(x) {
            Ok(self.interp(x))
        } else if self.compact_support {
            Ok(0.0)
        } else {
            Err(Error::domain(format!(
                "x = {x} outside ({}, {})",
                self.grid.left(),
                self.grid.right()
            )))
        }
    }

    /// Smallest interval containing every node with a nonzero value.
    pub fn support(&self) -> Option<Interval> {
        let first = self.values.iter().position(|v| *v != 0.0)?;
        let last = self.values.iter().rposition(|v| *v != 0.0)?;
        let l = self.grid.node(first.saturating_sub(1));
        let r = self.grid.node((last + 1).min(self.grid.n));
        Interval::new(l, r).ok()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Translate by `shift`: returns `x ↦ f(x + shift)` on the same grid,
    /// zero-extended.
    pub fn translated(&self, shift: f64) -> Result<Self> {
        let g = self.grid;
        let s = shift / g.step;
        if (s - s.round()).abs() < 1e-9 {
            let k = s.round() as i64;
            let values = (0..=g.n as i64)
                .map(|i| match i + k {
                    j if (0..=g.n as i64).contains(&j) => self.values[j as usize],
                    _ => 0.0,
                })
                .collect();
            return SampledFunction::new(g, values, self.compact_support);
        }
        SampledFunction::from_fn(g, self.compact_support, |x| self.eval_zero_ext(x + shift))
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = std::fs::File::open(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        SampledFunction::from_csv_reader(file)
    }

    /// Reads the `t,value` CSV format; spacing must be uniform to 1e-9
    /// relative to the interval length.
    pub fn from_csv_reader(reader: impl Read) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "t" || &headers[1] != "value" {
            return Err(Error::data("CSV header must be `t,value`"));
        }
        let mut ts = Vec::new();
        let mut vs = Vec::new();
        for (row, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let parse = |k: usize| -> Result<f64> {
                rec.get(k)
                    .ok_or_else(|| Error::data(format!("row {}: missing column", row + 1)))?
                    .parse::<f64>()
                    .map_err(|e| Error::data(format!("row {}: {e}", row + 1)))
            };
            ts.push(parse(0)?);
            vs.push(parse(1)?);
        }
        if ts.len() < 2 {
            return Err(Error::data("need at least two rows"));
        }
        for i in 1..ts.len() {
            if ts[i] <= ts[i - 1] {
                return Err(Error::data(format!("row {}: t is not strictly increasing", i + 1)));
            }
        }
        let n = ts.len() - 1;
        let (t0, tn) = (ts[0], ts[n]);
        let step = (tn - t0) / n as f64;
        let tol = 1e-9 * (tn - t0);
        let first = ts[1] - ts[0];
        for i in 2..ts.len() {
            if ((ts[i] - ts[i - 1]) - first).abs() > tol {
                return Err(Error::data(format!(
                    "row {}: non-uniform spacing at t = {}",
                    i + 1,
                    ts[i]
                )));
            }
        }
        for (i, &t) in ts.iter().enumerate() {
            if (t - (t0 + i as f64 * step)).abs() > tol {
                return Err(Error::data(format!("row {}: non-uniform spacing at t = {t}", i + 1)));
            }
        }
        let grid = Grid1D::over(t0, tn, n).map_err(|e| Error::data(e.to_string()))?;
        SampledFunction::new(grid, vs, true)
    }

    pub fn write_csv(&self, writer: impl Write) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["t", "value"])?;
        for (i, v) in self.values.iter().enumerate() {
            w.write_record([format!("{}", self.grid.node(i)), format!("{v}")])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_path(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = std::fs::File::create(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        self.write_csv(file)
    }
}

/// Cumulative integral of the piecewise-linear interpolant of nodal values.
///
/// `at(b) - at(a)` is the trapezoidal integral over `(a, b)` with linear
/// interpolation at non-aligned endpoints, so sums over adjacent intervals
/// telescope exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct Antiderivative {
    grid: Grid1D,
    values: Vec<f64>,
    prefix: Vec<f64>,
}

impl Antiderivative {
    pub fn new(grid: Grid1D, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.n + 1);
        let mut prefix = Vec::with_capacity(values.len());
        let mut acc = 0.0;
        prefix.push(0.0);
        for w in values.windows(2) {
            acc += 0.5 * grid.step * (w[0] + w[1]);
            prefix.push(acc);
        }
        Antiderivative {
            grid,
            values,
            prefix,
        }
    }

    pub fn of(f: &SampledFunction) -> Self {
        Antiderivative::new(*f.grid(), f.values().to_vec())
    }

    /// Antiderivative of `|f|^p`.
    pub fn of_abs_pow(f: &SampledFunction, p: f64) -> Self {
        let vals = f
            .values()
            .iter()
            .map(|v| if p == 1.0 { v.abs() } else { v.abs().powf(p) })
            .collect();
        Antiderivative::new(*f.grid(), vals)
    }

    /// `∫_left^x`, constant outside the grid (zero extension).
    #[inline]
    pub fn at(&self, x: f64) -> f64 {
        if x <= self.grid.left() {
            return 0.0;
        }
        if x >= self.grid.right() {
            return self.prefix[self.grid.n];
        }
        let (i, t) = self.grid.locate(x);
        let a = self.values[i];
        let b = self.values[i + 1];
        self.prefix[i] + self.grid.step * t * (a + 0.5 * t * (b - a))
    }

    #[inline]
    pub fn between(&self, a: f64, b: f64) -> f64 {
        self.at(b) - self.at(a)
    }

    pub fn total(&self) -> f64 {
        self.prefix[self.grid.n]
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn node_values(&self) -> &[f64] {
        &self.values
    }
}
