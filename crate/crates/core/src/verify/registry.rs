//! Test functions and operators the experiments sweep over.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Grid1D, SampledFunction};
use crate::morrey::Side;
use crate::operators::{self, FractionalOrder, KernelSpec};

/// Closed-form test functions on a unit template interval `(0, 1)`.
///
/// Text form: `t`, `t2`, `tk:<k>`, `bump:<centre>:<radius>`,
/// `step:<a>:<b>`, `pow:<e>`, `zero`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TestFunction {
    Zero,
    /// `t^k`.
    Monomial(f64),
    /// `exp(−1/(1−((t−c)/r)^2))` inside `|t − c| < r`.
    Bump { centre: f64, radius: f64 },
    /// Indicator of `(a, b)`.
    Step { a: f64, b: f64 },
    /// `t^e` with `e < 0`; the node at 0 is sampled half a step inside.
    Power(f64),
}

impl TestFunction {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            TestFunction::Zero => 0.0,
            TestFunction::Monomial(k) => t.powf(k),
            TestFunction::Bump { centre, radius } => {
                let z = (t - centre) / radius;
                if z.abs() < 1.0 {
                    (-1.0 / (1.0 - z * z)).exp()
                } else {
                    0.0
                }
            }
            TestFunction::Step { a, b } => {
                if t > a && t < b {
                    1.0
                } else if t == a || t == b {
                    0.5
                } else {
                    0.0
                }
            }
            TestFunction::Power(e) => t.powf(e),
        }
    }

    /// Jump points inside the template interval `(0, 1)`.
    pub fn discontinuities(&self) -> Vec<f64> {
        match *self {
            TestFunction::Step { a, b } => [a, b].into_iter().filter(|x| *x > 0.0 && *x < 1.0).collect(),
            _ => Vec::new(),
        }
    }

    /// Samples `t ↦ self(t / scale)` on `(0, scale)` with `n` cells.
    pub fn sample(&self, scale: f64, n: usize) -> Result<SampledFunction> {
        let grid = Grid1D::over(0.0, scale, n)?;
        let f = |t: f64| self.eval(t / scale);
        match *self {
            TestFunction::Power(e) => {
                SampledFunction::from_fn_offset(grid, true, f)?.with_origin_power(e)
            }
            _ => SampledFunction::from_fn(grid, true, f),
        }
    }

    /// Samples on an arbitrary grid without rescaling.
    pub fn sample_on(&self, grid: Grid1D) -> Result<SampledFunction> {
        match *self {
            TestFunction::Power(_) => SampledFunction::from_fn_offset(grid, true, |t| self.eval(t)),
            _ => SampledFunction::from_fn(grid, true, |t| self.eval(t)),
        }
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            TestFunction::Zero => write!(f, "zero"),
            TestFunction::Monomial(1.0) => write!(f, "t"),
            TestFunction::Monomial(2.0) => write!(f, "t2"),
            TestFunction::Monomial(k) => write!(f, "tk:{k}"),
            TestFunction::Bump { centre, radius } => write!(f, "bump:{centre}:{radius}"),
            TestFunction::Step { a, b } => write!(f, "step:{a}:{b}"),
            TestFunction::Power(e) => write!(f, "pow:{e}"),
        }
    }
}

impl FromStr for TestFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::param("family", format!("unknown test function `{s}`"));
        let num = |x: &str| x.parse::<f64>().map_err(|_| bad());
        let parts: Vec<&str> = s.split(':').collect();
        let f = match parts.as_slice() {
            ["zero"] => TestFunction::Zero,
            ["t"] => TestFunction::Monomial(1.0),
            ["t2"] => TestFunction::Monomial(2.0),
            ["tk", k] => TestFunction::Monomial(num(k)?),
            ["bump", c, r] => TestFunction::Bump { centre: num(c)?, radius: num(r)? },
            ["step", a, b] => TestFunction::Step { a: num(a)?, b: num(b)? },
            ["pow", e] => TestFunction::Power(num(e)?),
            _ => return Err(bad()),
        };
        match f {
            TestFunction::Monomial(k) if k < 0.0 => Err(bad()),
            TestFunction::Bump { radius, .. } if radius <= 0.0 => Err(bad()),
            TestFunction::Step { a, b } if a >= b => Err(bad()),
            TestFunction::Power(e) if e >= 0.0 || e <= -1.0 => Err(bad()),
            _ => Ok(f),
        }
    }
}

impl Serialize for TestFunction {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for TestFunction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// `{t, t², χ_(0,1/2), χ_(1/4,3/4)}`.
pub fn polynomial_and_step_family() -> Vec<TestFunction> {
    vec![
        TestFunction::Monomial(1.0),
        TestFunction::Monomial(2.0),
        TestFunction::Step { a: 0.0, b: 0.5 },
        TestFunction::Step { a: 0.25, b: 0.75 },
    ]
}

/// Smooth bumps of several widths and positions.
pub fn bump_family() -> Vec<TestFunction> {
    vec![
        TestFunction::Bump { centre: 0.5, radius: 0.5 },
        TestFunction::Bump { centre: 0.5, radius: 0.25 },
        TestFunction::Bump { centre: 0.25, radius: 0.125 },
        TestFunction::Bump { centre: 0.75, radius: 0.0625 },
    ]
}

/// The whole registry: monomials, bumps, steps and integrable singular powers.
pub fn full_family() -> Vec<TestFunction> {
    let mut v = polynomial_and_step_family();
    v.extend(bump_family());
    v.push(TestFunction::Power(-0.36));
    v.push(TestFunction::Power(-0.2));
    v
}

/// Operators available to the experiments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
pub enum OperatorId {
    /// `M^±_α`; `alpha = 0` is the plain maximal operator.
    Maximal { side: Side, alpha: f64 },
    Weyl { side: Side, alpha: FractionalOrder },
    /// `I^α_{0+}` on the input's own interval.
    RlInt { alpha: FractionalOrder },
    /// `T⁺` with the example kernel, truncated at one grid step.
    Singular,
}

impl OperatorId {
    pub fn label(&self) -> String {
        match self {
            OperatorId::Maximal { side: Side::Plus, alpha } => format!("maximal+:{alpha}"),
            OperatorId::Maximal { side: Side::Minus, alpha } => format!("maximal-:{alpha}"),
            OperatorId::Weyl { side: Side::Plus, alpha } => format!("weyl+:{}", alpha.value()),
            OperatorId::Weyl { side: Side::Minus, alpha } => format!("weyl-:{}", alpha.value()),
            OperatorId::RlInt { alpha } => format!("rl-int:{}", alpha.value()),
            OperatorId::Singular => "singular".to_string(),
        }
    }

    /// Order of the operator; 0 for the maximal and singular operators.
    pub fn order(&self) -> f64 {
        match *self {
            OperatorId::Maximal { alpha, .. } => alpha,
            OperatorId::Weyl { alpha, .. } | OperatorId::RlInt { alpha } => alpha.value(),
            OperatorId::Singular => 0.0,
        }
    }

    /// True for operators on the whole line, whose output extends beyond
    /// the input's support.
    pub fn whole_line(&self) -> bool {
        !matches!(self, OperatorId::RlInt { .. })
    }

    /// Applies the operator. Whole-line outputs are sampled on the input's
    /// support padded by one support length on each side.
    pub fn apply(&self, f: &SampledFunction) -> Result<SampledFunction> {
        let g = *f.grid();
        let len = g.right() - g.left();
        let padded = Grid1D::over(g.left() - len, g.right() + len, 3 * g.n)?;
        match *self {
            OperatorId::Maximal { side, alpha } => {
                let lengths = operators::dyadic_lengths(len, 10, 2);
                operators::maximal_on(f, side, alpha, padded, &lengths)
            }
            OperatorId::Weyl { side, alpha } => operators::weyl_on(f, alpha, side, padded),
            OperatorId::RlInt { alpha } => operators::rl_integral(f, alpha),
            OperatorId::Singular => {
                let kernel = KernelSpec::LogSinc;
                let values = padded
                    .nodes()
                    .map(|x| operators::one_sided_singular(f, &kernel, x, g.step))
                    .collect::<Result<Vec<_>>>()?;
                SampledFunction::new(padded, values, true)
            }
        }
    }
}
