//! Flattening experiment reports into verification tables.

use crate::error::Result;
use crate::report::{Cell, Table};

use super::{CompactnessReport, EquicontinuityReport, MembershipReport, RatioReport, ScalingReport};

pub const VERIFY_COLUMNS: [&str; 7] =
    ["experiment", "row_id", "parameters", "source_norm", "target_norm", "ratio", "verdict"];

pub fn verify_table() -> Table {
    Table::keyed(VERIFY_COLUMNS, "row_id").expect("row_id is a column")
}

/// `k=v` pairs joined by `;`, in the given order.
pub fn flatten(params: &[(&str, String)]) -> String {
    params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";")
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "fail"
    }
}

struct Rows<'a> {
    table: &'a mut Table,
    experiment: &'a str,
    prefix: &'a str,
    params: &'a str,
}

impl Rows<'_> {
    fn push(&mut self, id: &str, extra: &str, source: Cell, target: Cell, ratio: Cell, verdict: &str) -> Result<()> {
        let params = match (self.params.is_empty(), extra.is_empty()) {
            (_, true) => self.params.to_string(),
            (true, false) => extra.to_string(),
            (false, false) => format!("{};{extra}", self.params),
        };
        self.table.push(vec![
            self.experiment.into(),
            format!("{}{id}", self.prefix).into(),
            params.into(),
            source,
            target,
            ratio,
            verdict.into(),
        ])
    }
}

impl RatioReport {
    pub fn append_rows(&self, table: &mut Table, experiment: &str, prefix: &str, params: &str) -> Result<()> {
        let mut rows = Rows { table, experiment, prefix, params };
        for r in &self.rows {
            let extra = flatten(&[
                ("op", self.operator.clone()),
                ("f", r.function.to_string()),
                ("weight", r.weight.clone()),
                ("T", crate::report::format_number(r.horizon)),
                ("n", r.n.to_string()),
            ]);
            rows.push(&r.id, &extra, r.source_norm.into(), r.target_norm.into(), r.ratio.into(), r.status.as_str())?;
        }
        Ok(())
    }
}

impl ScalingReport {
    /// One row per horizon and a `fit` row carrying the slope in the ratio
    /// column; the fit passes when the slope is at most `predicted + tol`.
    pub fn append_rows(&self, table: &mut Table, experiment: &str, prefix: &str, params: &str, tol: f64) -> Result<bool> {
        let mut rows = Rows { table, experiment, prefix, params };
        for (i, (t, r)) in self.horizons.iter().zip(&self.max_ratios).enumerate() {
            let extra = flatten(&[("T", crate::report::format_number(*t))]);
            rows.push(&format!("{i:03}"), &extra, Cell::Missing, Cell::Missing, (*r).into(), "ok")?;
        }
        let ok = self.fit.slope <= self.predicted + tol;
        let extra = flatten(&[("predicted", crate::report::format_number(self.predicted))]);
        rows.push("fit", &extra, Cell::Missing, Cell::Missing, self.fit.slope.into(), pass(ok))?;
        Ok(ok)
    }
}

impl EquicontinuityReport {
    /// One row per shift and a `fit` row; passes when the slope is at least
    /// `predicted − tol`.
    pub fn append_rows(&self, table: &mut Table, experiment: &str, prefix: &str, params: &str, tol: f64) -> Result<bool> {
        let mut rows = Rows { table, experiment, prefix, params };
        for (i, (y, m)) in self.shifts.iter().zip(&self.moduli).enumerate() {
            let extra = flatten(&[("shift", crate::report::format_number(*y))]);
            rows.push(&format!("{i:03}"), &extra, Cell::Missing, (*m).into(), Cell::Missing, "ok")?;
        }
        let ok = self.fit.slope >= self.predicted - tol;
        let extra = flatten(&[("predicted", crate::report::format_number(self.predicted))]);
        rows.push("fit", &extra, Cell::Missing, Cell::Missing, self.fit.slope.into(), pass(ok))?;
        Ok(ok)
    }
}

impl CompactnessReport {
    /// Passes when both curves are non-increasing.
    pub fn append_rows(&self, table: &mut Table, experiment: &str, prefix: &str, params: &str) -> Result<bool> {
        let mut rows = Rows { table, experiment, prefix, params };
        rows.push("bound", "", Cell::Missing, self.uniform_bound.into(), Cell::Missing, "ok")?;
        for (i, (l, m)) in self.shifts.iter().zip(&self.moduli).enumerate() {
            let extra = flatten(&[("shift", crate::report::format_number(*l))]);
            rows.push(&format!("shift-{i:03}"), &extra, Cell::Missing, (*m).into(), Cell::Missing, pass(self.moduli_decreasing))?;
        }
        for (i, (r, t)) in self.radii.iter().zip(&self.tails).enumerate() {
            let extra = flatten(&[("R", crate::report::format_number(*r))]);
            rows.push(&format!("tail-{i:03}"), &extra, Cell::Missing, (*t).into(), Cell::Missing, pass(self.tails_decreasing))?;
        }
        Ok(self.moduli_decreasing && self.tails_decreasing)
    }
}

impl MembershipReport {
    /// One row per resolution; the ratio column is the growth over the
    /// previous resolution and the verdict column holds the overall verdict.
    pub fn append_rows(&self, table: &mut Table, experiment: &str, prefix: &str, params: &str) -> Result<()> {
        let verdict = match self.verdict {
            super::MembershipVerdict::Converging => "converging",
            super::MembershipVerdict::Diverging => "diverging",
            super::MembershipVerdict::Inconclusive => "inconclusive",
        };
        let mut rows = Rows { table, experiment, prefix, params };
        for (i, (n, v)) in self.ns.iter().zip(&self.norms).enumerate() {
            let growth = if i == 0 { Cell::Missing } else { self.growth[i - 1].into() };
            rows.push(&format!("{i:03}"), &flatten(&[("n", n.to_string())]), Cell::Missing, (*v).into(), growth, verdict)?;
        }
        Ok(())
    }
}
