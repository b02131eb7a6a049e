//! Printed reference tables and the comparison against computed ones.
//!
//! Values are stored exactly as printed, as two-digit mantissas like
//! `0.89E-2`, including the obvious misprints.

use std::fmt;

use crate::error::{Error, Result};
use crate::study::{ConvergenceTable, TableRow};

const SOURCES: [&str; 6] = [
    include_str!("../data/table1.txt"),
    include_str!("../data/table2.txt"),
    include_str!("../data/table3.txt"),
    include_str!("../data/table4.txt"),
    include_str!("../data/table5.txt"),
    include_str!("../data/table6.txt"),
];

/// Relative window around a printed value.
pub const VALUE_TOL: f64 = 0.05;
/// Window for printed rates in the graded regime.
pub const RATE_TOL: f64 = 0.05;
/// Window for supercloseness rates on the N = 2048 row, where the printed
/// rates are still transient.
pub const TRANSIENT_RATE_TOL: f64 = 0.10;
pub const FALLBACK_ENERGY_RATE: (f64, f64) = (1.0, 0.10);
pub const FALLBACK_SUPERCLOSE_RATE: (f64, f64) = (2.0, 0.15);
/// Fallback columns are checked on this many final doublings.
pub const FALLBACK_DOUBLINGS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    /// `||u - u^N||_E`.
    Energy,
    /// `||u^I - u^N||_E`.
    Superclose,
}

/// A printed number such as `0.89E-2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Printed {
    /// Mantissa digits, e.g. 89.
    pub digits: i64,
    /// Decimal exponent as printed, e.g. -2.
    pub exponent: i32,
}

impl Printed {
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::ReferenceData(format!("cannot parse printed value {s:?}"));
        let (m, e) = s.split_once(['E', 'e']).ok_or_else(bad)?;
        let frac = m.strip_prefix("0.").ok_or_else(bad)?;
        if frac.len() != 2 {
            return Err(bad());
        }
        Ok(Self {
            digits: frac.parse().map_err(|_| bad())?,
            exponent: e.parse().map_err(|_| bad())?,
        })
    }

    pub fn value(&self) -> f64 {
        self.digits as f64 / 100.0 * 10f64.powi(self.exponent)
    }

    /// `v` written with this exponent and rounded to two mantissa digits
    /// gives the printed digits.
    pub fn rounds_to(&self, v: f64) -> bool {
        let scaled = v / 10f64.powi(self.exponent) * 100.0;
        scaled.round() as i64 == self.digits
    }

    pub fn matches(&self, v: f64) -> bool {
        self.rounds_to(v) || ((v - self.value()) / self.value()).abs() <= VALUE_TOL
    }
}

impl fmt::Display for Printed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "0.{:02}E{}", self.digits, self.exponent)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceRow {
    pub n: usize,
    /// Per eps1 column: printed error and printed rate (None for `---`).
    pub cells: Vec<(Printed, Option<f64>)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceTable {
    pub id: u8,
    pub quantity: Quantity,
    pub eps2: f64,
    pub eps1: Vec<f64>,
    pub rows: Vec<ReferenceRow>,
}

impl ReferenceTable {
    pub fn n_list(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.n).collect()
    }

    pub fn cell(&self, eps1: f64, n: usize) -> Option<(Printed, Option<f64>)> {
        let col = self.eps1.iter().position(|&e| e == eps1)?;
        self.rows.iter().find(|r| r.n == n).map(|r| r.cells[col])
    }
}

fn parse_table(id: u8, src: &str) -> Result<ReferenceTable> {
    let bad = |msg: &str| Error::ReferenceData(format!("table {id}: {msg}"));
    let mut quantity = None;
    let mut eps2 = None;
    let mut eps1 = Vec::new();
    let mut rows = Vec::new();
    for line in src.lines().map(str::trim).filter(|l| !l.is_empty()) {
        let mut it = line.split_whitespace();
        let head = it.next().unwrap_or_default();
        match head {
            "kind" => {
                quantity = Some(match it.next() {
                    Some("energy") => Quantity::Energy,
                    Some("superclose") => Quantity::Superclose,
                    _ => return Err(bad("unknown kind")),
                })
            }
            "eps2" => eps2 = it.next().and_then(|s| s.parse().ok()),
            "eps1" => {
                eps1 = it
                    .map(|s| s.parse::<f64>().map_err(|_| bad("bad eps1")))
                    .collect::<Result<_>>()?
            }
            _ => {
                let n = head.parse().map_err(|_| bad("bad N"))?;
                let fields: Vec<&str> = it.collect();
                if fields.len() != 2 * eps1.len() {
                    return Err(bad("wrong number of cells"));
                }
                let cells = fields
                    .chunks(2)
                    .map(|c| {
                        let rate = match c[1] {
                            "---" => None,
                            r => Some(r.parse().map_err(|_| bad("bad rate"))?),
                        };
                        Ok((Printed::parse(c[0])?, rate))
                    })
                    .collect::<Result<_>>()?;
                rows.push(ReferenceRow { n, cells });
            }
        }
    }
    Ok(ReferenceTable {
        id,
        quantity: quantity.ok_or_else(|| bad("missing kind"))?,
        eps2: eps2.ok_or_else(|| bad("missing eps2"))?,
        eps1,
        rows,
    })
}

/// One of the six printed tables.
pub fn reference_table(id: u8) -> Result<ReferenceTable> {
    if !(1..=6).contains(&id) {
        return Err(Error::ReferenceId(id));
    }
    parse_table(id, SOURCES[id as usize - 1])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    Value,
    Rate,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Pass,
    Fail,
    /// Not enforced, with the reason.
    Skipped(&'static str),
    /// Cell missing from the computed table or failed to compute.
    Missing,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub eps1: f64,
    pub n: usize,
    pub kind: CheckKind,
    pub computed: f64,
    pub target: f64,
    /// Allowed deviation: relative for values, absolute for rates.
    pub tolerance: f64,
    pub printed: String,
    pub outcome: Outcome,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub table_id: u8,
    pub verdicts: Vec<Verdict>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.verdicts
            .iter()
            .all(|v| matches!(v.outcome, Outcome::Pass | Outcome::Skipped(_)))
    }

    pub fn failures(&self) -> impl Iterator<Item = &Verdict> {
        self.verdicts
            .iter()
            .filter(|v| matches!(v.outcome, Outcome::Fail | Outcome::Missing))
    }

    pub fn count(&self, pred: impl Fn(&Outcome) -> bool) -> usize {
        self.verdicts.iter().filter(|v| pred(&v.outcome)).count()
    }

    pub fn summary(&self) -> String {
        format!(
            "table {}: {} pass, {} fail, {} missing, {} skipped",
            self.table_id,
            self.count(|o| *o == Outcome::Pass),
            self.count(|o| *o == Outcome::Fail),
            self.count(|o| *o == Outcome::Missing),
            self.count(|o| matches!(o, Outcome::Skipped(_)))
        )
    }
}

fn pick(row: &TableRow, q: Quantity) -> (f64, Option<f64>) {
    match q {
        Quantity::Energy => (row.e_energy, row.p_energy),
        Quantity::Superclose => (row.e_superclose, row.p_superclose),
    }
}

/// Compares a computed table against printed table `id`.
///
/// Cells with both layers graded must match the printed error (rounding to
/// it or within 5%) and the printed rate (within 0.05, or 0.10 for the
/// supercloseness rate on the N = 2048 row) when the next row is graded
/// too. Cells with a uniform side are checked on rates only, over the last
/// four doublings, against 1 for the energy error and against 2 for the
/// supercloseness error where the printed rate is near 2. Rates spanning a
/// change of mesh regime are skipped.
pub fn check_against_reference(table: &ConvergenceTable, id: u8) -> Result<CheckReport> {
    let reference = reference_table(id)?;
    let q = reference.quantity;
    let mut verdicts = Vec::new();
    let last_n = reference.rows.last().map(|r| r.n).unwrap_or(0);
    let rated_rows = reference.rows.len().saturating_sub(1);
    for (col, &eps1) in reference.eps1.iter().enumerate() {
        // Columns left out of the computed table on purpose are not failures.
        if table.column(eps1, reference.eps2).is_empty() {
            continue;
        }
        for (ri, rrow) in reference.rows.iter().enumerate() {
            let (printed, printed_rate) = rrow.cells[col];
            let n = rrow.n;
            let mut verdict = |kind, computed, target, tolerance, printed: String, outcome| {
                verdicts.push(Verdict {
                    eps1,
                    n,
                    kind,
                    computed,
                    target,
                    tolerance,
                    printed,
                    outcome,
                })
            };
            let row = table.get(eps1, reference.eps2, n).filter(|r| r.is_ok());
            let Some(row) = row else {
                verdict(CheckKind::Value, f64::NAN, printed.value(), VALUE_TOL, printed.to_string(), Outcome::Missing);
                continue;
            };
            let (value, rate) = pick(row, q);
            let next = (n < last_n)
                .then(|| table.get(eps1, reference.eps2, 2 * n))
                .flatten()
                .filter(|r| r.is_ok());

            if row.both_graded() {
                let outcome = if printed.matches(value) { Outcome::Pass } else { Outcome::Fail };
                verdict(CheckKind::Value, value, printed.value(), VALUE_TOL, printed.to_string(), outcome);
                let Some(pr) = printed_rate else { continue };
                let tol = if q == Quantity::Superclose && n == 2048 {
                    TRANSIENT_RATE_TOL
                } else {
                    RATE_TOL
                };
                let outcome = match (rate, next) {
                    (Some(r), Some(nx)) if nx.both_graded() => rate_outcome(r, pr, tol),
                    (_, Some(_)) => Outcome::Skipped("rate spans a change of mesh regime"),
                    _ => Outcome::Missing,
                };
                verdict(CheckKind::Rate, rate.unwrap_or(f64::NAN), pr, tol, format!("{pr:.2}"), outcome);
            } else {
                verdict(
                    CheckKind::Value,
                    value,
                    printed.value(),
                    VALUE_TOL,
                    printed.to_string(),
                    Outcome::Skipped("uniform layer region: values not compared"),
                );
                let Some(pr) = printed_rate else { continue };
                let (target, tol) = match q {
                    Quantity::Energy => FALLBACK_ENERGY_RATE,
                    Quantity::Superclose => FALLBACK_SUPERCLOSE_RATE,
                };
                let in_tail = ri + FALLBACK_DOUBLINGS >= rated_rows;
                let outcome = match (rate, next) {
                    _ if !in_tail => Outcome::Skipped("before the last four doublings"),
                    (_, Some(nx))
                        if nx.left_mode != row.left_mode || nx.right_mode != row.right_mode =>
                    {
                        Outcome::Skipped("rate spans a change of mesh regime")
                    }
                    _ if (pr - target).abs() > tol => Outcome::Skipped("printed rate not near the target"),
                    (Some(r), Some(_)) => rate_outcome(r, target, tol),
                    _ => Outcome::Missing,
                };
                verdict(CheckKind::Rate, rate.unwrap_or(f64::NAN), target, tol, format!("{pr:.2}"), outcome);
            }
        }
    }
    Ok(CheckReport {
        table_id: id,
        verdicts,
    })
}

/// `v` in the printed style, `0.89E-2`.
pub fn format_printed(v: f64) -> String {
    if !(v > 0.0) || !v.is_finite() {
        return "n/a".into();
    }
    let mut exp = v.log10().floor() as i32 + 1;
    let mut digits = (v / 10f64.powi(exp) * 100.0).round() as i64;
    if digits == 100 {
        digits = 10;
        exp += 1;
    }
    format!("0.{digits:02}E{exp}")
}

/// Markdown table laid out like the printed one: one row per N, an error
/// and a rate column per eps1. Cells with a uniform layer region carry `*`.
pub fn reference_layout(table: &ConvergenceTable, reference: &ReferenceTable) -> String {
    let q = reference.quantity;
    let (e, p) = match q {
        Quantity::Energy => ("e^N", "p^N"),
        Quantity::Superclose => ("e^N_I", "p^N_I"),
    };
    let eps1: Vec<f64> = {
        let mut v: Vec<f64> = table.rows.iter().map(|r| r.eps1).collect();
        v.sort_by(|a, b| b.total_cmp(a));
        v.dedup();
        v
    };
    let mut n_list: Vec<usize> = table.rows.iter().map(|r| r.n).collect();
    n_list.sort_unstable();
    n_list.dedup();

    let mut out = format!("eps2 = {:e}\n\n| N |", reference.eps2);
    for e1 in &eps1 {
        out.push_str(&format!(" {e} ({e1:e}) | {p} |"));
    }
    out.push_str("\n|---|");
    out.push_str(&"---|---|".repeat(eps1.len()));
    out.push('\n');
    for &n in &n_list {
        out.push_str(&format!("| {n} |"));
        for &e1 in &eps1 {
            match table.get(e1, reference.eps2, n) {
                Some(r) if r.is_ok() => {
                    let (v, rate) = pick(r, q);
                    let mark = if r.both_graded() { "" } else { "*" };
                    let rate = rate.map(|x| format!("{x:.2}")).unwrap_or_else(|| "---".into());
                    out.push_str(&format!(" {}{mark} | {rate} |", format_printed(v)));
                }
                _ => out.push_str(" failed | |"),
            }
        }
        out.push('\n');
    }
    out.push_str("\n`*` at least one layer region meshed uniformly\n");
    out
}

fn rate_outcome(rate: f64, target: f64, tol: f64) -> Outcome {
    if (rate - target).abs() <= tol {
        Outcome::Pass
    } else {
        Outcome::Fail
    }
}
