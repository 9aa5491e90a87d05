//! The `sweep` command: row-major parameter grids evaluated in parallel.

use std::str::FromStr;

use rayon::prelude::*;
use serde_json::{json, Value};

use super::output::{csv_table, json_report, num, opt_num};
use super::{invalid, Format, Report, SweepArgs};
use crate::cylinder::CircleData;
use crate::error::{Error, Result};
use crate::geometry::SpaceParams;
use crate::spectrum_analytic::{classify, critical_length, spectrum, BoundaryCondition, TruncatedCylinder};

/// Hard cap on the number of cells in one sweep.
pub const MAX_CELLS: usize = 1_000_000;

/// `A:B:STEPS`: STEPS evenly spaced values from A to B inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub start: f64,
    pub end: f64,
    pub steps: usize,
}

impl Range {
    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.start];
        }
        let last = self.steps - 1;
        (0..self.steps)
            .map(|i| if i == last { self.end } else { self.start + (self.end - self.start) * i as f64 / last as f64 })
            .collect()
    }
}

impl FromStr for Range {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| invalid(format!("range `{s}` {why}; expected A:B:STEPS"));
        let parts: Vec<&str> = s.split(':').collect();
        let [a, b, n] = parts[..] else { return Err(bad("does not have three fields")) };
        let start: f64 = a.trim().parse().map_err(|_| bad("has a malformed start"))?;
        let end: f64 = b.trim().parse().map_err(|_| bad("has a malformed end"))?;
        let steps: usize = n.trim().parse().map_err(|_| bad("has a malformed step count"))?;
        if !start.is_finite() || !end.is_finite() {
            return Err(bad("is not finite"));
        }
        if steps == 0 {
            return Err(bad("needs at least one step"));
        }
        Ok(Range { start, end, steps })
    }
}

pub const COLUMNS: [&str; 14] = [
    "kappa",
    "tau",
    "rho",
    "r",
    "kappa_g",
    "R",
    "L",
    "L0",
    "lambda1",
    "lambda2",
    "morse_index",
    "axisym_verdict",
    "general_verdict",
    "error",
];

#[derive(Debug, Clone, Default)]
struct Row {
    kappa: f64,
    tau: f64,
    rho: f64,
    r: Option<f64>,
    kappa_g: Option<f64>,
    big_r: Option<f64>,
    length: f64,
    l0: Option<f64>,
    lambda1: Option<f64>,
    lambda2: Option<f64>,
    morse_index: Option<usize>,
    axisym: Option<&'static str>,
    general: Option<&'static str>,
    error: Option<String>,
}

fn evaluate(kappa: f64, tau: f64, rho: f64, length: f64, bc: BoundaryCondition) -> Row {
    let mut row = Row { kappa, tau, rho, length, ..Row::default() };
    let circle = match SpaceParams::new(kappa, tau).and_then(|sp| CircleData::from_rho(sp, rho)) {
        Ok(c) => c,
        Err(e) => {
            row.error = Some(format!("{}: {e}", e.code()));
            return row;
        }
    };
    row.r = Some(circle.r());
    row.kappa_g = Some(circle.kappa_g());
    row.big_r = Some(circle.big_r());
    row.l0 = Some(critical_length(&circle));
    let result = TruncatedCylinder::new(circle, length, bc).and_then(|tc| Ok((classify(&tc)?, spectrum(&tc, 2)?)));
    match result {
        Ok((verdict, eig)) => {
            row.lambda1 = Some(eig.lambda1);
            row.lambda2 = Some(eig.lambda2);
            row.morse_index = Some(eig.morse_index);
            row.axisym = Some(verdict.axisym.name());
            row.general = Some(verdict.general.name());
        }
        Err(e) => row.error = Some(format!("{}: {e}", e.code())),
    }
    row
}

pub(crate) fn run_sweep(a: &SweepArgs) -> Result<Report> {
    let axis = |range: Option<Range>, value: f64| range.map_or_else(|| vec![value], |r| r.values());
    let kappas = axis(a.kappa_range, a.space.kappa);
    let taus = axis(a.tau_range, a.space.tau);
    let rhos = axis(a.rho_range, a.rho);
    let lengths = axis(a.length_range, a.length);
    let total = [kappas.len(), taus.len(), rhos.len(), lengths.len()]
        .iter()
        .try_fold(1usize, |acc, &n| acc.checked_mul(n))
        .filter(|&n| n <= MAX_CELLS)
        .ok_or_else(|| invalid(format!("sweep exceeds {MAX_CELLS} cells")))?;

    let mut cells = Vec::with_capacity(total);
    for &k in &kappas {
        for &t in &taus {
            for &rho in &rhos {
                for &l in &lengths {
                    cells.push((k, t, rho, l));
                }
            }
        }
    }
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(jobs) = a.jobs {
        if jobs == 0 {
            return Err(invalid("--jobs must be at least 1"));
        }
        pool = pool.num_threads(jobs);
    }
    let pool = pool.build().map_err(|e| invalid(format!("thread pool: {e}")))?;
    let bc = a.bc;
    let rows: Vec<Row> =
        pool.install(|| cells.par_iter().map(|&(k, t, rho, l)| evaluate(k, t, rho, l, bc)).collect());

    let text = match a.out.format.unwrap_or(Format::Csv) {
        Format::Csv => {
            let table: Vec<Vec<String>> = rows.iter().map(csv_row).collect();
            csv_table(&COLUMNS, &table)?
        }
        Format::Json => {
            let items: Vec<Value> = rows.iter().map(json_row).collect();
            json_report("sweep", json!({ "bc": bc.name(), "columns": COLUMNS, "rows": items }))
        }
    };
    Ok(Report { text, pass: true })
}

fn csv_row(r: &Row) -> Vec<String> {
    vec![
        num(r.kappa),
        num(r.tau),
        num(r.rho),
        opt_num(r.r),
        opt_num(r.kappa_g),
        opt_num(r.big_r),
        num(r.length),
        opt_num(r.l0),
        opt_num(r.lambda1),
        opt_num(r.lambda2),
        r.morse_index.map(|m| m.to_string()).unwrap_or_default(),
        r.axisym.unwrap_or_default().to_string(),
        r.general.unwrap_or_default().to_string(),
        r.error.clone().unwrap_or_default(),
    ]
}

fn json_row(r: &Row) -> Value {
    json!({
        "kappa": r.kappa,
        "tau": r.tau,
        "rho": r.rho,
        "r": r.r,
        "kappa_g": r.kappa_g,
        "R": r.big_r,
        "L": r.length,
        "L0": r.l0,
        "lambda1": r.lambda1,
        "lambda2": r.lambda2,
        "morse_index": r.morse_index,
        "axisym_verdict": r.axisym,
        "general_verdict": r.general,
        "error": r.error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_parsing() {
        let r: Range = "-1:1:5".parse().unwrap();
        assert_eq!(r.values(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        let r: Range = "2:3:1".parse().unwrap();
        assert_eq!(r.values(), vec![2.0]);
        assert_eq!("0.1:0.7:7".parse::<Range>().unwrap().values()[6], 0.7);
        for bad in ["1:2", "a:2:3", "1:2:0", "1:2:3:4", "inf:1:2", "1:2:-3"] {
            assert!(bad.parse::<Range>().is_err(), "{bad}");
        }
    }

    #[test]
    fn invalid_cell_is_reported_in_band() {
        let row = evaluate(-1.0, 0.0, 1.0, -3.0, BoundaryCondition::Dirichlet);
        assert!(row.l0.is_some());
        assert!(row.error.as_deref().unwrap().starts_with("InvalidLength"));
        let row = evaluate(1.0, 0.0, 4.0, 1.0, BoundaryCondition::Dirichlet);
        assert!(row.r.is_none() && row.error.is_some());
    }
}
