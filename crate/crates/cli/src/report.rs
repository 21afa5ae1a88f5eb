//! CSV, JSON and text renderings. Field names and column order are stable.

use std::fmt::Write;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use fsdim_core::digits::format_word;
use fsdim_core::dimension::EstimateReport;
use fsdim_core::precision::ProfileRow;
use fsdim_core::CostResult;

pub const PROFILE_HEADER: &str = "n,cost,ratio,running_inf,flags";

fn decimal(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

fn opt_str(r: &Option<BigRational>) -> String {
    r.as_ref().map_or_else(String::new, ToString::to_string)
}

#[derive(Serialize)]
struct CostJson {
    status: &'static str,
    cost: Option<usize>,
    witness: Option<String>,
    output: Option<String>,
}

pub fn cost_json(r: &CostResult) -> String {
    let found = r.is_found();
    serde_json::to_string(&CostJson {
        status: r.status.as_str(),
        cost: r.cost(),
        witness: found.then(|| format_word(&r.witness_input)),
        output: found.then(|| format_word(&r.witness_output)),
    })
    .expect("plain data serializes")
}

fn flags(row: &ProfileRow) -> &'static str {
    if row.cap_exceeded {
        "cap_exceeded"
    } else if row.cost.is_none() {
        "unreachable"
    } else {
        ""
    }
}

pub fn profile_csv(rows: &[ProfileRow]) -> String {
    let mut s = String::from(PROFILE_HEADER);
    s.push('\n');
    for r in rows {
        let cost = r.cost.map_or_else(String::new, |c| c.to_string());
        let _ = writeln!(s, "{},{},{},{},{}", r.n, cost, opt_str(&r.ratio), opt_str(&r.running_inf), flags(r));
    }
    s
}

#[derive(Serialize)]
struct RowJson {
    n: usize,
    cost: Option<usize>,
    ratio: Option<String>,
    running_inf: Option<String>,
    flags: &'static str,
}

pub fn profile_json(rows: &[ProfileRow]) -> String {
    let rows: Vec<RowJson> = rows
        .iter()
        .map(|r| RowJson {
            n: r.n,
            cost: r.cost,
            ratio: r.ratio.as_ref().map(ToString::to_string),
            running_inf: r.running_inf.as_ref().map(ToString::to_string),
            flags: flags(r),
        })
        .collect();
    let mut s = serde_json::to_string_pretty(&rows).expect("plain data serializes");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct TransducerJson {
    id: String,
    proxy: Option<String>,
    proxy_decimal: Option<f64>,
    best_n: Option<usize>,
    flagged_rows: usize,
}

#[derive(Serialize)]
struct WindowJson {
    lo: usize,
    hi: usize,
}

#[derive(Serialize)]
struct FlagsJson {
    flagged_rows: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    below_threshold: Option<bool>,
}

#[derive(Serialize)]
struct ReportJson {
    estimate: String,
    estimate_decimal: f64,
    per_transducer: Vec<TransducerJson>,
    window: WindowJson,
    flags: FlagsJson,
    verdict: String,
}

pub fn report_json(r: &EstimateReport, below_threshold: Option<bool>) -> String {
    let json = ReportJson {
        estimate: r.estimate.to_string(),
        estimate_decimal: decimal(&r.estimate),
        per_transducer: r
            .per_transducer
            .iter()
            .map(|t| TransducerJson {
                id: t.id.clone(),
                proxy: t.proxy.as_ref().map(ToString::to_string),
                proxy_decimal: t.proxy.as_ref().map(decimal),
                best_n: t.best_n,
                flagged_rows: t.flagged_rows,
            })
            .collect(),
        window: WindowJson {
            lo: r.window.lo,
            hi: r.window.hi,
        },
        flags: FlagsJson {
            flagged_rows: r.flagged_rows(),
            below_threshold,
        },
        verdict: r.verdict.clone(),
    };
    let mut s = serde_json::to_string_pretty(&json).expect("plain data serializes");
    s.push('\n');
    s
}

pub fn report_text(r: &EstimateReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "estimate: {} ({:.6})", r.estimate, decimal(&r.estimate));
    let _ = writeln!(s, "window: {}..={}", r.window.lo, r.window.hi);
    let _ = writeln!(s, "flagged rows: {}", r.flagged_rows());
    let _ = writeln!(s, "verdict: {}", r.verdict);
    let _ = writeln!(s, "id,proxy,best_n,flagged_rows");
    for t in &r.per_transducer {
        let best = t.best_n.map_or_else(String::new, |n| n.to_string());
        let _ = writeln!(s, "{},{},{},{}", t.id, opt_str(&t.proxy), best, t.flagged_rows);
    }
    s
}
