//! JSON report documents and their plain-text rendering.
//!
//! Two report kinds: `table` (enumerate, sample, scan — rows in the same
//! layout as the CSV, plus per-box fit summaries) and `audit` (one bound
//! with its inputs). Rendering is deterministic, prints numbers with six
//! significant digits, and shows batch-degenerate standard errors as
//! `degenerate` rather than NaN.

use rclab_core::lab::BoundReport;
use serde::{Deserialize, Serialize};

/// Version of the JSON report layout; readers reject anything else.
pub const REPORT_SCHEMA: u32 = 1;

/// Crate version stamped into every CSV row and report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// One output row; mirrors the CSV schema minus the version column.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub control: f64,
    pub k: u32,
    pub m: u32,
    pub mean: f64,
    pub stderr: f64,
    pub n: u64,
    pub seed: u64,
}

/// Per-box fit summary for a scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitRow {
    pub k: u32,
    pub m: u32,
    pub midpoint: f64,
    pub slope: f64,
    pub slope_se: f64,
    pub converged: bool,
    pub points_used: u32,
    pub monotone_3se: bool,
    pub xor_failures: u64,
}

/// Rows plus optional fits, under a short human title.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableReport {
    pub schema: u32,
    pub kind: String,
    pub title: String,
    pub version: String,
    pub rows: Vec<Row>,
    pub fits: Vec<FitRow>,
}

impl TableReport {
    pub fn new(title: String, rows: Vec<Row>, fits: Vec<FitRow>) -> Self {
        Self {
            schema: REPORT_SCHEMA,
            kind: String::from("table"),
            title,
            version: String::from(VERSION),
            rows,
            fits,
        }
    }
}

/// One verified bound: left side, right side, slack, and the numbers that
/// went into it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub schema: u32,
    pub kind: String,
    pub name: String,
    pub version: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
    pub tol: f64,
    pub inputs: Vec<(String, f64)>,
}

impl AuditReport {
    pub fn from_bound(name: &str, b: &BoundReport) -> Self {
        Self {
            schema: REPORT_SCHEMA,
            kind: String::from("audit"),
            name: String::from(name),
            version: String::from(VERSION),
            lhs: b.lhs,
            rhs: b.rhs,
            slack: b.slack,
            holds: b.holds,
            tol: b.tol,
            inputs: b.inputs.iter().map(|&(k, v)| (String::from(k), v)).collect(),
        }
    }
}

/// Six significant digits, scientific; NaN renders as `degenerate`.
pub fn sig6(x: f64) -> String {
    if x.is_nan() {
        return String::from("degenerate");
    }
    if x.is_infinite() {
        return String::from(if x > 0.0 { "inf" } else { "-inf" });
    }
    format!("{x:.5e}")
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

const ROW_HEADER: &str = "control         k     m     mean            stderr          n           seed";

fn render_row(r: &Row) -> String {
    format!(
        "{:<15} {:<5} {:<5} {:<15} {:<15} {:<11} {}",
        sig6(r.control),
        r.k,
        r.m,
        sig6(r.mean),
        sig6(r.stderr),
        r.n,
        r.seed
    )
}

/// Plain-text table for a `table` report. An empty report renders as the
/// header line alone.
pub fn render_table(t: &TableReport) -> String {
    let mut out = String::new();
    if !t.title.is_empty() {
        out.push_str(&format!("# {}\n", t.title));
    }
    out.push_str(ROW_HEADER);
    out.push('\n');
    for r in &t.rows {
        out.push_str(&render_row(r));
        out.push('\n');
    }
    for f in &t.fits {
        out.push_str(&format!(
            "fit k={} m={}: midpoint={} slope={} slope_se={} points={} converged={} monotone={} xor_failures={}\n",
            f.k,
            f.m,
            sig6(f.midpoint),
            sig6(f.slope),
            sig6(f.slope_se),
            f.points_used,
            yes_no(f.converged),
            yes_no(f.monotone_3se),
            f.xor_failures
        ));
    }
    out
}

/// Two-column rendering of an audit report: lhs, rhs, slack, then inputs.
pub fn render_audit(a: &AuditReport) -> String {
    let mut out = format!("# audit {}\n", a.name);
    let width = a
        .inputs
        .iter()
        .map(|(k, _)| k.len())
        .chain(["tolerance".len()].into_iter())
        .max()
        .unwrap_or(9);
    let mut line = |k: &str, v: String| out.push_str(&format!("{k:<width$}  {v}\n"));
    line("lhs", sig6(a.lhs));
    line("rhs", sig6(a.rhs));
    line("slack", sig6(a.slack));
    line("tolerance", sig6(a.tol));
    line("holds", String::from(yes_no(a.holds)));
    for (k, v) in &a.inputs {
        line(k, sig6(*v));
    }
    out
}

/// Renders a serialized report of either kind, rejecting unknown schema
/// versions and kinds.
pub fn render_json(text: &str) -> Result<String, String> {
    let v: serde_json::Value =
        serde_json::from_str(text).map_err(|e| format!("report is not valid JSON: {e}"))?;
    let schema = v.get("schema").and_then(|s| s.as_u64());
    if schema != Some(REPORT_SCHEMA as u64) {
        return Err(format!(
            "unsupported report schema version {:?} (expected {REPORT_SCHEMA})",
            schema
        ));
    }
    match v.get("kind").and_then(|k| k.as_str()) {
        Some("table") => {
            let t: TableReport =
                serde_json::from_value(v).map_err(|e| format!("malformed table report: {e}"))?;
            Ok(render_table(&t))
        }
        Some("audit") => {
            let a: AuditReport =
                serde_json::from_value(v).map_err(|e| format!("malformed audit report: {e}"))?;
            Ok(render_audit(&a))
        }
        other => Err(format!("unknown report kind {other:?}")),
    }
}

pub fn to_json_pretty<T: Serialize>(t: &T) -> String {
    let mut s = serde_json::to_string_pretty(t).expect("report serializes");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig6_formats_six_significant_digits() {
        assert_eq!(sig6(0.5), "5.00000e-1");
        assert_eq!(sig6(0.0), "0.00000e0");
        assert_eq!(sig6(123456.789), "1.23457e5");
        assert_eq!(sig6(-0.000123456789), "-1.23457e-4");
        assert_eq!(sig6(f64::NAN), "degenerate");
        assert_eq!(sig6(f64::INFINITY), "inf");
    }

    #[test]
    fn empty_table_renders_header_only() {
        let t = TableReport::new(String::new(), vec![], vec![]);
        let text = render_table(&t);
        assert_eq!(text, format!("{ROW_HEADER}\n"));
    }

    #[test]
    fn table_rows_render_deterministically() {
        let t = TableReport::new(
            String::from("demo"),
            vec![Row { control: 0.5, k: 4, m: 3, mean: 0.25, stderr: f64::NAN, n: 100, seed: 7 }],
            vec![],
        );
        let a = render_table(&t);
        let b = render_table(&t);
        assert_eq!(a, b);
        assert!(a.contains("degenerate"), "{a}");
        assert!(a.starts_with("# demo\n"), "{a}");
        assert!(!a.contains("NaN"), "{a}");
    }

    #[test]
    fn audit_render_shows_two_columns_with_slack() {
        let a = AuditReport {
            schema: REPORT_SCHEMA,
            kind: String::from("audit"),
            name: String::from("duality"),
            version: String::from(VERSION),
            lhs: 0.5,
            rhs: 0.5,
            slack: 0.0,
            holds: true,
            tol: 1e-12,
            inputs: vec![(String::from("p"), 0.5), (String::from("q"), 1.0)],
        };
        let text = render_audit(&a);
        assert!(text.contains("lhs"), "{text}");
        assert!(text.contains("rhs"), "{text}");
        assert!(text.contains("slack"), "{text}");
        assert!(text.contains("5.00000e-1"), "{text}");
        assert!(text.contains("holds"), "{text}");
    }

    #[test]
    fn render_json_round_trip_and_schema_rejection() {
        let t = TableReport::new(String::from("t"), vec![], vec![]);
        let json = to_json_pretty(&t);
        let rendered = render_json(&json).unwrap();
        assert_eq!(rendered, render_table(&t));

        let mut v: serde_json::Value = serde_json::from_str(&json).unwrap();
        v["schema"] = serde_json::json!(999);
        let err = render_json(&v.to_string()).unwrap_err();
        assert!(err.contains("unsupported report schema"), "{err}");

        assert!(render_json("not json").is_err());
    }
}
