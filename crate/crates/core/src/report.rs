//! JSON and text rendering of check results. Output depends only on the
//! results, so equal runs render byte-identically.

use serde::Serialize;

use crate::checks::{Status, Witness};

/// One rendered row.
#[derive(Clone, Debug, PartialEq)]
pub struct CheckRecord {
    pub name: String,
    pub kind: String,
    pub status: Status,
    pub witness: Option<Witness>,
    pub details: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    checks: Vec<JsonCheck<'a>>,
}

#[derive(Serialize)]
struct JsonCheck<'a> {
    name: &'a str,
    kind: &'a str,
    status: &'static str,
    witness: Option<JsonWitness>,
    details: &'a str,
}

#[derive(Serialize)]
struct JsonWitness {
    point: Vec<String>,
    residual: String,
}

pub fn render_report(records: &[CheckRecord], format: Format) -> String {
    match format {
        Format::Json => render_json(records),
        Format::Text => render_text(records),
    }
}

fn render_json(records: &[CheckRecord]) -> String {
    let report = JsonReport {
        checks: records
            .iter()
            .map(|r| JsonCheck {
                name: &r.name,
                kind: &r.kind,
                status: r.status.as_str(),
                witness: r.witness.as_ref().map(|w| JsonWitness {
                    point: w.point.iter().map(|q| q.to_string()).collect(),
                    residual: w.residual.to_string(),
                }),
                details: &r.details,
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&report).expect("plain data serializes");
    s.push('\n');
    s
}

fn render_text(records: &[CheckRecord]) -> String {
    let status_w = records.iter().map(|r| r.status.as_str().len()).max().unwrap_or(6).max(6);
    let kind_w = records.iter().map(|r| r.kind.len()).max().unwrap_or(4).max(4);
    let name_w = records.iter().map(|r| r.name.chars().count()).max().unwrap_or(4).max(4);
    let mut out = format!("{:<status_w$}  {:<kind_w$}  {:<name_w$}  details\n", "status", "kind", "name");
    out.push_str(&format!("{}\n", "-".repeat(status_w + kind_w + name_w + 13)));
    for r in records {
        out.push_str(&format!(
            "{:<status_w$}  {:<kind_w$}  {:<name_w$}  {}\n",
            r.status.as_str(),
            r.kind,
            r.name,
            r.details
        ));
        if let Some(w) = &r.witness {
            let pt: Vec<String> = w.point.iter().map(|q| q.to_string()).collect();
            out.push_str(&format!(
                "{:status_w$}  witness: residual {} at ({})\n",
                "",
                w.residual,
                pt.join(", ")
            ));
        }
    }
    let passed = records.iter().filter(|r| r.status.is_pass()).count();
    out.push_str(&format!("{passed}/{} checks passed\n", records.len()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symexpr::{parse_expr, rat};

    #[test]
    fn json_shape() {
        let recs = vec![
            CheckRecord {
                name: "codazzi(h)".into(),
                kind: "codazzi".into(),
                status: Status::Fail,
                witness: Some(Witness {
                    point: vec![rat(1, 2), rat(-1, 3)],
                    residual: parse_expr("-x").unwrap(),
                }),
                details: "d".into(),
            },
            CheckRecord {
                name: "n".into(),
                kind: "rank".into(),
                status: Status::PointwisePass,
                witness: None,
                details: String::new(),
            },
        ];
        let j = render_report(&recs, Format::Json);
        let v: serde_json::Value = serde_json::from_str(&j).unwrap();
        assert_eq!(v["checks"][0]["witness"]["point"][1], "-1/3");
        assert_eq!(v["checks"][0]["witness"]["residual"], "-x");
        assert_eq!(v["checks"][1]["status"], "pointwise-pass");
        assert!(v["checks"][1]["witness"].is_null());
        assert_eq!(render_report(&[], Format::Json), "{\n  \"checks\": []\n}\n");
        assert!(render_report(&recs, Format::Text).contains("1/2 checks passed"));
    }
}
