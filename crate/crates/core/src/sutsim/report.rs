//! Verdicts and run reports with their JSON, HTML and text renderings.

use std::fmt::Write as _;
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::SimError;
use crate::html::escape;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    /// Expected versus reached state.
    WhiteBox,
    /// Expected versus shown data.
    BlackBox,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub plan: String,
    /// 1-based data row.
    pub row: usize,
    /// 0 is the initial page load, then 1-based steps.
    pub step: usize,
    /// 0 for the state check, then 1-based assertion number.
    pub check: usize,
    pub kind: CheckKind,
    pub status: Status,
    pub expected: String,
    pub actual: String,
    pub detail: String,
}

impl Verdict {
    /// A step the simulator could not perform.
    pub fn error(plan: &str, row: usize, step: usize, expected: &str, e: &SimError) -> Self {
        Verdict {
            plan: plan.to_owned(),
            row,
            step,
            check: 0,
            kind: CheckKind::WhiteBox,
            status: Status::Fail,
            expected: expected.to_owned(),
            actual: "<navigation error>".to_owned(),
            detail: e.to_string(),
        }
    }

    fn sort_key(&self) -> (u64, &str, usize, usize, usize) {
        let n = self.plan.rsplit('_').next().and_then(|n| n.parse().ok()).unwrap_or(u64::MAX);
        (n, &self.plan, self.row, self.step, self.check)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub verdicts: usize,
    pub passed: usize,
    pub failed: usize,
    pub whitebox_failed: usize,
    pub blackbox_failed: usize,
}

impl Summary {
    fn tally(verdicts: &[Verdict]) -> Self {
        let failed = |k| verdicts.iter().filter(|v| v.status == Status::Fail && v.kind == k).count();
        let whitebox_failed = failed(CheckKind::WhiteBox);
        let blackbox_failed = failed(CheckKind::BlackBox);
        Summary {
            verdicts: verdicts.len(),
            passed: verdicts.len() - whitebox_failed - blackbox_failed,
            failed: whitebox_failed + blackbox_failed,
            whitebox_failed,
            blackbox_failed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub plans_run: usize,
    pub steps_run: usize,
    pub verdicts: Vec<Verdict>,
    pub summary: Summary,
    pub wall_time_ms: f64,
}

impl RunReport {
    pub fn new(plans_run: usize, steps_run: usize, mut verdicts: Vec<Verdict>, wall_time: Duration) -> Self {
        verdicts.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
        let summary = Summary::tally(&verdicts);
        Self { plans_run, steps_run, verdicts, summary, wall_time_ms: wall_time.as_secs_f64() * 1e3 }
    }

    pub fn empty() -> Self {
        Self::new(0, 0, Vec::new(), Duration::ZERO)
    }

    /// Combines two reports; the result does not depend on the order.
    pub fn merge(self, other: RunReport) -> RunReport {
        let mut verdicts = self.verdicts;
        verdicts.extend(other.verdicts);
        let mut merged = Self::new(self.plans_run + other.plans_run, self.steps_run + other.steps_run, verdicts, Duration::ZERO);
        merged.wall_time_ms = self.wall_time_ms + other.wall_time_ms;
        merged
    }

    pub fn passed(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &Verdict> {
        self.verdicts.iter().filter(|v| v.status == Status::Fail)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    fn headline(&self) -> String {
        let s = &self.summary;
        format!(
            "{} plans, {} steps, {} verdicts: {} passed, {} failed ({} white-box, {} black-box) in {:.1} ms",
            self.plans_run, self.steps_run, s.verdicts, s.passed, s.failed, s.whitebox_failed, s.blackbox_failed, self.wall_time_ms
        )
    }

    /// Console table, one line per verdict.
    pub fn to_text(&self) -> String {
        let header = ["plan", "row", "step", "check", "oracle", "status", "expected", "actual", "detail"];
        let rows: Vec<[String; 9]> = self
            .verdicts
            .iter()
            .map(|v| {
                [
                    v.plan.clone(),
                    v.row.to_string(),
                    v.step.to_string(),
                    v.check.to_string(),
                    kind_label(v.kind).to_owned(),
                    status_label(v.status).to_owned(),
                    v.expected.clone(),
                    v.actual.clone(),
                    v.detail.clone(),
                ]
            })
            .collect();
        let mut widths = header.map(|h| h.chars().count());
        for r in &rows {
            for (w, cell) in widths.iter_mut().zip(r) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let mut out = String::new();
        let line = |out: &mut String, cells: &[String]| {
            let padded: Vec<String> = cells.iter().zip(widths).map(|(c, w)| format!("{c:<w$}")).collect();
            let _ = writeln!(out, "{}", padded.join("  ").trim_end());
        };
        line(&mut out, &header.map(str::to_owned));
        line(&mut out, &widths.map(|w| "-".repeat(w)));
        for r in &rows {
            line(&mut out, r);
        }
        let _ = writeln!(out, "\n{}", self.headline());
        out
    }

    /// Static HTML page.
    pub fn to_html(&self) -> String {
        let mut out = String::from(
            "<!DOCTYPE html>\n<html><head><meta charset=\"utf-8\"><title>Test report</title>\n<style>\
             body{font-family:sans-serif}table{border-collapse:collapse}td,th{border:1px solid #999;padding:2px 6px}\
             tr.fail{background:#fdd}tr.pass{background:#dfd}</style></head><body>\n<h1>Test report</h1>\n",
        );
        let _ = writeln!(out, "<p>{}</p>", escape(&self.headline()));
        out.push_str(
            "<table>\n<tr><th>plan</th><th>row</th><th>step</th><th>check</th><th>oracle</th><th>status</th>\
             <th>expected</th><th>actual</th><th>detail</th></tr>\n",
        );
        for v in &self.verdicts {
            let _ = writeln!(
                out,
                "<tr class=\"{s}\"><td>{}</td><td>{}</td><td>{}</td><td>{}</td><td>{}</td><td>{s}</td><td>{}</td><td>{}</td><td>{}</td></tr>",
                escape(&v.plan),
                v.row,
                v.step,
                v.check,
                kind_label(v.kind),
                escape(&v.expected),
                escape(&v.actual),
                escape(&v.detail),
                s = status_label(v.status),
            );
        }
        out.push_str("</table>\n</body></html>\n");
        out
    }
}

fn kind_label(k: CheckKind) -> &'static str {
    match k {
        CheckKind::WhiteBox => "white-box",
        CheckKind::BlackBox => "black-box",
    }
}

fn status_label(s: Status) -> &'static str {
    match s {
        Status::Pass => "pass",
        Status::Fail => "fail",
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn verdict(plan: u8, step: usize, fail: bool) -> Verdict {
        Verdict {
            plan: format!("path_{plan}"),
            row: 1,
            step,
            check: 0,
            kind: CheckKind::WhiteBox,
            status: if fail { Status::Fail } else { Status::Pass },
            expected: "a".into(),
            actual: if fail { "b".into() } else { "a".into() },
            detail: String::new(),
        }
    }

    #[test]
    fn summary_matches_tally() {
        let r = RunReport::new(1, 2, vec![verdict(1, 0, false), verdict(1, 1, true)], Duration::from_millis(3));
        assert_eq!(r.summary, Summary { verdicts: 2, passed: 1, failed: 1, whitebox_failed: 1, blackbox_failed: 0 });
        assert!(!r.passed());
        assert!(r.to_text().contains("1 passed, 1 failed"));
        assert!(r.to_html().contains("<tr class=\"fail\">"));
        assert_eq!(RunReport::from_json(&r.to_json()).unwrap(), r);
    }

    #[test]
    fn plans_sort_numerically() {
        let r = RunReport::new(2, 2, vec![verdict(10, 0, false), verdict(2, 0, false)], Duration::ZERO);
        assert_eq!(r.verdicts[0].plan, "path_2");
    }

    proptest! {
        #[test]
        fn merge_is_order_independent(
            a in prop::collection::vec((1u8..5, 0usize..4, any::<bool>()), 0..6),
            b in prop::collection::vec((5u8..9, 0usize..4, any::<bool>()), 0..6),
        ) {
            let mk = |v: &[(u8, usize, bool)]| {
                RunReport::new(1, v.len(), v.iter().map(|&(p, s, f)| verdict(p, s, f)).collect(), Duration::ZERO)
            };
            let ab = mk(&a).merge(mk(&b));
            let ba = mk(&b).merge(mk(&a));
            prop_assert_eq!(&ab, &ba);
            prop_assert_eq!(ab.summary.verdicts, a.len() + b.len());
            let assoc = mk(&a).merge(mk(&b).merge(RunReport::empty()));
            prop_assert_eq!(assoc, ab);
        }
    }
}
