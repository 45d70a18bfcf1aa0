//! Named pass/fail results.

use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub detail: String,
    pub pass: bool,
}

impl Check {
    pub fn new(suite: &str, name: &str, pass: bool, detail: impl Into<String>) -> Self {
        Self {
            suite: suite.into(),
            name: name.into(),
            detail: detail.into(),
            pass,
        }
    }
}

/// Fixed-width table, one row per check.
pub fn render_table(checks: &[Check]) -> String {
    let suite_w = checks
        .iter()
        .map(|c| c.suite.len())
        .max()
        .unwrap_or(5)
        .max(5);
    let name_w = checks
        .iter()
        .map(|c| c.name.chars().count())
        .max()
        .unwrap_or(5)
        .max(5);
    let mut out = format!(
        "{:<suite_w$}  {:<name_w$}  {:<6}  detail\n",
        "suite", "check", "result"
    );
    for c in checks {
        let pad = name_w - c.name.chars().count();
        out.push_str(&format!(
            "{:<suite_w$}  {}{}  {:<6}  {}\n",
            c.suite,
            c.name,
            " ".repeat(pad),
            if c.pass { "pass" } else { "FAIL" },
            c.detail
        ));
    }
    out
}
