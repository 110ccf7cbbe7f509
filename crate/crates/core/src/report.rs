//! Structured check reports.
//!
//! Validation operations never panic and never hide partial results;
//! they return a [`Report`] listing every check that ran, where it ran,
//! and how it went. A report is `ok` when nothing failed (warnings and
//! not-checkable items are allowed).

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Warn,
    Fail,
    NotCheckable,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Warn => "warn",
            Status::Fail => "fail",
            Status::NotCheckable => "not checkable",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ReportItem {
    /// Short machine-friendly name of the check, e.g. `"row-sum"`.
    pub check: String,
    pub status: Status,
    /// Vertex or edge the item refers to, when the check is local.
    pub location: Option<String>,
    pub detail: String,
}

#[derive(Debug, Clone, Default)]
pub struct Report {
    pub items: Vec<ReportItem>,
}

impl Report {
    pub fn new() -> Self {
        Report { items: Vec::new() }
    }

    pub fn push(&mut self, check: &str, status: Status, location: Option<String>, detail: String) {
        self.items.push(ReportItem {
            check: check.to_string(),
            status,
            location,
            detail,
        });
    }

    pub fn pass(&mut self, check: &str, detail: impl Into<String>) {
        self.push(check, Status::Pass, None, detail.into());
    }

    pub fn fail_at(&mut self, check: &str, location: impl Into<String>, detail: impl Into<String>) {
        self.push(check, Status::Fail, Some(location.into()), detail.into());
    }

    /// True when no item failed.
    pub fn ok(&self) -> bool {
        self.items.iter().all(|i| i.status != Status::Fail)
    }

    pub fn first_failure(&self) -> Option<&ReportItem> {
        self.items.iter().find(|i| i.status == Status::Fail)
    }

    pub fn merge(&mut self, other: Report) {
        self.items.extend(other.items);
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for item in &self.items {
            match &item.location {
                Some(loc) => writeln!(f, "[{}] {} at {}: {}", item.status.as_str(), item.check, loc, item.detail)?,
                None => writeln!(f, "[{}] {}: {}", item.status.as_str(), item.check, item.detail)?,
            }
        }
        Ok(())
    }
}
