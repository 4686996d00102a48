//! Machine-readable check results. Every sweep reports through these so the
//! CLI can emit deterministic JSON documents: fixed field order, no
//! timestamps, seeds and budgets always recorded.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CheckItem {
    pub check: String,
    pub status: String,
    pub detail: String,
}

impl CheckItem {
    pub fn pass(check: &str, detail: impl Into<String>) -> Self {
        Self { check: check.into(), status: "pass".into(), detail: detail.into() }
    }

    pub fn fail(check: &str, detail: impl Into<String>) -> Self {
        Self { check: check.into(), status: "fail".into(), detail: detail.into() }
    }

    pub fn passed(&self) -> bool {
        self.status == "pass"
    }
}

pub fn all_passed(items: &[CheckItem]) -> bool {
    items.iter().all(CheckItem::passed)
}

/// Orders and termination data of one nilpotency chain.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ChainSummary {
    pub orders: Vec<u64>,
    pub nilpotent: bool,
    pub index: Option<usize>,
}
