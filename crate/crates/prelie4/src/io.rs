//! JSON document formats: structure-constant tables, circle (brace) tables,
//! family specs, enumeration spaces and reports. All documents carry
//! `"schema": 1` and serialize canonically (fixed field order, reduced
//! coefficients, sorted maps, trailing newline) so files are diffable and
//! reruns are byte-identical.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::brace::{Brace, CircleTable};
use crate::error::{Error, Result};
use crate::families::FamilySpec;
use crate::flows::FlowContext;
use crate::modarith::Shape;
use crate::prelie::{PreLieRing, SCTable};
use crate::report::{ChainSummary, CheckItem};
use crate::search::EnumSpace;

pub const SCHEMA_VERSION: u32 = 1;

fn shape_from_doc(p: u64, exponents: &[u32]) -> Result<Shape> {
    Shape::new(p, exponents)
}

fn elem_rows(ring: &PreLieRing) -> Vec<Vec<Vec<u64>>> {
    let s = ring.shape();
    let r = s.rank();
    (0..r)
        .map(|i| (0..r).map(|j| ring.table().get(i, j).coeffs().to_vec()).collect())
        .collect()
}

fn table_from_rows(shape: &Shape, rows: &[Vec<Vec<u64>>]) -> Result<SCTable> {
    let r = shape.rank();
    if rows.len() != r || rows.iter().any(|row| row.len() != r) {
        return Err(Error::Format(format!("table must be {r}x{r}")));
    }
    let mut table = SCTable::zero(shape);
    for (i, row) in rows.iter().enumerate() {
        for (j, coeffs) in row.iter().enumerate() {
            if coeffs.len() != r {
                return Err(Error::Format(format!(
                    "entry ({},{}) has {} coefficients, expected {r}",
                    i + 1,
                    j + 1,
                    coeffs.len()
                )));
            }
            let signed: Vec<i64> = coeffs.iter().map(|&c| c as i64).collect();
            table.set(i, j, shape.elem(&signed)?);
        }
    }
    Ok(table)
}

/// Pre-Lie multiplication table document.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct TableDoc {
    pub schema: u32,
    pub operation: String,
    pub p: u64,
    pub exponents: Vec<u32>,
    pub table: Vec<Vec<Vec<u64>>>,
}

impl TableDoc {
    pub fn from_ring(ring: &PreLieRing) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            operation: "prelie".into(),
            p: ring.shape().p(),
            exponents: ring.shape().exponents().to_vec(),
            table: elem_rows(ring),
        }
    }

    pub fn to_ring(&self) -> Result<PreLieRing> {
        if self.operation != "prelie" {
            return Err(Error::Format(format!(
                "expected a prelie table, found operation {:?}",
                self.operation
            )));
        }
        let shape = shape_from_doc(self.p, &self.exponents)?;
        PreLieRing::new(shape, table_from_rows(&shape, &self.table)?)
    }
}

/// Provenance block for a circle table built through the group of flows.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct FlowsProvenance {
    pub xi: u64,
    pub nilpotency_index: usize,
    pub scale: u64,
    pub prelie: Vec<Vec<Vec<u64>>>,
}

/// Circle (brace) operation document. Either a provenance block (the brace
/// is the group of flows over the embedded pre-Lie table) or a fully
/// materialized `N x N` table of element indices in [`Shape::elem_index`]
/// order, or both.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CircleDoc {
    pub schema: u32,
    pub operation: String,
    pub p: u64,
    pub exponents: Vec<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flows: Option<FlowsProvenance>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<Vec<u64>>>,
}

impl CircleDoc {
    pub fn from_brace(brace: &Brace, materialize: bool) -> Result<Self> {
        let s = brace.shape();
        let flows = brace.provenance().map(|(ring, ctx)| FlowsProvenance {
            xi: ctx.xi(),
            nilpotency_index: ctx.nilpotency_index(),
            scale: ctx.scale(),
            prelie: elem_rows(ring),
        });
        let table = if materialize {
            let t = brace.materialize()?;
            let n = t.order();
            Some(
                (0..n)
                    .map(|i| (0..n).map(|j| t.circ_idx(i, j) as u64).collect())
                    .collect(),
            )
        } else {
            None
        };
        if flows.is_none() && table.is_none() {
            return Err(Error::Format(
                "circle document needs a flows provenance block or a materialized table".into(),
            ));
        }
        Ok(Self {
            schema: SCHEMA_VERSION,
            operation: "circle".into(),
            p: s.p(),
            exponents: s.exponents().to_vec(),
            flows,
            table,
        })
    }

    pub fn to_brace(&self) -> Result<Brace> {
        if self.operation != "circle" {
            return Err(Error::Format(format!(
                "expected a circle table, found operation {:?}",
                self.operation
            )));
        }
        let shape = shape_from_doc(self.p, &self.exponents)?;
        // An explicit table is the exported operation itself and wins over
        // the provenance block, so edits to materialized files are seen.
        if self.table.is_none() {
            let flows = self.flows.as_ref().expect("checked above");
            let table = table_from_rows(&shape, &flows.prelie)?;
            let ring = PreLieRing::new(shape, table)?;
            let ctx = FlowContext::with_xi(shape.p(), flows.nilpotency_index, flows.xi)?;
            return Brace::from_flows(ring, ctx);
        }
        let rows = self.table.as_ref().expect("checked above");
        let n = shape.order() as usize;
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Format(format!("circle table must be {n}x{n}")));
        }
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            for &v in row {
                if v >= shape.order() {
                    return Err(Error::Format(format!("circle entry {v} out of range")));
                }
                entries.push(v as u16);
            }
        }
        Ok(Brace::from_table(CircleTable::from_rows(shape, entries)?))
    }
}

/// Family spec document: `{schema, family, p, params}`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct SpecDoc {
    pub schema: u32,
    pub family: u8,
    pub p: u64,
    pub params: BTreeMap<String, i64>,
}

impl SpecDoc {
    pub fn from_spec(spec: &FamilySpec) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            family: spec.family,
            p: spec.p,
            params: spec.params.clone(),
        }
    }

    pub fn to_spec(&self) -> FamilySpec {
        FamilySpec { family: self.family, p: self.p, params: self.params.clone() }
    }
}

/// Enumeration space document: explicit choice lists per entry coordinate,
/// 1-based entry indices; unlisted entries are pinned to zero.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct SpaceDoc {
    pub schema: u32,
    pub p: u64,
    pub exponents: Vec<u32>,
    pub entries: Vec<SpaceEntry>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct SpaceEntry {
    pub row: usize,
    pub col: usize,
    pub coord: usize,
    pub choices: Vec<u64>,
}

impl SpaceDoc {
    pub fn to_space(&self) -> Result<EnumSpace> {
        let shape = shape_from_doc(self.p, &self.exponents)?;
        let mut space = EnumSpace::new(shape);
        let r = shape.rank();
        for e in &self.entries {
            if e.row == 0 || e.col == 0 || e.coord == 0 || e.row > r || e.col > r || e.coord > r {
                return Err(Error::Format(format!(
                    "space entry indices are 1-based up to {r}: got ({}, {}, {})",
                    e.row, e.col, e.coord
                )));
            }
            space.set_choices(e.row - 1, e.col - 1, e.coord - 1, &e.choices)?;
        }
        Ok(space)
    }
}

/// Top-level report written by the CLI: command echo, seeds, budgets, checks.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportDoc {
    pub schema: u32,
    pub command: String,
    pub input: String,
    pub p: u64,
    pub exponents: Vec<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub budgets: Option<BTreeMap<String, u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regime_note: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chains: Option<BTreeMap<String, ChainSummary>>,
    pub checks: Vec<CheckItem>,
    pub pass: bool,
}

/// Canonical serialization: pretty JSON plus trailing newline.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Format(format!("serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

pub fn write_canonical<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, to_canonical_json(value)?)?;
    Ok(())
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))
}

/// Reads a table file and dispatches on its `operation` tag.
pub enum AnyTable {
    PreLie(PreLieRing),
    Circle(Brace),
}

pub fn read_any_table(path: &Path) -> Result<AnyTable> {
    let text = std::fs::read_to_string(path)?;
    let probe: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    match probe.get("operation").and_then(|v| v.as_str()) {
        Some("circle") => {
            let doc: CircleDoc = serde_json::from_str(&text)
                .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
            Ok(AnyTable::Circle(doc.to_brace()?))
        }
        Some("prelie") | None => {
            let doc: TableDoc = serde_json::from_str(&text)
                .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
            Ok(AnyTable::PreLie(doc.to_ring()?))
        }
        Some(other) => Err(Error::Format(format!("unknown operation tag {other:?}"))),
    }
}
