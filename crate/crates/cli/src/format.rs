//! On-disk formats: the LSSD JSON document and Gram matrix JSON.
//!
//! An LSSD document is an object with integer fields `v`, `k`, `lambda`, `w`,
//! a `blocks` object keyed `"i,j"` (1-based fibers, `i < j`) holding `v × v`
//! arrays of 0/1, and an optional free-form `metadata` object. The writer
//! emits keys in sorted order with one matrix row per line, so output is
//! byte-stable across runs.

use std::fmt::Write as _;

use lssd_core::designs::validate_params;
use lssd_core::exact::BitMatrix;
use lssd_core::geometry::ScaledGram;
use lssd_core::lssd::LssdGraph;
use serde_json::{Map, Value};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("document must be a JSON object")]
    NotObject,
    #[error("missing field {0}")]
    Missing(String),
    #[error("field {field} must be {expected}")]
    Type { field: String, expected: &'static str },
    #[error("invalid parameters: {0}")]
    Params(String),
    #[error("{field} has {found} rows, expected {expected}")]
    Rows {
        field: String,
        expected: usize,
        found: usize,
    },
    #[error("{field}[{row}] has {found} entries, expected {expected}")]
    Cols {
        field: String,
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("{field}[{row}][{col}] = {value} is not 0 or 1")]
    Entry {
        field: String,
        row: usize,
        col: usize,
        value: String,
    },
    #[error("unexpected block key {0:?}")]
    ExtraBlock(String),
    #[error("{0}")]
    Graph(String),
}

/// Parsed document: the graph and whatever metadata accompanied it.
#[derive(Debug, Clone, PartialEq)]
pub struct LssdDocument {
    pub graph: LssdGraph,
    pub metadata: Map<String, Value>,
}

impl LssdDocument {
    pub fn new(graph: LssdGraph) -> Self {
        Self {
            graph,
            metadata: Map::new(),
        }
    }

    pub fn with_construction(graph: LssdGraph, construction: &str) -> Self {
        let mut metadata = Map::new();
        metadata.insert("construction".into(), Value::String(construction.into()));
        Self { graph, metadata }
    }

    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let value: Value = serde_json::from_str(text).map_err(|e| FormatError::Json(e.to_string()))?;
        let obj = value.as_object().ok_or(FormatError::NotObject)?;
        let int = |name: &str| -> Result<i64, FormatError> {
            obj.get(name)
                .ok_or_else(|| FormatError::Missing(name.into()))?
                .as_i64()
                .ok_or_else(|| FormatError::Type {
                    field: name.into(),
                    expected: "an integer",
                })
        };
        let (v, k, lambda, w) = (int("v")?, int("k")?, int("lambda")?, int("w")?);
        let params = validate_params(v, k, lambda).map_err(|e| FormatError::Params(e.to_string()))?;
        if w < 2 {
            return Err(FormatError::Params(format!("w = {w} must be at least 2")));
        }
        let (v, w) = (v as usize, w as usize);
        let blocks = obj
            .get("blocks")
            .ok_or_else(|| FormatError::Missing("blocks".into()))?
            .as_object()
            .ok_or_else(|| FormatError::Type {
                field: "blocks".into(),
                expected: "an object",
            })?;
        let mut mats = Vec::with_capacity(w * (w - 1) / 2);
        for i in 1..=w {
            for j in i + 1..=w {
                let key = format!("{i},{j}");
                let field = format!("blocks[{key}]");
                let m = blocks.get(&key).ok_or_else(|| FormatError::Missing(field.clone()))?;
                mats.push(parse_block(m, v, &field)?);
            }
        }
        if blocks.len() != mats.len() {
            let extra = blocks
                .keys()
                .find(|key| !valid_key(key, w))
                .cloned()
                .unwrap_or_default();
            return Err(FormatError::ExtraBlock(extra));
        }
        let metadata = match obj.get("metadata") {
            None => Map::new(),
            Some(Value::Object(m)) => m.clone(),
            Some(_) => {
                return Err(FormatError::Type {
                    field: "metadata".into(),
                    expected: "an object",
                })
            }
        };
        let graph = LssdGraph::new(params, w, mats).map_err(|e| FormatError::Graph(e.to_string()))?;
        Ok(Self { graph, metadata })
    }

    pub fn to_json(&self) -> String {
        let g = &self.graph;
        let p = g.params();
        let mut out = String::from("{\n  \"blocks\": {");
        let mut first = true;
        let mut keys: Vec<(String, (usize, usize))> = g
            .blocks()
            .map(|((i, j), _)| (format!("{},{}", i + 1, j + 1), (i, j)))
            .collect();
        keys.sort();
        for (key, (i, j)) in keys {
            out.push_str(if first { "\n" } else { ",\n" });
            first = false;
            let _ = write!(out, "    \"{key}\": [");
            let b = g.stored_block(i, j);
            for r in 0..b.rows() {
                out.push_str(if r == 0 { "\n      [" } else { ",\n      [" });
                for c in 0..b.cols() {
                    if c > 0 {
                        out.push(',');
                    }
                    out.push(if b.get(r, c) { '1' } else { '0' });
                }
                out.push(']');
            }
            out.push_str("\n    ]");
        }
        out.push_str("\n  },\n");
        let _ = writeln!(out, "  \"k\": {},", p.k);
        let _ = writeln!(out, "  \"lambda\": {},", p.lambda);
        if !self.metadata.is_empty() {
            let meta = serde_json::to_string(&Value::Object(self.metadata.clone())).expect("metadata serializes");
            let _ = writeln!(out, "  \"metadata\": {meta},");
        }
        let _ = writeln!(out, "  \"v\": {},", p.v);
        let _ = writeln!(out, "  \"w\": {}", g.w());
        out.push_str("}\n");
        out
    }
}

fn valid_key(key: &str, w: usize) -> bool {
    let Some((a, b)) = key.split_once(',') else {
        return false;
    };
    match (a.parse::<usize>(), b.parse::<usize>()) {
        (Ok(i), Ok(j)) => 1 <= i && i < j && j <= w && key == format!("{i},{j}"),
        _ => false,
    }
}

fn parse_block(m: &Value, v: usize, field: &str) -> Result<BitMatrix, FormatError> {
    let rows = m.as_array().ok_or_else(|| FormatError::Type {
        field: field.into(),
        expected: "an array of rows",
    })?;
    if rows.len() != v {
        return Err(FormatError::Rows {
            field: field.into(),
            expected: v,
            found: rows.len(),
        });
    }
    let mut b = BitMatrix::zeros(v, v);
    for (r, row) in rows.iter().enumerate() {
        let cells = row.as_array().ok_or_else(|| FormatError::Type {
            field: format!("{field}[{r}]"),
            expected: "an array",
        })?;
        if cells.len() != v {
            return Err(FormatError::Cols {
                field: field.into(),
                row: r,
                expected: v,
                found: cells.len(),
            });
        }
        for (c, x) in cells.iter().enumerate() {
            match x.as_u64() {
                Some(0) => {}
                Some(1) => b.set(r, c, true),
                _ => {
                    return Err(FormatError::Entry {
                        field: field.into(),
                        row: r,
                        col: c,
                        value: x.to_string(),
                    })
                }
            }
        }
    }
    Ok(b)
}

/// `{"dim", "scale", "claimed_rank", "entries"}` with exact integer entries.
pub fn gram_to_json(g: &ScaledGram) -> String {
    let mut out = format!(
        "{{\n  \"claimed_rank\": {},\n  \"dim\": {},\n  \"entries\": [",
        g.claimed_rank, g.dim
    );
    for r in 0..g.entries.rows() {
        out.push_str(if r == 0 { "\n    [" } else { ",\n    [" });
        let row: Vec<String> = g.entries.row(r).iter().map(|x| x.to_string()).collect();
        out.push_str(&row.join(","));
        out.push(']');
    }
    let _ = write!(out, "\n  ],\n  \"scale\": {}\n}}\n", g.scale);
    out
}
