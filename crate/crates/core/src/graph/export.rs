//! DOT and JSON renderings of a snapshot.
//!
//! JSON layout (`format` = [`GRAPH_FORMAT`]):
//!
//! ```text
//! { "format": "g2hash-graph/1", "p": 13,
//!   "vertices": [ { "kind": "jacobian", "key": [j1, j2, j3], "model": [r1, .., r6] },
//!                 { "kind": "product", "key": [j, j'], "model": [[a1, a2, a3], [b1, b2, b3]] } ],
//!   "edges": [ { "from": 0, "to": 1, "kernel": { "splitting": 4 } } ] }
//! ```
//!
//! Field elements are written as `a + p b`; a `null` root is the point at
//! infinity.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::field::{FieldContext, FieldHandle};
use crate::invariants::{EllipticRootsForm, InvariantTriple};
use crate::richelot::FactorList;
use crate::SmallFp2;

use super::{Edge, GraphError, GraphSnapshot, Model, SmallField, Vertex};

pub const GRAPH_FORMAT: &str = "g2hash-graph/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Dot,
    Json,
}

impl FromStr for ExportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "dot" => Ok(Self::Dot),
            "json" => Ok(Self::Json),
            _ => Err(format!("unknown format {s:?}, expected dot or json")),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct JsonGraph {
    format: String,
    p: u64,
    vertices: Vec<JsonVertex>,
    edges: Vec<Edge>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum JsonVertex {
    Jacobian { key: [u64; 3], model: [Option<u64>; 6] },
    Product { key: [u64; 2], model: [[u64; 3]; 2] },
}

fn code(x: &SmallFp2) -> u64 {
    x.canonical_encode().to_u64().expect("small field")
}

fn element(field: &SmallField, c: u64) -> Result<SmallFp2, GraphError> {
    Ok(field.decode(&BigUint::from(c))?)
}

fn short_names(g: &GraphSnapshot) -> Vec<String> {
    let (mut j, mut e) = (0, 0);
    g.vertices()
        .iter()
        .map(|v| {
            if v.is_jacobian() {
                j += 1;
                format!("J{j}")
            } else {
                e += 1;
                format!("E{e}")
            }
        })
        .collect()
}

impl GraphSnapshot {
    pub fn export(&self, format: ExportFormat) -> Vec<u8> {
        match format {
            ExportFormat::Dot => self.to_dot().into_bytes(),
            ExportFormat::Json => self.to_json().into_bytes(),
        }
    }

    /// One node per vertex and one edge per `(from, to)` pair, labelled with
    /// its multiplicity.
    pub fn to_dot(&self) -> String {
        let names = short_names(self);
        let mut s = String::new();
        let _ = writeln!(s, "digraph G{} {{", self.p());
        for (name, v) in names.iter().zip(self.vertices()) {
            let shape = if v.is_jacobian() { "ellipse" } else { "box" };
            let _ = writeln!(s, "  {name} [shape={shape}, tooltip=\"{}\"];", v.label());
        }
        let mult: BTreeMap<(usize, usize), usize> = self.multiplicities();
        for ((a, b), m) in mult {
            let _ = writeln!(s, "  {} -> {} [label=\"{m}\", multiplicity={m}];", names[a], names[b]);
        }
        s.push_str("}\n");
        s
    }

    pub fn to_json(&self) -> String {
        let vertices = self
            .models()
            .iter()
            .zip(self.vertices())
            .map(|(m, v)| match (m, v) {
                (Model::Jacobian(l), Vertex::Jacobian(t)) => JsonVertex::Jacobian {
                    key: t.0.each_ref().map(code),
                    model: l.factors().each_ref().map(|f| f.root().map(code)),
                },
                (Model::Product(e1, e2), Vertex::Product(k)) => JsonVertex::Product {
                    key: k.each_ref().map(code),
                    model: [e1.roots().each_ref().map(code), e2.roots().each_ref().map(code)],
                },
                _ => unreachable!("model kind matches vertex kind"),
            })
            .collect();
        let doc = JsonGraph { format: GRAPH_FORMAT.into(), p: self.p(), vertices, edges: self.edges().to_vec() };
        serde_json::to_string_pretty(&doc).expect("plain data")
    }

    /// Parses [`GraphSnapshot::to_json`] output. Keys are taken as written;
    /// models are checked for nonsingularity only.
    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        let doc: JsonGraph = serde_json::from_str(text).map_err(|e| GraphError::Format(e.to_string()))?;
        if doc.format != GRAPH_FORMAT {
            return Err(GraphError::Format(format!("unknown format {:?}", doc.format)));
        }
        let field = FieldContext::new(doc.p)?;
        let mut vertices = Vec::with_capacity(doc.vertices.len());
        let mut models = Vec::with_capacity(doc.vertices.len());
        for v in doc.vertices {
            match v {
                JsonVertex::Jacobian { key, model } => {
                    let key = key.map(|c| element(&field, c)).into_iter().collect::<Result<Vec<_>, _>>()?;
                    vertices.push(Vertex::Jacobian(InvariantTriple(key.try_into().expect("three"))));
                    let mut roots = Vec::with_capacity(6);
                    for r in model {
                        roots.push(r.map(|c| element(&field, c)).transpose()?);
                    }
                    models.push(Model::Jacobian(FactorList::from_roots(roots.try_into().expect("six"))?));
                }
                JsonVertex::Product { key, model } => {
                    let [a, b] = key;
                    vertices.push(Vertex::Product([element(&field, a)?, element(&field, b)?]));
                    let mut es = Vec::with_capacity(2);
                    for rs in model {
                        let rs = rs.map(|c| element(&field, c)).into_iter().collect::<Result<Vec<_>, _>>()?;
                        es.push(EllipticRootsForm::new(rs.try_into().expect("three"))?);
                    }
                    let e2 = es.pop().expect("two");
                    let e1 = es.pop().expect("two");
                    models.push(Model::Product(e1, e2));
                }
            }
        }
        Self::from_parts(field, vertices, models, doc.edges)
    }
}

#[cfg(test)]
mod tests {
    use super::super::build_graph;
    use super::*;

    #[test]
    fn json_round_trip() {
        let g = build_graph(17).unwrap();
        let back = GraphSnapshot::from_json(&g.to_json()).unwrap();
        assert_eq!(back, g);
        assert_eq!(back.to_json(), g.to_json());
    }

    #[test]
    fn dot_for_13() {
        let dot = build_graph(13).unwrap().to_dot();
        assert_eq!(dot.lines().filter(|l| l.contains("shape=")).count(), 4);
        assert!(dot.contains("E1 -> E1 [label=\"10\""), "{dot}");
    }

    #[test]
    fn rejects_foreign_json() {
        assert!(GraphSnapshot::from_json("{}").is_err());
        assert!(GraphSnapshot::from_json(r#"{"format":"x","p":13,"vertices":[],"edges":[]}"#).is_err());
    }
}
