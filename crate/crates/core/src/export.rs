//! JSON and Graphviz output.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::Serialize;

use crate::basis::BasisSet;
use crate::graph::{ConstraintGraph, Orbit, RemovalReason};
use crate::groups::CosetGroup;
use crate::rational::{is_integer, to_pq, Rational};
use crate::symop::Freq;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize)]
pub struct MemberRecord {
    pub omega: Freq,
    pub exponent: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrbitRecord {
    pub index: usize,
    pub reference: Freq,
    pub eigenvalue_factor: i64,
    pub size: usize,
    pub members: Vec<MemberRecord>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RemovedRecord {
    pub omega: Freq,
    pub reason: RemovalReason,
}

#[derive(Clone, Debug, Serialize)]
pub struct BasisDocument {
    pub version: String,
    pub schema_version: u32,
    pub group: String,
    pub group_number: u16,
    pub dim: usize,
    pub radius: u32,
    pub basis_size: usize,
    pub orbits: Vec<OrbitRecord>,
    pub removed: Vec<RemovedRecord>,
    pub anomalies: Vec<OrbitRecord>,
}

fn orbit_record(index: usize, orbit: &Orbit) -> OrbitRecord {
    OrbitRecord {
        index,
        reference: orbit.reference,
        eigenvalue_factor: orbit.eigenvalue_factor(),
        size: orbit.len(),
        members: orbit
            .members
            .iter()
            .map(|m| MemberRecord {
                omega: m.freq,
                exponent: to_pq(&m.exponent),
            })
            .collect(),
    }
}

impl BasisDocument {
    pub fn new(basis: &BasisSet) -> Self {
        BasisDocument {
            version: env!("CARGO_PKG_VERSION").to_string(),
            schema_version: SCHEMA_VERSION,
            group: basis.group_symbol().to_string(),
            group_number: basis.group_number(),
            dim: basis.dim(),
            radius: basis.radius(),
            basis_size: basis.len(),
            orbits: basis.orbits().iter().enumerate().map(|(i, o)| orbit_record(i, o)).collect(),
            removed: basis
                .removed()
                .iter()
                .map(|&(omega, reason)| RemovedRecord { omega, reason })
                .collect(),
            anomalies: basis.anomalies().iter().enumerate().map(|(i, o)| orbit_record(i, o)).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("serializable document");
        s.push('\n');
        s
    }
}

fn edge_color(r: &Rational) -> &'static str {
    if is_integer(r) {
        "blue"
    } else if *r == Rational::new(1, 2) {
        "red"
    } else {
        "black"
    }
}

/// Graphviz rendering of the constraint graph. Removed nodes are filled
/// gray; identity edges are omitted and parallel duplicates merged.
pub fn graph_to_dot(graph: &ConstraintGraph, group: &CosetGroup) -> String {
    let mut out = String::new();
    let identity = group.elements().iter().position(|op| op.is_identity());
    let _ = writeln!(out, "digraph constraint_graph {{");
    let _ = writeln!(
        out,
        "  graph [label=\"{} R={}\", overlap=false];",
        group.spec().symbol,
        graph.radius()
    );
    let _ = writeln!(out, "  node [shape=circle, fontsize=9];");
    for (i, f) in graph.nodes().iter().enumerate() {
        let mut attrs = format!("label=\"{f}\"");
        if graph.dim() == 2 {
            let _ = write!(attrs, ", pos=\"{},{}!\"", f.as_slice()[0], f.as_slice()[1]);
        }
        if let Some(reason) = graph.removed().get(&i) {
            let _ = write!(attrs, ", style=filled, fillcolor=gray70, tooltip=\"{reason}\"");
        }
        let _ = writeln!(out, "  n{i} [{attrs}];");
    }
    let mut seen = BTreeSet::new();
    for e in graph.edges() {
        if Some(e.element) == identity {
            continue;
        }
        let Some(t) = e.target else { continue };
        if !seen.insert((e.source, t, e.exponent)) {
            continue;
        }
        let _ = writeln!(
            out,
            "  n{} -> n{} [label=\"{}\", color={}];",
            e.source,
            t,
            to_pq(&e.exponent),
            edge_color(&e.exponent)
        );
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::build_graph;
    use crate::groups::{expand_group, load_group};

    #[test]
    fn json_shape() {
        let g = expand_group(&load_group(2, "pg").unwrap()).unwrap();
        let b = BasisSet::build(&g, 1).unwrap();
        let v: serde_json::Value = serde_json::from_str(&BasisDocument::new(&b).to_json()).unwrap();
        assert_eq!(v["group"], "pg");
        assert_eq!(v["dim"], 2);
        assert_eq!(v["orbits"].as_array().unwrap().len(), 4);
        assert_eq!(v["orbits"][0]["members"][0]["exponent"], "0/1");
        assert_eq!(v["removed"][0]["reason"], "inconsistent_self_loop");
        assert!(v["orbits"][3]["members"]
            .as_array()
            .unwrap()
            .iter()
            .any(|m| m["exponent"] == "1/2"));
    }

    #[test]
    fn dot_colors_and_removed_nodes() {
        let g = expand_group(&load_group(2, "pg").unwrap()).unwrap();
        let graph = crate::graph::prune_inconsistent(build_graph(&g, 1).unwrap());
        let dot = graph_to_dot(&graph, &g);
        assert!(dot.starts_with("digraph"));
        assert!(dot.contains("color=red"));
        assert!(dot.contains("color=blue"));
        assert!(dot.contains("fillcolor=gray70"));
        // the glide maps (0,1) to itself with phase 1/2
        let n = graph.index_of(&Freq::new(&[0, 1]).unwrap()).unwrap();
        assert!(dot.contains(&format!("n{n} -> n{n} [label=\"1/2\", color=red]")));
    }
}
