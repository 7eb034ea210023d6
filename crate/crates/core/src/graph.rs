//! The constraint graph on the reciprocal lattice.
//!
//! Nodes are integer frequencies in a max-norm box. Every element
//! `(A, t)` of the coset group contributes one out-edge per node,
//! `ω -> A^{-T} ω`, carrying the exact exponent `(ω · A^{-1} t) mod 1`.
//! Coefficients of an invariant function satisfy `F(ω) = e^{2πi r} F(target)`
//! along every edge.
//!
//! Orbits are the connected components. An orbit is dropped when
//! - a node has a self-loop with non-zero exponent (the coefficient is forced
//!   to zero, which is how centering and glide/screw extinctions appear),
//! - some edge leaves the box (the orbit would be clipped), or
//! - two paths between the same nodes disagree on the accumulated exponent.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::groups::CosetGroup;
use crate::rational::{mod_one, zero, Rational};
use crate::symop::{check_supported_dim, Freq, FrequencyAction};

/// Default cap on `(2R+1)^dim`.
pub const DEFAULT_NODE_BUDGET: usize = 1_000_000;

pub const DEFAULT_RADIUS_2D: u32 = 8;
pub const DEFAULT_RADIUS_3D: u32 = 4;

pub fn default_radius(dim: usize) -> u32 {
    if dim == 2 {
        DEFAULT_RADIUS_2D
    } else {
        DEFAULT_RADIUS_3D
    }
}

fn box_size(dim: usize, radius: u32, budget: usize) -> Result<usize> {
    check_supported_dim(dim)?;
    let nodes = (2 * radius as u128 + 1).pow(dim as u32);
    if nodes > budget as u128 {
        return Err(Error::NodeBudget { nodes, budget });
    }
    Ok(nodes as usize)
}

/// All integer vectors with max-norm `<= radius`, in lexicographic order.
pub fn enumerate_lattice(dim: usize, radius: u32) -> Result<Vec<Freq>> {
    enumerate_lattice_with_budget(dim, radius, DEFAULT_NODE_BUDGET)
}

pub fn enumerate_lattice_with_budget(dim: usize, radius: u32, budget: usize) -> Result<Vec<Freq>> {
    let n = box_size(dim, radius, budget)?;
    let r = radius as i32;
    let side = 2 * r + 1;
    Ok((0..n)
        .map(|idx| {
            let mut c = [0; 3];
            let mut rem = idx as i32;
            for d in (0..dim).rev() {
                c[d] = rem % side - r;
                rem /= side;
            }
            Freq::from_array(dim, c)
        })
        .collect())
}

/// Position of `omega` in the lexicographic box enumeration, if inside.
fn box_index(omega: &Freq, radius: u32) -> Option<usize> {
    let r = radius as i32;
    let side = (2 * r + 1) as usize;
    let mut idx = 0usize;
    for &c in omega.as_slice() {
        if c.abs() > r {
            return None;
        }
        idx = idx * side + (c + r) as usize;
    }
    Some(idx)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub source: usize,
    /// Index of the target node, `None` when the target lies outside the box.
    pub target: Option<usize>,
    pub target_freq: Freq,
    pub exponent: Rational,
    /// Index of the generating element in the coset group.
    pub element: usize,
}

impl Edge {
    pub fn is_self_loop(&self) -> bool {
        self.target == Some(self.source)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RemovalReason {
    /// The node has a self-loop with non-zero exponent.
    InconsistentSelfLoop,
    /// Another node in the same orbit has an inconsistent self-loop.
    InconsistentOrbit,
    /// The orbit leaves the enumeration box.
    IncompleteOrbit,
}

impl fmt::Display for RemovalReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RemovalReason::InconsistentSelfLoop => "inconsistent_self_loop",
            RemovalReason::InconsistentOrbit => "inconsistent_orbit",
            RemovalReason::IncompleteOrbit => "incomplete_orbit",
        })
    }
}

#[derive(Clone, Debug)]
pub struct ConstraintGraph {
    dim: usize,
    radius: u32,
    nodes: Vec<Freq>,
    /// Out-edges per node, one per coset element, in element order.
    edges: Vec<Vec<Edge>>,
    removed: BTreeMap<usize, RemovalReason>,
}

impl ConstraintGraph {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn radius(&self) -> u32 {
        self.radius
    }

    pub fn nodes(&self) -> &[Freq] {
        &self.nodes
    }

    pub fn out_edges(&self, node: usize) -> &[Edge] {
        &self.edges[node]
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> {
        self.edges.iter().flatten()
    }

    pub fn removed(&self) -> &BTreeMap<usize, RemovalReason> {
        &self.removed
    }

    pub fn is_removed(&self, node: usize) -> bool {
        self.removed.contains_key(&node)
    }

    pub fn index_of(&self, omega: &Freq) -> Option<usize> {
        if omega.dim() != self.dim {
            return None;
        }
        box_index(omega, self.radius)
    }
}

pub fn build_graph(group: &CosetGroup, radius: u32) -> Result<ConstraintGraph> {
    build_graph_with_budget(group, radius, DEFAULT_NODE_BUDGET)
}

pub fn build_graph_with_budget(group: &CosetGroup, radius: u32, budget: usize) -> Result<ConstraintGraph> {
    let dim = group.dim();
    let nodes = enumerate_lattice_with_budget(dim, radius, budget)?;
    let actions: Vec<FrequencyAction> = group.elements().iter().map(FrequencyAction::new).collect();
    let edges = nodes
        .iter()
        .enumerate()
        .map(|(source, omega)| {
            actions
                .iter()
                .enumerate()
                .map(|(element, action)| {
                    let (target_freq, exponent) = action.apply(omega);
                    Edge {
                        source,
                        target: box_index(&target_freq, radius),
                        target_freq,
                        exponent,
                        element,
                    }
                })
                .collect()
        })
        .collect();
    Ok(ConstraintGraph {
        dim,
        radius,
        nodes,
        edges,
        removed: BTreeMap::new(),
    })
}

/// Components over in-box edges, as sorted node lists in order of their
/// smallest node.
fn components(graph: &ConstraintGraph, skip_removed: bool) -> Vec<Vec<usize>> {
    let n = graph.nodes.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] || (skip_removed && graph.is_removed(start)) {
            continue;
        }
        seen[start] = true;
        let mut comp = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for e in &graph.edges[u] {
                if let Some(v) = e.target {
                    if !seen[v] && !(skip_removed && graph.is_removed(v)) {
                        seen[v] = true;
                        comp.push(v);
                        queue.push_back(v);
                    }
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Removes nodes with inconsistent self-loops and every orbit that
/// contains such a node or leaves the box.
pub fn prune_inconsistent(mut graph: ConstraintGraph) -> ConstraintGraph {
    let mut removed = BTreeMap::new();
    for comp in components(&graph, false) {
        let bad_loop: Vec<bool> = comp
            .iter()
            .map(|&u| {
                graph.edges[u]
                    .iter()
                    .any(|e| e.is_self_loop() && e.exponent != zero())
            })
            .collect();
        let incomplete = comp
            .iter()
            .any(|&u| graph.edges[u].iter().any(|e| e.target.is_none()));
        let any_loop = bad_loop.iter().any(|&b| b);
        for (&u, &looped) in comp.iter().zip(&bad_loop) {
            let reason = if looped {
                RemovalReason::InconsistentSelfLoop
            } else if incomplete {
                RemovalReason::IncompleteOrbit
            } else if any_loop {
                RemovalReason::InconsistentOrbit
            } else {
                continue;
            };
            removed.insert(u, reason);
        }
    }
    graph.removed = removed;
    graph
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitMember {
    pub freq: Freq,
    pub node: usize,
    /// Accumulated edge exponent along a path from the reference; the path
    /// product of edge weights is `exp(2πi exponent)`.
    pub exponent: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Orbit {
    pub reference: Freq,
    /// Sorted by frequency; the reference comes first with exponent 0.
    pub members: Vec<OrbitMember>,
    pub consistent: bool,
}

impl Orbit {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn eigenvalue_factor(&self) -> i64 {
        self.reference.norm_sq()
    }

    pub fn exponent_of(&self, omega: &Freq) -> Option<Rational> {
        self.members
            .binary_search_by(|m| m.freq.cmp(omega))
            .ok()
            .map(|i| self.members[i].exponent)
    }
}

/// Connected components of the surviving nodes with exponents assigned
/// breadth-first from the smallest node, then checked against every edge.
/// Sorted by `(|ξ|², ξ)`. On an unpruned graph, edges leaving the box are
/// ignored and clipped orbits are returned as their in-box part.
pub fn find_orbits(graph: &ConstraintGraph) -> Vec<Orbit> {
    let mut exponent: Vec<Option<Rational>> = vec![None; graph.nodes.len()];
    let mut orbits = Vec::new();
    for comp in components(graph, true) {
        let root = comp[0];
        exponent[root] = Some(zero());
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            let ru = exponent[u].expect("visited");
            for e in &graph.edges[u] {
                let Some(v) = e.target else { continue };
                if exponent[v].is_none() {
                    exponent[v] = Some(mod_one(ru + e.exponent));
                    queue.push_back(v);
                }
            }
        }
        let consistent = comp.iter().all(|&u| {
            graph.edges[u].iter().all(|e| {
                e.target
                    .is_none_or(|v| exponent[v] == Some(mod_one(exponent[u].unwrap() + e.exponent)))
            })
        });
        let members = comp
            .iter()
            .map(|&u| OrbitMember {
                freq: graph.nodes[u],
                node: u,
                exponent: exponent[u].unwrap(),
            })
            .collect();
        orbits.push(Orbit {
            reference: graph.nodes[root],
            members,
            consistent,
        });
    }
    orbits.sort_by_key(|o| (o.reference.norm_sq(), o.reference));
    orbits
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{expand_group, load_group};

    fn f(c: &[i32]) -> Freq {
        Freq::new(c).unwrap()
    }

    fn group(dim: usize, key: &str) -> CosetGroup {
        expand_group(&load_group(dim, key).unwrap()).unwrap()
    }

    #[test]
    fn enumeration_counts_and_order() {
        assert_eq!(enumerate_lattice(2, 1).unwrap().len(), 9);
        assert_eq!(enumerate_lattice(3, 2).unwrap().len(), 125);
        assert_eq!(enumerate_lattice(2, 0).unwrap(), vec![Freq::zero(2)]);
        let nodes = enumerate_lattice(3, 2).unwrap();
        assert!(nodes.windows(2).all(|w| w[0] < w[1]));
        for (i, n) in nodes.iter().enumerate() {
            assert_eq!(box_index(n, 2), Some(i));
        }
        assert!(matches!(
            enumerate_lattice_with_budget(3, 10, 1000),
            Err(Error::NodeBudget { nodes: 9261, .. })
        ));
    }

    #[test]
    fn pg_edges_follow_parity_rule() {
        let g = build_graph(&group(2, "pg"), 1).unwrap();
        let glide = 0; // "-x,y+1/2" sorts before the identity
        let edge = |c: &[i32]| g.out_edges(g.index_of(&f(c)).unwrap())[glide].clone();
        let e = edge(&[1, 1]);
        assert_eq!(e.target_freq, f(&[-1, 1]));
        assert_eq!(e.exponent, Rational::new(1, 2));
        let e = edge(&[1, 0]);
        assert_eq!(e.target_freq, f(&[-1, 0]));
        assert_eq!(e.exponent, zero());
    }

    #[test]
    fn p1_has_only_trivial_self_loops() {
        let g = build_graph(&group(2, "p1"), 2).unwrap();
        assert!(g.edges().all(|e| e.is_self_loop() && e.exponent == zero()));
        let g = prune_inconsistent(g);
        assert!(g.removed().is_empty());
        assert_eq!(find_orbits(&g).len(), 25);
    }

    #[test]
    fn pg_prunes_odd_axis_nodes() {
        for radius in 1..=4 {
            let g = prune_inconsistent(build_graph(&group(2, "pg"), radius).unwrap());
            // brute force: the glide fixes (0, w2) with phase w2/2
            for (i, n) in g.nodes().iter().enumerate() {
                let w = n.as_slice();
                let expected = w[0] == 0 && w[1] % 2 != 0;
                assert_eq!(g.is_removed(i), expected, "{n}");
                if expected {
                    assert_eq!(g.removed()[&i], RemovalReason::InconsistentSelfLoop);
                }
            }
        }
    }

    #[test]
    fn centered_group_prunes_odd_sum() {
        let g = prune_inconsistent(build_graph(&group(2, "cm"), 3).unwrap());
        for (i, n) in g.nodes().iter().enumerate() {
            let w = n.as_slice();
            if (w[0] + w[1]) % 2 != 0 {
                assert_eq!(g.removed().get(&i), Some(&RemovalReason::InconsistentSelfLoop));
            } else {
                assert!(!g.is_removed(i));
            }
        }
    }

    #[test]
    fn pg_golden_orbits() {
        let g = prune_inconsistent(build_graph(&group(2, "pg"), 1).unwrap());
        let orbits = find_orbits(&g);
        assert_eq!(orbits[0].reference, Freq::zero(2));
        assert_eq!(orbits[0].len(), 1);
        let find = |c: &[i32]| orbits.iter().find(|o| o.reference == f(c)).unwrap();
        let e1 = find(&[-1, 0]);
        assert_eq!(e1.members.len(), 2);
        assert_eq!(e1.exponent_of(&f(&[1, 0])), Some(zero()));
        let e2 = find(&[-1, 1]);
        assert_eq!(e2.exponent_of(&f(&[-1, 1])), Some(zero()));
        assert_eq!(e2.exponent_of(&f(&[1, 1])), Some(Rational::new(1, 2)));
        assert!(orbits.iter().all(|o| o.consistent));
        // {0}, ±(1,0), (±1,-1), (±1,1); (0,±1) are extinct
        assert_eq!(orbits.len(), 4);
    }

    #[test]
    fn hexagonal_orbits_drop_when_clipped() {
        let g = prune_inconsistent(build_graph(&group(2, "p6"), 1).unwrap());
        // (1,1) maps to (-1,2) under the six-fold rotation
        let i = g.index_of(&f(&[1, 1])).unwrap();
        assert_eq!(g.removed()[&i], RemovalReason::IncompleteOrbit);
        for o in find_orbits(&g) {
            assert!(o.members.iter().all(|m| m.freq.max_norm() <= 1));
        }
    }

    #[test]
    fn orbits_are_sorted_and_reference_first() {
        let g = prune_inconsistent(build_graph(&group(3, "227"), 3).unwrap());
        let orbits = find_orbits(&g);
        for w in orbits.windows(2) {
            assert!((w[0].reference.norm_sq(), w[0].reference) < (w[1].reference.norm_sq(), w[1].reference));
        }
        for o in &orbits {
            assert_eq!(o.members[0].freq, o.reference);
            assert_eq!(o.members[0].exponent, zero());
            assert!(o.consistent);
        }
    }
}
