// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! Space-syntax local integration.
//!
//! For a node `i` and radius `r`, with `d_ij` the hop count to every node `j`
//! at most `r` steps away:
//!
//! * total depth `TD = Σ d_ij`
//! * `k_local` = number of such nodes plus `i` itself
//! * closeness `C = 1 / TD`
//! * mean depth `MD = TD / (k_local - 1)`
//! * relative asymmetry `RA = 2 (MD - 1) / (k_local - 2)`
//!
//! Lower RA means a more integrated space. The movement predictor exposed
//! as `score` is `-RA`.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::graph::{ConnectivityGraph, NodeId};

pub const DEFAULT_RADIUS: usize = 2;

#[derive(Clone, Debug, PartialEq)]
pub struct NodeMetrics {
    pub total_depth: u64,
    pub k_local: usize,
    /// `None` when no other node lies within the radius.
    pub closeness: Option<f64>,
    /// `None` when `k_local < 2`.
    pub mean_depth: Option<f64>,
    /// `None` when `k_local < 3`.
    pub ra: Option<f64>,
    /// `-ra`; undefined exactly when `ra` is.
    pub score: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyntaxMetrics {
    pub radius: usize,
    pub nodes: Vec<NodeMetrics>,
}

impl SyntaxMetrics {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn get(&self, n: NodeId) -> &NodeMetrics {
        &self.nodes[n.index()]
    }
}

/// `1 / Σ d_ij` over nodes within `radius` steps of `i`.
pub fn local_closeness(g: &ConnectivityGraph, i: NodeId, radius: usize) -> Result<f64> {
    let depths = g.bfs_depths(i, Some(radius))?;
    let total: usize = depths.values().sum();
    if total == 0 {
        return Err(Error::IsolatedNode(i));
    }
    Ok(1.0 / total as f64)
}

fn node_metrics(g: &ConnectivityGraph, i: NodeId, radius: usize) -> NodeMetrics {
    let depths = g
        .bfs_depths(i, Some(radius))
        .expect("node comes from the graph");
    let total_depth: u64 = depths.values().map(|&d| d as u64).sum();
    let k_local = depths.len() + 1;
    let td = total_depth as f64;

    let closeness = (total_depth > 0).then(|| 1.0 / td);
    let mean_depth = (k_local >= 2).then(|| td / (k_local - 1) as f64);
    // 2(MD - 1)/(k - 2) rewritten over integers as 2(TD - (k - 1)) / ((k - 1)(k - 2)),
    // a single rounding, so nodes with equal exact RA get equal floats.
    let ra = (k_local >= 3).then(|| {
        let others = (k_local - 1) as u64;
        let excess = 2 * (total_depth - others);
        excess as f64 / (others * (others - 1)) as f64
    });
    NodeMetrics {
        total_depth,
        k_local,
        closeness,
        mean_depth,
        ra,
        score: ra.map(|r| -r),
    }
}

pub fn compute_syntax_metrics(g: &ConnectivityGraph, radius: usize) -> Result<SyntaxMetrics> {
    if g.node_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    let nodes = g.nodes().map(|i| node_metrics(g, i, radius)).collect();
    Ok(SyntaxMetrics { radius, nodes })
}

/// Node ids ordered from most to least integrated (ascending RA).
///
/// Nodes with undefined RA come last; ties are broken by id.
pub fn rank_by_integration(m: &SyntaxMetrics) -> Vec<NodeId> {
    let mut order: Vec<NodeId> = (0..m.nodes.len()).map(NodeId).collect();
    order.sort_by(|&a, &b| {
        let ka = m.nodes[a.index()].ra;
        let kb = m.nodes[b.index()].ra;
        let by_ra = match (ka, kb) {
            (Some(x), Some(y)) => x.total_cmp(&y),
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => Ordering::Equal,
        };
        by_ra.then(a.cmp(&b))
    });
    order
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph(n: usize, edges: &[(usize, usize)]) -> ConnectivityGraph {
        let e: Vec<_> = edges.iter().map(|&(u, v)| (u, v, 1.0)).collect();
        ConnectivityGraph::build(n, &e, None).unwrap()
    }

    fn path(n: usize) -> ConnectivityGraph {
        let e: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        graph(n, &e)
    }

    fn star(leaves: usize) -> ConnectivityGraph {
        let e: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
        graph(leaves + 1, &e)
    }

    #[test]
    fn closeness_two_near_one_far() {
        // node 1 has neighbours 0 and 2, and 3 two steps away via 2
        let g = graph(4, &[(0, 1), (1, 2), (2, 3)]);
        assert_eq!(local_closeness(&g, NodeId(1), 2).unwrap(), 0.25);
    }

    #[test]
    fn closeness_single_neighbour() {
        let g = graph(2, &[(0, 1)]);
        assert_eq!(local_closeness(&g, NodeId(0), 2).unwrap(), 1.0);
    }

    #[test]
    fn closeness_path_middle() {
        assert_eq!(local_closeness(&path(5), NodeId(2), 2).unwrap(), 1.0 / 6.0);
    }

    #[test]
    fn closeness_isolated() {
        let g = graph(2, &[]);
        assert!(matches!(
            local_closeness(&g, NodeId(0), 2),
            Err(Error::IsolatedNode(NodeId(0)))
        ));
    }

    #[test]
    fn star_center() {
        let m = compute_syntax_metrics(&star(4), 2).unwrap();
        let c = m.get(NodeId(0));
        assert_eq!(c.mean_depth, Some(1.0));
        assert_eq!(c.ra, Some(0.0));
        assert_eq!(rank_by_integration(&m)[0], NodeId(0));
    }

    #[test]
    fn p3_endpoint() {
        let m = compute_syntax_metrics(&path(3), 2).unwrap();
        let e = m.get(NodeId(0));
        assert_eq!(e.total_depth, 3);
        assert_eq!(e.k_local, 3);
        assert_eq!(e.mean_depth, Some(1.5));
        assert_eq!(e.ra, Some(1.0));
        assert_eq!(e.score, Some(-1.0));
    }

    #[test]
    fn p5_middle() {
        let m = compute_syntax_metrics(&path(5), 2).unwrap();
        let c = m.get(NodeId(2));
        assert_eq!(c.total_depth, 6);
        assert_eq!(c.k_local, 5);
        assert_eq!(c.mean_depth, Some(1.5));
        assert_eq!(c.ra, Some(1.0 / 3.0));
        // nodes 1 and 3: TD = 4, k_local = 4, MD = 4/3, RA = 1/3 as well
        assert_eq!(m.get(NodeId(1)).ra, Some(1.0 / 3.0));
        assert_eq!(m.get(NodeId(3)).ra, Some(1.0 / 3.0));
        let rank = rank_by_integration(&m);
        assert_eq!(rank, [1, 2, 3, 0, 4].map(NodeId).to_vec());
    }

    #[test]
    fn undefined_entries_are_flagged() {
        // P2: each node has k_local = 2
        let m = compute_syntax_metrics(&path(2), 2).unwrap();
        let a = m.get(NodeId(0));
        assert_eq!(a.closeness, Some(1.0));
        assert_eq!(a.mean_depth, Some(1.0));
        assert_eq!(a.ra, None);
        assert_eq!(a.score, None);

        let m = compute_syntax_metrics(&graph(3, &[(0, 1)]), 2).unwrap();
        let iso = m.get(NodeId(2));
        assert_eq!(iso.k_local, 1);
        assert_eq!(iso.closeness, None);
        assert_eq!(iso.mean_depth, None);
        // undefined RA ranked last
        assert_eq!(*rank_by_integration(&m).last().unwrap(), NodeId(2));
    }

    #[test]
    fn cycle_ties_rank_by_id() {
        let g = graph(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]);
        let m = compute_syntax_metrics(&g, 2).unwrap();
        let rank = rank_by_integration(&m);
        assert_eq!(rank, (0..6).map(NodeId).collect::<Vec<_>>());
    }

    #[test]
    fn complete_graph() {
        let mut e = Vec::new();
        for i in 0..5 {
            for j in i + 1..5 {
                e.push((i, j));
            }
        }
        let m = compute_syntax_metrics(&graph(5, &e), 2).unwrap();
        for n in &m.nodes {
            assert_eq!(n.mean_depth, Some(1.0));
            assert_eq!(n.ra, Some(0.0));
        }
    }

    #[test]
    fn empty_graph_rejected() {
        let g = graph(0, &[]);
        assert!(matches!(
            compute_syntax_metrics(&g, 2),
            Err(Error::EmptyGraph)
        ));
    }
}
