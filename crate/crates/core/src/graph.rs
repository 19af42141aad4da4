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

//! Undirected street connectivity graph.
//!
//! Two distance notions live on the same graph: hop counts from
//! [`ConnectivityGraph::bfs_depths`] (topological depth, edge weights
//! ignored) and weighted routes from [`ConnectivityGraph::dijkstra_path`].

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense node index, `0..node_count`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub usize);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<usize> for NodeId {
    fn from(i: usize) -> Self {
        NodeId(i)
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatLon {
    pub lat: f64,
    pub lon: f64,
}

/// Undirected edge stored with `u < v`.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Edge {
    pub u: NodeId,
    pub v: NodeId,
    pub w: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConnectivityGraph {
    node_count: usize,
    edges: Vec<Edge>,
    // neighbours sorted by id
    adj: Vec<Vec<(NodeId, f64)>>,
    coords: Option<Vec<LatLon>>,
}

impl ConnectivityGraph {
    /// Validates an edge list and builds the graph.
    ///
    /// Edges are normalized to `u < v` and sorted, so two graphs built from
    /// the same undirected edge set compare equal regardless of input order.
    pub fn build(
        node_count: usize,
        edge_list: &[(usize, usize, f64)],
        coords: Option<Vec<LatLon>>,
    ) -> Result<Self> {
        if let Some(c) = &coords {
            if c.len() != node_count {
                return Err(Error::DimensionMismatch(format!(
                    "{} coordinates for {} nodes",
                    c.len(),
                    node_count
                )));
            }
        }
        let mut seen = HashSet::with_capacity(edge_list.len());
        let mut edges = Vec::with_capacity(edge_list.len());
        for &(u, v, w) in edge_list {
            let invalid = |reason| Error::InvalidEdge { u, v, w, reason };
            if u >= node_count || v >= node_count {
                return Err(invalid("endpoint out of range"));
            }
            if u == v {
                return Err(invalid("self-loop"));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(invalid("weight must be finite and positive"));
            }
            let (a, b) = if u < v { (u, v) } else { (v, u) };
            if !seen.insert((a, b)) {
                return Err(Error::DuplicateEdge { u: a, v: b });
            }
            edges.push(Edge {
                u: NodeId(a),
                v: NodeId(b),
                w,
            });
        }
        edges.sort_by_key(|e| (e.u, e.v));

        let mut adj = vec![Vec::new(); node_count];
        for e in &edges {
            adj[e.u.0].push((e.v, e.w));
            adj[e.v.0].push((e.u, e.w));
        }
        for list in &mut adj {
            list.sort_by_key(|&(n, _)| n);
        }
        Ok(ConnectivityGraph {
            node_count,
            edges,
            adj,
            coords,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn coords(&self) -> Option<&[LatLon]> {
        self.coords.as_deref()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.node_count).map(NodeId)
    }

    pub fn contains(&self, n: NodeId) -> bool {
        n.0 < self.node_count
    }

    /// Neighbours of `n` with edge weights, ascending by id.
    pub fn neighbors(&self, n: NodeId) -> &[(NodeId, f64)] {
        &self.adj[n.0]
    }

    pub fn degree(&self, n: NodeId) -> usize {
        self.adj[n.0].len()
    }

    pub fn is_adjacent(&self, a: NodeId, b: NodeId) -> bool {
        self.adj[a.0].binary_search_by_key(&b, |&(n, _)| n).is_ok()
    }

    pub fn edge_weight(&self, a: NodeId, b: NodeId) -> Option<f64> {
        let list = &self.adj[a.0];
        list.binary_search_by_key(&b, |&(n, _)| n)
            .ok()
            .map(|i| list[i].1)
    }

    fn check(&self, n: NodeId) -> Result<()> {
        if self.contains(n) {
            Ok(())
        } else {
            Err(Error::NodeNotFound(n))
        }
    }

    /// Hop-count depths from `source` to every node within `radius` steps.
    ///
    /// The source itself and unreachable nodes are absent from the map.
    /// `None` means unbounded radius.
    pub fn bfs_depths(
        &self,
        source: NodeId,
        radius: Option<usize>,
    ) -> Result<BTreeMap<NodeId, usize>> {
        self.check(source)?;
        let mut depth = vec![usize::MAX; self.node_count];
        let mut out = BTreeMap::new();
        let mut queue = VecDeque::new();
        depth[source.0] = 0;
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let d = depth[u.0];
            if radius.is_some_and(|r| d >= r) {
                continue;
            }
            for &(v, _) in &self.adj[u.0] {
                if depth[v.0] == usize::MAX {
                    depth[v.0] = d + 1;
                    out.insert(v, d + 1);
                    queue.push_back(v);
                }
            }
        }
        Ok(out)
    }

    /// Weighted distance from every node to `target`.
    fn distances_to(&self, target: NodeId) -> Vec<f64> {
        let mut dist = vec![f64::INFINITY; self.node_count];
        let mut heap = BinaryHeap::new();
        dist[target.0] = 0.0;
        heap.push(HeapEntry {
            cost: 0.0,
            node: target,
        });
        while let Some(HeapEntry { cost, node }) = heap.pop() {
            if cost > dist[node.0] {
                continue;
            }
            for &(next, w) in &self.adj[node.0] {
                let c = cost + w;
                if c < dist[next.0] {
                    dist[next.0] = c;
                    heap.push(HeapEntry {
                        cost: c,
                        node: next,
                    });
                }
            }
        }
        dist
    }

    /// Minimum-weight route from `src` to `dst`.
    ///
    /// Among equal-weight routes the lexicographically smallest node
    /// sequence is returned: at every step the walk takes the smallest
    /// neighbour id that still lies on a shortest route.
    pub fn dijkstra_path(&self, src: NodeId, dst: NodeId) -> Result<Vec<NodeId>> {
        self.check(src)?;
        self.check(dst)?;
        let dist = self.distances_to(dst);
        if dist[src.0].is_infinite() {
            return Err(Error::Unreachable { src, dst });
        }
        let mut path = vec![src];
        let mut cur = src;
        while cur != dst {
            // Exact float equality holds for at least the neighbour that
            // last relaxed `cur`, since the same sum was stored.
            let next = self.adj[cur.0]
                .iter()
                .find(|&&(v, w)| dist[v.0] + w == dist[cur.0])
                .map(|&(v, _)| v)
                .expect("shortest-path predecessor must exist");
            path.push(next);
            cur = next;
        }
        Ok(path)
    }

    /// Sum of edge weights along consecutive nodes, `None` if any pair is not adjacent.
    pub fn path_weight(&self, path: &[NodeId]) -> Option<f64> {
        path.windows(2).map(|p| self.edge_weight(p[0], p[1])).sum()
    }

    /// Connected components, each sorted ascending, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<NodeId>> {
        let mut comp = vec![usize::MAX; self.node_count];
        let mut out: Vec<Vec<NodeId>> = Vec::new();
        for s in 0..self.node_count {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![NodeId(s)];
            comp[s] = id;
            let mut i = 0;
            while i < members.len() {
                let u = members[i];
                for &(v, _) in &self.adj[u.0] {
                    if comp[v.0] == usize::MAX {
                        comp[v.0] = id;
                        members.push(v);
                    }
                }
                i += 1;
            }
            members.sort();
            out.push(members);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }
}

#[derive(Copy, Clone, PartialEq)]
struct HeapEntry {
    cost: f64,
    node: NodeId,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on cost, then on id
        other
            .cost
            .total_cmp(&self.cost)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
