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

//! Shared helpers for the integration tests: random graphs and brute-force
//! reference implementations that share no code with the library.

#![allow(dead_code, clippy::needless_range_loop)]

use pedflow::irl::RewardWeights;
use pedflow::mdp::{FeatureMode, MdpModel, Padding, Trajectory};
use pedflow::{ConnectivityGraph, NodeId};
use rand::seq::SliceRandom;
use rand::Rng;

pub const PADDINGS: [Padding; 2] = [Padding::Stay, Padding::EndState];

/// Random connected graph on `n` nodes: a random spanning tree plus each
/// remaining pair with probability `extra`.
pub fn random_connected<R: Rng>(rng: &mut R, n: usize, extra: f64) -> ConnectivityGraph {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = Vec::new();
    let mut present = vec![vec![false; n]; n];
    for i in 1..n {
        let parent = order[rng.gen_range(0..i)];
        let child = order[i];
        edges.push((parent, child, 1.0));
        present[parent][child] = true;
        present[child][parent] = true;
    }
    for u in 0..n {
        for v in u + 1..n {
            if !present[u][v] && rng.gen_bool(extra) {
                edges.push((u, v, 1.0));
            }
        }
    }
    ConnectivityGraph::build(n, &edges, None).unwrap()
}

/// All-pairs hop counts by Floyd-Warshall; `usize::MAX` when unreachable.
pub fn floyd_hops(g: &ConnectivityGraph) -> Vec<Vec<usize>> {
    let n = g.node_count();
    let inf = usize::MAX;
    let mut d = vec![vec![inf; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for e in g.edges() {
        d[e.u.index()][e.v.index()] = 1;
        d[e.v.index()][e.u.index()] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] != inf && d[k][j] != inf && d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    d
}

pub fn model(g: &ConnectivityGraph, h: usize, padding: Padding) -> MdpModel {
    MdpModel::with_padding(g, 1.0, h, FeatureMode::OneHot, padding).unwrap()
}

pub fn random_theta<R: Rng>(rng: &mut R, dim: usize, scale: f64) -> RewardWeights {
    RewardWeights((0..dim).map(|_| rng.gen_range(-scale..=scale)).collect())
}

/// Random probability vector over `n` entries, some of them zero.
pub fn random_distribution<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut p: Vec<f64> = (0..n)
        .map(|_| {
            if rng.gen_bool(0.3) {
                0.0
            } else {
                rng.gen::<f64>()
            }
        })
        .collect();
    if p.iter().all(|&x| x == 0.0) {
        p[rng.gen_range(0..n)] = 1.0;
    }
    let total: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= total);
    p
}

/// Random walk on graph nodes with between 2 and `max_states` states.
pub fn random_walk<R: Rng>(rng: &mut R, g: &ConnectivityGraph, max_states: usize) -> Trajectory {
    let len = rng.gen_range(2..=max_states);
    let mut nodes = vec![NodeId(rng.gen_range(0..g.node_count()))];
    while nodes.len() < len {
        let here = *nodes.last().unwrap();
        let nbrs = g.neighbors(here);
        let next = if nbrs.is_empty() || rng.gen_bool(0.2) {
            here
        } else {
            nbrs[rng.gen_range(0..nbrs.len())].0
        };
        nodes.push(next);
    }
    Trajectory::new(nodes)
}

/// Pearson r straight from the definition, in one pass over sums.
pub fn pearson_direct(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum::<f64>().sqrt();
    let sy: f64 = y.iter().map(|b| (b - my).powi(2)).sum::<f64>().sqrt();
    cov / (sx * sy)
}
