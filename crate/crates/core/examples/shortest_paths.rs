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

//! Hop-limited BFS and weighted shortest paths.
//!
//! Run with `cargo run --example shortest_paths`.

use pedflow::{ConnectivityGraph, NodeId};

fn main() -> pedflow::Result<()> {
    // Two equal-length routes from 0 to 3; the tie goes to the one through
    // the smaller node id.
    let g = ConnectivityGraph::build(
        5,
        &[
            (0, 1, 2.0),
            (1, 3, 2.0),
            (0, 2, 1.5),
            (2, 3, 2.5),
            (3, 4, 1.0),
        ],
        None,
    )?;
    let path = g.dijkstra_path(NodeId(0), NodeId(4))?;
    let ids: Vec<_> = path.iter().map(|n| n.index()).collect();
    println!("0 -> 4: {ids:?}, length {}", g.path_weight(&path).unwrap());

    for (node, depth) in g.bfs_depths(NodeId(0), Some(2))? {
        println!("node {node} is {depth} step(s) from 0");
    }
    Ok(())
}
