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

use crate::error::{Error, Result};
use crate::graph::ConnectivityGraph;

/// `width × height` lattice with unit weights; node `(x, y)` has id `y * width + x`.
pub fn grid_graph(width: usize, height: usize) -> Result<ConnectivityGraph> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidConfig(format!(
            "grid {width}x{height} is empty"
        )));
    }
    let id = |x: usize, y: usize| y * width + x;
    let mut edges = Vec::with_capacity(2 * width * height);
    for y in 0..height {
        for x in 0..width {
            if x + 1 < width {
                edges.push((id(x, y), id(x + 1, y), 1.0));
            }
            if y + 1 < height {
                edges.push((id(x, y), id(x, y + 1), 1.0));
            }
        }
    }
    ConnectivityGraph::build(width * height, &edges, None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::NodeId;

    #[test]
    fn lattice_shape() {
        let g = grid_graph(3, 2).unwrap();
        assert_eq!(g.node_count(), 6);
        assert_eq!(g.edge_count(), 7);
        assert_eq!(g.degree(NodeId(0)), 2);
        assert_eq!(g.degree(NodeId(1)), 3);
        assert!(g.is_adjacent(NodeId(1), NodeId(4)));
        assert!(g.is_connected());
        assert!(grid_graph(0, 4).is_err());
    }
}
