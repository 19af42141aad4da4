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

//! Local integration on a small street pattern.
//!
//! Run with `cargo run --example syntax_metrics`.

use pedflow::syntax::{compute_syntax_metrics, rank_by_integration, DEFAULT_RADIUS};
use pedflow::ConnectivityGraph;

fn main() -> pedflow::Result<()> {
    // A high street (0-1-2-3-4) with two side streets hanging off node 2.
    let edges = [(0, 1), (1, 2), (2, 3), (3, 4), (2, 5), (5, 6), (2, 7)];
    let edges: Vec<_> = edges.iter().map(|&(u, v)| (u, v, 1.0)).collect();
    let g = ConnectivityGraph::build(8, &edges, None)?;

    let m = compute_syntax_metrics(&g, DEFAULT_RADIUS)?;
    println!("node  TD  k   MD      RA");
    for (i, n) in m.nodes.iter().enumerate() {
        let show = |x: Option<f64>| x.map_or("-".to_string(), |v| format!("{v:.4}"));
        println!(
            "{i:>4} {:>3} {:>2}  {:<7} {}",
            n.total_depth,
            n.k_local,
            show(n.mean_depth),
            show(n.ra)
        );
    }
    let order: Vec<_> = rank_by_integration(&m).iter().map(|n| n.index()).collect();
    println!("most to least integrated: {order:?}");
    Ok(())
}
