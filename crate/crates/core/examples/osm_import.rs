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

//! Turns an OpenStreetMap XML extract into a junction graph.
//!
//! Run with `cargo run --example osm_import [path/to/extract.osm]`; without
//! an argument the bundled `fixtures/town.osm` is used.

use std::path::PathBuf;

use pedflow::datagen::parse_osm_extract;
use pedflow::io;

fn main() -> pedflow::Result<()> {
    let path = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/town.osm"));
    let g = io::load(&path, parse_osm_extract)?;
    println!(
        "{}: {} junctions, {} street segments",
        path.display(),
        g.node_count(),
        g.edge_count()
    );

    let total: f64 = g.edges().iter().map(|e| e.w).sum();
    println!("total street length {total:.1} m");
    let longest = g.edges().iter().max_by(|a, b| a.w.total_cmp(&b.w)).unwrap();
    println!(
        "longest segment {} - {}: {:.1} m",
        longest.u, longest.v, longest.w
    );
    Ok(())
}
