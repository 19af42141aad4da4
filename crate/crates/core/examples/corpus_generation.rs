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

//! Synthetic pedestrian traces: shortest routes between random node pairs,
//! then a seeded train/test split.
//!
//! Run with `cargo run --example corpus_generation`.

use pedflow::datagen::{generate_corpus, grid_graph, split_corpus};
use pedflow::eval::visit_counts;

fn main() -> pedflow::Result<()> {
    let g = grid_graph(6, 6)?;
    let corpus = generate_corpus(&g, 50, 42)?;
    let (train, test) = split_corpus(&corpus, 40, 10, 42)?;

    let first: Vec<_> = corpus.trajectories[0]
        .nodes
        .iter()
        .map(|n| n.index())
        .collect();
    println!("first route: {first:?}");
    println!(
        "{} train / {} test, longest route {} steps",
        train.len(),
        test.len(),
        corpus.max_steps()
    );

    let counts = visit_counts(&train, g.node_count());
    for row in counts.chunks(6) {
        println!(
            "{}",
            row.iter().map(|c| format!("{c:>4}")).collect::<String>()
        );
    }
    Ok(())
}
