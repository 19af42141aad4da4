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

//! Scores space syntax and IRL against held-out visit counts.
//!
//! Run with `cargo run --release --example compare_methods`.

use pedflow::datagen::{generate_corpus, grid_graph, split_corpus};
use pedflow::eval::compare_methods;
use pedflow::irl::TrainConfig;
use pedflow::mdp::{FeatureMode, Padding};
use pedflow::pipeline::train_on;
use pedflow::syntax::{compute_syntax_metrics, DEFAULT_RADIUS};

fn main() -> pedflow::Result<()> {
    let g = grid_graph(10, 10)?;
    let metrics = compute_syntax_metrics(&g, DEFAULT_RADIUS)?;
    println!("seed  syntax   irl(end-state)  irl(stay)");
    for seed in 1..=3 {
        let corpus = generate_corpus(&g, 300, seed)?;
        let (train, test) = split_corpus(&corpus, 200, 100, seed)?;
        let cfg = TrainConfig {
            seed,
            ..TrainConfig::default()
        };
        let mut row = Vec::new();
        for padding in [Padding::EndState, Padding::Stay] {
            let model = train_on(&g, &train, FeatureMode::OneHot, padding, &cfg)?;
            row.push(compare_methods(&metrics, &model, &test)?);
        }
        println!(
            "{seed:>4}  {:.3}    {:.3}           {:.3}",
            row[0].pearson_syntax, row[0].pearson_irl, row[1].pearson_irl
        );
    }
    Ok(())
}
