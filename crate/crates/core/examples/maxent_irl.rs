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

//! Recovers state rewards from demonstrations with maximum entropy IRL.
//!
//! Run with `cargo run --example maxent_irl`.

use pedflow::irl::{backward_policy, train_maxent, TrainConfig};
use pedflow::mdp::{FeatureMode, MdpModel, Padding, Trajectory};
use pedflow::{ConnectivityGraph, NodeId};

fn main() -> pedflow::Result<()> {
    // A ring of six nodes where walkers keep passing through node 3.
    let edges: Vec<_> = (0..6).map(|i| (i, (i + 1) % 6, 1.0)).collect();
    let g = ConnectivityGraph::build(6, &edges, None)?;
    let demos = [
        Trajectory::from_indices(&[1, 2, 3, 4]),
        Trajectory::from_indices(&[2, 3, 4]),
        Trajectory::from_indices(&[5, 4, 3, 2]),
        Trajectory::from_indices(&[0, 5, 4, 3]),
    ];

    let horizon = demos.iter().map(|z| z.len() - 1).max().unwrap();
    let m = MdpModel::with_padding(&g, 1.0, horizon, FeatureMode::OneHot, Padding::EndState)?;
    let r = train_maxent(&m, &demos, &TrainConfig::default())?;

    let last = r.history.last().unwrap();
    println!(
        "{} iterations, final gradient L1 {:.2e}",
        r.history.len(),
        last.grad_l1
    );
    for (s, (theta, svf)) in r.theta_star.0.iter().zip(&r.svf).enumerate() {
        println!("node {s}: reward {theta:+.3}, expected visits {svf:.3}");
    }
    println!("expected steps spent after leaving: {:.3}", r.end_mass);

    let policy = backward_policy(&m, &r.theta_star)?;
    let actions = m.actions(NodeId(2));
    for (a, p) in actions.iter().zip(policy.probs(0, NodeId(2))) {
        println!("from node 2 at t=0: {a:?} with probability {p:.3}");
    }
    Ok(())
}
