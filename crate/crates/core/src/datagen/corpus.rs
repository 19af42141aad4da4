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

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{ConnectivityGraph, NodeId};
use crate::mdp::Trajectory;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Train,
    Test,
    Unsplit,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Train => "train",
            Role::Test => "test",
            Role::Unsplit => "unsplit",
        })
    }
}

impl FromStr for Role {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train" => Ok(Role::Train),
            "test" => Ok(Role::Test),
            "unsplit" => Ok(Role::Unsplit),
            other => Err(Error::InvalidConfig(format!("unknown role {other:?}"))),
        }
    }
}

/// A demonstration set with the seed that generated it.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectorySet {
    pub trajectories: Vec<Trajectory>,
    pub seed: u64,
    pub role: Role,
}

impl TrajectorySet {
    pub fn len(&self) -> usize {
        self.trajectories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trajectories.is_empty()
    }

    /// Longest trajectory in steps (states minus one).
    pub fn max_steps(&self) -> usize {
        self.trajectories
            .iter()
            .map(|z| z.len().saturating_sub(1))
            .max()
            .unwrap_or(0)
    }

    /// Every trajectory has at least two states and walks along edges.
    pub fn validate(&self, g: &ConnectivityGraph) -> Result<()> {
        for (i, z) in self.trajectories.iter().enumerate() {
            if z.len() < 2 {
                return Err(Error::InvalidTrajectory(format!(
                    "trajectory {i} has fewer than 2 states"
                )));
            }
            z.validate(g)
                .map_err(|e| Error::InvalidTrajectory(format!("trajectory {i}: {e}")))?;
        }
        Ok(())
    }
}

/// Shortest routes between `count` random start/goal pairs.
///
/// Pairs are drawn uniformly from a ChaCha8 stream seeded with `seed`; a
/// draw with `start == goal` is discarded and redrawn.
pub fn generate_corpus(g: &ConnectivityGraph, count: usize, seed: u64) -> Result<TrajectorySet> {
    let n = g.node_count();
    if n < 2 {
        return Err(Error::GraphTooSmall(n));
    }
    if count == 0 {
        return Err(Error::InvalidConfig(
            "trajectory count must be at least 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut trajectories = Vec::with_capacity(count);
    while trajectories.len() < count {
        let start = NodeId(rng.gen_range(0..n));
        let goal = NodeId(rng.gen_range(0..n));
        if start == goal {
            continue;
        }
        trajectories.push(Trajectory::new(g.dijkstra_path(start, goal)?));
    }
    Ok(TrajectorySet {
        trajectories,
        seed,
        role: Role::Unsplit,
    })
}

/// Seeded shuffle followed by a train/test cut.
///
/// Both parts keep the corpus order of their members.
pub fn split_corpus(
    d: &TrajectorySet,
    train_count: usize,
    test_count: usize,
    seed: u64,
) -> Result<(TrajectorySet, TrajectorySet)> {
    if train_count.checked_add(test_count) != Some(d.len()) {
        return Err(Error::BadSplit {
            train: train_count,
            test: test_count,
            total: d.len(),
        });
    }
    let mut order: Vec<usize> = (0..d.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (train_idx, test_idx) = order.split_at_mut(train_count);
    train_idx.sort_unstable();
    test_idx.sort_unstable();
    let pick = |idx: &[usize], role| TrajectorySet {
        trajectories: idx.iter().map(|&i| d.trajectories[i].clone()).collect(),
        seed: d.seed,
        role,
    };
    Ok((pick(train_idx, Role::Train), pick(test_idx, Role::Test)))
}
