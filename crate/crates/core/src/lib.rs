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

//! Predicting pedestrian movement on street connectivity graphs.
//!
//! Two predictors are computed for every node and scored against held-out
//! trajectories:
//!
//! * space-syntax local integration ([`syntax`]), a radius-limited
//!   closeness measure normalized into relative asymmetry;
//! * expected state visitation under a maximum entropy IRL reward fitted to
//!   demonstration trajectories ([`irl`]).
//!
//! [`datagen`] builds graphs (OSM extracts or lattices) and shortest-path
//! corpora, [`eval`] correlates both predictors with test visit counts and
//! [`pipeline`] chains everything with deterministic file output.

pub mod cli;
pub mod datagen;
pub mod error;
pub mod eval;
pub mod graph;
pub mod io;
pub mod irl;
pub mod mdp;
pub mod pipeline;
pub mod syntax;

pub use error::{Error, Result};
pub use graph::{ConnectivityGraph, LatLon, NodeId};
pub use mdp::{FeatureMatrix, FeatureMode, MdpModel, Trajectory};
