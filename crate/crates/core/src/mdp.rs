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

//! Deterministic finite-horizon MDP over a connectivity graph.
//!
//! States are graph nodes. From every state the agent may move to any
//! adjacent node or stay put; transitions are point masses.
//!
//! With [`Padding::EndState`] the model gains one extra absorbing state,
//! numbered after the graph nodes, whose feature row is zero. Every node
//! can step into it with [`Action::End`]; a demonstration is then padded
//! with end states rather than by lingering at its last node.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{ConnectivityGraph, NodeId};

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Action {
    Stay,
    Move(NodeId),
    /// Leave the graph for the absorbing end state.
    End,
}

/// How demonstrations shorter than the horizon are extended.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, Hash)]
pub enum Padding {
    /// Repeat the final node through `stay` steps.
    #[default]
    Stay,
    /// Append the zero-feature absorbing end state.
    EndState,
}

impl std::fmt::Display for Padding {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Padding::Stay => "stay",
            Padding::EndState => "end-state",
        })
    }
}

impl std::str::FromStr for Padding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stay" => Ok(Padding::Stay),
            "end-state" => Ok(Padding::EndState),
            _ => Err(Error::InvalidConfig(format!(
                "padding {s:?}: expected \"stay\" or \"end-state\""
            ))),
        }
    }
}

/// Row-major `rows × cols` matrix of per-state features.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl FeatureMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a {rows}x{cols} feature matrix",
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|x| !x.is_finite()) {
            return Err(Error::DimensionMismatch(format!(
                "feature entry ({}, {}) is not finite",
                i / cols.max(1),
                i % cols.max(1)
            )));
        }
        Ok(FeatureMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged feature rows".into()));
        }
        Self::new(rows.len(), cols, rows.concat())
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        FeatureMatrix {
            rows: n,
            cols: n,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// `F · theta`, one value per row.
    pub fn mul_vec(&self, theta: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(theta).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `Fᵀ · weights`, one value per column.
    pub fn transpose_mul_vec(&self, weights: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for (r, &w) in weights.iter().enumerate() {
            if w == 0.0 {
                continue;
            }
            for (o, f) in out.iter_mut().zip(self.row(r)) {
                *o += w * f;
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub enum FeatureMode {
    /// Identity features: one indicator per state.
    #[default]
    OneHot,
    Custom(FeatureMatrix),
}

/// An ordered node sequence.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Trajectory {
    pub nodes: Vec<NodeId>,
}

impl Trajectory {
    pub fn new(nodes: Vec<NodeId>) -> Self {
        Trajectory { nodes }
    }

    pub fn from_indices(idx: &[usize]) -> Self {
        Trajectory {
            nodes: idx.iter().copied().map(NodeId).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn start(&self) -> Option<NodeId> {
        self.nodes.first().copied()
    }

    /// Extends the trajectory to `states` entries by repeating its last node.
    pub fn padded(&self, states: usize) -> Trajectory {
        let mut nodes = self.nodes.clone();
        if let Some(&last) = nodes.last() {
            nodes.resize(states.max(nodes.len()), last);
        }
        Trajectory { nodes }
    }

    /// Checks ids are in range and every step is a move along an edge or a stay.
    pub fn validate(&self, g: &ConnectivityGraph) -> Result<()> {
        if self.nodes.is_empty() {
            return Err(Error::InvalidTrajectory("empty trajectory".into()));
        }
        if let Some(n) = self.nodes.iter().find(|n| !g.contains(**n)) {
            return Err(Error::InvalidTrajectory(format!("node {n} not in graph")));
        }
        for w in self.nodes.windows(2) {
            if w[0] != w[1] && !g.is_adjacent(w[0], w[1]) {
                return Err(Error::InvalidTrajectory(format!(
                    "{} and {} are not adjacent",
                    w[0], w[1]
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MdpModel {
    actions: Vec<Vec<Action>>,
    gamma: f64,
    features: FeatureMatrix,
    horizon: usize,
    graph_nodes: usize,
    padding: Padding,
}

impl MdpModel {
    /// Derives the MDP from `g`.
    ///
    /// Each state gets `Stay` followed by one `Move` per neighbour in
    /// ascending id order.
    pub fn from_graph(
        g: &ConnectivityGraph,
        gamma: f64,
        horizon: usize,
        feature_mode: FeatureMode,
    ) -> Result<Self> {
        Self::with_padding(g, gamma, horizon, feature_mode, Padding::Stay)
    }

    /// Like [`MdpModel::from_graph`]. Under [`Padding::EndState`] every node
    /// also gets a trailing `End` action and the end state only `Stay`.
    pub fn with_padding(
        g: &ConnectivityGraph,
        gamma: f64,
        horizon: usize,
        feature_mode: FeatureMode,
        padding: Padding,
    ) -> Result<Self> {
        let n = g.node_count();
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        if horizon == 0 {
            return Err(Error::InvalidConfig("horizon must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&gamma) {
            return Err(Error::InvalidConfig(format!(
                "gamma {gamma} outside [0, 1]"
            )));
        }
        let mut features = match feature_mode {
            FeatureMode::OneHot => FeatureMatrix::identity(n),
            FeatureMode::Custom(f) => {
                if f.rows() != n {
                    return Err(Error::DimensionMismatch(format!(
                        "feature matrix has {} rows for {n} states",
                        f.rows()
                    )));
                }
                f
            }
        };
        let end = padding == Padding::EndState;
        let mut actions: Vec<Vec<Action>> = g
            .nodes()
            .map(|s| {
                std::iter::once(Action::Stay)
                    .chain(g.neighbors(s).iter().map(|&(v, _)| Action::Move(v)))
                    .chain(end.then_some(Action::End))
                    .collect()
            })
            .collect();
        if end {
            actions.push(vec![Action::Stay]);
            features.rows += 1;
            features.data.resize(features.rows * features.cols, 0.0);
        }
        Ok(MdpModel {
            actions,
            gamma,
            features,
            horizon,
            graph_nodes: n,
            padding,
        })
    }

    /// Graph nodes plus the end state, if any.
    pub fn num_states(&self) -> usize {
        self.actions.len()
    }

    /// States that correspond to graph nodes; they come first.
    pub fn num_graph_states(&self) -> usize {
        self.graph_nodes
    }

    pub fn padding(&self) -> Padding {
        self.padding
    }

    pub fn end_state(&self) -> Option<NodeId> {
        (self.padding == Padding::EndState).then_some(NodeId(self.graph_nodes))
    }

    /// Extends `z` to `states` entries according to the padding mode.
    pub fn pad(&self, z: &Trajectory, states: usize) -> Trajectory {
        match self.end_state() {
            None => z.padded(states),
            Some(e) => {
                let mut nodes = z.nodes.clone();
                nodes.resize(states.max(nodes.len()), e);
                Trajectory { nodes }
            }
        }
    }

    pub fn states(&self) -> impl Iterator<Item = NodeId> {
        (0..self.actions.len()).map(NodeId)
    }

    pub fn actions(&self, s: NodeId) -> &[Action] {
        &self.actions[s.index()]
    }

    #[inline]
    pub fn transition(&self, s: NodeId, a: Action) -> NodeId {
        match a {
            Action::Stay => s,
            Action::Move(t) => t,
            Action::End => NodeId(self.graph_nodes),
        }
    }

    /// Successor states of `s`, aligned with [`MdpModel::actions`].
    pub fn successors(&self, s: NodeId) -> impl Iterator<Item = NodeId> + '_ {
        self.actions[s.index()]
            .iter()
            .map(move |&a| self.transition(s, a))
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn with_horizon(mut self, horizon: usize) -> Result<Self> {
        if horizon == 0 {
            return Err(Error::InvalidConfig("horizon must be at least 1".into()));
        }
        self.horizon = horizon;
        Ok(self)
    }

    pub fn features(&self) -> &FeatureMatrix {
        &self.features
    }

    pub fn feature_dim(&self) -> usize {
        self.features.cols()
    }

    fn can_step(&self, from: NodeId, to: NodeId) -> bool {
        self.actions[from.index()]
            .iter()
            .any(|&a| self.transition(from, a) == to)
    }

    pub fn validate_trajectory(&self, z: &Trajectory) -> Result<()> {
        if z.is_empty() {
            return Err(Error::InvalidTrajectory("empty trajectory".into()));
        }
        if let Some(n) = z.nodes.iter().find(|n| n.index() >= self.num_states()) {
            return Err(Error::InvalidTrajectory(format!("node {n} not in model")));
        }
        for w in z.nodes.windows(2) {
            if !self.can_step(w[0], w[1]) {
                return Err(Error::InvalidTrajectory(format!(
                    "{} and {} are not adjacent",
                    w[0], w[1]
                )));
            }
        }
        Ok(())
    }

    /// Sum of feature rows over every visited state, revisits included.
    pub fn path_feature_counts(&self, z: &Trajectory) -> Result<Vec<f64>> {
        self.validate_trajectory(z)?;
        let mut out = vec![0.0; self.feature_dim()];
        for s in &z.nodes {
            for (o, f) in out.iter_mut().zip(self.features.row(s.index())) {
                *o += f;
            }
        }
        Ok(out)
    }
}
