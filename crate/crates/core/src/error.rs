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

use std::path::PathBuf;

use thiserror::Error;

use crate::graph::NodeId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the toolkit can report.
///
/// Variants map onto two process exit codes in the CLI: numerical failures
/// (see [`Error::is_numerical`]) exit with 3, everything else with 2.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid edge ({u}, {v}, w={w}): {reason}")]
    InvalidEdge {
        u: usize,
        v: usize,
        w: f64,
        reason: &'static str,
    },
    #[error("duplicate undirected edge ({u}, {v})")]
    DuplicateEdge { u: usize, v: usize },
    #[error("node {0} is not in the graph")]
    NodeNotFound(NodeId),
    #[error("no path from {src} to {dst}")]
    Unreachable { src: NodeId, dst: NodeId },
    #[error("node {0} has no other node within the radius")]
    IsolatedNode(NodeId),
    #[error("graph has no nodes")]
    EmptyGraph,
    #[error("invalid trajectory: {0}")]
    InvalidTrajectory(String),
    #[error("demonstration set is empty")]
    EmptyCorpus,
    #[error("trajectory {index} has {states} states, horizon allows {max}")]
    TrajectoryTooLong {
        index: usize,
        states: usize,
        max: usize,
    },
    #[error("numerical overflow in backward pass{}", iteration.map(|i| format!(" at iteration {i}")).unwrap_or_default())]
    NumericalOverflow { iteration: Option<usize> },
    #[error("invalid start distribution: {0}")]
    InvalidDistribution(String),
    #[error("path enumeration would visit {0} sequences (limit 1e6)")]
    TooLarge(u128),
    #[error("malformed OSM XML: {0}")]
    MalformedXml(String),
    #[error("extract contains no highway ways")]
    NoHighways,
    #[error("graph has {0} nodes, need at least 2")]
    GraphTooSmall(usize),
    #[error("split {train}+{test} does not equal corpus size {total}")]
    BadSplit {
        train: usize,
        test: usize,
        total: usize,
    },
    #[error("degenerate correlation input: {0}")]
    DegenerateInput(String),
    #[error("inputs refer to different graphs: {0}")]
    GraphMismatch(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NumericalOverflow { .. } | Error::DegenerateInput(_)
        )
    }

    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidEdge { .. } => "InvalidEdge",
            Error::DuplicateEdge { .. } => "DuplicateEdge",
            Error::NodeNotFound(_) => "NodeNotFound",
            Error::Unreachable { .. } => "Unreachable",
            Error::IsolatedNode(_) => "IsolatedNode",
            Error::EmptyGraph => "EmptyGraph",
            Error::InvalidTrajectory(_) => "InvalidTrajectory",
            Error::EmptyCorpus => "EmptyCorpus",
            Error::TrajectoryTooLong { .. } => "TrajectoryTooLong",
            Error::NumericalOverflow { .. } => "NumericalOverflow",
            Error::InvalidDistribution(_) => "InvalidDistribution",
            Error::TooLarge(_) => "TooLarge",
            Error::MalformedXml(_) => "MalformedXml",
            Error::NoHighways => "NoHighways",
            Error::GraphTooSmall(_) => "GraphTooSmall",
            Error::BadSplit { .. } => "BadSplit",
            Error::DegenerateInput(_) => "DegenerateInput",
            Error::GraphMismatch(_) => "GraphMismatch",
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::Format { .. } => "Format",
            Error::Io { .. } => "Io",
        }
    }

    pub fn exit_code(&self) -> i32 {
        if self.is_numerical() {
            3
        } else {
            2
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            message: message.into(),
        }
    }
}
