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

//! Scoring movement predictors against held-out visit counts.

use serde::{Deserialize, Serialize};

use crate::datagen::TrajectorySet;
use crate::error::{Error, Result};
use crate::irl::IrlResult;
use crate::syntax::SyntaxMetrics;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeComparison {
    pub node_id: usize,
    pub test_count: u64,
    /// `None` where the syntax score is undefined; such nodes are excluded from both coefficients.
    pub syntax_score: Option<f64>,
    pub irl_svf: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub pearson_syntax: f64,
    pub pearson_irl: f64,
    pub n_nodes_used: usize,
    pub per_node: Vec<NodeComparison>,
}

/// Occurrences of every node across the trajectories, revisits included.
pub fn visit_counts(d: &TrajectorySet, node_count: usize) -> Vec<u64> {
    let mut counts = vec![0u64; node_count];
    for z in &d.trajectories {
        for n in &z.nodes {
            counts[n.index()] += 1;
        }
    }
    counts
}

/// Pearson product-moment correlation.
pub fn pearson_r(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "lengths {} and {}",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 3 {
        return Err(Error::DegenerateInput(format!(
            "need at least 3 points, got {}",
            x.len()
        )));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::DegenerateInput("non-finite value".into()));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::DegenerateInput("zero variance".into()));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Correlates the syntax score and the IRL visitation mass with the test
/// set's visit counts over the nodes where the syntax score is defined.
pub fn compare_methods(
    m: &SyntaxMetrics,
    r: &IrlResult,
    test: &TrajectorySet,
) -> Result<EvalReport> {
    let n = m.len();
    if r.svf.len() != n {
        return Err(Error::GraphMismatch(format!(
            "syntax metrics cover {n} nodes, model covers {}",
            r.svf.len()
        )));
    }
    if let Some(bad) = test
        .trajectories
        .iter()
        .flat_map(|z| &z.nodes)
        .find(|id| id.index() >= n)
    {
        return Err(Error::GraphMismatch(format!(
            "test set visits node {bad} outside the graph"
        )));
    }
    let counts = visit_counts(test, n);
    let per_node: Vec<NodeComparison> = (0..n)
        .map(|i| NodeComparison {
            node_id: i,
            test_count: counts[i],
            syntax_score: m.nodes[i].score,
            irl_svf: r.svf[i],
        })
        .collect();

    let used: Vec<&NodeComparison> = per_node
        .iter()
        .filter(|c| c.syntax_score.is_some())
        .collect();
    let observed: Vec<f64> = used.iter().map(|c| c.test_count as f64).collect();
    let syntax: Vec<f64> = used.iter().map(|c| c.syntax_score.unwrap()).collect();
    let irl: Vec<f64> = used.iter().map(|c| c.irl_svf).collect();

    Ok(EvalReport {
        pearson_syntax: pearson_r(&syntax, &observed)?,
        pearson_irl: pearson_r(&irl, &observed)?,
        n_nodes_used: used.len(),
        per_node,
    })
}
