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

//! Maximum entropy inverse reinforcement learning on a fixed horizon.
//!
//! Paths are sequences of exactly `H + 1` states. Under reward weights
//! `theta`, a path `ζ` starting at `s0` has probability
//!
//! ```text
//! P(ζ | theta, s0) = exp(thetaᵀ F_ζ) / Z(theta, s0)
//! ```
//!
//! where `F_ζ` sums the feature rows of every state on the path and the
//! partition function runs over every realizable path from `s0`. The
//! backward pass computes `log Z` by dynamic programming and yields the
//! time-indexed policy whose rollouts reproduce that distribution exactly;
//! the forward pass turns the policy into expected state visitation mass.
//!
//! Demonstrations shorter than `H + 1` states are padded so expert and
//! learner feature counts carry equal mass: by staying at their final node,
//! or by stepping into the absorbing end state (see [`crate::mdp::Padding`]).

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::mdp::{MdpModel, Padding, Trajectory};

/// Tolerance on `Σ p0 = 1`.
pub const DISTRIBUTION_TOLERANCE: f64 = 1e-9;

/// Upper bound on sequences visited by [`enumerate_path_distribution`].
pub const ENUMERATION_LIMIT: u128 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RewardWeights(pub Vec<f64>);

impl RewardWeights {
    pub fn zeros(dim: usize) -> Self {
        RewardWeights(vec![0.0; dim])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Time-indexed action probabilities, `probs[t][s][a]` for `t < H`.
///
/// Action indices follow [`MdpModel::actions`].
#[derive(Clone, Debug, PartialEq)]
pub struct StochasticPolicy {
    probs: Vec<Vec<Vec<f64>>>,
}

impl StochasticPolicy {
    /// Wraps an externally built table, checking shape and normalization.
    pub fn new(m: &MdpModel, probs: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        if probs.len() != m.horizon() {
            return Err(Error::DimensionMismatch(format!(
                "policy has {} steps, horizon is {}",
                probs.len(),
                m.horizon()
            )));
        }
        for (t, step) in probs.iter().enumerate() {
            if step.len() != m.num_states() {
                return Err(Error::DimensionMismatch(format!(
                    "policy step {t} has wrong state count"
                )));
            }
            for (s, row) in step.iter().enumerate() {
                if row.len() != m.actions(NodeId(s)).len() {
                    return Err(Error::DimensionMismatch(format!(
                        "policy row ({t}, {s}) has wrong action count"
                    )));
                }
                let total: f64 = row.iter().sum();
                if row.iter().any(|&p| p.is_nan() || p < 0.0)
                    || (total - 1.0).abs() > DISTRIBUTION_TOLERANCE
                {
                    return Err(Error::InvalidDistribution(format!(
                        "policy row ({t}, {s}) is not a distribution"
                    )));
                }
            }
        }
        Ok(StochasticPolicy { probs })
    }

    pub fn horizon(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self, t: usize, s: NodeId) -> &[f64] {
        &self.probs[t][s.index()]
    }

    pub fn table(&self) -> &[Vec<Vec<f64>>] {
        &self.probs
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub iterations: usize,
    pub eta0: f64,
    pub decay: f64,
    pub seed: u64,
    pub tolerance: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            iterations: 100,
            eta0: 1.0,
            decay: 0.97,
            seed: 0,
            tolerance: 1e-6,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(Error::InvalidConfig("iterations must be at least 1".into()));
        }
        if !(self.eta0.is_finite() && self.eta0 > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "eta0 {} must be positive",
                self.eta0
            )));
        }
        if !(self.decay > 0.0 && self.decay <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "decay {} outside (0, 1]",
                self.decay
            )));
        }
        if self.tolerance.is_nan() || self.tolerance < 0.0 {
            return Err(Error::InvalidConfig(
                "tolerance must be non-negative".into(),
            ));
        }
        Ok(())
    }

    /// Step size of the 1-based iteration `n`.
    pub fn learning_rate(&self, n: usize) -> f64 {
        self.eta0 * self.decay.powi((n - 1) as i32)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// L1 norm of the expert-minus-learner feature expectation.
    pub grad_l1: f64,
    pub learning_rate: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IrlResult {
    pub theta_star: RewardWeights,
    /// Expected visitation mass per graph node.
    pub svf: Vec<f64>,
    /// Mass spent in the end state; zero under stay padding. Together with
    /// `svf` it sums to `horizon + 1`.
    pub end_mass: f64,
    pub padding: Padding,
    pub history: Vec<IterationRecord>,
    pub horizon: usize,
}

fn logsumexp(xs: impl Iterator<Item = f64> + Clone) -> f64 {
    let max = xs.clone().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + xs.map(|x| (x - max).exp()).sum::<f64>().ln()
}

fn state_rewards(m: &MdpModel, w: &RewardWeights) -> Result<Vec<f64>> {
    if w.0.len() != m.feature_dim() {
        return Err(Error::DimensionMismatch(format!(
            "theta has {} entries, features have {}",
            w.0.len(),
            m.feature_dim()
        )));
    }
    if w.0.iter().any(|x| !x.is_finite()) {
        return Err(Error::NumericalOverflow { iteration: None });
    }
    let r = m.features().mul_vec(&w.0);
    if r.iter().any(|x| !x.is_finite()) {
        return Err(Error::NumericalOverflow { iteration: None });
    }
    Ok(r)
}

/// Soft backward pass. Returns the policy and `V_0(s) = log Z(theta, s)`.
fn soft_backward(m: &MdpModel, w: &RewardWeights) -> Result<(StochasticPolicy, Vec<f64>)> {
    let reward = state_rewards(m, w)?;
    let h = m.horizon();
    let mut value = reward.clone();
    let mut probs = vec![Vec::new(); h];
    for t in (0..h).rev() {
        let mut next_value = Vec::with_capacity(m.num_states());
        let mut step = Vec::with_capacity(m.num_states());
        for s in m.states() {
            let q: Vec<f64> = m
                .successors(s)
                .map(|s2| reward[s.index()] + value[s2.index()])
                .collect();
            let v = logsumexp(q.iter().copied());
            if !v.is_finite() {
                return Err(Error::NumericalOverflow { iteration: None });
            }
            step.push(q.iter().map(|&qa| (qa - v).exp()).collect());
            next_value.push(v);
        }
        probs[t] = step;
        value = next_value;
    }
    Ok((StochasticPolicy { probs }, value))
}

/// Time-indexed maximum entropy policy for reward weights `w`.
pub fn backward_policy(m: &MdpModel, w: &RewardWeights) -> Result<StochasticPolicy> {
    soft_backward(m, w).map(|(p, _)| p)
}

/// `log Z(theta, s)` for every start state.
pub fn log_partition(m: &MdpModel, w: &RewardWeights) -> Result<Vec<f64>> {
    soft_backward(m, w).map(|(_, v)| v)
}

fn check_distribution(p0: &[f64], n: usize) -> Result<()> {
    if p0.len() != n {
        return Err(Error::InvalidDistribution(format!(
            "{} entries for {n} states",
            p0.len()
        )));
    }
    if p0.iter().any(|&p| !(p.is_finite() && p >= 0.0)) {
        return Err(Error::InvalidDistribution(
            "negative or non-finite entry".into(),
        ));
    }
    let total: f64 = p0.iter().sum();
    if (total - 1.0).abs() > DISTRIBUTION_TOLERANCE {
        return Err(Error::InvalidDistribution(format!(
            "entries sum to {total}"
        )));
    }
    Ok(())
}

/// Expected visitation mass `Σ_{t=0..H} D_t(s)` when starting from `p0`.
pub fn expected_svf(m: &MdpModel, p: &StochasticPolicy, p0: &[f64]) -> Result<Vec<f64>> {
    let n = m.num_states();
    check_distribution(p0, n)?;
    if p.probs.iter().any(|step| step.len() != n) {
        return Err(Error::DimensionMismatch(
            "policy does not match model".into(),
        ));
    }
    let mut current = p0.to_vec();
    let mut svf = current.clone();
    for step in &p.probs {
        let mut next = vec![0.0; n];
        for s in m.states() {
            let mass = current[s.index()];
            if mass == 0.0 {
                continue;
            }
            for (s2, pa) in m.successors(s).zip(&step[s.index()]) {
                next[s2.index()] += mass * pa;
            }
        }
        for (acc, x) in svf.iter_mut().zip(&next) {
            *acc += x;
        }
        current = next;
    }
    Ok(svf)
}

fn check_demonstrations(m: &MdpModel, demos: &[Trajectory], horizon: usize) -> Result<()> {
    if demos.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    for (index, z) in demos.iter().enumerate() {
        m.validate_trajectory(z)?;
        if z.len() > horizon + 1 {
            return Err(Error::TrajectoryTooLong {
                index,
                states: z.len(),
                max: horizon + 1,
            });
        }
    }
    Ok(())
}

/// Mean feature counts of the demonstrations, each padded to `horizon + 1` states.
pub fn expert_feature_expectation(
    m: &MdpModel,
    demos: &[Trajectory],
    horizon: usize,
) -> Result<Vec<f64>> {
    check_demonstrations(m, demos, horizon)?;
    let mut acc = vec![0.0; m.feature_dim()];
    for z in demos {
        let counts = m.path_feature_counts(&m.pad(z, horizon + 1))?;
        for (a, c) in acc.iter_mut().zip(counts) {
            *a += c;
        }
    }
    let scale = 1.0 / demos.len() as f64;
    acc.iter_mut().for_each(|a| *a *= scale);
    Ok(acc)
}

/// Empirical distribution of demonstration start states.
pub fn start_distribution(demos: &[Trajectory], num_states: usize) -> Result<Vec<f64>> {
    if demos.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut p0 = vec![0.0; num_states];
    for z in demos {
        let s = z
            .start()
            .ok_or_else(|| Error::InvalidTrajectory("empty trajectory".into()))?;
        if s.index() >= num_states {
            return Err(Error::InvalidTrajectory(format!("node {s} not in model")));
        }
        p0[s.index()] += 1.0;
    }
    let scale = 1.0 / demos.len() as f64;
    p0.iter_mut().for_each(|p| *p *= scale);
    Ok(p0)
}

/// `F̃ - Fᵀ svf(theta)`, the gradient of the mean log-likelihood.
pub fn likelihood_gradient(
    m: &MdpModel,
    w: &RewardWeights,
    f_expert: &[f64],
    p0: &[f64],
) -> Result<Vec<f64>> {
    if f_expert.len() != m.feature_dim() {
        return Err(Error::DimensionMismatch(format!(
            "expert features have {} entries, model has {}",
            f_expert.len(),
            m.feature_dim()
        )));
    }
    let policy = backward_policy(m, w)?;
    let svf = expected_svf(m, &policy, p0)?;
    let learner = m.features().transpose_mul_vec(&svf);
    Ok(f_expert.iter().zip(learner).map(|(e, l)| e - l).collect())
}

/// Mean log-probability of the padded demonstrations, conditioned on their start states.
pub fn log_likelihood(m: &MdpModel, w: &RewardWeights, demos: &[Trajectory]) -> Result<f64> {
    let horizon = m.horizon();
    check_demonstrations(m, demos, horizon)?;
    let log_z = log_partition(m, w)?;
    let mut total = 0.0;
    for z in demos {
        let counts = m.path_feature_counts(&m.pad(z, horizon + 1))?;
        let score: f64 = counts.iter().zip(&w.0).map(|(f, t)| f * t).sum();
        total += score - log_z[z.nodes[0].index()];
    }
    Ok(total / demos.len() as f64)
}

/// Exact path distribution by brute-force enumeration.
///
/// Every realizable `(H + 1)`-state sequence from every start with
/// `p0(s) > 0` is weighted by `exp(thetaᵀ F_ζ)`, normalized per start, and
/// scaled by `p0(s)`. Intended as a test oracle for small models.
pub fn enumerate_path_distribution(
    m: &MdpModel,
    w: &RewardWeights,
    p0: &[f64],
) -> Result<BTreeMap<Trajectory, f64>> {
    let n = m.num_states();
    check_distribution(p0, n)?;
    let bound = (n as u128)
        .checked_pow(m.horizon() as u32 + 1)
        .unwrap_or(u128::MAX);
    if bound > ENUMERATION_LIMIT {
        return Err(Error::TooLarge(bound));
    }
    let reward = state_rewards(m, w)?;

    let mut out = BTreeMap::new();
    for s0 in m.states().filter(|s| p0[s.index()] > 0.0) {
        let mut paths: Vec<(Vec<NodeId>, f64)> = Vec::new();
        let mut stack = vec![(vec![s0], reward[s0.index()])];
        while let Some((seq, score)) = stack.pop() {
            if seq.len() == m.horizon() + 1 {
                paths.push((seq, score));
                continue;
            }
            let last = *seq.last().unwrap();
            for s2 in m.successors(last) {
                let mut next = seq.clone();
                next.push(s2);
                stack.push((next, score + reward[s2.index()]));
            }
        }
        let lse = logsumexp(paths.iter().map(|(_, sc)| *sc));
        for (seq, score) in paths {
            *out.entry(Trajectory::new(seq)).or_insert(0.0) += p0[s0.index()] * (score - lse).exp();
        }
    }
    Ok(out)
}

/// Gradient ascent on the mean log-likelihood of the demonstrations.
///
/// `m.horizon()` must cover the longest demonstration. Starting weights are
/// drawn uniformly from `[-0.01, 0.01]` with `cfg.seed`; iteration `n` steps
/// with `eta0 * decay^(n-1)`. Stops after `cfg.iterations` or as soon as the
/// gradient's L1 norm drops below `cfg.tolerance`.
pub fn train_maxent(m: &MdpModel, demos: &[Trajectory], cfg: &TrainConfig) -> Result<IrlResult> {
    cfg.validate()?;
    let horizon = m.horizon();
    let f_expert = expert_feature_expectation(m, demos, horizon)?;
    let p0 = start_distribution(demos, m.num_states())?;

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut theta = RewardWeights(
        (0..m.feature_dim())
            .map(|_| rng.gen_range(-0.01..=0.01))
            .collect(),
    );

    let with_iteration = |e: Error, n: usize| match e {
        Error::NumericalOverflow { .. } => Error::NumericalOverflow { iteration: Some(n) },
        other => other,
    };

    let mut history = Vec::with_capacity(cfg.iterations);
    for n in 1..=cfg.iterations {
        let grad =
            likelihood_gradient(m, &theta, &f_expert, &p0).map_err(|e| with_iteration(e, n))?;
        let grad_l1: f64 = grad.iter().map(|g| g.abs()).sum();
        let learning_rate = cfg.learning_rate(n);
        history.push(IterationRecord {
            iteration: n,
            grad_l1,
            learning_rate,
        });
        if grad_l1 < cfg.tolerance {
            break;
        }
        for (t, g) in theta.0.iter_mut().zip(&grad) {
            *t += learning_rate * g;
        }
        if theta.0.iter().any(|t| !t.is_finite()) {
            return Err(Error::NumericalOverflow { iteration: Some(n) });
        }
    }

    let policy = backward_policy(m, &theta).map_err(|e| with_iteration(e, history.len()))?;
    let mut svf = expected_svf(m, &policy, &p0)?;
    let end_mass = svf.drain(m.num_graph_states()..).sum();
    Ok(IrlResult {
        theta_star: theta,
        svf,
        end_mass,
        padding: m.padding(),
        history,
        horizon,
    })
}
