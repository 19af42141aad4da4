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

//! Artifact file formats.
//!
//! All text is UTF-8 with LF line endings. Floats are written with 17
//! significant digits in `%.17g` style, so every value reads back bit-exact.

use std::fmt::Write as _;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::value::RawValue;
use sha2::{Digest, Sha256};

use crate::datagen::{Role, TrajectorySet};
use crate::error::{Error, Result};
use crate::eval::{EvalReport, NodeComparison};
use crate::graph::{ConnectivityGraph, LatLon};
use crate::irl::{IrlResult, IterationRecord, RewardWeights, TrainConfig};
use crate::mdp::Trajectory;
use crate::syntax::{NodeMetrics, SyntaxMetrics};

/// `%.17g`: 17 significant digits, trailing zeros trimmed.
pub fn fmt_g17(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0" } else { "0" }.to_string();
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..17).contains(&exp) {
        trim_fraction(format!("{:.*}", (16 - exp) as usize, x))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!(
            "{}e{sign}{:02}",
            trim_fraction(mantissa.to_string()),
            exp.abs()
        )
    }
}

fn trim_fraction(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// A float that serializes through [`fmt_g17`]. Only meaningful with serde_json.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Float17(pub f64);

impl Serialize for Float17 {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return serializer.serialize_none();
        }
        let raw = RawValue::from_string(fmt_g17(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Float17 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        f64::deserialize(deserializer).map(Float17)
    }
}

fn floats(xs: &[f64]) -> Vec<Float17> {
    xs.iter().copied().map(Float17).collect()
}

fn unfloats(xs: &[Float17]) -> Vec<f64> {
    xs.iter().map(|f| f.0).collect()
}

fn parse_err(message: impl Into<String>) -> Error {
    Error::format("", message)
}

fn json_doc<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("artifact types serialize");
    s.push('\n');
    s
}

fn from_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub fn write_text(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

/// Reads `path` and parses it, attaching the path to format errors.
pub fn load<T>(path: &Path, parse: impl FnOnce(&str) -> Result<T>) -> Result<T> {
    let text = read_text(path)?;
    parse(&text).map_err(|e| match e {
        Error::Format { message, .. } => Error::format(path, message),
        other => other,
    })
}

// ---------------------------------------------------------------- graph.json

#[derive(Serialize, Deserialize)]
struct GraphNodeEntry {
    id: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lat: Option<Float17>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lon: Option<Float17>,
}

#[derive(Serialize, Deserialize)]
struct GraphEdgeEntry {
    u: usize,
    v: usize,
    w: Float17,
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    nodes: Vec<GraphNodeEntry>,
    edges: Vec<GraphEdgeEntry>,
}

pub fn graph_to_json(g: &ConnectivityGraph) -> String {
    let coords = g.coords();
    let nodes = g
        .nodes()
        .map(|n| GraphNodeEntry {
            id: n.index(),
            lat: coords.map(|c| Float17(c[n.index()].lat)),
            lon: coords.map(|c| Float17(c[n.index()].lon)),
        })
        .collect();
    let edges = g
        .edges()
        .iter()
        .map(|e| GraphEdgeEntry {
            u: e.u.index(),
            v: e.v.index(),
            w: Float17(e.w),
        })
        .collect();
    json_doc(&GraphFile { nodes, edges })
}

pub fn graph_from_json(text: &str) -> Result<ConnectivityGraph> {
    let file: GraphFile = from_json(text)?;
    let n = file.nodes.len();
    let mut seen = vec![false; n];
    let mut coords = vec![None; n];
    for node in &file.nodes {
        if node.id >= n || std::mem::replace(&mut seen[node.id], true) {
            return Err(parse_err(format!(
                "node ids must be unique and dense in 0..{n}, got {}",
                node.id
            )));
        }
        coords[node.id] = match (node.lat, node.lon) {
            (Some(lat), Some(lon)) => Some(LatLon {
                lat: lat.0,
                lon: lon.0,
            }),
            (None, None) => None,
            _ => {
                return Err(parse_err(format!(
                    "node {} has only one of lat/lon",
                    node.id
                )))
            }
        };
    }
    let with_coords = coords.iter().filter(|c| c.is_some()).count();
    let coords = if with_coords == 0 {
        None
    } else if with_coords == n {
        Some(coords.into_iter().map(Option::unwrap).collect())
    } else {
        return Err(parse_err(
            "either every node or no node must carry coordinates",
        ));
    };
    let edges: Vec<_> = file.edges.iter().map(|e| (e.u, e.v, e.w.0)).collect();
    ConnectivityGraph::build(n, &edges, coords)
}

/// SHA-256 of the canonical `graph.json` serialization, hex encoded.
pub fn graph_hash(g: &ConnectivityGraph) -> String {
    hex::encode(Sha256::digest(graph_to_json(g).as_bytes()))
}

// ------------------------------------------------------------- traces.jsonl

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracesHeader {
    pub seed: u64,
    pub role: Role,
    pub graph_hash: String,
}

pub fn traces_to_jsonl(d: &TrajectorySet, graph_hash: &str) -> String {
    let header = TracesHeader {
        seed: d.seed,
        role: d.role,
        graph_hash: graph_hash.to_string(),
    };
    let mut out = serde_json::to_string(&header).expect("header serializes");
    out.push('\n');
    for z in &d.trajectories {
        out.push_str(&serde_json::to_string(z).expect("trajectory serializes"));
        out.push('\n');
    }
    out
}

pub fn traces_from_jsonl(text: &str) -> Result<(TracesHeader, TrajectorySet)> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (_, first) = lines
        .next()
        .ok_or_else(|| parse_err("missing header line"))?;
    let header: TracesHeader =
        serde_json::from_str(first).map_err(|e| parse_err(format!("line 1: header: {e}")))?;
    let trajectories = lines
        .map(|(i, line)| {
            serde_json::from_str::<Trajectory>(line)
                .map_err(|e| parse_err(format!("line {}: {e}", i + 1)))
        })
        .collect::<Result<Vec<_>>>()?;
    let set = TrajectorySet {
        trajectories,
        seed: header.seed,
        role: header.role,
    };
    Ok((header, set))
}

// -------------------------------------------------------------- metrics.csv

pub const METRICS_HEADER: &str = "node_id,total_depth,k_local,closeness,mean_depth,ra,score";

fn opt_field(x: Option<f64>) -> String {
    x.map(fmt_g17).unwrap_or_default()
}

pub fn metrics_to_csv(m: &SyntaxMetrics) -> String {
    let mut out = String::from(METRICS_HEADER);
    out.push('\n');
    for (i, n) in m.nodes.iter().enumerate() {
        writeln!(
            out,
            "{i},{},{},{},{},{},{}",
            n.total_depth,
            n.k_local,
            opt_field(n.closeness),
            opt_field(n.mean_depth),
            opt_field(n.ra),
            opt_field(n.score)
        )
        .unwrap();
    }
    out
}

/// Parses `metrics.csv`. The radius is not stored in the file and must be supplied.
pub fn metrics_from_csv(text: &str, radius: usize) -> Result<SyntaxMetrics> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(METRICS_HEADER) {
        return Err(parse_err(format!("expected header {METRICS_HEADER:?}")));
    }
    let mut nodes = Vec::new();
    for (i, line) in lines.enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        let lineno = i + 2;
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 7 {
            return Err(parse_err(format!(
                "line {lineno}: expected 7 fields, got {}",
                fields.len()
            )));
        }
        let int = |s: &str| -> Result<u64> {
            s.parse()
                .map_err(|_| parse_err(format!("line {lineno}: bad integer {s:?}")))
        };
        let opt = |s: &str| -> Result<Option<f64>> {
            if s.is_empty() {
                return Ok(None);
            }
            s.parse()
                .map(Some)
                .map_err(|_| parse_err(format!("line {lineno}: bad number {s:?}")))
        };
        if int(fields[0])? as usize != nodes.len() {
            return Err(parse_err(format!(
                "line {lineno}: rows must be sorted by dense node_id"
            )));
        }
        nodes.push(NodeMetrics {
            total_depth: int(fields[1])?,
            k_local: int(fields[2])? as usize,
            closeness: opt(fields[3])?,
            mean_depth: opt(fields[4])?,
            ra: opt(fields[5])?,
            score: opt(fields[6])?,
        });
    }
    Ok(SyntaxMetrics { radius, nodes })
}

// --------------------------------------------------------------- model.json

#[derive(Serialize, Deserialize)]
struct ModelConfigEntry {
    iterations: usize,
    eta0: Float17,
    decay: Float17,
    tolerance: Float17,
    padding: String,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    theta: Vec<Float17>,
    svf: Vec<Float17>,
    end_mass: Float17,
    horizon: usize,
    seed: u64,
    config: ModelConfigEntry,
}

pub fn model_to_json(r: &IrlResult, cfg: &TrainConfig) -> String {
    json_doc(&ModelFile {
        theta: floats(&r.theta_star.0),
        svf: floats(&r.svf),
        end_mass: Float17(r.end_mass),
        horizon: r.horizon,
        seed: cfg.seed,
        config: ModelConfigEntry {
            iterations: cfg.iterations,
            eta0: Float17(cfg.eta0),
            decay: Float17(cfg.decay),
            tolerance: Float17(cfg.tolerance),
            padding: r.padding.to_string(),
        },
    })
}

/// Parses `model.json`. The training history lives in `history.csv` and comes back empty.
pub fn model_from_json(text: &str) -> Result<(IrlResult, TrainConfig)> {
    let f: ModelFile = from_json(text)?;
    let padding = f
        .config
        .padding
        .parse()
        .map_err(|e: Error| parse_err(e.to_string()))?;
    let result = IrlResult {
        theta_star: RewardWeights(unfloats(&f.theta)),
        svf: unfloats(&f.svf),
        end_mass: f.end_mass.0,
        padding,
        history: Vec::new(),
        horizon: f.horizon,
    };
    let cfg = TrainConfig {
        iterations: f.config.iterations,
        eta0: f.config.eta0.0,
        decay: f.config.decay.0,
        seed: f.seed,
        tolerance: f.config.tolerance.0,
    };
    Ok((result, cfg))
}

// -------------------------------------------------------------- history.csv

pub const HISTORY_HEADER: &str = "iter,grad_l1,learning_rate";

pub fn history_to_csv(history: &[IterationRecord]) -> String {
    let mut out = String::from(HISTORY_HEADER);
    out.push('\n');
    for rec in history {
        writeln!(
            out,
            "{},{},{}",
            rec.iteration,
            fmt_g17(rec.grad_l1),
            fmt_g17(rec.learning_rate)
        )
        .unwrap();
    }
    out
}

pub fn history_from_csv(text: &str) -> Result<Vec<IterationRecord>> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(HISTORY_HEADER) {
        return Err(parse_err(format!("expected header {HISTORY_HEADER:?}")));
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let bad = || parse_err(format!("bad history row {line:?}"));
            let mut it = line.split(',');
            let (Some(a), Some(b), Some(c), None) = (it.next(), it.next(), it.next(), it.next())
            else {
                return Err(bad());
            };
            Ok(IterationRecord {
                iteration: a.parse().map_err(|_| bad())?,
                grad_l1: b.parse().map_err(|_| bad())?,
                learning_rate: c.parse().map_err(|_| bad())?,
            })
        })
        .collect()
}

// -------------------------------------------------------------- report.json

#[derive(Serialize, Deserialize)]
struct ReportNodeEntry {
    node_id: usize,
    test_count: u64,
    syntax_score: Option<Float17>,
    irl_svf: Float17,
}

#[derive(Serialize, Deserialize)]
struct ReportFile {
    pearson_syntax: Float17,
    pearson_irl: Float17,
    n_nodes_used: usize,
    per_node: Vec<ReportNodeEntry>,
}

pub fn report_to_json(r: &EvalReport) -> String {
    json_doc(&ReportFile {
        pearson_syntax: Float17(r.pearson_syntax),
        pearson_irl: Float17(r.pearson_irl),
        n_nodes_used: r.n_nodes_used,
        per_node: r
            .per_node
            .iter()
            .map(|c| ReportNodeEntry {
                node_id: c.node_id,
                test_count: c.test_count,
                syntax_score: c.syntax_score.map(Float17),
                irl_svf: Float17(c.irl_svf),
            })
            .collect(),
    })
}

pub fn report_from_json(text: &str) -> Result<EvalReport> {
    let f: ReportFile = from_json(text)?;
    Ok(EvalReport {
        pearson_syntax: f.pearson_syntax.0,
        pearson_irl: f.pearson_irl.0,
        n_nodes_used: f.n_nodes_used,
        per_node: f
            .per_node
            .into_iter()
            .map(|e| NodeComparison {
                node_id: e.node_id,
                test_count: e.test_count,
                syntax_score: e.syntax_score.map(|f| f.0),
                irl_svf: e.irl_svf.0,
            })
            .collect(),
    })
}

// ------------------------------------------------------------ feature csv

/// Headerless numeric CSV, one row per state.
pub fn features_from_csv(text: &str) -> Result<Vec<Vec<f64>>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, line)| {
            line.split(',')
                .map(|s| {
                    s.trim()
                        .parse::<f64>()
                        .map_err(|_| parse_err(format!("row {}: bad number {s:?}", i + 1)))
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::grid_graph;
    use crate::mdp::Padding;

    #[test]
    fn g17_formatting() {
        assert_eq!(fmt_g17(0.25), "0.25");
        assert_eq!(fmt_g17(1.0), "1");
        assert_eq!(fmt_g17(-2.5), "-2.5");
        assert_eq!(fmt_g17(0.1), "0.10000000000000001");
        assert_eq!(fmt_g17(1.0 / 3.0), "0.33333333333333331");
        assert_eq!(fmt_g17(1e20), "1e+20");
        assert_eq!(fmt_g17(1.5e-7), "1.4999999999999999e-07");
        assert_eq!(fmt_g17(123456.0), "123456");
        assert_eq!(fmt_g17(0.0), "0");
        assert_eq!(fmt_g17(0.0001), "0.0001");
    }

    #[test]
    fn g17_round_trips_exactly() {
        for x in [
            0.1,
            1.0 / 3.0,
            6371000.123456789,
            1e-300,
            -7.25e17,
            f64::MAX,
            f64::MIN_POSITIVE,
        ] {
            assert_eq!(fmt_g17(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn graph_json_shape() {
        let g = ConnectivityGraph::build(
            2,
            &[(0, 1, 1.5)],
            Some(vec![
                LatLon {
                    lat: 51.5,
                    lon: -0.1,
                },
                LatLon {
                    lat: 51.6,
                    lon: -0.2,
                },
            ]),
        )
        .unwrap();
        let text = graph_to_json(&g);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["nodes"][0]["id"], 0);
        assert_eq!(v["nodes"][1]["lat"], 51.6);
        assert_eq!(v["edges"][0]["w"], 1.5);
        assert_eq!(graph_from_json(&text).unwrap(), g);
        assert!(text.ends_with("}\n"));
    }

    #[test]
    fn graph_json_without_coords() {
        let text = r#"{"nodes":[{"id":1},{"id":0}],"edges":[{"u":1,"v":0,"w":1}]}"#;
        let g = graph_from_json(text).unwrap();
        assert_eq!(g.node_count(), 2);
        assert!(g.coords().is_none());
        assert!(graph_from_json(r#"{"nodes":[{"id":0},{"id":2}],"edges":[]}"#).is_err());
        assert!(graph_from_json(r#"{"nodes":[{"id":0,"lat":1.0}],"edges":[]}"#).is_err());
        assert!(matches!(
            graph_from_json(r#"{"nodes":[{"id":0}],"edges":[{"u":0,"v":0,"w":1}]}"#),
            Err(Error::InvalidEdge { .. })
        ));
    }

    #[test]
    fn graph_hash_is_stable() {
        let g = grid_graph(3, 3).unwrap();
        assert_eq!(graph_hash(&g), graph_hash(&grid_graph(3, 3).unwrap()));
        assert_ne!(graph_hash(&g), graph_hash(&grid_graph(3, 4).unwrap()));
        assert_eq!(graph_hash(&g).len(), 64);
    }

    #[test]
    fn traces_layout() {
        let d = TrajectorySet {
            trajectories: vec![
                Trajectory::from_indices(&[0, 1, 2]),
                Trajectory::from_indices(&[2, 1]),
            ],
            seed: 9,
            role: Role::Train,
        };
        let text = traces_to_jsonl(&d, "abc");
        assert_eq!(
            text,
            "{\"seed\":9,\"role\":\"train\",\"graph_hash\":\"abc\"}\n[0,1,2]\n[2,1]\n"
        );
        let (h, back) = traces_from_jsonl(&text).unwrap();
        assert_eq!(h.graph_hash, "abc");
        assert_eq!(back, d);
        assert!(traces_from_jsonl("").is_err());
        assert!(traces_from_jsonl("{\"seed\":1,\"role\":\"x\",\"graph_hash\":\"\"}\n").is_err());
        assert!(
            traces_from_jsonl("{\"seed\":1,\"role\":\"test\",\"graph_hash\":\"\"}\n[0,\n").is_err()
        );
    }

    #[test]
    fn metrics_csv_undefined_fields_are_empty() {
        let m = SyntaxMetrics {
            radius: 2,
            nodes: vec![NodeMetrics {
                total_depth: 1,
                k_local: 2,
                closeness: Some(1.0),
                mean_depth: Some(1.0),
                ra: None,
                score: None,
            }],
        };
        let text = metrics_to_csv(&m);
        assert_eq!(text, format!("{METRICS_HEADER}\n0,1,2,1,1,,\n"));
        assert_eq!(metrics_from_csv(&text, 2).unwrap(), m);
        assert!(metrics_from_csv("a,b\n", 2).is_err());
    }

    #[test]
    fn history_csv() {
        let h = vec![IterationRecord {
            iteration: 1,
            grad_l1: 0.5,
            learning_rate: 1.0,
        }];
        let text = history_to_csv(&h);
        assert_eq!(text, "iter,grad_l1,learning_rate\n1,0.5,1\n");
        assert_eq!(history_from_csv(&text).unwrap(), h);
    }

    #[test]
    fn report_json_shape() {
        let r = EvalReport {
            pearson_syntax: 0.45,
            pearson_irl: 0.49,
            n_nodes_used: 1,
            per_node: vec![NodeComparison {
                node_id: 0,
                test_count: 3,
                syntax_score: None,
                irl_svf: 2.5,
            }],
        };
        let text = report_to_json(&r);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["pearson_irl"], 0.49);
        assert!(v["per_node"][0]["syntax_score"].is_null());
        assert_eq!(report_from_json(&text).unwrap(), r);
    }

    #[test]
    fn model_json() {
        let r = IrlResult {
            theta_star: RewardWeights(vec![0.1, -0.2]),
            svf: vec![1.5, 1.0],
            end_mass: 0.5,
            padding: Padding::EndState,
            history: vec![],
            horizon: 2,
        };
        let cfg = TrainConfig {
            seed: 4,
            ..TrainConfig::default()
        };
        let text = model_to_json(&r, &cfg);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        let keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        assert_eq!(
            keys,
            ["config", "end_mass", "horizon", "seed", "svf", "theta"]
        );
        assert!(text.find("\"theta\"").unwrap() < text.find("\"svf\"").unwrap());
        let (back, cfg2) = model_from_json(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(cfg2, cfg);
    }

    #[test]
    fn feature_csv() {
        assert_eq!(
            features_from_csv("1,0\n0, 2\n").unwrap(),
            vec![vec![1.0, 0.0], vec![0.0, 2.0]]
        );
        assert!(features_from_csv("1,x\n").is_err());
    }
}
