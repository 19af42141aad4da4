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

//! End-to-end experiment: graph, corpus, split, syntax metrics, IRL
//! training, evaluation. Every stage is also reachable on its own through
//! the CLI.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::datagen::{generate_corpus, split_corpus, TrajectorySet};
use crate::error::{Error, Result};
use crate::eval::{compare_methods, EvalReport};
use crate::graph::ConnectivityGraph;
use crate::io;
use crate::irl::{train_maxent, IrlResult, TrainConfig};
use crate::mdp::{FeatureMatrix, FeatureMode, MdpModel, Padding};
use crate::syntax::{compute_syntax_metrics, SyntaxMetrics, DEFAULT_RADIUS};

/// How state features are chosen: `one-hot` or `custom:<csv path>`.
#[derive(Clone, Debug, PartialEq)]
pub enum FeatureSource {
    OneHot,
    Custom(PathBuf),
}

impl std::str::FromStr for FeatureSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "one-hot" | "onehot" => Ok(FeatureSource::OneHot),
            _ => match s.strip_prefix("custom:") {
                Some(p) if !p.is_empty() => Ok(FeatureSource::Custom(PathBuf::from(p))),
                _ => Err(Error::InvalidConfig(format!(
                    "feature mode {s:?}: expected \"one-hot\" or \"custom:<file>\""
                ))),
            },
        }
    }
}

impl FeatureSource {
    pub fn resolve(&self) -> Result<FeatureMode> {
        match self {
            FeatureSource::OneHot => Ok(FeatureMode::OneHot),
            FeatureSource::Custom(path) => {
                let rows = io::load(path, io::features_from_csv)?;
                Ok(FeatureMode::Custom(FeatureMatrix::from_rows(&rows)?))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineConfig {
    pub graph_path: PathBuf,
    pub output_dir: PathBuf,
    pub count: usize,
    pub train_count: usize,
    pub test_count: usize,
    pub seed: u64,
    pub radius: usize,
    pub iterations: usize,
    pub eta0: f64,
    pub decay: f64,
    pub tolerance: f64,
    pub feature_mode: FeatureSource,
    pub padding: Padding,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    graph: PathBuf,
    #[serde(default = "default_output_dir")]
    output_dir: PathBuf,
    #[serde(default)]
    seed: u64,
    #[serde(default)]
    corpus: CorpusSection,
    #[serde(default)]
    syntax: SyntaxSection,
    #[serde(default)]
    train: TrainSection,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, default)]
struct CorpusSection {
    count: usize,
    train: usize,
    test: usize,
}

impl Default for CorpusSection {
    fn default() -> Self {
        CorpusSection {
            count: 400,
            train: 300,
            test: 100,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, default)]
struct SyntaxSection {
    radius: usize,
}

impl Default for SyntaxSection {
    fn default() -> Self {
        SyntaxSection {
            radius: DEFAULT_RADIUS,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields, default)]
struct TrainSection {
    iterations: usize,
    eta0: f64,
    decay: f64,
    tolerance: f64,
    features: String,
    padding: String,
}

impl Default for TrainSection {
    fn default() -> Self {
        let d = TrainConfig::default();
        TrainSection {
            iterations: d.iterations,
            eta0: d.eta0,
            decay: d.decay,
            tolerance: d.tolerance,
            features: "one-hot".into(),
            padding: DEFAULT_PADDING.to_string(),
        }
    }
}

impl PipelineConfig {
    /// Parses a TOML config. Relative paths resolve against `base_dir`.
    pub fn from_toml(text: &str, base_dir: &Path) -> Result<Self> {
        let f: ConfigFile =
            toml::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        let mut feature_mode: FeatureSource = f.train.features.parse()?;
        if let FeatureSource::Custom(p) = &feature_mode {
            feature_mode = FeatureSource::Custom(base_dir.join(p));
        }
        let cfg = PipelineConfig {
            graph_path: base_dir.join(f.graph),
            output_dir: base_dir.join(f.output_dir),
            count: f.corpus.count,
            train_count: f.corpus.train,
            test_count: f.corpus.test,
            seed: f.seed,
            radius: f.syntax.radius,
            iterations: f.train.iterations,
            eta0: f.train.eta0,
            decay: f.train.decay,
            tolerance: f.train.tolerance,
            feature_mode,
            padding: f.train.padding.parse()?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = io::read_text(path)?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml(&text, base)
    }

    pub fn validate(&self) -> Result<()> {
        if self.count == 0 || self.train_count == 0 || self.test_count == 0 {
            return Err(Error::InvalidConfig(
                "corpus counts must be positive".into(),
            ));
        }
        if self.train_count + self.test_count != self.count {
            return Err(Error::BadSplit {
                train: self.train_count,
                test: self.test_count,
                total: self.count,
            });
        }
        if self.radius == 0 {
            return Err(Error::InvalidConfig("radius must be at least 1".into()));
        }
        self.train_config().validate()
    }

    pub fn train_config(&self) -> TrainConfig {
        TrainConfig {
            iterations: self.iterations,
            eta0: self.eta0,
            decay: self.decay,
            seed: self.seed,
            tolerance: self.tolerance,
        }
    }
}

/// Loads `graph.json`, or imports an `.osm` extract.
pub fn load_graph(path: &Path) -> Result<ConnectivityGraph> {
    let is_osm = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("osm") || e.eq_ignore_ascii_case("xml"));
    if is_osm {
        io::load(path, crate::datagen::parse_osm_extract)
    } else {
        io::load(path, io::graph_from_json)
    }
}

/// Padding used by the pipeline and the `train` subcommand unless overridden.
///
/// Stay padding piles the unused part of every short demonstration onto its
/// final node, which for random destinations swamps the visitation signal.
/// The end state keeps expert and learner mass equal without that bias.
pub const DEFAULT_PADDING: Padding = Padding::EndState;

/// Trains on `train` with the horizon set to its longest trajectory.
pub fn train_on(
    g: &ConnectivityGraph,
    train: &TrajectorySet,
    features: FeatureMode,
    padding: Padding,
    cfg: &TrainConfig,
) -> Result<IrlResult> {
    if train.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    train.validate(g)?;
    let horizon = train.max_steps().max(1);
    let mdp = MdpModel::with_padding(g, 1.0, horizon, features, padding)?;
    train_maxent(&mdp, &train.trajectories, cfg)
}

#[derive(Clone, Debug)]
pub struct PipelineOutcome {
    pub graph: ConnectivityGraph,
    pub corpus: TrajectorySet,
    pub train: TrajectorySet,
    pub test: TrajectorySet,
    pub metrics: SyntaxMetrics,
    pub model: IrlResult,
    pub report: EvalReport,
}

/// Runs every stage in memory without touching the filesystem except for
/// loading the graph and optional feature file.
pub fn run_in_memory(cfg: &PipelineConfig) -> Result<PipelineOutcome> {
    cfg.validate()?;
    let graph = load_graph(&cfg.graph_path)?;
    run_on_graph(cfg, graph)
}

pub fn run_on_graph(cfg: &PipelineConfig, graph: ConnectivityGraph) -> Result<PipelineOutcome> {
    cfg.validate()?;
    let corpus = generate_corpus(&graph, cfg.count, cfg.seed)?;
    let (train, test) = split_corpus(&corpus, cfg.train_count, cfg.test_count, cfg.seed)?;
    let metrics = compute_syntax_metrics(&graph, cfg.radius)?;
    let model = train_on(
        &graph,
        &train,
        cfg.feature_mode.resolve()?,
        cfg.padding,
        &cfg.train_config(),
    )?;
    let report = compare_methods(&metrics, &model, &test)?;
    Ok(PipelineOutcome {
        graph,
        corpus,
        train,
        test,
        metrics,
        model,
        report,
    })
}

/// File names written by [`run_pipeline`], relative to the output directory.
pub const ARTIFACTS: [&str; 8] = [
    "graph.json",
    "traces.jsonl",
    "train.jsonl",
    "test.jsonl",
    "metrics.csv",
    "model.json",
    "history.csv",
    "report.json",
];

/// Runs the whole experiment and writes every artifact into `cfg.output_dir`.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineOutcome> {
    let out = run_in_memory(cfg)?;
    let dir = &cfg.output_dir;
    let hash = io::graph_hash(&out.graph);
    let files = [
        io::graph_to_json(&out.graph),
        io::traces_to_jsonl(&out.corpus, &hash),
        io::traces_to_jsonl(&out.train, &hash),
        io::traces_to_jsonl(&out.test, &hash),
        io::metrics_to_csv(&out.metrics),
        io::model_to_json(&out.model, &cfg.train_config()),
        io::history_to_csv(&out.model.history),
        io::report_to_json(&out.report),
    ];
    for (name, contents) in ARTIFACTS.iter().zip(files) {
        io::write_text(&dir.join(name), &contents)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_defaults_and_paths() {
        let cfg = PipelineConfig::from_toml("graph = \"g.json\"\nseed = 3\n", Path::new("/data"))
            .unwrap();
        assert_eq!(cfg.graph_path, PathBuf::from("/data/g.json"));
        assert_eq!(cfg.output_dir, PathBuf::from("/data/out"));
        assert_eq!(
            (cfg.count, cfg.train_count, cfg.test_count),
            (400, 300, 100)
        );
        assert_eq!(cfg.radius, 2);
        assert_eq!(cfg.train_config().seed, 3);
        assert_eq!(cfg.feature_mode, FeatureSource::OneHot);
        assert_eq!(cfg.padding, DEFAULT_PADDING);
        let cfg = PipelineConfig::from_toml(
            "graph = \"g\"\n[train]\npadding = \"stay\"\n",
            Path::new("."),
        )
        .unwrap();
        assert_eq!(cfg.padding, Padding::Stay);
    }

    #[test]
    fn config_rejects_bad_split_and_unknown_keys() {
        let text = "graph = \"g.json\"\n[corpus]\ncount = 400\ntrain = 300\ntest = 99\n";
        assert!(matches!(
            PipelineConfig::from_toml(text, Path::new(".")),
            Err(Error::BadSplit { .. })
        ));
        assert!(matches!(
            PipelineConfig::from_toml("graph = \"g\"\nbogus = 1\n", Path::new(".")),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn feature_spec_parsing() {
        assert_eq!(
            "one-hot".parse::<FeatureSource>().unwrap(),
            FeatureSource::OneHot
        );
        assert_eq!(
            "custom:f.csv".parse::<FeatureSource>().unwrap(),
            FeatureSource::Custom(PathBuf::from("f.csv"))
        );
        assert!("custom:".parse::<FeatureSource>().is_err());
        assert!("tabular".parse::<FeatureSource>().is_err());
    }
}
