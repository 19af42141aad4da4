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

//! Command-line front end.
//!
//! Exit codes: 0 on success, 2 for invalid input or arguments, 3 for
//! numerical failure. Errors are reported on stderr as a single JSON
//! object `{"error": kind, "message": text, "exit_code": n}`.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::datagen::{generate_corpus, grid_graph, split_corpus, TrajectorySet};
use crate::error::{Error, Result};
use crate::eval::compare_methods;
use crate::graph::ConnectivityGraph;
use crate::io;
use crate::irl::TrainConfig;
use crate::pipeline::{self, FeatureSource, PipelineConfig};
use crate::syntax::{compute_syntax_metrics, DEFAULT_RADIUS};

#[derive(Parser, Debug)]
#[command(
    name = "pedflow",
    version,
    about = "Pedestrian movement prediction: space syntax vs. maximum entropy IRL"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Convert an OSM XML extract into graph.json.
    ImportOsm {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a unit-weight lattice graph.
    GenGrid {
        #[arg(long)]
        width: usize,
        #[arg(long)]
        height: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate shortest-path trajectories between random node pairs.
    GenTraces {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        count: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Shuffle a corpus and cut it into train and test sets.
    Split {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        train: usize,
        #[arg(long)]
        test: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out_train: PathBuf,
        #[arg(long)]
        out_test: PathBuf,
    },
    /// Compute local integration metrics.
    Syntax {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = DEFAULT_RADIUS)]
        radius: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit reward weights to training trajectories.
    Train {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        traces: PathBuf,
        #[arg(long, default_value_t = TrainConfig::default().iterations)]
        iters: usize,
        #[arg(long, default_value_t = TrainConfig::default().eta0)]
        eta0: f64,
        #[arg(long, default_value_t = TrainConfig::default().decay)]
        decay: f64,
        #[arg(long, default_value_t = TrainConfig::default().tolerance)]
        tolerance: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// `one-hot` or `custom:<csv>`
        #[arg(long, default_value = "one-hot")]
        features: String,
        /// `end-state` or `stay`
        #[arg(long, default_value_t = pipeline::DEFAULT_PADDING.to_string())]
        padding: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        history: PathBuf,
    },
    /// Correlate both predictors with test-set visit counts.
    Evaluate {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        metrics: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        test: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every stage from a TOML config.
    Pipeline {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `output_dir`.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        /// Overrides `seed`.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides `[train] iterations`.
        #[arg(long)]
        iters: Option<usize>,
    },
}

/// Parses `args` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            report_error("Usage", &e.kind().to_string(), 2, Some(e.to_string()));
            return 2;
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            let code = e.exit_code();
            report_error(e.kind(), &e.to_string(), code, None);
            code
        }
    }
}

fn report_error(kind: &str, message: &str, code: i32, detail: Option<String>) {
    let mut obj = serde_json::json!({
        "error": kind,
        "message": message,
        "exit_code": code,
    });
    if let Some(d) = detail {
        obj["detail"] = d.trim_end().into();
    }
    eprintln!("{obj}");
}

fn load_traces(path: &Path) -> Result<(io::TracesHeader, TrajectorySet)> {
    io::load(path, io::traces_from_jsonl)
}

/// Fails when a traces file was generated on a different graph.
fn check_hash(header: &io::TracesHeader, g: &ConnectivityGraph, path: &Path) -> Result<()> {
    if !header.graph_hash.is_empty() && header.graph_hash != io::graph_hash(g) {
        return Err(Error::GraphMismatch(format!(
            "{} was generated on a different graph",
            path.display()
        )));
    }
    Ok(())
}

fn execute(cmd: Command) -> Result<()> {
    match cmd {
        Command::ImportOsm { input, out } => {
            let g = io::load(&input, crate::datagen::parse_osm_extract)?;
            io::write_text(&out, &io::graph_to_json(&g))?;
            println!(
                "{} nodes, {} edges -> {}",
                g.node_count(),
                g.edge_count(),
                out.display()
            );
        }
        Command::GenGrid { width, height, out } => {
            let g = grid_graph(width, height)?;
            io::write_text(&out, &io::graph_to_json(&g))?;
            println!("{width}x{height} grid -> {}", out.display());
        }
        Command::GenTraces {
            graph,
            count,
            seed,
            out,
        } => {
            let g = pipeline::load_graph(&graph)?;
            let d = generate_corpus(&g, count, seed)?;
            io::write_text(&out, &io::traces_to_jsonl(&d, &io::graph_hash(&g)))?;
            println!("{} trajectories -> {}", d.len(), out.display());
        }
        Command::Split {
            input,
            train,
            test,
            seed,
            out_train,
            out_test,
        } => {
            let (header, d) = load_traces(&input)?;
            let (a, b) = split_corpus(&d, train, test, seed)?;
            io::write_text(&out_train, &io::traces_to_jsonl(&a, &header.graph_hash))?;
            io::write_text(&out_test, &io::traces_to_jsonl(&b, &header.graph_hash))?;
            println!(
                "{} train -> {}, {} test -> {}",
                a.len(),
                out_train.display(),
                b.len(),
                out_test.display()
            );
        }
        Command::Syntax { graph, radius, out } => {
            if radius == 0 {
                return Err(Error::InvalidConfig("radius must be at least 1".into()));
            }
            let g = pipeline::load_graph(&graph)?;
            let m = compute_syntax_metrics(&g, radius)?;
            io::write_text(&out, &io::metrics_to_csv(&m))?;
            println!("{} nodes -> {}", m.len(), out.display());
        }
        Command::Train {
            graph,
            traces,
            iters,
            eta0,
            decay,
            tolerance,
            seed,
            features,
            padding,
            out,
            history,
        } => {
            let g = pipeline::load_graph(&graph)?;
            let (header, d) = load_traces(&traces)?;
            check_hash(&header, &g, &traces)?;
            let cfg = TrainConfig {
                iterations: iters,
                eta0,
                decay,
                seed,
                tolerance,
            };
            let mode = features.parse::<FeatureSource>()?.resolve()?;
            let r = pipeline::train_on(&g, &d, mode, padding.parse()?, &cfg)?;
            io::write_text(&out, &io::model_to_json(&r, &cfg))?;
            io::write_text(&history, &io::history_to_csv(&r.history))?;
            let last = r.history.last().map_or(f64::NAN, |h| h.grad_l1);
            println!(
                "{} iterations, final grad L1 {} -> {}",
                r.history.len(),
                io::fmt_g17(last),
                out.display()
            );
        }
        Command::Evaluate {
            graph,
            metrics,
            model,
            test,
            out,
        } => {
            let g = pipeline::load_graph(&graph)?;
            let m = io::load(&metrics, |t| io::metrics_from_csv(t, DEFAULT_RADIUS))?;
            let (r, _) = io::load(&model, io::model_from_json)?;
            let (header, d) = load_traces(&test)?;
            check_hash(&header, &g, &test)?;
            if m.len() != g.node_count() {
                return Err(Error::GraphMismatch(format!(
                    "metrics cover {} nodes, graph has {}",
                    m.len(),
                    g.node_count()
                )));
            }
            let report = compare_methods(&m, &r, &d)?;
            io::write_text(&out, &io::report_to_json(&report))?;
            println!(
                "pearson_syntax {} pearson_irl {} over {} nodes -> {}",
                io::fmt_g17(report.pearson_syntax),
                io::fmt_g17(report.pearson_irl),
                report.n_nodes_used,
                out.display()
            );
        }
        Command::Pipeline {
            config,
            out_dir,
            seed,
            iters,
        } => {
            let mut cfg = PipelineConfig::load(&config)?;
            if let Some(d) = out_dir {
                cfg.output_dir = d;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(n) = iters {
                cfg.iterations = n;
            }
            let outcome = pipeline::run_pipeline(&cfg)?;
            println!(
                "pearson_syntax {} pearson_irl {} -> {}",
                io::fmt_g17(outcome.report.pearson_syntax),
                io::fmt_g17(outcome.report.pearson_irl),
                cfg.output_dir.display()
            );
        }
    }
    Ok(())
}
