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

//! The whole experiment from the bundled config, written to a directory.
//!
//! Run with `cargo run --release --example full_pipeline [out_dir]`.

use std::path::{Path, PathBuf};

use pedflow::pipeline::{run_pipeline, PipelineConfig, ARTIFACTS};

fn main() -> pedflow::Result<()> {
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/fixture.toml");
    let mut cfg = PipelineConfig::load(&config)?;
    cfg.output_dir = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("pedflow-run"));

    let out = run_pipeline(&cfg)?;
    println!(
        "wrote {} files to {}",
        ARTIFACTS.len(),
        cfg.output_dir.display()
    );
    println!(
        "pearson_syntax {:.3}, pearson_irl {:.3} over {} nodes",
        out.report.pearson_syntax, out.report.pearson_irl, out.report.n_nodes_used
    );
    Ok(())
}
