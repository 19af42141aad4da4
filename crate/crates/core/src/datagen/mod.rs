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

//! Street graphs and demonstration corpora.

mod corpus;
mod grid;
mod osm;

pub use corpus::{generate_corpus, split_corpus, Role, TrajectorySet};
pub use grid::grid_graph;
pub use osm::{haversine_m, parse_osm_extract, EARTH_RADIUS_M};
