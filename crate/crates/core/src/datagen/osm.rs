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

//! OSM XML extract to intersection graph.
//!
//! Only ways carrying a `highway` tag are kept. Graph nodes are the way
//! endpoints plus any OSM node used more than once across kept ways; the
//! geometry points in between are folded into the edge length. Parallel
//! ways between the same pair of intersections keep the shortest one, and
//! only the largest connected component survives.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{Error, Result};
use crate::graph::{ConnectivityGraph, LatLon};

pub const EARTH_RADIUS_M: f64 = 6_371_000.0;

/// Great-circle distance in meters.
pub fn haversine_m(a: LatLon, b: LatLon) -> f64 {
    let (lat1, lat2) = (a.lat.to_radians(), b.lat.to_radians());
    let dlat = lat2 - lat1;
    let dlon = (b.lon - a.lon).to_radians();
    let h = (dlat / 2.0).sin().powi(2) + lat1.cos() * lat2.cos() * (dlon / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_M * h.sqrt().min(1.0).asin()
}

fn attr<'a>(node: roxmltree::Node<'a, '_>, name: &str) -> Result<&'a str> {
    node.attribute(name).ok_or_else(|| {
        Error::MalformedXml(format!(
            "<{}> at byte {} lacks attribute {name:?}",
            node.tag_name().name(),
            node.range().start
        ))
    })
}

fn parse_num<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::MalformedXml(format!("bad {what} {s:?}")))
}

pub fn parse_osm_extract(xml: &str) -> Result<ConnectivityGraph> {
    let doc = roxmltree::Document::parse(xml).map_err(|e| Error::MalformedXml(e.to_string()))?;
    let root = doc.root_element();
    if root.tag_name().name() != "osm" {
        return Err(Error::MalformedXml(format!(
            "root element is <{}>, expected <osm>",
            root.tag_name().name()
        )));
    }

    let mut coords: HashMap<i64, LatLon> = HashMap::new();
    let mut ways: Vec<Vec<i64>> = Vec::new();
    for el in root.children().filter(|n| n.is_element()) {
        match el.tag_name().name() {
            "node" => {
                let id = parse_num(attr(el, "id")?, "node id")?;
                let lat = parse_num(attr(el, "lat")?, "latitude")?;
                let lon = parse_num(attr(el, "lon")?, "longitude")?;
                coords.insert(id, LatLon { lat, lon });
            }
            "way" => {
                let is_highway = el
                    .children()
                    .any(|c| c.has_tag_name("tag") && c.attribute("k") == Some("highway"));
                if !is_highway {
                    continue;
                }
                let refs = el
                    .children()
                    .filter(|c| c.has_tag_name("nd"))
                    .map(|c| parse_num(attr(c, "ref")?, "node ref"))
                    .collect::<Result<Vec<i64>>>()?;
                ways.push(refs);
            }
            _ => {}
        }
    }
    if ways.is_empty() {
        return Err(Error::NoHighways);
    }

    // Split ways at references to nodes missing from the extract.
    let mut segments: Vec<Vec<i64>> = Vec::new();
    for refs in ways {
        let mut cur: Vec<i64> = Vec::new();
        for r in refs {
            if !coords.contains_key(&r) {
                if cur.len() >= 2 {
                    segments.push(std::mem::take(&mut cur));
                }
                cur.clear();
                continue;
            }
            if cur.last() != Some(&r) {
                cur.push(r);
            }
        }
        if cur.len() >= 2 {
            segments.push(cur);
        }
    }

    let mut uses: HashMap<i64, usize> = HashMap::new();
    let mut junctions: BTreeSet<i64> = BTreeSet::new();
    for seg in &segments {
        junctions.insert(seg[0]);
        junctions.insert(*seg.last().unwrap());
        for r in seg {
            *uses.entry(*r).or_default() += 1;
        }
    }
    junctions.extend(uses.iter().filter(|(_, &c)| c >= 2).map(|(&r, _)| r));

    // shortest length per unordered junction pair
    let mut links: BTreeMap<(i64, i64), f64> = BTreeMap::new();
    for seg in &segments {
        let mut from = seg[0];
        let mut length = 0.0;
        for pair in seg.windows(2) {
            length += haversine_m(coords[&pair[0]], coords[&pair[1]]);
            if junctions.contains(&pair[1]) {
                let to = pair[1];
                if to != from && length > 0.0 {
                    let key = (from.min(to), from.max(to));
                    let entry = links.entry(key).or_insert(f64::INFINITY);
                    *entry = entry.min(length);
                }
                from = to;
                length = 0.0;
            }
        }
    }
    if links.is_empty() {
        return Err(Error::NoHighways);
    }

    let ids: Vec<i64> = links
        .keys()
        .flat_map(|&(a, b)| [a, b])
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let index: HashMap<i64, usize> = ids.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    let edges: Vec<_> = links
        .iter()
        .map(|(&(a, b), &w)| (index[&a], index[&b], w))
        .collect();
    let full = ConnectivityGraph::build(ids.len(), &edges, None)?;

    // largest component; ties go to the one holding the smallest OSM id
    let components = full.components();
    let keep = components
        .iter()
        .enumerate()
        .max_by(|(i, a), (j, b)| a.len().cmp(&b.len()).then(j.cmp(i)))
        .map(|(_, c)| c)
        .expect("at least one component");
    let mut remap = vec![usize::MAX; ids.len()];
    for (new, old) in keep.iter().enumerate() {
        remap[old.index()] = new;
    }
    let kept_edges: Vec<_> = full
        .edges()
        .iter()
        .filter(|e| remap[e.u.index()] != usize::MAX)
        .map(|e| (remap[e.u.index()], remap[e.v.index()], e.w))
        .collect();
    let kept_coords = keep.iter().map(|n| coords[&ids[n.index()]]).collect();
    ConnectivityGraph::build(keep.len(), &kept_edges, Some(kept_coords))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::NodeId;

    fn doc(body: &str) -> String {
        format!("<?xml version='1.0' encoding='UTF-8'?>\n<osm version='0.6'>\n{body}\n</osm>")
    }

    fn ll(lat: f64, lon: f64) -> LatLon {
        LatLon { lat, lon }
    }

    #[test]
    fn haversine_one_degree_of_latitude() {
        let d = haversine_m(ll(0.0, 0.0), ll(1.0, 0.0));
        assert!((d - EARTH_RADIUS_M * std::f64::consts::PI / 180.0).abs() < 1e-6);
        assert_eq!(haversine_m(ll(51.5, -0.1), ll(51.5, -0.1)), 0.0);
    }

    #[test]
    fn chain_collapses_to_endpoints() {
        let xml = doc(r#"
            <node id="1" lat="51.500" lon="-0.100"/>
            <node id="2" lat="51.501" lon="-0.100"/>
            <node id="3" lat="51.501" lon="-0.099"/>
            <way id="10"><nd ref="1"/><nd ref="2"/><nd ref="3"/><tag k="highway" v="residential"/></way>
        "#);
        let g = parse_osm_extract(&xml).unwrap();
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.edge_count(), 1);
        let expected = haversine_m(ll(51.5, -0.1), ll(51.501, -0.1))
            + haversine_m(ll(51.501, -0.1), ll(51.501, -0.099));
        assert!((g.edges()[0].w - expected).abs() < 1e-9);
        assert_eq!(g.coords().unwrap()[0], ll(51.5, -0.1));
    }

    #[test]
    fn crossing_ways_share_an_intersection() {
        let xml = doc(r#"
            <node id="1" lat="0.0" lon="-0.001"/>
            <node id="2" lat="0.0" lon="0.001"/>
            <node id="3" lat="-0.001" lon="0.0"/>
            <node id="4" lat="0.001" lon="0.0"/>
            <node id="5" lat="0.0" lon="0.0"/>
            <way id="10"><nd ref="1"/><nd ref="5"/><nd ref="2"/><tag k="highway" v="primary"/></way>
            <way id="11"><nd ref="3"/><nd ref="5"/><nd ref="4"/><tag k="highway" v="footway"/></way>
        "#);
        let g = parse_osm_extract(&xml).unwrap();
        assert_eq!(g.node_count(), 5);
        // osm id 5 is the largest id, so it gets index 4
        assert_eq!(g.degree(NodeId(4)), 4);
    }

    #[test]
    fn untagged_way_is_ignored() {
        let xml = doc(r#"
            <node id="1" lat="0.0" lon="0.0"/>
            <node id="2" lat="0.0" lon="0.001"/>
            <node id="3" lat="0.0" lon="0.002"/>
            <node id="4" lat="0.001" lon="0.002"/>
            <way id="10"><nd ref="1"/><nd ref="2"/><tag k="highway" v="service"/></way>
            <way id="11"><nd ref="2"/><nd ref="3"/><tag k="highway" v="service"/></way>
            <way id="12"><nd ref="3"/><nd ref="4"/><tag k="building" v="yes"/></way>
        "#);
        let g = parse_osm_extract(&xml).unwrap();
        assert_eq!(g.node_count(), 3);
        assert_eq!(g.edge_count(), 2);
    }

    #[test]
    fn largest_component_kept() {
        let xml = doc(r#"
            <node id="1" lat="0.0" lon="0.0"/>
            <node id="2" lat="0.0" lon="0.001"/>
            <node id="3" lat="0.0" lon="0.002"/>
            <node id="7" lat="1.0" lon="0.0"/>
            <node id="8" lat="1.0" lon="0.001"/>
            <way id="10"><nd ref="1"/><nd ref="2"/><tag k="highway" v="service"/></way>
            <way id="11"><nd ref="2"/><nd ref="3"/><tag k="highway" v="service"/></way>
            <way id="12"><nd ref="7"/><nd ref="8"/><tag k="highway" v="service"/></way>
        "#);
        let g = parse_osm_extract(&xml).unwrap();
        assert_eq!(g.node_count(), 3);
        assert!(g.is_connected());
    }

    #[test]
    fn parallel_ways_keep_shorter() {
        let xml = doc(r#"
            <node id="1" lat="0.0" lon="0.0"/>
            <node id="2" lat="0.0" lon="0.001"/>
            <node id="3" lat="0.001" lon="0.0005"/>
            <way id="10"><nd ref="1"/><nd ref="2"/><tag k="highway" v="service"/></way>
            <way id="11"><nd ref="1"/><nd ref="3"/><nd ref="2"/><tag k="highway" v="service"/></way>
        "#);
        let g = parse_osm_extract(&xml).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert!((g.edges()[0].w - haversine_m(ll(0.0, 0.0), ll(0.0, 0.001))).abs() < 1e-9);
    }

    #[test]
    fn missing_node_splits_way() {
        let xml = doc(r#"
            <node id="1" lat="0.0" lon="0.0"/>
            <node id="2" lat="0.0" lon="0.001"/>
            <node id="4" lat="0.0" lon="0.003"/>
            <node id="5" lat="0.0" lon="0.004"/>
            <node id="6" lat="0.0" lon="0.005"/>
            <way id="10"><nd ref="1"/><nd ref="2"/><nd ref="3"/><nd ref="4"/><nd ref="5"/><nd ref="6"/><tag k="highway" v="service"/></way>
        "#);
        let g = parse_osm_extract(&xml).unwrap();
        // segment 4-5-6 (one edge, two nodes) ties with 1-2; smaller osm ids win
        assert_eq!(g.node_count(), 2);
        assert_eq!(g.coords().unwrap()[0], ll(0.0, 0.0));
    }

    #[test]
    fn errors() {
        assert!(matches!(
            parse_osm_extract("<osm><node"),
            Err(Error::MalformedXml(_))
        ));
        assert!(matches!(
            parse_osm_extract("<foo/>"),
            Err(Error::MalformedXml(_))
        ));
        assert!(matches!(
            parse_osm_extract(&doc(r#"<node id="1" lon="0"/>"#)),
            Err(Error::MalformedXml(_))
        ));
        let no_roads = doc(r#"
            <node id="1" lat="0" lon="0"/><node id="2" lat="0" lon="1"/>
            <way id="3"><nd ref="1"/><nd ref="2"/><tag k="waterway" v="river"/></way>
        "#);
        assert!(matches!(
            parse_osm_extract(&no_roads),
            Err(Error::NoHighways)
        ));
    }
}
