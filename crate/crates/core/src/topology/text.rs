//! Plain-text serialization of the metric models, consumed by the CLI.
//!
//! ```text
//! space tree
//! vertices 4
//! edge 0 1 1
//! edge 0 2 1
//! edge 0 3 1
//! end
//! ```
//!
//! Graphs add an optional `forward`/`reverse` orientation token per edge;
//! dendrites are stored by their construction triple:
//!
//! ```text
//! space dendrite
//! depth 4
//! denom 8
//! decay 0.5
//! end
//! ```

use crate::topology::{MetricGraph, MetricTree, SpaceRef, UniversalDendriteModel};
use crate::{Error, Result};

/// Serialize a space to the text document format.
pub fn space_to_text(space: &SpaceRef) -> String {
    let mut out = String::new();
    match space {
        SpaceRef::Tree(t) => {
            out.push_str("space tree\n");
            out.push_str(&format!("vertices {}\n", t.vertex_count()));
            for e in t.edges() {
                out.push_str(&format!("edge {} {} {}\n", e.a.0, e.b.0, e.length));
            }
        }
        SpaceRef::Graph(g) => {
            out.push_str("space graph\n");
            out.push_str(&format!("vertices {}\n", g.vertex_count()));
            for i in 0..g.edge_count() {
                let e = g.edge(crate::topology::EdgeId(i));
                let orient = if g.orientation(crate::topology::EdgeId(i)) {
                    "forward"
                } else {
                    "reverse"
                };
                out.push_str(&format!(
                    "edge {} {} {} {}\n",
                    e.a.0, e.b.0, e.length, orient
                ));
            }
        }
        SpaceRef::Dendrite(d) => {
            out.push_str("space dendrite\n");
            out.push_str(&format!("depth {}\n", d.depth()));
            out.push_str(&format!("denom {}\n", d.denom_bound()));
            out.push_str(&format!("decay {}\n", d.decay()));
        }
    }
    out.push_str("end\n");
    out
}

/// Parse a space from the text document format.
pub fn space_from_text(input: &str) -> Result<SpaceRef> {
    let mut lines = input
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));

    let header = lines
        .next()
        .ok_or_else(|| Error::Malformed("empty space document".into()))?;
    let kind = header
        .strip_prefix("space ")
        .ok_or_else(|| Error::Malformed(format!("expected `space <kind>`, got `{header}`")))?
        .trim();

    match kind {
        "tree" | "graph" => {
            let mut vertex_count: Option<usize> = None;
            let mut edges: Vec<(usize, usize, f64)> = Vec::new();
            let mut orientations: Vec<bool> = Vec::new();
            for line in lines {
                if line == "end" {
                    break;
                }
                if let Some(rest) = line.strip_prefix("vertices ") {
                    vertex_count = Some(parse(rest, "vertex count")?);
                } else if let Some(rest) = line.strip_prefix("edge ") {
                    let fields: Vec<&str> = rest.split_whitespace().collect();
                    if fields.len() < 3 {
                        return Err(Error::Malformed(format!("bad edge line `{line}`")));
                    }
                    let a = parse(fields[0], "edge endpoint")?;
                    let b = parse(fields[1], "edge endpoint")?;
                    let len: f64 = fields[2].parse().map_err(|_| {
                        Error::Malformed(format!("bad edge length `{}`", fields[2]))
                    })?;
                    let orient = match fields.get(3) {
                        None | Some(&"forward") => true,
                        Some(&"reverse") => false,
                        Some(other) => {
                            return Err(Error::Malformed(format!("bad orientation `{other}`")))
                        }
                    };
                    edges.push((a, b, len));
                    orientations.push(orient);
                } else {
                    return Err(Error::Malformed(format!("unexpected line `{line}`")));
                }
            }
            let vertex_count =
                vertex_count.ok_or_else(|| Error::Malformed("missing `vertices` line".into()))?;
            if kind == "tree" {
                Ok(SpaceRef::from_tree(MetricTree::new(vertex_count, edges)?))
            } else {
                Ok(SpaceRef::from_graph(MetricGraph::with_orientation(
                    vertex_count,
                    edges,
                    orientations,
                )?))
            }
        }
        "dendrite" => {
            let mut depth: Option<usize> = None;
            let mut denom: Option<u32> = None;
            let mut decay: Option<f64> = None;
            for line in lines {
                if line == "end" {
                    break;
                }
                if let Some(rest) = line.strip_prefix("depth ") {
                    depth = Some(parse(rest, "depth")?);
                } else if let Some(rest) = line.strip_prefix("denom ") {
                    denom = Some(parse(rest, "denominator bound")?);
                } else if let Some(rest) = line.strip_prefix("decay ") {
                    decay = Some(
                        rest.trim()
                            .parse()
                            .map_err(|_| Error::Malformed(format!("bad decay `{rest}`")))?,
                    );
                } else {
                    return Err(Error::Malformed(format!("unexpected line `{line}`")));
                }
            }
            let depth = depth.ok_or_else(|| Error::Malformed("missing `depth`".into()))?;
            let denom = denom.ok_or_else(|| Error::Malformed("missing `denom`".into()))?;
            let decay = decay.ok_or_else(|| Error::Malformed("missing `decay`".into()))?;
            Ok(SpaceRef::from_dendrite(UniversalDendriteModel::build(
                depth, denom, decay,
            )?))
        }
        other => Err(Error::Malformed(format!("unknown space kind `{other}`"))),
    }
}

fn parse<T: std::str::FromStr>(field: &str, what: &str) -> Result<T> {
    field
        .trim()
        .parse()
        .map_err(|_| Error::Malformed(format!("bad {what} `{field}`")))
}
