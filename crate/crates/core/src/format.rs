//! Plain-text file formats.
//!
//! Instance files:
//!
//! ```text
//! r 1
//! n 2
//! s 0 0        # grid cell (row col), or `s <vertex-id>` on general graphs
//! s 3 4
//! t 7 7
//! t 0 5
//! ```
//!
//! Edge lists start with `p <V> <E>` followed by `E` lines `e <u> <v>`;
//! galactic graphs add `b <vertex-id>` lines for black holes. Plan files hold
//! one step per line, vertex ids in agent order.

use std::sync::Arc;

use thiserror::Error;

use crate::graph::{Configuration, Graph, GraphError, VertexId};
use crate::grid::GridMap;
use crate::instance::{Instance, InstanceError, Plan};
use crate::kernel::{GalacticGraph, GalacticInstance};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormatError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("{0}")]
    Instance(#[from] InstanceError),
    #[error("{0}")]
    Graph(#[from] GraphError),
}

fn syntax(line: usize, msg: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        msg: msg.into(),
    }
}

/// Non-empty lines with comments stripped, numbered from 1.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = raw.split('#').next().unwrap_or("");
        let words: Vec<&str> = body.split_whitespace().collect();
        (!words.is_empty()).then_some((i + 1, words))
    })
}

fn number<T: std::str::FromStr>(line: usize, word: Option<&&str>) -> Result<T, FormatError> {
    word.and_then(|w| w.parse().ok())
        .ok_or_else(|| syntax(line, "expected a non-negative integer"))
}

/// Reads an instance for `graph`. Endpoints given as `row col` need `grid`.
pub fn parse_instance(text: &str, graph: Arc<Graph>, grid: Option<&GridMap>) -> Result<Instance, FormatError> {
    let mut radius = None;
    let mut count = None;
    let mut start = Vec::new();
    let mut target = Vec::new();
    for (line, words) in content_lines(text) {
        match words[0] {
            "r" => radius = Some(number::<u32>(line, words.get(1))?),
            "n" => count = Some(number::<usize>(line, words.get(1))?),
            "s" | "t" => {
                let v = match words.len() {
                    2 => number::<VertexId>(line, words.get(1))?,
                    3 => {
                        let grid = grid.ok_or_else(|| syntax(line, "row/col endpoints need a grid map"))?;
                        let row = number::<usize>(line, words.get(1))?;
                        let col = number::<usize>(line, words.get(2))?;
                        grid.vertex_at(row, col)
                            .ok_or_else(|| syntax(line, format!("cell ({row}, {col}) is not passable")))?
                    }
                    _ => return Err(syntax(line, "expected `s <id>` or `s <row> <col>`")),
                };
                if words[0] == "s" {
                    start.push(v);
                } else {
                    target.push(v);
                }
            }
            other => return Err(syntax(line, format!("unknown record `{other}`"))),
        }
    }
    let radius = radius.ok_or_else(|| syntax(0, "missing `r` line"))?;
    if let Some(n) = count {
        if start.len() != n || target.len() != n {
            return Err(syntax(
                0,
                format!("n = {n} but found {} starts and {} targets", start.len(), target.len()),
            ));
        }
    }
    Ok(Instance::new(graph, Configuration(start), Configuration(target), radius)?)
}

/// Writes grid cells as `row col` when the graph carries coordinates and
/// `use_cells` is set, vertex ids otherwise.
pub fn write_instance(instance: &Instance, use_cells: bool) -> String {
    let graph = instance.graph();
    let cells = use_cells && graph.has_coords();
    let mut out = format!("r {}\nn {}\n", instance.radius(), instance.agent_count());
    for (tag, set) in [("s", instance.start()), ("t", instance.target())] {
        for &v in set.iter() {
            if cells {
                let (row, col) = graph.coords(v).expect("coordinates present");
                out.push_str(&format!("{tag} {row} {col}\n"));
            } else {
                out.push_str(&format!("{tag} {v}\n"));
            }
        }
    }
    out
}

/// Graph plus black-hole flags (all false for plain edge lists).
pub fn parse_edge_list(text: &str) -> Result<(Graph, Vec<bool>), FormatError> {
    let mut header = None;
    let mut edges = Vec::new();
    let mut holes = Vec::new();
    for (line, words) in content_lines(text) {
        match words[0] {
            "p" => {
                if header.is_some() {
                    return Err(syntax(line, "duplicate `p` line"));
                }
                header = Some((number::<usize>(line, words.get(1))?, number::<usize>(line, words.get(2))?));
            }
            "e" => edges.push((number::<VertexId>(line, words.get(1))?, number::<VertexId>(line, words.get(2))?)),
            "b" => holes.push((line, number::<VertexId>(line, words.get(1))?)),
            other => return Err(syntax(line, format!("unknown record `{other}`"))),
        }
    }
    let (vertices, edge_count) = header.ok_or_else(|| syntax(0, "missing `p <V> <E>` line"))?;
    if edges.len() != edge_count {
        return Err(syntax(0, format!("header promises {edge_count} edges, found {}", edges.len())));
    }
    let graph = Graph::from_edges(vertices, edges)?;
    let mut mask = vec![false; vertices];
    for (line, b) in holes {
        if b >= vertices {
            return Err(syntax(line, format!("black hole {b} out of range")));
        }
        mask[b] = true;
    }
    Ok((graph, mask))
}

pub fn write_edge_list(graph: &Graph, black_holes: Option<&[bool]>) -> String {
    let mut out = format!("p {} {}\n", graph.vertex_count(), graph.edge_count());
    for (u, v) in graph.edges() {
        out.push_str(&format!("e {u} {v}\n"));
    }
    if let Some(mask) = black_holes {
        for (b, _) in mask.iter().enumerate().filter(|(_, &x)| x) {
            out.push_str(&format!("b {b}\n"));
        }
    }
    out
}

/// Kernel output: the galactic edge list followed by the endpoint records.
pub fn write_galactic_instance(instance: &GalacticInstance) -> String {
    let g = &instance.galactic;
    let mut out = write_edge_list(g.graph(), Some(g.black_hole_mask()));
    out.push_str(&format!("r {}\nn {}\n", instance.radius, instance.agent_count()));
    for &s in &instance.start {
        out.push_str(&format!("s {s}\n"));
    }
    for &t in &instance.target {
        out.push_str(&format!("t {t}\n"));
    }
    out
}

pub fn parse_galactic_instance(text: &str) -> Result<GalacticInstance, FormatError> {
    let (graph_part, rest): (Vec<&str>, Vec<&str>) = text.lines().partition(|l| {
        let first = l.split_whitespace().next().unwrap_or("");
        matches!(first, "p" | "e" | "b")
    });
    let (graph, mask) = parse_edge_list(&graph_part.join("\n"))?;
    let mut radius = None;
    let mut start = Vec::new();
    let mut target = Vec::new();
    for (line, words) in content_lines(&rest.join("\n")) {
        match words[0] {
            "r" => radius = Some(number::<u32>(line, words.get(1))?),
            "n" => {}
            "s" => start.push(number::<VertexId>(line, words.get(1))?),
            "t" => target.push(number::<VertexId>(line, words.get(1))?),
            other => return Err(syntax(line, format!("unknown record `{other}`"))),
        }
    }
    Ok(GalacticInstance {
        galactic: GalacticGraph::with_black_holes(graph, mask),
        start,
        target,
        radius: radius.ok_or_else(|| syntax(0, "missing `r` line"))?,
    })
}

pub fn parse_plan(text: &str) -> Result<Plan, FormatError> {
    let mut steps = Vec::new();
    for (line, words) in content_lines(text) {
        let step: Result<Vec<VertexId>, _> = words.iter().map(|w| w.parse::<VertexId>()).collect();
        steps.push(Configuration(step.map_err(|_| syntax(line, "expected vertex ids"))?));
    }
    Ok(Plan::new(steps))
}

pub fn write_plan(plan: &Plan) -> String {
    let mut out = String::new();
    for step in plan.steps() {
        let words: Vec<String> = step.iter().map(|v| v.to_string()).collect();
        out.push_str(&words.join(" "));
        out.push('\n');
    }
    out
}
