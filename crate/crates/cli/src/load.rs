use std::fs;
use std::path::Path;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use riumapf::format::{parse_edge_list, parse_instance};
use riumapf::{Graph, GridMap, Instance};

/// A graph read from disk, with the grid it came from when there is one.
#[derive(Clone, Debug)]
pub struct LoadedGraph {
    /// File stem, used as the map column of run records.
    pub name: String,
    pub graph: Arc<Graph>,
    pub grid: Option<GridMap>,
}

/// Reads a MovingAI `.map` grid or a `p`/`e` edge list, by content.
pub fn load_graph(path: &Path) -> Result<LoadedGraph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "graph".into());
    let first = text
        .lines()
        .filter_map(|l| l.split('#').next()?.split_whitespace().next())
        .next()
        .unwrap_or("");
    let (graph, grid) = match first {
        "type" => {
            let grid = GridMap::parse(&text).with_context(|| format!("parsing map {}", path.display()))?;
            let graph = grid.to_graph().with_context(|| format!("map {}", path.display()))?;
            (graph, Some(grid))
        }
        "p" | "e" => {
            let (graph, holes) = parse_edge_list(&text).with_context(|| format!("parsing {}", path.display()))?;
            if holes.iter().any(|&b| b) {
                bail!("{} marks black holes; solvers take plain graphs", path.display());
            }
            (graph, None)
        }
        _ => bail!("{}: neither a grid map nor an edge list", path.display()),
    };
    Ok(LoadedGraph {
        name,
        graph: Arc::new(graph),
        grid,
    })
}

/// Reads an instance for `loaded`, optionally replacing its radius.
pub fn load_instance(loaded: &LoadedGraph, path: &Path, radius: Option<u32>) -> Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let inst = parse_instance(&text, loaded.graph.clone(), loaded.grid.as_ref())
        .with_context(|| format!("parsing instance {}", path.display()))?;
    match radius {
        Some(r) if r != inst.radius() => inst.with_radius(r).context("radius override"),
        _ => Ok(inst),
    }
}
