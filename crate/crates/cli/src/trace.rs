//! Static SVG frames of a plan on a grid map, one per step.

use std::fmt::Write as _;

use riumapf::graph::BallTable;
use riumapf::{Graph, GridMap, Plan};

const CELL: usize = 16;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

/// Frame `t` of `plan`: obstacles, each agent as a disc, and its radius-`r`
/// ball shaded as a halo. Halo groups carry `data-r`.
pub fn render_frame(grid: &GridMap, graph: &Graph, balls: &BallTable, plan: &Plan, t: usize) -> String {
    let (w, h) = (grid.width() * CELL, grid.height() * CELL);
    let mut svg = String::new();
    let r = balls.radius();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}" data-step="{t}" data-r="{r}">"#
    );
    let _ = writeln!(svg, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    for row in 0..grid.height() {
        for col in 0..grid.width() {
            if !grid.is_passable(row, col) {
                let _ = writeln!(
                    svg,
                    r##"<rect x="{}" y="{}" width="{CELL}" height="{CELL}" fill="#333"/>"##,
                    col * CELL,
                    row * CELL
                );
            }
        }
    }
    let config = &plan.steps()[t];
    for (agent, &v) in config.iter().enumerate() {
        let colour = PALETTE[agent % PALETTE.len()];
        let _ = writeln!(svg, r#"<g class="halo" data-agent="{agent}" data-r="{r}" fill="{colour}" fill-opacity="0.15">"#);
        for &u in balls.ball(v) {
            let (row, col) = graph.coords(u).expect("grid graphs carry coordinates");
            let _ = writeln!(
                svg,
                r#"<rect x="{}" y="{}" width="{CELL}" height="{CELL}"/>"#,
                col * CELL,
                row * CELL
            );
        }
        svg.push_str("</g>\n");
        let (row, col) = graph.coords(v).expect("grid graphs carry coordinates");
        let _ = writeln!(
            svg,
            r#"<circle class="agent" data-agent="{agent}" cx="{}" cy="{}" r="{}" fill="{colour}"/>"#,
            col * CELL + CELL / 2,
            row * CELL + CELL / 2,
            CELL * 2 / 5
        );
    }
    svg.push_str("</svg>\n");
    svg
}

/// Every frame, `makespan + 1` of them.
pub fn render_frames(grid: &GridMap, graph: &Graph, radius: u32, plan: &Plan) -> Vec<String> {
    let balls = BallTable::new(graph, radius);
    (0..plan.steps().len())
        .map(|t| render_frame(grid, graph, &balls, plan, t))
        .collect()
}
