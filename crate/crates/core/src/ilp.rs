//! Bounded rIUMAPF as a 0/1 integer feasibility program, its galactic
//! variant, LP-format export, and a small exhaustive feasibility checker.
//!
//! Variables: `x_v{v}_t{t}` (an agent occupies `v` at step `t`) for
//! `t in 0..=tau`, and `f_u{u}_v{v}_t{t}` (an agent moves from `u` to
//! `v in N[u]` between `t` and `t + 1`) for `t in 0..tau`.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::io;

use thiserror::Error;

use crate::graph::{BallTable, Graph, VertexId};
use crate::instance::Instance;
use crate::kernel::GalacticInstance;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IlpError {
    #[error("galactic precondition violated: {0}")]
    PreconditionViolated(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Eq,
    Le,
    Ge,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub lower: i64,
    pub upper: i64,
    /// `2t` for occupancy at step `t`, `2t + 1` for moves out of step `t`.
    pub stage: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub name: String,
    pub terms: Vec<(usize, i64)>,
    pub sense: Sense,
    pub rhs: i64,
}

impl Row {
    fn holds(&self, values: &[i64]) -> bool {
        let lhs: i64 = self.terms.iter().map(|&(v, c)| c * values[v]).sum();
        match self.sense {
            Sense::Eq => lhs == self.rhs,
            Sense::Le => lhs <= self.rhs,
            Sense::Ge => lhs >= self.rhs,
        }
    }
}

/// Feasibility model with a constant objective.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IlpModel {
    variables: Vec<Variable>,
    rows: Vec<Row>,
    index: HashMap<String, usize>,
}

impl IlpModel {
    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// True when `values` (one per variable) respects every bound and row.
    pub fn is_satisfied_by(&self, values: &[i64]) -> bool {
        values.len() == self.variables.len()
            && self
                .variables
                .iter()
                .zip(values)
                .all(|(v, &x)| v.lower <= x && x <= v.upper)
            && self.rows.iter().all(|r| r.holds(values))
    }

    fn add_var(&mut self, name: String, upper: i64, stage: usize) -> usize {
        let id = self.variables.len();
        self.index.insert(name.clone(), id);
        self.variables.push(Variable {
            name,
            lower: 0,
            upper,
            stage,
        });
        id
    }

    fn add_row(&mut self, name: String, terms: Vec<(usize, i64)>, sense: Sense, rhs: i64) {
        self.rows.push(Row {
            name,
            terms,
            sense,
            rhs,
        });
    }
}

pub fn x_name(v: VertexId, t: usize) -> String {
    format!("x_v{v}_t{t}")
}

pub fn f_name(u: VertexId, v: VertexId, t: usize) -> String {
    format!("f_u{u}_v{v}_t{t}")
}

pub fn build_bounded_model(instance: &Instance, tau: usize) -> IlpModel {
    let graph = instance.graph();
    let balls = BallTable::new(graph, instance.radius());
    build(
        graph,
        None,
        &balls,
        instance.start(),
        instance.target(),
        instance.agent_count() as i64,
        tau,
    )
}

/// Black-hole occupancy is bounded by `n` instead of 1, so are moves between
/// black holes (staying included); independence rows cover planet pairs at
/// planet-subgraph distance `<= r`.
pub fn build_galactic_model(instance: &GalacticInstance, tau: usize) -> Result<IlpModel, IlpError> {
    instance
        .check_preconditions()
        .map_err(IlpError::PreconditionViolated)?;
    let g = &instance.galactic;
    let balls = BallTable::masked(g.graph(), instance.radius, &g.planet_mask());
    Ok(build(
        g.graph(),
        Some(g.black_hole_mask()),
        &balls,
        &instance.start,
        &instance.target,
        instance.start.len() as i64,
        tau,
    ))
}

fn build(
    graph: &Graph,
    black_hole: Option<&[bool]>,
    balls: &BallTable,
    start: &[VertexId],
    target: &[VertexId],
    n: i64,
    tau: usize,
) -> IlpModel {
    let vcount = graph.vertex_count();
    let is_bh = |v: VertexId| black_hole.is_some_and(|m| m[v]);
    let mut model = IlpModel::default();

    let mut x = vec![vec![0; vcount]; tau + 1];
    for (t, layer) in x.iter_mut().enumerate() {
        for (v, slot) in layer.iter_mut().enumerate() {
            *slot = model.add_var(x_name(v, t), if is_bh(v) { n } else { 1 }, 2 * t);
        }
    }
    // f[t][u] lists (v, var) over v in N[u]
    let mut f: Vec<Vec<Vec<(VertexId, usize)>>> = Vec::with_capacity(tau);
    for t in 0..tau {
        let mut layer = Vec::with_capacity(vcount);
        for u in 0..vcount {
            let outs = graph
                .closed_neighborhood(u)
                .into_iter()
                .map(|v| {
                    let upper = if is_bh(u) && is_bh(v) { n } else { 1 };
                    (v, model.add_var(f_name(u, v, t), upper, 2 * t + 1))
                })
                .collect();
            layer.push(outs);
        }
        f.push(layer);
    }

    let mut in_start = vec![0; vcount];
    let mut in_target = vec![0; vcount];
    for &s in start {
        in_start[s] += 1;
    }
    for &t in target {
        in_target[t] += 1;
    }
    for v in 0..vcount {
        model.add_row(format!("start_v{v}"), vec![(x[0][v], 1)], Sense::Eq, in_start[v]);
    }
    for v in 0..vcount {
        model.add_row(format!("goal_v{v}"), vec![(x[tau][v], 1)], Sense::Eq, in_target[v]);
    }
    for t in 0..tau {
        for u in 0..vcount {
            let mut terms: Vec<(usize, i64)> = f[t][u].iter().map(|&(_, var)| (var, 1)).collect();
            terms.push((x[t][u], -1));
            model.add_row(format!("out_u{u}_t{t}"), terms, Sense::Eq, 0);
        }
    }
    for (t, layer) in x.iter().enumerate().skip(1) {
        for (u, &arrive) in layer.iter().enumerate() {
            let mut terms: Vec<(usize, i64)> = graph
                .closed_neighborhood(u)
                .into_iter()
                .map(|v| {
                    let var = f[t - 1][v]
                        .iter()
                        .find(|&&(w, _)| w == u)
                        .expect("u is in N[v]")
                        .1;
                    (var, 1)
                })
                .collect();
            terms.push((arrive, -1));
            model.add_row(format!("in_u{u}_t{t}"), terms, Sense::Eq, 0);
        }
    }
    for (t, layer) in x.iter().enumerate() {
        for u in 0..vcount {
            for &v in balls.ball(u) {
                if u < v {
                    model.add_row(
                        format!("sep_u{u}_v{v}_t{t}"),
                        vec![(layer[u], 1), (layer[v], 1)],
                        Sense::Le,
                        1,
                    );
                }
            }
        }
    }
    model
}

/// CPLEX-LP text. Identical models give identical bytes.
pub fn export_lp<W: io::Write>(model: &IlpModel, sink: &mut W) -> io::Result<()> {
    sink.write_all(lp_string(model).as_bytes())
}

pub fn lp_string(model: &IlpModel) -> String {
    let mut out = String::from("Minimize\n obj: 0\nSubject To\n");
    for row in &model.rows {
        let _ = write!(out, " {}:", row.name);
        for (k, &(var, coef)) in row.terms.iter().enumerate() {
            let name = &model.variables[var].name;
            let sign = if coef < 0 { "-" } else { "+" };
            let mag = coef.abs();
            match (k, mag) {
                (0, 1) if coef > 0 => {
                    let _ = write!(out, " {name}");
                }
                (0, _) if coef > 0 => {
                    let _ = write!(out, " {mag} {name}");
                }
                (_, 1) => {
                    let _ = write!(out, " {sign} {name}");
                }
                _ => {
                    let _ = write!(out, " {sign} {mag} {name}");
                }
            }
        }
        let op = match row.sense {
            Sense::Eq => "=",
            Sense::Le => "<=",
            Sense::Ge => ">=",
        };
        let _ = writeln!(out, " {op} {}", row.rhs);
    }
    if !model.variables.is_empty() {
        out.push_str("Bounds\n");
        for v in &model.variables {
            let _ = writeln!(out, " {} <= {} <= {}", v.lower, v.name, v.upper);
        }
        out.push_str("Generals\n");
        for v in &model.variables {
            let _ = writeln!(out, " {}", v.name);
        }
    }
    out.push_str("End\n");
    out
}

/// Exhaustive feasibility check that reads nothing but the model's bounds,
/// rows and variable stages.
///
/// Stages are swept in order. The frontier holds every distinct assignment
/// of the current occupancy stage that extends some feasible assignment of
/// the earlier stages; each frontier entry is extended over the next move
/// and occupancy stages by backtracking with row-activity bounds. Rows must
/// only span three consecutive stages starting at an occupancy stage, which
/// holds for both builders here.
pub fn naive_feasible(model: &IlpModel) -> bool {
    if model.variables.is_empty() {
        return model.rows.iter().all(|r| r.holds(&[]));
    }
    let last_stage = model.variables.iter().map(|v| v.stage).max().unwrap_or(0);
    let mut by_stage: Vec<Vec<usize>> = vec![Vec::new(); last_stage + 1];
    for (id, v) in model.variables.iter().enumerate() {
        by_stage[v.stage].push(id);
    }
    let mut rows_by_top: Vec<Vec<usize>> = vec![Vec::new(); last_stage + 1];
    for (r, row) in model.rows.iter().enumerate() {
        let top = row.terms.iter().map(|&(v, _)| model.variables[v].stage).max();
        match top {
            Some(top) => rows_by_top[top].push(r),
            None => {
                if !row.holds(&[]) {
                    return false;
                }
            }
        }
    }

    let mut values: Vec<Option<i64>> = vec![None; model.variables.len()];
    let mut frontier: HashSet<Vec<i64>> = HashSet::new();
    let first = &by_stage[0];
    let rows: Vec<usize> = rows_by_top[0].clone();
    extend(model, first, &rows, &mut values, &mut |vals| {
        frontier.insert(first.iter().map(|&v| vals[v].expect("assigned")).collect());
    });

    let mut stage = 0;
    while stage + 2 <= last_stage && !frontier.is_empty() {
        let mut window: Vec<usize> = by_stage[stage + 1].clone();
        window.extend_from_slice(&by_stage[stage + 2]);
        let mut rows: Vec<usize> = rows_by_top[stage + 1].clone();
        rows.extend_from_slice(&rows_by_top[stage + 2]);
        let current = &by_stage[stage];
        let next_vars = &by_stage[stage + 2];
        let mut next: HashSet<Vec<i64>> = HashSet::new();
        let mut sorted: Vec<&Vec<i64>> = frontier.iter().collect();
        sorted.sort();
        for assignment in sorted {
            values.iter_mut().for_each(|v| *v = None);
            for (&var, &val) in current.iter().zip(assignment) {
                values[var] = Some(val);
            }
            extend(model, &window, &rows, &mut values, &mut |vals| {
                next.insert(next_vars.iter().map(|&v| vals[v].expect("assigned")).collect());
            });
        }
        frontier = next;
        stage += 2;
    }
    !frontier.is_empty()
}

fn extend(
    model: &IlpModel,
    vars: &[usize],
    rows: &[usize],
    values: &mut Vec<Option<i64>>,
    emit: &mut dyn FnMut(&[Option<i64>]),
) {
    let mut rows_of: HashMap<usize, Vec<usize>> = HashMap::new();
    for &r in rows {
        for &(v, _) in &model.rows[r].terms {
            rows_of.entry(v).or_default().push(r);
        }
    }
    // rows touching none of `vars` are fully determined already
    for &r in rows {
        if !row_possible(model, r, values) {
            return;
        }
    }
    backtrack(model, vars, 0, &rows_of, values, emit);
    for &v in vars {
        values[v] = None;
    }
}

fn backtrack(
    model: &IlpModel,
    vars: &[usize],
    k: usize,
    rows_of: &HashMap<usize, Vec<usize>>,
    values: &mut Vec<Option<i64>>,
    emit: &mut dyn FnMut(&[Option<i64>]),
) {
    let Some(&var) = vars.get(k) else {
        emit(values);
        return;
    };
    let (lo, hi) = (model.variables[var].lower, model.variables[var].upper);
    for val in lo..=hi {
        values[var] = Some(val);
        let ok = rows_of
            .get(&var)
            .is_none_or(|rs| rs.iter().all(|&r| row_possible(model, r, values)));
        if ok {
            backtrack(model, vars, k + 1, rows_of, values, emit);
        }
    }
    values[var] = None;
}

fn row_possible(model: &IlpModel, r: usize, values: &[Option<i64>]) -> bool {
    let row = &model.rows[r];
    let (mut lo, mut hi) = (0i64, 0i64);
    for &(v, c) in &row.terms {
        match values[v] {
            Some(x) => {
                lo += c * x;
                hi += c * x;
            }
            None => {
                let var = &model.variables[v];
                let (a, b) = (c * var.lower, c * var.upper);
                lo += a.min(b);
                hi += a.max(b);
            }
        }
    }
    match row.sense {
        Sense::Eq => lo <= row.rhs && row.rhs <= hi,
        Sense::Le => lo <= row.rhs,
        Sense::Ge => hi >= row.rhs,
    }
}
