use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use riumapf::instance::{bottleneck_lower_bound, plan_metrics};
use riumapf::lacam::{iu_lacam_solve_with, LacamOptions, LacamOutcome, DEFAULT_LIVELOCK_DEPTH};
use riumapf::oracle::{configuration_space_size, default_horizon_cap, exact_bfs_solve_within, ExactOutcome, DEFAULT_STATE_BUDGET};
use riumapf::pibt::run_pibt_within;
use riumapf::{Instance, Plan};
use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algo {
    Pibt,
    Lacam,
    Exact,
}

impl Algo {
    pub fn tag(self) -> &'static str {
        match self {
            Algo::Pibt => "pibt",
            Algo::Lacam => "lacam",
            Algo::Exact => "exact",
        }
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Algo {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pibt" => Ok(Algo::Pibt),
            "lacam" => Ok(Algo::Lacam),
            "exact" => Ok(Algo::Exact),
            other => Err(format!("unknown algorithm `{other}` (pibt, lacam, exact)")),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RunOptions {
    pub timeout: Duration,
    pub livelock_depth: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            timeout: Duration::from_secs(60),
            livelock_depth: DEFAULT_LIVELOCK_DEPTH,
        }
    }
}

/// Why a run ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Solved,
    Timeout,
    Infeasible,
    /// IU-PIBT used up its step budget.
    Stalled,
    /// Too many configurations for the exact search.
    TooLarge,
}

impl Status {
    pub fn reason(self) -> &'static str {
        match self {
            Status::Solved => "solved",
            Status::Timeout => "timeout",
            Status::Infeasible => "infeasible",
            Status::Stalled => "stalled",
            Status::TooLarge => "too-large",
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub status: Status,
    pub plan: Option<Plan>,
    pub elapsed: Duration,
}

/// One CSV row. Column order is part of the output format.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunRecord {
    pub map: String,
    pub n: usize,
    pub r: u32,
    pub seed: u64,
    pub algo: String,
    pub solved: bool,
    pub time_ms: f64,
    pub makespan: Option<usize>,
    pub lower_bound: Option<u32>,
    pub suboptimality: Option<f64>,
}

impl RunRecord {
    pub fn new(map: &str, instance: &Instance, seed: u64, algo: Algo, outcome: &RunOutcome) -> Self {
        let metrics = outcome.plan.as_ref().and_then(|p| plan_metrics(instance, p).ok());
        RunRecord {
            map: map.to_string(),
            n: instance.agent_count(),
            r: instance.radius(),
            seed,
            algo: algo.tag().to_string(),
            solved: metrics.is_some(),
            time_ms: round3(outcome.elapsed.as_secs_f64() * 1e3),
            makespan: metrics.map(|m| m.makespan),
            lower_bound: Some(bottleneck_lower_bound(instance)),
            suboptimality: metrics.map(|m| m.suboptimality),
        }
    }

    /// CSV row with no header, as printed by `solve`.
    pub fn csv_line(&self) -> String {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
        w.serialize(self).expect("in-memory write");
        String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
    }
}

fn round3(x: f64) -> f64 {
    (x * 1e3).round() / 1e3
}

pub fn run_algorithm(instance: &Instance, algo: Algo, options: &RunOptions) -> RunOutcome {
    let started = Instant::now();
    let (status, plan) = match algo {
        Algo::Pibt => {
            let budget = 10 * instance.agent_count().max(1) * instance.graph().vertex_count();
            match run_pibt_within(instance, budget, Some(options.timeout)) {
                Ok(plan) => (Status::Solved, Some(plan)),
                Err(s) if s.timed_out => (Status::Timeout, None),
                Err(_) => (Status::Stalled, None),
            }
        }
        Algo::Lacam => {
            let opts = LacamOptions {
                timeout: options.timeout,
                livelock_depth: Some(options.livelock_depth),
            };
            match iu_lacam_solve_with(instance, &opts).0 {
                LacamOutcome::Solved(plan) => (Status::Solved, Some(plan)),
                LacamOutcome::NoPlan => (Status::Infeasible, None),
                LacamOutcome::Timeout => (Status::Timeout, None),
            }
        }
        Algo::Exact => {
            let v = instance.graph().vertex_count();
            if configuration_space_size(v, instance.agent_count()) > DEFAULT_STATE_BUDGET as u128 {
                (Status::TooLarge, None)
            } else {
                match exact_bfs_solve_within(instance, default_horizon_cap(v), Some(started + options.timeout)) {
                    ExactOutcome::Optimal(plan) => (Status::Solved, Some(plan)),
                    ExactOutcome::Infeasible => (Status::Infeasible, None),
                    ExactOutcome::CapReached if started.elapsed() >= options.timeout => (Status::Timeout, None),
                    ExactOutcome::CapReached => (Status::TooLarge, None),
                }
            }
        }
    };
    RunOutcome {
        status,
        plan,
        elapsed: started.elapsed(),
    }
}
