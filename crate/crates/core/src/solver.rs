//! One entry point over every solver, and batch solving.

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::bnb::{list_schedule_ub, solve_jobshop, SearchLimits, SearchStats};
use crate::dp_dedicated::solve_dedicated;
use crate::dp_merge::{merge_by_release, solve_two_chains, DpStats};
use crate::error::{Error, Result};
use crate::model::{compute_active_times, Instance, Objective, ProblemKind, Schedule, ScheduleEval, Time};
use crate::oracle::{brute_dedicated, brute_jobshop, brute_two_chains};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    /// The exact solver for the instance kind.
    Auto,
    Dp,
    Bnb,
    Oracle,
    /// Release-order merge for two chains, list scheduling for crossroads.
    List,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Auto => "auto",
            Algorithm::Dp => "dp",
            Algorithm::Bnb => "bnb",
            Algorithm::Oracle => "oracle",
            Algorithm::List => "list",
        }
    }

    /// The concrete algorithm `self` stands for on `kind`.
    pub fn resolve(self, kind: ProblemKind) -> Result<Algorithm> {
        let fits = match (self, kind) {
            (Algorithm::Auto, ProblemKind::Crossroad) => return Ok(Algorithm::Bnb),
            (Algorithm::Auto, _) => return Ok(Algorithm::Dp),
            (Algorithm::Dp, k) => k != ProblemKind::Crossroad,
            (Algorithm::Bnb, k) => k == ProblemKind::Crossroad,
            (Algorithm::Oracle, _) => true,
            (Algorithm::List, k) => k != ProblemKind::DedicatedParallel,
        };
        if fits {
            Ok(self)
        } else {
            Err(Error::InvalidInstance(format!(
                "algorithm {} does not apply to {kind} instances",
                self.name()
            )))
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Algorithm::Auto),
            "dp" => Ok(Algorithm::Dp),
            "bnb" => Ok(Algorithm::Bnb),
            "oracle" => Ok(Algorithm::Oracle),
            "list" => Ok(Algorithm::List),
            other => Err(Error::Format(format!("unknown algorithm `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Work {
    States(DpStats),
    Search(SearchStats),
    None,
}

impl Work {
    /// DP states created or search nodes expanded.
    pub fn nodes(&self) -> Option<u64> {
        match self {
            Work::States(s) => Some(s.total_created() as u64),
            Work::Search(s) => Some(s.expanded),
            Work::None => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub algorithm: Algorithm,
    pub objective: Objective,
    pub schedule: Schedule,
    pub eval: ScheduleEval,
    pub value: Time,
    /// `value` is proven optimal.
    pub optimal: bool,
    pub work: Work,
    pub elapsed: Duration,
}

pub fn solve(instance: &Instance, objective: Objective, algorithm: Algorithm, limits: SearchLimits) -> Result<Outcome> {
    let started = Instant::now();
    let algorithm = algorithm.resolve(instance.kind())?;
    let (schedule, value, optimal, work) = match (algorithm, instance.kind()) {
        (Algorithm::Dp, ProblemKind::TwoChains) => {
            let s = solve_two_chains(instance, objective)?;
            (s.schedule, s.value, true, Work::States(s.stats))
        }
        (Algorithm::Dp, _) => {
            let s = solve_dedicated(instance, objective)?;
            (s.schedule, s.value, true, Work::States(s.stats))
        }
        (Algorithm::Bnb, _) => {
            let s = solve_jobshop(instance, objective, limits)?;
            (s.schedule, s.value, s.optimal, Work::Search(s.stats))
        }
        (Algorithm::Oracle, kind) => {
            let s = match kind {
                ProblemKind::TwoChains => brute_two_chains(instance, objective)?,
                ProblemKind::DedicatedParallel => brute_dedicated(instance, objective)?,
                ProblemKind::Crossroad => brute_jobshop(instance, objective)?,
            };
            (s.schedule, s.value, true, Work::None)
        }
        (Algorithm::List, ProblemKind::TwoChains) => {
            let schedule = Schedule::Sequence(merge_by_release(instance)?);
            let value = compute_active_times(instance, &schedule)?.objective_value(objective)?;
            (schedule, value, false, Work::None)
        }
        (Algorithm::List, _) => {
            let (schedule, value) = list_schedule_ub(instance, objective)?;
            (schedule, value, false, Work::None)
        }
        (Algorithm::Auto, _) => unreachable!("resolved above"),
    };
    let eval = compute_active_times(instance, &schedule)?;
    Ok(Outcome {
        algorithm,
        objective,
        schedule,
        eval,
        value,
        optimal,
        work,
        elapsed: started.elapsed(),
    })
}

/// Solves every instance, on the rayon pool when the `parallel` feature is
/// enabled. Results keep the input order.
pub fn solve_batch(
    instances: &[Instance],
    objective: Objective,
    algorithm: Algorithm,
    limits: SearchLimits,
) -> Vec<Result<Outcome>> {
    par::map(instances, |inst| solve(inst, objective, algorithm, limits))
}

pub fn solve_batch_sequential(
    instances: &[Instance],
    objective: Objective,
    algorithm: Algorithm,
    limits: SearchLimits,
) -> Vec<Result<Outcome>> {
    par::map_sequential(instances, |inst| solve(inst, objective, algorithm, limits))
}
