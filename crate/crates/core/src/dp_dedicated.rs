//! Dynamic program for two dedicated machines sharing a flexible chain.
//!
//! `N1` runs on machine 1 and `N3` on machine 3; each `N2` job picks either
//! machine, and the `N2` chain order holds across machines. A stage places
//! the next `N2` job on one machine after a chosen number of that machine's
//! dedicated jobs. The state keeps both chain positions, both machine
//! frontiers and the completion of the last `N2` job, since all three times
//! influence the remaining schedule.

use crate::dp_merge::DpStats;
use crate::error::{Error, Result};
use crate::model::{Instance, JobId, Machine, Objective, ProblemKind, Schedule, SetLabel, Time};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DedicatedState {
    pub f: Time,
    pub pos1: usize,
    pub pos3: usize,
    pub c1: Time,
    pub c3: Time,
    pub last_c: Time,
    /// Machine of the most recently placed `N2` job.
    pub machine: Machine,
    pub parent: Option<usize>,
}

impl DedicatedState {
    pub const INITIAL: DedicatedState = DedicatedState {
        f: 0,
        pos1: 0,
        pos3: 0,
        c1: 0,
        c3: 0,
        last_c: 0,
        machine: Machine::M1,
        parent: None,
    };

    fn dominates(&self, other: &DedicatedState) -> bool {
        self.f <= other.f && self.c1 <= other.c1 && self.c3 <= other.c3 && self.last_c <= other.last_c
    }
}

#[derive(Debug, Clone)]
pub struct DedicatedSolution {
    pub schedule: Schedule,
    pub value: Time,
    pub stats: DpStats,
}

pub fn solve_dedicated(instance: &Instance, objective: Objective) -> Result<DedicatedSolution> {
    solve_dedicated_with(instance, objective, true)
}

pub fn solve_dedicated_with(instance: &Instance, objective: Objective, prune: bool) -> Result<DedicatedSolution> {
    if instance.kind() != ProblemKind::DedicatedParallel {
        return Err(Error::KindMismatch(instance.kind()));
    }
    if !objective.is_sum() {
        return Err(Error::UnsupportedObjective {
            objective,
            kind: instance.kind(),
        });
    }
    let n1 = instance.chain(SetLabel::N1).len();
    let n3 = instance.chain(SetLabel::N3).len();
    let n2 = instance.chain(SetLabel::N2).len();
    let n = instance.n();
    let mut stats = DpStats {
        theta_bound: n * n,
        ..DpStats::default()
    };

    let mut stages = vec![vec![DedicatedState::INITIAL]];
    for k in 0..n2 {
        let previous = stages.last().expect("initial stage");
        let mut next = Vec::new();
        for (idx, state) in previous.iter().enumerate() {
            for pos in state.pos1..=n1 {
                let mut child = expand_state_dedicated(instance, objective, state, k, Machine::M1, pos);
                child.parent = Some(idx);
                next.push(child);
            }
            for pos in state.pos3..=n3 {
                let mut child = expand_state_dedicated(instance, objective, state, k, Machine::M3, pos);
                child.parent = Some(idx);
                next.push(child);
            }
        }
        stats.created.push(next.len());
        if prune {
            next = prune_dominated_dedicated(next);
        }
        stats.retained.push(next.len());
        stages.push(next);
    }

    let last = stages.last().expect("at least one stage");
    let (best, value) = last
        .iter()
        .enumerate()
        .map(|(i, s)| (i, finalize_dedicated(instance, objective, s)))
        .min_by_key(|&(i, v)| (v, i))
        .expect("final stage is never empty");
    let schedule = reconstruct(instance, &stages, best);
    Ok(DedicatedSolution { schedule, value, stats })
}

fn dedicated_set(machine: Machine) -> SetLabel {
    match machine {
        Machine::M3 => SetLabel::N3,
        _ => SetLabel::N1,
    }
}

/// Places `N2` job `k` (0-based) on `machine` after that machine's dedicated
/// jobs up to chain position `pos_prime`. The other machine is untouched.
pub fn expand_state_dedicated(
    instance: &Instance,
    objective: Objective,
    state: &DedicatedState,
    k: usize,
    machine: Machine,
    pos_prime: usize,
) -> DedicatedState {
    let own_set = dedicated_set(machine);
    let p_own = instance.proc_time(own_set);
    let own = instance.chain(own_set);
    let (pos, mut clock) = match machine {
        Machine::M3 => (state.pos3, state.c3),
        _ => (state.pos1, state.c1),
    };
    let mut f = state.f;
    for job in &own[pos..pos_prime] {
        clock = clock.max(job.release) + p_own;
        f += objective.contribution(job, clock);
    }
    let job = &instance.chain(SetLabel::N2)[k];
    clock = clock.max(job.release).max(state.last_c) + instance.proc_time(SetLabel::N2);
    f += objective.contribution(job, clock);

    let mut next = DedicatedState {
        f,
        last_c: clock,
        machine,
        parent: None,
        ..*state
    };
    match machine {
        Machine::M3 => {
            next.pos3 = pos_prime;
            next.c3 = clock;
        }
        _ => {
            next.pos1 = pos_prime;
            next.c1 = clock;
        }
    }
    next
}

/// Removes states dominated in `(f, c1, c3, last_c)` by a state with the same
/// `(pos1, pos3)`. Earlier states win ties.
pub fn prune_dominated_dedicated(states: Vec<DedicatedState>) -> Vec<DedicatedState> {
    let mut order: Vec<usize> = (0..states.len()).collect();
    order.sort_by_key(|&i| (states[i].pos1, states[i].pos3, states[i].f, i));
    let mut kept: Vec<DedicatedState> = Vec::with_capacity(states.len());
    let mut group_start = 0;
    for i in order {
        let s = states[i];
        if kept
            .get(group_start)
            .is_some_and(|g| (g.pos1, g.pos3) != (s.pos1, s.pos3))
        {
            group_start = kept.len();
        }
        if kept[group_start..].iter().any(|k| k.dominates(&s)) {
            continue;
        }
        kept.push(s);
    }
    kept
}

/// Total objective after appending both residual dedicated chains.
pub fn finalize_dedicated(instance: &Instance, objective: Objective, state: &DedicatedState) -> Time {
    let mut f = state.f;
    for (set, pos, start) in [
        (SetLabel::N1, state.pos1, state.c1),
        (SetLabel::N3, state.pos3, state.c3),
    ] {
        let p = instance.proc_time(set);
        let mut clock = start;
        for job in &instance.chain(set)[pos..] {
            clock = clock.max(job.release) + p;
            f += objective.contribution(job, clock);
        }
    }
    f
}

fn reconstruct(instance: &Instance, stages: &[Vec<DedicatedState>], best: usize) -> Schedule {
    let n2 = instance.chain(SetLabel::N2);
    let ids = |set: SetLabel, from: usize, to: usize| -> Vec<JobId> {
        instance.chain(set)[from..to].iter().map(|j| j.id).collect()
    };
    let mut blocks1: Vec<Vec<JobId>> = Vec::new();
    let mut blocks3: Vec<Vec<JobId>> = Vec::new();
    let top = stages.len() - 1;
    let end = stages[top][best];
    blocks1.push(ids(SetLabel::N1, end.pos1, instance.chain(SetLabel::N1).len()));
    blocks3.push(ids(SetLabel::N3, end.pos3, instance.chain(SetLabel::N3).len()));

    let (mut stage, mut idx) = (top, best);
    while stage > 0 {
        let state = stages[stage][idx];
        let parent_idx = state.parent.expect("non-initial state has a parent");
        let parent = stages[stage - 1][parent_idx];
        let (mut block, target) = match state.machine {
            Machine::M3 => (ids(SetLabel::N3, parent.pos3, state.pos3), &mut blocks3),
            _ => (ids(SetLabel::N1, parent.pos1, state.pos1), &mut blocks1),
        };
        block.push(n2[stage - 1].id);
        target.push(block);
        stage -= 1;
        idx = parent_idx;
    }
    Schedule::Dedicated {
        machine1: blocks1.into_iter().rev().flatten().collect(),
        machine3: blocks3.into_iter().rev().flatten().collect(),
    }
}
