//! Dynamic program for two chains merging onto a single machine.
//!
//! The `N2` jobs are inserted one stage at a time in chain order. A state
//! records the objective value `f` of the partial sequence, the completion
//! time `c_max` of its last `N2` job and `pos`, the number of `N1` jobs placed
//! before it. Expanding a state by `pos' >= pos` appends `N1` jobs
//! `pos+1..=pos'` and then the next `N2` job. Within a stage, a state is
//! dropped when another state with the same `pos` is no worse in both `f`
//! and `c_max`: every completion of the dropped state is matched by one of
//! the survivor at no higher cost, because all objectives are regular.
//!
//! Per-lane processing times are looked up by set, so the same program
//! handles the variant where side-road vehicles need a different time.

use crate::error::{Error, Result};
use crate::model::{Instance, Job, JobId, Objective, ProblemKind, ProcTimes, Schedule, SetLabel, Time};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DpState {
    pub f: Time,
    pub c_max: Time,
    pub pos: usize,
    /// Index of the parent in the previous stage's retained states.
    pub parent: Option<usize>,
}

impl DpState {
    pub const INITIAL: DpState = DpState {
        f: 0,
        c_max: 0,
        pos: 0,
        parent: None,
    };
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DpStats {
    /// States generated at each stage, before pruning.
    pub created: Vec<usize>,
    /// States kept at each stage.
    pub retained: Vec<usize>,
    /// Upper bound on the number of distinct `c_max` values.
    pub theta_bound: usize,
}

impl DpStats {
    pub fn total_created(&self) -> usize {
        self.created.iter().sum()
    }

    pub fn max_retained(&self) -> usize {
        self.retained.iter().copied().max().unwrap_or(0)
    }
}

#[derive(Debug, Clone)]
pub struct DpSolution {
    pub schedule: Schedule,
    pub sequence: Vec<JobId>,
    pub value: Time,
    pub stats: DpStats,
}

#[derive(Debug, Clone, Copy)]
pub struct DpOptions {
    /// Apply dominance pruning after every stage.
    pub prune: bool,
}

impl Default for DpOptions {
    fn default() -> Self {
        DpOptions { prune: true }
    }
}

pub fn solve_two_chains(instance: &Instance, objective: Objective) -> Result<DpSolution> {
    solve_two_chains_with(instance, objective, DpOptions::default())
}

pub fn solve_two_chains_with(instance: &Instance, objective: Objective, options: DpOptions) -> Result<DpSolution> {
    if instance.kind() != ProblemKind::TwoChains {
        return Err(Error::KindMismatch(instance.kind()));
    }
    if !objective.is_sum() {
        return Err(Error::UnsupportedObjective {
            objective,
            kind: instance.kind(),
        });
    }
    let n1 = instance.chain(SetLabel::N1).len();
    let n2 = instance.chain(SetLabel::N2).len();

    let mut stats = DpStats {
        theta_bound: theta_bound(instance),
        ..DpStats::default()
    };
    let mut stages: Vec<Vec<DpState>> = vec![vec![DpState::INITIAL]];
    for k in 0..n2 {
        let previous = stages.last().expect("initial stage");
        let mut next = Vec::new();
        for (idx, state) in previous.iter().enumerate() {
            for pos_prime in state.pos..=n1 {
                let mut child = expand_state(instance, objective, state, k, pos_prime);
                child.parent = Some(idx);
                next.push(child);
            }
        }
        stats.created.push(next.len());
        if options.prune {
            next = prune_dominated(next);
        }
        stats.retained.push(next.len());
        stages.push(next);
    }

    let last = stages.last().expect("at least one stage");
    let (best, value) = last
        .iter()
        .enumerate()
        .map(|(i, s)| (i, finalize(instance, objective, s).1))
        .min_by_key(|&(i, v)| (v, i))
        .expect("final stage is never empty");
    let mut sequence = partial_sequence(instance, &stages, stages.len() - 1, best);
    sequence.extend(remaining_n1(instance, last[best].pos));

    Ok(DpSolution {
        schedule: Schedule::Sequence(sequence.clone()),
        sequence,
        value,
        stats,
    })
}

/// Appends `N1` jobs up to `pos_prime` and then `N2` job `k` (0-based) to the
/// partial solution of `state`. The returned state has no parent set.
pub fn expand_state(instance: &Instance, objective: Objective, state: &DpState, k: usize, pos_prime: usize) -> DpState {
    let n1 = instance.chain(SetLabel::N1);
    let p1 = instance.proc_time(SetLabel::N1);
    let mut clock = state.c_max;
    let mut f = state.f;
    for job in &n1[state.pos..pos_prime] {
        clock = clock.max(job.release) + p1;
        f += objective.contribution(job, clock);
    }
    let job = &instance.chain(SetLabel::N2)[k];
    clock = clock.max(job.release) + instance.proc_time(SetLabel::N2);
    f += objective.contribution(job, clock);
    DpState {
        f,
        c_max: clock,
        pos: pos_prime,
        parent: None,
    }
}

/// Removes states dominated by another state with the same `pos`. Among
/// identical `(f, c_max)` pairs the earliest one survives. Output is ordered
/// by `pos`, then `c_max`.
pub fn prune_dominated(mut states: Vec<DpState>) -> Vec<DpState> {
    states.sort_by_key(|s| (s.pos, s.c_max, s.f));
    let mut kept: Vec<DpState> = Vec::with_capacity(states.len());
    let mut best_f: Option<(usize, Time)> = None;
    for s in states {
        match best_f {
            Some((pos, f)) if pos == s.pos && f <= s.f => continue,
            _ => {
                best_f = Some((s.pos, s.f));
                kept.push(s);
            }
        }
    }
    kept
}

/// Completes `state` with the remaining `N1` jobs; returns the appended jobs
/// and the total objective value.
pub fn finalize(instance: &Instance, objective: Objective, state: &DpState) -> (Vec<JobId>, Time) {
    let p1 = instance.proc_time(SetLabel::N1);
    let tail = &instance.chain(SetLabel::N1)[state.pos..];
    let mut clock = state.c_max;
    let mut f = state.f;
    for job in tail {
        clock = clock.max(job.release) + p1;
        f += objective.contribution(job, clock);
    }
    (tail.iter().map(|j| j.id).collect(), f)
}

fn remaining_n1(instance: &Instance, pos: usize) -> impl Iterator<Item = JobId> + '_ {
    instance.chain(SetLabel::N1)[pos..].iter().map(|j| j.id)
}

fn partial_sequence(instance: &Instance, stages: &[Vec<DpState>], stage: usize, idx: usize) -> Vec<JobId> {
    let n1 = instance.chain(SetLabel::N1);
    let n2 = instance.chain(SetLabel::N2);
    let mut blocks = Vec::with_capacity(stage);
    let (mut stage, mut idx) = (stage, idx);
    while stage > 0 {
        let state = stages[stage][idx];
        let parent_idx = state.parent.expect("non-initial state has a parent");
        let parent = stages[stage - 1][parent_idx];
        let mut block: Vec<JobId> = n1[parent.pos..state.pos].iter().map(|j| j.id).collect();
        block.push(n2[stage - 1].id);
        blocks.push(block);
        stage -= 1;
        idx = parent_idx;
    }
    blocks.into_iter().rev().flatten().collect()
}

/// Number of candidate `c_max` values: `n^2` for equal processing times,
/// `n (n1 + 1) (n2 + 1)` with one time per lane.
pub fn theta_bound(instance: &Instance) -> usize {
    let n = instance.n();
    match instance.proc_times() {
        ProcTimes::Equal(_) => n * n,
        ProcTimes::PerLane { .. } => {
            let n1 = instance.chain(SetLabel::N1).len();
            let n2 = instance.chain(SetLabel::N2).len();
            n * (n1 + 1) * (n2 + 1)
        }
    }
}

/// Merges both chains by non-decreasing release date, `N1` first on ties.
/// Optimal for total completion time when processing times are equal.
pub fn merge_by_release(instance: &Instance) -> Result<Vec<JobId>> {
    if instance.kind() != ProblemKind::TwoChains {
        return Err(Error::KindMismatch(instance.kind()));
    }
    let a: &[Job] = instance.chain(SetLabel::N1);
    let b: &[Job] = instance.chain(SetLabel::N2);
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::with_capacity(a.len() + b.len());
    while i < a.len() || j < b.len() {
        let take_a = j == b.len() || (i < a.len() && a[i].release <= b[j].release);
        if take_a {
            out.push(a[i].id);
            i += 1;
        } else {
            out.push(b[j].id);
            j += 1;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{evaluate_single_sequence, JobSpec};

    fn worked_example() -> Instance {
        Instance::new(
            ProblemKind::TwoChains,
            ProcTimes::Equal(2),
            vec![
                vec![JobSpec::new(1, 0), JobSpec::new(2, 3)],
                vec![JobSpec::new(3, 1).due(3), JobSpec::new(4, 4).due(6)],
            ],
            None,
        )
        .unwrap()
    }

    fn ids(raw: &[u32]) -> Vec<JobId> {
        raw.iter().copied().map(JobId).collect()
    }

    fn st(f: Time, c_max: Time, pos: usize) -> DpState {
        DpState {
            f,
            c_max,
            pos,
            parent: None,
        }
    }

    #[test]
    fn worked_example_optima() {
        let inst = worked_example();
        let tardy = solve_two_chains(&inst, Objective::SumT).unwrap();
        assert_eq!(tardy.value, 0);
        assert_eq!(tardy.sequence, ids(&[3, 4, 1, 2]));

        let flow = solve_two_chains(&inst, Objective::SumC).unwrap();
        assert_eq!(flow.value, 20);
        let eval = evaluate_single_sequence(&inst, &flow.sequence).unwrap();
        assert_eq!(eval.sum_c, 20);
    }

    #[test]
    fn empty_second_chain() {
        let inst = Instance::new(
            ProblemKind::TwoChains,
            ProcTimes::Equal(2),
            vec![vec![JobSpec::new(1, 0), JobSpec::new(2, 3)], vec![]],
            None,
        )
        .unwrap();
        let sol = solve_two_chains(&inst, Objective::SumC).unwrap();
        assert_eq!(sol.sequence, ids(&[1, 2]));
        assert_eq!(sol.value, 7);
    }

    #[test]
    fn empty_instance() {
        let inst = Instance::new(ProblemKind::TwoChains, ProcTimes::Equal(1), vec![vec![], vec![]], None).unwrap();
        let sol = solve_two_chains(&inst, Objective::SumWT).unwrap();
        assert_eq!(sol.value, 0);
        assert!(sol.sequence.is_empty());
    }

    #[test]
    fn rejects_makespan() {
        assert!(matches!(
            solve_two_chains(&worked_example(), Objective::Cmax),
            Err(Error::UnsupportedObjective { .. })
        ));
    }

    #[test]
    fn expand_from_initial_state() {
        let inst = worked_example();
        let s = expand_state(&inst, Objective::SumC, &DpState::INITIAL, 0, 1);
        assert_eq!((s.f, s.c_max, s.pos), (6, 4, 1));
        let s = expand_state(&inst, Objective::SumC, &s, 1, 1);
        assert_eq!((s.f, s.c_max, s.pos), (12, 6, 1));
        let s = expand_state(&inst, Objective::SumC, &DpState::INITIAL, 0, 0);
        assert_eq!((s.f, s.c_max, s.pos), (3, 3, 0));
    }

    #[test]
    fn finalize_appends_rest_of_first_chain() {
        let inst = worked_example();
        let (tail, v) = finalize(&inst, Objective::SumC, &st(12, 6, 1));
        assert_eq!((tail, v), (ids(&[2]), 20));
        let (tail, v) = finalize(&inst, Objective::SumC, &st(9, 7, 2));
        assert_eq!((tail, v), (vec![], 9));
        let (tail, v) = finalize(&inst, Objective::SumT, &st(0, 6, 0));
        assert_eq!((tail, v), (ids(&[1, 2]), 0));
    }

    #[test]
    fn dominance() {
        assert_eq!(prune_dominated(vec![st(5, 10, 2), st(7, 12, 2)]), vec![st(5, 10, 2)]);
        assert_eq!(prune_dominated(vec![st(5, 12, 2), st(7, 10, 2)]).len(), 2);
        assert_eq!(prune_dominated(vec![st(5, 10, 2), st(5, 10, 3)]).len(), 2);
        let first = DpState {
            parent: Some(0),
            ..st(4, 4, 1)
        };
        let second = DpState {
            parent: Some(1),
            ..st(4, 4, 1)
        };
        assert_eq!(prune_dominated(vec![first, second]), vec![first]);
    }

    #[test]
    fn release_merge() {
        let inst = worked_example();
        let seq = merge_by_release(&inst).unwrap();
        assert_eq!(seq, ids(&[1, 3, 2, 4]));
        assert_eq!(evaluate_single_sequence(&inst, &seq).unwrap().sum_c, 20);

        let ties = Instance::new(
            ProblemKind::TwoChains,
            ProcTimes::Equal(1),
            vec![
                vec![JobSpec::new(1, 2), JobSpec::new(2, 2)],
                vec![JobSpec::new(3, 2), JobSpec::new(4, 2)],
            ],
            None,
        )
        .unwrap();
        assert_eq!(merge_by_release(&ties).unwrap(), ids(&[1, 2, 3, 4]));

        let only_second = Instance::new(
            ProblemKind::TwoChains,
            ProcTimes::Equal(1),
            vec![vec![], vec![JobSpec::new(3, 5), JobSpec::new(4, 1)]],
            None,
        )
        .unwrap();
        assert_eq!(merge_by_release(&only_second).unwrap(), ids(&[3, 4]));
    }

    #[test]
    fn stats_are_recorded_per_stage() {
        let sol = solve_two_chains(&worked_example(), Objective::SumWC).unwrap();
        assert_eq!(sol.stats.created.len(), 2);
        assert_eq!(sol.stats.created[0], 3);
        assert!(sol.stats.retained.iter().zip(&sol.stats.created).all(|(r, c)| r <= c));
        assert_eq!(sol.stats.theta_bound, 16);
    }
}
