//! Active (earliest-start) timing of fixed processing orders.

use std::collections::HashMap;

use super::{Instance, JobId, Machine, Op, OpRef, OpTiming, ProblemKind, Schedule, ScheduleEval, Time};
use crate::error::{Error, Result};

/// Times a single-machine permutation: every job starts at
/// `max(release, completion of the previous job)`.
pub fn evaluate_single_sequence(instance: &Instance, sequence: &[JobId]) -> Result<ScheduleEval> {
    if instance.kind() != ProblemKind::TwoChains {
        return Err(Error::KindMismatch(instance.kind()));
    }
    check_permutation(instance, sequence)?;
    let mut ops = Vec::with_capacity(sequence.len());
    let mut clock = 0;
    for &id in sequence {
        let job = instance.job(id).ok_or(Error::UnknownJob(id))?;
        let start = clock.max(job.release);
        clock = start + instance.proc_time(job.set);
        ops.push(OpTiming {
            op: OpRef::first(id),
            machine: Machine::M1,
            start,
            completion: clock,
        });
    }
    ScheduleEval::from_timings(instance, ops)
}

fn check_permutation(instance: &Instance, sequence: &[JobId]) -> Result<()> {
    let mut seen = vec![false; instance.n()];
    let mut next: Vec<usize> = vec![1; instance.kind().set_count()];
    let order: HashMap<JobId, usize> = instance.jobs().enumerate().map(|(i, j)| (j.id, i)).collect();
    for &id in sequence {
        let &slot = order.get(&id).ok_or(Error::UnknownJob(id))?;
        if std::mem::replace(&mut seen[slot], true) {
            return Err(Error::DuplicateOperation(OpRef::first(id)));
        }
        let job = instance.job(id).expect("indexed job");
        let expected = &mut next[job.set.index()];
        if job.chain_pos != *expected {
            let earlier = instance.chain(job.set)[*expected - 1].id;
            return Err(Error::ChainOrder { earlier, later: id });
        }
        *expected += 1;
    }
    if let Some(missing) = instance.jobs().zip(&seen).find(|(_, &s)| !s) {
        return Err(Error::MissingOperation(OpRef::first(missing.0.id)));
    }
    Ok(())
}

struct Edge {
    from: usize,
    to: usize,
    lag: Time,
}

/// Earliest start times for the machine orders in `schedule`.
///
/// Constraints: release (first operations), machine succession, op1 before
/// op2, chain predecessor's same operation before, and for crossroad sets
/// with finite buffer `b`, `S(op2 of chain job k-b) <= C(op1 of chain job k)`.
/// The result is the least fixpoint; a positive cycle is reported as
/// [`Error::InfeasibleOrder`].
pub fn compute_active_times(instance: &Instance, schedule: &Schedule) -> Result<ScheduleEval> {
    if schedule.kind() != instance.kind() {
        return Err(Error::KindMismatch(instance.kind()));
    }
    let orders = schedule.machine_orders();

    let mut node_of: HashMap<OpRef, usize> = HashMap::new();
    let mut nodes: Vec<(OpRef, Machine)> = Vec::new();
    for (machine, order) in &orders {
        for &op in order {
            if instance.job(op.job).is_none() {
                return Err(Error::UnknownJob(op.job));
            }
            if !instance.eligible(op, *machine) {
                return Err(Error::WrongMachine { op, machine: *machine });
            }
            if node_of.insert(op, nodes.len()).is_some() {
                return Err(Error::DuplicateOperation(op));
            }
            nodes.push((op, *machine));
        }
    }
    if let Some(missing) = instance.operations().into_iter().find(|op| !node_of.contains_key(op)) {
        return Err(Error::MissingOperation(missing));
    }

    // Same-set operations sharing a machine must follow chain order.
    for (_, order) in &orders {
        let mut last: HashMap<(usize, Op), (usize, JobId)> = HashMap::new();
        for &op in order {
            let job = instance.job(op.job).expect("checked above");
            let key = (job.set.index(), op.op);
            if let Some(&(pos, prev)) = last.get(&key) {
                if pos > job.chain_pos {
                    return Err(Error::ChainOrder {
                        earlier: op.job,
                        later: prev,
                    });
                }
            }
            last.insert(key, (job.chain_pos, op.job));
        }
    }

    let proc = |op: OpRef| instance.proc_time(instance.job(op.job).expect("known").set);
    let mut edges = Vec::new();
    for (_, order) in &orders {
        for w in order.windows(2) {
            edges.push(Edge {
                from: node_of[&w[0]],
                to: node_of[&w[1]],
                lag: proc(w[0]),
            });
        }
    }
    let two_ops = instance.kind() == ProblemKind::Crossroad;
    for &set in instance.sets() {
        let chain = instance.chain(set);
        let p = instance.proc_time(set);
        for (k, job) in chain.iter().enumerate() {
            let first = node_of[&OpRef::first(job.id)];
            if two_ops {
                let second = node_of[&OpRef::second(job.id)];
                edges.push(Edge {
                    from: first,
                    to: second,
                    lag: p,
                });
            }
            if k > 0 {
                let pred = chain[k - 1].id;
                edges.push(Edge {
                    from: node_of[&OpRef::first(pred)],
                    to: first,
                    lag: p,
                });
                if two_ops {
                    edges.push(Edge {
                        from: node_of[&OpRef::second(pred)],
                        to: node_of[&OpRef::second(job.id)],
                        lag: p,
                    });
                }
            }
            if let Some(b) = instance.buffer(set).finite().filter(|_| two_ops) {
                if k >= b {
                    edges.push(Edge {
                        from: node_of[&OpRef::second(chain[k - b].id)],
                        to: first,
                        lag: -p,
                    });
                }
            }
        }
    }

    let mut start: Vec<Time> = nodes
        .iter()
        .map(|(op, _)| match op.op {
            Op::First => instance.job(op.job).expect("known").release,
            Op::Second => 0,
        })
        .collect();
    let mut settled = false;
    for _ in 0..=nodes.len() {
        let mut changed = false;
        for e in &edges {
            let candidate = start[e.from] + e.lag;
            if candidate > start[e.to] {
                start[e.to] = candidate;
                changed = true;
            }
        }
        if !changed {
            settled = true;
            break;
        }
    }
    if !settled {
        return Err(Error::InfeasibleOrder);
    }

    let ops = nodes
        .iter()
        .zip(&start)
        .map(|(&(op, machine), &s)| OpTiming {
            op,
            machine,
            start: s,
            completion: s + proc(op),
        })
        .collect();
    ScheduleEval::from_timings(instance, ops)
}
