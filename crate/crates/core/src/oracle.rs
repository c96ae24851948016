//! Brute-force reference solvers.
//!
//! Each oracle enumerates every chain-respecting processing order, times it
//! with the model evaluators and keeps the best. They share nothing with the
//! dynamic programs or the branch-and-bound beyond those evaluators.

use crate::error::{Error, Result};
use crate::model::{
    compute_active_times, evaluate_single_sequence, validate_schedule, Instance, JobId, Machine, Objective, OpRef,
    ProblemKind, Schedule, SetLabel, Time,
};

pub const TWO_CHAINS_LIMIT: usize = 16;
pub const DEDICATED_LIMIT: usize = 12;
pub const JOBSHOP_OPERATION_LIMIT: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleSolution {
    pub schedule: Schedule,
    pub value: Time,
}

/// Every merge of `a` and `b` that keeps both internal orders.
pub fn interleavings<T: Copy>(a: &[T], b: &[T]) -> Vec<Vec<T>> {
    fn rec<T: Copy>(a: &[T], b: &[T], prefix: &mut Vec<T>, out: &mut Vec<Vec<T>>) {
        match (a.split_first(), b.split_first()) {
            (None, None) => out.push(prefix.clone()),
            (ha, hb) => {
                if let Some((&x, rest)) = ha {
                    prefix.push(x);
                    rec(rest, b, prefix, out);
                    prefix.pop();
                }
                if let Some((&y, rest)) = hb {
                    prefix.push(y);
                    rec(a, rest, prefix, out);
                    prefix.pop();
                }
            }
        }
    }
    let mut out = Vec::new();
    rec(a, b, &mut Vec::with_capacity(a.len() + b.len()), &mut out);
    out
}

fn guard(size: usize, limit: usize) -> Result<()> {
    if size > limit {
        Err(Error::SizeGuard { size, limit })
    } else {
        Ok(())
    }
}

fn chain_ids(instance: &Instance, set: SetLabel) -> Vec<JobId> {
    instance.chain(set).iter().map(|j| j.id).collect()
}

/// Minimum over all interleavings of the two chains; ties go to the
/// lexicographically smallest sequence of job ids.
pub fn brute_two_chains(instance: &Instance, objective: Objective) -> Result<OracleSolution> {
    if instance.kind() != ProblemKind::TwoChains {
        return Err(Error::KindMismatch(instance.kind()));
    }
    objective.check(instance.kind())?;
    guard(instance.n(), TWO_CHAINS_LIMIT)?;
    let a = chain_ids(instance, SetLabel::N1);
    let b = chain_ids(instance, SetLabel::N2);
    let mut best: Option<(Time, Vec<JobId>)> = None;
    for seq in interleavings(&a, &b) {
        let value = evaluate_single_sequence(instance, &seq)?.objective_value(objective)?;
        let better = match &best {
            None => true,
            Some((v, s)) => (value, &seq) < (*v, s),
        };
        if better {
            best = Some((value, seq));
        }
    }
    let (value, seq) = best.expect("at least the empty interleaving");
    Ok(OracleSolution {
        schedule: Schedule::Sequence(seq),
        value,
    })
}

/// Minimum over all machine assignments of `N2` and all per-machine
/// interleavings.
pub fn brute_dedicated(instance: &Instance, objective: Objective) -> Result<OracleSolution> {
    if instance.kind() != ProblemKind::DedicatedParallel {
        return Err(Error::KindMismatch(instance.kind()));
    }
    objective.check(instance.kind())?;
    guard(instance.n(), DEDICATED_LIMIT)?;
    let n1 = chain_ids(instance, SetLabel::N1);
    let n2 = chain_ids(instance, SetLabel::N2);
    let n3 = chain_ids(instance, SetLabel::N3);
    let mut best: Option<OracleSolution> = None;
    for mask in 0u32..(1 << n2.len()) {
        let lane = |on_first: bool| -> Vec<JobId> {
            n2.iter()
                .enumerate()
                .filter(|&(i, _)| (mask & (1 << i) == 0) == on_first)
                .map(|(_, &j)| j)
                .collect()
        };
        let (on1, on3) = (lane(true), lane(false));
        let orders3 = interleavings(&n3, &on3);
        for machine1 in interleavings(&n1, &on1) {
            for machine3 in &orders3 {
                let schedule = Schedule::Dedicated {
                    machine1: machine1.clone(),
                    machine3: machine3.clone(),
                };
                let eval = match compute_active_times(instance, &schedule) {
                    Ok(e) => e,
                    Err(Error::InfeasibleOrder) => continue,
                    Err(e) => return Err(e),
                };
                let value = eval.objective_value(objective)?;
                if best.as_ref().is_none_or(|b| value < b.value) {
                    best = Some(OracleSolution { schedule, value });
                }
            }
        }
    }
    Ok(best.expect("some assignment is always feasible"))
}

/// Minimum over all per-machine operation orders that respect chain order,
/// discarding orders with a positive precedence cycle or a buffer overflow.
pub fn brute_jobshop(instance: &Instance, objective: Objective) -> Result<OracleSolution> {
    if instance.kind() != ProblemKind::Crossroad {
        return Err(Error::KindMismatch(instance.kind()));
    }
    guard(instance.operation_count(), JOBSHOP_OPERATION_LIMIT)?;

    // Machine m serves the first operations of one set and the second
    // operations of another.
    let per_machine: Vec<Vec<Vec<OpRef>>> = Machine::ALL
        .iter()
        .map(|&m| {
            let mut firsts = Vec::new();
            let mut seconds = Vec::new();
            for set in SetLabel::ALL {
                let (a, b) = set.route();
                if a == m {
                    firsts = instance.chain(set).iter().map(|j| OpRef::first(j.id)).collect();
                }
                if b == m {
                    seconds = instance.chain(set).iter().map(|j| OpRef::second(j.id)).collect();
                }
            }
            interleavings(&firsts, &seconds)
        })
        .collect();

    let mut best: Option<OracleSolution> = None;
    let mut choice = [0usize; 4];
    loop {
        let schedule = Schedule::JobShop {
            machines: std::array::from_fn(|m| per_machine[m][choice[m]].clone()),
        };
        match compute_active_times(instance, &schedule) {
            Ok(eval) if validate_schedule(instance, &schedule, &eval).is_empty() => {
                let value = eval.objective_value(objective)?;
                if best.as_ref().is_none_or(|b| value < b.value) {
                    best = Some(OracleSolution { schedule, value });
                }
            }
            Ok(_) | Err(Error::InfeasibleOrder) => {}
            Err(e) => return Err(e),
        }
        // Odometer over the four machines.
        let mut m = 0;
        loop {
            if m == 4 {
                return best.ok_or_else(|| Error::InvalidInstance("no feasible crossroad schedule".into()));
            }
            choice[m] += 1;
            if choice[m] < per_machine[m].len() {
                break;
            }
            choice[m] = 0;
            m += 1;
        }
    }
}
