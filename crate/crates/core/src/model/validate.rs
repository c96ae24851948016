use std::collections::{HashMap, HashSet};
use std::fmt;

use super::{Instance, JobId, Machine, Op, OpRef, ProblemKind, Schedule, ScheduleEval, SetLabel, Time};

/// One broken feasibility condition. Violations are reported, not raised.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Violation {
    KindMismatch,
    UnknownJob(JobId),
    MissingOperation(OpRef),
    DuplicateOperation(OpRef),
    WrongMachine {
        op: OpRef,
        machine: Machine,
    },
    /// The timing row disagrees with the schedule's machine assignment or is absent.
    UntimedOperation(OpRef),
    DurationMismatch {
        op: OpRef,
        start: Time,
        completion: Time,
        expected: Time,
    },
    ChainOrder {
        earlier: OpRef,
        later: OpRef,
    },
    BeforeRelease {
        job: JobId,
        start: Time,
        release: Time,
    },
    Overlap {
        machine: Machine,
        first: OpRef,
        second: OpRef,
    },
    OperationOrder {
        job: JobId,
    },
    Buffer {
        set: SetLabel,
        time: Time,
        count: usize,
        capacity: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::KindMismatch => write!(f, "schedule kind does not match the instance"),
            Violation::UnknownJob(j) => write!(f, "unknown job {j}"),
            Violation::MissingOperation(op) => write!(f, "operation {op} is not scheduled"),
            Violation::DuplicateOperation(op) => write!(f, "operation {op} is scheduled twice"),
            Violation::WrongMachine { op, machine } => {
                write!(f, "operation {op} is not allowed on {machine}")
            }
            Violation::UntimedOperation(op) => {
                write!(f, "operation {op} has no timing on its scheduled machine")
            }
            Violation::DurationMismatch {
                op,
                start,
                completion,
                expected,
            } => write!(f, "operation {op}: [{start}, {completion}] does not last {expected}"),
            Violation::ChainOrder { earlier, later } => {
                write!(f, "chain order: {earlier} must finish before {later} starts")
            }
            Violation::BeforeRelease { job, start, release } => {
                write!(f, "job {job} starts at {start} before its release {release}")
            }
            Violation::Overlap { machine, first, second } => write!(f, "{first} and {second} overlap on {machine}"),
            Violation::OperationOrder { job } => {
                write!(f, "job {job}: second operation starts before the first completes")
            }
            Violation::Buffer {
                set,
                time,
                count,
                capacity,
            } => write!(f, "buffer of {set} holds {count} > {capacity} vehicles at time {time}"),
        }
    }
}

/// Checks `eval` as a schedule for `instance`: chain order, releases, machine
/// capacity, operation order and, for crossroad instances, buffer occupancy at
/// every first-operation completion. Empty iff the schedule is feasible.
pub fn validate_schedule(instance: &Instance, schedule: &Schedule, eval: &ScheduleEval) -> Vec<Violation> {
    check(instance, schedule, eval, true)
}

/// Like [`validate_schedule`], restricted to the operations present in
/// `schedule`. Used for partial schedules.
pub fn validate_partial(instance: &Instance, schedule: &Schedule, eval: &ScheduleEval) -> Vec<Violation> {
    check(instance, schedule, eval, false)
}

fn check(instance: &Instance, schedule: &Schedule, eval: &ScheduleEval, complete: bool) -> Vec<Violation> {
    let mut out = Vec::new();
    if schedule.kind() != instance.kind() || eval.kind != instance.kind() {
        out.push(Violation::KindMismatch);
        return out;
    }

    let timing: HashMap<OpRef, &super::OpTiming> = eval.ops.iter().map(|t| (t.op, t)).collect();
    let mut seen = HashSet::new();
    for (machine, order) in schedule.machine_orders() {
        for op in order {
            let Some(job) = instance.job(op.job) else {
                out.push(Violation::UnknownJob(op.job));
                continue;
            };
            if !seen.insert(op) {
                out.push(Violation::DuplicateOperation(op));
                continue;
            }
            if !instance.eligible(op, machine) {
                out.push(Violation::WrongMachine { op, machine });
                continue;
            }
            match timing.get(&op) {
                Some(t) if t.machine == machine => {
                    let expected = instance.proc_time(job.set);
                    if t.completion - t.start != expected {
                        out.push(Violation::DurationMismatch {
                            op,
                            start: t.start,
                            completion: t.completion,
                            expected,
                        });
                    }
                }
                _ => out.push(Violation::UntimedOperation(op)),
            }
        }
    }
    for op in instance.operations().into_iter().filter(|_| complete) {
        if !seen.contains(&op) {
            out.push(Violation::MissingOperation(op));
        }
    }

    let timed = |op: OpRef| seen.contains(&op).then(|| timing.get(&op).copied()).flatten();

    for job in instance.jobs() {
        if let Some(t) = timed(OpRef::first(job.id)) {
            if t.start < job.release {
                out.push(Violation::BeforeRelease {
                    job: job.id,
                    start: t.start,
                    release: job.release,
                });
            }
        }
        if instance.kind() == ProblemKind::Crossroad {
            if let (Some(a), Some(b)) = (timed(OpRef::first(job.id)), timed(OpRef::second(job.id))) {
                if b.start < a.completion {
                    out.push(Violation::OperationOrder { job: job.id });
                }
            }
        }
    }

    // Chain order, operation-wise.
    let ops_per_job = instance.kind().operations_per_job();
    for &set in instance.sets() {
        let chain = instance.chain(set);
        for w in chain.windows(2) {
            for op in [Op::First, Op::Second].into_iter().take(ops_per_job) {
                let earlier = OpRef { job: w[0].id, op };
                let later = OpRef { job: w[1].id, op };
                let violated = match (timed(earlier), timed(later)) {
                    (Some(a), Some(b)) => b.start < a.completion,
                    (None, Some(_)) => true,
                    _ => false,
                };
                if violated {
                    out.push(Violation::ChainOrder { earlier, later });
                }
            }
        }
    }

    let mut per_machine: HashMap<Machine, Vec<&super::OpTiming>> = HashMap::new();
    for t in eval.ops.iter().filter(|t| seen.contains(&t.op)) {
        per_machine.entry(t.machine).or_default().push(t);
    }
    for m in Machine::ALL {
        let Some(list) = per_machine.get_mut(&m) else {
            continue;
        };
        list.sort_by_key(|t| (t.start, t.completion));
        for w in list.windows(2) {
            if w[1].start < w[0].completion {
                out.push(Violation::Overlap {
                    machine: m,
                    first: w[0].op,
                    second: w[1].op,
                });
            }
        }
    }

    if instance.kind() == ProblemKind::Crossroad {
        for &set in instance.sets() {
            let Some(capacity) = instance.buffer(set).finite() else {
                continue;
            };
            let spans: Vec<(Time, Option<Time>)> = instance
                .chain(set)
                .iter()
                .filter_map(|j| {
                    let c1 = timed(OpRef::first(j.id))?.completion;
                    Some((c1, timed(OpRef::second(j.id)).map(|t| t.start)))
                })
                .collect();
            // Vehicles whose second operation is not placed yet are not counted.
            for &(event, _) in &spans {
                let count = spans
                    .iter()
                    .filter(|&&(c1, s2)| c1 <= event && s2.is_some_and(|s2| event < s2))
                    .count();
                if count > capacity {
                    out.push(Violation::Buffer {
                        set,
                        time: event,
                        count,
                        capacity,
                    });
                }
            }
        }
    }
    out.sort_by_key(|v| v.to_string());
    out.dedup();
    out
}
