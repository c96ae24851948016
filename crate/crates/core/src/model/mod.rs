//! Domain model shared by every solver: jobs grouped in lane chains, the three
//! instance kinds, schedules, active timing and feasibility checking.
//!
//! All times are integers. A job belongs to one of the sets `N1..N4`; its
//! position in the set's chain is fixed, so a vehicle never overtakes the one
//! ahead of it in its lane.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

mod timing;
mod validate;

pub use timing::{compute_active_times, evaluate_single_sequence};
pub use validate::{validate_partial, validate_schedule, Violation};

pub type Time = i64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct JobId(pub u32);

impl fmt::Display for JobId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SetLabel {
    N1,
    N2,
    N3,
    N4,
}

impl SetLabel {
    pub const ALL: [SetLabel; 4] = [SetLabel::N1, SetLabel::N2, SetLabel::N3, SetLabel::N4];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Self> {
        Self::ALL.get(index).copied()
    }

    /// Machines visited by the two operations of a crossroad job.
    pub fn route(self) -> (Machine, Machine) {
        match self {
            SetLabel::N1 => (Machine::M1, Machine::M2),
            SetLabel::N2 => (Machine::M2, Machine::M4),
            SetLabel::N3 => (Machine::M3, Machine::M1),
            SetLabel::N4 => (Machine::M4, Machine::M3),
        }
    }
}

impl fmt::Display for SetLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "N{}", self.index() + 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Machine {
    M1,
    M2,
    M3,
    M4,
}

impl Machine {
    pub const ALL: [Machine; 4] = [Machine::M1, Machine::M2, Machine::M3, Machine::M4];

    pub fn index(self) -> usize {
        self as usize
    }

    /// 1-based machine number as used in documents.
    pub fn number(self) -> u8 {
        self as u8 + 1
    }

    pub fn from_number(number: u8) -> Option<Self> {
        number.checked_sub(1).and_then(|i| Self::ALL.get(i as usize).copied())
    }
}

impl fmt::Display for Machine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "M{}", self.number())
    }
}

/// First or second operation of a job. Single-machine and dedicated jobs only
/// have a first operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Op {
    First,
    Second,
}

impl Op {
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn number(self) -> u8 {
        self as u8 + 1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OpRef {
    pub job: JobId,
    pub op: Op,
}

impl OpRef {
    pub fn first(job: JobId) -> Self {
        OpRef { job, op: Op::First }
    }

    pub fn second(job: JobId) -> Self {
        OpRef { job, op: Op::Second }
    }
}

impl fmt::Display for OpRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/op{}", self.job, self.op.number())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProblemKind {
    /// Two chains merging onto one machine.
    TwoChains,
    /// `N1` on machine 1, `N3` on machine 3, `N2` on either.
    DedicatedParallel,
    /// Four-machine job shop with fixed two-operation routes.
    Crossroad,
}

impl ProblemKind {
    pub fn set_count(self) -> usize {
        match self {
            ProblemKind::TwoChains => 2,
            ProblemKind::DedicatedParallel => 3,
            ProblemKind::Crossroad => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::TwoChains => "two_chains",
            ProblemKind::DedicatedParallel => "dedicated_parallel",
            ProblemKind::Crossroad => "crossroad",
        }
    }

    pub fn operations_per_job(self) -> usize {
        match self {
            ProblemKind::Crossroad => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two_chains" | "two-chains" => Ok(ProblemKind::TwoChains),
            "dedicated_parallel" | "dedicated-parallel" | "dedicated" => Ok(ProblemKind::DedicatedParallel),
            "crossroad" => Ok(ProblemKind::Crossroad),
            other => Err(Error::Format(format!("unknown instance kind `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProcTimes {
    Equal(Time),
    /// Separate times for `N1` and `N2` (two-chain instances only).
    PerLane {
        n1: Time,
        n2: Time,
    },
}

impl ProcTimes {
    pub fn of(&self, set: SetLabel) -> Time {
        match *self {
            ProcTimes::Equal(p) => p,
            ProcTimes::PerLane { n1, n2 } => {
                if set == SetLabel::N1 {
                    n1
                } else {
                    n2
                }
            }
        }
    }
}

/// Buffer capacity of a crossroad set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Capacity {
    Finite(u32),
    Unbounded,
}

impl Capacity {
    pub fn finite(self) -> Option<usize> {
        match self {
            Capacity::Finite(b) => Some(b as usize),
            Capacity::Unbounded => None,
        }
    }

    pub fn admits(self, count: usize) -> bool {
        self.finite().is_none_or(|b| count <= b)
    }
}

impl fmt::Display for Capacity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Capacity::Finite(b) => write!(f, "{b}"),
            Capacity::Unbounded => f.write_str("inf"),
        }
    }
}

impl FromStr for Capacity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "+inf" => Ok(Capacity::Unbounded),
            t => t
                .parse::<u32>()
                .map(Capacity::Finite)
                .map_err(|_| Error::Format(format!("invalid buffer capacity `{t}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Objective {
    SumC,
    SumWC,
    SumT,
    SumWT,
    Cmax,
}

impl Objective {
    pub const SUMS: [Objective; 4] = [Objective::SumC, Objective::SumWC, Objective::SumT, Objective::SumWT];

    pub fn name(self) -> &'static str {
        match self {
            Objective::SumC => "sumc",
            Objective::SumWC => "sumwc",
            Objective::SumT => "sumt",
            Objective::SumWT => "sumwt",
            Objective::Cmax => "cmax",
        }
    }

    pub fn is_sum(self) -> bool {
        self != Objective::Cmax
    }

    pub fn supported_by(self, kind: ProblemKind) -> bool {
        self.is_sum() || kind == ProblemKind::Crossroad
    }

    /// Contribution of one job finishing at `completion` to a sum objective.
    /// Returns 0 for `Cmax`, which is not additive.
    pub fn contribution(self, job: &Job, completion: Time) -> Time {
        match self {
            Objective::SumC => completion,
            Objective::SumWC => job.weight * completion,
            Objective::SumT => tardiness(completion, job.due),
            Objective::SumWT => job.weight * tardiness(completion, job.due),
            Objective::Cmax => 0,
        }
    }

    /// Combines a partial value with one more job completion.
    pub fn accumulate(self, acc: Time, job: &Job, completion: Time) -> Time {
        match self {
            Objective::Cmax => acc.max(completion),
            _ => acc + self.contribution(job, completion),
        }
    }

    pub(crate) fn check(self, kind: ProblemKind) -> Result<()> {
        if self.supported_by(kind) {
            Ok(())
        } else {
            Err(Error::UnsupportedObjective { objective: self, kind })
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Objective {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sumc" => Ok(Objective::SumC),
            "sumwc" => Ok(Objective::SumWC),
            "sumt" => Ok(Objective::SumT),
            "sumwt" => Ok(Objective::SumWT),
            "cmax" => Ok(Objective::Cmax),
            other => Err(Error::Format(format!("unknown objective `{other}`"))),
        }
    }
}

/// `max(0, completion - due)`, zero when there is no due date.
pub fn tardiness(completion: Time, due: Option<Time>) -> Time {
    due.map_or(0, |d| (completion - d).max(0))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Job {
    pub id: JobId,
    pub set: SetLabel,
    /// 1-based position within the chain of `set`.
    pub chain_pos: usize,
    pub release: Time,
    /// `None` means no due date.
    pub due: Option<Time>,
    pub weight: Time,
}

/// Job data before it is placed in a chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct JobSpec {
    pub id: u32,
    pub release: Time,
    pub due: Option<Time>,
    pub weight: Time,
}

impl JobSpec {
    pub fn new(id: u32, release: Time) -> Self {
        JobSpec {
            id,
            release,
            due: None,
            weight: 1,
        }
    }

    pub fn due(mut self, due: Time) -> Self {
        self.due = Some(due);
        self
    }

    pub fn weight(mut self, weight: Time) -> Self {
        self.weight = weight;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    kind: ProblemKind,
    proc_times: ProcTimes,
    chains: Vec<Vec<Job>>,
    buffers: Option<[Capacity; 4]>,
    index: BTreeMap<JobId, (SetLabel, usize)>,
}

impl Instance {
    /// Builds and validates an instance. `chains` holds one list per set in
    /// `N1..` order; list order is chain order.
    pub fn new(
        kind: ProblemKind,
        proc_times: ProcTimes,
        chains: Vec<Vec<JobSpec>>,
        buffers: Option<[Capacity; 4]>,
    ) -> Result<Self> {
        let invalid = |msg: String| Err(Error::InvalidInstance(msg));
        if chains.len() != kind.set_count() {
            return invalid(format!(
                "{kind} instances need {} chains, got {}",
                kind.set_count(),
                chains.len()
            ));
        }
        match proc_times {
            ProcTimes::Equal(p) if p <= 0 => return invalid(format!("processing time must be positive, got {p}")),
            ProcTimes::PerLane { n1, n2 } => {
                if kind != ProblemKind::TwoChains {
                    return invalid("per-lane processing times need a two_chains instance".into());
                }
                if n1 <= 0 || n2 <= 0 {
                    return invalid(format!("processing times must be positive, got ({n1}, {n2})"));
                }
            }
            ProcTimes::Equal(_) => {}
        }
        if buffers.is_some() != (kind == ProblemKind::Crossroad) {
            return invalid("buffers are required for crossroad instances and only there".into());
        }

        let mut index = BTreeMap::new();
        let mut jobs = Vec::with_capacity(chains.len());
        for (s, chain) in chains.into_iter().enumerate() {
            let set = SetLabel::ALL[s];
            let mut placed = Vec::with_capacity(chain.len());
            for (k, spec) in chain.into_iter().enumerate() {
                if spec.release < 0 {
                    return invalid(format!("job {}: negative release {}", spec.id, spec.release));
                }
                if spec.weight < 0 {
                    return invalid(format!("job {}: negative weight {}", spec.id, spec.weight));
                }
                if let Some(d) = spec.due.filter(|&d| d < 0) {
                    return invalid(format!("job {}: negative due date {d}", spec.id));
                }
                let id = JobId(spec.id);
                if index.insert(id, (set, k)).is_some() {
                    return invalid(format!("duplicate job id {id}"));
                }
                placed.push(Job {
                    id,
                    set,
                    chain_pos: k + 1,
                    release: spec.release,
                    due: spec.due,
                    weight: spec.weight,
                });
            }
            jobs.push(placed);
        }
        Ok(Instance {
            kind,
            proc_times,
            chains: jobs,
            buffers,
            index,
        })
    }

    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    pub fn proc_times(&self) -> ProcTimes {
        self.proc_times
    }

    pub fn proc_time(&self, set: SetLabel) -> Time {
        self.proc_times.of(set)
    }

    pub fn sets(&self) -> &'static [SetLabel] {
        &SetLabel::ALL[..self.kind.set_count()]
    }

    pub fn chain(&self, set: SetLabel) -> &[Job] {
        self.chains.get(set.index()).map_or(&[], Vec::as_slice)
    }

    pub fn chains(&self) -> &[Vec<Job>] {
        &self.chains
    }

    pub fn jobs(&self) -> impl Iterator<Item = &Job> {
        self.chains.iter().flatten()
    }

    pub fn job(&self, id: JobId) -> Option<&Job> {
        self.index.get(&id).map(|&(set, k)| &self.chains[set.index()][k])
    }

    /// Job ahead of `id` in its chain.
    pub fn chain_predecessor(&self, id: JobId) -> Option<&Job> {
        let &(set, k) = self.index.get(&id)?;
        k.checked_sub(1).map(|k| &self.chains[set.index()][k])
    }

    pub fn buffers(&self) -> Option<[Capacity; 4]> {
        self.buffers
    }

    pub fn buffer(&self, set: SetLabel) -> Capacity {
        self.buffers.map_or(Capacity::Unbounded, |b| b[set.index()])
    }

    pub fn n(&self) -> usize {
        self.index.len()
    }

    pub fn operation_count(&self) -> usize {
        self.n() * self.kind.operations_per_job()
    }

    /// Machine that must process `op` under the fixed crossroad routes; `None`
    /// for kinds without fixed routing or an unknown job.
    pub fn route_machine(&self, op: OpRef) -> Option<Machine> {
        let job = self.job(op.job)?;
        match (self.kind, op.op) {
            (ProblemKind::Crossroad, Op::First) => Some(job.set.route().0),
            (ProblemKind::Crossroad, Op::Second) => Some(job.set.route().1),
            (ProblemKind::TwoChains, Op::First) => Some(Machine::M1),
            (ProblemKind::DedicatedParallel, Op::First) => match job.set {
                SetLabel::N1 => Some(Machine::M1),
                SetLabel::N3 => Some(Machine::M3),
                _ => None,
            },
            _ => None,
        }
    }

    /// Whether `op` may be processed on `machine`.
    pub fn eligible(&self, op: OpRef, machine: Machine) -> bool {
        let Some(job) = self.job(op.job) else {
            return false;
        };
        match (self.kind, op.op) {
            (ProblemKind::DedicatedParallel, Op::First) if job.set == SetLabel::N2 => {
                matches!(machine, Machine::M1 | Machine::M3)
            }
            _ => self.route_machine(op) == Some(machine),
        }
    }

    /// All operations of the instance in set, chain and operation order.
    pub fn operations(&self) -> Vec<OpRef> {
        let per_job = self.kind.operations_per_job();
        self.jobs()
            .flat_map(|j| [OpRef::first(j.id), OpRef::second(j.id)].into_iter().take(per_job))
            .collect()
    }

    /// Chain positions whose release date is below that of the job ahead.
    /// Allowed, but usually an input mistake.
    pub fn release_inversions(&self) -> Vec<(JobId, JobId)> {
        self.chains
            .iter()
            .flat_map(|chain| {
                chain
                    .windows(2)
                    .filter(|w| w[1].release < w[0].release)
                    .map(|w| (w[0].id, w[1].id))
            })
            .collect()
    }

    /// Empty schedule of the variant matching this instance kind.
    pub fn empty_schedule(&self) -> Schedule {
        match self.kind {
            ProblemKind::TwoChains => Schedule::Sequence(Vec::new()),
            ProblemKind::DedicatedParallel => Schedule::Dedicated {
                machine1: Vec::new(),
                machine3: Vec::new(),
            },
            ProblemKind::Crossroad => Schedule::JobShop {
                machines: Default::default(),
            },
        }
    }
}

/// A solution, described by processing orders only. Start times follow from
/// [`compute_active_times`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Schedule {
    /// Single-machine permutation of all jobs.
    Sequence(Vec<JobId>),
    /// Job orders on machines 1 and 3; the position of each `N2` job gives its
    /// machine assignment.
    Dedicated { machine1: Vec<JobId>, machine3: Vec<JobId> },
    /// Operation order on each of the four crossroad machines.
    JobShop { machines: [Vec<OpRef>; 4] },
}

impl Schedule {
    pub fn kind(&self) -> ProblemKind {
        match self {
            Schedule::Sequence(_) => ProblemKind::TwoChains,
            Schedule::Dedicated { .. } => ProblemKind::DedicatedParallel,
            Schedule::JobShop { .. } => ProblemKind::Crossroad,
        }
    }

    /// Per-machine operation orders, omitting machines the kind never uses.
    pub fn machine_orders(&self) -> Vec<(Machine, Vec<OpRef>)> {
        let firsts = |jobs: &[JobId]| jobs.iter().copied().map(OpRef::first).collect();
        match self {
            Schedule::Sequence(seq) => vec![(Machine::M1, firsts(seq))],
            Schedule::Dedicated { machine1, machine3 } => {
                vec![(Machine::M1, firsts(machine1)), (Machine::M3, firsts(machine3))]
            }
            Schedule::JobShop { machines } => Machine::ALL.iter().map(|&m| (m, machines[m.index()].clone())).collect(),
        }
    }

    /// Rebuilds machine orders from timed operations (sorted by start, stable).
    pub fn from_timings(kind: ProblemKind, timings: &[OpTiming]) -> Schedule {
        let mut sorted: Vec<&OpTiming> = timings.iter().collect();
        sorted.sort_by_key(|t| (t.start, t.completion));
        let on = |m: Machine| sorted.iter().filter(move |t| t.machine == m);
        match kind {
            ProblemKind::TwoChains => Schedule::Sequence(on(Machine::M1).map(|t| t.op.job).collect()),
            ProblemKind::DedicatedParallel => Schedule::Dedicated {
                machine1: on(Machine::M1).map(|t| t.op.job).collect(),
                machine3: on(Machine::M3).map(|t| t.op.job).collect(),
            },
            ProblemKind::Crossroad => Schedule::JobShop {
                machines: Machine::ALL.map(|m| on(m).map(|t| t.op).collect()),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OpTiming {
    pub op: OpRef,
    pub machine: Machine,
    pub start: Time,
    pub completion: Time,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct JobOutcome {
    pub job: JobId,
    /// Completion of the job's last operation.
    pub completion: Time,
    pub tardiness: Time,
}

/// Timed schedule with per-job outcomes and all aggregate objective values.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ScheduleEval {
    pub kind: ProblemKind,
    /// Operations in machine order (`M1` first).
    pub ops: Vec<OpTiming>,
    /// Jobs in set and chain order; jobs without timed final operation are absent.
    pub jobs: Vec<JobOutcome>,
    pub sum_c: Time,
    pub sum_wc: Time,
    pub sum_t: Time,
    pub sum_wt: Time,
    pub c_max: Time,
}

impl ScheduleEval {
    /// Derives job outcomes and aggregates from operation timings.
    pub fn from_timings(instance: &Instance, mut ops: Vec<OpTiming>) -> Result<Self> {
        ops.sort_by_key(|t| (t.machine, t.start, t.completion));
        let last_op = match instance.kind.operations_per_job() {
            2 => Op::Second,
            _ => Op::First,
        };
        let mut completion: BTreeMap<(SetLabel, usize), Time> = BTreeMap::new();
        for t in &ops {
            let job = instance.job(t.op.job).ok_or(Error::UnknownJob(t.op.job))?;
            if t.op.op == last_op {
                completion.insert((job.set, job.chain_pos), t.completion);
            }
        }
        let mut eval = ScheduleEval {
            kind: instance.kind,
            c_max: ops.iter().map(|t| t.completion).max().unwrap_or(0),
            ops,
            jobs: Vec::with_capacity(completion.len()),
            sum_c: 0,
            sum_wc: 0,
            sum_t: 0,
            sum_wt: 0,
        };
        for (&(set, pos), &c) in &completion {
            let job = &instance.chain(set)[pos - 1];
            let t = tardiness(c, job.due);
            eval.sum_c += c;
            eval.sum_wc += job.weight * c;
            eval.sum_t += t;
            eval.sum_wt += job.weight * t;
            eval.jobs.push(JobOutcome {
                job: job.id,
                completion: c,
                tardiness: t,
            });
        }
        Ok(eval)
    }

    pub fn timing(&self, op: OpRef) -> Option<&OpTiming> {
        self.ops.iter().find(|t| t.op == op)
    }

    pub fn completion(&self, job: JobId) -> Option<Time> {
        self.jobs.iter().find(|o| o.job == job).map(|o| o.completion)
    }

    /// Value of `objective`. `Cmax` is only defined for crossroad evaluations.
    pub fn objective_value(&self, objective: Objective) -> Result<Time> {
        objective.check(self.kind)?;
        Ok(match objective {
            Objective::SumC => self.sum_c,
            Objective::SumWC => self.sum_wc,
            Objective::SumT => self.sum_t,
            Objective::SumWT => self.sum_wt,
            Objective::Cmax => self.c_max,
        })
    }
}

/// Free-function form of [`ScheduleEval::objective_value`].
pub fn objective_value(eval: &ScheduleEval, objective: Objective) -> Result<Time> {
    eval.objective_value(objective)
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn tardiness_values() {
        assert_eq!(tardiness(4, Some(3)), 1);
        assert_eq!(tardiness(8, Some(6)), 2);
        assert_eq!(tardiness(5, None), 0);
        assert_eq!(tardiness(2, Some(7)), 0);
    }

    #[test]
    fn objective_value_selects_aggregate() {
        let inst = worked_example();
        let eval = evaluate_single_sequence(&inst, &ids(&[1, 3, 2, 4])).unwrap();
        assert_eq!(objective_value(&eval, Objective::SumC).unwrap(), 20);
        assert_eq!(objective_value(&eval, Objective::SumWC).unwrap(), 20);
        assert_eq!(objective_value(&eval, Objective::SumT).unwrap(), 3);
        assert_eq!(
            objective_value(&eval, Objective::Cmax),
            Err(Error::UnsupportedObjective {
                objective: Objective::Cmax,
                kind: ProblemKind::TwoChains
            })
        );
    }

    #[test]
    fn zero_weights_give_zero_weighted_tardiness() {
        let inst = Instance::new(
            ProblemKind::TwoChains,
            ProcTimes::Equal(3),
            vec![
                vec![JobSpec::new(1, 0).due(0).weight(0)],
                vec![JobSpec::new(2, 0).due(1).weight(0)],
            ],
            None,
        )
        .unwrap();
        let eval = evaluate_single_sequence(&inst, &ids(&[1, 2])).unwrap();
        assert!(eval.sum_t > 0);
        assert_eq!(eval.objective_value(Objective::SumWT).unwrap(), 0);
    }

    #[test]
    fn instance_rejects_bad_input() {
        let two = |p, buffers| {
            Instance::new(
                ProblemKind::TwoChains,
                p,
                vec![vec![JobSpec::new(1, 0)], vec![JobSpec::new(1, 2)]],
                buffers,
            )
        };
        assert!(matches!(two(ProcTimes::Equal(2), None), Err(Error::InvalidInstance(m)) if m.contains("duplicate")));
        assert!(two(ProcTimes::Equal(0), None).is_err());
        let ok = Instance::new(
            ProblemKind::TwoChains,
            ProcTimes::Equal(1),
            vec![vec![], vec![]],
            Some([Capacity::Unbounded; 4]),
        );
        assert!(ok.is_err());
        let neg = Instance::new(
            ProblemKind::Crossroad,
            ProcTimes::Equal(1),
            vec![vec![JobSpec::new(1, -1)], vec![], vec![], vec![]],
            Some([Capacity::Unbounded; 4]),
        );
        assert!(neg.is_err());
        let per_lane = Instance::new(
            ProblemKind::Crossroad,
            ProcTimes::PerLane { n1: 1, n2: 2 },
            vec![vec![], vec![], vec![], vec![]],
            Some([Capacity::Unbounded; 4]),
        );
        assert!(per_lane.is_err());
    }

    #[test]
    fn chain_positions_and_lookup() {
        let inst = worked_example();
        let j4 = inst.job(JobId(4)).unwrap();
        assert_eq!((j4.set, j4.chain_pos), (SetLabel::N2, 2));
        assert_eq!(inst.chain_predecessor(JobId(4)).unwrap().id, JobId(3));
        assert!(inst.chain_predecessor(JobId(1)).is_none());
        assert_eq!(inst.n(), 4);
    }

    #[test]
    fn routes_are_fixed() {
        assert_eq!(SetLabel::N1.route(), (Machine::M1, Machine::M2));
        assert_eq!(SetLabel::N2.route(), (Machine::M2, Machine::M4));
        assert_eq!(SetLabel::N3.route(), (Machine::M3, Machine::M1));
        assert_eq!(SetLabel::N4.route(), (Machine::M4, Machine::M3));
    }

    #[test]
    fn release_inversions_are_reported() {
        let inst = Instance::new(
            ProblemKind::TwoChains,
            ProcTimes::Equal(1),
            vec![vec![JobSpec::new(1, 5), JobSpec::new(2, 3)], vec![]],
            None,
        )
        .unwrap();
        assert_eq!(inst.release_inversions(), vec![(JobId(1), JobId(2))]);
        assert!(worked_example().release_inversions().is_empty());
    }
}
