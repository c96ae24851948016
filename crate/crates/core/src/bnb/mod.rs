//! Branch-and-bound for the crossroad job shop.
//!
//! Four sets of vehicles cross four sectors; every vehicle has two unit
//! operations on the route of its set (see [`SetLabel::route`]). A node is a
//! partial schedule built by appending operations to machine orders. Each
//! node has up to eight children, one per (set, machine) pair: the next
//! unscheduled operation of that set on that machine, started as early as
//! the partial schedule allows.
//!
//! Buffers limit how many vehicles of a set sit between their two
//! operations. For a finite capacity `b >= 1`, the first operation of chain
//! job `k` becomes schedulable once the second operation of chain job `k - b`
//! is placed, and it may not finish before that second operation starts. With
//! `b = 0` the second operation must start the moment the first completes:
//! until it is placed, nothing else may run on its machine past that moment.
//!
//! Nodes are bounded by [`Shop::lb1`] for the makespan and [`Shop::lb_sum`]
//! for the sum objectives; the incumbent starts from [`list_schedule_ub`].

mod search;

pub use search::{list_schedule_ub, solve_jobshop, solve_jobshop_observed, BnbSolution, SearchLimits, SearchStats};

use crate::error::{Error, Result};
use crate::model::{
    Instance, Job, Machine, Objective, Op, OpRef, OpTiming, ProblemKind, Schedule, ScheduleEval, SetLabel, Time,
};

/// The eight (set, operation) branches in a fixed order; the machine of each
/// follows from the route.
pub const BRANCHES: [(SetLabel, Op); 8] = [
    (SetLabel::N1, Op::First),
    (SetLabel::N3, Op::Second),
    (SetLabel::N1, Op::Second),
    (SetLabel::N2, Op::First),
    (SetLabel::N3, Op::First),
    (SetLabel::N4, Op::Second),
    (SetLabel::N2, Op::Second),
    (SetLabel::N4, Op::First),
];

/// Precomputed crossroad data used by the search.
#[derive(Debug, Clone)]
pub struct Shop<'a> {
    instance: &'a Instance,
    offset: [usize; 4],
    len: [usize; 4],
    p: Time,
    total_ops: usize,
}

/// A partial schedule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BnbNode {
    /// Start of every operation, indexed by `offset[set] + 2k + op`.
    starts: Vec<Option<Time>>,
    /// Per set and operation, the next unscheduled chain index.
    next: [[usize; 2]; 4],
    /// Completion of the last operation on each machine.
    frontier: [Time; 4],
    depth: usize,
    /// Branch indices (0-based) taken from the root.
    path: Vec<u8>,
    /// Operations in the order they were appended.
    log: Vec<(SetLabel, usize, Op)>,
}

impl BnbNode {
    /// Number of scheduled operations.
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn path(&self) -> &[u8] {
        &self.path
    }

    pub fn frontier(&self, machine: Machine) -> Time {
        self.frontier[machine.index()]
    }

    /// Next unscheduled chain index (0-based) of `op` in `set`.
    pub fn chain_ptr(&self, set: SetLabel, op: Op) -> usize {
        self.next[set.index()][op.index()]
    }
}

/// Relaxed timing figures of one machine.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MachineBound {
    /// Makespan of the machine in the relaxed schedule.
    pub c: Time,
    /// Uncovered time between the first start and last completion of the
    /// relaxed operations.
    pub idle: Time,
    /// Time covered by more than one relaxed operation, with multiplicity.
    pub overlap: Time,
    /// `c + max(0, overlap - idle)`.
    pub c_prime: Time,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BoundReport {
    pub machines: [MachineBound; 4],
    pub lb1: Time,
}

/// Relaxed start of every operation: scheduled operations keep their start;
/// each unscheduled one starts as early as its own predecessors (relaxed),
/// its machine frontier and its buffer allow, ignoring the other unscheduled
/// operations on its machine.
struct Relaxed {
    starts: Vec<Time>,
}

impl<'a> Shop<'a> {
    pub fn new(instance: &'a Instance) -> Result<Self> {
        if instance.kind() != ProblemKind::Crossroad {
            return Err(Error::KindMismatch(instance.kind()));
        }
        let mut offset = [0; 4];
        let mut len = [0; 4];
        let mut acc = 0;
        for set in SetLabel::ALL {
            offset[set.index()] = acc;
            len[set.index()] = instance.chain(set).len();
            acc += 2 * len[set.index()];
        }
        Ok(Shop {
            instance,
            offset,
            len,
            p: instance.proc_time(SetLabel::N1),
            total_ops: acc,
        })
    }

    pub fn instance(&self) -> &'a Instance {
        self.instance
    }

    pub fn total_ops(&self) -> usize {
        self.total_ops
    }

    pub fn root(&self) -> BnbNode {
        BnbNode {
            starts: vec![None; self.total_ops],
            next: [[0; 2]; 4],
            frontier: [0; 4],
            depth: 0,
            path: Vec::new(),
            log: Vec::new(),
        }
    }

    pub fn is_leaf(&self, node: &BnbNode) -> bool {
        node.depth == self.total_ops
    }

    fn slot(&self, set: SetLabel, k: usize, op: Op) -> usize {
        self.offset[set.index()] + 2 * k + op.index()
    }

    fn job(&self, set: SetLabel, k: usize) -> &'a Job {
        &self.instance.chain(set)[k]
    }

    fn machine(set: SetLabel, op: Op) -> Machine {
        let (a, b) = set.route();
        match op {
            Op::First => a,
            Op::Second => b,
        }
    }

    fn no_wait(&self, set: SetLabel) -> bool {
        self.instance.buffer(set).finite() == Some(0)
    }

    fn start(&self, node: &BnbNode, set: SetLabel, k: usize, op: Op) -> Option<Time> {
        node.starts[self.slot(set, k, op)]
    }

    /// Chain index of the next operation `op` of `set`, if it may be appended.
    pub fn possible(&self, node: &BnbNode, set: SetLabel, op: Op) -> Option<usize> {
        let k = node.next[set.index()][op.index()];
        if k >= self.len[set.index()] {
            return None;
        }
        match op {
            // A zero buffer admits the next first operation once the
            // previous job has left, like a buffer of one.
            Op::First => match self.instance.buffer(set).finite().map(|b| b.max(1)) {
                Some(b) if k >= b => (node.next[set.index()][1] > k - b).then_some(k),
                _ => Some(k),
            },
            Op::Second => (node.next[set.index()][0] > k).then_some(k),
        }
    }

    /// Earliest start of `op` in `node` given the already scheduled
    /// operations. Errors when `op` is not the next possible operation.
    pub fn earliest_start(&self, node: &BnbNode, op: OpRef) -> Result<Time> {
        let job = self.instance.job(op.job).ok_or(Error::UnknownJob(op.job))?;
        let k = job.chain_pos - 1;
        if self.possible(node, job.set, op.op) != Some(k) {
            return Err(Error::NotPossible(op));
        }
        Ok(self.earliest(node, job.set, k, op.op))
    }

    fn earliest(&self, node: &BnbNode, set: SetLabel, k: usize, op: Op) -> Time {
        let p = self.p;
        let completed = |k: usize, op: Op| self.start(node, set, k, op).expect("scheduled predecessor") + p;
        let m = Self::machine(set, op).index();
        match op {
            Op::First => {
                let mut s = self.job(set, k).release.max(node.frontier[m]);
                if k > 0 {
                    s = s.max(completed(k - 1, Op::First));
                }
                match self.instance.buffer(set).finite() {
                    // The second operation has to follow at once on a
                    // machine that is only ever appended to.
                    Some(0) => s = s.max(node.frontier[Self::machine(set, Op::Second).index()] - p),
                    Some(b) if k >= b => {
                        let blocking = self.start(node, set, k - b, Op::Second).expect("buffer predecessor");
                        s = s.max(blocking - p);
                    }
                    _ => {}
                }
                s
            }
            Op::Second => {
                let mut s = node.frontier[m].max(completed(k, Op::First));
                if k > 0 {
                    s = s.max(completed(k - 1, Op::Second));
                }
                s
            }
        }
    }

    fn place(&self, node: &mut BnbNode, set: SetLabel, k: usize, op: Op, start: Time) {
        node.starts[self.slot(set, k, op)] = Some(start);
        node.next[set.index()][op.index()] = k + 1;
        node.frontier[Self::machine(set, op).index()] = start + self.p;
        node.depth += 1;
        node.log.push((set, k, op));
    }

    /// A zero-buffer job whose first operation is placed and whose second is
    /// not pins `machine` at the completion of that first operation; returns
    /// the set and that time.
    pub fn forced(&self, node: &BnbNode, machine: Machine) -> Option<(SetLabel, Time)> {
        let set = SetLabel::ALL
            .into_iter()
            .find(|s| Self::machine(*s, Op::Second) == machine)
            .expect("every machine serves one second operation");
        let k = node.next[set.index()][1];
        (self.no_wait(set) && node.next[set.index()][0] > k)
            .then(|| self.start(node, set, k, Op::First).expect("placed first operation") + self.p)
            .map(|t| (set, t))
    }

    /// Child obtained by taking branch `index` (0-based into [`BRANCHES`]).
    pub fn child(&self, node: &BnbNode, index: usize) -> Option<BnbNode> {
        let (set, op) = BRANCHES[index];
        let k = self.possible(node, set, op)?;
        let start = self.earliest(node, set, k, op);
        if let Some((pending, forced)) = self.forced(node, Self::machine(set, op)) {
            let fits = if pending == set && op == Op::Second {
                start == forced
            } else {
                start + self.p <= forced
            };
            if !fits {
                return None;
            }
        }
        let mut child = node.clone();
        self.place(&mut child, set, k, op, start);
        child.path.push(index as u8);
        Some(child)
    }

    /// All children of `node` in branch order.
    pub fn branch(&self, node: &BnbNode) -> Vec<BnbNode> {
        (0..BRANCHES.len()).filter_map(|i| self.child(node, i)).collect()
    }

    fn relaxed(&self, node: &BnbNode) -> Relaxed {
        let p = self.p;
        let mut starts = vec![0; self.total_ops];
        for set in SetLabel::ALL {
            let m1 = Self::machine(set, Op::First).index();
            let m2 = Self::machine(set, Op::Second).index();
            let buffer = self.instance.buffer(set).finite();
            for k in 0..self.len[set.index()] {
                let (i1, i2) = (self.slot(set, k, Op::First), self.slot(set, k, Op::Second));
                let prev1 = (k > 0).then(|| starts[self.slot(set, k - 1, Op::First)] + p);
                let prev2 = (k > 0).then(|| starts[self.slot(set, k - 1, Op::Second)] + p);
                let s1 = match node.starts[i1] {
                    Some(s) => s,
                    None => {
                        let mut s = self.job(set, k).release.max(node.frontier[m1]);
                        if let Some(c) = prev1 {
                            s = s.max(c);
                        }
                        match buffer {
                            Some(0) => {
                                s = s.max(node.frontier[m2] - p);
                                if let Some(c) = prev2 {
                                    s = s.max(c - p);
                                }
                            }
                            Some(b) if k >= b => s = s.max(starts[self.slot(set, k - b, Op::Second)] - p),
                            _ => {}
                        }
                        s
                    }
                };
                starts[i1] = s1;
                starts[i2] = match node.starts[i2] {
                    Some(s) => s,
                    None => {
                        let mut s = node.frontier[m2].max(s1 + p);
                        if let Some(c) = prev2 {
                            s = s.max(c);
                        }
                        s
                    }
                };
            }
        }
        Relaxed { starts }
    }

    /// Machine-wise lower bound on the makespan of any completion of `node`.
    pub fn lb1(&self, node: &BnbNode) -> BoundReport {
        let relaxed = self.relaxed(node);
        let p = self.p;
        let mut spans: [Vec<Time>; 4] = Default::default();
        for set in SetLabel::ALL {
            for k in 0..self.len[set.index()] {
                for op in [Op::First, Op::Second] {
                    let i = self.slot(set, k, op);
                    if node.starts[i].is_none() {
                        spans[Self::machine(set, op).index()].push(relaxed.starts[i]);
                    }
                }
            }
        }
        let mut report = BoundReport::default();
        for (m, starts) in spans.iter_mut().enumerate() {
            starts.sort_unstable();
            let mut bound = MachineBound {
                c: node.frontier[m],
                ..MachineBound::default()
            };
            if let (Some(&first), Some(&last)) = (starts.first(), starts.last()) {
                let mut covered = 0;
                let mut reach = first;
                for &s in starts.iter() {
                    let e = s + p;
                    if e > reach {
                        covered += e - s.max(reach);
                        reach = e;
                    }
                }
                let span = last + p - first;
                bound.c = bound.c.max(last + p);
                bound.idle = span - covered;
                bound.overlap = starts.len() as Time * p - covered;
            }
            bound.c_prime = bound.c + (bound.overlap - bound.idle).max(0);
            report.machines[m] = bound;
            report.lb1 = report.lb1.max(bound.c_prime);
        }
        report
    }

    /// Objective contribution of the jobs whose second operation is placed
    /// (their completion is final). For `Cmax` the latest placed completion.
    pub fn partial_value(&self, node: &BnbNode, objective: Objective) -> Time {
        let mut acc = 0;
        for set in SetLabel::ALL {
            for k in 0..node.next[set.index()][1] {
                let c = self.start(node, set, k, Op::Second).expect("placed") + self.p;
                acc = objective.accumulate(acc, self.job(set, k), c);
            }
        }
        if objective == Objective::Cmax {
            acc = acc.max(node.frontier.iter().copied().max().unwrap_or(0));
        }
        acc
    }

    /// Lower bound for the weighted sum objectives: placed jobs count at
    /// their final completion, the others at their relaxed completion.
    pub fn lb_sum(&self, node: &BnbNode, objective: Objective) -> Time {
        let relaxed = self.relaxed(node);
        let mut total = 0;
        for set in SetLabel::ALL {
            for k in 0..self.len[set.index()] {
                let job = self.job(set, k);
                let c = relaxed.starts[self.slot(set, k, Op::Second)] + self.p;
                total += objective.contribution(job, c);
            }
        }
        total
    }

    /// The bound used for pruning under `objective`.
    pub fn bound(&self, node: &BnbNode, objective: Objective) -> Time {
        match objective {
            Objective::Cmax => self.lb1(node).lb1,
            _ => self.lb_sum(node, objective),
        }
    }

    /// Machine orders of the placed operations.
    pub fn schedule(&self, node: &BnbNode) -> Schedule {
        let mut machines: [Vec<OpRef>; 4] = Default::default();
        for &(set, k, op) in &node.log {
            let id = self.job(set, k).id;
            machines[Self::machine(set, op).index()].push(OpRef { job: id, op });
        }
        Schedule::JobShop { machines }
    }

    /// Timings of the placed operations.
    pub fn eval(&self, node: &BnbNode) -> ScheduleEval {
        let ops = node
            .log
            .iter()
            .map(|&(set, k, op)| {
                let start = self.start(node, set, k, op).expect("logged operation is placed");
                OpTiming {
                    op: OpRef {
                        job: self.job(set, k).id,
                        op,
                    },
                    machine: Self::machine(set, op),
                    start,
                    completion: start + self.p,
                }
            })
            .collect();
        ScheduleEval::from_timings(self.instance, ops).expect("node jobs belong to the instance")
    }
}
