//! JSON documents for instances and solutions.
//!
//! Instance document (`format_version` 1):
//!
//! ```json
//! {
//!   "format_version": 1,
//!   "kind": "crossroad",
//!   "p": 2,
//!   "chains": {
//!     "N1": [{ "id": 1, "release": 0, "due": 5, "weight": 2 }],
//!     "N2": [],
//!     "N3": [{ "id": 2, "release": 1, "weight": 1 }],
//!     "N4": []
//!   },
//!   "buffers": [1, "inf", 0, 0]
//! }
//! ```
//!
//! `kind` is one of `two_chains`, `dedicated_parallel` and `crossroad`; the
//! kind fixes which of `N1`..`N4` exist. A two-chain instance may add `p2`,
//! the processing time of `N2` (then `p` is that of `N1`). A missing `due`
//! means no due date, a missing `weight` means 1 and a missing chain is
//! empty. `buffers` holds four capacities, numbers or `"inf"`, and is
//! present exactly for crossroad instances.
//!
//! Solution document:
//!
//! ```json
//! {
//!   "format_version": 1,
//!   "kind": "two_chains",
//!   "objective": "sumc",
//!   "value": 20,
//!   "optimal": true,
//!   "operations": [{ "job": 1, "op": 1, "machine": 1, "start": 0, "completion": 2 }]
//! }
//! ```
//!
//! Serialization is canonical: equal values give byte-identical text.

use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::model::{
    Capacity, Instance, JobId, JobSpec, Machine, Objective, Op, OpRef, OpTiming, ProblemKind, ProcTimes, Schedule,
    ScheduleEval, SetLabel, Time,
};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum KindDoc {
    TwoChains,
    DedicatedParallel,
    Crossroad,
}

impl From<ProblemKind> for KindDoc {
    fn from(kind: ProblemKind) -> Self {
        match kind {
            ProblemKind::TwoChains => KindDoc::TwoChains,
            ProblemKind::DedicatedParallel => KindDoc::DedicatedParallel,
            ProblemKind::Crossroad => KindDoc::Crossroad,
        }
    }
}

impl From<KindDoc> for ProblemKind {
    fn from(kind: KindDoc) -> Self {
        match kind {
            KindDoc::TwoChains => ProblemKind::TwoChains,
            KindDoc::DedicatedParallel => ProblemKind::DedicatedParallel,
            KindDoc::Crossroad => ProblemKind::Crossroad,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    format_version: u32,
    kind: KindDoc,
    p: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    p2: Option<u64>,
    #[serde(default)]
    chains: ChainsDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    buffers: Option<Vec<CapacityDoc>>,
}

#[derive(Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ChainsDoc {
    #[serde(rename = "N1", default, skip_serializing_if = "Option::is_none")]
    n1: Option<Vec<JobDoc>>,
    #[serde(rename = "N2", default, skip_serializing_if = "Option::is_none")]
    n2: Option<Vec<JobDoc>>,
    #[serde(rename = "N3", default, skip_serializing_if = "Option::is_none")]
    n3: Option<Vec<JobDoc>>,
    #[serde(rename = "N4", default, skip_serializing_if = "Option::is_none")]
    n4: Option<Vec<JobDoc>>,
}

fn one() -> u64 {
    1
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JobDoc {
    id: u32,
    release: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    due: Option<u64>,
    #[serde(default = "one")]
    weight: u64,
}

struct CapacityDoc(Capacity);

impl Serialize for CapacityDoc {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self.0 {
            Capacity::Finite(b) => serializer.serialize_u32(b),
            Capacity::Unbounded => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for CapacityDoc {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct CapacityVisitor;

        impl Visitor<'_> for CapacityVisitor {
            type Value = CapacityDoc;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a nonnegative buffer capacity or \"inf\"")
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<CapacityDoc, E> {
                u32::try_from(v)
                    .map(|b| CapacityDoc(Capacity::Finite(b)))
                    .map_err(|_| E::invalid_value(de::Unexpected::Unsigned(v), &self))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<CapacityDoc, E> {
                match u64::try_from(v) {
                    Ok(v) => self.visit_u64(v),
                    Err(_) => Err(E::invalid_value(de::Unexpected::Signed(v), &self)),
                }
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<CapacityDoc, E> {
                match v {
                    "inf" => Ok(CapacityDoc(Capacity::Unbounded)),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }

        deserializer.deserialize_any(CapacityVisitor)
    }
}

fn time(value: u64, field: &str) -> Result<Time> {
    Time::try_from(value).map_err(|_| Error::Format(format!("{field}: value {value} is too large")))
}

fn to_u64(value: Time) -> u64 {
    u64::try_from(value).expect("instance values are nonnegative")
}

fn check_version(version: u32) -> Result<()> {
    if version == FORMAT_VERSION {
        Ok(())
    } else {
        Err(Error::Format(format!(
            "format_version: expected {FORMAT_VERSION}, found {version}"
        )))
    }
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Format(e.to_string())
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let doc: InstanceDoc = serde_json::from_str(text).map_err(json_error)?;
    check_version(doc.format_version)?;
    let kind = ProblemKind::from(doc.kind);

    let p = time(doc.p, "p")?;
    let proc_times = match doc.p2 {
        None => ProcTimes::Equal(p),
        Some(_) if kind != ProblemKind::TwoChains => {
            return Err(Error::Format(format!(
                "p2: only two_chains instances have a second processing time, not {kind}"
            )))
        }
        Some(p2) => ProcTimes::PerLane {
            n1: p,
            n2: time(p2, "p2")?,
        },
    };

    let ChainsDoc { n1, n2, n3, n4 } = doc.chains;
    let mut chains = Vec::with_capacity(kind.set_count());
    for (i, chain) in [n1, n2, n3, n4].into_iter().enumerate() {
        let label = SetLabel::from_index(i).expect("four sets");
        if i >= kind.set_count() {
            if chain.is_some() {
                return Err(Error::Format(format!(
                    "chains.{label:?}: {kind} instances have no such set"
                )));
            }
            continue;
        }
        let mut jobs = Vec::new();
        for (k, job) in chain.unwrap_or_default().into_iter().enumerate() {
            let field = format!("chains.{label:?}[{k}]");
            let mut spec = JobSpec::new(job.id, time(job.release, &format!("{field}.release"))?)
                .weight(time(job.weight, &format!("{field}.weight"))?);
            if let Some(d) = job.due {
                spec = spec.due(time(d, &format!("{field}.due"))?);
            }
            jobs.push(spec);
        }
        chains.push(jobs);
    }

    let buffers = match (kind, doc.buffers) {
        (ProblemKind::Crossroad, Some(b)) => {
            let found = b.len();
            let caps: [CapacityDoc; 4] = b
                .try_into()
                .map_err(|_| Error::Format(format!("buffers: expected 4 capacities, found {found}")))?;
            Some(caps.map(|c| c.0))
        }
        (ProblemKind::Crossroad, None) => {
            return Err(Error::Format("buffers: crossroad instances need 4 capacities".into()))
        }
        (_, Some(_)) => return Err(Error::Format(format!("buffers: {kind} instances have no buffers"))),
        (_, None) => None,
    };

    Instance::new(kind, proc_times, chains, buffers)
}

pub fn serialize_instance(instance: &Instance) -> String {
    let (p, p2) = match instance.proc_times() {
        ProcTimes::Equal(p) => (p, None),
        ProcTimes::PerLane { n1, n2 } => (n1, Some(to_u64(n2))),
    };
    let chain = |set: SetLabel| {
        (set.index() < instance.kind().set_count()).then(|| {
            instance
                .chain(set)
                .iter()
                .map(|j| JobDoc {
                    id: j.id.0,
                    release: to_u64(j.release),
                    due: j.due.map(to_u64),
                    weight: to_u64(j.weight),
                })
                .collect()
        })
    };
    let doc = InstanceDoc {
        format_version: FORMAT_VERSION,
        kind: instance.kind().into(),
        p: to_u64(p),
        p2,
        chains: ChainsDoc {
            n1: chain(SetLabel::N1),
            n2: chain(SetLabel::N2),
            n3: chain(SetLabel::N3),
            n4: chain(SetLabel::N4),
        },
        buffers: instance.buffers().map(|b| b.iter().map(|&c| CapacityDoc(c)).collect()),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("instance documents serialize");
    text.push('\n');
    text
}

/// A solved schedule as exchanged in solution documents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub kind: ProblemKind,
    pub objective: Objective,
    pub value: Time,
    pub optimal: bool,
    /// Operation timings ordered by machine, then start.
    pub operations: Vec<OpTiming>,
}

impl Solution {
    /// Records `eval` under `objective`, with the value recomputed from the
    /// timings.
    pub fn new(eval: &ScheduleEval, objective: Objective, optimal: bool) -> Result<Self> {
        let value = eval.objective_value(objective)?;
        let mut operations = eval.ops.clone();
        sort_rows(&mut operations);
        Ok(Solution {
            kind: eval.kind,
            objective,
            value,
            optimal,
            operations,
        })
    }

    /// Schedule and evaluation of the document against `instance`, after
    /// checking that every row names a job of the instance and a machine the
    /// operation may use.
    pub fn resolve(&self, instance: &Instance) -> Result<(Schedule, ScheduleEval)> {
        if self.kind != instance.kind() {
            return Err(Error::KindMismatch(self.kind));
        }
        for row in &self.operations {
            if instance.job(row.op.job).is_none() {
                return Err(Error::UnknownJob(row.op.job));
            }
            if !instance.eligible(row.op, row.machine) {
                return Err(Error::WrongMachine {
                    op: row.op,
                    machine: row.machine,
                });
            }
        }
        let schedule = Schedule::from_timings(self.kind, &self.operations);
        let eval = ScheduleEval::from_timings(instance, self.operations.clone())?;
        Ok((schedule, eval))
    }
}

fn sort_rows(rows: &mut [OpTiming]) {
    rows.sort_by_key(|t| (t.machine, t.start, t.completion, t.op));
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolutionDoc {
    format_version: u32,
    kind: KindDoc,
    objective: String,
    value: u64,
    optimal: bool,
    operations: Vec<RowDoc>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RowDoc {
    job: u32,
    op: u8,
    machine: u8,
    start: u64,
    completion: u64,
}

pub fn serialize_solution(solution: &Solution) -> String {
    let mut rows = solution.operations.clone();
    sort_rows(&mut rows);
    let doc = SolutionDoc {
        format_version: FORMAT_VERSION,
        kind: solution.kind.into(),
        objective: solution.objective.name().to_string(),
        value: to_u64(solution.value),
        optimal: solution.optimal,
        operations: rows
            .iter()
            .map(|t| RowDoc {
                job: t.op.job.0,
                op: t.op.op.number(),
                machine: t.machine.number(),
                start: to_u64(t.start),
                completion: to_u64(t.completion),
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("solution documents serialize");
    text.push('\n');
    text
}

pub fn parse_solution(text: &str) -> Result<Solution> {
    let doc: SolutionDoc = serde_json::from_str(text).map_err(json_error)?;
    check_version(doc.format_version)?;
    let objective = doc
        .objective
        .parse::<Objective>()
        .map_err(|e| Error::Format(format!("objective: {e}")))?;
    let mut operations = Vec::with_capacity(doc.operations.len());
    for (i, row) in doc.operations.into_iter().enumerate() {
        let op = match row.op {
            1 => Op::First,
            2 => Op::Second,
            other => {
                return Err(Error::Format(format!(
                    "operations[{i}].op: expected 1 or 2, found {other}"
                )))
            }
        };
        let machine = Machine::from_number(row.machine).ok_or_else(|| {
            Error::Format(format!(
                "operations[{i}].machine: expected 1 to 4, found {}",
                row.machine
            ))
        })?;
        operations.push(OpTiming {
            op: OpRef {
                job: JobId(row.job),
                op,
            },
            machine,
            start: time(row.start, &format!("operations[{i}].start"))?,
            completion: time(row.completion, &format!("operations[{i}].completion"))?,
        });
    }
    Ok(Solution {
        kind: doc.kind.into(),
        objective,
        value: time(doc.value, "value")?,
        optimal: doc.optimal,
        operations,
    })
}
