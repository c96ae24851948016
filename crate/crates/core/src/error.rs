use thiserror::Error;

use crate::model::{JobId, Machine, Objective, OpRef, ProblemKind};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("schedule kind does not match a {0} instance")]
    KindMismatch(ProblemKind),

    #[error("job {0} is not part of the instance")]
    UnknownJob(JobId),

    #[error("operation {0} is missing from the schedule")]
    MissingOperation(OpRef),

    #[error("operation {0} appears more than once")]
    DuplicateOperation(OpRef),

    #[error("operation {op} cannot run on machine {machine}")]
    WrongMachine { op: OpRef, machine: Machine },

    #[error("chain order violated: job {earlier} must precede job {later}")]
    ChainOrder { earlier: JobId, later: JobId },

    #[error("machine orders and precedences form a positive cycle")]
    InfeasibleOrder,

    #[error("objective {objective} is not supported for {kind} instances")]
    UnsupportedObjective { objective: Objective, kind: ProblemKind },

    #[error("instance too large for exhaustive search: {size} > {limit}")]
    SizeGuard { size: usize, limit: usize },

    #[error("operation {0} is not schedulable in this node")]
    NotPossible(OpRef),

    #[error("{0}")]
    Format(String),
}
