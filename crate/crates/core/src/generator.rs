//! Seeded random instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{Capacity, Instance, JobSpec, ProblemKind, ProcTimes, Time};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorParams {
    pub kind: ProblemKind,
    /// Chain length of each set, in set order.
    pub sizes: Vec<usize>,
    pub proc_times: ProcTimes,
    /// Releases are drawn from `[0, r_max]`.
    pub r_max: Time,
    /// Due dates are drawn from `[0, d_max]`; `None` leaves every job without one.
    pub d_max: Option<Time>,
    /// Weights are drawn from `[1, w_max]`.
    pub w_max: Time,
    /// Crossroad buffer capacities.
    pub buffers: Option<[Capacity; 4]>,
    pub seed: u64,
}

impl GeneratorParams {
    pub fn new(kind: ProblemKind, sizes: Vec<usize>, p: Time, seed: u64) -> Self {
        GeneratorParams {
            kind,
            sizes,
            proc_times: ProcTimes::Equal(p),
            r_max: 0,
            d_max: None,
            w_max: 1,
            buffers: (kind == ProblemKind::Crossroad).then_some([Capacity::Unbounded; 4]),
            seed,
        }
    }
}

/// Draws an instance. Job ids run from 1 in set and chain order, and the
/// releases of each chain are sorted so that chain order matches arrival.
pub fn generate_instance(params: &GeneratorParams) -> Result<Instance> {
    if params.sizes.len() != params.kind.set_count() {
        return Err(Error::InvalidInstance(format!(
            "{} instances have {} sets, got {} sizes",
            params.kind,
            params.kind.set_count(),
            params.sizes.len()
        )));
    }
    if params.r_max < 0 || params.d_max.is_some_and(|d| d < 0) || params.w_max < 1 {
        return Err(Error::InvalidInstance(
            "ranges need r_max >= 0, d_max >= 0 and w_max >= 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut next_id = 1;
    let mut chains = Vec::with_capacity(params.sizes.len());
    for &size in &params.sizes {
        let mut releases: Vec<Time> = (0..size).map(|_| rng.random_range(0..=params.r_max)).collect();
        releases.sort_unstable();
        let chain = releases
            .into_iter()
            .map(|r| {
                let mut job = JobSpec::new(next_id, r).weight(rng.random_range(1..=params.w_max));
                if let Some(d_max) = params.d_max {
                    job = job.due(rng.random_range(0..=d_max));
                }
                next_id += 1;
                job
            })
            .collect();
        chains.push(chain);
    }
    Instance::new(params.kind, params.proc_times, chains, params.buffers)
}
