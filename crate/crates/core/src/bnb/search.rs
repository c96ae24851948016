use std::sync::atomic::{AtomicBool, AtomicI64, AtomicU64, AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use super::{BnbNode, Shop, BRANCHES};
use crate::error::Result;
use crate::model::{Instance, Machine, Objective, Op, Schedule, SetLabel, Time};
use crate::par;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchLimits {
    /// Stop after expanding this many nodes.
    pub node_limit: Option<u64>,
    pub time_limit: Option<Duration>,
    /// Worker threads for the subtree search; 0 and 1 search sequentially.
    pub threads: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Non-leaf nodes whose children were generated.
    pub expanded: u64,
    /// Children discarded because their bound reached the incumbent.
    pub pruned: u64,
    pub leaves: u64,
    pub max_depth: usize,
    pub root_bound: Time,
    pub upper_bound: Time,
    pub elapsed: Duration,
    /// False when a limit stopped the search before the tree was exhausted.
    pub complete: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BnbSolution {
    pub schedule: Schedule,
    pub value: Time,
    /// The search finished, so `value` is the optimum.
    pub optimal: bool,
    pub stats: SearchStats,
}

/// Greedy feasible schedule: operations are ranked by release date, set,
/// chain position and operation, and the first possible one in that ranking
/// is appended until every operation is placed.
pub fn list_schedule_ub(instance: &Instance, objective: Objective) -> Result<(Schedule, Time)> {
    objective.check(instance.kind())?;
    let shop = Shop::new(instance)?;
    let leaf = list_schedule(&shop);
    Ok((shop.schedule(&leaf), shop.partial_value(&leaf, objective)))
}

fn list_schedule(shop: &Shop) -> BnbNode {
    let mut ranked = Vec::with_capacity(shop.total_ops());
    for set in SetLabel::ALL {
        for (k, job) in shop.instance().chain(set).iter().enumerate() {
            for op in [Op::First, Op::Second] {
                let branch = BRANCHES
                    .iter()
                    .position(|&b| b == (set, op))
                    .expect("every route is a branch");
                ranked.push(((job.release, set.index(), k, op.index()), branch, set, k, op));
            }
        }
    }
    ranked.sort_unstable_by_key(|r| r.0);

    let mut node = shop.root();
    while !shop.is_leaf(&node) {
        if let Some((set, _)) = Machine::ALL.into_iter().find_map(|m| shop.forced(&node, m)) {
            let branch = BRANCHES
                .iter()
                .position(|&b| b == (set, Op::Second))
                .expect("every route is a branch");
            node = shop.child(&node, branch).expect("forced operation fits");
            continue;
        }
        let next = ranked
            .iter()
            .find(|&&(_, _, set, k, op)| shop.possible(&node, set, op) == Some(k))
            .expect("a partial node always has a possible operation");
        node = shop.child(&node, next.1).expect("possible branch");
    }
    node
}

/// Exact minimisation of `objective` over the crossroad instance.
pub fn solve_jobshop(instance: &Instance, objective: Objective, limits: SearchLimits) -> Result<BnbSolution> {
    solve(instance, objective, limits, None::<fn(&BnbNode, Time)>)
}

/// Sequential search calling `observer` with every visited node and its
/// bound, leaves included.
pub fn solve_jobshop_observed(
    instance: &Instance,
    objective: Objective,
    limits: SearchLimits,
    observer: impl FnMut(&BnbNode, Time),
) -> Result<BnbSolution> {
    let limits = SearchLimits { threads: 1, ..limits };
    solve(instance, objective, limits, Some(observer))
}

struct Shared {
    best: AtomicI64,
    expanded: AtomicU64,
    abort: AtomicBool,
    /// Lowest task index that found a leaf within the threshold.
    found: AtomicUsize,
}

struct Dfs<'s, 'a, F> {
    shop: &'s Shop<'a>,
    objective: Objective,
    limits: SearchLimits,
    started: Instant,
    best_value: Time,
    best: Option<BnbNode>,
    stats: SearchStats,
    aborted: bool,
    /// Bound threshold of the current pass, when deepening.
    threshold: Option<Time>,
    /// Smallest bound cut by the threshold, the next threshold to try.
    next_threshold: Time,
    found: bool,
    observer: Option<F>,
    shared: Option<&'s Shared>,
    task: usize,
}

impl<'s, 'a, F: FnMut(&BnbNode, Time)> Dfs<'s, 'a, F> {
    fn new(shop: &'s Shop<'a>, objective: Objective, limits: SearchLimits, started: Instant, ub: Time) -> Self {
        Dfs {
            shop,
            objective,
            limits,
            started,
            best_value: ub,
            best: None,
            stats: SearchStats::default(),
            aborted: false,
            threshold: None,
            next_threshold: Time::MAX,
            found: false,
            observer: None,
            shared: None,
            task: 0,
        }
    }

    fn over_limit(&mut self) -> bool {
        let expanded = match self.shared {
            Some(shared) => {
                if shared.abort.load(Ordering::Relaxed) {
                    return true;
                }
                shared.expanded.fetch_add(1, Ordering::Relaxed)
            }
            None => self.stats.expanded,
        };
        let hit = self.limits.node_limit.is_some_and(|n| expanded >= n)
            || (expanded % 256 == 0 && self.limits.time_limit.is_some_and(|t| self.started.elapsed() >= t));
        if hit {
            if let Some(shared) = self.shared {
                shared.abort.store(true, Ordering::Relaxed);
            }
        }
        hit
    }

    fn halted(&self) -> bool {
        self.aborted
            || self.found
            || self.threshold.is_some() && self.shared.is_some_and(|s| s.found.load(Ordering::Relaxed) < self.task)
    }

    fn cut(&mut self, bound: Time) -> bool {
        if bound >= self.best_value {
            return true;
        }
        if let Some(t) = self.threshold {
            if bound > t {
                self.next_threshold = self.next_threshold.min(bound);
                return true;
            }
        }
        self.shared.is_some_and(|s| bound > s.best.load(Ordering::Relaxed))
    }

    fn visit(&mut self, node: &BnbNode, bound: Time) {
        if let Some(observer) = self.observer.as_mut() {
            observer(node, bound);
        }
        self.stats.max_depth = self.stats.max_depth.max(node.depth());
        if self.shop.is_leaf(node) {
            self.stats.leaves += 1;
            let value = self.shop.partial_value(node, self.objective);
            if value < self.best_value {
                self.best_value = value;
                self.best = Some(node.clone());
                if let Some(shared) = self.shared {
                    shared.best.fetch_min(value, Ordering::Relaxed);
                }
                if self.threshold.is_some() {
                    self.found = true;
                    if let Some(shared) = self.shared {
                        shared.found.fetch_min(self.task, Ordering::Relaxed);
                    }
                }
            }
            return;
        }
        if self.over_limit() {
            self.aborted = true;
            return;
        }
        self.stats.expanded += 1;
        for i in 0..BRANCHES.len() {
            let Some(child) = self.shop.child(node, i) else {
                continue;
            };
            let bound = self.shop.bound(&child, self.objective);
            if self.cut(bound) {
                self.stats.pruned += 1;
                continue;
            }
            self.visit(&child, bound);
            if self.halted() {
                return;
            }
        }
    }

    /// Searches every task subtree in order, on the pool when there is more
    /// than one task, and keeps the first best leaf in task order.
    fn run(&mut self, tasks: &[(BnbNode, Time)]) {
        if let [(node, bound)] = tasks {
            if self.cut(*bound) {
                self.stats.pruned += 1;
            } else {
                self.visit(node, *bound);
            }
            return;
        }
        let shared = Shared {
            best: AtomicI64::new(self.best_value),
            expanded: AtomicU64::new(self.stats.expanded),
            abort: AtomicBool::new(false),
            found: AtomicUsize::new(usize::MAX),
        };
        let (shop, objective, limits, started, ub, threshold) = (
            self.shop,
            self.objective,
            self.limits,
            self.started,
            self.best_value,
            self.threshold,
        );
        let results = par::with_threads(limits.threads, || {
            let indexed: Vec<(usize, &(BnbNode, Time))> = tasks.iter().enumerate().collect();
            par::map(&indexed, |&(task, (node, bound))| {
                let mut dfs = Dfs::<fn(&BnbNode, Time)>::new(shop, objective, limits, started, ub);
                dfs.threshold = threshold;
                dfs.shared = Some(&shared);
                dfs.task = task;
                if dfs.cut(*bound) {
                    dfs.stats.pruned += 1;
                } else if !dfs.halted() {
                    dfs.visit(node, *bound);
                }
                (
                    dfs.best.map(|n| (dfs.best_value, n)),
                    dfs.stats,
                    dfs.aborted,
                    dfs.found,
                    dfs.next_threshold,
                )
            })
        });
        for (best, stats, aborted, found, next) in results {
            if let Some((value, node)) = best {
                if value < self.best_value {
                    self.best_value = value;
                    self.best = Some(node);
                }
            }
            self.stats.expanded += stats.expanded;
            self.stats.pruned += stats.pruned;
            self.stats.leaves += stats.leaves;
            self.stats.max_depth = self.stats.max_depth.max(stats.max_depth);
            self.aborted |= aborted;
            self.found |= found;
            self.next_threshold = self.next_threshold.min(next);
        }
    }

    /// Expands nodes breadth-first, in branch order, until there are enough
    /// subtrees to spread over the pool.
    fn split(&mut self, root: BnbNode, root_bound: Time) -> Vec<(BnbNode, Time)> {
        let shop = self.shop;
        let target = 8 * self.limits.threads;
        let mut tasks = vec![(root, root_bound)];
        while tasks.len() < target && tasks.iter().any(|(n, _)| !shop.is_leaf(n)) {
            let mut next = Vec::new();
            for (node, bound) in tasks {
                if shop.is_leaf(&node) {
                    next.push((node, bound));
                    continue;
                }
                self.stats.expanded += 1;
                self.stats.max_depth = self.stats.max_depth.max(node.depth());
                for i in 0..BRANCHES.len() {
                    let Some(child) = shop.child(&node, i) else { continue };
                    let b = shop.bound(&child, self.objective);
                    if b >= self.best_value {
                        self.stats.pruned += 1;
                    } else {
                        next.push((child, b));
                    }
                }
            }
            tasks = next;
        }
        tasks
    }
}

fn solve<F: FnMut(&BnbNode, Time)>(
    instance: &Instance,
    objective: Objective,
    limits: SearchLimits,
    observer: Option<F>,
) -> Result<BnbSolution> {
    objective.check(instance.kind())?;
    let started = Instant::now();
    let shop = Shop::new(instance)?;
    let ub_leaf = list_schedule(&shop);
    let ub = shop.partial_value(&ub_leaf, objective);
    let root = shop.root();
    let root_bound = shop.bound(&root, objective);

    let mut dfs = Dfs::new(&shop, objective, limits, started, ub);
    dfs.observer = observer;
    if root_bound >= ub {
        if let Some(observer) = dfs.observer.as_mut() {
            observer(&root, root_bound);
        }
        dfs.stats.pruned += 1;
    } else {
        let tasks = if limits.threads > 1 && par::is_parallel() {
            dfs.split(root, root_bound)
        } else {
            vec![(root, root_bound)]
        };
        if objective == Objective::Cmax {
            // Deepen the bound threshold from the root bound: a pass visits
            // only nodes whose bound is within the threshold, and the first
            // leaf found is optimal.
            let mut threshold = root_bound;
            while threshold < ub {
                dfs.threshold = Some(threshold);
                dfs.next_threshold = Time::MAX;
                dfs.run(&tasks);
                if dfs.found || dfs.aborted {
                    break;
                }
                threshold = dfs.next_threshold;
            }
        } else {
            dfs.run(&tasks);
        }
    }

    let mut stats = dfs.stats;
    stats.root_bound = root_bound;
    stats.upper_bound = ub;
    stats.complete = !dfs.aborted;
    stats.elapsed = started.elapsed();
    let leaf = dfs.best.unwrap_or(ub_leaf);
    Ok(BnbSolution {
        schedule: shop.schedule(&leaf),
        value: dfs.best_value,
        optimal: stats.complete,
        stats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{compute_active_times, validate_schedule, Capacity, JobSpec, ProblemKind, ProcTimes};
    use crate::oracle::brute_jobshop;

    fn crossroad(chains: Vec<Vec<JobSpec>>, p: Time, buffers: [Capacity; 4]) -> Instance {
        Instance::new(ProblemKind::Crossroad, ProcTimes::Equal(p), chains, Some(buffers)).unwrap()
    }

    fn two_sets() -> Instance {
        crossroad(
            vec![vec![JobSpec::new(1, 0)], vec![], vec![JobSpec::new(2, 0)], vec![]],
            2,
            [Capacity::Unbounded; 4],
        )
    }

    #[test]
    fn list_schedule_is_feasible() {
        let inst = two_sets();
        let (schedule, value) = list_schedule_ub(&inst, Objective::Cmax).unwrap();
        assert_eq!(value, 4);
        let eval = compute_active_times(&inst, &schedule).unwrap();
        assert!(validate_schedule(&inst, &schedule, &eval).is_empty());
        assert_eq!(eval.c_max, 4);
    }

    #[test]
    fn solve_small_cases() {
        let sol = solve_jobshop(&two_sets(), Objective::Cmax, SearchLimits::default()).unwrap();
        assert_eq!(sol.value, 4);
        assert!(sol.optimal);

        let empty = crossroad(vec![vec![], vec![], vec![], vec![]], 2, [Capacity::Finite(0); 4]);
        let sol = solve_jobshop(&empty, Objective::SumWC, SearchLimits::default()).unwrap();
        assert_eq!(sol.value, 0);

        let single = crossroad(
            vec![vec![JobSpec::new(1, 1)], vec![], vec![], vec![]],
            2,
            [Capacity::Finite(0); 4],
        );
        let sol = solve_jobshop(&single, Objective::Cmax, SearchLimits::default()).unwrap();
        assert_eq!(sol.value, 5);
    }

    #[test]
    fn rejects_other_kinds() {
        let inst = Instance::new(ProblemKind::TwoChains, ProcTimes::Equal(1), vec![vec![], vec![]], None).unwrap();
        assert!(solve_jobshop(&inst, Objective::SumC, SearchLimits::default()).is_err());
    }

    fn busy(buffers: [Capacity; 4]) -> Instance {
        crossroad(
            vec![
                vec![JobSpec::new(1, 0), JobSpec::new(2, 1).weight(3)],
                vec![JobSpec::new(3, 0).weight(2), JobSpec::new(4, 2)],
                vec![JobSpec::new(5, 1).due(4)],
                vec![JobSpec::new(6, 0).due(3), JobSpec::new(7, 3).weight(2)],
            ],
            2,
            buffers,
        )
    }

    #[test]
    fn matches_oracle() {
        let caps = [
            [Capacity::Unbounded; 4],
            [Capacity::Finite(0); 4],
            [Capacity::Finite(1); 4],
            [
                Capacity::Finite(0),
                Capacity::Finite(1),
                Capacity::Unbounded,
                Capacity::Finite(0),
            ],
        ];
        for buffers in caps {
            let inst = busy(buffers);
            for objective in [Objective::Cmax, Objective::SumWC, Objective::SumWT] {
                let sol = solve_jobshop(&inst, objective, SearchLimits::default()).unwrap();
                let oracle = brute_jobshop(&inst, objective).unwrap();
                assert_eq!(sol.value, oracle.value, "{buffers:?} {objective:?}");
                let eval = compute_active_times(&inst, &sol.schedule).unwrap();
                assert!(validate_schedule(&inst, &sol.schedule, &eval).is_empty());
                assert_eq!(eval.objective_value(objective).unwrap(), sol.value);
            }
        }
    }

    #[test]
    fn observer_sees_root_and_bounds_hold() {
        let inst = busy([Capacity::Finite(1); 4]);
        let optimum = brute_jobshop(&inst, Objective::SumWC).unwrap().value;
        let mut visited = 0u64;
        let sol = solve_jobshop_observed(&inst, Objective::SumWC, SearchLimits::default(), |node, bound| {
            if node.depth() == 0 {
                assert!(bound <= optimum);
            }
            visited += 1;
        })
        .unwrap();
        assert!(visited >= 1);
        assert_eq!(sol.value, optimum);
    }

    #[test]
    fn node_limit_stops_early() {
        let inst = busy([Capacity::Unbounded; 4]);
        let limits = SearchLimits {
            node_limit: Some(3),
            ..SearchLimits::default()
        };
        let sol = solve_jobshop(&inst, Objective::SumWT, limits).unwrap();
        if !sol.optimal {
            assert!(sol.stats.expanded <= 3);
            assert!(!sol.stats.complete);
        }
        let eval = compute_active_times(&inst, &sol.schedule).unwrap();
        assert_eq!(eval.objective_value(Objective::SumWT).unwrap(), sol.value);
    }

    #[test]
    fn threads_agree_with_sequential() {
        let inst = busy([
            Capacity::Finite(1),
            Capacity::Unbounded,
            Capacity::Finite(0),
            Capacity::Finite(1),
        ]);
        for objective in [Objective::Cmax, Objective::SumWC] {
            let seq = solve_jobshop(&inst, objective, SearchLimits::default()).unwrap();
            let par = solve_jobshop(
                &inst,
                objective,
                SearchLimits {
                    threads: 4,
                    ..SearchLimits::default()
                },
            )
            .unwrap();
            assert_eq!(seq.value, par.value);
            assert_eq!(seq.schedule, par.schedule);
        }
    }
}
