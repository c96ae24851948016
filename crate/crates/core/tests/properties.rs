use cav_sched::dp_dedicated::{solve_dedicated, solve_dedicated_with};
use cav_sched::dp_merge::{merge_by_release, solve_two_chains, solve_two_chains_with, DpOptions};
use cav_sched::format::{parse_instance, parse_solution, serialize_instance, serialize_solution, Solution};
use cav_sched::generator::{generate_instance, GeneratorParams};
use cav_sched::model::{
    compute_active_times, evaluate_single_sequence, validate_schedule, Capacity, Instance, JobSpec, Objective,
    ProblemKind, ProcTimes, SetLabel,
};
use cav_sched::oracle::{brute_dedicated, brute_two_chains};
use proptest::prelude::*;

fn two_chains(n1: usize, n2: usize, p: ProcTimes, dues: bool, seed: u64) -> Instance {
    generate_instance(&GeneratorParams {
        proc_times: p,
        r_max: 10,
        d_max: dues.then_some(15),
        w_max: 5,
        ..GeneratorParams::new(ProblemKind::TwoChains, vec![n1, n2], 1, seed)
    })
    .unwrap()
}

fn dedicated(sizes: Vec<usize>, p: i64, dues: bool, seed: u64) -> Instance {
    generate_instance(&GeneratorParams {
        r_max: 8,
        d_max: dues.then_some(12),
        w_max: 4,
        ..GeneratorParams::new(ProblemKind::DedicatedParallel, sizes, p, seed)
    })
    .unwrap()
}

fn proc_times() -> impl Strategy<Value = ProcTimes> {
    prop_oneof![
        (1i64..=3).prop_map(ProcTimes::Equal),
        (1i64..=3, 1i64..=3).prop_map(|(n1, n2)| ProcTimes::PerLane { n1, n2 }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn merge_dp_matches_enumeration(n1 in 0usize..=4, n2 in 0usize..=4, p in proc_times(), dues: bool, seed: u64) {
        let inst = two_chains(n1, n2, p, dues, seed);
        for objective in Objective::SUMS {
            let dp = solve_two_chains(&inst, objective).unwrap();
            prop_assert_eq!(dp.value, brute_two_chains(&inst, objective).unwrap().value);
            let eval = evaluate_single_sequence(&inst, &dp.sequence).unwrap();
            prop_assert_eq!(eval.objective_value(objective).unwrap(), dp.value);
        }
    }

    #[test]
    fn merge_dominance_is_safe(n1 in 0usize..=4, n2 in 0usize..=4, p in proc_times(), seed: u64) {
        let inst = two_chains(n1, n2, p, true, seed);
        for objective in Objective::SUMS {
            let pruned = solve_two_chains(&inst, objective).unwrap();
            let full = solve_two_chains_with(&inst, objective, DpOptions { prune: false }).unwrap();
            prop_assert_eq!(pruned.value, full.value);
            prop_assert!(pruned.stats.total_created() <= full.stats.total_created());
            let again = solve_two_chains(&inst, objective).unwrap();
            prop_assert_eq!(again.sequence, pruned.sequence);
        }
    }

    #[test]
    fn merge_states_stay_within_theta(n1 in 0usize..=6, n2 in 0usize..=6, p in proc_times(), seed: u64) {
        let inst = two_chains(n1, n2, p, true, seed);
        let sol = solve_two_chains(&inst, Objective::SumWT).unwrap();
        for &kept in &sol.stats.retained {
            prop_assert!(kept <= (n1 + 1) * sol.stats.theta_bound.max(1));
        }
    }

    #[test]
    fn release_order_is_optimal_for_flow_time(n1 in 0usize..=5, n2 in 0usize..=5, p in 1i64..=3, seed: u64) {
        let inst = two_chains(n1, n2, ProcTimes::Equal(p), false, seed);
        let merged = merge_by_release(&inst).unwrap();
        let value = evaluate_single_sequence(&inst, &merged).unwrap().sum_c;
        prop_assert_eq!(value, solve_two_chains(&inst, Objective::SumC).unwrap().value);
    }

    #[test]
    fn dedicated_dp_matches_enumeration(a in 0usize..=3, b in 0usize..=3, c in 0usize..=3, p in 1i64..=3, dues: bool, seed: u64) {
        let inst = dedicated(vec![a, b, c], p, dues, seed);
        for objective in Objective::SUMS {
            let dp = solve_dedicated(&inst, objective).unwrap();
            prop_assert_eq!(dp.value, brute_dedicated(&inst, objective).unwrap().value);
            let eval = compute_active_times(&inst, &dp.schedule).unwrap();
            let violations = validate_schedule(&inst, &dp.schedule, &eval);
            prop_assert!(violations.is_empty(), "{:?}", violations);
            prop_assert_eq!(eval.objective_value(objective).unwrap(), dp.value);
            let full = solve_dedicated_with(&inst, objective, false).unwrap();
            prop_assert_eq!(full.value, dp.value);
        }
    }

    #[test]
    fn dedicated_machines_are_symmetric(a in 0usize..=3, b in 0usize..=3, c in 0usize..=3, seed: u64) {
        let inst = dedicated(vec![a, b, c], 2, true, seed);
        let spec = |set: SetLabel| -> Vec<JobSpec> {
            inst.chain(set)
                .iter()
                .map(|j| {
                    let s = JobSpec::new(j.id.0, j.release).weight(j.weight);
                    match j.due {
                        Some(d) => s.due(d),
                        None => s,
                    }
                })
                .collect()
        };
        let mirrored = Instance::new(
            ProblemKind::DedicatedParallel,
            inst.proc_times(),
            vec![spec(SetLabel::N3), spec(SetLabel::N2), spec(SetLabel::N1)],
            None,
        )
        .unwrap();
        for objective in Objective::SUMS {
            prop_assert_eq!(
                solve_dedicated(&inst, objective).unwrap().value,
                solve_dedicated(&mirrored, objective).unwrap().value
            );
        }
    }

    #[test]
    fn instance_documents_round_trip(kind in 0usize..3, seed: u64, dues: bool) {
        let kind = [ProblemKind::TwoChains, ProblemKind::DedicatedParallel, ProblemKind::Crossroad][kind];
        let caps = [Capacity::Finite(0), Capacity::Finite(2), Capacity::Unbounded];
        let params = GeneratorParams {
            r_max: 20,
            d_max: dues.then_some(30),
            w_max: 9,
            buffers: (kind == ProblemKind::Crossroad).then(|| std::array::from_fn(|i| caps[(seed as usize + i) % 3])),
            ..GeneratorParams::new(kind, vec![3; kind.set_count()], 1 + (seed % 4) as i64, seed)
        };
        let inst = generate_instance(&params).unwrap();
        let text = serialize_instance(&inst);
        let back = parse_instance(&text).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(serialize_instance(&back), text);
    }

    #[test]
    fn solution_documents_round_trip(n1 in 0usize..=4, n2 in 0usize..=4, seed: u64) {
        let inst = two_chains(n1, n2, ProcTimes::Equal(2), true, seed);
        let dp = solve_two_chains(&inst, Objective::SumWT).unwrap();
        let eval = evaluate_single_sequence(&inst, &dp.sequence).unwrap();
        let solution = Solution::new(&eval, Objective::SumWT, true).unwrap();
        let text = serialize_solution(&solution);
        let parsed = parse_solution(&text).unwrap();
        prop_assert_eq!(serialize_solution(&parsed), text);
        let (schedule, back) = parsed.resolve(&inst).unwrap();
        prop_assert!(validate_schedule(&inst, &schedule, &back).is_empty());
        prop_assert_eq!(back.sum_wt, dp.value);
    }
}
