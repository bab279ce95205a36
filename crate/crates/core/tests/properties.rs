//! Randomized invariants over generated instances.

use proptest::prelude::*;

use hybrid_sched::allocate::{optimal_b, round_hlpb};
use hybrid_sched::genlab::{random_layered_dag, RandomDagConfig};
use hybrid_sched::instance::{validate_schedule, Side};
use hybrid_sched::lp::{max_constraint_violation, solve_relaxation};
use hybrid_sched::schedule::{hlp_b, list_schedule};

fn dag_config() -> impl Strategy<Value = RandomDagConfig> {
    (2u32..40, 1u32..6, 0.0f64..0.6, 1u32..6, 0u64..1 << 48).prop_map(
        |(tasks, layers, edge_prob, k, seed)| RandomDagConfig {
            tasks,
            layers: layers.min(tasks),
            edge_prob,
            cpu_range: (0.5, 8.0),
            gpu_range: (0.5, 8.0),
            m: k + seed as u32 % 4,
            k,
            seed,
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn topological_order_is_a_valid_permutation(cfg in dag_config()) {
        let instance = random_layered_dag(&cfg).unwrap();
        let order = instance.topological_order();
        prop_assert_eq!(order.len(), instance.task_count());
        let mut position = vec![usize::MAX; instance.task_count()];
        for (pos, &task) in order.iter().enumerate() {
            prop_assert_eq!(position[task as usize], usize::MAX, "duplicate task in order");
            position[task as usize] = pos;
        }
        for &(u, v) in instance.edges() {
            prop_assert!(position[u as usize] < position[v as usize]);
        }
    }

    #[test]
    fn lp_solution_is_feasible_and_pipeline_schedules_validate(cfg in dag_config()) {
        let instance = random_layered_dag(&cfg).unwrap();
        let fractional = solve_relaxation(&instance).unwrap();
        prop_assert!(max_constraint_violation(&instance, &fractional) <= 1e-7);

        let (schedule, diagnostics) = hlp_b(&instance, None).unwrap();
        let report = validate_schedule(&instance, &schedule.allocation(), &schedule);
        prop_assert!(report.ok, "violations: {:?}", report.violations);
        prop_assert!(diagnostics.lp_bound <= diagnostics.makespan + 1e-6);

        // Independent overlap scan, not sharing code with validate_schedule:
        // on each machine, total busy time fits in the makespan.
        let allocation = round_hlpb(&fractional, &instance, optimal_b(cfg.m, cfg.k));
        let mut busy = std::collections::HashMap::<(Side, u32), f64>::new();
        for j in 0..instance.task_count() {
            let side = schedule.pool(j);
            let dur = instance.time_on(j, side).finite().unwrap();
            *busy.entry((side, schedule.machine(j))).or_default() += dur;
        }
        for ((_, _), total) in busy {
            prop_assert!(total <= schedule.makespan() + 1e-6);
        }

        // Same allocation re-scheduled deterministically reproduces the makespan.
        let again = list_schedule(&instance, &allocation, &instance.topological_order()).unwrap();
        prop_assert_eq!(again.makespan(), schedule.makespan());
    }
}
