mod common;

use proptest::prelude::*;
use rand::Rng;

use common::*;
use proxy_belief::axioms::preferences_equal;
use proxy_belief::identify::{
    check_linear_independence, estimate, identify, recover_utility_family, rescale_representation, solve_prior,
    IdentifyError, Verdict,
};
use proxy_belief::model::{
    condition_on_event, expected_utility, joint_from, marginals_and_conditionals, ConditionalFamily, Dist, Event,
    SEURep,
};
use proxy_belief::sample::{random_act, random_joint, random_simplex, random_utility, seeded_rng};
use proxy_belief::simplex::simplex_least_squares;
use proxy_belief::ProxyProblem;

#[test]
fn simplex_solver_matches_support_enumeration() {
    let mut rng = seeded_rng(3, 0);
    for _ in 0..2000 {
        let k = rng.random_range(1..=5);
        let n = rng.random_range(1..=6);
        let rows: Vec<Vec<f64>> = (0..k).map(|_| random_simplex(&mut rng, n)).collect();
        // half the targets inside the hull, half anywhere on the simplex
        let target = if rng.random_bool(0.5) {
            let w = random_simplex(&mut rng, k);
            (0..n).map(|t| rows.iter().zip(&w).map(|(r, w)| w * r[t]).sum()).collect()
        } else {
            random_simplex(&mut rng, n)
        };
        let fit = simplex_least_squares(&rows, &target);
        let (_, oracle) = brute_force_simplex_ls(&rows, &target);
        assert!((fit.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(fit.weights.iter().all(|&w| w >= 0.0));
        assert!(
            fit.residual <= oracle + 1e-10,
            "solver residual {} vs oracle {oracle}",
            fit.residual
        );
    }
}

#[test]
fn rank_gate_agrees_with_elimination() {
    let mut rng = seeded_rng(4, 0);
    for _ in 0..300 {
        let k = rng.random_range(1..=5);
        let n = rng.random_range(1..=6);
        let mut rows: Vec<Vec<f64>> = (0..k).map(|_| random_simplex(&mut rng, n)).collect();
        if k >= 3 && rng.random_bool(0.3) {
            // a mixture of two rows keeps the family on the simplex but drops rank
            let w = rng.random::<f64>();
            rows[2] = rows[0].iter().zip(&rows[1]).map(|(a, b)| w * a + (1.0 - w) * b).collect();
        }
        let family = ConditionalFamily::from_rows(rows.clone()).unwrap();
        let check = check_linear_independence(&family);
        assert_eq!(check.independent, gauss_rank(&rows, 1e-9) == k, "rows {rows:?}");
    }
}

#[test]
fn drug_trial_problem_end_to_end() {
    let family = ConditionalFamily::from_rows(vec![vec![0.8, 0.2], vec![0.4, 0.6]]).unwrap();
    let objective = Dist::with_prefix("t", vec![0.5, 0.5]).unwrap();
    let problem = ProxyProblem::new(family, objective, Event::new(vec![1], 2).unwrap()).unwrap();
    let r = identify(&problem).unwrap();
    assert!(r.pi_s.max_abs_diff(&[0.25, 0.75]) < 1e-12);
    assert!(r.mu.max_abs_diff(&[0.10, 0.90]) < 1e-12);
    let expected = [0.20, 0.05, 0.30, 0.45];
    assert!(max_abs_diff(r.joint.cells(), &expected) < 1e-12);
    assert!(r.residual < 1e-12);
}

#[test]
fn outside_hull_and_boundary_are_distinguished() {
    let family = ConditionalFamily::from_rows(vec![vec![0.8, 0.2], vec![0.4, 0.6]]).unwrap();
    let event = Event::new(vec![0], 2).unwrap();
    let outside = Dist::with_prefix("t", vec![0.9, 0.1]).unwrap();
    let p = ProxyProblem::new(family.clone(), outside, event.clone()).unwrap();
    assert!(matches!(identify(&p), Err(IdentifyError::Infeasible { .. })));
    assert_eq!(estimate(&p).verdict, Verdict::Infeasible);
    let boundary = Dist::with_prefix("t", vec![0.8, 0.2]).unwrap();
    let p = ProxyProblem::new(family, boundary, event).unwrap();
    assert!(matches!(identify(&p), Err(IdentifyError::NotFullSupport { state: 1, .. })));
    assert_eq!(estimate(&p).verdict, Verdict::NotFullSupport);
}

#[test]
fn estimate_equals_identify_on_exact_data() {
    let mut rng = seeded_rng(5, 0);
    for _ in 0..100 {
        let k = rng.random_range(2..=4);
        let n = rng.random_range(k..=5);
        let joint = identifiable_joint(&mut rng, k, n);
        let problem = problem_from(&joint, random_event(&mut rng, n));
        let exact = identify(&problem).unwrap();
        let est = estimate(&problem);
        assert_eq!(est.verdict, Verdict::Ok);
        assert!(exact.mu.max_abs_diff(&est.mu) < 1e-12);
    }
}

#[test]
fn sensitivity_grows_with_condition_number() {
    // row noise: each row moves a fixed fraction toward a random simplex point
    let mut rng = seeded_rng(6, 0);
    let (mut low, mut high) = (Vec::new(), Vec::new());
    let eps = 0.02;
    while low.len() < 60 || high.len() < 60 {
        let joint = if rng.random_bool(0.5) {
            random_joint(&mut rng, 2, 3).unwrap()
        } else {
            // nearly collinear rows
            let base = random_simplex(&mut rng, 3);
            let jitter = random_simplex(&mut rng, 3);
            let w = rng.random_range(1e-3..2e-2);
            let second: Vec<f64> = base.iter().zip(&jitter).map(|(b, j)| (1.0 - w) * b + w * j).collect();
            let prior = random_simplex(&mut rng, 2);
            let table = vec![
                base.iter().map(|x| prior[0] * x).collect(),
                second.iter().map(|x| prior[1] * x).collect(),
            ];
            proxy_belief::JointBelief::from_rows(table).unwrap()
        };
        let event = random_event(&mut rng, 3);
        let truth = condition_on_event(&joint, &event).unwrap();
        let (_, pi_t, family) = marginals_and_conditionals(&joint).unwrap();
        let cond = check_linear_independence(&family).condition_number;
        let noisy: Vec<Vec<f64>> = family
            .rows()
            .iter()
            .map(|row| {
                let d = random_simplex(&mut rng, 3);
                row.iter().zip(&d).map(|(r, d)| (1.0 - eps) * r + eps * d).collect()
            })
            .collect();
        let noisy = ConditionalFamily::from_rows(noisy).unwrap();
        let est = estimate(&ProxyProblem::new(noisy, pi_t, event).unwrap());
        let err = truth.max_abs_diff(&est.mu);
        if cond < 10.0 && low.len() < 60 {
            low.push(err);
        } else if cond > 100.0 && high.len() < 60 {
            high.push(err);
        }
    }
    let median = |mut v: Vec<f64>| {
        v.sort_by(f64::total_cmp);
        v[v.len() / 2]
    };
    assert!(median(high) > median(low));
}

fn instance_seed() -> impl Strategy<Value = (u64, usize, usize)> {
    (any::<u64>(), 2usize..=6).prop_flat_map(|(seed, k)| (Just(seed), Just(k), k..=6usize))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn round_trip_recovers_conditional_belief((seed, k, n) in instance_seed()) {
        let mut rng = seeded_rng(seed, 0);
        let joint = identifiable_joint(&mut rng, k, n);
        let event = random_event(&mut rng, n);
        let truth = condition_on_event(&joint, &event).unwrap();
        let r = identify(&problem_from(&joint, event)).unwrap();
        prop_assert!(truth.max_abs_diff(r.mu.probs()) <= 1e-9);
        prop_assert!(max_abs_diff(r.joint.cells(), joint.cells()) <= 1e-9);
    }

    #[test]
    fn more_states_than_proxies_is_rank_deficient(seed in any::<u64>(), n in 1usize..=5, extra in 1usize..=3) {
        let mut rng = seeded_rng(seed, 0);
        let joint = random_joint(&mut rng, n + extra, n).unwrap();
        let problem = problem_from(&joint, Event::all(n).unwrap());
        let rank = check_linear_independence(problem.family());
        prop_assert!(!rank.independent);
        prop_assert!(rank.condition_number.is_infinite());
        let is_rank_deficient = matches!(identify(&problem), Err(IdentifyError::RankDeficient { .. }));
        prop_assert!(is_rank_deficient);
    }

    #[test]
    fn chain_rule_round_trip(seed in any::<u64>(), k in 1usize..=6, n in 1usize..=6) {
        let mut rng = seeded_rng(seed, 0);
        let joint = random_joint(&mut rng, k, n).unwrap();
        let (pi_s, _, family) = marginals_and_conditionals(&joint).unwrap();
        let back = joint_from(&pi_s, &family).unwrap();
        prop_assert!(max_abs_diff(back.cells(), joint.cells()) <= 1e-12);
        let all = condition_on_event(&joint, &Event::all(n).unwrap()).unwrap();
        prop_assert_eq!(all.probs(), pi_s.probs());
    }

    #[test]
    fn prior_solution_reproduces_objective((seed, k, n) in instance_seed()) {
        let mut rng = seeded_rng(seed, 0);
        let joint = identifiable_joint(&mut rng, k, n);
        let (pi_s, pi_t, family) = marginals_and_conditionals(&joint).unwrap();
        let sol = solve_prior(&family, &pi_t).unwrap();
        prop_assert!(pi_s.max_abs_diff(sol.pi_s.probs()) <= 1e-9);
        prop_assert!(residual_of(family.rows(), pi_t.probs(), sol.pi_s.probs()) <= 1e-9);
    }

    #[test]
    fn eu_is_linear_in_mixtures(seed in any::<u64>(), k in 1usize..=4, n in 1usize..=4, m in 2usize..=4, w in 0.0f64..=1.0) {
        let mut rng = seeded_rng(seed, 0);
        let rep = SEURep::new(random_utility(&mut rng, k, n, m), random_joint(&mut rng, k, n).unwrap()).unwrap();
        let f = random_act(&mut rng, k, n, m);
        let g = random_act(&mut rng, k, n, m);
        let mixed = expected_utility(&rep, &f.mix(&g, w).unwrap()).unwrap();
        let split = w * expected_utility(&rep, &f).unwrap() + (1.0 - w) * expected_utility(&rep, &g).unwrap();
        prop_assert!((mixed - split).abs() <= 1e-12);
    }

    #[test]
    fn rescaling_is_observationally_equivalent(seed in any::<u64>(), k in 1usize..=5, m in 2usize..=4) {
        let mut rng = seeded_rng(seed, 0);
        let (utility, belief, rep) = random_state_rep(&mut rng, k, m);
        let target = random_dist(&mut rng, "s", k);
        let (rescaled, target) = rescale_representation(&utility, &belief, &target).unwrap();
        let other = SEURep::over_states(&rescaled, &target).unwrap();
        // EU is preserved act by act, not just in sign
        for _ in 0..50 {
            let f = random_act(&mut rng, k, 1, m);
            let diff = expected_utility(&rep, &f).unwrap() - expected_utility(&other, &f).unwrap();
            prop_assert!(diff.abs() <= 1e-10);
        }
        prop_assert!(preferences_equal(&rep, &other, 200, seed).unwrap());
    }

    #[test]
    fn utility_family_members_are_equivalent(seed in any::<u64>(), k in 1usize..=5, m in 2usize..=4) {
        let mut rng = seeded_rng(seed, 0);
        let (utility, belief, rep) = random_state_rep(&mut rng, k, m);
        let mu = random_dist(&mut rng, "s", k);
        let family = recover_utility_family(&belief, &utility, &mu).unwrap();
        let alpha: Vec<f64> = (0..k).map(|_| rng.random_range(-5.0..5.0)).collect();
        let beta = rng.random_range(0.1..10.0);
        let member = SEURep::over_states(&family.member(&alpha, beta).unwrap(), &mu).unwrap();
        prop_assert!(preferences_equal(&rep, &member, 200, seed).unwrap());
    }
}
