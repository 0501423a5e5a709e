//! Independent oracles and instance builders shared by the integration tests.
#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use proxy_belief::axioms::DominanceFrame;
use proxy_belief::elicit::{ScoringTask, SimAgent};
use proxy_belief::identify::check_linear_independence;
use proxy_belief::model::{
    marginals_and_conditionals, Dist, Event, JointBelief, Lottery, SEURep, UtilityTensor,
};
use proxy_belief::sample::{random_joint, random_lottery, random_simplex, random_state_utility};
use proxy_belief::ProxyProblem;

/// Solves `a·x = b` by Gaussian elimination with partial pivoting; `None`
/// when a pivot falls below `tol`.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>, tol: f64) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < tol {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for c in col..n {
                a[row][c] -= f * a[col][c];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let tail: f64 = (row + 1..n).map(|c| a[row][c] * x[c]).sum();
        x[row] = (b[row] - tail) / a[row][row];
    }
    Some(x)
}

/// Row rank by elimination with a relative pivot threshold.
pub fn gauss_rank(rows: &[Vec<f64>], rel_tol: f64) -> usize {
    let mut a: Vec<Vec<f64>> = rows.to_vec();
    let scale = a.iter().flatten().fold(0.0_f64, |m, x| m.max(x.abs())).max(1e-300);
    let (k, n) = (a.len(), a.first().map_or(0, Vec::len));
    let mut rank = 0;
    for col in 0..n {
        if rank == k {
            break;
        }
        let pivot = (rank..k)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[pivot][col].abs() <= rel_tol * scale {
            continue;
        }
        a.swap(rank, pivot);
        for row in rank + 1..k {
            let f = a[row][col] / a[rank][col];
            for c in col..n {
                a[row][c] -= f * a[rank][c];
            }
        }
        rank += 1;
    }
    rank
}

/// Simplex-constrained least squares by enumerating every support set and
/// solving its equality-constrained KKT system.
pub fn brute_force_simplex_ls(rows: &[Vec<f64>], target: &[f64]) -> (Vec<f64>, f64) {
    let k = rows.len();
    let mut best = (vec![0.0; k], f64::INFINITY);
    for mask in 1u32..(1 << k) {
        let support: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).collect();
        let p = support.len();
        // [G 1; 1ᵀ 0][λ; ν] = [A b; 1] with G = A Aᵀ
        let mut a = vec![vec![0.0; p + 1]; p + 1];
        let mut b = vec![0.0; p + 1];
        for (i, &si) in support.iter().enumerate() {
            for (j, &sj) in support.iter().enumerate() {
                a[i][j] = rows[si].iter().zip(&rows[sj]).map(|(x, y)| x * y).sum();
            }
            a[i][p] = 1.0;
            a[p][i] = 1.0;
            b[i] = rows[si].iter().zip(target).map(|(x, y)| x * y).sum();
        }
        b[p] = 1.0;
        let Some(sol) = gauss_solve(a, b, 1e-14) else {
            continue;
        };
        if sol[..p].iter().any(|&w| w < -1e-12) {
            continue;
        }
        let mut weights = vec![0.0; k];
        for (i, &s) in support.iter().enumerate() {
            weights[s] = sol[i].max(0.0);
        }
        let residual = residual_of(rows, target, &weights);
        if residual < best.1 {
            best = (weights, residual);
        }
    }
    best
}

pub fn residual_of(rows: &[Vec<f64>], target: &[f64], weights: &[f64]) -> f64 {
    (0..target.len())
        .map(|t| {
            let fit: f64 = rows.iter().zip(weights).map(|(r, w)| w * r[t]).sum();
            (fit - target[t]).powi(2)
        })
        .sum::<f64>()
        .sqrt()
}

/// A nonempty random subset of `0..n`.
pub fn random_event(rng: &mut ChaCha8Rng, n: usize) -> Event {
    loop {
        let members: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.5)).collect();
        if !members.is_empty() {
            return Event::new(members, n).unwrap();
        }
    }
}

/// Random full-support `k × n` joint whose conditional rows pass the rank gate.
pub fn identifiable_joint(rng: &mut ChaCha8Rng, k: usize, n: usize) -> JointBelief {
    loop {
        let joint = random_joint(rng, k, n).unwrap();
        let (_, _, family) = marginals_and_conditionals(&joint).unwrap();
        if check_linear_independence(&family).independent {
            return joint;
        }
    }
}

/// The identification problem extracted from a ground-truth joint.
pub fn problem_from(joint: &JointBelief, event: Event) -> ProxyProblem {
    let (_, pi_t, family) = marginals_and_conditionals(joint).unwrap();
    ProxyProblem::new(family, pi_t, event).unwrap()
}

pub fn random_dist(rng: &mut ChaCha8Rng, prefix: &str, n: usize) -> Dist {
    Dist::with_prefix(prefix, random_simplex(rng, n)).unwrap()
}

/// Representation over `S` alone, utility drawn per state.
pub fn random_state_rep(rng: &mut ChaCha8Rng, k: usize, m: usize) -> (Vec<Vec<f64>>, Dist, SEURep) {
    let utility = random_state_utility(rng, k, m);
    let belief = random_dist(rng, "s", k);
    let rep = SEURep::over_states(&utility, &belief).unwrap();
    (utility, belief, rep)
}

/// Conditionally state-independent representation on `S × T`.
pub fn random_csi_rep(rng: &mut ChaCha8Rng, k: usize, n: usize, m: usize) -> SEURep {
    let utility = UtilityTensor::s_measurable(&random_state_utility(rng, k, m), n).unwrap();
    SEURep::new(utility, random_joint(rng, k, n).unwrap()).unwrap()
}

/// A valid frame other than the canonical one: each canonical lottery is
/// pulled toward a random lottery by at most 40%.
pub fn random_frame(rng: &mut ChaCha8Rng, rep: &SEURep) -> DominanceFrame {
    let canonical = DominanceFrame::canonical(rep).unwrap();
    let m = rep.prizes();
    let high = (0..rep.k())
        .map(|s| canonical.high(s).mix(&random_lottery(rng, m), rng.random_range(0.6..1.0)))
        .collect();
    let low = (0..rep.k())
        .map(|s| canonical.low(s).mix(&random_lottery(rng, m), rng.random_range(0.6..1.0)))
        .collect();
    DominanceFrame::from_lotteries(rep, high, low).unwrap()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Agent's conditional expected utility given `task.state` for report `r`,
/// computed from the utility tensor directly.
pub fn conditional_value(agent: &SimAgent, task: &ScoringTask, r: &[f64]) -> f64 {
    let rep = agent.rep();
    let s = task.state;
    let cond = agent.truth().conditional_row(s);
    let sq: f64 = r.iter().map(|x| x * x).sum();
    (0..rep.n())
        .map(|t| {
            let win = 1.0 - (sq - 2.0 * r[t] + 1.0) / 2.0;
            let u = rep.utility();
            cond[t] * (win * u.utility(s, t, &task.good) + (1.0 - win) * u.utility(s, t, &task.bad))
        })
        .sum()
}

/// Exhaustive search over reports on the simplex grid with spacing `1/steps`
/// (`N ≤ 3`).
pub fn grid_best_report(agent: &SimAgent, task: &ScoringTask, steps: usize) -> Vec<f64> {
    let n = agent.rep().n();
    let h = 1.0 / steps as f64;
    let mut best = (f64::NEG_INFINITY, vec![]);
    let mut consider = |r: Vec<f64>| {
        let v = conditional_value(agent, task, &r);
        if v > best.0 {
            best = (v, r);
        }
    };
    match n {
        1 => consider(vec![1.0]),
        2 => (0..=steps).for_each(|i| consider(vec![i as f64 * h, 1.0 - i as f64 * h])),
        3 => {
            for i in 0..=steps {
                for j in 0..=steps - i {
                    let (a, b) = (i as f64 * h, j as f64 * h);
                    consider(vec![a, b, (1.0 - a - b).max(0.0)]);
                }
            }
        }
        _ => panic!("grid oracle supports at most three proxy values"),
    }
    best.1
}

/// A random S-measurable agent whose conditional rows are identifiable.
pub fn random_p0_agent(rng: &mut ChaCha8Rng, k: usize, n: usize, m: usize) -> SimAgent {
    let utility = UtilityTensor::s_measurable(&random_state_utility(rng, k, m), n).unwrap();
    SimAgent::new(SEURep::new(utility, identifiable_joint(rng, k, n)).unwrap())
}

/// Two-prize task paying prize 0 as the good outcome.
pub fn first_prize_task(state: usize) -> ScoringTask {
    ScoringTask::new(
        state,
        Lottery::degenerate(2, 0).unwrap(),
        Lottery::degenerate(2, 1).unwrap(),
    )
}

/// Two states, two proxies, truth row `(0.8, 0.2)` at `s₁`; the prize gap at
/// `(s₁, t₁)` is twice the gap at `(s₁, t₂)`.
pub fn doubled_gap_agent() -> SimAgent {
    let utility = UtilityTensor::from_nested(&[
        vec![vec![2.0, 0.0], vec![1.0, 0.0]],
        vec![vec![1.0, 0.0], vec![1.0, 0.0]],
    ])
    .unwrap();
    let joint = JointBelief::from_rows(vec![vec![0.4, 0.1], vec![0.2, 0.3]]).unwrap();
    SimAgent::new(SEURep::new(utility, joint).unwrap())
}
