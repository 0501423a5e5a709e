//! Least squares over the probability simplex, and Euclidean projection onto it.
//!
//! The solver minimizes `‖Σ_k λ_k·row_k − target‖₂` subject to `λ ≥ 0`,
//! `Σ λ = 1` with a primal active-set method. Each subproblem eliminates the
//! sum constraint and is solved by SVD least squares, so the normal equations
//! are never formed. Rank-deficient row sets are tolerated: the SVD returns
//! the minimum-norm step from the current point.

use faer::Mat;

/// Result of [`simplex_least_squares`].
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexFit {
    pub weights: Vec<f64>,
    /// `‖Σ_k λ_k·row_k − target‖₂` at the returned weights.
    pub residual: f64,
}

const FEAS_TOL: f64 = 1e-15;
const MULTIPLIER_TOL: f64 = 1e-12;

fn mix(rows: &[Vec<f64>], weights: &[f64]) -> Vec<f64> {
    let n = rows.first().map_or(0, Vec::len);
    let mut out = vec![0.0; n];
    for (row, &w) in rows.iter().zip(weights) {
        for (o, r) in out.iter_mut().zip(row) {
            *o += w * r;
        }
    }
    out
}

fn residual_vector(rows: &[Vec<f64>], weights: &[f64], target: &[f64]) -> Vec<f64> {
    mix(rows, weights)
        .into_iter()
        .zip(target)
        .map(|(a, b)| a - b)
        .collect()
}

/// Minimizer over the face spanned by `free`, ignoring sign constraints.
///
/// On a rank-deficient face the minimizer closest to `current` is returned,
/// so directions the objective cannot see are left alone.
fn solve_on_face(rows: &[Vec<f64>], target: &[f64], free: &[usize], current: &[f64]) -> Vec<f64> {
    let k = rows.len();
    let mut z = vec![0.0; k];
    let (&last, rest) = free.split_last().expect("face is nonempty");
    if rest.is_empty() {
        z[last] = 1.0;
        return z;
    }
    let n = target.len();
    // λ_last = 1 − Σ y_j, λ_{rest_j} = y_j
    let m = Mat::from_fn(n, rest.len(), |t, j| rows[rest[j]][t] - rows[last][t]);
    let y0: Vec<f64> = rest.iter().map(|&i| current[i]).collect();
    let rhs: Vec<f64> = (0..n)
        .map(|t| target[t] - rows[last][t] - (0..rest.len()).map(|j| m[(t, j)] * y0[j]).sum::<f64>())
        .collect();
    let step = pinv_solve(&m, &rhs);
    let y: Vec<f64> = y0.iter().zip(&step).map(|(a, b)| a + b).collect();
    let mut sum = 0.0;
    for (j, &i) in rest.iter().enumerate() {
        z[i] = y[j];
        sum += y[j];
    }
    z[last] = 1.0 - sum;
    z
}

/// Minimum-norm least-squares solution of `m·x = rhs` through a thin SVD,
/// dropping singular values below `1e-13·σ_max`.
fn pinv_solve(m: &Mat<f64>, rhs: &[f64]) -> Vec<f64> {
    let cols = m.ncols();
    let Ok(svd) = m.thin_svd() else {
        return vec![0.0; cols];
    };
    let (u, sv, v) = (svd.U(), svd.S().column_vector(), svd.V());
    let cutoff = (0..sv.nrows()).map(|i| sv[i]).fold(0.0, f64::max) * 1e-13;
    let mut x = vec![0.0; cols];
    for i in 0..sv.nrows() {
        if sv[i] <= cutoff {
            continue;
        }
        let coef = (0..rhs.len()).map(|t| u[(t, i)] * rhs[t]).sum::<f64>() / sv[i];
        for (j, xj) in x.iter_mut().enumerate() {
            *xj += coef * v[(j, i)];
        }
    }
    x
}

/// Simplex-constrained least squares; `rows` are the mixture components.
pub fn simplex_least_squares(rows: &[Vec<f64>], target: &[f64]) -> SimplexFit {
    let k = rows.len();
    assert!(k > 0, "at least one component is required");
    let mut weights = vec![1.0 / k as f64; k];
    let mut free = vec![true; k];

    for _ in 0..(20 * k + 50) {
        let face: Vec<usize> = (0..k).filter(|&i| free[i]).collect();
        let z = solve_on_face(rows, target, &face, &weights);

        if face.iter().all(|&i| z[i] >= -FEAS_TOL) {
            weights = z.iter().map(|w| w.max(0.0)).collect();
            // KKT: g_i + ν = 0 on the face, g_i + ν ≥ 0 off it
            let r = residual_vector(rows, &weights, target);
            let grad: Vec<f64> = rows
                .iter()
                .map(|row| row.iter().zip(&r).map(|(a, b)| a * b).sum())
                .collect();
            let nu = -face.iter().map(|&i| grad[i]).sum::<f64>() / face.len() as f64;
            let entering = (0..k)
                .filter(|&i| !free[i])
                .map(|i| (i, grad[i] + nu))
                .filter(|&(_, m)| m < -MULTIPLIER_TOL)
                .min_by(|a, b| a.1.total_cmp(&b.1));
            match entering {
                Some((i, _)) => free[i] = true,
                None => break,
            }
        } else {
            let (blocking, step) = face
                .iter()
                .filter(|&&i| z[i] < -FEAS_TOL)
                .map(|&i| (i, weights[i] / (weights[i] - z[i])))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("an infeasible coordinate exists");
            for &i in &face {
                weights[i] += step * (z[i] - weights[i]);
                if weights[i] <= FEAS_TOL {
                    weights[i] = 0.0;
                    free[i] = false;
                }
            }
            weights[blocking] = 0.0;
            free[blocking] = false;
        }
    }

    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    let residual = residual_vector(rows, &weights, target)
        .iter()
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt();
    SimplexFit { weights, residual }
}

/// Euclidean projection of `v` onto the probability simplex.
pub fn project_to_simplex(v: &[f64]) -> Vec<f64> {
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (i, &u) in sorted.iter().enumerate() {
        cumsum += u;
        let candidate = (cumsum - 1.0) / (i + 1) as f64;
        if u - candidate > 0.0 {
            theta = candidate;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}
