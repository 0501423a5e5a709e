//! Identification of the actual belief from proxy data, and recovery of the
//! class of actual utility functions once the belief is known.
//!
//! The pipeline is: rank test on the conditional rows `Π`, simplex-constrained
//! solve of `λᵀΠ = π_T^obj` for the prior on `S`, chain rule to get the
//! joint, and conditioning on the uninformative event.

use faer::Mat;
use thiserror::Error;

use crate::model::{
    condition_on_event, joint_from, ConditionalFamily, Dist, Event, JointBelief, ModelError, EPS_PROB,
};
use crate::simplex::simplex_least_squares;

/// Rows are independent iff `σ_K > RANK_TOL · σ_1`.
pub const RANK_TOL: f64 = 1e-8;
/// Largest accepted residual `‖λᵀΠ − π_T^obj‖₂`.
pub const RES_TOL: f64 = 1e-7;
/// Smallest accepted weight in the recovered prior.
pub const POS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IdentifyError {
    #[error("conditional rows are linearly dependent (P3 fails), condition number {condition_number}")]
    RankDeficient { condition_number: f64 },
    #[error("objective marginal is outside the convex hull of the conditional rows (residual {residual})")]
    Infeasible { residual: f64 },
    #[error("recovered prior puts weight {weight} on state {state}, violating full support")]
    NotFullSupport { state: usize, weight: f64 },
    #[error("belief of state {state} is not positive")]
    ZeroBelief { state: usize },
    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error(transparent)]
    Model(#[from] ModelError),
}

type Result<T> = std::result::Result<T, IdentifyError>;

#[derive(Debug, Clone, PartialEq)]
pub struct RankCheck {
    pub independent: bool,
    /// `σ_1 / σ_K`; infinite when `K > N` or `σ_K = 0`.
    pub condition_number: f64,
    pub singular_values: Vec<f64>,
}

/// Rank test on the `K × N` conditional matrix via its singular values.
pub fn check_linear_independence(family: &ConditionalFamily) -> RankCheck {
    let (k, n) = (family.k(), family.n());
    let m = Mat::from_fn(k, n, |i, j| family.row(i)[j]);
    let mut sv = m.singular_values().unwrap_or_default();
    sv.sort_by(|a, b| b.total_cmp(a));
    let largest = sv.first().copied().unwrap_or(0.0);
    let smallest = if k > n { 0.0 } else { sv[k - 1] };
    let independent = largest > 0.0 && smallest > RANK_TOL * largest;
    let condition_number = if smallest > 0.0 {
        largest / smallest
    } else {
        f64::INFINITY
    };
    RankCheck {
        independent,
        condition_number,
        singular_values: sv,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PriorSolution {
    pub pi_s: Dist,
    pub residual: f64,
}

fn check_objective(family: &ConditionalFamily, objective: &Dist) -> Result<()> {
    if objective.len() != family.n() {
        return Err(IdentifyError::DimensionMismatch {
            what: "objective marginal",
            expected: family.n(),
            found: objective.len(),
        });
    }
    Ok(())
}

/// Solves `Σ_k λ_k π_T(·|s_k) = π_T^obj` over the simplex.
pub fn solve_prior(family: &ConditionalFamily, objective: &Dist) -> Result<PriorSolution> {
    check_objective(family, objective)?;
    let rank = check_linear_independence(family);
    if !rank.independent {
        return Err(IdentifyError::RankDeficient {
            condition_number: rank.condition_number,
        });
    }
    let fit = simplex_least_squares(family.rows(), objective.probs());
    if fit.residual > RES_TOL {
        return Err(IdentifyError::Infeasible {
            residual: fit.residual,
        });
    }
    if let Some((state, &weight)) = fit.weights.iter().enumerate().find(|(_, &w)| w < POS_TOL) {
        return Err(IdentifyError::NotFullSupport { state, weight });
    }
    Ok(PriorSolution {
        pi_s: Dist::new(family.s_labels().to_vec(), fit.weights)?,
        residual: fit.residual,
    })
}

/// Inputs of the identification problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ProxyProblem {
    family: ConditionalFamily,
    objective: Dist,
    event: Event,
}

impl ProxyProblem {
    pub fn new(family: ConditionalFamily, objective: Dist, event: Event) -> Result<Self> {
        check_objective(&family, &objective)?;
        if let Some(&t) = event.members().last() {
            if t >= family.n() {
                return Err(ModelError::UnknownLabel(format!("#{t}")).into());
            }
        }
        Ok(Self {
            family,
            objective,
            event,
        })
    }

    pub fn family(&self) -> &ConditionalFamily {
        &self.family
    }

    pub fn objective(&self) -> &Dist {
        &self.objective
    }

    pub fn event(&self) -> &Event {
        &self.event
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentificationResult {
    /// Recovered prior on `S`.
    pub pi_s: Dist,
    pub joint: JointBelief,
    /// Actual belief `π_S(·|E)`.
    pub mu: Dist,
    pub residual: f64,
    pub condition_number: f64,
}

pub fn identify(problem: &ProxyProblem) -> Result<IdentificationResult> {
    let rank = check_linear_independence(&problem.family);
    let prior = solve_prior(&problem.family, &problem.objective)?;
    let joint = joint_from(&prior.pi_s, &problem.family)?;
    let mu = condition_on_event(&joint, &problem.event)?;
    Ok(IdentificationResult {
        pi_s: prior.pi_s,
        joint,
        mu,
        residual: prior.residual,
        condition_number: rank.condition_number,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Ok,
    RankDeficient,
    Infeasible,
    NotFullSupport,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Ok => "ok",
            Verdict::RankDeficient => "rank_deficient",
            Verdict::Infeasible => "infeasible",
            Verdict::NotFullSupport => "not_full_support",
        }
    }
}

/// Best-fit point estimate that never fails; used for noisy inputs where
/// the residual gate in [`identify`] would reject the data.
#[derive(Debug, Clone, PartialEq)]
pub struct Estimate {
    pub prior: Vec<f64>,
    /// `π_S(·|E)` under the best-fit prior; NaN when `E` gets no mass.
    pub mu: Vec<f64>,
    pub residual: f64,
    pub condition_number: f64,
    pub verdict: Verdict,
}

pub fn estimate(problem: &ProxyProblem) -> Estimate {
    let family = &problem.family;
    let rank = check_linear_independence(family);
    let fit = simplex_least_squares(family.rows(), problem.objective.probs());
    let mass: Vec<f64> = fit
        .weights
        .iter()
        .zip(family.rows())
        .map(|(w, row)| w * problem.event.members().iter().map(|&t| row[t]).sum::<f64>())
        .collect();
    let total: f64 = mass.iter().sum();
    let mu = mass
        .iter()
        .map(|m| if total > 0.0 { m / total } else { f64::NAN })
        .collect();
    let verdict = if !rank.independent {
        Verdict::RankDeficient
    } else if fit.residual > RES_TOL {
        Verdict::Infeasible
    } else if fit.weights.iter().any(|&w| w < POS_TOL) {
        Verdict::NotFullSupport
    } else {
        Verdict::Ok
    };
    Estimate {
        prior: fit.weights,
        mu,
        residual: fit.residual,
        condition_number: rank.condition_number,
        verdict,
    }
}

fn ratio(num: &Dist, den: &Dist) -> Result<Vec<f64>> {
    if num.len() != den.len() {
        return Err(IdentifyError::DimensionMismatch {
            what: "beliefs over S",
            expected: den.len(),
            found: num.len(),
        });
    }
    for (state, (&a, &b)) in num.probs().iter().zip(den.probs()).enumerate() {
        if a <= EPS_PROB || b <= EPS_PROB {
            return Err(IdentifyError::ZeroBelief { state });
        }
    }
    Ok(num.probs().iter().zip(den.probs()).map(|(a, b)| a / b).collect())
}

/// `w(s) = μ̄(s)/μ(s)`: utility of state `s` relative to a state-independent
/// representation with belief `μ̄`.
pub fn state_weights(si_belief: &Dist, mu: &Dist) -> Result<Vec<f64>> {
    ratio(si_belief, mu)
}

/// The class `u_s = α_s + β·(μ̃(s)/μ(s))·ũ_s`, `α_s ∈ ℝ`, `β > 0`, of utilities
/// that pair with the actual belief `μ`.
#[derive(Debug, Clone, PartialEq)]
pub struct UtilityFamily {
    /// `ũ` as per-state vNM vectors over prizes.
    pub base: Vec<Vec<f64>>,
    pub scale_per_state: Vec<f64>,
}

impl UtilityFamily {
    /// Member with additive shifts `alpha` and common scale `beta`.
    pub fn member(&self, alpha: &[f64], beta: f64) -> Result<Vec<Vec<f64>>> {
        if alpha.len() != self.base.len() {
            return Err(IdentifyError::DimensionMismatch {
                what: "additive shifts",
                expected: self.base.len(),
                found: alpha.len(),
            });
        }
        assert!(beta > 0.0, "family scale must be positive");
        Ok(self
            .base
            .iter()
            .zip(&self.scale_per_state)
            .zip(alpha)
            .map(|((v, c), a)| v.iter().map(|x| a + beta * c * x).collect())
            .collect())
    }

    /// Ratio of marginal utilities of states `a` and `b` for a member, when
    /// the base utility is the same function in both states.
    pub fn relative_slope(&self, a: usize, b: usize) -> f64 {
        self.scale_per_state[a] / self.scale_per_state[b]
    }
}

pub fn recover_utility_family(rep_belief: &Dist, rep_utility: &[Vec<f64>], mu: &Dist) -> Result<UtilityFamily> {
    if rep_utility.len() != rep_belief.len() {
        return Err(IdentifyError::DimensionMismatch {
            what: "utility states",
            expected: rep_belief.len(),
            found: rep_utility.len(),
        });
    }
    Ok(UtilityFamily {
        base: rep_utility.to_vec(),
        scale_per_state: ratio(rep_belief, mu)?,
    })
}

/// `ũ_s = (μ(s)/μ̃(s))·u_s`, giving an observationally equivalent pair `(ũ, μ̃)`.
pub fn rescale_representation(
    utility: &[Vec<f64>],
    belief: &Dist,
    target: &Dist,
) -> Result<(Vec<Vec<f64>>, Dist)> {
    if utility.len() != belief.len() {
        return Err(IdentifyError::DimensionMismatch {
            what: "utility states",
            expected: belief.len(),
            found: utility.len(),
        });
    }
    let scale = ratio(belief, target)?;
    let rescaled = utility
        .iter()
        .zip(&scale)
        .map(|(v, c)| v.iter().map(|x| c * x).collect())
        .collect();
    Ok((rescaled, target.clone()))
}
