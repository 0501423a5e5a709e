//! Simulated strategy-method elicitation with a binarized quadratic scoring rule.
//!
//! For each state `s` the agent submits a report `r ∈ Δ(T)` before `s` is
//! revealed. If `(s, t)` realizes, the agent receives the `good` lottery with
//! probability `1 − L(r, t)/2` and the `bad` one otherwise, where `L` is the
//! quadratic loss. An agent whose prize gap `u_{s,t}(good) − u_{s,t}(bad)` does
//! not depend on `t` reports `π_T(·|s)` truthfully; a `t`-dependent gap tilts
//! the report toward cells where winning is worth more.

use thiserror::Error;

use crate::identify::{identify, IdentificationResult, IdentifyError, ProxyProblem};
use crate::model::{ConditionalFamily, Dist, Event, JointBelief, Lottery, ModelError, SEURep};
use crate::simplex::project_to_simplex;

const GAP_TOL: f64 = 1e-12;
const STEP: f64 = 0.1;
const MAX_ITERS: usize = 10_000;
const CONVERGENCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ElicitError {
    #[error("prizes are not strictly ranked at ({state}, {proxy}), gap {gap}")]
    DegeneratePrizes { state: usize, proxy: usize, gap: f64 },
    #[error("unknown proxy cell {0}")]
    UnknownLabel(String),
    #[error("state {0} is out of range")]
    UnknownState(usize),
    #[error("tasks must cover every state exactly once; state {0} is missing or repeated")]
    TaskCoverage(usize),
    #[error(transparent)]
    Identify(#[from] IdentifyError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

type Result<T> = std::result::Result<T, ElicitError>;

/// Synthetic SEU agent; its belief is the ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct SimAgent {
    rep: SEURep,
}

impl SimAgent {
    pub fn new(rep: SEURep) -> Self {
        Self { rep }
    }

    pub fn rep(&self) -> &SEURep {
        &self.rep
    }

    pub fn truth(&self) -> &JointBelief {
        self.rep.belief()
    }
}

/// One state-conditional scoring task.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoringTask {
    pub state: usize,
    pub good: Lottery,
    pub bad: Lottery,
}

impl ScoringTask {
    pub fn new(state: usize, good: Lottery, bad: Lottery) -> Self {
        Self { state, good, bad }
    }

    /// Prize gaps `u_{s,t}(good) − u_{s,t}(bad)` for every `t`; all must be positive.
    pub fn gaps(&self, agent: &SimAgent) -> Result<Vec<f64>> {
        let rep = agent.rep();
        if self.state >= rep.k() {
            return Err(ElicitError::UnknownState(self.state));
        }
        if self.good.len() != rep.prizes() || self.bad.len() != rep.prizes() {
            return Err(ModelError::DimensionMismatch {
                what: "task prize count",
                expected: rep.prizes(),
                found: self.good.len(),
            }
            .into());
        }
        (0..rep.n())
            .map(|t| {
                let u = rep.utility();
                let gap = u.utility(self.state, t, &self.good) - u.utility(self.state, t, &self.bad);
                if gap > GAP_TOL {
                    Ok(gap)
                } else {
                    Err(ElicitError::DegeneratePrizes {
                        state: self.state,
                        proxy: t,
                        gap,
                    })
                }
            })
            .collect()
    }
}

/// Per state, the best and worst sure prizes under `v_{s,t₁}`.
pub fn default_tasks(agent: &SimAgent) -> Result<Vec<ScoringTask>> {
    let rep = agent.rep();
    let m = rep.prizes();
    (0..rep.k())
        .map(|s| {
            let v = rep.utility().vnm(s, 0);
            let best = (0..m).max_by(|&a, &b| v[a].total_cmp(&v[b])).unwrap_or(0);
            let worst = (0..m).min_by(|&a, &b| v[a].total_cmp(&v[b])).unwrap_or(0);
            if v[best] - v[worst] <= GAP_TOL {
                return Err(ElicitError::DegeneratePrizes {
                    state: s,
                    proxy: 0,
                    gap: v[best] - v[worst],
                });
            }
            Ok(ScoringTask::new(
                s,
                Lottery::degenerate(m, best)?,
                Lottery::degenerate(m, worst)?,
            ))
        })
        .collect()
}

/// An elicited estimate of `π_T(·|s)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Report(pub Dist);

impl Report {
    pub fn probs(&self) -> &[f64] {
        self.0.probs()
    }
}

fn quadratic_win_probability(r: &[f64], realized: usize) -> f64 {
    let loss: f64 = r
        .iter()
        .enumerate()
        .map(|(t, &p)| {
            let hit = if t == realized { 1.0 } else { 0.0 };
            (p - hit).powi(2)
        })
        .sum();
    1.0 - loss / 2.0
}

/// Probability of receiving the good lottery when `realized` occurs.
pub fn binarized_score(r: &Dist, realized: usize) -> Result<f64> {
    if realized >= r.len() {
        return Err(ElicitError::UnknownLabel(format!("#{realized}")));
    }
    Ok(quadratic_win_probability(r.probs(), realized))
}

pub fn binarized_score_by_label(r: &Dist, realized: &str) -> Result<f64> {
    let t = r
        .index_of(realized)
        .ok_or_else(|| ElicitError::UnknownLabel(realized.to_string()))?;
    binarized_score(r, t)
}

/// Agent's expected win value `Σ_t π_T(t|s)·gap_t·win(r, t)`, up to the
/// constant contributed by the bad lottery.
pub fn task_value(weights: &[f64], r: &[f64]) -> f64 {
    weights
        .iter()
        .enumerate()
        .map(|(t, w)| w * quadratic_win_probability(r, t))
        .sum()
}

/// Cell weights `π_T(t|s)·gap_t`, normalized to sum to one.
pub fn task_weights(agent: &SimAgent, task: &ScoringTask) -> Result<Vec<f64>> {
    let gaps = task.gaps(agent)?;
    let cond = agent.truth().conditional_row(task.state);
    let raw: Vec<f64> = cond.iter().zip(&gaps).map(|(p, g)| p * g).collect();
    let total: f64 = raw.iter().sum();
    Ok(raw.into_iter().map(|w| w / total).collect())
}

/// The report maximizing the agent's conditional expected utility given `s`.
///
/// Projected gradient ascent on the simplex from the uniform report, then an
/// exact solve on the face the iteration settled on.
pub fn best_response_report(agent: &SimAgent, task: &ScoringTask) -> Result<Report> {
    let weights = task_weights(agent, task)?;
    let n = weights.len();
    let mut r = vec![1.0 / n as f64; n];
    for _ in 0..MAX_ITERS {
        // ∂/∂r_j Σ_t w_t win(r,t) = Σ_t w_t (δ_tj − r_j)
        let mass: f64 = weights.iter().sum();
        let stepped: Vec<f64> = r
            .iter()
            .zip(&weights)
            .map(|(rj, wj)| rj + STEP * (wj - rj * mass))
            .collect();
        let next = project_to_simplex(&stepped);
        let delta = next
            .iter()
            .zip(&r)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        r = next;
        if delta < CONVERGENCE {
            break;
        }
    }
    // r lies on the face, so a feasible face optimum is never worse
    if let Some(exact) = polish_on_face(&weights, &r) {
        r = exact;
    }
    Ok(Report(Dist::new(agent.truth().t_labels().to_vec(), r)?))
}

/// Maximizer of the task value on the affine hull of the support of `r`.
///
/// The objective's Hessian is a multiple of the identity, so the face optimum
/// is the Euclidean projection of the weights onto that hull.
fn polish_on_face(weights: &[f64], r: &[f64]) -> Option<Vec<f64>> {
    let mass: f64 = weights.iter().sum();
    let support: Vec<usize> = (0..r.len()).filter(|&t| r[t] > 0.0).collect();
    let inside: f64 = support.iter().map(|&t| weights[t] / mass).sum();
    let shift = (1.0 - inside) / support.len() as f64;
    let mut out = vec![0.0; r.len()];
    for &t in &support {
        out[t] = weights[t] / mass + shift;
    }
    out.iter().all(|&x| x >= 0.0).then_some(out)
}

fn check_coverage(k: usize, tasks: &[ScoringTask]) -> Result<Vec<&ScoringTask>> {
    let mut slots: Vec<Option<&ScoringTask>> = vec![None; k];
    for task in tasks {
        let slot = slots
            .get_mut(task.state)
            .ok_or(ElicitError::UnknownState(task.state))?;
        if slot.is_some() {
            return Err(ElicitError::TaskCoverage(task.state));
        }
        *slot = Some(task);
    }
    slots
        .into_iter()
        .enumerate()
        .map(|(s, t)| t.ok_or(ElicitError::TaskCoverage(s)))
        .collect()
}

/// One best-response report per state, stacked into `Π̂`.
pub fn run_strategy_method(agent: &SimAgent, tasks: &[ScoringTask]) -> Result<ConditionalFamily> {
    let ordered = check_coverage(agent.rep().k(), tasks)?;
    let rows = ordered
        .into_iter()
        .map(|task| best_response_report(agent, task).map(|r| r.probs().to_vec()))
        .collect::<Result<Vec<_>>>()?;
    let truth = agent.truth();
    Ok(ConditionalFamily::new(
        truth.s_labels().to_vec(),
        truth.t_labels().to_vec(),
        rows,
    )?)
}

/// Elicit with [`default_tasks`], then identify.
pub fn elicit_and_identify(agent: &SimAgent, objective: &Dist, event: &Event) -> Result<IdentificationResult> {
    let tasks = default_tasks(agent)?;
    elicit_and_identify_with(agent, &tasks, objective, event)
}

pub fn elicit_and_identify_with(
    agent: &SimAgent,
    tasks: &[ScoringTask],
    objective: &Dist,
    event: &Event,
) -> Result<IdentificationResult> {
    let family = run_strategy_method(agent, tasks)?;
    let problem = ProxyProblem::new(family, objective.clone(), event.clone())?;
    Ok(identify(&problem)?)
}

/// `‖best response − π_T(·|s)‖∞` for every state.
pub fn misreport_bias(agent: &SimAgent, tasks: &[ScoringTask]) -> Result<Vec<f64>> {
    let family = run_strategy_method(agent, tasks)?;
    let truth = agent.truth();
    Ok((0..truth.k())
        .map(|s| {
            family
                .row(s)
                .iter()
                .zip(truth.conditional_row(s))
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        })
        .collect())
}
