//! JSON file formats read and written by the command-line tool.

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use proxy_belief::model::{ConditionalFamily, Dist, Event, JointBelief, UtilityTensor};
use proxy_belief::{IdentificationResult, ProxyProblem, SEURep};

/// Inputs of the identification problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemFile {
    pub s_labels: Vec<String>,
    pub t_labels: Vec<String>,
    pub conditional_rows: Vec<Vec<f64>>,
    pub objective_marginal: Vec<f64>,
    pub uninformative_event: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground_truth_joint: Option<Vec<Vec<f64>>>,
}

impl ProblemFile {
    pub fn to_problem(&self) -> Result<ProxyProblem> {
        let family = ConditionalFamily::new(
            self.s_labels.clone(),
            self.t_labels.clone(),
            self.conditional_rows.clone(),
        )
        .context("conditional_rows")?;
        let objective =
            Dist::new(self.t_labels.clone(), self.objective_marginal.clone()).context("objective_marginal")?;
        let event = Event::from_labels(&self.t_labels, &self.uninformative_event).context("uninformative_event")?;
        Ok(ProxyProblem::new(family, objective, event)?)
    }

    pub fn ground_truth(&self) -> Result<Option<JointBelief>> {
        self.ground_truth_joint
            .as_ref()
            .map(|rows| {
                JointBelief::new(self.s_labels.clone(), self.t_labels.clone(), rows.clone())
                    .context("ground_truth_joint")
            })
            .transpose()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruthCheck {
    pub mu_err: f64,
    pub joint_err: f64,
}

/// Written by `identify`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentifyOutput {
    pub s_labels: Vec<String>,
    pub t_labels: Vec<String>,
    #[serde(rename = "pi_S")]
    pub pi_s: Vec<f64>,
    pub joint: Vec<Vec<f64>>,
    pub mu: Vec<f64>,
    pub residual: f64,
    pub condition_number: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ground_truth: Option<GroundTruthCheck>,
}

impl IdentifyOutput {
    pub fn from_result(r: &IdentificationResult) -> Self {
        Self {
            s_labels: r.joint.s_labels().to_vec(),
            t_labels: r.joint.t_labels().to_vec(),
            pi_s: r.pi_s.probs().to_vec(),
            joint: r.joint.rows(),
            mu: r.mu.probs().to_vec(),
            residual: r.residual,
            condition_number: r.condition_number,
            ground_truth: None,
        }
    }
}

/// A synthetic agent, or any SEU representation on `S × T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepFile {
    pub s_labels: Vec<String>,
    pub t_labels: Vec<String>,
    pub prizes: Vec<String>,
    /// `utility[s][t][x]`
    pub utility: Vec<Vec<Vec<f64>>>,
    /// `joint[s][t]`
    pub joint: Vec<Vec<f64>>,
}

impl RepFile {
    pub fn to_rep(&self) -> Result<SEURep> {
        let utility = UtilityTensor::from_nested(&self.utility).context("utility")?;
        if utility.prizes() != self.prizes.len() {
            bail!(
                "utility has {} prizes but {} prize labels were given",
                utility.prizes(),
                self.prizes.len()
            );
        }
        let joint = JointBelief::new(self.s_labels.clone(), self.t_labels.clone(), self.joint.clone())
            .context("joint")?;
        Ok(SEURep::new(utility, joint)?)
    }
}

/// Monte Carlo sweep settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub trials: usize,
    pub noise_scale: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_k_min")]
    pub k_min: usize,
    #[serde(default = "default_k_max")]
    pub k_max: usize,
    #[serde(default = "default_n_min")]
    pub n_min: usize,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
}

fn default_k_min() -> usize {
    2
}
fn default_k_max() -> usize {
    3
}
fn default_n_min() -> usize {
    3
}
fn default_n_max() -> usize {
    5
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            bail!("trials must be at least 1");
        }
        if !self.noise_scale.is_finite() || self.noise_scale < 0.0 {
            bail!("noise_scale must be a finite non-negative number");
        }
        if self.k_min == 0 || self.k_min > self.k_max {
            bail!("need 1 <= k_min <= k_max");
        }
        if self.n_min == 0 || self.n_min > self.n_max {
            bail!("need 1 <= n_min <= n_max");
        }
        Ok(())
    }
}

/// Parses `0.5,0.5` style lists.
pub fn parse_numbers(list: &str) -> Result<Vec<f64>> {
    list.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .with_context(|| format!("`{x}` is not a number"))
        })
        .collect()
}

pub fn parse_labels(list: &str) -> Vec<String> {
    list.split(',')
        .map(|x| x.trim().to_string())
        .filter(|x| !x.is_empty())
        .collect()
}
