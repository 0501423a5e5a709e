//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each exported function takes slider values and returns a JSON string.
//! The computations live in plain Rust functions so they are tested natively.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use proxy_belief::elicit::{best_response_report, ScoringTask, SimAgent};
use proxy_belief::identify::{check_linear_independence, recover_utility_family, state_weights};
use proxy_belief::model::{ConditionalFamily, Dist, Event, JointBelief, Lottery, SEURep, UtilityTensor};
use proxy_belief::{identify, IdentifyError, ProxyProblem};

#[derive(Debug, Serialize)]
pub struct IdentifyView {
    pub ok: bool,
    pub message: String,
    pub pi_s: Vec<f64>,
    pub joint: Vec<Vec<f64>>,
    pub mu: Vec<f64>,
    pub condition_number: f64,
}

/// Identification on a two-state, two-proxy problem.
///
/// `event`: 0 for `{t1}`, 1 for `{t2}`, anything else for `{t1, t2}`.
pub fn identify_two_by_two(p1: f64, p2: f64, objective_t1: f64, event: u32) -> IdentifyView {
    let failed = |message: String, condition_number: f64| IdentifyView {
        ok: false,
        message,
        pi_s: vec![],
        joint: vec![],
        mu: vec![],
        condition_number,
    };
    let family = match ConditionalFamily::from_rows(vec![vec![p1, 1.0 - p1], vec![p2, 1.0 - p2]]) {
        Ok(f) => f,
        Err(e) => return failed(e.to_string(), f64::NAN),
    };
    let cond = check_linear_independence(&family).condition_number;
    let members = match event {
        0 => vec![0],
        1 => vec![1],
        _ => vec![0, 1],
    };
    let problem = Dist::with_prefix("t", vec![objective_t1, 1.0 - objective_t1])
        .map_err(IdentifyError::from)
        .and_then(|obj| Ok(ProxyProblem::new(family, obj, Event::new(members, 2)?)?));
    let result = problem.and_then(|p| identify(&p));
    match result {
        Ok(r) => IdentifyView {
            ok: true,
            message: String::new(),
            pi_s: r.pi_s.probs().to_vec(),
            joint: r.joint.rows(),
            mu: r.mu.probs().to_vec(),
            condition_number: r.condition_number,
        },
        Err(e) => failed(e.to_string(), cond),
    }
}

#[derive(Debug, Serialize)]
pub struct WeightsView {
    pub ok: bool,
    pub message: String,
    pub weights: Vec<f64>,
    pub slope_ratio: f64,
}

/// State weights `μ̄(s)/μ(s)` and the relative marginal utility of state 1
/// versus state 2 for two states.
pub fn two_state_weights(si_s1: f64, mu_s1: f64) -> WeightsView {
    let run = || -> Result<(Vec<f64>, f64), IdentifyError> {
        let si = Dist::with_prefix("s", vec![si_s1, 1.0 - si_s1])?;
        let mu = Dist::with_prefix("s", vec![mu_s1, 1.0 - mu_s1])?;
        let weights = state_weights(&si, &mu)?;
        let family = recover_utility_family(&si, &[vec![1.0, 0.0], vec![1.0, 0.0]], &mu)?;
        Ok((weights, family.relative_slope(0, 1)))
    };
    match run() {
        Ok((weights, slope_ratio)) => WeightsView {
            ok: true,
            message: String::new(),
            weights,
            slope_ratio,
        },
        Err(e) => WeightsView {
            ok: false,
            message: e.to_string(),
            weights: vec![],
            slope_ratio: f64::NAN,
        },
    }
}

#[derive(Debug, Serialize)]
pub struct ReportView {
    pub ok: bool,
    pub message: String,
    pub report: Vec<f64>,
    pub bias: f64,
}

/// Best-response report of an agent whose prize gap at `t1` is `gap_ratio`
/// times the gap at `t2`; ratio 1 is the no-stakes case.
pub fn elicitation_report(truth_t1: f64, gap_ratio: f64) -> ReportView {
    let run = || -> Result<Vec<f64>, String> {
        if !(gap_ratio > 0.0 && gap_ratio.is_finite()) {
            return Err("gap ratio must be positive".into());
        }
        let utility = UtilityTensor::from_nested(&[vec![vec![gap_ratio, 0.0], vec![1.0, 0.0]]])
            .map_err(|e| e.to_string())?;
        let joint = JointBelief::from_rows(vec![vec![truth_t1, 1.0 - truth_t1]]).map_err(|e| e.to_string())?;
        let agent = SimAgent::new(SEURep::new(utility, joint).map_err(|e| e.to_string())?);
        let task = ScoringTask::new(
            0,
            Lottery::degenerate(2, 0).map_err(|e| e.to_string())?,
            Lottery::degenerate(2, 1).map_err(|e| e.to_string())?,
        );
        let report = best_response_report(&agent, &task).map_err(|e| e.to_string())?;
        Ok(report.probs().to_vec())
    };
    match run() {
        Ok(report) => ReportView {
            ok: true,
            message: String::new(),
            bias: (report[0] - truth_t1).abs(),
            report,
        },
        Err(message) => ReportView {
            ok: false,
            message,
            report: vec![],
            bias: f64::NAN,
        },
    }
}

fn json<T: Serialize>(v: &T) -> String {
    serde_json::to_string(v).unwrap_or_else(|e| format!("{{\"ok\":false,\"message\":\"{e}\"}}"))
}

#[wasm_bindgen]
pub fn identify_2x2(p1: f64, p2: f64, objective_t1: f64, event: u32) -> String {
    json(&identify_two_by_two(p1, p2, objective_t1, event))
}

#[wasm_bindgen]
pub fn state_weights_2(si_s1: f64, mu_s1: f64) -> String {
    json(&two_state_weights(si_s1, mu_s1))
}

#[wasm_bindgen]
pub fn elicit_report(truth_t1: f64, gap_ratio: f64) -> String {
    json(&elicitation_report(truth_t1, gap_ratio))
}
