//! Monte Carlo robustness sweep: random ground truth, noisy conditional rows,
//! best-fit identification, one CSV row per trial.

use std::io::Write;

use anyhow::Result;
use rand::Rng;
use rand_distr::{Distribution, Gamma};
use rayon::prelude::*;
use serde::Serialize;

use proxy_belief::identify::{estimate, Verdict};
use proxy_belief::model::{condition_on_event, marginals_and_conditionals, ConditionalFamily, Event};
use proxy_belief::sample::{random_joint, seeded_rng};
use proxy_belief::ProxyProblem;

use crate::schema::SweepConfig;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub trial: usize,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub noise: f64,
    pub cond: f64,
    pub residual: f64,
    pub mu_err: f64,
    pub verdict: String,
}

/// Dirichlet draw centered at `row` with concentration `1/noise`.
fn perturb_row<R: Rng + ?Sized>(rng: &mut R, row: &[f64], noise: f64) -> Vec<f64> {
    if noise == 0.0 {
        return row.to_vec();
    }
    let draws: Vec<f64> = row
        .iter()
        .map(|&p| {
            let shape = (p / noise).max(f64::MIN_POSITIVE);
            Gamma::new(shape, 1.0).map_or(0.0, |g| g.sample(rng))
        })
        .collect();
    let total: f64 = draws.iter().sum();
    if total > 0.0 && total.is_finite() {
        draws.into_iter().map(|d| d / total).collect()
    } else {
        row.to_vec()
    }
}

pub fn run_trial(config: &SweepConfig, trial: usize) -> Result<SweepRow> {
    let mut rng = seeded_rng(config.seed, trial as u64);
    let k = rng.random_range(config.k_min..=config.k_max);
    let n = rng.random_range(config.n_min..=config.n_max);
    let joint = random_joint(&mut rng, k, n)?;
    let members = loop {
        let picked: Vec<usize> = (0..n).filter(|_| rng.random_bool(0.5)).collect();
        if !picked.is_empty() {
            break picked;
        }
    };
    let event = Event::new(members, n)?;
    let mu = condition_on_event(&joint, &event)?;
    let (_, pi_t, family) = marginals_and_conditionals(&joint)?;
    let noisy: Vec<Vec<f64>> = family
        .rows()
        .iter()
        .map(|row| perturb_row(&mut rng, row, config.noise_scale))
        .collect();
    let noisy = ConditionalFamily::new(family.s_labels().to_vec(), family.t_labels().to_vec(), noisy)?;
    let fit = estimate(&ProxyProblem::new(noisy, pi_t, event)?);
    let mu_err = if fit.mu.iter().any(|x| x.is_nan()) {
        f64::NAN
    } else {
        mu.max_abs_diff(&fit.mu)
    };
    Ok(SweepRow {
        trial,
        k,
        n,
        noise: config.noise_scale,
        cond: fit.condition_number,
        residual: fit.residual,
        mu_err,
        verdict: fit.verdict.as_str().to_string(),
    })
}

/// Runs every trial; each derives its own stream from `(seed, trial)`, so
/// the parallel result equals the serial one.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    (0..config.trials)
        .into_par_iter()
        .map(|t| run_trial(config, t))
        .collect()
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn is_ok(row: &SweepRow) -> bool {
    row.verdict == Verdict::Ok.as_str()
}

pub fn median(mut xs: Vec<f64>) -> Option<f64> {
    xs.retain(|x| !x.is_nan());
    if xs.is_empty() {
        return None;
    }
    xs.sort_by(f64::total_cmp);
    let mid = xs.len() / 2;
    Some(if xs.len() % 2 == 0 {
        0.5 * (xs[mid - 1] + xs[mid])
    } else {
        xs[mid]
    })
}
