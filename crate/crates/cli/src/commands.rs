//! Subcommand implementations. Each returns the process exit code; payloads
//! go to stdout or the requested file, diagnostics to stderr.

use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;

use proxy_belief::axioms::{check_local_state_monotonicity, check_pc_seu, is_full_support, ranks_agree};
use proxy_belief::elicit::{default_tasks, misreport_bias, run_strategy_method, ElicitError, SimAgent};
use proxy_belief::identify::{recover_utility_family, rescale_representation, state_weights};
use proxy_belief::model::{marginals_and_conditionals, Dist, Event, ModelError, UtilityTensor};
use proxy_belief::sample::{random_act, random_simplex, random_state_utility, seeded_rng};
use proxy_belief::{identify, IdentifyError, JointBelief, ProxyProblem, SEURep};

use crate::schema::{parse_labels, parse_numbers, GroundTruthCheck, IdentifyOutput, ProblemFile, RepFile};
use crate::sweep::{run_sweep, write_csv};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_RANK_DEFICIENT: i32 = 2;
pub const EXIT_NOT_IDENTIFIED: i32 = 3;

fn identify_exit_code(err: &IdentifyError) -> i32 {
    match err {
        IdentifyError::RankDeficient { .. } => EXIT_RANK_DEFICIENT,
        IdentifyError::Infeasible { .. } | IdentifyError::NotFullSupport { .. } => EXIT_NOT_IDENTIFIED,
        _ => EXIT_INPUT,
    }
}

fn report_identify_error(err: &IdentifyError) -> i32 {
    match err {
        IdentifyError::RankDeficient { .. } => {
            eprintln!("error: (P3) violated: {err}");
        }
        IdentifyError::Infeasible { .. } => {
            eprintln!("error: (P1)/(P2) violated or inconsistent data: {err}");
        }
        IdentifyError::NotFullSupport { .. } => {
            eprintln!("error: (A0) violated: {err}");
        }
        _ => eprintln!("error: {err}"),
    }
    identify_exit_code(err)
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("payload is serializable");
    s.push('\n');
    s
}

/// Parse and validation failures exit 1, except a zero-probability cell in
/// a supplied belief, which is a full-support violation.
fn input_error(err: anyhow::Error) -> i32 {
    let null_cell = err
        .chain()
        .any(|c| matches!(c.downcast_ref::<ModelError>(), Some(ModelError::NotFullSupport { .. })));
    if null_cell {
        eprintln!("error: (A0) violated: {err:#}");
        EXIT_NOT_IDENTIFIED
    } else {
        eprintln!("error: {err:#}");
        EXIT_INPUT
    }
}

pub fn cmd_identify(input: &Path, output: &Path) -> i32 {
    let file: ProblemFile = match read_json(input) {
        Ok(f) => f,
        Err(e) => return input_error(e),
    };
    let (problem, truth) = match file.to_problem().and_then(|p| Ok((p, file.ground_truth()?))) {
        Ok(x) => x,
        Err(e) => return input_error(e),
    };
    let result = match identify(&problem) {
        Ok(r) => r,
        Err(e) => return report_identify_error(&e),
    };
    let mut out = IdentifyOutput::from_result(&result);
    if let Some(truth) = truth {
        let true_mu = match proxy_belief::model::condition_on_event(&truth, problem.event()) {
            Ok(mu) => mu,
            Err(e) => return input_error(e.into()),
        };
        let joint_err = truth
            .cells()
            .iter()
            .zip(result.joint.cells())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        out.ground_truth = Some(GroundTruthCheck {
            mu_err: true_mu.max_abs_diff(result.mu.probs()),
            joint_err,
        });
    }
    if let Err(e) = fs::write(output, to_json(&out)) {
        return input_error(anyhow::Error::from(e).context(format!("writing {}", output.display())));
    }
    EXIT_OK
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Demo {
    IdentProblem,
    UtilityFamily,
    Elicit,
}

fn fmt_vec(v: &[f64], digits: usize) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.digits$}")).collect();
    format!("({})", parts.join(", "))
}

/// Two distinct (utility, belief) pairs representing the same preferences.
pub fn demo_ident_problem(seed: u64) -> Result<String> {
    const PAIRS: usize = 1000;
    let mut rng = seeded_rng(seed, 0);
    let (k, m) = (3, 4);
    let utility = random_state_utility(&mut rng, k, m);
    let belief = Dist::with_prefix("s", random_simplex(&mut rng, k))?;
    let target = Dist::with_prefix("s", random_simplex(&mut rng, k))?;
    let (rescaled, target) = rescale_representation(&utility, &belief, &target)?;
    let a = SEURep::over_states(&utility, &belief)?;
    let b = SEURep::over_states(&rescaled, &target)?;
    let mut agree = 0;
    for _ in 0..PAIRS {
        let f = random_act(&mut rng, k, 1, m);
        let g = random_act(&mut rng, k, 1, m);
        if ranks_agree(&a, &b, &f, &g)? {
            agree += 1;
        }
    }
    let mut s = String::new();
    s += &format!("representation A: belief {}\n", fmt_vec(belief.probs(), 4));
    for (i, v) in utility.iter().enumerate() {
        s += &format!("  u_s{} = {}\n", i + 1, fmt_vec(v, 4));
    }
    s += &format!("representation B: belief {}\n", fmt_vec(target.probs(), 4));
    for (i, v) in rescaled.iter().enumerate() {
        s += &format!("  u_s{} = {}\n", i + 1, fmt_vec(v, 4));
    }
    s += &format!("equivalent on {agree}/{PAIRS} pairs\n");
    Ok(s)
}

/// Actual utility class from the insurance example.
pub fn demo_utility_family() -> Result<String> {
    let si = Dist::with_prefix("s", vec![0.9, 0.1])?;
    let mu = Dist::with_prefix("s", vec![0.1, 0.9])?;
    let money = vec![vec![-10.0, 0.0, 90.0]; 2];
    let weights = state_weights(&si, &mu)?;
    let family = recover_utility_family(&si, &money, &mu)?;
    let mut s = String::new();
    s += &format!("state-independent belief {}\n", fmt_vec(si.probs(), 2));
    s += &format!("actual belief {}\n", fmt_vec(mu.probs(), 2));
    s += &format!("state weights w(s) = {}\n", fmt_vec(&weights, 6));
    s += &format!("scale per state = {}\n", fmt_vec(&family.scale_per_state, 6));
    s += &format!("gamma1/gamma2 = {:.6}\n", family.relative_slope(0, 1));
    Ok(s)
}

fn drug_trial_agent() -> Result<SimAgent> {
    let joint = JointBelief::new(
        vec!["recovers".into(), "paralyzed".into()],
        vec!["drug".into(), "placebo".into()],
        vec![vec![0.20, 0.05], vec![0.30, 0.45]],
    )?;
    // conditionally state-independent: prize utility varies with S only
    let utility = UtilityTensor::s_measurable(&[vec![0.0, 1.0], vec![0.0, 0.25]], 2)?;
    Ok(SimAgent::new(SEURep::new(utility, joint)?))
}

/// Elicitation followed by identification on the drug/placebo agent.
pub fn demo_elicit() -> Result<String> {
    let agent = drug_trial_agent()?;
    let tasks = default_tasks(&agent)?;
    let family = run_strategy_method(&agent, &tasks)?;
    let objective = Dist::new(agent.truth().t_labels().to_vec(), vec![0.5, 0.5])?;
    let event = Event::from_labels(agent.truth().t_labels(), &["placebo"])?;
    let result = identify(&ProxyProblem::new(family.clone(), objective, event)?)?;
    let mut s = String::new();
    for (label, row) in family.s_labels().iter().zip(family.rows()) {
        s += &format!("report given {label}: {}\n", fmt_vec(row, 6));
    }
    s += &format!("pi_S = {}\n", fmt_vec(result.pi_s.probs(), 4));
    s += &format!("mu = {}\n", fmt_vec(result.mu.probs(), 2));
    Ok(s)
}

pub fn cmd_demo(which: Demo, seed: u64) -> i32 {
    let text = match which {
        Demo::IdentProblem => demo_ident_problem(seed),
        Demo::UtilityFamily => demo_utility_family(),
        Demo::Elicit => demo_elicit(),
    };
    match text {
        Ok(t) => {
            print!("{t}");
            let _ = std::io::stdout().flush();
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_INPUT
        }
    }
}

#[derive(Debug, Serialize)]
struct ElicitOutput {
    elicited_rows: Vec<Vec<f64>>,
    bias: Vec<f64>,
    #[serde(flatten)]
    identification: IdentifyOutput,
}

pub fn cmd_elicit(agent_path: &Path, objective: &str, event: &str) -> i32 {
    let prepared = (|| -> Result<(SimAgent, Dist, Event)> {
        let file: RepFile = read_json(agent_path)?;
        let agent = SimAgent::new(file.to_rep()?);
        let t_labels = agent.truth().t_labels().to_vec();
        let objective = Dist::new(t_labels.clone(), parse_numbers(objective)?).context("--objective")?;
        let event = Event::from_labels(&t_labels, &parse_labels(event)).context("--event")?;
        Ok((agent, objective, event))
    })();
    let (agent, objective, event) = match prepared {
        Ok(x) => x,
        Err(e) => return input_error(e),
    };
    let run = (|| -> std::result::Result<ElicitOutput, ElicitError> {
        let tasks = default_tasks(&agent)?;
        let family = run_strategy_method(&agent, &tasks)?;
        let bias = misreport_bias(&agent, &tasks)?;
        let result = identify(&ProxyProblem::new(family.clone(), objective, event)?)?;
        Ok(ElicitOutput {
            elicited_rows: family.rows().to_vec(),
            bias,
            identification: IdentifyOutput::from_result(&result),
        })
    })();
    match run {
        Ok(out) => {
            print!("{}", to_json(&out));
            EXIT_OK
        }
        Err(ElicitError::Identify(e)) => report_identify_error(&e),
        Err(e) => input_error(e.into()),
    }
}

#[derive(Debug, Serialize)]
struct AxiomsOutput {
    full_support: bool,
    local_state_monotonicity: bool,
    csi: bool,
    objective_marginal: bool,
    independent: bool,
    pc: bool,
    conditional_rows: Vec<Vec<f64>>,
}

pub fn cmd_axioms(rep_path: &Path, objective: &str) -> i32 {
    let run = (|| -> Result<AxiomsOutput> {
        let file: RepFile = read_json(rep_path)?;
        let rep = file.to_rep()?;
        let objective =
            Dist::new(rep.belief().t_labels().to_vec(), parse_numbers(objective)?).context("--objective")?;
        let verdict = check_pc_seu(&rep, &objective)?;
        let (_, _, family) = marginals_and_conditionals(rep.belief())?;
        Ok(AxiomsOutput {
            full_support: is_full_support(&rep),
            local_state_monotonicity: check_local_state_monotonicity(&rep),
            csi: verdict.csi,
            objective_marginal: verdict.objective_marginal,
            independent: verdict.independent,
            pc: verdict.pc,
            conditional_rows: family.rows().to_vec(),
        })
    })();
    match run {
        Ok(out) => {
            print!("{}", to_json(&out));
            EXIT_OK
        }
        Err(e) => input_error(e),
    }
}

pub fn cmd_sweep(config_path: &Path, csv_out: &Path) -> i32 {
    let run = (|| -> Result<()> {
        let config = read_json(config_path)?;
        let rows = run_sweep(&config)?;
        let file = fs::File::create(csv_out).with_context(|| format!("creating {}", csv_out.display()))?;
        write_csv(&rows, std::io::BufWriter::new(file))
    })();
    match run {
        Ok(()) => EXIT_OK,
        Err(e) => input_error(e),
    }
}
