//! Representation-level checks for the proxy axiomatization.
//!
//! Preferences are never materialized: a relation is carried by an [`SEURep`]
//! and two relations are compared by sampling act pairs. The checks here
//! cover the structural facts behind the axioms: conditional state
//! independence (local state-monotonicity), agreement of the normalized
//! marginal with the objective one (objective mixture indifference), and
//! linear independence of the conditional rows (unique extension).

use rand::Rng;
use thiserror::Error;

use crate::identify::{check_linear_independence, POS_TOL, RES_TOL};
use crate::model::{
    expected_utility, marginals_and_conditionals, Act, Dist, JointBelief, Lottery, ModelError, SEURep, EPS_PROB,
};
use crate::sample::{random_act, seeded_rng};
use crate::simplex::simplex_least_squares;

/// Tolerance for exact S-measurability of a utility tensor.
pub const CSI_TOL: f64 = 1e-12;
/// Tolerance for objective-marginal agreement and mixture indifference.
pub const MARGINAL_TOL: f64 = 1e-9;
/// Expected-utility differences below this count as indifference.
pub const TIE_TOL: f64 = 1e-12;
const FRAME_TOL: f64 = 1e-12;
const AFFINE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AxiomError {
    #[error("representations have different shapes")]
    DimensionMismatch,
    #[error("frame does not strictly rank high over low at ({state}, {proxy})")]
    DegenerateFrame { state: usize, proxy: usize },
    #[error("act is outside the frame lattice at ({state}, {proxy}): coordinate {value}")]
    OutsideLattice { state: usize, proxy: usize, value: f64 },
    #[error("frame acts must be S-measurable")]
    FrameNotSMeasurable,
    #[error("utility is not S-measurable")]
    NotConditionallyStateIndependent,
    #[error(transparent)]
    Model(#[from] ModelError),
}

type Result<T> = std::result::Result<T, AxiomError>;

fn same_shape(a: &SEURep, b: &SEURep) -> bool {
    a.k() == b.k() && a.n() == b.n() && a.prizes() == b.prizes()
}

fn sign(x: f64) -> i8 {
    if x.abs() < TIE_TOL {
        0
    } else if x > 0.0 {
        1
    } else {
        -1
    }
}

/// Compares the rankings two representations induce on `trials` random act pairs.
pub fn preferences_equal(a: &SEURep, b: &SEURep, trials: usize, seed: u64) -> Result<bool> {
    if !same_shape(a, b) {
        return Err(AxiomError::DimensionMismatch);
    }
    let mut rng = seeded_rng(seed, 0);
    let (k, n, m) = (a.k(), a.n(), a.prizes());
    for _ in 0..trials {
        let f = random_act(&mut rng, k, n, m);
        let g = random_act(&mut rng, k, n, m);
        if !ranks_agree(a, b, &f, &g)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True when `a` and `b` rank `f` against `g` the same way.
pub fn ranks_agree(a: &SEURep, b: &SEURep, f: &Act, g: &Act) -> Result<bool> {
    let da = expected_utility(a, f)? - expected_utility(a, g)?;
    let db = expected_utility(b, f)? - expected_utility(b, g)?;
    Ok(sign(da) == sign(db))
}

/// Pairwise ranking agreement on a fixed act set.
pub fn preferences_equal_on(a: &SEURep, b: &SEURep, acts: &[Act]) -> Result<bool> {
    if !same_shape(a, b) {
        return Err(AxiomError::DimensionMismatch);
    }
    for (i, f) in acts.iter().enumerate() {
        for g in &acts[i + 1..] {
            if !ranks_agree(a, b, f, g)? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// No null state: every cell carries probability above `EPS_PROB`.
pub fn is_full_support(rep: &SEURep) -> bool {
    rep.belief().cells().iter().all(|&p| p > EPS_PROB)
}

fn is_constant(v: &[f64]) -> bool {
    let (lo, hi) = v
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    hi - lo <= AFFINE_TOL
}

/// Whether `target = a + b·source` for some `b > 0`, by least squares.
fn positive_affine(source: &[f64], target: &[f64]) -> bool {
    match (is_constant(source), is_constant(target)) {
        (true, true) => return true,
        (true, false) | (false, true) => return false,
        _ => {}
    }
    let m = source.len() as f64;
    let mean_s = source.iter().sum::<f64>() / m;
    let mean_t = target.iter().sum::<f64>() / m;
    let cov: f64 = source.iter().zip(target).map(|(s, t)| (s - mean_s) * (t - mean_t)).sum();
    let var: f64 = source.iter().map(|s| (s - mean_s).powi(2)).sum();
    let slope = cov / var;
    let intercept = mean_t - slope * mean_s;
    let residual = source
        .iter()
        .zip(target)
        .map(|(s, t)| (intercept + slope * s - t).powi(2))
        .sum::<f64>()
        .sqrt();
    slope > 0.0 && residual < AFFINE_TOL
}

/// Within each `{s} × T`, all cells order lotteries identically.
pub fn check_local_state_monotonicity(rep: &SEURep) -> bool {
    let u = rep.utility();
    (0..rep.k()).all(|s| {
        (0..rep.n()).all(|t| ((t + 1)..rep.n()).all(|t2| positive_affine(u.vnm(s, t), u.vnm(s, t2))))
    })
}

/// A pair of S-measurable acts with `high ≻_{s,t} low` in every cell.
#[derive(Debug, Clone, PartialEq)]
pub struct DominanceFrame {
    high: Vec<Lottery>,
    low: Vec<Lottery>,
    n: usize,
}

impl DominanceFrame {
    pub fn new(rep: &SEURep, f_high: &Act, f_low: &Act) -> Result<Self> {
        if !f_high.is_s_measurable() || !f_low.is_s_measurable() {
            return Err(AxiomError::FrameNotSMeasurable);
        }
        let high = (0..f_high.k()).map(|s| f_high.get(s, 0).clone()).collect();
        let low = (0..f_low.k()).map(|s| f_low.get(s, 0).clone()).collect();
        Self::from_lotteries(rep, high, low)
    }

    pub fn from_lotteries(rep: &SEURep, high: Vec<Lottery>, low: Vec<Lottery>) -> Result<Self> {
        if high.len() != rep.k() || low.len() != rep.k() {
            return Err(AxiomError::DimensionMismatch);
        }
        if high.iter().chain(&low).any(|l| l.len() != rep.prizes()) {
            return Err(AxiomError::DimensionMismatch);
        }
        let frame = Self {
            high,
            low,
            n: rep.n(),
        };
        frame.gaps(rep)?;
        Ok(frame)
    }

    /// Best and worst sure prize per state under `v_{s,t₁}`.
    pub fn canonical(rep: &SEURep) -> Result<Self> {
        let m = rep.prizes();
        let mut high = Vec::with_capacity(rep.k());
        let mut low = Vec::with_capacity(rep.k());
        for s in 0..rep.k() {
            let v = rep.utility().vnm(s, 0);
            let best = (0..m).max_by(|&a, &b| v[a].total_cmp(&v[b])).unwrap_or(0);
            let worst = (0..m).min_by(|&a, &b| v[a].total_cmp(&v[b])).unwrap_or(0);
            high.push(Lottery::degenerate(m, best)?);
            low.push(Lottery::degenerate(m, worst)?);
        }
        Self::from_lotteries(rep, high, low)
    }

    pub fn high(&self, s: usize) -> &Lottery {
        &self.high[s]
    }

    pub fn low(&self, s: usize) -> &Lottery {
        &self.low[s]
    }

    pub fn high_act(&self) -> Act {
        Act::s_measurable(&self.high, self.n).expect("frame lotteries share a prize set")
    }

    pub fn low_act(&self) -> Act {
        Act::s_measurable(&self.low, self.n).expect("frame lotteries share a prize set")
    }

    /// `u_{s,t}(high_s) − u_{s,t}(low_s)` as a `K × N` table.
    pub fn gaps(&self, rep: &SEURep) -> Result<Vec<Vec<f64>>> {
        if self.high.len() != rep.k() || self.n != rep.n() {
            return Err(AxiomError::DimensionMismatch);
        }
        let u = rep.utility();
        (0..rep.k())
            .map(|s| {
                (0..rep.n())
                    .map(|t| {
                        let gap = u.utility(s, t, &self.high[s]) - u.utility(s, t, &self.low[s]);
                        if gap > FRAME_TOL {
                            Ok(gap)
                        } else {
                            Err(AxiomError::DegenerateFrame { state: s, proxy: t })
                        }
                    })
                    .collect()
            })
            .collect()
    }

    /// Lattice act with cell `(s,t)` equal to `λ_{s,t}·high_s + (1−λ_{s,t})·low_s`.
    pub fn lattice_act(&self, coords: &MixtureCoordinates) -> Result<Act> {
        if coords.k() != self.high.len() || coords.n() != self.n {
            return Err(AxiomError::DimensionMismatch);
        }
        Ok(Act::from_fn(coords.k(), self.n, |s, t| {
            self.high[s].mix(&self.low[s], coords.get(s, t))
        })?)
    }

    /// `⟨t⟩`: high on `S × {t}`, low elsewhere.
    pub fn indicator_act(&self, t: usize) -> Act {
        self.high_act()
            .splice(&self.low_act(), |_, t2| t2 == t)
            .expect("frame acts share a shape")
    }

    /// `f¹_{{s}×T} f²` with `fⁱ = λ_i·high + (1−λ_i)·low`.
    pub fn state_splice(&self, state: usize, on_state: f64, elsewhere: f64) -> Act {
        let k = self.high.len();
        Act::from_fn(k, self.n, |s, _| {
            let w = if s == state { on_state } else { elsewhere };
            self.high[s].mix(&self.low[s], w)
        })
        .expect("frame lotteries share a prize set")
    }

    /// S-measurable mixture `λ·high + (1−λ)·low`.
    pub fn uniform_mixture(&self, w: f64) -> Act {
        let k = self.high.len();
        Act::from_fn(k, self.n, |s, _| self.high[s].mix(&self.low[s], w))
            .expect("frame lotteries share a prize set")
    }
}

/// Per-cell weights placing an act between the frame's low and high acts.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureCoordinates {
    k: usize,
    n: usize,
    values: Vec<f64>,
}

impl MixtureCoordinates {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let k = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        let mut values = Vec::with_capacity(k * n);
        for (s, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(AxiomError::DimensionMismatch);
            }
            for (t, &v) in row.iter().enumerate() {
                if !(0.0..=1.0).contains(&v) {
                    return Err(AxiomError::OutsideLattice {
                        state: s,
                        proxy: t,
                        value: v,
                    });
                }
            }
            values.extend_from_slice(row);
        }
        Ok(Self { k, n, values })
    }

    /// Coordinates that depend on `t` only.
    pub fn t_measurable(k: usize, per_proxy: &[f64]) -> Result<Self> {
        Self::new(vec![per_proxy.to_vec(); k])
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, s: usize, t: usize) -> f64 {
        self.values[s * self.n + t]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.values.chunks(self.n).map(<[f64]>::to_vec).collect()
    }

    pub fn is_t_measurable(&self, tol: f64) -> bool {
        (0..self.n).all(|t| (1..self.k).all(|s| (self.get(s, t) - self.get(0, t)).abs() <= tol))
    }
}

/// `λ_{s,t}` solving `f ∼_{s,t} (1−λ)·low + λ·high` under `rep`.
pub fn mixture_coordinates(rep: &SEURep, frame: &DominanceFrame, f: &Act) -> Result<MixtureCoordinates> {
    if f.k() != rep.k() || f.n() != rep.n() || f.prizes() != rep.prizes() {
        return Err(AxiomError::DimensionMismatch);
    }
    let gaps = frame.gaps(rep)?;
    let u = rep.utility();
    let mut rows = Vec::with_capacity(rep.k());
    for (s, gap_row) in gaps.iter().enumerate() {
        let mut row = Vec::with_capacity(rep.n());
        for (t, gap) in gap_row.iter().enumerate() {
            let value = (u.utility(s, t, f.get(s, t)) - u.utility(s, t, frame.low(s))) / gap;
            if !(-FRAME_TOL..=1.0 + FRAME_TOL).contains(&value) {
                return Err(AxiomError::OutsideLattice {
                    state: s,
                    proxy: t,
                    value,
                });
            }
            row.push(value.clamp(0.0, 1.0));
        }
        rows.push(row);
    }
    MixtureCoordinates::new(rows)
}

/// `f^obj_s = Σ_t π_T^obj(t)·f_{s,t}`, placed on every `(s,t)`.
pub fn objective_average(f: &Act, objective: &Dist) -> Result<Act> {
    if objective.len() != f.n() {
        return Err(AxiomError::DimensionMismatch);
    }
    let per_state: Vec<Lottery> = (0..f.k())
        .map(|s| Lottery::mixture((0..f.n()).map(|t| f.get(s, t)), objective.probs()))
        .collect();
    Ok(Act::s_measurable(&per_state, f.n())?)
}

/// Expected frame gap `Σ π(s,t)·(u_{s,t}(high) − u_{s,t}(low))`. Equals one
/// for a normalized representation.
fn frame_scale(rep: &SEURep, frame: &DominanceFrame) -> Result<f64> {
    let gaps = frame.gaps(rep)?;
    let belief = rep.belief();
    Ok((0..rep.k())
        .flat_map(|s| (0..rep.n()).map(move |t| (s, t)))
        .map(|(s, t)| belief.get(s, t) * gaps[s][t])
        .sum())
}

/// Objective mixture indifference on the frame's T-measurable lattice acts.
///
/// Tests every `⟨t⟩` and `samples` random T-measurable coordinate vectors.
/// Utility differences are measured in units of the expected frame gap, so
/// the tolerance reads as a probability gap under the normalized frame.
pub fn check_objective_mixture_indifference(
    rep: &SEURep,
    frame: &DominanceFrame,
    objective: &Dist,
    samples: usize,
    seed: u64,
) -> Result<bool> {
    if objective.len() != rep.n() {
        return Err(AxiomError::DimensionMismatch);
    }
    let scale = frame_scale(rep, frame)?;
    let indifferent = |f: &Act| -> Result<bool> {
        let f_obj = objective_average(f, objective)?;
        let gap = expected_utility(rep, f)? - expected_utility(rep, &f_obj)?;
        Ok((gap / scale).abs() < MARGINAL_TOL)
    };
    for t in 0..rep.n() {
        if !indifferent(&frame.indicator_act(t))? {
            return Ok(false);
        }
    }
    let mut rng = seeded_rng(seed, 1);
    for _ in 0..samples {
        let per_proxy: Vec<f64> = (0..rep.n()).map(|_| rng.random::<f64>()).collect();
        let coords = MixtureCoordinates::t_measurable(rep.k(), &per_proxy)?;
        if !indifferent(&frame.lattice_act(&coords)?)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Rescales a CSI representation so that `ū_s(high_s) = 1`, `ū_s(low_s) = 0`,
/// and moves the compensating factors into the S-marginal.
pub fn normalize_csi(rep: &SEURep, frame: &DominanceFrame) -> Result<SEURep> {
    if !rep.utility().is_s_measurable(CSI_TOL) {
        return Err(AxiomError::NotConditionallyStateIndependent);
    }
    let gaps = frame.gaps(rep)?;
    let u = rep.utility();
    let k = rep.k();
    let mut alpha = vec![0.0; k];
    let mut beta = vec![1.0; k];
    for s in 0..k {
        let low = u.utility(s, 0, frame.low(s));
        let gap = gaps[s][0];
        // already normalized states keep α = 0, β = 1 exactly
        if (gap - 1.0).abs() <= CSI_TOL && low.abs() <= CSI_TOL {
            continue;
        }
        beta[s] = 1.0 / gap;
        alpha[s] = -low / gap;
    }
    if alpha.iter().all(|&a| a == 0.0) && beta.iter().all(|&b| b == 1.0) {
        return Ok(rep.clone());
    }
    let (pi_s, _, family) = marginals_and_conditionals(rep.belief())?;
    let weights: Vec<f64> = pi_s.probs().iter().zip(&beta).map(|(p, b)| p / b).collect();
    let total: f64 = weights.iter().sum();
    let table = family
        .rows()
        .iter()
        .zip(&weights)
        .map(|(row, w)| row.iter().map(|c| w / total * c).collect())
        .collect();
    let belief = JointBelief::allowing_null_cells(
        rep.belief().s_labels().to_vec(),
        rep.belief().t_labels().to_vec(),
        table,
    )?;
    Ok(SEURep::new(u.affine_per_state(&alpha, &beta), belief)?)
}

/// Verdict on whether a representation's preferences admit a proxy-consistent
/// (PC-SEU) representation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PCVerdict {
    pub csi: bool,
    pub objective_marginal: bool,
    pub independent: bool,
    pub pc: bool,
}

/// Normalized CSI representation whose T-marginal equals `objective`, when
/// one exists.
///
/// Such a representation exists iff `objective` is a strictly positive
/// mixture of the conditional rows; the frame is then scaled per state so
/// that normalization lands the S-marginal on those mixture weights.
pub fn pc_seu_witness(rep: &SEURep, objective: &Dist) -> Result<Option<SEURep>> {
    if !rep.utility().is_s_measurable(CSI_TOL) {
        return Ok(None);
    }
    if objective.len() != rep.n() {
        return Err(AxiomError::DimensionMismatch);
    }
    let (pi_s, _, family) = marginals_and_conditionals(rep.belief())?;
    let fit = simplex_least_squares(family.rows(), objective.probs());
    if fit.residual > RES_TOL || fit.weights.iter().any(|&w| w < POS_TOL) {
        return Ok(None);
    }
    let canonical = match DominanceFrame::canonical(rep) {
        Ok(frame) => frame,
        Err(AxiomError::DegenerateFrame { .. }) => return Ok(None),
        Err(e) => return Err(e),
    };
    let range: Vec<f64> = canonical.gaps(rep)?.iter().map(|row| row[0]).collect();
    // normalized marginal ∝ π_S(s)·gap_s, so pick gap_s ∝ λ_s / π_S(s)
    let wanted: Vec<f64> = fit
        .weights
        .iter()
        .zip(pi_s.probs())
        .map(|(l, p)| l / p)
        .collect();
    let c = range
        .iter()
        .zip(&wanted)
        .map(|(r, w)| r / w)
        .fold(f64::INFINITY, f64::min);
    let high = (0..rep.k())
        .map(|s| {
            let w = (c * wanted[s] / range[s]).min(1.0);
            canonical.high(s).mix(canonical.low(s), w)
        })
        .collect();
    let low = (0..rep.k()).map(|s| canonical.low(s).clone()).collect();
    let frame = DominanceFrame::from_lotteries(rep, high, low)?;
    let normalized = normalize_csi(rep, &frame)?;
    let marginal = normalized.belief().marginal_t();
    Ok((objective.max_abs_diff(&marginal) < MARGINAL_TOL).then_some(normalized))
}

pub fn check_pc_seu(rep: &SEURep, objective: &Dist) -> Result<PCVerdict> {
    let csi = rep.utility().is_s_measurable(CSI_TOL);
    let (_, _, family) = marginals_and_conditionals(rep.belief())?;
    let independent = check_linear_independence(&family).independent;
    let objective_marginal = pc_seu_witness(rep, objective)?.is_some();
    Ok(PCVerdict {
        csi,
        objective_marginal,
        independent,
        pc: csi && objective_marginal && independent,
    })
}

/// `count` random lattice acts with T-measurable coordinates.
pub fn t_measurable_lattice_acts(frame: &DominanceFrame, count: usize, seed: u64) -> Result<Vec<Act>> {
    let mut rng = seeded_rng(seed, 2);
    let k = frame.high.len();
    (0..count)
        .map(|_| {
            let per_proxy: Vec<f64> = (0..frame.n).map(|_| rng.random::<f64>()).collect();
            frame.lattice_act(&MixtureCoordinates::t_measurable(k, &per_proxy)?)
        })
        .collect()
}

/// A lattice act pair `(f¹_{{s}×T} f², f⁰)` ranked `f¹_{{s}×T} f² ⪰ f⁰` by `a`
/// and the other way by `b`.
///
/// Both representations are normalized against `frame`; a separating pair
/// exists whenever their normalized S-marginals differ.
pub fn separating_act(a: &SEURep, b: &SEURep, frame: &DominanceFrame) -> Result<Option<(Act, Act)>> {
    let pa = normalize_csi(a, frame)?.belief().marginal_s();
    let pb = normalize_csi(b, frame)?.belief().marginal_s();
    let Some((state, _)) = pa
        .iter()
        .zip(&pb)
        .enumerate()
        .map(|(s, (x, y))| (s, x - y))
        .filter(|&(_, d)| d > MARGINAL_TOL)
        .max_by(|x, y| x.1.total_cmp(&y.1))
    else {
        return Ok(None);
    };
    let (hi, lo) = (0.9, 0.1);
    let value_a = pa[state] * hi + (1.0 - pa[state]) * lo;
    let value_b = pb[state] * hi + (1.0 - pb[state]) * lo;
    let threshold = 0.5 * (value_a + value_b);
    Ok(Some((frame.state_splice(state, hi, lo), frame.uniform_mixture(threshold))))
}
