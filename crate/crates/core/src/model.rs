//! Core domain types: distributions, joint beliefs over `S × T`, lotteries,
//! acts and state-dependent expected-utility representations.
//!
//! Everything here is immutable after construction. Matrices are indexed by
//! position; labels travel alongside for reporting only.

use thiserror::Error;

/// Tolerance used when validating that a vector lies on the probability simplex.
pub const EPS_PROB: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("not a probability vector (sum {sum}, min entry {min})")]
    NotASimplex { sum: f64, min: f64 },
    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("label set is empty")]
    EmptyLabels,
    #[error("cell ({state}, {proxy}) has zero probability")]
    NotFullSupport { state: usize, proxy: usize },
    #[error("marginal of state {state} is not positive")]
    ZeroMarginal { state: usize },
    #[error("event is empty")]
    EmptyEvent,
    #[error("event has zero probability")]
    NullEvent,
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("at least two prizes are required, found {0}")]
    TooFewPrizes(usize),
    #[error("utility values must be finite")]
    NonFiniteUtility,
}

type Result<T> = std::result::Result<T, ModelError>;

/// `prefix1, prefix2, ...`
pub fn default_labels(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

/// Checks the simplex condition, clamps tiny negatives and renormalizes.
fn simplex(raw: &[f64]) -> Result<Vec<f64>> {
    let sum: f64 = raw.iter().sum();
    let min = raw.iter().copied().fold(f64::INFINITY, f64::min);
    if raw.iter().any(|p| !p.is_finite()) || min < -EPS_PROB || (sum - 1.0).abs() > EPS_PROB {
        return Err(ModelError::NotASimplex { sum, min });
    }
    let clamped: Vec<f64> = raw.iter().map(|&p| p.max(0.0)).collect();
    let total: f64 = clamped.iter().sum();
    Ok(clamped.into_iter().map(|p| p / total).collect())
}

/// A probability vector over an ordered finite label set.
#[derive(Debug, Clone, PartialEq)]
pub struct Dist {
    labels: Vec<String>,
    probs: Vec<f64>,
}

/// Validates `raw` against `labels` and returns the renormalized distribution.
pub fn validate_dist(raw: &[f64], labels: &[String]) -> Result<Dist> {
    Dist::new(labels.to_vec(), raw.to_vec())
}

impl Dist {
    pub fn new(labels: Vec<String>, raw: Vec<f64>) -> Result<Self> {
        if labels.is_empty() {
            return Err(ModelError::EmptyLabels);
        }
        if labels.len() != raw.len() {
            return Err(ModelError::DimensionMismatch {
                what: "distribution",
                expected: labels.len(),
                found: raw.len(),
            });
        }
        Ok(Self {
            probs: simplex(&raw)?,
            labels,
        })
    }

    /// Distribution with generated labels `prefix1..prefixN`.
    pub fn with_prefix(prefix: &str, raw: Vec<f64>) -> Result<Self> {
        Self::new(default_labels(prefix, raw.len()), raw)
    }

    pub fn uniform(labels: Vec<String>) -> Result<Self> {
        let n = labels.len();
        Self::new(labels, vec![1.0 / n.max(1) as f64; n])
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn get(&self, i: usize) -> f64 {
        self.probs[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Sup-norm distance to another vector of the same length.
    pub fn max_abs_diff(&self, other: &[f64]) -> f64 {
        self.probs
            .iter()
            .zip(other)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Full-support joint belief `π ∈ Δ(S × T)`, stored row-major (`K × N`).
#[derive(Debug, Clone, PartialEq)]
pub struct JointBelief {
    s_labels: Vec<String>,
    t_labels: Vec<String>,
    table: Vec<f64>,
}

impl JointBelief {
    /// Builds a joint belief and requires every cell to be strictly positive.
    pub fn new(s_labels: Vec<String>, t_labels: Vec<String>, table: Vec<Vec<f64>>) -> Result<Self> {
        let joint = Self::allowing_null_cells(s_labels, t_labels, table)?;
        if let Some((state, proxy)) = joint.null_cells().first().copied() {
            return Err(ModelError::NotFullSupport { state, proxy });
        }
        Ok(joint)
    }

    /// Like [`JointBelief::new`] but tolerates zero cells, as long as every
    /// state keeps positive marginal mass.
    pub fn allowing_null_cells(
        s_labels: Vec<String>,
        t_labels: Vec<String>,
        table: Vec<Vec<f64>>,
    ) -> Result<Self> {
        if s_labels.is_empty() || t_labels.is_empty() {
            return Err(ModelError::EmptyLabels);
        }
        if table.len() != s_labels.len() {
            return Err(ModelError::DimensionMismatch {
                what: "joint rows",
                expected: s_labels.len(),
                found: table.len(),
            });
        }
        let n = t_labels.len();
        let mut flat = Vec::with_capacity(s_labels.len() * n);
        for row in &table {
            if row.len() != n {
                return Err(ModelError::DimensionMismatch {
                    what: "joint columns",
                    expected: n,
                    found: row.len(),
                });
            }
            flat.extend_from_slice(row);
        }
        let table = simplex(&flat)?;
        for (state, row) in table.chunks(n).enumerate() {
            if row.iter().sum::<f64>() <= 0.0 {
                return Err(ModelError::ZeroMarginal { state });
            }
        }
        Ok(Self {
            s_labels,
            t_labels,
            table,
        })
    }

    /// Joint belief with generated labels `s1..sK`, `t1..tN`.
    pub fn from_rows(table: Vec<Vec<f64>>) -> Result<Self> {
        let k = table.len();
        let n = table.first().map_or(0, Vec::len);
        Self::new(default_labels("s", k), default_labels("t", n), table)
    }

    pub fn k(&self) -> usize {
        self.s_labels.len()
    }

    pub fn n(&self) -> usize {
        self.t_labels.len()
    }

    pub fn s_labels(&self) -> &[String] {
        &self.s_labels
    }

    pub fn t_labels(&self) -> &[String] {
        &self.t_labels
    }

    pub fn get(&self, s: usize, t: usize) -> f64 {
        self.table[s * self.n() + t]
    }

    pub fn row(&self, s: usize) -> &[f64] {
        let n = self.n();
        &self.table[s * n..(s + 1) * n]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.table.chunks(self.n()).map(<[f64]>::to_vec).collect()
    }

    pub fn cells(&self) -> &[f64] {
        &self.table
    }

    /// Cells with exactly zero probability.
    pub fn null_cells(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        self.table
            .iter()
            .enumerate()
            .filter(|(_, &p)| p <= 0.0)
            .map(|(i, _)| (i / n, i % n))
            .collect()
    }

    pub fn has_full_support(&self) -> bool {
        self.table.iter().all(|&p| p > 0.0)
    }

    pub fn marginal_s(&self) -> Vec<f64> {
        (0..self.k()).map(|s| self.row(s).iter().sum()).collect()
    }

    pub fn marginal_t(&self) -> Vec<f64> {
        (0..self.n())
            .map(|t| (0..self.k()).map(|s| self.get(s, t)).sum())
            .collect()
    }

    /// Row `s` of the conditional family, `π_T(·|s)`.
    pub fn conditional_row(&self, s: usize) -> Vec<f64> {
        let row = self.row(s);
        let mass: f64 = row.iter().sum();
        row.iter().map(|p| p / mass).collect()
    }
}

/// The `K × N` row-stochastic matrix of conditionals `π_T(·|s_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalFamily {
    s_labels: Vec<String>,
    t_labels: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl ConditionalFamily {
    pub fn new(s_labels: Vec<String>, t_labels: Vec<String>, rows: Vec<Vec<f64>>) -> Result<Self> {
        if s_labels.is_empty() || t_labels.is_empty() {
            return Err(ModelError::EmptyLabels);
        }
        if rows.len() != s_labels.len() {
            return Err(ModelError::DimensionMismatch {
                what: "conditional rows",
                expected: s_labels.len(),
                found: rows.len(),
            });
        }
        let rows = rows
            .into_iter()
            .map(|r| Dist::new(t_labels.clone(), r).map(|d| d.probs))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            s_labels,
            t_labels,
            rows,
        })
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let k = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        Self::new(default_labels("s", k), default_labels("t", n), rows)
    }

    pub fn k(&self) -> usize {
        self.rows.len()
    }

    pub fn n(&self) -> usize {
        self.t_labels.len()
    }

    pub fn row(&self, s: usize) -> &[f64] {
        &self.rows[s]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn s_labels(&self) -> &[String] {
        &self.s_labels
    }

    pub fn t_labels(&self) -> &[String] {
        &self.t_labels
    }
}

/// A lottery over the prize set `X`. Prize labels live on the representation.
#[derive(Debug, Clone, PartialEq)]
pub struct Lottery(Vec<f64>);

impl Lottery {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(ModelError::TooFewPrizes(probs.len()));
        }
        Ok(Self(simplex(&probs)?))
    }

    /// Point mass on prize `i` out of `m`.
    pub fn degenerate(m: usize, i: usize) -> Result<Self> {
        if m < 2 {
            return Err(ModelError::TooFewPrizes(m));
        }
        if i >= m {
            return Err(ModelError::DimensionMismatch {
                what: "prize index",
                expected: m,
                found: i,
            });
        }
        let mut p = vec![0.0; m];
        p[i] = 1.0;
        Ok(Self(p))
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `w·self + (1−w)·other`, with `w` clamped to `[0, 1]`.
    pub fn mix(&self, other: &Lottery, w: f64) -> Lottery {
        let w = w.clamp(0.0, 1.0);
        Lottery(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| w * a + (1.0 - w) * b)
                .collect(),
        )
    }

    /// Mixture `Σ_i w_i · lotteries_i` for weights on the simplex.
    pub fn mixture<'a>(lotteries: impl IntoIterator<Item = &'a Lottery>, weights: &[f64]) -> Lottery {
        let mut acc: Vec<f64> = Vec::new();
        for (l, &w) in lotteries.into_iter().zip(weights) {
            if acc.is_empty() {
                acc = vec![0.0; l.len()];
            }
            for (a, p) in acc.iter_mut().zip(&l.0) {
                *a += w * p;
            }
        }
        Lottery(acc)
    }
}

/// An act `f: S × T → Δ(X)`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Act {
    k: usize,
    n: usize,
    cells: Vec<Lottery>,
}

impl Act {
    pub fn new(k: usize, n: usize, cells: Vec<Lottery>) -> Result<Self> {
        if cells.len() != k * n {
            return Err(ModelError::DimensionMismatch {
                what: "act cells",
                expected: k * n,
                found: cells.len(),
            });
        }
        let m = cells.first().map_or(0, Lottery::len);
        if let Some(bad) = cells.iter().find(|l| l.len() != m) {
            return Err(ModelError::DimensionMismatch {
                what: "act prize count",
                expected: m,
                found: bad.len(),
            });
        }
        Ok(Self { k, n, cells })
    }

    pub fn from_fn(k: usize, n: usize, mut f: impl FnMut(usize, usize) -> Lottery) -> Result<Self> {
        let cells = (0..k)
            .flat_map(|s| (0..n).map(move |t| (s, t)))
            .map(|(s, t)| f(s, t))
            .collect();
        Self::new(k, n, cells)
    }

    /// Act that is constant across the proxy dimension.
    pub fn s_measurable(per_state: &[Lottery], n: usize) -> Result<Self> {
        Self::from_fn(per_state.len(), n, |s, _| per_state[s].clone())
    }

    pub fn constant(k: usize, n: usize, lottery: &Lottery) -> Result<Self> {
        Self::from_fn(k, n, |_, _| lottery.clone())
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn prizes(&self) -> usize {
        self.cells.first().map_or(0, Lottery::len)
    }

    pub fn get(&self, s: usize, t: usize) -> &Lottery {
        &self.cells[s * self.n + t]
    }

    pub fn is_s_measurable(&self) -> bool {
        (0..self.k).all(|s| (1..self.n).all(|t| self.get(s, t) == self.get(s, 0)))
    }

    /// Pointwise mixture `w·self + (1−w)·other`.
    pub fn mix(&self, other: &Act, w: f64) -> Result<Act> {
        self.check_shape(other)?;
        Act::new(
            self.k,
            self.n,
            self.cells
                .iter()
                .zip(&other.cells)
                .map(|(a, b)| a.mix(b, w))
                .collect(),
        )
    }

    /// `self_A other`: takes `self` on cells where `in_event` holds, `other` elsewhere.
    pub fn splice(&self, other: &Act, in_event: impl Fn(usize, usize) -> bool) -> Result<Act> {
        self.check_shape(other)?;
        Act::from_fn(self.k, self.n, |s, t| {
            if in_event(s, t) {
                self.get(s, t).clone()
            } else {
                other.get(s, t).clone()
            }
        })
    }

    fn check_shape(&self, other: &Act) -> Result<()> {
        if self.k != other.k || self.n != other.n {
            return Err(ModelError::DimensionMismatch {
                what: "act shape",
                expected: self.k * self.n,
                found: other.k * other.n,
            });
        }
        Ok(())
    }
}

/// State-dependent vNM utility `v[s][t][x]`.
#[derive(Debug, Clone, PartialEq)]
pub struct UtilityTensor {
    k: usize,
    n: usize,
    m: usize,
    values: Vec<f64>,
}

impl UtilityTensor {
    pub fn new(k: usize, n: usize, m: usize, values: Vec<f64>) -> Result<Self> {
        if m < 2 {
            return Err(ModelError::TooFewPrizes(m));
        }
        if values.len() != k * n * m {
            return Err(ModelError::DimensionMismatch {
                what: "utility tensor",
                expected: k * n * m,
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(ModelError::NonFiniteUtility);
        }
        Ok(Self { k, n, m, values })
    }

    pub fn from_nested(v: &[Vec<Vec<f64>>]) -> Result<Self> {
        let k = v.len();
        let n = v.first().map_or(0, Vec::len);
        let m = v.first().and_then(|r| r.first()).map_or(0, Vec::len);
        let mut values = Vec::with_capacity(k * n * m);
        for row in v {
            if row.len() != n {
                return Err(ModelError::DimensionMismatch {
                    what: "utility proxy axis",
                    expected: n,
                    found: row.len(),
                });
            }
            for cell in row {
                if cell.len() != m {
                    return Err(ModelError::DimensionMismatch {
                        what: "utility prize axis",
                        expected: m,
                        found: cell.len(),
                    });
                }
                values.extend_from_slice(cell);
            }
        }
        Self::new(k, n, m, values)
    }

    /// Utility that depends on `s` only: `per_state[s]` is copied to every `t`.
    pub fn s_measurable(per_state: &[Vec<f64>], n: usize) -> Result<Self> {
        let nested: Vec<Vec<Vec<f64>>> = per_state.iter().map(|v| vec![v.clone(); n]).collect();
        Self::from_nested(&nested)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn prizes(&self) -> usize {
        self.m
    }

    pub fn vnm(&self, s: usize, t: usize) -> &[f64] {
        let start = (s * self.n + t) * self.m;
        &self.values[start..start + self.m]
    }

    pub fn to_nested(&self) -> Vec<Vec<Vec<f64>>> {
        (0..self.k)
            .map(|s| (0..self.n).map(|t| self.vnm(s, t).to_vec()).collect())
            .collect()
    }

    /// `u_{s,t}(q) = Σ_x q(x) v_{s,t}(x)`.
    pub fn utility(&self, s: usize, t: usize, q: &Lottery) -> f64 {
        self.vnm(s, t).iter().zip(q.probs()).map(|(v, p)| v * p).sum()
    }

    /// True when `v_{s,t}` does not vary with `t`, up to `tol` per entry.
    pub fn is_s_measurable(&self, tol: f64) -> bool {
        (0..self.k).all(|s| {
            (1..self.n).all(|t| {
                self.vnm(s, t)
                    .iter()
                    .zip(self.vnm(s, 0))
                    .all(|(a, b)| (a - b).abs() <= tol)
            })
        })
    }

    /// Applies `v ↦ a_s + b_s·v` per state.
    pub fn affine_per_state(&self, shift: &[f64], scale: &[f64]) -> UtilityTensor {
        let mut values = self.values.clone();
        for (i, v) in values.iter_mut().enumerate() {
            let s = i / (self.n * self.m);
            *v = shift[s] + scale[s] * *v;
        }
        UtilityTensor { values, ..*self }
    }
}

/// A state-dependent SEU representation `(v, π)` on `S × T`.
#[derive(Debug, Clone, PartialEq)]
pub struct SEURep {
    utility: UtilityTensor,
    belief: JointBelief,
}

impl SEURep {
    pub fn new(utility: UtilityTensor, belief: JointBelief) -> Result<Self> {
        if utility.k != belief.k() {
            return Err(ModelError::DimensionMismatch {
                what: "representation states",
                expected: belief.k(),
                found: utility.k,
            });
        }
        if utility.n != belief.n() {
            return Err(ModelError::DimensionMismatch {
                what: "representation proxy cells",
                expected: belief.n(),
                found: utility.n,
            });
        }
        Ok(Self { utility, belief })
    }

    /// Representation on `S` alone, encoded with a one-cell proxy.
    pub fn over_states(per_state: &[Vec<f64>], belief: &Dist) -> Result<Self> {
        let utility = UtilityTensor::s_measurable(per_state, 1)?;
        let table = belief.probs().iter().map(|&p| vec![p]).collect();
        let joint = JointBelief::new(belief.labels().to_vec(), vec!["t".into()], table)?;
        Self::new(utility, joint)
    }

    pub fn utility(&self) -> &UtilityTensor {
        &self.utility
    }

    pub fn belief(&self) -> &JointBelief {
        &self.belief
    }

    pub fn k(&self) -> usize {
        self.belief.k()
    }

    pub fn n(&self) -> usize {
        self.belief.n()
    }

    pub fn prizes(&self) -> usize {
        self.utility.m
    }

    pub fn expected_utility(&self, f: &Act) -> Result<f64> {
        expected_utility(self, f)
    }
}

/// `Σ_{s,t} π(s,t) Σ_x f_{s,t}(x) v_{s,t}(x)`.
pub fn expected_utility(rep: &SEURep, f: &Act) -> Result<f64> {
    if f.k() != rep.k() || f.n() != rep.n() {
        return Err(ModelError::DimensionMismatch {
            what: "act shape",
            expected: rep.k() * rep.n(),
            found: f.k() * f.n(),
        });
    }
    if f.prizes() != rep.prizes() {
        return Err(ModelError::DimensionMismatch {
            what: "act prize count",
            expected: rep.prizes(),
            found: f.prizes(),
        });
    }
    let mut total = 0.0;
    for s in 0..rep.k() {
        for t in 0..rep.n() {
            total += rep.belief.get(s, t) * rep.utility.utility(s, t, f.get(s, t));
        }
    }
    Ok(total)
}

/// A nonempty set of proxy cells, kept as sorted indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    members: Vec<usize>,
}

impl Event {
    pub fn new(mut members: Vec<usize>, universe: usize) -> Result<Self> {
        members.sort_unstable();
        members.dedup();
        if members.is_empty() {
            return Err(ModelError::EmptyEvent);
        }
        if let Some(&bad) = members.iter().find(|&&i| i >= universe) {
            return Err(ModelError::UnknownLabel(format!("#{bad}")));
        }
        Ok(Self { members })
    }

    pub fn from_labels<S: AsRef<str>>(labels: &[String], names: &[S]) -> Result<Self> {
        let members = names
            .iter()
            .map(|name| {
                let name = name.as_ref();
                labels
                    .iter()
                    .position(|l| l == name)
                    .ok_or_else(|| ModelError::UnknownLabel(name.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(members, labels.len())
    }

    /// The whole proxy space.
    pub fn all(universe: usize) -> Result<Self> {
        Self::new((0..universe).collect(), universe)
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.binary_search(&i).is_ok()
    }
}

/// Marginals `π_S`, `π_T` and the conditional family `Π` of a joint belief.
pub fn marginals_and_conditionals(j: &JointBelief) -> Result<(Dist, Dist, ConditionalFamily)> {
    let pi_s = Dist::new(j.s_labels.clone(), j.marginal_s())?;
    let pi_t = Dist::new(j.t_labels.clone(), j.marginal_t())?;
    let rows = (0..j.k()).map(|s| j.conditional_row(s)).collect();
    let family = ConditionalFamily::new(j.s_labels.clone(), j.t_labels.clone(), rows)?;
    Ok((pi_s, pi_t, family))
}

/// Chain rule `π(s,t) = π_S(s)·π_T(t|s)`.
///
/// Zero entries of `Π` produce null cells in the result; callers that need
/// full support should check [`JointBelief::has_full_support`].
pub fn joint_from(pi_s: &Dist, family: &ConditionalFamily) -> Result<JointBelief> {
    if pi_s.len() != family.k() {
        return Err(ModelError::DimensionMismatch {
            what: "prior vs conditional rows",
            expected: family.k(),
            found: pi_s.len(),
        });
    }
    if let Some(state) = pi_s.probs().iter().position(|&p| p <= EPS_PROB) {
        return Err(ModelError::ZeroMarginal { state });
    }
    let table = family
        .rows()
        .iter()
        .zip(pi_s.probs())
        .map(|(row, &w)| row.iter().map(|p| w * p).collect())
        .collect();
    JointBelief::allowing_null_cells(family.s_labels.clone(), family.t_labels.clone(), table)
}

/// `π_S(s | E) = π({s} × E) / π(S × E)`.
pub fn condition_on_event(j: &JointBelief, event: &Event) -> Result<Dist> {
    if let Some(&bad) = event.members().iter().find(|&&t| t >= j.n()) {
        return Err(ModelError::UnknownLabel(format!("#{bad}")));
    }
    if event.members().len() == j.n() {
        return Dist::new(j.s_labels.clone(), j.marginal_s());
    }
    let mass: Vec<f64> = (0..j.k())
        .map(|s| event.members().iter().map(|&t| j.get(s, t)).sum())
        .collect();
    let total: f64 = mass.iter().sum();
    if total <= 0.0 {
        return Err(ModelError::NullEvent);
    }
    Dist::new(j.s_labels.clone(), mass.into_iter().map(|m| m / total).collect())
}
