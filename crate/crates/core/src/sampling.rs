//! Exact outcome distributions, seeded multinomial shot sampling and the
//! Bhattacharyya fidelity between discrete distributions.
//!
//! # Determinism contract
//!
//! Sampling uses ChaCha8 (`rand_chacha::ChaCha8Rng`), a documented,
//! cross-platform, counter-based stream cipher generator. Shot `s` of a run
//! with seed `seed` takes its draws from the stream
//! `ChaCha8Rng::seed_from_u64(seed)` with `set_stream(s)`; the first uniform
//! f64 of that stream selects the outcome by inverse CDF over basis indices
//! in ascending order. OS entropy is never consulted. Because every shot
//! owns an independent substream, any partition of shots across workers
//! merges to the same histogram; worker count 1 is the reference layout.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::StateVector;

/// Probabilities below this are omitted from rendered distributions; small
/// enough that 2^20 dropped entries stay inside the 1e-10 sum invariant.
const OMIT_BELOW: f64 = 1e-18;

/// A probability distribution over outcome bitstrings. Keys are '0'/'1'
/// strings, values sum to 1 within 1e-10 (exact zeros may be omitted).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Distribution {
    probs: BTreeMap<String, f64>,
}

impl Distribution {
    pub fn from_probs(probs: BTreeMap<String, f64>) -> Result<Self> {
        let mut total = 0.0;
        let mut key_len = None;
        for (k, &p) in &probs {
            if !(0.0..=1.0 + 1e-12).contains(&p) {
                return Err(Error::BadDistribution(format!(
                    "probability {p} for '{k}' outside [0, 1]"
                )));
            }
            if k.is_empty() || !k.bytes().all(|b| b == b'0' || b == b'1') {
                return Err(Error::BadDistribution(format!(
                    "'{k}' is not a bitstring key"
                )));
            }
            match key_len {
                None => key_len = Some(k.len()),
                Some(l) if l != k.len() => {
                    return Err(Error::BadDistribution("mixed bitstring lengths".into()))
                }
                _ => {}
            }
            total += p;
        }
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::BadDistribution(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(Distribution { probs })
    }

    pub fn probs(&self) -> &BTreeMap<String, f64> {
        &self.probs
    }

    /// Probability of an outcome, zero for missing keys.
    pub fn get(&self, key: &str) -> f64 {
        self.probs.get(key).copied().unwrap_or(0.0)
    }
}

/// Counted outcomes of a seeded sampling run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeHistogram {
    pub shots: u64,
    pub seed: u64,
    pub counts: BTreeMap<String, u64>,
}

impl OutcomeHistogram {
    /// counts / shots, key set unchanged.
    pub fn frequencies(&self) -> BTreeMap<String, f64> {
        self.counts
            .iter()
            .map(|(k, &c)| (k.clone(), c as f64 / self.shots as f64))
            .collect()
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    /// JSON object {shots, seed, counts:{bitstring: int}}.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("histogram serialization cannot fail")
    }

    /// CSV with header `outcome,count,frequency`, lexicographic key order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("outcome,count,frequency\n");
        for (k, &c) in &self.counts {
            out.push_str(&format!("{k},{c},{}\n", c as f64 / self.shots as f64));
        }
        out
    }
}

/// Render one basis index as a bitstring in the given display order (first
/// listed qubit becomes the leftmost character).
pub fn render_bitstring(index: usize, order: &[usize]) -> String {
    order
        .iter()
        .map(|&q| if index >> q & 1 == 1 { '1' } else { '0' })
        .collect()
}

fn check_order(state: &StateVector, order: &[usize]) -> Result<()> {
    let n = state.num_qubits();
    let mut seen = vec![false; n];
    for &q in order {
        if q >= n || seen[q] {
            return Err(Error::BadDisplayOrder);
        }
        seen[q] = true;
    }
    if order.len() != n {
        return Err(Error::BadDisplayOrder);
    }
    Ok(())
}

/// Born probabilities |amplitude|² of a state, rendered per display order.
pub fn exact_distribution(state: &StateVector, order: &[usize]) -> Result<Distribution> {
    check_order(state, order)?;
    let mut probs = BTreeMap::new();
    for (index, amp) in state.amplitudes().iter().enumerate() {
        let p = amp.norm_sqr();
        if p >= OMIT_BELOW {
            probs.insert(render_bitstring(index, order), p);
        }
    }
    Distribution::from_probs(probs)
}

/// Per-shot uniform draw from the shot's own ChaCha8 substream; see the
/// module docs for the exact discipline.
pub(crate) fn shot_rng(seed: u64, shot: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shot);
    rng
}

/// Inverse-CDF outcome selection: the first basis index whose cumulative
/// probability exceeds the draw, clamped so a cumulative total a hair under
/// 1.0 cannot run off the end.
pub(crate) fn draw_outcome(cumulative: &[f64], u: f64) -> usize {
    cumulative
        .partition_point(|&c| c <= u)
        .min(cumulative.len() - 1)
}

pub(crate) fn cumulative_probabilities(state: &StateVector) -> Vec<f64> {
    let mut acc = 0.0;
    state
        .amplitudes()
        .iter()
        .map(|a| {
            acc += a.norm_sqr();
            acc
        })
        .collect()
}

/// Multinomial sampling of `shots` outcomes from the exact distribution of
/// `state`. Identical (state, shots, seed, order) always reproduces the
/// identical histogram.
pub fn sample(
    state: &StateVector,
    shots: u64,
    seed: u64,
    order: &[usize],
) -> Result<OutcomeHistogram> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    check_order(state, order)?;
    let cumulative = cumulative_probabilities(state);
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for shot in 0..shots {
        let u: f64 = shot_rng(seed, shot).random();
        let outcome = draw_outcome(&cumulative, u);
        *counts.entry(render_bitstring(outcome, order)).or_insert(0) += 1;
    }
    Ok(OutcomeHistogram {
        shots,
        seed,
        counts,
    })
}

/// Bhattacharyya coefficient B = Σ_i √(p_i q_i) over the union of keys;
/// missing keys count as zero. Inputs are used as given — no renormalization
/// — so frequencies that only sum to ≈1 keep their printed values.
pub fn bhattacharyya(p: &BTreeMap<String, f64>, q: &BTreeMap<String, f64>) -> Result<f64> {
    for (name, map) in [("p", p), ("q", q)] {
        if let Some((k, &v)) = map.iter().find(|(_, &v)| v < 0.0 || !v.is_finite()) {
            return Err(Error::BadDistribution(format!(
                "{name}['{k}'] = {v} is not a valid weight"
            )));
        }
    }
    Ok(p.iter()
        .filter_map(|(k, &pv)| q.get(k).map(|&qv| (pv * qv).sqrt()))
        .sum())
}
