use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use super::{statevector, SimError};
use crate::circuit::{Circuit, GateKind};

/// Stream id reserved for shot sampling; error-adjustment trials use streams `0..trials`.
pub(crate) const SAMPLING_STREAM: u64 = u64::MAX;

/// Measurement histogram. Keys are bitstrings over the classical register,
/// most-significant bit first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counts {
    pub shots: u64,
    pub counts: BTreeMap<String, u64>,
}

impl Counts {
    pub fn new(counts: BTreeMap<String, u64>) -> Self {
        Self {
            shots: counts.values().sum(),
            counts,
        }
    }

    pub fn get(&self, bitstring: &str) -> u64 {
        self.counts.get(bitstring).copied().unwrap_or(0)
    }

    /// Common key length, if keys are present and agree.
    pub fn bit_width(&self) -> Option<usize> {
        let mut widths = self.counts.keys().map(String::len);
        let first = widths.next()?;
        widths.all(|w| w == first).then_some(first)
    }
}

pub fn format_bitstring(value: usize, width: usize) -> String {
    (0..width)
        .rev()
        .map(|b| if value >> b & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Distribution over classical-register values implied by the circuit's measurements.
pub fn outcome_distribution(circuit: &Circuit) -> Result<BTreeMap<usize, f64>, SimError> {
    let wiring: Vec<(usize, usize)> = circuit
        .gates
        .iter()
        .filter(|g| g.kind == GateKind::Measure)
        .map(|g| (g.qubits[0], g.clbits[0]))
        .collect();
    if wiring.is_empty() {
        return Err(SimError::NoMeasuredQubits);
    }
    let state = statevector(circuit)?;
    let mut dist = BTreeMap::new();
    for (index, p) in state.probabilities().into_iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let mut value = 0usize;
        for &(q, c) in &wiring {
            let bit = index >> q & 1;
            value = (value & !(1 << c)) | (bit << c);
        }
        *dist.entry(value).or_insert(0.0) += p;
    }
    Ok(dist)
}

/// Multinomial shot sampling of the measured outcome distribution; deterministic per seed.
pub fn sample_counts(circuit: &Circuit, shots: u64, seed: u64) -> Result<Counts, SimError> {
    let dist = outcome_distribution(circuit)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(SAMPLING_STREAM);

    let mut counts = BTreeMap::new();
    let mut remaining = shots;
    let mut mass_left: f64 = dist.values().sum();
    let last = dist.len() - 1;
    for (i, (&value, &p)) in dist.iter().enumerate() {
        if remaining == 0 {
            break;
        }
        let k = if i == last {
            remaining
        } else {
            let q = (p / mass_left).clamp(0.0, 1.0);
            Binomial::new(remaining, q)
                .expect("probability clamped to [0,1]")
                .sample(&mut rng)
        };
        mass_left -= p;
        remaining -= k;
        if k > 0 {
            counts.insert(format_bitstring(value, circuit.n_clbits), k);
        }
    }
    Ok(Counts { shots, counts })
}
