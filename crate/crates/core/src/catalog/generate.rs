use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::machine::{GateProperties, MachineProperties, MachineStatus, QubitProperties};

pub const SYNTHETIC_CALIBRATION_TIME: &str = "2026-01-01T00:00:00Z";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    Line,
    Ring,
    Grid { rows: usize, cols: usize },
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Topology::Line => f.write_str("line"),
            Topology::Ring => f.write_str("ring"),
            Topology::Grid { rows, cols } => write!(f, "grid{rows}x{cols}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GenerateError {
    #[error("invalid topology '{0}' (expected line, ring or grid<R>x<C>)")]
    UnknownTopology(String),
    #[error("grid {rows}x{cols} does not hold {n_qubits} qubits")]
    GridMismatch { rows: usize, cols: usize, n_qubits: usize },
    #[error("machine needs at least one qubit")]
    NoQubits,
    #[error("noise scale must be a finite value >= 0, got {0}")]
    BadNoiseScale(f64),
}

impl FromStr for Topology {
    type Err = GenerateError;

    /// `line`, `ring`, or `grid<R>x<C>` (e.g. `grid2x3`).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || GenerateError::UnknownTopology(s.to_string());
        match s {
            "line" => Ok(Topology::Line),
            "ring" => Ok(Topology::Ring),
            _ => {
                let dims = s.strip_prefix("grid").ok_or_else(bad)?;
                let (r, c) = dims.split_once('x').ok_or_else(bad)?;
                Ok(Topology::Grid {
                    rows: r.parse().map_err(|_| bad())?,
                    cols: c.parse().map_err(|_| bad())?,
                })
            }
        }
    }
}

impl Topology {
    /// Undirected edges, each once with the lower index first.
    pub fn edges(self, n: usize) -> Result<Vec<(usize, usize)>, GenerateError> {
        let mut edges = Vec::new();
        match self {
            Topology::Line => edges.extend((1..n).map(|i| (i - 1, i))),
            Topology::Ring => {
                edges.extend((1..n).map(|i| (i - 1, i)));
                if n > 2 {
                    edges.push((0, n - 1));
                }
            }
            Topology::Grid { rows, cols } => {
                if rows * cols != n {
                    return Err(GenerateError::GridMismatch { rows, cols, n_qubits: n });
                }
                for r in 0..rows {
                    for c in 0..cols {
                        let q = r * cols + c;
                        if c + 1 < cols {
                            edges.push((q, q + 1));
                        }
                        if r + 1 < rows {
                            edges.push((q, q + cols));
                        }
                    }
                }
            }
        }
        Ok(edges)
    }
}

/// Deterministic synthetic machine with basis {cx, rz, sx, x}.
///
/// All random draws happen regardless of `noise_scale`, so for a fixed seed
/// every error is the same base draw times the scale (clamped to [0, 1]).
pub fn generate_machine(
    seed: u64,
    n_qubits: usize,
    topology: Topology,
    noise_scale: f64,
) -> Result<MachineProperties, GenerateError> {
    if n_qubits == 0 {
        return Err(GenerateError::NoQubits);
    }
    if !(noise_scale >= 0.0 && noise_scale.is_finite()) {
        return Err(GenerateError::BadNoiseScale(noise_scale));
    }
    let edges = topology.edges(n_qubits)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scaled = |base: f64| (base * noise_scale).clamp(0.0, 1.0);

    let mut qubits = Vec::with_capacity(n_qubits);
    for _ in 0..n_qubits {
        let t1_us = rng.random_range(50.0..150.0);
        let t2_us = t1_us * rng.random_range(0.3..1.5);
        let frequency_ghz = rng.random_range(4.5..5.5);
        let readout_error = scaled(rng.random_range(1e-2..4e-2));
        qubits.push(QubitProperties {
            t1_us,
            t2_us,
            frequency_ghz,
            readout_error,
        });
    }

    let mut gates = Vec::new();
    for q in 0..n_qubits {
        gates.push(GateProperties {
            kind: "rz".into(),
            qubits: vec![q],
            error: 0.0,
            duration_ns: 0.0,
        });
        for kind in ["sx", "x"] {
            let error = scaled(rng.random_range(1e-4..1e-3));
            gates.push(GateProperties {
                kind: kind.into(),
                qubits: vec![q],
                error,
                duration_ns: 35.5,
            });
        }
    }
    let mut coupling_map = Vec::with_capacity(edges.len() * 2);
    for &(a, b) in &edges {
        for (c, t) in [(a, b), (b, a)] {
            coupling_map.push((c, t));
            let error = scaled(rng.random_range(5e-3..2e-2));
            let duration_ns = rng.random_range(200.0..500.0_f64).round();
            gates.push(GateProperties {
                kind: "cx".into(),
                qubits: vec![c, t],
                error,
                duration_ns,
            });
        }
    }
    coupling_map.sort_unstable();

    Ok(MachineProperties {
        name: format!("synthetic_{topology}_{n_qubits}q_s{seed}"),
        n_qubits,
        status: MachineStatus {
            operational: true,
            pending_jobs: rng.random_range(0..20),
            last_calibrated: SYNTHETIC_CALIBRATION_TIME.into(),
        },
        coupling_map,
        qubits,
        gates,
        basis_gates: vec!["cx".into(), "rz".into(), "sx".into(), "x".into()],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        let a = generate_machine(7, 3, Topology::Line, 1.0).unwrap();
        let b = generate_machine(7, 3, Topology::Line, 1.0).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        let c = generate_machine(8, 3, Topology::Line, 1.0).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn zero_scale_has_no_errors() {
        let m = generate_machine(7, 3, Topology::Line, 0.0).unwrap();
        assert!(m.gates.iter().all(|g| g.error == 0.0));
        assert!(m.qubits.iter().all(|q| q.readout_error == 0.0));
    }

    #[test]
    fn line_coupling() {
        let m = generate_machine(7, 3, Topology::Line, 1.0).unwrap();
        assert_eq!(m.coupling_map, vec![(0, 1), (1, 0), (1, 2), (2, 1)]);
    }

    #[test]
    fn ring_and_grid() {
        let ring = generate_machine(1, 4, Topology::Ring, 1.0).unwrap();
        assert_eq!(ring.coupling_map.len(), 8);
        assert!(ring.has_edge(3, 0));
        let grid = generate_machine(1, 6, Topology::Grid { rows: 2, cols: 3 }, 1.0).unwrap();
        assert_eq!(grid.coupling_map.len(), 14);
        assert!(grid.has_edge(1, 4) && !grid.has_edge(2, 3));
        assert!(grid.validate().is_empty());
        assert!(matches!(
            generate_machine(1, 5, Topology::Grid { rows: 2, cols: 3 }, 1.0),
            Err(GenerateError::GridMismatch { .. })
        ));
    }

    #[test]
    fn error_ranges() {
        let m = generate_machine(3, 5, Topology::Ring, 1.0).unwrap();
        for g in &m.gates {
            match (g.kind.as_str(), g.qubits.len()) {
                ("rz", _) => assert_eq!(g.error, 0.0),
                (_, 1) => assert!((1e-4..1e-3).contains(&g.error)),
                (_, 2) => assert!((5e-3..2e-2).contains(&g.error)),
                _ => unreachable!(),
            }
        }
        assert!(m.qubits.iter().all(|q| (1e-2..4e-2).contains(&q.readout_error)));
    }

    #[test]
    fn scale_monotonic() {
        let scales = [0.0, 0.5, 1.0, 2.0, 10.0, 100.0];
        for seed in 0..5 {
            let means: Vec<f64> = scales
                .iter()
                .map(|&s| generate_machine(seed, 4, Topology::Line, s).unwrap().mean_gate_error())
                .collect();
            assert!(means.windows(2).all(|w| w[0] <= w[1]), "{means:?}");
        }
    }

    #[test]
    fn topology_parsing() {
        assert_eq!("line".parse::<Topology>().unwrap(), Topology::Line);
        assert_eq!("grid2x3".parse::<Topology>().unwrap(), Topology::Grid { rows: 2, cols: 3 });
        assert!("star".parse::<Topology>().is_err());
        assert!(generate_machine(0, 0, Topology::Line, 1.0).is_err());
        assert!(generate_machine(0, 2, Topology::Line, -1.0).is_err());
    }
}
