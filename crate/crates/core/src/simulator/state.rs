use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use num_complex::Complex64;

use super::SimError;
use crate::circuit::{Circuit, GateInstance, GateKind, PauliObservable};

pub const MAX_SIM_QUBITS: usize = 16;

type Mat2 = [[Complex64; 2]; 2];

const fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Pure state over `n_qubits`, amplitude index bit `q` = qubit `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl State {
    pub fn zero(n_qubits: usize) -> Self {
        let mut amps = vec![c(0.0, 0.0); 1 << n_qubits];
        amps[0] = c(1.0, 0.0);
        Self { n_qubits, amps }
    }

    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amps = vec![c(0.0, 0.0); 1 << n_qubits];
        amps[index] = c(1.0, 0.0);
        Self { n_qubits, amps }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(Complex64::norm_sqr).collect()
    }

    /// Probability of the basis state written as a bitstring, most-significant qubit first.
    pub fn probability_of(&self, bitstring: &str) -> f64 {
        let idx = usize::from_str_radix(bitstring, 2).expect("binary bitstring");
        self.amps[idx].norm_sqr()
    }

    fn apply_1q(&mut self, m: &Mat2, q: usize) {
        let bit = 1usize << q;
        for i in 0..self.amps.len() {
            if i & bit == 0 {
                let a0 = self.amps[i];
                let a1 = self.amps[i | bit];
                self.amps[i] = m[0][0] * a0 + m[0][1] * a1;
                self.amps[i | bit] = m[1][0] * a0 + m[1][1] * a1;
            }
        }
    }

    fn apply_controlled_x(&mut self, controls: &[usize], target: usize) {
        let cmask: usize = controls.iter().map(|q| 1usize << q).sum();
        let tbit = 1usize << target;
        for i in 0..self.amps.len() {
            if i & cmask == cmask && i & tbit == 0 {
                self.amps.swap(i, i | tbit);
            }
        }
    }

    fn apply_cz(&mut self, a: usize, b: usize) {
        let mask = (1usize << a) | (1usize << b);
        for (i, amp) in self.amps.iter_mut().enumerate() {
            if i & mask == mask {
                *amp = -*amp;
            }
        }
    }

    fn apply_swap(&mut self, a: usize, b: usize) {
        let (ba, bb) = (1usize << a, 1usize << b);
        for i in 0..self.amps.len() {
            if i & ba != 0 && i & bb == 0 {
                self.amps.swap(i, (i & !ba) | bb);
            }
        }
    }

    /// Applies one gate. Measurement and barrier leave the state unchanged.
    pub fn apply(&mut self, gate: &GateInstance) {
        let q = &gate.qubits;
        match gate.kind {
            GateKind::Cx => self.apply_controlled_x(&q[..1], q[1]),
            GateKind::Ccx | GateKind::Mcx => {
                let (target, controls) = q.split_last().expect("non-empty");
                self.apply_controlled_x(controls, *target);
            }
            GateKind::Cz => self.apply_cz(q[0], q[1]),
            GateKind::Swap => self.apply_swap(q[0], q[1]),
            GateKind::Barrier | GateKind::Measure => {}
            kind => {
                let m = single_qubit_matrix(kind, &gate.params);
                self.apply_1q(&m, q[0]);
            }
        }
    }

    /// Applies `H` on X positions and `S†` then `H` on Y positions, so the
    /// observable becomes diagonal in the computational basis.
    fn rotate_to_z_basis(&mut self, obs: &PauliObservable) {
        let h = single_qubit_matrix(GateKind::H, &[]);
        let sdg = single_qubit_matrix(GateKind::Sdg, &[]);
        for q in 0..self.n_qubits {
            match obs.pauli_on(q) {
                'X' => self.apply_1q(&h, q),
                'Y' => {
                    self.apply_1q(&sdg, q);
                    self.apply_1q(&h, q);
                }
                _ => {}
            }
        }
    }
}

fn single_qubit_matrix(kind: GateKind, params: &[f64]) -> Mat2 {
    let s = FRAC_1_SQRT_2;
    match kind {
        GateKind::H => [[c(s, 0.0), c(s, 0.0)], [c(s, 0.0), c(-s, 0.0)]],
        GateKind::X => [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]],
        GateKind::Y => [[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]],
        GateKind::Z => [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]],
        GateKind::S => phase(std::f64::consts::FRAC_PI_2),
        GateKind::Sdg => phase(-std::f64::consts::FRAC_PI_2),
        GateKind::T => phase(FRAC_PI_4),
        GateKind::Tdg => phase(-FRAC_PI_4),
        GateKind::Sx => [[c(0.5, 0.5), c(0.5, -0.5)], [c(0.5, -0.5), c(0.5, 0.5)]],
        GateKind::Rx => {
            let (sn, cs) = (params[0] * 0.5).sin_cos();
            [[c(cs, 0.0), c(0.0, -sn)], [c(0.0, -sn), c(cs, 0.0)]]
        }
        GateKind::Ry => {
            let (sn, cs) = (params[0] * 0.5).sin_cos();
            [[c(cs, 0.0), c(-sn, 0.0)], [c(sn, 0.0), c(cs, 0.0)]]
        }
        GateKind::Rz => {
            let t = params[0] * 0.5;
            [
                [Complex64::from_polar(1.0, -t), c(0.0, 0.0)],
                [c(0.0, 0.0), Complex64::from_polar(1.0, t)],
            ]
        }
        other => unreachable!("{other} is not a single-qubit unitary"),
    }
}

fn phase(theta: f64) -> Mat2 {
    [
        [c(1.0, 0.0), c(0.0, 0.0)],
        [c(0.0, 0.0), Complex64::from_polar(1.0, theta)],
    ]
}

/// Evolves `|0...0>` through the circuit, ignoring measurements.
pub fn statevector(circuit: &Circuit) -> Result<State, SimError> {
    if circuit.n_qubits > MAX_SIM_QUBITS {
        return Err(SimError::TooManyQubits {
            n_qubits: circuit.n_qubits,
            max: MAX_SIM_QUBITS,
        });
    }
    let mut state = State::zero(circuit.n_qubits);
    for g in &circuit.gates {
        state.apply(g);
    }
    Ok(state)
}

/// `<psi|P|psi>` scaled by the observable's coefficient.
pub fn pauli_expectation(circuit: &Circuit, obs: &PauliObservable) -> Result<f64, SimError> {
    obs.check(circuit.n_qubits)
        .map_err(|e| SimError::Observable(e.to_string()))?;
    let mut state = statevector(circuit)?;
    state.rotate_to_z_basis(obs);
    let mask: usize = (0..circuit.n_qubits)
        .filter(|&q| obs.pauli_on(q) != 'I')
        .map(|q| 1usize << q)
        .sum();
    let value: f64 = state
        .amps
        .iter()
        .enumerate()
        .map(|(i, a)| {
            let sign = if (i & mask).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
            sign * a.norm_sqr()
        })
        .sum();
    Ok(obs.coefficient * value)
}
