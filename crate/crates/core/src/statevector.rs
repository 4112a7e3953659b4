//! Exact, noise-free statevector simulation over the gate set
//! `{H, X, Z, P(phi), CX, CCX}`.
//!
//! Amplitudes are indexed little-endian: bit `q` of the basis index is the
//! value of qubit `q`.

use std::fmt;

use num_complex::Complex;

use crate::error::{domain, QseraError, Result};
use crate::scalar::Scalar;

/// Largest simulable register.
pub const MAX_QUBITS: usize = 26;

/// Primitive gates. Multi-controlled operations are not primitives; they are
/// assembled from `CCX` ladders by the circuit builders.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate<T> {
    H(usize),
    X(usize),
    Z(usize),
    /// `P(phi)|1> = e^{i phi}|1>`, `P(phi)|0> = |0>`.
    Phase(usize, T),
    CX {
        control: usize,
        target: usize,
    },
    CCX {
        control1: usize,
        control2: usize,
        target: usize,
    },
}

impl<T: Scalar> Gate<T> {
    pub fn qubits(&self) -> Vec<usize> {
        match *self {
            Gate::H(q) | Gate::X(q) | Gate::Z(q) | Gate::Phase(q, _) => vec![q],
            Gate::CX { control, target } => vec![control, target],
            Gate::CCX {
                control1,
                control2,
                target,
            } => vec![control1, control2, target],
        }
    }

    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        let qs = self.qubits();
        if let Some(&q) = qs.iter().find(|&&q| q >= num_qubits) {
            return domain(format!(
                "{self}: qubit {q} out of range for {num_qubits} qubits"
            ));
        }
        for (i, a) in qs.iter().enumerate() {
            if qs[i + 1..].contains(a) {
                return domain(format!("{self}: repeated qubit {a}"));
            }
        }
        if let Gate::Phase(_, phi) = self {
            if !phi.is_finite() {
                return domain(format!("{self}: non-finite phase"));
            }
        }
        Ok(())
    }

    pub fn cast<U: Scalar>(&self) -> Gate<U> {
        match *self {
            Gate::H(q) => Gate::H(q),
            Gate::X(q) => Gate::X(q),
            Gate::Z(q) => Gate::Z(q),
            Gate::Phase(q, phi) => Gate::Phase(q, U::lit(phi.to_f64_lossy())),
            Gate::CX { control, target } => Gate::CX { control, target },
            Gate::CCX {
                control1,
                control2,
                target,
            } => Gate::CCX {
                control1,
                control2,
                target,
            },
        }
    }
}

impl<T: Scalar> fmt::Display for Gate<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::H(q) => write!(f, "H {q}"),
            Gate::X(q) => write!(f, "X {q}"),
            Gate::Z(q) => write!(f, "Z {q}"),
            Gate::Phase(q, phi) => write!(f, "P {q} {phi}"),
            Gate::CX { control, target } => write!(f, "CX {control} {target}"),
            Gate::CCX {
                control1,
                control2,
                target,
            } => write!(f, "CCX {control1} {control2} {target}"),
        }
    }
}

/// Ordered gate list over a fixed qubit count.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit<T> {
    num_qubits: usize,
    gates: Vec<Gate<T>>,
}

impl<T: Scalar> Circuit<T> {
    pub fn new(num_qubits: usize) -> Self {
        Self {
            num_qubits,
            gates: Vec::new(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate<T>] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate<T>) -> Result<()> {
        gate.validate(self.num_qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    /// Appends every gate of `other`.
    pub fn append(&mut self, other: &Circuit<T>) -> Result<()> {
        if other.num_qubits != self.num_qubits {
            return domain(format!(
                "cannot append a {}-qubit circuit to a {}-qubit circuit",
                other.num_qubits, self.num_qubits
            ));
        }
        self.gates.extend_from_slice(&other.gates);
        Ok(())
    }

    /// Line-oriented listing: `qubits <Q>` then one gate per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("qubits {}\n", self.num_qubits);
        for g in &self.gates {
            s.push_str(&g.to_string());
            s.push('\n');
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (ln, header) = lines
            .next()
            .ok_or_else(|| QseraError::Parse("empty circuit listing".into()))?;
        let num_qubits = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["qubits", q] => parse_usize(q, ln)?,
            _ => {
                return Err(QseraError::Parse(format!(
                    "line {ln}: expected `qubits <Q>` header"
                )))
            }
        };
        let mut circuit = Self::new(num_qubits);
        for (ln, line) in lines {
            let toks: Vec<&str> = line.split_whitespace().collect();
            let gate = match toks.as_slice() {
                ["H", q] => Gate::H(parse_usize(q, ln)?),
                ["X", q] => Gate::X(parse_usize(q, ln)?),
                ["Z", q] => Gate::Z(parse_usize(q, ln)?),
                ["P", q, phi] => {
                    let phi: f64 = phi
                        .parse()
                        .map_err(|_| QseraError::Parse(format!("line {ln}: bad phase `{phi}`")))?;
                    Gate::Phase(parse_usize(q, ln)?, T::lit(phi))
                }
                ["CX", c, t] => Gate::CX {
                    control: parse_usize(c, ln)?,
                    target: parse_usize(t, ln)?,
                },
                ["CCX", a, b, t] => Gate::CCX {
                    control1: parse_usize(a, ln)?,
                    control2: parse_usize(b, ln)?,
                    target: parse_usize(t, ln)?,
                },
                _ => {
                    return Err(QseraError::Parse(format!(
                        "line {ln}: unrecognised gate `{line}`"
                    )))
                }
            };
            circuit
                .push(gate)
                .map_err(|e| QseraError::Parse(format!("line {ln}: {e}")))?;
        }
        Ok(circuit)
    }
}

fn parse_usize(tok: &str, line: usize) -> Result<usize> {
    tok.parse()
        .map_err(|_| QseraError::Parse(format!("line {line}: bad qubit index `{tok}`")))
}

/// Pure state of `num_qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState<T> {
    num_qubits: usize,
    amps: Vec<Complex<T>>,
}

impl<T: Scalar> QuantumState<T> {
    /// `|0...0>` on `num_qubits` qubits.
    pub fn zero(num_qubits: usize) -> Result<Self> {
        if num_qubits == 0 || num_qubits > MAX_QUBITS {
            return Err(QseraError::Capacity(format!(
                "qubit count must be in 1..={MAX_QUBITS}, got {num_qubits}"
            )));
        }
        let mut amps = vec![Complex::new(T::zero(), T::zero()); 1 << num_qubits];
        amps[0] = Complex::new(T::one(), T::zero());
        Ok(Self { num_qubits, amps })
    }

    /// Computational basis state `|index>`.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        let mut s = Self::zero(num_qubits)?;
        if index >= s.amps.len() {
            return domain(format!(
                "basis index {index} out of range for {num_qubits} qubits"
            ));
        }
        s.amps.swap(0, index);
        Ok(s)
    }

    /// Wraps an amplitude vector. The length must be `2^Q` and the norm 1
    /// within `1e-6` (renormalization is the caller's business).
    pub fn from_amplitudes(amps: Vec<Complex<T>>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return domain(format!(
                "amplitude vector length must be a power of two >= 2, got {len}"
            ));
        }
        let num_qubits = len.trailing_zeros() as usize;
        if num_qubits > MAX_QUBITS {
            return Err(QseraError::Capacity(format!(
                "{num_qubits} qubits exceeds {MAX_QUBITS}"
            )));
        }
        let s = Self { num_qubits, amps };
        let n = s.norm_sqr();
        if !((n - T::one()).abs() <= T::lit(1e-6)) {
            return domain(format!("state is not normalized (|psi|^2 = {n})"));
        }
        Ok(s)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amps
    }

    pub(crate) fn amplitudes_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.amps
    }

    pub fn norm_sqr(&self) -> T {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn apply(&mut self, gate: &Gate<T>) -> Result<()> {
        gate.validate(self.num_qubits)?;
        self.apply_unchecked(gate);
        Ok(())
    }

    /// Functional form of [`apply`](Self::apply).
    pub fn applied(mut self, gate: &Gate<T>) -> Result<Self> {
        self.apply(gate)?;
        Ok(self)
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit<T>) -> Result<()> {
        if circuit.num_qubits() != self.num_qubits {
            return domain(format!(
                "circuit acts on {} qubits but the state has {}",
                circuit.num_qubits(),
                self.num_qubits
            ));
        }
        // Gates were validated on push.
        for g in circuit.gates() {
            self.apply_unchecked(g);
        }
        Ok(())
    }

    fn apply_unchecked(&mut self, gate: &Gate<T>) {
        let amps = &mut self.amps;
        match *gate {
            Gate::H(q) => {
                let bit = 1 << q;
                let r = T::FRAC_1_SQRT_2();
                for i in 0..amps.len() {
                    if i & bit == 0 {
                        let (a, b) = (amps[i], amps[i | bit]);
                        amps[i] = (a + b).scale(r);
                        amps[i | bit] = (a - b).scale(r);
                    }
                }
            }
            Gate::X(q) => {
                let bit = 1 << q;
                for i in 0..amps.len() {
                    if i & bit == 0 {
                        amps.swap(i, i | bit);
                    }
                }
            }
            Gate::Z(q) => {
                let bit = 1 << q;
                for (i, a) in amps.iter_mut().enumerate() {
                    if i & bit != 0 {
                        *a = -*a;
                    }
                }
            }
            Gate::Phase(q, phi) => {
                let bit = 1 << q;
                let w = Complex::from_polar(T::one(), phi);
                for (i, a) in amps.iter_mut().enumerate() {
                    if i & bit != 0 {
                        *a = *a * w;
                    }
                }
            }
            Gate::CX { control, target } => {
                let (c, t) = (1 << control, 1 << target);
                for i in 0..amps.len() {
                    if i & c != 0 && i & t == 0 {
                        amps.swap(i, i | t);
                    }
                }
            }
            Gate::CCX {
                control1,
                control2,
                target,
            } => {
                let c = (1 << control1) | (1 << control2);
                let t = 1 << target;
                for i in 0..amps.len() {
                    if i & c == c && i & t == 0 {
                        amps.swap(i, i | t);
                    }
                }
            }
        }
    }

    /// Marginal distribution of the listed qubits. Output index bit `j`
    /// holds the value of `register[j]`.
    pub fn register_probabilities(&self, register: &[usize]) -> Result<Vec<T>> {
        self.check_qubit_list(register)?;
        let mut out = vec![T::zero(); 1 << register.len()];
        for (i, a) in self.amps.iter().enumerate() {
            let z = register
                .iter()
                .enumerate()
                .fold(0usize, |z, (j, &q)| z | ((i >> q) & 1) << j);
            out[z] = out[z] + a.norm_sqr();
        }
        Ok(out)
    }

    /// Probability that every listed qubit reads 0.
    pub fn ancilla_ground_probability(&self, ancillas: &[usize]) -> Result<T> {
        self.check_qubit_list(ancillas)?;
        let mask = ancillas.iter().fold(0usize, |m, &q| m | 1 << q);
        Ok(self
            .amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask == 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// True when `max_z |a_z - e^{i theta} b_z| <= tol`, with `theta` fixed by
    /// the largest-magnitude amplitude of `self`.
    pub fn equal_up_to_global_phase(&self, other: &Self, tol: T) -> Result<bool> {
        Ok(self.max_deviation_up_to_global_phase(other)? <= tol)
    }

    /// Largest `|a_z - e^{i theta} b_z|` with `theta` chosen as in
    /// [`equal_up_to_global_phase`](Self::equal_up_to_global_phase).
    pub fn max_deviation_up_to_global_phase(&self, other: &Self) -> Result<T> {
        if self.num_qubits != other.num_qubits {
            return domain(format!(
                "cannot compare states of {} and {} qubits",
                self.num_qubits, other.num_qubits
            ));
        }
        // First index of maximal magnitude.
        let mut k = 0;
        for (i, a) in self.amps.iter().enumerate() {
            if a.norm_sqr() > self.amps[k].norm_sqr() {
                k = i;
            }
        }
        let (a, b) = (self.amps[k], other.amps[k]);
        let rot = if b.norm_sqr().is_zero() {
            Complex::new(T::one(), T::zero())
        } else {
            Complex::from_polar(T::one(), a.arg() - b.arg())
        };
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (*a - *b * rot).norm())
            .fold(T::zero(), T::max))
    }

    /// `[[re, im], ...]` in amplitude-index order.
    pub fn to_pairs(&self) -> Vec<[f64; 2]> {
        self.amps
            .iter()
            .map(|a| [a.re.to_f64_lossy(), a.im.to_f64_lossy()])
            .collect()
    }

    fn check_qubit_list(&self, qubits: &[usize]) -> Result<()> {
        for (i, &q) in qubits.iter().enumerate() {
            if q >= self.num_qubits {
                return domain(format!(
                    "qubit {q} out of range for {} qubits",
                    self.num_qubits
                ));
            }
            if qubits[..i].contains(&q) {
                return domain(format!("qubit {q} listed twice"));
            }
        }
        Ok(())
    }
}
