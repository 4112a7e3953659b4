//! End-to-end search: objective -> rescale -> power -> oracle ->
//! `(Q_+ Q_*)^m Q_H |0>` -> register distribution.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, QseraError, Result};
use crate::grover::{
    apply_exact_diffusion, build_diffusion, build_oracle_circuit, build_uniform_prep,
    classical_amplitudes, plan_iterations, DiagonalOracle, GroverPlan, IterationRule, OracleSpec,
    QubitLayout,
};
use crate::pseudo_boolean::{MultilinearPoly, RescaleMode};
use crate::scalar::Scalar;
use crate::statevector::QuantumState;

/// Register size limit when the oracle is synthesized from gates.
pub const MAX_CIRCUIT_VARS: usize = 12;
/// Register size limit for the diagonal reference backend.
pub const MAX_EXACT_VARS: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum OracleKind {
    /// Synthesized `H/X/Z/P/CX/CCX` circuit with AND and phase ancillas.
    #[default]
    GateCircuit,
    /// Direct diagonal `exp(i pi u(z))` and exact reflection, no ancillas.
    ExactDiagonal,
}

impl FromStr for OracleKind {
    type Err = QseraError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "circuit" | "gate" | "gates" => Ok(Self::GateCircuit),
            "exact" | "diagonal" => Ok(Self::ExactDiagonal),
            other => Err(QseraError::Parse(format!(
                "unknown oracle `{other}` (expected circuit|exact)"
            ))),
        }
    }
}

impl fmt::Display for OracleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::GateCircuit => "circuit",
            Self::ExactDiagonal => "exact",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QseraConfig<T> {
    pub objective: MultilinearPoly<T>,
    pub mode: RescaleMode,
    /// Estimated (or exact) extrema used for rescaling.
    pub f_min: T,
    pub f_max: T,
    /// Exponent `n` in `u_n = g^n`.
    pub n_power: u32,
    pub iterations: IterationRule,
    pub oracle: OracleKind,
}

impl<T: Scalar> QseraConfig<T> {
    /// Config whose rescaling range is the objective's true range.
    pub fn with_exact_extrema(
        objective: MultilinearPoly<T>,
        mode: RescaleMode,
        n_power: u32,
    ) -> Self {
        let (f_min, f_max) = objective_extrema(&objective);
        Self {
            objective,
            mode,
            f_min,
            f_max,
            n_power,
            iterations: IterationRule::AutoFloor,
            oracle: OracleKind::GateCircuit,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.num_vars()
    }

    fn validate(&self) -> Result<()> {
        if self.n_power == 0 {
            return domain("power n must be at least 1");
        }
        let k = self.num_vars();
        let (limit, what) = match self.oracle {
            OracleKind::GateCircuit => (MAX_CIRCUIT_VARS, "gate-circuit"),
            OracleKind::ExactDiagonal => (MAX_EXACT_VARS, "exact-diagonal"),
        };
        if k > limit {
            return Err(QseraError::Capacity(format!(
                "{k} variables exceeds the {what} limit of {limit}"
            )));
        }
        Ok(())
    }
}

/// Outcome of one search run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunResult<T> {
    pub num_vars: usize,
    /// Marginal probability of each register bitstring.
    pub probabilities: Vec<T>,
    pub top_state: usize,
    pub runner_up: usize,
    pub plan: GroverPlan,
    pub n_power: u32,
    /// Probability that every ancilla is back in `|0>` (1 for the diagonal backend).
    pub ancilla_ground_prob: T,
    /// Oracle table actually applied.
    pub u_values: Vec<T>,
}

impl<T: Scalar> RunResult<T> {
    pub fn to_report(&self) -> RunReport {
        let k = self.num_vars;
        RunReport {
            probabilities: self
                .probabilities
                .iter()
                .enumerate()
                .map(|(z, p)| (bitstring(z, k), p.to_f64_lossy()))
                .collect(),
            top_state: bitstring(self.top_state, k),
            runner_up: bitstring(self.runner_up, k),
            m: self.plan.m,
            n: self.n_power,
            ancilla_ground_prob: self.ancilla_ground_prob.to_f64_lossy(),
            counts: None,
            state: None,
        }
    }
}

/// Serialized run: probabilities keyed by bitstring `b_{K-1}...b_0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub probabilities: BTreeMap<String, f64>,
    pub top_state: String,
    pub runner_up: String,
    pub m: usize,
    pub n: u32,
    pub ancilla_ground_prob: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counts: Option<BTreeMap<String, u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<Vec<[f64; 2]>>,
}

/// `z` as a `k`-character binary string, most significant variable first.
pub fn bitstring(z: usize, k: usize) -> String {
    format!("{z:0k$b}")
}

pub fn parse_bitstring(s: &str) -> Result<usize> {
    if s.is_empty() || !s.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(QseraError::Parse(format!("`{s}` is not a bitstring")));
    }
    usize::from_str_radix(s, 2).map_err(|e| QseraError::Parse(e.to_string()))
}

/// Minimum and maximum of a polynomial over all assignments.
pub fn objective_extrema<T: Scalar>(objective: &MultilinearPoly<T>) -> (T, T) {
    objective
        .values()
        .into_iter()
        .fold((T::infinity(), T::neg_infinity()), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        })
}

/// The assignment the search should find, by exhaustive classical
/// evaluation (ties go to the lowest index).
pub fn known_optimum<T: Scalar>(objective: &MultilinearPoly<T>, mode: RescaleMode) -> usize {
    let values = objective.values();
    let score = |v: T| match mode {
        RescaleMode::Maximise => v,
        RescaleMode::Minimise => -v,
        RescaleMode::RootFind => -v.abs(),
    };
    argmax_by(&values, |&v| score(v), None)
}

fn argmax_by<T: Scalar>(values: &[T], key: impl Fn(&T) -> T, skip: Option<usize>) -> usize {
    let mut best: Option<(usize, T)> = None;
    for (i, v) in values.iter().enumerate() {
        if Some(i) == skip {
            continue;
        }
        let s = key(v);
        if best.is_none_or(|(_, b)| s > b) {
            best = Some((i, s));
        }
    }
    best.map(|(i, _)| i).unwrap_or(0)
}

pub fn run_qsera<T: Scalar>(config: &QseraConfig<T>) -> Result<RunResult<T>> {
    run_qsera_with_state(config).map(|(r, _)| r)
}

/// Like [`run_qsera`], also returning the final simulator state.
pub fn run_qsera_with_state<T: Scalar>(
    config: &QseraConfig<T>,
) -> Result<(RunResult<T>, QuantumState<T>)> {
    config.validate()?;
    let k = config.num_vars();
    let g = config
        .objective
        .rescale(config.mode, config.f_min, config.f_max)?;
    let plan = plan_iterations(1 << k, config.iterations);
    log::debug!(
        "k={k} n={} m={} (m_real={:.4}) oracle={}",
        config.n_power,
        plan.m,
        plan.m_real,
        config.oracle
    );

    let (state, register, ancillas, u_values) = match config.oracle {
        OracleKind::GateCircuit => {
            let u = g.power(config.n_power);
            let spec = OracleSpec::from_poly(u);
            let layout = QubitLayout::for_search(k, spec.max_order())?;
            let prep = build_uniform_prep::<T>(&layout);
            let oracle = build_oracle_circuit(&spec, &layout)?;
            let diffusion = build_diffusion::<T>(&layout)?;
            log::debug!(
                "layout: {} qubits, oracle {} gates, diffusion {} gates",
                layout.num_qubits(),
                oracle.len(),
                diffusion.len()
            );
            let mut state = QuantumState::zero(layout.num_qubits())?;
            state.apply_circuit(&prep)?;
            for _ in 0..plan.m {
                state.apply_circuit(&oracle)?;
                state.apply_circuit(&diffusion)?;
            }
            let u_values = spec.poly().values();
            (
                state,
                layout.register().to_vec(),
                layout.ancillas(),
                u_values,
            )
        }
        OracleKind::ExactDiagonal => {
            let u_values: Vec<T> = g
                .values()
                .into_iter()
                .map(|v| v.powi(config.n_power as i32))
                .collect();
            let oracle = DiagonalOracle::new(u_values.clone())?;
            let layout = QubitLayout::new(k, 0)?;
            let mut state = QuantumState::zero(k)?;
            for &q in layout.register() {
                state.apply(&crate::statevector::Gate::H(q))?;
            }
            for _ in 0..plan.m {
                oracle.apply(&mut state)?;
                apply_exact_diffusion(&mut state);
            }
            (state, layout.register().to_vec(), Vec::new(), u_values)
        }
    };

    let probabilities = state.register_probabilities(&register)?;
    let ancilla_ground_prob = if ancillas.is_empty() {
        T::one()
    } else {
        state.ancilla_ground_probability(&ancillas)?
    };
    let top_state = argmax_by(&probabilities, |&p| p, None);
    let runner_up = argmax_by(&probabilities, |&p| p, Some(top_state));
    let result = RunResult {
        num_vars: k,
        probabilities,
        top_state,
        runner_up,
        plan,
        n_power: config.n_power,
        ancilla_ground_prob,
        u_values,
    };
    Ok((result, state))
}

/// Probability of the classically known optimum for each power `n`.
pub fn sweep_power<T: Scalar>(config: &QseraConfig<T>, n_values: &[u32]) -> Result<Vec<(u32, T)>> {
    if n_values.is_empty() {
        return domain("no powers to sweep");
    }
    if n_values.contains(&0) {
        return domain("powers must be at least 1");
    }
    let target = known_optimum(&config.objective, config.mode);
    n_values
        .iter()
        .map(|&n| {
            let cfg = QseraConfig {
                n_power: n,
                ..config.clone()
            };
            run_qsera(&cfg).map(|r| (n, r.probabilities[target]))
        })
        .collect()
}

/// A continuous function sampled on a `2^K`-point grid; grid position `z`
/// is the search index.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteObjective<T> {
    pub grid: Vec<T>,
    pub values: Vec<T>,
}

impl<T: Scalar> DiscreteObjective<T> {
    pub fn num_vars(&self) -> usize {
        self.values.len().trailing_zeros() as usize
    }

    pub fn to_polynomial(&self) -> Result<MultilinearPoly<T>> {
        MultilinearPoly::from_point_values(&self.values)
    }
}

/// Tabulates `(y, h(y))` samples for the search.
pub fn discretize_continuous<T: Scalar>(samples: &[(T, T)]) -> Result<DiscreteObjective<T>> {
    let n = samples.len();
    if n < 2 || !n.is_power_of_two() {
        return domain(format!("sample count must be a power of two >= 2, got {n}"));
    }
    if samples
        .iter()
        .any(|(y, h)| !y.is_finite() || !h.is_finite())
    {
        return domain("samples must be finite");
    }
    if let Some(i) = samples.windows(2).position(|w| w[1].0 <= w[0].0) {
        return domain(format!(
            "grid is not strictly increasing at sample {}",
            i + 1
        ));
    }
    Ok(DiscreteObjective {
        grid: samples.iter().map(|s| s.0).collect(),
        values: samples.iter().map(|s| s.1).collect(),
    })
}

/// Multinomial sample of `shots` measurements from an exact distribution.
pub fn sample_counts<T: Scalar>(probabilities: &[T], shots: u64, seed: u64) -> Result<Vec<u64>> {
    let weights: Vec<f64> = probabilities
        .iter()
        .map(|p| p.to_f64_lossy().max(0.0))
        .collect();
    let dist = WeightedIndex::new(&weights).map_err(|e| QseraError::InputDomain(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; probabilities.len()];
    for _ in 0..shots {
        counts[dist.sample(&mut rng)] += 1;
    }
    Ok(counts)
}

/// One row of an ideal-oracle Grover run: amplitudes on the normalized
/// non-target superposition and on the target, from the gate simulation
/// and from the closed-form recursion.
#[derive(Clone, Debug, PartialEq)]
pub struct DemoRow<T> {
    pub k: usize,
    pub sim_other: T,
    pub sim_target: T,
    pub rec_other: T,
    pub rec_target: T,
}

impl<T: Scalar> DemoRow<T> {
    pub fn sim_probability(&self) -> T {
        self.sim_target * self.sim_target
    }

    pub fn rec_probability(&self) -> T {
        self.rec_target * self.rec_target
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroverDemo<T> {
    pub num_vars: usize,
    pub target: usize,
    pub rows: Vec<DemoRow<T>>,
    /// Largest complex deviation between simulated and recursion amplitudes.
    pub max_deviation: T,
}

/// Gate-level Grover search for a single marked state with the indicator
/// oracle, recorded after every iteration `0..=m`.
pub fn grover_demo<T: Scalar>(num_vars: usize, target: usize, m: usize) -> Result<GroverDemo<T>> {
    if num_vars == 0 || num_vars > MAX_CIRCUIT_VARS {
        return Err(QseraError::Capacity(format!(
            "register size must be in 1..={MAX_CIRCUIT_VARS}, got {num_vars}"
        )));
    }
    let n_states = 1usize << num_vars;
    if target >= n_states {
        return domain(format!("target {target} does not fit in {num_vars} bits"));
    }
    let mut indicator = vec![T::zero(); n_states];
    indicator[target] = T::one();
    let spec = OracleSpec::from_poly(MultilinearPoly::from_point_values(&indicator)?);
    let layout = QubitLayout::for_search(num_vars, spec.max_order())?;
    let oracle = build_oracle_circuit(&spec, &layout)?;
    let diffusion = build_diffusion::<T>(&layout)?;
    let mut state = QuantumState::zero(layout.num_qubits())?;
    state.apply_circuit(&build_uniform_prep::<T>(&layout))?;

    let recursion = classical_amplitudes::<T>(n_states, m)?;
    let other = if target == 0 { 1 } else { 0 };
    let scale = T::from_usize(n_states - 1)
        .expect("state count fits the scalar")
        .sqrt();
    let mut rows = Vec::with_capacity(m + 1);
    let mut max_deviation = T::zero();
    for (k, &(rec_other, rec_target)) in recursion.iter().enumerate() {
        if k > 0 {
            state.apply_circuit(&oracle)?;
            state.apply_circuit(&diffusion)?;
        }
        // Ancillas are back in |0>, so register state z sits at index z.
        let amps = state.amplitudes();
        let t = amps[target];
        let o = amps[other] * scale;
        let dev = (t - Complex::new(rec_target, T::zero()))
            .norm()
            .max((o - Complex::new(rec_other, T::zero())).norm());
        max_deviation = max_deviation.max(dev);
        rows.push(DemoRow {
            k,
            sim_other: o.re,
            sim_target: t.re,
            rec_other,
            rec_target,
        });
    }
    Ok(GroverDemo {
        num_vars,
        target,
        rows,
        max_deviation,
    })
}
