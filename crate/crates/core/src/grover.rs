//! Circuit builders for amplitude amplification with a polynomial phase
//! oracle, plus the closed-form amplitude recursion and iteration planning.
//!
//! The oracle multiplies `|z>` by `exp(i pi u(z))`, where `u` is a multilinear
//! polynomial. Every monomial `c_S prod_{k in S} x_k` contributes an
//! independent diagonal factor, realized by computing the AND of the
//! monomial's variables onto a phase ancilla, applying `P(pi c_S)` there and
//! uncomputing.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex;

use crate::error::{domain, QseraError, Result};
use crate::pseudo_boolean::MultilinearPoly;
use crate::scalar::Scalar;
use crate::statevector::{Circuit, Gate, QuantumState};

/// Phase angles for each monomial of `u = g^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleSpec<T> {
    g_power: MultilinearPoly<T>,
    phases: BTreeMap<usize, T>,
}

impl<T: Scalar> OracleSpec<T> {
    /// `phi_S = pi * c_S` for every stored monomial, the constant term included.
    pub fn from_poly(g_power: MultilinearPoly<T>) -> Self {
        let phases = g_power.terms().map(|(m, c)| (m, T::PI() * c)).collect();
        Self { g_power, phases }
    }

    pub fn num_vars(&self) -> usize {
        self.g_power.num_vars()
    }

    pub fn poly(&self) -> &MultilinearPoly<T> {
        &self.g_power
    }

    pub fn phases(&self) -> &BTreeMap<usize, T> {
        &self.phases
    }

    pub fn max_order(&self) -> usize {
        self.g_power.max_order()
    }

    /// Phases in emission order: ascending monomial degree, then mask.
    fn ordered_phases(&self) -> Vec<(usize, T)> {
        let mut v: Vec<_> = self.phases.iter().map(|(&m, &p)| (m, p)).collect();
        v.sort_by_key(|&(m, _)| (m.count_ones(), m));
        v
    }
}

/// Qubit allocation: register `0..K`, then AND ancillas, then the phase
/// ancilla.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QubitLayout {
    register: Vec<usize>,
    and_ancillas: Vec<usize>,
    phase_ancilla: usize,
}

impl QubitLayout {
    pub fn new(num_register: usize, num_and_ancillas: usize) -> Result<Self> {
        if num_register == 0 {
            return domain("register must hold at least one qubit");
        }
        let register = (0..num_register).collect();
        let and_ancillas = (num_register..num_register + num_and_ancillas).collect();
        Ok(Self {
            register,
            and_ancillas,
            phase_ancilla: num_register + num_and_ancillas,
        })
    }

    /// Ancillas an order-`j` AND ladder needs: `max(0, j - 2)`.
    pub fn ancillas_for_order(order: usize) -> usize {
        order.saturating_sub(2)
    }

    /// Smallest layout hosting `spec`'s oracle.
    pub fn for_oracle<T: Scalar>(spec: &OracleSpec<T>) -> Result<Self> {
        Self::new(spec.num_vars(), Self::ancillas_for_order(spec.max_order()))
    }

    /// Smallest layout hosting both the oracle of order `max_order` and the
    /// `K`-controlled reflection of the diffusion operator.
    pub fn for_search(num_register: usize, max_order: usize) -> Result<Self> {
        Self::new(
            num_register,
            Self::ancillas_for_order(max_order.max(num_register)),
        )
    }

    pub fn register(&self) -> &[usize] {
        &self.register
    }

    pub fn and_ancillas(&self) -> &[usize] {
        &self.and_ancillas
    }

    pub fn phase_ancilla(&self) -> usize {
        self.phase_ancilla
    }

    /// AND ancillas followed by the phase ancilla.
    pub fn ancillas(&self) -> Vec<usize> {
        let mut v = self.and_ancillas.clone();
        v.push(self.phase_ancilla);
        v
    }

    pub fn num_register(&self) -> usize {
        self.register.len()
    }

    pub fn num_qubits(&self) -> usize {
        self.phase_ancilla + 1
    }

    fn check_order(&self, order: usize) -> Result<()> {
        let need = Self::ancillas_for_order(order);
        if need > self.and_ancillas.len() {
            return Err(QseraError::Layout(format!(
                "an order-{order} control needs {need} AND ancillas, layout has {}",
                self.and_ancillas.len()
            )));
        }
        Ok(())
    }
}

/// The gates that write `AND(controls)` onto the phase ancilla. The ancilla
/// chain is `and[0] = c0 & c1`, `and[i] = c(i+1) & and[i-1]`, with the final
/// Toffoli targeting the phase ancilla. Controls must be non-empty.
fn and_ladder<T: Scalar>(controls: &[usize], layout: &QubitLayout) -> Vec<Gate<T>> {
    let anc = layout.phase_ancilla;
    let ands = &layout.and_ancillas;
    match controls {
        [] => Vec::new(),
        [c] => vec![Gate::CX {
            control: *c,
            target: anc,
        }],
        [a, b] => vec![Gate::CCX {
            control1: *a,
            control2: *b,
            target: anc,
        }],
        _ => {
            let j = controls.len();
            let mut gates = vec![Gate::CCX {
                control1: controls[0],
                control2: controls[1],
                target: ands[0],
            }];
            for i in 2..j - 1 {
                gates.push(Gate::CCX {
                    control1: controls[i],
                    control2: ands[i - 2],
                    target: ands[i - 1],
                });
            }
            gates.push(Gate::CCX {
                control1: controls[j - 1],
                control2: ands[j - 3],
                target: anc,
            });
            gates
        }
    }
}

/// Conjugates `kick` (gates on the phase ancilla) by the AND ladder over
/// `controls`: compute, kick, uncompute in reverse.
fn controlled_kick<T: Scalar>(
    circuit: &mut Circuit<T>,
    controls: &[usize],
    layout: &QubitLayout,
    kick: &[Gate<T>],
) -> Result<()> {
    let ladder = and_ladder::<T>(controls, layout);
    for g in &ladder {
        circuit.push(*g)?;
    }
    for g in kick {
        circuit.push(*g)?;
    }
    for g in ladder.iter().rev() {
        circuit.push(*g)?;
    }
    Ok(())
}

/// `Q_H`: a Hadamard on every register qubit.
pub fn build_uniform_prep<T: Scalar>(layout: &QubitLayout) -> Circuit<T> {
    let mut c = Circuit::new(layout.num_qubits());
    for &q in layout.register() {
        c.push(Gate::H(q)).expect("register qubit is in range");
    }
    c
}

/// Gate-level oracle `prod_S P_S(phi_S)`.
///
/// The constant term becomes `X P(phi_0) X` on the phase ancilla (a global
/// phase), order-1 terms `CX P CX`, order-2 terms `CCX P CCX`, and higher
/// orders an AND ladder through the AND ancillas. All ancillas are returned
/// to `|0>`.
pub fn build_oracle_circuit<T: Scalar>(
    spec: &OracleSpec<T>,
    layout: &QubitLayout,
) -> Result<Circuit<T>> {
    let k = spec.num_vars();
    if layout.num_register() != k {
        return Err(QseraError::Layout(format!(
            "oracle over {k} variables but layout register has {} qubits",
            layout.num_register()
        )));
    }
    let order = spec.max_order();
    if order > k {
        return domain(format!("monomial order {order} exceeds {k} variables"));
    }
    layout.check_order(order)?;

    let anc = layout.phase_ancilla();
    let mut circuit = Circuit::new(layout.num_qubits());
    for (mask, phi) in spec.ordered_phases() {
        if phi.is_zero() {
            continue;
        }
        if mask == 0 {
            for g in [Gate::X(anc), Gate::Phase(anc, phi), Gate::X(anc)] {
                circuit.push(g)?;
            }
            continue;
        }
        let controls: Vec<usize> = crate::pseudo_boolean::mask_to_vars(mask)
            .into_iter()
            .map(|v| layout.register()[v])
            .collect();
        controlled_kick(&mut circuit, &controls, layout, &[Gate::Phase(anc, phi)])?;
    }
    Ok(circuit)
}

/// `Q_+ = Q_H Q_0 Q_H`, the reflection `2|s><s| - I` about the uniform
/// register state.
///
/// `Q_0` flips every state but `|0...0>`: after `H` and `X` on the register,
/// the AND of all register qubits is written to the phase ancilla, which then
/// receives `X Z X` (a `-1` exactly when the ancilla is still `|0>`).
pub fn build_diffusion<T: Scalar>(layout: &QubitLayout) -> Result<Circuit<T>> {
    let k = layout.num_register();
    layout.check_order(k)?;
    let anc = layout.phase_ancilla();
    let reg = layout.register();
    let mut c = Circuit::new(layout.num_qubits());
    for &q in reg {
        c.push(Gate::H(q))?;
    }
    for &q in reg {
        c.push(Gate::X(q))?;
    }
    controlled_kick(
        &mut c,
        reg,
        layout,
        &[Gate::X(anc), Gate::Z(anc), Gate::X(anc)],
    )?;
    for &q in reg {
        c.push(Gate::X(q))?;
    }
    for &q in reg {
        c.push(Gate::H(q))?;
    }
    Ok(c)
}

/// Reference diagonal oracle `|z> -> exp(i pi u(z)) |z>` acting on the low
/// `K` qubits of a state, bypassing gate synthesis.
#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalOracle<T> {
    u_values: Vec<T>,
}

impl<T: Scalar> DiagonalOracle<T> {
    pub fn new(u_values: Vec<T>) -> Result<Self> {
        let len = u_values.len();
        if len < 2 || !len.is_power_of_two() {
            return domain(format!(
                "oracle table length must be a power of two >= 2, got {len}"
            ));
        }
        if u_values.iter().any(|u| !u.is_finite()) {
            return domain("oracle table contains a non-finite value");
        }
        Ok(Self { u_values })
    }

    /// Indicator oracle marking `target` among `2^k` states: an exact
    /// reflection `I - 2|z*><z*|`.
    pub fn indicator(k: usize, target: usize) -> Result<Self> {
        if k == 0 || k > crate::pseudo_boolean::MAX_VARS || target >> k != 0 {
            return domain(format!(
                "target {target} out of range for {k} register qubits"
            ));
        }
        let mut u = vec![T::zero(); 1 << k];
        u[target] = T::one();
        Self::new(u)
    }

    pub fn u_values(&self) -> &[T] {
        &self.u_values
    }

    pub fn num_vars(&self) -> usize {
        self.u_values.len().trailing_zeros() as usize
    }

    pub fn apply(&self, state: &mut QuantumState<T>) -> Result<()> {
        let k = self.num_vars();
        if k > state.num_qubits() {
            return domain(format!(
                "oracle over {k} qubits does not fit a {}-qubit state",
                state.num_qubits()
            ));
        }
        let mask = (1usize << k) - 1;
        let factors: Vec<Complex<T>> = self
            .u_values
            .iter()
            .map(|&u| Complex::from_polar(T::one(), T::PI() * u))
            .collect();
        for (i, a) in state.amplitudes_mut().iter_mut().enumerate() {
            *a = *a * factors[i & mask];
        }
        Ok(())
    }
}

/// Exact `2|s><s| - I` over all qubits of `state` (register-only states).
pub fn apply_exact_diffusion<T: Scalar>(state: &mut QuantumState<T>) {
    let amps = state.amplitudes_mut();
    let n = T::from_usize(amps.len()).expect("state length fits the scalar");
    let mean = amps
        .iter()
        .fold(Complex::new(T::zero(), T::zero()), |s, a| s + a)
        / n;
    let two_mean = mean + mean;
    for a in amps.iter_mut() {
        *a = two_mean - *a;
    }
}

/// How the real-valued optimal iteration count is turned into an integer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum IterationRule {
    #[default]
    AutoFloor,
    AutoCeil,
    Explicit(usize),
}

impl FromStr for IterationRule {
    type Err = QseraError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto-floor" | "floor" | "auto" => Ok(Self::AutoFloor),
            "auto-ceil" | "ceil" => Ok(Self::AutoCeil),
            other => other.parse().map(Self::Explicit).map_err(|_| {
                QseraError::Parse(format!(
                    "bad iteration rule `{other}` (auto-floor|auto-ceil|<int>)"
                ))
            }),
        }
    }
}

impl fmt::Display for IterationRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::AutoFloor => f.write_str("auto-floor"),
            Self::AutoCeil => f.write_str("auto-ceil"),
            Self::Explicit(m) => write!(f, "{m}"),
        }
    }
}

/// Iteration plan for a search over `num_states` basis states.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroverPlan {
    pub num_states: usize,
    /// `(pi sqrt(N) - 2) / 4`
    pub m_real: f64,
    pub m: usize,
}

/// Plan with the default floor rounding.
pub fn optimal_iterations(num_states: usize) -> GroverPlan {
    plan_iterations(num_states, IterationRule::AutoFloor)
}

pub fn plan_iterations(num_states: usize, rule: IterationRule) -> GroverPlan {
    let m_real = (std::f64::consts::PI * (num_states as f64).sqrt() - 2.0) / 4.0;
    let m = match rule {
        IterationRule::AutoFloor => m_real.floor().max(0.0) as usize,
        IterationRule::AutoCeil => m_real.ceil().max(0.0) as usize,
        IterationRule::Explicit(m) => m,
    };
    GroverPlan {
        num_states,
        m_real,
        m,
    }
}

/// Amplitudes `(a_k, a*_k)` on `|zeta>` (the normalized non-target
/// superposition) and `|z*>` for `k = 0..=m`, under an ideal reflection
/// oracle marking one of `N` states.
pub fn classical_amplitudes<T: Scalar>(num_states: usize, m: usize) -> Result<Vec<(T, T)>> {
    if num_states < 2 {
        return domain(format!("need at least 2 states, got {num_states}"));
    }
    let n = T::from_usize(num_states).expect("state count fits the scalar");
    let one = T::one();
    let two = one + one;
    let s = (n - one).sqrt();
    let mut a = s / n.sqrt();
    let mut a_star = one / n.sqrt();
    let mut out = Vec::with_capacity(m + 1);
    out.push((a, a_star));
    for _ in 0..m {
        let next = (a * (n - two) - two * a_star * s) / n;
        let next_star = (two * a * (n - one) + a_star * (n - two) * s) / (n * s);
        a = next;
        a_star = next_star;
        out.push((a, a_star));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    type P = MultilinearPoly<f64>;
    type S = QuantumState<f64>;

    fn uniform(layout: &QubitLayout) -> S {
        let mut s = S::zero(layout.num_qubits()).unwrap();
        s.apply_circuit(&build_uniform_prep(layout)).unwrap();
        s
    }

    #[test]
    fn layout_indices() {
        let l = QubitLayout::new(4, 2).unwrap();
        assert_eq!(l.register(), &[0, 1, 2, 3]);
        assert_eq!(l.and_ancillas(), &[4, 5]);
        assert_eq!(l.phase_ancilla(), 6);
        assert_eq!(l.num_qubits(), 7);
        assert_eq!(QubitLayout::for_search(4, 4).unwrap(), l);
        assert_eq!(QubitLayout::ancillas_for_order(1), 0);
        assert_eq!(QubitLayout::ancillas_for_order(5), 3);
    }

    #[test]
    fn uniform_prep() {
        let l = QubitLayout::new(1, 0).unwrap();
        let p = uniform(&l).register_probabilities(l.register()).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);

        let l = QubitLayout::new(4, 2).unwrap();
        let mut s = uniform(&l);
        for p in s.register_probabilities(l.register()).unwrap() {
            assert!((p - 1.0 / 16.0).abs() < 1e-12);
        }
        assert!((s.ancilla_ground_probability(&l.ancillas()).unwrap() - 1.0).abs() < 1e-12);
        s.apply_circuit(&build_uniform_prep(&l)).unwrap();
        assert!(
            s.max_deviation_up_to_global_phase(&S::zero(7).unwrap())
                .unwrap()
                < 1e-12
        );
    }

    #[test]
    fn constant_oracle_is_global_phase() {
        let spec = OracleSpec::from_poly(P::constant(2, 0.3).unwrap());
        let l = QubitLayout::for_oracle(&spec).unwrap();
        let circ = build_oracle_circuit(&spec, &l).unwrap();
        assert_eq!(circ.len(), 3);
        let mut s = uniform(&l);
        let before = s.clone();
        s.apply_circuit(&circ).unwrap();
        assert!(s.equal_up_to_global_phase(&before, 1e-12).unwrap());
        let w = s.amplitudes()[0] / before.amplitudes()[0];
        assert!((w.arg() - 0.3 * PI).abs() < 1e-12);
    }

    #[test]
    fn pairwise_monomial_with_pi_is_cz() {
        let spec = OracleSpec::from_poly(P::monomial(2, 0b11, 1.0).unwrap());
        let l = QubitLayout::for_oracle(&spec).unwrap();
        assert_eq!(l.num_qubits(), 3);
        let circ = build_oracle_circuit(&spec, &l).unwrap();
        for z in 0..4 {
            let mut s = S::basis(3, z).unwrap();
            s.apply_circuit(&circ).unwrap();
            let expect = if z == 3 { -1.0 } else { 1.0 };
            assert!((s.amplitudes()[z] - Complex::new(expect, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn high_order_ladder_matches_diagonal() {
        let p = P::from_terms(
            5,
            [(0b11111, 0.7), (0b10101, -0.4), (0b00111, 0.2), (0, 0.1)],
        )
        .unwrap();
        let spec = OracleSpec::from_poly(p.clone());
        let l = QubitLayout::for_oracle(&spec).unwrap();
        assert_eq!(l.and_ancillas().len(), 3);
        let circ = build_oracle_circuit(&spec, &l).unwrap();
        let mut a = uniform(&l);
        let mut b = a.clone();
        a.apply_circuit(&circ).unwrap();
        DiagonalOracle::new(p.values())
            .unwrap()
            .apply(&mut b)
            .unwrap();
        assert!(a.max_deviation_up_to_global_phase(&b).unwrap() < 1e-12);
        assert!((a.ancilla_ground_probability(&l.ancillas()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn oracle_layout_errors() {
        let spec = OracleSpec::from_poly(P::monomial(4, 0b1111, 0.5).unwrap());
        let small = QubitLayout::new(4, 1).unwrap();
        assert!(matches!(
            build_oracle_circuit(&spec, &small),
            Err(QseraError::Layout(_))
        ));
        let wrong = QubitLayout::new(3, 2).unwrap();
        assert!(matches!(
            build_oracle_circuit(&spec, &wrong),
            Err(QseraError::Layout(_))
        ));
        assert!(matches!(
            build_diffusion::<f64>(&QubitLayout::new(4, 1).unwrap()),
            Err(QseraError::Layout(_))
        ));
    }

    #[test]
    fn zero_phases_emit_nothing() {
        let p = P::from_terms(2, [(0b01, 1e-300)]).unwrap();
        let spec = OracleSpec::from_poly(p);
        let l = QubitLayout::for_oracle(&spec).unwrap();
        // 1e-300 * pi is still nonzero, so gates are emitted.
        assert_eq!(build_oracle_circuit(&spec, &l).unwrap().len(), 3);
        let spec = OracleSpec::from_poly(P::zero(2).unwrap());
        assert!(build_oracle_circuit(&spec, &l).unwrap().is_empty());
    }

    #[test]
    fn diffusion_fixes_uniform() {
        let l = QubitLayout::for_search(3, 0).unwrap();
        let mut s = uniform(&l);
        let before = s.clone();
        s.apply_circuit(&build_diffusion(&l).unwrap()).unwrap();
        assert!(s.equal_up_to_global_phase(&before, 1e-12).unwrap());
    }

    #[test]
    fn diffusion_on_basis_state() {
        let l = QubitLayout::for_search(3, 0).unwrap();
        let d = build_diffusion::<f64>(&l).unwrap();
        let n = 8.0;
        for z in 0..8 {
            let mut s = S::basis(l.num_qubits(), z).unwrap();
            s.apply_circuit(&d).unwrap();
            for (i, a) in s.amplitudes().iter().enumerate().take(8) {
                let expect = if i == z { 2.0 / n - 1.0 } else { 2.0 / n };
                assert!(
                    (a - Complex::new(expect, 0.0)).norm() < 1e-12,
                    "z={z} i={i} a={a}"
                );
            }
            assert!((s.ancilla_ground_probability(&l.ancillas()).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn diffusion_single_qubit_register() {
        let l = QubitLayout::for_search(1, 0).unwrap();
        let mut s = S::basis(l.num_qubits(), 1).unwrap();
        s.apply_circuit(&build_diffusion(&l).unwrap()).unwrap();
        // 2|+><+| - I = X on one qubit.
        assert!((s.amplitudes()[0] - Complex::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn indicator_oracle_reflects() {
        let o = DiagonalOracle::<f64>::indicator(2, 2).unwrap();
        let mut s = S::zero(2).unwrap();
        s.apply(&Gate::H(0)).unwrap();
        s.apply(&Gate::H(1)).unwrap();
        o.apply(&mut s).unwrap();
        for (i, a) in s.amplitudes().iter().enumerate() {
            let expect = if i == 2 { -0.5 } else { 0.5 };
            assert!((a.re - expect).abs() < 1e-15 && a.im.abs() < 1e-15);
        }
        assert!(DiagonalOracle::<f64>::indicator(2, 4).is_err());
        let zero = DiagonalOracle::new(vec![0.0; 4]).unwrap();
        let before = s.clone();
        zero.apply(&mut s).unwrap();
        assert_eq!(s, before);
        assert!(DiagonalOracle::new(vec![0.0; 3]).is_err());
        assert!(DiagonalOracle::new(vec![0.0; 8])
            .unwrap()
            .apply(&mut S::zero(2).unwrap())
            .is_err());
    }

    #[test]
    fn iteration_planner() {
        let p = optimal_iterations(16);
        assert!((p.m_real - 2.6416).abs() < 1e-4);
        assert_eq!(p.m, 2);
        let p = plan_iterations(64, IterationRule::AutoCeil);
        assert!((p.m_real - 5.7832).abs() < 1e-4);
        assert_eq!(p.m, 6);
        assert_eq!(optimal_iterations(4).m, 1);
        assert_eq!(plan_iterations(16, IterationRule::Explicit(7)).m, 7);
        assert_eq!(
            "auto-ceil".parse::<IterationRule>().unwrap(),
            IterationRule::AutoCeil
        );
        assert_eq!(
            "3".parse::<IterationRule>().unwrap(),
            IterationRule::Explicit(3)
        );
        assert!("x".parse::<IterationRule>().is_err());
    }

    #[test]
    fn n4_one_iteration_is_optimal() {
        let amps = classical_amplitudes::<f64>(4, 3).unwrap();
        assert!((amps[1].1.abs() - 1.0).abs() < 1e-12);
        assert!(amps[1].0.abs() < 1e-12);
        assert!(amps[2].1.abs() < 0.6 && amps[3].1.abs() < 0.6);
    }

    #[test]
    fn recursion_first_step() {
        let amps = classical_amplitudes::<f64>(64, 1).unwrap();
        assert!((amps[0].1 - 0.125).abs() < 1e-15);
        assert!((amps[1].1 - 0.3671875).abs() < 1e-14);
        assert!(classical_amplitudes::<f64>(1, 1).is_err());
    }
}
