//! Search for extrema and roots of discrete objectives with Grover amplitude
//! amplification.
//!
//! An objective `f(x)` over `K` binary variables is rescaled to `g(x)` in
//! `[0, 1]` with `g = 1` at the optimum, raised to a power `n` so that
//! `u_n = g^n` approaches the indicator of the optimum, and turned into the
//! phase oracle `|z> -> exp(i pi u_n(z)) |z>`. The oracle is synthesized from
//! `H`, `X`, `Z`, `P` and Toffoli gates with AND ancillas and run through the
//! usual oracle/diffusion iteration on an exact statevector simulator.
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`); the
//! `*F64`/`*F32` aliases below fix the scalar type.
//!
//! ```
//! use qsera::{preset, run_qsera};
//!
//! let result = run_qsera(&preset::reference_config::<f64>()).unwrap();
//! assert_eq!(result.top_state, 0b1001);
//! ```

pub mod error;
pub mod grover;
pub mod portfolio;
pub mod preset;
pub mod pseudo_boolean;
pub mod runner;
pub mod scalar;
pub mod statevector;

pub use error::{QseraError, Result};
pub use grover::{
    apply_exact_diffusion, build_diffusion, build_oracle_circuit, build_uniform_prep,
    classical_amplitudes, optimal_iterations, plan_iterations, DiagonalOracle, GroverPlan,
    IterationRule, OracleSpec, QubitLayout,
};
pub use portfolio::{
    portfolio_return, portfolio_variance, AssetPool, Benchmark, PortfolioProblem, ProblemJson,
    ScanRow, TrackingObjective,
};
pub use pseudo_boolean::{MultilinearPoly, PolyJson, RescaleMode};
pub use runner::{
    bitstring, discretize_continuous, grover_demo, known_optimum, objective_extrema,
    parse_bitstring, run_qsera, run_qsera_with_state, sample_counts, sweep_power, DemoRow,
    DiscreteObjective, GroverDemo, OracleKind, QseraConfig, RunReport, RunResult,
};
pub use scalar::Scalar;
pub use statevector::{Circuit, Gate, QuantumState};

pub type PolyF64 = MultilinearPoly<f64>;
pub type PolyF32 = MultilinearPoly<f32>;
pub type StateF64 = QuantumState<f64>;
pub type StateF32 = QuantumState<f32>;
pub type CircuitF64 = Circuit<f64>;
pub type CircuitF32 = Circuit<f32>;
pub type GateF64 = Gate<f64>;
pub type OracleSpecF64 = OracleSpec<f64>;
pub type PortfolioF64 = PortfolioProblem<f64>;
pub type ConfigF64 = QseraConfig<f64>;
pub type ConfigF32 = QseraConfig<f32>;
pub type RunResultF64 = RunResult<f64>;
pub type RunResultF32 = RunResult<f32>;
