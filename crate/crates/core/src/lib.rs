//! Bi-confluent Heun potentials for the one-dimensional Schrödinger equation
//! and the spectrum of a stationary relativistic wave equation for a spinless
//! particle.
//!
//! * [`bch`]: power series, derivative and polynomial closures of the
//!   bi-confluent Heun function.
//! * [`potentials`]: the five potential families, their coordinate
//!   transforms, and the scalar/vector potentials that reproduce them.
//! * [`reduction`]: parameter matching to the Heun equation and the assembled
//!   wavefunction, checked by its Schrödinger residual.
//! * [`spectra`]: inverse-square-root spectra, the `E ↔ W` energy maps and the
//!   ground-state index cut.
//! * [`oracle`]: a Numerov shooting solver used to check the above.
//!
//! Everything is generic over [`Real`] (`f32` or `f64`); the aliases below fix
//! the scalar to `f64`.

// `!(x > 0)` rejects NaN along with non-positive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bch;
pub mod error;
pub mod oracle;
pub mod potentials;
pub mod reduction;
pub mod scalar;
pub mod spectra;

pub use bch::{quasipoly_q_values, BchParams, BchValue};
pub use error::{Error, ErrorKind, Result};
pub use oracle::{count_nodes, numerov_integrate, solve_bound_states, solve_energies, BoundState, SolverConfig};
pub use potentials::{
    isr_scalar_potentials, isr_spec_from_length, potential_from_scalar, scalar_potential, vector_potential_sq, Branch,
    Family, PotentialSpec, ScalarVectorPair, UnitSystem,
};
pub use reduction::{
    assemble_wavefunction, ode_residual, prefactor_from_gamma, reduce_to_bch, BranchPolicy, InfinityBranch, OriginRoot,
    SolutionAnsatz, Wavefunction, WavefunctionEvaluator,
};
pub use scalar::Real;
pub use spectra::{
    ground_state_index, isr_energy, isr_energy_dirichlet, isr_energy_quasipoly, isr_entry, quasipoly_oracle_energy,
    quasipoly_oracle_state, rwe_isr_spectrum, rwe_to_schrodinger, schrodinger_to_rwe, BcKind, BoundaryCondition,
    QuasiPolyState, SpectrumEntry,
};

pub type Bch = BchParams<f64>;
pub type Units = UnitSystem<f64>;
pub type Units32 = UnitSystem<f32>;
pub type Potential = PotentialSpec<f64>;
pub type Ansatz = SolutionAnsatz<f64>;
pub type Evaluator = WavefunctionEvaluator<f64>;
pub type Entry = SpectrumEntry<f64>;
pub type Boundary = BoundaryCondition<f64>;
pub type Solver = SolverConfig<f64>;
pub type Solver32 = SolverConfig<f32>;
