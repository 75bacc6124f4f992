//! Classical exact-amplitude simulator for a digital quantum algorithm that
//! prices European options under the Black-Scholes model.
//!
//! The pipeline maps the log-price Black-Scholes PDE onto a Schrödinger-type
//! equation on a `2^n` point lattice, splits the generator into a Hermitian
//! drift part and a non-Hermitian decay part, embeds the decay into a unitary
//! with one extra qubit, expands both diagonal momentum-space operators in the
//! Pauli-Z (Cartan) basis, truncates the expansion and compiles what is left
//! into parity-ladder circuits. Prices are read back after post-selecting the
//! embedding qubit.
//!
//! Modules, bottom up:
//!
//! - [`grid`]: position lattice, momentum spectrum, sampling diagnostics.
//! - [`payoff`]: contract parameters and the duplicated payoff state.
//! - [`hamiltonian`]: momentum-basis eigenvalues, Walsh/Cartan expansion,
//!   closed-form coefficients and the truncation planner.
//! - [`circuit`]: gate IR, compiler, CNOT cancellation, statevector engine and
//!   the dense dilation propagator.
//! - [`pricer`]: end-to-end pricing, post-selection and error metrics.
//! - [`cn`]: Crank-Nicolson reference solver.

pub mod circuit;
pub mod cn;
mod error;
pub mod fourier;
pub mod grid;
pub mod hamiltonian;
pub mod payoff;
pub mod pricer;
mod quadrature;

pub use error::{Error, Result};
pub use grid::{build_grid, GridSpec};
pub use payoff::{ContractParams, OptionSide};
