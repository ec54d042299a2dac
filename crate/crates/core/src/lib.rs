//! Relaxation and decoherence dynamics of a harmonic oscillator coupled to a
//! bosonic heat bath.
//!
//! Three independent solvers are provided and cross-checked against each other:
//!
//! * [`cumulant`]: second-order cumulant equations for Gaussian branches with
//!   arbitrary time-dependent relaxation functions, plus the closed-form
//!   early-time and Markovian solutions.
//! * [`wavepacket`]: coordinate-space densities, interference terms and
//!   decoherence diagnostics built from branch cumulants.
//! * [`fock`]: a truncated number-basis density-matrix integrator for the
//!   phase-sensitive linear bath, the rotating-wave damped oscillator and the
//!   two-quantum bath.
//!
//! Bath descriptions live in [`bath`]; [`scenarios`] wires everything into
//! reproducible figure runs and the acceptance gate.
//!
//! Units: ħ = k_B = 1, position Q = a + a†, time in units of 1/ω.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod bath;
pub mod cumulant;
pub mod error;
pub mod fock;
pub mod ode;
pub mod scenarios;
pub mod wavepacket;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use bath::{bose_occupation, BathMode, BathModel, RelaxationCoefficients};
pub use cumulant::{analytic_markov, make_cat, BranchCumulants, MarkovParams, SuperpositionState};
pub use fock::{DissipatorKind, FockDensityMatrix};
pub use wavepacket::{QGrid, WavepacketFrame};
