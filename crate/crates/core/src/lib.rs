//! Matrix Schrödinger operators on the line: Jost solutions, scattering data,
//! finite-difference spectra, trace formulas and Lieb–Thirring bounds.

pub mod corpus;
pub mod error;
pub mod field;
pub mod gamma;
pub mod grid;
pub mod jost;
pub mod linalg;
pub mod ltbounds;
pub mod potential;
pub mod quadrature;
pub mod scattering;
pub mod spectrum;
pub mod sumrules;

pub use error::{Error, Result};
pub use grid::{make_grid, Grid};
pub use jost::{jost_solve, t_matrix, Direction, JostSolution};
pub use potential::{build_potential, build_potential_with_spacing, Envelope, MatrixPotential, PointwiseEigenvalues, PotentialSpec, Smoothness};
pub use scattering::{bound_states_from_det_a, scattering_scan, BoundStateSet, ScatteringData};
pub use field::{Box2d, Field3d, Potential2dSpec};
pub use spectrum::{fd_eigensolve_1d, fd_eigensolve_2d, riesz_mean, slice_spectrum, SliceOperatorSpectrum, SpectrumResult};
pub use sumrules::{integral_ij, logdet_series_check, sum_rule_report, SumRuleReport};
pub use ltbounds::{aizenman_lieb_identity, classical_constant, lifting_chain_check, lt_ratio, lt_ratio_2d, pauli_rhs, weyl_scan, LtReport};
