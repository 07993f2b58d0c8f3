//! Exact simulation of permutation-symmetric ensembles of particles carrying
//! two two-level degrees of freedom, with polynomial-cost computation of the
//! algebraic entanglement entropy between the two collective degrees of
//! freedom.
//!
//! The state space is the bosonic occupation basis over the four joint
//! single-particle levels, of dimension `(N + 1)(N + 2)(N + 3) / 6`. On top of
//! it, [`pyramid`] builds the orthonormal ladder basis `|l, m_j, m_k>` layer by
//! layer, and [`entropy`] reduces a state to one small Hermitian block per
//! layer whose eigenvalues, weighted by the layer multiplicity, give the von
//! Neumann entropy of either reduced degree of freedom.
//!
//! [`dynamics`] integrates Schroedinger and Lindblad equations with the sparse
//! collective operators from [`operators`], [`models`] assembles the concrete
//! physical systems, and [`oracle`] is an exponential-cost reference
//! implementation in the full `4^N` single-particle space used to validate
//! everything at small particle number.

pub mod basis;
pub mod dynamics;
pub mod entropy;
pub mod error;
pub mod models;
pub mod ode;
pub mod operators;
pub mod oracle;
pub mod pyramid;
pub mod sparse;
pub mod validation;

pub use basis::{sym_dim, Dof, DensityMatrix, Occupation, StateVector, SymBasis};
pub use entropy::EntropyReport;
pub use error::{Error, Result};
pub use models::ModelParams;
pub use pyramid::PyramidBasis;
