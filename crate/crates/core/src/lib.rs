//! Random free-fermion model `H = α Σ c_i†c_i + η Σ c_i† V_ij c_j` with `V`
//! drawn from the GOE: exact diagonalization, eigenstate and thermal
//! correlation matrices, entanglement entropies, the fully random Fock-sector
//! comparison, and seeded Monte Carlo ensembles that test each analytic
//! prediction.
//!
//! Numerical code is generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the scalar to `f64`, with `*32` variants for `f32`.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod entanglement;
pub mod error;
pub mod experiments;
pub mod goe;
pub mod model;
pub mod random_fock;
pub mod rng;
pub mod scalar;
pub mod thermal;

pub use error::{Error, Result};
pub use rng::Seed;
pub use scalar::Real;

pub type Params = model::ModelParams<f64>;
pub type Model = model::FreeFermionModel<f64>;
pub type Correlation = model::CorrelationMatrix<f64>;
pub type DenseMatrix = goe::Matrix<f64>;
pub type PackedSymmetric = goe::SymmetricMatrix<f64>;
pub type Eigen = goe::SymmetricEigen<f64>;
pub type Semicircle = goe::SemicircleLaw<f64>;
pub type Averages = thermal::ThermalAverages<f64>;

pub type Params32 = model::ModelParams<f32>;
pub type Model32 = model::FreeFermionModel<f32>;
pub type Correlation32 = model::CorrelationMatrix<f32>;
pub type DenseMatrix32 = goe::Matrix<f32>;
pub type PackedSymmetric32 = goe::SymmetricMatrix<f32>;
pub type Eigen32 = goe::SymmetricEigen<f32>;
pub type Semicircle32 = goe::SemicircleLaw<f32>;
pub type Averages32 = thermal::ThermalAverages<f32>;
