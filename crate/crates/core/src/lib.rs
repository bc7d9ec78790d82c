//! Modulational stability of periodic traveling waves of generalized nonlinear
//! Schrödinger equations.
//!
//! The analytic pipeline (`nonlinearity` → `moments` → `picard_fuchs` →
//! `modulation` → `pencil_solver`) is generic over [`Real`]; `floquet_oracle`
//! is an independent double-precision spectral check.

pub mod analysis;
pub mod floquet_oracle;
pub mod linalg;
pub mod modulation;
pub mod moments;
pub mod nonlinearity;
pub mod pencil_solver;
pub mod picard_fuchs;
pub mod quadrature;
pub mod roots;
pub mod scalar;

pub use analysis::{analyze, Analysis, AnalysisError};
pub use modulation::Perturbation;
pub use nonlinearity::{CaseId as GenericCaseId, NonlinearitySpec as GenericNonlinearitySpec};
pub use scalar::Real;

pub type WaveParams = nonlinearity::WaveParams<f64>;
pub type QuadraturePolynomial = nonlinearity::QuadraturePolynomial<f64>;
pub type CaseId = nonlinearity::CaseId<f64>;
pub type NonlinearitySpec = nonlinearity::NonlinearitySpec<f64>;
pub type MomentSet = moments::MomentSet<f64>;
pub type DerivativeSet = picard_fuchs::DerivativeSet<f64>;
pub type KernelCoefficients = modulation::KernelCoefficients<f64>;
pub type GenericityReport = modulation::GenericityReport<f64>;
pub type PencilMatrices = modulation::PencilMatrices<f64>;
pub type StabilityReport = pencil_solver::StabilityReport<f64>;
