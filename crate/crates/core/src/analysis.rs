//! End-to-end evaluation of one wave: polynomial, moments, derivatives,
//! genericity, pencil and slope classification.

use crate::modulation::{self, GenericityReport, KernelCoefficients, ModulationError, PencilMatrices, Perturbation};
use crate::moments::{self, MomentError, MomentSet};
use crate::nonlinearity::{self, CaseId, NonlinearityError, QuadraturePolynomial, WaveParams};
use crate::pencil_solver::{self, PencilError, StabilityReport};
use crate::picard_fuchs::{self, DerivativeSet, PicardFuchsError};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Nonlinearity(#[from] NonlinearityError),
    #[error(transparent)]
    Moments(#[from] MomentError),
    #[error(transparent)]
    PicardFuchs(#[from] PicardFuchsError),
    #[error(transparent)]
    Modulation(#[from] ModulationError),
    #[error(transparent)]
    Pencil(#[from] PencilError),
}

impl AnalysisError {
    /// Short machine-readable name of the failure.
    pub fn kind(&self) -> &'static str {
        match self {
            AnalysisError::Nonlinearity(NonlinearityError::NoBracket) => "NoBracket",
            AnalysisError::Nonlinearity(NonlinearityError::DegenerateRoot { .. }) => "DegenerateRoot",
            AnalysisError::Nonlinearity(NonlinearityError::OutOfDomain(_)) => "OutOfDomain",
            AnalysisError::Nonlinearity(NonlinearityError::RootFinder) => "RootFinder",
            AnalysisError::Moments(MomentError::QuadratureNoConvergence { .. }) => "QuadratureNoConvergence",
            AnalysisError::Moments(MomentError::InvalidIndex(_)) => "InvalidIndex",
            AnalysisError::PicardFuchs(PicardFuchsError::LeadingCoefficientZero) => "LeadingCoefficientZero",
            AnalysisError::PicardFuchs(PicardFuchsError::SingularSylvester { .. }) => "SingularSylvester",
            AnalysisError::PicardFuchs(PicardFuchsError::InvalidIndex(_)) => "InvalidIndex",
            AnalysisError::Modulation(ModulationError::NonGenericKernel { .. }) => "NonGenericKernel",
            AnalysisError::Pencil(PencilError::DegeneratePencil) => "DegeneratePencil",
            AnalysisError::Pencil(PencilError::RootFinder) => "RootFinder",
        }
    }

    /// Whether the failure marks a boundary or degeneracy of the wave family rather
    /// than an invalid request or a numerical breakdown.
    pub fn is_degeneracy(&self) -> bool {
        matches!(
            self,
            AnalysisError::Nonlinearity(NonlinearityError::DegenerateRoot { .. })
                | AnalysisError::PicardFuchs(_)
                | AnalysisError::Modulation(_)
                | AnalysisError::Pencil(PencilError::DegeneratePencil)
        )
    }

    pub fn is_domain(&self) -> bool {
        matches!(
            self,
            AnalysisError::Nonlinearity(NonlinearityError::NoBracket | NonlinearityError::OutOfDomain(_))
        )
    }
}

/// Everything computed for one wave and one perturbation type.
#[derive(Debug, Clone)]
pub struct Analysis<T> {
    pub params: WaveParams<T>,
    pub poly: QuadraturePolynomial<T>,
    pub moments: MomentSet<T>,
    pub derivatives: DerivativeSet<T>,
    pub sylvester_determinant: T,
    pub kernel: KernelCoefficients<T>,
    pub genericity: GenericityReport<T>,
    pub pencil: PencilMatrices<T>,
    pub stability: StabilityReport<T>,
}

/// Runs the analytic pipeline from wave constants and a prepared polynomial.
pub fn analyze_poly<T: Real>(
    params: WaveParams<T>,
    poly: QuadraturePolynomial<T>,
    perturbation: Perturbation,
    threshold: T,
) -> Result<Analysis<T>, AnalysisError> {
    let moments = moments::moment_set(&poly, &params)?;
    let syl = picard_fuchs::solve_sylvester(&poly, &moments)?;
    let derivatives = picard_fuchs::jacobian(&poly, &params, &moments, &syl);
    let kernel = modulation::kernel_coefficients(&derivatives, &moments);
    let genericity = modulation::genericity(&kernel, &derivatives, &moments);
    let pencil = modulation::pencil(&kernel, &derivatives, &moments, &params, perturbation)?;
    let stability = pencil_solver::stability(&pencil, threshold)?;
    Ok(Analysis {
        params,
        poly,
        moments,
        derivatives,
        sylvester_determinant: syl.determinant,
        kernel,
        genericity,
        pencil,
        stability,
    })
}

/// Runs the pipeline from raw wave constants.
pub fn analyze<T: Real>(
    params: WaveParams<T>,
    perturbation: Perturbation,
    threshold: T,
) -> Result<Analysis<T>, AnalysisError> {
    let poly = nonlinearity::build_poly(&params)?;
    analyze_poly(params, poly, perturbation, threshold)
}

/// Runs the pipeline for a root-parameterized case.
pub fn analyze_case<T: Real>(
    case: &CaseId<T>,
    perturbation: Perturbation,
    threshold: T,
) -> Result<Analysis<T>, AnalysisError> {
    let (params, poly) = nonlinearity::from_case(case)?;
    analyze_poly(params, poly, perturbation, threshold)
}
