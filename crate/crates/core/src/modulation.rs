//! Kernel coefficients, genericity tests and the 2x2 quadratic pencils of the
//! modulation normal form.

use crate::linalg::{det3, Matrix};
use crate::moments::MomentSet;
use crate::nonlinearity::{NonlinearityKind, WaveParams};
use crate::picard_fuchs::{DerivativeSet, Param, Quantity};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModulationError {
    #[error("kernel is not two-dimensional: sigma = {sigma:e} is below tolerance")]
    NonGenericKernel { sigma: f64 },
}

/// Relative tolerance for the genericity determinants.
pub const GENERICITY_TOL: f64 = 1e-9;
/// Relative level below which `det M2` is reported as marginal.
pub const MARGINAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Perturbation {
    Longitudinal,
    TransverseElliptic,
    TransverseHyperbolic,
}

impl Perturbation {
    pub const ALL: [Perturbation; 3] = [
        Perturbation::Longitudinal,
        Perturbation::TransverseElliptic,
        Perturbation::TransverseHyperbolic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Perturbation::Longitudinal => "longitudinal",
            Perturbation::TransverseElliptic => "transverse-elliptic",
            Perturbation::TransverseHyperbolic => "transverse-hyperbolic",
        }
    }
}

impl std::str::FromStr for Perturbation {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Perturbation::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown perturbation '{s}'"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelCoefficients<T> {
    pub sigma: T,
    pub gamma: T,
    pub rho: T,
    pub tau: T,
    pub nu: T,
    pub xi: T,
    pub psi: T,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenericityReport<T> {
    pub sigma: T,
    pub det_m2: T,
    /// Bordered determinant of second derivatives of the kinetic integral.
    pub d4: T,
    pub kernel_generic: bool,
    pub chain_generic: bool,
    /// `det M2` is small relative to its terms (near a chain degeneracy).
    pub chain_marginal: bool,
}

/// `lambda^2 M2 + lambda M1 + M0` with `M1 = i * m1_imag`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PencilMatrices<T> {
    pub m2: [[T; 2]; 2],
    pub m1_imag: [[T; 2]; 2],
    pub m0: [[T; 2]; 2],
    pub perturbation: Perturbation,
}

pub fn kernel_coefficients<T: Real>(derivs: &DerivativeSet<T>, moments: &MomentSet<T>) -> KernelCoefficients<T> {
    use Param::*;
    use Quantity::*;
    let br = |x, y| derivs.bracket(Period, QuasiMomentum, x, y);
    let half = T::lit(0.5);
    let t = moments.period;
    KernelCoefficients {
        sigma: br(Energy, AngularMomentum),
        gamma: br(AngularMomentum, Frequency),
        rho: br(Frequency, Energy),
        tau: t * derivs.get(Period, AngularMomentum) * half,
        nu: -t * derivs.get(Period, Energy) * half,
        xi: br(AngularMomentum, Strength),
        psi: br(Strength, Energy),
    }
}

/// Leading pencil coefficient `M2`, shared by all perturbation types.
pub fn second_order_matrix<T: Real>(
    c: &KernelCoefficients<T>,
    derivs: &DerivativeSet<T>,
    moments: &MomentSet<T>,
) -> [[T; 2]; 2] {
    use Param::*;
    use Quantity::*;
    let half = T::lit(0.5);
    let (t, m) = (moments.period, moments.mass);
    let m_e = derivs.get(Mass, Energy);
    let m_k = derivs.get(Mass, AngularMomentum);
    let m_w = derivs.get(Mass, Frequency);
    let s = c.sigma;
    let a2 = -s * half * (c.gamma * m_e + c.rho * m_k + s * m_w);
    let b2 = -s * c.rho * t * half;
    let d2 = -s * half * (c.nu * t + s * m * half);
    [[a2, b2], [b2, d2]]
}

/// Alternative expression `-(sigma/2)(tau M_E + nu M_kappa)` for the off-diagonal of `M2`.
pub fn off_diagonal_dual<T: Real>(c: &KernelCoefficients<T>, derivs: &DerivativeSet<T>) -> T {
    let m_e = derivs.get(Quantity::Mass, Param::Energy);
    let m_k = derivs.get(Quantity::Mass, Param::AngularMomentum);
    -c.sigma * T::lit(0.5) * (c.tau * m_e + c.nu * m_k)
}

/// `-(sigma/2) {eta, T, M}_{kappa, E, omega}` as an independent 3x3 determinant.
pub fn leading_entry_determinant<T: Real>(c: &KernelCoefficients<T>, derivs: &DerivativeSet<T>) -> T {
    use Param::*;
    let row = |q| {
        [
            derivs.get(q, AngularMomentum),
            derivs.get(q, Energy),
            derivs.get(q, Frequency),
        ]
    };
    let det = det3(&[row(Quantity::QuasiMomentum), row(Quantity::Period), row(Quantity::Mass)]);
    -c.sigma * T::lit(0.5) * det
}

/// Bordered 4x4 matrix of second derivatives of the kinetic integral.
pub fn kinetic_hessian<T: Real>(derivs: &DerivativeSet<T>, moments: &MomentSet<T>) -> Matrix<T> {
    use Param::*;
    use Quantity::*;
    let z = T::zero();
    let k_kk = -derivs.get(QuasiMomentum, AngularMomentum);
    let k_ke = derivs.get(Period, AngularMomentum);
    let k_kw = -derivs.get(QuasiMomentum, Frequency);
    let k_ee = derivs.get(Period, Energy);
    let k_ew = derivs.get(Period, Frequency);
    let k_ww = -derivs.get(Mass, Frequency) * T::lit(0.5);
    let t = moments.period;
    Matrix::from_rows(&[
        vec![k_kk, k_ke, k_kw, t],
        vec![k_ke, k_ee, k_ew, z],
        vec![k_kw, k_ew, k_ww, z],
        vec![t, z, z, -moments.mass],
    ])
}

fn hadamard_bound<T: Real>(m: &Matrix<T>) -> T {
    (0..m.dim())
        .map(|i| {
            (0..m.dim())
                .fold(T::zero(), |acc, j| acc + m[(i, j)] * m[(i, j)])
                .sqrt()
        })
        .fold(T::one(), |acc, v| acc * v)
}

fn sigma_scale<T: Real>(derivs: &DerivativeSet<T>) -> T {
    // Full gradient rows: the E/kappa entries alone all vanish in the harmonic limit.
    let row = |q: Quantity| {
        Param::ALL
            .iter()
            .fold(T::zero(), |acc, &p| acc + derivs.get(q, p).abs())
    };
    row(Quantity::Period) * row(Quantity::QuasiMomentum)
}

pub fn genericity<T: Real>(
    c: &KernelCoefficients<T>,
    derivs: &DerivativeSet<T>,
    moments: &MomentSet<T>,
) -> GenericityReport<T> {
    let gtol = T::lit(GENERICITY_TOL);
    let m2 = second_order_matrix(c, derivs, moments);
    let det_m2 = m2[0][0] * m2[1][1] - m2[0][1] * m2[1][0];
    let hess = kinetic_hessian(derivs, moments);
    let d4 = hess.determinant();
    let m2_scale = (m2[0][0] * m2[1][1]).abs() + m2[0][1] * m2[0][1];
    GenericityReport {
        sigma: c.sigma,
        det_m2,
        d4,
        kernel_generic: c.sigma.abs() > gtol * sigma_scale(derivs),
        chain_generic: d4.abs() > gtol * hadamard_bound(&hess),
        chain_marginal: det_m2.is_nan() || det_m2.abs() < T::lit(MARGINAL_TOL) * m2_scale,
    }
}

fn require_generic<T: Real>(c: &KernelCoefficients<T>, derivs: &DerivativeSet<T>) -> Result<(), ModulationError> {
    if c.sigma.abs() > T::lit(GENERICITY_TOL) * sigma_scale(derivs) {
        Ok(())
    } else {
        Err(ModulationError::NonGenericKernel {
            sigma: c.sigma.as_f64(),
        })
    }
}

pub fn longitudinal_pencil<T: Real>(
    c: &KernelCoefficients<T>,
    derivs: &DerivativeSet<T>,
    moments: &MomentSet<T>,
    params: &WaveParams<T>,
) -> Result<PencilMatrices<T>, ModulationError> {
    require_generic(c, derivs)?;
    let two = T::lit(2.0);
    let s = c.sigma;
    let t = moments.period;
    let a1 = two * s * t * c.rho;
    let b1 = s * t * (c.nu + c.gamma);
    let d1 = s * t * (two * c.tau + s * params.angular_momentum);
    let a0 = two * s * t * c.nu;
    let b0 = two * s * t * c.tau;
    let d0 = two * s * t * (params.frequency * c.gamma + params.strength * c.xi - params.energy * s);
    Ok(PencilMatrices {
        m2: second_order_matrix(c, derivs, moments),
        m1_imag: [[a1, b1], [b1, d1]],
        m0: [[a0, b0], [b0, d0]],
        perturbation: Perturbation::Longitudinal,
    })
}

pub fn transverse_pencil<T: Real>(
    c: &KernelCoefficients<T>,
    derivs: &DerivativeSet<T>,
    moments: &MomentSet<T>,
    params: &WaveParams<T>,
    kind: Perturbation,
) -> Result<PencilMatrices<T>, ModulationError> {
    require_generic(c, derivs)?;
    let s2 = c.sigma * c.sigma;
    let (t, m, u) = (moments.period, moments.mass, moments.potential);
    let sign = if kind == Perturbation::TransverseHyperbolic {
        -T::one()
    } else {
        T::one()
    };
    let a0 = -s2 * m * sign;
    let b0 = -s2 * params.angular_momentum * t * sign;
    let d0 = -s2 * (T::lit(2.0) * params.energy * t - params.frequency * m - params.strength * u) * sign;
    let z = T::zero();
    Ok(PencilMatrices {
        m2: second_order_matrix(c, derivs, moments),
        m1_imag: [[z, z], [z, z]],
        m0: [[a0, b0], [b0, d0]],
        perturbation: kind,
    })
}

/// Dispatches to the longitudinal or transverse construction.
pub fn pencil<T: Real>(
    c: &KernelCoefficients<T>,
    derivs: &DerivativeSet<T>,
    moments: &MomentSet<T>,
    params: &WaveParams<T>,
    kind: Perturbation,
) -> Result<PencilMatrices<T>, ModulationError> {
    match kind {
        Perturbation::Longitudinal => longitudinal_pencil(c, derivs, moments, params),
        _ => transverse_pencil(c, derivs, moments, params, kind),
    }
}

/// Closed form of `sigma` in terms of the moments and the Sylvester determinant
/// for the pure cubic and quintic nonlinearities.
///
/// Cubic: `kappa^2 zeta^3 (3 kappa^2 T^2 - 4 E M T + omega M^2) / (8 det S)`;
/// quintic: `16 kappa^2 zeta^4 (4 kappa^4 T^2 + (4 kappa^2 omega - 9 E^2) T J_2 + omega^2 J_2^2) / (81 det S)`.
pub fn sigma_closed_form<T: Real>(params: &WaveParams<T>, moments: &MomentSet<T>, sylvester_det: T) -> Option<T> {
    let (e, k, w, z) = (
        params.energy,
        params.angular_momentum,
        params.frequency,
        params.strength,
    );
    let (t, m) = (moments.period, moments.mass);
    let k2 = k * k;
    let lit = T::lit;
    match params.nonlinearity.kind {
        NonlinearityKind::Cubic => {
            let q = lit(3.0) * k2 * t * t - lit(4.0) * e * m * t + w * m * m;
            Some(k2 * z.powi(3) * q / (lit(8.0) * sylvester_det))
        }
        NonlinearityKind::Quintic => {
            let j2 = moments.get(2);
            let q = lit(4.0) * k2 * k2 * t * t + (lit(4.0) * k2 * w - lit(9.0) * e * e) * t * j2 + w * w * j2 * j2;
            Some(lit(16.0) * k2 * z.powi(4) * q / (lit(81.0) * sylvester_det))
        }
        NonlinearityKind::GeneralPoly => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::moment_set;
    use crate::nonlinearity::{build_poly, from_case, NonlinearitySpec};
    use crate::picard_fuchs::{derivatives, solve_sylvester};

    type CaseId = crate::nonlinearity::CaseId<f64>;
    type WaveParams = crate::nonlinearity::WaveParams<f64>;

    fn setup(case: CaseId) -> (WaveParams, MomentSet<f64>, DerivativeSet<f64>, KernelCoefficients<f64>) {
        let (p, poly) = from_case(&case).unwrap();
        let m = moment_set(&poly, &p).unwrap();
        let ds = derivatives(&poly, &p, &m).unwrap();
        let c = kernel_coefficients(&ds, &m);
        (p, m, ds, c)
    }

    #[test]
    fn harmonic_kernel_is_degenerate() {
        let p = WaveParams::new(1.0, 0.5, 1.0, 0.0, NonlinearitySpec::cubic());
        let poly = build_poly(&p).unwrap();
        let m = moment_set(&poly, &p).unwrap();
        let ds = derivatives(&poly, &p, &m).unwrap();
        let c = kernel_coefficients(&ds, &m);
        assert!(c.sigma.abs() < 1e-12);
        assert!(!genericity(&c, &ds, &m).kernel_generic);
        assert!(matches!(
            longitudinal_pencil(&c, &ds, &m, &p),
            Err(ModulationError::NonGenericKernel { .. })
        ));
    }

    #[test]
    fn cubic_focusing_is_generic() {
        let (_, m, ds, c) = setup(CaseId::CubicFocusing { k: 0.65, b: 0.423 });
        let g = genericity(&c, &ds, &m);
        assert!(g.kernel_generic && g.chain_generic);
    }

    #[test]
    fn off_diagonal_forms_agree() {
        let (_, m, ds, c) = setup(CaseId::QuinticFocusing2 { phi: 0.4, m: 0.3 });
        let m2 = second_order_matrix(&c, &ds, &m);
        assert!((m2[0][1] - off_diagonal_dual(&c, &ds)).abs() < 1e-9 * m2[0][1].abs());
    }

    #[test]
    fn leading_entry_as_determinant() {
        let (_, m, ds, c) = setup(CaseId::CubicDefocusing { l: 0.2, m: 0.5 });
        let m2 = second_order_matrix(&c, &ds, &m);
        assert!((m2[0][0] - leading_entry_determinant(&c, &ds)).abs() < 1e-10 * m2[0][0].abs());
    }

    #[test]
    fn determinant_factorisation() {
        // det M2 = -sigma^3 D4 / 4
        let (_, m, ds, c) = setup(CaseId::QuinticFocusing4 { l: 0.3, m: 0.5 });
        let g = genericity(&c, &ds, &m);
        let rhs = -c.sigma.powi(3) * g.d4 / 4.0;
        assert!((g.det_m2 - rhs).abs() < 1e-8 * rhs.abs());
    }

    #[test]
    fn closed_form_sigma() {
        for case in [
            CaseId::CubicFocusing { k: 0.5, b: 0.5 },
            CaseId::QuinticDefocusing { l: 0.6, m: 0.3 },
        ] {
            let (p, poly) = from_case(&case).unwrap();
            let m = moment_set(&poly, &p).unwrap();
            let syl = solve_sylvester(&poly, &m).unwrap();
            let c = kernel_coefficients(&crate::picard_fuchs::jacobian(&poly, &p, &m, &syl), &m);
            let cf = sigma_closed_form(&p, &m, syl.determinant).unwrap();
            assert!((c.sigma - cf).abs() < 1e-8 * cf.abs(), "{case:?}");
        }
    }

    #[test]
    fn transverse_signs() {
        let (p, m, ds, c) = setup(CaseId::QuinticFocusing4 { l: 0.01, m: 0.4 });
        let e = transverse_pencil(&c, &ds, &m, &p, Perturbation::TransverseElliptic).unwrap();
        let h = transverse_pencil(&c, &ds, &m, &p, Perturbation::TransverseHyperbolic).unwrap();
        assert_eq!(e.m2, h.m2);
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(e.m0[i][j], -h.m0[i][j]);
            }
        }
        assert!(e.m0[0][0] < 0.0);
    }

    #[test]
    fn perturbation_names_round_trip() {
        for p in Perturbation::ALL {
            assert_eq!(p.name().parse::<Perturbation>().unwrap(), p);
        }
    }
}
