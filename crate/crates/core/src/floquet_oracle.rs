//! Independent spectral check: the wave profile is rebuilt by ODE integration and
//! the linearised operator is truncated on a Fourier basis with Floquet shift.
//!
//! Double precision only; the eigen-solve is delegated to `nalgebra`'s complex Schur form.

use nalgebra::DMatrix;
use num_complex::Complex;
use ode_solvers::{Dop853, System, Vector2};
use rustfft::FftPlanner;

use crate::modulation::Perturbation;
use crate::moments::{self, MomentError};
use crate::nonlinearity::{QuadraturePolynomial, WaveParams};

type C64 = Complex<f64>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("integrated orbit does not close: |z(T) - r1| = {mismatch:e}")]
    PeriodMismatch { mismatch: f64 },
    #[error("Fourier tail beyond mode {modes} holds {tail:e} of the energy")]
    InsufficientModes { modes: usize, tail: f64 },
    #[error("eigenvalue iteration did not converge")]
    EigenNoConvergence,
    #[error("near-origin eigenvalues are not separated (gap ratio {ratio:.3})")]
    TrackingAmbiguous { ratio: f64 },
    #[error("ODE integration failed: {0}")]
    Integration(String),
    #[error(transparent)]
    Moments(#[from] MomentError),
}

/// Relative Fourier tail energy above which a truncation is rejected.
pub const TAIL_TOL: f64 = 1e-8;
pub const DEFAULT_MODES: usize = 20;
pub const MAX_MODES: usize = 512;
pub const DEFAULT_EPSILON: f64 = 1e-2;

/// Wave profile on a uniform grid over one period.
#[derive(Debug, Clone)]
pub struct WaveProfile {
    pub params: WaveParams<f64>,
    pub period: f64,
    /// `z = A^2` at `y_i = i T / n`.
    pub z: Vec<f64>,
    pub dz: Vec<f64>,
    pub amplitude: Vec<f64>,
    /// `S_y = kappa / A^2`.
    pub phase_rate: Vec<f64>,
    /// `S_yy`.
    pub phase_curvature: Vec<f64>,
    /// Normalised FFT coefficients (index `n mod len`) of `S_y`, `S_yy`, and the two potentials.
    pub fourier: ProfileSpectra,
}

#[derive(Debug, Clone)]
pub struct ProfileSpectra {
    pub phase_rate: Vec<C64>,
    pub phase_curvature: Vec<C64>,
    /// `-omega + S_y^2 - zeta f(z)`.
    pub potential_minus: Vec<C64>,
    /// `-omega + S_y^2 - zeta f(z) - 2 zeta f'(z) z`.
    pub potential_plus: Vec<C64>,
}

/// Truncated linearised operator at one Floquet/transverse parameter.
#[derive(Debug, Clone)]
pub struct GalerkinOperator {
    pub parameter: f64,
    pub perturbation: Perturbation,
    pub modes: usize,
    pub matrix: DMatrix<C64>,
}

struct Oscillator<'a> {
    poly: &'a QuadraturePolynomial<f64>,
}

impl System<f64, Vector2<f64>> for Oscillator<'_> {
    fn system(&self, _y: f64, s: &Vector2<f64>, ds: &mut Vector2<f64>) {
        ds[0] = s[1];
        ds[1] = 2.0 * self.poly.derivative(s[0]);
    }
}

/// Number of profile samples used for `modes` Fourier modes.
pub fn samples_for(modes: usize) -> usize {
    (8 * modes).next_power_of_two().max(256)
}

fn fft(values: &[f64]) -> Vec<C64> {
    let n = values.len();
    let mut buf: Vec<C64> = values.iter().map(|&v| C64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let scale = 1.0 / n as f64;
    buf.iter_mut().for_each(|c| *c *= scale);
    buf
}

/// Integrates `z'' = 2 P'(z)` from the lower turning point over one period.
pub fn reconstruct_wave(
    params: &WaveParams<f64>,
    poly: &QuadraturePolynomial<f64>,
    samples: usize,
) -> Result<WaveProfile, OracleError> {
    let period = moments::moment(poly, 0)?;
    let (r1, r2) = poly.bracket;
    let dx = period / samples as f64;
    let mut stepper = Dop853::new(
        Oscillator { poly },
        0.0,
        period,
        dx,
        Vector2::new(r1, 0.0),
        1e-12,
        1e-14,
    );
    stepper
        .integrate()
        .map_err(|e| OracleError::Integration(format!("{e:?}")))?;
    let (xs, ys) = (stepper.x_out(), stepper.y_out());
    let last = ys.last().ok_or_else(|| OracleError::Integration("no output".into()))?;
    let mismatch = (last[0] - r1).abs();
    if mismatch > 1e-6 * (r2 - r1) {
        return Err(OracleError::PeriodMismatch { mismatch });
    }
    let mut z = Vec::with_capacity(samples);
    let mut dz = Vec::with_capacity(samples);
    for (x, y) in xs.iter().zip(ys.iter()) {
        if z.len() == samples {
            break;
        }
        if (x - z.len() as f64 * dx).abs() <= 1e-9 * period {
            z.push(y[0]);
            dz.push(y[1]);
        }
    }
    if z.len() != samples {
        return Err(OracleError::Integration(format!(
            "dense output produced {} of {samples} samples",
            z.len()
        )));
    }
    let kappa = params.angular_momentum;
    let (w, zeta) = (params.frequency, params.strength);
    let nl = &params.nonlinearity;
    let amplitude = z.iter().map(|v| v.sqrt()).collect();
    let phase_rate: Vec<f64> = z.iter().map(|v| kappa / v).collect();
    let phase_curvature: Vec<f64> = z.iter().zip(&dz).map(|(v, d)| -kappa * d / (v * v)).collect();
    let vminus: Vec<f64> = z
        .iter()
        .zip(&phase_rate)
        .map(|(&v, s)| -w + s * s - zeta * nl.f(v))
        .collect();
    let vplus: Vec<f64> = vminus
        .iter()
        .zip(&z)
        .map(|(vm, &v)| vm - 2.0 * zeta * nl.f_prime_times_z(v))
        .collect();
    let fourier = ProfileSpectra {
        phase_rate: fft(&phase_rate),
        phase_curvature: fft(&phase_curvature),
        potential_minus: fft(&vminus),
        potential_plus: fft(&vplus),
    };
    Ok(WaveProfile {
        params: params.clone(),
        period,
        z,
        dz,
        amplitude,
        phase_rate,
        phase_curvature,
        fourier,
    })
}

fn tail_fraction(c: &[C64], modes: usize) -> f64 {
    let n = c.len();
    let mut total = 0.0;
    let mut tail = 0.0;
    for (i, v) in c.iter().enumerate() {
        let freq = if i <= n / 2 { i } else { n - i };
        let e = v.norm_sqr();
        total += e;
        if freq > modes {
            tail += e;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        tail / total
    }
}

/// Worst relative Fourier tail over the operator coefficient fields.
pub fn truncation_tail(profile: &WaveProfile, modes: usize) -> f64 {
    let f = &profile.fourier;
    [&f.phase_rate, &f.phase_curvature, &f.potential_minus, &f.potential_plus]
        .iter()
        .map(|c| tail_fraction(c, modes))
        .fold(0.0, f64::max)
}

/// Assembles `[[K, -L_-], [L_+, K]]` on modes `-N..=N`.
///
/// Longitudinal: `d/dy -> i(2 pi n / T + mu)`; transverse: `+-k^2` added to both `L_+` and `L_-`.
pub fn build_operator(
    profile: &WaveProfile,
    perturbation: Perturbation,
    parameter: f64,
    modes: usize,
) -> Result<GalerkinOperator, OracleError> {
    let ns = profile.z.len();
    let tail = truncation_tail(profile, modes);
    if ns < 4 * modes + 1 || tail > TAIL_TOL {
        return Err(OracleError::InsufficientModes { modes, tail });
    }
    let size = 2 * modes + 1;
    let k0 = 2.0 * std::f64::consts::PI / profile.period;
    let (shift, extra) = match perturbation {
        Perturbation::Longitudinal => (parameter, 0.0),
        Perturbation::TransverseElliptic => (0.0, parameter * parameter),
        Perturbation::TransverseHyperbolic => (0.0, -parameter * parameter),
    };
    let wave = |n: usize| k0 * (n as f64 - modes as f64) + shift;
    let coeff = |c: &[C64], n: usize, m: usize| c[(n as isize - m as isize).rem_euclid(ns as isize) as usize];
    let f = &profile.fourier;
    let mut mat = DMatrix::<C64>::zeros(2 * size, 2 * size);
    for n in 0..size {
        for m in 0..size {
            let deriv_m = C64::new(0.0, wave(m));
            let k = coeff(&f.phase_curvature, n, m) + coeff(&f.phase_rate, n, m) * deriv_m * 2.0;
            let mut lminus = coeff(&f.potential_minus, n, m);
            let mut lplus = coeff(&f.potential_plus, n, m);
            if n == m {
                let q2 = wave(n) * wave(n) + extra;
                lminus += q2;
                lplus += q2;
            }
            mat[(n, m)] = k;
            mat[(size + n, size + m)] = k;
            mat[(n, size + m)] = -lminus;
            mat[(size + n, m)] = lplus;
        }
    }
    Ok(GalerkinOperator {
        parameter,
        perturbation,
        modes,
        matrix: mat,
    })
}

/// Eigenvalues sorted by `|Im|`, then `|Re|`.
pub fn spectrum(op: &GalerkinOperator) -> Result<Vec<C64>, OracleError> {
    let schur = nalgebra::Schur::try_new(op.matrix.clone(), 1e-14, 10_000).ok_or(OracleError::EigenNoConvergence)?;
    let ev = schur.eigenvalues().ok_or(OracleError::EigenNoConvergence)?;
    let mut v: Vec<C64> = ev.iter().copied().collect();
    v.sort_by(|a, b| {
        a.im.abs()
            .partial_cmp(&b.im.abs())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.re.abs().partial_cmp(&b.re.abs()).unwrap_or(std::cmp::Ordering::Equal))
    });
    Ok(v)
}

/// Slopes of the four spectral curves through the origin.
#[derive(Debug, Clone)]
pub struct SlopeEstimate {
    pub slopes: [C64; 4],
    pub modes: usize,
    pub epsilon: f64,
}

fn by_modulus(mut v: Vec<C64>) -> Vec<C64> {
    v.sort_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap_or(std::cmp::Ordering::Equal));
    v
}

/// Profile and operator at the smallest admissible mode count `>= modes` (doubling up to [`MAX_MODES`]).
pub fn resolve_modes(
    params: &WaveParams<f64>,
    poly: &QuadraturePolynomial<f64>,
    modes: usize,
) -> Result<(WaveProfile, usize), OracleError> {
    let mut n = modes.max(1);
    loop {
        let profile = reconstruct_wave(params, poly, samples_for(n))?;
        let tail = truncation_tail(&profile, n);
        if tail <= TAIL_TOL {
            return Ok((profile, n));
        }
        if n >= MAX_MODES {
            return Err(OracleError::InsufficientModes { modes: n, tail });
        }
        n = (2 * n).min(MAX_MODES);
    }
}

/// Eigenvalues at `epsilon`, tracked from `epsilon / 2`, divided by `epsilon`.
pub fn slope_estimate(
    params: &WaveParams<f64>,
    poly: &QuadraturePolynomial<f64>,
    perturbation: Perturbation,
    epsilon: f64,
    modes: usize,
) -> Result<SlopeEstimate, OracleError> {
    let (profile, modes) = resolve_modes(params, poly, modes)?;
    let at = |p: f64| -> Result<Vec<C64>, OracleError> {
        Ok(by_modulus(spectrum(&build_operator(
            &profile,
            perturbation,
            p,
            modes,
        )?)?))
    };
    let half = at(0.5 * epsilon)?;
    let full = at(epsilon)?;
    let ratio = full[4].norm() / full[3].norm().max(f64::MIN_POSITIVE);
    if ratio < 2.0 {
        return Err(OracleError::TrackingAmbiguous { ratio });
    }
    let mut pool: Vec<C64> = full[..4].to_vec();
    let mut slopes = [C64::new(0.0, 0.0); 4];
    for (slot, prev) in slopes.iter_mut().zip(half.iter().take(4)) {
        let predicted = prev * 2.0;
        let (idx, _) = pool
            .iter()
            .enumerate()
            .map(|(i, v)| (i, (v - predicted).norm()))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
            .expect("nonempty pool");
        *slot = pool.remove(idx) / epsilon;
    }
    Ok(SlopeEstimate { slopes, modes, epsilon })
}

/// Hausdorff distance between two point sets divided by the largest modulus.
pub fn relative_hausdorff(a: &[C64], b: &[C64]) -> f64 {
    let directed = |x: &[C64], y: &[C64]| {
        x.iter()
            .map(|p| y.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    let scale = a
        .iter()
        .chain(b)
        .map(|v| v.norm())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    directed(a, b).max(directed(b, a)) / scale
}
