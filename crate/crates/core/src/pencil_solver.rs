//! Expands `det(lambda^2 M2 + lambda M1 + M0)` into a real quartic, solves it and
//! classifies the slopes of the spectral curves at the origin.

use num_complex::Complex;

use crate::modulation::PencilMatrices;
use crate::roots;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PencilError {
    #[error("pencil determinant vanishes identically")]
    DegeneratePencil,
    #[error("companion eigenvalue iteration did not converge")]
    RootFinder,
}

/// Default classification threshold on `|Re lambda| / max(1, |lambda|)`.
pub const DEFAULT_THRESHOLD: f64 = 1e-6;
/// Threshold matching the published focusing-cubic diagrams.
pub const FIGURE_THRESHOLD: f64 = 1e-4;

const DEFLATION_TOL: f64 = 1e-13;

/// Roots of the quartic in `s = i lambda`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuarticRoots<T> {
    pub roots: Vec<Complex<T>>,
    /// Number of roots lost to a vanishing leading coefficient.
    pub at_infinity: usize,
    /// `|q(s)| / (||c|| max(1,|s|)^4)` per root.
    pub residuals: Vec<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport<T> {
    /// Slopes `lambda` (with `mu` or `k` normalised to one).
    pub roots: Vec<Complex<T>>,
    pub n_real: usize,
    pub n_imag: usize,
    pub n_complex: usize,
    /// Number of roots with nonzero real part.
    pub unstable_dim: usize,
    pub residuals: Vec<T>,
    pub at_infinity: usize,
    pub threshold: T,
}

fn mul<T: Real>(a: &[T; 3], b: &[T; 3]) -> [T; 5] {
    let mut out = [T::zero(); 5];
    for i in 0..3 {
        for j in 0..3 {
            out[i + j] += a[i] * b[j];
        }
    }
    out
}

/// Coefficients of `det` in `s` after `lambda = -i s`, highest degree first.
pub fn quartic_coeffs<T: Real>(pencil: &PencilMatrices<T>) -> Result<[T; 5], PencilError> {
    let entry = |i: usize, j: usize| [pencil.m0[i][j], pencil.m1_imag[i][j], -pencil.m2[i][j]];
    let ad = mul(&entry(0, 0), &entry(1, 1));
    let bc = mul(&entry(0, 1), &entry(1, 0));
    let mut c = [T::zero(); 5];
    for k in 0..5 {
        c[4 - k] = ad[k] - bc[k];
    }
    let scale = [pencil.m2, pencil.m1_imag, pencil.m0]
        .iter()
        .flat_map(|m| m.iter().flatten())
        .fold(T::zero(), |acc, v| acc.max(v.abs()));
    let tol = T::lit(DEFLATION_TOL) * scale * scale;
    if scale == T::zero() || c.iter().all(|v| v.abs() <= tol) {
        return Err(PencilError::DegeneratePencil);
    }
    Ok(c)
}

/// Solves the quartic (highest coefficient first), deflating vanishing leading terms.
pub fn solve_quartic<T: Real>(coeffs: &[T; 5]) -> Result<QuarticRoots<T>, PencilError> {
    let norm = coeffs.iter().fold(T::zero(), |acc, v| acc + *v * *v).sqrt();
    if norm == T::zero() {
        return Err(PencilError::DegeneratePencil);
    }
    let mut lead = 0;
    while lead < 4 && coeffs[lead].abs() < T::lit(DEFLATION_TOL) * norm {
        lead += 1;
    }
    if lead == 4 {
        return Err(PencilError::DegeneratePencil);
    }
    let ascending: Vec<T> = coeffs[lead..].iter().rev().copied().collect();
    let found = roots::roots(&ascending).map_err(|_| PencilError::RootFinder)?;
    let full: Vec<T> = coeffs.iter().rev().copied().collect();
    let residuals = found
        .iter()
        .map(|s| {
            let (q, _) = roots::eval_with_derivative(&full, *s);
            q.norm() / (norm * s.norm().max(T::one()).powi(4))
        })
        .collect();
    Ok(QuarticRoots {
        roots: found,
        at_infinity: lead,
        residuals,
    })
}

/// Maps `s` roots back to slopes `lambda = -i s`.
pub fn slopes<T: Real>(q: &QuarticRoots<T>) -> Vec<Complex<T>> {
    q.roots.iter().map(|s| Complex::new(s.im, -s.re)).collect()
}

/// Pairs each root with its nearest `-conj` partner and averages, so that the
/// returned set is exactly closed under `lambda -> -conj(lambda)`.
pub fn symmetrize<T: Real>(roots: &[Complex<T>]) -> Vec<Complex<T>> {
    let n = roots.len();
    let mut out = roots.to_vec();
    let mut used = vec![false; n];
    let half = T::lit(0.5);
    for i in 0..n {
        if used[i] {
            continue;
        }
        let target = -roots[i].conj();
        let j = (0..n)
            .filter(|&j| !used[j])
            .min_by(|&a, &b| {
                (roots[a] - target)
                    .norm()
                    .partial_cmp(&(roots[b] - target).norm())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap_or(i);
        let avg = (roots[i] - roots[j].conj()) * half;
        used[i] = true;
        used[j] = true;
        if i == j {
            out[i] = Complex::new(T::zero(), roots[i].im);
        } else {
            out[i] = avg;
            out[j] = -avg.conj();
        }
    }
    out
}

/// Counts roots by type; a root has zero real part iff `|Re| <= threshold max(1,|lambda|)`.
pub fn classify<T: Real>(roots: &[Complex<T>], threshold: T) -> StabilityReport<T> {
    let sym = symmetrize(roots);
    let (mut n_real, mut n_imag, mut n_complex) = (0, 0, 0);
    for r in &sym {
        let tol = threshold * r.norm().max(T::one());
        if r.re.abs() <= tol {
            n_imag += 1;
        } else if r.im.abs() <= tol {
            n_real += 1;
        } else {
            n_complex += 1;
        }
    }
    StabilityReport {
        roots: roots.to_vec(),
        n_real,
        n_imag,
        n_complex,
        unstable_dim: n_real + n_complex,
        residuals: Vec::new(),
        at_infinity: 0,
        threshold,
    }
}

/// Quartic expansion, root solve and classification in one step.
pub fn stability<T: Real>(pencil: &PencilMatrices<T>, threshold: T) -> Result<StabilityReport<T>, PencilError> {
    let c = quartic_coeffs(pencil)?;
    let q = solve_quartic(&c)?;
    let mut report = classify(&slopes(&q), threshold);
    report.residuals = q.residuals;
    report.at_infinity = q.at_infinity;
    Ok(report)
}
