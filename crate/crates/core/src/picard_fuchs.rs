//! Exact moment calculus: the moment recurrence, the extended Sylvester system for
//! the three-halves-power integrals `D_n`, and the Jacobian of the wave quantities.

use crate::linalg::Matrix;
use crate::moments::MomentSet;
use crate::nonlinearity::{QuadraturePolynomial, WaveParams};
use crate::roots;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PicardFuchsError {
    #[error("leading coefficient of P vanishes; the moment recurrence cannot be solved")]
    LeadingCoefficientZero,
    #[error("Sylvester system is singular (condition {condition:e}): P has a repeated root")]
    SingularSylvester { condition: f64 },
    #[error("moment index {0} is below the stored range")]
    InvalidIndex(i32),
}

/// Wave quantities differentiated by [`jacobian`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantity {
    Period = 0,
    Mass = 1,
    QuasiMomentum = 2,
    Potential = 3,
}

/// Wave constants the quantities depend on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Param {
    Energy = 0,
    AngularMomentum = 1,
    Frequency = 2,
    Strength = 3,
}

impl Param {
    pub const ALL: [Param; 4] = [Param::Energy, Param::AngularMomentum, Param::Frequency, Param::Strength];
}

impl Quantity {
    pub const ALL: [Quantity; 4] = [
        Quantity::Period,
        Quantity::Mass,
        Quantity::QuasiMomentum,
        Quantity::Potential,
    ];
}

/// Solution of the extended Sylvester system.
#[derive(Debug, Clone, PartialEq)]
pub struct SylvesterSolution<T> {
    /// `D_{-1} .. D_{2d-2}`, indexed by `n + 1`.
    pub d: Vec<T>,
    /// 1-norm condition number of the system matrix.
    pub condition: T,
    /// Determinant of the system matrix as assembled.
    pub determinant: T,
    /// Degree of `P` used for the assembly.
    pub degree: usize,
}

/// Exact Jacobian of `(T, M, eta, U)` with respect to `(E, kappa, omega, zeta)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeSet<T> {
    /// `jac[quantity][param]`.
    pub jac: [[T; 4]; 4],
    /// `D_{-1} ..` as used, including recurrence extensions.
    pub d: Vec<T>,
    pub condition: T,
}

impl<T: Real> DerivativeSet<T> {
    pub fn get(&self, q: Quantity, p: Param) -> T {
        self.jac[q as usize][p as usize]
    }

    /// `{A, B}_{a,b} = A_a B_b - A_b B_a`.
    pub fn bracket(&self, a: Quantity, b: Quantity, x: Param, y: Param) -> T {
        self.get(a, x) * self.get(b, y) - self.get(a, y) * self.get(b, x)
    }
}

/// Suggested warning level for the Sylvester condition number.
pub const CONDITION_WARNING: f64 = 1e10;

/// Extends `j` (holding `J_{-1}..`) upward to index `upto` with the moment recurrence
/// `sum_{i=0}^{d} (i + 2s) alpha_i J_{i+s-1} = 0`.
fn extend_moments<T: Real>(alpha: &[T], j: &mut Vec<T>, upto: i32) {
    let d = alpha.len() - 1;
    while (j.len() as i32 - 2) < upto {
        let n = j.len() as i32 - 1;
        let s = n - d as i32 + 1;
        let mut rhs = T::zero();
        for (i, &a) in alpha.iter().enumerate().take(d) {
            rhs -= T::index(i as i64 + 2 * s as i64) * a * j[(i as i32 + s) as usize];
        }
        j.push(rhs / (T::index(d as i64 + 2 * s as i64) * alpha[d]));
    }
}

fn leading_is_zero<T: Real>(alpha: &[T]) -> bool {
    let amax = alpha.iter().fold(T::zero(), |m, a| m.max(a.abs()));
    alpha.last().is_none_or(|a| a.abs() <= T::epsilon() * amax)
}

/// `J_k` for `k >= d - 1` from the recurrence using the nominal leading coefficient.
pub fn reduce_moment<T: Real>(
    poly: &QuadraturePolynomial<T>,
    moments: &MomentSet<T>,
    k: i32,
) -> Result<T, PicardFuchsError> {
    if k < -1 {
        return Err(PicardFuchsError::InvalidIndex(k));
    }
    let d = poly.degree() as i32;
    if leading_is_zero(&poly.alpha) {
        return Err(PicardFuchsError::LeadingCoefficientZero);
    }
    let mut j: Vec<T> = moments.j[..d as usize].to_vec();
    extend_moments(&poly.alpha, &mut j, k);
    Ok(j[(k + 1) as usize])
}

/// Assembles the `2d x 2d` system `S d' = j` and returns `D = -d'/2`.
///
/// First-type rows `k = -1..d-2`: `sum_i alpha_i D'_{k+i} = J_k`; second-type rows
/// `k = 0..d-1`: `sum_i i alpha_i D'_{k+i-1} = 2k J_{k-1}`.
pub fn sylvester_system<T: Real>(alpha: &[T], moments: &MomentSet<T>) -> (Matrix<T>, Vec<T>) {
    let d = alpha.len() - 1;
    let n = 2 * d;
    let mut s = Matrix::zeros(n);
    let mut rhs = vec![T::zero(); n];
    for row in 0..d {
        let k = row as i32 - 1;
        for (i, &a) in alpha.iter().enumerate() {
            s[(row, (k + i as i32 + 1) as usize)] += a;
        }
        rhs[row] = moments.get(k);
    }
    for row in 0..d {
        let k = row as i32;
        for (i, &a) in alpha.iter().enumerate().skip(1) {
            s[(d + row, (k + i as i32) as usize)] += T::count(i) * a;
        }
        if k > 0 {
            rhs[d + row] = T::index(2 * k as i64) * moments.get(k - 1);
        }
    }
    (s, rhs)
}

/// Solves the extended Sylvester system on the effective degree of `P`.
pub fn solve_sylvester<T: Real>(
    poly: &QuadraturePolynomial<T>,
    moments: &MomentSet<T>,
) -> Result<SylvesterSolution<T>, PicardFuchsError> {
    let alpha = roots::trim(&poly.alpha);
    let (mut s, mut rhs) = sylvester_system(alpha, moments);
    let singular = |condition: T| PicardFuchsError::SingularSylvester {
        condition: condition.as_f64(),
    };
    // Row then column equilibration: near-degenerate waves mix very different coefficient scales,
    // and the unscaled condition number would reject well-posed systems.
    let n = s.dim();
    let mut log_scale = T::zero();
    for i in 0..n {
        let m = (0..n).fold(T::zero(), |m, j| m.max(s[(i, j)].abs()));
        if m == T::zero() {
            return Err(singular(T::infinity()));
        }
        for j in 0..n {
            s[(i, j)] /= m;
        }
        rhs[i] /= m;
        log_scale += m.ln();
    }
    let mut col = vec![T::one(); n];
    for (j, c) in col.iter_mut().enumerate() {
        let m = (0..n).fold(T::zero(), |m, i| m.max(s[(i, j)].abs()));
        if m == T::zero() {
            return Err(singular(T::infinity()));
        }
        for i in 0..n {
            s[(i, j)] /= m;
        }
        *c = T::one() / m;
        log_scale += m.ln();
    }
    let lu = s.lu().ok_or_else(|| singular(T::infinity()))?;
    let condition = lu.condition();
    if !condition.is_finite() || condition * T::epsilon() * T::lit(100.0) > T::one() {
        return Err(singular(condition));
    }
    let half = T::lit(-0.5);
    let d = lu
        .solve(&rhs)
        .into_iter()
        .zip(&col)
        .map(|(v, &c)| v * c * half)
        .collect();
    let determinant = lu.determinant() * log_scale.exp();
    Ok(SylvesterSolution {
        d,
        condition,
        determinant,
        degree: alpha.len() - 1,
    })
}

/// Extends `D` upward with the second-type relation
/// `sum_i i alpha_i D_{k+i-1} = -k J_{k-1}` (valid for every `k >= 0`).
fn extend_d<T: Real>(alpha: &[T], j: &mut Vec<T>, dv: &mut Vec<T>, upto: i32) {
    let d = alpha.len() - 1;
    while (dv.len() as i32 - 2) < upto {
        let n = dv.len() as i32 - 1;
        let k = n - d as i32 + 1;
        extend_moments(alpha, j, k - 1);
        let mut rhs = -T::index(k as i64) * j[k as usize];
        for (i, &a) in alpha.iter().enumerate().take(d).skip(1) {
            rhs -= T::count(i) * a * dv[(k + i as i32) as usize];
        }
        dv.push(rhs / (T::count(d) * alpha[d]));
    }
}

/// Chain rule from `dJ_j/dalpha_k = D_{j+k}` to the physical Jacobian.
pub fn jacobian<T: Real>(
    poly: &QuadraturePolynomial<T>,
    params: &WaveParams<T>,
    moments: &MomentSet<T>,
    sylvester: &SylvesterSolution<T>,
) -> DerivativeSet<T> {
    let alpha = roots::trim(&poly.alpha);
    let nominal = poly.degree();
    let kappa = params.angular_momentum;
    let two = T::lit(2.0);

    let mut dalpha = [
        vec![T::zero(); nominal + 1],
        vec![T::zero(); nominal + 1],
        vec![T::zero(); nominal + 1],
        params.alpha_strength_derivative(),
    ];
    dalpha[0][1] = two;
    dalpha[1][0] = -two * kappa;
    dalpha[2][2] = -T::one();

    let weights = params.nonlinearity.potential_weights();
    let top_j = weights.len() as i32;
    let mut j = moments.j.clone();
    let mut dv = sylvester.d.clone();
    extend_d(alpha, &mut j, &mut dv, top_j + nominal as i32);

    let d_j = |idx: i32, p: usize| -> T {
        dalpha[p].iter().enumerate().fold(T::zero(), |acc, (k, &da)| {
            if da == T::zero() {
                acc
            } else {
                acc + da * dv[(idx + k as i32 + 1) as usize]
            }
        })
    };

    let mut jac = [[T::zero(); 4]; 4];
    #[allow(clippy::needless_range_loop)]
    for p in 0..4 {
        jac[Quantity::Period as usize][p] = d_j(0, p);
        jac[Quantity::Mass as usize][p] = d_j(1, p);
        let mut eta = kappa * d_j(-1, p);
        if p == Param::AngularMomentum as usize {
            eta += moments.get(-1);
        }
        jac[Quantity::QuasiMomentum as usize][p] = eta;
        jac[Quantity::Potential as usize][p] = weights.iter().enumerate().fold(T::zero(), |acc, (i, &w)| {
            if w == T::zero() {
                acc
            } else {
                acc + w * d_j(i as i32 + 1, p)
            }
        });
    }
    DerivativeSet {
        jac,
        d: dv,
        condition: sylvester.condition,
    }
}

/// Convenience: Sylvester solve followed by [`jacobian`].
pub fn derivatives<T: Real>(
    poly: &QuadraturePolynomial<T>,
    params: &WaveParams<T>,
    moments: &MomentSet<T>,
) -> Result<DerivativeSet<T>, PicardFuchsError> {
    let syl = solve_sylvester(poly, moments)?;
    Ok(jacobian(poly, params, moments, &syl))
}
