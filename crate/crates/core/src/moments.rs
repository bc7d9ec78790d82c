//! Period-type moments `J_k = ∫ z^k / sqrt(P) dz` over the bracket, the
//! potential moment and the kinetic integral, by regularised Gauss–Legendre quadrature.

use crate::nonlinearity::{QuadraturePolynomial, WaveParams};
use crate::quadrature::gauss_legendre;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MomentError {
    #[error("quadrature did not reach relative tolerance {rtol:e} with {nodes} nodes")]
    QuadratureNoConvergence { nodes: usize, rtol: f64 },
    #[error("moment index {0} is below -1")]
    InvalidIndex(i32),
}

pub const MIN_NODES: usize = 64;
pub const MAX_NODES: usize = 4096;

/// Moments of one traveling wave.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSet<T> {
    /// `J_{-1} .. J_{d-1}`, indexed by `k + 1`.
    pub j: Vec<T>,
    /// Period `J_0`.
    pub period: T,
    /// Mass `J_1`.
    pub mass: T,
    /// Quasi-momentum `kappa J_{-1}`.
    pub quasi_momentum: T,
    /// Integral of `F(A^2)` over one period.
    pub potential: T,
    /// `∫ sqrt(P) / z dz`.
    pub kinetic: T,
    /// Node count at which all integrals converged.
    pub nodes: usize,
}

impl<T: Real> MomentSet<T> {
    /// `J_k` for a stored index.
    pub fn get(&self, k: i32) -> T {
        self.j[(k + 1) as usize]
    }

    /// Highest stored moment index.
    pub fn max_index(&self) -> i32 {
        self.j.len() as i32 - 2
    }
}

/// Sums integrand values over the mapped rule; `f` receives `(z, sqrt(Q), h cos phi)`.
fn integrate<T: Real, const K: usize>(
    poly: &QuadraturePolynomial<T>,
    nodes: usize,
    f: &impl Fn(T, T, T) -> [T; K],
) -> [T; K] {
    let rule = gauss_legendre(nodes);
    let others = poly.other_roots();
    let (r1, r2) = poly.bracket;
    let half = T::lit(0.5);
    let mid = half * (r1 + r2);
    let h = half * (r2 - r1);
    let scale = T::FRAC_PI_2();
    let mut acc = [T::zero(); K];
    for (&x, &w) in rule.0.iter().zip(rule.1.iter()) {
        let phi = scale * T::lit(x);
        let (s, c) = phi.sin_cos();
        let z = mid + h * s;
        let q = poly.deflated(z, &others).sqrt();
        let vals = f(z, q, h * c);
        let wt = scale * T::lit(w);
        for (a, v) in acc.iter_mut().zip(vals) {
            *a += wt * v;
        }
    }
    acc
}

fn converge<T: Real, const K: usize>(
    poly: &QuadraturePolynomial<T>,
    f: impl Fn(T, T, T) -> [T; K],
) -> Result<([T; K], usize), MomentError> {
    let rtol = T::default_rtol();
    let mut n = MIN_NODES;
    let mut prev = integrate(poly, n, &f);
    while n < MAX_NODES {
        n *= 2;
        let next = integrate(poly, n, &f);
        let ok = prev
            .iter()
            .zip(next.iter())
            .all(|(a, b)| (*a - *b).abs() <= rtol * b.abs());
        if ok {
            return Ok((next, n));
        }
        prev = next;
    }
    Err(MomentError::QuadratureNoConvergence {
        nodes: n,
        rtol: rtol.as_f64(),
    })
}

/// `J_k` by quadrature with node doubling.
pub fn moment<T: Real>(poly: &QuadraturePolynomial<T>, k: i32) -> Result<T, MomentError> {
    if k < -1 {
        return Err(MomentError::InvalidIndex(k));
    }
    converge(poly, |z, q, _| [z.powi(k) / q]).map(|(v, _)| v[0])
}

/// All moments `J_{-1}..J_{d-1}` together with the derived wave quantities.
pub fn moment_set<T: Real>(
    poly: &QuadraturePolynomial<T>,
    params: &WaveParams<T>,
) -> Result<MomentSet<T>, MomentError> {
    let d = poly.degree();
    let weights = params.nonlinearity.potential_weights();
    // Slots: J_{-1}..J_{d-1} (d+1 values), potential, kinetic; fixed upper bound keeps arrays on the stack.
    const SLOTS: usize = 12;
    assert!(d + 3 <= SLOTS, "polynomial degree too large for moment evaluation");
    let (vals, nodes) = converge(poly, |z, q, hc| {
        let mut out = [T::zero(); SLOTS];
        let inv_q = q.recip();
        let mut zk = z.recip();
        for slot in out.iter_mut().take(d + 1) {
            *slot = zk * inv_q;
            zk *= z;
        }
        let potential = weights.iter().rev().fold(T::zero(), |acc, &c| acc * z + c) * z;
        out[d + 1] = potential * inv_q;
        out[d + 2] = q * hc * hc / z;
        out
    })?;
    let j: Vec<T> = vals[..d + 1].to_vec();
    Ok(MomentSet {
        period: j[1],
        mass: j[2],
        quasi_momentum: params.angular_momentum * j[0],
        potential: vals[d + 1],
        kinetic: vals[d + 2],
        j,
        nodes,
    })
}
