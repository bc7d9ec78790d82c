//! Polynomial nonlinearities, the quadrature polynomial `P(z)` and the
//! root-based wave parameterizations.

use num_complex::Complex;

use crate::roots;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NonlinearityError {
    #[error("no interval of positivity on the positive axis: parameters admit no periodic wave")]
    NoBracket,
    #[error("bracket endpoint {root} is a multiple root: parameters lie on the boundary of the wave domain")]
    DegenerateRoot { root: f64 },
    #[error("parameter out of domain: {0}")]
    OutOfDomain(String),
    #[error("root finder failed to converge")]
    RootFinder,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NonlinearityKind {
    Cubic,
    Quintic,
    GeneralPoly,
}

/// `f(z) = f1 z + f2 z^2 + ...`; the sign and strength live in the wave's `strength`.
#[derive(Debug, Clone, PartialEq)]
pub struct NonlinearitySpec<T> {
    pub kind: NonlinearityKind,
    /// `f_coeffs[i]` multiplies `z^(i+1)`.
    pub f_coeffs: Vec<T>,
}

impl<T: Real> NonlinearitySpec<T> {
    pub fn cubic() -> Self {
        Self {
            kind: NonlinearityKind::Cubic,
            f_coeffs: vec![T::one()],
        }
    }

    pub fn quintic() -> Self {
        Self {
            kind: NonlinearityKind::Quintic,
            f_coeffs: vec![T::zero(), T::one()],
        }
    }

    /// General polynomial nonlinearity; at least one coefficient must be nonzero.
    pub fn poly(f_coeffs: Vec<T>) -> Result<Self, NonlinearityError> {
        if !f_coeffs.iter().any(|c| *c != T::zero()) {
            return Err(NonlinearityError::OutOfDomain(
                "nonlinearity must have a nonzero coefficient".into(),
            ));
        }
        if f_coeffs.iter().any(|c| !c.is_finite()) {
            return Err(NonlinearityError::OutOfDomain(
                "nonlinearity coefficients must be finite".into(),
            ));
        }
        let mut f_coeffs = f_coeffs;
        while f_coeffs.last() == Some(&T::zero()) {
            f_coeffs.pop();
        }
        Ok(Self {
            kind: NonlinearityKind::GeneralPoly,
            f_coeffs,
        })
    }

    /// Degree of `P(z)`: two plus the degree of `f`.
    pub fn degree(&self) -> usize {
        self.f_coeffs.len() + 2
    }

    pub fn f(&self, z: T) -> T {
        self.f_coeffs.iter().rev().fold(T::zero(), |acc, &c| (acc + c) * z)
    }

    /// Antiderivative with `F(0) = 0`.
    pub fn antiderivative(&self, z: T) -> T {
        self.potential_weights()
            .iter()
            .rev()
            .fold(T::zero(), |acc, &c| acc * z + c)
            * z
    }

    /// `f'(z) z`, the amplitude-weighted derivative entering the linearisation.
    pub fn f_prime_times_z(&self, z: T) -> T {
        self.f_coeffs
            .iter()
            .enumerate()
            .rev()
            .fold(T::zero(), |acc, (i, &c)| (acc + T::count(i + 1) * c) * z)
    }

    /// Weights `w_j` with `F(z) = sum_j w_j z^(j+1)`, `w_0 = 0`.
    pub fn potential_weights(&self) -> Vec<T> {
        let mut w = vec![T::zero()];
        w.extend(self.f_coeffs.iter().enumerate().map(|(i, &c)| c / T::count(i + 2)));
        w
    }
}

/// Traveling-wave constants; wave speed and phase offsets are fixed to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveParams<T> {
    pub energy: T,
    /// Angular-momentum constant, must be positive.
    pub angular_momentum: T,
    pub frequency: T,
    /// Signed nonlinearity strength (positive focusing).
    pub strength: T,
    pub nonlinearity: NonlinearitySpec<T>,
}

impl<T: Real> WaveParams<T> {
    pub fn new(energy: T, angular_momentum: T, frequency: T, strength: T, nonlinearity: NonlinearitySpec<T>) -> Self {
        Self {
            energy,
            angular_momentum,
            frequency,
            strength,
            nonlinearity,
        }
    }

    /// Coefficients `alpha_0..alpha_d` of `P(z)`.
    pub fn alpha(&self) -> Vec<T> {
        let mut a = vec![T::zero(); self.nonlinearity.degree() + 1];
        a[0] = -self.angular_momentum * self.angular_momentum;
        a[1] = T::lit(2.0) * self.energy;
        a[2] = -self.frequency;
        for (i, &c) in self.nonlinearity.f_coeffs.iter().enumerate() {
            a[i + 3] = -self.strength * c / T::count(i + 2);
        }
        a
    }

    /// Derivative of each `alpha_j` with respect to the strength.
    pub fn alpha_strength_derivative(&self) -> Vec<T> {
        let mut a = vec![T::zero(); self.nonlinearity.degree() + 1];
        for (i, &c) in self.nonlinearity.f_coeffs.iter().enumerate() {
            a[i + 3] = -c / T::count(i + 2);
        }
        a
    }
}

/// `P(z) = sum alpha_j z^j` with its roots and the oscillation bracket.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraturePolynomial<T> {
    pub alpha: Vec<T>,
    pub roots: Vec<Complex<T>>,
    pub bracket: (T, T),
}

impl<T: Real> QuadraturePolynomial<T> {
    /// Nominal degree (length of `alpha` minus one).
    pub fn degree(&self) -> usize {
        self.alpha.len() - 1
    }

    /// Degree after discarding vanishing leading coefficients.
    pub fn effective_degree(&self) -> usize {
        roots::trim(&self.alpha).len() - 1
    }

    pub fn eval(&self, z: T) -> T {
        roots::eval(&self.alpha, z)
    }

    pub fn derivative(&self, z: T) -> T {
        self.alpha
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(T::zero(), |acc, (j, &a)| acc * z + T::count(j) * a)
    }

    /// Roots of `P` other than the two bracket endpoints.
    pub fn other_roots(&self) -> Vec<Complex<T>> {
        let (r1, r2) = self.bracket;
        let mut others = self.roots.clone();
        for r in [r1, r2] {
            if let Some(pos) = others
                .iter()
                .enumerate()
                .min_by(|(_, a), (_, b)| {
                    (**a - r)
                        .norm()
                        .partial_cmp(&(**b - r).norm())
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .map(|(i, _)| i)
            {
                others.remove(pos);
            }
        }
        others
    }

    /// Leading coefficient of the effective polynomial.
    pub fn leading(&self) -> T {
        *roots::trim(&self.alpha).last().expect("nonempty")
    }

    /// `P(z) / ((r2 - z)(z - r1))` from the stored roots; positive on the bracket.
    pub fn deflated(&self, z: T, others: &[Complex<T>]) -> T {
        let zc = Complex::new(z, T::zero());
        let prod = others
            .iter()
            .fold(Complex::new(T::one(), T::zero()), |acc, r| acc * (zc - r));
        -self.leading() * prod.re
    }

    fn simplicity_tolerance(&self, r: T) -> T {
        let amax = self.alpha.iter().fold(T::zero(), |m, a| m.max(a.abs()));
        let d = self.effective_degree();
        T::lit(1e-8) * amax * r.abs().max(T::one()).powi(d as i32 - 1)
    }

    fn check_simple(&self) -> Result<(), NonlinearityError> {
        for r in [self.bracket.0, self.bracket.1] {
            if self.derivative(r).abs() <= self.simplicity_tolerance(r) {
                return Err(NonlinearityError::DegenerateRoot { root: r.as_f64() });
            }
        }
        Ok(())
    }
}

/// Assembles `P(z)`, solves for its roots and selects the rightmost positive bracket.
pub fn build_poly<T: Real>(params: &WaveParams<T>) -> Result<QuadraturePolynomial<T>, NonlinearityError> {
    build_poly_with_bracket(params, 0)
}

/// Like [`build_poly`] but selecting the `index`-th positivity interval counted from the right.
pub fn build_poly_with_bracket<T: Real>(
    params: &WaveParams<T>,
    index: usize,
) -> Result<QuadraturePolynomial<T>, NonlinearityError> {
    if params.angular_momentum.is_nan() || params.angular_momentum <= T::zero() {
        return Err(NonlinearityError::OutOfDomain(
            "angular momentum must be positive".into(),
        ));
    }
    let alpha = params.alpha();
    if alpha.iter().any(|a| !a.is_finite()) {
        return Err(NonlinearityError::OutOfDomain("parameters must be finite".into()));
    }
    let roots = roots::roots(&alpha).map_err(|_| NonlinearityError::RootFinder)?;
    let bracket = select_bracket(&alpha, &roots, index)?;
    let poly = QuadraturePolynomial { alpha, roots, bracket };
    poly.check_simple()?;
    Ok(poly)
}

fn select_bracket<T: Real>(alpha: &[T], roots: &[Complex<T>], index: usize) -> Result<(T, T), NonlinearityError> {
    let tol = T::epsilon().sqrt();
    let mut real: Vec<T> = roots
        .iter()
        .filter(|r| r.im.abs() <= tol * r.norm().max(T::one()))
        .map(|r| r.re)
        .collect();
    real.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let half = T::lit(0.5);
    real.windows(2)
        .rev()
        .filter(|w| w[0] > T::zero() && roots::eval(alpha, half * (w[0] + w[1])) > T::zero())
        .nth(index)
        .map(|w| (w[0], w[1]))
        .ok_or(NonlinearityError::NoBracket)
}

/// Root-based parameterizations of the cubic and quintic wave families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CaseId<T> {
    /// Elliptic modulus `k` and maximum root `b`, `k^2 < b < 1`.
    CubicFocusing { k: T, b: T },
    /// Lower roots `0 < l < m < 1`.
    CubicDefocusing { l: T, m: T },
    /// Four real roots, `0 < m < 1`, `0 < l < (1+m)/2`.
    QuinticFocusing4 { l: T, m: T },
    /// Two real roots and a complex pair with imaginary part `tan(phi)`.
    QuinticFocusing2 { phi: T, m: T },
    /// Four real roots, `0 < m < l < 1`.
    QuinticDefocusing { l: T, m: T },
}

impl<T: Real> CaseId<T> {
    pub fn coordinates(&self) -> (T, T) {
        match *self {
            CaseId::CubicFocusing { k, b } => (k, b),
            CaseId::CubicDefocusing { l, m }
            | CaseId::QuinticFocusing4 { l, m }
            | CaseId::QuinticDefocusing { l, m } => (l, m),
            CaseId::QuinticFocusing2 { phi, m } => (phi, m),
        }
    }

    pub fn nonlinearity(&self) -> NonlinearitySpec<T> {
        match self {
            CaseId::CubicFocusing { .. } | CaseId::CubicDefocusing { .. } => NonlinearitySpec::cubic(),
            _ => NonlinearitySpec::quintic(),
        }
    }

    /// Closed-form map to wave constants without any domain validation.
    pub fn raw_params(&self) -> WaveParams<T> {
        let one = T::one();
        let two = T::lit(2.0);
        let half = T::lit(0.5);
        let (e, kappa, w, zeta) = match *self {
            CaseId::CubicFocusing { k, b } => {
                let k2 = k * k;
                let kappa = (b * (one - b) * (b - k2)).sqrt();
                let e = b * (one + k2) - T::lit(1.5) * b * b - half * k2;
                (e, kappa, one + k2 - T::lit(3.0) * b, two)
            }
            CaseId::CubicDefocusing { l, m } => ((l + m + l * m) * half, (l * m).sqrt(), one + l + m, -two),
            CaseId::QuinticFocusing4 { l, m } => {
                let kappa = (l * m * (one + m - l)).sqrt();
                let e = (one + m) * (m - l) * (l - one) * half;
                let w = -one - m - m * m + (one + m) * l - l * l;
                (e, kappa, w, T::lit(3.0))
            }
            CaseId::QuinticFocusing2 { phi, m } => {
                let t2 = phi.tan().powi(2);
                let kappa = (m * (t2 + ((one + m) * half).powi(2))).sqrt();
                let e = half * (one + m) * (t2 + ((one - m) * half).powi(2));
                let w = -T::lit(0.25) * (T::lit(3.0) * m * m + two * m + T::lit(3.0) - T::lit(4.0) * t2);
                (e, kappa, w, T::lit(3.0))
            }
            CaseId::QuinticDefocusing { l, m } => {
                let kappa = (l * m * (one + l + m)).sqrt();
                let e = half * (one + l) * (one + m) * (l + m);
                let w = one + l * l + (l + m) * (one + m);
                (e, kappa, w, -T::lit(3.0))
            }
        };
        WaveParams::new(e, kappa, w, zeta, self.nonlinearity())
    }

    /// Analytically known roots of `P` and the bracket, in that order.
    pub fn known_roots(&self) -> (Vec<Complex<T>>, (T, T)) {
        let one = T::one();
        let re = |x: T| Complex::new(x, T::zero());
        match *self {
            CaseId::CubicFocusing { k, b } => (vec![re(b - one), re(b - k * k), re(b)], (b - k * k, b)),
            CaseId::CubicDefocusing { l, m } => (vec![re(l), re(m), re(one)], (l, m)),
            CaseId::QuinticFocusing4 { l, m } => (vec![re(one), re(m), re(-l), re(l - one - m)], (m, one)),
            CaseId::QuinticFocusing2 { phi, m } => {
                let c = -(one + m) * T::lit(0.5);
                let t = phi.tan();
                (vec![re(one), re(m), Complex::new(c, t), Complex::new(c, -t)], (m, one))
            }
            CaseId::QuinticDefocusing { l, m } => (vec![re(one), re(l), re(m), re(-(one + l + m))], (m, l)),
        }
    }

    /// Domain inequalities as `(lhs, rhs, description)` meaning `lhs < rhs`.
    fn constraints(&self) -> Vec<(T, T, &'static str)> {
        let zero = T::zero();
        let one = T::one();
        match *self {
            CaseId::CubicFocusing { k, b } => vec![(zero, k, "0 < k"), (k * k, b, "k^2 < b"), (b, one, "b < 1")],
            CaseId::CubicDefocusing { l, m } => vec![(zero, l, "0 < l"), (l, m, "l < m"), (m, one, "m < 1")],
            CaseId::QuinticFocusing4 { l, m } => vec![
                (zero, m, "0 < m"),
                (m, one, "m < 1"),
                (zero, l, "0 < l"),
                (l, (one + m) * T::lit(0.5), "l < (1+m)/2"),
            ],
            CaseId::QuinticFocusing2 { phi, m } => vec![
                (zero, phi, "0 < phi"),
                (phi, T::FRAC_PI_2(), "phi < pi/2"),
                (zero, m, "0 < m"),
                (m, one, "m < 1"),
            ],
            CaseId::QuinticDefocusing { l, m } => vec![(zero, m, "0 < m"), (m, l, "m < l"), (l, one, "l < 1")],
        }
    }
}

/// Maps a case to wave constants and its polynomial with analytically known roots.
///
/// Points strictly outside the closed domain give `OutOfDomain`; points on its
/// boundary (where two roots collide) give `DegenerateRoot`.
pub fn from_case<T: Real>(case: &CaseId<T>) -> Result<(WaveParams<T>, QuadraturePolynomial<T>), NonlinearityError> {
    let (a, b) = case.coordinates();
    if !a.is_finite() || !b.is_finite() {
        return Err(NonlinearityError::OutOfDomain("coordinates must be finite".into()));
    }
    for (lhs, rhs, what) in case.constraints() {
        if lhs > rhs {
            return Err(NonlinearityError::OutOfDomain(format!("{what} violated")));
        }
        if lhs == rhs {
            return Err(NonlinearityError::DegenerateRoot { root: lhs.as_f64() });
        }
    }
    let params = case.raw_params();
    let (roots, bracket) = case.known_roots();
    let poly = QuadraturePolynomial {
        alpha: params.alpha(),
        roots,
        bracket,
    };
    poly.check_simple()?;
    Ok((params, poly))
}

/// Degenerate quintic-focusing profile (`l = (1+m)/2`), `z = A^2`.
///
/// The argument is measured in units where the profile has period `pi / beta`;
/// the wave equation `z'' = 2 P'(z)` is solved by `trig_solution(m, y / 2)`.
pub fn trig_solution<T: Real>(m: T, y: T) -> T {
    let one = T::one();
    let three = T::lit(3.0);
    let a = one + three * m;
    let b = three + m;
    let beta = (a * b).sqrt();
    let (s, c) = (beta * y).sin_cos();
    let (c2, s2) = (c * c, s * s);
    (one + m) * T::lit(0.5) + (one - m) * T::lit(0.5) * (a * c2 - b * s2) / (a * c2 + b * s2)
}

/// Quintic-defocusing dark solitary wave (`m = 1`), `z = A^2` as a function of `y`.
pub fn dark_soliton<T: Real>(l: T, y: T) -> T {
    let one = T::one();
    let three = T::lit(3.0);
    let beta = ((one - l) * (l + three)).sqrt();
    let t2 = (beta * y).tanh().powi(2);
    (l * (l + three) + (l + T::lit(2.0)) * (one - l) * t2) / ((l + three) - (one - l) * t2)
}
