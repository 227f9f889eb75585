//! Shared numeric scaffolding: walk parameters, momenta, complex vector and
//! matrix aliases, the principal complex arccosine and tolerance settings.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::{DMatrix, Matrix2, Matrix4, SMatrix, SVector, Vector2, Vector4};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type Vec2C = Vector2<C64>;
pub type Vec4C = Vector4<C64>;
pub type Mat2C = Matrix2<C64>;
pub type Mat4C = Matrix4<C64>;

pub const I: C64 = C64::new(0.0, 1.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const ZERO: C64 = C64::new(0.0, 0.0);

#[inline]
pub fn cis(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

/// Reduce a real angle into the Brillouin zone `(-π, π]`.
pub fn reduce_to_zone(x: f64) -> f64 {
    let two_pi = 2.0 * PI;
    let mut r = x.rem_euclid(two_pi);
    if r > PI {
        r -= two_pi;
    }
    // rem_euclid maps −π to π already; guard the representable edge −π+ε rounding to −π.
    if r <= -PI {
        r += two_pi;
    }
    r
}

/// Principal value of the complex arccosine, `Re w ∈ [0, π]`.
///
/// Evaluated as `-i ln(x + i√(1-x²))`, switching to the reciprocal root
/// `1/(x - i√(1-x²))` whenever the direct sum cancels, so that the result is
/// accurate for |x| ≫ 1 as well. On the real cut `x > 1` the imaginary part is
/// non-negative; on `x < -1` the value is `π - arccos(-x)`.
pub fn principal_arccos(x: C64) -> C64 {
    if x.im == 0.0 {
        let r = x.re;
        if r.abs() <= 1.0 {
            return C64::new(r.acos(), 0.0);
        }
        if r > 1.0 {
            return C64::new(0.0, r.acosh());
        }
        return C64::new(PI, -(-r).acosh());
    }
    let s = principal_sqrt_one_minus_sq(x);
    let plus = x + I * s;
    let minus = x - I * s;
    // plus * minus == 1
    let log = if plus.norm() >= minus.norm() {
        plus.ln()
    } else {
        -minus.ln()
    };
    -I * log
}

/// `√(1 - x²)` on the principal branch; equals `sin(principal_arccos(x))`.
pub fn principal_sqrt_one_minus_sq(x: C64) -> C64 {
    if x.im == 0.0 && x.re.abs() <= 1.0 {
        return C64::new(((1.0 - x.re) * (1.0 + x.re)).sqrt(), 0.0);
    }
    ((ONE - x) * (ONE + x)).sqrt()
}

/// Mass/coupling parameters of the walk. `mu = m`, `nu = √(1-m²)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WalkParams {
    m: f64,
    mu: f64,
    nu: f64,
    chi: f64,
}

impl WalkParams {
    pub fn new(m: f64, chi: f64) -> Result<Self> {
        if !(m > 0.0 && m < 1.0) {
            return Err(Error::InvalidMass(m));
        }
        if !chi.is_finite() {
            return Err(Error::InvalidParameter(format!("coupling χ must be finite, got {chi}")));
        }
        let nu = ((1.0 - m) * (1.0 + m)).sqrt();
        Ok(Self {
            m,
            mu: m,
            nu,
            chi: reduce_to_zone(chi),
        })
    }

    /// Free walk (χ = 0).
    pub fn free(m: f64) -> Result<Self> {
        Self::new(m, 0.0)
    }

    pub fn with_chi(&self, chi: f64) -> Self {
        Self {
            chi: reduce_to_zone(chi),
            ..*self
        }
    }

    pub fn m(&self) -> f64 {
        self.m
    }
    pub fn mu(&self) -> f64 {
        self.mu
    }
    pub fn nu(&self) -> f64 {
        self.nu
    }
    pub fn chi(&self) -> f64 {
        self.chi
    }

    /// `e^{iχ}` is ±1: the interaction acts trivially (or as a pure sign) and
    /// no bound state exists.
    pub fn interaction_is_trivial(&self, tol: f64) -> Option<i32> {
        if (cis(self.chi) - ONE).norm() <= tol {
            Some(1)
        } else if (cis(self.chi) + ONE).norm() <= tol {
            Some(-1)
        } else {
            None
        }
    }
}

/// Real momentum in `(-π, π]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Momentum(f64);

impl Momentum {
    pub fn new(value: f64) -> Self {
        Momentum(reduce_to_zone(value))
    }
    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<f64> for Momentum {
    fn from(v: f64) -> Self {
        Momentum::new(v)
    }
}

/// Complex momentum `k_R + i k_I` with `k_R ∈ (-π, π]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexMomentum {
    pub re: f64,
    pub im: f64,
}

impl ComplexMomentum {
    pub fn new(re: f64, im: f64) -> Self {
        Self {
            re: reduce_to_zone(re),
            im,
        }
    }
    pub fn real(re: f64) -> Self {
        Self::new(re, 0.0)
    }
    pub fn as_c64(self) -> C64 {
        C64::new(self.re, self.im)
    }
    pub fn is_real(self) -> bool {
        self.im == 0.0
    }
}

impl From<f64> for ComplexMomentum {
    fn from(v: f64) -> Self {
        Self::real(v)
    }
}

impl From<C64> for ComplexMomentum {
    fn from(z: C64) -> Self {
        Self::new(z.re, z.im)
    }
}

impl From<Momentum> for ComplexMomentum {
    fn from(p: Momentum) -> Self {
        Self::real(p.value())
    }
}

/// A branch sign `s, r = ±`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

impl std::str::FromStr for Sign {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "+" | "plus" | "p" | "+1" => Ok(Sign::Plus),
            "-" | "minus" | "m" | "-1" => Ok(Sign::Minus),
            _ => Err(Error::InvalidParameter(format!("branch must be + or -, got {s:?}"))),
        }
    }
}

/// Lattice boundary handling for the position-space steppers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// Ring: indices wrap around.
    Periodic,
    /// Finite window; stepping fails if amplitude would leave the window.
    Open,
}

/// Numerical tolerances. Defaults: 1e-12 for unitarity and residual checks,
/// 1e-10 for root finding. Each can be overridden through the environment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub unitarity: f64,
    pub residual: f64,
    pub root: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            unitarity: 1e-12,
            residual: 1e-12,
            root: 1e-10,
        }
    }
}

impl Tolerances {
    pub const ENV_UNITARITY: &'static str = "THIRRING_TOL_UNITARITY";
    pub const ENV_RESIDUAL: &'static str = "THIRRING_TOL_RESIDUAL";
    pub const ENV_ROOT: &'static str = "THIRRING_TOL_ROOT";

    /// Defaults overridden by any of the `THIRRING_TOL_*` variables. Returns
    /// the tolerances together with the list of overrides that were applied.
    pub fn from_env() -> (Self, Vec<(String, f64)>) {
        let mut tol = Self::default();
        let mut applied = Vec::new();
        for (name, slot) in [
            (Self::ENV_UNITARITY, &mut tol.unitarity),
            (Self::ENV_RESIDUAL, &mut tol.residual),
            (Self::ENV_ROOT, &mut tol.root),
        ] {
            if let Ok(raw) = std::env::var(name) {
                if let Ok(v) = raw.trim().parse::<f64>() {
                    if v > 0.0 && v.is_finite() {
                        *slot = v;
                        applied.push((name.to_string(), v));
                    }
                }
            }
        }
        (tol, applied)
    }
}

/// Largest component modulus of a complex vector.
pub fn max_abs<const N: usize>(v: &SVector<C64, N>) -> f64 {
    v.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Frobenius norm of `U†U - I`.
pub fn unitarity_defect<const N: usize>(u: &SMatrix<C64, N, N>) -> f64 {
    (u.adjoint() * u - SMatrix::<C64, N, N>::identity()).norm()
}

/// Frobenius norm of `U†U - I` for a dynamically sized matrix.
pub fn unitarity_defect_dyn(u: &DMatrix<C64>) -> f64 {
    let n = u.nrows();
    (u.adjoint() * u - DMatrix::<C64>::identity(n, n)).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn arccos_examples() {
        assert_eq!(principal_arccos(ONE), ZERO);
        assert!((principal_arccos(ZERO).re - PI / 2.0).abs() < 1e-15);
        let w = principal_arccos(C64::new(0.7, 0.0));
        assert!((w.re - 0.795_398_830_184_144).abs() < 1e-14);
        assert!((w.cos() - C64::new(0.7, 0.0)).norm() <= 1e-14);
    }

    #[test]
    fn arccos_real_cut_has_nonnegative_imaginary_part() {
        let w = principal_arccos(C64::new(3.0, 0.0));
        assert!(w.im > 0.0);
        assert!((w.cos() - C64::new(3.0, 0.0)).norm() < 1e-12);
        let w = principal_arccos(C64::new(-3.0, 0.0));
        assert!((w.re - PI).abs() < 1e-15);
        assert!((w.cos() - C64::new(-3.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn arccos_large_arguments_stay_accurate() {
        // cos(p + iκ) for large κ, the regime probed by the bound-state root scan.
        for &kappa in &[5.0, 12.0, 19.5] {
            let x = C64::new(0.3, kappa).cos() * 0.8;
            let w = principal_arccos(x);
            assert!(w.re >= 0.0 && w.re <= PI);
            assert!((w.cos() - x).norm() / x.norm() < 1e-13, "κ={kappa}");
        }
    }

    #[test]
    fn arccos_matches_reference_off_the_cuts() {
        // independent reference: num-complex's acos, away from the real axis
        for &(re, im) in &[(0.3, 0.2), (-1.7, 0.4), (2.5, -1.1), (-0.2, -3.0), (10.0, 0.5)] {
            let x = C64::new(re, im);
            assert!((principal_arccos(x) - x.acos()).norm() < 1e-12, "{x}");
        }
    }

    #[test]
    fn zone_reduction_examples() {
        assert_eq!(reduce_to_zone(PI), PI);
        assert_eq!(reduce_to_zone(-PI), PI);
        assert!((reduce_to_zone(1.5 * PI) + PI / 2.0).abs() < 1e-15);
        assert_eq!(reduce_to_zone(0.0), 0.0);
    }

    #[test]
    fn params_constraint() {
        let p = WalkParams::new(0.6, 0.0).unwrap();
        assert!((p.mu() * p.mu() + p.nu() * p.nu() - 1.0).abs() < 1e-14);
        assert!(WalkParams::new(0.0, 0.0).is_err());
        assert!(WalkParams::new(1.0, 0.0).is_err());
        assert!((WalkParams::new(0.6, 3.0 * PI).unwrap().chi() - PI).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn arccos_on_unit_interval(x in -1.0f64..=1.0) {
            let w = principal_arccos(C64::new(x, 0.0));
            prop_assert_eq!(w.im, 0.0);
            prop_assert!(w.re >= 0.0 && w.re <= PI);
            prop_assert!((w.re.cos() - x).abs() <= 1e-14);
        }

        #[test]
        fn arccos_inverts_cos(re in -4.0f64..4.0, im in -4.0f64..4.0) {
            let x = C64::new(re, im);
            let w = principal_arccos(x);
            prop_assert!(w.re >= 0.0 && w.re <= PI);
            prop_assert!((w.cos() - x).norm() <= 1e-12 * (1.0 + x.norm()));
            let s = principal_sqrt_one_minus_sq(x);
            prop_assert!((w.sin() - s).norm() <= 1e-12 * (1.0 + s.norm()));
        }

        #[test]
        fn zone_reduction_idempotent_and_periodic(x in -100.0f64..100.0, n in -5i32..5) {
            let r = reduce_to_zone(x);
            prop_assert!(r > -PI && r <= PI);
            prop_assert_eq!(reduce_to_zone(r), r);
            let shifted = reduce_to_zone(x + 2.0 * PI * n as f64);
            prop_assert!((shifted - r).abs() < 1e-9 || (shifted - r).abs() > 2.0 * PI - 1e-9);
        }
    }
}
