//! Two-particle operators.
//!
//! Internal (coin) components are ordered `(↑↑, ↑↓, ↓↑, ↓↓)`, i.e. the
//! Kronecker order `particle 1 ⊗ particle 2`. With `y = x₁ - x₂`,
//! `w = x₁ + x₂`, half total momentum `p` and half relative momentum `k`, the
//! free two-particle matrix is `W₂(p,k) = W(p+k) ⊗ W(p-k)`.
//!
//! Submodules:
//! * [`fixed_p`]: the walk at fixed `p` in the P-subspace layout used by all
//!   analytic solutions (components 1,4 on odd `y = 2z+1`, 2,3 on even `y = 2z`);
//! * [`relative`]: the same walk on the full relative lattice, with the projector P;
//! * [`grid`]: position-space states on the `(x₁, x₂)` grid and on the
//!   centre-of-mass lattice with the projector C.

pub mod fixed_p;
pub mod grid;
pub mod relative;

use crate::numeric::{ComplexMomentum, Mat4C, Momentum, Sign, Vec4C, WalkParams, C64, I, ONE, ZERO};
use crate::single::{g, norm_factor, omega, walk_matrix_c};

pub use fixed_p::{interaction_fixed_p, u2_evolve, u2_step, w2_fixed_p, FixedPState, FixedPWalk, OPEN_GUARD};
pub use grid::{antisymmetrize, projector_c, CentreOfMassState, GridState};
pub use relative::{projector_p, RelativeState};

/// `ω_{sr}(p,k) = s ω(p+k) + r ω(p-k)`.
pub fn omega_sr(p: f64, k: impl Into<ComplexMomentum>, s: Sign, r: Sign, params: &WalkParams) -> C64 {
    let k = k.into().as_c64();
    let p = C64::from(p);
    omega(p + k, params) * s.value() + omega(p - k, params) * r.value()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoPEigenvector {
    pub s: Sign,
    pub r: Sign,
    pub p: Momentum,
    pub k: ComplexMomentum,
    pub vec: Vec4C,
}

impl TwoPEigenvector {
    pub fn eigenvalue(&self, params: &WalkParams) -> C64 {
        (-I * omega_sr(self.p.value(), self.k, self.s, self.r, params)).exp()
    }
}

/// `(-μ², -iμ g_r(p-k), -iμ g_s(p+k), g_s(p+k) g_r(p-k))` without normalization.
pub fn two_eigenvector_raw(p: f64, k: C64, s: Sign, r: Sign, params: &WalkParams) -> Vec4C {
    let mu = params.mu();
    let gs = g(C64::from(p) + k, s, params);
    let gr = g(C64::from(p) - k, r, params);
    Vec4C::new(C64::from(-mu * mu), -I * gr * mu, -I * gs * mu, gs * gr)
}

/// `v_k^{sr} = v_{p+k}^s ⊗ v_{p-k}^r`, normalized by `|N_s(p+k)| |N_r(p-k)|`.
pub fn two_eigenvector(
    p: impl Into<Momentum>,
    k: impl Into<ComplexMomentum>,
    s: Sign,
    r: Sign,
    params: &WalkParams,
) -> TwoPEigenvector {
    let p = p.into();
    let k = k.into();
    let kc = k.as_c64();
    let pc = C64::from(p.value());
    let n = norm_factor(pc + kc, s, params) * norm_factor(pc - kc, r, params);
    let vec = two_eigenvector_raw(p.value(), kc, s, r, params) / C64::from(n);
    TwoPEigenvector { s, r, p, k, vec }
}

/// `W₂(p,k) = W(p+k) ⊗ W(p-k)`.
pub fn w2_momentum(p: f64, k: impl Into<ComplexMomentum>, params: &WalkParams) -> Mat4C {
    let k = k.into().as_c64();
    let p = C64::from(p);
    walk_matrix_c(p + k, params).kronecker(&walk_matrix_c(p - k, params))
}

/// Exchange matrix `E`, swapping the `↑↓` and `↓↑` components.
pub fn exchange_matrix() -> Mat4C {
    let mut e = Mat4C::zeros();
    e[(0, 0)] = ONE;
    e[(1, 2)] = ONE;
    e[(2, 1)] = ONE;
    e[(3, 3)] = ONE;
    e
}

/// `σ_x ⊗ σ_x`.
pub fn sigma_xx() -> Mat4C {
    let mut m = Mat4C::zeros();
    for i in 0..4 {
        m[(i, 3 - i)] = ONE;
    }
    m
}

/// `σ_z ⊗ σ_z`.
pub fn sigma_zz() -> Mat4C {
    Mat4C::from_diagonal(&Vec4C::new(ONE, -ONE, -ONE, ONE))
}

/// Maximum deviations of the three conjugation identities
/// `W(p) = σx W(-p) σx`, `W₂(-p) = (σx⊗σx) E W₂(p) E (σx⊗σx)` and
/// `W₂(p+π) = (σz⊗σz) W₂(p) (σz⊗σz)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymmetryReport {
    pub parity_single: f64,
    pub parity_two: f64,
    pub shift_two: f64,
}

impl SymmetryReport {
    pub fn max(&self) -> f64 {
        self.parity_single.max(self.parity_two).max(self.shift_two)
    }
}

/// Evaluates the symmetry identities both on the 4×4 momentum blocks (over a
/// grid of `k`) and on the fixed-`p` relative-lattice operators (on a
/// deterministic pseudo-random state).
pub fn symmetry_checks(p: f64, params: &WalkParams) -> SymmetryReport {
    use crate::numeric::Mat2C;
    use std::f64::consts::PI;

    let sx = Mat2C::new(ZERO, ONE, ONE, ZERO);
    let single = |q: f64| walk_matrix_c(C64::from(q), params);
    let mut parity_single: f64 = 0.0;
    let mut parity_two: f64 = 0.0;
    let mut shift_two: f64 = 0.0;

    let sxx = sigma_xx();
    let szz = sigma_zz();
    let e = exchange_matrix();
    parity_single = parity_single.max((single(p) - sx * single(-p) * sx).norm());
    for j in 0..32 {
        let k = -PI + (j as f64 + 0.5) * 2.0 * PI / 32.0;
        parity_single = parity_single.max((single(k) - sx * single(-k) * sx).norm());
        let w = w2_momentum(p, k, params);
        parity_two = parity_two.max((w2_momentum(-p, k, params) - sxx * e * w * e * sxx).norm());
        shift_two = shift_two.max((w2_momentum(p + PI, k, params) - szz * w * szz).norm());
    }

    let len = 32usize;
    let state = RelativeState::pseudo_random(Momentum::new(p), -(len as i64) / 2, len, 0x5eed);
    let free = params.with_chi(0.0);
    let forward = |st: &RelativeState, q: f64| {
        let mut s = st.clone();
        s.p = Momentum::new(q);
        s.free_step(&free)
    };
    let conj = |st: &RelativeState, m: &Mat4C| st.map_components(|v| m * v);
    let lhs = forward(&state, -p);
    let rhs = conj(&forward(&conj(&state, &(e * sxx)), p), &(sxx * e));
    parity_two = parity_two.max(lhs.max_abs_diff(&rhs));
    let lhs = forward(&state, p + PI);
    let rhs = conj(&forward(&conj(&state, &szz), p), &szz);
    shift_two = shift_two.max(lhs.max_abs_diff(&rhs));

    SymmetryReport {
        parity_single,
        parity_two,
        shift_two,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::unitarity_defect;
    use crate::single::eigenvector;
    use std::f64::consts::PI;

    fn params(m: f64) -> WalkParams {
        WalkParams::free(m).unwrap()
    }

    #[test]
    fn omega_sr_examples() {
        let pr = params(0.6);
        for k in [-2.0, 0.3, 1.4] {
            let w = crate::single::dispersion(k, &pr);
            assert!((omega_sr(0.0, k, Sign::Plus, Sign::Plus, &pr) - w * 2.0).norm() < 1e-14);
            assert!(omega_sr(0.0, k, Sign::Plus, Sign::Minus, &pr).norm() < 1e-14);
            let pp = omega_sr(0.4, k, Sign::Plus, Sign::Plus, &pr);
            let mm = omega_sr(0.4, k, Sign::Minus, Sign::Minus, &pr);
            assert!((pp + mm).norm() < 1e-15);
        }
        // ω_{±∓}(0,k) = 0 holds for complex k too
        let k = ComplexMomentum::new(0.7, -1.3);
        assert!(omega_sr(0.0, k, Sign::Minus, Sign::Plus, &pr).norm() < 1e-14);
    }

    #[test]
    fn eigenvector_is_kronecker_product() {
        let pr = params(0.6);
        let (p, k) = (0.4, 0.9);
        for s in Sign::BOTH {
            for r in Sign::BOTH {
                let v = two_eigenvector(p, k, s, r, &pr);
                let a = eigenvector(p + k, s, &pr).vec;
                let b = eigenvector(p - k, r, &pr).vec;
                assert!((v.vec - a.kronecker(&b)).norm() < 1e-15);
                let res = (w2_momentum(p, k, &pr) * v.vec - v.vec * v.eigenvalue(&pr)).norm();
                assert!(res <= 1e-12, "({s},{r}) residual {res}");
            }
        }
    }

    #[test]
    fn appendix_component_relations() {
        let pr = params(0.6);
        let (p, k) = (0.35, 0.8);
        let pp = |kk: f64, s, r| two_eigenvector(p, kk, s, r, &pr).vec;
        let (plus, minus) = (Sign::Plus, Sign::Minus);
        let v = pp(k, plus, plus);
        let (a, b, c, d) = (v[0], v[1], v[2], v[3]);
        let close = |x: Vec4C, y: Vec4C| (x - y).norm() < 1e-14;
        assert!(close(pp(-k, plus, plus), Vec4C::new(a, c, b, d)));
        assert!(close(pp(PI - k, minus, minus), Vec4C::new(a, -c, -b, d)));
        assert!(close(pp(k - PI, minus, minus), Vec4C::new(a, -b, -c, d)));
        let v = pp(k, plus, minus);
        let (a, b, c, d) = (v[0], v[1], v[2], v[3]);
        assert!(close(pp(-k, minus, plus), Vec4C::new(a, c, b, d)));
        assert!(close(pp(PI - k, plus, minus), Vec4C::new(a, -c, -b, d)));
        assert!(close(pp(k - PI, minus, plus), Vec4C::new(a, -b, -c, d)));
    }

    #[test]
    fn w2_examples() {
        let pr = params(0.7);
        let p = 0.3;
        let w = crate::single::walk_matrix(p, &pr);
        assert!((w2_momentum(p, 0.0, &pr) - w.kronecker(&w)).norm() < 1e-15);
        for &(p, k) in &[(0.1, 2.0), (-1.2, 0.4), (2.9, -3.0)] {
            let m = w2_momentum(p, k, &pr);
            assert!(unitarity_defect(&m) <= 1e-13);
            // characteristic check: each e^{-iω_sr} is a root of det(W₂ - λ)
            for s in Sign::BOTH {
                for r in Sign::BOTH {
                    let lam = (-I * omega_sr(p, k, s, r, &pr)).exp();
                    let det = (m - Mat4C::identity() * lam).determinant();
                    assert!(det.norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn degeneracy_quadruples() {
        let pr = params(0.6);
        let (plus, minus) = (Sign::Plus, Sign::Minus);
        for i in 0..12 {
            let p = -1.5 + 0.25 * i as f64;
            for j in 0..24 {
                let k = -PI + (j as f64 + 0.37) * 2.0 * PI / 24.0;
                let lam = |kk: f64, s, r| (-I * omega_sr(p, kk, s, r, &pr)).exp();
                let base = lam(k, plus, plus);
                assert!((lam(-k, plus, plus) - base).norm() < 1e-12);
                assert!((lam(PI - k, minus, minus) - base).norm() < 1e-12);
                assert!((lam(k - PI, minus, minus) - base).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn symmetry_identities() {
        let pr = params(0.6);
        let rep = symmetry_checks(0.7, &pr);
        assert!(rep.max() <= 1e-13, "{rep:?}");
        let rep0 = symmetry_checks(0.0, &pr);
        assert!(rep0.max() <= 1e-13);
        // π-shift applied twice is the identity (2π periodicity)
        let szz = sigma_zz();
        let w = w2_momentum(0.7, 0.3, &pr);
        assert!((w2_momentum(0.7 + 2.0 * PI, 0.3, &pr) - szz * szz * w * szz * szz).norm() < 1e-13);
    }

    #[test]
    fn spectrum_misses_the_points_e_pm_2ip() {
        let pr = params(0.7);
        for &p in &[0.2, 0.6, 1.1, 1.4] {
            let targets = [C64::from_polar(1.0, 2.0 * p), C64::from_polar(1.0, -2.0 * p)];
            let mut min_dist = f64::INFINITY;
            for j in 0..4000 {
                let k = -PI + (j as f64 + 0.5) * 2.0 * PI / 4000.0;
                for s in Sign::BOTH {
                    for r in Sign::BOTH {
                        let lam = (-I * omega_sr(p, k, s, r, &pr)).exp();
                        for t in &targets {
                            min_dist = min_dist.min((lam - t).norm());
                        }
                    }
                }
            }
            assert!(min_dist > 0.05, "p={p}: {min_dist}");
        }
    }
}
