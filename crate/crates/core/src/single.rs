//! The Dirac walk on the line.
//!
//! Momentum convention: `|p⟩ = (2π)^{-1/2} Σ_x e^{-ipx} |x⟩`, so the
//! translation `T|x⟩ = |x+1⟩` acts as `e^{ip}` and the walk matrix
//! `W(p) = (ν e^{ip}, -iμ; -iμ, ν e^{-ip})` corresponds to the stencil
//!
//! ```text
//! (Wψ)↑(x) = ν ψ↑(x-1) - iμ ψ↓(x)
//! (Wψ)↓(x) = -iμ ψ↑(x) + ν ψ↓(x+1)
//! ```
//!
//! i.e. the spin-up component moves right. Plane waves `e^{-ipx} v_p^s` are
//! eigenvectors with eigenvalue `e^{-isω(p)}`.

use crate::error::{Error, Result};
use crate::numeric::{
    cis, principal_arccos, principal_sqrt_one_minus_sq, Boundary, ComplexMomentum, Mat2C, Sign,
    Vec2C, WalkParams, C64, I, ZERO,
};

/// `ω(q) = Arccos(ν cos q)` for complex `q`.
pub fn omega(q: C64, params: &WalkParams) -> C64 {
    principal_arccos(q.cos() * params.nu())
}

/// Dispersion relation `ω(p)`; real and in `[0, π]` for real `p`.
pub fn dispersion(p: impl Into<ComplexMomentum>, params: &WalkParams) -> C64 {
    omega(p.into().as_c64(), params)
}

/// `(g₊(q), g₋(q))` with `g_s(q) = -i(s sin ω(q) + ν sin q)`.
///
/// `g₊ g₋ = μ²`, which is used to evaluate whichever factor is small without
/// cancellation.
pub fn g_pair(q: C64, params: &WalkParams) -> (C64, C64) {
    let nu = params.nu();
    let mu2 = params.mu() * params.mu();
    let sw = principal_sqrt_one_minus_sq(q.cos() * nu);
    let t = q.sin() * nu;
    let sum = sw + t;
    let diff = sw - t;
    let (sum, diff) = if sum.norm() >= diff.norm() {
        (sum, mu2 / sum)
    } else {
        (mu2 / diff, diff)
    };
    (-I * sum, I * diff)
}

/// `g_s(q)` for complex `q`.
pub fn g(q: C64, s: Sign, params: &WalkParams) -> C64 {
    let (gp, gm) = g_pair(q, params);
    match s {
        Sign::Plus => gp,
        Sign::Minus => gm,
    }
}

/// `g_s(p)` for a (possibly complex) momentum.
pub fn g_s(p: impl Into<ComplexMomentum>, s: Sign, params: &WalkParams) -> C64 {
    g(p.into().as_c64(), s, params)
}

/// `W(q)` for complex `q`.
pub fn walk_matrix_c(q: C64, params: &WalkParams) -> Mat2C {
    let nu = params.nu();
    let off = -I * params.mu();
    Mat2C::new((I * q).exp() * nu, off, off, (-I * q).exp() * nu)
}

/// The momentum-space walk matrix `W(p)`; unitary for real `p`.
pub fn walk_matrix(p: impl Into<ComplexMomentum>, params: &WalkParams) -> Mat2C {
    walk_matrix_c(p.into().as_c64(), params)
}

/// Unnormalized eigenvector `(-iμ, g_s(q))`.
pub fn eigenvector_raw(q: C64, s: Sign, params: &WalkParams) -> Vec2C {
    Vec2C::new(-I * params.mu(), g(q, s, params))
}

/// `|N_s(q)| = √(μ² + |g_s(q)|²)`.
pub fn norm_factor(q: C64, s: Sign, params: &WalkParams) -> f64 {
    let gs = g(q, s, params);
    let n = (params.mu() * params.mu() + gs.norm_sqr()).sqrt();
    assert!(n > 0.0, "|N_s| vanishes only for μ = 0");
    n
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiracEigenvector {
    pub branch: Sign,
    pub p: ComplexMomentum,
    pub vec: Vec2C,
}

impl DiracEigenvector {
    /// `e^{-isω(p)}`.
    pub fn eigenvalue(&self, params: &WalkParams) -> C64 {
        (-I * self.branch.value() * dispersion(self.p, params)).exp()
    }
}

/// `v_p^s = (-iμ, g_s(p)) / |N_s(p)|`.
pub fn eigenvector(p: impl Into<ComplexMomentum>, s: Sign, params: &WalkParams) -> DiracEigenvector {
    let p = p.into();
    let q = p.as_c64();
    let vec = eigenvector_raw(q, s, params) / C64::from(norm_factor(q, s, params));
    DiracEigenvector { branch: s, p, vec }
}

/// Single-particle state on a line segment `x ∈ [x_min, x_min + len)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LineState {
    pub x_min: i64,
    pub amps: Vec<Vec2C>,
}

impl LineState {
    pub fn zeros(x_min: i64, len: usize) -> Self {
        Self {
            x_min,
            amps: vec![Vec2C::zeros(); len],
        }
    }

    pub fn from_fn(x_min: i64, len: usize, mut f: impl FnMut(i64) -> Vec2C) -> Self {
        Self {
            x_min,
            amps: (0..len).map(|i| f(x_min + i as i64)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|v| v.norm_squared()).sum::<f64>().sqrt()
    }

    pub fn get(&self, x: i64) -> Vec2C {
        self.amps[(x - self.x_min) as usize]
    }
}

/// One step of the Dirac walk in position space.
pub fn position_step(state: &LineState, params: &WalkParams, boundary: Boundary) -> Result<LineState> {
    let n = state.len();
    if n == 0 {
        return Ok(state.clone());
    }
    if boundary == Boundary::Open {
        // spin-up leaves through the right edge, spin-down through the left
        if state.amps[n - 1][0] != ZERO || state.amps[0][1] != ZERO {
            return Err(Error::SupportOverflow(format!(
                "line window [{}, {})",
                state.x_min,
                state.x_min + n as i64
            )));
        }
    }
    let nu = params.nu();
    let off = -I * params.mu();
    let at = |i: isize| -> Vec2C {
        match boundary {
            Boundary::Periodic => state.amps[i.rem_euclid(n as isize) as usize],
            Boundary::Open => {
                if i < 0 || i >= n as isize {
                    Vec2C::zeros()
                } else {
                    state.amps[i as usize]
                }
            }
        }
    };
    let amps = (0..n as isize)
        .map(|i| {
            let here = at(i);
            let up = at(i - 1)[0] * nu + off * here[1];
            let down = off * here[0] + at(i + 1)[1] * nu;
            Vec2C::new(up, down)
        })
        .collect();
    Ok(LineState {
        x_min: state.x_min,
        amps,
    })
}

/// Plane wave `e^{-ipx} v` sampled on `[x_min, x_min+len)`.
pub fn plane_wave(p: f64, v: Vec2C, x_min: i64, len: usize) -> LineState {
    LineState::from_fn(x_min, len, |x| v * cis(-p * x as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::{unitarity_defect, ONE};
    use nalgebra::Matrix2;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn params(m: f64) -> WalkParams {
        WalkParams::free(m).unwrap()
    }

    #[test]
    fn dispersion_examples() {
        let pr = params(0.6); // ν = 0.8
        let w = dispersion(0.0, &pr);
        assert!((w.re.cos() - 0.8).abs() < 1e-15 && w.im == 0.0);
        assert!((w.re - 0.643_501_108_793_284_4).abs() < 1e-12);
        assert!((dispersion(PI / 2.0, &pr).re - PI / 2.0).abs() < 1e-15);
        let expected = PI - 0.8f64.acos();
        assert!((dispersion(PI, &pr).re - expected).abs() < 1e-14);
    }

    #[test]
    fn g_examples() {
        let pr = params(0.6);
        assert!((g_s(0.0, Sign::Plus, &pr) - C64::new(0.0, -0.6)).norm() < 1e-15);
        assert!((g_s(0.0, Sign::Minus, &pr) - C64::new(0.0, 0.6)).norm() < 1e-15);
        assert!((g_s(PI / 2.0, Sign::Plus, &pr) - C64::new(0.0, -1.8)).norm() < 1e-15);
    }

    #[test]
    fn g_product_identity_for_complex_momenta() {
        let pr = params(0.7);
        for &(re, im) in &[(0.3, -4.0), (1.1, 7.5), (-2.0, -15.0), (0.5, 0.0)] {
            let (gp, gm) = g_pair(C64::new(re, im), &pr);
            let mu2 = 0.49;
            assert!((gp * gm - C64::from(mu2)).norm() < 1e-12 * (1.0 + mu2));
            // against the direct definition where it does not cancel
            let q = C64::new(re, im);
            let direct = -I * (omega(q, &pr).sin() + q.sin() * pr.nu());
            if direct.norm() > 1e-3 * q.sin().norm() {
                assert!((direct - gp).norm() < 1e-9 * direct.norm());
            }
        }
    }

    #[test]
    fn walk_matrix_examples() {
        let pr = params(0.6);
        let w0 = walk_matrix(0.0, &pr);
        let off = C64::new(0.0, -0.6);
        let expected = Matrix2::new(C64::from(0.8), off, off, C64::from(0.8));
        assert!((w0 - expected).norm() < 1e-15);
        let wpi = walk_matrix(PI, &pr);
        let expected = Matrix2::new(C64::from(-0.8), off, off, C64::from(-0.8));
        assert!((wpi - expected).norm() < 1e-15);
        for p in [-3.0, -1.0, 0.2, 1.7, 3.1] {
            let w = walk_matrix(p, &pr);
            assert!((w.determinant().norm() - 1.0).abs() < 1e-14);
            assert!(unitarity_defect(&w) < 1e-13);
        }
    }

    #[test]
    fn eigenvector_examples() {
        let pr = params(0.6);
        let v = eigenvector(0.0, Sign::Plus, &pr).vec;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((v - Vec2C::new(C64::new(0.0, -s), C64::new(0.0, -s))).norm() < 1e-15);

        let e = eigenvector(1.1, Sign::Minus, &pr);
        let res = (walk_matrix(1.1, &pr) * e.vec - e.vec * e.eigenvalue(&pr)).norm();
        assert!(res <= 1e-12);

        for p in [-2.5, 0.1, 1.1, 3.0] {
            let a = eigenvector(p, Sign::Plus, &pr).vec;
            let b = eigenvector(p, Sign::Minus, &pr).vec;
            assert!(a.dotc(&b).norm() < 1e-14);
            assert!((a.norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn spectrum_and_symmetries_of_dispersion() {
        let pr = params(0.7);
        for i in 0..64 {
            let p = -PI + (i as f64 + 0.5) * 2.0 * PI / 64.0;
            let w = dispersion(p, &pr).re;
            // eigenvalues of W(p) are e^{∓iω}
            let m = walk_matrix(p, &pr);
            let tr = m.trace();
            assert!((tr - C64::from(2.0 * w.cos())).norm() < 1e-14);
            assert!((m.determinant() - ONE).norm() < 1e-14);
            assert!((dispersion(-p, &pr).re - w).abs() < 1e-14);
            assert!((dispersion(p + PI, &pr).re - (PI - w)).abs() < 1e-13);
            assert!((dispersion(p - PI, &pr).re - (PI - w)).abs() < 1e-13);
        }
    }

    #[test]
    fn position_step_translation_limit() {
        let pr = params(1e-8);
        let mut s = LineState::zeros(-4, 9);
        s.amps[4] = Vec2C::new(ONE, ZERO);
        let out = position_step(&s, &pr, Boundary::Periodic).unwrap();
        assert!((out.get(1)[0] - ONE).norm() < 1e-8);
        assert!(out.get(0)[0].norm() < 1e-15);
    }

    #[test]
    fn position_step_preserves_norm() {
        let pr = params(0.6);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = LineState::from_fn(0, 64, |_| {
            Vec2C::new(
                C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
                C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5),
            )
        });
        let out = position_step(&s, &pr, Boundary::Periodic).unwrap();
        assert!((out.norm() - s.norm()).abs() <= 1e-12);
    }

    #[test]
    fn position_step_matches_momentum_form() {
        let pr = params(0.6);
        let len = 64usize;
        for j in [1, 5, 17, 40] {
            let p = 2.0 * PI * j as f64 / len as f64;
            for s in Sign::BOTH {
                let e = eigenvector(p, s, &pr);
                let wave = plane_wave(p, e.vec, 0, len);
                let out = position_step(&wave, &pr, Boundary::Periodic).unwrap();
                let lambda = e.eigenvalue(&pr);
                let err = out
                    .amps
                    .iter()
                    .zip(&wave.amps)
                    .map(|(a, b)| (a - b * lambda).norm())
                    .fold(0.0, f64::max);
                assert!(err <= 1e-10, "p={p} s={s} err={err}");
            }
        }
    }

    #[test]
    fn open_boundary_refuses_leaking_state() {
        let pr = params(0.6);
        let mut s = LineState::zeros(0, 8);
        s.amps[7] = Vec2C::new(ONE, ZERO);
        assert!(matches!(
            position_step(&s, &pr, Boundary::Open),
            Err(Error::SupportOverflow(_))
        ));
        let mut s = LineState::zeros(0, 8);
        s.amps[3] = Vec2C::new(ONE, ONE);
        let out = position_step(&s, &pr, Boundary::Open).unwrap();
        assert!((out.norm() - s.norm()).abs() < 1e-14);
    }
}
