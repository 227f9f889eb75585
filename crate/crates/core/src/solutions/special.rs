use std::f64::consts::PI;

use super::bound::CONDITION_TOL;
use super::{scattering_state, EigenSolution, Profile, SolutionKind};
use crate::error::{Error, Result};
use crate::numeric::{reduce_to_zone, ComplexMomentum, Momentum, Sign, Vec4C, WalkParams, C64, I};
use crate::two_particle::two_eigenvector;

/// Perfectly localized molecule state, available when `e^{iχ} = e^{±2ip}`.
///
/// In relative coordinates it occupies `y ∈ {-1, 0, 1}`: the `+` state has
/// `ψ¹(y = ±1) = ∓ie^{ip}` and `(ψ², ψ³)(0) = (μ/ν, -μ/ν)`, the `-` state
/// puts `∓ie^{-ip}` on `ψ⁴` instead. Eigenvalue `e^{±2ip}`.
pub fn localized_state(p: f64, params: &WalkParams) -> Result<EigenSolution> {
    let e = C64::from_polar(1.0, params.chi());
    let branch = if (e - C64::from_polar(1.0, 2.0 * p)).norm() < CONDITION_TOL {
        Sign::Plus
    } else if (e - C64::from_polar(1.0, -2.0 * p)).norm() < CONDITION_TOL {
        Sign::Minus
    } else {
        return Err(Error::LocalizedCondition { chi: params.chi(), p });
    };
    let s = branch.value();
    let ratio = C64::from(params.mu() / params.nu());
    let edge = I * C64::from_polar(1.0, s * p);
    let zero = C64::from(0.0);
    let (lower, upper) = match branch {
        Sign::Plus => (
            Vec4C::new(edge, zero, zero, zero),
            Vec4C::new(-edge, ratio, -ratio, zero),
        ),
        Sign::Minus => (
            Vec4C::new(zero, zero, zero, edge),
            Vec4C::new(zero, ratio, -ratio, -edge),
        ),
    };
    let n = (2.0 + 2.0 * ratio.norm_sqr()).sqrt();
    let amps = vec![lower / C64::from(n), upper / C64::from(n)];
    Ok(EigenSolution {
        kind: SolutionKind::Localized,
        p: Momentum::new(p),
        k: ComplexMomentum::new(0.0, f64::NEG_INFINITY),
        chi: params.chi(),
        params: *params,
        branch,
        omega: reduce_to_zone(-2.0 * s * p),
        transmission: None,
        profile: Profile::Finite { z_min: -1, amps },
    })
}

/// The two eigenvalue-one (at `p = 0`) or eigenvalue `-1` (at `p = π/2`) families.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryPair {
    /// Interacting solution inside the P subspace.
    pub dressed: EigenSolution,
    /// Antisymmetrized plane wave in the complement of P, untouched by the interaction.
    pub complement: EigenSolution,
}

fn flat_branch(p: f64) -> Result<Sign> {
    let z = reduce_to_zone(p);
    if z.abs() < 1e-12 {
        Ok(Sign::Minus)
    } else if (z.abs() - PI / 2.0).abs() < 1e-12 {
        Ok(Sign::Plus)
    } else {
        Err(Error::InvalidParameter(format!(
            "stationary solutions exist only at p ∈ {{0, ±π/2}} (mod π), got p = {p}"
        )))
    }
}

/// Stationary states at `p = 0`, where `ω_{+-}(0,k) = 0` for every `k`
/// (and the analogue at `p = π/2`, where `ω_{++}(π/2,k) = π`).
pub fn stationary_solutions(p: f64, k: f64, params: &WalkParams) -> Result<StationaryPair> {
    let branch = flat_branch(p)?;
    let mut dressed = scattering_state(p, k, branch, params)?;
    dressed.kind = SolutionKind::Stationary;
    let v = two_eigenvector(p, k, Sign::Plus, branch, params).vec;
    let complement = EigenSolution {
        kind: SolutionKind::Stationary,
        p: Momentum::new(p),
        k: ComplexMomentum::real(k),
        chi: params.chi(),
        params: *params,
        branch,
        omega: dressed.omega,
        transmission: None,
        profile: Profile::Complement { k, v },
    };
    Ok(StationaryPair { dressed, complement })
}

/// Default number of quadrature nodes for [`stationary_profile`].
pub const PROFILE_NODES: usize = 2048;

/// `∫ dk (v_k^{+-} ∓ v_k^{-+}) e^{-iky}` at `p = 0` over `k ∈ (-π, π]`, sampled on
/// `y ∈ [-half, half]` with the uniform (periodic trapezoid) rule.
/// `Sign::Minus` gives the difference, `Sign::Plus` the sum.
pub fn stationary_profile(
    params: &WalkParams,
    combination: Sign,
    half: usize,
    nodes: usize,
) -> Result<Vec<(i64, Vec4C)>> {
    if nodes < 16 {
        return Err(Error::InvalidParameter(format!("need at least 16 quadrature nodes, got {nodes}")));
    }
    let dk = 2.0 * PI / nodes as f64;
    let ks: Vec<f64> = (0..nodes).map(|j| -PI + dk * (j + 1) as f64).collect();
    let sign = C64::from(-combination.value());
    let vs: Vec<Vec4C> = ks
        .iter()
        .map(|&k| {
            let a = two_eigenvector(0.0, k, Sign::Plus, Sign::Minus, params).vec;
            let b = two_eigenvector(0.0, k, Sign::Minus, Sign::Plus, params).vec;
            a + b * sign
        })
        .collect();
    let h = half as i64;
    Ok((-h..=h)
        .map(|y| {
            let mut acc = Vec4C::zeros();
            for (k, v) in ks.iter().zip(&vs) {
                acc += v * C64::from_polar(dk, -k * y as f64);
            }
            (y, acc)
        })
        .collect())
}
