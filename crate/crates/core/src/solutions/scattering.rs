use std::f64::consts::PI;

use super::{ansatz_solution, EigenSolution, SolutionKind};
use crate::error::{Error, Result};
use crate::numeric::{reduce_to_zone, Sign, WalkParams, C64};
use crate::two_particle::{omega_sr, two_eigenvector, two_eigenvector_raw};

/// Denominators below this modulus count as a pole.
pub const RESONANCE_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmissionCoefficient {
    pub sign: Sign,
    pub value: C64,
    pub p: f64,
    pub k: C64,
    pub chi: f64,
}

/// `T₊ = (g₊(p+k) + e^{-iχ} g₊(p-k)) / (g₊(p-k) + e^{-iχ} g₊(p+k))` and the
/// analogue `T₋` with `g₋(p-k)` in place of `g₊(p-k)`.
pub fn transmission(
    p: f64,
    k: impl Into<crate::numeric::ComplexMomentum>,
    sign: Sign,
    params: &WalkParams,
) -> Result<TransmissionCoefficient> {
    let k = k.into().as_c64();
    let v = two_eigenvector_raw(p, k, Sign::Plus, sign, params);
    let value = transmission_from(&v, params.chi())?;
    Ok(TransmissionCoefficient {
        sign,
        value,
        p,
        k,
        chi: params.chi(),
    })
}

/// `(c + e^{-iχ} b) / (b + e^{-iχ} c)` for `v = (a, b, c, d)`.
pub(crate) fn transmission_from(v: &crate::numeric::Vec4C, chi: f64) -> Result<C64> {
    let ph = C64::from_polar(1.0, -chi);
    let (b, c) = (v[1], v[2]);
    let den = b + ph * c;
    let num = c + ph * b;
    if num == den {
        return Ok(C64::from(1.0));
    }
    let scale = b.norm() + c.norm();
    if den.norm() <= RESONANCE_TOL * scale.max(1.0) {
        return Err(Error::Resonance(den.norm()));
    }
    Ok(num / den)
}

/// Scattering eigenvector at real relative momentum `k` on branch `(+, branch)`,
/// with unit incoming amplitude. Eigenvalue `e^{-iω_{+,branch}(p,k)}`.
pub fn scattering_state(p: f64, k: f64, branch: Sign, params: &WalkParams) -> Result<EigenSolution> {
    if !k.is_finite() || !p.is_finite() {
        return Err(Error::InvalidParameter(format!("non-finite momentum p={p}, k={k}")));
    }
    let kz = reduce_to_zone(k);
    for bad in [0.0, PI / 2.0, -PI / 2.0, PI] {
        let d = reduce_to_zone(kz - bad).abs();
        if d < 1e-9 {
            return Err(Error::DegenerateMomentum(k));
        }
    }
    let v = two_eigenvector(p, k, Sign::Plus, branch, params).vec;
    let t = transmission_from(&v, params.chi())?;
    let omega = reduce_to_zone(omega_sr(p, k, Sign::Plus, branch, params).re);
    Ok(ansatz_solution(
        SolutionKind::Scattering,
        p,
        C64::from(k),
        branch,
        params,
        v,
        t,
        omega,
    ))
}
