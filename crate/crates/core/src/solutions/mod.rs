//! Closed-form eigensolutions of the interacting walk at fixed `p`.
//!
//! All P-subspace solutions share one shape. With `(a, b, c, d)` the
//! components of `v_k^{+r}` (`r` the branch) and `T` the transmission
//! coefficient, for `z ≥ 0`
//!
//! ```text
//! ψ^{1,4}(z) = (a, d) · (e^{-i(2z+1)k} - T e^{i(2z+1)k})
//! ψ²(z)      = b e^{-2izk} - T c e^{2izk}        (z > 0)
//! ψ³(z)      = c e^{-2izk} - T b e^{2izk}        (z > 0)
//! ψ²(0)      = ξ,  ψ³(0) = -ξ,  ξ = e^{-iχ}(b - T c)
//! ```
//!
//! and negative `z` follows from antisymmetry. Bound states are the `T = 0`
//! case at complex `k` with `Im k < 0`.

mod bands;
mod bound;
mod scattering;
mod special;

pub use bands::{band_table, continuous_bands, degeneracy_scan, BandEdges, BandRow, DegeneracyReport, DegenerateSolution};
pub use bound::{bound_indicator, bound_state, bound_state_momentum, bound_state_roots, BoundRoot, GammaLine};
pub use scattering::{scattering_state, transmission, TransmissionCoefficient};
pub use special::{localized_state, stationary_profile, stationary_solutions, StationaryPair, PROFILE_NODES};

use crate::numeric::{ComplexMomentum, Momentum, Sign, Vec4C, WalkParams, C64};
use crate::two_particle::{FixedPState, RelativeState};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolutionKind {
    Scattering,
    Bound,
    Localized,
    Stationary,
}

impl std::fmt::Display for SolutionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SolutionKind::Scattering => "scattering",
            SolutionKind::Bound => "bound",
            SolutionKind::Localized => "localized",
            SolutionKind::Stationary => "stationary",
        };
        f.write_str(s)
    }
}

/// How the amplitudes are generated.
#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Profile {
    /// The shared ansatz (P-subspace layout), multiplied by `scale`.
    Ansatz {
        k: C64,
        v: Vec4C,
        t: C64,
        xi: C64,
        scale: C64,
    },
    /// Finitely supported P-layout amplitudes.
    Finite { z_min: i64, amps: Vec<Vec4C> },
    /// Plane wave `v e^{-iky} - E v e^{iky}` restricted to the complement of P.
    Complement { k: f64, v: Vec4C },
}

/// An eigenvector of `U₂(χ,p)` with eigenvalue `e^{-iω}`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSolution {
    pub kind: SolutionKind,
    pub p: Momentum,
    pub k: ComplexMomentum,
    pub chi: f64,
    pub params: WalkParams,
    pub branch: Sign,
    pub omega: f64,
    pub transmission: Option<C64>,
    pub(crate) profile: Profile,
}

impl EigenSolution {
    pub fn eigenvalue(&self) -> C64 {
        C64::from_polar(1.0, -self.omega)
    }

    /// True when the solution lives in the image of P (the layout of [`FixedPState`]).
    pub fn in_p_subspace(&self) -> bool {
        !matches!(self.profile, Profile::Complement { .. })
    }

    /// P-layout amplitude `ψ(z)`; zero for solutions outside the P subspace.
    pub fn amplitude(&self, z: i64) -> Vec4C {
        match &self.profile {
            Profile::Ansatz { k, v, t, xi, scale } => {
                if z >= 0 {
                    ansatz_nonneg(z, *k, v, *t, *xi) * *scale
                } else {
                    let a = ansatz_nonneg(-z - 1, *k, v, *t, *xi) * *scale;
                    let b = ansatz_nonneg(-z, *k, v, *t, *xi) * *scale;
                    -Vec4C::new(a[0], b[2], b[1], a[3])
                }
            }
            Profile::Finite { z_min, amps } => {
                let i = z - z_min;
                if i >= 0 && (i as usize) < amps.len() {
                    amps[i as usize]
                } else {
                    Vec4C::zeros()
                }
            }
            Profile::Complement { .. } => Vec4C::zeros(),
        }
    }

    /// Amplitude on the full relative lattice.
    pub fn relative_amplitude(&self, y: i64) -> Vec4C {
        let zero = C64::from(0.0);
        match &self.profile {
            Profile::Complement { k, v } => {
                let f = C64::from_polar(1.0, -k * y as f64);
                let g = C64::from_polar(1.0, k * y as f64);
                let full = v * f - Vec4C::new(v[0], v[2], v[1], v[3]) * g;
                if y.rem_euclid(2) == 0 {
                    Vec4C::new(full[0], zero, zero, full[3])
                } else {
                    Vec4C::new(zero, full[1], full[2], zero)
                }
            }
            _ => {
                let z = y.div_euclid(2);
                let a = self.amplitude(z);
                if y.rem_euclid(2) == 1 {
                    Vec4C::new(a[0], zero, zero, a[3])
                } else {
                    Vec4C::new(zero, a[1], a[2], zero)
                }
            }
        }
    }

    /// P-layout samples on `z ∈ [z_min, z_min + len)`.
    pub fn sample(&self, z_min: i64, len: usize) -> FixedPState {
        FixedPState::from_fn(self.p, z_min, len, |z| self.amplitude(z))
    }

    /// Samples on the open window `[-half, half]`.
    pub fn sample_window(&self, half: usize) -> FixedPState {
        self.sample(-(half as i64), 2 * half + 1)
    }

    /// Samples on a relative ring of even length `m` starting at `-m/2`.
    pub fn sample_relative(&self, m: usize) -> crate::Result<RelativeState> {
        RelativeState::from_fn(self.p, -((m / 2) as i64), m, |y| self.relative_amplitude(y))
    }

    /// Multiplies every amplitude by `c`.
    pub fn rescale(&mut self, c: C64) {
        match &mut self.profile {
            Profile::Ansatz { scale, .. } => *scale *= c,
            Profile::Finite { amps, .. } => amps.iter_mut().for_each(|v| *v *= c),
            Profile::Complement { v, .. } => *v *= c,
        }
    }

    /// Decay rate of `|ψ|²` per unit `z` (`4|Im k|`), zero for non-decaying kinds.
    pub fn decay_rate(&self) -> f64 {
        match self.kind {
            SolutionKind::Bound => 4.0 * self.k.im.abs(),
            _ => 0.0,
        }
    }
}

fn ansatz_nonneg(z: i64, k: C64, v: &Vec4C, t: C64, xi: C64) -> Vec4C {
    let i = C64::new(0.0, 1.0);
    let odd = (2 * z + 1) as f64;
    let in_odd = (-i * k * odd).exp();
    let odd_factor = if t == C64::from(0.0) {
        in_odd
    } else {
        in_odd - t * (i * k * odd).exp()
    };
    let (p2, p3) = if z == 0 {
        (xi, -xi)
    } else {
        let e = (-i * k * (2 * z) as f64).exp();
        if t == C64::from(0.0) {
            (v[1] * e, v[2] * e)
        } else {
            let f = (i * k * (2 * z) as f64).exp();
            (v[1] * e - t * v[2] * f, v[2] * e - t * v[1] * f)
        }
    };
    Vec4C::new(v[0] * odd_factor, p2, p3, v[3] * odd_factor)
}

/// Shared constructor used by the scattering and bound builders.
pub(crate) fn ansatz_solution(
    kind: SolutionKind,
    p: f64,
    k: C64,
    branch: Sign,
    params: &WalkParams,
    v: Vec4C,
    t: C64,
    omega: f64,
) -> EigenSolution {
    let xi = C64::from_polar(1.0, -params.chi()) * (v[1] - t * v[2]);
    EigenSolution {
        kind,
        p: Momentum::new(p),
        k: ComplexMomentum::from(k),
        chi: params.chi(),
        params: *params,
        branch,
        omega,
        transmission: Some(t),
        profile: Profile::Ansatz {
            k,
            v,
            t,
            xi,
            scale: C64::from(1.0),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::Boundary;
    use crate::two_particle::projector_p;

    #[test]
    fn relative_view_matches_layout() {
        let pr = WalkParams::new(0.6, 1.1).unwrap();
        let sol = scattering_state(0.4, 0.7, Sign::Plus, &pr).unwrap();
        let rel = sol.sample_relative(40).unwrap();
        assert!(projector_p(&rel).max_abs_diff(&rel) == 0.0);
        let fp = rel.to_fixed_p();
        let direct = sol.sample(-10, 20);
        assert!(fp.max_abs_diff(&direct) < 1e-15);
        assert!(direct.antisymmetry_defect(Boundary::Open) < 1e-14);
    }
}
