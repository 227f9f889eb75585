//! Fixed-`p` walk on the full relative lattice `y ∈ ℤ_M` (ring, `M` even).
//!
//! The free operator at fixed `p`, with `T_w → e^{ip}`, reads
//!
//! ```text
//! φ₁(y) ← ν²e^{2ip} φ₁(y) - iμν e^{ip} (φ₂(y-1) + φ₃(y+1)) - μ² φ₄(y)
//! φ₂(y) ← -iμν (e^{ip} φ₁(y-1) + e^{-ip} φ₄(y-1)) + ν² φ₂(y-2) - μ² φ₃(y)
//! φ₃(y) ← -iμν (e^{ip} φ₁(y+1) + e^{-ip} φ₄(y+1)) - μ² φ₂(y) + ν² φ₃(y+2)
//! φ₄(y) ← -μ² φ₁(y) - iμν e^{-ip} (φ₂(y-1) + φ₃(y+1)) + ν²e^{-2ip} φ₄(y)
//! ```
//!
//! The projector P keeps components 1,4 on odd `y` and 2,3 on even `y`; the
//! image of P is the [`FixedPState`] layout.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::fixed_p::{FixedPState, FixedPWalk};
use crate::error::{Error, Result};
use crate::numeric::{Momentum, Vec4C, WalkParams, C64};

#[derive(Debug, Clone, PartialEq)]
pub struct RelativeState {
    pub p: Momentum,
    pub y_min: i64,
    pub amps: Vec<Vec4C>,
}

impl RelativeState {
    /// Ring of `m` sites starting at `y_min`; `m` must be even.
    pub fn zeros(p: Momentum, y_min: i64, m: usize) -> Result<Self> {
        if m == 0 || !m.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!("relative ring length must be even and positive, got {m}")));
        }
        Ok(RelativeState {
            p,
            y_min,
            amps: vec![Vec4C::zeros(); m],
        })
    }

    pub fn from_fn(p: Momentum, y_min: i64, m: usize, f: impl Fn(i64) -> Vec4C) -> Result<Self> {
        let mut st = Self::zeros(p, y_min, m)?;
        for (i, v) in st.amps.iter_mut().enumerate() {
            *v = f(y_min + i as i64);
        }
        Ok(st)
    }

    /// Deterministic unit-norm random state on an even ring (odd `m` is rounded up).
    pub fn pseudo_random(p: Momentum, y_min: i64, m: usize, seed: u64) -> Self {
        let m = m + m % 2;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut st = Self::zeros(p, y_min, m.max(2)).expect("even length");
        for v in &mut st.amps {
            *v = Vec4C::from_fn(|_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        }
        let n = st.norm();
        st.amps.iter_mut().for_each(|v| *v /= C64::from(n));
        st
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn get(&self, y: i64) -> Vec4C {
        let m = self.amps.len() as i64;
        self.amps[(y - self.y_min).rem_euclid(m) as usize]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|v| v.norm_squared()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &RelativeState) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| crate::numeric::max_abs(&(a - b)))
            .fold(0.0, f64::max)
    }

    pub fn map_components(&self, f: impl Fn(&Vec4C) -> Vec4C) -> Self {
        RelativeState {
            p: self.p,
            y_min: self.y_min,
            amps: self.amps.iter().map(f).collect(),
        }
    }

    /// Free operator `W₂(p)` on the ring.
    pub fn free_step(&self, params: &WalkParams) -> Self {
        let c = FixedPWalk::new(self.p.value(), params);
        let mut out = self.clone();
        for (i, v) in out.amps.iter_mut().enumerate() {
            let y = self.y_min + i as i64;
            let here = self.amps[i];
            let (m1, p1) = (self.get(y - 1), self.get(y + 1));
            let (m2, p2) = (self.get(y - 2), self.get(y + 2));
            let s14 = m1[1] + p1[2];
            *v = Vec4C::new(
                c.a11 * here[0] + c.hp * s14 - c.mu2 * here[3],
                c.hp * m1[0] + c.hm * m1[3] + c.nu2 * m2[1] - c.mu2 * here[2],
                c.hp * p1[0] + c.hm * p1[3] - c.mu2 * here[1] + c.nu2 * p2[2],
                -c.mu2 * here[0] + c.hm * s14 + c.a44 * here[3],
            );
        }
        out
    }

    /// Interaction `V`: phase `e^{iχ}` on `φ₂(0), φ₃(0)`.
    pub fn interaction(&self, params: &WalkParams) -> Self {
        let mut out = self.clone();
        let m = self.amps.len() as i64;
        let i = (-self.y_min).rem_euclid(m) as usize;
        let ph = C64::from_polar(1.0, params.chi());
        out.amps[i][1] *= ph;
        out.amps[i][2] *= ph;
        out
    }

    /// `U₂ = W₂ V`.
    pub fn step(&self, params: &WalkParams) -> Self {
        self.interaction(params).free_step(params)
    }

    /// Fermionic exchange `φ(y) ↦ -E φ(-y)`; antisymmetric states are fixed points.
    pub fn exchange(&self) -> Self {
        let mut out = self.clone();
        for (i, v) in out.amps.iter_mut().enumerate() {
            let y = self.y_min + i as i64;
            let r = self.get(-y);
            *v = -Vec4C::new(r[0], r[2], r[1], r[3]);
        }
        out
    }

    /// Restriction to the image of P, as a [`FixedPState`] with `z_min = y_min/2`.
    pub fn to_fixed_p(&self) -> FixedPState {
        let z_min = self.y_min.div_euclid(2);
        let n = self.amps.len() / 2;
        FixedPState::from_fn(self.p, z_min, n, |z| {
            let odd = self.get(2 * z + 1);
            let even = self.get(2 * z);
            Vec4C::new(odd[0], even[1], even[2], odd[3])
        })
    }

    /// Embedding of a [`FixedPState`] ring of `n` sites into a relative ring of `2n` sites.
    pub fn from_fixed_p(state: &FixedPState) -> Self {
        let y_min = 2 * state.z_min;
        let m = 2 * state.len();
        Self::from_fn(state.p, y_min, m, |y| {
            let z = y.div_euclid(2);
            let v = state.get_wrapped(z);
            let zero = C64::from(0.0);
            if y.rem_euclid(2) == 1 {
                Vec4C::new(v[0], zero, zero, v[3])
            } else {
                Vec4C::new(zero, v[1], v[2], zero)
            }
        })
        .expect("even length")
    }
}

/// Projector P onto the sublattice layout: components 1,4 on odd `y`, 2,3 on even `y`.
pub fn projector_p(state: &RelativeState) -> RelativeState {
    let mut out = state.clone();
    for (i, v) in out.amps.iter_mut().enumerate() {
        let y = state.y_min + i as i64;
        if y.rem_euclid(2) == 1 {
            v[1] = C64::from(0.0);
            v[2] = C64::from(0.0);
        } else {
            v[0] = C64::from(0.0);
            v[3] = C64::from(0.0);
        }
    }
    out
}
