//! Fixed-`p` walk on the P-subspace lattice.
//!
//! A state holds `ψ(z) = (ψ¹, ψ², ψ³, ψ⁴)(z)` where `ψ¹, ψ⁴` live on the odd
//! relative site `y = 2z+1` and `ψ², ψ³` on the even site `y = 2z`. One step is
//! `U₂ = W₂ V`: the interaction phase `e^{iχ}` on `ψ²(0), ψ³(0)` followed by the
//! free operator
//!
//! ```text
//! ψ¹(z) ← ν²e^{2ip} ψ¹(z) - iμν e^{ip} (ψ²(z) + ψ³(z+1)) - μ² ψ⁴(z)
//! ψ²(z) ← -iμν (e^{ip} ψ¹(z-1) + e^{-ip} ψ⁴(z-1)) + ν² ψ²(z-1) - μ² ψ³(z)
//! ψ³(z) ← -iμν (e^{ip} ψ¹(z) + e^{-ip} ψ⁴(z)) - μ² ψ²(z) + ν² ψ³(z+1)
//! ψ⁴(z) ← -μ² ψ¹(z) - iμν e^{-ip} (ψ²(z) + ψ³(z+1)) + ν²e^{-2ip} ψ⁴(z)
//! ```

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numeric::{cis, Boundary, Mat4C, Momentum, Vec4C, WalkParams, C64, I};

/// Relative amplitude below which edge entries of an open window count as empty.
pub const OPEN_GUARD: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq)]
pub struct FixedPState {
    pub p: Momentum,
    pub z_min: i64,
    pub amps: Vec<Vec4C>,
}

impl FixedPState {
    pub fn zeros(p: Momentum, z_min: i64, len: usize) -> Self {
        FixedPState {
            p,
            z_min,
            amps: vec![Vec4C::zeros(); len],
        }
    }

    /// Open window `z ∈ [-half, half]`.
    pub fn window(p: Momentum, half: usize) -> Self {
        Self::zeros(p, -(half as i64), 2 * half + 1)
    }

    /// Ring of `n` sites starting at `-n/2`.
    pub fn ring(p: Momentum, n: usize) -> Self {
        Self::zeros(p, -((n / 2) as i64), n)
    }

    pub fn from_fn(p: Momentum, z_min: i64, len: usize, mut f: impl FnMut(i64) -> Vec4C) -> Self {
        FixedPState {
            p,
            z_min,
            amps: (0..len).map(|i| f(z_min + i as i64)).collect(),
        }
    }

    /// Deterministic random state with unit norm.
    pub fn pseudo_random(p: Momentum, z_min: i64, len: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut st = Self::from_fn(p, z_min, len, |_| {
            Vec4C::from_fn(|_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        });
        st.normalize();
        st
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn z_max(&self) -> i64 {
        self.z_min + self.amps.len() as i64 - 1
    }

    pub fn contains(&self, z: i64) -> bool {
        z >= self.z_min && z <= self.z_max()
    }

    /// Amplitude at `z`, zero outside the window.
    pub fn get(&self, z: i64) -> Vec4C {
        if self.contains(z) {
            self.amps[(z - self.z_min) as usize]
        } else {
            Vec4C::zeros()
        }
    }

    /// Amplitude at `z` with ring wrap-around.
    pub fn get_wrapped(&self, z: i64) -> Vec4C {
        let n = self.amps.len() as i64;
        self.amps[(z - self.z_min).rem_euclid(n) as usize]
    }

    fn fetch(&self, z: i64, boundary: Boundary) -> Vec4C {
        match boundary {
            Boundary::Periodic => self.get_wrapped(z),
            Boundary::Open => self.get(z),
        }
    }

    pub fn set(&mut self, z: i64, v: Vec4C) {
        let i = (z - self.z_min) as usize;
        self.amps[i] = v;
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|v| v.norm_squared()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            for v in &mut self.amps {
                *v /= C64::from(n);
            }
        }
    }

    /// `⟨self|other⟩` over a common layout.
    pub fn inner(&self, other: &FixedPState) -> C64 {
        assert_eq!(self.z_min, other.z_min);
        assert_eq!(self.len(), other.len());
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.dotc(b))
            .sum()
    }

    pub fn scale(&mut self, c: C64) {
        for v in &mut self.amps {
            *v *= c;
        }
    }

    pub fn max_abs_diff(&self, other: &FixedPState) -> f64 {
        assert_eq!(self.len(), other.len());
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| crate::numeric::max_abs(&(a - b)))
            .fold(0.0, f64::max)
    }

    pub fn map_components(&self, f: impl Fn(&Vec4C) -> Vec4C) -> Self {
        FixedPState {
            p: self.p,
            z_min: self.z_min,
            amps: self.amps.iter().map(f).collect(),
        }
    }

    /// Fermionic exchange `J`: `(Jψ)^{1,4}(z) = -ψ^{1,4}(-z-1)`,
    /// `(Jψ)²(z) = -ψ³(-z)`, `(Jψ)³(z) = -ψ²(-z)`. Antisymmetric states satisfy `Jψ = ψ`.
    pub fn exchange(&self, boundary: Boundary) -> Self {
        Self::from_fn(self.p, self.z_min, self.len(), |z| {
            let a = self.fetch(-z - 1, boundary);
            let b = self.fetch(-z, boundary);
            -Vec4C::new(a[0], b[2], b[1], a[3])
        })
    }

    /// `max |ψ - Jψ|`. On an open window only pairs with both partners inside count.
    pub fn antisymmetry_defect(&self, boundary: Boundary) -> f64 {
        if boundary == Boundary::Periodic {
            return self.max_abs_diff(&self.exchange(boundary));
        }
        let mut worst: f64 = 0.0;
        for z in self.z_min..=self.z_max() {
            let v = self.get(z);
            if self.contains(-z - 1) {
                let m = self.get(-z - 1);
                worst = worst.max((v[0] + m[0]).norm()).max((v[3] + m[3]).norm());
            }
            if self.contains(-z) {
                let m = self.get(-z);
                worst = worst.max((v[1] + m[2]).norm()).max((v[2] + m[1]).norm());
            }
        }
        worst
    }

    /// `(ψ + Jψ)/2`.
    pub fn antisymmetrized(&self, boundary: Boundary) -> Self {
        let j = self.exchange(boundary);
        let mut out = self.clone();
        for (a, b) in out.amps.iter_mut().zip(&j.amps) {
            *a = (*a + b) * C64::from(0.5);
        }
        out
    }
}

/// Stencil coefficients of the fixed-`p` free operator.
#[derive(Debug, Clone, Copy)]
pub struct FixedPWalk {
    pub p: f64,
    /// `ν² e^{2ip}`
    pub a11: C64,
    /// `ν² e^{-2ip}`
    pub a44: C64,
    /// `-iμν e^{ip}`
    pub hp: C64,
    /// `-iμν e^{-ip}`
    pub hm: C64,
    pub nu2: C64,
    pub mu2: C64,
    pub phase: C64,
}

impl FixedPWalk {
    pub fn new(p: f64, params: &WalkParams) -> Self {
        let (mu, nu) = (params.mu(), params.nu());
        FixedPWalk {
            p,
            a11: cis(2.0 * p) * nu * nu,
            a44: cis(-2.0 * p) * nu * nu,
            hp: -I * cis(p) * (mu * nu),
            hm: -I * cis(-p) * (mu * nu),
            nu2: C64::from(nu * nu),
            mu2: C64::from(mu * mu),
            phase: cis(params.chi()),
        }
    }

    /// Free operator on a single site, given `ψ(z-1)`, `ψ(z)`, `ψ(z+1)`.
    #[inline]
    pub fn apply_local(&self, prev: &Vec4C, here: &Vec4C, next: &Vec4C) -> Vec4C {
        let s = here[1] + next[2];
        Vec4C::new(
            self.a11 * here[0] + self.hp * s - self.mu2 * here[3],
            self.hp * prev[0] + self.nu2 * prev[1] - self.mu2 * here[2] + self.hm * prev[3],
            self.hp * here[0] - self.mu2 * here[1] + self.nu2 * next[2] + self.hm * here[3],
            -self.mu2 * here[0] + self.hm * s + self.a44 * here[3],
        )
    }

    /// The 4×4 blocks `(B₋, B₀, B₊)` with `(Wψ)(z) = B₋ψ(z-1) + B₀ψ(z) + B₊ψ(z+1)`.
    pub fn blocks(&self) -> [Mat4C; 3] {
        let mut out = [Mat4C::zeros(); 3];
        for j in 0..4 {
            let mut e = Vec4C::zeros();
            e[j] = C64::from(1.0);
            let z = Vec4C::zeros();
            out[0].set_column(j, &self.apply_local(&e, &z, &z));
            out[1].set_column(j, &self.apply_local(&z, &e, &z));
            out[2].set_column(j, &self.apply_local(&z, &z, &e));
        }
        out
    }

    fn check_open(&self, state: &FixedPState) -> Result<()> {
        if state.is_empty() {
            return Ok(());
        }
        let tol = OPEN_GUARD * state.norm();
        let last = state.get(state.z_max());
        let first = state.get(state.z_min);
        if [last[0], last[1], last[3]].iter().any(|c| c.norm() > tol) {
            return Err(Error::SupportOverflow(format!("right edge z = {}", state.z_max())));
        }
        if first[2].norm() > tol {
            return Err(Error::SupportOverflow(format!("left edge z = {}", state.z_min)));
        }
        Ok(())
    }

    /// Free part `W₂(p)`.
    pub fn free_step(&self, state: &FixedPState, boundary: Boundary) -> Result<FixedPState> {
        if boundary == Boundary::Open {
            self.check_open(state)?;
        }
        let mut out = state.clone();
        for (i, v) in out.amps.iter_mut().enumerate() {
            let z = state.z_min + i as i64;
            *v = self.apply_local(
                &state.fetch(z - 1, boundary),
                &state.amps[i],
                &state.fetch(z + 1, boundary),
            );
        }
        Ok(out)
    }

    /// Interaction `V`: `ψ²(0), ψ³(0) ← e^{iχ} ψ²(0), e^{iχ} ψ³(0)`.
    pub fn interaction(&self, state: &mut FixedPState) {
        if state.contains(0) {
            let i = (-state.z_min) as usize;
            state.amps[i][1] *= self.phase;
            state.amps[i][2] *= self.phase;
        }
    }

    /// `U₂ = W₂ V`.
    pub fn step(&self, state: &FixedPState, boundary: Boundary) -> Result<FixedPState> {
        let mut s = state.clone();
        self.interaction(&mut s);
        self.free_step(&s, boundary)
    }
}

/// Free fixed-`p` operator applied to `state`.
pub fn w2_fixed_p(state: &FixedPState, params: &WalkParams, boundary: Boundary) -> Result<FixedPState> {
    FixedPWalk::new(state.p.value(), params).free_step(state, boundary)
}

/// Interaction `V` applied to `state`.
pub fn interaction_fixed_p(state: &FixedPState, params: &WalkParams) -> FixedPState {
    let mut s = state.clone();
    FixedPWalk::new(state.p.value(), params).interaction(&mut s);
    s
}

/// One interacting step `U₂ = W₂ V` at the momentum carried by `state`.
pub fn u2_step(state: &FixedPState, params: &WalkParams, boundary: Boundary) -> Result<FixedPState> {
    FixedPWalk::new(state.p.value(), params).step(state, boundary)
}

/// `n` interacting steps; returns every intermediate state including the initial one.
pub fn u2_evolve(
    state: &FixedPState,
    params: &WalkParams,
    boundary: Boundary,
    steps: usize,
) -> Result<Vec<FixedPState>> {
    let walk = FixedPWalk::new(state.p.value(), params);
    let mut out = Vec::with_capacity(steps + 1);
    out.push(state.clone());
    for _ in 0..steps {
        let next = walk.step(out.last().unwrap(), boundary)?;
        out.push(next);
    }
    Ok(out)
}
