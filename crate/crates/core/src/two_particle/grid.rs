//! Position-space two-particle states.
//!
//! [`GridState`] stores `ψ(x₁, x₂)` on an `L × L` grid with sites `0..L`,
//! flattened as `[(x₁ L + x₂) 4 + a]` with `a` the component index
//! (`↑↑, ↑↓, ↓↑, ↓↓`). [`CentreOfMassState`] stores `φ(y, w)` on an `M × M`
//! torus; physical points satisfy `y ≡ w (mod 2)` and the projector C keeps
//! exactly those.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::fixed_p::OPEN_GUARD;
use crate::error::{Error, Result};
use crate::numeric::{Boundary, Vec4C, WalkParams, C64, I};

#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    pub size: usize,
    pub amps: Vec<C64>,
}

impl GridState {
    pub fn zeros(size: usize) -> Self {
        GridState {
            size,
            amps: vec![C64::from(0.0); size * size * 4],
        }
    }

    pub fn pseudo_random(size: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut st = Self::zeros(size);
        for a in &mut st.amps {
            *a = C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5);
        }
        st.normalize();
        st
    }

    #[inline]
    pub fn index(&self, x1: usize, x2: usize, a: usize) -> usize {
        (x1 * self.size + x2) * 4 + a
    }

    pub fn get(&self, x1: usize, x2: usize) -> Vec4C {
        let i = self.index(x1, x2, 0);
        Vec4C::new(self.amps[i], self.amps[i + 1], self.amps[i + 2], self.amps[i + 3])
    }

    pub fn set(&mut self, x1: usize, x2: usize, v: Vec4C) {
        let i = self.index(x1, x2, 0);
        self.amps[i..i + 4].copy_from_slice(v.as_slice());
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            self.amps.iter_mut().for_each(|c| *c /= n);
        }
    }

    pub fn max_abs_diff(&self, other: &GridState) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Particle exchange `(Xψ)(a₁a₂; x₁,x₂) = ψ(a₂a₁; x₂,x₁)`.
    pub fn exchange(&self) -> Self {
        let mut out = Self::zeros(self.size);
        for x1 in 0..self.size {
            for x2 in 0..self.size {
                let v = self.get(x2, x1);
                out.set(x1, x2, Vec4C::new(v[0], v[2], v[1], v[3]));
            }
        }
        out
    }

    /// `max |ψ + Xψ|`; zero for fermionic states.
    pub fn antisymmetry_defect(&self) -> f64 {
        let x = self.exchange();
        self.amps
            .iter()
            .zip(&x.amps)
            .map(|(a, b)| (a + b).norm())
            .fold(0.0, f64::max)
    }

    /// Interaction: phase `e^{iχ}` on `↑↓, ↓↑` where `x₁ = x₂`.
    pub fn apply_interaction(&mut self, chi: f64) {
        let ph = C64::from_polar(1.0, chi);
        for x in 0..self.size {
            let i = self.index(x, x, 0);
            self.amps[i + 1] *= ph;
            self.amps[i + 2] *= ph;
        }
    }

    fn check_open(&self) -> Result<()> {
        let l = self.size;
        let tol = OPEN_GUARD * self.norm();
        // components: a = 2 a₁ + a₂, ↑ = 0
        for t in 0..l {
            for a in 0..4 {
                let (a1, a2) = (a / 2, a % 2);
                let hits = [
                    (a1 == 0, self.amps[self.index(l - 1, t, a)]),
                    (a1 == 1, self.amps[self.index(0, t, a)]),
                    (a2 == 0, self.amps[self.index(t, l - 1, a)]),
                    (a2 == 1, self.amps[self.index(t, 0, a)]),
                ];
                if hits.iter().any(|(on, c)| *on && c.norm() > tol) {
                    return Err(Error::SupportOverflow(format!("grid edge reached (L = {l})")));
                }
            }
        }
        Ok(())
    }

    /// Free step `W ⊗ W`.
    ///
    /// Each output amplitude is `(hh + mm) + (hm + mh)`, where `h`/`m` marks whether
    /// particle 1 or 2 hops or takes the mass term; this grouping makes the step
    /// commute with exchange bit for bit.
    pub fn apply_walk(&self, params: &WalkParams, boundary: Boundary) -> Result<GridState> {
        if boundary == Boundary::Open {
            self.check_open()?;
        }
        let l = self.size;
        let nu = C64::from(params.nu());
        let mimu = -I * params.mu();
        let (c_hh, c_hm, c_mm) = (nu * nu, nu * mimu, mimu * mimu);
        let periodic = boundary == Boundary::Periodic;
        let neighbour = |x: usize, d: isize| -> Option<usize> {
            let y = x as isize + d;
            if (0..l as isize).contains(&y) {
                Some(y as usize)
            } else if periodic {
                Some(y.rem_euclid(l as isize) as usize)
            } else {
                None
            }
        };
        let src = &self.amps;
        let at = |x1: Option<usize>, x2: Option<usize>, a: usize| -> C64 {
            match (x1, x2) {
                (Some(x1), Some(x2)) => src[(x1 * l + x2) * 4 + a],
                _ => C64::from(0.0),
            }
        };
        let mut out = vec![C64::from(0.0); src.len()];
        out.par_chunks_mut(4 * l).enumerate().for_each(|(x1, row)| {
            // ↑ hops in from x-1, ↓ from x+1; the mass term flips the spin in place
            let hop1 = [neighbour(x1, -1), neighbour(x1, 1)];
            for x2 in 0..l {
                let hop2 = [neighbour(x2, -1), neighbour(x2, 1)];
                for a1 in 0..2 {
                    for a2 in 0..2 {
                        let hh = at(hop1[a1], hop2[a2], 2 * a1 + a2);
                        let hm = at(hop1[a1], Some(x2), 2 * a1 + (1 - a2));
                        let mh = at(Some(x1), hop2[a2], 2 * (1 - a1) + a2);
                        let mm = at(Some(x1), Some(x2), 2 * (1 - a1) + (1 - a2));
                        row[4 * x2 + 2 * a1 + a2] = (c_hh * hh + c_mm * mm) + (c_hm * hm + c_hm * mh);
                    }
                }
            }
        });
        Ok(GridState { size: l, amps: out })
    }

    /// One interacting step `U₂ = (W ⊗ W) V`.
    pub fn step(&self, params: &WalkParams, boundary: Boundary) -> Result<GridState> {
        let mut s = self.clone();
        s.apply_interaction(params.chi());
        s.apply_walk(params, boundary)
    }
}

/// Projection onto the fermionic sector, `(ψ - Xψ)/2`, optionally renormalized.
pub fn antisymmetrize(state: &GridState, renormalize: bool) -> Result<GridState> {
    let x = state.exchange();
    let mut out = state.clone();
    for (a, b) in out.amps.iter_mut().zip(&x.amps) {
        *a = (*a - b) * 0.5;
    }
    let n = out.norm();
    if n <= 1e-14 * state.norm().max(f64::MIN_POSITIVE) {
        return Err(Error::ZeroAfterProjection);
    }
    if renormalize {
        out.normalize();
    }
    Ok(out)
}

/// `φ(y, w)` on an `M × M` torus, `y, w ∈ 0..M`, `M` even.
#[derive(Debug, Clone, PartialEq)]
pub struct CentreOfMassState {
    pub size: usize,
    pub amps: Vec<Vec4C>,
}

impl CentreOfMassState {
    pub fn zeros(size: usize) -> Result<Self> {
        if size == 0 || !size.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!("centre-of-mass torus size must be even, got {size}")));
        }
        Ok(CentreOfMassState {
            size,
            amps: vec![Vec4C::zeros(); size * size],
        })
    }

    pub fn pseudo_random(size: usize, seed: u64) -> Result<Self> {
        let mut st = Self::zeros(size)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for v in &mut st.amps {
            *v = Vec4C::from_fn(|_, _| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5));
        }
        Ok(st)
    }

    fn idx(&self, y: i64, w: i64) -> usize {
        let m = self.size as i64;
        (y.rem_euclid(m) * m + w.rem_euclid(m)) as usize
    }

    pub fn get(&self, y: i64, w: i64) -> Vec4C {
        self.amps[self.idx(y, w)]
    }

    pub fn set(&mut self, y: i64, w: i64, v: Vec4C) {
        let i = self.idx(y, w);
        self.amps[i] = v;
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|v| v.norm_squared()).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &CentreOfMassState) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| crate::numeric::max_abs(&(a - b)))
            .fold(0.0, f64::max)
    }

    /// Embeds a grid state: `(x₁, x₂) ↦ (y, w) = (x₁ - x₂, x₁ + x₂) mod M`. Needs `M ≥ 2L`.
    pub fn from_grid(grid: &GridState, size: usize) -> Result<Self> {
        if size < 2 * grid.size {
            return Err(Error::InvalidParameter(format!(
                "torus size {size} too small for grid {}",
                grid.size
            )));
        }
        let mut st = Self::zeros(size)?;
        for x1 in 0..grid.size {
            for x2 in 0..grid.size {
                let (a, b) = (x1 as i64, x2 as i64);
                st.set(a - b, a + b, grid.get(x1, x2));
            }
        }
        Ok(st)
    }

    /// Inverse of [`CentreOfMassState::from_grid`] on the embedded points.
    pub fn to_grid(&self, grid_size: usize) -> GridState {
        let mut g = GridState::zeros(grid_size);
        for x1 in 0..grid_size {
            for x2 in 0..grid_size {
                let (a, b) = (x1 as i64, x2 as i64);
                g.set(x1, x2, self.get(a - b, a + b));
            }
        }
        g
    }

    /// Free step in centre-of-mass coordinates.
    pub fn free_step(&self, params: &WalkParams) -> Self {
        let (mu, nu) = (params.mu(), params.nu());
        let nu2 = C64::from(nu * nu);
        let mu2 = C64::from(mu * mu);
        let h = -I * (mu * nu);
        let m = self.size as i64;
        let mut out = self.clone();
        for y in 0..m {
            for w in 0..m {
                // (T_y^a T_w^b φ)(y, w) = φ(y - a, w - b)
                let f = |a: i64, b: i64| self.get(y - a, w - b);
                let v = Vec4C::new(
                    nu2 * f(0, 2)[0] + h * f(1, 1)[1] + h * f(-1, 1)[2] - mu2 * f(0, 0)[3],
                    h * f(1, 1)[0] + nu2 * f(2, 0)[1] - mu2 * f(0, 0)[2] + h * f(1, -1)[3],
                    h * f(-1, 1)[0] - mu2 * f(0, 0)[1] + nu2 * f(-2, 0)[2] + h * f(-1, -1)[3],
                    -mu2 * f(0, 0)[0] + h * f(1, -1)[1] + h * f(-1, -1)[2] + nu2 * f(0, -2)[3],
                );
                out.set(y, w, v);
            }
        }
        out
    }

    /// Interaction: phase `e^{iχ}` on components 2,3 at `y = 0`.
    pub fn interaction(&self, chi: f64) -> Self {
        let ph = C64::from_polar(1.0, chi);
        let mut out = self.clone();
        for w in 0..self.size as i64 {
            let mut v = out.get(0, w);
            v[1] *= ph;
            v[2] *= ph;
            out.set(0, w, v);
        }
        out
    }

    pub fn step(&self, params: &WalkParams) -> Self {
        self.interaction(params.chi()).free_step(params)
    }
}

/// Projector C onto physical points `y ≡ w (mod 2)`.
pub fn projector_c(state: &CentreOfMassState) -> CentreOfMassState {
    let mut out = state.clone();
    let m = state.size as i64;
    for y in 0..m {
        for w in 0..m {
            if (y - w).rem_euclid(2) != 0 {
                out.set(y, w, Vec4C::zeros());
            }
        }
    }
    out
}
