//! Brute-force checks: the fixed-`p` step as an explicit matrix on a ring,
//! full diagonalization, and recurrence residuals of analytic solutions.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::numeric::{unitarity_defect_dyn, Momentum, Vec4C, WalkParams, C64};
use crate::solutions::{BandEdges, EigenSolution};
use crate::two_particle::{FixedPState, FixedPWalk};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sector {
    /// All `4N` P-layout amplitudes.
    Full,
    /// Fermionic states (`Jψ = ψ`), dimension `2N`.
    Antisymmetric,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseWalkMatrix {
    pub p: f64,
    pub chi: f64,
    pub m: f64,
    /// Number of ring sites in `z`.
    pub n: usize,
    pub sector: Sector,
    pub matrix: DMatrix<C64>,
}

/// Smallest ring accepted by [`build_dense`].
pub const MIN_RING: usize = 16;
/// Largest ring accepted by [`full_spectrum`].
pub const MAX_RING: usize = 512;

fn ring_z_min(n: usize) -> i64 {
    -((n / 2) as i64)
}

/// `U₂(χ,p) = W₂(p) V(χ)` on the P-layout ring `z ∈ [-N/2, N/2)`; index `4i + c`.
pub fn build_dense(p: f64, params: &WalkParams, n: usize) -> Result<DenseWalkMatrix> {
    if n < MIN_RING || !n.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!("ring size must be even and ≥ {MIN_RING}, got {n}")));
    }
    let walk = FixedPWalk::new(p, params);
    let [bm, b0, bp] = walk.blocks();
    let dim = 4 * n;
    let mut w = DMatrix::<C64>::zeros(dim, dim);
    for i in 0..n {
        let prev = (i + n - 1) % n;
        let next = (i + 1) % n;
        for r in 0..4 {
            for c in 0..4 {
                w[(4 * i + r, 4 * prev + c)] += bm[(r, c)];
                w[(4 * i + r, 4 * i + c)] += b0[(r, c)];
                w[(4 * i + r, 4 * next + c)] += bp[(r, c)];
            }
        }
    }
    // V multiplies the columns of ψ²(0), ψ³(0)
    let i0 = (-ring_z_min(n)) as usize;
    for c in [1, 2] {
        let mut col = w.column_mut(4 * i0 + c);
        col *= walk.phase;
    }
    Ok(DenseWalkMatrix {
        p,
        chi: params.chi(),
        m: params.m(),
        n,
        sector: Sector::Full,
        matrix: w,
    })
}

/// Pairs `(i, j)` of full-space indices with `J e_i = -e_j`; the antisymmetric
/// basis vectors are `(e_i - e_j)/√2`.
pub fn antisymmetric_pairs(n: usize) -> Vec<(usize, usize)> {
    let z_min = ring_z_min(n);
    let idx = |z: i64, c: usize| -> usize { 4 * ((z - z_min).rem_euclid(n as i64) as usize) + c };
    let mut pairs = Vec::with_capacity(2 * n);
    for i in 0..n {
        let z = z_min + i as i64;
        for c in 0..4 {
            let partner = match c {
                0 | 3 => idx(-z - 1, c),
                1 => idx(-z, 2),
                _ => idx(-z, 1),
            };
            let me = 4 * i + c;
            if me < partner {
                pairs.push((me, partner));
            }
        }
    }
    pairs
}

impl DenseWalkMatrix {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn unitarity_defect(&self) -> f64 {
        unitarity_defect_dyn(&self.matrix)
    }

    /// Restriction `Bᴴ U B` to the fermionic sector.
    pub fn antisymmetric(&self) -> Result<DenseWalkMatrix> {
        if self.sector != Sector::Full {
            return Err(Error::InvalidParameter("matrix is already restricted".into()));
        }
        let pairs = antisymmetric_pairs(self.n);
        let d = pairs.len();
        let full = self.matrix.nrows();
        let h = C64::from(std::f64::consts::FRAC_1_SQRT_2);
        let mut ub = DMatrix::<C64>::zeros(full, d);
        for (b, &(i, j)) in pairs.iter().enumerate() {
            let col = (self.matrix.column(i) - self.matrix.column(j)) * h;
            ub.set_column(b, &col);
        }
        let mut out = DMatrix::<C64>::zeros(d, d);
        for (a, &(i, j)) in pairs.iter().enumerate() {
            let row = (ub.row(i) - ub.row(j)) * h;
            out.set_row(a, &row);
        }
        Ok(DenseWalkMatrix {
            sector: Sector::Antisymmetric,
            matrix: out,
            ..self.clone()
        })
    }

    /// Maps a sector vector back to a P-layout ring state.
    pub fn lift(&self, v: &DVector<C64>) -> FixedPState {
        let z_min = ring_z_min(self.n);
        let full = match self.sector {
            Sector::Full => v.clone(),
            Sector::Antisymmetric => {
                let mut f = DVector::<C64>::zeros(4 * self.n);
                let h = C64::from(std::f64::consts::FRAC_1_SQRT_2);
                for (b, &(i, j)) in antisymmetric_pairs(self.n).iter().enumerate() {
                    f[i] += v[b] * h;
                    f[j] -= v[b] * h;
                }
                f
            }
        };
        FixedPState::from_fn(Momentum::new(self.p), z_min, self.n, |z| {
            let i = (z - z_min) as usize;
            Vec4C::new(full[4 * i], full[4 * i + 1], full[4 * i + 2], full[4 * i + 3])
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: C64,
    pub vector: DVector<C64>,
    pub residual: f64,
}

impl EigenPair {
    /// `ω` with `λ = e^{-iω}`, in `(-π, π]`.
    pub fn omega(&self) -> f64 {
        -self.value.arg()
    }
}

/// Residual tolerance for dense eigenpairs.
pub const SPECTRUM_RESIDUAL: f64 = 1e-9;

/// All eigenpairs via the complex Schur form (diagonal for a unitary matrix).
pub fn full_spectrum(mat: &DenseWalkMatrix) -> Result<Vec<EigenPair>> {
    if mat.n > MAX_RING {
        return Err(Error::InvalidParameter(format!("ring size {} exceeds the dense budget {MAX_RING}", mat.n)));
    }
    let schur = nalgebra::Schur::try_new(mat.matrix.clone(), 1e-15, 10_000)
        .ok_or_else(|| Error::Diagonalization("Schur iteration did not converge".into()))?;
    let (q, t) = schur.unpack();
    let mut out = Vec::with_capacity(t.nrows());
    let mut worst: f64 = 0.0;
    for i in 0..t.nrows() {
        let value = t[(i, i)];
        let vector = q.column(i).into_owned();
        let residual = (&mat.matrix * &vector - &vector * value).norm();
        worst = worst.max(residual);
        out.push(EigenPair { value, vector, residual });
    }
    if worst > SPECTRUM_RESIDUAL {
        let raw: Vec<f64> = out.iter().map(|e| e.residual).filter(|r| *r > SPECTRUM_RESIDUAL).collect();
        return Err(Error::Diagonalization(format!(
            "max residual {worst:e} above {SPECTRUM_RESIDUAL:e}; offending residuals: {raw:?}"
        )));
    }
    Ok(out)
}

/// Eigenpairs whose quasi-energy lies inside a spectral gap by more than `margin`.
pub fn gap_eigenpairs<'a>(spectrum: &'a [EigenPair], bands: &BandEdges, margin: f64) -> Vec<&'a EigenPair> {
    spectrum
        .iter()
        .filter(|e| bands.gap_margin(e.omega()) > margin)
        .collect()
}

/// Number of eigenvalues within `tol` of `target`.
pub fn multiplicity(spectrum: &[EigenPair], target: C64, tol: f64) -> usize {
    spectrum.iter().filter(|e| (e.value - target).norm() < tol).count()
}

/// Largest distance in a greedy nearest-neighbour matching of two equal-size
/// point sets on the unit circle; `f64::INFINITY` if the sizes differ.
pub fn set_distance(a: &[C64], b: &[C64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let mut best = (f64::INFINITY, usize::MAX);
        for (j, y) in b.iter().enumerate() {
            if !used[j] {
                let d = (x - y).norm();
                if d < best.0 {
                    best = (d, j);
                }
            }
        }
        used[best.1] = true;
        worst = worst.max(best.0);
    }
    worst
}

/// Free spectrum on the P-layout ring: `e^{-iω_{sr}(p, πj/N)}`, `j = 0..N`, all sign pairs.
pub fn free_ring_spectrum(p: f64, params: &WalkParams, n: usize) -> Vec<C64> {
    use crate::numeric::Sign;
    let mut out = Vec::with_capacity(4 * n);
    for j in 0..n {
        let k = std::f64::consts::PI * j as f64 / n as f64;
        for s in Sign::BOTH {
            for r in Sign::BOTH {
                let w = crate::two_particle::omega_sr(p, k, s, r, params);
                out.push((-crate::numeric::I * w).exp());
            }
        }
    }
    out
}

/// `max_z |(U₂ψ)(z) - λ ψ(z)|` over `z ∈ [z_lo, z_hi]`, with the neighbours
/// of each site taken from the analytic amplitude.
pub fn recurrence_residual(sol: &EigenSolution, z_lo: i64, z_hi: i64) -> f64 {
    let walk = FixedPWalk::new(sol.p.value(), &sol.params);
    let lam = sol.eigenvalue();
    let mut worst: f64 = 0.0;
    for z in z_lo..=z_hi {
        let mut nb = [sol.amplitude(z - 1), sol.amplitude(z), sol.amplitude(z + 1)];
        for (off, v) in nb.iter_mut().enumerate() {
            if z - 1 + off as i64 == 0 {
                v[1] *= walk.phase;
                v[2] *= walk.phase;
            }
        }
        let lhs = walk.apply_local(&nb[0], &nb[1], &nb[2]);
        let rhs = sol.amplitude(z) * lam;
        worst = worst.max(crate::numeric::max_abs(&(lhs - rhs)));
    }
    worst
}

/// As [`recurrence_residual`], divided by the largest amplitude in the window.
pub fn relative_recurrence_residual(sol: &EigenSolution, z_lo: i64, z_hi: i64) -> f64 {
    let scale = (z_lo..=z_hi)
        .map(|z| crate::numeric::max_abs(&sol.amplitude(z)))
        .fold(0.0, f64::max);
    recurrence_residual(sol, z_lo, z_hi) / scale.max(f64::MIN_POSITIVE)
}

/// `max_z |(U₂ψ)(z) - λψ(z)|` for a sampled state on a ring or open window.
pub fn state_residual(
    state: &FixedPState,
    params: &WalkParams,
    lambda: C64,
    boundary: crate::numeric::Boundary,
) -> Result<f64> {
    let out = crate::two_particle::u2_step(state, params, boundary)?;
    let mut expect = state.clone();
    expect.scale(lambda);
    Ok(out.max_abs_diff(&expect))
}
