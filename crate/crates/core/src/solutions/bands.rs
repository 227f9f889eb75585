use std::f64::consts::PI;

use rayon::prelude::*;

use super::{bound_state, localized_state};
use crate::error::Error;
use crate::numeric::{principal_arccos, reduce_to_zone, Sign, WalkParams, C64};
use crate::single::dispersion;
use crate::two_particle::omega_sr;

/// Edges of the continuous spectrum at fixed `p`, as quasi-energies `ω`.
///
/// The `(±,±)` band covers `2ω(p) ≤ |ω| ≤ π` and the `(±,∓)` band covers
/// `|ω| ≤ π - 2 Arccos(ν sin p)`; the gaps lie in between.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandEdges {
    pub p: f64,
    /// `2ω(p)`
    pub outer: f64,
    /// `π - 2 Arccos(ν sin p)`
    pub inner: f64,
}

impl BandEdges {
    /// `[2ω(p), -2ω(p), π - 2Arccos(ν sin p), -(π - 2Arccos(ν sin p))]`.
    pub fn edges(&self) -> [f64; 4] {
        [self.outer, -self.outer, self.inner, -self.inner]
    }

    /// The two open gap intervals `(inner, outer)` and `(-outer, -inner)`.
    pub fn gaps(&self) -> [(f64, f64); 2] {
        [(self.inner, self.outer), (-self.outer, -self.inner)]
    }

    /// Signed distance of `|ω|` (reduced to `(-π, π]`) from the bands: positive
    /// inside a gap, negative or zero inside a band.
    pub fn gap_margin(&self, omega: f64) -> f64 {
        let w = reduce_to_zone(omega).abs();
        (w - self.inner).min(self.outer - w)
    }

    pub fn in_gap(&self, omega: f64) -> bool {
        self.gap_margin(omega) > 0.0
    }
}

pub fn continuous_bands(p: f64, params: &WalkParams) -> BandEdges {
    let outer = 2.0 * dispersion(p, params).re;
    let inner = PI - 2.0 * principal_arccos(C64::from(params.nu() * p.sin())).re;
    BandEdges { p, outer, inner }
}

/// One row of the band table: edges plus the discrete eigenvalue per coupling.
#[derive(Debug, Clone, PartialEq)]
pub struct BandRow {
    pub p: f64,
    pub edges: [f64; 4],
    pub discrete: Vec<Option<f64>>,
}

/// Band edges on the midpoint grid `p_i = p_min + (i + 1/2)(p_max - p_min)/steps`
/// and, for each coupling in `chis`, the bound-state (or localized-state) quasi-energy.
pub fn band_table(m: f64, chis: &[f64], p_min: f64, p_max: f64, steps: usize) -> crate::Result<Vec<BandRow>> {
    let free = WalkParams::free(m)?;
    if steps == 0 || p_max.is_nan() || p_min.is_nan() || p_max <= p_min {
        return Err(Error::InvalidParameter(format!(
            "need steps ≥ 1 and p_min < p_max, got {steps} steps on [{p_min}, {p_max}]"
        )));
    }
    let rows = (0..steps)
        .into_par_iter()
        .map(|i| {
            let p = p_min + (i as f64 + 0.5) * (p_max - p_min) / steps as f64;
            let edges = continuous_bands(p, &free).edges();
            let discrete = chis
                .iter()
                .map(|&chi| {
                    let params = free.with_chi(chi);
                    match bound_state(p, &params) {
                        Ok(sol) => Some(sol.omega),
                        Err(Error::LocalizedCondition { .. }) => localized_state(p, &params).ok().map(|s| s.omega),
                        Err(_) => None,
                    }
                })
                .collect();
            BandRow { p, edges, discrete }
        })
        .collect();
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegenerateSolution {
    pub s: Sign,
    pub r: Sign,
    pub k: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DegeneracyReport {
    pub p: f64,
    pub omega: f64,
    pub solutions: Vec<DegenerateSolution>,
    /// Set when the count differs from the generic four (band edge or outside the spectrum).
    pub warning: Option<String>,
}

/// Grid resolution of the `k` scan in [`degeneracy_scan`].
pub const DEGENERACY_GRID: usize = 20000;

/// All real `k ∈ (-π, π]` and sign pairs with `e^{-iω_{sr}(p,k)} = e^{-iω}`.
pub fn degeneracy_scan(p: f64, omega: f64, params: &WalkParams) -> DegeneracyReport {
    let n = DEGENERACY_GRID;
    let mut solutions = Vec::new();
    for s in Sign::BOTH {
        for r in Sign::BOTH {
            let f = |k: f64| reduce_to_zone(omega_sr(p, k, s, r, params).re - omega);
            let ks: Vec<f64> = (0..=n).map(|j| -PI + 2.0 * PI * j as f64 / n as f64).collect();
            let vals: Vec<f64> = ks.iter().map(|&k| f(k)).collect();
            let mut found: Vec<f64> = Vec::new();
            for j in 0..n {
                let (a, b) = (vals[j], vals[j + 1]);
                let root = if a == 0.0 {
                    Some(ks[j])
                } else if (a > 0.0) != (b > 0.0) && b != 0.0 && (a - b).abs() < PI {
                    let (mut lo, mut hi, mut flo) = (ks[j], ks[j + 1], a);
                    for _ in 0..100 {
                        let mid = 0.5 * (lo + hi);
                        let fm = f(mid);
                        if (fm > 0.0) == (flo > 0.0) {
                            lo = mid;
                            flo = fm;
                        } else {
                            hi = mid;
                        }
                    }
                    Some(0.5 * (lo + hi))
                } else {
                    None
                };
                if let Some(k) = root {
                    let k = if k <= -PI + 1e-12 { PI } else { k };
                    if !found.iter().any(|&x| (reduce_to_zone(x - k)).abs() < 1e-9) {
                        found.push(k);
                    }
                }
            }
            found.sort_by(|a, b| a.total_cmp(b));
            solutions.extend(found.into_iter().map(|k| DegenerateSolution { s, r, k }));
        }
    }
    let warning = if solutions.len() == 4 {
        None
    } else {
        Some(format!(
            "{} solutions instead of 4: ω = {omega} is at a band edge or outside the continuous spectrum",
            solutions.len()
        ))
    };
    DegeneracyReport {
        p,
        omega,
        solutions,
        warning,
    }
}
