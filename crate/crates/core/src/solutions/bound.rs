use std::f64::consts::PI;

use super::{ansatz_solution, EigenSolution, Profile, SolutionKind};
use crate::error::{Error, Result};
use crate::numeric::{reduce_to_zone, ComplexMomentum, Sign, WalkParams, C64, I};
use crate::single::g_pair;
use crate::two_particle::{omega_sr, two_eigenvector_raw};

/// Largest `|Im k|` searched.
pub const KAPPA_MAX: f64 = 20.0;
/// Points of the logarithmic scan grid on each line.
pub const SCAN_POINTS: usize = 4001;
/// Smallest `|Im k|` on the scan grid.
pub const KAPPA_MIN: f64 = 1e-10;
/// Tolerance for `e^{iχ} = ±1` and `e^{iχ} = e^{±2ip}` detection.
pub const CONDITION_TOL: f64 = 1e-9;

/// The four lines `k = k_R + iκ` on which bound-state roots are sought.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GammaLine {
    Zero,
    HalfPi,
    Pi,
    MinusHalfPi,
}

impl GammaLine {
    pub const ALL: [GammaLine; 4] = [GammaLine::Zero, GammaLine::HalfPi, GammaLine::Pi, GammaLine::MinusHalfPi];

    pub fn real_part(self) -> f64 {
        match self {
            GammaLine::Zero => 0.0,
            GammaLine::HalfPi => PI / 2.0,
            GammaLine::Pi => PI,
            GammaLine::MinusHalfPi => -PI / 2.0,
        }
    }

    /// Branch `r` of `v_k^{+r}` whose transmission coefficient vanishes on this line.
    pub fn branch(self) -> Sign {
        match self {
            GammaLine::Zero | GammaLine::Pi => Sign::Plus,
            GammaLine::HalfPi | GammaLine::MinusHalfPi => Sign::Minus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundRoot {
    pub k: ComplexMomentum,
    pub branch: Sign,
    pub line: GammaLine,
    /// `|c + e^{-iχ} b| / (|b| + |c|)` at the root.
    pub residual: f64,
    pub scanned: usize,
}

/// Real indicator whose zeros on `line` are the roots of the transmission numerator.
///
/// With `s = sin ω(q) + ν sin q`, `q = p + k`, the numerator vanishes on the
/// lines `0, π` when `Re(e^{iχ/2} s) = 0` and on `±π/2` when `Im(e^{iχ/2} s) = 0`.
pub fn bound_indicator(p: f64, kappa: f64, line: GammaLine, params: &WalkParams) -> f64 {
    let q = C64::new(p + line.real_part(), kappa);
    let s = I * g_pair(q, params).0;
    let z = C64::from_polar(1.0, params.chi() / 2.0) * s / s.norm();
    match line.branch() {
        Sign::Plus => z.re,
        Sign::Minus => z.im,
    }
}

fn numerator_residual(p: f64, k: C64, branch: Sign, params: &WalkParams) -> f64 {
    let v = two_eigenvector_raw(p, k, Sign::Plus, branch, params);
    let (b, c) = (v[1], v[2]);
    (c + C64::from_polar(1.0, -params.chi()) * b).norm() / (b.norm() + c.norm())
}

fn scan_grid() -> Vec<f64> {
    let (lo, hi) = (KAPPA_MIN.log10(), KAPPA_MAX.log10());
    let n = SCAN_POINTS;
    // ascending in κ: from -KAPPA_MAX up to -KAPPA_MIN
    (0..n)
        .map(|i| -(10f64).powf(hi - (hi - lo) * i as f64 / (n - 1) as f64))
        .collect()
}

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (flo > 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// All verified roots on the four lines, without any precondition checks.
pub fn bound_state_roots(p: f64, params: &WalkParams) -> Vec<BoundRoot> {
    let grid = scan_grid();
    let mut out = Vec::new();
    for line in GammaLine::ALL {
        let f = |x: f64| bound_indicator(p, x, line, params);
        let vals: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
        for i in 0..grid.len() - 1 {
            let (a, b) = (vals[i], vals[i + 1]);
            if !(a.is_finite() && b.is_finite()) {
                continue;
            }
            let kappa = if a == 0.0 {
                grid[i]
            } else if (a > 0.0) != (b > 0.0) && b != 0.0 {
                bisect(f, grid[i], grid[i + 1])
            } else {
                continue;
            };
            let k = C64::new(line.real_part(), kappa);
            let residual = numerator_residual(p, k, line.branch(), params);
            // sign flips across a branch jump of the indicator are not roots
            if residual <= 1e-8 {
                out.push(BoundRoot {
                    k: ComplexMomentum::from(k),
                    branch: line.branch(),
                    line,
                    residual,
                    scanned: grid.len() * GammaLine::ALL.len(),
                });
            }
        }
    }
    out
}

fn check_conditions(p: f64, params: &WalkParams) -> Result<()> {
    if let Some(sign) = params.interaction_is_trivial(CONDITION_TOL) {
        return Err(Error::TrivialInteraction(sign));
    }
    let e = C64::from_polar(1.0, params.chi());
    for s in [1.0, -1.0] {
        if (e - C64::from_polar(1.0, 2.0 * s * p)).norm() < CONDITION_TOL {
            return Err(Error::LocalizedCondition { chi: params.chi(), p });
        }
    }
    Ok(())
}

/// The unique bound-state relative momentum `k̃` (with `Im k̃ < 0`) and its branch.
pub fn bound_state_momentum(p: f64, params: &WalkParams) -> Result<BoundRoot> {
    check_conditions(p, params)?;
    let roots = bound_state_roots(p, params);
    match roots.len() {
        1 => Ok(roots[0]),
        0 => Err(Error::NoBoundRoot {
            scanned: SCAN_POINTS * GammaLine::ALL.len(),
            detail: format!(
                "p = {p}, χ = {}, κ ∈ [-{KAPPA_MAX}, -{KAPPA_MIN:e}] on all four lines",
                params.chi()
            ),
        }),
        n => Err(Error::NoBoundRoot {
            scanned: SCAN_POINTS * GammaLine::ALL.len(),
            detail: format!("{n} candidate roots found, expected exactly one: {roots:?}"),
        }),
    }
}

/// Normalized bound-state eigenvector, gauge fixed so that `ψ³(0) > 0`.
pub fn bound_state(p: f64, params: &WalkParams) -> Result<EigenSolution> {
    let root = bound_state_momentum(p, params)?;
    Ok(bound_state_from_root(p, &root, params))
}

pub(crate) fn bound_state_from_root(p: f64, root: &BoundRoot, params: &WalkParams) -> EigenSolution {
    let k = root.k.as_c64();
    let v = two_eigenvector_raw(p, k, Sign::Plus, root.branch, params);
    let omega = reduce_to_zone(omega_sr(p, k, Sign::Plus, root.branch, params).re);
    let mut sol = ansatz_solution(SolutionKind::Bound, p, k, root.branch, params, v, C64::from(0.0), omega);
    let kappa = k.im;
    let (a, b, c, d) = (v[0], v[1], v[2], v[3]);
    if let Profile::Ansatz { xi, scale, .. } = &mut sol.profile {
        let denom = -(4.0 * kappa).exp_m1();
        let odd = (a.norm_sqr() + d.norm_sqr()) * (2.0 * kappa).exp();
        let even = (b.norm_sqr() + c.norm_sqr()) * (4.0 * kappa).exp();
        let n2 = 2.0 * (odd + even) / denom + 2.0 * xi.norm_sqr();
        let gauge = (-*xi).conj() / xi.norm();
        *scale = gauge / n2.sqrt();
    }
    sol
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::recurrence_residual;
    use crate::solutions::continuous_bands;
    use crate::solutions::transmission;

    fn pr(m: f64, chi: f64) -> WalkParams {
        WalkParams::new(m, chi).unwrap()
    }

    #[test]
    fn known_roots() {
        let cases = [
            (0.3, 2.0 * PI / 3.0, GammaLine::Pi, -0.42535, -1.21513),
            (0.9, 3.0 * PI / 7.0, GammaLine::MinusHalfPi, -0.96611, -1.63614),
            (1.2, -3.0 * PI / 7.0, GammaLine::HalfPi, -0.5862, 1.97341),
            (0.5, -2.0 * PI / 3.0, GammaLine::Zero, -0.53394, 1.40423),
        ];
        for (p, chi, line, kappa, omega) in cases {
            let params = pr(0.6, chi);
            let root = bound_state_momentum(p, &params).unwrap();
            assert_eq!(root.line, line);
            assert!((root.k.im - kappa).abs() < 1e-4, "{root:?}");
            let t = transmission(p, root.k, root.branch, &params).unwrap();
            assert!(t.value.norm() <= 1e-10);
            let sol = bound_state(p, &params).unwrap();
            assert!((sol.omega - omega).abs() < 1e-4, "{}", sol.omega);
        }
    }

    #[test]
    fn bound_state_is_normalized_eigenvector() {
        let params = pr(0.6, 0.2 * PI);
        let sol = bound_state(0.035 * PI, &params).unwrap();
        let st = sol.sample_window(128);
        assert!((st.norm() - 1.0).abs() < 1e-10);
        let tail: f64 = (129..400).map(|z| sol.amplitude(z).norm_squared() + sol.amplitude(-z).norm_squared()).sum();
        assert!(tail < 1e-10);
        assert!(recurrence_residual(&sol, -40, 40) <= 1e-10);
        assert!(sol.amplitude(0)[2].im.abs() < 1e-15 && sol.amplitude(0)[2].re > 0.0);
        let bands = continuous_bands(sol.p.value(), &params);
        assert!(bands.in_gap(sol.omega));
        assert!(st.antisymmetry_defect(crate::numeric::Boundary::Open) < 1e-15);
    }

    #[test]
    fn decay_rate_matches_k() {
        let params = pr(0.7, 1.0);
        let sol = bound_state(0.6, &params).unwrap();
        let rate = sol.decay_rate();
        let z0 = 3;
        let z1 = 9;
        let n = |z: i64| sol.amplitude(z).norm_squared();
        let fitted = (n(z0) / n(z1)).ln() / (z1 - z0) as f64;
        assert!((fitted - rate).abs() / rate < 1e-10);
    }

    #[test]
    fn preconditions() {
        assert!(matches!(bound_state_momentum(0.3, &pr(0.6, 0.0)), Err(Error::TrivialInteraction(1))));
        assert!(matches!(bound_state_momentum(0.3, &pr(0.6, PI)), Err(Error::TrivialInteraction(-1))));
        assert!(matches!(
            bound_state_momentum(0.3, &pr(0.6, 0.6)),
            Err(Error::LocalizedCondition { .. })
        ));
        assert!(matches!(
            bound_state_momentum(0.3, &pr(0.6, -0.6)),
            Err(Error::LocalizedCondition { .. })
        ));
    }

    #[test]
    fn uniqueness_on_random_pairs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let p = rng.random_range(0.01..PI / 2.0 - 0.01);
            let chi = rng.random_range(-PI + 0.01..PI - 0.01);
            let params = pr(0.6, chi);
            if (chi - 2.0 * p).abs() < 1e-3 || (chi + 2.0 * p).abs() < 1e-3 {
                continue;
            }
            let roots = bound_state_roots(p, &params);
            assert_eq!(roots.len(), 1, "p={p} chi={chi}: {roots:?}");
        }
    }
}
