//! Invariant suites across all modules, reported as a pass/fail table.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::numeric::{max_abs, unitarity_defect, Boundary, Sign, Tolerances, WalkParams, C64};
use crate::oracle::{
    build_dense, free_ring_spectrum, full_spectrum, gap_eigenpairs, multiplicity, recurrence_residual, set_distance,
    state_residual,
};
use crate::single::{eigenvector, walk_matrix};
use crate::simulator::{self, InitialState, SimulationConfig};
use crate::solutions::{
    bound_state, continuous_bands, degeneracy_scan, localized_state, scattering_state, stationary_solutions,
    transmission,
};
use crate::two_particle::{antisymmetrize, symmetry_checks, two_eigenvector, w2_momentum, GridState};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    /// Small oracles (`N ≤ 64`), well under a minute.
    Quick,
    /// Acceptance-size oracles (`N ≤ 256`).
    Full,
}

impl std::str::FromStr for Level {
    type Err = crate::Error;
    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "quick" => Ok(Level::Quick),
            "full" => Ok(Level::Full),
            _ => Err(crate::Error::InvalidParameter(format!("level must be quick or full, got {s:?}"))),
        }
    }
}

impl std::fmt::Display for Level {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Level::Quick => "quick",
            Level::Full => "full",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    /// Worst observed value of the checked quantity.
    pub value: f64,
    pub threshold: f64,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub level: Level,
    pub tolerances: Tolerances,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed).count()
    }

    pub fn table(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(4).max(5);
        let mut s = String::new();
        let _ = writeln!(s, "{:<width$}  {:<6}  {:>11}  {:>11}  {:>7}  detail", "check", "result", "value", "threshold", "time");
        for c in &self.checks {
            let _ = writeln!(
                s,
                "{:<width$}  {:<6}  {:>11.3e}  {:>11.3e}  {:>6.2}s  {}",
                c.name,
                if c.passed { "PASS" } else { "FAIL" },
                c.value,
                c.threshold,
                c.seconds,
                c.detail
            );
        }
        let _ = writeln!(s, "{} of {} checks passed", self.checks.len() - self.failures(), self.checks.len());
        s
    }
}

struct Outcome {
    value: f64,
    threshold: f64,
    passed: bool,
    detail: String,
}

impl Outcome {
    /// Passes when `value ≤ threshold`.
    fn at_most(value: f64, threshold: f64, detail: impl Into<String>) -> Self {
        Outcome {
            value,
            threshold,
            passed: value <= threshold,
            detail: detail.into(),
        }
    }

    fn flag(passed: bool, value: f64, threshold: f64, detail: impl Into<String>) -> Self {
        Outcome {
            value,
            threshold,
            passed,
            detail: detail.into(),
        }
    }

    fn error(e: impl std::fmt::Display) -> Self {
        Outcome {
            value: f64::NAN,
            threshold: f64::NAN,
            passed: false,
            detail: format!("error: {e}"),
        }
    }
}

fn timed(name: &str, f: impl FnOnce() -> Outcome) -> CheckResult {
    let t0 = Instant::now();
    let o = f();
    CheckResult {
        name: name.to_string(),
        passed: o.passed && !o.value.is_nan(),
        value: o.value,
        threshold: o.threshold,
        detail: o.detail,
        seconds: t0.elapsed().as_secs_f64(),
    }
}

fn grid_1d(n: usize) -> Vec<f64> {
    (0..n).map(|i| -PI + 2.0 * PI * (i as f64 + 0.5) / n as f64).collect()
}

/// Runs every suite at the given level.
pub fn run_suite(level: Level, tol: Tolerances) -> VerifyReport {
    let full = level == Level::Full;
    let recurrence_tol = 100.0 * tol.residual;
    let masses = [0.6, 0.7];
    let mut checks = Vec::new();

    checks.push(timed("unitarity: W(p), W2(p,k)", || {
        let n = if full { 50 } else { 20 };
        let mut worst: f64 = 0.0;
        for &m in &masses {
            let params = WalkParams::free(m).unwrap();
            for &p in &grid_1d(n) {
                worst = worst.max(unitarity_defect(&walk_matrix(p, &params)));
                for &k in &grid_1d(n) {
                    worst = worst.max(unitarity_defect(&w2_momentum(p, k, &params)));
                }
            }
        }
        Outcome::at_most(worst, tol.unitarity, format!("{n}x{n} grid, m in {masses:?}"))
    }));

    checks.push(timed("unitarity: dense U2(chi,p)", || {
        let n = if full { 128 } else { 32 };
        let params = WalkParams::new(0.7, 2.0 * PI / 3.0).unwrap();
        match build_dense(0.4, &params, n).and_then(|d| Ok((d.unitarity_defect(), d.antisymmetric()?.unitarity_defect()))) {
            Ok((a, b)) => Outcome::at_most(a.max(b), tol.unitarity, format!("N = {n}, full and antisymmetric sector")),
            Err(e) => Outcome::error(e),
        }
    }));

    checks.push(timed("eigenrelations: single and two-particle", || {
        let n = if full { 50 } else { 20 };
        let mut worst: f64 = 0.0;
        for &m in &masses {
            let params = WalkParams::free(m).unwrap();
            for &p in &grid_1d(n) {
                for s in Sign::BOTH {
                    let v = eigenvector(p, s, &params);
                    worst = worst.max(max_abs(&(walk_matrix(p, &params) * v.vec - v.vec * v.eigenvalue(&params))));
                }
                for &k in &grid_1d(n) {
                    let w = w2_momentum(p, k, &params);
                    for s in Sign::BOTH {
                        for r in Sign::BOTH {
                            let v = two_eigenvector(p, k, s, r, &params);
                            worst = worst.max(max_abs(&(w * v.vec - v.vec * v.eigenvalue(&params))));
                        }
                    }
                }
            }
        }
        Outcome::at_most(worst, tol.residual, format!("{n}x{n} (p,k) grid, all branches"))
    }));

    checks.push(timed("symmetry identities", || {
        let params = WalkParams::new(0.6, 1.0).unwrap();
        let worst = [0.1, 0.7, 1.9, -2.4].iter().map(|&p| symmetry_checks(p, &params).max()).fold(0.0, f64::max);
        Outcome::at_most(worst, tol.unitarity, "parity and shift by pi")
    }));

    checks.push(timed("transmission: |T| = 1, T(chi=0) = 1", || {
        let count = if full { 1000 } else { 200 };
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut worst: f64 = 0.0;
        let mut exact = true;
        for _ in 0..count {
            let p = rng.random_range(-PI..PI);
            let k = rng.random_range(-PI..PI);
            let chi = rng.random_range(-PI..PI);
            let m = rng.random_range(0.05..0.95);
            let params = WalkParams::new(m, chi).unwrap();
            for s in Sign::BOTH {
                match transmission(p, k, s, &params) {
                    Ok(t) => worst = worst.max((t.value.norm() - 1.0).abs()),
                    Err(e) => return Outcome::error(format!("p={p}, k={k}, chi={chi}: {e}")),
                }
                match transmission(p, k, s, &params.with_chi(0.0)) {
                    Ok(t) => exact &= t.value == C64::from(1.0),
                    Err(e) => return Outcome::error(e),
                }
            }
        }
        let mut o = Outcome::at_most(worst, 1e-13, format!("{count} random (p,k,chi), both signs"));
        if !exact {
            o.passed = false;
            o.detail.push_str("; T != 1 at chi = 0");
        }
        o
    }));

    checks.push(timed("scattering recurrence residual", || {
        let count = if full { 100 } else { 20 };
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut worst: f64 = 0.0;
        let mut done = 0;
        while done < count {
            let p = rng.random_range(-PI..PI);
            let k = rng.random_range(-PI..PI);
            let chi = rng.random_range(-PI..PI);
            let branch = if rng.random::<bool>() { Sign::Plus } else { Sign::Minus };
            let params = WalkParams::new(0.6, chi).unwrap();
            let Ok(sol) = scattering_state(p, k, branch, &params) else {
                continue;
            };
            worst = worst.max(recurrence_residual(&sol, -64, 64));
            done += 1;
        }
        Outcome::at_most(worst, recurrence_tol, format!("{count} tuples, z in [-64, 64]"))
    }));

    checks.push(timed("bound states: one root, inside the gap", || {
        let steps = if full { 100 } else { 20 };
        let chis = [2.0 * PI / 3.0, 3.0 * PI / 7.0, -3.0 * PI / 7.0, -2.0 * PI / 3.0];
        let results: Vec<Result<(f64, f64), String>> = (0..steps)
            .into_par_iter()
            .flat_map_iter(|i| {
                let p = (i as f64 + 0.5) * (PI / 2.0) / steps as f64;
                chis.iter().map(move |&chi| {
                    let params = WalkParams::new(0.7, chi).unwrap();
                    let sol = bound_state(p, &params).map_err(|e| format!("p={p}, chi={chi}: {e}"))?;
                    let margin = continuous_bands(p, &params).gap_margin(sol.omega);
                    Ok((recurrence_residual(&sol, -32, 32), margin))
                })
            })
            .collect();
        let mut worst: f64 = 0.0;
        let mut min_margin = f64::INFINITY;
        for r in results {
            match r {
                Ok((res, margin)) => {
                    worst = worst.max(res);
                    min_margin = min_margin.min(margin);
                }
                Err(e) => return Outcome::error(e),
            }
        }
        let mut o = Outcome::at_most(worst, recurrence_tol, format!("m = 0.7, 4 couplings x {steps} p; min gap margin {min_margin:.3e}"));
        o.passed &= min_margin > 0.0;
        o
    }));

    checks.push(timed("oracle: gap eigenvalue vs bound state", || {
        let n = if full { 256 } else { 64 };
        let chis = [2.0 * PI / 3.0, 3.0 * PI / 7.0, -3.0 * PI / 7.0, -2.0 * PI / 3.0];
        let p = 0.6;
        let mut worst: f64 = 0.0;
        for &chi in &chis {
            let params = WalkParams::new(0.7, chi).unwrap();
            let sol = match bound_state(p, &params) {
                Ok(s) => s,
                Err(e) => return Outcome::error(e),
            };
            let spec = match build_dense(p, &params, n).and_then(|d| d.antisymmetric()).and_then(|a| full_spectrum(&a).map(|s| (a, s))) {
                Ok(x) => x,
                Err(e) => return Outcome::error(e),
            };
            let (a, spec) = spec;
            let gaps = gap_eigenpairs(&spec, &continuous_bands(p, &params), 1e-3);
            if gaps.len() != 1 {
                return Outcome::flag(false, gaps.len() as f64, 1.0, format!("chi = {chi}: {} gap eigenvalues", gaps.len()));
            }
            let lifted = a.lift(&gaps[0].vector);
            let analytic = sol.sample(lifted.z_min, lifted.len());
            let overlap = analytic.inner(&lifted).norm() / (analytic.norm() * lifted.norm());
            worst = worst.max((gaps[0].value - sol.eigenvalue()).norm()).max(1.0 - overlap);
        }
        Outcome::at_most(worst, 1e-6, format!("N = {n}, p = {p}, eigenvalue and 1 - overlap"))
    }));

    checks.push(timed("oracle: free spectrum on the k grid", || {
        let n = if full { 64 } else { 32 };
        let params = WalkParams::free(0.6).unwrap();
        match build_dense(0.3, &params, n).and_then(|d| full_spectrum(&d)) {
            Ok(spec) => {
                let values: Vec<C64> = spec.iter().map(|e| e.value).collect();
                Outcome::at_most(set_distance(&values, &free_ring_spectrum(0.3, &params, n)), 1e-10, format!("N = {n}"))
            }
            Err(e) => Outcome::error(e),
        }
    }));

    checks.push(timed("localized states", || {
        let params = WalkParams::free(0.6).unwrap();
        let mut worst: f64 = 0.0;
        for i in 0..20 {
            let p = 0.05 + 1.4 * i as f64 / 19.0;
            for chi in [2.0 * p, -2.0 * p] {
                let pr = params.with_chi(chi);
                let sol = match localized_state(p, &pr) {
                    Ok(s) => s,
                    Err(e) => return Outcome::error(e),
                };
                let st = sol.sample_window(4);
                match state_residual(&st, &pr, sol.eigenvalue(), Boundary::Open) {
                    Ok(r) => worst = worst.max(r),
                    Err(e) => return Outcome::error(e),
                }
                let support = (-6..=6).filter(|&y| sol.relative_amplitude(y).norm() > 0.0).count();
                if support != 3 {
                    return Outcome::flag(false, support as f64, 3.0, format!("p = {p}: support {support}"));
                }
            }
        }
        Outcome::at_most(worst, 1e-13, "20 momenta, chi = +-2p")
    }));

    checks.push(timed("stationary states at p = 0", || {
        let m = 96usize;
        let mut worst: f64 = 0.0;
        for chi in [0.0, PI / 2.0, 2.0] {
            let params = WalkParams::new(0.6, chi).unwrap();
            for j in [5i64, 17, -31] {
                let k = 2.0 * PI * j as f64 / m as f64;
                let pair = match stationary_solutions(0.0, k, &params) {
                    Ok(p) => p,
                    Err(e) => return Outcome::error(e),
                };
                for sol in [&pair.dressed, &pair.complement] {
                    let mut rel = match sol.sample_relative(m) {
                        Ok(r) => r,
                        Err(e) => return Outcome::error(e),
                    };
                    let norm = rel.norm();
                    rel = rel.map_components(|v| v / C64::from(norm));
                    worst = worst.max(rel.step(&params).max_abs_diff(&rel));
                }
            }
        }
        let sizes: &[usize] = if full { &[32, 64, 128] } else { &[16, 32] };
        let params = WalkParams::new(0.6, 2.0).unwrap();
        let mut counts = Vec::new();
        for &n in sizes {
            match build_dense(0.0, &params, n).and_then(|d| d.antisymmetric()).and_then(|a| full_spectrum(&a)) {
                Ok(spec) => counts.push(multiplicity(&spec, C64::from(1.0), 1e-8)),
                Err(e) => return Outcome::error(e),
            }
        }
        let linear = counts.windows(2).zip(sizes.windows(2)).all(|(c, n)| c[1] * n[0] == c[0] * n[1] && c[0] > 0);
        let mut o = Outcome::at_most(worst, recurrence_tol, format!("ring of {m}, chi in {{0, pi/2, 2}}; multiplicity {counts:?} for N = {sizes:?}"));
        o.passed &= linear;
        o
    }));

    checks.push(timed("degeneracy: four k at omega = 2", || {
        let rep = degeneracy_scan(PI / 6.0, 2.0, &WalkParams::free(0.6).unwrap());
        let n = rep.solutions.len();
        Outcome::flag(n == 4, n as f64, 4.0, "m = 0.6, p = pi/6")
    }));

    checks.push(timed("grid: norm drift and antisymmetry", || {
        let (l, steps) = if full { (128, 64) } else { (48, 16) };
        let cfg = SimulationConfig::new(WalkParams::new(0.6, PI / 2.0).unwrap(), l, steps, InitialState::SingletAtOrigin, Boundary::Open);
        match simulator::run(&cfg, None) {
            Ok(r) => {
                let mut o = Outcome::at_most(r.max_norm_drift(), tol.unitarity, format!("L = {l}, {steps} steps, singlet"));
                o.passed &= r.last.antisymmetry_defect() == 0.0;
                o
            }
            Err(e) => Outcome::error(e),
        }
    }));

    checks.push(timed("grid: total momentum conserved", || {
        let l = if full { 32 } else { 16 };
        let params = WalkParams::new(0.7, 1.1).unwrap();
        let g = match antisymmetrize(&GridState::pseudo_random(l, 3), true) {
            Ok(g) => g,
            Err(e) => return Outcome::error(e),
        };
        let before = simulator::total_momentum_distribution(&g);
        match simulator::evolve(&g, 2 * l, &params, Boundary::Periodic) {
            Ok(out) => {
                let after = simulator::total_momentum_distribution(&out);
                let d = before.iter().zip(&after).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
                Outcome::at_most(d, 1e-10, format!("L = {l}, {} steps, periodic", 2 * l))
            }
            Err(e) => Outcome::error(e),
        }
    }));

    checks.push(timed("oracle: corrupted state is detected", || {
        let params = WalkParams::new(0.6, 2.0 * PI / 3.0).unwrap();
        let sol = match bound_state(0.3, &params) {
            Ok(s) => s,
            Err(e) => return Outcome::error(e),
        };
        let mut st = sol.sample_window(40);
        let mut v = st.get(3);
        v[1] += C64::from(1e-3);
        st.set(3, v);
        match state_residual(&st, &params, sol.eigenvalue(), Boundary::Open) {
            Ok(r) => Outcome::flag(r >= 1e-4, r, 1e-4, "one amplitude shifted by 1e-3; residual must reach the threshold"),
            Err(e) => Outcome::error(e),
        }
    }));

    checks.push(timed("figure: singlet diagonal mass", || {
        let run = |chi: f64| {
            let cfg = SimulationConfig::new(WalkParams::new(0.6, chi).unwrap(), 256, 32, InitialState::SingletAtOrigin, Boundary::Open);
            simulator::run(&cfg, None).map(|r| simulator::ridge_report(r.snapshots.last().unwrap()))
        };
        match (run(PI / 2.0), run(0.0)) {
            (Ok(a), Ok(b)) => Outcome::flag(
                a.diagonal_mass > b.diagonal_mass && a.is_localized(3.0) && !b.is_localized(3.0),
                a.diagonal_mass,
                b.diagonal_mass,
                format!("chi = pi/2 vs free at t = 32; profile {:?}", a.even_profile),
            ),
            (Err(e), _) | (_, Err(e)) => Outcome::error(e),
        }
    }));

    if full {
        checks.push(timed("figure: bound packet stays on the diagonal", || {
            let cfg = SimulationConfig::new(
                WalkParams::new(0.6, 0.2 * PI).unwrap(),
                640,
                128,
                InitialState::BoundStatePacket {
                    p0: 0.035 * PI,
                    width: simulator::DEFAULT_PACKET_WIDTH,
                },
                Boundary::Open,
            );
            match simulator::run(&cfg, None).map(|r| simulator::spread_report(&r.summary)) {
                Ok(Some(s)) => Outcome::flag(
                    s.y_growth.abs() < 0.1 && (3.0..=5.0).contains(&s.ballistic_ratio),
                    s.y_growth,
                    0.1,
                    format!("y width {:?}, w width {:?}, ballistic ratio {:.3}", s.width_y, s.width_w, s.ballistic_ratio),
                ),
                Ok(None) => Outcome::error("no summary"),
                Err(e) => Outcome::error(e),
            }
        }));
    }

    VerifyReport {
        level,
        tolerances: tol,
        checks,
    }
}
