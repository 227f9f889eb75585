use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use thirring_core::numeric::{max_abs, unitarity_defect};
use thirring_core::oracle::{build_dense, full_spectrum, gap_eigenpairs, multiplicity, recurrence_residual};
use thirring_core::simulator::{self, InitialState, SimulationConfig, DEFAULT_PACKET_WIDTH};
use thirring_core::single::{eigenvector, walk_matrix};
use thirring_core::solutions::{
    bound_state, bound_state_roots, continuous_bands, degeneracy_scan, localized_state, scattering_state,
    stationary_solutions, transmission,
};
use thirring_core::two_particle::{two_eigenvector, u2_step, w2_momentum};
use thirring_core::{Boundary, Sign, WalkParams, C64};

type Verdict = Result<String, String>;

fn check(cond: bool, ok: String, fail: String) -> Verdict {
    if cond {
        Ok(ok)
    } else {
        Err(fail)
    }
}

fn grid(n: usize) -> Vec<f64> {
    (0..n).map(|i| -PI + 2.0 * PI * (i as f64 + 0.5) / n as f64).collect()
}

const FIG4_CHIS: [f64; 4] = [2.0 * PI / 3.0, 3.0 * PI / 7.0, -3.0 * PI / 7.0, -2.0 * PI / 3.0];

fn unitarity() -> Verdict {
    let mut worst: f64 = 0.0;
    for m in [0.6, 0.7] {
        let params = WalkParams::free(m).map_err(|e| e.to_string())?;
        for &p in &grid(50) {
            worst = worst.max(unitarity_defect(&walk_matrix(p, &params)));
            for &k in &grid(50) {
                worst = worst.max(unitarity_defect(&w2_momentum(p, k, &params)));
            }
        }
    }
    let params = WalkParams::new(0.7, 2.0 * PI / 3.0).unwrap();
    let dense = build_dense(0.4, &params, 128).map_err(|e| e.to_string())?;
    let dense_defect = dense.unitarity_defect();
    let cfg = SimulationConfig::new(
        WalkParams::new(0.6, PI / 2.0).unwrap(),
        260,
        128,
        InitialState::SingletAtOrigin,
        Boundary::Open,
    );
    let run = simulator::run(&cfg, None).map_err(|e| e.to_string())?;
    let drift = run.max_norm_drift();
    let msg = format!("W, W2 {worst:.2e}; dense N=128 {dense_defect:.2e}; grid drift over 128 steps {drift:.2e}");
    check(worst <= 1e-12 && dense_defect <= 1e-12 && drift <= 1e-12, msg.clone(), msg)
}

fn eigenrelations() -> Verdict {
    let mut single: f64 = 0.0;
    let mut two: f64 = 0.0;
    for m in [0.6, 0.7] {
        let params = WalkParams::free(m).unwrap();
        for &p in &grid(50) {
            for s in Sign::BOTH {
                let v = eigenvector(p, s, &params);
                single = single.max(max_abs(&(walk_matrix(p, &params) * v.vec - v.vec * v.eigenvalue(&params))));
            }
            for &k in &grid(50) {
                let w = w2_momentum(p, k, &params);
                for s in Sign::BOTH {
                    for r in Sign::BOTH {
                        let v = two_eigenvector(p, k, s, r, &params);
                        two = two.max(max_abs(&(w * v.vec - v.vec * v.eigenvalue(&params))));
                    }
                }
            }
        }
    }
    let msg = format!("single {single:.2e}, two-particle {two:.2e} on 50x50, m in {{0.6, 0.7}}");
    check(single <= 1e-12 && two <= 1e-12, msg.clone(), msg)
}

fn transmission_modulus() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    let mut not_one = 0;
    for _ in 0..1000 {
        let (p, k, chi) = (rng.random_range(-PI..PI), rng.random_range(-PI..PI), rng.random_range(-PI..PI));
        let params = WalkParams::new(0.6, chi).unwrap();
        for s in Sign::BOTH {
            let t = transmission(p, k, s, &params).map_err(|e| format!("p={p}, k={k}, chi={chi}: {e}"))?;
            worst = worst.max((t.value.norm() - 1.0).abs());
            let free = transmission(p, k, s, &params.with_chi(0.0)).map_err(|e| e.to_string())?;
            if free.value != C64::from(1.0) {
                not_one += 1;
            }
        }
    }
    let msg = format!("max ||T| - 1| = {worst:.2e} over 1000 draws; {not_one} values != 1 at chi = 0");
    check(worst <= 1e-13 && not_one == 0, msg.clone(), msg)
}

fn scattering_recurrence() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    let mut done = 0;
    while done < 100 {
        let (p, k, chi) = (rng.random_range(-PI..PI), rng.random_range(-PI..PI), rng.random_range(-PI..PI));
        let branch = if rng.random::<bool>() { Sign::Plus } else { Sign::Minus };
        let params = WalkParams::new(rng.random_range(0.1..0.9), chi).unwrap();
        if let Ok(sol) = scattering_state(p, k, branch, &params) {
            worst = worst.max(recurrence_residual(&sol, -64, 64));
            done += 1;
        }
    }
    let msg = format!("max residual {worst:.2e} over 100 tuples, z in [-64, 64]");
    check(worst <= 1e-10, msg.clone(), msg)
}

fn bound_states() -> Verdict {
    let mut roots_ok = true;
    let mut min_margin = f64::INFINITY;
    let mut order_ok = true;
    let ps: Vec<f64> = (0..100).map(|i| -PI / 2.0 + (i as f64 + 0.5) * PI / 100.0).collect();
    for &p in &ps {
        let mut arg = Vec::new();
        for &chi in &FIG4_CHIS {
            let params = WalkParams::new(0.7, chi).unwrap();
            let roots = bound_state_roots(p, &params);
            roots_ok &= roots.len() == 1 && roots[0].k.im < 0.0;
            let sol = bound_state(p, &params).map_err(|e| format!("p={p}, chi={chi}: {e}"))?;
            min_margin = min_margin.min(continuous_bands(p, &params).gap_margin(sol.omega));
            arg.push(-sol.omega);
        }
        // top to bottom in the order of the couplings, read as arg λ = -ω
        order_ok &= arg.windows(2).all(|w| w[0] > w[1]);
    }
    let mut worst: f64 = 0.0;
    for &chi in &FIG4_CHIS {
        let params = WalkParams::new(0.7, chi).unwrap();
        let p = 0.6;
        let sol = bound_state(p, &params).map_err(|e| e.to_string())?;
        let a = build_dense(p, &params, 256).and_then(|d| d.antisymmetric()).map_err(|e| e.to_string())?;
        let spec = full_spectrum(&a).map_err(|e| e.to_string())?;
        let gaps = gap_eigenpairs(&spec, &continuous_bands(p, &params), 0.0);
        if gaps.len() != 1 {
            return Err(format!("chi = {chi}: {} dense eigenvalues in the gaps", gaps.len()));
        }
        worst = worst.max((gaps[0].value - sol.eigenvalue()).norm());
    }
    let msg = format!(
        "one root for 4x100 (chi,p): {roots_ok}; min gap margin {min_margin:.3e}; curves ordered: {order_ok}; dense N=256 |dλ| {worst:.2e}"
    );
    check(roots_ok && min_margin > 0.0 && order_ok && worst <= 1e-6, msg.clone(), msg)
}

fn localized_states() -> Verdict {
    let params = WalkParams::free(0.6).unwrap();
    let mut worst: f64 = 0.0;
    let mut supports = Vec::new();
    for i in 0..20 {
        let p = 0.05 + 1.45 * i as f64 / 19.0;
        for chi in [2.0 * p, -2.0 * p] {
            let pr = params.with_chi(chi);
            let sol = localized_state(p, &pr).map_err(|e| e.to_string())?;
            let st = sol.sample_window(4);
            let out = u2_step(&st, &pr, Boundary::Open).map_err(|e| e.to_string())?;
            let lam = C64::from_polar(1.0, chi);
            let mut want = st.clone();
            want.scale(lam);
            worst = worst.max(out.max_abs_diff(&want));
            supports.push((-8..=8).filter(|&y| sol.relative_amplitude(y).norm() > 0.0).count());
        }
    }
    let three = supports.iter().all(|&s| s == 3);
    let msg = format!("max residual {worst:.2e} for 20 pairs and both signs; all supports 3 sites: {three}");
    check(worst <= 1e-13 && three, msg.clone(), msg)
}

fn stationary() -> Verdict {
    let ring = 128usize;
    let mut worst: f64 = 0.0;
    for chi in [0.0, PI / 2.0, 2.0] {
        let params = WalkParams::new(0.6, chi).unwrap();
        for j in [3i64, 10, 29, -41, 60] {
            let k = 2.0 * PI * j as f64 / ring as f64;
            let pair = stationary_solutions(0.0, k, &params).map_err(|e| e.to_string())?;
            for sol in [&pair.dressed, &pair.complement] {
                let rel = sol.sample_relative(ring).map_err(|e| e.to_string())?;
                let n = rel.norm();
                let rel = rel.map_components(|v| v / C64::from(n));
                worst = worst.max(rel.step(&params).max_abs_diff(&rel));
            }
        }
    }
    let params = WalkParams::new(0.6, 2.0).unwrap();
    let mut counts = Vec::new();
    let sizes = [32usize, 64, 128];
    for n in sizes {
        let a = build_dense(0.0, &params, n).and_then(|d| d.antisymmetric()).map_err(|e| e.to_string())?;
        counts.push(multiplicity(&full_spectrum(&a).map_err(|e| e.to_string())?, C64::from(1.0), 1e-8));
    }
    let linear = counts[0] > 0 && counts[1] == 2 * counts[0] && counts[2] == 2 * counts[1];
    let msg = format!("max |Uψ - ψ| {worst:.2e}; eigenvalue-1 multiplicity {counts:?} for N = {sizes:?}");
    check(worst <= 1e-10 && linear, msg.clone(), msg)
}

fn figure_singlet() -> Verdict {
    let run = |chi: f64| {
        let cfg = SimulationConfig::new(
            WalkParams::new(0.6, chi).unwrap(),
            256,
            32,
            InitialState::SingletAtOrigin,
            Boundary::Open,
        );
        simulator::run(&cfg, None).map(|r| simulator::ridge_report(r.snapshots.last().unwrap()))
    };
    let inter = run(PI / 2.0).map_err(|e| e.to_string())?;
    let free = run(0.0).map_err(|e| e.to_string())?;
    let msg = format!(
        "diagonal mass {:.6} (free {:.6}); near-diagonal profile y=0,2,4 {:.3e} {:.3e} {:.3e}",
        inter.diagonal_mass, free.diagonal_mass, inter.even_profile[0], inter.even_profile[1], inter.even_profile[2]
    );
    check(
        inter.diagonal_mass > free.diagonal_mass && inter.is_localized(3.0) && !free.is_localized(3.0),
        msg.clone(),
        msg,
    )
}

fn figure_packet() -> Verdict {
    let cfg = SimulationConfig::new(
        WalkParams::new(0.6, 0.2 * PI).unwrap(),
        640,
        128,
        InitialState::BoundStatePacket {
            p0: 0.035 * PI,
            width: DEFAULT_PACKET_WIDTH,
        },
        Boundary::Open,
    );
    let run = simulator::run(&cfg, None).map_err(|e| e.to_string())?;
    let s = simulator::spread_report(&run.summary).ok_or("no summary")?;
    let msg = format!(
        "y width {:.4} -> {:.4} ({:+.2e}); w width {:.2} -> {:.2} -> {:.2}, ballistic ratio {:.3}",
        s.width_y.0, s.width_y.1, s.y_growth, s.width_w.0, s.width_w.1, s.width_w.2, s.ballistic_ratio
    );
    check(s.y_growth < 0.1 && (3.0..=5.0).contains(&s.ballistic_ratio), msg.clone(), msg)
}

fn degeneracy() -> Verdict {
    let rep = degeneracy_scan(PI / 6.0, 2.0, &WalkParams::free(0.6).unwrap());
    let ks: Vec<String> = rep.solutions.iter().map(|s| format!("({}{},{:.6})", s.s, s.r, s.k)).collect();
    let msg = format!("{} solutions: {}", rep.solutions.len(), ks.join(" "));
    check(rep.solutions.len() == 4, msg.clone(), msg)
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("unitarity and structure", unitarity),
        ("dispersion and eigenvectors", eigenrelations),
        ("transmission coefficient", transmission_modulus),
        ("scattering recurrence", scattering_recurrence),
        ("bound-state uniqueness and spectrum", bound_states),
        ("localized states", localized_states),
        ("stationary subspace at p = 0", stationary),
        ("singlet at origin, diagonal ridge", figure_singlet),
        ("bound packet on the diagonal", figure_packet),
        ("fourfold degeneracy", degeneracy),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let verdict = f();
        let secs = t0.elapsed().as_secs_f64();
        match verdict {
            Ok(msg) => println!("PASS {:>2} {name} ({secs:.1}s): {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {name} ({secs:.1}s): {msg}", i + 1);
            }
        }
    }
    println!("{} of {} acceptance criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
