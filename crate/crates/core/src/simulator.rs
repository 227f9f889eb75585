//! Time evolution of two-particle states on the `(x₁, x₂)` grid.
//!
//! The origin sits at `x₁ = x₂ = L/2`. Each step applies `V` and then `W ⊗ W`.

use std::f64::consts::PI;

use rayon::prelude::*;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::numeric::{Boundary, Vec4C, WalkParams, C64};
use crate::solutions::{bound_state, localized_state, EigenSolution};
use crate::two_particle::{antisymmetrize, FixedPState, FixedPWalk, GridState};

/// Default centre-of-mass packet width `σ_w` in lattice sites.
pub const DEFAULT_PACKET_WIDTH: f64 = 12.0;

/// Gaussian momentum weights are kept out to this many standard deviations.
pub const PACKET_CUTOFF: f64 = 13.0;

/// Relative amplitudes below this are dropped from the packet's `y` profile.
pub const PROFILE_FLOOR: f64 = 1e-18;

#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    /// `(|↑↓⟩ - |↓↑⟩)/√2` at `x₁ = x₂ = L/2`.
    SingletAtOrigin,
    /// Bound states around momentum `p0`, Gaussian of width `width` in `w = x₁ + x₂`.
    /// An infinite width gives the pure momentum-`p0` bound state.
    BoundStatePacket { p0: f64, width: f64 },
    /// Explicit amplitudes; antisymmetrized and normalized on construction.
    Custom(GridState),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub params: WalkParams,
    pub size: usize,
    pub steps: usize,
    pub initial: InitialState,
    pub boundary: Boundary,
}

impl SimulationConfig {
    pub fn new(params: WalkParams, size: usize, steps: usize, initial: InitialState, boundary: Boundary) -> Self {
        SimulationConfig {
            params,
            size,
            steps,
            initial,
            boundary,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.size < 4 || !self.size.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "lattice size must be even and at least 4, got {}",
                self.size
            )));
        }
        if let InitialState::Custom(g) = &self.initial {
            if g.size != self.size {
                return Err(Error::InvalidParameter(format!(
                    "custom state has size {} but the lattice has size {}",
                    g.size, self.size
                )));
            }
        }
        Ok(())
    }

    /// Refuses open runs whose light cone would reach the lattice edge.
    pub fn check_guard(&self, initial: &GridState) -> Result<()> {
        if self.boundary == Boundary::Periodic {
            return Ok(());
        }
        let extent = support_box(initial, guard_threshold(initial))
            .map(|b| b.extent())
            .unwrap_or(0);
        if extent + 2 * self.steps >= self.size {
            return Err(Error::SupportOverflow(format!(
                "support {extent} + 2·{} steps does not fit in L = {}",
                self.steps, self.size
            )));
        }
        Ok(())
    }
}

fn guard_threshold(state: &GridState) -> f64 {
    crate::two_particle::OPEN_GUARD * state.norm()
}

/// Bounding box of the sites carrying amplitude above `threshold`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SupportBox {
    pub x1: (usize, usize),
    pub x2: (usize, usize),
}

impl SupportBox {
    /// Largest side length.
    pub fn extent(&self) -> usize {
        (self.x1.1 - self.x1.0 + 1).max(self.x2.1 - self.x2.0 + 1)
    }
}

pub fn support_box(state: &GridState, threshold: f64) -> Option<SupportBox> {
    let l = state.size;
    let mut b: Option<SupportBox> = None;
    for x1 in 0..l {
        for x2 in 0..l {
            if state.get(x1, x2).iter().any(|c| c.norm() > threshold) {
                b = Some(match b {
                    None => SupportBox {
                        x1: (x1, x1),
                        x2: (x2, x2),
                    },
                    Some(s) => SupportBox {
                        x1: (s.x1.0.min(x1), s.x1.1.max(x1)),
                        x2: (s.x2.0.min(x2), s.x2.1.max(x2)),
                    },
                });
            }
        }
    }
    b
}

pub fn build_initial(config: &SimulationConfig) -> Result<GridState> {
    config.validate()?;
    let l = config.size;
    let state = match &config.initial {
        InitialState::SingletAtOrigin => {
            let mut g = GridState::zeros(l);
            let s = C64::from(std::f64::consts::FRAC_1_SQRT_2);
            g.set(l / 2, l / 2, Vec4C::new(C64::from(0.0), s, -s, C64::from(0.0)));
            g
        }
        InitialState::BoundStatePacket { p0, width } => {
            bound_packet(*p0, *width, &config.params, l, config.boundary)?
        }
        InitialState::Custom(g) => antisymmetrize(g, true)?,
    };
    Ok(state)
}

/// Bound state at momentum `p`, or the localized state where it takes over,
/// in the gauge with `ψ³(0)` real and positive.
pub fn molecule_state(p: f64, params: &WalkParams) -> Result<EigenSolution> {
    let sol = match bound_state(p, params) {
        Err(Error::LocalizedCondition { .. }) => localized_state(p, params)?,
        other => other?,
    };
    Ok(gauge_fixed(sol))
}

fn gauge_fixed(mut sol: EigenSolution) -> EigenSolution {
    let c = sol.amplitude(0)[2];
    if c.norm() > 0.0 {
        let ph = c.conj() / c.norm();
        sol.rescale(ph);
    }
    sol
}

/// Momentum nodes and amplitudes `c_j` of the packet: a midpoint-free grid
/// around `p0` with spacing `π/(2L)`, shifted by half a spacing if it would hit `p = 0`.
pub fn packet_weights(p0: f64, width: f64, size: usize) -> Vec<(f64, f64)> {
    if width.is_infinite() {
        return vec![(p0, 1.0)];
    }
    let sigma_p = 1.0 / (2.0 * width);
    let dp = PI / (2.0 * size as f64);
    let half = (PACKET_CUTOFF * sigma_p / dp).ceil() as i64;
    let mut offset = 0.0;
    if (-half..=half).any(|j| (p0 + j as f64 * dp).abs() < 1e-9) {
        offset = 0.5 * dp;
    }
    (-half..=half)
        .map(|j| {
            let p = p0 + offset + j as f64 * dp;
            let x = (p - p0) / sigma_p;
            (p, (-0.25 * x * x).exp() * dp)
        })
        .collect()
}

fn bound_packet(p0: f64, width: f64, params: &WalkParams, size: usize, boundary: Boundary) -> Result<GridState> {
    if width.is_nan() || width <= 0.0 {
        return Err(Error::InvalidParameter(format!("packet width must be positive, got {width}")));
    }
    if width.is_finite() && 10.0 * width >= size as f64 {
        return Err(Error::InvalidParameter(format!(
            "packet width {width} is too large for L = {size} (need 10·width < L)"
        )));
    }
    let weights = packet_weights(p0, width, size);
    let l = size as i64;
    let ys: Vec<i64> = (-(l - 1)..l).collect();
    // per node: relative profile over y and the factor c e^{-ipw} over w = x₁ + x₂ - L
    let nodes: Vec<(Vec<Vec4C>, Vec<C64>)> = weights
        .par_iter()
        .map(|&(p, c)| {
            let sol = molecule_state(p, params)?;
            let prof = ys.iter().map(|&y| sol.relative_amplitude(y)).collect();
            let phase = (0..2 * size).map(|s| C64::from_polar(c, -p * (s as f64 - size as f64))).collect();
            Ok((prof, phase))
        })
        .collect::<Result<_>>()?;
    let peak = |iy: usize| nodes.iter().map(|(prof, _)| crate::numeric::max_abs(&prof[iy])).fold(0.0, f64::max);
    let top = (0..ys.len()).map(peak).fold(0.0, f64::max);
    let reach = ys
        .iter()
        .enumerate()
        .filter(|&(iy, _)| peak(iy) > PROFILE_FLOOR * top)
        .map(|(_, y)| y.abs())
        .max()
        .unwrap_or(0);
    let mut g = GridState::zeros(size);
    let row_len = 4 * size;
    g.amps.par_chunks_mut(row_len).enumerate().for_each(|(x1, row)| {
        for x2 in 0..size {
            let mut y = x1 as i64 - x2 as i64;
            if boundary == Boundary::Periodic && y.abs() > l / 2 {
                y -= l * y.signum();
            }
            if y.abs() > reach {
                continue;
            }
            let iy = (y + l - 1) as usize;
            let mut acc = Vec4C::zeros();
            for (prof, phase) in &nodes {
                acc += prof[iy] * phase[x1 + x2];
            }
            row[4 * x2..4 * x2 + 4].copy_from_slice(acc.as_slice());
        }
    });
    let mut out = antisymmetrize(&g, false)?;
    out.normalize();
    Ok(out)
}

/// `steps` interacting steps.
pub fn evolve(state: &GridState, steps: usize, params: &WalkParams, boundary: Boundary) -> Result<GridState> {
    let mut s = state.clone();
    for _ in 0..steps {
        s = s.step(params, boundary)?;
    }
    Ok(s)
}

/// Per-step observables recorded by [`run`].
#[derive(Debug, Clone, PartialEq)]
pub struct StepSummary {
    pub t: usize,
    pub norm_drift: f64,
    pub diagonal_mass: f64,
    pub width_y: f64,
    pub width_w: f64,
}

#[derive(Debug, Clone)]
pub struct SimulationRun {
    pub initial: GridState,
    pub last: GridState,
    pub snapshots: Vec<ProbabilityField>,
    pub summary: Vec<StepSummary>,
}

impl SimulationRun {
    pub fn max_norm_drift(&self) -> f64 {
        self.summary.iter().map(|s| s.norm_drift).fold(0.0, f64::max)
    }
}

/// Builds the initial state and evolves it, keeping a probability snapshot every
/// `snapshot_every` steps (and always the first and last).
pub fn run(config: &SimulationConfig, snapshot_every: Option<usize>) -> Result<SimulationRun> {
    let initial = build_initial(config)?;
    config.check_guard(&initial)?;
    let every = snapshot_every.unwrap_or(config.steps.max(1)).max(1);
    let mut state = initial.clone();
    let n0 = initial.norm_sqr();
    let mut prev = n0;
    let mut snapshots = Vec::new();
    let mut summary = Vec::with_capacity(config.steps + 1);
    let record = |t: usize, s: &GridState, drift: f64, summary: &mut Vec<StepSummary>| -> ProbabilityField {
        let f = probability(s, t);
        summary.push(StepSummary {
            t,
            norm_drift: drift,
            diagonal_mass: f.diagonal_mass,
            width_y: f.y_marginal().std_dev(),
            width_w: f.w_marginal().std_dev(),
        });
        f
    };
    let f = record(0, &state, 0.0, &mut summary);
    snapshots.push(f);
    for t in 1..=config.steps {
        state = state.step(&config.params, config.boundary)?;
        let n = state.norm_sqr();
        let f = record(t, &state, (n - prev).abs(), &mut summary);
        prev = n;
        if t % every == 0 || t == config.steps {
            snapshots.push(f);
        }
    }
    Ok(SimulationRun {
        initial,
        last: state,
        snapshots,
        summary,
    })
}

/// Width statistics of a run: relative growth of the `y` width and the ratio
/// `(σ_w(T)² - σ_w(0)²) / (σ_w(T/2)² - σ_w(0)²)`, which is 4 for ballistic and
/// 2 for diffusive spreading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpreadReport {
    pub steps: usize,
    pub width_y: (f64, f64),
    pub width_w: (f64, f64, f64),
    pub y_growth: f64,
    pub ballistic_ratio: f64,
}

pub fn spread_report(summary: &[StepSummary]) -> Option<SpreadReport> {
    let first = summary.first()?;
    let last = summary.last()?;
    if last.t < 2 {
        return None;
    }
    let mid = summary.iter().find(|s| s.t == last.t / 2)?;
    let v0 = first.width_w.powi(2);
    Some(SpreadReport {
        steps: last.t,
        width_y: (first.width_y, last.width_y),
        width_w: (first.width_w, mid.width_w, last.width_w),
        y_growth: (last.width_y - first.width_y) / first.width_y,
        ballistic_ratio: (last.width_w.powi(2) - v0) / (mid.width_w.powi(2) - v0),
    })
}

/// Profile of the `y` marginal next to the diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct RidgeReport {
    pub diagonal_mass: f64,
    /// Mass with `|x₁ - x₂| ≤ 4`.
    pub near_mass: f64,
    /// `y`-marginal at `y = 0, 2, 4` (one sublattice).
    pub even_profile: [f64; 3],
}

impl RidgeReport {
    /// Geometric decay by at least `factor` over each of the two steps `0 → 2 → 4`.
    pub fn is_localized(&self, factor: f64) -> bool {
        let [a, b, c] = self.even_profile;
        a >= factor * b && b >= factor * c
    }
}

pub fn ridge_report(field: &ProbabilityField) -> RidgeReport {
    let m = field.y_marginal();
    RidgeReport {
        diagonal_mass: field.diagonal_mass,
        near_mass: field.near_diagonal_mass(4),
        even_profile: [m.get(0), m.get(2), m.get(4)],
    }
}

/// Spin-summed position distribution `p(x₁, x₂)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityField {
    pub size: usize,
    pub time: usize,
    /// `prob[x₁ L + x₂]`
    pub prob: Vec<f64>,
    pub total: f64,
    pub diagonal_mass: f64,
}

pub fn probability(state: &GridState, time: usize) -> ProbabilityField {
    let l = state.size;
    let prob: Vec<f64> = state
        .amps
        .chunks(4)
        .map(|c| (c[0].norm_sqr() + c[3].norm_sqr()) + (c[1].norm_sqr() + c[2].norm_sqr()))
        .collect();
    let total = prob.iter().sum();
    let diagonal_mass = (0..l).map(|x| prob[x * l + x]).sum();
    ProbabilityField {
        size: l,
        time,
        prob,
        total,
        diagonal_mass,
    }
}

impl ProbabilityField {
    pub fn get(&self, x1: usize, x2: usize) -> f64 {
        self.prob[x1 * self.size + x2]
    }

    /// `max |p(x₁,x₂) - p(x₂,x₁)|`
    pub fn exchange_defect(&self) -> f64 {
        let l = self.size;
        let mut d = 0.0f64;
        for x1 in 0..l {
            for x2 in 0..x1 {
                d = d.max((self.get(x1, x2) - self.get(x2, x1)).abs());
            }
        }
        d
    }

    /// Marginal over `y = x₁ - x₂ ∈ [-(L-1), L-1]`.
    pub fn y_marginal(&self) -> Marginal {
        let l = self.size as i64;
        let mut mass = vec![0.0; (2 * l - 1) as usize];
        for x1 in 0..self.size {
            for x2 in 0..self.size {
                mass[(x1 as i64 - x2 as i64 + l - 1) as usize] += self.get(x1, x2);
            }
        }
        Marginal { origin: -(l - 1), mass }
    }

    /// Marginal over `w = x₁ + x₂ - L ∈ [-L, L-2]`.
    pub fn w_marginal(&self) -> Marginal {
        let l = self.size as i64;
        let mut mass = vec![0.0; (2 * l - 1) as usize];
        for x1 in 0..self.size {
            for x2 in 0..self.size {
                mass[x1 + x2] += self.get(x1, x2);
            }
        }
        Marginal { origin: -l, mass }
    }

    /// Mass with `|x₁ - x₂| ≤ r`.
    pub fn near_diagonal_mass(&self, r: usize) -> f64 {
        let m = self.y_marginal();
        m.iter().filter(|(y, _)| y.unsigned_abs() as usize <= r).map(|(_, v)| v).sum()
    }
}

/// A one-dimensional distribution on consecutive integers starting at `origin`.
#[derive(Debug, Clone, PartialEq)]
pub struct Marginal {
    pub origin: i64,
    pub mass: Vec<f64>,
}

impl Marginal {
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.mass.iter().enumerate().map(|(i, &m)| (self.origin + i as i64, m))
    }

    pub fn get(&self, x: i64) -> f64 {
        let i = x - self.origin;
        if i >= 0 && (i as usize) < self.mass.len() {
            self.mass[i as usize]
        } else {
            0.0
        }
    }

    pub fn total(&self) -> f64 {
        self.mass.iter().sum()
    }

    pub fn mean(&self) -> f64 {
        self.iter().map(|(x, m)| x as f64 * m).sum::<f64>() / self.total()
    }

    pub fn std_dev(&self) -> f64 {
        let mu = self.mean();
        let var = self.iter().map(|(x, m)| (x as f64 - mu).powi(2) * m).sum::<f64>() / self.total();
        var.sqrt()
    }
}

/// Distribution of the total momentum `q = p₁ + p₂ ∈ {2πn/L}`, indexed by `n`.
///
/// Decomposes `ψ` into eigenvectors of the joint translation `(x₁,x₂) ↦ (x₁+1,x₂+1)`
/// along each diagonal `x₂ - x₁ = d (mod L)`.
pub fn total_momentum_distribution(state: &GridState) -> Vec<f64> {
    let l = state.size;
    let fft = FftPlanner::<f64>::new().plan_fft_forward(l);
    let rows: Vec<Vec<f64>> = (0..l)
        .into_par_iter()
        .map(|d| {
            let mut acc = vec![0.0; l];
            let mut buf = vec![C64::from(0.0); l];
            for a in 0..4 {
                for (s, b) in buf.iter_mut().enumerate() {
                    *b = state.amps[state.index(s, (s + d) % l, a)];
                }
                fft.process(&mut buf);
                for (n, b) in buf.iter().enumerate() {
                    acc[n] += b.norm_sqr() / l as f64;
                }
            }
            acc
        })
        .collect();
    let mut out = vec![0.0; l];
    for r in rows {
        for (o, v) in out.iter_mut().zip(r) {
            *o += v;
        }
    }
    out
}

/// `steps` interacting steps at fixed total momentum.
pub fn fixed_p_evolve(state: &FixedPState, steps: usize, params: &WalkParams, boundary: Boundary) -> Result<FixedPState> {
    let walk = FixedPWalk::new(state.p.value(), params);
    let mut s = state.clone();
    for _ in 0..steps {
        s = walk.step(&s, boundary)?;
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn singlet_config(chi: f64, size: usize, steps: usize) -> SimulationConfig {
        SimulationConfig::new(
            WalkParams::new(0.6, chi).unwrap(),
            size,
            steps,
            InitialState::SingletAtOrigin,
            Boundary::Open,
        )
    }

    #[test]
    fn singlet_has_two_opposite_amplitudes() {
        let g = build_initial(&singlet_config(0.3, 16, 2)).unwrap();
        let nz: Vec<C64> = g.amps.iter().copied().filter(|c| c.norm() > 0.0).collect();
        assert_eq!(nz.len(), 2);
        assert_eq!(nz[0], -nz[1]);
        assert!((g.norm() - 1.0).abs() < 1e-15);
        let f = probability(&g, 0);
        assert!((f.get(8, 8) - 1.0).abs() < 1e-15);
        assert!((f.diagonal_mass - 1.0).abs() < 1e-15);
    }

    #[test]
    fn odd_size_and_guard_are_rejected() {
        assert!(build_initial(&singlet_config(0.3, 15, 2)).is_err());
        let cfg = singlet_config(0.3, 16, 8);
        assert!(run(&cfg, None).is_err());
        assert!(run(&singlet_config(0.3, 16, 7), None).is_ok());
    }

    #[test]
    fn norm_antisymmetry_and_light_cone() {
        let cfg = singlet_config(PI / 2.0, 48, 20);
        let r = run(&cfg, Some(5)).unwrap();
        assert!(r.max_norm_drift() <= 1e-12);
        assert!(r.last.antisymmetry_defect() == 0.0);
        assert_eq!(r.snapshots.len(), 5);
        let mut s = r.initial.clone();
        for t in 1..=10 {
            s = s.step(&cfg.params, Boundary::Open).unwrap();
            let b = support_box(&s, 0.0).unwrap();
            assert!(b.x1.0 >= 24 - t && b.x1.1 <= 24 + t && b.x2.0 >= 24 - t && b.x2.1 <= 24 + t);
        }
        for f in &r.snapshots {
            assert!((f.total - 1.0).abs() < 1e-12);
            assert!(f.exchange_defect() < 1e-15);
        }
    }

    #[test]
    fn total_momentum_is_conserved() {
        let params = WalkParams::new(0.7, 1.1).unwrap();
        let g = antisymmetrize(&GridState::pseudo_random(16, 4), true).unwrap();
        let before = total_momentum_distribution(&g);
        assert!((before.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let after = total_momentum_distribution(&evolve(&g, 9, &params, Boundary::Periodic).unwrap());
        let d = before.iter().zip(&after).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(d < 1e-10, "{d}");
    }

    #[test]
    fn pure_momentum_packet_is_an_eigenvector() {
        // p = 2πj/L, and L large enough that the wrapped tail is below rounding
        let l = 128;
        let p = 2.0 * PI * 6.0 / l as f64;
        let params = WalkParams::new(0.6, 2.0 * PI / 3.0).unwrap();
        let initial = InitialState::BoundStatePacket { p0: p, width: f64::INFINITY };
        let cfg = SimulationConfig::new(params, l, 1, initial, Boundary::Periodic);
        let g = build_initial(&cfg).unwrap();
        let sol = molecule_state(p, &params).unwrap();
        let out = evolve(&g, 1, &params, Boundary::Periodic).unwrap();
        let mut want = g.clone();
        want.amps.iter_mut().for_each(|c| *c *= sol.eigenvalue());
        let d = out.max_abs_diff(&want);
        assert!(d < 1e-12, "{d}");

        // on the open lattice the y-marginal is the relative profile weighted by the number of w sites
        let g = build_initial(&SimulationConfig { boundary: Boundary::Open, ..cfg }).unwrap();
        let m = probability(&g, 0).y_marginal();
        let weights: Vec<f64> = (-(l as i64 - 1)..l as i64)
            .map(|y| (l as i64 - y.abs()) as f64 * sol.relative_amplitude(y).norm_squared())
            .collect();
        let z: f64 = weights.iter().sum();
        for (i, (_, v)) in m.iter().enumerate() {
            assert!((v - weights[i] / z).abs() < 1e-13);
        }
    }

    #[test]
    fn packet_nodes_avoid_zero() {
        let w = packet_weights(0.0, 12.0, 256);
        assert!(w.iter().all(|(p, _)| p.abs() > 1e-6));
        let peak = w.iter().cloned().fold((0.0, 0.0), |a, b| if b.1 > a.1 { b } else { a });
        assert!(peak.0.abs() < PI / 256.0);
        assert_eq!(packet_weights(0.3, f64::INFINITY, 256), vec![(0.3, 1.0)]);
    }

    #[test]
    fn molecule_family_is_continuous_through_the_localized_point() {
        let params = WalkParams::new(0.6, 0.2 * PI).unwrap();
        let c = 0.1 * PI;
        let at = molecule_state(c, &params).unwrap();
        for d in [-1e-6, 1e-6] {
            let near = molecule_state(c + d, &params).unwrap();
            let diff = (-3..3).map(|z| crate::numeric::max_abs(&(near.amplitude(z) - at.amplitude(z)))).fold(0.0, f64::max);
            assert!(diff < 1e-4, "{diff}");
        }
    }

    #[test]
    fn bound_state_evolves_by_a_phase() {
        let params = WalkParams::new(0.6, 2.0 * PI / 3.0).unwrap();
        let sol = bound_state(0.3, &params).unwrap();
        let st = sol.sample_window(60);
        let out = fixed_p_evolve(&st, 100, &params, Boundary::Open).unwrap();
        let ov = st.inner(&out);
        assert!((ov.norm() - 1.0).abs() < 1e-9);
        let one = fixed_p_evolve(&st, 1, &params, Boundary::Open).unwrap();
        assert!((st.inner(&one) - sol.eigenvalue()).norm() < 1e-12);
    }
}
