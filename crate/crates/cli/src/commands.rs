use std::f64::consts::PI;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use thirring_core::oracle::recurrence_residual;
use thirring_core::simulator::{self, InitialState, SimulationConfig};
use thirring_core::solutions::{
    band_table, bound_state, degeneracy_scan, localized_state, scattering_state, transmission, EigenSolution,
};
use thirring_core::two_particle::GridState;
use thirring_core::verify::{run_suite, Level};
use thirring_core::{Boundary, Error, Sign, Tolerances, WalkParams};

use crate::args::*;
use crate::output::{complex_cells, csv_bytes, now, num, OutputDir};
use crate::{UsageError, EXIT_FAILURE, EXIT_OK};

pub fn run(cli: &Cli, tol: Tolerances, overrides: &[(String, f64)]) -> Result<u8> {
    let started = now();
    let angle = |x: f64| if cli.pi_units { x * PI } else { x };
    let (out, code) = match &cli.command {
        Command::Bands(a) => bands(a, &angle)?,
        Command::Boundstate(a) => boundstate(a, &angle)?,
        Command::Evolve(a) => evolve(a, &angle)?,
        Command::Scatter(a) => scatter(a, &angle)?,
        Command::Degeneracy(a) => degeneracy(a, &angle)?,
        Command::Verify(a) => verify(a, tol)?,
    };
    if let Some(dir) = out {
        dir.finish(cli, started, overrides)?;
    }
    Ok(code)
}

type Outcome = (Option<OutputDir>, u8);

fn open(out: &Option<std::path::PathBuf>) -> Result<Option<OutputDir>> {
    out.as_deref().map(OutputDir::create).transpose()
}

fn emit_json<T: Serialize>(dir: &mut Option<OutputDir>, name: &str, value: &T) -> Result<()> {
    match dir {
        Some(d) => d.write_json(name, value),
        None => {
            let mut text = serde_json::to_string_pretty(value)?;
            text.push('\n');
            stdout(&text)
        }
    }
}

/// Writes to stdout; a closed pipe is not an error.
fn stdout(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

#[derive(Serialize)]
struct Cx {
    re: f64,
    im: f64,
}

impl From<Complex64> for Cx {
    fn from(z: Complex64) -> Self {
        Cx { re: z.re, im: z.im }
    }
}

fn bands(a: &BandsArgs, angle: &dyn Fn(f64) -> f64) -> Result<Outcome> {
    let chis: Vec<f64> = a.chi.0.iter().map(|&c| angle(c)).collect();
    let p_min = a.p_min.map_or(-PI, angle);
    let p_max = a.p_max.map_or(PI, angle);
    let rows = band_table(a.mass, &chis, p_min, p_max, a.p_steps)?;
    let mut header: Vec<String> = ["p", "band_edge_1", "band_edge_2", "band_edge_3", "band_edge_4"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    header.extend(a.chi.0.iter().map(|c| format!("discrete_omega[chi={c:?}]")));
    let bytes = csv_bytes(
        &header,
        rows.iter().map(|r| {
            let mut cells = vec![num(r.p)];
            cells.extend(r.edges.iter().map(|&e| num(e)));
            cells.extend(r.discrete.iter().map(|d| d.map(num).unwrap_or_default()));
            cells
        }),
    )?;
    let mut dir = open(&a.out)?;
    match &mut dir {
        Some(d) => d.write("bands.csv", &bytes)?,
        None => stdout(std::str::from_utf8(&bytes)?)?,
    }
    Ok((dir, EXIT_OK))
}

const COMPONENTS: [&str; 4] = ["uu", "ud", "du", "dd"];

fn profile_csv(sol: &EigenSolution, half: usize) -> Result<Vec<u8>> {
    let mut header = vec!["y".to_string()];
    for c in COMPONENTS {
        header.push(format!("{c}_re"));
        header.push(format!("{c}_im"));
    }
    let h = half as i64;
    csv_bytes(
        &header,
        (-h..=h).map(|y| {
            let v = sol.relative_amplitude(y);
            let mut cells = vec![y.to_string()];
            for z in v.iter() {
                cells.extend(complex_cells(*z));
            }
            cells
        }),
    )
}

/// Residual over the `z` sites covering relative distances up to `half`.
fn residual(sol: &EigenSolution, half: usize) -> f64 {
    let z = (half / 2 + 1) as i64;
    recurrence_residual(sol, -z, z)
}

#[derive(Serialize)]
struct SolutionRecord {
    kind: String,
    mass: f64,
    chi: f64,
    p: f64,
    k: Cx,
    branch: String,
    omega: f64,
    eigenvalue: Cx,
    decay_rate: f64,
    residual: f64,
    window: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    notice: Option<String>,
}

fn record(sol: &EigenSolution, mass: f64, window: usize, notice: Option<String>) -> SolutionRecord {
    SolutionRecord {
        kind: sol.kind.to_string(),
        mass,
        chi: sol.chi,
        p: sol.p.value(),
        k: Cx { re: sol.k.re, im: sol.k.im },
        branch: sol.branch.to_string(),
        omega: sol.omega,
        eigenvalue: sol.eigenvalue().into(),
        decay_rate: sol.decay_rate(),
        residual: residual(sol, window),
        window,
        notice,
    }
}

fn boundstate(a: &BoundStateArgs, angle: &dyn Fn(f64) -> f64) -> Result<Outcome> {
    let params = WalkParams::new(a.mass, angle(a.chi))?;
    let p = angle(a.p);
    let (sol, notice) = match bound_state(p, &params) {
        Ok(sol) => (sol, None),
        Err(Error::LocalizedCondition { .. }) => {
            let notice = "e^{iχ} = e^{±2ip}: no decaying bound state; emitting the localized 3-site state instead";
            eprintln!("notice: {notice}");
            (localized_state(p, &params)?, Some(notice.to_string()))
        }
        Err(e) => return Err(e.into()),
    };
    let rec = record(&sol, a.mass, a.window, notice);
    let mut dir = open(&a.out)?;
    emit_json(&mut dir, "boundstate.json", &rec)?;
    if let Some(d) = &mut dir {
        d.write("profile.csv", &profile_csv(&sol, a.window)?)?;
    }
    Ok((dir, EXIT_OK))
}

#[derive(Serialize)]
struct ScatterRecord {
    #[serde(flatten)]
    solution: SolutionRecord,
    t_plus: Cx,
    t_minus: Cx,
    abs_t_plus: f64,
    abs_t_minus: f64,
    /// Transmission coefficient of the requested branch.
    transmission: Cx,
    abs_t: f64,
}

fn scatter(a: &ScatterArgs, angle: &dyn Fn(f64) -> f64) -> Result<Outcome> {
    let params = WalkParams::new(a.mass, angle(a.chi))?;
    let (p, k) = (angle(a.p), angle(a.k));
    let branch = match a.branch {
        BranchArg::Plus => Sign::Plus,
        BranchArg::Minus => Sign::Minus,
    };
    let sol = scattering_state(p, k, branch, &params)?;
    let tp = transmission(p, k, Sign::Plus, &params)?.value;
    let tm = transmission(p, k, Sign::Minus, &params)?.value;
    let t = if branch == Sign::Plus { tp } else { tm };
    let rec = ScatterRecord {
        solution: record(&sol, a.mass, a.window, None),
        t_plus: tp.into(),
        t_minus: tm.into(),
        abs_t_plus: tp.norm(),
        abs_t_minus: tm.norm(),
        transmission: t.into(),
        abs_t: t.norm(),
    };
    let mut dir = open(&a.out)?;
    emit_json(&mut dir, "scatter.json", &rec)?;
    if let Some(d) = &mut dir {
        d.write("profile.csv", &profile_csv(&sol, a.window)?)?;
    }
    Ok((dir, EXIT_OK))
}

#[derive(Serialize)]
struct DegenerateRecord {
    s: String,
    r: String,
    k: f64,
}

#[derive(Serialize)]
struct DegeneracyRecord {
    mass: f64,
    p: f64,
    omega: f64,
    count: usize,
    solutions: Vec<DegenerateRecord>,
    warning: Option<String>,
}

fn degeneracy(a: &DegeneracyArgs, angle: &dyn Fn(f64) -> f64) -> Result<Outcome> {
    let params = WalkParams::free(a.mass)?;
    let report = degeneracy_scan(angle(a.p), angle(a.omega), &params);
    if let Some(w) = &report.warning {
        eprintln!("warning: {w}");
    }
    let rec = DegeneracyRecord {
        mass: a.mass,
        p: report.p,
        omega: report.omega,
        count: report.solutions.len(),
        solutions: report
            .solutions
            .iter()
            .map(|s| DegenerateRecord {
                s: s.s.to_string(),
                r: s.r.to_string(),
                k: s.k,
            })
            .collect(),
        warning: report.warning.clone(),
    };
    let mut dir = open(&a.out)?;
    emit_json(&mut dir, "degeneracy.json", &rec)?;
    if let Some(d) = &mut dir {
        let header = ["s", "r", "k"].map(String::from);
        let bytes = csv_bytes(
            &header,
            report.solutions.iter().map(|s| vec![s.s.to_string(), s.r.to_string(), num(s.k)]),
        )?;
        d.write("degeneracy.csv", &bytes)?;
    }
    Ok((dir, EXIT_OK))
}

#[derive(Serialize)]
struct CheckRecord {
    name: String,
    passed: bool,
    value: f64,
    threshold: f64,
    detail: String,
    seconds: f64,
}

#[derive(Serialize)]
struct VerifyRecord {
    level: String,
    passed: bool,
    failures: usize,
    tolerances: TolRecord,
    checks: Vec<CheckRecord>,
}

#[derive(Serialize)]
struct TolRecord {
    unitarity: f64,
    residual: f64,
    root: f64,
}

fn verify(a: &VerifyArgs, tol: Tolerances) -> Result<Outcome> {
    let level = match a.level {
        LevelArg::Quick => Level::Quick,
        LevelArg::Full => Level::Full,
    };
    let report = run_suite(level, tol);
    stdout(&report.table())?;
    let mut dir = open(&a.out)?;
    if let Some(d) = &mut dir {
        let rec = VerifyRecord {
            level: level.to_string(),
            passed: report.passed(),
            failures: report.failures(),
            tolerances: TolRecord {
                unitarity: tol.unitarity,
                residual: tol.residual,
                root: tol.root,
            },
            checks: report
                .checks
                .iter()
                .map(|c| CheckRecord {
                    name: c.name.clone(),
                    passed: c.passed,
                    value: c.value,
                    threshold: c.threshold,
                    detail: c.detail.clone(),
                    seconds: c.seconds,
                })
                .collect(),
        };
        d.write_json("verify.json", &rec)?;
    }
    Ok((dir, if report.passed() { EXIT_OK } else { EXIT_FAILURE }))
}

#[derive(Deserialize)]
struct AmplitudeRow {
    x1: usize,
    x2: usize,
    component: usize,
    re: f64,
    im: f64,
}

fn read_amplitudes(path: &Path, size: usize) -> Result<GridState> {
    let mut grid = GridState::zeros(size);
    let mut rdr = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    for (line, row) in rdr.deserialize::<AmplitudeRow>().enumerate() {
        let row = row.with_context(|| format!("{}: record {}", path.display(), line + 1))?;
        if row.x1 >= size || row.x2 >= size || row.component > 3 {
            return Err(UsageError(format!(
                "{}: record {} ({}, {}, {}) lies outside the {size}x{size} lattice",
                path.display(),
                line + 1,
                row.x1,
                row.x2,
                row.component
            ))
            .into());
        }
        let i = grid.index(row.x1, row.x2, row.component);
        grid.amps[i] = Complex64::new(row.re, row.im);
    }
    Ok(grid)
}

#[derive(Serialize)]
struct StepRecord {
    t: usize,
    norm_drift: f64,
    diagonal_mass: f64,
    width_y: f64,
    width_w: f64,
}

#[derive(Serialize)]
struct SpreadRecord {
    width_y_initial: f64,
    width_y_final: f64,
    width_w_initial: f64,
    width_w_half: f64,
    width_w_final: f64,
    y_growth: f64,
    ballistic_ratio: f64,
}

#[derive(Serialize)]
struct RidgeRecord {
    diagonal_mass: f64,
    near_mass: f64,
    even_profile: [f64; 3],
    localized: bool,
}

#[derive(Serialize)]
struct EvolveSummary {
    mass: f64,
    chi: f64,
    init: InitKind,
    p0: Option<f64>,
    width: Option<f64>,
    size: usize,
    steps: usize,
    boundary: BoundaryArg,
    max_norm_drift: f64,
    final_ridge: RidgeRecord,
    spread: Option<SpreadRecord>,
    history: Vec<StepRecord>,
}

fn evolve(a: &EvolveArgs, angle: &dyn Fn(f64) -> f64) -> Result<Outcome> {
    let params = WalkParams::new(a.mass, angle(a.chi))?;
    let p0 = angle(a.p0);
    let initial = match a.init {
        InitKind::Singlet => InitialState::SingletAtOrigin,
        InitKind::Packet => InitialState::BoundStatePacket { p0, width: a.width },
        InitKind::Custom => {
            let path = a
                .amplitudes
                .as_deref()
                .ok_or_else(|| UsageError("--init custom needs --amplitudes <csv>".into()))?;
            InitialState::Custom(read_amplitudes(path, a.size)?)
        }
    };
    let boundary = match a.boundary {
        BoundaryArg::Open => Boundary::Open,
        BoundaryArg::Periodic => Boundary::Periodic,
    };
    let cfg = SimulationConfig::new(params, a.size, a.steps, initial, boundary);
    cfg.validate()?;
    let run = simulator::run(&cfg, a.snapshot_every)?;

    let mut dir = OutputDir::create(&a.out)?;
    let header = ["x1", "x2", "prob"].map(String::from);
    for f in &run.snapshots {
        let l = f.size;
        let bytes = csv_bytes(
            &header,
            f.prob
                .iter()
                .enumerate()
                .filter(|(_, &v)| v != 0.0)
                .map(|(i, &v)| vec![(i / l).to_string(), (i % l).to_string(), num(v)]),
        )?;
        dir.write(&format!("prob_t{:05}.csv", f.time), &bytes)?;
    }

    let header = ["t", "norm_drift", "diagonal_mass", "width_y", "width_w"].map(String::from);
    let bytes = csv_bytes(
        &header,
        run.summary.iter().map(|s| {
            vec![s.t.to_string(), num(s.norm_drift), num(s.diagonal_mass), num(s.width_y), num(s.width_w)]
        }),
    )?;
    dir.write("summary.csv", &bytes)?;

    let last = run.snapshots.last().context("no snapshots recorded")?;
    let ridge = simulator::ridge_report(last);
    let packet = a.init == InitKind::Packet;
    let summary = EvolveSummary {
        mass: a.mass,
        chi: params.chi(),
        init: a.init,
        p0: packet.then_some(p0),
        width: packet.then_some(a.width),
        size: a.size,
        steps: a.steps,
        boundary: a.boundary,
        max_norm_drift: run.max_norm_drift(),
        final_ridge: RidgeRecord {
            diagonal_mass: ridge.diagonal_mass,
            near_mass: ridge.near_mass,
            even_profile: ridge.even_profile,
            localized: ridge.is_localized(3.0),
        },
        spread: simulator::spread_report(&run.summary).map(|s| SpreadRecord {
            width_y_initial: s.width_y.0,
            width_y_final: s.width_y.1,
            width_w_initial: s.width_w.0,
            width_w_half: s.width_w.1,
            width_w_final: s.width_w.2,
            y_growth: s.y_growth,
            ballistic_ratio: s.ballistic_ratio,
        }),
        history: run
            .summary
            .iter()
            .map(|s| StepRecord {
                t: s.t,
                norm_drift: s.norm_drift,
                diagonal_mass: s.diagonal_mass,
                width_y: s.width_y,
                width_w: s.width_w,
            })
            .collect(),
    };
    dir.write_json("summary.json", &summary)?;
    eprintln!(
        "evolved {} steps on {}x{}: diagonal mass {:.6}, max norm drift {:.2e}",
        a.steps,
        a.size,
        a.size,
        last.diagonal_mass,
        summary.max_norm_drift
    );
    Ok((Some(dir), EXIT_OK))
}
