//! The acceptance suite: ten numerical checks, each recording what it
//! measured, the tolerance it was held to and its wall time. Failures are
//! recorded, never propagated.

use std::f64::consts::PI;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use anyhow::{anyhow, Result};
use cattaneo_core::fit::fit_decay;
use cattaneo_core::fouriermodel::{evolve_series_fourier, relaxation_limit};
use cattaneo_core::green::{green_expm, green_explicit};
use cattaneo_core::linsim::{
    duhamel_reconstruct_psi, evolve_series, make_lowerbound_data, negative_norm, sobolev_norm, z1_lower_integral, BandSel, Components,
    FrequencyBands, NormRequest, NormSeries, Profile, RadialDataSpec,
};
use cattaneo_core::nonlinsim::{init_state, l2_distance, linear_evolve, run, PeriodicGrid, RunConfig, StateField, StepPolicy};
use cattaneo_core::symbol::{log_grid, spectral_bounds, unlabeled_set, verify_expansions, Band};
use cattaneo_core::NormalizedParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::ExperimentConfig;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub pass: bool,
    pub measured: Value,
    pub tolerance: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    /// Numerical outcome alone, before the runtime budget is applied.
    pub numeric_pass: bool,
    pub within_budget: bool,
    pub measured: Value,
    pub tolerance: String,
    pub wall_time_s: f64,
    pub budget_s: f64,
    pub error: Option<String>,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let detail = match &self.error {
            Some(e) => format!("error: {e}"),
            None => format!("tolerance: {}", self.tolerance),
        };
        format!("criterion {:>2} {:<28} {verdict}  ({:.2} s of {} s; {detail})", self.id, self.name, self.wall_time_s, self.budget_s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AcceptanceReport {
    pub criteria: Vec<CriterionResult>,
    pub all_passed: bool,
    pub wall_time_s: f64,
}

pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    pub budget_s: f64,
    pub run: fn(&ExperimentConfig) -> Result<Check>,
}

pub const CRITERIA: [Criterion; 10] = [
    Criterion { id: 1, name: "eigenvalue-asymptotics", budget_s: 1.0, run: eigenvalue_asymptotics },
    Criterion { id: 2, name: "spectral-gaps", budget_s: 2.0, run: spectral_gaps },
    Criterion { id: 3, name: "green-oracle-equivalence", budget_s: 5.0, run: green_oracle },
    Criterion { id: 4, name: "upper-decay-rates", budget_s: 60.0, run: upper_rates },
    Criterion { id: 5, name: "optimality", budget_s: 60.0, run: optimality },
    Criterion { id: 6, name: "z1-scaling", budget_s: 1.0, run: z1_scaling },
    Criterion { id: 7, name: "damping-reconstruction", budget_s: 10.0, run: damping_reconstruction },
    Criterion { id: 8, name: "cattaneo-fourier", budget_s: 90.0, run: cattaneo_fourier },
    Criterion { id: 9, name: "nonlinear-invariants", budget_s: 300.0, run: nonlinear_invariants },
    Criterion { id: 10, name: "norm-engine-exactness", budget_s: 1.0, run: norm_exactness },
];

pub fn run_criterion(c: &Criterion, cfg: &ExperimentConfig) -> CriterionResult {
    let start = Instant::now();
    let outcome = (c.run)(cfg);
    let wall = start.elapsed().as_secs_f64();
    let within_budget = wall <= c.budget_s;
    let (numeric_pass, measured, tolerance, error) = match outcome {
        Ok(ch) => (ch.pass, ch.measured, ch.tolerance, None),
        Err(e) => (false, Value::Null, String::new(), Some(format!("{e:#}"))),
    };
    CriterionResult {
        id: c.id,
        name: c.name,
        passed: numeric_pass && within_budget,
        numeric_pass,
        within_budget,
        measured,
        tolerance,
        wall_time_s: wall,
        budget_s: c.budget_s,
        error,
    }
}

/// Runs the selected criteria (all when `ids` is empty) on a pool of
/// `workers` threads. Results come back in criterion order.
pub fn run_acceptance_suite(cfg: &ExperimentConfig, ids: &[u8], workers: usize) -> AcceptanceReport {
    let start = Instant::now();
    let chosen: Vec<&Criterion> = CRITERIA.iter().filter(|c| ids.is_empty() || ids.contains(&c.id)).collect();
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<CriterionResult>>> = Mutex::new(vec![None; chosen.len()]);
    std::thread::scope(|s| {
        for _ in 0..workers.max(1).min(chosen.len().max(1)) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= chosen.len() {
                    break;
                }
                let r = run_criterion(chosen[i], cfg);
                slots.lock().expect("no poisoned workers")[i] = Some(r);
            });
        }
    });
    let criteria: Vec<CriterionResult> = slots.into_inner().expect("no poisoned workers").into_iter().flatten().collect();
    let all_passed = criteria.iter().all(|c| c.passed);
    AcceptanceReport { criteria, all_passed, wall_time_s: start.elapsed().as_secs_f64() }
}

fn np(cfg: &ExperimentConfig) -> Result<NormalizedParams> {
    Ok(cfg.normalized()?)
}

fn bands(cfg: &ExperimentConfig) -> Result<FrequencyBands> {
    Ok(FrequencyBands::new(cfg.grid.band_r0, cfg.grid.band_big_r0)?)
}

fn eigenvalue_asymptotics(cfg: &ExperimentConfig) -> Result<Check> {
    let p = np(cfg)?;
    let mut pass = true;
    let mut out = serde_json::Map::new();
    for (band, radii, name) in [(Band::Low, &cfg.grid.low_radii, "low"), (Band::High, &cfg.grid.high_radii, "high")] {
        let rep = verify_expansions(&p, band, radii)?;
        pass &= rep.pass();
        let rows: Vec<Value> = rep
            .branches
            .iter()
            .map(|b| json!({"branch": b.branch, "claimed": b.claimed, "orders": b.orders, "errors": b.errors}))
            .collect();
        out.insert(name.into(), json!({"radii": rep.radii, "branches": rows, "min_margin": rep.min_margin()}));
    }
    Ok(Check { pass, measured: Value::Object(out), tolerance: "order >= claimed - 0.3".into() })
}

fn spectral_gaps(cfg: &ExperimentConfig) -> Result<Check> {
    let full = log_grid(cfg.grid.r_min, cfg.grid.r_max, cfg.grid.points + 2);
    let radii = &full[1..full.len() - 1];
    let base = cfg.physical.params();
    let mut cases = vec![("config", base)];
    for tau in [0.1, 1.0, 10.0] {
        cases.push(("tau", base.with_tau(tau)));
    }
    let mut pass = true;
    let mut rows = vec![];
    for (label, p) in cases {
        let p = p.normalize()?;
        let sets = radii.iter().map(|&r| unlabeled_set(r, &p)).collect::<cattaneo_core::Result<Vec<_>>>()?;
        match spectral_bounds(&sets, cfg.grid.band_r0, cfg.grid.band_big_r0) {
            Ok(b) => rows.push(json!({"case": label, "tau": p.tau, "beta": b.beta, "R1": b.r1, "R2": b.r2})),
            Err(e) => {
                pass = false;
                rows.push(json!({"case": label, "tau": p.tau, "error": e.to_string()}));
            }
        }
    }
    Ok(Check { pass, measured: json!({"samples": radii.len(), "cases": rows}), tolerance: "beta, R1, R2 > 0".into() })
}

fn green_oracle(cfg: &ExperimentConfig) -> Result<Check> {
    let p = np(cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.data.seed);
    let n = 1000;
    let (mut collisions, mut worst, mut worst_ratio) = (0usize, 0.0f64, 0.0f64);
    for _ in 0..n {
        let r = 10f64.powf(rng.random_range(-3.0..3.0));
        let th: f64 = rng.random_range(0.0..PI);
        let ph: f64 = rng.random_range(0.0..2.0 * PI);
        let xi = [r * th.sin() * ph.cos(), r * th.sin() * ph.sin(), r * th.cos()];
        let t = rng.random_range(0.0..100.0);
        match green_explicit(xi, t, &p) {
            Ok(e) => {
                let m = green_expm(xi, t, &p).entries;
                let err = e.entries.max_abs_diff(&m);
                worst = worst.max(err);
                worst_ratio = worst_ratio.max(err / (1e-7 + 1e-7 * m.max_abs()));
            }
            Err(_) => collisions += 1,
        }
    }
    let pass = worst_ratio <= 1.0 && collisions * 100 < n;
    Ok(Check {
        pass,
        measured: json!({"samples": n, "max_entry_error": worst, "max_error_over_tolerance": worst_ratio, "collisions": collisions}),
        tolerance: "error <= 1e-7 + 1e-7*max|G|, collisions < 1%".into(),
    })
}

fn series(cfg: &ExperimentConfig, reqs: &[NormRequest], fourier: bool) -> Result<NormSeries> {
    let p = np(cfg)?;
    let data = make_lowerbound_data(cfg.data.mu0, cfg.data.r0, cfg.data.big_r0)?;
    let times = log_grid(cfg.time.t_min, cfg.time.t_max, cfg.time.samples);
    let b = bands(cfg)?;
    Ok(if fourier { evolve_series_fourier(&p, &data, &times, reqs, &b, None)? } else { evolve_series(&p, &data, &times, reqs, &b, None)? })
}

fn slope(cfg: &ExperimentConfig, s: &NormSeries, i: usize) -> Result<f64> {
    let w = cfg.time.fit_window;
    Ok(fit_decay(&s.times, &s.columns[i], (w[0], w[1]))?.slope)
}

fn upper_rates(cfg: &ExperimentConfig) -> Result<Check> {
    let mut reqs = vec![];
    let mut expected = vec![];
    for (comp, base) in [(Components::FLUID, -0.75), (Components::PSI, -1.25)] {
        for k in 0..3 {
            reqs.push(NormRequest::derivative(comp, k, BandSel::Full));
            expected.push(base - 0.5 * k as f64);
        }
    }
    let s = series(cfg, &reqs, false)?;
    let mut pass = true;
    let mut rows = vec![];
    for (i, want) in expected.iter().enumerate() {
        let got = slope(cfg, &s, i)?;
        pass &= (got - want).abs() <= 0.05;
        rows.push(json!({"norm": s.labels[i], "slope": got, "expected": want}));
    }
    Ok(Check { pass, measured: json!(rows), tolerance: "|slope - expected| <= 0.05".into() })
}

fn optimality(cfg: &ExperimentConfig) -> Result<Check> {
    let reqs = [NormRequest::derivative(Components::N, 0, BandSel::Full), NormRequest::derivative(Components::PSI, 0, BandSel::Full)];
    let s = series(cfg, &reqs, false)?;
    let mut pass = true;
    let mut rows = vec![];
    for (i, power) in [(0, 0.75), (1, 1.25)] {
        let comp: Vec<f64> = s.times.iter().zip(&s.columns[i]).map(|(t, v)| (1.0 + t).powf(power) * v).collect();
        let lo = comp.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = comp.iter().copied().fold(0.0, f64::max);
        pass &= lo > 0.2 * hi;
        rows.push(json!({"norm": s.labels[i], "power": power, "min": lo, "max": hi, "ratio": lo / hi}));
    }
    Ok(Check { pass, measured: json!({"samples": s.times.len(), "compensated": rows}), tolerance: "min > 0.2 max".into() })
}

fn z1_scaling(cfg: &ExperimentConfig) -> Result<Check> {
    let p = np(cfg)?;
    let ts = [1e3, 4e3, 1.6e4];
    let v = ts.iter().map(|&t| Ok(z1_lower_integral(t, cfg.data.mu0, cfg.data.r0, &p)? * t.powf(1.5))).collect::<Result<Vec<f64>>>()?;
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = v.iter().copied().fold(0.0, f64::max);
    let variation = (hi - lo) / lo;
    Ok(Check { pass: lo > 0.0 && variation < 0.1, measured: json!({"t": ts, "z1_t32": v, "variation": variation}), tolerance: "variation < 10%".into() })
}

fn damping_reconstruction(cfg: &ExperimentConfig) -> Result<Check> {
    let p = np(cfg)?;
    let data = make_lowerbound_data(cfg.data.mu0, cfg.data.r0, cfg.data.big_r0)?;
    let mut pass = true;
    let mut rows = vec![];
    for t in [1.0, 10.0, 100.0] {
        let r = duhamel_reconstruct_psi(&p, &data, t)?;
        pass &= r.relative < 1e-6;
        rows.push(json!({"t": t, "relative": r.relative, "reference": r.reference}));
    }
    Ok(Check { pass, measured: json!(rows), tolerance: "relative L2 discrepancy < 1e-6".into() })
}

/// Largest relaxation time of the branch-matching study; the others are
/// one and two decades above it.
const RELAXATION_TAUS: [f64; 3] = [1.0, 0.1, 0.01];
const RELAXATION_RADII: [f64; 5] = [0.05, 0.1, 0.2, 0.5, 1.0];

fn cattaneo_fourier(cfg: &ExperimentConfig) -> Result<Check> {
    let mut reqs: Vec<NormRequest> = (0..3).map(|k| NormRequest::derivative(Components::FLUID, k, BandSel::Full)).collect();
    reqs.push(NormRequest::derivative(Components::PSI, 0, BandSel::Full));
    let cat = series(cfg, &reqs, false)?;
    let fou = series(cfg, &reqs, true)?;
    let mut pass = true;
    let mut rows = vec![];
    for i in 0..reqs.len() {
        let (a, b) = (slope(cfg, &cat, i)?, slope(cfg, &fou, i)?);
        pass &= (a - b).abs() <= 0.05;
        rows.push(json!({"norm": cat.labels[i], "cattaneo": a, "fourier": b}));
    }
    let rel = relaxation_limit(&cfg.physical.params(), &RELAXATION_TAUS, &RELAXATION_RADII)?;
    pass &= rel.min_order() >= 0.7;
    Ok(Check {
        pass,
        measured: json!({"slopes": rows, "relaxation": {"taus": rel.taus, "radii": rel.radii, "errors": rel.errors, "orders": rel.orders}}),
        tolerance: "slope gap <= 0.05; branch error order in tau >= 0.7".into(),
    })
}

fn nonlinear_invariants(cfg: &ExperimentConfig) -> Result<Check> {
    let p = np(cfg)?;
    let grid = PeriodicGrid::new(cfg.grid.n, cfg.grid.l)?;
    let spec = cfg.data.periodic();
    let eps = cfg.data.amplitude;
    let t_final = cfg.time.t_final;
    let s0 = init_state(&grid, &spec, eps, &p)?;
    let mut n_only = StateField::zeros(&grid);
    n_only.coeffs[0] = s0.coeffs[0].clone();
    let mass_scale = grid.volume().sqrt() * l2_distance(&grid, &n_only, &StateField::zeros(&grid));

    let mut mass_drift: f64 = 0.0;
    let mut entropy_rise = f64::NEG_INFINITY;
    let mut drifts = vec![];
    let mut h0 = 0.0;
    for dt in [cfg.time.dt, 0.5 * cfg.time.dt] {
        let out = run(&grid, s0.clone(), &RunConfig { t_max: t_final, policy: StepPolicy::Fixed(dt), monitor_every: 1 }, &p);
        if let Some(e) = out.error {
            return Err(anyhow!("run with dt = {dt} stopped: {e}"));
        }
        let rows = &out.report.rows;
        let first = rows.first().ok_or_else(|| anyhow!("no monitor rows"))?;
        h0 = first.entropy;
        for r in rows {
            mass_drift = mass_drift.max((r.mass - first.mass).abs() / mass_scale);
        }
        for w in rows.windows(2) {
            entropy_rise = entropy_rise.max((w[1].entropy - w[0].entropy) / first.entropy);
        }
        drifts.push((rows.last().expect("nonempty").energy - first.energy).abs());
    }
    let energy_ratio = drifts[0] / drifts[1];

    let mut errs = vec![];
    for a in [eps, 0.5 * eps] {
        let init = init_state(&grid, &spec, a, &p)?;
        let lin = linear_evolve(&grid, &init, t_final, &p);
        let out = run(&grid, init, &RunConfig { t_max: t_final, policy: StepPolicy::Fixed(cfg.time.dt), monitor_every: usize::MAX }, &p);
        if let Some(e) = out.error {
            return Err(anyhow!("run at amplitude {a} stopped: {e}"));
        }
        errs.push(l2_distance(&grid, &out.state, &lin));
    }
    let lin_ratio = errs[0] / errs[1];
    let pass = mass_drift < 1e-10 && (3.0..=5.0).contains(&energy_ratio) && entropy_rise <= 1e-9 && (3.5..=4.5).contains(&lin_ratio);
    Ok(Check {
        pass,
        measured: json!({
            "n": cfg.grid.n, "amplitude": eps, "t_final": t_final, "dt": [cfg.time.dt, 0.5 * cfg.time.dt],
            "mass_drift_relative": mass_drift,
            "energy_drift": drifts, "energy_ratio": energy_ratio,
            "entropy_initial": h0, "entropy_max_step_increase_relative": entropy_rise,
            "linear_errors": errs, "linear_ratio": lin_ratio,
        }),
        tolerance: "mass < 1e-10; energy ratio in [3,5]; entropy step rise <= 1e-9 H(0); linear ratio in [3.5,4.5]".into(),
    })
}

fn norm_exactness(cfg: &ExperimentConfig) -> Result<Check> {
    let p = np(cfg)?;
    let b = bands(cfg)?;
    let rad = cfg.data.radius;
    let ind = Profile::Indicator { scale: 1.0, radius: rad };
    let n_only = RadialDataSpec::from_profiles(ind, Profile::Zero, Profile::Zero, Profile::Zero);
    let all = RadialDataSpec::from_profiles(ind, ind, ind, ind);
    let four_pi = 4.0 * PI;
    let cases: Vec<(&str, f64, f64)> = vec![
        ("n_k0", sobolev_norm(&p, &n_only, 0.0, Components::N, 0, BandSel::Full, &b)?, (four_pi * rad.powi(3) / 3.0).sqrt()),
        ("n_k1", sobolev_norm(&p, &n_only, 0.0, Components::N, 1, BandSel::Full, &b)?, (four_pi * rad.powi(5) / 5.0).sqrt()),
        ("all_k2", sobolev_norm(&p, &all, 0.0, Components::ALL, 2, BandSel::Full, &b)?, (4.0 * four_pi * rad.powi(7) / 7.0).sqrt()),
        ("n_neg1", negative_norm(&p, &n_only, 0.0, Components::N, 1.0)?, (four_pi * rad).sqrt()),
        ("psi_neg0.5", negative_norm(&p, &all, 0.0, Components::PSI, 0.5)?, (four_pi * rad * rad / 2.0).sqrt()),
    ];
    let mut worst: f64 = 0.0;
    let rows: Vec<Value> = cases
        .iter()
        .map(|(name, got, want)| {
            let rel = (got - want).abs() / want;
            worst = worst.max(rel);
            json!({"norm": name, "value": got, "closed_form": want, "relative": rel})
        })
        .collect();
    Ok(Check { pass: worst <= 1e-9, measured: json!({"cases": rows, "worst": worst}), tolerance: "relative error <= 1e-9".into() })
}
