//! One function per CLI command. Each writes `<stem>.csv`, `<stem>.json`
//! (with the resolved config) and, where a plot makes sense, `<stem>.gp`
//! into the output directory, and returns the JSON summary plus whether the
//! command's own checks passed.

use std::path::Path;

use anyhow::{bail, Result};
use cattaneo_core::fit::fit_decay;
use cattaneo_core::fouriermodel::{evolve_series_fourier, relaxation_limit};
use cattaneo_core::green::{green_auto, green_expm, green_explicit, green_lowfreq_leading, GreenMatrix};
use cattaneo_core::linsim::{evolve_series, z1_lower_integral, BandSel, Components, Diagnostics, FrequencyBands, NormRequest, NormSeries};
use cattaneo_core::nonlinsim::{init_state, run, snapshot_bytes, PeriodicGrid, RunConfig, StepPolicy};
use cattaneo_core::symbol::{eigen_branches, log_grid, spectral_bounds, verify_expansions, Band};
use serde_json::{json, Value};

use crate::acceptance::{self, AcceptanceReport};
use crate::config::ExperimentConfig;
use crate::output::{gnuplot_script, Axes, Sink, Table};

pub struct Outcome {
    pub summary: Value,
    pub pass: bool,
}

fn ok(summary: Value) -> Outcome {
    Outcome { summary, pass: true }
}

fn sink(cfg: &ExperimentConfig, stem: &str) -> Result<Sink> {
    Sink::new(&cfg.output.dir, stem)
}

fn bands(cfg: &ExperimentConfig) -> Result<FrequencyBands> {
    Ok(FrequencyBands::new(cfg.grid.band_r0, cfg.grid.band_big_r0)?)
}

/// Tracked eigenvalue branches on the configured log grid plus the gap
/// constants derived from them.
pub fn spectrum(cfg: &ExperimentConfig) -> Result<Outcome> {
    let np = cfg.normalized()?;
    let radii = log_grid(cfg.grid.r_min, cfg.grid.r_max, cfg.grid.points);
    let tracked = eigen_branches(&radii, &np)?;
    let mut header = vec!["r".to_string(), "lambda1".into(), "lambda2".into()];
    for k in 3..=6 {
        header.push(format!("re_lambda{k}"));
        header.push(format!("im_lambda{k}"));
    }
    let mut t = Table::new(header);
    for s in &tracked.sets {
        let mut row = vec![s.r, s.lambda1, s.lambda2];
        for z in s.quartic {
            row.push(z.re);
            row.push(z.im);
        }
        t.push_floats(&row);
    }
    let out = sink(cfg, "spectrum")?;
    let csv = out.csv("", &t)?;
    let name = csv.file_name().and_then(|s| s.to_str()).unwrap_or("spectrum.csv").to_string();
    out.script(&gnuplot_script(&name, "Re lambda_k", Axes::LogX, 1, &[(4, "lambda3"), (6, "lambda4"), (8, "lambda5"), (10, "lambda6")]))?;
    let bounds = spectral_bounds(&tracked.sets, cfg.grid.band_r0, cfg.grid.band_big_r0);
    let summary = json!({
        "points": radii.len(),
        "ambiguities": tracked.ambiguities.len(),
        "bounds": match &bounds {
            Ok(b) => json!({"beta": b.beta, "R1": b.r1, "R2": b.r2, "r0": b.r0, "R0": b.big_r0}),
            Err(e) => json!({"error": e.to_string()}),
        },
    });
    out.report(cfg, &summary)?;
    Ok(Outcome { summary, pass: bounds.is_ok() && tracked.ambiguities.is_empty() })
}

pub fn verify_expansions_cmd(cfg: &ExperimentConfig) -> Result<Outcome> {
    let np = cfg.normalized()?;
    let mut t = Table::new(["band", "branch", "radius", "error", "order_to_next", "claimed"]);
    let mut pass = true;
    let mut bands_json = serde_json::Map::new();
    for (band, radii, name) in [(Band::Low, &cfg.grid.low_radii, "low"), (Band::High, &cfg.grid.high_radii, "high")] {
        let rep = verify_expansions(&np, band, radii)?;
        pass &= rep.pass();
        for b in &rep.branches {
            for (i, r) in rep.radii.iter().enumerate() {
                let order = b.orders.get(i).map(|o| o.to_string()).unwrap_or_default();
                t.push(vec![name.into(), b.branch.to_string(), r.to_string(), b.errors[i].to_string(), order, b.claimed.to_string()]);
            }
        }
        let branches: Vec<Value> = rep.branches.iter().map(|b| json!({"branch": b.branch, "claimed": b.claimed, "orders": b.orders, "pass": b.pass})).collect();
        bands_json.insert(name.into(), json!({"radii": rep.radii, "branches": branches}));
    }
    let out = sink(cfg, "expansions")?;
    out.csv("", &t)?;
    let summary = json!({"pass": pass, "bands": bands_json});
    out.report(cfg, &summary)?;
    Ok(Outcome { summary, pass })
}

/// The 8×8 Green matrix at one `(ξ, t)` by every available method.
pub fn green(cfg: &ExperimentConfig, xi: [f64; 3], t: f64) -> Result<Outcome> {
    let np = cfg.normalized()?;
    let mut mats: Vec<GreenMatrix> = vec![green_expm(xi, t, &np)];
    let explicit = green_explicit(xi, t, &np);
    if let Ok(g) = &explicit {
        mats.push(g.clone());
    }
    if let Ok(g) = green_lowfreq_leading(xi, t, &np, cfg.grid.band_r0) {
        mats.push(g);
    }
    let mut table = Table::new(["method", "row", "col", "re", "im"]);
    for m in &mats {
        for i in 0..8 {
            for j in 0..8 {
                let z = m.entries[(i, j)];
                table.push(vec![m.method.name().into(), i.to_string(), j.to_string(), z.re.to_string(), z.im.to_string()]);
            }
        }
    }
    let auto = green_auto(xi, t, &np);
    let diff = explicit.as_ref().map(|e| e.entries.max_abs_diff(&mats[0].entries)).ok();
    let out = sink(cfg, "green")?;
    out.csv("", &table)?;
    let summary = json!({
        "xi": xi, "t": t,
        "methods": mats.iter().map(|m| m.method.name()).collect::<Vec<_>>(),
        "auto_method": auto.method.name(),
        "explicit_vs_expm_max_abs": diff,
        "explicit_error": explicit.err().map(|e| e.to_string()),
    });
    out.report(cfg, &summary)?;
    Ok(ok(summary))
}

fn requests(cfg: &ExperimentConfig) -> Vec<NormRequest> {
    let mut reqs = vec![];
    for comp in [Components::FLUID, Components::PSI] {
        for &k in &cfg.requests.derivatives {
            reqs.push(NormRequest::derivative(comp, k, BandSel::Full));
        }
        for &ell in &cfg.requests.negative {
            reqs.push(NormRequest::negative(comp, ell));
        }
    }
    reqs
}

fn series_table(s: &NormSeries) -> Table {
    let mut header = vec!["t".to_string()];
    header.extend(s.labels.iter().cloned());
    let extra = s.e_k_s.is_some();
    if extra {
        header.push("E_k_s".into());
        header.push("M_t".into());
    }
    let mut t = Table::new(header);
    for i in 0..s.times.len() {
        let mut row = vec![s.times[i]];
        row.extend(s.columns.iter().map(|c| c[i]));
        if let (Some(e), Some(m)) = (&s.e_k_s, &s.m_t) {
            row.push(e[i]);
            row.push(m[i]);
        }
        t.push_floats(&row);
    }
    t
}

fn fits(cfg: &ExperimentConfig, s: &NormSeries) -> Vec<Value> {
    let w = cfg.time.fit_window;
    s.labels
        .iter()
        .zip(&s.columns)
        .map(|(l, c)| match fit_decay(&s.times, c, (w[0], w[1])) {
            Ok(f) => json!({"norm": l, "slope": f.slope, "intercept": f.intercept, "stderr": f.stderr, "n_points": f.n_points}),
            Err(e) => json!({"norm": l, "error": e.to_string()}),
        })
        .collect()
}

fn plot_all(out: &Sink, csv: &Path, s: &NormSeries, title: &str) -> Result<()> {
    let name = csv.file_name().and_then(|s| s.to_str()).unwrap_or("series.csv").to_string();
    let cols: Vec<(usize, &str)> = s.labels.iter().enumerate().map(|(i, l)| (i + 2, l.as_str())).collect();
    out.script(&gnuplot_script(&name, title, Axes::LogLog, 1, &cols))?;
    Ok(())
}

/// Whole-space norm series of the configured data with fitted exponents.
pub fn linear_decay(cfg: &ExperimentConfig) -> Result<Outcome> {
    let np = cfg.normalized()?;
    let data = cfg.data.radial()?;
    let times = log_grid(cfg.time.t_min, cfg.time.t_max, cfg.time.samples);
    let reqs = requests(cfg);
    let top = cfg.requests.derivatives.iter().copied().max().unwrap_or(0);
    let diag = (top >= 1).then_some(Diagnostics { k: 1, s: top });
    let s = evolve_series(&np, &data, &times, &reqs, &bands(cfg)?, diag)?;
    let out = sink(cfg, "linear_decay")?;
    let csv = out.csv("", &series_table(&s))?;
    plot_all(&out, &csv, &s, "norm decay")?;
    let summary = json!({"fits": fits(cfg, &s)});
    out.report(cfg, &summary)?;
    Ok(ok(summary))
}

/// Compensated norms of the lower-bound data and the `Z₁` integral.
pub fn lower_bound(cfg: &ExperimentConfig) -> Result<Outcome> {
    let np = cfg.normalized()?;
    let data = cattaneo_core::linsim::make_lowerbound_data(cfg.data.mu0, cfg.data.r0, cfg.data.big_r0)?;
    let times = log_grid(cfg.time.t_min, cfg.time.t_max, cfg.time.samples);
    let reqs = [NormRequest::derivative(Components::N, 0, BandSel::Full), NormRequest::derivative(Components::PSI, 0, BandSel::Full)];
    let s = evolve_series(&np, &data, &times, &reqs, &bands(cfg)?, None)?;
    let mut t = Table::new(["t", "n_norm", "psi_norm", "n_compensated", "psi_compensated", "z1", "z1_t32"]);
    let (mut cn, mut cp) = (vec![], vec![]);
    for (i, &tt) in times.iter().enumerate() {
        let (a, b) = (s.columns[0][i], s.columns[1][i]);
        let z = z1_lower_integral(tt, cfg.data.mu0, cfg.data.r0, &np)?;
        cn.push((1.0 + tt).powf(0.75) * a);
        cp.push((1.0 + tt).powf(1.25) * b);
        t.push_floats(&[tt, a, b, cn[i], cp[i], z, z * tt.powf(1.5)]);
    }
    let out = sink(cfg, "lower_bound")?;
    let csv = out.csv("", &t)?;
    let name = csv.file_name().and_then(|s| s.to_str()).unwrap_or("lower_bound.csv").to_string();
    out.script(&gnuplot_script(&name, "compensated norms", Axes::LogX, 1, &[(4, "n"), (5, "psi"), (7, "z1")]))?;
    let ratio = |v: &[f64]| v.iter().copied().fold(f64::INFINITY, f64::min) / v.iter().copied().fold(0.0, f64::max);
    let summary = json!({"n_min_over_max": ratio(&cn), "psi_min_over_max": ratio(&cp)});
    out.report(cfg, &summary)?;
    Ok(ok(summary))
}

pub fn compare_fourier(cfg: &ExperimentConfig) -> Result<Outcome> {
    let np = cfg.normalized()?;
    let data = cfg.data.radial()?;
    let times = log_grid(cfg.time.t_min, cfg.time.t_max, cfg.time.samples);
    let reqs = requests(cfg);
    let b = bands(cfg)?;
    let cat = evolve_series(&np, &data, &times, &reqs, &b, None)?;
    let fou = evolve_series_fourier(&np, &data, &times, &reqs, &b, None)?;
    let out = sink(cfg, "compare_fourier")?;
    out.csv("_cattaneo", &series_table(&cat))?;
    let csv = out.csv("_fourier", &series_table(&fou))?;
    plot_all(&out, &csv, &fou, "Fourier-law norms")?;
    let rel = relaxation_limit(&cfg.physical.params(), &[1.0, 0.1, 0.01], &[0.05, 0.1, 0.2, 0.5, 1.0])?;
    let mut rt = Table::new(["tau", "branch_error"]);
    for (t, e) in rel.taus.iter().zip(&rel.errors) {
        rt.push_floats(&[*t, *e]);
    }
    out.csv("_relaxation", &rt)?;
    let summary = json!({
        "cattaneo": fits(cfg, &cat),
        "fourier": fits(cfg, &fou),
        "relaxation": {"taus": rel.taus, "errors": rel.errors, "orders": rel.orders},
    });
    out.report(cfg, &summary)?;
    Ok(ok(summary))
}

/// Periodic nonlinear run with monitors and a final snapshot.
pub fn nonlinear(cfg: &ExperimentConfig) -> Result<Outcome> {
    let np = cfg.normalized()?;
    let grid = PeriodicGrid::new(cfg.grid.n, cfg.grid.l)?;
    let s0 = init_state(&grid, &cfg.data.periodic(), cfg.data.amplitude, &np)?;
    let rc = RunConfig { t_max: cfg.time.t_final, policy: StepPolicy::Fixed(cfg.time.dt), monitor_every: cfg.time.monitor_every };
    let res = run(&grid, s0, &rc, &np);
    let mut t = Table::new(["t", "mass", "energy", "entropy", "l2_primitive", "h3_n", "h3_w", "h3_phi", "h3_psi", "min_density"]);
    for r in &res.report.rows {
        t.push_floats(&[r.time, r.mass, r.energy, r.entropy, r.l2_primitive, r.h3[0], r.h3[1], r.h3[2], r.h3[3], r.min_density]);
    }
    let out = sink(cfg, "nonlinear")?;
    let csv = out.csv("", &t)?;
    let name = csv.file_name().and_then(|s| s.to_str()).unwrap_or("nonlinear.csv").to_string();
    out.script(&gnuplot_script(&name, "monitors", Axes::Linear, 1, &[(3, "energy"), (4, "entropy")]))?;
    std::fs::write(out.path(".snap"), snapshot_bytes(&grid, &res.state))?;
    let summary = json!({
        "steps": res.stats.steps, "dt_mean": res.stats.dt_mean, "final_time": res.state.time,
        "error": res.error.as_ref().map(|e| e.to_string()),
    });
    out.report(cfg, &summary)?;
    Ok(Outcome { summary, pass: res.error.is_none() })
}

pub fn fit(cfg: &ExperimentConfig, input: &Path, column: &str, window: Option<[f64; 2]>) -> Result<Outcome> {
    let times = crate::output::read_column(input, "t")?;
    let values = crate::output::read_column(input, column)?;
    let w = window.unwrap_or(cfg.time.fit_window);
    if !(w[0] < w[1]) {
        bail!("fit window must satisfy t_min < t_max");
    }
    let f = fit_decay(&times, &values, (w[0], w[1]))?;
    Ok(ok(json!({
        "input": input.display().to_string(), "column": column,
        "slope": f.slope, "intercept": f.intercept, "stderr": f.stderr, "window": f.window, "n_points": f.n_points,
    })))
}

pub fn accept(cfg: &ExperimentConfig, ids: &[u8], workers: usize) -> Result<(AcceptanceReport, Outcome)> {
    let rep = acceptance::run_acceptance_suite(cfg, ids, workers);
    let out = sink(cfg, "acceptance")?;
    let mut t = Table::new(["criterion", "name", "passed", "numeric_pass", "tolerance"]);
    for c in &rep.criteria {
        t.push(vec![c.id.to_string(), c.name.into(), c.passed.to_string(), c.numeric_pass.to_string(), c.tolerance.clone()]);
    }
    out.csv("", &t)?;
    let summary = serde_json::to_value(&rep)?;
    out.report(cfg, &summary)?;
    let pass = rep.all_passed;
    Ok((rep, Outcome { summary, pass }))
}
