//! Experiment pipelines: assembly → eigensolve → gap estimation per
//! (symbol, h) pair, with per-row failure isolation and a deterministic
//! ordered merge.

use antiwick::{
    ainfty_constant_sampled, converge_bottom, estimate_gap_values, CoherentFrame, GapValues,
    SpectrumResult, Symbol,
};
use rayon::prelude::*;
use std::time::Instant;

use crate::config::{ConfigError, KindSpec, SweepConfig, SymbolSpec};
use crate::report::{AinftyRow, GapReport, ProfileRow};

/// Result of a pipeline run; failures are isolated per row.
#[derive(Debug, Clone)]
pub struct SweepOutcome {
    pub rows: Vec<GapReport>,
    pub profiles: Vec<ProfileRow>,
    pub failed_rows: usize,
}

/// Quadrature-route assemblies above this basis size are outside desk scale;
/// ladders for unstructured symbols are capped here and the cap is recorded.
const QUADRATURE_NB_CAP: usize = 64;

fn effective_ladder(spec: &SymbolSpec, ladder: &[usize]) -> (Vec<usize>, bool) {
    let structured = !matches!(spec.kind, KindSpec::AbsPower { .. });
    if structured {
        return (ladder.to_vec(), false);
    }
    let mut capped: Vec<usize> = ladder.iter().map(|&n| n.min(QUADRATURE_NB_CAP)).collect();
    capped.dedup();
    let changed = capped != ladder;
    (capped, changed)
}

struct RowData {
    conv: SpectrumResult,
    gap: GapValues,
    nb_capped: bool,
}

fn compute_row(cfg: &SweepConfig, spec: &SymbolSpec, h: f64) -> Result<RowData, String> {
    let sym: Symbol = spec.to_symbol().map_err(|e| e.to_string())?;
    let frame = CoherentFrame::gaussian(h).map_err(|e| e.to_string())?;
    let (ladder, nb_capped) = effective_ladder(spec, &cfg.nb_ladder);
    let conv = converge_bottom(&sym, &frame, &ladder).map_err(|e| e.to_string())?;
    let shells = cfg.search.shells_for(h);
    let gap = estimate_gap_values(&sym, h, &shells, &cfg.search.to_core())
        .map_err(|e| e.to_string())?;
    Ok(RowData { conv, gap, nb_capped })
}

fn guarded_ratio(num: f64, den: f64) -> Option<f64> {
    if den.is_finite() && den > 1e-300 && num.is_finite() {
        Some(num / den)
    } else {
        None
    }
}

fn finish_row(
    cfg: &SweepConfig,
    spec: &SymbolSpec,
    h: f64,
    data: Result<RowData, String>,
    started: Instant,
) -> (GapReport, Vec<ProfileRow>) {
    let runtime_ms = if cfg.record_timings {
        started.elapsed().as_millis() as u64
    } else {
        0
    };
    match data {
        Ok(RowData { conv, gap, nb_capped }) => {
            let bottom = conv.eigenvalues[0];
            let shift = spec.shift;
            let mut caveats = Vec::new();
            if shift != 0.0 {
                caveats.push(format!("shift-normalized(inf={shift})"));
            }
            if gap.lambda_truncated {
                caveats.push("box-truncated".into());
            }
            if gap.lambda_ess_divergent {
                caveats.push("ess-divergent".into());
            }
            if gap.lambda_sup_ess_divergent {
                caveats.push("sup-ess-divergent".into());
            }
            if !conv.converged {
                caveats.push("unconverged".into());
            }
            if nb_capped {
                caveats.push(format!("nb-capped-quadrature({QUADRATURE_NB_CAP})"));
            }
            let ratio = guarded_ratio(bottom - shift, gap.lambda - shift);
            if ratio.is_none() {
                caveats.push("ratio-undefined".into());
            }
            let ess_ratio = spec.analytic_ess.and_then(|a| {
                if gap.lambda_ess_divergent {
                    None
                } else {
                    guarded_ratio(a.value(h) - shift, gap.lambda_ess - shift)
                }
            });
            let mut profiles = Vec::new();
            for p in &gap.ess_profile {
                profiles.push(ProfileRow {
                    symbol_id: spec.id.clone(),
                    h,
                    estimator: "lambda_ess".into(),
                    shell_radius: p.radius,
                    value: p.value,
                });
            }
            for p in &gap.sup_ess_profile {
                profiles.push(ProfileRow {
                    symbol_id: spec.id.clone(),
                    h,
                    estimator: "lambda_sup_ess".into(),
                    shell_radius: p.radius,
                    value: p.value,
                });
            }
            (
                GapReport {
                    symbol_id: spec.id.clone(),
                    h,
                    n_b: conv.n_basis,
                    spec_bottom: Some(bottom),
                    lambda: Some(gap.lambda),
                    lambda_ess: Some(gap.lambda_ess),
                    lambda_sup: Some(gap.lambda_sup),
                    lambda_sup_ess: Some(gap.lambda_sup_ess),
                    ratio,
                    ess_ratio,
                    converged: conv.converged,
                    caveats,
                    runtime_ms,
                    error: None,
                },
                profiles,
            )
        }
        Err(message) => (
            GapReport {
                symbol_id: spec.id.clone(),
                h,
                n_b: 0,
                spec_bottom: None,
                lambda: None,
                lambda_ess: None,
                lambda_sup: None,
                lambda_sup_ess: None,
                ratio: None,
                ess_ratio: None,
                converged: false,
                caveats: Vec::new(),
                runtime_ms,
                error: Some(message),
            },
            Vec::new(),
        ),
    }
}

fn with_pool<T: Send>(workers: usize, job: impl FnOnce() -> T + Send) -> T {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("thread pool");
    pool.install(job)
}

/// Full pipeline over the configured suite: one report row per (symbol, h),
/// ordered by (symbol index, h index) regardless of the worker count.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepOutcome, ConfigError> {
    cfg.validate()?;
    let jobs: Vec<(usize, usize)> = (0..cfg.symbols.len())
        .flat_map(|s| (0..cfg.h_values.len()).map(move |k| (s, k)))
        .collect();
    let results: Vec<(GapReport, Vec<ProfileRow>)> = with_pool(cfg.workers, || {
        jobs.par_iter()
            .map(|&(s, k)| {
                let spec = &cfg.symbols[s];
                let h = cfg.h_values[k];
                let started = Instant::now();
                let data = compute_row(cfg, spec, h);
                finish_row(cfg, spec, h, data, started)
            })
            .collect()
    });
    let mut rows = Vec::with_capacity(results.len());
    let mut profiles = Vec::new();
    for (row, mut prof) in results {
        rows.push(row);
        profiles.append(&mut prof);
    }
    let failed_rows = rows.iter().filter(|r| r.error.is_some()).count();
    Ok(SweepOutcome { rows, profiles, failed_rows })
}

/// Estimator-only pipeline (no assembly or eigensolve).
pub fn run_gap_only(cfg: &SweepConfig) -> Result<SweepOutcome, ConfigError> {
    cfg.validate()?;
    let jobs: Vec<(usize, usize)> = (0..cfg.symbols.len())
        .flat_map(|s| (0..cfg.h_values.len()).map(move |k| (s, k)))
        .collect();
    let results: Vec<(GapReport, Vec<ProfileRow>)> = with_pool(cfg.workers, || {
        jobs.par_iter()
            .map(|&(s, k)| {
                let spec = &cfg.symbols[s];
                let h = cfg.h_values[k];
                let started = Instant::now();
                let data: Result<GapValues, String> = spec
                    .to_symbol()
                    .map_err(|e| e.to_string())
                    .and_then(|sym| {
                        estimate_gap_values(
                            &sym,
                            h,
                            &cfg.search.shells_for(h),
                            &cfg.search.to_core(),
                        )
                        .map_err(|e| e.to_string())
                    });
                let runtime_ms = if cfg.record_timings {
                    started.elapsed().as_millis() as u64
                } else {
                    0
                };
                match data {
                    Ok(gap) => {
                        let mut caveats = vec!["estimators-only".to_string()];
                        if gap.lambda_truncated {
                            caveats.push("box-truncated".into());
                        }
                        if gap.lambda_ess_divergent {
                            caveats.push("ess-divergent".into());
                        }
                        let mut profiles = Vec::new();
                        for p in &gap.ess_profile {
                            profiles.push(ProfileRow {
                                symbol_id: spec.id.clone(),
                                h,
                                estimator: "lambda_ess".into(),
                                shell_radius: p.radius,
                                value: p.value,
                            });
                        }
                        for p in &gap.sup_ess_profile {
                            profiles.push(ProfileRow {
                                symbol_id: spec.id.clone(),
                                h,
                                estimator: "lambda_sup_ess".into(),
                                shell_radius: p.radius,
                                value: p.value,
                            });
                        }
                        (
                            GapReport {
                                symbol_id: spec.id.clone(),
                                h,
                                n_b: 0,
                                spec_bottom: None,
                                lambda: Some(gap.lambda),
                                lambda_ess: Some(gap.lambda_ess),
                                lambda_sup: Some(gap.lambda_sup),
                                lambda_sup_ess: Some(gap.lambda_sup_ess),
                                ratio: None,
                                ess_ratio: None,
                                converged: true,
                                caveats,
                                runtime_ms,
                                error: None,
                            },
                            profiles,
                        )
                    }
                    Err(message) => (
                        GapReport {
                            symbol_id: spec.id.clone(),
                            h,
                            n_b: 0,
                            spec_bottom: None,
                            lambda: None,
                            lambda_ess: None,
                            lambda_sup: None,
                            lambda_sup_ess: None,
                            ratio: None,
                            ess_ratio: None,
                            converged: false,
                            caveats: Vec::new(),
                            runtime_ms,
                            error: Some(message),
                        },
                        Vec::new(),
                    ),
                }
            })
            .collect()
    });
    let mut rows = Vec::with_capacity(results.len());
    let mut profiles = Vec::new();
    for (row, mut prof) in results {
        rows.push(row);
        profiles.append(&mut prof);
    }
    let failed_rows = rows.iter().filter(|r| r.error.is_some()).count();
    Ok(SweepOutcome { rows, profiles, failed_rows })
}

/// Semiclassical pipeline: spec_bottom against λ′ (and λ′_ess), with the
/// h^N slack recorded per row. Emits data only; the acceptance checks assert.
pub fn run_semiclassical(cfg: &SweepConfig, order: u32) -> Result<SweepOutcome, ConfigError> {
    cfg.validate()?;
    cfg.validate_semiclassical()?;
    let jobs: Vec<(usize, usize)> = (0..cfg.symbols.len())
        .flat_map(|s| (0..cfg.h_values.len()).map(move |k| (s, k)))
        .collect();
    let results: Vec<(GapReport, Vec<ProfileRow>)> = with_pool(cfg.workers, || {
        jobs.par_iter()
            .map(|&(s, k)| {
                let spec = &cfg.symbols[s];
                let h = cfg.h_values[k];
                let started = Instant::now();
                let data = compute_row(cfg, spec, h);
                let (mut row, profiles) = finish_row(cfg, spec, h, data, started);
                // λ′ replaces λ in the reported comparison
                if row.error.is_none() {
                    let shift = spec.shift;
                    row.ratio = row.spec_bottom.and_then(|b| {
                        row.lambda_sup.and_then(|l| guarded_ratio(b - shift, l - shift))
                    });
                    row.ess_ratio = spec.analytic_ess.and_then(|a| {
                        row.lambda_sup_ess
                            .and_then(|l| guarded_ratio(a.value(h) - shift, l - shift))
                    });
                    let slack = h.powi(order as i32).max(1e-12);
                    row.caveats.push(format!("slack={}", crate::report::sig12(slack)));
                }
                (row, profiles)
            })
            .collect()
    });
    let mut rows = Vec::with_capacity(results.len());
    let mut profiles = Vec::new();
    for (row, mut prof) in results {
        rows.push(row);
        profiles.append(&mut prof);
    }
    let failed_rows = rows.iter().filter(|r| r.error.is_some()).count();
    Ok(SweepOutcome { rows, profiles, failed_rows })
}

/// Scale-coherent sampling for the A∞ diagnostics: centers on geometric
/// rings, radii on a matching geometric ladder. Refinement (for stability
/// probes) tightens the ball quadrature and the ring angle count without
/// changing the center/radius geometry, so the sampled supremum is not
/// chased toward slowly-attained configurations.
pub fn ainfty_sampling(ring_angles: usize) -> (Vec<(f64, f64)>, Vec<f64>) {
    let mut centers = vec![(0.0, 0.0)];
    for &rho in &[0.25f64, 0.5, 1.0, 2.0, 4.0] {
        for j in 0..ring_angles {
            let th = std::f64::consts::TAU * j as f64 / ring_angles as f64;
            centers.push((rho * th.cos(), rho * th.sin()));
        }
    }
    (centers, vec![0.1, 0.25, 0.5, 1.0, 2.0, 4.0])
}

/// Weight diagnostics for every configured symbol over the default exponent
/// sweep p ∈ {2, 4, 8} (the underlying condition is existential in p, so the
/// smallest sampled constant is the interesting one).
pub fn run_ainfty(cfg: &SweepConfig) -> Result<Vec<AinftyRow>, ConfigError> {
    cfg.validate()?;
    let (centers, radii) = ainfty_sampling(8);
    let mut rows = Vec::new();
    for spec in &cfg.symbols {
        let sym = spec.to_symbol()?;
        for &p in &[2.0, 4.0, 8.0] {
            let rep = ainfty_constant_sampled(&sym, p, &centers, &radii, 1.0, 32, 16)
                .map_err(|e| ConfigError::Field {
                    field: format!("symbols[{}]", spec.id),
                    message: e.to_string(),
                })?;
            rows.push(AinftyRow {
                symbol_id: spec.id.clone(),
                p,
                constant_estimate: rep.constant_estimate,
                n_balls: rep.n_balls_sampled,
                worst_center: [rep.worst_ball.center[0], rep.worst_ball.center[1]],
                worst_radius: rep.worst_ball.radius,
                radius_range: rep.radius_range,
            });
        }
    }
    Ok(rows)
}

/// Assemble and export one operator per (symbol, h) at the final ladder rung.
pub fn run_quantize(
    cfg: &SweepConfig,
    out_dir: &std::path::Path,
) -> Result<Vec<std::path::PathBuf>, ConfigError> {
    cfg.validate()?;
    let mut written = Vec::new();
    for spec in &cfg.symbols {
        let sym = spec.to_symbol()?;
        let (ladder, _) = effective_ladder(spec, &cfg.nb_ladder);
        let n_b = *ladder.last().unwrap();
        for (k, &h) in cfg.h_values.iter().enumerate() {
            let frame = CoherentFrame::gaussian(h).map_err(|e| ConfigError::Field {
                field: "h_values".into(),
                message: e.to_string(),
            })?;
            let op = antiwick::assemble_auto(&sym, &frame, n_b).map_err(|e| {
                ConfigError::Field {
                    field: format!("symbols[{}]", spec.id),
                    message: e.to_string(),
                }
            })?;
            let safe: String = spec
                .id
                .chars()
                .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '_' })
                .collect();
            let path = out_dir.join(format!("{safe}_h{k:02}.op.txt"));
            antiwick::quantize::export_operator_text(&op, &path).map_err(|e| {
                ConfigError::Io { path: path.display().to_string(), message: e.to_string() }
            })?;
            written.push(path);
        }
    }
    Ok(written)
}
