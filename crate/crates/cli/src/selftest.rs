//! The acceptance battery: every release-gating check, each printing one
//! pass/fail line. `antiwick selftest` runs it from the CLI and the
//! `acceptance` integration test asserts it.

use antiwick::*;
use num_complex::Complex64;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::config::SweepConfig;
use crate::report::to_csv;
use crate::sweep::{ainfty_sampling, run_semiclassical, run_sweep, SweepOutcome};

/// One pass/fail line of the battery.
#[derive(Debug, Clone)]
pub struct Check {
    pub id: String,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(id: &str, name: &str, passed: bool, detail: String) -> Self {
        Check { id: id.into(), name: name.into(), passed, detail }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {:<6} {} — {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail
        )
    }
}

fn check(out: &mut Vec<Check>, id: &str, name: &str, passed: bool, detail: String) {
    out.push(Check::new(id, name, passed, detail));
}

/// Criterion 1: the oscillator symbol quantizes to diag(2h(n+1)), the
/// quadrature route agrees entrywise, and the spectral bottom is 2h.
pub fn oscillator_exactness() -> Vec<Check> {
    let mut out = Vec::new();
    for &h in &[0.1, 1.0] {
        let sym = Symbol::mod_z_squared(1);
        let poly = match assemble_polynomial(&sym, h, 32) {
            Ok(op) => op,
            Err(e) => {
                check(&mut out, "C1", "oscillator exactness", false, format!("h={h}: {e}"));
                continue;
            }
        };
        let mut diag_dev = 0.0f64;
        let mut off_dev = 0.0f64;
        for m in 0..32 {
            for n in 0..32 {
                let want = if m == n { 2.0 * h * (m as f64 + 1.0) } else { 0.0 };
                let dev = (poly.matrix[(m, n)] - want).abs();
                if m == n {
                    diag_dev = diag_dev.max(dev);
                } else {
                    off_dev = off_dev.max(dev);
                }
            }
        }
        check(
            &mut out,
            "C1.1",
            "ladder route diagonal 2h(n+1)",
            diag_dev < 1e-10 && off_dev < 1e-10,
            format!("h={h}: diag dev {diag_dev:.2e}, off-diag {off_dev:.2e}"),
        );

        let frame = CoherentFrame::gaussian(h).expect("h > 0");
        let pgrid = PhaseGrid::for_modes(&frame, 32);
        match assemble_quadrature(&sym, &frame, 32, &pgrid) {
            Ok(quad) => {
                let dev = (quad.matrix.clone() - poly.matrix.clone()).amax();
                check(
                    &mut out,
                    "C1.2",
                    "quadrature route agrees entrywise",
                    dev < 1e-6,
                    format!("h={h}: max entry deviation {dev:.3e} (tol 1e-6)"),
                );
            }
            Err(e) => check(&mut out, "C1.2", "quadrature route agrees", false, e.to_string()),
        }

        match spectrum_bottom(&poly, 1) {
            Ok(res) => {
                let dev = (res.eigenvalues[0] - 2.0 * h).abs();
                check(
                    &mut out,
                    "C1.3",
                    "spectral bottom equals 2h",
                    dev < 1e-6,
                    format!("h={h}: bottom {} (dev {dev:.2e})", res.eigenvalues[0]),
                );
            }
            Err(e) => check(&mut out, "C1.3", "spectral bottom equals 2h", false, e.to_string()),
        }
    }
    out
}

/// Criterion 2: the quadratic form of |z|² is ≥ 2h on unit states, with
/// equality at the ground Gaussian.
pub fn heisenberg_lower_bound(seed: u64) -> Vec<Check> {
    let mut out = Vec::new();
    let h = 1.0;
    let frame = CoherentFrame::gaussian(h).expect("h > 0");
    let n_modes = 16;
    let grid = SpatialGrid::for_task(h, 0.0, 6.0 * h.sqrt(), n_modes);
    let pgrid = PhaseGrid::for_modes(&frame, n_modes);
    let sym = Symbol::mod_z_squared(1);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_margin = f64::INFINITY;
    let mut failures = 0;
    for _ in 0..100 {
        let mut coeffs: Vec<Complex64> = (0..n_modes)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let norm: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        for c in coeffs.iter_mut() {
            *c /= norm;
        }
        let f = StateVector::from_hermite(&frame, &coeffs, grid.clone()).expect("grid sized");
        match quadratic_form(&sym, &frame, &f, &pgrid) {
            Ok(q) => {
                worst_margin = worst_margin.min(q - 2.0 * h);
                if q < 2.0 * h - 1e-5 {
                    failures += 1;
                }
            }
            Err(_) => failures += 1,
        }
    }
    check(
        &mut out,
        "C2.1",
        "Q ≥ 2h on 100 seeded unit states",
        failures == 0,
        format!("worst margin {worst_margin:.3e} (allowed ≥ -1e-5)"),
    );

    for &hh in &[0.25, 1.0] {
        let frame = CoherentFrame::gaussian(hh).expect("h > 0");
        let grid = SpatialGrid::for_task(hh, 0.0, 5.0 * hh.sqrt(), 1);
        let pgrid = PhaseGrid::for_modes(&frame, 1);
        let ground = coherent_state(&frame, 0.0, 0.0, &grid).expect("grid sized");
        let q = quadratic_form(&sym, &frame, &ground, &pgrid).expect("form evaluates");
        check(
            &mut out,
            "C2.2",
            "equality at the ground Gaussian",
            (q - 2.0 * hh).abs() < 1e-5,
            format!("h={hh}: Q = {q} vs 2h = {}", 2.0 * hh),
        );
    }
    out
}

fn per_symbol_ratios<'a>(
    sweep: &'a SweepOutcome,
    id: &str,
    take: impl Fn(&GapReport) -> Option<f64>,
) -> Vec<(f64, f64)> {
    sweep
        .rows
        .iter()
        .filter(|r| r.symbol_id == id)
        .filter_map(|r| take(r).map(|v| (r.h, v)))
        .collect()
}

use crate::report::GapReport;

/// Criterion 3: the h-uniform two-sided band: per suite symbol the ratio
/// bottom/λ varies by at most 1.25× across three decades of h, and equals
/// 4.0 ± 2% for the oscillator symbol.
pub fn h_uniform_band(sweep: &SweepOutcome) -> Vec<Check> {
    let mut out = Vec::new();
    check(
        &mut out,
        "C3.0",
        "sweep completed",
        sweep.failed_rows == 0,
        format!("{} rows, {} failed", sweep.rows.len(), sweep.failed_rows),
    );
    let ids: Vec<String> = {
        let mut seen = Vec::new();
        for r in &sweep.rows {
            if !seen.contains(&r.symbol_id) {
                seen.push(r.symbol_id.clone());
            }
        }
        seen
    };
    for id in &ids {
        let ratios = per_symbol_ratios(sweep, id, |r| r.ratio);
        if ratios.len() != 7 {
            check(
                &mut out,
                "C3.1",
                "ratio defined at every h",
                false,
                format!("{id}: only {} of 7 ratios", ratios.len()),
            );
            continue;
        }
        let max = ratios.iter().map(|(_, v)| *v).fold(f64::MIN, f64::max);
        let min = ratios.iter().map(|(_, v)| *v).fold(f64::MAX, f64::min);
        let spread = max / min;
        check(
            &mut out,
            "C3.1",
            "h-uniform ratio band (max/min ≤ 1.25)",
            spread <= 1.25 && min > 0.0,
            format!("{id}: ratio ∈ [{min:.6}, {max:.6}], spread {spread:.4}"),
        );
    }
    let hosc = per_symbol_ratios(sweep, "hosc", |r| r.ratio);
    let ok = hosc.iter().all(|(_, v)| (v - 4.0).abs() <= 0.02 * 4.0);
    let worst = hosc
        .iter()
        .map(|(_, v)| (v - 4.0).abs())
        .fold(0.0f64, f64::max);
    check(
        &mut out,
        "C3.2",
        "oscillator ratio = 4.0 ± 2% at every h",
        ok && hosc.len() == 7,
        format!("worst |ratio − 4| = {worst:.4}"),
    );
    out
}

/// Criterion 4: closed-form gap functionals.
pub fn gap_closed_forms() -> Vec<Check> {
    let mut out = Vec::new();
    let cfg = SearchConfig::default();
    for &h in &[0.01, 1.0] {
        let lam = lambda_gap(&Symbol::mod_z_squared(1), h, &cfg).expect("search runs");
        check(
            &mut out,
            "C4.1",
            "λ(|z|², h) = h/2 ± 0.1%",
            (lam.value - h / 2.0).abs() <= 1e-3 * h,
            format!("h={h}: λ = {} vs {}", lam.value, h / 2.0),
        );
        let lam = lambda_gap(&Symbol::x_squared(), h, &cfg).expect("search runs");
        check(
            &mut out,
            "C4.2",
            "λ(x², h) = h/4 ± 1%",
            (lam.value - h / 4.0).abs() <= 0.01 * h / 4.0,
            format!("h={h}: λ = {} vs {}", lam.value, h / 4.0),
        );
        let sup = lambda_sup_gap(&Symbol::mod_z_squared(1), h, &cfg).expect("search runs");
        check(
            &mut out,
            "C4.3",
            "λ′(|z|², h) = h ± 2%",
            (sup.value - h).abs() <= 0.02 * h,
            format!("h={h}: λ′ = {}", sup.value),
        );
    }
    let prof = c_r_profile(&Symbol::mod_z_squared(1), &[0.25, 0.5, 1.0], &cfg, 1.0)
        .expect("profile runs");
    for (r, est) in &prof {
        let want = r * r / 2.0;
        check(
            &mut out,
            "C4.4",
            "C_r(|z|²) = r²/2 ± 0.5%",
            (est.value - want).abs() <= 5e-3 * want,
            format!("r={r}: C_r = {} vs {want}", est.value),
        );
    }
    out
}

/// Criterion 5: the essential-spectrum case x²: truncated bottoms, the
/// ess-gap closed form, and the h-uniform ess ratio.
pub fn essential_spectrum_case(sweep: &SweepOutcome) -> Vec<Check> {
    let mut out = Vec::new();
    let mut bottoms = Vec::new();
    for &n_b in &[64usize, 128, 256] {
        let op = assemble_polynomial(&Symbol::x_squared(), 1.0, n_b).expect("assembles");
        bottoms.push(spectrum_bottom(&op, 1).expect("solves").eigenvalues[0]);
    }
    let fin = bottoms[2];
    check(
        &mut out,
        "C5.1",
        "x² truncated bottom in (0.5, 0.53) at N_b=256",
        fin > 0.5 && fin < 0.53,
        format!("bottoms {bottoms:?}"),
    );
    check(
        &mut out,
        "C5.2",
        "bottom decreases monotonically along (64,128,256)",
        bottoms[0] > bottoms[1] && bottoms[1] > bottoms[2],
        format!("{} > {} > {}", bottoms[0], bottoms[1], bottoms[2]),
    );

    let ess = per_symbol_ratios(sweep, "xsq", |r| r.lambda_ess);
    let ok = ess
        .iter()
        .all(|(h, v)| (v - h / 4.0).abs() <= 0.01 * h / 4.0);
    check(
        &mut out,
        "C5.3",
        "λ_ess(x², h) = h/4 ± 1% across the sweep",
        ok && ess.len() == 7,
        format!(
            "worst rel dev {:.4e}",
            ess.iter()
                .map(|(h, v)| ((v - h / 4.0) / (h / 4.0)).abs())
                .fold(0.0f64, f64::max)
        ),
    );

    let ratios = per_symbol_ratios(sweep, "xsq", |r| r.ess_ratio);
    let in_band = ratios.iter().all(|(_, v)| (v - 2.0).abs() <= 0.05 * 2.0);
    let max = ratios.iter().map(|(_, v)| *v).fold(f64::MIN, f64::max);
    let min = ratios.iter().map(|(_, v)| *v).fold(f64::MAX, f64::min);
    check(
        &mut out,
        "C5.4",
        "ess-ratio = 2.0 ± 5%, h-uniform (max/min ≤ 1.1)",
        in_band && ratios.len() == 7 && max / min <= 1.1,
        format!("ess-ratio ∈ [{min:.5}, {max:.5}]"),
    );
    out
}

/// Criterion 6: the discreteness verdicts on default shells.
pub fn discreteness_criterion() -> Vec<Check> {
    let mut out = Vec::new();
    let cfg = SearchConfig::default();
    for &h in &[0.1, 1.0] {
        let shells = default_shells(h);
        let cases = [
            (Symbol::mod_z_squared(1), Discreteness::Discrete),
            (Symbol::radial_power(2.0), Discreteness::Discrete),
            (Symbol::x_squared(), Discreteness::NotDiscrete),
            (Symbol::constant(1.0), Discreteness::NotDiscrete),
        ];
        for (sym, want) in cases {
            match discreteness_indicator(&sym, h, &shells, &cfg) {
                Ok((got, _)) => check(
                    &mut out,
                    "C6",
                    "discreteness verdict",
                    got == want,
                    format!("h={h} {}: {got} (want {want})", sym.id),
                ),
                Err(e) => check(&mut out, "C6", "discreteness verdict", false, e.to_string()),
            }
        }
    }
    out
}

/// Criterion 7: the semiclassical band bottom/λ′ = 2.0 ± 5% for the
/// oscillator symbol, holding without any h^N slack.
pub fn semiclassical_band() -> Vec<Check> {
    let mut out = Vec::new();
    let mut cfg = SweepConfig::default_semiclassical();
    cfg.nb_ladder = vec![32, 64];
    let res = match run_semiclassical(&cfg, 4) {
        Ok(r) => r,
        Err(e) => {
            check(&mut out, "C7", "semiclassical pipeline", false, e.to_string());
            return out;
        }
    };
    check(
        &mut out,
        "C7.0",
        "semiclassical sweep completed",
        res.failed_rows == 0,
        format!("{} rows, {} failed", res.rows.len(), res.failed_rows),
    );
    let hosc: Vec<&GapReport> = res.rows.iter().filter(|r| r.symbol_id == "hosc").collect();
    let in_band = hosc
        .iter()
        .all(|r| r.ratio.map(|v| (v - 2.0).abs() <= 0.05 * 2.0).unwrap_or(false));
    check(
        &mut out,
        "C7.1",
        "bottom/λ′ = 2.0 ± 5% at every h (no slack used)",
        in_band && hosc.len() == 7,
        format!(
            "ratios {:?}",
            hosc.iter().map(|r| r.ratio.unwrap_or(f64::NAN)).collect::<Vec<_>>()
        ),
    );
    let slack_ok = hosc.iter().all(|r| {
        r.caveats.iter().any(|c| {
            c.strip_prefix("slack=")
                .and_then(|s| s.parse::<f64>().ok())
                .map(|v| (v - r.h.powi(4).max(1e-12)).abs() <= 1e-9 * v.max(1e-12))
                .unwrap_or(false)
        })
    });
    check(
        &mut out,
        "C7.2",
        "h^N slack column recorded (N = 4)",
        slack_ok,
        "slack = max(h^4, 1e-12) per row".into(),
    );
    let xsq = res.rows.iter().filter(|r| r.symbol_id == "xsq");
    let ess_ok = xsq
        .clone()
        .all(|r| r.ess_ratio.map(|v| (v - 0.5).abs() <= 0.05 * 0.5).unwrap_or(false));
    check(
        &mut out,
        "C7.3",
        "x² analytic ess-bottom vs λ′_ess = 0.5 ± 5%",
        ess_ok && xsq.count() == 7,
        "h/2 against the sup-shell estimator".into(),
    );
    out
}

/// Criterion 8: structural invariant battery.
pub fn structural_invariants(seed: u64) -> Vec<Check> {
    let mut out = Vec::new();
    let h = 0.5;
    let frame = CoherentFrame::gaussian(h).expect("h > 0");

    // hermiticity + positivity across routes
    let ops = [
        assemble_polynomial(&Symbol::mod_z_squared(1), h, 32).expect("assembles"),
        assemble_polynomial(&Symbol::x_squared(), h, 32).expect("assembles"),
        assemble_radial(&Symbol::radial_power(0.5), h, 32, &RadialQuadrature::default())
            .expect("assembles"),
        assemble_radial(&Symbol::radial_power(2.0), h, 32, &RadialQuadrature::default())
            .expect("assembles"),
    ];
    let worst_sym = ops.iter().map(|o| o.symmetry_residue()).fold(0.0f64, f64::max);
    check(
        &mut out,
        "C8.1",
        "hermiticity (symmetry residue < 1e-10)",
        worst_sym < 1e-10,
        format!("worst residue {worst_sym:.2e}"),
    );
    let worst_eig = ops
        .iter()
        .map(|o| spectrum_bottom(o, 1).expect("solves").eigenvalues[0])
        .fold(f64::INFINITY, f64::min);
    check(
        &mut out,
        "C8.2",
        "positivity (min eigenvalue ≥ -1e-8)",
        worst_eig >= -1e-8,
        format!("worst min eigenvalue {worst_eig:.3e}"),
    );

    // monotonicity in the symbol
    let bx = spectrum_bottom(&ops[1], 1).expect("solves").eigenvalues[0];
    let bz = spectrum_bottom(&ops[0], 1).expect("solves").eigenvalues[0];
    check(
        &mut out,
        "C8.3",
        "monotonicity (x² ≤ |z|² ⇒ bottoms ordered)",
        bx <= bz + 1e-8,
        format!("{bx} ≤ {bz}"),
    );

    // linearity on the quadrature route
    let pg = PhaseGrid::for_modes(&frame, 6);
    let qa = assemble_quadrature(&Symbol::constant(1.0), &frame, 6, &pg).expect("assembles");
    let qb = assemble_quadrature(&Symbol::mod_z_squared(1), &frame, 6, &pg).expect("assembles");
    let combo = Symbol::generic("1+|z|^2", |x, w, _| 1.0 + x[0] * x[0] + w[0] * w[0]);
    let qc = assemble_quadrature(&combo, &frame, 6, &pg).expect("assembles");
    let lin_dev = (qc.matrix.clone() - (qa.matrix.clone() + qb.matrix.clone())).amax();
    check(
        &mut out,
        "C8.4",
        "linearity of assembly",
        lin_dev < 1e-8,
        format!("max deviation {lin_dev:.2e}"),
    );

    // rescaling identity at the operator level
    let op_h = assemble_polynomial(&Symbol::mod_z_squared(1), h, 16).expect("assembles");
    let op_1 = assemble_polynomial(&Symbol::mod_z_squared(1).rescaled(h.sqrt()), 1.0, 16)
        .expect("assembles");
    let d = (spectrum_bottom(&op_h, 1).expect("solves").eigenvalues[0]
        - spectrum_bottom(&op_1, 1).expect("solves").eigenvalues[0])
        .abs();
    check(
        &mut out,
        "C8.5",
        "rescaling identity min-eig(a, h) = min-eig(a(√h·), 1)",
        d < 1e-6,
        format!("deviation {d:.2e}"),
    );

    // Parseval and reproducing defects
    let frame1 = CoherentFrame::gaussian(1.0).expect("h > 0");
    let grid = SpatialGrid::for_task(1.0, 0.0, 7.0, 6);
    let ground = coherent_state(&frame1, 0.0, 0.0, &grid).expect("grid sized");
    let pg1 = PhaseGrid::for_modes(&frame1, 1);
    let pd = parseval_defect(&frame1, &ground, &pg1).expect("defect evaluates");
    check(
        &mut out,
        "C8.6",
        "Parseval defect < 1e-6",
        pd < 1e-6,
        format!("defect {pd:.3e}"),
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let mut coeffs: Vec<Complex64> = (0..6)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    for c in coeffs.iter_mut() {
        *c /= norm;
    }
    let f = StateVector::from_hermite(&frame1, &coeffs, grid).expect("grid sized");
    let pg6 = PhaseGrid::for_modes(&frame1, 6);
    let rd = reproducing_defect(&frame1, &f, &pg6).expect("defect evaluates");
    check(
        &mut out,
        "C8.7",
        "reproducing defect < 1e-4",
        rd < 1e-4,
        format!("defect {rd:.3e}"),
    );

    // variational monotonicity
    let mono = converge_bottom(&Symbol::x_squared(), &frame1, &[32, 64, 128])
        .expect("ladder runs")
        .monotone;
    check(&mut out, "C8.8", "variational monotonicity", mono, "x² ladder (32,64,128)".into());

    // determinism of reports: identical bytes across runs and worker counts
    let mut tiny = SweepConfig::default_suite();
    tiny.symbols.retain(|s| s.id == "hosc" || s.id == "xsq");
    tiny.h_values = vec![0.1, 1.0];
    tiny.nb_ladder = vec![16, 32];
    let a = run_sweep(&tiny).map(|o| to_csv(&o.rows));
    let b = run_sweep(&tiny).map(|o| to_csv(&o.rows));
    let mut tiny1 = tiny.clone();
    tiny1.workers = 1;
    let c = run_sweep(&tiny1).map(|o| to_csv(&o.rows));
    let det = match (&a, &b, &c) {
        (Ok(a), Ok(b), Ok(c)) => a == b && a == c,
        _ => false,
    };
    check(
        &mut out,
        "C8.9",
        "deterministic reports (reruns and worker counts)",
        det,
        "byte-identical CSV".into(),
    );
    out
}

/// Criterion 9: A∞ diagnostics finite and sampling-stable for the singular
/// suite weights, exactly 1 for constants.
pub fn ainfty_diagnostics() -> Vec<Check> {
    let mut out = Vec::new();
    let (centers, radii) = ainfty_sampling(8);
    let z_inv = Symbol::abs_power(
        1,
        RealPoly { terms: vec![(vec![2, 0], 1.0), (vec![0, 2], 1.0)] },
        -0.5,
    )
    .with_id("|z|^-1");
    let pow_m04 = Symbol::radial_power(-0.4).with_id("pow-m04");
    for sym in [&z_inv, &pow_m04] {
        let base = ainfty_constant_sampled(sym, 2.0, &centers, &radii, 1.0, 32, 16);
        let fine = ainfty_constant_sampled(sym, 2.0, &centers, &radii, 1.0, 64, 32);
        match (base, fine) {
            (Ok(b), Ok(f)) => {
                let finite = b.constant_estimate.is_finite() && b.constant_estimate >= 1.0;
                let drift =
                    (f.constant_estimate - b.constant_estimate).abs() / b.constant_estimate;
                check(
                    &mut out,
                    "C9.1",
                    "A₂ estimate finite and stable under 2× sampling",
                    finite && drift <= 0.10,
                    format!(
                        "{}: estimate {:.6}, refined {:.6}, drift {:.3}",
                        sym.id, b.constant_estimate, f.constant_estimate, drift
                    ),
                );
            }
            (b, f) => check(
                &mut out,
                "C9.1",
                "A₂ estimate finite and stable",
                false,
                format!("{}: {:?} / {:?}", sym.id, b.err(), f.err()),
            ),
        }
    }
    for &c in &[1.0, 7.5] {
        let rep = ainfty_constant(&Symbol::constant(c), 2.0, &centers, &radii, 1.0)
            .expect("constant weight");
        check(
            &mut out,
            "C9.2",
            "constants give A_p constant exactly 1",
            (rep.constant_estimate - 1.0).abs() < 1e-12,
            format!("c={c}: estimate {}", rep.constant_estimate),
        );
    }
    out
}

/// Run the whole battery; the sweep backing criteria 3 and 5 runs once.
pub fn run_all(seed: u64) -> Vec<Check> {
    let mut checks = Vec::new();
    checks.extend(oscillator_exactness());
    checks.extend(heisenberg_lower_bound(seed));
    let sweep = run_sweep(&SweepConfig::default_suite());
    match sweep {
        Ok(sweep) => {
            checks.extend(h_uniform_band(&sweep));
            checks.extend(essential_spectrum_case(&sweep));
        }
        Err(e) => {
            checks.push(Check::new("C3", "standard sweep", false, e.to_string()));
            checks.push(Check::new("C5", "standard sweep", false, e.to_string()));
        }
    }
    checks.extend(gap_closed_forms());
    checks.extend(discreteness_criterion());
    checks.extend(semiclassical_band());
    checks.extend(structural_invariants(seed));
    checks.extend(ainfty_diagnostics());
    checks
}
