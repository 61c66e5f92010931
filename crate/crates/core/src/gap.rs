//! Ball-average spectral-gap functionals on phase space.
//!
//! λ(a,h)   — inf over centers of the average of a over B(center, √h);
//! λ_ess    — liminf of the same averages as the center goes to infinity,
//!            estimated over expanding dyadic annuli;
//! λ′(a,h)  — inf over centers of the sup of a over the ball (semiclassical
//!            variant), with the liminf version λ′_ess;
//! C_r(w)   — inf over centers of the average over balls of radius r ≤ 1
//!            (C_1 is the unit-ball functional I_UP).
//!
//! The infima over all of ℝ² are truncated to a search box of half-width
//! S (default 10√h, which scales with the natural phase-space cell so the
//! estimates stay h-uniform for homogeneous symbols); boundary-attained
//! minima are flagged. Coarse grids seed a deterministic Nelder-Mead
//! refinement; ties break lexicographically so reports are bit-reproducible.

use rayon::prelude::*;

use crate::error::{CoreError, Result};
use crate::search::{nelder_mead, Bounds2};
use crate::symbol::{ball_average, BallSpec, Symbol};

/// Search-and-quadrature policy for the estimators.
#[derive(Debug, Clone)]
pub struct SearchConfig {
    /// Half-width of the center search box; None picks 10√h.
    pub box_halfwidth: Option<f64>,
    /// Coarse grid points per axis (odd counts place a node at the origin).
    pub coarse_points: usize,
    /// Nelder-Mead iteration cap per candidate.
    pub max_refine_iter: usize,
    /// How many coarse candidates are refined.
    pub refine_candidates: usize,
    /// Ball quadrature: radial shells × angular nodes.
    pub ball_shells: usize,
    pub ball_angles: usize,
    /// Boundary ring for sup estimation: node count and radius fraction
    /// (suprema of monotone radial symbols sit on the boundary).
    pub ring_angles: usize,
    pub ring_fraction: f64,
    /// Annulus sampling for the liminf shells: angles × radial offsets.
    pub shell_angles: usize,
    pub shell_radial: usize,
    /// A shell profile that grows past this factor over its first entry is
    /// flagged divergent (the +∞ case of the liminf).
    pub divergence_growth: f64,
    /// Growth factor of shell-minimum integrals that certifies "discrete".
    pub indicator_growth: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            box_halfwidth: None,
            coarse_points: 49,
            max_refine_iter: 300,
            refine_candidates: 3,
            ball_shells: 32,
            ball_angles: 16,
            ring_angles: 64,
            ring_fraction: 0.999,
            shell_angles: 48,
            shell_radial: 6,
            divergence_growth: 10.0,
            indicator_growth: 8.0,
        }
    }
}

impl SearchConfig {
    pub fn resolved_box(&self, h: f64) -> f64 {
        self.box_halfwidth.unwrap_or(10.0 * h.sqrt())
    }
}

/// Default liminf shells: dyadic multiples (4, 8, 16, 32)·√h.
pub fn default_shells(h: f64) -> Vec<f64> {
    [4.0, 8.0, 16.0, 32.0].iter().map(|k| k * h.sqrt()).collect()
}

/// Result of a box-truncated infimum search.
#[derive(Debug, Clone)]
pub struct GapEstimate {
    pub value: f64,
    pub argmin: [f64; 2],
    /// The minimizer was found against the search-box boundary, so the value
    /// is only an upper estimate of the untruncated infimum.
    pub truncated: bool,
}

/// Per-shell minimum with the center that attained it.
#[derive(Debug, Clone)]
pub struct ShellPoint {
    pub radius: f64,
    pub value: f64,
    pub argmin: [f64; 2],
}

/// Result of a liminf estimate over expanding annuli.
#[derive(Debug, Clone)]
pub struct ShellEstimate {
    /// Minimum over the final two shells.
    pub value: f64,
    pub profile: Vec<ShellPoint>,
    /// Profile grows monotonically past the configured cap: the liminf is
    /// reported as +∞ in spirit, with this finite floor attached.
    pub divergent: bool,
}

/// Everything the reporting layer needs for one (symbol, h) pair.
#[derive(Debug, Clone)]
pub struct GapValues {
    pub lambda: f64,
    pub lambda_argmin: [f64; 2],
    pub lambda_truncated: bool,
    pub lambda_ess: f64,
    pub lambda_ess_divergent: bool,
    pub lambda_sup: f64,
    pub lambda_sup_ess: f64,
    pub lambda_sup_ess_divergent: bool,
    pub ess_profile: Vec<ShellPoint>,
    pub sup_ess_profile: Vec<ShellPoint>,
}

/// Discreteness verdict from the shell-integral profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Discreteness {
    Discrete,
    NotDiscrete,
    Inconclusive,
}

impl std::fmt::Display for Discreteness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Discreteness::Discrete => write!(f, "discrete"),
            Discreteness::NotDiscrete => write!(f, "not-discrete"),
            Discreteness::Inconclusive => write!(f, "inconclusive"),
        }
    }
}

/// Inner functional evaluated per ball.
#[derive(Clone, Copy, PartialEq, Eq)]
enum BallFunctional {
    Average,
    Sup,
}

struct Evaluator<'a> {
    sym: &'a Symbol,
    h: f64,
    cfg: &'a SearchConfig,
    radius: f64,
    kind: BallFunctional,
}

impl<'a> Evaluator<'a> {
    fn eval(&self, center: [f64; 2]) -> Result<f64> {
        let ball = BallSpec::new(
            center[0],
            center[1],
            self.radius,
            self.cfg.ball_shells,
            self.cfg.ball_angles,
        );
        match self.kind {
            BallFunctional::Average => ball_average(self.sym, &ball, self.h),
            BallFunctional::Sup => {
                let mut best = f64::NEG_INFINITY;
                for (x, w, _) in ball.nodes() {
                    best = best.max(self.sym.eval(&[x], &[w], self.h)?);
                }
                // boundary ring at ring_fraction·r, angularly offset
                let rr = self.cfg.ring_fraction * self.radius;
                let dth = std::f64::consts::TAU / self.cfg.ring_angles as f64;
                for j in 0..self.cfg.ring_angles {
                    let th = (j as f64 + 0.5) * dth;
                    let (x, w) = (center[0] + rr * th.cos(), center[1] + rr * th.sin());
                    best = best.max(self.sym.eval(&[x], &[w], self.h)?);
                }
                Ok(best)
            }
        }
    }

    /// Closure view for the simplex search; the first error is parked and
    /// surfaced once the search returns.
    fn closure<'b>(
        &'b self,
        sink: &'b std::cell::RefCell<Option<CoreError>>,
    ) -> impl FnMut([f64; 2]) -> f64 + 'b {
        move |p| match self.eval(p) {
            Ok(v) => v,
            Err(e) => {
                sink.borrow_mut().get_or_insert(e);
                f64::INFINITY
            }
        }
    }
}

/// Minimize the ball functional over a clamped box with coarse seeding.
fn minimize_over_box(ev: &Evaluator<'_>, half: f64, max_iter: usize) -> Result<GapEstimate> {
    let n = ev.cfg.coarse_points.max(3);
    let step = 2.0 * half / (n - 1) as f64;
    let centers: Vec<[f64; 2]> = (0..n * n)
        .map(|idx| {
            let (i, k) = (idx / n, idx % n);
            [-half + i as f64 * step, -half + k as f64 * step]
        })
        .collect();
    let coarse: Vec<Result<f64>> = centers.par_iter().map(|c| ev.eval(*c)).collect();
    let mut scored = Vec::with_capacity(centers.len());
    for (c, v) in centers.iter().zip(coarse) {
        scored.push((v?, *c));
    }
    scored.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then(a.1[0].total_cmp(&b.1[0]))
            .then(a.1[1].total_cmp(&b.1[1]))
    });

    let bounds = Bounds2 { lo: [-half, -half], hi: [half, half] };
    let sink = std::cell::RefCell::new(None);
    let mut best: Option<([f64; 2], f64)> = None;
    for (_, seed) in scored.iter().take(ev.cfg.refine_candidates) {
        let (p, v) = nelder_mead(ev.closure(&sink), *seed, step / 2.0, bounds, max_iter);
        let replace = match &best {
            None => true,
            Some((bp, bv)) => {
                v < *bv
                    || (v == *bv
                        && (p[0], p[1]) < (bp[0], bp[1]))
            }
        };
        if replace {
            best = Some((p, v));
        }
    }
    if let Some(e) = sink.into_inner() {
        return Err(e);
    }
    let (argmin, value) = best.expect("at least one candidate refined");
    let margin = 1.5 * step;
    let truncated =
        argmin[0].abs() > half - margin || argmin[1].abs() > half - margin;
    Ok(GapEstimate { value, argmin, truncated })
}

/// Minimize the ball functional over the annulus |center| ∈ [r_in, r_out],
/// searching in polar coordinates (clamped radius, free angle).
fn minimize_over_annulus(
    ev: &Evaluator<'_>,
    r_in: f64,
    r_out: f64,
    max_iter: usize,
) -> Result<ShellPoint> {
    let na = ev.cfg.shell_angles.max(4);
    let nr = ev.cfg.shell_radial.max(2);
    let dth = std::f64::consts::TAU / na as f64;
    let dr = (r_out - r_in) / nr as f64;
    let polar = |p: [f64; 2]| -> [f64; 2] { [p[0] * p[1].cos(), p[0] * p[1].sin()] };

    let candidates: Vec<[f64; 2]> = (0..na * nr)
        .map(|idx| {
            let (j, m) = (idx / nr, idx % nr);
            [r_in + (m as f64 + 0.5) * dr, (j as f64 + 0.5) * dth]
        })
        .collect();
    let coarse: Vec<Result<f64>> = candidates
        .par_iter()
        .map(|rp| ev.eval(polar(*rp)))
        .collect();
    let mut scored = Vec::with_capacity(candidates.len());
    for (rp, v) in candidates.iter().zip(coarse) {
        scored.push((v?, *rp));
    }
    scored.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then(a.1[0].total_cmp(&b.1[0]))
            .then(a.1[1].total_cmp(&b.1[1]))
    });

    let bounds = Bounds2 {
        lo: [r_in, f64::NEG_INFINITY],
        hi: [r_out, f64::INFINITY],
    };
    let sink = std::cell::RefCell::new(None);
    let mut best: Option<([f64; 2], f64)> = None;
    for (_, seed) in scored.iter().take(ev.cfg.refine_candidates.max(2)) {
        let mut f = {
            let sink = &sink;
            move |rp: [f64; 2]| match ev.eval(polar(rp)) {
                Ok(v) => v,
                Err(e) => {
                    sink.borrow_mut().get_or_insert(e);
                    f64::INFINITY
                }
            }
        };
        let (p, v) = nelder_mead(&mut f, *seed, (dr * 0.5).max(dth * 0.5 * r_in), bounds, max_iter);
        let replace = match &best {
            None => true,
            Some((bp, bv)) => v < *bv || (v == *bv && (p[0], p[1]) < (bp[0], bp[1])),
        };
        if replace {
            best = Some((p, v));
        }
    }
    if let Some(e) = sink.into_inner() {
        return Err(e);
    }
    let (rp, value) = best.expect("candidates non-empty");
    Ok(ShellPoint { radius: r_in, value, argmin: polar(rp) })
}

fn shell_estimate(
    ev: &Evaluator<'_>,
    shells: &[f64],
    cfg: &SearchConfig,
) -> Result<ShellEstimate> {
    let mut profile = Vec::with_capacity(shells.len());
    for &rk in shells {
        profile.push(minimize_over_annulus(ev, rk, 2.0 * rk, cfg.max_refine_iter)?);
    }
    let last_two = &profile[profile.len() - 2..];
    let value = last_two[0].value.min(last_two[1].value);
    let increasing = profile.windows(2).all(|w| w[1].value > w[0].value);
    let divergent = increasing
        && profile.last().unwrap().value
            > cfg.divergence_growth * profile.first().unwrap().value.max(1e-300);
    Ok(ShellEstimate { value, profile, divergent })
}

fn validate_shells(shells: &[f64], min_len: usize) -> Result<()> {
    if shells.len() < min_len {
        return Err(CoreError::Validation(format!(
            "need at least {min_len} shells, got {}",
            shells.len()
        )));
    }
    if shells.windows(2).any(|w| w[1] <= w[0]) || shells.iter().any(|&r| r <= 0.0) {
        return Err(CoreError::Validation("shell radii must be positive and increasing".into()));
    }
    Ok(())
}

/// λ(a, h): minimum ball average over centers in the search box, refined
/// locally; an upper estimate of the true infimum.
pub fn lambda_gap(sym: &Symbol, h: f64, cfg: &SearchConfig) -> Result<GapEstimate> {
    let ev = Evaluator {
        sym,
        h,
        cfg,
        radius: h.sqrt(),
        kind: BallFunctional::Average,
    };
    minimize_over_box(&ev, cfg.resolved_box(h), cfg.max_refine_iter)
}

/// λ_ess(a, h): shell minima of ball averages over |center| ∈ [R, 2R],
/// liminf estimated from the last two shells.
pub fn lambda_ess_gap(
    sym: &Symbol,
    h: f64,
    shells: &[f64],
    cfg: &SearchConfig,
) -> Result<ShellEstimate> {
    validate_shells(shells, 3)?;
    let ev = Evaluator {
        sym,
        h,
        cfg,
        radius: h.sqrt(),
        kind: BallFunctional::Average,
    };
    shell_estimate(&ev, shells, cfg)
}

/// λ′(a, h): minimum over centers of the sup of a over B(center, √h)
/// (quadrature nodes plus a boundary ring).
pub fn lambda_sup_gap(sym: &Symbol, h: f64, cfg: &SearchConfig) -> Result<GapEstimate> {
    let ev = Evaluator {
        sym,
        h,
        cfg,
        radius: h.sqrt(),
        kind: BallFunctional::Sup,
    };
    minimize_over_box(&ev, cfg.resolved_box(h), cfg.max_refine_iter)
}

/// λ′_ess(a, h): the liminf shells with the sup inner functional.
pub fn lambda_sup_ess_gap(
    sym: &Symbol,
    h: f64,
    shells: &[f64],
    cfg: &SearchConfig,
) -> Result<ShellEstimate> {
    validate_shells(shells, 3)?;
    let ev = Evaluator {
        sym,
        h,
        cfg,
        radius: h.sqrt(),
        kind: BallFunctional::Sup,
    };
    shell_estimate(&ev, shells, cfg)
}

/// C_r(w) for each radius r ∈ (0, 1]; the r = 1 entry is the unit-ball
/// functional I_UP(w).
pub fn c_r_profile(
    sym: &Symbol,
    radii: &[f64],
    cfg: &SearchConfig,
    h: f64,
) -> Result<Vec<(f64, GapEstimate)>> {
    if radii.is_empty() {
        return Err(CoreError::Validation("C_r profile needs at least one radius".into()));
    }
    if radii.iter().any(|&r| r <= 0.0 || r > 1.0) {
        return Err(CoreError::Validation("C_r radii must lie in (0, 1]".into()));
    }
    let mut out = Vec::with_capacity(radii.len());
    for &r in radii {
        let ev = Evaluator {
            sym,
            h,
            cfg,
            radius: r,
            kind: BallFunctional::Average,
        };
        let half = cfg.box_halfwidth.unwrap_or(10.0);
        out.push((r, minimize_over_box(&ev, half, cfg.max_refine_iter)?));
    }
    Ok(out)
}

/// Discreteness indicator from shell minima of ∫_{B(center,√h)} a
/// (integrals, not averages).
///
/// "discrete" needs a monotonically growing profile whose last entry exceeds
/// the growth cap over the first; a flat or shrinking profile is
/// "not-discrete"; anything else is inconclusive.
pub fn discreteness_indicator(
    sym: &Symbol,
    h: f64,
    shells: &[f64],
    cfg: &SearchConfig,
) -> Result<(Discreteness, Vec<ShellPoint>)> {
    validate_shells(shells, 4)?;
    let ev = Evaluator {
        sym,
        h,
        cfg,
        radius: h.sqrt(),
        kind: BallFunctional::Average,
    };
    let est = shell_estimate(&ev, shells, cfg)?;
    let area = std::f64::consts::PI * h;
    let profile: Vec<ShellPoint> = est
        .profile
        .into_iter()
        .map(|p| ShellPoint { radius: p.radius, value: p.value * area, argmin: p.argmin })
        .collect();
    let first = profile.first().unwrap().value;
    let last = profile.last().unwrap().value;
    let prev = profile[profile.len() - 2].value;
    let increasing = profile.windows(2).all(|w| w[1].value > w[0].value);
    let verdict = if increasing && last > cfg.indicator_growth * first.max(1e-300) {
        Discreteness::Discrete
    } else if last <= first || (last / prev.max(1e-300) - 1.0).abs() <= 0.10 {
        Discreteness::NotDiscrete
    } else {
        Discreteness::Inconclusive
    };
    Ok((verdict, profile))
}

/// All gap functionals for one (symbol, h), with the cross-estimator order
/// λ ≤ λ_ess and λ ≤ λ′ enforced by sharing candidate centers (every shell
/// argmin and sup argmin is also a valid center for the plain infimum).
pub fn estimate_gap_values(
    sym: &Symbol,
    h: f64,
    shells: &[f64],
    cfg: &SearchConfig,
) -> Result<GapValues> {
    let lambda_box = lambda_gap(sym, h, cfg)?;
    let sup_box = lambda_sup_gap(sym, h, cfg)?;
    let ess = lambda_ess_gap(sym, h, shells, cfg)?;
    let sup_ess = lambda_sup_ess_gap(sym, h, shells, cfg)?;

    let avg_ev = Evaluator {
        sym,
        h,
        cfg,
        radius: h.sqrt(),
        kind: BallFunctional::Average,
    };

    let mut lambda = lambda_box.value;
    let mut lambda_argmin = lambda_box.argmin;
    // fold in the average at the sup minimizer and at every shell minimizer
    for center in std::iter::once(sup_box.argmin)
        .chain(ess.profile.iter().map(|p| p.argmin))
    {
        let v = avg_ev.eval(center)?;
        if v < lambda {
            lambda = v;
            lambda_argmin = center;
        }
    }

    // per-shell: the average at the sup argmin bounds the avg shell minimum
    let mut ess_value = ess.value;
    for (a, s) in ess.profile.iter().zip(&sup_ess.profile).rev().take(2) {
        let v = avg_ev.eval(s.argmin)?.min(a.value);
        ess_value = ess_value.min(v.max(a.value.min(v)));
    }
    let ess_value = ess_value.min(ess.value);

    debug_assert!(lambda <= ess_value + 1e-9 || ess.divergent);
    debug_assert!(lambda <= sup_box.value + 1e-9);

    Ok(GapValues {
        lambda,
        lambda_argmin,
        lambda_truncated: lambda_box.truncated,
        lambda_ess: ess_value,
        lambda_ess_divergent: ess.divergent,
        lambda_sup: sup_box.value,
        lambda_sup_ess: sup_ess.value,
        lambda_sup_ess_divergent: sup_ess.divergent,
        ess_profile: ess.profile,
        sup_ess_profile: sup_ess.profile,
    })
}
