//! Phase-space symbols (weights) and their ball diagnostics.
//!
//! A symbol is a nonnegative function a(x, ω) on ℝ^{2d}, possibly depending
//! on the scale parameter h. Structured kinds (constant, polynomial in
//! z = x + iω and z̄, |P|^β powers, radial profiles) carry enough metadata for
//! the exact quantization routes; everything else evaluates through a generic
//! closure. Ball averages use a polar midpoint product rule whose nodes never
//! touch the ball center or boundary, so |P|^β with β < 0 is never sampled on
//! the zero set of P.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::numeric::{ols_fit, pairwise_sum};

/// One monomial c · z^α z̄^β of a polynomial symbol (multi-indices over d).
#[derive(Debug, Clone, PartialEq)]
pub struct PolyTerm {
    pub alpha: Vec<u32>,
    pub beta: Vec<u32>,
    pub coeff: Complex64,
}

/// Real polynomial in the 2d phase-space coordinates (x_1..x_d, ω_1..ω_d),
/// used as the base of |P|^β symbols.
#[derive(Debug, Clone, PartialEq)]
pub struct RealPoly {
    /// (exponents over the 2d coordinates, coefficient)
    pub terms: Vec<(Vec<u32>, f64)>,
}

impl RealPoly {
    pub fn eval(&self, x: &[f64], omega: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (exps, c) in &self.terms {
            let mut t = *c;
            for (i, &e) in exps.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let v = if i < x.len() { x[i] } else { omega[i - x.len()] };
                t *= v.powi(e as i32);
            }
            acc += t;
        }
        acc
    }
}

/// Scalar radial profile g, applied as a = g(|x|² + |ω|²).
pub type RadialProfile = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Generic pointwise evaluator (x, ω, h) → value.
pub type GenericEval = Arc<dyn Fn(&[f64], &[f64], f64) -> f64 + Send + Sync>;

/// Structural kind of a symbol.
#[derive(Clone)]
pub enum SymbolKind {
    Constant(f64),
    /// Σ c_{αβ} z^α z̄^β with a Hermitian coefficient table.
    Polynomial(Vec<PolyTerm>),
    /// |P(x, ω)|^β; for β < 0 the zero set of P is excluded from the domain.
    AbsPower { poly: RealPoly, beta: f64 },
    /// g(|x|² + |ω|²); `label` names the profile for reports.
    Radial { profile: RadialProfile, label: String },
    Generic(GenericEval),
}

impl fmt::Debug for SymbolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolKind::Constant(c) => write!(f, "Constant({c})"),
            SymbolKind::Polynomial(t) => write!(f, "Polynomial({} terms)", t.len()),
            SymbolKind::AbsPower { beta, .. } => write!(f, "AbsPower(beta={beta})"),
            SymbolKind::Radial { label, .. } => write!(f, "Radial({label})"),
            SymbolKind::Generic(_) => write!(f, "Generic"),
        }
    }
}

/// Metadata for symbols in the semiclassical classes S^m_ρ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemiclassicalClass {
    pub m: f64,
    /// ρ ∈ [0, 1/2)
    pub rho: f64,
    /// Order beyond which the derivative bounds hold.
    pub n0: u32,
}

/// A nonnegative phase-space symbol.
#[derive(Clone, Debug)]
pub struct Symbol {
    pub id: String,
    pub dim: usize,
    pub kind: SymbolKind,
    pub h_dependent: bool,
    pub semiclassical: Option<SemiclassicalClass>,
}

impl Symbol {
    pub fn constant(c: f64) -> Self {
        Symbol {
            id: format!("const({c})"),
            dim: 1,
            kind: SymbolKind::Constant(c),
            h_dependent: false,
            semiclassical: None,
        }
    }

    /// Polynomial symbol from a coefficient table; the table must be
    /// Hermitian (c_{αβ} = conj(c_{βα})) so the symbol is real-valued.
    pub fn polynomial(dim: usize, terms: Vec<PolyTerm>) -> Result<Self> {
        validate_hermitian_table(&terms)?;
        for t in &terms {
            if t.alpha.len() != dim || t.beta.len() != dim {
                return Err(CoreError::Validation(format!(
                    "multi-index length must equal d = {dim}"
                )));
            }
        }
        Ok(Symbol {
            id: "polynomial".into(),
            dim,
            kind: SymbolKind::Polynomial(terms),
            h_dependent: false,
            semiclassical: None,
        })
    }

    /// |z|² = z z̄ in dimension d (the harmonic-oscillator symbol).
    pub fn mod_z_squared(dim: usize) -> Self {
        let terms = (0..dim)
            .map(|j| {
                let mut alpha = vec![0u32; dim];
                let mut beta = vec![0u32; dim];
                alpha[j] = 1;
                beta[j] = 1;
                PolyTerm { alpha, beta, coeff: Complex64::new(1.0, 0.0) }
            })
            .collect();
        let mut s = Symbol::polynomial(dim, terms).expect("table is Hermitian");
        s.id = "|z|^2".into();
        s
    }

    /// x₁² as a z-table: (z² + 2 z z̄ + z̄²)/4 in d = 1.
    pub fn x_squared() -> Self {
        let t = |a: u32, b: u32, c: f64| PolyTerm {
            alpha: vec![a],
            beta: vec![b],
            coeff: Complex64::new(c, 0.0),
        };
        let mut s =
            Symbol::polynomial(1, vec![t(2, 0, 0.25), t(1, 1, 0.5), t(0, 2, 0.25)]).unwrap();
        s.id = "x^2".into();
        s
    }

    pub fn abs_power(dim: usize, poly: RealPoly, beta: f64) -> Self {
        Symbol {
            id: format!("|P|^{beta}"),
            dim,
            kind: SymbolKind::AbsPower { poly, beta },
            h_dependent: false,
            semiclassical: None,
        }
    }

    pub fn radial<F>(label: &str, g: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Symbol {
            id: label.to_string(),
            dim: 1,
            kind: SymbolKind::Radial { profile: Arc::new(g), label: label.to_string() },
            h_dependent: false,
            semiclassical: None,
        }
    }

    /// (|x|² + |ω|²)^β as a radial symbol.
    pub fn radial_power(beta: f64) -> Self {
        let mut s = Symbol::radial(&format!("|z|^{}", 2.0 * beta), move |s| s.powf(beta));
        s.id = format!("(x^2+w^2)^{beta}");
        s
    }

    pub fn generic<F>(label: &str, f: F) -> Self
    where
        F: Fn(&[f64], &[f64], f64) -> f64 + Send + Sync + 'static,
    {
        Symbol {
            id: label.to_string(),
            dim: 1,
            kind: SymbolKind::Generic(Arc::new(f)),
            h_dependent: false,
            semiclassical: None,
        }
    }

    pub fn with_id(mut self, id: &str) -> Self {
        self.id = id.to_string();
        self
    }

    pub fn with_semiclassical(mut self, m: f64, rho: f64, n0: u32) -> Self {
        self.semiclassical = Some(SemiclassicalClass { m, rho, n0 });
        self
    }

    /// Evaluate at (x, ω) with scale h. Singular points are hard errors.
    pub fn eval(&self, x: &[f64], omega: &[f64], h: f64) -> Result<f64> {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(omega.len(), self.dim);
        let v = match &self.kind {
            SymbolKind::Constant(c) => *c,
            SymbolKind::Polynomial(terms) => {
                let mut acc = Complex64::new(0.0, 0.0);
                for t in terms {
                    let mut term = t.coeff;
                    for j in 0..self.dim {
                        let z = Complex64::new(x[j], omega[j]);
                        if t.alpha[j] > 0 {
                            term *= z.powu(t.alpha[j]);
                        }
                        if t.beta[j] > 0 {
                            term *= z.conj().powu(t.beta[j]);
                        }
                    }
                    acc += term;
                }
                // A Hermitian table gives a real value, up to roundoff.
                let scale = acc.norm().max(1.0);
                if acc.im.abs() > 1e-10 * scale {
                    return Err(CoreError::Numeric(format!(
                        "polynomial symbol produced imaginary part {}",
                        acc.im
                    )));
                }
                // roundoff can leave a tiny negative residue near zeros
                if acc.re < 0.0 && acc.re > -1e-12 * scale {
                    0.0
                } else {
                    acc.re
                }
            }
            SymbolKind::AbsPower { poly, beta } => {
                let p = poly.eval(x, omega);
                if p == 0.0 && *beta < 0.0 {
                    return Err(CoreError::SymbolDomain {
                        x: x.to_vec(),
                        omega: omega.to_vec(),
                        reason: format!("|P|^{beta} evaluated on the zero set of P"),
                    });
                }
                p.abs().powf(*beta)
            }
            SymbolKind::Radial { profile, .. } => {
                let s: f64 = x.iter().chain(omega).map(|v| v * v).sum();
                profile(s)
            }
            SymbolKind::Generic(f) => f(x, omega, h),
        };
        if !v.is_finite() {
            return Err(CoreError::Numeric(format!(
                "symbol {} non-finite at ({x:?}, {omega:?})",
                self.id
            )));
        }
        if v < 0.0 {
            return Err(CoreError::Validation(format!(
                "symbol {} is negative ({v}) at ({x:?}, {omega:?})",
                self.id
            )));
        }
        Ok(v)
    }

    /// The symbol x ↦ a(s·x, s·ω) (phase-space dilation of the argument).
    pub fn rescaled(&self, s: f64) -> Symbol {
        let mut out = self.clone();
        out.id = format!("{}(·×{s})", self.id);
        out.kind = match &self.kind {
            SymbolKind::Constant(c) => SymbolKind::Constant(*c),
            SymbolKind::Polynomial(terms) => SymbolKind::Polynomial(
                terms
                    .iter()
                    .map(|t| {
                        let deg: u32 =
                            t.alpha.iter().sum::<u32>() + t.beta.iter().sum::<u32>();
                        PolyTerm {
                            alpha: t.alpha.clone(),
                            beta: t.beta.clone(),
                            coeff: t.coeff * s.powi(deg as i32),
                        }
                    })
                    .collect(),
            ),
            SymbolKind::AbsPower { poly, beta } => {
                let poly = RealPoly {
                    terms: poly
                        .terms
                        .iter()
                        .map(|(e, c)| {
                            let deg: u32 = e.iter().sum();
                            (e.clone(), c * s.powi(deg as i32))
                        })
                        .collect(),
                };
                SymbolKind::AbsPower { poly, beta: *beta }
            }
            SymbolKind::Radial { profile, label } => {
                let g = profile.clone();
                let s2 = s * s;
                SymbolKind::Radial {
                    profile: Arc::new(move |r2| g(s2 * r2)),
                    label: label.clone(),
                }
            }
            SymbolKind::Generic(f) => {
                let f = f.clone();
                SymbolKind::Generic(Arc::new(move |x: &[f64], w: &[f64], h: f64| {
                    let xs: Vec<f64> = x.iter().map(|v| v * s).collect();
                    let ws: Vec<f64> = w.iter().map(|v| v * s).collect();
                    f(&xs, &ws, h)
                }))
            }
        };
        out
    }

    /// The symbol (x, ω) ↦ a(x − v_x, ω − v_ω).
    pub fn translated(&self, vx: &[f64], vw: &[f64]) -> Symbol {
        let inner = self.clone();
        let vx = vx.to_vec();
        let vw = vw.to_vec();
        let mut out = Symbol::generic(&format!("{}(·−v)", self.id), move |x, w, h| {
            let xs: Vec<f64> = x.iter().zip(&vx).map(|(a, b)| a - b).collect();
            let ws: Vec<f64> = w.iter().zip(&vw).map(|(a, b)| a - b).collect();
            inner.eval(&xs, &ws, h).unwrap_or(f64::NAN)
        });
        out.dim = self.dim;
        out.h_dependent = self.h_dependent;
        out
    }

    /// The symbol a − c (used with c = inf a for bounded-below symbols).
    pub fn minus_constant(&self, c: f64) -> Symbol {
        let mut out = self.clone();
        out.id = format!("{}-{c}", self.id);
        out.kind = match &self.kind {
            SymbolKind::Constant(c0) => SymbolKind::Constant(c0 - c),
            SymbolKind::Polynomial(terms) => {
                let mut terms = terms.clone();
                let zero_a = vec![0u32; self.dim];
                if let Some(t) = terms
                    .iter_mut()
                    .find(|t| t.alpha == zero_a && t.beta == zero_a)
                {
                    t.coeff -= Complex64::new(c, 0.0);
                } else {
                    terms.push(PolyTerm {
                        alpha: zero_a.clone(),
                        beta: zero_a,
                        coeff: Complex64::new(-c, 0.0),
                    });
                }
                SymbolKind::Polynomial(terms)
            }
            SymbolKind::Radial { profile, label } => {
                let g = profile.clone();
                SymbolKind::Radial {
                    profile: Arc::new(move |s| g(s) - c),
                    label: label.clone(),
                }
            }
            _ => {
                let inner = self.clone();
                SymbolKind::Generic(Arc::new(move |x: &[f64], w: &[f64], h: f64| {
                    inner.eval(x, w, h).map(|v| v - c).unwrap_or(f64::NAN)
                }))
            }
        };
        out
    }
}

fn validate_hermitian_table(terms: &[PolyTerm]) -> Result<()> {
    for t in terms {
        let partner = terms
            .iter()
            .filter(|u| u.alpha == t.beta && u.beta == t.alpha)
            .fold(Complex64::new(0.0, 0.0), |acc, u| acc + u.coeff);
        let own = terms
            .iter()
            .filter(|u| u.alpha == t.alpha && u.beta == t.beta)
            .fold(Complex64::new(0.0, 0.0), |acc, u| acc + u.coeff);
        if (partner - own.conj()).norm() > 1e-12 * own.norm().max(1.0) {
            return Err(CoreError::Validation(format!(
                "non-Hermitian coefficient table at (α, β) = ({:?}, {:?}): c_αβ = {}, c_βα = {}",
                t.alpha, t.beta, own, partner
            )));
        }
    }
    Ok(())
}

/// A ball in phase space (d = 1: ℝ²) with the polar midpoint quadrature used
/// for its averages.
#[derive(Debug, Clone, PartialEq)]
pub struct BallSpec {
    pub center: Vec<f64>,
    pub radius: f64,
    pub shells: usize,
    pub angles: usize,
}

impl BallSpec {
    pub fn new(center_x: f64, center_w: f64, radius: f64, shells: usize, angles: usize) -> Self {
        BallSpec { center: vec![center_x, center_w], radius, shells, angles }
    }

    fn validate(&self) -> Result<()> {
        if self.center.len() != 2 {
            return Err(CoreError::UnsupportedDimension(self.center.len() / 2));
        }
        if !(self.radius > 0.0) {
            return Err(CoreError::Validation("ball radius must be positive".into()));
        }
        if self.shells == 0 || self.angles == 0 {
            return Err(CoreError::Validation("ball quadrature needs ≥ 1 node".into()));
        }
        Ok(())
    }

    /// Quadrature nodes (x, ω, weight), optionally with the angular frame
    /// rotated by `theta0`. Radial nodes sit at (i+1/2)Δs, angular nodes at
    /// θ0 + (j+1/2)Δθ: no node hits the center or the boundary, and the
    /// weights sum to the exact ball area π r².
    pub fn nodes_rotated(&self, theta0: f64) -> Vec<(f64, f64, f64)> {
        let ds = self.radius / self.shells as f64;
        let dth = 2.0 * std::f64::consts::PI / self.angles as f64;
        let mut out = Vec::with_capacity(self.shells * self.angles);
        for i in 0..self.shells {
            let s = (i as f64 + 0.5) * ds;
            let w = s * ds * dth;
            for j in 0..self.angles {
                let th = theta0 + (j as f64 + 0.5) * dth;
                out.push((self.center[0] + s * th.cos(), self.center[1] + s * th.sin(), w));
            }
        }
        out
    }

    pub fn nodes(&self) -> Vec<(f64, f64, f64)> {
        self.nodes_rotated(0.0)
    }

    pub fn area(&self) -> f64 {
        std::f64::consts::PI * self.radius * self.radius
    }
}

/// Pointwise symbol evaluation (d-agnostic).
pub fn eval_symbol(sym: &Symbol, x: &[f64], omega: &[f64], h: f64) -> Result<f64> {
    sym.eval(x, omega, h)
}

/// Quadrature approximation of ⨍_B a = (1/|B|) ∫_B a(x, ω) dx dω.
pub fn ball_average(sym: &Symbol, ball: &BallSpec, h: f64) -> Result<f64> {
    ball_average_rotated(sym, ball, h, 0.0)
}

/// Ball average with the quadrature frame rotated by `theta0` (the average of
/// a radial symbol over a centered ball must not depend on it).
pub fn ball_average_rotated(sym: &Symbol, ball: &BallSpec, h: f64, theta0: f64) -> Result<f64> {
    ball.validate()?;
    if sym.dim != 1 {
        return Err(CoreError::UnsupportedDimension(sym.dim));
    }
    let nodes = ball.nodes_rotated(theta0);
    let mut vals = Vec::with_capacity(nodes.len());
    for (x, w, wt) in &nodes {
        vals.push(sym.eval(&[*x], &[*w], h)? * wt);
    }
    let total = pairwise_sum(&vals);
    if !total.is_finite() {
        return Err(CoreError::Numeric(format!(
            "ball average of {} accumulated a non-finite value",
            sym.id
        )));
    }
    Ok(total / ball.area())
}

/// ∫_B a (not averaged).
pub fn ball_integral(sym: &Symbol, ball: &BallSpec, h: f64) -> Result<f64> {
    Ok(ball_average(sym, ball, h)? * ball.area())
}

/// Sampled Muckenhoupt-style diagnostic at exponent p.
#[derive(Debug, Clone)]
pub struct AInftyReport {
    pub p: f64,
    /// max over sampled balls of (⨍_B w)(⨍_B w^{-p'/p})^{p/p'}; +∞ when the
    /// dual-power quadrature diverges past the cap.
    pub constant_estimate: f64,
    pub n_balls_sampled: usize,
    pub worst_ball: BallSpec,
    pub radius_range: (f64, f64),
}

/// Cap past which a dual-power ball average is reported as divergent.
pub const AINFTY_DIVERGENCE_CAP: f64 = 1e12;

/// Sampled estimate of the A_p product over `centers` × `radii` with the
/// default 32×16 ball quadrature.
///
/// This is a lower estimate of the true supremum (a diagnostic, not a
/// certificate); Jensen forces every per-ball product ≥ 1.
pub fn ainfty_constant(
    sym: &Symbol,
    p: f64,
    centers: &[(f64, f64)],
    radii: &[f64],
    h: f64,
) -> Result<AInftyReport> {
    ainfty_constant_sampled(sym, p, centers, radii, h, 32, 16)
}

/// [`ainfty_constant`] with an explicit ball quadrature, for refinement
/// studies.
pub fn ainfty_constant_sampled(
    sym: &Symbol,
    p: f64,
    centers: &[(f64, f64)],
    radii: &[f64],
    h: f64,
    shells: usize,
    angles: usize,
) -> Result<AInftyReport> {
    if !(p > 1.0) {
        return Err(CoreError::Validation(format!("A_p exponent must be > 1, got {p}")));
    }
    if centers.is_empty() || radii.is_empty() {
        return Err(CoreError::Validation("A_p sampling needs centers and radii".into()));
    }
    let p_prime = p / (p - 1.0);
    let dual_pow = -p_prime / p;
    let sym_dual = dual_power_symbol(sym, dual_pow);

    let mut best = 0.0;
    let mut worst: Option<BallSpec> = None;
    let mut n = 0;
    let mut rmin = f64::INFINITY;
    let mut rmax = 0.0f64;
    for &(cx, cw) in centers {
        for &r in radii {
            let ball = BallSpec::new(cx, cw, r, shells, angles);
            let a = ball_average(sym, &ball, h)?;
            let b = ball_average(&sym_dual, &ball, h)?;
            let v = if b > AINFTY_DIVERGENCE_CAP || a > AINFTY_DIVERGENCE_CAP {
                f64::INFINITY
            } else {
                a * b.powf(p / p_prime)
            };
            n += 1;
            rmin = rmin.min(r);
            rmax = rmax.max(r);
            if v > best {
                best = v;
                worst = Some(ball);
            }
        }
    }
    Ok(AInftyReport {
        p,
        constant_estimate: best,
        n_balls_sampled: n,
        worst_ball: worst.expect("at least one ball sampled"),
        radius_range: (rmin, rmax),
    })
}

/// w^q as a symbol (q < 0 turns zeros of w into singular points, which the
/// offset quadrature never samples).
fn dual_power_symbol(sym: &Symbol, q: f64) -> Symbol {
    let inner = sym.clone();
    let mut out = Symbol::generic(&format!("{}^{q}", sym.id), move |x, w, h| {
        match inner.eval(x, w, h) {
            Ok(v) => v.powf(q),
            Err(_) => f64::NAN,
        }
    });
    out.dim = sym.dim;
    out.h_dependent = sym.h_dependent;
    out
}

/// Polynomial-growth fit of r ↦ ∫_{B(0,r)} a against (1+r)^N.
#[derive(Debug, Clone)]
pub struct GrowthFit {
    /// Fitted constant such that ∫_{B(0,r)} a ≤ C (1+r)^N on the samples.
    pub c: f64,
    /// Fitted growth exponent.
    pub n: f64,
    /// Largest |log residual| of the least-squares fit.
    pub max_log_residual: f64,
    /// Set when the log-log fit is poor (super-polynomial growth).
    pub warning: bool,
}

/// Dyadic radii 1, 2, 4, ..., 256 used by the default growth probe.
pub fn dyadic_radii() -> Vec<f64> {
    (0..9).map(|k| (1u32 << k) as f64).collect()
}

/// Least-squares fit of log ∫_{B(0,r)} a against log(1+r).
///
/// The returned constant is inflated so the bound holds on every sample; the
/// warning flag trips when the residuals exceed 5% of the log-scale range
/// (or the exponent is absurdly large), which is how super-polynomial symbols
/// such as e^{|z|} announce themselves.
pub fn growth_check(sym: &Symbol, radii: &[f64], h: f64) -> Result<GrowthFit> {
    if radii.is_empty() {
        return Err(CoreError::Validation("growth_check needs at least one radius".into()));
    }
    let mut xs = Vec::with_capacity(radii.len());
    let mut ys = Vec::with_capacity(radii.len());
    for &r in radii {
        let shells = 64.max((r * 8.0) as usize).min(512);
        let ball = BallSpec::new(0.0, 0.0, r, shells, 32);
        let integral = ball_integral(sym, &ball, h)?;
        if integral <= 0.0 {
            return Err(CoreError::Numeric(format!(
                "growth_check: nonpositive mass {integral} at r = {r}"
            )));
        }
        xs.push((1.0 + r).ln());
        ys.push(integral.ln());
    }
    let (slope, intercept, resid) = ols_fit(&xs, &ys);
    let max_resid = resid.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    let max_pos = resid.iter().fold(0.0f64, |m, e| m.max(*e));
    let scale = ys.iter().fold(1.0f64, |m, y| m.max(y.abs()));
    let warning = max_resid > 0.05 * scale || slope > 12.0;
    Ok(GrowthFit {
        c: (intercept + max_pos).exp(),
        n: slope,
        max_log_residual: max_resid,
        warning,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constant_symbol_evaluates_everywhere() {
        let s = Symbol::constant(3.0);
        assert_eq!(s.eval(&[1.0], &[2.0], 1.0).unwrap(), 3.0);
        assert_eq!(s.eval(&[-7.0], &[0.1], 0.01).unwrap(), 3.0);
    }

    #[test]
    fn mod_z_squared_at_point() {
        // |z|² at (x, ω) = (1, 2) is 5
        let s = Symbol::mod_z_squared(1);
        assert_relative_eq!(s.eval(&[1.0], &[2.0], 1.0).unwrap(), 5.0, max_relative = 1e-12);
    }

    #[test]
    fn abs_power_at_point_and_singularity() {
        // |x|^{-1/2} at (4, 0) is 0.5
        let p = RealPoly { terms: vec![(vec![1, 0], 1.0)] };
        let s = Symbol::abs_power(1, p, -0.5);
        assert_relative_eq!(s.eval(&[4.0], &[0.0], 1.0).unwrap(), 0.5, max_relative = 1e-12);
        let err = s.eval(&[0.0], &[3.0], 1.0).unwrap_err();
        match err {
            CoreError::SymbolDomain { x, .. } => assert_eq!(x, vec![0.0]),
            other => panic!("expected domain error, got {other:?}"),
        }
    }

    #[test]
    fn polynomial_agrees_with_direct_formula_at_probe_points() {
        let s = Symbol::x_squared();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let x: f64 = rng.gen_range(-3.0..3.0);
            let w: f64 = rng.gen_range(-3.0..3.0);
            let v = s.eval(&[x], &[w], 1.0).unwrap();
            assert_relative_eq!(v, x * x, max_relative = 1e-12, epsilon = 1e-12);
        }
    }

    #[test]
    fn non_hermitian_table_is_rejected() {
        let bad = vec![PolyTerm {
            alpha: vec![2],
            beta: vec![0],
            coeff: Complex64::new(1.0, 0.0),
        }];
        assert!(Symbol::polynomial(1, bad).is_err());
    }

    #[test]
    fn radial_symbol_is_rotation_invariant_at_probe_points() {
        let s = Symbol::radial_power(0.7);
        for &(x, w) in &[(1.0, 0.3), (0.0, 1.2), (-0.5, -0.5)] {
            let r = (x as f64).hypot(w);
            let rot = s.eval(&[r], &[0.0], 1.0).unwrap();
            let v = s.eval(&[x], &[w], 1.0).unwrap();
            assert_relative_eq!(v, rot, max_relative = 1e-12);
        }
    }

    #[test]
    fn ball_nodes_stay_strictly_inside_and_weights_sum_to_area() {
        let ball = BallSpec::new(1.0, -2.0, 0.7, 16, 12);
        let nodes = ball.nodes();
        assert_eq!(nodes.len(), 16 * 12);
        let mut wsum = 0.0;
        for (x, w, wt) in &nodes {
            let dist = (x - 1.0).hypot(w + 2.0);
            assert!(dist > 0.0 && dist < 0.7, "node at distance {dist}");
            wsum += wt;
        }
        assert_relative_eq!(wsum, ball.area(), max_relative = 1e-12);
    }

    #[test]
    fn h_dependent_symbols_see_the_scale_parameter() {
        let mut sym = Symbol::generic("h|z|^2", |x, w, h| h * (x[0] * x[0] + w[0] * w[0]));
        sym.h_dependent = true;
        // ⨍_{B(0,r)} h|z|² = h·r²/2
        let ball = BallSpec::new(0.0, 0.0, 1.0, 64, 16);
        for &h in &[0.25, 1.0] {
            let avg = ball_average(&sym, &ball, h).unwrap();
            assert_relative_eq!(avg, h * 0.5, max_relative = 1e-3);
        }
    }

    #[test]
    fn higher_dimensions_evaluate_but_ball_ops_reject() {
        let s = Symbol::mod_z_squared(2);
        // |z|² at x = (1, 2), ω = (0, 2) is 1 + 4 + 0 + 4
        assert_relative_eq!(
            s.eval(&[1.0, 2.0], &[0.0, 2.0], 1.0).unwrap(),
            9.0,
            max_relative = 1e-12
        );
        let ball = BallSpec::new(0.0, 0.0, 1.0, 8, 8);
        assert!(matches!(
            ball_average(&s, &ball, 1.0),
            Err(CoreError::UnsupportedDimension(2))
        ));
    }

    #[test]
    fn ball_average_of_constant_is_the_constant() {
        let s = Symbol::constant(2.5);
        let ball = BallSpec::new(0.3, -1.2, 0.7, 16, 8);
        assert_relative_eq!(ball_average(&s, &ball, 1.0).unwrap(), 2.5, max_relative = 1e-14);
    }

    /// Closed form: ⨍_{B(0,r)} |z|² = r²/2 (polar integral), cross-checked by
    /// seeded Monte Carlo.
    #[test]
    fn ball_average_mod_z_squared_closed_form_and_monte_carlo() {
        let s = Symbol::mod_z_squared(1);
        for &r in &[0.5, 1.0, 2.0] {
            let ball = BallSpec::new(0.0, 0.0, r, 64, 16);
            let avg = ball_average(&s, &ball, 1.0).unwrap();
            assert_relative_eq!(avg, r * r / 2.0, max_relative = 2e-4);
        }
        // Monte Carlo oracle, uniform in the ball via inverse-cdf radius
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let r = 1.5;
        let n = 200_000;
        let mut acc = 0.0;
        for _ in 0..n {
            let u: f64 = rng.gen();
            let th: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let s_r = r * u.sqrt();
            let (x, w) = (s_r * th.cos(), s_r * th.sin());
            acc += x * x + w * w;
        }
        let mc = acc / n as f64;
        let ball = BallSpec::new(0.0, 0.0, r, 64, 16);
        let avg = ball_average(&s, &ball, 1.0).unwrap();
        assert_relative_eq!(avg, mc, max_relative = 6e-3);
    }

    /// ⨍_{B((0,ω₀),r)} x² = r²/4 for every ω₀ (polar integral of s² cos²θ).
    #[test]
    fn ball_average_x_squared_closed_form() {
        let s = Symbol::x_squared();
        for &w0 in &[0.0, 3.0, -11.0] {
            let ball = BallSpec::new(0.0, w0, 0.8, 64, 16);
            let avg = ball_average(&s, &ball, 1.0).unwrap();
            assert_relative_eq!(avg, 0.8 * 0.8 / 4.0, max_relative = 2e-4);
        }
    }

    #[test]
    fn ball_average_is_linear_and_monotone() {
        let a = Symbol::mod_z_squared(1);
        let b = Symbol::constant(2.0);
        let combo = Symbol::generic("2a+3b", {
            let a = a.clone();
            let b = b.clone();
            move |x, w, h| 2.0 * a.eval(x, w, h).unwrap() + 3.0 * b.eval(x, w, h).unwrap()
        });
        let ball = BallSpec::new(0.4, 0.2, 1.1, 32, 16);
        let va = ball_average(&a, &ball, 1.0).unwrap();
        let vb = ball_average(&b, &ball, 1.0).unwrap();
        let vc = ball_average(&combo, &ball, 1.0).unwrap();
        assert!((vc - (2.0 * va + 3.0 * vb)).abs() <= 1e-12 * vc.abs().max(1.0));
        // monotone: x² ≤ |z|² pointwise
        let vx = ball_average(&Symbol::x_squared(), &ball, 1.0).unwrap();
        assert!(vx <= va + 1e-12);
    }

    #[test]
    fn rotating_the_quadrature_frame_leaves_radial_averages_fixed() {
        let s = Symbol::radial("exp(-s)", |s| (-s).exp());
        let ball = BallSpec::new(0.0, 0.0, 1.3, 32, 16);
        let v0 = ball_average_rotated(&s, &ball, 1.0, 0.0).unwrap();
        for &th in &[0.1, 0.77, 2.9] {
            let v = ball_average_rotated(&s, &ball, 1.0, th).unwrap();
            assert!((v - v0).abs() < 1e-10 * v0.max(1.0), "θ0 = {th}");
        }
    }

    #[test]
    fn ainfty_constant_weight_is_exactly_one() {
        for &c in &[0.5, 1.0, 17.0] {
            let s = Symbol::constant(c);
            let rep = ainfty_constant(
                &s,
                2.0,
                &[(0.0, 0.0), (2.0, -1.0)],
                &[0.5, 1.0, 3.0],
                1.0,
            )
            .unwrap();
            assert_relative_eq!(rep.constant_estimate, 1.0, max_relative = 1e-12);
            assert!(rep.constant_estimate >= 1.0 - 1e-9);
        }
    }

    #[test]
    fn ainfty_mod_z_inverse_is_finite_and_stable() {
        // the weight |z|^{-1} is in A_2; scale-coherent sampling keeps the
        // estimate stable under refinement
        let p = RealPoly { terms: vec![(vec![2, 0], 1.0), (vec![0, 2], 1.0)] };
        let s = Symbol::abs_power(1, p, -0.5);
        let mut centers = vec![(0.0, 0.0)];
        for &rho in &[0.25f64, 0.5, 1.0, 2.0, 4.0] {
            for j in 0..8 {
                let th = std::f64::consts::TAU * j as f64 / 8.0;
                centers.push((rho * th.cos(), rho * th.sin()));
            }
        }
        let radii = [0.1, 0.25, 0.5, 1.0, 2.0, 4.0];
        let rep = ainfty_constant(&s, 2.0, &centers, &radii, 1.0).unwrap();
        assert!(rep.constant_estimate.is_finite());
        assert!(rep.constant_estimate >= 1.0);
        assert!(rep.constant_estimate < 4.0, "estimate {}", rep.constant_estimate);
    }

    /// ⨍_{B((t,0),1)} e^x · ⨍_{B((t,0),1)} e^{-x} is independent of t
    /// (≈ 1.27762, the squared Bessel-type average) but grows with the radius.
    #[test]
    fn ainfty_exponential_weight_grows_with_radius() {
        let s = Symbol::generic("e^x", |x, _w, _h| x[0].exp());
        let centers: Vec<(f64, f64)> = (0..5).map(|k| (5.0 * k as f64, 0.0)).collect();
        let rep1 = ainfty_constant(&s, 2.0, &centers, &[1.0], 1.0).unwrap();
        assert_relative_eq!(rep1.constant_estimate, 1.277_619_48, max_relative = 1e-3);
        let rep3 = ainfty_constant(&s, 2.0, &centers, &[3.0], 1.0).unwrap();
        let rep5 = ainfty_constant(&s, 2.0, &centers, &[5.0], 1.0).unwrap();
        assert!(rep3.constant_estimate > 4.0 * rep1.constant_estimate);
        assert!(rep5.constant_estimate > 10.0 * rep3.constant_estimate);
    }

    #[test]
    fn growth_fit_matches_area_growth_for_unit_symbol() {
        // ∫_{B(0,r)} 1 = πr²: slope ≈ 2 against log(1+r) (pre-run value 2.23)
        let fit = growth_check(&Symbol::constant(1.0), &dyadic_radii(), 1.0).unwrap();
        assert!((fit.n - 2.0).abs() < 0.35, "n = {}", fit.n);
        assert!(!fit.warning);
    }

    #[test]
    fn growth_fit_matches_quartic_growth_for_mod_z_squared() {
        // ∫_{B(0,r)} |z|² = πr⁴/2: slope ≈ 4 (pre-run value 4.46)
        let fit = growth_check(&Symbol::mod_z_squared(1), &dyadic_radii(), 1.0).unwrap();
        assert!((fit.n - 4.0).abs() < 0.6, "n = {}", fit.n);
        assert!(!fit.warning);
    }

    #[test]
    fn growth_fit_flags_super_polynomial_symbols() {
        let s = Symbol::radial("exp(|z|)", |s| s.sqrt().exp());
        let fit = growth_check(&s, &dyadic_radii(), 1.0).unwrap();
        assert!(fit.warning, "expected warning, fit = {fit:?}");
        assert!(fit.max_log_residual > 1.0);
    }

    /// Doubling probe: ∫_{2B} a / ∫_B a stays below a center-independent
    /// bound; bounds frozen from a pre-run (16.0, 4.9, 5.7) with 1.5× slack.
    #[test]
    fn doubling_ratio_is_center_independent_within_frozen_bounds() {
        let zsq = Symbol::mod_z_squared(1);
        let zinv = Symbol::abs_power(
            1,
            RealPoly { terms: vec![(vec![2, 0], 1.0), (vec![0, 2], 1.0)] },
            -0.5,
        );
        let absx = Symbol::abs_power(1, RealPoly { terms: vec![(vec![1, 0], 1.0)] }, 0.5);
        let cases: [(&Symbol, f64); 3] = [(&zsq, 16.0), (&zinv, 4.9), (&absx, 5.7)];
        let centers = [
            (0.0, 0.0),
            (0.6, 0.1),
            (-1.3, 2.2),
            (4.0, -4.0),
            (0.0, 9.0),
            (-6.5, 0.3),
        ];
        for (sym, bound) in cases {
            for &(cx, cw) in &centers {
                for &r in &[0.4, 1.0, 2.5] {
                    let b1 = BallSpec::new(cx, cw, r, 64, 32);
                    let b2 = BallSpec::new(cx, cw, 2.0 * r, 64, 32);
                    let ratio = ball_integral(sym, &b2, 1.0).unwrap()
                        / ball_integral(sym, &b1, 1.0).unwrap();
                    assert!(
                        ratio <= 1.5 * bound,
                        "{}: ratio {ratio} at ({cx},{cw}) r={r} exceeds 1.5×{bound}",
                        sym.id
                    );
                }
            }
        }
    }

    #[test]
    fn rescaled_and_shifted_symbols_evaluate_consistently() {
        let s = Symbol::mod_z_squared(1);
        let s2 = s.rescaled(2.0);
        assert_relative_eq!(
            s2.eval(&[0.7], &[-0.4], 1.0).unwrap(),
            4.0 * s.eval(&[0.7], &[-0.4], 1.0).unwrap(),
            max_relative = 1e-12
        );
        let sm = s.minus_constant(-5.0); // |z|² + 5
        assert_relative_eq!(sm.eval(&[1.0], &[1.0], 1.0).unwrap(), 7.0, max_relative = 1e-12);
        let tr = s.translated(&[1.0], &[0.0]);
        assert_relative_eq!(
            tr.eval(&[2.0], &[0.0], 1.0).unwrap(),
            1.0,
            max_relative = 1e-12
        );
    }
}
