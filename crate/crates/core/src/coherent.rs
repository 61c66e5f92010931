//! Coherent states, the discretized transform f ↦ ⟨f, φ^h_{(x,ω)}⟩, and the
//! quadratic form built from it.
//!
//! The coherent states are
//!   φ^h_{(x₀,ω₀)}(x) = h^{-d/4} e^{(i/h) ω₀·x} φ(h^{-1/2}(x − x₀)),
//! with a unit-norm window φ. Windows are stored as finite Hermite expansions
//! (the default Gaussian π^{-1/4} e^{-x²/2} is the single coefficient [1]),
//! so every window evaluation runs through one code path.
//!
//! All integrals are midpoint sums on truncated grids (spectrally accurate
//! for Schwartz integrands); the central-fiber phase of the group element is
//! dropped throughout since only |⟨f, φ^h⟩|² enters the forms in scope.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{CoreError, Result};
use crate::hermite;
use crate::numeric::{pairwise_sum, pairwise_sum_c};

/// Uniform midpoint grid on [−L, L]: x_j = −L + (j+1/2)δ, δ = 2L/M.
///
/// No node sits exactly at 0 or at ±L (for even M), which keeps offset
/// guarantees for singular integrands.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialGrid {
    pub half_width: f64,
    pub points: usize,
}

impl SpatialGrid {
    pub fn new(half_width: f64, points: usize) -> Result<Self> {
        if points < 8 {
            return Err(CoreError::Validation(format!(
                "spatial grid needs at least 8 points, got {points}"
            )));
        }
        if !(half_width > 0.0) {
            return Err(CoreError::Validation("spatial half-width must be positive".into()));
        }
        Ok(SpatialGrid { half_width, points })
    }

    /// Grid sized for states with Hermite content below `n_modes`, shifted up
    /// to `x_extent`, analysed against frequencies up to `omega_max`.
    pub fn for_task(h: f64, x_extent: f64, omega_max: f64, n_modes: usize) -> Self {
        let sh = h.sqrt();
        let nm = n_modes.max(1) as f64;
        let k_max = omega_max / h + ((2.0 * nm + 1.0) / h).sqrt() + 8.0 / sh;
        let spacing = std::f64::consts::PI / k_max / 2.0;
        let half = x_extent + 8.0 * sh * (1.0 + nm.sqrt());
        let mut points = (2.0 * half / spacing).ceil() as usize;
        if points % 2 == 1 {
            points += 1;
        }
        SpatialGrid { half_width: half, points: points.max(8) }
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points as f64
    }

    pub fn point(&self, j: usize) -> f64 {
        -self.half_width + (j as f64 + 0.5) * self.spacing()
    }

    /// Index range of nodes within [x0 − cut, x0 + cut].
    fn window_indices(&self, x0: f64, cut: f64) -> (usize, usize) {
        let d = self.spacing();
        let lo = ((x0 - cut + self.half_width) / d - 0.5).ceil().max(0.0) as usize;
        let hi_f = ((x0 + cut + self.half_width) / d - 0.5).floor();
        let hi = if hi_f < 0.0 { 0 } else { (hi_f as usize + 1).min(self.points) };
        (lo.min(self.points), hi)
    }
}

/// Window plus semiclassical parameter: generates the coherent states.
#[derive(Debug, Clone)]
pub struct CoherentFrame {
    pub dim: usize,
    pub h: f64,
    /// Window as coefficients in the standard (h = 1) Hermite basis.
    window: Vec<f64>,
    label: String,
}

impl CoherentFrame {
    /// Gaussian window π^{-1/4} e^{-x²/2}.
    pub fn gaussian(h: f64) -> Result<Self> {
        CoherentFrame::with_hermite_window(h, vec![1.0], "gaussian")
    }

    /// Window from a finite Hermite-coefficient vector; must be unit norm.
    pub fn with_hermite_window(h: f64, coeffs: Vec<f64>, label: &str) -> Result<Self> {
        if !(h > 0.0) {
            return Err(CoreError::Validation(format!("h must be positive, got {h}")));
        }
        if coeffs.is_empty() {
            return Err(CoreError::Validation("window needs at least one coefficient".into()));
        }
        let frame = CoherentFrame { dim: 1, h, window: coeffs, label: label.to_string() };
        // ‖φ‖ checked by quadrature on a reference grid, not just by Σ|c|².
        let grid = SpatialGrid::for_task(1.0, 0.0, 0.0, frame.window.len());
        let vals: Vec<f64> = (0..grid.points)
            .map(|j| {
                let v = frame.window_value(grid.point(j));
                v * v * grid.spacing()
            })
            .collect();
        let norm2 = pairwise_sum(&vals);
        if (norm2.sqrt() - 1.0).abs() > 1e-10 {
            return Err(CoreError::Validation(format!(
                "window must be unit L² norm; quadrature gives {}",
                norm2.sqrt()
            )));
        }
        Ok(frame)
    }

    pub fn window_label(&self) -> &str {
        &self.label
    }

    /// Highest Hermite order present in the window.
    pub fn window_degree(&self) -> usize {
        self.window.len() - 1
    }

    /// φ(u) in unscaled coordinates.
    pub fn window_value(&self, u: f64) -> f64 {
        let mut buf = Vec::with_capacity(self.window.len());
        hermite::eval_all(u, self.window.len(), &mut buf);
        self.window.iter().zip(&buf).map(|(c, p)| c * p).sum()
    }

    /// Pointwise value of φ^h_{(x₀,ω₀)} at x.
    pub fn coherent_value(&self, x0: f64, w0: f64, x: f64) -> Complex64 {
        let sh = self.h.sqrt();
        let amp = self.h.powf(-0.25) * self.window_value((x - x0) / sh);
        Complex64::from_polar(1.0, w0 * x / self.h) * amp
    }

    /// Half-width (in units of √h) outside which the window is negligible.
    fn window_cut(&self) -> f64 {
        10.0 + (2.0 * self.window_degree() as f64 + 1.0).sqrt()
    }
}

/// Rectangular phase-space grid centered at the origin, cell-offset so no
/// node lies on the coordinate axes.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseGrid {
    pub half_x: f64,
    pub half_w: f64,
    pub points_x: usize,
    pub points_w: usize,
    /// Gaussian tail-mass estimate recorded by the sizing policy (None for
    /// hand-built grids).
    pub tail_bound: Option<f64>,
}

impl PhaseGrid {
    pub fn new(half_x: f64, half_w: f64, points_x: usize, points_w: usize) -> Result<Self> {
        if points_x < 4 || points_w < 4 {
            return Err(CoreError::Validation("phase grid needs ≥ 4 points per axis".into()));
        }
        Ok(PhaseGrid { half_x, half_w, points_x, points_w, tail_bound: None })
    }

    /// Grid sized to cover Hermite content below `n_modes` at scale h, with
    /// spacing √h/4 (resolving the coherent-state width).
    pub fn for_modes(frame: &CoherentFrame, n_modes: usize) -> Self {
        let h = frame.h;
        let sh = h.sqrt();
        let nm = (n_modes.max(1) + frame.window_degree()) as f64;
        let margin = 0.25 * (2.0 * nm + 1.0).sqrt() + 10.0;
        let half = sh * ((2.0 * nm + 1.0).sqrt() * 1.25 + 10.0);
        let spacing = sh / 4.0;
        let mut m = (2.0 * half / spacing).ceil() as usize;
        if m % 2 == 1 {
            m += 1;
        }
        PhaseGrid {
            half_x: half,
            half_w: half,
            points_x: m,
            points_w: m,
            tail_bound: Some((-margin * margin / 4.0).exp()),
        }
    }

    pub fn spacing_x(&self) -> f64 {
        2.0 * self.half_x / self.points_x as f64
    }

    pub fn spacing_w(&self) -> f64 {
        2.0 * self.half_w / self.points_w as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.spacing_x() * self.spacing_w()
    }

    pub fn node_x(&self, i: usize) -> f64 {
        -self.half_x + (i as f64 + 0.5) * self.spacing_x()
    }

    pub fn node_w(&self, k: usize) -> f64 {
        -self.half_w + (k as f64 + 0.5) * self.spacing_w()
    }
}

/// A state sampled on a spatial grid, with its norm cached at construction.
#[derive(Debug, Clone)]
pub struct StateVector {
    grid: SpatialGrid,
    values: Vec<Complex64>,
    norm: f64,
}

impl StateVector {
    pub fn from_samples(grid: SpatialGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.points {
            return Err(CoreError::Shape(format!(
                "{} samples on a {}-point grid",
                values.len(),
                grid.points
            )));
        }
        let norm = state_norm(&grid, &values);
        if !norm.is_finite() {
            return Err(CoreError::Numeric("state has non-finite norm".into()));
        }
        Ok(StateVector { grid, values, norm })
    }

    pub fn zero(grid: SpatialGrid) -> Self {
        let n = grid.points;
        StateVector { grid, values: vec![Complex64::new(0.0, 0.0); n], norm: 0.0 }
    }

    /// Σ c_n ψ_n^h synthesized on `grid`.
    pub fn from_hermite(frame: &CoherentFrame, coeffs: &[Complex64], grid: SpatialGrid) -> Result<Self> {
        let sh = frame.h.sqrt();
        let required = sh * ((2.0 * coeffs.len() as f64 + 1.0).sqrt() + 8.0);
        if grid.half_width < required {
            return Err(CoreError::Coverage { required, actual: grid.half_width });
        }
        let scale = frame.h.powf(-0.25);
        let mut buf = Vec::with_capacity(coeffs.len());
        let values: Vec<Complex64> = (0..grid.points)
            .map(|j| {
                let u = grid.point(j) / sh;
                hermite::eval_all(u, coeffs.len(), &mut buf);
                let mut acc = Complex64::new(0.0, 0.0);
                for (c, p) in coeffs.iter().zip(&buf) {
                    acc += c * scale * p;
                }
                acc
            })
            .collect();
        StateVector::from_samples(grid, values)
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn scaled(&self, c: Complex64) -> StateVector {
        let values = self.values.iter().map(|v| v * c).collect();
        StateVector::from_samples(self.grid.clone(), values).expect("same grid")
    }

    /// ⟨self, other⟩ = δ Σ f ḡ (both on the same grid).
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(CoreError::Shape("inner product across different grids".into()));
        }
        let d = self.grid.spacing();
        let prods: Vec<Complex64> = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b.conj() * d)
            .collect();
        Ok(pairwise_sum_c(&prods))
    }
}

fn state_norm(grid: &SpatialGrid, values: &[Complex64]) -> f64 {
    let d = grid.spacing();
    let sq: Vec<f64> = values.iter().map(|v| v.norm_sqr() * d).collect();
    pairwise_sum(&sq).sqrt()
}

/// Samples of φ^h_{(x₀,ω₀)} on `grid`; norm is 1 up to quadrature error.
pub fn coherent_state(
    frame: &CoherentFrame,
    x0: f64,
    w0: f64,
    grid: &SpatialGrid,
) -> Result<StateVector> {
    let sh = frame.h.sqrt();
    let required = x0.abs() + 8.0 * sh * (1.0 + (frame.window_degree() as f64).sqrt());
    if grid.half_width < required {
        return Err(CoreError::Coverage { required, actual: grid.half_width });
    }
    let values: Vec<Complex64> = (0..grid.points)
        .map(|j| frame.coherent_value(x0, w0, grid.point(j)))
        .collect();
    StateVector::from_samples(grid.clone(), values)
}

/// ⟨f, φ^h_{(x₀,ω₀)}⟩ by windowed midpoint quadrature on f's grid.
///
/// The sum is restricted to |y − x₀| ≤ cut·√h where the window tail is below
/// 1e-20 of its peak; the node order is fixed, so results are bit-stable.
pub fn overlap_with_coherent(f: &StateVector, frame: &CoherentFrame, x0: f64, w0: f64) -> Complex64 {
    let grid = &f.grid;
    let sh = frame.h.sqrt();
    let cut = frame.window_cut() * sh;
    let (lo, hi) = grid.window_indices(x0, cut);
    if lo >= hi {
        return Complex64::new(0.0, 0.0);
    }
    let d = grid.spacing();
    let amp = frame.h.powf(-0.25) * d;
    let mut terms = Vec::with_capacity(hi - lo);
    for j in lo..hi {
        let y = grid.point(j);
        let win = frame.window_value((y - x0) / sh);
        if win == 0.0 {
            terms.push(Complex64::new(0.0, 0.0));
            continue;
        }
        // conj(φ^h) carries e^{-iω₀y/h}
        let phase = Complex64::from_polar(1.0, -w0 * y / frame.h);
        terms.push(f.values[j] * phase * (amp * win));
    }
    pairwise_sum_c(&terms)
}

/// Matrix of ⟨f, φ^h_{(x_j, ω_k)}⟩ over the phase grid; row j ↔ x, column k ↔ ω.
pub fn stft(frame: &CoherentFrame, f: &StateVector, pgrid: &PhaseGrid) -> Result<Vec<Vec<Complex64>>> {
    if frame.dim != 1 {
        return Err(CoreError::UnsupportedDimension(frame.dim));
    }
    if f.values.len() != f.grid.points {
        return Err(CoreError::Shape("state samples inconsistent with its grid".into()));
    }
    let rows: Vec<Vec<Complex64>> = (0..pgrid.points_x)
        .into_par_iter()
        .map(|i| {
            let x = pgrid.node_x(i);
            (0..pgrid.points_w)
                .map(|k| overlap_with_coherent(f, frame, x, pgrid.node_w(k)))
                .collect()
        })
        .collect();
    Ok(rows)
}

/// Relative defect of the Parseval identity
/// (2πh)^{-d} Σ |⟨f, φ^h⟩|² · cell − ‖f‖², normalized by ‖f‖².
pub fn parseval_defect(frame: &CoherentFrame, f: &StateVector, pgrid: &PhaseGrid) -> Result<f64> {
    if f.norm == 0.0 {
        return Ok(0.0);
    }
    let v = stft(frame, f, pgrid)?;
    let cell = pgrid.cell_area();
    let row_sums: Vec<f64> = v
        .par_iter()
        .map(|row| {
            let sq: Vec<f64> = row.iter().map(|z| z.norm_sqr() * cell).collect();
            pairwise_sum(&sq)
        })
        .collect();
    let total = pairwise_sum(&row_sums) / (2.0 * std::f64::consts::PI * frame.h);
    let n2 = f.norm * f.norm;
    Ok((total - n2).abs() / n2)
}

/// Defect of the reproducing identity
/// V f(p) = (2πh)^{-d} Σ_z V f(z) ⟨φ^h_z, φ^h_p⟩ · cell,
/// maximized over a fixed 3×3 lattice of interior probe points.
pub fn reproducing_defect(frame: &CoherentFrame, f: &StateVector, pgrid: &PhaseGrid) -> Result<f64> {
    if f.norm == 0.0 {
        return Ok(0.0);
    }
    let v = stft(frame, f, pgrid)?;
    let cell = pgrid.cell_area();
    let inv = 1.0 / (2.0 * std::f64::consts::PI * frame.h);

    // synthesis grid covering every phase-grid center
    let sh = frame.h.sqrt();
    let grid = SpatialGrid::for_task(
        frame.h,
        pgrid.half_x + sh,
        pgrid.half_w + sh,
        frame.window_degree() + 1,
    );

    let quarters = [1usize, 2, 3];
    let mut worst = 0.0f64;
    for qi in quarters {
        for qk in quarters {
            let pi = qi * pgrid.points_x / 4;
            let pk = qk * pgrid.points_w / 4;
            let (px, pw) = (pgrid.node_x(pi), pgrid.node_w(pk));
            let probe_state = coherent_state(frame, px, pw, &grid)?;
            let contribs: Vec<Complex64> = (0..pgrid.points_x)
                .into_par_iter()
                .map(|i| {
                    let x = pgrid.node_x(i);
                    let row: Vec<Complex64> = (0..pgrid.points_w)
                        .map(|k| {
                            // K(p, z) = ⟨φ_z, φ_p⟩ via the same spatial quadrature
                            let z_state = coherent_state(frame, x, pgrid.node_w(k), &grid)
                                .expect("synthesis grid covers the phase grid");
                            let kernel = z_state.inner(&probe_state).expect("same grid");
                            v[i][k] * kernel * cell
                        })
                        .collect();
                    pairwise_sum_c(&row)
                })
                .collect();
            let reproduced = pairwise_sum_c(&contribs) * inv;
            let defect = (v[pi][pk] - reproduced).norm();
            worst = worst.max(defect);
        }
    }
    Ok(worst)
}

/// Unitary dilation D_h f(x) = h^{d/4} f(h^{1/2} x) on the rescaled grid.
///
/// The output grid is the input grid divided by √h, so no interpolation is
/// involved and the norm is preserved exactly.
pub fn dilate(f: &StateVector, h: f64) -> Result<StateVector> {
    if !(h > 0.0) {
        return Err(CoreError::Validation(format!("dilation scale must be positive, got {h}")));
    }
    let sh = h.sqrt();
    let grid = SpatialGrid::new(f.grid.half_width / sh, f.grid.points)?;
    let amp = h.powf(0.25);
    let values = f.values.iter().map(|v| v * amp).collect();
    StateVector::from_samples(grid, values)
}

/// Q_{a,h}(f) = (2πh)^{-d} Σ a(x, ω) |⟨f, φ^h_{(x,ω)}⟩|² · cell ≥ 0.
pub fn quadratic_form(
    sym: &crate::symbol::Symbol,
    frame: &CoherentFrame,
    f: &StateVector,
    pgrid: &PhaseGrid,
) -> Result<f64> {
    if sym.dim != 1 {
        return Err(CoreError::UnsupportedDimension(sym.dim));
    }
    let rows: Vec<Result<f64>> = (0..pgrid.points_x)
        .into_par_iter()
        .map(|i| {
            let x = pgrid.node_x(i);
            let mut terms = Vec::with_capacity(pgrid.points_w);
            for k in 0..pgrid.points_w {
                let w = pgrid.node_w(k);
                let a = sym.eval(&[x], &[w], frame.h)?;
                let v = overlap_with_coherent(f, frame, x, w);
                terms.push(a * v.norm_sqr() * pgrid.cell_area());
            }
            Ok(pairwise_sum(&terms))
        })
        .collect();
    let mut row_vals = Vec::with_capacity(rows.len());
    for r in rows {
        row_vals.push(r?);
    }
    let total = pairwise_sum(&row_vals) / (2.0 * std::f64::consts::PI * frame.h);
    if !total.is_finite() {
        return Err(CoreError::Numeric("quadratic form accumulated a non-finite value".into()));
    }
    Ok(total)
}

/// Write a state as text: one JSON header line {l, m, d, h}, then one
/// "re im" pair per sample at full precision.
pub fn export_state_text(f: &StateVector, h: f64, path: &std::path::Path) -> Result<()> {
    use std::io::Write;
    let mut out = String::new();
    out.push_str(&format!(
        "{{\"l\": {:.17e}, \"m\": {}, \"d\": 1, \"h\": {:.17e}}}\n",
        f.grid.half_width, f.grid.points, h
    ));
    for v in &f.values {
        out.push_str(&format!("{:.17e} {:.17e}\n", v.re, v.im));
    }
    let mut file = std::fs::File::create(path).map_err(|e| CoreError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    file.write_all(out.as_bytes()).map_err(|e| CoreError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

/// Read a state written by [`export_state_text`]; returns the state and h.
pub fn import_state_text(path: &std::path::Path) -> Result<(StateVector, f64)> {
    let text = std::fs::read_to_string(path).map_err(|e| CoreError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| CoreError::Validation("empty state file".into()))?;
    let field = |name: &str| -> Result<f64> {
        let key = format!("\"{name}\":");
        let at = header
            .find(&key)
            .ok_or_else(|| CoreError::Validation(format!("state header missing {name}")))?;
        let rest = &header[at + key.len()..];
        let end = rest
            .find([',', '}'])
            .ok_or_else(|| CoreError::Validation("malformed state header".into()))?;
        rest[..end]
            .trim()
            .parse::<f64>()
            .map_err(|e| CoreError::Validation(format!("bad {name} in state header: {e}")))
    };
    let l = field("l")?;
    let m = field("m")? as usize;
    let h = field("h")?;
    let mut values = Vec::with_capacity(m);
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let mut it = line.split_whitespace();
        let re: f64 = it
            .next()
            .ok_or_else(|| CoreError::Validation("short sample line".into()))?
            .parse()
            .map_err(|e| CoreError::Validation(format!("bad sample: {e}")))?;
        let im: f64 = it
            .next()
            .ok_or_else(|| CoreError::Validation("short sample line".into()))?
            .parse()
            .map_err(|e| CoreError::Validation(format!("bad sample: {e}")))?;
        values.push(Complex64::new(re, im));
    }
    let state = StateVector::from_samples(SpatialGrid::new(l, m)?, values)?;
    Ok((state, h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbol::Symbol;
    use approx::assert_relative_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn gaussian_frame(h: f64) -> CoherentFrame {
        CoherentFrame::gaussian(h).unwrap()
    }

    #[test]
    fn coherent_value_at_origin_is_quarter_root_pi() {
        let frame = gaussian_frame(1.0);
        let v = frame.coherent_value(0.0, 0.0, 0.0);
        assert_relative_eq!(v.re, 0.7511255444649425, max_relative = 1e-12);
        assert_eq!(v.im, 0.0);
    }

    #[test]
    fn coherent_states_are_unit_norm() {
        for &(x0, w0, h) in &[(0.0f64, 0.0f64, 1.0f64), (1.5, -3.0, 0.25), (-2.0, 7.0, 2.0)] {
            let frame = gaussian_frame(h);
            let grid = SpatialGrid::for_task(h, x0.abs(), w0.abs(), 1);
            let st = coherent_state(&frame, x0, w0, &grid).unwrap();
            assert!((st.norm() - 1.0).abs() < 1e-8, "norm = {}", st.norm());
        }
    }

    #[test]
    fn coherent_state_modulus_matches_formula() {
        let h = 0.25;
        let frame = gaussian_frame(h);
        let grid = SpatialGrid::for_task(h, 1.0, 0.0, 1);
        let st = coherent_state(&frame, 1.0, 0.0, &grid).unwrap();
        let mut peak = 0.0f64;
        let mut peak_x = 0.0;
        for j in 0..grid.points {
            let x = grid.point(j);
            let want = h.powf(-0.25)
                * std::f64::consts::PI.powf(-0.25)
                * (-(x - 1.0) * (x - 1.0) / (2.0 * h)).exp();
            assert!((st.values()[j].norm() - want).abs() < 1e-12);
            if st.values()[j].norm() > peak {
                peak = st.values()[j].norm();
                peak_x = x;
            }
        }
        assert!((peak_x - 1.0).abs() < grid.spacing());
    }

    #[test]
    fn undersized_grid_reports_required_half_width() {
        let frame = gaussian_frame(1.0);
        let grid = SpatialGrid::new(4.0, 64).unwrap();
        match coherent_state(&frame, 10.0, 0.0, &grid) {
            Err(CoreError::Coverage { required, actual }) => {
                assert!(required > 10.0);
                assert_eq!(actual, 4.0);
            }
            other => panic!("expected coverage error, got {other:?}"),
        }
    }

    /// Independent 1-D oracle for V φ at a few points: dense Simpson
    /// quadrature of ∫ φ(y) e^{-iωy} φ(y − x) dy, h = 1.
    fn stft_gaussian_oracle(x: f64, w: f64) -> Complex64 {
        let n = 20_000;
        let l = 12.0;
        let dy = 2.0 * l / n as f64;
        let phi = |y: f64| std::f64::consts::PI.powf(-0.25) * (-0.5 * y * y).exp();
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..=n {
            let y = -l + j as f64 * dy;
            let simpson = if j == 0 || j == n {
                1.0
            } else if j % 2 == 1 {
                4.0
            } else {
                2.0
            };
            acc += Complex64::from_polar(1.0, -w * y) * (phi(y) * phi(y - x) * simpson);
        }
        acc * (dy / 3.0)
    }

    #[test]
    fn stft_of_gaussian_matches_oracle_and_closed_form() {
        let frame = gaussian_frame(1.0);
        let grid = SpatialGrid::for_task(1.0, 0.0, 6.0, 1);
        let f = coherent_state(&frame, 0.0, 0.0, &grid).unwrap();
        let pgrid = PhaseGrid::for_modes(&frame, 1);
        let v = stft(&frame, &f, &pgrid).unwrap();
        for (i, k) in [(pgrid.points_x / 2, pgrid.points_w / 2), (10, 20), (31, 47)] {
            let (x, w) = (pgrid.node_x(i), pgrid.node_w(k));
            let got = v[i][k];
            // modulus: e^{-(x²+ω²)/4}
            assert!(
                (got.norm() - (-(x * x + w * w) / 4.0).exp()).abs() < 1e-6,
                "modulus at ({x}, {w})"
            );
            let oracle = stft_gaussian_oracle(x, w);
            assert!((got - oracle).norm() < 1e-6, "oracle at ({x}, {w})");
        }
        // ⟨φ, φ⟩ = 1 at the origin: nearest node is half a cell away; compare
        // against the oracle there instead of asserting exactly 1.
        let c = pgrid.points_x / 2;
        let oracle = stft_gaussian_oracle(pgrid.node_x(c), pgrid.node_w(c));
        assert!((v[c][c] - oracle).norm() < 1e-6);
        let direct = overlap_with_coherent(&f, &frame, 0.0, 0.0);
        assert!((direct.re - 1.0).abs() < 1e-8 && direct.im.abs() < 1e-12);
    }

    #[test]
    fn stft_peaks_at_the_coherent_center_with_unit_value() {
        let h = 0.5;
        let frame = gaussian_frame(h);
        let pgrid = PhaseGrid::for_modes(&frame, 1);
        // put the center exactly on a phase-grid node
        let (ci, ck) = (3 * pgrid.points_x / 4, pgrid.points_w / 4);
        let (x1, w1) = (pgrid.node_x(ci), pgrid.node_w(ck));
        let grid = SpatialGrid::for_task(h, pgrid.half_x, pgrid.half_w, 1);
        let f = coherent_state(&frame, x1, w1, &grid).unwrap();
        let v = stft(&frame, &f, &pgrid).unwrap();
        let mut best = (0usize, 0usize, 0.0f64);
        for i in 0..pgrid.points_x {
            for k in 0..pgrid.points_w {
                if v[i][k].norm() > best.2 {
                    best = (i, k, v[i][k].norm());
                }
            }
        }
        assert_eq!((best.0, best.1), (ci, ck));
        assert!((best.2 - 1.0).abs() < 1e-6, "peak value {}", best.2);
    }

    #[test]
    fn stft_modulus_ignores_unimodular_prefactors() {
        let frame = gaussian_frame(1.0);
        let grid = SpatialGrid::for_task(1.0, 0.0, 4.0, 4);
        let coeffs = [
            Complex64::new(0.6, 0.0),
            Complex64::new(0.0, -0.8),
        ];
        let f = StateVector::from_hermite(&frame, &coeffs, grid).unwrap();
        let g = f.scaled(Complex64::from_polar(1.0, 1.234));
        let pgrid = PhaseGrid::for_modes(&frame, 2);
        let vf = stft(&frame, &f, &pgrid).unwrap();
        let vg = stft(&frame, &g, &pgrid).unwrap();
        for i in (0..pgrid.points_x).step_by(7) {
            for k in (0..pgrid.points_w).step_by(7) {
                assert!((vf[i][k].norm() - vg[i][k].norm()).abs() < 1e-12);
            }
        }
    }

    /// |V φ_{(x₁,ω₁)}(x, ω)| = |V φ(x − x₁, ω − ω₁)|.
    #[test]
    fn stft_covariance_under_phase_space_translation() {
        let frame = gaussian_frame(1.0);
        let pgrid = PhaseGrid::for_modes(&frame, 1);
        let shift = 8; // whole number of cells
        let (x1, w1) = (
            shift as f64 * pgrid.spacing_x(),
            -(shift as f64) * pgrid.spacing_w(),
        );
        let grid = SpatialGrid::for_task(1.0, pgrid.half_x, pgrid.half_w, 1);
        let f0 = coherent_state(&frame, 0.0, 0.0, &grid).unwrap();
        let f1 = coherent_state(&frame, x1, w1, &grid).unwrap();
        let v0 = stft(&frame, &f0, &pgrid).unwrap();
        let v1 = stft(&frame, &f1, &pgrid).unwrap();
        for i in shift..pgrid.points_x {
            for k in 0..pgrid.points_w - shift {
                let a = v1[i][k].norm();
                let b = v0[i - shift][k + shift].norm();
                assert!((a - b).abs() < 1e-6, "mismatch at ({i}, {k}): {a} vs {b}");
            }
        }
    }

    #[test]
    fn parseval_defect_small_for_gaussian_and_zero_for_zero() {
        let frame = gaussian_frame(1.0);
        let grid = SpatialGrid::for_task(1.0, 0.0, 6.0, 1);
        let f = coherent_state(&frame, 0.0, 0.0, &grid).unwrap();
        let pgrid = PhaseGrid::for_modes(&frame, 1);
        assert!(parseval_defect(&frame, &f, &pgrid).unwrap() < 1e-6);
        let z = StateVector::zero(grid);
        assert_eq!(parseval_defect(&frame, &z, &pgrid).unwrap(), 0.0);
    }

    #[test]
    fn parseval_defect_small_for_first_hermite_mode() {
        let h = 0.5;
        let frame = gaussian_frame(h);
        let grid = SpatialGrid::for_task(h, 0.0, 4.0, 2);
        let coeffs = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
        let f = StateVector::from_hermite(&frame, &coeffs, grid).unwrap();
        let pgrid = PhaseGrid::for_modes(&frame, 2);
        assert!(parseval_defect(&frame, &f, &pgrid).unwrap() < 1e-6);
    }

    #[test]
    fn parseval_defect_decreases_under_grid_refinement() {
        let frame = gaussian_frame(1.0);
        let grid = SpatialGrid::for_task(1.0, 0.0, 7.0, 1);
        let f = coherent_state(&frame, 0.0, 0.0, &grid).unwrap();
        let ladder = [(3.4, 28), (4.4, 40), (6.0, 60)];
        let mut defects = Vec::new();
        for (l, m) in ladder {
            let pg = PhaseGrid::new(l, l, m, m).unwrap();
            defects.push(parseval_defect(&frame, &f, &pg).unwrap());
        }
        assert!(defects[0] > defects[1] && defects[1] > defects[2], "{defects:?}");
    }

    #[test]
    fn reproducing_defect_small_for_gaussian_and_seeded_state() {
        let frame = gaussian_frame(1.0);
        let grid = SpatialGrid::for_task(1.0, 0.0, 8.0, 6);
        let f = coherent_state(&frame, 0.0, 0.0, &grid).unwrap();
        let pgrid = PhaseGrid::for_modes(&frame, 1);
        assert!(reproducing_defect(&frame, &f, &pgrid).unwrap() < 1e-5);
        let z = StateVector::zero(grid.clone());
        assert_eq!(reproducing_defect(&frame, &z, &pgrid).unwrap(), 0.0);

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let coeffs: Vec<Complex64> = (0..6)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let norm: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        let coeffs: Vec<Complex64> = coeffs.iter().map(|c| c / norm).collect();
        let f = StateVector::from_hermite(&frame, &coeffs, grid).unwrap();
        let pgrid = PhaseGrid::for_modes(&frame, 6);
        assert!(reproducing_defect(&frame, &f, &pgrid).unwrap() < 1e-4);
    }

    #[test]
    fn dilate_is_unitary_and_inverts() {
        let frame = gaussian_frame(1.0);
        let grid = SpatialGrid::for_task(1.0, 0.0, 3.0, 3);
        let coeffs = [
            Complex64::new(0.5, 0.1),
            Complex64::new(-0.3, 0.2),
            Complex64::new(0.1, 0.7),
        ];
        let f = StateVector::from_hermite(&frame, &coeffs, grid).unwrap();
        let g1 = dilate(&f, 1.0).unwrap();
        assert_eq!(g1.values(), f.values());
        for &h in &[0.3, 2.0, 5.0] {
            let g = dilate(&f, h).unwrap();
            assert!((g.norm() - f.norm()).abs() < 1e-10);
            let back = dilate(&g, 1.0 / h).unwrap();
            for (a, b) in back.values().iter().zip(f.values()) {
                assert!((a - b).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn dilating_the_window_gives_the_scaled_ground_profile() {
        let frame = gaussian_frame(1.0);
        let grid = SpatialGrid::for_task(1.0, 0.0, 0.0, 1);
        let phi = coherent_state(&frame, 0.0, 0.0, &grid).unwrap();
        let h = 0.4;
        let d = dilate(&phi, h).unwrap();
        assert!((d.norm() - 1.0).abs() < 1e-8);
        for j in (0..d.grid().points).step_by(17) {
            let x = d.grid().point(j);
            let want = h.powf(0.25)
                * std::f64::consts::PI.powf(-0.25)
                * (-h * x * x / 2.0).exp();
            assert!((d.values()[j].re - want).abs() < 1e-10);
        }
    }

    #[test]
    fn quadratic_form_of_constant_is_the_constant() {
        let frame = gaussian_frame(0.7);
        let grid = SpatialGrid::for_task(0.7, 0.0, 5.0, 1);
        let f = coherent_state(&frame, 0.0, 0.0, &grid).unwrap();
        let pgrid = PhaseGrid::for_modes(&frame, 1);
        let q = quadratic_form(&Symbol::constant(3.25), &frame, &f, &pgrid).unwrap();
        assert_relative_eq!(q, 3.25, max_relative = 1e-6);
    }

    #[test]
    fn quadratic_form_of_oscillator_symbol_on_ground_state_is_2h() {
        for &h in &[0.25, 1.0] {
            let frame = gaussian_frame(h);
            let grid = SpatialGrid::for_task(h, 0.0, 5.0 * h.sqrt(), 1);
            let f = coherent_state(&frame, 0.0, 0.0, &grid).unwrap();
            let pgrid = PhaseGrid::for_modes(&frame, 1);
            let q = quadratic_form(&Symbol::mod_z_squared(1), &frame, &f, &pgrid).unwrap();
            assert!((q - 2.0 * h).abs() < 1e-5, "h = {h}: Q = {q}");
        }
    }

    #[test]
    fn quadratic_form_is_monotone_in_the_symbol() {
        let frame = gaussian_frame(1.0);
        let grid = SpatialGrid::for_task(1.0, 0.0, 5.0, 3);
        let coeffs = [
            Complex64::new(0.8, 0.0),
            Complex64::new(0.0, 0.6),
        ];
        let f = StateVector::from_hermite(&frame, &coeffs, grid).unwrap();
        let pgrid = PhaseGrid::for_modes(&frame, 2);
        let qa = quadratic_form(&Symbol::x_squared(), &frame, &f, &pgrid).unwrap();
        let qb = quadratic_form(&Symbol::mod_z_squared(1), &frame, &f, &pgrid).unwrap();
        assert!(qa <= qb + 1e-10);
    }

    /// Q_{a,h}(f) = Q_{a(√h ·),1}(D_h f) (the rescaling identity).
    #[test]
    fn quadratic_form_rescaling_identity() {
        let h = 0.49;
        let frame_h = gaussian_frame(h);
        let frame_1 = gaussian_frame(1.0);
        let grid = SpatialGrid::for_task(h, 0.0, 5.0, 4);
        let coeffs = [
            Complex64::new(0.6, 0.2),
            Complex64::new(0.3, -0.5),
            Complex64::new(0.2, 0.4),
        ];
        let f = StateVector::from_hermite(&frame_h, &coeffs, grid).unwrap();
        let a = Symbol::mod_z_squared(1);
        let q_h = quadratic_form(&a, &frame_h, &f, &PhaseGrid::for_modes(&frame_h, 3)).unwrap();
        let fd = dilate(&f, h).unwrap();
        let q_1 = quadratic_form(
            &a.rescaled(h.sqrt()),
            &frame_1,
            &fd,
            &PhaseGrid::for_modes(&frame_1, 3),
        )
        .unwrap();
        assert!((q_h - q_1).abs() < 1e-6 * q_h.max(1.0), "{q_h} vs {q_1}");
    }

    #[test]
    fn state_text_round_trip() {
        let frame = gaussian_frame(0.8);
        let grid = SpatialGrid::for_task(0.8, 0.0, 2.0, 2);
        let coeffs = [Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
        let f = StateVector::from_hermite(&frame, &coeffs, grid).unwrap();
        let dir = std::env::temp_dir().join("antiwick-state-io-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("state.txt");
        export_state_text(&f, 0.8, &path).unwrap();
        let (g, h) = import_state_text(&path).unwrap();
        assert_eq!(h, 0.8);
        assert_eq!(g.grid(), f.grid());
        for (a, b) in g.values().iter().zip(f.values()) {
            assert_eq!(a, b);
        }
        assert!((g.norm() - f.norm()).abs() < 1e-12);
    }

    #[test]
    fn phase_grid_policy_records_a_small_tail_bound() {
        for &h in &[0.01, 1.0] {
            let frame = gaussian_frame(h);
            for &n in &[1usize, 8, 64] {
                let pg = PhaseGrid::for_modes(&frame, n);
                let bound = pg.tail_bound.expect("policy-built grids carry a certificate");
                assert!(bound < 1e-8, "h={h} n={n}: tail bound {bound}");
                assert!(pg.spacing_x() <= h.sqrt() / 4.0 + 1e-12);
            }
        }
        let raw = PhaseGrid::new(3.0, 3.0, 16, 16).unwrap();
        assert!(raw.tail_bound.is_none());
    }

    #[test]
    fn state_norm_cache_matches_recomputation() {
        let frame = gaussian_frame(0.7);
        let grid = SpatialGrid::for_task(0.7, 0.0, 3.0, 3);
        let coeffs = [
            Complex64::new(0.5, -0.2),
            Complex64::new(0.1, 0.3),
            Complex64::new(-0.6, 0.4),
        ];
        let f = StateVector::from_hermite(&frame, &coeffs, grid).unwrap();
        let d = f.grid().spacing();
        let direct: f64 = f.values().iter().map(|v| v.norm_sqr() * d).sum::<f64>().sqrt();
        assert!((f.norm() - direct).abs() < 1e-10);
    }

    #[test]
    fn hermite_synthesis_demands_grid_coverage() {
        let frame = gaussian_frame(1.0);
        let coeffs = vec![Complex64::new(1.0, 0.0); 64];
        let grid = SpatialGrid::new(5.0, 64).unwrap();
        assert!(matches!(
            StateVector::from_hermite(&frame, &coeffs, grid),
            Err(CoreError::Coverage { .. })
        ));
    }

    #[test]
    fn hermite_window_frames_validate_norm() {
        // √0.5 (ψ0 + ψ1) is unit norm
        let c = (0.5f64).sqrt();
        assert!(CoherentFrame::with_hermite_window(1.0, vec![c, c], "mixed").is_ok());
        assert!(CoherentFrame::with_hermite_window(1.0, vec![0.5, 0.5], "bad").is_err());
    }
}
