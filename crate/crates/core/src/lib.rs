//! Numerical toolkit for coherent-state (anti-Wick) operators with
//! nonnegative phase-space symbols: operator assembly in a truncated Hermite
//! basis, bottom-of-spectrum solves, and the ball-average gap functionals
//! that bracket the spectral bottom uniformly in the scale parameter h.

pub mod coherent;
pub mod error;
pub mod gap;
pub mod hermite;
pub mod numeric;
pub mod quantize;
pub mod search;
pub mod spectral;
pub mod symbol;

pub use coherent::{
    coherent_state, dilate, parseval_defect, quadratic_form, reproducing_defect, stft,
    CoherentFrame, PhaseGrid, SpatialGrid, StateVector,
};
pub use error::{CoreError, Result};
pub use gap::{
    c_r_profile, default_shells, discreteness_indicator, estimate_gap_values, lambda_ess_gap,
    lambda_gap, lambda_sup_ess_gap, lambda_sup_gap, Discreteness, GapEstimate, GapValues,
    SearchConfig, ShellEstimate, ShellPoint,
};
pub use quantize::{
    assemble_auto, assemble_polynomial, assemble_quadrature, assemble_radial, AssemblyRoute,
    HermiteOperator, RadialQuadrature,
};
pub use spectral::{converge_bottom, eigen_accumulation, spectrum_bottom, SpectrumResult};
pub use symbol::{
    ainfty_constant, ainfty_constant_sampled, ball_average, ball_integral, eval_symbol,
    growth_check, AInftyReport, BallSpec, GrowthFit, PolyTerm, RealPoly, SemiclassicalClass,
    Symbol, SymbolKind,
};
