//! Almost-holomorphic extensions: evaluators for f~(z) and dbar f~(z) with
//! closed-form dbar integrands. The dbar field is always computed from its
//! own expression, never by numerically differentiating f~ — the decay of
//! dbar toward the axis is the quantity everything downstream depends on.

pub mod chi;
pub mod ext1d;
pub mod grid;
pub mod md;

pub use chi::CutoffChi;
pub use ext1d::{
    extend_fourier, extend_fourier_with_margins, extend_pole, extend_taylor,
    extend_taylor_default, DecayOrder, Extension1D, ExtensionMethod, PSI_INNER, PSI_OUTER,
};
pub use grid::{fourier_samples, FourierSamples, FrequencyGrid};
pub use md::{extend_md, ExtensionMD, MdMethod};

/// Least-squares slope of y against x. Used for all the measured decay and
/// convergence rates.
pub fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Dyadic decay table (log2 y, log2 sup_x |dbar f~(x+iy)|) for y = 2^-k.
pub fn dbar_decay_table(ext: &Extension1D, k_range: std::ops::RangeInclusive<i32>) -> Vec<(f64, f64)> {
    k_range
        .map(|k| {
            let y = 2.0f64.powi(-k);
            let s = ext.sup_dbar_on_line(y, 160);
            (-(k as f64), s.log2())
        })
        .collect()
}
