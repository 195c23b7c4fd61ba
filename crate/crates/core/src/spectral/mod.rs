//! Frequency masks on the discretised torus, uncertainty constants and
//! resolvent constants.
//!
//! Functions in the range of a mask are written `u = sum_j c_j e^{i xi_j x}`
//! and norms are spatial means, so that `|u|^2 = sum_j |c_j|^2`. A
//! multiplication operator compresses to the Toeplitz matrix of the
//! Fourier coefficients of its weight.

mod constants;
mod mask;
mod operator;

pub use constants::{
    calibrate_m, low_freq_extension_check, resolvent_constant, symbol_norm_sq, uncertainty_constant, ConstantKind,
    LowFrequencyReport, SpectralReport, Weight,
};
pub use mask::{annulus_containment, build_mask, Containment, FrequencyMask, MaskKind, SpectralGrid};
pub use operator::{dense_extreme, lanczos, Compression, EigenOptions, Eigenpair, Extreme};
