//! Hermitian eigendecomposition and Chebyshev spectral filters.

mod chebyshev;
mod eig;

pub use chebyshev::{
    chebyshev_t, convolution_apply, convolution_apply_full, spectral_filter, ChebCoefficients,
    LambdaMax,
};
pub use eig::{hermitian_eig, EigenDecomposition, HERMITIAN_TOL};
