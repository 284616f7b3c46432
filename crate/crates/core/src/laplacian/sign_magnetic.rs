use super::ConvolutionOperator;
use crate::graph::{abs_degree_vector, symmetrize};
use crate::linalg::{ensure_square, Complex64, ComplexMatrix, RealMatrix};
use crate::Result;

fn sgn(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// `H^σ = A_s ⊙ (eeᵀ - sgn|A - Aᵀ| + i·sgn(|A| - |Aᵀ|))`.
///
/// A lone edge `(i, j)` lands in the imaginary part as `±i·A_ij/2`; a digon
/// with equal weights is real; a digon with unequal weights is imaginary
/// with the sign of the heavier direction. The sign tests compare stored
/// weights exactly.
pub fn sign_magnetic_h(a: &RealMatrix) -> Result<ComplexMatrix> {
    let n = ensure_square(a)?;
    let mut h = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let (aij, aji) = (a[(i, j)], a[(j, i)]);
            let a_s = 0.5 * (aij + aji);
            let real = 1.0 - sgn((aij - aji).abs());
            let imag = sgn(aij.abs() - aji.abs());
            let v = Complex64::new(a_s * real, a_s * imag);
            h[(i, j)] = v;
            h[(j, i)] = v.conj();
        }
    }
    Ok(h)
}

/// `L^σ = D̄_s - H^σ`, or `I - D̄_s^{-1/2} H^σ D̄_s^{-1/2}` when normalized.
pub fn sign_magnetic_laplacian(a: &RealMatrix, normalized: bool) -> Result<ComplexMatrix> {
    SignMagnetic.laplacian(a, normalized)
}

/// The parameter-free Sign-Magnetic operator.
#[derive(Debug, Clone, Copy, Default)]
pub struct SignMagnetic;

impl ConvolutionOperator for SignMagnetic {
    fn name(&self) -> &str {
        "sigma"
    }

    fn hermitian_adjacency(&self, a: &RealMatrix) -> Result<ComplexMatrix> {
        sign_magnetic_h(a)
    }

    fn degrees(&self, a: &RealMatrix) -> Result<Vec<f64>> {
        abs_degree_vector(&symmetrize(a)?)
    }
}
