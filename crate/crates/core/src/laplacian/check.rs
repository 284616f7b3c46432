use crate::linalg::{ensure_square, max_hermitian_asymmetry, ComplexMatrix};
use crate::spectral::hermitian_eig;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HermitianCheckReport {
    pub is_hermitian: bool,
    pub max_asymmetry: f64,
    pub min_eigenvalue: f64,
    pub max_eigenvalue: f64,
}

impl HermitianCheckReport {
    pub fn is_psd(&self, tol: f64) -> bool {
        self.min_eigenvalue >= -tol
    }
}

/// Hermiticity and extreme eigenvalues of `m`.
///
/// The spectrum is that of the Hermitian part `(M + M*)/2`, which is `M`
/// itself whenever `is_hermitian` holds.
pub fn verify_hermitian_psd(m: &ComplexMatrix, tol: f64) -> Result<HermitianCheckReport> {
    ensure_square(m)?;
    let max_asymmetry = max_hermitian_asymmetry(m);
    let hermitian_part = (m + m.adjoint()) * crate::Complex64::new(0.5, 0.0);
    let eig = hermitian_eig(&hermitian_part)?;
    Ok(HermitianCheckReport {
        is_hermitian: max_asymmetry <= tol,
        max_asymmetry,
        min_eigenvalue: eig.lambda_min(),
        max_eigenvalue: eig.lambda_max(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laplacian::sign_magnetic_laplacian;
    use crate::linalg::{Complex64, RealMatrix};

    #[test]
    fn normalized_two_node_report() {
        let a = RealMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let r = verify_hermitian_psd(&sign_magnetic_laplacian(&a, true).unwrap(), 1e-12).unwrap();
        assert!(r.is_hermitian);
        assert!(r.min_eigenvalue.abs() < 1e-14);
        assert!((r.max_eigenvalue - 2.0).abs() < 1e-14);
        assert!(r.is_psd(1e-12));
    }

    #[test]
    fn flags_non_hermitian_input() {
        let z = Complex64::new(0.0, 0.0);
        let m = ComplexMatrix::from_row_slice(2, 2, &[z, Complex64::new(1.0, 0.0), z, z]);
        let r = verify_hermitian_psd(&m, 1e-12).unwrap();
        assert!(!r.is_hermitian);
        assert_eq!(r.max_asymmetry, 1.0);
        assert!(r.min_eigenvalue <= r.max_eigenvalue);
    }
}
