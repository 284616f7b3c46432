use std::f64::consts::PI;

use super::ConvolutionOperator;
use crate::graph::symmetrize;
use crate::linalg::{ensure_square, Complex64, ComplexMatrix, RealMatrix};
use crate::{Error, Result};

/// `H^(q) = A_s ⊙ exp(i·2πq(A - Aᵀ))`.
pub fn magnetic_h(a: &RealMatrix, q: f64) -> Result<ComplexMatrix> {
    check_q(q)?;
    let n = ensure_square(a)?;
    let mut h = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let (aij, aji) = (a[(i, j)], a[(j, i)]);
            let a_s = 0.5 * (aij + aji);
            let phase = 2.0 * PI * q * (aij - aji);
            let v = Complex64::new(a_s * phase.cos(), a_s * phase.sin());
            h[(i, j)] = v;
            h[(j, i)] = v.conj();
        }
        h[(i, i)] = Complex64::new(h[(i, i)].re, 0.0);
    }
    Ok(h)
}

/// `L^(q) = D_s - H^(q)` with `D_s = Diag(A_s e)`, or its normalized form.
pub fn magnetic_laplacian(a: &RealMatrix, q: f64, normalized: bool) -> Result<ComplexMatrix> {
    Magnetic::new(q)?.laplacian(a, normalized)
}

fn check_q(q: f64) -> Result<()> {
    if !(q >= 0.0 && q.is_finite()) {
        return Err(Error::Domain(format!(
            "charge parameter q must be >= 0, got {q}"
        )));
    }
    Ok(())
}

/// Magnetic Laplacian with charge parameter `q`.
#[derive(Debug, Clone, Copy)]
pub struct Magnetic {
    q: f64,
}

impl Magnetic {
    pub fn new(q: f64) -> Result<Self> {
        check_q(q)?;
        Ok(Self { q })
    }

    pub fn q(&self) -> f64 {
        self.q
    }
}

impl ConvolutionOperator for Magnetic {
    fn name(&self) -> &str {
        "magnetic"
    }

    fn hermitian_adjacency(&self, a: &RealMatrix) -> Result<ComplexMatrix> {
        magnetic_h(a, self.q)
    }

    fn degrees(&self, a: &RealMatrix) -> Result<Vec<f64>> {
        let s = symmetrize(a)?;
        Ok((0..s.nrows()).map(|i| s.row(i).sum()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::inf_norm_diff;

    fn single_edge(w: f64) -> RealMatrix {
        RealMatrix::from_row_slice(2, 2, &[0.0, w, 0.0, 0.0])
    }

    #[test]
    fn sign_pattern_table() {
        let h = magnetic_h(&single_edge(0.8), 0.25).unwrap();
        assert!((h[(0, 1)].re - 0.4 * 0.309).abs() < 1e-3);
        assert!((h[(0, 1)].im - 0.4 * 0.951).abs() < 1e-3);
        let h = magnetic_h(&single_edge(2.0), 0.25).unwrap();
        assert!((h[(0, 1)] - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        let h = magnetic_h(&single_edge(5.0), 0.25).unwrap();
        assert!((h[(0, 1)] - Complex64::new(0.0, 2.5)).norm() < 1e-12);
        let h = magnetic_h(&single_edge(36.0), 0.25).unwrap();
        assert!((h[(0, 1)] - Complex64::new(18.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn q_zero_is_symmetrized_laplacian() {
        let a = RealMatrix::from_row_slice(3, 3, &[0.0, 2.0, 0.0, 0.5, 0.0, 1.0, 3.0, 0.0, 0.0]);
        let l = magnetic_laplacian(&a, 0.0, false).unwrap();
        let s = symmetrize(&a).unwrap();
        let d = RealMatrix::from_diagonal(&nalgebra::DVector::from_fn(3, |i, _| s.row(i).sum()));
        let expected = (d - s).map(|x| Complex64::new(x, 0.0));
        assert_eq!(inf_norm_diff(&l, &expected), 0.0);
    }

    #[test]
    fn rejects_negative_q() {
        assert!(matches!(Magnetic::new(-0.1), Err(Error::Domain(_))));
    }
}
