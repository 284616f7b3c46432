use crate::linalg::{Complex64, ComplexMatrix, RealMatrix, SparseComplex};
use crate::{Error, Result};

/// Learnable filter matrix Θ (c_in × c_out).
#[derive(Debug, Clone, PartialEq)]
pub struct ConvLayerParams {
    pub theta: ComplexMatrix,
}

/// Fixed propagation matrix, stored sparse together with its adjoint for
/// the backward pass.
#[derive(Debug, Clone)]
pub struct Propagation {
    forward: SparseComplex,
    adjoint: SparseComplex,
}

impl Propagation {
    pub fn new(p: &ComplexMatrix) -> Result<Self> {
        crate::linalg::ensure_square(p)?;
        let forward = SparseComplex::from_dense(p);
        let adjoint = forward.adjoint();
        Ok(Self { forward, adjoint })
    }

    pub fn n(&self) -> usize {
        self.forward.nrows()
    }

    pub fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        self.forward.mul_dense(x)
    }

    pub fn apply_adjoint(&self, x: &ComplexMatrix) -> ComplexMatrix {
        self.adjoint.mul_dense(x)
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        self.forward.to_dense()
    }
}

/// φ(z) = z if Re(z) ≥ 0, else 0.
pub fn complex_relu(z: &ComplexMatrix) -> ComplexMatrix {
    z.map(|v| {
        if v.re >= 0.0 {
            v
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// `[Re(Z), Im(Z)]` side by side: n×f complex to n×2f real.
pub fn unwind(z: &ComplexMatrix) -> RealMatrix {
    let (n, f) = z.shape();
    RealMatrix::from_fn(n, 2 * f, |i, j| {
        if j < f {
            z[(i, j)].re
        } else {
            z[(i, j - f)].im
        }
    })
}

/// Inverse of [`unwind`].
pub fn rewind(u: &RealMatrix) -> ComplexMatrix {
    let (n, w) = u.shape();
    let f = w / 2;
    ComplexMatrix::from_fn(n, f, |i, j| Complex64::new(u[(i, j)], u[(i, j + f)]))
}

/// φ(P X Θ).
pub fn conv_forward(
    p: &Propagation,
    x: &ComplexMatrix,
    layer: &ConvLayerParams,
) -> Result<ComplexMatrix> {
    if x.nrows() != p.n() || x.ncols() != layer.theta.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "propagation {n}x{n}, features {}x{}, filters {}x{}",
            x.nrows(),
            x.ncols(),
            layer.theta.nrows(),
            layer.theta.ncols(),
            n = p.n()
        )));
    }
    Ok(complex_relu(&(p.apply(x) * &layer.theta)))
}
