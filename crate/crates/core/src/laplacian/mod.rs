//! Hermitian graph operators for directed graphs.
//!
//! Each operator pairs a Hermitian adjacency `H` with a degree vector `d`;
//! the Laplacian is `Diag(d) - H`, its normalized form
//! `I - Diag(d)^{-1/2} H Diag(d)^{-1/2}`, and the propagation matrix used by
//! the network is the normalized adjacency of `A + I`.

mod check;
mod dump;
mod magnetic;
mod registry;
mod sign_magnetic;

use std::fmt;

use crate::linalg::{ensure_square, Complex64, ComplexMatrix, RealMatrix};
use crate::{Error, Result};

pub use check::{verify_hermitian_psd, HermitianCheckReport};
pub use dump::{read_matrix_dump, write_matrix_dump, MatrixDump};
pub use magnetic::{magnetic_h, magnetic_laplacian, Magnetic};
pub use registry::{OperatorParams, OperatorRegistry};
pub use sign_magnetic::{sign_magnetic_h, sign_magnetic_laplacian, SignMagnetic};

pub trait ConvolutionOperator: fmt::Debug + Send + Sync {
    fn name(&self) -> &str;

    /// Hermitian adjacency built from a square adjacency matrix.
    fn hermitian_adjacency(&self, a: &RealMatrix) -> Result<ComplexMatrix>;

    /// Diagonal of the degree matrix paired with [`Self::hermitian_adjacency`].
    fn degrees(&self, a: &RealMatrix) -> Result<Vec<f64>>;

    fn laplacian(&self, a: &RealMatrix, normalized: bool) -> Result<ComplexMatrix> {
        let h = self.hermitian_adjacency(a)?;
        let d = self.degrees(a)?;
        if normalized {
            let inv_sqrt = d
                .iter()
                .map(|&x| rsqrt_or_zero(x))
                .collect::<Result<Vec<_>>>()?;
            let mut l = scale_hermitian(&h, &inv_sqrt) * Complex64::new(-1.0, 0.0);
            for i in 0..l.nrows() {
                l[(i, i)] += Complex64::new(1.0, 0.0);
            }
            Ok(l)
        } else {
            let mut l = -h;
            for (i, di) in d.iter().enumerate() {
                l[(i, i)] += Complex64::new(*di, 0.0);
            }
            Ok(l)
        }
    }

    /// `D̃^{-1/2} H̃ D̃^{-1/2}` for `Ã = A + I`.
    fn propagation(&self, a: &RealMatrix) -> Result<ComplexMatrix> {
        let n = ensure_square(a)?;
        let a_tilde = a + RealMatrix::identity(n, n);
        let h = self.hermitian_adjacency(&a_tilde)?;
        let d = self.degrees(&a_tilde)?;
        let inv_sqrt = d
            .iter()
            .enumerate()
            .map(|(node, &degree)| {
                if degree > 0.0 {
                    Ok(1.0 / degree.sqrt())
                } else {
                    Err(Error::NonPositiveDegree { node, degree })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(scale_hermitian(&h, &inv_sqrt))
    }
}

/// `1/sqrt(d)`, with the pseudo-inverse convention at zero.
fn rsqrt_or_zero(d: f64) -> Result<f64> {
    if d > 0.0 {
        Ok(1.0 / d.sqrt())
    } else if d == 0.0 {
        Ok(0.0)
    } else {
        Err(Error::Domain(format!(
            "negative degree {d} has no real inverse square root"
        )))
    }
}

/// `S H S` for diagonal `S`, computed on the upper triangle and mirrored so
/// Hermitian input stays exactly Hermitian.
fn scale_hermitian(h: &ComplexMatrix, s: &[f64]) -> ComplexMatrix {
    let n = h.nrows();
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = h[(i, j)] * (s[i] * s[j]);
            out[(i, j)] = v;
            out[(j, i)] = v.conj();
        }
        out[(i, i)] = Complex64::new(out[(i, i)].re, 0.0);
    }
    out
}

/// Normalized propagation matrix of either operator.
pub fn renormalized_propagation(
    a: &RealMatrix,
    use_sign_magnetic: bool,
    q: f64,
) -> Result<ComplexMatrix> {
    if use_sign_magnetic {
        SignMagnetic.propagation(a)
    } else {
        Magnetic::new(q)?.propagation(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{adjacency, DirectedGraph, Edge};
    use crate::linalg::{is_exactly_hermitian, max_abs};
    use crate::rng;
    use crate::spectral::hermitian_eig;
    use rand::Rng;

    #[test]
    fn propagation_of_empty_graph_is_identity() {
        let p = renormalized_propagation(&RealMatrix::zeros(2, 2), true, 0.0).unwrap();
        assert_eq!(p, ComplexMatrix::identity(2, 2));
        let p = renormalized_propagation(&RealMatrix::zeros(2, 2), false, 0.25).unwrap();
        assert_eq!(p, ComplexMatrix::identity(2, 2));
    }

    #[test]
    fn propagation_two_node_example() {
        let a = RealMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        let p = renormalized_propagation(&a, true, 0.0).unwrap();
        assert!((p[(0, 1)] - Complex64::new(0.0, 1.0 / 3.0)).norm() < 1e-15);
        assert!((p[(1, 0)] - Complex64::new(0.0, -1.0 / 3.0)).norm() < 1e-15);
        assert!((p[(0, 0)] - Complex64::new(1.0 / 1.5, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn propagation_spectral_radius_at_most_one() {
        for seed in 0..100 {
            let mut r = rng::rng(seed);
            let n = r.gen_range(2..15);
            let mut edges = Vec::new();
            for s in 0..n {
                for d in 0..n {
                    if s != d && r.gen_bool(0.3) {
                        let w = r.gen_range(1.0..10.0) * if r.gen_bool(0.5) { 1.0 } else { -1.0 };
                        edges.push(Edge::new(s, d, w));
                    }
                }
            }
            let a = adjacency(&DirectedGraph::new(n, edges).unwrap());
            let p = renormalized_propagation(&a, true, 0.0).unwrap();
            assert!(is_exactly_hermitian(&p));
            let e = hermitian_eig(&p).unwrap();
            let radius = e.lambda_max().abs().max(e.lambda_min().abs());
            assert!(radius <= 1.0 + 1e-8, "seed {seed}: radius {radius}");
        }
    }

    #[test]
    fn magnetic_propagation_rejects_non_positive_degree() {
        let a = RealMatrix::from_row_slice(2, 2, &[0.0, -4.0, 0.0, 0.0]);
        assert!(matches!(
            renormalized_propagation(&a, false, 0.25),
            Err(Error::NonPositiveDegree { .. })
        ));
        // The sign-magnetic operator uses |A_s| and is always defined.
        let p = renormalized_propagation(&a, true, 0.0).unwrap();
        assert!(max_abs(&p) <= 1.0);
    }
}
