use nalgebra::DMatrix;

use crate::linalg::{ensure_square, max_hermitian_asymmetry, Complex64, ComplexMatrix};
use crate::{Error, Result};

/// Absolute asymmetry accepted by [`hermitian_eig`], scaled by the largest
/// entry when that exceeds one.
pub const HERMITIAN_TOL: f64 = 1e-10;

const MAX_SWEEPS: usize = 100;

/// `M = U Λ U*` with eigenvalues in ascending order.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Eigenvectors stored column-wise, in the order of `eigenvalues`.
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn lambda_min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn lambda_max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    /// `U diag(f(λ)) U*`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let u = &self.eigenvectors;
        let mut scaled = u.clone();
        for (j, &lam) in self.eigenvalues.iter().enumerate() {
            let s = f(lam);
            scaled.column_mut(j).iter_mut().for_each(|z| *z *= s);
        }
        scaled * u.adjoint()
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_spectrum(|l| l)
    }

    /// max |U U* - I|.
    pub fn unitarity_residual(&self) -> f64 {
        let u = &self.eigenvectors;
        let n = u.nrows();
        let g = u * u.adjoint() - ComplexMatrix::identity(n, n);
        g.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// max |M - U Λ U*|.
    pub fn reconstruction_residual(&self, m: &ComplexMatrix) -> f64 {
        (m - self.reconstruct())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }
}

/// Cyclic Jacobi eigensolver for complex Hermitian matrices.
///
/// Each rotation first removes the phase of the pivot `a_pq` with a diagonal
/// unitary and then applies the classical real rotation, so the combined
/// transform is `G = diag(1, e^{-iφ}) · [[c, s], [-s, c]]`.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<EigenDecomposition> {
    let n = ensure_square(m)?;
    let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let asym = max_hermitian_asymmetry(m);
    if asym > HERMITIAN_TOL * scale {
        return Err(Error::NotHermitian(asym));
    }

    let mut a: ComplexMatrix = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            Complex64::new(m[(i, i)].re, 0.0)
        } else {
            (m[(i, j)] + m[(j, i)].conj()) * 0.5
        }
    });
    let mut v = ComplexMatrix::identity(n, n);

    let frob: f64 = a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let target = (f64::EPSILON * frob).powi(2);

    let mut converged = n < 2;
    for _sweep in 0..MAX_SWEEPS {
        if converged {
            break;
        }
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum();
        if off <= target || off == 0.0 {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].norm_sqr())
            .sum();
        if off > target {
            return Err(Error::NonConvergence(MAX_SWEEPS));
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| a[(x, x)].re.total_cmp(&a[(y, y)].re));
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // Below rounding level of the diagonal: zero it instead of rotating.
    if r <= f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
        a[(p, q)] = Complex64::new(0.0, 0.0);
        a[(q, p)] = Complex64::new(0.0, 0.0);
        return;
    }
    let phase_conj = (apq / r).conj();
    let zeta = (aqq - app) / (2.0 * r);
    let t = if zeta == 0.0 {
        1.0
    } else {
        zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;

    let g_pp = Complex64::new(c, 0.0);
    let g_pq = Complex64::new(s, 0.0);
    let g_qp = phase_conj * -s;
    let g_qq = phase_conj * c;

    let n = a.nrows();
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * g_pp + akq * g_qp;
        a[(k, q)] = akp * g_pq + akq * g_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = g_pp.conj() * apk + g_qp.conj() * aqk;
        a[(q, k)] = g_pq.conj() * apk + g_qq.conj() * aqk;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * g_pp + vkq * g_qp;
        v[(k, q)] = vkp * g_pq + vkq * g_qq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use rand::Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_hermitian(n: usize, seed: u64) -> ComplexMatrix {
        let mut r = rng::rng(seed);
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = c(r.gen_range(-3.0..3.0), 0.0);
            for j in i + 1..n {
                let z = c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0));
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }

    #[test]
    fn two_by_two_example() {
        let m = ComplexMatrix::from_row_slice(
            2,
            2,
            &[c(1.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(1.0, 0.0)],
        );
        let e = hermitian_eig(&m).unwrap();
        assert!((e.eigenvalues[0] - 0.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] - 2.0).abs() < 1e-14);
        assert!(e.reconstruction_residual(&m) < 1e-14);
    }

    #[test]
    fn identity_and_diagonal() {
        let e = hermitian_eig(&ComplexMatrix::identity(3, 3)).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 1.0, 1.0]);
        assert!(e.unitarity_residual() == 0.0);

        let d = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
            c(3.0, 0.0),
            c(1.0, 0.0),
            c(2.0, 0.0),
        ]));
        let e = hermitian_eig(&d).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 2.0, 3.0]);
        assert!(e.reconstruction_residual(&d) == 0.0);
    }

    #[test]
    fn rejects_non_hermitian() {
        let m = ComplexMatrix::from_row_slice(
            2,
            2,
            &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        );
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian(_))));
        assert!(matches!(
            hermitian_eig(&ComplexMatrix::zeros(2, 3)),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn residuals_on_random_matrices() {
        for (n, seed) in [(1, 0), (5, 1), (17, 2), (60, 3), (200, 4)] {
            let m = random_hermitian(n, seed);
            let e = hermitian_eig(&m).unwrap();
            assert!(e.unitarity_residual() <= 1e-8, "n={n}");
            assert!(e.reconstruction_residual(&m) <= 1e-8, "n={n}");
            assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}
