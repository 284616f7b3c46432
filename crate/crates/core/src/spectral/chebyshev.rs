use nalgebra::DVector;

use super::hermitian_eig;
use crate::linalg::{ensure_square, Complex64, ComplexMatrix};
use crate::{Error, Result};

/// Filter coefficients θ_0..θ_K.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebCoefficients(Vec<f64>);

impl ChebCoefficients {
    pub fn new(theta: Vec<f64>) -> Result<Self> {
        if theta.is_empty() {
            return Err(Error::Domain(
                "at least one Chebyshev coefficient is required".into(),
            ));
        }
        Ok(Self(theta))
    }

    pub fn order(&self) -> usize {
        self.0.len() - 1
    }

    pub fn theta(&self) -> &[f64] {
        &self.0
    }
}

/// Which λ_max rescales the spectrum onto [-1, 1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaMax {
    /// The upper bound 2 of normalized Laplacians.
    Bound,
    /// Computed with [`hermitian_eig`].
    Exact,
    Value(f64),
}

/// T_k(x) by the three-term recurrence, for x in [-1, 1].
pub fn chebyshev_t(k: usize, x: f64) -> Result<f64> {
    if !(-1.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!(
            "Chebyshev argument {x} outside [-1, 1]"
        )));
    }
    Ok(chebyshev_t_unchecked(k, x))
}

fn chebyshev_t_unchecked(k: usize, x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, x);
    if k == 0 {
        return prev;
    }
    for _ in 1..k {
        let next = 2.0 * x * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn check_dims(m: &ComplexMatrix, x: &DVector<Complex64>) -> Result<usize> {
    let n = ensure_square(m)?;
    if x.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {n}x{n} but signal has length {}",
            x.len()
        )));
    }
    Ok(n)
}

/// First-order filter θ_0 (2I - M) x.
pub fn convolution_apply(
    m: &ComplexMatrix,
    x: &DVector<Complex64>,
    theta0: f64,
) -> Result<DVector<Complex64>> {
    check_dims(m, x)?;
    Ok((x * Complex64::new(2.0, 0.0) - m * x) * Complex64::new(theta0, 0.0))
}

fn resolve_lambda_max(m: &ComplexMatrix, lambda_max: LambdaMax) -> Result<f64> {
    let value = match lambda_max {
        LambdaMax::Bound => 2.0,
        LambdaMax::Exact => hermitian_eig(m)?.lambda_max(),
        LambdaMax::Value(v) => v,
    };
    if !(value > 0.0) {
        return Err(Error::Domain(format!(
            "λ_max must be positive, got {value}"
        )));
    }
    Ok(value)
}

/// Σ θ_k T_k(M̃) x with M̃ = (2/λ_max) M - I, by the matrix recurrence.
pub fn convolution_apply_full(
    m: &ComplexMatrix,
    x: &DVector<Complex64>,
    theta: &ChebCoefficients,
    lambda_max: LambdaMax,
) -> Result<DVector<Complex64>> {
    let n = check_dims(m, x)?;
    let lmax = resolve_lambda_max(m, lambda_max)?;
    let m_tilde = m * Complex64::new(2.0 / lmax, 0.0) - ComplexMatrix::identity(n, n);

    let th = theta.theta();
    let mut t_prev = x.clone();
    let mut out = &t_prev * Complex64::new(th[0], 0.0);
    if th.len() == 1 {
        return Ok(out);
    }
    let mut t_cur = &m_tilde * x;
    out += &t_cur * Complex64::new(th[1], 0.0);
    for &coef in &th[2..] {
        let t_next = (&m_tilde * &t_cur) * Complex64::new(2.0, 0.0) - &t_prev;
        out += &t_next * Complex64::new(coef, 0.0);
        t_prev = t_cur;
        t_cur = t_next;
    }
    Ok(out)
}

/// The same filter evaluated in the eigenbasis: U (Σ θ_k T_k(Λ̃)) U* x.
pub fn spectral_filter(
    m: &ComplexMatrix,
    x: &DVector<Complex64>,
    theta: &ChebCoefficients,
    lambda_max: LambdaMax,
) -> Result<DVector<Complex64>> {
    check_dims(m, x)?;
    let eig = hermitian_eig(m)?;
    let lmax = match lambda_max {
        LambdaMax::Exact => eig.lambda_max(),
        other => resolve_lambda_max(m, other)?,
    };
    let response = eig.map_spectrum(|lam| {
        let scaled = 2.0 * lam / lmax - 1.0;
        theta
            .theta()
            .iter()
            .enumerate()
            .map(|(k, t)| t * chebyshev_t_unchecked(k, scaled))
            .sum()
    });
    Ok(response * x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use rand::Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn chebyshev_values() {
        assert_eq!(chebyshev_t(2, 0.5).unwrap(), -0.5);
        for x in [-1.0, -0.3, 0.0, 0.7, 1.0] {
            assert_eq!(chebyshev_t(0, x).unwrap(), 1.0);
            assert_eq!(chebyshev_t(1, x).unwrap(), x);
        }
        assert!(matches!(chebyshev_t(2, 1.5), Err(Error::Domain(_))));
    }

    #[test]
    fn chebyshev_matches_cosine_identity() {
        let mut r = rng::rng(11);
        for _ in 0..200 {
            let theta: f64 = r.gen_range(0.0..std::f64::consts::PI);
            for k in 0..=8 {
                let got = chebyshev_t(k, theta.cos()).unwrap();
                assert!((got - (k as f64 * theta).cos()).abs() <= 1e-12);
            }
        }
    }

    fn lsigma_norm_2node() -> ComplexMatrix {
        ComplexMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(1.0, 0.0)])
    }

    #[test]
    fn first_order_examples() {
        let x = DVector::from_vec(vec![c(1.0, 2.0), c(-0.5, 0.0)]);
        let two_i = ComplexMatrix::identity(2, 2) * c(2.0, 0.0);
        assert!(convolution_apply(&two_i, &x, 1.0)
            .unwrap()
            .iter()
            .all(|z| z.norm() == 0.0));
        assert_eq!(
            convolution_apply(&ComplexMatrix::zeros(2, 2), &x, 1.0).unwrap(),
            &x * c(2.0, 0.0)
        );

        let e0 = DVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        let y = convolution_apply(&lsigma_norm_2node(), &e0, 1.0).unwrap();
        assert_eq!(y, DVector::from_vec(vec![c(1.0, 0.0), c(0.0, -1.0)]));

        let short = DVector::from_vec(vec![c(1.0, 0.0)]);
        assert!(matches!(
            convolution_apply(&two_i, &short, 1.0),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn full_filter_reduces_to_first_order() {
        let m = lsigma_norm_2node();
        let x = DVector::from_vec(vec![c(0.3, -1.0), c(2.0, 0.5)]);
        let k0 = ChebCoefficients::new(vec![1.0]).unwrap();
        assert_eq!(
            convolution_apply_full(&m, &x, &k0, LambdaMax::Bound).unwrap(),
            x
        );

        let theta0 = 0.7;
        let k1 = ChebCoefficients::new(vec![theta0, -theta0]).unwrap();
        let full = convolution_apply_full(&m, &x, &k1, LambdaMax::Bound).unwrap();
        let first = convolution_apply(&m, &x, theta0).unwrap();
        assert!((full - first).iter().all(|z| z.norm() <= 1e-12));
        assert!(ChebCoefficients::new(vec![]).is_err());
    }

    #[test]
    fn recurrence_matches_spectral_route() {
        let mut r = rng::rng(5);
        for _ in 0..10 {
            let n = 10;
            let b = ComplexMatrix::from_fn(n, n, |_, _| {
                c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0))
            });
            let m = &b * b.adjoint();
            let x = DVector::from_fn(n, |_, _| c(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)));
            let theta =
                ChebCoefficients::new((0..5).map(|_| r.gen_range(-1.0..1.0)).collect()).unwrap();
            for lm in [LambdaMax::Exact, LambdaMax::Value(50.0)] {
                let a = convolution_apply_full(&m, &x, &theta, lm).unwrap();
                let s = spectral_filter(&m, &x, &theta, lm).unwrap();
                assert!((a - s).iter().all(|z| z.norm() <= 1e-8));
            }
        }
    }
}
