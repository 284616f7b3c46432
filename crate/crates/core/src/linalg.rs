//! Dense matrix aliases and the small amount of linear algebra the rest of
//! the crate shares: Hermitian helpers and a compressed sparse row matrix for
//! the training path.

pub use nalgebra::Complex;
use nalgebra::DMatrix;

use crate::{Error, Result};

pub type Complex64 = Complex<f64>;
pub type RealMatrix = DMatrix<f64>;
pub type ComplexMatrix = DMatrix<Complex64>;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub fn ensure_square<T>(m: &DMatrix<T>) -> Result<usize> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows())
}

pub fn to_complex(m: &RealMatrix) -> ComplexMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

/// max_ij |M_ij - conj(M_ji)|.
pub fn max_hermitian_asymmetry(m: &ComplexMatrix) -> f64 {
    let n = m.nrows().min(m.ncols());
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..=i {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Bit-exact Hermitian test: real part symmetric, imaginary part skew.
pub fn is_exactly_hermitian(m: &ComplexMatrix) -> bool {
    if m.nrows() != m.ncols() {
        return false;
    }
    let n = m.nrows();
    (0..n).all(|i| (0..=i).all(|j| m[(i, j)].re == m[(j, i)].re && m[(i, j)].im == -m[(j, i)].im))
}

/// Largest absolute row sum of `a - b`.
pub fn inf_norm_diff(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    assert_eq!(a.shape(), b.shape());
    (0..a.nrows())
        .map(|i| {
            (0..a.ncols())
                .map(|j| (a[(i, j)] - b[(i, j)]).norm())
                .sum::<f64>()
        })
        .fold(0.0, f64::max)
}

/// Largest absolute entry.
pub fn max_abs(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Complex CSR matrix. Rows are stored contiguously; products against dense
/// column-major right-hand sides run one column at a time.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseComplex {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<Complex64>,
}

impl SparseComplex {
    pub fn from_dense(m: &ComplexMatrix) -> Self {
        let (rows, cols) = m.shape();
        let mut row_ptr = Vec::with_capacity(rows + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for i in 0..rows {
            for j in 0..cols {
                let v = m[(i, j)];
                if v.re != 0.0 || v.im != 0.0 {
                    col_idx.push(j);
                    values.push(v);
                }
            }
            row_ptr.push(col_idx.len());
        }
        Self {
            rows,
            cols,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn adjoint(&self) -> Self {
        let mut counts = vec![0usize; self.cols + 1];
        for &j in &self.col_idx {
            counts[j + 1] += 1;
        }
        for j in 0..self.cols {
            counts[j + 1] += counts[j];
        }
        let row_ptr = counts.clone();
        let mut next = counts;
        let mut col_idx = vec![0; self.nnz()];
        let mut values = vec![Complex64::new(0.0, 0.0); self.nnz()];
        for i in 0..self.rows {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.col_idx[k];
                let slot = next[j];
                next[j] += 1;
                col_idx[slot] = i;
                values[slot] = self.values[k].conj();
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            row_ptr,
            col_idx,
            values,
        }
    }

    pub fn mul_dense(&self, x: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, x.nrows(), "sparse product dimension mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, x.ncols());
        for c in 0..x.ncols() {
            let xc = x.column(c);
            let mut oc = out.column_mut(c);
            for i in 0..self.rows {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                    acc += self.values[k] * xc[self.col_idx[k]];
                }
                oc[i] = acc;
            }
        }
        out
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                m[(i, self.col_idx[k])] = self.values[k];
            }
        }
        m
    }
}
