//! Plain-text matrix dumps: a `# rows cols` header followed by one
//! `row,col,re,im` line per nonzero entry. Values use the shortest decimal
//! form that parses back to the same `f64`.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::linalg::{Complex64, ComplexMatrix};
use crate::{Error, Result};

pub type MatrixDump = ComplexMatrix;

pub fn write_matrix_dump(path: &Path, m: &ComplexMatrix) -> Result<()> {
    let io = |e| Error::io(path, e);
    let mut w = BufWriter::new(File::create(path).map_err(io)?);
    writeln!(w, "# {} {}", m.nrows(), m.ncols()).map_err(io)?;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let z = m[(i, j)];
            if z.re != 0.0 || z.im != 0.0 {
                writeln!(w, "{i},{j},{},{}", z.re, z.im).map_err(io)?;
            }
        }
    }
    w.flush().map_err(io)
}

pub fn read_matrix_dump(path: &Path) -> Result<MatrixDump> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let bad = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line: line as u64,
        message,
    };
    let mut lines = BufReader::new(file).lines().enumerate();
    let (rows, cols) = match lines.next() {
        Some((_, Ok(header))) => {
            let dims: Vec<usize> = header
                .trim_start_matches('#')
                .split_whitespace()
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| bad(1, format!("bad header `{header}`")))?;
            match dims[..] {
                [r, c] => (r, c),
                _ => return Err(bad(1, format!("bad header `{header}`"))),
            }
        }
        Some((_, Err(e))) => return Err(Error::io(path, e)),
        None => return Err(bad(1, "empty dump".into())),
    };
    let mut m = ComplexMatrix::zeros(rows, cols);
    for (idx, line) in lines {
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(bad(
                idx + 1,
                format!("expected 4 fields, found {}", fields.len()),
            ));
        }
        let i: usize = fields[0]
            .parse()
            .map_err(|_| bad(idx + 1, "bad row index".into()))?;
        let j: usize = fields[1]
            .parse()
            .map_err(|_| bad(idx + 1, "bad column index".into()))?;
        let re: f64 = fields[2]
            .parse()
            .map_err(|_| bad(idx + 1, "bad real part".into()))?;
        let im: f64 = fields[3]
            .parse()
            .map_err(|_| bad(idx + 1, "bad imaginary part".into()))?;
        if i >= rows || j >= cols {
            return Err(bad(
                idx + 1,
                format!("entry ({i}, {j}) outside {rows}x{cols}"),
            ));
        }
        m[(i, j)] = Complex64::new(re, im);
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn dump_roundtrips_bit_exactly(entries in proptest::collection::vec((any::<f64>(), any::<f64>()), 9)) {
            let m = ComplexMatrix::from_fn(3, 3, |i, j| {
                let (re, im) = entries[3 * i + j];
                let clean = |x: f64| if x.is_finite() { x } else { 0.0 };
                Complex64::new(clean(re), clean(im))
            });
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("m.txt");
            write_matrix_dump(&path, &m).unwrap();
            let back = read_matrix_dump(&path).unwrap();
            for (a, b) in m.iter().zip(back.iter()) {
                prop_assert_eq!(a.re.to_bits() == b.re.to_bits() || (a.re == 0.0 && b.re == 0.0), true);
                prop_assert_eq!(a.im.to_bits() == b.im.to_bits() || (a.im == 0.0 && b.im == 0.0), true);
            }
        }
    }

    #[test]
    fn rejects_malformed_lines() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.txt");
        std::fs::write(&path, "# 2 2\n0,1,1.0\n").unwrap();
        assert!(matches!(
            read_matrix_dump(&path),
            Err(Error::Parse { line: 2, .. })
        ));
        std::fs::write(&path, "# 2 2\n0,5,1.0,0\n").unwrap();
        assert!(matches!(read_matrix_dump(&path), Err(Error::Parse { .. })));
    }
}
