use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ConvLayerParams, ModelParams, Readout};
use crate::linalg::{Complex64, ComplexMatrix, RealMatrix};
use crate::{Error, Result};

const VERSION: u32 = 1;

/// JSON checkpoint of every parameter matrix (row-major), the dimensions and
/// the seed that produced it. Floats are written in shortest round-trip form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub seed: u64,
    pub dropout: f64,
    pub readout: Readout,
    pub in_channels: usize,
    pub filters1: usize,
    pub filters2: usize,
    pub classes: usize,
    pub layer1: Vec<[f64; 2]>,
    pub layer2: Vec<[f64; 2]>,
    pub head: Vec<f64>,
}

fn complex_rows(m: &ComplexMatrix) -> Vec<[f64; 2]> {
    (0..m.nrows())
        .flat_map(|i| (0..m.ncols()).map(move |j| (i, j)))
        .map(|(i, j)| [m[(i, j)].re, m[(i, j)].im])
        .collect()
}

fn complex_from(rows: usize, cols: usize, v: &[[f64; 2]]) -> Result<ComplexMatrix> {
    if v.len() != rows * cols {
        return Err(Error::Serde(format!(
            "expected {} entries, found {}",
            rows * cols,
            v.len()
        )));
    }
    Ok(ComplexMatrix::from_fn(rows, cols, |i, j| {
        let [re, im] = v[i * cols + j];
        Complex64::new(re, im)
    }))
}

impl Checkpoint {
    pub fn from_params(params: &ModelParams, seed: u64, dropout: f64) -> Self {
        let head = &params.head;
        Self {
            version: VERSION,
            seed,
            dropout,
            readout: params.readout,
            in_channels: params.layer1.theta.nrows(),
            filters1: params.layer1.theta.ncols(),
            filters2: params.layer2.theta.ncols(),
            classes: head.ncols(),
            layer1: complex_rows(&params.layer1.theta),
            layer2: complex_rows(&params.layer2.theta),
            head: (0..head.nrows())
                .flat_map(|i| (0..head.ncols()).map(move |j| (i, j)))
                .map(|(i, j)| head[(i, j)])
                .collect(),
        }
    }

    pub fn to_params(&self) -> Result<ModelParams> {
        if self.version != VERSION {
            return Err(Error::Serde(format!(
                "unsupported checkpoint version {}",
                self.version
            )));
        }
        let width = 2 * self.filters2 * self.readout.concat_width();
        if self.head.len() != width * self.classes {
            return Err(Error::Serde("head size does not match dimensions".into()));
        }
        Ok(ModelParams {
            layer1: ConvLayerParams {
                theta: complex_from(self.in_channels, self.filters1, &self.layer1)?,
            },
            layer2: ConvLayerParams {
                theta: complex_from(self.filters1, self.filters2, &self.layer2)?,
            },
            head: RealMatrix::from_row_slice(width, self.classes, &self.head),
            readout: self.readout,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::Serde(e.to_string()))?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Serde(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn save_load_is_bit_exact(seed in any::<u64>(), edge in any::<bool>()) {
            let readout = if edge { Readout::Edge } else { Readout::Node };
            let params = ModelParams::init(2, 3, 4, 5, readout, seed);
            let ckpt = Checkpoint::from_params(&params, seed, 0.5);
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("model.json");
            ckpt.save(&path).unwrap();
            let back = Checkpoint::load(&path).unwrap();
            prop_assert_eq!(&back, &ckpt);
            let restored = back.to_params().unwrap();
            let bits = |p: &ModelParams| p.flatten().iter().map(|x| x.to_bits()).collect::<Vec<_>>();
            prop_assert_eq!(bits(&restored), bits(&params));
        }
    }

    #[test]
    fn rejects_other_versions() {
        let params = ModelParams::init(2, 2, 2, 2, Readout::Node, 0);
        let mut ckpt = Checkpoint::from_params(&params, 0, 0.5);
        ckpt.version = 99;
        assert!(matches!(ckpt.to_params(), Err(Error::Serde(_))));
    }
}
