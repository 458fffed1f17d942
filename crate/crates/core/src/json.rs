//! JSON wire formats: complex matrices as `{"rows", "cols", "data": [[re, im], ...]}`
//! in row-major order and complex scalars as `[re, im]`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix_kit::{to_dyn, to_mat4, ComplexMatrix, Mat4, C64};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl MatrixJson {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let mut data = Vec::with_capacity(m.len());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let z = m[(i, j)];
                data.push([z.re, z.im]);
            }
        }
        Self { rows: m.nrows(), cols: m.ncols(), data }
    }

    pub fn from_mat4(m: &Mat4) -> Self {
        Self::from_matrix(&to_dyn(m))
    }

    pub fn from_real(m: &DMatrix<f64>) -> Self {
        Self::from_matrix(&m.map(|x| C64::new(x, 0.0)))
    }

    pub fn to_matrix(&self) -> Result<ComplexMatrix> {
        if self.rows == 0 || self.cols == 0 || self.data.len() != self.rows * self.cols {
            return Err(Error::Shape {
                expected: format!("{} entries for a {}x{} matrix", self.rows * self.cols, self.rows, self.cols),
                got: format!("{} entries", self.data.len()),
            });
        }
        if self.data.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::Input("matrix entries must be finite".into()));
        }
        Ok(DMatrix::from_fn(self.rows, self.cols, |i, j| {
            let [re, im] = self.data[i * self.cols + j];
            C64::new(re, im)
        }))
    }

    pub fn to_mat4(&self) -> Result<Mat4> {
        let m = self.to_matrix()?;
        if m.shape() != (4, 4) {
            return Err(Error::Shape { expected: "4x4".into(), got: format!("{}x{}", m.nrows(), m.ncols()) });
        }
        Ok(to_mat4(&m))
    }
}

pub fn complex_pair(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

pub fn pair_complex(p: [f64; 2]) -> C64 {
    C64::new(p[0], p[1])
}
