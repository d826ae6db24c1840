//! JSON forms of matrices and projection systems.
//!
//! A complex matrix is a 2-D array of `[re, im]` pairs, row-major.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{CMatrix, HermitianMatrix, OrthogonalProjection};
use crate::scalar::C;
use crate::setsys::ProjectionSystem;

pub type MatrixJson = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_json(m: &CMatrix<f64>) -> MatrixJson {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

pub fn matrix_from_json(rows: &MatrixJson) -> Result<CMatrix<f64>> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::InvalidArgument("matrix rows have different lengths".into()));
    }
    Ok(CMatrix::from_fn(nrows, ncols, |i, j| C::new(rows[i][j][0], rows[i][j][1])))
}

pub fn hermitian_from_json(rows: &MatrixJson) -> Result<HermitianMatrix<f64>> {
    HermitianMatrix::new(matrix_from_json(rows)?)
}

/// Wire form: `{"n": N, "projections": [matrix, ...]}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProjectionSystemJson {
    pub n: usize,
    pub projections: Vec<MatrixJson>,
}

impl ProjectionSystemJson {
    pub fn from_system(s: &ProjectionSystem<f64>) -> Self {
        Self { n: s.dim(), projections: s.iter().map(|p| matrix_to_json(p.matrix())).collect() }
    }

    /// Validates every matrix as an orthogonal projection of `C^n`.
    pub fn into_system(self) -> Result<ProjectionSystem<f64>> {
        let projections = self
            .projections
            .iter()
            .map(|m| {
                let h = hermitian_from_json(m)?;
                if h.dim() != self.n {
                    return Err(Error::DimMismatch { expected: self.n, found: h.dim() });
                }
                OrthogonalProjection::from_hermitian(h)
            })
            .collect::<Result<Vec<_>>>()?;
        ProjectionSystem::new(projections)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matrix_round_trip() {
        let m = CMatrix::from_fn(2, 2, |i, j| C::new(i as f64, j as f64 - 0.5));
        assert_eq!(matrix_from_json(&matrix_to_json(&m)).unwrap(), m);
        assert!(matrix_from_json(&vec![vec![[0.0, 0.0]], vec![]]).is_err());
    }

    #[test]
    fn projection_system_parsing() {
        let ok = r#"{"n": 2, "projections": [[[[1,0],[0,0]],[[0,0],[0,0]]], [[[0.5,0],[0.5,0]],[[0.5,0],[0.5,0]]]]}"#;
        let sys = serde_json::from_str::<ProjectionSystemJson>(ok).unwrap().into_system().unwrap();
        assert_eq!(sys.len(), 2);
        assert_eq!(sys.projections()[1].rank(), 1);

        let not_projection = r#"{"n": 2, "projections": [[[[2,0],[0,0]],[[0,0],[0,0]]]]}"#;
        let parsed = serde_json::from_str::<ProjectionSystemJson>(not_projection).unwrap();
        assert!(matches!(parsed.into_system(), Err(Error::NotProjection(_))));

        let wrong_dim = r#"{"n": 3, "projections": [[[[1,0],[0,0]],[[0,0],[0,0]]]]}"#;
        let parsed = serde_json::from_str::<ProjectionSystemJson>(wrong_dim).unwrap();
        assert!(matches!(parsed.into_system(), Err(Error::DimMismatch { .. })));

        assert!(serde_json::from_str::<ProjectionSystemJson>(r#"{"n": 1, "projections": [], "x": 0}"#).is_err());
    }
}
