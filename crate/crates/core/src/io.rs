//! JSON documents exchanged with the command line and other tools.
//!
//! Complex numbers are `[re, im]` pairs; matrices are arrays of rows.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraBasis, StructureConstants};
use crate::charts::GeneralBivectorAtPoint;
use crate::error::{check_dim, Error, Result};
use crate::matrix::{ComplexMatrix, HermitianMatrix, SquareMatrix};
use crate::scalar::Real;
use crate::state::{DensityMatrix, StatePoint};

pub type ComplexRows = Vec<Vec<[f64; 2]>>;

pub fn complex_rows<T: Real>(m: &ComplexMatrix<T>) -> ComplexRows {
    m.rows()
        .into_iter()
        .map(|r| {
            r.into_iter()
                .map(|z| [z.re.to_f64_lossy(), z.im.to_f64_lossy()])
                .collect()
        })
        .collect()
}

pub fn matrix_from_rows<T: Real>(rows: &ComplexRows) -> Result<ComplexMatrix<T>> {
    let rows: Vec<Vec<Complex<T>>> = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|[re, im]| Complex::new(T::lit(*re), T::lit(*im)))
                .collect()
        })
        .collect();
    ComplexMatrix::from_rows(&rows)
}

pub fn real_rows<T: Real>(m: &SquareMatrix<T>) -> Vec<Vec<f64>> {
    m.rows()
        .into_iter()
        .map(|r| r.into_iter().map(T::to_f64_lossy).collect())
        .collect()
}

fn to_f64_vec<T: Real>(v: &[T]) -> Vec<f64> {
    v.iter().map(|x| x.to_f64_lossy()).collect()
}

fn nested_f64<T: Real>(s: &StructureConstants<T>) -> Vec<Vec<Vec<f64>>> {
    s.to_nested()
        .into_iter()
        .map(|p| p.into_iter().map(|r| to_f64_vec(&r)).collect())
        .collect()
}

/// `{"dim": N, "elements": [...], "c": [...], "d": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisJson {
    pub dim: usize,
    pub elements: Vec<ComplexRows>,
    pub c: Vec<Vec<Vec<f64>>>,
    pub d: Vec<Vec<Vec<f64>>>,
}

impl BasisJson {
    pub fn from_basis<T: Real>(basis: &AlgebraBasis<T>) -> Self {
        Self {
            dim: basis.dim(),
            elements: basis.elements().iter().map(|e| complex_rows(e.as_matrix())).collect(),
            c: nested_f64(basis.c()),
            d: nested_f64(basis.d()),
        }
    }

    pub fn to_basis<T: Real>(&self) -> Result<AlgebraBasis<T>> {
        let elements = self
            .elements
            .iter()
            .map(|rows| HermitianMatrix::new(matrix_from_rows(rows)?))
            .collect::<Result<Vec<_>>>()?;
        let conv = |n: &Vec<Vec<Vec<f64>>>| -> Result<StructureConstants<T>> {
            let nested: Vec<Vec<Vec<T>>> = n
                .iter()
                .map(|p| p.iter().map(|r| r.iter().map(|x| T::lit(*x)).collect()).collect())
                .collect();
            StructureConstants::from_nested(&nested)
        };
        AlgebraBasis::from_parts(self.dim, elements, conv(&self.c)?, conv(&self.d)?)
    }
}

/// `{"dim": N, "Y": [...]}` or `{"dim": N, "rho": [[[re, im], ...], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateJson {
    pub dim: usize,
    #[serde(rename = "Y", default, skip_serializing_if = "Option::is_none")]
    pub y: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<ComplexRows>,
}

impl StateJson {
    pub fn from_point<T: Real>(y: &StatePoint<T>) -> Self {
        Self {
            dim: y.dim(),
            y: Some(to_f64_vec(y.coords())),
            rho: None,
        }
    }

    /// Normalizes either form to coordinates. A `rho` entry must be a valid
    /// density matrix; a raw `Y` is accepted as given.
    pub fn to_point<T: Real>(&self, basis: &AlgebraBasis<T>) -> Result<StatePoint<T>> {
        check_dim(basis.dim(), self.dim)?;
        match (&self.y, &self.rho) {
            (Some(y), None) => StatePoint::new(self.dim, y.iter().map(|x| T::lit(*x)).collect()),
            (None, Some(rows)) => {
                let rho = DensityMatrix::new(HermitianMatrix::new(matrix_from_rows(rows)?)?)?;
                crate::state::to_point(&rho, basis)
            }
            _ => Err(Error::InvalidInput(
                "state needs exactly one of \"Y\" or \"rho\"".into(),
            )),
        }
    }
}

/// A Hermitian operator given as a matrix, as Pauli coefficients
/// (`N = 2`), or as coefficients in the orthonormal basis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OperatorJson {
    Matrix(ComplexRows),
    Pauli { pauli: Vec<f64> },
    Coefficients { coeffs: Vec<f64> },
}

impl OperatorJson {
    /// `pauli` and `coeffs` both mean `A = sum_mu h_mu s_mu`.
    pub fn to_hermitian<T: Real>(&self, basis: &AlgebraBasis<T>) -> Result<HermitianMatrix<T>> {
        match self {
            Self::Matrix(rows) => {
                let h = HermitianMatrix::new(matrix_from_rows(rows)?)?;
                check_dim(basis.dim(), h.dim())?;
                Ok(h)
            }
            Self::Pauli { pauli } => {
                if basis.dim() != 2 {
                    return Err(Error::InvalidInput("Pauli coefficients need N = 2".into()));
                }
                let c: Vec<T> = pauli.iter().map(|x| T::lit(*x)).collect();
                basis.reconstruct(&c)
            }
            Self::Coefficients { coeffs } => {
                let c: Vec<T> = coeffs.iter().map(|x| T::lit(*x)).collect();
                basis.reconstruct(&c)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BivectorJson {
    pub chart: String,
    pub coordinates: Vec<String>,
    pub point: Vec<f64>,
    pub components: Vec<Vec<f64>>,
}

impl BivectorJson {
    pub fn from_bivector<T: Real>(b: &GeneralBivectorAtPoint<T>) -> Self {
        Self {
            chart: b.chart.clone(),
            coordinates: b.coordinate_names.clone(),
            point: to_f64_vec(&b.point),
            components: real_rows(&b.components),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::build_basis;

    #[test]
    fn basis_json_roundtrip_is_exact() {
        let b = build_basis::<f64>(3).unwrap();
        let json = serde_json::to_string(&BasisJson::from_basis(&b)).unwrap();
        let back: BasisJson = serde_json::from_str(&json).unwrap();
        assert_eq!(back.to_basis::<f64>().unwrap(), b);
    }

    #[test]
    fn basis_json_layout() {
        let b = build_basis::<f64>(2).unwrap();
        let v = serde_json::to_value(BasisJson::from_basis(&b)).unwrap();
        assert_eq!(v["dim"], 2);
        assert_eq!(v["elements"].as_array().unwrap().len(), 4);
        assert_eq!(v["elements"][2][0][1], serde_json::json!([0.0, -1.0]));
        assert_eq!(v["c"][1][2][3], 1.0);
    }

    #[test]
    fn state_forms() {
        let b = build_basis::<f64>(2).unwrap();
        let y: StateJson = serde_json::from_str(r#"{"dim": 2, "Y": [0.5, 0, 0, 0.5]}"#).unwrap();
        let rho: StateJson =
            serde_json::from_str(r#"{"dim": 2, "rho": [[[1, 0], [0, 0]], [[0, 0], [0, 0]]]}"#).unwrap();
        assert_eq!(y.to_point(&b).unwrap(), rho.to_point(&b).unwrap());
        let both: StateJson = serde_json::from_str(r#"{"dim": 2}"#).unwrap();
        assert!(both.to_point(&b).is_err());
        let wrong: StateJson = serde_json::from_str(r#"{"dim": 3, "Y": [1]}"#).unwrap();
        assert!(wrong.to_point(&b).is_err());
    }

    #[test]
    fn operator_forms() {
        let b = build_basis::<f64>(2).unwrap();
        let p: OperatorJson = serde_json::from_str(r#"{"pauli": [0, 0, 0, 1]}"#).unwrap();
        let m: OperatorJson = serde_json::from_str(r#"[[[1, 0], [0, 0]], [[0, 0], [-1, 0]]]"#).unwrap();
        assert_eq!(p.to_hermitian(&b).unwrap(), m.to_hermitian(&b).unwrap());
        let bad: OperatorJson = serde_json::from_str(r#"[[[1, 0], [0, 1]], [[0, 1], [-1, 0]]]"#).unwrap();
        assert!(bad.to_hermitian(&b).is_err());
    }
}
