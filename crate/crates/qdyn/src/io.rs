//! JSON shapes for states, channels and generators (`f64` only).
//!
//! Matrices are `{dim, re, im}` with `re`, `im` flat and row-major.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channels::QuantumChannel;
use crate::error::{Error, Result};
use crate::lindblad::LindbladGenerator;
use crate::linalg;
use crate::scalar::CMatrix;
use crate::states::DensityMatrix;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub dim: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMatrix<f64>) -> Self {
        let n = m.nrows();
        let mut re = Vec::with_capacity(n * n);
        let mut im = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                re.push(m[(i, j)].re);
                im.push(m[(i, j)].im);
            }
        }
        Self { dim: n, re, im }
    }

    pub fn to_matrix(&self) -> Result<CMatrix<f64>> {
        let n = self.dim;
        for v in [&self.re, &self.im] {
            if v.len() != n * n {
                return Err(Error::DimensionMismatch { expected: n * n, got: v.len() });
            }
        }
        if self.re.iter().chain(&self.im).any(|x| !x.is_finite()) {
            return Err(Error::OutOfDomain("matrix entries must be finite".into()));
        }
        Ok(CMatrix::from_fn(n, n, |i, j| Complex64::new(self.re[i * n + j], self.im[i * n + j])))
    }

    pub fn to_density(&self) -> Result<DensityMatrix<f64>> {
        DensityMatrix::new(self.to_matrix()?)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChannelJson {
    pub dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kraus: Option<Vec<MatrixJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub choi: Option<MatrixJson>,
}

impl ChannelJson {
    pub fn from_channel(ch: &QuantumChannel<f64>) -> Self {
        match ch.kraus() {
            Some(ops) => Self { dim: ch.dim(), kraus: Some(ops.iter().map(MatrixJson::from_matrix).collect()), choi: None },
            None => Self { dim: ch.dim(), kraus: None, choi: Some(MatrixJson::from_matrix(&crate::channels::choi_of(ch))) },
        }
    }

    pub fn to_channel(&self) -> Result<QuantumChannel<f64>> {
        let ch = match (&self.kraus, &self.choi) {
            (Some(ops), None) => {
                let ops = ops.iter().map(MatrixJson::to_matrix).collect::<Result<Vec<_>>>()?;
                QuantumChannel::from_kraus(ops)?
            }
            (None, Some(c)) => QuantumChannel::from_choi(c.to_matrix()?)?,
            _ => return Err(Error::OutOfDomain("channel needs exactly one of `kraus` or `choi`".into())),
        };
        if ch.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: ch.dim() });
        }
        Ok(ch)
    }
}

/// `"pauli"`: unnormalised Pauli strings on log₂(dim) qubits (σ₁, σ₂, σ₃ for
/// a qubit); `"gell-mann"`: the normalised generalised Gell-Mann basis;
/// otherwise an explicit list of dim²−1 orthonormal traceless matrices.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BasisJson {
    Named(String),
    Explicit(Vec<MatrixJson>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorJson {
    pub dim: usize,
    #[serde(rename = "H")]
    pub h: MatrixJson,
    #[serde(rename = "C")]
    pub c: MatrixJson,
    pub basis: BasisJson,
}

impl GeneratorJson {
    pub fn from_generator(g: &LindbladGenerator<f64>) -> Self {
        Self {
            dim: g.dim(),
            h: MatrixJson::from_matrix(g.hamiltonian()),
            c: MatrixJson::from_matrix(g.kossakowski()),
            basis: BasisJson::Explicit(g.basis().iter().map(MatrixJson::from_matrix).collect()),
        }
    }

    pub fn to_generator(&self) -> Result<LindbladGenerator<f64>> {
        let n = self.dim;
        let h = self.h.to_matrix()?;
        if h.nrows() != n {
            return Err(Error::DimensionMismatch { expected: n, got: h.nrows() });
        }
        let c = self.c.to_matrix()?;
        match &self.basis {
            BasisJson::Named(name) if name == "pauli" => {
                if n < 2 || !n.is_power_of_two() {
                    return Err(Error::InvalidBasis { reason: format!("pauli basis needs a power-of-two dimension, got {}", n) });
                }
                // P/√n is orthonormal, so C refers to it scaled by n
                let scale = (n as f64).sqrt();
                let basis = linalg::pauli_strings::<f64>(n.trailing_zeros() as usize)
                    .into_iter()
                    .map(|p| p / Complex64::from(scale))
                    .collect();
                LindbladGenerator::new(h, c * Complex64::from(n as f64), basis)
            }
            BasisJson::Named(name) if name == "gell-mann" => LindbladGenerator::with_gell_mann(h, c),
            BasisJson::Named(name) => Err(Error::InvalidBasis { reason: format!("unknown basis name `{}`", name) }),
            BasisJson::Explicit(list) => {
                let basis = list.iter().map(MatrixJson::to_matrix).collect::<Result<Vec<_>>>()?;
                LindbladGenerator::new(h, c, basis)
            }
        }
    }
}
