//! Small dense density matrices (one or two qubits).

use nalgebra::DMatrix;
use num_complex::{Complex, Complex64};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Single-qubit basis a matrix or measurement is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Basis {
    /// `{|0⟩, |1⟩}`
    Computational,
    /// `{|+⟩, |−⟩}`
    PlusMinus,
}

impl Basis {
    pub fn other(self) -> Self {
        match self {
            Basis::Computational => Basis::PlusMinus,
            Basis::PlusMinus => Basis::Computational,
        }
    }
}

/// Row-major `dim × dim` complex matrix with the basis its labels refer to.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T: Real> {
    dim: usize,
    basis: Basis,
    entries: Vec<Complex<T>>,
}

impl<T: Real> DensityMatrix<T> {
    /// Wraps raw entries without checking the density-matrix invariants;
    /// call [`DensityMatrix::validate`] for that.
    pub fn from_entries(dim: usize, basis: Basis, entries: Vec<Complex<T>>) -> Result<Self> {
        if dim != 2 && dim != 4 {
            return Err(Error::MalformedMatrix(format!(
                "dimension {dim}, expected 2 or 4"
            )));
        }
        if entries.len() != dim * dim {
            return Err(Error::MalformedMatrix(format!(
                "{} entries for a {dim}x{dim} matrix",
                entries.len()
            )));
        }
        Ok(DensityMatrix {
            dim,
            basis,
            entries,
        })
    }

    pub fn from_real_rows<const D: usize>(basis: Basis, rows: [[T; D]; D]) -> Result<Self> {
        let entries = rows
            .iter()
            .flat_map(|row| row.iter().map(|&x| Complex::new(x, T::zero())))
            .collect();
        Self::from_entries(D, basis, entries)
    }

    /// `I / dim`.
    pub fn maximally_mixed(dim: usize, basis: Basis) -> Result<Self> {
        let fill = T::lit(1.0 / dim as f64);
        let zero = Complex::new(T::zero(), T::zero());
        let entries = (0..dim * dim)
            .map(|i| {
                if i % (dim + 1) == 0 {
                    Complex::new(fill, T::zero())
                } else {
                    zero
                }
            })
            .collect();
        Self::from_entries(dim, basis, entries)
    }

    /// `|ψ⟩⟨ψ|` for a 2- or 4-entry amplitude vector.
    pub fn pure(basis: Basis, psi: &[Complex<T>]) -> Result<Self> {
        let dim = psi.len();
        let entries = psi
            .iter()
            .flat_map(|a| psi.iter().map(move |b| a * b.conj()))
            .collect();
        Self::from_entries(dim, basis, entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex<T> {
        self.entries[row * self.dim + col]
    }

    pub fn trace(&self) -> Complex<T> {
        (0..self.dim).fold(Complex::new(T::zero(), T::zero()), |acc, i| {
            acc + self.get(i, i)
        })
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        self.entries
            .iter()
            .zip(&other.entries)
            .fold(T::zero(), |m, (a, b)| m.max((a - b).norm()))
    }

    /// Largest `|ρ_ij − conj(ρ_ji)|`.
    pub fn hermiticity_defect(&self) -> T {
        let mut worst = T::zero();
        for r in 0..self.dim {
            for c in r..self.dim {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues of the Hermitian part, ascending, evaluated in `f64`.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let m = DMatrix::from_fn(self.dim, self.dim, |r, c| {
            let z = self.get(r, c);
            Complex64::new(
                z.re.to_f64().unwrap_or(f64::NAN),
                z.im.to_f64().unwrap_or(f64::NAN),
            )
        });
        let herm = (&m + m.adjoint()).scale(0.5);
        let mut values: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
        values.sort_by(f64::total_cmp);
        values
    }

    /// Checks Hermiticity and unit trace within `tol`, and eigenvalues ≥ `-psd_floor`.
    pub fn validate(&self, tol: f64, psd_floor: f64) -> Result<()> {
        let herm = self.hermiticity_defect().to_f64().unwrap_or(f64::INFINITY);
        if herm > tol {
            return Err(Error::MalformedMatrix(format!(
                "not Hermitian (defect {herm:e})"
            )));
        }
        let tr = self.trace();
        let tr_err = (tr - Complex::new(T::one(), T::zero()))
            .norm()
            .to_f64()
            .unwrap_or(f64::INFINITY);
        if tr_err > tol {
            return Err(Error::MalformedMatrix(format!("trace off by {tr_err:e}")));
        }
        let min_eig = self.eigenvalues()[0];
        if min_eig < -psd_floor {
            return Err(Error::MalformedMatrix(format!(
                "negative eigenvalue {min_eig:e}"
            )));
        }
        Ok(())
    }

    /// `U ρ U†` for a `dim × dim` row-major unitary.
    pub fn conjugate(&self, unitary: &[Complex<T>]) -> Result<Self> {
        let d = self.dim;
        if unitary.len() != d * d {
            return Err(Error::MalformedMatrix(format!(
                "{}-entry unitary for dimension {d}",
                unitary.len()
            )));
        }
        let zero = Complex::new(T::zero(), T::zero());
        let mut tmp = vec![zero; d * d];
        for r in 0..d {
            for c in 0..d {
                tmp[r * d + c] =
                    (0..d).fold(zero, |acc, j| acc + unitary[r * d + j] * self.get(j, c));
            }
        }
        let mut out = vec![zero; d * d];
        for r in 0..d {
            for c in 0..d {
                out[r * d + c] = (0..d).fold(zero, |acc, j| {
                    acc + tmp[r * d + j] * unitary[c * d + j].conj()
                });
            }
        }
        Self::from_entries(d, self.basis, out)
    }

    pub(crate) fn with_basis(mut self, basis: Basis) -> Self {
        self.basis = basis;
        self
    }
}
