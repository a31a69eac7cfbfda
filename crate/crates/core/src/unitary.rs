//! Exact small-circuit unitaries, used as the verification oracle.

use num_complex::Complex64;

use crate::circuit::Circuit;
use crate::sim::apply_gate;
use crate::{Error, Result};

/// Largest qubit count for exact unitary computation.
pub const MAX_UNITARY_QUBITS: usize = 10;

/// A dense complex matrix stored column-major, so columns can be treated as
/// statevectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    pub dim: usize,
    cols: Vec<Complex64>,
}

impl Matrix {
    pub fn identity(dim: usize) -> Matrix {
        let mut cols = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            cols[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        Matrix { dim, cols }
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.cols[col * self.dim + row]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.cols[col * self.dim + row] = value;
    }

    pub fn column(&self, col: usize) -> &[Complex64] {
        &self.cols[col * self.dim..(col + 1) * self.dim]
    }

    fn column_mut(&mut self, col: usize) -> &mut [Complex64] {
        &mut self.cols[col * self.dim..(col + 1) * self.dim]
    }

    /// `self · other` (matrix product; applies `other` first).
    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.dim, other.dim);
        let dim = self.dim;
        let mut out = Matrix {
            dim,
            cols: vec![Complex64::new(0.0, 0.0); dim * dim],
        };
        for col in 0..dim {
            for k in 0..dim {
                let factor = other.get(k, col);
                if factor.norm_sqr() == 0.0 {
                    continue;
                }
                for row in 0..dim {
                    let add = self.get(row, k) * factor;
                    let cur = out.get(row, col);
                    out.set(row, col, cur + add);
                }
            }
        }
        out
    }

    pub fn dagger(&self) -> Matrix {
        let dim = self.dim;
        let mut out = Matrix {
            dim,
            cols: vec![Complex64::new(0.0, 0.0); dim * dim],
        };
        for row in 0..dim {
            for col in 0..dim {
                out.set(col, row, self.get(row, col).conj());
            }
        }
        out
    }

    pub fn max_abs_diff(&self, other: &Matrix) -> f64 {
        self.cols
            .iter()
            .zip(&other.cols)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `‖U·U† − I‖_max ≤ tol`.
    pub fn is_unitary(&self, tol: f64) -> bool {
        self.mul(&self.dagger())
            .max_abs_diff(&Matrix::identity(self.dim))
            <= tol
    }

    /// Equality up to one global phase factor applied to `other`.
    pub fn equal_up_to_global_phase(&self, other: &Matrix, tol: f64) -> bool {
        if self.dim != other.dim {
            return false;
        }
        // Phase from the largest entry of self.
        let mut best = 0.0;
        let mut phase = Complex64::new(1.0, 0.0);
        for (a, b) in self.cols.iter().zip(&other.cols) {
            if a.norm() > best {
                best = a.norm();
                if b.norm() == 0.0 {
                    return false;
                }
                phase = a / b;
            }
        }
        if best == 0.0 {
            return other.cols.iter().all(|b| b.norm() <= tol);
        }
        if (phase.norm() - 1.0).abs() > tol {
            return false;
        }
        self.cols
            .iter()
            .zip(&other.cols)
            .all(|(a, b)| (a - b * phase).norm() <= tol)
    }
}

/// Exact product of gate matrices in application order.
///
/// Fails for circuits over [`MAX_UNITARY_QUBITS`] qubits or containing
/// Measure gates.
pub fn unitary_of(circuit: &Circuit) -> Result<Matrix> {
    if circuit.n > MAX_UNITARY_QUBITS {
        return Err(Error::TooManyQubits {
            op: "unitary_of",
            max: MAX_UNITARY_QUBITS,
            n: circuit.n,
        });
    }
    if circuit.has_measure() {
        return Err(Error::MeasureNotAllowed { op: "unitary_of" });
    }
    let dim = 1usize << circuit.n;
    let mut matrix = Matrix::identity(dim);
    for col in 0..dim {
        let column = matrix.column_mut(col);
        for gate in &circuit.gates {
            apply_gate(column, gate);
        }
    }
    Ok(matrix)
}
