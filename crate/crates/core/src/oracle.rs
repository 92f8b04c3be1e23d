//! Brute-force recomputation with explicit dense operators.
//!
//! Nothing here reuses the fast path in [`crate::measure`]: every number is
//! rebuilt from outer products, matrix products and `⟨ψ|Ô|ψ⟩`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::hilbert::{StateOfMind, StateVector};
use crate::{QdtError, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Default largest dimension the oracle accepts.
pub const DEFAULT_MAX_DIMENSION: usize = 64;

/// A square complex matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    dim: usize,
    data: Vec<Complex64>,
}

impl DenseOperator {
    pub fn zeros(dim: usize) -> Self {
        DenseOperator {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut op = Self::zeros(dim);
        for i in 0..dim {
            op.data[i * dim + i] = ONE;
        }
        op
    }

    /// `|u⟩⟨u|`.
    pub fn outer(u: &StateVector) -> Self {
        let a = u.amplitudes();
        let dim = a.len();
        let mut op = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                op.data[i * dim + j] = a[i] * a[j].conj();
            }
        }
        op
    }

    /// `|e_α⟩⟨e_α|`.
    pub fn basis_projector(dim: usize, alpha: usize) -> Result<Self> {
        Ok(Self::outer(&StateVector::basis(dim, alpha)?))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    fn check(&self, other: usize) -> Result<()> {
        if self.dim != other {
            return Err(QdtError::Dimension {
                expected: self.dim,
                found: other,
            });
        }
        Ok(())
    }

    /// Matrix product. Zero entries of the left operand are skipped.
    pub fn matmul(&self, rhs: &DenseOperator) -> Result<DenseOperator> {
        self.check(rhs.dim)?;
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * rhs.data[k * n + j];
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &DenseOperator) -> Result<DenseOperator> {
        self.check(rhs.dim)?;
        Ok(DenseOperator {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check(v.len())?;
        let n = self.dim;
        Ok((0..n)
            .map(|i| (0..n).map(|j| self.data[i * n + j] * v[j]).sum())
            .collect())
    }

    pub fn adjoint(&self) -> DenseOperator {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j].conj();
            }
        }
        out
    }

    /// Largest entry of `|self − rhs|`.
    pub fn max_abs_diff(&self, rhs: &DenseOperator) -> Result<f64> {
        self.check(rhs.dim)?;
        Ok(self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn is_hermitian(&self, tolerance: f64) -> bool {
        self.max_abs_diff(&self.adjoint())
            .is_ok_and(|d| d <= tolerance)
    }
}

/// `P̂(π) = |π⟩⟨π|`.
pub fn dense_prospect_operator(prospect: &StateVector) -> DenseOperator {
    DenseOperator::outer(prospect)
}

/// `P̂(e_α) P̂(π) P̂(e_α)` as an explicit triple product.
pub fn dense_conjunction_operator(prospect: &StateVector, alpha: usize) -> Result<DenseOperator> {
    let projector = DenseOperator::basis_projector(prospect.dimension(), alpha)?;
    projector
        .matmul(&dense_prospect_operator(prospect))?
        .matmul(&projector)
}

/// `⟨ψ|Ô|ψ⟩`.
pub fn dense_expectation(op: &DenseOperator, psi: &StateOfMind) -> Result<Complex64> {
    let c = psi.amplitudes();
    let applied = op.apply(c)?;
    Ok(c.iter().zip(&applied).map(|(a, b)| a.conj() * b).sum())
}

/// `Σ_{α≠β} ⟨ψ|P̂(e_α) P̂(π) P̂(e_β)|ψ⟩`, real part.
///
/// Each term is `⟨P̂(e_α)ψ | P̂(π) P̂(e_β) ψ⟩`, evaluated with dense
/// matrix-vector products.
pub fn dense_interference(prospect: &StateVector, psi: &StateOfMind) -> Result<f64> {
    let dim = prospect.dimension();
    if dim != psi.dimension() {
        return Err(QdtError::Dimension {
            expected: psi.dimension(),
            found: dim,
        });
    }
    let p_pi = dense_prospect_operator(prospect);
    let projected = (0..dim)
        .map(|a| DenseOperator::basis_projector(dim, a)?.apply(psi.amplitudes()))
        .collect::<Result<Vec<_>>>()?;
    let mut sum = ZERO;
    for beta in 0..dim {
        let right = p_pi.apply(&projected[beta])?;
        for (alpha, left) in projected.iter().enumerate() {
            if alpha == beta {
                continue;
            }
            sum += left
                .iter()
                .zip(&right)
                .map(|(l, r)| l.conj() * r)
                .sum::<Complex64>();
        }
    }
    Ok(sum.re)
}

/// Largest entry of `Σ_{n,α} P̂(π_n e_α) − 1̂`.
pub fn resolution_of_identity_check(prospects: &[StateVector], dim: usize) -> Result<f64> {
    let mut total = DenseOperator::zeros(dim);
    for prospect in prospects {
        for alpha in 0..dim {
            total = total.add(&dense_conjunction_operator(prospect, alpha)?)?;
        }
    }
    total.max_abs_diff(&DenseOperator::identity(dim))
}

/// Oracle values for one prospect.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseProspect {
    pub p: f64,
    pub conjunction: Vec<f64>,
    pub q: f64,
}

/// Oracle values for a whole scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseEvaluation {
    pub prospects: Vec<DenseProspect>,
    pub identity_residual: f64,
    /// Largest deviation from Hermiticity among the generated operators.
    pub hermiticity_residual: f64,
}

/// Recomputes every probability of a scenario from dense operators.
pub fn evaluate_dense(
    prospects: &[StateVector],
    psi: &StateOfMind,
    max_dimension: usize,
) -> Result<DenseEvaluation> {
    let dim = psi.dimension();
    if dim > max_dimension {
        return Err(QdtError::invalid(
            "oracle",
            format!("dimension {dim} exceeds the oracle cap {max_dimension}"),
        ));
    }
    let mut out = Vec::with_capacity(prospects.len());
    let mut hermiticity: f64 = 0.0;
    for prospect in prospects {
        let op = dense_prospect_operator(prospect);
        hermiticity = hermiticity.max(op.max_abs_diff(&op.adjoint())?);
        let p = dense_expectation(&op, psi)?.re;
        let conjunction = (0..dim)
            .map(|alpha| {
                let c_op = dense_conjunction_operator(prospect, alpha)?;
                Ok(dense_expectation(&c_op, psi)?.re)
            })
            .collect::<Result<Vec<f64>>>()?;
        let q = dense_interference(prospect, psi)?;
        out.push(DenseProspect { p, conjunction, q });
    }
    Ok(DenseEvaluation {
        prospects: out,
        identity_residual: resolution_of_identity_check(prospects, dim)?,
        hermiticity_residual: hermiticity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const H: f64 = core::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn sv(v: &[f64]) -> StateVector {
        StateVector::new(v.iter().map(|&x| c(x)).collect()).unwrap()
    }

    fn close(a: &DenseOperator, entries: &[f64]) -> bool {
        let n = a.dim();
        (0..n * n).all(|k| (a.get(k / n, k % n) - c(entries[k])).norm() < 1e-15)
    }

    #[test]
    fn prospect_operator_examples() {
        assert!(close(&dense_prospect_operator(&sv(&[1.0, 0.0])), &[1.0, 0.0, 0.0, 0.0]));
        assert_eq!(dense_prospect_operator(&StateVector::vacuum(3)), DenseOperator::zeros(3));
        assert!(close(&dense_prospect_operator(&sv(&[H, H])), &[0.5, 0.5, 0.5, 0.5]));
    }

    #[test]
    fn conjunction_operator_examples() {
        let e1 = sv(&[0.0, 1.0, 0.0]);
        assert_eq!(
            dense_conjunction_operator(&e1, 1).unwrap(),
            DenseOperator::basis_projector(3, 1).unwrap()
        );
        assert_eq!(dense_conjunction_operator(&e1, 0).unwrap(), DenseOperator::zeros(3));
        assert!(close(&dense_conjunction_operator(&sv(&[H, H]), 0).unwrap(), &[0.5, 0.0, 0.0, 0.0]));
        assert!(dense_conjunction_operator(&e1, 3).is_err());
    }

    #[test]
    fn expectation_examples() {
        let psi = StateOfMind::new(vec![c(0.6), Complex64::new(0.0, 0.8)], 1e-12).unwrap();
        assert!((dense_expectation(&DenseOperator::identity(2), &psi).unwrap() - ONE).norm() < 1e-15);
        assert_eq!(dense_expectation(&DenseOperator::zeros(2), &psi).unwrap(), ZERO);
        let psi = StateOfMind::new(vec![c(H), c(H)], 1e-12).unwrap();
        let p = dense_expectation(&dense_prospect_operator(&sv(&[H, H])), &psi).unwrap();
        assert!((p - ONE).norm() < 1e-12);
        assert!(dense_expectation(&DenseOperator::zeros(3), &psi).is_err());
    }

    #[test]
    fn interference_examples() {
        let psi = StateOfMind::new(vec![c(H), c(H)], 1e-12).unwrap();
        assert_eq!(dense_interference(&sv(&[1.0, 0.0]), &psi).unwrap(), 0.0);
        assert!((dense_interference(&sv(&[H, H]), &psi).unwrap() - 0.5).abs() < 1e-12);
        let q2 = dense_interference(&sv(&[H, -H]), &psi).unwrap();
        assert!((q2 + 0.5).abs() < 1e-12);
    }

    #[test]
    fn identity_residual_examples() {
        let identity = [sv(&[1.0, 0.0]), sv(&[0.0, 1.0])];
        assert_eq!(resolution_of_identity_check(&identity, 2).unwrap(), 0.0);
        let h2 = [sv(&[H, H]), sv(&[H, -H])];
        assert!(resolution_of_identity_check(&h2, 2).unwrap() < 1e-12);
        let short = [sv(&[0.9, 0.0]), sv(&[0.0, 1.0])];
        assert!((resolution_of_identity_check(&short, 2).unwrap() - 0.19).abs() < 1e-15);
    }

    #[test]
    fn operators_are_hermitian_and_idempotent() {
        let v = StateVector::new(vec![
            Complex64::new(0.5, 0.5),
            Complex64::new(0.0, -0.5),
            c(0.5),
        ])
        .unwrap();
        let op = dense_prospect_operator(&v);
        assert!(op.is_hermitian(1e-14));
        assert!(op.matmul(&op).unwrap().max_abs_diff(&op).unwrap() < 1e-12);
        for alpha in 0..3 {
            assert!(dense_conjunction_operator(&v, alpha).unwrap().is_hermitian(1e-14));
        }
    }

    #[test]
    fn oracle_respects_dimension_cap() {
        let psi = StateOfMind::new(vec![c(H), c(H)], 1e-12).unwrap();
        assert!(evaluate_dense(&[sv(&[H, H])], &psi, 1).is_err());
        let eval = evaluate_dense(&[sv(&[H, H]), sv(&[H, -H])], &psi, 64).unwrap();
        assert!((eval.prospects[0].p - 1.0).abs() < 1e-12);
        assert!(eval.identity_residual < 1e-12);
    }
}
