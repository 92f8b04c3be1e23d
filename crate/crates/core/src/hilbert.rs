//! Mode spaces, the tensor-product mind space and vectors living in it.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::algebra::{
    enumerate_dims, support_with_policy, ActionFactor, ElementaryProspect, ProspectSpec,
    SupportPolicy,
};
use crate::{QdtError, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// The tensor product of the per-factor mode spaces.
///
/// Basis vectors are the elementary prospects in row-major order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MindSpace {
    factor_dims: Vec<usize>,
    dimension: usize,
    basis: Vec<ElementaryProspect>,
}

impl MindSpace {
    pub fn from_dims(dims: &[usize]) -> Result<Self> {
        let basis = enumerate_dims(dims)?;
        Ok(MindSpace {
            factor_dims: dims.to_vec(),
            dimension: basis.len(),
            basis,
        })
    }

    pub fn new(factors: &[ActionFactor]) -> Result<Self> {
        let dims: Vec<usize> = factors.iter().map(ActionFactor::dim).collect();
        Self::from_dims(&dims)
    }

    pub fn factor_dims(&self) -> &[usize] {
        &self.factor_dims
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn basis(&self) -> &[ElementaryProspect] {
        &self.basis
    }

    /// Row-major linear index of an elementary prospect.
    pub fn basis_index(&self, e: &ElementaryProspect) -> Result<usize> {
        if e.num_factors() != self.factor_dims.len() {
            return Err(QdtError::Index(format!(
                "multi-index {:?} has {} entries for a {}-factor space",
                e.0,
                e.num_factors(),
                self.factor_dims.len()
            )));
        }
        e.check_dims(&self.factor_dims)?;
        Ok(e
            .0
            .iter()
            .zip(&self.factor_dims)
            .fold(0, |acc, (&j, &m)| acc * m + j))
    }

    /// Inverse of [`MindSpace::basis_index`].
    pub fn basis_unindex(&self, index: usize) -> Result<ElementaryProspect> {
        self.basis.get(index).cloned().ok_or_else(|| {
            QdtError::Index(format!(
                "basis index {index} outside dimension {}",
                self.dimension
            ))
        })
    }
}

/// A vector in the mind space. Prospect states are not required to be
/// normalized; the all-zero vector is the vacuum.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        if let Some(i) = amplitudes.iter().position(|a| !a.is_finite()) {
            return Err(QdtError::Numerical(format!(
                "amplitude {i} is not finite"
            )));
        }
        Ok(StateVector { amplitudes })
    }

    pub fn vacuum(dimension: usize) -> Self {
        StateVector {
            amplitudes: vec![ZERO; dimension],
        }
    }

    pub fn basis(dimension: usize, index: usize) -> Result<Self> {
        if index >= dimension {
            return Err(QdtError::Index(format!(
                "basis index {index} outside dimension {dimension}"
            )));
        }
        let mut v = Self::vacuum(dimension);
        v.amplitudes[index] = ONE;
        Ok(v)
    }

    pub fn dimension(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn norm(&self) -> f64 {
        libm::sqrt(self.norm_sqr())
    }

    pub fn is_vacuum(&self) -> bool {
        self.amplitudes.iter().all(|a| *a == ZERO)
    }
}

/// The normalized reference vector ψ.
#[derive(Debug, Clone, PartialEq)]
pub struct StateOfMind {
    state: StateVector,
}

impl StateOfMind {
    /// Accepts `amplitudes` if their squared norm is 1 within `tolerance`.
    pub fn new(amplitudes: Vec<Complex64>, tolerance: f64) -> Result<Self> {
        let state = StateVector::new(amplitudes)?;
        let norm_sqr = state.norm_sqr();
        if norm_sqr == 0.0 {
            return Err(QdtError::ZeroNorm);
        }
        let residual = (norm_sqr - 1.0).abs();
        if residual > tolerance {
            return Err(QdtError::Normalization {
                tolerance,
                residuals: vec![("psi_norm".into(), residual)],
            });
        }
        Ok(StateOfMind { state })
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn normalized(v: &StateVector) -> Result<Self> {
        Ok(StateOfMind {
            state: normalize(v)?,
        })
    }

    pub fn dimension(&self) -> usize {
        self.state.dimension()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        self.state.amplitudes()
    }

    pub fn as_state(&self) -> &StateVector {
        &self.state
    }
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(QdtError::Dimension { expected, found });
    }
    Ok(())
}

/// `⟨u|v⟩`, conjugate-linear in `u`.
pub fn inner(u: &StateVector, v: &StateVector) -> Result<Complex64> {
    check_dims(u.dimension(), v.dimension())?;
    Ok(u.amplitudes
        .iter()
        .zip(&v.amplitudes)
        .map(|(a, b)| a.conj() * b)
        .sum())
}

/// Scales `v` to unit norm.
pub fn normalize(v: &StateVector) -> Result<StateVector> {
    let norm = v.norm();
    if norm == 0.0 {
        return Err(QdtError::ZeroNorm);
    }
    StateVector::new(v.amplitudes.iter().map(|a| a / norm).collect())
}

/// The state `|π⟩` of a prospect: its amplitudes on the support, zero
/// elsewhere.
pub fn build_prospect_state(spec: &ProspectSpec, space: &MindSpace) -> Result<StateVector> {
    build_prospect_state_with(spec, space, SupportPolicy::Product)
}

pub fn build_prospect_state_with(
    spec: &ProspectSpec,
    space: &MindSpace,
    policy: SupportPolicy,
) -> Result<StateVector> {
    support_with_policy(spec, space.factor_dims(), policy)?;
    let mut amplitudes = vec![ZERO; space.dimension()];
    for (e, amp) in &spec.amplitudes {
        amplitudes[space.basis_index(e)?] = *amp;
    }
    StateVector::new(amplitudes)
}

/// The tensor product of one mode-space vector per factor.
pub fn build_product_state(per_factor: &[Vec<Complex64>], space: &MindSpace) -> Result<StateVector> {
    check_dims(space.factor_dims().len(), per_factor.len())?;
    for (arr, &m) in per_factor.iter().zip(space.factor_dims()) {
        check_dims(m, arr.len())?;
    }
    let mut amplitudes = vec![ONE];
    for arr in per_factor {
        amplitudes = amplitudes
            .iter()
            .flat_map(|a| arr.iter().map(move |b| a * b))
            .collect();
    }
    StateVector::new(amplitudes)
}

/// The amplitude matrix `b_{nα} = ⟨e_α|π_n⟩`: one row per prospect, one column
/// per elementary prospect.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl AmplitudeMatrix {
    pub fn from_states(states: &[StateVector]) -> Result<Self> {
        let cols = states.first().map_or(0, StateVector::dimension);
        let mut entries = Vec::with_capacity(states.len() * cols);
        for s in states {
            check_dims(cols, s.dimension())?;
            entries.extend_from_slice(s.amplitudes());
        }
        Ok(AmplitudeMatrix {
            rows: states.len(),
            cols,
            entries,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, n: usize, alpha: usize) -> Complex64 {
        self.entries[n * self.cols + alpha]
    }

    pub fn row(&self, n: usize) -> &[Complex64] {
        &self.entries[n * self.cols..(n + 1) * self.cols]
    }

    /// `Σ_n |b_{nα}|²` for every column.
    pub fn column_norms_sqr(&self) -> Vec<f64> {
        (0..self.cols)
            .map(|a| (0..self.rows).map(|n| self.get(n, a).norm_sqr()).sum())
            .collect()
    }

    /// Largest `|Σ_n |b_{nα}|² − 1|` over columns.
    pub fn column_norm_max_dev(&self) -> f64 {
        self.column_norms_sqr()
            .into_iter()
            .map(|c| (c - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Largest entry of `|B†B − 1|`; zero for orthonormal columns.
    pub fn gram_max_dev(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for a in 0..self.cols {
            for b in 0..self.cols {
                let g: Complex64 = (0..self.rows)
                    .map(|n| self.get(n, a).conj() * self.get(n, b))
                    .sum();
                let target = if a == b { ONE } else { ZERO };
                worst = worst.max((g - target).norm());
            }
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::BTreeMap;

    const H: f64 = core::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn ep(ix: &[usize]) -> ElementaryProspect {
        ElementaryProspect::new(ix.to_vec())
    }

    #[test]
    fn basis_index_examples() {
        let s = MindSpace::from_dims(&[2, 2]).unwrap();
        assert_eq!(s.basis_index(&ep(&[0, 0])).unwrap(), 0);
        assert_eq!(s.basis_index(&ep(&[1, 1])).unwrap(), 3);
        let s = MindSpace::from_dims(&[2, 2, 3]).unwrap();
        assert_eq!(s.basis_index(&ep(&[1, 0, 2])).unwrap(), 8);
        assert_eq!(s.basis()[8], ep(&[1, 0, 2]));
        assert_eq!(s.dimension(), 12);
    }

    #[test]
    fn basis_index_errors() {
        let s = MindSpace::from_dims(&[2, 2]).unwrap();
        assert!(matches!(s.basis_index(&ep(&[2, 0])), Err(QdtError::Index(_))));
        assert!(matches!(s.basis_index(&ep(&[0])), Err(QdtError::Index(_))));
        assert!(s.basis_unindex(4).is_err());
    }

    #[test]
    fn round_trip_over_every_basis_element() {
        let s = MindSpace::from_dims(&[3, 1, 4, 2]).unwrap();
        for i in 0..s.dimension() {
            let e = s.basis_unindex(i).unwrap();
            assert_eq!(s.basis_index(&e).unwrap(), i);
        }
    }

    #[test]
    fn inner_product_examples() {
        let e0 = StateVector::basis(4, 0).unwrap();
        let e2 = StateVector::basis(4, 2).unwrap();
        assert_eq!(inner(&e0, &e2).unwrap(), ZERO);
        assert_eq!(inner(&e2, &e2).unwrap(), ONE);
        let v = StateVector::new(vec![c(0.3), Complex64::new(0.1, -2.0), c(1.0), c(0.0)]).unwrap();
        assert_eq!(inner(&v, &StateVector::vacuum(4)).unwrap(), ZERO);
        let u = StateVector::new(vec![c(H), c(H)]).unwrap();
        let w = StateVector::new(vec![c(1.0), c(0.0)]).unwrap();
        assert!((inner(&u, &w).unwrap() - c(H)).norm() < 1e-15);
        assert!(matches!(inner(&u, &e0), Err(QdtError::Dimension { .. })));
    }

    #[test]
    fn inner_is_conjugate_linear_in_first_argument() {
        let u = StateVector::new(vec![Complex64::new(0.0, 1.0)]).unwrap();
        let v = StateVector::new(vec![ONE]).unwrap();
        assert_eq!(inner(&u, &v).unwrap(), Complex64::new(0.0, -1.0));
    }

    #[test]
    fn prospect_states() {
        let space = MindSpace::from_dims(&[2]).unwrap();
        let empty = ProspectSpec::empty("0");
        assert!(build_prospect_state(&empty, &space).unwrap().is_vacuum());

        let simple = ProspectSpec::new("s", vec![vec![1]], [(ep(&[1]), ONE)]);
        assert_eq!(
            build_prospect_state(&simple, &space).unwrap(),
            StateVector::basis(2, 1).unwrap()
        );

        let pi1 = ProspectSpec::new("pi1", vec![vec![0, 1]], [(ep(&[0]), c(H)), (ep(&[1]), c(H))]);
        let v = build_prospect_state(&pi1, &space).unwrap();
        assert_eq!(v.amplitudes(), &[c(H), c(H)]);
    }

    #[test]
    fn prospect_state_propagates_support_violation() {
        let space = MindSpace::from_dims(&[2, 2]).unwrap();
        let mut amplitudes = BTreeMap::new();
        amplitudes.insert(ep(&[1, 1]), ONE);
        let spec = ProspectSpec::new("x", vec![vec![0], vec![1]], amplitudes);
        assert!(matches!(
            build_prospect_state(&spec, &space),
            Err(QdtError::SupportViolation { .. })
        ));
        let free = build_prospect_state_with(&spec, &space, SupportPolicy::Free).unwrap();
        assert_eq!(free, StateVector::basis(4, 3).unwrap());
    }

    #[test]
    fn product_state_examples() {
        let space = MindSpace::from_dims(&[2, 2]).unwrap();
        let pure = build_product_state(&[vec![ONE, ZERO], vec![ONE, ZERO]], &space).unwrap();
        assert_eq!(pure, StateVector::basis(4, 0).unwrap());

        let mixed = build_product_state(&[vec![c(H), c(H)], vec![ONE, ZERO]], &space).unwrap();
        assert_eq!(mixed.amplitudes(), &[c(H), ZERO, c(H), ZERO]);
        assert!((mixed.norm() - 1.0).abs() < 1e-15);

        assert!(matches!(
            build_product_state(&[vec![ONE, ZERO, ZERO], vec![ONE, ZERO]], &space),
            Err(QdtError::Dimension { .. })
        ));
        assert!(build_product_state(&[vec![ONE, ZERO]], &space).is_err());
    }

    #[test]
    fn one_hot_products_are_basis_vectors() {
        let space = MindSpace::from_dims(&[4, 2, 4, 2, 4]).unwrap();
        assert_eq!(space.dimension(), 256);
        for (i, e) in space.basis().iter().enumerate() {
            let factors: Vec<Vec<Complex64>> = e
                .0
                .iter()
                .zip(space.factor_dims())
                .map(|(&j, &m)| (0..m).map(|k| if k == j { ONE } else { ZERO }).collect())
                .collect();
            let v = build_product_state(&factors, &space).unwrap();
            assert_eq!(v, StateVector::basis(256, i).unwrap());
        }
    }

    #[test]
    fn normalize_examples() {
        let v = normalize(&StateVector::new(vec![c(2.0), ZERO]).unwrap()).unwrap();
        assert_eq!(v.amplitudes(), &[ONE, ZERO]);
        let v = normalize(&StateVector::new(vec![c(1.0), c(1.0)]).unwrap()).unwrap();
        assert!((v.amplitudes()[0] - c(H)).norm() < 1e-15);
        assert_eq!(normalize(&StateVector::vacuum(3)), Err(QdtError::ZeroNorm));
    }

    #[test]
    fn state_of_mind_validation() {
        assert!(StateOfMind::new(vec![c(0.6), c(0.8)], 1e-10).is_ok());
        assert!(matches!(
            StateOfMind::new(vec![c(0.6), c(0.6)], 1e-10),
            Err(QdtError::Normalization { .. })
        ));
        assert_eq!(StateOfMind::new(vec![ZERO, ZERO], 1e-10), Err(QdtError::ZeroNorm));
        assert!(StateVector::new(vec![c(f64::NAN)]).is_err());
    }

    #[test]
    fn amplitude_matrix_diagnostics() {
        let rows = [
            StateVector::new(vec![c(H), c(H)]).unwrap(),
            StateVector::new(vec![c(H), c(-H)]).unwrap(),
        ];
        let b = AmplitudeMatrix::from_states(&rows).unwrap();
        assert!(b.column_norm_max_dev() < 1e-15);
        assert!(b.gram_max_dev() < 1e-15);

        let rows = [
            StateVector::new(vec![c(0.9), ZERO]).unwrap(),
            StateVector::new(vec![ZERO, ONE]).unwrap(),
        ];
        let b = AmplitudeMatrix::from_states(&rows).unwrap();
        assert!((b.column_norm_max_dev() - 0.19).abs() < 1e-15);
    }
}
