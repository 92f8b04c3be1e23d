//! Seeded random scenarios.
//!
//! Amplitudes are complex Gaussian draws from a ChaCha8 stream, so a seed fixes
//! the scenario on every platform.

use num_complex::Complex64;
use qdt_core::algebra::{enumerate_dims, ActionFactor, ProspectSpec};
use qdt_core::measure::NormalizationMode;
use qdt_core::QdtError;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::format::{Scenario, ScenarioOptions};

/// Structure imposed on the random amplitude matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    /// Pairwise-orthonormal columns; needs at least as many prospects as
    /// basis states.
    UnitaryStrict,
    /// Unit-norm columns without orthogonality.
    ColumnUnit,
    /// Unconstrained Gaussian entries.
    Free,
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re, im)
}

fn column_norm(matrix: &[Vec<Complex64>], col: usize) -> f64 {
    matrix.iter().map(|row| row[col].norm_sqr()).sum::<f64>().sqrt()
}

/// Modified Gram-Schmidt over the columns of a row-major matrix, applied
/// twice for numerical orthogonality.
pub fn orthonormalize_columns(matrix: &mut [Vec<Complex64>]) -> Result<()> {
    let cols = matrix.first().map_or(0, Vec::len);
    if matrix.len() < cols {
        return Err(QdtError::invalid(
            "num_prospects",
            format!(
                "{} rows cannot hold {cols} orthonormal columns",
                matrix.len()
            ),
        )
        .into());
    }
    for _pass in 0..2 {
        for j in 0..cols {
            for k in 0..j {
                let proj: Complex64 = matrix.iter().map(|row| row[k].conj() * row[j]).sum();
                for row in matrix.iter_mut() {
                    let v = row[k];
                    row[j] -= proj * v;
                }
            }
            let norm = column_norm(matrix, j);
            if norm == 0.0 {
                return Err(QdtError::ZeroNorm.into());
            }
            for row in matrix.iter_mut() {
                row[j] /= norm;
            }
        }
    }
    Ok(())
}

/// A normalized random state of mind of the given dimension.
pub fn random_psi<R: Rng + ?Sized>(rng: &mut R, dimension: usize) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> = (0..dimension).map(|_| complex_gaussian(rng)).collect();
        let norm = v.iter().map(Complex64::norm_sqr).sum::<f64>().sqrt();
        if norm > 1e-8 {
            return v.into_iter().map(|a| a / norm).collect();
        }
    }
}

/// A scenario with random amplitudes over factors with the given mode counts.
/// Every prospect spans the full mind space.
pub fn random_scenario(
    seed: u64,
    modes_per_factor: &[usize],
    num_prospects: usize,
    kind: MatrixKind,
) -> Result<Scenario> {
    let basis = enumerate_dims(modes_per_factor)?;
    let dimension = basis.len();
    if num_prospects == 0 {
        return Err(QdtError::invalid("num_prospects", "at least one prospect is required").into());
    }
    if kind == MatrixKind::UnitaryStrict && num_prospects < dimension {
        return Err(QdtError::invalid(
            "num_prospects",
            format!("{num_prospects} prospects cannot have orthonormal columns in dimension {dimension}"),
        )
        .into());
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut matrix: Vec<Vec<Complex64>> = (0..num_prospects)
        .map(|_| (0..dimension).map(|_| complex_gaussian(&mut rng)).collect())
        .collect();
    match kind {
        MatrixKind::UnitaryStrict => orthonormalize_columns(&mut matrix)?,
        MatrixKind::ColumnUnit => {
            for j in 0..dimension {
                let norm = column_norm(&matrix, j);
                for row in matrix.iter_mut() {
                    row[j] /= norm;
                }
            }
        }
        MatrixKind::Free => {
            let scale = (num_prospects as f64).sqrt();
            for row in matrix.iter_mut() {
                for a in row.iter_mut() {
                    *a /= scale;
                }
            }
        }
    }
    let psi = random_psi(&mut rng, dimension);

    let factors = modes_per_factor
        .iter()
        .enumerate()
        .map(|(i, &m)| ActionFactor::new(i, format!("f{i}"), (0..m).map(|j| format!("f{i}m{j}"))))
        .collect::<qdt_core::Result<Vec<_>>>()?;
    let full_subsets: Vec<Vec<usize>> = modes_per_factor.iter().map(|&m| (0..m).collect()).collect();
    let prospects = matrix
        .into_iter()
        .enumerate()
        .map(|(n, row)| ProspectSpec::new(format!("pi{n}"), full_subsets.clone(), basis.iter().cloned().zip(row)))
        .collect();

    Ok(Scenario {
        factors,
        prospects,
        state_of_mind: basis.into_iter().zip(psi).collect(),
        options: ScenarioOptions {
            normalization: match kind {
                MatrixKind::UnitaryStrict => NormalizationMode::Strict,
                _ => NormalizationMode::Given,
            },
            unitary_strict: kind == MatrixKind::UnitaryStrict,
            seed: Some(seed),
            ..ScenarioOptions::default()
        },
    })
}

/// A strict scenario: orthonormal amplitude columns and a random normalized
/// state of mind, so every normalization identity holds for any ψ.
pub fn random_strict_scenario(
    seed: u64,
    modes_per_factor: &[usize],
    num_prospects: usize,
) -> Result<Scenario> {
    random_scenario(seed, modes_per_factor, num_prospects, MatrixKind::UnitaryStrict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use qdt_core::hilbert::AmplitudeMatrix;

    #[test]
    fn strict_columns_are_orthonormal() {
        let s = random_strict_scenario(1, &[2, 2], 4).unwrap();
        let b = AmplitudeMatrix::from_states(&s.prospect_states().unwrap()).unwrap();
        assert!(b.gram_max_dev() < 1e-12);
    }

    #[test]
    fn too_few_prospects_is_invalid() {
        assert!(random_strict_scenario(1, &[2, 2], 3).is_err());
        assert!(random_scenario(1, &[2, 2], 3, MatrixKind::ColumnUnit).is_ok());
    }

    #[test]
    fn same_seed_same_bytes() {
        let a = random_strict_scenario(7, &[3, 2], 8).unwrap().to_json();
        let b = random_strict_scenario(7, &[3, 2], 8).unwrap().to_json();
        assert_eq!(a, b);
        assert_ne!(a, random_strict_scenario(8, &[3, 2], 8).unwrap().to_json());
    }

    #[test]
    fn column_unit_has_unit_columns() {
        let s = random_scenario(3, &[2, 3], 2, MatrixKind::ColumnUnit).unwrap();
        let b = AmplitudeMatrix::from_states(&s.prospect_states().unwrap()).unwrap();
        assert!(b.column_norm_max_dev() < 1e-12);
    }
}
