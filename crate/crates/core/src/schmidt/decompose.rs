use nalgebra::{ComplexField, DMatrix};
use serde::{Deserialize, Serialize};

use super::conditioning::AmplitudeMatrix;
use crate::error::{Error, Result};
use crate::spectral::JointAmplitude;

/// Singular values below this fraction of the largest do not count as modes.
const RANK_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchmidtResult {
    /// Schmidt number `1/Σc⁴`.
    pub k: f64,
    /// Schmidt coefficients, descending, `Σc² = 1`.
    pub coefficients: Vec<f64>,
    pub mode_count: usize,
}

fn check_matrix<T: ComplexField<RealField = f64>>(g: &DMatrix<T>) -> Result<f64> {
    if g.is_empty() {
        return Err(Error::InvalidInput("empty matrix".into()));
    }
    let mut norm2 = 0.0;
    for v in g.iter() {
        let m = v.clone().modulus_squared();
        if !m.is_finite() {
            return Err(Error::Numerical("matrix has non-finite entries".into()));
        }
        norm2 += m;
    }
    if norm2 == 0.0 {
        return Err(Error::InvalidInput("matrix is identically zero".into()));
    }
    Ok(norm2)
}

/// Schmidt decomposition through the singular values of the sampled amplitude.
pub fn schmidt_decompose<T: ComplexField<RealField = f64>>(g: &DMatrix<T>) -> Result<SchmidtResult> {
    check_matrix(g)?;
    let svd = nalgebra::linalg::SVD::try_new(g.clone(), false, false, f64::EPSILON, 10_000)
        .ok_or_else(|| Error::Numerical("singular value decomposition did not converge".into()))?;
    let mut sigma: Vec<f64> = svd.singular_values.iter().copied().collect();
    sigma.sort_by(|a, b| b.total_cmp(a));
    let total: f64 = sigma.iter().map(|s| s * s).sum();
    let coefficients: Vec<f64> = sigma.iter().map(|s| s / total.sqrt()).collect();
    let k = 1.0 / coefficients.iter().map(|c| c.powi(4)).sum::<f64>();
    let mode_count = sigma.iter().filter(|&&s| s > RANK_TOL * sigma[0]).count();
    Ok(SchmidtResult {
        k,
        coefficients,
        mode_count,
    })
}

/// `K` from `1/K = Tr((g†g)²)/Tr(g†g)²`, the discretized quadruple overlap
/// integral, without a decomposition.
pub fn k_trace<T: ComplexField<RealField = f64>>(g: &DMatrix<T>) -> Result<f64> {
    check_matrix(g)?;
    // the smaller Gram matrix has the same non-zero spectrum
    let gram = if g.nrows() <= g.ncols() {
        g * g.adjoint()
    } else {
        g.adjoint() * g
    };
    let trace: f64 = (0..gram.nrows()).map(|i| gram[(i, i)].clone().real()).sum();
    let trace_sq: f64 = gram.iter().map(|v| v.clone().modulus_squared()).sum();
    Ok(trace * trace / trace_sq)
}

/// Lower bound `K_min`: the trace formula applied to the modulus amplitude.
pub fn k_min(amp: &AmplitudeMatrix) -> Result<f64> {
    if amp.values.iter().any(|&v| v < 0.0) {
        return Err(Error::InvalidInput("modulus amplitude has negative entries".into()));
    }
    k_trace(&amp.values)
}

impl JointAmplitude {
    pub fn schmidt(&self) -> Result<SchmidtResult> {
        schmidt_decompose(&self.values)
    }

    pub fn k_min(&self) -> Result<f64> {
        k_min(&AmplitudeMatrix::from_joint_amplitude(self))
    }
}

#[cfg(test)]
mod tests {
    use num_complex::Complex64;

    use super::*;
    use crate::spectral::{Axis, SpectralGrid};

    #[test]
    fn separable_matrix_has_unit_k() {
        let u = [0.2, 1.0, 0.7, 0.1];
        let v = [0.3, 0.9, 1.2, 0.4, 0.05];
        let g = DMatrix::from_fn(4, 5, |i, j| u[i] * v[j]);
        let r = schmidt_decompose(&g).unwrap();
        assert!((r.k - 1.0).abs() < 1e-9);
        assert_eq!(r.mode_count, 1);
        assert!((k_trace(&g).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn diagonal_gives_k_equal_to_rank() {
        for d in 1..7 {
            let g = DMatrix::<f64>::from_diagonal_element(d, d, 2.5);
            assert!((k_trace(&g).unwrap() - d as f64).abs() < 1e-12);
            let r = schmidt_decompose(&g).unwrap();
            assert!((r.k - d as f64).abs() < 1e-10);
            assert_eq!(r.mode_count, d);
        }
    }

    #[test]
    fn coefficients_descend_and_normalize() {
        let g = DMatrix::from_fn(3, 4, |i, j| Complex64::new((i + 2 * j) as f64, (i * j) as f64 - 1.0));
        let r = schmidt_decompose(&g).unwrap();
        assert!(r.coefficients.windows(2).all(|w| w[0] >= w[1]));
        let s: f64 = r.coefficients.iter().map(|c| c * c).sum();
        assert!((s - 1.0).abs() < 1e-12);
        let inv: f64 = r.coefficients.iter().map(|c| c.powi(4)).sum();
        assert!((r.k - 1.0 / inv).abs() < 1e-10);
    }

    #[test]
    fn zero_matrix_is_an_error() {
        let g = DMatrix::<f64>::zeros(3, 3);
        assert!(schmidt_decompose(&g).is_err());
        assert!(k_trace(&g).is_err());
        let grid = SpectralGrid::new(Axis::new(1.0, 0.1, 3), Axis::new(2.0, 0.1, 3));
        let amp = AmplitudeMatrix::new(g, grid).unwrap_err();
        assert!(matches!(amp, Error::InvalidInput(_)));
    }
}
