use crate::error::{Error, Result};
use crate::Vec3;

/// Frobenius norm of a per-vertex vector field.
pub fn l2_residual(f: &[Vec3]) -> f64 {
    f.iter().map(|v| v.norm_squared()).sum::<f64>().sqrt()
}

/// Euclidean norm of a per-vertex scalar field.
pub fn l2_scalar(f: &[f64]) -> f64 {
    f.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Scale-invariant L1 distance `sum_i |a_i - b_i| / A` of integrated
/// scalar fields.
pub fn l1_field_error(a: &[f64], reference: &[f64], total_area: f64) -> Result<f64> {
    if a.len() != reference.len() {
        return Err(Error::LengthMismatch(a.len(), reference.len()));
    }
    Ok(a.iter().zip(reference).map(|(x, y)| (x - y).abs()).sum::<f64>() / total_area)
}

/// Vector variant using the per-vertex Euclidean norm.
pub fn l1_vector_error(a: &[Vec3], reference: &[Vec3], total_area: f64) -> Result<f64> {
    if a.len() != reference.len() {
        return Err(Error::LengthMismatch(a.len(), reference.len()));
    }
    Ok(a.iter().zip(reference).map(|(x, y)| (x - y).norm()).sum::<f64>() / total_area)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn residual_norms() {
        assert_eq!(l2_residual(&[Vec3::new(3.0, 4.0, 0.0)]), 5.0);
        assert_eq!(l2_residual(&[Vec3::zeros(); 4]), 0.0);
        let f = [Vec3::new(1.0, -2.0, 0.5), Vec3::new(0.0, 3.0, 1.0)];
        let g: Vec<Vec3> = f.iter().map(|v| -2.5 * v).collect();
        assert!((l2_residual(&g) - 2.5 * l2_residual(&f)).abs() < 1e-14);
    }

    #[test]
    fn l1_errors() {
        assert_eq!(l1_field_error(&[1.0, 2.0], &[1.0, 2.0], 3.0).unwrap(), 0.0);
        assert_eq!(l1_field_error(&[1.0], &[1.0, 2.0], 3.0), Err(Error::LengthMismatch(1, 2)));
        let a = [Vec3::new(2.0, 0.0, 0.0), Vec3::new(-1.0, 0.0, 0.0)];
        let b = [Vec3::zeros(), Vec3::zeros()];
        assert_eq!(
            l1_vector_error(&a, &b, 2.0).unwrap(),
            l1_field_error(&[2.0, -1.0], &[0.0, 0.0], 2.0).unwrap()
        );
    }
}
