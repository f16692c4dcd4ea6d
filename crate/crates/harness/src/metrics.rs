//! Error norms and mesh-transfer helpers.

use crate::error::HarnessError;

fn check(a: &[f64], b: &[f64]) -> Result<(), HarnessError> {
    if a.len() != b.len() {
        return Err(HarnessError::LengthMismatch(a.len(), b.len()));
    }
    Ok(())
}

/// Δx Σ |a_i - b_i|
pub fn l1_error(a: &[f64], b: &[f64], dx: f64) -> Result<f64, HarnessError> {
    check(a, b)?;
    Ok(dx * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>())
}

pub fn max_error(a: &[f64], b: &[f64]) -> Result<f64, HarnessError> {
    check(a, b)?;
    Ok(a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max))
}

/// Average blocks of a fine-mesh profile onto `coarse` cells.
pub fn restrict(fine: &[f64], coarse: usize) -> Result<Vec<f64>, HarnessError> {
    if coarse == 0 || fine.len() % coarse != 0 {
        return Err(HarnessError::LengthMismatch(fine.len(), coarse));
    }
    let r = fine.len() / coarse;
    Ok(fine
        .chunks(r)
        .map(|c| c.iter().sum::<f64>() / r as f64)
        .collect())
}

pub fn total_variation(a: &[f64]) -> f64 {
    a.windows(2).map(|w| (w[1] - w[0]).abs()).sum()
}

/// Observed order from errors on two successive halvings of Δx.
pub fn observed_order(coarse_error: f64, fine_error: f64) -> f64 {
    (coarse_error / fine_error).log2()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn l1_examples() {
        assert_eq!(l1_error(&[1.0, 2.0], &[1.0, 2.0], 0.1).unwrap(), 0.0);
        let a = [1.0, 1.5, 1.0];
        let b = [1.0, 1.0, 1.0];
        assert!((l1_error(&a, &b, 0.01).unwrap() - 0.005).abs() < 1e-18);
        assert_eq!(l1_error(&[1.0, 2.0], &[0.0, 0.0], 1.0).unwrap(), 3.0);
        assert!(l1_error(&[1.0], &[1.0, 2.0], 1.0).is_err());
    }

    #[test]
    fn restrict_averages_blocks() {
        assert_eq!(restrict(&[1.0, 3.0, 5.0, 7.0], 2).unwrap(), vec![2.0, 6.0]);
        assert!(restrict(&[1.0, 2.0, 3.0], 2).is_err());
    }

    #[test]
    fn tv_and_order() {
        assert_eq!(total_variation(&[0.0, 1.0, 0.0, 2.0]), 4.0);
        assert!((observed_order(4e-3, 2e-3) - 1.0).abs() < 1e-15);
    }
}
