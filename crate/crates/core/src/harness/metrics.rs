use crate::error::{Error, Result};

/// Largest componentwise difference.
pub fn linf_error(u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            op: "linf_error",
            expected: u.len(),
            found: v.len(),
        });
    }
    Ok(u.iter().zip(v).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

/// `log₂(coarse / fine)`, or `None` unless both errors are positive and finite.
pub fn observed_order(coarse: f64, fine: f64) -> Option<f64> {
    let ok = |e: f64| e > 0.0 && e.is_finite();
    (ok(coarse) && ok(fine)).then(|| (coarse / fine).log2())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linf() {
        let u = [1.0, 2.0, 3.0];
        assert_eq!(linf_error(&u, &u).unwrap(), 0.0);
        let mut v = u;
        v[1] += 1e-3;
        assert!((linf_error(&u, &v).unwrap() - 1e-3).abs() < 1e-15);
        assert!(linf_error(&u, &[1.0]).is_err());
    }

    #[test]
    fn orders() {
        assert!((observed_order(1e-2, 6.25e-4).unwrap() - 4.0).abs() < 1e-14);
        assert!((observed_order(1.50e-5, 1.07e-6).unwrap() - 3.81).abs() < 0.01);
        assert_eq!(observed_order(0.3, 0.3), Some(0.0));
        assert_eq!(observed_order(0.0, 1e-3), None);
        assert_eq!(observed_order(1e-3, 0.0), None);
        assert_eq!(observed_order(f64::NAN, 1.0), None);
    }
}
