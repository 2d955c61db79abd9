//! Image and approximation quality measures.

use crate::error::{check_dims, Result, TubalError};
use crate::tensor::Tensor3;

/// Peak signal-to-noise ratio in dB for 8-bit range data (peak 255).
pub fn psnr(x: &Tensor3, y: &Tensor3) -> Result<f64> {
    check_dims("psnr", x.dims(), y.dims(), x.dims() == y.dims())?;
    let mse = x.sub(y)?.fro_norm_sq() / x.len() as f64;
    if mse == 0.0 {
        return Err(TubalError::IdenticalInputs);
    }
    Ok(10.0 * (255.0 * 255.0 / mse).log10())
}

/// `‖x − approx‖_F / ‖x‖_F`.
pub fn rel_err(x: &Tensor3, approx: &Tensor3) -> Result<f64> {
    check_dims("rel_err", x.dims(), approx.dims(), x.dims() == approx.dims())?;
    let norm = x.fro_norm();
    if norm == 0.0 {
        return Err(TubalError::ZeroReference);
    }
    Ok(x.sub(approx)?.fro_norm() / norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::gauss;

    #[test]
    fn psnr_hand_value() {
        let a = Tensor3::from_fn((4, 3, 2), |_, _, _| 255.0);
        let b = Tensor3::from_fn((4, 3, 2), |_, _, _| 250.0);
        let expected = 10.0 * 2601.0f64.log10();
        assert!((psnr(&a, &b).unwrap() - 34.151).abs() < 1e-3);
        assert_eq!(psnr(&a, &b).unwrap(), expected);
        assert_eq!(psnr(&b, &a).unwrap(), expected);
        assert!(matches!(psnr(&a, &a), Err(TubalError::IdenticalInputs)));
        assert!(psnr(&a, &Tensor3::zeros((4, 3, 1))).is_err());
    }

    #[test]
    fn relative_error_cases() {
        let x = gauss(5, 4, 3, 0);
        assert_eq!(rel_err(&x, &x).unwrap(), 0.0);
        assert!((rel_err(&x, &Tensor3::zeros(x.dims())).unwrap() - 1.0).abs() < 1e-15);
        assert!((rel_err(&x, &x.scale(2.0)).unwrap() - 1.0).abs() < 1e-15);
        let z = Tensor3::zeros(x.dims());
        assert!(matches!(rel_err(&z, &x), Err(TubalError::ZeroReference)));
    }
}
