use super::RandomStream;
use crate::error::{invalid, Result};

/// Laplace(0, scale) noise. For a sum query with sensitivity `r` released
/// at privacy level `epsilon`, `scale = r / epsilon`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LaplaceNoise {
    scale: f64,
}

impl LaplaceNoise {
    pub fn new(scale: f64) -> Result<Self> {
        if !(scale.is_finite() && scale > 0.0) {
            return Err(invalid(format!("Laplace scale must be finite and > 0, got {scale}")));
        }
        Ok(Self { scale })
    }

    /// Noise calibrated to `sensitivity / epsilon`.
    pub fn calibrated(sensitivity: f64, epsilon: f64) -> Result<Self> {
        if !(epsilon.is_finite() && epsilon > 0.0) {
            return Err(invalid(format!("epsilon must be finite and > 0, got {epsilon}")));
        }
        Self::new(sensitivity / epsilon)
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn variance(&self) -> f64 {
        2.0 * self.scale * self.scale
    }

    /// Inverse CDF. `u` must lie in `(0, 1)`.
    pub fn inverse_cdf(&self, u: f64) -> f64 {
        let c = u - 0.5;
        -self.scale * c.signum() * (-2.0 * c.abs()).ln_1p()
    }

    /// Log density at `x`.
    pub fn ln_pdf(&self, x: f64) -> f64 {
        -(2.0 * self.scale).ln() - x.abs() / self.scale
    }

    /// One draw, consuming exactly one uniform from `stream`.
    pub fn sample(&self, stream: &mut RandomStream) -> f64 {
        let u = stream.open_uniform();
        if u == 0.5 {
            return 0.0;
        }
        self.inverse_cdf(u)
    }
}

/// Draws one Laplace(0, `scale`) variate.
pub fn sample_laplace(stream: &mut RandomStream, scale: f64) -> Result<f64> {
    Ok(LaplaceNoise::new(scale)?.sample(stream))
}

/// Releases `value + Lap(sensitivity / epsilon)`.
pub fn laplace_mechanism(
    value: f64,
    sensitivity: f64,
    epsilon: f64,
    stream: &mut RandomStream,
) -> Result<f64> {
    Ok(value + LaplaceNoise::calibrated(sensitivity, epsilon)?.sample(stream))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_maps_to_zero() {
        let noise = LaplaceNoise::new(1.0).unwrap();
        assert_eq!(noise.inverse_cdf(0.5), 0.0);
    }

    #[test]
    fn inverse_cdf_matches_closed_form_quantiles() {
        let noise = LaplaceNoise::new(3.0).unwrap();
        // F^-1(u) = b ln(2u) below the median, -b ln(2 - 2u) above.
        for u in [0.01f64, 0.2, 0.4999, 0.6, 0.93] {
            let expected = if u < 0.5 {
                3.0 * (2.0 * u).ln()
            } else {
                -3.0 * (2.0 - 2.0 * u).ln()
            };
            assert!((noise.inverse_cdf(u) - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn output_scales_linearly() {
        let mut s1 = RandomStream::new(5, 0);
        let mut s2 = RandomStream::new(5, 0);
        for _ in 0..1000 {
            let a = sample_laplace(&mut s1, 1.0).unwrap();
            let b = sample_laplace(&mut s2, 2.0).unwrap();
            assert_eq!(b, 2.0 * a);
        }
    }

    #[test]
    fn rejects_bad_scale() {
        let mut s = RandomStream::new(0, 0);
        for bad in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            assert!(matches!(
                sample_laplace(&mut s, bad),
                Err(crate::Error::InvalidParameter(_))
            ));
        }
        assert!(LaplaceNoise::calibrated(1.0, f64::INFINITY).is_err());
    }

    #[test]
    fn empirical_variance_matches_two_b_squared() {
        // r = 20, epsilon = 0.1 gives b = 200 and variance 80000.
        let b = 20.0 / 0.1;
        let mut s = RandomStream::new(2024, 17);
        let n = 1_000_000;
        let draws: Vec<f64> = (0..n).map(|_| sample_laplace(&mut s, b).unwrap()).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let var = draws.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((var / 80_000.0 - 1.0).abs() < 0.02, "var = {var}");
    }
}
