//! Private estimation of means and quantiles over data split into groups that
//! carry different privacy requirements.
//!
//! The crate provides:
//!
//! * [`mechanisms`]: seedable random streams, the Laplace mechanism, an
//!   exponential-mechanism quantile, and the subsampling amplification formula.
//! * [`estimators`]: inverse-variance mixing weights and the mixed mean and
//!   quantile estimators built from independent per-group releases.
//! * [`baselines`]: the Personalized-DP Sample mechanism (per-record inclusion
//!   sampling at a threshold `t`) for means and quantiles.
//! * [`analysis`]: closed-form variance curves and brute-force oracles.
//! * [`harness`]: config parsing, Monte-Carlo experiments, and CSV results.
//!
//! ```
//! use hetdp::{DataDomain, PrivacyGroup, PrivacyLevel, RandomStream};
//! use hetdp::estimators::mixed_mean;
//!
//! let domain = DataDomain::new(-20.0, 20.0, 25.0).unwrap();
//! let groups = vec![
//!     PrivacyGroup::new(vec![1.0, 2.0, 3.0], PrivacyLevel::Public).unwrap(),
//!     PrivacyGroup::new(vec![0.5; 100], PrivacyLevel::finite(0.5).unwrap()).unwrap(),
//! ];
//! let mut stream = RandomStream::new(7, 0);
//! let est = mixed_mean(&groups, &domain, &mut stream).unwrap();
//! assert!(est.theoretical_variance.unwrap() > 0.0);
//! ```

pub mod analysis;
pub mod baselines;
mod error;
pub mod estimators;
pub mod harness;
pub mod mechanisms;

pub use error::{Error, Result};
pub use estimators::{Estimate, MixWeights, PrivacyGroup};
pub use mechanisms::{DataDomain, LaplaceNoise, PrivacyLevel, RandomStream};
