use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::from_db;

/// Per-beam rain attenuation: Gaussian in dB, clipped at 0 dB so attenuation never amplifies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RainFadingModel {
    pub mean_db: f64,
    pub sigma_db: f64,
    pub clear_sky: bool,
}

impl Default for RainFadingModel {
    fn default() -> Self {
        Self {
            mean_db: -2.6,
            sigma_db: 1.63,
            clear_sky: false,
        }
    }
}

impl RainFadingModel {
    pub fn clear_sky() -> Self {
        Self {
            clear_sky: true,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.mean_db.is_finite() || !self.sigma_db.is_finite() || self.sigma_db < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "rain model needs finite mean and sigma >= 0 (got {}, {})",
                self.mean_db, self.sigma_db
            )));
        }
        Ok(())
    }
}

/// Samples linear attenuations `A_k >= 1` for `num_beams` beams.
pub fn sample_rain<R: Rng + ?Sized>(
    model: &RainFadingModel,
    num_beams: usize,
    rng: &mut R,
) -> Result<Vec<f64>> {
    model.validate()?;
    if model.clear_sky || model.sigma_db == 0.0 {
        let a = if model.clear_sky {
            1.0
        } else {
            from_db(model.mean_db.max(0.0))
        };
        return Ok(vec![a; num_beams]);
    }
    let normal = Normal::new(model.mean_db, model.sigma_db)
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    Ok((0..num_beams)
        .map(|_| from_db(normal.sample(rng).max(0.0)))
        .collect())
}
