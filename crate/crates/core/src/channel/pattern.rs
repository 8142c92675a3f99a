//! Tapered-aperture Bessel feed pattern.
//!
//! `|g(θ)|² = G_max · [J₁(u)/(2u) + 36·J₃(u)/u³]²` with `u = 2.07123·sin θ / sin θ_3dB`,
//! where `θ_3dB` is the one-sided half-power angle.

use puruspe::Jn;
use serde::{Deserialize, Serialize};

use crate::linalg::from_db;

/// `u` at which the pattern is 3 dB below peak.
pub const HALF_POWER_U: f64 = 2.07123;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeedPattern {
    pub peak_gain_dbi: f64,
    pub theta_3db_deg: f64,
}

impl FeedPattern {
    pub fn new(peak_gain_dbi: f64, theta_3db_deg: f64) -> Self {
        Self {
            peak_gain_dbi,
            theta_3db_deg,
        }
    }

    pub fn peak_gain_linear(&self) -> f64 {
        from_db(self.peak_gain_dbi)
    }

    pub fn u(&self, off_axis_rad: f64) -> f64 {
        HALF_POWER_U * off_axis_rad.sin() / self.theta_3db_deg.to_radians().sin()
    }

    /// Signed field amplitude relative to peak: 1 at boresight, negative inside odd sidelobes.
    pub fn shape(u: f64) -> f64 {
        let u = u.abs();
        if u < 1e-4 {
            // series: J1(u)/(2u) ≈ 1/4 - u²/32, 36 J3(u)/u³ ≈ 3/4 - 3u²/64
            return 1.0 - 5.0 * u * u / 64.0;
        }
        Jn(1, u) / (2.0 * u) + 36.0 * Jn(3, u) / (u * u * u)
    }

    /// Real field amplitude `sqrt(G_max)·shape(u)` at the given off-axis angle.
    pub fn amplitude(&self, off_axis_rad: f64) -> f64 {
        self.peak_gain_linear().sqrt() * Self::shape(self.u(off_axis_rad))
    }

    /// Gain in dBi at the given off-axis angle.
    pub fn gain_dbi(&self, off_axis_rad: f64) -> f64 {
        let a = self.amplitude(off_axis_rad);
        10.0 * (a * a).log10()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn peak_at_boresight() {
        let p = FeedPattern::new(50.0, 0.25);
        let a = p.amplitude(0.0);
        assert!((a * a / p.peak_gain_linear() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn half_power_at_theta_3db() {
        let p = FeedPattern::new(45.0, 0.3);
        let g = p.gain_dbi(0.3f64.to_radians());
        assert!((g - 45.0 + 3.0103).abs() < 0.01, "{g}");
    }

    #[test]
    fn series_branch_is_continuous() {
        let below = FeedPattern::shape(0.99e-4);
        let above = FeedPattern::shape(1.01e-4);
        assert!((below - above).abs() < 1e-9);
    }
}
