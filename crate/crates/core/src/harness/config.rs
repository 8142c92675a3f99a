//! Experiment configuration, read from TOML.
//!
//! A file picks a preset with `layout.preset = "desk" | "regional" | "full"`; any other key overrides the
//! preset value. Unknown keys are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::{hex_grid, FeedPattern, GeometryConfig, HexGrid, HexGridSpec, RainFadingModel};
use crate::cooperation::CooperationScheme;
use crate::error::{Error, Result};
use crate::impairments::{CsiImpairment, FeederLinkModel, QuantizerSpec};
use crate::precoder::{Flavor, InnerStage, MmseRegularization};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Preset {
    /// 21 beams in 3 clusters.
    #[default]
    Desk,
    /// 56 beams in 8 clusters, narrow beams and a denser feed array.
    Regional,
    /// 100 beams in 14 clusters of 7 or 8.
    Full,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutSection {
    pub preset: Preset,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SatelliteSection {
    pub longitude_deg: f64,
    pub latitude_deg: f64,
    pub altitude_km: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverageSection {
    pub center_lat_deg: f64,
    pub center_lon_deg: f64,
    /// Users are drawn uniformly within this angular radius of their beam center.
    pub user_radius_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamsSection {
    pub count: usize,
    pub grid_spacing_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeedsSection {
    pub per_beam: f64,
    pub focal_length_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClustersSection {
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternSection {
    pub peak_gain_dbi: f64,
    pub theta_3db_deg: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RainSection {
    pub mean_db: f64,
    pub sigma_db: f64,
    pub clear_sky: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RfSection {
    pub carrier_hz: f64,
    pub bandwidth_hz: f64,
    pub noise_temp_k: f64,
    pub user_gain_dbi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrecoderSection {
    pub flavor: Flavor,
    pub mmse_reg: MmseRegularization,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeederSection {
    pub rho: f64,
    pub num_interferers: usize,
    /// Whether the precoder is computed on `H_u·H_f` (true) or on `H_u` alone.
    pub known_at_gateway: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CsiSection {
    pub quantized: bool,
    /// Feeds reported per user; 0 reports all of them.
    pub max_feeds: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub drops: usize,
    pub seed: u64,
    pub power_dbw: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub cooperation: CooperationScheme,
    pub layout: LayoutSection,
    pub satellite: SatelliteSection,
    pub coverage: CoverageSection,
    pub beams: BeamsSection,
    pub feeds: FeedsSection,
    pub clusters: ClustersSection,
    pub pattern: PatternSection,
    pub rain: RainSection,
    pub rf: RfSection,
    pub precoder: PrecoderSection,
    pub feeder: FeederSection,
    pub csi: CsiSection,
    pub run: RunSection,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self::preset(Preset::Desk)
    }
}

impl ExperimentConfig {
    pub fn preset(preset: Preset) -> Self {
        let (count, spacing, theta, peak, per_beam) = match preset {
            Preset::Desk => (21, 0.45, 0.2, 52.0, 1.5),
            Preset::Regional => (56, 0.3, 0.11, 57.0, 3.0),
            Preset::Full => (100, 0.25, 0.11, 57.0, 1.5),
        };
        Self {
            cooperation: CooperationScheme::Gcm,
            layout: LayoutSection { preset },
            satellite: SatelliteSection {
                longitude_deg: 10.0,
                latitude_deg: 0.0,
                altitude_km: crate::channel::geometry::GEO_ALTITUDE_KM,
            },
            coverage: CoverageSection {
                center_lat_deg: 45.0,
                center_lon_deg: 10.0,
                user_radius_deg: match preset {
                    // Disc circumscribing the hex cell, so beam-edge users are present.
                    Preset::Regional => spacing / 3f64.sqrt(),
                    _ => spacing / 2.0,
                },
            },
            beams: BeamsSection {
                count,
                grid_spacing_deg: spacing,
            },
            feeds: FeedsSection {
                per_beam,
                focal_length_m: 6.0,
            },
            clusters: ClustersSection { size: 7 },
            pattern: PatternSection {
                peak_gain_dbi: peak,
                theta_3db_deg: theta,
            },
            rain: RainSection {
                mean_db: RainFadingModel::default().mean_db,
                sigma_db: RainFadingModel::default().sigma_db,
                clear_sky: false,
            },
            rf: RfSection {
                carrier_hz: 20e9,
                bandwidth_hz: 500e6,
                // G/T of 17.68 dB/K with a 41.7 dBi antenna.
                noise_temp_k: 10f64.powf((41.7 - 17.68) / 10.0),
                user_gain_dbi: 41.7,
            },
            precoder: PrecoderSection {
                flavor: Flavor::Mmse,
                mmse_reg: MmseRegularization::Standard,
            },
            feeder: FeederSection {
                rho: 0.0,
                num_interferers: 0,
                known_at_gateway: true,
            },
            csi: CsiSection {
                quantized: false,
                max_feeds: 0,
            },
            run: RunSection {
                drops: 500,
                seed: 1,
                power_dbw: 30.0,
            },
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let user: toml::Table = text.parse().map_err(|e| Error::Config(format!("{e}")))?;
        let preset = match user.get("layout").and_then(|l| l.get("preset")) {
            None => Preset::Desk,
            Some(v) => v
                .clone()
                .try_into()
                .map_err(|e| Error::Config(format!("layout.preset: {e}")))?,
        };
        let mut merged = toml::Table::try_from(Self::preset(preset))
            .map_err(|e| Error::Config(format!("{e}")))?;
        merge(&mut merged, user);
        let cfg: Self = toml::Value::Table(merged)
            .try_into()
            .map_err(|e| Error::Config(format!("{e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(format!("{e}")))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.run.drops == 0 {
            return bad("run.drops must be at least 1".into());
        }
        if !self.run.power_dbw.is_finite() {
            return bad("run.power_dbw must be finite".into());
        }
        if !(self.beams.grid_spacing_deg > 0.0) || !(self.coverage.user_radius_deg >= 0.0) {
            return bad("beam spacing must be positive and user radius non-negative".into());
        }
        if !(self.feeds.per_beam >= 1.0) {
            return bad(format!("feeds.per_beam must be >= 1, got {}", self.feeds.per_beam));
        }
        if !(self.pattern.theta_3db_deg > 0.0) {
            return bad("pattern.theta_3db_deg must be positive".into());
        }
        if !(self.rf.carrier_hz > 0.0) || !(self.rf.bandwidth_hz > 0.0) || !(self.rf.noise_temp_k > 0.0) {
            return bad("carrier, bandwidth and noise temperature must be positive".into());
        }
        if let CooperationScheme::GroupCollab { group_size: 0 } = self.cooperation {
            return bad("group size must be at least 1".into());
        }
        FeederLinkModel::new(self.feeder.rho, self.feeder.num_interferers)
            .map_err(|e| Error::Config(e.to_string()))?;
        self.rain_model().validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(())
    }

    /// Transmit power in watts.
    pub fn power_w(&self) -> f64 {
        10f64.powf(self.run.power_dbw / 10.0)
    }

    pub fn grid_spec(&self) -> HexGridSpec {
        HexGridSpec {
            num_beams: self.beams.count,
            cluster_size: self.clusters.size,
            feeds_per_beam: self.feeds.per_beam,
            spacing_deg: self.beams.grid_spacing_deg,
        }
    }

    pub fn grid(&self) -> Result<HexGrid> {
        hex_grid(&self.grid_spec()).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn geometry(&self, grid: &HexGrid) -> GeometryConfig {
        GeometryConfig {
            satellite_longitude_deg: self.satellite.longitude_deg,
            satellite_latitude_deg: self.satellite.latitude_deg,
            altitude_km: self.satellite.altitude_km,
            coverage_center_lat_deg: self.coverage.center_lat_deg,
            coverage_center_lon_deg: self.coverage.center_lon_deg,
            beam_centers: grid.beam_centers.clone(),
            feed_boresights: grid.feed_boresights.clone(),
            user_radius_deg: self.coverage.user_radius_deg,
            focal_length_m: self.feeds.focal_length_m,
            carrier_hz: self.rf.carrier_hz,
            noise_temp_k: self.rf.noise_temp_k,
            bandwidth_hz: self.rf.bandwidth_hz,
            user_gain_dbi: self.rf.user_gain_dbi,
            pattern: FeedPattern::new(self.pattern.peak_gain_dbi, self.pattern.theta_3db_deg),
        }
    }

    pub fn rain_model(&self) -> RainFadingModel {
        RainFadingModel {
            mean_db: self.rain.mean_db,
            sigma_db: self.rain.sigma_db,
            clear_sky: self.rain.clear_sky,
        }
    }

    pub fn feeder_model(&self) -> FeederLinkModel {
        FeederLinkModel {
            rho: self.feeder.rho,
            num_interferers: self.feeder.num_interferers,
        }
    }

    pub fn csi_impairment(&self) -> CsiImpairment {
        CsiImpairment {
            quantized: self.csi.quantized,
            max_feeds: (self.csi.max_feeds > 0).then_some(self.csi.max_feeds),
            spec: QuantizerSpec {
                max_feeds: if self.csi.max_feeds > 0 {
                    self.csi.max_feeds
                } else {
                    QuantizerSpec::default().max_feeds
                },
                ..QuantizerSpec::default()
            },
        }
    }

    /// Inner stage for `scheme`; the single-gateway reference regularizes with `G = 1`.
    pub fn inner_stage(&self, scheme: CooperationScheme, num_gateways: usize) -> InnerStage {
        let g = match scheme {
            CooperationScheme::SingleGatewayRef => 1,
            _ => num_gateways,
        };
        InnerStage::new(self.precoder.flavor, self.precoder.mmse_reg, g, self.power_w())
    }
}

/// Recursively overlays `over` onto `base`.
fn merge(base: &mut toml::Table, over: toml::Table) {
    for (k, v) in over {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}
