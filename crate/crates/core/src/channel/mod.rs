//! User-link channel synthesis: `H = D·W` over a clustered beam layout.

pub mod geometry;
pub mod hex;
pub mod layout;
pub mod pattern;
pub mod rain;

use std::f64::consts::PI;

use rand::Rng;

pub use geometry::{place_users, users_at_beam_centers, GeometryConfig, UserPosition};
pub use hex::{hex_grid, HexGrid, HexGridSpec};
pub use layout::ClusterLayout;
pub use pattern::FeedPattern;
pub use rain::{sample_rain, RainFadingModel};

use crate::error::{Error, Result};
use crate::linalg::{select_cols, select_rows, CMatrix, C64};

pub const BOLTZMANN: f64 = 1.380_649e-23;

/// Complex `K×N` user-link matrix together with its cluster layout.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    entries: CMatrix,
    layout: ClusterLayout,
}

impl ChannelMatrix {
    pub fn new(entries: CMatrix, layout: ClusterLayout) -> Result<Self> {
        if entries.nrows() != layout.num_beams() || entries.ncols() != layout.num_feeds() {
            return Err(Error::DimensionMismatch(format!(
                "channel is {}x{} but layout has {} beams and {} feeds",
                entries.nrows(),
                entries.ncols(),
                layout.num_beams(),
                layout.num_feeds()
            )));
        }
        Ok(Self { entries, layout })
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    pub fn layout(&self) -> &ClusterLayout {
        &self.layout
    }

    /// Same layout, different entries (e.g. after an impairment).
    pub fn with_entries(&self, entries: CMatrix) -> Result<Self> {
        Self::new(entries, self.layout.clone())
    }

    /// `H_g`: all beams, feeds of gateway `g` (`K×N_g`).
    pub fn gateway_block(&self, g: usize) -> CMatrix {
        let r = self.layout.feeds_of_gateway(g);
        self.entries.columns(r.start, r.len()).into_owned()
    }

    /// `H_g^c`: beams of cluster `c`, feeds of gateway `g` (`K_c×N_g`).
    pub fn cluster_block(&self, g: usize, c: usize) -> CMatrix {
        select_rows(&self.gateway_block(g), self.layout.beams_of_cluster(c))
    }

    /// Rows of the listed beams restricted to the feeds of gateway `g`.
    pub fn rows_for_gateway(&self, g: usize, beams: &[usize]) -> CMatrix {
        let feeds: Vec<usize> = self.layout.feeds_of_gateway(g).collect();
        select_cols(&select_rows(&self.entries, beams), &feeds)
    }
}

/// Complex feed gain `g_kn` toward a user.
///
/// The magnitude follows the Bessel pattern evaluated at the off-axis angle between the feed
/// boresight and the user direction; the phase is the extra path length from the displaced
/// feed to the user.
pub fn feed_gain(geometry: &GeometryConfig, feed_index: usize, user: &UserPosition) -> Result<C64> {
    let frame = geometry.frame()?;
    let boresight = *geometry.feed_boresights.get(feed_index).ok_or_else(|| {
        Error::InvalidParameter(format!("feed {feed_index} does not exist"))
    })?;
    Ok(feed_gain_in_frame(geometry, &frame, boresight, user))
}

fn feed_gain_in_frame(
    geometry: &GeometryConfig,
    frame: &geometry::AntennaFrame,
    boresight_deg: [f64; 2],
    user: &UserPosition,
) -> C64 {
    let theta = geometry::angle_between(frame.direction(boresight_deg), user.direction);
    let amplitude = geometry.pattern.amplitude(theta);
    let feed_pos = frame.feed_position(boresight_deg, geometry.focal_length_m);
    let extra = geometry::path_difference_m(user, feed_pos);
    C64::from_polar(amplitude, -2.0 * PI * extra / geometry.wavelength_m())
}

/// `w = W_R·g / (4π·(d/λ)·sqrt(k_B·T_R·BW))`, normalized to unit noise variance.
///
/// `w_r` is the user antenna amplitude gain, so `w_r²` is its power gain.
pub fn w_entry(
    g: C64,
    distance_m: f64,
    wavelength_m: f64,
    noise_temp_k: f64,
    bandwidth_hz: f64,
    w_r: f64,
) -> Result<C64> {
    if !(distance_m > 0.0) || !(bandwidth_hz > 0.0) || !(noise_temp_k > 0.0) || !(wavelength_m > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "distance, wavelength, noise temperature and bandwidth must be positive \
             (d={distance_m}, λ={wavelength_m}, T={noise_temp_k}, BW={bandwidth_hz})"
        )));
    }
    let denom = 4.0 * PI * (distance_m / wavelength_m) * (BOLTZMANN * noise_temp_k * bandwidth_hz).sqrt();
    Ok(g * (w_r / denom))
}

/// `W` for the given users (one row per user, ordered by beam).
pub fn user_link_matrix(geometry: &GeometryConfig, users: &[UserPosition]) -> Result<CMatrix> {
    let frame = geometry.frame()?;
    let n = geometry.feed_boresights.len();
    let lambda = geometry.wavelength_m();
    let w_r = geometry.user_amplitude_gain();
    let mut w = CMatrix::zeros(users.len(), n);
    for (k, user) in users.iter().enumerate() {
        for (j, &b) in geometry.feed_boresights.iter().enumerate() {
            let g = feed_gain_in_frame(geometry, &frame, b, user);
            w[(k, j)] = w_entry(
                g,
                user.range_m,
                lambda,
                geometry.noise_temp_k,
                geometry.bandwidth_hz,
                w_r,
            )?;
        }
    }
    Ok(w)
}

/// `H = D·W` with `D = diag(1/√A_k)`.
pub fn apply_fading(w: &CMatrix, attenuation: &[f64]) -> Result<CMatrix> {
    if attenuation.len() != w.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "{} attenuations for {} rows",
            attenuation.len(),
            w.nrows()
        )));
    }
    let mut h = w.clone();
    for (k, &a) in attenuation.iter().enumerate() {
        h.row_mut(k).scale_mut(1.0 / a.sqrt());
    }
    Ok(h)
}

/// Draws users and rain from `rng` and returns `H = D·W`.
pub fn assemble_channel<R: Rng + ?Sized>(
    geometry: &GeometryConfig,
    layout: &ClusterLayout,
    rain: &RainFadingModel,
    rng: &mut R,
) -> Result<ChannelMatrix> {
    check_dimensions(geometry, layout)?;
    let users = place_users(geometry, rng)?;
    let attenuation = sample_rain(rain, users.len(), rng)?;
    let w = user_link_matrix(geometry, &users)?;
    ChannelMatrix::new(apply_fading(&w, &attenuation)?, layout.clone())
}

pub fn check_dimensions(geometry: &GeometryConfig, layout: &ClusterLayout) -> Result<()> {
    if geometry.beam_centers.len() != layout.num_beams()
        || geometry.feed_boresights.len() != layout.num_feeds()
    {
        return Err(Error::DimensionMismatch(format!(
            "geometry has {} beams and {} feeds, layout has {} and {}",
            geometry.beam_centers.len(),
            geometry.feed_boresights.len(),
            layout.num_beams(),
            layout.num_feeds()
        )));
    }
    Ok(())
}
