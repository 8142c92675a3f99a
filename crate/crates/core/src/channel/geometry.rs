//! GEO satellite geometry: antenna frame, user placement and slant ranges.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::pattern::FeedPattern;
use crate::error::{Error, Result};

pub const GEO_ALTITUDE_KM: f64 = 35_786.0;
pub const EARTH_RADIUS_KM: f64 = 6_378.137;
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Upper bound on slant range for a visible user.
pub const MAX_SLANT_RANGE_KM: f64 = 42_000.0;

type V3 = [f64; 3];

fn dot(a: V3, b: V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: V3, b: V3) -> V3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn scale(a: V3, s: f64) -> V3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

fn sum(a: V3, b: V3) -> V3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn sub(a: V3, b: V3) -> V3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn norm(a: V3) -> f64 {
    dot(a, a).sqrt()
}

fn unit(a: V3) -> V3 {
    scale(a, 1.0 / norm(a))
}

fn ecef(lat_deg: f64, lon_deg: f64, radius_m: f64) -> V3 {
    let (lat, lon) = (lat_deg.to_radians(), lon_deg.to_radians());
    [
        radius_m * lat.cos() * lon.cos(),
        radius_m * lat.cos() * lon.sin(),
        radius_m * lat.sin(),
    ]
}

/// Angle between two unit vectors, stable near zero.
pub fn angle_between(a: [f64; 3], b: [f64; 3]) -> f64 {
    norm(cross(a, b)).atan2(dot(a, b))
}

/// Everything needed to evaluate the user-link matrix `W`.
///
/// Beam centers and feed boresights are angular offsets in degrees from the antenna
/// boresight, which points at the coverage center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryConfig {
    pub satellite_longitude_deg: f64,
    pub satellite_latitude_deg: f64,
    pub altitude_km: f64,
    pub coverage_center_lat_deg: f64,
    pub coverage_center_lon_deg: f64,
    pub beam_centers: Vec<[f64; 2]>,
    pub feed_boresights: Vec<[f64; 2]>,
    /// Users are uniform in a disk of this angular radius around their beam center.
    pub user_radius_deg: f64,
    /// Maps a feed boresight offset to its physical displacement on the feed array.
    pub focal_length_m: f64,
    pub carrier_hz: f64,
    pub noise_temp_k: f64,
    pub bandwidth_hz: f64,
    pub user_gain_dbi: f64,
    pub pattern: FeedPattern,
}

impl GeometryConfig {
    pub fn wavelength_m(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_hz
    }

    /// User antenna amplitude gain `W_R` (the power gain is `W_R²`).
    pub fn user_amplitude_gain(&self) -> f64 {
        10f64.powf(self.user_gain_dbi / 20.0)
    }

    pub fn frame(&self) -> Result<AntennaFrame> {
        let sat = ecef(
            self.satellite_latitude_deg,
            self.satellite_longitude_deg,
            (EARTH_RADIUS_KM + self.altitude_km) * 1e3,
        );
        let target = ecef(
            self.coverage_center_lat_deg,
            self.coverage_center_lon_deg,
            EARTH_RADIUS_KM * 1e3,
        );
        let boresight = unit(sub(target, sat));
        let z = [0.0, 0.0, 1.0];
        let north = sub(z, scale(boresight, dot(z, boresight)));
        if norm(north) < 1e-9 {
            return Err(Error::Geometry("antenna boresight is parallel to the polar axis".into()));
        }
        let north = unit(north);
        let east = unit(cross(north, boresight));
        Ok(AntennaFrame {
            satellite: sat,
            boresight,
            east,
            north,
        })
    }
}

/// Satellite position and orthonormal antenna axes, ECEF meters.
#[derive(Debug, Clone, Copy)]
pub struct AntennaFrame {
    pub satellite: V3,
    pub boresight: V3,
    pub east: V3,
    pub north: V3,
}

impl AntennaFrame {
    /// Unit pointing vector for an angular offset (degrees) from boresight.
    pub fn direction(&self, offset_deg: [f64; 2]) -> V3 {
        let (x, y) = (offset_deg[0].to_radians().tan(), offset_deg[1].to_radians().tan());
        unit(sum(self.boresight, sum(scale(self.east, x), scale(self.north, y))))
    }

    /// Physical feed displacement on the array for a boresight offset.
    pub fn feed_position(&self, offset_deg: [f64; 2], focal_length_m: f64) -> V3 {
        let (x, y) = (offset_deg[0].to_radians(), offset_deg[1].to_radians());
        scale(sum(scale(self.east, x), scale(self.north, y)), -focal_length_m)
    }

    /// Distance along `direction` to the Earth's surface, or `None` if the ray misses.
    pub fn range_to_earth(&self, direction: V3) -> Option<f64> {
        let r = EARTH_RADIUS_KM * 1e3;
        let b = dot(self.satellite, direction);
        let c = dot(self.satellite, self.satellite) - r * r;
        let disc = b * b - c;
        (disc >= 0.0).then(|| -b - disc.sqrt()).filter(|&t| t > 0.0)
    }
}

/// One scheduled user.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UserPosition {
    pub beam: usize,
    pub offset_deg: [f64; 2],
    pub direction: [f64; 3],
    pub range_m: f64,
}

impl UserPosition {
    pub fn locate(frame: &AntennaFrame, beam: usize, offset_deg: [f64; 2]) -> Result<Self> {
        let direction = frame.direction(offset_deg);
        let range_m = frame.range_to_earth(direction).ok_or_else(|| {
            Error::Geometry(format!("user of beam {beam} at {offset_deg:?} is off the Earth"))
        })?;
        let km = range_m / 1e3;
        if !(GEO_ALTITUDE_KM..=MAX_SLANT_RANGE_KM).contains(&km) {
            return Err(Error::Geometry(format!(
                "slant range {km:.1} km of beam {beam} outside [{GEO_ALTITUDE_KM}, {MAX_SLANT_RANGE_KM}] km"
            )));
        }
        Ok(Self {
            beam,
            offset_deg,
            direction,
            range_m,
        })
    }
}

/// Places one user per beam, uniformly in a disk around the beam center.
pub fn place_users<R: Rng + ?Sized>(geometry: &GeometryConfig, rng: &mut R) -> Result<Vec<UserPosition>> {
    let frame = geometry.frame()?;
    geometry
        .beam_centers
        .iter()
        .enumerate()
        .map(|(beam, c)| {
            let r = geometry.user_radius_deg * rng.random::<f64>().sqrt();
            let phi = std::f64::consts::TAU * rng.random::<f64>();
            UserPosition::locate(&frame, beam, [c[0] + r * phi.cos(), c[1] + r * phi.sin()])
        })
        .collect()
}

/// Users exactly at their beam centers.
pub fn users_at_beam_centers(geometry: &GeometryConfig) -> Result<Vec<UserPosition>> {
    let frame = geometry.frame()?;
    geometry
        .beam_centers
        .iter()
        .enumerate()
        .map(|(beam, &c)| UserPosition::locate(&frame, beam, c))
        .collect()
}

/// Extra path length from feed `feed_pos` (relative to the satellite) to the user, in meters.
pub fn path_difference_m(user: &UserPosition, feed_pos: V3) -> f64 {
    let to_user = scale(user.direction, user.range_m);
    norm(sub(to_user, feed_pos)) - user.range_m
}
