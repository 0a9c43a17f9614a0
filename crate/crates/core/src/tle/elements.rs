use std::f64::consts::PI;

use super::record::TleRecord;
use crate::kbstore::TimeRef;

/// Earth gravitational parameter, km³/s².
pub const MU_EARTH: f64 = 398_600.441_8;
/// Earth equatorial radius, km.
pub const EARTH_RADIUS_KM: f64 = 6378.137;
pub const SECONDS_PER_DAY: f64 = 86_400.0;

/// Classical elements in conventional units, with derived size and
/// altitudes. Angles in degrees, lengths in km.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitalElements {
    pub epoch: TimeRef,
    pub inclination_deg: f64,
    pub raan_deg: f64,
    pub eccentricity: f64,
    pub arg_perigee_deg: f64,
    pub mean_anomaly_deg: f64,
    /// rev/day.
    pub mean_motion: f64,
    pub bstar: f64,
    pub semi_major_axis_km: f64,
    pub perigee_altitude_km: f64,
    pub apogee_altitude_km: f64,
}

/// Two-body semi-major axis for a mean motion in rev/day.
pub fn semi_major_axis_km(mean_motion_rev_per_day: f64) -> f64 {
    let n = mean_motion_rev_per_day * 2.0 * PI / SECONDS_PER_DAY;
    (MU_EARTH / (n * n)).cbrt()
}

pub fn to_elements(rec: &TleRecord) -> OrbitalElements {
    let a = semi_major_axis_km(rec.mean_motion);
    let e = rec.eccentricity;
    OrbitalElements {
        epoch: rec.epoch(),
        inclination_deg: rec.inclination,
        raan_deg: rec.raan,
        eccentricity: e,
        arg_perigee_deg: rec.arg_perigee,
        mean_anomaly_deg: rec.mean_anomaly,
        mean_motion: rec.mean_motion,
        bstar: rec.bstar(),
        semi_major_axis_km: a,
        perigee_altitude_km: a * (1.0 - e) - EARTH_RADIUS_KM,
        apogee_altitude_km: a * (1.0 + e) - EARTH_RADIUS_KM,
    }
}
