//! Forward transverse-Mercator projection (UTM on the WGS84 ellipsoid).
//!
//! Uses the Krüger series to sixth order in the third flattening, which is
//! accurate to well below a millimetre inside a UTM zone.

use serde::{Deserialize, Serialize};

const WGS84_A: f64 = 6_378_137.0;
const WGS84_F: f64 = 1.0 / 298.257_223_563;
const UTM_K0: f64 = 0.9996;
const FALSE_EASTING: f64 = 500_000.0;
const FALSE_NORTHING_SOUTH: f64 = 10_000_000.0;

/// A UTM zone used to project latitude/longitude rows into metres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UtmZone {
    pub zone: u8,
    #[serde(default = "default_north")]
    pub north: bool,
}

fn default_north() -> bool {
    true
}

impl UtmZone {
    pub fn new(zone: u8, north: bool) -> Option<Self> {
        (1..=60).contains(&zone).then_some(Self { zone, north })
    }

    /// Central meridian of the zone in degrees.
    pub fn central_meridian(&self) -> f64 {
        f64::from(self.zone) * 6.0 - 183.0
    }

    /// Projects geodetic coordinates (degrees) to `(easting, northing)` metres.
    pub fn project(&self, lat_deg: f64, lon_deg: f64) -> (f64, f64) {
        let n = WGS84_F / (2.0 - WGS84_F);
        let e = (WGS84_F * (2.0 - WGS84_F)).sqrt();
        let n2 = n * n;
        let n3 = n2 * n;
        let n4 = n3 * n;
        let n5 = n4 * n;
        let n6 = n5 * n;
        let rect_radius = WGS84_A / (1.0 + n) * (1.0 + n2 / 4.0 + n4 / 64.0 + n6 / 256.0);
        let alpha = [
            n / 2.0 - 2.0 * n2 / 3.0 + 5.0 * n3 / 16.0 + 41.0 * n4 / 180.0 - 127.0 * n5 / 288.0 + 7891.0 * n6 / 37800.0,
            13.0 * n2 / 48.0 - 3.0 * n3 / 5.0 + 557.0 * n4 / 1440.0 + 281.0 * n5 / 630.0
                - 1_983_433.0 * n6 / 1_935_360.0,
            61.0 * n3 / 240.0 - 103.0 * n4 / 140.0 + 15061.0 * n5 / 26880.0 + 167_603.0 * n6 / 181_440.0,
            49561.0 * n4 / 161_280.0 - 179.0 * n5 / 168.0 + 6_601_661.0 * n6 / 7_257_600.0,
            34729.0 * n5 / 80640.0 - 3_418_889.0 * n6 / 1_995_840.0,
            212_378_941.0 * n6 / 319_334_400.0,
        ];

        let phi = lat_deg.to_radians();
        let lambda = (lon_deg - self.central_meridian()).to_radians();
        let sin_phi = phi.sin();
        let t = (sin_phi.atanh() - e * (e * sin_phi).atanh()).sinh();
        let xi = t.atan2(lambda.cos());
        let eta = (lambda.sin() / (1.0 + t * t).sqrt()).atanh();

        let mut x = eta;
        let mut y = xi;
        for (j, a) in alpha.iter().enumerate() {
            let k = 2.0 * (j as f64 + 1.0);
            x += a * (k * xi).cos() * (k * eta).sinh();
            y += a * (k * xi).sin() * (k * eta).cosh();
        }
        let easting = FALSE_EASTING + UTM_K0 * rect_radius * x;
        let mut northing = UTM_K0 * rect_radius * y;
        if !self.north {
            northing += FALSE_NORTHING_SOUTH;
        }
        (easting, northing)
    }
}
