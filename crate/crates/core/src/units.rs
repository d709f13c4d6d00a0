//! Conversions between the ordinary-frequency units used at the interfaces
//! (kHz, µs) and the angular units used internally (rad/s, s).

use std::f64::consts::TAU;

const KHZ_TO_RAD_PER_S: f64 = TAU * 1e3;

/// Ordinary frequency in kHz to angular frequency in rad/s.
pub fn khz_to_rad(khz: f64) -> f64 {
    khz * KHZ_TO_RAD_PER_S
}

/// Angular frequency in rad/s to ordinary frequency in kHz.
pub fn rad_to_khz(rad_per_s: f64) -> f64 {
    rad_per_s / KHZ_TO_RAD_PER_S
}

pub fn us_to_s(us: f64) -> f64 {
    us / 1e6
}

pub fn s_to_us(s: f64) -> f64 {
    s * 1e6
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn headline_mixing_strength() {
        // (2π)200 kHz
        assert!((khz_to_rad(200.0) - 1.2566370614359172e6).abs() < 1e-6);
    }

    proptest! {
        #[test]
        fn khz_round_trip_within_one_ulp(x in -1e7f64..1e7) {
            let back = rad_to_khz(khz_to_rad(x));
            let ulp = f64::EPSILON * x.abs().max(f64::MIN_POSITIVE);
            prop_assert!((back - x).abs() <= ulp);
        }
    }
}
