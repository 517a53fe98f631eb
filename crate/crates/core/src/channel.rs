//! Wireless transmission chain: distance → path loss → received power → SNR →
//! Shannon rate → transmission time.
//!
//! Units follow one convention throughout: bandwidth in MHz, noise density in
//! mW/MHz, so every rate comes out in Mbit/s and every payload is in Mbit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::Scalar;

/// Intercept of the log-distance path loss model, dB.
pub const PATH_LOSS_INTERCEPT_DB: f64 = 38.77;
/// Distance slope of the path loss model, dB per decade of meters.
pub const PATH_LOSS_DISTANCE_SLOPE: f64 = 16.7;
/// Frequency slope of the path loss model, dB per decade of GHz.
pub const PATH_LOSS_FREQ_SLOPE: f64 = 18.2;

pub const DEFAULT_CARRIER_GHZ: f64 = 5.9;
pub const DEFAULT_TX_POWER_DBM: f64 = 21.0;
/// 10^-11.4 mW per MHz.
pub const DEFAULT_NOISE_MW_PER_MHZ: f64 = 3.981_071_705_534_969e-12;

/// Smallest distance the path loss model accepts, in meters.
pub const MIN_DISTANCE_M: f64 = 1.0;

/// Physical constants of the radio link.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct WirelessParams<T = f64> {
    #[serde(rename = "freq_ghz")]
    pub carrier_freq: T,
    #[serde(rename = "tx_power_dbm")]
    pub tx_power: T,
    #[serde(rename = "noise_mw_per_mhz")]
    pub noise_density: T,
}

impl<T: Scalar> Default for WirelessParams<T> {
    fn default() -> Self {
        Self {
            carrier_freq: T::lit(DEFAULT_CARRIER_GHZ),
            tx_power: T::lit(DEFAULT_TX_POWER_DBM),
            noise_density: T::lit(10f64.powf(-11.4)),
        }
    }
}

impl<T: Scalar> WirelessParams<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.carrier_freq > T::zero()) || !self.carrier_freq.is_finite() {
            return Err(Error::Domain(format!(
                "carrier frequency must be positive, got {}",
                self.carrier_freq
            )));
        }
        if !(self.noise_density > T::zero()) || !self.noise_density.is_finite() {
            return Err(Error::Domain(format!(
                "noise density must be positive, got {}",
                self.noise_density
            )));
        }
        if !self.tx_power.is_finite() {
            return Err(Error::Domain("transmit power must be finite".into()));
        }
        Ok(())
    }

    /// Received signal power in mW at `distance` meters.
    pub fn received_signal_mw(&self, distance: T) -> Result<T> {
        let loss = path_loss_db(distance, self.carrier_freq)?;
        Ok(dbm_to_mw(received_power_dbm(self.tx_power, loss)))
    }
}

/// Log-distance path loss in dB for `distance` meters at `freq` GHz.
pub fn path_loss_db<T: Scalar>(distance: T, freq: T) -> Result<T> {
    if !(distance >= T::lit(MIN_DISTANCE_M)) {
        return Err(Error::Domain(format!(
            "distance must be at least {MIN_DISTANCE_M} m, got {distance}"
        )));
    }
    if !(freq > T::zero()) {
        return Err(Error::Domain(format!("frequency must be positive, got {freq}")));
    }
    Ok(T::lit(PATH_LOSS_INTERCEPT_DB)
        + T::lit(PATH_LOSS_DISTANCE_SLOPE) * distance.log10()
        + T::lit(PATH_LOSS_FREQ_SLOPE) * freq.log10())
}

#[inline]
pub fn received_power_dbm<T: Scalar>(tx_power: T, loss: T) -> T {
    tx_power - loss
}

#[inline]
pub fn dbm_to_mw<T: Scalar>(power: T) -> T {
    T::lit(10.0).powf(power / T::lit(10.0))
}

/// Signal-to-noise ratio of `signal` mW spread over `bandwidth` MHz.
pub fn snr<T: Scalar>(signal: T, bandwidth: T, noise_density: T) -> Result<T> {
    if !(bandwidth > T::zero()) {
        return Err(Error::Domain(format!(
            "bandwidth must be positive, got {bandwidth} (unallocated request?)"
        )));
    }
    if signal < T::zero() {
        return Err(Error::Domain(format!("signal power must be non-negative, got {signal}")));
    }
    Ok(signal / (noise_density * bandwidth))
}

/// Shannon rate in Mbit/s.
pub fn tx_rate_mbps<T: Scalar>(bandwidth: T, snr: T) -> Result<T> {
    if !(bandwidth > T::zero()) {
        return Err(Error::Domain(format!("bandwidth must be positive, got {bandwidth}")));
    }
    if snr < T::zero() {
        return Err(Error::Domain(format!("snr must be non-negative, got {snr}")));
    }
    Ok(bandwidth * (T::one() + snr).log2())
}

pub fn tx_time_s<T: Scalar>(size: T, rate: T) -> Result<T> {
    if size < T::zero() {
        return Err(Error::Domain(format!("size must be non-negative, got {size}")));
    }
    if !(rate > T::zero()) {
        return Err(Error::InfeasibleTransmission);
    }
    Ok(size / rate)
}

/// Seconds to push `size` Mbit over `bandwidth` MHz from `distance` meters.
pub fn transmission_time<T: Scalar>(
    params: &WirelessParams<T>,
    distance: T,
    bandwidth: T,
    size: T,
) -> Result<T> {
    let signal = params.received_signal_mw(distance)?;
    transmission_time_from_signal(signal, params.noise_density, bandwidth, size)
}

/// Tail of the chain once the received power is known. Used by evaluators that
/// cache the distance-dependent part.
#[inline]
pub fn transmission_time_from_signal<T: Scalar>(
    signal: T,
    noise_density: T,
    bandwidth: T,
    size: T,
) -> Result<T> {
    let ratio = snr(signal, bandwidth, noise_density)?;
    let rate = tx_rate_mbps(bandwidth, ratio)?;
    tx_time_s(size, rate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn path_loss_examples() {
        assert!((path_loss_db(1.0, 1.0).unwrap() - 38.77f64).abs() < 1e-12);
        assert!((path_loss_db(100.0, 5.9).unwrap() - 86.20f64).abs() < 0.01);
        assert!((path_loss_db(30.0, 5.9).unwrap() - 77.47f64).abs() < 0.01);
    }

    #[test]
    fn path_loss_rejects_bad_domain() {
        assert!(matches!(path_loss_db(0.5, 5.9), Err(Error::Domain(_))));
        assert!(matches!(path_loss_db(0.0, 5.9), Err(Error::Domain(_))));
        assert!(matches!(path_loss_db(100.0, 0.0), Err(Error::Domain(_))));
        assert!(path_loss_db(f64::NAN, 5.9).is_err());
    }

    #[test]
    fn received_power_examples() {
        assert_eq!(received_power_dbm(21.0, 0.0), 21.0);
        assert!((received_power_dbm(21.0, 86.20) - -65.20f64).abs() < 1e-12);
        assert_eq!(received_power_dbm(0.0, 10.0), -10.0);
    }

    #[test]
    fn dbm_conversion_examples() {
        assert_eq!(dbm_to_mw(0.0f64), 1.0);
        assert!(rel(dbm_to_mw(-65.20), 3.020e-7) < 1e-3);
        assert!(rel(dbm_to_mw(21.0), 125.89) < 1e-3);
    }

    #[test]
    fn snr_examples() {
        let n0 = 10f64.powf(-11.4);
        assert!((snr(n0 * 7.0, 7.0, n0).unwrap() - 1.0).abs() < 1e-12);
        assert!(rel(snr(3.020e-7, 10.0, n0).unwrap(), 7586.0) < 0.01);
        assert_eq!(snr(0.0, 10.0, n0).unwrap(), 0.0);
        assert!(matches!(snr(1.0, 0.0, n0), Err(Error::Domain(_))));
    }

    #[test]
    fn rate_examples() {
        assert_eq!(tx_rate_mbps(13.0, 1.0).unwrap(), 13.0);
        assert!(rel(tx_rate_mbps(10.0, 7586.0).unwrap(), 128.9) < 0.005);
        assert_eq!(tx_rate_mbps(10.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn tx_time_examples() {
        assert_eq!(tx_time_s(0.0, 42.0).unwrap(), 0.0);
        assert!(rel(tx_time_s(50.0, 128.9).unwrap(), 0.388) < 0.01);
        assert_eq!(tx_time_s(50.0, 50.0).unwrap(), 1.0);
        assert!(matches!(tx_time_s(50.0, 0.0), Err(Error::InfeasibleTransmission)));
    }

    #[test]
    fn chained_transmission_time() {
        let p = WirelessParams::<f64>::default();
        let far = transmission_time(&p, 100.0, 10.0, 50.0).unwrap();
        assert!(rel(far, 0.388) < 0.01);
        assert_eq!(transmission_time(&p, 100.0, 10.0, 0.0).unwrap(), 0.0);
        let near = transmission_time(&p, 30.0, 10.0, 50.0).unwrap();
        assert!(near < far);
        assert!(transmission_time(&p, 100.0, 0.0, 50.0).is_err());
    }

    #[test]
    fn chain_in_single_precision() {
        let p = WirelessParams::<f32>::default();
        let t = transmission_time(&p, 100.0f32, 10.0, 50.0).unwrap();
        assert!(((t - 0.388) / 0.388).abs() < 0.01);
    }

    #[test]
    fn default_noise_constant_matches_power_of_ten() {
        assert!(rel(DEFAULT_NOISE_MW_PER_MHZ, 10f64.powf(-11.4)) < 1e-14);
    }

    #[test]
    fn rate_increases_with_bandwidth_by_finite_differences() {
        let p = WirelessParams::<f64>::default();
        for d in [30.0, 80.0, 200.0, 1000.0] {
            let signal = p.received_signal_mw(d).unwrap();
            let rate = |b: f64| tx_rate_mbps(b, snr(signal, b, p.noise_density).unwrap()).unwrap();
            let mut b = 1.0;
            while b <= 100.0 {
                let h = 1e-3;
                assert!(rate(b + h) - rate(b - h) > 0.0, "d={d} b={b}");
                b += 0.5;
            }
        }
    }

    proptest! {
        #[test]
        fn path_loss_monotone(d in 1.0f64..5000.0, f in 0.1f64..100.0, dd in 1e-3f64..100.0, df in 1e-3f64..10.0) {
            let base = path_loss_db(d, f).unwrap();
            prop_assert!(path_loss_db(d + dd, f).unwrap() > base);
            prop_assert!(path_loss_db(d, f + df).unwrap() > base);
        }

        #[test]
        fn dbm_round_trip(p in -150.0f64..60.0) {
            let direct = 10f64.powf(p / 10.0);
            let chained = dbm_to_mw(received_power_dbm(p, 0.0));
            prop_assert!(((chained - direct) / direct).abs() <= 1e-12);
        }

        #[test]
        fn transmission_time_decreasing_in_bandwidth(
            d in 1.0f64..500.0,
            b in 1.0f64..100.0,
            db in 0.01f64..20.0,
            l in 0.1f64..200.0,
        ) {
            let p = WirelessParams::<f64>::default();
            let t0 = transmission_time(&p, d, b, l).unwrap();
            let t1 = transmission_time(&p, d, b + db, l).unwrap();
            prop_assert!(t1 < t0);
        }
    }

    #[test]
    fn transmission_time_decreasing_over_1000_draws() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let p = WirelessParams::<f64>::default();
        for _ in 0..1000 {
            let d = rng.gen_range(1.0..500.0);
            let b = rng.gen_range(1.0..99.0);
            let l = rng.gen_range(0.1..200.0);
            let t0 = transmission_time(&p, d, b, l).unwrap();
            let t1 = transmission_time(&p, d, b + 1.0, l).unwrap();
            let t2 = transmission_time(&p, d * 1.1, b, l).unwrap();
            let t3 = transmission_time(&p, d, b, l * 1.1).unwrap();
            assert!(t1 < t0 && t2 > t0 && t3 > t0);
        }
    }
}
