//! Decibel conversions, centralized so the power/amplitude conventions live
//! in exactly one place: power ratios use `10 log10`, amplitude ratios `20 log10`.

/// Power ratio from dB: `10^(db/10)`.
#[inline]
pub fn db_to_pow(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Power ratio to dB.
#[inline]
pub fn pow_to_db(p: f64) -> f64 {
    10.0 * p.log10()
}

/// Amplitude ratio from dB: `10^(db/20)`.
#[inline]
pub fn db_to_amp(db: f64) -> f64 {
    10f64.powf(db / 20.0)
}

/// Amplitude ratio to dB.
#[inline]
pub fn amp_to_db(a: f64) -> f64 {
    20.0 * a.log10()
}

/// dBm to watts.
#[inline]
pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_pow(dbm - 30.0)
}

/// Watts to dBm.
#[inline]
pub fn watts_to_dbm(w: f64) -> f64 {
    pow_to_db(w) + 30.0
}
