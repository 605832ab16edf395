//! Rician baseline channel: freespace LoS steering outer product plus i.i.d.
//! complex-Gaussian NLoS, split by the K-factor.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::channel::ChannelMatrix;
use crate::db::{db_to_amp, db_to_pow};
use crate::error::{Error, Result};
use crate::geometry::{pattern_gain, steering_vector, ArraySpec, LinkGeometry};

/// Floor reported instead of −∞ dB for zero eigenvalues, so CDF code never
/// sees non-finite values.
pub const EIGENVALUE_FLOOR_DB: f64 = -300.0;

/// Parameters of the Rician split. The pathloss is taken from the same
/// urban-macro expressions used by the stochastic model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RicianParams {
    /// Rician K-factor, dB.
    pub k_db: f64,
    /// Pathloss β, dB (amplitude scale is 10^(−β/20)).
    pub pathloss_db: f64,
    /// Carrier wavelength, meters.
    pub wavelength_m: f64,
}

/// Draw one Rician channel:
///
/// `H = β · ( √(K/(K+1)) · a_rx a_txᴴ + √(1/(K+1)) · W )`,  W ~ i.i.d. CN(0,1).
///
/// The LoS outer product uses freespace steering vectors at the link's
/// departure/arrival angles (element pattern amplitudes folded in); the NLoS
/// draw is filled row-major so a seeded RNG reproduces the matrix bit-exactly.
pub fn rician_channel<R: Rng>(
    p: &RicianParams,
    geo: &LinkGeometry,
    tx: &ArraySpec,
    rx: &ArraySpec,
    rng: &mut R,
) -> Result<ChannelMatrix> {
    if !(p.wavelength_m > 0.0) {
        return Err(Error::Config(format!(
            "wavelength {} must be positive",
            p.wavelength_m
        )));
    }
    let n_rx = rx.n_elements();
    let n_tx = tx.n_elements();

    let k_lin = db_to_pow(p.k_db);
    let w_los = (k_lin / (k_lin + 1.0)).sqrt();
    let w_nlos = (1.0 / (k_lin + 1.0)).sqrt();
    let beta_amp = db_to_amp(-p.pathloss_db);

    let mut h = DMatrix::<Complex64>::zeros(n_rx, n_tx);
    let sigma = std::f64::consts::FRAC_1_SQRT_2; // CN(0,1): each part N(0, 1/2)
    for r in 0..n_rx {
        for c in 0..n_tx {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            h[(r, c)] = Complex64::new(re * sigma, im * sigma) * (beta_amp * w_nlos);
        }
    }

    let g_los = (pattern_gain(&tx.element, geo.dep_az, geo.dep_zen)?
        * pattern_gain(&rx.element, geo.arr_az, geo.arr_zen)?)
    .sqrt();
    if w_los * g_los > 0.0 {
        let a_tx = steering_vector(tx, geo.dep_az, geo.dep_zen, p.wavelength_m);
        let a_rx = steering_vector(rx, geo.arr_az, geo.arr_zen, p.wavelength_m);
        h.gerc(
            Complex64::new(beta_amp * w_los * g_los, 0.0),
            &a_rx,
            &a_tx,
            Complex64::new(1.0, 0.0),
        );
    }

    ChannelMatrix::new(h)
}

/// Eigenvalues of `HᴴH` (squared singular values of `H`) in dB, descending.
/// Zero eigenvalues are reported as [`EIGENVALUE_FLOOR_DB`]; the count is
/// `min(n_rx, n_tx)`.
pub fn eigenvalues_db(h: &ChannelMatrix) -> Result<Vec<f64>> {
    if h.data.is_empty() {
        return Err(Error::Dimension {
            op: "eigenvalues_db",
            detail: "empty matrix".into(),
        });
    }
    if h.data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("eigenvalues_db input"));
    }
    let mut sv: Vec<f64> = h.data.clone().singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    Ok(sv
        .iter()
        .map(|s| {
            let ev = s * s;
            let db = 10.0 * ev.log10();
            if db.is_finite() {
                db.max(EIGENVALUE_FLOOR_DB)
            } else {
                EIGENVALUE_FLOOR_DB
            }
        })
        .collect())
}
