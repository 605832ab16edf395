//! Simplified cluster-based stochastic channel generator with urban-macro
//! LoS/NLoS parameters, one independent realization per drop.
//!
//! Pipeline per link per drop: draw large-scale parameters (pathloss + shadow
//! fading, K-factor, delay and angular spreads), place scatterer clusters
//! around the line-of-sight direction, then sum per-ray steering outer
//! products into the channel matrix.
//!
//! Large-scale parameters are drawn independently (no cross-correlation
//! matrix, no spatial consistency between drops), which is all the eigenvalue
//! and rate comparisons here exercise.

use std::collections::HashMap;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::channel::ChannelMatrix;
use crate::db::{db_to_amp, db_to_pow};
use crate::error::{Error, Result};
use crate::geometry::{
    element_positions, pattern_gain, steering_vector_at, ArraySpec, LinkGeometry,
};

/// Std value (in dB units) used to suppress a fading term: 10^(−100/20).
pub const SUPPRESSED_STD_DB: f64 = 1e-5;

/// Speed of light used by the pathloss breakpoint expression, m/s.
const C_LIGHT: f64 = 3.0e8;

/// Normalized ray offset angles for a 20-ray cluster (unit rms spread).
pub const RAY_OFFSETS: [f64; 20] = [
    0.0447, -0.0447, 0.1413, -0.1413, 0.2492, -0.2492, 0.3715, -0.3715, 0.5129, -0.5129, 0.6797,
    -0.6797, 0.8844, -0.8844, 1.1481, -1.1481, 1.5195, -1.5195, 2.1551, -2.1551,
];

/// Scenario flavor of the urban-macro tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scenario {
    #[serde(rename = "uma-los")]
    UmaLos,
    #[serde(rename = "uma-nlos")]
    UmaNlos,
}

impl Scenario {
    pub fn as_str(&self) -> &'static str {
        match self {
            Scenario::UmaLos => "uma-los",
            Scenario::UmaNlos => "uma-nlos",
        }
    }

    pub fn is_los(&self) -> bool {
        matches!(self, Scenario::UmaLos)
    }
}

/// Statistical scenario configuration for one link model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioParams {
    pub scenario: Scenario,
    /// Carrier frequency, Hz.
    pub carrier_hz: f64,
    /// Shadow-fading standard deviation, dB.
    pub sf_std_db: f64,
    /// Rician K-factor mean / std, dB.
    pub k_mean_db: f64,
    pub k_std_db: f64,
    /// Delay spread, log10(seconds).
    pub ds_log_mean: f64,
    pub ds_log_std: f64,
    /// Azimuth/zenith spreads of departure and arrival, log10(degrees).
    pub asd_log_mean: f64,
    pub asd_log_std: f64,
    pub asa_log_mean: f64,
    pub asa_log_std: f64,
    pub zsd_log_mean: f64,
    pub zsd_log_std: f64,
    pub zsa_log_mean: f64,
    pub zsa_log_std: f64,
    /// Cluster count and rays per cluster.
    pub n_clusters: usize,
    pub rays_per_cluster: usize,
    /// Per-cluster power shadowing std, dB.
    pub cluster_shadowing_std_db: f64,
    /// Delay-proportionality factor r_tau.
    pub delay_proportionality: f64,
    /// Per-cluster (intra-cluster) ray spreads, degrees.
    pub c_asd_deg: f64,
    pub c_asa_deg: f64,
    pub c_zsd_deg: f64,
    pub c_zsa_deg: f64,
}

impl ScenarioParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.carrier_hz > 0.0) {
            return Err(Error::Config("carrier frequency must be positive".into()));
        }
        if self.n_clusters < 1 {
            return Err(Error::Config("need at least one cluster".into()));
        }
        if self.rays_per_cluster < 1 || self.rays_per_cluster > RAY_OFFSETS.len() {
            return Err(Error::Config(format!(
                "rays per cluster must be in 1..={}",
                RAY_OFFSETS.len()
            )));
        }
        let stds = [
            self.sf_std_db,
            self.k_std_db,
            self.ds_log_std,
            self.asd_log_std,
            self.asa_log_std,
            self.zsd_log_std,
            self.zsa_log_std,
            self.cluster_shadowing_std_db,
        ];
        if stds.iter().any(|s| *s < 0.0 || !s.is_finite()) {
            return Err(Error::Config("standard deviations must be >= 0".into()));
        }
        if !(self.delay_proportionality > 1.0) {
            return Err(Error::Config("delay proportionality must exceed 1".into()));
        }
        Ok(())
    }

    /// Copy with fading ablations applied: suppressed terms get their std set
    /// to 10^(−100/20) (i.e. "−100 dB"), leaving every draw at its mean.
    pub fn with_ablations(&self, suppress_sf: bool, suppress_k_std: bool) -> Self {
        let mut p = self.clone();
        if suppress_sf {
            p.sf_std_db = SUPPRESSED_STD_DB;
        }
        if suppress_k_std {
            p.k_std_db = SUPPRESSED_STD_DB;
        }
        p
    }
}

#[derive(Debug, Deserialize)]
struct RawScenarioEntry {
    sf_std_db: f64,
    k_mean_db: f64,
    k_std_db: f64,
    ds_log_mean: f64,
    ds_log_std: f64,
    asd_log_mean: f64,
    asd_log_std: f64,
    asa_log_mean: f64,
    asa_log_std: f64,
    zsd_log_mean: f64,
    zsd_log_std: f64,
    zsa_log_mean: f64,
    zsa_log_std: f64,
    n_clusters: usize,
    rays_per_cluster: usize,
    cluster_shadowing_std_db: f64,
    delay_proportionality: f64,
    c_asd_deg: f64,
    c_asa_deg: f64,
    c_zsd_deg: f64,
    c_zsa_deg: f64,
}

#[derive(Debug, Deserialize)]
struct RawScenarioTable {
    schema_version: u32,
    #[allow(dead_code)]
    description: String,
    #[allow(dead_code)]
    units: serde_json::Value,
    scenarios: HashMap<String, RawScenarioEntry>,
}

/// Versioned scenario parameter tables, loaded from JSON.
#[derive(Debug, Clone)]
pub struct ScenarioTable {
    entries: HashMap<Scenario, ScenarioParams>,
}

impl ScenarioTable {
    /// The table shipped with the crate.
    pub fn builtin() -> Self {
        Self::from_json(include_str!("../data/tr38901_uma.json"))
            .expect("builtin scenario table must parse")
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawScenarioTable = serde_json::from_str(text)?;
        if raw.schema_version != 1 {
            return Err(Error::Config(format!(
                "unsupported scenario table schema version {}",
                raw.schema_version
            )));
        }
        let mut entries = HashMap::new();
        for (key, e) in raw.scenarios {
            let scenario = match key.as_str() {
                "uma-los" => Scenario::UmaLos,
                "uma-nlos" => Scenario::UmaNlos,
                other => {
                    return Err(Error::Config(format!("unknown scenario id '{other}'")));
                }
            };
            let params = ScenarioParams {
                scenario,
                carrier_hz: 0.0, // set by `params`
                sf_std_db: e.sf_std_db,
                k_mean_db: e.k_mean_db,
                k_std_db: e.k_std_db,
                ds_log_mean: e.ds_log_mean,
                ds_log_std: e.ds_log_std,
                asd_log_mean: e.asd_log_mean,
                asd_log_std: e.asd_log_std,
                asa_log_mean: e.asa_log_mean,
                asa_log_std: e.asa_log_std,
                zsd_log_mean: e.zsd_log_mean,
                zsd_log_std: e.zsd_log_std,
                zsa_log_mean: e.zsa_log_mean,
                zsa_log_std: e.zsa_log_std,
                n_clusters: e.n_clusters,
                rays_per_cluster: e.rays_per_cluster,
                cluster_shadowing_std_db: e.cluster_shadowing_std_db,
                delay_proportionality: e.delay_proportionality,
                c_asd_deg: e.c_asd_deg,
                c_asa_deg: e.c_asa_deg,
                c_zsd_deg: e.c_zsd_deg,
                c_zsa_deg: e.c_zsa_deg,
            };
            entries.insert(scenario, params);
        }
        Ok(ScenarioTable { entries })
    }

    /// Parameters for a scenario at the given carrier frequency.
    pub fn params(&self, scenario: Scenario, carrier_hz: f64) -> Result<ScenarioParams> {
        let mut p = self
            .entries
            .get(&scenario)
            .cloned()
            .ok_or_else(|| Error::Config(format!("scenario {} not in table", scenario.as_str())))?;
        p.carrier_hz = carrier_hz;
        p.validate()?;
        Ok(p)
    }
}

/// One drawn realization of the large-scale parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LargeScaleSample {
    /// Total attenuation β = pathloss + shadow fading, dB.
    pub pathloss_db: f64,
    /// Shadow-fading term alone, dB.
    pub sf_db: f64,
    /// Rician K-factor, dB.
    pub k_db: f64,
    /// RMS delay spread, seconds.
    pub delay_spread_s: f64,
    /// Angular spreads, degrees.
    pub asd_deg: f64,
    pub asa_deg: f64,
    pub zsd_deg: f64,
    pub zsa_deg: f64,
}

/// One ray inside a cluster: absolute local-frame angles plus initial phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray {
    pub dep_az: f64,
    pub dep_zen: f64,
    pub arr_az: f64,
    pub arr_zen: f64,
    pub phase: f64,
}

/// One scatterer cluster: delay, normalized power, mean angles, rays.
#[derive(Debug, Clone, PartialEq)]
pub struct Cluster {
    pub delay_s: f64,
    /// Linear power share; cluster powers sum to 1.
    pub power: f64,
    pub dep_az: f64,
    pub dep_zen: f64,
    pub arr_az: f64,
    pub arr_zen: f64,
    pub rays: Vec<Ray>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterSet {
    pub clusters: Vec<Cluster>,
}

/// Urban-macro pathloss in dB at the link geometry.
///
/// LoS uses the two-slope expression with breakpoint
/// `d_bp = 4 (h_tx − 1)(h_rx − 1) f_c / c`; NLoS takes the max of the LoS
/// value and the NLoS fit. Validity is enforced on the ground distance
/// (10 m – 5 km); the violated bound is carried in the error.
pub fn pathloss(sc: &ScenarioParams, geo: &LinkGeometry, h_tx_m: f64, h_rx_m: f64) -> Result<f64> {
    if geo.d2d < 10.0 {
        return Err(Error::OutOfValidity {
            quantity: "d2D",
            value: geo.d2d,
            bound: "d2D >= 10 m",
        });
    }
    if geo.d2d > 5000.0 {
        return Err(Error::OutOfValidity {
            quantity: "d2D",
            value: geo.d2d,
            bound: "d2D <= 5 km",
        });
    }
    let fc_ghz = sc.carrier_hz / 1e9;
    let d_bp = 4.0 * (h_tx_m - 1.0).max(0.0) * (h_rx_m - 1.0).max(0.0) * sc.carrier_hz / C_LIGHT;
    let pl_los = if geo.d2d <= d_bp {
        28.0 + 22.0 * geo.d3d.log10() + 20.0 * fc_ghz.log10()
    } else {
        28.0 + 40.0 * geo.d3d.log10() + 20.0 * fc_ghz.log10()
            - 9.0 * (d_bp.powi(2) + (h_tx_m - h_rx_m).powi(2)).log10()
    };
    match sc.scenario {
        Scenario::UmaLos => Ok(pl_los),
        Scenario::UmaNlos => {
            let pl_nlos =
                13.54 + 39.08 * geo.d3d.log10() + 20.0 * fc_ghz.log10() - 0.6 * (h_rx_m - 1.5);
            Ok(pl_los.max(pl_nlos))
        }
    }
}

/// Draw one large-scale realization. Draw order is fixed (SF, K, DS, ASD,
/// ASA, ZSD, ZSA) so a seeded RNG reproduces the sample bit-exactly.
pub fn draw_large_scale<R: Rng>(
    sc: &ScenarioParams,
    geo: &LinkGeometry,
    h_tx_m: f64,
    h_rx_m: f64,
    rng: &mut R,
) -> Result<LargeScaleSample> {
    let pl = pathloss(sc, geo, h_tx_m, h_rx_m)?;
    let sf = gauss(rng, 0.0, sc.sf_std_db);
    let k_db = gauss(rng, sc.k_mean_db, sc.k_std_db);
    let ds = 10f64.powf(gauss(rng, sc.ds_log_mean, sc.ds_log_std));
    let asd = 10f64.powf(gauss(rng, sc.asd_log_mean, sc.asd_log_std)).min(104.0);
    let asa = 10f64.powf(gauss(rng, sc.asa_log_mean, sc.asa_log_std)).min(104.0);
    let zsd = 10f64.powf(gauss(rng, sc.zsd_log_mean, sc.zsd_log_std)).min(52.0);
    let zsa = 10f64.powf(gauss(rng, sc.zsa_log_mean, sc.zsa_log_std)).min(52.0);
    Ok(LargeScaleSample {
        pathloss_db: pl + sf,
        sf_db: sf,
        k_db,
        delay_spread_s: ds,
        asd_deg: asd,
        asa_deg: asa,
        zsd_deg: zsd,
        zsa_deg: zsa,
    })
}

fn gauss<R: Rng>(rng: &mut R, mean: f64, std: f64) -> f64 {
    Normal::new(mean, std)
        .expect("std must be non-negative")
        .sample(rng)
}

fn wrap_azimuth(az: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut a = (az + std::f64::consts::PI).rem_euclid(two_pi) - std::f64::consts::PI;
    if a >= std::f64::consts::PI {
        a -= two_pi;
    }
    a
}

/// Mirror a zenith excursion back into [0, π].
fn reflect_zenith(zen: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut z = zen.rem_euclid(two_pi);
    if z > std::f64::consts::PI {
        z = two_pi - z;
    }
    z
}

/// Place scatterer clusters around the line-of-sight direction.
///
/// Delays are exponential with scale `r_τ · DS`, sorted and shifted to start
/// at 0; powers decay exponentially in delay with per-cluster lognormal
/// shadowing and are normalized to sum 1; cluster mean angles are Gaussian
/// around the LoS direction with the sampled spreads; each cluster carries
/// the fixed ray-offset fan scaled by the per-cluster spreads, with random
/// departure/arrival coupling and i.i.d. uniform ray phases.
pub fn generate_clusters<R: Rng>(
    lss: &LargeScaleSample,
    geo: &LinkGeometry,
    sc: &ScenarioParams,
    rng: &mut R,
) -> ClusterSet {
    let n = sc.n_clusters;
    let m = sc.rays_per_cluster;
    let r_tau = sc.delay_proportionality;
    let ds = lss.delay_spread_s;

    // delays: exponential, sorted, minimum shifted to zero
    let mut delays: Vec<f64> = (0..n)
        .map(|_| {
            let u: f64 = rng.random::<f64>().max(1e-300);
            -r_tau * ds * u.ln()
        })
        .collect();
    delays.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let tmin = delays[0];
    for d in delays.iter_mut() {
        *d -= tmin;
    }

    // powers: exponential in delay, lognormal per-cluster shadowing, normalized
    let mut powers: Vec<f64> = delays
        .iter()
        .map(|tau| {
            let shadow = gauss(rng, 0.0, sc.cluster_shadowing_std_db);
            (-tau * (r_tau - 1.0) / (r_tau * ds)).exp() * db_to_pow(-shadow)
        })
        .collect();
    let total: f64 = powers.iter().sum();
    for p in powers.iter_mut() {
        *p /= total;
    }

    // cluster mean angles around the LoS direction (spreads in degrees)
    let asd = lss.asd_deg.to_radians();
    let asa = lss.asa_deg.to_radians();
    let zsd = lss.zsd_deg.to_radians();
    let zsa = lss.zsa_deg.to_radians();
    let dep_az: Vec<f64> = (0..n)
        .map(|_| wrap_azimuth(geo.dep_az + gauss(rng, 0.0, asd)))
        .collect();
    let arr_az: Vec<f64> = (0..n)
        .map(|_| wrap_azimuth(geo.arr_az + gauss(rng, 0.0, asa)))
        .collect();
    let dep_zen: Vec<f64> = (0..n)
        .map(|_| reflect_zenith(geo.dep_zen + gauss(rng, 0.0, zsd)))
        .collect();
    let arr_zen: Vec<f64> = (0..n)
        .map(|_| reflect_zenith(geo.arr_zen + gauss(rng, 0.0, zsa)))
        .collect();

    let c_asd = sc.c_asd_deg.to_radians();
    let c_asa = sc.c_asa_deg.to_radians();
    let c_zsd = sc.c_zsd_deg.to_radians();
    let c_zsa = sc.c_zsa_deg.to_radians();

    let mut clusters = Vec::with_capacity(n);
    for i in 0..n {
        // random coupling of the offset fans between the two link ends
        let mut dep_zen_idx: Vec<usize> = (0..m).collect();
        let mut arr_az_idx: Vec<usize> = (0..m).collect();
        let mut arr_zen_idx: Vec<usize> = (0..m).collect();
        dep_zen_idx.shuffle(rng);
        arr_az_idx.shuffle(rng);
        arr_zen_idx.shuffle(rng);

        let rays = (0..m)
            .map(|r| Ray {
                dep_az: wrap_azimuth(dep_az[i] + c_asd * RAY_OFFSETS[r]),
                dep_zen: reflect_zenith(dep_zen[i] + c_zsd * RAY_OFFSETS[dep_zen_idx[r]]),
                arr_az: wrap_azimuth(arr_az[i] + c_asa * RAY_OFFSETS[arr_az_idx[r]]),
                arr_zen: reflect_zenith(arr_zen[i] + c_zsa * RAY_OFFSETS[arr_zen_idx[r]]),
                phase: rng.random::<f64>() * 2.0 * std::f64::consts::PI - std::f64::consts::PI,
            })
            .collect();

        clusters.push(Cluster {
            delay_s: delays[i],
            power: powers[i],
            dep_az: dep_az[i],
            dep_zen: dep_zen[i],
            arr_az: arr_az[i],
            arr_zen: arr_zen[i],
            rays,
        });
    }
    ClusterSet { clusters }
}

/// Sum the LoS term and the per-ray steering outer products into a channel
/// matrix:
///
/// `H = β · ( √(K/(K+1)) · g·a_rx a_txᴴ + √(1/(K+1)) · Σ_n Σ_m √(P_n/M) · g · a_rx a_txᴴ · e^{jφ} )`
///
/// with β the linear amplitude `10^(−pathloss_db/20)` and `g` the element
/// pattern amplitudes `√F` at the ray (or LoS) angles. With isotropic
/// elements `E[‖H‖_F²] = β² · N_rx · N_tx`.
pub fn assemble_channel(
    clusters: &ClusterSet,
    lss: &LargeScaleSample,
    tx: &ArraySpec,
    rx: &ArraySpec,
    wavelength: f64,
    geo: &LinkGeometry,
) -> Result<ChannelMatrix> {
    if clusters.clusters.is_empty() {
        return Err(Error::Dimension {
            op: "assemble_channel",
            detail: "empty cluster set".into(),
        });
    }
    let n_rx = rx.n_elements();
    let n_tx = tx.n_elements();
    let tx_pos = element_positions(tx, wavelength);
    let rx_pos = element_positions(rx, wavelength);

    let k_lin = db_to_pow(lss.k_db);
    let w_los = (k_lin / (k_lin + 1.0)).sqrt();
    let w_nlos = (1.0 / (k_lin + 1.0)).sqrt();
    let beta_amp = db_to_amp(-lss.pathloss_db);

    let mut h = DMatrix::<Complex64>::zeros(n_rx, n_tx);

    // LoS component, weighted by the element patterns at the LoS angles
    let g_los = (pattern_gain(&tx.element, geo.dep_az, geo.dep_zen)?
        * pattern_gain(&rx.element, geo.arr_az, geo.arr_zen)?)
    .sqrt();
    if w_los * g_los > 0.0 {
        let a_tx = steering_vector_at(&tx_pos, geo.dep_az, geo.dep_zen, wavelength);
        let a_rx = steering_vector_at(&rx_pos, geo.arr_az, geo.arr_zen, wavelength);
        h.gerc(
            Complex64::new(beta_amp * w_los * g_los, 0.0),
            &a_rx,
            &a_tx,
            Complex64::new(0.0, 0.0),
        );
    }

    // cluster rays
    let m = clusters.clusters[0].rays.len().max(1) as f64;
    for cl in &clusters.clusters {
        for ray in &cl.rays {
            let g = (pattern_gain(&tx.element, ray.dep_az, ray.dep_zen)?
                * pattern_gain(&rx.element, ray.arr_az, ray.arr_zen)?)
            .sqrt();
            if g == 0.0 {
                continue;
            }
            let amp = beta_amp * w_nlos * (cl.power / m).sqrt() * g;
            let a_tx = steering_vector_at(&tx_pos, ray.dep_az, ray.dep_zen, wavelength);
            let a_rx = steering_vector_at(&rx_pos, ray.arr_az, ray.arr_zen, wavelength);
            h.gerc(
                Complex64::from_polar(amp, ray.phase),
                &a_rx,
                &a_tx,
                Complex64::new(1.0, 0.0),
            );
        }
    }

    ChannelMatrix::new(h)
}
