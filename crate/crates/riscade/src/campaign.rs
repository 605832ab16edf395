//! Monte-Carlo experiment harness: builds a scenario from a JSON config,
//! runs drops (in parallel, deterministically), aggregates eigenvalue and
//! rate CDFs and writes CSV/JSON outputs.
//!
//! Reproducibility contract: a drop's result is a pure function of
//! (config, master seed, drop index) — see [`crate::rng`] — and aggregation
//! runs in drop-index order, so outputs are byte-identical for any worker
//! count.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cascade::{ChannelTriple, RISControl, RisLosAngles};
use crate::channel::{ChannelMatrix, ChannelMeta, LinkId, ModelId};
use crate::db::dbm_to_watts;
use crate::error::{Error, Result};
use crate::gbsm::{
    assemble_channel, draw_large_scale, generate_clusters, pathloss, Scenario, ScenarioParams,
    ScenarioTable,
};
use crate::geometry::{
    link_geometry, ArraySpec, ElementPattern, LinkGeometry, Orientation, Vec3,
};
use crate::precoding::{optimize_bs, optimize_ris, LinkBudget, RisOptOptions};
use crate::rician::{eigenvalues_db, rician_channel, RicianParams};
use crate::rng::{drop_stream_rng, STREAM_H0, STREAM_HA, STREAM_HB};

fn default_spacing() -> f64 {
    0.5
}

fn default_element_gain() -> f64 {
    1.0
}

fn default_element() -> ElementPattern {
    ElementPattern::isotropic()
}

/// One site of the triangle: position, array layout and element description.
/// Positions are meters in the global frame; spacing is in wavelengths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiteConfig {
    pub position: [f64; 3],
    pub rows: usize,
    pub cols: usize,
    #[serde(default = "default_spacing")]
    pub spacing_wavelengths: f64,
    /// Optional explicit boresight direction (global frame). When omitted the
    /// BS and UE face each other and the RIS faces the BS/UE bisector.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boresight: Option<[f64; 3]>,
    /// Optional up vector, global z when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub up: Option<[f64; 3]>,
    #[serde(default = "default_element")]
    pub element: ElementPattern,
    #[serde(default = "default_element_gain")]
    pub element_gain: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SitesConfig {
    pub bs: SiteConfig,
    pub ris: SiteConfig,
    pub ue: SiteConfig,
}

/// Channel model selection for one link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LinkModelConfig {
    /// Cluster-based stochastic model.
    Gbsm { scenario: Scenario },
    /// Rician split with fixed K; the mean pathloss comes from the given
    /// urban-macro expression.
    Rician { k_db: f64, pathloss: Scenario },
    /// Link disabled (zero matrix).
    Off,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinksConfig {
    pub h0: LinkModelConfig,
    pub ha: LinkModelConfig,
    pub hb: LinkModelConfig,
}

/// Large-scale fading ablations (suppressed standard deviations).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AblationConfig {
    #[serde(default)]
    pub suppress_shadow_fading: bool,
    #[serde(default)]
    pub suppress_k_variance: bool,
}

/// RIS optimizer knobs, mirroring [`RisOptOptions`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RisOptimizerConfig {
    pub phase_grid: usize,
    pub max_outer_iters: usize,
    pub rel_tolerance: f64,
}

impl Default for RisOptimizerConfig {
    fn default() -> Self {
        let d = RisOptOptions::default();
        RisOptimizerConfig {
            phase_grid: d.phase_grid,
            max_outer_iters: d.max_outer_iters,
            rel_tolerance: d.rel_tolerance,
        }
    }
}

impl From<RisOptimizerConfig> for RisOptOptions {
    fn from(c: RisOptimizerConfig) -> Self {
        RisOptOptions {
            phase_grid: c.phase_grid,
            max_outer_iters: c.max_outer_iters,
            rel_tolerance: c.rel_tolerance,
        }
    }
}

/// Full campaign configuration. Units: Hz, dBm, dBm/Hz, dB, meters.
/// Unknown keys are rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Short id used in output file names.
    pub label: String,
    pub sites: SitesConfig,
    pub carrier_hz: f64,
    pub bandwidth_hz: f64,
    pub subcarrier_spacing_hz: f64,
    /// Total BS transmit power over the whole band, dBm.
    pub bs_power_dbm: f64,
    /// Noise power spectral density, dBm/Hz.
    pub noise_psd_dbm_hz: f64,
    /// Receiver noise figure, dB.
    pub noise_figure_db: f64,
    pub links: LinksConfig,
    #[serde(default)]
    pub ablation: AblationConfig,
    pub drops: u64,
    pub seed: u64,
    /// Worker threads; 0 picks the machine default.
    #[serde(default)]
    pub workers: usize,
    #[serde(default)]
    pub ris_optimizer: RisOptimizerConfig,
    /// Optional path to an alternative scenario parameter table.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scenario_table: Option<PathBuf>,
    /// Optional default output directory (the CLI flag overrides it).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let cfg: RunConfig = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.drops < 1 {
            return Err(Error::Config("drop count must be >= 1".into()));
        }
        if !(self.carrier_hz > 0.0) {
            return Err(Error::Config("carrier frequency must be positive".into()));
        }
        if !(self.subcarrier_spacing_hz > 0.0) || !(self.bandwidth_hz > 0.0) {
            return Err(Error::Config("bandwidth and spacing must be positive".into()));
        }
        if self.bandwidth_hz < self.subcarrier_spacing_hz {
            return Err(Error::Config(
                "bandwidth must cover at least one subcarrier".into(),
            ));
        }
        if self.label.is_empty()
            || !self
                .label
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_')
        {
            return Err(Error::Config(
                "label must be non-empty [A-Za-z0-9_-] (used in file names)".into(),
            ));
        }
        for (name, site) in [
            ("bs", &self.sites.bs),
            ("ris", &self.sites.ris),
            ("ue", &self.sites.ue),
        ] {
            if site.rows == 0 || site.cols == 0 {
                return Err(Error::Config(format!("site {name}: empty array")));
            }
            if !(site.spacing_wavelengths > 0.0) {
                return Err(Error::Config(format!("site {name}: spacing must be > 0")));
            }
            if !site.position.iter().all(|v| v.is_finite()) {
                return Err(Error::Config(format!("site {name}: non-finite position")));
            }
            site.element.validate()?;
        }
        RisOptOptions::from(self.ris_optimizer).validate()?;
        Ok(())
    }

    pub fn wavelength_m(&self) -> f64 {
        299_792_458.0 / self.carrier_hz
    }
}

/// Derived per-subcarrier link budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinkBudgetReport {
    pub n_subcarriers: u64,
    pub per_subcarrier_power_dbm: f64,
    pub noise_power_dbm: f64,
    pub per_subcarrier_power_w: f64,
    pub noise_power_w: f64,
}

/// Split the BS power evenly over `floor(bandwidth / spacing)` subcarriers
/// and integrate the noise PSD (plus noise figure) over one subcarrier.
pub fn derive_link_budget(cfg: &RunConfig) -> Result<LinkBudget> {
    Ok(link_budget_report(cfg)?.into())
}

impl From<LinkBudgetReport> for LinkBudget {
    fn from(r: LinkBudgetReport) -> Self {
        LinkBudget {
            tx_power_w: r.per_subcarrier_power_w,
            noise_w: r.noise_power_w,
        }
    }
}

pub fn link_budget_report(cfg: &RunConfig) -> Result<LinkBudgetReport> {
    let n_sc = (cfg.bandwidth_hz / cfg.subcarrier_spacing_hz).floor() as u64;
    if n_sc == 0 {
        return Err(Error::Config(
            "no whole subcarrier fits in the bandwidth".into(),
        ));
    }
    let per_sc_dbm = cfg.bs_power_dbm - 10.0 * (n_sc as f64).log10();
    let noise_dbm =
        cfg.noise_psd_dbm_hz + 10.0 * cfg.subcarrier_spacing_hz.log10() + cfg.noise_figure_db;
    Ok(LinkBudgetReport {
        n_subcarriers: n_sc,
        per_subcarrier_power_dbm: per_sc_dbm,
        noise_power_dbm: noise_dbm,
        per_subcarrier_power_w: dbm_to_watts(per_sc_dbm),
        noise_power_w: dbm_to_watts(noise_dbm),
    })
}

/// Per-drop metrics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DropResult {
    pub drop_index: u64,
    /// Eigenvalues of HᴴH per link, dB, descending.
    pub eig_h0_db: Vec<f64>,
    pub eig_ha_db: Vec<f64>,
    pub eig_hb_db: Vec<f64>,
    pub rate_without_ris: f64,
    pub rate_with_ris: f64,
    pub optimizer_iterations: usize,
}

/// Empirical CDF of one scalar metric.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CdfSeries {
    pub name: String,
    /// Sorted sample values.
    pub values: Vec<f64>,
    /// P(X <= value) = k/N for the k-th sorted sample.
    pub probabilities: Vec<f64>,
}

impl CdfSeries {
    pub fn from_samples(name: &str, mut samples: Vec<f64>) -> Self {
        samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let n = samples.len() as f64;
        let probabilities = (1..=samples.len()).map(|k| k as f64 / n).collect();
        CdfSeries {
            name: name.to_string(),
            values: samples,
            probabilities,
        }
    }

    /// Nearest-rank percentile (q in [0, 1]).
    pub fn percentile(&self, q: f64) -> f64 {
        let n = self.values.len();
        let idx = ((q * n as f64).ceil() as usize).clamp(1, n) - 1;
        self.values[idx]
    }

    /// 90th minus 10th percentile.
    pub fn interdecile(&self) -> f64 {
        self.percentile(0.9) - self.percentile(0.1)
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}

/// Aggregate statistics for one eigenvalue series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigStats {
    pub dominant_mean_db: f64,
    pub dominant_interdecile_db: f64,
    pub dominant_p10_db: f64,
    pub dominant_p50_db: f64,
    pub dominant_p90_db: f64,
    /// Mean gap between the first and second eigenvalue, dB (0 for
    /// single-mode links).
    pub mean_first_second_gap_db: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateStats {
    pub mean: f64,
    pub p10: f64,
    pub p50: f64,
    pub p90: f64,
}

/// Campaign summary written to `summary.json`.
#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub software_version: String,
    pub seed: u64,
    pub drops: u64,
    pub link_budget: LinkBudgetReport,
    pub rate_without_ris: RateStats,
    pub rate_with_ris: RateStats,
    /// Mean(with)/mean(without) rate ratio.
    pub mean_rate_gain: f64,
    pub eigenvalues: BTreeMap<String, EigStats>,
    pub config: RunConfig,
}

/// Everything a campaign produces before it is written to disk.
#[derive(Debug, Clone)]
pub struct CampaignOutput {
    pub series: Vec<CdfSeries>,
    pub summary: Summary,
    pub drop_results: Vec<DropResult>,
}

/// Resolved, validated context shared by all drops.
pub struct CampaignContext {
    cfg: RunConfig,
    budget: LinkBudget,
    wavelength: f64,
    bs: ArraySpec,
    ris: ArraySpec,
    ue: ArraySpec,
    bs_pos: Vec3,
    ris_pos: Vec3,
    ue_pos: Vec3,
    geo_h0: LinkGeometry,
    geo_ha: LinkGeometry,
    geo_hb: LinkGeometry,
    model_h0: ResolvedModel,
    model_ha: ResolvedModel,
    model_hb: ResolvedModel,
    opts: RisOptOptions,
}

/// Link model with scenario parameters and constants resolved up front.
enum ResolvedModel {
    Gbsm {
        params: ScenarioParams,
        model_id: ModelId,
    },
    Rician {
        params: RicianParams,
    },
    Off,
}

impl ResolvedModel {
    fn model_id(&self) -> ModelId {
        match self {
            ResolvedModel::Gbsm { model_id, .. } => *model_id,
            ResolvedModel::Rician { .. } => ModelId::Rician,
            ResolvedModel::Off => ModelId::Off,
        }
    }
}

fn site_to_array(site: &SiteConfig, default_boresight: Vec3) -> Result<ArraySpec> {
    let boresight = match site.boresight {
        Some(b) => Vec3::new(b[0], b[1], b[2]),
        None => default_boresight,
    };
    let up = match site.up {
        Some(u) => Vec3::new(u[0], u[1], u[2]),
        None => {
            if boresight.cross(&Vec3::new(0.0, 0.0, 1.0)).norm() < 1e-9 {
                Vec3::new(1.0, 0.0, 0.0)
            } else {
                Vec3::new(0.0, 0.0, 1.0)
            }
        }
    };
    let orientation = Orientation::new(boresight, up)?;
    ArraySpec::new(site.rows, site.cols, site.spacing_wavelengths, orientation)?
        .with_pattern(site.element.clone())?
        .with_element_gain(site.element_gain)
}

impl CampaignContext {
    pub fn build(cfg: &RunConfig) -> Result<Self> {
        cfg.validate()?;
        let budget = derive_link_budget(cfg)?;
        let wavelength = cfg.wavelength_m();

        let bs_pos = Vec3::new(
            cfg.sites.bs.position[0],
            cfg.sites.bs.position[1],
            cfg.sites.bs.position[2],
        );
        let ris_pos = Vec3::new(
            cfg.sites.ris.position[0],
            cfg.sites.ris.position[1],
            cfg.sites.ris.position[2],
        );
        let ue_pos = Vec3::new(
            cfg.sites.ue.position[0],
            cfg.sites.ue.position[1],
            cfg.sites.ue.position[2],
        );

        // default orientations: BS and UE face each other, the RIS faces the
        // bisector of its directions to the BS and the UE
        let to_bs = bs_pos.sub(&ris_pos).normalized()?;
        let to_ue = ue_pos.sub(&ris_pos).normalized()?;
        let bisector = to_bs.add(&to_ue);
        let ris_boresight = if bisector.norm() < 1e-9 { to_bs } else { bisector };

        let bs = site_to_array(&cfg.sites.bs, ue_pos.sub(&bs_pos))?;
        let ris = site_to_array(&cfg.sites.ris, ris_boresight)?;
        let ue = site_to_array(&cfg.sites.ue, bs_pos.sub(&ue_pos))?;

        let geo_h0 = link_geometry(bs_pos, &bs.orientation, ue_pos, &ue.orientation)?;
        let geo_ha = link_geometry(bs_pos, &bs.orientation, ris_pos, &ris.orientation)?;
        let geo_hb = link_geometry(ris_pos, &ris.orientation, ue_pos, &ue.orientation)?;

        let table = match &cfg.scenario_table {
            Some(path) => ScenarioTable::from_path(path)?,
            None => ScenarioTable::builtin(),
        };

        let resolve = |link: &LinkModelConfig, geo: &LinkGeometry, h_tx: f64, h_rx: f64| -> Result<ResolvedModel> {
            match link {
                LinkModelConfig::Gbsm { scenario } => {
                    let params = table
                        .params(*scenario, cfg.carrier_hz)?
                        .with_ablations(
                            cfg.ablation.suppress_shadow_fading,
                            cfg.ablation.suppress_k_variance,
                        );
                    let model_id = match scenario {
                        Scenario::UmaLos => ModelId::GbsmUmaLos,
                        Scenario::UmaNlos => ModelId::GbsmUmaNlos,
                    };
                    Ok(ResolvedModel::Gbsm { params, model_id })
                }
                LinkModelConfig::Rician { k_db, pathloss: pl } => {
                    let sc = table.params(*pl, cfg.carrier_hz)?;
                    let beta = pathloss(&sc, geo, h_tx, h_rx)?;
                    Ok(ResolvedModel::Rician {
                        params: RicianParams {
                            k_db: *k_db,
                            pathloss_db: beta,
                            wavelength_m: wavelength,
                        },
                    })
                }
                LinkModelConfig::Off => Ok(ResolvedModel::Off),
            }
        };

        let model_h0 = resolve(&cfg.links.h0, &geo_h0, bs_pos.z, ue_pos.z)?;
        let model_ha = resolve(&cfg.links.ha, &geo_ha, bs_pos.z, ris_pos.z)?;
        let model_hb = resolve(&cfg.links.hb, &geo_hb, ris_pos.z, ue_pos.z)?;

        Ok(CampaignContext {
            cfg: cfg.clone(),
            budget,
            wavelength,
            bs,
            ris,
            ue,
            bs_pos,
            ris_pos,
            ue_pos,
            geo_h0,
            geo_ha,
            geo_hb,
            model_h0,
            model_ha,
            model_hb,
            opts: RisOptOptions::from(cfg.ris_optimizer),
        })
    }

    pub fn budget(&self) -> &LinkBudget {
        &self.budget
    }

    #[allow(clippy::too_many_arguments)]
    fn generate(
        &self,
        model: &ResolvedModel,
        link: LinkId,
        tx: &ArraySpec,
        rx: &ArraySpec,
        geo: &LinkGeometry,
        h_tx: f64,
        h_rx: f64,
        drop: u64,
        stream: u64,
    ) -> Result<ChannelMatrix> {
        let mut rng = drop_stream_rng(self.cfg.seed, drop, stream);
        let meta = ChannelMeta {
            link,
            model: model.model_id(),
            drop_index: drop,
        };
        let h = match model {
            ResolvedModel::Gbsm { params, .. } => {
                let lss = draw_large_scale(params, geo, h_tx, h_rx, &mut rng)?;
                let clusters = generate_clusters(&lss, geo, params, &mut rng);
                assemble_channel(&clusters, &lss, tx, rx, self.wavelength, geo)?
            }
            ResolvedModel::Rician { params } => rician_channel(params, geo, tx, rx, &mut rng)?,
            ResolvedModel::Off => ChannelMatrix::zeros(rx.n_elements(), tx.n_elements()),
        };
        Ok(h.with_meta(meta))
    }

    /// Run one Monte-Carlo drop.
    pub fn run_drop(&self, drop: u64) -> Result<DropResult> {
        if drop >= self.cfg.drops {
            return Err(Error::Config(format!(
                "drop {drop} out of range (count {})",
                self.cfg.drops
            )));
        }
        let h0 = self.generate(
            &self.model_h0,
            LinkId::H0,
            &self.bs,
            &self.ue,
            &self.geo_h0,
            self.bs_pos.z,
            self.ue_pos.z,
            drop,
            STREAM_H0,
        )?;
        let ha = self.generate(
            &self.model_ha,
            LinkId::Ha,
            &self.bs,
            &self.ris,
            &self.geo_ha,
            self.bs_pos.z,
            self.ris_pos.z,
            drop,
            STREAM_HA,
        )?;
        let hb = self.generate(
            &self.model_hb,
            LinkId::Hb,
            &self.ris,
            &self.ue,
            &self.geo_hb,
            self.ris_pos.z,
            self.ue_pos.z,
            drop,
            STREAM_HB,
        )?;

        let eig_h0_db = eigenvalues_db(&h0)?;
        let eig_ha_db = eigenvalues_db(&ha)?;
        let eig_hb_db = eigenvalues_db(&hb)?;

        let without = optimize_bs(&h0, &self.budget)?;

        let triple = ChannelTriple::new(h0, ha, hb)?.with_ris_angles(RisLosAngles {
            incidence_az: self.geo_ha.arr_az,
            incidence_zen: self.geo_ha.arr_zen,
            reflection_az: self.geo_hb.dep_az,
            reflection_zen: self.geo_hb.dep_zen,
        });
        let init = RISControl::zero_phase(triple.n_ris());
        let (_, with) = optimize_ris(&triple, &self.budget, &init, &self.opts)?;
        let iterations = with.rate_trace.len().saturating_sub(1) / 2;

        Ok(DropResult {
            drop_index: drop,
            eig_h0_db,
            eig_ha_db,
            eig_hb_db,
            rate_without_ris: without.rate_bps_hz,
            rate_with_ris: with.rate_bps_hz,
            optimizer_iterations: iterations,
        })
    }
}

fn rate_stats(series: &CdfSeries) -> RateStats {
    RateStats {
        mean: series.mean(),
        p10: series.percentile(0.1),
        p50: series.percentile(0.5),
        p90: series.percentile(0.9),
    }
}

fn eig_stats(dominant: &CdfSeries, gaps: &[f64]) -> EigStats {
    EigStats {
        dominant_mean_db: dominant.mean(),
        dominant_interdecile_db: dominant.interdecile(),
        dominant_p10_db: dominant.percentile(0.1),
        dominant_p50_db: dominant.percentile(0.5),
        dominant_p90_db: dominant.percentile(0.9),
        mean_first_second_gap_db: if gaps.is_empty() {
            0.0
        } else {
            gaps.iter().sum::<f64>() / gaps.len() as f64
        },
    }
}

/// Execute all drops and aggregate CDFs and summary statistics. The result
/// does not depend on the worker count or execution order.
pub fn run_campaign(cfg: &RunConfig) -> Result<CampaignOutput> {
    let ctx = CampaignContext::build(cfg)?;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot build worker pool: {e}")))?;

    let drops: Vec<DropResult> = pool.install(|| {
        (0..cfg.drops)
            .into_par_iter()
            .map(|d| {
                ctx.run_drop(d).map_err(|e| Error::Drop {
                    index: d,
                    source: Box::new(e),
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    assert_eq!(drops.len() as u64, cfg.drops, "dropped drops");

    let dominant = |f: fn(&DropResult) -> &Vec<f64>| -> Vec<f64> {
        drops.iter().map(|d| f(d)[0]).collect()
    };
    let gaps = |f: fn(&DropResult) -> &Vec<f64>| -> Vec<f64> {
        drops
            .iter()
            .filter(|d| f(d).len() >= 2)
            .map(|d| {
                let e = f(d);
                e[0] - e[1]
            })
            .collect()
    };

    let link_models = [
        ("h0", ctx.model_h0.model_id()),
        ("ha", ctx.model_ha.model_id()),
        ("hb", ctx.model_hb.model_id()),
    ];
    let eig_series = [
        CdfSeries::from_samples(
            &format!("eig_h0_{}", link_models[0].1.as_str()),
            dominant(|d| &d.eig_h0_db),
        ),
        CdfSeries::from_samples(
            &format!("eig_ha_{}", link_models[1].1.as_str()),
            dominant(|d| &d.eig_ha_db),
        ),
        CdfSeries::from_samples(
            &format!("eig_hb_{}", link_models[2].1.as_str()),
            dominant(|d| &d.eig_hb_db),
        ),
    ];
    let rate_without = CdfSeries::from_samples(
        &format!("rate_without_ris_{}", cfg.label),
        drops.iter().map(|d| d.rate_without_ris).collect(),
    );
    let rate_with = CdfSeries::from_samples(
        &format!("rate_with_ris_{}", cfg.label),
        drops.iter().map(|d| d.rate_with_ris).collect(),
    );

    let mut eigenvalues = BTreeMap::new();
    eigenvalues.insert(
        eig_series[0].name.clone(),
        eig_stats(&eig_series[0], &gaps(|d| &d.eig_h0_db)),
    );
    eigenvalues.insert(
        eig_series[1].name.clone(),
        eig_stats(&eig_series[1], &gaps(|d| &d.eig_ha_db)),
    );
    eigenvalues.insert(
        eig_series[2].name.clone(),
        eig_stats(&eig_series[2], &gaps(|d| &d.eig_hb_db)),
    );

    let without_stats = rate_stats(&rate_without);
    let with_stats = rate_stats(&rate_with);
    let summary = Summary {
        software_version: env!("CARGO_PKG_VERSION").to_string(),
        seed: cfg.seed,
        drops: cfg.drops,
        link_budget: link_budget_report(cfg)?,
        rate_without_ris: without_stats,
        rate_with_ris: with_stats,
        mean_rate_gain: if without_stats.mean > 0.0 {
            with_stats.mean / without_stats.mean
        } else {
            f64::INFINITY
        },
        eigenvalues,
        config: cfg.clone(),
    };

    let mut series = Vec::with_capacity(5);
    series.extend(eig_series);
    series.push(rate_without);
    series.push(rate_with);

    Ok(CampaignOutput {
        series,
        summary,
        drop_results: drops,
    })
}

/// Nine significant digits, locale-independent.
fn fmt9(v: f64) -> String {
    format!("{v:.8e}")
}

fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    let io_err = |source: std::io::Error| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    {
        let mut f = std::fs::File::create(&tmp).map_err(io_err)?;
        f.write_all(contents.as_bytes()).map_err(io_err)?;
        f.sync_all().map_err(io_err)?;
    }
    std::fs::rename(&tmp, path).map_err(io_err)
}

/// Write one CSV per series (`<name>.csv`, columns `value,cdf`) plus
/// `summary.json`. Files are written atomically (temp + rename) so partial
/// results never appear under the final names.
pub fn emit_outputs(out: &CampaignOutput, dir: &Path) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    for s in &out.series {
        let mut csv = String::with_capacity(32 * s.values.len() + 16);
        csv.push_str("value,cdf\n");
        for (v, p) in s.values.iter().zip(&s.probabilities) {
            csv.push_str(&fmt9(*v));
            csv.push(',');
            csv.push_str(&fmt9(*p));
            csv.push('\n');
        }
        let path = dir.join(format!("{}.csv", s.name));
        write_atomic(&path, &csv)?;
        written.push(path);
    }
    let json = serde_json::to_string_pretty(&out.summary)?;
    let path = dir.join("summary.json");
    write_atomic(&path, &json)?;
    written.push(path);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Single-cell urban-macro downlink used across the test suite: 4×4 BS at
    /// (0,0,25), 45×45 RIS at (200,50,25), 4-element UE line array at
    /// (250,0,1.5); 1.4 MHz band, 15 kHz spacing, 30 dBm, −174 dBm/Hz, NF 9 dB.
    fn urban_macro_config() -> RunConfig {
        RunConfig {
            label: "rician".into(),
            sites: SitesConfig {
                bs: SiteConfig {
                    position: [0.0, 0.0, 25.0],
                    rows: 4,
                    cols: 4,
                    spacing_wavelengths: 0.5,
                    boresight: None,
                    up: None,
                    element: ElementPattern::isotropic(),
                    element_gain: 1.0,
                },
                ris: SiteConfig {
                    position: [200.0, 50.0, 25.0],
                    rows: 45,
                    cols: 45,
                    spacing_wavelengths: 0.5,
                    boresight: None,
                    up: None,
                    element: ElementPattern::isotropic(),
                    element_gain: 1.0,
                },
                ue: SiteConfig {
                    position: [250.0, 0.0, 1.5],
                    rows: 1,
                    cols: 4,
                    spacing_wavelengths: 0.5,
                    boresight: None,
                    up: None,
                    element: ElementPattern::isotropic(),
                    element_gain: 1.0,
                },
            },
            carrier_hz: 2.0e9,
            bandwidth_hz: 1.4e6,
            subcarrier_spacing_hz: 15_000.0,
            bs_power_dbm: 30.0,
            noise_psd_dbm_hz: -174.0,
            noise_figure_db: 9.0,
            links: LinksConfig {
                h0: LinkModelConfig::Rician {
                    k_db: -100.0,
                    pathloss: Scenario::UmaNlos,
                },
                ha: LinkModelConfig::Rician {
                    k_db: 9.0,
                    pathloss: Scenario::UmaLos,
                },
                hb: LinkModelConfig::Rician {
                    k_db: 9.0,
                    pathloss: Scenario::UmaLos,
                },
            },
            ablation: AblationConfig::default(),
            drops: 4,
            seed: 1,
            workers: 0,
            ris_optimizer: RisOptimizerConfig::default(),
            scenario_table: None,
            output_dir: None,
        }
    }

    fn small_config() -> RunConfig {
        let mut cfg = urban_macro_config();
        cfg.sites.ris.rows = 4;
        cfg.sites.ris.cols = 4;
        cfg.ris_optimizer.phase_grid = 8;
        cfg.drops = 6;
        cfg
    }

    #[test]
    fn link_budget_reproduces_reference_numbers() {
        let cfg = urban_macro_config();
        let report = link_budget_report(&cfg).unwrap();
        assert_eq!(report.n_subcarriers, 93);
        // 30 − 10·log10(93) = 10.315
        assert!((report.per_subcarrier_power_dbm - 10.315).abs() < 0.01);
        // −174 + 10·log10(15000) + 9 = −123.239
        assert!((report.noise_power_dbm + 123.24).abs() < 0.01);
    }

    #[test]
    fn noise_scales_with_subcarrier_spacing() {
        let cfg = urban_macro_config();
        let mut cfg2 = cfg.clone();
        cfg2.subcarrier_spacing_hz *= 2.0;
        let a = link_budget_report(&cfg).unwrap();
        let b = link_budget_report(&cfg2).unwrap();
        assert!((b.noise_power_dbm - a.noise_power_dbm - 10.0 * 2f64.log10()).abs() < 1e-9);
    }

    #[test]
    fn config_roundtrip_and_unknown_keys_rejected() {
        let cfg = urban_macro_config();
        let json = serde_json::to_string_pretty(&cfg).unwrap();
        let back: RunConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(cfg, back);

        let mut v: serde_json::Value = serde_json::from_str(&json).unwrap();
        v.as_object_mut()
            .unwrap()
            .insert("unexpected".into(), serde_json::json!(1));
        let err = serde_json::from_value::<RunConfig>(v);
        assert!(err.is_err());
    }

    #[test]
    fn validation_rejects_bad_configs() {
        let mut cfg = urban_macro_config();
        cfg.drops = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = urban_macro_config();
        cfg.bandwidth_hz = 1000.0;
        assert!(cfg.validate().is_err());
        let mut cfg = urban_macro_config();
        cfg.label = "bad label!".into();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn cdf_series_construction() {
        let s = CdfSeries::from_samples("x", vec![3.0, 1.0, 2.0]);
        assert_eq!(s.values, vec![1.0, 2.0, 3.0]);
        assert_eq!(s.probabilities, vec![1.0 / 3.0, 2.0 / 3.0, 1.0]);
        // single sample: a one-step CDF
        let one = CdfSeries::from_samples("y", vec![5.0]);
        assert_eq!(one.values, vec![5.0]);
        assert_eq!(one.probabilities, vec![1.0]);
        // idempotent under re-aggregation
        let again = CdfSeries::from_samples("x", s.values.clone());
        assert_eq!(again.values, s.values);
        assert_eq!(again.probabilities, s.probabilities);
    }

    #[test]
    fn los_only_cascade_leaves_h0_as_only_stochastic_part() {
        // K so large that the NLoS draw falls below one ulp of the LoS part:
        // only H0 keeps a stochastic component.
        let mut cfg = small_config();
        cfg.links.ha = LinkModelConfig::Rician {
            k_db: 400.0,
            pathloss: Scenario::UmaLos,
        };
        cfg.links.hb = LinkModelConfig::Rician {
            k_db: 400.0,
            pathloss: Scenario::UmaLos,
        };
        let out = run_campaign(&cfg).unwrap();
        let first = &out.drop_results[0];
        for d in &out.drop_results[1..] {
            assert_eq!(d.eig_ha_db, first.eig_ha_db);
            assert_eq!(d.eig_hb_db, first.eig_hb_db);
            assert_ne!(d.eig_h0_db, first.eig_h0_db);
        }
    }

    #[test]
    fn disconnected_ris_gives_no_gain() {
        let mut cfg = small_config();
        cfg.links.ha = LinkModelConfig::Off;
        cfg.drops = 3;
        let out = run_campaign(&cfg).unwrap();
        for d in &out.drop_results {
            assert!((d.rate_with_ris - d.rate_without_ris).abs() < 1e-9);
        }
    }

    #[test]
    fn rate_with_ris_never_below_direct_rate() {
        let cfg = small_config();
        let out = run_campaign(&cfg).unwrap();
        assert_eq!(out.drop_results.len(), cfg.drops as usize);
        for d in &out.drop_results {
            assert!(d.rate_with_ris >= d.rate_without_ris - 1e-9);
        }
    }

    #[test]
    fn identical_seeds_give_identical_drops() {
        let cfg = small_config();
        let a = run_campaign(&cfg).unwrap();
        let b = run_campaign(&cfg).unwrap();
        let ja = serde_json::to_string(&a.drop_results).unwrap();
        let jb = serde_json::to_string(&b.drop_results).unwrap();
        assert_eq!(ja, jb);
    }

    #[test]
    fn emit_writes_expected_files() {
        let cfg = small_config();
        let out = run_campaign(&cfg).unwrap();
        let dir = std::env::temp_dir().join(format!("riscade_test_{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&dir);
        let files = emit_outputs(&out, &dir).unwrap();
        assert_eq!(files.len(), 6);
        let names: Vec<String> = files
            .iter()
            .map(|p| p.file_name().unwrap().to_string_lossy().to_string())
            .collect();
        assert!(names.contains(&"eig_h0_rician.csv".to_string()));
        assert!(names.contains(&"eig_ha_rician.csv".to_string()));
        assert!(names.contains(&"eig_hb_rician.csv".to_string()));
        assert!(names.contains(&"rate_without_ris_rician.csv".to_string()));
        assert!(names.contains(&"rate_with_ris_rician.csv".to_string()));
        assert!(names.contains(&"summary.json".to_string()));
        let csv = std::fs::read_to_string(&files[0]).unwrap();
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("value,cdf"));
        assert_eq!(csv.lines().count(), 1 + cfg.drops as usize);
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn emit_with_no_series_writes_summary_only() {
        let mut cfg = small_config();
        cfg.drops = 2;
        let mut out = run_campaign(&cfg).unwrap();
        out.series.clear();
        let dir = std::env::temp_dir().join(format!("riscade_empty_{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&dir);
        let files = emit_outputs(&out, &dir).unwrap();
        assert_eq!(files.len(), 1);
        assert!(files[0].ends_with("summary.json"));
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
