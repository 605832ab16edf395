//! RIS control and cascade composition, the element scattering pattern, and
//! the radar-equation link budget used as the physical consistency check.
//!
//! The two-hop amplitude convention: each hop is a freespace link with
//! per-element-pair amplitude `λ/(4πR)`, and the RIS element contributes its
//! aperture gain `4πab/λ²` (times the pattern amplitude `√F`) on each hop.
//! Composed, the cascaded power reproduces the radar equation with the
//! rectangular-plate radar cross-section — see `freespace_channel`,
//! [`rcs`] and [`radar_link_budget`].

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::channel::ChannelMatrix;
use crate::error::{Error, Result};
use crate::geometry::{
    pattern_gain, steering_vector, ArraySpec, ElementPattern, LinkGeometry, PatternKind,
};

/// Tolerance on `| |μ_i| − 1 |` for the unit-modulus invariant.
pub const UNIT_MODULUS_TOL: f64 = 1e-12;

/// Unit-modulus phase vector μ defining the RIS control matrix Q = diag(μ).
#[derive(Debug, Clone, PartialEq)]
pub struct RISControl {
    mu: DVector<Complex64>,
}

impl RISControl {
    /// All elements at zero phase (μ = 1).
    pub fn zero_phase(n: usize) -> Self {
        RISControl {
            mu: DVector::from_element(n, Complex64::new(1.0, 0.0)),
        }
    }

    /// Build from per-element phases in radians; unit modulus by construction.
    pub fn from_phases(phases: &[f64]) -> Self {
        RISControl {
            mu: DVector::from_iterator(
                phases.len(),
                phases.iter().map(|p| Complex64::from_polar(1.0, *p)),
            ),
        }
    }

    /// Wrap an existing complex vector, enforcing the unit-modulus invariant.
    pub fn from_complex(mu: DVector<Complex64>) -> Result<Self> {
        for (i, z) in mu.iter().enumerate() {
            let m = z.norm();
            if (m - 1.0).abs() > UNIT_MODULUS_TOL {
                return Err(Error::UnitModulus {
                    index: i,
                    modulus: m,
                });
            }
        }
        Ok(RISControl { mu })
    }

    pub fn len(&self) -> usize {
        self.mu.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mu.is_empty()
    }

    pub fn mu(&self) -> &DVector<Complex64> {
        &self.mu
    }

    pub fn phase(&self, i: usize) -> f64 {
        self.mu[i].arg()
    }

    /// Re-point element `i`; the element stays unit modulus.
    pub fn set_phase(&mut self, i: usize, phase: f64) {
        self.mu[i] = Complex64::from_polar(1.0, phase);
    }
}

/// LoS incidence/reflection angles at the RIS, local frame. Carried as
/// metadata so the LoS-approximation scattering pattern can be applied to a
/// triple after generation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RisLosAngles {
    pub incidence_az: f64,
    pub incidence_zen: f64,
    pub reflection_az: f64,
    pub reflection_zen: f64,
}

/// The three constituent channels of one RIS-assisted link.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelTriple {
    /// Direct BS-UE channel, (N_RX × N_TX).
    pub h0: ChannelMatrix,
    /// BS-RIS channel, (N_RIS × N_TX).
    pub ha: ChannelMatrix,
    /// RIS-UE channel, (N_RX × N_RIS).
    pub hb: ChannelMatrix,
    /// LoS angles at the RIS, when known.
    pub ris_angles: Option<RisLosAngles>,
}

impl ChannelTriple {
    pub fn new(h0: ChannelMatrix, ha: ChannelMatrix, hb: ChannelMatrix) -> Result<Self> {
        if hb.n_rx() != h0.n_rx() || ha.n_tx() != h0.n_tx() || hb.n_tx() != ha.n_rx() {
            return Err(Error::Dimension {
                op: "ChannelTriple::new",
                detail: format!(
                    "h0 {}x{}, ha {}x{}, hb {}x{}",
                    h0.n_rx(),
                    h0.n_tx(),
                    ha.n_rx(),
                    ha.n_tx(),
                    hb.n_rx(),
                    hb.n_tx()
                ),
            });
        }
        Ok(ChannelTriple {
            h0,
            ha,
            hb,
            ris_angles: None,
        })
    }

    pub fn with_ris_angles(mut self, angles: RisLosAngles) -> Self {
        self.ris_angles = Some(angles);
        self
    }

    pub fn n_ris(&self) -> usize {
        self.ha.n_rx()
    }
}

/// Compose the effective channel `H = H0 + HB · diag(μ) · HA`.
///
/// The diagonal is never materialized: HB's columns are scaled by μ before
/// the product.
pub fn compose(t: &ChannelTriple, c: &RISControl) -> Result<ChannelMatrix> {
    if c.len() != t.n_ris() {
        return Err(Error::Dimension {
            op: "compose",
            detail: format!("control length {} vs N_RIS {}", c.len(), t.n_ris()),
        });
    }
    for (i, z) in c.mu().iter().enumerate() {
        let m = z.norm();
        if (m - 1.0).abs() > UNIT_MODULUS_TOL {
            return Err(Error::UnitModulus {
                index: i,
                modulus: m,
            });
        }
    }
    let mut hb_scaled = t.hb.data.clone();
    for (i, mut col) in hb_scaled.column_iter_mut().enumerate() {
        col *= c.mu()[i];
    }
    let h = &t.h0.data + hb_scaled * &t.ha.data;
    ChannelMatrix::new(h)
}

/// Radar cross-section of one rectangular RIS element:
///
/// `σ = 4π (ab/λ)² · F(φ_i, θ_i) · F(φ_r, θ_r)`
///
/// with the scattering pattern factorized into incidence and reflection
/// parts of the element's own pattern.
pub fn rcs(
    p: &ElementPattern,
    wavelength: f64,
    incidence: (f64, f64),
    reflection: (f64, f64),
) -> Result<f64> {
    let dims = p.dims.as_ref().ok_or_else(|| {
        Error::Config("rcs requires element plate dimensions a, b".into())
    })?;
    if !(dims.a > 0.0 && dims.b > 0.0 && wavelength > 0.0) {
        return Err(Error::Config("rcs requires a, b, λ > 0".into()));
    }
    let f_in = pattern_gain(p, incidence.0, incidence.1)?;
    let f_out = pattern_gain(p, reflection.0, reflection.1)?;
    let plate = dims.a * dims.b / wavelength;
    Ok(4.0 * std::f64::consts::PI * plate * plate * f_in * f_out)
}

/// Effective aperture gain of a rectangular element, `4πab/λ²`. This is the
/// per-hop element gain that makes the composed two-hop power match the
/// radar equation.
pub fn aperture_gain(a: f64, b: f64, wavelength: f64) -> f64 {
    4.0 * std::f64::consts::PI * a * b / (wavelength * wavelength)
}

/// Received power of the two-hop link by the radar equation:
///
/// `P_RX = P_TX · G_TX · G_RX · σ · λ² / ((4π)³ · R_TI² · R_IR²)`.
pub fn radar_link_budget(
    p_tx_w: f64,
    g_tx: f64,
    g_rx: f64,
    sigma_m2: f64,
    wavelength: f64,
    r_ti: f64,
    r_ir: f64,
) -> Result<f64> {
    for (name, v) in [
        ("P_TX", p_tx_w),
        ("G_TX", g_tx),
        ("G_RX", g_rx),
        ("λ", wavelength),
        ("R_TI", r_ti),
        ("R_IR", r_ir),
    ] {
        if !(v > 0.0) {
            return Err(Error::Config(format!("radar_link_budget: {name} = {v} must be > 0")));
        }
    }
    if sigma_m2 < 0.0 {
        return Err(Error::Config(format!("radar_link_budget: σ = {sigma_m2} must be >= 0")));
    }
    let four_pi = 4.0 * std::f64::consts::PI;
    Ok(p_tx_w * g_tx * g_rx * sigma_m2 * wavelength * wavelength
        / (four_pi.powi(3) * r_ti * r_ti * r_ir * r_ir))
}

/// Pure freespace one-hop channel: rank-1 steering outer product with
/// per-element-pair amplitude
///
/// `√(G_tx·F_tx(dep)) · √(G_rx·F_rx(arr)) · λ/(4π·d)`.
pub fn freespace_channel(
    tx: &ArraySpec,
    rx: &ArraySpec,
    geo: &LinkGeometry,
    wavelength: f64,
) -> Result<ChannelMatrix> {
    if !(wavelength > 0.0) {
        return Err(Error::Config("wavelength must be positive".into()));
    }
    if !(geo.d3d > 0.0) {
        return Err(Error::Geometry("freespace link needs positive distance".into()));
    }
    let g_tx = tx.element_gain * pattern_gain(&tx.element, geo.dep_az, geo.dep_zen)?;
    let g_rx = rx.element_gain * pattern_gain(&rx.element, geo.arr_az, geo.arr_zen)?;
    let amp = (g_tx * g_rx).sqrt() * wavelength / (4.0 * std::f64::consts::PI * geo.d3d);
    let a_tx = steering_vector(tx, geo.dep_az, geo.dep_zen, wavelength);
    let a_rx = steering_vector(rx, geo.arr_az, geo.arr_zen, wavelength);
    let mut h = DMatrix::<Complex64>::zeros(rx.n_elements(), tx.n_elements());
    h.gerc(
        Complex64::new(amp, 0.0),
        &a_rx,
        &a_tx,
        Complex64::new(0.0, 0.0),
    );
    ChannelMatrix::new(h)
}

/// Fold the RIS element scattering pattern into a triple generated with
/// isotropic RIS elements, using the LoS-angle approximation: HA rows are
/// scaled by `√F` at the incidence angles and HB columns by `√F` at the
/// reflection angles. An isotropic pattern leaves the triple unchanged.
///
/// (When the stochastic generator is given a non-isotropic RIS pattern it
/// weights every ray individually instead; this entry point is for triples
/// whose ray-level angles are no longer available.)
pub fn apply_scattering_pattern(t: &ChannelTriple, ris: &ArraySpec) -> Result<ChannelTriple> {
    if matches!(ris.element.kind, PatternKind::Isotropic) {
        return Ok(t.clone());
    }
    let angles = t.ris_angles.ok_or(Error::MissingRisAngles)?;
    let f_in = pattern_gain(&ris.element, angles.incidence_az, angles.incidence_zen)?;
    let f_out = pattern_gain(&ris.element, angles.reflection_az, angles.reflection_zen)?;
    let sa = f_in.sqrt();
    let sb = f_out.sqrt();

    let mut ha = t.ha.data.clone();
    for mut row in ha.row_iter_mut() {
        row *= Complex64::new(sa, 0.0);
    }
    let mut hb = t.hb.data.clone();
    for mut col in hb.column_iter_mut() {
        col *= Complex64::new(sb, 0.0);
    }
    let mut out = ChannelTriple::new(
        t.h0.clone(),
        ChannelMatrix::new(ha)?,
        ChannelMatrix::new(hb)?,
    )?;
    out.ris_angles = t.ris_angles;
    Ok(out)
}
