//! Coordinates, array layouts, local frames, steering vectors and element
//! patterns shared by every channel model.
//!
//! Conventions used throughout the crate:
//!
//! * Global frame: right-handed, meters, z up.
//! * Each array has a local frame built from its boresight `x̂` and up `ẑ`
//!   vectors (`ŷ = ẑ × x̂`). The radiating plane is the local y–z plane.
//! * Local direction angles: azimuth `φ ∈ [−π, π)` measured from boresight in
//!   the x–y plane, zenith `θ ∈ [0, π]` measured from the local up axis, so
//!   `(φ, θ) = (0, π/2)` is broadside. For arrays whose up vector is global z,
//!   `θ` coincides with the global zenith angle.
//! * Element layout is row-major: a row of elements runs along local y, the
//!   row index advances down local z, pitch `spacing · λ`, grid centered on
//!   the origin.
//! * Steering phases use a positive exponent, `exp(+j·2π/λ·⟨p, u⟩)`, for both
//!   departure and arrival directions.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Position or direction in the global frame, meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub const fn zero() -> Self {
        Vec3::new(0.0, 0.0, 0.0)
    }

    pub fn dot(&self, o: &Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(&self, o: &Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn sub(&self, o: &Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }

    pub fn add(&self, o: &Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }

    pub fn scale(&self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn normalized(&self) -> Result<Vec3> {
        let n = self.norm();
        if n < 1e-12 || !n.is_finite() {
            return Err(Error::Geometry(format!(
                "cannot normalize near-zero vector ({}, {}, {})",
                self.x, self.y, self.z
            )));
        }
        Ok(self.scale(1.0 / n))
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

/// Orientation of an array: orthonormal boresight/up pair, with the derived
/// rotation into the local frame precomputed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Orientation {
    boresight: Vec3,
    up: Vec3,
    right: Vec3,
}

impl Orientation {
    /// Build an orientation from a boresight direction and a rough up vector.
    /// The up vector is re-orthogonalized against the boresight.
    pub fn new(boresight: Vec3, up: Vec3) -> Result<Self> {
        let b = boresight.normalized()?;
        let raw = up.sub(&b.scale(up.dot(&b)));
        let u = raw.normalized().map_err(|_| {
            Error::Geometry("up vector is parallel to the boresight".to_string())
        })?;
        let r = u.cross(&b); // ŷ = ẑ × x̂, right-handed
        Ok(Orientation {
            boresight: b,
            up: u,
            right: r,
        })
    }

    /// Orientation whose boresight points from `pos` toward `target`, with
    /// global z as the up reference (falls back to global x when the
    /// boresight is vertical).
    pub fn facing(pos: Vec3, target: Vec3) -> Result<Self> {
        let b = target.sub(&pos).normalized()?;
        let up = if b.cross(&Vec3::new(0.0, 0.0, 1.0)).norm() < 1e-9 {
            Vec3::new(1.0, 0.0, 0.0)
        } else {
            Vec3::new(0.0, 0.0, 1.0)
        };
        Orientation::new(b, up)
    }

    pub fn boresight(&self) -> Vec3 {
        self.boresight
    }

    pub fn up(&self) -> Vec3 {
        self.up
    }

    /// Express a global direction in local (x̂ = boresight, ŷ, ẑ = up) axes.
    pub fn to_local(&self, g: &Vec3) -> Vec3 {
        Vec3::new(g.dot(&self.boresight), g.dot(&self.right), g.dot(&self.up))
    }

    /// Express a local vector in global coordinates.
    pub fn to_global(&self, l: &Vec3) -> Vec3 {
        self.boresight
            .scale(l.x)
            .add(&self.right.scale(l.y))
            .add(&self.up.scale(l.z))
    }
}

/// Rectangular plate dimensions of a RIS element, meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlateDims {
    pub a: f64,
    pub b: f64,
}

/// Normalized angular response of a single element, `F(φ, θ) ∈ [0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PatternKind {
    Isotropic,
    /// `F = sin(θ)^α` in the front hemisphere, 0 behind the array plane.
    PowerOfSine { alpha: f64 },
    /// Bilinear interpolation over a (azimuth, zenith) grid, radians.
    /// Axes must be strictly increasing and cover the queried directions.
    Tabulated {
        azimuths_rad: Vec<f64>,
        zeniths_rad: Vec<f64>,
        /// `gains[i][j]` is the value at `(azimuths_rad[i], zeniths_rad[j])`.
        gains: Vec<Vec<f64>>,
    },
}

/// Element pattern plus, for RIS elements, the physical plate dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementPattern {
    pub kind: PatternKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dims: Option<PlateDims>,
}

impl ElementPattern {
    pub fn isotropic() -> Self {
        ElementPattern {
            kind: PatternKind::Isotropic,
            dims: None,
        }
    }

    pub fn power_of_sine(alpha: f64) -> Self {
        ElementPattern {
            kind: PatternKind::PowerOfSine { alpha },
            dims: None,
        }
    }

    pub fn with_dims(mut self, a: f64, b: f64) -> Self {
        self.dims = Some(PlateDims { a, b });
        self
    }

    /// Validate invariants: α ≥ 0, tabulated values in [0, 1] on increasing
    /// axes, plate dims positive when present.
    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            PatternKind::Isotropic => {}
            PatternKind::PowerOfSine { alpha } => {
                if !alpha.is_finite() || *alpha < 0.0 {
                    return Err(Error::Config(format!("pattern exponent {alpha} < 0")));
                }
            }
            PatternKind::Tabulated {
                azimuths_rad,
                zeniths_rad,
                gains,
            } => {
                if azimuths_rad.len() < 2 || zeniths_rad.len() < 2 {
                    return Err(Error::Config("tabulated pattern needs a 2x2 grid".into()));
                }
                if !azimuths_rad.windows(2).all(|w| w[0] < w[1])
                    || !zeniths_rad.windows(2).all(|w| w[0] < w[1])
                {
                    return Err(Error::Config("pattern axes must be increasing".into()));
                }
                // the grid must cover the full front hemisphere
                let half_pi = std::f64::consts::FRAC_PI_2;
                if azimuths_rad[0] > -half_pi
                    || *azimuths_rad.last().unwrap() < half_pi
                    || zeniths_rad[0] > 0.0
                    || *zeniths_rad.last().unwrap() < std::f64::consts::PI
                {
                    return Err(Error::Config(
                        "tabulated pattern must cover azimuth [-pi/2, pi/2] and zenith [0, pi]"
                            .into(),
                    ));
                }
                if gains.len() != azimuths_rad.len()
                    || gains.iter().any(|row| row.len() != zeniths_rad.len())
                {
                    return Err(Error::Config("pattern grid shape mismatch".into()));
                }
                if gains
                    .iter()
                    .flatten()
                    .any(|g| !g.is_finite() || *g < 0.0 || *g > 1.0)
                {
                    return Err(Error::Config("pattern values must lie in [0, 1]".into()));
                }
            }
        }
        if let Some(d) = &self.dims {
            if d.a <= 0.0 || d.b <= 0.0 {
                return Err(Error::Config("plate dims must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Planar antenna or RIS array: layout, orientation and per-element pattern.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArraySpec {
    pub rows: usize,
    pub cols: usize,
    /// Element pitch in wavelengths (λ/2 spacing is 0.5).
    pub spacing: f64,
    pub orientation: Orientation,
    pub element: ElementPattern,
    /// Peak element gain, linear. 1.0 for isotropic elements.
    pub element_gain: f64,
}

impl ArraySpec {
    pub fn new(rows: usize, cols: usize, spacing: f64, orientation: Orientation) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Config("array needs at least one element".into()));
        }
        if !(spacing > 0.0) {
            return Err(Error::Config(format!("element spacing {spacing} <= 0")));
        }
        Ok(ArraySpec {
            rows,
            cols,
            spacing,
            orientation,
            element: ElementPattern::isotropic(),
            element_gain: 1.0,
        })
    }

    pub fn with_pattern(mut self, p: ElementPattern) -> Result<Self> {
        p.validate()?;
        self.element = p;
        Ok(self)
    }

    pub fn with_element_gain(mut self, g: f64) -> Result<Self> {
        if !(g > 0.0) {
            return Err(Error::Config(format!("element gain {g} <= 0")));
        }
        self.element_gain = g;
        Ok(self)
    }

    pub fn n_elements(&self) -> usize {
        self.rows * self.cols
    }
}

/// Distances and local-frame departure/arrival angles for one Tx-Rx pair.
///
/// Arrival angles point from the receiver back toward the transmitter, so a
/// steering vector evaluated at them is the receive response to the incoming
/// wave. Swapping the endpoints therefore swaps the two angle pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkGeometry {
    /// 3D Tx-Rx distance, meters.
    pub d3d: f64,
    /// Horizontal Tx-Rx distance, meters.
    pub d2d: f64,
    /// Departure azimuth in the Tx local frame, radians, [−π, π).
    pub dep_az: f64,
    /// Departure zenith in the Tx local frame, radians, [0, π].
    pub dep_zen: f64,
    /// Arrival azimuth in the Rx local frame, radians.
    pub arr_az: f64,
    /// Arrival zenith in the Rx local frame, radians.
    pub arr_zen: f64,
}

/// Azimuth/zenith of a local direction vector. Azimuth wrapped to [−π, π).
fn local_angles(u: &Vec3) -> (f64, f64) {
    let mut az = u.y.atan2(u.x);
    if az >= std::f64::consts::PI {
        az -= 2.0 * std::f64::consts::PI;
    }
    let zen = u.z.clamp(-1.0, 1.0).acos();
    (az, zen)
}

/// Unit direction vector for local angles.
pub fn direction(az: f64, zen: f64) -> Vec3 {
    Vec3::new(zen.sin() * az.cos(), zen.sin() * az.sin(), zen.cos())
}

/// Element positions in the local frame (x = 0 plane), row-major order,
/// centered on the origin with pitch `spacing · λ`.
pub fn element_positions(spec: &ArraySpec, wavelength: f64) -> Vec<Vec3> {
    assert!(wavelength > 0.0, "wavelength must be positive");
    let pitch = spec.spacing * wavelength;
    let y0 = (spec.cols as f64 - 1.0) / 2.0;
    let z0 = (spec.rows as f64 - 1.0) / 2.0;
    let mut out = Vec::with_capacity(spec.n_elements());
    for r in 0..spec.rows {
        for c in 0..spec.cols {
            out.push(Vec3::new(
                0.0,
                (c as f64 - y0) * pitch,
                (z0 - r as f64) * pitch,
            ));
        }
    }
    out
}

/// Distances and angles of the line-of-sight direction between two sites,
/// each expressed in that site's local frame.
pub fn link_geometry(
    tx_pos: Vec3,
    tx_orient: &Orientation,
    rx_pos: Vec3,
    rx_orient: &Orientation,
) -> Result<LinkGeometry> {
    if !tx_pos.is_finite() || !rx_pos.is_finite() {
        return Err(Error::Geometry("non-finite site position".into()));
    }
    let diff = rx_pos.sub(&tx_pos);
    let d3d = diff.norm();
    if d3d < 1e-9 {
        return Err(Error::Geometry(format!(
            "coincident sites at ({}, {}, {})",
            tx_pos.x, tx_pos.y, tx_pos.z
        )));
    }
    let d2d = (diff.x * diff.x + diff.y * diff.y).sqrt();
    let dep = tx_orient.to_local(&diff.scale(1.0 / d3d));
    let arr = rx_orient.to_local(&diff.scale(-1.0 / d3d));
    let (dep_az, dep_zen) = local_angles(&dep);
    let (arr_az, arr_zen) = local_angles(&arr);
    Ok(LinkGeometry {
        d3d,
        d2d,
        dep_az,
        dep_zen,
        arr_az,
        arr_zen,
    })
}

/// Array response toward local direction `(az, zen)`: entry m is
/// `exp(+j·2π/λ·⟨p_m, u⟩)`. All entries are unit modulus.
pub fn steering_vector(
    spec: &ArraySpec,
    az: f64,
    zen: f64,
    wavelength: f64,
) -> nalgebra::DVector<Complex64> {
    let positions = element_positions(spec, wavelength);
    steering_vector_at(&positions, az, zen, wavelength)
}

/// Steering vector over precomputed element positions (hot path for
/// ray-summed channel assembly).
pub fn steering_vector_at(
    positions: &[Vec3],
    az: f64,
    zen: f64,
    wavelength: f64,
) -> nalgebra::DVector<Complex64> {
    let u = direction(az, zen);
    let k = 2.0 * std::f64::consts::PI / wavelength;
    nalgebra::DVector::from_iterator(
        positions.len(),
        positions
            .iter()
            .map(|p| Complex64::from_polar(1.0, k * p.dot(&u))),
    )
}

/// Normalized element gain `F(φ, θ) ∈ [0, 1]` at local angles.
pub fn pattern_gain(p: &ElementPattern, az: f64, zen: f64) -> Result<f64> {
    match &p.kind {
        PatternKind::Isotropic => Ok(1.0),
        PatternKind::PowerOfSine { alpha } => {
            if az.cos() < 0.0 {
                return Ok(0.0); // behind the array plane
            }
            let s = zen.clamp(0.0, std::f64::consts::PI).sin().max(0.0);
            Ok(s.powf(*alpha))
        }
        PatternKind::Tabulated {
            azimuths_rad,
            zeniths_rad,
            gains,
        } => {
            let gi = interp_index(azimuths_rad, az).ok_or_else(|| {
                Error::PatternDomain(format!("azimuth {az} outside grid"))
            })?;
            let gj = interp_index(zeniths_rad, zen).ok_or_else(|| {
                Error::PatternDomain(format!("zenith {zen} outside grid"))
            })?;
            let (i, ta) = gi;
            let (j, tz) = gj;
            let v00 = gains[i][j];
            let v10 = gains[i + 1][j];
            let v01 = gains[i][j + 1];
            let v11 = gains[i + 1][j + 1];
            Ok(v00 * (1.0 - ta) * (1.0 - tz)
                + v10 * ta * (1.0 - tz)
                + v01 * (1.0 - ta) * tz
                + v11 * ta * tz)
        }
    }
}

/// Locate `x` on an increasing axis; returns the lower cell index and the
/// fractional position inside the cell.
fn interp_index(axis: &[f64], x: f64) -> Option<(usize, f64)> {
    let first = *axis.first()?;
    let last = *axis.last()?;
    if x < first || x > last {
        return None;
    }
    let i = match axis.binary_search_by(|v| v.partial_cmp(&x).unwrap()) {
        Ok(i) => i.min(axis.len() - 2),
        Err(i) => i - 1,
    };
    let span = axis[i + 1] - axis[i];
    Some((i, (x - axis[i]) / span))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn broadside_x() -> Orientation {
        Orientation::new(Vec3::new(1.0, 0.0, 0.0), Vec3::new(0.0, 0.0, 1.0)).unwrap()
    }

    #[test]
    fn single_element_at_center() {
        let spec = ArraySpec::new(1, 1, 0.5, broadside_x()).unwrap();
        let pos = element_positions(&spec, 0.15);
        assert_eq!(pos.len(), 1);
        assert_eq!(pos[0], Vec3::zero());
    }

    #[test]
    fn one_by_two_layout_is_symmetric_along_y() {
        // spacing 0.5 at λ = 2 m puts the pair at y = ∓1/2 pitch = ∓0.5 m
        let spec = ArraySpec::new(1, 2, 0.5, broadside_x()).unwrap();
        let pos = element_positions(&spec, 2.0);
        assert_eq!(pos.len(), 2);
        assert!((pos[0].y + 0.5).abs() < 1e-15 && pos[0].x == 0.0 && pos[0].z == 0.0);
        assert!((pos[1].y - 0.5).abs() < 1e-15);
    }

    #[test]
    fn four_by_four_adjacent_pitch_is_half_wavelength() {
        let lambda = 0.15;
        let spec = ArraySpec::new(4, 4, 0.5, broadside_x()).unwrap();
        let pos = element_positions(&spec, lambda);
        assert_eq!(pos.len(), 16);
        // exhaustive check: every horizontally/vertically adjacent pair is λ/2 apart
        for r in 0..4 {
            for c in 0..4 {
                let m = r * 4 + c;
                if c + 1 < 4 {
                    let d = pos[m].sub(&pos[m + 1]).norm();
                    assert!((d - lambda / 2.0).abs() < 1e-12);
                }
                if r + 1 < 4 {
                    let d = pos[m].sub(&pos[m + 4]).norm();
                    assert!((d - lambda / 2.0).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn element_positions_are_centro_symmetric() {
        for (rows, cols) in [(1, 3), (2, 5), (4, 4), (3, 1)] {
            let spec = ArraySpec::new(rows, cols, 0.5, broadside_x()).unwrap();
            let sum = element_positions(&spec, 0.3)
                .iter()
                .fold(Vec3::zero(), |acc, p| acc.add(p));
            assert!(sum.norm() < 1e-12, "{rows}x{cols} sum {:?}", sum);
        }
    }

    #[test]
    fn link_geometry_site_distances() {
        let o = broadside_x();
        // BS (0,0,25) to UE (250,0,1.5)
        let g = link_geometry(
            Vec3::new(0.0, 0.0, 25.0),
            &o,
            Vec3::new(250.0, 0.0, 1.5),
            &o,
        )
        .unwrap();
        assert!((g.d2d - 250.0).abs() < 1e-12);
        assert!((g.d3d - (250.0f64.powi(2) + 23.5f64.powi(2)).sqrt()).abs() < 1e-12);

        // BS (0,0,25) to RIS (200,50,25)
        let g2 = link_geometry(
            Vec3::new(0.0, 0.0, 25.0),
            &o,
            Vec3::new(200.0, 50.0, 25.0),
            &o,
        )
        .unwrap();
        assert!((g2.d3d - 206.15528128088303).abs() < 1e-9);
        assert!((g2.d3d - g2.d2d).abs() < 1e-12);
    }

    #[test]
    fn boresight_target_is_broadside() {
        let tx = Vec3::new(0.0, 0.0, 10.0);
        let rx = Vec3::new(40.0, -3.0, 2.0);
        let tx_o = Orientation::facing(tx, rx).unwrap();
        let rx_o = Orientation::facing(rx, tx).unwrap();
        let g = link_geometry(tx, &tx_o, rx, &rx_o).unwrap();
        assert!(g.dep_az.abs() < 1e-12);
        assert!((g.dep_zen - PI / 2.0).abs() < 1e-12);
        assert!(g.arr_az.abs() < 1e-12);
        assert!((g.arr_zen - PI / 2.0).abs() < 1e-12);
    }

    #[test]
    fn coincident_sites_error() {
        let o = broadside_x();
        let p = Vec3::new(1.0, 2.0, 3.0);
        assert!(link_geometry(p, &o, p, &o).is_err());
    }

    #[test]
    fn link_geometry_antisymmetric_under_swap() {
        let a = Vec3::new(0.0, 0.0, 25.0);
        let b = Vec3::new(200.0, 50.0, 1.5);
        let oa = Orientation::facing(a, b).unwrap();
        let ob = Orientation::new(Vec3::new(-1.0, 0.3, 0.1), Vec3::new(0.0, 0.0, 1.0)).unwrap();
        let fwd = link_geometry(a, &oa, b, &ob).unwrap();
        let rev = link_geometry(b, &ob, a, &oa).unwrap();
        assert!((fwd.d3d - rev.d3d).abs() < 1e-12);
        assert!((fwd.d2d - rev.d2d).abs() < 1e-12);
        // departure from a toward b is the direction b's wave arrives from, and vice versa
        assert!((fwd.dep_az - rev.arr_az).abs() < 1e-12);
        assert!((fwd.dep_zen - rev.arr_zen).abs() < 1e-12);
        assert!((fwd.arr_az - rev.dep_az).abs() < 1e-12);
        assert!((fwd.arr_zen - rev.dep_zen).abs() < 1e-12);
    }

    #[test]
    fn steering_broadside_is_all_ones() {
        let spec = ArraySpec::new(3, 5, 0.5, broadside_x()).unwrap();
        let v = steering_vector(&spec, 0.0, PI / 2.0, 0.15);
        for e in v.iter() {
            assert!((e - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn steering_endfire_pair_is_out_of_phase() {
        // 1x2 along y, spacing λ/2; in-plane endfire direction (az = π/2) gives
        // a path difference of λ/2, i.e. a phase difference of π.
        let spec = ArraySpec::new(1, 2, 0.5, broadside_x()).unwrap();
        let v = steering_vector(&spec, PI / 2.0, PI / 2.0, 1.0);
        let ratio = v[1] / v[0];
        assert!((ratio - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn steering_norm_is_sqrt_element_count() {
        let spec = ArraySpec::new(4, 4, 0.5, broadside_x()).unwrap();
        let v = steering_vector(&spec, 0.7, 1.1, 0.15);
        assert!((v.norm() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn pattern_gain_examples() {
        let iso = ElementPattern::isotropic();
        assert_eq!(pattern_gain(&iso, 1.0, 2.0).unwrap(), 1.0);

        let sine = ElementPattern::power_of_sine(1.0);
        assert!((pattern_gain(&sine, 0.0, PI / 2.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(pattern_gain(&sine, 0.0, 0.0).unwrap().abs() < 1e-15);

        let sine3 = ElementPattern::power_of_sine(3.0);
        assert!(pattern_gain(&sine3, 0.0, 0.0).unwrap().abs() < 1e-15);
        // behind the plane
        assert_eq!(pattern_gain(&sine, PI, PI / 2.0).unwrap(), 0.0);
    }

    #[test]
    fn tabulated_pattern_interpolates_and_rejects_outside() {
        let tab = ElementPattern {
            kind: PatternKind::Tabulated {
                azimuths_rad: vec![-1.6, 0.0, 1.6],
                zeniths_rad: vec![0.0, PI],
                gains: vec![vec![0.0, 1.0], vec![0.5, 0.5], vec![1.0, 0.0]],
            },
            dims: None,
        };
        tab.validate().unwrap();
        let mid = pattern_gain(&tab, 0.0, PI / 2.0).unwrap();
        assert!((mid - 0.5).abs() < 1e-12);
        assert!(pattern_gain(&tab, 2.0, 0.5).is_err());

        // grids that do not span the front hemisphere are rejected
        let narrow = ElementPattern {
            kind: PatternKind::Tabulated {
                azimuths_rad: vec![-1.0, 1.0],
                zeniths_rad: vec![0.0, PI],
                gains: vec![vec![0.1, 0.2], vec![0.3, 0.4]],
            },
            dims: None,
        };
        assert!(narrow.validate().is_err());
    }

    #[test]
    fn orientation_rejects_parallel_up() {
        let e = Orientation::new(Vec3::new(0.0, 0.0, 1.0), Vec3::new(0.0, 0.0, -2.0));
        assert!(e.is_err());
    }

    proptest! {
        #[test]
        fn prop_steering_entries_unit_modulus(
            az in -PI..PI, zen in 0.0..PI, rows in 1usize..6, cols in 1usize..6
        ) {
            let spec = ArraySpec::new(rows, cols, 0.5, broadside_x()).unwrap();
            let v = steering_vector(&spec, az, zen, 0.15);
            for e in v.iter() {
                prop_assert!((e.norm() - 1.0).abs() < 1e-12);
            }
            let n = (rows * cols) as f64;
            prop_assert!((v.norm_squared() - n).abs() < 1e-9);
        }

        #[test]
        fn prop_pattern_gain_in_unit_interval(
            az in -PI..PI, zen in 0.0..PI, alpha in 0.0..6.0f64
        ) {
            let p = ElementPattern::power_of_sine(alpha);
            let g = pattern_gain(&p, az, zen).unwrap();
            prop_assert!((0.0..=1.0).contains(&g));
        }
    }
}
