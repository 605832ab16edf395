//! Achievable rate, water-filling power allocation, BS eigenbeamforming and
//! the alternating BS/RIS optimizer.
//!
//! The joint optimizer alternates two exact maximizations of the same
//! objective `log2 det(I + H(μ) Q Hᴴ(μ)/σ²)`:
//!
//! 1. BS step — eigenbeamforming plus water-filling on the composed channel
//!    (the exact capacity-achieving covariance for fixed μ);
//! 2. RIS step — a sequential pass over the elements, re-pointing each phase
//!    to the best value on a uniform grid with the covariance held fixed.
//!    The effect of one phase on the receive Gram matrix is a rank-2 update,
//!    so every candidate is evaluated exactly without recomposing the
//!    channel.
//!
//! Each half-step never decreases the objective, so the iteration trace is
//! monotone by construction.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::cascade::{ChannelTriple, RISControl};
use crate::channel::ChannelMatrix;
use crate::error::{Error, Result};

/// Transmit power and noise power for one subcarrier, watts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkBudget {
    pub tx_power_w: f64,
    pub noise_w: f64,
}

impl LinkBudget {
    pub fn new(tx_power_w: f64, noise_w: f64) -> Result<Self> {
        if !(tx_power_w > 0.0) || !(noise_w > 0.0) {
            return Err(Error::Config(format!(
                "link budget must be positive (P = {tx_power_w} W, N = {noise_w} W)"
            )));
        }
        Ok(LinkBudget {
            tx_power_w,
            noise_w,
        })
    }

    /// Reference SNR `P/σ²` before any channel gain.
    pub fn snr_reference(&self) -> f64 {
        self.tx_power_w / self.noise_w
    }
}

/// Result of a precoder optimization.
#[derive(Debug, Clone)]
pub struct PrecodeResult {
    /// Transmit covariance, Hermitian PSD with trace = P_TX.
    pub covariance: DMatrix<Complex64>,
    /// Water-filled per-stream powers (on the channel's right singular
    /// vectors), watts.
    pub stream_powers: Vec<f64>,
    /// Achieved rate, bit/s/Hz.
    pub rate_bps_hz: f64,
    /// Rate after every accepted optimizer half-step; non-decreasing.
    pub rate_trace: Vec<f64>,
}

/// `log2 det(I + M/noise)` for Hermitian PSD `M`, via in-place Cholesky with
/// an LU-determinant fallback for borderline matrices.
fn log2_det_i_plus(m: &DMatrix<Complex64>, noise: f64, scratch: &mut DMatrix<Complex64>) -> f64 {
    let n = m.nrows();
    scratch.copy_from(m);
    let inv = 1.0 / noise;
    for c in 0..n {
        for r in 0..n {
            scratch[(r, c)] *= inv;
        }
        scratch[(c, c)] += 1.0;
    }
    // lower Cholesky, accumulating log2 of the diagonal pivots
    let mut log2_det = 0.0;
    for j in 0..n {
        let mut d = scratch[(j, j)].re;
        for k in 0..j {
            d -= scratch[(j, k)].norm_sqr();
        }
        if d <= 0.0 || !d.is_finite() {
            // fall back to a plain determinant
            let mut x = m / Complex64::new(noise, 0.0);
            for i in 0..n {
                x[(i, i)] += Complex64::new(1.0, 0.0);
            }
            let det = x.determinant().re.max(f64::MIN_POSITIVE);
            return det.log2();
        }
        let l = d.sqrt();
        log2_det += d.log2();
        for i in (j + 1)..n {
            let mut v = scratch[(i, j)];
            for k in 0..j {
                v -= scratch[(i, k)] * scratch[(j, k)].conj();
            }
            scratch[(i, j)] = v / l;
        }
    }
    log2_det
}

/// Mutual information `log2 det(I + H Q Hᴴ / σ²)` in bit/s/Hz.
pub fn achievable_rate(
    h: &ChannelMatrix,
    cov: &DMatrix<Complex64>,
    noise_w: f64,
) -> Result<f64> {
    if !(noise_w > 0.0) {
        return Err(Error::Config(format!("noise power {noise_w} must be > 0")));
    }
    let n_tx = h.n_tx();
    if cov.nrows() != n_tx || cov.ncols() != n_tx {
        return Err(Error::Dimension {
            op: "achievable_rate",
            detail: format!(
                "covariance {}x{} vs {} transmit antennas",
                cov.nrows(),
                cov.ncols(),
                n_tx
            ),
        });
    }
    check_psd(cov)?;
    let g = h.data.adjoint();
    let m = &h.data * cov * g; // N_RX×N_RX Gram, Hermitian PSD
    let n_rx = h.n_rx();
    let mut scratch = DMatrix::zeros(n_rx, n_rx);
    Ok(log2_det_i_plus(&m, noise_w, &mut scratch))
}

/// Hermitian-PSD check with a 1e−9 tolerance relative to the matrix scale.
fn check_psd(cov: &DMatrix<Complex64>) -> Result<()> {
    let scale = cov.iter().map(|z| z.norm()).fold(0.0f64, f64::max).max(1.0);
    let asym = (cov - cov.adjoint()).norm();
    if asym > 1e-9 * scale {
        return Err(Error::NotPsd(format!("asymmetry {asym:.3e}")));
    }
    let herm = (cov + cov.adjoint()).map(|z| z * 0.5);
    let eig = herm.symmetric_eigen();
    let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if min < -1e-9 * scale {
        return Err(Error::NotPsd(format!("min eigenvalue {min:.3e}")));
    }
    Ok(())
}

/// Water-filling over channel gains: `p_i = max(0, ν − σ²/λ_i)` with
/// `Σ p_i = P`, by iterative removal of streams that would go negative.
pub fn waterfill(gains: &[f64], total_power: f64, noise_w: f64) -> Result<Vec<f64>> {
    if !(total_power > 0.0) || !(noise_w > 0.0) {
        return Err(Error::Config("water-filling needs P > 0 and σ² > 0".into()));
    }
    let mut idx: Vec<usize> = (0..gains.len())
        .filter(|i| gains[*i] > 0.0 && gains[*i].is_finite())
        .collect();
    if idx.is_empty() {
        return Err(Error::AllZeroGains);
    }
    // best gains first = smallest noise floor first
    idx.sort_by(|a, b| {
        (noise_w / gains[*a])
            .partial_cmp(&(noise_w / gains[*b]))
            .unwrap()
    });
    let floors: Vec<f64> = idx.iter().map(|i| noise_w / gains[*i]).collect();

    let mut active = floors.len();
    let level = loop {
        let sum: f64 = floors[..active].iter().sum();
        let level = (total_power + sum) / active as f64;
        if level >= floors[active - 1] {
            break level;
        }
        active -= 1;
    };

    let mut powers = vec![0.0; gains.len()];
    for (k, &i) in idx.iter().take(active).enumerate() {
        powers[i] = level - floors[k];
    }
    Ok(powers)
}

/// SVD of a channel with singular values (and matching right singular
/// vectors) sorted descending.
fn sorted_svd(h: &DMatrix<Complex64>) -> (Vec<f64>, DMatrix<Complex64>) {
    let svd = h.clone().svd(false, true);
    let v_t = svd.v_t.expect("svd computes v_t");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|a, b| {
        svd.singular_values[*b]
            .partial_cmp(&svd.singular_values[*a])
            .unwrap()
    });
    let sigmas: Vec<f64> = order.iter().map(|i| svd.singular_values[*i]).collect();
    let n = h.ncols();
    let mut v = DMatrix::zeros(n, order.len());
    for (col, &i) in order.iter().enumerate() {
        let row = v_t.row(i);
        for r in 0..n {
            v[(r, col)] = row[r].conj();
        }
    }
    (sigmas, v)
}

/// Capacity-achieving BS precoder for a fixed channel: eigenbeamforming on
/// the right singular vectors with water-filled stream powers. A zero
/// channel yields a zero-rate result (uniform covariance), not an error.
pub fn optimize_bs(h: &ChannelMatrix, budget: &LinkBudget) -> Result<PrecodeResult> {
    Ok(optimize_bs_data(&h.data, budget))
}

fn optimize_bs_data(h: &DMatrix<Complex64>, budget: &LinkBudget) -> PrecodeResult {
    let n_tx = h.ncols();
    let p = budget.tx_power_w;
    let fro: f64 = h.iter().map(|z| z.norm_sqr()).sum();
    if fro == 0.0 {
        let cov = DMatrix::from_diagonal_element(n_tx, n_tx, Complex64::new(p / n_tx as f64, 0.0));
        return PrecodeResult {
            covariance: cov,
            stream_powers: vec![p / n_tx as f64; n_tx],
            rate_bps_hz: 0.0,
            rate_trace: vec![0.0],
        };
    }

    let (sigmas, v) = sorted_svd(h);
    let gains: Vec<f64> = sigmas.iter().map(|s| s * s).collect();
    let powers = waterfill(&gains, p, budget.noise_w).expect("non-zero channel has a gain");

    let mut cov = DMatrix::<Complex64>::zeros(n_tx, n_tx);
    for (i, &pi) in powers.iter().enumerate() {
        if pi > 0.0 {
            let col = v.column(i).clone_owned();
            cov.gerc(Complex64::new(pi, 0.0), &col, &col, Complex64::new(1.0, 0.0));
        }
    }
    let rate: f64 = powers
        .iter()
        .zip(&gains)
        .map(|(pi, g)| (1.0 + pi * g / budget.noise_w).log2())
        .sum();

    PrecodeResult {
        covariance: cov,
        stream_powers: powers,
        rate_bps_hz: rate,
        rate_trace: vec![rate],
    }
}

/// Options of the alternating RIS optimizer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RisOptOptions {
    /// Phase-grid size per element (≥ 2).
    pub phase_grid: usize,
    /// Maximum outer (BS step + full RIS sweep) iterations.
    pub max_outer_iters: usize,
    /// Stop when the relative rate improvement of one outer iteration falls
    /// below this.
    pub rel_tolerance: f64,
}

impl Default for RisOptOptions {
    fn default() -> Self {
        RisOptOptions {
            phase_grid: 64,
            max_outer_iters: 20,
            rel_tolerance: 1e-4,
        }
    }
}

impl RisOptOptions {
    pub fn validate(&self) -> Result<()> {
        if self.phase_grid < 2 {
            return Err(Error::InvalidOptions(format!(
                "phase grid {} < 2",
                self.phase_grid
            )));
        }
        if !(self.rel_tolerance > 0.0) {
            return Err(Error::InvalidOptions(format!(
                "tolerance {} <= 0",
                self.rel_tolerance
            )));
        }
        if self.max_outer_iters == 0 {
            return Err(Error::InvalidOptions("max iterations = 0".into()));
        }
        Ok(())
    }
}

/// Alternating maximization of the achievable rate over the BS covariance
/// and the RIS phases. Returns the final control vector together with the
/// precoder result for the optimized composed channel; the iteration trace
/// is non-decreasing and the returned μ is unit modulus.
pub fn optimize_ris(
    t: &ChannelTriple,
    budget: &LinkBudget,
    init: &RISControl,
    opts: &RisOptOptions,
) -> Result<(RISControl, PrecodeResult)> {
    opts.validate()?;
    let mut mu = init.clone();
    let composed = crate::cascade::compose(t, &mu)?; // also validates dims + modulus
    let mut h = composed.data;

    let noise = budget.noise_w;
    let n_rx = h.nrows();
    let n_ris = t.n_ris();

    let grid: Vec<Complex64> = (0..opts.phase_grid)
        .map(|g| {
            Complex64::from_polar(
                1.0,
                2.0 * std::f64::consts::PI * g as f64 / opts.phase_grid as f64,
            )
        })
        .collect();

    let mut res = optimize_bs_data(&h, budget);
    let mut trace = vec![res.rate_bps_hz];
    let mut prev_rate = res.rate_bps_hz;

    // scratch buffers reused across candidates
    let mut scratch = DMatrix::<Complex64>::zeros(n_rx, n_rx);
    let mut cand = DMatrix::<Complex64>::zeros(n_rx, n_rx);

    for _outer in 0..opts.max_outer_iters {
        // RIS sweep with the covariance fixed
        let cov = res.covariance.clone();
        let mut gram = hermitize(&(&h * &cov * h.adjoint()));
        let mut rate_now = log2_det_i_plus(&gram, noise, &mut scratch);

        for i in 0..n_ris {
            let mu_old = mu.mu()[i];
            let u = t.hb.data.column(i).clone_owned();
            // v = conj(row_i(HA)) so the element's contribution is μ·u·vᴴ
            let v = t.ha.data.row(i).map(|z| z.conj()).transpose();

            let cv = &cov * &v;
            let s = v.dotc(&cv).re; // vᴴ C v ≥ 0
            let t_vec = &h * &cv; // H C v (includes this element's own term)
            // y0 = B C v, B = H − μ_i u vᴴ
            let y0 = &t_vec - &u * (Complex64::new(s, 0.0) * mu_old);

            // constant part across candidates: M1 = B C Bᴴ + s·u uᴴ
            let mut m1 = gram.clone();
            rank2_update(&mut m1, -mu_old, &u, &y0);
            // (the s·u uᴴ term cancels between M0 and M1)

            let mut best_rate = rate_now;
            let mut best_mu = None;
            for &e in &grid {
                if (e - mu_old).norm() < 1e-15 {
                    continue; // current phase: rate already known
                }
                cand.copy_from(&m1);
                rank2_update(&mut cand, e, &u, &y0);
                let r = log2_det_i_plus(&cand, noise, &mut scratch);
                if r > best_rate {
                    best_rate = r;
                    best_mu = Some(e);
                }
            }

            if let Some(e) = best_mu {
                // accept: update H (rank-1) and the Gram matrix
                let delta = e - mu_old;
                for (r_idx, &ur) in u.iter().enumerate() {
                    for c_idx in 0..h.ncols() {
                        h[(r_idx, c_idx)] += delta * ur * t.ha.data[(i, c_idx)];
                    }
                }
                gram.copy_from(&m1);
                rank2_update(&mut gram, e, &u, &y0);
                rate_now = best_rate;
                mu.set_phase(i, e.arg());
            }
        }
        trace.push(rate_now);

        // BS step on the updated channel
        res = optimize_bs_data(&h, budget);
        trace.push(res.rate_bps_hz);

        let improvement = res.rate_bps_hz - prev_rate;
        if improvement < opts.rel_tolerance * prev_rate.max(1e-12) {
            prev_rate = res.rate_bps_hz;
            break;
        }
        prev_rate = res.rate_bps_hz;
    }

    let _ = prev_rate;
    res.rate_trace = trace;
    Ok((mu, res))
}

/// `m += e·u y0ᴴ + conj(e)·y0 uᴴ`, built exactly Hermitian.
fn rank2_update(
    m: &mut DMatrix<Complex64>,
    e: Complex64,
    u: &DVector<Complex64>,
    y0: &DVector<Complex64>,
) {
    let n = m.nrows();
    for r in 0..n {
        for c in 0..n {
            let val = e * u[r] * y0[c].conj() + e.conj() * y0[r] * u[c].conj();
            m[(r, c)] += val;
        }
    }
}

fn hermitize(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    (m + m.adjoint()).map(|z| z * 0.5)
}
