//! Complex channel matrices with provenance metadata.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which link of the RIS triangle a matrix belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkId {
    /// Direct BS-UE channel.
    H0,
    /// BS-RIS channel (RIS as virtual receiver).
    Ha,
    /// RIS-UE channel (RIS as virtual transmitter).
    Hb,
}

impl LinkId {
    pub fn as_str(&self) -> &'static str {
        match self {
            LinkId::H0 => "h0",
            LinkId::Ha => "ha",
            LinkId::Hb => "hb",
        }
    }
}

/// Which generator produced a matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelId {
    GbsmUmaLos,
    GbsmUmaNlos,
    Rician,
    Freespace,
    Off,
}

impl ModelId {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelId::GbsmUmaLos => "gbsm_uma_los",
            ModelId::GbsmUmaNlos => "gbsm_uma_nlos",
            ModelId::Rician => "rician",
            ModelId::Freespace => "freespace",
            ModelId::Off => "off",
        }
    }
}

/// Provenance of one generated matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChannelMeta {
    pub link: LinkId,
    pub model: ModelId,
    pub drop_index: u64,
}

/// A complex channel matrix, dimensions (receive elements × transmit elements).
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    pub data: DMatrix<Complex64>,
    pub meta: Option<ChannelMeta>,
}

impl ChannelMatrix {
    /// Wrap a matrix, rejecting non-finite entries.
    pub fn new(data: DMatrix<Complex64>) -> Result<Self> {
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite("channel matrix"));
        }
        Ok(ChannelMatrix { data, meta: None })
    }

    pub fn with_meta(mut self, meta: ChannelMeta) -> Self {
        self.meta = Some(meta);
        self
    }

    /// All-zero channel of the given shape (e.g. a disconnected link).
    pub fn zeros(n_rx: usize, n_tx: usize) -> Self {
        ChannelMatrix {
            data: DMatrix::zeros(n_rx, n_tx),
            meta: None,
        }
    }

    pub fn n_rx(&self) -> usize {
        self.data.nrows()
    }

    pub fn n_tx(&self) -> usize {
        self.data.ncols()
    }

    /// Squared Frobenius norm.
    pub fn fro_sq(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }
}
