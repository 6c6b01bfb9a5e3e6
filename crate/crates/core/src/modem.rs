//! Square QAM constellations, their PAM components, slicing and
//! Schnorr-Euchner enumeration order.
//!
//! All constellations have unit average energy. Ties are always resolved
//! toward the smaller PAM level so decoder output is reproducible.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::mathcore::ComplexValue;

/// Largest PAM alphabet supported (64-QAM).
pub const MAX_PAM: usize = 8;

/// Ascending, symmetric, uniformly spaced PAM levels.
#[derive(Debug, Clone, PartialEq)]
pub struct PamSet {
    levels: Vec<f64>,
    half_spacing: f64,
}

impl PamSet {
    fn new(order: usize, half_spacing: f64) -> Self {
        let levels = (0..order)
            .map(|i| (2.0 * i as f64 - (order as f64 - 1.0)) * half_spacing)
            .collect();
        Self { levels, half_spacing }
    }

    pub fn order(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn level(&self, index: usize) -> f64 {
        self.levels[index]
    }

    /// Index of the level nearest to `x`, ties toward the smaller level.
    pub fn slice_index(&self, x: f64) -> usize {
        let last = self.levels.len() - 1;
        let t = (x / self.half_spacing + last as f64) / 2.0;
        let mut i = (t - 0.5).ceil().clamp(0.0, last as f64) as usize;
        // settle rounding at midpoints against the direct distances
        if i > 0 && (x - self.levels[i - 1]).abs() <= (x - self.levels[i]).abs() {
            i -= 1;
        } else if i < last && (x - self.levels[i + 1]).abs() < (x - self.levels[i]).abs() {
            i += 1;
        }
        i
    }

    pub fn slice(&self, x: f64) -> f64 {
        self.levels[self.slice_index(x)]
    }

    /// Level indices sorted by distance from `estimate`.
    pub fn se_order_indices(&self, estimate: f64) -> SeOrder {
        let n = self.levels.len();
        let mut out = SeOrder { idx: [0; MAX_PAM], len: n as u8 };
        let first = self.slice_index(estimate);
        out.idx[0] = first as u8;
        let (mut left, mut right) = (first as isize - 1, first + 1);
        for slot in out.idx.iter_mut().take(n).skip(1) {
            let take_left = if left < 0 {
                false
            } else if right >= n {
                true
            } else {
                estimate - self.levels[left as usize] <= self.levels[right] - estimate
            };
            if take_left {
                *slot = left as u8;
                left -= 1;
            } else {
                *slot = right as u8;
                right += 1;
            }
        }
        out
    }
}

/// A Schnorr-Euchner visiting order over one PAM alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeOrder {
    idx: [u8; MAX_PAM],
    len: u8,
}

impl SeOrder {
    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// The `k`-th level index to visit.
    #[inline]
    pub fn get(&self, k: usize) -> usize {
        self.idx[k] as usize
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.idx[..self.len()].iter().map(|&i| i as usize)
    }
}

/// Nearest PAM level, ties toward the smaller level.
pub fn slice_pam(x: f64, pam: &PamSet) -> f64 {
    pam.slice(x)
}

/// All levels sorted by `|estimate − level|`, ties toward the smaller level.
pub fn se_order(estimate: f64, pam: &PamSet) -> Vec<f64> {
    pam.se_order_indices(estimate).iter().map(|i| pam.level(i)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Modulation {
    Qpsk,
    Qam16,
    Qam64,
}

impl Modulation {
    pub fn order(self) -> usize {
        match self {
            Modulation::Qpsk => 4,
            Modulation::Qam16 => 16,
            Modulation::Qam64 => 64,
        }
    }

    pub fn constellation(self) -> QamConstellation {
        build_qam(self.order()).expect("supported order")
    }
}

impl FromStr for Modulation {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "qpsk" | "4qam" => Ok(Modulation::Qpsk),
            "16qam" => Ok(Modulation::Qam16),
            "64qam" => Ok(Modulation::Qam64),
            other => Err(Error::Config(format!("unknown modulation `{other}`"))),
        }
    }
}

impl fmt::Display for Modulation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Modulation::Qpsk => "qpsk",
            Modulation::Qam16 => "16qam",
            Modulation::Qam64 => "64qam",
        })
    }
}

/// Unit-energy square QAM. Point `k` is `pam[k / √M] + i·pam[k % √M]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QamConstellation {
    order: usize,
    points: Vec<ComplexValue>,
    pam: PamSet,
}

impl QamConstellation {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn points(&self) -> &[ComplexValue] {
        &self.points
    }

    pub fn pam(&self) -> &PamSet {
        &self.pam
    }

    pub fn point(&self, index: usize) -> ComplexValue {
        self.points[index]
    }

    /// Index of the nearest point; valid for square QAM since the
    /// distance separates over the two axes.
    pub fn nearest_index(&self, z: ComplexValue) -> usize {
        self.pam.slice_index(z.re) * self.pam.order() + self.pam.slice_index(z.im)
    }
}

pub fn build_qam(order: usize) -> Result<QamConstellation> {
    let side = match order {
        4 => 2,
        16 => 4,
        64 => 8,
        _ => return Err(Error::UnsupportedOrder(order)),
    };
    let half_spacing = 1.0 / (2.0 * (order as f64 - 1.0) / 3.0).sqrt();
    let pam = PamSet::new(side, half_spacing);
    let points = (0..order)
        .map(|k| ComplexValue::new(pam.level(k / side), pam.level(k % side)))
        .collect();
    Ok(QamConstellation { order, points, pam })
}

pub fn nearest_qam(z: ComplexValue, constellation: &QamConstellation) -> ComplexValue {
    ComplexValue::new(constellation.pam.slice(z.re), constellation.pam.slice(z.im))
}

/// One Schnorr-Euchner order per real decoding dimension, built from an
/// unconstrained estimate of that dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct EnumerationTable {
    rows: Vec<SeOrder>,
}

impl EnumerationTable {
    pub fn from_estimates(estimates: &[f64], pam: &PamSet) -> Self {
        Self { rows: estimates.iter().map(|&e| pam.se_order_indices(e)).collect() }
    }

    pub fn dims(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, dim: usize) -> &SeOrder {
        &self.rows[dim]
    }
}
