//! Checks of the zero pattern the simplified decoder relies on.
//!
//! Real dimensions 0..3 hold `s1, s2` and 4..7 hold `s3, s4` (as
//! `s₁ᴿ, s₁ᴵ, s₂ᴿ, s₂ᴵ, …`). The decoder needs the 4x4 block of `R` coupling
//! the two groups to vanish, and four entries inside each diagonal block.

use crate::channel::EquivalentChannel;
use crate::mathcore::RealMatrix;

/// Relative tolerance applied to every claim.
pub const STRUCTURE_TOLERANCE: f64 = 1e-9;

/// Zero entries inside the first 4x4 diagonal block (0-based).
pub const R11_ZEROS: [(usize, usize); 4] = [(0, 1), (0, 3), (1, 2), (2, 3)];
/// Zero entries inside the second 4x4 diagonal block (0-based).
pub const R22_ZEROS: [(usize, usize); 4] = [(4, 5), (4, 7), (5, 6), (6, 7)];

/// Largest violation of each claim, divided by the reference magnitude
/// (`max|R|` for entries of `R`, the largest Gram entry for inner products).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StructureReport {
    pub r12: f64,
    pub r11: f64,
    pub r22: f64,
    /// `None` when only `R` was inspected.
    pub gram: Option<f64>,
    pub tolerance: f64,
}

impl StructureReport {
    pub fn r12_holds(&self) -> bool {
        self.r12 <= self.tolerance
    }

    pub fn r11_holds(&self) -> bool {
        self.r11 <= self.tolerance
    }

    pub fn r22_holds(&self) -> bool {
        self.r22 <= self.tolerance
    }

    pub fn gram_holds(&self) -> bool {
        self.gram.is_none_or(|g| g <= self.tolerance)
    }

    pub fn all_zero_claims_hold(&self) -> bool {
        self.r12_holds() && self.r11_holds() && self.r22_holds()
    }

    pub fn all_hold(&self) -> bool {
        self.all_zero_claims_hold() && self.gram_holds()
    }

    /// Componentwise maximum of two reports.
    pub fn merge(&self, other: &StructureReport) -> StructureReport {
        let gram = match (self.gram, other.gram) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        StructureReport {
            r12: self.r12.max(other.r12),
            r11: self.r11.max(other.r11),
            r22: self.r22.max(other.r22),
            gram,
            tolerance: self.tolerance.max(other.tolerance),
        }
    }
}

pub fn verify_r_structure(r: &RealMatrix) -> StructureReport {
    let scale = r.max_abs().max(f64::MIN_POSITIVE);
    let rel = |i: usize, j: usize| r[(i, j)].abs() / scale;
    let mut r12 = 0.0f64;
    for i in 0..4 {
        for j in 4..8 {
            r12 = r12.max(rel(i, j));
        }
    }
    let r11 = R11_ZEROS.iter().map(|&(i, j)| rel(i, j)).fold(0.0, f64::max);
    let r22 = R22_ZEROS.iter().map(|&(i, j)| rel(i, j)).fold(0.0, f64::max);
    StructureReport { r12, r11, r22, gram: None, tolerance: STRUCTURE_TOLERANCE }
}

/// Checks `R` and the column inner products of `H_eq` that imply its zeros:
/// every pair across the two groups and the pairs behind the first three
/// zeros of each diagonal block.
pub fn verify_channel_structure(channel: &EquivalentChannel) -> StructureReport {
    let h = &channel.h_eq;
    let cols: Vec<Vec<f64>> = (0..h.cols()).map(|j| h.column(j)).collect();
    let dot = |a: usize, b: usize| cols[a].iter().zip(&cols[b]).map(|(x, y)| x * y).sum::<f64>();
    let mut scale = f64::MIN_POSITIVE;
    for a in 0..cols.len() {
        for b in a..cols.len() {
            scale = scale.max(dot(a, b).abs());
        }
    }
    let mut pairs: Vec<(usize, usize)> = (0..4).flat_map(|j| (4..8).map(move |k| (j, k))).collect();
    pairs.extend([(0, 1), (0, 3), (1, 2), (4, 5), (4, 7), (5, 6)]);
    let gram = pairs.iter().map(|&(a, b)| dot(a, b).abs() / scale).fold(0.0, f64::max);
    StructureReport { gram: Some(gram), ..verify_r_structure(&channel.qr.r) }
}
