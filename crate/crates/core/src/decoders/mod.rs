//! Maximum-likelihood decoders for the 3D MIMO code.
//!
//! All decoders share [`OpCounters`]. The counting convention:
//!
//! * a visited node is one candidate value assigned at a tree level (tree
//!   search) or one candidate assigned in a parallel branch, whether or not
//!   it survives the radius test;
//! * `mults` / `divs` are real multiplications and divisions spent in
//!   metric updates, interference cancellation, slicing normalizations,
//!   QR decomposition, `Qᵀ·ỹ` and the zero-forcing solve. Squares count as
//!   multiplications. PAM quantization and Schnorr-Euchner table lookups
//!   are comparisons and are not counted.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::channel::EquivalentChannel;
use crate::error::{Error, Result};
use crate::mathcore::{Flops, RealMatrix, RANK_TOLERANCE};
use crate::modem::QamConstellation;
use crate::stbc::{SymbolVector, REAL_DIMS};

pub mod bruteforce;
pub mod column_switch;
pub mod simplified;
pub mod sphere;
pub mod structure;

pub use bruteforce::ml_bruteforce;
pub use column_switch::{column_switch, zf_estimate, AggregateErrors, ColumnSwitchPlan};
pub use simplified::{compute_v, parallel_decisions, simplified_ml, BranchProblem, SimplifiedOptions};
pub use sphere::sd_baseline;
pub use structure::{verify_channel_structure, verify_r_structure, StructureReport};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCounters {
    pub tree_nodes: u64,
    pub branch_nodes: [u64; 4],
    /// Complete tree paths that reached the leaf level.
    pub leaves: u64,
    pub mults: u64,
    pub divs: u64,
}

impl OpCounters {
    /// Tree nodes plus the busiest parallel branch.
    pub fn visited_nodes(&self) -> u64 {
        self.tree_nodes + self.branch_nodes.iter().copied().max().unwrap_or(0)
    }

    pub fn add_flops(&mut self, flops: Flops) {
        self.mults += flops.mults;
        self.divs += flops.divs;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    /// Decisions in canonical codeword order.
    pub symbols: SymbolVector,
    /// Achieved `‖z̃ − R·s̃‖²` (equal to `‖ỹ − H_eq·s̃‖²` for square `H_eq`).
    pub metric: f64,
    pub counters: OpCounters,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SwitchMode {
    #[default]
    None,
    Swt4by4,
    Swt2by2,
}

impl FromStr for SwitchMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "none" => Ok(SwitchMode::None),
            "4by4" => Ok(SwitchMode::Swt4by4),
            "2by2" => Ok(SwitchMode::Swt2by2),
            other => Err(Error::Config(format!("unknown column switch mode `{other}`"))),
        }
    }
}

impl fmt::Display for SwitchMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SwitchMode::None => "none",
            SwitchMode::Swt4by4 => "4by4",
            SwitchMode::Swt2by2 => "2by2",
        })
    }
}

/// Upper triangle of a 16x16 `R`, copied into a fixed array for the search kernels.
pub(crate) type Tri16 = [[f64; REAL_DIMS]; REAL_DIMS];

pub(crate) fn to_tri16(r: &RealMatrix) -> Result<Tri16> {
    if r.rows() != REAL_DIMS || r.cols() != REAL_DIMS {
        return Err(Error::DimensionMismatch(format!(
            "expected a 16x16 R, got {}x{}",
            r.rows(),
            r.cols()
        )));
    }
    let mut out = [[0.0; REAL_DIMS]; REAL_DIMS];
    for (i, row) in out.iter_mut().enumerate() {
        row.copy_from_slice(r.row(i));
    }
    Ok(out)
}

pub(crate) fn check_diagonal(r: &Tri16) -> Result<()> {
    for (i, row) in r.iter().enumerate() {
        if row[i].is_nan() || row[i] <= RANK_TOLERANCE {
            return Err(Error::DegenerateChannel { index: i, value: row[i] });
        }
    }
    Ok(())
}

pub(crate) fn symbols_from_indices(indices: &[usize; REAL_DIMS], c: &QamConstellation) -> SymbolVector {
    let pam = c.pam();
    let real: Vec<f64> = indices.iter().map(|&i| pam.level(i)).collect();
    SymbolVector::from_real(&real).expect("16 reals")
}

/// A decoder usable by the sweep harness.
pub trait Decoder: Send + Sync {
    fn name(&self) -> &str;

    /// Decodes one codeword from its real received vector.
    fn decode(
        &self,
        y: &[f64; REAL_DIMS],
        channel: &EquivalentChannel,
        constellation: &QamConstellation,
    ) -> Result<DecodeResult>;
}

/// Registered decoder names.
pub const DECODER_NAMES: [&str; 5] = ["bruteforce", "sd-baseline", "simplified", "simplified-cs4", "simplified-cs2"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecoderKind {
    BruteForce,
    SdBaseline,
    Simplified(SwitchMode),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegisteredDecoder {
    name: String,
    kind: DecoderKind,
}

impl RegisteredDecoder {
    pub fn kind(&self) -> DecoderKind {
        self.kind
    }
}

impl Decoder for RegisteredDecoder {
    fn name(&self) -> &str {
        &self.name
    }

    fn decode(
        &self,
        y: &[f64; REAL_DIMS],
        channel: &EquivalentChannel,
        constellation: &QamConstellation,
    ) -> Result<DecodeResult> {
        match self.kind {
            DecoderKind::BruteForce => ml_bruteforce(y, &channel.h_eq, constellation),
            DecoderKind::SdBaseline => {
                let z = channel.qr.project(y)?;
                let mut out = sd_baseline(&z, &channel.qr.r, constellation)?;
                let n = REAL_DIMS;
                out.counters.add_flops(crate::mathcore::QrFactors::cost(n, n));
                out.counters.add_flops(Flops::new((n * n) as u64, 0));
                Ok(out)
            }
            DecoderKind::Simplified(mode) => {
                if channel.variant != crate::stbc::CodewordVariant::New {
                    return Err(Error::VariantRequired("simplified"));
                }
                simplified::simplified_ml_with_qr(
                    y,
                    &channel.h_eq,
                    &channel.qr,
                    constellation,
                    SimplifiedOptions { switch: mode, cross_branch_termination: true },
                )
            }
        }
    }
}

/// Looks up a registered decoder. Plain `simplified` uses `default_switch`.
pub fn decoder_by_name(name: &str, default_switch: SwitchMode) -> Result<RegisteredDecoder> {
    let kind = match name {
        "bruteforce" => DecoderKind::BruteForce,
        "sd-baseline" => DecoderKind::SdBaseline,
        "simplified" => DecoderKind::Simplified(default_switch),
        "simplified-cs4" => DecoderKind::Simplified(SwitchMode::Swt4by4),
        "simplified-cs2" => DecoderKind::Simplified(SwitchMode::Swt2by2),
        other => return Err(Error::UnknownDecoder(other.to_string())),
    };
    Ok(RegisteredDecoder { name: name.to_string(), kind })
}

pub fn decoders_by_names(names: &[String], default_switch: SwitchMode) -> Result<Vec<Arc<dyn Decoder>>> {
    names
        .iter()
        .map(|n| decoder_by_name(n, default_switch).map(|d| Arc::new(d) as Arc<dyn Decoder>))
        .collect()
}
