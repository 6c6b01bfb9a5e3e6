//! The 4x4 3D MIMO codeword: two Golden codewords arranged in an
//! Alamouti pattern over four channel uses, in its original and
//! symbol-permuted ("new") forms.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::mathcore::{tilde_deinterleave, tilde_interleave, ComplexMatrix, ComplexValue, RealMatrix};

/// Information symbols per codeword.
pub const SYMBOLS: usize = 8;
/// Real dimensions per codeword.
pub const REAL_DIMS: usize = 2 * SYMBOLS;
pub const TX_ANTENNAS: usize = 4;
pub const CHANNEL_USES: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoldenConstants {
    pub theta: f64,
    pub theta_bar: f64,
    pub alpha: ComplexValue,
    pub alpha_bar: ComplexValue,
    pub scale: f64,
}

impl GoldenConstants {
    pub fn new() -> Self {
        let theta = (1.0 + 5f64.sqrt()) / 2.0;
        let theta_bar = 1.0 - theta;
        Self {
            theta,
            theta_bar,
            alpha: ComplexValue::new(1.0, 1.0 - theta),
            alpha_bar: ComplexValue::new(1.0, 1.0 - theta_bar),
            scale: 1.0 / 5f64.sqrt(),
        }
    }
}

impl Default for GoldenConstants {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum CodewordVariant {
    Original,
    #[default]
    New,
}

impl FromStr for CodewordVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "original" => Ok(CodewordVariant::Original),
            "new" => Ok(CodewordVariant::New),
            other => Err(Error::Config(format!("unknown codeword variant `{other}`"))),
        }
    }
}

impl fmt::Display for CodewordVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CodewordVariant::Original => "original",
            CodewordVariant::New => "new",
        })
    }
}

/// Eight complex information symbols in codeword order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolVector(pub [ComplexValue; SYMBOLS]);

impl SymbolVector {
    pub fn zeros() -> Self {
        Self([ComplexValue::new(0.0, 0.0); SYMBOLS])
    }

    pub fn as_slice(&self) -> &[ComplexValue] {
        &self.0
    }

    /// Interleaved real form `[s1.re, s1.im, …, s8.im]`.
    pub fn to_real(&self) -> [f64; REAL_DIMS] {
        let mut out = [0.0; REAL_DIMS];
        out.copy_from_slice(&tilde_interleave(&self.0));
        out
    }

    pub fn from_real(real: &[f64]) -> Result<Self> {
        if real.len() != REAL_DIMS {
            return Err(Error::DimensionMismatch(format!(
                "{} reals for {SYMBOLS} complex symbols",
                real.len()
            )));
        }
        let mut out = Self::zeros();
        out.0.copy_from_slice(&tilde_deinterleave(real));
        Ok(out)
    }

    /// Number of positions where `self` and `other` differ.
    pub fn symbol_errors(&self, other: &SymbolVector) -> usize {
        self.0.iter().zip(&other.0).filter(|(a, b)| a != b).count()
    }
}

/// `[[α(a+θb), α(c+θd)], [iᾱ(c+θ̄d), ᾱ(a+θ̄b)]]`, unscaled.
fn golden_block(k: &GoldenConstants, s: [ComplexValue; 4]) -> [[ComplexValue; 2]; 2] {
    let i = ComplexValue::i();
    let [a, b, c, d] = s;
    [
        [k.alpha * (a + k.theta * b), k.alpha * (c + k.theta * d)],
        [i * k.alpha_bar * (c + k.theta_bar * d), k.alpha_bar * (a + k.theta_bar * b)],
    ]
}

/// Builds the 4x4 codeword from its explicit formula.
pub fn encode_direct(s: &SymbolVector, variant: CodewordVariant) -> ComplexMatrix {
    let k = GoldenConstants::new();
    let s = &s.0;
    let (first, second) = match variant {
        CodewordVariant::Original => ([s[0], s[1], s[2], s[3]], [s[4], s[5], s[6], s[7]]),
        CodewordVariant::New => ([s[0], s[1], s[4], s[5]], [s[2], s[3], s[6], s[7]]),
    };
    let g1 = golden_block(&k, first);
    let g2 = golden_block(&k, second);
    let mut x = ComplexMatrix::zeros(TX_ANTENNAS, CHANNEL_USES);
    for r in 0..2 {
        for c in 0..2 {
            x[(r, c)] = g1[r][c] * k.scale;
            x[(r, c + 2)] = -g2[r][c].conj() * k.scale;
            x[(r + 2, c)] = g2[r][c] * k.scale;
            x[(r + 2, c + 2)] = g1[r][c].conj() * k.scale;
        }
    }
    x
}

/// Maps interleaved symbol reals to the interleaved, column-stacked codeword.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorMatrix {
    pub variant: CodewordVariant,
    pub g: RealMatrix,
}

impl GeneratorMatrix {
    /// `tilde(vec(X))` for the symbols in interleaved real form.
    pub fn encode_real(&self, s_real: &[f64]) -> Result<Vec<f64>> {
        self.g.matvec(s_real)
    }

    /// Sum of squared column norms, i.e. `trace(GᵀG)`.
    pub fn frobenius_sq(&self) -> f64 {
        self.g.as_slice().iter().map(|x| x * x).sum()
    }
}

/// Column `2j` encodes a unit real part on symbol `j`, column `2j+1` a unit
/// imaginary part.
pub fn build_generator(variant: CodewordVariant) -> GeneratorMatrix {
    let rows = 2 * TX_ANTENNAS * CHANNEL_USES;
    let mut g = RealMatrix::zeros(rows, REAL_DIMS);
    for col in 0..REAL_DIMS {
        let mut unit = [0.0; REAL_DIMS];
        unit[col] = 1.0;
        let s = SymbolVector::from_real(&unit).expect("16 reals");
        let image = tilde_interleave(&encode_direct(&s, variant).vec_stack());
        for (r, v) in image.into_iter().enumerate() {
            g[(r, col)] = v;
        }
    }
    GeneratorMatrix { variant, g }
}

/// Swaps `(s3, s4)` with `(s5, s6)` when the variants differ. The swap is
/// its own inverse.
pub fn permute_symbols(s: &SymbolVector, from: CodewordVariant, to: CodewordVariant) -> SymbolVector {
    if from == to {
        return *s;
    }
    let mut out = *s;
    out.0.swap(2, 4);
    out.0.swap(3, 5);
    out
}
