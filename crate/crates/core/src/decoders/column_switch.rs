//! Zero-forcing estimate and the structure-preserving column switch.
//!
//! Only four symbol orders keep the zero pattern of `R` intact. The switch
//! picks the one that sends the half (and, in 2-by-2 mode, the pair) with
//! the larger zero-forcing slicing error to the tree-search stage.

use crate::decoders::SwitchMode;
use crate::error::Result;
use crate::mathcore::{solve_linear, tilde_deinterleave, ComplexValue, RealMatrix};
use crate::modem::{nearest_qam, QamConstellation};
use crate::stbc::{REAL_DIMS, SYMBOLS};

pub const IDENTITY: [usize; SYMBOLS] = [0, 1, 2, 3, 4, 5, 6, 7];
pub const SWAP_HALVES: [usize; SYMBOLS] = [4, 5, 6, 7, 0, 1, 2, 3];
pub const SWAP_PAIRS: [usize; SYMBOLS] = [2, 3, 0, 1, 6, 7, 4, 5];
pub const SWAP_BOTH: [usize; SYMBOLS] = [6, 7, 4, 5, 2, 3, 0, 1];

/// The only symbol orders under which the decoder's zero structure holds.
pub const ALLOWED_ORDERS: [[usize; SYMBOLS]; 4] = [IDENTITY, SWAP_HALVES, SWAP_PAIRS, SWAP_BOTH];

/// `H_eq⁻¹·ỹ` reassembled as eight complex values.
pub fn zf_estimate(y: &[f64], h_eq: &RealMatrix) -> Result<[ComplexValue; SYMBOLS]> {
    let x = solve_linear(h_eq, y)?;
    let mut out = [ComplexValue::new(0.0, 0.0); SYMBOLS];
    out.copy_from_slice(&tilde_deinterleave(&x));
    Ok(out)
}

/// Sums of `|Q(s_ZF) − s_ZF|²` over symbol ranges (1-based names).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct AggregateErrors {
    pub e12: f64,
    pub e34: f64,
    pub e14: f64,
    pub e56: f64,
    pub e78: f64,
    pub e58: f64,
}

impl AggregateErrors {
    pub fn compute(s_zf: &[ComplexValue; SYMBOLS], c: &QamConstellation) -> Self {
        let err: Vec<f64> = s_zf.iter().map(|&z| (nearest_qam(z, c) - z).norm_sqr()).collect();
        let e12 = err[0] + err[1];
        let e34 = err[2] + err[3];
        let e56 = err[4] + err[5];
        let e78 = err[6] + err[7];
        Self { e12, e34, e14: e12 + e34, e56, e78, e58: e56 + e78 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ColumnSwitchPlan {
    pub mode: SwitchMode,
    /// Position `p` of the switched order holds canonical symbol `permutation[p]`.
    pub permutation: [usize; SYMBOLS],
    pub epsilon: AggregateErrors,
}

impl ColumnSwitchPlan {
    pub fn identity(mode: SwitchMode) -> Self {
        Self { mode, permutation: IDENTITY, epsilon: AggregateErrors::default() }
    }

    pub fn is_identity(&self) -> bool {
        self.permutation == IDENTITY
    }

    /// Real column order of the switched `H_eq`; each symbol owns two columns.
    pub fn real_columns(&self) -> [usize; REAL_DIMS] {
        std::array::from_fn(|k| 2 * self.permutation[k / 2] + k % 2)
    }

    pub fn apply<T: Copy>(&self, canonical: &[T; SYMBOLS]) -> [T; SYMBOLS] {
        std::array::from_fn(|p| canonical[self.permutation[p]])
    }

    pub fn restore<T: Copy + Default>(&self, switched: &[T; SYMBOLS]) -> [T; SYMBOLS] {
        let mut out = [T::default(); SYMBOLS];
        for (p, &orig) in self.permutation.iter().enumerate() {
            out[orig] = switched[p];
        }
        out
    }
}

/// Chooses the symbol order from the zero-forcing slicing errors.
pub fn plan_column_switch(s_zf: &[ComplexValue; SYMBOLS], c: &QamConstellation, mode: SwitchMode) -> ColumnSwitchPlan {
    if mode == SwitchMode::None {
        return ColumnSwitchPlan::identity(mode);
    }
    let eps = AggregateErrors::compute(s_zf, c);
    let pairs = mode == SwitchMode::Swt2by2;
    // symbols 5..8 go to the tree search; within it the worse pair goes nearer the root
    let permutation = if eps.e14 < eps.e58 {
        if pairs && eps.e78 < eps.e56 {
            SWAP_PAIRS
        } else {
            IDENTITY
        }
    } else if pairs && eps.e34 < eps.e12 {
        SWAP_BOTH
    } else {
        SWAP_HALVES
    };
    ColumnSwitchPlan { mode, permutation, epsilon: eps }
}

/// Plans the switch and returns `H_eq` with its column pairs reordered.
pub fn column_switch(
    s_zf: &[ComplexValue; SYMBOLS],
    h_eq: &RealMatrix,
    c: &QamConstellation,
    mode: SwitchMode,
) -> (RealMatrix, ColumnSwitchPlan) {
    let plan = plan_column_switch(s_zf, c, mode);
    (h_eq.select_columns(&plan.real_columns()), plan)
}
