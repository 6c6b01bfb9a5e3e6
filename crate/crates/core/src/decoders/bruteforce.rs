//! Exhaustive ML search over all `M⁸` symbol vectors.

use crate::decoders::{symbols_from_indices, DecodeResult, OpCounters};
use crate::error::{Error, Result};
use crate::mathcore::RealMatrix;
use crate::modem::QamConstellation;
use crate::stbc::{REAL_DIMS, SYMBOLS};

const HALF: usize = SYMBOLS / 2;

/// Contribution `H_eq[:, cols]·s̃` of every combination of four symbols,
/// in lexicographic symbol-index order.
fn half_images(h_eq: &RealMatrix, first_col: usize, c: &QamConstellation) -> Vec<[f64; REAL_DIMS]> {
    let m = c.order();
    let combos = m.pow(HALF as u32);
    let mut out = Vec::with_capacity(combos);
    for combo in 0..combos {
        let mut img = [0.0; REAL_DIMS];
        for k in 0..HALF {
            let idx = (combo / m.pow((HALF - 1 - k) as u32)) % m;
            let p = c.point(idx);
            let col = first_col + 2 * k;
            for (r, v) in img.iter_mut().enumerate() {
                *v += h_eq[(r, col)] * p.re + h_eq[(r, col + 1)] * p.im;
            }
        }
        out.push(img);
    }
    out
}

/// Exact `argmin ‖ỹ − H_eq·s̃‖²` over `Θ⁸`.
///
/// Candidates are scanned in lexicographic order of their symbol indices
/// (`s1` most significant) and a later candidate replaces the incumbent only
/// on a strictly smaller metric. Only QPSK is accepted.
pub fn ml_bruteforce(y: &[f64], h_eq: &RealMatrix, c: &QamConstellation) -> Result<DecodeResult> {
    if c.order() > 4 {
        return Err(Error::SearchTooLarge(c.order()));
    }
    if y.len() != REAL_DIMS || h_eq.rows() != REAL_DIMS || h_eq.cols() != REAL_DIMS {
        return Err(Error::DimensionMismatch("brute force expects a 16-dim system".into()));
    }
    let m = c.order();
    let combos = m.pow(HALF as u32);
    let front = half_images(h_eq, 0, c);
    let back = half_images(h_eq, REAL_DIMS / 2, c);

    let mut best = (f64::INFINITY, 0usize, 0usize);
    for (i, a) in front.iter().enumerate() {
        let mut resid = [0.0; REAL_DIMS];
        for r in 0..REAL_DIMS {
            resid[r] = y[r] - a[r];
        }
        for (j, b) in back.iter().enumerate() {
            let mut metric = 0.0;
            for r in 0..REAL_DIMS {
                let e = resid[r] - b[r];
                metric += e * e;
            }
            if metric < best.0 {
                best = (metric, i, j);
            }
        }
    }

    let mut pam_idx = [0usize; REAL_DIMS];
    let side = c.pam().order();
    for (half, combo) in [best.1, best.2].into_iter().enumerate() {
        for k in 0..HALF {
            let idx = (combo / m.pow((HALF - 1 - k) as u32)) % m;
            let sym = half * HALF + k;
            pam_idx[2 * sym] = idx / side;
            pam_idx[2 * sym + 1] = idx % side;
        }
    }

    let total = (combos * combos) as u64;
    let counters = OpCounters {
        tree_nodes: total,
        leaves: total,
        // two half tables of 16 rows x 8 columns each, one square per residual entry
        mults: 2 * combos as u64 * (REAL_DIMS * REAL_DIMS / 2) as u64 + total * REAL_DIMS as u64,
        ..Default::default()
    };
    Ok(DecodeResult { symbols: symbols_from_indices(&pam_idx, c), metric: best.0, counters })
}
