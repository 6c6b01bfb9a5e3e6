//! Depth-first real-valued sphere decoder with Schnorr-Euchner child
//! ordering, run to completion.

use crate::decoders::{check_diagonal, symbols_from_indices, to_tri16, DecodeResult, OpCounters, Tri16};
use crate::error::{Error, Result};
use crate::mathcore::RealMatrix;
use crate::modem::{PamSet, QamConstellation};
use crate::stbc::REAL_DIMS;

struct Search<'a> {
    z: &'a [f64],
    r: &'a Tri16,
    pam: &'a PamSet,
    idx: [usize; REAL_DIMS],
    val: [f64; REAL_DIMS],
    best: [usize; REAL_DIMS],
    radius: f64,
    counters: OpCounters,
}

impl Search<'_> {
    fn descend(&mut self, row: usize, dist: f64) {
        let r_row = &self.r[row];
        let mut b = self.z[row];
        for (r, v) in r_row[row + 1..].iter().zip(&self.val[row + 1..]) {
            b -= r * v;
        }
        let diag = r_row[row];
        let center = b / diag;
        self.counters.mults += (REAL_DIMS - 1 - row) as u64;
        self.counters.divs += 1;

        let order = self.pam.se_order_indices(center);
        for i in order.iter() {
            let level = self.pam.level(i);
            self.counters.tree_nodes += 1;
            self.counters.mults += 2;
            let e = b - diag * level;
            let d = dist + e * e;
            // children come in nondecreasing distance, so the first miss ends the level
            if d >= self.radius {
                break;
            }
            self.idx[row] = i;
            self.val[row] = level;
            if row == 0 {
                self.counters.leaves += 1;
                self.radius = d;
                self.best = self.idx;
            } else {
                self.descend(row - 1, d);
            }
        }
    }
}

/// ML decision for `‖z̃ − R·s̃‖²` over all 16 real dimensions.
///
/// Levels are expanded from the last row of `R` upward, children in
/// Schnorr-Euchner order around the conditional center, and the radius
/// shrinks to every leaf reached. Counters cover the search only.
pub fn sd_baseline(z: &[f64], r: &RealMatrix, c: &QamConstellation) -> Result<DecodeResult> {
    if z.len() != REAL_DIMS {
        return Err(Error::DimensionMismatch(format!("z has {} entries, expected 16", z.len())));
    }
    let r = to_tri16(r)?;
    check_diagonal(&r)?;
    let mut search = Search {
        z,
        r: &r,
        pam: c.pam(),
        idx: [0; REAL_DIMS],
        val: [0.0; REAL_DIMS],
        best: [0; REAL_DIMS],
        radius: f64::INFINITY,
        counters: OpCounters::default(),
    };
    search.descend(REAL_DIMS - 1, 0.0);
    Ok(DecodeResult {
        symbols: symbols_from_indices(&search.best, c),
        metric: search.radius,
        counters: search.counters,
    })
}
