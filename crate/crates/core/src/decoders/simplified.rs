//! Two-stage ML decoder for the New codeword.
//!
//! Stage one is a depth-first search over the last eight real dimensions
//! (symbols 5..8, the `[c, d]` block of `R`). At every leaf the remaining
//! eight dimensions split into four independent two-dimensional problems,
//! because `R₁₂ = 0` and `R₁₁`, `R₂₂` are half empty. Those four problems are
//! solved in lockstep by [`parallel_decisions`].

use crate::decoders::column_switch::plan_column_switch;
use crate::decoders::{check_diagonal, symbols_from_indices, to_tri16, DecodeResult, OpCounters, SwitchMode, Tri16};
use crate::error::Result;
use crate::mathcore::{gram_schmidt_qr, tilde_deinterleave, Flops, QrFactors, RealMatrix};
use crate::modem::{EnumerationTable, PamSet, QamConstellation};
use crate::stbc::{REAL_DIMS, SYMBOLS};

/// Real dimensions decided by the tree search.
const TREE_START: usize = REAL_DIMS / 2;

/// `(s1-role, s2-role)` real dimensions of the four parallel branches:
/// `(s₁ᴿ,s₂ᴿ)`, `(s₁ᴵ,s₂ᴵ)`, `(s₃ᴿ,s₄ᴿ)`, `(s₃ᴵ,s₄ᴵ)`.
pub const BRANCH_DIMS: [(usize, usize); 4] = [(0, 2), (1, 3), (4, 6), (5, 7)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SimplifiedOptions {
    pub switch: SwitchMode,
    /// Stop a branch once its partial distance plus the other branches'
    /// settled distances exceeds the radius.
    pub cross_branch_termination: bool,
}

impl SimplifiedOptions {
    pub fn new(switch: SwitchMode) -> Self {
        Self { switch, cross_branch_termination: true }
    }
}

/// Minimize `(v1 − diag1·s1 − off·s2)² + (v2 − diag2·s2)²` over `s1, s2 ∈ Ψ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchProblem {
    pub diag1: f64,
    pub off: f64,
    pub diag2: f64,
    pub v1: f64,
    pub v2: f64,
}

impl BranchProblem {
    pub fn metric(&self, s1: f64, s2: f64) -> f64 {
        let e1 = self.v1 - self.diag1 * s1 - self.off * s2;
        let e2 = self.v2 - self.diag2 * s2;
        e1 * e1 + e2 * e2
    }
}

/// The four branch problems for an interference-cancelled target `v`.
pub fn branch_problems(v: &[f64; 8], r: &Tri16) -> [BranchProblem; 4] {
    BRANCH_DIMS.map(|(p, q)| BranchProblem { diag1: r[p][p], off: r[p][q], diag2: r[q][q], v1: v[p], v2: v[q] })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchDecision {
    /// PAM indices `(s1, s2)` of the best pair found, if any was completed.
    pub best: Option<(usize, usize)>,
    pub distance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParallelDecision {
    pub branches: [BranchDecision; 4],
    /// Sum of the four branch distances.
    pub d_p: f64,
}

/// `v = z̃(1:8) − R(1:8, 9:16)·[c; d]`.
pub fn compute_v(z: &[f64], r: &Tri16, cd: &[f64; 8]) -> [f64; 8] {
    std::array::from_fn(|row| {
        let mut acc = z[row];
        for (k, &s) in cd.iter().enumerate() {
            acc -= r[row][TREE_START + k] * s;
        }
        acc
    })
}

#[derive(Clone, Copy)]
struct Branch {
    problem: BranchProblem,
    active: bool,
    settled: bool,
    s2: usize,
    tau: f64,
    p: f64,
    d: f64,
    best: Option<(usize, usize)>,
}

/// Solves the four branch problems in lockstep.
///
/// Iteration `k` first assigns the `k`-th `s2` candidate in every active
/// branch and applies the stopping tests, then slices `s1` conditionally in
/// the branches still running. `s2` candidates are visited in order of
/// increasing `|v2/diag2 − s2|`, so the partial distance `τ` never decreases
/// and stopping on `τ > p` is exact. A branch that has not settled yet
/// contributes nothing to the cross-branch test.
pub fn parallel_decisions(
    problems: &[BranchProblem; 4],
    pam: &PamSet,
    radius: f64,
    d_outer: f64,
    cross_branch_termination: bool,
    counters: &mut OpCounters,
) -> ParallelDecision {
    let mut orders = [pam.se_order_indices(0.0); 4];
    let mut branches = problems.map(|problem| Branch {
        problem,
        active: true,
        settled: false,
        s2: 0,
        tau: f64::INFINITY,
        p: f64::INFINITY,
        d: 0.0,
        best: None,
    });
    for (order, b) in orders.iter_mut().zip(&branches) {
        *order = pam.se_order_indices(b.problem.v2 / b.problem.diag2);
    }
    counters.divs += 4;

    for k in 0..pam.order() {
        for j in 0..4 {
            if !branches[j].active {
                continue;
            }
            let b = &mut branches[j];
            b.s2 = orders[j].get(k);
            counters.branch_nodes[j] += 1;
            let e2 = b.problem.v2 - b.problem.diag2 * pam.level(b.s2);
            b.tau = e2 * e2;
            counters.mults += 2;

            let tau = b.tau;
            let p = b.p;
            let others: f64 = (0..4).filter(|&i| i != j && branches[i].settled).map(|i| branches[i].d).sum();
            if tau > p || (cross_branch_termination && tau + others + d_outer > radius) {
                let b = &mut branches[j];
                b.active = false;
                b.settled = true;
                b.d = b.p;
            }
        }
        if branches.iter().all(|b| !b.active) {
            break;
        }
        for b in branches.iter_mut().filter(|b| b.active) {
            let pr = b.problem;
            let s2 = pam.level(b.s2);
            let w = pr.v1 - pr.off * s2;
            let s1 = pam.slice_index(w / pr.diag1);
            let e1 = w - pr.diag1 * pam.level(s1);
            let t = e1 * e1 + b.tau;
            counters.mults += 3;
            counters.divs += 1;
            if t < b.p {
                b.p = t;
                b.best = Some((s1, b.s2));
            }
        }
    }
    for b in branches.iter_mut().filter(|b| !b.settled) {
        b.settled = true;
        b.d = b.p;
    }
    let decisions = branches.map(|b| BranchDecision { best: b.best, distance: b.d });
    ParallelDecision { d_p: decisions.iter().map(|b| b.distance).sum(), branches: decisions }
}

struct TreeSearch<'a> {
    z: &'a [f64],
    r: &'a Tri16,
    pam: &'a PamSet,
    table: &'a EnumerationTable,
    cross: bool,
    /// Decided PAM indices for real dims 8..15.
    idx: [usize; TREE_START],
    val: [f64; TREE_START],
    best: Option<[usize; REAL_DIMS]>,
    radius: f64,
    counters: OpCounters,
}

impl TreeSearch<'_> {
    fn descend(&mut self, row: usize, dist: f64) {
        let local = row - TREE_START;
        let r_row = &self.r[row];
        let mut b = self.z[row];
        for (r, v) in r_row[row + 1..].iter().zip(&self.val[local + 1..]) {
            b -= r * v;
        }
        self.counters.mults += (REAL_DIMS - 1 - row) as u64;
        let diag = r_row[row];

        // the table order is fixed up front, so every sibling gets its own test
        for j in 0..self.pam.order() {
            let i = self.table.row(local).get(j);
            self.idx[local] = i;
            self.val[local] = self.pam.level(i);
            self.counters.tree_nodes += 1;
            let e = b - diag * self.val[local];
            let d_new = dist + e * e;
            self.counters.mults += 2;
            if d_new >= self.radius {
                continue;
            }
            if row > TREE_START {
                self.descend(row - 1, d_new);
            } else {
                self.leaf(d_new);
            }
        }
    }

    fn leaf(&mut self, d_new: f64) {
        self.counters.leaves += 1;
        let v = compute_v(self.z, self.r, &self.val);
        self.counters.mults += (TREE_START * TREE_START) as u64;
        let problems = branch_problems(&v, self.r);
        let pd = parallel_decisions(&problems, self.pam, self.radius, d_new, self.cross, &mut self.counters);
        let d_t = pd.d_p + d_new;
        if d_t < self.radius {
            let mut full = [0usize; REAL_DIMS];
            for (b, &(p, q)) in pd.branches.iter().zip(&BRANCH_DIMS) {
                let (s1, s2) = b.best.expect("finite branch distance implies a decision");
                full[p] = s1;
                full[q] = s2;
            }
            full[TREE_START..].copy_from_slice(&self.idx);
            self.best = Some(full);
            self.radius = d_t;
        }
    }
}

/// Decodes `ỹ` for the New codeword, factoring `H_eq` first.
pub fn simplified_ml(y: &[f64], h_eq: &RealMatrix, c: &QamConstellation, options: SimplifiedOptions) -> Result<DecodeResult> {
    let qr = gram_schmidt_qr(h_eq)?;
    simplified_ml_with_qr(y, h_eq, &qr, c, options)
}

/// Same as [`simplified_ml`] with the factorization of `H_eq` supplied.
///
/// The factorization cost is charged to the counters either way. When the
/// column switch picks a non-identity order, `H_eq` is refactored in the
/// switched column order and that second factorization is charged as well.
pub fn simplified_ml_with_qr(
    y: &[f64],
    h_eq: &RealMatrix,
    qr: &QrFactors,
    c: &QamConstellation,
    options: SimplifiedOptions,
) -> Result<DecodeResult> {
    let n = REAL_DIMS;
    let mut counters = OpCounters::default();
    counters.add_flops(QrFactors::cost(n, n));
    let z = qr.project(y)?;
    let zf_real = qr.back_substitute(&z)?;
    counters.add_flops(QrFactors::solve_cost(n, n));
    let mut s_zf = [Default::default(); SYMBOLS];
    s_zf.copy_from_slice(&tilde_deinterleave(&zf_real));

    let plan = plan_column_switch(&s_zf, c, options.switch);
    let switched;
    let (z, r, zf_real) = if plan.is_identity() {
        (z, &qr.r, zf_real)
    } else {
        let cols = plan.real_columns();
        switched = gram_schmidt_qr(&h_eq.select_columns(&cols))?;
        counters.add_flops(QrFactors::cost(n, n));
        counters.add_flops(Flops::new((n * n) as u64, 0));
        let zf: Vec<f64> = cols.iter().map(|&k| zf_real[k]).collect();
        (switched.project(y)?, &switched.r, zf)
    };
    let r = to_tri16(r)?;
    check_diagonal(&r)?;

    let pam = c.pam();
    let table = EnumerationTable::from_estimates(&zf_real[TREE_START..], pam);
    let mut search = TreeSearch {
        z: &z,
        r: &r,
        pam,
        table: &table,
        cross: options.cross_branch_termination,
        idx: [0; TREE_START],
        val: [0.0; TREE_START],
        best: None,
        radius: f64::INFINITY,
        counters,
    };
    search.descend(REAL_DIMS - 1, 0.0);

    let switched_idx = search.best.expect("an infinite radius admits the first leaf");
    let mut idx = [0usize; REAL_DIMS];
    for (k, &col) in plan.real_columns().iter().enumerate() {
        idx[col] = switched_idx[k];
    }
    Ok(DecodeResult { symbols: symbols_from_indices(&idx, c), metric: search.radius, counters: search.counters })
}
