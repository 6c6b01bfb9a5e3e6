//! Acceptance suite. Runs every criterion, prints one line each, and exits
//! nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use mimo3d::channel::{make_equivalent, sample_channel, snr_to_sigma2, EquivalentChannel, RngStream};
use mimo3d::decoders::simplified::{parallel_decisions, BranchProblem, SimplifiedOptions};
use mimo3d::decoders::{
    ml_bruteforce, sd_baseline, simplified_ml, verify_channel_structure, OpCounters, SwitchMode,
};
use mimo3d::harness::{rows_to_csv, run_sweep, SweepConfig, SweepRow};
use mimo3d::modem::{build_qam, Modulation, PamSet, QamConstellation};
use mimo3d::stbc::{build_generator, CodewordVariant, SymbolVector};

const MODES: [SwitchMode; 3] = [SwitchMode::None, SwitchMode::Swt4by4, SwitchMode::Swt2by2];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Tracks the hard search bounds over every simplified decode in the suite.
#[derive(Default)]
struct Bounds {
    decodes: u64,
    violations: u64,
    max_leaf_fraction: f64,
}

impl Bounds {
    fn check(&mut self, c: &QamConstellation, k: &OpCounters) {
        let m = c.order() as u64;
        let sqrt_m = c.pam().order() as u64;
        self.decodes += 1;
        let leaves_ok = k.leaves >= 1 && k.leaves <= m.pow(4);
        let branch_ok = k.branch_nodes.iter().all(|&n| n <= sqrt_m * k.leaves);
        if !(leaves_ok && branch_ok) {
            self.violations += 1;
        }
        self.max_leaf_fraction = self.max_leaf_fraction.max(k.leaves as f64 / m.pow(4) as f64);
    }
}

fn instance(rng: &mut ChaCha8Rng, c: &QamConstellation, snr: f64) -> (EquivalentChannel, SymbolVector, Vec<f64>) {
    let g = build_generator(CodewordVariant::New);
    let eq = loop {
        if let Ok(eq) = make_equivalent(&sample_channel(rng), CodewordVariant::New) {
            break eq;
        }
    };
    let s = SymbolVector(std::array::from_fn(|_| c.point(rng.random_range(0..c.order()))));
    let sigma = snr_to_sigma2(snr, c, &g).sqrt();
    let y = eq
        .h_eq
        .matvec(&s.to_real())
        .unwrap()
        .into_iter()
        .map(|v| v + sigma * rng.sample::<f64, _>(StandardNormal))
        .collect();
    (eq, s, y)
}

fn zero_structure_of_r() -> Outcome {
    let start = Instant::now();
    let mut rng = RngStream::new(1001, 0).rng();
    let mut failures = 0;
    let mut worst = (0.0f64, 0.0f64);
    for _ in 0..10_000 {
        let eq = make_equivalent(&sample_channel(&mut rng), CodewordVariant::New).unwrap();
        let rep = verify_channel_structure(&eq);
        if !rep.all_hold() {
            failures += 1;
        }
        worst.0 = worst.0.max(rep.r12.max(rep.r11).max(rep.r22));
        worst.1 = worst.1.max(rep.gram.unwrap());
    }
    let elapsed = start.elapsed();
    outcome(
        failures == 0 && elapsed < Duration::from_secs(30),
        format!(
            "10000 channels, {failures} failing, worst R zero {:.2e}, worst Gram {:.2e}, {:.1}s",
            worst.0,
            worst.1,
            elapsed.as_secs_f64()
        ),
    )
}

fn ml_optimality_qpsk(bounds: &mut Bounds) -> Outcome {
    let start = Instant::now();
    let c = build_qam(4).unwrap();
    let mut rng = RngStream::new(1002, 0).rng();
    let mut mismatches = 0;
    let mut worst = 0.0f64;
    for trial in 0..1000 {
        let snr = 20.0 * trial as f64 / 999.0;
        let (eq, _, y) = instance(&mut rng, &c, snr);
        let ml = ml_bruteforce(&y, &eq.h_eq, &c).unwrap();
        for mode in MODES {
            let out = simplified_ml(&y, &eq.h_eq, &c, SimplifiedOptions::new(mode)).unwrap();
            bounds.check(&c, &out.counters);
            let diff = (out.metric - ml.metric).abs();
            worst = worst.max(diff);
            if diff > 1e-9 {
                mismatches += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        mismatches == 0 && elapsed < Duration::from_secs(600),
        format!("1000 instances x 3 modes, {mismatches} mismatches, max |diff| {worst:.2e}, {:.1}s", elapsed.as_secs_f64()),
    )
}

fn ml_optimality_16qam(bounds: &mut Bounds) -> Outcome {
    let c = build_qam(16).unwrap();
    let mut rng = RngStream::new(1003, 0).rng();
    let mut mismatches = 0;
    let mut worst = 0.0f64;
    for trial in 0..200 {
        let snr = 8.0 + 12.0 * trial as f64 / 199.0;
        let (eq, _, y) = instance(&mut rng, &c, snr);
        let z = eq.qr.project(&y).unwrap();
        let sd = sd_baseline(&z, &eq.qr.r, &c).unwrap();
        for mode in MODES {
            let out = simplified_ml(&y, &eq.h_eq, &c, SimplifiedOptions::new(mode)).unwrap();
            bounds.check(&c, &out.counters);
            let diff = (out.metric - sd.metric).abs();
            worst = worst.max(diff);
            if diff > 1e-9 {
                mismatches += 1;
            }
        }
    }
    outcome(mismatches == 0, format!("200 instances x 3 modes, {mismatches} mismatches, max |diff| {worst:.2e}"))
}

fn exhaustive_branch(pr: &BranchProblem, pam: &PamSet) -> f64 {
    let mut best = f64::INFINITY;
    for s1 in pam.levels() {
        for s2 in pam.levels() {
            best = best.min(pr.metric(*s1, *s2));
        }
    }
    best
}

fn branch_oracle() -> Outcome {
    let mut rng = RngStream::new(1004, 0).rng();
    let mut mismatches = 0;
    let mut over_budget = 0;
    let mut fixtures = 0;
    for (order, count) in [(4usize, 2500), (16, 5000), (64, 2500)] {
        let c = build_qam(order).unwrap();
        let pam = c.pam();
        for _ in 0..count {
            // a random upper triangle gives realistic diagonal and coupling magnitudes
            let eq = make_equivalent(&sample_channel(&mut rng), CodewordVariant::New).unwrap();
            let r = &eq.qr.r;
            let problems: [BranchProblem; 4] = std::array::from_fn(|j| {
                let (p, q) = mimo3d::decoders::simplified::BRANCH_DIMS[j];
                BranchProblem {
                    diag1: r[(p, p)],
                    off: r[(p, q)],
                    diag2: r[(q, q)],
                    v1: rng.random_range(-3.0..3.0),
                    v2: rng.random_range(-3.0..3.0),
                }
            });
            let mut k = OpCounters::default();
            let out = parallel_decisions(&problems, pam, f64::INFINITY, 0.0, true, &mut k);
            if k.branch_nodes.iter().any(|&n| n as usize > pam.order()) {
                over_budget += 1;
            }
            for (pr, dec) in problems.iter().zip(&out.branches) {
                let want = exhaustive_branch(pr, pam);
                let (s1, s2) = dec.best.unwrap();
                let got = pr.metric(pam.level(s1), pam.level(s2));
                if (got - want).abs() > 1e-12 || (dec.distance - want).abs() > 1e-12 {
                    mismatches += 1;
                }
            }
            fixtures += 1;
        }
    }
    outcome(
        mismatches == 0 && over_budget == 0,
        format!("{fixtures} fixtures (4 branches each), {mismatches} mismatches, {over_budget} over the candidate budget"),
    )
}

fn complexity_bounds(bounds: &mut Bounds) -> Outcome {
    for (order, snr) in [(4usize, 0.0), (16, 0.0), (16, 8.0)] {
        let c = build_qam(order).unwrap();
        let mut rng = RngStream::new(1005, order as u64).rng();
        for _ in 0..1000 {
            let (eq, _, y) = instance(&mut rng, &c, snr);
            for mode in MODES {
                for cross in [true, false] {
                    let opts = SimplifiedOptions { switch: mode, cross_branch_termination: cross };
                    let out = simplified_ml(&y, &eq.h_eq, &c, opts).unwrap();
                    bounds.check(&c, &out.counters);
                }
            }
        }
    }
    outcome(
        bounds.violations == 0,
        format!(
            "{} decodes, {} violations, largest leaves/M^4 {:.3e}",
            bounds.decodes, bounds.violations, bounds.max_leaf_fraction
        ),
    )
}

fn sweep(modulation: Modulation, snr: f64, decoders: &[&str], seed: u64, trials: u64) -> Vec<SweepRow> {
    let config = SweepConfig {
        modulation,
        snr_start: snr,
        snr_stop: snr,
        snr_step: 1.0,
        trials,
        decoders: decoders.iter().map(|s| s.to_string()).collect(),
        seed,
        variant: CodewordVariant::New,
        switch: SwitchMode::None,
        threads: None,
    };
    run_sweep(&config).unwrap().rows
}

fn nodes(rows: &[SweepRow], name: &str) -> f64 {
    rows.iter().find(|r| r.decoder == name).unwrap().mean_visited_nodes
}

fn complexity_trend() -> Outcome {
    let q = sweep(Modulation::Qpsk, 0.0, &["sd-baseline", "simplified-cs2"], 1006, 10_000);
    let s = sweep(Modulation::Qam16, 8.0, &["sd-baseline", "simplified-cs2"], 1006, 10_000);
    let rq = nodes(&q, "simplified-cs2") / nodes(&q, "sd-baseline");
    let rs = nodes(&s, "simplified-cs2") / nodes(&s, "sd-baseline");
    outcome(
        rq <= 0.6 && rs <= 0.4,
        format!(
            "QPSK 0 dB {:.1} vs {:.1} nodes (ratio {rq:.3}, need <= 0.6); 16-QAM 8 dB {:.1} vs {:.1} (ratio {rs:.3}, need <= 0.4)",
            nodes(&q, "simplified-cs2"),
            nodes(&q, "sd-baseline"),
            nodes(&s, "simplified-cs2"),
            nodes(&s, "sd-baseline")
        ),
    )
}

fn column_switch_benefit() -> Outcome {
    let rows = sweep(Modulation::Qpsk, 0.0, &["simplified", "simplified-cs2"], 1007, 10_000);
    let (plain, cs2) = (nodes(&rows, "simplified"), nodes(&rows, "simplified-cs2"));
    let gain = 1.0 - cs2 / plain;
    outcome(gain >= 0.15, format!("QPSK 0 dB {cs2:.1} vs {plain:.1} nodes, reduction {:.1}% (need >= 15%)", 100.0 * gain))
}

fn ser_sanity() -> Outcome {
    let c = build_qam(4).unwrap();
    let mut rng = RngStream::new(1008, 0).rng();
    let mut differing = 0;
    for trial in 0..1000 {
        let (eq, s, y) = instance(&mut rng, &c, (trial % 5) as f64 * 2.5);
        let ml = ml_bruteforce(&y, &eq.h_eq, &c).unwrap();
        let out = simplified_ml(&y, &eq.h_eq, &c, SimplifiedOptions::new(SwitchMode::Swt2by2)).unwrap();
        if out.symbols != ml.symbols || out.symbols.symbol_errors(&s) != ml.symbols.symbol_errors(&s) {
            differing += 1;
        }
    }
    let rows = sweep(Modulation::Qam16, 12.0, &["sd-baseline", "simplified-cs2"], 1008, 2000);
    let (base, simp) = (&rows[0], &rows[1]);
    outcome(
        differing == 0 && simp.ser <= base.ser,
        format!(
            "QPSK: {differing}/1000 trials with differing decisions; 16-QAM 12 dB SER {} (simplified) vs {} (sphere)",
            simp.ser, base.ser
        ),
    )
}

fn determinism() -> Outcome {
    let mut config = SweepConfig {
        modulation: Modulation::Qam16,
        snr_start: 6.0,
        snr_stop: 14.0,
        snr_step: 4.0,
        trials: 300,
        decoders: ["sd-baseline", "simplified", "simplified-cs4", "simplified-cs2"].map(String::from).to_vec(),
        seed: 1009,
        variant: CodewordVariant::New,
        switch: SwitchMode::None,
        threads: Some(1),
    };
    let a = rows_to_csv(&run_sweep(&config).unwrap().rows).unwrap();
    let b = rows_to_csv(&run_sweep(&config).unwrap().rows).unwrap();
    config.threads = Some(4);
    let c = rows_to_csv(&run_sweep(&config).unwrap().rows).unwrap();
    outcome(a == b && a == c, format!("{} bytes; repeat identical: {}; 1 vs 4 threads identical: {}", a.len(), a == b, a == c))
}

fn main() -> ExitCode {
    let mut bounds = Bounds::default();
    let results = [
        ("1 structure of R", zero_structure_of_r()),
        ("2 ML optimality, QPSK", ml_optimality_qpsk(&mut bounds)),
        ("3 ML optimality, 16-QAM", ml_optimality_16qam(&mut bounds)),
        ("4 branch oracle", branch_oracle()),
        ("5 complexity bounds", complexity_bounds(&mut bounds)),
        ("6 complexity trend", complexity_trend()),
        ("7 column-switch benefit", column_switch_benefit()),
        ("8 SER sanity", ser_sanity()),
        ("9 determinism", determinism()),
    ];
    let mut failed = 0;
    for (name, o) in &results {
        println!("criterion {name}: {} ({})", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
