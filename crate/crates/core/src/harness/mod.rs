//! Monte-Carlo SNR sweeps, CSV output and text reports.

use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;

use crate::channel::{make_equivalent_with, sample_channel, transmit, NoiseConfig, RngStream};
use crate::decoders::{decoders_by_names, verify_channel_structure, Decoder, OpCounters, StructureReport, SwitchMode};
use crate::error::{Error, Result};
use crate::modem::{Modulation, QamConstellation};
use crate::stbc::{build_generator, encode_direct, CodewordVariant, GeneratorMatrix, SymbolVector, SYMBOLS};

pub mod report;

pub use report::{format_g, read_csv, rows_to_csv, summarize, write_csv, CSV_HEADER};

/// Gives up on a trial after this many consecutive unusable channel draws.
const MAX_RESAMPLES: u32 = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub modulation: Modulation,
    pub snr_start: f64,
    pub snr_stop: f64,
    pub snr_step: f64,
    pub trials: u64,
    pub decoders: Vec<String>,
    pub seed: u64,
    pub variant: CodewordVariant,
    /// Column switch used by the plain `simplified` decoder.
    pub switch: SwitchMode,
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.snr_step.is_finite() && self.snr_step > 0.0) {
            return Err(Error::Config(format!("snr step must be positive, got {}", self.snr_step)));
        }
        if !self.snr_start.is_finite() || !self.snr_stop.is_finite() || self.snr_stop < self.snr_start {
            return Err(Error::Config(format!("bad snr range {}..{}", self.snr_start, self.snr_stop)));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.decoders.is_empty() {
            return Err(Error::Config("no decoders given".into()));
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        decoders_by_names(&self.decoders, self.switch)?;
        Ok(())
    }

    pub fn snr_points(&self) -> Vec<f64> {
        let n = ((self.snr_stop - self.snr_start) / self.snr_step + 1e-9).floor() as usize + 1;
        (0..n).map(|k| self.snr_start + k as f64 * self.snr_step).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub decoder: String,
    pub snr_db: f64,
    pub trials: u64,
    pub symbol_errors: u64,
    pub ser: f64,
    pub cer: f64,
    pub mean_visited_nodes: f64,
    pub mean_mults: f64,
    pub mean_divs: f64,
    pub ci95_ser: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub rows: Vec<SweepRow>,
    /// Channel draws rejected because QR or a decoder reported a degenerate system.
    pub resamples: u64,
}

/// Integer sums over the trials of one SNR point, for one decoder.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Tally {
    symbol_errors: u64,
    codeword_errors: u64,
    visited: u64,
    mults: u64,
    divs: u64,
}

impl Tally {
    fn add(mut self, other: Tally) -> Tally {
        self.symbol_errors += other.symbol_errors;
        self.codeword_errors += other.codeword_errors;
        self.visited += other.visited;
        self.mults += other.mults;
        self.divs += other.divs;
        self
    }

    fn record(&mut self, errors: usize, counters: &OpCounters) {
        self.symbol_errors += errors as u64;
        self.codeword_errors += u64::from(errors > 0);
        self.visited += counters.visited_nodes();
        self.mults += counters.mults;
        self.divs += counters.divs;
    }
}

struct TrialContext<'a> {
    seed: u64,
    constellation: &'a QamConstellation,
    generator: &'a GeneratorMatrix,
    decoders: &'a [Arc<dyn Decoder>],
}

/// One trial: symbols, then channel, then noise, all from the trial's own stream.
fn run_trial(ctx: &TrialContext<'_>, trial: u64, noise: &NoiseConfig) -> Result<(Vec<Tally>, u64)> {
    let mut rng = RngStream::new(ctx.seed, trial).rng();
    let m = ctx.constellation.order();
    let symbols = SymbolVector(std::array::from_fn(|_| ctx.constellation.point(rng.random_range(0..m))));
    let x = encode_direct(&symbols, ctx.generator.variant);
    let mut resamples = 0u64;
    'draw: loop {
        if resamples > u64::from(MAX_RESAMPLES) {
            return Err(Error::Config(format!("trial {trial}: no usable channel after {MAX_RESAMPLES} draws")));
        }
        let h = sample_channel(&mut rng);
        let Ok(channel) = make_equivalent_with(&h, ctx.generator) else {
            resamples += 1;
            continue;
        };
        let rx = transmit(&x, &h, noise, &mut rng)?;
        let mut tallies = vec![Tally::default(); ctx.decoders.len()];
        for (tally, dec) in tallies.iter_mut().zip(ctx.decoders) {
            match dec.decode(&rx.y_real, &channel, ctx.constellation) {
                Ok(out) => tally.record(out.symbols.symbol_errors(&symbols), &out.counters),
                Err(Error::DegenerateChannel { .. }) | Err(Error::RankDeficient { .. }) => {
                    resamples += 1;
                    continue 'draw;
                }
                Err(e) => return Err(e),
            }
        }
        return Ok((tallies, resamples));
    }
}

/// Runs the configured decoders side by side with the registry decoders.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepOutput> {
    config.validate()?;
    let decoders = decoders_by_names(&config.decoders, config.switch)?;
    run_sweep_with(config, &decoders)
}

/// Runs a sweep with caller-supplied decoders; `config.decoders` is ignored.
pub fn run_sweep_with(config: &SweepConfig, decoders: &[Arc<dyn Decoder>]) -> Result<SweepOutput> {
    let run = || sweep_inner(config, decoders);
    match config.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(run),
        None => run(),
    }
}

fn sweep_inner(config: &SweepConfig, decoders: &[Arc<dyn Decoder>]) -> Result<SweepOutput> {
    let constellation = config.modulation.constellation();
    let generator = build_generator(config.variant);
    let ctx = TrialContext { seed: config.seed, constellation: &constellation, generator: &generator, decoders };
    let snrs = config.snr_points();

    let mut per_snr = Vec::with_capacity(snrs.len());
    let mut resamples = 0u64;
    for &snr in &snrs {
        let noise = NoiseConfig::from_snr_db(snr, &constellation, &generator);
        let zero = || (vec![Tally::default(); decoders.len()], 0u64);
        let merge = |(a, ra): (Vec<Tally>, u64), (b, rb): (Vec<Tally>, u64)| {
            (a.into_iter().zip(b).map(|(x, y)| x.add(y)).collect(), ra + rb)
        };
        let (tallies, r) = (0..config.trials)
            .into_par_iter()
            .map(|t| run_trial(&ctx, t, &noise))
            .try_reduce(zero, |a, b| Ok(merge(a, b)))?;
        resamples += r;
        per_snr.push(tallies);
    }

    let mut rows = Vec::with_capacity(decoders.len() * snrs.len());
    for (d, dec) in decoders.iter().enumerate() {
        for (s, &snr) in snrs.iter().enumerate() {
            rows.push(make_row(dec.name(), snr, config.trials, &per_snr[s][d]));
        }
    }
    Ok(SweepOutput { rows, resamples })
}

fn make_row(decoder: &str, snr_db: f64, trials: u64, t: &Tally) -> SweepRow {
    let n = trials as f64;
    let symbols = n * SYMBOLS as f64;
    let ser = t.symbol_errors as f64 / symbols;
    SweepRow {
        decoder: decoder.to_string(),
        snr_db,
        trials,
        symbol_errors: t.symbol_errors,
        ser,
        cer: t.codeword_errors as f64 / n,
        mean_visited_nodes: t.visited as f64 / n,
        mean_mults: t.mults as f64 / n,
        mean_divs: t.divs as f64 / n,
        ci95_ser: 1.96 * (ser * (1.0 - ser) / symbols).sqrt(),
    }
}

/// Worst structure violations over random channels, for both codeword variants.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureSummary {
    pub trials: u64,
    pub new: StructureReport,
    pub original: StructureReport,
}

impl StructureSummary {
    pub fn passed(&self) -> bool {
        self.new.all_hold()
    }
}

pub fn verify_structure(trials: u64, seed: u64) -> Result<StructureSummary> {
    let mut out = Vec::with_capacity(2);
    for variant in [CodewordVariant::New, CodewordVariant::Original] {
        let generator = build_generator(variant);
        let reports: Vec<StructureReport> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = RngStream::new(seed, t).rng();
                loop {
                    if let Ok(eq) = make_equivalent_with(&sample_channel(&mut rng), &generator) {
                        return verify_channel_structure(&eq);
                    }
                }
            })
            .collect();
        let worst = reports
            .iter()
            .fold(StructureReport { tolerance: crate::decoders::structure::STRUCTURE_TOLERANCE, ..Default::default() }, |a, b| a.merge(b));
        out.push(worst);
    }
    Ok(StructureSummary { trials, new: out[0], original: out[1] })
}
