//! Quasi-static Rayleigh flat fading, AWGN and the equivalent real model
//! `ỹ = H_eq·s̃ + w̃` with `H_eq = (I_4 ⊗ Ȟ)·G`.
//!
//! SNR convention: average received signal energy per receive antenna per
//! channel use divided by the complex noise variance `2·σ²`. With
//! `E|h|² = 1` that signal energy is `‖G‖²_F · E[(s^R)²] / T`, which is 4
//! for unit-energy symbols and the 3D MIMO generator.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::mathcore::{
    check_expand_matrix, gram_schmidt_qr, kron_identity_apply, tilde_interleave, ComplexMatrix,
    QrFactors, RealMatrix,
};
use crate::modem::QamConstellation;
use crate::stbc::{build_generator, CodewordVariant, GeneratorMatrix, CHANNEL_USES, REAL_DIMS, TX_ANTENNAS};

pub const RX_ANTENNAS: usize = 2;

/// A reproducible random stream: one ChaCha8 key per seed, one stream per id.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub h: ComplexMatrix,
}

/// Draws a 2x4 channel with i.i.d. CN(0, 1) entries.
pub fn sample_channel<R: Rng + ?Sized>(rng: &mut R) -> ChannelRealization {
    let std = std::f64::consts::FRAC_1_SQRT_2;
    let data = (0..RX_ANTENNAS * TX_ANTENNAS)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(std * re, std * im)
        })
        .collect();
    ChannelRealization {
        h: ComplexMatrix::from_row_major(RX_ANTENNAS, TX_ANTENNAS, data).expect("2x4 entries"),
    }
}

/// `H_eq` for one channel realization, together with its QR factors.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalentChannel {
    pub h_eq: RealMatrix,
    pub qr: QrFactors,
    pub source: ChannelRealization,
    pub variant: CodewordVariant,
}

pub fn make_equivalent(h: &ChannelRealization, variant: CodewordVariant) -> Result<EquivalentChannel> {
    make_equivalent_with(h, &build_generator(variant))
}

pub fn make_equivalent_with(h: &ChannelRealization, generator: &GeneratorMatrix) -> Result<EquivalentChannel> {
    let h_eq = kron_identity_apply(&check_expand_matrix(&h.h), CHANNEL_USES, &generator.g)?;
    let qr = gram_schmidt_qr(&h_eq)?;
    Ok(EquivalentChannel { h_eq, qr, source: h.clone(), variant: generator.variant })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseConfig {
    pub snr_db: f64,
    /// Noise variance per real dimension.
    pub sigma2: f64,
}

impl NoiseConfig {
    pub fn from_snr_db(snr_db: f64, constellation: &QamConstellation, generator: &GeneratorMatrix) -> Self {
        Self { snr_db, sigma2: snr_to_sigma2(snr_db, constellation, generator) }
    }
}

/// Average received signal energy per receive antenna per channel use.
pub fn received_signal_energy(constellation: &QamConstellation, generator: &GeneratorMatrix) -> f64 {
    let points = constellation.points();
    let per_real = points.iter().map(|p| p.re * p.re).sum::<f64>() / points.len() as f64;
    generator.frobenius_sq() * per_real / CHANNEL_USES as f64
}

pub fn snr_to_sigma2(snr_db: f64, constellation: &QamConstellation, generator: &GeneratorMatrix) -> f64 {
    let es = received_signal_energy(constellation, generator);
    es / (2.0 * 10f64.powf(snr_db / 10.0))
}

pub fn sigma2_to_snr(sigma2: f64, constellation: &QamConstellation, generator: &GeneratorMatrix) -> f64 {
    let es = received_signal_energy(constellation, generator);
    10.0 * (es / (2.0 * sigma2)).log10()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Received {
    pub y: ComplexMatrix,
    /// `tilde(vec(Y))`.
    pub y_real: [f64; REAL_DIMS],
}

/// `Y = H·X + W` with `W` i.i.d. complex Gaussian of variance `2·σ²`.
pub fn transmit<R: Rng + ?Sized>(
    x: &ComplexMatrix,
    h: &ChannelRealization,
    noise: &NoiseConfig,
    rng: &mut R,
) -> Result<Received> {
    let hx = h.h.matmul(x)?;
    let std = noise.sigma2.sqrt();
    let w_data = (0..hx.rows() * hx.cols())
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(std * re, std * im)
        })
        .collect();
    let w = ComplexMatrix::from_row_major(hx.rows(), hx.cols(), w_data)?;
    let y = hx.add(&w)?;
    let mut y_real = [0.0; REAL_DIMS];
    y_real.copy_from_slice(&tilde_interleave(&y.vec_stack()));
    Ok(Received { y, y_real })
}
