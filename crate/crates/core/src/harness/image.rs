//! Grayscale completion from a random subset of pixels.

use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{best_rank_k, DenseMatrix};
use crate::operators::{LinearOperator, MaskOperator};
use crate::solvers::{solve, SolveReport, SolverConfig};

/// Parses a binary 8-bit PGM (`P5`) into a `height x width` matrix of pixel values.
pub fn parse_pgm(bytes: &[u8]) -> Result<DenseMatrix<f64>> {
    let mut pos = 0;
    let mut token = || -> Result<String> {
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            break;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::Image("truncated header".into()));
        }
        Ok(String::from_utf8_lossy(&bytes[start..pos]).into_owned())
    };
    if token()? != "P5" {
        return Err(Error::Image("not a binary PGM (missing P5 magic)".into()));
    }
    let mut number = |what: &str| -> Result<usize> {
        token()?
            .parse::<usize>()
            .map_err(|_| Error::Image(format!("bad {what}")))
    };
    let width = number("width")?;
    let height = number("height")?;
    let maxval = number("maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::Image("zero image dimension".into()));
    }
    if maxval == 0 || maxval > 255 {
        return Err(Error::Image(format!("only 8-bit PGM is supported, maxval = {maxval}")));
    }
    // exactly one whitespace byte separates the header from the raster
    let data_start = pos + 1;
    let need = width * height;
    if bytes.len() < data_start + need {
        return Err(Error::Image(format!(
            "raster has {} bytes, expected {need}",
            bytes.len().saturating_sub(data_start)
        )));
    }
    let raster = &bytes[data_start..data_start + need];
    DenseMatrix::from_vec(height, width, raster.iter().map(|&b| b as f64).collect())
}

pub fn read_pgm(path: impl AsRef<Path>) -> Result<DenseMatrix<f64>> {
    parse_pgm(&fs::read(path)?)
}

/// Encodes `img` as binary PGM, clamping and rounding to `0..=255`.
pub fn encode_pgm(img: &DenseMatrix<f64>) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.cols(), img.rows()).into_bytes();
    out.extend(img.as_slice().iter().map(|&v| v.round().clamp(0.0, 255.0) as u8));
    out
}

pub fn write_pgm(path: impl AsRef<Path>, img: &DenseMatrix<f64>) -> Result<()> {
    fs::write(path, encode_pgm(img))?;
    Ok(())
}

/// What the SNR is measured against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SnrReference {
    /// The image itself.
    Original,
    /// Its best rank-`k` approximation; the image is replaced by it before sampling.
    BestRankK,
}

/// `20 log10(‖X_ref‖_F / ‖X̂ − X_ref‖_F)`; infinite for an exact match.
pub fn snr_db(reference: &DenseMatrix<f64>, estimate: &DenseMatrix<f64>) -> f64 {
    let err = (estimate - reference).frobenius_norm();
    20.0 * (reference.frobenius_norm() / err).log10()
}

#[derive(Clone, Debug)]
pub struct DenoiseOutcome {
    pub estimate: DenseMatrix<f64>,
    pub reference: DenseMatrix<f64>,
    pub snr_db: f64,
    pub observed: usize,
    pub report: SolveReport,
}

/// Completes `image` from `round(observe_fraction · m n)` uniformly sampled pixels.
pub fn denoise_matrix(
    image: &DenseMatrix<f64>,
    k: usize,
    observe_fraction: f64,
    config: &SolverConfig,
    seed: u64,
    reference: SnrReference,
) -> Result<DenoiseOutcome> {
    let (m, n) = image.shape();
    if k == 0 || k > m.min(n) {
        return Err(Error::InvalidRank { k, max: m.min(n) });
    }
    if !(observe_fraction > 0.0 && observe_fraction <= 1.0) {
        return Err(Error::InvalidInput(format!(
            "observe fraction must be in (0, 1], got {observe_fraction}"
        )));
    }
    let target = match reference {
        SnrReference::Original => image.clone(),
        SnrReference::BestRankK => best_rank_k(image, k)?.1,
    };
    let p = ((observe_fraction * (m * n) as f64).round() as usize).clamp(1, m * n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let op = MaskOperator::random(m, n, p, &mut rng)?;
    let y = op.apply(&target)?;
    let mut config = config.clone();
    config.k = k;
    let (estimate, report) = solve(&op, &y, &config, Some(&target))?;
    Ok(DenoiseOutcome {
        snr_db: snr_db(&target, &estimate),
        estimate,
        reference: target,
        observed: p,
        report,
    })
}

/// [`denoise_matrix`] on a PGM file.
pub fn denoise_image(
    path: impl AsRef<Path>,
    k: usize,
    observe_fraction: f64,
    config: &SolverConfig,
    seed: u64,
    reference: SnrReference,
) -> Result<DenoiseOutcome> {
    denoise_matrix(&read_pgm(path)?, k, observe_fraction, config, seed, reference)
}
