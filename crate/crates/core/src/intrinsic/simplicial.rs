use rand_distr::{Distribution, StandardNormal};

use super::cone::validate_generators;
use super::nnls::{Gram, Scratch};
use crate::mc::{proportion, MCEstimate};
use crate::parallel::{map_chunks, Sampling};
use crate::{Error, Result};

/// A coefficient counts as positive above this multiple of the sample norm.
pub const FACE_THRESHOLD: f64 = 1e-10;

/// Largest tolerated fraction of samples on which NNLS fails.
const MAX_EXCLUDED: f64 = 1e-3;

/// Face-dimension frequencies of a simplicial cone.
#[derive(Debug, Clone)]
pub struct FaceFrequencies {
    /// Estimates of `V_0, …, V_n` over the retained samples.
    pub estimates: Vec<MCEstimate>,
    /// Samples dropped because NNLS did not converge.
    pub excluded: u64,
}

/// Estimates the intrinsic volumes of the cone spanned by `generators` as
/// the distribution of the dimension of the face that a Gaussian point
/// projects into.
pub fn iv_mc_simplicial(generators: &[Vec<f64>], mc: &Sampling) -> Result<FaceFrequencies> {
    validate_generators(generators)?;
    if mc.samples == 0 {
        return Err(Error::domain("iv_mc_simplicial", "need at least one sample"));
    }
    let n = generators.len();
    let unit: Vec<Vec<f64>> = generators
        .iter()
        .map(|g| {
            let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
            g.iter().map(|x| x / norm).collect()
        })
        .collect();
    let gram = Gram::from_columns(&unit);

    let chunks = map_chunks(mc, |rng, len| {
        let mut counts = vec![0u64; n + 1];
        let mut failed = 0u64;
        let mut scratch = Scratch::default();
        let mut y = vec![0.0; n];
        let mut b = vec![0.0; n];
        for _ in 0..len {
            for yi in y.iter_mut() {
                *yi = StandardNormal.sample(rng);
            }
            for (bi, g) in b.iter_mut().zip(&unit) {
                *bi = g.iter().zip(&y).map(|(a, c)| a * c).sum();
            }
            match gram.solve(&b, &mut scratch) {
                Some(x) => {
                    let cut = FACE_THRESHOLD * y.iter().map(|v| v * v).sum::<f64>().sqrt();
                    counts[x.iter().filter(|&&c| c > cut).count()] += 1;
                }
                None => failed += 1,
            }
        }
        (counts, failed)
    });

    let mut counts = vec![0u64; n + 1];
    let mut excluded = 0;
    for (c, f) in chunks {
        for (t, x) in counts.iter_mut().zip(c) {
            *t += x;
        }
        excluded += f;
    }
    if excluded as f64 > MAX_EXCLUDED * mc.samples as f64 {
        return Err(Error::Nnls { failed: excluded, total: mc.samples });
    }
    let kept = mc.samples - excluded;
    let estimates = counts.iter().map(|&c| proportion(c, kept, mc.seed)).collect();
    Ok(FaceFrequencies { estimates, excluded })
}
