use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{tv_of_points, ReferenceDensity};
use crate::error::{check_dim, Error, Result};
use crate::potential::Potential;
use crate::rng::{self, Stream};
use crate::sampler::{Chain, SamplerConfig};

/// Fewer chains than this make the across-chain marginal too noisy to compare
/// against a reference.
pub const MIN_CHAINS: usize = 50;
const GROWTH: f64 = 1.5;

/// `0, 1, 2, 3, 5, 8, 12, …`: each checkpoint is `max(t + 1, ⌈1.5 t⌉)`, cut at
/// `max_steps`. Schedules for different horizons are nested.
pub fn checkpoint_schedule(max_steps: usize) -> Vec<usize> {
    let mut out = vec![0];
    let mut t = 0usize;
    loop {
        let next = ((t as f64 * GROWTH).ceil() as usize).max(t + 1);
        if next > max_steps {
            break;
        }
        out.push(next);
        t = next;
    }
    out
}

/// TV between the across-chain marginal and a reference at each checkpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingCurve {
    pub chains: usize,
    pub max_steps: usize,
    pub checkpoints: Vec<usize>,
    pub tv: Vec<f64>,
    /// Mean TV of an i.i.d. sample of `chains` draws from the reference: the
    /// floor below which the curve cannot be resolved.
    pub iid_floor: f64,
}

impl MixingCurve {
    /// First checkpoint whose TV is at most `eps`.
    pub fn estimate(&self, eps: f64) -> Option<usize> {
        self.checkpoints
            .iter()
            .zip(&self.tv)
            .find(|(_, &tv)| tv <= eps)
            .map(|(&t, _)| t)
    }
}

/// Runs `chains` independent chains (seeds `config.seed + k`) for up to
/// `max_steps` and records the across-chain TV at geometric checkpoints.
pub fn mixing_time_estimate<P: Potential + ?Sized>(
    target: &P,
    config: &SamplerConfig,
    reference: &ReferenceDensity,
    max_steps: usize,
    chains: usize,
) -> Result<MixingCurve> {
    check_dim(reference.dim(), target.dim())?;
    if chains < MIN_CHAINS {
        return Err(Error::invalid(
            "chains",
            format!("{chains} chains is below the minimum of {MIN_CHAINS}"),
        ));
    }
    let checkpoints = checkpoint_schedule(max_steps);
    let d = target.dim();
    let snapshots: Vec<Vec<f64>> = (0..chains as u64)
        .into_par_iter()
        .map(|k| -> Result<Vec<f64>> {
            let cfg = config.clone().with_seed(config.seed.wrapping_add(k));
            let mut chain = Chain::new(target, &cfg)?;
            let mut out = Vec::with_capacity(checkpoints.len() * d);
            let mut t = 0;
            for &cp in &checkpoints {
                while t < cp {
                    chain.advance();
                    t += 1;
                }
                out.extend_from_slice(chain.state());
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;

    let tv = (0..checkpoints.len())
        .map(|i| tv_of_points(snapshots.iter().map(|s| &s[i * d..(i + 1) * d]), reference))
        .collect::<Result<Vec<_>>>()?;
    Ok(MixingCurve {
        chains,
        max_steps,
        checkpoints,
        tv,
        iid_floor: iid_floor(reference, chains, config.seed, 20),
    })
}

fn iid_floor(reference: &ReferenceDensity, draws: usize, seed: u64, reps: usize) -> f64 {
    let mut rng = rng::stream(seed, Stream::Lab);
    let cdf: Vec<f64> = reference
        .masses()
        .iter()
        .scan(0.0, |acc, p| {
            *acc += p;
            Some(*acc)
        })
        .collect();
    let cells = cdf.len();
    let mut total = 0.0;
    for _ in 0..reps {
        let mut counts = vec![0u64; cells];
        for _ in 0..draws {
            let u: f64 = rng.random();
            let c = cdf.partition_point(|&v| v < u).min(cells - 1);
            counts[c] += 1;
        }
        total += 0.5
            * counts
                .iter()
                .zip(reference.masses())
                .map(|(&c, &p)| (c as f64 / draws as f64 - p).abs())
                .sum::<f64>();
    }
    total / reps as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_is_geometric_and_nested() {
        let s = checkpoint_schedule(20);
        assert_eq!(s, vec![0, 1, 2, 3, 5, 8, 12, 18]);
        let long = checkpoint_schedule(40);
        assert!(long.starts_with(&s));
        assert_eq!(checkpoint_schedule(0), vec![0]);
    }
}
