use rand::Rng as _;
use rand_distr::StandardNormal;
use serde_json::json;

use super::report::{LemmaReport, MarginTracker, LEMMA_TOL};
use crate::error::{Error, Result};
use crate::mixture::norm;
use crate::potential::{DissipativityBound, PowerPosterior};
use crate::rng::{self, Stream};

/// `count` points uniform in the ball `B(0, radius) ⊂ ℝ^d`.
pub fn uniform_ball(d: usize, radius: f64, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = rng::stream(seed, Stream::Lab);
    (0..count)
        .map(|_| {
            let mut v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
            let r = radius * rng.random::<f64>().powf(1.0 / d as f64) / norm(&v).max(f64::MIN_POSITIVE);
            v.iter_mut().for_each(|x| *x *= r);
            v
        })
        .collect()
}

/// Worst dissipativity margin over `samples` uniform points of the ball.
pub fn check_dissipativity_field(
    pp: &PowerPosterior,
    bound: DissipativityBound,
    radius: f64,
    samples: usize,
    seed: u64,
) -> Result<LemmaReport> {
    if !(radius > 0.0) || samples == 0 {
        return Err(Error::invalid("sweep", "need radius > 0 and samples > 0"));
    }
    let mut t = MarginTracker::new("dissipativity", LEMMA_TOL);
    for theta in uniform_ball(pp.dim(), radius, samples, seed) {
        let m = pp.dissipativity_margin(&theta, bound)?;
        t.record(m, || json!({ "theta": theta }));
    }
    t.finish(Some(seed), None)
}
