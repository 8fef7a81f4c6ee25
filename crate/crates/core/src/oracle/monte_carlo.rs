use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::lindblad::FluxCoefficients;
use crate::model::RefrigeratorParams;
use crate::photonstats::{DistributionKind, PhotonDistribution};

pub const MIN_SAMPLES: u64 = 1000;

/// Samples per independent generator stream.
const CHUNK: u64 = 1 << 14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: u64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Welford {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Welford {
    fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, other: Welford) -> Welford {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let n = self.n + other.n;
        let d = other.mean - self.mean;
        Welford {
            n,
            mean: self.mean + d * other.n as f64 / n as f64,
            m2: self.m2 + other.m2 + d * d * (self.n as f64 * other.n as f64) / n as f64,
        }
    }
}

/// Average of the branch flux over branch intensities drawn from the thermal
/// P function, u = |α|² ~ Exp(mean n̄).
///
/// Chunk i of 2¹⁴ samples uses ChaCha8 seeded with `seed` on stream i, and
/// chunk statistics are merged in index order, so the estimate is identical
/// for sequential and parallel execution.
pub fn monte_carlo_thermal_flux(
    p: &RefrigeratorParams,
    nbar_th: f64,
    samples: u64,
    seed: u64,
    exec: Execution,
) -> Result<MonteCarloEstimate> {
    if samples < MIN_SAMPLES {
        return Err(Error::Domain(format!(
            "need at least {MIN_SAMPLES} samples, got {samples}"
        )));
    }
    if !(nbar_th.is_finite() && nbar_th >= 0.0) {
        return Err(Error::invalid(
            "nbar_th",
            format!("must be finite and >= 0, got {nbar_th}"),
        ));
    }
    if nbar_th == 0.0 {
        return Ok(MonteCarloEstimate {
            mean: 0.0,
            std_error: 0.0,
            samples,
        });
    }
    let f = FluxCoefficients::new(p);
    let x_per_photon = p.xi0() * p.xi0();
    let law = Exp::new(1.0 / nbar_th).map_err(|e| Error::Domain(e.to_string()))?;
    let chunks = samples.div_ceil(CHUNK);
    let partial = exec.map_range(chunks as usize, |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64);
        let count = CHUNK.min(samples - i as u64 * CHUNK);
        let mut w = Welford::default();
        for _ in 0..count {
            let u: f64 = law.sample(&mut rng);
            w.push(f.flux_at_intensity(x_per_photon * u));
        }
        w
    });
    let total = partial.into_iter().fold(Welford::default(), Welford::merge);
    let var = total.m2 / (total.n - 1) as f64;
    Ok(MonteCarloEstimate {
        mean: total.mean,
        std_error: (var / total.n as f64).sqrt(),
        samples,
    })
}

/// Monte-Carlo flux for distributions whose P function is a probability
/// density: thermal light, and coherent light (a single branch intensity).
pub fn monte_carlo_flux(
    p: &RefrigeratorParams,
    dist: &PhotonDistribution,
    samples: u64,
    seed: u64,
    exec: Execution,
) -> Result<MonteCarloEstimate> {
    match dist.kind() {
        DistributionKind::Thermal(n) => monte_carlo_thermal_flux(p, *n, samples, seed, exec),
        DistributionKind::Coherent(n) => {
            if samples < MIN_SAMPLES {
                return Err(Error::Domain(format!(
                    "need at least {MIN_SAMPLES} samples, got {samples}"
                )));
            }
            Ok(MonteCarloEstimate {
                mean: crate::lindblad::coherent_flux(p, *n),
                std_error: 0.0,
                samples,
            })
        }
        _ => Err(Error::Domain(format!(
            "{} light has no sampleable P function",
            dist.statistic()
        ))),
    }
}
