//! Seeded Monte Carlo estimation of the permutation-sum law and Q for sizes
//! beyond the exact caps.
//!
//! Every sample index owns its own counter-derived generator stream, so the
//! multiset of sampled sums depends only on (seed, N). Workers merely split
//! the index range; merging tallies by value therefore gives bit-identical
//! results for any worker count.

use std::collections::BTreeMap;
use std::collections::HashMap;

use num_bigint::{BigInt, BigUint};

use crate::dist::scaling::IntegerPair;
use crate::dist::ExactDistribution;
use crate::error::{Error, Result};
use crate::multiset::WeightedMultiset;
use crate::rational::Rational;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64: the counter sequence `mix(state + k*gamma)`; non-cryptographic.
#[derive(Clone, Debug)]
struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    fn mix(mut z: u64) -> u64 {
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Stream for one sample: a bijective mix of (seed, index) picks the
    /// start of the counter sequence, so distinct indices never share it.
    fn stream(seed: u64, index: u64) -> Self {
        let s = Self::mix(seed.wrapping_add(GOLDEN_GAMMA));
        Self {
            state: Self::mix(s ^ index),
        }
    }

    fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        Self::mix(self.state)
    }

    /// Uniform draw below `bound` by masked rejection (no modulo bias).
    fn below(&mut self, bound: u64) -> u64 {
        debug_assert!(bound >= 1);
        let mask = bound.next_power_of_two().wrapping_sub(1);
        loop {
            let r = self.next_u64() & mask;
            if r < bound {
                return r;
            }
        }
    }
}

/// Fisher-Yates exchange shuffle; every permutation equally likely.
fn shuffle<T>(rng: &mut SplitMix64, xs: &mut [T]) {
    for i in (1..xs.len()).rev() {
        let j = rng.below((i + 1) as u64) as usize;
        xs.swap(i, j);
    }
}

/// Seed, sample count and logical worker count for one Monte Carlo run.
#[derive(Debug, Clone)]
pub struct SampleConfig {
    pub seed: u64,
    pub samples: u64,
    pub workers: u32,
}

impl Default for SampleConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            samples: 10_000,
            workers: 1,
        }
    }
}

/// Empirical max point mass with a Wilson 95% interval on the mode bin.
///
/// The estimator takes the largest of the sampled bin frequencies, so it is
/// biased upward for Q whenever the true mode is not the most-sampled value;
/// the interval is a per-bin heuristic, not a simultaneous band.
#[derive(Debug, Clone, PartialEq)]
pub struct QEstimate {
    /// mode count / N, exact.
    pub q_hat: Rational,
    /// Smallest value attaining the max tally.
    pub mode_value: Rational,
    pub ci_low: f64,
    pub ci_high: f64,
    pub samples: u64,
    pub seed: u64,
}

/// Tally N exact permutation sums into an empirical law with total N.
pub fn sample_distribution(
    a: &WeightedMultiset,
    b: &WeightedMultiset,
    cfg: &SampleConfig,
) -> Result<ExactDistribution> {
    if a.size() != b.size() {
        return Err(Error::SizeMismatch {
            left: a.size(),
            right: b.size(),
        });
    }
    if cfg.samples == 0 {
        return Err(Error::InvalidInput("sample count must be positive".into()));
    }
    if cfg.workers == 0 {
        return Err(Error::InvalidInput("worker count must be positive".into()));
    }
    let scaled = IntegerPair::from_multisets(a, b);
    let atoms = match scaled.narrow_i64() {
        Some((av, bv)) => {
            let tally = run_workers(cfg, &av, &bv, tally_range_i64);
            tally
                .into_iter()
                .map(|(k, c)| (Rational::new(BigInt::from(k), scaled.scale.clone()), c.into()))
                .collect::<BTreeMap<Rational, BigUint>>()
        }
        None => {
            let tally = run_workers(cfg, &scaled.a, &scaled.b, tally_range_big);
            tally
                .into_iter()
                .map(|(k, c)| (Rational::new(k, scaled.scale.clone()), c.into()))
                .collect::<BTreeMap<Rational, BigUint>>()
        }
    };
    ExactDistribution::from_counts(atoms)
}

fn run_workers<T, K>(
    cfg: &SampleConfig,
    av: &[T],
    bv: &[T],
    tally_range: fn(u64, std::ops::Range<u64>, &[T], &[T]) -> HashMap<K, u64>,
) -> HashMap<K, u64>
where
    T: Sync,
    K: std::hash::Hash + Eq + Send,
{
    let n_workers = (cfg.workers as u64).min(cfg.samples).max(1);
    if n_workers == 1 {
        return tally_range(cfg.seed, 0..cfg.samples, av, bv);
    }
    let chunk = cfg.samples.div_ceil(n_workers);
    let mut merged: HashMap<K, u64> = HashMap::new();
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for w in 0..n_workers {
            let lo = w * chunk;
            let hi = ((w + 1) * chunk).min(cfg.samples);
            if lo >= hi {
                continue;
            }
            handles.push(scope.spawn(move || tally_range(cfg.seed, lo..hi, av, bv)));
        }
        for h in handles {
            for (k, c) in h.join().expect("sampler worker panicked") {
                *merged.entry(k).or_insert(0) += c;
            }
        }
    });
    merged
}

fn tally_range_i64(
    seed: u64,
    range: std::ops::Range<u64>,
    av: &[i64],
    bv: &[i64],
) -> HashMap<i64, u64> {
    let mut tally = HashMap::new();
    let mut scratch = bv.to_vec();
    for idx in range {
        let mut rng = SplitMix64::stream(seed, idx);
        scratch.copy_from_slice(bv);
        shuffle(&mut rng, &mut scratch);
        let sum: i64 = av.iter().zip(&scratch).map(|(x, y)| x * y).sum();
        *tally.entry(sum).or_insert(0) += 1;
    }
    tally
}

fn tally_range_big(
    seed: u64,
    range: std::ops::Range<u64>,
    av: &[BigInt],
    bv: &[BigInt],
) -> HashMap<BigInt, u64> {
    let mut tally = HashMap::new();
    for idx in range {
        let mut rng = SplitMix64::stream(seed, idx);
        let mut scratch = bv.to_vec();
        shuffle(&mut rng, &mut scratch);
        let sum: BigInt = av.iter().zip(&scratch).map(|(x, y)| x * y).sum();
        *tally.entry(sum).or_insert(0) += 1;
    }
    tally
}

/// Wilson score interval at 95% for `successes` out of `n`.
fn wilson_interval(successes: u64, n: u64) -> (f64, f64) {
    const Z: f64 = 1.959_963_984_540_054;
    let nf = n as f64;
    let p = successes as f64 / nf;
    let z2 = Z * Z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = Z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Estimate Q as the largest sampled bin frequency.
pub fn estimate_q(
    a: &WeightedMultiset,
    b: &WeightedMultiset,
    cfg: &SampleConfig,
) -> Result<QEstimate> {
    let dist = sample_distribution(a, b, cfg)?;
    let report = dist.max_point_mass();
    let mode_count = dist
        .atoms()
        .get(&report.argmax)
        .expect("argmax is an atom")
        .clone();
    let count_u64: u64 = u64::try_from(&mode_count).expect("counts bounded by N");
    let (ci_low, ci_high) = if count_u64 == cfg.samples {
        // every sample hit one value: collapse to the degenerate interval
        (1.0, 1.0)
    } else {
        wilson_interval(count_u64, cfg.samples)
    };
    Ok(QEstimate {
        q_hat: report.q,
        mode_value: report.argmax,
        ci_low,
        ci_high,
        samples: cfg.samples,
        seed: cfg.seed,
    })
}

impl QEstimate {
    /// Emit `{"q_hat":"...","mode":"...","ci":[lo,hi],"N":...,"seed":...}`.
    pub fn to_json(&self) -> String {
        let dto = QEstimateJson {
            q_hat: self.q_hat.to_string(),
            mode: self.mode_value.to_string(),
            ci: [self.ci_low, self.ci_high],
            n: self.samples,
            seed: self.seed,
        };
        serde_json::to_string(&dto).expect("serializing plain fields")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let dto: QEstimateJson = serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("estimate JSON: {e}")))?;
        Ok(Self {
            q_hat: crate::rational::parse_rational(&dto.q_hat)?,
            mode_value: crate::rational::parse_rational(&dto.mode)?,
            ci_low: dto.ci[0],
            ci_high: dto.ci[1],
            samples: dto.n,
            seed: dto.seed,
        })
    }
}

#[derive(serde::Serialize, serde::Deserialize)]
struct QEstimateJson {
    q_hat: String,
    mode: String,
    ci: [f64; 2],
    #[serde(rename = "N")]
    n: u64,
    seed: u64,
}
