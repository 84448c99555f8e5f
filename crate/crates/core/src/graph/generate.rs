use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{DegreeProfile, Ensemble, FactorGraph, Provenance};
use crate::error::{Error, Result};

/// Seed for instance `index` of a batch started from `master`. Each instance
/// can be regenerated from its own seed, independent of batch order.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng.gen()
}

fn uniform_index(rng: &mut ChaCha8Rng, n: usize) -> usize {
    rng.gen_range(0..n as u64) as usize
}

/// Uniform `l`-subset of `[0, n)` by redrawing the whole check whenever a
/// variable repeats.
fn distinct_subset(rng: &mut ChaCha8Rng, n: usize, l: usize) -> Vec<usize> {
    let mut c = Vec::with_capacity(l);
    loop {
        c.clear();
        c.extend((0..l).map(|_| uniform_index(rng, n)));
        c.sort_unstable();
        if c.windows(2).all(|w| w[0] != w[1]) {
            return c;
        }
    }
}

/// `m` independent uniform `k`-subsets of `n` variables.
pub fn generate_uniform(n: usize, k: usize, m: usize, seed: u64) -> Result<FactorGraph> {
    if k < 3 || k > n {
        return Err(Error::InvalidParameters(format!("need 3 <= k <= n, got k = {k}, n = {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let checks = (0..m).map(|_| distinct_subset(&mut rng, n, k)).collect();
    FactorGraph::from_checks(n, checks, Provenance { ensemble: Ensemble::Uniform, seed: Some(seed) })
}

fn shuffled_degrees(profile: &DegreeProfile, n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<usize>> {
    if profile.counts().iter().take(2).any(|&c| c > 0) {
        return Err(Error::InvalidProfile("checks of degree 0 or 1 are not allowed".into()));
    }
    let mut degrees = profile.degree_sequence();
    degrees.shuffle(rng);
    if n == 0 {
        return Err(Error::InvalidParameters("n must be positive".into()));
    }
    Ok(degrees)
}

/// Checks with degrees drawn from `profile` (shuffled), each neighborhood a
/// uniform subset of distinct variables.
pub fn generate_degree_constrained(n: usize, profile: &DegreeProfile, seed: u64) -> Result<FactorGraph> {
    if profile.max_degree() > n {
        return Err(Error::InvalidParameters(format!(
            "degree {} exceeds n = {n}",
            profile.max_degree()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let degrees = shuffled_degrees(profile, n, &mut rng)?;
    let checks = degrees.iter().map(|&l| distinct_subset(&mut rng, n, l)).collect();
    FactorGraph::from_checks(
        n,
        checks,
        Provenance { ensemble: Ensemble::DegreeConstrained, seed: Some(seed) },
    )
}

/// Configuration model: every half-edge picks a uniform variable, repeats
/// inside a check allowed.
pub fn generate_configuration(n: usize, profile: &DegreeProfile, seed: u64) -> Result<FactorGraph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let degrees = shuffled_degrees(profile, n, &mut rng)?;
    let checks = degrees
        .iter()
        .map(|&l| (0..l).map(|_| uniform_index(&mut rng, n)).collect())
        .collect();
    FactorGraph::from_checks(
        n,
        checks,
        Provenance { ensemble: Ensemble::Configuration, seed: Some(seed) },
    )
}
