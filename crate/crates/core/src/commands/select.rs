//! Roulette-wheel (fitness-proportionate) selection.

use rand::{Rng, RngExt};

use super::CandidateCommand;
use crate::error::{Error, Result};

/// Picks index `i` with probability `weights[i] / Σ weights`.
///
/// Returns `None` when the slice is empty or no weight is positive.
/// Non-positive and non-finite weights are never chosen.
pub fn roulette_index<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> Option<usize> {
    let usable = |w: f64| w.is_finite() && w > 0.0;
    let total: f64 = weights.iter().copied().filter(|&w| usable(w)).sum();
    if total <= 0.0 {
        return None;
    }
    let spin = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last = None;
    for (i, &w) in weights.iter().enumerate() {
        if !usable(w) {
            continue;
        }
        acc += w;
        last = Some(i);
        if spin < acc {
            return Some(i);
        }
    }
    // rounding can leave `spin` a hair above the accumulated total
    last
}

/// Chooses one candidate with probability proportional to its score.
pub fn select<'a, R: Rng + ?Sized>(cands: &'a [CandidateCommand], rng: &mut R) -> Result<&'a CandidateCommand> {
    if cands.is_empty() {
        return Err(Error::Usage("cannot select from an empty candidate list".into()));
    }
    if let Some(bad) = cands.iter().find(|c| !(c.score.is_finite() && c.score > 0.0)) {
        return Err(Error::Usage(format!("candidate {:?} has non-positive score {}", bad.text, bad.score)));
    }
    let weights: Vec<f64> = cands.iter().map(|c| c.score).collect();
    let i = roulette_index(&weights, rng).expect("positive weights");
    Ok(&cands[i])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_weight_always_wins() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            assert_eq!(roulette_index(&[0.3], &mut rng), Some(0));
        }
    }

    #[test]
    fn empty_and_zero_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(roulette_index(&[], &mut rng), None);
        assert_eq!(roulette_index(&[0.0, -1.0], &mut rng), None);
        for _ in 0..100 {
            assert_eq!(roulette_index(&[0.0, 2.0, f64::NAN], &mut rng), Some(1));
        }
        assert!(select(&[], &mut rng).is_err());
    }

    #[test]
    fn frequencies_follow_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut hits = [0u32; 3];
        let n = 60_000;
        for _ in 0..n {
            hits[roulette_index(&[1.0, 2.0, 3.0], &mut rng).unwrap()] += 1;
        }
        for (i, expected) in [1.0 / 6.0, 2.0 / 6.0, 3.0 / 6.0].iter().enumerate() {
            assert!((hits[i] as f64 / n as f64 - expected).abs() < 0.01);
        }
    }
}
