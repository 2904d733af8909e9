//! Fixtures shared by the criterion benches.

use rand::Rng;
use synthbh::rng::trial_rng;
use synthbh::ScoreBundle;

pub use synthbh::sim::random_pairs;

/// Hypothesis counts exercised by the step-up benches.
pub const STEPUP_SIZES: [usize; 3] = [10_000, 100_000, 1_000_000];

/// Largest size at which the quadratic rank-adaptive loop is benched.
pub const NAIVE_SIZES: [usize; 3] = [500, 2_000, 5_000];

/// Uniform reference and auxiliary scores with shifted test scores.
pub fn score_bundle(n: usize, n_synth: usize, m: usize, seed: u64) -> ScoreBundle {
    let mut rng = trial_rng(seed, 0);
    let mut draw = |count: usize, shift: f64| -> Vec<f64> {
        (0..count).map(|_| shift + rng.random::<f64>()).collect()
    };
    let real = draw(n, 0.0);
    let synth = draw(n_synth, 0.0);
    let test = draw(m, 0.1);
    ScoreBundle::new(real, synth, test).expect("finite scores")
}
