//! Seeded generation of random words, rationals, series and derivations for
//! property tests and the cocycle verifier.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::free_group::FreeWord;
use crate::scalar::{Mode, Scalar};
use crate::tensor::{GradedDerivation, TensorSeries};

pub fn seeded(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random reduced word of at most `max_len` letters.
pub fn random_word<R: Rng>(rng: &mut R, n: usize, max_len: usize) -> FreeWord {
    let len = rng.gen_range(0..=max_len);
    let mut letters = Vec::with_capacity(len);
    for _ in 0..len {
        let i = rng.gen_range(1..=n as i32);
        let s = if rng.gen_bool(0.5) { 1 } else { -1 };
        letters.push(s * i);
    }
    FreeWord::new(&letters).expect("letters nonzero")
}

/// Small random rational (or its float image).
pub fn random_scalar<R: Rng>(rng: &mut R, mode: Mode) -> Scalar {
    let num = rng.gen_range(-4i64..=4);
    let den = rng.gen_range(1i64..=3);
    Scalar::ratio(mode, if num == 0 { 1 } else { num }, den)
}

/// Sparse random series with `terms` terms per degree in `lo..=hi`.
pub fn random_series<R: Rng>(
    rng: &mut R,
    dim_h: usize,
    trunc: usize,
    mode: Mode,
    lo: usize,
    hi: usize,
    terms: usize,
) -> TensorSeries {
    let mut s = TensorSeries::zero(dim_h, trunc, mode);
    for d in lo..=hi.min(trunc) {
        for _ in 0..terms {
            let w: Vec<u8> = (0..d).map(|_| rng.gen_range(1..=dim_h as u8)).collect();
            s.insert(w, random_scalar(rng, mode));
        }
    }
    s
}

/// Sparse random graded derivation with image components in degrees
/// `2..=2+extra_degrees`.
pub fn random_derivation<R: Rng>(
    rng: &mut R,
    dim_h: usize,
    trunc: usize,
    extra_degrees: usize,
) -> GradedDerivation {
    let hi = (2 + extra_degrees).min(trunc);
    let images = (0..dim_h)
        .map(|_| random_series(rng, dim_h, trunc, Mode::Exact, 2, hi, 2))
        .collect();
    GradedDerivation::new(images).expect("degrees >= 2 by construction")
}
