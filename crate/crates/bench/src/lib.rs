//! Shared fixtures for the engine benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use markoff_core::{Fp, PrimeContext, SolutionSet};

/// Primes the per-prime benchmarks run at.
pub const PRIMES: [u64; 3] = [101, 401, 1009];

pub fn context(p: u64) -> PrimeContext {
    PrimeContext::new(p).expect("benchmark prime")
}

pub fn solutions(p: u64) -> SolutionSet {
    SolutionSet::enumerate(p).expect("benchmark prime")
}

/// Coefficient pairs `(a, b)` with `ab != 1`, fixed by `seed`.
pub fn coefficient_pairs(ctx: &PrimeContext, n: usize, seed: u64) -> Vec<(Fp, Fp)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = ctx.p();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let (a, b) = (Fp(rng.gen_range(1..p)), Fp(rng.gen_range(1..p)));
        if ctx.mul(a, b) != Fp::ONE {
            out.push((a, b));
        }
    }
    out
}
