//! Generators and brute-force oracles for testing charon-lite.

pub mod graphs;
pub mod programs;
pub mod taint;
pub mod traits;
pub mod values;

use rand::rngs::StdRng;
use rand::SeedableRng;

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}
