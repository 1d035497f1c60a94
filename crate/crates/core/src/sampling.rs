//! Uniform sampling of k-subsets.

use std::collections::HashMap;

use rand::Rng;

/// Partial Fisher–Yates shuffle over a virtual identity array `0..population`.
///
/// Only displaced slots are stored, so the sampler needs `O(k)` memory no
/// matter how large the population is. The scratch map is kept between calls
/// to avoid reallocating it for every node of a pairing table.
#[derive(Debug, Default)]
pub struct SubsetSampler {
    displaced: HashMap<u32, u32>,
}

impl SubsetSampler {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends `k` distinct values drawn uniformly from `0..population` to
    /// `out`, in draw order. Every k-subset is equally likely and so is every
    /// ordering of it.
    ///
    /// # Panics
    ///
    /// Panics if `k > population`.
    pub fn sample_into<R: Rng + ?Sized>(
        &mut self,
        rng: &mut R,
        population: u32,
        k: u32,
        out: &mut Vec<u32>,
    ) {
        assert!(k <= population, "cannot draw {k} items from {population}");
        self.displaced.clear();
        out.reserve(k as usize);
        for t in 0..k {
            let j = rng.random_range(t..population);
            let at_j = self.displaced.get(&j).copied().unwrap_or(j);
            let at_t = self.displaced.get(&t).copied().unwrap_or(t);
            // Slot t is never read again, only slot j needs the swapped value.
            self.displaced.insert(j, at_t);
            out.push(at_j);
        }
    }

    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R, population: u32, k: u32) -> Vec<u32> {
        let mut out = Vec::with_capacity(k as usize);
        self.sample_into(rng, population, k, &mut out);
        out
    }
}
