//! Seeded generation of acyclic quivers.
//!
//! Vertices are placed in a random order and every arrow points forward along
//! it, so the result is acyclic by construction. Parallel arrows are allowed.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::quiver::Quiver;

pub type QuiverRng = ChaCha8Rng;

pub fn rng(seed: u64) -> QuiverRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A quiver on `v1..vN` with arrows `a1..aM`. Needs `N >= 2` whenever `M >= 1`.
pub fn random_quiver<R: Rng>(rng: &mut R, vertices: usize, arrows: usize) -> Quiver {
    assert!(arrows == 0 || vertices >= 2, "arrows need two distinct vertices");
    let names: Vec<String> = (1..=vertices).map(|i| format!("v{i}")).collect();
    let mut order: Vec<usize> = (0..vertices).collect();
    order.shuffle(rng);
    let arrow_list: Vec<(String, String, String)> = (1..=arrows)
        .map(|k| {
            let i = rng.gen_range(0..vertices - 1);
            let j = rng.gen_range(i + 1..vertices);
            (format!("a{k}"), names[order[i]].clone(), names[order[j]].clone())
        })
        .collect();
    Quiver::new(names, arrow_list).expect("generated names are distinct")
}

/// `count` quivers with between 2 and `max_vertices` vertices and between 1
/// and `max_arrows` arrows, reproducible from `seed`.
pub fn random_corpus(seed: u64, count: usize, max_vertices: usize, max_arrows: usize) -> Vec<Quiver> {
    assert!(max_vertices >= 2 && max_arrows >= 1);
    let mut rng = rng(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(2..=max_vertices);
            let m = rng.gen_range(1..=max_arrows);
            random_quiver(&mut rng, n, m)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_acyclic() {
        let a = random_corpus(7, 50, 6, 10);
        let b = random_corpus(7, 50, 6, 10);
        assert_eq!(a, b);
        assert_ne!(a, random_corpus(8, 50, 6, 10));
        for q in &a {
            q.validate().unwrap();
            assert!(q.arrow_count() >= 1 && q.arrow_count() <= 10);
            assert!(q.vertices().len() >= 2 && q.vertices().len() <= 6);
        }
    }

    #[test]
    fn exact_sizes() {
        let q = random_quiver(&mut rng(1), 4, 9);
        assert_eq!(q.vertices(), ["v1", "v2", "v3", "v4"]);
        assert_eq!(q.arrow_count(), 9);
        assert_eq!(q.arrow(8).name, "a9");
        assert!(q.arrows().iter().all(|a| a.source != a.target));
    }
}
