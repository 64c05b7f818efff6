//! Seeded generators for trees and unit-step arrays.

use rand::Rng;

use crate::tree::RootedTree;

/// Uniform attachment: node 0 is the root and the parent of `v` is drawn
/// uniformly from `0..v`.
pub fn uniform_attachment_tree<R: Rng + ?Sized>(n: usize, rng: &mut R) -> RootedTree {
    assert!(n >= 1);
    let parent = (0..n)
        .map(|v| (v > 0).then(|| rng.gen_range(0..v)))
        .collect();
    RootedTree::from_parents(0, parent).expect("uniform attachment yields a tree")
}

/// The path `0 -> 1 -> ... -> n-1`.
pub fn path_tree(n: usize) -> RootedTree {
    assert!(n >= 1);
    let parent = (0..n).map(|v| v.checked_sub(1)).collect();
    RootedTree::from_parents(0, parent).expect("a path is a tree")
}

/// `n` values starting at `start`, each step `+1` or `-1` with equal odds.
pub fn unit_walk<R: Rng + ?Sized>(n: usize, start: i64, rng: &mut R) -> Vec<i64> {
    let mut values = Vec::with_capacity(n);
    let mut cur = start;
    for t in 0..n {
        if t > 0 {
            cur += if rng.gen::<bool>() { 1 } else { -1 };
        }
        values.push(cur);
    }
    values
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn seeded_trees_repeat() {
        let a = uniform_attachment_tree(50, &mut ChaCha8Rng::seed_from_u64(3));
        let b = uniform_attachment_tree(50, &mut ChaCha8Rng::seed_from_u64(3));
        assert_eq!(a, b);
        assert!((1..50).all(|v| a.parent(v).unwrap() < v));
    }

    #[test]
    fn walks_have_unit_steps() {
        let w = unit_walk(200, -3, &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(w.len(), 200);
        assert_eq!(w[0], -3);
        assert!(w.windows(2).all(|p| p[0].abs_diff(p[1]) == 1));
    }

    #[test]
    fn path_levels() {
        assert_eq!(path_tree(4).levels(), vec![0, 1, 2, 3]);
    }
}
