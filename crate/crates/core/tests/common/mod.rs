//! Shared helpers for integration tests.
#![allow(dead_code)]

use toric_forms::builtin::fan_from_a_sequence;
use toric_forms::fan::Fan;

/// Minimal models: `P^2` and the Hirzebruch surfaces `F_0 .. F_3`.
pub const SEEDS: [&[i64]; 5] = [&[-1, -1, -1], &[0, 0, 0, 0], &[0, 1, 0, -1], &[0, 2, 0, -2], &[0, 3, 0, -3]];

/// Blows up the cone after each position in turn (positions taken modulo the
/// current length).
pub fn blowup_sequence(seed: usize, positions: &[usize]) -> Vec<i64> {
    let mut a = SEEDS[seed % SEEDS.len()].to_vec();
    for &p in positions {
        let m = a.len();
        let i = p % m;
        a[i] += 1;
        a[(i + 1) % m] += 1;
        a.insert(i + 1, 1);
    }
    a
}

pub fn random_surface(seed: usize, positions: &[usize]) -> Fan {
    fan_from_a_sequence(&blowup_sequence(seed, positions)).expect("blowups of minimal models")
}

/// Whether `b` is a rotation or reflection of the cyclic sequence `a`.
pub fn dihedral_equal(a: &[i64], b: &[i64]) -> bool {
    let m = a.len();
    m == b.len()
        && (0..m.max(1)).any(|s| {
            (0..m).all(|i| a[(s + i) % m] == b[i]) || (0..m).all(|i| a[(s + m - i) % m] == b[i])
        })
}
