//! Breadth-first search over toric blowups of the hexagon and the square,
//! printing the smallest smooth complete fan found for every finite subgroup
//! class of GL(2, Z).
//!
//! The search runs on cyclic `a` sequences: blowing up the cone between
//! positions `i` and `i+1` inserts a 1 and raises both neighbours by one.
//! Fans are only rebuilt, and their groups identified, when a sequence shows
//! a symmetry pattern not seen before or has any nontrivial symmetry. The
//! pattern alone does not separate D6 from D6'.
//!
//! Run with `cargo run --release --example search_surfaces -- [max_rays]`.

use std::collections::{BTreeMap, HashSet, VecDeque};

use toric_forms::aut::{automorphism_group, identify_gl2_class};
use toric_forms::fan::Fan;

/// Canonical key of a cyclic sequence up to rotation and reflection.
fn dihedral_key(a: &[i64]) -> Vec<i64> {
    let m = a.len();
    let mut best: Option<Vec<i64>> = None;
    for s in 0..m {
        let fwd: Vec<i64> = (0..m).map(|i| a[(s + i) % m]).collect();
        let bwd: Vec<i64> = (0..m).map(|i| a[(s + m - i) % m]).collect();
        for c in [fwd, bwd] {
            if best.as_ref().is_none_or(|b| c < *b) {
                best = Some(c);
            }
        }
    }
    best.unwrap_or_default()
}

/// Rotations fixing the sequence, plus each fixing reflection described by
/// whether its axis passes through a ray and the parity of `a` there.
fn signature(a: &[i64]) -> (usize, Vec<(bool, bool)>) {
    let m = a.len();
    let rotations = (0..m)
        .filter(|&s| (0..m).all(|i| a[(s + i) % m] == a[i]))
        .count();
    let mut reflections = Vec::new();
    for s in 0..m {
        if (0..m).all(|i| a[(s + m - i) % m] == a[i]) {
            let fixed = (0..m).find(|&i| (2 * i) % m == s);
            reflections.push(match fixed {
                Some(i) => (true, a[i] % 2 == 0),
                None => (false, false),
            });
        }
    }
    reflections.sort_unstable();
    (rotations, reflections)
}

fn rays_from_sequence(a: &[i64]) -> Option<Vec<[i64; 2]>> {
    let m = a.len();
    let mut rays = vec![[1i64, 0], [0, 1]];
    for i in 1..m - 1 {
        let (u, v) = (rays[i - 1], rays[i]);
        rays.push([a[i] * v[0] - u[0], a[i] * v[1] - u[1]]);
    }
    let (u, v) = (rays[m - 2], rays[m - 1]);
    let closes = [a[m - 1] * v[0] - u[0], a[m - 1] * v[1] - u[1]] == rays[0]
        && [a[0] - v[0], -v[1]] == rays[1];
    closes.then_some(rays)
}

fn main() {
    let max_rays: usize = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(15);
    let seeds: Vec<Vec<i64>> = vec![vec![1; 6], vec![0; 4]];
    let mut seen: HashSet<Vec<i64>> = seeds.iter().map(|s| dihedral_key(s)).collect();
    let mut queue: VecDeque<Vec<i64>> = seeds.into_iter().collect();
    let mut signatures = HashSet::new();
    let mut best: BTreeMap<String, (Vec<i64>, Vec<[i64; 2]>)> = BTreeMap::new();
    while let Some(a) = queue.pop_front() {
        let sig = signature(&a);
        let symmetric = sig.0 > 1 || !sig.1.is_empty();
        if signatures.insert(sig) || symmetric {
            let rays = rays_from_sequence(&a).expect("blowups of closed sequences close");
            let fan = Fan::rank2_cycle(rays.clone()).expect("valid fan");
            let group = automorphism_group(&fan).expect("full rank");
            let label = identify_gl2_class(&group).expect("finite subgroup").label;
            best.entry(label.to_string()).or_insert((a.clone(), rays));
            if best.len() == 13 {
                break;
            }
        }
        let m = a.len();
        if m >= max_rays {
            continue;
        }
        for i in 0..m {
            let mut b = a.clone();
            b[i] += 1;
            b[(i + 1) % m] += 1;
            b.insert(i + 1, 1);
            if seen.insert(dihedral_key(&b)) {
                queue.push_back(b);
            }
        }
    }
    for (label, (a, rays)) in best {
        println!("{label}: {} rays a={a:?} rays={rays:?}", a.len());
    }
}
