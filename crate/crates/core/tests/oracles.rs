//! Independent oracles: actual finite field arithmetic for norm maps, and
//! brute force over ray permutations for automorphism groups.

mod common;

use std::collections::BTreeSet;

use common::random_surface;
use toric_forms::aut::automorphism_group;
use toric_forms::builtin::{builtin_fan, projective_fan};
use toric_forms::fan::Fan;
use toric_forms::galois::{norm_quotient, FieldBackend};

/// `GF(p^k)` as polynomials over `GF(p)` modulo a primitive polynomial.
struct Gf {
    p: u64,
    k: usize,
    /// monic modulus, coefficients of `x^0 .. x^{k-1}` of `x^k - f`
    reduction: Vec<u64>,
}

impl Gf {
    fn new(p: u64, k: usize) -> Gf {
        if k == 1 {
            return Gf { p, k, reduction: vec![0] };
        }
        let size = p.pow(k as u32);
        for code in 0..p.pow(k as u32) {
            let mut reduction = Vec::with_capacity(k);
            let mut c = code;
            for _ in 0..k {
                reduction.push(c % p);
                c /= p;
            }
            if reduction[0] == 0 {
                continue;
            }
            let f = Gf { p, k, reduction };
            // x has order p^k - 1 only when the quotient ring is a field
            let x = f.x();
            let mut y = x.clone();
            let mut order = 1;
            while y != f.one() && order < size {
                y = f.mul(&y, &x);
                order += 1;
            }
            if order == size - 1 {
                return f;
            }
        }
        panic!("no primitive polynomial of degree {k} over GF({p})");
    }

    fn one(&self) -> Vec<u64> {
        let mut v = vec![0; self.k];
        v[0] = 1;
        v
    }

    fn x(&self) -> Vec<u64> {
        let mut v = vec![0; self.k];
        v[1] = 1;
        v
    }

    fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let p = self.p;
        let mut prod = vec![0u64; 2 * self.k];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % p;
            }
        }
        if self.k == 1 {
            return vec![prod[0]];
        }
        for deg in (self.k..2 * self.k).rev() {
            let c = prod[deg];
            if c == 0 {
                continue;
            }
            prod[deg] = 0;
            for (i, &r) in self.reduction.iter().enumerate() {
                prod[deg - self.k + i] = (prod[deg - self.k + i] + c * r) % p;
            }
        }
        prod.truncate(self.k);
        prod
    }

    fn pow(&self, a: &[u64], mut e: u64) -> Vec<u64> {
        let mut base = a.to_vec();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    fn nonzero(&self) -> Vec<Vec<u64>> {
        let size = self.p.pow(self.k as u32);
        (1..size)
            .map(|mut c| {
                (0..self.k)
                    .map(|_| {
                        let r = c % self.p;
                        c /= self.p;
                        r
                    })
                    .collect()
            })
            .collect()
    }
}

fn prime_power(q: u64) -> (u64, usize) {
    let p = (2..=q).find(|p| q.is_multiple_of(*p)).unwrap();
    let mut e = 0;
    let mut x = q;
    while x.is_multiple_of(p) {
        x /= p;
        e += 1;
    }
    assert_eq!(x, 1);
    (p, e)
}

/// Image of the norm `F_{q^d}* -> F_q*` equals `F_q*`, by actual field arithmetic.
fn norm_is_surjective(q: u64, d: usize) -> bool {
    let (p, e) = prime_power(q);
    let field = Gf::new(p, e * d);
    let subfield: BTreeSet<Vec<u64>> = field
        .nonzero()
        .into_iter()
        .filter(|y| field.pow(y, q) == *y)
        .collect();
    assert_eq!(subfield.len() as u64, q - 1);
    let image: BTreeSet<Vec<u64>> = field
        .nonzero()
        .iter()
        .map(|x| {
            let mut n = field.one();
            let mut conj = x.clone();
            for _ in 0..d {
                n = field.mul(&n, &conj);
                conj = field.pow(&conj, q);
            }
            n
        })
        .collect();
    image == subfield
}

#[test]
fn finite_field_norms_are_surjective() {
    for q in [2u64, 3, 4, 5, 7] {
        for d in 1..=3 {
            assert!(norm_is_surjective(q, d), "q={q} d={d}");
            let b = FieldBackend::finite_field(q, d as u64).unwrap();
            assert!(norm_quotient(&b, &[]).unwrap().is_trivial());
        }
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Number of ray permutations induced by a lattice automorphism preserving
/// cones, rank 2 only, with plain `i64` arithmetic.
fn brute_force_aut_order(fan: &Fan) -> usize {
    let rays = fan.rays();
    let m = rays.len();
    // a basis among the rays
    let (i0, i1) = (0..m)
        .flat_map(|i| (i + 1..m).map(move |j| (i, j)))
        .find(|&(i, j)| rays[i][0] * rays[j][1] - rays[i][1] * rays[j][0] != 0)
        .unwrap();
    let det = rays[i0][0] * rays[i1][1] - rays[i0][1] * rays[i1][0];
    let cones: BTreeSet<BTreeSet<usize>> =
        fan.cones().iter().map(|c| c.iter().copied().collect()).collect();
    let mut count = 0;
    for perm in permutations(m) {
        let (u, v) = (&rays[perm[i0]], &rays[perm[i1]]);
        // M = [u v] * [r_i0 r_i1]^{-1}, scaled by det
        let inv = [[rays[i1][1], -rays[i1][0]], [-rays[i0][1], rays[i0][0]]];
        let num = [
            [u[0] * inv[0][0] + v[0] * inv[1][0], u[0] * inv[0][1] + v[0] * inv[1][1]],
            [u[1] * inv[0][0] + v[1] * inv[1][0], u[1] * inv[0][1] + v[1] * inv[1][1]],
        ];
        if num.iter().flatten().any(|x| x % det != 0) {
            continue;
        }
        let mat = num.map(|r| r.map(|x| x / det));
        if (mat[0][0] * mat[1][1] - mat[0][1] * mat[1][0]).abs() != 1 {
            continue;
        }
        let maps_rays = (0..m).all(|k| {
            let r = &rays[k];
            let img = [mat[0][0] * r[0] + mat[0][1] * r[1], mat[1][0] * r[0] + mat[1][1] * r[1]];
            img.as_slice() == rays[perm[k]].as_slice()
        });
        let maps_cones = cones
            .iter()
            .all(|c| cones.contains(&c.iter().map(|&k| perm[k]).collect()));
        if maps_rays && maps_cones {
            count += 1;
        }
    }
    count
}

#[test]
fn automorphism_orders_by_brute_force() {
    let mut fans = vec![
        builtin_fan("hexagon").unwrap(),
        builtin_fan("surface:D8").unwrap(),
        builtin_fan("surface:D2").unwrap(),
        builtin_fan("surface:D2p").unwrap(),
        builtin_fan("surface:C1").unwrap(),
        projective_fan(2).unwrap(),
        Fan::validate(2, vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1]]).unwrap(),
    ];
    for (s, pos) in [(0, vec![0, 3]), (2, vec![1, 1]), (3, vec![0, 2, 4]), (1, vec![5])] {
        fans.push(random_surface(s, &pos));
    }
    for fan in fans {
        assert!(fan.ray_count() <= 8);
        assert_eq!(
            automorphism_group(&fan).unwrap().order(),
            brute_force_aut_order(&fan),
            "{}",
            fan.to_json_string()
        );
    }
}
