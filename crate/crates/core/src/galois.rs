//! Finite Galois groups, field backends with their norm data, and Galois
//! actions on a fan up to conjugacy.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Deserialize;
use thiserror::Error;

use crate::aut::FanAutGroup;
use crate::linalg::{
    lattice_contains, lattice_intersection, lattice_subquotient, FGAbelianGroup, IntMatrix,
};

pub const MAX_GROUP_ORDER: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GaloisError {
    #[error("group of order {0} exceeds the enumeration limit")]
    GroupTooLarge(usize),
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("invalid backend: {0}")]
    InvalidBackend(String),
    #[error("backend unsupported: {0}")]
    BackendUnsupported(String),
    #[error("operation needs a cyclic Galois group")]
    NonCyclicGroup,
    #[error("backend has no norm data for the subgroup of order {0}")]
    MissingSubgroupData(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupKind {
    Cyclic(usize),
    /// Dihedral group of the given order `2m`.
    Dihedral(usize),
    Explicit,
}

/// A finite group with enumerated elements; element 0 is the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupSpec {
    kind: GroupKind,
    order: usize,
    generators: Vec<usize>,
    perms: Vec<Vec<usize>>,
    perm_index: HashMap<Vec<usize>, usize>,
}

impl GroupSpec {
    pub fn cyclic(d: usize) -> Result<Self, GaloisError> {
        if d == 0 {
            return Err(GaloisError::InvalidGroup("cyclic group of order 0".into()));
        }
        if d > MAX_GROUP_ORDER {
            return Err(GaloisError::GroupTooLarge(d));
        }
        Ok(GroupSpec {
            kind: GroupKind::Cyclic(d),
            order: d,
            generators: if d > 1 { vec![1] } else { Vec::new() },
            perms: Vec::new(),
            perm_index: HashMap::new(),
        })
    }

    /// Dihedral group of order `two_m`; element `k + m*s` is `r^k s^s`.
    pub fn dihedral(two_m: usize) -> Result<Self, GaloisError> {
        if two_m < 2 || two_m % 2 != 0 {
            return Err(GaloisError::InvalidGroup(format!(
                "dihedral order {two_m} must be even and positive"
            )));
        }
        if two_m > MAX_GROUP_ORDER {
            return Err(GaloisError::GroupTooLarge(two_m));
        }
        let m = two_m / 2;
        let mut generators = Vec::new();
        if m > 1 {
            generators.push(1);
        }
        generators.push(m);
        Ok(GroupSpec {
            kind: GroupKind::Dihedral(two_m),
            order: two_m,
            generators,
            perms: Vec::new(),
            perm_index: HashMap::new(),
        })
    }

    /// Group generated by permutations of `0..n`.
    pub fn explicit(gens: Vec<Vec<usize>>) -> Result<Self, GaloisError> {
        let n = gens.first().map_or(0, Vec::len);
        for g in &gens {
            let mut s = g.clone();
            s.sort_unstable();
            if g.len() != n || s != (0..n).collect::<Vec<_>>() {
                return Err(GaloisError::InvalidGroup("generator is not a permutation".into()));
            }
        }
        let id: Vec<usize> = (0..n).collect();
        let mut perms = vec![id.clone()];
        let mut perm_index = HashMap::from([(id, 0)]);
        let mut i = 0;
        while i < perms.len() {
            for g in &gens {
                let p: Vec<usize> = g.iter().map(|&k| perms[i][k]).collect();
                if !perm_index.contains_key(&p) {
                    if perms.len() >= MAX_GROUP_ORDER {
                        return Err(GaloisError::GroupTooLarge(perms.len() + 1));
                    }
                    perm_index.insert(p.clone(), perms.len());
                    perms.push(p);
                }
            }
            i += 1;
        }
        let mut generators: Vec<usize> = gens.iter().map(|g| perm_index[g]).filter(|&x| x != 0).collect();
        generators.dedup();
        Ok(GroupSpec {
            kind: GroupKind::Explicit,
            order: perms.len(),
            generators,
            perms,
            perm_index,
        })
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn identity(&self) -> usize {
        0
    }

    /// Order of the group if it is given as a cyclic group.
    pub fn cyclic_order(&self) -> Option<usize> {
        match self.kind {
            GroupKind::Cyclic(d) => Some(d),
            _ => None,
        }
    }

    pub fn multiply(&self, a: usize, b: usize) -> usize {
        match self.kind {
            GroupKind::Cyclic(d) => (a + b) % d,
            GroupKind::Dihedral(two_m) => {
                let m = two_m / 2;
                let (k1, s1) = (a % m, a / m);
                let (k2, s2) = (b % m, b / m);
                let k = if s1 == 0 { (k1 + k2) % m } else { (k1 + m - k2) % m };
                k + m * (s1 ^ s2)
            }
            GroupKind::Explicit => {
                let (pa, pb) = (&self.perms[a], &self.perms[b]);
                let p: Vec<usize> = pb.iter().map(|&k| pa[k]).collect();
                self.perm_index[&p]
            }
        }
    }

    pub fn inverse(&self, a: usize) -> usize {
        (0..self.order)
            .find(|&b| self.multiply(a, b) == 0)
            .expect("finite group element has an inverse")
    }

    pub fn power(&self, a: usize, k: usize) -> usize {
        (0..k).fold(0, |acc, _| self.multiply(acc, a))
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.multiply(x, a);
            k += 1;
        }
        k
    }

    pub fn label(&self) -> String {
        match self.kind {
            GroupKind::Cyclic(d) => format!("cyclic:{d}"),
            GroupKind::Dihedral(n) => format!("dihedral:{n}"),
            GroupKind::Explicit => format!("explicit:{}", self.order),
        }
    }

    /// Subgroup generated by the given elements, sorted.
    pub fn subgroup(&self, gens: &[usize]) -> Vec<usize> {
        let mut seen = vec![false; self.order];
        seen[0] = true;
        let mut stack = vec![0];
        while let Some(x) = stack.pop() {
            for &g in gens {
                let y = self.multiply(x, g);
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        (0..self.order).filter(|&i| seen[i]).collect()
    }

    /// Quotient by a normal subgroup, with the projection map on elements.
    pub fn quotient(&self, normal: &[usize]) -> (GroupSpec, Vec<usize>) {
        if let GroupKind::Cyclic(d) = self.kind {
            let q = d / normal.len();
            let g = GroupSpec::cyclic(q).expect("quotient of a valid cyclic group");
            return (g, (0..d).map(|x| x % q).collect());
        }
        // Permutation action on left cosets.
        let mut coset_of = vec![usize::MAX; self.order];
        let mut reps = Vec::new();
        for x in 0..self.order {
            if coset_of[x] != usize::MAX {
                continue;
            }
            for &k in normal {
                coset_of[self.multiply(x, k)] = reps.len();
            }
            reps.push(x);
        }
        let gens: Vec<Vec<usize>> = self
            .generators
            .iter()
            .map(|&g| reps.iter().map(|&r| coset_of[self.multiply(g, r)]).collect())
            .collect();
        let q = if gens.is_empty() || reps.len() == 1 {
            GroupSpec::cyclic(1).expect("trivial group")
        } else {
            GroupSpec::explicit(gens).expect("coset action is a permutation group")
        };
        if q.order == 1 {
            return (q, vec![0; self.order]);
        }
        // Element x maps to the permutation of cosets it induces.
        let map = (0..self.order)
            .map(|x| {
                let p: Vec<usize> = reps.iter().map(|&r| coset_of[self.multiply(x, r)]).collect();
                q.perm_index[&p]
            })
            .collect();
        (q, map)
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// User-supplied norm data for a cyclic extension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicBrauer {
    group_order: usize,
    /// Invariant factors of `Q = k* / Im N_{K/k}`.
    q_factors: Vec<BigInt>,
    /// Subgroup order `h` to generators (columns) of the image of
    /// `k* ∩ Im N_{K/K^H}` in `Q`, for `|H| = h`.
    images: Vec<(usize, IntMatrix)>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SymbolicJson {
    #[serde(rename = "Q")]
    q: SymbolicQ,
    #[serde(default)]
    images: Vec<SymbolicImage>,
    #[serde(default)]
    group_order: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SymbolicQ {
    invariant_factors: Vec<u64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SymbolicImage {
    subgroup_gens: Vec<usize>,
    #[serde(rename = "subgroup_of_Q")]
    subgroup_of_q: Vec<Vec<i64>>,
}

impl SymbolicBrauer {
    /// Parses the JSON description; `group_order` overrides or supplies the
    /// order of the cyclic Galois group.
    pub fn from_json_str(s: &str, group_order: Option<usize>) -> Result<Self, GaloisError> {
        let j: SymbolicJson =
            serde_json::from_str(s).map_err(|e| GaloisError::InvalidBackend(e.to_string()))?;
        let d = group_order.or(j.group_order).ok_or_else(|| {
            GaloisError::InvalidBackend("group_order missing; pass a cyclic group".into())
        })?;
        if d == 0 {
            return Err(GaloisError::InvalidBackend("group_order must be positive".into()));
        }
        let r = j.q.invariant_factors.len();
        let mut images = Vec::new();
        for img in j.images {
            let g = img.subgroup_gens.iter().fold(d, |g, &x| g.gcd(&(x % d)));
            let h = d / g;
            for v in &img.subgroup_of_q {
                if v.len() != r {
                    return Err(GaloisError::InvalidBackend(format!(
                        "Q element {v:?} has {} coordinates, expected {r}",
                        v.len()
                    )));
                }
            }
            let m = IntMatrix::from_columns(r, &img.subgroup_of_q);
            if images.iter().any(|(k, _)| *k == h) {
                return Err(GaloisError::InvalidBackend(format!(
                    "subgroup of order {h} listed twice"
                )));
            }
            images.push((h, m));
        }
        Self::new(
            d,
            j.q.invariant_factors.iter().map(|&x| BigInt::from(x)).collect(),
            images,
        )
    }

    pub fn from_path(path: &Path, group_order: Option<usize>) -> Result<Self, GaloisError> {
        let s = std::fs::read_to_string(path)
            .map_err(|e| GaloisError::InvalidBackend(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&s, group_order)
    }

    pub fn new(
        group_order: usize,
        q_factors: Vec<BigInt>,
        images: Vec<(usize, IntMatrix)>,
    ) -> Result<Self, GaloisError> {
        if q_factors.iter().any(|a| a < &BigInt::from(1)) {
            return Err(GaloisError::InvalidBackend(
                "invariant factors of Q must be positive".into(),
            ));
        }
        let b = SymbolicBrauer {
            group_order,
            q_factors,
            images,
        };
        for (h, _) in &b.images {
            if group_order % h != 0 {
                return Err(GaloisError::InvalidBackend(format!(
                    "{h} is not a subgroup order of Z/{group_order}"
                )));
            }
        }
        if let Some((_, m)) = b.images.iter().find(|(h, _)| *h == 1) {
            let all = b.relations().hstack(m).expect("same rows");
            if !lattice_contains(&all, &IntMatrix::identity(b.q_factors.len())) {
                return Err(GaloisError::InvalidBackend(
                    "the trivial subgroup must have all of Q as image".into(),
                ));
            }
        }
        if let Some((_, m)) = b.images.iter().find(|(h, _)| *h == group_order) {
            if !lattice_contains(&b.relations(), m) {
                return Err(GaloisError::InvalidBackend(
                    "the full Galois group must have trivial image in Q".into(),
                ));
            }
        }
        // H ⊆ H' (h | h') forces S_H ⊇ S_H'.
        let orders: Vec<usize> = b.images.iter().map(|(h, _)| *h).collect();
        for &h in &orders {
            for &h2 in &orders {
                if h != h2 && h2 % h == 0 {
                    let big = b.preimage(h)?;
                    let small = b.preimage(h2)?;
                    if !lattice_contains(&big, &small) {
                        return Err(GaloisError::InvalidBackend(format!(
                            "monotonicity fails: image for subgroup of order {h} does not \
                             contain the image for order {h2}"
                        )));
                    }
                }
            }
        }
        Ok(b)
    }

    pub fn group_order(&self) -> usize {
        self.group_order
    }

    pub fn q_group(&self) -> FGAbelianGroup {
        FGAbelianGroup::from_cyclic_orders(&self.q_factors)
    }

    fn relations(&self) -> IntMatrix {
        let r = self.q_factors.len();
        IntMatrix::diagonal(r, r, &self.q_factors)
    }

    /// Preimage lattice in `Z^r` of the subgroup attached to order `h`.
    fn preimage(&self, h: usize) -> Result<IntMatrix, GaloisError> {
        let r = self.q_factors.len();
        let rel = self.relations();
        if h == 1 {
            return Ok(IntMatrix::identity(r));
        }
        if h == self.group_order {
            if let Some((_, m)) = self.images.iter().find(|(k, _)| *k == h) {
                return Ok(rel.hstack(m).expect("same rows"));
            }
            return Ok(rel);
        }
        match self.images.iter().find(|(k, _)| *k == h) {
            Some((_, m)) => Ok(rel.hstack(m).expect("same rows")),
            None => Err(GaloisError::MissingSubgroupData(h)),
        }
    }

    fn norm_quotient(&self, subgroup_orders: &[usize]) -> Result<FGAbelianGroup, GaloisError> {
        let r = self.q_factors.len();
        let mut acc = IntMatrix::identity(r);
        for &h in subgroup_orders {
            let p = self.preimage(h)?;
            acc = lattice_intersection(&acc, &p).expect("same ambient dimension");
        }
        Ok(lattice_subquotient(&acc, &self.relations()).expect("relations lie in every preimage"))
    }
}

/// The field extension `K/k` supplying norm and Brauer data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FieldBackend {
    /// `C / R`
    RealComplex,
    /// `F_{q^d} / F_q`, with `K*` modelled as `Z/(q^d - 1)` and Frobenius as
    /// multiplication by `q`.
    FiniteField { q: u64, d: u64 },
    SymbolicBrauer(Arc<SymbolicBrauer>),
    /// `K = k`
    Trivial,
}

fn is_prime_power(q: u64) -> bool {
    if q < 2 {
        return false;
    }
    let p = (2..=q).find(|p| q % p == 0).expect("q has a prime factor");
    let mut x = q;
    while x % p == 0 {
        x /= p;
    }
    x == 1
}

impl FieldBackend {
    pub fn finite_field(q: u64, d: u64) -> Result<Self, GaloisError> {
        if !is_prime_power(q) {
            return Err(GaloisError::InvalidBackend(format!("{q} is not a prime power")));
        }
        if d == 0 {
            return Err(GaloisError::InvalidBackend("extension degree must be positive".into()));
        }
        let n = q
            .checked_pow(d as u32)
            .filter(|n| *n <= 1 << 40)
            .ok_or_else(|| GaloisError::InvalidBackend(format!("{q}^{d} is too large")))?;
        if d as usize > MAX_GROUP_ORDER {
            return Err(GaloisError::GroupTooLarge(d as usize));
        }
        let b = FieldBackend::FiniteField { q, d };
        let k_star = b.ff_fixed_generator().expect("finite field");
        let full = b.ff_norm_generator(d as usize).expect("finite field");
        if full != k_star {
            return Err(GaloisError::InvalidBackend(format!(
                "norm from F_{n} to F_{q} is not surjective in the cyclic model"
            )));
        }
        Ok(b)
    }

    pub fn symbolic(b: SymbolicBrauer) -> Self {
        FieldBackend::SymbolicBrauer(Arc::new(b))
    }

    pub fn group_order(&self) -> usize {
        match self {
            FieldBackend::RealComplex => 2,
            FieldBackend::FiniteField { d, .. } => *d as usize,
            FieldBackend::SymbolicBrauer(s) => s.group_order,
            FieldBackend::Trivial => 1,
        }
    }

    pub fn galois_group(&self) -> GroupSpec {
        GroupSpec::cyclic(self.group_order()).expect("backend group orders are validated")
    }

    pub fn label(&self) -> String {
        match self {
            FieldBackend::RealComplex => "real".into(),
            FieldBackend::FiniteField { q, d } => format!("ff:{q},{d}"),
            FieldBackend::SymbolicBrauer(s) => format!("symbolic(Z/{})", s.group_order),
            FieldBackend::Trivial => "split".into(),
        }
    }

    /// `|K*|` for finite fields.
    pub fn ff_modulus(&self) -> Option<BigInt> {
        match self {
            FieldBackend::FiniteField { q, d } => {
                Some(BigInt::from(*q).pow(*d as u32) - BigInt::one())
            }
            _ => None,
        }
    }

    /// Generator `g | n` of `k* = g Z/n` inside `K* = Z/n`.
    fn ff_fixed_generator(&self) -> Option<BigInt> {
        match self {
            FieldBackend::FiniteField { q, .. } => {
                Some(self.ff_modulus()? / BigInt::from(*q - 1))
            }
            _ => None,
        }
    }

    /// Exponent of the norm `K -> K^H`, `|H| = h`: `sum_{j<h} q^{(d/h) j}`.
    pub fn ff_norm_exponent(&self, h: usize) -> Option<BigInt> {
        match self {
            FieldBackend::FiniteField { q, d } => {
                let step = BigInt::from(*q).pow((*d as usize / h) as u32);
                let mut e = BigInt::zero();
                let mut t = BigInt::one();
                for _ in 0..h {
                    e += &t;
                    t *= &step;
                }
                Some(e)
            }
            _ => None,
        }
    }

    /// Generator `g | n` of the norm image `Im N_{K/K^H} = g Z/n`.
    fn ff_norm_generator(&self, h: usize) -> Option<BigInt> {
        let n = self.ff_modulus()?;
        Some(self.ff_norm_exponent(h)?.gcd(&n))
    }

    /// Reduction of the backend to the fixed field of the subgroup of order
    /// `kernel_order`, when representable.
    pub fn reduce(&self, kernel_order: usize) -> Option<FieldBackend> {
        if kernel_order == 1 {
            return Some(self.clone());
        }
        match self {
            FieldBackend::RealComplex if kernel_order == 2 => Some(FieldBackend::Trivial),
            FieldBackend::FiniteField { q, d } if *d as usize % kernel_order == 0 => {
                let d2 = *d / kernel_order as u64;
                Some(if d2 == 1 {
                    FieldBackend::Trivial
                } else {
                    FieldBackend::FiniteField { q: *q, d: d2 }
                })
            }
            _ => None,
        }
    }

    /// Whether `z^a = λ` is solvable in `K` for every `λ ∈ K` (needed when the
    /// class group has `a`-torsion).
    pub fn roots_exist(&self, a: &BigInt) -> bool {
        match self {
            FieldBackend::FiniteField { .. } => {
                let n = self.ff_modulus().expect("finite field");
                a.gcd(&n).is_one()
            }
            FieldBackend::RealComplex | FieldBackend::Trivial => true,
            FieldBackend::SymbolicBrauer(_) => false,
        }
    }
}

/// `(k* ∩ ⋂_i Im N_{K/K^{H_i}}) / Im N_{K/k}` where the `H_i` are the
/// subgroups of the cyclic Galois group of the given orders.
pub fn norm_quotient(
    backend: &FieldBackend,
    subgroup_orders: &[usize],
) -> Result<FGAbelianGroup, GaloisError> {
    let d = backend.group_order();
    for &h in subgroup_orders {
        if h == 0 || d % h != 0 {
            return Err(GaloisError::InvalidGroup(format!(
                "no subgroup of order {h} in Z/{d}"
            )));
        }
    }
    match backend {
        FieldBackend::Trivial => Ok(FGAbelianGroup::trivial()),
        FieldBackend::RealComplex => {
            // Im N_{C/R} = R_{>0}; the trivial subgroup gives R*.
            if subgroup_orders.contains(&2) {
                Ok(FGAbelianGroup::trivial())
            } else {
                Ok(FGAbelianGroup::cyclic(2))
            }
        }
        FieldBackend::FiniteField { .. } => {
            let mut acc = backend.ff_fixed_generator().expect("finite field");
            for &h in subgroup_orders {
                acc = acc.lcm(&backend.ff_norm_generator(h).expect("finite field"));
            }
            let full = backend.ff_norm_generator(d).expect("finite field");
            let idx = full / &acc;
            Ok(FGAbelianGroup::from_cyclic_orders(&[idx]))
        }
        FieldBackend::SymbolicBrauer(s) => s.norm_quotient(subgroup_orders),
    }
}

/// Relative Brauer group `Br(k|K) = k*/Im N_{K/k}` of the backend.
pub fn relative_brauer(backend: &FieldBackend) -> FGAbelianGroup {
    match backend {
        FieldBackend::SymbolicBrauer(s) => s.q_group(),
        _ => norm_quotient(backend, &[]).expect("empty subgroup list is valid"),
    }
}

/// Orbit of a ray under a Galois action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RayOrbit {
    pub representative: usize,
    /// Rays of the orbit in increasing order.
    pub rays: Vec<usize>,
    /// Elements of the Galois group fixing the representative.
    pub stabilizer: Vec<usize>,
    /// For each ray of the orbit, the least group element carrying the
    /// representative onto it.
    pub coset_reps: Vec<usize>,
}

/// A homomorphism from a Galois group into the automorphism group of a fan.
#[derive(Debug, Clone)]
pub struct HomClass {
    pub group: GroupSpec,
    pub target: Arc<FanAutGroup>,
    /// Image of every group element, as an index into the target.
    pub images: Vec<usize>,
}

impl HomClass {
    pub fn generator_images(&self) -> Vec<usize> {
        self.group.generators().iter().map(|&g| self.images[g]).collect()
    }

    pub fn generator_matrices(&self) -> Vec<IntMatrix> {
        self.generator_images()
            .into_iter()
            .map(|i| self.target.element(i).matrix.clone())
            .collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.images.iter().all(|&i| i == 0)
    }

    pub fn kernel(&self) -> Vec<usize> {
        (0..self.group.order()).filter(|&g| self.images[g] == 0).collect()
    }

    pub fn is_injective(&self) -> bool {
        self.kernel().len() == 1
    }

    fn ray_image(&self, g: usize, ray: usize) -> usize {
        self.target.element(self.images[g]).perm[ray]
    }

    pub fn orbits(&self) -> Vec<RayOrbit> {
        let m = self.target.fan().ray_count();
        let mut done = vec![false; m];
        let mut out = Vec::new();
        for v in 0..m {
            if done[v] {
                continue;
            }
            let mut rays: Vec<usize> = (0..self.group.order()).map(|g| self.ray_image(g, v)).collect();
            rays.sort_unstable();
            rays.dedup();
            for &r in &rays {
                done[r] = true;
            }
            let stabilizer = (0..self.group.order())
                .filter(|&g| self.ray_image(g, v) == v)
                .collect();
            let coset_reps = rays
                .iter()
                .map(|&r| {
                    (0..self.group.order())
                        .find(|&g| self.ray_image(g, v) == r)
                        .expect("ray lies in the orbit")
                })
                .collect();
            out.push(RayOrbit {
                representative: v,
                rays,
                stabilizer,
                coset_reps,
            });
        }
        out
    }

    /// Ray permutation matrix of a group element: column `j` is `e_{σ(j)}`.
    pub fn ray_permutation(&self, g: usize) -> Vec<usize> {
        self.target.element(self.images[g]).perm.clone()
    }

    /// Induced injective homomorphism from `G / ker φ`.
    pub fn kernel_reduction(&self) -> HomClass {
        let kernel = self.kernel();
        let (q, proj) = self.group.quotient(&kernel);
        let mut images = vec![0; q.order()];
        for (g, &c) in proj.iter().enumerate() {
            images[c] = self.images[g];
        }
        HomClass {
            group: q,
            target: Arc::clone(&self.target),
            images,
        }
    }
}

/// Extends generator images to a map on the whole group; `None` if the
/// assignment does not respect the relations.
fn extend_hom(group: &GroupSpec, target: &FanAutGroup, gen_images: &[usize]) -> Option<Vec<usize>> {
    let mut images = vec![usize::MAX; group.order()];
    images[0] = 0;
    let mut queue = VecDeque::from([0]);
    while let Some(x) = queue.pop_front() {
        for (&g, &img) in group.generators().iter().zip(gen_images) {
            let y = group.multiply(x, g);
            let iy = target.multiply(images[x], img);
            if images[y] == usize::MAX {
                images[y] = iy;
                queue.push_back(y);
            } else if images[y] != iy {
                return None;
            }
        }
    }
    Some(images)
}

/// All homomorphisms `group -> target` up to conjugation in the target, each
/// represented by its lexicographically least tuple of generator images.
/// Classes are listed by increasing class size, then by that tuple.
pub fn enumerate_hom_classes(group: &GroupSpec, target: &FanAutGroup) -> Vec<HomClass> {
    let target_arc = Arc::new(target.clone());
    let gens = group.generators();
    let pools: Vec<Vec<usize>> = gens
        .iter()
        .map(|&g| {
            let o = group.element_order(g);
            (0..target.order())
                .filter(|&t| o % target.element_order(t) == 0)
                .collect()
        })
        .collect();
    // Keyed by (size of the conjugacy class, least conjugate tuple), so the
    // trivial and central actions come first.
    let mut canon: std::collections::BTreeMap<(usize, Vec<usize>), Vec<usize>> = Default::default();
    let mut tuple = Vec::with_capacity(gens.len());
    enumerate_tuples(&pools, &mut tuple, &mut |t: &[usize]| {
        let Some(images) = extend_hom(group, target, t) else {
            return;
        };
        let conjugates: std::collections::BTreeSet<Vec<usize>> = (0..target.order())
            .map(|c| t.iter().map(|&x| target.conjugate(c, x)).collect())
            .collect();
        let key = conjugates.first().expect("target is nonempty").clone();
        let is_rep = key.as_slice() == t;
        match canon.entry((conjugates.len(), key)) {
            std::collections::btree_map::Entry::Vacant(slot) => {
                let imgs = if is_rep {
                    images
                } else {
                    extend_hom(group, target, &slot.key().1).expect("conjugate of a homomorphism")
                };
                slot.insert(imgs);
            }
            std::collections::btree_map::Entry::Occupied(_) => {}
        }
    });
    canon
        .into_values()
        .map(|images| HomClass {
            group: group.clone(),
            target: Arc::clone(&target_arc),
            images,
        })
        .collect()
}

fn enumerate_tuples(pools: &[Vec<usize>], cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
    if cur.len() == pools.len() {
        f(cur);
        return;
    }
    for &x in &pools[cur.len()] {
        cur.push(x);
        enumerate_tuples(pools, cur, f);
        cur.pop();
    }
}

/// Order of the subgroup; for a cyclic group this identifies it.
pub fn subgroup_order(sub: &[usize]) -> usize {
    sub.len()
}

pub fn to_u64(x: &BigInt) -> u64 {
    x.to_u64().expect("value fits in u64")
}
