//! First Galois cohomology of twisted tori, computed three independent ways.
//!
//! * `h1_real_involution`: closed form for `C/R`.
//! * `h1_cyclic_norm_formula`: the norm-quotient description through the Cox
//!   sequence `1 -> G -> G_m^{rays} -> T_N -> 1`.
//! * `brute_force_h1_finite` / `h1_finite_field_torus`: literal cocycles on
//!   the finite module `N ⊗ F_{q^d}*`, and its cyclic ker/im description.
//!
//! # The `C/R` formula
//!
//! Write `C* = R_{>0} × S^1`; conjugation fixes the first factor and inverts
//! the second. Then `N ⊗ C* = (N ⊗ R_{>0}) × (N ⊗ R/Z)` as Galois modules.
//! The first factor is a uniquely divisible group, so its cohomology in
//! positive degree vanishes. On `N ⊗ R/Z` the generator acts by `-S`. From
//! `0 -> N -> N ⊗ R -> N ⊗ R/Z -> 0` (action `-S`) and the vanishing of the
//! cohomology of the vector space `N ⊗ R`, the connecting map gives
//! `H^1(N ⊗ R/Z) = H^2(Z/2, N_{-S}) = ker(1 + S) / (1 - S) N`.
//!
//! # The `C/R` norm formula
//!
//! With the same splitting, the positive part of the Cox group contributes
//! nothing and the norm quotient becomes a quotient of subgroups of the
//! torus `R^m / Z^m`. Passing to Pontryagin duals turns it into
//! `Λ_Y / Λ_Z` inside `Z^m`, where `Λ_W` is the row span of the ray matrix
//! `R`, `Λ_Y = {c : (1 - P)^T c ∈ Λ_W}` and `Λ_Z` is spanned by the rows of
//! `R`, the rows of `1 + P` and `e_ρ` for every ray fixed by the
//! permutation `P`.

use std::collections::{HashSet, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use thiserror::Error;

use crate::fan::Fan;
use crate::galois::{norm_quotient, FieldBackend, GaloisError, GroupSpec, HomClass};
use crate::linalg::{
    kernel_basis, kernel_mod, lattice_basis, lattice_intersection, lattice_subquotient,
    FGAbelianGroup, IntMatrix,
};

/// Bound on `|M|^{generators}` for cocycle enumeration.
pub const ENUMERATION_GUARD: u128 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CohomologyError {
    #[error("matrix is not an involution")]
    NotInvolution,
    #[error("enumeration of {size} cocycle candidates exceeds the guard of {ENUMERATION_GUARD}")]
    TooLarge { size: u128 },
    #[error("the norm formula needs a cyclic Galois group")]
    NonCyclicGroup,
    #[error(
        "class group has torsion of order {factor} but the backend does not supply \
         {factor}-th roots of every element"
    )]
    AssumptionViolated { factor: BigInt },
    #[error("backend unsupported: {0}")]
    BackendUnsupported(String),
    #[error("Galois group of order {group} does not match the backend's extension of degree {backend}")]
    GroupMismatch { group: usize, backend: usize },
    #[error("invalid module: {0}")]
    InvalidModule(String),
    #[error(transparent)]
    Galois(#[from] GaloisError),
}

/// `H^1(Gal(C/R), N ⊗ C*)` with conjugation twisted by the involution `s`.
pub fn h1_real_involution(s: &IntMatrix) -> Result<FGAbelianGroup, CohomologyError> {
    if !s.is_square() || !(s * s).is_identity() {
        return Err(CohomologyError::NotInvolution);
    }
    let id = IntMatrix::identity(s.rows());
    let ker = kernel_basis(&(s + &id));
    let im = &id - s;
    Ok(lattice_subquotient(&ker, &im).expect("(1 - S)N lies in ker(1 + S)"))
}

/// A lattice with a group acting through the given generator matrices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeAction {
    pub rank: usize,
    pub generators: Vec<IntMatrix>,
}

impl LatticeAction {
    pub fn from_hom(hom: &HomClass) -> Self {
        LatticeAction {
            rank: hom.target.fan().rank(),
            generators: hom.generator_matrices(),
        }
    }
}

/// `H^1` of a cyclic group of order `order`, generated by `gen`, acting on
/// `(Z/n)^r`: `ker(norm) / im(gen - 1)`.
pub fn h1_cyclic_on_mod_n(n: &BigInt, gen: &IntMatrix, order: usize) -> FGAbelianGroup {
    let r = gen.rows();
    let id = IntMatrix::identity(r);
    let mut norm = IntMatrix::zeros(r, r);
    let mut pow = id.clone();
    for _ in 0..order {
        norm = &norm + &pow;
        pow = (&pow * gen).reduce_mod(n);
    }
    let ker = kernel_mod(&norm, n);
    let im = (gen - &id).hstack(&id.scale(n)).expect("same rows");
    lattice_subquotient(&ker, &im).expect("(g - 1) lands in the kernel of the norm")
}

/// `H^1(Gal(F_{q^d}/F_q), N ⊗ F_{q^d}*)` with Frobenius acting by `v -> q S v`.
pub fn h1_finite_field_torus(
    q: u64,
    d: u64,
    s: &IntMatrix,
) -> Result<FGAbelianGroup, CohomologyError> {
    if !s.is_square() || !s.pow(d as u32).is_identity() {
        return Err(CohomologyError::InvalidModule(format!(
            "action matrix does not satisfy S^{d} = 1"
        )));
    }
    let n = BigInt::from(q).pow(d as u32) - BigInt::one();
    let gen = s.scale(&BigInt::from(q));
    Ok(h1_cyclic_on_mod_n(&n, &gen, d as usize))
}

/// `⊕ Z/moduli[i]` with a group acting through generator matrices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteModule {
    pub moduli: Vec<u64>,
    pub generators: Vec<IntMatrix>,
}

impl FiniteModule {
    /// `(Z/n)^r` with generator `i` acting by `twist * matrices[i]`.
    pub fn from_lattice_action(action: &LatticeAction, n: u64, twist: i64) -> Self {
        FiniteModule {
            moduli: vec![n; action.rank],
            generators: action
                .generators
                .iter()
                .map(|m| m.scale(&BigInt::from(twist)))
                .collect(),
        }
    }

    pub fn order(&self) -> u128 {
        self.moduli.iter().map(|&a| a as u128).product()
    }
}

/// Module elements are handled as residue vectors with a mixed-radix code.
struct ModuleArith {
    moduli: Vec<u64>,
}

impl ModuleArith {
    fn decode(&self, mut code: u64) -> Vec<u64> {
        self.moduli
            .iter()
            .map(|&a| {
                let x = code % a;
                code /= a;
                x
            })
            .collect()
    }

    fn encode(&self, v: &[u64]) -> u64 {
        let mut code = 0u64;
        for (x, &a) in v.iter().zip(&self.moduli).rev() {
            code = code * a + x;
        }
        code
    }

    fn apply(&self, m: &[Vec<i64>], v: &[u64]) -> Vec<u64> {
        m.iter()
            .zip(&self.moduli)
            .map(|(row, &a)| {
                let s: i128 = row.iter().zip(v).map(|(&c, &x)| c as i128 * x as i128).sum();
                s.rem_euclid(a as i128) as u64
            })
            .collect()
    }

    fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter()
            .zip(b)
            .zip(&self.moduli)
            .map(|((&x, &y), &m)| (x + y) % m)
            .collect()
    }

    fn scale(&self, a: &[u64], k: u64) -> Vec<u64> {
        a.iter()
            .zip(&self.moduli)
            .map(|(&x, &m)| (x as u128 * k as u128 % m as u128) as u64)
            .collect()
    }

    fn sub(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter()
            .zip(b)
            .zip(&self.moduli)
            .map(|((&x, &y), &m)| (x + m - y) % m)
            .collect()
    }
}

fn prime_factors(mut n: u128) -> Vec<u128> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// `Z^1 / B^1` by literal enumeration of cocycles `c_{gh} = c_g + g c_h`.
pub fn brute_force_h1_finite(
    group: &GroupSpec,
    module: &FiniteModule,
) -> Result<FGAbelianGroup, CohomologyError> {
    let gens = group.generators();
    if module.generators.len() != gens.len() {
        return Err(CohomologyError::InvalidModule(format!(
            "{} action matrices for {} group generators",
            module.generators.len(),
            gens.len()
        )));
    }
    let r = module.moduli.len();
    if module.moduli.contains(&0) {
        return Err(CohomologyError::InvalidModule("modulus 0 is not finite".into()));
    }
    let arith = ModuleArith {
        moduli: module.moduli.clone(),
    };
    let mut gen_acts = Vec::with_capacity(gens.len());
    for m in &module.generators {
        if m.rows() != r || m.cols() != r {
            return Err(CohomologyError::InvalidModule("action matrix has wrong shape".into()));
        }
        let rows: Vec<Vec<i64>> = (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| {
                        m.get(i, j)
                            .mod_floor(&BigInt::from(module.moduli[i]))
                            .to_i64()
                            .expect("reduced entry fits")
                    })
                    .collect()
            })
            .collect();
        for i in 0..r {
            for j in 0..r {
                if (rows[i][j] as u128 * module.moduli[j] as u128) % module.moduli[i] as u128 != 0 {
                    return Err(CohomologyError::InvalidModule(
                        "matrix does not respect the invariant factors".into(),
                    ));
                }
            }
        }
        gen_acts.push(rows);
    }

    let size = module.order();
    let candidates = size
        .checked_pow(gens.len() as u32)
        .filter(|&c| c <= ENUMERATION_GUARD)
        .ok_or(CohomologyError::TooLarge {
            size: size.saturating_pow(gens.len() as u32),
        })?;

    // Action of every group element, and a spanning tree of the Cayley graph.
    let compose = |a: &[Vec<i64>], b: &[Vec<i64>]| -> Vec<Vec<i64>> {
        (0..r)
            .map(|i| {
                (0..r)
                    .map(|j| {
                        let s: i128 = (0..r).map(|k| a[i][k] as i128 * b[k][j] as i128).sum();
                        s.rem_euclid(module.moduli[i] as i128) as i64
                    })
                    .collect()
            })
            .collect()
    };
    let n = group.order();
    let identity: Vec<Vec<i64>> = (0..r)
        .map(|i| (0..r).map(|j| i64::from(i == j)).collect())
        .collect();
    let mut acts: Vec<Option<Vec<Vec<i64>>>> = vec![None; n];
    acts[0] = Some(identity);
    // (x, generator position, y = x g, is_tree_edge)
    let mut edges = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(x) = queue.pop_front() {
        for (gi, &g) in gens.iter().enumerate() {
            let y = group.multiply(x, g);
            let ay = compose(acts[x].as_ref().expect("visited"), &gen_acts[gi]);
            match &acts[y] {
                None => {
                    acts[y] = Some(ay);
                    queue.push_back(y);
                    edges.push((x, gi, y, true));
                }
                Some(existing) => {
                    if *existing != ay {
                        return Err(CohomologyError::InvalidModule(
                            "action does not satisfy the group relations".into(),
                        ));
                    }
                    edges.push((x, gi, y, false));
                }
            }
        }
    }
    let acts: Vec<Vec<Vec<i64>>> = acts.into_iter().map(|a| a.expect("group is generated")).collect();

    let gcount = gens.len();
    let size64 = size as u64;
    let split = |code: u64| -> Vec<Vec<u64>> {
        let mut c = code;
        (0..gcount)
            .map(|_| {
                let v = arith.decode(c % size64);
                c /= size64;
                v
            })
            .collect()
    };
    let join = |vals: &[Vec<u64>]| -> u64 {
        let mut code = 0u64;
        for v in vals.iter().rev() {
            code = code * size64 + arith.encode(v);
        }
        code
    };

    let mut cocycles = Vec::new();
    let mut c: Vec<Vec<u64>> = vec![vec![0; r]; n];
    'candidates: for code in 0..candidates as u64 {
        let vals = split(code);
        for &(x, gi, y, tree) in &edges {
            let v = arith.add(&c[x], &arith.apply(&acts[x], &vals[gi]));
            if tree {
                c[y] = v;
            } else if c[y] != v {
                continue 'candidates;
            }
        }
        cocycles.push(code);
    }
    let mut coboundaries = HashSet::new();
    for b in 0..size64 {
        let bv = arith.decode(b);
        let vals: Vec<Vec<u64>> = gen_acts
            .iter()
            .map(|m| arith.sub(&arith.apply(m, &bv), &bv))
            .collect();
        coboundaries.insert(join(&vals));
    }

    let h_order = cocycles.len() as u128 / coboundaries.len() as u128;
    let mut orders = Vec::new();
    for p in prime_factors(h_order) {
        let mut p_part = 1u128;
        let mut t = h_order;
        while t % p == 0 {
            t /= p;
            p_part *= p;
        }
        // log_p |H[p^j]| for j = 0, 1, ...
        let mut logs = vec![0u32];
        let mut pj = 1u64;
        loop {
            pj *= p as u64;
            let count = cocycles
                .iter()
                .filter(|&&z| {
                    let vals: Vec<Vec<u64>> = split(z).iter().map(|v| arith.scale(v, pj)).collect();
                    coboundaries.contains(&join(&vals))
                })
                .count() as u128
                / coboundaries.len() as u128;
            logs.push(count.ilog(p));
            if count == p_part {
                break;
            }
        }
        let ge: Vec<u32> = logs.windows(2).map(|w| w[1] - w[0]).collect();
        for j in 0..ge.len() {
            let next = ge.get(j + 1).copied().unwrap_or(0);
            for _ in 0..ge[j] - next {
                orders.push(BigInt::from(p).pow(j as u32 + 1));
            }
        }
    }
    Ok(FGAbelianGroup::from_cyclic_orders(&orders))
}

/// Whether the fan's class group is `Z` with degree row `±(1, ..., 1)`.
fn diagonal_class_group(fan: &Fan) -> bool {
    let cox = fan.cox_data();
    if cox.class_group != FGAbelianGroup::free(1) || cox.degree_matrix.rows() != 1 {
        return false;
    }
    let row = cox.degree_matrix.row(0);
    let first = row[0].clone();
    (first.is_one() || first == -BigInt::one()) && row.iter().all(|x| *x == first)
}

fn check_assumption(fan: &Fan, backend: &FieldBackend) -> Result<(), CohomologyError> {
    for a in &fan.class_group().invariant_factors {
        if !backend.roots_exist(a) {
            return Err(CohomologyError::AssumptionViolated { factor: a.clone() });
        }
    }
    Ok(())
}

/// Column `j` is `e_{perm[j]}`.
fn permutation_matrix(perm: &[usize]) -> IntMatrix {
    let m = perm.len();
    let mut p = IntMatrix::zeros(m, m);
    for (j, &i) in perm.iter().enumerate() {
        p.set(i, j, BigInt::one());
    }
    p
}

/// `H^1(K/k, T_φ)` through the norm description for a cyclic extension.
pub fn h1_cyclic_norm_formula(
    hom: &HomClass,
    backend: &FieldBackend,
) -> Result<FGAbelianGroup, CohomologyError> {
    let d = hom.group.cyclic_order().ok_or(CohomologyError::NonCyclicGroup)?;
    if d != backend.group_order() {
        return Err(CohomologyError::GroupMismatch {
            group: d,
            backend: backend.group_order(),
        });
    }
    let fan = hom.target.fan();
    check_assumption(fan, backend)?;
    if matches!(backend, FieldBackend::Trivial) {
        return Ok(FGAbelianGroup::trivial());
    }
    if diagonal_class_group(fan) {
        let stabs: Vec<usize> = hom.orbits().iter().map(|o| o.stabilizer.len()).collect();
        return Ok(norm_quotient(backend, &stabs)?);
    }
    match backend {
        FieldBackend::RealComplex => Ok(real_norm_formula(hom)),
        FieldBackend::FiniteField { .. } => Ok(finite_field_norm_formula(hom, backend, true)),
        FieldBackend::SymbolicBrauer(_) if hom.is_trivial() => Ok(FGAbelianGroup::trivial()),
        FieldBackend::SymbolicBrauer(_) => Err(CohomologyError::BackendUnsupported(
            "symbolic norm data covers only fans with diagonal class group Z".into(),
        )),
        FieldBackend::Trivial => unreachable!("handled above"),
    }
}

/// Dual lattice form of the norm quotient over `C/R`.
fn real_norm_formula(hom: &HomClass) -> FGAbelianGroup {
    let fan = hom.target.fan();
    let m = fan.ray_count();
    let r = fan.ray_matrix();
    let perm = hom.ray_permutation(1);
    let p = permutation_matrix(&perm);
    let id = IntMatrix::identity(m);

    // Λ_Y = {c : (1 - P)^T c ∈ row span of R}
    let lhs = (&id - &p).transpose();
    let joint = lhs.hstack(&-&r.transpose()).expect("same rows");
    let ker = kernel_basis(&joint);
    let lambda_y = lattice_basis(&ker.select_rows(&(0..m).collect::<Vec<_>>()));

    let mut z = r.transpose().hstack(&(&id + &p).transpose()).expect("same rows");
    for (j, &i) in perm.iter().enumerate() {
        if i == j {
            let mut e = IntMatrix::zeros(m, 1);
            e.set(j, 0, BigInt::one());
            z = z.hstack(&e).expect("same rows");
        }
    }
    lattice_subquotient(&lambda_y, &z).expect("Λ_Z lies in Λ_Y")
}

/// Norm quotient on `K* = Z/n`, with every subgroup represented by its
/// preimage lattice in `Z^{rays}`. `via_orbits` selects the orbit-stabilizer
/// description of the norm image instead of the direct norm.
pub fn finite_field_norm_formula(
    hom: &HomClass,
    backend: &FieldBackend,
    via_orbits: bool,
) -> FGAbelianGroup {
    let FieldBackend::FiniteField { q, d } = *backend else {
        panic!("finite field backend expected");
    };
    let n = backend.ff_modulus().expect("finite field");
    let fan = hom.target.fan();
    let m = fan.ray_count();
    let id = IntMatrix::identity(m);
    let n_id = id.scale(&n);
    let qb = BigInt::from(q);
    let order = hom.group.order();

    // Frobenius^k acts on (Z/n)^m by q^k P_k.
    let frob = |k: usize| -> IntMatrix {
        permutation_matrix(&hom.ray_permutation(k % order)).scale(&qb.pow(k as u32))
    };
    let gen = frob(1);
    let d = d as usize;
    let mut norm = IntMatrix::zeros(m, m);
    for k in 0..d {
        norm = &norm + &frob(k);
    }
    let norm = norm.reduce_mod(&n);

    let a = kernel_mod(&fan.ray_matrix(), &n);
    let fixed = lattice_intersection(&a, &kernel_mod(&(&gen - &id), &n)).expect("same dimension");

    let big_norm_image = if via_orbits {
        let mut cols = n_id.clone();
        for orbit in hom.orbits() {
            let h = orbit.stabilizer.len();
            let e = backend.ff_norm_exponent(h).expect("finite field");
            let mut v = IntMatrix::zeros(m, 1);
            for (&ray, &g) in orbit.rays.iter().zip(&orbit.coset_reps) {
                v.set(ray, 0, (&e * qb.pow(g as u32)).mod_floor(&n));
            }
            cols = cols.hstack(&v).expect("same rows");
        }
        cols
    } else {
        norm.hstack(&n_id).expect("same rows")
    };
    let numerator = lattice_intersection(&fixed, &big_norm_image).expect("same dimension");
    let denominator = (&norm * &a).hstack(&n_id).expect("same rows");
    lattice_subquotient(&numerator, &denominator).expect("norms of A are fixed norms")
}

/// `H^1(G_i, K*)` for the stabilizer of each ray orbit; all trivial by Hilbert 90.
pub fn shapiro_orbit_h1(
    hom: &HomClass,
    backend: &FieldBackend,
) -> Result<Vec<FGAbelianGroup>, CohomologyError> {
    let d = backend.group_order();
    hom.orbits()
        .iter()
        .map(|o| {
            let h = o.stabilizer.len();
            match backend {
                FieldBackend::Trivial => Ok(FGAbelianGroup::trivial()),
                FieldBackend::RealComplex => {
                    if h == 1 {
                        Ok(FGAbelianGroup::trivial())
                    } else {
                        h1_real_involution(&IntMatrix::identity(1))
                    }
                }
                FieldBackend::FiniteField { q, .. } => {
                    let n = backend.ff_modulus().expect("finite field");
                    let step = BigInt::from(*q).pow((d / h) as u32);
                    Ok(h1_cyclic_on_mod_n(&n, &IntMatrix::diagonal(1, 1, &[step]), h))
                }
                FieldBackend::SymbolicBrauer(_) => Err(CohomologyError::BackendUnsupported(
                    "orbit self-test needs a concrete field".into(),
                )),
            }
        })
        .collect()
}
