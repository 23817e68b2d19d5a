//! Lattice automorphisms preserving a fan, and identification of finite
//! subgroups of `GL(2, Z)` up to conjugacy.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::fan::{Fan, FanError};
use crate::linalg::{kernel_basis, lattice_subquotient, IntMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutError {
    #[error(transparent)]
    Fan(#[from] FanError),
    #[error("rays do not span the lattice")]
    RaysNotFullRank,
    #[error("no Table-1 class matches this group of order {order}")]
    UnidentifiedClass { order: usize },
    #[error("group identification needs rank 2, got rank {0}")]
    RankUnsupported(usize),
    #[error("unknown subgroup label {0:?}")]
    UnknownLabel(String),
}

/// One automorphism: its matrix and the induced permutation of ray indices,
/// `matrix * rays[k] = rays[perm[k]]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AutElement {
    pub matrix: IntMatrix,
    pub perm: Vec<usize>,
}

/// Finite group of fan automorphisms, identity first, the rest ordered by
/// ray permutation.
#[derive(Debug, Clone)]
pub struct FanAutGroup {
    fan: Fan,
    elements: Vec<AutElement>,
    generators: Vec<usize>,
    index: HashMap<Vec<usize>, usize>,
}

impl FanAutGroup {
    fn from_elements(fan: Fan, mut elements: Vec<AutElement>) -> Self {
        elements.sort_by(|a, b| a.perm.cmp(&b.perm));
        elements.dedup_by(|a, b| a.perm == b.perm);
        let index = elements
            .iter()
            .enumerate()
            .map(|(i, e)| (e.perm.clone(), i))
            .collect();
        let mut g = FanAutGroup {
            fan,
            elements,
            generators: Vec::new(),
            index,
        };
        g.generators = g.greedy_generators();
        g
    }

    fn greedy_generators(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut span: HashSet<usize> = HashSet::from([0]);
        for i in 0..self.elements.len() {
            if span.contains(&i) {
                continue;
            }
            gens.push(i);
            span = self.closure(&gens);
        }
        gens
    }

    /// Subgroup generated by the given element indices.
    pub fn closure(&self, gens: &[usize]) -> HashSet<usize> {
        let mut seen: HashSet<usize> = HashSet::from([0]);
        let mut stack = vec![0];
        while let Some(x) = stack.pop() {
            for &g in gens {
                let y = self.multiply(x, g);
                if seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        seen
    }

    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[AutElement] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &AutElement {
        &self.elements[i]
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn matrices(&self) -> Vec<IntMatrix> {
        self.elements.iter().map(|e| e.matrix.clone()).collect()
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn index_of_perm(&self, perm: &[usize]) -> Option<usize> {
        self.index.get(perm).copied()
    }

    pub fn index_of_matrix(&self, m: &IntMatrix) -> Option<usize> {
        self.elements.iter().position(|e| e.matrix == *m)
    }

    /// Index of `elements[a] * elements[b]`.
    pub fn multiply(&self, a: usize, b: usize) -> usize {
        let pa = &self.elements[a].perm;
        let pb = &self.elements[b].perm;
        let p: Vec<usize> = pb.iter().map(|&k| pa[k]).collect();
        self.index[&p]
    }

    pub fn inverse(&self, a: usize) -> usize {
        let pa = &self.elements[a].perm;
        let mut inv = vec![0; pa.len()];
        for (k, &v) in pa.iter().enumerate() {
            inv[v] = k;
        }
        self.index[&inv]
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

    /// `g * x * g^-1`
    pub fn conjugate(&self, g: usize, x: usize) -> usize {
        self.multiply(self.multiply(g, x), self.inverse(g))
    }

    /// Conjugacy classes as sorted index lists, ordered by smallest member.
    pub fn conjugacy_classes(&self) -> Vec<Vec<usize>> {
        let mut assigned = vec![false; self.order()];
        let mut classes = Vec::new();
        for x in 0..self.order() {
            if assigned[x] {
                continue;
            }
            let mut cls: Vec<usize> = (0..self.order()).map(|g| self.conjugate(g, x)).collect();
            cls.sort_unstable();
            cls.dedup();
            for &c in &cls {
                assigned[c] = true;
            }
            classes.push(cls);
        }
        classes
    }

    /// Same matrix set as `other`.
    pub fn same_matrices(&self, other: &FanAutGroup) -> bool {
        let a: HashSet<&IntMatrix> = self.elements.iter().map(|e| &e.matrix).collect();
        let b: HashSet<&IntMatrix> = other.elements.iter().map(|e| &e.matrix).collect();
        a == b
    }
}

fn ray_columns(fan: &Fan, idx: &[usize]) -> IntMatrix {
    let cols: Vec<&[i64]> = idx.iter().map(|&i| fan.rays()[i].as_slice()).collect();
    IntMatrix::from_columns(fan.rank(), &cols)
}

/// Per-ray invariant respected by every automorphism.
fn ray_invariants(fan: &Fan) -> Vec<i64> {
    if fan.rank() == 2 {
        if let Ok((order, a)) = fan.a_sequence_with_order() {
            let mut inv = vec![0; fan.ray_count()];
            for (pos, &r) in order.iter().enumerate() {
                inv[r] = a[pos];
            }
            return inv;
        }
    }
    fan.cone_degrees().into_iter().map(|d| d as i64).collect()
}

/// Unique lattice automorphism sending frame rays to the given images, if it
/// preserves the fan.
struct Lifter<'a> {
    fan: &'a Fan,
    frame: Vec<usize>,
    adj: IntMatrix,
    det: BigInt,
    invariants: Vec<i64>,
    ray_lookup: HashMap<Vec<BigInt>, usize>,
    cone_set: HashSet<Vec<usize>>,
}

impl<'a> Lifter<'a> {
    fn new(fan: &'a Fan, frame: Vec<usize>) -> Self {
        let f = ray_columns(fan, &frame);
        let ray_lookup = fan
            .rays()
            .iter()
            .enumerate()
            .map(|(i, r)| (r.iter().map(|&x| BigInt::from(x)).collect(), i))
            .collect();
        Lifter {
            fan,
            adj: f.adjugate(),
            det: f.det(),
            invariants: ray_invariants(fan),
            frame,
            ray_lookup,
            cone_set: fan.cones().iter().cloned().collect(),
        }
    }

    fn lift(&self, images: &[usize]) -> Option<AutElement> {
        let target = ray_columns(self.fan, images);
        let scaled = &target * &self.adj;
        let mut data = Vec::with_capacity(scaled.entries().len());
        for x in scaled.entries() {
            let (q, r) = x.div_rem(&self.det);
            if !r.is_zero() {
                return None;
            }
            data.push(q);
        }
        let n = self.fan.rank();
        let matrix = IntMatrix::new(n, n, data).expect("square");
        if !matrix.det().abs().is_one() {
            return None;
        }
        let mut perm = Vec::with_capacity(self.fan.ray_count());
        let mut hit = vec![false; self.fan.ray_count()];
        for (k, r) in self.fan.rays().iter().enumerate() {
            let img = matrix.apply_i64(r);
            let &j = self.ray_lookup.get(&img)?;
            if hit[j] || self.invariants[j] != self.invariants[k] {
                return None;
            }
            hit[j] = true;
            perm.push(j);
        }
        for c in self.fan.cones() {
            let mut img: Vec<usize> = c.iter().map(|&i| perm[i]).collect();
            img.sort_unstable();
            if !self.cone_set.contains(&img) {
                return None;
            }
        }
        debug_assert!(self.frame.iter().zip(images).all(|(&f, &i)| perm[f] == i));
        Some(AutElement { matrix, perm })
    }
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.is_empty() {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let x = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, x);
            out.push(p);
        }
    }
    out
}

/// Full automorphism group by search over images of a frame of rays.
pub fn automorphism_group(fan: &Fan) -> Result<FanAutGroup, AutError> {
    let n = fan.rank();
    let m = fan.ray_count();
    let mut elements = Vec::new();

    if let Some(cone) = fan.cones().iter().find(|c| c.len() == n) {
        // Images of a full-dimensional cone are full-dimensional cones.
        let lifter = Lifter::new(fan, cone.clone());
        for target in fan.cones().iter().filter(|c| c.len() == n) {
            for images in permutations(target) {
                if images
                    .iter()
                    .zip(cone)
                    .any(|(&i, &f)| lifter.invariants[i] != lifter.invariants[f])
                {
                    continue;
                }
                if let Some(e) = lifter.lift(&images) {
                    elements.push(e);
                }
            }
        }
    } else {
        let mut frame: Vec<usize> = Vec::new();
        for i in 0..m {
            let mut trial = frame.clone();
            trial.push(i);
            if crate::linalg::smith_normal_form(&ray_columns(fan, &trial)).rank() == trial.len() {
                frame = trial;
            }
            if frame.len() == n {
                break;
            }
        }
        if frame.len() < n {
            return Err(AutError::RaysNotFullRank);
        }
        let lifter = Lifter::new(fan, frame.clone());
        let mut images = Vec::with_capacity(n);
        search_frame_images(&lifter, &frame, &mut images, &mut elements);
    }
    Ok(FanAutGroup::from_elements(fan.clone(), elements))
}

fn search_frame_images(
    lifter: &Lifter<'_>,
    frame: &[usize],
    images: &mut Vec<usize>,
    out: &mut Vec<AutElement>,
) {
    if images.len() == frame.len() {
        if let Some(e) = lifter.lift(images) {
            out.push(e);
        }
        return;
    }
    let want = lifter.invariants[frame[images.len()]];
    for j in 0..lifter.fan.ray_count() {
        if images.contains(&j) || lifter.invariants[j] != want {
            continue;
        }
        images.push(j);
        search_frame_images(lifter, frame, images, out);
        images.pop();
    }
}

/// Automorphism group of a smooth complete rank-2 fan from the dihedral
/// symmetries of its cyclic `a` sequence.
pub fn aut_via_sequence(fan: &Fan) -> Result<FanAutGroup, AutError> {
    let (order, a) = fan.a_sequence_with_order()?;
    let m = order.len();
    let frame = vec![order[0], order[1]];
    let lifter = Lifter::new(fan, frame);
    let mut elements = Vec::new();
    for shift in 0..m {
        for reflect in [false, true] {
            let pos = |i: usize| {
                if reflect {
                    (shift + m - i % m) % m
                } else {
                    (shift + i) % m
                }
            };
            if (0..m).any(|i| a[pos(i)] != a[i]) {
                continue;
            }
            let images = [order[pos(0)], order[pos(1)]];
            let e = lifter
                .lift(&images)
                .expect("a sequence symmetry lifts to a fan automorphism");
            elements.push(e);
        }
    }
    Ok(FanAutGroup::from_elements(fan.clone(), elements))
}

/// Conjugacy classes of finite subgroups of `GL(2, Z)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gl2Label {
    C1,
    C2,
    C3,
    C4,
    C6,
    D2,
    D2p,
    D4,
    D4p,
    D6,
    D6p,
    D8,
    D12,
}

impl Gl2Label {
    pub const ALL: [Gl2Label; 13] = [
        Gl2Label::D12,
        Gl2Label::D6,
        Gl2Label::D6p,
        Gl2Label::C6,
        Gl2Label::C3,
        Gl2Label::D8,
        Gl2Label::D4,
        Gl2Label::D4p,
        Gl2Label::C4,
        Gl2Label::C2,
        Gl2Label::D2,
        Gl2Label::D2p,
        Gl2Label::C1,
    ];

    pub fn order(self) -> usize {
        match self {
            Gl2Label::C1 => 1,
            Gl2Label::C2 | Gl2Label::D2 | Gl2Label::D2p => 2,
            Gl2Label::C3 => 3,
            Gl2Label::C4 | Gl2Label::D4 | Gl2Label::D4p => 4,
            Gl2Label::C6 | Gl2Label::D6 | Gl2Label::D6p => 6,
            Gl2Label::D8 => 8,
            Gl2Label::D12 => 12,
        }
    }

    /// Short ASCII name usable in identifiers (`D6p` for D6').
    pub fn ascii(self) -> &'static str {
        match self {
            Gl2Label::C1 => "C1",
            Gl2Label::C2 => "C2",
            Gl2Label::C3 => "C3",
            Gl2Label::C4 => "C4",
            Gl2Label::C6 => "C6",
            Gl2Label::D2 => "D2",
            Gl2Label::D2p => "D2p",
            Gl2Label::D4 => "D4",
            Gl2Label::D4p => "D4p",
            Gl2Label::D6 => "D6",
            Gl2Label::D6p => "D6p",
            Gl2Label::D8 => "D8",
            Gl2Label::D12 => "D12",
        }
    }

    /// Generators as listed in the standard table of finite subgroups.
    pub fn generators(self) -> Vec<IntMatrix> {
        let a = IntMatrix::from_rows(&[[0, -1], [1, 1]]);
        let b = IntMatrix::from_rows(&[[0, -1], [1, 0]]);
        let c = IntMatrix::from_rows(&[[1, 0], [0, -1]]);
        let j = IntMatrix::from_rows(&[[0, 1], [1, 0]]);
        let i = IntMatrix::identity(2);
        let mi = -&i;
        let a2 = &a * &a;
        match self {
            Gl2Label::C1 => vec![i],
            Gl2Label::C2 => vec![mi],
            Gl2Label::C3 => vec![a2],
            Gl2Label::C4 => vec![b],
            Gl2Label::C6 => vec![a],
            Gl2Label::D2 => vec![c],
            Gl2Label::D2p => vec![j],
            Gl2Label::D4 => vec![mi, c],
            Gl2Label::D4p => vec![mi, j],
            Gl2Label::D6 => vec![a2, &j * &a],
            Gl2Label::D6p => vec![a2, j],
            Gl2Label::D8 => vec![b, j],
            Gl2Label::D12 => vec![a, j],
        }
    }
}

impl fmt::Display for Gl2Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.ascii();
        match s.strip_suffix('p') {
            Some(base) => write!(f, "{base}'"),
            None => write!(f, "{s}"),
        }
    }
}

impl FromStr for Gl2Label {
    type Err = AutError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().replace('\'', "p");
        Gl2Label::ALL
            .into_iter()
            .find(|l| l.ascii().eq_ignore_ascii_case(&norm))
            .ok_or_else(|| AutError::UnknownLabel(s.to_string()))
    }
}

/// Identified conjugacy class with a witness `P` such that
/// `P * <canonical generators> * P^-1` is the given group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GL2ClassLabel {
    pub label: Gl2Label,
    pub witness: IntMatrix,
}

/// Closure of a set of invertible matrices under multiplication (finite groups only).
pub fn matrix_group_closure(gens: &[IntMatrix], dim: usize) -> Vec<IntMatrix> {
    let id = IntMatrix::identity(dim);
    let mut seen: HashSet<IntMatrix> = HashSet::from([id.clone()]);
    let mut out = vec![id.clone()];
    let mut stack = vec![id];
    while let Some(x) = stack.pop() {
        for g in gens {
            let y = &x * g;
            if seen.insert(y.clone()) {
                out.push(y.clone());
                stack.push(y);
            }
        }
    }
    out.sort();
    out
}

fn matrix_order(m: &IntMatrix, limit: usize) -> Option<usize> {
    let mut x = m.clone();
    for k in 1..=limit {
        if x.is_identity() {
            return Some(k);
        }
        x = &x * m;
    }
    None
}

fn trace(m: &IntMatrix) -> BigInt {
    (0..m.rows()).map(|i| m.get(i, i).clone()).sum()
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Pairwise size reduction of a lattice basis.
fn size_reduce(mut basis: Vec<Vec<BigInt>>) -> Vec<Vec<BigInt>> {
    loop {
        let mut changed = false;
        for i in 0..basis.len() {
            for j in 0..basis.len() {
                if i == j {
                    continue;
                }
                let nj = dot(&basis[j], &basis[j]);
                if nj.is_zero() {
                    continue;
                }
                let num = dot(&basis[i], &basis[j]);
                // nearest integer to num / nj
                let mu = (BigInt::from(2) * &num + &nj).div_floor(&(BigInt::from(2) * &nj));
                if mu.is_zero() {
                    continue;
                }
                let cand: Vec<BigInt> =
                    basis[i].iter().zip(&basis[j]).map(|(a, b)| a - &mu * b).collect();
                if dot(&cand, &cand) < dot(&basis[i], &basis[i]) {
                    basis[i] = cand;
                    changed = true;
                }
            }
        }
        if !changed {
            return basis;
        }
    }
}

/// Coefficient vectors in `[-bound, bound]^k`, smallest max-norm first.
fn coefficient_shells(k: usize, bound: i64) -> Vec<Vec<i64>> {
    let mut all: Vec<Vec<i64>> = vec![Vec::new()];
    for _ in 0..k {
        all = all
            .into_iter()
            .flat_map(|v| {
                (-bound..=bound).map(move |c| {
                    let mut w = v.clone();
                    w.push(c);
                    w
                })
            })
            .collect();
    }
    all.sort_by_key(|v| {
        (
            v.iter().map(|c| c.abs()).max().unwrap_or(0),
            v.iter().map(|c| c.abs()).sum::<i64>(),
            v.clone(),
        )
    });
    all
}

const WITNESS_BOUND: i64 = 5;

/// Unimodular `P` with `P * canonical[i] = images[i] * P` for all `i`.
fn intertwiner(canonical: &[IntMatrix], images: &[IntMatrix]) -> Option<IntMatrix> {
    // Unknown P = [[p0, p1], [p2, p3]] flattened row-major.
    let mut eqs: Vec<Vec<BigInt>> = Vec::new();
    for (g, h) in canonical.iter().zip(images) {
        for r in 0..2 {
            for c in 0..2 {
                // (P g)[r][c] - (h P)[r][c]
                let mut row = vec![BigInt::zero(); 4];
                for k in 0..2 {
                    row[r * 2 + k] += g.get(k, c);
                    row[k * 2 + c] -= h.get(r, k);
                }
                eqs.push(row);
            }
        }
    }
    let mut sys = IntMatrix::zeros(eqs.len(), 4);
    for (r, row) in eqs.into_iter().enumerate() {
        for (c, x) in row.into_iter().enumerate() {
            sys.set(r, c, x);
        }
    }
    let ker = kernel_basis(&sys);
    if ker.cols() == 0 {
        return None;
    }
    let basis = size_reduce(ker.columns());
    static SHELLS: [OnceLock<Vec<Vec<i64>>>; 5] =
        [OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new(), OnceLock::new()];
    let shells = SHELLS[basis.len()].get_or_init(|| coefficient_shells(basis.len(), WITNESS_BOUND));
    for coeffs in shells {
        let mut p = vec![BigInt::zero(); 4];
        for (c, b) in coeffs.iter().zip(&basis) {
            for (x, y) in p.iter_mut().zip(b) {
                *x += BigInt::from(*c) * y;
            }
        }
        let pm = IntMatrix::new(2, 2, p).expect("2x2");
        if pm.det().abs().is_one() {
            return Some(pm);
        }
    }
    None
}

fn tuples(pools: &[Vec<&IntMatrix>]) -> Vec<Vec<IntMatrix>> {
    let mut out: Vec<Vec<IntMatrix>> = vec![Vec::new()];
    for pool in pools {
        out = out
            .into_iter()
            .flat_map(|t| {
                pool.iter().map(move |m| {
                    let mut t = t.clone();
                    t.push((*m).clone());
                    t
                })
            })
            .collect();
    }
    out
}

/// Identifies a finite matrix group in `GL(2, Z)` given by its elements.
pub fn identify_gl2_matrices(group: &[IntMatrix]) -> Result<GL2ClassLabel, AutError> {
    if let Some(m) = group.first() {
        if m.rows() != 2 {
            return Err(AutError::RankUnsupported(m.rows()));
        }
    }
    let order = group.len();
    let set: HashSet<&IntMatrix> = group.iter().collect();
    for label in Gl2Label::ALL.into_iter().filter(|l| l.order() == order) {
        let canon = label.generators();
        let pools: Vec<Vec<&IntMatrix>> = canon
            .iter()
            .map(|g| {
                let og = matrix_order(g, 12);
                let tg = trace(g);
                let dg = g.det();
                group
                    .iter()
                    .filter(|h| matrix_order(h, 12) == og && trace(h) == tg && h.det() == dg)
                    .collect()
            })
            .collect();
        for images in tuples(&pools) {
            let Some(p) = intertwiner(&canon, &images) else {
                continue;
            };
            let generated = matrix_group_closure(&images, 2);
            if generated.len() == order && generated.iter().all(|x| set.contains(x)) {
                return Ok(GL2ClassLabel { label, witness: p });
            }
        }
    }
    Err(AutError::UnidentifiedClass { order })
}

pub fn identify_gl2_class(group: &FanAutGroup) -> Result<GL2ClassLabel, AutError> {
    if group.fan().rank() != 2 {
        return Err(AutError::RankUnsupported(group.fan().rank()));
    }
    identify_gl2_matrices(&group.matrices())
}

/// Conjugacy type of an element of order at most two in `GL(2, Z)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InvolutionType {
    Identity,
    MinusIdentity,
    /// conjugate to `diag(1, -1)`
    CType,
    /// conjugate to the coordinate swap
    JType,
}

impl fmt::Display for InvolutionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            InvolutionType::Identity => "I",
            InvolutionType::MinusIdentity => "-I",
            InvolutionType::CType => "C",
            InvolutionType::JType => "J",
        };
        write!(f, "{s}")
    }
}

/// Classifies `s` (with `s^2 = 1`) by the index of `ker(s-1) + ker(s+1)` in `Z^2`.
pub fn involution_type(s: &IntMatrix) -> Option<InvolutionType> {
    if s.rows() != 2 || !(s * s).is_identity() {
        return None;
    }
    let id = IntMatrix::identity(2);
    if s.is_identity() {
        return Some(InvolutionType::Identity);
    }
    if *s == -&id {
        return Some(InvolutionType::MinusIdentity);
    }
    let plus = kernel_basis(&(s - &id));
    let minus = kernel_basis(&(s + &id));
    let eig = plus.hstack(&minus).expect("same rows");
    let q = lattice_subquotient(&id, &eig).ok()?;
    match q.order()?.to_u64()? {
        1 => Some(InvolutionType::CType),
        2 => Some(InvolutionType::JType),
        _ => None,
    }
}
