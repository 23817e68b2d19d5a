//! Fans in a lattice `N = Z^n`: validation, class group, Cox data and the
//! rank-2 cyclic self-intersection sequence.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{
    cokernel_presentation, kernel_basis, smith_normal_form, FGAbelianGroup, IntMatrix,
};

/// Largest column count for the exact circuit test on a pair of cones.
const MAX_CIRCUIT_COLUMNS: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FanViolation {
    DimensionMismatch { ray: usize, len: usize },
    BadConeIndex { cone: usize, index: usize },
    NonPrimitiveRay { ray: usize },
    DuplicateRay { first: usize, second: usize },
    NonSimplicialCone { cone: usize },
    BadFaceIntersection { first: usize, second: usize },
    UnusedRay { ray: usize },
    RaysNotFullRank { span_rank: usize, saturated_span: Vec<Vec<BigInt>> },
}

impl fmt::Display for FanViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FanViolation::DimensionMismatch { ray, len } => {
                write!(f, "ray {ray} has {len} coordinates")
            }
            FanViolation::BadConeIndex { cone, index } => {
                write!(f, "cone {cone} refers to invalid or repeated ray index {index}")
            }
            FanViolation::NonPrimitiveRay { ray } => write!(f, "ray {ray} is not primitive"),
            FanViolation::DuplicateRay { first, second } => {
                write!(f, "rays {first} and {second} coincide")
            }
            FanViolation::NonSimplicialCone { cone } => {
                write!(f, "cone {cone} is not simplicial")
            }
            FanViolation::BadFaceIntersection { first, second } => write!(
                f,
                "cones {first} and {second} do not meet in a common face"
            ),
            FanViolation::UnusedRay { ray } => write!(f, "ray {ray} lies in no cone"),
            FanViolation::RaysNotFullRank {
                span_rank,
                saturated_span,
            } => {
                let basis: Vec<String> = saturated_span
                    .iter()
                    .map(|v| {
                        let parts: Vec<String> = v.iter().map(ToString::to_string).collect();
                        format!("({})", parts.join(","))
                    })
                    .collect();
                write!(
                    f,
                    "rays span a rank-{span_rank} sublattice; the variety splits off a torus factor \
                     over the saturated span N' = <{}>",
                    basis.join(", ")
                )
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FanError {
    #[error("invalid fan: {}", join_violations(.0))]
    Invalid(Vec<FanViolation>),
    #[error("operation needs rank 2, fan has rank {0}")]
    RankUnsupported(usize),
    #[error("fan is not a smooth complete rank-2 fan")]
    NotSmoothComplete,
    #[error("malformed fan JSON: {0}")]
    Json(String),
}

fn join_violations(v: &[FanViolation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// Wire format of a fan.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FanJson {
    pub rank: usize,
    pub rays: Vec<Vec<i64>>,
    pub cones: Vec<Vec<usize>>,
}

/// A validated simplicial fan. Cones are the maximal cones, each with sorted
/// ray indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fan {
    rank: usize,
    rays: Vec<Vec<i64>>,
    cones: Vec<Vec<usize>>,
    warnings: Vec<String>,
}

fn gcd_of(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, &x| g.gcd(&x))
}

fn matrix_rank(m: &IntMatrix) -> usize {
    smith_normal_form(m).rank()
}

/// Sorts cone indices, removes duplicates and cones contained in others.
fn maximal_cones(cones: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let sets: Vec<BTreeSet<usize>> = cones.iter().map(|c| c.iter().copied().collect()).collect();
    let mut out: Vec<Vec<usize>> = Vec::new();
    for (i, s) in sets.iter().enumerate() {
        let dominated = sets.iter().enumerate().any(|(j, t)| {
            j != i && s.is_subset(t) && (s.len() < t.len() || j < i)
        });
        if !dominated {
            out.push(s.iter().copied().collect());
        }
    }
    out
}

/// Whether the cones spanned by the columns of `a` and of `b` (each linearly
/// independent) meet only in the origin.
fn cones_meet_trivially(a: &IntMatrix, b: &IntMatrix) -> bool {
    let joint = a.hstack(&-b).expect("same ambient dimension");
    let m = joint.cols();
    // A nonzero nonnegative kernel vector exists iff some circuit has a
    // sign-uniform kernel vector.
    for mask in 1u32..(1u32 << m) {
        let idx: Vec<usize> = (0..m).filter(|&j| mask & (1 << j) != 0).collect();
        let ker = kernel_basis(&joint.select_columns(&idx));
        if ker.cols() != 1 {
            continue;
        }
        let v = ker.column(0);
        if v.iter().any(Zero::is_zero) {
            continue;
        }
        let pos = v.iter().all(Signed::is_positive);
        let neg = v.iter().all(Signed::is_negative);
        if pos || neg {
            return false;
        }
    }
    true
}

impl Fan {
    /// Validates raw fan data, collecting every violation found.
    pub fn validate(
        rank: usize,
        rays: Vec<Vec<i64>>,
        cones: Vec<Vec<usize>>,
    ) -> Result<Fan, FanError> {
        let mut violations = Vec::new();
        for (i, r) in rays.iter().enumerate() {
            if r.len() != rank {
                violations.push(FanViolation::DimensionMismatch { ray: i, len: r.len() });
            }
        }
        for (c, cone) in cones.iter().enumerate() {
            let mut seen = BTreeSet::new();
            for &i in cone {
                if i >= rays.len() || !seen.insert(i) {
                    violations.push(FanViolation::BadConeIndex { cone: c, index: i });
                }
            }
        }
        if !violations.is_empty() {
            return Err(FanError::Invalid(violations));
        }

        for (i, r) in rays.iter().enumerate() {
            if gcd_of(r) != 1 {
                violations.push(FanViolation::NonPrimitiveRay { ray: i });
            }
        }
        for i in 0..rays.len() {
            for j in i + 1..rays.len() {
                if rays[i] == rays[j] {
                    violations.push(FanViolation::DuplicateRay { first: i, second: j });
                }
            }
        }
        let cones = maximal_cones(&cones);
        let mut used = vec![false; rays.len()];
        for c in &cones {
            for &i in c {
                used[i] = true;
            }
        }
        for (i, u) in used.iter().enumerate() {
            if !u {
                violations.push(FanViolation::UnusedRay { ray: i });
            }
        }

        let ray_cols = |idx: &[usize]| -> IntMatrix {
            let cols: Vec<&[i64]> = idx.iter().map(|&i| rays[i].as_slice()).collect();
            IntMatrix::from_columns(rank, &cols)
        };
        let mut simplicial = vec![true; cones.len()];
        for (c, cone) in cones.iter().enumerate() {
            if matrix_rank(&ray_cols(cone)) != cone.len() {
                simplicial[c] = false;
                violations.push(FanViolation::NonSimplicialCone { cone: c });
            }
        }

        let mut warnings = Vec::new();
        let mut skipped_pairs = 0usize;
        for a in 0..cones.len() {
            for b in a + 1..cones.len() {
                if !simplicial[a] || !simplicial[b] {
                    continue;
                }
                let common: Vec<usize> =
                    cones[a].iter().filter(|i| cones[b].contains(i)).copied().collect();
                let only_a: Vec<usize> =
                    cones[a].iter().filter(|i| !common.contains(i)).copied().collect();
                let only_b: Vec<usize> =
                    cones[b].iter().filter(|i| !common.contains(i)).copied().collect();
                if only_a.len() + only_b.len() > MAX_CIRCUIT_COLUMNS {
                    skipped_pairs += 1;
                    continue;
                }
                // Project modulo the span of the common face.
                let c_mat = ray_cols(&common);
                let snf = smith_normal_form(&c_mat);
                let keep: Vec<usize> = (snf.rank()..rank).collect();
                let proj = snf.u.select_rows(&keep);
                let pa = &proj * &ray_cols(&only_a);
                let pb = &proj * &ray_cols(&only_b);
                if !cones_meet_trivially(&pa, &pb) {
                    violations.push(FanViolation::BadFaceIntersection { first: a, second: b });
                }
            }
        }
        if skipped_pairs > 0 {
            warnings.push(format!(
                "{skipped_pairs} cone pairs too large for the exact intersection test; \
                 only their common-ray faces were checked"
            ));
        }

        if violations.is_empty() {
            let all: Vec<usize> = (0..rays.len()).collect();
            let r = ray_cols(&all);
            let snf = smith_normal_form(&r);
            let span_rank = snf.rank();
            if span_rank < rank {
                let saturated_span = (0..span_rank).map(|j| snf.u_inv.column(j)).collect();
                violations.push(FanViolation::RaysNotFullRank {
                    span_rank,
                    saturated_span,
                });
            }
        }
        if !violations.is_empty() {
            return Err(FanError::Invalid(violations));
        }
        Ok(Fan {
            rank,
            rays,
            cones,
            warnings,
        })
    }

    /// Smooth-or-not rank-2 fan whose rays are listed counterclockwise, with
    /// one cone per consecutive pair (including last/first).
    pub fn rank2_cycle(rays: Vec<[i64; 2]>) -> Result<Fan, FanError> {
        let m = rays.len();
        let cones = (0..m).map(|i| vec![i, (i + 1) % m]).collect();
        Fan::validate(2, rays.into_iter().map(|r| r.to_vec()).collect(), cones)
    }

    pub fn from_json(j: FanJson) -> Result<Fan, FanError> {
        Fan::validate(j.rank, j.rays, j.cones)
    }

    pub fn from_json_str(s: &str) -> Result<Fan, FanError> {
        let j: FanJson = serde_json::from_str(s).map_err(|e| FanError::Json(e.to_string()))?;
        Fan::from_json(j)
    }

    pub fn to_json(&self) -> FanJson {
        FanJson {
            rank: self.rank,
            rays: self.rays.clone(),
            cones: self.cones.clone(),
        }
    }

    /// Compact canonical JSON text.
    pub fn to_json_string(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("fan serializes")
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rays(&self) -> &[Vec<i64>] {
        &self.rays
    }

    pub fn cones(&self) -> &[Vec<usize>] {
        &self.cones
    }

    pub fn ray_count(&self) -> usize {
        self.rays.len()
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// `rank x |rays|` matrix with the rays as columns.
    pub fn ray_matrix(&self) -> IntMatrix {
        IntMatrix::from_columns(self.rank, &self.rays)
    }

    pub fn ray_index(&self, v: &[BigInt]) -> Option<usize> {
        self.rays.iter().position(|r| {
            r.len() == v.len() && r.iter().zip(v).all(|(a, b)| BigInt::from(*a) == *b)
        })
    }

    /// Whether the given ray-index set is (up to order) one of the maximal cones.
    pub fn has_cone(&self, idx: &[usize]) -> bool {
        let mut s = idx.to_vec();
        s.sort_unstable();
        self.cones.contains(&s)
    }

    /// Number of maximal cones containing each ray.
    pub fn cone_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.rays.len()];
        for c in &self.cones {
            for &i in c {
                deg[i] += 1;
            }
        }
        deg
    }

    pub fn class_group(&self) -> FGAbelianGroup {
        cokernel_presentation(&self.ray_matrix().transpose())
    }

    pub fn is_smooth(&self) -> bool {
        self.cones.iter().all(|c| {
            let cols: Vec<&[i64]> = c.iter().map(|&i| self.rays[i].as_slice()).collect();
            let m = IntMatrix::from_columns(self.rank, &cols);
            smith_normal_form(&m).diagonal().iter().all(One::is_one)
        })
    }

    /// Ray indices in counterclockwise order starting at the lexicographically
    /// smallest ray.
    pub fn angular_order(&self) -> Result<Vec<usize>, FanError> {
        if self.rank != 2 {
            return Err(FanError::RankUnsupported(self.rank));
        }
        let mut idx: Vec<usize> = (0..self.rays.len()).collect();
        idx.sort_by(|&a, &b| angular_cmp(&self.rays[a], &self.rays[b]));
        if let Some(start) = (0..idx.len()).min_by(|&a, &b| self.rays[idx[a]].cmp(&self.rays[idx[b]]))
        {
            idx.rotate_left(start);
        }
        Ok(idx)
    }

    pub fn is_complete_rank2(&self) -> Result<bool, FanError> {
        let order = self.angular_order()?;
        let m = order.len();
        if m < 3 {
            return Ok(false);
        }
        Ok((0..m).all(|i| {
            let a = order[i];
            let b = order[(i + 1) % m];
            cross(&self.rays[a], &self.rays[b]) > 0 && self.has_cone(&[a, b])
        }))
    }

    pub fn is_smooth_complete_rank2(&self) -> bool {
        self.rank == 2 && self.is_smooth() && self.is_complete_rank2().unwrap_or(false)
    }

    /// `(order, a)` where `order` is the angular ray order and
    /// `rays[order[i-1]] + rays[order[i+1]] = a[i] * rays[order[i]]`.
    pub fn a_sequence_with_order(&self) -> Result<(Vec<usize>, Vec<i64>), FanError> {
        if self.rank != 2 {
            return Err(FanError::RankUnsupported(self.rank));
        }
        if !self.is_smooth_complete_rank2() {
            return Err(FanError::NotSmoothComplete);
        }
        let order = self.angular_order()?;
        let m = order.len();
        let mut seq = Vec::with_capacity(m);
        for i in 0..m {
            let u = &self.rays[order[(i + m - 1) % m]];
            let v = &self.rays[order[i]];
            let w = &self.rays[order[(i + 1) % m]];
            let s = [u[0] + w[0], u[1] + w[1]];
            // v is primitive, so one coordinate is nonzero.
            let k = if v[0] != 0 { 0 } else { 1 };
            let a = s[k] / v[k];
            if s[0] != a * v[0] || s[1] != a * v[1] {
                return Err(FanError::NotSmoothComplete);
            }
            seq.push(a);
        }
        Ok((order, seq))
    }

    pub fn a_sequence(&self) -> Result<Vec<i64>, FanError> {
        self.a_sequence_with_order().map(|(_, a)| a)
    }

    pub fn cox_data(&self) -> CoxData {
        let m = self.rays.len();
        let irrelevant_monomials: Vec<Vec<usize>> = self
            .cones
            .iter()
            .map(|c| (0..m).filter(|i| !c.contains(i)).collect())
            .collect();

        let rt = self.ray_matrix().transpose();
        let snf = smith_normal_form(&rt);
        let diag = snf.diagonal();
        let rank = snf.rank();
        let mut rows = Vec::new();
        let mut degree_moduli = Vec::new();
        for (i, d) in diag.iter().enumerate().take(rank) {
            if !d.is_one() {
                rows.push(i);
                degree_moduli.push(d.clone());
            }
        }
        for i in rank..m {
            rows.push(i);
            degree_moduli.push(BigInt::zero());
        }
        let degree_matrix = snf.u.select_rows(&rows);
        CoxData {
            ray_count: m,
            irrelevant_monomials,
            class_group: cokernel_presentation(&rt),
            degree_matrix,
            degree_moduli,
        }
    }

    /// Minimal generators of the monomial ideal generated by the complements
    /// of every face of every cone, as sorted index sets.
    pub fn irrelevant_ideal_from_all_faces(&self) -> Vec<Vec<usize>> {
        let m = self.rays.len();
        let mut gens: BTreeSet<Vec<usize>> = BTreeSet::new();
        for c in &self.cones {
            let k = c.len();
            for mask in 0u64..(1u64 << k) {
                let face: Vec<usize> = (0..k).filter(|&j| mask & (1 << j) != 0).map(|j| c[j]).collect();
                gens.insert((0..m).filter(|i| !face.contains(i)).collect());
            }
        }
        minimal_monomials(gens.into_iter().collect())
    }
}

/// Removes monomials divisible by another generator.
pub fn minimal_monomials(gens: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    let sets: Vec<BTreeSet<usize>> = gens.iter().map(|g| g.iter().copied().collect()).collect();
    let mut out: Vec<Vec<usize>> = sets
        .iter()
        .enumerate()
        .filter(|(i, s)| {
            !sets
                .iter()
                .enumerate()
                .any(|(j, t)| j != *i && t.is_subset(s) && (t.len() < s.len() || j < *i))
        })
        .map(|(_, s)| s.iter().copied().collect())
        .collect();
    out.sort();
    out
}

fn cross(a: &[i64], b: &[i64]) -> i128 {
    a[0] as i128 * b[1] as i128 - a[1] as i128 * b[0] as i128
}

fn upper_half(v: &[i64]) -> bool {
    v[1] > 0 || (v[1] == 0 && v[0] > 0)
}

/// Counterclockwise order by argument in `[0, 2π)`.
pub fn angular_cmp(a: &[i64], b: &[i64]) -> Ordering {
    match (upper_half(a), upper_half(b)) {
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        _ => 0.cmp(&cross(a, b)),
    }
}

/// Cox construction data of a fan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoxData {
    pub ray_count: usize,
    /// Complement of each maximal cone, in cone order.
    pub irrelevant_monomials: Vec<Vec<usize>>,
    pub class_group: FGAbelianGroup,
    /// Rows give the map `Z^{rays} -> Cl`: torsion coordinates first, then free ones.
    pub degree_matrix: IntMatrix,
    /// Modulus of each degree row (0 for free coordinates).
    pub degree_moduli: Vec<BigInt>,
}

impl CoxData {
    /// Checks that every degree row kills the dual ray map (modulo its modulus).
    pub fn degree_rows_annihilate(&self, fan: &Fan) -> bool {
        let prod = &self.degree_matrix * &fan.ray_matrix().transpose();
        (0..prod.rows()).all(|r| {
            let modulus = &self.degree_moduli[r];
            prod.row(r).iter().all(|x| {
                if modulus.is_zero() {
                    x.is_zero()
                } else {
                    x.mod_floor(modulus).is_zero()
                }
            })
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2() -> Fan {
        Fan::validate(
            2,
            vec![vec![1, 0], vec![0, 1], vec![-1, -1]],
            vec![vec![0, 1], vec![1, 2], vec![2, 0]],
        )
        .unwrap()
    }

    fn quadrant() -> Fan {
        Fan::validate(2, vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1]]).unwrap()
    }

    fn hexagon() -> Fan {
        Fan::rank2_cycle(vec![[1, 0], [0, 1], [-1, 1], [-1, 0], [0, -1], [1, -1]]).unwrap()
    }

    fn violations(r: Result<Fan, FanError>) -> Vec<FanViolation> {
        match r {
            Err(FanError::Invalid(v)) => v,
            other => panic!("expected violations, got {other:?}"),
        }
    }

    #[test]
    fn validation_examples() {
        assert_eq!(quadrant().cones(), &[vec![0, 1]]);
        assert_eq!(p2().cones().len(), 3);
        let v = violations(Fan::validate(2, vec![vec![2, 0], vec![0, 1]], vec![vec![0, 1]]));
        assert_eq!(v, vec![FanViolation::NonPrimitiveRay { ray: 0 }]);
    }

    #[test]
    fn validation_detects_each_violation() {
        let v = violations(Fan::validate(
            2,
            vec![vec![1, 0], vec![1, 0]],
            vec![vec![0], vec![1]],
        ));
        assert!(v.contains(&FanViolation::DuplicateRay { first: 0, second: 1 }));

        let v = violations(Fan::validate(
            2,
            vec![vec![1, 0], vec![0, 1], vec![1, 1]],
            vec![vec![0, 1, 2]],
        ));
        assert!(v.contains(&FanViolation::NonSimplicialCone { cone: 0 }));

        // Overlapping 2-cones sharing only ray 0.
        let v = violations(Fan::validate(
            2,
            vec![vec![1, 0], vec![0, 1], vec![1, 1]],
            vec![vec![0, 1], vec![0, 2]],
        ));
        assert_eq!(v, vec![FanViolation::BadFaceIntersection { first: 0, second: 1 }]);

        let v = violations(Fan::validate(2, vec![vec![1, 0], vec![0, 1]], vec![vec![0]]));
        assert_eq!(v, vec![FanViolation::UnusedRay { ray: 1 }]);

        let v = violations(Fan::validate(
            3,
            vec![vec![1, 0, 0], vec![0, 1, 0]],
            vec![vec![0, 1]],
        ));
        assert!(matches!(v[0], FanViolation::RaysNotFullRank { span_rank: 2, .. }));
        assert!(v[0].to_string().contains("saturated span"));

        let v = violations(Fan::validate(2, vec![vec![1, 0, 0]], vec![vec![3]]));
        assert_eq!(v.len(), 2);
    }

    #[test]
    fn opposite_rays_share_no_cone() {
        // Two half-lines: a valid rank-1 fan.
        let f = Fan::validate(1, vec![vec![1], vec![-1]], vec![vec![0], vec![1]]).unwrap();
        assert!(f.class_group() == FGAbelianGroup::free(1));
    }

    #[test]
    fn non_maximal_cones_dropped() {
        let f = Fan::validate(
            2,
            vec![vec![1, 0], vec![0, 1]],
            vec![vec![1, 0], vec![0], vec![1]],
        )
        .unwrap();
        assert_eq!(f.cones(), &[vec![0, 1]]);
    }

    #[test]
    fn rank3_face_check() {
        // Two simplicial 3-cones crossing through each other's interiors.
        let v = violations(Fan::validate(
            3,
            vec![
                vec![1, 0, 0],
                vec![0, 1, 0],
                vec![0, 0, 1],
                vec![1, 1, -1],
                vec![1, 1, 1],
            ],
            vec![vec![0, 1, 2], vec![0, 3, 4]],
        ));
        assert!(v.contains(&FanViolation::BadFaceIntersection { first: 0, second: 1 }));
        let p3 = Fan::validate(
            3,
            vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![-1, -1, -1]],
            vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
        )
        .unwrap();
        assert!(p3.is_smooth());
        assert!(p3.warnings().is_empty());
    }

    #[test]
    fn class_groups() {
        assert_eq!(p2().class_group(), FGAbelianGroup::free(1));
        assert!(quadrant().class_group().is_trivial());
        assert_eq!(hexagon().class_group(), FGAbelianGroup::free(4));
        // Weighted projective plane P(1,1,2) has torsion-free Cl; a fake one has torsion.
        let f = Fan::validate(
            2,
            vec![vec![1, 0], vec![1, 2], vec![-1, -1]],
            vec![vec![0, 1], vec![1, 2], vec![2, 0]],
        )
        .unwrap();
        let cl = f.class_group();
        assert_eq!(cl.free_rank, 1);
        assert!(!f.is_smooth());
    }

    #[test]
    fn smoothness_and_completeness() {
        assert!(quadrant().is_smooth());
        let f = Fan::validate(2, vec![vec![1, 0], vec![1, 2]], vec![vec![0, 1]]).unwrap();
        assert!(!f.is_smooth());
        assert!(p2().is_complete_rank2().unwrap());
        assert!(!quadrant().is_complete_rank2().unwrap());
        assert!(hexagon().is_complete_rank2().unwrap());
        let p3 = Fan::validate(
            3,
            vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]],
            vec![vec![0, 1, 2]],
        )
        .unwrap();
        assert_eq!(p3.is_complete_rank2(), Err(FanError::RankUnsupported(3)));
    }

    #[test]
    fn a_sequences() {
        assert_eq!(hexagon().a_sequence().unwrap(), vec![1; 6]);
        assert_eq!(p2().a_sequence().unwrap(), vec![-1; 3]);
        assert_eq!(quadrant().a_sequence(), Err(FanError::NotSmoothComplete));
        let sq = Fan::rank2_cycle(vec![[1, 0], [0, 1], [-1, 0], [0, -1]]).unwrap();
        assert_eq!(sq.a_sequence().unwrap(), vec![0; 4]);
    }

    #[test]
    fn angular_order_starts_lexicographically() {
        let order = hexagon().angular_order().unwrap();
        let f = hexagon();
        assert_eq!(f.rays()[order[0]], vec![-1, 0]);
        assert_eq!(f.rays()[order[1]], vec![0, -1]);
    }

    #[test]
    fn cox_examples() {
        let f = p2();
        let cox = f.cox_data();
        assert_eq!(cox.irrelevant_monomials, vec![vec![2], vec![0], vec![1]]);
        assert!(cox.degree_rows_annihilate(&f));
        assert_eq!(cox.degree_matrix.rows(), 1);
        assert_eq!(
            minimal_monomials(cox.irrelevant_monomials.clone()),
            f.irrelevant_ideal_from_all_faces()
        );

        let q = quadrant().cox_data();
        assert_eq!(q.irrelevant_monomials, vec![Vec::<usize>::new()]);

        let h = hexagon();
        let cox = h.cox_data();
        assert_eq!(cox.irrelevant_monomials.len(), 6);
        assert!(cox.irrelevant_monomials.iter().all(|m| m.len() == 4));
        assert!((&cox.degree_matrix * &h.ray_matrix().transpose()).is_zero());
    }

    #[test]
    fn json_round_trip() {
        let f = p2();
        let s = f.to_json_string();
        assert_eq!(s, r#"{"rank":2,"rays":[[1,0],[0,1],[-1,-1]],"cones":[[0,1],[1,2],[0,2]]}"#);
        assert_eq!(Fan::from_json_str(&s).unwrap().to_json_string(), s);
        assert!(matches!(Fan::from_json_str("{\"rank\":2}"), Err(FanError::Json(_))));
    }
}
