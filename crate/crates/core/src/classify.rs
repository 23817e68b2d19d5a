//! Top-level classifications of twisted forms: projective spaces over cyclic
//! extensions, arbitrary fans through the hom-class partition, real toric
//! surfaces, and the symbolic table of surface cohomology groups.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::aut::{
    automorphism_group, identify_gl2_matrices, involution_type, matrix_group_closure, AutError,
    Gl2Label, InvolutionType,
};
use crate::builtin::projective_fan;
use crate::cohomology::{h1_cyclic_norm_formula, CohomologyError};
use crate::fan::{Fan, FanError};
use crate::galois::{
    enumerate_hom_classes, norm_quotient, relative_brauer, FieldBackend, GaloisError, GroupSpec,
    HomClass,
};
use crate::linalg::{bigint_json, FGAbelianGroup, IntMatrix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error(transparent)]
    Fan(#[from] FanError),
    #[error(transparent)]
    Aut(#[from] AutError),
    #[error(transparent)]
    Galois(#[from] GaloisError),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
    #[error("the classification needs a cyclic Galois group, got {0}")]
    NonCyclicGroup(String),
    #[error("Galois group of order {group} does not match the backend's extension of degree {backend}")]
    GroupMismatch { group: usize, backend: usize },
    #[error("surface classification needs rank 2, got rank {0}")]
    RankUnsupported(usize),
    #[error("cannot evaluate {0} with the given tower data")]
    Unevaluable(String),
    #[error("invalid tower data: {0}")]
    InvalidTower(String),
}

/// Partitions of `n + 1` into parts dividing `d`, split by whether some part is 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartitionSet {
    pub n_plus_1: usize,
    pub d: usize,
    pub all: Vec<Vec<usize>>,
    /// partitions with a part equal to 1
    pub fixed: Vec<Vec<usize>>,
    pub starred: Vec<Vec<usize>>,
}

/// Weakly decreasing partitions of `n_plus_1` whose parts divide `d`, listed
/// in decreasing lexicographic order.
pub fn partitions_dividing(n_plus_1: usize, d: usize) -> PartitionSet {
    fn rec(rest: usize, from: usize, parts: &[usize], cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest == 0 {
            out.push(cur.clone());
            return;
        }
        for (i, &p) in parts.iter().enumerate().skip(from) {
            if p <= rest {
                cur.push(p);
                rec(rest - p, i, parts, cur, out);
                cur.pop();
            }
        }
    }
    let parts: Vec<usize> = (1..=d.min(n_plus_1)).rev().filter(|m| d % m == 0).collect();
    let mut all = Vec::new();
    rec(n_plus_1, 0, &parts, &mut Vec::new(), &mut all);
    let (fixed, starred) = all.iter().cloned().partition(|p: &Vec<usize>| p.last() == Some(&1));
    PartitionSet {
        n_plus_1,
        d,
        all,
        fixed,
        starred,
    }
}

/// Permutation of `0..sum` with consecutive cycles of the given lengths.
pub fn partition_permutation(partition: &[usize]) -> Vec<usize> {
    let mut perm = Vec::with_capacity(partition.iter().sum());
    let mut start = 0;
    for &m in partition {
        perm.extend((start..start + m).map(|i| if i + 1 == start + m { start } else { i + 1 }));
        start += m;
    }
    perm
}

/// Matrix on `Z^n = Z^{n+1} / Z(1,...,1)` of the ray permutation of `P^n`,
/// in the basis given by the first `n` rays.
pub fn projective_permutation_matrix(perm: &[usize]) -> IntMatrix {
    let n = perm.len() - 1;
    let mut m = IntMatrix::zeros(n, n);
    for j in 0..n {
        if perm[j] < n {
            m.set(perm[j], j, BigInt::one());
        } else {
            for i in 0..n {
                m.set(i, j, BigInt::from(-1));
            }
        }
    }
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum DescentStatus {
    /// twisted forms are in bijection with forms over `k`
    FormsClassified,
    /// only the twisted forms over `K` are classified
    TwistedFormsOnly,
}

impl fmt::Display for DescentStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DescentStatus::FormsClassified => "FORMS_CLASSIFIED",
            DescentStatus::TwistedFormsOnly => "TWISTED_FORMS_ONLY",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Descent {
    pub status: DescentStatus,
    pub note: Option<String>,
}

/// Whether every twisted form is known to descend to `k`: quadratic (or
/// trivial) extensions, fans of rank at most 2, and fans asserted to be
/// quasiprojective.
pub fn descent_status(fan: &Fan, group_order: usize, quasiprojective: bool) -> Descent {
    if group_order <= 2 || fan.rank() <= 2 || quasiprojective {
        Descent {
            status: DescentStatus::FormsClassified,
            note: None,
        }
    } else {
        Descent {
            status: DescentStatus::TwistedFormsOnly,
            note: Some(format!(
                "rank {} fan over an extension of degree {group_order}: a twisted form need not \
                 descend without quasiprojectivity (a degree 3 counterexample is known); pass \
                 --quasiprojective to assert it",
                fan.rank()
            )),
        }
    }
}

/// Symbolic expression for a cohomology group built from relative Brauer groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SymGroupExpr {
    Explicit(FGAbelianGroup),
    /// `Br(base | ext)`, algebras over `base` split by `ext`
    RelBrauer { base: String, ext: String },
    /// the first group modulo the image of the second under the natural map
    Quotient(Box<SymGroupExpr>, Box<SymGroupExpr>),
    DirectSum(Box<SymGroupExpr>, Box<SymGroupExpr>),
    /// kernel of the norm-induced map from the first group to the second
    KernelOfNormMap(Box<SymGroupExpr>, Box<SymGroupExpr>),
    /// a group with a subgroup `kernel` and quotient `quotient`, extension unknown
    UnresolvedExtension {
        kernel: Box<SymGroupExpr>,
        quotient: Box<SymGroupExpr>,
    },
}

impl SymGroupExpr {
    pub fn br(base: &str, ext: &str) -> Self {
        SymGroupExpr::RelBrauer {
            base: base.to_string(),
            ext: ext.to_string(),
        }
    }

    pub fn trivial() -> Self {
        SymGroupExpr::Explicit(FGAbelianGroup::trivial())
    }

    pub fn direct_sum(a: SymGroupExpr, b: SymGroupExpr) -> Self {
        SymGroupExpr::DirectSum(Box::new(a), Box::new(b))
    }

    pub fn quotient(a: SymGroupExpr, b: SymGroupExpr) -> Self {
        SymGroupExpr::Quotient(Box::new(a), Box::new(b))
    }

    pub fn kernel_of_norm_map(a: SymGroupExpr, b: SymGroupExpr) -> Self {
        SymGroupExpr::KernelOfNormMap(Box::new(a), Box::new(b))
    }

    pub fn extension(kernel: SymGroupExpr, quotient: SymGroupExpr) -> Self {
        SymGroupExpr::UnresolvedExtension {
            kernel: Box::new(kernel),
            quotient: Box::new(quotient),
        }
    }

    pub fn to_json(&self) -> Value {
        let body = match self {
            SymGroupExpr::Explicit(g) => json!({"op": "explicit", "group": g.to_json()}),
            SymGroupExpr::RelBrauer { base, ext } => {
                json!({"op": "rel_brauer", "base": base, "ext": ext})
            }
            SymGroupExpr::Quotient(a, b) => {
                json!({"op": "quotient", "group": a.to_json(), "image_of": b.to_json()})
            }
            SymGroupExpr::DirectSum(a, b) => {
                json!({"op": "direct_sum", "left": a.to_json(), "right": b.to_json()})
            }
            SymGroupExpr::KernelOfNormMap(a, b) => {
                json!({"op": "kernel_of_norm_map", "source": a.to_json(), "target": b.to_json()})
            }
            SymGroupExpr::UnresolvedExtension { kernel, quotient } => json!({
                "op": "unresolved_extension",
                "kernel": kernel.to_json(),
                "quotient": quotient.to_json(),
            }),
        };
        let mut body = body;
        body["text"] = json!(self.to_string());
        body
    }
}

impl fmt::Display for SymGroupExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymGroupExpr::Explicit(g) if g.is_trivial() => write!(f, "1"),
            SymGroupExpr::Explicit(g) => write!(f, "{g}"),
            SymGroupExpr::RelBrauer { base, ext } => write!(f, "Br({base}|{ext})"),
            SymGroupExpr::Quotient(a, b) => write!(f, "{a} / im {b}"),
            SymGroupExpr::DirectSum(a, b) => write!(f, "{a} + {b}"),
            SymGroupExpr::KernelOfNormMap(a, b) => write!(f, "ker({a} -> {b})"),
            SymGroupExpr::UnresolvedExtension { kernel, quotient } => {
                write!(f, "extension of {quotient} by {kernel}")
            }
        }
    }
}

/// `H^1(G, T_φ(K))` for `φ` the standard embedding of the given subgroup of
/// `GL(2, Z)`. Field names: `k`, `K`, fixed fields `K^H`, and for groups with
/// an element of order 3 the fields `E` (degree 3 over `k`), `F` (degree 2)
/// and their compositum `L`.
pub fn surface_table(label: Gl2Label) -> SymGroupExpr {
    use SymGroupExpr as S;
    let br = S::br;
    match label {
        Gl2Label::D8 => br("K^D4", "K^D2"),
        Gl2Label::D4 => S::direct_sum(br("k", "K^D2"), br("k", "K^D2")),
        Gl2Label::D4p | Gl2Label::C4 => br("K^C2", "K"),
        Gl2Label::D2 => br("k", "K"),
        Gl2Label::D2p | Gl2Label::C1 => S::trivial(),
        Gl2Label::C2 => S::direct_sum(br("k", "K"), br("k", "K")),
        Gl2Label::C3 => br("k", "K"),
        Gl2Label::D6p => br("k", "L"),
        Gl2Label::D12 | Gl2Label::D6 | Gl2Label::C6 => S::extension(
            S::quotient(br("F", "L"), br("k", "E")),
            S::kernel_of_norm_map(br("E", "L"), br("k", "F")),
        ),
    }
}

/// Values for the leaves of symbolic expressions: relative Brauer groups of
/// pairs of fields, and optionally values of composite expressions keyed by
/// their printed form.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BrauerTower {
    groups: BTreeMap<(String, String), FGAbelianGroup>,
    values: BTreeMap<String, FGAbelianGroup>,
    all_split: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TowerJson {
    #[serde(default)]
    groups: Vec<TowerGroupJson>,
    #[serde(default)]
    values: Vec<TowerValueJson>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TowerGroupJson {
    base: String,
    ext: String,
    invariant_factors: Vec<u64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TowerValueJson {
    expr: String,
    invariant_factors: Vec<u64>,
}

impl BrauerTower {
    /// `k = R`, `K = C`, `Br(R|C) = Z/2`.
    pub fn real_complex() -> Self {
        BrauerTower::default().with_group("k", "K", FGAbelianGroup::cyclic(2))
    }

    /// Every relative Brauer group trivial, as for finite fields.
    pub fn split() -> Self {
        BrauerTower {
            all_split: true,
            ..Default::default()
        }
    }

    pub fn from_backend(backend: &FieldBackend) -> Self {
        match backend {
            FieldBackend::RealComplex => BrauerTower::real_complex(),
            FieldBackend::FiniteField { .. } | FieldBackend::Trivial => BrauerTower::split(),
            FieldBackend::SymbolicBrauer(_) => {
                BrauerTower::default().with_group("k", "K", relative_brauer(backend))
            }
        }
    }

    pub fn with_group(mut self, base: &str, ext: &str, g: FGAbelianGroup) -> Self {
        self.groups.insert((base.to_string(), ext.to_string()), g);
        self
    }

    pub fn with_value(mut self, expr: &SymGroupExpr, g: FGAbelianGroup) -> Self {
        self.values.insert(expr.to_string(), g);
        self
    }

    /// `{"groups": [{"base", "ext", "invariant_factors"}], "values": [{"expr", "invariant_factors"}]}`
    pub fn from_json_str(s: &str) -> Result<Self, ClassifyError> {
        let j: TowerJson =
            serde_json::from_str(s).map_err(|e| ClassifyError::InvalidTower(e.to_string()))?;
        let mut t = BrauerTower::default();
        for g in j.groups {
            if g.invariant_factors.iter().any(|&f| f < 2) {
                return Err(ClassifyError::InvalidTower(
                    "invariant factors must be at least 2".into(),
                ));
            }
            t = t.with_group(&g.base, &g.ext, FGAbelianGroup::from_invariant_factors(&g.invariant_factors));
        }
        for v in j.values {
            t.values
                .insert(v.expr, FGAbelianGroup::from_invariant_factors(&v.invariant_factors));
        }
        Ok(t)
    }

    fn rel_brauer(&self, base: &str, ext: &str) -> Option<FGAbelianGroup> {
        if base == ext || self.all_split {
            return Some(FGAbelianGroup::trivial());
        }
        self.groups.get(&(base.to_string(), ext.to_string())).cloned()
    }
}

/// Value of a symbolic expression under a tower.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Evaluated {
    Group(FGAbelianGroup),
    /// both ends of an unresolved extension and the resulting order
    Extension {
        kernel: FGAbelianGroup,
        quotient: FGAbelianGroup,
        order: Option<BigInt>,
    },
}

impl Evaluated {
    pub fn order(&self) -> Option<BigInt> {
        match self {
            Evaluated::Group(g) => g.order(),
            Evaluated::Extension { order, .. } => order.clone(),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            Evaluated::Group(g) => json!({"kind": "explicit", "group": g.to_string(), "value": g.to_json()}),
            Evaluated::Extension { kernel, quotient, order } => json!({
                "kind": "extension",
                "kernel": kernel.to_json(),
                "quotient": quotient.to_json(),
                "order": order.as_ref().map(bigint_json),
            }),
        }
    }
}

impl fmt::Display for Evaluated {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Evaluated::Group(g) => write!(f, "{g}"),
            Evaluated::Extension { kernel, quotient, order } => {
                write!(f, "extension of {quotient} by {kernel}")?;
                match order {
                    Some(o) => write!(f, " (order {o})"),
                    None => Ok(()),
                }
            }
        }
    }
}

pub fn evaluate(expr: &SymGroupExpr, tower: &BrauerTower) -> Result<Evaluated, ClassifyError> {
    if let SymGroupExpr::UnresolvedExtension { kernel, quotient } = expr {
        let kernel = evaluate_group(kernel, tower)?;
        let quotient = evaluate_group(quotient, tower)?;
        let order = kernel.order().zip(quotient.order()).map(|(a, b)| a * b);
        return Ok(if quotient.is_trivial() {
            Evaluated::Group(kernel)
        } else if kernel.is_trivial() {
            Evaluated::Group(quotient)
        } else {
            Evaluated::Extension {
                kernel,
                quotient,
                order,
            }
        });
    }
    evaluate_group(expr, tower).map(Evaluated::Group)
}

fn evaluate_group(expr: &SymGroupExpr, tower: &BrauerTower) -> Result<FGAbelianGroup, ClassifyError> {
    let missing = || ClassifyError::Unevaluable(expr.to_string());
    if let Some(v) = tower.values.get(&expr.to_string()) {
        return Ok(v.clone());
    }
    match expr {
        SymGroupExpr::Explicit(g) => Ok(g.clone()),
        SymGroupExpr::RelBrauer { base, ext } => tower.rel_brauer(base, ext).ok_or_else(missing),
        SymGroupExpr::DirectSum(a, b) => {
            Ok(evaluate_group(a, tower)?.direct_sum(&evaluate_group(b, tower)?))
        }
        // Without the maps themselves only the degenerate cases are decidable.
        SymGroupExpr::Quotient(a, b) => {
            let a = evaluate_group(a, tower)?;
            if a.is_trivial() || evaluate_group(b, tower)?.is_trivial() {
                Ok(a)
            } else {
                Err(missing())
            }
        }
        SymGroupExpr::KernelOfNormMap(a, b) => {
            let a = evaluate_group(a, tower)?;
            if a.is_trivial() || evaluate_group(b, tower)?.is_trivial() {
                Ok(a)
            } else {
                Err(missing())
            }
        }
        SymGroupExpr::UnresolvedExtension { .. } => Err(missing()),
    }
}

/// Subgroup class of `GL(2, Z)` generated by an involution of the given type.
pub fn involution_label(t: InvolutionType) -> Gl2Label {
    match t {
        InvolutionType::Identity => Gl2Label::C1,
        InvolutionType::MinusIdentity => Gl2Label::C2,
        InvolutionType::CType => Gl2Label::D2,
        InvolutionType::JType => Gl2Label::D2p,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum H1Value {
    Explicit(FGAbelianGroup),
    Symbolic(SymGroupExpr),
}

impl H1Value {
    pub fn explicit(&self) -> Option<&FGAbelianGroup> {
        match self {
            H1Value::Explicit(g) => Some(g),
            H1Value::Symbolic(_) => None,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            H1Value::Explicit(g) => {
                json!({"kind": "explicit", "group": g.to_string(), "value": g.to_json()})
            }
            H1Value::Symbolic(e) => json!({"kind": "symbolic", "expr": e.to_json()}),
        }
    }
}

impl fmt::Display for H1Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            H1Value::Explicit(g) if g.is_trivial() => write!(f, "1"),
            H1Value::Explicit(g) => write!(f, "{g}"),
            H1Value::Symbolic(e) => write!(f, "{e}"),
        }
    }
}

/// One Galois action class and its cohomology.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportEntry {
    /// images of the group generators
    pub phi: Vec<IntMatrix>,
    pub h1: H1Value,
    pub descent: Descent,
    pub partition: Option<Vec<usize>>,
    pub involution: Option<InvolutionType>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassificationReport {
    /// fan JSON, or a builtin name set by the caller
    pub fan: Value,
    pub group: String,
    pub backend: String,
    pub entries: Vec<ReportEntry>,
    /// number of twisted forms when every entry is an explicit finite group
    pub total: Option<BigInt>,
    /// agreement with the closed form for prime degree, when it applies
    pub prime_shortcut_agrees: Option<bool>,
}

impl ClassificationReport {
    fn new(fan: &Fan, group: String, backend: &FieldBackend, entries: Vec<ReportEntry>) -> Self {
        let mut total = Some(BigInt::from(0));
        for e in &entries {
            total = match (total, e.h1.explicit().and_then(|g| g.order())) {
                (Some(t), Some(o)) => Some(t + o),
                _ => None,
            };
        }
        ClassificationReport {
            fan: serde_json::to_value(fan.to_json()).expect("fan JSON serializes"),
            group,
            backend: backend.label(),
            entries,
            total,
            prime_shortcut_agrees: None,
        }
    }

    pub fn to_json(&self) -> Value {
        let entries: Vec<Value> = self
            .entries
            .iter()
            .map(|e| {
                let mut v = json!({
                    "phi": e.phi,
                    "h1": e.h1.to_json(),
                    "descent": e.descent,
                });
                if let Some(p) = &e.partition {
                    v["partition"] = json!(p);
                }
                if let Some(t) = e.involution {
                    v["involution"] = json!(t.to_string());
                }
                v
            })
            .collect();
        let mut out = json!({
            "fan": self.fan,
            "group": self.group,
            "backend": self.backend,
            "entries": entries,
            "total": self.total.as_ref().map(bigint_json),
        });
        if let Some(a) = self.prime_shortcut_agrees {
            out["prime_shortcut_agrees"] = json!(a);
        }
        out
    }
}

fn is_prime(d: usize) -> bool {
    d >= 2 && (2..d).take_while(|p| p * p <= d).all(|p| d % p != 0)
}

/// Forms of `P^n` over a cyclic extension: one entry per partition of `n+1`
/// into parts dividing the degree.
pub fn classify_projective(
    n: usize,
    backend: &FieldBackend,
) -> Result<ClassificationReport, ClassifyError> {
    let d = backend.group_order();
    let fan = projective_fan(n)?;
    let parts = partitions_dividing(n + 1, d);
    // Projective space is quasiprojective.
    let descent = descent_status(&fan, d, true);
    let mut entries = Vec::with_capacity(parts.all.len());
    for p in &parts.all {
        let h1 = if p.last() == Some(&1) {
            FGAbelianGroup::trivial()
        } else {
            let stabilizers: Vec<usize> = p.iter().map(|m| d / m).collect();
            norm_quotient(backend, &stabilizers)?
        };
        entries.push(ReportEntry {
            phi: vec![projective_permutation_matrix(&partition_permutation(p))],
            h1: H1Value::Explicit(h1),
            descent: descent.clone(),
            partition: Some(p.clone()),
            involution: None,
        });
    }
    let mut report = ClassificationReport::new(&fan, format!("cyclic:{d}"), backend, entries);
    if is_prime(d) {
        let br = relative_brauer(backend);
        report.prime_shortcut_agrees = Some(report.entries.iter().all(|e| {
            let p = e.partition.as_ref().expect("projective entries carry partitions");
            let expected = if p.iter().all(|&m| m == d) {
                br.clone()
            } else {
                FGAbelianGroup::trivial()
            };
            e.h1 == H1Value::Explicit(expected)
        }));
    }
    Ok(report)
}

/// `H^1(K/k, T_φ)` for one action class, optionally after passing to the
/// fixed field of `ker φ`.
pub fn class_h1(
    hom: &HomClass,
    backend: &FieldBackend,
    kernel_reduction: bool,
) -> Result<H1Value, ClassifyError> {
    let kernel = hom.kernel().len();
    let reduced = if kernel_reduction && kernel > 1 {
        backend.reduce(kernel).map(|b| (hom.kernel_reduction(), b))
    } else {
        None
    };
    let result = match &reduced {
        Some((h, b)) => h1_cyclic_norm_formula(h, b),
        None => h1_cyclic_norm_formula(hom, backend),
    };
    match result {
        Ok(g) => Ok(H1Value::Explicit(g)),
        Err(CohomologyError::BackendUnsupported(_)) if hom.target.fan().rank() == 2 => {
            // Fall back to the symbolic surface table for the image subgroup.
            let image = matrix_group_closure(&hom.generator_matrices(), 2);
            let label = identify_gl2_matrices(&image)?.label;
            Ok(H1Value::Symbolic(surface_table(label)))
        }
        Err(e) => Err(e.into()),
    }
}

/// Partition of `H^1(K/k, Aut^T_Σ)` over conjugacy classes of actions
/// `φ: G -> Aut_Σ`.
pub fn classify_fan(
    fan: &Fan,
    group: &GroupSpec,
    backend: &FieldBackend,
    quasiprojective: bool,
) -> Result<ClassificationReport, ClassifyError> {
    let d = group
        .cyclic_order()
        .ok_or_else(|| ClassifyError::NonCyclicGroup(group.label()))?;
    if d != backend.group_order() {
        return Err(ClassifyError::GroupMismatch {
            group: d,
            backend: backend.group_order(),
        });
    }
    let aut = automorphism_group(fan)?;
    let descent = descent_status(fan, d, quasiprojective);
    let entries = enumerate_hom_classes(group, &aut)
        .iter()
        .map(|hom| {
            let gens = hom.generator_matrices();
            let involution = (d == 2 && fan.rank() == 2)
                .then(|| involution_type(&gens[0]))
                .flatten();
            Ok(ReportEntry {
                phi: gens,
                h1: class_h1(hom, backend, true)?,
                descent: descent.clone(),
                partition: None,
                involution,
            })
        })
        .collect::<Result<Vec<_>, ClassifyError>>()?;
    Ok(ClassificationReport::new(fan, group.label(), backend, entries))
}

/// Real forms of a toric surface, one entry per conjugacy class of
/// involutions in `Aut_Σ`, with values read from the surface table.
pub fn classify_surface_real(fan: &Fan) -> Result<ClassificationReport, ClassifyError> {
    if fan.rank() != 2 {
        return Err(ClassifyError::RankUnsupported(fan.rank()));
    }
    let aut = automorphism_group(fan)?;
    let z2 = GroupSpec::cyclic(2)?;
    let tower = BrauerTower::real_complex();
    let descent = descent_status(fan, 2, false);
    let entries = enumerate_hom_classes(&z2, &aut)
        .iter()
        .map(|hom| {
            let s = hom.generator_matrices().remove(0);
            let t = involution_type(&s).expect("images of Z/2 are involutions");
            let Evaluated::Group(g) = evaluate(&surface_table(involution_label(t)), &tower)? else {
                unreachable!("involution rows are plain groups");
            };
            Ok(ReportEntry {
                phi: vec![s],
                h1: H1Value::Explicit(g),
                descent: descent.clone(),
                partition: None,
                involution: Some(t),
            })
        })
        .collect::<Result<Vec<_>, ClassifyError>>()?;
    Ok(ClassificationReport::new(fan, z2.label(), &FieldBackend::RealComplex, entries))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin::builtin_fan;
    use crate::cohomology::h1_real_involution;

    fn orders(r: &ClassificationReport) -> Vec<u64> {
        r.entries
            .iter()
            .map(|e| {
                let o = e.h1.explicit().unwrap().order().unwrap();
                u64::try_from(o).unwrap()
            })
            .collect()
    }

    #[test]
    fn partition_listing() {
        let p = partitions_dividing(2, 2);
        assert_eq!(p.all, vec![vec![2], vec![1, 1]]);
        assert_eq!(p.fixed, vec![vec![1, 1]]);
        assert_eq!(p.starred, vec![vec![2]]);
        let p = partitions_dividing(4, 2);
        assert_eq!(p.all, vec![vec![2, 2], vec![2, 1, 1], vec![1, 1, 1, 1]]);
        assert_eq!(p.starred.len(), 1);
        assert_eq!(partitions_dividing(3, 6).all, vec![vec![3], vec![2, 1], vec![1, 1, 1]]);
        assert_eq!(partitions_dividing(1, 1).all, vec![vec![1]]);
    }

    #[test]
    fn projective_matrices() {
        // the swap of P^1 acts by -1
        let m = projective_permutation_matrix(&partition_permutation(&[2]));
        assert_eq!(m, IntMatrix::from_rows(&[[-1]]));
        let m = projective_permutation_matrix(&partition_permutation(&[3]));
        assert_eq!(m.pow(3), IntMatrix::identity(2));
        assert!(!m.is_identity());
    }

    #[test]
    fn projective_line_and_space() {
        let r = classify_projective(1, &FieldBackend::RealComplex).unwrap();
        assert_eq!(r.total, Some(BigInt::from(3)));
        assert_eq!(r.prime_shortcut_agrees, Some(true));
        let r = classify_projective(3, &FieldBackend::RealComplex).unwrap();
        assert_eq!(r.total, Some(BigInt::from(4)));
        let ff = FieldBackend::finite_field(2, 3).unwrap();
        let r = classify_projective(2, &ff).unwrap();
        assert_eq!(r.total, Some(BigInt::from(2)));
    }

    #[test]
    fn descent_rules() {
        let p3 = projective_fan(3).unwrap();
        let hex = builtin_fan("hexagon").unwrap();
        assert_eq!(descent_status(&hex, 6, false).status, DescentStatus::FormsClassified);
        assert_eq!(descent_status(&p3, 2, false).status, DescentStatus::FormsClassified);
        let d = descent_status(&p3, 3, false);
        assert_eq!(d.status, DescentStatus::TwistedFormsOnly);
        assert!(d.note.is_some());
        assert_eq!(descent_status(&p3, 3, true).status, DescentStatus::FormsClassified);
    }

    #[test]
    fn p1_real_forms() {
        let p1 = projective_fan(1).unwrap();
        let r = classify_fan(&p1, &GroupSpec::cyclic(2).unwrap(), &FieldBackend::RealComplex, false)
            .unwrap();
        assert_eq!(orders(&r), vec![1, 2]);
        assert_eq!(r.total, Some(BigInt::from(3)));
    }

    #[test]
    fn hexagon_real_forms() {
        let hex = builtin_fan("hexagon").unwrap();
        let a = classify_surface_real(&hex).unwrap();
        let b = classify_fan(&hex, &GroupSpec::cyclic(2).unwrap(), &FieldBackend::RealComplex, false)
            .unwrap();
        assert_eq!(a.entries.len(), 4);
        assert_eq!(a.total, Some(BigInt::from(7)));
        for (x, y) in a.entries.iter().zip(&b.entries) {
            assert_eq!(x.h1, y.h1);
            assert_eq!(x.h1, H1Value::Explicit(h1_real_involution(&x.phi[0]).unwrap()));
        }
    }

    #[test]
    fn table_rows() {
        let real = BrauerTower::real_complex();
        let value = |l| evaluate(&surface_table(l), &real).unwrap().order().unwrap();
        assert_eq!(value(Gl2Label::C1), BigInt::from(1));
        assert_eq!(value(Gl2Label::D2p), BigInt::from(1));
        assert_eq!(value(Gl2Label::D2), BigInt::from(2));
        assert_eq!(value(Gl2Label::C2), BigInt::from(4));
        assert!(evaluate(&surface_table(Gl2Label::D8), &real).is_err());
        assert_eq!(surface_table(Gl2Label::C2).to_string(), "Br(k|K) + Br(k|K)");
        assert_eq!(
            surface_table(Gl2Label::D12).to_string(),
            "extension of ker(Br(E|L) -> Br(k|F)) by Br(F|L) / im Br(k|E)"
        );
    }

    #[test]
    fn extension_evaluation() {
        let expr = surface_table(Gl2Label::C6);
        let split = evaluate(&expr, &BrauerTower::split()).unwrap();
        assert_eq!(split, Evaluated::Group(FGAbelianGroup::trivial()));
        let t = BrauerTower::default()
            .with_group("F", "L", FGAbelianGroup::cyclic(2))
            .with_group("k", "E", FGAbelianGroup::trivial())
            .with_group("E", "L", FGAbelianGroup::cyclic(3))
            .with_group("k", "F", FGAbelianGroup::trivial());
        assert_eq!(
            evaluate(&expr, &t).unwrap(),
            Evaluated::Extension {
                kernel: FGAbelianGroup::cyclic(2),
                quotient: FGAbelianGroup::cyclic(3),
                order: Some(BigInt::from(6)),
            }
        );
        let partial = BrauerTower::default()
            .with_group("F", "L", FGAbelianGroup::cyclic(2))
            .with_group("k", "E", FGAbelianGroup::cyclic(2));
        assert!(matches!(evaluate(&expr, &partial), Err(ClassifyError::Unevaluable(_))));
    }

    #[test]
    fn tower_json() {
        let t = BrauerTower::from_json_str(
            r#"{"groups": [{"base": "k", "ext": "K", "invariant_factors": [2]}]}"#,
        )
        .unwrap();
        assert_eq!(t, BrauerTower::real_complex());
        assert!(BrauerTower::from_json_str(r#"{"group": []}"#).is_err());
    }

    #[test]
    fn report_json_shape() {
        let r = classify_projective(1, &FieldBackend::RealComplex).unwrap();
        let j = r.to_json();
        assert_eq!(j["total"], json!(3));
        assert_eq!(j["entries"][0]["h1"]["kind"], json!("explicit"));
        assert_eq!(j["entries"][0]["phi"], json!([[[-1]]]));
        assert_eq!(j["entries"][0]["descent"]["status"], json!("FORMS_CLASSIFIED"));
    }

    #[test]
    fn non_cyclic_group_rejected() {
        let hex = builtin_fan("hexagon").unwrap();
        let d6 = GroupSpec::dihedral(6).unwrap();
        assert!(matches!(
            classify_fan(&hex, &d6, &FieldBackend::RealComplex, false),
            Err(ClassifyError::NonCyclicGroup(_))
        ));
        let z3 = GroupSpec::cyclic(3).unwrap();
        assert!(matches!(
            classify_fan(&hex, &z3, &FieldBackend::RealComplex, false),
            Err(ClassifyError::GroupMismatch { .. })
        ));
    }
}
