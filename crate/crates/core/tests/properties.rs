mod common;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use common::{blowup_sequence, dihedral_equal, random_surface};
use toric_forms::aut::{
    automorphism_group, aut_via_sequence, identify_gl2_class, identify_gl2_matrices,
    involution_type, matrix_group_closure, Gl2Label, InvolutionType,
};
use toric_forms::builtin::{builtin_fan, builtin_names};
use toric_forms::cohomology::{
    brute_force_h1_finite, finite_field_norm_formula, h1_finite_field_torus, h1_real_involution,
    FiniteModule, LatticeAction,
};
use toric_forms::fan::Fan;
use toric_forms::galois::{enumerate_hom_classes, FieldBackend, GroupSpec};
use toric_forms::linalg::{
    cokernel_presentation, kernel_basis, lattice_basis, lattice_subquotient, smith_normal_form,
    IntMatrix,
};

fn matrix(max_rows: usize, max_cols: usize, bound: i64) -> impl Strategy<Value = IntMatrix> {
    (0..=max_rows, 0..=max_cols).prop_flat_map(move |(r, c)| {
        prop::collection::vec(-bound..=bound, r * c).prop_map(move |v| {
            IntMatrix::new(r, c, v.into_iter().map(BigInt::from).collect()).unwrap()
        })
    })
}

/// Product of random elementary row operations.
fn unimodular(n: usize) -> impl Strategy<Value = IntMatrix> {
    prop::collection::vec((0..n.max(1), 0..n.max(1), -3i64..=3, any::<bool>()), 0..8).prop_map(
        move |ops| {
            let mut m = IntMatrix::identity(n);
            for (i, j, k, flip) in ops {
                let mut e = IntMatrix::identity(n);
                if i != j {
                    e.set(i, j, BigInt::from(k));
                } else if flip {
                    e.set(i, i, BigInt::from(-1));
                }
                m = &e * &m;
            }
            m
        },
    )
}

/// Unimodular 2x2 matrices with entries in [-3, 3].
fn small_gl2() -> impl Strategy<Value = IntMatrix> {
    prop::array::uniform4(-3i64..=3)
        .prop_filter("unimodular", |[a, b, c, d]| (a * d - b * c).abs() == 1)
        .prop_map(|[a, b, c, d]| IntMatrix::from_rows(&[[a, b], [c, d]]))
}

fn surface() -> impl Strategy<Value = Fan> {
    (0usize..5, prop::collection::vec(0usize..16, 0..5)).prop_map(|(s, p)| random_surface(s, &p))
}

fn transform_fan(fan: &Fan, p: &IntMatrix) -> Fan {
    let rays: Vec<Vec<i64>> = fan
        .rays()
        .iter()
        .map(|r| p.apply_i64(r).iter().map(|x| i64::try_from(x).unwrap()).collect())
        .collect();
    Fan::validate(fan.rank(), rays, fan.cones().to_vec()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn smith_decomposition(m in matrix(4, 4, 20)) {
        let s = smith_normal_form(&m);
        prop_assert_eq!(&(&s.u * &m) * &s.v, s.d.clone());
        prop_assert!(s.u.det().abs().is_one());
        prop_assert!(s.v.det().abs().is_one());
        prop_assert!((&s.u * &s.u_inv).is_identity());
        let diag = s.diagonal();
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                if i != j {
                    prop_assert!(s.d.get(i, j).is_zero());
                }
            }
        }
        for w in diag.windows(2) {
            prop_assert!(!w[0].is_negative() && !w[1].is_negative());
            if w[0].is_zero() {
                prop_assert!(w[1].is_zero());
            } else {
                prop_assert!((&w[1] % &w[0]).is_zero());
            }
        }
    }

    #[test]
    fn cokernel_is_unimodular_invariant(
        m in matrix(3, 3, 9).prop_filter("square-ish", |m| m.rows() == 3),
        p in unimodular(3),
        q in unimodular(3),
    ) {
        prop_assume!(m.cols() == 3);
        prop_assert_eq!(cokernel_presentation(&(&(&p * &m) * &q)), cokernel_presentation(&m));
    }

    #[test]
    fn subquotient_of_lattice_by_itself(m in matrix(4, 4, 9)) {
        let l = lattice_basis(&m);
        prop_assert!(lattice_subquotient(&l, &l).unwrap().is_trivial());
    }

    #[test]
    fn kernel_is_saturated(m in matrix(3, 5, 6)) {
        let k = kernel_basis(&m);
        prop_assert!((&m * &k).is_zero());
        prop_assert_eq!(k.cols(), m.cols() - smith_normal_form(&m).rank());
        // torsion-free cokernel means the span is saturated
        prop_assert!(cokernel_presentation(&k).invariant_factors.is_empty());
    }

    #[test]
    fn surface_invariants(fan in surface()) {
        let a = fan.a_sequence().unwrap();
        let m = fan.ray_count() as i64;
        prop_assert_eq!(a.iter().sum::<i64>(), 3 * m - 12);
        let cl = fan.class_group();
        prop_assert_eq!(cl.free_rank, fan.ray_count() - 2);
        prop_assert!(cl.invariant_factors.is_empty());
        let cox = fan.cox_data();
        prop_assert!((&cox.degree_matrix * &fan.ray_matrix().transpose()).is_zero());
        let back = Fan::from_json_str(&fan.to_json_string()).unwrap();
        prop_assert_eq!(back.to_json_string(), fan.to_json_string());
    }

    #[test]
    fn a_sequence_is_lattice_invariant(fan in surface(), p in small_gl2()) {
        let moved = transform_fan(&fan, &p);
        prop_assert!(dihedral_equal(&fan.a_sequence().unwrap(), &moved.a_sequence().unwrap()));
    }

    #[test]
    fn automorphisms_two_ways(fan in surface()) {
        let g = automorphism_group(&fan).unwrap();
        let h = aut_via_sequence(&fan).unwrap();
        prop_assert!(g.same_matrices(&h));
        // maximal finite subgroups are D8 and D12
        prop_assert!(12 % g.order() == 0 || 8 % g.order() == 0);
        prop_assert_eq!(identify_gl2_class(&g).unwrap().label.order(), g.order());
    }

    #[test]
    fn identification_is_conjugation_invariant(idx in 0usize..13, p in small_gl2()) {
        let label = Gl2Label::ALL[idx];
        let pinv = p.inverse_unimodular().unwrap();
        let gens: Vec<IntMatrix> =
            label.generators().iter().map(|g| &(&p * g) * &pinv).collect();
        let group = matrix_group_closure(&gens, 2);
        let found = identify_gl2_matrices(&group).unwrap();
        prop_assert_eq!(found.label, label);
        // the witness conjugates the canonical generators into the group
        let w = &found.witness;
        let winv = w.inverse_unimodular().unwrap();
        for g in label.generators() {
            prop_assert!(group.contains(&(&(w * &g) * &winv)));
        }
    }

    #[test]
    fn involution_split_matches_witness(idx in 0usize..4, p in small_gl2()) {
        let (s, want) = [
            (IntMatrix::identity(2), InvolutionType::Identity),
            (-&IntMatrix::identity(2), InvolutionType::MinusIdentity),
            (IntMatrix::from_rows(&[[1, 0], [0, -1]]), InvolutionType::CType),
            (IntMatrix::from_rows(&[[0, 1], [1, 0]]), InvolutionType::JType),
        ][idx].clone();
        let conj = &(&p * &s) * &p.inverse_unimodular().unwrap();
        prop_assert_eq!(involution_type(&conj), Some(want));
        let label = identify_gl2_matrices(&matrix_group_closure(&[conj], 2)).unwrap().label;
        let expected = match want {
            InvolutionType::Identity => Gl2Label::C1,
            InvolutionType::MinusIdentity => Gl2Label::C2,
            InvolutionType::CType => Gl2Label::D2,
            InvolutionType::JType => Gl2Label::D2p,
        };
        prop_assert_eq!(label, expected);
    }

    #[test]
    fn cyclic_hom_classes_are_element_classes(fan in surface(), d in 1usize..=6) {
        let g = automorphism_group(&fan).unwrap();
        let classes = enumerate_hom_classes(&GroupSpec::cyclic(d).unwrap(), &g);
        let expected = g
            .conjugacy_classes()
            .iter()
            .filter(|c| d % g.element_order(c[0]) == 0)
            .count();
        prop_assert_eq!(classes.len(), expected);
        for h in &classes {
            let reduced = h.kernel_reduction();
            prop_assert!(reduced.is_injective());
            let parts = |x: &toric_forms::galois::HomClass| {
                let mut v: Vec<Vec<usize>> = x.orbits().into_iter().map(|o| o.rays).collect();
                v.sort();
                v
            };
            prop_assert_eq!(parts(h), parts(&reduced));
            for o in h.orbits() {
                prop_assert_eq!(o.rays.len() * o.stabilizer.len(), d);
            }
        }
    }

    #[test]
    fn real_h1_conjugation_invariant(blocks in prop::collection::vec(0usize..3, 1..4), p in unimodular(6)) {
        // block diagonal involution built from 1, -1 and the swap
        let mut n = 0;
        let mut entries: Vec<(usize, usize, i64)> = Vec::new();
        for b in &blocks {
            match b {
                0 => { entries.push((n, n, 1)); n += 1; }
                1 => { entries.push((n, n, -1)); n += 1; }
                _ => { entries.push((n, n + 1, 1)); entries.push((n + 1, n, 1)); n += 2; }
            }
        }
        let mut s = IntMatrix::zeros(n, n);
        for (i, j, v) in entries {
            s.set(i, j, BigInt::from(v));
        }
        let p = p.select_rows(&(0..n).collect::<Vec<_>>()).select_columns(&(0..n).collect::<Vec<_>>());
        prop_assume!(p.is_unimodular());
        let conj = &(&p * &s) * &p.inverse_unimodular().unwrap();
        let h = h1_real_involution(&s).unwrap();
        prop_assert_eq!(h1_real_involution(&conj).unwrap(), h.clone());
        prop_assert!(h.is_killed_by(2));
        prop_assert!(h.invariant_factors.len() <= n);
        let minus = blocks.iter().filter(|&&b| b == 1).count();
        prop_assert_eq!(h.invariant_factors.len(), minus);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn finite_field_routes_agree(
        seed in 0usize..5,
        pos in prop::collection::vec(0usize..16, 0..3),
        q in prop::sample::select(vec![2u64, 3, 4, 5]),
        d in 2u64..=3,
    ) {
        let fan = random_surface(seed, &pos);
        let backend = FieldBackend::finite_field(q, d).unwrap();
        let g = automorphism_group(&fan).unwrap();
        let group = GroupSpec::cyclic(d as usize).unwrap();
        let n = q.pow(d as u32) - 1;
        for hom in enumerate_hom_classes(&group, &g) {
            let direct = finite_field_norm_formula(&hom, &backend, false);
            let orbits = finite_field_norm_formula(&hom, &backend, true);
            let action = LatticeAction::from_hom(&hom);
            let torus = h1_finite_field_torus(q, d, &action.generators[0]).unwrap();
            let module = FiniteModule::from_lattice_action(&action, n, q as i64);
            let brute = brute_force_h1_finite(&group, &module).unwrap();
            prop_assert_eq!(&direct, &orbits);
            prop_assert_eq!(&direct, &torus);
            prop_assert_eq!(&torus, &brute);
        }
    }
}

#[test]
fn builtin_a_sum_and_cox() {
    for name in builtin_names() {
        let fan = builtin_fan(&name).unwrap();
        let a = fan.a_sequence().unwrap();
        assert_eq!(a.iter().sum::<i64>(), 3 * a.len() as i64 - 12, "{name}");
        assert!(fan.cox_data().degree_rows_annihilate(&fan), "{name}");
    }
    assert!(dihedral_equal(&blowup_sequence(0, &[]), &[-1, -1, -1]));
}
