use std::sync::OnceLock;

use proptest::prelude::*;
use tubular::algebra::{build_c4, euler_data, validate_spec, AlgebraFile, AlgebraSpec, PathAlgebra};
use tubular::error::Error;
use tubular::lattice::{DimVector, K0Lattice};
use tubular::rational::{frac, q};

/// 4χ(x) from the sum-of-squares display, with denominators cleared.
fn four_chi(x: &[i64]) -> i64 {
    let s1 = x[0] - x[1];
    let s2 = 2 * x[2] - x[0] - x[1] - x[3] - x[4];
    let s3 = x[3] - x[4];
    let s4 = x[0] + x[1] - x[3] - x[4] + 2 * x[5];
    2 * s1 * s1 + s2 * s2 + 2 * s3 * s3 + s4 * s4
}

/// Arrows of C(4, λ) as 0-based (src, tgt).
const ARROWS: [(usize, usize); 6] = [(5, 3), (3, 2), (5, 4), (4, 2), (2, 0), (2, 1)];

/// Number of quiver paths from `i` to `j`, counted by depth-first search.
fn quiver_paths(i: usize, j: usize) -> i64 {
    let here = i64::from(i == j);
    here + ARROWS.iter().filter(|(s, _)| *s == i).map(|&(_, t)| quiver_paths(t, j)).sum::<i64>()
}

fn c4() -> AlgebraSpec {
    build_c4(q(2)).unwrap()
}

fn lat() -> &'static K0Lattice {
    static LAT: OnceLock<K0Lattice> = OnceLock::new();
    LAT.get_or_init(|| c4().lattice().unwrap())
}

fn failed_checks(spec: &AlgebraSpec) -> Vec<String> {
    validate_spec(spec).checks.into_iter().filter(|c| !c.passed).map(|c| c.name).collect()
}

#[test]
fn c4_shape() {
    let spec = c4();
    assert_eq!(spec.vertex_count, 6);
    assert_eq!(spec.arrows.len(), 6);
    assert_eq!(spec.relations.len(), 2);
    assert!(matches!(build_c4(q(0)), Err(Error::Domain(_))));
    assert!(matches!(build_c4(q(1)), Err(Error::Domain(_))));
    assert!(validate_spec(&build_c4(q(-1)).unwrap()).passed());
    assert!(validate_spec(&build_c4(frac(3, 7)).unwrap()).passed());
}

#[test]
fn cartan_matches_path_count_minus_relations() {
    let alg = PathAlgebra::new(&c4()).unwrap();
    let cartan = alg.cartan();
    let mut total = 0;
    for (i, row) in cartan.iter().enumerate() {
        for (j, &entry) in row.iter().enumerate() {
            // Both relations run from vertex 6 to vertices 1 and 2.
            let relations = i64::from(j == 5 && (i == 0 || i == 1));
            assert_eq!(entry, quiver_paths(j, i) - relations, "entry ({i}, {j})");
            total += entry;
        }
    }
    assert_eq!(total as usize, alg.basis().total_dimension);
    assert_eq!(total, 20);
}

#[test]
fn euler_matrix_matches_direct_count() {
    let e = euler_data(&c4()).unwrap().euler_matrix;
    for (i, row) in e.iter().enumerate() {
        for (j, &entry) in row.iter().enumerate() {
            let arrows = ARROWS.iter().filter(|&&a| a == (i, j)).count() as i64;
            let relations = i64::from(i == 5 && (j == 0 || j == 1));
            assert_eq!(entry, i64::from(i == j) - arrows + relations, "entry ({i}, {j})");
        }
    }
}

#[test]
fn radical_pairings() {
    let lat = c4().lattice().unwrap();
    assert_eq!(lat.quadratic(lat.h0()).unwrap(), 0);
    assert_eq!(lat.quadratic(lat.hinf()).unwrap(), 0);
    assert_eq!(lat.bilinear(lat.h0(), lat.hinf()).unwrap(), 2);
    assert_eq!(lat.bilinear(lat.hinf(), lat.h0()).unwrap(), -2);
    assert_eq!(lat.bilinear(lat.h0(), &DimVector::zero(6)).unwrap(), 0);
}

#[test]
fn reversed_arrow_is_rejected_or_fails_validation() {
    let file = c4().to_file();
    let mut reversed = file.clone();
    let a = &mut reversed.arrows[4];
    std::mem::swap(&mut a.src, &mut a.tgt);
    assert!(matches!(AlgebraSpec::from_file(&reversed), Err(Error::InvalidSpec(_))));
    // Without the relations through it the spec parses but the invariants break.
    reversed.relations.clear();
    let failed = failed_checks(&AlgebraSpec::from_file(&reversed).unwrap());
    assert!(failed.contains(&"pairing".to_string()));
    assert!(failed.contains(&"printed_chi".to_string()));
}

#[test]
fn missing_relation_fails_validation() {
    let mut file: AlgebraFile = c4().to_file();
    file.relations.pop();
    let failed = failed_checks(&AlgebraSpec::from_file(&file).unwrap());
    assert!(failed.contains(&"printed_chi".to_string()));
    assert!(failed.contains(&"antisymmetry".to_string()));
}

#[test]
fn relation_sign_flip_keeps_invariants() {
    // β(a12a11 + a22a21) gives an algebra isomorphic to the original one
    // (rescale a21 by −1), so no numerical invariant can tell them apart.
    let mut file = c4().to_file();
    file.relations[0][1].coeff = "1".into();
    let flipped = AlgebraSpec::from_file(&file).unwrap();
    assert!(failed_checks(&flipped).is_empty());
    assert_eq!(euler_data(&flipped).unwrap(), euler_data(&c4()).unwrap());
}

#[test]
fn json_round_trip() {
    let json = c4().to_json();
    assert_eq!(AlgebraSpec::from_json(&json).unwrap().to_json(), json);
}

proptest! {
    #[test]
    fn derived_chi_matches_display(x in proptest::collection::vec(-10i64..=10, 6)) {
        let lat = lat();
        prop_assert_eq!(4 * lat.quadratic(&DimVector(x.clone())).unwrap(), four_chi(&x));
    }

    #[test]
    fn chi_is_invariant_under_radical_shifts(x in proptest::collection::vec(-10i64..=10, 6), s in -3i64..=3) {
        let lat = lat();
        let x = DimVector(x);
        let chi = lat.quadratic(&x).unwrap();
        prop_assert_eq!(lat.quadratic(&(&x + &lat.h0().scale(s))).unwrap(), chi);
        prop_assert_eq!(lat.quadratic(&(&x + &lat.hinf().scale(s))).unwrap(), chi);
    }
}
