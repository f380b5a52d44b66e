mod common;

use std::collections::BTreeSet;

use common::{c4, euler, four_chi, radical, H0, HINF};
use rand::Rng;
use tubular::lattice::DimVector;
use tubular::omega::{coordinate_bound, enumerate_omega_in_box};

/// All x with last two coordinates zero, |xᵢ| ≤ bound and χ(x) = 1, found
/// with the printed sum of squares.
fn scan(bound: i64) -> BTreeSet<Vec<i64>> {
    let r = -bound..=bound;
    let mut out = BTreeSet::new();
    for a in r.clone() {
        for b in r.clone() {
            for c in r.clone() {
                for d in r.clone() {
                    let x = vec![a, b, c, d, 0, 0];
                    if four_chi(&x) == 4 {
                        out.insert(x);
                    }
                }
            }
        }
    }
    out
}

#[test]
fn omega_matches_independent_scan() {
    let c = c4();
    let found: BTreeSet<Vec<i64>> = c.omega.elements.iter().map(|x| x.0.clone()).collect();
    assert_eq!(found.len(), c.omega.count);
    assert_eq!(found, scan(c.omega.bound));
    // A wider box finds nothing new.
    assert_eq!(scan(c.omega.bound + 2), found);
}

#[test]
fn omega_structure() {
    let c = c4();
    assert_eq!(coordinate_bound(&c.spec).unwrap().bound, c.omega.bound);
    for x in &c.omega.elements {
        assert!(x.0.iter().all(|v| v.abs() <= c.omega.bound));
        assert!(c.omega.contains(&x.scale(-1)));
    }
    for i in 0..4 {
        let e = DimVector::unit(6, i);
        assert!(c.omega.contains(&e));
        assert!(c.omega.contains(&e.scale(-1)));
    }
    assert_eq!(enumerate_omega_in_box(&c.lat, c.omega.bound), c.omega);
}

#[test]
fn unit_decompose_round_trip() {
    let c = c4();
    for y in &c.omega.elements {
        for a in -20..=20 {
            for b in -20..=20 {
                let x = DimVector(radical(a, b, &y.0));
                assert_eq!(c.omega.unit_decompose(&c.lat, &x).unwrap(), (a, b, y.clone()));
            }
        }
    }
}

#[test]
fn radical_decompose_inverts_combine() {
    let c = c4();
    for a in -15..=15 {
        for b in -15..=15 {
            let x = c.lat.combine(a, b);
            assert_eq!(x.0, radical(a, b, &[0; 6]));
            assert_eq!(c.lat.radical_decompose(&x).unwrap(), (a, b));
        }
    }
    assert!(c.lat.radical_decompose(&DimVector::unit(6, 0)).is_err());
}

#[test]
fn lattice_bilinear_matches_direct_count() {
    let c = c4();
    let mut r = common::rng(7);
    for _ in 0..500 {
        let x: Vec<i64> = (0..6).map(|_| r.gen_range(-10..=10)).collect();
        let y: Vec<i64> = (0..6).map(|_| r.gen_range(-10..=10)).collect();
        assert_eq!(c.lat.bilinear(&DimVector(x.clone()), &DimVector(y.clone())).unwrap(), euler(&x, &y));
    }
    assert_eq!(euler(&H0, &HINF), 2);
    assert_eq!(euler(&HINF, &H0), -2);
}
