//! The oracle against values worked out by hand.

mod common;

use std::collections::BTreeSet;

use common::oracle::*;

fn steps(sets: &[&[usize]]) -> Steps {
    sets.iter().map(|s| s.iter().copied().collect::<BTreeSet<usize>>()).collect()
}

#[test]
fn three_step_example() {
    let t = steps(&[&[0], &[1], &[2]]);
    let (weak, strong, w) = oracle_persistence(&t, 3, 2, 1, &[0]);
    assert_eq!((weak, strong), (1.0, 0.0));
    assert!(w[0].occurs && !w[0].coinst);
    assert_eq!(oracle_minimal_horizons(&t, 3, 1, 0, 8), (Some(2), None));
    assert_eq!(oracle_gap(&[(Some(2), None)]), Some(f64::INFINITY));
}

#[test]
fn two_step_noncommutation() {
    let t = steps(&[&[0], &[1]]);
    let (_, _, w) = oracle_persistence(&t, 2, 1, 1, &[0]);
    assert!(w[0].occurs && !w[0].coinst);
    let (weak, strong, _) = oracle_persistence(&t, 2, 0, 1, &[0, 1]);
    assert_eq!((weak, strong), (0.0, 0.0));
}

#[test]
fn alternating_pairs() {
    let t: Steps = (0..10).map(|u| BTreeSet::from([u % 2])).collect();
    let eval = oracle_all_valid(10, 1, 1);
    assert_eq!(eval.len(), 9);
    assert_eq!(oracle_persistence(&t, 2, 1, 1, &eval).0, 1.0);
    assert_eq!(oracle_persistence(&t, 2, 1, 1, &eval).1, 0.0);
}

#[test]
fn horizons_and_median() {
    // Full set at step 3, pieces before it.
    let t = steps(&[&[0], &[1], &[], &[0, 1]]);
    assert_eq!(oracle_minimal_horizons(&t, 2, 1, 0, 8), (Some(1), Some(3)));
    assert_eq!(oracle_minimal_horizons(&t, 2, 1, 1, 8), (Some(2), Some(2)));
    assert_eq!(oracle_minimal_horizons(&t, 2, 1, 2, 8), (Some(1), Some(1)));
    assert_eq!(oracle_minimal_horizons(&t, 2, 1, 0, 2), (Some(1), None));
    // Ratios 4/2, 3/3, 2/2: median 1.
    assert_eq!(oracle_gap(&[(Some(1), Some(3)), (Some(2), Some(2)), (Some(1), Some(1))]), Some(1.0));
    assert_eq!(oracle_gap(&[(Some(1), Some(3)), (Some(1), Some(1))]), Some(1.5));
    assert_eq!(oracle_gap(&[(Some(1), None), (Some(1), Some(1))]), Some(f64::INFINITY));
    assert_eq!(oracle_gap(&[(None, None)]), None);
}

#[test]
fn distance_and_bound() {
    let a = BTreeSet::from([0, 1, 2, 3]);
    let b = BTreeSet::from([3]);
    assert_eq!(oracle_distance(&a, &b, 4), 0.75);
    let bound = oracle_recovery_bound(&a, &b, &BTreeSet::from([0]), 4, 0.0);
    assert_eq!(format!("{bound:.6}"), "0.333333");
    assert_eq!(oracle_recovery_bound(&a, &a, &BTreeSet::new(), 4, 0.0), 1.0);
}
