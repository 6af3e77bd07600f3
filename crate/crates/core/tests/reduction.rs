mod common;

use common::criteria::{criterion_3, criterion_4, lll_violations};
use common::*;
use mertens_core::rug::Rational;
use mertens_core::{bkz_progressive, lll, size_reduce, ReductionParams, SvpPruning};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn small_reduction_invariants() {
    let out = criterion_3(30, 31);
    assert!(out.pass, "{}", out.detail);
}

#[test]
fn small_svp_exactness() {
    let out = criterion_4(4, 32);
    assert!(out.pass, "{}", out.detail);
}

#[test]
fn size_reduction_bounds_every_coefficient() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let half = Rational::from((1, 2));
    for _ in 0..20 {
        let b = random_basis(&mut rng, 10, 50);
        let (out, u) = size_reduce(&b).unwrap();
        assert!(u.is_unimodular());
        assert_eq!(u.apply(&b), out);
        let g = rational_gso(&out);
        for i in 0..10 {
            for j in 0..i {
                assert!(Rational::from(g.mu[i][j].abs_ref()) <= half);
            }
        }
    }
}

#[test]
fn bkz_two_is_lll_quality() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    let b = random_basis(&mut rng, 15, 30);
    let params = ReductionParams {
        beta_start: 2,
        beta_end: 2,
        ..Default::default()
    };
    let out = bkz_progressive(&b, &params).unwrap();
    assert!(lll_violations(&out.basis, &Rational::from((99, 100))).is_empty());
    assert_eq!(out.tours.len(), 2);
}

#[test]
fn full_block_bkz_finds_the_shortest_vector() {
    let mut rng = ChaCha8Rng::seed_from_u64(35);
    for _ in 0..3 {
        let b = random_basis(&mut rng, 20, 20);
        let params = ReductionParams {
            beta_start: 20,
            beta_end: 20,
            svp_pruning: SvpPruning::None,
            ..Default::default()
        };
        let out = bkz_progressive(&b, &params).unwrap();
        let b1 = mertens_core::lattice::norm_sq(out.basis.row(0));
        let (red, _) = lll(&b, &ReductionParams::default()).unwrap();
        let upper = mertens_core::lattice::norm_sq(red.row(0));
        assert_eq!(b1, shortest_norm_sq(&red, &upper));
    }
}

#[test]
fn reduction_is_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(36);
    let b = random_basis(&mut rng, 18, 40);
    let params = ReductionParams {
        beta_start: 2,
        beta_end: 12,
        ..Default::default()
    };
    let a = bkz_progressive(&b, &params).unwrap();
    let c = bkz_progressive(&b, &params).unwrap();
    assert_eq!(a.basis, c.basis);
    assert_eq!(a.transform, c.transform);
}

#[test]
fn pruned_block_search_keeps_invariants() {
    let mut rng = ChaCha8Rng::seed_from_u64(37);
    let b = random_basis(&mut rng, 24, 20);
    let params = ReductionParams {
        beta_start: 10,
        beta_end: 16,
        svp_pruning: SvpPruning::LinearBeta,
        ..Default::default()
    };
    let out = bkz_progressive(&b, &params).unwrap();
    assert!(out.transform.is_unimodular());
    assert_eq!(out.transform.apply(&b), out.basis);
    assert!(lll_violations(&out.basis, &Rational::from((99, 100))).is_empty());
    for w in out.tours.windows(2) {
        assert!(w[1].b1_norm <= w[0].b1_norm);
    }
}
