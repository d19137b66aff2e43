//! Closed forms against brute-force oracles.

use homfinsler_core::catalog::{self, Fixture};
use homfinsler_core::sampling::{gaussian, rng};
use homfinsler_core::{oracle, DMatrix, DVector, HomogeneousSpace, InnerProduct, MinkowskiNorm, NormFamily, Tolerances};

fn random_block_gram(n1: usize, n2: usize, seed: u64) -> InnerProduct {
    let mut r = rng(seed);
    let mut gram = DMatrix::zeros(n1 + n2, n1 + n2);
    for (off, len) in [(0, n1), (n1, n2)] {
        let a = DMatrix::from_fn(len, len, |_, _| gaussian(&mut r, 1)[0]);
        let block = &a * a.transpose() + DMatrix::identity(len, len) * len as f64;
        gram.view_mut((off, off), (len, len)).copy_from(&block);
    }
    InnerProduct::new(gram, n1, n2).unwrap()
}

fn families() -> Vec<NormFamily> {
    vec![
        NormFamily::Riemannian { w1: 1.0, w2: 1.0 },
        NormFamily::QuarticMean { c: 0.5 },
        NormFamily::QuarticMean { c: 1.0 },
        NormFamily::QuarticMean { c: 1.5 },
        NormFamily::PhiPower { k: 0.5, p: 2 },
    ]
}

fn rel_err(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).amax() / b.amax().max(1e-300)
}

#[test]
fn fundamental_tensor_matches_hessian_of_f_squared() {
    let dims = [(1, 1), (2, 1), (2, 2), (3, 2)];
    let mut count = 0;
    let mut worst: f64 = 0.0;
    for (fi, family) in families().into_iter().enumerate() {
        for (di, &(n1, n2)) in dims.iter().enumerate() {
            let seed = (fi * 10 + di) as u64;
            let norm = MinkowskiNorm::new(family.clone(), random_block_gram(n1, n2, seed)).unwrap();
            let mut r = rng(seed + 1000);
            for _ in 0..12 {
                let y = gaussian(&mut r, n1 + n2);
                let closed = norm.fundamental_tensor(&y).unwrap().g_matrix;
                let fd = oracle::fundamental_tensor_fd(&norm, &y);
                worst = worst.max(rel_err(&closed, &fd));
                count += 1;
            }
        }
    }
    assert!(count >= 200);
    assert!(worst <= 1e-6, "worst relative error {worst:e}");
}

#[test]
fn phi_form_matches_l_form() {
    for family in families() {
        let norm = MinkowskiNorm::new(family, InnerProduct::identity(2, 2)).unwrap();
        let mut r = rng(3);
        for _ in 0..50 {
            let (y, u, v) = (gaussian(&mut r, 4), gaussian(&mut r, 4), gaussian(&mut r, 4));
            let a = norm.g_bilinear(&y, &u, &v).unwrap();
            let b = norm.fundamental_tensor_phi(&y, &u, &v).unwrap();
            assert!((a - b).abs() < 1e-10 * (1.0 + a.abs()), "{a} vs {b}");
        }
    }
}

#[test]
fn cartan_tensor_matches_difference_quotient() {
    for family in families().into_iter().skip(1) {
        let norm = MinkowskiNorm::new(family, random_block_gram(2, 2, 5)).unwrap();
        let mut r = rng(17);
        for _ in 0..40 {
            let y = gaussian(&mut r, 4);
            let (u, v, w) = (gaussian(&mut r, 4), gaussian(&mut r, 4), gaussian(&mut r, 4));
            let closed = norm.cartan_tensor(&y, &u, &v, &w).unwrap();
            let fd = oracle::cartan_fd(&norm, &y, &u, &v, &w);
            assert!((closed - fd).abs() < 1e-6 * (1.0 + fd.abs()), "{closed} vs {fd}");
        }
    }
}

#[test]
fn spray_matches_random_frame_solve() {
    for fixture in Fixture::ALL {
        let space = fixture.space(NormFamily::PhiPower { k: 0.8, p: 2 }).unwrap();
        for (i, y) in space.unit_directions(30, 21).into_iter().enumerate() {
            let closed = space.spray_vector(&y).unwrap();
            let brute = oracle::spray_bruteforce(&space, &y, i as u64).unwrap();
            assert!((&closed - &brute).amax() < 1e-9, "{}: {closed} vs {brute}", fixture.name());
        }
    }
}

#[test]
fn three_way_naturally_reductive_agreement() {
    let tol = Tolerances::default();
    for fixture in [Fixture::EuclideanDiagSo2, Fixture::Abelian, Fixture::S3xS3, Fixture::Su2Negative] {
        let space = fixture.space(NormFamily::QuarticMean { c: 1.0 }).unwrap();
        let structural = space.nr_structural_check(tol.structure).naturally_reductive;
        let latifi = space.nr_latifi_check(256, 1, tol.nr).passed;
        let spray = space.nr_spray_check(256, 1, tol.nr).passed;
        assert_eq!([structural, latifi, spray], [fixture.naturally_reductive(); 3], "{}", fixture.name());
    }
}

#[test]
fn s_vanishes_on_each_block() {
    for fixture in Fixture::ALL {
        for family in [NormFamily::QuarticMean { c: 1.0 }, NormFamily::PhiPower { k: 0.5, p: 3 }] {
            let space = fixture.space(family).unwrap();
            let check = space.s_on_blocks(50, 8, 1e-9);
            assert!(check.passed, "{}: {check:?}", fixture.name());
        }
    }
}

#[test]
fn equivalence_audit_verdicts() {
    let tol = Tolerances::default();
    for fixture in Fixture::ALL {
        let space = fixture.space(NormFamily::QuarticMean { c: 1.0 }).unwrap();
        let report = space.equivalence_audit(64, 4, &tol);
        assert!(report.consistent(), "{}: {report:?}", fixture.name());
        let expected = fixture != Fixture::Su2Negative;
        assert_eq!(report.verdicts(), [expected; 4], "{}", fixture.name());
    }
}

#[test]
fn e_curvature_symmetric_and_degree_minus_one() {
    let space = catalog::Fixture::Su2Negative.space(NormFamily::QuarticMean { c: 1.0 }).unwrap();
    let y = DVector::from_vec(vec![0.5, -0.4, 0.7]);
    let e = space.e_curvature(&y).unwrap();
    assert!(e.amax() > 1e-3);
    assert!((&e - e.transpose()).amax() < 1e-12);
    for lambda in [0.5, 4.0] {
        let scaled = space.e_curvature(&(&y * lambda)).unwrap();
        assert!((scaled * lambda - &e).amax() < 1e-5 * e.amax(), "lambda {lambda}");
    }
}

#[test]
fn latifi_and_spray_reject_squashed_split_for_every_nonlinear_family() {
    for family in [NormFamily::QuarticMean { c: 0.5 }, NormFamily::PhiPower { k: 1.0, p: 2 }] {
        let space = HomogeneousSpace::new(catalog::su2_negative(), family).unwrap();
        assert!(!space.nr_latifi_check(64, 2, 1e-8).passed);
        assert!(!space.nr_spray_check(64, 2, 1e-8).passed);
    }
}
