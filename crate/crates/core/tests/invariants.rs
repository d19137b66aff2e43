//! Homogeneity, parity and bilinearity properties over random inputs.

use homfinsler_core::catalog::Fixture;
use homfinsler_core::curvature::{orthonormalize_flag, NaturallyReductive};
use homfinsler_core::{DVector, HomogeneousSpace, InnerProduct, MinkowskiNorm, NormFamily};
use proptest::prelude::*;

fn family() -> impl Strategy<Value = NormFamily> {
    prop_oneof![
        (0.8..1.2f64, 0.8..1.2f64).prop_map(|(w1, w2)| NormFamily::Riemannian { w1, w2 }),
        (0.0..1.9f64).prop_map(|c| NormFamily::QuarticMean { c }),
        (0.1..2.0f64, 1u32..4).prop_map(|(k, p)| NormFamily::PhiPower { k, p }),
    ]
}

fn vec3() -> impl Strategy<Value = DVector<f64>> {
    prop::collection::vec(-1.0..1.0f64, 3)
        .prop_filter("away from the split axes", |v| v[0].hypot(v[1]) > 0.05 && v[2].abs() > 0.05)
        .prop_map(DVector::from_vec)
}

fn su2(family: NormFamily) -> HomogeneousSpace {
    Fixture::Su2Negative.space(family).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn tensor_is_scale_invariant(f in family(), y in vec3(), lambda in 0.1..10.0f64) {
        let norm = MinkowskiNorm::new(f, InnerProduct::identity(2, 1)).unwrap();
        let g = norm.fundamental_tensor(&y).unwrap().g_matrix;
        let gl = norm.fundamental_tensor(&(&y * lambda)).unwrap().g_matrix;
        prop_assert!((g - gl).amax() < 1e-9);
    }

    #[test]
    fn cartan_annihilates_y(f in family(), y in vec3(), u in vec3()) {
        let norm = MinkowskiNorm::new(f, InnerProduct::identity(2, 1)).unwrap();
        let c = norm.cartan_matrix(&y, &y).unwrap();
        prop_assert!(c.amax() < 1e-9);
        prop_assert!(norm.cartan_tensor(&y, &u, &y, &u).unwrap().abs() < 1e-9);
    }

    #[test]
    fn f_is_even_and_euler(f in family(), y in vec3()) {
        let norm = MinkowskiNorm::new(f, InnerProduct::identity(2, 1)).unwrap();
        let fy = norm.f_value(&y);
        prop_assert!((norm.f_value(&-&y) - fy).abs() < 1e-12);
        prop_assert!((norm.g_bilinear(&y, &y, &y).unwrap() - fy * fy).abs() < 1e-9);
    }

    #[test]
    fn spray_is_quadratic(f in family(), y in vec3(), lambda in -5.0..5.0f64) {
        prop_assume!(lambda.abs() > 0.05);
        let space = su2(f);
        let eta = space.spray_vector(&y).unwrap();
        let scaled = space.spray_vector(&(&y * lambda)).unwrap();
        prop_assert!((scaled - eta * (lambda * lambda)).amax() < 1e-9 * lambda * lambda);
    }

    #[test]
    fn s_is_odd(f in family(), y in vec3()) {
        let space = su2(f);
        let s = space.s_curvature(&y).unwrap();
        prop_assert!((space.s_curvature(&-&y).unwrap() + s).abs() < 1e-9);
    }

    #[test]
    fn tensor_is_bilinear(f in family(), y in vec3(), u in vec3(), v in vec3(), a in -2.0..2.0f64) {
        let norm = MinkowskiNorm::new(f, InnerProduct::identity(2, 1)).unwrap();
        let lhs = norm.g_bilinear(&y, &(&u * a + &v), &v).unwrap();
        let rhs = a * norm.g_bilinear(&y, &u, &v).unwrap() + norm.g_bilinear(&y, &v, &v).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-9);
        prop_assert!((norm.g_bilinear(&y, &u, &v).unwrap() - norm.g_bilinear(&y, &v, &u).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn flag_curvature_is_scale_invariant(c in 0.0..1.9f64, seed in 0u64..1000, lambda in 0.2..5.0f64) {
        let space = Fixture::S3xS3.space(NormFamily::QuarticMean { c }).unwrap();
        let nr = NaturallyReductive::certify(&space, 1e-9).unwrap();
        let flag = homfinsler_core::curvature::random_flags(&space, 1, seed, 0.1).remove(0);
        let a = nr.flag_curvature_nr(&flag, 1e-3).unwrap();
        let again = orthonormalize_flag(space.ip(), &(&flag.y * lambda), &(&flag.x + &flag.y)).unwrap();
        let b = nr.flag_curvature_nr(&again, 1e-3).unwrap();
        prop_assert!((a.k_generic - b.k_generic).abs() < 1e-10);
        prop_assert!((a.k_closed.unwrap() - a.k_generic).abs() < 1e-8 * (1.0 + a.k_generic.abs()));
    }
}
