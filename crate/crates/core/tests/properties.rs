//! Randomised properties of continued fractions, paths and distances.

use std::sync::Arc;

use proptest::prelude::*;
use rosen_core::cf::{is_geodesic, nearest_integer_expansion, path_to_cf, reduce_to_geodesic};
use rosen_core::{make_context, oracle, HeckeIndex, QContext, RosenCF, Vertex};

fn ctx(q: u32) -> Arc<QContext> {
    if q == 0 {
        make_context(HeckeIndex::Infinity).unwrap()
    } else {
        QContext::finite(q).unwrap()
    }
}

/// q in 4..=7, or 0 for the theta group.
fn any_q() -> impl Strategy<Value = u32> {
    prop_oneof![Just(0u32), 4u32..=7]
}

fn coeffs(max_len: usize) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-4i64..=4, 1..=max_len)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn convergents_determine_coefficients(q in any_q(), b in coeffs(8)) {
        let cf = RosenCF::new(&ctx(q), b).unwrap();
        let back = path_to_cf(&cf.convergents()).unwrap();
        prop_assert_eq!(back.coeffs(), cf.coeffs());
    }

    #[test]
    fn zero_coefficient_means_backtrack(q in any_q(), b in coeffs(8)) {
        let cf = RosenCF::new(&ctx(q), b).unwrap();
        let path = cf.convergents();
        let v = path.vertices();
        for i in 2..=cf.len() {
            prop_assert_eq!(cf.coeffs()[i - 1] == 0, v[i - 2] == v[i]);
        }
    }

    #[test]
    fn mirror_symmetry(q in any_q(), b in coeffs(7)) {
        let cf = RosenCF::new(&ctx(q), b).unwrap();
        let m = cf.negated().unwrap();
        prop_assert_eq!(m.evaluate(), cf.evaluate().kappa());
        prop_assert_eq!(is_geodesic(&m).unwrap(), is_geodesic(&cf).unwrap());
    }

    #[test]
    fn nearest_expansion_is_a_geodesic(q in 3u32..=8, b in coeffs(7)) {
        let c = ctx(q);
        let y = RosenCF::new(&c, b).unwrap().evaluate();
        prop_assume!(!y.is_infinite());
        let e = nearest_integer_expansion(&c, &y).unwrap();
        prop_assert_eq!(e.evaluate(), y.clone());
        let d = oracle::distance(&Vertex::infinity(&c), &Vertex::from_point(&c, &y).unwrap()).unwrap();
        prop_assert_eq!(e.len(), d);
    }

    #[test]
    fn reduction_keeps_the_value(q in prop_oneof![Just(0u32), 4u32..=8], b in coeffs(9)) {
        let cf = RosenCF::new(&ctx(q), b).unwrap();
        prop_assume!(!cf.evaluate().is_infinite());
        let r = reduce_to_geodesic(&cf).unwrap();
        prop_assert_eq!(r.evaluate(), cf.evaluate());
        prop_assert!(is_geodesic(&r).unwrap());
        prop_assert!(r.len() <= cf.len());
    }

    #[test]
    fn distance_is_a_metric(q in 4u32..=6, a in coeffs(4), b in coeffs(4), c in coeffs(4)) {
        let k = ctx(q);
        let v = |s: Vec<i64>| Vertex::from_point(&k, &RosenCF::new(&k, s).unwrap().evaluate()).unwrap();
        let (x, y, z) = (v(a), v(b), v(c));
        let dxy = oracle::distance(&x, &y).unwrap();
        prop_assert_eq!(dxy, oracle::distance(&y, &x).unwrap());
        prop_assert_eq!(dxy == 0, x == y);
        prop_assert!(dxy <= oracle::distance(&x, &z).unwrap() + oracle::distance(&z, &y).unwrap());
    }
}
