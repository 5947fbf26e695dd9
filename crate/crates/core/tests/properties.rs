//! Property tests for the algebraic invariants: ring axioms, Frobenius and
//! Teichmuller multiplicativity, composition associativity, two-sided
//! compositional inverses, Weierstrass-degree multiplicativity, and the
//! Minkowski-sum behavior of Newton polygons under products.

use proptest::prelude::*;

use padic_dynamics::series::{newton_polygon, Ratio, Series};
use padic_dynamics::zq::Ring;

fn quadratic_ring() -> Ring {
    Ring::new(3, 2, &[1, 0, 1], 6).unwrap()
}

fn arb_element() -> impl Strategy<Value = (i64, i64)> {
    (any::<i64>(), any::<i64>())
}

proptest! {
    #[test]
    fn ring_axioms_hold((a0, a1) in arb_element(), (b0, b1) in arb_element(), (c0, c1) in arb_element()) {
        let r = quadratic_ring();
        let x = r.element(&[a0 % 1000, a1 % 1000]);
        let y = r.element(&[b0 % 1000, b1 % 1000]);
        let z = r.element(&[c0 % 1000, c1 % 1000]);
        prop_assert_eq!(x.clone() + y.clone(), y.clone() + x.clone());
        prop_assert_eq!(x.clone() * y.clone(), y.clone() * x.clone());
        prop_assert_eq!(
            (x.clone() + y.clone()) + z.clone(),
            x.clone() + (y.clone() + z.clone())
        );
        prop_assert_eq!(
            (x.clone() * y.clone()) * z.clone(),
            x.clone() * (y.clone() * z.clone())
        );
        prop_assert_eq!(
            x.clone() * (y.clone() + z.clone()),
            x.clone() * y.clone() + x.clone() * z.clone()
        );
    }

    #[test]
    fn frobenius_is_a_ring_homomorphism((a0, a1) in arb_element(), (b0, b1) in arb_element()) {
        let r = quadratic_ring();
        let x = r.element(&[a0 % 1000, a1 % 1000]);
        let y = r.element(&[b0 % 1000, b1 % 1000]);
        prop_assert_eq!(
            (x.clone() * y.clone()).frobenius(),
            x.frobenius() * y.frobenius()
        );
        prop_assert_eq!(
            (x.clone() + y.clone()).frobenius(),
            x.frobenius() + y.frobenius()
        );
    }

    #[test]
    fn teichmuller_is_multiplicative(a in 0i64..9, b in 0i64..9) {
        let r = quadratic_ring();
        let x = r.element(&[a % 3, a / 3]);
        let y = r.element(&[b % 3, b / 3]);
        let lhs = r.teichmuller(&(x.clone() * y.clone()));
        let rhs = r.teichmuller(&x) * r.teichmuller(&y);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn valuation_is_multiplicative(a in 1i64..3000, k in 0u32..4, b in 1i64..3000, l in 0u32..4) {
        let r = Ring::unramified(5, 1, 6).unwrap();
        let x = r.integer(a * 5i64.pow(k));
        let y = r.integer(b * 5i64.pow(l));
        let expected = (x.valuation() + y.valuation()).min(6);
        prop_assert_eq!((x * y).valuation(), expected);
    }

    #[test]
    fn composition_is_associative(
        a in prop::collection::vec(0i64..200, 5),
        b in prop::collection::vec(0i64..200, 5),
        c in prop::collection::vec(0i64..200, 5),
    ) {
        let r = Ring::unramified(3, 1, 5).unwrap();
        let m = 9;
        let mk = |v: &[i64]| {
            let mut ints = vec![0i64];
            ints.extend_from_slice(v);
            Series::from_integers(&r, &ints, m)
        };
        let (f, g, h) = (mk(&a), mk(&b), mk(&c));
        let lhs = f.compose(&g).unwrap().compose(&h).unwrap();
        let rhs = f.compose(&g.compose(&h).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn compositional_inverse_is_two_sided(
        tail in prop::collection::vec(0i64..200, 5),
        unit in 1i64..5,
    ) {
        let r = Ring::unramified(5, 1, 6).unwrap();
        let m = 8;
        let mut ints = vec![0i64, unit];
        ints.extend_from_slice(&tail);
        let f = Series::from_integers(&r, &ints, m);
        let g = f.comp_inverse().unwrap();
        prop_assert_eq!(g.compose(&f).unwrap(), Series::identity(&r, m));
        prop_assert_eq!(f.compose(&g).unwrap(), Series::identity(&r, m));
    }

    #[test]
    fn weierstrass_degree_is_multiplicative_under_composition(
        d1 in 2usize..4,
        d2 in 2usize..4,
        noise1 in 0i64..3,
        noise2 in 0i64..3,
    ) {
        // Lubin-Tate-shaped inputs: p * (lower part) + unit * T^d
        let r = Ring::unramified(3, 1, 6).unwrap();
        let m = 17;
        let shaped = |d: usize, noise: i64| {
            let mut s = Series::monomial(&r.integer(3), 1, m);
            s = s.add(&Series::monomial(&r.integer(3 * noise), 2, m));
            s.add(&Series::monomial(&r.one(), d, m))
        };
        let f = shaped(d1, noise1);
        let g = shaped(d2, noise2);
        prop_assert_eq!(f.weierstrass_degree(), Some(d1));
        let composed = f.compose(&g).unwrap();
        prop_assert_eq!(composed.weierstrass_degree(), Some(d1 * d2));
    }

    #[test]
    fn newton_polygon_of_product_merges_slopes(
        v1 in 0u32..3, v2 in 0u32..3, v3 in 0u32..3, v4 in 0u32..3,
    ) {
        // product of exact polynomials: slope multiset of the product is the
        // union of the factors' slope multisets
        let r = Ring::unramified(2, 1, 12).unwrap();
        let m = 12;
        let poly = |va: u32, vb: u32| {
            let mut s = Series::monomial(&r.integer(2i64.pow(va)), 0, m);
            s = s.add(&Series::monomial(&r.integer(2i64.pow(vb)), 1, m));
            s.add(&Series::monomial(&r.one(), 3, m))
        };
        let f = poly(v1, v2);
        let g = poly(v3, v4);
        let product = f.mul(&g);

        let mut expected: Vec<(Ratio, usize)> = Vec::new();
        for part in [&f, &g] {
            for seg in newton_polygon(part).unwrap().segments {
                expected.push((seg.slope, seg.length));
            }
        }
        let mut merged: Vec<(Ratio, usize)> = Vec::new();
        expected.sort_by(|a, b| a.0.cmp(&b.0));
        for (slope, len) in expected {
            match merged.last_mut() {
                Some((s, l)) if *s == slope => *l += len,
                _ => merged.push((slope, len)),
            }
        }
        let got: Vec<(Ratio, usize)> = newton_polygon(&product)
            .unwrap()
            .segments
            .iter()
            .map(|s| (s.slope, s.length))
            .collect();
        prop_assert_eq!(got, merged);
    }
}
