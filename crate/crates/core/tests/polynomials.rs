use fqgraph::graph::corpus::{connected_simple_graphs, named_families};
use fqgraph::poly::graph_poly::{
    bilinear_parts, delta_pair, graph_polynomial, quartic_f, triangle_decomposition, vertex_face_decomposition,
};
use fqgraph::poly::{parse_poly, partial_factor, poly_gcd, poly_sqrt, Monomial};
use fqgraph::{Error, Int, Multigraph, SparsePoly};
use proptest::prelude::*;

fn p(s: &str) -> SparsePoly {
    parse_poly(s).unwrap()
}

#[test]
fn parse_and_render_round_trip() {
    for s in ["x1 + x2 + x3", "x1*x2 - 3*x3^2 + 7", "-x4^3*x1 + 2", "0", "1"] {
        let poly = p(s);
        assert_eq!(p(&poly.to_string()), poly, "{s}");
    }
    assert!(parse_poly("x1 +* x2").is_err());
}

#[test]
fn c3_delta_is_one() {
    // Ψ = x1 + x2 + x3 is linear in x1, x2 with a = 0, b = c = 1.
    let delta = delta_pair(&p("x1 + x2 + x3"), 1, 2).unwrap();
    assert_eq!(delta, SparsePoly::one());
}

#[test]
fn delta_squares_on_small_corpus() {
    for g in connected_simple_graphs(7) {
        let psi = graph_polynomial(&g).unwrap();
        let ids = g.edge_ids();
        for (i, &e) in ids.iter().enumerate() {
            for &f in &ids[i + 1..] {
                let [a, b, c, d] = bilinear_parts(&psi, e, f).unwrap();
                let delta = delta_pair(&psi, e, f).unwrap();
                assert_eq!(b.mul(&c).sub(&a.mul(&d)), delta.square(), "edges {e}, {f} of {g}");
            }
        }
    }
}

#[test]
fn delta_pair_rejects_non_squares() {
    // b·c − a·d = x3·x4 − 0 is not a square
    let err = delta_pair(&p("x1*x3 + x2*x4"), 1, 2).unwrap_err();
    assert!(matches!(err, Error::NotSquare(_)));
    assert!(delta_pair(&p("x1^2 + x2"), 1, 2).is_err());
}

#[test]
fn vertex_decomposition_reassembles_psi() {
    for (name, g) in named_families() {
        let probe = g.structural_probe();
        let Some(&(_, edges)) = probe.three_valent_vertices.first() else {
            continue;
        };
        if !probe.is_simple || !probe.vertex_connectivity_ge_2 {
            continue;
        }
        let dec = vertex_face_decomposition(&g, edges).unwrap();
        assert_eq!(dec.reconstruct(), graph_polynomial(&g).unwrap(), "{name}");
    }
}

#[test]
fn triangle_decomposition_on_k4_and_wheels() {
    for g in [Multigraph::complete(4), Multigraph::wheel(4), Multigraph::wheel(5)] {
        let probe = g.structural_probe();
        let &(_, edges) = probe.triangles_at_3valent.first().unwrap();
        let dec = triangle_decomposition(&g, edges).unwrap();
        assert_eq!(dec.edges, edges);
        assert!(!dec.psi_del2_con3.is_zero());
    }
    let c4 = Multigraph::cycle(4);
    assert!(triangle_decomposition(&c4, [1, 2, 3, 4]).is_err());
}

#[test]
fn quartic_shape() {
    let f = quartic_f();
    assert_eq!(f.len(), 12);
    assert!(f.is_homogeneous());
    assert_eq!(f.degree(), 4);
    assert!(f.terms().iter().all(|(_, c)| c.is_one()));
}

#[test]
fn factoring_splits_products() {
    let a = p("x1 + x2");
    let b = p("x1*x3 - x2*x4 + 1");
    let product = a.mul(&a).mul(&b).scale(&Int::from(6));
    let fact = partial_factor(&product);
    assert_eq!(fact.expand(), product);
    assert_eq!(fact.content, Int::from(6));
    let mut radical = fact.radical();
    radical.sort_by(|x, y| x.canonical_cmp(y));
    let mut expected = vec![a, b];
    expected.sort_by(|x, y| x.canonical_cmp(y));
    assert_eq!(radical, expected);
}

#[test]
fn gcd_of_shared_factor() {
    let c = p("x1*x2 + x3");
    let a = c.mul(&p("x1 + 1"));
    let b = c.mul(&p("x2 - x3"));
    let g = poly_gcd(&a, &b);
    assert_eq!(g.normalize_sign(), c);
}

#[test]
fn square_roots() {
    assert_eq!(
        poly_sqrt(&p("x1^2 + 2*x1*x2 + x2^2")).map(|r| r.normalize_sign()),
        Some(p("x1 + x2"))
    );
    assert_eq!(poly_sqrt(&p("x1^2 + x2^2")), None);
    assert_eq!(poly_sqrt(&p("4")), Some(p("2")));
    assert_eq!(poly_sqrt(&p("-4")), None);
    assert_eq!(poly_sqrt(&SparsePoly::zero()), Some(SparsePoly::zero()));
}

fn small_poly() -> impl Strategy<Value = SparsePoly> {
    prop::collection::vec(((0u16..3, 0u16..3, 0u16..2), -5i64..=5), 1..5).prop_map(|terms| {
        let terms = terms
            .into_iter()
            .map(|((a, b, c), k)| (Monomial::from_pairs(vec![(1, a), (2, b), (3, c)]), Int::from(k)))
            .collect();
        SparsePoly::from_terms(terms)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sqrt_of_square(a in small_poly()) {
        let root = poly_sqrt(&a.square()).unwrap();
        prop_assert!(root == a || root == a.neg());
    }

    #[test]
    fn factor_expands_back(a in small_poly(), b in small_poly()) {
        let product = a.mul(&b);
        prop_assert_eq!(partial_factor(&product).expand(), product);
    }

    #[test]
    fn gcd_divides_both(a in small_poly(), b in small_poly(), c in small_poly()) {
        prop_assume!(!c.is_zero());
        let (x, y) = (a.mul(&c), b.mul(&c));
        prop_assume!(!x.is_zero() && !y.is_zero());
        let g = poly_gcd(&x, &y);
        prop_assert!(x.div_exact(&g).is_some());
        prop_assert!(y.div_exact(&g).is_some());
        prop_assert!(g.div_exact(&c.primitive_part()).is_some() || c.is_constant());
    }

    #[test]
    fn ring_laws(a in small_poly(), b in small_poly(), c in small_poly()) {
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.sub(&a), SparsePoly::zero());
        if !a.is_zero() {
            prop_assert_eq!(a.mul(&b).div_exact(&a), Some(b.clone()));
        }
    }

    #[test]
    fn render_parse_round_trip(a in small_poly()) {
        prop_assert_eq!(parse_poly(&a.to_string()).unwrap(), a);
    }
}
