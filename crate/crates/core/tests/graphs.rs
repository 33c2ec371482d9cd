use fqgraph::graph::corpus::{circulant_minus_vertex, connected_simple_graphs, named_families};
use fqgraph::graph::MinorSpec;
use fqgraph::poly::graph_poly::{cremona, dual_polynomial, graph_polynomial, minor_polynomial};
use fqgraph::poly::parse_poly;
use fqgraph::{Error, Multigraph, SparsePoly, Var};
use proptest::prelude::*;

fn vars(g: &Multigraph) -> Vec<Var> {
    g.edge_ids()
}

#[test]
fn triangle_polynomials() {
    let c3 = Multigraph::cycle(3);
    assert_eq!(graph_polynomial(&c3).unwrap(), parse_poly("x1 + x2 + x3").unwrap());
    assert_eq!(
        dual_polynomial(&c3).unwrap(),
        parse_poly("x1*x2 + x1*x3 + x2*x3").unwrap()
    );
    assert_eq!(graph_polynomial(&c3).unwrap().to_string(), "x1 + x2 + x3");
}

#[test]
fn bubble_and_banana() {
    assert_eq!(
        graph_polynomial(&Multigraph::banana(2)).unwrap(),
        parse_poly("x1 + x2").unwrap()
    );
    assert_eq!(
        graph_polynomial(&Multigraph::banana(3)).unwrap(),
        parse_poly("x1*x2 + x1*x3 + x2*x3").unwrap()
    );
}

#[test]
fn loop_edge_is_a_factor() {
    let g = Multigraph::new(2, &[(0, 1), (1, 1)]).unwrap();
    assert_eq!(graph_polynomial(&g).unwrap(), parse_poly("x2").unwrap());
}

#[test]
fn connected_graph_counts_by_edges() {
    // connected simple graphs with m edges, m = 1..8
    let expected = [1, 1, 3, 5, 12, 30, 79, 227];
    let corpus = connected_simple_graphs(8);
    for (m, &count) in expected.iter().enumerate() {
        let found = corpus.iter().filter(|g| g.edge_count() == m + 1).count();
        assert_eq!(found, count, "graphs with {} edges", m + 1);
    }
}

#[test]
fn cremona_relates_dual_and_graph_polynomial() {
    for g in connected_simple_graphs(6) {
        let psi = graph_polynomial(&g).unwrap();
        let dual = dual_polynomial(&g).unwrap();
        assert_eq!(cremona(&psi, &vars(&g)).unwrap(), dual, "{g}");
        assert_eq!(cremona(&dual, &vars(&g)).unwrap(), psi, "{g}");
    }
}

#[test]
fn cremona_rejects_squares() {
    assert!(cremona(&parse_poly("x1^2").unwrap(), &[1]).is_err());
}

#[test]
fn deletion_contraction() {
    for g in connected_simple_graphs(7) {
        let psi = graph_polynomial(&g).unwrap();
        // deleting a pendant edge leaves an isolated vertex, which Ψ ignores
        let inner = g.edges().iter().filter(|e| g.degree(e.a) > 1 && g.degree(e.b) > 1);
        for e in inner.map(|e| e.id) {
            let deleted = minor_polynomial(&g, &[e], &[]).unwrap();
            let contracted = minor_polynomial(&g, &[], &[e]).unwrap();
            let rebuilt = SparsePoly::var(e).mul(&deleted).add(&contracted);
            assert_eq!(rebuilt, psi, "edge {e} of {g}");
        }
    }
}

#[test]
fn term_count_matches_matrix_tree_theorem() {
    for g in connected_simple_graphs(8).iter().filter(|g| g.edge_count() >= 6) {
        let psi = graph_polynomial(g).unwrap();
        assert_eq!(num_bigint::BigInt::from(psi.len()), g.matrix_tree_count(), "{g}");
        assert!(psi.terms().iter().all(|(_, c)| c.is_one()));
    }
}

#[test]
fn degrees_follow_loops_and_vertices() {
    for (name, g) in named_families() {
        let psi = graph_polynomial(&g).unwrap();
        let dual = dual_polynomial(&g).unwrap();
        assert!(psi.is_homogeneous() && psi.is_multilinear(), "{name}");
        assert_eq!(psi.degree() as usize, g.cycle_rank(), "{name}");
        assert_eq!(dual.degree(), g.vertex_count() - 1, "{name}");
    }
}

#[test]
fn disconnected_graph_is_rejected() {
    let g = Multigraph::new(4, &[(0, 1), (2, 3)]).unwrap();
    assert!(matches!(graph_polynomial(&g), Err(Error::Disconnected)));
    assert!(matches!(dual_polynomial(&g), Err(Error::Disconnected)));
}

#[test]
fn disconnected_minor_has_zero_polynomial() {
    let path = Multigraph::new(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
    assert!(minor_polynomial(&path, &[2], &[]).unwrap().is_zero());
    assert_eq!(minor_polynomial(&path, &[1], &[]).unwrap(), SparsePoly::one());
}

#[test]
fn minor_errors() {
    let g = Multigraph::new(2, &[(0, 1), (1, 1)]).unwrap();
    assert!(matches!(g.contract(&[2]), Err(Error::LoopContraction(2))));
    assert!(matches!(g.delete(&[9]), Err(Error::UnknownEdge(9))));
    let spec = MinorSpec::new(&[1], &[1]);
    assert!(matches!(g.minor(&spec), Err(Error::OverlappingMinor(1))));
}

#[test]
fn edge_ids_survive_minors() {
    let k4 = Multigraph::complete(4);
    let m = k4.minor(&MinorSpec::new(&[1], &[6])).unwrap();
    let ids = m.edge_ids();
    assert_eq!(ids, vec![2, 3, 4, 5]);
}

#[test]
fn parse_formats() {
    let text = "# triangle\nv 3\n0 1\n1 2\n2 0\n";
    let g = Multigraph::parse(text).unwrap();
    assert_eq!(g.edge_count(), 3);
    let again = Multigraph::parse(&g.to_json()).unwrap();
    assert_eq!(again, g);
    assert!(matches!(Multigraph::parse("v x"), Err(Error::GraphParse(_))));
    assert!(matches!(Multigraph::parse("v 2\n0 1 2"), Err(Error::GraphParse(_))));
}

#[test]
fn structural_probe_on_k4() {
    let probe = Multigraph::complete(4).structural_probe();
    assert!(probe.is_simple && probe.vertex_connectivity_ge_2);
    assert_eq!(probe.three_valent_vertices.len(), 4);
    assert!(!probe.triangles_at_3valent.is_empty());
}

#[test]
fn circulant_minus_vertex_shape() {
    for k in 6..=9 {
        let g = circulant_minus_vertex(k);
        assert_eq!(2 * g.cycle_rank(), g.edge_count(), "C_{k}(1,2) minus a vertex");
        assert_eq!(g.structural_probe().three_valent_vertices.len(), 4);
    }
}

fn arbitrary_graph() -> impl Strategy<Value = Multigraph> {
    (2u32..6).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..n), 1..9).prop_map(move |edges| Multigraph::new(n, &edges).unwrap())
    })
}

proptest! {
    #[test]
    fn relabelling_vertices_keeps_psi(g in arbitrary_graph(), shift in 0u32..5) {
        prop_assume!(g.is_connected_ignoring_isolated());
        let n = g.vertex_count();
        let edges: Vec<(u32, u32)> = g.edges().iter().map(|e| ((e.a + shift) % n, (e.b + shift) % n)).collect();
        let h = Multigraph::new(n, &edges).unwrap();
        prop_assert_eq!(graph_polynomial(&g).unwrap(), graph_polynomial(&h).unwrap());
    }

    #[test]
    fn psi_is_homogeneous_of_degree_h1(g in arbitrary_graph()) {
        prop_assume!(g.is_connected_ignoring_isolated());
        let psi = graph_polynomial(&g).unwrap();
        prop_assert!(psi.is_homogeneous());
        prop_assert!(psi.terms().iter().all(|(m, _)| m.degree() as usize == g.cycle_rank()));
    }
}
