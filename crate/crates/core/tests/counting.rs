use fqgraph::count::{
    affine_projective_swap, c2_invariant, count_projective_complement, k_vanishes, merge, result4_scan, run_count,
    Ambient, CountOptions, PolySystem, Shard,
};
use fqgraph::graph::corpus::connected_simple_graphs;
use fqgraph::poly::graph_poly::{dual_polynomial, graph_polynomial, quartic_f};
use fqgraph::poly::parse_poly;
use fqgraph::reduction::count_multilinear;
use fqgraph::{Error, FieldSpec, Int, Multigraph, SparsePoly, Var};
use proptest::prelude::*;

/// Complement count over a prime field by visiting every vector.
fn naive_complement(system: &PolySystem, p: u64) -> u64 {
    let n = system.vars();
    let mut point = vec![0i64; n];
    let mut nonzero_somewhere = 0u64;
    for mut index in 0..p.pow(n as u32) {
        for slot in point.iter_mut() {
            *slot = (index % p) as i64;
            index /= p;
        }
        if system.ambient == Ambient::Projective && point.iter().all(|&x| x == 0) {
            continue;
        }
        let value = |v: Var| {
            let i = system.variables.iter().position(|&w| w == v).unwrap();
            Int::from(point[i])
        };
        let any = system
            .polynomials
            .iter()
            .any(|f| f.eval_int(value).rem_euclid_u64(p) != 0);
        nonzero_somewhere += any as u64;
    }
    match system.ambient {
        Ambient::Projective => nonzero_somewhere / (p - 1),
        Ambient::Affine => nonzero_somewhere,
    }
}

fn psi_system(g: &Multigraph) -> PolySystem {
    PolySystem::projective(vec![graph_polynomial(g).unwrap()], g.edge_ids()).unwrap()
}

fn field(q: u64) -> FieldSpec {
    FieldSpec::of_order(q).unwrap()
}

#[test]
fn triangle_complement_is_q_squared() {
    let c3 = Multigraph::cycle(3);
    let dual = PolySystem::projective(vec![dual_polynomial(&c3).unwrap()], c3.edge_ids()).unwrap();
    for q in [2u64, 3, 4, 5, 7, 8, 9, 16] {
        let f = field(q);
        let expected = Int::from(q * q);
        assert_eq!(count_projective_complement(&psi_system(&c3), &f).unwrap(), expected);
        assert_eq!(count_projective_complement(&dual, &f).unwrap(), expected);
    }
}

#[test]
fn enumeration_matches_naive_oracle() {
    for g in connected_simple_graphs(6) {
        let sys = psi_system(&g);
        for p in [2u64, 3, 5] {
            let got = count_projective_complement(&sys, &field(p)).unwrap();
            assert_eq!(got, Int::from(naive_complement(&sys, p)), "{g} at {p}");
        }
    }
}

#[test]
fn multi_polynomial_and_affine_systems() {
    let f = parse_poly("x1*x2 + x3^2").unwrap();
    let g = parse_poly("x1 + x2 + x3").unwrap();
    let proj = PolySystem::projective(vec![f.clone(), g.clone()], vec![1, 2, 3]).unwrap();
    let aff = PolySystem::affine(vec![f.add(&SparsePoly::one()), g], vec![1, 2, 3]).unwrap();
    for p in [2u64, 3, 5, 7] {
        let fp = field(p);
        let record = run_count(&proj, &fp, CountOptions::default()).unwrap();
        assert_eq!(record.nbar.unwrap(), Int::from(naive_complement(&proj, p)));
        let record = run_count(&aff, &fp, CountOptions::default()).unwrap();
        assert_eq!(record.nbar.unwrap(), Int::from(naive_complement(&aff, p)));
    }
}

#[test]
fn free_variables_scale_the_count() {
    let sys = PolySystem::projective(vec![parse_poly("x1 + x2").unwrap()], vec![1, 2, 3, 4]).unwrap();
    for p in [2u64, 3, 5] {
        let record = run_count(&sys, &field(p), CountOptions::default()).unwrap();
        assert_eq!(record.free_variables, 2);
        assert_eq!(record.nbar.unwrap(), Int::from(naive_complement(&sys, p)));
    }
}

#[test]
fn shards_merge_to_the_whole_run() {
    let sys = psi_system(&Multigraph::complete(4));
    for q in [3u64, 4, 5] {
        let f = field(q);
        let whole = run_count(&sys, &f, CountOptions::default()).unwrap();
        for total in [2u64, 5, 7] {
            let parts: Vec<_> = (0..total)
                .map(|index| {
                    let options = CountOptions {
                        shard: Shard { index, total },
                        ..CountOptions::default()
                    };
                    run_count(&sys, &f, options).unwrap()
                })
                .collect();
            assert!(parts.iter().all(|r| r.nbar.is_none()));
            let merged = merge(&parts).unwrap();
            assert_eq!(merged.nbar, whole.nbar, "q = {q}, {total} shards");
            let err = merge(&parts[1..]).unwrap_err();
            assert!(matches!(err, Error::InvalidInput(_)));
        }
    }
}

#[test]
fn merge_rejects_foreign_shards() {
    let f = field(3);
    let shard = |g: &Multigraph, index| {
        let options = CountOptions {
            shard: Shard { index, total: 2 },
            ..CountOptions::default()
        };
        run_count(&psi_system(g), &f, options).unwrap()
    };
    let a = shard(&Multigraph::complete(4), 0);
    let b = shard(&Multigraph::wheel(4), 1);
    assert!(matches!(merge(&[a.clone(), b]), Err(Error::Consistency(_))));
    assert!(matches!(merge(&[a.clone(), a]), Err(Error::Consistency(_))));
}

#[test]
fn budget_refusal() {
    let sys = psi_system(&Multigraph::complete(5));
    let options = CountOptions {
        budget: 1000,
        shard: Shard::WHOLE,
    };
    let err = run_count(&sys, &field(3), options).unwrap_err();
    assert_eq!(err.exit_code(), 3);
    match err {
        Error::Budget { shards, .. } => assert!(shards > 1),
        other => panic!("unexpected {other}"),
    }
}

#[test]
fn affine_projective_swap_splits_the_count() {
    let sys = psi_system(&Multigraph::complete(4));
    for q in [2u64, 3, 4] {
        let f = field(q);
        let (boundary, chart) = affine_projective_swap(&sys, 1).unwrap();
        let whole = count_projective_complement(&sys, &f).unwrap();
        let b = count_projective_complement(&boundary, &f).unwrap();
        let c = run_count(&chart, &f, CountOptions::default()).unwrap().nbar.unwrap();
        assert_eq!(whole, &b + &c, "q = {q}");
    }
}

#[test]
fn complement_divisible_by_q_squared() {
    for g in connected_simple_graphs(7) {
        let probe = g.structural_probe();
        if !probe.is_simple || !probe.vertex_connectivity_ge_2 || g.cycle_rank() == 0 {
            continue;
        }
        for q in [2u64, 3, 4, 5] {
            let n = count_projective_complement(&psi_system(&g), &field(q)).unwrap();
            assert!(n.rem_euclid_u64(q * q) == 0, "{g} at {q}: {n}");
        }
    }
}

#[test]
fn multilinear_reduction_agrees_with_enumeration() {
    let graphs: Vec<Multigraph> = connected_simple_graphs(7)
        .into_iter()
        .filter(|g| g.edge_count() >= 3)
        .collect();
    let mut cases = 0;
    for g in graphs.iter().take(110) {
        let sys = psi_system(g);
        let e = g.edge_ids()[0];
        let minors = PolySystem::projective_in_support(vec![
            fqgraph::poly::graph_poly::minor_polynomial(g, &[e], &[]).unwrap(),
            fqgraph::poly::graph_poly::minor_polynomial(g, &[], &[e]).unwrap(),
        ]);
        for q in [2u64, 3] {
            let f = field(q);
            let brute = count_projective_complement(&sys, &f).unwrap();
            assert_eq!(count_multilinear(&sys, &f).unwrap(), brute, "{g} at {q}");
            cases += 1;
            if let Ok(m) = &minors {
                if m.vars() > 0 {
                    let brute = count_projective_complement(m, &f).unwrap();
                    assert_eq!(count_multilinear(m, &f).unwrap(), brute, "minors of {g} at {q}");
                    cases += 1;
                }
            }
        }
    }
    assert!(cases >= 200, "only {cases} cases");
}

#[test]
fn wheel_c2_is_minus_one() {
    for g in [Multigraph::complete(4), Multigraph::wheel(4)] {
        for q in [2u64, 3, 5, 7] {
            let report = c2_invariant(&g, &field(q), CountOptions::default()).unwrap();
            assert_eq!(report.c2, q - 1, "{g} at {q}");
            assert_eq!(report.full_count, report.vertex_route);
        }
    }
}

#[test]
fn quartic_count_vanishes_mod_three() {
    let sys = PolySystem::projective(vec![quartic_f()], vec![1, 2, 3, 4]).unwrap();
    let n = count_projective_complement(&sys, &field(3)).unwrap();
    assert_eq!(n, Int::from(naive_complement(&sys, 3)));
    assert_eq!(n.rem_euclid_u64(3), 0);
}

#[test]
fn quartic_scan_up_to_97() {
    let scan = result4_scan(97).unwrap();
    assert!(scan.falsifications.is_empty());
    assert_eq!(scan.rows.first().map(|r| r.p), Some(3));
    for row in &scan.rows {
        assert_eq!(row.k == Some(0), k_vanishes(row.p), "p = {}", row.p);
    }
    assert!(k_vanishes(7) && k_vanishes(3) && !k_vanishes(11));
}

fn random_system() -> impl Strategy<Value = (Vec<SparsePoly>, u64)> {
    let term = (0u16..2, 0u16..2, 0u16..2, 0u16..2, -2i64..=2);
    let poly = prop::collection::vec(term, 1..5).prop_map(|terms| {
        let terms = terms
            .into_iter()
            .map(|(a, b, c, d, k)| {
                let m = fqgraph::Monomial::from_pairs(vec![(1, a), (2, b), (3, c), (4, d)]);
                (m, Int::from(k))
            })
            .collect();
        SparsePoly::from_terms(terms)
    });
    (
        prop::collection::vec(poly, 1..3),
        prop::sample::select(vec![2u64, 3, 5]),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn affine_counts_match_oracle((polys, p) in random_system()) {
        let sys = PolySystem::affine(polys, vec![1, 2, 3, 4]).unwrap();
        let record = run_count(&sys, &field(p), CountOptions::default()).unwrap();
        prop_assert_eq!(record.nbar.unwrap(), Int::from(naive_complement(&sys, p)));
    }

    #[test]
    fn multilinear_affine_reduction((polys, p) in random_system()) {
        let sys = PolySystem::affine(polys, vec![1, 2, 3, 4]).unwrap();
        let brute = run_count(&sys, &field(p), CountOptions::default()).unwrap().nbar.unwrap();
        prop_assert_eq!(count_multilinear(&sys, &field(p)).unwrap(), brute);
    }
}
