use fqgraph::count::Shard;
use fqgraph::fqft::{
    amplitude, amplitude_by_enumeration, amplitude_by_power_sums, amplitude_with, amplitudes_by_dimension,
    merge_amplitudes, route_momenta, route_momenta_with_order, superficial_degree, vanishing_lhs, vanishing_predicate,
    vanishing_scan, vanishing_scan_with, AmplitudeMethod, AmplitudeOptions, Signature, TheoryConfig,
};
use fqgraph::{Error, FieldSpec, Multigraph};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn field(q: u64) -> FieldSpec {
    FieldSpec::of_order(q).unwrap()
}

fn theta() -> Multigraph {
    Multigraph::banana(3)
}

#[test]
fn superficial_degrees() {
    let bubble = Multigraph::banana(2);
    assert_eq!(superficial_degree(&bubble, 4), 0);
    assert_eq!(superficial_degree(&bubble, 1), -3);
    assert_eq!(superficial_degree(&Multigraph::complete(4), 4), 0);
}

#[test]
fn bubble_and_theta_routings() {
    let bubble = route_momenta(&Multigraph::banana(2)).unwrap();
    assert_eq!(bubble.loops, 1);
    assert!(bubble.coefficients.iter().all(|(_, c)| c[0].abs() == 1));
    assert!(bubble.is_consistent(&Multigraph::banana(2)));

    let g = theta();
    let routing = route_momenta(&g).unwrap();
    assert_eq!(routing.loops, 2);
    assert!(routing.is_consistent(&g));
    let mut shapes: Vec<Vec<i8>> = routing
        .coefficients
        .iter()
        .map(|(_, c)| c.iter().map(|x| x.abs()).collect())
        .collect();
    shapes.sort();
    assert_eq!(shapes, vec![vec![0, 1], vec![1, 0], vec![1, 1]]);
}

#[test]
fn trees_and_disconnected_graphs() {
    let path = Multigraph::new(3, &[(0, 1), (1, 2)]).unwrap();
    let routing = route_momenta(&path).unwrap();
    assert_eq!(routing.loops, 0);
    assert!(routing.coefficients.iter().all(|(_, c)| c.is_empty()));
    let a = amplitude(&path, &TheoryConfig::euclidean(4, 1).unwrap(), &field(5)).unwrap();
    assert_eq!(a.value, 1);
    assert!(a.tree_convention);
    assert_eq!(a.method, AmplitudeMethod::Tree);
    let split = Multigraph::new(4, &[(0, 1), (2, 3)]).unwrap();
    assert!(matches!(route_momenta(&split), Err(Error::Disconnected)));
}

#[test]
fn inconsistent_routing_is_detected() {
    let g = theta();
    let mut routing = route_momenta(&g).unwrap();
    routing.coefficients[0].1[0] *= -1;
    assert!(!routing.is_consistent(&g));
}

#[test]
fn bubble_over_f5() {
    let a = amplitude(
        &Multigraph::banana(2),
        &TheoryConfig::euclidean(1, 1).unwrap(),
        &field(5),
    )
    .unwrap();
    assert_eq!(a.value, 4);
    assert_eq!(a.power_form, Some(4));
    assert_eq!(a.excluded, 2);
    assert_eq!(a.points, 5);
}

#[test]
fn convolution_matches_enumeration() {
    let graphs = [
        Multigraph::banana(2),
        theta(),
        Multigraph::cycle(3),
        Multigraph::complete(4),
    ];
    for g in &graphs {
        let routing = route_momenta(g).unwrap();
        for q in [2u64, 3, 4, 5] {
            for d in 1..=3usize {
                if (q as u128).pow((d * routing.loops) as u32) > 200_000 {
                    continue;
                }
                for signature in [Signature::Euclidean, Signature::Minkowski] {
                    let theory = TheoryConfig::new(d, (q - 1) as u32, signature).unwrap();
                    let fast = amplitude(g, &theory, &field(q)).unwrap();
                    let slow = amplitude_by_enumeration(&theory, &field(q), &routing, Shard::WHOLE).unwrap();
                    assert_eq!(fast.value, slow.value, "{g} d = {d} q = {q} {signature:?}");
                    assert_eq!(fast.power_form, slow.power_form);
                    assert_eq!(fast.excluded, slow.excluded);
                }
            }
        }
    }
}

#[test]
fn inverse_and_power_forms_agree() {
    for g in [Multigraph::banana(2), theta(), Multigraph::complete(4)] {
        for q in [3u64, 5, 7, 9] {
            for d in (1..=3).filter(|&d| (q as u128).pow((d * g.cycle_rank()) as u32) <= 1 << 24) {
                let a = amplitude(&g, &TheoryConfig::euclidean(d, 1).unwrap(), &field(q)).unwrap();
                assert_eq!(a.power_form, Some(a.value), "{g} d = {d} q = {q}");
            }
        }
    }
    let a = amplitude(
        &Multigraph::banana(2),
        &TheoryConfig::euclidean(1, 1).unwrap(),
        &field(2),
    )
    .unwrap();
    assert_eq!(a.power_form, None);
}

#[test]
fn power_sums_expand_the_power_form() {
    let cases = [
        (Multigraph::banana(2), 1usize, 3u64),
        (Multigraph::banana(2), 2, 5),
        (theta(), 1, 3),
        (Multigraph::cycle(3), 2, 3),
    ];
    for (g, d, q) in cases {
        let theory = TheoryConfig::euclidean(d, 1).unwrap();
        let direct = amplitude(&g, &theory, &field(q)).unwrap();
        assert_eq!(
            amplitude_by_power_sums(&g, &theory, &field(q)).unwrap(),
            direct.value,
            "{g} d = {d} q = {q}"
        );
    }
    assert!(amplitude_by_power_sums(
        &Multigraph::banana(2),
        &TheoryConfig::euclidean(1, 1).unwrap(),
        &field(2)
    )
    .is_err());
}

#[test]
fn amplitude_does_not_depend_on_the_spanning_tree() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for g in [theta(), Multigraph::complete(4), Multigraph::wheel(4)] {
        let theory = TheoryConfig::euclidean(2, 2).unwrap();
        let f = field(3);
        let reference = amplitude(&g, &theory, &f).unwrap().value;
        for _ in 0..3 {
            let mut order = g.edge_ids();
            order.shuffle(&mut rng);
            let routing = route_momenta_with_order(&g, &order).unwrap();
            assert!(routing.is_consistent(&g));
            let a = amplitude_with(&g, &theory, &f, &routing, AmplitudeOptions::default()).unwrap();
            assert_eq!(a.value, reference, "{g} along {order:?}");
        }
    }
}

#[test]
fn sharded_enumeration_merges() {
    let g = theta();
    let theory = TheoryConfig::euclidean(2, 1).unwrap();
    let f = field(5);
    let routing = route_momenta(&g).unwrap();
    let whole = amplitude_by_enumeration(&theory, &f, &routing, Shard::WHOLE).unwrap();
    let parts: Vec<_> = (0..3)
        .map(|index| amplitude_by_enumeration(&theory, &f, &routing, Shard { index, total: 3 }).unwrap())
        .collect();
    let merged = merge_amplitudes(&parts, &f).unwrap();
    assert_eq!(merged.value, whole.value);
    assert_eq!(merged.excluded, whole.excluded);
    assert_eq!(merged.points, whole.points);
}

#[test]
fn budget_and_invalid_theories() {
    let g = Multigraph::complete(5);
    let theory = TheoryConfig::euclidean(4, 1).unwrap();
    let options = AmplitudeOptions {
        budget: 1000,
        shard: Shard { index: 0, total: 2 },
    };
    let routing = route_momenta(&g).unwrap();
    let err = amplitude_with(&g, &theory, &field(3), &routing, options).unwrap_err();
    assert_eq!(err.exit_code(), 3);
    assert!(TheoryConfig::with_metric(1, vec![]).is_err());
    assert!(TheoryConfig::with_metric(1, vec![1, 2]).is_err());
    let heavy = TheoryConfig::euclidean(1, 7).unwrap();
    assert!(amplitude(&Multigraph::banana(2), &heavy, &field(5)).is_err());
}

#[test]
fn predicate_examples() {
    let bubble = Multigraph::banana(2);
    assert_eq!(vanishing_lhs(&bubble, 1, 3), -2);
    assert_eq!(vanishing_predicate(&bubble, 1, 3), Some(false));
    assert_eq!(vanishing_predicate(&bubble, 1, 5), Some(false));
    assert_eq!(vanishing_predicate(&bubble, 4, 3), Some(true));
    assert_eq!(vanishing_predicate(&bubble, 4, 2), None);
    let path = Multigraph::new(2, &[(0, 1)]).unwrap();
    assert_eq!(vanishing_predicate(&path, 4, 3), None);
    // c = −1 with n = 2
    let theta_d = Multigraph::new(2, &[(0, 1), (0, 1), (0, 1), (0, 1)]).unwrap();
    assert_eq!(superficial_degree(&theta_d, 3), 1);
}

#[test]
fn predicted_zeros_are_measured_as_zero() {
    for (name, g) in [("bubble", Multigraph::banana(2)), ("theta", theta())] {
        let scan = vanishing_scan(&g, name, 1..=4, &[3, 5, 7], 1).unwrap();
        assert_eq!(scan.cells.len(), 12);
        assert!(scan.all_consistent(), "{name}\n{scan}");
        let zeros = scan.cells.iter().filter(|c| c.predicate == Some(true)).count();
        assert!(zeros > 0, "{name}");
        for cell in scan.cells.iter().filter(|c| c.predicate == Some(true)) {
            assert_eq!(cell.amplitude.value, 0);
        }
    }
}

#[test]
fn scan_marks_characteristic_two() {
    let scan = vanishing_scan(&Multigraph::banana(2), "bubble", 1..=2, &[2, 3], 1).unwrap();
    let table = scan.table();
    assert!(table.starts_with("graph\td\tq\tc\t(q-1)c+2n\tpredicate\tvalue\n"));
    for cell in scan.cells.iter().filter(|c| c.q == 2) {
        assert_eq!(cell.predicate, None);
    }
    assert!(table.contains("unavailable"));
}

#[test]
fn dimensions_share_one_distribution() {
    let g = Multigraph::complete(4);
    let f = field(5);
    let metric = [1i8, -1, -1];
    let all = amplitudes_by_dimension(&g, 3, &metric, &f).unwrap();
    for d in 1..=3 {
        let theory = TheoryConfig::with_metric(3, metric[..d].to_vec()).unwrap();
        let single = amplitude(&g, &theory, &f).unwrap();
        assert_eq!(
            (all[d - 1].value, all[d - 1].power_form),
            (single.value, single.power_form),
            "d = {d}"
        );
        assert_eq!(
            (all[d - 1].excluded, all[d - 1].points),
            (single.excluded, single.points),
            "d = {d}"
        );
    }
}

#[test]
fn scans_follow_the_chosen_signature() {
    let g = theta();
    let euclidean = vanishing_scan(&g, "theta", 1..=3, &[3, 5], 2).unwrap();
    let same = vanishing_scan_with(&g, "theta", 1..=3, &[3, 5], 2, Signature::Euclidean).unwrap();
    assert_eq!(euclidean, same);
    let minkowski = vanishing_scan_with(&g, "theta", 1..=3, &[3, 5], 2, Signature::Minkowski).unwrap();
    assert_eq!(minkowski.signature, Signature::Minkowski);
    for cell in &minkowski.cells {
        let theory = TheoryConfig::new(cell.d, 2, Signature::Minkowski).unwrap();
        let direct = amplitude(&g, &theory, &field(cell.q)).unwrap();
        assert_eq!(cell.amplitude.value, direct.value, "d = {} q = {}", cell.d, cell.q);
        assert!(cell.consistent);
    }
}
