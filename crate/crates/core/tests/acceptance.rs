//! The acceptance suite: one test per criterion, each printing a single
//! `criterion N: PASS|FAIL` line with its measurements.

use std::io::Write;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use fqgraph::count::{count_projective_complement, result4_scan, PolySystem};
use fqgraph::fqft::vanishing_scan;
use fqgraph::gf::{prime_powers_up_to, Conic};
use fqgraph::graph::corpus::{connected_simple_graphs, named_families, standard_random_corpus};
use fqgraph::interp::{crt_reconstruct, zeta_function, CountSamples, InterpOptions, Sample, Verdict};
use fqgraph::poly::graph_poly::{bilinear_parts, cremona, delta_pair, dual_polynomial, graph_polynomial};
use fqgraph::reduction::{run_method1_with, theorem1_entry, EntryMode, Method1Options, ReductionReport};
use fqgraph::{Error, FieldSpec, Int, Multigraph, QPolynomial};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

type Outcome = std::result::Result<String, String>;

fn run(n: u32, limit: Duration, check: impl FnOnce() -> Outcome) {
    let start = Instant::now();
    let outcome = check();
    let elapsed = start.elapsed();
    let outcome = match outcome {
        Ok(detail) if elapsed > limit => Err(format!("{detail}; took {elapsed:.1?}, limit {limit:?}")),
        other => other,
    };
    let line = match &outcome {
        Ok(detail) => format!("criterion {n}: PASS ({detail}; {elapsed:.2?})\n"),
        Err(detail) => format!("criterion {n}: FAIL ({detail}; {elapsed:.2?})\n"),
    };
    // written past the test harness capture so every run shows the verdicts
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(outcome.is_ok(), "{}", line.trim_end());
}

fn field(q: u64) -> FieldSpec {
    FieldSpec::of_order(q).expect("prime power")
}

fn psi_system(g: &Multigraph) -> PolySystem {
    PolySystem::projective(vec![graph_polynomial(g).expect("connected")], g.edge_ids()).expect("system")
}

fn two_connected(g: &Multigraph) -> bool {
    let probe = g.structural_probe();
    probe.is_simple && probe.vertex_connectivity_ge_2
}

fn ensure(ok: bool, message: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(message())
    }
}

#[test]
fn criterion_01_triangle_exactness() {
    run(1, Duration::from_secs(1), || {
        let c3 = Multigraph::cycle(3);
        let psi = psi_system(&c3);
        let dual = PolySystem::projective(vec![dual_polynomial(&c3).unwrap()], c3.edge_ids()).unwrap();
        let qs = [2u64, 3, 4, 5, 7, 8, 9, 16];
        for q in qs {
            let f = field(q);
            for (name, sys) in [("graph", &psi), ("dual", &dual)] {
                let n = count_projective_complement(sys, &f).map_err(|e| e.to_string())?;
                ensure(n == Int::from(q * q), || {
                    format!("{name} polynomial gives {n} at q = {q}")
                })?;
            }
        }
        Ok(format!("both polynomials give q² at {} field sizes", qs.len()))
    });
}

#[test]
fn criterion_02_cremona_identity() {
    run(2, Duration::from_secs(30), || {
        let corpus = connected_simple_graphs(8);
        corpus.par_iter().try_for_each(|g| {
            let psi = graph_polynomial(g).map_err(|e| e.to_string())?;
            let dual = dual_polynomial(g).map_err(|e| e.to_string())?;
            let image = cremona(&psi, &g.edge_ids()).map_err(|e| e.to_string())?;
            ensure(image == dual, || {
                format!("Cremona image of Ψ differs from the dual for {g}")
            })
        })?;
        Ok(format!("{} graphs with at most 8 edges", corpus.len()))
    });
}

#[test]
fn criterion_03_square_property() {
    run(3, Duration::from_secs(300), || {
        let corpus = connected_simple_graphs(10);
        let pairs: usize = corpus
            .par_iter()
            .map(|g| -> std::result::Result<usize, String> {
                let psi = graph_polynomial(g).map_err(|e| e.to_string())?;
                let ids = g.edge_ids();
                let mut pairs = 0;
                for (i, &e) in ids.iter().enumerate() {
                    for &f in &ids[i + 1..] {
                        let [a, b, c, d] = bilinear_parts(&psi, e, f).map_err(|e| e.to_string())?;
                        let delta = delta_pair(&psi, e, f).map_err(|err| format!("edges {e}, {f} of {g}: {err}"))?;
                        let lhs = b.mul(&c).sub(&a.mul(&d));
                        ensure(lhs == delta.square(), || {
                            format!("bc − ad ≠ Δ² for edges {e}, {f} of {g}")
                        })?;
                        pairs += 1;
                    }
                }
                Ok(pairs)
            })
            .try_reduce(|| 0, |a, b| Ok(a + b))?;
        Ok(format!("{} graphs, {pairs} edge pairs", corpus.len()))
    });
}

#[test]
fn criterion_04_congruences() {
    run(4, Duration::from_secs(600), || {
        let corpus = connected_simple_graphs(8);
        let qs: Vec<u64> = prime_powers_up_to(9);
        let checks = corpus
            .par_iter()
            .map(|g| -> std::result::Result<(usize, usize), String> {
                let probe = g.structural_probe();
                let simple_2c = probe.is_simple && probe.vertex_connectivity_ge_2;
                let mod_q2 = simple_2c && g.cycle_rank() > 0;
                let mod_q3 = mod_q2 && !probe.three_valent_vertices.is_empty() && 2 * g.cycle_rank() < g.edge_count();
                if !mod_q2 {
                    return Ok((0, 0));
                }
                let sys = psi_system(g);
                let (mut two, mut three) = (0, 0);
                for &q in &qs {
                    let n = count_projective_complement(&sys, &field(q)).map_err(|e| e.to_string())?;
                    ensure(n.rem_euclid_u64(q * q) == 0, || format!("{g}: N̄ = {n} ≢ 0 mod {q}²"))?;
                    two += 1;
                    if mod_q3 {
                        ensure(n.rem_euclid_u64(q * q * q) == 0, || {
                            format!("{g}: N̄ = {n} ≢ 0 mod {q}³")
                        })?;
                        three += 1;
                    }
                }
                Ok((two, three))
            })
            .try_reduce(|| (0, 0), |a, b| Ok((a.0 + b.0, a.1 + b.1)))?;
        Ok(format!(
            "{} mod q² checks and {} mod q³ checks at q ≤ 9, no violations",
            checks.0, checks.1
        ))
    });
}

/// Method 1 on the random corpus, certified at q ∈ {2, 3, 4, 5}; shared by
/// criteria 5 and 6.
fn corpus_reports() -> &'static Vec<(Multigraph, std::result::Result<ReductionReport, String>)> {
    static REPORTS: OnceLock<Vec<(Multigraph, std::result::Result<ReductionReport, String>)>> = OnceLock::new();
    REPORTS.get_or_init(|| {
        let options = Method1Options {
            certify_at: vec![2, 3, 4, 5],
            ..Method1Options::default()
        };
        standard_random_corpus()
            .into_par_iter()
            .map(|g| {
                let report = run_method1_with(&g, &options).map_err(|e| e.to_string());
                (g, report)
            })
            .collect()
    })
}

fn entry_fixtures() -> Vec<(String, Multigraph)> {
    let mut fixtures = vec![("K4".to_string(), Multigraph::complete(4))];
    for (name, g) in named_families() {
        let probe = g.structural_probe();
        let usable = two_connected(&g)
            && !probe.three_valent_vertices.is_empty()
            && g.cycle_rank() >= 3
            && (7..=10).contains(&g.edge_count());
        if usable && fixtures.len() < 6 {
            fixtures.push((name, g));
        }
    }
    fixtures
}

#[test]
fn criterion_05_oracle_equivalence() {
    run(5, Duration::from_secs(3600), || {
        let reports = corpus_reports();
        let mut certified = 0;
        for (g, report) in reports {
            let report = report.as_ref().map_err(|e| format!("{g}: {e}"))?;
            ensure(report.certified == [2, 3, 4, 5], || {
                format!("{g} certified only at {:?}", report.certified)
            })?;
            certified += 1;
        }
        let fixtures = entry_fixtures();
        ensure(fixtures.len() == 6, || {
            format!("only {} entry fixtures", fixtures.len())
        })?;
        let mut entries = 0;
        for (name, g) in &fixtures {
            let sys = psi_system(g);
            let brute: Vec<Int> = [2u64, 3, 5, 7]
                .iter()
                .map(|&q| count_projective_complement(&sys, &field(q)))
                .collect::<fqgraph::Result<_>>()
                .map_err(|e| e.to_string())?;
            for mode in [EntryMode::Vertex, EntryMode::VertexAlt, EntryMode::Triangle] {
                let expr = match theorem1_entry(g, mode) {
                    Ok(expr) => expr,
                    Err(Error::ConfigurationAbsent(_)) if mode == EntryMode::Triangle => continue,
                    Err(e) => return Err(format!("{name} {mode:?}: {e}")),
                };
                for (&q, expected) in [2u64, 3, 5, 7].iter().zip(&brute) {
                    let value = expr.evaluate(&field(q)).map_err(|e| e.to_string())?;
                    ensure(&value == expected, || {
                        format!("{name} {mode:?} at q = {q}: {value} ≠ {expected}")
                    })?;
                }
                entries += 1;
            }
        }
        let names: Vec<&str> = fixtures.iter().map(|(n, _)| n.as_str()).collect();
        Ok(format!(
            "{certified}/{} reports certified at q = 2,3,4,5; {entries} entry formulas certified on {}",
            reports.len(),
            names.join(", ")
        ))
    });
}

#[test]
fn criterion_06_resolution_rate() {
    run(6, Duration::from_secs(3600), || {
        let reports = corpus_reports();
        let mut resolved = 0;
        let mut shaped = 0;
        for (g, report) in reports {
            let Ok(report) = report else { continue };
            if !report.is_resolved() {
                continue;
            }
            resolved += 1;
            if two_connected(g) {
                let n = g.edge_count();
                let c = |k: usize| report.resolved.coeff(k);
                ensure(c(n - 1) == Int::from(1) && c(n - 2) == Int::ZERO, || {
                    format!("{g}: leading coefficients of {}", report.resolved)
                })?;
                ensure(c(0) == Int::ZERO && c(1) == Int::ZERO, || {
                    format!("{g}: low coefficients of {}", report.resolved)
                })?;
                shaped += 1;
            }
        }
        let rate = resolved as f64 / reports.len() as f64;
        ensure(rate >= 0.95, || format!("only {resolved}/{} resolved", reports.len()))?;
        Ok(format!(
            "{resolved}/{} resolved ({:.1}%), shape checked on {shaped} 2-connected graphs",
            reports.len(),
            100.0 * rate
        ))
    });
}

#[test]
fn criterion_07_quartic_scan() {
    run(7, Duration::from_secs(300), || {
        let scan = result4_scan(199).map_err(|e| e.to_string())?;
        ensure(scan.falsifications.is_empty(), || {
            format!("{} falsifications", scan.falsifications.len())
        })?;
        ensure(scan.rows.iter().all(|r| r.pattern_holds), || "pattern fails".into())?;
        let mut detail = format!(
            "{} odd primes up to 199, no falsifications, max 7k²/p = {:.3} at p = {}",
            scan.rows.len(),
            scan.max_ratio,
            scan.max_ratio_at
        );
        if std::env::var_os("FQGRAPH_EXTENDED_SCAN").is_some() {
            let wide = result4_scan(4999).map_err(|e| e.to_string())?;
            ensure(wide.falsifications.is_empty(), || "extended scan falsified".into())?;
            ensure(wide.max_ratio >= 0.9, || {
                format!("extended max ratio {:.3}", wide.max_ratio)
            })?;
            detail.push_str(&format!(
                "; extended to 4999: max {:.4} at p = {}",
                wide.max_ratio, wide.max_ratio_at
            ));
        } else {
            detail.push_str("; extended scan skipped (set FQGRAPH_EXTENDED_SCAN)");
        }
        Ok(detail)
    });
}

#[test]
fn criterion_08_conics() {
    run(8, Duration::from_secs(10), || {
        let qs = prime_powers_up_to(25);
        for &q in &qs {
            let f = field(q);
            let eisenstein = match q % 3 {
                0 => q,
                1 => q - 1,
                _ => q + 1,
            };
            let gauss = match q % 4 {
                1 => q - 1,
                3 => q + 1,
                _ => q,
            };
            for (conic, expected) in [(Conic::Eisenstein, eisenstein), (Conic::Gauss, gauss)] {
                let n = f.conic_count(conic).map_err(|e| e.to_string())?;
                ensure(n == expected, || format!("{conic:?} at q = {q}: {n} ≠ {expected}"))?;
            }
        }
        Ok(format!("{} prime powers up to 25", qs.len()))
    });
}

#[test]
fn criterion_09_reconstruction_round_trip() {
    run(9, Duration::from_secs(60), || {
        let primes = [2u64, 3, 5, 7, 11];
        let mut rng = ChaCha8Rng::seed_from_u64(0x2010);
        let mut trials = 0;
        while trials < 1000 {
            let degree = rng.gen_range(0..=13usize);
            let mut coeffs: Vec<Int> = (0..=degree).map(|_| Int::from(rng.gen_range(-40i64..=40))).collect();
            if coeffs[degree].is_zero() {
                coeffs[degree] = Int::from(1);
            }
            let poly = QPolynomial::from_coeffs(coeffs);
            let values: Vec<Int> = primes.iter().map(|&p| poly.eval_u64(p)).collect();
            // counts are non-negative
            if values.iter().any(Int::is_negative) {
                continue;
            }
            let samples = primes.iter().zip(values).map(|(&p, v)| Sample::new(p, v)).collect();
            let samples = CountSamples::new(samples).map_err(|e| e.to_string())?;
            let rec = crt_reconstruct(&samples, &InterpOptions::with_degree(degree)).map_err(|e| e.to_string())?;
            ensure(rec.unique() == Some(&poly), || {
                format!("{poly} recovered as {:?}", rec.verdict)
            })?;
            trials += 1;
        }
        let chi = CountSamples::from_pairs([(2, 3), (3, 3), (5, 6), (7, 6)]).map_err(|e| e.to_string())?;
        let rec = crt_reconstruct(&chi, &InterpOptions::with_degree(1)).map_err(|e| e.to_string())?;
        ensure(rec.verdict == Verdict::NotPolynomial, || {
            format!("character pattern gave {}", rec.verdict)
        })?;
        Ok(format!("{trials}/1000 recovered, character pattern rejected"))
    });
}

#[test]
fn criterion_10_zeta_consistency() {
    run(10, Duration::from_secs(60), || {
        let c3 = Multigraph::cycle(3);
        let sys = psi_system(&c3);
        let z = zeta_function(&QPolynomial::q_pow(2)).map_err(|e| e.to_string())?;
        let counts = z.point_counts(2, 3);
        for (i, n) in counts.iter().enumerate() {
            let qk = 2u64.pow(i as u32 + 1);
            let complement = count_projective_complement(&sys, &field(qk)).map_err(|e| e.to_string())?;
            let direct = Int::from(qk * qk + qk + 1) - complement;
            ensure(*n == direct, || {
                format!("over F_{qk}: zeta gives {n}, direct count {direct}")
            })?;
            ensure(*n == Int::from(qk + 1), || format!("over F_{qk}: {n} points on a line"))?;
        }
        let shown: Vec<String> = counts.iter().map(|n| n.to_string()).collect();
        Ok(format!(
            "Z = {z}, line point counts {} over F_2, F_4, F_8",
            shown.join(", ")
        ))
    });
}

#[test]
fn criterion_11_amplitude_vanishing() {
    run(11, Duration::from_secs(300), || {
        let graphs = [
            ("bubble", Multigraph::banana(2)),
            ("theta", Multigraph::banana(3)),
            ("K4", Multigraph::complete(4)),
        ];
        let mut cells = 0;
        let mut zeros = 0;
        for (name, g) in &graphs {
            let scan = vanishing_scan(g, name, 1..=6, &[3, 5, 7], 1).map_err(|e| e.to_string())?;
            for cell in &scan.cells {
                ensure(cell.forms_agree, || {
                    format!("{name} d = {} q = {}: forms differ", cell.d, cell.q)
                })?;
                ensure(cell.consistent, || {
                    format!(
                        "{name} d = {} q = {}: predicted zero, measured {}",
                        cell.d, cell.q, cell.amplitude.value
                    )
                })?;
                zeros += (cell.predicate == Some(true)) as usize;
            }
            cells += scan.cells.len();
        }
        Ok(format!(
            "{cells} cells, {zeros} predicted zeros all measured as 0, both forms agree everywhere"
        ))
    });
}

#[test]
fn criterion_12_power_sums() {
    run(12, Duration::from_secs(1), || {
        let mut cases = 0;
        for q in prime_powers_up_to(16) {
            let f = field(q);
            for k in 0..=3 * (q - 1) {
                ensure(f.power_sum(k) == f.power_sum_naive(k), || format!("q = {q}, k = {k}"))?;
                cases += 1;
            }
        }
        Ok(format!("{cases} (q, k) pairs"))
    });
}
