use std::fmt::Write;

use fqgraph::count::{c2_invariant, merge, result4_scan, run_count, CountOptions, CountRecord};
use fqgraph::fqft::{vanishing_scan_with, Signature};
use fqgraph::graph::corpus::{connected_simple_graphs, named_families, random_corpus};
use fqgraph::interp::{
    crt_reconstruct, residue_class_reconstruct, zeta_function, zeta_function_in, CountSamples, InterpOptions,
    Reconstruction,
};
use fqgraph::poly::graph_poly::{dual_polynomial, graph_polynomial};
use fqgraph::reduction::{
    count_multilinear, denominator_reduce, extend_sequence, reduce_system_with, replay, run_method1_with, EntryChoice,
    Method1Options, ReductionReport,
};
use fqgraph::{Error, FieldSpec, Int, Multigraph, QPolynomial, Result};
use serde_json::{json, Value};

use crate::{input, AmplitudeArgs, C2Args, Command, CorpusArgs, CountArgs, Entry, InterpArgs, Metric, ReduceArgs};
use crate::{Rendered, ZetaArgs};

pub fn dispatch(command: &Command) -> Result<Rendered> {
    match command {
        Command::Psi { graph, dual } => psi(graph, *dual),
        Command::Count(args) => count(args),
        Command::Merge { records } => {
            let records: Vec<CountRecord> = records.iter().map(|p| input::read_json(p)).collect::<Result<_>>()?;
            let merged = merge(&records)?;
            Ok(Rendered::Json(
                serde_json::to_value(&merged)?,
                Some(count_table(&merged)),
            ))
        }
        Command::Reduce(args) => reduce(args),
        Command::Replay { report } => {
            let report: ReductionReport = input::read_json(report)?;
            let again = replay(&report)?;
            let table = format!("replay reproduced the report\n{}", report_table(&again));
            Ok(Rendered::Json(serde_json::to_value(&again)?, Some(table)))
        }
        Command::Interp(args) => interp(args),
        Command::Amplitude(args) => amplitude(args),
        Command::Corpus(args) => corpus(args),
        Command::C2(args) => c2(args),
        Command::Scan { p_max, extended } => scan(if *extended { 4999 } else { *p_max }),
        Command::Zeta(args) => zeta(args),
        Command::Rerun { .. } => unreachable!("rerun is handled by the caller"),
    }
}

fn psi(graph: &str, dual: bool) -> Result<Rendered> {
    let (_, g) = input::graph(graph)?;
    let poly = if dual {
        dual_polynomial(&g)?
    } else {
        graph_polynomial(&g)?
    };
    Ok(Rendered::Text(format!("{poly}\n")))
}

fn field(q: u64) -> Result<FieldSpec> {
    FieldSpec::of_order(q)
}

fn count(args: &CountArgs) -> Result<Rendered> {
    let system = input::system(&args.system)?;
    let field = field(args.q)?;
    if args.multilinear {
        let nbar = count_multilinear(&system, &field)?;
        let value = json!({
            "q": args.q,
            "Nbar": nbar,
            "system_hash": system.system_hash(),
            "method": "multilinear",
        });
        let table = format!("q\tNbar\tsystem_hash\n{}\t{}\t{}\n", args.q, nbar, system.system_hash());
        return Ok(Rendered::Json(value, Some(table)));
    }
    let mut options = CountOptions::default();
    if let Some(budget) = args.budget {
        options.budget = budget;
    }
    if let Some(spec) = &args.shard {
        options.shard = input::shard(spec)?;
    }
    let record = run_count(&system, &field, options)?;
    Ok(Rendered::Json(
        serde_json::to_value(&record)?,
        Some(count_table(&record)),
    ))
}

fn count_table(record: &CountRecord) -> String {
    let show = |v: &Option<Int>| v.as_ref().map_or("-".to_string(), Int::to_string);
    format!(
        "q\tN\tNbar\tshard\tsystem_hash\n{}\t{}\t{}\t{}/{}\t{}\n",
        record.q,
        show(&record.n),
        show(&record.nbar),
        record.shard[0],
        record.shard[1],
        record.system_hash
    )
}

fn reduce(args: &ReduceArgs) -> Result<Rendered> {
    let defaults = Method1Options::default();
    let budget = args.budget.unwrap_or(defaults.budget);
    let report = if args.system {
        let system = input::system(std::path::Path::new(&args.input))?;
        let priority = args.sequence.clone().unwrap_or_default();
        reduce_system_with(&system, &priority, budget, &args.certify_q)?
    } else {
        let (_, g) = input::graph(&args.input)?;
        let options = Method1Options {
            sequence: args.sequence.clone(),
            entry: match args.entry {
                Entry::Auto => EntryChoice::Auto,
                Entry::Direct => EntryChoice::Direct,
            },
            certify_at: args.certify_q.clone(),
            verify_steps: false,
            budget,
        };
        run_method1_with(&g, &options)?
    };
    Ok(Rendered::Json(
        serde_json::to_value(&report)?,
        Some(report_table(&report)),
    ))
}

fn report_table(report: &ReductionReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "resolved\t{}", report.resolved);
    let _ = writeln!(out, "class\t{}", report.grothendieck());
    let _ = writeln!(out, "residuals\t{}", report.residuals.len());
    for r in &report.residuals {
        let system: Vec<String> = r.system.iter().map(ToString::to_string).collect();
        let _ = writeln!(out, "  {} · N̄({}) [{:?}]", r.coeff, system.join(", "), r.classification);
    }
    let certified: Vec<String> = report.certified.iter().map(ToString::to_string).collect();
    let _ = writeln!(out, "certified\t{}", certified.join(","));
    let _ = writeln!(out, "steps\t{}", report.trace.len());
    out
}

fn interp(args: &InterpArgs) -> Result<Rendered> {
    let samples = CountSamples::parse(&std::fs::read_to_string(&args.samples)?)?;
    let mut options = match (args.degree, args.graph_edges) {
        (_, Some(edges)) => InterpOptions::graph(edges),
        (Some(degree), None) => InterpOptions::with_degree(degree),
        (None, None) => InterpOptions::default(),
    };
    options.drop_primes = args.drop_prime.clone();
    let reconstruction = match args.residue_class.as_deref() {
        Some(&[m, r]) => {
            let m =
                u64::try_from(m).map_err(|_| Error::InvalidInput("residue class modulus must be positive".into()))?;
            residue_class_reconstruct(&samples, m, r, &options)?
        }
        Some(_) => unreachable!("clap takes exactly two values"),
        None => crt_reconstruct(&samples, &options)?,
    };
    let table = reconstruction_table(&reconstruction);
    Ok(Rendered::Json(serde_json::to_value(&reconstruction)?, Some(table)))
}

fn reconstruction_table(r: &Reconstruction) -> String {
    let mut out = format!("verdict\t{}\n", r.verdict);
    let moduli: Vec<String> = r.moduli.iter().map(ToString::to_string).collect();
    let checks: Vec<String> = r.verification.iter().map(ToString::to_string).collect();
    let _ = writeln!(out, "moduli\t{}", moduli.join(","));
    let _ = writeln!(out, "verification\t{}", checks.join(","));
    for c in &r.candidates {
        let _ = writeln!(
            out,
            "candidate\t{}\t{}",
            c.polynomial,
            if c.verified { "verified" } else { "rejected" }
        );
    }
    out
}

fn amplitude(args: &AmplitudeArgs) -> Result<Rendered> {
    let (name, g) = input::graph(&args.graph)?;
    let signature = match args.metric {
        Metric::Euclidean => Signature::Euclidean,
        Metric::Minkowski => Signature::Minkowski,
    };
    let scan = vanishing_scan_with(&g, &name, args.d.iter().copied(), &args.q, args.m2, signature)?;
    Ok(Rendered::Json(serde_json::to_value(&scan)?, Some(scan.table())))
}

fn corpus(args: &CorpusArgs) -> Result<Rendered> {
    let mut graphs: Vec<(String, Multigraph)> = connected_simple_graphs(args.max_edges)
        .into_iter()
        .enumerate()
        .map(|(i, g)| (format!("simple-{i}"), g))
        .collect();
    if args.named {
        graphs.extend(named_families());
    }
    if args.random > 0 {
        let random = random_corpus(args.random, args.random_min_edges, args.random_max_edges, args.seed);
        graphs.extend(random.into_iter().enumerate().map(|(i, g)| (format!("random-{i}"), g)));
    }
    let mut table = String::from("name\tvertices\tedges\tloops\n");
    let entries = graphs
        .iter()
        .map(|(name, g)| {
            let _ = writeln!(
                table,
                "{name}\t{}\t{}\t{}",
                g.vertex_count(),
                g.edge_count(),
                g.cycle_rank()
            );
            let mut entry: Value = serde_json::from_str(&g.to_json())?;
            entry["name"] = json!(name);
            Ok(entry)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Rendered::Json(Value::Array(entries), Some(table)))
}

fn c2(args: &C2Args) -> Result<Rendered> {
    let (name, g) = input::graph(&args.graph)?;
    let sequence = match &args.sequence {
        Some(s) => Some(s.clone()),
        None => g
            .structural_probe()
            .three_valent_vertices
            .first()
            .map(|&(_, edges)| extend_sequence(&g, &edges))
            .filter(|s| s.len() >= 5),
    };
    let denominator = sequence.as_deref().map(|s| denominator_reduce(&g, s)).transpose()?;
    let mut rows = Vec::new();
    let mut table = String::from("q\tc2\tfull_count\tvertex_route\tdenominator\n");
    for &q in &args.q {
        let field = field(q)?;
        let report = c2_invariant(&g, &field, CountOptions::default())?;
        let predicted = denominator.as_ref().map(|d| d.predicted_c2(&field)).transpose()?;
        let show = |v: Option<u64>| v.map_or("-".to_string(), |v| v.to_string());
        let _ = writeln!(
            table,
            "{q}\t{}\t{}\t{}\t{}",
            report.c2,
            show(report.full_count),
            show(report.vertex_route),
            show(predicted)
        );
        rows.push(json!({
            "q": q,
            "c2": report.c2,
            "full_count": report.full_count,
            "vertex_route": report.vertex_route,
            "denominator": predicted,
        }));
    }
    let value = json!({
        "graph": name,
        "sequence": sequence,
        "denominator_reduction": denominator,
        "rows": rows,
    });
    Ok(Rendered::Json(value, Some(table)))
}

fn scan(p_max: u64) -> Result<Rendered> {
    let scan = result4_scan(p_max)?;
    let mut table = String::from("p\tNbar\tNbar mod p\tk\t7k²/p\n");
    for row in &scan.rows {
        let k = row.k.map_or("-".to_string(), |k| k.to_string());
        let _ = writeln!(
            table,
            "{}\t{}\t{}\t{k}\t{:.4}",
            row.p, row.nbar, row.nbar_mod_p, row.ratio
        );
    }
    let _ = writeln!(table, "falsifications\t{}", scan.falsifications.len());
    Ok(Rendered::Json(serde_json::to_value(&scan)?, Some(table)))
}

fn zeta(args: &ZetaArgs) -> Result<Rendered> {
    let poly = match (&args.coeffs, &args.report) {
        (Some(coeffs), _) => QPolynomial::from_coeffs(coeffs.iter().map(|&c| Int::from(c)).collect()),
        (None, Some(path)) => {
            let report: ReductionReport = input::read_json(path)?;
            if !report.is_resolved() {
                return Err(Error::InvalidInput("the report has residual terms".into()));
            }
            report.resolved
        }
        (None, None) => return Err(Error::InvalidInput("give --coeffs or --report".into())),
    };
    let zeta = match args.n {
        Some(n) => zeta_function_in(&poly, n)?,
        None => zeta_function(&poly)?,
    };
    let value = json!({ "nbar": poly, "factors": zeta.factors, "rendered": zeta.to_string() });
    Ok(Rendered::Json(value, Some(format!("{zeta}\n"))))
}
