//! Symbolic reduction of complement counts.
//!
//! A count `N̄(f₁,…,f_m)` is rewritten into a `ℤ[q]`-linear combination of
//! simpler counts until only polynomials in `q` and irreducible residual
//! systems remain. [`run_method1`] drives the whole procedure for a graph,
//! and the individual rules are exposed as operations on a
//! [`CountExpression`].

pub mod classify;
mod engine;
mod entry;
mod rules;

use serde::{Deserialize, Serialize};

pub use classify::{classify, residual_count, ResidualKind};
pub use engine::{Rule, TraceStep};
pub use entry::{
    denominator_reduce, edge_sequence_heuristic, extend_sequence, theorem1_entry, DenominatorReduction, EntryMode,
};
pub use rules::{
    cor_shortcut, cor_shortcuts, eliminate_linear, expand_product, rescale, rescale_poly, swap_to_affine, RuleOutcome,
    Shortcut,
};

pub use engine::DEFAULT_BUDGET;
use engine::{Engine, Expr};

use crate::count::{run_count, Ambient, CountOptions, PolySystem};
use crate::error::{Error, Result};
use crate::gf::FieldSpec;
use crate::graph::{Edge, EdgeId, Multigraph};
use crate::int::Int;
use crate::poly::graph_poly::graph_polynomial;
use crate::poly::{SparsePoly, Var};
use crate::qpoly::QPolynomial;

/// `coefficient · N̄(system)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountTerm {
    pub coefficient: QPolynomial,
    pub system: PolySystem,
}

/// `polynomial(q) + Σ coefficientᵢ(q)·N̄(systemᵢ)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountExpression {
    pub polynomial: QPolynomial,
    pub terms: Vec<CountTerm>,
}

fn canonical_system(system: PolySystem) -> PolySystem {
    let mut polys: Vec<SparsePoly> = system
        .polynomials
        .into_iter()
        .filter(|p| !p.is_zero())
        .map(|p| p.normalize_sign())
        .collect();
    polys.sort_by(|a, b| a.canonical_cmp(b));
    polys.dedup();
    let mut variables = system.variables;
    variables.sort_unstable();
    PolySystem {
        polynomials: polys,
        ambient: system.ambient,
        variables,
    }
}

impl CountExpression {
    pub fn constant(polynomial: QPolynomial) -> Self {
        CountExpression {
            polynomial,
            terms: Vec::new(),
        }
    }

    /// `N̄(system)`.
    pub fn single(system: PolySystem) -> Self {
        let mut e = Self::default();
        e.push(QPolynomial::one(), system);
        e
    }

    /// Adds `coefficient·N̄(system)`, merging with an equal canonical system
    /// and dropping zero coefficients.
    pub fn push(&mut self, coefficient: QPolynomial, system: PolySystem) {
        if coefficient.is_zero() {
            return;
        }
        let system = canonical_system(system);
        if let Some(i) = self.terms.iter().position(|t| t.system == system) {
            let c = &self.terms[i].coefficient + &coefficient;
            if c.is_zero() {
                self.terms.remove(i);
            } else {
                self.terms[i].coefficient = c;
            }
        } else {
            self.terms.push(CountTerm { coefficient, system });
        }
    }

    pub fn extend(&mut self, other: &CountExpression) {
        self.polynomial = &self.polynomial + &other.polynomial;
        for t in &other.terms {
            self.push(t.coefficient.clone(), t.system.clone());
        }
    }

    /// Value over `field` with every term counted by enumeration.
    pub fn evaluate(&self, field: &FieldSpec) -> Result<Int> {
        let q = Int::from(field.q() as u64);
        let mut acc = self.polynomial.eval(&q);
        for t in &self.terms {
            let n = run_count(&t.system, field, CountOptions::default())?
                .nbar
                .expect("complete run");
            acc += &(&t.coefficient.eval(&q) * &n);
        }
        Ok(acc)
    }
}

/// A residual symbol of a report with its coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidualTerm {
    pub coeff: QPolynomial,
    /// The polynomials of the residual system.
    pub system: Vec<SparsePoly>,
    pub ambient: Ambient,
    pub variables: Vec<Var>,
    pub classification: ResidualKind,
}

impl ResidualTerm {
    pub fn poly_system(&self) -> PolySystem {
        PolySystem {
            polynomials: self.system.clone(),
            ambient: self.ambient,
            variables: self.variables.clone(),
        }
    }
}

/// How the reduction starts for a graph.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryChoice {
    /// The vertex formula when the graph is simple, 2-connected, has a
    /// 3-valent vertex and `h₁ ≥ 3`; the plain graph polynomial otherwise.
    #[default]
    Auto,
    /// Always reduce `N̄(Ψ_Γ)` directly.
    Direct,
    /// A specific formula; fails when its configuration is absent.
    Mode(EntryMode),
}

/// What was reduced, with enough detail to run it again.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ReductionInput {
    Graph {
        vertices: u32,
        edges: Vec<Edge>,
        sequence: Vec<EdgeId>,
        entry: EntryChoice,
        #[serde(default = "default_budget")]
        budget: usize,
    },
    System {
        system: PolySystem,
        sequence: Vec<Var>,
        #[serde(default = "default_budget")]
        budget: usize,
    },
}

fn default_budget() -> usize {
    DEFAULT_BUDGET
}

/// `N̄ = resolved(q) + Σ coeff(q)·N̄(residual)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionReport {
    pub input: ReductionInput,
    pub resolved: QPolynomial,
    pub residuals: Vec<ResidualTerm>,
    pub trace: Vec<TraceStep>,
    /// Field sizes at which the report was checked against enumeration.
    pub certified: Vec<u64>,
}

impl ReductionReport {
    /// No residual symbols remain.
    pub fn is_resolved(&self) -> bool {
        self.residuals.is_empty()
    }

    /// The value of the report over `field`.
    pub fn evaluate(&self, field: &FieldSpec) -> Result<Int> {
        let q = Int::from(field.q() as u64);
        let mut acc = self.resolved.eval(&q);
        for r in &self.residuals {
            let n = residual_count(&r.poly_system(), &r.classification, field)?;
            acc += &(&r.coeff.eval(&q) * &n);
        }
        Ok(acc)
    }

    /// The resolved part with `q` written as the Lefschetz class `L`.
    pub fn grothendieck(&self) -> String {
        let mut out = self.resolved.render_lefschetz();
        for r in &self.residuals {
            let sys: Vec<String> = r.system.iter().map(|p| p.to_string()).collect();
            out.push_str(&format!(" + ({})·[{}]", r.coeff.render_lefschetz(), sys.join(", ")));
        }
        out
    }

    /// The system whose complement count the report describes.
    pub fn input_system(&self) -> Result<PolySystem> {
        match &self.input {
            ReductionInput::Graph { vertices, edges, .. } => {
                let g = Multigraph::with_edges(*vertices, edges.clone())?;
                PolySystem::projective(vec![graph_polynomial(&g)?], g.edge_ids())
            }
            ReductionInput::System { system, .. } => Ok(system.clone()),
        }
    }
}

/// Options for [`run_method1_with`].
#[derive(Clone, Debug)]
pub struct Method1Options {
    /// Elimination order; the greedy heuristic when absent.
    pub sequence: Option<Vec<EdgeId>>,
    pub entry: EntryChoice,
    /// Field sizes at which to check the report against enumeration.
    pub certify_at: Vec<u64>,
    /// Check every rewriting step against enumeration over `F₂` and `F₃`.
    pub verify_steps: bool,
    /// Fresh systems one entry term may visit before it is kept whole as a
    /// residual.
    pub budget: usize,
}

impl Default for Method1Options {
    fn default() -> Self {
        Method1Options {
            sequence: None,
            entry: EntryChoice::Auto,
            certify_at: vec![2, 3],
            budget: DEFAULT_BUDGET,
            verify_steps: false,
        }
    }
}

fn finish(engine: Engine, expr: Expr, input: ReductionInput) -> ReductionReport {
    let residuals = expr
        .res
        .iter()
        .map(|(id, coeff)| {
            let r = &engine.residuals[*id as usize];
            ResidualTerm {
                coeff: coeff.clone(),
                system: r.system.polynomials.clone(),
                ambient: r.system.ambient,
                variables: r.system.variables.clone(),
                classification: r.kind.clone(),
            }
        })
        .collect();
    ReductionReport {
        input,
        resolved: expr.poly,
        residuals,
        trace: engine.trace,
        certified: Vec::new(),
    }
}

fn certify(report: &mut ReductionReport, at: &[u64]) -> Result<()> {
    let system = report.input_system()?;
    for &q in at {
        let field = FieldSpec::of_order(q)?;
        let brute = match run_count(&system, &field, CountOptions::default()) {
            Ok(r) => r.nbar.expect("complete run"),
            Err(Error::Budget { .. }) => continue,
            Err(e) => return Err(e),
        };
        let value = report.evaluate(&field)?;
        if brute != value {
            return Err(Error::Consistency(format!(
                "reduction gives {value} over F_{q} but enumeration gives {brute}"
            )));
        }
        report.certified.push(q);
    }
    Ok(())
}

fn new_engine(priority: &[Var], verify: bool, budget: usize) -> Result<Engine> {
    let mut engine = Engine::new(priority).with_budget(budget);
    if verify {
        engine.verify_steps(vec![FieldSpec::of_order(2)?, FieldSpec::of_order(3)?]);
    }
    Ok(engine)
}

fn violations(engine: &Engine) -> Result<()> {
    match engine.violations.first() {
        Some(v) => Err(Error::Consistency(format!("unsound rewriting step: {v}"))),
        None => Ok(()),
    }
}

/// Method 1 for `N̄(Ψ_Γ)` with the default options and an optional edge
/// order.
pub fn run_method1(g: &Multigraph, sequence: Option<&[EdgeId]>) -> Result<ReductionReport> {
    run_method1_with(
        g,
        &Method1Options {
            sequence: sequence.map(<[EdgeId]>::to_vec),
            ..Method1Options::default()
        },
    )
}

/// Method 1: opens with a 3-valent-vertex formula when possible, reduces
/// every term with the rewriting engine and certifies the result.
pub fn run_method1_with(g: &Multigraph, options: &Method1Options) -> Result<ReductionReport> {
    if !g.is_connected_ignoring_isolated() {
        return Err(Error::Disconnected);
    }
    let sequence = match &options.sequence {
        Some(s) => {
            let ids = g.edge_ids();
            if let Some(e) = s.iter().find(|e| !ids.contains(e)) {
                return Err(Error::UnknownEdge(*e));
            }
            s.clone()
        }
        None => edge_sequence_heuristic(g),
    };
    let probe = g.structural_probe();
    let mode = match options.entry {
        EntryChoice::Auto => (probe.is_simple
            && probe.vertex_connectivity_ge_2
            && !probe.three_valent_vertices.is_empty()
            && g.cycle_rank() >= 3)
            .then_some(EntryMode::Vertex),
        EntryChoice::Direct => None,
        EntryChoice::Mode(m) => Some(m),
    };
    let start = match mode {
        Some(m) => theorem1_entry(g, m)?,
        None => CountExpression::single(PolySystem::projective(vec![graph_polynomial(g)?], g.edge_ids())?),
    };
    let mut engine = new_engine(&sequence, options.verify_steps, options.budget)?;
    let mut total = Expr {
        poly: start.polynomial.clone(),
        ..Expr::default()
    };
    for t in &start.terms {
        let e = engine.reduce_system(&t.system);
        total.add_scaled(&e, &t.coefficient);
    }
    violations(&engine)?;
    let input = ReductionInput::Graph {
        vertices: g.vertex_count(),
        edges: g.edges().to_vec(),
        sequence,
        entry: options.entry,
        budget: options.budget,
    };
    let mut report = finish(engine, total, input);
    certify(&mut report, &options.certify_at)?;
    Ok(report)
}

/// Reduces an arbitrary system, eliminating variables in `priority` order
/// first, and certifies the result at `certify_at`.
pub fn reduce_system(system: &PolySystem, priority: &[Var], certify_at: &[u64]) -> Result<ReductionReport> {
    reduce_system_with(system, priority, DEFAULT_BUDGET, certify_at)
}

/// [`reduce_system`] with an explicit work budget.
pub fn reduce_system_with(
    system: &PolySystem,
    priority: &[Var],
    budget: usize,
    certify_at: &[u64],
) -> Result<ReductionReport> {
    let mut engine = Engine::new(priority).with_budget(budget);
    let e = engine.reduce_system(system);
    let input = ReductionInput::System {
        system: system.clone(),
        sequence: priority.to_vec(),
        budget,
    };
    let mut report = finish(engine, e, input);
    certify(&mut report, certify_at)?;
    Ok(report)
}

/// Runs the reduction recorded in `report` again and checks that it
/// reproduces the resolved part, the residuals and the trace.
pub fn replay(report: &ReductionReport) -> Result<ReductionReport> {
    let again = match &report.input {
        ReductionInput::Graph {
            vertices,
            edges,
            sequence,
            entry,
            budget,
        } => {
            let g = Multigraph::with_edges(*vertices, edges.clone())?;
            run_method1_with(
                &g,
                &Method1Options {
                    sequence: Some(sequence.clone()),
                    entry: *entry,
                    certify_at: report.certified.clone(),
                    verify_steps: false,
                    budget: *budget,
                },
            )?
        }
        ReductionInput::System {
            system,
            sequence,
            budget,
        } => reduce_system_with(system, sequence, *budget, &report.certified)?,
    };
    if again.resolved != report.resolved {
        return Err(Error::Consistency(format!(
            "replay resolved {} but the report has {}",
            again.resolved, report.resolved
        )));
    }
    if again.residuals != report.residuals {
        return Err(Error::Consistency("replay produced different residuals".into()));
    }
    if again.trace != report.trace {
        let at = again.trace.iter().zip(&report.trace).position(|(a, b)| a != b);
        return Err(Error::Consistency(format!(
            "replay trace diverges at step {}",
            at.unwrap_or(again.trace.len().min(report.trace.len()))
        )));
    }
    Ok(again)
}

/// `N̄(system)` over `field` by symbolic reduction, with any residual block
/// counted by enumeration.
pub fn count_multilinear(system: &PolySystem, field: &FieldSpec) -> Result<Int> {
    let mut engine = Engine::new(&[]);
    let e = engine.reduce_system(system);
    engine.evaluate(&e, field)
}
