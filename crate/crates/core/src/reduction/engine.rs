//! The rewriting engine behind Method 1.
//!
//! A system is reduced to `P(q) + Σ cᵢ(q)·N̄(Rᵢ)` where the `Rᵢ` are residual
//! systems no rule applies to. Results are memoized on a canonical form of
//! the system (sorted variables renamed to `1..n`, sign-normalized and sorted
//! polynomials), since inclusion-exclusion produces the same subsystem many
//! times over. Rules are tried in a fixed order:
//!
//! 1. integer constants (`N̄(±1, …)` is everything, other constants split off
//!    a unit-indicator symbol);
//! 2. free variables (a factor `q` each);
//! 3. factorization (radical replacement and the inclusion-exclusion split);
//! 4. elimination of a variable linear in some polynomial, preferring
//!    variables that are linear in every polynomial and earlier variables of
//!    the priority order;
//! 5. otherwise the system is a residual.

use std::rc::Rc;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use super::classify::{classify, residual_count, ResidualKind};
use crate::count::{run_count, support, Ambient, CountOptions, PolySystem};
use crate::error::{Error, Result};
use crate::gf::FieldSpec;
use crate::int::Int;
use crate::poly::{partial_factor, SparsePoly, Var};
use crate::qpoly::QPolynomial;

/// One rewriting step, recorded in the order the engine first meets each
/// distinct system.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceStep {
    pub rule: Rule,
    /// The eliminated variable for eliminations.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub variable: Option<Var>,
    /// Ambient coordinates of the rewritten system.
    pub ambient_vars: usize,
    /// Polynomials in the rewritten system.
    pub polynomials: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// `N̄(c, F) = N̄(F) + (total − N̄(F))·N̄(c)` for an integer `c`.
    Constant,
    /// Free ambient variables contribute a factor `q` each.
    FreeVariables,
    /// A polynomial replaced by the product of its distinct factors.
    Radical,
    /// Inclusion-exclusion over a factorization.
    ExpandProduct,
    /// Elimination of a variable that is linear in some polynomial.
    EliminateLinear,
    /// No rule applies.
    Residual,
}

/// `poly(q) + Σ coeff(q)·N̄(residual)`, with residuals referenced by index
/// into the engine's residual table and kept sorted by index.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub(crate) struct Expr {
    pub poly: QPolynomial,
    pub res: Vec<(u32, QPolynomial)>,
}

impl Expr {
    fn constant(poly: QPolynomial) -> Self {
        Expr { poly, res: Vec::new() }
    }

    fn symbol(id: u32, coeff: QPolynomial) -> Self {
        Expr {
            poly: QPolynomial::zero(),
            res: if coeff.is_zero() { Vec::new() } else { vec![(id, coeff)] },
        }
    }

    pub fn is_resolved(&self) -> bool {
        self.res.is_empty()
    }

    /// `self + c·other`.
    pub fn add_scaled(&mut self, other: &Expr, c: &QPolynomial) {
        self.poly = &self.poly + &(&other.poly * c);
        let mut merged: Vec<(u32, QPolynomial)> = Vec::with_capacity(self.res.len() + other.res.len());
        let (mut i, mut j) = (0, 0);
        while i < self.res.len() || j < other.res.len() {
            let take_self = j == other.res.len() || (i < self.res.len() && self.res[i].0 < other.res[j].0);
            let take_other = i == self.res.len() || (j < other.res.len() && other.res[j].0 < self.res[i].0);
            if take_self {
                merged.push(self.res[i].clone());
                i += 1;
            } else if take_other {
                let scaled = &other.res[j].1 * c;
                if !scaled.is_zero() {
                    merged.push((other.res[j].0, scaled));
                }
                j += 1;
            } else {
                let sum = &self.res[i].1 + &(&other.res[j].1 * c);
                if !sum.is_zero() {
                    merged.push((self.res[i].0, sum));
                }
                i += 1;
                j += 1;
            }
        }
        self.res = merged;
    }

    fn shift(&self, k: usize) -> Expr {
        Expr {
            poly: self.poly.shift(k),
            res: self.res.iter().map(|(id, c)| (*id, c.shift(k))).collect(),
        }
    }
}

/// A residual symbol with its classification.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Residual {
    pub system: PolySystem,
    pub kind: ResidualKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
struct Key {
    affine: bool,
    vars: usize,
    polys: Vec<SparsePoly>,
}

fn canonical_key(polys: &[SparsePoly], vars: &[Var], affine: bool) -> Key {
    let rename = |v: Var| (vars.binary_search(&v).expect("ambient variable") + 1) as Var;
    Key {
        affine,
        vars: vars.len(),
        polys: polys.iter().map(|p| p.rename(rename)).collect(),
    }
}

/// Drops zero polynomials, fixes signs, sorts and removes duplicates.
fn normalize(polys: Vec<SparsePoly>) -> Vec<SparsePoly> {
    let mut out: Vec<SparsePoly> = polys
        .into_iter()
        .filter(|p| !p.is_zero())
        .map(|p| p.normalize_sign())
        .collect();
    out.sort_by(|a, b| a.canonical_cmp(b));
    out.dedup();
    out
}

/// Product of the distinct primes dividing `c`, when `|c|` is small enough
/// to factor by trial division; `|c|` otherwise.
fn squarefree_kernel(c: &Int) -> Int {
    let Some(mut n) = c.abs().to_i64() else {
        return c.abs();
    };
    if n > 1 << 40 {
        return Int::from(n);
    }
    let mut kernel = 1i64;
    let mut d = 2i64;
    while d * d <= n {
        if n % d == 0 {
            kernel *= d;
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        kernel *= n;
    }
    Int::from(kernel)
}

fn total_points(vars: usize, affine: bool) -> QPolynomial {
    if affine {
        QPolynomial::q_pow(vars)
    } else {
        QPolynomial::q_integer(vars)
    }
}

pub(crate) struct Engine {
    memo: FxHashMap<Key, Expr>,
    residual_index: FxHashMap<Key, u32>,
    pub residuals: Vec<Residual>,
    factors: FxHashMap<SparsePoly, Rc<Vec<SparsePoly>>>,
    rank: FxHashMap<Var, usize>,
    pub trace: Vec<TraceStep>,
    verify: Vec<FieldSpec>,
    pub violations: Vec<String>,
    budget: usize,
    spent: usize,
}

/// Fresh systems a single top-level reduction may visit before the whole
/// system is kept as a residual.
pub const DEFAULT_BUDGET: usize = 200_000;

impl Engine {
    /// `priority` lists variables in the order they should be eliminated;
    /// unlisted variables come after, by id.
    pub fn new(priority: &[Var]) -> Self {
        Engine {
            memo: FxHashMap::default(),
            residual_index: FxHashMap::default(),
            residuals: Vec::new(),
            factors: FxHashMap::default(),
            rank: priority.iter().enumerate().map(|(i, &v)| (v, i)).collect(),
            trace: Vec::new(),
            verify: Vec::new(),
            violations: Vec::new(),
            budget: DEFAULT_BUDGET,
            spent: 0,
        }
    }

    /// Caps the number of fresh systems one call to `reduce_system` visits.
    pub fn with_budget(mut self, budget: usize) -> Self {
        self.budget = budget;
        self
    }

    /// Checks every freshly reduced system against enumeration over these
    /// fields; mismatches are collected in `violations`.
    pub fn verify_steps(&mut self, fields: Vec<FieldSpec>) {
        self.verify = fields;
    }

    pub fn reduce_system(&mut self, system: &PolySystem) -> Expr {
        let mut vars = system.variables.clone();
        vars.sort_unstable();
        let affine = system.ambient == Ambient::Affine;
        self.spent = 0;
        match self.reduce(system.polynomials.clone(), vars.clone(), affine) {
            Some(e) => e,
            None => {
                let polys = normalize(system.polynomials.clone());
                self.record(Rule::Residual, None, vars.len(), polys.len());
                let id = self.register_residual(polys, vars, affine);
                Expr::symbol(id, QPolynomial::one())
            }
        }
    }

    fn record(&mut self, rule: Rule, variable: Option<Var>, vars: usize, polys: usize) {
        self.trace.push(TraceStep {
            rule,
            variable,
            ambient_vars: vars,
            polynomials: polys,
        });
    }

    /// `vars` must be sorted.
    fn reduce(&mut self, polys: Vec<SparsePoly>, vars: Vec<Var>, affine: bool) -> Option<Expr> {
        let polys = normalize(polys);
        if polys.is_empty() {
            return Some(Expr::default());
        }
        if polys.iter().any(SparsePoly::is_constant) {
            return self.reduce_constants(polys, vars, affine);
        }
        let key = canonical_key(&polys, &vars, affine);
        if let Some(e) = self.memo.get(&key) {
            return Some(e.clone());
        }
        self.spent += 1;
        if self.spent > self.budget {
            return None;
        }
        let e = self.reduce_fresh(&polys, &vars, affine)?;
        if !self.verify.is_empty() {
            self.check(&polys, &vars, affine, &e);
        }
        self.memo.insert(key, e.clone());
        Some(e)
    }

    fn reduce_constants(&mut self, polys: Vec<SparsePoly>, vars: Vec<Var>, affine: bool) -> Option<Expr> {
        let total = total_points(vars.len(), affine);
        let (consts, rest): (Vec<SparsePoly>, Vec<SparsePoly>) = polys.into_iter().partition(|p| p.is_constant());
        let gcd = consts
            .iter()
            .map(|p| p.constant_value().expect("constant"))
            .fold(Int::ZERO, |g, c| g.gcd(&c));
        if gcd.is_unit() {
            return Some(Expr::constant(total));
        }
        self.record(Rule::Constant, None, vars.len(), consts.len() + rest.len());
        let kernel = squarefree_kernel(&gcd);
        let unit = self.register_residual(vec![SparsePoly::constant(kernel)], vec![1], false);
        if rest.is_empty() {
            return Some(Expr::symbol(unit, total));
        }
        let inner = self.reduce(rest.clone(), vars.clone(), affine)?;
        if !inner.is_resolved() {
            let mut all = rest;
            all.push(SparsePoly::constant(gcd));
            let id = self.register_residual(normalize(all), vars, affine);
            return Some(Expr::symbol(id, QPolynomial::one()));
        }
        let mut e = inner.clone();
        e.add_scaled(&Expr::symbol(unit, QPolynomial::one()), &(&total - &inner.poly));
        Some(e)
    }

    fn reduce_fresh(&mut self, polys: &[SparsePoly], vars: &[Var], affine: bool) -> Option<Expr> {
        let occurring = support(polys);
        if occurring.len() < vars.len() {
            self.record(Rule::FreeVariables, None, vars.len(), polys.len());
            let free = vars.len() - occurring.len();
            return Some(self.reduce(polys.to_vec(), occurring, affine)?.shift(free));
        }
        for (i, f) in polys.iter().enumerate() {
            let factors = self.radical_factors(f);
            if factors.len() == 1 && factors[0] == *f {
                continue;
            }
            let mut others: Vec<SparsePoly> = polys.to_vec();
            others.remove(i);
            if factors.len() == 1 {
                self.record(Rule::Radical, None, vars.len(), polys.len());
                others.push(factors[0].clone());
                return self.reduce(others, vars.to_vec(), affine);
            }
            self.record(Rule::ExpandProduct, None, vars.len(), polys.len());
            let a = factors[0].clone();
            let b = factors[1..].iter().fold(SparsePoly::one(), |acc, g| acc.mul(g));
            self.factors
                .entry(b.normalize_sign())
                .or_insert_with(|| Rc::new(factors[1..].to_vec()));
            let with = |extra: &[&SparsePoly]| {
                let mut v = others.clone();
                v.extend(extra.iter().map(|p| (*p).clone()));
                v
            };
            let t1 = self.reduce(with(&[&a]), vars.to_vec(), affine)?;
            let t2 = self.reduce(with(&[&b]), vars.to_vec(), affine)?;
            let t3 = self.reduce(with(&[&a, &b]), vars.to_vec(), affine)?;
            let mut e = t1;
            e.add_scaled(&t2, &QPolynomial::one());
            e.add_scaled(&t3, &QPolynomial::constant(-1));
            return Some(e);
        }
        if let Some((x, pivot)) = self.choose_elimination(polys, vars) {
            self.record(Rule::EliminateLinear, Some(x), vars.len(), polys.len());
            let [t1, t2, t3] = eliminate(polys, vars, x, pivot);
            let e1 = self.reduce(t1.0, t1.1, affine)?;
            let e2 = self.reduce(t2.0, t2.1, affine)?;
            let e3 = self.reduce(t3.0, t3.1, affine)?;
            let mut e = e1;
            e.add_scaled(&e2, &QPolynomial::one());
            e.add_scaled(&e3, &QPolynomial::constant(-1));
            return Some(e);
        }
        self.record(Rule::Residual, None, vars.len(), polys.len());
        let id = self.register_residual(polys.to_vec(), vars.to_vec(), affine);
        Some(Expr::symbol(id, QPolynomial::one()))
    }

    /// Distinct factors of `f`, with a non-unit content as a constant factor.
    fn radical_factors(&mut self, f: &SparsePoly) -> Rc<Vec<SparsePoly>> {
        if let Some(r) = self.factors.get(f) {
            return r.clone();
        }
        let fact = partial_factor(f);
        let mut out = Vec::new();
        if !fact.content.is_unit() {
            out.push(SparsePoly::constant(squarefree_kernel(&fact.content)));
        }
        out.extend(fact.factors.iter().map(|(g, _)| g.normalize_sign()));
        let r = Rc::new(out);
        self.factors.insert(f.clone(), r.clone());
        r
    }

    fn rank_of(&self, v: Var) -> (usize, Var) {
        (self.rank.get(&v).copied().unwrap_or(usize::MAX), v)
    }

    /// A variable and the index of a polynomial linear in it. Pivots whose
    /// coefficient of the variable is `±1` come first and non-unit integer
    /// coefficients last; then variables linear in every polynomial, then
    /// the priority order.
    fn choose_elimination(&self, polys: &[SparsePoly], vars: &[Var]) -> Option<(Var, usize)> {
        type Score = (u8, bool, (usize, Var));
        let mut best: Option<(Score, usize)> = None;
        for &x in vars {
            let mut all_linear = true;
            let mut pivot: Option<((u8, usize), usize)> = None;
            for (i, p) in polys.iter().enumerate() {
                match p.degree_in(x) {
                    0 => {}
                    1 => {
                        let lead = &p.coefficients_in(x)[1];
                        let class = match lead.constant_value() {
                            Some(c) if c.is_unit() => 0,
                            Some(_) => 2,
                            None => 1,
                        };
                        let key = (class, p.len());
                        if pivot.as_ref().is_none_or(|(k, _)| key < *k) {
                            pivot = Some((key, i));
                        }
                    }
                    _ => all_linear = false,
                }
            }
            let Some(((class, _), pivot)) = pivot else { continue };
            let key = (class, !all_linear, self.rank_of(x));
            if best.as_ref().is_none_or(|(k, _)| key < *k) {
                best = Some((key, pivot));
            }
        }
        best.map(|((_, _, (_, x)), pivot)| (x, pivot))
    }

    fn register_residual(&mut self, polys: Vec<SparsePoly>, vars: Vec<Var>, affine: bool) -> u32 {
        let key = canonical_key(&polys, &vars, affine);
        if let Some(&id) = self.residual_index.get(&key) {
            return id;
        }
        let ambient = if affine { Ambient::Affine } else { Ambient::Projective };
        let system = PolySystem {
            polynomials: polys,
            ambient,
            variables: vars,
        };
        let kind = classify(&system);
        let id = self.residuals.len() as u32;
        self.residuals.push(Residual { system, kind });
        self.residual_index.insert(key, id);
        id
    }

    /// Value of `e` over `field`, counting residuals by closed form or
    /// enumeration.
    pub fn evaluate(&self, e: &Expr, field: &FieldSpec) -> Result<Int> {
        let q = Int::from(field.q() as u64);
        let mut acc = e.poly.eval(&q);
        for (id, c) in &e.res {
            let r = &self.residuals[*id as usize];
            acc += &(&c.eval(&q) * &residual_count(&r.system, &r.kind, field)?);
        }
        Ok(acc)
    }

    fn check(&mut self, polys: &[SparsePoly], vars: &[Var], affine: bool, e: &Expr) {
        let ambient = if affine { Ambient::Affine } else { Ambient::Projective };
        let system = PolySystem {
            polynomials: polys.to_vec(),
            ambient,
            variables: vars.to_vec(),
        };
        for field in self.verify.clone() {
            let brute = run_count(&system, &field, CountOptions::default()).map(|r| r.nbar.expect("complete run"));
            let value = self.evaluate(e, &field);
            match (brute, value) {
                (Ok(a), Ok(b)) if a == b => {}
                (Ok(a), Ok(b)) => self.violations.push(format!(
                    "over F_{}: enumeration gives {a}, reduction gives {b} for {:?}",
                    field.q(),
                    system.polynomials
                )),
                (Err(Error::Budget { .. }), _) | (_, Err(Error::Budget { .. })) => {}
                (Err(err), _) | (_, Err(err)) => self.violations.push(err.to_string()),
            }
        }
    }
}

type Piece = (Vec<SparsePoly>, Vec<Var>);

/// The three systems of the elimination rule for `f = g₁x − g₀`:
/// `(g₁, g₀, rest)` in the same ambient, then the resultants `h̄` and
/// `(g₁, ĥ)` in the ambient without `x`.
pub(crate) fn eliminate(polys: &[SparsePoly], vars: &[Var], x: Var, pivot: usize) -> [Piece; 3] {
    let f = &polys[pivot];
    let c = f.coefficients_in(x);
    debug_assert_eq!(c.len(), 2);
    let g1 = c[1].clone();
    let g0 = c[0].neg();
    let others: Vec<&SparsePoly> = polys
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != pivot)
        .map(|(_, p)| p)
        .collect();
    let kmax = others.iter().map(|h| h.degree_in(x) as usize).max().unwrap_or(0);
    let mut pow0 = vec![SparsePoly::one()];
    let mut pow1 = vec![SparsePoly::one()];
    for k in 1..=kmax {
        pow0.push(pow0[k - 1].mul(&g0));
        pow1.push(pow1[k - 1].mul(&g1));
    }
    let rest_vars: Vec<Var> = vars.iter().copied().filter(|&v| v != x).collect();

    let mut first: Vec<SparsePoly> = others.iter().map(|p| (*p).clone()).collect();
    first.push(g1.clone());
    first.push(g0.clone());

    let mut bar = Vec::with_capacity(others.len());
    let mut hat = vec![g1.clone()];
    for h in &others {
        let hc = h.coefficients_in(x);
        let k = hc.len() - 1;
        if k == 0 {
            bar.push((*h).clone());
            hat.push((*h).clone());
            continue;
        }
        let mut acc = SparsePoly::zero();
        for (j, hj) in hc.iter().enumerate() {
            if !hj.is_zero() {
                acc = acc.add(&hj.mul(&pow0[j]).mul(&pow1[k - j]));
            }
        }
        bar.push(acc);
        hat.push(hc[k].mul(&g0));
    }
    [(first, vars.to_vec()), (bar, rest_vars.clone()), (hat, rest_vars)]
}
