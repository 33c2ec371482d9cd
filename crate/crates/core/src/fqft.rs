//! Scalar field theory over `F_q`: propagator quadrics `Q = |p|² + m²`,
//! momentum routing along a cycle basis, amplitude sums and the vanishing
//! criterion `(q − 1)c + 2n > 0`.
//!
//! The amplitude of a graph with `n` edges and `h₁` loops is
//! `Σ ∏ Q_i(p)^{-1}` over loop momenta `p ∈ F_q^{d·h₁}` with every `Q_i ≠ 0`.
//! For `q > 2` this equals `Σ ∏ Q_i(p)^{q−2}` over all of `F_q^{d·h₁}`.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::count::{Shard, DEFAULT_BUDGET};
use crate::dispatch_field;
use crate::error::{Error, Result};
use crate::gf::{Field, FieldElement, FieldSpec};
use crate::graph::{EdgeId, Multigraph};

/// Largest value-distribution table, in entries of `F_q^n`.
const TABLE_LIMIT: u128 = 1 << 22;
/// Largest monomial expansion in the power-sum evaluation.
const EXPANSION_LIMIT: usize = 1 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Signature {
    /// All entries `+1`.
    Euclidean,
    /// `+1` followed by `−1`s.
    Minkowski,
}

/// Space-time dimension, mass and diagonal metric.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TheoryConfig {
    pub d: usize,
    /// Encoded element of `F_q`; integers below `p` are the prime subfield.
    pub mass_squared: FieldElement,
    /// Diagonal entries, each `+1` or `−1`.
    pub metric: Vec<i8>,
}

impl TheoryConfig {
    pub fn new(d: usize, mass_squared: FieldElement, signature: Signature) -> Result<TheoryConfig> {
        let metric = match signature {
            Signature::Euclidean => vec![1; d],
            Signature::Minkowski => (0..d).map(|i| if i == 0 { 1 } else { -1 }).collect(),
        };
        Self::with_metric(mass_squared, metric)
    }

    pub fn euclidean(d: usize, mass_squared: FieldElement) -> Result<TheoryConfig> {
        Self::new(d, mass_squared, Signature::Euclidean)
    }

    pub fn with_metric(mass_squared: FieldElement, metric: Vec<i8>) -> Result<TheoryConfig> {
        if metric.is_empty() {
            return Err(Error::InvalidInput("space-time dimension must be at least 1".into()));
        }
        if metric.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidInput("metric entries must be +1 or -1".into()));
        }
        Ok(TheoryConfig {
            d: metric.len(),
            mass_squared,
            metric,
        })
    }

    fn check(&self, field: &FieldSpec) -> Result<()> {
        if self.mass_squared >= field.q() {
            return Err(Error::InvalidInput(format!(
                "mass parameter {} is not an element of F_{}",
                self.mass_squared,
                field.q()
            )));
        }
        Self::with_metric(self.mass_squared, self.metric.clone()).map(|_| ())
    }
}

/// Superficial degree of divergence `c = d·h₁ − 2n`.
pub fn superficial_degree(g: &Multigraph, d: usize) -> i64 {
    (d * g.cycle_rank()) as i64 - 2 * g.edge_count() as i64
}

/// Each edge's momentum as a signed combination of the `h₁` loop momenta.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MomentumRouting {
    pub loops: usize,
    /// Spanning tree the loops are built on.
    pub tree: Vec<EdgeId>,
    /// Per edge, in graph order: coefficients in `{−1, 0, 1}`, one per loop.
    /// Momentum flows from `a` to `b`.
    pub coefficients: Vec<(EdgeId, Vec<i8>)>,
}

impl MomentumRouting {
    /// Momentum is conserved at every vertex and every edge outside the
    /// tree carries exactly its own loop momentum.
    pub fn is_consistent(&self, g: &Multigraph) -> bool {
        let mut balance = vec![vec![0i64; self.loops]; g.vertex_count() as usize];
        for (edge, (id, coeffs)) in g.edges().iter().zip(&self.coefficients) {
            if edge.id != *id || coeffs.len() != self.loops {
                return false;
            }
            if coeffs.iter().any(|&c| !(-1..=1).contains(&c)) {
                return false;
            }
            for (j, &c) in coeffs.iter().enumerate() {
                balance[edge.a as usize][j] -= c as i64;
                balance[edge.b as usize][j] += c as i64;
            }
        }
        if balance.iter().flatten().any(|&b| b != 0) {
            return false;
        }
        let mut next_loop = 0;
        for (id, coeffs) in &self.coefficients {
            if self.tree.contains(id) {
                continue;
            }
            let unit = coeffs.iter().enumerate().all(|(j, &c)| c == (j == next_loop) as i8);
            if !unit {
                return false;
            }
            next_loop += 1;
        }
        next_loop == self.loops
    }
}

/// Routing along the fundamental cycles of the greedy spanning tree in edge
/// order. A tree yields an empty routing.
pub fn route_momenta(g: &Multigraph) -> Result<MomentumRouting> {
    route_momenta_with_order(g, &g.edge_ids())
}

/// Routing along the spanning tree picked greedily in `order`.
pub fn route_momenta_with_order(g: &Multigraph, order: &[EdgeId]) -> Result<MomentumRouting> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let tree = g.greedy_spanning_forest(order);
    let loops = g.cycle_rank();
    let mut adjacency: Vec<Vec<(u32, usize)>> = vec![Vec::new(); g.vertex_count() as usize];
    let mut coefficients: Vec<(EdgeId, Vec<i8>)> = g.edges().iter().map(|e| (e.id, vec![0; loops])).collect();
    for (i, e) in g.edges().iter().enumerate() {
        if tree.contains(&e.id) {
            adjacency[e.a as usize].push((e.b, i));
            adjacency[e.b as usize].push((e.a, i));
        }
    }
    let mut j = 0;
    for (i, e) in g.edges().iter().enumerate() {
        if tree.contains(&e.id) {
            continue;
        }
        coefficients[i].1[j] = 1;
        // the loop momentum returns from b to a through the tree
        for (from, to, k) in tree_path(&adjacency, e.b, e.a) {
            let edge = &g.edges()[k];
            coefficients[k].1[j] = if (edge.a, edge.b) == (from, to) { 1 } else { -1 };
        }
        j += 1;
    }
    Ok(MomentumRouting {
        loops,
        tree,
        coefficients,
    })
}

/// Steps `(from, to, edge index)` of the tree path from `start` to `goal`.
fn tree_path(adjacency: &[Vec<(u32, usize)>], start: u32, goal: u32) -> Vec<(u32, u32, usize)> {
    let mut parent: Vec<Option<(u32, usize)>> = vec![None; adjacency.len()];
    let mut seen = vec![false; adjacency.len()];
    let mut queue = VecDeque::from([start]);
    seen[start as usize] = true;
    while let Some(v) = queue.pop_front() {
        if v == goal {
            break;
        }
        for &(w, k) in &adjacency[v as usize] {
            if !seen[w as usize] {
                seen[w as usize] = true;
                parent[w as usize] = Some((v, k));
                queue.push_back(w);
            }
        }
    }
    let mut path = Vec::new();
    let mut v = goal;
    while let Some((u, k)) = parent[v as usize] {
        path.push((u, v, k));
        v = u;
    }
    path.reverse();
    path
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AmplitudeMethod {
    /// Every point of `F_q^{d·h₁}` visited.
    Enumeration,
    /// Distribution of the edge quadric values, built one space-time
    /// coordinate at a time.
    Convolution,
    /// No loops: the empty sum convention.
    Tree,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Amplitude {
    /// Sum of `∏ Q_i^{-1}` over points with every `Q_i ≠ 0`.
    pub value: FieldElement,
    /// Sum of `∏ Q_i^{q−2}` over all points; absent for `q = 2`.
    pub power_form: Option<FieldElement>,
    /// Points where some `Q_i` vanishes.
    pub excluded: u128,
    /// Points summed over.
    pub points: u128,
    /// The graph is a tree and the amplitude is set to 1.
    pub tree_convention: bool,
    pub method: AmplitudeMethod,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AmplitudeOptions {
    pub budget: u128,
    pub shard: Shard,
}

impl Default for AmplitudeOptions {
    fn default() -> Self {
        AmplitudeOptions {
            budget: DEFAULT_BUDGET,
            shard: Shard::WHOLE,
        }
    }
}

pub fn amplitude(g: &Multigraph, theory: &TheoryConfig, field: &FieldSpec) -> Result<Amplitude> {
    amplitude_with(g, theory, field, &route_momenta(g)?, AmplitudeOptions::default())
}

/// The amplitude for a given routing. Sharded runs enumerate the points
/// whose first coordinate lies in the shard; partial results combine with
/// [`merge_amplitudes`].
pub fn amplitude_with(
    g: &Multigraph,
    theory: &TheoryConfig,
    field: &FieldSpec,
    routing: &MomentumRouting,
    options: AmplitudeOptions,
) -> Result<Amplitude> {
    theory.check(field)?;
    if routing.loops == 0 {
        return Ok(tree_amplitude(field));
    }
    let q = field.q() as u128;
    let vars = (theory.d * routing.loops) as u32;
    let points = q.checked_pow(vars).unwrap_or(u128::MAX);
    let table = q.checked_pow(g.edge_count() as u32).unwrap_or(u128::MAX);
    let per_step = q.saturating_pow(routing.loops as u32).min(table).saturating_mul(table);
    let convolution_cost = per_step.saturating_mul(theory.d as u128);
    let whole = options.shard == Shard::WHOLE;
    if whole && table <= TABLE_LIMIT && convolution_cost < points {
        let mut walk = Walk::new(routing, theory.mass_squared, field);
        for &sign in &theory.metric {
            walk.step(sign);
        }
        return Ok(walk.amplitude());
    }
    if points > options.budget {
        return Err(Error::Budget {
            points,
            limit: options.budget,
            shards: points.div_ceil(options.budget.max(1)).min(u64::MAX as u128) as u64,
        });
    }
    Ok(dispatch_field!(field, f => enumerate(f, routing, theory, options.shard)))
}

/// Direct evaluation over every point, the reference for [`amplitude`].
pub fn amplitude_by_enumeration(
    theory: &TheoryConfig,
    field: &FieldSpec,
    routing: &MomentumRouting,
    shard: Shard,
) -> Result<Amplitude> {
    theory.check(field)?;
    if routing.loops == 0 {
        return Ok(tree_amplitude(field));
    }
    Ok(dispatch_field!(field, f => enumerate(f, routing, theory, shard)))
}

/// Sums the partial amplitudes of complementary shards.
pub fn merge_amplitudes(parts: &[Amplitude], field: &FieldSpec) -> Result<Amplitude> {
    let first = parts
        .first()
        .ok_or_else(|| Error::InvalidInput("nothing to merge".into()))?;
    let mut out = first.clone();
    for part in &parts[1..] {
        if part.power_form.is_some() != out.power_form.is_some() || part.method != out.method {
            return Err(Error::InvalidInput("amplitude shards disagree in kind".into()));
        }
        out.value = field.add(out.value, part.value);
        out.power_form = out.power_form.zip(part.power_form).map(|(a, b)| field.add(a, b));
        out.excluded += part.excluded;
        out.points += part.points;
    }
    Ok(out)
}

fn tree_amplitude(field: &FieldSpec) -> Amplitude {
    Amplitude {
        value: 1,
        power_form: (field.q() > 2).then_some(1),
        excluded: 0,
        points: 1,
        tree_convention: true,
        method: AmplitudeMethod::Tree,
    }
}

fn signed<F: Field>(f: &F, sign: i8, x: u32) -> u32 {
    match sign {
        1 => x,
        -1 => f.neg(x),
        _ => 0,
    }
}

fn enumerate<F: Field>(f: &F, routing: &MomentumRouting, theory: &TheoryConfig, shard: Shard) -> Amplitude {
    let q = f.q();
    let (h, d) = (routing.loops, theory.d);
    let vars = h * d;
    let power = q > 2;
    let inner = q.pow(vars as u32 - 1) as u64;
    let firsts: Vec<u32> = (0..q).filter(|a| (*a as u64) % shard.total == shard.index).collect();
    let partial = |first: u32| {
        let mut point = vec![0u32; vars];
        point[0] = first;
        let (mut value, mut power_form, mut excluded) = (0u32, 0u32, 0u128);
        for mut index in 0..inner {
            for slot in point.iter_mut().skip(1) {
                *slot = (index % q as u64) as u32;
                index /= q as u64;
            }
            let mut product = 1u32;
            let mut powered = 1u32;
            let mut defined = true;
            for (_, coeffs) in &routing.coefficients {
                let mut quad = theory.mass_squared;
                for (mu, &eta) in theory.metric.iter().enumerate() {
                    let mut momentum = 0u32;
                    for (j, &c) in coeffs.iter().enumerate() {
                        momentum = f.add(momentum, signed(f, c, point[j * d + mu]));
                    }
                    quad = f.add(quad, signed(f, eta, f.mul(momentum, momentum)));
                }
                if quad == 0 {
                    defined = false;
                } else {
                    product = f.mul(product, quad);
                }
                if power {
                    powered = f.mul(powered, f.pow(quad, q as u64 - 2));
                }
            }
            if defined {
                value = f.add(value, f.inv(product));
            } else {
                excluded += 1;
            }
            power_form = f.add(power_form, powered);
        }
        (value, power_form, excluded)
    };
    let parts: Vec<(u32, u32, u128)> = firsts.par_iter().map(|&a| partial(a)).collect();
    let (value, power_form, excluded) = parts
        .into_iter()
        .fold((0, 0, 0), |acc, p| (f.add(acc.0, p.0), f.add(acc.1, p.1), acc.2 + p.2));
    Amplitude {
        value,
        power_form: power.then_some(power_form),
        excluded,
        points: firsts.len() as u128 * inner as u128,
        tree_convention: false,
        method: AmplitudeMethod::Enumeration,
    }
}

/// Distribution of `(Σ_μ η_μ (ℓ_i · p_μ)²)_i ∈ F_q^n` over the coordinates
/// processed so far, as exact counts indexed by base-`q` digits.
struct Walk<'a> {
    field: &'a FieldSpec,
    mass_squared: FieldElement,
    edges: usize,
    loops: usize,
    counts: Vec<u128>,
    /// Single-coordinate distributions for `η = +1` and `η = −1`.
    plus: Vec<(Vec<u32>, u128)>,
    minus: Vec<(Vec<u32>, u128)>,
    points: u128,
}

impl<'a> Walk<'a> {
    fn new(routing: &MomentumRouting, mass_squared: FieldElement, field: &'a FieldSpec) -> Walk<'a> {
        let q = field.q();
        let edges = routing.coefficients.len();
        let size = (q as usize).pow(edges as u32);
        let mut counts = vec![0u128; size];
        counts[0] = 1;
        let (plus, minus) = dispatch_field!(field, f => single_coordinate(f, routing));
        Walk {
            field,
            mass_squared,
            edges,
            loops: routing.loops,
            counts,
            plus,
            minus,
            points: 1,
        }
    }

    fn step(&mut self, sign: i8) {
        let q = self.field.q() as usize;
        let dist = if sign > 0 { &self.plus } else { &self.minus };
        let mut next = vec![0u128; self.counts.len()];
        let edges = self.edges;
        dispatch_field!(self.field, f => {
            let mut digits = vec![0u32; edges];
            for (index, &count) in self.counts.iter().enumerate() {
                if count == 0 {
                    continue;
                }
                let mut rest = index;
                for slot in digits.iter_mut() {
                    *slot = (rest % q) as u32;
                    rest /= q;
                }
                for (shift, weight) in dist {
                    let mut target = 0usize;
                    for i in (0..edges).rev() {
                        target = target * q + f.add(digits[i], shift[i]) as usize;
                    }
                    next[target] += count * weight;
                }
            }
        });
        self.counts = next;
        self.points *= (q as u128).pow(self.loops as u32);
    }

    fn amplitude(&self) -> Amplitude {
        let field = self.field;
        let q = field.q() as usize;
        let power = q > 2;
        let p = field.p() as u128;
        let mut value = 0;
        let mut power_form = 0;
        let mut excluded = 0u128;
        dispatch_field!(field, f => {
            for (index, &count) in self.counts.iter().enumerate() {
                if count == 0 {
                    continue;
                }
                let weight = (count % p) as u32;
                let mut rest = index;
                let mut product = 1;
                let mut powered = 1;
                let mut defined = true;
                for _ in 0..self.edges {
                    let quad = f.add(self.mass_squared, (rest % q) as u32);
                    rest /= q;
                    if quad == 0 {
                        defined = false;
                    } else {
                        product = f.mul(product, quad);
                    }
                    if power {
                        powered = f.mul(powered, f.pow(quad, q as u64 - 2));
                    }
                }
                if defined {
                    value = f.add(value, f.mul(weight, f.inv(product)));
                } else {
                    excluded += count;
                }
                power_form = f.add(power_form, f.mul(weight, powered));
            }
        });
        Amplitude {
            value,
            power_form: power.then_some(power_form),
            excluded,
            points: self.points,
            tree_convention: false,
            method: AmplitudeMethod::Convolution,
        }
    }
}

type Distribution = Vec<(Vec<u32>, u128)>;

fn single_coordinate<F: Field>(f: &F, routing: &MomentumRouting) -> (Distribution, Distribution) {
    let q = f.q();
    let h = routing.loops;
    let mut plus: HashMap<Vec<u32>, u128> = HashMap::new();
    let mut y = vec![0u32; h];
    for mut index in 0..(q as u64).pow(h as u32) {
        for slot in y.iter_mut() {
            *slot = (index % q as u64) as u32;
            index /= q as u64;
        }
        let squares: Vec<u32> = routing
            .coefficients
            .iter()
            .map(|(_, coeffs)| {
                let m = coeffs
                    .iter()
                    .zip(&y)
                    .fold(0, |acc, (&c, &v)| f.add(acc, signed(f, c, v)));
                f.mul(m, m)
            })
            .collect();
        *plus.entry(squares).or_default() += 1;
    }
    let minus = plus
        .iter()
        .map(|(v, &w)| (v.iter().map(|&x| f.neg(x)).collect(), w))
        .collect();
    (plus.into_iter().collect(), minus)
}

/// Amplitudes for every prefix `d = 1..=metric.len()` of one metric, sharing
/// the coordinate-by-coordinate distribution. Falls back to [`amplitude_with`]
/// per dimension when the distribution table is too large.
pub fn amplitudes_by_dimension(
    g: &Multigraph,
    mass_squared: FieldElement,
    metric: &[i8],
    field: &FieldSpec,
) -> Result<Vec<Amplitude>> {
    let full = TheoryConfig::with_metric(mass_squared, metric.to_vec())?;
    full.check(field)?;
    let routing = route_momenta(g)?;
    if routing.loops == 0 {
        return Ok(vec![tree_amplitude(field); metric.len()]);
    }
    let table = (field.q() as u128)
        .checked_pow(g.edge_count() as u32)
        .unwrap_or(u128::MAX);
    if table <= TABLE_LIMIT {
        let mut walk = Walk::new(&routing, mass_squared, field);
        let mut out = Vec::with_capacity(metric.len());
        for &sign in metric {
            walk.step(sign);
            out.push(walk.amplitude());
        }
        return Ok(out);
    }
    (1..=metric.len())
        .map(|d| {
            let theory = TheoryConfig::with_metric(mass_squared, metric[..d].to_vec())?;
            amplitude_with(g, &theory, field, &routing, AmplitudeOptions::default())
        })
        .collect()
}

/// Expands `∏ Q_i^{q−2}` into monomials and sums each with the closed-form
/// power sums `Σ_x x^k`. Only for tiny cases.
pub fn amplitude_by_power_sums(g: &Multigraph, theory: &TheoryConfig, field: &FieldSpec) -> Result<FieldElement> {
    theory.check(field)?;
    if field.q() <= 2 {
        return Err(Error::InvalidInput("the power form needs q > 2".into()));
    }
    let routing = route_momenta(g)?;
    if routing.loops == 0 {
        return Ok(1);
    }
    let (h, d) = (routing.loops, theory.d);
    let vars = h * d;
    type Expansion = HashMap<Vec<u32>, FieldElement>;
    let multiply = |a: &Expansion, b: &Expansion| -> Result<Expansion> {
        let mut out: Expansion = HashMap::new();
        for (ea, &ca) in a {
            for (eb, &cb) in b {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                let entry = out.entry(e).or_insert(0);
                *entry = field.add(*entry, field.mul(ca, cb));
            }
        }
        out.retain(|_, c| *c != 0);
        if out.len() > EXPANSION_LIMIT {
            return Err(Error::Budget {
                points: out.len() as u128,
                limit: EXPANSION_LIMIT as u128,
                shards: 1,
            });
        }
        Ok(out)
    };
    let mut total: Expansion = HashMap::from([(vec![0; vars], 1)]);
    for (_, coeffs) in &routing.coefficients {
        let mut quad: Expansion = HashMap::from([(vec![0; vars], theory.mass_squared)]);
        for (mu, &eta) in theory.metric.iter().enumerate() {
            let mut linear: Expansion = HashMap::new();
            for (j, &c) in coeffs.iter().enumerate() {
                if c != 0 {
                    let mut e = vec![0; vars];
                    e[j * d + mu] = 1;
                    linear.insert(e, if c > 0 { 1 } else { field.neg(1) });
                }
            }
            let mut square = multiply(&linear, &linear)?;
            if eta < 0 {
                square.values_mut().for_each(|c| *c = field.neg(*c));
            }
            for (e, c) in square {
                let entry = quad.entry(e).or_insert(0);
                *entry = field.add(*entry, c);
            }
        }
        quad.retain(|_, c| *c != 0);
        for _ in 0..field.q() - 2 {
            total = multiply(&total, &quad)?;
        }
    }
    let mut sum = 0;
    for (e, c) in total {
        let term = e.iter().fold(c, |acc, &k| field.mul(acc, field.power_sum(k as u64)));
        sum = field.add(sum, term);
    }
    Ok(sum)
}

/// Whether the vanishing criterion guarantees a zero amplitude. `None` when
/// the criterion does not apply (`q ≤ 2` or no loops).
pub fn vanishing_predicate(g: &Multigraph, d: usize, q: u64) -> Option<bool> {
    if q <= 2 || g.cycle_rank() == 0 {
        return None;
    }
    Some(vanishing_lhs(g, d, q) > 0)
}

/// `(q − 1)c + 2n`.
pub fn vanishing_lhs(g: &Multigraph, d: usize, q: u64) -> i64 {
    (q as i64 - 1) * superficial_degree(g, d) + 2 * g.edge_count() as i64
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanCell {
    pub d: usize,
    pub q: u64,
    pub c: i64,
    pub lhs: i64,
    pub predicate: Option<bool>,
    pub amplitude: Amplitude,
    /// The inverse and power forms agree (always true for `q = 2`).
    pub forms_agree: bool,
    /// A predicted zero is measured as zero.
    pub consistent: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VanishingScan {
    pub graph: String,
    pub edges: usize,
    pub loops: usize,
    pub mass_squared: FieldElement,
    pub signature: Signature,
    pub cells: Vec<ScanCell>,
}

impl VanishingScan {
    pub fn all_consistent(&self) -> bool {
        self.cells.iter().all(|c| c.consistent && c.forms_agree)
    }

    pub fn table(&self) -> String {
        let mut out = String::from("graph\td\tq\tc\t(q-1)c+2n\tpredicate\tvalue\n");
        for cell in &self.cells {
            let predicate = match cell.predicate {
                Some(true) => "vanishes",
                Some(false) => "no guarantee",
                None => "unavailable",
            };
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                self.graph, cell.d, cell.q, cell.c, cell.lhs, predicate, cell.amplitude.value
            ));
        }
        out
    }
}

impl fmt::Display for VanishingScan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.table())
    }
}

/// Measures the amplitude in every `(d, q)` cell with the euclidean metric
/// and compares it with the vanishing criterion.
pub fn vanishing_scan(
    g: &Multigraph,
    name: &str,
    d_range: impl IntoIterator<Item = usize>,
    q_range: &[u64],
    mass_squared: FieldElement,
) -> Result<VanishingScan> {
    vanishing_scan_with(g, name, d_range, q_range, mass_squared, Signature::Euclidean)
}

/// As [`vanishing_scan`] with the metric of the given signature.
pub fn vanishing_scan_with(
    g: &Multigraph,
    name: &str,
    d_range: impl IntoIterator<Item = usize>,
    q_range: &[u64],
    mass_squared: FieldElement,
    signature: Signature,
) -> Result<VanishingScan> {
    let ds: Vec<usize> = d_range.into_iter().collect();
    let d_max = ds.iter().copied().max().unwrap_or(0);
    let mut cells = Vec::new();
    for &q in q_range {
        let field = FieldSpec::of_order(q)?;
        let by_d = if d_max == 0 {
            Vec::new()
        } else {
            let metric = TheoryConfig::new(d_max, mass_squared, signature)?.metric;
            amplitudes_by_dimension(g, mass_squared, &metric, &field)?
        };
        for &d in &ds {
            if d == 0 {
                return Err(Error::InvalidInput("space-time dimension must be at least 1".into()));
            }
            let amplitude = by_d[d - 1].clone();
            let predicate = vanishing_predicate(g, d, q);
            let forms_agree = amplitude.power_form.is_none_or(|v| v == amplitude.value);
            cells.push(ScanCell {
                d,
                q,
                c: superficial_degree(g, d),
                lhs: vanishing_lhs(g, d, q),
                predicate,
                consistent: predicate != Some(true) || amplitude.value == 0,
                forms_agree,
                amplitude,
            });
        }
    }
    cells.sort_by_key(|c| (c.d, c.q));
    Ok(VanishingScan {
        graph: name.to_string(),
        edges: g.edge_count(),
        loops: g.cycle_rank(),
        mass_squared,
        signature,
        cells,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bubble_routing() {
        let r = route_momenta(&Multigraph::banana(2)).unwrap();
        assert_eq!(r.loops, 1);
        assert!(r.coefficients.iter().all(|(_, c)| c[0].abs() == 1));
        assert!(r.is_consistent(&Multigraph::banana(2)));
    }

    #[test]
    fn bubble_amplitude_at_five() {
        let field = FieldSpec::of_order(5).unwrap();
        let theory = TheoryConfig::euclidean(1, 1).unwrap();
        let a = amplitude(&Multigraph::banana(2), &theory, &field).unwrap();
        assert_eq!(a.value, 4);
        assert_eq!(a.excluded, 2);
        assert_eq!(a.power_form, Some(4));
    }
}
