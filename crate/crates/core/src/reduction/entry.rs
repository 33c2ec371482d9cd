//! Graph-level entry points: the 3-valent-vertex formulas for `N̄(Ψ_Γ)`,
//! denominator reduction, and the greedy edge-sequence heuristic.

use serde::{Deserialize, Serialize};

use super::CountExpression;
use crate::count::{run_count, CountOptions, PolySystem};
use crate::error::{Error, Result};
use crate::gf::FieldSpec;
use crate::graph::{EdgeId, Multigraph};
use crate::int::Int;
use crate::poly::graph_poly::{delta_pair, minor_polynomial, triangle_decomposition, vertex_face_decomposition};
use crate::poly::{partial_factor, SparsePoly, Var};
use crate::qpoly::QPolynomial;

/// Which 3-valent-vertex formula opens the reduction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntryMode {
    /// `q³N̄(Ψ_{Γ−123}, Ψ_{Γ−1/23}, Ψ_{Γ−2/13}, Ψ_{Γ/123}) − q²N̄(Ψ_{Γ−123}, Ψ_{Γ−1/23}, Ψ_{Γ−2/13})`.
    Vertex,
    /// `qN̄(Ψ_{Γ/3}) + qN̄(Δ₁₂) − q²N̄(Δ)` with `Δ₁₂ = Ψ_{Γ−123}x₃ + Δ`.
    VertexAlt,
    /// The nine-term formula for a 3-valent vertex on a triangle.
    Triangle,
}

fn without(g: &Multigraph, drop: &[EdgeId]) -> Vec<Var> {
    g.edge_ids().into_iter().filter(|e| !drop.contains(e)).collect()
}

/// `N̄(Ψ_Γ)` as a combination of complement counts of minors, using the
/// first 3-valent vertex (and, for [`EntryMode::Triangle`], the first
/// triangle at such a vertex) reported by the structural probe.
pub fn theorem1_entry(g: &Multigraph, mode: EntryMode) -> Result<CountExpression> {
    let probe = g.structural_probe();
    if !probe.is_simple || !probe.vertex_connectivity_ge_2 {
        return Err(Error::ConfigurationAbsent(
            "the 3-valent-vertex formulas need a simple graph with vertex-connectivity at least 2".into(),
        ));
    }
    if g.cycle_rank() < 3 {
        return Err(Error::ConfigurationAbsent(format!(
            "the 3-valent-vertex formulas need h₁ ≥ 3 so that deg Ψ_Γ > 2, got h₁ = {}",
            g.cycle_rank()
        )));
    }
    let q = QPolynomial::q();
    let q2 = QPolynomial::q_pow(2);
    let q3 = QPolynomial::q_pow(3);
    let mut expr = CountExpression::default();
    match mode {
        EntryMode::Vertex | EntryMode::VertexAlt => {
            let &(_, edges) = probe
                .three_valent_vertices
                .first()
                .ok_or_else(|| Error::ConfigurationAbsent("no 3-valent vertex".into()))?;
            let [e1, e2, e3] = edges;
            let dec = vertex_face_decomposition(g, edges)?;
            let rest = without(g, &edges);
            if mode == EntryMode::Vertex {
                let three = vec![dec.psi_del_123.clone(), dec.psi_del_1.clone(), dec.psi_del_2.clone()];
                let mut four = three.clone();
                four.push(dec.psi_con_123.clone());
                expr.push(q3, PolySystem::projective(four, rest.clone())?);
                expr.push(-&q2, PolySystem::projective(three, rest)?);
            } else {
                let delta12 = dec.psi_del_123.mul(&SparsePoly::var(e3)).add(&dec.delta);
                let psi = crate::poly::graph_poly::graph_polynomial(g)?;
                let check = delta_pair(&psi, e1, e2)?;
                if check != delta12 && check != delta12.neg() {
                    return Err(Error::Consistency("Δ₁₂ ≠ ±(Ψ_{Γ−123}x₃ + Δ)".into()));
                }
                let contracted = minor_polynomial(g, &[], &[e3])?;
                expr.push(q.clone(), PolySystem::projective(vec![contracted], without(g, &[e3]))?);
                expr.push(q, PolySystem::projective(vec![delta12], without(g, &[e1, e2]))?);
                expr.push(-&q2, PolySystem::projective(vec![dec.delta], rest)?);
            }
        }
        EntryMode::Triangle => {
            let &(_, edges) = probe
                .triangles_at_3valent
                .first()
                .ok_or_else(|| Error::ConfigurationAbsent("no 3-valent vertex on a triangle".into()))?;
            let [e1, e2, e3, e4] = edges;
            let t = triangle_decomposition(g, edges)?;
            let one = QPolynomial::one();
            let qm1 = &q - &one;
            let qm2 = &qm1 - &one;
            let v23 = without(g, &[e2, e3]);
            let v123 = without(g, &[e1, e2, e3]);
            let v234 = without(g, &[e2, e3, e4]);
            let v1234 = without(g, &[e1, e2, e3, e4]);
            let sys = |polys: Vec<SparsePoly>, vars: &Vec<Var>| PolySystem::projective(polys, vars.clone());
            expr.push(&q * &qm2, sys(vec![t.psi_del2_con3], &v23)?);
            expr.push(&q * &qm1, sys(vec![t.psi_del_123], &v123)?);
            expr.push(&q * &qm1, sys(vec![t.psi_del24_con3], &v234)?);
            expr.push(q2.clone(), sys(vec![t.psi_del2_con34], &v234)?);
            expr.push(q2.clone(), sys(vec![t.psi_del_1234.clone()], &v1234)?);
            expr.push(q2.clone(), sys(vec![t.psi_del123_con4.clone()], &v1234)?);
            expr.push(-&q2, sys(vec![t.psi_del_1234, t.delta.clone()], &v1234)?);
            expr.push(-&q2, sys(vec![t.psi_del123_con4, t.delta.clone()], &v1234)?);
            expr.push(-&(&q2 * &qm2), sys(vec![t.delta], &v1234)?);
        }
    }
    Ok(expr)
}

/// Greedy edge order: each step appends the edge maximizing the number of
/// completed vertices, then the number of independent cycles, of the
/// prefix; ties go to the smallest edge id.
pub fn edge_sequence_heuristic(g: &Multigraph) -> Vec<EdgeId> {
    extend_sequence(g, &[])
}

/// Completes `prefix` with the greedy rule of [`edge_sequence_heuristic`].
pub fn extend_sequence(g: &Multigraph, prefix: &[EdgeId]) -> Vec<EdgeId> {
    let mut chosen: Vec<EdgeId> = prefix.to_vec();
    let mut remaining: Vec<EdgeId> = g.edge_ids().into_iter().filter(|e| !prefix.contains(e)).collect();
    while !remaining.is_empty() {
        let mut best: Option<((usize, usize), usize)> = None;
        for (i, &e) in remaining.iter().enumerate() {
            chosen.push(e);
            let score = prefix_score(g, &chosen);
            chosen.pop();
            if best.is_none_or(|(s, _)| score > s) {
                best = Some((score, i));
            }
        }
        let (_, i) = best.expect("nonempty");
        chosen.push(remaining.remove(i));
    }
    chosen
}

/// `(completed vertices, cycle rank)` of the edge subset.
fn prefix_score(g: &Multigraph, edges: &[EdgeId]) -> (usize, usize) {
    let n = g.vertex_count() as usize;
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut cycles = 0;
    let mut used = vec![0usize; n];
    for &id in edges {
        let e = g.edge(id).expect("edge of g");
        used[e.a as usize] += 1;
        if !e.is_loop() {
            used[e.b as usize] += 1;
        }
        let (ra, rb) = (find(&mut parent, e.a as usize), find(&mut parent, e.b as usize));
        if ra == rb {
            cycles += 1;
        } else {
            parent[ra] = rb;
        }
    }
    let complete = (0..n)
        .filter(|&v| {
            let inc = g.incident_edges(v as u32);
            !inc.is_empty() && inc.iter().all(|e| edges.contains(e))
        })
        .count();
    (complete, cycles)
}

/// Terminal state of a denominator reduction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DenominatorReduction {
    /// Variables still present.
    pub m: usize,
    pub variables: Vec<Var>,
    /// The reduced denominator: one polynomial, or the pair whose middle
    /// term was not taken because the sequence ran out.
    pub psi: Vec<SparsePoly>,
    /// `c₂ ≡ sign·N̄(ψ) mod q`.
    pub sign: i32,
    /// Edges eliminated, in order.
    pub eliminated: Vec<EdgeId>,
    /// The edge at which a denominator failed to split, if any.
    pub stopped_at: Option<EdgeId>,
}

impl DenominatorReduction {
    /// The integer value of `ψ` when it is constant.
    pub fn integer(&self) -> Option<Int> {
        match self.psi.as_slice() {
            [p] if p.is_constant() || p.is_zero() => Some(p.constant_value().unwrap_or(Int::ZERO)),
            _ => None,
        }
    }

    pub fn system(&self) -> Result<PolySystem> {
        PolySystem::projective(self.psi.clone(), self.variables.clone())
    }

    /// `sign·N̄(ψ)_{P^{m−1}} mod q`, the predicted `N̄(Ψ_Γ)/q² mod q`.
    pub fn predicted_c2(&self, field: &FieldSpec) -> Result<u64> {
        let q = field.q() as u64;
        let nbar = match self.integer() {
            Some(z) if self.m == 0 => Int::from(field.unit_indicator(&z) as u64),
            _ => run_count(&self.system()?, field, CountOptions::default())?
                .nbar
                .expect("complete run"),
        };
        let value = if self.sign < 0 { -nbar } else { nbar };
        Ok(value.rem_euclid_u64(q))
    }
}

/// Writes `d = A·B` with `A` and `B` of degree at most one in `x`, at least
/// one of them involving `x`. Factors free of `x`, and the content, go into
/// `A`.
fn split_linear(d: &SparsePoly, x: Var) -> Option<Vec<SparsePoly>> {
    let fact = partial_factor(d);
    let mut with_x = Vec::new();
    let mut rest = SparsePoly::constant(fact.content.clone());
    for (f, e) in &fact.factors {
        if f.degree_in(x) == 0 {
            rest = rest.mul(&f.pow(*e));
        } else {
            with_x.extend(std::iter::repeat_n(f.clone(), *e as usize));
        }
    }
    if with_x.iter().any(|f| f.degree_in(x) > 1) {
        return None;
    }
    match with_x.as_slice() {
        [a] => Some(vec![rest, a.clone()]),
        [a, b] => Some(vec![a.mul(&rest), b.clone()]),
        _ => None,
    }
}

/// Denominator reduction along `sequence`, whose first three edges must
/// meet at a 3-valent vertex. Starting from `(Ψ_{Γ−123}, Δ)` each further
/// edge `x` is eliminated from the current pair `fᵢ = fᵢ₁x + fᵢ₀` by keeping
/// `f₁₁f₂₀ − f₁₀f₂₁`; that denominator must split into two factors linear
/// in the next edge to continue.
pub fn denominator_reduce(g: &Multigraph, sequence: &[EdgeId]) -> Result<DenominatorReduction> {
    if sequence.len() < 5 {
        return Err(Error::InvalidInput(format!(
            "denominator reduction needs at least 5 edges, got {}",
            sequence.len()
        )));
    }
    let ids = g.edge_ids();
    let mut seen = std::collections::BTreeSet::new();
    for e in sequence {
        if !ids.contains(e) || !seen.insert(*e) {
            return Err(Error::InvalidInput(format!(
                "edge {e} is unknown or repeated in the sequence"
            )));
        }
    }
    if 2 * g.cycle_rank() != g.edge_count() {
        return Err(Error::ConfigurationAbsent(format!(
            "denominator reduction needs 2h₁ = n, got h₁ = {} and n = {}",
            g.cycle_rank(),
            g.edge_count()
        )));
    }
    let first = [sequence[0], sequence[1], sequence[2]];
    let dec = vertex_face_decomposition(g, first)?;
    let mut variables = without(g, &first);
    let mut state = vec![dec.psi_del_123, dec.delta];
    let mut eliminated = first.to_vec();
    let mut stopped_at = None;
    for &x in &sequence[3..] {
        if state.len() == 1 {
            let d = &state[0];
            if d.is_constant() || d.is_zero() {
                break;
            }
            match split_linear(d, x) {
                Some(parts) => state = parts,
                None => {
                    stopped_at = Some(x);
                    break;
                }
            }
        }
        if state.iter().any(|p| p.degree_in(x) > 1) {
            stopped_at = Some(x);
            break;
        }
        let split = |p: &SparsePoly| {
            let mut c = p.coefficients_in(x);
            c.resize(2, SparsePoly::zero());
            (c[1].clone(), c[0].clone())
        };
        let (f11, f10) = split(&state[0]);
        let (f21, f20) = split(&state[1]);
        state = vec![f11.mul(&f20).sub(&f10.mul(&f21))];
        variables.retain(|&v| v != x);
        eliminated.push(x);
    }
    let m = variables.len();
    let constant = matches!(state.as_slice(), [p] if p.is_constant() || p.is_zero());
    let sign = if constant || m % 2 == 1 { -1 } else { 1 };
    Ok(DenominatorReduction {
        m,
        variables,
        psi: state,
        sign,
        eliminated,
        stopped_at,
    })
}
