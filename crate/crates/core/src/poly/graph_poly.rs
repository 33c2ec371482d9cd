//! Graph polynomials Ψ and Ψ̄, the bilinear discriminant Δ_{e,e'}, the
//! vertex and triangle decompositions behind the 3-valent-vertex formulas,
//! and the quartic f.

use serde::Serialize;

use super::{poly_sqrt, Monomial, SparsePoly, Var};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, MinorSpec, Multigraph};
use crate::int::Int;

fn check_connected(g: &Multigraph) -> Result<()> {
    if g.is_connected_ignoring_isolated() {
        Ok(())
    } else {
        Err(Error::Disconnected)
    }
}

/// Ψ_Γ: the sum over spanning trees of the product of the variables of the
/// edges outside the tree. Isolated vertices are ignored, so minors that
/// strip every edge at a vertex are still accepted.
pub fn graph_polynomial(g: &Multigraph) -> Result<SparsePoly> {
    check_connected(g)?;
    let ids = g.edge_ids();
    let terms = g
        .spanning_forests()
        .into_iter()
        .map(|t| {
            let pairs = ids
                .iter()
                .filter(|id| t.binary_search(id).is_err())
                .map(|&id| (id as Var, 1))
                .collect();
            (Monomial::from_pairs(pairs), Int::ONE)
        })
        .collect();
    Ok(SparsePoly::from_terms(terms))
}

/// Ψ̄_Γ: the same sum with the product over the edges in the tree.
pub fn dual_polynomial(g: &Multigraph) -> Result<SparsePoly> {
    check_connected(g)?;
    let terms = g
        .spanning_forests()
        .into_iter()
        .map(|t| {
            let pairs = t.iter().map(|&id| (id as Var, 1)).collect();
            (Monomial::from_pairs(pairs), Int::ONE)
        })
        .collect();
    Ok(SparsePoly::from_terms(terms))
}

/// The Cremona transform `x₁⋯x_n · p(1/x₁, …, 1/x_n)` of a polynomial that
/// is linear in each of `vars`.
pub fn cremona(p: &SparsePoly, vars: &[Var]) -> Result<SparsePoly> {
    let mut terms = Vec::with_capacity(p.len());
    for (m, c) in p.terms() {
        if m.0.iter().any(|&(v, e)| e > 1 || !vars.contains(&v)) {
            return Err(Error::InvalidInput(format!(
                "Cremona transform needs a polynomial linear in the listed variables, got {p}"
            )));
        }
        let pairs = vars.iter().filter(|&&v| m.exp(v) == 0).map(|&v| (v, 1)).collect();
        terms.push((Monomial::from_pairs(pairs), c.clone()));
    }
    Ok(SparsePoly::from_terms(terms))
}

/// Graph polynomial of a minor given by deleted and contracted edge ids. A
/// disconnected minor has no spanning tree, so its polynomial is zero.
pub fn minor_polynomial(g: &Multigraph, deleted: &[EdgeId], contracted: &[EdgeId]) -> Result<SparsePoly> {
    let minor = g.minor(&MinorSpec::new(deleted, contracted))?;
    if !minor.is_connected_ignoring_isolated() {
        return Ok(SparsePoly::zero());
    }
    graph_polynomial(&minor)
}

/// Bilinear coefficients `(a, b, c, d)` of `p = a·x_e x_f + b·x_e + c·x_f + d`.
pub fn bilinear_parts(p: &SparsePoly, e: Var, f: Var) -> Result<[SparsePoly; 4]> {
    if p.degree_in(e) > 1 || p.degree_in(f) > 1 || e == f {
        return Err(Error::InvalidInput(format!(
            "polynomial is not linear in x{e} and x{f}"
        )));
    }
    let mut ce = p.coefficients_in(e);
    ce.resize(2, SparsePoly::zero());
    let mut hi = ce[1].coefficients_in(f);
    hi.resize(2, SparsePoly::zero());
    let mut lo = ce[0].coefficients_in(f);
    lo.resize(2, SparsePoly::zero());
    Ok([hi[1].clone(), hi[0].clone(), lo[1].clone(), lo[0].clone()])
}

/// Sign so that the lexicographically largest term is positive.
fn lex_normalize(p: SparsePoly) -> SparsePoly {
    let lead = p.terms().iter().max_by(|a, b| a.0.lex_cmp(&b.0));
    match lead {
        Some((_, c)) if c.is_negative() => p.neg(),
        _ => p,
    }
}

/// Δ_{e,f} with `ad − bc = −Δ²`, computed as the square root of `bc − ad`.
pub fn delta_pair(p: &SparsePoly, e: Var, f: Var) -> Result<SparsePoly> {
    let [a, b, c, d] = bilinear_parts(p, e, f)?;
    let disc = b.mul(&c).sub(&a.mul(&d));
    poly_sqrt(&disc)
        .map(lex_normalize)
        .ok_or_else(|| Error::NotSquare(format!("bc - ad = {disc}")))
}

/// Minors at a 3-valent vertex with incident edges `1, 2, 3`.
#[derive(Clone, Debug, Serialize)]
pub struct VertexDecomposition {
    pub edges: [EdgeId; 3],
    /// Ψ_{Γ−123}
    pub psi_del_123: SparsePoly,
    /// Ψ_{Γ−1/23}
    pub psi_del_1: SparsePoly,
    /// Ψ_{Γ−2/13}
    pub psi_del_2: SparsePoly,
    /// Ψ_{Γ−3/12}
    pub psi_del_3: SparsePoly,
    /// Ψ_{Γ/123}
    pub psi_con_123: SparsePoly,
    /// Δ = (Ψ_{Γ−1/23} + Ψ_{Γ−2/13} − Ψ_{Γ−3/12}) / 2
    pub delta: SparsePoly,
}

impl VertexDecomposition {
    /// Ψ_Γ reassembled from the minors.
    pub fn reconstruct(&self) -> SparsePoly {
        let [e1, e2, e3] = self.edges.map(|e| SparsePoly::var(e as Var));
        let sym = e1.mul(&e2).add(&e1.mul(&e3)).add(&e2.mul(&e3));
        self.psi_del_123
            .mul(&sym)
            .add(&self.psi_del_1.mul(&e1))
            .add(&self.psi_del_2.mul(&e2))
            .add(&self.psi_del_3.mul(&e3))
            .add(&self.psi_con_123)
    }
}

fn halve(p: &SparsePoly, what: &str) -> Result<SparsePoly> {
    p.div_scalar(&Int::from(2))
        .ok_or_else(|| Error::Consistency(format!("{what} is not divisible by 2: {p}")))
}

/// Minors and Δ at the 3-valent vertex whose incident edges are `edges`.
/// The quadratic identity `Ψ_{Γ−123}Ψ_{Γ/123} − Ψ_{Γ−1/23}Ψ_{Γ−2/13} = −Δ²`
/// is verified before returning.
pub fn vertex_face_decomposition(g: &Multigraph, edges: [EdgeId; 3]) -> Result<VertexDecomposition> {
    let [e1, e2, e3] = edges;
    let at_vertex = (0..g.vertex_count()).any(|v| {
        let mut inc = g.incident_edges(v);
        inc.sort_unstable();
        let mut want = edges.to_vec();
        want.sort_unstable();
        g.degree(v) == 3 && inc == want
    });
    if !at_vertex {
        return Err(Error::ConfigurationAbsent(format!(
            "edges {e1}, {e2}, {e3} are not the edges of a 3-valent vertex"
        )));
    }
    let psi_del_123 = minor_polynomial(g, &[e1, e2, e3], &[])?;
    let psi_del_1 = minor_polynomial(g, &[e1], &[e2, e3])?;
    let psi_del_2 = minor_polynomial(g, &[e2], &[e1, e3])?;
    let psi_del_3 = minor_polynomial(g, &[e3], &[e1, e2])?;
    let psi_con_123 = minor_polynomial(g, &[], &[e1, e2, e3])?;
    let delta = halve(&psi_del_1.add(&psi_del_2).sub(&psi_del_3), "Δ numerator")?;
    let lhs = psi_del_123.mul(&psi_con_123).sub(&psi_del_1.mul(&psi_del_2));
    if lhs != delta.square().neg() {
        return Err(Error::Consistency(
            "Ψ_{Γ−123}Ψ_{Γ/123} − Ψ_{Γ−1/23}Ψ_{Γ−2/13} ≠ −Δ²".into(),
        ));
    }
    Ok(VertexDecomposition {
        edges,
        psi_del_123,
        psi_del_1,
        psi_del_2,
        psi_del_3,
        psi_con_123,
        delta,
    })
}

/// Minors for a 3-valent vertex with edges `1, 2, 3` where `2, 3, 4` form a
/// triangle.
#[derive(Clone, Debug, Serialize)]
pub struct TriangleDecomposition {
    pub edges: [EdgeId; 4],
    /// Ψ_{Γ−2/3}
    pub psi_del2_con3: SparsePoly,
    /// Ψ_{Γ−123}
    pub psi_del_123: SparsePoly,
    /// Ψ_{Γ−24/3}
    pub psi_del24_con3: SparsePoly,
    /// Ψ_{Γ−2/34}
    pub psi_del2_con34: SparsePoly,
    /// Ψ_{Γ−1234}
    pub psi_del_1234: SparsePoly,
    /// Ψ_{Γ−123/4}
    pub psi_del123_con4: SparsePoly,
    /// δ = (Ψ_{Γ−123/4} + Ψ_{Γ−24/13} − Ψ_{Γ−34/12}) / 2
    pub delta: SparsePoly,
}

pub fn triangle_decomposition(g: &Multigraph, edges: [EdgeId; 4]) -> Result<TriangleDecomposition> {
    let [e1, e2, e3, e4] = edges;
    let probe = g.structural_probe();
    let valid = probe
        .triangles_at_3valent
        .iter()
        .any(|(_, t)| t[0] == e1 && t[3] == e4 && ((t[1] == e2 && t[2] == e3) || (t[1] == e3 && t[2] == e2)));
    if !valid {
        return Err(Error::ConfigurationAbsent(format!(
            "edges {e1}, {e2}, {e3}, {e4} do not form a 3-valent vertex with a triangle"
        )));
    }
    let m = |d: &[EdgeId], c: &[EdgeId]| minor_polynomial(g, d, c);
    let psi_del123_con4 = m(&[e1, e2, e3], &[e4])?;
    let psi_del24_con13 = m(&[e2, e4], &[e1, e3])?;
    let psi_del34_con12 = m(&[e3, e4], &[e1, e2])?;
    let delta = halve(
        &psi_del123_con4.add(&psi_del24_con13).sub(&psi_del34_con12),
        "δ numerator",
    )?;
    let psi_del_1234 = m(&[e1, e2, e3, e4], &[])?;
    let psi_del2_con134 = m(&[e2], &[e1, e3, e4])?;
    let lhs = psi_del_1234
        .mul(&psi_del2_con134)
        .sub(&psi_del123_con4.mul(&psi_del24_con13));
    if lhs != delta.square().neg() {
        return Err(Error::Consistency(
            "Ψ_{Γ−1234}Ψ_{Γ−2/134} − Ψ_{Γ−123/4}Ψ_{Γ−24/13} ≠ −δ²".into(),
        ));
    }
    Ok(TriangleDecomposition {
        edges,
        psi_del2_con3: m(&[e2], &[e3])?,
        psi_del_123: m(&[e1, e2, e3], &[])?,
        psi_del24_con3: m(&[e2, e4], &[e3])?,
        psi_del2_con34: m(&[e2], &[e3, e4])?,
        psi_del_1234,
        psi_del123_con4,
        delta,
    })
}

/// The quartic `f` in `a, b, c, d` (variables `x1..x4`).
pub fn quartic_f() -> SparsePoly {
    const TERMS: [[u16; 4]; 12] = [
        [2, 2, 0, 0],
        [2, 1, 1, 0],
        [2, 1, 0, 1],
        [2, 0, 1, 1],
        [1, 2, 1, 0],
        [1, 1, 2, 0],
        [1, 1, 1, 1],
        [1, 1, 0, 2],
        [1, 0, 2, 1],
        [1, 0, 1, 2],
        [0, 1, 2, 1],
        [0, 0, 2, 2],
    ];
    SparsePoly::from_terms(
        TERMS
            .iter()
            .map(|exps| {
                let pairs = exps.iter().enumerate().map(|(i, &e)| (i as Var + 1, e)).collect();
                (Monomial::from_pairs(pairs), Int::ONE)
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> SparsePoly {
        s.parse().unwrap()
    }

    #[test]
    fn c3_polynomials() {
        let c3 = Multigraph::cycle(3);
        assert_eq!(graph_polynomial(&c3).unwrap().to_string(), "x1 + x2 + x3");
        assert_eq!(dual_polynomial(&c3).unwrap().to_string(), "x1*x2 + x1*x3 + x2*x3");
        let tree = Multigraph::new(3, &[(0, 1), (1, 2)]).unwrap();
        assert!(graph_polynomial(&tree).unwrap().is_one());
        assert_eq!(dual_polynomial(&tree).unwrap(), p("x1*x2"));
    }

    #[test]
    fn loops_and_disconnected_inputs() {
        let g = Multigraph::new(2, &[(0, 1), (0, 1), (1, 1)]).unwrap();
        assert_eq!(graph_polynomial(&g).unwrap(), p("x3*(x1 + x2)"));
        assert_eq!(dual_polynomial(&g).unwrap(), p("x1 + x2"));
        let two = Multigraph::new(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(matches!(graph_polynomial(&two), Err(Error::Disconnected)));
        let isolated = Multigraph::new(4, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(graph_polynomial(&isolated).unwrap(), p("x1 + x2 + x3"));
    }

    #[test]
    fn delta_pair_examples() {
        let c3 = Multigraph::cycle(3);
        let psi = graph_polynomial(&c3).unwrap();
        let dual = dual_polynomial(&c3).unwrap();
        assert!(delta_pair(&psi, 1, 2).unwrap().is_one());
        assert_eq!(delta_pair(&dual, 1, 2).unwrap(), p("x3"));
        assert!(matches!(
            delta_pair(&p("x1*x2 + x3*x4 + x1*x3"), 1, 2),
            Err(Error::NotSquare(_))
        ));
    }

    #[test]
    fn k4_vertex_decomposition() {
        let k4 = Multigraph::complete(4);
        let psi = graph_polynomial(&k4).unwrap();
        for (_, es) in k4.structural_probe().three_valent_vertices {
            let d = vertex_face_decomposition(&k4, es).unwrap();
            assert_eq!(d.reconstruct(), psi);
        }
        assert!(vertex_face_decomposition(&k4, [1, 2, 6]).is_err());
    }

    #[test]
    fn quartic_shape() {
        let f = quartic_f();
        assert_eq!(f.len(), 12);
        assert!(f.is_homogeneous());
        assert_eq!(f.degree(), 4);
        assert_eq!(
            f.coefficient(&Monomial::from_pairs(vec![(1, 1), (2, 1), (3, 1), (4, 1)])),
            Int::ONE
        );
    }
}
