//! Single rewriting steps on a [`CountExpression`]: the product,
//! elimination and rescaling rules, the projective/affine swap, and the
//! one-polynomial, two-polynomial and bilinear shortcuts.

use super::engine::eliminate;
use super::{CountExpression, CountTerm};
use crate::count::{Ambient, PolySystem};
use crate::error::{Error, Result};
use crate::poly::graph_poly::delta_pair;
use crate::poly::{partial_factor, SparsePoly, Var};
use crate::qpoly::QPolynomial;

/// Result of a rule whose hypotheses may fail.
#[derive(Clone, Debug, PartialEq)]
pub enum RuleOutcome {
    Applied(CountExpression),
    /// The hypotheses do not hold; the expression is unchanged.
    Skipped(String),
}

impl RuleOutcome {
    pub fn applied(self) -> Option<CountExpression> {
        match self {
            RuleOutcome::Applied(e) => Some(e),
            RuleOutcome::Skipped(_) => None,
        }
    }
}

fn term_at(expr: &CountExpression, term: usize) -> Result<&CountTerm> {
    expr.terms
        .get(term)
        .ok_or_else(|| Error::InvalidInput(format!("no term {term} in an expression of {}", expr.terms.len())))
}

fn system(polys: Vec<SparsePoly>, ambient: Ambient, variables: Vec<Var>) -> PolySystem {
    PolySystem {
        polynomials: polys,
        ambient,
        variables,
    }
}

/// Replaces term `term` by `Σ cᵢ·N̄(Sᵢ)` scaled by the term's coefficient.
fn replace(expr: &CountExpression, term: usize, pieces: Vec<(QPolynomial, PolySystem)>) -> CountExpression {
    let coeff = expr.terms[term].coefficient.clone();
    let mut out = CountExpression::constant(expr.polynomial.clone());
    for (i, t) in expr.terms.iter().enumerate() {
        if i != term {
            out.push(t.coefficient.clone(), t.system.clone());
        }
    }
    for (c, s) in pieces {
        out.push(&coeff * &c, s);
    }
    out
}

/// Inclusion-exclusion over the factorization of polynomial `poly` of term
/// `term`: `N̄(AB, F) = N̄(A, F) + N̄(B, F) − N̄(A, B, F)` with `A` the first
/// distinct factor and `B` the product of the others. A non-unit content
/// counts as a constant factor; a polynomial with a single distinct factor
/// is replaced by that factor.
pub fn expand_product(expr: &CountExpression, term: usize, poly: usize) -> Result<CountExpression> {
    let t = term_at(expr, term)?;
    let f = t
        .system
        .polynomials
        .get(poly)
        .ok_or_else(|| Error::InvalidInput(format!("no polynomial {poly} in term {term}")))?;
    let fact = partial_factor(f);
    let mut factors: Vec<SparsePoly> = Vec::new();
    if !fact.content.is_unit() {
        factors.push(SparsePoly::constant(fact.content.abs()));
    }
    factors.extend(fact.factors.iter().map(|(g, _)| g.clone()));
    let mut others = t.system.polynomials.clone();
    others.remove(poly);
    let (ambient, vars) = (t.system.ambient, t.system.variables.clone());
    let with = |extra: &[&SparsePoly]| {
        let mut v = others.clone();
        v.extend(extra.iter().map(|p| (*p).clone()));
        system(v, ambient, vars.clone())
    };
    if factors.len() <= 1 {
        let g = factors.pop().unwrap_or_else(|| f.clone());
        return Ok(replace(expr, term, vec![(QPolynomial::one(), with(&[&g]))]));
    }
    let a = factors[0].clone();
    let b = factors[1..].iter().fold(SparsePoly::one(), |acc, g| acc.mul(g));
    Ok(replace(
        expr,
        term,
        vec![
            (QPolynomial::one(), with(&[&a])),
            (QPolynomial::one(), with(&[&b])),
            (QPolynomial::constant(-1), with(&[&a, &b])),
        ],
    ))
}

/// Elimination of `var` from term `term`, pivoting on the polynomial of
/// fewest terms among those of degree one in `var`: with `f₁ = g₁x − g₀`,
/// `N̄(f) = N̄(g₁, g₀, f₂…) + N̄(h̄₂…) − N̄(g₁, ĥ₂…)` where the last two
/// terms live in the ambient space without `x`.
pub fn eliminate_linear(expr: &CountExpression, term: usize, var: Var) -> Result<CountExpression> {
    let t = term_at(expr, term)?;
    let polys = &t.system.polynomials;
    let pivot = polys
        .iter()
        .enumerate()
        .filter(|(_, p)| p.degree_in(var) == 1)
        .min_by_key(|(_, p)| p.len())
        .map(|(i, _)| i)
        .ok_or_else(|| Error::InvalidInput(format!("no polynomial of term {term} is linear in x{var}")))?;
    if !t.system.variables.contains(&var) {
        return Err(Error::InvalidInput(format!("x{var} is not an ambient variable")));
    }
    let [t1, t2, t3] = eliminate(polys, &t.system.variables, var, pivot);
    let amb = t.system.ambient;
    Ok(replace(
        expr,
        term,
        vec![
            (QPolynomial::one(), system(t1.0, amb, t1.1)),
            (QPolynomial::one(), system(t2.0, amb, t2.1)),
            (QPolynomial::constant(-1), system(t3.0, amb, t3.1)),
        ],
    ))
}

/// The rescaling `xᵢ ↦ xᵢ·g/h` for `i ∈ vars` on an affine term:
/// `N̄(f) = N̄(gh, f) + N̄(f̃) − N̄(gh, f̃)`, where `f̃` is the transformed
/// system with denominators cleared and every exact factor of `g` and `h`
/// removed. Skipped when the term is projective, when `g` or `h` vanishes
/// or involves a rescaled variable.
pub fn rescale(
    expr: &CountExpression,
    term: usize,
    vars: &[Var],
    g: &SparsePoly,
    h: &SparsePoly,
) -> Result<RuleOutcome> {
    let t = term_at(expr, term)?;
    if t.system.ambient != Ambient::Affine {
        return Ok(RuleOutcome::Skipped(
            "rescaling needs an affine term; swap first".into(),
        ));
    }
    if g.is_zero() || h.is_zero() {
        return Ok(RuleOutcome::Skipped("g and h must be nonzero".into()));
    }
    if let Some(v) = vars.iter().find(|&&v| g.contains_var(v) || h.contains_var(v)) {
        return Ok(RuleOutcome::Skipped(format!(
            "g and h must not involve the rescaled x{v}"
        )));
    }
    if let Some(v) = vars.iter().find(|v| !t.system.variables.contains(v)) {
        return Ok(RuleOutcome::Skipped(format!("x{v} is not an ambient variable")));
    }
    if g.is_one() && h.is_one() {
        return Ok(RuleOutcome::Applied(expr.clone()));
    }
    let transformed: Vec<SparsePoly> = t
        .system
        .polynomials
        .iter()
        .map(|f| rescale_poly(f, vars, g, h))
        .collect();
    let gh = g.mul(h);
    let amb = t.system.ambient;
    let v = t.system.variables.clone();
    let mut with_gh = t.system.polynomials.clone();
    with_gh.push(gh.clone());
    let mut tilde_gh = transformed.clone();
    tilde_gh.push(gh);
    Ok(RuleOutcome::Applied(replace(
        expr,
        term,
        vec![
            (QPolynomial::one(), system(with_gh, amb, v.clone())),
            (QPolynomial::one(), system(transformed, amb, v.clone())),
            (QPolynomial::constant(-1), system(tilde_gh, amb, v)),
        ],
    )))
}

/// `f(x_I·g/h)·h^D` with exact factors of `g` and `h` divided out, where
/// `D` is the largest total degree of a term in the rescaled variables.
pub fn rescale_poly(f: &SparsePoly, vars: &[Var], g: &SparsePoly, h: &SparsePoly) -> SparsePoly {
    let weight = |m: &crate::poly::Monomial| vars.iter().map(|&v| m.exp(v) as u32).sum::<u32>();
    let top = f.terms().iter().map(|(m, _)| weight(m)).max().unwrap_or(0);
    let low = f.terms().iter().map(|(m, _)| weight(m)).min().unwrap_or(0);
    let mut out = SparsePoly::zero();
    for (m, c) in f.terms() {
        let e = weight(m);
        let piece = SparsePoly::monomial(m.clone(), c.clone())
            .mul(&g.pow(e - low))
            .mul(&h.pow(top - e));
        out = out.add(&piece);
    }
    for d in [g, h] {
        if d.is_constant() {
            continue;
        }
        while let Some(q) = out.div_exact(d) {
            if q.is_zero() {
                break;
            }
            out = q;
        }
    }
    out
}

/// The swap of a projective term to the chart `x = 1` plus the boundary
/// `x = 0`: `N̄(f)_{P^{n−1}} = N̄(f|ₓ₌₀)_{P^{n−2}} + N̄(f|ₓ₌₁)_{F_q^{n−1}}`.
pub fn swap_to_affine(expr: &CountExpression, term: usize, var: Var) -> Result<CountExpression> {
    let t = term_at(expr, term)?;
    let (boundary, chart) = crate::count::affine_projective_swap(&t.system, var)?;
    Ok(replace(
        expr,
        term,
        vec![(QPolynomial::one(), boundary), (QPolynomial::one(), chart)],
    ))
}

/// The closed-form shortcuts for one or two polynomials.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shortcut {
    /// `f = f₁x + f₀` of degree > 1: `N̄(f) = qN̄(f₁, f₀) − N̄(f₁)`.
    OneLinear(Var),
    /// `fᵢ = fᵢ₁x + fᵢ₀` both of degree > 1:
    /// `N̄(f₁, f₂) = qN̄(f₁₁, f₁₀, f₂₁, f₂₀) + N̄(f₁₁f₂₀ − f₁₀f₂₁) − N̄(f₁₁, f₂₁)`.
    TwoLinear(Var),
    /// `f = f₁₁x₁x₂ + f₁₀x₁ + f₀₁x₂ + f₀₀` of degree > 2 with
    /// `f₁₁f₀₀ − f₁₀f₀₁ = −Δ²`: the five-term bilinear formula.
    Bilinear(Var, Var),
}

fn projective_pieces(
    t: &CountTerm,
    drop: &[Var],
    pieces: Vec<(QPolynomial, Vec<SparsePoly>)>,
) -> Result<Vec<(QPolynomial, PolySystem)>> {
    let vars: Vec<Var> = t
        .system
        .variables
        .iter()
        .copied()
        .filter(|v| !drop.contains(v))
        .collect();
    pieces
        .into_iter()
        .map(|(c, polys)| Ok((c, PolySystem::projective(polys, vars.clone())?)))
        .collect()
}

/// Applies one shortcut to term `term` after checking its hypotheses.
pub fn cor_shortcut(expr: &CountExpression, term: usize, shortcut: Shortcut) -> Result<RuleOutcome> {
    let t = term_at(expr, term)?;
    if t.system.ambient != Ambient::Projective {
        return Ok(RuleOutcome::Skipped("shortcuts apply to projective terms".into()));
    }
    let polys = &t.system.polynomials;
    let q = QPolynomial::q();
    let split = |p: &SparsePoly, x: Var| {
        let mut c = p.coefficients_in(x);
        c.resize(2, SparsePoly::zero());
        (c[1].clone(), c[0].clone())
    };
    let pieces = match shortcut {
        Shortcut::OneLinear(x) => {
            let [f] = polys.as_slice() else {
                return Ok(RuleOutcome::Skipped("needs exactly one polynomial".into()));
            };
            if f.degree_in(x) != 1 || f.degree() <= 1 {
                return Ok(RuleOutcome::Skipped(format!(
                    "needs degree one in x{x} and total degree > 1"
                )));
            }
            let (f1, f0) = split(f, x);
            projective_pieces(
                t,
                &[x],
                vec![(q, vec![f1.clone(), f0]), (QPolynomial::constant(-1), vec![f1])],
            )?
        }
        Shortcut::TwoLinear(x) => {
            let [f1, f2] = polys.as_slice() else {
                return Ok(RuleOutcome::Skipped("needs exactly two polynomials".into()));
            };
            if f1.degree_in(x) > 1 || f2.degree_in(x) > 1 || f1.degree() <= 1 || f2.degree() <= 1 {
                return Ok(RuleOutcome::Skipped(format!(
                    "needs both polynomials linear in x{x} with degree > 1"
                )));
            }
            let (f11, f10) = split(f1, x);
            let (f21, f20) = split(f2, x);
            let middle = f11.mul(&f20).sub(&f10.mul(&f21));
            projective_pieces(
                t,
                &[x],
                vec![
                    (q, vec![f11.clone(), f10, f21.clone(), f20]),
                    (QPolynomial::one(), vec![middle]),
                    (QPolynomial::constant(-1), vec![f11, f21]),
                ],
            )?
        }
        Shortcut::Bilinear(x1, x2) => {
            let [f] = polys.as_slice() else {
                return Ok(RuleOutcome::Skipped("needs exactly one polynomial".into()));
            };
            if f.degree() <= 2 || f.degree_in(x1) != 1 || f.degree_in(x2) != 1 || x1 == x2 {
                return Ok(RuleOutcome::Skipped(format!(
                    "needs degree > 2 and degree one in x{x1} and x{x2}"
                )));
            }
            let Ok(delta) = delta_pair(f, x1, x2) else {
                return Ok(RuleOutcome::Skipped("f₁₀f₀₁ − f₁₁f₀₀ is not a square".into()));
            };
            let (hi, lo) = split(f, x1);
            let (f11, f10) = split(&hi, x2);
            let (f01, f00) = split(&lo, x2);
            let q2 = QPolynomial::q_pow(2);
            projective_pieces(
                t,
                &[x1, x2],
                vec![
                    (q2, vec![f11.clone(), f10.clone(), f01.clone(), f00]),
                    (q.clone(), vec![delta]),
                    (-&q, vec![f11.clone(), f01]),
                    (-&q, vec![f11.clone(), f10]),
                    (QPolynomial::one(), vec![f11]),
                ],
            )?
        }
    };
    Ok(RuleOutcome::Applied(replace(expr, term, pieces)))
}

/// One pass applying, to every term, the first shortcut whose hypotheses
/// hold: the bilinear formula, then the two-polynomial and one-polynomial
/// forms, trying variables in increasing order.
pub fn cor_shortcuts(expr: &CountExpression) -> Result<CountExpression> {
    let mut out = CountExpression::constant(expr.polynomial.clone());
    for t in &expr.terms {
        let single = CountExpression {
            polynomial: QPolynomial::zero(),
            terms: vec![t.clone()],
        };
        let vars = t.system.variables.clone();
        let mut candidates: Vec<Shortcut> = Vec::new();
        for (i, &a) in vars.iter().enumerate() {
            for &b in &vars[i + 1..] {
                candidates.push(Shortcut::Bilinear(a, b));
            }
        }
        candidates.extend(vars.iter().map(|&x| Shortcut::TwoLinear(x)));
        candidates.extend(vars.iter().map(|&x| Shortcut::OneLinear(x)));
        let mut replaced = None;
        for s in candidates {
            if let RuleOutcome::Applied(e) = cor_shortcut(&single, 0, s)? {
                replaced = Some(e);
                break;
            }
        }
        match replaced {
            Some(e) => out.extend(&e),
            None => out.push(t.coefficient.clone(), t.system.clone()),
        }
    }
    Ok(out)
}
