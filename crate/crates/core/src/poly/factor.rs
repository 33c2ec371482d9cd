//! Partial factorization over ℤ.
//!
//! Content and monomial factors are split off first. A polynomial linear in
//! some variable `v`, say `a·v + b`, factors as `gcd(a, b)` times a primitive
//! part that is irreducible, so such polynomials are factored completely. For
//! the rest, repeated and variable-free factors are separated with
//! `gcd(p, ∂p/∂v)` and perfect squares are extracted; whatever remains is
//! returned unsplit.

use serde::Serialize;

use super::gcd::{content_in, content_within, gcd_within, Limit};
use super::{poly_sqrt, SparsePoly};
use crate::int::Int;

/// `p = content · ∏ fᵢ^eᵢ` with every `fᵢ` primitive, non-constant and with
/// positive leading coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Factorization {
    pub content: Int,
    pub factors: Vec<(SparsePoly, u32)>,
}

impl Factorization {
    pub fn expand(&self) -> SparsePoly {
        let mut acc = SparsePoly::constant(self.content.clone());
        for (f, e) in &self.factors {
            acc = acc.mul(&f.pow(*e));
        }
        acc
    }

    /// Distinct non-constant factors, ignoring multiplicity.
    pub fn radical(&self) -> Vec<SparsePoly> {
        self.factors.iter().map(|(f, _)| f.clone()).collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.content.is_unit() && self.factors.len() == 1 && self.factors[0].1 == 1
    }
}

pub fn partial_factor(p: &SparsePoly) -> Factorization {
    if p.is_constant() {
        return Factorization {
            content: p.constant_value().unwrap(),
            factors: Vec::new(),
        };
    }
    let mut out: Vec<(SparsePoly, u32)> = Vec::new();
    let mono = p.monomial_content();
    for &(v, e) in &mono.0 {
        out.push((SparsePoly::var(v), e as u32));
    }
    let rest = p.div_monomial(&mono).unwrap().primitive_part();
    split(&rest, 1, &mut out);

    let mut merged: Vec<(SparsePoly, u32)> = Vec::new();
    for (f, e) in out {
        match merged.iter_mut().find(|(g, _)| *g == f) {
            Some(entry) => entry.1 += e,
            None => merged.push((f, e)),
        }
    }
    merged.sort_by(|a, b| {
        a.0.degree()
            .cmp(&b.0.degree())
            .then_with(|| a.0.len().cmp(&b.0.len()))
            .then_with(|| a.0.to_string().cmp(&b.0.to_string()))
    });
    let mut product = SparsePoly::one();
    for (f, e) in &merged {
        product = product.mul(&f.pow(*e));
    }
    let content = p
        .leading_coefficient()
        .div_exact(&product.leading_coefficient())
        .expect("primitive factors divide the leading coefficient");
    let fact = Factorization {
        content,
        factors: merged,
    };
    debug_assert_eq!(fact.expand(), *p);
    fact
}

/// Gcds that outgrow this bound are abandoned and the polynomial is left
/// unsplit.
const LIMIT: Limit = Limit { terms: 4000, bits: 256 };

/// Appends the factors of a primitive, monomial-free polynomial.
fn split(p: &SparsePoly, mult: u32, out: &mut Vec<(SparsePoly, u32)>) {
    if p.is_constant() {
        return;
    }
    let p = p.primitive_part();
    let vars = p.vars();
    if p.degree() == 1 {
        out.push((p, mult));
        return;
    }
    if let Some(&v) = vars.iter().find(|&&v| p.degree_in(v) == 1) {
        let cs = p.coefficients_in(v);
        let g = gcd_within(&cs[1], &cs[0], &LIMIT).unwrap_or_else(SparsePoly::one);
        if g.is_constant() {
            out.push((p, mult));
        } else {
            let h = p.div_exact(&g).expect("gcd of coefficients divides");
            split(&g, mult, out);
            split(&h, mult, out);
        }
        return;
    }
    if let Some(r) = poly_sqrt(&p) {
        split(&r, mult * 2, out);
        return;
    }
    if let Some((g, h)) = split_quadratic(&p) {
        split(&g, mult, out);
        split(&h, mult, out);
        return;
    }
    if let Some((g, h)) = split_by_derivative(&p) {
        split(&g, mult, out);
        split(&h, mult, out);
        return;
    }
    out.push((p, mult));
}

/// Splits `p = A·v² + B·v + C` when the discriminant `B² − 4AC` is a square
/// `D²`: then `4A·p = (2Av + B − D)(2Av + B + D)` and the primitive parts of
/// the two linear factors multiply to `p`.
fn split_quadratic(p: &SparsePoly) -> Option<(SparsePoly, SparsePoly)> {
    for v in p.vars() {
        if p.degree_in(v) != 2 {
            continue;
        }
        let cs = p.coefficients_in(v);
        let disc = cs[1].square().sub(&cs[2].mul(&cs[0]).scale(&Int::from(4)));
        let Some(d) = poly_sqrt(&disc) else { continue };
        let two_a_v = cs[2].scale(&Int::from(2)).mul(&SparsePoly::var(v));
        let f1 = two_a_v.add(&cs[1]).sub(&d);
        let g = f1.div_exact(&content_in(&f1, v))?.primitive_part();
        let h = p.div_exact(&g)?;
        if !h.is_constant() {
            return Some((g, h));
        }
    }
    None
}

/// Finds a proper split `p = g·h` from `gcd(p, ∂p/∂v)` for some variable:
/// first the factors free of `v` (the content in `v`), then repeated factors.
fn split_by_derivative(p: &SparsePoly) -> Option<(SparsePoly, SparsePoly)> {
    let vars = p.vars();
    for &v in &vars {
        let Some(c) = content_within(p, v, &LIMIT) else {
            continue;
        };
        if !c.is_constant() {
            let h = p.div_exact(&c)?;
            return Some((c, h));
        }
    }
    for v in vars {
        let Some(g) = gcd_within(p, &p.derivative(v), &LIMIT) else {
            continue;
        };
        if !g.is_constant() && g.degree() < p.degree() {
            let h = p.div_exact(&g)?;
            return Some((g, h));
        }
    }
    None
}
