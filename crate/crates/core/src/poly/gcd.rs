//! Multivariate polynomial gcd over ℤ by recursive primitive
//! pseudo-remainder sequences.

use super::{SparsePoly, Var};
use crate::int::Int;

/// Greatest common divisor with positive leading coefficient
/// (`gcd(0, 0) = 0`).
pub fn poly_gcd(a: &SparsePoly, b: &SparsePoly) -> SparsePoly {
    gcd_within(a, b, &Limit::NONE).expect("unlimited")
}

/// Size bounds on the intermediate remainders of a gcd computation.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Limit {
    pub terms: usize,
    pub bits: u64,
}

impl Limit {
    pub const NONE: Limit = Limit {
        terms: usize::MAX,
        bits: u64::MAX,
    };

    fn exceeded_by(&self, p: &SparsePoly) -> bool {
        p.len() > self.terms || p.terms.iter().any(|(_, c)| c.bits() > self.bits)
    }
}

/// [`poly_gcd`], or `None` when an intermediate remainder outgrows `limit`.
pub(crate) fn gcd_within(a: &SparsePoly, b: &SparsePoly, limit: &Limit) -> Option<SparsePoly> {
    if a.is_zero() {
        return Some(b.normalize_sign());
    }
    if b.is_zero() {
        return Some(a.normalize_sign());
    }
    if a.is_constant() || b.is_constant() {
        return Some(SparsePoly::constant(a.content().gcd(&b.content())));
    }
    let ma = a.monomial_content();
    let mb = b.monomial_content();
    let mg = ma.gcd(&mb);
    let a = a.div_monomial(&ma).unwrap();
    let b = b.div_monomial(&mb).unwrap();
    let g = gcd_no_monomial(&a, &b, limit)?;
    Some(g.mul_monomial(&mg).normalize_sign())
}

fn gcd_no_monomial(a: &SparsePoly, b: &SparsePoly, limit: &Limit) -> Option<SparsePoly> {
    if a.is_constant() || b.is_constant() {
        return Some(SparsePoly::constant(a.content().gcd(&b.content())));
    }
    let va = a.vars();
    let vb = b.vars();
    let Some(v) = va
        .iter()
        .copied()
        .filter(|v| vb.binary_search(v).is_ok())
        .min_by_key(|&v| {
            let (da, db) = (a.degree_in(v), b.degree_in(v));
            (da.min(db), da.max(db), v)
        })
    else {
        return Some(SparsePoly::constant(a.content().gcd(&b.content())));
    };
    if a == b {
        return Some(a.normalize_sign());
    }
    if coprime_on_line(a, b) || coprime_by_evaluation(a, b, &va, &vb) {
        return Some(SparsePoly::constant(a.content().gcd(&b.content())));
    }
    let ca = content_within(a, v, limit)?;
    let cb = content_within(b, v, limit)?;
    let c = gcd_within(&ca, &cb, limit)?;
    let mut pa = a.div_exact(&ca).expect("content divides");
    let mut pb = b.div_exact(&cb).expect("content divides");
    let g = loop {
        if pa.degree_in(v) < pb.degree_in(v) {
            std::mem::swap(&mut pa, &mut pb);
        }
        let r = pseudo_remainder(&pa, &pb, v);
        if r.is_zero() {
            break pb;
        }
        if r.degree_in(v) == 0 {
            break SparsePoly::one();
        }
        if limit.exceeded_by(&r) {
            return None;
        }
        pa = pb;
        pb = primitive_within(&r, v, limit)?;
    };
    let g = primitive_within(&g, v, limit)?;
    Some(c.mul(&g).normalize_sign())
}

const P: u64 = 2_147_483_647;

fn eval_point(v: Var) -> u64 {
    let mut z = (v as u64).wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    (z ^ (z >> 31)) % P
}

fn pow_mod(mut b: u64, mut e: u64) -> u64 {
    let mut acc = 1u64;
    b %= P;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % P;
        }
        b = b * b % P;
        e >>= 1;
    }
    acc
}

/// Image of `p` in F_P[v] after substituting fixed values for the other
/// variables; index `j` holds the coefficient of `v^j`.
fn univariate_image(p: &SparsePoly, v: Var) -> Vec<u64> {
    let mut out = vec![0u64; p.degree_in(v) as usize + 1];
    for (m, c) in &p.terms {
        let mut t = c.rem_euclid_u64(P);
        let mut ev = 0;
        for &(w, e) in &m.0 {
            if w == v {
                ev = e as usize;
            } else {
                t = t * pow_mod(eval_point(w), e as u64) % P;
            }
        }
        out[ev] = (out[ev] + t) % P;
    }
    out
}

fn univariate_gcd_degree(mut a: Vec<u64>, mut b: Vec<u64>) -> usize {
    let trim = |x: &mut Vec<u64>| {
        while x.last() == Some(&0) {
            x.pop();
        }
    };
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        if a.len() < b.len() {
            std::mem::swap(&mut a, &mut b);
            continue;
        }
        let inv = pow_mod(*b.last().unwrap(), P - 2);
        while a.len() >= b.len() {
            let f = a.last().unwrap() * inv % P;
            let shift = a.len() - b.len();
            for (i, &bi) in b.iter().enumerate() {
                a[shift + i] = (a[shift + i] + P - f * bi % P) % P;
            }
            trim(&mut a);
            if a.is_empty() {
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

/// Image of `p` in F_P[t] along the line `x_w = α_w + β_w·t`.
fn line_image(p: &SparsePoly) -> Vec<u64> {
    let mut powers: std::collections::HashMap<(Var, u16), Vec<u64>> = std::collections::HashMap::new();
    let mut out = vec![0u64; p.degree() as usize + 1];
    for (m, c) in &p.terms {
        let mut t = vec![c.rem_euclid_u64(P)];
        for &(w, e) in &m.0 {
            let f = powers.entry((w, e)).or_insert_with(|| {
                let step = [eval_point(w), eval_point(w.wrapping_add(0x8000)) | 1];
                let mut acc = vec![1u64];
                for _ in 0..e {
                    acc = poly_mul_mod(&acc, &step);
                }
                acc
            });
            t = poly_mul_mod(&t, f);
        }
        for (i, x) in t.into_iter().enumerate() {
            out[i] = (out[i] + x) % P;
        }
    }
    out
}

fn poly_mul_mod(a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y % P) % P;
        }
    }
    out
}

/// Returns `true` when `a` and `b` certainly share no non-constant factor.
/// Restricted to a line on which the top-degree form of `a` does not vanish,
/// every common factor keeps its degree, so a trivial image gcd is a proof.
fn coprime_on_line(a: &SparsePoly, b: &SparsePoly) -> bool {
    let ia = line_image(a);
    if ia.last() == Some(&0) {
        return false;
    }
    univariate_gcd_degree(ia, line_image(b)) == 0
}

/// Returns `true` when the gcd of `a` and `b` is certainly free of every
/// variable. The modular image of the true gcd divides the image gcd as long
/// as the leading coefficient of `a` survives the evaluation, so a degree-0
/// image proves the true gcd has degree 0 in that variable.
fn coprime_by_evaluation(a: &SparsePoly, b: &SparsePoly, va: &[Var], vb: &[Var]) -> bool {
    for &v in va.iter().filter(|v| vb.binary_search(v).is_ok()) {
        let ia = univariate_image(a, v);
        if ia.len() as u16 - 1 != a.degree_in(v) || ia.last() == Some(&0) {
            return false;
        }
        let ib = univariate_image(b, v);
        if univariate_gcd_degree(ia, ib) > 0 {
            return false;
        }
    }
    true
}

/// Gcd of the coefficients of `p` viewed as a polynomial in `v`.
pub(crate) fn content_in(p: &SparsePoly, v: Var) -> SparsePoly {
    content_within(p, v, &Limit::NONE).expect("unlimited")
}

pub(crate) fn content_within(p: &SparsePoly, v: Var, limit: &Limit) -> Option<SparsePoly> {
    let coeffs = p.coefficients_in(v);
    let mut nonzero: Vec<&SparsePoly> = coeffs.iter().filter(|c| !c.is_zero()).collect();
    nonzero.sort_by_key(|c| c.len());
    let mut g = SparsePoly::zero();
    for c in nonzero {
        g = gcd_within(&g, c, limit)?;
        if g.is_one() {
            break;
        }
    }
    Some(g)
}

fn primitive_within(p: &SparsePoly, v: Var, limit: &Limit) -> Option<SparsePoly> {
    let c = content_within(p, v, limit)?;
    if c.is_zero() {
        return Some(SparsePoly::zero());
    }
    Some(p.div_exact(&c).expect("content divides").normalize_sign())
}

/// `lc(b)^k · a mod b` with respect to `v`.
fn pseudo_remainder(a: &SparsePoly, b: &SparsePoly, v: Var) -> SparsePoly {
    let db = b.degree_in(v);
    let bc = b.coefficients_in(v);
    let lc = bc[db as usize].clone();
    let mut r = a.clone();
    loop {
        let dr = r.degree_in(v);
        if r.is_zero() || dr < db {
            return r;
        }
        let lr = r.coefficients_in(v).pop().unwrap();
        let shift = SparsePoly::monomial(super::Monomial::var(v), Int::ONE).pow((dr - db) as u32);
        r = r.mul(&lc).sub(&lr.mul(&shift).mul(b));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> SparsePoly {
        s.parse().unwrap()
    }

    #[test]
    fn recovers_planted_common_factors() {
        let g = p("x1*x2 + x3 + 2");
        let a = g.mul(&p("x1 - x3^2"));
        let b = g.mul(&p("x2*x3 + 5"));
        assert_eq!(poly_gcd(&a, &b), g);
        assert_eq!(poly_gcd(&p("6*x1 + 6"), &p("4*x1^2 - 4")), p("2*x1 + 2"));
        assert_eq!(poly_gcd(&p("x1*x2"), &p("x1^2*x3")), p("x1"));
        assert!(poly_gcd(&p("x1 + x2"), &p("x1 - x2")).is_one());
        assert_eq!(poly_gcd(&p("x1"), &SparsePoly::zero()), p("x1"));
    }
}
