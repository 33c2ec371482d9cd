//! Sparse multivariate polynomials over the integers.
//!
//! Variables are global `u16` ids (edge labels for graph polynomials).
//! Terms are kept sorted in graded-lexicographic order, largest first, with
//! `x1 > x2 > …`, and zero coefficients are never stored, so structural
//! equality is polynomial equality.

mod factor;
mod gcd;
pub mod graph_poly;
mod parse;
mod sqrt;

use std::cmp::Ordering;
use std::fmt;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::int::Int;

pub use factor::{partial_factor, Factorization};
pub use gcd::poly_gcd;
pub use parse::{parse_poly, variable_id, ParsePolyError};
pub use sqrt::poly_sqrt;

pub type Var = u16;

/// A power product, stored as `(variable, exponent)` pairs sorted by variable
/// with no zero exponents.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Monomial(pub SmallVec<[(Var, u16); 6]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn var(v: Var) -> Self {
        let mut s = SmallVec::new();
        s.push((v, 1));
        Monomial(s)
    }

    pub fn from_pairs(mut pairs: Vec<(Var, u16)>) -> Self {
        pairs.retain(|&(_, e)| e > 0);
        pairs.sort_unstable();
        let mut out: SmallVec<[(Var, u16); 6]> = SmallVec::new();
        for (v, e) in pairs {
            match out.last_mut() {
                Some(last) if last.0 == v => last.1 += e,
                _ => out.push((v, e)),
            }
        }
        Monomial(out)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&(_, e)| e as u32).sum()
    }

    pub fn exp(&self, v: Var) -> u16 {
        match self.0.binary_search_by_key(&v, |&(w, _)| w) {
            Ok(i) => self.0[i].1,
            Err(_) => 0,
        }
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// `self / other` if `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = SmallVec::with_capacity(self.0.len());
        let mut j = 0;
        for &(v, e) in &self.0 {
            if j < other.0.len() && other.0[j].0 < v {
                return None;
            }
            if j < other.0.len() && other.0[j].0 == v {
                let f = other.0[j].1;
                j += 1;
                match e.cmp(&f) {
                    Ordering::Less => return None,
                    Ordering::Equal => {}
                    Ordering::Greater => out.push((v, e - f)),
                }
            } else {
                out.push((v, e));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    pub fn gcd(&self, other: &Monomial) -> Monomial {
        let mut out = SmallVec::new();
        for &(v, e) in &self.0 {
            let f = other.exp(v);
            if f > 0 {
                out.push((v, e.min(f)));
            }
        }
        Monomial(out)
    }

    /// Removes `v` from the monomial, returning its former exponent.
    pub fn without(&self, v: Var) -> (Monomial, u16) {
        let mut out = self.0.clone();
        match out.binary_search_by_key(&v, |&(w, _)| w) {
            Ok(i) => {
                let e = out.remove(i).1;
                (Monomial(out), e)
            }
            Err(_) => (Monomial(out), 0),
        }
    }

    pub fn with_power(&self, v: Var, e: u16) -> Monomial {
        if e == 0 {
            return self.clone();
        }
        self.mul(&Monomial(SmallVec::from_slice(&[(v, e)])))
    }

    pub fn rename(&self, map: &impl Fn(Var) -> Var) -> Monomial {
        Monomial::from_pairs(self.0.iter().map(|&(v, e)| (map(v), e)).collect())
    }

    /// Graded lexicographic order with `x1 > x2 > …`.
    pub fn grlex_cmp(&self, other: &Monomial) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.lex_cmp(other))
    }

    pub fn lex_cmp(&self, other: &Monomial) -> Ordering {
        let (a, b) = (&self.0, &other.0);
        for i in 0..a.len().max(b.len()) {
            match (a.get(i), b.get(i)) {
                (None, None) => return Ordering::Equal,
                (None, Some(_)) => return Ordering::Less,
                (Some(_), None) => return Ordering::Greater,
                (Some(&(va, ea)), Some(&(vb, eb))) => {
                    if va != vb {
                        return vb.cmp(&va);
                    }
                    if ea != eb {
                        return ea.cmp(&eb);
                    }
                }
            }
        }
        Ordering::Equal
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct SparsePoly {
    terms: Vec<(Monomial, Int)>,
}

impl SparsePoly {
    pub fn zero() -> Self {
        SparsePoly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Int::ONE)
    }

    pub fn constant(c: impl Into<Int>) -> Self {
        let c = c.into();
        if c.is_zero() {
            return Self::zero();
        }
        SparsePoly {
            terms: vec![(Monomial::one(), c)],
        }
    }

    pub fn var(v: Var) -> Self {
        SparsePoly {
            terms: vec![(Monomial::var(v), Int::ONE)],
        }
    }

    pub fn monomial(m: Monomial, c: impl Into<Int>) -> Self {
        Self::from_terms(vec![(m, c.into())])
    }

    /// Builds a polynomial from arbitrary terms, merging duplicates.
    pub fn from_terms(terms: Vec<(Monomial, Int)>) -> Self {
        let mut map: FxHashMap<Monomial, Int> = FxHashMap::default();
        for (m, c) in terms {
            if c.is_zero() {
                continue;
            }
            map.entry(m).and_modify(|acc| *acc += &c).or_insert(c);
        }
        Self::from_map(map)
    }

    fn from_map(map: FxHashMap<Monomial, Int>) -> Self {
        let mut terms: Vec<(Monomial, Int)> = map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(|a, b| b.0.grlex_cmp(&a.0));
        SparsePoly { terms }
    }

    /// Builds from terms already sorted in descending grlex order with
    /// distinct monomials and nonzero coefficients.
    fn from_sorted(terms: Vec<(Monomial, Int)>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].0.grlex_cmp(&w[1].0) == Ordering::Greater));
        debug_assert!(terms.iter().all(|(_, c)| !c.is_zero()));
        SparsePoly { terms }
    }

    pub fn terms(&self) -> &[(Monomial, Int)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    /// No terms, which is the zero polynomial.
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms[0].0.is_one())
    }

    /// The value of a constant polynomial.
    pub fn constant_value(&self) -> Option<Int> {
        if self.terms.is_empty() {
            Some(Int::ZERO)
        } else if self.is_constant() {
            Some(self.terms[0].1.clone())
        } else {
            None
        }
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].0.is_one() && self.terms[0].1.is_one()
    }

    pub fn leading(&self) -> Option<&(Monomial, Int)> {
        self.terms.first()
    }

    pub fn leading_coefficient(&self) -> Int {
        self.terms.first().map(|t| t.1.clone()).unwrap_or(Int::ZERO)
    }

    /// Total degree; the zero polynomial has degree 0.
    pub fn degree(&self) -> u32 {
        self.terms.first().map(|t| t.0.degree()).unwrap_or(0)
    }

    pub fn degree_in(&self, v: Var) -> u16 {
        self.terms.iter().map(|(m, _)| m.exp(v)).max().unwrap_or(0)
    }

    pub fn contains_var(&self, v: Var) -> bool {
        self.terms.iter().any(|(m, _)| m.exp(v) > 0)
    }

    /// Sorted list of the variables that occur.
    pub fn vars(&self) -> Vec<Var> {
        let mut vs: Vec<Var> = self
            .terms
            .iter()
            .flat_map(|(m, _)| m.0.iter().map(|&(v, _)| v))
            .collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    pub fn is_homogeneous(&self) -> bool {
        let d = self.degree();
        self.terms.iter().all(|(m, _)| m.degree() == d)
    }

    pub fn is_multilinear(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.0.iter().all(|&(_, e)| e <= 1))
    }

    /// Non-negative gcd of all coefficients (0 for the zero polynomial).
    pub fn content(&self) -> Int {
        let mut g = Int::ZERO;
        for (_, c) in &self.terms {
            g = g.gcd(c);
            if g.is_one() {
                break;
            }
        }
        g
    }

    /// The largest monomial dividing every term.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.iter();
        let Some((first, _)) = it.next() else {
            return Monomial::one();
        };
        let mut g = first.clone();
        for (m, _) in it {
            if g.is_one() {
                break;
            }
            g = g.gcd(m);
        }
        g
    }

    pub fn neg(&self) -> SparsePoly {
        SparsePoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn scale(&self, k: &Int) -> SparsePoly {
        if k.is_zero() {
            return Self::zero();
        }
        SparsePoly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * k)).collect(),
        }
    }

    /// Divides every coefficient by `k`, which must divide each exactly.
    pub fn div_scalar(&self, k: &Int) -> Option<SparsePoly> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            terms.push((m.clone(), c.div_exact(k)?));
        }
        Some(SparsePoly { terms })
    }

    pub fn mul_monomial(&self, m: &Monomial) -> SparsePoly {
        SparsePoly {
            terms: self.terms.iter().map(|(t, c)| (t.mul(m), c.clone())).collect(),
        }
    }

    pub fn div_monomial(&self, m: &Monomial) -> Option<SparsePoly> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (t, c) in &self.terms {
            terms.push((t.div(m)?, c.clone()));
        }
        Some(SparsePoly { terms })
    }

    /// Makes the leading coefficient positive.
    pub fn normalize_sign(&self) -> SparsePoly {
        if self.leading_coefficient().is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// Divides by the content and fixes the sign of the leading coefficient.
    pub fn primitive_part(&self) -> SparsePoly {
        let c = self.content();
        if c.is_zero() {
            return Self::zero();
        }
        let c = if self.leading_coefficient().is_negative() {
            -c
        } else {
            c
        };
        self.div_scalar(&c).expect("content divides every coefficient")
    }

    fn merge(&self, other: &SparsePoly, negate_other: bool) -> SparsePoly {
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        let take_b = |c: &Int| if negate_other { -c } else { c.clone() };
        while i < a.len() && j < b.len() {
            match a[i].0.grlex_cmp(&b[j].0) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push((b[j].0.clone(), take_b(&b[j].1)));
                    j += 1;
                }
                Ordering::Equal => {
                    let c = if negate_other {
                        &a[i].1 - &b[j].1
                    } else {
                        &a[i].1 + &b[j].1
                    };
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend(a[i..].iter().cloned());
        out.extend(b[j..].iter().map(|(m, c)| (m.clone(), take_b(c))));
        SparsePoly::from_sorted(out)
    }

    pub fn add(&self, other: &SparsePoly) -> SparsePoly {
        self.merge(other, false)
    }

    pub fn sub(&self, other: &SparsePoly) -> SparsePoly {
        self.merge(other, true)
    }

    pub fn mul(&self, other: &SparsePoly) -> SparsePoly {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if self.is_constant() {
            return other.scale(&self.terms[0].1);
        }
        if other.is_constant() {
            return self.scale(&other.terms[0].1);
        }
        let mut map: FxHashMap<Monomial, Int> =
            FxHashMap::with_capacity_and_hasher(self.len() * other.len(), Default::default());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let c = ca * cb;
                map.entry(ma.mul(mb)).and_modify(|acc| *acc += &c).or_insert(c);
            }
        }
        Self::from_map(map)
    }

    pub fn square(&self) -> SparsePoly {
        self.mul(self)
    }

    pub fn pow(&self, e: u32) -> SparsePoly {
        let mut acc = SparsePoly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        acc
    }

    /// Exact division: `Some(q)` with `q * d == self`, or `None`.
    pub fn div_exact(&self, d: &SparsePoly) -> Option<SparsePoly> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Self::zero());
        }
        if d.is_constant() {
            return self.div_scalar(&d.terms[0].1);
        }
        if d.len() == 1 {
            let (dm, dc) = &d.terms[0];
            let mut terms = Vec::with_capacity(self.len());
            for (m, c) in &self.terms {
                terms.push((m.div(dm)?, c.div_exact(dc)?));
            }
            return Some(SparsePoly { terms });
        }
        if self.degree() < d.degree() {
            return None;
        }
        for v in d.vars() {
            if self.degree_in(v) < d.degree_in(v) {
                return None;
            }
        }
        let (lm, lc) = d.terms[0].clone();
        let mut rem = self.clone();
        let mut quot: Vec<(Monomial, Int)> = Vec::new();
        while let Some((rm, rc)) = rem.terms.first().cloned() {
            let qm = rm.div(&lm)?;
            let qc = rc.div_exact(&lc)?;
            let step = SparsePoly::monomial(qm.clone(), qc.clone());
            rem = rem.sub(&d.mul(&step));
            quot.push((qm, qc));
        }
        Some(SparsePoly::from_sorted(quot))
    }

    /// Coefficients of `self` as a polynomial in `v`: entry `j` multiplies `v^j`.
    pub fn coefficients_in(&self, v: Var) -> Vec<SparsePoly> {
        let d = self.degree_in(v) as usize;
        let mut buckets: Vec<Vec<(Monomial, Int)>> = vec![Vec::new(); d + 1];
        for (m, c) in &self.terms {
            let (rest, e) = m.without(v);
            buckets[e as usize].push((rest, c.clone()));
        }
        buckets
            .into_iter()
            .map(|mut ts| {
                ts.sort_by(|a, b| b.0.grlex_cmp(&a.0));
                SparsePoly::from_sorted(ts)
            })
            .collect()
    }

    /// Inverse of [`coefficients_in`](Self::coefficients_in).
    pub fn from_coefficients_in(v: Var, coeffs: &[SparsePoly]) -> SparsePoly {
        let mut terms = Vec::new();
        for (j, c) in coeffs.iter().enumerate() {
            for (m, k) in &c.terms {
                terms.push((m.with_power(v, j as u16), k.clone()));
            }
        }
        SparsePoly::from_terms(terms)
    }

    /// Substitutes the polynomial `value` for `v`.
    pub fn substitute(&self, v: Var, value: &SparsePoly) -> SparsePoly {
        if !self.contains_var(v) {
            return self.clone();
        }
        let coeffs = self.coefficients_in(v);
        let mut acc = SparsePoly::zero();
        for c in coeffs.iter().rev() {
            acc = acc.mul(value).add(c);
        }
        acc
    }

    pub fn substitute_int(&self, v: Var, value: &Int) -> SparsePoly {
        self.substitute(v, &SparsePoly::constant(value.clone()))
    }

    /// Applies a variable renaming; the map must be injective on `vars()`.
    pub fn rename(&self, map: impl Fn(Var) -> Var) -> SparsePoly {
        SparsePoly::from_terms(self.terms.iter().map(|(m, c)| (m.rename(&map), c.clone())).collect())
    }

    pub fn derivative(&self, v: Var) -> SparsePoly {
        let mut terms = Vec::new();
        for (m, c) in &self.terms {
            let e = m.exp(v);
            if e > 0 {
                let (rest, _) = m.without(v);
                terms.push((rest.with_power(v, e - 1), c * &Int::from(e as i64)));
            }
        }
        SparsePoly::from_terms(terms)
    }

    /// Evaluates at integer values; `values(v)` supplies each variable.
    pub fn eval_int(&self, values: impl Fn(Var) -> Int) -> Int {
        let mut acc = Int::ZERO;
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for &(v, e) in &m.0 {
                t = &t * &values(v).pow(e as u32);
            }
            acc += &t;
        }
        acc
    }

    /// A total order: by degree, then number of terms, then term by term.
    /// Order-preserving variable renamings preserve it.
    pub fn canonical_cmp(&self, other: &SparsePoly) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.terms.len().cmp(&other.terms.len()))
            .then_with(|| {
                for ((ma, ca), (mb, cb)) in self.terms.iter().zip(&other.terms) {
                    let o = ma.grlex_cmp(mb).then_with(|| ca.cmp(cb));
                    if o != Ordering::Equal {
                        return o;
                    }
                }
                Ordering::Equal
            })
    }

    /// Coefficient of the given monomial.
    pub fn coefficient(&self, m: &Monomial) -> Int {
        self.terms
            .binary_search_by(|(t, _)| m.grlex_cmp(t))
            .map(|i| self.terms[i].1.clone())
            .unwrap_or(Int::ZERO)
    }

    /// Term list for JSON export: `[[[[var, exp], ...], coeff], ...]`.
    pub fn to_term_list(&self) -> Vec<(Vec<(Var, u16)>, Int)> {
        self.terms.iter().map(|(m, c)| (m.0.to_vec(), c.clone())).collect()
    }

    pub fn from_term_list(list: Vec<(Vec<(Var, u16)>, Int)>) -> SparsePoly {
        SparsePoly::from_terms(list.into_iter().map(|(m, c)| (Monomial::from_pairs(m), c)).collect())
    }
}

impl Serialize for SparsePoly {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_term_list().serialize(s)
    }
}

impl<'de> Deserialize<'de> for SparsePoly {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(SparsePoly::from_term_list(Vec::deserialize(d)?))
    }
}

fn write_monomial(f: &mut fmt::Formatter<'_>, m: &Monomial) -> fmt::Result {
    for (i, &(v, e)) in m.0.iter().enumerate() {
        if i > 0 {
            f.write_str("*")?;
        }
        write!(f, "x{v}")?;
        if e > 1 {
            write!(f, "^{e}")?;
        }
    }
    Ok(())
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if i == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            if m.is_one() {
                write!(f, "{abs}")?;
            } else {
                if !abs.is_one() {
                    write!(f, "{abs}*")?;
                }
                write_monomial(f, m)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl std::str::FromStr for SparsePoly {
    type Err = ParsePolyError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_poly(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> SparsePoly {
        s.parse().unwrap()
    }

    #[test]
    fn grlex_rendering() {
        assert_eq!(p("x3 + x1 + x2").to_string(), "x1 + x2 + x3");
        assert_eq!(p("x2*x3 + x1*x3 + x1*x2").to_string(), "x1*x2 + x1*x3 + x2*x3");
        assert_eq!(p("x2^2 - 3*x1 + 1").to_string(), "x2^2 - 3*x1 + 1");
        assert_eq!(p("-x1").to_string(), "-x1");
    }

    #[test]
    fn arithmetic_and_division() {
        let a = p("x1 + x2");
        let b = p("x1 - x2 + 3");
        let prod = a.mul(&b);
        assert_eq!(prod.div_exact(&a), Some(b.clone()));
        assert_eq!(prod.div_exact(&b), Some(a.clone()));
        assert_eq!(p("x1^2 + x2").div_exact(&a), None);
        assert_eq!(a.pow(3), a.mul(&a).mul(&a));
        assert!(a.add(&a.neg()).is_zero());
    }

    #[test]
    fn coefficients_round_trip() {
        let f = p("x1^2*x2 + 3*x1*x3 - x2 + 7");
        let cs = f.coefficients_in(1);
        assert_eq!(cs.len(), 3);
        assert_eq!(cs[0], p("-x2 + 7"));
        assert_eq!(cs[1], p("3*x3"));
        assert_eq!(cs[2], p("x2"));
        assert_eq!(SparsePoly::from_coefficients_in(1, &cs), f);
        assert_eq!(f.substitute(1, &p("x2")), p("x2^3 + 3*x2*x3 - x2 + 7"));
    }

    #[test]
    fn content_and_predicates() {
        let f = p("6*x1*x2 - 4*x1^2");
        assert_eq!(f.content(), Int::from(2));
        assert_eq!(f.monomial_content(), Monomial::var(1));
        assert_eq!(f.primitive_part().to_string(), "2*x1^2 - 3*x1*x2");
        assert!(f.is_homogeneous());
        assert!(!f.is_multilinear());
        assert_eq!(f.derivative(1), p("6*x2 - 8*x1"));
    }
}
