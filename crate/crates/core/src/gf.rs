//! Finite fields F_{p^k}.
//!
//! Elements are encoded as `u32` integers `Σ cᵢ pⁱ`, where `cᵢ` is the
//! coefficient of `xⁱ` in the polynomial-basis representation. The prime
//! subfield is therefore `0..p`, with `0` and `1` the field's zero and one.
//!
//! Hot loops are generic over the [`Field`] trait and are instantiated for
//! each concrete representation through [`dispatch_field!`].

use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::int::Int;

pub type FieldElement = u32;

/// Field arithmetic on encoded elements.
pub trait Field: Sync + Send {
    fn p(&self) -> u32;
    fn q(&self) -> u32;
    fn add(&self, a: u32, b: u32) -> u32;
    fn sub(&self, a: u32, b: u32) -> u32;
    fn neg(&self, a: u32) -> u32;
    fn mul(&self, a: u32, b: u32) -> u32;
    /// Multiplicative inverse of a nonzero element.
    fn inv(&self, a: u32) -> u32;

    /// Image of an integer in the prime subfield.
    fn image_of(&self, z: &Int) -> u32 {
        z.rem_euclid_u64(self.p() as u64) as u32
    }

    fn pow(&self, a: u32, mut e: u64) -> u32 {
        let mut acc = 1;
        let mut b = a;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, b);
            }
            e >>= 1;
            if e > 0 {
                b = self.mul(b, b);
            }
        }
        acc
    }
}

/// Residue arithmetic modulo a prime.
#[derive(Debug)]
pub struct PrimeField {
    p: u32,
    /// `⌈2⁶⁴ / p⌉`, for reducing products below `2³²` without division.
    magic: u64,
    inverses: OnceLock<Vec<u32>>,
}

impl PrimeField {
    fn new(p: u32) -> Self {
        PrimeField {
            p,
            magic: (u64::MAX / p as u64).wrapping_add(1),
            inverses: OnceLock::new(),
        }
    }
}

impl Field for PrimeField {
    #[inline]
    fn p(&self) -> u32 {
        self.p
    }
    #[inline]
    fn q(&self) -> u32 {
        self.p
    }
    #[inline]
    fn add(&self, a: u32, b: u32) -> u32 {
        let s = a as u64 + b as u64;
        if s >= self.p as u64 {
            (s - self.p as u64) as u32
        } else {
            s as u32
        }
    }
    #[inline]
    fn sub(&self, a: u32, b: u32) -> u32 {
        if a >= b {
            a - b
        } else {
            (a as u64 + self.p as u64 - b as u64) as u32
        }
    }
    #[inline]
    fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }
    #[inline]
    fn mul(&self, a: u32, b: u32) -> u32 {
        let prod = a as u64 * b as u64;
        if self.p <= 1 << 16 {
            // Lemire's fastmod: exact for 32-bit dividends.
            let low = self.magic.wrapping_mul(prod);
            ((low as u128 * self.p as u128) >> 64) as u32
        } else {
            (prod % self.p as u64) as u32
        }
    }
    fn inv(&self, a: u32) -> u32 {
        debug_assert!(a != 0);
        if self.p <= 1 << 16 {
            let table = self.inverses.get_or_init(|| {
                let mut t = vec![0u32; self.p as usize];
                for x in 1..self.p {
                    if t[x as usize] == 0 {
                        let y = self.pow(x, self.p as u64 - 2);
                        t[x as usize] = y;
                        t[y as usize] = x;
                    }
                }
                t
            });
            table[a as usize]
        } else {
            self.pow(a, self.p as u64 - 2)
        }
    }
}

/// Extension field with precomputed addition and multiplication tables.
#[derive(Debug)]
pub struct TableField {
    p: u32,
    q: u32,
    add: Vec<u16>,
    mul: Vec<u16>,
    neg: Vec<u16>,
    inv: Vec<u16>,
}

impl Field for TableField {
    #[inline]
    fn p(&self) -> u32 {
        self.p
    }
    #[inline]
    fn q(&self) -> u32 {
        self.q
    }
    #[inline]
    fn add(&self, a: u32, b: u32) -> u32 {
        self.add[(a * self.q + b) as usize] as u32
    }
    #[inline]
    fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg[b as usize] as u32)
    }
    #[inline]
    fn neg(&self, a: u32) -> u32 {
        self.neg[a as usize] as u32
    }
    #[inline]
    fn mul(&self, a: u32, b: u32) -> u32 {
        self.mul[(a * self.q + b) as usize] as u32
    }
    fn inv(&self, a: u32) -> u32 {
        self.inv[a as usize] as u32
    }
}

/// Extension field using polynomial-basis arithmetic directly.
#[derive(Debug)]
pub struct PolyField {
    p: u32,
    k: u32,
    q: u32,
    modulus: Vec<u32>,
}

impl PolyField {
    fn decode(&self, mut a: u32) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.k as usize);
        for _ in 0..self.k {
            out.push(a % self.p);
            a /= self.p;
        }
        out
    }

    fn encode(&self, c: &[u32]) -> u32 {
        c.iter().rev().fold(0u32, |acc, &d| acc * self.p + d)
    }
}

impl Field for PolyField {
    fn p(&self) -> u32 {
        self.p
    }
    fn q(&self) -> u32 {
        self.q
    }
    fn add(&self, a: u32, b: u32) -> u32 {
        let (x, y) = (self.decode(a), self.decode(b));
        let s: Vec<u32> = x.iter().zip(&y).map(|(u, v)| (u + v) % self.p).collect();
        self.encode(&s)
    }
    fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }
    fn neg(&self, a: u32) -> u32 {
        let x = self.decode(a);
        let s: Vec<u32> = x.iter().map(|&u| (self.p - u) % self.p).collect();
        self.encode(&s)
    }
    fn mul(&self, a: u32, b: u32) -> u32 {
        let prod = poly_mulmod(&self.decode(a), &self.decode(b), &self.modulus, self.p);
        self.encode(&prod)
    }
    fn inv(&self, a: u32) -> u32 {
        self.pow(a, self.q as u64 - 2)
    }
}

/// Concrete arithmetic chosen for a field.
#[derive(Debug)]
pub enum Arith {
    Prime(PrimeField),
    Table(TableField),
    Poly(PolyField),
}

/// Runs `$body` with `$f` bound to the concrete [`Field`] of `$spec`.
#[macro_export]
macro_rules! dispatch_field {
    ($spec:expr, $f:ident => $body:expr) => {
        match $spec.arith() {
            $crate::gf::Arith::Prime($f) => $body,
            $crate::gf::Arith::Table($f) => $body,
            $crate::gf::Arith::Poly($f) => $body,
        }
    };
}

/// F_{p^k} with its defining modulus.
#[derive(Clone)]
pub struct FieldSpec {
    inner: Arc<SpecInner>,
}

struct SpecInner {
    p: u32,
    k: u32,
    q: u32,
    /// Monic modulus, coefficients from x⁰ up to x^k.
    modulus: Vec<u32>,
    arith: Arith,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Conic {
    /// a² + ab + b²
    Eisenstein,
    /// a² + b²
    Gauss,
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// `(p, k)` with `q = p^k`, if `q` is a prime power.
pub fn prime_power(q: u64) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|&d| q.is_multiple_of(d))?;
    let mut k = 0;
    let mut r = q;
    while r.is_multiple_of(p) {
        r /= p;
        k += 1;
    }
    (r == 1).then_some((p as u32, k))
}

fn trim(v: &mut Vec<u32>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn poly_mod(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = a.to_vec();
    trim(&mut r);
    let dm = m.len() - 1;
    let inv_lead = pow_mod(m[dm], p - 2, p);
    while r.len() > dm {
        let top = r.len() - 1;
        let f = (r[top] as u64 * inv_lead as u64 % p as u64) as u32;
        for (i, &mi) in m.iter().enumerate() {
            let idx = top - dm + i;
            r[idx] = ((r[idx] as u64 + (p - f) as u64 * mi as u64) % p as u64) as u32;
        }
        trim(&mut r);
    }
    r
}

fn poly_mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x as u64 * y as u64) % p as u64;
        }
    }
    out.into_iter().map(|x| x as u32).collect()
}

fn poly_mulmod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r = poly_mod(&poly_mul(a, b, p), m, p);
    r.resize(m.len() - 1, 0);
    r
}

fn pow_mod(b: u32, mut e: u32, p: u32) -> u32 {
    let mut acc = 1u64;
    let mut b = b as u64 % p as u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    acc as u32
}

fn poly_gcd_mod(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = poly_mod(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// Ben-Or irreducibility test: `f` of degree `k` is irreducible iff
/// `gcd(x^{p^i} − x, f) = 1` for `i = 1..=k/2`.
fn is_irreducible(f: &[u32], p: u32) -> bool {
    let k = f.len() - 1;
    let x = vec![0, 1];
    let mut xp = x.clone();
    for _ in 1..=k / 2 {
        let mut acc = vec![1u32];
        let mut base = xp.clone();
        let mut e = p;
        while e > 0 {
            if e & 1 == 1 {
                acc = poly_mulmod(&acc, &base, f, p);
            }
            base = poly_mulmod(&base, &base, f, p);
            e >>= 1;
        }
        xp = acc;
        let mut diff = xp.clone();
        diff.resize(diff.len().max(2), 0);
        diff[1] = (diff[1] + p - 1) % p;
        let g = poly_gcd_mod(f, &diff, p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

/// Lexicographically smallest monic irreducible polynomial of degree `k`,
/// reading coefficients from `x^{k−1}` down to `x⁰`.
fn smallest_irreducible(p: u32, k: u32) -> Vec<u32> {
    if k == 1 {
        return vec![0, 1];
    }
    let total = (p as u64).pow(k);
    for idx in 0..total {
        // idx in base p gives (c_{k-1}, ..., c_0) with c_0 least significant.
        let mut f = vec![0u32; k as usize + 1];
        let mut r = idx;
        for c in f.iter_mut().take(k as usize) {
            *c = (r % p as u64) as u32;
            r /= p as u64;
        }
        f[k as usize] = 1;
        if f[0] != 0 && is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

impl FieldSpec {
    /// F_{p^k} with the lexicographically smallest monic irreducible modulus.
    pub fn new(p: u32, k: u32) -> Result<FieldSpec> {
        if !is_prime(p as u64) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        if k == 0 {
            return Err(Error::InvalidInput("extension degree must be at least 1".into()));
        }
        if (p as u64)
            .checked_pow(k)
            .is_none_or(|q| q > 1 << 32 || q > u32::MAX as u64)
        {
            return Err(Error::InvalidInput(format!("{p}^{k} exceeds the supported field size")));
        }
        Self::with_modulus(p, k, smallest_irreducible(p, k))
    }

    /// F_q for a prime power `q`.
    pub fn of_order(q: u64) -> Result<FieldSpec> {
        let (p, k) = prime_power(q).ok_or_else(|| Error::InvalidInput(format!("{q} is not a prime power")))?;
        Self::new(p, k)
    }

    /// F_{p^k} defined by an explicit monic modulus (coefficients from x⁰).
    pub fn with_modulus(p: u32, k: u32, modulus: Vec<u32>) -> Result<FieldSpec> {
        if !is_prime(p as u64) {
            return Err(Error::InvalidInput(format!("{p} is not prime")));
        }
        if modulus.len() != k as usize + 1 || modulus[k as usize] != 1 || modulus.iter().any(|&c| c >= p) {
            return Err(Error::InvalidInput("modulus must be monic of degree k over F_p".into()));
        }
        if !is_irreducible(&modulus, p) {
            return Err(Error::InvalidInput("modulus is reducible".into()));
        }
        let q = (p as u64).pow(k) as u32;
        let arith = if k == 1 {
            Arith::Prime(PrimeField::new(p))
        } else if q <= 256 {
            Arith::Table(build_tables(p, k, q, &modulus))
        } else {
            Arith::Poly(PolyField {
                p,
                k,
                q,
                modulus: modulus.clone(),
            })
        };
        Ok(FieldSpec {
            inner: Arc::new(SpecInner {
                p,
                k,
                q,
                modulus,
                arith,
            }),
        })
    }

    pub fn p(&self) -> u32 {
        self.inner.p
    }

    pub fn k(&self) -> u32 {
        self.inner.k
    }

    pub fn q(&self) -> u32 {
        self.inner.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.inner.modulus
    }

    pub fn arith(&self) -> &Arith {
        &self.inner.arith
    }

    /// Polynomial-basis coefficients of an element, from x⁰ upward.
    pub fn coefficients(&self, mut a: FieldElement) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.k() as usize);
        for _ in 0..self.k() {
            out.push(a % self.p());
            a /= self.p();
        }
        out
    }

    pub fn from_coefficients(&self, c: &[u32]) -> FieldElement {
        c.iter().rev().fold(0u32, |acc, &d| acc * self.p() + d % self.p())
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        dispatch_field!(self, f => f.add(a, b))
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        dispatch_field!(self, f => f.sub(a, b))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        dispatch_field!(self, f => f.mul(a, b))
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        dispatch_field!(self, f => f.neg(a))
    }

    pub fn inv(&self, a: FieldElement) -> FieldElement {
        dispatch_field!(self, f => f.inv(a))
    }

    pub fn pow(&self, a: FieldElement, e: u64) -> FieldElement {
        dispatch_field!(self, f => f.pow(a, e))
    }

    pub fn image_of(&self, z: &Int) -> FieldElement {
        z.rem_euclid_u64(self.p() as u64) as u32
    }

    /// `Σ_{x∈F_q} x^k` with `0⁰ = 1`: `−1` when `0 < k ≡ 0 mod (q−1)`,
    /// otherwise `0`.
    pub fn power_sum(&self, k: u64) -> FieldElement {
        let q1 = self.q() as u64 - 1;
        if k > 0 && k.is_multiple_of(q1) {
            self.neg(1)
        } else {
            0
        }
    }

    /// Direct summation of `x^k` over the field.
    pub fn power_sum_naive(&self, k: u64) -> FieldElement {
        (0..self.q()).fold(0, |acc, x| {
            let t = if k == 0 { 1 } else { self.pow(x, k) };
            self.add(acc, t)
        })
    }

    /// 1 if the integer `z` is a unit in F_q (gcd(z, q) = 1), else 0.
    pub fn unit_indicator(&self, z: &Int) -> u32 {
        (z.rem_euclid_u64(self.p() as u64) != 0) as u32
    }

    /// Points of P¹(F_q) where the binary form does not vanish, by direct
    /// enumeration; checked against the closed form.
    pub fn conic_count(&self, which: Conic) -> Result<u64> {
        let value = |a: u32, b: u32| {
            let (aa, bb, ab) = (self.mul(a, a), self.mul(b, b), self.mul(a, b));
            match which {
                Conic::Eisenstein => self.add(self.add(aa, ab), bb),
                Conic::Gauss => self.add(aa, bb),
            }
        };
        let mut count = (value(0, 1) != 0) as u64;
        for a in 0..self.q() {
            count += (value(1, a) != 0) as u64;
        }
        let expected = conic_closed_form(which, self.q() as u64);
        if count != expected {
            return Err(Error::Consistency(format!(
                "conic {which:?} over F_{}: enumerated {count}, closed form {expected}",
                self.q()
            )));
        }
        Ok(count)
    }

    /// Every element, in encoding order.
    pub fn elements(&self) -> std::ops::Range<u32> {
        0..self.q()
    }
}

/// Closed form for the projective complement of a binary quadratic form.
pub fn conic_closed_form(which: Conic, q: u64) -> u64 {
    match which {
        Conic::Eisenstein => match q % 3 {
            0 => q,
            1 => q - 1,
            _ => q + 1,
        },
        Conic::Gauss => match q % 4 {
            1 => q - 1,
            3 => q + 1,
            _ => q,
        },
    }
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}[{}]", self.q(), render_modulus(self.modulus()))
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p() == other.p() && self.k() == other.k() && self.modulus() == other.modulus()
    }
}

/// Human-readable modulus such as `x^2 + x + 1`.
pub fn render_modulus(m: &[u32]) -> String {
    let mut parts = Vec::new();
    for (i, &c) in m.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let coeff = if c == 1 && i > 0 { String::new() } else { c.to_string() };
        let term = match i {
            0 => coeff,
            1 => format!("{coeff}x"),
            _ => format!("{coeff}x^{i}"),
        };
        parts.push(term);
    }
    parts.join(" + ")
}

fn build_tables(p: u32, k: u32, q: u32, modulus: &[u32]) -> TableField {
    let field = PolyField {
        p,
        k,
        q,
        modulus: modulus.to_vec(),
    };
    let n = q as usize;
    let mut add = vec![0u16; n * n];
    let mut mul = vec![0u16; n * n];
    for a in 0..q {
        for b in 0..q {
            add[(a * q + b) as usize] = field.add(a, b) as u16;
            mul[(a * q + b) as usize] = field.mul(a, b) as u16;
        }
    }
    let neg = (0..q).map(|a| field.neg(a) as u16).collect();
    let mut inv = vec![0u16; n];
    for a in 1..q {
        for b in 1..q {
            if mul[(a * q + b) as usize] == 1 {
                inv[a as usize] = b as u16;
                break;
            }
        }
    }
    TableField {
        p,
        q,
        add,
        mul,
        neg,
        inv,
    }
}

/// Prime powers in `2..=max`.
pub fn prime_powers_up_to(max: u64) -> Vec<u64> {
    (2..=max).filter(|&q| prime_power(q).is_some()).collect()
}

pub fn primes_up_to(max: u64) -> Vec<u64> {
    (2..=max).filter(|&n| is_prime(n)).collect()
}
