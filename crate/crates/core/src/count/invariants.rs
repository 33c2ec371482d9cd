//! Arithmetic invariants read off from point counts: the c₂ residue of a
//! graph and the congruence scan for the quartic surface `f`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{run_count, CountOptions, PolySystem};
use crate::error::{Error, Result};
use crate::gf::{prime_power, primes_up_to, FieldSpec};
use crate::graph::Multigraph;
use crate::int::Int;
use crate::poly::graph_poly::{graph_polynomial, quartic_f, vertex_face_decomposition};
use crate::poly::{SparsePoly, Var};

/// `c₂ ≡ N̄(Ψ_Γ)/q² mod q`, computed by up to two independent routes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct C2Report {
    pub q: u64,
    /// Residue in `0..q`.
    pub c2: u64,
    /// From the full count `N̄(Ψ_Γ)`.
    pub full_count: Option<u64>,
    /// From `N̄(Ψ_{Γ−123}, Δ)` over `P^{n−4}` at a 3-valent vertex.
    pub vertex_route: Option<u64>,
}

/// c₂ of `g` over `field`. Both routes run when they fit in the budget and
/// must agree; a full count not divisible by `q²` is a consistency error.
pub fn c2_invariant(g: &Multigraph, field: &FieldSpec, options: CountOptions) -> Result<C2Report> {
    let q = field.q() as u64;
    let qi = Int::from(q);
    let psi = graph_polynomial(g)?;
    let all: Vec<Var> = g.edge_ids();
    let full = PolySystem::projective(vec![psi], all.clone())?;
    let mut budget_error = None;
    let full_count = match run_count(&full, field, options) {
        Ok(record) => {
            let nbar = record.nbar.expect("complete run");
            let q2 = &qi * &qi;
            let quotient = nbar
                .div_exact(&q2)
                .ok_or_else(|| Error::Consistency(format!("N̄ = {nbar} over F_{q} is not divisible by q²")))?;
            Some(quotient.rem_euclid_u64(q))
        }
        Err(e @ Error::Budget { .. }) => {
            budget_error = Some(e);
            None
        }
        Err(e) => return Err(e),
    };
    let probe = g.structural_probe();
    let vertex_route = match probe.three_valent_vertices.first() {
        Some(&(_, edges)) if probe.is_simple && probe.vertex_connectivity_ge_2 => {
            let dec = vertex_face_decomposition(g, edges)?;
            let rest: Vec<Var> = all.iter().copied().filter(|e| !edges.contains(e)).collect();
            let sys = PolySystem::projective(vec![dec.psi_del_123, dec.delta], rest)?;
            match run_count(&sys, field, options) {
                Ok(record) => Some(record.nbar.expect("complete run").rem_euclid_u64(q)),
                Err(e @ Error::Budget { .. }) => {
                    budget_error.get_or_insert(e);
                    None
                }
                Err(e) => return Err(e),
            }
        }
        _ => None,
    };
    let c2 = match (full_count, vertex_route) {
        (Some(a), Some(b)) if a != b => {
            return Err(Error::Consistency(format!(
                "c₂ routes disagree over F_{q}: full count gives {a}, vertex route gives {b}"
            )))
        }
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => return Err(budget_error.expect("a route was refused")),
    };
    Ok(C2Report {
        q,
        c2,
        full_count,
        vertex_route,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Result4Row {
    pub p: u64,
    /// `N̄(f)` over `P³(F_p)`.
    pub nbar: u64,
    pub nbar_mod_p: u64,
    /// The `k ∈ 0..=⌊√(p/7)⌋` with `28k² ≡ N̄ mod p`, if any.
    pub k: Option<u64>,
    /// `7k²/p`.
    pub ratio: f64,
    /// `k = 0` exactly when `p = 7` or `p ≡ 3, 5, 6 mod 7`.
    pub pattern_holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Result4Scan {
    pub rows: Vec<Result4Row>,
    /// Rows where no `k` exists or the vanishing pattern fails.
    pub falsifications: Vec<Result4Row>,
    pub max_ratio: f64,
    pub max_ratio_at: u64,
}

/// Whether `−7` is a non-square mod `p` or `p = 7`, i.e. `k(p)` must vanish.
pub fn k_vanishes(p: u64) -> bool {
    p == 7 || matches!(p % 7, 3 | 5 | 6)
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// `v[i] = Δⁱg(0)` for `i = 0..=k` from the values `g(0..=k)` of a
/// polynomial of degree at most `k`, reduced mod `p`.
fn forward_differences(mut v: Vec<u64>, p: u64) -> Vec<u64> {
    let k = v.len();
    for level in 1..k {
        for i in (level..k).rev() {
            v[i] = (v[i] + p - v[i - 1]) % p;
        }
    }
    v
}

/// Advances a difference table from `g(b)` to `g(b + 1)`.
fn advance(v: &mut [u64], p: u64) {
    for i in 0..v.len() - 1 {
        let s = v[i] + v[i + 1];
        v[i] = if s >= p { s - p } else { s };
    }
}

/// `(exponent of x2, exponent of x3, coefficient mod p)` per term.
fn compile_mod(g: &SparsePoly, p: u64) -> Vec<(u32, u32, u64)> {
    g.terms()
        .iter()
        .map(|(m, c)| (m.exp(2) as u32, m.exp(3) as u32, c.rem_euclid_u64(p)))
        .collect()
}

fn eval_mod(terms: &[(u32, u32, u64)], b: u64, c: u64, p: u64) -> u64 {
    let pow = |mut x: u64, mut e: u32| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * x % p;
            }
            x = x * x % p;
            e >>= 1;
        }
        acc
    };
    terms
        .iter()
        .fold(0, |acc, &(eb, ec, k)| (acc + k * pow(b, eb) % p * pow(c, ec)) % p)
}

/// `N̄(f)` over `P³(F_p)`, `p` an odd prime, for a homogeneous `f` in
/// `x1..x4` of degree at most two in `x4`. On the chart `x1 = 1` the roots
/// in `x4` are counted from the discriminant, whose values along `x2` are
/// stepped by finite differences; the hyperplane `x1 = 0` is enumerated.
pub fn complement_quadratic_in_last(f: &SparsePoly, p: u64) -> Result<u64> {
    if p < 3 || prime_power(p) != Some((p as u32, 1)) {
        return Err(Error::InvalidInput(format!("{p} is not an odd prime")));
    }
    if f.vars().iter().any(|&v| !(1..=4).contains(&v)) || f.degree_in(4) > 2 || !f.is_homogeneous() {
        return Err(Error::InvalidInput(
            "expected a homogeneous polynomial in x1..x4 of degree at most two in x4".into(),
        ));
    }
    let chart = f.substitute_int(1, &Int::ONE);
    let mut parts = chart.coefficients_in(4);
    parts.resize(3, SparsePoly::zero());
    let disc = parts[1].square().sub(&parts[0].mul(&parts[2]).scale(&Int::from(4)));
    let [c0, c1, c2, dc] = [&parts[0], &parts[1], &parts[2], &disc].map(|g| compile_mod(g, p));
    let (ka, kd) = (parts[2].degree_in(2) as u64, disc.degree_in(2) as u64);
    let mut chi = vec![-1i8; p as usize];
    chi[0] = 0;
    for x in 1..p {
        chi[(x * x % p) as usize] = 1;
    }
    let mut zeros: u128 = 0;
    for c in 0..p {
        let mut a = forward_differences((0..=ka).map(|b| eval_mod(&c2, b, c, p)).collect(), p);
        let mut d = forward_differences((0..=kd).map(|b| eval_mod(&dc, b, c, p)).collect(), p);
        for b in 0..p {
            zeros += if a[0] != 0 {
                (1 + chi[d[0] as usize]) as u128
            } else if eval_mod(&c1, b, c, p) != 0 {
                1
            } else if eval_mod(&c0, b, c, p) == 0 {
                p as u128
            } else {
                0
            };
            advance(&mut a, p);
            advance(&mut d, p);
        }
    }
    let plane = (p * p + p + 1) as u128;
    let boundary = f.substitute_int(1, &Int::ZERO);
    let boundary_zeros = if boundary.is_zero() {
        plane
    } else {
        let system = PolySystem::projective(vec![boundary], vec![2, 3, 4])?;
        let field = FieldSpec::new(p as u32, 1)?;
        let nbar = run_count(&system, &field, CountOptions::default())?
            .nbar
            .expect("complete run");
        plane - nbar.to_i64().expect("fits") as u128
    };
    let space = plane * p as u128 + 1;
    Ok((space - zeros - boundary_zeros) as u64)
}

/// Counts `N̄(f)` over `P³(F_p)` for every odd prime `p ≤ p_max` and solves
/// `N̄ ≡ 28k² mod p`.
pub fn result4_scan(p_max: u64) -> Result<Result4Scan> {
    if p_max < 3 {
        return Err(Error::InvalidInput("p_max must be at least 3".into()));
    }
    let f = quartic_f();
    let primes: Vec<u64> = primes_up_to(p_max).into_iter().filter(|&p| p > 2).collect();
    let rows = primes
        .par_iter()
        .map(|&p| -> Result<Result4Row> {
            let nbar = complement_quadratic_in_last(&f, p)?;
            let residue = nbar % p;
            let k = (0..=isqrt(p / 7)).find(|&k| (28 * k * k) % p == residue);
            let pattern_holds = k.is_some_and(|k| (k == 0) == k_vanishes(p));
            Ok(Result4Row {
                p,
                nbar,
                nbar_mod_p: residue,
                k,
                ratio: k.map_or(0.0, |k| 7.0 * (k * k) as f64 / p as f64),
                pattern_holds,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let falsifications = rows.iter().filter(|r| !r.pattern_holds).cloned().collect();
    let (max_ratio, max_ratio_at) = rows.iter().fold(
        (0.0, 0),
        |(m, at), r| if r.ratio > m { (r.ratio, r.p) } else { (m, at) },
    );
    Ok(Result4Scan {
        rows,
        falsifications,
        max_ratio,
        max_ratio_at,
    })
}
