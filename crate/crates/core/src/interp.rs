//! Reconstruction of `N̄(q)` from counts at a few small fields, polynomiality
//! testing, and the zeta function of a polynomial-count variety.
//!
//! Coefficients are peeled one power of `q` at a time: given values
//! `d_k(i)` at moduli `m_i`, the next coefficient is a small common
//! representative `c_k` of `d_k(i) mod m_i`, and `d_{k+1}(i) = (d_k(i) − c_k) / m_i`.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf::{is_prime, prime_power};
use crate::int::Int;
use crate::qpoly::QPolynomial;

/// Highest power peeled when the degree is not supplied.
const MAX_DEGREE: usize = 64;
/// Search nodes visited before the candidate search gives up.
const MAX_NODES: usize = 1 << 18;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleSource {
    BruteForce,
    Reduction,
    #[default]
    Unspecified,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Sample {
    pub q: u64,
    pub nbar: Int,
    #[serde(default)]
    pub source: SampleSource,
}

impl Sample {
    pub fn new(q: u64, nbar: impl Into<Int>) -> Sample {
        Sample {
            q,
            nbar: nbar.into(),
            source: SampleSource::Unspecified,
        }
    }
}

/// Complement counts at distinct prime powers.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountSamples {
    samples: Vec<Sample>,
}

impl CountSamples {
    pub fn new(mut samples: Vec<Sample>) -> Result<CountSamples> {
        samples.sort_by_key(|s| s.q);
        for pair in samples.windows(2) {
            if pair[0].q == pair[1].q {
                return Err(Error::InvalidInput(format!("duplicate sample at q = {}", pair[0].q)));
            }
        }
        for s in &samples {
            if prime_power(s.q).is_none() {
                return Err(Error::InvalidInput(format!("{} is not a prime power", s.q)));
            }
            if s.nbar.is_negative() {
                return Err(Error::InvalidInput(format!("negative count at q = {}", s.q)));
            }
        }
        Ok(CountSamples { samples })
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (u64, i64)>) -> Result<CountSamples> {
        Self::new(pairs.into_iter().map(|(q, n)| Sample::new(q, n)).collect())
    }

    /// Parses lines `q N̄ [source]`; blank lines and `#` comments are skipped.
    pub fn parse(text: &str) -> Result<CountSamples> {
        let mut samples = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |what: &str| Error::InvalidInput(format!("sample line {}: {what}", lineno + 1));
            let mut fields = line.split_whitespace();
            let q = fields
                .next()
                .and_then(|f| f.parse::<u64>().ok())
                .ok_or_else(|| bad("expected a field size"))?;
            let nbar = fields
                .next()
                .and_then(|f| f.parse::<Int>().ok())
                .ok_or_else(|| bad("expected an integer count"))?;
            let source = match fields.next() {
                None => SampleSource::Unspecified,
                Some("brute_force") | Some("brute-force") => SampleSource::BruteForce,
                Some("reduction") => SampleSource::Reduction,
                Some(other) => return Err(bad(&format!("unknown source {other:?}"))),
            };
            samples.push(Sample { q, nbar, source });
        }
        Self::new(samples)
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Samples at `q ≡ r mod m`.
    pub fn residue_class(&self, m: u64, r: i64) -> CountSamples {
        let r = r.rem_euclid(m as i64) as u64;
        CountSamples {
            samples: self.samples.iter().filter(|s| s.q % m == r).cloned().collect(),
        }
    }

    /// Drops every sample whose field has characteristic in `primes`.
    pub fn without_characteristics(&self, primes: &[u64]) -> CountSamples {
        CountSamples {
            samples: self
                .samples
                .iter()
                .filter(|s| prime_power(s.q).is_none_or(|(p, _)| !primes.contains(&(p as u64))))
                .cloned()
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InterpOptions {
    /// Expected degree `n − 1`; when absent, peeling stops once every
    /// remainder vanishes.
    pub degree: Option<usize>,
    /// Representatives tried per coefficient.
    pub branching: usize,
    /// A further representative is tried only when its absolute value is at
    /// most `factor · max(|smallest|, 1)`.
    pub factor: f64,
    /// Requires `c_{n−2} = 0` and `c_{n−1} = 1`, the shape of a graph
    /// hypersurface complement count.
    pub graph_shape: bool,
    /// Characteristics whose samples are ignored.
    pub drop_primes: Vec<u64>,
}

impl Default for InterpOptions {
    fn default() -> Self {
        InterpOptions {
            degree: None,
            branching: 2,
            factor: 4.0,
            graph_shape: false,
            drop_primes: Vec::new(),
        }
    }
}

impl InterpOptions {
    pub fn with_degree(degree: usize) -> Self {
        InterpOptions {
            degree: Some(degree),
            ..Self::default()
        }
    }

    /// Degree `n − 1` with the graph-hypersurface shape constraints.
    pub fn graph(edges: usize) -> Self {
        InterpOptions {
            degree: Some(edges.saturating_sub(1)),
            graph_shape: true,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub q: u64,
    pub expected: Int,
    pub value: Int,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub polynomial: QPolynomial,
    pub checks: Vec<Check>,
    pub verified: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// Exactly one candidate survives every check.
    Polynomial,
    /// Several candidates survive; more samples are needed.
    Ambiguous,
    /// No polynomial of the requested form fits the samples.
    NotPolynomial,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Polynomial => "polynomial",
            Verdict::Ambiguous => "ambiguous",
            Verdict::NotPolynomial => "not a polynomial over these fields",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reconstruction {
    /// Field sizes used as CRT moduli.
    pub moduli: Vec<u64>,
    /// Field sizes used only to verify candidates.
    pub verification: Vec<u64>,
    /// Coefficients below this bound in absolute value are recovered uniquely.
    pub unique_bound: Int,
    pub candidates: Vec<Candidate>,
    pub verdict: Verdict,
    /// The branching search hit its node limit.
    pub truncated: bool,
}

impl Reconstruction {
    /// The polynomial when the verdict is [`Verdict::Polynomial`].
    pub fn unique(&self) -> Option<&QPolynomial> {
        match self.verdict {
            Verdict::Polynomial => self.candidates.iter().find(|c| c.verified).map(|c| &c.polynomial),
            _ => None,
        }
    }
}

/// Reconstructs `N̄` by CRT over the prime samples; prime-power samples only
/// verify the candidates.
pub fn crt_reconstruct(samples: &CountSamples, options: &InterpOptions) -> Result<Reconstruction> {
    let samples = samples.without_characteristics(&options.drop_primes);
    let (moduli, verification): (Vec<&Sample>, Vec<&Sample>) = samples.samples.iter().partition(|s| is_prime(s.q));
    if moduli.is_empty() {
        return Err(Error::InvalidInput(
            "reconstruction needs at least one prime sample".into(),
        ));
    }
    reconstruct(&moduli, &verification, options)
}

/// Reconstruction restricted to samples with `q ≡ r mod m`. Pairwise coprime
/// field sizes from the class serve as moduli, the rest verify.
pub fn residue_class_reconstruct(
    samples: &CountSamples,
    m: u64,
    r: i64,
    options: &InterpOptions,
) -> Result<Reconstruction> {
    if m == 0 {
        return Err(Error::InvalidInput("residue class modulus must be positive".into()));
    }
    let class = samples
        .without_characteristics(&options.drop_primes)
        .residue_class(m, r);
    if class.len() < 3 {
        return Err(Error::InvalidInput(format!(
            "residue class {r} mod {m} has {} samples; at least 3 are needed",
            class.len()
        )));
    }
    let mut moduli: Vec<&Sample> = Vec::new();
    let mut verification = Vec::new();
    for s in &class.samples {
        if moduli.iter().all(|t| t.q.gcd(&s.q) == 1) {
            moduli.push(s);
        } else {
            verification.push(s);
        }
    }
    reconstruct(&moduli, &verification, options)
}

fn reconstruct(moduli: &[&Sample], verification: &[&Sample], options: &InterpOptions) -> Result<Reconstruction> {
    if options.graph_shape && options.degree.is_none() {
        return Err(Error::InvalidInput(
            "graph-shaped reconstruction needs the degree".into(),
        ));
    }
    if options.branching == 0 {
        return Err(Error::InvalidInput("branching must be at least 1".into()));
    }
    let ms: Vec<BigInt> = moduli.iter().map(|s| BigInt::from(s.q)).collect();
    let product: BigInt = ms.iter().product();
    let values: Vec<BigInt> = moduli.iter().map(|s| s.nbar.to_big()).collect();

    let mut search = Search {
        moduli: &ms,
        product: &product,
        options,
        found: Vec::new(),
        nodes: 0,
    };
    let squares = values.iter().zip(&ms).all(|(v, m)| v.is_multiple_of(&(m * m)));
    let shifted = options.degree.is_none_or(|d| d >= 2);
    if squares && shifted {
        let d2 = values.iter().zip(&ms).map(|(v, m)| v / (m * m)).collect();
        search.descend(2, vec![BigInt::zero(), BigInt::zero()], d2);
    } else {
        search.descend(0, Vec::new(), values);
    }
    let truncated = search.nodes >= MAX_NODES;
    let found = search.found;

    let all: Vec<&Sample> = moduli.iter().chain(verification).copied().collect();
    let candidates: Vec<Candidate> = found
        .into_iter()
        .map(|coeffs| {
            let polynomial = QPolynomial::from_coeffs(coeffs.into_iter().map(Int::from).collect());
            let checks: Vec<Check> = all
                .iter()
                .map(|s| {
                    let value = polynomial.eval_u64(s.q);
                    Check {
                        q: s.q,
                        ok: value == s.nbar,
                        expected: s.nbar.clone(),
                        value,
                    }
                })
                .collect();
            let verified = checks.iter().all(|c| c.ok);
            Candidate {
                polynomial,
                checks,
                verified,
            }
        })
        .collect();
    let verdict = match candidates.iter().filter(|c| c.verified).count() {
        0 => Verdict::NotPolynomial,
        1 => Verdict::Polynomial,
        _ => Verdict::Ambiguous,
    };
    Ok(Reconstruction {
        moduli: moduli.iter().map(|s| s.q).collect(),
        verification: verification.iter().map(|s| s.q).collect(),
        unique_bound: Int::from(product / 2),
        candidates,
        verdict,
        truncated,
    })
}

struct Search<'a> {
    moduli: &'a [BigInt],
    product: &'a BigInt,
    options: &'a InterpOptions,
    found: Vec<Vec<BigInt>>,
    nodes: usize,
}

impl Search<'_> {
    fn descend(&mut self, k: usize, coeffs: Vec<BigInt>, d: Vec<BigInt>) {
        if self.nodes >= MAX_NODES {
            return;
        }
        self.nodes += 1;
        let all_zero = d.iter().all(Zero::is_zero);
        match self.options.degree {
            Some(deg) if k > deg => {
                if all_zero {
                    self.found.push(coeffs);
                }
                return;
            }
            None if all_zero => {
                self.found.push(coeffs);
                return;
            }
            None if k > MAX_DEGREE => return,
            _ => {}
        }
        for c in self.choices(k, &d) {
            let next = d.iter().zip(self.moduli).map(|(v, m)| (v - &c) / m).collect();
            let mut coeffs = coeffs.clone();
            coeffs.push(c);
            self.descend(k + 1, coeffs, next);
        }
    }

    fn choices(&self, k: usize, d: &[BigInt]) -> Vec<BigInt> {
        if let (true, Some(deg)) = (self.options.graph_shape, self.options.degree) {
            let forced = if k == deg {
                Some(BigInt::one())
            } else if k + 1 == deg {
                Some(BigInt::zero())
            } else {
                None
            };
            if let Some(f) = forced {
                let fits = d.iter().zip(self.moduli).all(|(v, m)| (v - &f).is_multiple_of(m));
                return if fits { vec![f] } else { Vec::new() };
            }
        }
        let residue = crt(d, self.moduli);
        let (low, high) = (residue.clone(), residue - self.product);
        let (first, second) = if low.abs() <= high.abs() {
            (low, high)
        } else {
            (high, low)
        };
        let mut out = vec![first];
        if self.options.branching >= 2 {
            let bound = out[0].abs().max(BigInt::one());
            let within = to_f64(&second.abs()) <= self.options.factor * to_f64(&bound);
            if within {
                out.push(second);
            }
        }
        out
    }
}

fn to_f64(x: &BigInt) -> f64 {
    num_traits::ToPrimitive::to_f64(x).unwrap_or(f64::INFINITY)
}

/// The residue in `[0, Π m_i)` congruent to every `d_i mod m_i`.
pub fn crt(values: &[BigInt], moduli: &[BigInt]) -> BigInt {
    let mut acc = BigInt::zero();
    let mut modulus = BigInt::one();
    for (v, m) in values.iter().zip(moduli) {
        let v = v.mod_floor(m);
        let e = modulus.extended_gcd(m);
        // acc + modulus·t ≡ v (mod m)
        let t = ((&v - &acc) * &e.x).mod_floor(m);
        acc += &modulus * t;
        modulus *= m;
        acc = acc.mod_floor(&modulus);
    }
    acc
}

/// `Z_q(t) = ∏_k (1 − q^k t)^{e_k}` with `e_k = c_k − 1`, for a complement
/// count `N̄ = Σ c_k q^k` of a variety in `P^{n−1}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZetaFunction {
    /// `(k, e_k)` for `k = 0..n`, zero exponents included.
    pub factors: Vec<(usize, i64)>,
}

/// The zeta function of the variety whose complement count is `poly`, in the
/// projective space of dimension `deg(poly)`.
pub fn zeta_function(poly: &QPolynomial) -> Result<ZetaFunction> {
    zeta_function_in(poly, poly.degree().map_or(1, |d| d + 1))
}

/// As [`zeta_function`] in `P^{n−1}`.
pub fn zeta_function_in(poly: &QPolynomial, n: usize) -> Result<ZetaFunction> {
    if poly.degree().is_some_and(|d| d >= n) {
        return Err(Error::InvalidInput(format!(
            "complement count of degree {} exceeds P^{}",
            poly.degree().unwrap_or(0),
            n.saturating_sub(1)
        )));
    }
    let factors = (0..n)
        .map(|k| {
            let c = poly
                .coeff(k)
                .to_i64()
                .ok_or_else(|| Error::InvalidInput(format!("coefficient of q^{k} is too large for a zeta exponent")))?;
            Ok((k, c - 1))
        })
        .collect::<Result<_>>()?;
    Ok(ZetaFunction { factors })
}

impl ZetaFunction {
    pub fn exponent(&self, k: usize) -> i64 {
        self.factors.iter().find(|(j, _)| *j == k).map_or(0, |(_, e)| *e)
    }

    /// Power series coefficients `z_0..=z_order` of `Z_q(t)` at a concrete `q`.
    pub fn series(&self, q: u64, order: usize) -> Vec<Int> {
        let mut z = vec![BigInt::zero(); order + 1];
        z[0] = BigInt::one();
        for &(k, e) in &self.factors {
            let a = BigInt::from(q).pow(k as u32);
            for _ in 0..e.unsigned_abs() {
                if e > 0 {
                    for m in (1..=order).rev() {
                        let prev = &z[m - 1] * &a;
                        z[m] -= prev;
                    }
                } else {
                    for m in 1..=order {
                        let prev = &z[m - 1] * &a;
                        z[m] += prev;
                    }
                }
            }
        }
        z.into_iter().map(Int::from).collect()
    }

    /// Point counts `N_1..=N_order` of the variety over `F_{q^m}`, recovered
    /// from the series through `log Z = Σ N_m t^m / m`.
    pub fn point_counts(&self, q: u64, order: usize) -> Vec<Int> {
        let z: Vec<BigInt> = self.series(q, order).iter().map(Int::to_big).collect();
        let mut n: Vec<BigInt> = Vec::with_capacity(order);
        for m in 1..=order {
            let mut value = BigInt::from(m) * &z[m];
            for j in 1..m {
                value -= &n[j - 1] * &z[m - j];
            }
            n.push(value);
        }
        n.into_iter().map(Int::from).collect()
    }

    /// Closed form `N_m = Σ_k (1 − c_k) q^{km}`.
    pub fn point_count_closed_form(&self, q: u64, m: u32) -> Int {
        let mut total = BigInt::zero();
        for &(k, e) in &self.factors {
            total -= BigInt::from(e) * BigInt::from(q).pow(k as u32 * m);
        }
        Int::from(total)
    }

    pub fn render(&self) -> String {
        let factor = |k: usize, e: i64| {
            let base = match k {
                0 => "(1 - t)".to_string(),
                1 => "(1 - q t)".to_string(),
                _ => format!("(1 - q^{k} t)"),
            };
            if e.abs() > 1 {
                format!("{base}^{}", e.abs())
            } else {
                base
            }
        };
        let num: String = self
            .factors
            .iter()
            .filter(|f| f.1 > 0)
            .map(|&(k, e)| factor(k, e))
            .collect();
        let den: Vec<String> = self
            .factors
            .iter()
            .filter(|f| f.1 < 0)
            .map(|&(k, e)| factor(k, e))
            .collect();
        let num = if num.is_empty() { "1".to_string() } else { num };
        match den.len() {
            0 => num,
            1 => format!("{num}/{}", den[0]),
            _ => format!("{num}/({})", den.concat()),
        }
    }
}

impl fmt::Display for ZetaFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}
