//! Polynomials in `q` with integer coefficients, the value space of point
//! counts that are polynomial in the field size.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::int::Int;

/// `Σ cₖ qᵏ`, stored densely by power with no trailing zeros.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct QPolynomial {
    coeffs: Vec<Int>,
}

impl QPolynomial {
    pub fn zero() -> Self {
        QPolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(1)
    }

    pub fn constant(c: impl Into<Int>) -> Self {
        Self::from_coeffs(vec![c.into()])
    }

    /// `c·qᵏ`.
    pub fn monomial(c: impl Into<Int>, k: usize) -> Self {
        let mut coeffs = vec![Int::ZERO; k + 1];
        coeffs[k] = c.into();
        Self::from_coeffs(coeffs)
    }

    /// `q`.
    pub fn q() -> Self {
        Self::monomial(1, 1)
    }

    /// `qᵏ`.
    pub fn q_pow(k: usize) -> Self {
        Self::monomial(1, k)
    }

    /// `[n]_q = 1 + q + … + q^{n−1}`, the number of points of `P^{n−1}`.
    pub fn q_integer(n: usize) -> Self {
        Self::from_coeffs(vec![Int::ONE; n])
    }

    /// Coefficients `c₀, c₁, …` by increasing power.
    pub fn from_coeffs(mut coeffs: Vec<Int>) -> Self {
        while coeffs.last().is_some_and(Int::is_zero) {
            coeffs.pop();
        }
        QPolynomial { coeffs }
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (Int, usize)>) -> Self {
        let mut coeffs = Vec::new();
        for (c, k) in pairs {
            if coeffs.len() <= k {
                coeffs.resize(k + 1, Int::ZERO);
            }
            coeffs[k] += &c;
        }
        Self::from_coeffs(coeffs)
    }

    pub fn coeffs(&self) -> &[Int] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Int {
        self.coeffs.get(k).cloned().unwrap_or(Int::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Nonzero `(coefficient, power)` pairs by decreasing power.
    pub fn to_pairs(&self) -> Vec<(Int, usize)> {
        self.coeffs
            .iter()
            .enumerate()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| (c.clone(), k))
            .collect()
    }

    pub fn eval(&self, q: &Int) -> Int {
        self.coeffs.iter().rev().fold(Int::ZERO, |acc, c| &(&acc * q) + c)
    }

    pub fn eval_u64(&self, q: u64) -> Int {
        self.eval(&Int::from(q))
    }

    pub fn scale(&self, k: &Int) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Multiplication by `qᵏ`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = vec![Int::ZERO; k];
        coeffs.extend(self.coeffs.iter().cloned());
        QPolynomial { coeffs }
    }

    /// Renders with the variable name `var`, highest power first.
    pub fn render(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, (c, k)) in self.to_pairs().into_iter().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            match (i, neg) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            let body = match k {
                0 => String::new(),
                1 => var.to_string(),
                _ => format!("{var}^{k}"),
            };
            if k == 0 {
                out.push_str(&abs.to_string());
            } else if abs.is_one() {
                out.push_str(&body);
            } else {
                out.push_str(&format!("{abs}*{body}"));
            }
        }
        out
    }

    /// Grothendieck-class rendering with `L` for the class of the affine line.
    pub fn render_lefschetz(&self) -> String {
        self.render("L")
    }
}

impl Add<&QPolynomial> for &QPolynomial {
    type Output = QPolynomial;
    fn add(self, rhs: &QPolynomial) -> QPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        QPolynomial::from_coeffs((0..n).map(|k| &self.coeff(k) + &rhs.coeff(k)).collect())
    }
}

impl Sub<&QPolynomial> for &QPolynomial {
    type Output = QPolynomial;
    fn sub(self, rhs: &QPolynomial) -> QPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        QPolynomial::from_coeffs((0..n).map(|k| &self.coeff(k) - &rhs.coeff(k)).collect())
    }
}

impl Mul<&QPolynomial> for &QPolynomial {
    type Output = QPolynomial;
    fn mul(self, rhs: &QPolynomial) -> QPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return QPolynomial::zero();
        }
        let mut coeffs = vec![Int::ZERO; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += &(a * b);
            }
        }
        QPolynomial::from_coeffs(coeffs)
    }
}

impl Neg for &QPolynomial {
    type Output = QPolynomial;
    fn neg(self) -> QPolynomial {
        QPolynomial::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<QPolynomial> for QPolynomial {
            type Output = QPolynomial;
            fn $m(self, rhs: QPolynomial) -> QPolynomial {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&QPolynomial> for QPolynomial {
            type Output = QPolynomial;
            fn $m(self, rhs: &QPolynomial) -> QPolynomial {
                (&self).$m(rhs)
            }
        }
    )*};
}

owned_ops!(Add add, Sub sub, Mul mul);

impl Neg for QPolynomial {
    type Output = QPolynomial;
    fn neg(self) -> QPolynomial {
        -&self
    }
}

impl fmt::Display for QPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("q"))
    }
}

impl fmt::Debug for QPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Serialized as `[[coeff, power], ...]` by decreasing power.
impl Serialize for QPolynomial {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_pairs().serialize(s)
    }
}

impl<'de> Deserialize<'de> for QPolynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let pairs: Vec<(Int, usize)> = Vec::deserialize(d)?;
        Ok(QPolynomial::from_pairs(pairs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_evaluation() {
        let q = QPolynomial::q();
        let p = &(&q * &q) - &q;
        assert_eq!(p.to_string(), "q^2 - q");
        assert_eq!(p.eval_u64(5), Int::from(20));
        assert_eq!(QPolynomial::q_integer(3).eval_u64(2), Int::from(7));
        assert_eq!(QPolynomial::q_integer(0), QPolynomial::zero());
        assert_eq!((&p - &p).degree(), None);
        assert_eq!(p.shift(2).to_string(), "q^4 - q^3");
        assert_eq!((-&p).render_lefschetz(), "-L^2 + L");
        assert_eq!(QPolynomial::constant(-3).to_string(), "-3");
    }

    #[test]
    fn json_pairs() {
        let p = QPolynomial::from_pairs([(Int::from(1), 2), (Int::from(-2), 0)]);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, "[[1,2],[-2,0]]");
        let back: QPolynomial = serde_json::from_str(&s).unwrap();
        assert_eq!(back, p);
    }
}
