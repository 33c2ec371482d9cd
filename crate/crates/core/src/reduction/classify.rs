//! Closed-form recognition of small residual systems: integer constants,
//! the two binary quadratic forms `a² + ab + b²` and `a² + b²`, and the
//! quartic surface `f`.

use itertools::Itertools;
use serde::{Deserialize, Serialize};

use crate::count::{run_count, Ambient, CountOptions, PolySystem};
use crate::error::Result;
use crate::gf::{conic_closed_form, Conic, FieldSpec};
use crate::int::Int;
use crate::poly::graph_poly::quartic_f;
use crate::poly::{Monomial, SparsePoly, Var};

/// What is known about a residual symbol `N̄(system)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ResidualKind {
    /// `N̄(z)` for an integer `z`: 1 if `gcd(z, q) = 1`, else 0.
    UnitIndicator { value: Int },
    /// A binary quadratic form in `P¹` with a closed-form count.
    Conic { conic: Conic },
    /// The quartic surface `f` in `P³`, up to renaming of variables.
    Quartic,
    /// No closed form is known.
    Irreducible,
}

impl ResidualKind {
    /// Whether the symbol has a closed form in `q` and the characteristic.
    pub fn is_closed_form(&self) -> bool {
        matches!(self, ResidualKind::UnitIndicator { .. } | ResidualKind::Conic { .. })
    }
}

/// Recognizes residuals with fewer than five ambient variables.
pub fn classify(system: &PolySystem) -> ResidualKind {
    if system.vars() >= 5 || system.ambient != Ambient::Projective {
        return ResidualKind::Irreducible;
    }
    let polys: Vec<&SparsePoly> = system.polynomials.iter().filter(|p| !p.is_zero()).collect();
    if polys.len() == 1 && polys[0].is_constant() && system.vars() == 1 {
        return ResidualKind::UnitIndicator {
            value: polys[0].constant_value().expect("constant"),
        };
    }
    if polys.len() != 1 {
        return ResidualKind::Irreducible;
    }
    let f = polys[0];
    let vars = f.vars();
    if system.vars() == 2 && vars.len() == 2 {
        if let Some(conic) = binary_conic(f, vars[0], vars[1]) {
            return ResidualKind::Conic { conic };
        }
    }
    if system.vars() == 4 && vars.len() == 4 && is_quartic(f, &vars) {
        return ResidualKind::Quartic;
    }
    ResidualKind::Irreducible
}

fn binary_conic(f: &SparsePoly, a: Var, b: Var) -> Option<Conic> {
    if f.len() > 3 || f.degree() != 2 || !f.is_homogeneous() {
        return None;
    }
    let coeff = |pairs: Vec<(Var, u16)>| f.coefficient(&Monomial::from_pairs(pairs));
    let (aa, ab, bb) = (coeff(vec![(a, 2)]), coeff(vec![(a, 1), (b, 1)]), coeff(vec![(b, 2)]));
    if !aa.is_one() || !bb.is_one() {
        return None;
    }
    if ab.is_zero() {
        Some(Conic::Gauss)
    } else if ab.is_unit() {
        Some(Conic::Eisenstein)
    } else {
        None
    }
}

fn is_quartic(f: &SparsePoly, vars: &[Var]) -> bool {
    let target = quartic_f();
    if f.len() != target.len() || f.degree() != 4 {
        return false;
    }
    vars.iter().copied().permutations(4).any(|perm| {
        let renamed = f.rename(|v| 1 + perm.iter().position(|&w| w == v).expect("in support") as Var);
        renamed == target
    })
}

/// `N̄(system)` over `field`, from the closed form when there is one and by
/// enumeration otherwise.
pub fn residual_count(system: &PolySystem, kind: &ResidualKind, field: &FieldSpec) -> Result<Int> {
    match kind {
        ResidualKind::UnitIndicator { value } => Ok(Int::from(field.unit_indicator(value) as u64)),
        ResidualKind::Conic { conic } => Ok(Int::from(conic_closed_form(*conic, field.q() as u64))),
        _ => Ok(run_count(system, field, CountOptions::default())?
            .nbar
            .expect("complete run")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::parse_poly;

    fn sys(s: &str, n: Var) -> PolySystem {
        PolySystem::projective(vec![parse_poly(s).unwrap()], (1..=n).collect()).unwrap()
    }

    #[test]
    fn recognizes_vocabulary() {
        assert_eq!(
            classify(&sys("2", 1)),
            ResidualKind::UnitIndicator { value: Int::from(2) }
        );
        assert_eq!(
            classify(&sys("x1^2 - x1*x2 + x2^2", 2)),
            ResidualKind::Conic {
                conic: Conic::Eisenstein
            }
        );
        assert_eq!(
            classify(&sys("x1^2 + x2^2", 2)),
            ResidualKind::Conic { conic: Conic::Gauss }
        );
        assert_eq!(classify(&sys("x1^2 + 2*x2^2", 2)), ResidualKind::Irreducible);
        let f = quartic_f().rename(|v| [3, 1, 4, 2][v as usize - 1]);
        let s = PolySystem::projective(vec![f], vec![1, 2, 3, 4]).unwrap();
        assert_eq!(classify(&s), ResidualKind::Quartic);
    }

    #[test]
    fn closed_forms_match_enumeration() {
        for q in [2u64, 3, 4, 5, 7, 8, 9] {
            let field = FieldSpec::of_order(q).unwrap();
            for (s, n) in [
                ("x1^2 + x1*x2 + x2^2", 2),
                ("x1^2 - x1*x2 + x2^2", 2),
                ("x1^2 + x2^2", 2),
                ("6", 1),
            ] {
                let system = sys(s, n);
                let kind = classify(&system);
                let closed = residual_count(&system, &kind, &field).unwrap();
                let brute = residual_count(&system, &ResidualKind::Irreducible, &field).unwrap();
                assert_eq!(closed, brute, "{s} over F_{q}");
            }
        }
    }
}
