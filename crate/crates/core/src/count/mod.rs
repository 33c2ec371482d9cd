//! Point counting over finite fields: zeros in affine space, projective
//! complements, sharded runs and their merge.

mod enumerate;
pub mod invariants;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dispatch_field;
use crate::error::{Error, Result};
use crate::gf::FieldSpec;
use crate::int::Int;
use crate::poly::{Monomial, SparsePoly, Var};

pub(crate) use enumerate::Compiled;
pub use enumerate::Shard;
pub use invariants::{
    c2_invariant, complement_quadratic_in_last, k_vanishes, result4_scan, C2Report, Result4Row, Result4Scan,
};

/// Default single-process limit on enumerated points.
pub const DEFAULT_BUDGET: u128 = 1 << 36;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ambient {
    /// `P^{n−1}` over the `n` listed variables.
    Projective,
    /// `F_q^n` over the `n` listed variables.
    Affine,
}

/// Polynomials together with the space in which their zeros are counted.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PolySystem {
    pub polynomials: Vec<SparsePoly>,
    pub ambient: Ambient,
    /// Coordinates of the ambient space, outermost first.
    pub variables: Vec<Var>,
}

impl PolySystem {
    /// A homogeneous system in the projective space over `variables`.
    pub fn projective(polynomials: Vec<SparsePoly>, variables: Vec<Var>) -> Result<PolySystem> {
        if let Some(p) = polynomials.iter().find(|p| !p.is_homogeneous()) {
            return Err(Error::InvalidInput(format!("{p} is not homogeneous")));
        }
        Self::checked(polynomials, Ambient::Projective, variables)
    }

    pub fn affine(polynomials: Vec<SparsePoly>, variables: Vec<Var>) -> Result<PolySystem> {
        Self::checked(polynomials, Ambient::Affine, variables)
    }

    /// The projective system over exactly the variables occurring in
    /// `polynomials`.
    pub fn projective_in_support(polynomials: Vec<SparsePoly>) -> Result<PolySystem> {
        let vars = support(&polynomials);
        Self::projective(polynomials, vars)
    }

    fn checked(polynomials: Vec<SparsePoly>, ambient: Ambient, variables: Vec<Var>) -> Result<PolySystem> {
        let listed: BTreeSet<Var> = variables.iter().copied().collect();
        if listed.len() != variables.len() {
            return Err(Error::InvalidInput("repeated ambient variable".into()));
        }
        if let Some(v) = support(&polynomials).into_iter().find(|v| !listed.contains(v)) {
            return Err(Error::InvalidInput(format!("x{v} is not an ambient variable")));
        }
        Ok(PolySystem {
            polynomials,
            ambient,
            variables,
        })
    }

    /// Number of ambient coordinates.
    pub fn vars(&self) -> usize {
        self.variables.len()
    }

    /// Dimension of the ambient space.
    pub fn dimension(&self) -> i64 {
        match self.ambient {
            Ambient::Projective => self.vars() as i64 - 1,
            Ambient::Affine => self.vars() as i64,
        }
    }

    /// SHA-256 of the system's canonical JSON rendering.
    pub fn system_hash(&self) -> String {
        let canonical = serde_json::json!({
            "ambient": self.ambient,
            "variables": self.variables,
            "polynomials": self.polynomials.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
        });
        hex::encode(Sha256::digest(canonical.to_string().as_bytes()))
    }
}

/// Sorted union of the variables of `polys`.
pub fn support(polys: &[SparsePoly]) -> Vec<Var> {
    let set: BTreeSet<Var> = polys.iter().flat_map(|p| p.vars()).collect();
    set.into_iter().collect()
}

#[derive(Clone, Copy, Debug)]
pub struct CountOptions {
    /// Largest number of points a single shard may enumerate.
    pub budget: u128,
    pub shard: Shard,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions {
            budget: DEFAULT_BUDGET,
            shard: Shard::WHOLE,
        }
    }
}

/// Result of a (possibly partial) counting run.
///
/// `N` counts common zeros in `F_q^n` (the affine cone for projective
/// systems) and `Nbar` the complement: projective for projective systems,
/// affine otherwise. Both are present only for complete runs; shard records
/// carry the partial enumeration in `partial` and are combined by [`merge`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountRecord {
    pub q: u64,
    #[serde(rename = "N")]
    pub n: Option<Int>,
    #[serde(rename = "Nbar")]
    pub nbar: Option<Int>,
    pub system_hash: String,
    pub ambient: Ambient,
    /// Ambient coordinates.
    pub variables: usize,
    /// Coordinates that occur in no polynomial.
    pub free_variables: usize,
    /// Whether every polynomial vanishes at the origin.
    pub origin_zero: bool,
    /// `[index, total]`.
    pub shard: [u64; 2],
    /// Zeros enumerated by this shard: affine zeros over the occurring
    /// variables, or projective zeros for projective systems.
    pub partial: Int,
}

impl CountRecord {
    fn finalize(&mut self) {
        let q = Int::from(self.q);
        let total = q.pow(self.variables as u32);
        let scale = q.pow(self.free_variables as u32);
        match self.ambient {
            Ambient::Affine => {
                let n = &scale * &self.partial;
                self.nbar = Some(&total - &n);
                self.n = Some(n);
            }
            Ambient::Projective => {
                // The cone over the projective zeros, plus the origin when
                // every polynomial vanishes there (nonzero constants do not).
                let origin = Int::from(self.origin_zero as i64);
                let q1 = &q - &Int::ONE;
                let n = &scale * &(&origin + &(&q1 * &self.partial));
                let zeros = (&n - &origin).div_exact(&q1).expect("cone count is integral");
                let points = (&total - &Int::ONE).div_exact(&q1).expect("q-integer");
                let nbar = &points - &zeros;
                self.n = Some(n);
                self.nbar = Some(nbar);
            }
        }
    }
}

/// Counts the zeros of `system` over `field` within `options`.
pub fn run_count(system: &PolySystem, field: &FieldSpec, options: CountOptions) -> Result<CountRecord> {
    let shard = options.shard;
    if shard.total == 0 || shard.index >= shard.total {
        return Err(Error::InvalidInput(format!(
            "invalid shard {}/{}",
            shard.index, shard.total
        )));
    }
    let polys: Vec<SparsePoly> = system.polynomials.iter().filter(|p| !p.is_zero()).cloned().collect();
    let occurring = enumeration_order(&polys);
    let q = field.q() as u128;
    let points = match system.ambient {
        Ambient::Affine => q.saturating_pow(occurring.len() as u32),
        Ambient::Projective => (q.saturating_pow(occurring.len() as u32) - 1) / (q - 1),
    };
    let per_shard = points.div_ceil(shard.total as u128);
    if per_shard > options.budget {
        return Err(Error::Budget {
            points,
            limit: options.budget,
            shards: points.div_ceil(options.budget).min(u64::MAX as u128) as u64,
        });
    }
    let compiled = Compiled::new(&polys, &occurring);
    let partial = dispatch_field!(field, f => match system.ambient {
        Ambient::Affine => enumerate::affine_zeros(f, &compiled, shard),
        Ambient::Projective => enumerate::projective_zeros(f, &compiled, shard),
    });
    let p = field.p() as u64;
    let origin_zero = polys
        .iter()
        .all(|f| f.coefficient(&Monomial::one()).rem_euclid_u64(p) == 0);
    let mut record = CountRecord {
        q: field.q() as u64,
        n: None,
        nbar: None,
        system_hash: system.system_hash(),
        ambient: system.ambient,
        variables: system.vars(),
        free_variables: system.vars() - occurring.len(),
        origin_zero,
        shard: [shard.index, shard.total],
        partial: Int::from(partial),
    };
    if shard.total == 1 {
        record.finalize();
    }
    Ok(record)
}

/// Occurring variables with the innermost (last) one chosen to have the
/// smallest maximal degree, then the most occurrences.
fn enumeration_order(polys: &[SparsePoly]) -> Vec<Var> {
    let mut vars = support(polys);
    let key = |v: Var| {
        let deg = polys.iter().map(|p| p.degree_in(v)).max().unwrap_or(0);
        let occ: usize = polys
            .iter()
            .map(|p| p.terms().iter().filter(|(m, _)| m.exp(v) > 0).count())
            .sum();
        (deg, std::cmp::Reverse(occ))
    };
    if let Some((i, _)) = vars.iter().enumerate().min_by_key(|(_, &v)| key(v)) {
        let v = vars.remove(i);
        vars.push(v);
    }
    vars
}

/// Common zeros `N(f₁,…,f_m)` in `F_q^n` (the affine cone for projective
/// systems).
pub fn count_affine(system: &PolySystem, field: &FieldSpec) -> Result<Int> {
    let record = run_count(system, field, CountOptions::default())?;
    Ok(record.n.expect("complete run"))
}

/// Points `N̄` of the projective complement.
pub fn count_projective_complement(system: &PolySystem, field: &FieldSpec) -> Result<Int> {
    if system.ambient != Ambient::Projective {
        return Err(Error::InvalidInput(
            "projective complement needs a projective system".into(),
        ));
    }
    let record = run_count(system, field, CountOptions::default())?;
    Ok(record.nbar.expect("complete run"))
}

/// Combines the shard records of one run into the complete record.
pub fn merge(records: &[CountRecord]) -> Result<CountRecord> {
    let first = records
        .first()
        .ok_or_else(|| Error::InvalidInput("no shard records to merge".into()))?;
    let total = first.shard[1];
    let mut seen = vec![false; total as usize];
    let mut partial = Int::ZERO;
    for r in records {
        let same = r.q == first.q
            && r.system_hash == first.system_hash
            && r.ambient == first.ambient
            && r.variables == first.variables
            && r.free_variables == first.free_variables
            && r.origin_zero == first.origin_zero
            && r.shard[1] == total;
        if !same {
            return Err(Error::Consistency("shard records belong to different runs".into()));
        }
        let i = r.shard[0] as usize;
        if i >= seen.len() || seen[i] {
            return Err(Error::Consistency(format!("shard {i} is duplicated or out of range")));
        }
        seen[i] = true;
        partial += &r.partial;
    }
    if let Some(missing) = seen.iter().position(|&s| !s) {
        return Err(Error::InvalidInput(format!("shard {missing} of {total} is missing")));
    }
    let mut out = first.clone();
    out.shard = [0, 1];
    out.partial = partial;
    out.finalize();
    Ok(out)
}

/// Splits a projective system along `var` into the boundary `var = 0`, a
/// projective system over the remaining variables, and the chart
/// `var = 1`, an affine system over them, so that
/// `N̄(f) = N̄(f|var=0) + (affine complement of f|var=1)`.
pub fn affine_projective_swap(system: &PolySystem, var: Var) -> Result<(PolySystem, PolySystem)> {
    if system.ambient != Ambient::Projective {
        return Err(Error::InvalidInput("swap needs a projective system".into()));
    }
    if !system.variables.contains(&var) {
        return Err(Error::InvalidInput(format!("x{var} is not an ambient variable")));
    }
    let rest: Vec<Var> = system.variables.iter().copied().filter(|&v| v != var).collect();
    let boundary = system
        .polynomials
        .iter()
        .map(|p| p.substitute_int(var, &Int::ZERO))
        .collect();
    let chart = system
        .polynomials
        .iter()
        .map(|p| p.substitute_int(var, &Int::ONE))
        .collect();
    Ok((
        PolySystem::projective(boundary, rest.clone())?,
        PolySystem::affine(chart, rest)?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Multigraph;
    use crate::poly::graph_poly::{dual_polynomial, graph_polynomial, quartic_f};
    use crate::poly::parse_poly;

    fn poly(s: &str) -> SparsePoly {
        parse_poly(s).unwrap()
    }

    fn field(q: u64) -> FieldSpec {
        FieldSpec::of_order(q).unwrap()
    }

    #[test]
    fn affine_examples() {
        let s = PolySystem::affine(vec![poly("x1 + x2 + x3")], vec![1, 2, 3]).unwrap();
        assert_eq!(count_affine(&s, &field(2)).unwrap(), Int::from(4));
        let s = PolySystem::affine(vec![poly("x1*x2 - 1")], vec![1, 2]).unwrap();
        assert_eq!(count_affine(&s, &field(3)).unwrap(), Int::from(2));
    }

    #[test]
    fn triangle_and_its_dual_have_q_squared_points() {
        let c3 = Multigraph::cycle(3);
        for q in [2u64, 3, 4, 5, 7, 8, 9] {
            for p in [graph_polynomial(&c3).unwrap(), dual_polynomial(&c3).unwrap()] {
                let s = PolySystem::projective(vec![p], vec![1, 2, 3]).unwrap();
                assert_eq!(count_projective_complement(&s, &field(q)).unwrap(), Int::from(q * q));
            }
        }
    }

    #[test]
    fn degenerate_systems() {
        let zero = PolySystem::projective(vec![SparsePoly::zero()], vec![1, 2]).unwrap();
        assert_eq!(count_projective_complement(&zero, &field(2)).unwrap(), Int::ZERO);
        let empty = PolySystem::projective(vec![], vec![1, 2, 3]).unwrap();
        assert_eq!(count_projective_complement(&empty, &field(3)).unwrap(), Int::ZERO);
        let one = PolySystem::projective(vec![SparsePoly::one()], vec![1, 2, 3]).unwrap();
        assert_eq!(count_projective_complement(&one, &field(3)).unwrap(), Int::from(13));
        let free = PolySystem::projective(vec![poly("x1")], vec![1, 2, 3]).unwrap();
        assert_eq!(count_projective_complement(&free, &field(5)).unwrap(), Int::from(25));
        assert!(PolySystem::projective(vec![poly("x1 + 1")], vec![1]).is_err());
    }

    #[test]
    fn k4_complement() {
        let k4 = graph_polynomial(&Multigraph::complete(4)).unwrap();
        let s = PolySystem::projective(vec![k4], (1..=6).collect()).unwrap();
        for (q, expected) in [(2u64, 28), (3, 234), (5, 3100)] {
            assert_eq!(count_projective_complement(&s, &field(q)).unwrap(), Int::from(expected));
        }
    }

    #[test]
    fn budget_refusal_names_shards() {
        let s = PolySystem::affine(vec![poly("x1 + x2 + x3 + x4")], vec![1, 2, 3, 4]).unwrap();
        let options = CountOptions {
            budget: 100,
            shard: Shard::WHOLE,
        };
        match run_count(&s, &field(5), options) {
            Err(Error::Budget { points, shards, .. }) => {
                assert_eq!(points, 625);
                assert_eq!(shards, 7);
            }
            other => panic!("expected a budget refusal, got {other:?}"),
        }
    }

    #[test]
    fn shards_merge_to_the_whole() {
        let k4 = graph_polynomial(&Multigraph::complete(4)).unwrap();
        let s = PolySystem::projective(vec![k4, poly("x1 + x2")], (1..=7).collect()).unwrap();
        let f = field(4);
        let whole = run_count(&s, &f, CountOptions::default()).unwrap();
        let parts: Vec<CountRecord> = (0..5)
            .map(|i| {
                let options = CountOptions {
                    shard: Shard { index: i, total: 5 },
                    ..Default::default()
                };
                run_count(&s, &f, options).unwrap()
            })
            .collect();
        assert_eq!(merge(&parts).unwrap(), whole);
        assert!(merge(&parts[1..]).is_err());
        let mut dup = parts.clone();
        dup[1] = dup[0].clone();
        assert!(merge(&dup).is_err());
    }

    #[test]
    fn swap_identity() {
        let c3 = graph_polynomial(&Multigraph::cycle(3)).unwrap();
        let cases = vec![
            PolySystem::projective(vec![c3], vec![1, 2, 3]).unwrap(),
            PolySystem::projective(vec![poly("x1")], vec![1, 2]).unwrap(),
            PolySystem::projective(vec![quartic_f()], vec![1, 2, 3, 4]).unwrap(),
        ];
        for s in cases {
            for q in [2u64, 3, 4] {
                let f = field(q);
                let (boundary, chart) = affine_projective_swap(&s, s.variables[0]).unwrap();
                let lhs = count_projective_complement(&s, &f).unwrap();
                let b = count_projective_complement(&boundary, &f).unwrap();
                let c = run_count(&chart, &f, CountOptions::default()).unwrap().nbar.unwrap();
                assert_eq!(lhs, &b + &c);
            }
        }
    }

    #[test]
    fn modulus_independence_at_sixteen() {
        let standard = FieldSpec::new(2, 4).unwrap();
        let other = FieldSpec::with_modulus(2, 4, vec![1, 0, 0, 1, 1]).unwrap();
        assert_ne!(standard.modulus(), other.modulus());
        let s = PolySystem::projective(vec![quartic_f()], vec![1, 2, 3, 4]).unwrap();
        assert_eq!(
            count_projective_complement(&s, &standard).unwrap(),
            count_projective_complement(&s, &other).unwrap()
        );
    }
}
