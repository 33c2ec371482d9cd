//! Exhaustive zero counting with incremental per-prefix evaluation.
//!
//! Each polynomial is compiled into one sparse layer per enumerated
//! variable. Layer `i` holds the distinct monomials in the variables
//! `i..n`; substituting a value for variable `i` folds layer `i` into layer
//! `i + 1`, so a point costs a few multiply-adds instead of a full
//! evaluation. The innermost variable is solved in closed form when the
//! lowest-degree live polynomial is linear or quadratic.

use rayon::prelude::*;
use rustc_hash::FxHashMap;

use crate::gf::Field;
use crate::int::Int;
use crate::poly::{SparsePoly, Var};

/// Largest field for which square-root and Artin–Schreier tables are built.
const TABLE_LIMIT: u32 = 1 << 22;
const NONE: u32 = u32::MAX;

/// A system compiled against a fixed variable order.
pub(crate) struct Compiled {
    n: usize,
    polys: Vec<Layers>,
}

struct Layers {
    /// `trans[i][s] = (exponent of variable i, target monomial in layer i+1)`.
    trans: Vec<Vec<(u16, u32)>>,
    /// Number of monomials in each layer `0..=n`.
    sizes: Vec<usize>,
    /// Index of the constant monomial in each layer, or `NONE`.
    constant: Vec<u32>,
    /// Largest exponent of variable `i` in layer `i`.
    max_deg: Vec<u16>,
    /// Exponent of the innermost variable for each monomial of layer `n−1`.
    inner_exp: Vec<u16>,
    /// Exponents of the last two variables for each monomial of layer `n−2`.
    pair_exp: Vec<(u16, u16)>,
    coefficients: Vec<Int>,
}

impl Compiled {
    /// Compiles `polys` for enumeration in the order `vars` (outermost
    /// first). Every variable of every polynomial must occur in `vars`.
    pub fn new(polys: &[SparsePoly], vars: &[Var]) -> Compiled {
        let n = vars.len();
        let pos: FxHashMap<Var, usize> = vars.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let layers = polys
            .iter()
            .map(|p| {
                let mut exps: Vec<Vec<u16>> = Vec::with_capacity(p.len());
                let mut coefficients = Vec::with_capacity(p.len());
                for (m, c) in p.terms() {
                    let mut e = vec![0u16; n];
                    for &(v, k) in m.0.iter() {
                        e[pos[&v]] = k;
                    }
                    exps.push(e);
                    coefficients.push(c.clone());
                }
                Layers::build(exps, coefficients, n)
            })
            .collect();
        Compiled { n, polys: layers }
    }
}

impl Layers {
    fn build(level0: Vec<Vec<u16>>, coefficients: Vec<Int>, n: usize) -> Layers {
        let mut trans = Vec::with_capacity(n);
        let mut constant = Vec::with_capacity(n + 1);
        let mut sizes = vec![level0.len()];
        let mut max_deg = Vec::with_capacity(n);
        let mut current = level0;
        let const_of = |layer: &[Vec<u16>]| {
            layer
                .iter()
                .position(|e| e.iter().all(|&x| x == 0))
                .map_or(NONE, |i| i as u32)
        };
        constant.push(const_of(&current));
        let mut inner_exp = Vec::new();
        let mut pair_exp = Vec::new();
        for i in 0..n {
            if i + 2 == n {
                pair_exp = current.iter().map(|e| (e[0], e[1])).collect();
            }
            if i == n - 1 {
                inner_exp = current.iter().map(|e| e[0]).collect();
            }
            let mut index: FxHashMap<Vec<u16>, u32> = FxHashMap::default();
            let mut next: Vec<Vec<u16>> = Vec::new();
            let mut t = Vec::with_capacity(current.len());
            let mut md = 0;
            for e in &current {
                let rest = e[1..].to_vec();
                let id = *index.entry(rest.clone()).or_insert_with(|| {
                    next.push(rest);
                    (next.len() - 1) as u32
                });
                t.push((e[0], id));
                md = md.max(e[0]);
            }
            trans.push(t);
            max_deg.push(md);
            constant.push(const_of(&next));
            sizes.push(next.len());
            current = next;
        }
        Layers {
            trans,
            sizes,
            constant,
            max_deg,
            inner_exp,
            pair_exp,
            coefficients,
        }
    }

    fn size(&self, level: usize) -> usize {
        self.sizes[level]
    }
}

/// Partition of the outermost enumerated assignments: the first `prefix_len`
/// free variables of every chart form an index, and shard `index` of
/// `total` takes the indices congruent to `index`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Shard {
    pub index: u64,
    pub total: u64,
}

impl Shard {
    pub const WHOLE: Shard = Shard { index: 0, total: 1 };

    fn prefix_len(&self, q: u32) -> usize {
        let mut len = 0;
        let mut span = 1u128;
        while span < self.total as u128 {
            span *= q as u128;
            len += 1;
        }
        len
    }

    /// Indices in `[lo, hi)` that belong to this shard.
    fn members_in(&self, lo: u128, hi: u128) -> u128 {
        let below = |x: u128| {
            let i = self.index as u128;
            if x <= i {
                0
            } else {
                (x - i - 1) / self.total as u128 + 1
            }
        };
        below(hi) - below(lo)
    }
}

/// Precomputed roots for quadratic equations.
struct RootTables {
    /// `sqrt[x] = y` with `y² = x`, or `NONE`.
    sqrt: Vec<u32>,
    /// Characteristic 2 only: `art[t] = y` with `y² + y = t`, or `NONE`.
    art: Vec<u32>,
}

impl RootTables {
    fn build<F: Field>(f: &F) -> Option<RootTables> {
        let q = f.q();
        if q > TABLE_LIMIT {
            return None;
        }
        let mut sqrt = vec![NONE; q as usize];
        let mut art = if f.p() == 2 { vec![NONE; q as usize] } else { Vec::new() };
        for y in 0..q {
            let s = f.mul(y, y);
            if sqrt[s as usize] == NONE {
                sqrt[s as usize] = y;
            }
            if f.p() == 2 {
                let t = f.add(s, y);
                if art[t as usize] == NONE {
                    art[t as usize] = y;
                }
            }
        }
        Some(RootTables { sqrt, art })
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Status {
    Zero,
    NonzeroConstant,
    Live,
}

struct Runner<'a, F: Field> {
    f: &'a F,
    c: &'a Compiled,
    tables: Option<&'a RootTables>,
    q: u32,
    four: u32,
    /// `q^k` for `k = 0..=n`.
    qpow: Vec<u128>,
}

#[derive(Clone)]
struct Work {
    /// `bufs[level][poly]`: coefficient vector of the layer.
    bufs: Vec<Vec<Vec<u32>>>,
    pw: Vec<u32>,
    inner: Vec<Vec<u32>>,
    /// Per polynomial: layer `n−2` as a dense grid, rows indexed by the
    /// innermost exponent.
    grid: Vec<Vec<u32>>,
}

#[derive(Clone, Copy)]
struct Prefix {
    /// Level at which the shard index is complete.
    end: usize,
    value: u128,
    shard: Shard,
}

impl<'a, F: Field> Runner<'a, F> {
    fn work(&self) -> Work {
        let n = self.c.n;
        let bufs = (0..=n)
            .map(|lvl| self.c.polys.iter().map(|p| vec![0u32; p.size(lvl)]).collect())
            .collect();
        let maxd = self
            .c
            .polys
            .iter()
            .flat_map(|p| p.max_deg.iter().copied())
            .max()
            .unwrap_or(0) as usize;
        Work {
            bufs,
            pw: vec![0; maxd + 1],
            inner: vec![Vec::new(); self.c.polys.len()],
            grid: vec![Vec::new(); self.c.polys.len()],
        }
    }

    fn load(&self, w: &mut Work) {
        for (p, buf) in self.c.polys.iter().zip(w.bufs[0].iter_mut()) {
            for (slot, z) in buf.iter_mut().zip(&p.coefficients) {
                *slot = self.f.image_of(z);
            }
        }
    }

    /// Substitutes `a` for the variable of `level`, filling `level + 1`.
    fn substitute(&self, w: &mut Work, level: usize, a: u32) {
        let f = self.f;
        let maxd = self.c.polys.iter().map(|p| p.max_deg[level]).max().unwrap_or(0) as usize;
        w.pw[0] = 1;
        for k in 1..=maxd {
            w.pw[k] = f.mul(w.pw[k - 1], a);
        }
        let (lo, hi) = w.bufs.split_at_mut(level + 1);
        let src = &lo[level];
        let dst = &mut hi[0];
        for ((p, s), d) in self.c.polys.iter().zip(src).zip(dst.iter_mut()) {
            d.iter_mut().for_each(|x| *x = 0);
            for (&(e, t), &coeff) in p.trans[level].iter().zip(s.iter()) {
                if coeff != 0 {
                    let term = if e == 0 { coeff } else { f.mul(coeff, w.pw[e as usize]) };
                    d[t as usize] = f.add(d[t as usize], term);
                }
            }
        }
    }

    fn status(&self, w: &Work, level: usize) -> Status {
        let mut all_zero = true;
        for (p, buf) in self.c.polys.iter().zip(&w.bufs[level]) {
            let k = p.constant[level];
            let mut nonconst = false;
            let mut constant = 0;
            for (i, &x) in buf.iter().enumerate() {
                if x != 0 {
                    if i as u32 == k {
                        constant = x;
                    } else {
                        nonconst = true;
                        break;
                    }
                }
            }
            if !nonconst && constant != 0 {
                return Status::NonzeroConstant;
            }
            if nonconst || constant != 0 {
                all_zero = false;
            }
        }
        if all_zero {
            Status::Zero
        } else {
            Status::Live
        }
    }

    /// Zeros in `F_q^{n−level}` of the system held in `bufs[level]`, which
    /// must have status `Live`, restricted to the shard.
    fn count_from(&self, w: &mut Work, level: usize, prefix: Option<Prefix>) -> u128 {
        let n = self.c.n;
        if prefix.is_none() {
            if level + 2 == n {
                return self.last_two(w);
            }
            if level + 1 == n {
                return self.innermost(w) as u128;
            }
        }
        let mut total = 0u128;
        for a in 0..self.q {
            total += self.branch(w, level, a, prefix);
        }
        total
    }

    fn branch(&self, w: &mut Work, level: usize, a: u32, prefix: Option<Prefix>) -> u128 {
        let n = self.c.n;
        let mut next_prefix = None;
        if let Some(pr) = prefix {
            let value = pr.value * self.q as u128 + a as u128;
            if level + 1 == pr.end {
                if value % pr.shard.total as u128 != pr.shard.index as u128 {
                    return 0;
                }
            } else {
                next_prefix = Some(Prefix { value, ..pr });
            }
        }
        self.substitute(w, level, a);
        match self.status(w, level + 1) {
            Status::NonzeroConstant => 0,
            Status::Zero => {
                let rest = self.qpow[n - level - 1];
                match next_prefix {
                    None => rest,
                    Some(pr) => {
                        let r = self.qpow[pr.end - level - 1];
                        let members = pr.shard.members_in(pr.value * r, (pr.value + 1) * r);
                        members * (rest / r)
                    }
                }
            }
            Status::Live => {
                if level + 1 == n {
                    1
                } else {
                    self.count_from(w, level + 1, next_prefix)
                }
            }
        }
    }

    /// Roots in `F_q` of the univariate system in `bufs[n−1]`.
    fn innermost(&self, w: &mut Work) -> u32 {
        let f = self.f;
        let n = self.c.n;
        for (i, (p, buf)) in self.c.polys.iter().zip(&w.bufs[n - 1]).enumerate() {
            let dense = &mut w.inner[i];
            dense.clear();
            dense.resize(p.max_deg[n - 1] as usize + 1, 0);
            for (&e, &x) in p.inner_exp.iter().zip(buf) {
                dense[e as usize] = f.add(dense[e as usize], x);
            }
        }
        self.solve_inner(&mut w.inner)
    }

    /// Zeros in `F_q²` of the system in `bufs[n−2]`: for each value of the
    /// outer variable the innermost coefficients are evaluated directly by
    /// Horner's rule and solved.
    fn last_two(&self, w: &mut Work) -> u128 {
        let f = self.f;
        let n = self.c.n;
        let Work { bufs, inner, grid, .. } = w;
        for ((p, buf), g) in self.c.polys.iter().zip(&bufs[n - 2]).zip(grid.iter_mut()) {
            let width = p.max_deg[n - 2] as usize + 1;
            g.clear();
            g.resize(width * (p.max_deg[n - 1] as usize + 1), 0);
            for (&(e0, e1), &x) in p.pair_exp.iter().zip(buf) {
                let slot = e1 as usize * width + e0 as usize;
                g[slot] = f.add(g[slot], x);
            }
        }
        let mut total = 0u128;
        for a in 0..self.q {
            for ((p, g), dense) in self.c.polys.iter().zip(grid.iter()).zip(inner.iter_mut()) {
                let width = p.max_deg[n - 2] as usize + 1;
                dense.clear();
                dense.extend(g.chunks_exact(width).map(|row| eval(f, row, a)));
            }
            total += self.solve_inner(inner) as u128;
        }
        total
    }

    /// Common roots of dense univariate polynomials.
    fn solve_inner(&self, inner: &mut [Vec<u32>]) -> u32 {
        let f = self.f;
        let mut best: Option<(usize, usize)> = None;
        let mut live = 0;
        for (i, d) in inner.iter_mut().enumerate() {
            while d.len() > 1 && *d.last().unwrap() == 0 {
                d.pop();
            }
            if d.len() == 1 {
                if d[0] != 0 {
                    return 0;
                }
                continue;
            }
            live += 1;
            if best.is_none_or(|(_, deg)| d.len() - 1 < deg) {
                best = Some((i, d.len() - 1));
            }
        }
        let Some((pivot, deg)) = best else {
            return self.q;
        };
        let g = &inner[pivot];
        if live == 1 {
            match (deg, self.tables) {
                (1, _) => return 1,
                (2, Some(t)) => return quadratic_root_count(f, t, self.four, g[2], g[1], g[0]),
                _ => {}
            }
        }
        let others_vanish = |x: u32| inner.iter().enumerate().all(|(i, d)| i == pivot || eval(f, d, x) == 0);
        match (deg, self.tables) {
            (1, _) => {
                let r = f.mul(f.neg(g[0]), f.inv(g[1]));
                others_vanish(r) as u32
            }
            (2, Some(t)) => {
                let mut roots = [NONE; 2];
                quadratic_roots(f, t, self.four, g[2], g[1], g[0], &mut roots);
                roots.iter().filter(|&&r| r != NONE && others_vanish(r)).count() as u32
            }
            _ => (0..self.q).filter(|&x| eval(f, g, x) == 0 && others_vanish(x)).count() as u32,
        }
    }
}

fn eval<F: Field>(f: &F, dense: &[u32], x: u32) -> u32 {
    dense.iter().rev().fold(0, |acc, &c| f.add(f.mul(acc, x), c))
}

/// Number of distinct roots of `a x² + b x + c` with `a ≠ 0`.
fn quadratic_root_count<F: Field>(f: &F, t: &RootTables, four: u32, a: u32, b: u32, c: u32) -> u32 {
    if f.p() == 2 {
        if b == 0 {
            return 1;
        }
        let binv = f.inv(b);
        let target = f.mul(f.mul(a, c), f.mul(binv, binv));
        return if t.art[target as usize] == NONE { 0 } else { 2 };
    }
    let disc = f.sub(f.mul(b, b), f.mul(four, f.mul(a, c)));
    if disc == 0 {
        1
    } else if t.sqrt[disc as usize] == NONE {
        0
    } else {
        2
    }
}

/// Distinct roots of `a x² + b x + c` with `a ≠ 0`.
fn quadratic_roots<F: Field>(f: &F, t: &RootTables, four: u32, a: u32, b: u32, c: u32, out: &mut [u32; 2]) {
    if f.p() == 2 {
        let ainv = f.inv(a);
        if b == 0 {
            out[0] = t.sqrt[f.mul(c, ainv) as usize];
            return;
        }
        let binv = f.inv(b);
        let target = f.mul(f.mul(a, c), f.mul(binv, binv));
        let y = t.art[target as usize];
        if y != NONE {
            let scale = f.mul(b, ainv);
            out[0] = f.mul(scale, y);
            out[1] = f.mul(scale, f.add(y, 1));
        }
        return;
    }
    let disc = f.sub(f.mul(b, b), f.mul(four, f.mul(a, c)));
    let two_a_inv = f.inv(f.add(a, a));
    if disc == 0 {
        out[0] = f.mul(f.neg(b), two_a_inv);
        return;
    }
    let s = t.sqrt[disc as usize];
    if s != NONE {
        out[0] = f.mul(f.sub(f.neg(b), s), two_a_inv);
        out[1] = f.mul(f.add(f.neg(b), s), two_a_inv);
    }
}

/// Subtrees with at least this many points are split across threads.
const PARALLEL_THRESHOLD: u128 = 1 << 16;

/// Common zeros of the compiled system in `F_q^n`, restricted to a shard.
pub(crate) fn affine_zeros<F: Field>(f: &F, c: &Compiled, shard: Shard) -> u128 {
    let tables = RootTables::build(f);
    let runner = make_runner(f, c, tables.as_ref());
    chart_zeros(&runner, 0, None, shard)
}

/// Common zeros of the compiled homogeneous system in `P^{n−1}(F_q)`,
/// restricted to a shard, counted over the affine charts
/// `(0, …, 0, 1, *, …, *)`.
pub(crate) fn projective_zeros<F: Field>(f: &F, c: &Compiled, shard: Shard) -> u128 {
    let tables = RootTables::build(f);
    let runner = make_runner(f, c, tables.as_ref());
    (0..c.n).map(|j| chart_zeros(&runner, j + 1, Some(j), shard)).sum()
}

fn make_runner<'a, F: Field>(f: &'a F, c: &'a Compiled, tables: Option<&'a RootTables>) -> Runner<'a, F> {
    let q = f.q();
    let mut qpow = vec![1u128; c.n + 1];
    for k in 1..=c.n {
        qpow[k] = qpow[k - 1].saturating_mul(q as u128);
    }
    Runner {
        f,
        c,
        tables,
        q,
        four: f.image_of(&Int::from(4)),
        qpow,
    }
}

/// Zeros of the chart whose free variables start at `start`; when `pivot`
/// is set the variables before it are 0 and the pivot is 1.
fn chart_zeros<F: Field>(r: &Runner<'_, F>, start: usize, pivot: Option<usize>, shard: Shard) -> u128 {
    let n = r.c.n;
    let mut w = r.work();
    r.load(&mut w);
    if let Some(j) = pivot {
        for level in 0..=j {
            r.substitute(&mut w, level, (level == j) as u32);
        }
    }
    let free = n - start;
    let prefix_len = shard.prefix_len(r.q).min(free);
    let owns_point = |idx: u128| idx % shard.total as u128 == shard.index as u128;
    match r.status(&w, start) {
        Status::NonzeroConstant => return 0,
        Status::Zero => {
            let span = r.qpow[prefix_len];
            return shard.members_in(0, span) * (r.qpow[free] / span);
        }
        Status::Live => {}
    }
    if free == 0 {
        return owns_point(0) as u128;
    }
    let prefix = (prefix_len > 0).then_some(Prefix {
        end: start + prefix_len,
        value: 0,
        shard,
    });
    if prefix.is_none() && !owns_point(0) {
        return 0;
    }
    if r.qpow[free] < PARALLEL_THRESHOLD || rayon::current_num_threads() == 1 {
        return r.count_from(&mut w, start, prefix);
    }
    (0..r.q)
        .into_par_iter()
        .map_with(w, |w, a| r.branch(w, start, a, prefix))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::FieldSpec;
    use crate::{dispatch_field, poly::parse_poly};

    fn brute(polys: &[SparsePoly], vars: &[Var], q: u64) -> u128 {
        let spec = FieldSpec::of_order(q).unwrap();
        let n = vars.len();
        let mut count = 0;
        let mut point = vec![0u32; n];
        loop {
            let ok = polys.iter().all(|p| {
                let mut acc = 0;
                for (m, c) in p.terms() {
                    let mut t = spec.image_of(c);
                    for &(v, e) in m.0.iter() {
                        let i = vars.iter().position(|&x| x == v).unwrap();
                        t = spec.mul(t, spec.pow(point[i], e as u64));
                    }
                    acc = spec.add(acc, t);
                }
                acc == 0
            });
            count += ok as u128;
            let mut i = 0;
            loop {
                if i == n {
                    return count;
                }
                point[i] += 1;
                if point[i] == q as u32 {
                    point[i] = 0;
                    i += 1;
                } else {
                    break;
                }
            }
        }
    }

    fn affine(polys: &[SparsePoly], vars: &[Var], q: u64, shard: Shard) -> u128 {
        let spec = FieldSpec::of_order(q).unwrap();
        let c = Compiled::new(polys, vars);
        dispatch_field!(spec, f => affine_zeros(f, &c, shard))
    }

    #[test]
    fn matches_brute_force_on_mixed_systems() {
        let systems = [
            vec!["x1*x2 - 1"],
            vec!["x1^2 + x2^2 + x3^2 - 1"],
            vec!["x1^2*x2 + x3^2 + x1*x3", "x2 + x3"],
            vec!["x1^3 + x2*x3 + 1"],
            vec!["x1^2 + x1*x2 + x2^2"],
            vec!["x1*x2 + x3", "x1^2 + 2*x3^2 + 3"],
        ];
        for sys in systems {
            let polys: Vec<SparsePoly> = sys.iter().map(|s| parse_poly(s).unwrap()).collect();
            for q in [2u64, 3, 4, 5, 7, 8, 9] {
                let vars = [1, 2, 3];
                assert_eq!(
                    affine(&polys, &vars, q, Shard::WHOLE),
                    brute(&polys, &vars, q),
                    "{sys:?} q={q}"
                );
            }
        }
    }

    #[test]
    fn shards_partition_exactly() {
        let polys = vec![parse_poly("x1*x2 + x3*x4 + x1^2").unwrap()];
        let vars = [1, 2, 3, 4];
        for q in [3u64, 4, 5] {
            let whole = affine(&polys, &vars, q, Shard::WHOLE);
            for total in [2u64, 3, 7, 30] {
                let sum: u128 = (0..total)
                    .map(|index| affine(&polys, &vars, q, Shard { index, total }))
                    .sum();
                assert_eq!(sum, whole, "q={q} total={total}");
            }
        }
    }
}
