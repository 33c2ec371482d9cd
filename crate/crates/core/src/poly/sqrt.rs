use super::SparsePoly;

/// Exact square root: `Some(r)` with `r² = p` and positive leading
/// coefficient, or `None` when `p` is not a perfect square in ℤ[x].
///
/// Works by recursion on one variable: writing `p = Σ p_j v^j` with even top
/// degree `2k`, the top coefficient of the root is `√p_{2k}` and the lower
/// ones follow by exact division by `2√p_{2k}`. The result is always checked
/// by squaring.
pub fn poly_sqrt(p: &SparsePoly) -> Option<SparsePoly> {
    if p.is_zero() {
        return Some(SparsePoly::zero());
    }
    if let Some(c) = p.constant_value() {
        return c.sqrt_exact().map(SparsePoly::constant);
    }
    if p.terms.iter().any(|(m, _)| m.0.iter().any(|&(_, e)| e % 2 == 1)) && p.len() == 1 {
        return None;
    }
    let v = p.vars()[0];
    let coeffs = p.coefficients_in(v);
    let d = coeffs.len() - 1;
    if d % 2 == 1 {
        return None;
    }
    let k = d / 2;
    // The lowest nonzero coefficient must also be a square; cheap rejection.
    let low = coeffs.iter().position(|c| !c.is_zero()).unwrap();
    if low % 2 == 1 {
        return None;
    }
    let top = poly_sqrt(&coeffs[d])?;
    let two_top = top.scale(&2.into());
    let mut r: Vec<SparsePoly> = vec![SparsePoly::zero(); k + 1];
    r[k] = top;
    for j in (0..k).rev() {
        let mut rhs = coeffs[k + j].clone();
        for i in (j + 1)..k {
            let l = k + j - i;
            if l > j && l < k {
                rhs = rhs.sub(&r[i].mul(&r[l]));
            }
        }
        r[j] = rhs.div_exact(&two_top)?;
    }
    let root = SparsePoly::from_coefficients_in(v, &r);
    if root.square() == *p {
        Some(root.normalize_sign())
    } else {
        None
    }
}
