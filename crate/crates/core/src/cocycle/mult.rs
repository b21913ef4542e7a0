use rayon::prelude::*;
use rug::{Complex, Integer, Rational};

use super::trigsum::{abs_f64, LinearFormQ, TrigFactor, TrigFormalSum};
use crate::arith::{gamma0_membership, random_samples, IntMatrix, PrecisionContext, POLE_DELTA};
use crate::divisors::{check_delta, is_div_circ, Delta, TorsionDivisor};
use crate::error::{Error, Result};

/// Default bound on |det h| for coset enumeration.
pub const DEFAULT_DET_CAP: u64 = 10_000;

/// (1/det h) Σ_w D(w) Σ_{hξ ≡ w} ∏_j ε((h⁻¹z)_j + ξ_j), for D ∈ Div°.
pub fn smult_star(d: &TorsionDivisor, h: &IntMatrix, cap: u64) -> Result<TrigFormalSum> {
    if !is_div_circ(d) {
        return Err(Error::NotDivCirc);
    }
    smult_star_unchecked(d, h, cap)
}

/// The same formal sum without the Div° precondition, for divisors such as [0].
pub fn smult_star_unchecked(d: &TorsionDivisor, h: &IntMatrix, cap: u64) -> Result<TrigFormalSum> {
    let n = h.dim();
    if d.dim() != n {
        return Err(Error::Dimension {
            expected: n,
            got: d.dim(),
        });
    }
    let det = h.det();
    if det == 0 {
        return Ok(TrigFormalSum::zero(n));
    }
    if det.clone().abs() > cap {
        return Err(Error::DetCapExceeded {
            det: det.abs().to_string(),
            cap,
        });
    }
    let inv = h.inverse()?;
    let forms: Vec<LinearFormQ> = (0..n).map(|j| LinearFormQ::new(inv.row(j))).collect();
    let mut out = TrigFormalSum::zero(n);
    for (w, c) in d.iter() {
        let coeff = Rational::from((Integer::from(c), det.clone()));
        for xi in crate::arith::torsion_cosets(h, w)? {
            let factors = forms
                .iter()
                .zip(xi.coords())
                .map(|(f, s)| TrigFactor::new(f.clone(), s))
                .collect();
            out.add_term(coeff.clone(), factors);
        }
    }
    Ok(out)
}

/// Matrix with columns g_j⁻¹e₁.
pub fn symbol_of_tuple(tuple: &[IntMatrix]) -> Result<IntMatrix> {
    let cols: Vec<Vec<Integer>> = tuple
        .iter()
        .map(|g| g.unimodular_inverse().map(|inv| inv.column(0)))
        .collect::<Result<_>>()?;
    IntMatrix::from_columns(&cols)
}

/// The homogeneous cocycle (g₁,…,g_n) ↦ S*_mult[D]([g₁⁻¹e₁, …, g_n⁻¹e₁]).
pub fn smult_cocycle(d: &TorsionDivisor, tuple: &[IntMatrix], cap: u64) -> Result<TrigFormalSum> {
    smult_star(d, &symbol_of_tuple(tuple)?, cap)
}

/// Σ_i (−1)^i eval(g₀, …, ĝ_i, …, g_n).
pub fn cocycle_defect_n<F>(eval: &F, tuple: &[IntMatrix]) -> Result<TrigFormalSum>
where
    F: Fn(&[IntMatrix]) -> Result<TrigFormalSum>,
{
    let mut out = TrigFormalSum::default();
    for i in 0..tuple.len() {
        let face: Vec<IntMatrix> = tuple
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != i)
            .map(|(_, g)| g.clone())
            .collect();
        let v = eval(&face)?;
        if i % 2 == 0 {
            out += &v;
        } else {
            out -= &v;
        }
    }
    Ok(out)
}

/// Pole-guarded sample points for a collection of formal sums.
pub fn guarded_samples(sums: &[&TrigFormalSum], n: usize, ctx: &PrecisionContext) -> Result<Vec<Vec<Complex>>> {
    random_samples(ctx, n, |z| {
        sums.iter().all(|s| s.pole_distance(z) >= POLE_DELTA)
    })
}

/// Values of f at the given points, evaluated in parallel.
pub fn eval_at(f: &TrigFormalSum, pts: &[Vec<Complex>], ctx: &PrecisionContext) -> Result<Vec<Complex>> {
    pts.par_iter().map(|z| f.eval(z, ctx)).collect()
}

/// max |f(z)| over `ctx.samples` pole-guarded points.
pub fn max_abs_on_samples(f: &TrigFormalSum, ctx: &PrecisionContext) -> Result<f64> {
    if f.is_empty() {
        return Ok(0.0);
    }
    let pts = guarded_samples(&[f], f.dim(), ctx)?;
    Ok(eval_at(f, &pts, ctx)?
        .iter()
        .map(abs_f64)
        .fold(0.0, f64::max))
}

fn signed_entries(g: &IntMatrix) -> (Integer, Integer) {
    (g[(0, 0)].clone(), g[(1, 0)].clone())
}

/// The explicit 1-cocycle on Γ₀(N) in the variables (x, y):
/// Σ_{dd′=N} n_d/(d′c) Σ_{j mod d′c} ε((y + j)/(d′c)) ε(dx − a(y + j)/(d′c)),
/// where γ = [[a, *], [Nc, *]], and 0 when c = 0.
pub fn sdelta_star(level: u64, delta: &Delta, g: &IntMatrix) -> Result<TrigFormalSum> {
    Ok(sdelta_star_counted(level, delta, g)?.0)
}

/// `sdelta_star` together with the number of factor pairs before merging.
pub fn sdelta_star_counted(level: u64, delta: &Delta, g: &IntMatrix) -> Result<(TrigFormalSum, usize)> {
    check_delta(level, delta, false)?;
    if delta.values().sum::<i64>() != 0 {
        return Err(Error::BadDelta("Σ n_d must vanish".into()));
    }
    if g.dim() != 2 || !gamma0_membership(g, level) {
        return Err(Error::NotInGroup(g.to_string()));
    }
    let (a, big_c) = signed_entries(g);
    let c = Integer::from(&big_c / level);
    let mut out = TrigFormalSum::zero(2);
    if c == 0 {
        return Ok((out, 0));
    }
    let mut count = 0usize;
    for (&d, &nd) in delta {
        let dp = level / d;
        let m = Integer::from(&c * dp);
        let m_abs = m.clone().abs().to_u64().expect("modulus fits u64");
        let coeff = Rational::from((Integer::from(nd), m.clone()));
        let inv_m = Rational::from((Integer::from(1), m.clone()));
        let a_over_m = Rational::from((a.clone(), m.clone()));
        // ε((y+j)/m) has form (0, 1/m) and shift j/m; the second factor has form (d, −a/m), shift −aj/m
        let f1 = LinearFormQ::new(vec![Rational::new(), inv_m.clone()]);
        let f2 = LinearFormQ::new(vec![Rational::from(d), Rational::from(-&a_over_m)]);
        for j in 0..m_abs {
            let s1 = Rational::from(&inv_m * j);
            let s2 = -Rational::from(&a_over_m * j);
            out.add_term(
                coeff.clone(),
                vec![TrigFactor::new(f1.clone(), &s1), TrigFactor::new(f2.clone(), &s2)],
            );
            count += 1;
        }
    }
    Ok((out, count))
}

/// Defects of the 1-cocycle relation S(γ₁γ₂) − S(γ₁) − γ₁·S(γ₂) under the
/// action (γ·f)(z) = f(γ⁻¹z) and, for diagnosis, (γ·f)(z) = f(γᵀz).
pub fn sdelta_cocycle_defects(
    level: u64,
    delta: &Delta,
    g1: &IntMatrix,
    g2: &IntMatrix,
) -> Result<(TrigFormalSum, TrigFormalSum)> {
    let s12 = sdelta_star(level, delta, &(g1 * g2))?;
    let s1 = sdelta_star(level, delta, g1)?;
    let s2 = sdelta_star(level, delta, g2)?;
    let inv = g1.unimodular_inverse()?.to_rational();
    let tr = g1.transpose().to_rational();
    let mut linear = s12.clone();
    linear -= &s1;
    linear -= &s2.pullback(&inv);
    let mut transpose = s12;
    transpose -= &s1;
    transpose -= &s2.pullback(&tr);
    Ok((linear, transpose))
}

/// δ^∨ = Σ (n_d/d)[d], defined when every d divides n_d.
pub fn delta_dual(delta: &Delta) -> Result<Delta> {
    let mut out = Delta::new();
    for (&d, &nd) in delta {
        if nd % d as i64 != 0 {
            return Err(Error::BadDelta(format!(
                "n_{d} = {nd} is not divisible by {d}; the dual weights are not integral"
            )));
        }
        out.insert(d, nd / d as i64);
    }
    Ok(out)
}
