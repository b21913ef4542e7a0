use std::collections::HashMap;

use rayon::prelude::*;
use rug::ops::Pow;
use rug::{Complex, Float, Integer, Rational};

use super::e1::{e1, TauPoint};
use crate::arith::{torsion_cosets, IntMatrix, PrecisionContext};
use crate::cocycle::symbol_of_tuple;
use crate::divisors::{EllipticDivisor, TorsionDivisor};
use crate::error::{Error, Result};

type FactorKey = (usize, Rational, Rational);

/// (1/det h) Σ_w D(w) Σ_{hξ = w} ∏_j E₁(τ, ℓ_j(z) + ξ_j) with ℓ_j(z) = (h⁻¹z)_j,
/// for D ∈ Div° on the torsion of E_τ^n. Each ξ = ατ + β is enumerated as a
/// pair of coset vectors with hα ≡ w_α and hβ ≡ w_β, coordinates in [0, 1).
pub fn sell_star(
    d: &EllipticDivisor,
    h: &IntMatrix,
    tau: &TauPoint,
    z: &[Complex],
    cap: u64,
    ctx: &PrecisionContext,
) -> Result<Complex> {
    if !d.is_div_circ() {
        return Err(Error::NotDivCirc);
    }
    sell_star_unchecked(d, h, tau, z, cap, ctx)
}

/// `sell_star` without the Div° precondition.
pub fn sell_star_unchecked(
    d: &EllipticDivisor,
    h: &IntMatrix,
    tau: &TauPoint,
    z: &[Complex],
    cap: u64,
    ctx: &PrecisionContext,
) -> Result<Complex> {
    let n = h.dim();
    if d.dim() != n || z.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: if d.dim() != n { d.dim() } else { z.len() },
        });
    }
    let det = h.det();
    if det == 0 {
        return Ok(ctx.zero());
    }
    if det.clone().abs() > cap {
        return Err(Error::DetCapExceeded {
            det: det.abs().to_string(),
            cap,
        });
    }
    let inv = h.inverse()?;
    let lz: Vec<Complex> = (0..n)
        .map(|j| {
            let mut acc = ctx.zero();
            for (i, zi) in z.iter().enumerate() {
                acc += Complex::with_val(ctx.bits, zi * Float::with_val(ctx.bits, &inv[(j, i)]));
            }
            acc
        })
        .collect();

    let mut terms: Vec<(i64, Vec<Vec<Rational>>, Vec<Vec<Rational>>)> = Vec::new();
    let mut keys: Vec<FactorKey> = Vec::new();
    for ((wa, wb), c) in d.iter() {
        let alphas: Vec<Vec<Rational>> = torsion_cosets(h, wa)?.into_iter().map(|p| p.coords().to_vec()).collect();
        let betas: Vec<Vec<Rational>> = torsion_cosets(h, wb)?.into_iter().map(|p| p.coords().to_vec()).collect();
        for al in &alphas {
            for be in &betas {
                for j in 0..n {
                    keys.push((j, al[j].clone(), be[j].clone()));
                }
            }
        }
        terms.push((c, alphas, betas));
    }
    keys.sort();
    keys.dedup();
    let values: HashMap<FactorKey, Complex> = keys
        .into_par_iter()
        .map(|key| {
            let (j, al, be) = &key;
            let shift = Complex::with_val(ctx.bits, tau.value() * Float::with_val(ctx.bits, al))
                + Float::with_val(ctx.bits, be);
            let arg = Complex::with_val(ctx.bits, &lz[*j] + shift);
            e1(tau, &arg, ctx).map(|v| (key, v))
        })
        .collect::<Result<_>>()?;

    let mut acc = ctx.zero();
    for (c, alphas, betas) in &terms {
        let mut part = ctx.zero();
        for al in alphas {
            for be in betas {
                let mut p = Complex::with_val(ctx.bits, 1);
                for j in 0..n {
                    p *= &values[&(j, al[j].clone(), be[j].clone())];
                }
                part += p;
            }
        }
        acc += part * *c;
    }
    Ok(acc / Float::with_val(ctx.bits, &det))
}

/// The homogeneous cocycle (g₁, …, g_n) ↦ S*_ell[D]([g₁⁻¹e₁, …, g_n⁻¹e₁]) at (τ, z).
pub fn sell_cocycle(
    d: &EllipticDivisor,
    tuple: &[IntMatrix],
    tau: &TauPoint,
    z: &[Complex],
    cap: u64,
    ctx: &PrecisionContext,
) -> Result<Complex> {
    sell_star(d, &symbol_of_tuple(tuple)?, tau, z, cap, ctx)
}

/// Σ_i (−1)^i S(g₀, …, ĝ_i, …, g_n) at (τ, z).
pub fn sell_cocycle_defect(
    d: &EllipticDivisor,
    tuple: &[IntMatrix],
    tau: &TauPoint,
    z: &[Complex],
    cap: u64,
    ctx: &PrecisionContext,
) -> Result<Complex> {
    let mut acc = ctx.zero();
    for i in 0..tuple.len() {
        let face: Vec<IntMatrix> = tuple
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != i)
            .map(|(_, g)| g.clone())
            .collect();
        let v = sell_cocycle(d, &face, tau, z, cap, ctx)?;
        if i % 2 == 0 {
            acc += v;
        } else {
            acc -= v;
        }
    }
    Ok(acc)
}

/// F(γτ, z/(cτ + d)) − (cτ + d)^n F(τ, z) for F = S*_ell[D](h).
pub fn sell_modularity_defect(
    d: &EllipticDivisor,
    h: &IntMatrix,
    g: &IntMatrix,
    tau: &TauPoint,
    z: &[Complex],
    cap: u64,
    ctx: &PrecisionContext,
) -> Result<Complex> {
    let (gt, j) = tau.act(g)?;
    let zs: Vec<Complex> = z.iter().map(|zi| Complex::with_val(ctx.bits, zi / &j)).collect();
    let lhs = sell_star(d, h, &gt, &zs, cap, ctx)?;
    let jn = Complex::with_val(ctx.bits, (&j).pow(h.dim() as u32));
    Ok(lhs - sell_star(d, h, tau, z, cap, ctx)? * jn)
}

/// S*_ell[[s]^*D](h)(z) − s^n·S*_ell[D](h)(sz).
pub fn sell_distribution_defect(
    d: &EllipticDivisor,
    h: &IntMatrix,
    s: u64,
    tau: &TauPoint,
    z: &[Complex],
    cap: u64,
    ctx: &PrecisionContext,
) -> Result<Complex> {
    let lhs = sell_star(&d.scalar_pullback(s), h, tau, z, cap, ctx)?;
    let sz: Vec<Complex> = z.iter().map(|zi| Complex::with_val(ctx.bits, zi * s)).collect();
    let rhs = sell_star(d, h, tau, &sz, cap, ctx)? * Integer::from(s).pow(h.dim() as u32);
    Ok(lhs - rhs)
}

/// E(τ; v₁, …, v_n) = (1/det h) Σ_{hξ = 0} ∏_j E₁(τ, ℓ_j(z) + ξ_j), where the
/// columns of h are the v_i and z is supplied by the caller.
pub fn partial_eisenstein_product(tau: &TauPoint, h: &IntMatrix, z: &[Complex], cap: u64, ctx: &PrecisionContext) -> Result<Complex> {
    let origin = EllipticDivisor::from_torsion(&TorsionDivisor::origin(h.dim()));
    sell_star_unchecked(&origin, h, tau, z, cap, ctx)
}

/// The point (1/N)e₁ of C^n.
pub fn default_offset(n: usize, level: u64, ctx: &PrecisionContext) -> Vec<Complex> {
    let mut z = vec![ctx.zero(); n];
    if n > 0 {
        z[0] = Complex::with_val(ctx.bits, (Float::with_val(ctx.bits, 1) / level, 0));
    }
    z
}
