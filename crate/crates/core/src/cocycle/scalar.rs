use rug::{Integer, Rational};

use crate::arith::{gamma0_membership, BigRat, IntMatrix};
use crate::divisors::{check_delta, Delta};
use crate::error::{Error, Result};
use crate::trigfun::dedekind_sum_of;

fn group_entries(level: u64, g: &IntMatrix) -> Result<[Integer; 4]> {
    if g.dim() != 2 || !gamma0_membership(g, level) {
        return Err(Error::NotInGroup(g.to_string()));
    }
    Ok([
        g[(0, 0)].clone(),
        g[(0, 1)].clone(),
        g[(1, 0)].clone(),
        g[(1, 1)].clone(),
    ])
}

// D(x) for any rational x; integers give 0
fn dedekind(x: &Rational) -> BigRat {
    dedekind_sum_of(x).expect("reduced rational with positive denominator")
}

/// Ψ_δ([[a, *], [C, *]]) = sign(C)·Σ n_d D(d·a/|C|), and 0 when C = 0.
pub fn psi_delta(level: u64, delta: &Delta, g: &IntMatrix) -> Result<BigRat> {
    check_delta(level, delta, true)?;
    let [a, _, c, _] = group_entries(level, g)?;
    if c == 0 {
        return Ok(Rational::new());
    }
    let abs_c = c.clone().abs();
    let mut acc = Rational::new();
    for (&d, &nd) in delta {
        let x = Rational::from((Integer::from(&a * d), abs_c.clone()));
        acc += dedekind(&x) * nd;
    }
    if c < 0 {
        acc = -acc;
    }
    Ok(acc)
}

/// Φ_N([[a, b], [C, d]]) = (N−1)(a+d)/C + 12·sign(C)·(D(a/|C|) − D(N·a/|C|)),
/// and (N−1)b/d when C = 0.
pub fn phi_n(level: u64, g: &IntMatrix) -> Result<BigRat> {
    let [a, b, c, d] = group_entries(level, g)?;
    let nm1 = Integer::from(level) - 1u32;
    if c == 0 {
        return Ok(Rational::from((nm1 * b, d)));
    }
    let abs_c = c.clone().abs();
    let first = Rational::from((nm1 * Integer::from(&a + &d), c.clone()));
    let x = Rational::from((a.clone(), abs_c.clone()));
    let nx = Rational::from((Integer::from(&a * level), abs_c));
    let mut dn = dedekind(&x) - dedekind(&nx);
    if c < 0 {
        dn = -dn;
    }
    Ok(first + dn * 12u32)
}

fn is_square(n: &Integer) -> bool {
    *n >= 0 && n.is_perfect_square()
}

fn is_fundamental(disc: i64) -> bool {
    let squarefree = |m: i64| {
        let m = m.unsigned_abs();
        (2..).take_while(|p| p * p <= m).all(|p| m % (p * p) != 0)
    };
    match disc.rem_euclid(4) {
        1 => squarefree(disc),
        0 => {
            let m = disc / 4;
            matches!(m.rem_euclid(4), 2 | 3) && squarefree(m)
        }
        _ => false,
    }
}

/// Matrix of multiplication by the totally positive fundamental unit of the
/// real quadratic order of discriminant `disc`, on the basis (1, ω).
pub fn unit_matrix(disc: i64) -> Result<IntMatrix> {
    if disc <= 1 || is_square(&Integer::from(disc)) {
        return Err(Error::NotRealQuadratic(disc));
    }
    if !is_fundamental(disc) {
        return Err(Error::BadDiscriminant(disc));
    }
    let one_mod_4 = disc.rem_euclid(4) == 1;
    let dd = Integer::from(disc);
    let mut y = Integer::from(1);
    let (x, y, norm) = loop {
        // smallest x ≥ 0 with N(x + yω) = ±1
        let mut best: Option<(Integer, i32)> = None;
        for sign in [-1i32, 1] {
            let x = if one_mod_4 {
                // x² + xy − y²(D−1)/4 = sign  ⇔  (2x + y)² = Dy² + 4·sign
                let t2 = Integer::from(&dd * &y) * &y + 4 * sign;
                if !is_square(&t2) {
                    continue;
                }
                let t = t2.sqrt();
                let twice = t - &y;
                if twice < 0 || twice.is_odd() {
                    continue;
                }
                twice / 2u32
            } else {
                let x2 = Integer::from(&dd / 4u32) * &y * &y + sign;
                if !is_square(&x2) {
                    continue;
                }
                x2.sqrt()
            };
            if best.as_ref().is_none_or(|(bx, _)| x < *bx) {
                best = Some((x, sign));
            }
        }
        if let Some((x, sign)) = best {
            break (x, y, sign);
        }
        y += 1;
    };
    let m = if one_mod_4 {
        let q = Integer::from(&dd - 1u32) / 4u32;
        IntMatrix::new(2, vec![x.clone(), Integer::from(&y * &q), y.clone(), x + &y])?
    } else {
        let q = Integer::from(&dd / 4u32);
        IntMatrix::new(2, vec![x.clone(), Integer::from(&y * &q), y, x])?
    };
    Ok(if norm < 0 { &m * &m } else { m })
}
