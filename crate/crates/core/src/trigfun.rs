//! The cotangent kernel ε(z) = cot(πz)/(2i), Dedekind sums and the
//! elementary addition and distribution identities.

use rug::float::Constant;
use rug::{Complex, Float, Integer, Rational};

use crate::arith::{dist_to_integers, PrecisionContext, POLE_DELTA};
use crate::error::{Error, Result};

/// ε(z) = (1/2i)·cot(πz) at `ctx.bits`.
pub fn epsilon(z: &Complex, ctx: &PrecisionContext) -> Result<Complex> {
    epsilon_prec(z, ctx.bits)
}

pub(crate) fn epsilon_prec(z: &Complex, bits: u32) -> Result<Complex> {
    if dist_to_integers(z) < POLE_DELTA {
        return Err(Error::Pole { delta: POLE_DELTA });
    }
    // reduce the real part into [-1/2, 1/2)
    let re = z.real();
    let shift = Float::with_val(bits, re + 0.5f64).floor();
    let mut w = Complex::with_val(bits, z);
    *w.mut_real() -= &shift;
    w *= Float::with_val(bits, Constant::Pi);
    let (s, c) = w.sin_cos(Complex::new(bits));
    let cot = c / s;
    // cot/(2i) = -(i/2)·cot
    let (cr, ci) = cot.into_real_imag();
    Ok(Complex::with_val(bits, (ci / 2u32, -cr / 2u32)))
}

/// Left side of the addition formula ε(x)ε(y) − ε(x)ε(x+y) − ε(y)ε(x+y); identically −1/4.
pub fn addition_value(x: &Complex, y: &Complex, ctx: &PrecisionContext) -> Result<Complex> {
    let s = Complex::with_val(ctx.bits, x + y);
    let ex = epsilon(x, ctx)?;
    let ey = epsilon(y, ctx)?;
    let es = epsilon(&s, ctx)?;
    let a = Complex::with_val(ctx.bits, &ex * &ey);
    let b = Complex::with_val(ctx.bits, &ex + &ey) * es;
    Ok(a - b)
}

/// Σ_{j<m} ε(z + j/m) − m·ε(mz).
pub fn distribution_defect(z: &Complex, m: u32, ctx: &PrecisionContext) -> Result<Complex> {
    if m == 0 {
        return Err(Error::BadModulus("m = 0".into()));
    }
    let mut acc = ctx.zero();
    for j in 0..m {
        let shift = Float::with_val(ctx.bits, j) / m;
        let arg = Complex::with_val(ctx.bits, z + shift);
        acc += epsilon(&arg, ctx)?;
    }
    let mz = Complex::with_val(ctx.bits, z * m);
    acc -= epsilon(&mz, ctx)? * m;
    Ok(acc)
}

/// Moduli up to this bound use the O(c) sawtooth sum; larger ones the
/// reciprocity (Euclidean) recursion.
pub const SAWTOOTH_LIMIT: u64 = 1 << 20;

/// The Dedekind sum s(a, c) = Σ_{j=1}^{c-1} ((j/c))((ja/c)), exactly.
///
/// Sign convention: this equals (1/c)Σ ε(j/c)ε(−ja/c), with no extra sign.
pub fn dedekind_sum(a: &Integer, c: &Integer) -> Result<Rational> {
    if *c <= 0 {
        return Err(Error::BadModulus(format!("c = {c}")));
    }
    if Integer::from(a.gcd_ref(c)) != 1 {
        return Err(Error::NotCoprime {
            a: a.to_string(),
            c: c.to_string(),
        });
    }
    match c.to_u64() {
        Some(cc) if cc <= SAWTOOTH_LIMIT => {
            let aa = Integer::from(a.modulo_ref(c)).to_u64().unwrap();
            Ok(sawtooth_sum(aa, cc))
        }
        _ => Ok(dedekind_sum_euclid(a, c)),
    }
}

// s(a,c) = (1/4c²) Σ_{j=1}^{c-1} (2j − c)(2r_j − c), r_j = ja mod c
fn sawtooth_sum(a: u64, c: u64) -> Rational {
    if c == 1 {
        return Rational::new();
    }
    let c128 = c as i128;
    let mut acc: i128 = 0;
    let mut r: u64 = 0;
    for j in 1..c {
        r += a;
        if r >= c {
            r -= c;
        }
        acc += (2 * j as i128 - c128) * (2 * r as i128 - c128);
    }
    Rational::from((Integer::from(acc), Integer::from(4) * Integer::from(c) * c))
}

/// Dedekind sum through the reciprocity law; independent of the sawtooth route.
pub fn dedekind_sum_euclid(a: &Integer, c: &Integer) -> Rational {
    let mut sign = 1i32;
    let mut acc = Rational::new();
    let mut a = Integer::from(a.modulo_ref(c));
    let mut c = c.clone();
    // s(a,c) = −s(c,a) − 1/4 + (a² + c² + 1)/(12ac) for 0 < a < c
    while a != 0 && c != 1 {
        let term = Rational::from((
            Integer::from(a.square_ref()) + Integer::from(c.square_ref()) + 1u32,
            Integer::from(12u32) * &a * &c,
        )) - Rational::from((1, 4));
        if sign > 0 {
            acc += term;
        } else {
            acc -= term;
        }
        sign = -sign;
        let r = Integer::from(c.modulo_ref(&a));
        c = std::mem::replace(&mut a, r);
    }
    acc
}

/// Dedekind sum D(x) of a rational x = p/q in lowest terms (q > 0).
pub fn dedekind_sum_of(x: &Rational) -> Result<Rational> {
    dedekind_sum(x.numer(), x.denom())
}

/// (1/c)Σ_{j=1}^{c-1} ε(j/c)ε(−ja/c), evaluated numerically.
pub fn dedekind_sum_via_epsilon(a: i64, c: i64, ctx: &PrecisionContext) -> Result<Complex> {
    if c <= 0 {
        return Err(Error::BadModulus(format!("c = {c}")));
    }
    let mut acc = ctx.zero();
    for j in 1..c {
        let x = Complex::with_val(ctx.bits, Rational::from((j, c)));
        let y = Complex::with_val(ctx.bits, Rational::from((-(j * a).rem_euclid(c), c)));
        acc += epsilon_real(&x, ctx)? * epsilon_real(&y, ctx)?;
    }
    Ok(acc / c)
}

// On the real axis ε is purely imaginary and only needs 1/c-separation from Z.
fn epsilon_real(x: &Complex, ctx: &PrecisionContext) -> Result<Complex> {
    if dist_to_integers(x) == 0.0 {
        return Err(Error::Pole { delta: 0.0 });
    }
    let mut w = x.clone();
    w *= Float::with_val(ctx.bits, Constant::Pi);
    let (s, c) = w.sin_cos(Complex::new(ctx.bits));
    let (cr, ci) = (c / s).into_real_imag();
    Ok(Complex::with_val(ctx.bits, (ci / 2u32, -cr / 2u32)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Complex, re: f64, im: f64, tol: f64) -> bool {
        let d = Complex::with_val(a.prec().0, (re, im));
        Complex::with_val(a.prec().0, a - d).abs().real().to_f64() < tol
    }

    #[test]
    fn epsilon_special_values() {
        let ctx = PrecisionContext::default();
        assert!(close(&epsilon(&ctx.complex(0.5, 0.0), &ctx).unwrap(), 0.0, 0.0, 1e-35));
        assert!(close(&epsilon(&ctx.complex(0.25, 0.0), &ctx).unwrap(), 0.0, -0.5, 1e-35));
        assert!(close(&epsilon(&ctx.complex(1.25, 0.0), &ctx).unwrap(), 0.0, -0.5, 1e-35));
        assert!(matches!(
            epsilon(&ctx.complex(3.0, 0.0001), &ctx),
            Err(Error::Pole { .. })
        ));
    }

    #[test]
    fn addition_example() {
        let ctx = PrecisionContext::default();
        let x = Complex::with_val(128, Rational::from((1, 5)));
        let y = Complex::with_val(128, Rational::from((1, 7)));
        let v = addition_value(&x, &y, &ctx).unwrap();
        assert!(close(&v, -0.25, 0.0, 1e-35));
    }

    #[test]
    fn distribution_examples() {
        let ctx = PrecisionContext::default();
        let d1 = distribution_defect(&ctx.complex(0.3, 0.1), 1, &ctx).unwrap();
        assert!(d1.is_zero());
        for (z, m) in [((0.3, 0.1), 2), ((0.11, 0.07), 5)] {
            let d = distribution_defect(&ctx.complex(z.0, z.1), m, &ctx).unwrap();
            assert!(d.abs().real().to_f64() < ctx.tol);
        }
    }

    #[test]
    fn dedekind_examples() {
        let s = |a: i64, c: i64| dedekind_sum(&Integer::from(a), &Integer::from(c)).unwrap();
        assert_eq!(s(1, 2), 0);
        assert_eq!(s(5, 1), 0);
        assert_eq!(s(1, 3), Rational::from((1, 18)));
        assert_eq!(s(-1, 3), Rational::from((-1, 18)));
        assert!(matches!(
            dedekind_sum(&Integer::from(2), &Integer::from(4)),
            Err(Error::NotCoprime { .. })
        ));
        assert!(matches!(
            dedekind_sum(&Integer::from(1), &Integer::from(0)),
            Err(Error::BadModulus(_))
        ));
    }

    #[test]
    fn sawtooth_matches_euclid() {
        for c in 1..60i64 {
            for a in -c..2 * c {
                if Integer::from(a).gcd(&Integer::from(c)) != 1 {
                    continue;
                }
                let (a, c) = (Integer::from(a), Integer::from(c));
                assert_eq!(dedekind_sum(&a, &c).unwrap(), dedekind_sum_euclid(&a, &c));
            }
        }
        let big = Integer::from(10u64.pow(12) + 39);
        let a = Integer::from(977);
        let s = dedekind_sum(&a, &big).unwrap();
        let r = dedekind_sum(&big, &a).unwrap();
        let rhs = Rational::from((
            Integer::from(&a * &a) + Integer::from(&big * &big) + 1u32,
            Integer::from(12) * &a * &big,
        )) - Rational::from((1, 4));
        assert_eq!(s + r, rhs);
    }

    #[test]
    fn epsilon_product_form() {
        let ctx = PrecisionContext::default();
        for (a, c) in [(1, 3), (2, 7), (5, 12), (-3, 11)] {
            let exact = dedekind_sum(&Integer::from(a), &Integer::from(c)).unwrap();
            let num = dedekind_sum_via_epsilon(a, c, &ctx).unwrap();
            let diff = num - Complex::with_val(128, exact);
            assert!(diff.abs().real().to_f64() < 1e-30);
        }
    }
}
