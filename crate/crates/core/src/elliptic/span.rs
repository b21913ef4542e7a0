use rug::{Complex, Float};
use serde::Serialize;

use super::qexp::{e1_qexp, eisenstein2_basis, QExpansion};
use crate::arith::PrecisionContext;
use crate::error::{Error, Result};

/// Solution of min ‖Ax − b‖ by Householder QR with column pivoting.
#[derive(Clone, Debug)]
pub struct LeastSquares {
    pub coefficients: Vec<Complex>,
    pub residual: f64,
    pub rank: usize,
}

fn norm_sq(v: &[Complex], bits: u32) -> Float {
    let mut acc = Float::new(bits);
    for x in v {
        acc += Float::with_val(bits, x.norm_ref());
    }
    acc
}

// v^H·w
fn dot_conj(v: &[Complex], w: &[Complex], bits: u32) -> Complex {
    let mut acc = Complex::new(bits);
    for (a, b) in v.iter().zip(w) {
        acc += Complex::with_val(bits, a.conj_ref()) * b;
    }
    acc
}

/// `columns` are the columns of A, each of the same length as `rhs`.
pub fn least_squares(columns: &[Vec<Complex>], rhs: &[Complex], bits: u32) -> Result<LeastSquares> {
    let m = rhs.len();
    let k = columns.len();
    if m < k {
        return Err(Error::InsufficientPrecision {
            equations: m,
            unknowns: k,
        });
    }
    if let Some(c) = columns.iter().find(|c| c.len() != m) {
        return Err(Error::Dimension {
            expected: m,
            got: c.len(),
        });
    }
    let mut a: Vec<Vec<Complex>> = columns.to_vec();
    let mut b = rhs.to_vec();
    let mut perm: Vec<usize> = (0..k).collect();
    let rank_tol = Float::with_val(bits, Float::i_exp(1, -(bits as i32) / 2));
    let mut first_norm: Option<Float> = None;
    let mut rank = k;
    for j in 0..k {
        let (p, _) = (j..k)
            .map(|c| (c, norm_sq(&a[c][j..], bits)))
            .max_by(|x, y| x.1.partial_cmp(&y.1).expect("finite norms"))
            .expect("nonempty range");
        a.swap(j, p);
        perm.swap(j, p);
        let norm = norm_sq(&a[j][j..], bits).sqrt();
        let reference = first_norm.get_or_insert_with(|| norm.clone()).clone();
        if norm <= Float::with_val(bits, &reference * &rank_tol) || norm == 0 {
            rank = j;
            break;
        }
        let x0 = a[j][j].clone();
        let x0_abs = Float::with_val(bits, x0.abs_ref());
        let phase = if x0_abs == 0 {
            Complex::with_val(bits, 1)
        } else {
            x0 / &x0_abs
        };
        let alpha = -(phase * &norm);
        let mut v: Vec<Complex> = a[j][j..].to_vec();
        v[0] -= &alpha;
        let vnorm = norm_sq(&v, bits);
        let reflect = |col: &mut [Complex]| {
            let s = dot_conj(&v, col, bits) * 2u32 / &vnorm;
            for (ci, vi) in col.iter_mut().zip(&v) {
                *ci -= Complex::with_val(bits, vi * &s);
            }
        };
        for col in a.iter_mut().skip(j + 1) {
            reflect(&mut col[j..]);
        }
        reflect(&mut b[j..]);
        a[j][j] = alpha;
    }
    // back substitution on the leading rank × rank block
    let mut y = vec![Complex::new(bits); k];
    for i in (0..rank).rev() {
        let mut s = b[i].clone();
        for c in i + 1..rank {
            s -= Complex::with_val(bits, &a[c][i] * &y[c]);
        }
        y[i] = s / &a[i][i];
    }
    let mut coefficients = vec![Complex::new(bits); k];
    for (i, &p) in perm.iter().enumerate() {
        coefficients[p] = y[i].clone();
    }
    let residual = norm_sq(&b[rank..], bits).sqrt().to_f64();
    Ok(LeastSquares {
        coefficients,
        residual,
        rank,
    })
}

/// Outcome of a span-membership test against the weight-2 Eisenstein family.
#[derive(Clone, Debug, Serialize)]
pub struct SpanReport {
    pub level: u64,
    pub labels: Vec<i64>,
    pub order: usize,
    pub basis_size: usize,
    pub rank: usize,
    pub residual: f64,
}

fn span_residual(level: u64, labels: Vec<i64>, f: &QExpansion, m: usize, ctx: &PrecisionContext) -> Result<SpanReport> {
    let basis = eisenstein2_basis(level, m, ctx.bits);
    let columns: Vec<Vec<Complex>> = basis.iter().map(|b| b.series.coeffs.clone()).collect();
    let ls = least_squares(&columns, &f.coeffs, ctx.bits)?;
    Ok(SpanReport {
        level,
        labels,
        order: m,
        basis_size: basis.len(),
        rank: ls.rank,
        residual: ls.residual,
    })
}

/// Residual of E₁(a/N)E₁(b/N) + E₁(b/N)E₁(c/N) + E₁(c/N)E₁(a/N) against the
/// span of `eisenstein2_basis(N, M)`, using q-coefficients 0..=M.
pub fn bg_span_check(level: u64, a: i64, b: i64, c: i64, m: usize, ctx: &PrecisionContext) -> Result<SpanReport> {
    let n = level as i64;
    if (a + b + c).rem_euclid(n) != 0 {
        return Err(Error::BadModulus(format!("{a} + {b} + {c} is not 0 mod {level}")));
    }
    let ea = e1_qexp(a, level, m, ctx.bits)?;
    let eb = e1_qexp(b, level, m, ctx.bits)?;
    let ec = e1_qexp(c, level, m, ctx.bits)?;
    let f = ea.mul(&eb).add(&eb.mul(&ec)).add(&ec.mul(&ea));
    span_residual(level, vec![a, b, c], &f, m, ctx)
}

/// The same residual for the single product E₁(a/N)E₁(b/N).
pub fn bg_product_check(level: u64, a: i64, b: i64, m: usize, ctx: &PrecisionContext) -> Result<SpanReport> {
    let f = e1_qexp(a, level, m, ctx.bits)?.mul(&e1_qexp(b, level, m, ctx.bits)?);
    span_residual(level, vec![a, b], &f, m, ctx)
}

/// Triples 1 ≤ a ≤ b ≤ c < N with a + b + c ≡ 0 mod N.
pub fn admissible_triples(level: u64) -> Vec<(i64, i64, i64)> {
    let n = level as i64;
    let mut out = Vec::new();
    for a in 1..n {
        for b in a..n {
            for c in b..n {
                if (a + b + c) % n == 0 {
                    out.push((a, b, c));
                }
            }
        }
    }
    out
}
