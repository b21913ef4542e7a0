use std::f64::consts::{LN_2, PI};

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Complex, Float};

use crate::arith::{dist_to_lattice, IntMatrix, PrecisionContext, POLE_DELTA};
use crate::error::{Error, Result};
use crate::trigfun::epsilon_prec;

/// A point of the upper half plane with Im τ ≥ `TauPoint::MIN_IM`.
#[derive(Clone, Debug, PartialEq)]
pub struct TauPoint(Complex);

impl TauPoint {
    pub const MIN_IM: f64 = 0.05;

    pub fn new(value: Complex) -> Result<Self> {
        let im = value.imag().to_f64();
        if !(im >= Self::MIN_IM) {
            return Err(Error::TauTooThin(im));
        }
        Ok(TauPoint(value))
    }

    pub fn from_f64(re: f64, im: f64, ctx: &PrecisionContext) -> Result<Self> {
        Self::new(ctx.complex(re, im))
    }

    pub fn value(&self) -> &Complex {
        &self.0
    }

    pub fn im(&self) -> f64 {
        self.0.imag().to_f64()
    }

    /// (γτ, cτ + d).
    pub fn act(&self, g: &IntMatrix) -> Result<(TauPoint, Complex)> {
        let (j, num) = moebius_parts(g, &self.0)?;
        let image = Complex::with_val(self.0.prec().0, &num / &j);
        Ok((TauPoint::new(image)?, j))
    }
}

// (cτ + d, aτ + b)
fn moebius_parts(g: &IntMatrix, tau: &Complex) -> Result<(Complex, Complex)> {
    if g.dim() != 2 {
        return Err(Error::Dimension {
            expected: 2,
            got: g.dim(),
        });
    }
    let bits = tau.prec().0;
    let j = Complex::with_val(bits, tau * &g[(1, 0)]) + &g[(1, 1)];
    let num = Complex::with_val(bits, tau * &g[(0, 0)]) + &g[(0, 1)];
    Ok((j, num))
}

pub(crate) fn mul_i(w: &Complex) -> Complex {
    let bits = w.prec().0;
    Complex::with_val(bits, (-w.imag(), w.real()))
}

/// e(w) = exp(2πiw).
pub(crate) fn expi(w: &Complex) -> Complex {
    let bits = w.prec().0;
    let two_pi = Float::with_val(bits, Constant::Pi) * 2u32;
    mul_i(&Complex::with_val(bits, w * two_pi)).exp()
}

// terms needed so that |q|^(m − 1/2) < 2^−(bits+10)
fn series_length(im_tau: f64, bits: u32) -> usize {
    ((bits as f64 + 10.0) * LN_2 / (2.0 * PI * im_tau) + 0.5).ceil() as usize + 1
}

/// E₁(τ, z), the Eisenstein-summed (1/2πi)Σ_ω 1/(z + ω) over ω ∈ Zτ + Z.
///
/// z is first moved to z₀ = z − kτ with |Im z₀| ≤ Im τ/2, so that
/// E₁(τ, z) = E₁(τ, z₀) − k, and then
/// E₁(τ, z₀) = ε(z₀) + Σ_{m≥1} [q^m/(u − q^m) − u q^m/(1 − u q^m)] with u = e(z₀).
pub fn e1(tau: &TauPoint, z: &Complex, ctx: &PrecisionContext) -> Result<Complex> {
    let bits = ctx.bits;
    let t = tau.value();
    if dist_to_lattice(t, z) < POLE_DELTA {
        return Err(Error::Pole { delta: POLE_DELTA });
    }
    let alpha = Float::with_val(bits, z.imag() / t.imag());
    let k = alpha.round().to_integer().expect("finite argument");
    let z0 = Complex::with_val(bits, z - Complex::with_val(bits, t * &k));
    let mut acc = epsilon_prec(&z0, bits)?;
    let q = expi(&Complex::with_val(bits, t));
    let u = expi(&z0);
    let mut qm = Complex::with_val(bits, 1);
    for _ in 0..series_length(tau.im(), bits) {
        qm *= &q;
        let a = Complex::with_val(bits, &qm / Complex::with_val(bits, &u - &qm));
        let uq = Complex::with_val(bits, &u * &qm);
        let b = Complex::with_val(bits, &uq / (1 - Complex::with_val(bits, &uq)));
        acc += a - b;
    }
    acc -= &k;
    Ok(acc)
}

/// E₁*(τ, z) = E₁(τ, z) + Im z / Im τ, which is periodic for Zτ + Z.
pub fn e1_star(tau: &TauPoint, z: &Complex, ctx: &PrecisionContext) -> Result<Complex> {
    let corr = Float::with_val(ctx.bits, z.imag() / tau.value().imag());
    Ok(e1(tau, z, ctx)? + corr)
}

/// E₁^(N)(τ, z) = Σ_{j<N} E₁(τ, z + j/N) − N·E₁(τ, z).
pub fn e1_periodic_n(tau: &TauPoint, z: &Complex, level: u64, ctx: &PrecisionContext) -> Result<Complex> {
    if level < 2 {
        return Err(Error::BadModulus(format!("N = {level} < 2")));
    }
    let mut acc = ctx.zero();
    for j in 0..level {
        let shift = Float::with_val(ctx.bits, j) / level;
        acc += e1(tau, &Complex::with_val(ctx.bits, z + shift), ctx)?;
    }
    acc -= e1(tau, z, ctx)? * level;
    Ok(acc)
}

/// A random τ with Re τ ∈ [−1/2, 1/2), Im τ ∈ [0.3, 2] and a random z with |z| ≤ 2.
pub fn random_tau_z<R: rand::Rng>(rng: &mut R, ctx: &PrecisionContext) -> (TauPoint, Complex) {
    let tau = TauPoint::from_f64(rng.gen_range(-0.5..0.5), rng.gen_range(0.3..=2.0), ctx).expect("Im τ ≥ 0.3");
    let r: f64 = rng.gen_range(0.0..=2.0);
    let theta: f64 = rng.gen_range(0.0..2.0 * PI);
    (tau, ctx.complex(r * theta.cos(), r * theta.sin()))
}

/// (E₁(τ, z + 1) − E₁(τ, z), E₁(τ, z + τ) − E₁(τ, z) + 1).
pub fn e1_period_defects(tau: &TauPoint, z: &Complex, ctx: &PrecisionContext) -> Result<(Complex, Complex)> {
    let base = e1(tau, z, ctx)?;
    let one = e1(tau, &Complex::with_val(ctx.bits, z + 1u32), ctx)? - &base;
    let zt = Complex::with_val(ctx.bits, z + tau.value());
    let two = e1(tau, &zt, ctx)? - &base + 1u32;
    Ok((one, two))
}

/// E₁(γτ, z/(cτ + d)) − (cτ + d)E₁(τ, z) − cz.
pub fn e1_mod_defect(tau: &TauPoint, z: &Complex, g: &IntMatrix, ctx: &PrecisionContext) -> Result<Complex> {
    let (gt, j) = tau.act(g)?;
    let lhs = e1(&gt, &Complex::with_val(ctx.bits, z / &j), ctx)?;
    let rhs = Complex::with_val(ctx.bits, &j * e1(tau, z, ctx)?) + Complex::with_val(ctx.bits, z * &g[(1, 0)]);
    Ok(lhs - rhs)
}

/// Σ_{ξ ∈ E_τ[m]} E₁*(τ, z − ξ) − m·E₁*(τ, mz).
pub fn e1_star_distribution_defect(tau: &TauPoint, z: &Complex, m: u32, ctx: &PrecisionContext) -> Result<Complex> {
    if m == 0 {
        return Err(Error::BadModulus("m = 0".into()));
    }
    let bits = ctx.bits;
    let mut acc = ctx.zero();
    for a in 0..m {
        for b in 0..m {
            let xi = (Complex::with_val(bits, tau.value() * a) + b) / m;
            acc += e1_star(tau, &Complex::with_val(bits, z - xi), ctx)?;
        }
    }
    acc -= e1_star(tau, &Complex::with_val(bits, z * m), ctx)? * m;
    Ok(acc)
}

/// Weight-n slash of F(τ, z) by an integral M with det M > 0:
/// (F|M)(τ, z) = det(M)^n (cτ + d)^(−n) F(Mτ, det(M)·z/(cτ + d)).
pub fn slash<F>(f: &F, weight: u32, m: &IntMatrix, tau: &TauPoint, z: &[Complex], ctx: &PrecisionContext) -> Result<Complex>
where
    F: Fn(&TauPoint, &[Complex]) -> Result<Complex>,
{
    let det = m.det();
    if det <= 0 {
        return Err(Error::SingularMatrix);
    }
    let (j, num) = moebius_parts(m, tau.value())?;
    let image = TauPoint::new(Complex::with_val(ctx.bits, &num / &j))?;
    let scale = Complex::with_val(ctx.bits, (Float::with_val(ctx.bits, &det), 0)) / &j;
    let zs: Vec<Complex> = z.iter().map(|zi| Complex::with_val(ctx.bits, zi * &scale)).collect();
    let factor = Complex::with_val(ctx.bits, (&scale).pow(weight));
    Ok(f(&image, &zs)? * factor)
}

/// m^n Σ_{ad=m} Σ_{b mod d} d^(−n) F((aτ + b)/d, a·z).
pub fn hecke_tm<F>(f: &F, weight: u32, m: u64, tau: &TauPoint, z: &[Complex], ctx: &PrecisionContext) -> Result<Complex>
where
    F: Fn(&TauPoint, &[Complex]) -> Result<Complex>,
{
    let mut acc = ctx.zero();
    for a in 1..=m {
        if m % a != 0 {
            continue;
        }
        let d = m / a;
        let az: Vec<Complex> = z.iter().map(|zi| Complex::with_val(ctx.bits, zi * a)).collect();
        let w = Float::with_val(ctx.bits, m).pow(weight) / Float::with_val(ctx.bits, d).pow(weight);
        for b in 0..d {
            let t = (Complex::with_val(ctx.bits, tau.value() * a) + b) / d;
            acc += f(&TauPoint::new(t)?, &az)? * &w;
        }
    }
    Ok(acc)
}
