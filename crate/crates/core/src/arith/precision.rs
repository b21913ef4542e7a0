use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Complex, Float};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Minimum distance from a pole locus accepted by evaluators and samplers.
pub const POLE_DELTA: f64 = 1e-3;

const MAX_REJECTIONS: usize = 10_000;

/// Working precision, comparison tolerance and RNG seed shared by all numeric checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrecisionContext {
    pub bits: u32,
    pub tol: f64,
    pub seed: u64,
    pub samples: usize,
}

impl Default for PrecisionContext {
    fn default() -> Self {
        PrecisionContext {
            bits: 128,
            tol: 1e-30,
            seed: 0,
            samples: 20,
        }
    }
}

impl PrecisionContext {
    pub fn new(bits: u32, tol: f64, seed: u64, samples: usize) -> Result<Self> {
        if bits < 64 {
            return Err(Error::BadPrecision(format!("bits = {bits} < 64")));
        }
        let floor = 2f64.powi(16 - bits as i32);
        if !(tol > floor) {
            return Err(Error::BadPrecision(format!(
                "tol = {tol:e} must exceed 2^(16-bits) = {floor:e}"
            )));
        }
        Ok(PrecisionContext {
            bits,
            tol,
            seed,
            samples,
        })
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        PrecisionContext {
            seed,
            ..self.clone()
        }
    }

    pub fn with_samples(&self, samples: usize) -> Self {
        PrecisionContext {
            samples,
            ..self.clone()
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    pub fn complex(&self, re: f64, im: f64) -> Complex {
        Complex::with_val(self.bits, (re, im))
    }

    pub fn zero(&self) -> Complex {
        Complex::new(self.bits)
    }

    pub fn float(&self, x: f64) -> Float {
        Float::with_val(self.bits, x)
    }
}

/// Sup-metric distance from w to the nearest integer.
pub fn dist_to_integers(w: &Complex) -> f64 {
    let re = w.real().to_f64();
    let im = w.imag().to_f64();
    (re - re.round()).abs().max(im.abs())
}

/// Sup-metric distance from z to the lattice Zτ + Z, after reducing z to
/// the fundamental parallelogram centred at 0.
pub fn dist_to_lattice(tau: &Complex, z: &Complex) -> f64 {
    let (tr, ti) = (tau.real().to_f64(), tau.imag().to_f64());
    let (zr, zi) = (z.real().to_f64(), z.imag().to_f64());
    let a = zi / ti;
    let a0 = a - a.round();
    let b = zr - a * tr;
    let b0 = b - b.round();
    // residual point a0·τ + b0
    let re = a0 * tr + b0;
    let im = a0 * ti;
    let mut best = f64::INFINITY;
    for da in -1..=1 {
        for db in -1..=1 {
            let r = re + da as f64 * tr + db as f64;
            let i = im + da as f64 * ti;
            best = best.min(r.abs().max(i.abs()));
        }
    }
    best
}

/// Deterministic sample points in C^n with real parts in [0,1) and
/// imaginary parts in [-1/2, 1/2], each accepted by `guard`.
pub fn random_samples<F>(ctx: &PrecisionContext, n: usize, guard: F) -> Result<Vec<Vec<Complex>>>
where
    F: Fn(&[Complex]) -> bool,
{
    let mut rng = ctx.rng();
    let mut out = Vec::with_capacity(ctx.samples);
    for _ in 0..ctx.samples {
        let mut rejected = 0;
        loop {
            let p: Vec<Complex> = (0..n)
                .map(|_| {
                    let re: f64 = rng.gen_range(0.0..1.0);
                    let im: f64 = rng.gen_range(-0.5..=0.5);
                    ctx.complex(re, im)
                })
                .collect();
            if guard(&p) {
                out.push(p);
                break;
            }
            rejected += 1;
            if rejected >= MAX_REJECTIONS {
                return Err(Error::PoleGuardExhausted(rejected));
            }
        }
    }
    Ok(out)
}

/// JSON form of a complex number: decimal strings plus the precision.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub re: String,
    pub im: String,
    pub bits: u32,
}

impl ComplexJson {
    pub fn from_complex(z: &Complex) -> Self {
        let bits = z.prec().0;
        let digits = (bits as f64 * std::f64::consts::LOG10_2).ceil() as usize + 1;
        ComplexJson {
            re: z.real().to_string_radix(10, Some(digits)),
            im: z.imag().to_string_radix(10, Some(digits)),
            bits,
        }
    }

    pub fn to_complex(&self) -> Result<Complex> {
        let re = Float::parse(&self.re).map_err(|e| Error::Parse(e.to_string()))?;
        let im = Float::parse(&self.im).map_err(|e| Error::Parse(e.to_string()))?;
        Ok(Complex::with_val(self.bits, (re, im)))
    }
}
