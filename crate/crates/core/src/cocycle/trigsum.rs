use std::collections::{BTreeMap, HashMap};
use std::ops::{AddAssign, Neg, SubAssign};

use rug::{Complex, Float, Rational};
use serde::{Deserialize, Serialize};

use crate::arith::{
    dist_to_integers, frac, rat_serde, rat_vec_serde, BigRat, PrecisionContext, RatMatrix,
};
use crate::error::{Error, Result};
use crate::trigfun::epsilon_prec;

/// A linear form z ↦ Σ a_i z_i with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LinearFormQ {
    #[serde(with = "rat_vec_serde")]
    coeffs: Vec<BigRat>,
}

impl LinearFormQ {
    pub fn new(coeffs: Vec<BigRat>) -> Self {
        LinearFormQ { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        LinearFormQ {
            coeffs: coeffs.iter().map(|&x| Rational::from(x)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeffs(&self) -> &[BigRat] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == 0)
    }

    pub fn eval_rat(&self, z: &[BigRat]) -> BigRat {
        let mut acc = Rational::new();
        for (a, x) in self.coeffs.iter().zip(z) {
            acc += Rational::from(a * x);
        }
        acc
    }

    pub fn eval(&self, z: &[Complex], bits: u32) -> Complex {
        let mut acc = Complex::new(bits);
        for (a, x) in self.coeffs.iter().zip(z) {
            if *a == 0 {
                continue;
            }
            acc += Complex::with_val(bits, x * Float::with_val(bits, a));
        }
        acc
    }

    pub fn eval_f64(&self, z: &[(f64, f64)]) -> (f64, f64) {
        let mut re = 0.0;
        let mut im = 0.0;
        for (a, &(x, y)) in self.coeffs.iter().zip(z) {
            let a = a.to_f64();
            re += a * x;
            im += a * y;
        }
        (re, im)
    }

    /// The form z ↦ ℓ(A z).
    pub fn compose(&self, a: &RatMatrix) -> LinearFormQ {
        LinearFormQ {
            coeffs: a.vec_mul(&self.coeffs),
        }
    }

    pub fn scaled(&self, s: &BigRat) -> LinearFormQ {
        LinearFormQ {
            coeffs: self.coeffs.iter().map(|c| Rational::from(c * s)).collect(),
        }
    }
}

/// One factor ε(ℓ(z) + shift), with shift reduced into [0, 1).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TrigFactor {
    pub form: LinearFormQ,
    #[serde(with = "rat_serde")]
    pub shift: BigRat,
}

impl TrigFactor {
    pub fn new(form: LinearFormQ, shift: &BigRat) -> Self {
        TrigFactor {
            form,
            shift: frac(shift),
        }
    }

    fn argument(&self, z: &[Complex], bits: u32) -> Complex {
        let mut w = self.form.eval(z, bits);
        if self.shift != 0 {
            w += Float::with_val(bits, &self.shift);
        }
        w
    }
}

/// scale · Σ coeff · ∏ ε(ℓ(z) + shift), with terms keyed by their sorted factor list.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TrigFormalSum {
    n: usize,
    scale: BigRat,
    terms: BTreeMap<Vec<TrigFactor>, BigRat>,
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    #[serde(with = "rat_serde")]
    coeff: BigRat,
    factors: Vec<TrigFactor>,
}

#[derive(Serialize, Deserialize)]
struct SumJson {
    #[serde(with = "rat_serde")]
    scale: BigRat,
    terms: Vec<TermJson>,
}

impl TrigFormalSum {
    pub fn zero(n: usize) -> Self {
        TrigFormalSum {
            n,
            scale: Rational::from(1),
            terms: BTreeMap::new(),
        }
    }

    pub fn with_scale(n: usize, scale: BigRat) -> Self {
        TrigFormalSum {
            n,
            scale,
            terms: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn scale(&self) -> &BigRat {
        &self.scale
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BigRat, &[TrigFactor])> {
        self.terms.iter().map(|(f, c)| (c, f.as_slice()))
    }

    /// Adds coeff·∏ε(factors), merging with an existing term of the same factor multiset.
    pub fn add_term(&mut self, mut coeff: BigRat, mut factors: Vec<TrigFactor>) {
        if coeff == 0 {
            return;
        }
        // ε is odd: make the leading coefficient of every form positive
        for f in factors.iter_mut() {
            if f.form.coeffs.iter().find(|c| **c != 0).is_some_and(|c| *c < 0) {
                f.form = f.form.scaled(&Rational::from(-1));
                f.shift = frac(&Rational::from(-&f.shift));
                coeff = -coeff;
            }
        }
        factors.sort();
        match self.terms.entry(factors) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += coeff;
                if *e.get() == 0 {
                    e.remove();
                }
            }
        }
    }

    /// Same value with scale folded into the coefficients.
    pub fn normalized(&self) -> TrigFormalSum {
        if self.scale == 1 {
            return self.clone();
        }
        let mut out = TrigFormalSum::zero(self.n);
        for (f, c) in &self.terms {
            out.add_term(Rational::from(c * &self.scale), f.clone());
        }
        out
    }

    pub fn scaled(&self, s: &BigRat) -> TrigFormalSum {
        let mut out = self.clone();
        out.scale *= s;
        if *s == 0 {
            out.terms.clear();
            out.scale = Rational::from(1);
        }
        out
    }

    /// The function z ↦ self(A z).
    pub fn pullback(&self, a: &RatMatrix) -> TrigFormalSum {
        let mut out = TrigFormalSum::with_scale(a.dim(), self.scale.clone());
        for (f, c) in &self.terms {
            let factors = f
                .iter()
                .map(|t| TrigFactor {
                    form: t.form.compose(a),
                    shift: t.shift.clone(),
                })
                .collect();
            out.add_term(c.clone(), factors);
        }
        out
    }

    /// Distinct factors appearing in the sum.
    pub fn factors(&self) -> Vec<&TrigFactor> {
        let mut v: Vec<&TrigFactor> = self.terms.keys().flatten().collect();
        v.sort();
        v.dedup();
        v
    }

    /// Smallest sup-distance from Z of any factor argument at z.
    pub fn pole_distance(&self, z: &[Complex]) -> f64 {
        let zf: Vec<(f64, f64)> = z
            .iter()
            .map(|w| (w.real().to_f64(), w.imag().to_f64()))
            .collect();
        self.factors()
            .iter()
            .map(|t| {
                let (re, im) = t.form.eval_f64(&zf);
                let re = re + t.shift.to_f64();
                (re - re.round()).abs().max(im.abs())
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn eval(&self, z: &[Complex], ctx: &PrecisionContext) -> Result<Complex> {
        if z.len() != self.n && !self.terms.is_empty() {
            return Err(Error::Dimension {
                expected: self.n,
                got: z.len(),
            });
        }
        let bits = ctx.bits;
        let mut cache: HashMap<&TrigFactor, Complex> = HashMap::new();
        let mut acc = Complex::new(bits);
        for (f, c) in &self.terms {
            let mut prod = Complex::with_val(bits, Float::with_val(bits, c));
            for t in f {
                let e = match cache.get(t) {
                    Some(e) => e,
                    None => {
                        let arg = t.argument(z, bits);
                        if dist_to_integers(&arg) < crate::arith::POLE_DELTA {
                            return Err(Error::Pole {
                                delta: crate::arith::POLE_DELTA,
                            });
                        }
                        cache.entry(t).or_insert(epsilon_prec(&arg, bits)?)
                    }
                };
                prod *= e;
            }
            acc += prod;
        }
        Ok(acc * Float::with_val(bits, &self.scale))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let j = SumJson {
            scale: self.scale.clone(),
            terms: self
                .terms
                .iter()
                .map(|(f, c)| TermJson {
                    coeff: c.clone(),
                    factors: f.clone(),
                })
                .collect(),
        };
        serde_json::to_value(j).expect("formal sum serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let j: SumJson =
            serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        let n = j
            .terms
            .iter()
            .flat_map(|t| t.factors.first())
            .map(|f| f.form.dim())
            .next()
            .unwrap_or(0);
        let mut out = TrigFormalSum::with_scale(n, j.scale);
        for t in j.terms {
            let factors = t
                .factors
                .into_iter()
                .map(|f| TrigFactor::new(f.form, &f.shift))
                .collect();
            out.add_term(t.coeff, factors);
        }
        Ok(out)
    }

    fn absorb(&mut self, other: &TrigFormalSum, sign: i32) {
        if self.n == 0 && self.terms.is_empty() {
            self.n = other.n;
        }
        if self.scale == 0 {
            self.scale = Rational::from(1);
        }
        if self.scale != 1 {
            *self = self.normalized();
        }
        for (f, c) in &other.terms {
            let mut c = Rational::from(c * &other.scale);
            if sign < 0 {
                c = -c;
            }
            self.add_term(c, f.clone());
        }
    }
}

impl AddAssign<&TrigFormalSum> for TrigFormalSum {
    fn add_assign(&mut self, rhs: &TrigFormalSum) {
        self.absorb(rhs, 1);
    }
}

impl SubAssign<&TrigFormalSum> for TrigFormalSum {
    fn sub_assign(&mut self, rhs: &TrigFormalSum) {
        self.absorb(rhs, -1);
    }
}

impl Neg for TrigFormalSum {
    type Output = TrigFormalSum;
    fn neg(mut self) -> TrigFormalSum {
        self.scale = -self.scale;
        self
    }
}

/// Largest |v_i − mean(v)|, the deviation of a sampled function from a constant.
pub fn spread(values: &[Complex]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let bits = values[0].prec().0;
    let mut mean = Complex::new(bits);
    for v in values {
        mean += v;
    }
    mean /= values.len() as u32;
    values
        .iter()
        .map(|v| Complex::with_val(bits, v - &mean).abs().real().to_f64())
        .fold(0.0, f64::max)
}

pub fn mean(values: &[Complex]) -> Complex {
    let bits = values.first().map_or(64, |v| v.prec().0);
    let mut m = Complex::new(bits);
    for v in values {
        m += v;
    }
    if !values.is_empty() {
        m /= values.len() as u32;
    }
    m
}

pub fn abs_f64(z: &Complex) -> f64 {
    Complex::with_val(z.prec().0, z.abs_ref()).real().to_f64()
}
