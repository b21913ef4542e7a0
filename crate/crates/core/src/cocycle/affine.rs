use std::collections::BTreeMap;
use std::ops::{AddAssign, SubAssign};

use rug::{Integer, Rational};
use serde_json::json;

use super::trigsum::LinearFormQ;
use crate::arith::{format_rat, BigRat, IntMatrix, RatMatrix};
use crate::error::{Error, Result};

/// det(ℓ₁,…,ℓ_n)/∏ℓ_j(z), times the formal constant (2πi)^(−n) which is never evaluated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFunValue {
    pub det: BigRat,
    pub forms: Vec<LinearFormQ>,
}

impl RatFunValue {
    /// The value for the given forms; zero when they are dependent.
    pub fn from_forms(forms: Vec<LinearFormQ>) -> Result<Self> {
        let n = forms.len();
        if forms.iter().any(|f| f.dim() != n) {
            return Err(Error::Dimension {
                expected: n,
                got: forms.first().map_or(0, |f| f.dim()),
            });
        }
        let rows: Vec<Rational> = forms.iter().flat_map(|f| f.coeffs().to_vec()).collect();
        let det = RatMatrix::new(n, rows)?.det();
        Ok(RatFunValue { det, forms })
    }

    pub fn is_zero(&self) -> bool {
        self.det == 0
    }

    pub fn to_sum(&self) -> RatFunSum {
        let mut s = RatFunSum::zero(self.forms.len());
        s.add_product(self.det.clone(), self.forms.clone());
        s
    }

    pub fn eval(&self, z: &[BigRat]) -> Result<BigRat> {
        self.to_sum().eval(z)
    }
}

// primitive integral form with positive leading coefficient, and the factor removed
fn normalize_form(f: &LinearFormQ) -> Option<(LinearFormQ, BigRat)> {
    let lead = f.coeffs().iter().find(|c| **c != 0)?;
    let den = f
        .coeffs()
        .iter()
        .fold(Integer::from(1), |acc, c| acc.lcm(c.denom()));
    let num = f.coeffs().iter().fold(Integer::new(), |acc, c| {
        acc.gcd(&(Integer::from(c.numer() * &den) / c.denom()))
    });
    let mut scale = Rational::from((num, den));
    if *lead < 0 {
        scale = -scale;
    }
    let coeffs = f.coeffs().iter().map(|c| Rational::from(c / &scale)).collect();
    Some((LinearFormQ::new(coeffs), scale))
}

/// Σ coeff/∏ℓ_j(z) with canonical (primitive, positively led, sorted) forms.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RatFunSum {
    n: usize,
    terms: BTreeMap<Vec<LinearFormQ>, BigRat>,
}

impl RatFunSum {
    pub fn zero(n: usize) -> Self {
        RatFunSum {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds coeff/∏ forms. A zero form makes the term undefined, so it must not occur.
    pub fn add_product(&mut self, coeff: BigRat, forms: Vec<LinearFormQ>) {
        if coeff == 0 {
            return;
        }
        let mut c = coeff;
        let mut key = Vec::with_capacity(forms.len());
        for f in &forms {
            let (g, s) = normalize_form(f).expect("nonzero linear form");
            c /= s;
            key.push(g);
        }
        key.sort();
        let e = self.terms.entry(key.clone()).or_insert_with(Rational::new);
        *e += c;
        if *e == 0 {
            self.terms.remove(&key);
        }
    }

    pub fn eval(&self, z: &[BigRat]) -> Result<BigRat> {
        let mut acc = Rational::new();
        for (forms, c) in &self.terms {
            let mut den = Rational::from(1);
            for f in forms {
                let v = f.eval_rat(z);
                if v == 0 {
                    return Err(Error::Pole { delta: 0.0 });
                }
                den *= v;
            }
            acc += Rational::from(c / den);
        }
        Ok(acc)
    }

    /// True when no form in the sum vanishes at z.
    pub fn is_regular_at(&self, z: &[BigRat]) -> bool {
        self.terms.keys().flatten().all(|f| f.eval_rat(z) != 0)
    }

    fn absorb(&mut self, other: &RatFunSum, sign: i32) {
        if self.n == 0 {
            self.n = other.n;
        }
        for (forms, c) in &other.terms {
            let c = if sign > 0 { c.clone() } else { Rational::from(-c) };
            self.add_product(c, forms.clone());
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let terms: Vec<_> = self
            .terms
            .iter()
            .map(|(forms, c)| {
                json!({
                    "coeff": format_rat(c),
                    "forms": forms.iter().map(|f| f.coeffs().iter().map(format_rat).collect::<Vec<_>>()).collect::<Vec<_>>(),
                })
            })
            .collect();
        json!({"constant": format!("(2*pi*i)^-{}", self.n), "terms": terms})
    }
}

impl AddAssign<&RatFunSum> for RatFunSum {
    fn add_assign(&mut self, rhs: &RatFunSum) {
        self.absorb(rhs, 1);
    }
}

impl SubAssign<&RatFunSum> for RatFunSum {
    fn sub_assign(&mut self, rhs: &RatFunSum) {
        self.absorb(rhs, -1);
    }
}

/// ω_{ℓ₁} ∧ … ∧ ω_{ℓ_n} as a rational function; zero for dependent forms.
pub fn omega_wedge(forms: &[LinearFormQ]) -> Result<RatFunSum> {
    Ok(RatFunValue::from_forms(forms.to_vec())?.to_sum())
}

/// Σ_i (−1)^i ω_{ℓ₀} ∧ … ∧ ω̂_{ℓ_i} ∧ … ∧ ω_{ℓ_n} for n + 1 forms on C^n.
pub fn orlik_solomon_defect(forms: &[LinearFormQ]) -> Result<RatFunSum> {
    let mut out = RatFunSum::zero(forms.len().saturating_sub(1));
    for i in 0..forms.len() {
        let face: Vec<LinearFormQ> = forms
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != i)
            .map(|(_, f)| f.clone())
            .collect();
        let w = omega_wedge(&face)?;
        if i % 2 == 0 {
            out += &w;
        } else {
            out -= &w;
        }
    }
    Ok(out)
}

// ℓ_j(z) = det(u₁, …, z, …, u_n) with z in slot j: its kernel is spanned by the other u_i
fn annihilator_forms(us: &[Vec<Rational>]) -> Result<Vec<LinearFormQ>> {
    let n = us.len();
    let mut out = Vec::with_capacity(n);
    for j in 0..n {
        let mut coeffs = Vec::with_capacity(n);
        for k in 0..n {
            let cols: Vec<Vec<Rational>> = (0..n)
                .map(|i| {
                    if i == j {
                        (0..n).map(|r| Rational::from(u8::from(r == k))).collect()
                    } else {
                        us[i].clone()
                    }
                })
                .collect();
            coeffs.push(RatMatrix::from_columns(&cols)?.det());
        }
        out.push(LinearFormQ::new(coeffs));
    }
    Ok(out)
}

/// The affine cocycle on a tuple (g₁, …, g_n).
///
/// `dual = false`: ℓ_j = e₁^* ∘ g_j. `dual = true`: ℓ_j vanishes on the
/// g_i⁻¹e₁ with i ≠ j, and the value is 0 when those vectors are dependent.
pub fn saff(tuple: &[IntMatrix], dual: bool) -> Result<RatFunSum> {
    let n = tuple.len();
    if tuple.iter().any(|g| g.dim() != n) {
        return Err(Error::Dimension {
            expected: n,
            got: tuple.first().map_or(0, |g| g.dim()),
        });
    }
    let forms = if dual {
        let us: Vec<Vec<Rational>> = tuple
            .iter()
            .map(|g| g.inverse().map(|inv| inv.column(0)))
            .collect::<Result<_>>()?;
        let dep = RatMatrix::from_columns(&us)?.det() == 0;
        if dep {
            return Ok(RatFunSum::zero(n));
        }
        annihilator_forms(&us)?
    } else {
        for g in tuple {
            if g.det() == 0 {
                return Err(Error::SingularMatrix);
            }
        }
        tuple
            .iter()
            .map(|g| LinearFormQ::new(g.row(0).into_iter().map(Rational::from).collect()))
            .collect()
    };
    omega_wedge(&forms)
}

/// The affine symbol [v₁, …, v_n] ↦ 1/(det h · ∏(h⁻¹z)_j), zero when det h = 0.
pub fn saff_symbol(h: &IntMatrix) -> Result<RatFunSum> {
    if h.det() == 0 {
        return Ok(RatFunSum::zero(h.dim()));
    }
    let inv = h.inverse()?;
    let forms: Vec<LinearFormQ> = (0..h.dim()).map(|j| LinearFormQ::new(inv.row(j))).collect();
    omega_wedge(&forms)
}
