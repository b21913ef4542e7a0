use rayon::prelude::*;
use rug::float::Constant;
use rug::{Complex, Float, Rational};
use serde::{Deserialize, Serialize};

use super::e1::{expi, TauPoint};
use crate::arith::{frac, ComplexJson};
use crate::error::{Error, Result};
use crate::trigfun::epsilon_prec;

/// A q-series Σ_{r≤M} a_r q^r, truncated at M = coeffs.len() − 1.
#[derive(Clone, Debug, PartialEq)]
pub struct QExpansion {
    pub weight: i32,
    pub level: u64,
    pub coeffs: Vec<Complex>,
}

#[derive(Serialize, Deserialize)]
struct QExpansionJson {
    weight: i32,
    level: u64,
    #[serde(rename = "M")]
    m: usize,
    coeffs: Vec<ComplexJson>,
}

impl QExpansion {
    pub fn zero(weight: i32, level: u64, m: usize, bits: u32) -> Self {
        QExpansion {
            weight,
            level,
            coeffs: vec![Complex::new(bits); m + 1],
        }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    fn bits(&self) -> u32 {
        self.coeffs[0].prec().0
    }

    /// Sum, truncated at the smaller order.
    pub fn add(&self, other: &QExpansion) -> QExpansion {
        let m = self.order().min(other.order());
        QExpansion {
            weight: self.weight,
            level: self.level,
            coeffs: (0..=m)
                .map(|r| Complex::with_val(self.bits(), &self.coeffs[r] + &other.coeffs[r]))
                .collect(),
        }
    }

    pub fn scale(&self, s: &Complex) -> QExpansion {
        QExpansion {
            weight: self.weight,
            level: self.level,
            coeffs: self
                .coeffs
                .iter()
                .map(|c| Complex::with_val(self.bits(), c * s))
                .collect(),
        }
    }

    /// Cauchy product, truncated at the smaller order; weights add.
    pub fn mul(&self, other: &QExpansion) -> QExpansion {
        let m = self.order().min(other.order());
        let bits = self.bits();
        let coeffs = (0..=m)
            .into_par_iter()
            .map(|r| {
                let mut acc = Complex::new(bits);
                for i in 0..=r {
                    acc += Complex::with_val(bits, &self.coeffs[i] * &other.coeffs[r - i]);
                }
                acc
            })
            .collect();
        QExpansion {
            weight: self.weight + other.weight,
            level: self.level,
            coeffs,
        }
    }

    /// Σ a_r q^r with q = e(τ).
    pub fn eval(&self, tau: &TauPoint) -> Complex {
        let bits = self.bits();
        let q = expi(&Complex::with_val(bits, tau.value()));
        // Horner
        let mut acc = Complex::new(bits);
        for c in self.coeffs.iter().rev() {
            acc *= &q;
            acc += c;
        }
        acc
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(QExpansionJson {
            weight: self.weight,
            level: self.level,
            m: self.order(),
            coeffs: self.coeffs.iter().map(ComplexJson::from_complex).collect(),
        })
        .expect("serializable")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let j: QExpansionJson = serde_json::from_value(v.clone()).map_err(|e| Error::Parse(e.to_string()))?;
        if j.coeffs.len() != j.m + 1 {
            return Err(Error::Parse(format!("M = {} but {} coefficients", j.m, j.coeffs.len())));
        }
        Ok(QExpansion {
            weight: j.weight,
            level: j.level,
            coeffs: j.coeffs.iter().map(|c| c.to_complex()).collect::<Result<_>>()?,
        })
    }
}

/// E₁(τ, a/N) as a q-series: constant term ε(a/N) and
/// coefficient Σ_{km=r} (ζ^(−ak) − ζ^(ak)) at q^r, ζ = e(1/N).
pub fn e1_qexp(a: i64, level: u64, m: usize, bits: u32) -> Result<QExpansion> {
    let n = level as i64;
    if level == 0 || a.rem_euclid(n) == 0 {
        return Err(Error::PoleAtCusp { a, level: n });
    }
    let x = Float::with_val(bits, a.rem_euclid(n)) / level;
    let mut out = QExpansion::zero(1, level, m, bits);
    out.coeffs[0] = epsilon_prec(&Complex::with_val(bits, (x, 0)), bits)?;
    // ζ^(ak) − ζ^(−ak) = 2i·sin(2πak/N); the coefficient is its negative
    let sines: Vec<Float> = (0..n)
        .map(|k| {
            let ang = Float::with_val(bits, Constant::Pi) * 2u32 * (a.rem_euclid(n) * k % n) / level;
            ang.sin()
        })
        .collect();
    for k in 1..=m {
        let mut r = k;
        while r <= m {
            let s = &sines[(k as i64 % n) as usize];
            *out.coeffs[r].mut_imag() -= Float::with_val(bits, s * 2u32);
            r += k;
        }
    }
    Ok(out)
}

/// A Dirichlet character mod `modulus`, stored as exact phases:
/// χ(x) = e(phase(x)) for gcd(x, modulus) = 1, and 0 otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirichletCharacter {
    modulus: u64,
    phases: Vec<Option<Rational>>,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn factor(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

fn mult_order(g: u64, m: u64) -> u64 {
    let mut x = g % m;
    let mut k = 1;
    while x != 1 % m {
        x = x * g % m;
        k += 1;
    }
    k
}

// generators of (Z/p^e)^* with their orders
fn local_generators(p: u64, e: u32) -> Vec<(u64, u64)> {
    let pe = p.pow(e);
    if p == 2 {
        return match e {
            1 => vec![],
            2 => vec![(3, 2)],
            _ => vec![(pe - 1, 2), (5, pe / 4)],
        };
    }
    let phi = pe / p * (p - 1);
    let g = (2..pe)
        .find(|&g| g % p != 0 && mult_order(g, pe) == phi)
        .expect("odd prime powers have primitive roots");
    vec![(g, phi)]
}

// x ≡ r mod m₁, x ≡ 1 mod m₂ with coprime moduli
fn crt_one(r: u64, m1: u64, m2: u64) -> u64 {
    (0..m2).map(|k| r + k * m1).find(|x| x % m2 == 1 % m2).unwrap_or(r) % (m1 * m2)
}

impl DirichletCharacter {
    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn trivial(modulus: u64) -> Self {
        let phases = (0..modulus)
            .map(|x| (gcd(x, modulus) == 1).then(Rational::new))
            .collect();
        DirichletCharacter { modulus, phases }
    }

    /// All φ(m) characters mod m, the trivial one first.
    pub fn all(modulus: u64) -> Vec<Self> {
        if modulus == 1 {
            return vec![Self::trivial(1)];
        }
        let fac = factor(modulus);
        let mut gens: Vec<(u64, u64)> = Vec::new();
        for &(p, e) in &fac {
            let pe = p.pow(e);
            for (g, ord) in local_generators(p, e) {
                gens.push((crt_one(g, pe, modulus / pe), ord));
            }
        }
        // exponent vectors enumerate the group and, separately, the dual group
        let tuples = |ords: &[u64]| -> Vec<Vec<u64>> {
            let mut out = vec![vec![]];
            for &o in ords {
                out = out
                    .into_iter()
                    .flat_map(|t| {
                        (0..o).map(move |k| {
                            let mut t = t.clone();
                            t.push(k);
                            t
                        })
                    })
                    .collect();
            }
            out
        };
        let ords: Vec<u64> = gens.iter().map(|g| g.1).collect();
        let elems: Vec<(u64, Vec<u64>)> = tuples(&ords)
            .into_iter()
            .map(|ks| {
                let x = gens
                    .iter()
                    .zip(&ks)
                    .fold(1 % modulus, |acc, (&(g, _), &k)| {
                        (0..k).fold(acc, |a, _| a * g % modulus)
                    });
                (x, ks)
            })
            .collect();
        tuples(&ords)
            .into_iter()
            .map(|js| {
                let mut phases = vec![None; modulus as usize];
                for (x, ks) in &elems {
                    let mut ph = Rational::new();
                    for ((j, k), o) in js.iter().zip(ks).zip(&ords) {
                        ph += Rational::from((j * k, *o));
                    }
                    phases[*x as usize] = Some(frac(&ph));
                }
                DirichletCharacter { modulus, phases }
            })
            .collect()
    }

    pub fn phase(&self, x: i64) -> Option<&Rational> {
        self.phases[x.rem_euclid(self.modulus as i64) as usize].as_ref()
    }

    pub fn value(&self, x: i64, bits: u32) -> Complex {
        match self.phase(x) {
            None => Complex::new(bits),
            Some(p) => expi(&Complex::with_val(bits, (Float::with_val(bits, p), 0))),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.phases.iter().flatten().all(|p| *p == 0)
    }

    pub fn is_even(&self) -> bool {
        self.phase(-1).is_some_and(|p| *p == 0)
    }

    /// Smallest d | m such that χ is trivial on the units ≡ 1 mod d.
    pub fn conductor(&self) -> u64 {
        let m = self.modulus;
        (1..=m)
            .filter(|d| m % d == 0)
            .find(|&d| {
                (0..m).all(|x| x % d != 1 % d || self.phases[x as usize].as_ref().is_none_or(|p| *p == 0))
            })
            .unwrap_or(m)
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor() == self.modulus
    }

    pub fn primitive(modulus: u64) -> Vec<Self> {
        Self::all(modulus).into_iter().filter(|c| c.is_primitive()).collect()
    }

    /// χ₁χ₂ as a character mod lcm of the moduli.
    pub fn product(&self, other: &DirichletCharacter) -> DirichletCharacter {
        let m = self.modulus / gcd(self.modulus, other.modulus) * other.modulus;
        let phases = (0..m as i64)
            .map(|x| match (self.phase(x), other.phase(x)) {
                (Some(a), Some(b)) => Some(frac(&Rational::from(a + b))),
                _ => None,
            })
            .collect();
        DirichletCharacter { modulus: m, phases }
    }
}

/// L(−1, φ) = −B_{2,φ}/2 with B_{2,φ} = v Σ_{a=1}^{v} φ(a) B₂(a/v), B₂(x) = x² − x + 1/6.
fn l_minus_one(phi: &DirichletCharacter, bits: u32) -> Complex {
    let v = phi.modulus() as i64;
    let mut b2 = Complex::new(bits);
    for a in 1..=v {
        let x = Rational::from((a, v));
        let poly = Rational::from(&x * &x) - &x + Rational::from((1, 6));
        b2 += phi.value(a, bits) * Float::with_val(bits, &poly);
    }
    b2 * v / -2i32
}

/// One member of the weight-2 Eisenstein family, with its label.
#[derive(Clone, Debug)]
pub struct EisensteinSeries {
    pub label: String,
    pub series: QExpansion,
}

fn sigma_coeffs(psi: &DirichletCharacter, phi: &DirichletCharacter, m: usize, bits: u32) -> Vec<Complex> {
    let mut out = vec![Complex::new(bits); m + 1];
    for d in 1..=m {
        let pd = phi.value(d as i64, bits) * d as u64;
        let mut n = d;
        while n <= m {
            out[n] += Complex::with_val(bits, psi.value((n / d) as i64, bits) * &pd);
            n += d;
        }
    }
    out
}

/// The weight-2 Eisenstein series of level N up to q^M:
/// E₂^{ψ,φ}(q^t) = δ(ψ)L(−1, φ) + 2Σ σ₁^{ψ,φ}(n) q^{nt} for primitive ψ mod u,
/// φ mod v with ψφ even and uvt | N, except ψ = φ = 1 where the holomorphic
/// combinations E₂(q) − tE₂(q^t), t > 1, are used instead.
pub fn eisenstein2_basis(level: u64, m: usize, bits: u32) -> Vec<EisensteinSeries> {
    let divisors: Vec<u64> = (1..=level).filter(|d| level % d == 0).collect();
    let mut out = Vec::new();
    for &u in &divisors {
        for &v in &divisors {
            if level % (u * v) != 0 {
                continue;
            }
            let psis = DirichletCharacter::primitive(u);
            let phis = DirichletCharacter::primitive(v);
            for (i, psi) in psis.iter().enumerate() {
                for (k, phi) in phis.iter().enumerate() {
                    if !psi.product(phi).is_even() {
                        continue;
                    }
                    let sig = sigma_coeffs(psi, phi, m, bits);
                    let constant = if u == 1 { l_minus_one(phi, bits) } else { Complex::new(bits) };
                    let base = |t: usize| {
                        let mut s = QExpansion::zero(2, level, m, bits);
                        s.coeffs[0] = constant.clone();
                        for n in 1..=m / t {
                            s.coeffs[n * t] = Complex::with_val(bits, &sig[n] * 2u32);
                        }
                        s
                    };
                    for &t in &divisors {
                        if level % (u * v * t) != 0 {
                            continue;
                        }
                        let series = if u == 1 && v == 1 {
                            if t == 1 {
                                continue;
                            }
                            base(1).add(&base(t as usize).scale(&Complex::with_val(bits, -(t as i64))))
                        } else {
                            base(t as usize)
                        };
                        out.push(EisensteinSeries {
                            label: format!("psi={u}#{i},phi={v}#{k},t={t}"),
                            series,
                        });
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{IntMatrix, PrecisionContext};
    use crate::elliptic::e1::e1;

    fn abs(z: &Complex) -> f64 {
        z.clone().abs().real().to_f64()
    }

    #[test]
    fn character_counts_and_multiplicativity() {
        for (m, total, prim) in [(5, 4, 3), (7, 6, 5), (8, 4, 2), (12, 4, 1), (9, 6, 4), (1, 1, 1), (4, 2, 1)] {
            let all = DirichletCharacter::all(m);
            assert_eq!(all.len(), total, "mod {m}");
            assert_eq!(DirichletCharacter::primitive(m).len(), prim, "mod {m}");
            for chi in &all {
                for x in 0..m as i64 {
                    for y in 0..m as i64 {
                        let lhs = chi.phase(x * y);
                        match (chi.phase(x), chi.phase(y)) {
                            (Some(a), Some(b)) => assert_eq!(lhs, Some(&frac(&Rational::from(a + b)))),
                            _ => assert!(lhs.is_none()),
                        }
                    }
                }
            }
            assert!(all[0].is_trivial());
        }
    }

    #[test]
    fn e1_expansion_constant_and_oddness() {
        let e = e1_qexp(2, 7, 30, 128).unwrap();
        let f = e1_qexp(5, 7, 30, 128).unwrap();
        for r in 0..=30 {
            assert!(abs(&Complex::with_val(128, &e.coeffs[r] + &f.coeffs[r])) < 1e-35);
        }
        assert!(matches!(e1_qexp(7, 7, 10, 128), Err(Error::PoleAtCusp { .. })));
    }

    #[test]
    fn e1_expansion_matches_evaluator() {
        let ctx = PrecisionContext::default();
        let tau = TauPoint::from_f64(0.1, 0.8, &ctx).unwrap();
        for a in 1..5 {
            let s = e1_qexp(a, 5, 60, 128).unwrap();
            let z = Complex::with_val(128, (Float::with_val(128, a) / 5u32, 0));
            let direct = e1(&tau, &z, &ctx).unwrap();
            assert!(abs(&(s.eval(&tau) - direct)) < 1e-25);
        }
    }

    #[test]
    fn basis_sizes_and_trivial_pair() {
        assert_eq!(eisenstein2_basis(1, 10, 128).len(), 0);
        assert_eq!(eisenstein2_basis(2, 10, 128).len(), 1);
        assert_eq!(eisenstein2_basis(5, 10, 128).len(), 3);
        assert_eq!(eisenstein2_basis(7, 10, 128).len(), 5);
        // E₂(q) − 2E₂(q²) = 1/12 + 2q + ...
        let b = &eisenstein2_basis(2, 10, 128)[0].series;
        assert!(abs(&(b.coeffs[0].clone() - Float::with_val(128, 1) / 12u32)) < 1e-35);
        assert!(abs(&(b.coeffs[1].clone() - 2u32)) < 1e-35);
    }

    #[test]
    fn basis_is_modular_of_weight_two() {
        let ctx = PrecisionContext::default();
        for level in [5u64, 7] {
            let n = level as f64;
            let g = IntMatrix::from_i64(2, &[1, 0, level as i64, 1]);
            let tau = TauPoint::from_f64(-1.0 / n, 1.0 / n, &ctx).unwrap();
            let (gt, j) = tau.act(&g).unwrap();
            for b in eisenstein2_basis(level, 160, 128) {
                let lhs = b.series.eval(&gt);
                let rhs = b.series.eval(&tau) * Complex::with_val(128, &j * &j);
                assert!(abs(&(lhs - rhs)) < 1e-20, "{}", b.label);
            }
        }
    }

    #[test]
    fn json_round_trip() {
        let e = e1_qexp(1, 5, 4, 128).unwrap();
        let back = QExpansion::from_json(&e.to_json()).unwrap();
        for r in 0..=4 {
            assert!(abs(&Complex::with_val(128, &back.coeffs[r] - &e.coeffs[r])) < 1e-35);
        }
        assert_eq!(e.to_json()["M"], 4);
    }
}
