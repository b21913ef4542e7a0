//! Cusps, unimodular (Manin) decomposition and relation checkers for
//! evaluators defined on modular symbols.

use std::fmt;
use std::ops::{AddAssign, SubAssign};
use std::str::FromStr;

use rug::{Complex, Integer, Rational};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{continued_fraction, IntMatrix};
use crate::cocycle::{abs_f64, spread, LinearFormQ, TrigFactor, TrigFormalSum};
use crate::error::{Error, Result};

/// Values an evaluator may take: anything that can be summed with signs.
pub trait Additive: Clone + Default + for<'a> AddAssign<&'a Self> + for<'a> SubAssign<&'a Self> {}

impl<T> Additive for T where
    T: Clone + Default + for<'a> AddAssign<&'a T> + for<'a> SubAssign<&'a T>
{
}

/// A list of numeric values at a fixed set of sample points, added pointwise.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Sampled(pub Vec<Complex>);

impl Sampled {
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(abs_f64).fold(0.0, f64::max)
    }

    /// Deviation from a constant function.
    pub fn spread(&self) -> f64 {
        spread(&self.0)
    }

    fn combine(&mut self, rhs: &Sampled, sign: i32) {
        if self.0.is_empty() {
            self.0 = rhs
                .0
                .iter()
                .map(|v| Complex::with_val(v.prec(), 0))
                .collect();
        }
        for (a, b) in self.0.iter_mut().zip(&rhs.0) {
            if sign > 0 {
                *a += b;
            } else {
                *a -= b;
            }
        }
    }
}

impl AddAssign<&Sampled> for Sampled {
    fn add_assign(&mut self, rhs: &Sampled) {
        self.combine(rhs, 1);
    }
}

impl SubAssign<&Sampled> for Sampled {
    fn sub_assign(&mut self, rhs: &Sampled) {
        self.combine(rhs, -1);
    }
}

/// A point of P¹(Q), stored as a primitive vector (p, q) with q ≥ 0; ∞ = (1, 0).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cusp {
    p: Integer,
    q: Integer,
}

impl Cusp {
    pub fn new(p: Integer, q: Integer) -> Result<Self> {
        if p == 0 && q == 0 {
            return Err(Error::Parse("cusp (0, 0)".into()));
        }
        if q == 0 {
            return Ok(Cusp::infinity());
        }
        let g = Integer::from(p.gcd_ref(&q));
        let (mut p, mut q) = (p / &g, q / g);
        if q < 0 {
            p = -p;
            q = -q;
        }
        Ok(Cusp { p, q })
    }

    pub fn from_i64(p: i64, q: i64) -> Result<Self> {
        Cusp::new(Integer::from(p), Integer::from(q))
    }

    pub fn infinity() -> Self {
        Cusp {
            p: Integer::from(1),
            q: Integer::new(),
        }
    }

    pub fn from_rational(x: &Rational) -> Self {
        Cusp {
            p: x.numer().clone(),
            q: x.denom().clone(),
        }
    }

    pub fn is_infinity(&self) -> bool {
        self.q == 0
    }

    pub fn p(&self) -> &Integer {
        &self.p
    }

    pub fn q(&self) -> &Integer {
        &self.q
    }

    /// Image under a 2×2 integer matrix acting by Möbius transformation.
    pub fn act(&self, g: &IntMatrix) -> Result<Cusp> {
        let v = g.mul_vec(&[self.p.clone(), self.q.clone()]);
        let [p, q]: [Integer; 2] = v.try_into().map_err(|_| Error::Dimension {
            expected: 2,
            got: g.dim(),
        })?;
        Cusp::new(p, q)
    }

    /// Image of the column vector (a, c) of a matrix.
    fn of_column(a: &Integer, c: &Integer) -> Cusp {
        Cusp::new(a.clone(), c.clone()).expect("column of an invertible matrix")
    }
}

impl fmt::Display for Cusp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinity() {
            write!(f, "inf")
        } else if self.q == 1 {
            write!(f, "{}", self.p)
        } else {
            write!(f, "{}/{}", self.p, self.q)
        }
    }
}

impl FromStr for Cusp {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("inf") || s == "∞" {
            return Ok(Cusp::infinity());
        }
        let (p, q) = match s.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (s, "1"),
        };
        let parse = |t: &str| {
            Integer::from_str(t).map_err(|e| Error::Parse(format!("cusp {s:?}: {e}")))
        };
        Cusp::new(parse(p)?, parse(q)?)
    }
}

impl Serialize for Cusp {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Cusp {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Σ sign_k·[g_k ∞, g_k 0], each g_k of determinant 1. A sign −1 reverses
/// the orientation, so the term runs from g_k 0 to g_k ∞.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SignedSymbolChain {
    terms: Vec<(i8, IntMatrix)>,
}

impl SignedSymbolChain {
    pub fn terms(&self) -> &[(i8, IntMatrix)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Oriented endpoints of the k-th term.
    pub fn endpoints(&self, k: usize) -> (Cusp, Cusp) {
        let (sign, g) = &self.terms[k];
        let inf = Cusp::of_column(&g[(0, 0)], &g[(1, 0)]);
        let zero = Cusp::of_column(&g[(0, 1)], &g[(1, 1)]);
        if *sign > 0 {
            (inf, zero)
        } else {
            (zero, inf)
        }
    }

    /// True when the oriented terms form a path from r to s and every determinant is 1.
    pub fn telescopes(&self, r: &Cusp, s: &Cusp) -> bool {
        if self.terms.iter().any(|(_, g)| g.det() != 1) {
            return false;
        }
        let mut cur = r.clone();
        for k in 0..self.len() {
            let (a, b) = self.endpoints(k);
            if a != cur {
                return false;
            }
            cur = b;
        }
        cur == *s
    }

    pub fn evaluate<V: Additive, F>(&self, eval: &F) -> Result<V>
    where
        F: Fn(&IntMatrix) -> Result<V>,
    {
        let mut acc = V::default();
        for (sign, g) in &self.terms {
            let v = eval(g)?;
            if *sign > 0 {
                acc += &v;
            } else {
                acc -= &v;
            }
        }
        Ok(acc)
    }
}

// {∞, s} through the convergents of s, all signs +1.
fn chain_from_infinity(s: &Cusp) -> Vec<IntMatrix> {
    if s.is_infinity() {
        return Vec::new();
    }
    let mut conv = vec![(Integer::from(1), Integer::new())];
    conv.extend(continued_fraction(&s.p, &s.q));
    conv.windows(2)
        .map(|w| {
            let ((a, c), (b, d)) = (&w[0], &w[1]);
            let det = Integer::from(a * d) - Integer::from(b * c);
            let (b, d) = if det == 1 {
                (b.clone(), d.clone())
            } else {
                (Integer::from(-b), Integer::from(-d))
            };
            IntMatrix::new(2, vec![a.clone(), b, c.clone(), d]).expect("2x2")
        })
        .collect()
}

/// Decomposes {r, s} into unimodular symbols whose oriented endpoints telescope from r to s.
pub fn manin_decompose(r: &Cusp, s: &Cusp) -> SignedSymbolChain {
    if r == s {
        return SignedSymbolChain::default();
    }
    if r.is_infinity() {
        return SignedSymbolChain {
            terms: chain_from_infinity(s).into_iter().map(|g| (1, g)).collect(),
        };
    }
    if s.is_infinity() {
        let mut terms: Vec<(i8, IntMatrix)> =
            chain_from_infinity(r).into_iter().map(|g| (-1, g)).collect();
        terms.reverse();
        return SignedSymbolChain { terms };
    }
    // move r to ∞ with γ = [[p, u], [q, v]] ∈ SL₂(Z)
    let (_, u0, v0) = r.p.clone().extended_gcd(r.q.clone(), Integer::new());
    // p·u0 + q·v0 = 1, so γ = [[p, −v0], [q, u0]]
    let gamma = IntMatrix::new(2, vec![r.p.clone(), -v0, r.q.clone(), u0]).expect("2x2");
    let inv = gamma.unimodular_inverse().expect("det 1");
    let s0 = s.act(&inv).expect("invertible");
    SignedSymbolChain {
        terms: chain_from_infinity(&s0)
            .into_iter()
            .map(|g| (1, &gamma * &g))
            .collect(),
    }
}

/// Extends an evaluator on unimodular matrices to the symbol {r, s}.
pub fn symbol_value<V: Additive, F>(eval: &F, r: &Cusp, s: &Cusp) -> Result<V>
where
    F: Fn(&IntMatrix) -> Result<V>,
{
    manin_decompose(r, s).evaluate(eval)
}

/// ({r,s} + {s,r}, {r,s} + {s,t} + {t,r}) through the evaluator.
pub fn check_two_three_term<V: Additive, F>(eval: &F, r: &Cusp, s: &Cusp, t: &Cusp) -> Result<(V, V)>
where
    F: Fn(&IntMatrix) -> Result<V>,
{
    let rs: V = symbol_value(eval, r, s)?;
    let sr: V = symbol_value(eval, s, r)?;
    let st: V = symbol_value(eval, s, t)?;
    let tr: V = symbol_value(eval, t, r)?;
    let mut two = rs.clone();
    two += &sr;
    let mut three = rs;
    three += &st;
    three += &tr;
    Ok((two, three))
}

/// The function c(g)(x, y) = ε(dx − by)·ε(−cx + ay) for g = [[a, b], [c, d]].
pub fn observation_symbol(g: &IntMatrix) -> TrigFormalSum {
    let (a, b, c, d) = (&g[(0, 0)], &g[(0, 1)], &g[(1, 0)], &g[(1, 1)]);
    let f1 = LinearFormQ::new(vec![Rational::from(d), Rational::from(-b)]);
    let f2 = LinearFormQ::new(vec![Rational::from(-c), Rational::from(a)]);
    let zero = Rational::new();
    let mut out = TrigFormalSum::zero(2);
    out.add_term(
        Rational::from(1),
        vec![TrigFactor::new(f1, &zero), TrigFactor::new(f2, &zero)],
    );
    out
}

/// Defects of the Ash–Rudolph relations for an evaluator on matrices of column vectors.
#[derive(Clone, Debug)]
pub struct AshRudolphDefects<V> {
    /// Σ_j (−1)^j [v_0, …, v̂_j, …, v_n]
    pub alternating: V,
    /// [v_1, v_2, …] + [v_2, v_1, …]
    pub antisymmetry: V,
    /// [−v_1, v_2, …] − [v_1, v_2, …]
    pub homogeneity: V,
    /// [v_1, v_1, v_3, …], a degenerate symbol
    pub degeneracy: V,
}

fn matrix_from_vectors(vs: &[&Vec<Integer>]) -> Result<IntMatrix> {
    let cols: Vec<Vec<Integer>> = vs.iter().map(|v| (*v).clone()).collect();
    IntMatrix::from_columns(&cols)
}

pub fn ash_rudolph_check<V: Additive, F>(eval: &F, vectors: &[Vec<Integer>]) -> Result<AshRudolphDefects<V>>
where
    F: Fn(&IntMatrix) -> Result<V>,
{
    let n = vectors.len().saturating_sub(1);
    if n < 2 || vectors.iter().any(|v| v.len() != n) {
        return Err(Error::Dimension {
            expected: n,
            got: vectors.first().map_or(0, |v| v.len()),
        });
    }
    let mut alternating = V::default();
    for j in 0..=n {
        let face: Vec<&Vec<Integer>> = vectors
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != j)
            .map(|(_, v)| v)
            .collect();
        let v = eval(&matrix_from_vectors(&face)?)?;
        if j % 2 == 0 {
            alternating += &v;
        } else {
            alternating -= &v;
        }
    }

    let base: Vec<&Vec<Integer>> = vectors[1..].iter().collect();
    let h = matrix_from_vectors(&base)?;
    let vh = eval(&h)?;

    let mut swapped = base.clone();
    swapped.swap(0, 1);
    let mut antisymmetry = vh.clone();
    antisymmetry += &eval(&matrix_from_vectors(&swapped)?)?;

    let neg: Vec<Integer> = base[0].iter().map(|x| Integer::from(-x)).collect();
    let mut negated = base.clone();
    negated[0] = &neg;
    let mut homogeneity = eval(&matrix_from_vectors(&negated)?)?;
    homogeneity -= &vh;

    let mut degenerate = base.clone();
    degenerate[1] = base[0];
    let degeneracy = eval(&matrix_from_vectors(&degenerate)?)?;

    Ok(AshRudolphDefects {
        alternating,
        antisymmetry,
        homogeneity,
        degeneracy,
    })
}

/// The matrices R, P, U of the elementary relations, as column lists:
/// R = (−e₂ | e₁ | e₃ | …), P = (e₂ | e₃ | … | (−1)^{n+1} e₁), U = (−e₁ − e₂ | e₁ | e₃ | …).
pub fn bykovskii_matrices(n: usize) -> (IntMatrix, IntMatrix, IntMatrix) {
    assert!(n >= 2);
    let e = |i: usize, s: i64| -> Vec<Integer> {
        (0..n)
            .map(|k| Integer::from(if k == i { s } else { 0 }))
            .collect()
    };
    let mut r_cols = vec![e(1, -1), e(0, 1)];
    let mut u_cols = vec![
        (0..n)
            .map(|k| Integer::from(if k < 2 { -1 } else { 0 }))
            .collect(),
        e(0, 1),
    ];
    for i in 2..n {
        r_cols.push(e(i, 1));
        u_cols.push(e(i, 1));
    }
    let mut p_cols: Vec<Vec<Integer>> = (1..n).map(|i| e(i, 1)).collect();
    p_cols.push(e(0, if n % 2 == 1 { 1 } else { -1 }));
    (
        IntMatrix::from_columns(&r_cols).unwrap(),
        IntMatrix::from_columns(&p_cols).unwrap(),
        IntMatrix::from_columns(&u_cols).unwrap(),
    )
}

/// ([h] + [hR], [h] + (−1)^n [hP], [h] + [hU] + [hU²]).
pub fn bykovskii_check<V: Additive, F>(eval: &F, h: &IntMatrix) -> Result<[V; 3]>
where
    F: Fn(&IntMatrix) -> Result<V>,
{
    let n = h.dim();
    let (r, p, u) = bykovskii_matrices(n);
    let vh = eval(h)?;
    let mut d1 = vh.clone();
    d1 += &eval(&(h * &r))?;
    let mut d2 = vh.clone();
    let vp = eval(&(h * &p))?;
    if n % 2 == 0 {
        d2 += &vp;
    } else {
        d2 -= &vp;
    }
    let hu = h * &u;
    let mut d3 = vh;
    d3 += &eval(&hu)?;
    d3 += &eval(&(&hu * &u))?;
    Ok([d1, d2, d3])
}
