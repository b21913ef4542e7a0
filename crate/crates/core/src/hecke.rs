//! Hecke double cosets for the diagonal classes diag(p,…,p,1,…,1) of
//! Γ₀(N, n), the transport permutation, and Hecke operators on evaluators.

use rayon::prelude::*;
use rug::{Complex, Integer, Rational};
use serde::Serialize;

use crate::arith::{gamma0_membership, random_samples, IntMatrix, PrecisionContext, RatMatrix};
use crate::cocycle::{mean, spread, TrigFormalSum};
use crate::error::{Error, Result};
use crate::modsym::{observation_symbol, symbol_value, Cusp};

/// The Gaussian binomial (n choose k)_p.
pub fn gaussian_binomial(n: u32, k: u32, p: u64) -> Integer {
    if k > n {
        return Integer::new();
    }
    let p = Integer::from(p);
    let mut num = Integer::from(1);
    let mut den = Integer::from(1);
    for i in 0..k {
        num *= Integer::from(rug::ops::Pow::pow(&p, n - i)) - 1u32;
        den *= Integer::from(rug::ops::Pow::pow(&p, i + 1)) - 1u32;
    }
    num / den
}

/// How a Hecke representative pulls back a value: plain functions are
/// precomposed with z ↦ a z; n-forms also pick up the factor det a.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pullback {
    Function,
    Form,
}

/// Left coset representatives of Γ a Γ for Γ = Γ₀(N, n) and a = diag(p,…,p,1,…,1) with k entries p.
#[derive(Clone, Debug, Serialize)]
pub struct CosetSystem {
    pub n: usize,
    pub level: u64,
    pub p: u64,
    pub k: usize,
    pub reps: Vec<IntMatrix>,
}

fn is_prime(p: u64) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

fn in_group(m: &RatMatrix, level: u64) -> bool {
    match m.to_integer() {
        Some(mi) => gamma0_membership(&mi, level),
        None => false,
    }
}

// all upper-triangular Hermite forms with the given diagonal
fn hermite_forms(diag: &[u64]) -> Vec<IntMatrix> {
    let n = diag.len();
    let mut slots = Vec::new();
    for j in 0..n {
        for i in 0..j {
            slots.push((i, j, diag[j]));
        }
    }
    let mut out = Vec::new();
    let mut counter = vec![0u64; slots.len()];
    loop {
        let mut m = IntMatrix::zero(n);
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = Integer::from(d);
        }
        for (s, &(i, j, _)) in slots.iter().enumerate() {
            m[(i, j)] = Integer::from(counter[s]);
        }
        out.push(m);
        let mut s = 0;
        loop {
            if s == slots.len() {
                return out;
            }
            counter[s] += 1;
            if counter[s] < slots[s].2 {
                break;
            }
            counter[s] = 0;
            s += 1;
        }
    }
}

impl CosetSystem {
    /// The single representative I, so that the Hecke operator is the identity.
    pub fn trivial(n: usize, level: u64) -> Self {
        CosetSystem {
            n,
            level,
            p: 1,
            k: 0,
            reps: vec![IntMatrix::identity(n)],
        }
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    /// Checks a_i a_j⁻¹ ∉ Γ for all i ≠ j.
    pub fn pairwise_distinct(&self) -> bool {
        let invs: Vec<RatMatrix> = self.reps.iter().map(|a| a.inverse().unwrap()).collect();
        for i in 0..self.len() {
            for j in 0..self.len() {
                if i != j && in_group(&(&self.reps[i].to_rational() * &invs[j]), self.level) {
                    return false;
                }
            }
        }
        true
    }
}

/// Representatives of Γ₀(N,n)·diag(p^(k), 1^(n−k))·Γ₀(N,n) modulo Γ₀(N,n) on the left.
pub fn coset_reps(n: usize, p: u64, k: usize, level: u64) -> Result<CosetSystem> {
    if !is_prime(p) {
        return Err(Error::BadModulus(format!("p = {p} is not prime")));
    }
    if level % p == 0 {
        return Err(Error::BadLevel { p, level });
    }
    if k > n || n == 0 {
        return Err(Error::Dimension { expected: n, got: k });
    }
    let mut candidates = Vec::new();
    // choose which diagonal slots carry p
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let diag: Vec<u64> = (0..n)
            .map(|i| if mask >> i & 1 == 1 { p } else { 1 })
            .collect();
        for m in hermite_forms(&diag) {
            // elementary divisors in {1, p}: p·m⁻¹ must be integral
            let adj = m.adjugate();
            let det = m.det();
            let pp = Integer::from(p);
            let ok = adj
                .entries()
                .iter()
                .all(|x| Integer::from(x * &pp).is_divisible(&det));
            if ok {
                candidates.push(m);
            }
        }
    }
    // keep one matrix per left coset
    let mut reps: Vec<IntMatrix> = Vec::new();
    let mut invs: Vec<RatMatrix> = Vec::new();
    for m in candidates {
        let mr = m.to_rational();
        if invs.iter().any(|inv| in_group(&(&mr * inv), level)) {
            continue;
        }
        invs.push(m.inverse()?);
        reps.push(m);
    }
    Ok(CosetSystem {
        n,
        level,
        p,
        k,
        reps,
    })
}

/// σ and the elements g^(j) = a_σ(j) g a_j⁻¹ ∈ Γ.
///
/// With this convention σ_{g₁g₂} = σ_{g₁} ∘ σ_{g₂} and
/// (g₁g₂)^(j) = g₁^(σ_{g₂}(j)) · g₂^(j).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transport {
    pub sigma: Vec<usize>,
    pub elements: Vec<IntMatrix>,
}

impl Transport {
    pub fn is_permutation(&self) -> bool {
        let mut seen = vec![false; self.sigma.len()];
        for &i in &self.sigma {
            if i >= seen.len() || seen[i] {
                return false;
            }
            seen[i] = true;
        }
        true
    }
}

pub fn transport(g: &IntMatrix, system: &CosetSystem) -> Result<Transport> {
    if !gamma0_membership(g, system.level) {
        return Err(Error::NotInGroup(g.to_string()));
    }
    let mut sigma = Vec::with_capacity(system.len());
    let mut elements = Vec::with_capacity(system.len());
    for aj in &system.reps {
        let right = &g.to_rational() * &aj.inverse()?;
        let mut found = None;
        for (i, ai) in system.reps.iter().enumerate() {
            let cand = &ai.to_rational() * &right;
            if let Some(m) = cand.to_integer() {
                if gamma0_membership(&m, system.level) {
                    found = Some((i, m));
                    break;
                }
            }
        }
        let (i, m) = found.ok_or(Error::CosetMatchFailure)?;
        sigma.push(i);
        elements.push(m);
    }
    let t = Transport { sigma, elements };
    if !t.is_permutation() {
        return Err(Error::CosetMatchFailure);
    }
    Ok(t)
}

fn weight(a: &IntMatrix, pb: Pullback) -> Rational {
    match pb {
        Pullback::Function => Rational::from(1),
        Pullback::Form => Rational::from(a.det()),
    }
}

/// T(a)c(g₁,…,g_n) = Σ_j a_j^* c(g₁^(j), …, g_n^(j)).
pub fn apply_hecke_cocycle<F>(
    system: &CosetSystem,
    eval: &F,
    tuple: &[IntMatrix],
    pullback: Pullback,
) -> Result<TrigFormalSum>
where
    F: Fn(&[IntMatrix]) -> Result<TrigFormalSum> + Sync,
{
    let transports: Vec<Transport> = tuple
        .iter()
        .map(|g| transport(g, system))
        .collect::<Result<_>>()?;
    let parts: Vec<TrigFormalSum> = (0..system.len())
        .into_par_iter()
        .map(|j| {
            let args: Vec<IntMatrix> = transports.iter().map(|t| t.elements[j].clone()).collect();
            let a = &system.reps[j];
            Ok(eval(&args)?
                .pullback(&a.to_rational())
                .scaled(&weight(a, pullback)))
        })
        .collect::<Result<_>>()?;
    let mut out = TrigFormalSum::default();
    for part in &parts {
        out += part;
    }
    Ok(out)
}

/// Σ_j a_j^* φ([a_j h]) for an evaluator φ on symbols [h].
pub fn apply_hecke_symbol<F>(
    system: &CosetSystem,
    eval: &F,
    h: &IntMatrix,
    pullback: Pullback,
) -> Result<TrigFormalSum>
where
    F: Fn(&IntMatrix) -> Result<TrigFormalSum> + Sync,
{
    let parts: Vec<TrigFormalSum> = system
        .reps
        .par_iter()
        .map(|a| {
            Ok(eval(&(a * h))?
                .pullback(&a.to_rational())
                .scaled(&weight(a, pullback)))
        })
        .collect::<Result<_>>()?;
    let mut out = TrigFormalSum::default();
    for part in &parts {
        out += part;
    }
    Ok(out)
}

/// (T_p c)([∞, 0]) as a function of (x, y), with c extended to all symbols by Manin decomposition.
pub fn hecke_intro_symbol(p: u64) -> Result<TrigFormalSum> {
    let system = coset_reps(2, p, 1, 1)?;
    let eval = |a: &IntMatrix| -> Result<TrigFormalSum> {
        let r = Cusp::new(a[(0, 0)].clone(), a[(1, 0)].clone())?;
        let s = Cusp::new(a[(0, 1)].clone(), a[(1, 1)].clone())?;
        let c = |g: &IntMatrix| Ok(observation_symbol(g));
        symbol_value(&c, &r, &s)
    };
    apply_hecke_symbol(&system, &eval, &IntMatrix::identity(2), Pullback::Function)
}

/// (T_p − p[p]^* − 1)c([∞, 0]) as a formal sum.
pub fn intro_combination(p: u64) -> Result<TrigFormalSum> {
    let mut f = hecke_intro_symbol(p)?;
    let c = observation_symbol(&IntMatrix::identity(2));
    let pp = IntMatrix::identity(2).scale(&Integer::from(p)).to_rational();
    f -= &c.pullback(&pp).scaled(&Rational::from(p));
    f -= &c;
    Ok(f)
}

#[derive(Clone, Debug)]
pub struct IntroIdentity {
    pub mean: Complex,
    pub deviation: f64,
    pub points: usize,
}

/// Samples (T_p − p[p]^* − 1)c([∞, 0]) and reports its mean value and the largest deviation from it.
pub fn intro_identity(p: u64, ctx: &PrecisionContext) -> Result<IntroIdentity> {
    let f = intro_combination(p)?;
    let pts = random_samples(ctx, 2, |z| f.pole_distance(z) >= crate::arith::POLE_DELTA)?;
    let vals: Vec<Complex> = pts
        .par_iter()
        .map(|z| f.eval(z, ctx))
        .collect::<Result<_>>()?;
    Ok(IntroIdentity {
        mean: mean(&vals),
        deviation: spread(&vals),
        points: vals.len(),
    })
}
