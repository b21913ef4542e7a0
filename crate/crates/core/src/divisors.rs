//! Torsion divisors on (Q/Z)^n and on E_τ^n, the divisors D_δ, and their pullbacks.

use std::collections::BTreeMap;

use rug::{Integer, Rational};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{torsion_cosets, IntMatrix, RatPoint};
use crate::error::{Error, Result};
use crate::hecke::CosetSystem;

/// Weights δ = Σ n_d [d] indexed by divisors d of N.
pub type Delta = BTreeMap<u64, i64>;

/// Parses "1:1,2:-2,3:1".
pub fn parse_delta(s: &str) -> Result<Delta> {
    let mut out = Delta::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (d, n) = part
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("delta entry {part:?}")))?;
        let d: u64 = d.trim().parse().map_err(|_| Error::Parse(format!("delta key {d:?}")))?;
        let n: i64 = n.trim().parse().map_err(|_| Error::Parse(format!("delta weight {n:?}")))?;
        *out.entry(d).or_insert(0) += n;
    }
    Ok(out)
}

pub fn format_delta(delta: &Delta) -> String {
    delta
        .iter()
        .map(|(d, n)| format!("{d}:{n}"))
        .collect::<Vec<_>>()
        .join(",")
}

/// Checks that every key divides N; with `strict`, also Σ n_d = 0 and Σ n_d·d = 0.
pub fn check_delta(level: u64, delta: &Delta, strict: bool) -> Result<()> {
    for &d in delta.keys() {
        if d == 0 || level % d != 0 {
            return Err(Error::BadDivisor(d as i64, level as i64));
        }
    }
    if strict {
        let s0: i64 = delta.values().sum();
        let s1: i64 = delta.iter().map(|(d, n)| *d as i64 * n).sum();
        if s0 != 0 || s1 != 0 {
            return Err(Error::BadDelta(format!(
                "Σ n_d = {s0}, Σ n_d·d = {s1}; both must vanish"
            )));
        }
    }
    Ok(())
}

/// A finitely supported Z-valued function on (Q/Z)^n.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct TorsionDivisor {
    n: usize,
    support: BTreeMap<RatPoint, i64>,
}

impl TorsionDivisor {
    pub fn new(n: usize) -> Self {
        TorsionDivisor {
            n,
            support: BTreeMap::new(),
        }
    }

    /// The divisor [0].
    pub fn origin(n: usize) -> Self {
        let mut d = TorsionDivisor::new(n);
        d.add(RatPoint::zero(n), 1);
        d
    }

    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (RatPoint, i64)>) -> Result<Self> {
        let mut d = TorsionDivisor::new(n);
        for (p, c) in pairs {
            if p.dim() != n {
                return Err(Error::Dimension {
                    expected: n,
                    got: p.dim(),
                });
            }
            d.add(p, c);
        }
        Ok(d)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&RatPoint, i64)> {
        self.support.iter().map(|(p, c)| (p, *c))
    }

    /// Adds coeff·[point], reducing the point mod Z^n.
    pub fn add(&mut self, point: RatPoint, coeff: i64) {
        if coeff == 0 {
            return;
        }
        let point = RatPoint::reduced(point.coords().to_vec());
        let e = self.support.entry(point.clone()).or_insert(0);
        *e += coeff;
        if *e == 0 {
            self.support.remove(&point);
        }
    }

    pub fn add_divisor(&mut self, other: &TorsionDivisor, scale: i64) {
        for (p, c) in other.iter() {
            self.add(p.clone(), c * scale);
        }
    }

    pub fn coeff(&self, point: &RatPoint) -> i64 {
        let p = RatPoint::reduced(point.coords().to_vec());
        self.support.get(&p).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> i64 {
        self.support.values().sum()
    }

    /// Push-forward Σ c·[gξ].
    pub fn image(&self, g: &IntMatrix) -> TorsionDivisor {
        let mut out = TorsionDivisor::new(self.n);
        for (p, c) in self.iter() {
            out.add(p.image(g), c);
        }
        out
    }

    /// [a]^*D: the divisor ξ ↦ D(aξ).
    pub fn pullback(&self, a: &IntMatrix) -> Result<TorsionDivisor> {
        let mut out = TorsionDivisor::new(self.n);
        for (p, c) in self.iter() {
            for xi in torsion_cosets(a, p)? {
                out.add(xi, c);
            }
        }
        Ok(out)
    }

    /// [s]^*D for the scalar s ≥ 1.
    pub fn scalar_pullback(&self, s: u64) -> TorsionDivisor {
        if s == 1 {
            return self.clone();
        }
        let diag = vec![s as i64; self.n];
        self.pullback(&IntMatrix::diagonal(&diag))
            .expect("nonzero scalar")
    }

    /// Largest denominator of any support point.
    pub fn level(&self) -> Integer {
        self.support
            .keys()
            .fold(Integer::from(1), |acc, p| acc.lcm(&p.order()))
    }
}

#[derive(Serialize, Deserialize)]
struct EntryJson {
    point: RatPoint,
    coeff: i64,
}

impl Serialize for TorsionDivisor {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.support
            .iter()
            .map(|(p, c)| EntryJson {
                point: p.clone(),
                coeff: *c,
            })
            .collect::<Vec<_>>()
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for TorsionDivisor {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let entries = Vec::<EntryJson>::deserialize(d)?;
        let n = entries.first().map_or(0, |e| e.point.dim());
        TorsionDivisor::from_pairs(n, entries.into_iter().map(|e| (e.point, e.coeff)))
            .map_err(serde::de::Error::custom)
    }
}

/// D_δ = Σ_{d|N} n_d Σ_{j<d} [(j/d) e₁] in dimension n.
pub fn make_d_delta(level: u64, delta: &Delta, n: usize) -> Result<TorsionDivisor> {
    check_delta(level, delta, false)?;
    let mut out = TorsionDivisor::new(n);
    for (&d, &nd) in delta {
        for j in 0..d {
            let mut coords = vec![Rational::new(); n];
            coords[0] = Rational::from((j, d));
            out.add(RatPoint::new(coords), nd);
        }
    }
    Ok(out)
}

// groups coefficients by the last n−1 coordinates
fn fiber_sums<K: Ord>(
    entries: impl Iterator<Item = (K, i64)>,
) -> BTreeMap<K, i64> {
    let mut fibers = BTreeMap::new();
    for (k, c) in entries {
        *fibers.entry(k).or_insert(0) += c;
    }
    fibers
}

/// True iff every fiber of the projection onto the last n − 1 coordinates has degree 0.
pub fn is_div_circ(d: &TorsionDivisor) -> bool {
    fiber_sums(d.iter().map(|(p, c)| (p.coords()[1..].to_vec(), c)))
        .values()
        .all(|&s| s == 0)
}

/// Σ_j [a_j]^*D over the representatives of a coset system.
pub fn hecke_pullback_divisor(system: &CosetSystem, d: &TorsionDivisor) -> Result<TorsionDivisor> {
    let mut out = TorsionDivisor::new(d.dim());
    for a in &system.reps {
        out.add_divisor(&a_pullback(a, d)?, 1);
    }
    Ok(out)
}

fn a_pullback(a: &IntMatrix, d: &TorsionDivisor) -> Result<TorsionDivisor> {
    if a.dim() != d.dim() {
        return Err(Error::Dimension {
            expected: d.dim(),
            got: a.dim(),
        });
    }
    d.pullback(a)
}

/// A point ατ + β of E_τ^n stored as the exact pair (α, β) ∈ ((Q/Z)^n)².
pub type EllipticPoint = (RatPoint, RatPoint);

/// A finitely supported Z-valued function on the torsion of E_τ^n.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct EllipticDivisor {
    n: usize,
    support: BTreeMap<EllipticPoint, i64>,
}

impl EllipticDivisor {
    pub fn new(n: usize) -> Self {
        EllipticDivisor {
            n,
            support: BTreeMap::new(),
        }
    }

    /// Places D on the subgroup (1/N)Z^n/Z^n of the real direction: w ↦ 0·τ + w.
    pub fn from_torsion(d: &TorsionDivisor) -> Self {
        let mut out = EllipticDivisor::new(d.dim());
        for (p, c) in d.iter() {
            out.add((RatPoint::zero(d.dim()), p.clone()), c);
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&EllipticPoint, i64)> {
        self.support.iter().map(|(p, c)| (p, *c))
    }

    pub fn add(&mut self, (a, b): EllipticPoint, coeff: i64) {
        if coeff == 0 {
            return;
        }
        let key = (
            RatPoint::reduced(a.coords().to_vec()),
            RatPoint::reduced(b.coords().to_vec()),
        );
        let e = self.support.entry(key.clone()).or_insert(0);
        *e += coeff;
        if *e == 0 {
            self.support.remove(&key);
        }
    }

    pub fn degree(&self) -> i64 {
        self.support.values().sum()
    }

    /// [s]^*D: each point is replaced by its s^{2n} preimages under multiplication by s.
    pub fn scalar_pullback(&self, s: u64) -> EllipticDivisor {
        let diag = IntMatrix::diagonal(&vec![s as i64; self.n]);
        let mut out = EllipticDivisor::new(self.n);
        for ((a, b), c) in self.iter() {
            let alphas = torsion_cosets(&diag, a).expect("nonzero scalar");
            let betas = torsion_cosets(&diag, b).expect("nonzero scalar");
            for x in &alphas {
                for y in &betas {
                    out.add((x.clone(), y.clone()), c);
                }
            }
        }
        out
    }

    /// Fiberwise degree 0 along the last n − 1 coordinates of E_τ^n.
    pub fn is_div_circ(&self) -> bool {
        fiber_sums(self.iter().map(|((a, b), c)| {
            ((a.coords()[1..].to_vec(), b.coords()[1..].to_vec()), c)
        }))
        .values()
        .all(|&s| s == 0)
    }
}
