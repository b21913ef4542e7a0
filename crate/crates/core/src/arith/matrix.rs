use std::fmt;
use std::ops::Mul;

use rug::{Integer, Rational};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Square matrix with arbitrary-size integer entries, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IntMatrix {
    n: usize,
    entries: Vec<Integer>,
}

impl IntMatrix {
    pub fn new(n: usize, entries: Vec<Integer>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::Dimension {
                expected: n * n,
                got: entries.len(),
            });
        }
        Ok(IntMatrix { n, entries })
    }

    /// Builds an n×n matrix from row-major machine integers. Panics on a length mismatch.
    pub fn from_i64(n: usize, entries: &[i64]) -> Self {
        assert_eq!(entries.len(), n * n, "expected {} entries", n * n);
        IntMatrix {
            n,
            entries: entries.iter().map(|&x| Integer::from(x)).collect(),
        }
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for r in rows {
            if r.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    got: r.len(),
                });
            }
            entries.extend(r.iter().map(|&x| Integer::from(x)));
        }
        Ok(IntMatrix { n, entries })
    }

    /// Matrix whose j-th column is `cols[j]`.
    pub fn from_columns(cols: &[Vec<Integer>]) -> Result<Self> {
        let n = cols.len();
        let mut m = IntMatrix::zero(n);
        for (j, c) in cols.iter().enumerate() {
            if c.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    got: c.len(),
                });
            }
            for (i, x) in c.iter().enumerate() {
                m[(i, j)] = x.clone();
            }
        }
        Ok(m)
    }

    pub fn zero(n: usize) -> Self {
        IntMatrix {
            n,
            entries: vec![Integer::new(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zero(n);
        for i in 0..n {
            m[(i, i)] = Integer::from(1);
        }
        m
    }

    pub fn diagonal(d: &[i64]) -> Self {
        let mut m = IntMatrix::zero(d.len());
        for (i, &x) in d.iter().enumerate() {
            m[(i, i)] = Integer::from(x);
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[Integer] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> Vec<Integer> {
        self.entries[i * self.n..(i + 1) * self.n].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<Integer> {
        (0..self.n).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn rows(&self) -> Vec<Vec<Integer>> {
        (0..self.n).map(|i| self.row(i)).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = IntMatrix::zero(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn scale(&self, s: &Integer) -> Self {
        IntMatrix {
            n: self.n,
            entries: self.entries.iter().map(|x| Integer::from(x * s)).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[Integer]) -> Vec<Integer> {
        (0..self.n)
            .map(|i| {
                let mut acc = Integer::new();
                for (j, x) in v.iter().enumerate() {
                    acc += &self[(i, j)] * x;
                }
                acc
            })
            .collect()
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> Integer {
        let n = self.n;
        if n == 0 {
            return Integer::from(1);
        }
        let mut a = self.entries.clone();
        let mut sign = 1i32;
        let mut prev = Integer::from(1);
        for k in 0..n - 1 {
            if a[k * n + k] == 0 {
                let Some(p) = (k + 1..n).find(|&i| a[i * n + k] != 0) else {
                    return Integer::new();
                };
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = Integer::from(&a[i * n + j] * &a[k * n + k])
                        - Integer::from(&a[i * n + k] * &a[k * n + j]);
                    a[i * n + j] = v.div_exact(&prev);
                }
            }
            prev = a[k * n + k].clone();
        }
        let d = a[n * n - 1].clone();
        if sign < 0 {
            -d
        } else {
            d
        }
    }

    pub fn is_unimodular(&self) -> bool {
        self.det().cmp_abs(&Integer::from(1)).is_eq()
    }

    /// Adjugate matrix, so that `self * adj = det * I`.
    pub fn adjugate(&self) -> Self {
        let n = self.n;
        if n == 1 {
            return IntMatrix::identity(1);
        }
        let mut adj = IntMatrix::zero(n);
        for i in 0..n {
            for j in 0..n {
                let minor = self.minor(j, i);
                let c = minor.det();
                adj[(i, j)] = if (i + j) % 2 == 0 { c } else { -c };
            }
        }
        adj
    }

    fn minor(&self, row: usize, col: usize) -> Self {
        let n = self.n;
        let mut entries = Vec::with_capacity((n - 1) * (n - 1));
        for i in (0..n).filter(|&i| i != row) {
            for j in (0..n).filter(|&j| j != col) {
                entries.push(self[(i, j)].clone());
            }
        }
        IntMatrix { n: n - 1, entries }
    }

    pub fn inverse(&self) -> Result<RatMatrix> {
        let d = self.det();
        if d == 0 {
            return Err(Error::SingularMatrix);
        }
        let adj = self.adjugate();
        Ok(RatMatrix {
            n: self.n,
            entries: adj
                .entries
                .into_iter()
                .map(|x| Rational::from((x, d.clone())))
                .collect(),
        })
    }

    /// Inverse of a matrix with determinant ±1, as an integer matrix.
    pub fn unimodular_inverse(&self) -> Result<Self> {
        let d = self.det();
        if d == 1 {
            Ok(self.adjugate())
        } else if d == -1 {
            Ok(self.adjugate().scale(&Integer::from(-1)))
        } else {
            Err(Error::SingularMatrix)
        }
    }

    pub fn to_rational(&self) -> RatMatrix {
        RatMatrix {
            n: self.n,
            entries: self.entries.iter().map(Rational::from).collect(),
        }
    }

    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self[(i, j)].to_i64()).collect())
            .collect()
    }

    pub fn max_abs_entry(&self) -> Integer {
        self.entries
            .iter()
            .map(|x| x.clone().abs())
            .max()
            .unwrap_or_default()
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = Integer;
    fn index(&self, (i, j): (usize, usize)) -> &Integer {
        &self.entries[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Integer {
        &mut self.entries[i * self.n + j]
    }
}

impl Mul for &IntMatrix {
    type Output = IntMatrix;
    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let n = self.n;
        let mut out = IntMatrix::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self[(i, k)];
                if *a == 0 {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * &rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl Mul for IntMatrix {
    type Output = IntMatrix;
    fn mul(self, rhs: IntMatrix) -> IntMatrix {
        &self * &rhs
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.n {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.n {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self[(i, j)])?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Parses comma-separated row-major entries, e.g. "1,0,6,1".
impl std::str::FromStr for IntMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let entries: Vec<Integer> = s
            .split(',')
            .map(|e| {
                e.trim()
                    .parse::<Integer>()
                    .map_err(|_| Error::Parse(format!("matrix entry {e:?}")))
            })
            .collect::<Result<_>>()?;
        let n = (entries.len() as f64).sqrt().round() as usize;
        if n == 0 || n * n != entries.len() {
            return Err(Error::Parse(format!("{} entries do not form a square matrix", entries.len())));
        }
        IntMatrix::new(n, entries)
    }
}

// JSON: array of row arrays. Entries that fit in i64 are numbers, larger ones decimal strings.
impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<serde_json::Value>> = (0..self.n)
            .map(|i| {
                (0..self.n)
                    .map(|j| match self[(i, j)].to_i64() {
                        Some(x) => serde_json::Value::from(x),
                        None => serde_json::Value::from(self[(i, j)].to_string()),
                    })
                    .collect()
            })
            .collect();
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntMatrix {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let rows: Vec<Vec<serde_json::Value>> = Vec::deserialize(d)?;
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for r in &rows {
            if r.len() != n {
                return Err(D::Error::custom("matrix must be square"));
            }
            for v in r {
                let x = match v {
                    serde_json::Value::Number(num) => num
                        .as_i64()
                        .map(Integer::from)
                        .ok_or_else(|| D::Error::custom("non-integer entry"))?,
                    serde_json::Value::String(s) => s
                        .parse::<Integer>()
                        .map_err(|e| D::Error::custom(e.to_string()))?,
                    _ => return Err(D::Error::custom("bad matrix entry")),
                };
                entries.push(x);
            }
        }
        Ok(IntMatrix { n, entries })
    }
}

/// Square matrix over Q, row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    n: usize,
    entries: Vec<Rational>,
}

impl RatMatrix {
    pub fn new(n: usize, entries: Vec<Rational>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::Dimension {
                expected: n * n,
                got: entries.len(),
            });
        }
        Ok(RatMatrix { n, entries })
    }

    pub fn from_columns(cols: &[Vec<Rational>]) -> Result<Self> {
        let n = cols.len();
        let mut entries = vec![Rational::new(); n * n];
        for (j, c) in cols.iter().enumerate() {
            if c.len() != n {
                return Err(Error::Dimension {
                    expected: n,
                    got: c.len(),
                });
            }
            for (i, x) in c.iter().enumerate() {
                entries[i * n + j] = x.clone();
            }
        }
        Ok(RatMatrix { n, entries })
    }

    pub fn identity(n: usize) -> Self {
        let mut entries = vec![Rational::new(); n * n];
        for i in 0..n {
            entries[i * n + i] = Rational::from(1);
        }
        RatMatrix { n, entries }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> Vec<Rational> {
        self.entries[i * self.n..(i + 1) * self.n].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<Rational> {
        (0..self.n).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        (0..self.n)
            .map(|i| {
                let mut acc = Rational::new();
                for (j, x) in v.iter().enumerate() {
                    acc += Rational::from(&self[(i, j)] * x);
                }
                acc
            })
            .collect()
    }

    /// Row vector times matrix.
    pub fn vec_mul(&self, v: &[Rational]) -> Vec<Rational> {
        (0..self.n)
            .map(|j| {
                let mut acc = Rational::new();
                for (i, x) in v.iter().enumerate() {
                    acc += Rational::from(x * &self[(i, j)]);
                }
                acc
            })
            .collect()
    }

    pub fn det(&self) -> Rational {
        let n = self.n;
        let mut a = self.entries.clone();
        let mut det = Rational::from(1);
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| a[i * n + k] != 0) else {
                return Rational::new();
            };
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                det = -det;
            }
            let pivot = a[k * n + k].clone();
            det *= &pivot;
            for i in k + 1..n {
                if a[i * n + k] == 0 {
                    continue;
                }
                let f = Rational::from(&a[i * n + k] / &pivot);
                for j in k..n {
                    let t = Rational::from(&f * &a[k * n + j]);
                    a[i * n + j] -= t;
                }
            }
        }
        det
    }

    /// Gauss-Jordan inverse.
    pub fn inverse(&self) -> Result<RatMatrix> {
        let n = self.n;
        let mut a = self.entries.clone();
        let mut inv = RatMatrix::identity(n).entries;
        for k in 0..n {
            let p = (k..n)
                .find(|&i| a[i * n + k] != 0)
                .ok_or(Error::SingularMatrix)?;
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                    inv.swap(k * n + j, p * n + j);
                }
            }
            let pivot = a[k * n + k].clone();
            for j in 0..n {
                a[k * n + j] /= &pivot;
                inv[k * n + j] /= &pivot;
            }
            for i in 0..n {
                if i == k || a[i * n + k] == 0 {
                    continue;
                }
                let f = a[i * n + k].clone();
                for j in 0..n {
                    let t = Rational::from(&f * &a[k * n + j]);
                    a[i * n + j] -= t;
                    let t = Rational::from(&f * &inv[k * n + j]);
                    inv[i * n + j] -= t;
                }
            }
        }
        Ok(RatMatrix { n, entries: inv })
    }

    /// Some(integer matrix) when every entry is integral.
    pub fn to_integer(&self) -> Option<IntMatrix> {
        if self.entries.iter().any(|x| *x.denom() != 1) {
            return None;
        }
        Some(IntMatrix {
            n: self.n,
            entries: self.entries.iter().map(|x| x.numer().clone()).collect(),
        })
    }
}

impl std::ops::Index<(usize, usize)> for RatMatrix {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.entries[i * self.n + j]
    }
}

impl Mul for &RatMatrix {
    type Output = RatMatrix;
    fn mul(self, rhs: &RatMatrix) -> RatMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let n = self.n;
        let mut entries = vec![Rational::new(); n * n];
        for i in 0..n {
            for k in 0..n {
                if self[(i, k)] == 0 {
                    continue;
                }
                for j in 0..n {
                    entries[i * n + j] += Rational::from(&self[(i, k)] * &rhs[(k, j)]);
                }
            }
        }
        RatMatrix { n, entries }
    }
}

/// Γ₀(N) in dimension n: determinant 1 and first column ≡ (a, 0, …, 0) mod N.
pub fn gamma0_membership(m: &IntMatrix, level: u64) -> bool {
    if m.det() != 1 {
        return false;
    }
    let level = Integer::from(level);
    (1..m.dim()).all(|i| m[(i, 0)].is_divisible(&level))
}
