use rug::Integer;

use super::matrix::IntMatrix;

/// `u * s * v` equals the input; `u`, `v` unimodular; `s` diagonal with
/// non-negative entries, each dividing the next.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
}

impl SmithDecomposition {
    pub fn invariants(&self) -> Vec<Integer> {
        (0..self.s.dim()).map(|i| self.s[(i, i)].clone()).collect()
    }
}

/// Smith normal form by elementary row and column operations.
///
/// Row operations on the working matrix `a` are mirrored as inverse column
/// operations on `u`, column operations as inverse row operations on `v`,
/// so that `m = u * a * v` holds throughout.
pub fn snf(m: &IntMatrix) -> SmithDecomposition {
    let n = m.dim();
    let mut a = m.clone();
    let mut u = IntMatrix::identity(n);
    let mut v = IntMatrix::identity(n);

    for t in 0..n {
        loop {
            // smallest nonzero entry of the trailing block goes to (t, t)
            let mut best: Option<(usize, usize)> = None;
            for i in t..n {
                for j in t..n {
                    if a[(i, j)] != 0
                        && best.is_none_or(|(bi, bj)| a[(i, j)].cmp_abs(&a[(bi, bj)]).is_lt())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                break;
            };
            swap_rows(&mut a, &mut u, t, pi);
            swap_cols(&mut a, &mut v, t, pj);

            let mut clean = true;
            for i in t + 1..n {
                if a[(i, t)] != 0 {
                    let q = a[(i, t)].clone().div_rem_floor(a[(t, t)].clone()).0;
                    add_row(&mut a, &mut u, i, t, &(-q));
                    if a[(i, t)] != 0 {
                        clean = false;
                    }
                }
            }
            for j in t + 1..n {
                if a[(t, j)] != 0 {
                    let q = a[(t, j)].clone().div_rem_floor(a[(t, t)].clone()).0;
                    add_col(&mut a, &mut v, j, t, &(-q));
                    if a[(t, j)] != 0 {
                        clean = false;
                    }
                }
            }
            if !clean {
                continue;
            }
            // divisibility: fold an offending row into row t and retry
            let offender = (t + 1..n)
                .flat_map(|i| (t + 1..n).map(move |j| (i, j)))
                .find(|&(i, j)| !a[(i, j)].is_divisible(&a[(t, t)]));
            match offender {
                Some((i, _)) => add_row(&mut a, &mut u, t, i, &Integer::from(1)),
                None => break,
            }
        }
        if a[(t, t)] < 0 {
            negate_row(&mut a, &mut u, t);
        }
    }

    SmithDecomposition { u, s: a, v }
}

// a <- E a with E swapping rows i, j; u <- u E^{-1}
fn swap_rows(a: &mut IntMatrix, u: &mut IntMatrix, i: usize, j: usize) {
    if i == j {
        return;
    }
    let n = a.dim();
    for k in 0..n {
        let x = a[(i, k)].clone();
        a[(i, k)] = a[(j, k)].clone();
        a[(j, k)] = x;
        let y = u[(k, i)].clone();
        u[(k, i)] = u[(k, j)].clone();
        u[(k, j)] = y;
    }
}

fn swap_cols(a: &mut IntMatrix, v: &mut IntMatrix, i: usize, j: usize) {
    if i == j {
        return;
    }
    let n = a.dim();
    for k in 0..n {
        let x = a[(k, i)].clone();
        a[(k, i)] = a[(k, j)].clone();
        a[(k, j)] = x;
        let y = v[(i, k)].clone();
        v[(i, k)] = v[(j, k)].clone();
        v[(j, k)] = y;
    }
}

// row_i += q * row_j; u: col_j -= q * col_i
fn add_row(a: &mut IntMatrix, u: &mut IntMatrix, i: usize, j: usize, q: &Integer) {
    let n = a.dim();
    for k in 0..n {
        let t = Integer::from(q * &a[(j, k)]);
        a[(i, k)] += t;
        let t = Integer::from(q * &u[(k, i)]);
        u[(k, j)] -= t;
    }
}

// col_i += q * col_j; v: row_j -= q * row_i
fn add_col(a: &mut IntMatrix, v: &mut IntMatrix, i: usize, j: usize, q: &Integer) {
    let n = a.dim();
    for k in 0..n {
        let t = Integer::from(q * &a[(k, j)]);
        a[(k, i)] += t;
        let t = Integer::from(q * &v[(i, k)]);
        v[(j, k)] -= t;
    }
}

fn negate_row(a: &mut IntMatrix, u: &mut IntMatrix, i: usize) {
    let n = a.dim();
    for k in 0..n {
        let x = -a[(i, k)].clone();
        a[(i, k)] = x;
        let y = -u[(k, i)].clone();
        u[(k, i)] = y;
    }
}
