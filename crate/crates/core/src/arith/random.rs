use rand::Rng;
use rug::Integer;

use super::matrix::{gamma0_membership, IntMatrix};

/// Random element of Γ₀(N) ⊂ SL₂(Z) with all entries bounded by `max_entry` in absolute value.
pub fn random_gamma0_2<R: Rng>(rng: &mut R, level: u64, max_entry: i64) -> IntMatrix {
    let n = level as i64;
    let cmax = (max_entry / n).max(1);
    loop {
        let c = n * rng.gen_range(-cmax..=cmax);
        let a = rng.gen_range(-max_entry..=max_entry);
        if c == 0 {
            if a == 1 || a == -1 {
                let b = rng.gen_range(-max_entry..=max_entry);
                return IntMatrix::from_i64(2, &[a, b, 0, a]);
            }
            continue;
        }
        if Integer::from(a).gcd(&Integer::from(c)) != 1 {
            continue;
        }
        // d ≡ a⁻¹ mod |c|, shifted by a random multiple of c within the bound
        let cc = c.abs();
        let inv = Integer::from(a)
            .invert(&Integer::from(cc))
            .expect("coprime")
            .to_i64()
            .unwrap();
        let shifts = (max_entry - inv) / cc;
        let d = inv + cc * rng.gen_range(-shifts.max(0)..=shifts.max(0));
        if d.abs() > max_entry {
            continue;
        }
        let b = (a * d - 1) / c;
        if b.abs() > max_entry {
            continue;
        }
        let m = IntMatrix::from_i64(2, &[a, b, c, d]);
        debug_assert!(gamma0_membership(&m, level));
        return m;
    }
}

/// Random element of Γ₀(N, n) as a product of `steps` elementary matrices
/// E_ij(t) with |t| ≤ 2, where t is a multiple of N on the first column below the diagonal.
pub fn random_gamma0<R: Rng>(rng: &mut R, n: usize, level: u64, steps: usize) -> IntMatrix {
    let mut m = IntMatrix::identity(n);
    for _ in 0..steps {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let mut t: i64 = rng.gen_range(-2..=2);
        if j == 0 {
            t *= level as i64;
        }
        if t == 0 {
            continue;
        }
        // row operation: row_i += t·row_j
        for k in 0..n {
            let add = Integer::from(&m[(j, k)] * t);
            m[(i, k)] += add;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn samples_lie_in_group() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..200 {
            let g = random_gamma0_2(&mut rng, 6, 50);
            assert!(gamma0_membership(&g, 6));
            assert!(g.max_abs_entry() <= 50);
        }
        for _ in 0..50 {
            let g = random_gamma0(&mut rng, 3, 6, 8);
            assert!(gamma0_membership(&g, 6));
        }
    }
}
