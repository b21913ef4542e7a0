use rug::{Integer, Rational};

use super::matrix::IntMatrix;
use super::snf::snf;
use super::RatPoint;
use crate::error::{Error, Result};

/// All ξ ∈ [0,1)^n with h·ξ ≡ w (mod Z^n), sorted lexicographically.
///
/// With h = U S V, the substitution η = Vξ turns the congruence into
/// s_i η_i ≡ (U⁻¹w)_i, whose solutions are η_i = ((U⁻¹w)_i + μ_i)/s_i.
pub fn torsion_cosets(h: &IntMatrix, w: &RatPoint) -> Result<Vec<RatPoint>> {
    let n = h.dim();
    if w.dim() != n {
        return Err(Error::Dimension {
            expected: n,
            got: w.dim(),
        });
    }
    if h.det() == 0 {
        return Err(Error::SingularMatrix);
    }
    let d = snf(h);
    let u_inv = d.u.unimodular_inverse()?.to_rational();
    let v_inv = d.v.unimodular_inverse()?.to_rational();
    let target = u_inv.mul_vec(w.coords());
    let moduli: Vec<Integer> = d.invariants();

    let total: usize = moduli
        .iter()
        .map(|s| s.to_usize().expect("coset count fits in usize"))
        .product();
    let mut out = Vec::with_capacity(total);
    let mut mu = vec![Integer::new(); n];
    loop {
        let eta: Vec<Rational> = (0..n)
            .map(|i| Rational::from(&target[i] + &mu[i]) / &moduli[i])
            .collect();
        out.push(RatPoint::reduced(v_inv.mul_vec(&eta)));

        // odometer over ∏ Z/s_i
        let mut k = 0;
        loop {
            if k == n {
                out.sort();
                return Ok(out);
            }
            mu[k] += 1;
            if mu[k] < moduli[k] {
                break;
            }
            mu[k] = Integer::new();
            k += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(xs: &[(i64, i64)]) -> RatPoint {
        RatPoint::new(xs.iter().map(|&(p, q)| Rational::from((p, q))).collect())
    }

    #[test]
    fn identity_and_diagonal() {
        let z = RatPoint::zero(2);
        assert_eq!(
            torsion_cosets(&IntMatrix::identity(2), &z).unwrap(),
            vec![z.clone()]
        );
        assert_eq!(
            torsion_cosets(&IntMatrix::diagonal(&[2, 1]), &z).unwrap(),
            vec![pt(&[(0, 1), (0, 1)]), pt(&[(1, 2), (0, 1)])]
        );
    }

    #[test]
    fn singular_rejected() {
        let h = IntMatrix::from_i64(2, &[1, 2, 2, 4]);
        assert_eq!(
            torsion_cosets(&h, &RatPoint::zero(2)),
            Err(Error::SingularMatrix)
        );
    }

    #[test]
    fn nonzero_target() {
        let h = IntMatrix::from_i64(2, &[2, 1, 0, 3]);
        let w = pt(&[(1, 3), (1, 2)]);
        let xs = torsion_cosets(&h, &w).unwrap();
        assert_eq!(xs.len(), 6);
        for x in &xs {
            let img = h.to_rational().mul_vec(x.coords());
            for (a, b) in img.iter().zip(w.coords()) {
                assert_eq!(*Rational::from(a - b).denom(), 1);
            }
        }
    }
}
