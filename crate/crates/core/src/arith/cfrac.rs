use rug::Integer;

/// Convergents of p/q for the regular continued fraction
/// [a₀; a₁, …, a_m] with a₀ = ⌊p/q⌋ and a_k ≥ 1 afterwards.
///
/// Denominators are positive and the last convergent is p/q in lowest terms.
/// The cusp ∞ (q = 0) yields the single convergent (1, 0).
pub fn continued_fraction(p: &Integer, q: &Integer) -> Vec<(Integer, Integer)> {
    if *q == 0 {
        return vec![(Integer::from(1), Integer::new())];
    }
    let (mut num, mut den) = if *q < 0 {
        (Integer::from(-p), Integer::from(-q))
    } else {
        (p.clone(), q.clone())
    };

    let (mut h_prev, mut h) = (Integer::new(), Integer::from(1));
    let (mut k_prev, mut k) = (Integer::from(1), Integer::new());
    let mut out = Vec::new();
    while den != 0 {
        let (a, r) = num.div_rem_floor(den.clone());
        let h_next = Integer::from(&a * &h) + &h_prev;
        let k_next = Integer::from(&a * &k) + &k_prev;
        h_prev = std::mem::replace(&mut h, h_next);
        k_prev = std::mem::replace(&mut k, k_next);
        out.push((h.clone(), k.clone()));
        num = den;
        den = r;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cf(p: i64, q: i64) -> Vec<(i64, i64)> {
        continued_fraction(&Integer::from(p), &Integer::from(q))
            .into_iter()
            .map(|(a, b)| (a.to_i64().unwrap(), b.to_i64().unwrap()))
            .collect()
    }

    #[test]
    fn examples() {
        assert_eq!(cf(0, 1), vec![(0, 1)]);
        assert_eq!(cf(2, 5), vec![(0, 1), (1, 2), (2, 5)]);
        assert_eq!(cf(7, 3), vec![(2, 1), (7, 3)]);
        assert_eq!(cf(1, 0), vec![(1, 0)]);
    }

    #[test]
    fn negative_and_unreduced() {
        // -2/5 = [-1; 1, 1, 2]
        assert_eq!(cf(-2, 5), vec![(-1, 1), (0, 1), (-1, 2), (-2, 5)]);
        assert_eq!(*cf(4, -10).last().unwrap(), (-2, 5));
        assert_eq!(*cf(6, 4).last().unwrap(), (3, 2));
    }
}
