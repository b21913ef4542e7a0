use eiscoc::arith::{random_gamma0_2, IntMatrix, PrecisionContext};
use eiscoc::cocycle::{abs_f64, phi_n, psi_delta};
use eiscoc::divisors::parse_delta;
use eiscoc::elliptic::{e1, e1_period_defects, TauPoint};
use eiscoc::hecke::gaussian_binomial;
use eiscoc::modsym::{manin_decompose, Cusp};
use eiscoc::trigfun::{dedekind_sum, dedekind_sum_euclid, epsilon};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rug::ops::Pow;
use rug::{Complex, Integer, Rational};

fn ctx() -> PrecisionContext {
    PrecisionContext::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn epsilon_is_odd_and_periodic(x in 0.01f64..0.99, y in -0.8f64..0.8) {
        let c = ctx();
        let z = c.complex(x, y);
        let v = epsilon(&z, &c).unwrap();
        let neg = epsilon(&Complex::with_val(128, -&z), &c).unwrap();
        let shifted = epsilon(&Complex::with_val(128, &z + 1u32), &c).unwrap();
        prop_assert!(abs_f64(&Complex::with_val(128, &v + &neg)) < 1e-30);
        prop_assert!(abs_f64(&(shifted - v)) < 1e-30);
    }

    #[test]
    fn dedekind_two_algorithms_agree(a in -300i64..300, c in 1i64..300) {
        let (a, c) = (Integer::from(a), Integer::from(c));
        prop_assume!(Integer::from(a.gcd_ref(&c)) == 1);
        let s = dedekind_sum(&a, &c).unwrap();
        prop_assert_eq!(&s, &dedekind_sum_euclid(&a, &c));
        // s(−a, c) = −s(a, c)
        prop_assert_eq!(dedekind_sum(&Integer::from(-&a), &c).unwrap(), -s);
    }

    #[test]
    fn gaussian_binomial_symmetry_and_pascal(n in 1u32..9, k in 0u32..9, p in prop::sample::select(vec![2u64, 3, 5])) {
        prop_assume!(k <= n);
        prop_assert_eq!(gaussian_binomial(n, k, p), gaussian_binomial(n, n - k, p));
        if k >= 1 && k < n {
            // q-Pascal: C(n,k) = C(n−1,k−1) + p^k C(n−1,k)
            let pk = Integer::from(p).pow(k);
            let rhs = gaussian_binomial(n - 1, k - 1, p) + pk * gaussian_binomial(n - 1, k, p);
            prop_assert_eq!(gaussian_binomial(n, k, p), rhs);
        }
    }

    #[test]
    fn scalar_morphisms_are_additive(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let delta = parse_delta("1:1,2:-2,3:1").unwrap();
        let g1 = random_gamma0_2(&mut rng, 6, 40);
        let g2 = random_gamma0_2(&mut rng, 6, 40);
        let g12 = &g1 * &g2;
        prop_assert_eq!(phi_n(6, &g12).unwrap(), phi_n(6, &g1).unwrap() + phi_n(6, &g2).unwrap());
        prop_assert_eq!(
            psi_delta(6, &delta, &g12).unwrap(),
            psi_delta(6, &delta, &g1).unwrap() + psi_delta(6, &delta, &g2).unwrap()
        );
        // Φ_N(γ⁻¹) = −Φ_N(γ)
        prop_assert_eq!(phi_n(6, &g1.unimodular_inverse().unwrap()).unwrap(), -phi_n(6, &g1).unwrap());
    }

    #[test]
    fn manin_chains_telescope(p in -5000i64..5000, q in 1i64..5000, r in -5000i64..5000, s in 1i64..5000) {
        let a = Cusp::from_rational(&Rational::from((p, q)));
        let b = Cusp::from_rational(&Rational::from((r, s)));
        let ch = manin_decompose(&a, &b);
        prop_assert!(ch.telescopes(&a, &b));
        prop_assert!(ch.terms().iter().all(|(_, g)| g.det() == 1));
        let inf = Cusp::infinity();
        prop_assert!(manin_decompose(&b, &inf).telescopes(&b, &inf));
    }

    #[test]
    fn e1_quasi_periods(re in -0.5f64..0.5, im in 0.3f64..2.0, x in 0.05f64..0.95, t in -0.45f64..0.45) {
        let c = ctx();
        let tau = TauPoint::from_f64(re, im, &c).unwrap();
        let z = c.complex(x + t * re, t * im);
        let (a, b) = e1_period_defects(&tau, &z, &c).unwrap();
        prop_assert!(abs_f64(&a) < 1e-28 && abs_f64(&b) < 1e-28);
    }

    #[test]
    fn e1_weight_one_under_sl2(seed in any::<u64>(), x in 0.05f64..0.95, y in -0.2f64..0.2) {
        let c = ctx();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_gamma0_2(&mut rng, 1, 4);
        let tau = TauPoint::from_f64(0.1, 1.1, &c).unwrap();
        let z = c.complex(x, y);
        let (gt, j) = match tau.act(&g) {
            Ok(v) => v,
            Err(_) => return Ok(()),
        };
        let lhs = match e1(&gt, &Complex::with_val(128, &z / &j), &c) {
            Ok(v) => v,
            Err(_) => return Ok(()),
        };
        let rhs = Complex::with_val(128, &j * e1(&tau, &z, &c).unwrap()) + Complex::with_val(128, &z * &g[(1, 0)]);
        prop_assert!(abs_f64(&(lhs - rhs)) < 1e-28);
    }

    #[test]
    fn matrix_parse_round_trip(e in prop::collection::vec(-99i64..99, 4)) {
        let m = IntMatrix::from_i64(2, &e);
        let text = e.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        prop_assert_eq!(text.parse::<IntMatrix>().unwrap(), m);
    }
}
