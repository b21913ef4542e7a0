//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

use std::io::Write;
use std::time::{Duration, Instant};

use eiscoc::arith::{
    dist_to_integers, gamma0_membership, random_gamma0, random_gamma0_2, random_samples, IntMatrix, PrecisionContext,
    RatPoint, POLE_DELTA,
};
use eiscoc::cocycle::{
    abs_f64, cocycle_defect_n, delta_dual, guarded_samples, max_abs_on_samples, phi_n, psi_delta, saff, saff_symbol,
    sdelta_star, smult_cocycle, smult_star, spread, symbol_of_tuple, unit_matrix, RatFunSum,
};
use eiscoc::divisors::{hecke_pullback_divisor, make_d_delta, parse_delta, Delta, EllipticDivisor, TorsionDivisor};
use eiscoc::elliptic::{
    admissible_triples, bg_product_check, bg_span_check, e1, e1_mod_defect, e1_period_defects, e1_periodic_n, e1_qexp,
    e1_star, e1_star_distribution_defect, random_tau_z, sell_cocycle_defect, sell_modularity_defect, TauPoint,
};
use eiscoc::hecke::{coset_reps, gaussian_binomial, intro_identity, transport};
use eiscoc::modsym::{ash_rudolph_check, check_two_three_term, manin_decompose, observation_symbol, AshRudolphDefects, Cusp};
use eiscoc::{Error, Result};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rug::{Complex, Float, Integer, Rational};

const LEVEL: u64 = 6;

fn ctx(samples: usize) -> PrecisionContext {
    PrecisionContext::new(128, 1e-30, 20240611, samples).unwrap()
}

fn delta() -> Delta {
    parse_delta("1:1,2:-2,3:1").unwrap()
}

// Written straight to stdout so the line shows up without --nocapture.
fn report(id: u32, name: &str, pass: bool, started: Instant, limit: Duration, detail: String) {
    let elapsed = started.elapsed();
    let ok = pass && elapsed <= limit;
    let line = format!(
        "{} criterion {id:>2} {name}: {detail} [{:.2}s / {}s]\n",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(line.as_bytes());
    let _ = out.flush();
    assert!(ok, "{}", line.trim_end());
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn add(a: &Complex, b: &Complex) -> Complex {
    Complex::with_val(a.prec().0, a + b)
}

fn rational_points<R: Rng>(rng: &mut R, n: usize, count: usize, sums: &[&RatFunSum]) -> Vec<Vec<Rational>> {
    let mut out = Vec::new();
    while out.len() < count {
        let p: Vec<Rational> = (0..n)
            .map(|_| Rational::from((rng.gen_range(-60i64..=60), rng.gen_range(1i64..=37))))
            .collect();
        if sums.iter().all(|s| s.is_regular_at(&p)) {
            out.push(p);
        }
    }
    out
}

fn vanishes_at(f: &RatFunSum, pts: &[Vec<Rational>]) -> bool {
    f.is_empty() || pts.iter().all(|p| f.eval(p).unwrap() == 0)
}

fn retry<T>(mut f: impl FnMut() -> Result<T>) -> T {
    for _ in 0..10_000 {
        match f() {
            Ok(v) => return v,
            Err(Error::Pole { .. }) | Err(Error::TauTooThin(_)) => continue,
            Err(e) => panic!("{e}"),
        }
    }
    panic!("no admissible draw");
}

#[test]
fn criterion_01_addition_formula() {
    let t = Instant::now();
    let c = ctx(200);
    let pts = random_samples(&c, 2, |p| {
        let s = add(&p[0], &p[1]);
        dist_to_integers(&p[0]) >= POLE_DELTA && dist_to_integers(&p[1]) >= POLE_DELTA && dist_to_integers(&s) >= POLE_DELTA
    })
    .unwrap();
    let quarter = Float::with_val(128, 0.25);
    let max = pts
        .iter()
        .map(|p| abs_f64(&(eiscoc::trigfun::addition_value(&p[0], &p[1], &c).unwrap() + &quarter)))
        .fold(0.0, f64::max);
    report(1, "addition formula", max < 1e-30, t, secs(5), format!("{} points, max |defect + 1/4| = {max:.3e}", pts.len()));
}

#[test]
fn criterion_02_hecke_intro_identities() {
    let t = Instant::now();
    let c = ctx(50);
    let two = intro_identity(2, &c).unwrap();
    let quarter = Complex::with_val(128, (0.25, 0));
    let d2 = abs_f64(&Complex::with_val(128, &two.mean - &quarter)).max(two.deviation);
    let d3 = intro_identity(3, &c).unwrap().deviation;
    let d5 = intro_identity(5, &c).unwrap().deviation;
    let pass = d2 < 1e-28 && d3 < 1e-28 && d5 < 1e-28;
    report(
        2,
        "Hecke intro identities",
        pass,
        t,
        secs(30),
        format!("p=2 |c - 1/4| = {d2:.3e}, p=3 spread = {d3:.3e}, p=5 spread = {d5:.3e}"),
    );
}

#[test]
fn criterion_03_dedekind_reciprocity() {
    let t = Instant::now();
    let mut rng = ctx(1).rng();
    let mut checked = 0;
    let mut bad = 0;
    while checked < 1000 {
        let a = Integer::from(rng.gen_range(1i64..=10_000));
        let c = Integer::from(rng.gen_range(1i64..=10_000));
        if Integer::from(a.gcd_ref(&c)) != 1 {
            continue;
        }
        checked += 1;
        let lhs = eiscoc::trigfun::dedekind_sum(&a, &c).unwrap() + eiscoc::trigfun::dedekind_sum(&c, &a).unwrap();
        let num = Integer::from(&a * &a) + Integer::from(&c * &c) + 1u32;
        let den = Integer::from(&a * &c) * 12u32;
        let rhs = Rational::from((num, den)) - Rational::from((1, 4));
        if lhs != rhs {
            bad += 1;
        }
    }
    report(3, "Dedekind reciprocity", bad == 0, t, secs(10), format!("{checked} coprime pairs, {bad} mismatches"));
}

#[test]
fn criterion_04_psi_delta_homomorphism() {
    let t = Instant::now();
    let mut rng = ctx(1).rng();
    let d = delta();
    let (mut bad, mut non_integral) = (0, 0);
    for _ in 0..100 {
        let g1 = random_gamma0_2(&mut rng, LEVEL, 50);
        let g2 = random_gamma0_2(&mut rng, LEVEL, 50);
        let p1 = psi_delta(LEVEL, &d, &g1).unwrap();
        let p2 = psi_delta(LEVEL, &d, &g2).unwrap();
        let p12 = psi_delta(LEVEL, &d, &(&g1 * &g2)).unwrap();
        if p12 != Rational::from(&p1 + &p2) {
            bad += 1;
        }
        for p in [&p1, &p2, &p12] {
            if *Rational::from(p * 12u32).denom() != 1 {
                non_integral += 1;
            }
        }
    }
    report(
        4,
        "Psi_delta homomorphism",
        bad == 0 && non_integral == 0,
        t,
        secs(10),
        format!("100 pairs, {bad} nonzero defects, {non_integral} values with 12*Psi not integral"),
    );
}

#[test]
fn criterion_05_phi_n_homomorphism() {
    let t = Instant::now();
    let mut rng = ctx(1).rng();
    let (mut bad, mut conj) = (0, 0);
    for _ in 0..100 {
        let g1 = random_gamma0_2(&mut rng, LEVEL, 50);
        let g2 = random_gamma0_2(&mut rng, LEVEL, 50);
        let p1 = phi_n(LEVEL, &g1).unwrap();
        let p2 = phi_n(LEVEL, &g2).unwrap();
        if phi_n(LEVEL, &(&g1 * &g2)).unwrap() != Rational::from(&p1 + &p2) {
            bad += 1;
        }
        let c = &(&g2 * &g1) * &g2.unimodular_inverse().unwrap();
        if phi_n(LEVEL, &c).unwrap() != p1 {
            conj += 1;
        }
    }
    report(
        5,
        "Phi_N homomorphism",
        bad == 0 && conj == 0,
        t,
        secs(10),
        format!("100 pairs, {bad} nonzero defects, {conj} conjugation mismatches"),
    );
}

fn random_invertible<R: Rng>(rng: &mut R, n: usize) -> IntMatrix {
    loop {
        let e: Vec<i64> = (0..n * n).map(|_| rng.gen_range(-5..=5)).collect();
        let m = IntMatrix::from_i64(n, &e);
        if m.det() != 0 {
            return m;
        }
    }
}

#[test]
fn criterion_06_affine_cocycle_and_orlik_solomon() {
    let t = Instant::now();
    let mut rng = ctx(1).rng();
    let (mut rel2, mut rel4, mut degenerate) = (0, 0, 0);
    for _ in 0..50 {
        let tuple: Vec<IntMatrix> = (0..4).map(|_| random_invertible(&mut rng, 3)).collect();
        let eval = |face: &[IntMatrix]| saff(face, true);
        let mut defect = RatFunSum::zero(3);
        for i in 0..4 {
            let face: Vec<IntMatrix> = tuple.iter().enumerate().filter(|(k, _)| *k != i).map(|(_, g)| g.clone()).collect();
            let v = eval(&face).unwrap();
            if i % 2 == 0 {
                defect += &v;
            } else {
                defect -= &v;
            }
        }
        let pts = rational_points(&mut rng, 3, 10, &[&defect]);
        if !vanishes_at(&defect, &pts) {
            rel2 += 1;
        }
        // the same symbols through the vectors g⁻¹e₁, scaled to be integral
        let vectors: Vec<Vec<Integer>> = tuple.iter().map(|g| g.adjugate().column(0)).collect();
        let ar: AshRudolphDefects<RatFunSum> = ash_rudolph_check(&saff_symbol, &vectors).unwrap();
        let pts = rational_points(&mut rng, 3, 10, &[&ar.alternating]);
        if !vanishes_at(&ar.alternating, &pts) {
            rel4 += 1;
        }
        let repeated = vec![tuple[0].clone(), tuple[0].clone(), tuple[1].clone()];
        if !(ar.antisymmetry.is_empty() && ar.homogeneity.is_empty() && ar.degeneracy.is_empty())
            || !saff(&repeated, true).unwrap().is_empty()
        {
            degenerate += 1;
        }
    }
    report(
        6,
        "S*_aff cocycle and Orlik-Solomon",
        rel2 + rel4 + degenerate == 0,
        t,
        secs(30),
        format!("50 tuples: relation (2) failures {rel2}, relation (4) failures {rel4}, degenerate failures {degenerate}"),
    );
}

fn faces(tuple: &[IntMatrix]) -> impl Iterator<Item = Vec<IntMatrix>> + '_ {
    (0..tuple.len()).map(move |i| tuple.iter().enumerate().filter(|(k, _)| *k != i).map(|(_, g)| g.clone()).collect())
}

#[test]
fn criterion_07_mult_cocycle() {
    let t = Instant::now();
    let c = ctx(20);
    let mut rng = c.rng();
    let d = make_d_delta(LEVEL, &delta(), 3).unwrap();
    let mut tuples = Vec::new();
    while tuples.len() < 20 {
        let tuple: Vec<IntMatrix> = (0..4).map(|_| random_gamma0(&mut rng, 3, LEVEL, 4)).collect();
        let small = faces(&tuple).all(|f| {
            let det = symbol_of_tuple(&f).unwrap().det();
            det != 0 && det.abs() <= 200
        });
        if small {
            tuples.push(tuple);
        }
    }
    let mut max = 0.0f64;
    for tuple in &tuples {
        let eval = |face: &[IntMatrix]| smult_cocycle(&d, face, 200);
        let defect = cocycle_defect_n(&eval, tuple).unwrap();
        max = max.max(max_abs_on_samples(&defect, &c).unwrap());
    }
    report(7, "S*_mult cocycle", max < 1e-25, t, secs(300), format!("20 tuples in Gamma_0(6,3), max defect = {max:.3e}"));
}

#[test]
fn criterion_08_mult_distribution_and_bridge() {
    let t = Instant::now();
    let c = ctx(20);
    let mut rng = c.rng();
    let d = make_d_delta(LEVEL, &delta(), 2).unwrap();
    let mut dist = 0.0f64;
    for _ in 0..5 {
        let h = random_gamma0_2(&mut rng, 1, 4);
        let h = &h * &IntMatrix::from_i64(2, &[1, 0, 0, rng.gen_range(1..=3)]);
        let lhs = smult_star(&d.scalar_pullback(2), &h, 10_000).unwrap();
        let rhs = smult_star(&d, &h, 10_000).unwrap();
        let pts = random_samples(&c, 2, |z| {
            let sz: Vec<Complex> = z.iter().map(|x| Complex::with_val(128, x * 2u32)).collect();
            lhs.pole_distance(z) >= POLE_DELTA && rhs.pole_distance(&sz) >= POLE_DELTA
        })
        .unwrap();
        for z in &pts {
            let sz: Vec<Complex> = z.iter().map(|x| Complex::with_val(128, x * 2u32)).collect();
            let diff = lhs.eval(z, &c).unwrap() - rhs.eval(&sz, &c).unwrap() * 4u32;
            dist = dist.max(abs_f64(&diff));
        }
    }
    // δ = [1] + 2[2] − 3[3] has integral dual weights [1] + [2] − [3]
    let weights = parse_delta("1:1,2:2,3:-3").unwrap();
    let dual = make_d_delta(LEVEL, &delta_dual(&weights).unwrap(), 2).unwrap();
    let mut bridge = 0.0f64;
    for _ in 0..10 {
        let g = random_gamma0_2(&mut rng, LEVEL, 30);
        let mut diff = sdelta_star(LEVEL, &weights, &g.unimodular_inverse().unwrap()).unwrap();
        diff -= &smult_cocycle(&dual, &[IntMatrix::identity(2), g], 10_000).unwrap();
        bridge = bridge.max(max_abs_on_samples(&diff, &c).unwrap());
    }
    report(
        8,
        "S*_mult distribution and bridge",
        dist < 1e-25 && bridge < 1e-25,
        t,
        secs(60),
        format!("distribution (s=2) max defect = {dist:.3e}, bridge max defect = {bridge:.3e}"),
    );
}

fn pt(c: &[(i64, i64)]) -> RatPoint {
    RatPoint::new(c.iter().map(|&x| Rational::from(x)).collect())
}

#[test]
fn criterion_09_hecke_combinatorics() {
    let t = Instant::now();
    let mut rng = ctx(1).rng();
    let (mut count_bad, mut transport_bad) = (0, 0);
    for (n, k, p) in [(2, 1, 2), (2, 1, 3), (3, 1, 2), (3, 2, 2), (3, 1, 3)] {
        for level in [1u64, 5] {
            let sys = coset_reps(n, p, k, level).unwrap();
            if Integer::from(sys.len()) != gaussian_binomial(n as u32, k as u32, p) {
                count_bad += 1;
            }
            for _ in 0..20 {
                let g = random_gamma0(&mut rng, n, level, 6);
                let tr = transport(&g, &sys).unwrap();
                let valid = tr.is_permutation()
                    && tr.elements.iter().enumerate().all(|(j, e)| {
                        let lhs = &e.to_rational() * &sys.reps[j].to_rational();
                        let rhs = (&sys.reps[tr.sigma[j]] * &g).to_rational();
                        gamma0_membership(e, level) && lhs == rhs
                    });
                if !valid {
                    transport_bad += 1;
                }
            }
        }
    }
    // Σ_j [a_j]^*[0] for p = 2, n = 2: three copies of 0 plus the three nonzero 2-torsion points
    let sys = coset_reps(2, 2, 1, 1).unwrap();
    let pulled = hecke_pullback_divisor(&sys, &TorsionDivisor::origin(2)).unwrap();
    let expected = TorsionDivisor::from_pairs(
        2,
        [
            (pt(&[(0, 1), (0, 1)]), 3),
            (pt(&[(1, 2), (0, 1)]), 1),
            (pt(&[(0, 1), (1, 2)]), 1),
            (pt(&[(1, 2), (1, 2)]), 1),
        ],
    )
    .unwrap();
    let display_ok = pulled == expected;
    report(
        9,
        "Hecke combinatorics",
        count_bad == 0 && transport_bad == 0 && display_ok,
        t,
        secs(60),
        format!("count mismatches {count_bad}, bad transports {transport_bad}, pullback display matches: {display_ok}"),
    );
}

fn gamma1<R: Rng>(rng: &mut R, level: u64, max: i64) -> IntMatrix {
    loop {
        let g = random_gamma0_2(rng, level, max);
        if Integer::from(g[(0, 0)].modulo_ref(&Integer::from(level))) == 1 % level {
            return g;
        }
    }
}

#[test]
fn criterion_10_e1_identities() {
    let t = Instant::now();
    let c = ctx(1);
    let mut rng: ChaCha8Rng = c.rng();
    let (mut per, mut modu, mut odd) = (0.0f64, 0.0f64, 0.0f64);
    let (mut star_per, mut star_dist) = (0.0f64, 0.0f64);
    let (mut n_per, mut n_mod) = (0.0f64, 0.0f64);
    for _ in 0..50 {
        let (tau, z) = retry(|| {
            let (tau, z) = random_tau_z(&mut rng, &c);
            e1(&tau, &z, &c)?;
            Ok((tau, z))
        });
        let (a, b) = e1_period_defects(&tau, &z, &c).unwrap();
        per = per.max(abs_f64(&a)).max(abs_f64(&b));
        let neg = Complex::with_val(128, -&z);
        odd = odd.max(abs_f64(&(e1(&tau, &neg, &c).unwrap() + e1(&tau, &z, &c).unwrap())));
        let m = retry(|| e1_mod_defect(&tau, &z, &random_gamma0_2(&mut rng, 1, 6), &c));
        modu = modu.max(abs_f64(&m));

        let base = e1_star(&tau, &z, &c).unwrap();
        let s1 = e1_star(&tau, &add(&z, &Complex::with_val(128, 1)), &c).unwrap() - &base;
        let st = e1_star(&tau, &add(&z, tau.value()), &c).unwrap() - &base;
        star_per = star_per.max(abs_f64(&s1)).max(abs_f64(&st));
        for m in [2, 3] {
            let d = retry(|| e1_star_distribution_defect(&tau, &z, m, &c));
            star_dist = star_dist.max(abs_f64(&d));
        }

        let base = e1_periodic_n(&tau, &z, LEVEL, &c).unwrap();
        let p1 = e1_periodic_n(&tau, &add(&z, &Complex::with_val(128, 1)), LEVEL, &c).unwrap() - &base;
        let pt = e1_periodic_n(&tau, &add(&z, tau.value()), LEVEL, &c).unwrap() - &base;
        n_per = n_per.max(abs_f64(&p1)).max(abs_f64(&pt));
        let dm = retry(|| {
            let g = gamma1(&mut rng, LEVEL, 30);
            let (gt, j) = tau.act(&g)?;
            let lhs = e1_periodic_n(&gt, &Complex::with_val(128, &z / &j), LEVEL, &c)?;
            Ok(lhs - Complex::with_val(128, &j * &base))
        });
        n_mod = n_mod.max(abs_f64(&dm));
    }
    let pass = per < 1e-28 && modu < 1e-28 && odd < 1e-28 && star_per < 1e-25 && star_dist < 1e-25 && n_per < 1e-25 && n_mod < 1e-25;
    report(
        10,
        "E1 identities",
        pass,
        t,
        secs(60),
        format!(
            "E1per {per:.2e}, E1mod {modu:.2e}, odd {odd:.2e}, E1* periods {star_per:.2e}, E1* distribution {star_dist:.2e}, E1^(6) periods {n_per:.2e}, E1^(6) modularity {n_mod:.2e}"
        ),
    );
}

#[test]
fn criterion_11_elliptic_cocycle() {
    let t = Instant::now();
    let c = ctx(1);
    let mut rng = c.rng();
    let d = EllipticDivisor::from_torsion(&make_d_delta(LEVEL, &delta(), 2).unwrap());
    let taus: Vec<TauPoint> = [(0.13, 0.9), (-0.21, 0.6), (0.37, 1.3)]
        .iter()
        .map(|&(x, y)| TauPoint::from_f64(x, y, &c).unwrap())
        .collect();
    let (mut cocycle, mut modular) = (0.0f64, 0.0f64);
    for _ in 0..10 {
        let tuple: Vec<IntMatrix> = (0..3).map(|_| random_gamma0_2(&mut rng, LEVEL, 6)).collect();
        let h = symbol_of_tuple(&tuple[..2]).unwrap();
        for tau in &taus {
            for _ in 0..5 {
                let (def, z) = retry(|| {
                    let z: Vec<Complex> = (0..2)
                        .map(|_| c.complex(rng.gen_range(0.0..1.0), rng.gen_range(-0.5..0.5) * tau.im()))
                        .collect();
                    Ok((sell_cocycle_defect(&d, &tuple, tau, &z, 10_000, &c)?, z))
                });
                cocycle = cocycle.max(abs_f64(&def));
                let m = retry(|| {
                    let g = random_gamma0_2(&mut rng, LEVEL, 12);
                    sell_modularity_defect(&d, &h, &g, tau, &z, 10_000, &c)
                });
                modular = modular.max(abs_f64(&m));
            }
        }
    }
    report(
        11,
        "S*_ell cocycle",
        cocycle < 1e-20 && modular < 1e-20,
        t,
        secs(300),
        format!("10 tuples x 3 tau x 5 z: cocycle defect {cocycle:.3e}, weight-2 modularity defect {modular:.3e}"),
    );
}

#[test]
fn criterion_12_qexp_consistency() {
    let t = Instant::now();
    let c = ctx(1);
    let tau = TauPoint::from_f64(0.1, 0.8, &c).unwrap();
    let mut max = 0.0f64;
    for level in [5u64, 7, 11] {
        for a in 1..level as i64 {
            let s = e1_qexp(a, level, 60, 128).unwrap();
            let z = Complex::with_val(128, (Float::with_val(128, a) / level, 0));
            let direct = e1(&tau, &z, &c).unwrap();
            max = max.max(abs_f64(&(s.eval(&tau) - direct)));
        }
    }
    report(12, "q-expansion consistency", max < 1e-25, t, secs(60), format!("N in {{5,7,11}}, max difference {max:.3e}"));
}

#[test]
fn criterion_13_weight_two_span() {
    let t = Instant::now();
    let c = ctx(1);
    let mut worst = 0.0f64;
    let mut triples = 0;
    let mut control = f64::INFINITY;
    for level in [5u64, 7] {
        for (a, b, cc) in admissible_triples(level) {
            worst = worst.max(bg_span_check(level, a, b, cc, 40, &c).unwrap().residual);
            triples += 1;
            control = control.min(bg_product_check(level, a, b, 40, &c).unwrap().residual);
        }
    }
    report(
        13,
        "weight-2 span membership",
        worst < 1e-20 && control > 1e-5,
        t,
        secs(120),
        format!("{triples} triples, max residual {worst:.3e}; single-product control min residual {control:.3e} (needs > 1e-5)"),
    );
}

fn random_cusp<R: Rng>(rng: &mut R) -> Cusp {
    loop {
        let q: i64 = rng.gen_range(1..=10_000);
        let p: i64 = rng.gen_range(-10_000..=10_000);
        if Integer::from(p).gcd(&Integer::from(q)) == 1 {
            return Cusp::from_i64(p, q).unwrap();
        }
    }
}

#[test]
fn criterion_14_manin_decomposition() {
    let t = Instant::now();
    let c = ctx(20);
    let mut rng = c.rng();
    let cusps: Vec<Cusp> = (0..500).map(|_| random_cusp(&mut rng)).collect();
    let mut bad = 0;
    for (i, r) in cusps.iter().enumerate() {
        let s = &cusps[(i + 1) % cusps.len()];
        for (from, to) in [(&Cusp::infinity(), r), (r, s)] {
            let ch = manin_decompose(from, to);
            if !ch.telescopes(from, to) || ch.terms().iter().any(|(_, g)| g.det() != 1) {
                bad += 1;
            }
        }
    }
    let eval = |g: &IntMatrix| -> Result<eiscoc::cocycle::TrigFormalSum> { Ok(observation_symbol(g)) };
    let mut worst = 0.0f64;
    for k in 0..5 {
        let (r, s, u) = (&cusps[3 * k], &cusps[3 * k + 1], &cusps[3 * k + 2]);
        let (two, three) = check_two_three_term(&eval, r, s, u).unwrap();
        for f in [two, three] {
            if f.is_empty() {
                continue;
            }
            let pts = guarded_samples(&[&f], 2, &c).unwrap();
            let vals: Vec<Complex> = pts.iter().map(|z| f.eval(z, &c).unwrap()).collect();
            worst = worst.max(spread(&vals));
        }
    }
    report(
        14,
        "Manin decomposition",
        bad == 0 && worst < 1e-28,
        t,
        secs(30),
        format!("1000 chains, {bad} failures; two/three-term defects of c vary by {worst:.3e} across 20 points"),
    );
}

#[test]
fn criterion_15_unit_cycles() {
    let t = Instant::now();
    let mut rng = ctx(1).rng();
    let d = delta();
    let mut bad = Vec::new();
    let mut conjugates = 0;
    // traces of the totally positive fundamental units (3+√5)/2, 3+2√2, (11+3√13)/2
    for (disc, trace) in [(5i64, 3i64), (8, 6), (13, 11)] {
        let u = unit_matrix(disc).unwrap();
        let tr = Integer::from(&u[(0, 0)] + &u[(1, 1)]);
        if u.det() != 1 || tr <= 2 || tr != trace {
            bad.push(format!("disc {disc}: det {} trace {tr}", u.det()));
        }
        // characteristic polynomial x² − tx + 1 annihilates u
        let u2 = &u * &u;
        let ok = (0..2).all(|i| {
            (0..2).all(|j| Integer::from(&u2[(i, j)] - Integer::from(&u[(i, j)] * trace)) + i64::from(i == j) == 0)
        });
        if !ok {
            bad.push(format!("disc {disc}: characteristic polynomial"));
        }
        // some power of u lies in Γ(6); conjugate it by SL₂(Z) and keep what lands in Γ₀(6)
        let mut power = u.clone();
        while !(gamma0_membership(&power, LEVEL) && Integer::from(power[(0, 0)].modulo_ref(&Integer::from(LEVEL))) == 1) {
            power = &power * &u;
        }
        for _ in 0..20 {
            let p = random_gamma0_2(&mut rng, 1, 6);
            let gamma = &(&p * &power) * &p.unimodular_inverse().unwrap();
            if !gamma0_membership(&gamma, LEVEL) {
                continue;
            }
            let g0 = random_gamma0_2(&mut rng, LEVEL, 30);
            let conj = &(&g0 * &gamma) * &g0.unimodular_inverse().unwrap();
            conjugates += 1;
            if phi_n(LEVEL, &conj).unwrap() != phi_n(LEVEL, &gamma).unwrap()
                || psi_delta(LEVEL, &d, &conj).unwrap() != psi_delta(LEVEL, &d, &gamma).unwrap()
            {
                bad.push(format!("disc {disc}: conjugate values differ"));
            }
        }
    }
    report(
        15,
        "unit-cycle sanity",
        bad.is_empty() && conjugates > 0,
        t,
        secs(5),
        format!("{conjugates} conjugate pairs checked, problems: {bad:?}"),
    );
}
