mod common;

use blaschke_lab::funcexpr::taylor_coefficients;
use blaschke_lab::modelspace::{mw_basis, project_onto, reproducing_kernel, PointSequence};
use blaschke_lab::norms::{
    backward_shift, bergman_norm, bergman_pairing, bergman_pairing_weighted, cauchy_pairing,
    frac_diff, hardy_norm, sup_norm, QuadOptions,
};
use blaschke_lab::quotient::{lower_toeplitz, matrix_function, quotient_norm, quotient_norm_generic};
use common::*;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jet_value_matches_eval(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let f = random_expr(&mut rng, 4);
        let z = disk_point(&mut rng, 0.97);
        let v = f.eval(z).unwrap();
        let jet = f.eval_jet(z, 0).unwrap();
        prop_assert!((jet.values()[0] - v).norm() <= 1e-13 * v.norm().max(1.0), "{} vs {}", jet.values()[0], v);
    }

    #[test]
    fn jet_derivative_matches_central_difference(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let f = random_expr(&mut rng, 4);
        let z = disk_point(&mut rng, 0.9);
        let h = 1e-5;
        let fd = (f.eval(z + h).unwrap() - f.eval(z - h).unwrap()) / (2.0 * h);
        let d = f.eval_jet(z, 1).unwrap().derivative(1);
        let scale = d.norm().max(f.eval(z).unwrap().norm()).max(1e-8);
        prop_assert!((fd - d).norm() <= 1e-6 * scale, "{fd} vs {d}");
    }

    #[test]
    fn composed_polynomial_coefficients(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let p = random_poly(&mut rng, 16);
        let mut q = random_poly(&mut rng, 16);
        let l1: f64 = q.iter().map(|c| c.norm()).sum();
        q.iter_mut().for_each(|c| *c /= l1);
        let want = poly_compose(&p, &q);
        let expr = poly_expr(&p).compose(&poly_expr(&q));
        let got = taylor_coefficients(&expr, want.len() - 1, None).unwrap();
        let scale = want.iter().map(|c| c.norm()).fold(1.0, f64::max);
        for (a, b) in got.iter().zip(&want) {
            prop_assert!((a - b).norm() <= 1e-12 * scale, "{a} vs {b}");
        }
        let local = expr.taylor_at(ZERO, want.len() - 1).unwrap();
        for (a, b) in local.iter().zip(&want) {
            prop_assert!((a - b).norm() <= 1e-12 * scale);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gram_is_identity(seed in any::<u64>(), n in 1usize..=24, r in 0.0f64..=0.9) {
        let mut rng = rng(seed);
        let sigma = random_sigma(&mut rng, n, r);
        let basis = mw_basis(&sigma);
        let m = 2048.max(64 * (n as f64 / (1.0 - sigma.r())) as usize).next_power_of_two();
        let gram = basis.gram(m);
        for (i, row) in gram.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                prop_assert!((v - want).norm() < 1e-10, "G[{i}][{j}] = {v}");
            }
        }
    }

    #[test]
    fn projection_is_idempotent(seed in any::<u64>(), n in 1usize..=16, r in 0.0f64..=0.9) {
        let mut rng = rng(seed);
        let sigma = random_sigma(&mut rng, n, r);
        let basis = mw_basis(&sigma);
        let coeffs = unit_vector(&mut rng, n);
        let f = basis.combination(&coeffs).unwrap();
        let back = project_onto(&basis, &f).unwrap();
        for (a, b) in back.iter().zip(&coeffs) {
            prop_assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn kernel_reproduces(seed in any::<u64>(), n in 1usize..=12, r in 0.0f64..=0.9) {
        let mut rng = rng(seed);
        let sigma = random_sigma(&mut rng, n, r);
        let f = mw_basis(&sigma).combination(&unit_vector(&mut rng, n)).unwrap();
        let zeta = if rng.random_bool(0.5) { circle_point(&mut rng) } else { disk_point(&mut rng, 0.99) };
        let k = reproducing_kernel(&sigma, zeta).unwrap();
        let pairing = cauchy_pairing(&f, &k.expr).unwrap();
        let v = f.eval(zeta).unwrap();
        prop_assert!((pairing - v).norm() < 1e-9 * v.norm().max(1.0), "{pairing} vs {v}");
    }

    #[test]
    fn kernel_h2_norm_is_the_finite_sum(seed in any::<u64>(), n in 1usize..=12, r in 0.0f64..=0.9) {
        let mut rng = rng(seed);
        let sigma = random_sigma(&mut rng, n, r);
        let zeta = circle_point(&mut rng);
        let mut partial = Complex64::new(1.0, 0.0);
        let mut want = 0.0;
        for &l in sigma.points() {
            want += (1.0 - l.norm_sqr()) / (Complex64::new(1.0, 0.0) - l.conj() * zeta).norm_sqr() * partial.norm_sqr();
            partial *= (l - zeta) / (Complex64::new(1.0, 0.0) - l.conj() * zeta);
        }
        let k = reproducing_kernel(&sigma, zeta).unwrap();
        let got = hardy_norm(&k.expr, 2.0).unwrap().value.powi(2);
        prop_assert!((got - want).abs() < 1e-9 * want, "{got} vs {want}");
    }

    #[test]
    fn quotient_norm_bounds(seed in any::<u64>(), n in 1usize..=8, r in 0.0f64..=0.9) {
        let mut rng = rng(seed);
        let sigma = random_sigma(&mut rng, n, r);
        let f = poly_expr(&random_poly(&mut rng, 10));
        let q = quotient_norm(&f, &sigma).unwrap();
        let sup = sup_norm(&f, 10.0).unwrap().value;
        prop_assert!(q <= sup * (1.0 + 1e-8) + 1e-10, "{q} > {sup}");
        let eval_max = sigma.points().iter().map(|&l| f.eval(l).unwrap().norm()).fold(0.0, f64::max);
        prop_assert!(q >= eval_max - 1e-9, "{q} < {eval_max}");
    }

    #[test]
    fn toeplitz_matches_matrix_function_at_origin(seed in any::<u64>(), n in 1usize..=64) {
        let mut rng = rng(seed);
        let coeffs = random_poly(&mut rng, 2 * n);
        let sigma = PointSequence::one_point(n, ZERO).unwrap();
        let generic = to_monomial(&matrix_function(&poly_expr(&coeffs), &sigma).unwrap());
        let toeplitz = lower_toeplitz(&coeffs, n);
        for (a, b) in generic.iter().zip(toeplitz.iter()) {
            prop_assert!((a - b).norm() < 1e-10, "{a} vs {b}");
        }
    }

    #[test]
    fn composition_identity(seed in any::<u64>(), n in 1usize..=32, r in 0.0f64..=0.9) {
        let mut rng = rng(seed);
        let f = poly_expr(&random_poly(&mut rng, 8));
        let sigma = PointSequence::one_point(n, c(-r)).unwrap();
        let toeplitz = quotient_norm(&f, &sigma).unwrap();
        let generic = quotient_norm_generic(&f, &sigma).unwrap();
        prop_assert!((toeplitz - generic).abs() <= 1e-7 * toeplitz.max(1e-12), "{toeplitz} vs {generic}");
    }
}

fn gr_case(rng: &mut rand_chacha::ChaCha8Rng) -> (Complex64, Complex64) {
    let phi = poly_expr(&random_poly(rng, 12));
    let psi = poly_expr(&random_poly(rng, 12));
    let lhs = cauchy_pairing(&phi, &psi).unwrap();
    let rhs = bergman_pairing(&phi.derivative(1), &backward_shift(&psi).unwrap()).unwrap()
        + phi.eval(ZERO).unwrap() * psi.eval(ZERO).unwrap().conj();
    (lhs, rhs)
}

fn gr2_case(rng: &mut rand_chacha::ChaCha8Rng, alpha: f64) -> (Complex64, Complex64) {
    let f = random_poly(rng, 12);
    let g = poly_expr(&random_poly(rng, 12));
    let lhs = bergman_pairing(&poly_expr(&f), &g).unwrap();
    let df = poly_expr(&frac_diff(&f, alpha).unwrap());
    let rhs = bergman_pairing_weighted(&df, &g, alpha, &QuadOptions::default()).unwrap() * (alpha + 1.0);
    (lhs, rhs)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn green_formula(seed in any::<u64>()) {
        let (lhs, rhs) = gr_case(&mut rng(seed));
        prop_assert!((lhs - rhs).norm() < 1e-9 * lhs.norm().max(1.0), "{lhs} vs {rhs}");
    }

    #[test]
    fn modified_green_formula(seed in any::<u64>(), which in 0usize..3) {
        let alpha = [0.5, 1.0, 2.0][which];
        let (lhs, rhs) = gr2_case(&mut rng(seed), alpha);
        let scale = lhs.norm().max(rhs.norm()).max(1e-12);
        prop_assert!((lhs - rhs).norm() <= 1e-8 * scale, "{lhs} vs {rhs}");
    }

    #[test]
    fn fractional_derivative_norm_equivalence(seed in any::<u64>(), l in 1usize..=2, which in 0usize..4) {
        let (p, beta) = [(1.0, 0.0), (2.0, 0.0), (2.0, 1.0), (3.0, 0.5)][which];
        let mut rng = rng(seed);
        let coeffs = random_poly(&mut rng, 12);
        let f = poly_expr(&coeffs);
        let dl = bergman_norm(&poly_expr(&frac_diff(&coeffs, l as f64).unwrap()), p, beta).unwrap().value;
        let jet = f.eval_jet(ZERO, l).unwrap();
        let lower: f64 = (0..l).map(|j| jet.derivative(j).norm()).sum();
        let other = bergman_norm(&f.derivative(l), p, beta).unwrap().value + lower;
        if other > 0.0 {
            let ratio = dl / other;
            prop_assert!((1.0 / 20.0..=20.0).contains(&ratio), "ratio {ratio}");
        }
    }
}
