use ndarray::Array2;
use optomech::cli::{linspace, num, StateSpec};
use optomech::fock::linalg::{hermitian_eigenvalues, matmul, trace_distance};
use optomech::fock::{
    annihilation, displacement_factor, expm_matrix, mech_headroom, number, DisplacementMethod, HilbertSpace,
    OperatorMatrix,
};
use optomech::open_dynamics::{closed_form_damped, lindblad_apply, LindbladGenerator};
use optomech::transforms::{conjugate, interior_deviation};
use optomech::C64;
use proptest::prelude::*;

fn max_abs(a: &Array2<C64>) -> f64 {
    a.iter().fold(0.0, |m, z| m.max(z.norm()))
}

fn dagger(a: &Array2<C64>) -> Array2<C64> {
    a.t().mapv(|z| z.conj())
}

fn hermitian(n: usize) -> impl Strategy<Value = Array2<C64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n * n).prop_map(move |v| {
        let a = Array2::from_shape_fn((n, n), |(i, j)| C64::new(v[i * n + j].0, v[i * n + j].1));
        (&a + &dagger(&a)).mapv(|z| z * 0.5)
    })
}

fn density(n: usize) -> impl Strategy<Value = Array2<C64>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), n * n).prop_map(move |v| {
        let g = Array2::from_shape_fn((n, n), |(i, j)| C64::new(v[i * n + j].0, v[i * n + j].1));
        let rho = matmul(&g, &dagger(&g));
        let tr = rho.diag().sum();
        rho.mapv(|z| z / tr)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn truncated_displacement_is_unitary(re in -1.5..1.5f64, im in -1.5..1.5f64, n in 2usize..16) {
        let d = displacement_factor(n, C64::new(re, im), DisplacementMethod::Expm).unwrap();
        let defect = max_abs(&(matmul(&dagger(&d), &d) - Array2::<C64>::eye(n)));
        prop_assert!(defect < 1e-12, "defect {defect:e}");
    }

    #[test]
    fn displacement_methods_agree_with_headroom(re in -1.0..1.0f64, im in -1.0..1.0f64) {
        let xi = C64::new(re, im);
        let n = 10;
        let big = n + mech_headroom(xi.norm(), n);
        let e = displacement_factor(big, xi, DisplacementMethod::Expm).unwrap();
        let l = displacement_factor(n, xi, DisplacementMethod::Laguerre).unwrap();
        let dev = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).fold(0.0_f64, |m, (i, j)| m.max((e[[i, j]] - l[[i, j]]).norm()));
        prop_assert!(dev < 1e-12, "deviation {dev:e}");
    }

    #[test]
    fn displacement_composes_with_its_inverse(re in -1.0..1.0f64, im in -1.0..1.0f64) {
        let n = 12;
        let d = displacement_factor(n, C64::new(re, im), DisplacementMethod::Expm).unwrap();
        let inv = displacement_factor(n, C64::new(-re, -im), DisplacementMethod::Expm).unwrap();
        prop_assert!(max_abs(&(matmul(&d, &inv) - Array2::<C64>::eye(n))) < 1e-12);
    }

    #[test]
    fn lindblad_output_is_traceless_and_hermitian(
        h in hermitian(6),
        rho in density(6),
        gamma in 0.0..2.0f64,
        omega in 0.1..3.0f64,
    ) {
        let gen = LindbladGenerator::from_matrix(&h + &number(6).mapv(|z| z * omega))
            .with_dissipator_matrix(gamma, &annihilation(6))
            .unwrap()
            .with_dissipator_matrix(0.5 * gamma, &number(6))
            .unwrap();
        let out = lindblad_apply(&gen, &rho).unwrap();
        prop_assert!(out.diag().sum().norm() < 1e-12);
        prop_assert!(max_abs(&(&out - &dagger(&out))) < 1e-12);
    }

    #[test]
    fn closed_form_is_a_channel(rho in density(6), t in 0.0..20.0f64, gamma in 0.01..0.5f64) {
        let out = closed_form_damped(&rho, t, 1.0, gamma).unwrap();
        prop_assert!((out.diag().sum() - C64::new(1.0, 0.0)).norm() < 1e-12);
        prop_assert!(max_abs(&(&out - &dagger(&out))) < 1e-12);
        let lo = hermitian_eigenvalues(&out).into_iter().fold(f64::INFINITY, f64::min);
        prop_assert!(lo > -1e-12, "min eigenvalue {lo:e}");
        prop_assert!(trace_distance(&out, &out) < 1e-15);
    }

    #[test]
    fn unitary_conjugation_preserves_spectrum(h in hermitian(6), g in hermitian(6)) {
        let space = HilbertSpace::optomechanical(2, 3).unwrap();
        let u = OperatorMatrix::new(space, expm_matrix(&g.mapv(|z| z * C64::new(0.0, -1.0))).unwrap()).unwrap();
        let hm = OperatorMatrix::new(space, h.clone()).unwrap();
        let c = conjugate(&u, &hm);
        prop_assert!(c.hermiticity_defect() < 1e-12);
        let (a, b) = (hermitian_eigenvalues(&h), hermitian_eigenvalues(c.data()));
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-11);
        }
    }

    #[test]
    fn interior_deviation_is_symmetric_and_monotone(a in hermitian(12), b in hermitian(12)) {
        let space = HilbertSpace::optomechanical(3, 4).unwrap();
        let (a, b) = (OperatorMatrix::new(space, a).unwrap(), OperatorMatrix::new(space, b).unwrap());
        let d = |bc, bm| interior_deviation(&a, &b, bc, bm).unwrap();
        prop_assert_eq!(d(1, 1), interior_deviation(&b, &a, 1, 1).unwrap());
        prop_assert!(d(0, 0) >= d(1, 0) && d(1, 0) >= d(1, 1) && d(1, 1) >= d(2, 3));
        prop_assert_eq!(d(0, 0), a.max_abs_diff(&b));
    }

    #[test]
    fn json_numbers_round_trip(x in any::<f64>().prop_filter("finite", |x| x.is_finite())) {
        prop_assert_eq!(num(x).as_f64().unwrap().to_bits(), x.to_bits());
    }

    #[test]
    fn linspace_hits_both_ends(a in -5.0..5.0f64, b in -5.0..5.0f64, n in 2usize..50) {
        let v = linspace(a, b, n);
        prop_assert_eq!(v.len(), n);
        prop_assert_eq!(v[0], a);
        prop_assert_eq!(*v.last().unwrap(), b);
    }

    #[test]
    fn fock_specs_parse(c in 0usize..100, m in 0usize..100) {
        let spec = StateSpec::parse(&format!("fock:{c},{m}")).unwrap();
        let back = StateSpec::parse(&format!("cav=fock:{c};mech=fock:{m}")).unwrap();
        prop_assert_eq!(spec, back);
    }
}
