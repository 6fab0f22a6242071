use std::f64::consts::PI;

use gauss_squeeze::dynamics::lyapunov_residual;
use gauss_squeeze::metrics::{wigner_at, VACUUM_OFFSET_DB};
use gauss_squeeze::*;
use proptest::prelude::*;

fn stable_params() -> impl Strategy<Value = SystemParams> {
    (
        0.01f64..2.0,
        1e-4f64..0.2,
        0.001f64..0.3,
        0.0f64..0.95,
        0.0f64..50.0,
    )
        .prop_map(|(kappa, gamma_m, g_minus, ratio, n_th)| SystemParams {
            kappa,
            gamma_m,
            g0: 1e-4,
            g_minus,
            g_plus: ratio * g_minus,
            n_th,
        })
}

fn bath() -> impl Strategy<Value = SqueezedBath> {
    (0.0f64..2.0, -10.0f64..10.0).prop_map(|(r, theta)| bath_correlations(r, theta).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn bath_correlations_saturate_purity(r in 0.0f64..5.0, theta in -20.0f64..20.0) {
        let b = bath_correlations(r, theta).unwrap();
        let lhs = b.m().norm_sqr();
        let rhs = b.n() * (b.n() + 1.0);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.max(1.0));
    }

    #[test]
    fn diffusion_is_positive_semidefinite(p in stable_params(), b in bath()) {
        let d = diffusion_matrix(&p, &b);
        let eig = d.matrix().symmetric_eigen().eigenvalues;
        let scale = d.matrix().amax();
        prop_assert!(eig.iter().all(|e| *e >= -1e-12 * scale));
    }

    #[test]
    fn drift_diagonal_is_pure_damping(p in stable_params(), t in 0.0f64..10.0, full in any::<bool>()) {
        let mode = if full { Mode::Full } else { Mode::Rwa };
        let a = drift_matrix(&p, t, mode);
        let m = a.matrix();
        prop_assert_eq!(m[(0, 0)], -p.kappa / 2.0);
        prop_assert_eq!(m[(1, 1)], -p.kappa / 2.0);
        prop_assert_eq!(m[(2, 2)], -p.gamma_m / 2.0);
        prop_assert_eq!(m[(3, 3)], -p.gamma_m / 2.0);
        prop_assert!((m.trace() + p.kappa + p.gamma_m).abs() < 1e-15);
    }

    #[test]
    fn full_drift_has_half_period(p in stable_params(), t in 0.0f64..10.0) {
        let a = drift_matrix(&p, t, Mode::Full);
        let b = drift_matrix(&p, t + PI, Mode::Full);
        prop_assert!((a.matrix() - b.matrix()).amax() < 1e-12);
    }

    #[test]
    fn below_sufficient_condition_is_stable(p in stable_params()) {
        let report = routh_hurwitz(&p);
        prop_assert!(report.stable_rh && report.stable_eig);
        prop_assert!(report.spectral_abscissa < 0.0);
    }

    #[test]
    fn steady_state_is_physical_and_solves_lyapunov(p in stable_params(), b in bath()) {
        let v = steady_state_covariance(&p, &b).unwrap();
        let scale = v.matrix().amax().max(1.0);
        prop_assert!(lyapunov_residual(&p, &b, &v) < 1e-10 * scale);
        prop_assert!(check_physicality(&v).physical);
        prop_assert!(reduced_mech_covariance(&v).satisfies_uncertainty());
    }

    #[test]
    fn total_squeezing_conventions_differ_by_vacuum_offset(p in stable_params(), b in bath()) {
        let r = squeezing_report(&p, &b, Mode::Rwa).unwrap();
        prop_assert!((r.s_total_paper_db - r.s_total_norm_db - VACUUM_OFFSET_DB).abs() < 1e-12);
        prop_assert!((VACUUM_OFFSET_DB - 3.0103).abs() < 1e-4);
        // The smaller eigenvalue never exceeds either diagonal variance.
        let s = reduced_mech_covariance(&steady_state_covariance(&p, &b).unwrap());
        prop_assert!(r.lambda_min <= s.matrix()[(0, 0)].min(s.matrix()[(1, 1)]) + 1e-12);
    }

    #[test]
    fn bath_phase_has_period_two_pi(p in stable_params(), r in 0.0f64..2.0, theta in 0.0f64..6.3) {
        let a = squeezing_report(&p, &bath_correlations(r, theta).unwrap(), Mode::Rwa).unwrap();
        let b = squeezing_report(&p, &bath_correlations(r, theta + 2.0 * PI).unwrap(), Mode::Rwa).unwrap();
        prop_assert!((a.s_q_db - b.s_q_db).abs() < 1e-9);
        prop_assert!((a.s_total_paper_db - b.s_total_paper_db).abs() < 1e-9);
    }

    #[test]
    fn wigner_peak_is_inverse_sqrt_det(p in stable_params(), b in bath()) {
        let s = reduced_mech_covariance(&steady_state_covariance(&p, &b).unwrap());
        let w0 = wigner_at(&s, 0.0, 0.0).unwrap();
        let expected = 1.0 / (2.0 * PI * s.det().sqrt());
        prop_assert!((w0 - expected).abs() <= 1e-12 * expected);
        // Pure-state bound.
        prop_assert!(w0 <= 1.0 / PI + 1e-9);
    }

    #[test]
    fn spectrum_is_real_and_positive(p in stable_params(), b in bath(), phi in 0.0f64..6.3) {
        let cfg = SpectrumConfig {
            omegas: gauss_squeeze::metrics::linspace(-p.kappa, p.kappa, 21),
            ..SpectrumConfig::default_grid(&p, phi)
        };
        let s = output_spectrum(&p, &b, &cfg).unwrap();
        prop_assert!(s.iter().all(|x| x.s > 0.0));
    }
}
