use mixlab_core::certificates::c2::{mk_predicate, mode_mk_scan};
use mixlab_core::certificates::{
    c2_certificate, check_exponential_bound, check_heat_upper, check_mixing_bound, check_retention, mixing_certificate,
    mode_mk, nu_scaling_report, sharpness_family, snapped_ceil, Branch,
};
use mixlab_core::flows::ShearSpec;
use mixlab_core::report::Verdict;
use mixlab_core::shear::{evolve_shear, ShearOptions};
use mixlab_core::spectral::{Lattice, RealTerm, SpectralField2D};
use mixlab_core::trajectory::{linspace, Trajectory};
use mixlab_core::MixError;
use proptest::prelude::*;

fn field(lat: Lattice, terms: &[RealTerm]) -> SpectralField2D {
    SpectralField2D::from_terms(lat, terms).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn mode_mk_closed_form_equals_the_scan(
        k in (1i64..=60).prop_flat_map(|k| prop_oneof![Just(k), Just(-k)]),
        m_sup in 0.0..5.0f64,
        nu in 1e-3..1.0f64,
        delta in 1e-3..10.0f64,
    ) {
        let m = mode_mk(k, m_sup, nu, delta);
        prop_assert_eq!(m, mode_mk_scan(k, m_sup, nu, delta));
        prop_assert!(mk_predicate(k, m_sup, nu, delta, m));
        prop_assert!(m == 1 || !mk_predicate(k, m_sup, nu, delta, m - 1));
    }
}

#[test]
fn cos_x_under_couette_reproduces_the_hand_chain() {
    let (nu, m_sup) = (0.1, 1.0);
    let rho0 = field(Lattice::new(1, 8).unwrap(), &[RealTerm::cos(1.0, 1, 0)]);
    let cert = c2_certificate(&rho0, m_sup, nu).unwrap();

    // N = ‖Δρ₀‖ = ‖∂ₓρ₀‖ = 1/√2, each x-mode profile has a_k = ½
    let n = 0.5f64.sqrt();
    let beta0 = 2.0 * (nu * n + m_sup * n) / n;
    assert!(rel(cert.beta_0, 2.2) <= 1e-15 && rel(beta0, 2.2) <= 1e-15);
    let (a, l_k) = (0.5, nu * 0.5 + 0.5);
    let beta = 2.0 * l_k / a;
    let delta = 1.0 / beta;
    // ⌈200·1·1/0.1⌉ = 2000 and ⌈16·10⁴·2.2/0.1⌉ = 3 520 000
    let m_k = 3_520_000u64;
    let mf = m_k as f64;
    let lambda = nu * (1.0 + mf * mf + mf + 0.5);
    let d = 1e4 / (nu * mf);
    let theta = (delta / (32.0 * d)).sqrt().min(1.0);
    let gamma = beta.max(lambda + (1.0 / theta).ln() / delta);
    let c2 = 2.2f64.max(gamma + (n / a).ln() * 2.2);

    assert_eq!(cert.branch, Branch::XModes);
    assert_eq!(cert.records.len(), 2);
    for r in &cert.records {
        assert_eq!(r.m_k, m_k);
        assert!(rel(r.l_k, l_k) <= 1e-15);
        assert!(rel(r.lambda_k, lambda) <= 1e-15);
    }
    assert_eq!(cert.k_star, Some(-1));
    assert!(rel(cert.c2, c2) <= 1e-12, "{} vs {c2}", cert.c2);
}

#[test]
fn heat_branch_gives_twice_the_viscosity() {
    let rho0 = field(Lattice::new(1, 4).unwrap(), &[RealTerm::cos(1.0, 0, 1)]);
    for nu in [0.1, 0.05, 0.025] {
        let cert = c2_certificate(&rho0, 0.0, nu).unwrap();
        assert_eq!(cert.branch, Branch::HeatOnly);
        assert!((cert.c2 - 2.0 * nu).abs() <= 1e-12);
    }
    let rows = nu_scaling_report(&rho0, 1.0, &[0.1, 0.05, 0.025]).unwrap();
    for r in rows {
        assert!((r.c2_over_nu - 2.0).abs() <= 1e-12);
    }
    assert!(nu_scaling_report(&rho0, 1.0, &[2.0]).is_err());
}

#[test]
fn x_mode_exponent_grows_as_the_viscosity_shrinks() {
    let rho0 = field(Lattice::new(1, 8).unwrap(), &[RealTerm::cos(1.0, 1, 0)]);
    let rows = nu_scaling_report(&rho0, 1.0, &[0.2, 0.1, 0.05]).unwrap();
    for w in rows.windows(2) {
        assert!(w[1].c2 > w[0].c2);
    }
}

#[test]
fn mixing_window_for_cos_x_under_couette() {
    let (nu, m_sup) = (0.1, 1.0);
    let rho0 = field(Lattice::new(1, 8).unwrap(), &[RealTerm::cos(1.0, 1, 0)]);
    let c2 = c2_certificate(&rho0, m_sup, nu).unwrap().c2;
    let mix = mixing_certificate(&rho0, m_sup, nu, c2).unwrap();
    assert_eq!(mix.k_0, 1);
    assert_eq!(mix.k_c as f64, snapped_ceil((2.0 * c2 / nu).sqrt()));
    assert_eq!(mix.modes.len(), 2);
    for m in &mix.modes {
        assert_eq!(m.j_k, 1);
        // the barrier ⌈|k|M/ν⌉ = 10 dominates
        assert_eq!(m.n_k, 10);
    }
    assert!(rel(mix.c_star, 1.0 / (2.0 * 101f64.sqrt())) <= 1e-15);
}

#[test]
fn shear_trajectory_passes_all_four_checks() {
    let (nu, shear) = (0.1, ShearSpec::sin_mode(1.0, 1));
    let rho0 = field(
        Lattice::new(2, 48).unwrap(),
        &[RealTerm::cos(1.0, 1, 0), RealTerm::sin(0.3, 2, 1)],
    );
    let c2 = c2_certificate(&rho0, shear.m(), nu).unwrap();
    let mix = mixing_certificate(&rho0, shear.m(), nu, c2.c2).unwrap();
    let opts = ShearOptions {
        dt: Some(1e-3),
        ..Default::default()
    };
    let traj = evolve_shear(&rho0, &shear, nu, &linspace(4.0, 41), &opts).unwrap();
    let reports = [
        check_exponential_bound(&traj, &c2, 1e-6).unwrap(),
        check_heat_upper(&traj, c2.n, 1e-8).unwrap(),
        check_mixing_bound(&traj, &mix, 1e-6).unwrap(),
        check_retention(&traj, &mix, 1e-8).unwrap(),
    ];
    for r in &reports {
        assert_eq!(r.verdict, Verdict::Pass, "{} {}", r.check, r.min_margin);
    }
    assert_eq!(reports[3].samples.len(), mix.modes.len() * traj.len());
}

#[test]
fn checks_fail_on_trajectories_that_violate_the_bounds() {
    let nu = 0.1;
    let lat = Lattice::new(1, 4).unwrap();
    let rho0 = field(lat, &[RealTerm::cos(1.0, 0, 1)]);
    let c2 = c2_certificate(&rho0, 0.0, nu).unwrap();
    // decays at 0.5 > c₂ = 0.2
    let fast = Trajectory {
        nu,
        times: vec![0.0, 1.0],
        fields: vec![rho0.clone(), rho0.scaled((-0.5f64).exp())],
    };
    let r = check_exponential_bound(&fast, &c2, 1e-6).unwrap();
    assert_eq!(r.verdict, Verdict::Fail);
    assert!((r.min_margin - (-0.3f64).exp()).abs() <= 1e-12);
    // no decay at all breaks the heat envelope
    let frozen = Trajectory {
        nu,
        times: vec![0.0, 1.0],
        fields: vec![rho0.clone(), rho0.clone()],
    };
    assert_eq!(check_heat_upper(&frozen, c2.n, 1e-8).unwrap().verdict, Verdict::Fail);
    // energy pushed past the window fails retention and the floor
    let mix = mixing_certificate(
        &field(Lattice::new(1, 40).unwrap(), &[RealTerm::cos(1.0, 1, 0)]),
        1.0,
        nu,
        1.0,
    )
    .unwrap();
    let fine = field(Lattice::new(1, 40).unwrap(), &[RealTerm::cos(1.0, 1, 40)]);
    let filament = Trajectory {
        nu,
        times: vec![1.0],
        fields: vec![fine],
    };
    assert_eq!(check_retention(&filament, &mix, 1e-8).unwrap().verdict, Verdict::Fail);
    assert_eq!(
        check_mixing_bound(&filament, &mix, 1e-6).unwrap().verdict,
        Verdict::Fail
    );
}

#[test]
fn sharpness_family_values() {
    for (nu, p, n) in [
        (0.25, 1.0, 4u64),
        (0.2, 1.0, 5),
        (0.1, 0.5, 4),
        (0.5, 2.0, 4),
        (1.0, 3.0, 1),
    ] {
        let case = sharpness_family(nu, p).unwrap();
        assert_eq!(case.n, n, "nu {nu} p {p}");
        let nf = n as f64;
        assert_eq!(case.decay_rate, nu * nf * nf);
        assert_eq!(case.expected_c_star, 0.5 / nf);
        assert!(rel(case.rho0.mixing_scale().unwrap(), 1.0 / nf) <= 1e-15);
    }
    let s = sharpness_family(0.25, 1.0).unwrap().summary();
    assert_eq!(s.rate_window, Some((4.0, 16.0)));
    assert!(sharpness_family(0.0, 1.0).is_err());
    assert!(sharpness_family(0.5, -1.0).is_err());
}

#[test]
fn certificates_reject_bad_input() {
    let lat = Lattice::new(1, 4).unwrap();
    let rho0 = field(lat, &[RealTerm::cos(1.0, 1, 0)]);
    assert!(matches!(c2_certificate(&rho0, 1.0, 0.0), Err(MixError::Parameter(_))));
    assert!(matches!(
        c2_certificate(&rho0, f64::NAN, 0.1),
        Err(MixError::Parameter(_))
    ));
    assert!(matches!(
        c2_certificate(&SpectralField2D::zeros(lat), 1.0, 0.1),
        Err(MixError::ZeroField)
    ));
    assert!(matches!(
        mixing_certificate(&rho0, 1.0, 0.1, 0.0),
        Err(MixError::Parameter(_))
    ));
    let with_mean = field(lat, &[RealTerm::cos(1.0, 0, 0), RealTerm::cos(1.0, 1, 0)]);
    assert!(matches!(
        c2_certificate(&with_mean, 1.0, 0.1),
        Err(MixError::NonZeroMean(_))
    ));
}
