mod common;

use common::oracle::simpson_richardson;
use lapspec::cvec::cr;
use lapspec::kernels::{approximate_identity, band_pass, make_psi, psi_hat};
use lapspec::report::{Command, RunConfig};
use lapspec::semigroup::seeded_systems;
use lapspec::spectra::estimate;
use lapspec::tauberian::{check_bounded_primitive, Hypothesis, TauberianSettings};
use lapspec::transforms::{convolve, laplace};
use lapspec::{Classification, CVec, EstimatorParams, FrequencyGrid, FunctionDescriptor, SpectrumKind, C64};
use proptest::prelude::*;

fn base(which: u8, w: f64, c: C64) -> FunctionDescriptor {
    match which % 5 {
        0 => FunctionDescriptor::character(w, c),
        1 => FunctionDescriptor::trig_poly(&[(w, c), (w / 2.0 - 1.0, cr(0.5))]),
        2 => FunctionDescriptor::chirp().scale(c),
        3 => FunctionDescriptor::kernel(make_psi()).unwrap().scale(c),
        _ => FunctionDescriptor::character(w, c).mollify(0.7).unwrap(),
    }
}

fn coef() -> impl Strategy<Value = C64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(a, b)| C64::new(a, b))
}

fn val(phi: &FunctionDescriptor, t: f64) -> C64 {
    phi.evaluate(t).unwrap().0[0]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn translate_matches_shifted_evaluation(which in 0u8..5, w in -3.0..3.0f64, c in coef(),
                                            s in -20.0..20.0f64, t in -20.0..20.0f64) {
        let phi = base(which, w, c);
        let a = val(&phi.translate(s).unwrap(), t);
        let b = val(&phi, t + s);
        prop_assert!((a - b).norm() <= 1e-10 * (1.0 + b.norm()), "{a} vs {b}");
    }

    #[test]
    fn values_respect_sup_bound(which in 0u8..5, w in -3.0..3.0f64, c in coef(), t in -50.0..50.0f64) {
        let phi = base(which, w, c);
        prop_assert!(val(&phi, t).norm() <= phi.body.sup_bound() * (1.0 + 1e-12) + 1e-300);
    }

    #[test]
    fn zero_modulation_and_translation_are_identities(which in 0u8..5, w in -3.0..3.0f64, c in coef(),
                                                      t in -20.0..20.0f64) {
        let phi = base(which, w, c);
        let v = val(&phi, t);
        prop_assert_eq!(val(&phi.modulate(0.0), t), v);
        prop_assert_eq!(val(&phi.translate(0.0).unwrap(), t), v);
    }

    #[test]
    fn character_resolvent_law(w in -5.0..5.0f64, c in coef(), a in 0.01..5.0f64, y in -8.0..8.0f64) {
        let lam = C64::new(a, y);
        let got = laplace(&FunctionDescriptor::character(w, c), lam).unwrap().value.0[0];
        let want = c / (lam - C64::new(0.0, w));
        prop_assert!((got - want).norm() <= 1e-12 * want.norm().max(1.0));
    }

    #[test]
    fn laplace_is_linear(i in 0u8..5, j in 0u8..5, w in -3.0..3.0f64, c in coef(), d in coef(),
                         a in 0.2..3.0f64, y in -4.0..4.0f64) {
        let (f, g) = (base(i, w, c), base(j, -w / 2.0, d));
        let lam = C64::new(a, y);
        let lf = laplace(&f, lam).unwrap();
        let lg = laplace(&g, lam).unwrap();
        let ls = laplace(&f.add(&g).unwrap(), lam).unwrap();
        let err = (ls.value.0[0] - lf.value.0[0] - lg.value.0[0]).norm();
        let tol = 10.0 * (ls.err_est + lf.err_est + lg.err_est) + 1e-12 * (1.0 + ls.value.norm());
        prop_assert!(err <= tol, "{err:e} > {tol:e}");
    }

    #[test]
    fn laplace_is_holomorphic(which in 0u8..5, w in -3.0..3.0f64, c in coef(),
                              a in 1.0..3.0f64, y in -3.0..3.0f64) {
        let phi = base(which, w, c);
        let lam = C64::new(a, y);
        let h = 1e-2;
        let f = |z: C64| laplace(&phi, z).unwrap();
        // discrete ∂x + i∂y at steps h and h/2, Richardson-combined
        let mut err_est: f64 = 0.0;
        let mut cr_res = |h: f64| {
            let s = [f(lam + h), f(lam - h), f(lam + C64::new(0.0, h)), f(lam - C64::new(0.0, h))];
            err_est = err_est.max(s.iter().map(|x| x.err_est).fold(0.0, f64::max));
            let dx = (s[0].value.0[0] - s[1].value.0[0]) / (2.0 * h);
            let dy = (s[2].value.0[0] - s[3].value.0[0]) / (2.0 * h);
            dx + C64::new(0.0, 1.0) * dy
        };
        let (r1, r2) = (cr_res(h), cr_res(h / 2.0));
        let res = ((r2 * 4.0 - r1) / 3.0).norm();
        let tol = 10.0 * (err_est / (h / 2.0)) + 1e-7;
        prop_assert!(res <= tol, "residual {res:e} > {tol:e}");
    }

    #[test]
    fn scaling_law(n in 1u32..20, s in -50.0..50.0f64) {
        let k = approximate_identity(n).unwrap();
        prop_assert!((k.freq(s).re - psi_hat(s / n as f64)).abs() <= 1e-14);
        prop_assert!(k.freq(s).im.abs() <= 1e-14);
    }

    #[test]
    fn descriptor_json_round_trips(which in 0u8..5, w in -3.0..3.0f64, c in coef(),
                                   s in 0.0..7.0f64, m in -3.0..3.0f64, h in 0.1..2.0f64) {
        let phi = base(which, w, c).translate(s).unwrap().modulate(m).mollify(h).unwrap();
        let text = phi.to_json();
        let back = FunctionDescriptor::from_json(&text).unwrap();
        prop_assert_eq!(&back, &phi);
        prop_assert_eq!(back.to_json(), text);
    }

    #[test]
    fn grid_parse(lo in -10.0..10.0f64, span in 0.0..10.0f64, k in 1u32..200) {
        let step = span.max(0.01) / k as f64;
        let text = format!("{lo}:{}:{step}", lo + span);
        let g = FrequencyGrid::parse(&text).unwrap();
        prop_assert_eq!(g.point(0), lo);
        prop_assert!(g.point(g.len() - 1) <= lo + span + 1e-9 * step.max(1.0));
        prop_assert!(g.point(g.len() - 1) + step > lo + span - 1e-9);
        let negative = format!("{lo}:{}:{}", lo + span, -step);
        let zero = format!("{lo}:{}:0", lo + span);
        prop_assert!(FrequencyGrid::parse(&negative).is_err());
        prop_assert!(FrequencyGrid::parse(&zero).is_err());
    }

    #[test]
    fn run_config_echo_round_trips(seed in any::<u64>(), lo in -5.0..0.0f64, step in 0.01..0.5f64,
                                   tau in 1e-6..1.0f64) {
        let mut c = RunConfig::new(Command::Analyze);
        c.seed = seed;
        c.grid = FrequencyGrid::new(lo, lo + 3.0, step).unwrap();
        c.set_tol(&format!("tau_jump={tau}")).unwrap();
        c.spectrum = Some(SpectrumKind::Carleman);
        let e = c.echo();
        prop_assert_eq!(RunConfig::from_echo(&e).unwrap().echo(), e);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn eigenfunction_law(om in -2.0..2.0f64, eps in 0.5..2.0f64, w in -3.0..3.0f64, t in -5.0..5.0f64) {
        let k = band_pass(om, eps).unwrap();
        let phi = FunctionDescriptor::character(w, cr(1.0));
        // (γ_w ∗ k)(t) = ∫ k(u) e^{iw(t−u)} du by Simpson on the kernel's support
        let r = k.time_support();
        let f = |u: f64| k.time(u) * C64::from_polar(1.0, w * (t - u));
        let n = (2.0 * r * (om.abs() + w.abs() + eps + 1.0) * 2.0) as usize;
        let (oracle, _) = simpson_richardson(&f, -r, r, n, 1e-9);
        let want = k.freq(w) * C64::from_polar(1.0, w * t);
        prop_assert!((oracle - want).norm() <= 1e-6, "{oracle} vs {want}");
        let fast = convolve(&phi, &k, t, false).unwrap().0[0];
        prop_assert!((fast - want).norm() <= 1e-12);
    }

    #[test]
    fn approximate_identity_error_is_monotone(w1 in -3.0..3.0f64, c in coef()) {
        let phi = FunctionDescriptor::character(w1, c);
        let mut prev = f64::INFINITY;
        for n in 1..=8 {
            let k = approximate_identity(n).unwrap();
            let err = (-10..=10)
                .map(|j| {
                    let t = j as f64 * 0.7;
                    (convolve(&phi, &k, t, false).unwrap().0[0] - val(&phi, t)).norm()
                })
                .fold(0.0, f64::max);
            prop_assert!(err <= prev + 1e-12, "n = {n}: {err} > {prev}");
            prev = err;
        }
    }

    #[test]
    fn semigroup_law_and_resolvent_identity(seed in 0u64..1000, t in 0.0..3.0f64, s in 0.0..3.0f64,
                                            a in 0.2..2.0f64, b in 0.2..2.0f64, y in -3.0..3.0f64) {
        let sys = seeded_systems(seed, 1).unwrap().remove(0).system;
        let lhs = sys.exp(t + s);
        let rhs = sys.exp(t) * sys.exp(s);
        let scale = sys.exp_bound().powi(2);
        prop_assert!((&lhs - &rhs).norm() <= 1e-10 * scale);
        let (l, m) = (C64::new(a, y), C64::new(b, -y));
        let rl = sys.resolvent(l).unwrap();
        let rm = sys.resolvent(m).unwrap();
        let diff = (&rl - &rm) - (&rl * &rm) * (m - l);
        prop_assert!(diff.norm() <= 1e-10 * (1.0 + rl.norm() * rm.norm()));
    }
}

#[test]
fn eigenvector_orbits_are_singular_at_their_frequency() {
    let g = FrequencyGrid::new(-2.0, 2.0, 0.25).unwrap();
    let sys = seeded_systems(5, 3).unwrap();
    for s in &sys {
        for mu in s.eigenvalues.iter().filter(|m| m.re == 0.0) {
            let d = s.system.dim();
            let svd = (s.system.a.clone() - nalgebra::DMatrix::<C64>::identity(d, d) * *mu).svd(false, true);
            let k = svd.singular_values.imin();
            let v = svd.v_t.unwrap();
            let x = CVec(v.row(k).iter().map(|z| z.conj()).collect());
            let orbit = s.system.orbit(&x).unwrap();
            let e = estimate(&orbit, SpectrumKind::Laplace, &g, &EstimatorParams::default()).unwrap();
            let sing = e.singular_points();
            let expect_double = s.eigenvalues.iter().filter(|m| *m == mu).count() > 1;
            if !expect_double {
                assert_eq!(sing, vec![mu.im], "eigenvalue {mu}");
            } else {
                assert!(sing.contains(&mu.im));
            }
            assert_eq!(e.count(Classification::Undecided), 0);
        }
    }
}

#[test]
fn tauberian_reports_are_reproducible() {
    let phi = FunctionDescriptor::character(1.0, cr(1.0));
    let hyp = Hypothesis::Estimate {
        grid: FrequencyGrid::new(-0.1, 0.1, 0.05).unwrap(),
        params: EstimatorParams::default(),
    };
    let s = TauberianSettings::default();
    let a = check_bounded_primitive(&phi, 0.0, &hyp, &s).unwrap();
    let b = check_bounded_primitive(&phi, 0.0, &hyp, &s).unwrap();
    assert_eq!(a.to_json(), b.to_json());
    assert!(a.pass);
}
