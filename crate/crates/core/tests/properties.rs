//! Property tests over randomized fields and parameters: the exact
//! (machine-precision) invariants every operation must keep.

use proptest::prelude::*;

use wsemb::bumps::smoothstep;
use wsemb::grid::{integrate, Grid, ScalarField, SharedGrid};
use wsemb::nehari::NlsFunctional;
use wsemb::norms::{h1v_norm, interpolation_check_1d, lw_tau_norm};
use wsemb::potential::make_power;

fn small_grid() -> SharedGrid<f64> {
    Grid::new(2, 4.0, 33).unwrap().shared()
}

fn bump(grid: &SharedGrid<f64>, cx: f64, cy: f64, width: f64, amp: f64) -> ScalarField<f64> {
    ScalarField::sample(grid, |x| {
        let dx = x[0] - cx;
        let dy = x[1] - cy;
        amp * (-(dx * dx + dy * dy) / (2.0 * width * width)).exp()
    })
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn smoothstep_stays_in_unit_interval(s in -2.0..3.0_f64) {
        let v = smoothstep(s);
        prop_assert!((0.0..=1.0).contains(&v));
        // monotone on [0, 1]
        let v2 = smoothstep((s + 0.01).min(3.0));
        if (0.0..1.0).contains(&s) {
            prop_assert!(v2 >= v);
        }
    }

    #[test]
    fn integration_is_linear(
        a in -10.0..10.0_f64,
        b in -10.0..10.0_f64,
        cx in -2.0..2.0_f64,
        w1 in 0.3..1.5_f64,
        w2 in 0.3..1.5_f64,
    ) {
        let g = small_grid();
        let f = bump(&g, cx, 0.0, w1, 1.0);
        let h = bump(&g, -cx, 0.5, w2, 1.0);
        let combo = f.scaled(a).add_scaled(b, &h).unwrap();
        let lhs = integrate(&combo);
        let rhs = a * integrate(&f) + b * integrate(&h);
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs().max(rhs.abs())));
    }

    #[test]
    fn norms_scale_exactly(
        c in prop::sample::select(vec![-3.0, -0.5, 0.25, 2.0, 7.5]),
        cx in -2.0..2.0_f64,
        width in 0.3..1.5_f64,
    ) {
        let g = small_grid();
        let v = make_power(2.0).unwrap();
        let u = bump(&g, cx, 0.0, width, 1.0);
        let scaled = u.scaled(c);
        let n1 = h1v_norm(&scaled, &v);
        let n2 = c.abs() * h1v_norm(&u, &v);
        prop_assert!((n1 - n2).abs() <= 1e-12 * n2);
        let t1 = lw_tau_norm(&scaled, &v, 3.5).unwrap();
        let t2 = c.abs() * lw_tau_norm(&u, &v, 3.5).unwrap();
        prop_assert!((t1 - t2).abs() <= 1e-11 * t2);
    }

    #[test]
    fn projection_lands_on_the_constraint_set(
        cx in -2.0..2.0_f64,
        width in 0.3..1.5_f64,
        amp in prop::sample::select(vec![0.01, 0.5, 1.0, 40.0]),
    ) {
        let g = small_grid();
        let v = make_power(2.0).unwrap();
        let f = NlsFunctional::new(&g, &v, &v, 3.0).unwrap();
        let u = bump(&g, cx, 0.0, width, amp);
        let proj = f.project(&u).unwrap();
        let c = f.components(&proj);
        prop_assert!(f.j_of(&c).abs() <= 1e-9 * c.a);
        // projecting again is the identity
        let t = f.projection_scale(&c).unwrap();
        prop_assert!((t - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn interpolation_inequality_never_violated(
        cx in -4.0..4.0_f64,
        width in 0.1..2.0_f64,
        amp in 0.1..5.0_f64,
        tau in 2.1..6.0_f64,
    ) {
        let g = Grid::new(1, 8.0, 257).unwrap().shared();
        let v = make_power(2.0).unwrap();
        let u = ScalarField::sample(&g, |x| {
            let d = x[0] - cx;
            amp * (-d * d / (2.0 * width * width)).exp()
        })
        .unwrap();
        let rep = interpolation_check_1d(&u, &v, tau).unwrap();
        prop_assert!(!rep.violated, "slack {}", rep.slack);
    }

    #[test]
    fn i_is_even_in_u(
        cx in -2.0..2.0_f64,
        width in 0.3..1.5_f64,
    ) {
        let g = small_grid();
        let v = make_power(2.0).unwrap();
        let f = NlsFunctional::new(&g, &v, &v, 3.0).unwrap();
        let u = bump(&g, cx, 0.3, width, 1.0);
        prop_assert_eq!(f.i_value(&u.scaled(-1.0)), f.i_value(&u));
    }
}
