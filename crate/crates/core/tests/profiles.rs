use heatasym::initial_data::document::ProfileDocument;
use heatasym::initial_data::{builtin, builtin_names, regularized_moments, InitialProfile1D, Params, Side};
use heatasym::oracle::{heat_oracle_1d, scaling_image, OracleOptions};
use proptest::prelude::*;

fn profile(name: &str) -> InitialProfile1D {
    builtin(name, &Params::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn moments_are_linear(a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let (f, g) = (profile("lorentzian"), profile("gated_lorentzian"));
        let mix = f.linear_combination(a, &g, b).unwrap();
        let (mf, mg, mm) = (
            regularized_moments(&f, 3, 1e-9).unwrap(),
            regularized_moments(&g, 3, 1e-9).unwrap(),
            regularized_moments(&mix, 3, 1e-9).unwrap(),
        );
        for side in [Side::Plus, Side::Minus] {
            for n in 1..=3 {
                let want = a * mf.get(side, n).unwrap() + b * mg.get(side, n).unwrap();
                prop_assert!((mm.get(side, n).unwrap() - want).abs() < 1e-7, "{side:?} {n}");
            }
        }
    }

    #[test]
    fn reflection_is_an_involution(x in -50.0f64..50.0, which in 0usize..8) {
        let p = profile(builtin_names()[which]);
        let back = p.reflect().reflect();
        prop_assert_eq!(back.eval(x), p.eval(x));
        prop_assert_eq!(&back.tail_plus.coefficients, &p.tail_plus.coefficients);
        prop_assert_eq!(&back.tail_minus.coefficients, &p.tail_minus.coefficients);
    }

    #[test]
    fn oracle_transports_under_scaling(x in -3.0f64..3.0, t in 0.1f64..10.0, lambda in 0.3f64..4.0) {
        let p = profile("gated_lorentzian");
        let opts = OracleOptions::with_tol(1e-12);
        let scaled = p.scaled(lambda).unwrap();
        let (xs, ts) = scaling_image(x, t, lambda);
        let lhs = heat_oracle_1d(&scaled, x, t, &opts).unwrap().value;
        let rhs = heat_oracle_1d(&p, xs, ts, &opts).unwrap().value;
        prop_assert!((lhs - rhs).abs() < 1e-10);
    }
}

#[test]
fn documents_round_trip_for_every_builtin() {
    for name in builtin_names() {
        let p = profile(name);
        let doc = ProfileDocument::from_profile(&p).unwrap();
        let text = doc.to_toml_string().unwrap();
        let back = ProfileDocument::from_toml_str(&text).unwrap();
        assert_eq!(back, doc);
        let q = back.to_profile().unwrap();
        for x in [-7.0, -1.0, 0.0, 0.3, 2.0, 40.0] {
            assert_eq!(q.eval(x), p.eval(x), "{name} at {x}");
        }
    }
}

#[test]
fn derived_profiles_have_no_document() {
    let mix = profile("lorentzian").linear_combination(1.0, &profile("gated_lorentzian"), 2.0).unwrap();
    assert!(ProfileDocument::from_profile(&mix).is_err());
}
