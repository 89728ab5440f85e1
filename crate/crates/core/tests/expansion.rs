use heatasym::expansion::{calibrate, calibration_t_grid, extract_coefficients, ExpansionTable, CALIBRATED};
use heatasym::initial_data::{builtin, log_grid, InitialProfile1D, Params};
use heatasym::specfun::SignMode;
use heatasym::verify::{convergence_report, CellStatus};

fn profile(name: &str) -> InitialProfile1D {
    builtin(name, &Params::default()).unwrap()
}

const ORDERS: &[(usize, bool)] =
    &[(1, false), (1, true), (2, false), (2, true), (3, false), (3, true), (4, false), (5, false)];

#[test]
fn calibration_selects_the_built_in_convention() {
    let report = calibrate(&[profile("lorentzian"), profile("gated_lorentzian")], &[0.0, 0.5, 1.0], 1e-12).unwrap();
    assert_eq!(report.selected, CALIBRATED);
    assert!(report.best_score() < 1e-4);
    assert!(report.margin() > 100.0);
}

#[test]
fn extracted_coefficients_match_the_table() {
    for name in ["gated_lorentzian", "gated_inverse"] {
        let p = profile(name);
        let table = ExpansionTable::new(&p, 2, SignMode::Alternating, 1e-8).unwrap();
        for eta in [-1.0, -0.5, 0.0, 0.5, 1.0] {
            let fit = extract_coefficients(&p, eta, ORDERS, &calibration_t_grid(), 1e-12).unwrap();
            for n in 1..=2 {
                for (log, want) in [(true, table.h_n1(n, eta).unwrap()), (false, table.h_n0(n, eta).unwrap())] {
                    let got = fit.coefficient(n, log).unwrap();
                    assert!(
                        (got - want).abs() <= 1e-2 * want.abs() + 1e-5,
                        "{name} n={n} log={log} eta={eta}: {got} vs {want}"
                    );
                }
            }
        }
    }
}

#[test]
fn each_extra_order_steepens_the_decay() {
    let report =
        convergence_report(&profile("gated_lorentzian"), &[0.0, 0.7], &log_grid(1e2, 1e6, 12), &[0, 1, 2], 1e-12)
            .unwrap();
    for eta in [0.0, 0.7] {
        let slopes: Vec<f64> = (0..=2).map(|n| report.cell(eta, n).unwrap().slope.unwrap()).collect();
        assert!(slopes.windows(2).all(|w| w[1] < w[0] - 0.3), "{slopes:?}");
    }
    // Away from η = 0 the next term carries ln t, whose finite-window slope is
    // shallower than t^{-(N+1)/2}; the rate test is only clean where it vanishes.
    assert!((0..=2).all(|n| report.cell(0.0, n).unwrap().status == CellStatus::Pass));
}

#[test]
fn partial_sums_approach_the_oracle() {
    use heatasym::oracle::{heat_oracle_1d, OracleOptions};
    let p = profile("lorentzian");
    let table = ExpansionTable::new(&p, 4, SignMode::Alternating, 1e-10).unwrap();
    let x = 3.0;
    let mut prev = f64::INFINITY;
    for t in [1e2, 1e3, 1e4] {
        let exact = heat_oracle_1d(&p, x, t, &OracleOptions::default()).unwrap().value;
        let err = (table.eval(x, t).unwrap() - exact).abs();
        assert!(err < prev / 10.0, "t={t}: {err} vs {prev}");
        prev = err;
    }
}
