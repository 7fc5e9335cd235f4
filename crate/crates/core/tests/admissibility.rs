use dsaddle::admissibility::{
    bc_power_delta, check_a, check_corollary_trends, default_delta, diagnose, product, Classification, Grid, Verdict,
    A_CONDITIONS, POLE_GROWTH, T_CONDITIONS,
};
use dsaddle::catalog;

fn run(key: &str) -> dsaddle::admissibility::Diagnosis {
    let e = catalog::from_key(key).unwrap();
    let w = e.witness().unwrap();
    let grid = Grid::geometric(e.alpha(), w.beta_offset, e.depth);
    diagnose(&e.series, &w, &grid, Some(e.expected)).unwrap()
}

#[test]
fn geometric_is_admissible_but_fails_t3() {
    let d = run("exp_geom:2");
    assert!(d.matched, "{:?}", d.mismatches);
    assert_eq!(d.classification, Classification::Admissible);
    assert!(A_CONDITIONS.iter().all(|n| d.a.verdict(n) == Some(Verdict::PassTrend)));
    assert_eq!(d.t.as_ref().unwrap().verdict("T3"), Some(Verdict::FailTrend));
}

#[test]
fn zeta_has_a_pole_and_is_not_admissible() {
    let d = run("zeta_pow:2");
    assert_eq!(d.classification, Classification::NotAdmissible);
    assert_eq!(d.trends.verdict(POLE_GROWTH), Some(Verdict::FailTrend));
    assert!(d.matched);
}

#[test]
fn t_admissible_implies_admissible_on_the_grid() {
    let d = run("exp_zeta_shift:1");
    let t = d.t.as_ref().unwrap();
    if T_CONDITIONS.iter().all(|n| t.verdict(n) == Some(Verdict::PassTrend)) {
        assert!(A_CONDITIONS.iter().all(|n| d.a.verdict(n) == Some(Verdict::PassTrend)));
    }
    assert_eq!(d.classification, Classification::TAdmissible);
}

#[test]
fn default_delta_for_the_geometric_series_at_one() {
    // b_2(1) = 6 (log 2)^2 and c_2(1) = -26 (log 2)^3
    let e = catalog::from_key("exp_geom:2").unwrap();
    let [_, a, b, c] = e.series.real_jet_at(1.0).unwrap();
    let l = std::f64::consts::LN_2;
    assert!((a + 2.0 * l).abs() < 1e-13);
    assert!((b - 6.0 * l * l).abs() < 1e-13);
    assert!((c + 26.0 * l.powi(3)).abs() < 1e-12);
    let expected = (156.0 * l.powi(5)).powf(-0.2);
    assert!((bc_power_delta(b, c) - expected).abs() < 1e-13);
    let w = default_delta(&e.series).unwrap();
    assert!(w.delta_at(w.beta_offset) > 0.0 && w.delta_at(w.beta_offset) < 1.0);
}

#[test]
fn product_of_geometric_series_is_admissible() {
    let e2 = catalog::from_key("exp_geom:2").unwrap();
    let e3 = catalog::from_key("exp_geom:3").unwrap();
    let (w2, w3) = (e2.witness().unwrap(), e3.witness().unwrap());
    let (p, w) = product(&e2.series, &w2, &e3.series, &w3).unwrap();
    for eps in [0.3, 1e-3, 1e-9] {
        assert!(w.delta_at(eps) <= w2.delta_at(eps).min(w3.delta_at(eps)));
    }
    let rep = check_a(&p, &w, &Grid::geometric(p.alpha(), w.beta_offset, 64)).unwrap();
    assert!(rep.all_pass(), "{:?}", rep.conditions.keys().map(|k| (k, rep.verdict(k))).collect::<Vec<_>>());
}

#[test]
fn mismatched_abscissas_are_rejected() {
    let a = catalog::from_key("exp_geom:2").unwrap();
    let b = catalog::from_key("exp_zeta").unwrap();
    assert!(product(&a.series, &a.witness().unwrap(), &b.series, &b.witness().unwrap()).is_err());
}

#[test]
fn deeper_grids_do_not_flip_pass_to_fail() {
    let e = catalog::from_key("zeta_y:5").unwrap();
    let w = e.witness().unwrap();
    let shallow = check_corollary_trends(&e.series, &Grid::geometric(e.alpha(), w.beta_offset, 24)).unwrap();
    let deep = check_corollary_trends(&e.series, &Grid::geometric(e.alpha(), w.beta_offset, 48)).unwrap();
    for (name, c) in &shallow.conditions {
        if c.verdict == Verdict::PassTrend {
            assert_ne!(deep.verdict(name), Some(Verdict::FailTrend), "{name}");
        }
    }
}
