use chsh_zn::bias::*;
use chsh_zn::game::{make_mod_n_game, ModNGameParams};
use chsh_zn::numerics::*;
use chsh_zn::strategy::{canonical_strategy, canonical_value_formula, observable_to_pvm, random_strategy};
use proptest::prelude::*;

/// `4n·W − 4·I`, where `W = Σ π(i,j) Σ_{V=1} E^i_a ⊗ F^j_b` is the game operator.
fn bias_from_projectors(p: ModNGameParams, s: &chsh_zn::strategy::Strategy) -> ComplexMatrix {
    let n = p.n;
    let g = make_mod_n_game(p).unwrap();
    let pa: Vec<Vec<ComplexMatrix>> = s.alice().iter().map(|u| observable_to_pvm(u, n, 1e-9).unwrap()).collect();
    let pb: Vec<Vec<ComplexMatrix>> = s.bob().iter().map(|u| observable_to_pvm(u, n, 1e-9).unwrap()).collect();
    let dim = s.dim_a() * s.dim_b();
    let mut w = ComplexMatrix::zeros(dim, dim);
    for i in 0..2 {
        for j in 0..2 {
            for a in 0..n as usize {
                for b in 0..n as usize {
                    if g.wins(i, j, a, b) {
                        w += &pa[i][a].kron(&pb[j][b]).scale_real(g.probability(i, j));
                    }
                }
            }
        }
    }
    &w.scale_real(4.0 * n as f64) - &ComplexMatrix::identity(dim).scale_real(4.0)
}

#[test]
fn eigenrelation_holds_up_to_twelve() {
    for n in 2..=12 {
        assert!(eigenrelation_residual(n).unwrap() <= 1e-9, "n={n}");
    }
}

#[test]
fn n3_top_eigenvalue_is_simple_six() {
    let s = canonical_strategy(3).unwrap();
    let r = bias_spectrum(ModNGameParams::chsh(3).unwrap(), &s).unwrap();
    assert!((r.top_eigenvalue - 6.0).abs() < 1e-9);
    assert_eq!(r.multiplicity, 1);
    let v = r.top_eigenvector.unwrap();
    assert!(inner(&v, s.state()).norm() >= 1.0 - 1e-8);
    assert!((r.predicted_value - 5.0 / 6.0).abs() < 1e-10);
}

#[test]
fn chsh_top_eigenvalue() {
    let s = canonical_strategy(2).unwrap();
    let r = bias_spectrum(ModNGameParams::chsh(2).unwrap(), &s).unwrap();
    assert!((r.top_eigenvalue - 2.0 * 2f64.sqrt()).abs() < 1e-10);
}

#[test]
fn canonical_eigenvalue_matches_value_formula() {
    for n in 2..=40 {
        let nf = n as f64;
        let v = canonical_eigenvalue(n) / (4.0 * nf) + 1.0 / nf;
        assert!((v - canonical_value_formula(n)).abs() < 1e-12);
    }
}

#[test]
fn bias_rows_dense_and_lanczos() {
    for n in [2, 3, 4, 5, 10, 17] {
        let row = bias_row(n).unwrap();
        assert_eq!(row.method, if n * n <= DENSE_LIMIT as u32 { "dense" } else { "lanczos" });
        assert!((row.predicted_value - row.formula_value).abs() < 1e-9, "n={n}");
    }
}

#[test]
fn csv_layout() {
    let rows: Vec<BiasRow> = (2..=4).map(|n| bias_row(n).unwrap()).collect();
    let mut out = Vec::new();
    write_bias_csv(&rows, &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], BIAS_CSV_HEADER);
    assert_eq!(lines.len(), 4);
    assert!(lines[2].starts_with("3,6.000000000000,0.833333333333,"));
}

#[test]
fn report_json_round_trip() {
    let s = canonical_strategy(3).unwrap();
    let r = bias_spectrum(ModNGameParams::chsh(3).unwrap(), &s).unwrap();
    let text = serde_json::to_string(&r).unwrap();
    assert!(text.contains("\"topEigenvalue\""));
    let back: BiasReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back.top_eigenvector, r.top_eigenvector);
}

#[test]
fn invalid_parameters_rejected() {
    assert!(ModNGameParams::new(3, 3, 0).is_err());
    assert!(ModNGameParams::chsh(1).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn operator_matches_projector_route(n in 2u32..5, m1 in 0u32..5, m2 in 0u32..5, da in 1usize..4, db in 1usize..4, seed in any::<u64>()) {
        let p = ModNGameParams::new(n, m1 % n, m2 % n).unwrap();
        let mut rng = SeededRng::new(seed);
        let s = random_strategy(n, da, db, &mut rng).unwrap();
        let b = bias_operator(p, &s).unwrap();
        prop_assert!(b.distance(&bias_from_projectors(p, &s)) < 1e-9);
        prop_assert!(b.hermitian_defect() < 1e-10);
    }

    #[test]
    fn value_bounded_by_top_eigenvalue(n in 2u32..5, seed in any::<u64>()) {
        let p = ModNGameParams::chsh(n).unwrap();
        let mut rng = SeededRng::new(seed);
        let s = random_strategy(n, 2, 2, &mut rng).unwrap();
        let r = bias_spectrum(p, &s).unwrap();
        prop_assert!(bias_value(p, &s).unwrap() <= r.predicted_value + 1e-9);
    }
}
