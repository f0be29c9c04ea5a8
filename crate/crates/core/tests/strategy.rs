use chsh_zn::bias::bias_value;
use chsh_zn::game::{make_mod_n_game, ModNGameParams};
use chsh_zn::numerics::*;
use chsh_zn::poly::NCPolynomial;
use chsh_zn::strategy::*;
use num_complex::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

/// `Σ π(i,j) ⟨ψ|E⊗F|ψ⟩ V` with full Kronecker products.
fn kron_value(n: u32, s: &chsh_zn::strategy::Strategy) -> f64 {
    let g = make_mod_n_game(ModNGameParams::chsh(n).unwrap()).unwrap();
    let pa: Vec<Vec<ComplexMatrix>> = s.alice().iter().map(|u| observable_to_pvm(u, n, 1e-9).unwrap()).collect();
    let pb: Vec<Vec<ComplexMatrix>> = s.bob().iter().map(|u| observable_to_pvm(u, n, 1e-9).unwrap()).collect();
    let mut v = 0.0;
    for i in 0..2 {
        for j in 0..2 {
            for a in 0..n as usize {
                for b in 0..n as usize {
                    if g.wins(i, j, a, b) {
                        v += 0.25 * pa[i][a].kron(&pb[j][b]).sandwich(s.state(), s.state()).re;
                    }
                }
            }
        }
    }
    v
}

#[test]
fn chsh_observables() {
    let s = canonical_strategy(2).unwrap();
    let sy = ComplexMatrix::from_rows(&[vec![ZERO, -I], vec![I, ZERO]]).unwrap();
    assert!(s.alice()[1].distance(&sy) < 1e-15);
}

#[test]
fn canonical_state_is_unit() {
    for n in 2..=40 {
        let amps = canonical_amplitudes(n);
        let g2: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        assert!((g2 - gamma(n).powi(2)).abs() < 1e-10, "n={n}");
        let s = canonical_strategy(n).unwrap();
        assert!((norm(s.state()) - 1.0).abs() < 1e-12);
    }
}

#[test]
fn rejects_small_order() {
    assert!(matches!(canonical_strategy(1), Err(StrategyError::Order(1))));
}

#[test]
fn pvm_of_identity_and_sigma_x() {
    let p = observable_to_pvm(&ComplexMatrix::identity(2), 2, 1e-9).unwrap();
    assert!(p[0].distance(&ComplexMatrix::identity(2)) < 1e-14);
    assert!(p[1].frobenius_norm() < 1e-14);
    let sx = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
    let p = observable_to_pvm(&sx, 2, 1e-9).unwrap();
    let plus = ComplexMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]);
    let minus = ComplexMatrix::from_real_rows(&[&[0.5, -0.5], &[-0.5, 0.5]]);
    assert!(p[0].distance(&plus) < 1e-14);
    assert!(p[1].distance(&minus) < 1e-14);
}

#[test]
fn pvm_rejects_wrong_order() {
    let u = random_order_n_observable(3, 3, 4).unwrap();
    assert!(observable_to_pvm(&u, 2, 1e-9).is_err());
}

#[test]
fn known_values() {
    let cases = [(2, 0.5 + 2f64.sqrt() / 4.0, 1e-10), (3, 5.0 / 6.0, 1e-10), (4, 0.826641, 1e-6)];
    for (n, expected, tol) in cases {
        let g = make_mod_n_game(ModNGameParams::chsh(n).unwrap()).unwrap();
        let v = strategy_value_direct(&g, &canonical_strategy(n).unwrap()).unwrap();
        assert!((v - expected).abs() < tol, "n={n}: {v}");
    }
}

#[test]
fn value_formula_and_monotonicity() {
    let mut prev = f64::INFINITY;
    for n in 2..=40 {
        let row = entropy_row(n).unwrap();
        assert!((row.value - canonical_value_formula(n)).abs() < 1e-10, "n={n}");
        assert!(row.value < prev);
        assert!(row.value > 0.5 + 1.0 / PI);
        prev = row.value;
    }
}

#[test]
fn kron_route_matches_direct_value() {
    for n in 2..=5 {
        let s = canonical_strategy(n).unwrap();
        let g = make_mod_n_game(ModNGameParams::chsh(n).unwrap()).unwrap();
        assert!((kron_value(n, &s) - strategy_value_direct(&g, &s).unwrap()).abs() < 1e-12);
    }
}

#[test]
fn root_sum_identities() {
    for n in 2..=40 {
        let fwd = shifted_root_sum(n, false);
        let bwd = shifted_root_sum(n, true);
        assert!((fwd - bwd).norm() < 1e-10, "n={n}");
        let target = -1.0 / (PI / (2.0 * n as f64)).sin();
        assert!((fwd - Complex64::new(target, 0.0)).norm() < 1e-10, "n={n}");
    }
}

#[test]
fn schmidt_of_canonical_state() {
    for n in 2..=40u32 {
        let s = canonical_strategy(n).unwrap();
        let sd = schmidt(s.state(), s.dim_a(), s.dim_b()).unwrap();
        assert_eq!(sd.rank, n as usize);
        let mut expected: Vec<f64> = canonical_amplitudes(n).iter().map(|a| a.norm() / gamma(n)).collect();
        expected.sort_by(|a, b| b.partial_cmp(a).unwrap());
        for (c, e) in sd.coefficients.iter().zip(&expected) {
            assert!((c - e).abs() < 1e-10);
            assert!(*c > 0.01 / (n as f64).sqrt());
        }
        let oracle: f64 = -expected.iter().map(|c| c * c * (c * c).log2()).sum::<f64>();
        assert!((sd.entropy - oracle).abs() < 1e-10);
    }
}

#[test]
fn entropy_ratios() {
    for (n, r) in [(2, 1.0), (3, 0.991159), (4, 0.990294), (40, 0.995008)] {
        assert!((entropy_row(n).unwrap().entropy_ratio - r).abs() < 1e-5, "n={n}");
    }
}

#[test]
fn schmidt_of_maximally_entangled() {
    for d in 1..6usize {
        let mut psi = vec![ZERO; d * d];
        for i in 0..d {
            psi[i * d + i] = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
        }
        let sd = schmidt(&psi, d, d).unwrap();
        assert_eq!(sd.rank, d);
        assert!((sd.entropy - (d as f64).log2()).abs() < 1e-12);
    }
    assert!(matches!(schmidt(&[ONE, ONE], 1, 2), Err(StrategyError::StateNorm(_))));
}

#[test]
fn trivial_relation_and_pairing() {
    let s = canonical_strategy(3).unwrap();
    let zero = &NCPolynomial::identity(3) - &NCPolynomial::identity(3);
    assert_eq!(check_state_relation(&s, &zero).unwrap(), 0.0);
    let w = root_of_unity(3, 1);
    let pairing = &(&NCPolynomial::a(3, 0, 1) * &NCPolynomial::b(3, 0, -1))
        - &(&NCPolynomial::a(3, 1, 1) * &NCPolynomial::b(3, 1, 1)).scale(w.conj());
    assert!(check_state_relation(&s, &pairing).unwrap() <= 1e-9);
}

#[test]
fn strategy_json_round_trip() {
    let s = canonical_strategy(3).unwrap();
    let text = serde_json::to_string(&s).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    for key in ["order", "dimA", "dimB", "aliceObs", "bobObs", "state"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    let back: chsh_zn::strategy::Strategy = serde_json::from_str(&text).unwrap();
    assert_eq!(back.state(), s.state());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn direct_and_bias_values_agree(n in 2u32..6, da in 1usize..4, db in 1usize..4, seed in any::<u64>()) {
        let mut rng = SeededRng::new(seed);
        let s = random_strategy(n, da, db, &mut rng).unwrap();
        let p = ModNGameParams::chsh(n).unwrap();
        let direct = strategy_value_direct(&make_mod_n_game(p).unwrap(), &s).unwrap();
        prop_assert!((direct - bias_value(p, &s).unwrap()).abs() < 1e-9);
        prop_assert!((-1e-9..=1.0 + 1e-9).contains(&direct));
    }

    #[test]
    fn pvm_round_trip(seed in any::<u64>(), order in 2u32..6, dim in 1usize..6) {
        let u = random_order_n_observable(order, dim, seed).unwrap();
        let p = observable_to_pvm(&u, order, 1e-9).unwrap();
        let id = ComplexMatrix::identity(dim);
        let mut sum = ComplexMatrix::zeros(dim, dim);
        let mut recon = ComplexMatrix::zeros(dim, dim);
        for (i, e) in p.iter().enumerate() {
            prop_assert!(e.hermitian_defect() < 1e-10);
            prop_assert!((e * e).distance(e) < 1e-10);
            for f in &p[i + 1..] {
                prop_assert!((e * f).frobenius_norm() < 1e-10);
            }
            sum += e;
            recon += &e.scale(root_of_unity(order as u64, i as i64));
        }
        prop_assert!(sum.distance(&id) < 1e-10);
        prop_assert!(recon.distance(&u) < 1e-10);
    }

    #[test]
    fn transpose_trick(seed in any::<u64>(), d in 1usize..7) {
        let mut rng = SeededRng::new(seed);
        let m = ComplexMatrix::from_fn(d, d, |_, _| rng.complex_normal());
        let psi = chsh_zn::bcs::maximally_entangled_state(d);
        let lhs = apply_local(Some(&m), None, &psi, d, d);
        let rhs = apply_local(None, Some(&m.transpose()), &psi, d, d);
        prop_assert!(norm(&sub_vec(&lhs, &rhs)) <= 1e-12);
    }

    #[test]
    fn genuine_representation_on_any_state(seed in any::<u64>()) {
        use chsh_zn::group::{enumerate_group, MonomialUnitary, DEFAULT_CAP};
        let cat = enumerate_group(&MonomialUnitary::alice_generators(3), DEFAULT_CAP).unwrap();
        let table = cat.multiplication_table().unwrap();
        let images: Vec<ComplexMatrix> = cat.elements().iter().map(MonomialUnitary::to_matrix).collect();
        let mut rng = SeededRng::new(seed);
        let psi = normalize(&rng.gaussian_vector(9));
        for side in [Side::Alice, Side::Bob] {
            let r = check_psi_representation(&table, &images, &psi, 3, 3, side).unwrap();
            prop_assert!(r < 1e-10);
        }
    }
}
