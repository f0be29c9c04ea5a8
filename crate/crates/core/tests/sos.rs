use chsh_zn::bias::bias_polynomial;
use chsh_zn::game::ModNGameParams;
use chsh_zn::numerics::*;
use chsh_zn::poly::apply_to_state;
use chsh_zn::sos::*;
use chsh_zn::strategy::{canonical_strategy, random_strategy};

fn bias(n: u32) -> chsh_zn::poly::NCPolynomial {
    bias_polynomial(ModNGameParams::chsh(n).unwrap()).unwrap()
}

#[test]
fn chsh_identity_on_random_tuples() {
    let v = verify_sos_identity(&certificate_chsh(), &bias(2), 100, 1).unwrap();
    assert!(v.max_residual <= 1e-9, "{}", v.max_residual);
    assert!(v.min_sos_eigenvalue >= -1e-9);
    assert_eq!(v.dims.len(), 100);
}

#[test]
fn g3_identity_on_random_tuples() {
    let v = verify_sos_identity(&certificate_g3(), &bias(3), 100, 2).unwrap();
    assert!(v.max_residual <= 1e-8, "{}", v.max_residual);
    assert!(v.min_sos_eigenvalue >= -1e-9);
    for (d, expected) in v.dims.iter().take(4).zip([(3, 3), (3, 6), (6, 3), (6, 6)]) {
        assert_eq!(*d, expected);
    }
}

/// CHSH identity evaluated without the certificate type, on reflections `U diag(±1) U*`.
#[test]
fn chsh_identity_by_hand() {
    let mut rng = SeededRng::new(3);
    let d = 4;
    let mut refl = || {
        let u = random_unitary(d, &mut rng);
        let signs: Vec<_> = (0..d).map(|k| if k % 2 == 0 { ONE } else { -ONE }).collect();
        &(&u * &ComplexMatrix::diagonal(&signs)) * &u.adjoint()
    };
    let (a0, a1, b0, b1) = (refl(), refl(), refl(), refl());
    let id = ComplexMatrix::identity(d);
    let b = &(&(&a0.kron(&b0) + &a0.kron(&b1)) + &a1.kron(&b0)) - &a1.kron(&b1);
    let r2 = 2f64.sqrt();
    let t1 = &(&a0.kron(&id) + &a1.kron(&id)) - &id.kron(&b0).scale_real(r2);
    let t2 = &(&a0.kron(&id) - &a1.kron(&id)) - &id.kron(&b1).scale_real(r2);
    let rhs = (&(&t1.adjoint() * &t1) + &(&t2.adjoint() * &t2)).scale_real(r2 / 4.0);
    let lhs = &ComplexMatrix::identity(d * d).scale_real(2.0 * r2) - &b;
    assert!(lhs.distance(&rhs) < 1e-10);
}

#[test]
fn symbolic_defects_vanish() {
    assert!(identity_defect_polynomial(&certificate_chsh(), &bias(2)).unwrap().prune(1e-12).is_zero());
    assert!(identity_defect_polynomial(&certificate_g3(), &bias(3)).unwrap().prune(1e-12).is_zero());
    assert!(identity_defect_polynomial(&certificate_g3(), &bias(2)).is_err());
}

#[test]
fn value_bounds() {
    assert!((certificate_chsh().value_bound() - (0.5 + 2f64.sqrt() / 4.0)).abs() < 1e-12);
    assert!((certificate_g3().value_bound() - 5.0 / 6.0).abs() < 1e-12);
}

#[test]
fn g3_certificate_weights() {
    let c = certificate_g3();
    assert_eq!(c.squares.len(), 8);
    let w: Vec<f64> = c.squares.iter().map(|s| s.weight).collect();
    let s21 = 21f64.sqrt();
    for (got, want) in w.chunks(2).zip([5.0 / 86.0, (14.0 + s21) / 344.0, (14.0 - s21) / 344.0, 7.0 / 86.0]) {
        assert!((got[0] - want).abs() < 1e-15 && (got[1] - want).abs() < 1e-15);
    }
    c.validate().unwrap();
}

#[test]
fn squares_annihilate_canonical_states() {
    for (cert, n) in [(certificate_chsh(), 2), (certificate_g3(), 3)] {
        let s = canonical_strategy(n).unwrap();
        for (name, r) in annihilation_residuals(&cert, &s).unwrap() {
            assert!(r <= 1e-9, "{name}: {r}");
        }
    }
}

#[test]
fn random_bias_eigenvalues_stay_below_six() {
    let top = max_random_bias_eigenvalue(ModNGameParams::chsh(3).unwrap(), 50, 9).unwrap();
    assert!(top <= 6.0 + 1e-7, "{top}");
    assert!(top > 0.0);
}

#[test]
fn perturbed_weight_breaks_identity() {
    let mut cert = certificate_g3();
    for sq in cert.squares.iter_mut().skip(6) {
        sq.weight += 1e-3;
    }
    let v = verify_sos_identity(&cert, &bias(3), 8, 4).unwrap();
    assert!(v.max_residual > 1e-3, "{}", v.max_residual);
}

#[test]
fn nonpositive_weight_rejected() {
    let mut cert = certificate_chsh();
    cert.squares[1].weight = 0.0;
    assert!(matches!(verify_sos_identity(&cert, &bias(2), 1, 0), Err(SosError::NonPositiveWeight(_))));
}

#[test]
fn certificate_json_round_trip() {
    let c = certificate_g3();
    let back: SOSCertificate = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
    assert!(identity_defect_polynomial(&back, &bias(3)).unwrap().prune(1e-12).is_zero());
}

#[test]
fn derived_relations_on_optimal_and_random_strategies() {
    let rels = derived_relations_g3();
    assert_eq!(rels.len(), 15);
    let s = canonical_strategy(3).unwrap();
    let asg = s.assignment();
    for r in &rels {
        for p in &r.polys {
            let res = norm(&apply_to_state(p, &asg, s.state()).unwrap());
            assert!(res <= 1e-9, "{}: {res}", r.name);
        }
    }
    let mut rng = SeededRng::new(5);
    let t = random_strategy(3, 3, 3, &mut rng).unwrap();
    let asg = t.assignment();
    let worst = rels
        .iter()
        .flat_map(|r| r.polys.iter())
        .map(|p| norm(&apply_to_state(p, &asg, t.state()).unwrap()))
        .fold(0.0, f64::max);
    assert!(worst > 1e-2);
}

#[test]
fn ring_relation_on_canonical_state() {
    let s = canonical_strategy(3).unwrap();
    let p = &ring_polynomial(3) + &chsh_zn::poly::NCPolynomial::identity(3);
    assert!(norm(&apply_to_state(&p, &s.assignment(), s.state()).unwrap()) <= 1e-9);
}
