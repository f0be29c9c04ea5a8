use chsh_zn::group::{evaluate_word, MonomialUnitary};
use chsh_zn::numerics::*;
use chsh_zn::psirep::*;
use chsh_zn::strategy::{canonical_strategy, check_psi_representation, random_strategy, Side};

#[test]
fn canonical_strategy_induces_psi_representations() {
    for n in 2..=4 {
        for side in [Side::Alice, Side::Bob] {
            let r = check_induced(n, side).unwrap();
            assert_eq!(r.elements, ((n * n) as usize) << (n - 1));
            assert_eq!(r.pairs, r.elements * r.elements);
            assert!(r.max_residual <= 1e-9, "n={n} {side:?}: {}", r.max_residual);
        }
    }
}

#[test]
fn rewrites_name_the_same_element() {
    for n in 2..=6 {
        assert!(normal_form_rewrites_agree(n).unwrap().is_empty(), "n={n}");
    }
}

#[test]
fn signed_minimal_range() {
    let w = signed_minimal_word(&vec![(0, 7), (1, -7), (2, 4)], 4);
    assert_eq!(w, vec![(0, -1), (1, 1)]);
    let w = signed_minimal_word(&vec![(0, 2)], 4);
    assert_eq!(w, vec![(0, 2)]);
}

/// Recomputes `f(x)f(y)ψ = f(xy)ψ` with Kronecker products and element lookup by equality.
#[test]
fn kron_oracle_for_n2() {
    let n = 2;
    let s = canonical_strategy(n).unwrap();
    let group = normal_form_group(n).unwrap();
    let images = induced_images(&group, &s, Side::Alice);
    let id = ComplexMatrix::identity(2);
    let mut worst: f64 = 0.0;
    for (x, gx) in group.elements.iter().enumerate() {
        for (y, gy) in group.elements.iter().enumerate() {
            let xy = group.elements.iter().position(|g| *g == gx.mul(gy)).unwrap();
            let lhs = (&images[x] * &images[y]).kron(&id).matvec(s.state());
            let rhs = images[xy].kron(&id).matvec(s.state());
            worst = worst.max(norm(&sub_vec(&lhs, &rhs)));
        }
    }
    assert!(worst < 1e-12);
}

#[test]
fn generator_images_reproduce_group_elements() {
    // On Alice's side the images are the group elements themselves.
    let n = 3;
    let s = canonical_strategy(n).unwrap();
    let group = normal_form_group(n).unwrap();
    let images = induced_images(&group, &s, Side::Alice);
    for (img, g) in images.iter().zip(&group.elements) {
        assert!(img.distance(&g.to_matrix()) < 1e-12);
    }
    let [a0, a1] = MonomialUnitary::alice_generators(n);
    let w = evaluate_word(&vec![(0, 1), (1, -1)], &[a0, a1]);
    assert!(group.elements.contains(&w));
}

#[test]
fn random_strategy_is_not_a_psi_representation() {
    let n = 3;
    let group = normal_form_group(n).unwrap();
    let mut rng = SeededRng::new(11);
    let s = random_strategy(n, 3, 3, &mut rng).unwrap();
    let images = induced_images(&group, &s, Side::Alice);
    let r = check_psi_representation(&group.table, &images, s.state(), 3, 3, Side::Alice).unwrap();
    assert!(r > 1e-2, "{r}");
}

#[test]
fn image_count_mismatch_rejected() {
    let s = canonical_strategy(2).unwrap();
    let group = normal_form_group(2).unwrap();
    let mut images = induced_images(&group, &s, Side::Bob);
    images.pop();
    assert!(check_psi_representation(&group.table, &images, s.state(), 2, 2, Side::Bob).is_err());
}
