use std::collections::BTreeMap;

use num_rational::BigRational;
use qpcover::fixtures::{fixture, kronecker_cover2};
use qpcover::quiver::{Potential, Quiver};
use qpcover::scalar::Scalar;
use qpcover::scattering::*;
use qpcover::seed::{principal_seed, seed_from_quiver, Seed};

type Q = BigRational;

fn q(v: i64) -> Q {
    Q::from_i64(v)
}

fn a2() -> Quiver {
    Quiver::from_parts(&["1", "2"], &[("a", "1", "2")]).unwrap()
}

fn kronecker() -> Quiver {
    Quiver::from_parts(&["1", "2"], &[("a", "2", "1"), ("b", "2", "1")]).unwrap()
}

fn a1xa1() -> Quiver {
    Quiver::from_parts(&["1", "2"], &[]).unwrap()
}

fn complete(quiver: &Quiver, order: usize) -> RankTwoDiagram<Q> {
    let sd: Seed<Q> = seed_from_quiver(quiver).unwrap();
    let walls = initial_cluster_walls(&sd, order).unwrap();
    rank2_complete(&sd, &walls, order).unwrap()
}

#[test]
fn a2_completion_adds_one_ray() {
    for order in 2..=6 {
        let d = complete(&a2(), order);
        assert!(d.is_consistent().unwrap());
        let walls = d.nontrivial_walls();
        assert_eq!(walls.len(), 3, "order {order}");
        let new: Vec<_> = walls.iter().filter(|w| !w.incoming).collect();
        assert_eq!(new.len(), 1);
        assert_eq!(new[0].n0, vec![1, 1]);
        // wall function 1 + z
        let f = new[0].function(order / 2);
        let mut expect = TruncatedSeries::one(1, order / 2);
        expect.add_term(vec![1], q(1));
        assert_eq!(f, expect);
    }
}

#[test]
fn a1xa1_completion_is_trivial() {
    let d = complete(&a1xa1(), 5);
    assert_eq!(d.walls.len(), 2);
    assert!(d.is_consistent().unwrap());
}

#[test]
fn kronecker_completion_is_consistent_and_stable() {
    let d5 = complete(&kronecker(), 5);
    let d6 = complete(&kronecker(), 6);
    assert!(d6.is_consistent().unwrap());
    assert_eq!(sorted_walls(&d6.truncate(5).walls), sorted_walls(&d5.walls));
    // the central direction carries a nontrivial function
    assert!(d6.walls.iter().any(|w| w.n0 == vec![1, 1] && !w.is_trivial()));
}

#[test]
fn half_loop_matches_stability_theta() {
    for (quiver, order) in [(a2(), 5), (kronecker(), 5), (a1xa1(), 4)] {
        let sd: Seed<Q> = seed_from_quiver(&quiver).unwrap();
        let d = complete(&quiver, order);
        let cluster = d.theta_minus_plus().unwrap();
        let st = theta_stability(&quiver, &Potential::zero(), &sd, order, false, true).unwrap();
        assert_eq!(cluster, st);
    }
}

#[test]
fn loop_through_opposite_crossings_is_identity() {
    let d = complete(&a2(), 4);
    let path = [Crossing { wall: 0, sign: 1 }, Crossing { wall: 0, sign: -1 }];
    assert!(d.path_ordered_product(&path).unwrap().is_identity());
    assert!(d.path_ordered_product(&[]).unwrap().is_identity());
    assert!(d.path_ordered_product(&[Crossing { wall: 0, sign: 0 }]).is_err());
}

#[test]
fn dilog_wall_closed_form() {
    // θ(x_i) = x_i (1 + y_k)^{d ⟨e_k, f_i⟩}
    let sd: Seed<Q> = seed_from_quiver(&kronecker()).unwrap();
    let order = 6;
    for k in 0..2 {
        let mut e = vec![0u32; 2];
        e[k] = 1;
        let ham = dilog_hamiltonian(&q(1), order);
        let mut h = TruncatedSeries::zero(2, order);
        for (j, c) in &ham {
            h.add_term(e.iter().map(|x| x * j).collect(), c.clone());
        }
        let general = exp_action(&sd, &h, order).unwrap();
        let fast = wall_action(&sd, &e, &ham, 1, order);
        assert_eq!(general, fast);
        let mut one_plus = TruncatedSeries::one(2, order);
        one_plus.add_term(e.clone(), q(1));
        for i in 0..2 {
            let expect = if i == k { one_plus.clone() } else { TruncatedSeries::one(2, order) };
            assert_eq!(general.images[i], expect);
        }
    }
}

#[test]
fn a1_principal_single_correction() {
    let sd: Seed<Q> = seed_from_quiver(&Quiver::from_parts(&["1"], &[]).unwrap()).unwrap();
    let prin = principal_seed(&sd);
    let h = TruncatedSeries::monomial(1, vec![1], q(1));
    let th = exp_action(&prin, &h, 1).unwrap();
    // θ(x_1) = x_1 + x_1 x_{1'}, θ(x_{1'}) = x_{1'}
    let mut expect = TruncatedSeries::one(1, 1);
    expect.add_term(vec![1], q(1));
    assert_eq!(th.images[0], expect);
    assert!(th.images[1].is_one());
}

#[test]
fn inverse_and_composition() {
    let sd: Seed<Q> = seed_from_quiver(&kronecker()).unwrap();
    let order = 5;
    let mut h = TruncatedSeries::zero(2, order);
    h.add_term(vec![1, 0], q(2));
    h.add_term(vec![1, 1], q(-1));
    h.add_term(vec![0, 2], Q::new(1.into(), 3.into()));
    let a = exp_action(&sd, &h, order).unwrap();
    assert!(a.compose(&a.inverse()).unwrap().is_identity());
    assert!(a.inverse().compose(&a).unwrap().is_identity());
    // exp(-H) is the inverse of exp(H)
    assert_eq!(exp_action(&sd, &h.neg(), order).unwrap(), a.inverse());
}

#[test]
fn theta_stability_small_cases() {
    let a1 = Quiver::from_parts(&["1"], &[]).unwrap();
    let sd: Seed<Q> = seed_from_quiver(&a1).unwrap();
    let th = theta_stability(&a1, &Potential::zero(), &sd, 3, false, false).unwrap();
    let mut expect = TruncatedSeries::one(1, 3);
    expect.add_term(vec![1], q(1));
    assert_eq!(th.images[0], expect);
    let th0 = theta_stability(&kronecker(), &Potential::<Q>::zero(), &seed_from_quiver(&kronecker()).unwrap(), 0, false, true)
        .unwrap();
    assert!(th0.is_identity());
}

#[test]
fn principal_evaluation() {
    for quiver in [Quiver::from_parts(&["1"], &[]).unwrap(), kronecker()] {
        let sd: Seed<Q> = seed_from_quiver(&quiver).unwrap();
        let prin = theta_stability(&quiver, &Potential::zero(), &sd, 3, true, true).unwrap();
        let plain = theta_stability(&quiver, &Potential::zero(), &sd, 3, false, true).unwrap();
        assert_eq!(evaluate_principal_at_one(&prin, &sd).unwrap(), plain);
    }
    let sd: Seed<Q> = seed_from_quiver(&kronecker()).unwrap();
    let id = TruncatedAutomorphism::identity(&principal_seed(&sd), 4);
    assert_eq!(evaluate_principal_at_one(&id, &sd).unwrap(), TruncatedAutomorphism::identity(&sd, 4));
}

#[test]
fn projection_of_symmetric_exp_action() {
    let c = kronecker_cover2();
    let sc = quiver_seed_covering::<Q>(&c).unwrap();
    let order = 2;
    // deck-symmetric Hamiltonian y_1 + y_3 + y_2 y_3 + y_4 y_1 on the cover
    let mut h = TruncatedSeries::zero(4, order);
    h.add_term(vec![1, 0, 0, 0], q(1));
    h.add_term(vec![0, 0, 1, 0], q(1));
    h.add_term(vec![0, 1, 1, 0], q(1));
    h.add_term(vec![1, 0, 0, 1], q(1));
    let cover = exp_action(&sc.total, &h, order).unwrap();
    let projected = pi_project_automorphism(&sc, &cover).unwrap();
    let hbar = project_series(&sc, &h);
    let base = exp_action(&sc.base, &hbar, order).unwrap();
    assert_eq!(projected, base);
    let id = TruncatedAutomorphism::identity(&sc.total, 3);
    assert_eq!(pi_project_automorphism(&sc, &id).unwrap(), TruncatedAutomorphism::identity(&sc.base, 3));
}

#[test]
fn restricted_initial_walls_are_folded_initial_walls() {
    let c = kronecker_cover2();
    let sc = quiver_seed_covering::<Q>(&c).unwrap();
    assert_eq!(sc.base.d, vec![q(2), q(2)]);
    for order in 0..=6 {
        let cover_walls = initial_cluster_hyperplanes(&sc.total, order);
        let restricted = restrict_walls(&sc, &cover_walls).unwrap();
        let folded = initial_cluster_walls(&sc.base, order).unwrap();
        let folded: Vec<_> = folded.into_iter().filter(|w| !w.is_trivial()).collect();
        assert_eq!(sorted_walls(&restricted), sorted_walls(&folded), "order {order}");
    }
    assert!(restrict_walls::<Q>(&sc, &[]).unwrap().is_empty());
}

#[test]
fn walls_outside_image_are_dropped() {
    let c = kronecker_cover2();
    let sc = quiver_seed_covering::<Q>(&c).unwrap();
    let mut ham = BTreeMap::new();
    ham.insert(1, q(1));
    // e_1^⊥ cut by ⟨e_2, m⟩ ≥ 0 and ⟨-e_2, m⟩ ≥ 0 meets image(κ) only at the origin
    let w = HyperplaneWall { n0: vec![1, 0, 0, 0], inequalities: vec![vec![0, 1, 0, 0], vec![0, -1, 0, 0]], hamiltonian: ham };
    assert!(restrict_walls(&sc, &[w]).unwrap().is_empty());
}

#[test]
fn theta_compare_kronecker_cover() {
    let c = kronecker_cover2();
    let sc = quiver_seed_covering::<Q>(&c).unwrap();
    let r = compare_theta_covering(&c, &sc, &Potential::zero(), 3).unwrap();
    assert!(r.holds(), "{:?}", r.discrepancies);
    assert!(r.compared > 4);
}

#[test]
fn theta_compare_trivial_cover() {
    let c = qpcover::covering::QuiverCovering::identity(&kronecker());
    let sc = quiver_seed_covering::<Q>(&c).unwrap();
    assert!(compare_theta_covering(&c, &sc, &Potential::zero(), 4).unwrap().holds());
}

#[test]
fn theta_compare_torus_cover3() {
    let f = fixture::<Q>("torus1p-cover3").unwrap();
    let c = f.cover.unwrap();
    let sc = quiver_seed_covering::<Q>(&c).unwrap();
    let r = compare_theta_covering(&c, &sc, f.base_potential.as_ref().unwrap(), 3).unwrap();
    assert!(r.holds(), "{:?}", r.discrepancies);
}
