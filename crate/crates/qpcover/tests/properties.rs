use std::sync::OnceLock;

use num_rational::BigRational;
use proptest::prelude::*;
use qpcover::covering::{Anchor, QuiverCovering};
use qpcover::fixtures::fixture;
use qpcover::jacobian::TruncatedJacobian;
use qpcover::quiver::{cyclic_derivative, AlgebraElement, Path, Potential, Quiver};
use qpcover::scalar::Scalar;
use qpcover::scattering::{exp_action, TruncatedAutomorphism, TruncatedSeries};
use qpcover::seed::{seed_from_quiver, Seed};

type Q = BigRational;

struct Torus {
    cover: QuiverCovering,
    base_w: Potential<Q>,
    alg: TruncatedJacobian<Q>,
}

fn torus() -> &'static Torus {
    static T: OnceLock<Torus> = OnceLock::new();
    T.get_or_init(|| {
        let f = fixture::<Q>("torus1p-cover3").unwrap();
        let base_w = f.base_potential.unwrap();
        let cover = f.cover.unwrap();
        let alg = TruncatedJacobian::build(&cover.base, &base_w, 5).unwrap();
        Torus { cover, base_w, alg }
    })
}

/// Walk of `choices.len()` arrows from `start`, picking outgoing arrows by index.
fn walk(q: &Quiver, start: usize, choices: &[usize]) -> Path {
    let mut v = start % q.num_vertices();
    let mut arrows = Vec::new();
    for &c in choices {
        let out: Vec<usize> = q.arrows_from(v).collect();
        if out.is_empty() {
            break;
        }
        let a = out[c % out.len()];
        arrows.push(a);
        v = q.arrow(a).target;
    }
    if arrows.is_empty() {
        q.lazy(start % q.num_vertices())
    } else {
        q.path(&arrows).unwrap()
    }
}

type Raw = Vec<(i64, usize, Vec<usize>)>;

fn raw_element() -> impl Strategy<Value = Raw> {
    prop::collection::vec((-3i64..=3, 0usize..16, prop::collection::vec(0usize..4, 0..4)), 1..4)
}

fn element(q: &Quiver, raw: &Raw) -> AlgebraElement<Q> {
    let mut e = AlgebraElement::zero(None);
    for (c, s, ch) in raw {
        e.add_term(walk(q, *s, ch), Q::from_i64(*c));
    }
    e
}

fn kronecker_seed() -> Seed<Q> {
    seed_from_quiver(&Quiver::from_parts(&["1", "2"], &[("a", "2", "1"), ("b", "2", "1")]).unwrap()).unwrap()
}

fn hamiltonian(order: usize, raw: &[(i64, u32, u32)]) -> TruncatedSeries<Q> {
    let mut h = TruncatedSeries::zero(2, order);
    for &(c, x, y) in raw {
        if x + y > 0 {
            h.add_term(vec![x, y], Q::from_i64(c));
        }
    }
    h
}

fn raw_hamiltonian() -> impl Strategy<Value = Vec<(i64, u32, u32)>> {
    prop::collection::vec((-2i64..=2, 0u32..3, 0u32..3), 0..4)
}

fn automorphism(raw: &[(i64, u32, u32)], order: usize) -> TruncatedAutomorphism<Q> {
    exp_action(&kronecker_seed(), &hamiltonian(order, raw), order).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn path_algebra_is_associative(x in raw_element(), y in raw_element(), z in raw_element()) {
        let q = &torus().cover.base;
        let (x, y, z) = (element(q, &x), element(q, &y), element(q, &z));
        prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
    }

    #[test]
    fn jacobian_product_is_associative(x in raw_element(), y in raw_element(), z in raw_element()) {
        let t = torus();
        let q = &t.cover.base;
        let (x, y, z) = (element(q, &x), element(q, &y), element(q, &z));
        prop_assert_eq!(t.alg.product(&t.alg.product(&x, &y), &z), t.alg.product(&x, &t.alg.product(&y, &z)));
    }

    #[test]
    fn normal_form_is_multiplicative(x in raw_element(), y in raw_element()) {
        let t = torus();
        let q = &t.cover.base;
        let (x, y) = (element(q, &x), element(q, &y));
        let nf = |e: &AlgebraElement<Q>| t.alg.normal_form(e);
        prop_assert_eq!(nf(&x.mul(&y)), t.alg.product(&nf(&x), &nf(&y)));
        prop_assert_eq!(nf(&nf(&x)), nf(&x));
    }

    #[test]
    fn cyclic_derivative_is_linear(c in -4i64..=4, d in -4i64..=4) {
        let t = torus();
        let q = &t.cover.base;
        let w1 = t.base_w.clone();
        // a second potential from the puncture cycles alone
        let w2 = Potential::new(t.base_w.terms().iter().filter(|(_, p)| p.len() > 3).cloned().collect()).unwrap();
        let combined = w1.scale(&Q::from_i64(c)).add(&w2.scale(&Q::from_i64(d)));
        for a in 0..q.num_arrows() {
            let lhs = cyclic_derivative(q, a, &combined);
            let rhs = cyclic_derivative(q, a, &w1).scale(&Q::from_i64(c)).add(&cyclic_derivative(q, a, &w2).scale(&Q::from_i64(d)));
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn sigma_is_multiplicative(x in raw_element(), y in raw_element()) {
        let c = &torus().cover;
        let (x, y) = (element(&c.base, &x), element(&c.base, &y));
        prop_assert_eq!(c.sigma(&x.mul(&y)), c.sigma(&x).mul(&c.sigma(&y)));
        prop_assert_eq!(c.sigma(&x.add(&y)), c.sigma(&x).add(&c.sigma(&y)));
    }

    #[test]
    fn sigma_is_a_deck_orbit(start in 0usize..16, choices in prop::collection::vec(0usize..4, 0..6)) {
        let c = &torus().cover;
        let p = walk(&c.base, start, &choices);
        let lift = c.lift_path(&p, Anchor::Start(c.vertex_fiber(p.source)[0])).unwrap();
        let mut orbit = AlgebraElement::<Q>::zero(None);
        for g in c.group_elements(16).unwrap() {
            orbit.add_term(g.act_path(&lift), Q::from_i64(1));
        }
        prop_assert_eq!(orbit, c.sigma(&AlgebraElement::from_path(p.clone(), None)));
        for l in c.lifts(&p) {
            prop_assert_eq!(c.project_path(&l), p.clone());
        }
    }

    #[test]
    fn automorphisms_form_a_group(a in raw_hamiltonian(), b in raw_hamiltonian(), c in raw_hamiltonian()) {
        let order = 4;
        let (f, g, h) = (automorphism(&a, order), automorphism(&b, order), automorphism(&c, order));
        prop_assert!(f.compose(&f.inverse()).unwrap().is_identity());
        prop_assert!(f.inverse().compose(&f).unwrap().is_identity());
        let left = f.compose(&g).unwrap().compose(&h).unwrap();
        let right = f.compose(&g.compose(&h).unwrap()).unwrap();
        prop_assert_eq!(left, right);
        let id = TruncatedAutomorphism::identity(&kronecker_seed(), order);
        prop_assert_eq!(f.compose(&id).unwrap(), f.clone());
        prop_assert_eq!(id.compose(&f).unwrap(), f);
    }

    #[test]
    fn truncation_commutes_with_exponentiation(a in raw_hamiltonian(), order in 1usize..6) {
        let high = automorphism(&a, order);
        let low = automorphism(&a, order - 1);
        prop_assert_eq!(high.truncate(order - 1), low);
    }
}
