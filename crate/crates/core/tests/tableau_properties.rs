use std::collections::BTreeSet;

use csrk::bseries::{sigma, exact_flow_coeff, order_of, trees_of_order, RootedTree};
use csrk::exact::{int, rat, Rational, RationalMatrix};
use csrk::tableau::{
    audit, check_energy_preserving, check_simplifying, double_bush_condition, make_avf_collocation,
    make_bnonconst4, make_parallel4, CsrkTableau, Simplifying,
};
use proptest::prelude::*;

fn symmetric(s: usize) -> impl Strategy<Value = RationalMatrix> {
    prop::collection::vec((-30i64..=30, 1i64..=8), s * (s + 1) / 2).prop_map(move |upper| {
        let mut m = RationalMatrix::zeros(s, s);
        let mut it = upper.into_iter();
        for i in 0..s {
            for j in i..s {
                let (n, d) = it.next().unwrap();
                m[(i, j)] = rat(n, d);
                m[(j, i)] = rat(n, d);
            }
        }
        m
    })
}

fn consistent_symmetric() -> impl Strategy<Value = CsrkTableau> {
    (1usize..=4).prop_flat_map(symmetric).prop_filter_map("zero mass", |m| {
        let s = m.rows();
        let mass = CsrkTableau::new("m", m.clone()).unwrap().b_poly().integrate_01();
        if mass == int(0) {
            return None;
        }
        CsrkTableau::new("m", RationalMatrix::from_fn(s, s, |i, j| &m[(i, j)] / &mass)).ok()
    })
}

/// Hilbert inverse with a symmetric perturbation of the trailing block.
fn structured() -> impl Strategy<Value = CsrkTableau> {
    (2usize..=4)
        .prop_flat_map(|s| (Just(s), 1..s, prop::collection::vec((-4i64..=4, 50i64..=500), s * s)))
        .prop_filter_map("singular", |(s, r, noise)| {
            let mut g = csrk::exact::hilbert_matrix(s);
            for i in r..s {
                for j in i..s {
                    let (n, d) = noise[i * s + j];
                    let v = &g[(i, j)] + rat(n, d);
                    g[(i, j)] = v.clone();
                    g[(j, i)] = v;
                }
            }
            CsrkTableau::new("g", g.inverse().ok()?).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quadrature_conditions_hold_up_to_ten(t in consistent_symmetric()) {
        for k in 1..=10 {
            prop_assert!(check_simplifying(&t, Simplifying::B, k));
        }
    }

    #[test]
    fn c_shifted_equivalent_to_d(t in structured()) {
        for eta in 1..=t.degree() + 1 {
            prop_assert_eq!(
                check_simplifying(&t, Simplifying::C, eta + 1),
                check_simplifying(&t, Simplifying::D, eta)
            );
        }
    }

    #[test]
    fn double_bush_identity(t in consistent_symmetric(), p in 1usize..=4, q in 1usize..=4) {
        prop_assert!(double_bush_condition(&t, p, q));
    }

    #[test]
    fn symmetry_is_energy_preservation(m in (1usize..=4).prop_flat_map(|s| prop::collection::vec((-9i64..=9, 1i64..=4), s * s))) {
        let s = (m.len() as f64).sqrt() as usize;
        let mat = RationalMatrix::from_fn(s, s, |i, j| rat(m[i * s + j].0, m[i * s + j].1));
        let t = CsrkTableau::new("m", mat.clone()).unwrap();
        prop_assert_eq!(check_energy_preserving(&t), mat == mat.transpose());
    }

    #[test]
    fn json_round_trip(m in (1usize..=4).prop_flat_map(symmetric)) {
        let t = CsrkTableau::new("m", m).unwrap();
        let back = CsrkTableau::from_json("m", &t.to_json()).unwrap();
        prop_assert_eq!(back.matrix(), t.matrix());
    }

    #[test]
    fn order4_family_has_order_four(n in 1i64..=200, d in 1i64..=50) {
        let t = make_parallel4(&rat(n, d)).unwrap();
        prop_assert_eq!(order_of(&t, 5).unwrap(), 4);
    }
}

/// Trees as sorted child lists, grown by attaching a leaf to every vertex.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Naive(Vec<Naive>);

impl Naive {
    fn grow(&self) -> Vec<Naive> {
        let mut out = vec![];
        let mut with_leaf = self.0.clone();
        with_leaf.push(Naive(vec![]));
        with_leaf.sort();
        out.push(Naive(with_leaf));
        for (i, child) in self.0.iter().enumerate() {
            for grown in child.grow() {
                let mut kids = self.0.clone();
                kids[i] = grown;
                kids.sort();
                out.push(Naive(kids));
            }
        }
        out
    }
}

#[test]
fn tree_counts_match_brute_force() {
    let mut level: BTreeSet<Naive> = [Naive(vec![])].into();
    for n in 1..=8 {
        assert_eq!(trees_of_order(n).len(), level.len(), "order {n}");
        level = level.iter().flat_map(|t| t.grow()).collect();
    }
}

fn factorial(n: usize) -> Rational {
    (1..=n as i64).fold(int(1), |acc, k| acc * int(k))
}

#[test]
fn labelled_tree_identities() {
    // Σ n!/σ(t) = n^{n-1} (labelled rooted trees); Σ n! e(t)/σ(t) = (n-1)!.
    for n in 1..=8 {
        let trees: Vec<RootedTree> = trees_of_order(n);
        let labelled: Rational = trees.iter().map(|t| factorial(n) / sigma(t)).sum();
        assert_eq!(labelled, int((n as i64).pow(n as u32 - 1)), "n={n}");
        let monotone: Rational = trees.iter().map(|t| factorial(n) * exact_flow_coeff(t) / sigma(t)).sum();
        assert_eq!(monotone, factorial(n - 1), "n={n}");
    }
}

#[test]
fn audit_reports() {
    let r = audit(&make_avf_collocation(3).unwrap(), 6).unwrap();
    assert!(r.energy_preserving && r.consistent);
    assert_eq!(r.algebraic_order, 6);
    assert_eq!(r.satisfied_c_eta, 3);
    let r = audit(&make_parallel4(&int(1)).unwrap(), 6).unwrap();
    assert_eq!(r.algebraic_order, 4);
    let r = audit(&make_bnonconst4(), 6).unwrap();
    assert!(r.energy_preserving);
    assert!(audit(&make_bnonconst4(), 7).is_err());
}
