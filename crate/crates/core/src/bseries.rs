//! Rooted trees and exact B-series coefficients of CSRK tableaux.
//!
//! Elementary differentials are never formed; only the scalar coefficients
//! `σ(t)`, `e(t)` and `φ(t)` are computed, all as exact rationals.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::exact::{int, poly_integrate_01, Rational, RationalPoly};
use crate::tableau::CsrkTableau;

/// Largest tree order the enumeration supports.
pub const MAX_TREE_ORDER: usize = 8;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BSeriesError {
    #[error("tree order bound {0} outside 1..={MAX_TREE_ORDER}")]
    OrderOutOfRange(usize),
}

/// A rooted tree in canonical form: children sorted ascending by
/// `(order, children)`, recursively.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RootedTree {
    children: Vec<RootedTree>,
    order: usize,
}

impl RootedTree {
    /// The single-vertex tree `•`.
    pub fn leaf() -> Self {
        Self { children: Vec::new(), order: 1 }
    }

    /// `[t₁, …, t_m]`: a new root grafted onto the given subtrees.
    pub fn graft(mut children: Vec<RootedTree>) -> Self {
        children.sort();
        let order = 1 + children.iter().map(|c| c.order).sum::<usize>();
        Self { children, order }
    }

    /// `[•^k]`
    pub fn bushy(k: usize) -> Self {
        Self::graft(vec![Self::leaf(); k])
    }

    /// Chain of `n` vertices.
    pub fn tall(n: usize) -> Self {
        assert!(n >= 1);
        (1..n).fold(Self::leaf(), |t, _| Self::graft(vec![t]))
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn children(&self) -> &[RootedTree] {
        &self.children
    }

    /// Children grouped as `(subtree, multiplicity)`.
    fn grouped_children(&self) -> Vec<(&RootedTree, usize)> {
        let mut out: Vec<(&RootedTree, usize)> = Vec::new();
        for c in &self.children {
            match out.last_mut() {
                Some((t, n)) if *t == c => *n += 1,
                _ => out.push((c, 1)),
            }
        }
        out
    }
}

impl Ord for RootedTree {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order
            .cmp(&other.order)
            .then_with(|| self.children.cmp(&other.children))
    }
}

impl PartialOrd for RootedTree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Bracket notation: `o` for a vertex, `[o,[o]]` for a root with children.
impl fmt::Display for RootedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.children.is_empty() {
            return write!(f, "o");
        }
        write!(f, "[")?;
        for (i, c) in self.children.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// All canonical trees with exactly `n` vertices, sorted.
pub fn trees_of_order(n: usize) -> Vec<RootedTree> {
    let mut by_order: Vec<Vec<RootedTree>> = vec![Vec::new()];
    for k in 1..=n {
        let smaller: Vec<RootedTree> = by_order.iter().flatten().cloned().collect();
        let mut trees: Vec<RootedTree> = forests(&smaller, k - 1, smaller.len())
            .into_iter()
            .map(RootedTree::graft)
            .collect();
        trees.sort();
        by_order.push(trees);
    }
    by_order.pop().unwrap_or_default()
}

/// Multisets of trees from `pool[..limit]` with total order `total`,
/// generated as non-increasing index sequences so each multiset appears once.
fn forests(pool: &[RootedTree], total: usize, limit: usize) -> Vec<Vec<RootedTree>> {
    if total == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for idx in 0..limit {
        let t = &pool[idx];
        if t.order > total {
            continue;
        }
        for mut rest in forests(pool, total - t.order, idx + 1) {
            rest.push(t.clone());
            out.push(rest);
        }
    }
    out
}

/// All canonical trees of order `1..=p`, sorted by order then structure.
pub fn trees_up_to(p: usize) -> Result<Vec<RootedTree>, BSeriesError> {
    if !(1..=MAX_TREE_ORDER).contains(&p) {
        return Err(BSeriesError::OrderOutOfRange(p));
    }
    Ok((1..=p).flat_map(trees_of_order).collect())
}

/// `σ(•) = 1`, `σ([t₁^{r₁}, …, t_m^{r_m}]) = Π r_k! σ(t_k)^{r_k}`.
pub fn sigma(t: &RootedTree) -> Rational {
    t.grouped_children()
        .into_iter()
        .fold(Rational::one(), |acc, (child, r)| {
            let fact = (1..=r as i64).fold(Rational::one(), |f, k| f * int(k));
            let sc = sigma(child);
            let mut p = Rational::one();
            for _ in 0..r {
                p *= &sc;
            }
            acc * fact * p
        })
}

/// `e(•) = 1`, `e([t₁, …, t_m]) = e(t₁)⋯e(t_m) / |t|`.
pub fn exact_flow_coeff(t: &RootedTree) -> Rational {
    t.children
        .iter()
        .fold(Rational::one(), |acc, c| acc * exact_flow_coeff(c))
        / int(t.order as i64)
}

/// Memoized stage weights `φ_τ(t)` for one tableau.
pub struct WeightCache<'a> {
    tableau: &'a CsrkTableau,
    b: RationalPoly,
    stage: HashMap<RootedTree, RationalPoly>,
}

impl<'a> WeightCache<'a> {
    pub fn new(tableau: &'a CsrkTableau) -> Self {
        Self { tableau, b: tableau.b_poly(), stage: HashMap::new() }
    }

    /// `φ_τ(t) = ∫ A(τ,ζ) φ_ζ(t₁)⋯φ_ζ(t_m) dζ`, so `φ_τ(•) = C(τ)`.
    pub fn stage_weight(&mut self, t: &RootedTree) -> RationalPoly {
        if let Some(p) = self.stage.get(t) {
            return p.clone();
        }
        let product = self.children_product(t);
        let p = self.tableau.integrate_zeta(&product);
        self.stage.insert(t.clone(), p.clone());
        p
    }

    /// `φ(t) = ∫ B(τ) φ_τ(t₁)⋯φ_τ(t_m) dτ`
    pub fn weight(&mut self, t: &RootedTree) -> Rational {
        let product = self.children_product(t);
        poly_integrate_01(&(&self.b * &product))
    }

    fn children_product(&mut self, t: &RootedTree) -> RationalPoly {
        let mut product = RationalPoly::one();
        for c in &t.children {
            let w = self.stage_weight(c);
            product = &product * &w;
        }
        product
    }
}

pub fn elementary_weight(t: &CsrkTableau, tree: &RootedTree) -> Rational {
    WeightCache::new(t).weight(tree)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeCoefficients {
    pub tree: RootedTree,
    pub sigma: Rational,
    pub exact_flow: Rational,
    pub weight: Rational,
}

impl TreeCoefficients {
    pub fn defect(&self) -> Rational {
        &self.weight - &self.exact_flow
    }
}

/// `σ`, `e` and `φ` for every tree up to `max_order`.
pub fn tree_table(t: &CsrkTableau, max_order: usize) -> Result<Vec<TreeCoefficients>, BSeriesError> {
    let mut cache = WeightCache::new(t);
    Ok(trees_up_to(max_order)?
        .into_iter()
        .map(|tree| TreeCoefficients {
            sigma: sigma(&tree),
            exact_flow: exact_flow_coeff(&tree),
            weight: cache.weight(&tree),
            tree,
        })
        .collect())
}

/// Largest `p ≤ max_order` with `φ(t) = e(t)` for every tree of order `≤ p`.
pub fn order_of(t: &CsrkTableau, max_order: usize) -> Result<usize, BSeriesError> {
    if !(1..=MAX_TREE_ORDER).contains(&max_order) {
        return Err(BSeriesError::OrderOutOfRange(max_order));
    }
    let mut cache = WeightCache::new(t);
    let mut order = 0;
    for p in 1..=max_order {
        let ok = trees_of_order(p)
            .iter()
            .all(|tree| cache.weight(tree) == exact_flow_coeff(tree));
        if !ok {
            break;
        }
        order = p;
    }
    Ok(order)
}

/// Sorted multiset `{φ(t) - e(t) : |t| = 5}` over the nine order-5 trees.
pub fn order5_defect_multiset(t: &CsrkTableau) -> Vec<Rational> {
    let mut cache = WeightCache::new(t);
    let mut out: Vec<Rational> = trees_of_order(5)
        .iter()
        .map(|tree| cache.weight(tree) - exact_flow_coeff(tree))
        .collect();
    out.sort();
    out
}

/// Number of zero entries in a defect multiset.
pub fn count_zero(values: &[Rational]) -> usize {
    values.iter().filter(|v| v.is_zero()).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use crate::tableau::{make_avf, make_avf_collocation, make_parallel4};

    #[test]
    fn tree_counts() {
        let counts: Vec<usize> = (1..=8).map(|n| trees_of_order(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 4, 9, 20, 48, 115]);
        assert_eq!(trees_up_to(1).unwrap().len(), 1);
        assert_eq!(trees_up_to(4).unwrap().len(), 8);
        assert!(trees_up_to(0).is_err());
        assert!(trees_up_to(9).is_err());
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma(&RootedTree::leaf()), rat(1, 1));
        assert_eq!(sigma(&RootedTree::bushy(4)), rat(24, 1));
        assert_eq!(sigma(&RootedTree::tall(3)), rat(1, 1));
        // [[•²]²] : 2! · (2!)² = 8
        let t = RootedTree::graft(vec![RootedTree::bushy(2), RootedTree::bushy(2)]);
        assert_eq!(sigma(&t), rat(8, 1));
    }

    #[test]
    fn exact_flow_examples() {
        assert_eq!(exact_flow_coeff(&RootedTree::leaf()), rat(1, 1));
        assert_eq!(exact_flow_coeff(&RootedTree::bushy(4)), rat(1, 5));
        assert_eq!(exact_flow_coeff(&RootedTree::tall(5)), rat(1, 120));
    }

    #[test]
    fn weight_examples() {
        let avf = make_avf();
        assert_eq!(elementary_weight(&avf, &RootedTree::leaf()), rat(1, 1));
        let t = RootedTree::tall(3);
        assert_eq!(elementary_weight(&avf, &t), rat(1, 4));
        assert_eq!(exact_flow_coeff(&t), rat(1, 6));
        let col2 = make_avf_collocation(2).unwrap();
        for tree in trees_of_order(4) {
            assert_eq!(elementary_weight(&col2, &tree), exact_flow_coeff(&tree), "{tree}");
        }
    }

    #[test]
    fn orders() {
        assert_eq!(order_of(&make_avf(), 6).unwrap(), 2);
        for th in [rat(1, 1), rat(1, 2), rat(10, 1), rat(-3, 7)] {
            assert_eq!(order_of(&make_parallel4(&th).unwrap(), 6).unwrap(), 4);
        }
        assert_eq!(order_of(&make_avf_collocation(3).unwrap(), 6).unwrap(), 6);
        assert_eq!(order_of(&make_avf_collocation(2).unwrap(), 3).unwrap(), 3);
        assert!(order_of(&make_avf(), 9).is_err());
    }

    #[test]
    fn canonical_form_is_order_independent() {
        let a = RootedTree::graft(vec![RootedTree::tall(2), RootedTree::leaf()]);
        let b = RootedTree::graft(vec![RootedTree::leaf(), RootedTree::tall(2)]);
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "[o,[o]]");
    }
}
