//! The rooted-tree operad, the planar-tree brace operad, and the
//! symmetrization map between them.
//!
//! Operad elements are exact linear combinations of labeled trees (or
//! labeled planar trees for the brace variant). Partial composition follows
//! the vertex-substitution rule: plugging T into vertex i reattaches each
//! child subtree of i to an arbitrary vertex of T.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::ring::{Ring, Scalar};
use crate::trees::LabeledTree;

/// An exact linear combination of labeled rooted trees of one arity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OperadElement {
    pub ring: Ring,
    pub arity: usize,
    pub terms: BTreeMap<LabeledTree, Scalar>,
}

impl OperadElement {
    pub fn zero(ring: &Ring, arity: usize) -> Self {
        OperadElement { ring: ring.clone(), arity, terms: BTreeMap::new() }
    }

    pub fn from_tree(ring: &Ring, tree: LabeledTree) -> Self {
        let mut terms = BTreeMap::new();
        let arity = tree.size();
        terms.insert(tree, ring.one());
        OperadElement { ring: ring.clone(), arity, terms }
    }

    pub fn add_term(&mut self, tree: LabeledTree, coeff: Scalar) -> Result<()> {
        debug_assert_eq!(tree.size(), self.arity);
        let entry = self.terms.entry(tree);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                if !coeff.is_zero() {
                    v.insert(coeff);
                }
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().add(&coeff)?;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
        Ok(())
    }

    pub fn add(&self, other: &OperadElement) -> Result<OperadElement> {
        if self.arity != other.arity {
            return Err(Error::ArityMismatch(format!("{} vs {}", self.arity, other.arity)));
        }
        let mut out = self.clone();
        for (t, c) in &other.terms {
            out.add_term(t.clone(), c.clone())?;
        }
        Ok(out)
    }

    pub fn dim_support(&self) -> usize {
        self.terms.len()
    }
}

/// Substitutes the tree `t` (arity q) into vertex `i` (0-based) of `s`,
/// summing over all reattachments of the child subtrees of `i` to vertices
/// of `t`. Labels: t occupies i..i+q-1, later vertices of s shift by q-1.
fn compose_trees(s: &LabeledTree, i: usize, t: &LabeledTree) -> Vec<LabeledTree> {
    let p = s.size();
    let q = t.size();
    let n = p + q - 1;
    let s_label = |v: usize| -> usize {
        // new label of s-vertex v (v != i)
        if v < i {
            v
        } else {
            v + q - 1
        }
    };
    let t_label = |v: usize| -> usize { v + i };
    let children = s.children(i);
    let mut out = Vec::new();
    let mut choice = vec![0usize; children.len()];
    loop {
        let mut parent = vec![usize::MAX; n];
        let dec = vec![0u32; n];
        // s-vertices other than i keep their wiring.
        for v in 0..p {
            if v == i {
                continue;
            }
            let pv = s.parent[v];
            if pv == v {
                parent[s_label(v)] = s_label(v);
            } else if pv == i {
                // handled by the reattachment choice below
            } else {
                parent[s_label(v)] = s_label(pv);
            }
        }
        // t keeps its internal wiring; its root takes i's parent edge.
        for v in 0..q {
            let pv = t.parent[v];
            if pv == v {
                let s_parent = s.parent[i];
                if s_parent == i {
                    parent[t_label(v)] = t_label(v);
                } else {
                    parent[t_label(v)] = s_label(s_parent);
                }
            } else {
                parent[t_label(v)] = t_label(pv);
            }
        }
        // Each child subtree of i reattaches to the chosen vertex of t.
        for (k, &c) in children.iter().enumerate() {
            parent[s_label(c)] = t_label(choice[k]);
        }
        let tree = LabeledTree { parent, dec };
        debug_assert!(tree.is_valid());
        out.push(tree);
        // advance the choice vector
        let mut k = 0;
        loop {
            if k == choice.len() {
                return out;
            }
            choice[k] += 1;
            if choice[k] < q {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

/// Partial composition of operad elements: bilinear extension of tree
/// substitution at slot `i` (1-based).
pub fn partial_compose(
    s: &OperadElement,
    i: usize,
    t: &OperadElement,
) -> Result<OperadElement> {
    if i < 1 || i > s.arity {
        return Err(Error::BadIndex { index: i, arity: s.arity });
    }
    if s.ring != t.ring {
        return Err(Error::RingMismatch(s.ring.to_string(), t.ring.to_string()));
    }
    let mut out = OperadElement::zero(&s.ring, s.arity + t.arity - 1);
    for (st, sc) in &s.terms {
        for (tt, tc) in &t.terms {
            let coeff = sc.mul(tc)?;
            for tree in compose_trees(st, i - 1, tt) {
                out.add_term(tree, coeff.clone())?;
            }
        }
    }
    Ok(out)
}

/// Relabels every tree by the permutation (1-based slots).
pub fn sigma_action(sigma: &Permutation, x: &OperadElement) -> Result<OperadElement> {
    if sigma.size() != x.arity {
        return Err(Error::SizeMismatch(format!(
            "permutation size {} vs arity {}",
            sigma.size(),
            x.arity
        )));
    }
    let mut out = OperadElement::zero(&x.ring, x.arity);
    for (t, c) in &x.terms {
        let mut parent = vec![usize::MAX; t.size()];
        for v in 0..t.size() {
            let nv = sigma.apply(v + 1) - 1;
            let pv = t.parent[v];
            parent[nv] = if pv == v { nv } else { sigma.apply(pv + 1) - 1 };
        }
        out.add_term(LabeledTree { parent, dec: t.dec.clone() }, c.clone())?;
    }
    Ok(out)
}

/// Monadic-composite oracle: substitutes a tree into every vertex of `s`
/// simultaneously, summing over all reattachment maps. Used by tests to
/// cross-check `partial_compose`.
pub fn full_composite_oracle(
    s: &LabeledTree,
    plugs: &[LabeledTree],
    ring: &Ring,
) -> Result<OperadElement> {
    if plugs.len() != s.size() {
        return Err(Error::ArityMismatch(format!(
            "{} plugs for arity {}",
            plugs.len(),
            s.size()
        )));
    }
    // Compose one slot at a time, highest slot first so earlier indices
    // stay valid.
    let mut acc = OperadElement::from_tree(ring, s.clone());
    for v in (0..plugs.len()).rev() {
        let plug = OperadElement::from_tree(ring, plugs[v].clone());
        acc = partial_compose(&acc, v + 1, &plug)?;
    }
    Ok(acc)
}

// ---------------------------------------------------------------------------
// Planar trees and the brace operad
// ---------------------------------------------------------------------------

/// A planar rooted tree with ordered children. The `node` field is a label
/// (operad use) or a generator id (brace-algebra use).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PlanarTree {
    pub node: u32,
    pub kids: Vec<PlanarTree>,
}

impl PlanarTree {
    pub fn leaf(node: u32) -> PlanarTree {
        PlanarTree { node, kids: Vec::new() }
    }

    pub fn size(&self) -> usize {
        1 + self.kids.iter().map(|k| k.size()).sum::<usize>()
    }

    /// Node fields in planar preorder.
    pub fn preorder(&self) -> Vec<u32> {
        let mut out = Vec::new();
        fn rec(t: &PlanarTree, out: &mut Vec<u32>) {
            out.push(t.node);
            for k in &t.kids {
                rec(k, out);
            }
        }
        rec(self, &mut out);
        out
    }
}

/// A linear combination of planar trees.
pub type PlanarElement = BTreeMap<PlanarTree, Scalar>;

pub fn planar_add_term(out: &mut PlanarElement, t: PlanarTree, c: Scalar) -> Result<()> {
    match out.entry(t) {
        std::collections::btree_map::Entry::Vacant(v) => {
            if !c.is_zero() {
                v.insert(c);
            }
        }
        std::collections::btree_map::Entry::Occupied(mut o) => {
            let sum = o.get().add(&c)?;
            if sum.is_zero() {
                o.remove();
            } else {
                *o.get_mut() = sum;
            }
        }
    }
    Ok(())
}

/// All ways of writing a labeled rooted tree as a planar tree: one term per
/// ordering of each vertex's children.
pub fn symmetrize(t: &LabeledTree) -> Vec<PlanarTree> {
    fn rec(t: &LabeledTree, v: usize) -> Vec<PlanarTree> {
        let kids = t.children(v);
        if kids.is_empty() {
            return vec![PlanarTree::leaf(v as u32)];
        }
        let per_kid: Vec<Vec<PlanarTree>> = kids.iter().map(|&c| rec(t, c)).collect();
        let mut out = Vec::new();
        for order in permutations(kids.len()) {
            // cartesian product over the chosen order
            let mut partial: Vec<Vec<PlanarTree>> = vec![Vec::new()];
            for &idx in &order {
                let mut next = Vec::new();
                for prefix in &partial {
                    for variant in &per_kid[idx] {
                        let mut p = prefix.clone();
                        p.push(variant.clone());
                        next.push(p);
                    }
                }
                partial = next;
            }
            for kids in partial {
                out.push(PlanarTree { node: v as u32, kids });
            }
        }
        out
    }
    rec(t, t.root())
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for rest in permutations(n - 1) {
        for pos in 0..=rest.len() {
            let mut v = rest.clone();
            v.insert(pos, n - 1);
            out.push(v);
        }
    }
    out
}

/// A gap of a planar tree: a position where a new child subtree can be
/// inserted, identified by (vertex path, child index). Gaps are produced in
/// boundary-walk order, which is the order compatible with brace
/// composition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Gap {
    /// Path of child indices from the root to the host vertex.
    pub path: Vec<usize>,
    /// Insertion index among the host vertex's children.
    pub index: usize,
}

/// Gaps of `t` in boundary-walk order: at each vertex, the gap before the
/// first child, then recursively the gaps of each child, then the gap after
/// it.
pub fn gaps(t: &PlanarTree) -> Vec<Gap> {
    fn rec(t: &PlanarTree, path: &mut Vec<usize>, out: &mut Vec<Gap>) {
        out.push(Gap { path: path.clone(), index: 0 });
        for (i, k) in t.kids.iter().enumerate() {
            path.push(i);
            rec(k, path, out);
            path.pop();
            out.push(Gap { path: path.clone(), index: i + 1 });
        }
    }
    let mut out = Vec::new();
    let mut path = Vec::new();
    rec(t, &mut path, &mut out);
    out
}

/// Inserts the ordered forest into `host` at one weakly increasing gap
/// assignment. `assignment[j]` is an index into `gaps(host)`.
fn insert_forest_at(host: &PlanarTree, forest: &[PlanarTree], assignment: &[usize]) -> PlanarTree {
    let gap_list = gaps(host);
    let mut result = host.clone();
    // Insert from the last forest element backwards so child indices stay
    // valid; elements sharing a gap keep their original order.
    for j in (0..forest.len()).rev() {
        let gap = &gap_list[assignment[j]];
        let mut v = &mut result;
        for &step in &gap.path {
            v = &mut v.kids[step];
        }
        v.kids.insert(gap.index, forest[j].clone());
    }
    result
}

/// All insertions of an ordered forest into a planar tree at weakly
/// increasing gaps; the planar left-to-right order of the forest is
/// preserved. This is the brace operation of the free brace algebra and the
/// reattachment rule of the brace operad.
pub fn insert_forest(host: &PlanarTree, forest: &[PlanarTree]) -> Vec<PlanarTree> {
    let g = gaps(host).len();
    let k = forest.len();
    let mut out = Vec::new();
    let mut assignment = vec![0usize; k];
    loop {
        out.push(insert_forest_at(host, forest, &assignment));
        // next weakly increasing assignment
        let mut j = k;
        loop {
            if j == 0 {
                return out;
            }
            j -= 1;
            if assignment[j] + 1 < g {
                assignment[j] += 1;
                let v = assignment[j];
                for a in assignment.iter_mut().skip(j + 1) {
                    *a = v;
                }
                break;
            }
        }
        if k == 0 {
            return out;
        }
    }
}

/// Partial composition in the brace operad: replaces vertex labeled `i`
/// (1-based) of `s` by `t`, inserting the ordered forest of i's children
/// into t at weakly increasing gaps, with the usual relabeling.
pub fn brace_partial_compose(s: &PlanarTree, i: usize, t: &PlanarTree) -> Result<Vec<PlanarTree>> {
    let p = s.size();
    let q = t.size();
    if i < 1 || i > p {
        return Err(Error::BadIndex { index: i, arity: p });
    }
    let target = (i - 1) as u32;
    // relabel: s-labels > target shift by q-1; t-labels v -> v + target.
    fn relabel_s(t: &PlanarTree, target: u32, q: u32) -> PlanarTree {
        PlanarTree {
            node: if t.node < target { t.node } else { t.node + q - 1 },
            kids: t.kids.iter().map(|k| relabel_s(k, target, q)).collect(),
        }
    }
    fn relabel_t(t: &PlanarTree, target: u32) -> PlanarTree {
        PlanarTree {
            node: t.node + target,
            kids: t.kids.iter().map(|k| relabel_t(k, target)).collect(),
        }
    }
    // Locate the vertex labeled `target` in s, splice in t with the forest
    // insertions.
    fn rec(s: &PlanarTree, target: u32, t: &PlanarTree, q: u32) -> Vec<PlanarTree> {
        if s.node == target {
            let forest: Vec<PlanarTree> =
                s.kids.iter().map(|k| relabel_s(k, target, q)).collect();
            let host = relabel_t(t, target);
            return insert_forest(&host, &forest);
        }
        for (ci, kid) in s.kids.iter().enumerate() {
            let subs = rec(kid, target, t, q);
            if !subs.is_empty() {
                let mut out = Vec::new();
                for sub in subs {
                    let mut parent = relabel_s(s, target, q);
                    // relabel_s left this child corresponding to `kid`
                    // unchanged structurally; replace it.
                    parent.kids[ci] = sub;
                    out.push(parent);
                }
                return out;
            }
        }
        Vec::new()
    }
    let out = rec(s, target, t, q as u32);
    debug_assert!(!out.is_empty(), "vertex {i} not found");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trees::enumerate_labeled;

    fn z() -> Ring {
        Ring::Integers
    }

    fn single() -> LabeledTree {
        LabeledTree { parent: vec![0], dec: vec![0] }
    }

    fn chain2() -> LabeledTree {
        // root 1, child 2
        LabeledTree { parent: vec![0, 0], dec: vec![0, 0] }
    }

    #[test]
    fn unit_law() {
        let s = OperadElement::from_tree(&z(), chain2());
        let u = OperadElement::from_tree(&z(), single());
        for i in 1..=2 {
            let c = partial_compose(&s, i, &u).unwrap();
            assert_eq!(c, s, "slot {i}");
            let d = partial_compose(&u, 1, &s).unwrap();
            assert_eq!(d, s);
        }
    }

    #[test]
    fn chain_into_chain() {
        let s = OperadElement::from_tree(&z(), chain2());
        let t = OperadElement::from_tree(&z(), chain2());
        // Composing at the root: the child reattaches to either vertex of t.
        let at_root = partial_compose(&s, 1, &t).unwrap();
        assert_eq!(at_root.dim_support(), 2);
        assert_eq!(at_root.arity, 3);
        // Composing at the leaf: the leaf has no children, one tree.
        let at_leaf = partial_compose(&s, 2, &t).unwrap();
        assert_eq!(at_leaf.dim_support(), 1);
    }

    #[test]
    fn compose_matches_monadic_oracle() {
        // S o_i T equals the simultaneous substitution with units elsewhere.
        for p in 1..=3u32 {
            for s in enumerate_labeled(p).unwrap() {
                for q in 1..=2u32 {
                    for t in enumerate_labeled(q).unwrap() {
                        for i in 1..=p as usize {
                            let mut plugs = vec![single(); p as usize];
                            plugs[i - 1] = t.clone();
                            let via_oracle = full_composite_oracle(&s, &plugs, &z()).unwrap();
                            let direct = partial_compose(
                                &OperadElement::from_tree(&z(), s.clone()),
                                i,
                                &OperadElement::from_tree(&z(), t.clone()),
                            )
                            .unwrap();
                            assert_eq!(direct, via_oracle);
                        }
                    }
                }
            }
        }
    }

    /// Nested and parallel associativity for all labeled trees with at most
    /// five total vertices; exact over the integers.
    #[test]
    fn operad_associativity() {
        let ring = z();
        for (a, b, c) in [(1u32, 1u32, 3u32), (1, 3, 1), (3, 1, 1), (2, 2, 1), (1, 2, 2), (2, 1, 2), (1, 1, 2), (2, 1, 1), (1, 2, 1), (1, 1, 1)] {
            for s in enumerate_labeled(a).unwrap() {
                for t in enumerate_labeled(b).unwrap() {
                    for u in enumerate_labeled(c).unwrap() {
                        let se = OperadElement::from_tree(&ring, s.clone());
                        let te = OperadElement::from_tree(&ring, t.clone());
                        let ue = OperadElement::from_tree(&ring, u.clone());
                        for i in 1..=a as usize {
                            let st = partial_compose(&se, i, &te).unwrap();
                            // Nested: plug u inside the copy of t.
                            for j in 0..b as usize {
                                let lhs = partial_compose(&st, i + j, &ue).unwrap();
                                let tu = partial_compose(&te, j + 1, &ue).unwrap();
                                let rhs = partial_compose(&se, i, &tu).unwrap();
                                assert_eq!(lhs, rhs, "nested a={a} b={b} c={c} i={i} j={j}");
                            }
                            // Parallel: plug u into a slot of s before i.
                            for j in 1..i {
                                let lhs = partial_compose(&st, j, &ue).unwrap();
                                let su = partial_compose(&se, j, &ue).unwrap();
                                let rhs = partial_compose(&su, i + c as usize - 1, &te).unwrap();
                                assert_eq!(lhs, rhs, "parallel a={a} b={b} c={c} i={i} j={j}");
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn sigma_action_is_a_group_action() {
        let ring = z();
        let x = OperadElement::from_tree(&ring, chain2());
        let id = Permutation::identity(2);
        assert_eq!(sigma_action(&id, &x).unwrap(), x);
        let swap = Permutation::transposition(2, 1, 2);
        let y = sigma_action(&swap, &x).unwrap();
        assert_ne!(y, x); // the other labeled 2-chain
        let back = sigma_action(&swap.inverse(), &y).unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn equivariance_of_partial_composition() {
        // gamma(sigma s; ...) law via: (sigma s) o_{sigma(i)} t =
        // sigma' (s o_i t) where sigma' renumbers blocks.
        let ring = z();
        for s in enumerate_labeled(3).unwrap().into_iter().take(6) {
            let se = OperadElement::from_tree(&ring, s);
            for t in enumerate_labeled(2).unwrap() {
                let te = OperadElement::from_tree(&ring, t);
                for sigma in crate::perm::shuffles(&[1, 1, 1]) {
                    for i in 1..=3usize {
                        let lhs = partial_compose(
                            &sigma_action(&sigma, &se).unwrap(),
                            sigma.apply(i),
                            &te,
                        )
                        .unwrap();
                        // sigma' acts on 4 slots: i's block has size 2.
                        let mut sizes = vec![1usize; 3];
                        sizes[i - 1] = 2;
                        let sigma_prime = sigma.block_permutation(&sizes).unwrap();
                        let rhs =
                            sigma_action(&sigma_prime, &partial_compose(&se, i, &te).unwrap())
                                .unwrap();
                        assert_eq!(lhs, rhs);
                    }
                }
            }
        }
    }

    #[test]
    fn symmetrize_term_counts() {
        // 3-corolla: six orderings of the three children.
        let corolla3 = LabeledTree { parent: vec![0, 0, 0, 0], dec: vec![0; 4] };
        assert_eq!(symmetrize(&corolla3).len(), 6);
        assert_eq!(symmetrize(&single()).len(), 1);
        assert_eq!(symmetrize(&chain2()).len(), 1);
    }

    #[test]
    fn gap_count_is_linear() {
        // Every vertex with c children contributes c + 1 gaps.
        let t = PlanarTree {
            node: 0,
            kids: vec![PlanarTree::leaf(1), PlanarTree { node: 2, kids: vec![PlanarTree::leaf(3)] }],
        };
        assert_eq!(gaps(&t).len(), 2 * t.size() - 1);
    }

    #[test]
    fn brace_insertion_counts() {
        // x<y> for single vertices: one way.
        let x = PlanarTree::leaf(0);
        let y = PlanarTree::leaf(1);
        assert_eq!(insert_forest(&x, std::slice::from_ref(&y)).len(), 1);
        // (x<y>)<z>: three gaps.
        let xy = insert_forest(&x, &[y]).pop().unwrap();
        let z = PlanarTree::leaf(2);
        assert_eq!(insert_forest(&xy, &[z]).len(), 3);
    }

    #[test]
    fn symmetrize_is_a_map_of_operads() {
        // symmetrize(S o_i T) = symmetrize(S) o_i symmetrize(T) as multisets
        // of planar trees, for small instances.
        let ring = z();
        for a in 1..=3u32 {
            for s in enumerate_labeled(a).unwrap() {
                for b in 1..=(4 - a).min(2) {
                    for t in enumerate_labeled(b).unwrap() {
                        for i in 1..=a as usize {
                            let composed =
                                partial_compose(
                                    &OperadElement::from_tree(&ring, s.clone()),
                                    i,
                                    &OperadElement::from_tree(&ring, t.clone()),
                                )
                                .unwrap();
                            let mut lhs: Vec<PlanarTree> = Vec::new();
                            for (tree, c) in &composed.terms {
                                assert!(c.is_one());
                                lhs.extend(symmetrize(tree));
                            }
                            let mut rhs: Vec<PlanarTree> = Vec::new();
                            for sp in symmetrize(&s) {
                                for tp in symmetrize(&t) {
                                    rhs.extend(brace_partial_compose(&sp, i, &tp).unwrap());
                                }
                            }
                            lhs.sort();
                            rhs.sort();
                            assert_eq!(lhs, rhs, "arity {a} o_{i} arity {b}");
                        }
                    }
                }
            }
        }
    }
}
