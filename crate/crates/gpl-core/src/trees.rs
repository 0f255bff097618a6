//! Rooted trees: decorated isomorphism classes, labeled trees, canonical
//! forms, automorphism groups and enumeration.
//!
//! Decorated isomorphism classes are stored in canonical form (children
//! sorted recursively), so structural equality is isomorphism of decorated
//! trees and the rendered text `a[b,b[c]]` is a canonical key.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// The generator table a decorated tree refers to: names and cohomological
/// degrees.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generators {
    names: Vec<String>,
    degrees: Vec<i64>,
    index: HashMap<String, u32>,
}

impl Generators {
    pub fn new(list: &[(&str, i64)]) -> Generators {
        let mut g = Generators { names: Vec::new(), degrees: Vec::new(), index: HashMap::new() };
        for (name, degree) in list {
            g.push(name, *degree);
        }
        g
    }

    pub fn push(&mut self, name: &str, degree: i64) -> u32 {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = self.names.len() as u32;
        self.names.push(name.to_string());
        self.degrees.push(degree);
        self.index.insert(name.to_string(), id);
        id
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn id(&self, name: &str) -> Result<u32> {
        self.index.get(name).copied().ok_or_else(|| Error::UnknownGenerator(name.to_string()))
    }

    pub fn name(&self, id: u32) -> &str {
        &self.names[id as usize]
    }

    pub fn degree(&self, id: u32) -> i64 {
        self.degrees[id as usize]
    }

    pub fn ids(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.names.len() as u32).into_iter()
    }
}

/// A decorated rooted tree in canonical form: children sorted, so that two
/// trees are isomorphic (respecting decorations) iff they are equal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClassTree {
    pub gen: u32,
    kids: Vec<ClassTree>,
}

impl ClassTree {
    pub fn leaf(gen: u32) -> ClassTree {
        ClassTree { gen, kids: Vec::new() }
    }

    /// Builds a canonical tree from a root decoration and any child order.
    pub fn node(gen: u32, mut kids: Vec<ClassTree>) -> ClassTree {
        kids.sort();
        ClassTree { gen, kids }
    }

    pub fn kids(&self) -> &[ClassTree] {
        &self.kids
    }

    /// Number of vertices.
    pub fn weight(&self) -> u32 {
        1 + self.kids.iter().map(|k| k.weight()).sum::<u32>()
    }

    /// Sum of the generator degrees over all vertices.
    pub fn degree(&self, gens: &Generators) -> i64 {
        gens.degree(self.gen) + self.kids.iter().map(|k| k.degree(gens)).sum::<i64>()
    }

    /// Children grouped into (class, multiplicity) runs, in canonical order.
    pub fn grouped_kids(&self) -> Vec<(&ClassTree, u32)> {
        let mut out: Vec<(&ClassTree, u32)> = Vec::new();
        for k in &self.kids {
            match out.last_mut() {
                Some((c, m)) if *c == k => *m += 1,
                _ => out.push((k, 1)),
            }
        }
        out
    }

    /// Order of the decorated automorphism group.
    pub fn aut_order(&self) -> u64 {
        let mut order = 1u64;
        for (kid, mult) in self.grouped_kids() {
            order *= factorial(mult as u64) * kid.aut_order().pow(mult);
        }
        order
    }

    /// True when some automorphism carries Koszul sign -1, i.e. some vertex
    /// has a repeated child subtree of odd total degree. Such classes give
    /// 2-torsion and vanish over rings without it.
    pub fn sign_degenerate(&self, gens: &Generators) -> bool {
        for (kid, mult) in self.grouped_kids() {
            if mult >= 2 && kid.degree(gens) % 2 != 0 {
                return true;
            }
            if kid.sign_degenerate(gens) {
                return true;
            }
        }
        false
    }

    /// Grafts `subtree` as a new child of the vertex at the given canonical
    /// preorder index, returning the canonical form of the result.
    pub fn graft(&self, vertex: usize, subtree: &ClassTree) -> Result<ClassTree> {
        let total = self.weight() as usize;
        if vertex >= total {
            return Err(Error::BadVertex(vertex));
        }
        Ok(self.graft_inner(vertex, subtree).0)
    }

    fn graft_inner(&self, vertex: usize, subtree: &ClassTree) -> (ClassTree, usize) {
        if vertex == 0 {
            let mut kids = self.kids.clone();
            kids.push(subtree.clone());
            return (ClassTree::node(self.gen, kids), 0);
        }
        let mut offset = 1usize; // preorder: root first, then kids in order
        let mut kids = self.kids.clone();
        for k in kids.iter_mut() {
            let w = k.weight() as usize;
            if vertex < offset + w {
                let (new_k, _) = k.graft_inner(vertex - offset, subtree);
                *k = new_k;
                break;
            }
            offset += w;
        }
        (ClassTree::node(self.gen, kids), 0)
    }

    /// Decorations in canonical preorder (root, then each child subtree).
    pub fn preorder_gens(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(self.weight() as usize);
        self.collect_preorder(&mut out);
        out
    }

    fn collect_preorder(&self, out: &mut Vec<u32>) {
        out.push(self.gen);
        for k in &self.kids {
            k.collect_preorder(out);
        }
    }

    /// Canonical text rendering, e.g. `a[b,b[c]]`.
    pub fn render(&self, gens: &Generators) -> String {
        let mut s = String::new();
        self.render_into(gens, &mut s);
        s
    }

    fn render_into(&self, gens: &Generators, s: &mut String) {
        s.push_str(gens.name(self.gen));
        if !self.kids.is_empty() {
            s.push('[');
            for (i, k) in self.kids.iter().enumerate() {
                if i > 0 {
                    s.push(',');
                }
                k.render_into(gens, s);
            }
            s.push(']');
        }
    }

    /// Parses the text syntax (children in any order; the result is
    /// canonical).
    pub fn parse(gens: &Generators, text: &str) -> Result<ClassTree> {
        let bytes = text.as_bytes();
        let mut pos = 0usize;
        let tree = parse_tree(gens, bytes, &mut pos)?;
        skip_ws(bytes, &mut pos);
        if pos != bytes.len() {
            return Err(Error::SyntaxError {
                line: 1,
                col: pos + 1,
                msg: "trailing input after tree".into(),
            });
        }
        Ok(tree)
    }
}

fn skip_ws(bytes: &[u8], pos: &mut usize) {
    while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
}

fn parse_tree(gens: &Generators, bytes: &[u8], pos: &mut usize) -> Result<ClassTree> {
    skip_ws(bytes, pos);
    let start = *pos;
    while *pos < bytes.len() && (bytes[*pos].is_ascii_alphanumeric() || bytes[*pos] == b'_') {
        *pos += 1;
    }
    if *pos == start {
        return Err(Error::SyntaxError {
            line: 1,
            col: start + 1,
            msg: "expected a generator name".into(),
        });
    }
    let name = std::str::from_utf8(&bytes[start..*pos]).unwrap();
    let gen = gens.id(name)?;
    let mut kids = Vec::new();
    skip_ws(bytes, pos);
    if *pos < bytes.len() && bytes[*pos] == b'[' {
        *pos += 1;
        loop {
            kids.push(parse_tree(gens, bytes, pos)?);
            skip_ws(bytes, pos);
            match bytes.get(*pos) {
                Some(b',') => *pos += 1,
                Some(b']') => {
                    *pos += 1;
                    break;
                }
                _ => {
                    return Err(Error::SyntaxError {
                        line: 1,
                        col: *pos + 1,
                        msg: "expected `,` or `]`".into(),
                    })
                }
            }
        }
    }
    Ok(ClassTree::node(gen, kids))
}

fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

/// A labeled decorated rooted tree: vertex i carries label i+1, a parent
/// pointer and a decoration. The root points to itself.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LabeledTree {
    pub parent: Vec<usize>,
    pub dec: Vec<u32>,
}

impl LabeledTree {
    pub fn size(&self) -> usize {
        self.parent.len()
    }

    pub fn root(&self) -> usize {
        (0..self.parent.len()).find(|&i| self.parent[i] == i).expect("rooted tree")
    }

    pub fn children(&self, v: usize) -> Vec<usize> {
        (0..self.parent.len()).filter(|&i| self.parent[i] == v && i != v).collect()
    }

    /// True when the parent map describes a single tree rooted at a fixed
    /// point.
    pub fn is_valid(&self) -> bool {
        let n = self.parent.len();
        if n == 0 || self.parent.iter().filter(|&&p| p >= n).count() > 0 {
            return false;
        }
        let roots: Vec<usize> = (0..n).filter(|&i| self.parent[i] == i).collect();
        if roots.len() != 1 {
            return false;
        }
        // Every vertex must reach the root without cycling.
        for mut v in 0..n {
            let mut steps = 0;
            while self.parent[v] != v {
                v = self.parent[v];
                steps += 1;
                if steps > n {
                    return false;
                }
            }
        }
        true
    }

    /// The isomorphism class of this labeled tree.
    pub fn class(&self) -> ClassTree {
        self.class_at(self.root())
    }

    fn class_at(&self, v: usize) -> ClassTree {
        let kids = self.children(v).into_iter().map(|c| self.class_at(c)).collect();
        ClassTree::node(self.dec[v], kids)
    }

    /// Builds the canonical labeled representative of a class on the labels
    /// `labels` (assigned in canonical preorder).
    pub fn canonical_rep(class: &ClassTree, labels: &[usize]) -> LabeledTree {
        let n: usize = labels.iter().copied().max().map_or(0, |m| m + 1);
        let mut parent = vec![usize::MAX; n];
        let mut dec = vec![u32::MAX; n];
        fn place(
            t: &ClassTree,
            labels: &[usize],
            next: &mut usize,
            parent_label: Option<usize>,
            parent: &mut [usize],
            dec: &mut [u32],
        ) {
            let me = labels[*next];
            *next += 1;
            parent[me] = parent_label.unwrap_or(me);
            dec[me] = t.gen;
            for k in t.kids() {
                place(k, labels, next, Some(me), parent, dec);
            }
        }
        let mut next = 0;
        place(class, labels, &mut next, None, &mut parent, &mut dec);
        LabeledTree { parent, dec }
    }

    /// Koszul sign of this representative relative to the canonical one:
    /// the sign of the permutation sending canonical preorder positions to
    /// this labeling, computed on odd-degree decorations. Well defined for
    /// classes that are not sign-degenerate.
    pub fn rep_sign(&self, gens: &Generators) -> i64 {
        let mut map = Vec::with_capacity(self.size());
        self.match_canonical(self.root(), &mut map);
        let degrees: Vec<i64> = map.iter().map(|&lbl| gens.degree(self.dec[lbl])).collect();
        let mut sign = 1i64;
        for i in 0..map.len() {
            for j in i + 1..map.len() {
                if map[i] > map[j] && degrees[i] % 2 != 0 && degrees[j] % 2 != 0 {
                    sign = -sign;
                }
            }
        }
        sign
    }

    /// Fills `map[preorder position] = label` along one deterministic
    /// isomorphism with the canonical form.
    fn match_canonical(&self, v: usize, map: &mut Vec<usize>) {
        map.push(v);
        let mut kids: Vec<(ClassTree, usize)> =
            self.children(v).into_iter().map(|c| (self.class_at(c), c)).collect();
        // Canonical order; ties (isomorphic siblings) broken by label so the
        // matching is deterministic.
        kids.sort();
        for (_, c) in kids {
            self.match_canonical(c, map);
        }
    }
}

/// An unlabeled rooted tree: a decorated class over a single anonymous
/// generator.
pub type ShapeTree = ClassTree;

/// All unlabeled rooted trees with 1..=max_vertices vertices, grouped by
/// size, deterministically ordered. Sizes 1..5 give 1, 1, 2, 4, 9 classes.
pub fn enumerate_unlabeled(max_vertices: u32) -> Vec<Vec<ShapeTree>> {
    let mut by_size: Vec<Vec<ShapeTree>> = vec![vec![ShapeTree::leaf(0)]];
    for n in 2..=max_vertices {
        // A tree of size n is a root plus a multiset of smaller trees with
        // total size n-1. Enumerate multisets as non-increasing sequences
        // over the flattened list of smaller trees.
        let pool: Vec<(u32, ShapeTree)> = by_size
            .iter()
            .enumerate()
            .flat_map(|(i, v)| v.iter().map(move |t| (i as u32 + 1, t.clone())))
            .collect();
        let mut result = Vec::new();
        let mut chosen: Vec<ShapeTree> = Vec::new();
        fn rec(
            pool: &[(u32, ShapeTree)],
            max_index: usize,
            remaining: u32,
            chosen: &mut Vec<ShapeTree>,
            result: &mut Vec<ShapeTree>,
        ) {
            if remaining == 0 {
                result.push(ClassTree::node(0, chosen.clone()));
                return;
            }
            for i in (0..=max_index.min(pool.len().saturating_sub(1))).rev() {
                let (w, t) = &pool[i];
                if *w <= remaining {
                    chosen.push(t.clone());
                    rec(pool, i, remaining - w, chosen, result);
                    chosen.pop();
                }
            }
        }
        rec(&pool, pool.len().saturating_sub(1), n - 1, &mut chosen, &mut result);
        result.sort();
        result.dedup();
        by_size.push(result);
    }
    by_size.truncate(max_vertices as usize);
    by_size
}

/// Hard cap for labeled-tree enumeration; n^(n-1) grows fast.
pub const LABELED_CAP: u32 = 8;

/// All labeled rooted trees on n vertices (shape only; decorate separately).
/// There are n^(n-1) of them.
pub fn enumerate_labeled(n: u32) -> Result<Vec<LabeledTree>> {
    if n < 1 || n > LABELED_CAP {
        return Err(Error::CapExceeded(format!("labeled trees on {n} vertices")));
    }
    let n = n as usize;
    let mut out = Vec::new();
    let mut parent = vec![0usize; n];
    fn rec(parent: &mut Vec<usize>, v: usize, root: usize, out: &mut Vec<LabeledTree>) {
        let n = parent.len();
        if v == n {
            let t = LabeledTree { parent: parent.clone(), dec: vec![0; n] };
            if t.is_valid() {
                out.push(t);
            }
            return;
        }
        if v == root {
            parent[v] = v;
            rec(parent, v + 1, root, out);
        } else {
            for p in 0..n {
                if p == v {
                    continue;
                }
                parent[v] = p;
                rec(parent, v + 1, root, out);
            }
        }
    }
    for root in 0..n {
        rec(&mut parent, 0, root, &mut out);
    }
    out.sort();
    Ok(out)
}

/// Brute-force decorated isomorphism test, used as an oracle against the
/// canonical form.
pub fn isomorphic_brute_force(a: &LabeledTree, b: &LabeledTree) -> bool {
    let n = a.size();
    if n != b.size() {
        return false;
    }
    let mut perm: Vec<usize> = (0..n).collect();
    fn try_all(perm: &mut Vec<usize>, k: usize, a: &LabeledTree, b: &LabeledTree) -> bool {
        let n = perm.len();
        if k == n {
            // perm maps a-vertices to b-vertices.
            for v in 0..n {
                if b.dec[perm[v]] != a.dec[v] {
                    return false;
                }
                let pa = a.parent[v];
                let expected = if pa == v { perm[v] } else { perm[pa] };
                if b.parent[perm[v]] != expected {
                    return false;
                }
            }
            return true;
        }
        for i in k..n {
            perm.swap(k, i);
            if try_all(perm, k + 1, a, b) {
                perm.swap(k, i);
                return true;
            }
            perm.swap(k, i);
        }
        false
    }
    try_all(&mut perm, 0, a, b)
}

/// Renders a labeled tree for diagnostics: `label:gen(parent)` triples.
pub fn debug_labeled(t: &LabeledTree, gens: &Generators) -> String {
    let mut s = String::new();
    for v in 0..t.size() {
        let _ = write!(
            s,
            "{}{}:{}->{}",
            if v > 0 { " " } else { "" },
            v + 1,
            gens.name(t.dec[v]),
            t.parent[v] + 1
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abc() -> Generators {
        Generators::new(&[("a", 0), ("b", 0), ("c", 0)])
    }

    #[test]
    fn canonical_key_examples() {
        let g = abc();
        let t = ClassTree::parse(&g, "a[b[c],b]").unwrap();
        assert_eq!(t.render(&g), "a[b,b[c]]");
        let t2 = ClassTree::parse(&g, "a[b,b[c]]").unwrap();
        assert_eq!(t, t2);
        assert_eq!(t.weight(), 4);
    }

    #[test]
    fn automorphism_orders() {
        let g = abc();
        // corolla a[b,b]: swapping the equal children.
        let t = ClassTree::parse(&g, "a[b,b]").unwrap();
        assert_eq!(t.aut_order(), 2);
        assert!(!t.sign_degenerate(&g)); // |b| even
        // chain a -> b -> c is rigid.
        let chain = ClassTree::parse(&g, "a[b[c]]").unwrap();
        assert_eq!(chain.aut_order(), 1);
        // three equal leaves: S_3.
        let cor3 = ClassTree::parse(&g, "a[b,b,b]").unwrap();
        assert_eq!(cor3.aut_order(), 6);
        // nested symmetry: a[b[c,c],b[c,c]] has order 2 * 2 * 2.
        let nested = ClassTree::parse(&g, "a[b[c,c],b[c,c]]").unwrap();
        assert_eq!(nested.aut_order(), 8);
    }

    #[test]
    fn sign_degeneracy() {
        let g = Generators::new(&[("a", 0), ("y", 1)]);
        let t = ClassTree::parse(&g, "a[y,y]").unwrap();
        assert!(t.sign_degenerate(&g));
        let t = ClassTree::parse(&g, "a[y]").unwrap();
        assert!(!t.sign_degenerate(&g));
        // even total degree of the repeated subtree: not degenerate.
        let g2 = Generators::new(&[("a", 0), ("y", 1), ("z", 1)]);
        let t = ClassTree::parse(&g2, "a[y[z],y[z]]").unwrap();
        assert!(!t.sign_degenerate(&g2));
        // all-even decorations are never degenerate.
        let g3 = abc();
        for txt in ["a[b,b]", "a[b,b,b]", "a[b[c,c],b[c,c]]"] {
            assert!(!ClassTree::parse(&g3, txt).unwrap().sign_degenerate(&g3));
        }
    }

    #[test]
    fn unlabeled_counts() {
        let by_size = enumerate_unlabeled(6);
        let counts: Vec<usize> = by_size.iter().map(|v| v.len()).collect();
        assert_eq!(counts, vec![1, 1, 2, 4, 9, 20]);
    }

    #[test]
    fn unlabeled_matches_brute_force() {
        // Oracle: enumerate labeled shapes and deduplicate by canonical form.
        for n in 1..=5u32 {
            let labeled = enumerate_labeled(n).unwrap();
            let mut classes: Vec<ClassTree> = labeled.iter().map(|t| t.class()).collect();
            classes.sort();
            classes.dedup();
            assert_eq!(classes.len(), enumerate_unlabeled(n)[n as usize - 1].len());
        }
    }

    #[test]
    fn labeled_counts_are_cayley() {
        for (n, expect) in [(1u32, 1usize), (2, 2), (3, 9), (4, 64), (5, 625)] {
            assert_eq!(enumerate_labeled(n).unwrap().len(), expect, "n = {n}");
        }
        assert!(enumerate_labeled(9).is_err());
    }

    #[test]
    fn orbit_counting_consistency() {
        // Sum over decorated iso classes of n!/|Aut| recovers n^(n-1)
        // (single generator, so decorations are trivial).
        for n in 1..=5u32 {
            let total: u64 = enumerate_unlabeled(n)[n as usize - 1]
                .iter()
                .map(|t| factorial(n as u64) / t.aut_order())
                .sum();
            assert_eq!(total, (n as u64).pow(n - 1));
        }
    }

    #[test]
    fn graft_examples() {
        let g = abc();
        let a = ClassTree::leaf(0);
        let b = ClassTree::leaf(1);
        let chain = a.graft(0, &b).unwrap();
        assert_eq!(chain.render(&g), "a[b]");
        // grafting onto a leaf deepens the tree.
        let deep = chain.graft(1, &b).unwrap();
        assert_eq!(deep.render(&g), "a[b[b]]");
        // two grafts at the same vertex commute up to iso class.
        let c = ClassTree::parse(&g, "b[c]").unwrap();
        let t1 = chain.graft(0, &b).unwrap().graft(0, &c).unwrap();
        let t2 = chain.graft(0, &c).unwrap().graft(0, &b).unwrap();
        assert_eq!(t1, t2);
        assert!(chain.graft(7, &b).is_err());
    }

    #[test]
    fn canonical_equality_matches_brute_force_isomorphism() {
        // All decorated labeled trees on <= 4 vertices over two generators:
        // equal classes iff brute-force isomorphic.
        let _g = Generators::new(&[("a", 0), ("b", 1)]);
        let mut decorated: Vec<LabeledTree> = Vec::new();
        for n in 1..=4u32 {
            for shape in enumerate_labeled(n).unwrap() {
                let vn = shape.size();
                for mask in 0..(2u32.pow(vn as u32)) {
                    let dec: Vec<u32> = (0..vn).map(|i| (mask >> i) & 1).collect();
                    decorated.push(LabeledTree { parent: shape.parent.clone(), dec });
                }
            }
        }
        // Compare a deterministic sample of pairs (the full quadratic loop
        // over ~700 trees is slow in debug builds).
        for (i, t1) in decorated.iter().enumerate().step_by(7) {
            for (j, t2) in decorated.iter().enumerate().step_by(11) {
                if i == j || t1.size() != t2.size() {
                    continue;
                }
                assert_eq!(
                    t1.class() == t2.class(),
                    isomorphic_brute_force(t1, t2),
                    "trees {i} and {j}"
                );
            }
        }
    }

    #[test]
    fn canonical_rep_round_trip() {
        let g = abc();
        let t = ClassTree::parse(&g, "a[b,b[c],c]").unwrap();
        let labels: Vec<usize> = (0..t.weight() as usize).collect();
        let rep = LabeledTree::canonical_rep(&t, &labels);
        assert!(rep.is_valid());
        assert_eq!(rep.class(), t);
        assert_eq!(rep.rep_sign(&g), 1);
    }

    #[test]
    fn rep_sign_detects_odd_swaps() {
        let g = Generators::new(&[("a", 0), ("y", 1)]);
        let cls = ClassTree::parse(&g, "a[y[y]]").unwrap();
        let rep = LabeledTree::canonical_rep(&cls, &[0, 1, 2]);
        assert_eq!(rep.rep_sign(&g), 1);
        // Swap the labels of the two odd vertices: one odd inversion.
        let swapped = LabeledTree { parent: vec![0, 2, 0], dec: vec![0, 1, 1] };
        assert_eq!(swapped.class(), cls);
        assert_eq!(swapped.rep_sign(&g), -1);
    }

    #[test]
    fn parse_rejects_unknown_generators() {
        let g = abc();
        assert!(matches!(ClassTree::parse(&g, "a[z]"), Err(Error::UnknownGenerator(_))));
        assert!(ClassTree::parse(&g, "a[b,").is_err());
    }
}
