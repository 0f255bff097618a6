//! Arity-capped symmetric sequences, operads and cooperads over a field,
//! and the braced-algebra structure on the equivariant maps from a
//! coaugmented cooperad to an augmented operad.
//!
//! A cooperad is given by explicit decomposition data on the coaugmentation
//! coideal: a list of terms over the quotient-free basis of the composite
//! product (profiles of arities together with pointed shuffles). An operad
//! carries composition matrices for the identity-shuffle component of each
//! profile; other components follow by letting the pointed shuffle act on
//! the output. The weighted braces of the equivariant-map algebra are
//! computed two independent ways: the shuffle-position-sum formula used by
//! [`ConvAlgebra::brace`], and the one-input composite through the
//! infinitesimal (de)composition maps, kept as a cross-check.

use std::collections::BTreeMap;

use crate::braced::BracedAlgebra;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::perm::{koszul_sign_of_map, pointed_shuffles, Permutation};
use crate::ring::{Ring, Scalar};

/// One arity of a symmetric sequence: graded basis, the action of the
/// adjacent transpositions, and the differential.
#[derive(Debug, Clone)]
pub struct Component {
    pub arity: usize,
    pub names: Vec<String>,
    pub degrees: Vec<i64>,
    /// Action matrices of s_i = (i, i+1) for i = 1..arity-1.
    pub action: Vec<Matrix>,
    pub differential: Matrix,
}

impl Component {
    pub fn dim(&self) -> usize {
        self.names.len()
    }

    /// The trivial one-dimensional arity-1 component spanned by the unit.
    pub fn unit(ring: &Ring) -> Component {
        Component {
            arity: 1,
            names: vec!["1".to_string()],
            degrees: vec![0],
            action: Vec::new(),
            differential: Matrix::zero(ring, 1, 1),
        }
    }
}

/// An arity-capped symmetric sequence over a field.
#[derive(Debug, Clone)]
pub struct SymmetricSequence {
    pub ring: Ring,
    pub arity_cap: usize,
    /// components[n-1] is the arity-n component.
    pub components: Vec<Component>,
}

impl SymmetricSequence {
    pub fn dim(&self, arity: usize) -> usize {
        self.components.get(arity - 1).map_or(0, |c| c.dim())
    }

    pub fn component(&self, arity: usize) -> &Component {
        &self.components[arity - 1]
    }

    /// Matrix of an arbitrary permutation, as a product over an adjacent
    /// transposition decomposition.
    pub fn sigma_matrix(&self, arity: usize, sigma: &Permutation) -> Result<Matrix> {
        let comp = self.component(arity);
        let mut result = Matrix::identity(&self.ring, comp.dim());
        // bubble-sort decomposition: sort the one-line word back to the
        // identity recording swaps; sigma = product of the recorded s_i in
        // reverse application order.
        let mut word: Vec<usize> = sigma.images().to_vec();
        let mut swaps: Vec<usize> = Vec::new();
        loop {
            let mut done = true;
            for i in 0..word.len().saturating_sub(1) {
                if word[i] > word[i + 1] {
                    word.swap(i, i + 1);
                    swaps.push(i + 1); // s_{i+1} in 1-based convention
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        // Sorting right-multiplied sigma by each recorded swap, so sigma is
        // the product of the swaps with the last-recorded leftmost; build
        // the matrix in that order.
        for &j in swaps.iter() {
            result = comp.action[j - 1].mul(&result)?;
        }
        Ok(result)
    }

    /// Checks the symmetric-group relations and the compatibility of the
    /// action with degrees and the differential.
    pub fn validate(&self) -> Result<()> {
        if !self.ring.is_field() {
            return Err(Error::NotFiniteField(self.ring.to_string()));
        }
        for comp in &self.components {
            let n = comp.arity;
            if comp.action.len() + 1 != n.max(1) {
                return Err(Error::InvalidOperadData(format!(
                    "arity {n} needs {} action generators, got {}",
                    n - 1,
                    comp.action.len()
                )));
            }
            let id = Matrix::identity(&self.ring, comp.dim());
            for (i, a) in comp.action.iter().enumerate() {
                if a.mul(a)? != id {
                    return Err(Error::InvalidOperadData(format!(
                        "s_{} is not an involution in arity {n}",
                        i + 1
                    )));
                }
            }
            for i in 0..comp.action.len() {
                for j in i + 1..comp.action.len() {
                    let lhs = comp.action[i].mul(&comp.action[j])?;
                    if j == i + 1 {
                        // braid relation s_i s_{i+1} s_i = s_{i+1} s_i s_{i+1}
                        let l = comp.action[i].mul(&comp.action[j])?.mul(&comp.action[i])?;
                        let r = comp.action[j].mul(&comp.action[i])?.mul(&comp.action[j])?;
                        if l != r {
                            return Err(Error::InvalidOperadData(format!(
                                "braid relation fails in arity {n} at {i}"
                            )));
                        }
                    } else if lhs != comp.action[j].mul(&comp.action[i])? {
                        return Err(Error::InvalidOperadData(format!(
                            "distant transpositions do not commute in arity {n}"
                        )));
                    }
                }
            }
            // d^2 = 0 and d commutes with the action.
            if !comp.differential.mul(&comp.differential)?.is_zero() {
                return Err(Error::InvalidOperadData(format!("d^2 != 0 in arity {n}")));
            }
            for a in &comp.action {
                if a.mul(&comp.differential)? != comp.differential.mul(a)? {
                    return Err(Error::InvalidOperadData(format!(
                        "differential is not equivariant in arity {n}"
                    )));
                }
            }
        }
        Ok(())
    }
}

pub type CompositionProfile = (usize, Vec<usize>);

/// An operad: symmetric sequence with composition matrices for the
/// identity-shuffle component of every profile within the cap. P(0) = 0 and
/// P(1) = K spanned by the unit.
#[derive(Debug, Clone)]
pub struct OperadData {
    pub seq: SymmetricSequence,
    pub gamma: BTreeMap<CompositionProfile, Matrix>,
}

impl OperadData {
    /// Applies the composition for one profile to coordinate vectors
    /// (identity-shuffle component).
    pub fn compose(
        &self,
        profile: &CompositionProfile,
        outer: &[Scalar],
        inners: &[Vec<Scalar>],
    ) -> Result<Vec<Scalar>> {
        let (k, ref arities) = *profile;
        debug_assert_eq!(inners.len(), k);
        let g = self.gamma.get(profile).ok_or_else(|| {
            Error::InvalidOperadData(format!("missing composition for profile {profile:?}"))
        })?;
        // flatten the tensor outer (x) inner_1 (x) ... row-major
        let mut flat = vec![self.seq.ring.one()];
        let push_factor = |v: &[Scalar], flat: &mut Vec<Scalar>| -> Result<()> {
            let mut next = Vec::with_capacity(flat.len() * v.len());
            for a in flat.iter() {
                for b in v {
                    next.push(a.mul(b)?);
                }
            }
            *flat = next;
            Ok(())
        };
        push_factor(outer, &mut flat)?;
        for inner in inners {
            push_factor(inner, &mut flat)?;
        }
        let _ = arities;
        g.apply(&flat)
    }

    /// Spot-checks unit laws and inner equivariance of the composition.
    pub fn validate(&self) -> Result<()> {
        self.seq.validate()?;
        let ring = &self.seq.ring;
        // unit laws: gamma(1; x) = x and gamma(x; 1, ..., 1) = x.
        for n in 1..=self.seq.arity_cap {
            let dim = self.seq.dim(n);
            if dim == 0 {
                continue;
            }
            let unit = vec![ring.one()];
            for b in 0..dim {
                let mut x = vec![ring.zero(); dim];
                x[b] = ring.one();
                let outer_profile: CompositionProfile = (1, vec![n]);
                if self.gamma.contains_key(&outer_profile) {
                    let y = self.compose(&outer_profile, &unit, &[x.clone()])?;
                    if y != x {
                        return Err(Error::InvalidOperadData(format!(
                            "left unit law fails in arity {n}"
                        )));
                    }
                }
                let inner_profile: CompositionProfile = (n, vec![1; n]);
                if self.gamma.contains_key(&inner_profile) {
                    let units: Vec<Vec<Scalar>> = vec![unit.clone(); n];
                    let y = self.compose(&inner_profile, &x, &units)?;
                    if y != x {
                        return Err(Error::InvalidOperadData(format!(
                            "right unit law fails in arity {n}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// One stored decomposition term of a cooperad element: a profile, a
/// pointed shuffle, the outer basis index, the inner basis indices (`None`
/// marks a unit slot) and a coefficient.
#[derive(Debug, Clone)]
pub struct DeltaTerm {
    pub profile: CompositionProfile,
    pub shuffle: Permutation,
    pub outer: usize,
    pub inner: Vec<Option<usize>>,
    pub coeff: Scalar,
}

impl DeltaTerm {
    /// Number of non-unit inner slots.
    pub fn infinitesimal_order(&self) -> usize {
        self.inner.iter().filter(|i| i.is_some()).count()
    }
}

/// A coaugmented cooperad: only the genuinely decomposable terms are
/// stored; the two counit terms of each element are implicit.
#[derive(Debug, Clone)]
pub struct CooperadData {
    pub seq: SymmetricSequence,
    /// delta[n-1][b] lists the stored terms of basis element b in arity n.
    pub delta: Vec<Vec<Vec<DeltaTerm>>>,
}

impl CooperadData {
    pub fn terms(&self, arity: usize, basis: usize) -> &[DeltaTerm] {
        &self.delta[arity - 1][basis]
    }

    pub fn validate(&self) -> Result<()> {
        self.seq.validate()?;
        for (ni, per_basis) in self.delta.iter().enumerate() {
            let n = ni + 1;
            for terms in per_basis {
                for t in terms {
                    let (k, ref arities) = t.profile;
                    if arities.len() != k || arities.iter().sum::<usize>() != n {
                        return Err(Error::InvalidOperadData(format!(
                            "bad profile {:?} in arity {n}",
                            t.profile
                        )));
                    }
                    if t.inner.len() != k {
                        return Err(Error::InvalidOperadData("inner slot count mismatch".into()));
                    }
                    for (j, slot) in t.inner.iter().enumerate() {
                        match slot {
                            None if arities[j] != 1 => {
                                return Err(Error::InvalidOperadData(
                                    "unit slots must have arity 1".into(),
                                ))
                            }
                            Some(_) if arities[j] == 1 => {
                                return Err(Error::InvalidOperadData(
                                    "arity-1 slots must be units (the coideal vanishes there)"
                                        .into(),
                                ))
                            }
                            Some(b) if *b >= self.seq.dim(arities[j]) => {
                                return Err(Error::InvalidOperadData(
                                    "inner basis index out of range".into(),
                                ))
                            }
                            _ => {}
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// The dimension data of a composite product component: the basis is
/// indexed by profile, basis tuples and pointed shuffles.
pub fn compose_product_basis(
    m: &SymmetricSequence,
    n_seq: &SymmetricSequence,
    n: usize,
) -> Result<Vec<(CompositionProfile, usize, Vec<usize>, Permutation)>> {
    if n > m.arity_cap {
        return Err(Error::CapExceeded(format!("arity {n} above cap {}", m.arity_cap)));
    }
    let mut out = Vec::new();
    for k in 1..=n {
        if m.dim(k) == 0 {
            continue;
        }
        for arities in compositions_of(n, k) {
            if arities.iter().any(|&a| a == 0 || n_seq.dim(a) == 0) {
                continue;
            }
            let shuffles = pointed_shuffles(&arities)?;
            for outer in 0..m.dim(k) {
                let mut tuples: Vec<Vec<usize>> = vec![Vec::new()];
                for &a in &arities {
                    let mut next = Vec::new();
                    for t in &tuples {
                        for b in 0..n_seq.dim(a) {
                            let mut t2 = t.clone();
                            t2.push(b);
                            next.push(t2);
                        }
                    }
                    tuples = next;
                }
                for t in tuples {
                    for w in &shuffles {
                        out.push(((k, arities.clone()), outer, t.clone(), w.clone()));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Ordered compositions of n into k positive parts.
pub fn compositions_of(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return if n == 0 { vec![vec![]] } else { Vec::new() };
    }
    if k == 1 {
        return vec![vec![n]];
    }
    let mut out = Vec::new();
    for first in 1..=n.saturating_sub(k - 1) {
        for rest in compositions_of(n - first, k - 1) {
            let mut v = vec![first];
            v.extend(rest);
            out.push(v);
        }
    }
    out
}

/// An element of the equivariant-map algebra: one matrix per arity >= 2.
#[derive(Debug, Clone, PartialEq)]
pub struct HomElement {
    pub maps: BTreeMap<usize, Matrix>,
}

impl HomElement {
    pub fn zero() -> HomElement {
        HomElement { maps: BTreeMap::new() }
    }
}

/// The convolution algebra Hom_Sigma(C-bar, P-bar) of an arity-capped
/// cooperad/operad pair.
pub struct ConvAlgebra {
    pub c: CooperadData,
    pub p: OperadData,
    /// Lookup: (arity, profile, shuffle one-line) -> term indices.
    index: BTreeMap<(usize, CompositionProfile, Vec<usize>), Vec<(usize, usize)>>,
}

impl ConvAlgebra {
    pub fn new(c: CooperadData, p: OperadData) -> Result<ConvAlgebra> {
        c.validate()?;
        p.validate()?;
        if c.seq.ring != p.seq.ring {
            return Err(Error::RingMismatch(c.seq.ring.to_string(), p.seq.ring.to_string()));
        }
        if c.seq.arity_cap != p.seq.arity_cap {
            return Err(Error::ArityMismatch(format!(
                "cooperad cap {} vs operad cap {}",
                c.seq.arity_cap, p.seq.arity_cap
            )));
        }
        for n in 1..=c.seq.arity_cap {
            if c.seq.dim(n) != 0 && p.seq.dim(n) == 0 {
                return Err(Error::ArityMismatch(format!("operad missing arity {n}")));
            }
        }
        let mut index: BTreeMap<(usize, CompositionProfile, Vec<usize>), Vec<(usize, usize)>> =
            BTreeMap::new();
        for (ni, per_basis) in c.delta.iter().enumerate() {
            let n = ni + 1;
            for (b, terms) in per_basis.iter().enumerate() {
                for (ti, t) in terms.iter().enumerate() {
                    index
                        .entry((n, t.profile.clone(), t.shuffle.images().to_vec()))
                        .or_default()
                        .push((b, ti));
                }
            }
        }
        Ok(ConvAlgebra { c, p, index })
    }

    pub fn arity_cap(&self) -> usize {
        self.c.seq.arity_cap
    }

    fn empty_matrix(&self, arity: usize) -> Matrix {
        Matrix::zero(&self.p.seq.ring, self.p.seq.dim(arity), self.c.seq.dim(arity))
    }

    /// The arity-n matrix of an element (zero when absent).
    pub fn map_at(&self, f: &HomElement, arity: usize) -> Matrix {
        f.maps.get(&arity).cloned().unwrap_or_else(|| self.empty_matrix(arity))
    }

    fn insert_nonzero(&self, out: &mut HomElement, arity: usize, m: Matrix) {
        if m.is_zero() {
            out.maps.remove(&arity);
        } else {
            out.maps.insert(arity, m);
        }
    }

    /// Checks the equivariance matrix identities of an element.
    pub fn is_equivariant(&self, f: &HomElement) -> Result<bool> {
        for (&n, m) in &f.maps {
            let comp_c = self.c.seq.component(n);
            let comp_p = self.p.seq.component(n);
            for i in 0..n - 1 {
                if m.mul(&comp_c.action[i])? != comp_p.action[i].mul(m)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Evaluates one decomposition term against an outer map and a list of
    /// inner maps assigned to the non-unit slots (in slot order), returning
    /// the contribution to the output column, with all Koszul signs.
    fn eval_term(
        &self,
        arity: usize,
        term: &DeltaTerm,
        outer_map: &Matrix,
        inner_maps: &[(usize, &Matrix, i64)],
    ) -> Result<Option<Vec<Scalar>>> {
        let (k, ref arities) = term.profile;
        // Outer vector: column of the outer map at the term's outer index.
        if outer_map.cols == 0 || outer_map.rows == 0 {
            return Ok(None);
        }
        let outer_vec: Vec<Scalar> =
            (0..outer_map.rows).map(|r| outer_map.at(r, term.outer).clone()).collect();
        if outer_vec.iter().all(|v| v.is_zero()) {
            return Ok(None);
        }
        // Koszul sign: move each inner map past the cooperad factors before
        // its slot (the outer factor plus the earlier inner factors).
        let outer_deg = self.c.seq.component(k).degrees[term.outer];
        let mut passed = outer_deg;
        let mut sign = 1i64;
        let mut inner_iter = inner_maps.iter();
        let mut inner_vecs: Vec<Vec<Scalar>> = Vec::with_capacity(k);
        for (j, slot) in term.inner.iter().enumerate() {
            match slot {
                None => {
                    inner_vecs.push(vec![self.p.seq.ring.one()]);
                }
                Some(b) => {
                    let (slot_pos, g, gdeg) = inner_iter
                        .next()
                        .ok_or_else(|| Error::ArityMismatch("missing inner map".into()))?;
                    debug_assert_eq!(*slot_pos, j);
                    if gdeg % 2 != 0 && passed % 2 != 0 {
                        sign = -sign;
                    }
                    let col: Vec<Scalar> = (0..g.rows).map(|r| g.at(r, *b).clone()).collect();
                    if col.iter().all(|v| v.is_zero()) {
                        return Ok(None);
                    }
                    inner_vecs.push(col);
                    passed += self.c.seq.component(arities[j]).degrees[*b];
                    continue;
                }
            }
            // unit slot: degree 0 factor
            passed += 0;
        }
        // Compose in the operad, then let the pointed shuffle act.
        let composed = self.p.compose(&term.profile, &outer_vec, &inner_vecs)?;
        let acted = self.p.seq.sigma_matrix(arity, &term.shuffle)?.apply(&composed)?;
        let mut coeff = term.coeff.clone();
        if sign < 0 {
            coeff = coeff.neg();
        }
        Ok(Some(
            acted
                .into_iter()
                .map(|v| v.mul(&coeff))
                .collect::<Result<Vec<_>>>()?,
        ))
    }

    /// The brace of arity-homogeneous pieces by the double shuffle-position
    /// sum. `slots` lists (arity, map matrix, degree, weight).
    fn brace_core(
        &self,
        u: usize,
        f_matrix: &Matrix,
        slots: &[(usize, Matrix, i64, u32)],
    ) -> Result<HomElement> {
        let r_total: usize = slots.iter().map(|(_, _, _, r)| *r as usize).sum();
        let mut out = HomElement::zero();
        if r_total > u {
            return Ok(out); // not enough inputs on the head
        }
        let m = u + slots
            .iter()
            .map(|(s, _, _, r)| (*s - 1) * (*r as usize))
            .sum::<usize>();
        if m > self.arity_cap() || self.c.seq.dim(m) == 0 {
            return Ok(out);
        }
        // copies in slot order: (arity, matrix, degree)
        let copies: Vec<(usize, &Matrix, i64)> = slots
            .iter()
            .flat_map(|(s, g, d, r)| std::iter::repeat((*s, g, *d)).take(*r as usize))
            .collect();
        let block_sizes: Vec<usize> = slots.iter().map(|(_, _, _, r)| *r as usize).collect();
        let mut result = self.empty_matrix(m);
        for sigma in crate::perm::shuffles(&block_sizes) {
            // Koszul sign of rearranging the copies by sigma.
            let positions: Vec<usize> = (1..=r_total).map(|j| sigma.apply(j)).collect();
            let parities: Vec<i64> = copies.iter().map(|(_, _, d)| d % 2).collect();
            let eps = koszul_sign_of_map(&positions, &parities);
            // arranged copies: position l receives copy sigma^{-1}(l)
            let inv = sigma.inverse();
            let arranged: Vec<(usize, &Matrix, i64)> =
                (1..=r_total).map(|l| copies[inv.apply(l) - 1]).collect();
            for positions in crate::perm::combinations(&(1..=u).collect::<Vec<_>>(), r_total) {
                // profile: arity t_j at chosen positions, 1 elsewhere
                let mut arities = vec![1usize; u];
                for (l, &pos) in positions.iter().enumerate() {
                    arities[pos - 1] = arranged[l].0;
                }
                let profile: CompositionProfile = (u, arities.clone());
                for omega in pointed_shuffles(&arities)? {
                    let key = (m, profile.clone(), omega.images().to_vec());
                    let Some(hits) = self.index.get(&key) else { continue };
                    // inner maps at the non-unit slots, in slot order
                    let inner_maps: Vec<(usize, &Matrix, i64)> = positions
                        .iter()
                        .enumerate()
                        .map(|(l, &pos)| (pos - 1, arranged[l].1, arranged[l].2))
                        .collect();
                    let mut sorted_inner = inner_maps.clone();
                    sorted_inner.sort_by_key(|(p, _, _)| *p);
                    for &(b, ti) in hits {
                        let term = &self.c.delta[m - 1][b][ti];
                        if let Some(mut col) =
                            self.eval_term(m, term, f_matrix, &sorted_inner)?
                        {
                            if eps < 0 {
                                for v in col.iter_mut() {
                                    *v = v.neg();
                                }
                            }
                            for (row, v) in col.into_iter().enumerate() {
                                if !v.is_zero() {
                                    let cur = result.at(row, b).add(&v)?;
                                    *result.at_mut(row, b) = cur;
                                }
                            }
                        }
                    }
                }
            }
        }
        self.insert_nonzero(&mut out, m, result);
        debug_assert!(self.is_equivariant(&out)?);
        Ok(out)
    }

    /// One-input brace through the infinitesimal composite: project the
    /// decomposition onto the terms with exactly k non-unit inner slots,
    /// apply f to the outer factor and g to each non-unit inner factor,
    /// and compose. Kept independent of [`ConvAlgebra::brace`].
    pub fn brace_one_input(&self, f: &HomElement, g: &HomElement, k: u32) -> Result<HomElement> {
        if k == 0 {
            return Ok(f.clone());
        }
        let mut out = HomElement::zero();
        for m in 2..=self.arity_cap() {
            if self.c.seq.dim(m) == 0 {
                continue;
            }
            let mut result = self.empty_matrix(m);
            for b in 0..self.c.seq.dim(m) {
                for term in self.c.terms(m, b) {
                    if term.infinitesimal_order() != k as usize {
                        continue;
                    }
                    let (u, ref arities) = term.profile;
                    let outer_map = self.map_at(f, u);
                    let inner_maps: Vec<(usize, Matrix, i64)> = term
                        .inner
                        .iter()
                        .enumerate()
                        .filter_map(|(j, slot)| {
                            slot.map(|_| {
                                let g_m = self.map_at(g, arities[j]);
                                let d = self.hom_degree_at(g, arities[j]).unwrap_or(0);
                                (j, g_m, d)
                            })
                        })
                        .collect();
                    let borrowed: Vec<(usize, &Matrix, i64)> =
                        inner_maps.iter().map(|(j, m, d)| (*j, m, *d)).collect();
                    if let Some(col) = self.eval_term(m, term, &outer_map, &borrowed)? {
                        for (row, v) in col.into_iter().enumerate() {
                            if !v.is_zero() {
                                let cur = result.at(row, b).add(&v)?;
                                *result.at_mut(row, b) = cur;
                            }
                        }
                    }
                }
            }
            self.insert_nonzero(&mut out, m, result);
        }
        Ok(out)
    }

    fn hom_degree_at(&self, f: &HomElement, arity: usize) -> Option<i64> {
        let m = f.maps.get(&arity)?;
        let comp_c = self.c.seq.component(arity);
        let comp_p = self.p.seq.component(arity);
        for i in 0..m.rows {
            for j in 0..m.cols {
                if !m.at(i, j).is_zero() {
                    return Some(comp_p.degrees[i] - comp_c.degrees[j]);
                }
            }
        }
        None
    }

    /// The circular product of unital elements 1 + f and 1 + g through the
    /// full decomposition: Delta, then f on the outer and g on the inner
    /// factors, then operad composition. Independent of the series route.
    pub fn circ_full(&self, f: &HomElement, g: &HomElement) -> Result<HomElement> {
        let mut out = HomElement::zero();
        for m in 2..=self.arity_cap() {
            if self.c.seq.dim(m) == 0 {
                continue;
            }
            // Delta_(0) contributes f-bar + g-bar.
            let mut result = self.map_at(f, m);
            result = add_matrices(&result, &self.map_at(g, m))?;
            for b in 0..self.c.seq.dim(m) {
                for term in self.c.terms(m, b) {
                    let (u, ref arities) = term.profile;
                    let outer_map = self.map_at(f, u);
                    let inner_maps: Vec<(usize, Matrix, i64)> = term
                        .inner
                        .iter()
                        .enumerate()
                        .filter_map(|(j, slot)| {
                            slot.map(|_| {
                                let g_m = self.map_at(g, arities[j]);
                                let d = self.hom_degree_at(g, arities[j]).unwrap_or(0);
                                (j, g_m, d)
                            })
                        })
                        .collect();
                    let borrowed: Vec<(usize, &Matrix, i64)> =
                        inner_maps.iter().map(|(j, m, d)| (*j, m, *d)).collect();
                    if let Some(col) = self.eval_term(m, term, &outer_map, &borrowed)? {
                        for (row, v) in col.into_iter().enumerate() {
                            if !v.is_zero() {
                                let cur = result.at(row, b).add(&v)?;
                                *result.at_mut(row, b) = cur;
                            }
                        }
                    }
                }
            }
            self.insert_nonzero(&mut out, m, result);
        }
        Ok(out)
    }
}

fn add_matrices(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    let mut out = a.clone();
    for i in 0..a.rows {
        for j in 0..a.cols {
            *out.at_mut(i, j) = a.at(i, j).add(b.at(i, j))?;
        }
    }
    Ok(out)
}

impl BracedAlgebra for ConvAlgebra {
    type Elem = HomElement;

    fn ring(&self) -> &Ring {
        &self.p.seq.ring
    }

    fn zero(&self) -> HomElement {
        HomElement::zero()
    }

    fn is_zero(&self, e: &HomElement) -> bool {
        e.maps.values().all(|m| m.is_zero())
    }

    fn add(&self, a: &HomElement, b: &HomElement) -> Result<HomElement> {
        let mut out = HomElement::zero();
        for n in 2..=self.arity_cap() {
            if a.maps.contains_key(&n) || b.maps.contains_key(&n) {
                let m = add_matrices(&self.map_at(a, n), &self.map_at(b, n))?;
                self.insert_nonzero(&mut out, n, m);
            }
        }
        Ok(out)
    }

    fn neg(&self, a: &HomElement) -> HomElement {
        let mut out = HomElement::zero();
        for (&n, m) in &a.maps {
            let mut neg = m.clone();
            for v in neg.a.iter_mut() {
                *v = v.neg();
            }
            out.maps.insert(n, neg);
        }
        out
    }

    fn scale(&self, c: &Scalar, a: &HomElement) -> Result<HomElement> {
        let mut out = HomElement::zero();
        for (&n, m) in &a.maps {
            let mut s = m.clone();
            for v in s.a.iter_mut() {
                *v = v.mul(c)?;
            }
            self.insert_nonzero(&mut out, n, s);
        }
        Ok(out)
    }

    fn brace(&self, x: &HomElement, args: &[(HomElement, u32)]) -> Result<HomElement> {
        let args: Vec<&(HomElement, u32)> = args.iter().filter(|(_, r)| *r > 0).collect();
        if args.is_empty() {
            return Ok(x.clone());
        }
        if args.iter().any(|(g, _)| self.is_zero(g)) {
            return Ok(HomElement::zero());
        }
        // odd-weight convention on arity components
        for (g, r) in &args {
            if *r >= 2 && !self.ring().has_char_two() {
                for &n in g.maps.keys() {
                    if self.hom_degree_at(g, n).map_or(false, |d| d % 2 != 0) {
                        return Err(Error::OddWeightViolation { weight: *r });
                    }
                }
            }
        }
        let mut out = HomElement::zero();
        // expand the head linearly over arity components
        for (&u, f_matrix) in &x.maps {
            // distribute each argument's weight over its arity components
            let arg_components: Vec<Vec<(usize, Matrix, i64)>> = args
                .iter()
                .map(|(g, _)| {
                    g.maps
                        .keys()
                        .map(|&n| {
                            (n, self.map_at(g, n), self.hom_degree_at(g, n).unwrap_or(0))
                        })
                        .collect()
                })
                .collect();
            let mut slots: Vec<(usize, Matrix, i64, u32)> = Vec::new();
            self.expand_brace(
                u,
                f_matrix,
                &arg_components,
                &args.iter().map(|(_, r)| *r).collect::<Vec<_>>(),
                0,
                0,
                &mut slots,
                &mut out,
            )?;
        }
        Ok(out)
    }

    fn differential(&self, x: &HomElement) -> Result<HomElement> {
        let mut out = HomElement::zero();
        for (&n, m) in &x.maps {
            let dp = &self.p.seq.component(n).differential;
            let dc = &self.c.seq.component(n).differential;
            let left = dp.mul(m)?;
            let mut right = m.mul(dc)?;
            let deg = self.hom_degree_at(x, n).unwrap_or(0);
            if deg % 2 == 0 {
                for v in right.a.iter_mut() {
                    *v = v.neg();
                }
            }
            let d = add_matrices(&left, &right)?;
            self.insert_nonzero(&mut out, n, d);
        }
        Ok(out)
    }

    fn degree(&self, x: &HomElement) -> Option<i64> {
        let mut deg = None;
        for (&n, m) in &x.maps {
            let comp_c = self.c.seq.component(n);
            let comp_p = self.p.seq.component(n);
            for i in 0..m.rows {
                for j in 0..m.cols {
                    if m.at(i, j).is_zero() {
                        continue;
                    }
                    let d = comp_p.degrees[i] - comp_c.degrees[j];
                    match deg {
                        None => deg = Some(d),
                        Some(e) if e != d => return None,
                        _ => {}
                    }
                }
            }
        }
        deg
    }

    fn degree_component(&self, x: &HomElement, degree: i64) -> HomElement {
        let mut out = HomElement::zero();
        for (&n, m) in &x.maps {
            let comp_c = self.c.seq.component(n);
            let comp_p = self.p.seq.component(n);
            let mut keep = self.empty_matrix(n);
            for i in 0..m.rows {
                for j in 0..m.cols {
                    if !m.at(i, j).is_zero() && comp_p.degrees[i] - comp_c.degrees[j] == degree {
                        *keep.at_mut(i, j) = m.at(i, j).clone();
                    }
                }
            }
            self.insert_nonzero(&mut out, n, keep);
        }
        out
    }

    fn min_weight(&self, x: &HomElement) -> u32 {
        x.maps
            .iter()
            .filter(|(_, m)| !m.is_zero())
            .map(|(&n, _)| n as u32 - 1)
            .min()
            .unwrap_or(self.weight_cap() + 1)
    }

    fn weight_cap(&self) -> u32 {
        self.arity_cap() as u32 - 1
    }

    fn render(&self, x: &HomElement) -> String {
        if self.is_zero(x) {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (&n, m) in &x.maps {
            if m.is_zero() {
                continue;
            }
            let entries: Vec<String> = m.a.iter().map(|v| v.to_string()).collect();
            parts.push(format!("arity {n}: [{}]", entries.join(",")));
        }
        parts.join("; ")
    }

    fn component_basis(&self, degree: i64) -> Option<Vec<HomElement>> {
        // Solve the equivariance constraints per arity over the entries of
        // the given degree pattern.
        let ring = self.ring().clone();
        let mut out = Vec::new();
        for n in 2..=self.arity_cap() {
            let dim_c = self.c.seq.dim(n);
            let dim_p = self.p.seq.dim(n);
            if dim_c == 0 || dim_p == 0 {
                continue;
            }
            let comp_c = self.c.seq.component(n);
            let comp_p = self.p.seq.component(n);
            // entry variables with the right degree
            let vars: Vec<(usize, usize)> = (0..dim_p)
                .flat_map(|i| (0..dim_c).map(move |j| (i, j)))
                .filter(|&(i, j)| comp_p.degrees[i] - comp_c.degrees[j] == degree)
                .collect();
            if vars.is_empty() {
                continue;
            }
            // constraints: for each generator s: f A_C(s) - A_P(s) f = 0,
            // entrywise linear in the variables.
            let mut rows: Vec<Vec<Scalar>> = Vec::new();
            for s in 0..n - 1 {
                let ac = &comp_c.action[s];
                let ap = &comp_p.action[s];
                for i in 0..dim_p {
                    for j in 0..dim_c {
                        let mut row = vec![ring.zero(); vars.len()];
                        // (f ac)_{ij} = sum_k f_{ik} ac_{kj}
                        for (v, &(vi, vj)) in vars.iter().enumerate() {
                            let mut coeff = ring.zero();
                            if vi == i {
                                coeff = coeff.add(ac.at(vj, j)).ok()?;
                            }
                            // (ap f)_{ij} = sum_k ap_{ik} f_{kj}
                            if vj == j {
                                coeff = coeff.sub(ap.at(i, vi)).ok()?;
                            }
                            row[v] = coeff;
                        }
                        rows.push(row);
                    }
                }
            }
            let m = Matrix::from_rows(&ring, &rows);
            let kernel = if rows.is_empty() {
                // arity covered by no constraint (n = 1 impossible here)
                Matrix::identity(&ring, vars.len())
                    .a
                    .chunks(vars.len())
                    .map(|r| r.to_vec())
                    .collect()
            } else {
                m.kernel_basis().ok()?
            };
            for vec in kernel {
                let mut mat = self.empty_matrix(n);
                for (v, &(i, j)) in vars.iter().enumerate() {
                    *mat.at_mut(i, j) = vec[v].clone();
                }
                let mut f = HomElement::zero();
                f.maps.insert(n, mat);
                out.push(f);
            }
        }
        Some(out)
    }
}

impl ConvAlgebra {
    #[allow(clippy::too_many_arguments)]
    fn expand_brace(
        &self,
        u: usize,
        f_matrix: &Matrix,
        arg_components: &[Vec<(usize, Matrix, i64)>],
        weights: &[u32],
        k: usize,
        _depth: usize,
        slots: &mut Vec<(usize, Matrix, i64, u32)>,
        out: &mut HomElement,
    ) -> Result<()> {
        if k == arg_components.len() {
            let piece = self.brace_core(u, f_matrix, slots)?;
            let sum = BracedAlgebra::add(self, out, &piece)?;
            *out = sum;
            return Ok(());
        }
        fn split(
            alg: &ConvAlgebra,
            u: usize,
            f_matrix: &Matrix,
            arg_components: &[Vec<(usize, Matrix, i64)>],
            weights: &[u32],
            k: usize,
            pos: usize,
            remaining: u32,
            slots: &mut Vec<(usize, Matrix, i64, u32)>,
            out: &mut HomElement,
        ) -> Result<()> {
            if remaining == 0 {
                return alg.expand_brace(u, f_matrix, arg_components, weights, k + 1, 0, slots, out);
            }
            if pos == arg_components[k].len() {
                return Ok(());
            }
            split(alg, u, f_matrix, arg_components, weights, k, pos + 1, remaining, slots, out)?;
            let (arity, matrix, deg) = &arg_components[k][pos];
            for s in 1..=remaining {
                slots.push((*arity, matrix.clone(), *deg, s));
                split(alg, u, f_matrix, arg_components, weights, k, pos + 1, remaining - s, slots, out)?;
                slots.pop();
            }
            Ok(())
        }
        split(self, u, f_matrix, arg_components, weights, k, 0, weights[k], slots, out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::associative_operad;

    #[test]
    fn sigma_matrix_is_a_homomorphism() {
        // Pin the decomposition order: the matrix of a product is the
        // product of matrices, checked on all of Sigma_4 for the regular
        // representation.
        let ring = Ring::prime_field(5);
        let p = associative_operad(&ring, 4).unwrap();
        let perms: Vec<Permutation> = crate::perm::shuffles(&[1, 1, 1, 1]);
        for a in &perms {
            for b in perms.iter().take(8) {
                let ab = a.compose(b).unwrap();
                let m_ab = p.seq.sigma_matrix(4, &ab).unwrap();
                let m_a = p.seq.sigma_matrix(4, a).unwrap();
                let m_b = p.seq.sigma_matrix(4, b).unwrap();
                assert_eq!(m_ab, m_a.mul(&m_b).unwrap());
            }
        }
    }
}
