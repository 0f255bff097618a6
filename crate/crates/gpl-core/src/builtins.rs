//! Built-in operads and cooperads: the arity-capped associative operad on
//! regular representations, the commutative operad on trivial
//! representations, arity-wise dualization, the primitive (trivial
//! decomposition) cooperad family, and the non-symmetric associative model
//! used by the brace-algebra bridge checks.

use std::collections::BTreeMap;

use crate::braced::BracedAlgebra;
use crate::conv::{Component, CompositionProfile, CooperadData, DeltaTerm, OperadData, SymmetricSequence};
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::perm::{pointed_shuffles, Permutation};
use crate::ring::{Ring, Scalar};

fn all_permutations(n: usize) -> Vec<Permutation> {
    fn rec(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for rest in rec(n - 1) {
            for pos in 0..=rest.len() {
                let mut v = rest.clone();
                v.insert(pos, n);
                out.push(v);
            }
        }
        out
    }
    let mut perms: Vec<Permutation> =
        rec(n).into_iter().map(|v| Permutation::from_images(v).unwrap()).collect();
    perms.sort();
    perms
}

/// The associative operad on regular representations: As(n) = K[S_n], the
/// symmetric group acting by left translation, composition by block
/// substitution.
pub fn associative_operad(ring: &Ring, cap: usize) -> Result<OperadData> {
    let mut components = Vec::new();
    for n in 1..=cap {
        let perms = all_permutations(n);
        let dim = perms.len();
        let index: BTreeMap<Vec<usize>, usize> = perms
            .iter()
            .enumerate()
            .map(|(i, p)| (p.images().to_vec(), i))
            .collect();
        let mut action = Vec::new();
        for i in 1..n {
            // sigma . tau = tau o sigma^{-1}: the action compatible with
            // reading basis words as input relabelings.
            let s = Permutation::transposition(n, i, i + 1);
            let mut m = Matrix::zero(ring, dim, dim);
            for (j, p) in perms.iter().enumerate() {
                let target = p.compose(&s)?;
                let ti = index[&target.images().to_vec()];
                *m.at_mut(ti, j) = ring.one();
            }
            action.push(m);
        }
        components.push(Component {
            arity: n,
            names: perms
                .iter()
                .map(|p| {
                    let digits: Vec<String> =
                        p.images().iter().map(|v| v.to_string()).collect();
                    format!("w{}", digits.join(""))
                })
                .collect(),
            degrees: vec![0; dim],
            action,
            differential: Matrix::zero(ring, dim, dim),
        });
    }
    let seq = SymmetricSequence { ring: ring.clone(), arity_cap: cap, components };
    let mut gamma = BTreeMap::new();
    for n in 1..=cap {
        for k in 1..=n {
            for arities in crate::conv::compositions_of(n, k) {
                let outer = all_permutations(k);
                let inner_lists: Vec<Vec<Permutation>> =
                    arities.iter().map(|&a| all_permutations(a)).collect();
                let target = all_permutations(n);
                let target_index: BTreeMap<Vec<usize>, usize> = target
                    .iter()
                    .enumerate()
                    .map(|(i, p)| (p.images().to_vec(), i))
                    .collect();
                let cols: usize =
                    outer.len() * inner_lists.iter().map(|l| l.len()).product::<usize>();
                let mut m = Matrix::zero(ring, target.len(), cols);
                // iterate the flattened tensor basis row-major
                let mut col = 0usize;
                let mut iterate = vec![0usize; k];
                for o in &outer {
                    loop {
                        let parts: Vec<Permutation> = iterate
                            .iter()
                            .enumerate()
                            .map(|(j, &b)| inner_lists[j][b].clone())
                            .collect();
                        let composed = o
                            .block_permutation(&arities)?
                            .compose(&Permutation::direct_sum(&parts))?;
                        let row = target_index[&composed.images().to_vec()];
                        *m.at_mut(row, col) = ring.one();
                        col += 1;
                        // advance the inner index vector (last factor fastest)
                        let mut j = k;
                        loop {
                            if j == 0 {
                                break;
                            }
                            j -= 1;
                            iterate[j] += 1;
                            if iterate[j] < inner_lists[j].len() {
                                break;
                            }
                            iterate[j] = 0;
                            if j == 0 {
                                break;
                            }
                        }
                        if iterate.iter().all(|&b| b == 0) {
                            break;
                        }
                    }
                }
                gamma.insert((k, arities), m);
            }
        }
    }
    let op = OperadData { seq, gamma };
    op.validate()?;
    Ok(op)
}

/// The commutative operad on trivial representations: Com(n) = K with
/// every composition the identity on coefficients.
pub fn commutative_operad(ring: &Ring, cap: usize) -> Result<OperadData> {
    let components = (1..=cap)
        .map(|n| Component {
            arity: n,
            names: vec![format!("e{n}")],
            degrees: vec![0],
            action: vec![Matrix::identity(ring, 1); n.saturating_sub(1)],
            differential: Matrix::zero(ring, 1, 1),
        })
        .collect();
    let seq = SymmetricSequence { ring: ring.clone(), arity_cap: cap, components };
    let mut gamma = BTreeMap::new();
    for n in 1..=cap {
        for k in 1..=n {
            for arities in crate::conv::compositions_of(n, k) {
                gamma.insert((k, arities), Matrix::identity(ring, 1));
            }
        }
    }
    let op = OperadData { seq, gamma };
    op.validate()?;
    Ok(op)
}

/// Arity-wise dual of an ungraded finite operad: transposes the action and
/// the composition matrices. The stored decomposition keeps the genuinely
/// decomposable profiles (outer arity at least two, at least one non-unit
/// inner slot); the counit terms stay implicit.
pub fn dualize(op: &OperadData) -> Result<CooperadData> {
    let ring = &op.seq.ring;
    for comp in &op.seq.components {
        if comp.degrees.iter().any(|&d| d != 0) {
            return Err(Error::InvalidOperadData(
                "dualization is only provided for ungraded operads".into(),
            ));
        }
        if !comp.differential.is_zero() {
            return Err(Error::InvalidOperadData(
                "dualization is only provided for operads with zero differential".into(),
            ));
        }
    }
    let components = op
        .seq
        .components
        .iter()
        .map(|c| {
            let mut action = Vec::new();
            for a in &c.action {
                let mut t = Matrix::zero(ring, a.cols, a.rows);
                for i in 0..a.rows {
                    for j in 0..a.cols {
                        *t.at_mut(j, i) = a.at(i, j).clone();
                    }
                }
                action.push(t);
            }
            Component {
                arity: c.arity,
                names: c.names.iter().map(|n| format!("{n}^")).collect(),
                degrees: c.degrees.clone(),
                action,
                differential: Matrix::zero(ring, c.dim(), c.dim()),
            }
        })
        .collect();
    let seq = SymmetricSequence { ring: ring.clone(), arity_cap: op.seq.arity_cap, components };
    let mut delta: Vec<Vec<Vec<DeltaTerm>>> = (1..=op.seq.arity_cap)
        .map(|n| vec![Vec::new(); op.seq.dim(n)])
        .collect();
    for n in 2..=op.seq.arity_cap {
        for k in 2..n {
            for arities in crate::conv::compositions_of(n, k) {
                if arities.iter().all(|&a| a == 1) {
                    continue;
                }
                let profile: CompositionProfile = (k, arities.clone());
                let Some(g) = op.gamma.get(&profile) else { continue };
                for omega in pointed_shuffles(&arities)? {
                    let act = op.seq.sigma_matrix(n, &omega)?;
                    // coefficient of b in omega . gamma(tensor basis col)
                    let full = act.mul(g)?;
                    // column index decodes (outer, inner...) row-major
                    let inner_dims: Vec<usize> = arities.iter().map(|&a| op.seq.dim(a)).collect();
                    for colv in 0..full.cols {
                        let mut rest = colv;
                        let mut radix: Vec<usize> = Vec::with_capacity(k + 1);
                        let mut sizes = vec![op.seq.dim(k)];
                        sizes.extend(inner_dims.iter().copied());
                        for &s in sizes.iter().rev() {
                            radix.push(rest % s);
                            rest /= s;
                        }
                        radix.reverse();
                        let outer = radix[0];
                        let inner: Vec<Option<usize>> = radix[1..]
                            .iter()
                            .zip(arities.iter())
                            .map(|(&b, &a)| if a == 1 { None } else { Some(b) })
                            .collect();
                        for b in 0..op.seq.dim(n) {
                            let coeff = full.at(b, colv);
                            if !coeff.is_zero() {
                                delta[n - 1][b].push(DeltaTerm {
                                    profile: profile.clone(),
                                    shuffle: omega.clone(),
                                    outer,
                                    inner: inner.clone(),
                                    coeff: coeff.clone(),
                                });
                            }
                        }
                    }
                }
            }
        }
    }
    let c = CooperadData { seq, delta };
    c.validate()?;
    Ok(c)
}

/// A primitive cooperad: chosen graded components with trivial symmetric
/// action, zero reduced decomposition, and an optional differential given
/// entrywise.
pub fn primitive_cooperad(
    ring: &Ring,
    cap: usize,
    basis: &[(usize, &[(&str, i64)])],
    differential: &[(usize, usize, usize, i64)],
) -> Result<CooperadData> {
    let mut components = vec![Component::unit(ring)];
    for n in 2..=cap {
        let named: Vec<(&str, i64)> = basis
            .iter()
            .find(|(arity, _)| *arity == n)
            .map(|(_, b)| b.to_vec())
            .unwrap_or_default();
        let dim = named.len();
        components.push(Component {
            arity: n,
            names: named.iter().map(|(s, _)| s.to_string()).collect(),
            degrees: named.iter().map(|(_, d)| *d).collect(),
            action: vec![Matrix::identity(ring, dim); n - 1],
            differential: Matrix::zero(ring, dim, dim),
        });
    }
    for &(arity, row, col, c) in differential {
        let comp = &mut components[arity - 1];
        *comp.differential.at_mut(row, col) = Scalar::from_int(ring, c);
    }
    let seq = SymmetricSequence { ring: ring.clone(), arity_cap: cap, components };
    let delta = (1..=cap).map(|n| vec![Vec::new(); seq.dim(n)]).collect();
    let c = CooperadData { seq, delta };
    c.validate()?;
    Ok(c)
}

/// The non-symmetric associative model: one operation per arity, braces
/// given by sums over positions, weighted braces by the shuffle-sum
/// formula. Everything sits in degree zero.
pub struct NsAssoc {
    pub ring: Ring,
    pub cap: usize,
}

/// Coordinates over the arities 2..=cap (index arity - 2).
pub type NsElement = Vec<Scalar>;

impl NsAssoc {
    pub fn new(ring: Ring, cap: usize) -> NsAssoc {
        NsAssoc { ring, cap }
    }

    pub fn basis(&self, arity: usize) -> NsElement {
        let mut v = vec![self.ring.zero(); self.cap - 1];
        v[arity - 2] = self.ring.one();
        v
    }

    /// mu_m <q_1, ..., q_r> = binom(m, r) mu_{m - r + sum}; zero when r > m
    /// or the result exceeds the cap.
    fn brace_op(&self, m: usize, arg_arities: &[usize]) -> Option<(usize, i64)> {
        let r = arg_arities.len();
        if r > m {
            return None;
        }
        let target = m - r + arg_arities.iter().sum::<usize>();
        if target < 2 || target > self.cap {
            return None;
        }
        let mut binom: i64 = 1;
        for i in 0..r {
            binom = binom * (m - i) as i64 / (i + 1) as i64;
        }
        Some((target, binom))
    }
}

impl BracedAlgebra for NsAssoc {
    type Elem = NsElement;

    fn ring(&self) -> &Ring {
        &self.ring
    }
    fn zero(&self) -> NsElement {
        vec![self.ring.zero(); self.cap - 1]
    }
    fn is_zero(&self, e: &NsElement) -> bool {
        e.iter().all(|c| c.is_zero())
    }
    fn add(&self, a: &NsElement, b: &NsElement) -> Result<NsElement> {
        a.iter().zip(b.iter()).map(|(x, y)| x.add(y)).collect()
    }
    fn neg(&self, a: &NsElement) -> NsElement {
        a.iter().map(|x| x.neg()).collect()
    }
    fn scale(&self, c: &Scalar, a: &NsElement) -> Result<NsElement> {
        a.iter().map(|x| c.mul(x)).collect()
    }
    fn brace(&self, x: &NsElement, args: &[(NsElement, u32)]) -> Result<NsElement> {
        let args: Vec<&(NsElement, u32)> = args.iter().filter(|(_, r)| *r > 0).collect();
        if args.is_empty() {
            return Ok(x.clone());
        }
        let mut out = self.zero();
        // expand over arity components of head and arguments; weights split
        // over components
        for (mi, c_head) in x.iter().enumerate() {
            if c_head.is_zero() {
                continue;
            }
            let m = mi + 2;
            // slots: flattened (arity, coeff, weight) per assignment
            fn split(
                alg: &NsAssoc,
                m: usize,
                coeff: &Scalar,
                args: &[&(NsElement, u32)],
                k: usize,
                pos: usize,
                remaining: u32,
                slots: &mut Vec<(usize, u32)>,
                out: &mut NsElement,
            ) -> Result<()> {
                if k == args.len() {
                    // weighted brace of homogeneous pieces: shuffle sum
                    let sizes: Vec<usize> = slots.iter().map(|(_, r)| *r as usize).collect();
                    let copies: Vec<usize> = slots
                        .iter()
                        .flat_map(|(a, r)| std::iter::repeat(*a).take(*r as usize))
                        .collect();
                    let shuffle_count = crate::perm::shuffles(&sizes).len() as i64;
                    if let Some((target, binom)) = alg.brace_op(m, &copies) {
                        let total = coeff
                            .mul(&Scalar::from_int(&alg.ring, binom * shuffle_count))?;
                        out[target - 2] = out[target - 2].add(&total)?;
                    }
                    return Ok(());
                }
                if remaining == 0 {
                    return split(alg, m, coeff, args, k + 1, 0, args.get(k + 1).map(|(_, r)| *r).unwrap_or(0), slots, out);
                }
                if pos + 2 > alg.cap {
                    return Ok(());
                }
                split(alg, m, coeff, args, k, pos + 1, remaining, slots, out)?;
                let c = &args[k].0[pos];
                if c.is_zero() {
                    return Ok(());
                }
                for s in 1..=remaining {
                    let scaled = coeff.mul(&c.pow(s))?;
                    slots.push((pos + 2, s));
                    split(alg, m, &scaled, args, k, pos + 1, remaining - s, slots, out)?;
                    slots.pop();
                }
                Ok(())
            }
            let first_weight = args[0].1;
            split(
                self,
                m,
                c_head,
                &args,
                0,
                0,
                first_weight,
                &mut Vec::new(),
                &mut out,
            )?;
        }
        Ok(out)
    }
    fn differential(&self, _x: &NsElement) -> Result<NsElement> {
        Ok(self.zero())
    }
    fn degree(&self, x: &NsElement) -> Option<i64> {
        if self.is_zero(x) {
            None
        } else {
            Some(0)
        }
    }
    fn degree_component(&self, x: &NsElement, degree: i64) -> NsElement {
        if degree == 0 {
            x.clone()
        } else {
            self.zero()
        }
    }
    fn min_weight(&self, x: &NsElement) -> u32 {
        x.iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, _)| i as u32 + 1)
            .min()
            .unwrap_or(self.weight_cap() + 1)
    }
    fn weight_cap(&self) -> u32 {
        self.cap as u32 - 1
    }
    fn render(&self, x: &NsElement) -> String {
        let parts: Vec<String> = x
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| format!("{}*mu{}", c, i + 2))
            .collect();
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }
    fn component_basis(&self, degree: i64) -> Option<Vec<NsElement>> {
        if degree != 0 {
            return Some(Vec::new());
        }
        Some((2..=self.cap).map(|n| self.basis(n)).collect())
    }
}
