//! The abstract braced-algebra interface and the identity harness.
//!
//! Everything the deformation-theory layer needs from an algebra is
//! captured by [`BracedAlgebra`]: exact linear structure, weighted braces, a
//! differential, degree and filtration queries, and (optionally) finite
//! enumeration of degree components. The free tree algebra, the convolution
//! algebra and truncated-local extensions all implement it, so the identity
//! suite and the gauge machinery are written once.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::perm::{koszul_sign_of_map, Permutation};
use crate::ring::{Ring, Scalar};

/// Exact differential graded algebra with weighted braces and a complete
/// weight filtration.
pub trait BracedAlgebra {
    type Elem: Clone + PartialEq + std::fmt::Debug;

    fn ring(&self) -> &Ring;
    fn zero(&self) -> Self::Elem;
    fn is_zero(&self, e: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem>;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn scale(&self, c: &Scalar, a: &Self::Elem) -> Result<Self::Elem>;
    /// The weighted brace x{y_1, ..., y_n}_{r_1, ..., r_n}.
    fn brace(&self, x: &Self::Elem, args: &[(Self::Elem, u32)]) -> Result<Self::Elem>;
    fn differential(&self, x: &Self::Elem) -> Result<Self::Elem>;
    /// Cohomological degree of a homogeneous nonzero element.
    fn degree(&self, x: &Self::Elem) -> Option<i64>;
    fn degree_component(&self, x: &Self::Elem, degree: i64) -> Self::Elem;
    /// Filtration weight: the smallest filtration stage containing the
    /// element; anything above the cap for zero.
    fn min_weight(&self, x: &Self::Elem) -> u32;
    fn weight_cap(&self) -> u32;
    fn render(&self, x: &Self::Elem) -> String;

    /// Basis of the degree-d component when it is finite dimensional and
    /// enumerable; `None` otherwise.
    fn component_basis(&self, _degree: i64) -> Option<Vec<Self::Elem>> {
        None
    }

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem> {
        self.add(a, &self.neg(b))
    }

    fn star(&self, x: &Self::Elem, y: &Self::Elem) -> Result<Self::Elem> {
        self.brace(x, &[(y.clone(), 1)])
    }
}

impl BracedAlgebra for crate::gamma::GammaAlgebra {
    type Elem = crate::gamma::AlgebraElement;

    fn ring(&self) -> &Ring {
        self.ring()
    }
    fn zero(&self) -> Self::Elem {
        crate::gamma::AlgebraElement::zero()
    }
    fn is_zero(&self, e: &Self::Elem) -> bool {
        e.is_zero()
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem> {
        self.add(a, b)
    }
    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        self.neg(a)
    }
    fn scale(&self, c: &Scalar, a: &Self::Elem) -> Result<Self::Elem> {
        self.scale(c, a)
    }
    fn brace(&self, x: &Self::Elem, args: &[(Self::Elem, u32)]) -> Result<Self::Elem> {
        self.brace(x, args)
    }
    fn differential(&self, x: &Self::Elem) -> Result<Self::Elem> {
        self.differentiate(x)
    }
    fn degree(&self, x: &Self::Elem) -> Option<i64> {
        self.degree(x)
    }
    fn degree_component(&self, x: &Self::Elem, degree: i64) -> Self::Elem {
        self.degree_component(x, degree)
    }
    fn min_weight(&self, x: &Self::Elem) -> u32 {
        x.min_weight(self.spec.weight_cap)
    }
    fn weight_cap(&self) -> u32 {
        self.spec.weight_cap
    }
    fn render(&self, x: &Self::Elem) -> String {
        self.render(x)
    }
    fn component_basis(&self, degree: i64) -> Option<Vec<Self::Elem>> {
        Some(
            self.basis_classes_of_degree(degree)
                .into_iter()
                .map(|c| self.class_element(&c))
                .collect(),
        )
    }
}

/// What an instance generator is asked for.
#[derive(Debug, Clone, Default)]
pub struct SampleReq {
    /// Only even cohomological degree (required for weights >= 2 when the
    /// characteristic is not 2).
    pub even_only: bool,
    /// Match this degree if possible (used by the sum-splitting identity).
    pub same_degree_as: Option<i64>,
}

/// Randomized homogeneous elements of an algebra, for the identity suite.
pub trait InstanceSampler<A: BracedAlgebra> {
    fn sample(&self, alg: &A, rng: &mut ChaCha8Rng, req: &SampleReq) -> A::Elem;

    fn sample_scalar(&self, alg: &A, rng: &mut ChaCha8Rng) -> Scalar {
        Scalar::from_int(alg.ring(), rng.gen_range(-4i64..=4))
    }
}

/// Identity of the weighted-brace axiom suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BraceIdentity {
    Symmetry,
    ZeroWeight,
    Scaling,
    Merge,
    SumSplit,
    Composition,
}

impl BraceIdentity {
    pub const ALL: [BraceIdentity; 6] = [
        BraceIdentity::Symmetry,
        BraceIdentity::ZeroWeight,
        BraceIdentity::Scaling,
        BraceIdentity::Merge,
        BraceIdentity::SumSplit,
        BraceIdentity::Composition,
    ];

    pub fn label(self) -> &'static str {
        match self {
            BraceIdentity::Symmetry => "symmetry",
            BraceIdentity::ZeroWeight => "zero_weight",
            BraceIdentity::Scaling => "scaling",
            BraceIdentity::Merge => "merge",
            BraceIdentity::SumSplit => "sum_split",
            BraceIdentity::Composition => "composition",
        }
    }
}

/// Outcome of running one identity on randomized instances.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityOutcome {
    pub identity: String,
    pub trials: u32,
    pub failures: Vec<String>,
}

impl IdentityOutcome {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Runs one brace identity on `trials` random instances.
pub fn verify_identity<A: BracedAlgebra>(
    alg: &A,
    sampler: &impl InstanceSampler<A>,
    identity: BraceIdentity,
    trials: u32,
    seed: u64,
) -> Result<IdentityOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (identity as u64).wrapping_mul(0x9e3779b97f4a7c15));
    let mut failures = Vec::new();
    for trial in 0..trials {
        if let Some(msg) = run_one(alg, sampler, identity, &mut rng)? {
            failures.push(format!("trial {trial}: {msg}"));
            if failures.len() >= 5 {
                break;
            }
        }
    }
    Ok(IdentityOutcome { identity: identity.label().to_string(), trials, failures })
}

/// Runs the whole suite.
pub fn verify_all_identities<A: BracedAlgebra>(
    alg: &A,
    sampler: &impl InstanceSampler<A>,
    trials: u32,
    seed: u64,
) -> Result<Vec<IdentityOutcome>> {
    BraceIdentity::ALL
        .iter()
        .map(|id| verify_identity(alg, sampler, *id, trials, seed))
        .collect()
}

struct Slot<E> {
    elem: E,
    weight: u32,
    parity_odd: bool,
}

/// Samples a brace argument list respecting the odd-weight convention.
fn sample_args<A: BracedAlgebra>(
    alg: &A,
    sampler: &impl InstanceSampler<A>,
    rng: &mut ChaCha8Rng,
    n: usize,
    max_weight: u32,
) -> Vec<Slot<A::Elem>> {
    let char2 = alg.ring().has_char_two();
    (0..n)
        .map(|_| {
            let mut weight = rng.gen_range(0..=max_weight);
            let want_even = !char2 && weight >= 2;
            let elem = sampler.sample(alg, rng, &SampleReq { even_only: want_even, ..Default::default() });
            let parity_odd = alg.degree(&elem).map(|d| d % 2 != 0).unwrap_or(false);
            if parity_odd && !char2 {
                weight = weight.min(1);
            }
            Slot { elem, weight, parity_odd }
        })
        .collect()
}

fn slots_to_args<E: Clone>(slots: &[Slot<E>]) -> Vec<(E, u32)> {
    slots.iter().map(|s| (s.elem.clone(), s.weight)).collect()
}

fn run_one<A: BracedAlgebra>(
    alg: &A,
    sampler: &impl InstanceSampler<A>,
    identity: BraceIdentity,
    rng: &mut ChaCha8Rng,
) -> Result<Option<String>> {
    let x = sampler.sample(alg, rng, &SampleReq::default());
    match identity {
        BraceIdentity::Symmetry => {
            let n = rng.gen_range(1..=3usize);
            let slots = sample_args(alg, sampler, rng, n, 2);
            // random permutation
            let mut images: Vec<usize> = (1..=n).collect();
            for i in (1..n).rev() {
                let j = rng.gen_range(0..=i);
                images.swap(i, j);
            }
            let sigma = Permutation::from_images(images)?;
            let permuted: Vec<(A::Elem, u32)> = (1..=n)
                .map(|k| {
                    let s = &slots[sigma.apply(k) - 1];
                    (s.elem.clone(), s.weight)
                })
                .collect();
            // Koszul sign on block parities of the permuted sequence.
            let positions: Vec<usize> = (1..=n).map(|k| sigma.apply(k)).collect();
            let parities: Vec<i64> = (1..=n)
                .map(|k| {
                    let s = &slots[sigma.apply(k) - 1];
                    if s.parity_odd && s.weight % 2 == 1 {
                        1
                    } else {
                        0
                    }
                })
                .collect();
            let sign = koszul_sign_of_map(&positions, &parities);
            let lhs = alg.brace(&x, &permuted)?;
            let mut rhs = alg.brace(&x, &slots_to_args(&slots))?;
            if sign < 0 {
                rhs = alg.neg(&rhs);
            }
            Ok(compare(alg, &lhs, &rhs, "symmetry"))
        }
        BraceIdentity::ZeroWeight => {
            let n = rng.gen_range(0..=2usize);
            let slots = sample_args(alg, sampler, rng, n, 2);
            let extra = sampler.sample(alg, rng, &SampleReq::default());
            let mut with: Vec<(A::Elem, u32)> = slots_to_args(&slots);
            let pos = rng.gen_range(0..=with.len());
            with.insert(pos, (extra, 0));
            let lhs = alg.brace(&x, &with)?;
            let rhs = alg.brace(&x, &slots_to_args(&slots))?;
            Ok(compare(alg, &lhs, &rhs, "zero-weight slot"))
        }
        BraceIdentity::Scaling => {
            let n = rng.gen_range(1..=2usize);
            let mut slots = sample_args(alg, sampler, rng, n, 2);
            let lambda = sampler.sample_scalar(alg, rng);
            let k = rng.gen_range(0..slots.len());
            let rhs_base = alg.brace(&x, &slots_to_args(&slots))?;
            let r = slots[k].weight;
            slots[k].elem = alg.scale(&lambda, &slots[k].elem)?;
            let lhs = alg.brace(&x, &slots_to_args(&slots))?;
            let rhs = alg.scale(&lambda.pow(r), &rhs_base)?;
            Ok(compare(alg, &lhs, &rhs, "scaling"))
        }
        BraceIdentity::Merge => {
            let char2 = alg.ring().has_char_two();
            let req = SampleReq { even_only: !char2, ..Default::default() };
            let y = sampler.sample(alg, rng, &req);
            let r = rng.gen_range(0..=2u32);
            let s = rng.gen_range(0..=2u32);
            let n_tail = rng.gen_range(0..=1usize);
            let tail = sample_args(alg, sampler, rng, n_tail, 1);
            let mut split: Vec<(A::Elem, u32)> = vec![(y.clone(), r), (y.clone(), s)];
            split.extend(slots_to_args(&tail));
            let mut merged: Vec<(A::Elem, u32)> = vec![(y.clone(), r + s)];
            merged.extend(slots_to_args(&tail));
            let lhs = alg.brace(&x, &split)?;
            let binom = binomial(r + s, r);
            let rhs = alg.scale(
                &Scalar::from_int(alg.ring(), binom),
                &alg.brace(&x, &merged)?,
            )?;
            Ok(compare(alg, &lhs, &rhs, "merge"))
        }
        BraceIdentity::SumSplit => {
            let char2 = alg.ring().has_char_two();
            let req = SampleReq { even_only: !char2, ..Default::default() };
            let y = sampler.sample(alg, rng, &req);
            let z = sampler.sample(
                alg,
                rng,
                &SampleReq { even_only: !char2, same_degree_as: alg.degree(&y) },
            );
            let r = rng.gen_range(0..=3u32);
            let sum = alg.add(&y, &z)?;
            let lhs = alg.brace(&x, &[(sum, r)])?;
            let mut rhs = alg.zero();
            for s in 0..=r {
                let term = alg.brace(&x, &[(y.clone(), s), (z.clone(), r - s)])?;
                rhs = alg.add(&rhs, &term)?;
            }
            Ok(compare(alg, &lhs, &rhs, "sum split"))
        }
        BraceIdentity::Composition => {
            let n_y = rng.gen_range(1..=2usize);
            let ys = sample_args(alg, sampler, rng, n_y, 2);
            let n_z = rng.gen_range(1..=2usize);
            let zs = sample_args(alg, sampler, rng, n_z, 2);
            let inner = alg.brace(&x, &slots_to_args(&ys))?;
            let lhs = alg.brace(&inner, &slots_to_args(&zs))?;
            let rhs = rhs_vi_integral(alg, &x, &slots_to_args(&ys), &slots_to_args(&zs))?;
            Ok(compare(alg, &lhs, &rhs, "composition"))
        }
    }
}

fn compare<A: BracedAlgebra>(
    alg: &A,
    lhs: &A::Elem,
    rhs: &A::Elem,
    what: &str,
) -> Option<String> {
    if lhs == rhs {
        None
    } else {
        Some(format!(
            "{what}: lhs = {} but rhs = {}",
            alg.render(lhs),
            alg.render(rhs)
        ))
    }
}

fn binomial(n: u32, k: u32) -> i64 {
    let k = k.min(n - k.min(n));
    let mut num: i64 = 1;
    for i in 0..k {
        num = num * (n - i) as i64 / (i + 1) as i64;
    }
    num
}

/// The right-hand side of the brace-composition identity assembled with
/// integer coefficients only: equal inner-argument tuples are grouped and
/// their multiplicity is absorbed into a slot weight, so no division by
/// factorials ever appears.
///
/// Arguments must be homogeneous; odd-degree arguments carry weight <= 1
/// over rings of characteristic != 2, which the grouping preserves.
pub fn rhs_vi_integral<A: BracedAlgebra>(
    alg: &A,
    x: &A::Elem,
    ys: &[(A::Elem, u32)],
    zs: &[(A::Elem, u32)],
) -> Result<A::Elem> {
    let m = zs.len();
    let z_parities: Vec<bool> = zs
        .iter()
        .map(|(z, _)| alg.degree(z).map(|d| d % 2 != 0).unwrap_or(false))
        .collect();

    // All tuples (alpha_1, ..., alpha_m) with alpha_j <= s_j, in
    // lexicographic order so multisets can be canonicalized as weakly
    // increasing sequences.
    let mut tuples: Vec<Vec<u32>> = vec![vec![]];
    for (_, s) in zs {
        let mut next = Vec::new();
        for t in &tuples {
            for a in 0..=*s {
                let mut t2 = t.clone();
                t2.push(a);
                next.push(t2);
            }
        }
        tuples = next;
    }

    // Per head argument: all multisets of r_i tuples, written as weakly
    // increasing index sequences with counts.
    fn multisets(
        tuples: &[Vec<u32>],
        start: usize,
        remaining: u32,
        acc: &mut Vec<(usize, u32)>,
        out: &mut Vec<Vec<(usize, u32)>>,
    ) {
        if remaining == 0 {
            out.push(acc.clone());
            return;
        }
        for idx in start..tuples.len() {
            for count in 1..=remaining {
                acc.push((idx, count));
                multisets(tuples, idx + 1, remaining - count, acc, out);
                acc.pop();
            }
        }
    }

    let mut per_y: Vec<Vec<Vec<(usize, u32)>>> = Vec::new();
    for (_, r) in ys {
        let mut out = Vec::new();
        multisets(&tuples, 0, *r, &mut Vec::new(), &mut out);
        per_y.push(out);
    }

    let mut total = alg.zero();
    let mut combo = vec![0usize; ys.len()];
    'outer: loop {
        // Budget check: beta_j = s_j - used_j must be nonnegative.
        let mut used = vec![0u32; m];
        for (i, &ci) in combo.iter().enumerate() {
            for &(idx, count) in &per_y[i][ci] {
                for j in 0..m {
                    used[j] += count * tuples[idx][j];
                }
            }
        }
        let feasible = (0..m).all(|j| used[j] <= zs[j].1);
        if feasible {
            let betas: Vec<u32> = (0..m).map(|j| zs[j].1 - used[j]).collect();
            // sign: redistribute the z blocks from reference order
            // z_1^{s_1} ... z_m^{s_m} to the grouped order.
            let sign = vi_term_sign(zs, &z_parities, &combo, &per_y, &tuples, &betas);
            // assemble the outer brace slots
            let mut slots: Vec<(A::Elem, u32)> = Vec::new();
            for (i, &ci) in combo.iter().enumerate() {
                for &(idx, count) in &per_y[i][ci] {
                    let inner_args: Vec<(A::Elem, u32)> = zs
                        .iter()
                        .zip(tuples[idx].iter())
                        .map(|((z, _), &a)| (z.clone(), a))
                        .collect();
                    let inner = alg.brace(&ys[i].0, &inner_args)?;
                    slots.push((inner, count));
                }
            }
            for (j, &beta) in betas.iter().enumerate() {
                slots.push((zs[j].0.clone(), beta));
            }
            let mut term = alg.brace(x, &slots)?;
            if sign < 0 {
                term = alg.neg(&term);
            }
            total = alg.add(&total, &term)?;
        }
        // advance combo
        let mut k = 0;
        loop {
            if k == combo.len() {
                break 'outer;
            }
            combo[k] += 1;
            if combo[k] < per_y[k].len() {
                break;
            }
            combo[k] = 0;
            k += 1;
        }
        if combo.is_empty() {
            break;
        }
    }
    Ok(total)
}

/// Koszul sign of redistributing z-copies from z_1^{s_1}...z_m^{s_m} into
/// the grouped inner-brace order followed by the leftover block.
fn vi_term_sign(
    zs: &[(impl Sized, u32)],
    z_parities: &[bool],
    combo: &[usize],
    per_y: &[Vec<Vec<(usize, u32)>>],
    tuples: &[Vec<u32>],
    betas: &[u32],
) -> i64 {
    let m = zs.len();
    // target sequence of z indices
    let mut target: Vec<usize> = Vec::new();
    for (i, &ci) in combo.iter().enumerate() {
        for &(idx, count) in &per_y[i][ci] {
            for _ in 0..count {
                for (j, &a) in tuples[idx].iter().enumerate() {
                    for _ in 0..a {
                        target.push(j);
                    }
                }
            }
        }
    }
    for (j, &beta) in betas.iter().enumerate() {
        for _ in 0..beta {
            target.push(j);
        }
    }
    // reference copy k of z_j goes to the k-th occurrence of j in target
    let mut positions: Vec<usize> = Vec::new();
    let mut parities: Vec<i64> = Vec::new();
    for j in 0..m {
        let mut occurrences = target.iter().enumerate().filter(|(_, &v)| v == j);
        for _ in 0..zs[j].1 {
            let (pos, _) = occurrences.next().expect("counts add up");
            positions.push(pos);
            parities.push(if z_parities[j] { 1 } else { 0 });
        }
    }
    koszul_sign_of_map(&positions, &parities)
}

/// A finite graded chain complex regarded as a braced algebra with all
/// braces of positive total weight equal to zero. Useful both as an oracle
/// (the deformation theory linearizes) and as an acyclic direct summand.
pub struct AbelianChain {
    ring: Ring,
    names: Vec<String>,
    degrees: Vec<i64>,
    /// differential rows: index -> list of (target index, coefficient)
    d: Vec<Vec<(usize, Scalar)>>,
}

/// Elements are coordinate vectors over the chain basis.
pub type ChainElement = Vec<Scalar>;

impl AbelianChain {
    pub fn new(
        ring: Ring,
        basis: &[(&str, i64)],
        differential: &[(&str, &[(&str, i64)])],
    ) -> Result<AbelianChain> {
        ring.validate()?;
        let names: Vec<String> = basis.iter().map(|(n, _)| n.to_string()).collect();
        let degrees: Vec<i64> = basis.iter().map(|(_, d)| *d).collect();
        let index = |n: &str| -> Result<usize> {
            names
                .iter()
                .position(|m| m == n)
                .ok_or_else(|| Error::UnknownGenerator(n.to_string()))
        };
        let mut d = vec![Vec::new(); names.len()];
        for (src, image) in differential {
            let s = index(src)?;
            for (tgt, c) in image.iter() {
                let t = index(tgt)?;
                if degrees[t] != degrees[s] + 1 {
                    return Err(Error::InvalidDifferential(format!(
                        "d({src}) hits {tgt} of the wrong degree"
                    )));
                }
                d[s].push((t, Scalar::from_int(&ring, *c)));
            }
        }
        let chain = AbelianChain { ring, names, degrees, d };
        // d^2 = 0
        for i in 0..chain.names.len() {
            let mut e = chain.zero();
            e[i] = chain.ring.one();
            let dd = chain.differential(&chain.differential(&e)?)?;
            if !chain.is_zero(&dd) {
                return Err(Error::InvalidDifferential(format!(
                    "d^2 != 0 on {}",
                    chain.names[i]
                )));
            }
        }
        Ok(chain)
    }

    pub fn basis_element(&self, name: &str) -> Result<ChainElement> {
        let i = self
            .names
            .iter()
            .position(|m| m == name)
            .ok_or_else(|| Error::UnknownGenerator(name.to_string()))?;
        let mut e = self.zero();
        e[i] = self.ring.one();
        Ok(e)
    }
}

impl BracedAlgebra for AbelianChain {
    type Elem = ChainElement;

    fn ring(&self) -> &Ring {
        &self.ring
    }
    fn zero(&self) -> ChainElement {
        vec![self.ring.zero(); self.names.len()]
    }
    fn is_zero(&self, e: &ChainElement) -> bool {
        e.iter().all(|c| c.is_zero())
    }
    fn add(&self, a: &ChainElement, b: &ChainElement) -> Result<ChainElement> {
        a.iter().zip(b.iter()).map(|(x, y)| x.add(y)).collect()
    }
    fn neg(&self, a: &ChainElement) -> ChainElement {
        a.iter().map(|x| x.neg()).collect()
    }
    fn scale(&self, c: &Scalar, a: &ChainElement) -> Result<ChainElement> {
        a.iter().map(|x| c.mul(x)).collect()
    }
    fn brace(&self, x: &ChainElement, args: &[(ChainElement, u32)]) -> Result<ChainElement> {
        // All braces with positive total weight vanish; weight-zero slots
        // are dropped, leaving x itself.
        if args.iter().all(|(_, r)| *r == 0) {
            Ok(x.clone())
        } else {
            Ok(self.zero())
        }
    }
    fn differential(&self, x: &ChainElement) -> Result<ChainElement> {
        let mut out = self.zero();
        for (i, c) in x.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (t, coeff) in &self.d[i] {
                out[*t] = out[*t].add(&c.mul(coeff)?)?;
            }
        }
        Ok(out)
    }
    fn degree(&self, x: &ChainElement) -> Option<i64> {
        let mut deg = None;
        for (i, c) in x.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            match deg {
                None => deg = Some(self.degrees[i]),
                Some(d) if d != self.degrees[i] => return None,
                _ => {}
            }
        }
        deg
    }
    fn degree_component(&self, x: &ChainElement, degree: i64) -> ChainElement {
        x.iter()
            .enumerate()
            .map(|(i, c)| if self.degrees[i] == degree { c.clone() } else { self.ring.zero() })
            .collect()
    }
    fn min_weight(&self, x: &ChainElement) -> u32 {
        if self.is_zero(x) {
            self.weight_cap() + 1
        } else {
            1
        }
    }
    fn weight_cap(&self) -> u32 {
        6
    }
    fn render(&self, x: &ChainElement) -> String {
        let parts: Vec<String> = x
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| format!("{}*{}", c, self.names[i]))
            .collect();
        if parts.is_empty() {
            "0".to_string()
        } else {
            parts.join(" + ")
        }
    }
    fn component_basis(&self, degree: i64) -> Option<Vec<ChainElement>> {
        Some(
            (0..self.names.len())
                .filter(|&i| self.degrees[i] == degree)
                .map(|i| {
                    let mut e = self.zero();
                    e[i] = self.ring.one();
                    e
                })
                .collect(),
        )
    }
}

/// The direct sum of two braced algebras with componentwise braces.
pub struct DirectSum<'a, A: BracedAlgebra, B: BracedAlgebra> {
    pub left: &'a A,
    pub right: &'a B,
}

impl<'a, A: BracedAlgebra, B: BracedAlgebra> DirectSum<'a, A, B> {
    pub fn new(left: &'a A, right: &'a B) -> Result<Self> {
        if left.ring() != right.ring() {
            return Err(Error::RingMismatch(left.ring().to_string(), right.ring().to_string()));
        }
        Ok(DirectSum { left, right })
    }

    pub fn inject_left(&self, x: &A::Elem) -> (A::Elem, B::Elem) {
        (x.clone(), self.right.zero())
    }
}

impl<'a, A: BracedAlgebra, B: BracedAlgebra> BracedAlgebra for DirectSum<'a, A, B> {
    type Elem = (A::Elem, B::Elem);

    fn ring(&self) -> &Ring {
        self.left.ring()
    }
    fn zero(&self) -> Self::Elem {
        (self.left.zero(), self.right.zero())
    }
    fn is_zero(&self, e: &Self::Elem) -> bool {
        self.left.is_zero(&e.0) && self.right.is_zero(&e.1)
    }
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem> {
        Ok((self.left.add(&a.0, &b.0)?, self.right.add(&a.1, &b.1)?))
    }
    fn neg(&self, a: &Self::Elem) -> Self::Elem {
        (self.left.neg(&a.0), self.right.neg(&a.1))
    }
    fn scale(&self, c: &Scalar, a: &Self::Elem) -> Result<Self::Elem> {
        Ok((self.left.scale(c, &a.0)?, self.right.scale(c, &a.1)?))
    }
    fn brace(&self, x: &Self::Elem, args: &[(Self::Elem, u32)]) -> Result<Self::Elem> {
        let left_args: Vec<(A::Elem, u32)> =
            args.iter().map(|(e, r)| (e.0.clone(), *r)).collect();
        let right_args: Vec<(B::Elem, u32)> =
            args.iter().map(|(e, r)| (e.1.clone(), *r)).collect();
        Ok((self.left.brace(&x.0, &left_args)?, self.right.brace(&x.1, &right_args)?))
    }
    fn differential(&self, x: &Self::Elem) -> Result<Self::Elem> {
        Ok((self.left.differential(&x.0)?, self.right.differential(&x.1)?))
    }
    fn degree(&self, x: &Self::Elem) -> Option<i64> {
        match (
            self.left.is_zero(&x.0),
            self.right.is_zero(&x.1),
            self.left.degree(&x.0),
            self.right.degree(&x.1),
        ) {
            (true, true, _, _) => None,
            (false, true, d, _) => d,
            (true, false, _, d) => d,
            (false, false, Some(a), Some(b)) if a == b => Some(a),
            _ => None,
        }
    }
    fn degree_component(&self, x: &Self::Elem, degree: i64) -> Self::Elem {
        (
            self.left.degree_component(&x.0, degree),
            self.right.degree_component(&x.1, degree),
        )
    }
    fn min_weight(&self, x: &Self::Elem) -> u32 {
        self.left.min_weight(&x.0).min(self.right.min_weight(&x.1))
    }
    fn weight_cap(&self) -> u32 {
        self.left.weight_cap().min(self.right.weight_cap())
    }
    fn render(&self, x: &Self::Elem) -> String {
        format!("({}; {})", self.left.render(&x.0), self.right.render(&x.1))
    }
    fn component_basis(&self, degree: i64) -> Option<Vec<Self::Elem>> {
        let l = self.left.component_basis(degree)?;
        let r = self.right.component_basis(degree)?;
        let mut out: Vec<Self::Elem> =
            l.into_iter().map(|e| (e, self.right.zero())).collect();
        out.extend(r.into_iter().map(|e| (self.left.zero(), e)));
        Some(out)
    }
}

/// The graded symmetric-brace recursion from the pre-Lie structure alone:
/// a{b_1,...,b_n} = a{b_1,...,b_{n-1}}{b_n}
///                  - sum_i +- a{b_1,...,b_i{b_n},...,b_{n-1}},
/// the sign moving b_n past b_{i+1},...,b_{n-1}. Used as the
/// characteristic-zero oracle: over the rationals, prod r_i! times the
/// divided brace equals this recursion on the expanded argument list.
pub fn symmetric_brace_recursion<A: BracedAlgebra>(
    alg: &A,
    x: &A::Elem,
    ys: &[A::Elem],
) -> Result<A::Elem> {
    match ys.len() {
        0 => Ok(x.clone()),
        1 => alg.star(x, &ys[0]),
        n => {
            let body = &ys[..n - 1];
            let last = &ys[n - 1];
            let head = symmetric_brace_recursion(alg, x, body)?;
            let mut out = alg.star(&head, last)?;
            let last_deg = alg.degree(last).unwrap_or(0);
            for i in 0..n - 1 {
                let mut modified: Vec<A::Elem> = body.to_vec();
                modified[i] = alg.star(&body[i], last)?;
                let passed: i64 = body[i + 1..]
                    .iter()
                    .map(|b| alg.degree(b).unwrap_or(0))
                    .sum();
                let mut term = symmetric_brace_recursion(alg, x, &modified)?;
                if (last_deg * passed) % 2 != 0 {
                    term = alg.neg(&term);
                }
                out = alg.sub(&out, &term)?;
            }
            Ok(out)
        }
    }
}
