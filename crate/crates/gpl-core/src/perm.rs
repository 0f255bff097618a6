//! Symmetric-group elements, shuffle enumeration and Koszul signs.
//!
//! Permutations use one-line notation with 1-based slots. A permutation of
//! size n maps slot i to `images[i-1]`. Shuffle enumerations are returned in
//! lexicographic order of the one-line notation so that downstream sums are
//! reproducible bit for bit.

use crate::error::{Error, Result};

/// A permutation of {1, ..., n} in one-line notation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation { images: (1..=n).collect() }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &v in &images {
            if v == 0 || v > n || seen[v - 1] {
                return Err(Error::SizeMismatch(format!("{images:?} is not a permutation")));
            }
            seen[v - 1] = true;
        }
        Ok(Permutation { images })
    }

    pub fn size(&self) -> usize {
        self.images.len()
    }

    /// Image of the 1-based slot i.
    pub fn apply(&self, i: usize) -> usize {
        self.images[i - 1]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.size()];
        for (i, &v) in self.images.iter().enumerate() {
            images[v - 1] = i + 1;
        }
        Permutation { images }
    }

    /// Group composition: (self * other)(i) = self(other(i)).
    pub fn compose(&self, other: &Permutation) -> Result<Permutation> {
        if self.size() != other.size() {
            return Err(Error::SizeMismatch(format!(
                "composing sizes {} and {}",
                self.size(),
                other.size()
            )));
        }
        Ok(Permutation {
            images: (1..=self.size()).map(|i| self.apply(other.apply(i))).collect(),
        })
    }

    /// The transposition (i j) in the symmetric group of size n.
    pub fn transposition(n: usize, i: usize, j: usize) -> Permutation {
        let mut images: Vec<usize> = (1..=n).collect();
        images.swap(i - 1, j - 1);
        Permutation { images }
    }

    /// Sign of the permutation (parity of inversions).
    pub fn sign(&self) -> i64 {
        let mut inv = 0usize;
        for i in 0..self.size() {
            for j in i + 1..self.size() {
                if self.images[i] > self.images[j] {
                    inv += 1;
                }
            }
        }
        if inv % 2 == 0 {
            1
        } else {
            -1
        }
    }

    /// Block sum tau_1 + ... + tau_k acting on consecutive blocks.
    pub fn direct_sum(parts: &[Permutation]) -> Permutation {
        let mut images = Vec::new();
        let mut offset = 0;
        for p in parts {
            for i in 1..=p.size() {
                images.push(offset + p.apply(i));
            }
            offset += p.size();
        }
        Permutation { images }
    }

    /// The permutation of {1..sum(sizes)} that permutes consecutive blocks of
    /// the given sizes the way `self` permutes {1..k}: block j moves to the
    /// position that block slot self(j) occupies in the rearranged order.
    pub fn block_permutation(&self, sizes: &[usize]) -> Result<Permutation> {
        if self.size() != sizes.len() {
            return Err(Error::SizeMismatch(format!(
                "block permutation of {} blocks with {} sizes",
                self.size(),
                sizes.len()
            )));
        }
        // Start offset of each block in the source.
        let mut src_start = vec![0usize; sizes.len()];
        for j in 1..sizes.len() {
            src_start[j] = src_start[j - 1] + sizes[j - 1];
        }
        // In the target, position of block b is determined by reading blocks
        // in the order sigma^{-1}(1), sigma^{-1}(2), ...
        let inv = self.inverse();
        let order: Vec<usize> = (1..=sizes.len()).map(|i| inv.apply(i) - 1).collect();
        let mut dst_start = vec![0usize; sizes.len()];
        let mut acc = 0;
        for &b in &order {
            dst_start[b] = acc;
            acc += sizes[b];
        }
        let total: usize = sizes.iter().sum();
        let mut images = vec![0usize; total];
        for (b, &sz) in sizes.iter().enumerate() {
            for k in 0..sz {
                images[src_start[b] + k] = dst_start[b] + k + 1;
            }
        }
        Ok(Permutation { images })
    }
}

/// All shuffle permutations of type (r_1, ..., r_n): permutations that are
/// increasing on each consecutive block of the given lengths. The count is
/// the multinomial coefficient.
pub fn shuffles(block_sizes: &[usize]) -> Vec<Permutation> {
    let total: usize = block_sizes.iter().sum();
    let mut out = Vec::new();
    let mut images = vec![0usize; total];
    let mut used = vec![false; total];
    assign_block(block_sizes, 0, 0, &mut images, &mut used, &mut out, total);
    out.sort();
    out
}

fn assign_block(
    sizes: &[usize],
    block: usize,
    start: usize,
    images: &mut Vec<usize>,
    used: &mut Vec<bool>,
    out: &mut Vec<Permutation>,
    total: usize,
) {
    if block == sizes.len() {
        out.push(Permutation { images: images.clone() });
        return;
    }
    let size = sizes[block];
    // Choose an increasing image sequence for this block.
    let free: Vec<usize> = (1..=total).filter(|&v| !used[v - 1]).collect();
    for combo in combinations(&free, size) {
        for (k, &v) in combo.iter().enumerate() {
            images[start + k] = v;
            used[v - 1] = true;
        }
        assign_block(sizes, block + 1, start + size, images, used, out, total);
        for &v in &combo {
            used[v - 1] = false;
        }
    }
}

/// k-subsets of `items` in lexicographic order, preserving item order.
pub fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(k);
    fn rec(items: &[usize], k: usize, start: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == k {
            out.push(current.clone());
            return;
        }
        let remaining = k - current.len();
        for i in start..=items.len().saturating_sub(remaining) {
            current.push(items[i]);
            rec(items, k, i + 1, current, out);
            current.pop();
        }
    }
    if k <= items.len() {
        rec(items, k, 0, &mut current, &mut out);
    }
    out
}

/// The pointed shuffles: shuffles whose block-leader images increase. Each
/// block must be nonempty for the leaders to be defined.
pub fn pointed_shuffles(block_sizes: &[usize]) -> Result<Vec<Permutation>> {
    if block_sizes.iter().any(|&r| r == 0) {
        return Err(Error::EmptyBlock);
    }
    let mut leader_slots = Vec::with_capacity(block_sizes.len());
    let mut acc = 1;
    for &r in block_sizes {
        leader_slots.push(acc);
        acc += r;
    }
    Ok(shuffles(block_sizes)
        .into_iter()
        .filter(|s| {
            leader_slots.windows(2).all(|w| s.apply(w[0]) < s.apply(w[1]))
        })
        .collect())
}

/// Koszul sign of applying `p` to a tensor with the given cohomological
/// degrees: -1 to the number of inversion pairs whose slots both carry odd
/// degree.
pub fn koszul_sign(p: &Permutation, degrees: &[i64]) -> Result<i64> {
    if p.size() != degrees.len() {
        return Err(Error::SizeMismatch(format!(
            "permutation size {} vs {} degrees",
            p.size(),
            degrees.len()
        )));
    }
    let mut sign = 1i64;
    for i in 0..degrees.len() {
        for j in i + 1..degrees.len() {
            if p.images[i] > p.images[j] && degrees[i] % 2 != 0 && degrees[j] % 2 != 0 {
                sign = -sign;
            }
        }
    }
    Ok(sign)
}

/// Koszul sign directly from a slot -> position map (not necessarily the
/// one-line encoding of a `Permutation`); used by the brace accumulator
/// where positions are labels.
pub fn koszul_sign_of_map(positions: &[usize], degrees: &[i64]) -> i64 {
    let mut sign = 1i64;
    for i in 0..positions.len() {
        for j in i + 1..positions.len() {
            if positions[i] > positions[j] && degrees[i] % 2 != 0 && degrees[j] % 2 != 0 {
                sign = -sign;
            }
        }
    }
    sign
}

/// Unique factorization sigma = sh . (tau_1 + ... + tau_n) with `sh` a shuffle
/// of the given type and each tau_i a permutation of one block.
pub fn factor_by_blocks(
    sigma: &Permutation,
    block_sizes: &[usize],
) -> Result<(Permutation, Vec<Permutation>)> {
    let total: usize = block_sizes.iter().sum();
    if sigma.size() != total {
        return Err(Error::SizeMismatch(format!(
            "permutation size {} vs blocks totalling {}",
            sigma.size(),
            total
        )));
    }
    let mut shuffle_images = vec![0usize; total];
    let mut taus = Vec::with_capacity(block_sizes.len());
    let mut start = 0usize;
    for &size in block_sizes {
        let slots: Vec<usize> = (start + 1..=start + size).collect();
        let mut imgs: Vec<usize> = slots.iter().map(|&s| sigma.apply(s)).collect();
        let mut sorted = imgs.clone();
        sorted.sort_unstable();
        // The shuffle sends this block to its image set in increasing order;
        // tau is the leftover reordering inside the block.
        for (k, &slot) in slots.iter().enumerate() {
            shuffle_images[slot - 1] = sorted[k];
        }
        let tau: Vec<usize> = imgs
            .iter()
            .map(|v| sorted.iter().position(|w| w == v).unwrap() + 1)
            .collect();
        imgs.clear();
        taus.push(Permutation::from_images(tau)?);
        start += size;
    }
    let sh = Permutation { images: shuffle_images };
    Ok((sh, taus))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn factorial(n: usize) -> usize {
        (1..=n).product()
    }

    fn multinomial(sizes: &[usize]) -> usize {
        let total: usize = sizes.iter().sum();
        let mut v = factorial(total);
        for &s in sizes {
            v /= factorial(s);
        }
        v
    }

    #[test]
    fn shuffle_examples() {
        assert_eq!(shuffles(&[1, 1]).len(), 2);
        assert_eq!(shuffles(&[0, 3]).len(), 1);
        assert_eq!(shuffles(&[0, 3])[0], Permutation::identity(3));

        // Oracle for (2,1): enumerate all of S_3 and filter by block-order
        // preservation.
        let mut expected = Vec::new();
        for a in 1..=3 {
            for b in 1..=3 {
                for c in 1..=3 {
                    if let Ok(p) = Permutation::from_images(vec![a, b, c]) {
                        if p.apply(1) < p.apply(2) {
                            expected.push(p);
                        }
                    }
                }
            }
        }
        expected.sort();
        assert_eq!(shuffles(&[2, 1]), expected);
        assert_eq!(shuffles(&[2, 1]).len(), 3);
    }

    #[test]
    fn pointed_shuffle_examples() {
        assert_eq!(pointed_shuffles(&[1, 1]).unwrap(), vec![Permutation::identity(2)]);
        assert_eq!(pointed_shuffles(&[1, 1, 1]).unwrap(), vec![Permutation::identity(3)]);
        assert_eq!(pointed_shuffles(&[2, 1]).unwrap().len(), 2);
        assert_eq!(pointed_shuffles(&[1, 2]).unwrap().len(), 1);
        assert!(matches!(pointed_shuffles(&[1, 0]), Err(Error::EmptyBlock)));
    }

    #[test]
    fn shuffle_counts_are_multinomial() {
        let cases: [&[usize]; 7] =
            [&[2, 2], &[3, 2], &[1, 1, 2], &[2, 2, 2], &[4, 2], &[1, 3, 2], &[8]];
        for sizes in cases {
            assert_eq!(shuffles(sizes).len(), multinomial(sizes), "type {sizes:?}");
        }
    }

    #[test]
    fn pointed_shuffles_tile_the_shuffles() {
        // Summing |Sh*| over all orderings of the blocks recovers |Sh|.
        fn perms_of(v: &[usize]) -> Vec<Vec<usize>> {
            if v.len() <= 1 {
                return vec![v.to_vec()];
            }
            let mut out = Vec::new();
            for i in 0..v.len() {
                let mut rest = v.to_vec();
                let head = rest.remove(i);
                for mut tail in perms_of(&rest) {
                    tail.insert(0, head);
                    out.push(tail);
                }
            }
            out
        }
        let cases: [&[usize]; 5] = [&[1, 2], &[2, 2], &[1, 1, 3], &[2, 2, 3], &[1, 2, 4]];
        for sizes in cases {
            let total: usize = perms_of(sizes)
                .into_iter()
                .map(|order| pointed_shuffles(&order).unwrap().len())
                .sum();
            assert_eq!(total, shuffles(sizes).len(), "type {sizes:?}");
        }
    }

    #[test]
    fn koszul_sign_examples() {
        let swap = Permutation::transposition(2, 1, 2);
        assert_eq!(koszul_sign(&swap, &[1, 1]).unwrap(), -1);
        assert_eq!(koszul_sign(&Permutation::identity(2), &[1, 1]).unwrap(), 1);
        assert_eq!(koszul_sign(&swap, &[1, 0]).unwrap(), 1);
    }

    #[test]
    fn factor_by_blocks_examples() {
        let id = Permutation::identity(3);
        let (sh, taus) = factor_by_blocks(&id, &[2, 1]).unwrap();
        assert_eq!(sh, id);
        assert!(taus.iter().all(|t| *t == Permutation::identity(t.size())));

        // A single block leaves everything in the block part.
        let sigma = Permutation::from_images(vec![3, 1, 2]).unwrap();
        let (sh, taus) = factor_by_blocks(&sigma, &[3]).unwrap();
        assert_eq!(sh, Permutation::identity(3));
        assert_eq!(taus[0], sigma);

        let sigma = Permutation::from_images(vec![2, 1, 3]).unwrap();
        let (sh, taus) = factor_by_blocks(&sigma, &[2, 1]).unwrap();
        assert_eq!(sh, Permutation::identity(3));
        assert_eq!(taus[0], Permutation::transposition(2, 1, 2));
        assert_eq!(taus[1], Permutation::identity(1));
    }

    fn arb_perm(n: usize) -> impl Strategy<Value = Permutation> {
        Just(()).prop_perturb(move |_, mut rng| {
            let mut v: Vec<usize> = (1..=n).collect();
            for i in (1..n).rev() {
                let j = (rng.next_u32() as usize) % (i + 1);
                v.swap(i, j);
            }
            Permutation { images: v }
        })
    }

    proptest! {
        #[test]
        fn factorization_round_trips(sigma in arb_perm(6)) {
            for sizes in [[2usize, 2, 2], [1, 2, 3], [3, 2, 1]] {
                let (sh, taus) = factor_by_blocks(&sigma, &sizes).unwrap();
                // sh is a shuffle of the right type.
                prop_assert!(shuffles(&sizes).contains(&sh));
                let recomposed = sh.compose(&Permutation::direct_sum(&taus)).unwrap();
                prop_assert_eq!(recomposed, sigma.clone());
            }
        }

        #[test]
        fn koszul_cocycle_identity(s in arb_perm(5), t in arb_perm(5), bits in 0u32..32) {
            let degrees: Vec<i64> = (0..5).map(|i| ((bits >> i) & 1) as i64).collect();
            let st = s.compose(&t).unwrap();
            // t acts on the degree sequence first.
            let mut t_degrees = vec![0i64; 5];
            for i in 1..=5 {
                t_degrees[t.apply(i) - 1] = degrees[i - 1];
            }
            let lhs = koszul_sign(&st, &degrees).unwrap();
            let rhs = koszul_sign(&s, &t_degrees).unwrap() * koszul_sign(&t, &degrees).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn every_pointed_shuffle_is_a_shuffle(a in 1usize..4, b in 1usize..4, c in 1usize..3) {
            let sizes = [a, b, c];
            let all = shuffles(&sizes);
            for p in pointed_shuffles(&sizes).unwrap() {
                prop_assert!(all.contains(&p));
            }
        }
    }
}
