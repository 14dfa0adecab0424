//! Stable LSD radix sort on integer keys.
//!
//! Tuples are sorted by calling [`sort_by_key`] once per component, least
//! significant first. The digit width adapts to the input size so small
//! inputs do not pay for a 64K-entry count table.

fn digit_bits(n: usize) -> u32 {
    let bits = usize::BITS - n.max(2).leading_zeros();
    bits.clamp(4, 16)
}

/// Stable sort of `items` by `key`. Only as many passes as the largest key
/// needs are made.
pub fn sort_by_key<T: Clone, F: Fn(&T) -> u64>(items: &mut Vec<T>, key: F) {
    let n = items.len();
    if n < 2 {
        return;
    }
    let max = items.iter().map(&key).max().unwrap_or(0);
    if max == 0 {
        return;
    }
    let width = digit_bits(n);
    let buckets = 1usize << width;
    let mask = (buckets - 1) as u64;
    let used_bits = u64::BITS - max.leading_zeros();
    let mut buf: Vec<T> = Vec::with_capacity(n);
    let mut count = vec![0usize; buckets];
    let mut shift = 0;
    while shift < used_bits {
        count.iter_mut().for_each(|c| *c = 0);
        for it in items.iter() {
            count[((key(it) >> shift) & mask) as usize] += 1;
        }
        let mut sum = 0;
        for c in count.iter_mut() {
            let here = *c;
            *c = sum;
            sum += here;
        }
        buf.clear();
        let mut order = vec![0usize; n];
        for (i, it) in items.iter().enumerate() {
            let d = ((key(it) >> shift) & mask) as usize;
            order[count[d]] = i;
            count[d] += 1;
        }
        buf.extend(order.iter().map(|&i| items[i].clone()));
        std::mem::swap(items, &mut buf);
        shift += width;
    }
}

/// Number of bits needed to write `x` (0 for 0).
pub fn bit_len(x: u64) -> u32 {
    u64::BITS - x.leading_zeros()
}

/// Sorts integers of varying magnitude: first by bit length, then by value
/// within each length class, so the work is proportional to the total
/// number of bits.
pub fn sort_by_bits(values: &mut Vec<u64>) {
    if values.len() < 2 {
        return;
    }
    let mut by_len: Vec<Vec<u64>> = vec![Vec::new(); 65];
    for &v in values.iter() {
        by_len[bit_len(v) as usize].push(v);
    }
    values.clear();
    for mut class in by_len {
        sort_by_key(&mut class, |&v| v);
        values.extend(class);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sorts_pairs_lexicographically() {
        let mut v = vec![(3u64, 1u64), (1, 9), (3, 0), (1, 2), (0, 70000)];
        sort_by_key(&mut v, |p| p.1);
        sort_by_key(&mut v, |p| p.0);
        assert_eq!(v, vec![(0, 70000), (1, 2), (1, 9), (3, 0), (3, 1)]);
    }

    #[test]
    fn stable_on_equal_keys() {
        let mut v: Vec<(u64, usize)> = (0..50).map(|i| ((i % 3) as u64, i)).collect();
        sort_by_key(&mut v, |p| p.0);
        for w in v.windows(2) {
            assert!(w[0].0 < w[1].0 || (w[0].0 == w[1].0 && w[0].1 < w[1].1));
        }
    }

    proptest! {
        #[test]
        fn matches_std_sort(mut v in proptest::collection::vec(any::<u64>(), 0..300)) {
            let mut expect = v.clone();
            expect.sort();
            sort_by_key(&mut v, |&x| x);
            prop_assert_eq!(v, expect);
        }

        #[test]
        fn bit_sort_matches_std(mut v in proptest::collection::vec(any::<u64>(), 0..200)) {
            let mut expect = v.clone();
            expect.sort();
            sort_by_bits(&mut v);
            prop_assert_eq!(v, expect);
        }
    }
}
