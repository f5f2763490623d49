//! LSD radix sorting on order-preserving `u64` keys.

const BITS: u32 = 11;
const BUCKETS: usize = 1 << BITS;
const MASK: u64 = (BUCKETS as u64) - 1;

/// Maps a finite `f64` to a `u64` whose unsigned order matches the numeric
/// order. `-0.0` and `0.0` map to the same key.
#[inline]
pub(crate) fn ordered_key(x: f64) -> u64 {
    let bits = (x + 0.0).to_bits();
    if bits >> 63 == 1 {
        !bits
    } else {
        bits | (1 << 63)
    }
}

/// Lowest key bit examined by the radix passes; three 11-bit passes cover
/// bits 31..64. Keys agreeing on those bits are ordered afterwards.
const LOW: u32 = 64 - 3 * BITS;
const SMALL: usize = 64;
const SHORT_RUN: usize = 32;

#[inline]
fn digit(k: u64, shift: u32) -> usize {
    ((k >> shift) & MASK) as usize
}

/// Exclusive prefix sums of a histogram; `false` when every key falls in
/// the same bucket (the pass would be the identity).
#[inline]
fn prefix(counts: &mut [usize; BUCKETS], first: usize, n: usize) -> bool {
    if counts[first] == n {
        return false;
    }
    let mut total = 0;
    for c in counts.iter_mut() {
        let here = *c;
        *c = total;
        total += here;
    }
    true
}

/// Sorts `keys` ascending. `scratch` is resized as needed.
pub(crate) fn sort_keys(keys: &mut Vec<u64>, scratch: &mut Vec<u64>) {
    let n = keys.len();
    if n < SMALL {
        keys.sort_unstable();
        return;
    }
    scratch.clear();
    scratch.resize(n, 0);
    let mut counts = [0usize; BUCKETS];
    for shift in [LOW, LOW + BITS, LOW + 2 * BITS] {
        counts.fill(0);
        for &k in keys.iter() {
            counts[digit(k, shift)] += 1;
        }
        if !prefix(&mut counts, digit(keys[0], shift), n) {
            continue;
        }
        for &k in keys.iter() {
            let b = digit(k, shift);
            scratch[counts[b]] = k;
            counts[b] += 1;
        }
        std::mem::swap(keys, scratch);
    }
    let mut start = 0;
    while start < n {
        let head = keys[start] >> LOW;
        let mut end = start + 1;
        while end < n && keys[end] >> LOW == head {
            end += 1;
        }
        if end - start > 1 {
            keys[start..end].sort_unstable();
        }
        start = end;
    }
}

/// Sorts `(keys, idx)` pairs by key ascending; equal keys keep their input
/// order.
pub(crate) fn sort_pairs(
    keys: &mut Vec<u64>,
    idx: &mut Vec<u32>,
    scratch_keys: &mut Vec<u64>,
    scratch_idx: &mut Vec<u32>,
) {
    debug_assert_eq!(keys.len(), idx.len());
    let n = keys.len();
    if n < SMALL {
        let mut pairs: Vec<(u64, u32)> = keys.iter().copied().zip(idx.iter().copied()).collect();
        pairs.sort_by_key(|p| p.0);
        for (pos, (k, i)) in pairs.into_iter().enumerate() {
            keys[pos] = k;
            idx[pos] = i;
        }
        return;
    }
    scratch_keys.clear();
    scratch_keys.resize(n, 0);
    scratch_idx.clear();
    scratch_idx.resize(n, 0);
    let mut counts = [0usize; BUCKETS];
    for shift in [LOW, LOW + BITS, LOW + 2 * BITS] {
        counts.fill(0);
        for &k in keys.iter() {
            counts[digit(k, shift)] += 1;
        }
        if !prefix(&mut counts, digit(keys[0], shift), n) {
            continue;
        }
        for (&k, &i) in keys.iter().zip(idx.iter()) {
            let b = digit(k, shift);
            scratch_keys[counts[b]] = k;
            scratch_idx[counts[b]] = i;
            counts[b] += 1;
        }
        std::mem::swap(keys, scratch_keys);
        std::mem::swap(idx, scratch_idx);
    }
    let mut start = 0;
    while start < n {
        let head = keys[start] >> LOW;
        let mut end = start + 1;
        while end < n && keys[end] >> LOW == head {
            end += 1;
        }
        if end - start <= SHORT_RUN {
            for a in start + 1..end {
                let (k, i) = (keys[a], idx[a]);
                let mut b = a;
                while b > start && keys[b - 1] > k {
                    keys[b] = keys[b - 1];
                    idx[b] = idx[b - 1];
                    b -= 1;
                }
                keys[b] = k;
                idx[b] = i;
            }
        } else {
            let mut run: Vec<(u64, u32)> =
                (start..end).map(|p| (keys[p], idx[p])).collect();
            run.sort_by_key(|p| p.0);
            for (off, (k, i)) in run.into_iter().enumerate() {
                keys[start + off] = k;
                idx[start + off] = i;
            }
        }
        start = end;
    }
}
