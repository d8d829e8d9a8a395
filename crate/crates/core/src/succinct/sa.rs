//! Suffix array by prefix doubling.

/// Suffix array of `text`. Symbols compare as integers; the caller is
/// responsible for terminating the text with a unique smallest symbol.
pub fn suffix_array(text: &[u32]) -> Vec<u32> {
    let n = text.len();
    assert!(
        n < u32::MAX as usize,
        "text too long for 32-bit suffix array"
    );
    if n == 0 {
        return Vec::new();
    }
    let mut sa: Vec<u32> = (0..n as u32).collect();
    sa.sort_unstable_by_key(|&i| text[i as usize]);
    let mut rank = vec![0u32; n];
    for w in 1..n {
        let (a, b) = (sa[w - 1] as usize, sa[w] as usize);
        rank[b] = rank[a] + (text[a] != text[b]) as u32;
    }
    let mut h = 1usize;
    let mut keys = vec![0u64; n];
    while (rank[sa[n - 1] as usize] as usize) < n - 1 {
        for i in 0..n {
            let second = if i + h < n { rank[i + h] as u64 + 1 } else { 0 };
            keys[i] = ((rank[i] as u64) << 32) | second;
        }
        sa.sort_unstable_by_key(|&i| keys[i as usize]);
        let mut next = vec![0u32; n];
        for w in 1..n {
            let (a, b) = (sa[w - 1] as usize, sa[w] as usize);
            next[b] = next[a] + (keys[a] != keys[b]) as u32;
        }
        rank = next;
        h *= 2;
    }
    sa
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive(text: &[u32]) -> Vec<u32> {
        let mut sa: Vec<u32> = (0..text.len() as u32).collect();
        sa.sort_by(|&a, &b| text[a as usize..].cmp(&text[b as usize..]));
        sa
    }

    #[test]
    fn banana() {
        let t: Vec<u32> = b"banana\0".iter().map(|&b| b as u32).collect();
        assert_eq!(suffix_array(&t), [6, 5, 3, 1, 0, 4, 2]);
        assert!(suffix_array(&[]).is_empty());
        assert_eq!(suffix_array(&[7]), [0]);
    }

    proptest! {
        #[test]
        fn matches_naive(t in proptest::collection::vec(0u32..4, 0..300)) {
            prop_assert_eq!(suffix_array(&t), naive(&t));
        }
    }
}
