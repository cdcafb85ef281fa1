//! Colexicographic ranking of k-multisets.
//!
//! A sorted multiset `c_0 <= ... <= c_{k-1}` over positions `0..m` maps to the
//! strictly increasing set `c_j + j`, whose colex rank is
//! `sum_j C(c_j + j, j + 1)`. The rank does not depend on `m`, so adding a
//! new largest position appends the new multisets at the end of the table.

#[derive(Debug, Clone)]
pub(crate) struct MultisetRanker {
    k: usize,
    /// Number of positions the coefficient table covers.
    cap: usize,
    /// `coef[j * cap + c] = C(c + j, j + 1)`.
    coef: Vec<usize>,
}

impl MultisetRanker {
    pub fn new(k: usize) -> Self {
        let mut r = Self { k, cap: 0, coef: Vec::new() };
        r.ensure(8);
        r
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Makes positions `0..m` rankable.
    pub fn ensure(&mut self, m: usize) {
        if m <= self.cap {
            return;
        }
        let cap = m.max(self.cap * 2);
        let mut coef = vec![0usize; self.k * cap];
        for j in 0..self.k {
            for c in 0..cap {
                coef[j * cap + c] = binomial(c + j, j + 1) as usize;
            }
        }
        self.cap = cap;
        self.coef = coef;
    }

    #[inline]
    fn coef(&self, j: usize, c: usize) -> usize {
        self.coef[j * self.cap + c]
    }

    /// Rank of a sorted multiset.
    #[inline]
    pub fn rank(&self, sorted: &[usize]) -> usize {
        sorted.iter().enumerate().map(|(j, &c)| self.coef(j, c)).sum()
    }

    /// Rank of `sorted` with the element at index `i` replaced by `p`.
    #[inline]
    pub fn rank_replacing(&self, sorted: &[usize], i: usize, p: usize) -> usize {
        let mut t = 0;
        let mut rank = 0;
        let mut placed = false;
        for (j, &c) in sorted.iter().enumerate() {
            if j == i {
                continue;
            }
            if !placed && p <= c {
                rank += self.coef(t, p);
                t += 1;
                placed = true;
            }
            rank += self.coef(t, c);
            t += 1;
        }
        if !placed {
            rank += self.coef(t, p);
        }
        rank
    }
}

/// Number of k-multisets over `m` items: C(m + k - 1, k).
pub(crate) fn multiset_count(m: usize, k: usize) -> u128 {
    if k == 0 {
        return 1;
    }
    if m == 0 {
        return 0;
    }
    binomial(m + k - 1, k)
}

pub(crate) fn binomial(n: usize, r: usize) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Advances `c` to its colex successor among multisets over `0..m`.
/// Returns `false` after the last one.
#[inline]
pub(crate) fn next_multiset(c: &mut [usize], m: usize) -> bool {
    let k = c.len();
    for j in 0..k {
        let can = if j + 1 < k { c[j] < c[j + 1] } else { c[j] + 1 < m };
        if can {
            c[j] += 1;
            for x in c.iter_mut().take(j) {
                *x = 0;
            }
            return true;
        }
    }
    false
}
