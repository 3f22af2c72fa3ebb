//! Hole search by fans around the rightmost vertex.
//!
//! Every convex polygon `H` has a unique rightmost vertex `p`. The other
//! vertices all lie to the left of `p`, so they are totally ordered by angle
//! around `p`, and `H` is the union of the fan triangles `p q_s q_{s+1}`.
//! Hence `H` is a hole iff every fan triangle is empty and every inner turn
//! `q_{s-1} q_s q_{s+1}` is a left turn. Both tests only need orientations,
//! so the same search runs on coordinates and on abstract signatures.
//!
//! A point with a larger index than every vertex lies right of the hole and
//! can never be inside it, which is why holes found among the first `m`
//! indices survive any extension to the right.

use std::ops::ControlFlow;

use crate::chirotope::Chirotope;

pub trait FanSource {
    fn len(&self) -> usize;

    fn ccw(&self, a: usize, b: usize, c: usize) -> bool;

    /// No point strictly inside the counterclockwise triangle `p a b`, where
    /// `p` is the largest of the three indices.
    fn empty_triangle(&self, p: usize, a: usize, b: usize) -> bool;
}

/// Reusable buffers for [`visit_holes_at`].
#[derive(Default, Debug, Clone)]
pub struct FanScratch {
    order: Vec<usize>,
    adj: Vec<u64>,
    chain: Vec<usize>,
}

impl FanScratch {
    pub fn new() -> Self {
        Self::default()
    }
}

/// Visits every k-hole whose rightmost vertex is `p`, as `[p, q_1, .., q_{k-1}]`
/// in counterclockwise order. With `split = Some(s)` only holes with a vertex
/// left of `s` are reported (and `p >= s` is required). The visitor may break
/// to stop the search.
pub fn visit_holes_at<S, F>(
    src: &S,
    p: usize,
    k: usize,
    split: Option<usize>,
    scratch: &mut FanScratch,
    mut visit: F,
) -> ControlFlow<()>
where
    S: FanSource + ?Sized,
    F: FnMut(&[usize]) -> ControlFlow<()>,
{
    if k < 3 || p + 1 < k {
        return ControlFlow::Continue(());
    }
    if let Some(s) = split {
        if p < s || s == 0 {
            return ControlFlow::Continue(());
        }
    }
    let FanScratch { order, adj, chain } = scratch;

    // Counterclockwise order around p of all points left of p.
    order.clear();
    for q in 0..p {
        let mut pos = order.len();
        order.push(q);
        while pos > 0 && src.ccw(p, q, order[pos - 1]) {
            order[pos] = order[pos - 1];
            pos -= 1;
        }
        order[pos] = q;
    }

    let m = order.len();
    let words = m.div_ceil(64);
    adj.clear();
    adj.resize(m * words, 0);
    for s in 0..m {
        for t in s + 1..m {
            if src.empty_triangle(p, order[s], order[t]) {
                adj[s * words + t / 64] |= 1 << (t % 64);
            }
        }
    }

    chain.clear();
    chain.push(p);
    let ctx = Ctx {
        src,
        order,
        adj,
        words,
        k,
        split,
    };
    for s in 0..m {
        let a_count = usize::from(split.is_some_and(|sp| order[s] < sp));
        chain.push(order[s]);
        ctx.extend(s, a_count, chain, &mut visit)?;
        chain.pop();
    }
    ControlFlow::Continue(())
}

struct Ctx<'a, S: ?Sized> {
    src: &'a S,
    order: &'a [usize],
    adj: &'a [u64],
    words: usize,
    k: usize,
    split: Option<usize>,
}

impl<S: FanSource + ?Sized> Ctx<'_, S> {
    fn extend<F>(&self, last: usize, a_count: usize, chain: &mut Vec<usize>, visit: &mut F) -> ControlFlow<()>
    where
        F: FnMut(&[usize]) -> ControlFlow<()>,
    {
        if chain.len() == self.k {
            if self.split.is_none() || a_count > 0 {
                visit(chain)?;
            }
            return ControlFlow::Continue(());
        }
        let row = &self.adj[last * self.words..(last + 1) * self.words];
        for (w, &word) in row.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let t = w * 64 + bits.trailing_zeros() as usize;
                bits &= bits - 1;
                let q = self.order[t];
                let n = chain.len();
                if n >= 3 && !self.src.ccw(chain[n - 2], chain[n - 1], q) {
                    continue;
                }
                let a = a_count + usize::from(self.split.is_some_and(|sp| q < sp));
                chain.push(q);
                let r = self.extend(t, a, chain, visit);
                chain.pop();
                r?;
            }
        }
        ControlFlow::Continue(())
    }
}

pub fn count_holes_at<S: FanSource + ?Sized>(src: &S, p: usize, k: usize, split: Option<usize>, scratch: &mut FanScratch) -> u64 {
    let mut count = 0;
    let _ = visit_holes_at(src, p, k, split, scratch, |_| {
        count += 1;
        ControlFlow::Continue(())
    });
    count
}

pub fn has_hole_at<S: FanSource + ?Sized>(src: &S, p: usize, k: usize, split: Option<usize>, scratch: &mut FanScratch) -> bool {
    visit_holes_at(src, p, k, split, scratch, |_| ControlFlow::Break(())).is_break()
}

/// Left-of bitsets for every ordered pair of a configuration of any size.
#[derive(Clone, Debug)]
pub struct HoleIndex {
    n: usize,
    words: usize,
    left: Vec<u64>,
}

impl HoleIndex {
    pub fn new<C: Chirotope + ?Sized>(c: &C) -> Self {
        let n = c.len();
        let words = n.div_ceil(64).max(1);
        let mut left = vec![0u64; n * n * words];
        let mut set = |a: usize, b: usize, x: usize| {
            left[(a * n + b) * words + x / 64] |= 1 << (x % 64);
        };
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let (p, q, r) = if c.ccw(i, j, k) { (i, j, k) } else { (j, i, k) };
                    // (p, q, r) is counterclockwise
                    set(p, q, r);
                    set(q, r, p);
                    set(r, p, q);
                }
            }
        }
        HoleIndex { n, words, left }
    }

    fn row(&self, a: usize, b: usize) -> &[u64] {
        let start = (a * self.n + b) * self.words;
        &self.left[start..start + self.words]
    }

    pub fn count(&self, k: usize) -> u64 {
        let mut scratch = FanScratch::new();
        (0..self.n).map(|p| count_holes_at(self, p, k, None, &mut scratch)).sum()
    }

    pub fn count_divided(&self, k: usize, split: usize) -> u64 {
        let mut scratch = FanScratch::new();
        (split..self.n)
            .map(|p| count_holes_at(self, p, k, Some(split), &mut scratch))
            .sum()
    }

    /// All k-holes as vertex lists `[rightmost, ...]` in counterclockwise order.
    pub fn holes(&self, k: usize, split: Option<usize>) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut scratch = FanScratch::new();
        for p in 0..self.n {
            let _ = visit_holes_at(self, p, k, split, &mut scratch, |h| {
                out.push(h.to_vec());
                ControlFlow::Continue(())
            });
        }
        out
    }

    pub fn first_hole(&self, k: usize, split: Option<usize>) -> Option<Vec<usize>> {
        let mut scratch = FanScratch::new();
        let mut found = None;
        for p in 0..self.n {
            let r = visit_holes_at(self, p, k, split, &mut scratch, |h| {
                found = Some(h.to_vec());
                ControlFlow::Break(())
            });
            if r.is_break() {
                break;
            }
        }
        found
    }
}

impl FanSource for HoleIndex {
    fn len(&self) -> usize {
        self.n
    }

    fn ccw(&self, a: usize, b: usize, c: usize) -> bool {
        let row = self.row(a, b);
        row[c / 64] >> (c % 64) & 1 == 1
    }

    fn empty_triangle(&self, p: usize, a: usize, b: usize) -> bool {
        let (pa, ab, bp) = (self.row(p, a), self.row(a, b), self.row(b, p));
        let full = p / 64;
        for w in 0..=full.min(self.words - 1) {
            let mut m = pa[w] & ab[w] & bp[w];
            if w == full {
                m &= (1u64 << (p % 64)) - 1;
            }
            if m != 0 {
                return false;
            }
        }
        true
    }
}

impl Chirotope for HoleIndex {
    fn len(&self) -> usize {
        self.n
    }

    fn orient(&self, i: usize, j: usize, k: usize) -> crate::geometry::Orientation {
        use crate::geometry::Orientation;
        if i == j || j == k || i == k {
            Orientation::Collinear
        } else if FanSource::ccw(self, i, j, k) {
            Orientation::Counterclockwise
        } else {
            Orientation::Clockwise
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{enumerate_k_holes, PointSet};

    #[test]
    fn convex_position_counts_are_binomial() {
        let s = PointSet::from_ints(&(0..9).map(|i| (i, i * i)).collect::<Vec<_>>()).unwrap();
        let idx = HoleIndex::new(&s);
        let binom = [1u64, 9, 36, 84, 126, 126, 84, 36, 9, 1];
        for k in 3..=9 {
            assert_eq!(idx.count(k), binom[k], "k={k}");
        }
    }

    #[test]
    fn agrees_with_subset_enumeration() {
        let s = PointSet::from_ints(&[(0, 5), (1, 0), (2, 16), (3, 0), (4, 5), (5, 31), (6, 25), (7, 40), (8, 23), (9, 27)])
            .unwrap();
        let idx = HoleIndex::new(&s);
        for k in 3..=6 {
            let mut a: Vec<Vec<usize>> = idx
                .holes(k, None)
                .into_iter()
                .map(|mut h| {
                    h.sort();
                    h
                })
                .collect();
            a.sort();
            let b: Vec<Vec<usize>> = enumerate_k_holes(&s, k).into_iter().map(|h| h.indices).collect();
            assert_eq!(a, b, "k={k}");
        }
    }

    #[test]
    fn divided_filter() {
        let s = PointSet::from_ints(&(0..8).map(|i| (i, i * i)).collect::<Vec<_>>()).unwrap();
        let idx = HoleIndex::new(&s);
        // all 5-subsets except those entirely inside one part of size 4
        assert_eq!(idx.count_divided(5, 4), 56);
        assert_eq!(idx.count_divided(4, 4), 70 - 2);
    }
}
