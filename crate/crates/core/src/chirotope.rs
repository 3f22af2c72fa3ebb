//! Combinatorial algorithms that only look at triple orientations.
//!
//! Anything implementing [`Chirotope`] exposes the orientation of every index
//! triple of an x-sorted configuration: concrete point sets, precomputed
//! tables, and abstract signatures alike. Because indices are x-sorted, the
//! monotone chain hull below needs nothing beyond orientation queries.

use crate::geometry::Orientation;

pub trait Chirotope {
    fn len(&self) -> usize;

    /// Orientation of `(i, j, k)` traced in this order.
    fn orient(&self, i: usize, j: usize, k: usize) -> Orientation;

    fn ccw(&self, i: usize, j: usize, k: usize) -> bool {
        self.orient(i, j, k) == Orientation::Counterclockwise
    }
}

impl<C: Chirotope + ?Sized> Chirotope for &C {
    fn len(&self) -> usize {
        (**self).len()
    }

    fn orient(&self, i: usize, j: usize, k: usize) -> Orientation {
        (**self).orient(i, j, k)
    }

    fn ccw(&self, i: usize, j: usize, k: usize) -> bool {
        (**self).ccw(i, j, k)
    }
}

/// Convex hull of `subset` (ascending indices), counterclockwise from the
/// leftmost point.
pub fn hull<C: Chirotope + ?Sized>(c: &C, subset: &[usize]) -> Vec<usize> {
    if subset.len() <= 2 {
        return subset.to_vec();
    }
    debug_assert!(subset.windows(2).all(|w| w[0] < w[1]));
    let mut lower: Vec<usize> = Vec::with_capacity(subset.len());
    for &p in subset {
        while lower.len() >= 2 && !c.ccw(lower[lower.len() - 2], lower[lower.len() - 1], p) {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<usize> = Vec::with_capacity(subset.len());
    for &p in subset.iter().rev() {
        while upper.len() >= 2 && !c.ccw(upper[upper.len() - 2], upper[upper.len() - 1], p) {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// `subset` must be ascending.
pub fn is_convex_subset<C: Chirotope + ?Sized>(c: &C, subset: &[usize]) -> bool {
    if subset.len() <= 3 {
        return true;
    }
    if subset.windows(2).all(|w| w[0] < w[1]) {
        hull(c, subset).len() == subset.len()
    } else {
        let mut s = subset.to_vec();
        s.sort_unstable();
        hull(c, &s).len() == s.len()
    }
}

/// Strict containment of `p` in the triangle `a b d` (any orientation).
pub fn in_triangle<C: Chirotope + ?Sized>(c: &C, p: usize, a: usize, b: usize, d: usize) -> bool {
    let o = c.orient(a, b, p);
    o != Orientation::Collinear && c.orient(b, d, p) == o && c.orient(d, a, p) == o
}

/// Strict containment in a counterclockwise convex polygon.
pub fn in_convex_polygon<C: Chirotope + ?Sized>(c: &C, polygon: &[usize], p: usize) -> bool {
    let k = polygon.len();
    (0..k).all(|i| c.ccw(polygon[i], polygon[(i + 1) % k], p))
}

/// Indices of `subset` that are hull vertices of `subset`.
pub fn extremal_points<C: Chirotope + ?Sized>(c: &C, subset: &[usize]) -> Vec<usize> {
    let mut h = hull(c, subset);
    h.sort_unstable();
    h
}

/// Precomputed orientations of every triple, for repeated queries on sets
/// whose coordinates are expensive to evaluate.
#[derive(Clone, Debug)]
pub struct OrientationTable {
    n: usize,
    // bit (i * n + j) * n + k set iff (i, j, k) is counterclockwise
    ccw: Vec<u64>,
}

impl OrientationTable {
    pub fn new<C: Chirotope + ?Sized>(c: &C) -> Self {
        let n = c.len();
        let mut table = OrientationTable {
            n,
            ccw: vec![0; (n * n * n).div_ceil(64)],
        };
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let o = c.orient(i, j, k);
                    debug_assert_ne!(o, Orientation::Collinear);
                    let pos = o.is_ccw();
                    for (a, b, d, v) in [
                        (i, j, k, pos),
                        (j, k, i, pos),
                        (k, i, j, pos),
                        (j, i, k, !pos),
                        (i, k, j, !pos),
                        (k, j, i, !pos),
                    ] {
                        if v {
                            let bit = (a * n + b) * n + d;
                            table.ccw[bit / 64] |= 1 << (bit % 64);
                        }
                    }
                }
            }
        }
        table
    }
}

impl Chirotope for OrientationTable {
    fn len(&self) -> usize {
        self.n
    }

    fn orient(&self, i: usize, j: usize, k: usize) -> Orientation {
        if i == j || j == k || i == k {
            return Orientation::Collinear;
        }
        if self.ccw(i, j, k) {
            Orientation::Counterclockwise
        } else {
            Orientation::Clockwise
        }
    }

    fn ccw(&self, i: usize, j: usize, k: usize) -> bool {
        let bit = (i * self.n + j) * self.n + k;
        self.ccw[bit / 64] >> (bit % 64) & 1 == 1
    }
}
