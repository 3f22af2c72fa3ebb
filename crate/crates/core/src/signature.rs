//! Signature functions: one sign per index triple of an x-sorted configuration.
//!
//! `chi(i, j, k)` for `i < j < k` is `+` when the triple traced by increasing
//! x is counterclockwise and `-` when it is clockwise. A sign assignment comes
//! from some arrangement of pseudolines exactly when every 4-tuple
//! `i < j < k < l` reads `(chi(ijk), chi(ijl), chi(ikl), chi(jkl))` with at
//! most one sign change.
//!
//! # Packed layout
//!
//! [`Signature`] stores bit `rank(i, j, k) = C(k, 3) + C(j, 2) + i` (colex
//! order: `012, 013, 023, 123, 014, ...`), set for `+`. The dump format is
//! the line `sig n=<n>` followed by one line of `C(n, 3)` characters `+`/`-`
//! in the same rank order.

use std::fmt;
use std::str::FromStr;

use crate::chirotope::Chirotope;
use crate::error::{Error, Result};
use crate::geometry::{Orientation, PointSet};
use crate::holes::{FanSource, HoleIndex};

/// Largest configuration a [`PartialSignature`] can hold.
pub const MAX_POINTS: usize = 16;

/// A lexicographic 4-tuple of signs, `true` for `+`.
pub type Pattern = [bool; 4];

pub fn is_admissible(p: Pattern) -> bool {
    p.windows(2).filter(|w| w[0] != w[1]).count() <= 1
}

/// The eight sign patterns with at most one sign change, in lexicographic
/// order with `-` before `+`.
pub fn admissible_patterns() -> Vec<Pattern> {
    (0..16u8)
        .map(|b| [b & 8 != 0, b & 4 != 0, b & 2 != 0, b & 1 != 0])
        .filter(|&p| is_admissible(p))
        .collect()
}

pub fn triple_rank(i: usize, j: usize, k: usize) -> usize {
    debug_assert!(i < j && j < k);
    binom3(k) + j * j.saturating_sub(1) / 2 + i
}

fn binom3(k: usize) -> usize {
    if k < 3 {
        0
    } else {
        k * (k - 1) * (k - 2) / 6
    }
}

pub fn triple_count(n: usize) -> usize {
    binom3(n)
}

/// Inverse of [`triple_rank`].
pub fn triple_unrank(r: usize) -> (usize, usize, usize) {
    let mut k = 2;
    while binom3(k + 1) <= r {
        k += 1;
    }
    let r = r - binom3(k);
    let mut j = 1;
    while (j + 1) * j / 2 <= r {
        j += 1;
    }
    (r - j * (j - 1) / 2, j, k)
}

fn sort3(i: usize, j: usize, k: usize) -> ((usize, usize, usize), bool) {
    // returns the sorted triple and whether an odd permutation was applied
    let (mut a, mut b, mut c) = (i, j, k);
    let mut odd = false;
    if a > b {
        std::mem::swap(&mut a, &mut b);
        odd = !odd;
    }
    if b > c {
        std::mem::swap(&mut b, &mut c);
        odd = !odd;
    }
    if a > b {
        std::mem::swap(&mut a, &mut b);
        odd = !odd;
    }
    ((a, b, c), odd)
}

/// A complete signature, packed by triple rank.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Signature {
    n: usize,
    bits: Vec<u64>,
}

impl Signature {
    pub fn from_fn(n: usize, mut chi: impl FnMut(usize, usize, usize) -> bool) -> Self {
        let mut bits = vec![0u64; triple_count(n).div_ceil(64)];
        for k in 2..n {
            for j in 1..k {
                for i in 0..j {
                    if chi(i, j, k) {
                        let r = triple_rank(i, j, k);
                        bits[r / 64] |= 1 << (r % 64);
                    }
                }
            }
        }
        Signature { n, bits }
    }

    /// All signs `+`: points in convex position along an upward chain.
    pub fn convex_chain(n: usize) -> Self {
        Self::from_fn(n, |_, _, _| true)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// `chi(i, j, k)` for `i < j < k`, `true` for `+`.
    pub fn sign(&self, i: usize, j: usize, k: usize) -> bool {
        let r = triple_rank(i, j, k);
        self.bits[r / 64] >> (r % 64) & 1 == 1
    }

    pub fn pattern(&self, i: usize, j: usize, k: usize, l: usize) -> Pattern {
        [self.sign(i, j, k), self.sign(i, j, l), self.sign(i, k, l), self.sign(j, k, l)]
    }

    /// First 4-tuple whose pattern is not admissible.
    pub fn inconsistent_quadruple(&self) -> Option<[usize; 4]> {
        let n = self.n;
        for l in 3..n {
            for k in 2..l {
                for j in 1..k {
                    for i in 0..j {
                        if !is_admissible(self.pattern(i, j, k, l)) {
                            return Some([i, j, k, l]);
                        }
                    }
                }
            }
        }
        None
    }

    pub fn is_consistent(&self) -> bool {
        self.inconsistent_quadruple().is_none()
    }

    /// Every sign flipped: the reflection in the x-axis.
    pub fn mirrored(&self) -> Self {
        Self::from_fn(self.n, |i, j, k| !self.sign(i, j, k))
    }

    /// Restriction to the given ascending indices.
    pub fn restrict(&self, indices: &[usize]) -> Self {
        Self::from_fn(indices.len(), |i, j, k| self.sign(indices[i], indices[j], indices[k]))
    }

    pub fn to_partial(&self) -> PartialSignature {
        assert!(self.n <= MAX_POINTS, "at most {MAX_POINTS} points");
        let mut ps = PartialSignature::new(self.n);
        for k in 2..self.n {
            for j in 1..k {
                for i in 0..j {
                    ps.set(i, j, k, self.sign(i, j, k));
                }
            }
            ps.m = k + 1;
        }
        ps.m = self.n;
        ps
    }

    /// The sign line of the dump format.
    pub fn sign_string(&self) -> String {
        (0..triple_count(self.n))
            .map(|r| if self.bits[r / 64] >> (r % 64) & 1 == 1 { '+' } else { '-' })
            .collect()
    }

    pub fn to_dump(&self) -> String {
        format!("sig n={}\n{}\n", self.n, self.sign_string())
    }

    /// Parses one or more dumped signatures. Blank lines are ignored and the
    /// typographic minus sign is accepted alongside `-`.
    pub fn parse_stream(text: &str) -> Result<Vec<Signature>> {
        let mut out = Vec::new();
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        while let Some((lineno, header)) = lines.next() {
            let n: usize = header
                .trim()
                .strip_prefix("sig n=")
                .and_then(|v| v.trim().parse().ok())
                .ok_or_else(|| Error::Parse {
                    line: lineno + 1,
                    message: format!("expected `sig n=<n>`, found `{}`", header.trim()),
                })?;
            let (lineno, body) = lines.next().ok_or_else(|| Error::Parse {
                line: lineno + 2,
                message: "missing sign line".into(),
            })?;
            let signs: Vec<bool> = body
                .trim()
                .chars()
                .map(|c| match c {
                    '+' => Ok(true),
                    '-' | '\u{2212}' => Ok(false),
                    other => Err(Error::Parse {
                        line: lineno + 1,
                        message: format!("unexpected character `{other}`"),
                    }),
                })
                .collect::<Result<_>>()?;
            if signs.len() != triple_count(n) {
                return Err(Error::Parse {
                    line: lineno + 1,
                    message: format!("expected {} signs for n={n}, found {}", triple_count(n), signs.len()),
                });
            }
            out.push(Signature::from_fn(n, |i, j, k| signs[triple_rank(i, j, k)]));
        }
        Ok(out)
    }

    /// Number of k-holes, optionally only those with a vertex on each side
    /// of the split (`A` = the first `split` indices).
    pub fn k_holes(&self, k: usize, split: Option<usize>) -> u64 {
        signature_k_holes(self, k, split)
    }
}

impl fmt::Debug for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Signature(n={}, {})", self.n, self.sign_string())
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "sig n={}\n{}", self.n, self.sign_string())
    }
}

impl FromStr for Signature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut all = Signature::parse_stream(s)?;
        match all.len() {
            1 => Ok(all.pop().unwrap()),
            n => Err(Error::Signature(format!("expected one signature, found {n}"))),
        }
    }
}

impl Chirotope for Signature {
    fn len(&self) -> usize {
        self.n
    }

    fn orient(&self, i: usize, j: usize, k: usize) -> Orientation {
        if i == j || j == k || i == k {
            return Orientation::Collinear;
        }
        let ((a, b, c), odd) = sort3(i, j, k);
        if self.sign(a, b, c) != odd {
            Orientation::Counterclockwise
        } else {
            Orientation::Clockwise
        }
    }
}

pub fn signature_of(set: &PointSet) -> Signature {
    Signature::from_fn(set.len(), |i, j, k| set.ccw(i, j, k))
}

pub fn signature_k_holes(sig: &Signature, k: usize, split: Option<usize>) -> u64 {
    let index = HoleIndex::new(sig);
    match split {
        Some(s) => index.count_divided(k, s),
        None => index.count(k),
    }
}

/// The state of the depth-first search: the first `placed()` points have all
/// their triples decided.
///
/// `left[a][b]` has bit `c` set when `c` lies left of the directed line
/// `a b`, for every ordered pair, so orientation queries in any order and
/// triangle emptiness are single mask operations.
#[derive(Clone, Copy)]
pub struct PartialSignature {
    n: usize,
    m: usize,
    left: [[u16; MAX_POINTS]; MAX_POINTS],
}

impl PartialSignature {
    pub fn new(n: usize) -> Self {
        assert!(n <= MAX_POINTS, "at most {MAX_POINTS} points");
        PartialSignature {
            n,
            m: n.min(2),
            left: [[0; MAX_POINTS]; MAX_POINTS],
        }
    }

    /// A state with `m <= 2` points, which have no triples yet.
    pub(crate) fn trivial(n: usize, m: usize) -> Self {
        debug_assert!(m <= 2 && m <= n);
        PartialSignature { m, ..Self::new(n) }
    }

    pub fn target(&self) -> usize {
        self.n
    }

    pub fn placed(&self) -> usize {
        self.m
    }

    pub fn is_complete(&self) -> bool {
        self.m == self.n
    }

    /// `chi(i, j, k)` for `i < j < k`, all below `placed()`.
    #[inline]
    pub fn sign(&self, i: usize, j: usize, k: usize) -> bool {
        self.left[i][j] >> k & 1 == 1
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, j: usize, k: usize, s: bool) {
        let (bi, bj, bk) = (1u16 << i, 1u16 << j, 1u16 << k);
        let put = |w: &mut u16, bit: u16, v: bool| {
            if v {
                *w |= bit
            } else {
                *w &= !bit
            }
        };
        put(&mut self.left[i][j], bk, s);
        put(&mut self.left[j][i], bk, !s);
        put(&mut self.left[j][k], bi, s);
        put(&mut self.left[k][j], bi, !s);
        put(&mut self.left[k][i], bj, s);
        put(&mut self.left[i][k], bj, !s);
    }

    /// Sets `chi(i, j, m)` where `m = placed()` is the point being added,
    /// provided every 4-tuple `(a, i, j, m)` with `a < i` stays admissible.
    /// Triples must be decided in lexicographic `(i, j)` order so that those
    /// 4-tuples are exactly the ones this sign completes.
    #[inline]
    pub fn try_set(&mut self, i: usize, j: usize, s: bool) -> bool {
        let m = self.m;
        let below = (1u16 << i) - 1;
        let x0 = self.left[i][j];
        let x1 = self.left[i][m];
        let x2 = self.left[j][m];
        let x3 = if s { u16::MAX } else { 0 };
        let (c1, c2, c3) = (x0 ^ x1, x1 ^ x2, x2 ^ x3);
        if ((c1 & c2) | (c1 & c3) | (c2 & c3)) & below != 0 {
            return false;
        }
        self.set(i, j, m, s);
        true
    }

    /// Adds the next point with the signs of `(i, j, m)` for all `i < j < m`
    /// given in lexicographic order; `None` if some 4-tuple is inadmissible.
    pub fn extend(&self, signs: &[bool]) -> Option<PartialSignature> {
        let m = self.m;
        assert!(m < self.n, "signature already complete");
        assert_eq!(signs.len(), m * m.saturating_sub(1) / 2, "one sign per new triple");
        let mut next = *self;
        let mut it = signs.iter();
        for i in 0..m {
            for j in i + 1..m {
                if !next.try_set(i, j, *it.next().unwrap()) {
                    return None;
                }
            }
        }
        next.m = m + 1;
        Some(next)
    }

    pub(crate) fn finish_point(&mut self) {
        self.m += 1;
    }

    pub(crate) fn unfinish_point(&mut self) {
        self.m -= 1;
    }

    pub fn to_signature(&self) -> Signature {
        Signature::from_fn(self.m, |i, j, k| self.sign(i, j, k))
    }

    /// Left-of mask of the directed pair `(a, b)` restricted to placed points.
    #[inline]
    pub fn left_mask(&self, a: usize, b: usize) -> u16 {
        self.left[a][b] & self.placed_mask()
    }

    #[inline]
    fn placed_mask(&self) -> u16 {
        ((1u32 << self.m) - 1) as u16
    }
}

impl fmt::Debug for PartialSignature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PartialSignature(n={}, m={}, {})", self.n, self.m, self.to_signature().sign_string())
    }
}

impl Chirotope for PartialSignature {
    fn len(&self) -> usize {
        self.m
    }

    fn orient(&self, i: usize, j: usize, k: usize) -> Orientation {
        if i == j || j == k || i == k {
            Orientation::Collinear
        } else if self.left[i][j] >> k & 1 == 1 {
            Orientation::Counterclockwise
        } else {
            Orientation::Clockwise
        }
    }

    #[inline]
    fn ccw(&self, i: usize, j: usize, k: usize) -> bool {
        self.left[i][j] >> k & 1 == 1
    }
}

impl FanSource for PartialSignature {
    fn len(&self) -> usize {
        self.m
    }

    #[inline]
    fn ccw(&self, a: usize, b: usize, c: usize) -> bool {
        self.left[a][b] >> c & 1 == 1
    }

    #[inline]
    fn empty_triangle(&self, p: usize, a: usize, b: usize) -> bool {
        self.left[p][a] & self.left[a][b] & self.left[b][p] & ((1u16 << p) - 1) == 0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranks_are_colex_and_invertible() {
        let order: Vec<_> = (0..10).map(triple_unrank).collect();
        assert_eq!(
            order,
            vec![
                (0, 1, 2),
                (0, 1, 3),
                (0, 2, 3),
                (1, 2, 3),
                (0, 1, 4),
                (0, 2, 4),
                (1, 2, 4),
                (0, 3, 4),
                (1, 3, 4),
                (2, 3, 4)
            ]
        );
        for r in 0..triple_count(12) {
            let (i, j, k) = triple_unrank(r);
            assert_eq!(triple_rank(i, j, k), r);
        }
    }

    #[test]
    fn eight_patterns() {
        let p = admissible_patterns();
        assert_eq!(p.len(), 8);
        assert!(p.contains(&[true; 4]));
        assert!(!p.contains(&[true, false, true, false]));
    }

    #[test]
    fn partial_and_packed_agree() {
        let sig = Signature::from_fn(7, |i, j, k| (i + 2 * j + k) % 3 != 0);
        let ps = sig.to_partial();
        for k in 2..7 {
            for j in 1..k {
                for i in 0..j {
                    assert_eq!(ps.sign(i, j, k), sig.sign(i, j, k));
                    assert_eq!(Chirotope::orient(&ps, k, i, j), sig.orient(k, i, j));
                    assert_eq!(Chirotope::orient(&ps, j, i, k), sig.orient(j, i, k));
                }
            }
        }
        assert_eq!(ps.to_signature(), sig);
    }

    #[test]
    fn extend_from_three_points() {
        let mut ps = PartialSignature::new(4);
        ps = ps.extend(&[true]).unwrap();
        assert_eq!(ps.placed(), 3);
        // chi(012) = +, then chi(013) = -, chi(023) = +, chi(123) = - is two changes away from valid
        assert!(ps.extend(&[false, true, false]).is_none());
        assert!(ps.extend(&[true, true, false]).is_some());
    }

    #[test]
    fn dump_round_trip() {
        let sig = Signature::from_fn(6, |i, j, k| (i * j + k) % 2 == 0);
        let text = format!("{}{}", sig.to_dump(), sig.mirrored().to_dump());
        let back = Signature::parse_stream(&text).unwrap();
        assert_eq!(back, vec![sig.clone(), sig.mirrored()]);
        let unicode = "sig n=3\n\u{2212}\n".to_string();
        assert!(!unicode.parse::<Signature>().unwrap().sign(0, 1, 2));
        assert!("sig n=4\n+++\n".parse::<Signature>().is_err());
        assert!("sig n=3\n*\n".parse::<Signature>().is_err());
    }

    #[test]
    fn convex_chain_holes() {
        let sig = Signature::convex_chain(6);
        assert_eq!(sig.k_holes(5, None), 6);
        assert_eq!(sig.k_holes(3, None), 20);
    }
}
