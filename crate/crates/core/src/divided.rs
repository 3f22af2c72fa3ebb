//! Point sets split by a vertical line into a left part `A` and a right part
//! `B`, and the structures used to reason about holes crossing the line.
//!
//! Indices are x-sorted, so `A` is always the first `split` indices. Every
//! function here that takes a [`Chirotope`] works equally on coordinates and
//! on signatures.

use std::fmt;
use std::str::FromStr;

use crate::chirotope::{hull, in_convex_polygon, is_convex_subset, Chirotope};
use crate::error::{Error, Result};
use crate::geometry::{is_k_hole, orientation, HoleSet, Orientation, Point, PointSet};
use crate::holes::HoleIndex;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DividedSet {
    base: PointSet,
    split: usize,
}

impl DividedSet {
    pub fn new(base: PointSet, split: usize) -> Result<Self> {
        if split == 0 || split >= base.len() {
            return Err(Error::InvalidSplit { split, len: base.len() });
        }
        Ok(DividedSet { base, split })
    }

    pub fn base(&self) -> &PointSet {
        &self.base
    }

    pub fn split(&self) -> usize {
        self.split
    }

    pub fn len(&self) -> usize {
        self.base.len()
    }

    pub fn is_empty(&self) -> bool {
        self.base.is_empty()
    }

    pub fn size_a(&self) -> usize {
        self.split
    }

    pub fn size_b(&self) -> usize {
        self.base.len() - self.split
    }

    pub fn in_a(&self, i: usize) -> bool {
        i < self.split
    }

    pub fn a_indices(&self) -> Vec<usize> {
        (0..self.split).collect()
    }

    pub fn b_indices(&self) -> Vec<usize> {
        (self.split..self.base.len()).collect()
    }

    pub fn a_is_convex(&self) -> bool {
        is_convex_subset(&self.base, &self.a_indices())
    }

    pub fn b_is_convex(&self) -> bool {
        is_convex_subset(&self.base, &self.b_indices())
    }

    /// The sub-configuration on `indices` (ascending), split where the
    /// original was.
    pub fn restrict(&self, indices: &[usize]) -> Result<DividedSet> {
        let split = indices.iter().filter(|&&i| i < self.split).count();
        DividedSet::new(self.base.subset(indices), split)
    }

    /// The x-coordinate halfway between the two points straddling the line.
    pub fn line_x(&self) -> crate::geometry::Rational {
        (self.base.point(self.split - 1).x.clone() + self.base.point(self.split).x.clone()) / crate::geometry::Rational::from_integer(2.into())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        let (lineno, header) = lines
            .by_ref()
            .find(|(_, l)| {
                let t = l.trim();
                !t.is_empty() && !t.starts_with('#')
            })
            .ok_or(Error::Empty)?;
        let split: usize = header
            .trim()
            .strip_prefix("split")
            .and_then(|v| v.trim().parse().ok())
            .ok_or_else(|| Error::Parse {
                line: lineno + 1,
                message: format!("expected `split <s>`, found `{}`", header.trim()),
            })?;
        let mut points = Vec::new();
        for (i, line) in lines {
            let line = line.trim();
            if !line.is_empty() && !line.starts_with('#') {
                points.push(crate::geometry::parse_point(line, i + 1)?);
            }
        }
        DividedSet::new(PointSet::new(points)?, split)
    }

    pub fn to_text(&self) -> String {
        format!("split {}\n{}", self.split, self.base.to_text())
    }
}

impl FromStr for DividedSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DividedSet::parse(s)
    }
}

impl fmt::Display for DividedSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl Chirotope for DividedSet {
    fn len(&self) -> usize {
        self.base.len()
    }

    fn orient(&self, i: usize, j: usize, k: usize) -> Orientation {
        self.base.orient(i, j, k)
    }
}

pub fn divide(set: PointSet, size_a: usize) -> Result<DividedSet> {
    DividedSet::new(set, size_a)
}

/// All k-holes with a vertex on each side of the line, sorted.
pub fn enumerate_divided_k_holes(d: &DividedSet, k: usize) -> Vec<HoleSet> {
    let index = HoleIndex::new(&d.base);
    let mut out: Vec<HoleSet> = index
        .holes(k, Some(d.split))
        .into_iter()
        .map(|h| HoleSet::new(h, Some(d.split)))
        .collect();
    out.sort_by(|a, b| a.indices.cmp(&b.indices));
    out
}

/// The open region beyond one edge of a convex polygon, left of the
/// directed lines `p1 p2`, `p1 pk` and `p(k-1) pk`.
#[derive(Clone, Debug)]
pub struct Sector {
    lines: [(Point, Point); 3],
}

impl Sector {
    pub fn contains(&self, q: &Point) -> bool {
        self.lines
            .iter()
            .all(|(a, b)| orientation(a, b, q) == Orientation::Counterclockwise)
    }
}

/// The sector `S(p_i, p_(i+1), .., p_(i-1))` of a counterclockwise convex
/// polygon, indices taken cyclically.
pub fn sector(poly: &[Point], i: usize) -> Result<Sector> {
    let k = poly.len();
    if k < 3 || !(0..k).all(|s| orientation(&poly[s], &poly[(s + 1) % k], &poly[(s + 2) % k]) == Orientation::Counterclockwise) {
        return Err(Error::NotConvex);
    }
    let at = |off: usize| poly[(i + off) % k].clone();
    let (p1, p2, pk1, pk) = (at(0), at(1), at(k - 2), at(k - 1));
    Ok(Sector {
        lines: [(p1.clone(), p2), (p1, pk.clone()), (pk1, pk)],
    })
}

/// Sector membership by index, for a counterclockwise polygon given by
/// indices into `c`.
pub fn sector_contains<C: Chirotope + ?Sized>(c: &C, poly: &[usize], i: usize, q: usize) -> bool {
    let k = poly.len();
    let at = |off: usize| poly[(i + off) % k];
    let (p1, p2, pk1, pk) = (at(0), at(1), at(k - 2), at(k - 1));
    c.ccw(p1, p2, q) && c.ccw(p1, pk, q) && c.ccw(pk1, pk, q)
}

/// The regions around one point `a` of `A` cut out by the rays towards the
/// other points of `A`.
///
/// Rays are labeled clockwise starting below the upward vertical direction:
/// `rays[k - 1]` is `a_k` for `k = 1..=m` with `m = |A| - 1`, and `a_0 = a_m`.
/// Wedge `W_k` runs clockwise from `a_(k-1)` to `a_k`, so `W_1` contains the
/// upward direction and is the topmost wedge met by the line. The rays to
/// points right of the apex come first, which makes `W_1..W_t` exactly the
/// wedges that reach the line.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WedgeDecomposition {
    pub apex: usize,
    pub rays: Vec<usize>,
    pub t: usize,
    /// `w[k - 1]` is the number of points of `B` in `W_k`.
    pub w: Vec<usize>,
    /// `membership[b - split]` is the wedge number of each point of `B`.
    pub membership: Vec<usize>,
    convex: Vec<bool>,
}

impl WedgeDecomposition {
    pub fn wedge_count(&self) -> usize {
        self.rays.len()
    }

    /// `a_k` with indices modulo `m`.
    pub fn a(&self, k: usize) -> usize {
        let m = self.rays.len();
        self.rays[(k + m - 1) % m]
    }

    pub fn w(&self, k: usize) -> usize {
        self.w[k - 1]
    }

    pub fn is_convex(&self, k: usize) -> bool {
        self.convex[k - 1]
    }

    /// The non-convex wedge, present exactly when the apex is extremal in `A`.
    pub fn nonconvex_wedge(&self) -> Option<usize> {
        self.convex.iter().position(|c| !c).map(|i| i + 1)
    }

    pub fn contains<C: Chirotope + ?Sized>(&self, c: &C, k: usize, q: usize) -> bool {
        if self.rays.len() == 1 {
            return q != self.apex && q != self.rays[0];
        }
        let (r1, r2) = (self.a(k - 1), self.a(k));
        let after_first = c.orient(self.apex, r1, q) == Orientation::Clockwise;
        let before_second = c.ccw(self.apex, r2, q);
        if self.convex[k - 1] {
            after_first && before_second
        } else {
            after_first || before_second
        }
    }

    /// Whether `W_i ∪ .. ∪ W_j` (consecutive, `i <= j`, fewer than all
    /// wedges) is convex.
    pub fn union_is_convex<C: Chirotope + ?Sized>(&self, c: &C, i: usize, j: usize) -> bool {
        let m = self.rays.len();
        if j - i + 1 >= m {
            return false;
        }
        c.orient(self.apex, self.a(i - 1), self.a(j)) == Orientation::Clockwise
    }

    /// Points of `B` in `W_k`, ascending (leftmost first).
    pub fn b_in(&self, k: usize, split: usize) -> Vec<usize> {
        self.membership
            .iter()
            .enumerate()
            .filter(|&(_, &wk)| wk == k)
            .map(|(i, _)| split + i)
            .collect()
    }
}

/// Rightmost point of `A` that is not a hull vertex of `A`.
pub fn star_apex<C: Chirotope + ?Sized>(c: &C, split: usize) -> Option<usize> {
    let a: Vec<usize> = (0..split).collect();
    let h = hull(c, &a);
    (0..split).rev().find(|i| !h.contains(i))
}

pub fn wedges<C: Chirotope + ?Sized>(c: &C, split: usize, apex: usize) -> WedgeDecomposition {
    assert!(split >= 2 && apex < split, "need an apex in A and another point of A");
    let cw_before = |a: usize, b: usize| {
        if c.orient(apex, a, b) == Orientation::Clockwise {
            std::cmp::Ordering::Less
        } else {
            std::cmp::Ordering::Greater
        }
    };
    let mut right: Vec<usize> = (apex + 1..split).collect();
    let mut left: Vec<usize> = (0..apex).collect();
    right.sort_by(|&a, &b| cw_before(a, b));
    left.sort_by(|&a, &b| cw_before(a, b));
    let right_count = right.len();
    let mut rays = right;
    rays.extend(left);
    let m = rays.len();
    let t = (right_count + 1).min(m);
    let convex = (1..=m)
        .map(|k| c.orient(apex, rays[(k + m - 2) % m], rays[k - 1]) == Orientation::Clockwise)
        .collect();
    let mut wd = WedgeDecomposition {
        apex,
        rays,
        t,
        w: vec![0; m],
        membership: Vec::new(),
        convex,
    };
    let n = c.len();
    for b in split..n {
        let k = (1..=wd.t)
            .find(|&k| wd.contains(c, k, b))
            .expect("every point right of the line lies in a wedge that meets it");
        wd.w[k - 1] += 1;
        wd.membership.push(k);
    }
    wd
}

/// Which point of `A` to use as apex.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Apex {
    Point(usize),
    /// The rightmost inner point of `A`.
    Star,
}

pub fn wedge_decomposition(d: &DividedSet, apex: Apex) -> Result<WedgeDecomposition> {
    let apex = match apex {
        Apex::Point(i) if i < d.split && d.split >= 2 => i,
        Apex::Point(i) => return Err(Error::Precondition(format!("apex {i} is not a point of A with |A| >= 2"))),
        Apex::Star => star_apex(&d.base, d.split).ok_or(Error::NoInnerPoint)?,
    };
    Ok(wedges(&d.base, d.split, apex))
}

/// The leftmost point `b` of `B` in `W_k` together with the 4-hole
/// `{a*, a_(k-1), b, a_k}` it spans, checked with exact coordinates.
pub fn leftmost_in_wedge(d: &DividedSet, wd: &WedgeDecomposition, k: usize) -> Result<(usize, HoleSet)> {
    let b = *wd.b_in(k, d.split).first().ok_or(Error::EmptyWedge(k))?;
    let hole = HoleSet::new(vec![wd.apex, wd.a(k - 1), b, wd.a(k)], Some(d.split));
    if !is_k_hole(&d.base, &hole.indices) {
        return Err(Error::Precondition(format!(
            "{:?} is not a 4-hole; the apex must be the rightmost inner point of A",
            hole.indices
        )));
    }
    Ok((b, hole))
}

/// No point outside `q` (ascending) lies inside its convex hull.
pub fn is_island<C: Chirotope + ?Sized>(c: &C, q: &[usize]) -> bool {
    if q.len() <= 2 {
        return true;
    }
    let h = hull(c, q);
    let mut member = vec![false; c.len()];
    for &i in q {
        member[i] = true;
    }
    (0..c.len()).all(|p| member[p] || !in_convex_polygon(c, &h, p))
}

fn parts(q: &[usize], split: usize) -> (Vec<usize>, Vec<usize>) {
    q.iter().partition(|&&i| i < split)
}

/// Removing `x` from `q` leaves both parts out of convex position.
fn removal_keeps_both_nonconvex<C: Chirotope + ?Sized>(c: &C, q: &[usize], split: usize, x: usize) -> bool {
    let rest: Vec<usize> = q.iter().copied().filter(|&i| i != x).collect();
    let (a, b) = parts(&rest, split);
    !is_convex_subset(c, &a) && !is_convex_subset(c, &b)
}

/// ℓ-criticality of the sub-configuration `q` (ascending).
pub fn is_ell_critical_subset<C: Chirotope + ?Sized>(c: &C, q: &[usize], split: usize) -> bool {
    let (a, b) = parts(q, split);
    if is_convex_subset(c, &a) || is_convex_subset(c, &b) {
        return false;
    }
    hull(c, q)
        .into_iter()
        .all(|x| !removal_keeps_both_nonconvex(c, q, split, x))
}

pub fn is_ell_critical(d: &DividedSet) -> bool {
    let all: Vec<usize> = (0..d.len()).collect();
    is_ell_critical_subset(&d.base, &all, d.split)
}

/// The island reached by repeatedly deleting the smallest-index extremal
/// point whose removal keeps both parts out of convex position. Stops when
/// the island is ℓ-critical or one of its parts has exactly five points.
pub fn ell_critical_reduce_indices<C: Chirotope + ?Sized>(c: &C, split: usize) -> Result<Vec<usize>> {
    let mut q: Vec<usize> = (0..c.len()).collect();
    {
        let (a, b) = parts(&q, split);
        if is_convex_subset(c, &a) || is_convex_subset(c, &b) {
            return Err(Error::Precondition("both parts must be out of convex position".into()));
        }
    }
    loop {
        let size_a = q.iter().filter(|&&i| i < split).count();
        if size_a == 5 || q.len() - size_a == 5 {
            return Ok(q);
        }
        let mut extremal = hull(c, &q);
        extremal.sort_unstable();
        match extremal.into_iter().find(|&x| removal_keeps_both_nonconvex(c, &q, split, x)) {
            Some(x) => q.retain(|&i| i != x),
            None => return Ok(q),
        }
    }
}

/// The reduced island as a divided set, with its indices in `d`.
pub fn ell_critical_reduce(d: &DividedSet) -> Result<(DividedSet, Vec<usize>)> {
    let q = ell_critical_reduce_indices(&d.base, d.split)?;
    Ok((d.restrict(&q)?, q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Rational;

    fn pt(x: (i64, i64), y: (i64, i64)) -> Point {
        Point::from_fractions(x.0, x.1, y.0, y.1)
    }

    fn parabola(n: i64) -> PointSet {
        PointSet::from_ints(&(1..=n).map(|i| (i, i * i)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn divide_sizes() {
        let d = divide(parabola(11), 5).unwrap();
        assert_eq!((d.size_a(), d.size_b()), (5, 6));
        assert!(divide(parabola(9), 0).is_err());
        assert!(divide(parabola(9), 9).is_err());
    }

    #[test]
    fn parabola_divided_holes() {
        let d = divide(parabola(10), 5).unwrap();
        assert_eq!(enumerate_divided_k_holes(&d, 5).len(), 252 - 2);
    }

    #[test]
    fn square_sector() {
        let sq: Vec<Point> = [(0, 0), (1, 0), (1, 1), (0, 1)].iter().map(|&(x, y)| Point::from_ints(x, y)).collect();
        let s = sector(&sq, 0).unwrap();
        assert!(!s.contains(&Point::from_ints(-1, -1)));
        assert!(s.contains(&pt((-1, 1), (1, 2))));
        for i in 0..4 {
            let s = sector(&sq, i).unwrap();
            assert!(sq.iter().all(|p| !s.contains(p)));
        }
        let mut cw = sq.clone();
        cw.reverse();
        assert!(sector(&cw, 0).is_err());
    }

    fn star_example() -> DividedSet {
        // A = (-3,0), (-2,0), (-1,2), (-9/10,-2); B to the right of x = -1/2
        let points = vec![
            Point::from_ints(-3, 0),
            Point::from_ints(-2, 0),
            Point::from_ints(-1, 2),
            pt((-9, 10), (-2, 1)),
            Point::from_ints(1, 5),
            Point::from_ints(2, -1),
            Point::from_ints(3, 1),
        ];
        DividedSet::new(PointSet::new(points).unwrap(), 4).unwrap()
    }

    #[test]
    fn star_wedges() {
        let d = star_example();
        let wd = wedge_decomposition(&d, Apex::Star).unwrap();
        assert_eq!(wd.apex, 1);
        assert_eq!(wd.wedge_count(), 3);
        assert_eq!(wd.t, 3);
        // a_1, a_2 are the two points right of a*, topmost first; a_3 is left
        assert_eq!(wd.rays, vec![2, 3, 0]);
        assert_eq!(wd.w.iter().sum::<usize>(), d.size_b());
        assert!((1..=3).all(|k| wd.is_convex(k)));
        for k in 1..=wd.t {
            if wd.w(k) > 0 {
                let (_, hole) = leftmost_in_wedge(&d, &wd, k).unwrap();
                assert!(is_k_hole(d.base(), &hole.indices));
            }
        }
    }

    #[test]
    fn star_needs_inner_point() {
        let d = divide(parabola(8), 4).unwrap();
        assert!(matches!(wedge_decomposition(&d, Apex::Star), Err(Error::NoInnerPoint)));
        let wd = wedge_decomposition(&d, Apex::Point(0)).unwrap();
        assert_eq!(wd.nonconvex_wedge().map(|k| wd.is_convex(k)), Some(false));
        assert_eq!(wd.t, 3);
        let wd = wedge_decomposition(&d, Apex::Point(3)).unwrap();
        assert_eq!(wd.t, 1);
        assert_eq!(wd.w(1), 4);
    }

    #[test]
    fn wedges_cover_b_exactly_once() {
        let d = star_example();
        for apex in 0..4 {
            let wd = wedge_decomposition(&d, Apex::Point(apex)).unwrap();
            for b in 4..7 {
                let hits = (1..=wd.wedge_count()).filter(|&k| wd.contains(&d, k, b)).count();
                assert_eq!(hits, 1, "apex {apex} point {b}");
            }
        }
    }

    #[test]
    fn islands() {
        let s = PointSet::from_ints(&[(0, 0), (6, 0), (3, 9), (4, 3)]).unwrap();
        let all: Vec<usize> = (0..4).collect();
        assert!(is_island(&s, &all));
        let mut h = s.convex_hull();
        h.sort();
        assert!(!is_island(&s, &h));
    }

    #[test]
    fn critical_examples() {
        assert!(!is_ell_critical(&divide(parabola(10), 5).unwrap()));
    }

    #[test]
    fn line_is_between_parts() {
        let d = divide(parabola(6), 2).unwrap();
        assert_eq!(d.line_x(), Rational::new(5.into(), 2.into()));
    }

    #[test]
    fn text_round_trip() {
        let d = star_example();
        let back: DividedSet = d.to_text().parse().unwrap();
        assert_eq!(back, d);
        assert!("split 0\n0 0\n1 1\n".parse::<DividedSet>().is_err());
    }
}
