//! Exact planar predicates over rational coordinates.
//!
//! Every predicate here is decided exactly. Coordinates are arbitrary
//! precision rationals; a [`PointSet`] additionally keeps a copy of its
//! coordinates scaled to a common denominator so that orientation tests
//! reduce to integer determinants, evaluated in `i128` whenever the scaled
//! values are small enough and with big integers otherwise.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::chirotope::{self, Chirotope};
use crate::error::{Error, Result};

pub type Rational = BigRational;

/// Scaled coordinates up to this magnitude keep every 2x2 determinant inside `i128`.
const SMALL_LIMIT: i64 = 1 << 61;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Point {
    pub x: Rational,
    pub y: Rational,
}

impl Point {
    pub fn new(x: Rational, y: Rational) -> Self {
        Point { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Point::new(Rational::from_integer(x.into()), Rational::from_integer(y.into()))
    }

    /// `x = xn/xd`, `y = yn/yd`.
    pub fn from_fractions(xn: i64, xd: i64, yn: i64, yd: i64) -> Self {
        Point::new(
            Rational::new(xn.into(), xd.into()),
            Rational::new(yn.into(), yd.into()),
        )
    }

    fn small_integer(&self) -> Option<(i64, i64)> {
        if !self.x.denom().is_one() || !self.y.denom().is_one() {
            return None;
        }
        let x = self.x.numer().to_i64()?;
        let y = self.y.numer().to_i64()?;
        (x.abs() < SMALL_LIMIT && y.abs() < SMALL_LIMIT).then_some((x, y))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    Clockwise,
    Counterclockwise,
    Collinear,
}

impl Orientation {
    pub fn from_sign(sign: Ordering) -> Self {
        match sign {
            Ordering::Greater => Orientation::Counterclockwise,
            Ordering::Less => Orientation::Clockwise,
            Ordering::Equal => Orientation::Collinear,
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            Orientation::Clockwise => Orientation::Counterclockwise,
            Orientation::Counterclockwise => Orientation::Clockwise,
            Orientation::Collinear => Orientation::Collinear,
        }
    }

    pub fn is_ccw(self) -> bool {
        self == Orientation::Counterclockwise
    }

    pub fn is_cw(self) -> bool {
        self == Orientation::Clockwise
    }
}

fn det_sign_i128(a: (i64, i64), b: (i64, i64), c: (i64, i64)) -> Ordering {
    let (ax, ay) = (a.0 as i128, a.1 as i128);
    let det = (b.0 as i128 - ax) * (c.1 as i128 - ay) - (b.1 as i128 - ay) * (c.0 as i128 - ax);
    det.cmp(&0)
}

fn det_sign_big<T>(ax: &T, ay: &T, bx: &T, by: &T, cx: &T, cy: &T) -> Ordering
where
    T: Clone + Signed,
    for<'a> &'a T: std::ops::Sub<&'a T, Output = T>,
{
    let det = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
    if det.is_positive() {
        Ordering::Greater
    } else if det.is_negative() {
        Ordering::Less
    } else {
        Ordering::Equal
    }
}

/// Sign of the determinant of `(b - a, c - a)`.
pub fn orientation(a: &Point, b: &Point, c: &Point) -> Orientation {
    if let (Some(a), Some(b), Some(c)) = (a.small_integer(), b.small_integer(), c.small_integer()) {
        return Orientation::from_sign(det_sign_i128(a, b, c));
    }
    Orientation::from_sign(det_sign_big(&a.x, &a.y, &b.x, &b.y, &c.x, &c.y))
}

/// First collinear triple `i < j < k` in lexicographic order, if any.
pub fn collinear_triple(points: &[Point]) -> Option<[usize; 3]> {
    let n = points.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if orientation(&points[i], &points[j], &points[k]) == Orientation::Collinear {
                    return Some([i, j, k]);
                }
            }
        }
    }
    None
}

pub fn is_general_position(points: &[Point]) -> bool {
    collinear_triple(points).is_none()
}

/// Applies the shear `x' = x + delta * y` with a rational `delta` small
/// enough that distinct x-coordinates keep their order and points sharing
/// an x-coordinate are separated. Shears have determinant one, so every
/// orientation is preserved.
pub fn shear_to_distinct_x(points: &[Point]) -> Result<Vec<Point>> {
    for (i, p) in points.iter().enumerate() {
        if let Some(q) = points[..i].iter().find(|q| *q == p) {
            return Err(Error::DuplicatePoint(Box::new(q.clone())));
        }
    }
    let mut xs: Vec<&Rational> = points.iter().map(|p| &p.x).collect();
    xs.sort();
    xs.dedup();
    if xs.len() == points.len() {
        return Ok(points.to_vec());
    }
    let min_gap = xs
        .windows(2)
        .map(|w| w[1] - w[0])
        .min()
        .unwrap_or_else(Rational::one);
    let y_min = points.iter().map(|p| &p.y).min().cloned().unwrap_or_else(Rational::zero);
    let y_max = points.iter().map(|p| &p.y).max().cloned().unwrap_or_else(Rational::zero);
    // |delta * (y_i - y_j)| < min_gap for every pair.
    let delta = min_gap / ((y_max - y_min + Rational::one()) * Rational::from_integer(2.into()));
    Ok(points
        .iter()
        .map(|p| Point::new(&p.x + &delta * &p.y, p.y.clone()))
        .collect())
}

#[derive(Clone, Debug)]
enum Coords {
    Small(Vec<(i64, i64)>),
    Big(Vec<(BigInt, BigInt)>),
}

/// A finite planar point set in general position with pairwise distinct
/// x-coordinates. Points are stored sorted by x; every index-based API in
/// this crate refers to that order.
#[derive(Clone, Debug)]
pub struct PointSet {
    points: Vec<Point>,
    coords: Coords,
}

impl PartialEq for PointSet {
    fn eq(&self, other: &Self) -> bool {
        self.points == other.points
    }
}

impl Eq for PointSet {}

impl PointSet {
    /// Sorts by x and validates distinct x-coordinates and general position.
    pub fn new(mut points: Vec<Point>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Empty);
        }
        points.sort_by(|a, b| a.x.cmp(&b.x).then_with(|| a.y.cmp(&b.y)));
        for w in points.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicatePoint(Box::new(w[0].clone())));
            }
            if w[0].x == w[1].x {
                return Err(Error::SharedX(Box::new(w[0].clone()), Box::new(w[1].clone())));
            }
        }
        let set = PointSet {
            coords: scale_to_integers(&points),
            points,
        };
        if let Some([i, j, k]) = set.first_collinear() {
            return Err(Error::Collinear(
                Box::new(set.points[i].clone()),
                Box::new(set.points[j].clone()),
                Box::new(set.points[k].clone()),
            ));
        }
        Ok(set)
    }

    pub fn from_ints(coords: &[(i64, i64)]) -> Result<Self> {
        Self::new(coords.iter().map(|&(x, y)| Point::from_ints(x, y)).collect())
    }

    fn first_collinear(&self) -> Option<[usize; 3]> {
        let n = self.len();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    if self.orient(i, j, k) == Orientation::Collinear {
                        return Some([i, j, k]);
                    }
                }
            }
        }
        None
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &Point {
        &self.points[i]
    }

    /// The points at `indices` as a new set (indices are re-ranked by x).
    pub fn subset(&self, indices: &[usize]) -> PointSet {
        let mut sorted = indices.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let points: Vec<Point> = sorted.iter().map(|&i| self.points[i].clone()).collect();
        let coords = match &self.coords {
            Coords::Small(c) => Coords::Small(sorted.iter().map(|&i| c[i]).collect()),
            Coords::Big(c) => Coords::Big(sorted.iter().map(|&i| c[i].clone()).collect()),
        };
        PointSet { points, coords }
    }

    /// Adds points (re-validating everything).
    pub fn with_points(&self, extra: impl IntoIterator<Item = Point>) -> Result<PointSet> {
        let mut pts = self.points.clone();
        pts.extend(extra);
        PointSet::new(pts)
    }

    /// Parses the text format: one point per line, two whitespace separated
    /// fields, each an integer or `p/q`; lines starting with `#` are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut points = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            points.push(parse_point(line, lineno + 1)?);
        }
        PointSet::new(points)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for p in &self.points {
            out.push_str(&format!("{} {}\n", p.x, p.y));
        }
        out
    }

    /// Counterclockwise hull, starting at the leftmost point.
    pub fn convex_hull(&self) -> Vec<usize> {
        let all: Vec<usize> = (0..self.len()).collect();
        chirotope::hull(self, &all)
    }

    pub fn is_convex_position(&self) -> bool {
        self.convex_hull().len() == self.len()
    }
}

impl Chirotope for PointSet {
    fn len(&self) -> usize {
        self.points.len()
    }

    fn orient(&self, i: usize, j: usize, k: usize) -> Orientation {
        match &self.coords {
            Coords::Small(c) => Orientation::from_sign(det_sign_i128(c[i], c[j], c[k])),
            Coords::Big(c) => {
                let (a, b, d) = (&c[i], &c[j], &c[k]);
                Orientation::from_sign(det_sign_big(&a.0, &a.1, &b.0, &b.1, &d.0, &d.1))
            }
        }
    }
}

impl FromStr for PointSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PointSet::parse(s)
    }
}

pub(crate) fn parse_point(line: &str, lineno: usize) -> Result<Point> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != 2 {
        return Err(Error::Parse {
            line: lineno,
            message: format!("expected two fields, found {}", fields.len()),
        });
    }
    let parse = |s: &str| {
        Rational::from_str(s).map_err(|_| Error::Parse {
            line: lineno,
            message: format!("invalid number {s:?}"),
        })
    };
    Ok(Point::new(parse(fields[0])?, parse(fields[1])?))
}

fn scale_to_integers(points: &[Point]) -> Coords {
    let mut lcm = BigInt::one();
    for p in points {
        lcm = lcm.lcm(p.x.denom()).lcm(p.y.denom());
    }
    let scaled: Vec<(BigInt, BigInt)> = points
        .iter()
        .map(|p| {
            let sx = p.x.numer() * (&lcm / p.x.denom());
            let sy = p.y.numer() * (&lcm / p.y.denom());
            (sx, sy)
        })
        .collect();
    let small: Option<Vec<(i64, i64)>> = scaled
        .iter()
        .map(|(x, y)| {
            let (x, y) = (x.to_i64()?, y.to_i64()?);
            (x.abs() < SMALL_LIMIT && y.abs() < SMALL_LIMIT).then_some((x, y))
        })
        .collect();
    match small {
        Some(s) => Coords::Small(s),
        None => Coords::Big(scaled),
    }
}

/// An index subset certified to be a k-hole. `divided` records whether the
/// hole has vertices on both sides of a splitting line (always `false` for
/// holes enumerated without a split).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HoleSet {
    pub indices: Vec<usize>,
    pub divided: bool,
}

impl HoleSet {
    pub fn new(mut indices: Vec<usize>, split: Option<usize>) -> Self {
        indices.sort_unstable();
        let divided = split.is_some_and(|s| indices[0] < s && *indices.last().unwrap() >= s);
        HoleSet { indices, divided }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// True iff `hole` is in convex position and its hull contains no other point.
pub fn is_k_hole(set: &PointSet, hole: &[usize]) -> bool {
    let mut sorted = hole.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() < 3 || sorted.len() != hole.len() {
        return false;
    }
    let polygon = chirotope::hull(set, &sorted);
    if polygon.len() != sorted.len() {
        return false;
    }
    let (lo, hi) = (sorted[0], *sorted.last().unwrap());
    // Points outside the x-range of the polygon cannot lie inside it.
    (lo + 1..hi)
        .filter(|i| sorted.binary_search(i).is_err())
        .all(|q| !chirotope::in_convex_polygon(set, &polygon, q))
}

/// All k-holes, as sorted index sets in lexicographic order.
///
/// Plain subset enumeration: a partial subset is abandoned as soon as it
/// stops being in convex position, which already happens at four points for
/// most subsets. Intended for small sets; see [`crate::holes`] for the
/// counting routine used on large inputs.
pub fn enumerate_k_holes(set: &PointSet, k: usize) -> Vec<HoleSet> {
    let mut out = Vec::new();
    if k < 3 || k > set.len() {
        return out;
    }
    let mut chosen = Vec::with_capacity(k);
    extend_subset(set, k, 0, &mut chosen, &mut out);
    out
}

fn extend_subset(set: &PointSet, k: usize, start: usize, chosen: &mut Vec<usize>, out: &mut Vec<HoleSet>) {
    if chosen.len() == k {
        if is_k_hole(set, chosen) {
            out.push(HoleSet::new(chosen.clone(), None));
        }
        return;
    }
    let remaining = k - chosen.len();
    for i in start..=set.len() - remaining {
        chosen.push(i);
        if chosen.len() < 4 || chirotope::is_convex_subset(set, chosen) {
            extend_subset(set, k, i + 1, chosen, out);
        }
        chosen.pop();
    }
}
