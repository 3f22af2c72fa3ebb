//! Explicit point sets: an ℓ-critical family with four points left of the
//! line and no divided 5-hole, Horton sets, and small sets with few 5-holes.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::divided::{is_ell_critical, DividedSet};
use crate::error::{Error, Result};
use crate::geometry::{orientation, shear_to_distinct_x, Orientation, Point, PointSet, Rational};
use crate::holes::HoleIndex;

fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn pt(x: Rational, y: Rational) -> Point {
    Point::new(x, y)
}

/// Parameters the carrot construction settled on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CarrotParams {
    /// Points of `B`.
    pub n: usize,
    /// Distance of `a_1, a_2` from `(0, 1)`; `a_3, a_4` sit at `delta * (4, 3)` from `(0, -1)`.
    pub delta: String,
    /// Vertical lift of the inner point of `B`.
    pub eta: String,
    /// Strength of the parabolic bend applied to the other points of `B`.
    pub epsilon: String,
    /// Shear `x -> x + shear * y` that separates `a_1` and `a_2` in x.
    pub shear: String,
}

/// Replacing `moved_from` by `moved_to` keeps the orientation of every
/// non-collinear triple it forms with one of `pairs`.
fn same_orientations(pairs: &[(Point, Point)], moved_from: &Point, moved_to: &Point) -> bool {
    pairs.iter().all(|(c, d)| {
        let o = orientation(moved_from, c, d);
        o == Orientation::Collinear || o == orientation(moved_to, c, d)
    })
}

fn all_pairs(points: &[Point]) -> Vec<(Point, Point)> {
    let mut out = Vec::new();
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            out.push((points[i].clone(), points[j].clone()));
        }
    }
    out
}

/// `B'`: alternating intersections with the lines `y = x/4` and `y = -x/4`
/// of the segments from `(0, 1)` and `(0, -1)`. Index 0 is `b_1'`.
fn carrot_skeleton(n: usize) -> Vec<Point> {
    let mut b = vec![pt(q(2, 1), q(-1, 2))];
    for i in 2..=n {
        let prev = b.last().unwrap().clone();
        let next = if i % 2 == 0 {
            // (t x, 1 + t (y - 1)) on y = x/4
            let t = Rational::one() / (&prev.x / q(4, 1) - &prev.y + Rational::one());
            pt(&t * &prev.x, Rational::one() + &t * (&prev.y - Rational::one()))
        } else {
            // (t x, -1 + t (y + 1)) on y = -x/4
            let t = Rational::one() / (&prev.x / q(4, 1) + &prev.y + Rational::one());
            pt(&t * &prev.x, -Rational::one() + &t * (&prev.y + Rational::one()))
        };
        b.push(next);
    }
    b
}

/// Builds the set for odd `n`: `A` of four points followed by `B`, in the
/// order `a_1..a_4, b_1..b_n`.
fn carrot_odd(n: usize) -> Result<(Vec<Point>, Vec<Point>, [Rational; 3])> {
    let bp = carrot_skeleton(n);
    let p_plus = pt(Rational::zero(), Rational::one());
    let p_minus = pt(Rational::zero(), -Rational::one());
    let b_pairs = all_pairs(&bp);

    let mut delta = q(1, 8);
    let a = loop {
        let a1 = pt(Rational::zero(), Rational::one() + &delta);
        let a2 = pt(Rational::zero(), Rational::one() - &delta);
        let a3 = pt(-q(4, 1) * &delta, -Rational::one() - q(3, 1) * &delta);
        let a4 = pt(q(4, 1) * &delta, -Rational::one() + q(3, 1) * &delta);
        let ok = a4.x < bp[n - 1].x
            && same_orientations(&b_pairs, &p_plus, &a1)
            && same_orientations(&b_pairs, &p_plus, &a2)
            && same_orientations(&b_pairs, &p_minus, &a3)
            && same_orientations(&b_pairs, &p_minus, &a4);
        if ok {
            break vec![a1, a2, a3, a4];
        }
        delta /= q(2, 1);
        if delta < q(1, 1 << 40) {
            return Err(Error::Precondition("no admissible placement for A".into()));
        }
    };

    // A ∪ B' without b_3'
    let mut rest: Vec<Point> = a.clone();
    rest.extend(bp.iter().enumerate().filter(|&(i, _)| i != 2).map(|(_, p)| p.clone()));
    let rest_pairs = all_pairs(&rest);
    let mut eta = q(1, 16);
    let b3 = loop {
        let b3 = pt(bp[2].x.clone(), &bp[2].y + &eta);
        if same_orientations(&rest_pairs, &bp[2], &b3) {
            break b3;
        }
        eta /= q(2, 1);
        if eta < q(1, 1 << 40) {
            return Err(Error::Precondition("no admissible lift for b_3".into()));
        }
    };

    // bend: odd positions (b_2, b_4, ..) lie on y = x/4 and move down,
    // even positions (b_1, b_5, ..) lie on y = -x/4 and move up
    let mut before: Vec<Point> = a.clone();
    before.extend(bp.iter().enumerate().map(|(i, p)| if i == 2 { b3.clone() } else { p.clone() }));
    let mut epsilon = q(1, 64);
    loop {
        let after: Vec<Point> = before
            .iter()
            .enumerate()
            .map(|(idx, p)| {
                if idx < 4 || idx == 6 {
                    return p.clone();
                }
                let bend = &epsilon * &p.x * &p.x;
                if (idx - 4) % 2 == 1 {
                    pt(p.x.clone(), &p.y - bend)
                } else {
                    pt(p.x.clone(), &p.y + bend)
                }
            })
            .collect();
        if preserves_orientations(&before, &after) {
            return Ok((after[..4].to_vec(), after[4..].to_vec(), [delta, eta, epsilon]));
        }
        epsilon /= q(2, 1);
        if epsilon < q(1, 1 << 40) {
            return Err(Error::Precondition("no admissible bend".into()));
        }
    }
}

fn preserves_orientations(before: &[Point], after: &[Point]) -> bool {
    let n = before.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let o = orientation(&before[i], &before[j], &before[k]);
                if o != Orientation::Collinear && o != orientation(&after[i], &after[j], &after[k]) {
                    return false;
                }
            }
        }
    }
    true
}

/// An ℓ-critical set with `|A| = 4`, `|B| = n` and no divided 5-hole.
pub fn construct_carrot(n: usize) -> Result<DividedSet> {
    construct_carrot_with_params(n).map(|(d, _)| d)
}

pub fn construct_carrot_with_params(n: usize) -> Result<(DividedSet, CarrotParams)> {
    if n < 5 {
        return Err(Error::Precondition(format!("the construction needs n >= 5, got {n}")));
    }
    let odd = if n % 2 == 1 { n } else { n + 1 };
    let (a, mut b, [delta, eta, epsilon]) = carrot_odd(odd)?;
    if n.is_multiple_of(2) {
        b.remove(1);
    }
    let mut all = a;
    all.extend(b);
    let sheared = shear_to_distinct_x(&all)?;
    // the shear is x -> x + s y; recover s from a_1, a_2 which share x = 0
    let shear = (&sheared[0].x - &sheared[1].x) / (&all[0].y - &all[1].y);
    let set = PointSet::new(sheared)?;
    let d = DividedSet::new(set, 4)?;
    let params = CarrotParams {
        n,
        delta: delta.to_string(),
        eta: eta.to_string(),
        epsilon: epsilon.to_string(),
        shear: shear.to_string(),
    };
    Ok((d, params))
}

/// Checks the two defining properties of the carrot sets.
pub fn carrot_certificate(d: &DividedSet) -> (bool, u64) {
    (is_ell_critical(d), HoleIndex::new(d.base()).count_divided(5, d.split()))
}

/// `n` points with no 7-hole: the points at even positions and at odd
/// positions in x-order are Horton sets themselves, and the odd ones are
/// lifted so far that each half lies entirely on one side of every line
/// through two points of the other half.
pub fn construct_horton(n: usize) -> Result<PointSet> {
    if n == 0 {
        return Err(Error::Empty);
    }
    let ys = horton_heights(n);
    let pts: Vec<Point> = ys
        .into_iter()
        .enumerate()
        .map(|(i, y)| Point::new(Rational::from_integer(BigInt::from(i)), Rational::from_integer(y)))
        .collect();
    PointSet::new(pts)
}

/// Heights for x = 0..n-1.
fn horton_heights(n: usize) -> Vec<BigInt> {
    if n == 1 {
        return vec![BigInt::zero()];
    }
    let even = horton_heights(n.div_ceil(2));
    let odd = horton_heights(n / 2);
    let range = |v: &[BigInt]| v.iter().max().unwrap() - v.iter().min().unwrap();
    // on 0..n a line through two points of one half stays within n * spread
    // of that half's height range
    let spread = range(&even).max(range(&odd));
    let lift = (spread * BigInt::from(2 * n) + BigInt::one()) * BigInt::from(2);
    (0..n)
        .map(|i| if i % 2 == 0 { even[i / 2].clone() } else { &odd[i / 2] + &lift })
        .collect()
}

/// Nine points with no 5-hole.
pub fn harborth_witness() -> PointSet {
    PointSet::from_ints(&[(16, 3), (24, 19), (27, 3), (22, 25), (18, 39), (37, 1), (21, 15), (19, 17), (1, 2)])
        .expect("valid witness")
}

/// Ten points with exactly one 5-hole.
pub fn one_five_hole_witness() -> PointSet {
    PointSet::from_ints(&[(12, 8), (27, 6), (5, 38), (10, 19), (16, 19), (18, 14), (28, 13), (32, 23), (0, 1), (8, 8)])
        .expect("valid witness")
}

/// A stored point set of size `n` with exactly `count` k-holes, if any.
pub fn frozen_witness(n: usize, k: usize, count: u64) -> Option<PointSet> {
    let candidates = [harborth_witness(), one_five_hole_witness()];
    candidates
        .into_iter()
        .find(|p| p.len() == n && HoleIndex::new(p).count(k) == count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::enumerate_k_holes;

    #[test]
    fn skeleton_points_lie_on_the_lines() {
        let b = carrot_skeleton(7);
        assert_eq!(b[1], pt(q(1, 1), q(1, 4)));
        assert_eq!(b[2], pt(q(2, 3), q(-1, 6)));
        for (i, p) in b.iter().enumerate() {
            let on = if i % 2 == 0 { -&p.x / q(4, 1) } else { &p.x / q(4, 1) };
            assert_eq!(p.y, on);
        }
        assert!(b.windows(2).all(|w| w[1].x < w[0].x));
    }

    #[test]
    fn small_carrots() {
        for n in 5..=9 {
            let d = construct_carrot(n).unwrap();
            assert_eq!((d.size_a(), d.size_b()), (4, n));
            // direct oracle: every divided 5-subset is checked against the hull test
            let divided = enumerate_k_holes(d.base(), 5).into_iter().filter(|h| h.indices[0] < 4 && h.indices[4] >= 4).count();
            assert_eq!(divided, 0, "n={n}");
            assert!(is_ell_critical(&d), "n={n}");
        }
    }

    #[test]
    fn carrot_rejects_small_n() {
        assert!(construct_carrot(4).is_err());
    }

    #[test]
    fn horton_small() {
        let h = construct_horton(4).unwrap();
        assert_eq!(h.len(), 4);
        let h = construct_horton(16).unwrap();
        let idx = HoleIndex::new(&h);
        assert_eq!(idx.count(7), 0);
        assert!(idx.count(5) > 0);
    }

    #[test]
    fn witnesses() {
        assert_eq!(enumerate_k_holes(&harborth_witness(), 5).len(), 0);
        assert_eq!(enumerate_k_holes(&one_five_hole_witness(), 5).len(), 1);
        assert!(frozen_witness(9, 5, 0).is_some());
        assert!(frozen_witness(10, 5, 1).is_some());
        assert!(frozen_witness(10, 5, 0).is_none());
    }
}
