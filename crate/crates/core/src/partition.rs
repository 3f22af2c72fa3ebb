//! Cutting a divided set into islands with `r` points on each side of the
//! line, and the 5-holes those islands guarantee.
//!
//! A halfplane with exactly `r` points of each part can always be bounded by
//! a line close to one through two points `p_i, p_j`: a slight translation
//! or rotation about the midpoint decides independently whether `p_i` and
//! `p_j` are inside, and nothing else moves across. So every pair, side and
//! choice of endpoints is a candidate, counted exactly.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::chirotope::{is_convex_subset, Chirotope};
use crate::divided::{is_island, DividedSet};
use crate::error::{Error, Result};
use crate::geometry::{Orientation, PointSet, Rational};
use crate::holes::HoleIndex;

/// The open halfplane `a x + b y > c`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Halfplane {
    pub a: String,
    pub b: String,
    pub c: String,
    /// Indices (ascending) of the points inside.
    pub inside: Vec<usize>,
}

fn side_count(inside: &[usize], split: usize) -> (usize, usize) {
    let a = inside.iter().filter(|&&i| i < split).count();
    (a, inside.len() - a)
}

/// An explicit line for the halfplane left of `p_i -> p_j`, pushed so that
/// `p_i` and `p_j` fall on the requested sides, checked by exact recount.
fn explicit_halfplane(set: &PointSet, members: &[usize], i: usize, j: usize, with_i: bool, with_j: bool) -> (Rational, Rational, Rational) {
    let pi = set.point(i);
    let pj = set.point(j);
    let two = Rational::from_integer(BigInt::from(2));
    let dx = &pj.x - &pi.x;
    let dy = &pj.y - &pi.y;
    let mx = (&pi.x + &pj.x) / &two;
    let my = (&pi.y + &pj.y) / &two;
    // f(p) = n.(p - m) + alpha d.(p - m) + beta with n = (-dy, dx) the left normal
    let mut gap: Option<Rational> = None;
    let mut reach = Rational::one();
    for &k in members {
        if k == i || k == j {
            continue;
        }
        let p = set.point(k);
        let ex = &p.x - &mx;
        let ey = &p.y - &my;
        let along = (&dx * &ex + &dy * &ey).abs();
        let across = (-&dy * &ex + &dx * &ey).abs();
        gap = Some(match gap {
            Some(g) if g < across => g,
            _ => across,
        });
        if along > reach {
            reach = along;
        }
    }
    let gap = gap.unwrap_or_else(Rational::one);
    let tau = gap / ((reach + Rational::one()) * &two);
    let (alpha, beta) = match (with_i, with_j) {
        (true, true) => (Rational::zero(), tau),
        (false, false) => (Rational::zero(), -tau),
        (false, true) => (tau, Rational::zero()),
        (true, false) => (-tau, Rational::zero()),
    };
    let a = -&dy + &alpha * &dx;
    let b = &dx + &alpha * &dy;
    let c = &a * &mx + &b * &my - beta;
    (a, b, c)
}

fn strictly_inside(set: &PointSet, k: usize, a: &Rational, b: &Rational, c: &Rational) -> bool {
    let p = set.point(k);
    a * &p.x + b * &p.y > *c
}

/// A halfplane containing exactly `r` points of each part of the
/// sub-configuration `members` (ascending indices of `d`).
pub fn balanced_halfplane_in(d: &DividedSet, members: &[usize], r: usize) -> Result<Halfplane> {
    let (na, nb) = side_count(members, d.split());
    if r == 0 || r > na || r > nb {
        return Err(Error::Precondition(format!("r = {r} does not fit parts of sizes {na} and {nb}")));
    }
    let set = d.base();
    let split = d.split();
    for (x, &i) in members.iter().enumerate() {
        for &j in &members[x + 1..] {
            for (s, t) in [(i, j), (j, i)] {
                // points strictly left of s -> t
                let (mut la, mut lb) = (0, 0);
                for &k in members {
                    if k != s && k != t && set.orient(s, t, k) == Orientation::Counterclockwise {
                        if k < split {
                            la += 1;
                        } else {
                            lb += 1;
                        }
                    }
                }
                for (with_s, with_t) in [(false, false), (true, false), (false, true), (true, true)] {
                    let extra = |with: bool, v: usize| usize::from(with && v < split);
                    let ca = la + extra(with_s, s) + extra(with_t, t);
                    let cb = lb + usize::from(with_s && s >= split) + usize::from(with_t && t >= split);
                    if ca != r || cb != r {
                        continue;
                    }
                    let (a, b, c) = explicit_halfplane(set, members, s, t, with_s, with_t);
                    let inside: Vec<usize> = members.iter().copied().filter(|&k| strictly_inside(set, k, &a, &b, &c)).collect();
                    let on_line = members.iter().any(|&k| {
                        let p = set.point(k);
                        &a * &p.x + &b * &p.y == c
                    });
                    if !on_line && side_count(&inside, split) == (r, r) {
                        return Ok(Halfplane {
                            a: a.to_string(),
                            b: b.to_string(),
                            c: c.to_string(),
                            inside,
                        });
                    }
                }
            }
        }
    }
    Err(Error::Precondition("no balanced halfplane found".into()))
}

pub fn balanced_halfplane(d: &DividedSet, r: usize) -> Result<Halfplane> {
    let all: Vec<usize> = (0..d.len()).collect();
    balanced_halfplane_in(d, &all, r)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IslandPartition {
    pub r: usize,
    /// Islands with exactly `r` points on each side, in the order cut off.
    pub islands: Vec<Vec<usize>>,
    /// What is left once one part has fewer than `r` points.
    pub remainder: Vec<usize>,
    pub halfplanes: Vec<Halfplane>,
}

impl IslandPartition {
    pub fn s(&self) -> usize {
        self.islands.len()
    }
}

/// Cuts off balanced halfplanes while both remaining parts have at least
/// `r` points.
pub fn partition_islands(d: &DividedSet, r: usize) -> Result<IslandPartition> {
    if r == 0 {
        return Err(Error::Precondition("r must be positive".into()));
    }
    let mut rest: Vec<usize> = (0..d.len()).collect();
    let mut islands = Vec::new();
    let mut halfplanes = Vec::new();
    loop {
        let (na, nb) = side_count(&rest, d.split());
        if na < r || nb < r {
            break;
        }
        let h = balanced_halfplane_in(d, &rest, r)?;
        rest.retain(|k| h.inside.binary_search(k).is_err());
        islands.push(h.inside.clone());
        halfplanes.push(h);
    }
    Ok(IslandPartition {
        r,
        islands,
        remainder: rest,
        halfplanes,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IslandCredit {
    /// One part is in convex position: all its 5-subsets are holes.
    ConvexPart { part: char, holes: u64 },
    /// A 5-hole with vertices on both sides, as indices of the whole set.
    DividedHole { hole: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HoleAccount {
    pub r: usize,
    pub s: usize,
    pub total: u64,
    pub credits: Vec<IslandCredit>,
    pub partition: IslandPartition,
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// 5-holes guaranteed by the island partition: `C(r, 5)` for an island with
/// a part in convex position, otherwise one divided 5-hole found by search.
/// Holes credited to different islands are different.
pub fn lower_bound_account(d: &DividedSet, r: usize) -> Result<HoleAccount> {
    if r < 5 {
        return Err(Error::Precondition(format!("r must be at least 5, got {r}")));
    }
    let partition = partition_islands(d, r)?;
    let mut credits = Vec::new();
    let mut total = 0;
    for island in &partition.islands {
        let (a, b): (Vec<usize>, Vec<usize>) = island.iter().partition(|&&i| i < d.split());
        let credit = if is_convex_subset(d.base(), &a) {
            IslandCredit::ConvexPart {
                part: 'A',
                holes: binomial(a.len() as u64, 5),
            }
        } else if is_convex_subset(d.base(), &b) {
            IslandCredit::ConvexPart {
                part: 'B',
                holes: binomial(b.len() as u64, 5),
            }
        } else {
            let sub = d.restrict(island)?;
            let hole = HoleIndex::new(sub.base())
                .first_hole(5, Some(sub.split()))
                .ok_or_else(|| Error::Precondition("island with both parts non-convex has no divided 5-hole".into()))?;
            let mut hole: Vec<usize> = hole.into_iter().map(|k| island[k]).collect();
            hole.sort_unstable();
            IslandCredit::DividedHole { hole }
        };
        total += match &credit {
            IslandCredit::ConvexPart { holes, .. } => *holes,
            IslandCredit::DividedHole { .. } => 1,
        };
        credits.push(credit);
    }
    Ok(HoleAccount {
        r,
        s: partition.s(),
        total,
        credits,
        partition,
    })
}

/// Every island is an island of the whole set, islands are disjoint, and
/// together with the remainder they cover it.
pub fn partition_is_valid(d: &DividedSet, p: &IslandPartition) -> bool {
    let mut seen = vec![false; d.len()];
    for part in p.islands.iter().chain(std::iter::once(&p.remainder)) {
        for &k in part {
            if k >= d.len() || seen[k] {
                return false;
            }
            seen[k] = true;
        }
    }
    seen.iter().all(|&s| s)
        && p.islands.iter().all(|q| is_island(d.base(), q) && side_count(q, d.split()) == (p.r, p.r))
        && is_island(d.base(), &p.remainder)
}
