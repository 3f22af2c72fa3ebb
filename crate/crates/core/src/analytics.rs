//! Hole counts, generated 3- and 4-holes, and minimum hole counts over
//! families of configurations.
//!
//! A 5-hole `H` with leftmost vertex `p` generates the triangle of `p` and
//! the two vertices of `H` not adjacent to `p`, and the two quadrilaterals
//! obtained by dropping one neighbour of `p`. Generated holes are counted as
//! sets: a hole generated by several 5-holes counts once. With that reading
//!
//! ```text
//! h3 = n^2 - 5n + γ + 4 + h3|5
//! h4 = n^2/2 - 7n/2 + γ + 3 + h4|5
//! ```
//!
//! hold exactly, where `γ` is the number of extremal points.

use std::collections::BTreeSet;
use std::ops::ControlFlow;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chirotope::{hull, Chirotope};
use crate::enumerate::{collect_prefixes, explore_all, EnumerationOptions, SearchStats, SignatureSearch};
use crate::error::{Error, Result};
use crate::geometry::{Point, PointSet, Rational};
use crate::holes::{visit_holes_at, FanScratch, HoleIndex};
use crate::signature::{signature_of, PartialSignature, Signature};
use crate::verifier::realize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HoleCensus {
    pub n: usize,
    pub h3: u64,
    pub h4: u64,
    pub h5: u64,
    pub h6: u64,
    /// Extremal points.
    pub gamma: u64,
    pub h3_generated: u64,
    pub h4_generated: u64,
}

impl HoleCensus {
    pub fn h(&self, k: usize) -> Option<u64> {
        match k {
            3 => Some(self.h3),
            4 => Some(self.h4),
            5 => Some(self.h5),
            6 => Some(self.h6),
            _ => None,
        }
    }

    /// Left minus right side of the two identities; both are zero for
    /// every point set.
    pub fn identity_residuals(&self) -> (i64, i64) {
        let n = self.n as i64;
        let g = self.gamma as i64;
        let r3 = self.h3 as i64 - (n * n - 5 * n + g + 4 + self.h3_generated as i64);
        // n^2/2 - 7n/2 = n(n-7)/2 is always an integer
        let r4 = self.h4 as i64 - (n * (n - 7) / 2 + g + 3 + self.h4_generated as i64);
        (r3, r4)
    }

    pub fn identities_hold(&self) -> bool {
        self.identity_residuals() == (0, 0)
    }
}

/// Position of the leftmost (smallest index) vertex of a hole given in
/// cyclic order, with its two cyclic neighbours.
fn leftmost_with_neighbours(hole: &[usize]) -> (usize, usize, usize) {
    let k = hole.len();
    let i = (0..k).min_by_key(|&i| hole[i]).expect("non-empty hole");
    (hole[i], hole[(i + k - 1) % k], hole[(i + 1) % k])
}

fn generated(index: &HoleIndex) -> (BTreeSet<[usize; 3]>, BTreeSet<[usize; 4]>) {
    let mut g3 = BTreeSet::new();
    let mut g4 = BTreeSet::new();
    for hole in index.holes(5, None) {
        let (p, prev, next) = leftmost_with_neighbours(&hole);
        let mut tri: Vec<usize> = hole.iter().copied().filter(|&v| v != prev && v != next).collect();
        tri.sort_unstable();
        g3.insert([tri[0], tri[1], tri[2]]);
        debug_assert!(tri.contains(&p));
        for drop in [prev, next] {
            let mut quad: Vec<usize> = hole.iter().copied().filter(|&v| v != drop).collect();
            quad.sort_unstable();
            g4.insert([quad[0], quad[1], quad[2], quad[3]]);
        }
    }
    (g3, g4)
}

/// Distinct generated 3-holes, as sorted index triples.
pub fn generated_3_holes<C: Chirotope + ?Sized>(c: &C) -> Vec<[usize; 3]> {
    generated(&HoleIndex::new(c)).0.into_iter().collect()
}

/// Distinct generated 4-holes, as sorted index quadruples.
pub fn generated_4_holes<C: Chirotope + ?Sized>(c: &C) -> Vec<[usize; 4]> {
    generated(&HoleIndex::new(c)).1.into_iter().collect()
}

pub fn census<C: Chirotope + ?Sized>(c: &C) -> Result<HoleCensus> {
    let n = c.len();
    if n < 3 {
        return Err(Error::Precondition(format!("a census needs at least 3 points, got {n}")));
    }
    let index = HoleIndex::new(c);
    let (g3, g4) = generated(&index);
    let all: Vec<usize> = (0..n).collect();
    Ok(HoleCensus {
        n,
        h3: index.count(3),
        h4: index.count(4),
        h5: index.count(5),
        h6: index.count(6),
        gamma: hull(c, &all).len() as u64,
        h3_generated: g3.len() as u64,
        h4_generated: g4.len() as u64,
    })
}

/// Signatures whose number of k-holes stays within `bound`. Holes are
/// charged to their rightmost vertex when it is placed, so the running
/// count never decreases along a branch.
struct BoundSearch {
    n: usize,
    k: usize,
    bound: u64,
}

impl SignatureSearch for BoundSearch {
    type Level = u64;
    type Acc = Option<(Signature, u64)>;

    fn target(&self) -> usize {
        self.n
    }

    fn root(&self) -> u64 {
        0
    }

    fn new_acc(&self) -> Self::Acc {
        None
    }

    fn descend(&self, ps: &PartialSignature, count: u64, _: &mut Self::Acc, scratch: &mut FanScratch) -> Option<u64> {
        let mut count = count;
        let over = visit_holes_at(ps, ps.placed() - 1, self.k, None, scratch, |_| {
            count += 1;
            if count > self.bound {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        });
        over.is_continue().then_some(count)
    }

    fn leaf(&self, ps: &PartialSignature, count: u64, acc: &mut Self::Acc, _: &mut FanScratch) {
        if acc.is_none() {
            *acc = Some((ps.to_signature(), count));
        }
    }

    fn merge(&self, into: &mut Self::Acc, other: Self::Acc) {
        if into.is_none() {
            *into = other;
        }
    }
}

#[derive(Clone, Debug)]
pub struct MinHolesOptions {
    pub enumeration: EnumerationOptions,
    /// Jobs explored before checking whether a witness turned up.
    pub batch: usize,
    /// Time allowed for finding coordinates of the witness signature.
    pub realization_budget: Duration,
    pub seed: u64,
}

impl Default for MinHolesOptions {
    fn default() -> Self {
        MinHolesOptions {
            enumeration: EnumerationOptions::default(),
            batch: 1024,
            realization_budget: Duration::from_secs(20),
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinHolesReport {
    pub n: usize,
    pub k: usize,
    pub mode: String,
    /// Minimum number of k-holes over the family.
    pub count: u64,
    /// A configuration attaining the minimum, in signature dump format.
    pub witness_signature: String,
    /// Coordinates attaining the minimum, when found.
    pub witness: Option<String>,
    pub visited: u64,
    pub pruned: u64,
    #[serde(default)]
    pub elapsed_seconds: f64,
}

/// First signature (in search order) with at most `bound` k-holes.
pub fn find_within_bound(n: usize, k: usize, bound: u64, opts: &MinHolesOptions, stats: &mut SearchStats) -> Option<(Signature, u64)> {
    let search = BoundSearch { n, k, bound };
    let (prefixes, top, top_stats) = collect_prefixes(&search, opts.enumeration);
    stats.merge(top_stats);
    if top.is_some() {
        return top;
    }
    for chunk in prefixes.chunks(opts.batch.max(1)) {
        let (found, s) = explore_all(&search, chunk, opts.enumeration);
        stats.merge(s);
        if found.is_some() {
            return found;
        }
    }
    None
}

/// Minimum number of k-holes over all consistent signatures on `n` points,
/// which is a lower bound for every point set. The bound is raised from 0
/// until a configuration fits under it.
pub fn min_holes_signatures(n: usize, k: usize, opts: &MinHolesOptions) -> Result<MinHolesReport> {
    if !(3..=11).contains(&n) || k < 3 {
        return Err(Error::Precondition(format!("exhaustive minimum needs 3 <= n <= 11 and k >= 3, got n={n}, k={k}")));
    }
    let start = Instant::now();
    let mut stats = SearchStats::default();
    let mut bound = 0;
    let (sig, count) = loop {
        if let Some(found) = find_within_bound(n, k, bound, opts, &mut stats) {
            break found;
        }
        bound += 1;
    };
    debug_assert_eq!(count, bound);
    let witness = realize(&sig, opts.realization_budget, opts.seed)
        .or_else(|| crate::constructions::frozen_witness(n, k, count))
        .map(|p| p.to_text());
    Ok(MinHolesReport {
        n,
        k,
        mode: "signatures".into(),
        count,
        witness_signature: sig.to_dump(),
        witness,
        visited: stats.leaves,
        pruned: stats.pruned,
        elapsed_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Minimum number of k-holes over the given point sets.
pub fn min_holes_corpus(sets: &[PointSet], k: usize) -> Result<MinHolesReport> {
    let start = Instant::now();
    let first = sets.first().ok_or(Error::Empty)?;
    let n = first.len();
    if sets.iter().any(|s| s.len() != n) {
        return Err(Error::Corpus("point sets of different sizes".into()));
    }
    let (best, count) = sets
        .iter()
        .map(|s| (s, HoleIndex::new(s).count(k)))
        .min_by_key(|&(_, c)| c)
        .expect("non-empty");
    Ok(MinHolesReport {
        n,
        k,
        mode: "corpus".into(),
        count,
        witness_signature: signature_of(best).to_dump(),
        witness: Some(best.to_text()),
        visited: sets.len() as u64,
        pruned: 0,
        elapsed_seconds: start.elapsed().as_secs_f64(),
    })
}

/// A random set of `n` points with rational coordinates of small height,
/// in general position with distinct x-coordinates.
pub fn random_rational_set<R: Rng>(rng: &mut R, n: usize) -> PointSet {
    loop {
        let pts: Vec<Point> = (0..n)
            .map(|_| {
                let mut c = || Rational::new(BigInt::from(rng.gen_range(-1000i64..=1000)), BigInt::from(rng.gen_range(1i64..=12)));
                Point::new(c(), c())
            })
            .collect();
        if let Ok(set) = PointSet::new(pts) {
            return set;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GarciaAudit {
    pub instances: usize,
    pub failures: usize,
    /// Censuses of the failing sets.
    pub failing: Vec<HoleCensus>,
}

/// Checks both identities on `count` random rational sets with sizes drawn
/// from `sizes`.
pub fn garcia_audit(count: usize, sizes: std::ops::RangeInclusive<usize>, seed: u64) -> Result<GarciaAudit> {
    if *sizes.start() < 3 || sizes.is_empty() {
        return Err(Error::Precondition("sizes must start at 3 or more".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sets: Vec<PointSet> = (0..count)
        .map(|_| {
            let n = rng.gen_range(sizes.clone());
            random_rational_set(&mut rng, n)
        })
        .collect();
    let censuses: Vec<HoleCensus> = sets.par_iter().map(census).collect::<Result<_>>()?;
    let failing: Vec<HoleCensus> = censuses.into_iter().filter(|c| !c.identities_hold()).collect();
    Ok(GarciaAudit {
        instances: count,
        failures: failing.len(),
        failing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::enumerate_k_holes;

    fn parabola(n: i64) -> PointSet {
        PointSet::from_ints(&(0..n).map(|i| (i, i * i)).collect::<Vec<_>>()).unwrap()
    }

    /// Generated holes straight from the definition on the subset lists.
    fn generated_by_definition(p: &PointSet) -> (BTreeSet<Vec<usize>>, BTreeSet<Vec<usize>>) {
        let mut g3 = BTreeSet::new();
        let mut g4 = BTreeSet::new();
        for h in enumerate_k_holes(p, 5) {
            let sub = p.subset(&h.indices);
            // hull of the five vertices in counterclockwise order, as local indices
            let ring: Vec<usize> = sub.convex_hull().into_iter().map(|i| h.indices[i]).collect();
            let left = h.indices[0];
            let at = ring.iter().position(|&v| v == left).unwrap();
            let (prev, next) = (ring[(at + 4) % 5], ring[(at + 1) % 5]);
            g3.insert(h.indices.iter().copied().filter(|&v| v != prev && v != next).collect());
            for d in [prev, next] {
                g4.insert(h.indices.iter().copied().filter(|&v| v != d).collect());
            }
        }
        (g3, g4)
    }

    #[test]
    fn parabola_counts() {
        let c = census(&parabola(10)).unwrap();
        assert_eq!((c.h3, c.h4, c.h5, c.gamma), (120, 210, 252, 10));
        assert_eq!((c.h3_generated, c.h4_generated), (56, 182));
        assert!(c.identities_hold());
    }

    #[test]
    fn triangle_with_centroid() {
        let p = PointSet::from_ints(&[(0, 0), (3, 9), (6, 3), (4, 5)]).unwrap();
        // (4, 5) lies inside the triangle
        let c = census(&p).unwrap();
        assert_eq!((c.h3, c.h4, c.gamma), (3, 0, 3));
        assert!(c.identities_hold());
    }

    #[test]
    fn generated_matches_definition() {
        let p = PointSet::from_ints(&[(0, 5), (1, 0), (2, 16), (3, 0), (4, 5), (5, 31), (6, 25), (7, 40), (8, 23), (9, 27), (10, 2)]).unwrap();
        let (g3, g4) = generated_by_definition(&p);
        let a3: BTreeSet<Vec<usize>> = generated_3_holes(&p).into_iter().map(|t| t.to_vec()).collect();
        let a4: BTreeSet<Vec<usize>> = generated_4_holes(&p).into_iter().map(|t| t.to_vec()).collect();
        assert_eq!(a3, g3);
        assert_eq!(a4, g4);
        for t in &a3 {
            assert!(crate::geometry::is_k_hole(&p, t));
        }
        for q in &a4 {
            assert!(crate::geometry::is_k_hole(&p, q));
        }
        assert!(census(&p).unwrap().identities_hold());
    }

    #[test]
    fn small_minima() {
        let opts = MinHolesOptions {
            realization_budget: Duration::from_secs(5),
            ..Default::default()
        };
        // four points are either convex (four triangles) or a triangle around a point (three)
        let r = min_holes_signatures(4, 3, &opts).unwrap();
        assert_eq!(r.count, 3);
        let r = min_holes_signatures(8, 5, &opts).unwrap();
        assert_eq!(r.count, 0);
        let w = PointSet::parse(r.witness.as_deref().unwrap()).unwrap();
        assert_eq!(HoleIndex::new(&w).count(5), 0);
    }

    #[test]
    fn audit_small_sets() {
        let a = garcia_audit(40, 5..=9, 3).unwrap();
        assert_eq!((a.instances, a.failures), (40, 0));
    }

    #[test]
    fn corpus_minimum() {
        let a = parabola(6);
        let b = PointSet::from_ints(&[(0, 0), (1, 10), (2, 3), (3, 4), (4, 11), (5, 1)]).unwrap();
        let r = min_holes_corpus(&[a, b.clone()], 4).unwrap();
        assert_eq!(r.count, HoleIndex::new(&b).count(4).min(15)); // C(6, 4) for the parabola
    }
}
