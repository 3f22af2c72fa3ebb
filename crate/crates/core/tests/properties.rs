use std::collections::BTreeSet;

use proptest::prelude::*;

use fivehole::divided::is_island;
use fivehole::partition::partition_is_valid;
use fivehole::{
    census, generated_3_holes, generated_4_holes, is_k_hole, lower_bound_account, partition_islands, signature_k_holes, signature_of,
    DividedSet, HoleIndex, OrientationTable, PointSet,
};

type P = (i64, i64);

fn cross(a: P, b: P, c: P) -> i128 {
    let (ax, ay, bx, by, cx, cy) = (a.0 as i128, a.1 as i128, b.0 as i128, b.1 as i128, c.0 as i128, c.1 as i128);
    (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
}

fn inside_triangle(q: P, a: P, b: P, c: P) -> bool {
    let s = cross(a, b, c).signum();
    cross(a, b, q).signum() == s && cross(b, c, q).signum() == s && cross(c, a, q).signum() == s
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

/// A subset is a hole iff no point of the set lies inside a triangle spanned
/// by three of its other points.
fn oracle_holes(pts: &[P], k: usize) -> Vec<Vec<usize>> {
    let triples = subsets(k, 3);
    subsets(pts.len(), k)
        .into_iter()
        .filter(|s| {
            triples.iter().all(|t| {
                let (a, b, c) = (s[t[0]], s[t[1]], s[t[2]]);
                (0..pts.len()).all(|q| q == a || q == b || q == c || !inside_triangle(pts[q], pts[a], pts[b], pts[c]))
            })
        })
        .collect()
}

fn oracle_extremal(pts: &[P]) -> usize {
    (0..pts.len())
        .filter(|&q| {
            subsets(pts.len(), 3)
                .iter()
                .all(|t| t.contains(&q) || !inside_triangle(pts[q], pts[t[0]], pts[t[1]], pts[t[2]]))
        })
        .count()
}

/// The two hull neighbours of the leftmost vertex of a convex polygon.
fn neighbours_of_leftmost(pts: &[P], hole: &[usize]) -> (usize, usize) {
    let p = *hole.iter().min_by_key(|&&i| pts[i]).unwrap();
    let ns: Vec<usize> = hole
        .iter()
        .copied()
        .filter(|&q| q != p)
        .filter(|&q| {
            let sides: BTreeSet<i128> = hole.iter().filter(|&&r| r != p && r != q).map(|&r| cross(pts[p], pts[q], pts[r]).signum()).collect();
            sides.len() == 1
        })
        .collect();
    assert_eq!(ns.len(), 2);
    (ns[0], ns[1])
}

/// Points sorted by x, so oracle indices agree with the library's.
fn general_position(n: std::ops::RangeInclusive<usize>, span: i64) -> impl Strategy<Value = (Vec<P>, PointSet)> {
    prop::collection::vec((-span..span, -span..span), n).prop_filter_map("degenerate", |mut pts| {
        pts.sort_unstable();
        PointSet::from_ints(&pts).ok().map(|s| (pts, s))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn hole_counts_agree_with_oracle((pts, set) in general_position(5..=9, 1000)) {
        let sig = signature_of(&set);
        prop_assert!(sig.is_consistent());
        let index = HoleIndex::new(&set);
        for k in 3..=6 {
            let want = oracle_holes(&pts, k).len() as u64;
            prop_assert_eq!(index.count(k), want, "fan count, k = {}", k);
            prop_assert_eq!(signature_k_holes(&sig, k, None), want, "signature count, k = {}", k);
        }
    }

    #[test]
    fn divided_counts_agree_with_oracle((pts, set) in general_position(6..=9, 1000), cut in 1usize..8) {
        let split = cut.min(pts.len() - 1);
        let index = HoleIndex::new(&set);
        for k in 3..=5 {
            let want = oracle_holes(&pts, k).iter().filter(|h| h[0] < split && h[k - 1] >= split).count() as u64;
            prop_assert_eq!(index.count_divided(k, split), want);
        }
    }

    #[test]
    fn census_matches_oracle((pts, set) in general_position(5..=10, 1000)) {
        let c = census(&OrientationTable::new(&set)).unwrap();
        let n = pts.len() as i64;
        let h = |k| oracle_holes(&pts, k).len() as i64;
        let five = oracle_holes(&pts, 5);
        let mut g3 = BTreeSet::new();
        let mut g4 = BTreeSet::new();
        for hole in &five {
            let (u, v) = neighbours_of_leftmost(&pts, hole);
            g3.insert(hole.iter().copied().filter(|&q| q != u && q != v).collect::<Vec<_>>());
            g4.insert(hole.iter().copied().filter(|&q| q != u).collect::<Vec<_>>());
            g4.insert(hole.iter().copied().filter(|&q| q != v).collect::<Vec<_>>());
        }
        let gamma = oracle_extremal(&pts) as i64;
        prop_assert_eq!(c.h3 as i64, h(3));
        prop_assert_eq!(c.h4 as i64, h(4));
        prop_assert_eq!(c.h5 as i64, five.len() as i64);
        prop_assert_eq!(c.h6 as i64, h(6));
        prop_assert_eq!(c.gamma as i64, gamma);
        prop_assert_eq!(c.h3_generated as usize, g3.len());
        prop_assert_eq!(c.h4_generated as usize, g4.len());
        prop_assert_eq!(h(3), n * n - 5 * n + gamma + 4 + g3.len() as i64);
        prop_assert_eq!(h(4), (n * n - 7 * n) / 2 + gamma + 3 + g4.len() as i64);
        prop_assert!(c.identities_hold());
    }

    #[test]
    fn generated_holes_are_holes((_pts, set) in general_position(6..=10, 1000)) {
        let fives: Vec<BTreeSet<usize>> = HoleIndex::new(&set).holes(5, None).into_iter().map(|h| h.into_iter().collect()).collect();
        for t in generated_3_holes(&set) {
            prop_assert!(is_k_hole(&set, &t));
            prop_assert!(fives.iter().any(|f| t.iter().all(|v| f.contains(v))));
        }
        for q in generated_4_holes(&set) {
            prop_assert!(is_k_hole(&set, &q));
            prop_assert!(fives.iter().any(|f| q.iter().all(|v| f.contains(v))));
        }
    }

    #[test]
    fn mirrored_signature_is_consistent((_pts, set) in general_position(4..=10, 1000)) {
        let sig = signature_of(&set);
        prop_assert!(sig.mirrored().is_consistent());
        prop_assert_eq!(sig.mirrored().mirrored(), sig);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn partition_invariants((pts, set) in general_position(20..=60, 100_000), r in 1usize..=5, left in 0.3f64..0.7) {
        let split = ((pts.len() as f64 * left) as usize).clamp(1, pts.len() - 1);
        let d = DividedSet::new(set, split).unwrap();
        let p = partition_islands(&d, r).unwrap();
        prop_assert!(partition_is_valid(&d, &p));
        let rest_a = p.remainder.iter().filter(|&&i| i < split).count();
        prop_assert!(rest_a < r || p.remainder.len() - rest_a < r);
        prop_assert_eq!(p.s(), split.min(pts.len() - split) / r);
        for island in &p.islands {
            prop_assert!(is_island(d.base(), island));
        }
        if r == 5 {
            let acc = lower_bound_account(&d, r).unwrap();
            prop_assert!(acc.total <= HoleIndex::new(d.base()).count(5));
            prop_assert!(acc.total >= acc.s as u64);
        }
    }
}
