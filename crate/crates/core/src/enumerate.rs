//! Depth-first enumeration of consistent signatures.
//!
//! Points are added left to right. For the new point `m` the signs
//! `chi(i, j, m)` are decided in lexicographic `(i, j)` order, and each sign is
//! rejected as soon as a 4-tuple it completes is inadmissible. After a point
//! is fully placed the [`SignatureSearch`] decides whether to descend.
//!
//! Subtrees below a fixed prefix depth are independent, which gives both the
//! parallel split and the sharding used for long runs: prefixes are numbered
//! in DFS order and shard `i` of `k` takes the ordinals congruent to `i`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::holes::FanScratch;
use crate::signature::{PartialSignature, Signature, MAX_POINTS};

/// A fold over the leaves of the signature tree.
pub trait SignatureSearch: Sync {
    /// Per-node state handed from parent to child.
    type Level: Copy + Send + Sync;
    type Acc: Send;

    fn target(&self) -> usize;

    fn root(&self) -> Self::Level;

    fn new_acc(&self) -> Self::Acc;

    /// Called once the point `ps.placed() - 1` has all its triples decided.
    /// `None` skips the subtree.
    fn descend(
        &self,
        ps: &PartialSignature,
        parent: Self::Level,
        acc: &mut Self::Acc,
        scratch: &mut FanScratch,
    ) -> Option<Self::Level>;

    /// A complete signature that survived every `descend`.
    fn leaf(&self, ps: &PartialSignature, level: Self::Level, acc: &mut Self::Acc, scratch: &mut FanScratch);

    fn merge(&self, into: &mut Self::Acc, other: Self::Acc);

    /// Polled at every node; `true` abandons the remaining search.
    fn stop(&self) -> bool {
        false
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchStats {
    /// Complete signatures reached.
    pub leaves: u64,
    /// Fully placed inner nodes.
    pub nodes: u64,
    /// Nodes where the search declined to descend.
    pub pruned: u64,
}

impl SearchStats {
    pub fn merge(&mut self, other: SearchStats) {
        self.leaves += other.leaves;
        self.nodes += other.nodes;
        self.pruned += other.pruned;
    }
}

#[derive(Clone, Copy, Debug)]
pub struct EnumerationOptions {
    /// Fix `chi(0, 1, 2) = +`. Mirroring flips every sign and preserves
    /// hole counts and all wedge statements, so this halves the work for
    /// searches that are invariant under it.
    pub mirror_symmetry: bool,
    /// Number of placed points at which the tree is cut into jobs.
    pub prefix_depth: usize,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        EnumerationOptions {
            mirror_symmetry: false,
            prefix_depth: 7,
        }
    }
}

struct Walker<'a, S: SignatureSearch> {
    search: &'a S,
    n: usize,
    stop_at: usize,
    mirror: bool,
    scratch: FanScratch,
    stats: SearchStats,
}

impl<S: SignatureSearch> Walker<'_, S> {
    /// Places the point `ps.placed()` in every consistent way and hands each
    /// completed node to `node`.
    fn place<F>(&mut self, ps: &mut PartialSignature, level: S::Level, acc: &mut S::Acc, on_node: &mut F)
    where
        F: FnMut(&mut Self, &PartialSignature, S::Level, &mut S::Acc),
    {
        let ext = Extensions::new(ps);
        let fixed = if self.mirror && ps.placed() == 2 { 1 } else { 0 };
        ext.write(ps, fixed, true);
        self.branch(&ext, ps, fixed, 0, level, acc, on_node);
    }

    #[allow(clippy::too_many_arguments)]
    fn branch<F>(
        &mut self,
        ext: &Extensions,
        ps: &mut PartialSignature,
        plus: u128,
        minus: u128,
        level: S::Level,
        acc: &mut S::Acc,
        on_node: &mut F,
    ) where
        F: FnMut(&mut Self, &PartialSignature, S::Level, &mut S::Acc),
    {
        let open = ext.all & !(plus | minus);
        if open == 0 {
            ps.finish_point();
            self.node(ps, level, acc, on_node);
            ps.unfinish_point();
            return;
        }
        let v = open.trailing_zeros() as usize;
        ext.write(ps, ext.down[v] & open, false);
        self.branch(ext, ps, plus, minus | ext.down[v], level, acc, on_node);
        if self.search.stop() {
            return;
        }
        ext.write(ps, ext.up[v] & open, true);
        self.branch(ext, ps, plus | ext.up[v], minus, level, acc, on_node);
    }

    fn node<F>(&mut self, ps: &mut PartialSignature, parent: S::Level, acc: &mut S::Acc, on_node: &mut F)
    where
        F: FnMut(&mut Self, &PartialSignature, S::Level, &mut S::Acc),
    {
        if self.search.stop() {
            return;
        }
        let Some(level) = self.search.descend(ps, parent, acc, &mut self.scratch) else {
            self.stats.pruned += 1;
            return;
        };
        if ps.placed() == self.n {
            self.stats.leaves += 1;
            self.search.leaf(ps, level, acc, &mut self.scratch);
        } else if ps.placed() == self.stop_at {
            self.stats.nodes += 1;
            on_node(self, ps, level, acc);
        } else {
            self.stats.nodes += 1;
            self.place(ps, level, acc, on_node);
        }
    }

    fn start<F>(&mut self, acc: &mut S::Acc, on_node: &mut F)
    where
        F: FnMut(&mut Self, &PartialSignature, S::Level, &mut S::Acc),
    {
        // nodes with fewer than three points carry no triples
        let mut level = self.search.root();
        for m in 1..=self.n.min(2) {
            let mut ps = PartialSignature::trivial(self.n, m);
            if m == self.n || m == self.stop_at {
                self.node(&mut ps, level, acc, on_node);
                return;
            }
            match self.search.descend(&ps, level, acc, &mut self.scratch) {
                Some(l) => level = l,
                None => {
                    self.stats.pruned += 1;
                    return;
                }
            }
            self.stats.nodes += 1;
        }
        let mut ps = PartialSignature::trivial(self.n, 2);
        self.place(&mut ps, level, acc, on_node);
    }
}

/// The ways to add the point `m`, as a closure system on its new signs.
///
/// Variable `v` is `chi(i, j, m)` for the `v`-th pair `i < j < m` in
/// lexicographic order. For `a < i < j` with `chi(a, i, j) = +`, the 4-tuple
/// `(a, i, j, m)` is admissible iff `chi(aim) >= chi(ajm) >= chi(ijm)` (with
/// `+ > -`), and with `chi(a, i, j) = -` the inequalities reverse. Every
/// constraint is an implication between two new signs, so after closing
/// `up[v]` (forced `+` by `v = +`) and `down[v]` (forced `-` by `v = -`)
/// transitively, any choice respecting them extends to a full assignment and
/// the search below never backtracks.
struct Extensions {
    m: usize,
    all: u128,
    pairs: [(u8, u8); 120],
    up: [u128; 120],
    down: [u128; 120],
}

impl Extensions {
    fn new(ps: &PartialSignature) -> Self {
        let m = ps.placed();
        let mut index = [[0u8; MAX_POINTS]; MAX_POINTS];
        let mut pairs = [(0u8, 0u8); 120];
        let mut vars = 0;
        for i in 0..m {
            for j in i + 1..m {
                index[i][j] = vars as u8;
                pairs[vars] = (i as u8, j as u8);
                vars += 1;
            }
        }
        let mut up = [0u128; 120];
        for (v, u) in up.iter_mut().enumerate().take(vars) {
            *u = 1 << v;
        }
        for a in 0..m {
            for i in a + 1..m {
                for j in i + 1..m {
                    let (ai, aj, ij) = (index[a][i] as usize, index[a][j] as usize, index[i][j] as usize);
                    if ps.sign(a, i, j) {
                        up[aj] |= 1 << ai;
                        up[ij] |= 1 << aj;
                    } else {
                        up[ai] |= 1 << aj;
                        up[aj] |= 1 << ij;
                    }
                }
            }
        }
        for k in 0..vars {
            let through = up[k];
            for u in up.iter_mut().take(vars) {
                if *u >> k & 1 == 1 {
                    *u |= through;
                }
            }
        }
        let mut down = [0u128; 120];
        for (v, &u) in up.iter().enumerate().take(vars) {
            let mut bits = u;
            while bits != 0 {
                let w = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                down[w] |= 1 << v;
            }
        }
        Extensions {
            m,
            all: if vars == 128 { u128::MAX } else { (1u128 << vars) - 1 },
            pairs,
            up,
            down,
        }
    }

    fn write(&self, ps: &mut PartialSignature, mut vars: u128, sign: bool) {
        while vars != 0 {
            let v = vars.trailing_zeros() as usize;
            vars &= vars - 1;
            let (i, j) = self.pairs[v];
            ps.set(i as usize, j as usize, self.m, sign);
        }
    }
}

/// One unit of work: a node at the prefix depth.
#[derive(Clone, Copy, Debug)]
pub struct Prefix<L> {
    pub ps: PartialSignature,
    pub level: L,
}

/// Runs the whole search on the current thread.
pub fn enumerate<S: SignatureSearch>(search: &S, options: EnumerationOptions) -> (S::Acc, SearchStats) {
    let n = search.target();
    assert!(n <= MAX_POINTS);
    let mut acc = search.new_acc();
    let mut w = Walker {
        search,
        n,
        stop_at: usize::MAX,
        mirror: options.mirror_symmetry,
        scratch: FanScratch::new(),
        stats: SearchStats::default(),
    };
    w.start(&mut acc, &mut |_, _, _, _| unreachable!());
    (acc, w.stats)
}

/// Collects the surviving nodes with `depth` placed points, in DFS order.
/// Work done above the cut is accounted in the returned accumulator.
pub fn collect_prefixes<S: SignatureSearch>(
    search: &S,
    options: EnumerationOptions,
) -> (Vec<Prefix<S::Level>>, S::Acc, SearchStats) {
    let n = search.target();
    let depth = options.prefix_depth.clamp(2, n.saturating_sub(1).max(2));
    let mut acc = search.new_acc();
    let mut out = Vec::new();
    let mut w = Walker {
        search,
        n,
        stop_at: depth,
        mirror: options.mirror_symmetry,
        scratch: FanScratch::new(),
        stats: SearchStats::default(),
    };
    w.start(&mut acc, &mut |_, ps, level, _| out.push(Prefix { ps: *ps, level }));
    (out, acc, w.stats)
}

/// Explores the subtree below one prefix.
pub fn explore<S: SignatureSearch>(search: &S, prefix: &Prefix<S::Level>, options: EnumerationOptions) -> (S::Acc, SearchStats) {
    let mut acc = search.new_acc();
    let mut w = Walker {
        search,
        n: search.target(),
        stop_at: usize::MAX,
        mirror: options.mirror_symmetry,
        scratch: FanScratch::new(),
        stats: SearchStats::default(),
    };
    let mut ps = prefix.ps;
    if ps.placed() < w.n {
        w.place(&mut ps, prefix.level, &mut acc, &mut |_, _, _, _| unreachable!());
    }
    (acc, w.stats)
}

/// Explores the given prefixes on the rayon pool and merges the results in
/// prefix order, so the outcome does not depend on the thread count.
pub fn explore_all<S: SignatureSearch>(
    search: &S,
    prefixes: &[Prefix<S::Level>],
    options: EnumerationOptions,
) -> (S::Acc, SearchStats) {
    let parts: Vec<(S::Acc, SearchStats)> = prefixes.par_iter().map(|p| explore(search, p, options)).collect();
    let mut acc = search.new_acc();
    let mut stats = SearchStats::default();
    for (a, s) in parts {
        search.merge(&mut acc, a);
        stats.merge(s);
    }
    (acc, stats)
}

/// Parallel run of the whole tree.
pub fn enumerate_parallel<S: SignatureSearch>(search: &S, options: EnumerationOptions) -> (S::Acc, SearchStats) {
    let (prefixes, mut acc, mut stats) = collect_prefixes(search, options);
    let (a, s) = explore_all(search, &prefixes, options);
    search.merge(&mut acc, a);
    stats.merge(s);
    (acc, stats)
}

/// Counts all consistent signatures on `n` points.
pub fn count_signatures(n: usize) -> u64 {
    count_signatures_with(n, EnumerationOptions::default())
}

/// Parallel count; with mirror symmetry this is half the full count.
pub fn count_signatures_with(n: usize, options: EnumerationOptions) -> u64 {
    enumerate_parallel(&CountAll(n), options).1.leaves
}

/// Every consistent signature on `n` points, in search order.
pub fn all_signatures(n: usize, options: EnumerationOptions) -> Vec<Signature> {
    let search = FnSearch::new(
        n,
        (),
        Vec::new,
        |_: &PartialSignature, _: (), _: &mut Vec<Signature>, _: &mut FanScratch| Some(()),
        |ps: &PartialSignature, _: (), acc: &mut Vec<Signature>, _: &mut FanScratch| acc.push(ps.to_signature()),
        |into: &mut Vec<Signature>, other: Vec<Signature>| into.extend(other),
    );
    enumerate_parallel(&search, options).0
}

struct CountAll(usize);

impl SignatureSearch for CountAll {
    type Level = ();
    type Acc = ();

    fn target(&self) -> usize {
        self.0
    }

    fn root(&self) {}

    fn new_acc(&self) {}

    fn descend(&self, _: &PartialSignature, _: (), _: &mut (), _: &mut FanScratch) -> Option<()> {
        Some(())
    }

    fn leaf(&self, _: &PartialSignature, _: (), _: &mut (), _: &mut FanScratch) {}

    fn merge(&self, _: &mut (), _: ()) {}
}

/// Search built from closures, for one-off folds.
pub struct FnSearch<L, A, D, V, M, I> {
    pub n: usize,
    pub root: L,
    pub init: I,
    pub descend: D,
    pub leaf: V,
    pub merge: M,
    _acc: std::marker::PhantomData<fn() -> A>,
}

impl<L, A, D, V, M, I> FnSearch<L, A, D, V, M, I> {
    pub fn new(n: usize, root: L, init: I, descend: D, leaf: V, merge: M) -> Self {
        FnSearch {
            n,
            root,
            init,
            descend,
            leaf,
            merge,
            _acc: std::marker::PhantomData,
        }
    }
}

impl<L, A, D, V, M, I> SignatureSearch for FnSearch<L, A, D, V, M, I>
where
    L: Copy + Send + Sync,
    A: Send,
    I: Fn() -> A + Sync,
    D: Fn(&PartialSignature, L, &mut A, &mut FanScratch) -> Option<L> + Sync,
    V: Fn(&PartialSignature, L, &mut A, &mut FanScratch) + Sync,
    M: Fn(&mut A, A) + Sync,
{
    type Level = L;
    type Acc = A;

    fn target(&self) -> usize {
        self.n
    }

    fn root(&self) -> L {
        self.root
    }

    fn new_acc(&self) -> A {
        (self.init)()
    }

    fn descend(&self, ps: &PartialSignature, parent: L, acc: &mut A, scratch: &mut FanScratch) -> Option<L> {
        (self.descend)(ps, parent, acc, scratch)
    }

    fn leaf(&self, ps: &PartialSignature, level: L, acc: &mut A, scratch: &mut FanScratch) {
        (self.leaf)(ps, level, acc, scratch)
    }

    fn merge(&self, into: &mut A, other: A) {
        (self.merge)(into, other)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_counts() {
        let counts: Vec<u64> = (3..=7).map(count_signatures).collect();
        assert_eq!(counts, vec![2, 8, 62, 908, 24698]);
    }

    #[test]
    fn listed_signatures_are_distinct_and_consistent() {
        let all = all_signatures(6, EnumerationOptions::default());
        assert_eq!(all.len(), 908);
        assert!(all.iter().all(|s| s.is_consistent()));
        let distinct: std::collections::BTreeSet<String> = all.iter().map(|s| s.sign_string()).collect();
        assert_eq!(distinct.len(), 908);
    }

    #[test]
    fn matches_exhaustive_sign_assignments() {
        use crate::signature::{triple_count, triple_rank};
        for n in 3..=6 {
            let m = triple_count(n);
            let brute: std::collections::BTreeSet<String> = (0u32..1 << m)
                .map(|bits| Signature::from_fn(n, |i, j, k| bits >> triple_rank(i, j, k) & 1 == 1))
                .filter(|s| s.is_consistent())
                .map(|s| s.sign_string())
                .collect();
            let listed: std::collections::BTreeSet<String> =
                all_signatures(n, EnumerationOptions::default()).iter().map(|s| s.sign_string()).collect();
            assert_eq!(brute, listed, "n = {n}");
        }
    }

    #[test]
    fn mirror_symmetry_halves() {
        let opts = EnumerationOptions {
            mirror_symmetry: true,
            ..Default::default()
        };
        assert_eq!(enumerate(&CountAll(6), opts).1.leaves, 908 / 2);
    }

    #[test]
    fn prefixes_partition_the_tree() {
        for depth in 2..=5 {
            let opts = EnumerationOptions {
                prefix_depth: depth,
                ..Default::default()
            };
            let (prefixes, _, _) = collect_prefixes(&CountAll(6), opts);
            let (_, stats) = explore_all(&CountAll(6), &prefixes, opts);
            assert_eq!(stats.leaves, 908, "depth {depth}");
        }
    }
}
