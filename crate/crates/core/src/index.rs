//! A bulk-loaded rectangle tree with domination-based candidate filtering.
//!
//! The tree is packed once with sort-tile-recursive (STR) tiling and never
//! modified afterwards. Queries compute the kNN and reverse-kNN *filter*
//! sets: the entries that cannot be excluded using rectangle geometry alone.
//!
//! Both queries count, for each entry `B`, how many other entries provably
//! beat it. Once a node's MBR is already beaten by `k` entries, every entry
//! beneath it is beaten too (domination survives shrinking its operands),
//! so the whole subtree is dropped without further tests. Dominators are
//! always single entries, never node MBRs, which keeps the result identical
//! to the exhaustive pairwise evaluation.

use std::collections::{BTreeSet, HashSet};
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::domination::Criterion;
use crate::error::{Error, Result};
use crate::geom::{check_dims, rect_max_dist_pow, LpNorm, Rect};

pub const DEFAULT_FANOUT: usize = 16;

/// A dataset object approximated by its MBR.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub id: u64,
    pub mbr: Rect,
}

impl Entry {
    pub fn new(id: u64, mbr: Rect) -> Self {
        Entry { id, mbr }
    }
}

#[derive(Debug, Clone)]
pub enum Children {
    Nodes(Vec<RTreeNode>),
    Entries(Vec<Entry>),
}

#[derive(Debug, Clone)]
pub struct RTreeNode {
    mbr: Rect,
    level: usize,
    /// Positions of this subtree's entries in the tree's leaf order.
    span: Range<usize>,
    children: Children,
}

impl RTreeNode {
    pub fn mbr(&self) -> &Rect {
        &self.mbr
    }

    /// Distance from the leaf level; leaves are level 0.
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn children(&self) -> &Children {
        &self.children
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self.children, Children::Entries(_))
    }

    /// Number of entries below this node.
    pub fn len(&self) -> usize {
        self.span.len()
    }

    pub fn is_empty(&self) -> bool {
        self.span.is_empty()
    }

    fn child_count(&self) -> usize {
        match &self.children {
            Children::Nodes(n) => n.len(),
            Children::Entries(e) => e.len(),
        }
    }
}

/// Counters collected by one candidate query.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryStats {
    pub domination_tests: u64,
    pub nodes_visited: u64,
    pub entries_pruned: u64,
    pub candidates_returned: u64,
}

/// An immutable STR-packed rectangle tree.
#[derive(Debug, Clone)]
pub struct RTree {
    root: RTreeNode,
    /// Entries in leaf order; `RTreeNode::span` indexes into this.
    entries: Vec<Entry>,
    dims: usize,
    fanout: usize,
}

fn validate_entries(entries: &[Entry]) -> Result<usize> {
    let first = entries.first().ok_or(Error::EmptyDataset)?;
    let dims = first.mbr.dims();
    let mut seen = HashSet::with_capacity(entries.len());
    for e in entries {
        check_dims(dims, e.mbr.dims())?;
        if !seen.insert(e.id) {
            return Err(Error::DuplicateId(e.id));
        }
    }
    Ok(dims)
}

/// Smallest `s` with `s^exp >= n`.
fn ceil_root(n: usize, exp: usize) -> usize {
    let mut s = 1usize;
    while s.checked_pow(exp as u32).is_some_and(|v| v < n) {
        s += 1;
    }
    s
}

struct Tile<T> {
    center: Vec<f64>,
    tie: u64,
    item: T,
}

/// Sort-tile-recursive grouping of `items` into runs of at most `fanout`.
fn str_tiles<T>(mut items: Vec<Tile<T>>, dim: usize, dims: usize, fanout: usize, out: &mut Vec<Vec<T>>) {
    items.sort_by(|a, b| a.center[dim].total_cmp(&b.center[dim]).then(a.tie.cmp(&b.tie)));
    let n = items.len();
    if dim + 1 == dims || n <= fanout {
        let mut it = items.into_iter().peekable();
        while it.peek().is_some() {
            out.push(it.by_ref().take(fanout).map(|t| t.item).collect());
        }
        return;
    }
    let pages = n.div_ceil(fanout);
    let slabs = ceil_root(pages, dims - dim);
    let slab_len = fanout * pages.div_ceil(slabs);
    let mut it = items.into_iter().peekable();
    while it.peek().is_some() {
        let slab: Vec<_> = it.by_ref().take(slab_len).collect();
        str_tiles(slab, dim + 1, dims, fanout, out);
    }
}

fn union_all<'a>(mut rects: impl Iterator<Item = &'a Rect>) -> Rect {
    let first = rects.next().expect("non-empty group").clone();
    rects.fold(first, |acc, r| acc.union(r))
}

fn assign_spans(node: &mut RTreeNode, next: &mut usize, flat: &mut Vec<Entry>) {
    let start = *next;
    match &mut node.children {
        Children::Nodes(nodes) => {
            for child in nodes {
                assign_spans(child, next, flat);
            }
        }
        Children::Entries(entries) => {
            *next += entries.len();
            flat.extend(entries.iter().cloned());
        }
    }
    node.span = start..*next;
}

/// Packs `entries` into a height-balanced tree using STR tiling.
///
/// Ties in the tiling sorts are broken by entry id, so the layout depends
/// only on the entry set and `fanout`.
pub fn build_str(entries: Vec<Entry>, fanout: usize) -> Result<RTree> {
    if fanout < 2 {
        return Err(Error::InvalidFanout(fanout));
    }
    let dims = validate_entries(&entries)?;

    let tiles = entries
        .into_iter()
        .map(|e| Tile {
            center: e.mbr.center(),
            tie: e.id,
            item: e,
        })
        .collect();
    let mut groups = Vec::new();
    str_tiles(tiles, 0, dims, fanout, &mut groups);
    let mut level: Vec<RTreeNode> = groups
        .into_iter()
        .map(|group| RTreeNode {
            mbr: union_all(group.iter().map(|e| &e.mbr)),
            level: 0,
            span: 0..0,
            children: Children::Entries(group),
        })
        .collect();

    let mut height = 0;
    while level.len() > 1 {
        height += 1;
        let tiles = level
            .into_iter()
            .enumerate()
            .map(|(i, node)| Tile {
                center: node.mbr.center(),
                tie: i as u64,
                item: node,
            })
            .collect();
        let mut groups = Vec::new();
        str_tiles(tiles, 0, dims, fanout, &mut groups);
        level = groups
            .into_iter()
            .map(|group| RTreeNode {
                mbr: union_all(group.iter().map(|n| &n.mbr)),
                level: height,
                span: 0..0,
                children: Children::Nodes(group),
            })
            .collect();
    }

    let mut root = level.pop().expect("at least one node");
    let mut flat = Vec::with_capacity(root.child_count());
    assign_spans(&mut root, &mut 0, &mut flat);
    Ok(RTree {
        root,
        entries: flat,
        dims,
        fanout,
    })
}

/// Whether the query is kNN (`R` fixed, target varies as the dominated
/// operand) or reverse kNN (target acts as the reference rectangle).
#[derive(Clone, Copy)]
enum Mode<'q> {
    Knn { query: &'q Rect },
    Rknn { query: &'q Rect },
}

struct Search<'a> {
    entries: &'a [Entry],
    mode: Mode<'a>,
    criterion: Criterion,
    norm: LpNorm,
    k: usize,
    order: Vec<usize>,
    known: Vec<bool>,
    stack: Vec<usize>,
    stats: QueryStats,
    out: BTreeSet<u64>,
}

impl Search<'_> {
    /// Does entry `dominator` beat every point of `target`?
    #[inline]
    fn beats(&mut self, dominator: usize, target: &Rect) -> bool {
        self.stats.domination_tests += 1;
        let a = &self.entries[dominator].mbr;
        match self.mode {
            Mode::Knn { query } => self.criterion.dominates_unchecked(a, target, query, self.norm),
            Mode::Rknn { query } => self.criterion.dominates_unchecked(a, query, target, self.norm),
        }
    }

    fn visit(&mut self, node: &RTreeNode) {
        self.stats.nodes_visited += 1;
        let pushed = self.stack.len();
        let span = node.span.clone();
        let in_span = |p: &usize| span.contains(p);

        let inside = self.stack.iter().filter(|p| in_span(p)).count();
        let mut outside = self.stack.len() - inside;
        let mut inside = inside;
        // Any entry below this node loses at most one counted dominator: itself.
        let effective = |outside: usize, inside: usize| outside + inside.saturating_sub(1);
        // An entry inside a kNN target node can never dominate that node.
        let skip_inside = matches!(self.mode, Mode::Knn { .. });

        // The root covers the whole dataset and is not worth a scan of its own.
        let is_root = span.len() == self.entries.len();
        let mut untested = if is_root {
            0
        } else {
            self.order
                .iter()
                .filter(|&&p| !self.known[p] && !(skip_inside && in_span(&p)))
                .count()
        };
        for idx in 0..self.order.len() {
            let e = effective(outside, inside);
            if e >= self.k || e + untested < self.k {
                break;
            }
            let p = self.order[idx];
            if self.known[p] || (skip_inside && in_span(&p)) {
                continue;
            }
            untested -= 1;
            if self.beats(p, &node.mbr) {
                self.known[p] = true;
                self.stack.push(p);
                if in_span(&p) {
                    inside += 1;
                } else {
                    outside += 1;
                }
            }
        }

        if effective(outside, inside) >= self.k {
            self.stats.entries_pruned += span.len() as u64;
        } else {
            match &node.children {
                Children::Nodes(nodes) => {
                    for child in nodes {
                        self.visit(child);
                    }
                }
                Children::Entries(_) => {
                    for p in span.clone() {
                        self.visit_entry(p);
                    }
                }
            }
        }

        for p in self.stack.drain(pushed..) {
            self.known[p] = false;
        }
    }

    fn visit_entry(&mut self, pos: usize) {
        let mut count = self.stack.iter().filter(|&&p| p != pos).count();
        let mut untested = self.entries.len() - 1 - count;
        for idx in 0..self.order.len() {
            if count >= self.k || count + untested < self.k {
                break;
            }
            let p = self.order[idx];
            if p == pos || self.known[p] {
                continue;
            }
            untested -= 1;
            let entries = self.entries;
            if self.beats(p, &entries[pos].mbr) {
                count += 1;
            }
        }
        if count >= self.k {
            self.stats.entries_pruned += 1;
        } else {
            self.stats.candidates_returned += 1;
            self.out.insert(self.entries[pos].id);
        }
    }
}

impl RTree {
    pub fn root(&self) -> &RTreeNode {
        &self.root
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn fanout(&self) -> usize {
        self.fanout
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries in leaf order.
    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    /// Number of levels, counting the leaf level.
    pub fn height(&self) -> usize {
        self.root.level + 1
    }

    fn search<'a>(
        &'a self,
        mode: Mode<'a>,
        query: &Rect,
        k: usize,
        criterion: Criterion,
        norm: LpNorm,
    ) -> Result<(BTreeSet<u64>, QueryStats)> {
        check_dims(self.dims, query.dims())?;
        if k == 0 {
            return Err(Error::ZeroK);
        }
        let n = self.entries.len();
        if k >= n {
            // Nobody can collect k dominators from the n - 1 others.
            let stats = QueryStats {
                candidates_returned: n as u64,
                ..QueryStats::default()
            };
            return Ok((self.entries.iter().map(|e| e.id).collect(), stats));
        }
        let mut order: Vec<usize> = (0..n).collect();
        if let Mode::Knn { query } = mode {
            // Entries with the smallest worst-case distance are the likeliest dominators.
            let keys: Vec<f64> = self
                .entries
                .iter()
                .map(|e| rect_max_dist_pow(&e.mbr, query, norm).unwrap_or(f64::INFINITY))
                .collect();
            order.sort_by(|&a, &b| keys[a].total_cmp(&keys[b]).then(a.cmp(&b)));
        }
        let mut search = Search {
            entries: &self.entries,
            mode,
            criterion,
            norm,
            k,
            order,
            known: vec![false; n],
            stack: Vec::new(),
            stats: QueryStats::default(),
            out: BTreeSet::new(),
        };
        search.visit(&self.root);
        Ok((search.out, search.stats))
    }

    /// Entries with fewer than `k` other entries dominating them w.r.t. `query`.
    pub fn knn_candidates(
        &self,
        query: &Rect,
        k: usize,
        criterion: Criterion,
        norm: LpNorm,
    ) -> Result<(BTreeSet<u64>, QueryStats)> {
        self.search(Mode::Knn { query }, query, k, criterion, norm)
    }

    /// Entries `B` with fewer than `k` other entries dominating `query` w.r.t. `B`.
    pub fn rknn_candidates(
        &self,
        query: &Rect,
        k: usize,
        criterion: Criterion,
        norm: LpNorm,
    ) -> Result<(BTreeSet<u64>, QueryStats)> {
        self.search(Mode::Rknn { query }, query, k, criterion, norm)
    }
}

/// Free-function form of [`RTree::knn_candidates`].
pub fn knn_candidates(
    tree: &RTree,
    query: &Rect,
    k: usize,
    criterion: Criterion,
    norm: LpNorm,
) -> Result<(BTreeSet<u64>, QueryStats)> {
    tree.knn_candidates(query, k, criterion, norm)
}

/// Free-function form of [`RTree::rknn_candidates`].
pub fn rknn_candidates(
    tree: &RTree,
    query: &Rect,
    k: usize,
    criterion: Criterion,
    norm: LpNorm,
) -> Result<(BTreeSet<u64>, QueryStats)> {
    tree.rknn_candidates(query, k, criterion, norm)
}

fn check_naive(entries: &[Entry], query: &Rect, k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::ZeroK);
    }
    for e in entries {
        check_dims(query.dims(), e.mbr.dims())?;
    }
    Ok(())
}

/// Exhaustive pairwise evaluation of the kNN candidate set.
pub fn naive_knn_candidates(
    entries: &[Entry],
    query: &Rect,
    k: usize,
    criterion: Criterion,
    norm: LpNorm,
) -> Result<BTreeSet<u64>> {
    check_naive(entries, query, k)?;
    let mut out = BTreeSet::new();
    for b in entries {
        let mut dominators = 0;
        for a in entries {
            if a.id != b.id && criterion.dominates(&a.mbr, &b.mbr, query, norm)? {
                dominators += 1;
                if dominators >= k {
                    break;
                }
            }
        }
        if dominators < k {
            out.insert(b.id);
        }
    }
    Ok(out)
}

/// Exhaustive pairwise evaluation of the reverse-kNN candidate set.
pub fn naive_rknn_candidates(
    entries: &[Entry],
    query: &Rect,
    k: usize,
    criterion: Criterion,
    norm: LpNorm,
) -> Result<BTreeSet<u64>> {
    check_naive(entries, query, k)?;
    let mut out = BTreeSet::new();
    for b in entries {
        let mut dominators = 0;
        for a in entries {
            if a.id != b.id && criterion.dominates(&a.mbr, query, &b.mbr, norm)? {
                dominators += 1;
                if dominators >= k {
                    break;
                }
            }
        }
        if dominators < k {
            out.insert(b.id);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn point_entry(id: u64, c: &[f64]) -> Entry {
        Entry::new(id, Rect::point(c).unwrap())
    }

    fn golden_dataset() -> (Vec<Entry>, Rect) {
        (
            vec![point_entry(1, &[0.0, 2.0]), point_entry(2, &[0.0, 0.0])],
            Rect::from_bounds(&[2.0, 2.0], &[10.0, 4.0]).unwrap(),
        )
    }

    fn grid_entries(n: usize) -> Vec<Entry> {
        (0..n)
            .map(|i| {
                let x = (i * 37 % 101) as f64;
                let y = (i * 61 % 103) as f64;
                Entry::new(i as u64, Rect::from_bounds(&[x, y], &[x + 1.5, y + 0.5]).unwrap())
            })
            .collect()
    }

    fn leaf_sizes(node: &RTreeNode, out: &mut Vec<usize>) {
        match node.children() {
            Children::Nodes(n) => n.iter().for_each(|c| leaf_sizes(c, out)),
            Children::Entries(e) => out.push(e.len()),
        }
    }

    #[test]
    fn ceil_root_is_exact() {
        assert_eq!(ceil_root(7, 2), 3);
        assert_eq!(ceil_root(16, 2), 4);
        assert_eq!(ceil_root(64, 3), 4);
        assert_eq!(ceil_root(65, 3), 5);
        assert_eq!(ceil_root(1, 5), 1);
    }

    #[test]
    fn single_entry_is_a_leaf_root() {
        let e = point_entry(5, &[1.0, 2.0]);
        let tree = build_str(vec![e.clone()], 16).unwrap();
        assert!(tree.root().is_leaf());
        assert_eq!(tree.root().mbr(), &e.mbr);
        assert_eq!(tree.height(), 1);
    }

    #[test]
    fn hundred_entries_make_seven_leaves() {
        let tree = build_str(grid_entries(100), 16).unwrap();
        let mut sizes = Vec::new();
        leaf_sizes(tree.root(), &mut sizes);
        assert_eq!(sizes.len(), 7);
        assert_eq!(sizes.iter().sum::<usize>(), 100);
        assert_eq!(tree.height(), 2);
    }

    #[test]
    fn build_errors() {
        assert_eq!(build_str(vec![], 16).unwrap_err(), Error::EmptyDataset);
        assert_eq!(build_str(grid_entries(3), 1).unwrap_err(), Error::InvalidFanout(1));
        let mixed = vec![point_entry(1, &[0.0]), point_entry(2, &[0.0, 1.0])];
        assert_eq!(
            build_str(mixed, 4).unwrap_err(),
            Error::DimensionMismatch { left: 1, right: 2 }
        );
        let dup = vec![point_entry(1, &[0.0]), point_entry(1, &[1.0])];
        assert_eq!(build_str(dup, 4).unwrap_err(), Error::DuplicateId(1));
    }

    #[test]
    fn golden_knn() {
        let (entries, r) = golden_dataset();
        let tree = build_str(entries.clone(), 16).unwrap();
        let (eq2, stats) = tree.knn_candidates(&r, 1, Criterion::Eq2, LpNorm::EUCLIDEAN).unwrap();
        assert_eq!(eq2, BTreeSet::from([1]));
        assert_eq!(stats.candidates_returned + stats.entries_pruned, 2);
        let (two, _) = tree.knn_candidates(&r, 2, Criterion::Eq2, LpNorm::EUCLIDEAN).unwrap();
        assert_eq!(two, BTreeSet::from([1, 2]));
        let (mm, _) = tree
            .knn_candidates(&r, 1, Criterion::MinMax, LpNorm::EUCLIDEAN)
            .unwrap();
        assert_eq!(mm, BTreeSet::from([1, 2]));
        for crit in Criterion::ALL {
            for k in [1, 2] {
                assert_eq!(
                    tree.knn_candidates(&r, k, crit, LpNorm::EUCLIDEAN).unwrap().0,
                    naive_knn_candidates(&entries, &r, k, crit, LpNorm::EUCLIDEAN).unwrap()
                );
            }
        }
    }

    #[test]
    fn rknn_one_dimensional_points() {
        let entries = vec![point_entry(1, &[1.0]), point_entry(2, &[2.0])];
        let q = Rect::point(&[0.0]).unwrap();
        let tree = build_str(entries.clone(), 16).unwrap();
        let (got, _) = tree.rknn_candidates(&q, 1, Criterion::Eq2, LpNorm::EUCLIDEAN).unwrap();
        assert_eq!(got, BTreeSet::from([1]));
        assert_eq!(
            naive_rknn_candidates(&entries, &q, 1, Criterion::Eq2, LpNorm::EUCLIDEAN).unwrap(),
            got
        );
    }

    #[test]
    fn k_at_least_n_keeps_everything() {
        let entries = grid_entries(40);
        let tree = build_str(entries, 4).unwrap();
        let q = Rect::from_bounds(&[10.0, 10.0], &[12.0, 12.0]).unwrap();
        for k in [40, 41] {
            let (got, stats) = tree.rknn_candidates(&q, k, Criterion::Eq2, LpNorm::EUCLIDEAN).unwrap();
            assert_eq!(got.len(), 40);
            assert_eq!(stats.domination_tests, 0);
            let (got, _) = tree.knn_candidates(&q, k, Criterion::Eq2, LpNorm::EUCLIDEAN).unwrap();
            assert_eq!(got.len(), 40);
        }
    }

    #[test]
    fn k_of_n_minus_one_can_still_prune() {
        // Entry 3 sits far from the query and both others are closer to it than q is.
        let entries = vec![
            point_entry(1, &[10.0]),
            point_entry(2, &[10.5]),
            point_entry(3, &[11.0]),
        ];
        let q = Rect::point(&[0.0]).unwrap();
        let tree = build_str(entries.clone(), 4).unwrap();
        let (got, _) = tree.rknn_candidates(&q, 2, Criterion::Eq2, LpNorm::EUCLIDEAN).unwrap();
        assert_eq!(
            got,
            naive_rknn_candidates(&entries, &q, 2, Criterion::Eq2, LpNorm::EUCLIDEAN).unwrap()
        );
        assert!(!got.contains(&3));
    }

    #[test]
    fn singleton_dataset() {
        let entries = vec![point_entry(9, &[3.0, 3.0])];
        let q = Rect::point(&[0.0, 0.0]).unwrap();
        for k in [1, 5] {
            assert_eq!(
                naive_knn_candidates(&entries, &q, k, Criterion::Eq2, LpNorm::EUCLIDEAN).unwrap(),
                BTreeSet::from([9])
            );
            assert_eq!(
                naive_rknn_candidates(&entries, &q, k, Criterion::Eq2, LpNorm::EUCLIDEAN).unwrap(),
                BTreeSet::from([9])
            );
        }
    }

    #[test]
    fn query_errors() {
        let (entries, _) = golden_dataset();
        let tree = build_str(entries.clone(), 16).unwrap();
        let q1 = Rect::point(&[0.0]).unwrap();
        let q2 = Rect::point(&[0.0, 0.0]).unwrap();
        assert!(matches!(
            tree.knn_candidates(&q1, 1, Criterion::Eq2, LpNorm::EUCLIDEAN),
            Err(Error::DimensionMismatch { .. })
        ));
        assert_eq!(
            tree.rknn_candidates(&q2, 0, Criterion::Eq2, LpNorm::EUCLIDEAN)
                .unwrap_err(),
            Error::ZeroK
        );
        assert!(naive_knn_candidates(&entries, &q1, 1, Criterion::Eq2, LpNorm::EUCLIDEAN).is_err());
    }

    #[test]
    fn grid_matches_naive() {
        let entries = grid_entries(300);
        let tree = build_str(entries.clone(), 8).unwrap();
        let q = Rect::from_bounds(&[40.0, 40.0], &[45.0, 43.0]).unwrap();
        for crit in Criterion::ALL {
            for k in [1, 2, 5] {
                let (knn, stats) = tree.knn_candidates(&q, k, crit, LpNorm::EUCLIDEAN).unwrap();
                assert_eq!(
                    knn,
                    naive_knn_candidates(&entries, &q, k, crit, LpNorm::EUCLIDEAN).unwrap()
                );
                assert_eq!(stats.candidates_returned + stats.entries_pruned, 300);
                let (rknn, stats) = tree.rknn_candidates(&q, k, crit, LpNorm::EUCLIDEAN).unwrap();
                assert_eq!(
                    rknn,
                    naive_rknn_candidates(&entries, &q, k, crit, LpNorm::EUCLIDEAN).unwrap()
                );
                assert_eq!(stats.candidates_returned + stats.entries_pruned, 300);
            }
        }
    }
}
