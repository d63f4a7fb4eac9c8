//! Targets, placed blocks, piecewise cyclic development, and the exact-once
//! edge-coverage verifier.
//!
//! A *base decomposition* consists of a target graph (complete K_N or
//! complete multipartite), a development rule, an orbit count J, and a list
//! of base blocks.  The development rule is a list of segments
//! `(start, length, stride)` tiling 0..N-1; under orbit j a point x in a
//! segment maps to
//!
//! ```text
//!     start + ((x - start + stride * j) mod length)
//! ```
//!
//! so each orbit is a permutation of the point set (a rotation within each
//! segment).  Fixed points are segments with stride 0 or length 1.  The full
//! design is every base block developed through orbits j = 0 .. J-1.
//!
//! Verification is exhaustive: every point pair of the target must be
//! covered exactly once by the developed blocks' edges, and nothing outside
//! the target (for a multipartite target, within-part pairs) may be covered
//! at all.  Two independent counting paths are provided — a triangular
//! array counter and a map-based multiset accumulator — so each can serve
//! as an oracle for the other.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;
use thiserror::Error;

use crate::catalog::{get_graph, GraphId};

/// Point label within a target; targets use 0..N-1.
pub type Point = usize;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("block has a repeated point: {0:?}")]
    RepeatedPoint([Point; 6]),
    #[error("point {point} is outside the target point set 0..{n}")]
    PointOutOfRange { point: Point, n: usize },
    #[error("orbit index {j} out of range: rule has {orbits} orbits")]
    OrbitOutOfRange { j: usize, orbits: usize },
    #[error("point {0} lies outside all segments")]
    PointOutsideSegments(Point),
    #[error("segments do not tile 0..{n}: {detail}")]
    BadSegments { n: usize, detail: String },
    #[error("segment has zero length")]
    EmptySegment,
    #[error("orbit count must be at least 1")]
    ZeroOrbits,
    #[error("multipartite parts do not partition 0..{n}")]
    BadPartition { n: usize },
    #[error("a multipartite target needs at least 2 parts, all nonempty")]
    BadParts,
}

/// The graph being decomposed: complete K_N, or complete multipartite with
/// an explicit partition of 0..N-1 (edges are exactly the cross-part pairs).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TargetGraph {
    point_count: usize,
    /// `part_of[x]` = index of the part containing x; `None` for complete.
    part_of: Option<Vec<usize>>,
    parts: Option<Vec<Vec<Point>>>,
}

/// Shape key for corpus lookup: the order for complete targets, the sorted
/// multiset of part sizes for multipartite ones.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub enum ShapeKey {
    Complete(usize),
    Multipartite(Vec<usize>),
}

impl TargetGraph {
    pub fn complete(n: usize) -> TargetGraph {
        TargetGraph {
            point_count: n,
            part_of: None,
            parts: None,
        }
    }

    pub fn multipartite(n: usize, parts: Vec<Vec<Point>>) -> Result<TargetGraph, ModelError> {
        if parts.len() < 2 || parts.iter().any(|p| p.is_empty()) {
            return Err(ModelError::BadParts);
        }
        let mut part_of = alloc::vec![usize::MAX; n];
        let mut seen = 0usize;
        for (i, part) in parts.iter().enumerate() {
            for &x in part {
                if x >= n || part_of[x] != usize::MAX {
                    return Err(ModelError::BadPartition { n });
                }
                part_of[x] = i;
                seen += 1;
            }
        }
        if seen != n {
            return Err(ModelError::BadPartition { n });
        }
        Ok(TargetGraph {
            point_count: n,
            part_of: Some(part_of),
            parts: Some(parts),
        })
    }

    pub fn point_count(&self) -> usize {
        self.point_count
    }

    pub fn is_multipartite(&self) -> bool {
        self.parts.is_some()
    }

    pub fn parts(&self) -> Option<&[Vec<Point>]> {
        self.parts.as_deref()
    }

    /// True iff {u, v} is an edge of the target (u != v required).
    pub fn is_target_pair(&self, u: Point, v: Point) -> bool {
        debug_assert_ne!(u, v);
        match &self.part_of {
            None => true,
            Some(p) => p[u] != p[v],
        }
    }

    /// Number of edges: C(N,2) minus within-part pairs.
    pub fn edge_count(&self) -> usize {
        let all = self.point_count * self.point_count.saturating_sub(1) / 2;
        match &self.parts {
            None => all,
            Some(parts) => {
                all - parts
                    .iter()
                    .map(|p| p.len() * (p.len() - 1) / 2)
                    .sum::<usize>()
            }
        }
    }

    pub fn shape(&self) -> ShapeKey {
        match &self.parts {
            None => ShapeKey::Complete(self.point_count),
            Some(parts) => {
                let mut sizes: Vec<usize> = parts.iter().map(Vec::len).collect();
                sizes.sort_unstable();
                ShapeKey::Multipartite(sizes)
            }
        }
    }
}

/// A copy of a catalogued graph placed on six distinct target points;
/// `points[k-1]` is the target point carrying graph label k.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct PlacedBlock {
    pub graph: GraphId,
    pub points: [Point; 6],
}

impl PlacedBlock {
    pub fn new(graph: GraphId, points: [Point; 6]) -> Result<PlacedBlock, ModelError> {
        for i in 0..6 {
            for k in i + 1..6 {
                if points[i] == points[k] {
                    return Err(ModelError::RepeatedPoint(points));
                }
            }
        }
        Ok(PlacedBlock { graph, points })
    }
}

/// The ten point pairs covered by a placed block: the catalogued edge set
/// with target points substituted for labels, each pair normalized (lo, hi).
pub fn edges_of_block(block: &PlacedBlock) -> Result<[(Point, Point); 10], ModelError> {
    // Re-check distinctness so blocks built without `new` cannot smuggle a
    // degenerate edge through the verifier.
    PlacedBlock::new(block.graph, block.points)?;
    let mut out = [(0, 0); 10];
    for (i, &(a, b)) in get_graph(block.graph).edges.iter().enumerate() {
        let u = block.points[(a - 1) as usize];
        let v = block.points[(b - 1) as usize];
        out[i] = (u.min(v), u.max(v));
    }
    Ok(out)
}

/// One piece of a development rule: points in `start .. start+length` rotate
/// by `stride` steps per orbit within the piece.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct Segment {
    pub start: Point,
    pub length: usize,
    pub stride: usize,
}

/// A piecewise cyclic development rule with `orbits` orbits.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DevelopmentRule {
    segments: Vec<Segment>,
    orbits: usize,
}

impl DevelopmentRule {
    /// Segments must tile 0..N-1 for some N (checked: contiguous from 0);
    /// they are stored sorted by start.
    pub fn new(mut segments: Vec<Segment>, orbits: usize) -> Result<DevelopmentRule, ModelError> {
        if orbits == 0 {
            return Err(ModelError::ZeroOrbits);
        }
        if segments.iter().any(|s| s.length == 0) {
            return Err(ModelError::EmptySegment);
        }
        segments.sort_by_key(|s| s.start);
        let mut expected = 0;
        for s in &segments {
            if s.start != expected {
                return Err(ModelError::BadSegments {
                    n: expected,
                    detail: alloc::format!(
                        "segment starts at {} but {} is the first uncovered point",
                        s.start,
                        expected
                    ),
                });
            }
            expected += s.length;
        }
        Ok(DevelopmentRule { segments, orbits })
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn orbits(&self) -> usize {
        self.orbits
    }

    /// Total number of points covered by the segments.
    pub fn covered(&self) -> usize {
        self.segments.iter().map(|s| s.length).sum()
    }
}

/// Applies orbit `j` of the rule to point `x`.
pub fn apply_map(rule: &DevelopmentRule, j: usize, x: Point) -> Result<Point, ModelError> {
    if j >= rule.orbits {
        return Err(ModelError::OrbitOutOfRange {
            j,
            orbits: rule.orbits,
        });
    }
    for s in &rule.segments {
        if x >= s.start && x < s.start + s.length {
            return Ok(s.start + (x - s.start + s.stride * j) % s.length);
        }
    }
    Err(ModelError::PointOutsideSegments(x))
}

/// A named record: target, development rule and base blocks (possibly for
/// several graphs — verification is per graph restriction).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BaseDecomposition {
    pub name: String,
    pub target: TargetGraph,
    pub rule: DevelopmentRule,
    pub bases: Vec<PlacedBlock>,
}

impl BaseDecomposition {
    /// Validates that the rule tiles the target point set exactly and that
    /// all base-block points are in range.
    pub fn new(
        name: String,
        target: TargetGraph,
        rule: DevelopmentRule,
        bases: Vec<PlacedBlock>,
    ) -> Result<BaseDecomposition, ModelError> {
        let n = target.point_count();
        if rule.covered() != n {
            return Err(ModelError::BadSegments {
                n,
                detail: alloc::format!(
                    "segments cover {} points, target has {}",
                    rule.covered(),
                    n
                ),
            });
        }
        for b in &bases {
            for &p in &b.points {
                if p >= n {
                    return Err(ModelError::PointOutOfRange { point: p, n });
                }
            }
            PlacedBlock::new(b.graph, b.points)?;
        }
        Ok(BaseDecomposition {
            name,
            target,
            rule,
            bases,
        })
    }

    /// Restriction to the base blocks of a single graph.
    pub fn restrict(&self, graph: GraphId) -> BaseDecomposition {
        BaseDecomposition {
            name: self.name.clone(),
            target: self.target.clone(),
            rule: self.rule.clone(),
            bases: self
                .bases
                .iter()
                .filter(|b| b.graph == graph)
                .copied()
                .collect(),
        }
    }
}

/// Expands a base decomposition: every base block under every orbit, in
/// deterministic order (base index major, orbit index minor).
pub fn develop(base: &BaseDecomposition) -> Vec<PlacedBlock> {
    let mut out = Vec::with_capacity(base.bases.len() * base.rule.orbits());
    for block in &base.bases {
        for j in 0..base.rule.orbits() {
            let mut points = [0; 6];
            for (slot, &x) in points.iter_mut().zip(&block.points) {
                // Cannot fail: construction validated ranges and the rule.
                *slot = apply_map(&base.rule, j, x).expect("validated rule");
            }
            out.push(PlacedBlock {
                graph: block.graph,
                points,
            });
        }
    }
    out
}

/// A pair whose coverage count differs from the target's requirement,
/// with the indices of the developed blocks touching it.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PairProblem {
    pub pair: (Point, Point),
    pub count: usize,
    /// 1 for a target edge, 0 for a within-part pair.
    pub expected: usize,
    pub blocks: Vec<usize>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct VerificationReport {
    pub pass: bool,
    pub block_count: usize,
    /// Number of edges the target requires (= pairs covered when passing).
    pub pair_count: usize,
    /// Every offending pair in lexicographic order; empty iff `pass`.
    pub problems: Vec<PairProblem>,
}

fn tri_index(n: usize, u: Point, v: Point) -> usize {
    debug_assert!(u < v && v < n);
    u * n - u * (u + 1) / 2 + (v - u - 1)
}

fn attach_blocks(problems: &mut [PairProblem], blocks: &[PlacedBlock]) -> Result<(), ModelError> {
    let bad: BTreeSet<(Point, Point)> = problems.iter().map(|p| p.pair).collect();
    if bad.is_empty() {
        return Ok(());
    }
    let mut touching: BTreeMap<(Point, Point), Vec<usize>> = BTreeMap::new();
    for (i, b) in blocks.iter().enumerate() {
        for pair in edges_of_block(b)? {
            if bad.contains(&pair) {
                touching.entry(pair).or_default().push(i);
            }
        }
    }
    for p in problems.iter_mut() {
        p.blocks = touching.remove(&p.pair).unwrap_or_default();
    }
    Ok(())
}

/// Exact-once coverage check via a triangular pair counter.
pub fn verify_blocks(
    target: &TargetGraph,
    blocks: &[PlacedBlock],
) -> Result<VerificationReport, ModelError> {
    let n = target.point_count();
    let mut counter = alloc::vec![0u32; n * n.saturating_sub(1) / 2];
    for b in blocks {
        for &p in &b.points {
            if p >= n {
                return Err(ModelError::PointOutOfRange { point: p, n });
            }
        }
        for (u, v) in edges_of_block(b)? {
            counter[tri_index(n, u, v)] += 1;
        }
    }
    let mut problems = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let count = counter[tri_index(n, u, v)] as usize;
            let expected = usize::from(target.is_target_pair(u, v));
            if count != expected {
                problems.push(PairProblem {
                    pair: (u, v),
                    count,
                    expected,
                    blocks: Vec::new(),
                });
            }
        }
    }
    attach_blocks(&mut problems, blocks)?;
    Ok(VerificationReport {
        pass: problems.is_empty(),
        block_count: blocks.len(),
        pair_count: target.edge_count(),
        problems,
    })
}

/// Independent second path: multiset accumulation in an ordered map.  Must
/// agree with [`verify_blocks`] bit for bit; each implementation is the
/// other's oracle.
pub fn verify_blocks_multiset(
    target: &TargetGraph,
    blocks: &[PlacedBlock],
) -> Result<VerificationReport, ModelError> {
    let n = target.point_count();
    let mut multiset: BTreeMap<(Point, Point), usize> = BTreeMap::new();
    for b in blocks {
        for &p in &b.points {
            if p >= n {
                return Err(ModelError::PointOutOfRange { point: p, n });
            }
        }
        for pair in edges_of_block(b)? {
            *multiset.entry(pair).or_insert(0) += 1;
        }
    }
    let mut problems = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let count = multiset.get(&(u, v)).copied().unwrap_or(0);
            let expected = usize::from(target.is_target_pair(u, v));
            if count != expected {
                problems.push(PairProblem {
                    pair: (u, v),
                    count,
                    expected,
                    blocks: Vec::new(),
                });
            }
        }
    }
    attach_blocks(&mut problems, blocks)?;
    Ok(VerificationReport {
        pass: problems.is_empty(),
        block_count: blocks.len(),
        pair_count: target.edge_count(),
        problems,
    })
}

/// Develops the base decomposition and checks exact-once coverage.
pub fn verify_decomposition(base: &BaseDecomposition) -> Result<VerificationReport, ModelError> {
    verify_blocks(&base.target, &develop(base))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::GraphId;

    fn rule(segs: &[(usize, usize, usize)], orbits: usize) -> DevelopmentRule {
        DevelopmentRule::new(
            segs.iter()
                .map(|&(start, length, stride)| Segment {
                    start,
                    length,
                    stride,
                })
                .collect(),
            orbits,
        )
        .unwrap()
    }

    #[test]
    fn apply_map_fixed_point_and_identity() {
        // Rule of a 20-point record: rotate 0..18, fix 19.
        let r = rule(&[(0, 19, 1), (19, 1, 0)], 19);
        assert_eq!(apply_map(&r, 7, 19).unwrap(), 19);
        assert_eq!(apply_map(&r, 7, 0).unwrap(), 7);
        assert_eq!(apply_map(&r, 7, 15).unwrap(), 3); // (15 + 7) mod 19
        for x in 0..20 {
            assert_eq!(apply_map(&r, 0, x).unwrap(), x, "j=0 must be the identity");
        }
    }

    #[test]
    fn apply_map_offset_segment() {
        // Second segment starts at 39: x -> 39 + ((x - 39 + 7j) mod 21).
        let r = rule(&[(0, 39, 1), (39, 21, 7)], 21);
        assert_eq!(apply_map(&r, 2, 40).unwrap(), 54);
        // 7 * 3 = 21 wraps all the way round.
        assert_eq!(apply_map(&r, 3, 39).unwrap(), 39);
        assert_eq!(apply_map(&r, 1, 59).unwrap(), 39 + (20 + 7) % 21);
    }

    #[test]
    fn apply_map_errors() {
        let r = rule(&[(0, 10, 1)], 5);
        assert!(matches!(
            apply_map(&r, 5, 0),
            Err(ModelError::OrbitOutOfRange { .. })
        ));
        assert!(matches!(
            apply_map(&r, 0, 10),
            Err(ModelError::PointOutsideSegments(10))
        ));
    }

    #[test]
    fn apply_map_is_a_bijection_for_every_orbit() {
        let r = rule(&[(0, 12, 5), (12, 7, 3), (19, 1, 0)], 11);
        for j in 0..11 {
            let mut image: Vec<Point> = (0..20).map(|x| apply_map(&r, j, x).unwrap()).collect();
            image.sort_unstable();
            assert_eq!(
                image,
                (0..20).collect::<Vec<_>>(),
                "orbit {} not a permutation",
                j
            );
        }
    }

    #[test]
    fn segments_must_tile() {
        assert!(DevelopmentRule::new(
            alloc::vec![Segment {
                start: 1,
                length: 5,
                stride: 1
            }],
            1
        )
        .is_err());
        assert!(DevelopmentRule::new(
            alloc::vec![
                Segment {
                    start: 0,
                    length: 5,
                    stride: 1
                },
                Segment {
                    start: 6,
                    length: 4,
                    stride: 1
                }
            ],
            1
        )
        .is_err());
        // Overlap: second segment starts inside the first.
        assert!(DevelopmentRule::new(
            alloc::vec![
                Segment {
                    start: 0,
                    length: 5,
                    stride: 1
                },
                Segment {
                    start: 4,
                    length: 5,
                    stride: 1
                }
            ],
            1
        )
        .is_err());
    }

    #[test]
    fn edges_of_identity_block() {
        let block = PlacedBlock::new(GraphId::N3, [0, 1, 2, 3, 4, 5]).unwrap();
        let edges = edges_of_block(&block).unwrap();
        // Table row for n3 with every label shifted down by one.
        let expected = [
            (2, 4),
            (1, 4),
            (0, 4),
            (2, 3),
            (1, 3),
            (0, 3),
            (0, 5),
            (1, 2),
            (0, 2),
            (0, 1),
        ];
        assert_eq!(edges, expected);
    }

    #[test]
    fn edges_of_placed_block() {
        let block = PlacedBlock::new(GraphId::N3, [17, 16, 13, 6, 11, 19]).unwrap();
        let mut edges: Vec<_> = edges_of_block(&block).unwrap().into();
        edges.sort_unstable();
        let mut expected = alloc::vec![
            (11, 13),
            (11, 16),
            (11, 17),
            (6, 13),
            (6, 16),
            (6, 17),
            (17, 19),
            (13, 16),
            (13, 17),
            (16, 17),
        ];
        expected
            .iter_mut()
            .for_each(|p| *p = (p.0.min(p.1), p.0.max(p.1)));
        expected.sort_unstable();
        assert_eq!(edges, expected);
    }

    #[test]
    fn degree_five_label_of_n13() {
        let block = PlacedBlock::new(GraphId::N13, [0, 1, 2, 4, 7, 12]).unwrap();
        let edges = edges_of_block(&block).unwrap();
        let with_zero: Vec<_> = edges.iter().filter(|&&(u, v)| u == 0 || v == 0).collect();
        assert_eq!(with_zero.len(), 5, "label 1 of n13 has degree 5");
    }

    #[test]
    fn repeated_points_rejected() {
        assert!(PlacedBlock::new(GraphId::N3, [0, 1, 2, 3, 4, 4]).is_err());
        let bad = PlacedBlock {
            graph: GraphId::N3,
            points: [0, 1, 2, 3, 4, 4],
        };
        assert!(edges_of_block(&bad).is_err());
    }

    #[test]
    fn develop_count_and_order() {
        let target = TargetGraph::complete(21);
        let r = rule(&[(0, 21, 1)], 21);
        let base = BaseDecomposition::new(
            "t".into(),
            target,
            r,
            alloc::vec![PlacedBlock::new(GraphId::N3, [0, 1, 3, 7, 13, 5]).unwrap()],
        )
        .unwrap();
        let blocks = develop(&base);
        assert_eq!(blocks.len(), 21);
        // Orbit-minor order: block j is the base shifted by j.
        assert_eq!(blocks[0].points, [0, 1, 3, 7, 13, 5]);
        assert_eq!(blocks[1].points, [1, 2, 4, 8, 14, 6]);
        assert_eq!(blocks[20].points, [20, 0, 2, 6, 12, 4]);
    }

    #[test]
    fn multipartite_target_edges() {
        let t =
            TargetGraph::multipartite(6, alloc::vec![alloc::vec![0, 2, 4], alloc::vec![1, 3, 5],])
                .unwrap();
        assert_eq!(t.edge_count(), 9);
        assert!(t.is_target_pair(0, 1));
        assert!(!t.is_target_pair(0, 2));
        assert_eq!(t.shape(), ShapeKey::Multipartite(alloc::vec![3, 3]));
        assert!(TargetGraph::multipartite(6, alloc::vec![alloc::vec![0, 1]]).is_err());
        assert!(
            TargetGraph::multipartite(4, alloc::vec![alloc::vec![0, 1], alloc::vec![1, 2, 3]])
                .is_err()
        );
    }

    #[test]
    fn verifier_counts_shortfall_and_excess() {
        // A single block on K_6 covers 10 of the 15 pairs exactly once.
        let target = TargetGraph::complete(6);
        let block = PlacedBlock::new(GraphId::N6, [0, 1, 2, 3, 4, 5]).unwrap();
        let report = verify_blocks(&target, &[block]).unwrap();
        assert!(!report.pass);
        assert_eq!(report.pair_count, 15);
        // The five uncovered pairs are the non-edges of n6; each names no block.
        assert_eq!(report.problems.len(), 5);
        assert!(report
            .problems
            .iter()
            .all(|p| p.count == 0 && p.expected == 1));

        // Duplicate the block: now the ten covered pairs are doubled.
        let report2 = verify_blocks(&target, &[block, block]).unwrap();
        assert_eq!(report2.problems.len(), 15);
        let doubled: Vec<_> = report2.problems.iter().filter(|p| p.count == 2).collect();
        assert_eq!(doubled.len(), 10);
        assert!(doubled.iter().all(|p| p.blocks == alloc::vec![0, 1]));
    }

    #[test]
    fn both_verifier_paths_agree() {
        let target = TargetGraph::complete(6);
        let block = PlacedBlock::new(GraphId::N6, [0, 1, 2, 3, 4, 5]).unwrap();
        for blocks in [alloc::vec![block], alloc::vec![block, block], alloc::vec![]] {
            assert_eq!(
                verify_blocks(&target, &blocks).unwrap(),
                verify_blocks_multiset(&target, &blocks).unwrap()
            );
        }
    }
}
