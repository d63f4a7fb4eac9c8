//! Weighted inflation: turning a GDD skeleton plus small ingredient
//! decompositions into a decomposition of a large complete graph.
//!
//! Give every GDD point a non-negative weight and replace it by a run of
//! that many new points.  A block of the GDD becomes a complete
//! multipartite graph on its points' runs, and is tiled by an ingredient
//! decomposition of that multipartite shape; since every cross-group pair
//! of the GDD lies in exactly one block, the union of the inflated blocks
//! covers exactly the pairs whose endpoints come from different groups.
//! Each group's runs (plus an optional extra point shared by all groups)
//! are then filled with a decomposition of the complete graph on them.
//!
//! The module also implements the main recursive step of the spectrum
//! argument: inflating a resolvable 4-GDD of type 4^(3t+1) by weight i and
//! attaching new points to whole parallel classes.  A class's blocks
//! partition the points, so giving the same set of new points to every
//! block of one class (as an extra part of the multipartite ingredient)
//! covers new-to-old pairs exactly once; pairs among the new points are
//! left to a final complete fill.

use alloc::string::String;
use alloc::vec::Vec;
use thiserror::Error;

use crate::catalog::GraphId;
use crate::corpus::Corpus;
use crate::decomp_core::{
    develop, verify_blocks, ModelError, PlacedBlock, Point, ShapeKey, TargetGraph,
};
use crate::gdd_engine::{rgdd_for_main_step, verify_gdd, Gdd, GddError};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum WilsonError {
    #[error(transparent)]
    Gdd(#[from] GddError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("bad inflation: {0}")]
    BadInflation(String),
    #[error("ingredient mismatch: {0}")]
    IngredientMismatch(String),
    #[error("no ingredient for {0}")]
    MissingIngredient(String),
    #[error("assembled order-{order} design failed verification ({problems} bad pairs)")]
    FinalVerification { order: usize, problems: usize },
}

/// A finished edge decomposition of K_order into copies of one graph.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Design {
    pub graph: GraphId,
    pub order: usize,
    pub blocks: Vec<PlacedBlock>,
}

/// An ingredient decomposition of a complete multipartite graph, with its
/// part structure made explicit.
#[derive(Clone, Debug)]
pub struct MultipartiteIngredient {
    pub target: TargetGraph,
    pub blocks: Vec<PlacedBlock>,
}

/// Supplies the small decompositions consumed by inflation.  `complete`
/// may recurse (orders built from other orders), hence `&mut self`.
/// `sizes` arrives in non-increasing order.
pub trait IngredientLibrary {
    fn complete(&mut self, n: usize, graph: GraphId) -> Result<Vec<PlacedBlock>, WilsonError>;
    fn multipartite(
        &mut self,
        sizes: &[usize],
        graph: GraphId,
    ) -> Result<MultipartiteIngredient, WilsonError>;
}

/// A non-recursive library backed directly by a record corpus.
pub struct CorpusLibrary<'a> {
    pub corpus: &'a Corpus,
}

impl IngredientLibrary for CorpusLibrary<'_> {
    fn complete(&mut self, n: usize, graph: GraphId) -> Result<Vec<PlacedBlock>, WilsonError> {
        let base = self
            .corpus
            .lookup(&ShapeKey::Complete(n), graph)
            .ok_or_else(|| {
                WilsonError::MissingIngredient(alloc::format!("K_{n} for {}", graph.name()))
            })?;
        Ok(develop(&base))
    }

    fn multipartite(
        &mut self,
        sizes: &[usize],
        graph: GraphId,
    ) -> Result<MultipartiteIngredient, WilsonError> {
        let mut key = sizes.to_vec();
        key.sort_unstable();
        let base = self
            .corpus
            .lookup(&ShapeKey::Multipartite(key), graph)
            .ok_or_else(|| {
                WilsonError::MissingIngredient(alloc::format!(
                    "multipartite ingredient {sizes:?} for {}",
                    graph.name()
                ))
            })?;
        let blocks = develop(&base);
        Ok(MultipartiteIngredient {
            target: base.target,
            blocks,
        })
    }
}

/// Relabels ingredient blocks through `point_map`.
fn map_blocks(blocks: &[PlacedBlock], point_map: &[Point]) -> Vec<PlacedBlock> {
    blocks
        .iter()
        .map(|b| PlacedBlock {
            graph: b.graph,
            points: b.points.map(|p| point_map[p]),
        })
        .collect()
}

/// Places a multipartite ingredient onto explicit target point sets, one
/// per part.  Parts are matched by size — largest first, ties broken by
/// smallest member — and mapped order-preservingly.
fn place_on_parts(
    ingredient: &MultipartiteIngredient,
    part_targets: &[Vec<Point>],
) -> Result<Vec<PlacedBlock>, WilsonError> {
    let source_parts = ingredient
        .target
        .parts()
        .ok_or_else(|| WilsonError::IngredientMismatch("ingredient is not multipartite".into()))?;
    if source_parts.len() != part_targets.len() {
        return Err(WilsonError::IngredientMismatch(alloc::format!(
            "ingredient has {} parts, inflation site has {}",
            source_parts.len(),
            part_targets.len()
        )));
    }
    let rank = |sets: &[Vec<Point>]| -> Vec<usize> {
        let mut order: Vec<usize> = (0..sets.len()).collect();
        order.sort_by_key(|&i| {
            (
                usize::MAX - sets[i].len(),
                *sets[i].iter().min().unwrap_or(&0),
            )
        });
        order
    };
    let sorted_sources: Vec<Vec<Point>> = source_parts
        .iter()
        .map(|p| {
            let mut p = p.clone();
            p.sort_unstable();
            p
        })
        .collect();
    let src_order = rank(&sorted_sources);
    let dst_order = rank(part_targets);
    let mut point_map = alloc::vec![usize::MAX; ingredient.target.point_count()];
    for (&si, &di) in src_order.iter().zip(&dst_order) {
        let (src, dst) = (&sorted_sources[si], &part_targets[di]);
        if src.len() != dst.len() {
            return Err(WilsonError::IngredientMismatch(alloc::format!(
                "part sizes differ: ingredient {:?} vs site {:?}",
                sorted_sources.iter().map(Vec::len).collect::<Vec<_>>(),
                part_targets.iter().map(Vec::len).collect::<Vec<_>>()
            )));
        }
        for (&s, &d) in src.iter().zip(dst) {
            point_map[s] = d;
        }
    }
    Ok(map_blocks(&ingredient.blocks, &point_map))
}

/// Start offsets of the runs induced by `weights` (run of point p is
/// `offsets[p] .. offsets[p] + weights[p]`).
fn run_offsets(weights: &[usize]) -> (Vec<usize>, usize) {
    let mut offsets = Vec::with_capacity(weights.len());
    let mut acc = 0;
    for &w in weights {
        offsets.push(acc);
        acc += w;
    }
    (offsets, acc)
}

/// Inflates `gdd` by `weights` (one per point), optionally adjoins one
/// extra point shared by every group fill, assembles the ingredient and
/// fill decompositions, and verifies the result as a decomposition of the
/// complete graph before returning it.
pub fn inflate_and_fill(
    gdd: &Gdd,
    weights: &[usize],
    extra: usize,
    graph: GraphId,
    library: &mut dyn IngredientLibrary,
) -> Result<Design, WilsonError> {
    if weights.len() != gdd.point_count {
        return Err(WilsonError::BadInflation(alloc::format!(
            "{} weights for {} points",
            weights.len(),
            gdd.point_count
        )));
    }
    if extra > 1 {
        return Err(WilsonError::BadInflation(
            "at most one extra point is supported".into(),
        ));
    }
    verify_gdd(gdd)?;
    let (offsets, total) = run_offsets(weights);
    let order = total + extra;
    let run = |p: usize| -> Vec<Point> { (offsets[p]..offsets[p] + weights[p]).collect() };

    let mut blocks: Vec<PlacedBlock> = Vec::new();
    for block in &gdd.blocks {
        let mut part_targets: Vec<Vec<Point>> = block
            .iter()
            .filter(|&&p| weights[p] > 0)
            .map(|&p| run(p))
            .collect();
        if part_targets.len() < 2 {
            continue; // nothing to cover: at most one positive run
        }
        part_targets.sort_by_key(|t| (usize::MAX - t.len(), t[0]));
        let sizes: Vec<usize> = part_targets.iter().map(Vec::len).collect();
        let ingredient = library.multipartite(&sizes, graph)?;
        blocks.extend(place_on_parts(&ingredient, &part_targets)?);
    }
    for group in &gdd.groups {
        let mut span: Vec<Point> = group.iter().flat_map(|&p| run(p)).collect();
        span.sort_unstable();
        if extra == 1 {
            span.push(order - 1);
        }
        if span.len() <= 1 {
            continue;
        }
        let fill = library.complete(span.len(), graph)?;
        blocks.extend(map_blocks(&fill, &span));
    }
    finish(graph, order, blocks)
}

/// The recursive spectrum step: a resolvable 4-GDD of type 4^(3t+1)
/// inflated by uniform weight `i`, with `p` new points attached to each of
/// the `x` lowest-indexed parallel classes, `q` new points to each of the
/// next `y` classes, and `e` (0 or 1) extra points.  Groups are filled
/// with K_(4i+e); the new points and the extra point are filled with
/// K_(xp+yq+e).  The resulting order is 12it + 4i + xp + yq + e.
#[allow(clippy::too_many_arguments)]
pub fn main_step(
    i: usize,
    t: usize,
    x: usize,
    p: usize,
    y: usize,
    q: usize,
    e: usize,
    graph: GraphId,
    library: &mut dyn IngredientLibrary,
    bundled: &[Gdd],
) -> Result<Design, WilsonError> {
    if i == 0 || e > 1 {
        return Err(WilsonError::BadInflation(
            "need weight i >= 1 and e in {0, 1}".into(),
        ));
    }
    let rgdd = rgdd_for_main_step(t, bundled)?;
    let classes = rgdd
        .resolution
        .clone()
        .ok_or_else(|| WilsonError::BadInflation("ingredient GDD is not resolvable".into()))?;
    if x + y > classes.len() {
        return Err(WilsonError::BadInflation(alloc::format!(
            "x + y = {} classes needed, only {} available",
            x + y,
            classes.len()
        )));
    }
    let total_run = rgdd.point_count * i;
    let new_total = x * p + y * q;
    let order = total_run + new_total + e;
    debug_assert_eq!(order, 12 * i * t + 4 * i + x * p + y * q + e);
    let run = |pt: usize| -> Vec<Point> { (pt * i..(pt + 1) * i).collect() };

    // New points, class by class: x classes of p points, then y of q.
    let mut class_new: Vec<Vec<Point>> = Vec::with_capacity(classes.len());
    let mut next = total_run;
    for c in 0..classes.len() {
        let count = if c < x {
            p
        } else if c < x + y {
            q
        } else {
            0
        };
        class_new.push((next..next + count).collect());
        next += count;
    }

    let mut blocks: Vec<PlacedBlock> = Vec::new();
    for (c, class) in classes.iter().enumerate() {
        for &bi in class {
            let mut part_targets: Vec<Vec<Point>> =
                rgdd.blocks[bi].iter().map(|&pt| run(pt)).collect();
            if !class_new[c].is_empty() {
                part_targets.push(class_new[c].clone());
            }
            part_targets.sort_by_key(|t| (usize::MAX - t.len(), t[0]));
            let sizes: Vec<usize> = part_targets.iter().map(Vec::len).collect();
            let ingredient = library.multipartite(&sizes, graph)?;
            blocks.extend(place_on_parts(&ingredient, &part_targets)?);
        }
    }
    for group in &rgdd.groups {
        let mut span: Vec<Point> = group.iter().flat_map(|&pt| run(pt)).collect();
        span.sort_unstable();
        if e == 1 {
            span.push(order - 1);
        }
        let fill = library.complete(span.len(), graph)?;
        blocks.extend(map_blocks(&fill, &span));
    }
    if new_total + e > 1 {
        let span: Vec<Point> = (total_run..order).collect();
        let fill = library.complete(span.len(), graph)?;
        blocks.extend(map_blocks(&fill, &span));
    }
    finish(graph, order, blocks)
}

fn finish(graph: GraphId, order: usize, blocks: Vec<PlacedBlock>) -> Result<Design, WilsonError> {
    let report = verify_blocks(&TargetGraph::complete(order), &blocks)?;
    if !report.pass {
        return Err(WilsonError::FinalVerification {
            order,
            problems: report.problems.len(),
        });
    }
    Ok(Design {
        graph,
        order,
        blocks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::GraphId;
    use crate::gdd_engine::{transversal_gdd, trivial_gdd};

    const K20B: &str = include_str!("../../../data/decomp/k20b.decomp");
    const K41: &str = include_str!("../../../data/decomp/k41.decomp");
    const M10X3: &str = include_str!("../../../data/decomp/m10-10-10.decomp");
    const M10X4: &str = include_str!("../../../data/decomp/m10-10-10-10.decomp");

    fn corpus() -> Corpus {
        Corpus::load(
            &[
                ("k20b.decomp", K20B),
                ("k41.decomp", K41),
                ("m10-10-10.decomp", M10X3),
                ("m10-10-10-10.decomp", M10X4),
            ],
            &[],
        )
        .unwrap()
    }

    #[test]
    fn order_60_by_inflating_a_small_transversal_design() {
        let corpus = corpus();
        let mut lib = CorpusLibrary { corpus: &corpus };
        let gdd = transversal_gdd(3, 2).unwrap();
        let design = inflate_and_fill(&gdd, &[10; 6], 0, GraphId::N6, &mut lib).unwrap();
        assert_eq!(design.order, 60);
        assert_eq!(design.blocks.len(), 60 * 59 / 2 / 10);
    }

    #[test]
    fn weight_zero_points_drop_out() {
        // Inflating TD(3,2) with one zero weight gives K_50: two groups of
        // 20, one of 10, blocks on 2 or 3 runs.  The size-2 sites need a
        // bipartite ingredient, which the corpus lacks — the error names it.
        let corpus = corpus();
        let mut lib = CorpusLibrary { corpus: &corpus };
        let gdd = transversal_gdd(3, 2).unwrap();
        let err =
            inflate_and_fill(&gdd, &[10, 10, 10, 10, 10, 0], 0, GraphId::N6, &mut lib).unwrap_err();
        assert!(matches!(err, WilsonError::MissingIngredient(_)), "{err:?}");
    }

    #[test]
    fn order_161_by_the_recursive_step() {
        let corpus = corpus();
        for graph in [GraphId::N6, GraphId::N13] {
            let mut lib = CorpusLibrary { corpus: &corpus };
            let design = main_step(10, 1, 0, 0, 0, 0, 1, graph, &mut lib, &[]).unwrap();
            assert_eq!(design.order, 161);
            assert_eq!(design.blocks.len(), 161 * 160 / 2 / 10);
        }
    }

    #[test]
    fn trivial_gdd_inflation_needs_the_part_ingredient() {
        // 1^4 at weight 10 models K_(10,10,10,10) plus four K_10 fills;
        // the corpus has no K_10 record, so the fill lookup must fail.
        let corpus = corpus();
        let mut lib = CorpusLibrary { corpus: &corpus };
        let gdd = trivial_gdd(4).unwrap();
        let err = inflate_and_fill(&gdd, &[10; 4], 0, GraphId::N6, &mut lib).unwrap_err();
        assert!(matches!(err, WilsonError::MissingIngredient(_)), "{err:?}");
    }

    struct BrokenLibrary<'a>(CorpusLibrary<'a>);
    impl IngredientLibrary for BrokenLibrary<'_> {
        fn complete(&mut self, n: usize, graph: GraphId) -> Result<Vec<PlacedBlock>, WilsonError> {
            // Drop one block from every complete fill.
            let mut blocks = self.0.complete(n, graph)?;
            blocks.pop();
            Ok(blocks)
        }
        fn multipartite(
            &mut self,
            sizes: &[usize],
            graph: GraphId,
        ) -> Result<MultipartiteIngredient, WilsonError> {
            self.0.multipartite(sizes, graph)
        }
    }

    #[test]
    fn assembly_verification_catches_bad_ingredients() {
        let corpus = corpus();
        let mut lib = BrokenLibrary(CorpusLibrary { corpus: &corpus });
        let gdd = transversal_gdd(3, 2).unwrap();
        let err = inflate_and_fill(&gdd, &[10; 6], 0, GraphId::N6, &mut lib).unwrap_err();
        assert!(
            matches!(err, WilsonError::FinalVerification { order: 60, .. }),
            "{err:?}"
        );
    }

    #[test]
    fn weights_must_match_points() {
        let corpus = corpus();
        let mut lib = CorpusLibrary { corpus: &corpus };
        let gdd = transversal_gdd(3, 2).unwrap();
        assert!(matches!(
            inflate_and_fill(&gdd, &[10; 5], 0, GraphId::N6, &mut lib),
            Err(WilsonError::BadInflation(_))
        ));
    }
}
