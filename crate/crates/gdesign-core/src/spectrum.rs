//! The recipe router and memoized builder: for each target graph and each
//! admissible order with a known design, produce a verified decomposition.
//!
//! Routing is layered.  Orders 0 and 1 get the empty decomposition.  If
//! the corpus carries a base-block record for K_n and the graph, that
//! record wins.  A fixed ledger then handles the remaining orders up to
//! 156 and a handful of sporadic larger ones, each by inflating a specific
//! small GDD.  Everything else goes through the parameter table for the
//! main recursive step: n = 120t + 40 + c, realised by inflating a
//! resolvable 4-GDD of type 4^(3t+1) at weight 10 and attaching new
//! points to parallel classes (`x` classes receive `p` points, the next
//! `y` receive `q`, plus `e` extra).
//!
//! Fills recurse through the same builder, so an order such as 221 (which
//! fills K_61, which in turn inflates a TD(3,2)) resolves automatically;
//! results are memoized per (graph, order).

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use thiserror::Error;

use crate::catalog::{spectrum_status, GraphId, SpectrumStatus};
use crate::corpus::{Corpus, CorpusError};
use crate::decomp_core::{develop, verify_blocks, PlacedBlock, ShapeKey, TargetGraph};
use crate::gdd_engine::{
    find_gdd, plane_to_gdd, transversal_gdd, trivial_gdd, truncate_last_group, Gdd, GddError,
    GroupType, PlaneDerivation,
};
use crate::wilson::{
    inflate_and_fill, main_step, Design, IngredientLibrary, MultipartiteIngredient, WilsonError,
};

/// Node budget handed to the GDD search; the searched types are tiny and
/// resolve in well under this many nodes.
pub const DEFAULT_SEARCH_BUDGET: u64 = 10_000_000;

/// Uniform inflation weight of the main recursive step.
pub const MAIN_STEP_WEIGHT: usize = 10;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum SpectrumError {
    #[error("order {n} is not admissible for {graph} (needs n = 0, 1, 5 or 16 mod 20)")]
    Inadmissible { graph: &'static str, n: usize },
    #[error("no decomposition of K_{n} into {graph} exists")]
    KnownNonexistent { graph: &'static str, n: usize },
    #[error("existence of a {graph} design of order {n} is an open question")]
    Unknown { graph: &'static str, n: usize },
    #[error("order {n} for {graph} is outside the supported construction range: {reason}")]
    Unsupported {
        graph: &'static str,
        n: usize,
        reason: String,
    },
    #[error("construction failed for {graph} order {n}: {source}")]
    Construction {
        graph: &'static str,
        n: usize,
        source: WilsonError,
    },
    #[error("dependency cycle while building {graph} order {n}")]
    Cycle { graph: &'static str, n: usize },
    #[error(transparent)]
    Corpus(#[from] CorpusError),
}

// ---------------------------------------------------------------------------
// The parameter table of the main recursive step
// ---------------------------------------------------------------------------

/// One row: orders 120t + 40 + c for all t with 4t parallel classes
/// available (t >= ceil((x+y)/4), t >= 1).  The attachment sizes satisfy
/// c = x*p + y*q + e throughout.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct MainStepRow {
    pub c: usize,
    pub x: usize,
    pub p: usize,
    pub y: usize,
    pub q: usize,
    pub e: usize,
}

impl MainStepRow {
    pub fn t_min(&self) -> usize {
        1.max((self.x + self.y).div_ceil(4))
    }
}

pub const MAIN_STEP_TABLE: [MainStepRow; 24] = [
    MainStepRow {
        c: 0,
        x: 0,
        p: 0,
        y: 0,
        q: 0,
        e: 0,
    },
    MainStepRow {
        c: 1,
        x: 0,
        p: 0,
        y: 0,
        q: 0,
        e: 1,
    },
    MainStepRow {
        c: 21,
        x: 0,
        p: 0,
        y: 1,
        q: 20,
        e: 1,
    },
    MainStepRow {
        c: 25,
        x: 1,
        p: 10,
        y: 1,
        q: 15,
        e: 0,
    },
    MainStepRow {
        c: 36,
        x: 1,
        p: 15,
        y: 1,
        q: 20,
        e: 1,
    },
    MainStepRow {
        c: 40,
        x: 0,
        p: 0,
        y: 2,
        q: 20,
        e: 0,
    },
    MainStepRow {
        c: 41,
        x: 0,
        p: 0,
        y: 2,
        q: 20,
        e: 1,
    },
    MainStepRow {
        c: 45,
        x: 3,
        p: 15,
        y: 0,
        q: 0,
        e: 0,
    },
    MainStepRow {
        c: 56,
        x: 1,
        p: 15,
        y: 2,
        q: 20,
        e: 1,
    },
    MainStepRow {
        c: 60,
        x: 0,
        p: 0,
        y: 3,
        q: 20,
        e: 0,
    },
    MainStepRow {
        c: 61,
        x: 0,
        p: 0,
        y: 3,
        q: 20,
        e: 1,
    },
    MainStepRow {
        c: 65,
        x: 3,
        p: 15,
        y: 1,
        q: 20,
        e: 0,
    },
    MainStepRow {
        c: 76,
        x: 1,
        p: 15,
        y: 3,
        q: 20,
        e: 1,
    },
    MainStepRow {
        c: 80,
        x: 0,
        p: 0,
        y: 4,
        q: 20,
        e: 0,
    },
    MainStepRow {
        c: 81,
        x: 0,
        p: 0,
        y: 4,
        q: 20,
        e: 1,
    },
    MainStepRow {
        c: 85,
        x: 3,
        p: 15,
        y: 2,
        q: 20,
        e: 0,
    },
    MainStepRow {
        c: 96,
        x: 1,
        p: 15,
        y: 4,
        q: 20,
        e: 1,
    },
    MainStepRow {
        c: 100,
        x: 0,
        p: 0,
        y: 5,
        q: 20,
        e: 0,
    },
    MainStepRow {
        c: 101,
        x: 0,
        p: 0,
        y: 5,
        q: 20,
        e: 1,
    },
    MainStepRow {
        c: 105,
        x: 3,
        p: 15,
        y: 3,
        q: 20,
        e: 0,
    },
    MainStepRow {
        c: 116,
        x: 1,
        p: 15,
        y: 5,
        q: 20,
        e: 1,
    },
    MainStepRow {
        c: 125,
        x: 3,
        p: 15,
        y: 4,
        q: 20,
        e: 0,
    },
    MainStepRow {
        c: 136,
        x: 1,
        p: 15,
        y: 6,
        q: 20,
        e: 1,
    },
    MainStepRow {
        c: 140,
        x: 0,
        p: 0,
        y: 7,
        q: 20,
        e: 0,
    },
];

/// Matches n = 120t + 40 + c against the table.  Residues c are distinct
/// mod 120, so at most one (row, t) fits; rows demanding more parallel
/// classes than 4t provides are skipped.
pub fn main_step_parameters(n: usize) -> Option<(&'static MainStepRow, usize)> {
    for row in &MAIN_STEP_TABLE {
        let base = 40 + row.c;
        if n >= base + 120 && (n - base).is_multiple_of(120) {
            let t = (n - base) / 120;
            if t >= row.t_min() {
                return Some((row, t));
            }
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Recipes
// ---------------------------------------------------------------------------

/// Where an inflation skeleton comes from.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum GddSource {
    /// Single all-points block with singleton groups (type 1^r).
    Trivial {
        r: usize,
    },
    Transversal {
        k: usize,
        q: usize,
    },
    Plane {
        q: usize,
        mode: PlaneDerivation,
    },
    TruncatedTransversal {
        k: usize,
        q: usize,
        keep: usize,
    },
    /// Searched at build time with the session seed.
    Found {
        k: usize,
        gtype: &'static str,
    },
}

impl core::fmt::Display for GddSource {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            GddSource::Trivial { r } => write!(f, "the single-block skeleton of type 1^{r}"),
            GddSource::Transversal { k, q } => write!(f, "TD({k},{q})"),
            GddSource::Plane { q, mode } => match mode {
                PlaneDerivation::AffineDropClass => {
                    write!(f, "AG(2,{q}) minus a parallel class")
                }
                PlaneDerivation::ProjectiveDropPoint => write!(f, "PG(2,{q}) minus a point"),
                PlaneDerivation::AffineDropPoint => write!(f, "AG(2,{q}) minus a point"),
            },
            GddSource::TruncatedTransversal { k, q, keep } => {
                write!(
                    f,
                    "TD({k},{q}) truncated to {} points in the last group",
                    keep
                )
            }
            GddSource::Found { k, gtype } => write!(f, "a searched {k}-GDD of type {gtype}"),
        }
    }
}

/// Point weights for an inflation, resolved against the skeleton's groups.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum WeightRule {
    Uniform(usize),
    /// Every point gets `base`, except the first points of group `group`,
    /// which get the `prefix` weights in order.
    GroupPrefix {
        base: usize,
        group: usize,
        prefix: Vec<usize>,
    },
}

impl WeightRule {
    pub fn resolve(&self, gdd: &Gdd) -> Result<Vec<usize>, WilsonError> {
        match self {
            WeightRule::Uniform(w) => Ok(alloc::vec![*w; gdd.point_count]),
            WeightRule::GroupPrefix {
                base,
                group,
                prefix,
            } => {
                let g = gdd.groups.get(*group).ok_or_else(|| {
                    WilsonError::BadInflation(alloc::format!("no group {group} in the skeleton"))
                })?;
                if prefix.len() > g.len() {
                    return Err(WilsonError::BadInflation(alloc::format!(
                        "prefix of {} weights for a group of {} points",
                        prefix.len(),
                        g.len()
                    )));
                }
                let mut weights = alloc::vec![*base; gdd.point_count];
                for (&pt, &w) in g.iter().zip(prefix) {
                    weights[pt] = w;
                }
                Ok(weights)
            }
        }
    }
}

impl core::fmt::Display for WeightRule {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            WeightRule::Uniform(w) => write!(f, "weight {w} everywhere"),
            WeightRule::GroupPrefix {
                base,
                group,
                prefix,
            } => {
                write!(
                    f,
                    "weight {base} everywhere except weights {prefix:?} leading group {group}"
                )
            }
        }
    }
}

/// How to build one (graph, order) design.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Recipe {
    /// Orders 0 and 1: no edges, no blocks.
    Empty,
    /// Develop the corpus record covering K_n for this graph.
    Direct,
    /// Inflate a GDD skeleton and fill the groups.
    Inflate {
        source: GddSource,
        weights: WeightRule,
        extra: usize,
    },
    /// The main recursive step at weight 10: order 120t + 40 + c.
    MainStep {
        t: usize,
        x: usize,
        p: usize,
        y: usize,
        q: usize,
        e: usize,
    },
}

fn ledger_recipe(graph: GraphId, n: usize) -> Option<Recipe> {
    use GraphId as G;
    let g = graph;
    let n68 = g == G::N6 || g == G::N8;
    let not13 = g != G::N13;
    let inflate = |source: GddSource, weights: WeightRule, extra: usize| {
        Some(Recipe::Inflate {
            source,
            weights,
            extra,
        })
    };
    let uniform = WeightRule::Uniform;
    let prefix = |base: usize, group: usize, prefix: Vec<usize>| WeightRule::GroupPrefix {
        base,
        group,
        prefix,
    };
    match n {
        60 if n68 => inflate(GddSource::Transversal { k: 3, q: 2 }, uniform(10), 0),
        60 if g == G::N13 => inflate(
            GddSource::Trivial { r: 40 },
            prefix(1, 39, alloc::vec![21]),
            0,
        ),
        61 if n68 => inflate(GddSource::Transversal { k: 3, q: 2 }, uniform(10), 1),
        80 if n68 => inflate(GddSource::Trivial { r: 4 }, uniform(20), 0),
        80 if g == G::N13 => inflate(
            GddSource::Trivial { r: 56 },
            prefix(1, 55, alloc::vec![25]),
            0,
        ),
        81 => inflate(GddSource::Trivial { r: 4 }, uniform(20), 1),
        96 if n68 => inflate(
            GddSource::Transversal { k: 4, q: 4 },
            prefix(5, 0, alloc::vec![9, 9, 9, 9]),
            0,
        ),
        100 => inflate(GddSource::Trivial { r: 4 }, uniform(25), 0),
        101 => inflate(
            GddSource::Plane {
                q: 4,
                mode: PlaneDerivation::ProjectiveDropPoint,
            },
            uniform(5),
            1,
        ),
        105 if g == G::N3 => inflate(GddSource::Trivial { r: 5 }, uniform(21), 0),
        105 if g == G::N6 || g == G::N10 => {
            inflate(GddSource::Transversal { k: 5, q: 7 }, uniform(3), 0)
        }
        120 if not13 => inflate(
            GddSource::Plane {
                q: 5,
                mode: PlaneDerivation::AffineDropPoint,
            },
            uniform(5),
            0,
        ),
        120 if g == G::N13 => inflate(
            GddSource::Trivial { r: 5 },
            prefix(21, 4, alloc::vec![36]),
            0,
        ),
        121 => inflate(
            GddSource::Plane {
                q: 5,
                mode: PlaneDerivation::AffineDropPoint,
            },
            uniform(5),
            1,
        ),
        125 => inflate(GddSource::Transversal { k: 5, q: 5 }, uniform(5), 0),
        136 if not13 => inflate(
            GddSource::Plane {
                q: 5,
                mode: PlaneDerivation::ProjectiveDropPoint,
            },
            prefix(4, 0, alloc::vec![7, 7, 7, 7, 7]),
            1,
        ),
        140 if not13 => inflate(GddSource::Found { k: 4, gtype: "2^7" }, uniform(10), 0),
        140 if g == G::N13 => inflate(
            GddSource::Trivial { r: 100 },
            prefix(1, 99, alloc::vec![41]),
            0,
        ),
        141 => inflate(GddSource::Found { k: 4, gtype: "2^7" }, uniform(10), 1),
        145 => inflate(
            GddSource::Plane {
                q: 5,
                mode: PlaneDerivation::AffineDropPoint,
            },
            uniform(6),
            1,
        ),
        156 if n68 => inflate(
            GddSource::TruncatedTransversal {
                k: 4,
                q: 4,
                keep: 3,
            },
            prefix(10, 3, alloc::vec![15]),
            1,
        ),
        165 => inflate(
            GddSource::Transversal { k: 4, q: 4 },
            prefix(10, 0, alloc::vec![15]),
            0,
        ),
        176 => inflate(GddSource::Transversal { k: 5, q: 7 }, uniform(5), 1),
        180 => inflate(
            GddSource::Plane {
                q: 3,
                mode: PlaneDerivation::ProjectiveDropPoint,
            },
            uniform(15),
            0,
        ),
        245 => inflate(
            GddSource::Plane {
                q: 5,
                mode: PlaneDerivation::AffineDropPoint,
            },
            prefix(10, 0, alloc::vec![15]),
            0,
        ),
        256 if not13 => inflate(
            GddSource::TruncatedTransversal {
                k: 7,
                q: 9,
                keep: 8,
            },
            prefix(4, 6, alloc::vec![5; 8]),
            0,
        ),
        256 if g == G::N13 => inflate(
            GddSource::TruncatedTransversal {
                k: 7,
                q: 9,
                keep: 4,
            },
            prefix(4, 6, alloc::vec![10; 4]),
            0,
        ),
        260 if not13 => inflate(
            GddSource::Found {
                k: 4,
                gtype: "2^13",
            },
            uniform(10),
            0,
        ),
        260 if g == G::N13 => inflate(
            GddSource::Transversal { k: 5, q: 7 },
            prefix(8, 0, alloc::vec![3, 3, 3, 3]),
            0,
        ),
        261 => inflate(
            GddSource::Found {
                k: 4,
                gtype: "2^13",
            },
            uniform(10),
            1,
        ),
        265 => inflate(GddSource::Transversal { k: 6, q: 11 }, uniform(4), 1),
        276 => inflate(GddSource::Transversal { k: 5, q: 11 }, uniform(5), 1),
        285 if not13 => inflate(
            GddSource::TruncatedTransversal {
                k: 7,
                q: 11,
                keep: 4,
            },
            prefix(4, 6, alloc::vec![5; 4]),
            1,
        ),
        285 if g == G::N13 => inflate(
            GddSource::TruncatedTransversal {
                k: 7,
                q: 11,
                keep: 2,
            },
            prefix(4, 6, alloc::vec![10; 2]),
            1,
        ),
        296 => inflate(
            GddSource::Found { k: 4, gtype: "4^7" },
            prefix(10, 0, alloc::vec![15, 15, 15]),
            1,
        ),
        300 if not13 => inflate(
            GddSource::TruncatedTransversal {
                k: 7,
                q: 11,
                keep: 7,
            },
            prefix(4, 6, alloc::vec![5; 7]),
            1,
        ),
        300 if g == G::N13 => inflate(
            GddSource::TruncatedTransversal {
                k: 7,
                q: 11,
                keep: 3,
            },
            prefix(4, 6, alloc::vec![15, 10, 10]),
            1,
        ),
        _ => None,
    }
}

// ---------------------------------------------------------------------------
// The builder
// ---------------------------------------------------------------------------

pub struct Spectrum {
    corpus: Corpus,
    bundled_gdds: Vec<Gdd>,
    seed: u64,
    search_budget: u64,
    memo: BTreeMap<(GraphId, usize), Design>,
    gdd_cache: BTreeMap<String, Gdd>,
    in_progress: BTreeSet<(GraphId, usize)>,
}

impl Spectrum {
    pub fn new(corpus: Corpus, bundled_gdds: Vec<Gdd>, seed: u64) -> Spectrum {
        Spectrum {
            corpus,
            bundled_gdds,
            seed,
            search_budget: DEFAULT_SEARCH_BUDGET,
            memo: BTreeMap::new(),
            gdd_cache: BTreeMap::new(),
            in_progress: BTreeSet::new(),
        }
    }

    pub fn corpus(&self) -> &Corpus {
        &self.corpus
    }

    pub fn bundled_gdds(&self) -> &[Gdd] {
        &self.bundled_gdds
    }

    /// Routing decision for (graph, n); errors classify why no design can
    /// be produced (inadmissible / proven nonexistent / open / out of
    /// range).
    pub fn recipe_for(&self, graph: GraphId, n: usize) -> Result<Recipe, SpectrumError> {
        let name = graph.name();
        match spectrum_status(graph, n as u64).expect("catalogued graph") {
            SpectrumStatus::TooSmallOrTrivial => return Ok(Recipe::Empty),
            SpectrumStatus::Inadmissible => {
                return Err(SpectrumError::Inadmissible { graph: name, n })
            }
            SpectrumStatus::Nonexistent => {
                return Err(SpectrumError::KnownNonexistent { graph: name, n })
            }
            SpectrumStatus::Unknown => return Err(SpectrumError::Unknown { graph: name, n }),
            SpectrumStatus::Exists => {}
        }
        if self.corpus.lookup(&ShapeKey::Complete(n), graph).is_some() {
            return Ok(Recipe::Direct);
        }
        if let Some(recipe) = ledger_recipe(graph, n) {
            return Ok(recipe);
        }
        if let Some((row, t)) = main_step_parameters(n) {
            if t > 2 {
                return Err(SpectrumError::Unsupported {
                    graph: name,
                    n,
                    reason: alloc::format!(
                        "the recursive step needs a resolvable 4-GDD of type 4^{} and none is bundled",
                        3 * t + 1
                    ),
                });
            }
            return Ok(Recipe::MainStep {
                t,
                x: row.x,
                p: row.p,
                y: row.y,
                q: row.q,
                e: row.e,
            });
        }
        Err(SpectrumError::Unsupported {
            graph: name,
            n,
            reason: "no bundled record, ledger entry or parameter row matches".to_string(),
        })
    }

    fn realize_source(&mut self, source: &GddSource) -> Result<Gdd, GddError> {
        let key = alloc::format!("{source:?}");
        if let Some(gdd) = self.gdd_cache.get(&key) {
            return Ok(gdd.clone());
        }
        let gdd = match source {
            GddSource::Trivial { r } => trivial_gdd(*r)?,
            GddSource::Transversal { k, q } => transversal_gdd(*k, *q)?,
            GddSource::Plane { q, mode } => plane_to_gdd(*q, *mode)?,
            GddSource::TruncatedTransversal { k, q, keep } => {
                truncate_last_group(&transversal_gdd(*k, *q)?, *keep)?
            }
            GddSource::Found { k, gtype } => find_gdd(
                *k,
                &GroupType::parse(gtype)?,
                &self.bundled_gdds,
                self.seed,
                self.search_budget,
            )?,
        };
        self.gdd_cache.insert(key, gdd.clone());
        Ok(gdd)
    }

    /// Builds (and memoizes) a verified design.  Every returned design has
    /// passed the exact-once pair check for its order.
    pub fn build_design(&mut self, graph: GraphId, n: usize) -> Result<Design, SpectrumError> {
        if let Some(d) = self.memo.get(&(graph, n)) {
            return Ok(d.clone());
        }
        if !self.in_progress.insert((graph, n)) {
            return Err(SpectrumError::Cycle {
                graph: graph.name(),
                n,
            });
        }
        let result = self.build_uncached(graph, n);
        self.in_progress.remove(&(graph, n));
        let design = result?;
        self.memo.insert((graph, n), design.clone());
        Ok(design)
    }

    fn build_uncached(&mut self, graph: GraphId, n: usize) -> Result<Design, SpectrumError> {
        let name = graph.name();
        let construction = |source: WilsonError| SpectrumError::Construction {
            graph: name,
            n,
            source,
        };
        let recipe = self.recipe_for(graph, n)?;
        let design = match recipe {
            Recipe::Empty => Design {
                graph,
                order: n,
                blocks: Vec::new(),
            },
            Recipe::Direct => {
                let base = self
                    .corpus
                    .lookup(&ShapeKey::Complete(n), graph)
                    .expect("recipe_for checked the lookup");
                Design {
                    graph,
                    order: n,
                    blocks: develop(&base),
                }
            }
            Recipe::Inflate {
                source,
                weights,
                extra,
            } => {
                let gdd = self
                    .realize_source(&source)
                    .map_err(|e| construction(WilsonError::Gdd(e)))?;
                let weights = weights.resolve(&gdd).map_err(construction)?;
                inflate_and_fill(&gdd, &weights, extra, graph, &mut Recurse(self))
                    .map_err(construction)?
            }
            Recipe::MainStep { t, x, p, y, q, e } => {
                let bundled = self.bundled_gdds.clone();
                main_step(
                    MAIN_STEP_WEIGHT,
                    t,
                    x,
                    p,
                    y,
                    q,
                    e,
                    graph,
                    &mut Recurse(self),
                    &bundled,
                )
                .map_err(construction)?
            }
        };
        // Independent final check, regardless of which path produced it.
        let report = verify_blocks(&TargetGraph::complete(n), &design.blocks)
            .map_err(|e| construction(WilsonError::Model(e)))?;
        if !report.pass {
            return Err(construction(WilsonError::FinalVerification {
                order: n,
                problems: report.problems.len(),
            }));
        }
        Ok(design)
    }

    /// Indented description of how (graph, n) is built, recursing into the
    /// complete fills a construction consumes.
    pub fn plan_tree(&mut self, graph: GraphId, n: usize) -> Result<Vec<String>, SpectrumError> {
        let mut out = Vec::new();
        self.plan_into(graph, n, 0, &mut out)?;
        Ok(out)
    }

    fn plan_into(
        &mut self,
        graph: GraphId,
        n: usize,
        depth: usize,
        out: &mut Vec<String>,
    ) -> Result<(), SpectrumError> {
        let pad = "  ".repeat(depth);
        let recipe = self.recipe_for(graph, n)?;
        match recipe {
            Recipe::Empty => {
                out.push(alloc::format!(
                    "{pad}K_{n} ({}): empty decomposition",
                    graph.name()
                ));
            }
            Recipe::Direct => {
                let entry = self
                    .corpus
                    .lookup(&ShapeKey::Complete(n), graph)
                    .expect("checked by recipe_for");
                out.push(alloc::format!(
                    "{pad}K_{n} ({}): bundled record {}",
                    graph.name(),
                    entry.name
                ));
            }
            Recipe::Inflate {
                ref source,
                ref weights,
                extra,
            } => {
                out.push(alloc::format!(
                    "{pad}K_{n} ({}): inflate {source}, {weights}{}",
                    graph.name(),
                    if extra == 1 {
                        ", plus one extra point"
                    } else {
                        ""
                    }
                ));
                let gdd = self
                    .realize_source(source)
                    .map_err(|e| SpectrumError::Construction {
                        graph: graph.name(),
                        n,
                        source: WilsonError::Gdd(e),
                    })?;
                let w = weights
                    .resolve(&gdd)
                    .map_err(|e| SpectrumError::Construction {
                        graph: graph.name(),
                        n,
                        source: e,
                    })?;
                let mut fills: BTreeSet<usize> = BTreeSet::new();
                for group in &gdd.groups {
                    let size: usize = group.iter().map(|&p| w[p]).sum::<usize>() + extra;
                    if size > 1 {
                        fills.insert(size);
                    }
                }
                for size in fills {
                    self.plan_into(graph, size, depth + 1, out)?;
                }
            }
            Recipe::MainStep { t, x, p, y, q, e } => {
                out.push(alloc::format!(
                    "{pad}K_{n} ({}): main step, resolvable 4-GDD of type 4^{} at weight 10, \
                     {x} classes x {p} new points, {y} classes x {q}, {e} extra",
                    graph.name(),
                    3 * t + 1
                ));
                let mut fills: BTreeSet<usize> = BTreeSet::new();
                fills.insert(4 * MAIN_STEP_WEIGHT + e);
                if x * p + y * q + e > 1 {
                    fills.insert(x * p + y * q + e);
                }
                for size in fills {
                    self.plan_into(graph, size, depth + 1, out)?;
                }
            }
        }
        Ok(())
    }
}

/// Recursion adapter: complete fills come from the corpus when bundled,
/// otherwise from a nested build; multipartite ingredients only from the
/// corpus.
struct Recurse<'a>(&'a mut Spectrum);

impl IngredientLibrary for Recurse<'_> {
    fn complete(&mut self, n: usize, graph: GraphId) -> Result<Vec<PlacedBlock>, WilsonError> {
        if let Some(base) = self.0.corpus.lookup(&ShapeKey::Complete(n), graph) {
            return Ok(develop(&base));
        }
        match self.0.build_design(graph, n) {
            Ok(design) => Ok(design.blocks),
            Err(e) => Err(WilsonError::MissingIngredient(alloc::format!(
                "K_{n} for {}: {e}",
                graph.name()
            ))),
        }
    }

    fn multipartite(
        &mut self,
        sizes: &[usize],
        graph: GraphId,
    ) -> Result<MultipartiteIngredient, WilsonError> {
        let mut key = sizes.to_vec();
        key.sort_unstable();
        let base = self
            .0
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
