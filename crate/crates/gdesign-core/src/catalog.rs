//! The 15 graphs with six vertices and ten edges, and the arithmetic
//! admissibility conditions for their designs.
//!
//! Each graph is stored with its fixed labelled edge set over labels 1..6,
//! vertices labelled in non-increasing order of degree.  All base blocks in
//! the corpus reference these labels positionally, so no graph-isomorphism
//! machinery is needed anywhere.
//!
//! A G-design of order n can exist only if
//! (i) n <= 1 or n >= 6, (ii) d | n - 1 where d is the gcd of the vertex
//! degrees, and (iii) 20 | n(n - 1).  For the five graphs of interest the
//! admissible orders are exactly n ≡ 0, 1, 5, 16 (mod 20), n outside 2..=5.

use thiserror::Error;

/// Identifier of one of the 15 catalogued graphs (`n1` .. `n15`).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct GraphId(u8);

impl GraphId {
    pub const N3: GraphId = GraphId(3);
    pub const N6: GraphId = GraphId(6);
    pub const N8: GraphId = GraphId(8);
    pub const N10: GraphId = GraphId(10);
    pub const N13: GraphId = GraphId(13);

    /// Constructs from the graph number (1..=15).
    pub fn new(number: u8) -> Result<GraphId, CatalogError> {
        if (1..=15).contains(&number) {
            Ok(GraphId(number))
        } else {
            Err(CatalogError::UnknownGraph(number))
        }
    }

    /// Parses the textual form `"n7"`.
    pub fn parse(s: &str) -> Result<GraphId, CatalogError> {
        s.strip_prefix('n')
            .and_then(|rest| rest.parse::<u8>().ok())
            .ok_or(CatalogError::UnparsableGraph)
            .and_then(GraphId::new)
    }

    pub fn number(self) -> u8 {
        self.0
    }

    /// The textual name, e.g. `"n13"`.
    pub fn name(self) -> &'static str {
        NAMES[(self.0 - 1) as usize]
    }

    /// True for the five graphs whose spectra this crate constructs.
    pub fn is_target(self) -> bool {
        TARGET_GRAPHS.contains(&self)
    }
}

/// The five graphs whose design spectra are constructed here.
pub const TARGET_GRAPHS: [GraphId; 5] = [
    GraphId::N3,
    GraphId::N6,
    GraphId::N8,
    GraphId::N10,
    GraphId::N13,
];

const NAMES: [&str; 15] = [
    "n1", "n2", "n3", "n4", "n5", "n6", "n7", "n8", "n9", "n10", "n11", "n12", "n13", "n14", "n15",
];

/// One of the 15 six-vertex ten-edge graphs with its fixed labelling.
#[derive(Clone, Copy, Debug)]
pub struct TenEdgeGraph {
    pub index: GraphId,
    /// Identifier in Read & Wilson's atlas numbering.
    pub atlas_id: &'static str,
    /// The ten labelled edges, endpoints in 1..=6.
    pub edges: [(u8, u8); 10],
    /// `degrees[k-1]` = degree of label k; non-increasing.
    pub degrees: [u8; 6],
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum CatalogError {
    #[error("unknown graph index n{0}: must be n1..n15")]
    UnknownGraph(u8),
    #[error("graph identifier must have the form n<1..15>")]
    UnparsableGraph,
    #[error("{0} is not one of the five target graphs n3, n6, n8, n10, n13")]
    NotATargetGraph(&'static str),
}

/// Existence status of a design of order n.  Designs exist for every
/// admissible order except n = 5 (all five graphs), n = 16 (nonexistent
/// for n8 and n13, open for n3, n6, n10) and n = 20 (nonexistent for
/// n13).
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum SpectrumStatus {
    /// n <= 1: the empty design exists vacuously.
    TooSmallOrTrivial,
    /// Fails one of the arithmetic conditions.
    Inadmissible,
    /// Admissible but provably no design exists.
    Nonexistent,
    /// Admissible; existence is an open problem.
    Unknown,
    Exists,
}

static GRAPHS: [TenEdgeGraph; 15] = [
    TenEdgeGraph {
        index: GraphId(1),
        atlas_id: "G179",
        edges: [
            (4, 3),
            (4, 2),
            (4, 1),
            (6, 2),
            (6, 1),
            (5, 2),
            (5, 1),
            (3, 2),
            (3, 1),
            (2, 1),
        ],
        degrees: [5, 5, 3, 3, 2, 2],
    },
    TenEdgeGraph {
        index: GraphId(2),
        atlas_id: "G180",
        edges: [
            (4, 3),
            (4, 2),
            (4, 1),
            (6, 3),
            (6, 1),
            (5, 2),
            (5, 1),
            (3, 2),
            (3, 1),
            (2, 1),
        ],
        degrees: [5, 4, 4, 3, 2, 2],
    },
    TenEdgeGraph {
        index: GraphId(3),
        atlas_id: "G177",
        edges: [
            (5, 3),
            (5, 2),
            (5, 1),
            (4, 3),
            (4, 2),
            (4, 1),
            (6, 1),
            (3, 2),
            (3, 1),
            (2, 1),
        ],
        degrees: [5, 4, 4, 3, 3, 1],
    },
    TenEdgeGraph {
        index: GraphId(4),
        atlas_id: "G182",
        edges: [
            (5, 3),
            (5, 2),
            (5, 1),
            (4, 3),
            (4, 2),
            (4, 1),
            (6, 2),
            (6, 1),
            (3, 1),
            (2, 1),
        ],
        degrees: [5, 4, 3, 3, 3, 2],
    },
    TenEdgeGraph {
        index: GraphId(5),
        atlas_id: "G186",
        edges: [
            (5, 3),
            (5, 2),
            (5, 1),
            (4, 3),
            (4, 2),
            (4, 1),
            (6, 3),
            (6, 2),
            (3, 1),
            (2, 1),
        ],
        degrees: [4, 4, 4, 3, 3, 2],
    },
    TenEdgeGraph {
        index: GraphId(6),
        atlas_id: "G189",
        edges: [
            (6, 2),
            (6, 3),
            (6, 1),
            (5, 2),
            (5, 3),
            (5, 1),
            (4, 2),
            (4, 3),
            (4, 1),
            (2, 1),
        ],
        degrees: [4, 4, 3, 3, 3, 3],
    },
    TenEdgeGraph {
        index: GraphId(7),
        atlas_id: "G183",
        edges: [
            (5, 3),
            (5, 2),
            (5, 1),
            (4, 6),
            (4, 2),
            (4, 1),
            (3, 2),
            (3, 1),
            (6, 1),
            (2, 1),
        ],
        degrees: [5, 4, 3, 3, 3, 2],
    },
    TenEdgeGraph {
        index: GraphId(8),
        atlas_id: "G190",
        edges: [
            (6, 4),
            (6, 2),
            (6, 1),
            (5, 3),
            (5, 2),
            (5, 1),
            (4, 2),
            (4, 1),
            (3, 2),
            (3, 1),
        ],
        degrees: [4, 4, 3, 3, 3, 3],
    },
    TenEdgeGraph {
        index: GraphId(9),
        atlas_id: "G176",
        edges: [
            (5, 4),
            (5, 3),
            (5, 2),
            (5, 1),
            (4, 3),
            (4, 2),
            (4, 1),
            (3, 2),
            (3, 1),
            (2, 1),
        ],
        degrees: [4, 4, 4, 4, 4, 0],
    },
    TenEdgeGraph {
        index: GraphId(10),
        atlas_id: "G178",
        edges: [
            (4, 3),
            (4, 2),
            (4, 5),
            (4, 1),
            (6, 1),
            (3, 2),
            (3, 5),
            (3, 1),
            (2, 5),
            (2, 1),
        ],
        degrees: [4, 4, 4, 4, 3, 1],
    },
    TenEdgeGraph {
        index: GraphId(11),
        atlas_id: "G181",
        edges: [
            (4, 3),
            (4, 5),
            (4, 2),
            (4, 1),
            (6, 2),
            (6, 1),
            (3, 5),
            (3, 2),
            (3, 1),
            (2, 1),
        ],
        degrees: [4, 4, 4, 4, 2, 2],
    },
    TenEdgeGraph {
        index: GraphId(12),
        atlas_id: "G185",
        edges: [
            (3, 2),
            (3, 5),
            (3, 4),
            (3, 1),
            (6, 4),
            (6, 1),
            (2, 5),
            (2, 4),
            (2, 1),
            (5, 1),
        ],
        degrees: [4, 4, 4, 3, 3, 2],
    },
    TenEdgeGraph {
        index: GraphId(13),
        atlas_id: "G187",
        edges: [
            (6, 4),
            (6, 3),
            (6, 1),
            (5, 3),
            (5, 2),
            (5, 1),
            (4, 2),
            (4, 1),
            (3, 1),
            (2, 1),
        ],
        degrees: [5, 3, 3, 3, 3, 3],
    },
    TenEdgeGraph {
        index: GraphId(14),
        atlas_id: "G184",
        edges: [
            (3, 6),
            (3, 4),
            (3, 2),
            (3, 1),
            (5, 4),
            (5, 2),
            (5, 1),
            (6, 2),
            (4, 1),
            (2, 1),
        ],
        degrees: [4, 4, 4, 3, 3, 2],
    },
    TenEdgeGraph {
        index: GraphId(15),
        atlas_id: "G188",
        edges: [
            (2, 5),
            (2, 4),
            (2, 3),
            (2, 1),
            (6, 4),
            (6, 3),
            (6, 1),
            (5, 3),
            (5, 1),
            (4, 1),
        ],
        degrees: [4, 4, 3, 3, 3, 3],
    },
];

/// Returns the catalogued graph for `index`.
pub fn get_graph(index: GraphId) -> &'static TenEdgeGraph {
    &GRAPHS[(index.0 - 1) as usize]
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Greatest common divisor of the graph's vertex degrees, with the
/// convention gcd(a, 0) = a (so an isolated vertex is ignored).
pub fn degree_gcd(index: GraphId) -> u64 {
    get_graph(index)
        .degrees
        .iter()
        .fold(0u64, |acc, &d| gcd(acc, d as u64))
}

/// The arithmetic admissibility conditions: n <= 1 or n >= 6, d | n - 1,
/// and 20 | n(n - 1).
pub fn is_admissible(index: GraphId, n: u64) -> bool {
    if n > 1 && n < 6 {
        return false;
    }
    if n <= 1 {
        return true;
    }
    let d = degree_gcd(index);
    (n - 1).is_multiple_of(d) && (n * (n - 1)).is_multiple_of(20)
}

/// Existence status for the five target graphs.
///
/// Order 5 is reported `Nonexistent` (it fails the minimum-order condition,
/// so there is certainly no design); every other inadmissible order is
/// `Inadmissible`.
pub fn spectrum_status(index: GraphId, n: u64) -> Result<SpectrumStatus, CatalogError> {
    if !index.is_target() {
        return Err(CatalogError::NotATargetGraph(index.name()));
    }
    Ok(if n <= 1 {
        SpectrumStatus::TooSmallOrTrivial
    } else if n == 5 {
        SpectrumStatus::Nonexistent
    } else if !is_admissible(index, n) {
        SpectrumStatus::Inadmissible
    } else if n == 16 {
        match index {
            GraphId::N8 | GraphId::N13 => SpectrumStatus::Nonexistent,
            _ => SpectrumStatus::Unknown,
        }
    } else if n == 20 && index == GraphId::N13 {
        SpectrumStatus::Nonexistent
    } else {
        SpectrumStatus::Exists
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_sets_are_well_formed() {
        for g in &GRAPHS {
            let mut seen = alloc::collections::BTreeSet::new();
            for &(a, b) in &g.edges {
                assert!(
                    (1..=6).contains(&a) && (1..=6).contains(&b),
                    "{:?}",
                    g.index
                );
                assert_ne!(a, b, "loop in {:?}", g.index);
                assert!(
                    seen.insert((a.min(b), a.max(b))),
                    "repeated edge in {:?}",
                    g.index
                );
            }
            assert_eq!(seen.len(), 10);
        }
    }

    #[test]
    fn degrees_match_edges_and_are_sorted() {
        for g in &GRAPHS {
            let mut deg = [0u8; 6];
            for &(a, b) in &g.edges {
                deg[(a - 1) as usize] += 1;
                deg[(b - 1) as usize] += 1;
            }
            assert_eq!(deg, g.degrees, "degree mismatch for {:?}", g.index);
            assert!(g.degrees.windows(2).all(|w| w[0] >= w[1]), "{:?}", g.index);
            assert_eq!(g.degrees.iter().map(|&d| d as u32).sum::<u32>(), 20);
        }
    }

    #[test]
    fn graph_lookup_and_names() {
        assert_eq!(get_graph(GraphId::N3).atlas_id, "G177");
        assert_eq!(get_graph(GraphId::N8).degrees, [4, 4, 3, 3, 3, 3]);
        assert_eq!(get_graph(GraphId::N13).degrees, [5, 3, 3, 3, 3, 3]);
        assert_eq!(GraphId::parse("n10").unwrap(), GraphId::N10);
        assert_eq!(GraphId::parse("n10").unwrap().name(), "n10");
        assert!(GraphId::parse("n16").is_err());
        assert!(GraphId::parse("x3").is_err());
        assert!(GraphId::new(0).is_err());
    }

    #[test]
    fn specific_edge_sets() {
        // n3 and n8 rows verbatim.
        assert_eq!(
            get_graph(GraphId::N3).edges,
            [
                (5, 3),
                (5, 2),
                (5, 1),
                (4, 3),
                (4, 2),
                (4, 1),
                (6, 1),
                (3, 2),
                (3, 1),
                (2, 1)
            ]
        );
        assert_eq!(
            get_graph(GraphId::N8).edges,
            [
                (6, 4),
                (6, 2),
                (6, 1),
                (5, 3),
                (5, 2),
                (5, 1),
                (4, 2),
                (4, 1),
                (3, 2),
                (3, 1)
            ]
        );
    }

    #[test]
    fn admissibility_basics() {
        assert!(!is_admissible(GraphId::N3, 5));
        assert!(is_admissible(GraphId::N8, 21));
        assert!(!is_admissible(GraphId::N13, 22)); // 22*21 = 462, not divisible by 20
        assert!(is_admissible(GraphId::N3, 0));
        assert!(is_admissible(GraphId::N3, 1));
        assert!(!is_admissible(GraphId::N3, 2));
    }

    #[test]
    fn admissible_residues_for_target_graphs() {
        // For each target graph d = 1, so admissibility over n >= 6 reduces to
        // the residue condition n(n-1) ≡ 0 (mod 20), i.e. n mod 20 in {0,1,5,16}.
        for id in TARGET_GRAPHS {
            assert_eq!(degree_gcd(id), 1);
            for n in 6..=1000u64 {
                let residue_ok = matches!(n % 20, 0 | 1 | 5 | 16);
                assert_eq!(is_admissible(id, n), residue_ok, "graph {:?} n={}", id, n);
            }
        }
    }

    #[test]
    fn n9_isolated_vertex_gcd_convention() {
        // n9 is K5 plus an isolated vertex; gcd(4,0) = 4 gives the known
        // K5 spectrum n ≡ 1, 5 (mod 20).
        assert_eq!(degree_gcd(GraphId::new(9).unwrap()), 4);
        for n in 6..=500u64 {
            let expected = matches!(n % 20, 1 | 5);
            assert_eq!(
                is_admissible(GraphId::new(9).unwrap(), n),
                expected,
                "n={}",
                n
            );
        }
    }

    #[test]
    fn spectrum_status_exception_table() {
        use SpectrumStatus::*;
        assert_eq!(spectrum_status(GraphId::N3, 16).unwrap(), Unknown);
        assert_eq!(spectrum_status(GraphId::N6, 16).unwrap(), Unknown);
        assert_eq!(spectrum_status(GraphId::N10, 16).unwrap(), Unknown);
        assert_eq!(spectrum_status(GraphId::N8, 16).unwrap(), Nonexistent);
        assert_eq!(spectrum_status(GraphId::N13, 16).unwrap(), Nonexistent);
        assert_eq!(spectrum_status(GraphId::N13, 20).unwrap(), Nonexistent);
        assert_eq!(spectrum_status(GraphId::N8, 20).unwrap(), Exists);
        assert_eq!(spectrum_status(GraphId::N10, 36).unwrap(), Exists);
        for id in TARGET_GRAPHS {
            assert_eq!(spectrum_status(id, 5).unwrap(), Nonexistent);
            assert_eq!(spectrum_status(id, 0).unwrap(), TooSmallOrTrivial);
            assert_eq!(spectrum_status(id, 1).unwrap(), TooSmallOrTrivial);
            assert_eq!(spectrum_status(id, 22).unwrap(), Inadmissible);
        }
        assert!(spectrum_status(GraphId::new(9).unwrap(), 21).is_err());
    }

    #[test]
    fn status_agrees_with_admissibility_except_order_5() {
        // Order 5 is the one deliberate exception: it is inadmissible (fails
        // the minimum-order condition) yet reported Nonexistent rather than
        // Inadmissible, since that is the sharper statement.
        for id in TARGET_GRAPHS {
            for n in 0..=500u64 {
                if n == 5 {
                    continue;
                }
                let status = spectrum_status(id, n).unwrap();
                assert_eq!(
                    status != SpectrumStatus::Inadmissible,
                    is_admissible(id, n),
                    "graph {:?} n={} status {:?}",
                    id,
                    n,
                    status
                );
            }
        }
    }
}
