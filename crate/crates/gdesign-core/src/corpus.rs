//! Parser, verifier and lookup index for the bundled base-block records.
//!
//! Records live in a small line-oriented text format.  `#` starts a comment;
//! blank lines are ignored.  A record is bracketed by `decomp <name>` and
//! `end` and contains, in any order between the brackets:
//!
//! ```text
//! target complete 21            (or: target multipartite 29)
//! part 0 6 12 18                (multipartite only, one line per part)
//! segment 0 21 1                (start length stride)
//! orbits 21
//! base n3 0 1 3 7 13 5          (graph id, then the six placed points)
//! end
//! ```
//!
//! Loading is strict: every record must parse, and every per-graph
//! restriction must pass exact-once verification before the corpus is
//! usable.  Known transcription errors are handled by an explicit patch
//! list — each patch names the file, the exact bad line, its replacement
//! and a justification, and fails loudly when it no longer applies.
//! Nothing is ever repaired silently.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use thiserror::Error;

use crate::catalog::GraphId;
use crate::decomp_core::{
    verify_decomposition, BaseDecomposition, DevelopmentRule, ModelError, PlacedBlock, Point,
    Segment, ShapeKey, TargetGraph,
};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum CorpusError {
    #[error("{file}:{line}: {msg}")]
    Parse {
        file: String,
        line: usize,
        msg: String,
    },
    #[error("record {name}: {source}")]
    Model { name: String, source: ModelError },
    #[error("record {name}, graph {graph}: verification failed ({problems} bad pairs)")]
    VerifyFailed {
        name: String,
        graph: &'static str,
        problems: usize,
    },
    #[error("duplicate record name {0}")]
    DuplicateName(String),
    #[error("patch for {file} does not apply (line not found): {old}")]
    PatchStale { file: String, old: String },
    #[error("patch for {file} is ambiguous ({count} occurrences): {old}")]
    PatchAmbiguous {
        file: String,
        old: String,
        count: usize,
    },
}

/// An explicit erratum: replace one exact line of one bundled file.
/// The `note` states why the shipped text is wrong; a patch whose `old`
/// line is missing or ambiguous aborts the load.
#[derive(Clone, Copy, Debug)]
pub struct Patch {
    pub file: &'static str,
    pub old: &'static str,
    pub new: &'static str,
    pub note: &'static str,
}

/// A parsed record plus bookkeeping: which graphs it carries and where it
/// came from.
#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub decomposition: BaseDecomposition,
    /// Graph ids appearing among the base blocks, in first-appearance order.
    pub graphs: Vec<GraphId>,
    /// Provenance tag, e.g. `bundled:k21`.
    pub source: String,
}

/// The verified record collection with a (shape, graph) lookup index.
#[derive(Debug)]
pub struct Corpus {
    entries: Vec<CorpusEntry>,
    /// Maps (shape, graph) to indices into `entries`, in load order.
    index: BTreeMap<(ShapeKey, GraphId), Vec<usize>>,
    /// Notes of every patch applied during load.
    pub applied_patches: Vec<String>,
}

fn parse_usize(file: &str, line: usize, tok: &str, what: &str) -> Result<usize, CorpusError> {
    tok.parse().map_err(|_| CorpusError::Parse {
        file: file.to_string(),
        line,
        msg: alloc::format!("bad {what}: {tok:?}"),
    })
}

struct PartialRecord {
    name: String,
    start_line: usize,
    n: Option<(usize, bool)>, // (order, multipartite?)
    parts: Vec<Vec<Point>>,
    segments: Vec<Segment>,
    orbits: Option<usize>,
    bases: Vec<PlacedBlock>,
}

/// Parses one file's worth of records.  `file` is used in error messages
/// only.
pub fn parse_file(file: &str, text: &str) -> Result<Vec<BaseDecomposition>, CorpusError> {
    let err = |line: usize, msg: String| CorpusError::Parse {
        file: file.to_string(),
        line,
        msg,
    };
    let mut records = Vec::new();
    let mut current: Option<PartialRecord> = None;
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        let keyword = toks[0];
        if keyword == "decomp" {
            if current.is_some() {
                return Err(err(lineno, "nested record: missing `end`".into()));
            }
            if toks.len() != 2 {
                return Err(err(lineno, "expected: decomp <name>".into()));
            }
            current = Some(PartialRecord {
                name: toks[1].to_string(),
                start_line: lineno,
                n: None,
                parts: Vec::new(),
                segments: Vec::new(),
                orbits: None,
                bases: Vec::new(),
            });
            continue;
        }
        let rec = current
            .as_mut()
            .ok_or_else(|| err(lineno, alloc::format!("{keyword:?} outside a record")))?;
        match keyword {
            "target" => {
                if toks.len() != 3 {
                    return Err(err(
                        lineno,
                        "expected: target complete|multipartite <N>".into(),
                    ));
                }
                let n = parse_usize(file, lineno, toks[2], "order")?;
                let multi = match toks[1] {
                    "complete" => false,
                    "multipartite" => true,
                    other => {
                        return Err(err(lineno, alloc::format!("unknown target kind {other:?}")))
                    }
                };
                if rec.n.replace((n, multi)).is_some() {
                    return Err(err(lineno, "duplicate target line".into()));
                }
            }
            "part" => {
                let mut part = Vec::with_capacity(toks.len() - 1);
                for tok in &toks[1..] {
                    part.push(parse_usize(file, lineno, tok, "point")?);
                }
                if part.is_empty() {
                    return Err(err(lineno, "empty part".into()));
                }
                rec.parts.push(part);
            }
            "segment" => {
                if toks.len() != 4 {
                    return Err(err(
                        lineno,
                        "expected: segment <start> <length> <stride>".into(),
                    ));
                }
                rec.segments.push(Segment {
                    start: parse_usize(file, lineno, toks[1], "segment start")?,
                    length: parse_usize(file, lineno, toks[2], "segment length")?,
                    stride: parse_usize(file, lineno, toks[3], "segment stride")?,
                });
            }
            "orbits" => {
                if toks.len() != 2 {
                    return Err(err(lineno, "expected: orbits <J>".into()));
                }
                let j = parse_usize(file, lineno, toks[1], "orbit count")?;
                if rec.orbits.replace(j).is_some() {
                    return Err(err(lineno, "duplicate orbits line".into()));
                }
            }
            "base" => {
                if toks.len() != 8 {
                    return Err(err(
                        lineno,
                        "expected: base <graph> z1 z2 z3 z4 z5 z6".into(),
                    ));
                }
                let graph =
                    GraphId::parse(toks[1]).map_err(|e| err(lineno, alloc::format!("{e}")))?;
                let mut points = [0; 6];
                for (slot, tok) in points.iter_mut().zip(&toks[2..]) {
                    *slot = parse_usize(file, lineno, tok, "point")?;
                }
                rec.bases.push(
                    PlacedBlock::new(graph, points)
                        .map_err(|e| err(lineno, alloc::format!("{e}")))?,
                );
            }
            "end" => {
                let rec = current.take().expect("checked above");
                let (n, multi) = rec.n.ok_or_else(|| {
                    err(lineno, alloc::format!("record {} has no target", rec.name))
                })?;
                if multi == rec.parts.is_empty() {
                    return Err(err(
                        lineno,
                        alloc::format!(
                            "record {}: part lines {} a multipartite target",
                            rec.name,
                            if multi {
                                "required by"
                            } else {
                                "only allowed with"
                            }
                        ),
                    ));
                }
                let target = if multi {
                    TargetGraph::multipartite(n, rec.parts).map_err(|e| CorpusError::Model {
                        name: rec.name.clone(),
                        source: e,
                    })?
                } else {
                    TargetGraph::complete(n)
                };
                let orbits = rec.orbits.ok_or_else(|| {
                    err(lineno, alloc::format!("record {} has no orbits", rec.name))
                })?;
                let rule =
                    DevelopmentRule::new(rec.segments, orbits).map_err(|e| CorpusError::Model {
                        name: rec.name.clone(),
                        source: e,
                    })?;
                let decomp = BaseDecomposition::new(rec.name.clone(), target, rule, rec.bases)
                    .map_err(|e| CorpusError::Model {
                        name: rec.name,
                        source: e,
                    })?;
                records.push(decomp);
            }
            other => return Err(err(lineno, alloc::format!("unknown keyword {other:?}"))),
        }
    }
    if let Some(rec) = current {
        return Err(err(
            rec.start_line,
            alloc::format!("record {} is never ended", rec.name),
        ));
    }
    Ok(records)
}

/// Writes a record back into the text format (comments are not preserved).
pub fn serialize_record(d: &BaseDecomposition) -> String {
    let mut out = String::new();
    out.push_str("decomp ");
    out.push_str(&d.name);
    out.push('\n');
    match d.target.parts() {
        None => out.push_str(&alloc::format!(
            "target complete {}\n",
            d.target.point_count()
        )),
        Some(parts) => {
            out.push_str(&alloc::format!(
                "target multipartite {}\n",
                d.target.point_count()
            ));
            for part in parts {
                out.push_str("part");
                for p in part {
                    out.push_str(&alloc::format!(" {p}"));
                }
                out.push('\n');
            }
        }
    }
    for s in d.rule.segments() {
        out.push_str(&alloc::format!(
            "segment {} {} {}\n",
            s.start,
            s.length,
            s.stride
        ));
    }
    out.push_str(&alloc::format!("orbits {}\n", d.rule.orbits()));
    for b in &d.bases {
        out.push_str(&alloc::format!(
            "base {} {} {} {} {} {} {}\n",
            b.graph.name(),
            b.points[0],
            b.points[1],
            b.points[2],
            b.points[3],
            b.points[4],
            b.points[5]
        ));
    }
    out.push_str("end\n");
    out
}

/// Applies the patches registered for `file` to `text`, recording each
/// applied patch's note.  Every registered patch must hit exactly one line.
fn apply_patches(
    file: &str,
    text: &str,
    patches: &[Patch],
    applied: &mut Vec<String>,
) -> Result<String, CorpusError> {
    let mut lines: Vec<String> = text.lines().map(|l| l.to_string()).collect();
    for p in patches.iter().filter(|p| p.file == file) {
        let hits: Vec<usize> = (0..lines.len())
            .filter(|&i| lines[i].trim() == p.old.trim())
            .collect();
        match hits.len() {
            0 => {
                return Err(CorpusError::PatchStale {
                    file: file.to_string(),
                    old: p.old.to_string(),
                })
            }
            1 => {
                lines[hits[0]] = p.new.to_string();
                applied.push(alloc::format!(
                    "{}: {} (was: {})",
                    file,
                    p.note,
                    p.old.trim()
                ));
            }
            count => {
                return Err(CorpusError::PatchAmbiguous {
                    file: file.to_string(),
                    old: p.old.to_string(),
                    count,
                })
            }
        }
    }
    Ok(lines.join("\n"))
}

impl Corpus {
    /// Parses every file, applies the patch list, and verifies every
    /// per-graph restriction of every record.  Any failure aborts the load.
    pub fn load(files: &[(&str, &str)], patches: &[Patch]) -> Result<Corpus, CorpusError> {
        let mut applied = Vec::new();
        let mut entries: Vec<CorpusEntry> = Vec::new();
        let mut names: BTreeMap<String, ()> = BTreeMap::new();
        for &(name, text) in files {
            let patched = apply_patches(name, text, patches, &mut applied)?;
            for decomposition in parse_file(name, &patched)? {
                if names.insert(decomposition.name.clone(), ()).is_some() {
                    return Err(CorpusError::DuplicateName(decomposition.name));
                }
                let mut graphs: Vec<GraphId> = Vec::new();
                for b in &decomposition.bases {
                    if !graphs.contains(&b.graph) {
                        graphs.push(b.graph);
                    }
                }
                for &g in &graphs {
                    let restricted = decomposition.restrict(g);
                    let report =
                        verify_decomposition(&restricted).map_err(|e| CorpusError::Model {
                            name: decomposition.name.clone(),
                            source: e,
                        })?;
                    if !report.pass {
                        return Err(CorpusError::VerifyFailed {
                            name: decomposition.name.clone(),
                            graph: g.name(),
                            problems: report.problems.len(),
                        });
                    }
                }
                let source = alloc::format!("bundled:{}", decomposition.name);
                entries.push(CorpusEntry {
                    decomposition,
                    graphs,
                    source,
                });
            }
        }
        let mut index: BTreeMap<(ShapeKey, GraphId), Vec<usize>> = BTreeMap::new();
        for (i, e) in entries.iter().enumerate() {
            for &g in &e.graphs {
                index
                    .entry((e.decomposition.target.shape(), g))
                    .or_default()
                    .push(i);
            }
        }
        Ok(Corpus {
            entries,
            index,
            applied_patches: applied,
        })
    }

    pub fn entries(&self) -> &[CorpusEntry] {
        &self.entries
    }

    pub fn entry_by_name(&self, name: &str) -> Option<&CorpusEntry> {
        self.entries.iter().find(|e| e.decomposition.name == name)
    }

    /// Finds a record for the given target shape carrying base blocks of
    /// `graph`, and returns the single-graph restriction.  When several
    /// records share a shape (variant records covering different graphs),
    /// the first one in load order that contains the graph wins.
    pub fn lookup(&self, shape: &ShapeKey, graph: GraphId) -> Option<BaseDecomposition> {
        let indices = self.index.get(&(shape.clone(), graph))?;
        indices
            .first()
            .map(|&i| self.entries[i].decomposition.restrict(graph))
    }

    /// All distinct shapes for which at least one record exists.
    pub fn shapes(&self) -> Vec<ShapeKey> {
        let mut shapes: Vec<ShapeKey> = self.index.keys().map(|(s, _)| s.clone()).collect();
        shapes.dedup();
        shapes
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::GraphId;

    /// A record small enough to keep inline: the order-21 cyclic record.
    const K21: &str = "\
# fixture record
decomp k21
target complete 21
segment 0 21 1
orbits 21
base n3 0 1 3 7 13 5
base n6 0 1 2 4 7 10
base n8 0 1 2 4 7 12
base n10 0 1 3 7 12 8
base n13 0 1 2 4 7 12
end
";

    #[test]
    fn parse_and_verify_fixture() {
        let corpus = Corpus::load(&[("k21.decomp", K21)], &[]).unwrap();
        assert_eq!(corpus.entries().len(), 1);
        let e = &corpus.entries()[0];
        assert_eq!(e.graphs.len(), 5);
        assert_eq!(e.source, "bundled:k21");
        let d = corpus
            .lookup(&ShapeKey::Complete(21), GraphId::N13)
            .unwrap();
        assert_eq!(d.bases.len(), 1);
        assert_eq!(d.bases[0].graph, GraphId::N13);
        assert!(corpus
            .lookup(&ShapeKey::Complete(22), GraphId::N13)
            .is_none());
    }

    #[test]
    fn round_trip_is_identity() {
        let records = parse_file("k21.decomp", K21).unwrap();
        let text = serialize_record(&records[0]);
        let reparsed = parse_file("k21.decomp", &text).unwrap();
        assert_eq!(records, reparsed);
        // And serialization is a fixed point from there on.
        assert_eq!(serialize_record(&reparsed[0]), text);
    }

    #[test]
    fn verification_failure_aborts_load() {
        // Corrupt one point of one base block; the record parses but the
        // n3 restriction no longer covers every pair exactly once.
        let bad = K21.replace("base n3 0 1 3 7 13 5", "base n3 0 1 3 7 13 6");
        let err = Corpus::load(&[("k21.decomp", &bad)], &[]).unwrap_err();
        assert!(matches!(err, CorpusError::VerifyFailed { .. }), "{err:?}");
    }

    #[test]
    fn patch_repairs_a_typo_and_is_recorded() {
        let bad = K21.replace("base n3 0 1 3 7 13 5", "base n3 0 1 3 7 13 6");
        let patch = Patch {
            file: "k21.decomp",
            old: "base n3 0 1 3 7 13 6",
            new: "base n3 0 1 3 7 13 5",
            note: "transcription typo in the final point of the n3 base block",
        };
        let corpus = Corpus::load(&[("k21.decomp", &bad)], &[patch]).unwrap();
        assert_eq!(corpus.applied_patches.len(), 1);
        assert!(corpus.applied_patches[0].contains("transcription typo"));
    }

    #[test]
    fn stale_patch_is_an_error() {
        let patch = Patch {
            file: "k21.decomp",
            old: "base n3 9 9 9 9 9 9",
            new: "base n3 0 1 3 7 13 5",
            note: "no longer applicable",
        };
        let err = Corpus::load(&[("k21.decomp", K21)], &[patch]).unwrap_err();
        assert!(matches!(err, CorpusError::PatchStale { .. }), "{err:?}");
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err =
            parse_file("x.decomp", "decomp a\ntarget complete 21\nsegment 0 21\n").unwrap_err();
        match err {
            CorpusError::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
        let err = parse_file("x.decomp", "base n3 0 1 2 3 4 5\n").unwrap_err();
        assert!(matches!(err, CorpusError::Parse { line: 1, .. }));
    }

    #[test]
    fn unterminated_record_is_an_error() {
        let err = parse_file("x.decomp", "decomp a\ntarget complete 21\n").unwrap_err();
        assert!(matches!(err, CorpusError::Parse { line: 1, .. }), "{err:?}");
    }
}
