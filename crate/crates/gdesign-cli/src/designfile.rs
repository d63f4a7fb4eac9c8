//! The design output format: one placed block per line, preceded by a
//! comment header recording the order, the block count, and the
//! construction plan.  Files round-trip through [`parse_design`] and are
//! re-verified by the `verify` subcommand.
//!
//! ```text
//! # design of order 61 into n6 (183 blocks)
//! # plan:
//! #   K_61 (n6): inflate TD(3,2), weight 10 everywhere, plus one extra point
//! design n6 61
//! n6: 0 1 2 3 4 10
//! ...
//! end
//! ```

use gdesign_core::catalog::GraphId;
use gdesign_core::decomp_core::{PlacedBlock, TargetGraph};
use gdesign_core::wilson::Design;
use thiserror::Error;

#[derive(Error, Debug)]
pub enum DesignFileError {
    #[error("{file}:{line}: {msg}")]
    Parse {
        file: String,
        line: usize,
        msg: String,
    },
}

/// Renders a design with a canonical block order: lexicographic on the
/// point 6-tuples.  Output is byte-deterministic for a fixed design.
pub fn render_design(design: &Design, plan: &[String]) -> String {
    let mut blocks: Vec<[usize; 6]> = design.blocks.iter().map(|b| b.points).collect();
    blocks.sort_unstable();
    let name = design.graph.name();
    let mut out = String::new();
    out.push_str(&format!(
        "# design of order {} into {name} ({} blocks)\n",
        design.order,
        blocks.len()
    ));
    if !plan.is_empty() {
        out.push_str("# plan:\n");
        for line in plan {
            out.push_str(&format!("#   {line}\n"));
        }
    }
    out.push_str(&format!("design {name} {}\n", design.order));
    for b in &blocks {
        out.push_str(&format!(
            "{name}: {} {} {} {} {} {}\n",
            b[0], b[1], b[2], b[3], b[4], b[5]
        ));
    }
    out.push_str("end\n");
    out
}

/// Parses a design file back into a [`Design`].  Verification is the
/// caller's job (`verify_blocks` against the complete target of the
/// stated order).
pub fn parse_design(file: &str, text: &str) -> Result<Design, DesignFileError> {
    let err = |line: usize, msg: String| DesignFileError::Parse {
        file: file.to_string(),
        line,
        msg,
    };
    let mut header: Option<(GraphId, usize)> = None;
    let mut blocks: Vec<PlacedBlock> = Vec::new();
    let mut ended = false;
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if ended {
            return Err(err(lineno, "content after `end`".into()));
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match (toks[0], &header) {
            ("design", None) => {
                if toks.len() != 3 {
                    return Err(err(lineno, "expected: design <graph> <order>".into()));
                }
                let graph = GraphId::parse(toks[1]).map_err(|e| err(lineno, e.to_string()))?;
                let order: usize = toks[2]
                    .parse()
                    .map_err(|_| err(lineno, format!("bad order {:?}", toks[2])))?;
                header = Some((graph, order));
            }
            ("design", Some(_)) => return Err(err(lineno, "duplicate design line".into())),
            ("end", Some(_)) => ended = true,
            (tok, Some((graph, _))) => {
                let stated = tok.strip_suffix(':').ok_or_else(|| {
                    err(lineno, format!("expected a `{}:` block line", graph.name()))
                })?;
                if stated != graph.name() {
                    return Err(err(
                        lineno,
                        format!("block graph {stated:?} does not match the design line"),
                    ));
                }
                if toks.len() != 7 {
                    return Err(err(lineno, "expected six points after the graph id".into()));
                }
                let mut pts = [0usize; 6];
                for (slot, tok) in pts.iter_mut().zip(&toks[1..]) {
                    *slot = tok
                        .parse()
                        .map_err(|_| err(lineno, format!("bad point {tok:?}")))?;
                }
                let block =
                    PlacedBlock::new(*graph, pts).map_err(|e| err(lineno, e.to_string()))?;
                blocks.push(block);
            }
            (tok, None) => return Err(err(lineno, format!("{tok:?} before the design line"))),
        }
    }
    let (graph, order) = match header {
        Some(h) => h,
        None => return Err(err(text.lines().count(), "no design line".into())),
    };
    if !ended {
        return Err(err(text.lines().count(), "missing `end`".into()));
    }
    Ok(Design {
        graph,
        order,
        blocks,
    })
}

/// Display name of a decomposition target: `K_60`, `K_{10,10,10}`, with
/// long runs of equal part sizes compressed to exponents (`K_{1^39,21}`).
pub fn shape_label(target: &TargetGraph) -> String {
    match target.parts() {
        None => format!("K_{}", target.point_count()),
        Some(parts) => {
            let sizes: Vec<usize> = parts.iter().map(Vec::len).collect();
            let mut pieces: Vec<String> = Vec::new();
            let mut i = 0;
            while i < sizes.len() {
                let mut j = i;
                while j < sizes.len() && sizes[j] == sizes[i] {
                    j += 1;
                }
                let run = j - i;
                if run >= 5 {
                    pieces.push(format!("{}^{run}", sizes[i]));
                } else {
                    for _ in 0..run {
                        pieces.push(sizes[i].to_string());
                    }
                }
                i = j;
            }
            format!("K_{{{}}}", pieces.join(","))
        }
    }
}
