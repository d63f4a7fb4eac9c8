//! Writer for the `.gdd` file format (the core crate carries the
//! parser).  Emitted files round-trip through `parse_gdd_file`.

use gdesign_core::gdd_engine::{Gdd, GddSummary};

/// Renders one record, preceded by a summary comment.  Byte-deterministic
/// for a fixed GDD.
pub fn render_gdd(name: &str, gdd: &Gdd, summary: &GddSummary) -> String {
    let mut out = String::new();
    let classes = match summary.class_count {
        Some(c) => format!(", {c} parallel classes"),
        None => String::new(),
    };
    out.push_str(&format!(
        "# type {}: {} blocks{classes}\n",
        summary.group_type, summary.block_count
    ));
    out.push_str(&format!("gdd {name}\npoints {}\n", gdd.point_count));
    let numbers = |xs: &[usize]| {
        xs.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    };
    for group in &gdd.groups {
        out.push_str(&format!("group {}\n", numbers(group)));
    }
    for block in &gdd.blocks {
        out.push_str(&format!("block {}\n", numbers(block)));
    }
    if let Some(classes) = &gdd.resolution {
        for class in classes {
            out.push_str(&format!("class {}\n", numbers(class)));
        }
    }
    out.push_str("end\n");
    out
}
