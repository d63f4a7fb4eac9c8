//! The data files compiled into the binary, plus loaders that prefer an
//! on-disk directory when one is supplied (`--data` flag or the
//! `DESIGN_DATA_DIR` environment variable).

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use gdesign_core::corpus::{Corpus, Patch};
use gdesign_core::gdd_engine::{parse_gdd_file, Gdd};

/// Every bundled base-block record file.
pub const DECOMP_FILES: &[(&str, &str)] = &[
    (
        "k105.decomp",
        include_str!("../../../data/decomp/k105.decomp"),
    ),
    (
        "k116.decomp",
        include_str!("../../../data/decomp/k116.decomp"),
    ),
    (
        "k136.decomp",
        include_str!("../../../data/decomp/k136.decomp"),
    ),
    (
        "k156.decomp",
        include_str!("../../../data/decomp/k156.decomp"),
    ),
    (
        "k20a.decomp",
        include_str!("../../../data/decomp/k20a.decomp"),
    ),
    (
        "k20b.decomp",
        include_str!("../../../data/decomp/k20b.decomp"),
    ),
    (
        "k21.decomp",
        include_str!("../../../data/decomp/k21.decomp"),
    ),
    (
        "k25.decomp",
        include_str!("../../../data/decomp/k25.decomp"),
    ),
    (
        "k36.decomp",
        include_str!("../../../data/decomp/k36.decomp"),
    ),
    (
        "k40a.decomp",
        include_str!("../../../data/decomp/k40a.decomp"),
    ),
    (
        "k40b.decomp",
        include_str!("../../../data/decomp/k40b.decomp"),
    ),
    (
        "k41.decomp",
        include_str!("../../../data/decomp/k41.decomp"),
    ),
    (
        "k45a.decomp",
        include_str!("../../../data/decomp/k45a.decomp"),
    ),
    (
        "k45b.decomp",
        include_str!("../../../data/decomp/k45b.decomp"),
    ),
    (
        "k56a.decomp",
        include_str!("../../../data/decomp/k56a.decomp"),
    ),
    (
        "k56b.decomp",
        include_str!("../../../data/decomp/k56b.decomp"),
    ),
    (
        "k60.decomp",
        include_str!("../../../data/decomp/k60.decomp"),
    ),
    (
        "k61.decomp",
        include_str!("../../../data/decomp/k61.decomp"),
    ),
    (
        "k65.decomp",
        include_str!("../../../data/decomp/k65.decomp"),
    ),
    (
        "k76.decomp",
        include_str!("../../../data/decomp/k76.decomp"),
    ),
    (
        "k80.decomp",
        include_str!("../../../data/decomp/k80.decomp"),
    ),
    (
        "k85a.decomp",
        include_str!("../../../data/decomp/k85a.decomp"),
    ),
    (
        "k85b.decomp",
        include_str!("../../../data/decomp/k85b.decomp"),
    ),
    (
        "k96.decomp",
        include_str!("../../../data/decomp/k96.decomp"),
    ),
    (
        "m10-10-10-10-10.decomp",
        include_str!("../../../data/decomp/m10-10-10-10-10.decomp"),
    ),
    (
        "m10-10-10-10-15a.decomp",
        include_str!("../../../data/decomp/m10-10-10-10-15a.decomp"),
    ),
    (
        "m10-10-10-10-15b.decomp",
        include_str!("../../../data/decomp/m10-10-10-10-15b.decomp"),
    ),
    (
        "m10-10-10-10-20.decomp",
        include_str!("../../../data/decomp/m10-10-10-10-20.decomp"),
    ),
    (
        "m10-10-10-10.decomp",
        include_str!("../../../data/decomp/m10-10-10-10.decomp"),
    ),
    (
        "m10-10-10-15.decomp",
        include_str!("../../../data/decomp/m10-10-10-15.decomp"),
    ),
    (
        "m10-10-10.decomp",
        include_str!("../../../data/decomp/m10-10-10.decomp"),
    ),
    (
        "m15-15-15-15.decomp",
        include_str!("../../../data/decomp/m15-15-15-15.decomp"),
    ),
    (
        "m1x39-21.decomp",
        include_str!("../../../data/decomp/m1x39-21.decomp"),
    ),
    (
        "m1x55-25.decomp",
        include_str!("../../../data/decomp/m1x55-25.decomp"),
    ),
    (
        "m1x99-41.decomp",
        include_str!("../../../data/decomp/m1x99-41.decomp"),
    ),
    (
        "m20-20-20-20.decomp",
        include_str!("../../../data/decomp/m20-20-20-20.decomp"),
    ),
    (
        "m21-21-21-21-21.decomp",
        include_str!("../../../data/decomp/m21-21-21-21-21.decomp"),
    ),
    (
        "m21-21-21-21-36.decomp",
        include_str!("../../../data/decomp/m21-21-21-21-36.decomp"),
    ),
    (
        "m25-25-25-25.decomp",
        include_str!("../../../data/decomp/m25-25-25-25.decomp"),
    ),
    (
        "m3-3-3-3-3a.decomp",
        include_str!("../../../data/decomp/m3-3-3-3-3a.decomp"),
    ),
    (
        "m3-3-3-3-3b.decomp",
        include_str!("../../../data/decomp/m3-3-3-3-3b.decomp"),
    ),
    (
        "m4-4-4-4-4-7.decomp",
        include_str!("../../../data/decomp/m4-4-4-4-4-7.decomp"),
    ),
    (
        "m4x6-10.decomp",
        include_str!("../../../data/decomp/m4x6-10.decomp"),
    ),
    (
        "m4x6-15.decomp",
        include_str!("../../../data/decomp/m4x6-15.decomp"),
    ),
    (
        "m4x6-5a.decomp",
        include_str!("../../../data/decomp/m4x6-5a.decomp"),
    ),
    (
        "m4x6-5b.decomp",
        include_str!("../../../data/decomp/m4x6-5b.decomp"),
    ),
    (
        "m4x6.decomp",
        include_str!("../../../data/decomp/m4x6.decomp"),
    ),
    (
        "m5-5-5-5-5.decomp",
        include_str!("../../../data/decomp/m5-5-5-5-5.decomp"),
    ),
    (
        "m5-5-5-9.decomp",
        include_str!("../../../data/decomp/m5-5-5-9.decomp"),
    ),
    (
        "m6-6-6-6-6.decomp",
        include_str!("../../../data/decomp/m6-6-6-6-6.decomp"),
    ),
    (
        "m8-8-8-8-3.decomp",
        include_str!("../../../data/decomp/m8-8-8-8-3.decomp"),
    ),
    (
        "m8-8-8-8-8.decomp",
        include_str!("../../../data/decomp/m8-8-8-8-8.decomp"),
    ),
];

/// Bundled GDD files (currently the resolvable (28,4,1) design that seeds
/// the resolvable 4-GDDs of the recursive step).
pub const GDD_FILES: &[(&str, &str)] = &[(
    "rbibd_28.gdd",
    include_str!("../../../data/gdd/rbibd_28.gdd"),
)];

/// Errata applied to the bundled records at load time.  Empty: the
/// shipped data is clean.  The mechanism stays wired so a correction can
/// be recorded without editing a generated file by hand.
pub const PATCHES: &[Patch] = &[];

/// The corpus and GDD collection, embedded or read from `dir`.
pub struct DataSet {
    pub corpus: Corpus,
    pub gdds: Vec<Gdd>,
    /// Human-readable origin for reports ("bundled" or the directory).
    pub origin: String,
}

pub fn bundled_data() -> Result<DataSet> {
    let corpus = Corpus::load(DECOMP_FILES, PATCHES).context("bundled corpus failed to load")?;
    let mut gdds = Vec::new();
    for (file, text) in GDD_FILES {
        for (_, gdd) in
            parse_gdd_file(file, text).with_context(|| format!("bundled {file} failed to load"))?
        {
            gdds.push(gdd);
        }
    }
    Ok(DataSet {
        corpus,
        gdds,
        origin: "bundled".into(),
    })
}

/// Reads every `*.decomp` and `*.gdd` under `dir` (one level, sorted by
/// file name so load order — and therefore lookup preference — is
/// stable).
pub fn data_from_dir(dir: &Path) -> Result<DataSet> {
    let mut decomp_files: Vec<(String, String)> = Vec::new();
    let mut gdd_files: Vec<(String, String)> = Vec::new();
    let mut entries: Vec<_> = fs::read_dir(dir)
        .with_context(|| format!("cannot read data directory {}", dir.display()))?
        .collect::<std::io::Result<_>>()?;
    entries.sort_by_key(|e| e.file_name());
    for entry in entries {
        let path = entry.path();
        let name = entry.file_name().to_string_lossy().into_owned();
        let ext = path.extension().and_then(|e| e.to_str());
        match ext {
            Some("decomp") => {
                let text = fs::read_to_string(&path)
                    .with_context(|| format!("cannot read {}", path.display()))?;
                decomp_files.push((name, text));
            }
            Some("gdd") => {
                let text = fs::read_to_string(&path)
                    .with_context(|| format!("cannot read {}", path.display()))?;
                gdd_files.push((name, text));
            }
            _ => {}
        }
    }
    if decomp_files.is_empty() {
        bail!("no .decomp files in {}", dir.display());
    }
    let borrowed: Vec<(&str, &str)> = decomp_files
        .iter()
        .map(|(n, t)| (n.as_str(), t.as_str()))
        .collect();
    let corpus = Corpus::load(&borrowed, &[])?;
    let mut gdds = Vec::new();
    for (file, text) in &gdd_files {
        for (_, gdd) in parse_gdd_file(file, text)? {
            gdds.push(gdd);
        }
    }
    Ok(DataSet {
        corpus,
        gdds,
        origin: dir.display().to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_data_loads_and_verifies() {
        let data = bundled_data().unwrap();
        assert_eq!(data.corpus.entries().len(), DECOMP_FILES.len());
        assert_eq!(data.gdds.len(), 1);
        assert!(data.corpus.applied_patches.is_empty());
    }
}
