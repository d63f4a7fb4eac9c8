//! Group-divisible designs and the machinery that builds them: finite
//! fields, mutually orthogonal Latin squares, transversal designs, affine
//! and projective planes, plane derivations, truncation, and a seeded
//! backtracking search for small GDDs.
//!
//! A k-GDD of type g1^t1 g2^t2 ... is a point set partitioned into groups
//! (t1 groups of size g1, and so on) together with blocks of size k such
//! that every pair of points from *different* groups lies in exactly one
//! block and no block meets a group twice.  A transversal design TD(k, q)
//! is the special case k^... = q^k: k groups of size q, every block a
//! transversal.  GDDs are the skeletons consumed by weighted inflation:
//! their cross-pair structure is what lets complete-multipartite ingredient
//! decompositions tile a large complete graph.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum GddError {
    #[error("unsupported field order {0} (prime powers up to 13 are available)")]
    UnsupportedFieldOrder(usize),
    #[error("a TD({k},{q}) requires k <= q+1")]
    KTooLarge { k: usize, q: usize },
    #[error("cannot keep {keep} points of a group of size {have}")]
    BadTruncation { keep: usize, have: usize },
    #[error("structural check failed: {0}")]
    Structure(String),
    #[error("counting obstruction: {0}")]
    Counting(String),
    #[error("search budget exhausted after {nodes} nodes")]
    BudgetExhausted { nodes: u64 },
    #[error("no {0} available")]
    NoIngredient(String),
    #[error("cannot parse group type {0:?}")]
    BadType(String),
    #[error("{file}:{line}: {msg}")]
    Parse {
        file: String,
        line: usize,
        msg: String,
    },
}

// ---------------------------------------------------------------------------
// Finite fields
// ---------------------------------------------------------------------------

/// A finite field of order q <= 13, with full operation tables.  Prime
/// power orders use the reduction polynomials x^2+x+1 (GF(4)),
/// x^3+x+1 (GF(8)) and x^2+1 (GF(9)); elements are encoded as base-p
/// digit strings read as integers, so 0 and 1 are the identities.
pub struct FiniteField {
    pub q: usize,
    add: Vec<u8>,
    mul: Vec<u8>,
    neg: Vec<u8>,
    inv: Vec<u8>,
}

fn digits(mut e: usize, p: usize, k: usize) -> Vec<usize> {
    let mut d = alloc::vec![0; k];
    for slot in d.iter_mut() {
        *slot = e % p;
        e /= p;
    }
    d
}

fn undigits(d: &[usize], p: usize) -> usize {
    d.iter().rev().fold(0, |acc, &x| acc * p + x)
}

pub fn make_field(q: usize) -> Result<FiniteField, GddError> {
    // (characteristic, degree, lower coefficients of a monic reduction
    // polynomial: x^k = -(m[0] + m[1] x + ...)).
    let (p, k, modulus): (usize, usize, Vec<usize>) = match q {
        2 | 3 | 5 | 7 | 11 | 13 => (q, 1, alloc::vec![0]),
        4 => (2, 2, alloc::vec![1, 1]),
        8 => (2, 3, alloc::vec![1, 1, 0]),
        9 => (3, 2, alloc::vec![1, 0]),
        _ => return Err(GddError::UnsupportedFieldOrder(q)),
    };
    let mut add = alloc::vec![0u8; q * q];
    let mut mul = alloc::vec![0u8; q * q];
    for a in 0..q {
        for b in 0..q {
            let da = digits(a, p, k);
            let db = digits(b, p, k);
            let sum: Vec<usize> = da.iter().zip(&db).map(|(&x, &y)| (x + y) % p).collect();
            add[a * q + b] = undigits(&sum, p) as u8;
            // Polynomial product, then reduce x^i (i >= k) via the modulus.
            let mut prod = alloc::vec![0usize; 2 * k - 1];
            for (i, &x) in da.iter().enumerate() {
                for (j, &y) in db.iter().enumerate() {
                    prod[i + j] = (prod[i + j] + x * y) % p;
                }
            }
            for i in (k..prod.len()).rev() {
                let c = prod[i];
                if c != 0 {
                    prod[i] = 0;
                    for (j, &m) in modulus.iter().enumerate() {
                        prod[i - k + j] = (prod[i - k + j] + (p - m) % p * c) % p;
                    }
                }
            }
            mul[a * q + b] = undigits(&prod[..k], p) as u8;
        }
    }
    let mut neg = alloc::vec![0u8; q];
    let mut inv = alloc::vec![0u8; q];
    for a in 0..q {
        neg[a] = (0..q).find(|&b| add[a * q + b] == 0).unwrap() as u8;
        if a != 0 {
            inv[a] = (1..q).find(|&b| mul[a * q + b] == 1).unwrap() as u8;
        }
    }
    Ok(FiniteField {
        q,
        add,
        mul,
        neg,
        inv,
    })
}

impl FiniteField {
    pub fn add(&self, a: usize, b: usize) -> usize {
        self.add[a * self.q + b] as usize
    }
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.q + b] as usize
    }
    pub fn neg(&self, a: usize) -> usize {
        self.neg[a] as usize
    }
    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.add(a, self.neg(b))
    }
    /// Multiplicative inverse; a must be nonzero.
    pub fn inv(&self, a: usize) -> usize {
        debug_assert_ne!(a, 0);
        self.inv[a] as usize
    }
}

/// The q-1 Latin squares L_a(x, y) = a*x + y (a nonzero), pairwise
/// orthogonal.  Square index i corresponds to a = i+1; entry (x, y) is at
/// `squares[i][x * q + y]`.
pub fn mols(q: usize) -> Result<Vec<Vec<usize>>, GddError> {
    let f = make_field(q)?;
    let mut squares = Vec::with_capacity(q - 1);
    for a in 1..q {
        let mut sq = alloc::vec![0usize; q * q];
        for x in 0..q {
            for y in 0..q {
                sq[x * q + y] = f.add(f.mul(a, x), y);
            }
        }
        squares.push(sq);
    }
    Ok(squares)
}

// ---------------------------------------------------------------------------
// GDD structure and verification
// ---------------------------------------------------------------------------

/// A group-divisible design on points 0..point_count.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Gdd {
    pub point_count: usize,
    pub groups: Vec<Vec<usize>>,
    pub blocks: Vec<Vec<usize>>,
    /// If present: a partition of the blocks into parallel classes, each
    /// class given as block indices and covering every point exactly once.
    pub resolution: Option<Vec<Vec<usize>>>,
}

/// Multiset of group sizes, e.g. `4^6 5^1`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
pub struct GroupType(BTreeMap<usize, usize>);

impl GroupType {
    pub fn from_sizes(sizes: &[usize]) -> GroupType {
        let mut map = BTreeMap::new();
        for &s in sizes {
            *map.entry(s).or_insert(0) += 1;
        }
        GroupType(map)
    }

    /// Group sizes in non-increasing order.
    pub fn sizes(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for (&size, &count) in self.0.iter().rev() {
            out.extend(core::iter::repeat_n(size, count));
        }
        out
    }

    pub fn point_count(&self) -> usize {
        self.0.iter().map(|(&s, &c)| s * c).sum()
    }

    pub fn group_count(&self) -> usize {
        self.0.values().sum()
    }

    /// Parses `"4^7"`, `"11^6 7^1"`, etc.  A bare number means exponent 1.
    pub fn parse(s: &str) -> Result<GroupType, GddError> {
        let bad = || GddError::BadType(s.to_string());
        let mut map = BTreeMap::new();
        for tok in s.split_whitespace() {
            let (size, count) = match tok.split_once('^') {
                Some((g, t)) => (g.parse().map_err(|_| bad())?, t.parse().map_err(|_| bad())?),
                None => (tok.parse().map_err(|_| bad())?, 1),
            };
            if size == 0 || count == 0 {
                return Err(bad());
            }
            *map.entry(size).or_insert(0usize) += count;
        }
        if map.is_empty() {
            return Err(bad());
        }
        Ok(GroupType(map))
    }
}

impl core::fmt::Display for GroupType {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        let mut first = true;
        for (&size, &count) in self.0.iter().rev() {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{size}^{count}")?;
            first = false;
        }
        Ok(())
    }
}

impl Gdd {
    pub fn group_type(&self) -> GroupType {
        GroupType::from_sizes(&self.groups.iter().map(Vec::len).collect::<Vec<_>>())
    }

    /// Index of the group containing each point; errors are caught by
    /// `verify_gdd`, so this assumes a partition.
    pub fn group_of(&self) -> Vec<usize> {
        let mut out = alloc::vec![usize::MAX; self.point_count];
        for (g, group) in self.groups.iter().enumerate() {
            for &p in group {
                out[p] = g;
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GddSummary {
    pub group_type: GroupType,
    pub block_count: usize,
    pub block_sizes: Vec<usize>,
    pub class_count: Option<usize>,
}

/// Full structural check: groups partition the points; blocks meet no
/// group twice; every cross-group pair lies in exactly one block; a
/// resolution, if present, partitions the blocks into parallel classes.
pub fn verify_gdd(gdd: &Gdd) -> Result<GddSummary, GddError> {
    let n = gdd.point_count;
    let fail = |msg: String| Err(GddError::Structure(msg));
    let mut owner = alloc::vec![usize::MAX; n];
    for (gi, group) in gdd.groups.iter().enumerate() {
        if group.is_empty() {
            return fail(alloc::format!("group {gi} is empty"));
        }
        for &p in group {
            if p >= n {
                return fail(alloc::format!("group {gi} contains out-of-range point {p}"));
            }
            if owner[p] != usize::MAX {
                return fail(alloc::format!("point {p} lies in two groups"));
            }
            owner[p] = gi;
        }
    }
    if let Some(p) = owner.iter().position(|&g| g == usize::MAX) {
        return fail(alloc::format!("point {p} lies in no group"));
    }
    let mut counter = alloc::vec![0u32; n * n.saturating_sub(1) / 2];
    let tri = |u: usize, v: usize| u * n - u * (u + 1) / 2 + (v - u - 1);
    let mut block_sizes: Vec<usize> = Vec::new();
    for (bi, block) in gdd.blocks.iter().enumerate() {
        if block.len() < 2 {
            return fail(alloc::format!("block {bi} has fewer than 2 points"));
        }
        for i in 0..block.len() {
            if block[i] >= n {
                return fail(alloc::format!("block {bi} contains out-of-range point"));
            }
            for j in i + 1..block.len() {
                let (u, v) = (block[i].min(block[j]), block[i].max(block[j]));
                if u == v {
                    return fail(alloc::format!("block {bi} repeats point {u}"));
                }
                if owner[u] == owner[v] {
                    return fail(alloc::format!(
                        "block {bi} meets group {} twice (points {u}, {v})",
                        owner[u]
                    ));
                }
                counter[tri(u, v)] += 1;
            }
        }
        if !block_sizes.contains(&block.len()) {
            block_sizes.push(block.len());
        }
    }
    for u in 0..n {
        for v in u + 1..n {
            let c = counter[tri(u, v)];
            let want = u32::from(owner[u] != owner[v]);
            if c != want {
                return fail(alloc::format!(
                    "pair ({u},{v}) covered {c} times, expected {want}"
                ));
            }
        }
    }
    let mut class_count = None;
    if let Some(classes) = &gdd.resolution {
        let mut used = alloc::vec![false; gdd.blocks.len()];
        for (ci, class) in classes.iter().enumerate() {
            let mut hit = alloc::vec![false; n];
            for &bi in class {
                if bi >= gdd.blocks.len() {
                    return fail(alloc::format!("class {ci} names missing block {bi}"));
                }
                if used[bi] {
                    return fail(alloc::format!("block {bi} appears in two classes"));
                }
                used[bi] = true;
                for &p in &gdd.blocks[bi] {
                    if hit[p] {
                        return fail(alloc::format!("class {ci} covers point {p} twice"));
                    }
                    hit[p] = true;
                }
            }
            if let Some(p) = hit.iter().position(|&h| !h) {
                return fail(alloc::format!("class {ci} misses point {p}"));
            }
        }
        if let Some(bi) = used.iter().position(|&u| !u) {
            return fail(alloc::format!("block {bi} belongs to no class"));
        }
        class_count = Some(classes.len());
    }
    block_sizes.sort_unstable();
    Ok(GddSummary {
        group_type: gdd.group_type(),
        block_count: gdd.blocks.len(),
        block_sizes,
        class_count,
    })
}

// ---------------------------------------------------------------------------
// GDD text format
// ---------------------------------------------------------------------------

/// Parses bundled GDD files.  `#` starts a comment; records run from
/// `gdd <name>` to `end` and contain `points <v>`, one `group ...` line
/// per group, one `block ...` line per block, and optionally one
/// `class <block-indices>` line per parallel class.  Every parsed record
/// is structurally verified before it is returned.
pub fn parse_gdd_file(file: &str, text: &str) -> Result<Vec<(String, Gdd)>, GddError> {
    let err = |line: usize, msg: String| GddError::Parse {
        file: file.to_string(),
        line,
        msg,
    };
    let parse_list = |line: usize, toks: &[&str]| -> Result<Vec<usize>, GddError> {
        toks.iter()
            .map(|t| {
                t.parse()
                    .map_err(|_| err(line, alloc::format!("bad number {t:?}")))
            })
            .collect()
    };
    let mut out = Vec::new();
    let mut current: Option<(String, usize, Option<usize>, Gdd)> = None; // (name, start, points, partial)
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match (toks[0], &mut current) {
            ("gdd", slot @ None) => {
                if toks.len() != 2 {
                    return Err(err(lineno, "expected: gdd <name>".into()));
                }
                *slot = Some((
                    toks[1].to_string(),
                    lineno,
                    None,
                    Gdd {
                        point_count: 0,
                        groups: Vec::new(),
                        blocks: Vec::new(),
                        resolution: None,
                    },
                ));
            }
            ("gdd", Some(_)) => return Err(err(lineno, "nested record: missing `end`".into())),
            (_, None) => {
                return Err(err(
                    lineno,
                    alloc::format!("{:?} outside a record", toks[0]),
                ))
            }
            ("points", Some((_, _, points, gdd))) => {
                if toks.len() != 2 {
                    return Err(err(lineno, "expected: points <v>".into()));
                }
                let v = parse_list(lineno, &toks[1..])?[0];
                if points.replace(v).is_some() {
                    return Err(err(lineno, "duplicate points line".into()));
                }
                gdd.point_count = v;
            }
            ("group", Some((_, _, _, gdd))) => {
                gdd.groups.push(parse_list(lineno, &toks[1..])?);
            }
            ("block", Some((_, _, _, gdd))) => {
                gdd.blocks.push(parse_list(lineno, &toks[1..])?);
            }
            ("class", Some((_, _, _, gdd))) => {
                gdd.resolution
                    .get_or_insert_with(Vec::new)
                    .push(parse_list(lineno, &toks[1..])?);
            }
            ("end", slot @ Some(_)) => {
                let (name, start, points, gdd) = slot.take().expect("matched Some");
                if points.is_none() {
                    return Err(err(
                        start,
                        alloc::format!("record {name} has no points line"),
                    ));
                }
                verify_gdd(&gdd).map_err(|e| {
                    err(
                        start,
                        alloc::format!("record {name} fails verification: {e}"),
                    )
                })?;
                out.push((name, gdd));
            }
            (other, Some(_)) => {
                return Err(err(lineno, alloc::format!("unknown keyword {other:?}")))
            }
        }
    }
    if let Some((name, start, _, _)) = current {
        return Err(err(start, alloc::format!("record {name} is never ended")));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Transversal designs
// ---------------------------------------------------------------------------

/// TD(k, q) for 2 <= k <= q+1: groups c*q..c*q+q for c < k, blocks
/// { (0,x), (1,y), (c, (c-1)x + y) for 2 <= c < k } over GF(q)^2.
/// For k <= q the design is resolvable and a resolution is attached.
pub fn transversal_gdd(k: usize, q: usize) -> Result<Gdd, GddError> {
    if k < 2 || k > q + 1 {
        return Err(GddError::KTooLarge { k, q });
    }
    let f = make_field(q)?;
    let groups: Vec<Vec<usize>> = (0..k).map(|c| (c * q..(c + 1) * q).collect()).collect();
    let mut blocks = Vec::with_capacity(q * q);
    for x in 0..q {
        for y in 0..q {
            let mut block = Vec::with_capacity(k);
            block.push(x);
            block.push(q + y);
            for c in 2..k {
                block.push(c * q + f.add(f.mul(c - 1, x), y));
            }
            blocks.push(block);
        }
    }
    // The square a = k-1 is unused by the block coordinates whenever
    // k <= q, so its level sets slice the blocks into parallel classes.
    let resolution = if k <= q {
        let a = k - 1;
        let mut classes = alloc::vec![Vec::new(); q];
        for (bi, _) in blocks.iter().enumerate() {
            let (x, y) = (bi / q, bi % q);
            classes[f.add(f.mul(a, x), y)].push(bi);
        }
        Some(classes)
    } else {
        None
    };
    Ok(Gdd {
        point_count: k * q,
        groups,
        blocks,
        resolution,
    })
}

/// The r-GDD of type 1^r with a single block through all r points.  Under
/// weighted inflation it models the elementary recipe "decompose the
/// complete multipartite graph on the weight parts, then fill each part":
/// the one block carries all cross pairs, the singleton groups the parts.
pub fn trivial_gdd(r: usize) -> Result<Gdd, GddError> {
    if r < 2 {
        return Err(GddError::Structure(
            "a trivial GDD needs at least 2 points".into(),
        ));
    }
    Ok(Gdd {
        point_count: r,
        groups: (0..r).map(|p| alloc::vec![p]).collect(),
        blocks: alloc::vec![(0..r).collect()],
        resolution: None,
    })
}

// ---------------------------------------------------------------------------
// Planes and their derivations
// ---------------------------------------------------------------------------

/// A finite plane given by its lines; affine planes also carry the
/// partition of lines into parallel classes (the class of vertical lines
/// x = c comes last).
pub struct Plane {
    pub point_count: usize,
    pub lines: Vec<Vec<usize>>,
    pub classes: Option<Vec<Vec<usize>>>,
}

/// AG(2, q): q^2 points (x, y) -> x*q + y, q^2+q lines of size q in q+1
/// parallel classes (slopes 0..q-1, then the vertical class).
pub fn affine_plane(q: usize) -> Result<Plane, GddError> {
    let f = make_field(q)?;
    let mut lines = Vec::with_capacity(q * q + q);
    let mut classes = Vec::with_capacity(q + 1);
    for m in 0..q {
        let mut class = Vec::with_capacity(q);
        for c in 0..q {
            class.push(lines.len());
            lines.push((0..q).map(|x| x * q + f.add(f.mul(m, x), c)).collect());
        }
        classes.push(class);
    }
    let mut vertical = Vec::with_capacity(q);
    for c in 0..q {
        vertical.push(lines.len());
        lines.push((c * q..(c + 1) * q).collect());
    }
    classes.push(vertical);
    Ok(Plane {
        point_count: q * q,
        lines,
        classes: Some(classes),
    })
}

/// PG(2, q): AG(2, q) plus one point at infinity per parallel class
/// (point q^2 + i for class i) and the line at infinity.
pub fn projective_plane(q: usize) -> Result<Plane, GddError> {
    let affine = affine_plane(q)?;
    let classes = affine
        .classes
        .as_ref()
        .expect("affine planes carry classes");
    let mut lines = Vec::with_capacity(q * q + q + 1);
    for (i, class) in classes.iter().enumerate() {
        for &li in class {
            let mut line = affine.lines[li].clone();
            line.push(q * q + i);
            lines.push(line);
        }
    }
    lines.push((q * q..q * q + q + 1).collect());
    Ok(Plane {
        point_count: q * q + q + 1,
        lines,
        classes: None,
    })
}

/// The three standard ways to derive a GDD from a plane of order q.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PlaneDerivation {
    /// Delete one parallel class of AG(2, q); its lines become the groups.
    /// Result: a resolvable q-GDD of type q^q.
    AffineDropClass,
    /// Delete one point of PG(2, q); the punctured lines through it become
    /// the groups.  Result: a (q+1)-GDD of type q^(q+1).
    ProjectiveDropPoint,
    /// Delete one point of AG(2, q); the punctured lines through it become
    /// the groups.  Result: a q-GDD of type (q-1)^(q+1).
    AffineDropPoint,
}

/// Applies a derivation.  The deleted class is always the vertical one and
/// the deleted point is always the highest-numbered, so the surviving
/// points keep contiguous labels 0..n-1 without relabelling.
pub fn plane_to_gdd(q: usize, mode: PlaneDerivation) -> Result<Gdd, GddError> {
    match mode {
        PlaneDerivation::AffineDropClass => {
            let plane = affine_plane(q)?;
            let classes = plane.classes.expect("affine planes carry classes");
            let (dropped, kept) = classes.split_last().expect("q+1 classes");
            let groups: Vec<Vec<usize>> =
                dropped.iter().map(|&li| plane.lines[li].clone()).collect();
            let mut blocks = Vec::new();
            let mut resolution = Vec::new();
            for class in kept {
                let mut out_class = Vec::new();
                for &li in class {
                    out_class.push(blocks.len());
                    blocks.push(plane.lines[li].clone());
                }
                resolution.push(out_class);
            }
            Ok(Gdd {
                point_count: q * q,
                groups,
                blocks,
                resolution: Some(resolution),
            })
        }
        PlaneDerivation::ProjectiveDropPoint => {
            let plane = projective_plane(q)?;
            let p = plane.point_count - 1;
            let mut groups = Vec::new();
            let mut blocks = Vec::new();
            for line in &plane.lines {
                if line.contains(&p) {
                    groups.push(line.iter().copied().filter(|&x| x != p).collect());
                } else {
                    blocks.push(line.clone());
                }
            }
            Ok(Gdd {
                point_count: p,
                groups,
                blocks,
                resolution: None,
            })
        }
        PlaneDerivation::AffineDropPoint => {
            let plane = affine_plane(q)?;
            let p = plane.point_count - 1;
            let mut groups = Vec::new();
            let mut blocks = Vec::new();
            for line in &plane.lines {
                if line.contains(&p) {
                    groups.push(line.iter().copied().filter(|&x| x != p).collect());
                } else {
                    blocks.push(line.clone());
                }
            }
            Ok(Gdd {
                point_count: p,
                groups,
                blocks,
                resolution: None,
            })
        }
    }
}

// ---------------------------------------------------------------------------
// Truncation
// ---------------------------------------------------------------------------

/// Keeps only the first `keep` points of the last group, deleting the rest
/// from every block; points are relabelled downwards to stay contiguous.
/// A TD(k, q) becomes a GDD of type q^(k-1) keep^1 with block sizes
/// {k-1, k}; a resolution survives as a resolution of the truncation.
pub fn truncate_last_group(gdd: &Gdd, keep: usize) -> Result<Gdd, GddError> {
    let last = gdd
        .groups
        .last()
        .ok_or_else(|| GddError::Structure("no groups to truncate".into()))?;
    if keep > last.len() {
        return Err(GddError::BadTruncation {
            keep,
            have: last.len(),
        });
    }
    let doomed: alloc::collections::BTreeSet<usize> = last.iter().copied().skip(keep).collect();
    let mut relabel = alloc::vec![usize::MAX; gdd.point_count];
    let mut next = 0;
    for (p, slot) in relabel.iter_mut().enumerate() {
        if !doomed.contains(&p) {
            *slot = next;
            next += 1;
        }
    }
    let map_set = |set: &Vec<usize>| -> Vec<usize> {
        set.iter()
            .filter(|p| !doomed.contains(p))
            .map(|&p| relabel[p])
            .collect()
    };
    let mut groups: Vec<Vec<usize>> = gdd.groups.iter().map(map_set).collect();
    groups.retain(|g| !g.is_empty());
    let blocks: Vec<Vec<usize>> = gdd.blocks.iter().map(map_set).collect();
    if blocks.iter().any(|b| b.len() < 2) {
        return Err(GddError::Structure(
            "truncation left a block with < 2 points".into(),
        ));
    }
    Ok(Gdd {
        point_count: next,
        groups,
        blocks,
        resolution: gdd.resolution.clone(),
    })
}

// ---------------------------------------------------------------------------
// Searching for small GDDs
// ---------------------------------------------------------------------------

fn shuffle<T>(items: &mut [T], rng: &mut ChaCha8Rng) {
    for i in (1..items.len()).rev() {
        let j = (rng.next_u64() % (i as u64 + 1)) as usize;
        items.swap(i, j);
    }
}

/// Difference-method search for a uniform k-GDD of type g^t over Z_v,
/// v = g*t, with groups the cosets {i, i+t, i+2t, ...}.  Base blocks are
/// developed by +1 mod v; each base block must therefore use each
/// admissible difference class exactly once across the family.  Only
/// applicable when v is odd or the half-difference v/2 falls inside the
/// groups (t divides v/2); otherwise full-orbit development double-covers
/// the v/2 differences.
fn find_by_differences(
    k: usize,
    g: usize,
    t: usize,
    seed: u64,
    budget: &mut u64,
) -> Option<Vec<Vec<usize>>> {
    let v = g * t;
    if v.is_multiple_of(2) && !(v / 2).is_multiple_of(t) {
        return None;
    }
    // Difference classes {d, v-d} to cover: those with d not a multiple
    // of t (multiples of t are within-group differences).
    let class_of = |d: usize| d.min(v - d);
    let needed: Vec<usize> = (1..=v / 2).filter(|&d| d % t != 0).map(class_of).collect();
    let per_block = k * (k - 1) / 2;
    if !needed.len().is_multiple_of(per_block) {
        return None;
    }
    let block_count = needed.len() / per_block;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (1..v).collect();
    shuffle(&mut order, &mut rng);

    struct Search {
        v: usize,
        t: usize,
        k: usize,
        order: Vec<usize>,
    }
    impl Search {
        fn fits(&self, block: &[usize], x: usize, used: &[bool]) -> Option<Vec<usize>> {
            let mut fresh = Vec::with_capacity(block.len());
            for &b in block {
                let d = x.abs_diff(b);
                let c = d.min(self.v - d);
                if c % self.t == 0 || used[c] || fresh.contains(&c) {
                    return None;
                }
                fresh.push(c);
            }
            Some(fresh)
        }
        fn grow(
            &self,
            blocks: &mut Vec<Vec<usize>>,
            used: &mut [bool],
            remaining: usize,
            budget: &mut u64,
        ) -> bool {
            if *budget == 0 {
                return false;
            }
            *budget -= 1;
            if remaining == 0 {
                return true;
            }
            let cur = blocks.last().unwrap().clone();
            if cur.len() == self.k {
                blocks.push(alloc::vec![0]);
                if self.grow(blocks, used, remaining, budget) {
                    return true;
                }
                blocks.pop();
                return false;
            }
            let slots = self.k - cur.len();
            for &x in &self.order {
                if cur.contains(&x) {
                    continue;
                }
                // Keep elements ascending after the leading 0 to avoid
                // revisiting permutations of the same block.
                if cur.len() > 1 && x <= *cur.last().unwrap() {
                    continue;
                }
                if let Some(fresh) = self.fits(&cur, x, used) {
                    for &c in &fresh {
                        used[c] = true;
                    }
                    blocks.last_mut().unwrap().push(x);
                    if self.grow(blocks, used, remaining - fresh.len(), budget) {
                        return true;
                    }
                    blocks.last_mut().unwrap().pop();
                    for &c in &fresh {
                        used[c] = false;
                    }
                }
                let _ = slots;
            }
            false
        }
    }

    let search = Search { v, t, k, order };
    let mut used = alloc::vec![false; v / 2 + 1];
    let mut bases = alloc::vec![alloc::vec![0usize]];
    if search.grow(&mut bases, &mut used, needed.len(), budget) && bases.len() == block_count {
        let mut blocks = Vec::with_capacity(v * block_count);
        for base in &bases {
            for shift in 0..v {
                blocks.push(base.iter().map(|&x| (x + shift) % v).collect());
            }
        }
        return Some(blocks);
    }
    None
}

/// Exact-cover backtracking on an arbitrary group type: branch on the
/// lexicographically smallest uncovered cross pair and try every block
/// through it whose pairs are all uncovered.  The candidate extension
/// order is shuffled once from the seed; the budget counts search nodes,
/// so runs are reproducible regardless of machine speed.
#[allow(clippy::type_complexity)] // the pair is (groups, blocks)
fn find_by_backtracking(
    k: usize,
    sizes: &[usize],
    seed: u64,
    budget: &mut u64,
) -> Option<(Vec<Vec<usize>>, Vec<Vec<usize>>)> {
    let v: usize = sizes.iter().sum();
    let mut groups = Vec::new();
    let mut next = 0;
    for &s in sizes {
        groups.push((next..next + s).collect::<Vec<_>>());
        next += s;
    }
    let owner: Vec<usize> = {
        let mut o = alloc::vec![0; v];
        for (gi, g) in groups.iter().enumerate() {
            for &p in g {
                o[p] = gi;
            }
        }
        o
    };
    let tri = |u: usize, w: usize| u * v - u * (u + 1) / 2 + (w - u - 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..v).collect();
    shuffle(&mut order, &mut rng);

    let mut covered = alloc::vec![false; v * v.saturating_sub(1) / 2];
    let mut blocks: Vec<Vec<usize>> = Vec::new();

    #[allow(clippy::too_many_arguments)]
    fn extend(
        block: &mut Vec<usize>,
        k: usize,
        v: usize,
        owner: &[usize],
        covered: &mut [bool],
        order: &[usize],
        tri: &dyn Fn(usize, usize) -> usize,
        blocks: &mut Vec<Vec<usize>>,
        budget: &mut u64,
    ) -> bool {
        if *budget == 0 {
            return false;
        }
        *budget -= 1;
        if block.len() == k {
            // Block complete; continue the outer cover search.
            blocks.push(block.clone());
            if cover(k, v, owner, covered, order, tri, blocks, budget) {
                return true;
            }
            blocks.pop();
            return false;
        }
        let floor = *block.last().unwrap();
        for &x in order {
            // Points after the anchor pair are taken in increasing label
            // order to break block symmetry.
            if x <= floor {
                continue;
            }
            if block.iter().any(|&b| owner[b] == owner[x]) {
                continue;
            }
            let pairs: Vec<usize> = block.iter().map(|&b| tri(b.min(x), b.max(x))).collect();
            if pairs.iter().any(|&i| covered[i]) {
                continue;
            }
            for &i in &pairs {
                covered[i] = true;
            }
            block.push(x);
            if extend(block, k, v, owner, covered, order, tri, blocks, budget) {
                return true;
            }
            block.pop();
            for &i in &pairs {
                covered[i] = false;
            }
        }
        false
    }

    #[allow(clippy::too_many_arguments)]
    fn cover(
        k: usize,
        v: usize,
        owner: &[usize],
        covered: &mut [bool],
        order: &[usize],
        tri: &dyn Fn(usize, usize) -> usize,
        blocks: &mut Vec<Vec<usize>>,
        budget: &mut u64,
    ) -> bool {
        // Find the smallest uncovered cross pair.
        let mut anchor = None;
        'scan: for u in 0..v {
            for w in u + 1..v {
                if owner[u] != owner[w] && !covered[tri(u, w)] {
                    anchor = Some((u, w));
                    break 'scan;
                }
            }
        }
        let (u, w) = match anchor {
            None => return true,
            Some(p) => p,
        };
        covered[tri(u, w)] = true;
        let mut block = alloc::vec![u, w];
        // Remaining points are chosen above w; the anchor pair is the
        // least pair of its block, so u < w < rest loses no solutions.
        if extend(&mut block, k, v, owner, covered, order, tri, blocks, budget) {
            return true;
        }
        covered[tri(u, w)] = false;
        false
    }

    if cover(
        k,
        v,
        &owner,
        &mut covered,
        &order,
        &tri,
        &mut blocks,
        budget,
    ) {
        // Symmetry breaking keeps each block sorted except possibly the
        // anchor pair, which is sorted too; normalize anyway.
        for b in &mut blocks {
            b.sort_unstable();
        }
        Some((groups, blocks))
    } else {
        None
    }
}

/// Finds a k-GDD of the given type: bundled designs first, then the
/// difference method over Z_v for uniform types, then general
/// backtracking.  The result is always re-verified before it is returned.
/// The budget counts search nodes (not wall time), so a given seed and
/// budget always produce the same outcome.
pub fn find_gdd(
    k: usize,
    gtype: &GroupType,
    bundled: &[Gdd],
    seed: u64,
    budget: u64,
) -> Result<Gdd, GddError> {
    let v = gtype.point_count();
    let sizes = gtype.sizes();
    // Necessary counting conditions for uniform block size k.
    for &g in &sizes {
        if !(v - g).is_multiple_of(k - 1) {
            return Err(GddError::Counting(alloc::format!(
                "a point in a group of size {g} would lie in ({v} - {g})/({k} - 1) blocks"
            )));
        }
    }
    let cross_pairs = (v * v - sizes.iter().map(|&s| s * s).sum::<usize>()) / 2;
    if !cross_pairs.is_multiple_of(k * (k - 1) / 2) {
        return Err(GddError::Counting(alloc::format!(
            "{cross_pairs} cross pairs are not a multiple of C({k},2)"
        )));
    }

    for cand in bundled {
        if cand.group_type() == *gtype && cand.blocks.iter().all(|b| b.len() == k) {
            let gdd = cand.clone();
            verify_gdd(&gdd)?;
            return Ok(gdd);
        }
    }
    // A bundled resolvable design with block size k and trivial groups
    // donates one parallel class as groups: e.g. a resolvable (28,4,1)
    // design yields a 4-GDD of type 4^7.
    for cand in bundled {
        let fits = cand.point_count == v
            && cand.groups.iter().all(|g| g.len() == 1)
            && cand.blocks.iter().all(|b| b.len() == k)
            && cand.resolution.is_some();
        if fits {
            if let Ok(gdd) = last_class_to_groups(cand) {
                if gdd.group_type() == *gtype {
                    return Ok(gdd);
                }
            }
        }
    }

    let mut remaining = budget;
    if sizes.windows(2).all(|w| w[0] == w[1]) {
        let (g, t) = (sizes[0], sizes.len());
        if let Some(blocks) = find_by_differences(k, g, t, seed, &mut remaining) {
            let groups: Vec<Vec<usize>> = (0..t)
                .map(|i| (0..g).map(|j| i + j * t).collect())
                .collect();
            let gdd = Gdd {
                point_count: v,
                groups,
                blocks,
                resolution: None,
            };
            verify_gdd(&gdd)?;
            return Ok(gdd);
        }
    }
    if let Some((groups, blocks)) = find_by_backtracking(k, &sizes, seed, &mut remaining) {
        let gdd = Gdd {
            point_count: v,
            groups,
            blocks,
            resolution: None,
        };
        verify_gdd(&gdd)?;
        return Ok(gdd);
    }
    if remaining == 0 {
        Err(GddError::BudgetExhausted { nodes: budget })
    } else {
        Err(GddError::NoIngredient(alloc::format!(
            "{k}-GDD of type {gtype}"
        )))
    }
}

/// Converts a verified resolvable design with singleton groups (a
/// resolvable BIBD wearing GDD clothes) into the GDD whose groups are
/// the blocks of the last parallel class; the other classes survive as
/// the resolution.  The result is re-verified before it is returned.
fn last_class_to_groups(cand: &Gdd) -> Result<Gdd, GddError> {
    verify_gdd(cand)?;
    if !cand.groups.iter().all(|g| g.len() == 1) {
        return Err(GddError::Structure(
            "class-to-groups derivation needs trivial groups".into(),
        ));
    }
    let classes = cand.resolution.as_ref().ok_or_else(|| {
        GddError::Structure("class-to-groups derivation needs a resolution".into())
    })?;
    let (dropped, kept) = classes
        .split_last()
        .ok_or_else(|| GddError::Structure("no parallel class to convert".into()))?;
    let groups: Vec<Vec<usize>> = dropped.iter().map(|&bi| cand.blocks[bi].clone()).collect();
    let drop_set: alloc::collections::BTreeSet<usize> = dropped.iter().copied().collect();
    // Reindex the surviving blocks and remap the resolution.
    let mut new_index = alloc::vec![usize::MAX; cand.blocks.len()];
    let mut blocks = Vec::new();
    for (bi, block) in cand.blocks.iter().enumerate() {
        if !drop_set.contains(&bi) {
            new_index[bi] = blocks.len();
            blocks.push(block.clone());
        }
    }
    let resolution: Vec<Vec<usize>> = kept
        .iter()
        .map(|class| class.iter().map(|&bi| new_index[bi]).collect())
        .collect();
    let gdd = Gdd {
        point_count: cand.point_count,
        groups,
        blocks,
        resolution: Some(resolution),
    };
    verify_gdd(&gdd)?;
    Ok(gdd)
}

/// The resolvable 4-GDD of type 4^(3t+1) with 4t parallel classes that
/// drives the main recursive construction.  For t = 1 this is a derived
/// affine plane of order 4; for larger t it is cut from a bundled
/// resolvable (12t+4, 4, 1) design by removing one parallel class — the
/// removed class's blocks become the groups.
pub fn rgdd_for_main_step(t: usize, bundled: &[Gdd]) -> Result<Gdd, GddError> {
    if t == 0 {
        return Err(GddError::NoIngredient(
            "resolvable 4-GDD of type 4^1".into(),
        ));
    }
    if t == 1 {
        let gdd = plane_to_gdd(4, PlaneDerivation::AffineDropClass)?;
        verify_gdd(&gdd)?;
        return Ok(gdd);
    }
    let v = 12 * t + 4;
    for cand in bundled {
        let looks_right = cand.point_count == v
            && cand.groups.iter().all(|g| g.len() == 1)
            && cand.blocks.iter().all(|b| b.len() == 4)
            && cand
                .resolution
                .as_ref()
                .is_some_and(|r| r.len() == 4 * t + 1);
        if !looks_right {
            continue;
        }
        let gdd = last_class_to_groups(cand)?;
        if gdd.group_type() != GroupType::parse(&alloc::format!("4^{}", 3 * t + 1))? {
            return Err(GddError::Structure(
                "derived groups have the wrong type".into(),
            ));
        }
        return Ok(gdd);
    }
    Err(GddError::NoIngredient(alloc::format!(
        "resolvable (12t+4, 4, 1) design for t = {t}"
    )))
}
