//! Versioned binary index files.
//!
//! Layout, all integers little-endian `u64`:
//!
//! ```text
//! "LAFS" version strategy depth [k per level] n node_count
//! tree:   (only when node_count > 0) root [parent] [tour] [levels] [last_occurrence]
//! index:  strategy-specific tables
//! ```
//!
//! `[..]` is a sequence: its length followed by its elements. Absent
//! positions are written as `u64::MAX`; signed values are stored as their
//! two's complement bit pattern.

use thiserror::Error;

use crate::block_table::PatternTable;
use crate::far::{capacity_of, decode, encode, BasicIndex};
use crate::fs::FsInstance;
use crate::multi::{MultiIndex, MultiLevel};
use crate::strategy::{FsIndex, Strategy};
use crate::tree::{EulerTour, RootedTree, TreeError};
use crate::two_level::{BlockDecomposition, GlobalLevel, Locals, NearTable, TwoLevelIndex};

pub const MAGIC: &[u8; 4] = b"LAFS";
pub const FORMAT_VERSION: u64 = 1;

const ABSENT: u64 = u64::MAX;

#[derive(Debug, Error)]
pub enum ArtifactError {
    #[error("not an index file (bad magic bytes)")]
    BadMagic,
    #[error("unsupported format version {0}, expected {FORMAT_VERSION}")]
    UnsupportedVersion(u64),
    #[error("unknown strategy tag {0}")]
    UnknownStrategy(u64),
    #[error("file ends early")]
    Truncated,
    #[error("corrupt index: {0}")]
    Corrupt(String),
    #[error("invalid tree: {0}")]
    Tree(#[from] TreeError),
    #[error("invalid index: {0}")]
    Index(#[from] crate::Error),
}

type Result<T> = std::result::Result<T, ArtifactError>;

fn corrupt(msg: impl Into<String>) -> ArtifactError {
    ArtifactError::Corrupt(msg.into())
}

/// The tree an index was built from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreePart {
    pub tree: RootedTree,
    pub tour: EulerTour,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexArtifact {
    pub tree: Option<TreePart>,
    pub index: FsIndex,
}

impl IndexArtifact {
    /// Euler tour and index over its level array.
    pub fn from_tree(tree: RootedTree, strategy: Strategy, depth: usize) -> crate::Result<Self> {
        let tour = EulerTour::build(&tree);
        let inst = FsInstance::new(tour.levels().to_vec())?;
        let index = FsIndex::build(strategy, inst, depth)?;
        Ok(Self {
            tree: Some(TreePart { tree, tour }),
            index,
        })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::default();
        w.buf.extend_from_slice(MAGIC);
        w.u64(FORMAT_VERSION);
        w.u64(self.index.strategy().tag());
        w.u64(self.index.depth() as u64);
        w.seq(self.index.block_sizes().iter().map(|&k| k as u64));
        w.u64(self.index.instance().len() as u64);
        match &self.tree {
            None => w.u64(0),
            Some(TreePart { tree, tour }) => {
                w.u64(tree.node_count() as u64);
                w.u64(tree.root() as u64);
                w.seq(
                    tree.parents()
                        .iter()
                        .map(|p| p.map_or(ABSENT, |p| p as u64)),
                );
                w.seq(tour.tour().iter().map(|&v| v as u64));
                w.seq(tour.levels().iter().map(|&l| l as u64));
                w.seq((0..tree.node_count()).map(|v| tour.last_occurrence(v) as u64));
            }
        }
        match &self.index {
            FsIndex::Basic(b) => w.basic(b),
            FsIndex::TwoLevel(t) => w.two_level(t),
            FsIndex::Multi { index, .. } => w.multi(index),
        }
        w.buf
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, pos: 0 };
        if bytes.len() < 4 || &bytes[..4] != MAGIC {
            return Err(ArtifactError::BadMagic);
        }
        r.pos = 4;
        let version = r.u64()?;
        if version != FORMAT_VERSION {
            return Err(ArtifactError::UnsupportedVersion(version));
        }
        let tag = r.u64()?;
        let strategy = Strategy::from_tag(tag).ok_or(ArtifactError::UnknownStrategy(tag))?;
        let depth = r.usize()?;
        let block_sizes: Vec<usize> = r.seq_usize()?;
        let n = r.usize()?;
        let node_count = r.usize()?;

        let tree = if node_count == 0 {
            None
        } else {
            let root = r.usize()?;
            let parent = r
                .seq()?
                .into_iter()
                .map(|p| (p != ABSENT).then_some(p as usize))
                .collect::<Vec<_>>();
            if parent.len() != node_count {
                return Err(corrupt("parent array length differs from node count"));
            }
            let tree = RootedTree::from_parents(root, parent)?;
            let tour = EulerTour::build(&tree);
            let stored_tour = r.seq_usize()?;
            let stored_levels: Vec<i64> = r.seq()?.into_iter().map(|v| v as i64).collect();
            let stored_last = r.seq_usize()?;
            let last: Vec<usize> = (0..node_count).map(|v| tour.last_occurrence(v)).collect();
            if stored_tour != tour.tour() || stored_levels != tour.levels() || stored_last != last {
                return Err(corrupt("Euler tour does not match the tree"));
            }
            Some(TreePart { tree, tour })
        };

        let index = match strategy {
            Strategy::Basic => FsIndex::Basic(r.basic()?),
            Strategy::Two | Strategy::Table => FsIndex::TwoLevel(r.two_level()?),
            Strategy::Multi => FsIndex::Multi {
                depth,
                index: r.multi()?,
            },
        };
        if r.pos != bytes.len() {
            return Err(corrupt("trailing bytes"));
        }
        if index.strategy() != strategy {
            return Err(corrupt("header strategy disagrees with payload"));
        }
        if index.instance().len() != n || index.block_sizes() != block_sizes {
            return Err(corrupt("header sizes disagree with payload"));
        }
        if let Some(part) = &tree {
            if part.tour.levels() != index.instance().values() {
                return Err(corrupt("index is not over the tree's level array"));
            }
        }
        Ok(Self { tree, index })
    }
}

#[derive(Default)]
struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    fn u64(&mut self, v: u64) {
        self.buf.extend_from_slice(&v.to_le_bytes());
    }

    fn seq(&mut self, items: impl ExactSizeIterator<Item = u64>) {
        self.u64(items.len() as u64);
        for v in items {
            self.u64(v);
        }
    }

    fn values(&mut self, values: &[i64]) {
        self.seq(values.iter().map(|&v| v as u64));
    }

    fn cells(&mut self, cells: &[usize]) {
        self.seq(
            cells
                .iter()
                .map(|&c| decode(c).map_or(ABSENT, |c| c as u64)),
        );
    }

    fn basic(&mut self, b: &BasicIndex) {
        self.values(b.inst.values());
        self.seq(b.offsets.iter().map(|&o| o as u64));
        self.cells(&b.cells);
    }

    fn global(&mut self, g: &GlobalLevel) {
        self.u64(g.decomp.k as u64);
        self.values(&g.decomp.minima);
        self.values(&g.decomp.suffix_min);
        self.basic(&g.quotient_far);
        self.cells(&g.near.cells);
    }

    fn two_level(&mut self, t: &TwoLevelIndex) {
        self.values(t.inst.values());
        self.global(&t.global);
        match &t.locals {
            Locals::Basic(blocks) => {
                self.u64(0);
                self.u64(blocks.len() as u64);
                for b in blocks {
                    self.basic(b);
                }
            }
            Locals::Table { table, codes } => {
                self.u64(1);
                self.u64(table.k as u64);
                self.seq(table.answers.iter().map(|&a| a as u64));
                self.seq(codes.iter().map(|&c| c as u64));
            }
        }
    }

    fn multi(&mut self, m: &MultiIndex) {
        match m {
            MultiIndex::Leaf(b) => {
                self.u64(0);
                self.basic(b);
            }
            MultiIndex::Level(l) => {
                self.u64(1);
                self.u64(l.depth as u64);
                self.values(l.inst.values());
                self.global(&l.global);
                self.u64(l.children.len() as u64);
                for c in &l.children {
                    self.multi(c);
                }
            }
        }
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn u64(&mut self) -> Result<u64> {
        let end = self.pos.checked_add(8).ok_or(ArtifactError::Truncated)?;
        let chunk = self
            .bytes
            .get(self.pos..end)
            .ok_or(ArtifactError::Truncated)?;
        self.pos = end;
        Ok(u64::from_le_bytes(chunk.try_into().expect("eight bytes")))
    }

    fn usize(&mut self) -> Result<usize> {
        usize::try_from(self.u64()?).map_err(|_| corrupt("count exceeds address space"))
    }

    fn seq(&mut self) -> Result<Vec<u64>> {
        let len = self.usize()?;
        if len > (self.bytes.len() - self.pos) / 8 {
            return Err(ArtifactError::Truncated);
        }
        (0..len).map(|_| self.u64()).collect()
    }

    fn seq_usize(&mut self) -> Result<Vec<usize>> {
        self.seq()?
            .into_iter()
            .map(|v| usize::try_from(v).map_err(|_| corrupt("value exceeds address space")))
            .collect()
    }

    fn values(&mut self) -> Result<FsInstance> {
        let values = self.seq()?.into_iter().map(|v| v as i64).collect();
        Ok(FsInstance::new(values)?)
    }

    /// Cells must be absent or a position in `1..=limit`.
    fn cells(&mut self, limit: usize) -> Result<Vec<usize>> {
        self.seq()?
            .into_iter()
            .map(|c| {
                if c == ABSENT {
                    Ok(encode(None))
                } else if c >= 1 && c <= limit as u64 {
                    Ok(c as usize)
                } else {
                    Err(corrupt(format!("position {c} outside 1..={limit}")))
                }
            })
            .collect()
    }

    fn basic(&mut self) -> Result<BasicIndex> {
        let inst = self.values()?;
        inst.require_step_bound_one()?;
        let n = inst.len();
        let offsets = self.seq_usize()?;
        let cells = self.cells(n)?;
        if offsets.len() != n + 1 || offsets[0] != 0 || offsets[n] != cells.len() {
            return Err(corrupt("FAR offsets do not frame the cells"));
        }
        for i in 1..=n {
            if offsets[i].checked_sub(offsets[i - 1]) != Some(capacity_of(&inst, i)) {
                return Err(corrupt(format!("FAR row {i} has the wrong capacity")));
            }
            if cells[offsets[i - 1]..offsets[i]]
                .iter()
                .any(|&c| decode(c).is_some_and(|h| h <= i))
            {
                return Err(corrupt(format!("FAR row {i} points backwards")));
            }
        }
        Ok(BasicIndex {
            inst,
            offsets,
            cells,
        })
    }

    fn global(&mut self, inst: &FsInstance) -> Result<GlobalLevel> {
        let k = self.usize()?;
        let decomp = BlockDecomposition::new(inst, k)?;
        let minima: Vec<i64> = self.seq()?.into_iter().map(|v| v as i64).collect();
        let suffix_min: Vec<i64> = self.seq()?.into_iter().map(|v| v as i64).collect();
        if minima != decomp.minima || suffix_min != decomp.suffix_min {
            return Err(corrupt("block minima do not match the array"));
        }
        let quotient_far = self.basic()?;
        if quotient_far.inst.values() != decomp.quotients() {
            return Err(corrupt("quotient index is not over the block minima"));
        }
        let blocks = decomp.block_count();
        let near = self.cells(blocks)?;
        if near.len() != blocks * k {
            return Err(corrupt("Near table has the wrong size"));
        }
        Ok(GlobalLevel {
            decomp,
            quotient_far,
            near: NearTable { k, cells: near },
        })
    }

    fn two_level(&mut self) -> Result<TwoLevelIndex> {
        let inst = self.values()?;
        let global = self.global(&inst)?;
        let k = global.decomp.k;
        let blocks = global.decomp.block_count();
        let locals = match self.u64()? {
            0 => {
                let count = self.usize()?;
                if count != blocks {
                    return Err(corrupt("local index count differs from block count"));
                }
                let mut out = Vec::with_capacity(count);
                for t in 1..=count {
                    let b = self.basic()?;
                    let start = global.decomp.block_start(t) - 1;
                    if b.inst.values() != &inst.values()[start..start + global.decomp.block_len(t)]
                    {
                        return Err(corrupt(format!("local index {t} is not over its block")));
                    }
                    out.push(b);
                }
                Locals::Basic(out)
            }
            1 => {
                let table_k = self.usize()?;
                if table_k != k {
                    return Err(corrupt("pattern table block size differs"));
                }
                let table = PatternTable::build(k)?;
                let answers = self.seq()?;
                if answers.len() != table.answers.len()
                    || answers
                        .iter()
                        .zip(&table.answers)
                        .any(|(&a, &b)| a != b as u64)
                {
                    return Err(corrupt("pattern table differs from its definition"));
                }
                let codes = self.seq()?;
                if codes.len() != blocks || codes.iter().any(|&c| c >= 1 << (k - 1)) {
                    return Err(corrupt("pattern codes are malformed"));
                }
                Locals::Table {
                    table,
                    codes: codes.into_iter().map(|c| c as u32).collect(),
                }
            }
            tag => return Err(corrupt(format!("unknown local kind {tag}"))),
        };
        Ok(TwoLevelIndex {
            inst,
            global,
            locals,
        })
    }

    fn multi(&mut self) -> Result<MultiIndex> {
        match self.u64()? {
            0 => Ok(MultiIndex::Leaf(self.basic()?)),
            1 => {
                let depth = self.usize()?;
                if depth < 2 {
                    return Err(corrupt("multi-level node with depth below 2"));
                }
                let inst = self.values()?;
                let global = self.global(&inst)?;
                let count = self.usize()?;
                if count != global.decomp.block_count() {
                    return Err(corrupt("child count differs from block count"));
                }
                let mut children = Vec::with_capacity(count);
                for t in 1..=count {
                    let child = self.multi()?;
                    let start = global.decomp.block_start(t) - 1;
                    if child.instance().values()
                        != &inst.values()[start..start + global.decomp.block_len(t)]
                    {
                        return Err(corrupt(format!("child {t} is not over its block")));
                    }
                    children.push(child);
                }
                Ok(MultiIndex::Level(Box::new(MultiLevel {
                    depth,
                    inst,
                    global,
                    children,
                })))
            }
            tag => Err(corrupt(format!("unknown multi-level node tag {tag}"))),
        }
    }
}
