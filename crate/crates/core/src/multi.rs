//! Recursive multi-level index.
//!
//! Depth 1 is a [`BasicIndex`]. Depth `r > 1` splits the array into blocks,
//! indexes block minima as in the two-level scheme, and gives every block
//! its own index of depth `r - 1`. Queries descend at most `r` levels.

use crate::far::BasicIndex;
use crate::fs::FsInstance;
use crate::two_level::{choose_block_size, GlobalLevel};
use crate::{check_position, Error, FindSmaller, Probe, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MultiIndex {
    Leaf(BasicIndex),
    Level(Box<MultiLevel>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiLevel {
    pub(crate) depth: usize,
    pub(crate) inst: FsInstance,
    pub(crate) global: GlobalLevel,
    pub(crate) children: Vec<MultiIndex>,
}

impl MultiIndex {
    /// Builds with `k = choose_block_size(len)` at every level.
    pub fn build(inst: FsInstance, depth: usize) -> Result<Self> {
        Self::build_with(inst, depth, &choose_block_size)
    }

    /// Builds with a caller-supplied block size for each level's length.
    /// `block_size` must return a power of two of at least 2.
    pub fn build_with(
        inst: FsInstance,
        depth: usize,
        block_size: &dyn Fn(usize) -> usize,
    ) -> Result<Self> {
        if depth < 1 {
            return Err(Error::BadDepth);
        }
        inst.require_step_bound_one()?;
        let k = block_size(inst.len());
        if depth == 1 || inst.len() < 4 * k {
            return Ok(Self::Leaf(BasicIndex::build(inst)?));
        }
        let global = GlobalLevel::build(&inst, k)?;
        let children = inst
            .values()
            .chunks(k)
            .map(|b| Self::build_with(FsInstance::new(b.to_vec())?, depth - 1, block_size))
            .collect::<Result<_>>()?;
        Ok(Self::Level(Box::new(MultiLevel {
            depth,
            inst,
            global,
            children,
        })))
    }

    pub fn instance(&self) -> &FsInstance {
        match self {
            Self::Leaf(b) => b.instance(),
            Self::Level(l) => &l.inst,
        }
    }

    /// Number of levels actually built below and including this one.
    pub fn height(&self) -> usize {
        match self {
            Self::Leaf(_) => 1,
            Self::Level(l) => 1 + l.children.iter().map(Self::height).max().unwrap_or(0),
        }
    }

    /// Block sizes along the first-block path, top level first.
    pub fn block_sizes(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut cur = self;
        while let Self::Level(l) = cur {
            out.push(l.global.decomp.k);
            cur = &l.children[0];
        }
        out
    }

    pub fn query_probed(&self, i: usize, x: i64, probe: &mut Probe) -> Result<Option<usize>> {
        check_position(i, self.instance().len())?;
        Ok(self.query_unchecked(i, x, probe))
    }

    fn query_unchecked(&self, i: usize, x: i64, probe: &mut Probe) -> Option<usize> {
        match self {
            Self::Leaf(b) => b.query_probed(i, x, probe).expect("position in range"),
            Self::Level(l) => l.global.query_blocks(&l.inst, i, x, probe, |t, s, x, p| {
                l.children[t - 1].query_unchecked(s, x, p)
            }),
        }
    }

    /// `(FAR cells, Near cells, auxiliary cells)` over all levels.
    pub(crate) fn entry_counts(&self) -> (usize, usize, usize) {
        match self {
            Self::Leaf(b) => (b.total_entries(), 0, 0),
            Self::Level(l) => {
                let g = &l.global;
                let blocks = g.decomp.block_count();
                let mut acc = (
                    g.quotient_far.total_entries(),
                    g.near.entry_count(),
                    2 * blocks + g.decomp.n,
                );
                for c in &l.children {
                    let (f, n, a) = c.entry_counts();
                    acc.0 += f;
                    acc.1 += n;
                    acc.2 += a;
                }
                acc
            }
        }
    }
}

impl FindSmaller for MultiIndex {
    fn len(&self) -> usize {
        self.instance().len()
    }

    fn value(&self, i: usize) -> i64 {
        self.instance().get(i)
    }

    fn find_smaller_probed(&self, i: usize, x: i64, probe: &mut Probe) -> Result<Option<usize>> {
        self.query_probed(i, x, probe)
    }
}

/// `r`-fold iterated base-2 logarithm of `n`; once a value drops below 2
/// the result is clamped to 1.
pub fn iter_log(n: f64, r: u32) -> f64 {
    assert!(n >= 2.0 && r >= 1);
    let mut v = n;
    for _ in 0..r {
        if v < 2.0 {
            return 1.0;
        }
        v = v.log2();
    }
    v
}
