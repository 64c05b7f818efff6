//! Two-level find-smaller index.
//!
//! The array is cut into blocks of `k` entries. Block minima `M` form a
//! coarse array whose adjacent entries differ by at most `k`, and the
//! quotients `B[t] = floor(M[t] / k)` differ by at most one, so a
//! [`BasicIndex`] over `B` finds the first block whose minimum is within
//! `k - 1` above the threshold. A Near table over `M` then finishes the
//! jump exactly, and a local solver locates the answer inside the block.

use crate::block_table::{encode_pattern, PatternTable};
use crate::far::{decode, BasicIndex, NONE};
use crate::fs::{nearest_smallers, FsInstance};
use crate::{check_position, Error, FindSmaller, Probe, Result};

/// Largest power of two not above `max(2, log2(n) / 4)`.
pub fn choose_block_size(n: usize) -> usize {
    assert!(n >= 1);
    block_size_for_log2(n.ilog2())
}

/// [`choose_block_size`] in terms of `floor(log2 n)`, usable for `n`
/// beyond `usize`.
pub fn block_size_for_log2(floor_log2_n: u32) -> usize {
    // 2^(m+2) <= log2(n) holds iff it holds for floor(log2(n))
    if floor_log2_n < 8 {
        2
    } else {
        1 << (floor_log2_n.ilog2() - 2)
    }
}

/// A global answer plus the `(t, q)` quotient jump, if one was taken.
pub type TracedAnswer = (Option<usize>, Option<(usize, usize)>);

/// Blocks of `k` consecutive positions; the last block may be short.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockDecomposition {
    pub(crate) k: usize,
    pub(crate) n: usize,
    pub(crate) minima: Vec<i64>,
    pub(crate) suffix_min: Vec<i64>,
}

impl BlockDecomposition {
    pub fn new(inst: &FsInstance, k: usize) -> Result<Self> {
        if k < 2 || !k.is_power_of_two() {
            return Err(Error::BadBlockSize(k));
        }
        inst.require_step_bound_one()?;
        let values = inst.values();
        let mut suffix_min = values.to_vec();
        let mut minima = Vec::with_capacity(values.len().div_ceil(k));
        for chunk in suffix_min.chunks_mut(k) {
            for t in (0..chunk.len() - 1).rev() {
                chunk[t] = chunk[t].min(chunk[t + 1]);
            }
            minima.push(chunk[0]);
        }
        Ok(Self {
            k,
            n: values.len(),
            minima,
            suffix_min,
        })
    }

    pub fn block_size(&self) -> usize {
        self.k
    }

    pub fn block_count(&self) -> usize {
        self.minima.len()
    }

    /// 1-based block containing position `i`.
    #[inline]
    pub fn block_of(&self, i: usize) -> usize {
        (i - 1) / self.k + 1
    }

    /// 1-based offset of position `i` inside its block.
    #[inline]
    pub fn offset_of(&self, i: usize) -> usize {
        (i - 1) % self.k + 1
    }

    /// First position of block `t`.
    #[inline]
    pub fn block_start(&self, t: usize) -> usize {
        (t - 1) * self.k + 1
    }

    /// Number of positions in block `t`.
    pub fn block_len(&self, t: usize) -> usize {
        self.k.min(self.n - (t - 1) * self.k)
    }

    /// Minimum of block `t`.
    pub fn minimum(&self, t: usize) -> i64 {
        self.minima[t - 1]
    }

    pub fn minima(&self) -> &[i64] {
        &self.minima
    }

    /// `floor(M[t] / k)` for every block.
    pub fn quotients(&self) -> Vec<i64> {
        let shift = self.k.trailing_zeros();
        self.minima.iter().map(|&m| m >> shift).collect()
    }

    /// Minimum of `a[i..]` restricted to the block of `i`.
    pub fn suffix_min(&self, i: usize) -> i64 {
        self.suffix_min[i - 1]
    }
}

/// `near[t][j]`: first `u > t` with `M[u] <= M[t] - j`, for `1 <= j <= k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NearTable {
    pub(crate) k: usize,
    pub(crate) cells: Vec<usize>,
}

impl NearTable {
    /// Fills each row by walking the nearest-smaller chain of `minima`.
    pub fn build(minima: &[i64], k: usize) -> Self {
        let ns = nearest_smallers(minima);
        let mut cells = Vec::with_capacity(minima.len() * k);
        for t in 1..=minima.len() {
            let base = minima[t - 1];
            let mut cur = t;
            let mut filled = 0;
            while filled < k {
                match ns.get(cur) {
                    Some(q) => {
                        let reach = ((base - minima[q - 1]) as usize).min(k);
                        cells.extend(std::iter::repeat_n(q, reach - filled));
                        filled = reach;
                        cur = q;
                    }
                    None => {
                        cells.extend(std::iter::repeat_n(NONE, k - filled));
                        filled = k;
                    }
                }
            }
        }
        Self { k, cells }
    }

    pub fn get(&self, t: usize, j: usize) -> Option<usize> {
        assert!(j >= 1 && j <= self.k, "near gap {j} outside 1..={}", self.k);
        decode(self.cells[(t - 1) * self.k + j - 1])
    }

    pub fn entry_count(&self) -> usize {
        self.cells.len()
    }
}

/// Block decomposition plus the structures answering queries over block
/// minima. Shared by [`TwoLevelIndex`] and the multi-level index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct GlobalLevel {
    pub(crate) decomp: BlockDecomposition,
    pub(crate) quotient_far: BasicIndex,
    pub(crate) near: NearTable,
}

impl GlobalLevel {
    pub(crate) fn build(inst: &FsInstance, k: usize) -> Result<Self> {
        let decomp = BlockDecomposition::new(inst, k)?;
        let quotient_far = BasicIndex::build(FsInstance::new(decomp.quotients())?)?;
        let near = NearTable::build(&decomp.minima, k);
        Ok(Self {
            decomp,
            quotient_far,
            near,
        })
    }

    /// Smallest block `u >= t` with `M[u] <= x`.
    pub(crate) fn query(&self, t: usize, x: i64, probe: &mut Probe) -> Option<usize> {
        self.query_traced(t, x, probe, |_, _| {})
    }

    /// As [`query`](Self::query); `on_jump(t, q)` observes each quotient jump.
    pub(crate) fn query_traced(
        &self,
        t: usize,
        x: i64,
        probe: &mut Probe,
        mut on_jump: impl FnMut(usize, usize),
    ) -> Option<usize> {
        let k = self.decomp.k;
        probe.read();
        let mt = self.decomp.minimum(t);
        if mt <= x {
            return Some(t);
        }
        let d = (mt - x) as usize;
        if d <= k {
            probe.read();
            return self.near.get(t, d);
        }
        // b[u] <= floor(x / k) is necessary for M[u] <= x, so q never passes the answer
        let q = self
            .quotient_far
            .query_probed(t, x >> k.trailing_zeros(), probe)
            .expect("block position in range")?;
        on_jump(t, q);
        probe.read();
        let mq = self.decomp.minimum(q);
        if mq <= x {
            return Some(q);
        }
        probe.read();
        self.near.get(q, (mq - x) as usize)
    }

    /// Shared case analysis for `FS(i, x)` given a solver for in-block
    /// queries `local(block, offset, x)` returning an offset.
    pub(crate) fn query_blocks(
        &self,
        inst: &FsInstance,
        i: usize,
        x: i64,
        probe: &mut Probe,
        mut local: impl FnMut(usize, usize, i64, &mut Probe) -> Option<usize>,
    ) -> Option<usize> {
        if inst.get(i) <= x {
            return Some(i);
        }
        let decomp = &self.decomp;
        let t = decomp.block_of(i);
        probe.read();
        if decomp.suffix_min(i) <= x {
            let off = local(t, decomp.offset_of(i), x, probe)
                .expect("suffix minimum guarantees an in-block answer");
            return Some(decomp.block_start(t) + off - 1);
        }
        if t == decomp.block_count() {
            return None;
        }
        let target = self.query(t + 1, x, probe)?;
        let off = local(target, 1, x, probe).expect("block minimum guarantees an in-block answer");
        Some(decomp.block_start(target) + off - 1)
    }
}

/// How blocks answer in-block queries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LocalKind {
    /// A [`BasicIndex`] per block.
    Basic,
    /// One shared [`PatternTable`] and a pattern code per block.
    Table,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Locals {
    Basic(Vec<BasicIndex>),
    Table {
        table: PatternTable,
        codes: Vec<u32>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoLevelIndex {
    pub(crate) inst: FsInstance,
    pub(crate) global: GlobalLevel,
    pub(crate) locals: Locals,
}

impl TwoLevelIndex {
    pub fn build(inst: FsInstance, k: usize, kind: LocalKind) -> Result<Self> {
        inst.require_step_bound_one()?;
        let global = GlobalLevel::build(&inst, k)?;
        let blocks = inst.values().chunks(k);
        let locals = match kind {
            LocalKind::Basic => Locals::Basic(
                blocks
                    .map(|b| BasicIndex::build(FsInstance::new(b.to_vec())?))
                    .collect::<Result<_>>()?,
            ),
            LocalKind::Table => {
                let table = PatternTable::build(k)?;
                let mut codes = Vec::with_capacity(global.decomp.block_count());
                for (t, b) in blocks.enumerate() {
                    codes.push(encode_pattern(b, k).map_err(|e| match e {
                        Error::StepNotUnit { offset } => Error::StepNotUnit {
                            offset: t * k + offset,
                        },
                        e => e,
                    })?);
                }
                Locals::Table { table, codes }
            }
        };
        Ok(Self {
            inst,
            global,
            locals,
        })
    }

    pub fn instance(&self) -> &FsInstance {
        &self.inst
    }

    pub fn decomposition(&self) -> &BlockDecomposition {
        &self.global.decomp
    }

    pub fn near(&self) -> &NearTable {
        &self.global.near
    }

    /// FAR index over the block-minimum quotients.
    pub fn quotient_index(&self) -> &BasicIndex {
        &self.global.quotient_far
    }

    pub fn local_kind(&self) -> LocalKind {
        match self.locals {
            Locals::Basic(_) => LocalKind::Basic,
            Locals::Table { .. } => LocalKind::Table,
        }
    }

    pub fn pattern_table(&self) -> Option<&PatternTable> {
        match &self.locals {
            Locals::Table { table, .. } => Some(table),
            Locals::Basic(_) => None,
        }
    }

    /// Smallest block `u >= t` whose minimum is at most `x`.
    pub fn query_global(&self, t: usize, x: i64) -> Result<Option<usize>> {
        check_position(t, self.global.decomp.block_count())?;
        Ok(self.global.query(t, x, &mut Probe::default()))
    }

    /// As [`query_global`](Self::query_global), also reporting the
    /// `(t, q)` pair of the quotient jump when one was taken.
    pub fn query_global_traced(&self, t: usize, x: i64) -> Result<TracedAnswer> {
        check_position(t, self.global.decomp.block_count())?;
        let mut jump = None;
        let found = self
            .global
            .query_traced(t, x, &mut Probe::default(), |t, q| jump = Some((t, q)));
        Ok((found, jump))
    }

    fn local(&self, t: usize, s: usize, x: i64, probe: &mut Probe) -> Option<usize> {
        match &self.locals {
            Locals::Basic(blocks) => blocks[t - 1]
                .query_probed(s, x, probe)
                .expect("offset inside block"),
            Locals::Table { table, codes } => {
                let v = self.inst.get(self.global.decomp.block_start(t) + s - 1);
                if v <= x {
                    return Some(s);
                }
                let gap = v - x;
                if gap as usize >= table.k {
                    return None;
                }
                probe.read();
                let code = codes[t - 1];
                probe.read();
                table.query(code, s, gap).expect("gap checked")
            }
        }
    }

    pub(crate) fn far_entries(&self) -> usize {
        let local = match &self.locals {
            Locals::Basic(blocks) => blocks.iter().map(BasicIndex::total_entries).sum(),
            Locals::Table { .. } => 0,
        };
        self.global.quotient_far.total_entries() + local
    }
}

impl FindSmaller for TwoLevelIndex {
    fn len(&self) -> usize {
        self.inst.len()
    }

    fn value(&self, i: usize) -> i64 {
        self.inst.get(i)
    }

    fn find_smaller_probed(&self, i: usize, x: i64, probe: &mut Probe) -> Result<Option<usize>> {
        check_position(i, self.inst.len())?;
        Ok(self
            .global
            .query_blocks(&self.inst, i, x, probe, |t, s, x, p| self.local(t, s, x, p)))
    }
}
