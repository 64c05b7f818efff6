//! FAR tables over an array whose adjacent entries differ by at most one.
//!
//! Position `i` stores `far_i[j]` for `j = 1..=cap_i`: the first position
//! `h > i` with `a[h] <= a[i] - j`. The capacity is `3 * 2^r` where `2^r` is
//! the largest power of two dividing `i - 1`, further capped by
//! `a[i] - min(a)` since lower thresholds can never be met. A query
//! `FS(i, x)` rounds `i` down to a position aligned to the largest power of
//! two not exceeding `a[i] - x` and reads a single cell there.

use crate::fs::{nearest_smallers, FsInstance};
use crate::{check_position, FindSmaller, Probe, Result};

pub(crate) const NONE: usize = usize::MAX;

/// Alignment exponent of position `i` in an array of length `n`.
///
/// For `i >= 2` this is the exponent of the largest power of two dividing
/// `i - 1`. Position 1 (where `i - 1 = 0`) gets `ceil(log2(n + 1))`, which is
/// enough to cover any gap in the array.
pub fn alignment_exponent(i: usize, n: usize) -> u32 {
    debug_assert!(i >= 1);
    if i == 1 {
        (n + 1).next_power_of_two().trailing_zeros()
    } else {
        (i - 1).trailing_zeros()
    }
}

/// Largest `i1 <= i` such that `2^p` divides `i1 - 1`.
#[inline]
pub fn aligned_index(i: usize, p: u32) -> usize {
    debug_assert!(i >= 1);
    if p >= usize::BITS {
        return 1;
    }
    (((i - 1) >> p) << p) + 1
}

/// How a basic query is resolved.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Plan {
    /// `a[i] <= x`.
    SelfHit,
    /// `x` is below the global minimum.
    NoAnswer,
    /// Read `far_anchor[column]`.
    Table { anchor: usize, column: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasicIndex {
    pub(crate) inst: FsInstance,
    // far_i occupies cells[offsets[i - 1]..offsets[i]]
    pub(crate) offsets: Vec<usize>,
    pub(crate) cells: Vec<usize>,
}

impl BasicIndex {
    pub fn build(inst: FsInstance) -> Result<Self> {
        inst.require_step_bound_one()?;
        let n = inst.len();
        let ns = nearest_smallers(inst.values());

        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        let mut total = 0usize;
        for i in 1..=n {
            total += capacity_of(&inst, i);
            offsets.push(total);
        }

        let mut cells = Vec::with_capacity(total);
        for i in 1..=n {
            let cap = offsets[i] - offsets[i - 1];
            let base = inst.get(i);
            let mut cur = i;
            let mut filled = 0;
            while filled < cap {
                match ns.get(cur) {
                    Some(q) => {
                        // every position strictly between cur and q is >= a[cur]
                        let reach = ((base - inst.get(q)) as usize).min(cap);
                        cells.extend(std::iter::repeat_n(q, reach - filled));
                        filled = reach;
                        cur = q;
                    }
                    None => {
                        cells.extend(std::iter::repeat_n(NONE, cap - filled));
                        filled = cap;
                    }
                }
            }
        }
        debug_assert_eq!(cells.len(), total);

        Ok(Self {
            inst,
            offsets,
            cells,
        })
    }

    pub fn instance(&self) -> &FsInstance {
        &self.inst
    }

    /// Number of stored cells in `far_i`.
    pub fn capacity(&self, i: usize) -> usize {
        self.offsets[i] - self.offsets[i - 1]
    }

    /// `far_i[j]` for `1 <= j <= capacity(i)`.
    pub fn far(&self, i: usize, j: usize) -> Option<usize> {
        assert!(
            j >= 1 && j <= self.capacity(i),
            "far_{i}[{j}] is not stored"
        );
        decode(self.cells[self.offsets[i - 1] + j - 1])
    }

    pub fn far_row(&self, i: usize) -> impl Iterator<Item = Option<usize>> + '_ {
        self.cells[self.offsets[i - 1]..self.offsets[i]]
            .iter()
            .map(|&c| decode(c))
    }

    pub fn total_entries(&self) -> usize {
        self.cells.len()
    }

    /// The table lookup a query for `(i, x)` performs.
    pub fn plan(&self, i: usize, x: i64) -> Result<Plan> {
        check_position(i, self.inst.len())?;
        let ai = self.inst.get(i);
        if ai <= x {
            return Ok(Plan::SelfHit);
        }
        if x < self.inst.global_min() {
            return Ok(Plan::NoAnswer);
        }
        let d = (ai - x) as u64;
        let p = d.ilog2();
        let anchor = aligned_index(i, p);
        let column = (self.inst.get(anchor) - x) as usize;
        Ok(Plan::Table { anchor, column })
    }

    pub fn query(&self, i: usize, x: i64) -> Result<Option<usize>> {
        self.query_probed(i, x, &mut Probe::default())
    }

    pub fn query_probed(&self, i: usize, x: i64, probe: &mut Probe) -> Result<Option<usize>> {
        Ok(match self.plan(i, x)? {
            Plan::SelfHit => Some(i),
            Plan::NoAnswer => None,
            Plan::Table { anchor, column } => {
                probe.read();
                debug_assert!(column >= 1 && column <= self.capacity(anchor));
                decode(self.cells[self.offsets[anchor - 1] + column - 1])
            }
        })
    }
}

impl FindSmaller for BasicIndex {
    fn len(&self) -> usize {
        self.inst.len()
    }

    fn value(&self, i: usize) -> i64 {
        self.inst.get(i)
    }

    fn find_smaller_probed(&self, i: usize, x: i64, probe: &mut Probe) -> Result<Option<usize>> {
        self.query_probed(i, x, probe)
    }
}

/// `min(3 * 2^r_i, a[i] - min(a))`.
pub(crate) fn capacity_of(inst: &FsInstance, i: usize) -> usize {
    let r = alignment_exponent(i, inst.len());
    let reach = (inst.get(i) - inst.global_min()) as u64;
    let cap = if r >= 62 { u64::MAX } else { 3u64 << r };
    cap.min(reach) as usize
}

#[inline]
pub(crate) fn decode(cell: usize) -> Option<usize> {
    (cell != NONE).then_some(cell)
}

#[inline]
pub(crate) fn encode(pos: Option<usize>) -> usize {
    pos.unwrap_or(NONE)
}
