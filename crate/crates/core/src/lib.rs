//! Level ancestor queries in constant time.
//!
//! A rooted tree is flattened into its Euler tour; the level of every tour
//! entry forms an array whose adjacent entries differ by exactly one. The
//! `i`-th ancestor of `v` is then the first tour entry at or after the last
//! occurrence of `v` whose level is at most `level(v) - i`, which is a
//! *find-smaller* query on that array.
//!
//! Several find-smaller indexes are provided, all behind [`FindSmaller`]:
//!
//! * [`BasicIndex`]: per-position FAR tables, `O(n log n)` space, one table
//!   read per query.
//! * [`TwoLevelIndex`]: blocks of size `k = Θ(log n)`, a quotient FAR index
//!   plus a Near table over block minima, and either a [`BasicIndex`] per
//!   block or one shared [`PatternTable`] for all blocks.
//! * [`MultiIndex`]: the two-level scheme applied recursively to a fixed
//!   depth.
//!
//! Positions in find-smaller arrays are 1-based; node ids are 0-based.

pub mod artifact;
pub mod block_table;
mod error;
pub mod far;
pub mod fs;
pub mod multi;
pub mod random;
pub mod strategy;
pub mod tree;
pub mod two_level;

pub use artifact::{ArtifactError, IndexArtifact};
pub use block_table::PatternTable;
pub use error::Error;
pub use far::BasicIndex;
pub use fs::{fs_oracle, nearest_smallers, FsInstance, NsArray};
pub use multi::{iter_log, MultiIndex};
pub use strategy::{FsIndex, IndexStats, Strategy};
pub use tree::{
    ancestor_oracle, level_ancestor, level_ancestor_probed, EulerTour, RootedTree, TreeError,
};
pub use two_level::{
    choose_block_size, BlockDecomposition, LocalKind, NearTable, TracedAnswer, TwoLevelIndex,
};

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Counts reads of precomputed tables during a query.
///
/// FAR cells, Near cells, block minima, suffix minima, pattern ids and
/// pattern-table cells each count as one read. Reads of the indexed array
/// itself are not counted.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Probe {
    pub reads: usize,
}

impl Probe {
    #[inline]
    pub(crate) fn read(&mut self) {
        self.reads += 1;
    }
}

/// A structure answering `FS(i, x)`: the smallest `j >= i` with `a[j] <= x`.
pub trait FindSmaller {
    /// Length of the indexed array.
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Value at 1-based position `i`.
    fn value(&self, i: usize) -> i64;

    fn find_smaller_probed(&self, i: usize, x: i64, probe: &mut Probe) -> Result<Option<usize>>;

    fn find_smaller(&self, i: usize, x: i64) -> Result<Option<usize>> {
        self.find_smaller_probed(i, x, &mut Probe::default())
    }
}

pub(crate) fn check_position(i: usize, len: usize) -> Result<()> {
    if i == 0 || i > len {
        Err(Error::PositionOutOfRange { pos: i, len })
    } else {
        Ok(())
    }
}
