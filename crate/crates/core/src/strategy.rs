use std::fmt;
use std::str::FromStr;

use crate::far::BasicIndex;
use crate::fs::FsInstance;
use crate::multi::MultiIndex;
use crate::two_level::{choose_block_size, LocalKind, Locals, TwoLevelIndex};
use crate::{FindSmaller, Probe, Result};

/// Which find-smaller index to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    Basic,
    /// Two-level with a [`BasicIndex`] per block.
    Two,
    /// Two-level with a shared pattern table.
    Table,
    Multi,
}

impl Strategy {
    pub const ALL: [Strategy; 4] = [Self::Basic, Self::Two, Self::Table, Self::Multi];

    pub fn name(self) -> &'static str {
        match self {
            Self::Basic => "basic",
            Self::Two => "two",
            Self::Table => "table",
            Self::Multi => "multi",
        }
    }

    pub(crate) fn tag(self) -> u64 {
        match self {
            Self::Basic => 0,
            Self::Two => 1,
            Self::Table => 2,
            Self::Multi => 3,
        }
    }

    pub(crate) fn from_tag(tag: u64) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.tag() == tag)
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| format!("unknown strategy {s:?}; expected basic, two, table or multi"))
    }
}

/// Table sizes of a built index, in cells.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct IndexStats {
    pub far: usize,
    pub near: usize,
    pub pattern: usize,
    /// Block minima, suffix minima, quotients and pattern ids.
    pub aux: usize,
}

impl IndexStats {
    pub fn total(&self) -> usize {
        self.far + self.near + self.pattern + self.aux
    }
}

/// Any of the find-smaller indexes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FsIndex {
    Basic(BasicIndex),
    TwoLevel(TwoLevelIndex),
    Multi { depth: usize, index: MultiIndex },
}

impl FsIndex {
    /// `depth` is only used by [`Strategy::Multi`]. Two-level strategies use
    /// `k = choose_block_size(n)`.
    pub fn build(strategy: Strategy, inst: FsInstance, depth: usize) -> Result<Self> {
        let k = choose_block_size(inst.len());
        Ok(match strategy {
            Strategy::Basic => Self::Basic(BasicIndex::build(inst)?),
            Strategy::Two => Self::TwoLevel(TwoLevelIndex::build(inst, k, LocalKind::Basic)?),
            Strategy::Table => Self::TwoLevel(TwoLevelIndex::build(inst, k, LocalKind::Table)?),
            Strategy::Multi => Self::Multi {
                depth,
                index: MultiIndex::build(inst, depth)?,
            },
        })
    }

    pub fn strategy(&self) -> Strategy {
        match self {
            Self::Basic(_) => Strategy::Basic,
            Self::TwoLevel(t) => match t.local_kind() {
                LocalKind::Basic => Strategy::Two,
                LocalKind::Table => Strategy::Table,
            },
            Self::Multi { .. } => Strategy::Multi,
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Self::Basic(_) => 1,
            Self::TwoLevel(_) => 2,
            Self::Multi { depth, .. } => *depth,
        }
    }

    pub fn instance(&self) -> &FsInstance {
        match self {
            Self::Basic(b) => b.instance(),
            Self::TwoLevel(t) => t.instance(),
            Self::Multi { index, .. } => index.instance(),
        }
    }

    /// Block size at each level, top first.
    pub fn block_sizes(&self) -> Vec<usize> {
        match self {
            Self::Basic(_) => Vec::new(),
            Self::TwoLevel(t) => vec![t.decomposition().block_size()],
            Self::Multi { index, .. } => index.block_sizes(),
        }
    }

    pub fn stats(&self) -> IndexStats {
        match self {
            Self::Basic(b) => IndexStats {
                far: b.total_entries(),
                ..Default::default()
            },
            Self::TwoLevel(t) => {
                let d = t.decomposition();
                let blocks = d.block_count();
                let (pattern, codes) = match &t.locals {
                    Locals::Table { table, codes } => (table.entry_count(), codes.len()),
                    Locals::Basic(_) => (0, 0),
                };
                IndexStats {
                    far: t.far_entries(),
                    near: t.near().entry_count(),
                    pattern,
                    aux: 2 * blocks + t.instance().len() + codes,
                }
            }
            Self::Multi { index, .. } => {
                let (far, near, aux) = index.entry_counts();
                IndexStats {
                    far,
                    near,
                    pattern: 0,
                    aux,
                }
            }
        }
    }
}

impl FindSmaller for FsIndex {
    fn len(&self) -> usize {
        self.instance().len()
    }

    fn value(&self, i: usize) -> i64 {
        self.instance().get(i)
    }

    fn find_smaller_probed(&self, i: usize, x: i64, probe: &mut Probe) -> Result<Option<usize>> {
        match self {
            Self::Basic(b) => b.find_smaller_probed(i, x, probe),
            Self::TwoLevel(t) => t.find_smaller_probed(i, x, probe),
            Self::Multi { index, .. } => index.find_smaller_probed(i, x, probe),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for s in Strategy::ALL {
            assert_eq!(s.name().parse::<Strategy>(), Ok(s));
            assert_eq!(Strategy::from_tag(s.tag()), Some(s));
        }
        assert!("fast".parse::<Strategy>().is_err());
        assert_eq!(Strategy::from_tag(9), None);
    }

    #[test]
    fn example_stats() {
        let inst = FsInstance::new(vec![0, 1, 2, 1, 2, 1, 0, 1, 0]).unwrap();
        let basic = FsIndex::build(Strategy::Basic, inst.clone(), 1).unwrap();
        assert_eq!(basic.stats().far, 8);
        let two = FsIndex::build(Strategy::Two, inst.clone(), 2).unwrap();
        assert_eq!(two.stats().near, 10);
        assert!(two.stats().near <= 9 + 2);
        let table = FsIndex::build(Strategy::Table, inst, 2).unwrap();
        assert_eq!(table.stats().pattern, 4);
        assert_eq!(table.strategy(), Strategy::Table);
    }
}
