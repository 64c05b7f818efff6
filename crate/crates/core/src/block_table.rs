//! Answers for every possible ±1 block of a given size.
//!
//! A block of `k` values with unit steps is determined, up to an additive
//! constant, by its `k - 1` step signs. Each block therefore only stores a
//! pattern code, and one table shared by all blocks holds the in-block
//! find-smaller answer for every `(pattern, start, gap)`.

use crate::{Error, Result};

/// Largest block size a pattern table is built for.
pub const MAX_BLOCK_SIZE: usize = 16;

/// Step-sign code of a block: bit `b` is set when the step from offset
/// `b + 1` to `b + 2` is `+1`. Blocks shorter than `k` are padded with `+1`
/// steps.
pub fn encode_pattern(block: &[i64], k: usize) -> Result<u32> {
    if k < 2 {
        return Err(Error::BadBlockSize(k));
    }
    if k > MAX_BLOCK_SIZE {
        return Err(Error::BlockSizeTooLarge(k));
    }
    assert!(block.len() <= k, "block longer than k");
    let mut code = 0u32;
    for b in 0..k - 1 {
        let up = match (block.get(b), block.get(b + 1)) {
            (Some(&u), Some(&v)) if v == u + 1 => true,
            (Some(&u), Some(&v)) if v == u - 1 => false,
            (Some(_), Some(_)) => return Err(Error::StepNotUnit { offset: b + 1 }),
            _ => true,
        };
        if up {
            code |= 1 << b;
        }
    }
    Ok(code)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PatternTable {
    pub(crate) k: usize,
    // indexed by ((pattern * k + start - 1) * (k - 1) + gap - 1); 0 is "none"
    pub(crate) answers: Vec<u8>,
}

impl PatternTable {
    pub fn build(k: usize) -> Result<Self> {
        if k > MAX_BLOCK_SIZE {
            return Err(Error::BlockSizeTooLarge(k));
        }
        if k < 2 {
            return Err(Error::BadBlockSize(k));
        }
        let patterns = 1usize << (k - 1);
        let mut answers = vec![0u8; patterns * k * (k - 1)];
        let mut rel = vec![0i64; k];
        for pattern in 0..patterns {
            for b in 0..k - 1 {
                rel[b + 1] = rel[b] + if pattern >> b & 1 == 1 { 1 } else { -1 };
            }
            for start in 0..k {
                let row = (pattern * k + start) * (k - 1);
                let mut low = rel[start];
                for o in start + 1..k {
                    if rel[o] < low {
                        for gap in (rel[start] - low + 1)..=(rel[start] - rel[o]) {
                            answers[row + gap as usize - 1] = (o + 1) as u8;
                        }
                        low = rel[o];
                    }
                }
            }
        }
        Ok(Self { k, answers })
    }

    pub fn block_size(&self) -> usize {
        self.k
    }

    /// Always `2^(k-1) * k * (k-1)`.
    pub fn entry_count(&self) -> usize {
        self.answers.len()
    }

    /// First offset `o >= start` whose value is at most `value(start) - gap`.
    pub fn query(&self, pattern: u32, start: usize, gap: i64) -> Result<Option<usize>> {
        let k = self.k;
        if gap < 1 || gap as usize > k - 1 {
            return Err(Error::GapOutOfRange { gap, max: k - 1 });
        }
        assert!(
            start >= 1 && start <= k,
            "start offset {start} outside 1..={k}"
        );
        assert!(
            (pattern as usize) < 1 << (k - 1),
            "pattern {pattern} has more than k-1 bits"
        );
        let cell = self.answers[(pattern as usize * k + start - 1) * (k - 1) + gap as usize - 1];
        Ok((cell != 0).then_some(cell as usize))
    }
}
