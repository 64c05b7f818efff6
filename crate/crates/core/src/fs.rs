//! The find-smaller problem, nearest smallers, and the linear-scan oracle.

use crate::{check_position, Error, Result};

/// An array `a[1..=n]` prepared for find-smaller indexing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FsInstance {
    values: Vec<i64>,
    step_bound: u64,
    global_min: i64,
}

impl FsInstance {
    pub fn new(values: Vec<i64>) -> Result<Self> {
        let global_min = *values.iter().min().ok_or(Error::EmptyArray)?;
        let step_bound = values
            .windows(2)
            .map(|w| w[0].abs_diff(w[1]))
            .max()
            .unwrap_or(0);
        Ok(Self {
            values,
            step_bound,
            global_min,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value at 1-based position `i`.
    #[inline]
    pub fn get(&self, i: usize) -> i64 {
        self.values[i - 1]
    }

    /// The values as a 0-based slice.
    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn step_bound(&self) -> u64 {
        self.step_bound
    }

    pub fn global_min(&self) -> i64 {
        self.global_min
    }

    /// Fails with the first position whose step exceeds one.
    pub fn require_step_bound_one(&self) -> Result<()> {
        if self.step_bound <= 1 {
            return Ok(());
        }
        let (pos, step) = self
            .values
            .windows(2)
            .enumerate()
            .map(|(t, w)| (t + 1, w[0].abs_diff(w[1])))
            .find(|&(_, s)| s > 1)
            .expect("step bound above one implies an offending pair");
        Err(Error::StepBoundViolated { pos, step })
    }
}

/// `ns[i]` is the smallest `j > i` with `a[j] < a[i]`, if any.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NsArray {
    ns: Vec<Option<usize>>,
    stack_ops: usize,
}

impl NsArray {
    /// Nearest smaller of 1-based position `i`.
    #[inline]
    pub fn get(&self, i: usize) -> Option<usize> {
        self.ns[i - 1]
    }

    pub fn len(&self) -> usize {
        self.ns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ns.is_empty()
    }

    /// Pushes plus pops performed while computing the array.
    pub fn stack_ops(&self) -> usize {
        self.stack_ops
    }

    pub fn as_slice(&self) -> &[Option<usize>] {
        &self.ns
    }
}

/// Right-to-left stack pass. Positions still on the stack at the end have
/// no nearest smaller.
pub fn nearest_smallers(values: &[i64]) -> NsArray {
    let n = values.len();
    let mut ns = vec![None; n];
    let mut stack: Vec<usize> = Vec::with_capacity(n.min(1024));
    let mut stack_ops = 0;
    for i in (0..n).rev() {
        while let Some(&top) = stack.last() {
            if values[top] < values[i] {
                break;
            }
            stack.pop();
            stack_ops += 1;
        }
        ns[i] = stack.last().map(|&t| t + 1);
        stack.push(i);
        stack_ops += 1;
    }
    NsArray { ns, stack_ops }
}

/// Smallest `j >= i` with `a[j] <= x`, by linear scan.
pub fn fs_oracle(inst: &FsInstance, i: usize, x: i64) -> Result<Option<usize>> {
    check_position(i, inst.len())?;
    Ok(inst.values[i - 1..]
        .iter()
        .position(|&v| v <= x)
        .map(|off| i + off))
}
