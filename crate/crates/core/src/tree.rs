//! Rooted trees, their Euler tours, and the level-ancestor reduction.

use std::fmt;

use thiserror::Error;

use crate::{Error, FindSmaller, Probe, Result};

/// Why a tree file was rejected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("parent of node {node} is {parent}, outside 0..{count}")]
    OutOfRange {
        node: usize,
        parent: i64,
        count: usize,
    },
    #[error("nodes {first} and {second} both have no parent")]
    MultipleRoots { first: usize, second: usize },
    #[error("no node has parent -1")]
    NoRoot,
    #[error("header names root {declared} but node {actual} has no parent")]
    RootMismatch { declared: usize, actual: usize },
    #[error("parent links form a cycle among nodes {}", join(.nodes))]
    Cycle { nodes: Vec<usize> },
    #[error("node {node} cannot reach the root; its parent chain enters the cycle {}", join(.cycle))]
    Unreachable { node: usize, cycle: Vec<usize> },
}

fn join(nodes: &[usize]) -> String {
    nodes
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootedTree {
    root: usize,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
}

impl RootedTree {
    /// Validates a parent array; `parent[root]` must be `None`.
    pub fn from_parents(root: usize, parent: Vec<Option<usize>>) -> Result<Self, TreeError> {
        let count = parent.len();
        if count == 0 {
            return Err(TreeError::Malformed {
                line: 1,
                reason: "node count must be positive".into(),
            });
        }
        let mut found_root = None;
        for (v, p) in parent.iter().enumerate() {
            match *p {
                None => match found_root {
                    None => found_root = Some(v),
                    Some(first) => return Err(TreeError::MultipleRoots { first, second: v }),
                },
                Some(p) if p >= count => {
                    return Err(TreeError::OutOfRange {
                        node: v,
                        parent: p as i64,
                        count,
                    })
                }
                Some(_) => {}
            }
        }
        let actual = found_root.ok_or(TreeError::NoRoot)?;
        if actual != root {
            return Err(TreeError::RootMismatch {
                declared: root,
                actual,
            });
        }

        let mut children = vec![Vec::new(); count];
        for (v, p) in parent.iter().enumerate() {
            if let Some(p) = *p {
                children[p].push(v);
            }
        }

        let mut seen = vec![false; count];
        let mut stack = vec![root];
        seen[root] = true;
        while let Some(v) = stack.pop() {
            for &c in &children[v] {
                seen[c] = true;
                stack.push(c);
            }
        }
        if let Some(node) = seen.iter().position(|&s| !s) {
            return Err(cycle_error(node, &parent));
        }

        Ok(Self {
            root,
            parent,
            children,
        })
    }

    /// Parses `"<n> <root>\n<parent_0> ... <parent_{n-1}>"` with `-1` for the root.
    pub fn parse(text: &str) -> Result<Self, TreeError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(no, l)| (no + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (hline, header) = lines.next().ok_or(TreeError::Malformed {
            line: 1,
            reason: "missing header".into(),
        })?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let [count, root] = fields[..] else {
            return Err(TreeError::Malformed {
                line: hline,
                reason: format!("expected \"<n> <root>\", found {header:?}"),
            });
        };
        let bad = |what: &str, tok: &str| TreeError::Malformed {
            line: hline,
            reason: format!("{what} {tok:?} is not a non-negative integer"),
        };
        let count: usize = count.parse().map_err(|_| bad("node count", count))?;
        let root: usize = root.parse().map_err(|_| bad("root", root))?;
        if count == 0 {
            return Err(TreeError::Malformed {
                line: hline,
                reason: "node count must be positive".into(),
            });
        }
        if root >= count {
            return Err(TreeError::Malformed {
                line: hline,
                reason: format!("root {root} outside 0..{count}"),
            });
        }

        let (pline, body) = lines.next().ok_or(TreeError::Malformed {
            line: hline + 1,
            reason: "missing parent line".into(),
        })?;
        let mut parent = Vec::with_capacity(count);
        for (v, tok) in body.split_whitespace().enumerate() {
            let p: i64 = tok.parse().map_err(|_| TreeError::Malformed {
                line: pline,
                reason: format!("parent {tok:?} of node {v} is not an integer"),
            })?;
            parent.push(match p {
                -1 => None,
                p if p < 0 || p as u64 >= count as u64 => {
                    return Err(TreeError::OutOfRange {
                        node: v,
                        parent: p,
                        count,
                    })
                }
                p => Some(p as usize),
            });
        }
        if parent.len() != count {
            return Err(TreeError::Malformed {
                line: pline,
                reason: format!("expected {count} parent ids, found {}", parent.len()),
            });
        }
        if let Some((line, _)) = lines.next() {
            return Err(TreeError::Malformed {
                line,
                reason: "unexpected trailing content".into(),
            });
        }
        Self::from_parents(root, parent)
    }

    pub fn node_count(&self) -> usize {
        self.parent.len()
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        self.parent[v]
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parent
    }

    /// Children of `v` in ascending id order.
    pub fn children(&self, v: usize) -> &[usize] {
        &self.children[v]
    }

    /// Distance from the root for every node, in one traversal.
    pub fn levels(&self) -> Vec<usize> {
        let mut level = vec![0; self.node_count()];
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            for &c in &self.children[v] {
                level[c] = level[v] + 1;
                stack.push(c);
            }
        }
        level
    }
}

impl fmt::Display for RootedTree {
    /// Writes the tree-file format accepted by [`RootedTree::parse`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} {}", self.node_count(), self.root)?;
        let body: Vec<String> = self
            .parent
            .iter()
            .map(|p| p.map_or("-1".to_string(), |p| p.to_string()))
            .collect();
        writeln!(f, "{}", body.join(" "))
    }
}

// The lowest unvisited node either sits on a cycle or leads into one.
fn cycle_error(node: usize, parent: &[Option<usize>]) -> TreeError {
    let mut order = vec![usize::MAX; parent.len()];
    let mut path = Vec::new();
    let mut v = node;
    while order[v] == usize::MAX {
        order[v] = path.len();
        path.push(v);
        v = parent[v].expect("unvisited nodes always have a parent");
    }
    let mut cycle = path[order[v]..].to_vec();
    cycle.sort_unstable();
    if order[v] == 0 {
        TreeError::Cycle { nodes: cycle }
    } else {
        TreeError::Unreachable { node, cycle }
    }
}

/// Euler tour with levels; positions are 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EulerTour {
    pub(crate) tour: Vec<usize>,
    pub(crate) levels: Vec<i64>,
    pub(crate) last_occurrence: Vec<usize>,
    pub(crate) node_levels: Vec<usize>,
}

impl EulerTour {
    /// Depth-first walk, children in ascending id order, recording a node on
    /// entry and again after returning from each child.
    pub fn build(tree: &RootedTree) -> Self {
        let n = tree.node_count();
        let node_levels = tree.levels();
        let mut tour = Vec::with_capacity(2 * n - 1);
        let mut last_occurrence = vec![0; n];
        let mut stack: Vec<(usize, usize)> = vec![(tree.root(), 0)];
        tour.push(tree.root());
        while let Some((v, next)) = stack.last_mut() {
            let v = *v;
            match tree.children(v).get(*next) {
                Some(&c) => {
                    *next += 1;
                    tour.push(c);
                    stack.push((c, 0));
                }
                None => {
                    last_occurrence[v] = tour.len();
                    stack.pop();
                    if let Some(&(p, _)) = stack.last() {
                        tour.push(p);
                    }
                }
            }
        }
        let levels = tour.iter().map(|&v| node_levels[v] as i64).collect();
        Self {
            tour,
            levels,
            last_occurrence,
            node_levels,
        }
    }

    pub fn len(&self) -> usize {
        self.tour.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tour.is_empty()
    }

    /// Node at 1-based tour position `j`.
    pub fn node_at(&self, j: usize) -> usize {
        self.tour[j - 1]
    }

    pub fn tour(&self) -> &[usize] {
        &self.tour
    }

    /// The level array `A`, 0-based slice.
    pub fn levels(&self) -> &[i64] {
        &self.levels
    }

    /// 1-based position of the final occurrence of `v`.
    pub fn last_occurrence(&self, v: usize) -> usize {
        self.last_occurrence[v]
    }

    pub fn node_level(&self, v: usize) -> usize {
        self.node_levels[v]
    }

    pub fn node_count(&self) -> usize {
        self.node_levels.len()
    }
}

fn check_hops(et: &EulerTour, v: usize, hops: i64) -> Result<usize> {
    if v >= et.node_count() {
        return Err(Error::NodeOutOfRange {
            node: v,
            count: et.node_count(),
        });
    }
    let level = et.node_level(v);
    if hops < 0 || hops as u64 > level as u64 {
        return Err(Error::HopOutOfRange {
            node: v,
            hops,
            level,
        });
    }
    Ok(level)
}

/// The `hops`-th ancestor of `v`: the node at `FS(last(v), level(v) - hops)`.
pub fn level_ancestor<S: FindSmaller + ?Sized>(
    solver: &S,
    et: &EulerTour,
    v: usize,
    hops: i64,
) -> Result<usize> {
    level_ancestor_probed(solver, et, v, hops, &mut Probe::default())
}

pub fn level_ancestor_probed<S: FindSmaller + ?Sized>(
    solver: &S,
    et: &EulerTour,
    v: usize,
    hops: i64,
    probe: &mut Probe,
) -> Result<usize> {
    let level = check_hops(et, v, hops)?;
    let target = level as i64 - hops;
    let j = solver
        .find_smaller_probed(et.last_occurrence(v), target, probe)?
        .expect("the tour ends at the root, level 0");
    Ok(et.node_at(j))
}

/// Walks the parent chain `hops` steps.
pub fn ancestor_oracle(tree: &RootedTree, v: usize, hops: i64) -> Result<usize> {
    if v >= tree.node_count() {
        return Err(Error::NodeOutOfRange {
            node: v,
            count: tree.node_count(),
        });
    }
    if hops < 0 {
        return Err(Error::HopOutOfRange {
            node: v,
            hops,
            level: tree.levels()[v],
        });
    }
    let mut cur = v;
    for _ in 0..hops {
        cur = match tree.parent(cur) {
            Some(p) => p,
            None => {
                return Err(Error::HopOutOfRange {
                    node: v,
                    hops,
                    level: tree.levels()[v],
                })
            }
        };
    }
    Ok(cur)
}
