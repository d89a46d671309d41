//! Exhaustive minimum-depth classical decision trees over small families.

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::Serialize;

use super::ProtocolError;
use crate::designs::TernaryMatrix;
use crate::field::FieldSpec;

/// Largest family [`optimal_tree`] accepts.
pub const MAX_TREE_FAMILY: usize = 16;

/// Queries along a root-to-leaf path with the answers taken.
pub type QueryPath = Vec<(usize, i8)>;

/// Ternary query tree. `children[a + 1]` follows answer `a`; a missing child
/// means no family member gives that answer at this node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DecisionTree {
    Leaf {
        member: usize,
    },
    Node {
        index: usize,
        children: [Option<Box<DecisionTree>>; 3],
    },
}

impl DecisionTree {
    pub fn depth(&self) -> usize {
        match self {
            DecisionTree::Leaf { .. } => 0,
            DecisionTree::Node { children, .. } => {
                1 + children
                    .iter()
                    .flatten()
                    .map(|c| c.depth())
                    .max()
                    .unwrap_or(0)
            }
        }
    }

    /// Walks the tree on a table; `None` if an answer has no branch.
    pub fn classify(&self, table: &[i8]) -> Option<usize> {
        let mut node = self;
        loop {
            match node {
                DecisionTree::Leaf { member } => return Some(*member),
                DecisionTree::Node { index, children } => {
                    let answer = *table.get(*index)?;
                    node = children[(answer + 1) as usize].as_deref()?;
                }
            }
        }
    }

    /// Every root-to-leaf path as `(queries with answers, leaf member)`.
    pub fn paths(&self) -> Vec<(QueryPath, usize)> {
        fn walk(node: &DecisionTree, prefix: &mut QueryPath, out: &mut Vec<(QueryPath, usize)>) {
            match node {
                DecisionTree::Leaf { member } => out.push((prefix.clone(), *member)),
                DecisionTree::Node { index, children } => {
                    for (slot, child) in children.iter().enumerate() {
                        if let Some(child) = child {
                            prefix.push((*index, slot as i8 - 1));
                            walk(child, prefix, out);
                            prefix.pop();
                        }
                    }
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut Vec::new(), &mut out);
        out
    }

    /// Indented text rendering, one node per line.
    pub fn render(&self) -> String {
        fn go(node: &DecisionTree, depth: usize, label: &str, out: &mut String) {
            let pad = "  ".repeat(depth);
            match node {
                DecisionTree::Leaf { member } => {
                    let _ = writeln!(out, "{pad}{label}s = {member}");
                }
                DecisionTree::Node { index, children } => {
                    let _ = writeln!(out, "{pad}{label}query f({index})");
                    for (slot, child) in children.iter().enumerate() {
                        if let Some(child) = child {
                            let answer = ["-1", "0", "+1"][slot];
                            go(child, depth + 1, &format!("[{answer}] "), out);
                        }
                    }
                }
            }
        }
        let mut out = String::new();
        go(self, 0, "", &mut out);
        out
    }
}

struct Search<'a> {
    family: &'a [Vec<i8>],
    len: usize,
    memo: HashMap<u32, (usize, usize)>,
}

impl Search<'_> {
    fn classes(&self, mask: u32, i: usize) -> [u32; 3] {
        let mut parts = [0u32; 3];
        for (m, table) in self.family.iter().enumerate() {
            if mask >> m & 1 == 1 {
                parts[(table[i] + 1) as usize] |= 1 << m;
            }
        }
        parts
    }

    /// `(depth, best index)` for the members in `mask`.
    fn solve(&mut self, mask: u32) -> (usize, usize) {
        if mask.count_ones() <= 1 {
            return (0, 0);
        }
        if let Some(&hit) = self.memo.get(&mask) {
            return hit;
        }
        let mut best = (usize::MAX, 0);
        for i in 0..self.len {
            let parts = self.classes(mask, i);
            if parts.contains(&mask) {
                continue;
            }
            let mut worst = 0;
            for part in parts.into_iter().filter(|&p| p != 0) {
                worst = worst.max(self.solve(part).0);
                if 1 + worst >= best.0 {
                    break;
                }
            }
            if 1 + worst < best.0 {
                best = (1 + worst, i);
            }
        }
        self.memo.insert(mask, best);
        best
    }

    fn build(&mut self, mask: u32) -> DecisionTree {
        if mask.count_ones() == 1 {
            return DecisionTree::Leaf {
                member: mask.trailing_zeros() as usize,
            };
        }
        let (_, index) = self.solve(mask);
        let parts = self.classes(mask, index);
        let children = parts.map(|p| (p != 0).then(|| Box::new(self.build(p))));
        DecisionTree::Node { index, children }
    }
}

/// Minimum worst-case-depth tree identifying every member of `family`
/// exactly. Ties between query indices go to the smallest index.
pub fn optimal_tree(family: &[Vec<i8>]) -> Result<(DecisionTree, usize), ProtocolError> {
    if family.is_empty() {
        return Err(ProtocolError::BadParameter("family is empty".into()));
    }
    if family.len() > MAX_TREE_FAMILY {
        return Err(ProtocolError::TooLarge {
            what: "family size",
            value: family.len() as u64,
            cap: MAX_TREE_FAMILY as u64,
        });
    }
    let len = family[0].len();
    for table in family {
        if table.len() != len {
            return Err(ProtocolError::RaggedFamily {
                expected: len,
                found: table.len(),
            });
        }
        if let Some(&bad) = table.iter().find(|v| !(-1..=1).contains(*v)) {
            return Err(crate::designs::DesignError::NonTernary(bad).into());
        }
    }
    for a in 0..family.len() {
        for b in a + 1..family.len() {
            if family[a] == family[b] {
                return Err(ProtocolError::Indistinguishable { a, b });
            }
        }
    }
    let mut search = Search {
        family,
        len,
        memo: HashMap::new(),
    };
    let all = (1u32 << family.len()) - 1;
    let tree = search.build(all);
    let depth = tree.depth();
    Ok((tree, depth))
}

/// Rows of a matrix as oracle tables; member `s` is row `s`.
pub fn matrix_family(m: &TernaryMatrix) -> Vec<Vec<i8>> {
    m.rows().map(<[i8]>::to_vec).collect()
}

/// `f_s(i) = chi(i + s)` for every shift `s`, indexed by rank.
pub fn sls_family(field: &FieldSpec) -> Vec<Vec<i8>> {
    let chi = field.chi_table();
    (0..chi.q())
        .map(|s| (0..chi.q()).map(|i| chi.shifted(i, s)).collect())
        .collect()
}
