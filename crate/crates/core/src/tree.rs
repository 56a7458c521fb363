//! Escalator trees.
//!
//! The root is the empty form (truant 1). A non-leaf node with coefficients
//! `a_1..a_k` and truant `T` has one child per `a` in `[a_k, T]`. A leaf is a
//! node that represents every integer in `[1, B]`; everything here certifies
//! B-universality only.
//!
//! Trees are built depth-first with children in increasing order of the new
//! coefficient, keeping only the chain of ancestor tables in memory.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::form::MGonalForm;
use crate::polygonal::{check_gonality, enumerate_values, ValueList};
use crate::table::{RepTable, TruantResult};

pub const DEFAULT_C: u64 = 4;
pub const DEFAULT_NODE_BUDGET: u64 = 10_000_000;
pub const DEFAULT_DEPTH_BUDGET: usize = 4096;
pub const DEFAULT_DOUBLINGS: u32 = 4;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub bound: u64,
    /// Constant in `gamma_m <= C(m-2)`; only feeds diagnostics and `l_m`.
    pub c_const: u64,
    pub node_budget: u64,
    pub depth_budget: usize,
    pub doublings: u32,
}

impl SearchConfig {
    pub fn with_bound(bound: u64) -> Self {
        SearchConfig {
            bound,
            ..Default::default()
        }
    }

    pub fn validate(&self, m: u32) -> Result<()> {
        check_gonality(m)?;
        if self.bound < m as u64 {
            return Err(Error::Contract(format!(
                "bound {} is below m = {m}",
                self.bound
            )));
        }
        if self.c_const < 1 || self.node_budget < 1 || self.depth_budget < 1 {
            return Err(Error::Contract(
                "C, node budget and depth budget must be positive".into(),
            ));
        }
        Ok(())
    }

    /// `l_m = floor((m-2)/(C+1))`.
    pub fn l_m(&self, m: u32) -> u64 {
        (m as u64 - 2) / (self.c_const + 1)
    }
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            bound: 1000,
            c_const: DEFAULT_C,
            node_budget: DEFAULT_NODE_BUDGET,
            depth_budget: DEFAULT_DEPTH_BUDGET,
            doublings: DEFAULT_DOUBLINGS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EscalatorNode {
    table: RepTable,
    truant: TruantResult,
}

impl EscalatorNode {
    pub fn new(table: RepTable) -> Self {
        let truant = table.truant();
        EscalatorNode { table, truant }
    }

    pub fn form(&self) -> &MGonalForm {
        self.table.form()
    }

    pub fn table(&self) -> &RepTable {
        &self.table
    }

    pub fn truant(&self) -> TruantResult {
        self.truant
    }

    pub fn is_leaf(&self) -> bool {
        self.truant.is_b_universal()
    }
}

/// Shared state for growing one tree: `m`, the bound, and the value list.
#[derive(Debug, Clone)]
pub struct Escalator {
    values: ValueList,
}

impl Escalator {
    pub fn new(m: u32, bound: u64) -> Result<Self> {
        Ok(Escalator {
            values: enumerate_values(m, bound)?,
        })
    }

    pub fn m(&self) -> u32 {
        self.values.m()
    }

    pub fn bound(&self) -> u64 {
        self.values.bound()
    }

    pub fn root(&self) -> Result<EscalatorNode> {
        Ok(EscalatorNode::new(RepTable::empty_with(self.m(), self.bound())?))
    }

    pub fn node(&self, form: &MGonalForm) -> Result<EscalatorNode> {
        let mut table = RepTable::empty_with(self.m(), self.bound())?;
        for &a in form.coeffs() {
            table = table.extend_with_values(a, &self.values)?;
        }
        Ok(EscalatorNode::new(table))
    }

    pub fn child(&self, node: &EscalatorNode, a: u64) -> Result<EscalatorNode> {
        Ok(EscalatorNode::new(
            node.table.extend_with_values(a, &self.values)?,
        ))
    }

    /// New-coefficient range `[a_k, T]` (root: `[1, 1]`).
    pub fn child_range(&self, node: &EscalatorNode) -> Result<(u64, u64)> {
        let t = node.truant.truant().ok_or_else(|| {
            Error::Contract(format!("{} is B-universal and has no children", node.form()))
        })?;
        Ok((node.form().last().unwrap_or(1), t))
    }

    pub fn children_of(&self, node: &EscalatorNode) -> Result<Vec<EscalatorNode>> {
        let (lo, hi) = self.child_range(node)?;
        (lo..=hi).map(|a| self.child(node, a)).collect()
    }
}

/// One visited node, as streamed by [`build_tree_with`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub m: u32,
    pub coeffs: Vec<u64>,
    pub rank: usize,
    pub truant: Option<u64>,
    pub leaf: bool,
}

impl NodeRecord {
    fn of(node: &EscalatorNode) -> Self {
        NodeRecord {
            m: node.form().m(),
            coeffs: node.form().coeffs().to_vec(),
            rank: node.form().rank(),
            truant: node.truant.truant(),
            leaf: node.is_leaf(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeReport {
    pub m: u32,
    pub bound: u64,
    /// Largest truant over non-leaf nodes.
    pub gamma_b: u64,
    pub min_leaf_rank: Option<usize>,
    pub max_leaf_rank: Option<usize>,
    pub leaf_count_by_rank: BTreeMap<usize, u64>,
    pub node_count: u64,
    pub leaf_count: u64,
    pub truncated: bool,
    pub c_const: u64,
    /// Non-leaf nodes with coefficient sum `>= C(m-2)`; nonzero means the
    /// configured C is too small for this m.
    pub key_violations: u64,
}

impl TreeReport {
    /// Agreement on the quantities that must settle once B is large enough.
    pub fn same_shape(&self, other: &TreeReport) -> bool {
        !self.truncated
            && !other.truncated
            && self.gamma_b == other.gamma_b
            && self.min_leaf_rank == other.min_leaf_rank
            && self.max_leaf_rank == other.max_leaf_rank
            && self.leaf_count_by_rank == other.leaf_count_by_rank
    }
}

#[derive(Debug, Clone)]
pub struct TreeOutcome {
    pub report: TreeReport,
    /// Leaves in depth-first order.
    pub leaves: Vec<MGonalForm>,
}

pub fn build_tree(m: u32, cfg: &SearchConfig) -> Result<TreeOutcome> {
    build_tree_with(m, cfg, |_, _| {})
}

/// Builds the tree, calling `visit` on every node (root included) in
/// depth-first order.
pub fn build_tree_with<F>(m: u32, cfg: &SearchConfig, mut visit: F) -> Result<TreeOutcome>
where
    F: FnMut(&NodeRecord, &RepTable),
{
    cfg.validate(m)?;
    let esc = Escalator::new(m, cfg.bound)?;
    let key_sum = cfg.c_const.saturating_mul(m as u64 - 2);

    let mut report = TreeReport {
        m,
        bound: cfg.bound,
        gamma_b: 0,
        min_leaf_rank: None,
        max_leaf_rank: None,
        leaf_count_by_rank: BTreeMap::new(),
        node_count: 0,
        leaf_count: 0,
        truncated: false,
        c_const: cfg.c_const,
        key_violations: 0,
    };
    let mut leaves = Vec::new();

    let mut record = |node: &EscalatorNode, report: &mut TreeReport| {
        report.node_count += 1;
        visit(&NodeRecord::of(node), node.table());
        match node.truant.truant() {
            Some(t) => {
                report.gamma_b = report.gamma_b.max(t);
                if node.form().coeff_sum() >= key_sum {
                    report.key_violations += 1;
                }
            }
            None => {
                let r = node.form().rank();
                report.leaf_count += 1;
                *report.leaf_count_by_rank.entry(r).or_default() += 1;
                report.min_leaf_rank = Some(report.min_leaf_rank.map_or(r, |x| x.min(r)));
                report.max_leaf_rank = Some(report.max_leaf_rank.map_or(r, |x| x.max(r)));
                leaves.push(node.form().clone());
            }
        }
    };

    struct Frame {
        node: EscalatorNode,
        next: u64,
        last: u64,
    }

    let root = esc.root()?;
    record(&root, &mut report);
    let mut stack = Vec::new();
    if !root.is_leaf() {
        let (next, last) = esc.child_range(&root)?;
        stack.push(Frame { node: root, next, last });
    }

    'dfs: while let Some(top) = stack.last_mut() {
        if top.next > top.last {
            stack.pop();
            continue;
        }
        let a = top.next;
        top.next += 1;
        if report.node_count >= cfg.node_budget {
            report.truncated = true;
            break 'dfs;
        }
        let child = esc.child(&top.node, a)?;
        record(&child, &mut report);
        if !child.is_leaf() {
            if child.form().rank() >= cfg.depth_budget {
                report.truncated = true;
                continue;
            }
            let (next, last) = esc.child_range(&child)?;
            stack.push(Frame { node: child, next, last });
        }
    }

    Ok(TreeOutcome { report, leaves })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Stabilized {
    /// Bound at which two consecutive reports first agreed (or the last bound tried).
    pub bound: u64,
    pub converged: bool,
    pub report: TreeReport,
    pub history: Vec<TreeReport>,
}

/// Doubles the bound from `b0` until two consecutive tree reports agree on
/// `gamma_b`, the leaf-rank extremes and the per-rank leaf counts.
pub fn stabilize_gamma(
    m: u32,
    b0: u64,
    max_doublings: u32,
    cfg: &SearchConfig,
) -> Result<Stabilized> {
    check_gonality(m)?;
    if b0 < m as u64 {
        return Err(Error::Contract(format!("initial bound {b0} is below m = {m}")));
    }
    let run = |bound: u64| {
        let cfg = SearchConfig {
            bound,
            ..cfg.clone()
        };
        build_tree(m, &cfg).map(|o| o.report)
    };
    let mut history = vec![run(b0)?];
    for i in 1..=max_doublings {
        let bound = b0
            .checked_shl(i)
            .filter(|&b| b <= crate::polygonal::MAX_BOUND)
            .ok_or(Error::BoundTooLarge {
                bound: u64::MAX,
                cap: crate::polygonal::MAX_BOUND,
            })?;
        let cur = run(bound)?;
        let agreed = history.last().unwrap().same_shape(&cur);
        history.push(cur.clone());
        if agreed {
            return Ok(Stabilized {
                bound,
                converged: true,
                report: cur,
                history,
            });
        }
    }
    let report = history.last().unwrap().clone();
    Ok(Stabilized {
        bound: report.bound,
        converged: false,
        report,
        history,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LeafFilter {
    All,
    Rank(usize),
    MaxRank,
    /// Leaves whose coefficients start with this prefix.
    Prefix(Vec<u64>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Census {
    pub m: u32,
    pub forms: Vec<MGonalForm>,
    pub count_by_rank: BTreeMap<usize, u64>,
}

impl Census {
    pub fn count(&self) -> usize {
        self.forms.len()
    }
}

pub fn leaf_census(tree: &TreeOutcome, filter: &LeafFilter) -> Result<Census> {
    if tree.report.truncated {
        return Err(Error::Truncated(format!(
            "the m={} tree at B={} hit its budget after {} nodes, so its leaf list is incomplete",
            tree.report.m, tree.report.bound, tree.report.node_count
        )));
    }
    let keep = |f: &MGonalForm| match filter {
        LeafFilter::All => true,
        LeafFilter::Rank(r) => f.rank() == *r,
        LeafFilter::MaxRank => Some(f.rank()) == tree.report.max_leaf_rank,
        LeafFilter::Prefix(p) => f.coeffs().starts_with(p),
    };
    let mut forms: Vec<MGonalForm> = tree.leaves.iter().filter(|f| keep(f)).cloned().collect();
    forms.sort();
    let mut count_by_rank = BTreeMap::new();
    for f in &forms {
        *count_by_rank.entry(f.rank()).or_default() += 1;
    }
    Ok(Census {
        m: tree.report.m,
        forms,
        count_by_rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_has_single_child() {
        let esc = Escalator::new(8, 100).unwrap();
        let root = esc.root().unwrap();
        assert_eq!(root.truant().truant(), Some(1));
        let kids = esc.children_of(&root).unwrap();
        assert_eq!(kids.len(), 1);
        assert_eq!(kids[0].form().coeffs(), &[1]);
    }

    #[test]
    fn children_of_one_at_m8() {
        let esc = Escalator::new(8, 100).unwrap();
        let node = esc.node(&MGonalForm::new(8, vec![1]).unwrap()).unwrap();
        assert_eq!(node.truant().truant(), Some(2));
        let kids: Vec<Vec<u64>> = esc
            .children_of(&node)
            .unwrap()
            .iter()
            .map(|k| k.form().coeffs().to_vec())
            .collect();
        assert_eq!(kids, vec![vec![1, 1], vec![1, 2]]);
        for k in esc.children_of(&node).unwrap() {
            assert!(k.table().represents(2));
        }
    }

    #[test]
    fn leaf_has_no_children() {
        let esc = Escalator::new(3, 50).unwrap();
        let leaf = esc.node(&MGonalForm::new(3, vec![1, 1, 1]).unwrap()).unwrap();
        assert!(leaf.is_leaf());
        assert!(matches!(esc.children_of(&leaf), Err(Error::Contract(_))));
    }

    #[test]
    fn config_validation() {
        assert!(build_tree(10, &SearchConfig::with_bound(9)).is_err());
        let cfg = SearchConfig {
            node_budget: 0,
            ..SearchConfig::with_bound(100)
        };
        assert!(build_tree(10, &cfg).is_err());
        assert_eq!(SearchConfig::with_bound(100).l_m(32), 6);
    }

    #[test]
    fn budget_truncation_is_reported() {
        let cfg = SearchConfig {
            node_budget: 5,
            ..SearchConfig::with_bound(64)
        };
        let out = build_tree(4, &cfg).unwrap();
        assert!(out.report.truncated);
        assert_eq!(out.report.node_count, 5);
        assert!(leaf_census(&out, &LeafFilter::All).is_err());

        let cfg = SearchConfig {
            depth_budget: 2,
            ..SearchConfig::with_bound(64)
        };
        assert!(build_tree(4, &cfg).unwrap().report.truncated);
    }

    #[test]
    fn stabilize_with_zero_doublings_is_flagged() {
        let s = stabilize_gamma(3, 8, 0, &SearchConfig::default()).unwrap();
        assert!(!s.converged);
        assert_eq!(s.history.len(), 1);
        assert!(stabilize_gamma(10, 8, 2, &SearchConfig::default()).is_err());
    }

    #[test]
    fn census_filters() {
        let out = build_tree(3, &SearchConfig::with_bound(64)).unwrap();
        assert_eq!(leaf_census(&out, &LeafFilter::Rank(1)).unwrap().count(), 0);
        assert_eq!(
            leaf_census(&out, &LeafFilter::Prefix(vec![9])).unwrap().count(),
            0
        );
        let all = leaf_census(&out, &LeafFilter::All).unwrap();
        assert_eq!(all.count() as u64, out.report.leaf_count);
        assert_eq!(all.count_by_rank, out.report.leaf_count_by_rank);
    }
}
