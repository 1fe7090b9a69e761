//! Flow-insensitive may-points-to analysis over one unit: Steensgaard's
//! unification and the Shapiro-Horowitz refinement with k categories.
//!
//! Fields and array elements collapse onto their base variable. Locals are
//! named `function::name`; allocation calls yield one `heap@file:line:col`
//! object per call site.

mod constraints;
mod shapiro;
mod steensgaard;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write as _};

pub use constraints::collect_constraints;
pub use shapiro::{shapiro_horowitz, BadCategoryCount};
pub use steensgaard::steensgaard;

/// Index into [`ConstraintSet::variables`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConstraintKind {
    /// `lhs = &rhs`
    AddressOf,
    /// `lhs = rhs`
    Copy,
    /// `lhs = *rhs`
    Load,
    /// `*lhs = rhs`
    Store,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PointerConstraint {
    pub kind: ConstraintKind,
    pub lhs: VarId,
    pub rhs: VarId,
}

impl PointerConstraint {
    pub fn new(kind: ConstraintKind, lhs: u32, rhs: u32) -> Self {
        Self {
            kind,
            lhs: VarId(lhs),
            rhs: VarId(rhs),
        }
    }
}

/// Constraints over a numbered set of abstract variables. The numbering
/// is the order of first appearance and also fixes the categories used by
/// [`shapiro_horowitz`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ConstraintSet {
    pub variables: Vec<String>,
    pub constraints: Vec<PointerConstraint>,
}

impl ConstraintSet {
    /// Variables named `v0`, `v1`, ... for synthetic constraint lists.
    pub fn synthetic(n: usize, constraints: Vec<PointerConstraint>) -> Self {
        Self {
            variables: (0..n).map(|i| format!("v{i}")).collect(),
            constraints,
        }
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub(crate) fn intern(&mut self, name: &str) -> VarId {
        match self.variables.iter().position(|v| v == name) {
            Some(i) => VarId(i as u32),
            None => {
                self.variables.push(name.to_string());
                VarId(self.variables.len() as u32 - 1)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnalysisTag {
    Steensgaard,
    ShapiroHorowitz(usize),
}

impl fmt::Display for AnalysisTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnalysisTag::Steensgaard => f.write_str("steensgaard"),
            AnalysisTag::ShapiroHorowitz(k) => write!(f, "shapiro-horowitz(k={k})"),
        }
    }
}

/// Variable to may-pointees, for every variable of the constraint set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointsToResult {
    pub analysis: AnalysisTag,
    pub variables: Vec<String>,
    pub sets: Vec<BTreeSet<VarId>>,
}

impl PointsToResult {
    pub fn pointees(&self, v: VarId) -> &BTreeSet<VarId> {
        &self.sets[v.index()]
    }

    /// By name, for readable assertions.
    pub fn named(&self) -> BTreeMap<String, BTreeSet<String>> {
        self.variables
            .iter()
            .zip(&self.sets)
            .map(|(v, s)| {
                (
                    v.clone(),
                    s.iter().map(|p| self.variables[p.index()].clone()).collect(),
                )
            })
            .collect()
    }

    /// Whether every set is contained in the corresponding set of `other`.
    pub fn is_subset_of(&self, other: &PointsToResult) -> bool {
        self.sets
            .iter()
            .zip(&other.sets)
            .all(|(a, b)| a.is_subset(b))
    }

    /// `variable -> {a, b}` lines sorted by variable.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (v, s) in self.named() {
            let items: Vec<String> = s.into_iter().collect();
            let _ = writeln!(out, "{v} -> {{{}}}", items.join(", "));
        }
        out
    }
}

/// Union-find over abstract locations, shared by both analyses.
#[derive(Debug, Clone, Default)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    pub(crate) fn add(&mut self) -> usize {
        self.parent.push(self.parent.len());
        self.rank.push(0);
        self.parent.len() - 1
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[x] != root {
            let next = self.parent[x];
            self.parent[x] = root;
            x = next;
        }
        root
    }

    /// Merges two classes and returns the surviving root.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> usize {
        let (a, b) = (self.find(a), self.find(b));
        if a == b {
            return a;
        }
        let (hi, lo) = if self.rank[a] >= self.rank[b] { (a, b) } else { (b, a) };
        self.parent[lo] = hi;
        if self.rank[hi] == self.rank[lo] {
            self.rank[hi] += 1;
        }
        hi
    }
}
