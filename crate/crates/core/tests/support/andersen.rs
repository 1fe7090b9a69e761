//! Inclusion-based points-to solver used as the precision oracle. Written
//! against the constraint list only; shares no code with the analyses.

use std::collections::{BTreeSet, VecDeque};

use cbugscan_core::points_to::{ConstraintKind, ConstraintSet, VarId};

pub fn andersen(set: &ConstraintSet) -> Vec<BTreeSet<VarId>> {
    let n = set.len();
    let mut pts: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    // edge a -> b: pts(b) includes pts(a)
    let mut edges: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    let mut loads: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut stores: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut work: VecDeque<usize> = VecDeque::new();
    for c in &set.constraints {
        let (x, y) = (c.lhs.index(), c.rhs.index());
        match c.kind {
            ConstraintKind::AddressOf => {
                pts[x].insert(y);
                work.push_back(x);
            }
            ConstraintKind::Copy => {
                edges[y].insert(x);
                work.push_back(y);
            }
            ConstraintKind::Load => loads[y].push(x),
            ConstraintKind::Store => stores[x].push(y),
        }
    }
    while let Some(v) = work.pop_front() {
        let targets: Vec<usize> = pts[v].iter().copied().collect();
        for &w in &targets {
            for &x in &loads[v] {
                if edges[w].insert(x) {
                    work.push_back(w);
                }
            }
            for &y in &stores[v] {
                if edges[y].insert(w) {
                    work.push_back(y);
                }
            }
        }
        let outs: Vec<usize> = edges[v].iter().copied().collect();
        for d in outs {
            let before = pts[d].len();
            let add: Vec<usize> = pts[v].iter().copied().collect();
            pts[d].extend(add);
            if pts[d].len() != before {
                work.push_back(d);
            }
        }
    }
    pts.into_iter()
        .map(|s| s.into_iter().map(|v| VarId(v as u32)).collect())
        .collect()
}

/// Plain fixpoint over the four rules, for cross-checking the worklist.
pub fn andersen_naive(set: &ConstraintSet) -> Vec<BTreeSet<VarId>> {
    let n = set.len();
    let mut pts: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    loop {
        let old = pts.clone();
        for c in &set.constraints {
            let (x, y) = (c.lhs.index(), c.rhs.index());
            match c.kind {
                ConstraintKind::AddressOf => {
                    pts[x].insert(y);
                }
                ConstraintKind::Copy => {
                    let s = pts[y].clone();
                    pts[x].extend(s);
                }
                ConstraintKind::Load => {
                    for w in pts[y].clone() {
                        let s = pts[w].clone();
                        pts[x].extend(s);
                    }
                }
                ConstraintKind::Store => {
                    for w in pts[x].clone() {
                        let s = pts[y].clone();
                        pts[w].extend(s);
                    }
                }
            }
        }
        if pts == old {
            break;
        }
    }
    pts.into_iter()
        .map(|s| s.into_iter().map(|v| VarId(v as u32)).collect())
        .collect()
}
