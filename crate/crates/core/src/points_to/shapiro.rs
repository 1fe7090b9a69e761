use std::collections::BTreeSet;

use super::{AnalysisTag, ConstraintKind, ConstraintSet, PointsToResult, UnionFind, VarId};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("number of categories must be at least 1, got {0}")]
pub struct BadCategoryCount(pub usize);

/// One unification pass where pointees of different categories live in
/// separate slots and are never merged.
struct Round {
    uf: UnionFind,
    slots: Vec<Vec<Option<usize>>>,
    category: Vec<usize>,
}

impl Round {
    fn new(category: Vec<usize>, k: usize) -> Self {
        let mut uf = UnionFind::default();
        for _ in 0..category.len() {
            uf.add();
        }
        Self {
            uf,
            slots: vec![vec![None; k]; category.len()],
            category,
        }
    }

    fn slot(&mut self, c: usize, i: usize) -> Option<usize> {
        let r = self.uf.find(c);
        self.slots[r][i].map(|p| self.uf.find(p))
    }

    fn join(&mut self, a: usize, b: usize) -> bool {
        let (a, b) = (self.uf.find(a), self.uf.find(b));
        if a == b {
            return false;
        }
        let (sa, sb) = (self.slots[a].clone(), self.slots[b].clone());
        let r = self.uf.union(a, b);
        for i in 0..sa.len() {
            self.slots[r][i] = sa[i].or(sb[i]);
        }
        for i in 0..sa.len() {
            if let (Some(x), Some(y)) = (sa[i], sb[i]) {
                self.join(x, y);
            }
        }
        true
    }

    /// `dst`'s pointees absorb `src`'s, slot by slot.
    fn flow(&mut self, dst: usize, src: usize) -> bool {
        let mut changed = false;
        for i in 0..self.slots[0].len() {
            let Some(s) = self.slot(src, i) else { continue };
            match self.slot(dst, i) {
                None => {
                    let r = self.uf.find(dst);
                    self.slots[r][i] = Some(s);
                    changed = true;
                }
                Some(d) => changed |= self.join(d, s),
            }
        }
        changed
    }

    fn pointees(&mut self, c: usize) -> Vec<usize> {
        (0..self.slots[0].len()).filter_map(|i| self.slot(c, i)).collect()
    }

    fn solve(&mut self, set: &ConstraintSet) {
        loop {
            let mut changed = false;
            for c in &set.constraints {
                let (x, y) = (c.lhs.index(), c.rhs.index());
                match c.kind {
                    ConstraintKind::AddressOf => {
                        let i = self.category[y];
                        match self.slot(x, i) {
                            None => {
                                let r = self.uf.find(x);
                                self.slots[r][i] = Some(y);
                                changed = true;
                            }
                            Some(p) => changed |= self.join(p, y),
                        }
                    }
                    ConstraintKind::Copy => changed |= self.flow(x, y),
                    ConstraintKind::Load => {
                        for p in self.pointees(y) {
                            changed |= self.flow(x, p);
                        }
                    }
                    ConstraintKind::Store => {
                        for p in self.pointees(x) {
                            changed |= self.flow(p, y);
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }

    fn result(&mut self) -> Vec<BTreeSet<VarId>> {
        let n = self.category.len();
        let class: Vec<usize> = (0..n).map(|v| self.uf.find(v)).collect();
        (0..n)
            .map(|v| {
                let targets = self.pointees(v);
                (0..n)
                    .filter(|&w| targets.contains(&class[w]))
                    .map(|w| VarId(w as u32))
                    .collect()
            })
            .collect()
    }
}

/// Number of rounds so that any two variables get different categories in
/// at least one round: the digits of their index in base `k`.
fn rounds(n: usize, k: usize) -> u32 {
    if k == 1 {
        return 1;
    }
    let mut r = 1;
    while (k as u128).pow(r) < n as u128 {
        r += 1;
    }
    r
}

/// Shapiro-Horowitz analysis with `k` categories. Round `r` gives variable
/// `i` category `(i / k^r) % k`; the answer is the intersection over all
/// rounds. `k = 1` is Steensgaard's analysis and `k >= N` is Andersen's.
pub fn shapiro_horowitz(set: &ConstraintSet, k: usize) -> Result<PointsToResult, BadCategoryCount> {
    if k == 0 {
        return Err(BadCategoryCount(k));
    }
    let n = set.len();
    let mut sets: Option<Vec<BTreeSet<VarId>>> = None;
    for r in 0..rounds(n, k) {
        let div = (k as u128).pow(r);
        let category = (0..n).map(|i| ((i as u128 / div) % k as u128) as usize).collect();
        let mut round = Round::new(category, k);
        round.solve(set);
        let got = round.result();
        sets = Some(match sets {
            None => got,
            Some(prev) => prev
                .into_iter()
                .zip(got)
                .map(|(a, b)| a.intersection(&b).copied().collect())
                .collect(),
        });
    }
    Ok(PointsToResult {
        analysis: AnalysisTag::ShapiroHorowitz(k),
        variables: set.variables.clone(),
        sets: sets.unwrap_or_else(|| vec![BTreeSet::new(); n]),
    })
}
