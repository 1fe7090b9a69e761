use std::collections::BTreeSet;

use super::{AnalysisTag, ConstraintKind, ConstraintSet, PointsToResult, UnionFind, VarId};

/// Work deferred until a class gets a pointee.
#[derive(Debug, Clone, Copy)]
enum Pending {
    /// `dst`'s pointee absorbs this class's pointee.
    FlowTo(usize),
    /// `x = *this`
    LoadInto(usize),
    /// `*this = y`
    StoreFrom(usize),
}

/// Unification state: one class per variable, each with at most one
/// pointee class.
struct Solver {
    uf: UnionFind,
    pointee: Vec<Option<usize>>,
    pending: Vec<Vec<Pending>>,
}

impl Solver {
    fn new(n: usize) -> Self {
        let mut uf = UnionFind::default();
        for _ in 0..n {
            uf.add();
        }
        Self {
            uf,
            pointee: vec![None; n],
            pending: vec![Vec::new(); n],
        }
    }

    fn pt(&mut self, c: usize) -> Option<usize> {
        let r = self.uf.find(c);
        self.pointee[r].map(|p| self.uf.find(p))
    }

    fn set_pt(&mut self, c: usize, t: usize) {
        let r = self.uf.find(c);
        self.pointee[r] = Some(t);
        for w in std::mem::take(&mut self.pending[r]) {
            self.fire(r, w);
        }
    }

    /// Runs or queues `w` on class `c`.
    fn when_pointing(&mut self, c: usize, w: Pending) {
        if self.pt(c).is_some() {
            self.fire(c, w);
        } else {
            let r = self.uf.find(c);
            self.pending[r].push(w);
        }
    }

    fn fire(&mut self, c: usize, w: Pending) {
        let p = self.pt(c).expect("class has a pointee");
        match w {
            Pending::FlowTo(d) => self.flow(d, c),
            Pending::LoadInto(x) => self.flow(x, p),
            Pending::StoreFrom(y) => self.flow(p, y),
        }
    }

    /// `dst`'s pointee absorbs `src`'s, deferring while `src` has none.
    fn flow(&mut self, dst: usize, src: usize) {
        let Some(s) = self.pt(src) else {
            let r = self.uf.find(src);
            self.pending[r].push(Pending::FlowTo(dst));
            return;
        };
        match self.pt(dst) {
            None => self.set_pt(dst, s),
            Some(d) => self.join(d, s),
        }
    }

    fn join(&mut self, a: usize, b: usize) {
        let (a, b) = (self.uf.find(a), self.uf.find(b));
        if a == b {
            return;
        }
        let (pa, pb) = (self.pointee[a], self.pointee[b]);
        let mut waiting = std::mem::take(&mut self.pending[a]);
        waiting.append(&mut self.pending[b]);
        let r = self.uf.union(a, b);
        self.pointee[r] = pa.or(pb);
        if let (Some(x), Some(y)) = (pa, pb) {
            self.join(x, y);
        }
        for w in waiting {
            self.when_pointing(r, w);
        }
    }
}

/// Steensgaard's almost-linear unification analysis.
pub fn steensgaard(set: &ConstraintSet) -> PointsToResult {
    let n = set.len();
    let mut s = Solver::new(n);
    for c in &set.constraints {
        let (x, y) = (c.lhs.index(), c.rhs.index());
        match c.kind {
            ConstraintKind::AddressOf => match s.pt(x) {
                None => s.set_pt(x, y),
                Some(p) => s.join(p, y),
            },
            ConstraintKind::Copy => s.flow(x, y),
            ConstraintKind::Load => s.when_pointing(y, Pending::LoadInto(x)),
            ConstraintKind::Store => s.when_pointing(x, Pending::StoreFrom(y)),
        }
    }
    let class: Vec<usize> = (0..n).map(|v| s.uf.find(v)).collect();
    let sets = (0..n)
        .map(|v| match s.pt(v) {
            Some(p) => (0..n).filter(|&w| class[w] == p).map(|w| VarId(w as u32)).collect(),
            None => BTreeSet::new(),
        })
        .collect();
    PointsToResult {
        analysis: AnalysisTag::Steensgaard,
        variables: set.variables.clone(),
        sets,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::points_to::PointerConstraint;
    use ConstraintKind::*;

    fn named(n: usize, cs: &[(ConstraintKind, u32, u32)]) -> Vec<Vec<u32>> {
        let set = ConstraintSet::synthetic(
            n,
            cs.iter().map(|&(k, a, b)| PointerConstraint::new(k, a, b)).collect(),
        );
        steensgaard(&set)
            .sets
            .iter()
            .map(|s| s.iter().map(|v| v.0).collect())
            .collect()
    }

    #[test]
    fn copy_unifies_both_sides() {
        let r = named(4, &[(AddressOf, 0, 1), (AddressOf, 2, 3), (Copy, 0, 2)]);
        assert_eq!(r, vec![vec![1, 3], vec![], vec![1, 3], vec![]]);
    }

    #[test]
    fn pending_copy_resolves_later() {
        // v0 = v2 before v2 points anywhere
        let r = named(4, &[(Copy, 0, 2), (AddressOf, 2, 3)]);
        assert_eq!(r[0], vec![3]);
        assert_eq!(r[2], vec![3]);
        assert!(r[3].is_empty());
    }

    #[test]
    fn load_and_store() {
        // v0 = &v1; v1 = &v2; v3 = *v0; *v0 = v4 (v4 = &v5)
        let r = named(
            6,
            &[
                (AddressOf, 0, 1),
                (AddressOf, 1, 2),
                (Load, 3, 0),
                (AddressOf, 4, 5),
                (Store, 0, 4),
            ],
        );
        assert_eq!(r[3], vec![2, 5]);
        assert_eq!(r[1], vec![2, 5]);
    }

    #[test]
    fn no_constraints_means_empty_sets() {
        assert_eq!(named(2, &[]), vec![Vec::<u32>::new(), vec![]]);
    }
}
