mod support;

use std::fs;
use std::path::Path;

use cbugscan_core::frontend::parse;
use cbugscan_core::ir::TranslationUnit;
use cbugscan_core::points_to::{
    collect_constraints, shapiro_horowitz, steensgaard, ConstraintKind, ConstraintSet,
    PointerConstraint,
};
use proptest::prelude::*;

use support::andersen::{andersen, andersen_naive};
use support::corpus;

fn kind() -> impl Strategy<Value = ConstraintKind> {
    prop_oneof![
        Just(ConstraintKind::AddressOf),
        Just(ConstraintKind::Copy),
        Just(ConstraintKind::Load),
        Just(ConstraintKind::Store),
    ]
}

fn constraint_set(max_vars: u32) -> impl Strategy<Value = ConstraintSet> {
    (2..=max_vars).prop_flat_map(|n| {
        prop::collection::vec((kind(), 0..n, 0..n), 0..16).prop_map(move |cs| {
            ConstraintSet::synthetic(
                n as usize,
                cs.into_iter()
                    .map(|(k, a, b)| PointerConstraint::new(k, a, b))
                    .collect(),
            )
        })
    })
}

fn subset(a: &[std::collections::BTreeSet<cbugscan_core::points_to::VarId>], b: &[std::collections::BTreeSet<cbugscan_core::points_to::VarId>]) -> bool {
    a.iter().zip(b).all(|(x, y)| x.is_subset(y))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn worklist_oracle_matches_naive_fixpoint(set in constraint_set(8)) {
        prop_assert_eq!(andersen(&set), andersen_naive(&set));
    }

    #[test]
    fn categories_sit_between_inclusion_and_unification(set in constraint_set(8)) {
        let n = set.len();
        let oracle = andersen(&set);
        let st = steensgaard(&set);
        prop_assert!(subset(&oracle, &st.sets));
        for k in [1, 2, 3, 4, n] {
            let sh = shapiro_horowitz(&set, k).unwrap();
            prop_assert!(subset(&oracle, &sh.sets), "oracle not within k={}", k);
            prop_assert!(subset(&sh.sets, &st.sets), "k={} not within unification", k);
        }
        prop_assert_eq!(&shapiro_horowitz(&set, 1).unwrap().sets, &st.sets);
        prop_assert_eq!(&shapiro_horowitz(&set, n).unwrap().sets, &oracle);
        prop_assert_eq!(&shapiro_horowitz(&set, n + 5).unwrap().sets, &oracle);
    }

    #[test]
    fn constraint_order_does_not_matter(set in constraint_set(8), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut shuffled = set.clone();
        shuffled.constraints.shuffle(&mut rand::rngs::StdRng::seed_from_u64(seed));
        prop_assert_eq!(steensgaard(&set).sets, steensgaard(&shuffled).sets);
        for k in [1, 2, 4] {
            prop_assert_eq!(
                shapiro_horowitz(&set, k).unwrap().sets,
                shapiro_horowitz(&shuffled, k).unwrap().sets
            );
        }
    }
}

fn fixtures() -> Vec<(String, ConstraintSet)> {
    let mut files: Vec<_> = fs::read_dir(corpus().join("points_to"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "c"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| {
            let text = fs::read_to_string(&p).unwrap();
            let unit = TranslationUnit::build(Path::new("t.c"), parse(&text, "t.c").unwrap()).unwrap();
            (p.file_name().unwrap().to_string_lossy().into_owned(), collect_constraints(&unit))
        })
        .collect()
}

#[test]
fn more_categories_never_lose_precision_on_fixtures() {
    for (name, set) in fixtures() {
        let n = set.len();
        let mut prev = steensgaard(&set).sets;
        for k in 1..=n {
            let cur = shapiro_horowitz(&set, k).unwrap().sets;
            assert!(subset(&cur, &prev), "{name}: k={k} less precise than k={}", k - 1);
            prev = cur;
        }
    }
}

#[test]
fn fixture_results_by_name() {
    let all: std::collections::BTreeMap<_, _> = fixtures().into_iter().collect();
    let named = |file: &str, k: usize| shapiro_horowitz(&all[file], k).unwrap().named();
    let set = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<std::collections::BTreeSet<_>>();

    let r = named("pt01_copy.c", 4);
    assert_eq!(r["p"], set(&["x", "y"]));
    assert_eq!(r["q"], set(&["y"]));
    let r = named("pt04_store.c", 5);
    assert_eq!(r["p"], set(&["x", "y"]));
    assert_eq!(r["r"], set(&["y"]));
    let r = named("pt06_locals.c", 1);
    assert_eq!(r["f::p"], set(&["f::a"]));
    assert_eq!(r["h::p"], set(&["h::b"]));
    let st = steensgaard(&all["pt10_store_load.c"]).named();
    assert_eq!(st["r"], set(&["x", "y"]));
    let sh = named("pt10_store_load.c", 7);
    assert_eq!(sh["r"], set(&["y"]));
}

#[test]
fn zero_categories_is_an_error() {
    let (_, set) = fixtures().remove(0);
    assert!(shapiro_horowitz(&set, 0).is_err());
}
