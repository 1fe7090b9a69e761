//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.

mod support;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use cbugscan_core::checker::automaton::{check_unit, PropertyAutomaton};
use cbugscan_core::config::OutputFormat;
use cbugscan_core::frontend::parse;
use cbugscan_core::ir::TranslationUnit;
use cbugscan_core::points_to::{collect_constraints, shapiro_horowitz, steensgaard};
use cbugscan_core::report::{
    export, normalize, statistics, ErrorTrace, Importance, TraceStep, Triage, TriageDb,
};
use cbugscan_core::frontend::SourceLocation;

use support::andersen::andersen;
use support::paths::path_errors;
use support::{corpus, corpus_file, run, ALL_CHECKERS};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: Vec<Criterion> = vec![
        ("lock automaton regression", automaton_regression),
        ("three-lock deadlock regression", deadlock_regression),
        ("reachability regression", reachability_regression),
        ("lock statistics threshold grid", lockstat_grid),
        ("points-to precision sandwich", points_to_sandwich),
        ("streaming invisibility", streaming_invisibility),
        ("automaton fixpoint vs all paths", automaton_vs_paths),
        ("statistics arithmetic", statistics_arithmetic),
        ("checker isolation and determinism", isolation_and_determinism),
        ("planted-bug corpus", planted_corpus),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let t = Instant::now();
    let v = f();
    (v, t.elapsed())
}

fn automaton_regression() -> Outcome {
    let pciehp = corpus_file("regression/pciehp.c");
    let balanced = corpus_file("regression/balanced.c");
    let ((bad, _), t1) = timed(|| run(&["--checker", "automaton", &pciehp]));
    let ((good, _), t2) = timed(|| run(&["--checker", "automaton", &balanced]));
    ensure(bad.traces.len() == 1, || format!("pciehp: {} reports", bad.traces.len()))?;
    let t = &bad.traces[0];
    ensure(t.message.ends_with("held at exit"), || format!("unexpected message {:?}", t.message))?;
    ensure(
        t.steps.iter().any(|s| s.location.line == 13 && s.description.ends_with("is true")),
        || "trace does not take the true branch of the toggle test".into(),
    )?;
    ensure(good.traces.is_empty(), || format!("balanced: {} reports", good.traces.len()))?;
    ensure(t1 + t2 < Duration::from_secs(1), || format!("took {:?}", t1 + t2))?;
    Ok(format!("1 exit error through the true branch, 0 on balanced, {:?}", t1 + t2))
}

/// `a <- b <- c <- a` as (held, acquired) pairs.
fn cycle_edges(message: &str) -> Option<BTreeSet<(String, String)>> {
    let chain = message.split("cycle ").nth(1)?;
    let nodes: Vec<&str> = chain.split(" <- ").collect();
    (nodes.first() == nodes.last()).then(|| {
        nodes
            .windows(2)
            .map(|w| (w[0].to_string(), w[1].to_string()))
            .collect()
    })
}

fn deadlock_regression() -> Outcome {
    let file = corpus_file("regression/ecryptfs.c");
    let ((r, _), took) = timed(|| run(&["--checker", "thread", &file]));
    ensure(r.traces.len() == 1, || format!("{} reports", r.traces.len()))?;
    let got = cycle_edges(&r.traces[0].message).ok_or("message is not a cycle")?;
    let (ctx, hash, lists) = ("msg_ctx->mux", "ecryptfs_daemon_hash_mux", "ecryptfs_msg_ctx_lists_mux");
    let want: BTreeSet<(String, String)> = [(ctx, hash), (hash, lists), (lists, ctx)]
        .into_iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect();
    ensure(got == want, || format!("edges {got:?}"))?;
    ensure(took < Duration::from_secs(1), || format!("took {took:?}"))?;
    Ok(format!("one 3-cycle with the expected directions, {took:?}"))
}

fn reachability_regression() -> Outcome {
    let file = corpus_file("regression/semicolon.c");
    let (all, _) = run(&["--checker", "reach", &file]);
    let count = |imp: Importance, msg: &str, r: &[ErrorTrace]| {
        r.iter().filter(|t| t.importance == imp && t.message == msg).count()
    };
    ensure(all.traces.len() == 2, || format!("{} reports", all.traces.len()))?;
    ensure(count(Importance::Warning, "superfluous semicolon", &all.traces) == 1, || "no semicolon warning".into())?;
    ensure(count(Importance::Error, "unreachable code", &all.traces) == 1, || "no unreachable error".into())?;
    let (errors, _) = run(&["--checker", "reach", "--min-importance", "error", &file]);
    ensure(
        errors.traces.len() == 1 && errors.traces[0].importance == Importance::Error,
        || format!("--min-importance error kept {} reports", errors.traces.len()),
    )?;
    Ok("1 warning + 1 error; warning suppressed at --min-importance error".into())
}

fn lockstat_source(locked: usize, total: usize) -> String {
    let mut s = String::new();
    for i in 0..total {
        if i < locked {
            s += &format!("void w{i}(void) {{ mutex_lock(&m); shared = {i}; mutex_unlock(&m); }}\n");
        } else {
            s += &format!("void w{i}(void) {{ shared = {i}; }}\n");
        }
    }
    s
}

fn lockstat_grid() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut cells = 0;
    for total in 1..=12usize {
        for locked in 0..=total {
            let path = dir.path().join(format!("g_{locked}_{total}.c"));
            fs::write(&path, lockstat_source(locked, total)).map_err(|e| e.to_string())?;
            let (r, _) = run(&["--checker", "lockstat", path.to_str().unwrap()]);
            // 10 * locked >= 7 * total is locked/total >= 0.7 without rounding
            let expect = 10 * locked >= 7 * total && locked < total && total >= 5;
            let want = if expect { total - locked } else { 0 };
            ensure(r.traces.len() == want, || {
                format!("{locked}/{total}: {} reports, expected {want}", r.traces.len())
            })?;
            cells += 1;
        }
    }
    let (r, _) = run(&["--checker", "lockstat", &corpus_file("regression/lockstat_9of10.c")]);
    ensure(r.traces.len() == 1, || format!("9/10 fixture: {} reports", r.traces.len()))?;
    Ok(format!("{cells} grid cells match; 9/10 fixture gives 1 report"))
}

fn load_unit(path: &Path) -> Result<TranslationUnit, String> {
    let text = fs::read_to_string(path).map_err(|e| e.to_string())?;
    let ast = parse(&text, &path.display().to_string()).map_err(|e| e.to_string())?;
    TranslationUnit::build(path, ast).map_err(|e| e.to_string())
}

fn points_to_sandwich() -> Outcome {
    let mut files: Vec<_> = fs::read_dir(corpus().join("points_to"))
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "c"))
        .collect();
    files.sort();
    ensure(files.len() >= 10, || format!("only {} fixtures", files.len()))?;
    for file in &files {
        let name = file.file_name().unwrap().to_string_lossy().to_string();
        let set = collect_constraints(&load_unit(file)?);
        let n = set.len();
        ensure(n <= 8, || format!("{name}: {n} variables"))?;
        let oracle = andersen(&set);
        let st = steensgaard(&set);
        for k in [1, 2, 4, n.max(1)] {
            let sh = shapiro_horowitz(&set, k).map_err(|e| e.to_string())?;
            for (v, var) in set.variables.iter().enumerate() {
                ensure(oracle[v].is_subset(&sh.sets[v]), || format!("{name}: oracle not within k={k} at {var}"))?;
                ensure(sh.sets[v].is_subset(&st.sets[v]), || format!("{name}: k={k} not within unification at {var}"))?;
            }
            if k == 1 {
                ensure(sh.sets == st.sets, || format!("{name}: k=1 differs from unification"))?;
            }
            if k == n.max(1) {
                ensure(sh.sets == oracle, || format!("{name}: k=N differs from the oracle"))?;
            }
        }
    }
    Ok(format!("{} fixtures, k in {{1, 2, 4, N}}", files.len()))
}

fn corpus_args(extra: &[&str]) -> Vec<String> {
    let mut args: Vec<String> = ALL_CHECKERS.iter().map(|s| s.to_string()).collect();
    for d in ["planted", "regression", "points_to"] {
        args.push("--dir".into());
        args.push(corpus().join(d).display().to_string());
    }
    args.extend(extra.iter().map(|s| s.to_string()));
    args
}

fn run_owned(args: &[String]) -> (cbugscan_core::checker::JobResult, cbugscan_core::ir::ManagerStats) {
    let refs: Vec<&str> = args.iter().map(String::as_str).collect();
    run(&refs)
}

fn streaming_invisibility() -> Outcome {
    let (one, stats) = run_owned(&corpus_args(&["--memory-units", "1"]));
    let (unlimited, _) = run_owned(&corpus_args(&[]));
    let a = export(&one.traces, OutputFormat::Json);
    let b = export(&unlimited.traces, OutputFormat::Json);
    ensure(a == b, || "budget 1 and unlimited reports differ".into())?;
    ensure(stats.peak_resident <= 1, || format!("peak resident {}", stats.peak_resident))?;
    ensure(!one.traces.is_empty(), || "empty report".into())?;
    Ok(format!(
        "{} traces identical; peak resident {}, {} builds, {} evictions",
        one.traces.len(),
        stats.peak_resident,
        stats.pipeline_runs,
        stats.evictions
    ))
}

const FILE_AUTOMATON: &str = r#"automaton files
states C O D
start C
pattern opened "open(%F)"
pattern wrote "write(%F)"
pattern closed "close(%F)"
transition C opened -> O
transition O wrote -> D
transition D wrote -> D
transition O closed -> C
transition D closed -> C
error C wrote "write to closed %F"
error C closed "double close of %F"
error O opened "reopen of %F"
error-at-exit O "%F left open"
error-at-exit D "%F left open with pending writes"
"#;

fn random_block(rng: &mut StdRng, depth: usize, calls: &[&str], conds: &mut usize) -> String {
    let mut out = String::new();
    for _ in 0..rng.gen_range(1..=3) {
        let roll = rng.gen_range(0..10);
        if roll < 6 {
            out += calls[rng.gen_range(0..calls.len())];
        } else if roll < 7 {
            out += "x = 1;";
        } else if roll < 9 && depth < 2 {
            *conds += 1;
            let c = *conds;
            let then = random_block(rng, depth + 1, calls, conds);
            if rng.gen_bool(0.5) {
                let other = random_block(rng, depth + 1, calls, conds);
                out += &format!("if (c{c}) {{ {then} }} else {{ {other} }}");
            } else {
                out += &format!("if (c{c}) {{ {then} }}");
            }
        } else {
            out += "return;";
        }
        out.push(' ');
    }
    out
}

fn automaton_vs_paths() -> Outcome {
    let locks = PropertyAutomaton::lock_default();
    let files = PropertyAutomaton::parse(FILE_AUTOMATON).map_err(|e| e.to_string())?;
    let suites: [(&PropertyAutomaton, &[&str]); 2] = [
        (&locks, &["mutex_lock(&a);", "mutex_unlock(&a);", "mutex_lock(&b);", "mutex_unlock(&b);"]),
        (&files, &["open(f);", "write(f);", "close(f);", "open(g);", "close(g);"]),
    ];
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let (mut compared, mut with_errors) = (0, 0);
    for (automaton, calls) in suites {
        for _ in 0..400 {
            let body = random_block(&mut rng, 0, calls, &mut 0);
            let src = format!("void f(void) {{ {body} }}\n");
            let unit = TranslationUnit::build(Path::new("gen.c"), parse(&src, "gen.c").map_err(|e| e.to_string())?)
                .map_err(|e| e.to_string())?;
            let f = unit.function("f").unwrap();
            if f.cfg.len() > 12 {
                continue;
            }
            let want = path_errors(automaton, f);
            let got: BTreeSet<(SourceLocation, String)> = check_unit(automaton, &unit)
                .into_iter()
                .map(|t| (t.location().clone(), t.message.clone()))
                .collect();
            ensure(got == want, || format!("mismatch on `{src}`: checker {got:?}, paths {want:?}"))?;
            compared += 1;
            with_errors += usize::from(!want.is_empty());
        }
    }
    ensure(compared >= 200 && with_errors >= 50, || format!("too few fixtures ({compared}, {with_errors} with errors)"))?;
    Ok(format!("{compared} generated functions agree ({with_errors} with errors)"))
}

fn statistics_arithmetic() -> Outcome {
    // found, real, false positives, printed ratio
    let rows: [(&str, u64, u64, u64, &str); 6] = [
        ("pairing", 266, 65, 143, "31.3%"),
        ("pointers", 86, 48, 37, "56.5%"),
        ("deadlocks", 35, 16, 18, "47.1%"),
        ("lockstat", 13, 6, 7, "46.2%"),
        ("thread", 20, 9, 11, "45.0%"),
        ("reach", 31, 31, 0, "100.0%"),
    ];
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut db = TriageDb::open(dir.path().join("triage.tsv")).map_err(|e| e.to_string())?;
    let mut traces = Vec::new();
    for (checker, found, real, fp, _) in rows {
        for i in 0..found {
            let mut t = ErrorTrace::new(
                checker,
                Importance::Error,
                format!("finding {i}"),
                vec![TraceStep::new(SourceLocation::new("synthetic.c", i as u32 + 1, 1), "here")],
            );
            t.stamp(checker);
            let status = if i < real {
                Some(Triage::RealBug)
            } else if i < real + fp {
                Some(Triage::FalsePositive)
            } else {
                None
            };
            if let Some(s) = status {
                db.mark(&t.id, s, None).map_err(|e| e.to_string())?;
            }
            traces.push(t);
        }
    }
    let reopened = TriageDb::open(dir.path().join("triage.tsv")).map_err(|e| e.to_string())?;
    let stats = statistics(&traces, &reopened);
    for (checker, found, real, fp, ratio) in rows {
        let s = &stats.per_checker[checker];
        ensure(s.found == found && s.real == real && s.false_positive == fp, || format!("{checker}: counts {s:?}"))?;
        ensure(s.ratio() == ratio, || format!("{checker}: {} instead of {ratio}", s.ratio()))?;
    }
    Ok(format!(
        "six rows reproduced; overall {} of classified",
        stats.total.ratio()
    ))
}

fn isolation_and_determinism() -> Outcome {
    let (together, _) = run_owned(&corpus_args(&[]));
    let mut union = Vec::new();
    for name in ["automaton", "thread", "lockstat", "reach"] {
        let mut args = vec!["--checker".to_string(), name.to_string()];
        for d in ["planted", "regression", "points_to"] {
            args.push("--dir".into());
            args.push(corpus().join(d).display().to_string());
        }
        union.extend(run_owned(&args).0.traces);
    }
    normalize(&mut union);
    let joint = export(&together.traces, OutputFormat::Json);
    ensure(joint == export(&union, OutputFormat::Json), || "joint run differs from union of single runs".into())?;
    let (again, _) = run_owned(&corpus_args(&[]));
    for format in [OutputFormat::Json, OutputFormat::Xml, OutputFormat::Console] {
        ensure(export(&together.traces, format) == export(&again.traces, format), || {
            format!("{format:?} output differs between runs")
        })?;
    }
    let per_checker: BTreeMap<&str, usize> = together.traces.iter().fold(BTreeMap::new(), |mut m, t| {
        *m.entry(t.checker.as_str()).or_default() += 1;
        m
    });
    Ok(format!("{} traces {per_checker:?}", together.traces.len()))
}

fn planted_corpus() -> Outcome {
    let manifest = fs::read_to_string(corpus().join("planted/MANIFEST.tsv")).map_err(|e| e.to_string())?;
    let rows: Vec<Vec<&str>> = manifest
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| l.split('\t').collect())
        .collect();
    let mut files: Vec<String> = fs::read_dir(corpus().join("planted"))
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().file_name().to_string_lossy().to_string())
        .filter(|n| n.ends_with(".c"))
        .collect();
    files.sort();
    let listed: Vec<String> = rows.iter().map(|r| r[0].to_string()).collect();
    ensure(files == listed, || "manifest does not list each file exactly once".into())?;
    ensure(files.len() >= 20, || format!("{} files", files.len()))?;
    let checkers: BTreeSet<&str> = rows.iter().map(|r| r[1]).collect();
    ensure(checkers.len() == 4, || format!("checkers covered: {checkers:?}"))?;

    let dir = corpus().join("planted").display().to_string();
    let mut args: Vec<&str> = ALL_CHECKERS.to_vec();
    args.extend(["--dir", &dir]);
    let (r, _) = run(&args);
    let mut missed = Vec::new();
    for row in &rows {
        let (file, checker, line, prefix) = (row[0], row[1], row[2].parse::<u32>().unwrap(), row[3]);
        let hit = r.traces.iter().any(|t| {
            t.checker == checker
                && t.location().line == line
                && t.location().file.ends_with(file)
                && t.message.starts_with(prefix)
        });
        if !hit {
            missed.push(file);
        }
    }
    ensure(missed.is_empty(), || format!("false negatives: {missed:?}"))?;
    Ok(format!(
        "{} planted bugs over {} checkers, 0 false negatives, {} reports in total",
        rows.len(),
        checkers.len(),
        r.traces.len()
    ))
}
