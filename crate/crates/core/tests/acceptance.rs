// SPDX-License-Identifier: Apache-2.0

//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails. Tolerances are the constants below.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use ctv::circuitgen::{
    build_tree, column_heights, compress_def, compress_name, gen_goal_file, gen_pp, goal_file_for, mutate, pp_name,
    render_bitmatrix, row_count, Strategy, TreeSpec,
};
use ctv::normalizer::{check_goal, check_goal_with, Trace, Verdict};
use ctv::oracle::{check_equiv, check_product, eval_term, random_signed, Env, Mode, StepChecker};
use ctv::term::{parse_goal_file, parse_term, print_goal_file, sym, Defs, GoalFile, Term};

const GOLDEN_LIMIT: Duration = Duration::from_secs(1);
const SCALE_LIMIT: Duration = Duration::from_secs(10);
const SCALE_STRETCH: Duration = Duration::from_secs(1);
const ADD3_TRIPLES: usize = 100_000;
const STEP_ENVS: usize = 100;
const PRODUCT_LIMIT: Duration = Duration::from_secs(30);
const MIN_MUTATIONS: usize = 20;
const SIM_TRIALS: &str = "4096";
const SIZE_WIDTHS: [usize; 4] = [8, 16, 32, 64];
const SWEEP_WIDTHS: [usize; 6] = [2, 4, 8, 16, 32, 64];
const SWEEP_TRIALS: u64 = 1024;

struct Suite {
    failed: usize,
}

impl Suite {
    fn report(&mut self, id: &str, pass: bool, detail: String) {
        if !pass {
            self.failed += 1;
        }
        let tag = if pass { "PASS" } else { "FAIL" };
        println!("{tag} {id}: {detail}");
        let _ = std::io::stdout().flush();
    }
}

fn golden_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../golden").join(name)
}

fn load(path: &Path) -> GoalFile {
    parse_goal_file(&fs::read_to_string(path).unwrap()).unwrap()
}

fn verify(file: &GoalFile) -> (Verdict, Trace) {
    check_goal(file.goal.as_ref().unwrap(), &file.def_map())
}

fn secs(d: Duration) -> String {
    format!("{:.3} s", d.as_secs_f64())
}

/// Largest list size over the step records of a JSONL trace, and the bound
/// from its header.
fn trace_sizes(trace: &Trace) -> (usize, Option<usize>) {
    let mut buf = Vec::new();
    trace.write_jsonl("g", "v", &mut buf).unwrap();
    let mut max = 0;
    let mut bound = None;
    for line in String::from_utf8(buf).unwrap().lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        match v["type"].as_str() {
            Some("header") => bound = v["size_bound"].as_u64().map(|b| b as usize),
            Some("step") => {
                for k in ["size_before", "size_after"] {
                    max = max.max(v[k].as_u64().unwrap() as usize);
                }
            }
            _ => {}
        }
    }
    (max, bound)
}

fn golden(s: &mut Suite) {
    let path = golden_path("compress8x8.goal");
    let t0 = Instant::now();
    let file = load(&path);
    let (verdict, _) = verify(&file);
    let took = t0.elapsed();
    let mut out = Vec::new();
    let code = ctv::cli::run(["ctv", "verify", path.to_str().unwrap()], &mut out, &mut Vec::new());
    s.report(
        "1 golden-8x8",
        verdict == Verdict::Verified && code == 0 && took < GOLDEN_LIMIT,
        format!("{verdict}, exit {code}, {} (limit {})", secs(took), secs(GOLDEN_LIMIT)),
    );
}

fn scale(s: &mut Suite) {
    for strategy in [Strategy::Wallace, Strategy::Dadda] {
        let t0 = Instant::now();
        let file = gen_goal_file(&TreeSpec::new(64, strategy).unwrap());
        let (verdict, _) = verify(&file);
        let took = t0.elapsed();
        let stretch = if took <= SCALE_STRETCH { "met" } else { "missed" };
        s.report(
            &format!("2 scale-64x64-{strategy}"),
            verdict == Verdict::Verified && took <= SCALE_LIMIT,
            format!(
                "{verdict} in {} (limit {}; {} stretch {stretch})",
                secs(took),
                secs(SCALE_LIMIT),
                secs(SCALE_STRETCH)
            ),
        );
    }
}

fn size_bound(s: &mut Suite) {
    let mut worst = Vec::new();
    let mut ok = true;
    for w in SIZE_WIDTHS {
        for strategy in Strategy::ALL {
            let (verdict, trace) = verify(&gen_goal_file(&TreeSpec::new(w, strategy).unwrap()));
            let (max, header) = trace_sizes(&trace);
            let bound = w * 2 * w;
            ok &= verdict == Verdict::Verified && max <= bound && header == Some(bound);
            worst.push(format!("{strategy}{w} {max}/{bound}"));
        }
    }
    s.report("3 size-bound", ok, worst.join(", "));
}

fn add3(s: &mut Suite) {
    let sum = parse_term("(logxor x y z)").unwrap();
    let carry = parse_term("(logior (logand x y) (logand x z) (logand y z))").unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut failures = 0;
    let mut negatives = 0;
    for i in 0..ADD3_TRIPLES {
        // operand sizes cycle from 1 to 128 bits
        let bits = (i % 128) as u64 + 1;
        let vals: Vec<BigInt> = (0..3).map(|_| random_signed(&mut rng, bits)).collect();
        negatives += vals.iter().filter(|v| v.sign() == num_bigint::Sign::Minus).count();
        let env: Env = ["x", "y", "z"]
            .iter()
            .map(|n| sym(n))
            .zip(vals.iter().cloned())
            .collect();
        let sv = eval_term(&sum, &env).unwrap();
        let cv = eval_term(&carry, &env).unwrap();
        if sv + 2 * cv != &vals[0] + &vals[1] + &vals[2] {
            failures += 1;
        }
    }
    s.report(
        "4 add3-identity",
        failures == 0 && negatives > 0,
        format!("{ADD3_TRIPLES} triples, {negatives} negative operands, {failures} failures"),
    );
}

fn step_soundness(s: &mut Suite) {
    let goals = [
        ("golden-8x8", load(&golden_path("compress8x8.goal"))),
        (
            "linear-16x16",
            gen_goal_file(&TreeSpec::new(16, Strategy::Linear).unwrap()),
        ),
        (
            "dadda-16x16",
            gen_goal_file(&TreeSpec::new(16, Strategy::Dadda).unwrap()),
        ),
    ];
    for (name, file) in goals {
        let t0 = Instant::now();
        let mut checker = StepChecker::new(STEP_ENVS, 5);
        let (verdict, trace) = check_goal_with(file.goal.as_ref().unwrap(), &file.def_map(), &mut checker);
        s.report(
            &format!("5 step-soundness-{name}"),
            verdict == Verdict::Verified && checker.failures.is_empty() && checker.checked == trace.steps.len(),
            format!(
                "{} steps x {STEP_ENVS} envs, {} violations, {}",
                checker.checked,
                checker.failures.len(),
                secs(t0.elapsed())
            ),
        );
    }
}

fn products(s: &mut Suite) {
    let t0 = Instant::now();
    let mut bad = Vec::new();
    let mut cases = 0;
    for w in 2..=5usize {
        let (pp_defs, binds) = gen_pp(w).unwrap();
        for strategy in Strategy::ALL {
            let mut defs: Defs = pp_defs.iter().map(|d| (d.name.clone(), d.clone())).collect();
            let def = compress_def(&build_tree(&TreeSpec::new(w, strategy).unwrap()));
            defs.insert(def.name.clone(), def);
            let call = Term::Call(compress_name(), (0..w).map(|j| Term::Var(pp_name(j))).collect());
            match check_product(&call, &binds, &sym("a"), &sym("b"), w as u32, &defs) {
                Ok(o) if o.is_equivalent() => cases += 1u64 << (2 * w),
                other => bad.push(format!("{strategy}{w}: {other:?}")),
            }
        }
    }
    let took = t0.elapsed();
    s.report(
        "6 exhaustive-products",
        bad.is_empty() && took < PRODUCT_LIMIT,
        format!(
            "{cases} input pairs over widths 2-5 x 3 trees in {} (limit {}){}",
            secs(took),
            secs(PRODUCT_LIMIT),
            if bad.is_empty() {
                String::new()
            } else {
                format!("; {}", bad.join("; "))
            }
        ),
    );
}

/// Runs `ctv sim` on `file` and returns the exit code and standard output.
fn sim(file: &GoalFile) -> (i32, String) {
    let mut tmp = tempfile::NamedTempFile::new().unwrap();
    tmp.write_all(print_goal_file(file).as_bytes()).unwrap();
    let path = tmp.path().to_str().unwrap().to_string();
    let mut out = Vec::new();
    let args = [
        "ctv", "sim", &path, "--mode", "random", "--trials", SIM_TRIALS, "--seed", "11",
    ];
    let code = ctv::cli::run(args, &mut out, &mut Vec::new());
    (code, String::from_utf8(out).unwrap())
}

fn mutations(s: &mut Suite) {
    let mut changed = 0;
    let mut escaped = Vec::new();
    let mut reorders = 0;
    let mut broken = Vec::new();
    for strategy in Strategy::ALL {
        let tree = build_tree(&TreeSpec::new(4, strategy).unwrap());
        let def = compress_def(&tree);
        let out_width = tree.spec.out_width() as u64;
        for m in mutate::mutations(&def) {
            let Some(mutant) = mutate::apply(&def, m, out_width) else {
                continue;
            };
            let file = goal_file_for(&tree, mutant);
            let (verdict, _) = verify(&file);
            if m.changes_value() {
                changed += 1;
                let (code, text) = sim(&file);
                if verdict.is_verified() || code != 1 || !text.starts_with("Counterexample") {
                    escaped.push(format!("{strategy}/{m}: {}, sim exit {code}", verdict.label()));
                }
            } else {
                reorders += 1;
                if !verdict.is_verified() {
                    broken.push(format!("{strategy}/{m}: {}", verdict.label()));
                }
            }
        }
    }
    s.report(
        "7a value-changing-mutations",
        changed >= MIN_MUTATIONS && escaped.is_empty(),
        format!(
            "{changed} mutations (minimum {MIN_MUTATIONS}), {} escaped{}",
            escaped.len(),
            if escaped.is_empty() {
                String::new()
            } else {
                format!(": {}", escaped.join("; "))
            }
        ),
    );
    s.report(
        "7b equivalent-reorderings",
        reorders > 0 && broken.is_empty(),
        format!(
            "{reorders} reorderings, {} not verified{}",
            broken.len(),
            if broken.is_empty() {
                String::new()
            } else {
                format!(": {}", broken.join("; "))
            }
        ),
    );
}

fn hypotheses(s: &mut Suite) {
    let file = load(&golden_path("compress8x8.goal"));
    let goal = file.goal.as_ref().unwrap();
    let mut wrong = Vec::new();
    for (i, h) in goal.hyps.iter().enumerate() {
        let mut g = goal.clone();
        g.hyps.remove(i);
        let (verdict, _) = check_goal(&g, &file.def_map());
        if verdict != Verdict::MissingHyps(vec![h.var.clone()]) {
            wrong.push(format!("without {}: {verdict}", h.var));
        }
    }
    s.report(
        "8 missing-hypotheses",
        goal.hyps.len() == 8 && wrong.is_empty(),
        format!(
            "{} single deletions, {} misreported {}",
            goal.hyps.len(),
            wrong.len(),
            wrong.join("; ")
        ),
    );
}

fn diagram(s: &mut Suite) {
    let want: Vec<usize> = (1..=8).chain((1..=7).rev()).collect();
    let mut notes = Vec::new();
    let mut ok = true;
    for strategy in Strategy::ALL {
        let tree = build_tree(&TreeSpec::new(8, strategy).unwrap());
        let text = render_bitmatrix(&tree, 0).unwrap();
        // count dots per column straight from the picture, LSB on the right
        let width = text.lines().map(str::len).max().unwrap_or(0);
        let mut drawn = vec![0usize; width];
        for line in text.lines() {
            for (i, ch) in line.chars().enumerate() {
                if ch == '*' {
                    drawn[width - 1 - i] += 1;
                }
            }
        }
        while drawn.last() == Some(&0) {
            drawn.pop();
        }
        let heights = column_heights(&tree, 0).unwrap();
        let last = tree.stages.len() - 1;
        let rows = row_count(&tree, last).unwrap();
        let top: Vec<usize> = heights.iter().copied().take_while(|&h| h > 0).collect();
        ok &= drawn == want && top == want && rows == 2;
        notes.push(format!("{strategy}: stage 0 {drawn:?}, stage {last} has {rows} rows"));
    }
    s.report("9 stage-diagram-rhombus", ok, notes.join("; "));
}

fn sweep(s: &mut Suite) {
    let mut bad = Vec::new();
    let mut goals = 0;
    for w in SWEEP_WIDTHS {
        for strategy in Strategy::ALL {
            for tight in [false, true] {
                let spec = TreeSpec::new(w, strategy).unwrap().tight(tight);
                let file = gen_goal_file(&spec);
                let goal = file.goal.as_ref().unwrap();
                let (verdict, _) = verify(&file);
                let vars: Vec<_> = (0..w).map(|j| (pp_name(j), 2 * w as u32)).collect();
                let mode = Mode::Random {
                    trials: SWEEP_TRIALS,
                    seed: w as u64,
                };
                let sim = check_equiv(&goal.lhs, &goal.rhs, &vars, mode, &file.def_map());
                goals += 1;
                if !verdict.is_verified() || !sim.as_ref().is_ok_and(|o| o.is_equivalent()) {
                    bad.push(format!("{}: {verdict}, {sim:?}", spec.goal_name()));
                }
            }
        }
    }
    s.report(
        "generated-goals",
        bad.is_empty(),
        format!(
            "{goals} goals verified and equivalent on {SWEEP_TRIALS} random inputs{}",
            if bad.is_empty() {
                String::new()
            } else {
                format!("; {}", bad.join("; "))
            }
        ),
    );
}

fn main() -> ExitCode {
    let mut s = Suite { failed: 0 };
    golden(&mut s);
    scale(&mut s);
    size_bound(&mut s);
    add3(&mut s);
    step_soundness(&mut s);
    products(&mut s);
    mutations(&mut s);
    hypotheses(&mut s);
    diagram(&mut s);
    sweep(&mut s);
    println!("acceptance: {} failed", s.failed);
    if s.failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
