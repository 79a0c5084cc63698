//! Acceptance run: one PASS/FAIL line per criterion.

use std::process::ExitCode;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use annostream::extension::{grid_eval, grid_len, unit_impulse, ImpulseTable, PointSketch, ShapeConfig};
use annostream::field::{rng_for, Substream};
use annostream::gen::{generate, instance_for_scheme, random_cross_sets, random_induced_sets, GenKind, GenOptions};
use annostream::graphapps::matching_certificate;
use annostream::oracle::{odd_components_without, oracle_bfs, oracle_matching, DenseGraph};
use annostream::protocol::{run_adversarial, run_honest, verify_transcript, Instance, MutationPolicy, Scheme, Tuning, Verdict};
use annostream::registry::{build_scheme, SCHEME_NAMES};
use annostream::setops::Fingerprint;
use annostream::sssp::SsspUnweighted;
use annostream::{Fe, FieldConfig};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(failures: &[String], ok_detail: String) -> Outcome {
    match failures.first() {
        None => Outcome { pass: true, detail: ok_detail },
        Some(f) => Outcome { pass: false, detail: format!("{} failure(s); first: {f}", failures.len()) },
    }
}

fn completeness() -> Outcome {
    let mut failures = Vec::new();
    let mut runs = 0;
    for name in SCHEME_NAMES {
        for i in 0..200u64 {
            let n = [8, 12, 16][(i % 3) as usize];
            let inst = instance_for_scheme(name, n, i).expect("known scheme");
            let scheme = build_scheme(name, Tuning::balanced(n)).expect("known scheme");
            runs += 1;
            match run_honest(scheme.as_ref(), &inst, i) {
                Ok(r) => match r.outcome.result {
                    Verdict::Output(a) if scheme.is_correct(&inst, &a) => {}
                    Verdict::Output(a) => failures.push(format!("{name} n={n} seed={i}: wrong output {a}")),
                    Verdict::Reject(rej) => failures.push(format!("{name} n={n} seed={i}: rejected ({rej})")),
                },
                Err(e) => failures.push(format!("{name} n={n} seed={i}: {e}")),
            }
        }
    }
    outcome(&failures, format!("{runs} honest runs, all outputs match the oracles"))
}

fn soundness() -> Outcome {
    let mut failures = Vec::new();
    let mut worst = (0.0f64, String::new());
    let n = 12;
    for name in SCHEME_NAMES {
        let scheme = build_scheme(name, Tuning::balanced(n)).expect("known scheme");
        for policy in scheme.policies() {
            if policy == MutationPolicy::Honest {
                continue;
            }
            let (mut trials, mut wrong) = (0usize, 0usize);
            for k in 0..5u64 {
                let inst = instance_for_scheme(name, n, 1000 + k).expect("known scheme");
                let p = scheme.field(&inst).expect("field").modulus();
                if p <= (n as u64).pow(3) {
                    failures.push(format!("{name}: modulus {p} is not above n^3"));
                }
                let stats = run_adversarial(scheme.as_ref(), &inst, policy, 100, 77 + k).expect("trials");
                trials += stats.trials;
                wrong += stats.accepts_wrong;
            }
            let rate = wrong as f64 / trials as f64;
            if rate > worst.0 || worst.1.is_empty() {
                worst = (rate, format!("{name}/{}", policy.name()));
            }
            if rate > 0.02 {
                failures.push(format!("{name}/{}: accepts_wrong {wrong}/{trials}", policy.name()));
            }
        }
    }
    outcome(&failures, format!("500 trials per scheme and policy; worst accepts_wrong rate {:.4} ({})", worst.0, worst.1))
}

const GRID_N: usize = 64;
const GRID_T: [usize; 7] = [1, 2, 4, 8, 16, 32, 64];

struct GridRun {
    name: &'static str,
    t: usize,
    s: usize,
    hcost: usize,
    vcost: usize,
    inst: Instance,
}

fn grid_instances() -> Vec<(&'static str, Instance)> {
    let n = GRID_N;
    let gnp = generate(GenKind::Gnp, n, 5, &GenOptions { p: 0.3, max_weight: 1 });
    let mut sparse = generate(GenKind::Gnp, n, 6, &GenOptions { p: 0.08, max_weight: 1 });
    sparse.source = Some(1);
    let mut weighted = generate(GenKind::WeightedGnp, n, 7, &GenOptions { p: 0.1, max_weight: 4 });
    weighted.source = Some(1);
    vec![
        ("tri-laconic", gnp.clone().into()),
        ("tri-frugal", gnp.clone().into()),
        ("edgecount-induced", Instance::with_sets(gnp.clone(), random_induced_sets(n, 3, 5))),
        ("edgecount-cross", Instance::with_sets(gnp.clone(), random_cross_sets(n, 3, 5))),
        ("sssp-unweighted", sparse.into()),
        ("sssp-wturnstile", weighted.clone().into()),
        ("sssp-wvanilla", weighted.into()),
    ]
}

fn grid_runs() -> Result<Vec<GridRun>, String> {
    let mut out = Vec::new();
    for (name, inst) in grid_instances() {
        for t in GRID_T {
            let s = GRID_N / t;
            let scheme = build_scheme(name, Tuning::new(t, s)).expect("known scheme");
            let r = run_honest(scheme.as_ref(), &inst, 3).map_err(|e| format!("{name} t={t}: {e}"))?;
            if r.outcome.is_reject() {
                return Err(format!("{name} t={t}: honest run rejected"));
            }
            out.push(GridRun { name, t, s, hcost: r.transcript.element_count(), vcost: r.outcome.vcost_elements, inst: inst.clone() });
        }
    }
    Ok(out)
}

fn transcript_sizes(runs: &[GridRun]) -> Outcome {
    let n = GRID_N;
    let mut failures = Vec::new();
    let mut checked = 0;
    for r in runs {
        let t = r.t;
        let (ok, bound) = match r.name {
            "tri-laconic" => (r.hcost == 2 * t - 1, format!("== {}", 2 * t - 1)),
            "tri-frugal" => {
                let b = (2 * t - 1).pow(2) * (2 * n - 1);
                (r.hcost <= b, format!("<= {b}"))
            }
            "edgecount-induced" | "edgecount-cross" => {
                let b = (2 * t - 1).pow(2);
                (r.hcost <= b, format!("<= {b}"))
            }
            "sssp-unweighted" => {
                let src = r.inst.graph.source.unwrap_or(1);
                let depth = oracle_bfs(&DenseGraph::from_instance(&r.inst.graph), src).into_iter().flatten().max().unwrap_or(0) as usize;
                // one header scalar per round covers the depth block
                let b = depth * (n * (2 * t - 1) + n + 1) + n;
                (r.hcost <= b, format!("<= {b} (D={depth})"))
            }
            _ => continue,
        };
        checked += 1;
        if !ok {
            failures.push(format!("{} t={t}: hcost {} not {bound}", r.name, r.hcost));
        }
    }
    outcome(&failures, format!("{checked} grid points at n={n}, t in {GRID_T:?}"))
}

fn space_budgets(runs: &[GridRun]) -> Outcome {
    const C: usize = 40;
    let n = GRID_N;
    let mut failures = Vec::new();
    let mut checked = 0;
    for r in runs {
        let s = r.s;
        let bound = match r.name {
            "tri-laconic" => n * s + C,
            "tri-frugal" => 2 * s + C,
            "edgecount-induced" | "edgecount-cross" => s * s + 4 * s + C,
            "sssp-unweighted" => 2 * s + C,
            "sssp-wturnstile" => 5 * n,
            "sssp-wvanilla" => {
                let w = r.inst.graph.effective_weight_bound().unwrap_or(1) as usize;
                6 * w * n
            }
            _ => continue,
        };
        checked += 1;
        if r.vcost > bound {
            failures.push(format!("{} t={} s={s}: peak {} > {bound}", r.name, r.t, r.vcost));
        }
    }
    outcome(&failures, format!("{checked} grid points; additive constant {C}, C*n with C=5, C*W*n with C=6"))
}

fn tradeoff() -> Outcome {
    let n = GRID_N;
    let gnp = generate(GenKind::Gnp, n, 11, &GenOptions { p: 0.3, max_weight: 1 });
    let cases: Vec<(&str, Instance)> = vec![
        ("edgecount-induced", Instance::with_sets(gnp.clone(), random_induced_sets(n, 3, 11))),
        ("maxmatch-frugal", gnp.into()),
    ];
    let mut failures = Vec::new();
    let mut notes = Vec::new();
    for (name, inst) in cases {
        let mut hs = Vec::new();
        let mut vs = Vec::new();
        let mut ps = Vec::new();
        for t in GRID_T {
            let scheme = build_scheme(name, Tuning::new(t, n / t)).expect("known scheme");
            let r = match run_honest(scheme.as_ref(), &inst, 9) {
                Ok(r) if !r.outcome.is_reject() => r,
                _ => {
                    failures.push(format!("{name} t={t}: honest run failed"));
                    continue;
                }
            };
            hs.push(r.cost.hbits as f64);
            vs.push(r.cost.vbits as f64);
            ps.push(r.cost.product_bits as f64);
        }
        let spread = |x: &[f64]| x.iter().cloned().fold(f64::MIN, f64::max) / x.iter().cloned().fold(f64::MAX, f64::min);
        let (sh, sv, sp) = (spread(&hs), spread(&vs), spread(&ps));
        notes.push(format!("{name}: h x{sh:.1}, v x{sv:.1}, product x{sp:.1}"));
        if sh < 16.0 || sv < 16.0 {
            failures.push(format!("{name}: individual costs vary only x{sh:.1} / x{sv:.1}"));
        }
        if sp > 8.0 {
            failures.push(format!("{name}: product varies x{sp:.1} across the grid"));
        }
    }
    let mut o = outcome(&failures, notes.join("; "));
    if !o.pass {
        o.detail = format!("{} [{}]", o.detail, notes.join("; "));
    }
    o
}

fn micro_invariants() -> Outcome {
    let mut failures = Vec::new();
    let f = FieldConfig::new(1_000_000_007).expect("prime");
    let mut rng = ChaCha8Rng::seed_from_u64(2024);

    // unit impulses: indicators on the grid, partition of unity off it
    for s in 1..=16 {
        let table = ImpulseTable::new(f, s);
        for u in 1..=s {
            for x in 1..=s {
                let want = if u == x { f.one() } else { f.zero() };
                if unit_impulse(u, f.elem(x as u64), s, &f).expect("in domain") != want {
                    failures.push(format!("delta_{u}({x}) over [{s}]"));
                }
            }
        }
        for _ in 0..20 {
            let x = f.random(&mut rng);
            let direct: Vec<Fe> = (1..=s).map(|u| unit_impulse(u, x, s, &f).expect("in domain")).collect();
            if direct != table.eval_all(x) || direct.iter().fold(f.zero(), |a, &b| a + b) != f.one() {
                failures.push(format!("impulse identities over [{s}] at {x}"));
            }
        }
    }

    // sketches against dense interpolation
    for trial in 0..200 {
        let dims = vec![rng.random_range(1..6usize), rng.random_range(1..6usize)];
        let point = vec![f.random(&mut rng), f.random(&mut rng)];
        let mut sketch = PointSketch::new(&f, dims.clone(), point.clone()).expect("arity");
        let mut dense = vec![f.zero(); dims[0] * dims[1]];
        for _ in 0..rng.random_range(0..30) {
            let (x, y) = (rng.random_range(1..=dims[0]), rng.random_range(1..=dims[1]));
            let d = f.from_i64(rng.random_range(-4..5));
            sketch.update(&[x, y], d).expect("in domain");
            dense[(x - 1) * dims[1] + (y - 1)] += d;
        }
        let degrees: Vec<usize> = dims.iter().map(|d| d - 1).collect();
        assert_eq!(grid_len(&degrees), dense.len());
        if grid_eval(f, &degrees, &dense, &point).expect("shape") != sketch.value() {
            failures.push(format!("sketch vs dense, trial {trial}"));
        }
    }

    // fingerprints ignore order
    for trial in 0..200 {
        let r = f.random(&mut rng);
        let mut items: Vec<(u64, i64)> = (0..rng.random_range(0..40)).map(|_| (rng.random_range(1..=64), rng.random_range(-3..4))).collect();
        let mut a = Fingerprint::new(r, 64);
        for &(i, d) in &items {
            a.update(i, f.from_i64(d)).expect("index");
        }
        items.shuffle(&mut rng);
        let mut b = Fingerprint::new(r, 64);
        for &(i, d) in &items {
            b.update(i, f.from_i64(d)).expect("index");
        }
        if a.value() != b.value() {
            failures.push(format!("fingerprint order, trial {trial}"));
        }
    }

    // shaping round trips
    for n in 1..=200 {
        for s in 1..=20 {
            let shape = ShapeConfig::with_s(n, s).expect("shape");
            for v in 1..=n {
                let (x, y) = shape.shape(v).expect("in range");
                if shape.unshape(x, y).ok() != Some(v) {
                    failures.push(format!("shape n={n} s={s} v={v}"));
                }
            }
        }
    }

    // Tutte-Berge over every U for small graphs
    let mut certificates = 0;
    for seed in 0..60u64 {
        let n = 4 + (seed % 7) as usize;
        let g = generate(GenKind::Gnp, n, seed, &GenOptions { p: [0.2, 0.35, 0.5][(seed % 3) as usize], max_weight: 1 });
        let dense = DenseGraph::from_instance(&g);
        let edges: Vec<(u32, u32)> = g.final_edges().into_iter().map(|(u, v, _)| (u, v)).collect();
        let cert = matching_certificate(n, &edges);
        let nu = oracle_matching(&dense).expect("small graph");
        if cert.size() != nu {
            failures.push(format!("matching size n={n} seed={seed}"));
        }
        let mut best = usize::MAX;
        for mask in 0u32..(1 << n) {
            let u: Vec<u32> = (0..n as u32).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect();
            let val = u.len() + n - odd_components_without(&dense, &u);
            if 2 * nu > val {
                failures.push(format!("weak duality n={n} seed={seed} U={u:?}"));
            }
            best = best.min(val);
        }
        let star = cert.tutte.len() + n - odd_components_without(&dense, &cert.tutte);
        if best != 2 * nu || star != 2 * nu {
            failures.push(format!("Tutte-Berge equality n={n} seed={seed}"));
        }
        certificates += 1;
    }

    // distance labels: every perturbation is rejected
    let mut perturbations = 0;
    for seed in 0..12u64 {
        let n = 4 + (seed % 5) as usize;
        let mut g = generate(GenKind::Gnp, n, 300 + seed, &GenOptions { p: 0.35, max_weight: 1 });
        g.source = Some(1 + (seed % n as u64) as u32);
        let inst: Instance = g.into();
        let scheme = SsspUnweighted { tuning: Tuning::balanced(n) };
        let field = scheme.field(&inst).expect("field");
        let truth = oracle_bfs(&DenseGraph::from_instance(&inst.graph), inst.graph.source.expect("set"));
        let choices: Vec<Option<u64>> = (0..n as u64).map(Some).chain([None]).collect();
        let check = |labels: &[Option<u64>], k: u64| {
            let tr = scheme.transcript(&inst, &field, labels);
            let out = verify_transcript(&scheme, &inst, field, &tr, rng_for(k, Substream::Verifier));
            match out.result {
                Verdict::Reject(_) => labels != truth.as_slice(),
                Verdict::Output(_) => labels == truth.as_slice(),
            }
        };
        if n <= 5 {
            let total = choices.len().pow(n as u32);
            for code in 0..total {
                let mut c = code;
                let labels: Vec<Option<u64>> = (0..n)
                    .map(|_| {
                        let l = choices[c % choices.len()];
                        c /= choices.len();
                        l
                    })
                    .collect();
                perturbations += 1;
                if !check(&labels, code as u64) {
                    failures.push(format!("labels {labels:?} on n={n} seed={seed}"));
                }
            }
        } else {
            for v in 0..n {
                for &l in &choices {
                    let mut labels = truth.clone();
                    labels[v] = l;
                    perturbations += 1;
                    if !check(&labels, (v * 31) as u64 + l.unwrap_or(99)) {
                        failures.push(format!("label {l:?} at vertex {} on n={n} seed={seed}", v + 1));
                    }
                }
            }
        }
    }

    outcome(
        &failures,
        format!("impulse, sketch, fingerprint and shaping suites; {certificates} Tutte-Berge enumerations; {perturbations} label vectors"),
    )
}

fn report(name: &str, start: Instant, o: Outcome, all: &mut bool) {
    *all &= o.pass;
    let tag = if o.pass { "PASS" } else { "FAIL" };
    println!("{tag} {name}: {} ({:.1}s)", o.detail, start.elapsed().as_secs_f64());
}

fn main() -> ExitCode {
    let mut all = true;
    let t0 = Instant::now();
    report("completeness", t0, completeness(), &mut all);
    let t0 = Instant::now();
    report("soundness", t0, soundness(), &mut all);
    let t0 = Instant::now();
    match grid_runs() {
        Ok(runs) => {
            report("transcript sizes", t0, transcript_sizes(&runs), &mut all);
            report("space budgets", t0, space_budgets(&runs), &mut all);
        }
        Err(e) => {
            report("transcript sizes", t0, Outcome { pass: false, detail: e.clone() }, &mut all);
            report("space budgets", t0, Outcome { pass: false, detail: e }, &mut all);
        }
    }
    let t0 = Instant::now();
    report("tradeoff curve", t0, tradeoff(), &mut all);
    let t0 = Instant::now();
    report("micro-invariants", t0, micro_invariants(), &mut all);
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
