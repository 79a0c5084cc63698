use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;
use std::process::ExitCode;

use annostream::field::{rng_for, Substream};
use annostream::gen::{generate, instance_for_scheme, GenKind, GenOptions};
use annostream::protocol::{
    cost_report, cost_sweep, costs_csv, run_adversarial, verify_transcript, Instance, MutationPolicy, Scheme, TrialStats, Tuning,
    Verdict,
};
use annostream::registry::{build_scheme, SCHEME_NAMES};
use annostream::stream::{parse_stream, read_binary_stream, write_stream, ProofTranscript, SetFamily};

use crate::plot::write_svg;
use crate::{AttackArgs, Common, GenArgs, RunArgs, Shape, SweepArgs};

pub const MODULUS_ENV: &str = "ANNOSTREAM_MODULUS";

type Result<T> = std::result::Result<T, String>;

fn modulus(c: &Common) -> Result<Option<u64>> {
    if c.modulus.is_some() {
        return Ok(c.modulus);
    }
    match std::env::var(MODULUS_ENV) {
        Ok(v) if !v.trim().is_empty() => v.trim().parse().map(Some).map_err(|_| format!("{MODULUS_ENV}={v} is not an integer")),
        _ => Ok(None),
    }
}

fn load_instance(c: &Common) -> Result<Instance> {
    let graph = match (&c.input, c.n) {
        (Some(path), _) => {
            if path.extension().is_some_and(|e| e == "bin") {
                let f = File::open(path).map_err(|e| format!("{}: {e}", path.display()))?;
                read_binary_stream(BufReader::new(f)).map_err(|e| format!("{}: {e}", path.display()))?
            } else {
                let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
                parse_stream(&text).map_err(|e| format!("{}: {e}", path.display()))?
            }
        }
        (None, Some(n)) => {
            if c.sets.is_some() {
                return Err("--sets needs --input".into());
            }
            return instance_for_scheme(&c.scheme, n, c.seed).ok_or_else(|| unknown_scheme(&c.scheme));
        }
        (None, None) => return Err("one of --input or --n is required".into()),
    };
    match &c.sets {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
            let sets = SetFamily::parse(&text, graph.n).map_err(|e| format!("{}: {e}", path.display()))?;
            Ok(Instance::with_sets(graph, sets))
        }
        None => Ok(graph.into()),
    }
}

fn unknown_scheme(name: &str) -> String {
    format!("unknown scheme {name:?}; expected one of {}", SCHEME_NAMES.join(", "))
}

fn tuning(shape: &Shape, n: usize) -> Result<Tuning> {
    let n1 = n.max(1);
    let t = match (shape.t, shape.s, shape.v) {
        (_, _, Some(v)) => Tuning::from_hv(n, v),
        (Some(t), Some(s), _) => Tuning::new(t, s),
        (Some(t), None, _) => Tuning::new(t, n1.div_ceil(t.max(1))),
        (None, Some(s), _) => Tuning::new(n1.div_ceil(s.max(1)), s),
        (None, None, None) => Tuning::balanced(n),
    };
    if t.t == 0 || t.s == 0 {
        return Err("t and s must be positive".into());
    }
    Ok(t)
}

fn scheme_for(c: &Common, shape: &Shape, inst: &Instance) -> Result<Box<dyn Scheme>> {
    let tuning = tuning(shape, inst.n())?.with_modulus(modulus(c)?);
    let scheme = build_scheme(&c.scheme, tuning).ok_or_else(|| unknown_scheme(&c.scheme))?;
    scheme.check_instance(inst).map_err(|e| e.to_string())?;
    Ok(scheme)
}

fn policy(name: &str) -> Result<MutationPolicy> {
    MutationPolicy::from_name(name).ok_or_else(|| {
        let all: Vec<&str> = MutationPolicy::ALL.iter().map(|p| p.name()).collect();
        format!("unknown policy {name:?}; expected one of {}", all.join(", "))
    })
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn run(a: &RunArgs) -> Result<ExitCode> {
    let inst = load_instance(&a.common)?;
    let scheme = scheme_for(&a.common, &a.shape, &inst)?;
    let field = scheme.field(&inst).map_err(|e| e.to_string())?;
    let transcript = match (&a.transcript, &a.mutate) {
        (Some(path), _) => {
            let f = File::open(path).map_err(|e| format!("{}: {e}", path.display()))?;
            ProofTranscript::read_from(BufReader::new(f)).map_err(|e| format!("{}: {e}", path.display()))?
        }
        (None, Some(name)) => {
            let p = policy(name)?;
            let honest = scheme.prove(&inst, &field);
            let mut adv = rng_for(a.common.seed, Substream::Adversary);
            match scheme.mutate(&inst, &field, &honest, p, &mut adv) {
                Some(t) => t,
                None => {
                    eprintln!("note: policy {} does not apply; using the honest transcript", p.name());
                    honest
                }
            }
        }
        (None, None) => scheme.prove(&inst, &field),
    };
    let out = verify_transcript(scheme.as_ref(), &inst, field, &transcript, rng_for(a.common.seed, Substream::Verifier));
    let cost = cost_report(scheme.as_ref(), &inst, &field, &transcript, out.vcost_elements);
    println!("scheme={}", cost.scheme);
    println!("n={} t={} s={} modulus={}", cost.n, cost.t, cost.s, field.modulus());
    match &out.result {
        Verdict::Output(ans) => println!("output={ans}"),
        Verdict::Reject(r) => println!("reject={r}"),
    }
    println!("hcost_elems={} hbits={}", cost.hcost_elems, cost.hbits);
    println!("vcost_elems={} vbits={}", cost.vcost_elems, cost.vbits);
    if out.budget_exceeded {
        println!("budget_exceeded=true");
    }
    if let Some(path) = &a.output {
        let f = File::create(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let mut w = BufWriter::new(f);
        transcript.write_to(&mut w).and_then(|_| w.flush()).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    Ok(if out.is_reject() { ExitCode::from(1) } else { ExitCode::SUCCESS })
}

pub fn attack(a: &AttackArgs) -> Result<ExitCode> {
    if a.trials == 0 {
        return Err("--trials must be at least 1".into());
    }
    let inst = load_instance(&a.common)?;
    let scheme = scheme_for(&a.common, &a.shape, &inst)?;
    let policies = if a.policies.is_empty() {
        scheme.policies()
    } else {
        a.policies.iter().map(|p| policy(p)).collect::<Result<Vec<_>>>()?
    };
    let mut csv = format!("{}\n", TrialStats::CSV_HEADER);
    for p in policies {
        let stats = run_adversarial(scheme.as_ref(), &inst, p, a.trials, a.common.seed).map_err(|e| e.to_string())?;
        csv.push_str(&stats.csv_row(scheme.name(), p));
        csv.push('\n');
    }
    emit(a.output.as_deref(), &csv)?;
    Ok(ExitCode::SUCCESS)
}

fn parse_ts(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| match x.parse::<usize>() {
            Ok(t) if t > 0 => Ok(t),
            _ => Err(format!("bad t value {x:?}")),
        })
        .collect()
}

pub fn sweep(a: &SweepArgs) -> Result<ExitCode> {
    let inst = load_instance(&a.common)?;
    let n = inst.n().max(1);
    let grid: Vec<(usize, usize)> = parse_ts(&a.ts)?.into_iter().map(|t| (t, n.div_ceil(t))).collect();
    let name = a.common.scheme.clone();
    if build_scheme(&name, Tuning::balanced(n)).is_none() {
        return Err(unknown_scheme(&name));
    }
    let build = move |t: Tuning| build_scheme(&name, t).expect("known scheme");
    let rows = cost_sweep(&build, &inst, &grid, modulus(&a.common)?, a.common.seed).map_err(|e| e.to_string())?;
    emit(a.output.as_deref(), &costs_csv(&rows))?;
    if let Some(path) = &a.plot {
        write_svg(path, &rows).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    Ok(ExitCode::SUCCESS)
}

pub fn gen(a: &GenArgs) -> Result<ExitCode> {
    let kind = GenKind::from_name(&a.kind).ok_or_else(|| {
        let all: Vec<&str> = GenKind::ALL.iter().map(|k| k.name()).collect();
        format!("unknown kind {:?}; expected one of {}", a.kind, all.join(", "))
    })?;
    if !(0.0..=1.0).contains(&a.p) {
        return Err("--p must lie in [0, 1]".into());
    }
    let g = generate(kind, a.n, a.seed, &GenOptions { p: a.p, max_weight: a.max_weight });
    emit(a.output.as_deref(), &write_stream(&g))?;
    Ok(ExitCode::SUCCESS)
}
