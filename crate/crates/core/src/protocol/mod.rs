//! Scheme abstraction, the one-pass Verifier interface, trial runners and
//! cost accounting.

mod meter;
mod mutation;

use std::fmt;

use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::extension::ExtensionError;
use crate::field::{rng_for, Fe, FieldConfig, FieldError, ProtocolRng, Substream};
use crate::stream::{Block, GraphInstance, ProofTranscript, SetFamily, StreamHeader, StreamToken, VItem};

pub use meter::{Reservation, SpaceMeter, TrackedVec};
pub use mutation::{generic_mutation, MutationPolicy};

/// A graph stream together with the set family that follows it, if any.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub graph: GraphInstance,
    pub sets: Option<SetFamily>,
}

impl From<GraphInstance> for Instance {
    fn from(graph: GraphInstance) -> Self {
        Self { graph, sets: None }
    }
}

impl Instance {
    pub fn with_sets(graph: GraphInstance, sets: SetFamily) -> Self {
        Self { graph, sets: Some(sets) }
    }

    pub fn n(&self) -> usize {
        self.graph.n
    }
}

/// Shaping parameters and an optional modulus override.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Tuning {
    pub t: usize,
    pub s: usize,
    pub modulus: Option<u64>,
}

impl Tuning {
    pub fn new(t: usize, s: usize) -> Self {
        Self { t, s, modulus: None }
    }

    /// `s = ceil(sqrt(n))`, `t = ceil(n / s)`.
    pub fn balanced(n: usize) -> Self {
        let s = (n.max(1) as f64).sqrt().ceil() as usize;
        Self::new(n.max(1).div_ceil(s), s)
    }

    /// Shaping for `[h, v]` parameterizations: `s = floor(sqrt(v))`.
    pub fn from_hv(n: usize, v: usize) -> Self {
        let s = (v.max(1) as f64).sqrt().floor().max(1.0) as usize;
        let s = s.min(n.max(1));
        Self::new(n.max(1).div_ceil(s), s)
    }

    pub fn with_modulus(mut self, p: Option<u64>) -> Self {
        self.modulus = p;
        self
    }
}

#[derive(Debug, Error)]
pub enum SchemeError {
    #[error("scheme {scheme} needs a {expected} stream, got {got}")]
    Model { scheme: &'static str, expected: &'static str, got: &'static str },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Shape(#[from] ExtensionError),
    #[error("unknown scheme `{0}`")]
    UnknownScheme(String),
    #[error("trials must be at least 1")]
    NoTrials,
}

/// Verifier output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Answer {
    Count(i64),
    Flag(bool),
    Order(Vec<u32>),
    /// Per-vertex distance labels, `None` for unreachable vertices.
    Distances(Vec<Option<u64>>),
    Labels { dist: Vec<Option<u64>>, prev: Vec<Option<u32>> },
    Distance(Option<u64>),
}

impl fmt::Display for Answer {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = |x: &Option<u64>| x.map_or("inf".to_string(), |v| v.to_string());
        match self {
            Answer::Count(c) => write!(f, "{c}"),
            Answer::Flag(b) => write!(f, "{b}"),
            Answer::Order(o) => write!(f, "{}", o.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")),
            Answer::Distances(ds) => write!(f, "{}", ds.iter().map(d).collect::<Vec<_>>().join(" ")),
            Answer::Labels { dist, .. } => write!(f, "{}", dist.iter().map(d).collect::<Vec<_>>().join(" ")),
            Answer::Distance(x) => match x {
                Some(k) => write!(f, "{k}"),
                None => write!(f, "unreachable"),
            },
        }
    }
}

/// The Verifier's reject symbol, with the check that failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rejection {
    pub check: &'static str,
    pub detail: String,
}

impl Rejection {
    pub fn new(check: &'static str, detail: impl Into<String>) -> Self {
        Self { check, detail: detail.into() }
    }
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.check, self.detail)
    }
}

/// Rejects unless `cond` holds.
pub fn ensure(cond: bool, check: &'static str, detail: impl FnOnce() -> String) -> Result<(), Rejection> {
    if cond {
        Ok(())
    } else {
        Err(Rejection::new(check, detail()))
    }
}

/// Forward-only view of a transcript, checked block by block.
pub struct ProofReader<'a> {
    blocks: &'a [Block],
    pos: usize,
}

impl<'a> ProofReader<'a> {
    pub fn new(t: &'a ProofTranscript) -> Self {
        Self { blocks: &t.blocks, pos: 0 }
    }

    fn next_block(&mut self, label: &str) -> Result<&'a Block, Rejection> {
        let b = self.blocks.get(self.pos).ok_or_else(|| Rejection::new("transcript", format!("missing block `{label}`")))?;
        if b.label() != label {
            return Err(Rejection::new("transcript", format!("expected block `{label}`, found `{}`", b.label())));
        }
        self.pos += 1;
        Ok(b)
    }

    pub fn peek_label(&self) -> Option<&'a str> {
        self.blocks.get(self.pos).map(|b| b.label())
    }

    /// Grid values of a polynomial with the given degree bounds.
    pub fn next_poly(&mut self, label: &str, degrees: &[usize]) -> Result<&'a [Fe], Rejection> {
        match self.next_block(label)? {
            Block::Poly { degrees: d, values, .. } => {
                ensure(d == degrees, "transcript", || format!("block `{label}` has degree bounds {d:?}, expected {degrees:?}"))?;
                let want = crate::extension::grid_len(degrees);
                ensure(values.len() == want, "transcript", || format!("block `{label}` has {} values, expected {want}", values.len()))?;
                Ok(values)
            }
            _ => Err(Rejection::new("transcript", format!("block `{label}` is not a polynomial"))),
        }
    }

    pub fn next_vertices(&mut self, label: &str) -> Result<&'a [VItem], Rejection> {
        match self.next_block(label)? {
            Block::Vertices { items, .. } => Ok(items),
            _ => Err(Rejection::new("transcript", format!("block `{label}` is not a vertex list"))),
        }
    }

    /// Vertex list without delimiters; ids are checked against `[n]`.
    pub fn next_vertex_ids(&mut self, label: &str, n: usize) -> Result<Vec<u32>, Rejection> {
        self.next_vertices(label)?
            .iter()
            .map(|it| match *it {
                VItem::V(v) if v >= 1 && v as usize <= n => Ok(v),
                VItem::V(v) => Err(Rejection::new("transcript", format!("vertex {v} outside [1, {n}] in `{label}`"))),
                VItem::Delim => Err(Rejection::new("transcript", format!("unexpected delimiter in `{label}`"))),
            })
            .collect()
    }

    pub fn next_scalars(&mut self, label: &str, len: Option<usize>) -> Result<&'a [Fe], Rejection> {
        match self.next_block(label)? {
            Block::Scalars { values, .. } => {
                if let Some(want) = len {
                    ensure(values.len() == want, "transcript", || format!("block `{label}` has {} values, expected {want}", values.len()))?;
                }
                Ok(values)
            }
            _ => Err(Rejection::new("transcript", format!("block `{label}` is not a scalar list"))),
        }
    }

    pub fn finish(&self) -> Result<(), Rejection> {
        ensure(self.pos == self.blocks.len(), "transcript", || format!("{} trailing blocks", self.blocks.len() - self.pos))
    }
}

/// A streaming Verifier: sees tokens once, in order, then reads the proof.
pub trait StreamVerifier {
    fn observe(&mut self, token: &StreamToken);

    /// Set family streamed after the edges; ignored by schemes without one.
    fn observe_sets(&mut self, _sets: &SetFamily) {}

    fn conclude(self: Box<Self>, proof: &mut ProofReader<'_>) -> Result<Answer, Rejection>;
}

pub trait Scheme: Send + Sync {
    fn name(&self) -> &'static str;

    fn tuning(&self) -> Tuning;

    fn check_instance(&self, inst: &Instance) -> Result<(), SchemeError>;

    fn field(&self, inst: &Instance) -> Result<FieldConfig, SchemeError> {
        Ok(match self.tuning().modulus {
            Some(p) => FieldConfig::new(p)?,
            None => FieldConfig::auto(inst.n(), None)?,
        })
    }

    /// Honest help message; a function of the instance and parameters only.
    fn prove(&self, inst: &Instance, field: &FieldConfig) -> ProofTranscript;

    /// Fresh Verifier. Its randomness comes from `rng` and its state is
    /// charged to `meter`.
    fn verifier(&self, header: &StreamHeader, field: FieldConfig, rng: ProtocolRng, meter: &SpaceMeter) -> Box<dyn StreamVerifier>;

    /// Oracle judgement of an output.
    fn is_correct(&self, inst: &Instance, answer: &Answer) -> bool;

    fn hcost_bound(&self, inst: &Instance) -> usize;

    fn vcost_bound(&self, inst: &Instance) -> usize;

    fn policies(&self) -> Vec<MutationPolicy>;

    fn mutate(
        &self,
        inst: &Instance,
        field: &FieldConfig,
        honest: &ProofTranscript,
        policy: MutationPolicy,
        rng: &mut ProtocolRng,
    ) -> Option<ProofTranscript> {
        generic_mutation(inst, field, honest, policy, rng)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Output(Answer),
    Reject(Rejection),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifierOutcome {
    pub result: Verdict,
    pub vcost_elements: usize,
    pub vcost_bits: u64,
    /// The peak exceeded the scheme's declared space bound.
    pub budget_exceeded: bool,
}

impl VerifierOutcome {
    pub fn answer(&self) -> Option<&Answer> {
        match &self.result {
            Verdict::Output(a) => Some(a),
            Verdict::Reject(_) => None,
        }
    }

    pub fn is_reject(&self) -> bool {
        matches!(self.result, Verdict::Reject(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostReport {
    pub scheme: String,
    pub n: usize,
    pub t: usize,
    pub s: usize,
    pub hcost_elems: usize,
    pub vcost_elems: usize,
    pub hbits: u64,
    pub vbits: u64,
    pub product_bits: u128,
}

impl CostReport {
    pub const CSV_HEADER: &'static str = "scheme,n,t,s,hcost_elems,vcost_elems,hbits,vbits,product_bits";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.scheme, self.n, self.t, self.s, self.hcost_elems, self.vcost_elems, self.hbits, self.vbits, self.product_bits
        )
    }
}

pub fn costs_csv(rows: &[CostReport]) -> String {
    let mut out = String::from(CostReport::CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub outcome: VerifierOutcome,
    pub transcript: ProofTranscript,
    pub cost: CostReport,
    pub field: FieldConfig,
}

/// Runs a Verifier over the instance and the given transcript.
pub fn verify_transcript(
    scheme: &dyn Scheme,
    inst: &Instance,
    field: FieldConfig,
    transcript: &ProofTranscript,
    verifier_rng: ProtocolRng,
) -> VerifierOutcome {
    let meter = SpaceMeter::with_limit(scheme.vcost_bound(inst));
    let result = {
        let mut v = scheme.verifier(&inst.graph.header(), field, verifier_rng, &meter);
        for tok in &inst.graph.tokens {
            v.observe(tok);
        }
        if let Some(sets) = &inst.sets {
            v.observe_sets(sets);
        }
        if transcript.modulus != field.modulus() {
            Err(Rejection::new("transcript", format!("modulus {} does not match {}", transcript.modulus, field.modulus())))
        } else {
            let mut reader = ProofReader::new(transcript);
            v.conclude(&mut reader).and_then(|a| reader.finish().map(|_| a))
        }
    };
    let peak = meter.peak();
    VerifierOutcome {
        result: match result {
            Ok(a) => Verdict::Output(a),
            Err(r) => Verdict::Reject(r),
        },
        vcost_elements: peak,
        vcost_bits: peak as u64 * field.element_bits(),
        budget_exceeded: meter.violated(),
    }
}

pub fn cost_report(scheme: &dyn Scheme, inst: &Instance, field: &FieldConfig, transcript: &ProofTranscript, vcost: usize) -> CostReport {
    let bits = field.element_bits();
    let hcost = transcript.element_count();
    let tuning = scheme.tuning();
    CostReport {
        scheme: scheme.name().to_string(),
        n: inst.n(),
        t: tuning.t,
        s: tuning.s,
        hcost_elems: hcost,
        vcost_elems: vcost,
        hbits: hcost as u64 * bits,
        vbits: vcost as u64 * bits,
        product_bits: (hcost as u128 * bits as u128) * (vcost as u128 * bits as u128),
    }
}

/// Honest Prover against a Verifier seeded from `seed`.
pub fn run_honest(scheme: &dyn Scheme, inst: &Instance, seed: u64) -> Result<RunReport, SchemeError> {
    scheme.check_instance(inst)?;
    let field = scheme.field(inst)?;
    let transcript = scheme.prove(inst, &field);
    let outcome = verify_transcript(scheme, inst, field, &transcript, rng_for(seed, Substream::Verifier));
    let cost = cost_report(scheme, inst, &field, &transcript, outcome.vcost_elements);
    Ok(RunReport { outcome, transcript, cost, field })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TrialStats {
    pub trials: usize,
    pub accepts_correct: usize,
    pub accepts_wrong: usize,
    pub rejects: usize,
}

impl TrialStats {
    pub fn accept_wrong_rate(&self) -> f64 {
        if self.trials == 0 {
            0.0
        } else {
            self.accepts_wrong as f64 / self.trials as f64
        }
    }

    /// Wilson score interval for the accept-wrong rate at quantile `z`.
    pub fn wilson(&self, z: f64) -> (f64, f64) {
        wilson_interval(self.accepts_wrong, self.trials, z)
    }

    pub const CSV_HEADER: &'static str = "scheme,policy,trials,accepts_correct,accepts_wrong,rejects,accept_wrong_rate,ci_low,ci_high";

    pub fn csv_row(&self, scheme: &str, policy: MutationPolicy) -> String {
        let (lo, hi) = self.wilson(1.96);
        format!(
            "{scheme},{},{},{},{},{},{:.6},{lo:.6},{hi:.6}",
            policy.name(),
            self.trials,
            self.accepts_correct,
            self.accepts_wrong,
            self.rejects,
            self.accept_wrong_rate()
        )
    }

    fn merge(self, o: Self) -> Self {
        Self {
            trials: self.trials + o.trials,
            accepts_correct: self.accepts_correct + o.accepts_correct,
            accepts_wrong: self.accepts_wrong + o.accepts_wrong,
            rejects: self.rejects + o.rejects,
        }
    }
}

pub fn wilson_interval(successes: usize, trials: usize, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

fn trial_seed(seed: u64, i: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i as u64).rotate_left(17) ^ 0xA5A5_5A5A_DEAD_BEEF
}

/// Mutated transcripts against fresh Verifiers, one per trial, in parallel.
/// A trial whose mutation does not apply replays the honest transcript.
pub fn run_adversarial(
    scheme: &dyn Scheme,
    inst: &Instance,
    policy: MutationPolicy,
    trials: usize,
    seed: u64,
) -> Result<TrialStats, SchemeError> {
    if trials == 0 {
        return Err(SchemeError::NoTrials);
    }
    scheme.check_instance(inst)?;
    let field = scheme.field(inst)?;
    let honest = scheme.prove(inst, &field);
    let stats = (0..trials)
        .into_par_iter()
        .map(|i| {
            let ts = trial_seed(seed, i);
            let mut adv = rng_for(ts, Substream::Adversary);
            let forged = if policy == MutationPolicy::Honest {
                None
            } else {
                scheme.mutate(inst, &field, &honest, policy, &mut adv)
            };
            let transcript = forged.as_ref().unwrap_or(&honest);
            let out = verify_transcript(scheme, inst, field, transcript, rng_for(ts, Substream::Verifier));
            let mut s = TrialStats { trials: 1, ..Default::default() };
            match out.result {
                Verdict::Reject(_) => s.rejects = 1,
                Verdict::Output(a) if scheme.is_correct(inst, &a) => s.accepts_correct = 1,
                Verdict::Output(_) => s.accepts_wrong = 1,
            }
            s
        })
        .reduce(TrialStats::default, TrialStats::merge);
    Ok(stats)
}

/// Honest runs across a grid of `(t, s)` shapes.
pub fn cost_sweep(
    build: &(dyn Fn(Tuning) -> Box<dyn Scheme> + Sync),
    inst: &Instance,
    grid: &[(usize, usize)],
    modulus: Option<u64>,
    seed: u64,
) -> Result<Vec<CostReport>, SchemeError> {
    grid.iter()
        .map(|&(t, s)| {
            let scheme = build(Tuning::new(t, s).with_modulus(modulus));
            run_honest(scheme.as_ref(), inst, seed).map(|r| r.cost)
        })
        .collect()
}

/// Lifts a field value to a signed integer through the symmetric representative.
pub fn lift_signed(x: Fe) -> i64 {
    let p = x.modulus();
    let v = x.value();
    if v <= p / 2 {
        v as i64
    } else {
        -((p - v) as i64)
    }
}

/// Random nonzero element.
pub fn random_nonzero(field: &FieldConfig, rng: &mut impl Rng) -> Fe {
    field.elem(rng.random_range(1..field.modulus()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_bounds() {
        let (lo, hi) = wilson_interval(0, 500, 1.96);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.01);
        let (lo, hi) = wilson_interval(50, 100, 1.96);
        assert!((lo - 0.4038).abs() < 1e-3 && (hi - 0.5962).abs() < 1e-3);
    }
}
