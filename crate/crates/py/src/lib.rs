//! Python bindings for instances, schemes and trial runs.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyBytes;

use annostream::field::{rng_for, Substream};
use annostream::gen::{generate as gen_instance, instance_for_scheme, GenKind, GenOptions};
use annostream::protocol::{
    cost_report, run_adversarial, verify_transcript, Instance as CoreInstance, MutationPolicy, Scheme as CoreScheme, TrialStats,
    Tuning, Verdict,
};
use annostream::registry::{build_scheme, SCHEME_NAMES};
use annostream::stream::{parse_stream as core_parse, write_stream, ProofTranscript, SetFamily};
use annostream::{Fe, FieldConfig};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A prime field `F_p`.
#[pyclass(frozen)]
struct Field {
    inner: FieldConfig,
}

#[pymethods]
impl Field {
    #[new]
    fn new(p: u64) -> PyResult<Self> {
        FieldConfig::new(p).map(|inner| Self { inner }).map_err(value_err)
    }

    /// Smallest prime above `max(n^3, 2^20)`.
    #[staticmethod]
    fn auto(n: usize) -> PyResult<Self> {
        FieldConfig::auto(n, None).map(|inner| Self { inner }).map_err(value_err)
    }

    #[getter]
    fn modulus(&self) -> u64 {
        self.inner.modulus()
    }

    #[getter]
    fn element_bits(&self) -> u64 {
        self.inner.element_bits()
    }

    fn add(&self, a: i64, b: i64) -> u64 {
        (self.inner.from_i64(a) + self.inner.from_i64(b)).value()
    }

    fn sub(&self, a: i64, b: i64) -> u64 {
        (self.inner.from_i64(a) - self.inner.from_i64(b)).value()
    }

    fn mul(&self, a: i64, b: i64) -> u64 {
        (self.inner.from_i64(a) * self.inner.from_i64(b)).value()
    }

    fn pow(&self, a: i64, e: u64) -> u64 {
        self.inner.from_i64(a).pow(e).value()
    }

    fn inv(&self, a: i64) -> PyResult<u64> {
        self.inner.from_i64(a).inv().map(Fe::value).map_err(value_err)
    }

    fn __repr__(&self) -> String {
        format!("Field({})", self.inner.modulus())
    }
}

/// A graph stream, optionally followed by a set family.
#[pyclass(frozen)]
struct Instance {
    inner: CoreInstance,
}

#[pymethods]
impl Instance {
    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn model(&self) -> &'static str {
        self.inner.graph.model.name()
    }

    #[getter]
    fn directed(&self) -> bool {
        self.inner.graph.directed
    }

    #[getter]
    fn num_tokens(&self) -> usize {
        self.inner.graph.len()
    }

    /// Final edges `(u, v, multiplicity or weight)`.
    fn edges(&self) -> Vec<(u32, u32, i64)> {
        self.inner.graph.final_edges()
    }

    /// Copy with a set family parsed from text (one set per line, `|` for cross pairs).
    fn with_sets(&self, text: &str) -> PyResult<Self> {
        let sets = SetFamily::parse(text, self.inner.n()).map_err(value_err)?;
        Ok(Self { inner: CoreInstance::with_sets(self.inner.graph.clone(), sets) })
    }

    /// Copy with the SSSP source and optional target set.
    #[pyo3(signature = (source, target=None))]
    fn with_source(&self, source: u32, target: Option<u32>) -> Self {
        let mut inner = self.inner.clone();
        inner.graph.source = Some(source);
        inner.graph.target = target;
        Self { inner }
    }

    fn to_text(&self) -> String {
        write_stream(&self.inner.graph)
    }

    fn __repr__(&self) -> String {
        format!("Instance(n={}, model={}, tokens={})", self.inner.n(), self.model(), self.num_tokens())
    }
}

/// Outcome of one verified run.
#[pyclass(frozen, get_all)]
struct RunResult {
    accepted: bool,
    output: Option<String>,
    reject_check: Option<String>,
    correct: bool,
    hcost_elems: usize,
    vcost_elems: usize,
    hbits: u64,
    vbits: u64,
    modulus: u64,
    budget_exceeded: bool,
    transcript: Py<PyBytes>,
}

#[pymethods]
impl RunResult {
    fn __repr__(&self) -> String {
        match (&self.output, &self.reject_check) {
            (Some(o), _) => format!("RunResult(output={o}, hcost={}, vcost={})", self.hcost_elems, self.vcost_elems),
            (None, r) => format!("RunResult(reject={}, hcost={})", r.as_deref().unwrap_or("?"), self.hcost_elems),
        }
    }
}

/// Adversarial trial counts with a 95% Wilson interval on the accept-wrong rate.
#[pyclass(frozen, get_all)]
struct Trials {
    policy: String,
    trials: usize,
    accepts_correct: usize,
    accepts_wrong: usize,
    rejects: usize,
    ci_low: f64,
    ci_high: f64,
}

impl Trials {
    fn from_stats(policy: MutationPolicy, s: TrialStats) -> Self {
        let (ci_low, ci_high) = s.wilson(1.96);
        Self {
            policy: policy.name().to_string(),
            trials: s.trials,
            accepts_correct: s.accepts_correct,
            accepts_wrong: s.accepts_wrong,
            rejects: s.rejects,
            ci_low,
            ci_high,
        }
    }
}

#[pymethods]
impl Trials {
    fn __repr__(&self) -> String {
        format!("Trials({}: {}/{} wrong accepts)", self.policy, self.accepts_wrong, self.trials)
    }
}

/// A named scheme with its shaping parameters. Missing `t`/`s` default to
/// a balanced shape for the instance size.
#[pyclass(frozen)]
struct Scheme {
    name: String,
    t: Option<usize>,
    s: Option<usize>,
    modulus: Option<u64>,
}

impl Scheme {
    fn build(&self, n: usize) -> PyResult<Box<dyn CoreScheme>> {
        let n1 = n.max(1);
        let tuning = match (self.t, self.s) {
            (Some(t), Some(s)) => Tuning::new(t, s),
            (Some(t), None) => Tuning::new(t, n1.div_ceil(t.max(1))),
            (None, Some(s)) => Tuning::new(n1.div_ceil(s.max(1)), s),
            (None, None) => Tuning::balanced(n),
        };
        build_scheme(&self.name, tuning.with_modulus(self.modulus))
            .ok_or_else(|| PyValueError::new_err(format!("unknown scheme {:?}", self.name)))
    }
}

#[pymethods]
impl Scheme {
    #[new]
    #[pyo3(signature = (name, t=None, s=None, modulus=None))]
    fn new(name: String, t: Option<usize>, s: Option<usize>, modulus: Option<u64>) -> PyResult<Self> {
        if !SCHEME_NAMES.contains(&name.as_str()) {
            return Err(PyValueError::new_err(format!("unknown scheme {name:?}")));
        }
        if t == Some(0) || s == Some(0) {
            return Err(PyValueError::new_err("t and s must be positive"));
        }
        Ok(Self { name, t, s, modulus })
    }

    #[getter]
    fn name(&self) -> &str {
        &self.name
    }

    fn policies(&self) -> PyResult<Vec<&'static str>> {
        Ok(self.build(1)?.policies().into_iter().map(MutationPolicy::name).collect())
    }

    /// Verifies the honest help message, or a mutated one when `mutate` names a policy.
    #[pyo3(signature = (instance, seed=0, mutate=None))]
    fn run(&self, py: Python<'_>, instance: &Instance, seed: u64, mutate: Option<&str>) -> PyResult<RunResult> {
        let inst = &instance.inner;
        let scheme = self.build(inst.n())?;
        scheme.check_instance(inst).map_err(value_err)?;
        let field = scheme.field(inst).map_err(value_err)?;
        let honest = scheme.prove(inst, &field);
        let transcript: ProofTranscript = match mutate {
            None => honest,
            Some(name) => {
                let p = MutationPolicy::from_name(name).ok_or_else(|| PyValueError::new_err(format!("unknown policy {name:?}")))?;
                let mut adv = rng_for(seed, Substream::Adversary);
                scheme.mutate(inst, &field, &honest, p, &mut adv).unwrap_or(honest)
            }
        };
        let out = verify_transcript(scheme.as_ref(), inst, field, &transcript, rng_for(seed, Substream::Verifier));
        let cost = cost_report(scheme.as_ref(), inst, &field, &transcript, out.vcost_elements);
        let (output, reject_check, correct) = match &out.result {
            Verdict::Output(a) => (Some(a.to_string()), None, scheme.is_correct(inst, a)),
            Verdict::Reject(r) => (None, Some(r.check.to_string()), false),
        };
        Ok(RunResult {
            accepted: output.is_some(),
            output,
            reject_check,
            correct,
            hcost_elems: cost.hcost_elems,
            vcost_elems: cost.vcost_elems,
            hbits: cost.hbits,
            vbits: cost.vbits,
            modulus: field.modulus(),
            budget_exceeded: out.budget_exceeded,
            transcript: PyBytes::new(py, &transcript.to_bytes()).unbind(),
        })
    }

    /// Runs `trials` mutated transcripts against fresh Verifiers.
    #[pyo3(signature = (instance, policy, trials=500, seed=0))]
    fn attack(&self, py: Python<'_>, instance: &Instance, policy: &str, trials: usize, seed: u64) -> PyResult<Trials> {
        let p = MutationPolicy::from_name(policy).ok_or_else(|| PyValueError::new_err(format!("unknown policy {policy:?}")))?;
        let scheme = self.build(instance.inner.n())?;
        let inst = &instance.inner;
        let stats = py.detach(|| run_adversarial(scheme.as_ref(), inst, p, trials, seed)).map_err(value_err)?;
        Ok(Trials::from_stats(p, stats))
    }

    fn __repr__(&self) -> String {
        format!("Scheme({:?}, t={:?}, s={:?})", self.name, self.t, self.s)
    }
}

#[pyfunction]
fn parse_stream(text: &str) -> PyResult<Instance> {
    core_parse(text).map(|g| Instance { inner: g.into() }).map_err(value_err)
}

/// Fixture of kind gnp, path, cycle, clique, dag, weighted-gnp or adjlist.
#[pyfunction]
#[pyo3(signature = (kind, n, seed=0, p=0.3, max_weight=4))]
fn generate(kind: &str, n: usize, seed: u64, p: f64, max_weight: u64) -> PyResult<Instance> {
    let k = GenKind::from_name(kind).ok_or_else(|| PyValueError::new_err(format!("unknown kind {kind:?}")))?;
    Ok(Instance { inner: gen_instance(k, n, seed, &GenOptions { p, max_weight }).into() })
}

/// Random instance meeting the named scheme's preconditions.
#[pyfunction]
#[pyo3(signature = (scheme, n, seed=0))]
fn sample_instance(scheme: &str, n: usize, seed: u64) -> PyResult<Instance> {
    instance_for_scheme(scheme, n, seed)
        .map(|inner| Instance { inner })
        .ok_or_else(|| PyValueError::new_err(format!("unknown scheme {scheme:?}")))
}

#[pyfunction]
fn scheme_names() -> Vec<&'static str> {
    SCHEME_NAMES.to_vec()
}

#[pymodule]
#[pyo3(name = "annostream")]
fn annostream_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Field>()?;
    m.add_class::<Instance>()?;
    m.add_class::<Scheme>()?;
    m.add_class::<RunResult>()?;
    m.add_class::<Trials>()?;
    m.add_function(wrap_pyfunction!(parse_stream, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(sample_instance, m)?)?;
    m.add_function(wrap_pyfunction!(scheme_names, m)?)?;
    Ok(())
}
