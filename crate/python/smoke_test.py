"""Smoke test for the annostream extension module.

Build and install first:  maturin build --release -m crates/py/Cargo.toml && pip install target/wheels/annostream-*.whl
"""

import annostream as ann


def k5():
    return ann.generate("clique", 5)


def test_field():
    f = ann.Field(101)
    assert f.modulus == 101
    assert f.mul(7, f.inv(7)) == 1
    assert f.add(-1, 1) == 0
    assert ann.Field.auto(64).modulus > 64 ** 3


def test_triangles():
    g = k5()
    assert g.n == 5 and g.num_tokens == 10
    for name in ["tri-laconic", "tri-frugal", "tri-sparse"]:
        r = ann.Scheme(name, t=4).run(g, seed=7)
        assert r.accepted and r.correct and r.output == "10", (name, r)
    r = ann.Scheme("tri-laconic", t=4).run(g)
    assert r.hcost_elems == 7
    assert isinstance(r.transcript, bytes) and len(r.transcript) > 0


def test_reject_on_mutation():
    r = ann.Scheme("tri-laconic").run(k5(), mutate="coeff-flip")
    assert not r.accepted and r.reject_check == "triangle-sumcheck"


def test_edgecount_sets():
    g = k5().with_sets("1 2 3\n4 5\n")
    r = ann.Scheme("edgecount-induced").run(g)
    assert r.output == "4"


def test_every_scheme_completes():
    for name in ann.scheme_names():
        for seed in range(3):
            inst = ann.sample_instance(name, 12, seed)
            r = ann.Scheme(name).run(inst, seed=seed)
            assert r.accepted and r.correct and not r.budget_exceeded, (name, seed, r)


def test_attack():
    inst = ann.sample_instance("sssp-unweighted", 12, 2)
    s = ann.Scheme("sssp-unweighted")
    for policy in s.policies():
        t = s.attack(inst, policy, trials=100, seed=1)
        assert t.trials == 100 and t.accepts_wrong == 0, t
        assert 0.0 <= t.ci_low <= t.ci_high <= 1.0


def test_errors():
    for bad in [lambda: ann.Scheme("nope"), lambda: ann.parse_stream("garbage"), lambda: ann.Field(100)]:
        try:
            bad()
        except ValueError:
            continue
        raise AssertionError("expected ValueError")


def test_round_trip():
    g = ann.generate("weighted-gnp", 10, seed=3)
    h = ann.parse_stream(g.to_text())
    assert h.edges() == g.edges() and h.model == "weighted"
    d = ann.generate("path", 4).with_source(1)
    r = ann.Scheme("sssp-unweighted").run(d)
    assert r.output == "0 1 2 3"


if __name__ == "__main__":
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_")]
    for t in tests:
        t()
        print(f"ok {t.__name__}")
    print(f"{len(tests)} smoke tests passed")
