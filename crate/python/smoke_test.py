#!/usr/bin/env python3
"""Smoke test for the coupflow Python extension.

Build the module first:

    cargo build -p coupflow-python --release

then run this script from the repository root (or anywhere):

    python3 python/smoke_test.py
"""

import shutil
import sys
import tempfile
from fractions import Fraction
from pathlib import Path


def load_module():
    root = Path(__file__).resolve().parent.parent
    candidates = [
        root / "target" / "release" / "libcoupflow.so",
        root / "target" / "debug" / "libcoupflow.so",
    ]
    built = next((p for p in candidates if p.exists()), None)
    if built is None:
        sys.exit(
            "libcoupflow.so not found; run `cargo build -p coupflow-python` first"
        )
    stage = Path(tempfile.mkdtemp(prefix="coupflow-"))
    shutil.copy(built, stage / "coupflow.so")
    sys.path.insert(0, str(stage))
    import coupflow

    return coupflow


def frac(s):
    return Fraction(s)


def main():
    cf = load_module()

    # graphs: closure and reduction
    g = cf.Digraph(["a", "b", "c"], [("a", "b"), ("b", "c"), ("a", "c")])
    assert g.is_acyclic()
    reduced = g.transitive_reduction()
    assert sorted(reduced.edges()) == [("a", "b"), ("b", "c")]
    assert sorted(g.transitive_closure().edges()) == sorted(
        [("a", "b"), ("a", "c"), ("b", "c")]
    )

    # dominance on a chain, with certificates on both sides; the relation
    # lists all strict pairs (reflexive ones are implied)
    chain_pairs = [("a", "b"), ("b", "c"), ("a", "c")]
    mu1 = cf.Measure({"a": "1/2", "b": "1/2"}, domain=["a", "b", "c"])
    mu2 = cf.Measure({"c": "1"}, domain=["a", "b", "c"])
    verdict = cf.dominates(chain_pairs, mu1, mu2)
    assert verdict.dominates
    cert = verdict.flow()
    div = cert.divergence()
    assert frac(div["a"]) == frac("1/2")
    assert frac(div["c"]) == frac("-1")
    oracle = cf.dominates_oracle(chain_pairs, mu1, mu2)
    assert oracle.dominates == verdict.dominates

    flipped = cf.dominates(chain_pairs, mu2, mu1)
    assert not flipped.dominates
    up_set = flipped.violating_up_set()
    assert up_set is not None and "c" in up_set

    # chain condition agrees
    closed = cf.chain_condition(["a", "b", "c"], mu1, mu2)
    assert closed.dominates

    # compatible coupling has the right marginals
    coupling = cf.build_compatible_coupling(chain_pairs, mu1, mu2)
    m1, m2 = coupling.marginals()
    assert frac(m1.get("a")) == frac("1/2")
    assert frac(m2.get("c")) == 1
    assert coupling.is_economic()

    # flows: decomposition round trip and stabilization
    flow = cf.Flow([("a", "b", "1/2"), ("b", "c", "1/2"), ("a", "c", "1/4")])
    assert flow.has_acyclic_support()
    pm = cf.path_decompose(flow)
    assert frac(pm.total_weight()) == frac("3/4")
    stable = cf.stabilize_decomposition(pm)
    assert stable.is_stable()

    # both coupling builders agree on the marginals
    mu1_flow = cf.Measure({"a": "3/4", "b": "1/4"}, domain=["a", "b", "c"])
    led = cf.couple(flow, mu1_flow, method="ledger")
    dec = cf.couple(flow, mu1_flow, method="decomposition")
    for c in (led, dec):
        first, second = c.marginals()
        assert frac(first.get("a")) == frac("3/4")
        assert frac(second.get("c")) == frac("3/4")
    assert frac(dec.off_diagonal_mass()) == frac("3/4")

    # transport: value matches the hand-computed optimum and the closed form
    vertices = ["0", "1", "2"]
    edges = [
        ("0", "1", "2"),
        ("1", "0", "2"),
        ("1", "2", "3"),
        ("2", "1", "3"),
    ]
    nu1 = cf.Measure({"0": "1"}, domain=vertices)
    nu2 = cf.Measure({"2": "1"}, domain=vertices)
    value, opt_flow, opt_coupling = cf.wasserstein(vertices, edges, nu1, nu2)
    assert frac(value) == 5
    assert frac(opt_flow.total_mass()) == 2
    closed = cf.chain_wasserstein(vertices, ["2", "3"], ["2", "3"], nu1, nu2)
    assert frac(closed) == 5
    assert frac(cf.geodesic_cost(vertices, edges, "0", "2")) == 5

    # Holley criterion and the all-flows-equal probe on {0,1}^2
    u = cf.Measure({"00": "1/4", "01": "1/4", "10": "1/4", "11": "1/4"})
    holds, witness = cf.holley_hypercube(2, u, u)
    assert holds and witness is None
    bottom = cf.Measure({"00": "1"}, domain=["00", "01", "10", "11"])
    top = cf.Measure({"11": "1"}, domain=["00", "01", "10", "11"])
    assert cf.lattice_all_flows_optimal(2, bottom, top, probes=10, seed=7)

    print("coupflow python smoke test: all checks passed")


if __name__ == "__main__":
    main()
