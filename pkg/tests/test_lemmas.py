import dataclasses

import pytest

from esos.errors import InputError
from esos.graphs import Graph, bit, verify_H_certificate
from esos.lemmas import (
    CaseOutcome,
    LEMMA_IDS,
    analyze,
    compute_surplus2,
    enumerate_instances,
    make_instance,
    sample_instances,
    validate_instance,
    verify_outcome,
)
from esos.paths import UPath


def bowtie_plus():
    # two excluded vertices hang off a dense core; drives case C
    return Graph.from_edges(
        6,
        [(0, 1), (1, 2), (0, 2), (2, 3), (3, 0), (1, 3), (4, 1), (5, 2), (0, 4)],
    )


def test_make_instance_computes_surplus():
    G = Graph.complete(5)
    P = UPath((0, 1))
    Q = UPath((0, 2))
    inst = make_instance(3, G, 0, P, Q, w1=3, w2=4)
    want = compute_surplus2(3, G, 0, P, 2, w1=3, w2=4)
    assert inst.surplus2 == want and inst.x == 2
    validate_instance(inst)


def test_validation_rejects_corrupted_surplus():
    G = Graph.complete(5)
    inst = make_instance(3, G, 0, UPath((0, 1)), UPath((0, 2)), w1=3, w2=4)
    broken = dataclasses.replace(inst, surplus2=inst.surplus2 + 2)
    with pytest.raises(InputError):
        validate_instance(broken)
    with pytest.raises(InputError):
        analyze(broken)


def test_validation_rejects_non_maximizing_path():
    # 0-1-2 triangle plus pendant 0-3: from 0 with nothing excluded,
    # the path 0-3 has fewer inner edges than 0-1
    G = Graph.from_edges(6, [(0, 1), (1, 2), (0, 2), (0, 3), (0, 4), (4, 5)])
    bad = make_instance(6, G, 0, UPath((0, 3)), UPath((0, 4)), w=5)
    with pytest.raises(InputError):
        validate_instance(bad)


def test_validation_rejects_overlapping_probe():
    G = Graph.complete(5)
    with pytest.raises(InputError):
        validate_instance(
            make_instance(3, G, 0, UPath((0, 1)), UPath((0, 1)), w1=3, w2=4)
        )


def test_lemma3_case_a_forced():
    # P = 0-1; w1, w2 isolated from L; x sees all of L
    G = Graph.from_edges(5, [(0, 1), (0, 2), (2, 1), (0, 3)])
    inst = make_instance(3, G, 0, UPath((0, 1)), UPath((0, 2)), w1=3, w2=4)
    assert inst.surplus2 == 0
    out = analyze(inst)
    assert out.case == "A"
    assert verify_outcome(inst, out)


def test_lemma3_case_b_balanced_square():
    # V(P)+x induces a 4-cycle; the excluded pair sees half of L each
    G = Graph.from_edges(
        7,
        [(0, 1), (1, 2), (0, 3), (3, 2), (4, 2), (5, 2), (0, 6)],
    )
    inst = make_instance(3, G, 0, UPath((0, 1, 2)), UPath((0, 3)), w1=4, w2=5)
    assert inst.surplus2 == 0
    out = analyze(inst)
    assert out.case == "B"
    assert verify_H_certificate(G, out.certificate)
    assert out.certificate.vertex_mask() == 0b1111
    assert out.facts["p_half_matches"] == [1, 2]
    assert verify_outcome(inst, out)


def test_lemma3_case_c_dense():
    G = Graph.complete(6)
    inst = make_instance(3, G, 0, UPath((0, 1, 2)), UPath((0, 3)), w1=4, w2=5)
    out = analyze(inst)
    assert out.case == "C"
    assert verify_outcome(inst, out)
    lp = out.paths[0]
    assert lp.anchor == 0 and lp.length >= 2


def test_lemma4_cases():
    G = Graph.complete(6)
    inst = make_instance(4, G, 0, UPath((0, 1, 2)), UPath((3, 4)), x=5)
    out = analyze(inst)
    assert out.case == "C"
    a, b = out.paths
    assert a.length == 2 and b.length == 3
    assert a.mask() & b.mask() == 1
    assert verify_outcome(inst, out)


def test_lemma5_case_a():
    # x sees all of L; the excluded edge vw is a detached component, so no
    # length-2 companion through w exists and case C is impossible
    G = Graph.from_edges(5, [(0, 1), (0, 2), (2, 1), (3, 4)])
    inst = make_instance(5, G, 0, UPath((0, 1)), UPath((0, 2)), v=3, w=4)
    assert inst.surplus2 == 0
    out = analyze(inst)
    assert out.case == "A"
    assert verify_outcome(inst, out)


def test_lemma5_case_c_wide_companion():
    G = Graph.complete(6)
    inst = make_instance(5, G, 0, UPath((0, 1, 2)), UPath((0, 3)), v=4, w=5)
    out = analyze(inst)
    assert out.case == "C"
    pp, r = out.paths
    assert pp.length == 2 and r.length == 2
    assert bit(5) & r.mask()
    assert not pp.mask() & r.mask()
    assert verify_outcome(inst, out)


def test_lemma6_case_a_when_w_detached():
    # p odd kills case B, the isolated w kills case C, x sees all of L:
    # the e(w,L)=0 arm of case A is forced
    G = Graph.from_edges(5, [(0, 1), (1, 3), (0, 3)])
    inst = make_instance(6, G, 0, UPath((0, 1)), UPath((0, 3)), w=4)
    assert inst.surplus2 == 0
    out = analyze(inst)
    assert out.case == "A"
    assert out.facts["e_w_L"] == 0
    assert verify_outcome(inst, out)


def test_lemma6_case_b_square():
    G = Graph.from_edges(
        6, [(0, 1), (1, 2), (0, 3), (3, 2), (4, 2), (0, 5), (5, 4)]
    )
    inst = make_instance(6, G, 0, UPath((0, 1, 2)), UPath((0, 3)), w=4)
    out = analyze(inst)
    assert verify_outcome(inst, out)


def test_analyzer_order_prefers_c():
    # a dense host admits replacement paths, so C must win even though the
    # surplus is 0 and a balanced split also exists
    G = Graph.complete(4)
    inst = make_instance(6, G, 0, UPath((0, 1)), UPath((0, 2)), w=3)
    out = analyze(inst)
    assert out.case == "C"


def test_sample_instances_deterministic_and_validated():
    a, da = sample_instances(3, 6, 10, seed=1)
    b, db = sample_instances(3, 6, 10, seed=1)
    assert [i.to_json() for i in a] == [i.to_json() for i in b]
    assert (da, db) == (da, da)
    assert len(a) == 10
    for inst in a:
        validate_instance(inst)
    assert sample_instances(5, 6, 0, seed=3) == ([], 0)
    insts, _ = sample_instances(4, 2, 5, seed=9)
    assert insts == []


def test_sampled_outcomes_verify_for_all_lemmas():
    for lem in LEMMA_IDS:
        insts, _ = sample_instances(lem, 7, 25, seed=lem)
        assert insts, f"no instances for rule {lem}"
        for inst in insts:
            out = analyze(inst)
            assert verify_outcome(inst, out), (lem, inst.to_json(), out.to_json())


def test_exhaustive_instances_small_host():
    G = Graph.complete(5)
    seen = {3: 0, 4: 0, 5: 0, 6: 0}
    for lem in LEMMA_IDS:
        for inst in enumerate_instances(lem, G):
            seen[lem] += 1
            out = analyze(inst)
            assert verify_outcome(inst, out)
    assert all(v > 0 for v in seen.values())


def test_verify_outcome_rejects_tampered_witness():
    G = Graph.complete(6)
    inst = make_instance(3, G, 0, UPath((0, 1, 2)), UPath((0, 3)), w1=4, w2=5)
    out = analyze(inst)
    assert out.case == "C"
    bad = CaseOutcome(
        "C",
        out.facts,
        paths=(UPath((0, 1)),),
        detail=out.detail,
    )
    assert not verify_outcome(inst, bad)
    assert not verify_outcome(inst, CaseOutcome("A", {}))
