from fractions import Fraction

import pytest

from dsys.dh import DHSystem
from dsys.deligne import DeligneSystem
from dsys.harness import (
    DistanceTrace, HarnessError, RaySampler, convergence_trace, generate,
    random_morphism, run_theorem_campaign, verify_system,
)
from dsys.io_dsys import format_instance
from dsys.sl2 import is_orbit

FAST = RaySampler((Fraction(2), Fraction(4), Fraction(8)))


class TestGenerate:
    def test_deterministic(self):
        a = generate("dh", 2, 6, 11, "transport")
        b = generate("dh", 2, 6, 11, "transport")
        assert format_instance(a.system) == format_instance(b.system)

    def test_orbit_mode(self):
        inst = generate("deligne", 2, 6, 3, "none")
        assert inst.orbit and is_orbit(inst.system)

    def test_transport_flags(self):
        inst = generate("dh", 2, 7, 0, "transport")
        assert inst.system.validate().ok
        assert inst.recovers_seed
        assert inst.delta_zero

    def test_transport_breaks_orbit_somewhere(self):
        broke = sum(not generate("deligne", 2, 6, s, "transport").orbit
                    for s in range(6))
        assert broke >= 3

    def test_hodge_mode(self):
        inst = generate("dh", 1, 5, 2, "hodge")
        assert inst.system.validate().ok
        assert inst.mode == "hodge"

    def test_pure_weight(self):
        inst = generate("dh", 2, 6, 4, "transport", pure_weight=0)
        assert inst.system.W.jumps() == (0,)


class TestTraces:
    def test_orbit_all_zero(self):
        inst = generate("dh", 2, 6, 1, "none")
        for q in ("nhat", "fhat", "limit", "splitting"):
            tr = convergence_trace(inst.system, q, FAST)
            assert tr.all_zero(), q

    def test_orbit_series_zero(self):
        inst = generate("dh", 2, 6, 1, "none", pure_weight=0)
        tr = convergence_trace(inst.system, "series", FAST)
        assert tr.all_zero()

    def test_perturbed_certified(self):
        inst = generate("dh", 2, 7, 0, "transport")
        for q in ("nhat", "fhat", "limit", "splitting"):
            tr = convergence_trace(inst.system, q, FAST)
            assert tr.certified() and not tr.notes, q

    def test_series_needs_pure(self):
        inst = generate("dh", 2, 7, 0, "transport")
        if len(inst.system.W.jumps()) > 1:
            with pytest.raises(HarnessError):
                convergence_trace(inst.system, "series", FAST)

    def test_deligne_quantities(self):
        inst = generate("deligne", 2, 6, 2, "transport")
        tr = convergence_trace(inst.system, "nhat", FAST)
        assert tr.certified()
        with pytest.raises(HarnessError):
            convergence_trace(inst.system, "fhat", FAST)

    def test_trace_certification_logic(self):
        dec = DistanceTrace("x", [(Fraction(2), Fraction(1, 4)),
                                  (Fraction(4), Fraction(1, 16)),
                                  (Fraction(8), Fraction(1, 64))])
        assert dec.certified() and not dec.all_zero()
        bad = DistanceTrace("x", [(Fraction(2), Fraction(1, 4)),
                                  (Fraction(4), Fraction(1, 2))])
        assert not bad.certified()


class TestMorphisms:
    def test_random_morphism_checks(self):
        for seed in range(3):
            f = random_morphism("deligne", 1, 6, seed)
            f.check()

    def test_random_dh_morphism(self):
        f = random_morphism("dh", 1, 6, 1)
        f.check()


class TestCampaigns:
    def test_classification(self):
        rep = run_theorem_campaign("classification", 3, 2, 6, seed=0,
                                   kind="dh", sampler=FAST)
        assert rep.ok

    def test_abelian(self):
        rep = run_theorem_campaign("abelian", 3, 1, 6, seed=0,
                                   kind="deligne", sampler=FAST)
        assert rep.ok

    def test_render_deterministic(self):
        a = run_theorem_campaign("tau-postconditions", 3, 2, 6, seed=0,
                                 sampler=FAST)
        b = run_theorem_campaign("tau-postconditions", 3, 2, 6, seed=0,
                                 sampler=FAST)
        assert a.render_text() == b.render_text()
        assert a.render_csv() == b.render_csv()

    def test_tower_rmf(self):
        rep = run_theorem_campaign("tower-rmf", 2, 2, 6, seed=2,
                                   sampler=FAST)
        assert rep.ok

    def test_jobs_parallel_matches_serial(self):
        a = run_theorem_campaign("classification", 4, 1, 5, seed=0,
                                 kind="deligne", sampler=FAST, jobs=1)
        b = run_theorem_campaign("classification", 4, 1, 5, seed=0,
                                 kind="deligne", sampler=FAST, jobs=2)
        assert a.render_text() == b.render_text()


class TestVerifySystem:
    def test_tau_on_system(self):
        inst = generate("deligne", 2, 6, 0, "transport")
        res = verify_system(inst.system, "tau-postconditions", FAST)
        assert res.ok

    def test_wrong_kind_reports(self):
        inst = generate("deligne", 1, 4, 0, "none")
        res = verify_system(inst.system, "imhm-threshold", FAST)
        assert not res.ok and "error" in res.detail


class TestHodgeModeDelta:
    def test_delta_nonzero_occurs_and_is_flagged(self):
        hits = 0
        for seed in range(14):
            inst = generate("dh", 1, 5, 100 + seed, "hodge")
            assert inst.system.validate().ok
            if not inst.delta_zero:
                hits += 1
        assert hits >= 1
