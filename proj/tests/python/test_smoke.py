import random

import pytest

import rwcrdc


def test_crh_vector_helpers():
    assert rwcrdc.merge([1, 0, 2], [0, 3, 1]) == [1, 3, 2]
    assert rwcrdc.has_unseen([1, 0], [0, 1])
    assert not rwcrdc.has_unseen([1, 1], [1, 0])


def test_remove_beats_concurrent_inc():
    a = rwcrdc.Replica("rmv_win", 0, 2)
    b = rwcrdc.Replica("rmv_win", 1, 2)
    add = b.prepare("add", 1, 5)
    b.apply(add)
    a.apply(add)
    rmv = a.prepare("rmv", 1)
    a.apply(rmv)
    inc = b.prepare("inc", 1, 4)
    b.apply(inc)
    a.apply(inc)
    b.apply(rmv)
    assert a.fingerprint() == b.fingerprint()
    assert a.query("lookup", 1) is False
    assert a.remove_history(1) == [1, 0]


def test_preconditions_return_none():
    r = rwcrdc.Replica("opt_rwset", 0, 1)
    assert r.prepare("rmv", 3) is None
    assert r.query("get_max") is None
    with pytest.raises(ValueError):
        r.prepare("jump", 1)


def test_bad_bytes_raise():
    r = rwcrdc.Replica("rmv_win", 0, 2)
    with pytest.raises(rwcrdc.WireFormatError):
        r.apply(b"\x07")


def test_random_schedules_converge():
    rng = random.Random(3)
    for _ in range(20):
        n = 3
        reps = [rwcrdc.Replica("rmv_win", i, n) for i in range(n)]
        pending = []
        for _ in range(60):
            if pending and rng.random() < 0.5:
                target, msg = pending.pop(rng.randrange(len(pending)))
                reps[target].apply(msg)
                continue
            who = rng.randrange(n)
            op = rng.choice(["add", "rmv", "inc"])
            msg = reps[who].prepare(op, rng.randrange(4), rng.randrange(-5, 10))
            if msg is None:
                continue
            reps[who].apply(msg)
            pending += [(t, msg) for t in range(n) if t != who]
        rng.shuffle(pending)
        for target, msg in pending:
            reps[target].apply(msg)
        assert len({r.fingerprint() for r in reps}) == 1


def test_simulation_and_scripts():
    sim = rwcrdc.Simulation("rmv_win", dcs=1, replicas_per_dc=2, seed=4)
    assert sim.replicas == 2
    assert sim.submit(0, "add", 9, 3, 0.0) is None
    assert sim.submit(1, "rmv", 9, 0, 0.0) is not None
    sim.run_to_quiescence()
    assert sim.converged()
    assert sim.query(1, "get_max", at_ms=sim.now) == (9, 3)

    answers, prints = rwcrdc.replay_script("replicas 1 2\n0 0 add x 4\n50 1 get_pri x\n")
    assert answers == [4]
    assert len(set(prints)) == 1
    with pytest.raises(rwcrdc.ScriptError):
        rwcrdc.replay_script("0 0 add 1\n0 0 hop 1\n")


def test_figures_and_trial():
    assert all(not failures for failures in rwcrdc.run_figures().values())
    out = rwcrdc.run_trial("rmv_win", ops=2000, dcs=1, replicas_per_dc=3, keys=100)
    assert out["converged"]
    assert out["probes"] > 0
    assert out["overhead"] == pytest.approx(3.0)
