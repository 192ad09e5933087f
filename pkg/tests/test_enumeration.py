import pytest

from supseq.automata import Event, compose_all, new_automaton
from supseq.enumeration import count_sequences, enumerate_sequences
from supseq.modeling import repetitive_task, single_task


def test_single_task_enumeration():
    listing = enumerate_sequences(single_task("A"))
    assert listing.sequences == (("A_start", "A_done"),)
    assert listing.complete
    assert not listing.language_infinite


def test_two_independent_tasks_give_six_interleavings():
    composite = compose_all([single_task("A"), single_task("B")])
    listing = enumerate_sequences(composite)
    assert len(listing.sequences) == 6
    assert listing.complete
    assert len(set(listing.sequences)) == 6
    for trace in listing.sequences:
        assert composite.accepts(trace)


def test_repetitive_task_language_is_infinite():
    listing = enumerate_sequences(repetitive_task("F"), max_len=10)
    assert listing.language_infinite
    assert not listing.complete
    assert ("F_start", "F_done") in listing.sequences
    assert () in listing.sequences


def test_enumeration_is_deterministic_and_ordered():
    composite = compose_all([single_task("A"), single_task("B")])
    first = enumerate_sequences(composite)
    second = enumerate_sequences(composite)
    assert first.sequences == second.sequences
    # depth-first with alphabetical choice: the all-A-first trace leads
    assert first.sequences[0] == ("A_start", "A_done", "B_start", "B_done")


def test_max_count_truncates_and_clears_complete():
    composite = compose_all([single_task("A"), single_task("B")])
    listing = enumerate_sequences(composite, max_count=3)
    assert len(listing.sequences) == 3
    assert not listing.complete


def test_max_len_truncates_and_clears_complete():
    composite = compose_all([single_task("A"), single_task("B")])
    listing = enumerate_sequences(composite, max_len=2)
    assert listing.sequences == ()
    assert not listing.complete
    assert not listing.language_infinite


def test_enumeration_prunes_states_that_cannot_complete():
    x, y = Event("x", True), Event("y", True)
    a = new_automaton(
        "a",
        ["s0", "ok", "dead"],
        [x, y],
        [("s0", "x", "ok"), ("s0", "y", "dead"), ("dead", "y", "dead")],
        "s0",
        ["ok"],
    )
    listing = enumerate_sequences(a, max_len=50)
    assert listing.sequences == (("x",),)
    assert listing.complete  # the dead cycle cannot complete, so it does not truncate
    assert not listing.language_infinite


def test_count_matches_enumeration_when_complete():
    composite = compose_all([single_task("A"), single_task("B")])
    listing = enumerate_sequences(composite)
    assert listing.complete
    assert count_sequences(composite) == len(listing.sequences) == 6


def test_count_single_task():
    assert count_sequences(single_task("A")) == 1


def test_count_infinite_language():
    assert count_sequences(repetitive_task("F")) is None


def test_count_zero_when_nothing_completes():
    x = Event("x", True)
    a = new_automaton("a", ["s0", "s1"], [x], [("s0", "x", "s1")], "s0", [])
    assert count_sequences(a) == 0


def test_case_study_supervisor_enumeration(case_study, case_study_supervisor):
    listing = enumerate_sequences(case_study_supervisor, max_len=16, max_count=50_000)
    assert listing.language_infinite
    assert not listing.complete
    assert count_sequences(case_study_supervisor) is None
    assert listing.sequences
    for trace in listing.sequences:
        assert case_study_supervisor.accepts(trace)
    assert len(set(listing.sequences)) == len(listing.sequences)


def test_bound_validation():
    with pytest.raises(ValueError):
        enumerate_sequences(single_task("A"), max_len=-1)
    with pytest.raises(ValueError):
        enumerate_sequences(single_task("A"), max_count=0)
