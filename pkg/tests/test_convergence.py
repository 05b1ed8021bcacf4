import pytest

from src.convergence import (MeasureSequence, converges_metric, converges_pointwise, default_panel,
                             diagnose, failure_certificate, in_neighborhood, is_cauchy,
                             matched_tolerances, metric_trajectory, separating_function,
                             star_condition)
from src.errors import InvalidArgumentError, SpaceMismatchError
from src.generators import (atom_drift, persistent_far_atom, split_weight_drift, support_splitting,
                            weight_drift)
from src.measure import TestFunction, dirac, make_measure

EPS = 0.1
TAIL = 10


@pytest.fixture
def abc_measure(line_space):
    return make_measure(line_space, [("a", 0.0), ("c", -1.0)])


def test_constant_sequence_satisfies_everything(abc_measure):
    seq = MeasureSequence([abc_measure] * 8, abc_measure)
    star = star_condition(seq, abc_measure)
    assert star.satisfied
    assert star.worst_distance == 0.0 and star.worst_weight == 0.0
    assert converges_metric(seq, abc_measure, 1e-12)
    assert converges_pointwise(seq, abc_measure, eps=1e-12)
    assert metric_trajectory(seq, abc_measure) == [0.0] * 8


def test_sequence_validation(line_space, abc_measure, worked_space):
    with pytest.raises(InvalidArgumentError):
        MeasureSequence([])
    with pytest.raises(SpaceMismatchError):
        MeasureSequence([abc_measure], dirac(worked_space, "a"))
    with pytest.raises(InvalidArgumentError):
        MeasureSequence([abc_measure] * 3).tail(4)
    assert [t for t, _ in MeasureSequence([abc_measure] * 8).tail()] == [7, 8]


def test_matched_tolerances():
    tol = matched_tolerances(0.1, height=1.0, radius=0.25)
    assert tol["metric"] == 0.1
    assert tol["pointwise"] == pytest.approx(0.4)
    assert tol["eps_x"] + tol["eps_lambda"] == pytest.approx(0.1)


def test_star_condition_on_drifting_atom():
    space, seq, mu = atom_drift(40)
    report = star_condition(seq, mu, eps_x=0.05, eps_lambda=0.05, tail=TAIL)
    assert report.satisfied
    b = next(a for a in report.atoms if a.point == "b")
    assert b.steps == list(range(31, 41))
    assert b.distance_residuals[-1] == pytest.approx(1 / 40)
    assert b.worst_weight == 0.0


def test_star_condition_detects_missing_atom():
    _, seq, mu = atom_drift(40)
    report = star_condition(seq, mu, eps_x=0.01, eps_lambda=0.01, tail=TAIL)
    assert not report.satisfied
    assert report.worst_distance == pytest.approx(1 / 31)


def test_one_sided_star_ignores_stray_atoms():
    _, seq, mu = persistent_far_atom(40)
    assert star_condition(seq, mu, 0.05, 0.05, TAIL, symmetric=False).satisfied
    two_sided = star_condition(seq, mu, 0.05, 0.05, TAIL)
    assert not two_sided.satisfied
    assert {p for _, p in two_sided.reverse_failures} == {"f"}


def test_in_neighborhood_examples(line_space, abc_measure):
    panel = default_panel(line_space, abc_measure)
    assert in_neighborhood(abc_measure, abc_measure, panel, 1e-9)

    constants = [TestFunction.constant(line_space, v) for v in (-1.0, 0.0, 3.0)]
    assert in_neighborhood(dirac(line_space, "b"), abc_measure, constants, 1e-9)

    eps = 0.1
    moved = make_measure(line_space, [("a", 0.0), ("c", -1.0 + 2 * eps)])
    bump = separating_function(line_space, "c", ["a"], height=2.0)
    assert not in_neighborhood(moved, abc_measure, [bump], eps)
    assert in_neighborhood(moved, abc_measure, [bump], 3 * eps) == in_neighborhood(
        abc_measure, moved, [bump], 3 * eps)


def test_separating_function(line_space):
    phi = separating_function(line_space, "b", ["a", "c"], height=4.0)
    assert phi.values == {"a": 0.0, "b": 4.0, "c": 0.0}
    with pytest.raises(InvalidArgumentError):
        separating_function(line_space, "b", ["b"], height=1.0)


def test_default_panel_covers_tail_supports(line_space, abc_measure):
    panel = default_panel(line_space, abc_measure, [dirac(line_space, "b")], radius=0.5)
    assert len(panel) == 4
    assert panel[0].values == {"a": 0.0, "b": 0.0, "c": 0.0}
    assert [max(phi.values, key=phi.values.get) for phi in panel[1:]] == ["a", "b", "c"]


@pytest.mark.parametrize("family", [atom_drift, split_weight_drift, support_splitting])
def test_convergent_families_are_accepted_by_all_three(family):
    _, seq, mu = family(40)
    report = diagnose(seq, mu, EPS, TAIL)
    assert report.metric and report.pointwise and report.star.satisfied
    assert report.agree
    assert report.certificate is None


def test_persistent_far_atom_is_rejected_by_all_three():
    _, seq, mu = persistent_far_atom(40)
    report = diagnose(seq, mu, EPS, TAIL)
    assert not report.metric and not report.pointwise and not report.star.satisfied
    assert report.agree
    assert min(report.trajectory) >= 0.6 - 1e-12

    cert = report.certificate
    assert cert is not None
    assert cert.point == "f" and cert.step == 31
    assert cert.gap > report.tolerances["pointwise"]


def test_weight_drift_separates_metric_from_pointwise():
    _, seq, mu = weight_drift(40)
    report = diagnose(seq, mu, EPS, TAIL)
    assert report.pointwise and report.star.satisfied
    assert not report.metric
    assert not report.agree
    # the lower-weight atom can only be matched to the top atom at a, costing about 2
    assert report.trajectory[-1] == pytest.approx(2 - 1 / 40)


def test_failure_certificate_is_none_for_convergent_sequence():
    _, seq, mu = atom_drift(40)
    assert failure_certificate(seq, mu, eps=0.4, eps_x=0.05, tail=TAIL) is None


def test_is_cauchy():
    _, seq, mu = persistent_far_atom(40)
    assert is_cauchy(seq, EPS, TAIL)
    assert not converges_metric(seq, mu, EPS, TAIL)

    _, drift, _ = weight_drift(40)
    assert not is_cauchy(drift, 1e-4, TAIL)


def test_diagnose_accepts_star_overrides():
    _, seq, mu = atom_drift(40)
    report = diagnose(seq, mu, EPS, TAIL, eps_x=0.01)
    assert report.tolerances["eps_x"] == 0.01
    assert not report.star.satisfied
    assert report.to_dict()["star"]["eps_x"] == 0.01


@pytest.mark.parametrize("eps_x, eps_lambda", [(0.0, 0.05), (0.05, 0.0), (-0.1, 0.05)])
def test_star_condition_needs_positive_tolerances(eps_x, eps_lambda):
    _, seq, mu = atom_drift(12)
    with pytest.raises(InvalidArgumentError):
        star_condition(seq, mu, eps_x=eps_x, eps_lambda=eps_lambda)
    with pytest.raises(InvalidArgumentError):
        diagnose(seq, mu, EPS, eps_x=eps_x, eps_lambda=eps_lambda)
