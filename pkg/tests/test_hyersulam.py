import numpy
import pytest

from errors import ExcessJumps, InputError, NotHyperbolic, NotIntegrable
from expfun import ExpPolyFunction, ExpPolyTerm, Jump, Support, l1_norm
from fileio import validate
from fourier import Grid, sample
from hyersulam import (PROBE_LADDER, Problem, ProbeTable, StabilityReport, counterexample_probe, error_representation,
                       perturbation_suite, probe_ladder, random_trial, residual, solve, verify)
from poly import Poly

FIRST_ORDER = Poly([1, 1])


def causal(*terms):
    return ExpPolyFunction([ExpPolyTerm(c, m, z, Support.pos()) for c, m, z in terms])


@pytest.fixture
def problem(decay2):
    return Problem(FIRST_ORDER, decay2)


def test_solve_first_order(problem):
    y = solve(problem)
    t = numpy.linspace(-2, 8, 21)
    numpy.testing.assert_allclose(y(t), numpy.where(t >= 0, numpy.exp(-t) - numpy.exp(-2 * t), 0), atol=1e-12)


def test_solve_zero_forcing():
    assert solve(Problem(FIRST_ORDER, ExpPolyFunction())).is_zero()


def test_solve_second_order():
    y = solve(Problem(Poly([2, 3, 1]), causal((1, 0, -3))))
    t = numpy.linspace(0, 8, 17)
    expected = 0.5 * numpy.exp(-t) - numpy.exp(-2 * t) + 0.5 * numpy.exp(-3 * t)
    numpy.testing.assert_allclose(y(t), expected, atol=1e-10)


def test_solve_on_samples(problem, decay2):
    grid = Grid.reference()
    sampled = Problem(FIRST_ORDER, sample(decay2, grid))
    y = solve(sampled)
    assert y.grid == grid
    exact = sample(solve(problem), grid)
    assert numpy.max(numpy.abs(y.values - exact.values)) <= 1e-6


def test_residual_of_exact_solution(problem):
    res = residual(problem, solve(problem))
    assert res.norm <= 1e-10
    assert res.jumps == ()


def test_residual_reports_step(decay):
    res = residual(Problem(FIRST_ORDER, ExpPolyFunction()), decay)
    assert res.norm == 0
    assert res.jumps == (Jump(0.0, 1, 0),)


def test_residual_scales_with_the_candidate(problem):
    res = residual(problem, solve(problem) * 1.01)
    assert res.norm == pytest.approx(0.005, rel=1e-8)


def test_residual_is_affine(problem, rng):
    y = solve(problem)
    w = causal((rng.normal(), 2, -0.7 + 1j))
    base = residual(problem, y + w).h
    doubled = residual(problem, y + w * 2).h
    unforced = residual(Problem(FIRST_ORDER, ExpPolyFunction()), w).h
    assert l1_norm(doubled - base - unforced) <= 1e-12


def test_residual_rejects_low_order_jumps(decay):
    with pytest.raises(ExcessJumps) as info:
        residual(Problem(Poly([2, 3, 1]), ExpPolyFunction()), decay)
    assert info.value.jumps[0].order == 0
    assert info.value.exit_code == 4


def test_problem_checks_forcing():
    with pytest.raises(NotIntegrable):
        Problem(FIRST_ORDER, causal((1, 0, 1)))
    with pytest.raises(InputError):
        Problem(FIRST_ORDER, lambda t: t)


def test_verify_exact_candidate(problem):
    report = verify(problem, solve(problem))
    assert report.distance <= 1e-12
    assert report.satisfied
    assert report.mode == 'closed'
    validate(report.to_dict(), 'report')


def test_verify_tight_candidate(problem):
    y = solve(problem) + causal((0.01, 1, -1))
    report = verify(problem, y)
    assert report.residual_norm == pytest.approx(0.01, rel=1e-8)
    assert report.distance == pytest.approx(0.01, rel=1e-8)
    assert report.ratio == pytest.approx(1, abs=1e-6)
    assert report.satisfied
    assert report.representation_error <= 1e-10


def test_verify_keeps_top_order_jumps(decay):
    report = verify(Problem(FIRST_ORDER, ExpPolyFunction()), decay)
    assert report.jumps == (Jump(0.0, 1, 0),)
    assert report.residual_norm == 0
    assert report.distance == pytest.approx(1)
    assert not report.satisfied
    assert report.representation_error <= 1e-12


def test_verify_on_samples(problem, decay2):
    grid = Grid.reference()
    sampled = Problem(FIRST_ORDER, sample(decay2, grid))
    report = verify(sampled, sample(solve(problem), grid))
    assert report.mode == 'sampled'
    assert report.representation_error is None
    assert report.residual_norm < 1e-2
    assert report.satisfied


def test_error_representation_on_random_trials(rng):
    for _ in range(5):
        prob, perturbation = random_trial(rng, max_degree=3)
        y = solve(prob) + perturbation
        representation, error = error_representation(prob, y)
        assert error <= 1e-8 * max(1.0, l1_norm(perturbation))


def test_non_hyperbolic_problems_are_rejected(decay):
    prob = Problem(Poly([-1j, 1]), decay)
    with pytest.raises(NotHyperbolic):
        solve(prob)
    with pytest.raises(NotHyperbolic):
        verify(prob, decay)


def test_stability_report_bound():
    report = StabilityReport(2.0, 0.5, 1.0000005, slack=1e-6)
    assert report.bound == 1.0
    assert report.satisfied
    assert not StabilityReport(2.0, 0.5, 1.01, slack=1e-6).satisfied
    assert numpy.isnan(StabilityReport(2.0, 0.0, 0.0, slack=0).ratio)


def test_rotating_decay_probe():
    report = counterexample_probe(0.1, 'paper')
    assert report.distance >= 1 - 0.1 / numpy.sqrt(2)
    assert report.notes['claimed_lower_bound'] == pytest.approx(1 - 0.1 / numpy.sqrt(2))
    # the O(1) term e^((i-1)t)u(t) stays in y' - i y
    assert not report.notes['residual_equals_eps']
    assert report.residual_norm > 0.5


@pytest.mark.parametrize('T, ratio', [(2.0, 1.0), (20.0, 10.0)])
def test_slow_probe(T, ratio):
    report = counterexample_probe(0.1, 'slow', T)
    assert report.residual_norm == pytest.approx(0.1, rel=1e-9)
    assert report.distance == pytest.approx(0.1 * T / 2, rel=1e-9)
    assert report.ratio == pytest.approx(ratio, rel=1e-9)


def test_probe_ladder_grows_without_bound():
    table = probe_ladder(0.1)
    ratios = [r.ratio for r in table.reports]
    assert ratios == pytest.approx([T / 2 for T in PROBE_LADDER], rel=1e-9)
    assert all(a < b for a, b in zip(ratios, ratios[1:]))
    frame = table.to_frame()
    assert list(frame.columns) == ['parameter', 'residual', 'distance', 'ratio']
    assert list(frame['parameter']) == list(PROBE_LADDER)
    validate(table.to_dict(), 'probe')


@pytest.mark.parametrize('eps, family, T', [(0, 'paper', None), (-1, 'slow', 4), (0.1, 'slow', None),
                                            (0.1, 'slow', 0.5), (0.1, 'fast', 4)])
def test_probe_rejects_bad_arguments(eps, family, T):
    with pytest.raises(InputError):
        counterexample_probe(eps, family, T)


def test_probe_table_single_row():
    table = ProbeTable([counterexample_probe(0.2, 'paper')])
    assert table.to_frame()['parameter'][0] == 0.2


def test_perturbation_suite():
    result = perturbation_suite(trials=6, seed=3, max_degree=3)
    assert result.all_satisfied
    assert numpy.all(result.ratios <= 1 + 1e-6)
    validate(result.to_dict(), 'suite')
    again = perturbation_suite(trials=6, seed=3, max_degree=3)
    numpy.testing.assert_array_equal(again.ratios, result.ratios)


def test_sampled_candidate_with_a_step_is_rejected(decay):
    grid = Grid(30, 2 ** 13)
    with pytest.raises(ExcessJumps) as info:
        verify(Problem(Poly([2, 3, 1]), ExpPolyFunction()), sample(decay, grid))
    jump = info.value.jumps[0]
    assert jump.order == 0
    assert abs(jump.location) <= grid.h
    assert jump.size == pytest.approx(1, abs=1e-3)
    assert info.value.exit_code == 4


def test_smooth_sampled_candidate_is_accepted(decay):
    grid = Grid(30, 2 ** 13)
    prob = Problem(Poly([2, 3, 1]), decay)
    report = verify(prob, sample(solve(prob), grid))
    assert report.mode == 'sampled'
    assert report.distance == 0


def test_rotating_decay_reports_its_jump():
    eps = 0.1
    report = counterexample_probe(eps, 'paper')
    jumps = report.notes['jumps']
    assert len(jumps) == 1
    assert jumps[0]['location'] == 0
    assert jumps[0]['order'] == 0
    assert jumps[0]['size'] == pytest.approx([1 + eps / numpy.sqrt(2), 0])
    assert counterexample_probe(eps, 'slow', 4.0).notes['jumps'] == []
    validate(ProbeTable([report]).to_dict(), 'probe')


def test_perturbation_suite_at_full_size():
    result = perturbation_suite(trials=100, seed=3)
    assert result.all_satisfied
    assert len(result.reports) == 100
    assert numpy.nanmax(result.ratios) <= 1 + 1e-6


def test_first_order_error_representation(rng):
    for _ in range(20):
        prob, perturbation = random_trial(rng, max_degree=1)
        assert prob.order == 1
        y = solve(prob) + perturbation
        _, error = error_representation(prob, y)
        assert error <= 1e-9 * max(1.0, l1_norm(perturbation))
