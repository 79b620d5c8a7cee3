"""
Command-Line Tests

Drives main() the way the console script does: argparse flags in, JSON on
stdout or in a file, exit status out.
"""

import json
from contextlib import ExitStack
from unittest.mock import patch

import numpy as np
import pytest

from switchgrade.barabanov import NORM_A, norm_A
from switchgrade.catalog import LOG4_OVER_PI
from switchgrade.cli import _check_marginal_stability, build_parser, main
from switchgrade.errors import LambdaInconsistencyError
from switchgrade.models import LyapunovEstimate

CHECKS = ('lambda', 'rank', 'hurwitz', 'product_identity', 'norm_A', 'norm_B', 'marginal_stability',
          'tensor_factorisation', 'flatness')


def _stdout_json(capsys) -> dict:
    return json.loads(capsys.readouterr().out)


class TestParser:
    """Usage errors exit with status 2."""

    def test_subcommand_required(self):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == 2

    @pytest.mark.parametrize('grid', ['', ' , ', '1,-1', '0', 'a,b', 'inf'])
    def test_bad_grid(self, grid):
        with pytest.raises(SystemExit) as exc:
            main(['compute-lambda', '--grid', grid])
        assert exc.value.code == 2

    def test_version(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(['--version'])
        assert exc.value.code == 0
        assert 'switchgrade' in capsys.readouterr().out

    def test_defaults(self):
        args = build_parser().parse_args(['compute-lambda'])
        assert args.method == 'both'
        assert args.beam == 64
        assert args.horizon == pytest.approx(16 * np.pi)
        assert args.grid is None


class TestComputeLambda:
    """compute-lambda subcommand."""

    def test_singleton(self, capsys):
        assert main(['compute-lambda', '--method', 'singleton', '--matrix', 'A1']) == 0
        report = _stdout_json(capsys)
        assert report['lower'] == pytest.approx(-1.0, abs=1e-14)
        assert report['matrix'] == 'A1'

    def test_angular(self, capsys):
        assert main(['compute-lambda', '--method', 'angular']) == 0
        report = _stdout_json(capsys)
        assert report['lambda'] >= 0.4412712
        assert report['angular_function_at_bound'] > 1e-4
        assert report['log4_over_pi'] == LOG4_OVER_PI
        assert report['status'] == 'PASS'

    def test_product_quarter_turn(self, tmp_path):
        out = tmp_path / 'lambda.json'
        code = main(['compute-lambda', '--method', 'product', '--grid', repr(np.pi / 2), '--horizon', '7',
                     '--beam', '8', '--json', str(out)])
        report = json.loads(out.read_text(encoding='utf-8'))
        assert code == 0
        assert report['lambda'] == pytest.approx(LOG4_OVER_PI, abs=1e-12)
        assert report['product']['method'] == 'product_search'

    def test_product_too_coarse_fails(self, capsys):
        """A grid of pi alone cannot see the quarter-turn product."""
        assert main(['compute-lambda', '--method', 'product', '--grid', repr(np.pi), '--horizon', '7',
                     '--beam', '4']) == 1
        assert _stdout_json(capsys)['status'] == 'FAIL'

    @pytest.mark.slow
    @pytest.mark.acceptance
    def test_default_run(self, capsys):
        assert main(['compute-lambda']) == 0
        report = _stdout_json(capsys)
        assert report['lambda'] >= 0.4412712
        assert report['agreement'] <= 2e-3


class TestBall:
    """ball subcommand."""

    @pytest.fixture(scope='class')
    def ball_A(self, tmp_path_factory):
        path = tmp_path_factory.mktemp('ball') / 'ball_A.csv'
        assert main(['ball', '--system', 'A', '--samples', '3600', '--output', str(path)]) == 0
        return np.loadtxt(path, delimiter=',', skiprows=1)

    def test_vertical_segments(self, ball_A):
        theta, x, y = ball_A.T
        right = np.abs(np.sin(theta)) < 0.99 * np.abs(np.cos(theta))
        assert right.sum() > 1000
        np.testing.assert_allclose(np.abs(x[right]), 1.0, atol=1e-9)
        on_edge = np.abs(np.abs(x) - 1.0) <= 1e-9
        for side in (1.0, -1.0):
            ys = y[on_edge & (np.sign(x) == side)]
            assert ys.max() - ys.min() == pytest.approx(2.0, abs=1e-2)
        assert np.abs(x).max() <= 1.0 + 1e-12

    def test_symmetric(self, ball_A):
        points = ball_A[:, 1:]
        np.testing.assert_allclose(points[1800:], -points[:1800], atol=1e-12)

    def test_convex(self, ball_A):
        points = ball_A[:, 1:]
        edges = np.roll(points, -1, axis=0) - points
        following = np.roll(edges, -1, axis=0)
        cross = edges[:, 0] * following[:, 1] - edges[:, 1] * following[:, 0]
        assert cross.min() >= -1e-12

    def test_json_format(self, tmp_path):
        path = tmp_path / 'ball.json'
        assert main(['ball', '--samples', '16', '--output', str(path), '--format', 'json']) == 0
        points = np.array(json.loads(path.read_text(encoding='utf-8')))
        assert points.shape == (16, 2)
        np.testing.assert_allclose(NORM_A(points), 1.0, rtol=1e-12)

    def test_io_error_exits_1(self, tmp_path, caplog):
        path = tmp_path / 'no_such_dir' / 'ball.csv'
        assert main(['ball', '--samples', '16', '--output', str(path)]) == 1
        assert 'no_such_dir' in caplog.text


class TestTrajectory:
    """trajectory subcommand."""

    def test_pause_after_spiral(self, tmp_path, schedule_file):
        sched = schedule_file('[\n  {"duration": 1.0, "weights": [0, 1]},\n  {"duration": 2.0, "weights": [1, 0]}\n]')
        out = tmp_path / 'traj.csv'
        assert main(['trajectory', '--system', 'A', '--schedule', str(sched), '--x0', '1,0',
                     '--sample-step', '0.5', '--output', str(out)]) == 0
        data = np.loadtxt(out, delimiter=',', skiprows=1)
        np.testing.assert_allclose(data[:, 0], [0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0], atol=1e-14)
        expected = np.exp(-1.0) * np.array([np.cos(1.0), -np.sin(1.0) * np.exp(-2.0)])
        np.testing.assert_allclose(data[-1, 1:], expected, atol=1e-14)

    def test_pause_decays_second_coordinate(self, tmp_path, schedule_file):
        sched = schedule_file('[{"duration": 4.0, "weights": [1, 0]}]')
        out = tmp_path / 'traj.csv'
        assert main(['trajectory', '--schedule', str(sched), '--x0', '0.3,2', '--sample-step', '0.25',
                     '--output', str(out)]) == 0
        t, x1, x2 = np.loadtxt(out, delimiter=',', skiprows=1).T
        np.testing.assert_allclose(x1, 0.3, atol=1e-15)
        np.testing.assert_allclose(x2, 2.0 * np.exp(-t), rtol=1e-13)

    def test_two_phase_witness_keeps_norm(self, tmp_path, schedule_file):
        records = [{'duration': np.pi / 4, 'weights': [0, 1]}, {'duration': 5.0 - np.pi / 4, 'weights': [1, 0]}]
        sched = schedule_file(json.dumps(records))
        out = tmp_path / 'witness.csv'
        assert main(['trajectory', '--schedule', str(sched), '--x0', '0,1', '--sample-step', '0.01',
                     '--output', str(out)]) == 0
        states = np.loadtxt(out, delimiter=',', skiprows=1)[:, 1:]
        np.testing.assert_allclose(NORM_A(states), norm_A([0.0, 1.0]), atol=1e-8)

    def test_horizon_repeats_schedule(self, tmp_path, schedule_file):
        sched = schedule_file('[{"duration": 0.75, "weights": [0.5, 0.5]}]')
        out = tmp_path / 'traj.csv'
        assert main(['trajectory', '--schedule', str(sched), '--horizon', '3', '--output', str(out)]) == 0
        t = np.loadtxt(out, delimiter=',', skiprows=1)[:, 0]
        assert t[-1] == pytest.approx(3.0, abs=1e-12)

    def test_parse_error_names_line(self, tmp_path, schedule_file, caplog):
        sched = schedule_file('[\n  {"duration": 1.0, "weights": [0, 1]},\n'
                              '  {"duration": 1.0, "weights": [0.2, 0.2]}\n]')
        assert main(['trajectory', '--schedule', str(sched), '--output', str(tmp_path / 'x.csv')]) == 1
        assert f'{sched}:3:' in caplog.text

    def test_weights_must_match_system(self, tmp_path, schedule_file, caplog):
        sched = schedule_file('[{"duration": 1.0, "weights": [0.2, 0.3, 0.5]}]')
        assert main(['trajectory', '--system', 'A', '--schedule', str(sched),
                     '--output', str(tmp_path / 'x.csv')]) == 1
        assert '3 weights' in caplog.text


@pytest.mark.slow
class TestVerifyPaper:
    """verify-paper checklist."""

    def test_full_run_without_flatness(self, tmp_path):
        out = tmp_path / 'check.json'
        assert main(['verify-paper', '--skip-flatness', '--json', str(out)]) == 0
        report = json.loads(out.read_text(encoding='utf-8'))
        assert report['status'] == 'PASS'
        assert [item['name'] for item in report['items']] == [
            'lambda', 'algebra_rank', 'hurwitz', 'product_identity', 'norm_A_extremal', 'norm_B',
            'marginal_stability', 'tensor_factorisation']
        assert report['constants']['log4_over_pi'] == LOG4_OVER_PI

    def test_positive_offset_breaks_closure_and_decays(self, tmp_path):
        out = tmp_path / 'check.json'
        assert main(['verify-paper', '--skip-flatness', '--lambda-offset', '0.05', '--json', str(out)]) == 1
        items = {item['name']: item for item in json.loads(out.read_text(encoding='utf-8'))['items']}
        assert items['norm_B']['status'] == 'FAIL'
        assert 'LambdaInconsistencyError' in items['norm_B']['details']['error']
        marginal = items['marginal_stability']
        assert marginal['status'] == 'FAIL'
        assert marginal['details']['lower'] < -4e-2
        assert marginal['details']['bounded']

    def test_negative_offset_grows(self, tmp_path):
        out = tmp_path / 'check.json'
        assert main(['verify-paper', '--skip-flatness', '--lambda-offset', '-0.05', '--json', str(out)]) == 1
        items = {item['name']: item for item in json.loads(out.read_text(encoding='utf-8'))['items']}
        assert items['marginal_stability']['status'] == 'FAIL'
        assert items['marginal_stability']['details']['lower'] > 4e-2
        assert items['norm_B']['status'] == 'FAIL'


class TestVerifyPaperOrchestration:
    """Item order, error capture and exit status, with the checks themselves stubbed out."""

    def _run(self, argv, overrides=None):
        overrides = overrides or {}
        with ExitStack() as stack:
            stack.enter_context(patch('switchgrade.cli.rotation_lambda', return_value=0.5))
            mocks = {}
            for name in CHECKS:
                kwargs = overrides.get(name, {'return_value': (True, {'stub': name})})
                mocks[name] = stack.enter_context(patch(f'switchgrade.cli._check_{name}', **kwargs))
            code = main(argv)
        return code, mocks

    def test_all_pass(self, tmp_path):
        out = tmp_path / 'check.json'
        code, mocks = self._run(['verify-paper', '--json', str(out)])
        report = json.loads(out.read_text(encoding='utf-8'))
        assert code == 0
        assert report['status'] == 'PASS'
        assert [item['name'] for item in report['items']][-1] == 'flatness'
        assert report['constants']['lambda'] == 0.5
        mocks['flatness'].assert_called_once_with(0.0, 40.0, 64)

    def test_library_error_becomes_fail_item(self, tmp_path, caplog):
        out = tmp_path / 'check.json'
        error = {'side_effect': LambdaInconsistencyError('closure residual 0.1', 0.1)}
        code, _ = self._run(['verify-paper', '--json', str(out)], {'norm_B': error})
        items = {item['name']: item for item in json.loads(out.read_text(encoding='utf-8'))['items']}
        assert code == 1
        assert items['norm_B']['status'] == 'FAIL'
        assert items['norm_B']['details']['error'] == 'LambdaInconsistencyError: closure residual 0.1'
        assert items['flatness']['status'] == 'PASS'
        assert 'norm_B' in caplog.text

    def test_skip_flatness_and_offset(self, tmp_path):
        out = tmp_path / 'check.json'
        code, mocks = self._run(['verify-paper', '--skip-flatness', '--lambda-offset', '0.05', '--json', str(out)])
        report = json.loads(out.read_text(encoding='utf-8'))
        assert code == 0
        assert 'flatness' not in [item['name'] for item in report['items']]
        assert report['constants']['lambda_offset'] == 0.05
        mocks['flatness'].assert_not_called()
        mocks['norm_B'].assert_called_once_with(0.05)


class TestMarginalStabilityItem:
    """Two-sided bracket on the X growth rate plus the growth envelope."""

    def _check(self, lower, C):
        with patch('switchgrade.cli.system_X', return_value='X') as system_X, \
                patch('switchgrade.cli.lambda_lower_product_search', return_value=LyapunovEstimate(lower)) as search, \
                patch('switchgrade.cli.growth_envelope', return_value={'C': C}) as envelope:
            passed, details = _check_marginal_stability(0.02)
        system_X.assert_called_with(0.02)
        assert search.call_args.args[0] == 'X'
        assert search.call_args.args[1] == 40.0
        assert envelope.call_args.args[0] == 'X'
        return passed, details

    @pytest.mark.parametrize('lower', [-4e-3, 0.0, 4e-3])
    def test_inside_bracket(self, lower):
        passed, details = self._check(lower, 1.2)
        assert passed
        assert details['bracketed'] and details['bounded']

    @pytest.mark.parametrize('lower', [-6e-3, 6e-3])
    def test_outside_bracket(self, lower):
        passed, details = self._check(lower, 1.2)
        assert not passed
        assert not details['bracketed']

    def test_envelope_too_large(self):
        passed, details = self._check(0.0, 2.5)
        assert not passed
        assert details['bracketed']
        assert not details['bounded']
