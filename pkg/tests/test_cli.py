"""Tests for the patkit command line."""

import numpy as np
import pytest
import yaml

from patkit.cli.__main__ import build_parser, load_config, main
from patkit.cli.command import Command
from patkit.cli.handler.registry import HandlerRegistry
from patkit.cli.session import Session
from patkit.config.patkit import PatKitConfig
from patkit.core.io import read_tensor, write_tensor
from patkit.exceptions import HandlerNotFoundError
from patkit.forward.matrix import apply_forward, load_matrix

CONFIG = """\
forward:
  m: 8
  n_t: 24
  pad: 4
"""


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / 'patkit.yaml'
    path.write_text(CONFIG)
    return str(path)


# ---------------------------------------------------------------------------
# Configuration and dispatch
# ---------------------------------------------------------------------------


class TestConfig:
    def test_defaults_without_file(self):
        config = load_config(None)
        assert config.forward.m == 64
        assert config.trace_dir is None

    def test_legacy_geometry_key(self, tmp_path):
        path = tmp_path / 'legacy.yaml'
        path.write_text("geometry:\n  m: 16\n  n_t: 48\n")
        assert load_config(str(path)).forward.m == 16

    def test_forward_wins_over_geometry(self):
        config = PatKitConfig.model_validate({'geometry': {'m': 16}, 'forward': {'m': 32}})
        assert config.forward.m == 32


class TestDispatch:
    def test_registry_accepts_dashes(self):
        handler = object()
        registry = HandlerRegistry(run_case=handler)
        assert registry.get('run-case') is handler
        assert registry.get('run_case') is handler
        assert registry.get(None) is None
        assert registry.names() == ['run_case']

    def test_unknown_handler(self):
        session = Session.from_config(PatKitConfig())
        with pytest.raises(HandlerNotFoundError):
            session.invoke(Command(handler='plot'))

    def test_command_text(self):
        command = Command(handler='gen-data', options={'case': 'ii', 'n_train': 4, 'full_scale': False})
        assert command.text == 'gen-data --case ii --n-train 4'


class TestParser:
    def test_config_after_subcommand(self):
        ns = build_parser().parse_args(['assemble-matrix', '--config', 'c.yml', '--out', 'A.patt'])
        assert ns.config == 'c.yml'
        assert ns.out == 'A.patt'

    def test_config_before_subcommand(self):
        ns = build_parser().parse_args(['--config', 'c.yml', 'evaluate', '--pred', 'p', '--truth', 't'])
        assert ns.config == 'c.yml'

    def test_no_config(self):
        ns = build_parser().parse_args(['evaluate', '--pred', 'p', '--truth', 't'])
        assert not hasattr(ns, 'config')

    @pytest.mark.parametrize('method', ['bp', 'ubp2d', 'adjoint', 'fft', 'tr', 'itr', 'gd', 'pgd-tv',
                                        'tikhonov', 'learned'])
    def test_reconstruct_methods(self, method):
        ns = build_parser().parse_args(['reconstruct', '--method', method, '--data', 'g.patt', '--out', 'f.patt'])
        assert ns.method == method

    def test_gradient_descent_step_size(self):
        ns = build_parser().parse_args(['reconstruct', '--method', 'gd', '--eta', '0.1',
                                        '--data', 'g.patt', '--out', 'f.patt'])
        assert ns.eta == 0.1

    @pytest.mark.parametrize('flag', ['--paper-scale', '--full-scale'])
    def test_large_scale_flag(self, flag):
        ns = build_parser().parse_args(['run-case', '--case', 'i', flag])
        assert ns.full_scale is True
        assert build_parser().parse_args(['gen-data', '--case', 'ii', '--out', 'd', flag]).full_scale is True

    def test_default_scale(self):
        assert build_parser().parse_args(['run-case', '--case', 'i']).full_scale is False


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


class TestCommands:
    def test_assemble_then_reconstruct(self, tmp_path, config_file, capsys):
        matrix_path = tmp_path / 'A.patt'
        assert main(['--config', config_file, 'assemble-matrix', '--out', str(matrix_path)]) == 0
        assert 'fingerprint' in capsys.readouterr().out
        A = load_matrix(matrix_path)
        assert A.shape == (8 * 24, 64)

        f = np.zeros((8, 8))
        f[4, 3] = 1.0
        write_tensor(tmp_path / 'g.patt', apply_forward(A, f).data)
        code = main(['--config', config_file, 'reconstruct', '--method', 'adjoint',
                     '--data', str(tmp_path / 'g.patt'), '--matrix', str(matrix_path),
                     '--out', str(tmp_path / 'f.patt'), '--pgm', str(tmp_path / 'f.pgm')])
        assert code == 0
        image = read_tensor(tmp_path / 'f.patt')
        assert image.shape == (8, 8)
        np.testing.assert_allclose(image.ravel(), A.entries.T @ (A.entries @ f.ravel()))
        assert (tmp_path / 'f.pgm').exists()

    def test_cli_overrides_geometry(self, tmp_path, config_file):
        matrix_path = tmp_path / 'A.patt'
        code = main(['--config', config_file, 'assemble-matrix', '--out', str(matrix_path),
                     '--n-det', '4', '--aperture', 'top'])
        assert code == 0
        assert load_matrix(matrix_path).config.detector_count == 4

    def test_evaluate(self, tmp_path, capsys):
        truth = np.zeros((8, 8))
        truth[3, 3] = 1.0
        write_tensor(tmp_path / 'truth.patt', truth)
        write_tensor(tmp_path / 'pred.patt', truth + 0.1)
        assert main(['evaluate', '--pred', str(tmp_path / 'pred.patt'),
                     '--truth', str(tmp_path / 'truth.patt')]) == 0
        assert 'PSNR: 20.00 dB' in capsys.readouterr().out

    def test_invalid_config_exits_with_error(self, tmp_path, capsys):
        path = tmp_path / 'bad.yaml'
        path.write_text("forward:\n  m: 1\n")
        assert main(['--config', str(path), 'evaluate', '--pred', 'a', '--truth', 'b']) == 1
        assert capsys.readouterr().err.startswith('Error:')

    def test_unstable_geometry_exits_with_error(self, tmp_path, config_file, capsys):
        code = main(['--config', config_file, 'assemble-matrix', '--out', str(tmp_path / 'A.patt'),
                     '--n-t', '4'])
        assert code == 1
        assert 'n_t' in capsys.readouterr().err

    def test_config_after_subcommand(self, tmp_path, config_file):
        matrix_path = tmp_path / 'A.patt'
        assert main(['assemble-matrix', '--config', config_file, '--out', str(matrix_path)]) == 0
        assert load_matrix(matrix_path).config.m == 8

    @pytest.mark.parametrize('method, extra', [
        ('bp', []),
        ('ubp2d', []),
        ('gd', ['--eta', '0.1', '--iters', '5']),
    ])
    def test_reconstruct_method(self, tmp_path, config_file, method, extra):
        matrix_path = tmp_path / 'A.patt'
        assert main(['assemble-matrix', '--config', config_file, '--out', str(matrix_path)]) == 0
        A = load_matrix(matrix_path)
        f = np.zeros((8, 8))
        f[3, 4] = 1.0
        write_tensor(tmp_path / 'g.patt', apply_forward(A, f).data)
        code = main(['reconstruct', '--config', config_file, '--method', method,
                     '--data', str(tmp_path / 'g.patt'), '--matrix', str(matrix_path),
                     '--out', str(tmp_path / 'f.patt')] + extra)
        assert code == 0
        image = read_tensor(tmp_path / 'f.patt')
        assert image.shape == (8, 8)
        assert np.isfinite(image).all()

    def test_trace_written_per_command(self, tmp_path):
        traces = tmp_path / 'traces'
        path = tmp_path / 'traced.yaml'
        path.write_text(CONFIG + f"trace_dir: {traces}\n")
        matrix_path = tmp_path / 'A.patt'
        assert main(['--config', str(path), 'assemble-matrix', '--out', str(matrix_path)]) == 0
        write_tensor(tmp_path / 'g.patt', np.zeros((2,) + load_matrix(matrix_path).data_shape))
        code = main(['--config', str(path), 'reconstruct', '--method', 'adjoint',
                     '--data', str(tmp_path / 'g.patt'), '--matrix', str(matrix_path),
                     '--out', str(tmp_path / 'f.patt')])
        assert code == 0

        assert len(list(traces.glob('trace_assemble-matrix_*.yaml'))) == 1
        (trace,) = traces.glob('trace_reconstruct_*.yaml')
        tree = yaml.safe_load(trace.read_text())
        assert tree['kind'] == 'session'
        assert tree['attributes']['command'].startswith('reconstruct --method adjoint')
        assert [child['name'] for child in tree['children']] == ['solve']
