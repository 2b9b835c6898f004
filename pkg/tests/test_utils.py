"""
Tests for validators, configuration loading, precoder files and logging.
"""

import logging
import os
import sys

import numpy as np
import pytest

# Add parent directory to path
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from upif.exceptions import DomainError
from upif.precoders import PrecoderKind, lift_precoder, rotation_2d, type2_rotation
from upif.simulation import SimConfig
from upif.utils.config_handler import get_config, load_config, parse_flat_config
from upif.utils.logger import setup_logger
from upif.utils.matrix_io import load_precoder, save_precoder
from upif.utils.validators import (
    validate_alphabet_size,
    validate_positive_int,
    validate_qam_order,
    validate_snr_grid,
)


class TestValidators:
    """Test input validation functions."""

    def test_positive_int(self):
        """Integers and integer strings pass; others fail."""
        assert validate_positive_int(5) == 5
        assert validate_positive_int("7") == 7
        assert validate_positive_int(0, minimum=0) == 0
        with pytest.raises(DomainError):
            validate_positive_int(0)
        with pytest.raises(DomainError):
            validate_positive_int(2.5)
        with pytest.raises(DomainError):
            validate_positive_int(True)

    def test_qam_and_alphabet(self):
        """QAM orders are powers of 4, alphabets powers of 2."""
        assert validate_qam_order(64) == 64
        assert validate_alphabet_size(8) == 8
        for bad in (2, 8, 32, 12):
            with pytest.raises(DomainError):
                validate_qam_order(bad)
        with pytest.raises(DomainError):
            validate_alphabet_size(6)

    def test_snr_grid(self):
        """Grids are finite and strictly increasing."""
        assert validate_snr_grid([0, 5, 10]) == [0.0, 5.0, 10.0]
        assert validate_snr_grid(3) == [3.0]
        with pytest.raises(DomainError):
            validate_snr_grid([])
        with pytest.raises(DomainError):
            validate_snr_grid([0, 0])
        with pytest.raises(DomainError):
            validate_snr_grid([0, float("nan")])


class TestConfig:
    """Configuration files."""

    def test_yaml(self, tmp_path):
        """YAML mappings load as dicts and build a SimConfig."""
        path = tmp_path / "c.yaml"
        path.write_text("n_complex: 2\nqam_order: 16\nsnr_grid_db: [0, 10]\nprecoder_kind: xcode\n")
        config = load_config(str(path))
        assert config["snr_grid_db"] == [0, 10]
        assert SimConfig.from_dict(config).qam_order == 16

    def test_flat(self, tmp_path):
        """key = value files parse each value as YAML."""
        path = tmp_path / "c.conf"
        path.write_text(
            "# comment\n"
            "n_complex = 4\n"
            "snr_grid_db = [0, 5, 10]   # dB\n"
            "dither = true\n"
            "label = Type II + IF, 4x4\n"
        )
        config = load_config(str(path))
        assert config == {
            "n_complex": 4,
            "snr_grid_db": [0, 5, 10],
            "dither": True,
            "label": "Type II + IF, 4x4",
        }

    def test_flat_parse_error(self):
        """Lines without '=' are rejected."""
        with pytest.raises(ValueError):
            parse_flat_config("n_complex = 2\nnot a pair\n")

    def test_missing_and_invalid(self, tmp_path):
        """Missing files and non-mapping YAML are rejected."""
        with pytest.raises(FileNotFoundError):
            load_config(str(tmp_path / "missing.yaml"))
        with pytest.raises(FileNotFoundError):
            get_config(str(tmp_path / "missing.yaml"))
        path = tmp_path / "list.yaml"
        path.write_text("- 1\n- 2\n")
        with pytest.raises(ValueError):
            load_config(str(path))

    def test_empty_file(self, tmp_path):
        """An empty file is an empty configuration."""
        path = tmp_path / "empty.yaml"
        path.write_text("")
        assert load_config(str(path)) == {}

    @pytest.mark.parametrize("name", [
        "curve_2x2_type2_4qam.yaml",
        "curve_2x2_type1_4qam.yaml",
        "curve_2x2_identity_4qam.yaml",
        "curve_2x2_xcode_ml_4qam.yaml",
        "curve_2x2_type2_64qam.yaml",
        "curve_4x4_type2_4qam.conf",
        "curve_2x2_type1_64qam.yaml",
        "curve_2x2_type1_ml_64qam.yaml",
        "curve_2x2_type2_ml_64qam.yaml",
        "curve_4x4_xcode_ml_64qam.yaml",
        "curve_4x4_type2_64qam.yaml",
        "landscape_rho100.yaml",
    ])
    def test_shipped_configs(self, name):
        """Every shipped configuration is valid."""
        from upif.core import split_config

        path = os.path.join(os.path.dirname(__file__), '..', 'configs', name)
        fields, _ = split_config(load_config(path))
        SimConfig.from_dict(fields)


class TestPrecoderFiles:
    """Precoder text format."""

    def test_round_trip(self, tmp_path):
        """Matrices survive exactly; kind, angle and label are kept."""
        precoder = lift_precoder(rotation_2d(0.123), 2)
        path = str(tmp_path / "p.txt")
        save_precoder(precoder, path)

        with open(path) as f:
            first = f.readline().rstrip("\n")
        assert first == "# kind=type1 theta=0.123 label=rotation(0.123000)"

        loaded = load_precoder(path)
        assert loaded.kind is PrecoderKind.TYPE1
        assert loaded.theta == 0.123
        np.testing.assert_array_equal(loaded.p, precoder.p)

    def test_no_angle(self, tmp_path):
        """Precoders without an angle store theta=none."""
        path = str(tmp_path / "t2.txt")
        save_precoder(type2_rotation(4), path)
        loaded = load_precoder(path)
        assert loaded.theta is None
        assert loaded.label == "type2(d=4,disc=725)"

    def test_missing_header(self, tmp_path):
        """Files without the header line are rejected."""
        path = tmp_path / "bare.txt"
        path.write_text("1 0\n0 1\n")
        with pytest.raises(DomainError):
            load_precoder(str(path))
        with pytest.raises(FileNotFoundError):
            load_precoder(str(tmp_path / "none.txt"))


class TestLogger:
    """Run logger."""

    def test_setup_creates_log_file(self, tmp_path):
        """The upif logger writes a run log into the output directory."""
        logger = logging.getLogger('upif')
        saved = logger.handlers[:]
        logger.handlers.clear()
        try:
            result = setup_logger(str(tmp_path), "unit")
            assert result is logger
            assert len(logger.handlers) == 2
            assert any(name.startswith("unit_") and name.endswith(".log") for name in os.listdir(tmp_path))
            assert setup_logger(str(tmp_path), "again") is logger
            assert len(logger.handlers) == 2
        finally:
            for handler in logger.handlers:
                handler.close()
            logger.handlers[:] = saved


def test_imports():
    """Test that all modules can be imported."""
    from upif import UPIFSimulation, SimConfig, run_curve
    from upif.lattice import LatticeBasis
    from upif.receiver import solve_integer_forcing
    from upif.ml import sphere_decode
    from upif.landscape import LandscapeAnalyzer

    assert UPIFSimulation is not None
    assert LatticeBasis is not None


if __name__ == '__main__':
    pytest.main([__file__, '-v'])
