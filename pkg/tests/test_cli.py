"""
End-to-end tests of the catoni command line: CSV output, --output files,
environment settings and exit statuses.
"""

import math

import numpy as np
import pytest

from app.config import get_settings
from app.main import main
from src.core.formatting import format_float
from src.estimators import halfwidth_known_variance


@pytest.fixture(autouse=True)
def fresh_settings():
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def rows(text):
    return [line.split(",") for line in text.splitlines()]


class TestMoments:

    def test_standard_normal(self, capsys):
        code, out, _ = run(capsys, "moments", "--mixture", "1:0:1")
        assert code == 0
        assert out == "m,v,kappa\n0,1,3\n"

    def test_zero_variance_leaves_kappa_empty(self, capsys):
        _, out, _ = run(capsys, "moments", "--mixture", "1:2:0")
        assert out == "m,v,kappa\n2,0,\n"

    def test_published_name(self, capsys):
        _, out, _ = run(capsys, "moments", "--mixture", "contaminated")
        m, v, kappa = (float(x) for x in rows(out)[1])
        assert m == 0.0
        np.testing.assert_allclose([v, kappa], [9.99, 243.517], rtol=1e-5)

    def test_output_file(self, capsys, tmp_path):
        path = tmp_path / "moments.csv"
        code, out, _ = run(capsys, "moments", "--mixture", "1:0:1", "--output", str(path))
        assert code == 0
        assert out == ""
        assert path.read_text() == "m,v,kappa\n0,1,3\n"

    def test_bad_mixture(self, capsys):
        code, out, err = run(capsys, "moments", "--mixture", "0.5:0:1")
        assert code == 2
        assert out == ""
        assert err.startswith("error: ")


class TestEstimateMean:

    def test_known_variance_on_constant_data(self, capsys, data_file):
        path = data_file([2.5] * 10)
        code, out, _ = run(
            capsys, "estimate-mean", "--input", path, "--method", "known-v",
            "--epsilon", "0.05", "--variance", "1",
        )
        assert code == 0
        expected = format_float(halfwidth_known_variance(10, 1.0, 0.05))
        assert out == f"estimate,halfwidth\n2.5,{expected}\n"

    def test_lepski_has_empty_halfwidth(self, capsys, data_file, gaussian_sample):
        path = data_file(gaussian_sample.values.tolist())
        code, out, _ = run(
            capsys, "estimate-mean", "--input", path, "--method", "lepski",
            "--epsilon", "0.05", "--grid", "1:1.1:10",
        )
        assert code == 0
        estimate, halfwidth = rows(out)[1]
        assert halfwidth == ""
        assert abs(float(estimate)) < 0.2

    def test_lepski_default_grid(self, capsys, data_file, gaussian_sample):
        path = data_file(gaussian_sample.values.tolist())
        code, out, _ = run(capsys, "estimate-mean", "--input", path, "--method", "lepski", "--epsilon", "0.05")
        assert code == 0
        assert math.isfinite(float(rows(out)[1][0]))

    def test_kurtosis_interval(self, capsys, data_file, gaussian_sample):
        path = data_file(gaussian_sample.values.tolist())
        code, out, _ = run(
            capsys, "estimate-mean", "--input", path, "--method", "kurtosis", "--epsilon", "0.005",
        )
        assert code == 0
        estimate, halfwidth = (float(x) for x in rows(out)[1])
        assert abs(estimate) <= halfwidth

    def test_wide_influence(self, capsys, data_file, gaussian_sample):
        path = data_file(gaussian_sample.values.tolist())
        code, _, _ = run(
            capsys, "estimate-mean", "--input", path, "--method", "eps-free",
            "--epsilon", "0.05", "--variance", "1", "--psi", "wide",
        )
        assert code == 0

    def test_missing_variance(self, capsys, data_file):
        path = data_file([1.0, 2.0, 3.0])
        code, _, err = run(capsys, "estimate-mean", "--input", path, "--method", "known-v", "--epsilon", "0.05")
        assert code == 2
        assert "--variance" in err

    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run(
            capsys, "estimate-mean", "--input", str(tmp_path / "absent.txt"),
            "--method", "plugin", "--epsilon", "0.05",
        )
        assert code == 2
        assert err.startswith("error: cannot read data file")

    def test_infeasible_sample_size(self, capsys, data_file):
        path = data_file([1.0, 2.0, 3.0])
        code, _, err = run(
            capsys, "estimate-mean", "--input", path, "--method", "known-v",
            "--epsilon", "0.01", "--variance", "1",
        )
        assert code == 3
        assert "infeasible" in err

    def test_plugin_on_constant_data(self, capsys, data_file):
        path = data_file([4.0] * 20)
        code, _, _ = run(capsys, "estimate-mean", "--input", path, "--method", "plugin", "--epsilon", "0.05")
        assert code == 4

    def test_unknown_method_is_a_usage_error(self, capsys, data_file):
        path = data_file([1.0, 2.0])
        with pytest.raises(SystemExit) as info:
            main(["estimate-mean", "--input", path, "--method", "trimmed", "--epsilon", "0.05"])
        assert info.value.code == 2


class TestEstimateVariance:

    def test_gaussian(self, capsys, data_file, gaussian_sample):
        path = data_file(gaussian_sample.values.tolist())
        code, out, _ = run(
            capsys, "estimate-variance", "--input", path, "--kappa-max", "3", "--epsilon1", "0.005",
        )
        assert code == 0
        assert rows(out)[0] == ["v_hat", "zeta"]
        v_hat, zeta = (float(x) for x in rows(out)[1])
        assert abs(math.log(v_hat)) <= zeta

    def test_explicit_block_size(self, capsys, data_file, gaussian_sample):
        path = data_file(gaussian_sample.values.tolist())
        code, _, _ = run(
            capsys, "estimate-variance", "--input", path, "--kappa-max", "3",
            "--epsilon1", "0.005", "--p", "4", "--xi", "simple",
        )
        assert code == 0

    def test_infeasible(self, capsys, data_file, gaussian_sample):
        path = data_file(gaussian_sample.values[:100].tolist())
        code, out, err = run(
            capsys, "estimate-variance", "--input", path, "--kappa-max", "3", "--epsilon1", "0.0025",
        )
        assert code == 3
        assert out == ""
        assert err.startswith("error: infeasible: optimal-block confidence range condition violated")
        assert "log(1/epsilon1) <= n/(36(kappa-1)) - 1/8" in err
        assert "requires n >= 441" in err

    def test_confidence_condition_on_full_sample(self, capsys, data_file, gaussian_sample):
        path = data_file(gaussian_sample.values.tolist())
        code, out, err = run(
            capsys, "estimate-variance", "--input", path, "--kappa-max", "3", "--epsilon1", "1e-13",
        )
        assert code == 3
        assert out == ""
        assert "optimal-block confidence range" in err
        assert "log(1/epsilon1) <= n/(36(kappa-1)) - 1/8" in err
        assert "requires n >= 2165" in err

    def test_explicit_block_size_skips_confidence_condition(self, capsys, data_file, gaussian_sample):
        path = data_file(gaussian_sample.values.tolist())
        code, out, _ = run(
            capsys, "estimate-variance", "--input", path, "--kappa-max", "3", "--epsilon1", "1e-13",
            "--p", "2",
        )
        assert code == 0
        assert rows(out)[0] == ["v_hat", "zeta"]

    def test_simple_condition_is_named(self, capsys, data_file, gaussian_sample):
        path = data_file(gaussian_sample.values[:100].tolist())
        code, _, err = run(
            capsys, "estimate-variance", "--input", path, "--kappa-max", "3", "--epsilon1", "0.0025",
            "--p", "2",
        )
        assert code == 3
        assert "simple confidence range condition violated" in err
        assert "log(1/epsilon1) <= min(q/(4(1 + sqrt 2)), (n - r)/(8 chi))" in err

    def test_constant_data(self, capsys, data_file):
        path = data_file([1.5] * 2000)
        code, _, _ = run(
            capsys, "estimate-variance", "--input", path, "--kappa-max", "3", "--epsilon1", "0.005",
        )
        assert code == 4


class TestBounds:

    def test_selected_bound(self, capsys):
        code, out, _ = run(
            capsys, "bounds", "--n", "100", "--v", "1", "--eps-grid", "0.5:0.05:2", "--bounds", "chebyshev",
        )
        assert code == 0
        table = rows(out)
        assert table[0] == ["epsilon", "bound", "halfwidth"]
        assert [r[1] for r in table[1:]] == ["chebyshev", "chebyshev"]
        for epsilon, _, halfwidth in table[1:]:
            np.testing.assert_allclose(float(halfwidth), math.sqrt(1.0 / (200.0 * float(epsilon))), rtol=1e-12)

    def test_kappa_enables_more_bounds(self, capsys):
        _, plain, _ = run(capsys, "bounds", "--n", "100", "--v", "1", "--eps-grid", "0.1:0.01:3")
        _, full, _ = run(capsys, "bounds", "--n", "100", "--v", "1", "--kappa", "3", "--eps-grid", "0.1:0.01:3")
        plain_names = {r[1] for r in rows(plain)[1:]}
        full_names = {r[1] for r in rows(full)[1:]}
        assert "kurtosis" not in plain_names
        assert {"kurtosis", "fourth_moment", "lower_kurtosis"} <= full_names
        assert plain_names < full_names

    def test_unknown_bound(self, capsys):
        code, _, err = run(capsys, "bounds", "--n", "100", "--v", "1", "--eps-grid", "0.1:0.01:3", "--bounds", "nope")
        assert code == 2
        assert "nope" in err

    def test_non_positive_variance(self, capsys):
        code, _, _ = run(capsys, "bounds", "--n", "100", "--v", "0", "--eps-grid", "0.1:0.01:3")
        assert code == 2


class TestSimulate:

    ARGS = ("simulate", "--source", "1:0:1", "--n", "50", "--reps", "10", "--seed", "1", "--epsilon", "0.05")

    def test_quantiles(self, capsys):
        code, out, _ = run(capsys, *self.ARGS, "--estimators", "mean,median")
        assert code == 0
        table = rows(out)
        assert table[0] == ["estimator", "level", "deviation"]
        assert len(table) == 21
        assert [r[0] for r in table[1:]] == ["mean"] * 10 + ["median"] * 10
        assert table[10][1] == "1"

    def test_thread_count_does_not_change_output(self, capsys):
        _, one, _ = run(capsys, *self.ARGS, "--estimators", "mean,known-v", "--threads", "1")
        _, many, _ = run(capsys, *self.ARGS, "--estimators", "mean,known-v", "--threads", "3")
        assert one == many

    def test_coverage(self, capsys):
        code, out, _ = run(capsys, *self.ARGS, "--coverage", "known-v")
        assert code == 0
        table = rows(out)
        assert table[0] == ["method", "reps", "hits", "coverage", "target"]
        assert table[1][:2] == ["known-v=1", "10"]

    def test_needs_estimators_or_coverage(self, capsys):
        code, _, err = run(capsys, *self.ARGS)
        assert code == 2
        assert "--estimators" in err

    def test_infeasible_estimator(self, capsys):
        code, _, _ = run(
            capsys, "simulate", "--source", "1:0:1", "--n", "3", "--reps", "5", "--seed", "1",
            "--epsilon", "0.01", "--estimators", "known-v",
        )
        assert code == 3


class TestSettings:

    def test_float_digits_from_environment(self, capsys, monkeypatch):
        monkeypatch.setenv("CATONI_FLOAT_DIGITS", "3")
        get_settings.cache_clear()
        _, out, _ = run(capsys, "moments", "--mixture", "three-component")
        assert out == "m,v,kappa\n1,93.5,27.9\n"

    def test_defaults(self):
        settings = get_settings()
        assert settings.threads == 0
        assert settings.float_digits == 17
        assert settings.mean_tolerance == 1e-10


class TestCommandsPackage:

    def test_has_a_module_docstring(self):
        import app.commands

        assert app.commands.__doc__.strip().startswith("Helpers shared by the CLI subcommands")
