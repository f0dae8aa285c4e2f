import math

import numpy as np
import pytest

from evtinfo.config import ConfigError, load_distribution, load_spec_file, parse_expression, parse_spec_text
from evtinfo.normalize import norming_constants


class TestExpression:
    @pytest.mark.parametrize("text,u,expected", [
        ("1", 3.0, 1.0),
        ("u", 3.0, 3.0),
        ("(1 - u)**2", 0.25, 0.5625),
        ("pow(1 - u, 2)", 0.25, 0.5625),
        ("-u + 2*u/4", 2.0, -1.0),
        ("exp(-u) * sqrt(u)", 4.0, 2 * math.exp(-4)),
        ("log(e) + pi", 0.0, 1 + math.pi),
        ("2 ** -1", 0.0, 0.5),
    ])
    def test_values(self, text, u, expected):
        assert parse_expression(text)(u) == pytest.approx(expected, rel=1e-15)

    def test_vectorised(self):
        f = parse_expression("0.5")
        out = f(np.array([1.0, 2.0, 3.0]))
        assert out.shape == (3,) and np.all(out == 0.5)
        assert isinstance(parse_expression("u")(2.0), float)

    @pytest.mark.parametrize("text", [
        "__import__('os')", "u.real", "x + 1", "sin(u)", "exp(u, 2)", "u if u else 1",
        "[u]", "True", "'a'", "lambda: 1", "u == 1", "exp(u=1)",
    ])
    def test_rejected(self, text):
        with pytest.raises(ConfigError):
            parse_expression(text)

    def test_syntax_error(self):
        with pytest.raises(ConfigError, match="cannot parse"):
            parse_expression("(u + ")


GNEDENKO = """
# Gnedenko law
c = 1
z0 = 0
x0 = 1
g_expr = (1 - u)**2
G_expr = u / (1 - u)
name = gned-file
"""


class TestSpecText:
    def test_parse(self):
        spec, lower = parse_spec_text(GNEDENKO)
        assert spec.c == 1 and spec.z0 == 0 and spec.x0 == 1 and lower is None
        assert spec.name == "gned-file"
        assert spec.g(0.5) == 0.25

    def test_lower(self):
        _, lower = parse_spec_text("c=1\nz0=1\nx0=inf\ng_expr=u\nlower=1")
        assert lower == 1.0

    @pytest.mark.parametrize("text,match", [
        ("c = 1\nz0 = 0\nx0 = inf", "missing"),
        ("c = 1\nz0 = 0\nx0 = inf\ng_expr = 1\nfoo = 2", "unknown key"),
        ("c = 1\nc = 2\nz0 = 0\nx0 = inf\ng_expr = 1", "duplicate"),
        ("c = one\nz0 = 0\nx0 = inf\ng_expr = 1", "not a number"),
        ("c 1", "expected key = value"),
    ])
    def test_errors(self, text, match):
        with pytest.raises(ConfigError, match=match):
            parse_spec_text(text)

    def test_file_roundtrip(self, tmp_path, gned):
        p = tmp_path / "g.spec"
        p.write_text(GNEDENKO)
        spec, _ = load_spec_file(p)
        d = load_distribution(p)
        assert d.name == "gned-file"
        for n in (10, 100):
            assert norming_constants(d, n).b_n == pytest.approx(norming_constants(gned, n).b_n, abs=1e-12)
        x = np.linspace(0.05, 0.95, 9)
        np.testing.assert_allclose(d.cdf(x), gned.cdf(x), rtol=1e-13)
