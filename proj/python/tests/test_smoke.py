import json
import math
import os
import subprocess
from fractions import Fraction

import pytest

import qes

COULOMB = {
    "pair": {"m1": 1, "m2": 1, "e1": 1, "e2": 1, "B": 2},
    "potential": {"family": "I", "g_c": 1},
    "d": [0, 1],
    "s": 0,
}
SEXTIC = {
    "pair": {"m1": 2, "m2": 2, "e1": 1, "e2": 1},
    "potential": {"family": "II", "k6": 0.5, "k2": -4},
    "d": 0,
    "s": 0,
}
INVERSE_QUARTIC = {
    "pair": {"m1": 2, "m2": 2, "e1": 1, "e2": 1},
    "potential": {"family": "III", "l4": 0.5, "l1": -1, "k2": 0.5},
    "d": 0,
    "s": 0,
}


def test_commutator_defect_is_exact():
    assert all(qes.commutator_defect(n) == Fraction(0) for n in range(1, 26))


def test_derived_constants():
    c = qes.derive_constants(qes.ParticlePair(1, 3, 0.5, 1.5, B=1.1))
    assert c.m_r == pytest.approx(0.75)
    assert c.e_c == pytest.approx(0.0)
    assert c.omega_c == pytest.approx(2.0 * 1.1 / 4)


def test_block():
    assert qes.block_matrix(qes.Family.I, 1, 0.0, 0.0) == [[0.0, -1.0], [-1.0, 0.0]]
    mus = qes.block_eigenvalues(qes.Family.I, 2, 0.0, 0.0)
    assert [round(m.real, 12) for m in mus] == [round(-math.sqrt(6), 12), 0.0, round(math.sqrt(6), 12)]


def test_coulomb_line():
    lines = qes.solve(COULOMB)
    assert len(lines) == 1
    line = lines[0]
    assert line.quantized_name == "omega_c"
    assert line.field == pytest.approx(2.0, rel=1e-11)
    assert line.E_rho == pytest.approx(2.0, rel=1e-11)
    assert line.nodes == 0


def test_fixtures_and_oracle():
    for cfg, energy in ((SEXTIC, 0.0), (INVERSE_QUARTIC, -0.5)):
        req = qes.request_from(cfg)
        (line,) = qes.assemble_spectrum(req).lines
        assert line.E_rho == pytest.approx(energy, abs=1e-14)
        report = qes.cross_validate(req, line)
        assert report.passed, report.message
        assert report.matched.relative_gap < 1e-6


def test_request_objects():
    req = qes.SpectrumRequest()
    req.pair = qes.ParticlePair(2, 2, 1, 1)
    req.potential = qes.FamilyIII(l1=-1.0, l4=0.5, k2=0.5)
    req.solve_for = qes.SolveFor.l2
    (line,) = qes.assemble_spectrum(req).lines
    assert line.quantized_value == -0.875
    rho = [0.01, 0.5, 1.0, 2.0]
    values = qes.zeta(req, line, rho)
    assert values == pytest.approx([math.sqrt(r) * math.exp(-1 / r - r) for r in rho], rel=1e-12)


def test_empty_and_errors():
    cfg = dict(SEXTIC, potential={"family": "II", "k6": 0.5, "k2": 0})
    assert qes.solve(cfg) == []
    with pytest.raises(qes.ConfigError, match="k6"):
        qes.solve(dict(SEXTIC, potential={"family": "II", "k2": -4}))
    with pytest.raises(ValueError):
        qes.solve(dict(COULOMB, pair={"m1": 1, "m2": 2, "e1": 1, "e2": 1}))


def test_run_in_process(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(INVERSE_QUARTIC))
    code, out, _ = qes.run("verify", str(path))
    assert code == 0
    assert out.splitlines()[1].endswith(",pass")
    code, _, err = qes.run("verify", str(path), paper_variants=True)
    assert code == 1
    assert "verification failed" in err


@pytest.mark.skipif("QES_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_binary_on_shipped_configs():
    cli = os.environ["QES_CLI"]
    configs = os.environ["QES_CONFIGS"]
    for name in ("coulomb.json", "sextic.json", "inverse_quartic.json"):
        proc = subprocess.run([cli, "verify", "--config", os.path.join(configs, name)], capture_output=True, text=True)
        assert proc.returncode == 0, proc.stderr
