import json
from fractions import Fraction

import pytest

from expvol.core_types import (BoundaryLengths, CrownParams, DataError, DecoratedSurface,
                               ParameterError, RecursionConstants, VolumePolynomial,
                               cutting_constant, eval_volume_polynomial, load_volume_table,
                               surface_constant, validate_surface, volume_polynomial)


@pytest.mark.parametrize("surf,dim", [
    (DecoratedSurface(0, (3,)), 0),          # ideal triangle
    (DecoratedSurface(0, (1, 0)), 0),        # trouser leg
    (DecoratedSurface(0, (0, 0, 0)), 0),     # pair of pants
    (DecoratedSurface(0, (1, 1)), 2),        # A_{1,1}
    (DecoratedSurface.crown(4), 3),
    (DecoratedSurface(1, (1,)), 4),
])
def test_moduli_dimension(surf, dim):
    assert validate_surface(surf)
    assert surf.moduli_dimension() == dim


@pytest.mark.parametrize("surf", [
    DecoratedSurface(0, ()), DecoratedSurface(0, (2,)), DecoratedSurface(0, (0, 0)),
    DecoratedSurface(0, (1,)),
])
def test_invalid_surfaces(surf):
    assert not validate_surface(surf)


def test_negative_counts_rejected():
    with pytest.raises(ParameterError):
        DecoratedSurface(-1, (1,))


def test_crown_params_positive():
    with pytest.raises(ParameterError):
        CrownParams([[1.0, -2.0]])
    assert len(CrownParams([[1.0], [2.0, 3.0]])) == 2


def test_boundary_lengths_lambda_roundtrip():
    b = BoundaryLengths.from_Lambda([4.0, 1.0])
    assert b.Lambda == pytest.approx((4.0, 1.0))


def test_shipped_polynomials():
    table = load_volume_table()
    assert set(table) >= {(0, 3), (1, 1)}
    v11 = volume_polynomial(1, 1)
    assert eval_volume_polynomial(v11, [2.0]) == pytest.approx(3.141592653589793 ** 2 / 6 + 4 / 24)
    assert eval_volume_polynomial(volume_polynomial(0, 3), [1.0, 2.0, 3.0]) == 1.0


def test_missing_polynomial():
    with pytest.raises(DataError):
        volume_polynomial(2, 3)


def test_malformed_entry_rejected():
    bad = {"g": 1, "m": 1, "terms": [{"d": [1], "rational": "1/24", "pi_power": 2}]}
    with pytest.raises(DataError):
        VolumePolynomial.from_json(bad)


def test_data_override(tmp_path, monkeypatch):
    entries = [{"g": 0, "m": 3, "terms": [{"d": [0, 0, 0], "rational": "1", "pi_power": 0}]}]
    (tmp_path / "volume_polynomials.json").write_text(json.dumps(entries))
    (tmp_path / "constants.json").write_text(json.dumps({"c_overrides": {}}))
    monkeypatch.setenv("EXPVOL_DATA", str(tmp_path))
    assert set(load_volume_table()) == {(0, 3)}
    with pytest.raises(DataError):
        volume_polynomial(1, 1)


def test_cutting_constants():
    c = RecursionConstants.default()
    assert surface_constant(DecoratedSurface(0, (2, 0, 0)), c) == Fraction(1, 2)
    assert surface_constant(DecoratedSurface(1, (1,)), c) == Fraction(1, 2)
    assert cutting_constant(DecoratedSurface(0, (1, 1)), 0, c) == Fraction(1, 2)
    # surfaces without an override use the conjectured value
    assert c.c(DecoratedSurface(1, (0, 0))) == 2
    assert c.with_c(1, 2, "3/4").c(DecoratedSurface(1, (1, 1))) == Fraction(3, 4)


def test_cut_must_be_crown():
    with pytest.raises(ParameterError):
        cutting_constant(DecoratedSurface(0, (1, 0, 0)), 1)


def test_d_S_spheres():
    c = RecursionConstants.default()
    assert c.d_S(DecoratedSurface(0, (0, 0, 0, 0))) == Fraction(1, 2)
    assert c.d_S(DecoratedSurface(1, (0,))) == 1
