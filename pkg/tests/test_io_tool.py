import json

import numpy as np
import pytest

from tools.discs import Divisor, RationalDisc
from tools.errors import InvalidInputError
from tools.fixtures import generate
from tools.io_tool import (
    compact_to_csv,
    compact_to_dict,
    complex_vector,
    disc_from_dict,
    disc_to_dict,
    divisor_from_list,
    divisor_to_list,
    read_compact,
    read_discs,
    read_json,
    read_ppm,
    run_manifest,
    write_atomic,
    write_json,
    write_ppm,
)


class TestCompactFiles:
    def test_csv_is_bit_exact(self, tmp_path):
        K = generate("torus3", {"samples": 16}).compact
        path = tmp_path / "torus3.csv"
        path.write_text(compact_to_csv(K))
        loaded = read_compact(path, {"mode": "projective", "connected": True})
        assert np.array_equal(loaded.points, K.points)
        assert loaded.connected

    def test_json_carries_flags(self, tmp_path):
        K = generate("torus2", {"samples": 16}).compact
        write_json(tmp_path / "torus2.json", compact_to_dict(K))
        loaded = read_compact(tmp_path / "torus2.json")
        assert loaded.mode == "affine"
        assert loaded.circular and loaded.connected
        assert np.array_equal(loaded.points, K.points)

    def test_csv_header_selects_mode(self, tmp_path):
        path = tmp_path / "points.csv"
        path.write_text("z0_re,z0_im\n1.0,0.0\n0.0,1.0\n")
        assert read_compact(path, {"mode": "affine"}).mode == "affine"

    def test_missing_file(self, tmp_path):
        with pytest.raises(InvalidInputError):
            read_compact(tmp_path / "missing.csv")

    def test_odd_column_count(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(InvalidInputError):
            read_compact(path, {"mode": "affine"})

    def test_non_numeric(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("z0_re,z0_im\nx,0\n")
        with pytest.raises(InvalidInputError):
            read_compact(path, {"mode": "affine"})

    def test_non_unit_projective_rows(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("z0_re,z0_im,z1_re,z1_im\n1,0,1,0\n")
        with pytest.raises(InvalidInputError):
            read_compact(path)


class TestDiscFiles:
    def test_disc_with_denominator(self, tmp_path):
        f = RationalDisc([[0.25, 1j], [1, 0]], mode="affine", denominator=[1, 0.5])
        write_json(tmp_path / "disc.json", disc_to_dict(f))
        (g,) = read_discs(tmp_path / "disc.json")
        assert np.array_equal(g.coeffs, f.coeffs)
        assert np.array_equal(g.denominator, f.denominator)
        assert g.mode == "affine"

    def test_disc_lists(self, tmp_path):
        discs = [disc_to_dict(RationalDisc([[1, 0], [0, 1]])) for _ in range(3)]
        write_json(tmp_path / "discs.json", {"discs": discs})
        assert len(read_discs(tmp_path / "discs.json")) == 3

    def test_disc_needs_coefficients(self):
        with pytest.raises(InvalidInputError):
            disc_from_dict({"mode": "affine"})

    def test_divisor(self):
        D = Divisor([0.5, -0.25j], [1, 3])
        rows = divisor_to_list(D)
        assert rows == [[0.5, 0.0, 1], [0.0, -0.25, 3]]
        back = divisor_from_list(rows)
        assert back.degree == 4
        assert len(divisor_from_list([])) == 0

    def test_divisor_rows(self):
        with pytest.raises(InvalidInputError):
            divisor_from_list([[0.5, 0.0]])


class TestWriters:
    def test_atomic_write_leaves_no_temporaries(self, tmp_path):
        target = tmp_path / "nested" / "out.txt"
        write_atomic(target, "first")
        write_atomic(target, "second")
        assert target.read_text() == "second"
        assert [p.name for p in target.parent.iterdir()] == ["out.txt"]

    def test_json_encodes_complex_and_infinity(self, tmp_path):
        write_json(tmp_path / "x.json", {"z": 1 + 2j, "v": float("inf"), "a": np.arange(2)})
        assert json.loads((tmp_path / "x.json").read_text()) == {"z": [1.0, 2.0], "v": "inf", "a": [0, 1]}

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{")
        with pytest.raises(InvalidInputError):
            read_json(path)

    def test_ppm(self, tmp_path):
        values = np.array([[0.0, 0.5], [1.0, float("inf")], [-1.0, 3.0]])
        write_ppm(tmp_path / "h.ppm", values, cap=1.0)
        raw = (tmp_path / "h.ppm").read_bytes()
        assert raw.startswith(b"P5\n2 3\n255\n")
        assert read_ppm(tmp_path / "h.ppm").tolist() == [[0, 128], [255, 255], [0, 255]]

    def test_ppm_needs_positive_cap(self, tmp_path):
        with pytest.raises(InvalidInputError):
            write_ppm(tmp_path / "h.ppm", np.zeros((2, 2)), cap=0.0)

    def test_manifest_records_versions(self):
        manifest = run_manifest("generate", {"command": "generate"}, 7)
        assert manifest["seed"] == 7
        assert set(manifest["versions"]) == {"python", "numpy", "scipy"}

    def test_complex_vector(self):
        assert np.array_equal(complex_vector([1, [0, 2]]), np.array([1, 2j]))
        with pytest.raises(InvalidInputError):
            complex_vector([[1, 2, 3]])
