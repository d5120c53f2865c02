import numpy as np
import pytest

from fuzzbin.core import (
    LabeledDataset,
    Normalization,
    load_csv,
    normalize_fit,
    parse_csv,
    save_csv,
    squared_distance,
)
from fuzzbin.errors import DataError, UsageError

from conftest import make_dataset


class TestSquaredDistance:
    def test_identity_case(self):
        assert squared_distance([0.0, 0.0], [0.0, 0.0]) == 0.0

    def test_three_four_five(self):
        assert squared_distance([0.0, 0.0], [3.0, 4.0]) == 25.0

    def test_hand_summed(self):
        # (3^2 + 4^2 + 0^2) summed directly
        assert squared_distance([1.0, 2.0, 3.0], [4.0, 6.0, 3.0]) == 25.0

    def test_dimension_mismatch(self):
        with pytest.raises(UsageError):
            squared_distance([1.0], [1.0, 2.0])

    def test_symmetry_and_self_zero(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            a = rng.normal(size=6)
            b = rng.normal(size=6)
            assert squared_distance(a, b) == squared_distance(b, a)
            assert squared_distance(a, a) == 0.0


class TestNormalization:
    def test_minmax_from_two_points(self):
        data = make_dataset([[0.0], [2.0]])
        norm = normalize_fit(data)
        assert norm.mins[0] == 0.0 and norm.maxs[0] == 2.0

    def test_degenerate_span_maps_to_half(self):
        data = make_dataset([[5.0], [5.0]])
        norm = normalize_fit(data)
        assert norm.mins[0] == 5.0 and norm.maxs[0] == 5.0
        assert norm.apply(np.array([5.0]))[0] == 0.5

    def test_componentwise_bounds(self):
        data = make_dataset([[1.0, 10.0], [3.0, 30.0]])
        norm = normalize_fit(data)
        assert list(norm.mins) == [1.0, 10.0]
        assert list(norm.maxs) == [3.0, 30.0]

    def test_fit_uses_enrolled_rows_only(self):
        data = make_dataset(
            [[0.0], [1.0], [99.0]],
            identities=("a", "a", "a"),
            roles=("enrolled", "enrolled", "probe"),
        )
        norm = normalize_fit(data)
        assert norm.maxs[0] == 1.0

    def test_roundtrip_recovers_enrolled_vectors(self):
        rng = np.random.default_rng(3)
        vectors = rng.normal(size=(40, 7)) * rng.uniform(0.1, 50, size=7)
        vectors[:, 2] = 4.25  # degenerate dimension
        data = make_dataset(vectors)
        norm = normalize_fit(data)
        back = norm.invert(norm.apply(vectors))
        assert np.abs(back - vectors).max() <= 1e-12

    def test_enrolled_dimensions_land_in_unit_interval(self):
        rng = np.random.default_rng(9)
        data = make_dataset(rng.normal(size=(25, 4)) * 13.0)
        mapped = normalize_fit(data).apply(data.vectors)
        assert mapped.min() >= 0.0 and mapped.max() <= 1.0

    def test_empty_dataset_rejected(self):
        data = make_dataset(np.zeros((1, 2)), roles=("probe",), identities=("a",))
        with pytest.raises(UsageError):
            normalize_fit(data)


class TestDataset:
    def test_non_finite_rejected(self):
        with pytest.raises(DataError):
            make_dataset([[np.nan]])

    def test_unknown_role_rejected(self):
        with pytest.raises(DataError):
            make_dataset([[1.0]], roles=("gallery",))

    def test_views(self):
        data = make_dataset(
            [[0.0], [1.0], [2.0]],
            identities=("a", "b", "a"),
            roles=("enrolled", "enrolled", "probe"),
        )
        assert data.enrolled_view().size == 2
        assert data.probe_view().identities == ("a",)

    def test_vectors_are_read_only(self):
        data = make_dataset([[1.0, 2.0]])
        with pytest.raises(ValueError):
            data.vectors[0, 0] = 9.0


class TestCsv:
    def test_single_row(self, tmp_path):
        path = tmp_path / "one.csv"
        path.write_text("identity,role,f1,f2\nid1,enrolled,0.5,0.25\n")
        data = load_csv(path)
        assert data.size == 1 and data.dimension == 2
        assert data.identities == ("id1",)
        assert data.vectors[0, 1] == 0.25

    def test_empty_file_is_parse_error(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(DataError):
            load_csv(path)

    def test_roundtrip_bit_exact(self, tmp_path):
        rng = np.random.default_rng(17)
        data = make_dataset(
            rng.normal(size=(30, 5)) * 1e3,
            identities=tuple(f"p{i % 7}" for i in range(30)),
        )
        path = tmp_path / "d.csv"
        save_csv(data, path)
        again = load_csv(path)
        assert np.array_equal(again.vectors, data.vectors)
        assert again.identities == data.identities
        assert again.roles == data.roles
        save_csv(again, tmp_path / "d2.csv")
        assert (tmp_path / "d.csv").read_bytes() == (tmp_path / "d2.csv").read_bytes()

    def test_field_count_error_names_line(self):
        with pytest.raises(DataError, match="line 3"):
            parse_csv("identity,role,f1\na,enrolled,1\nb,enrolled\n")

    def test_non_numeric_cell_names_line(self):
        with pytest.raises(DataError, match="line 2"):
            parse_csv("identity,role,f1\na,enrolled,zap\n")

    def test_bad_role_rejected(self):
        with pytest.raises(DataError, match="role"):
            parse_csv("identity,role,f1\na,gallery,1\n")

    def test_orphan_probe_rejected(self):
        with pytest.raises(DataError, match="probe"):
            parse_csv("identity,role,f1\na,enrolled,1\nb,probe,2\n")

    def test_header_required(self):
        with pytest.raises(DataError):
            parse_csv("1,2,3\n")
