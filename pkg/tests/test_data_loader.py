import numpy as np
import pytest

from backend.data_loader import DataLoader, load_csv, range_transform, save_csv
from backend.datasets import CompleteDataset, apply_mask
from backend.errors import DataFormatError, ValidationError

MTCARS_RANGES = {
    'mpg': (10.4, 33.9), 'cyl': (4, 8), 'disp': (71.1, 472.0), 'hp': (52, 335), 'drat': (2.76, 4.93),
    'wt': (1.513, 5.424), 'qsec': (14.5, 22.9), 'vs': (0, 1), 'am': (0, 1), 'gear': (3, 5), 'carb': (1, 8),
}


def _write(tmp_path, text, name='data.csv'):
    path = tmp_path / name
    path.write_text(text, encoding='utf-8')
    return str(path)


class TestMtcars:

    def test_fixture_matches_documented_ranges(self, mtcars):
        assert mtcars.shape == (32, 11)
        assert mtcars.columns == list(MTCARS_RANGES)
        for j, (low, high) in enumerate(MTCARS_RANGES.values()):
            assert mtcars.values[:, j].min() == pytest.approx(low)
            assert mtcars.values[:, j].max() == pytest.approx(high)

    def test_mtcars01_is_scaled_and_sorted(self, mtcars, mtcars01):
        assert mtcars01.values.min() == 0.0 and mtcars01.values.max() == 1.0
        mpg = mtcars01.values[:, 0]
        assert np.all(np.diff(mpg) >= 0)
        low_row = int(np.argmin(mtcars.values[:, 0]))
        assert mpg[0] == 0.0 and mtcars.values[low_row, 0] == pytest.approx(10.4)


class TestRangeTransform:

    def test_identity_on_unit_columns(self):
        values = np.array([[0.0, 1.0], [0.25, 0.0], [1.0, 0.5]])
        np.testing.assert_allclose(range_transform(values).values, values)

    def test_two_rows(self):
        np.testing.assert_allclose(range_transform([[3.0], [7.0]]).values, [[0.0], [1.0]])

    def test_sort_is_stable(self):
        data = CompleteDataset([[2.0, 0.0], [1.0, 1.0], [2.0, 2.0], [1.0, 3.0]], ['a', 'b'])
        result = range_transform(data, sort_by='a')
        np.testing.assert_allclose(result.values[:, 1], [1 / 3, 1.0, 0.0, 2 / 3])

    def test_constant_column(self):
        with pytest.raises(ValidationError):
            range_transform([[1.0, 2.0], [1.0, 3.0]])

    @pytest.mark.parametrize('sort_by', ['c', 2, -1])
    def test_unknown_sort_column(self, sort_by):
        data = CompleteDataset([[2.0, 0.0], [1.0, 1.0]], ['a', 'b'])
        with pytest.raises(ValidationError) as excinfo:
            range_transform(data, sort_by=sort_by)
        assert excinfo.value.field == 'sort_by'

    def test_sort_by_index(self):
        data = CompleteDataset([[2.0, 0.0], [1.0, 1.0], [3.0, 2.0]], ['a', 'b'])
        np.testing.assert_allclose(range_transform(data, sort_by=0).values[:, 1], [0.5, 0.0, 1.0])


class TestCsv:

    def test_round_trip(self, mtcars01, tmp_path):
        path = save_csv(mtcars01, str(tmp_path / 'm.csv'))
        loaded = load_csv(path)
        assert loaded.columns == mtcars01.columns
        np.testing.assert_allclose(loaded.values, mtcars01.values, atol=1e-12)

    def test_amputed_round_trip_restores_mask(self, mtcars01, tmp_path, rng):
        mask = (rng.random(mtcars01.shape) < 0.3).astype(int)
        loader = DataLoader()
        path = loader.save_csv(apply_mask(mtcars01, mask), str(tmp_path / 'x.csv'))
        assert 'NA' in open(path, encoding='utf-8').read()
        np.testing.assert_array_equal(loader.load_amputed(path).mask.values, mask)

    def test_mask_csv(self, tmp_path):
        loader = DataLoader()
        from backend.datasets import MissingnessMask
        mask = MissingnessMask(np.array([[0, 1], [1, 0]]))
        path = loader.save_mask(mask, str(tmp_path / 'mask.csv'), ['a', 'b'])
        assert open(path, encoding='utf-8').read() == 'a,b\n0,1\n1,0\n'
        np.testing.assert_array_equal(loader.load_mask(path).values, mask.values)

    def test_text_in_numeric_cell(self, tmp_path):
        path = _write(tmp_path, 'a,b\n1,2\n3,abc\n')
        with pytest.raises(DataFormatError, match=r"row 1, column b") as info:
            load_csv(path)
        assert info.value.row == 1 and info.value.column == 'b'

    def test_na_in_complete_dataset(self, tmp_path):
        path = _write(tmp_path, 'a,b\n1,NA\n')
        with pytest.raises(DataFormatError, match='NA'):
            load_csv(path)

    def test_ragged_rows(self, tmp_path):
        with pytest.raises(DataFormatError):
            load_csv(_write(tmp_path, 'a,b\n1,2\n1,2,3\n'))
        with pytest.raises(DataFormatError):
            load_csv(_write(tmp_path, 'a,b\n1\n', 'short.csv'))
        with pytest.raises(DataFormatError):
            load_csv(_write(tmp_path, 'a,b\n1,2,3\n', 'long.csv'))

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataFormatError, match='no such file'):
            load_csv(str(tmp_path / 'absent.csv'))
