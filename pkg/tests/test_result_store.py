import hashlib
import json
import math
import os

import numpy as np
import pytest

from result_store import ResultStore, format_value, render_csv, render_json, render_table


def _read(path):
    with open(path, 'r', encoding='utf-8') as handle:
        return handle.read()


@pytest.mark.parametrize("value, expected", [
    (None, ''),
    (math.nan, ''),
    (True, 'true'),
    (0.1 + 0.2, '0.3'),
    (1.0, '1'),
    (1.23456789012345e-7, '1.23456789012e-07'),
    ('abc', 'abc'),
])
def test_format_value(value, expected):
    assert format_value(value) == expected


def test_render_csv_leaves_missing_cells_empty():
    text = render_csv(['a', 'b'], [(1, None), (0.5, 2)], ['scheme=abc'])
    assert text == '# scheme=abc\na,b\n1,\n0.5,2\n'


def test_render_csv_quotes_text_with_commas():
    assert render_csv(['label'], [('5s, 5p',)]) == 'label\n"5s, 5p"\n'


def test_render_table():
    rows = np.array([[0.1, 1.0], [0.5, 2e-7]])
    assert render_table(['t', 'n'], rows, ['x=1']) == '# x=1\nt,n\n0.1,1\n0.5,2e-07\n'


def test_render_table_single_row():
    assert render_table(['t', 'n'], np.array([0.25, 0.5])) == 't,n\n0.25,0.5\n'


def test_render_json_is_stable():
    assert render_json({'b': 1, 'a': [1, 2]}) == render_json({'a': [1, 2], 'b': 1})
    assert json.loads(render_json({'x': None})) == {'x': None}


def test_write_text_is_atomic_and_recorded(tmp_path):
    store = ResultStore(str(tmp_path / 'run'))
    path = store.write_text('out.csv', 'a,b\n')
    assert os.path.exists(path)
    assert _read(path) == 'a,b\n'
    assert store.written == [{'file': 'out.csv', 'sha256': hashlib.sha256(b'a,b\n').hexdigest()}]
    assert [name for name in os.listdir(tmp_path / 'run') if name.endswith('.tmp')] == []


def test_rewrite_replaces_content(tmp_path):
    store = ResultStore(str(tmp_path))
    store.write_text('x.json', 'old')
    path = store.write_json('x.json', {'k': 1})
    assert json.loads(_read(path)) == {'k': 1}
    assert [entry['file'] for entry in store.written] == ['x.json', 'x.json']
