import csv
import hashlib
import io
import json
import logging
import math
import os
import tempfile
from typing import Any, Dict, Iterable, List, Sequence

import numpy as np

logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.12g'


def format_value(value: Any) -> str:
    if value is None:
        return ''
    if isinstance(value, (bool, str)):
        return str(value).lower() if isinstance(value, bool) else value
    value = float(value)
    if math.isnan(value):
        return ''
    return FLOAT_FORMAT % value


def _comment_block(comments: Sequence[str]) -> str:
    return ''.join(f'# {comment}\n' for comment in comments)


def render_table(header: Sequence[str], rows: np.ndarray, comments: Sequence[str] = ()) -> str:
    """Purely numeric CSV through np.savetxt, with '# key=value' comment lines above the header."""
    buffer = io.StringIO()
    buffer.write(_comment_block(comments))
    buffer.write(','.join(header) + '\n')
    np.savetxt(buffer, np.atleast_2d(np.asarray(rows, dtype=float)), fmt=FLOAT_FORMAT, delimiter=',')
    return buffer.getvalue()


def render_csv(header: Sequence[str], rows: Iterable[Sequence[Any]], comments: Sequence[str] = ()) -> str:
    """CSV for rows that may hold missing values; None and NaN become empty cells."""
    buffer = io.StringIO()
    buffer.write(_comment_block(comments))
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(header)
    writer.writerows([format_value(v) for v in row] for row in rows)
    return buffer.getvalue()


def render_json(payload: Any) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + '\n'


class ResultStore:
    def __init__(self, output_dir: str):
        self.output_dir = output_dir
        self.written: List[Dict[str, str]] = []

    def write_text(self, name: str, text: str) -> str:
        os.makedirs(self.output_dir, exist_ok=True)
        path = os.path.join(self.output_dir, name)
        fd, tmp_path = tempfile.mkstemp(dir=self.output_dir, prefix=f'.{name}.', suffix='.tmp')
        try:
            with os.fdopen(fd, 'w', encoding='utf-8', newline='') as handle:
                handle.write(text)
            os.replace(tmp_path, path)
        except BaseException:
            if os.path.exists(tmp_path):
                os.remove(tmp_path)
            raise
        digest = hashlib.sha256(text.encode('utf-8')).hexdigest()
        self.written.append({'file': name, 'sha256': digest})
        logger.info("Wrote %s", path)
        return path

    def write_json(self, name: str, payload: Any) -> str:
        return self.write_text(name, render_json(payload))
