"""
Run records and their JSON / CSV serialization.
"""
import csv
import io
import json
import logging
import math
import os
import tempfile
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from typing import List

import numpy as np

from .base import __version__

log = logging.getLogger(__name__)

schema_version = 1

csv_headers = {
    'scan': ['theta', 'flux'],
    'table': ['n', 'volM', 'radial', 'pedersen', 'hopf', 'bcn_a'],
}


def _plain(obj):
    """Convert numpy values to builtins and non-finite floats to None."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.generic):
        return _plain(obj.item())
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def _float17(value):
    if not math.isfinite(value):
        raise ValueError(f"non-finite float {value!r} in a record")
    text = format(value, '.17g')
    return text if any(c in text for c in '.e') else text + '.0'


class RecordEncoder(json.JSONEncoder):
    """JSON encoder writing every float with 17 significant digits."""

    def iterencode(self, o, _one_shot=False):
        markers = {} if self.check_circular else None
        encode = json.encoder.encode_basestring_ascii if self.ensure_ascii else json.encoder.encode_basestring
        return json.encoder._make_iterencode(markers, self.default, encode, self.indent, _float17,
                                             self.key_separator, self.item_separator,
                                             self.sort_keys, self.skipkeys, _one_shot)(o, 0)


@dataclass
class RunRecord:
    """
    One CLI invocation: what was asked, what came out, and enough context
    to rerun it.
    """
    command: str
    config: dict
    payload: dict
    version: str = __version__
    timestamp: str = ''
    seeds: List[int] = field(default_factory=list)
    grids: List[dict] = field(default_factory=list)
    duration: float = 0.0
    schema: int = schema_version

    def __post_init__(self):
        if not self.timestamp:
            self.timestamp = datetime.now(timezone.utc).isoformat()

    def to_dict(self):
        return _plain(asdict(self))

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, cls=RecordEncoder)

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        if data.get('schema') != schema_version:
            raise ValueError(f"unsupported record schema {data.get('schema')!r}")
        return cls(**data)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def to_csv(rows, header):
    """
    CSV text from a list of dicts or sequences.

    Parameters
    ----------
    rows : list
    header : list of str or str
        Column names, or a key of csv_headers.
    """
    if isinstance(header, str):
        header = csv_headers[header]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator='\n')
    writer.writerow(header)
    for row in rows:
        values = [row[h] for h in header] if isinstance(row, dict) else list(row)
        writer.writerow(_plain(values))
    return buf.getvalue()


def read_csv(text):
    """Parse CSV text written by to_csv into a header and float rows."""
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    return header, [[float(v) for v in row] for row in reader if row]


def write_atomic(path, text):
    """Write text to path through a temporary file in the same directory and a rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix='.puncvol-', suffix='.tmp')
    try:
        with os.fdopen(fd, 'w', encoding='utf-8') as f:
            f.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    log.debug("wrote %s (%d bytes)", path, len(text))
