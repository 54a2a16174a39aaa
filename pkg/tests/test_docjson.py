import json
import random

import pytest

from helpers import poster, random_document
from layerforge import docjson
from layerforge.docjson import DocumentFormatError


def test_roundtrip_random_documents():
    for s in range(100):
        d = random_document(random.Random(s))
        assert docjson.loads(docjson.dumps(d)) == d


def test_poster_dict_shape():
    data = docjson.to_dict(poster())
    assert data["canvas_width"] == 160 and data["canvas_height"] == 120
    assert data["root"]["kind"] == "frame"
    assert [c["kind"] for c in data["root"]["children"]] == ["graphic", "text", "text"]


@pytest.mark.parametrize("mutate, fragment", [
    (lambda d: d.update(extra=1), "unknown top-level"),
    (lambda d: d.update(version=99), "version"),
    (lambda d: d.pop("root"), "root"),
    (lambda d: d["root"].update(kind="blob"), "kind"),
])
def test_rejects_bad_documents(mutate, fragment):
    data = docjson.to_dict(poster())
    mutate(data)
    with pytest.raises(DocumentFormatError) as ei:
        docjson.from_dict(data)
    assert fragment in str(ei.value)


def test_invalid_json_text():
    with pytest.raises(DocumentFormatError):
        docjson.loads("{nope")


def test_output_matches_bundled_schema():
    jsonschema = pytest.importorskip("jsonschema")
    schema = docjson.schema()
    for s in range(30):
        jsonschema.validate(json.loads(docjson.dumps(random_document(random.Random(s)))), schema)
