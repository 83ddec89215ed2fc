import json

from m0n import cache
from m0n.picard import PicContext, pic_context


def test_store_and_load(tmp_path, monkeypatch):
    monkeypatch.setenv(cache.ENV_VAR, str(tmp_path))
    cache.store("demo", {"a": [1, 2]})
    assert cache.load("demo") == {"a": [1, 2]}
    assert cache.load("missing") is None


def test_corrupt_entries_are_ignored(tmp_path, monkeypatch):
    monkeypatch.setenv(cache.ENV_VAR, str(tmp_path))
    cache.store("demo", {"a": 1})
    path = tmp_path / "demo.json"
    doc = json.loads(path.read_text())
    doc["payload"]["a"] = 2
    path.write_text(json.dumps(doc))
    assert cache.load("demo") is None
    path.write_text("{not json")
    assert cache.load("demo") is None


def test_disabled_cache(monkeypatch):
    monkeypatch.setenv(cache.ENV_VAR, "")
    cache.store("demo", 1)
    assert cache.cache_dir() is None and cache.load("demo") is None


def test_context_export_survives_json():
    ctx = pic_context(5)
    again = PicContext.from_export(json.loads(json.dumps(ctx.export())))
    assert again.basis == ctx.basis and again.dimension == 5
