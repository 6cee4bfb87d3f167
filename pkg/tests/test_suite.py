import io
import tarfile
import urllib.error

import pytest

from phitaylor import CatalogError, FetchError, IntegrityError, fetch_suite
from phitaylor import suite
from phitaylor.suite import CACHE_ENV, CATALOG, default_cache_dir, sha256_file


def no_network(*args, **kwargs):
    raise AssertionError("network used")


def test_catalog():
    assert set(CATALOG) == {"orani678", "bcspwr10", "gr_30_30", "helm2d03"}
    assert CATALOG["gr_30_30"].url.endswith("/HB/gr_30_30.tar.gz")


def test_unknown_name_lists_catalog(tmp_path):
    with pytest.raises(CatalogError) as info:
        fetch_suite("nope", cache_dir=tmp_path)
    for name in CATALOG:
        assert name in str(info.value)


def test_cached_file_needs_no_network(tmp_path, monkeypatch):
    monkeypatch.setattr(suite.urllib.request, "urlopen", no_network)
    path = tmp_path / "orani678.mtx"
    path.write_text("cached")
    assert fetch_suite("orani678", cache_dir=tmp_path) == path
    assert (tmp_path / "orani678.mtx.sha256").read_text().strip() == sha256_file(path)
    assert fetch_suite("orani678", cache_dir=tmp_path, offline=True) == path


def test_checksum_mismatch_quarantines(tmp_path):
    path = tmp_path / "bcspwr10.mtx"
    path.write_text("original")
    fetch_suite("bcspwr10", cache_dir=tmp_path)
    path.write_text("tampered")
    with pytest.raises(IntegrityError):
        fetch_suite("bcspwr10", cache_dir=tmp_path)
    assert not path.exists()
    assert (tmp_path / "quarantine" / "bcspwr10.mtx").read_text() == "tampered"
    assert (tmp_path / "quarantine" / "bcspwr10.mtx.sha256").exists()


def test_offline_empty_cache(tmp_path, monkeypatch):
    monkeypatch.setattr(suite.urllib.request, "urlopen", no_network)
    with pytest.raises(FetchError, match="place gr_30_30.mtx"):
        fetch_suite("gr_30_30", cache_dir=tmp_path, offline=True)


def test_network_failure(tmp_path, monkeypatch):
    def fail(*args, **kwargs):
        raise urllib.error.URLError("unreachable")
    monkeypatch.setattr(suite.urllib.request, "urlopen", fail)
    with pytest.raises(FetchError, match="manually"):
        fetch_suite("gr_30_30", cache_dir=tmp_path)
    assert not (tmp_path / "gr_30_30.mtx").exists()


def _archive(name, payload):
    buf = io.BytesIO()
    with tarfile.open(fileobj=buf, mode="w:gz") as tar:
        info = tarfile.TarInfo(f"{name}/{name}.mtx")
        info.size = len(payload)
        tar.addfile(info, io.BytesIO(payload))
    return buf.getvalue()


class FakeResponse(io.BytesIO):
    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def test_download_extracts_and_records_checksum(tmp_path, monkeypatch):
    payload = b"%%MatrixMarket matrix coordinate real general\n1 1 1\n1 1 2\n"
    seen = []

    def fake(url, timeout):
        seen.append(url)
        return FakeResponse(_archive("gr_30_30", payload))
    monkeypatch.setattr(suite.urllib.request, "urlopen", fake)
    cache = tmp_path / "new"
    path = fetch_suite("gr_30_30", cache_dir=cache)
    assert seen == [CATALOG["gr_30_30"].url]
    assert path.read_bytes() == payload
    assert (cache / "gr_30_30.mtx.sha256").read_text().strip() == sha256_file(path)


def test_archive_without_member(tmp_path, monkeypatch):
    monkeypatch.setattr(suite.urllib.request, "urlopen",
                        lambda url, timeout: FakeResponse(_archive("other", b"x")))
    with pytest.raises(FetchError, match="lacks"):
        fetch_suite("orani678", cache_dir=tmp_path)


def test_cache_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv(CACHE_ENV, str(tmp_path))
    assert default_cache_dir() == tmp_path
    (tmp_path / "helm2d03.mtx").write_text("x")
    assert fetch_suite("helm2d03", offline=True) == tmp_path / "helm2d03.mtx"
