"""Download and cache the benchmark matrices.

Files live in ``$PHITAYLOR_CACHE`` (default ``~/.cache/phitaylor``) as
``<name>.mtx`` next to a ``<name>.mtx.sha256`` sidecar. The sidecar is
written when the file first enters the cache and checked on every later
access; a mismatching file is moved to ``quarantine/``. A file placed by
hand without a sidecar is adopted as-is.
"""
import hashlib
import io
import os
import shutil
import tarfile
import urllib.error
import urllib.request
from dataclasses import dataclass
from pathlib import Path

from .exceptions import CatalogError, FetchError, IntegrityError

CACHE_ENV = "PHITAYLOR_CACHE"
MIRROR = "https://suitesparse-collection-website.herokuapp.com/MM"
TIMEOUT = 60


@dataclass(frozen=True)
class CatalogEntry:
    group: str
    name: str
    n: int
    nnz: int

    @property
    def url(self):
        return f"{MIRROR}/{self.group}/{self.name}.tar.gz"


CATALOG = {
    e.name: e for e in (
        CatalogEntry("HB", "orani678", 2529, 90158),
        CatalogEntry("HB", "bcspwr10", 5300, 21842),
        CatalogEntry("HB", "gr_30_30", 900, 7744),
        CatalogEntry("GHS_indef", "helm2d03", 392257, 2741935),
    )
}


def default_cache_dir():
    return Path(os.environ.get(CACHE_ENV) or Path.home() / ".cache" / "phitaylor")


def sha256_file(path):
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _sidecar(path):
    return path.with_name(path.name + ".sha256")


def _quarantine(path):
    qdir = path.parent / "quarantine"
    qdir.mkdir(exist_ok=True)
    target = qdir / path.name
    shutil.move(str(path), target)
    sidecar = _sidecar(path)
    if sidecar.exists():
        shutil.move(str(sidecar), qdir / sidecar.name)
    return target


def verify_cached(path):
    """Check ``path`` against its sidecar, recording one if absent."""
    path = Path(path)
    sidecar = _sidecar(path)
    actual = sha256_file(path)
    if not sidecar.exists():
        sidecar.write_text(actual + "\n")
        return path
    expected = sidecar.read_text().split()[0]
    if actual != expected:
        moved = _quarantine(path)
        raise IntegrityError(
            f"checksum mismatch for {path.name} (expected {expected}, got {actual}); "
            f"moved to {moved}")
    return path


def _download(entry, target):
    try:
        with urllib.request.urlopen(entry.url, timeout=TIMEOUT) as resp:
            payload = resp.read()
    except (urllib.error.URLError, OSError) as exc:
        raise FetchError(
            f"could not download {entry.url} ({exc}); place {entry.name}.mtx in "
            f"{target.parent} manually or set {CACHE_ENV}") from exc
    member = f"{entry.name}/{entry.name}.mtx"
    try:
        with tarfile.open(fileobj=io.BytesIO(payload), mode="r:gz") as tar:
            src = tar.extractfile(member)
            if src is None:
                raise KeyError(member)
            data = src.read()
    except (tarfile.TarError, KeyError) as exc:
        raise FetchError(f"archive from {entry.url} lacks {member}") from exc
    tmp = target.with_name(target.name + ".part")
    tmp.write_bytes(data)
    tmp.replace(target)


def fetch_suite(name, cache_dir=None, offline=False):
    """Return the local path of benchmark matrix ``name``, downloading if needed."""
    if name not in CATALOG:
        raise CatalogError(f"unknown matrix {name!r}; known: {', '.join(CATALOG)}")
    entry = CATALOG[name]
    cache = Path(cache_dir) if cache_dir is not None else default_cache_dir()
    target = cache / f"{name}.mtx"
    if target.exists():
        return verify_cached(target)
    if offline:
        raise FetchError(
            f"{name}.mtx is not cached in {cache} and network use is disabled; "
            f"download {entry.url} and place {name}.mtx there")
    cache.mkdir(parents=True, exist_ok=True)
    _download(entry, target)
    return verify_cached(target)
