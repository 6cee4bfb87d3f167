"""Matrix generators shared by the test modules."""
import numpy as np
import scipy.sparse

from phitaylor import SparseMatrix

CORPUS_SIZES = (8, 32, 64, 128)


def _unitary(rng, n, complex_):
    z = rng.standard_normal((n, n))
    if complex_:
        z = z + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def schur_matrix(rng, n, norm, complex_, normal):
    """Random ``Q (D + U) Q^H`` rescaled to ``||A||_1 = norm``.

    Eigenvalue real parts lie in ``[-1, 0.3]`` times the spectral radius,
    with one eigenvalue near the right end so the growth rate is
    representative. Non-normal matrices get a strictly upper triangular
    ``U`` of the same scale as ``D``. Real normal matrices are symmetric.
    """
    re = rng.uniform(-1.0, 0.3, n)
    re[0] = 0.3
    if complex_:
        lam = re + 1j * rng.uniform(-1.0, 1.0, n)
    else:
        lam = re
    t = np.diag(lam).astype(complex if complex_ else float)
    if not normal:
        upper = rng.standard_normal((n, n))
        if complex_:
            upper = upper + 1j * rng.standard_normal((n, n))
        t = t + np.triu(upper, 1) / np.sqrt(n)
    q = _unitary(rng, n, complex_)
    a = q @ t @ q.conj().T
    if not complex_:
        a = a.real
        if normal:
            a = (a + a.T) / 2
    return a * (norm / np.abs(a).sum(axis=0).max())


def corpus_case(index, seed=20240611):
    """Case ``index`` of the 200-matrix corpus; cycles through 16 classes."""
    rng = np.random.default_rng([seed, index])
    cls = index % 16
    n = CORPUS_SIZES[cls % 4]
    complex_ = bool((cls // 4) % 2)
    normal = bool(cls // 8)
    norm = 10.0 ** rng.uniform(-4, 3)
    a = schur_matrix(rng, n, norm, complex_, normal)
    label = f"#{index} n={n} {'complex' if complex_ else 'real'} " \
            f"{'normal' if normal else 'nonnormal'} |A|={norm:.3g}"
    return label, a


def random_sparse(rng, n, density, norm):
    a = scipy.sparse.random(n, n, density=density, random_state=rng, format="csr",
                            data_rvs=rng.standard_normal)
    a = a + scipy.sparse.diags(rng.standard_normal(n) * 0.5)
    col = abs(a).sum(axis=0).max()
    a = a * (norm / col) if col else a
    return SparseMatrix.from_scipy(a)


def stencil_9pt(grid):
    """Lower triangle of the 9-point Laplacian-like stencil on a grid x grid mesh.

    Diagonal 8, each of the (up to) eight neighbours -1; for ``grid = 30``
    this is the 900 x 900 matrix with 7744 stored entries and 1-norm 16.
    """
    entries = []
    for i in range(grid):
        for j in range(grid):
            row = i * grid + j
            for di in (-1, 0, 1):
                for dj in (-1, 0, 1):
                    ii, jj = i + di, j + dj
                    if 0 <= ii < grid and 0 <= jj < grid:
                        col = ii * grid + jj
                        if col <= row:
                            entries.append((row + 1, col + 1, 8.0 if col == row else -1.0))
    return entries


def write_stencil_mtx(path, grid=30):
    entries = stencil_9pt(grid)
    n = grid * grid
    lines = ["%%MatrixMarket matrix coordinate real symmetric",
             "% 9-point stencil stand-in for HB/gr_30_30",
             f"{n} {n} {len(entries)}"]
    lines += [f"{i} {j} {v!r}" for i, j, v in entries]
    path.write_text("\n".join(lines) + "\n")
    return path
