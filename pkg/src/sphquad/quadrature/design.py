"""Matrix-free products with the harmonic design matrix Y and the Gram
matrix G_N = Y diag(v) Y^T.

Y has one row per basis harmonic and one column per node.  It is held in
memory when it fits the cache budget and otherwise recomputed block by
block on every product, so memory stays O(N * block) for any node count.
"""
import numpy as np
from scipy.linalg.blas import dsyrk

from ..errors import InvalidParameterError
from ..specfun import harmonic_matrix

DEFAULT_CACHE_BYTES = 1 << 30
BLOCK_BYTES = 64 << 20


class HarmonicDesign:
    """Harmonics of degree <= ``n`` at fixed nodes on S^2."""

    def __init__(self, points, n, cache_bytes=DEFAULT_CACHE_BYTES):
        self.points = np.asarray(points, dtype=float)
        if self.points.ndim != 2 or self.points.shape[1] != 3:
            raise InvalidParameterError("the harmonic design is implemented on S^2 only")
        self.n = int(n)
        self.N = (self.n + 1) ** 2
        self.M = self.points.shape[0]
        self.block = max(1, BLOCK_BYTES // (8 * self.N))
        self._Y = None
        if 8 * self.N * self.M <= cache_bytes:
            self._Y = harmonic_matrix(self.n, self.points, check=False)

    @property
    def cached(self):
        return self._Y is not None

    def blocks(self):
        """Yield (slice, Y[:, slice]) over node blocks."""
        for s in range(0, self.M, self.block):
            sl = slice(s, min(s + self.block, self.M))
            if self._Y is not None:
                yield sl, self._Y[:, sl]
            else:
                yield sl, harmonic_matrix(self.n, self.points[sl], check=False)

    def rmatvec(self, r):
        """Y^T r: values at the nodes of the polynomial with coefficients r."""
        r = np.asarray(r, dtype=float)
        if self._Y is not None:
            return self._Y.T @ r
        out = np.empty((self.M,) + r.shape[1:])
        for sl, Yb in self.blocks():
            out[sl] = Yb.T @ r
        return out

    def matvec(self, z):
        """Y z: sums over nodes, z of shape (M,) or (M, k)."""
        z = np.asarray(z, dtype=float)
        if self._Y is not None:
            return self._Y @ z
        out = np.zeros((self.N,) + z.shape[1:])
        for sl, Yb in self.blocks():
            out += Yb @ z[sl]
        return out

    def gram_matvec(self, v, r):
        """Y diag(v) Y^T r without forming the Gram matrix."""
        r = np.asarray(r, dtype=float)
        if r.shape[0] != self.N:
            raise InvalidParameterError(f"vector length {r.shape[0]} != N = {self.N}")
        if self._Y is not None:
            return self._Y @ (v * (self._Y.T @ r))
        out = np.zeros(self.N)
        for sl, Yb in self.blocks():
            out += Yb @ (v[sl] * (Yb.T @ r))
        return out

    def gram(self, v):
        """Explicit G_N (symmetric, both triangles filled)."""
        v = np.asarray(v, dtype=float)
        G = np.zeros((self.N, self.N), order="F")
        signs = np.sign(v)
        root = np.sqrt(np.abs(v))
        for sl, Yb in self.blocks():
            for sgn in (1.0, -1.0):
                mask = signs[sl] == sgn
                if not mask.any():
                    continue
                A = np.asfortranarray(Yb[:, mask] * root[sl][mask])
                G = dsyrk(sgn, A, beta=1.0, c=G, trans=0, lower=0, overwrite_c=1)
        # mirror the upper triangle block-wise; index arrays would cost O(N^2)
        step = 512
        for j in range(0, self.N, step):
            G[j:j + step, :j] = G[:j, j:j + step].T
            blk = G[j:j + step, j:j + step]
            blk[:] = np.triu(blk) + np.triu(blk, 1).T
        return G


def gram_matvec(C, n, r, design=None):
    """G_N r for the point set C (nodes and measure), N = (n+1)^2."""
    design = design or HarmonicDesign(C.points, n)
    return design.gram_matvec(C.measure, r)
