"""Reach-set based reachability (forward/backward, sequential/one-shot).

Reach sets are unions of DBMs. One step of the forward map intersects every
part with every PWA region and takes the affine image; the backward map
takes preimages and intersects them with the region they came from.
"""

from __future__ import annotations

import time
from typing import Optional

from .dbm import Dbm, DbmUnion, image_affine, intersect, preimage_affine
from .maxplus import MaxPlusMatrix, mp_matmul
from .problem import ReachResult, ReachSpec, ReachTimeout
from .pwa import PwaSystem, pwa_generate


def _tick(deadline):
    if deadline is not None and time.perf_counter() > deadline:
        raise ReachTimeout("explicit reachability passed its deadline")


def image_union(pwa: PwaSystem, S: DbmUnion, reduce=False, deadline=None) -> DbmUnion:
    parts = []
    for part in S:
        for r in pwa.candidates(part):
            _tick(deadline)
            piece = intersect(part, r.region)
            if piece is not None:
                parts.append(image_affine(piece, r.g, r.offsets))
    return DbmUnion.of(S.n, parts, reduce=reduce)


def preimage_union(pwa: PwaSystem, S: DbmUnion, reduce=False, deadline=None) -> DbmUnion:
    parts = []
    for part in S:
        for r in pwa:
            _tick(deadline)
            parts.append(preimage_affine(part, r.g, r.offsets, within=r.region))
    return DbmUnion.of(S.n, parts, reduce=reduce)


def forward_reach_sets(
    A: MaxPlusMatrix, X: Dbm, N: int, pwa: Optional[PwaSystem] = None, reduce=False, deadline=None
) -> list[DbmUnion]:
    """``[X_1, ..., X_N]`` with ``X_k`` the image of ``X_{k-1}``."""
    pwa = pwa or pwa_generate(A, full_dimensional=True)
    cur = DbmUnion.of(A.n, [X])
    out = []
    for _ in range(N):
        cur = image_union(pwa, cur, reduce=reduce, deadline=deadline)
        out.append(cur)
    return out


def backward_reach_sets(
    A: MaxPlusMatrix, Y: Dbm, N: int, pwa: Optional[PwaSystem] = None, reduce=False, deadline=None
) -> list[DbmUnion]:
    """``[Y_-1, ..., Y_-N]``, cut short after the first empty set."""
    pwa = pwa or pwa_generate(A, full_dimensional=True)
    cur = DbmUnion.of(A.n, [Y])
    out = []
    for _ in range(N):
        cur = preimage_union(pwa, cur, reduce=reduce, deadline=deadline)
        out.append(cur)
        if cur.is_empty():
            break
    return out


def oneshot_forward_set(A_k: MaxPlusMatrix, X: Dbm, reduce=False, deadline=None) -> DbmUnion:
    """``{A^k (x) x | x in X}`` given the power ``A_k``."""
    pwa = pwa_generate(A_k, full_dimensional=True)
    return image_union(pwa, DbmUnion.of(X.n, [X]), reduce=reduce, deadline=deadline)


def oneshot_backward_set(A_k: MaxPlusMatrix, Y: Dbm, reduce=False, deadline=None) -> DbmUnion:
    pwa = pwa_generate(A_k, full_dimensional=True)
    return preimage_union(pwa, DbmUnion.of(Y.n, [Y]), reduce=reduce, deadline=deadline)


def reach_explicit(spec: ReachSpec, reduce=False, deadline=None) -> ReachResult:
    """Bounded reachability by explicit reach sets.

    Follows the loop structure of the four reach-set algorithms: steps are
    checked from ``k = 1`` (``k = 0`` only with ``spec.check_k0``), the
    one-shot strategies rebuild the PWA system of ``A^k`` at every step, and
    the backward strategies stop with ``False`` once the backward set is
    empty.
    """
    A, X, Y = spec.A, spec.X, spec.Y
    if spec.check_k0 and intersect(X, Y) is not None:
        return ReachResult(True, 0)
    sizes = []
    forward = spec.mode == "forward"
    oneshot = spec.strategy == "oneshot"
    pwa = None if oneshot else pwa_generate(A, full_dimensional=True)
    cur = DbmUnion.of(A.n, [X if forward else Y])
    power = None
    for k in range(1, spec.N + 1):
        if oneshot:
            power = A if power is None else mp_matmul(power, A)
            if forward:
                cur = oneshot_forward_set(power, X, reduce=reduce, deadline=deadline)
            else:
                cur = oneshot_backward_set(power, Y, reduce=reduce, deadline=deadline)
        elif forward:
            cur = image_union(pwa, cur, reduce=reduce, deadline=deadline)
        else:
            cur = preimage_union(pwa, cur, reduce=reduce, deadline=deadline)
        sizes.append(len(cur))
        if not forward and cur.is_empty():
            return ReachResult(False, k, emptied=True, set_sizes=sizes)
        if cur.intersects(Y if forward else X):
            return ReachResult(True, k, set_sizes=sizes)
    return ReachResult(False, None, set_sizes=sizes)
