"""Exhaustive simplex-grid oracle for the max-min payoff programs.

Independent verification path for the ascent solvers in :mod:`keyfoil.region`:
enumerate every conditional pmf whose coordinates are multiples of 1/m, keep
the rate-feasible points, and return the best inner-min value.  No gradients,
no restarts; the only cleverness is in *how* the same grid is enumerated.

For the blind, lossless, and past-source programs the full product grid is
small enough to scan directly.  For the layered programs (full-causal and
past-actions families) a literal product scan is astronomically large, but
both the objective and the key-rate functional decompose as sums over the
adversary-visible symbol u:

    value      = sum_u f_u(a_u, t_u)
    key usage  = sum_u g_u(a_u, t_u)

where a_u is the slice of p0(x)p(u,v|x) at that u and t_u indexes the grid of
action rows p(y|u,v) for that block.  For a fixed description grid point the
message-rate constraint is already decided, so the inner scan over action rows
reduces to per-block (g, f) envelopes merged under the single key budget --
an exact reduction of the same exhaustive search.  Two further lossless cuts:
candidates whose exact upper bound cannot beat the incumbent are skipped, and
relabelings of (u, v) (which change nothing observable) are enumerated once.

Guards refuse problems whose free-parameter count exceeds 12 or whose grid
would still be too large to scan; refusal is an error, never an approximation.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import permutations, product
from typing import Sequence

import numpy as np
from scipy.special import xlogy

from .errors import InfeasibleProblemError, ResourceGuardError
from .region import AdversaryModel, ProblemInstance

__all__ = ["oracle_grid", "free_parameter_count"]

_LN2 = float(np.log(2.0))
RATE_TOL = 1e-9
MAX_FREE_PARAMS = 12
MAX_COMBOS = 30_000_000
MAX_BLOCK_GRID = 3000
_CHUNK = 4096


def _hb(t: np.ndarray, axes) -> np.ndarray:
    return -xlogy(t, t).sum(axis=axes) / _LN2


@lru_cache(maxsize=32)
def _compositions(total: int, parts: int) -> np.ndarray:
    """All nonnegative integer vectors of the given length summing to total."""
    if parts == 1:
        out = np.array([[total]], dtype=np.int64)
    else:
        rows = []
        for first in range(total + 1):
            rest = _compositions(total - first, parts - 1)
            rows.append(np.column_stack([np.full(len(rest), first, dtype=np.int64), rest]))
        out = np.vstack(rows)
    out.flags.writeable = False
    return out


def _mode_code(mode) -> str:
    if isinstance(mode, AdversaryModel):
        return mode.value
    if mode in ("thm1", "thm2", "thm3", "thm4", "lossless"):
        return mode
    raise ValueError(f"unknown oracle mode {mode!r}")


def free_parameter_count(prob: ProblemInstance, mode, cards: Sequence[int]) -> int:
    """Free simplex coordinates of the program's conditional-pmf family."""
    code = _mode_code(mode)
    nx, ny = prob.nx, prob.ny
    if code in ("thm1", "thm2"):
        cu, cv = cards
        m = cu * cv
        return nx * (m - 1) + m * (ny - 1)
    if code == "thm3":
        (cu,) = cards
        return nx * (cu * ny - 1)
    if code == "thm4":
        return nx * (ny - 1)
    (cu,) = cards
    return nx * (cu - 1)


def oracle_grid(prob: ProblemInstance, mode, cards: Sequence[int] = (), resolution: int = 24) -> float:
    """Best feasible value over the 1/resolution simplex grid for the given mode.

    Ground truth for derived solver values; raises ``ResourceGuardError``
    rather than approximating when the grid is too large.
    """
    code = _mode_code(mode)
    cards = tuple(cards)
    if resolution < 1:
        raise ValueError("resolution denominator must be >= 1")
    nfree = free_parameter_count(prob, code, cards)
    if nfree > MAX_FREE_PARAMS:
        raise ResourceGuardError(
            f"oracle refuses {nfree} free parameters (> {MAX_FREE_PARAMS}); lower the cardinalities"
        )
    if code == "thm4":
        return _oracle_rowfamily(prob, resolution, kind="thm4", cu=1)
    if code == "lossless":
        (cu,) = cards
        hx = prob.source_entropy()
        if prob.msg_rate < hx - RATE_TOL:
            raise InfeasibleProblemError(
                f"lossless reproduction needs msg_rate >= H(X) = {hx:.6g} bits"
            )
        return _oracle_rowfamily(prob, resolution, kind="lossless", cu=cu)
    if code == "thm3":
        (cu,) = cards
        return _oracle_rowfamily(prob, resolution, kind="thm3", cu=cu)
    cu, cv = cards
    return _oracle_layered(prob, resolution, cu, cv, code)


# ---------------------------------------------------------------------------
# direct product scans: one conditional-row family, chunked evaluation
# ---------------------------------------------------------------------------


def _row_combos(n_rows: int, grid: np.ndarray):
    """Iterator of index matrices (chunk, n_rows) covering the full product."""
    n = len(grid)
    total = n ** n_rows
    if total > MAX_COMBOS:
        raise ResourceGuardError(
            f"oracle grid would enumerate {total} row combinations (> {MAX_COMBOS}); coarsen the resolution"
        )
    digits = n ** np.arange(n_rows - 1, -1, -1, dtype=np.int64)
    for start in range(0, total, 262144):
        flat = np.arange(start, min(start + 262144, total), dtype=np.int64)
        yield (flat[:, None] // digits[None, :]) % n


def _oracle_rowfamily(prob: ProblemInstance, m: int, kind: str, cu: int) -> float:
    nx, ny, nz = prob.nx, prob.ny, prob.nz
    p0, pi = prob.source, prob.payoff.values
    hx = prob.source_entropy()
    if kind == "thm4":
        width = ny
    elif kind == "lossless":
        width = cu
    else:
        width = cu * ny
    grid = _compositions(m, width).astype(np.float64) / m
    best = -np.inf
    if kind == "lossless":
        pi_diag = pi[np.arange(nx), np.arange(nx), :]
    for idx in _row_combos(nx, grid):
        rows = grid[idx]                                       # (B, nx, width)
        q = p0[None, :, None] * rows
        if kind == "thm4":
            msg = hx + _hb(q.sum(axis=1), 1) - _hb(q, (1, 2))
            feas = msg <= prob.msg_rate + RATE_TOL
            value = np.einsum("bxy,xyz->bz", q, pi).min(axis=1)
        elif kind == "lossless":
            key = _hb(q, (1, 2)) - _hb(q.sum(axis=1), 1)
            feas = key <= prob.key_rate + RATE_TOL
            value = np.einsum("bxu,xz->buz", q, pi_diag).min(axis=2).sum(axis=1)
        else:  # past-source family p(u, y | x)
            B = q.shape[0]
            qr = q.reshape(B, nx, cu, ny)
            puy = qr.sum(axis=1)
            pu = puy.sum(axis=2)
            h_q = _hb(qr, (1, 2, 3))
            msg = hx + _hb(puy, (1, 2)) - h_q
            key = _hb(qr.sum(axis=3), (1, 2)) + _hb(puy, (1, 2)) - _hb(pu, 1) - h_q
            feas = (msg <= prob.msg_rate + RATE_TOL) & (key <= prob.key_rate + RATE_TOL)
            value = np.einsum("bxuy,xyz->buz", qr, pi).min(axis=2).sum(axis=1)
        if feas.any():
            best = max(best, float(value[feas].max()))
    if best == -np.inf:
        raise InfeasibleProblemError("no grid point satisfies the rate constraints")
    return best


# ---------------------------------------------------------------------------
# layered programs: block decomposition over the public symbol u
# ---------------------------------------------------------------------------


def _cell_perm_group(cu: int, cv: int, cap: int = 64) -> list[np.ndarray]:
    """Cell permutations of (u, v) induced by relabeling u and, per u, v."""
    perms = []
    for pu in permutations(range(cu)):
        for pvs in product(permutations(range(cv)), repeat=cu):
            sigma = np.empty(cu * cv, dtype=np.int64)
            for u in range(cu):
                for v in range(cv):
                    sigma[u * cv + v] = pu[u] * cv + pvs[u][v]
            perms.append(sigma)
            if len(perms) > cap:
                raise ResourceGuardError("relabeling group too large for the oracle")
    return perms


@lru_cache(maxsize=8)
def _canonical_pairs(m: int, cu: int, cv: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Description-grid rows plus the canonical pair index set under relabeling."""
    M = cu * cv
    rows = _compositions(m, M)
    n = len(rows)
    if M > 4 or m > 255:  # packing trick needs each description row in 4 bytes
        idx0 = np.repeat(np.arange(n, dtype=np.int32), n)
        idx1 = np.tile(np.arange(n, dtype=np.int32), n)
        return rows, idx0, idx1

    def pack(r8: np.ndarray) -> np.ndarray:
        padded = np.zeros((len(r8), 8), dtype=np.uint64)
        padded[:, :M] = r8.astype(np.uint64)
        shifts = np.arange(56, -8, -8, dtype=np.uint64)[:8]
        return (padded << shifts[None, :]).sum(axis=1, dtype=np.uint64) >> np.uint64(32)

    base = pack(rows)
    idx0 = np.repeat(np.arange(n, dtype=np.int32), n)
    idx1 = np.tile(np.arange(n, dtype=np.int32), n)
    pair = (base[idx0] << np.uint64(32)) | base[idx1]
    mask = np.ones(len(pair), dtype=bool)
    for sigma in _cell_perm_group(cu, cv):
        img = pack(rows[:, sigma])
        mask &= pair <= ((img[idx0] << np.uint64(32)) | img[idx1])
    return rows, idx0[mask].copy(), idx1[mask].copy()


def _oracle_layered(prob: ProblemInstance, m: int, cu: int, cv: int, code: str) -> float:
    nx, ny, nz = prob.nx, prob.ny, prob.nz
    if cu > 2:
        raise ResourceGuardError("layered oracle supports at most two public symbols (u)")
    p0, pi = prob.source, prob.payoff.values
    hx = prob.source_entropy()
    M = cu * cv

    # description grid (with relabeling quotient when the pair trick applies)
    if nx == 2:
        rows, idx0, idx1 = _canonical_pairs(m, cu, cv)
        combos = np.stack([idx0, idx1], axis=1)
        grid = rows.astype(np.float64) / m
    else:
        grid = _compositions(m, M).astype(np.float64) / m
        total = len(grid) ** nx
        if total > MAX_COMBOS:
            raise ResourceGuardError("description grid too large; coarsen the resolution")
        digits = len(grid) ** np.arange(nx - 1, -1, -1, dtype=np.int64)
        flat = np.arange(total, dtype=np.int64)
        combos = ((flat[:, None] // digits[None, :]) % len(grid)).astype(np.int32)

    # action-row grid per (u, v) cell and the per-block tuple index
    row_grid = _compositions(m, ny).astype(np.float64) / m      # (Trow, ny)
    t_row = len(row_grid)
    t_block = t_row ** cv
    if t_block > MAX_BLOCK_GRID:
        raise ResourceGuardError("action-row grid too large per block; coarsen the resolution")
    tidx = np.stack(np.meshgrid(*([np.arange(t_row)] * cv), indexing="ij"), axis=-1).reshape(t_block, cv)
    rv = row_grid[tidx]                                          # (T, cv, ny)
    h_row = _hb(row_grid, 1)                                     # (Trow,)
    hr = h_row[tidx]                                             # (T, cv)
    # payoff of a block as a (x,v) -> (t,z) contraction: s_z = au . rp
    rp = np.tensordot(rv, pi, axes=(2, 1))                       # (T, cv, nx, nz)
    rp_mat = rp.transpose(2, 1, 0, 3).reshape(nx * cv, t_block * nz)

    key_budget = prob.key_rate + RATE_TOL
    # the key functional never exceeds H(V|U) <= log2(cv): a budget at least
    # that large is vacuous and the inner scan reduces to the payoff max
    key_vacuous = key_budget >= np.log2(max(cv, 1))

    # ------------------------------------------------------------------
    # slice universe: a block is determined by its (x, v) mass allocation,
    # and every per-block quantity is tabulated once per distinct slice
    # ------------------------------------------------------------------
    parts = _compositions(m, cv + 1)[:, :cv]                     # row parts with sum <= m
    n_parts = len(parts)
    n_slices = n_parts ** nx
    if n_slices > 400_000:
        raise ResourceGuardError("slice table too large; coarsen the resolution")
    radix = (m + 1) ** np.arange(cv, dtype=np.int64)
    enc2pid = np.full((m + 1) ** cv, -1, dtype=np.int64)
    enc2pid[parts @ radix] = np.arange(n_parts)
    rows_int = np.asarray(grid * m + 0.5, dtype=np.int64)
    pid = np.stack(
        [enc2pid[rows_int[:, u * cv: (u + 1) * cv] @ radix] for u in range(cu)]
    )                                                            # (cu, n_rows)
    x_radix = n_parts ** np.arange(nx - 1, -1, -1, dtype=np.int64)

    def slice_masses(sids: np.ndarray) -> np.ndarray:
        av = np.empty((len(sids), nx, cv))
        for x in range(nx):
            p_ids = (sids // x_radix[x]) % n_parts
            av[:, x, :] = p0[x] * parts[p_ids] / m
        return av

    def g_of(au: np.ndarray, t_sel: np.ndarray | None) -> np.ndarray:
        """Key usage of a block slice, over all t points or at selected ones."""
        puv = au.sum(axis=1)
        pu = puv.sum(axis=1)
        h_uv = _hb(puv, 1)
        h_u = -xlogy(pu, pu) / _LN2
        if t_sel is None:
            pxy = np.tensordot(au, rv, axes=(2, 1)).transpose(0, 2, 1, 3)
            t_mix = puv @ hr.T
            h_xy = _hb(pxy, (2, 3))
        else:
            rsel = rv[t_sel]                                     # (B, cv, ny)
            pxy = np.einsum("bxv,bvy->bxy", au, rsel)[:, None, :, :]
            t_mix = (puv * hr[t_sel]).sum(axis=1)[:, None]
            h_xy = _hb(pxy, (2, 3))
        if code == "thm1":
            g = h_xy + (h_uv - h_u)[:, None] - _hb(au, (1, 2))[:, None] - t_mix
        else:  # past-actions key functional
            py = pxy.sum(axis=2)
            g = _hb(py, 2) - h_u[:, None] - t_mix
        return g[:, 0] if t_sel is not None else g

    # phase 0: payoff table phi(slice) = max_t min_z, plus key usage there
    phi = np.empty(n_slices)
    g_star = None if key_vacuous else np.empty(n_slices)
    for s in range(0, n_slices, 16384):
        sids = np.arange(s, min(s + 16384, n_slices), dtype=np.int64)
        av = slice_masses(sids)
        s_z = (av.reshape(len(sids), nx * cv) @ rp_mat).reshape(len(sids), t_block, nz)
        fb = s_z.min(axis=2)
        t_star = fb.argmax(axis=1)
        phi[sids] = fb[np.arange(len(sids)), t_star]
        if g_star is not None:
            g_star[sids] = g_of(av, t_star)

    # phase 1: message-rate feasibility per description point, then gathers
    h_row_x = np.stack([-xlogy(p0[x] * grid, p0[x] * grid).sum(axis=1) / _LN2 for x in range(nx)])
    best = -np.inf
    hard_sid = []
    hard_ub = []
    for s in range(0, len(combos), 1 << 19):
        cidx = combos[s: s + (1 << 19)]
        pm = np.zeros((len(cidx), M))
        hxm = np.zeros(len(cidx))
        for x in range(nx):
            pm += p0[x] * grid[cidx[:, x]]
            hxm += h_row_x[x][cidx[:, x]]
        feas = hx + _hb(pm, 1) - hxm <= prob.msg_rate + RATE_TOL
        if not feas.any():
            continue
        sub = cidx[feas]
        sid = np.zeros((len(sub), cu), dtype=np.int64)
        for u in range(cu):
            for x in range(nx):
                sid[:, u] += pid[u][sub[:, x]] * x_radix[x]
        ub_ex = phi[sid].sum(axis=1)
        if key_vacuous:
            best = max(best, float(ub_ex.max()))
            continue
        fits = g_star[sid].sum(axis=1) <= key_budget
        if fits.any():
            best = max(best, float(ub_ex[fits].max()))
        rest = ~fits & (ub_ex > best)
        if rest.any():
            hard_sid.append(sid[rest])
            hard_ub.append(ub_ex[rest])
    if best == -np.inf and not hard_sid:
        raise InfeasibleProblemError("no description grid point satisfies the message-rate constraint")
    if key_vacuous or not hard_sid:
        return best

    hard_sid = np.concatenate(hard_sid, axis=0)
    hard_ub = np.concatenate(hard_ub, axis=0)
    order = np.argsort(-hard_ub)
    hard_sid, hard_ub = hard_sid[order], hard_ub[order]

    big = float(1 << 20)
    slab = 1 << 14
    for s in range(0, len(hard_sid), slab):
        if hard_ub[s] <= best + 1e-12:
            break
        sid = hard_sid[s: s + slab]
        ub = hard_ub[s: s + slab]
        live = ub > best
        sid = sid[live]
        if len(sid) == 0:
            continue
        # envelopes for the distinct slices of this slab: (g, f) Pareto front
        uniq, inv = np.unique(sid.ravel(), return_inverse=True)
        inv = inv.reshape(sid.shape)
        g_parts, f_parts, lens = [], [], []
        for t in range(0, len(uniq), 8192):
            su = uniq[t: t + 8192]
            av = slice_masses(su)
            s_z = (av.reshape(len(su), nx * cv) @ rp_mat).reshape(len(su), t_block, nz)
            fb = s_z.min(axis=2)
            gb = g_of(av, None)
            ordg = np.argsort(gb, axis=1)
            gs = np.take_along_axis(gb, ordg, axis=1)
            fs = np.maximum.accumulate(np.take_along_axis(fb, ordg, axis=1), axis=1)
            keep_pt = np.empty_like(fs, dtype=bool)
            keep_pt[:, 0] = True
            keep_pt[:, 1:] = fs[:, 1:] > fs[:, :-1]
            r, c = np.nonzero(keep_pt)
            g_parts.append(gs[r, c])
            f_parts.append(fs[r, c])
            lens.append(np.bincount(r, minlength=len(su)))
        g_csr = np.concatenate(g_parts)
        f_csr = np.concatenate(f_parts)
        lens = np.concatenate(lens)
        offs = np.concatenate([[0], np.cumsum(lens)])
        row_of_entry = np.repeat(np.arange(len(uniq), dtype=np.int64), lens)
        g_aug = g_csr + row_of_entry * big

        if cu == 1:
            cnt = np.searchsorted(g_aug, key_budget + inv[:, 0] * big, side="right") - offs[inv[:, 0]]
            hit = cnt > 0
            vals = np.where(hit, f_csr[offs[inv[:, 0]] + np.maximum(cnt - 1, 0)], -np.inf)
            if hit.any():
                best = max(best, float(vals.max()))
            continue
        s0, s1 = inv[:, 0], inv[:, 1]
        len0 = lens[s0]
        q_pair = np.repeat(np.arange(len(sid), dtype=np.int64), len0)
        q_within = np.arange(len(q_pair), dtype=np.int64) - np.repeat(
            np.concatenate([[0], np.cumsum(len0)[:-1]]), len0
        )
        e_idx = offs[s0[q_pair]] + q_within
        q_budget = key_budget - g_csr[e_idx]
        target = s1[q_pair]
        pos = np.searchsorted(g_aug, np.clip(q_budget, -1.0, big - 1.0) + target * big, side="right")
        cnt = pos - offs[target]
        hit = cnt > 0
        if hit.any():
            cand = f_csr[e_idx[hit]] + f_csr[offs[target[hit]] + cnt[hit] - 1]
            best = max(best, float(cand.max()))
    if best == -np.inf:
        raise InfeasibleProblemError("no grid point satisfies the rate constraints")
    return best
