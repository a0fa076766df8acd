"""Single-letter max-min payoff programs for all four adversary models.

The system designs a per-symbol description (auxiliary variables U, V and an
action channel) subject to message- and key-rate budgets; the adversary then
plays the best attack allowed by its information model.  Each model yields a
constrained max-min program over conditional pmfs:

* full causal observation  -- design p(u,v|x), p(y|u,v); key budget binds
  I(X,Y;V|U), message budget binds I(X;U,V);
* past actions only        -- same family, key budget binds I(Y;V|U);
* past source only         -- design p(u,y|x); key budget binds I(X;Y|U) (an
  alternative reading I(X,Y;U) sits behind a config switch), message budget
  binds I(X;U,Y);
* message only (blind)     -- design p(y|x) with I(X;Y) inside the message
  budget; any strictly positive key rate suffices, and the optimum is
  discontinuous at exactly zero key;
* lossless                 -- actions must reproduce the source (Y = X);
  design p(u|x) with H(X|U) inside the key budget and H(X) inside the
  message budget.

The objective in every case is the expected payoff against the inner best
response z(u), which is re-solved exactly at every evaluation.  The outer
optimization is multi-start projected ascent on simplex rows with an exact
penalty mu * max(0, I - budget) per rate constraint, escalated over rounds;
gradients come from central finite differences on simplex-chart coordinates.
Values are lower estimates at the configured auxiliary cardinalities; an
independent exhaustive grid oracle lives in :mod:`keyfoil.oraclegrid`.

All solver randomness derives from ``SolverConfig.seed`` through counter-based
streams, so results are independent of scheduling and platform.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Sequence

import numpy as np
from scipy.special import xlogy

from .errors import InfeasibleProblemError
from .probcore import Axis, JointDist, PayoffTensor, marginalize
from .rng import INSTANCE, RESTART, Stream

__all__ = [
    "AdversaryModel",
    "ProblemInstance",
    "SolverConfig",
    "SolveResult",
    "inner_best_response",
    "solve_full_causal",
    "solve_past_actions",
    "solve_past_source",
    "solve_message_only",
    "solve_lossless",
    "solve_mode",
    "baseline_private_channel",
    "sweep",
    "matching_pennies",
    "random_instance",
    "default_card",
    "MODE_NAMES",
]

_LN2 = float(np.log(2.0))
FEAS_TOL = 1e-6


class AdversaryModel(Enum):
    """What the attacker sees besides the public message, mapped to CLI mode codes."""

    FULL_CAUSAL = "thm1"
    PAST_ACTIONS_ONLY = "thm2"
    PAST_SOURCE_ONLY = "thm3"
    MESSAGE_ONLY = "thm4"


MODE_NAMES = ("thm1", "thm2", "thm3", "thm4", "lossless")


@dataclass(frozen=True)
class ProblemInstance:
    """A finite zero-sum secrecy game: source law, payoff tensor, rate budgets."""

    source: np.ndarray
    payoff: PayoffTensor
    key_rate: float
    msg_rate: float

    def __post_init__(self):
        p0 = np.asarray(self.source, dtype=np.float64).copy()
        if p0.ndim != 1 or p0.shape[0] != self.payoff.shape[0]:
            raise ValueError("source pmf length must match the payoff X axis")
        if (p0 < 0).any() or abs(float(p0.sum()) - 1.0) > 1e-9:
            raise ValueError("source must be a pmf summing to 1 within 1e-9")
        if not (np.isfinite(self.key_rate) and np.isfinite(self.msg_rate)):
            raise ValueError("rates must be finite")
        if self.key_rate < 0 or self.msg_rate < 0:
            raise ValueError("rates must be nonnegative")
        p0.flags.writeable = False
        object.__setattr__(self, "source", p0)

    @property
    def nx(self) -> int:
        return self.payoff.shape[0]

    @property
    def ny(self) -> int:
        return self.payoff.shape[1]

    @property
    def nz(self) -> int:
        return self.payoff.shape[2]

    def source_entropy(self) -> float:
        return float(-xlogy(self.source, self.source).sum() / _LN2)

    def with_rates(self, key_rate: float | None = None, msg_rate: float | None = None) -> "ProblemInstance":
        return dataclasses.replace(
            self,
            key_rate=self.key_rate if key_rate is None else key_rate,
            msg_rate=self.msg_rate if msg_rate is None else msg_rate,
        )


@dataclass(frozen=True)
class SolverConfig:
    """Knobs for the multi-start penalized ascent. Defaults favor accuracy.

    ``scan_resolution`` seeds the multistart from a deterministic coarse scan
    of the description family (0 disables); ``refine_resolution`` is the
    action-row grid used by the exact inner refinement of layered programs
    (0 disables).  Both stages are deterministic, so results remain a pure
    function of the seed.
    """

    seed: int = 0
    restarts: int = 64
    penalty_init: float = 1.0
    penalty_growth: float = 4.0
    penalty_rounds: int = 8
    fd_step: float = 1e-5
    step_init: float = 0.5
    improve_tol: float = 1e-7
    patience: int = 50
    max_iters: int = 400
    feas_tol: float = FEAS_TOL
    thm3_constraint: str = "IXYgU"  # or "IXandYjointU"
    scan_resolution: int = 4
    refine_resolution: int = 48
    refine_top: int = 4

    def __post_init__(self):
        if self.thm3_constraint not in ("IXYgU", "IXandYjointU"):
            raise ValueError("thm3_constraint must be 'IXYgU' or 'IXandYjointU'")


@dataclass(frozen=True)
class SolveResult:
    """Best feasible point found, with the rate functionals evaluated there."""

    value: float
    joint: JointDist
    zmap: np.ndarray
    key_rate_used: float
    msg_rate_used: float
    restarts_run: int
    status: str  # converged | max-iters | infeasible-cardinality
    mode: str
    cards: tuple[int, ...]
    theta: np.ndarray = field(repr=False)  # raw factor rows; warm-start currency


def default_card(prob: ProblemInstance) -> int:
    """Cardinality fallback for U and V when the caller does not choose one.

    No bound is claimed optimal; results are lower estimates at this size.
    """
    return prob.nx * prob.ny + 2


# ---------------------------------------------------------------------------
# batched entropy pieces
# ---------------------------------------------------------------------------


def _hb(t: np.ndarray, axes) -> np.ndarray:
    """Joint entropy in bits over the given trailing axes (batch leading)."""
    return -xlogy(t, t).sum(axis=axes) / _LN2


def _project_rows(rows: np.ndarray) -> np.ndarray:
    """Euclidean projection of each trailing vector onto the simplex."""
    k = rows.shape[-1]
    if k == 1:
        return np.ones_like(rows)
    u = np.sort(rows, axis=-1)[..., ::-1]
    css = np.cumsum(u, axis=-1) - 1.0
    denom = np.arange(1, k + 1, dtype=np.float64)
    cond = u - css / denom > 0
    rho = np.maximum(cond.sum(axis=-1), 1)
    theta = np.take_along_axis(css, rho[..., None] - 1, axis=-1) / rho[..., None]
    return np.maximum(rows - theta, 0.0)


# ---------------------------------------------------------------------------
# simplex grids shared by the scan and refinement stages
# ---------------------------------------------------------------------------


def _int_compositions(total: int, parts: int) -> np.ndarray:
    key = (total, parts)
    cached = _comp_cache.get(key)
    if cached is None:
        if parts == 1:
            cached = np.array([[total]], dtype=np.int64)
        else:
            blocks = []
            for first in range(total + 1):
                rest = _int_compositions(total - first, parts - 1)
                blocks.append(
                    np.column_stack([np.full(len(rest), first, dtype=np.int64), rest])
                )
            cached = np.vstack(blocks)
        cached.flags.writeable = False
        _comp_cache[key] = cached
    return cached


def _simplex_rows(denom: int, parts: int) -> np.ndarray:
    """All pmf rows with coordinates that are multiples of 1/denom."""
    return _int_compositions(denom, parts) / denom


_comp_cache: dict[tuple[int, int], np.ndarray] = {}
_tgrid_cache: dict[tuple[int, int, int], tuple] = {}


def _merge_blocks_seq(f: np.ndarray, g: np.ndarray, budget: float) -> tuple[float, np.ndarray]:
    """Exact key-budget allocation across blocks by sequential Pareto merging.

    ``f`` and ``g`` are (blocks, T).  Returns the best total payoff and the
    chosen action-tuple index per block, or (-inf, zeros) when nothing fits.
    """
    blocks, t_count = f.shape
    env_g = np.zeros(1)
    env_f = np.zeros(1)
    env_c = np.zeros((1, 0), dtype=np.int64)
    for u in range(blocks):
        gs = (env_g[:, None] + g[u][None, :]).ravel()
        fs = (env_f[:, None] + f[u][None, :]).ravel()
        keep = gs <= budget + 1e-9
        if not keep.any():
            return -np.inf, np.zeros(blocks, dtype=np.int64)
        gs, fs = gs[keep], fs[keep]
        prev = np.nonzero(keep)[0] // t_count
        t_pick = np.nonzero(keep)[0] % t_count
        order = np.argsort(gs, kind="stable")
        gs, fs = gs[order], fs[order]
        prev, t_pick = prev[order], t_pick[order]
        fmax = np.maximum.accumulate(fs)
        front = np.empty(len(fs), dtype=bool)
        front[0] = True
        front[1:] = fmax[1:] > fmax[:-1]
        front &= fs >= fmax  # keep the entries that set the running max
        env_g, env_f = gs[front], fs[front]
        env_c = np.column_stack([env_c[prev[front]], t_pick[front]])
    best = int(np.argmax(env_f))
    return float(env_f[best]), env_c[best]


def _tgrid(fine: int, cv: int, ny: int):
    """Action-row tuples per block: rows, tuple index, row values, row entropies."""
    key = (fine, cv, ny)
    cached = _tgrid_cache.get(key)
    if cached is None:
        rows = _simplex_rows(fine, ny)
        tr = len(rows)
        tidx = np.stack(np.meshgrid(*([np.arange(tr)] * cv), indexing="ij"), axis=-1).reshape(-1, cv)
        rv = rows[tidx]                                          # (T, cv, ny)
        h_rows = -xlogy(rows, rows).sum(axis=1) / _LN2
        hrt = h_rows[tidx]                                       # (T, cv)
        cached = (rows, tidx, rv, hrt)
        _tgrid_cache[key] = cached
    return cached


# ---------------------------------------------------------------------------
# programs: one batched evaluator per adversary model
# ---------------------------------------------------------------------------


class _Program:
    """Flat parameter layout plus batched evaluation for one program family.

    Parameters are concatenated simplex rows (full coordinates).  Subclasses
    fill ``blocks`` as (rows, width) pairs and implement ``_measure``.
    """

    mode: str

    def __init__(self, prob: ProblemInstance, blocks: Sequence[tuple[int, int]], key_budget, msg_budget):
        self.prob = prob
        self.p0 = prob.source
        self.pi = prob.payoff.values
        self.blocks = tuple(blocks)
        self.key_budget = key_budget
        self.msg_budget = msg_budget
        offs = []
        off = 0
        for rows, width in self.blocks:
            offs.append(off)
            off += rows * width
        self.offsets = tuple(offs)
        self.dim = off
        self._hx = float(-xlogy(self.p0, self.p0).sum() / _LN2)
        self._build_chart()

    # -- chart bookkeeping ---------------------------------------------------
    def _build_chart(self):
        pos, last = [], []
        for (rows, width), off in zip(self.blocks, self.offsets):
            if width < 2:
                continue
            for r in range(rows):
                base = off + r * width
                for j in range(width - 1):
                    pos.append(base + j)
                    last.append(base + width - 1)
        self.chart_pos = np.asarray(pos, dtype=np.int64)
        self.chart_last = np.asarray(last, dtype=np.int64)
        self.n_chart = len(pos)

    def fd_template(self, h: float) -> np.ndarray:
        t = np.zeros((2 * self.n_chart, self.dim))
        rows = np.arange(self.n_chart)
        t[2 * rows, self.chart_pos] += h
        t[2 * rows, self.chart_last] -= h
        t[2 * rows + 1, self.chart_pos] -= h
        t[2 * rows + 1, self.chart_last] += h
        return t

    def direction(self, grad: np.ndarray) -> np.ndarray:
        """Map chart-coordinate gradients (A, P) to full-coordinate ascent rows."""
        d = np.zeros((grad.shape[0], self.dim))
        d[:, self.chart_pos] = grad
        np.subtract.at(d, (np.arange(grad.shape[0])[:, None], self.chart_last[None, :]), grad)
        return d

    def project(self, theta: np.ndarray) -> np.ndarray:
        theta = np.array(theta, dtype=np.float64, copy=True)
        flat = theta.reshape(-1, self.dim)
        for (rows, width), off in zip(self.blocks, self.offsets):
            seg = flat[:, off: off + rows * width].reshape(-1, rows, width)
            flat[:, off: off + rows * width] = _project_rows(seg).reshape(flat.shape[0], rows * width)
        return flat.reshape(theta.shape)

    def views(self, theta: np.ndarray) -> list[np.ndarray]:
        mat = np.maximum(theta.reshape(-1, self.dim), 0.0)  # FD probes may dip below zero
        out = []
        for (rows, width), off in zip(self.blocks, self.offsets):
            out.append(mat[:, off: off + rows * width].reshape(-1, rows, width))
        return out

    # -- evaluation ------------------------------------------------------------
    def evaluate(self, theta: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Return (value, key_used, msg_used), each shaped (batch,)."""
        raise NotImplementedError

    def violation(self, key_used: np.ndarray, msg_used: np.ndarray) -> np.ndarray:
        v = np.zeros_like(key_used)
        if self.key_budget is not None:
            v = v + np.maximum(key_used - self.key_budget, 0.0)
        if self.msg_budget is not None:
            v = v + np.maximum(msg_used - self.msg_budget, 0.0)
        return v

    # -- starts ----------------------------------------------------------------
    def uniform_start(self) -> np.ndarray:
        theta = np.empty(self.dim)
        for (rows, width), off in zip(self.blocks, self.offsets):
            theta[off: off + rows * width] = 1.0 / width
        return theta

    def deterministic_starts(self) -> list[np.ndarray]:
        return []

    def random_start(self, stream: Stream, idx: int) -> np.ndarray:
        sub = stream.child(idx)
        theta = np.empty(self.dim)
        counter = 0
        for (rows, width), off in zip(self.blocks, self.offsets):
            u = sub.u01(np.arange(counter, counter + rows * width)).reshape(rows, width)
            counter += rows * width
            w = -np.log(np.maximum(u, 1e-300))
            if idx % 2 == 1:
                w = w ** 3  # sharpened draws explore simplex corners
            w /= w.sum(axis=1, keepdims=True)
            theta[off: off + rows * width] = w.reshape(-1)
        return theta

    def _det_rows(self, rows: int, width: int, target: Callable[[int], int]) -> np.ndarray:
        m = np.zeros((rows, width))
        for r in range(rows):
            m[r, target(r) % width] = 1.0
        return m

    # -- optional deterministic stages (overridden where they pay off) ---------
    def scan_starts(self, cfg: "SolverConfig") -> list[np.ndarray]:
        """Coarse deterministic grid scan used to seed the multistart."""
        if cfg.scan_resolution < 1:
            return []
        res = cfg.scan_resolution
        while res > 1:
            count = 1
            for rows, width in self.blocks:
                count *= len(_int_compositions(res, width)) ** rows
            if count <= 60_000:
                break
            res -= 1
        else:
            return []
        count = 1
        grids = []
        for rows, width in self.blocks:
            g = _simplex_rows(res, width)
            grids.append(g)
            count *= len(g) ** rows
        if count > 60_000:
            return []
        pieces = []
        for (rows, width), g in zip(self.blocks, grids):
            for _ in range(rows):
                pieces.append(g)
        idx = np.stack(
            np.meshgrid(*[np.arange(len(g)) for g in pieces], indexing="ij"), axis=-1
        ).reshape(-1, len(pieces))
        theta = np.concatenate([g[idx[:, k]] for k, g in enumerate(pieces)], axis=1)
        value, key_u, msg_u = self.evaluate(theta)
        score = value - 8.0 * self.violation(key_u, msg_u)
        top = np.argsort(-score)[: max(4 * 12, 48)]
        picked: list[int] = []
        for i in top:
            if all(np.abs(theta[i] - theta[j]).sum() >= 0.45 for j in picked):
                picked.append(int(i))
            if len(picked) >= 12:
                break
        return [theta[i] for i in picked]

    def refine(self, theta: np.ndarray, cfg: "SolverConfig") -> np.ndarray | None:
        """Exact block-coordinate improvement, when the program supports one."""
        return None

    def scan_starts_cached(self, cfg: "SolverConfig") -> list[np.ndarray]:
        key = cfg.scan_resolution
        memo = getattr(self, "_scan_memo", None)
        if memo is None:
            memo = {}
            self._scan_memo = memo
        if key not in memo:
            memo[key] = self.scan_starts(cfg)
        return memo[key]

    # -- result assembly ---------------------------------------------------------
    def result_joint(self, theta: np.ndarray) -> JointDist:
        raise NotImplementedError


class _LayeredProgram(_Program):
    """Shared family for full-causal and past-actions models.

    Parameters: p(u,v|x) as nx rows over cu*cv, and p(y|u,v) as cu*cv rows
    over ny.  The action channel depends on x only through (u, v), so the
    required conditional-independence structure holds by construction.
    """

    def __init__(self, prob: ProblemInstance, cu: int, cv: int, mode: str):
        self.cu, self.cv = cu, cv
        self.mode = mode
        m = cu * cv
        super().__init__(
            prob,
            blocks=[(prob.nx, m), (m, prob.ny)],
            key_budget=prob.key_rate,
            msg_budget=prob.msg_rate,
        )

    def evaluate(self, theta):
        A, C = self.views(theta)
        pxm = self.p0[None, :, None] * A                      # (B, nx, M)
        q = pxm[:, :, :, None] * C[:, None, :, :]             # (B, nx, M, ny)
        msg = self._hx + _hb(pxm.sum(axis=1), 1) - _hb(pxm, (1, 2))
        B = q.shape[0]
        qr = q.reshape(B, self.prob.nx, self.cu, self.cv, self.prob.ny)
        pxuy = qr.sum(axis=3)                                  # (B, nx, cu, ny)
        puv = qr.sum(axis=(1, 4))                              # (B, cu, cv)
        pu = puv.sum(axis=2)
        h_uv = _hb(puv, (1, 2))
        h_u = _hb(pu, 1)
        if self.mode == "thm1":
            key = _hb(pxuy, (1, 2, 3)) + h_uv - h_u - _hb(qr, (1, 2, 3, 4))
        else:
            pyu = qr.sum(axis=(1, 3))                          # (B, cu, ny)
            pyuv = qr.sum(axis=1)                              # (B, cu, cv, ny)
            key = _hb(pyu, (1, 2)) + h_uv - h_u - _hb(pyuv, (1, 2, 3))
        s = np.einsum("bxuy,xyz->buz", pxuy, self.pi)
        value = s.min(axis=2).sum(axis=1)
        return value, key, msg

    def deterministic_starts(self):
        nx, ny, cu, cv = self.prob.nx, self.prob.ny, self.cu, self.cv
        starts = []
        # key-protected identity: U constant, V carries X, actions copy V
        a = np.zeros((nx, cu * cv))
        for x in range(nx):
            a[x, (0 * cv) + (x % cv)] = 1.0
        c = self._det_rows(cu * cv, ny, lambda r: r % cv)
        starts.append(np.concatenate([a.reshape(-1), c.reshape(-1)]))
        # public identity: U carries X, V constant, actions copy U
        a2 = np.zeros((nx, cu * cv))
        for x in range(nx):
            a2[x, (x % cu) * cv] = 1.0
        c2 = self._det_rows(cu * cv, ny, lambda r: r // cv)
        starts.append(np.concatenate([a2.reshape(-1), c2.reshape(-1)]))
        return starts

    # -- exact action-layer machinery -----------------------------------------
    def _layer_tables(self, au: np.ndarray, fine: int) -> tuple[np.ndarray, np.ndarray]:
        """Payoff and key usage of one block over the 1/fine action grid.

        ``au`` holds block mass slices p0(x) p(u,v|x) at one u, shape
        (B, nx, cv); returns (f, g) of shape (B, T).
        """
        _, _, rv, hrt = _tgrid(fine, self.cv, self.prob.ny)
        pxy = np.tensordot(au, rv, axes=(2, 1)).transpose(0, 2, 1, 3)   # (B, T, nx, ny)
        f = np.tensordot(pxy, self.pi, axes=([2, 3], [0, 1])).min(axis=2)
        puv = au.sum(axis=1)
        pu = puv.sum(axis=1)
        h_u = -xlogy(pu, pu) / _LN2
        t_mix = puv @ hrt.T
        if self.mode == "thm1":
            h_uv = _hb(puv, 1)
            g = _hb(pxy, (2, 3)) + (h_uv - h_u)[:, None] - _hb(au, (1, 2))[:, None] - t_mix
        else:
            g = _hb(pxy.sum(axis=2), 2) - h_u[:, None] - t_mix
        return f, g

    def exact_actions(self, a_mats: np.ndarray, fine: int) -> tuple[np.ndarray, np.ndarray]:
        """Best action rows for given descriptions, exactly on the 1/fine grid.

        ``a_mats`` is (B, nx, M) description rows.  Returns (values, c_mats)
        with c_mats (B, M, ny); values are -inf when no action grid point
        meets the key budget.
        """
        nx, ny, cu, cv = self.prob.nx, self.prob.ny, self.cu, self.cv
        rows, tidx, rv, _ = _tgrid(fine, cv, ny)
        budget = self.key_budget + 1e-9
        B = a_mats.shape[0]
        axv = (self.p0[None, :, None] * a_mats).reshape(B, nx, cu, cv)
        f = np.empty((B, cu, len(tidx)))
        g = np.empty((B, cu, len(tidx)))
        for u in range(cu):
            f[:, u], g[:, u] = self._layer_tables(axv[:, :, u, :], fine)
        if cu == 1:
            ok = g[:, 0, :] <= budget
            masked = np.where(ok, f[:, 0, :], -np.inf)
            t0 = masked.argmax(axis=1)
            vals = masked[np.arange(B), t0]
            choice = t0[:, None]
        elif cu == 2:
            t_block = len(tidx)
            ordg = np.argsort(g[:, 1, :], axis=1)
            g1 = np.take_along_axis(g[:, 1, :], ordg, axis=1)
            f1 = np.take_along_axis(f[:, 1, :], ordg, axis=1)
            f1max = np.maximum.accumulate(f1, axis=1)
            new_max = f1 >= f1max
            arg1 = np.maximum.accumulate(np.where(new_max, np.arange(t_block), -1), axis=1)
            big = float(1 << 20)
            offs = (np.arange(B, dtype=np.float64) * big)[:, None]
            flat = (g1 + offs).ravel()
            q = (np.clip(budget - g[:, 0, :], -1.0, big - 1.0) + offs).ravel()
            cnt = np.searchsorted(flat, q, side="right") - np.repeat(
                np.arange(B, dtype=np.int64) * t_block, t_block
            )
            cnt = cnt.reshape(B, t_block)
            hit = cnt > 0
            f1best = np.where(hit, f1max[np.arange(B)[:, None], np.maximum(cnt - 1, 0)], -np.inf)
            total = f[:, 0, :] + f1best
            t0 = total.argmax(axis=1)
            vals = total[np.arange(B), t0]
            pos1 = arg1[np.arange(B), np.maximum(cnt[np.arange(B), t0] - 1, 0)]
            t1 = np.take_along_axis(ordg, pos1[:, None], axis=1)[:, 0]
            choice = np.stack([t0, t1], axis=1)
        else:
            vals = np.empty(B)
            choice = np.empty((B, cu), dtype=np.int64)
            for b in range(B):
                vals[b], choice[b] = _merge_blocks_seq(f[b], g[b], budget)
        c_mats = np.zeros((B, cu * cv, ny))
        for u in range(cu):
            c_mats[:, u * cv: (u + 1) * cv, :] = rv[choice[:, u]]
        return vals, c_mats

    def scan_starts(self, cfg):
        if cfg.scan_resolution < 1 or self.cu > 2:
            return []
        nx, M = self.prob.nx, self.cu * self.cv
        res = cfg.scan_resolution
        while res > 1 and len(_int_compositions(res, M)) ** nx > 20_000:
            res -= 1
        rows = _simplex_rows(res, M)
        if len(rows) ** nx > 20_000:
            return []
        idx = np.stack(
            np.meshgrid(*([np.arange(len(rows))] * nx), indexing="ij"), axis=-1
        ).reshape(-1, nx)
        a_mats = rows[idx]                                       # (K, nx, M)
        pxm = self.p0[None, :, None] * a_mats
        msg = self._hx + _hb(pxm.sum(axis=1), 1) - _hb(pxm, (1, 2))
        feas = msg <= self.msg_budget + 1e-9
        if not feas.any():
            return []
        a_mats = a_mats[feas]
        fine = 16 if self.prob.ny == 2 and self.cv <= 2 else 8
        vals, c_mats = self.exact_actions(a_mats, fine)
        order = np.argsort(-vals)
        picked: list[int] = []
        for i in order:
            if not np.isfinite(vals[i]):
                break
            if all(np.abs(a_mats[i] - a_mats[j]).sum() >= 0.45 for j in picked):
                picked.append(int(i))
            if len(picked) >= 12:
                break
        return [
            np.concatenate([a_mats[i].reshape(-1), c_mats[i].reshape(-1)]) for i in picked
        ]

    def _refine_fine(self, cfg) -> int | None:
        fine = cfg.refine_resolution
        while fine >= 3:
            if len(_int_compositions(fine, self.prob.ny)) ** self.cv <= 20_000:
                return fine
            fine //= 2
        return None

    def refine(self, theta, cfg):
        if cfg.refine_resolution < 2:
            return None
        fine = self._refine_fine(cfg)
        if fine is None:
            return None
        A, _ = self.views(theta)
        A = self.project(theta[None, :])[:, : self.prob.nx * self.cu * self.cv].reshape(
            1, self.prob.nx, self.cu * self.cv
        )
        vals, c_mats = self.exact_actions(A, fine)
        if not np.isfinite(vals[0]):
            return None
        theta2 = np.concatenate([A[0].reshape(-1), c_mats[0].reshape(-1)])
        return self._descr_polish(theta2, cfg, fine)

    def _descr_polish(self, theta: np.ndarray, cfg, fine: int) -> np.ndarray:
        """Pattern search over descriptions with the action layer kept exact.

        Coordinate probes on p(u,v|x) under the message budget, each scored by
        the exact-on-grid inner optimum; deterministic, shrinking steps.
        """
        nx, M, ny = self.prob.nx, self.cu * self.cv, self.prob.ny
        n_a = nx * M
        a = theta[:n_a].reshape(nx, M).copy()
        probe_fine = fine if len(_int_compositions(fine, ny)) ** self.cv <= 3000 else max(fine // 2, 3)

        def score(mats: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
            pxm = self.p0[None, :, None] * mats
            msg = self._hx + _hb(pxm.sum(axis=1), 1) - _hb(pxm, (1, 2))
            vals, cm = self.exact_actions(mats, probe_fine)
            vals = np.where(msg <= self.msg_budget + 1e-9, vals, -np.inf)
            return vals, cm

        val, _ = score(a[None])
        val = float(val[0])
        # all pairwise mass transfers within a row; chart-only moves stall on
        # ridges that run between two non-final cells
        moves = [(r, j, k) for r in range(nx) for j in range(M) for k in range(M) if j != k]
        alpha = 0.25
        iters = 0
        while alpha > 1e-6 and iters < 240:
            iters += 1
            probes = np.repeat(a[None, :, :], len(moves), axis=0)
            for i, (r, j, k) in enumerate(moves):
                probes[i, r, j] += alpha
                probes[i, r, k] -= alpha
            probes = _project_rows(probes)
            vals, _ = score(probes)
            b = int(np.argmax(vals))
            if vals[b] > val + 1e-12:
                a = probes[b]
                val = float(vals[b])
            else:
                alpha *= 0.5
        vals, c_mats = self.exact_actions(a[None], fine)
        if not np.isfinite(vals[0]):
            return theta
        return np.concatenate([a.reshape(-1), c_mats[0].reshape(-1)])

    def result_joint(self, theta):
        A, C = self.views(theta)
        A, C = A[0], C[0]
        nx, ny, cu, cv = self.prob.nx, self.prob.ny, self.cu, self.cv
        mass = np.einsum("x,xm,my->xmy", self.p0, A, C).reshape(nx, cu, cv, ny)
        return JointDist((Axis("X", nx), Axis("U", cu), Axis("V", cv), Axis("Y", ny)), mass)


class _PastSourceProgram(_Program):
    """Past-source adversary: design p(u, y | x) directly (no V layer)."""

    mode = "thm3"

    def __init__(self, prob: ProblemInstance, cu: int, constraint: str):
        self.cu = cu
        self.constraint = constraint
        super().__init__(prob, blocks=[(prob.nx, cu * prob.ny)], key_budget=prob.key_rate, msg_budget=prob.msg_rate)

    def evaluate(self, theta):
        (D,) = self.views(theta)
        B = D.shape[0]
        q = (self.p0[None, :, None] * D).reshape(B, self.prob.nx, self.cu, self.prob.ny)
        puy = q.sum(axis=1)
        pu = puy.sum(axis=2)
        pxu = q.sum(axis=3)
        h_q = _hb(q, (1, 2, 3))
        msg = self._hx + _hb(puy, (1, 2)) - h_q
        if self.constraint == "IXYgU":
            key = _hb(pxu, (1, 2)) + _hb(puy, (1, 2)) - _hb(pu, 1) - h_q
        else:  # I(X,Y;U): pair (X,Y) against U
            pxy = q.sum(axis=2)
            key = _hb(pxy, (1, 2)) + _hb(pu, 1) - h_q
        s = np.einsum("bxuy,xyz->buz", q, self.pi)
        value = s.min(axis=2).sum(axis=1)
        return value, key, msg

    def deterministic_starts(self):
        nx, ny, cu = self.prob.nx, self.prob.ny, self.cu
        d = np.zeros((nx, cu * ny))
        for x in range(nx):
            d[x, (x % cu) * ny + (x % ny)] = 1.0
        return [d.reshape(-1)]

    def result_joint(self, theta):
        (D,) = self.views(theta)
        q = (self.p0[:, None] * D[0]).reshape(self.prob.nx, self.cu, self.prob.ny)
        return JointDist((Axis("X", self.prob.nx), Axis("U", self.cu), Axis("Y", self.prob.ny)), q)


class _BlindProgram(_Program):
    """Message-only adversary (and the private-channel baseline): design p(y|x)."""

    mode = "thm4"

    def __init__(self, prob: ProblemInstance, msg_budget: float):
        super().__init__(prob, blocks=[(prob.nx, prob.ny)], key_budget=None, msg_budget=msg_budget)

    def evaluate(self, theta):
        (E,) = self.views(theta)
        q = self.p0[None, :, None] * E
        msg = self._hx + _hb(q.sum(axis=1), 1) - _hb(q, (1, 2))
        value = np.einsum("bxy,xyz->bz", q, self.pi).min(axis=1)
        return value, np.zeros_like(value), msg

    def deterministic_starts(self):
        return [self._det_rows(self.prob.nx, self.prob.ny, lambda r: r).reshape(-1)]

    def result_joint(self, theta):
        (E,) = self.views(theta)
        q = self.p0[:, None] * E[0]
        return JointDist((Axis("X", self.prob.nx), Axis("Y", self.prob.ny), Axis("U", 1)), q[:, :, None])


class _LosslessProgram(_Program):
    """Lossless reproduction: actions equal the source; design p(u|x) only."""

    mode = "lossless"

    def __init__(self, prob: ProblemInstance, cu: int):
        if prob.ny != prob.nx:
            raise InfeasibleProblemError("lossless mode needs matching X and Y alphabets")
        self.cu = cu
        self.pi_diag = prob.payoff.values[np.arange(prob.nx), np.arange(prob.nx), :]
        super().__init__(prob, blocks=[(prob.nx, cu)], key_budget=prob.key_rate, msg_budget=None)

    def evaluate(self, theta):
        (F,) = self.views(theta)
        q = self.p0[None, :, None] * F
        key = _hb(q, (1, 2)) - _hb(q.sum(axis=1), 1)  # H(X|U)
        msg = np.full(q.shape[0], self._hx)
        value = np.einsum("bxu,xz->buz", q, self.pi_diag).min(axis=2).sum(axis=1)
        return value, key, msg

    def deterministic_starts(self):
        return [self._det_rows(self.prob.nx, self.cu, lambda r: r).reshape(-1)]

    def result_joint(self, theta):
        (F,) = self.views(theta)
        q = self.p0[:, None] * F[0]
        nx, cu = self.prob.nx, self.cu
        mass = np.zeros((nx, nx, cu))
        mass[np.arange(nx), np.arange(nx), :] = q
        return JointDist((Axis("X", nx), Axis("Y", nx), Axis("U", cu)), mass)


# ---------------------------------------------------------------------------
# multi-start exact-penalty ascent (lock-step across restarts)
# ---------------------------------------------------------------------------


def _multistart(program: _Program, starts: np.ndarray, cfg: SolverConfig):
    R, D = starts.shape
    theta = program.project(starts)
    template = program.fd_template(cfg.fd_step)
    P = program.n_chart

    def full_eval(mat):
        value, key_u, msg_u = program.evaluate(mat)
        return value, program.violation(key_u, msg_u)

    v_cur, viol_cur = full_eval(theta)
    best_val = np.full(R, -np.inf)
    best_theta = theta.copy()
    any_feas = viol_cur <= cfg.feas_tol
    best_val[any_feas] = v_cur[any_feas]
    best_theta[any_feas] = theta[any_feas]
    converged = np.zeros(R, dtype=bool)
    frozen = np.zeros(R, dtype=bool)

    for round_idx in range(cfg.penalty_rounds):
        mu = cfg.penalty_init * cfg.penalty_growth ** round_idx
        if frozen.all():
            break
        f_cur = v_cur - mu * viol_cur
        alpha = np.full(R, cfg.step_init)
        stall = np.zeros(R, dtype=np.int64)
        active = ~frozen
        converged[active] = False
        for _ in range(cfg.max_iters):
            idx = np.nonzero(active)[0]
            if idx.size == 0:
                break
            if P > 0:
                batch = (theta[idx][:, None, :] + template[None, :, :]).reshape(-1, D)
                bval, bviol = full_eval(batch)
                pen = (bval - mu * bviol).reshape(idx.size, 2 * P)
                grad = (pen[:, 0::2] - pen[:, 1::2]) / (2.0 * cfg.fd_step)
                direc = program.direction(grad)
                norms = np.linalg.norm(direc, axis=1, keepdims=True)
                direc = np.where(norms > 1e-14, direc / np.where(norms > 0, norms, 1.0), 0.0)
            else:  # nothing to optimize (all alphabet widths 1)
                direc = np.zeros((idx.size, D))
            cand = program.project(theta[idx] + alpha[idx, None] * direc)
            cval, cviol = full_eval(cand)
            cpen = cval - mu * cviol
            rej = cpen <= f_cur[idx]
            if rej.any() and P > 0:
                # gradient steps stall at min-z kinks and on the constraint
                # boundary; probe single chart coordinates at the step scale
                ridx = idx[rej]
                probes = (
                    theta[ridx][:, None, :]
                    + (template / cfg.fd_step) * alpha[ridx, None, None]
                )
                probes = program.project(probes.reshape(-1, D))
                pval, pviol = full_eval(probes)
                ppen = (pval - mu * pviol).reshape(len(ridx), 2 * P)
                pbest = ppen.argmax(axis=1)
                take = ppen[np.arange(len(ridx)), pbest] > cpen[rej]
                sel = probes.reshape(len(ridx), 2 * P, D)[np.arange(len(ridx)), pbest]
                cand[rej] = np.where(take[:, None], sel, cand[rej])
                cval_r = pval.reshape(len(ridx), 2 * P)[np.arange(len(ridx)), pbest]
                cviol_r = pviol.reshape(len(ridx), 2 * P)[np.arange(len(ridx)), pbest]
                cval[rej] = np.where(take, cval_r, cval[rej])
                cviol[rej] = np.where(take, cviol_r, cviol[rej])
                cpen[rej] = np.where(take, ppen[np.arange(len(ridx)), pbest], cpen[rej])
            improve = cpen - f_cur[idx]
            accept = improve > 0

            rows = idx[accept]
            theta[rows] = cand[accept]
            v_cur[rows] = cval[accept]
            viol_cur[rows] = cviol[accept]
            f_cur[rows] = cpen[accept]

            feas = cviol <= cfg.feas_tol
            better = feas & (cval > best_val[idx])
            rows_b = idx[better]
            best_val[rows_b] = cval[better]
            best_theta[rows_b] = cand[better]
            any_feas[rows_b] = True

            stall[idx] = np.where(improve > cfg.improve_tol, 0, stall[idx] + 1)
            alpha[idx] = np.where(accept, alpha[idx], alpha[idx] * 0.5)
            done = (stall[idx] >= cfg.patience) | (alpha[idx] < 1e-12)
            if done.any():
                converged[idx[done]] = True
                active[idx[done]] = False
        # feasible stationary points stay optimal under any larger penalty
        frozen |= viol_cur <= 1e-9
    return best_theta, best_val, any_feas, converged


def _assemble_starts(program: _Program, cfg: SolverConfig, warm: Sequence[np.ndarray]) -> np.ndarray:
    starts: list[np.ndarray] = [program.uniform_start()]
    starts.extend(np.asarray(w, dtype=np.float64) for w in warm)
    starts.extend(program.deterministic_starts())
    starts.extend(program.scan_starts_cached(cfg))
    stream = Stream(cfg.seed, RESTART)
    idx = 0
    while len(starts) < cfg.restarts:
        starts.append(program.random_start(stream, idx))
        idx += 1
    return np.stack(starts, axis=0)


def _finish(program: _Program, cfg: SolverConfig, theta: np.ndarray, restarts_run: int, status: str) -> SolveResult:
    value_arr, key_arr, msg_arr = program.evaluate(theta[None, :])
    joint = program.result_joint(theta)
    zmap, _ = inner_best_response(joint, program.prob.payoff)
    return SolveResult(
        value=float(value_arr[0]),
        joint=joint,
        zmap=zmap,
        key_rate_used=float(key_arr[0]),
        msg_rate_used=float(msg_arr[0]),
        restarts_run=restarts_run,
        status=status,
        mode=program.mode,
        cards=_cards_of(program),
        theta=theta,
    )


def _solve(program: _Program, cfg: SolverConfig, warm: Sequence[np.ndarray]) -> SolveResult:
    starts = _assemble_starts(program, cfg, warm)
    best_theta, best_val, any_feas, converged = _multistart(program, starts, cfg)
    restarts_run = starts.shape[0]
    if not any_feas.any():
        theta = program.project(program.uniform_start()[None, :])[0]
        joint = program.result_joint(theta)
        zmap, value = inner_best_response(joint, program.prob.payoff)
        return SolveResult(
            value=float("nan"), joint=joint, zmap=zmap, key_rate_used=float("nan"),
            msg_rate_used=float("nan"), restarts_run=restarts_run,
            status="infeasible-cardinality", mode=program.mode, cards=_cards_of(program), theta=theta,
        )

    # exact action-layer refinement plus description polish on the strongest
    # distinct candidates
    order = np.argsort(-np.where(any_feas, best_val, -np.inf))
    chosen: list[int] = []
    for r in order:
        if not any_feas[r]:
            break
        if all(np.abs(best_theta[r] - best_theta[c]).sum() >= 1e-3 for c in chosen):
            chosen.append(int(r))
        if len(chosen) >= max(cfg.refine_top, 1):
            break
    pool_theta = [best_theta[r] for r in chosen]
    pool_val = [best_val[r] for r in chosen]
    refine_seeds = [best_theta[r] for r in chosen]
    # the ascent can drift away from good scan basins; refine those directly too
    refine_seeds.extend(program.scan_starts_cached(cfg)[: max(cfg.refine_top // 2, 1)])
    for seed_theta in refine_seeds:
        t2 = program.refine(seed_theta, cfg)
        if t2 is None:
            continue
        v2, k2, m2 = program.evaluate(t2[None, :])
        if program.violation(k2, m2)[0] <= cfg.feas_tol:
            pool_theta.append(t2)
            pool_val.append(float(v2[0]))
    best_idx = int(np.argmax(pool_val))
    if best_idx < len(chosen):
        status = "converged" if converged[chosen[best_idx]] else "max-iters"
    else:
        status = "converged"  # refined points are exact block optima
    return _finish(program, cfg, pool_theta[best_idx], restarts_run, status)


def _cards_of(program: _Program) -> tuple[int, ...]:
    if isinstance(program, _LayeredProgram):
        return (program.cu, program.cv)
    if isinstance(program, (_PastSourceProgram, _LosslessProgram)):
        return (program.cu,)
    return ()


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------


def inner_best_response(joint_xyu: JointDist, pi: PayoffTensor) -> tuple[np.ndarray, float]:
    """Exact best attack as a map u -> z, plus the resulting expected payoff.

    For each u of positive probability the attack minimizes the conditional
    expected payoff; ties and zero-probability u's resolve to the smallest z.
    """
    pxyu = marginalize(joint_xyu, ("X", "Y", "U")).mass
    s = np.einsum("xyu,xyz->uz", pxyu, pi.values)
    zmap = np.argmin(s, axis=1)
    value = float(s[np.arange(s.shape[0]), zmap].sum())
    return zmap.astype(np.int64), value


def solve_full_causal(
    prob: ProblemInstance,
    card_u: int | None = None,
    card_v: int | None = None,
    cfg: SolverConfig | None = None,
    warm: Sequence[np.ndarray] = (),
) -> SolveResult:
    """Max-min value against the fully informed causal adversary."""
    cfg = cfg or SolverConfig()
    cu = card_u or default_card(prob)
    cv = card_v or default_card(prob)
    return _solve(_LayeredProgram(prob, cu, cv, "thm1"), cfg, warm)


def solve_past_actions(
    prob: ProblemInstance,
    card_u: int | None = None,
    card_v: int | None = None,
    cfg: SolverConfig | None = None,
    warm: Sequence[np.ndarray] = (),
) -> SolveResult:
    """Adversary sees the message and past actions, but not past source symbols."""
    cfg = cfg or SolverConfig()
    cu = card_u or default_card(prob)
    cv = card_v or default_card(prob)
    return _solve(_LayeredProgram(prob, cu, cv, "thm2"), cfg, warm)


def solve_past_source(
    prob: ProblemInstance,
    card_u: int | None = None,
    cfg: SolverConfig | None = None,
    warm: Sequence[np.ndarray] = (),
) -> SolveResult:
    """Adversary sees the message and past source symbols, but not past actions."""
    cfg = cfg or SolverConfig()
    cu = card_u or default_card(prob)
    return _solve(_PastSourceProgram(prob, cu, cfg.thm3_constraint), cfg, warm)


def solve_message_only(
    prob: ProblemInstance,
    cfg: SolverConfig | None = None,
    warm: Sequence[np.ndarray] = (),
) -> SolveResult:
    """Blind adversary: sees the message only.  Requires a strictly positive key rate.

    The guaranteed value jumps at exactly zero key rate (at zero key the
    stronger-information programs apply instead), so zero is rejected here.
    """
    cfg = cfg or SolverConfig()
    if prob.key_rate <= 0.0:
        raise InfeasibleProblemError(
            "message-only model needs key_rate > 0: the optimal value is "
            "discontinuous at zero key rate; solve a causal-information mode at R0 = 0 instead"
        )
    return _solve(_BlindProgram(prob, prob.msg_rate), cfg, warm)


def solve_lossless(
    prob: ProblemInstance,
    card_u: int | None = None,
    cfg: SolverConfig | None = None,
    warm: Sequence[np.ndarray] = (),
) -> SolveResult:
    """Lossless case: actions must equal the source; optimize the public label U."""
    cfg = cfg or SolverConfig()
    cu = card_u or default_card(prob)
    hx = ProblemInstance.source_entropy(prob)
    if prob.msg_rate < hx - 1e-9:
        raise InfeasibleProblemError(
            f"lossless reproduction needs msg_rate >= H(X) = {hx:.6g} bits; got {prob.msg_rate:.6g}"
        )
    return _solve(_LosslessProgram(prob, cu), cfg, warm)


def solve_mode(
    mode: str,
    prob: ProblemInstance,
    cards: Sequence[int] = (),
    cfg: SolverConfig | None = None,
    warm: Sequence[np.ndarray] = (),
) -> SolveResult:
    """Dispatch by CLI mode code."""
    cards = tuple(cards)
    if mode == "thm1":
        return solve_full_causal(prob, *(cards[:2] or (None, None)), cfg=cfg, warm=warm)
    if mode == "thm2":
        return solve_past_actions(prob, *(cards[:2] or (None, None)), cfg=cfg, warm=warm)
    if mode == "thm3":
        return solve_past_source(prob, *(cards[:1] or (None,)), cfg=cfg, warm=warm)
    if mode == "thm4":
        return solve_message_only(prob, cfg=cfg, warm=warm)
    if mode == "lossless":
        return solve_lossless(prob, *(cards[:1] or (None,)), cfg=cfg, warm=warm)
    raise ValueError(f"unknown mode {mode!r}")


def baseline_private_channel(prob: ProblemInstance, rate: float, cfg: SolverConfig | None = None) -> float:
    """Best value when the description is entirely hidden at the given rate.

    Same program as the message-only model with the message budget set to
    ``rate``; serves as the comparison point for combined public-plus-key
    resources.
    """
    if rate < 0:
        raise ValueError("rate must be nonnegative")
    cfg = cfg or SolverConfig()
    res = _solve(_BlindProgram(prob, rate), cfg, ())
    return res.value


def convert_warm(result: SolveResult, target_mode: str, cards: Sequence[int]) -> np.ndarray | None:
    """Re-express a solution as a start for another program, when rates allow.

    Conversions follow the feasibility-preserving direction (stronger-adversary
    solutions seed weaker-adversary programs); returns None when shapes do not
    line up.
    """
    cards = tuple(cards)
    joint = result.joint
    if target_mode in ("thm1", "thm2"):
        cu, cv = cards
        if result.mode in ("thm1", "thm2") and result.cards == (cu, cv):
            return result.theta
        if result.mode == "thm4" and cu >= 1 and cv >= joint.size("Y"):
            # place the channel on a constant-U, V-copies-Y layout
            nx, ny = joint.size("X"), joint.size("Y")
            from .probcore import condition

            e = condition(joint, ("Y",), ("X",))
            a = np.zeros((nx, cu * cv))
            a[:, :ny] = e
            c = np.zeros((cu * cv, ny))
            for r in range(cu * cv):
                c[r, (r % cv) % ny] = 1.0
            return np.concatenate([a.reshape(-1), c.reshape(-1)])
        return None
    if target_mode == "thm3":
        (cu,) = cards
        if result.mode == "thm3" and result.cards == (cu,):
            return result.theta
        if result.mode in ("thm1", "thm2") and result.cards[0] == cu:
            from .probcore import condition

            d = condition(result.joint, ("U", "Y"), ("X",))  # (x, u, y)
            return d.reshape(-1)
        return None
    if target_mode == "thm4":
        from .probcore import condition

        e = condition(result.joint, ("Y",), ("X",))
        return e.reshape(-1)
    if target_mode == "lossless":
        (cu,) = cards
        if result.mode == "lossless" and result.cards == (cu,):
            return result.theta
        return None
    return None


@dataclass(frozen=True)
class SweepPoint:
    key_rate: float
    msg_rate: float
    value: float
    status: str
    restarts: int


def sweep(
    prob: ProblemInstance,
    key_rates: Sequence[float],
    msg_rates: Sequence[float],
    mode: str,
    cards: Sequence[int] = (),
    cfg: SolverConfig | None = None,
) -> list[SweepPoint]:
    """Solve the selected program over a rate grid, chaining solutions upward.

    Each grid point is warm-started from its lower-rate neighbors, whose
    solutions remain feasible when budgets grow; reported values are therefore
    non-decreasing along both axes up to evaluation roundoff.  Rows come back
    in row-major order of the given grids (key rate outer, message rate
    inner).
    """
    cfg = cfg or SolverConfig()
    k_sorted = sorted(range(len(key_rates)), key=lambda i: key_rates[i])
    m_sorted = sorted(range(len(msg_rates)), key=lambda j: msg_rates[j])
    results: dict[tuple[int, int], SolveResult | None] = {}
    for a, i in enumerate(k_sorted):
        for b, j in enumerate(m_sorted):
            p = prob.with_rates(key_rate=key_rates[i], msg_rate=msg_rates[j])
            warm = []
            for prev in ((a - 1, b), (a, b - 1)):
                if prev[0] >= 0 and prev[1] >= 0:
                    prior = results.get((k_sorted[prev[0]], m_sorted[prev[1]]))
                    if prior is not None:
                        w = convert_warm(prior, mode, prior.cards)
                        if w is not None:
                            warm.append(w)
            try:
                res = solve_mode(mode, p, cards=cards, cfg=cfg, warm=warm)
            except InfeasibleProblemError:
                res = None
            results[(i, j)] = res
    out = []
    for i in range(len(key_rates)):
        for j in range(len(msg_rates)):
            res = results[(i, j)]
            if res is None:
                out.append(SweepPoint(key_rates[i], msg_rates[j], float("nan"), "infeasible", 0))
            else:
                out.append(SweepPoint(key_rates[i], msg_rates[j], res.value, res.status, res.restarts_run))
    return out


# ---------------------------------------------------------------------------
# instances
# ---------------------------------------------------------------------------


def matching_pennies(key_rate: float = 1.0, msg_rate: float = 1.0) -> ProblemInstance:
    """Uniform binary source; payoff 1{y = x} + 1{z != x}.

    The system earns one unit for matching the source and one for the
    adversary missing it, so full encryption is worth 1.5 and zero resources
    are worth 1.0.
    """
    pi = np.zeros((2, 2, 2))
    for x in range(2):
        for y in range(2):
            for z in range(2):
                pi[x, y, z] = float(y == x) + float(z != x)
    return ProblemInstance(np.array([0.5, 0.5]), PayoffTensor(pi), key_rate, msg_rate)


def random_instance(
    seed: int,
    sizes: tuple[int, int, int] = (2, 2, 2),
    key_rate: float | None = None,
    msg_rate: float | None = None,
    rate_low: float = 0.05,
    rate_high: float = 1.15,
) -> ProblemInstance:
    """Seeded random instance: interior source pmf, U(0,1) payoffs, U rates."""
    nx, ny, nz = sizes
    s = Stream(seed, INSTANCE)
    gam = -np.log(np.maximum(s.uniforms(2 * nx), 1e-300))
    p0 = gam[:nx] + gam[nx:]
    p0 = p0 / p0.sum()
    pi = s.child(1).uniforms(nx * ny * nz).reshape(nx, ny, nz)
    r = s.child(2).uniforms(2)
    kr = key_rate if key_rate is not None else rate_low + (rate_high - rate_low) * float(r[0])
    mr = msg_rate if msg_rate is not None else rate_low + (rate_high - rate_low) * float(r[1])
    return ProblemInstance(p0, PayoffTensor(pi), kr, mr)
