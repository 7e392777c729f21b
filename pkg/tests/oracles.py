"""Independent reference implementations the production code is checked against.

Everything here is deliberately written the slow, obvious way (scalar loops,
direct recursion) and must stay independent of the package internals it
verifies.
"""

from __future__ import annotations

import math

import numpy as np

from incrprobe import numcore as nc


def naive_matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    n, k = a.shape
    k2, m = b.shape
    assert k == k2
    out = np.zeros((n, m))
    for i in range(n):
        for j in range(m):
            s = 0.0
            for l in range(k):
                s += a[i, l] * b[l, j]
            out[i, j] = s
    return out


def fd_gradient(f, param: nc.Parameter, step: float = 1e-5) -> np.ndarray:
    """Central finite differences of scalar f() w.r.t. every param entry."""
    grad = np.zeros_like(param.value)
    it = np.nditer(param.value, flags=["multi_index"])
    for _ in it:
        ij = it.multi_index
        orig = param.value[ij]
        param.value[ij] = orig + step
        f_plus = f()
        param.value[ij] = orig - step
        f_minus = f()
        param.value[ij] = orig
        grad[ij] = (f_plus - f_minus) / (2.0 * step)
    return grad


def max_rel_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    denom = np.maximum(np.abs(analytic) + np.abs(numeric), 1e-3)
    return float((np.abs(analytic - numeric) / denom).max())


def scalar_sigmoid(z: float) -> float:
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


def lstm_step_scalar(x, h, c, wx, wh, b):
    """One LSTM step, scalar loops; gate layout [input|forget|output|candidate]."""
    hd = len(h)
    width = 4 * hd
    gates = [0.0] * width
    for j in range(width):
        s = b[0, j]
        for i in range(len(x)):
            s += x[i] * wx[i, j]
        for i in range(hd):
            s += h[i] * wh[i, j]
        gates[j] = s
    h_new = np.zeros(hd)
    c_new = np.zeros(hd)
    for u in range(hd):
        ig = scalar_sigmoid(gates[u])
        fg = scalar_sigmoid(gates[hd + u])
        og = scalar_sigmoid(gates[2 * hd + u])
        gg = math.tanh(gates[3 * hd + u])
        c_new[u] = fg * c[u] + ig * gg
        h_new[u] = og * math.tanh(c_new[u])
    return h_new, c_new


# ---------------------------------------------------------------------------
# SCAN oracle: compositional generation, semantics attached while generating
# ---------------------------------------------------------------------------

_PRIM = {"walk": "I_WALK", "look": "I_LOOK", "run": "I_RUN", "jump": "I_JUMP"}
_TURN = {"left": "I_TURN_LEFT", "right": "I_TURN_RIGHT"}


def _oracle_verbs():
    for u, act in _PRIM.items():
        yield (u,), (act,)
    for d, t in _TURN.items():
        yield ("turn", d), (t,)
        yield ("turn", "opposite", d), (t, t)
        yield ("turn", "around", d), (t, t, t, t)
        for u, act in _PRIM.items():
            yield (u, d), (t, act)
            yield (u, "opposite", d), (t, t, act)
            yield (u, "around", d), (t, act, t, act, t, act, t, act)


def _oracle_scopes():
    for cmd, act in _oracle_verbs():
        yield cmd, act
        yield cmd + ("twice",), act * 2
        yield cmd + ("thrice",), act * 3


def oracle_scan_corpus() -> dict[tuple, tuple]:
    """command -> actions for the whole language, built by direct composition."""
    scopes = list(_oracle_scopes())
    corpus = {}
    for cmd, act in scopes:
        corpus[cmd] = act
    for cmd1, act1 in scopes:
        for cmd2, act2 in scopes:
            corpus[cmd1 + ("and",) + cmd2] = act1 + act2
            corpus[cmd1 + ("after",) + cmd2] = act2 + act1
    return corpus


# ---------------------------------------------------------------------------
# Metric oracles
# ---------------------------------------------------------------------------


def oracle_integration(tokens, hidden, cell, embed, wx, wh, b, weighted: bool):
    """Straightforward per-example integration ratio from dumped states.

    `hidden`/`cell` are (T, H); `embed` maps token -> embedding row.
    Returns (value, excluded_count) or None when nothing is usable.
    """
    t_len = len(tokens)
    if t_len < 2:
        return None
    ratios, weights = [], []
    excluded = 0
    e_dim = wx.shape[0]
    h_dim = wh.shape[0]
    for t in range(2, t_len + 1):
        x_vec = embed[tokens[t - 1]]
        fresh, _ = lstm_step_scalar(x_vec, np.zeros(h_dim), np.zeros(h_dim), wx, wh, b)
        carried, _ = lstm_step_scalar(np.zeros(e_dim), hidden[t - 2], cell[t - 2], wx, wh, b)
        dx = math.sqrt(float(((hidden[t - 1] - fresh) ** 2).sum()))
        dh = math.sqrt(float(((hidden[t - 1] - carried) ** 2).sum()))
        if dh < 1e-12:
            excluded += 1
            continue
        ratios.append(dx / dh)
        weights.append((t_len - t) / t)
    if not ratios:
        return None
    if weighted:
        z = sum(weights)
        if z <= 0.0:
            return None
        return sum(w * r for w, r in zip(weights, ratios)) / z, excluded
    return sum(ratios) / len(ratios), excluded


def oracle_mean_pairwise(states: list[np.ndarray]) -> float:
    total, count = 0.0, 0
    for i in range(len(states)):
        for j in range(i + 1, len(states)):
            diff = states[i] - states[j]
            total += math.sqrt(float((diff * diff).sum()))
            count += 1
    return total / count


def oracle_probe_rows(records, time: int, past_time: int, token: int):
    """(features, labels) for a probe, built by direct filtering.

    `records` iterates (tokens, hidden) pairs with hidden as (T, H).
    """
    feats, labels = [], []
    for tokens, hidden in records:
        if len(tokens) >= time:
            feats.append(hidden[time - 1])
            labels.append(1.0 if tokens[past_time - 1] == token else 0.0)
    return np.array(feats), np.array(labels)


def oracle_pearson(xs, ys) -> float:
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    num = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    den = math.sqrt(sum((x - mx) ** 2 for x in xs) * sum((y - my) ** 2 for y in ys))
    return num / den
