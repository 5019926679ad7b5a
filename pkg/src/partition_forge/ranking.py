"""Candidate scoring and Top-K selection.

Three measurements per candidate, each scaled to [0, 1]:

  x_edit        how far the partitioned source drifted from the
                original, as character edit distance over normalized
                text (comments stripped, whitespace runs collapsed)
                divided by the longer length;
  y_priv_ratio  share of the rewritten function's statements that
                ended up in the privileged part: fewer privileged
                statements means less code running with authority;
  y_density     share of the privileged part's statements that are
                actually privilege-requiring, so padding the
                privileged side with harmless code costs score.

The score is a convex combination: alpha * (1 - x_edit) +
beta * (1 - y_priv_ratio) + gamma * y_density, weights on the unit
simplex. Defaults come from fitting against human preference
judgments. fit_weights recovers such weights from scored examples by
least squares restricted to the simplex, solved exactly by support
enumeration (three variables, seven supports).
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from ._kernels import levenshtein
from .frontend import analyze, parse
from .graphs.pdg import build_pdgs
from .taint import AnnotationSet, identify

_EPS = 1e-9


@dataclass(frozen=True)
class ScoreWeights:
    alpha: float
    beta: float
    gamma: float

    def __post_init__(self):
        for name, v in (("alpha", self.alpha), ("beta", self.beta),
                        ("gamma", self.gamma)):
            if v < -_EPS:
                raise ValueError(f"{name} must be nonnegative, got {v}")
        total = self.alpha + self.beta + self.gamma
        if abs(total - 1.0) > _EPS:
            raise ValueError(f"weights must sum to 1, got {total}")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.alpha, self.beta, self.gamma)


DEFAULT_WEIGHTS = ScoreWeights(0.594, 0.192, 0.214)


@dataclass(frozen=True)
class ScoreRecord:
    candidate: int
    x_edit: float
    y_priv_ratio: float
    y_density: float

    def __post_init__(self):
        for name, v in (("x_edit", self.x_edit),
                        ("y_priv_ratio", self.y_priv_ratio),
                        ("y_density", self.y_density)):
            if not (-_EPS <= v <= 1.0 + _EPS):
                raise ValueError(f"{name} must be in [0, 1], got {v}")

    def features(self) -> tuple[float, float, float]:
        return (1.0 - self.x_edit, 1.0 - self.y_priv_ratio, self.y_density)


def score(rec: ScoreRecord, weights: ScoreWeights = DEFAULT_WEIGHTS) -> float:
    f = rec.features()
    w = weights.as_tuple()
    return w[0] * f[0] + w[1] * f[1] + w[2] * f[2]


def rank_top_k(records: list[ScoreRecord], k: int,
               weights: ScoreWeights = DEFAULT_WEIGHTS) -> list[ScoreRecord]:
    """Best k records, highest score first. Ties prefer the candidate
    closer to the original, then the smaller privileged share, then
    the earlier candidate."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    ordered = sorted(records, key=lambda r: (-score(r, weights), r.x_edit,
                                             r.y_priv_ratio, r.candidate))
    return ordered[:k]


_LINE_COMMENT = re.compile(r"//[^\n]*")
_BLOCK_COMMENT = re.compile(r"/\*.*?\*/", re.DOTALL)
_WS_RUN = re.compile(r"\s+")


def normalize_source(text: str) -> str:
    text = _BLOCK_COMMENT.sub(" ", text)
    text = _LINE_COMMENT.sub(" ", text)
    return _WS_RUN.sub(" ", text).strip()


def edit_distance(a: str, b: str) -> int:
    na = normalize_source(a).encode("utf-8")
    nb = normalize_source(b).encode("utf-8")
    return levenshtein(na, nb)


def edit_ratio(a: str, b: str) -> float:
    na = normalize_source(a).encode("utf-8")
    nb = normalize_source(b).encode("utf-8")
    longest = max(len(na), len(nb))
    if longest == 0:
        return 0.0
    return levenshtein(na, nb) / longest


def measure(source: str, original_source: str, ann: AnnotationSet,
            entry: str, candidate_id: int = 0) -> ScoreRecord:
    """Compute all three components for one compiled candidate."""
    unit = parse(source)
    pdgs = build_pdgs(unit, analyze(unit))
    report = identify(ann, pdgs)
    per_fn = pdgs.by_contract[ann.contract]

    priv_name = f"{entry}_priv"
    parts = [name for name in (entry, priv_name, f"{entry}_callback")
             if name in per_fn]
    if priv_name not in per_fn:
        raise ValueError(f"candidate has no {priv_name}")

    counts = {name: len(per_fn[name].order) for name in parts}
    total = sum(counts.values())
    priv_count = counts[priv_name]
    ratio = priv_count / total if total else 0.0

    delta_priv = len(report.delta(priv_name))
    density = delta_priv / priv_count if priv_count else 0.0

    return ScoreRecord(
        candidate=candidate_id,
        x_edit=edit_ratio(original_source, source),
        y_priv_ratio=min(1.0, ratio),
        y_density=min(1.0, density),
    )


def fit_weights(records: list[ScoreRecord],
                targets: list[float]) -> ScoreWeights:
    """Least-squares weights over the simplex for given target scores.

    Minimizes sum_i (w . features_i - t_i)^2 subject to w >= 0 and
    sum(w) = 1. With three weights the active-set structure is small
    enough to enumerate: solve the equality-constrained problem on
    every nonempty support and keep the feasible solution with the
    smallest residual.
    """
    if len(records) != len(targets):
        raise ValueError("records and targets differ in length")
    if not records:
        raise ValueError("cannot fit weights to an empty sample")
    X = np.array([r.features() for r in records], dtype=float)
    t = np.array(targets, dtype=float)

    best: tuple[float, np.ndarray] | None = None
    for mask in range(1, 8):
        support = [i for i in range(3) if mask >> i & 1]
        Xs = X[:, support]
        k = len(support)
        # KKT system for min ||Xs w - t||^2 with 1.w = 1
        kkt = np.zeros((k + 1, k + 1))
        kkt[:k, :k] = 2.0 * Xs.T @ Xs
        kkt[:k, k] = 1.0
        kkt[k, :k] = 1.0
        rhs = np.zeros(k + 1)
        rhs[:k] = 2.0 * Xs.T @ t
        rhs[k] = 1.0
        sol, *_ = np.linalg.lstsq(kkt, rhs, rcond=None)
        w_s = sol[:k]
        if np.any(w_s < -1e-9):
            continue
        w = np.zeros(3)
        w[support] = np.clip(w_s, 0.0, None)
        w = w / w.sum()
        resid = float(np.sum((X @ w - t) ** 2))
        if best is None or resid < best[0] - 1e-15:
            best = (resid, w)
    assert best is not None  # singletons are always feasible
    w = best[1]
    return ScoreWeights(float(w[0]), float(w[1]), float(w[2]))
