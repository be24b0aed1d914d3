"""Soft-margin RBF SVM trained by sequential minimal optimization.

The binary solver maximizes the usual dual

    max  sum(a) - 1/2 * sum_ij a_i a_j y_i y_j K(z_i, z_j)
    s.t. 0 <= a_i <= C,  sum_i a_i y_i = 0,
    K(z, z') = exp(-gamma * ||z - z'||^2)

with Platt-style two-variable analytic updates.  Everything here is
deterministic: the first-choice index ascends, the second choice maximizes
|E1 - E2| with ties to the lowest index, and the (documented) fallback
hierarchy scans indices in ascending order.  Identical inputs therefore
produce bitwise-identical models.

Multiclass uses One-vs-Rest with per-class sigmoid calibration fitted on
out-of-fold decision values, so downstream fusion rules receive genuine
probabilities rather than raw margins.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DataError
from .evalkit import confusion_matrix, macro_f1
from .parallel import parallel_map
from .tensorstore import LabelSpace, read_tensor, write_tensor

#: C and gamma values searched in the reference configuration (7x7 grid).
DEFAULT_GRID = (0.001, 0.01, 0.1, 1.0, 10.0, 100.0, 1000.0)

DEFAULT_TOL = 1e-3
DEFAULT_MAX_PASSES = 200

_ALPHA_EPS = 1e-8  # alphas at or below this are treated as exactly zero


class CalibrationWarning(UserWarning):
    """Raised when a fitted calibrator is oriented against its decisions."""


def rbf_kernel(z1: np.ndarray, z2: np.ndarray, gamma: float) -> float:
    """exp(-gamma * ||z1 - z2||^2); gamma scales the squared distance."""
    z1 = np.asarray(z1, dtype=np.float64)
    z2 = np.asarray(z2, dtype=np.float64)
    if z1.shape != z2.shape:
        raise ValueError(f"dimension mismatch: {z1.shape} vs {z2.shape}")
    if gamma <= 0:
        raise ValueError("gamma must be > 0")
    diff = z1 - z2
    return float(np.exp(-gamma * np.dot(diff, diff)))


def rbf_gram(x: np.ndarray, gamma: float) -> np.ndarray:
    """Full kernel matrix K[i, j] = exp(-gamma * ||x_i - x_j||^2)."""
    x = np.asarray(x, dtype=np.float64)
    sq = np.sum(x * x, axis=1)
    d2 = sq[:, None] + sq[None, :] - 2.0 * (x @ x.T)
    np.maximum(d2, 0.0, out=d2)  # rounding can leave tiny negatives
    return np.exp(-gamma * d2)


def rbf_cross(x: np.ndarray, z: np.ndarray, gamma: float) -> np.ndarray:
    """Kernel block K[i, j] = k(x_i, z_j) for two point sets."""
    x = np.asarray(x, dtype=np.float64)
    z = np.asarray(z, dtype=np.float64)
    d2 = (
        np.sum(x * x, axis=1)[:, None]
        + np.sum(z * z, axis=1)[None, :]
        - 2.0 * (x @ z.T)
    )
    np.maximum(d2, 0.0, out=d2)
    return np.exp(-gamma * d2)


def dual_objective(alpha: np.ndarray, y: np.ndarray, gram: np.ndarray) -> float:
    """Value of the dual at ``alpha`` (the quantity SMO maximizes)."""
    ay = alpha * y
    return float(alpha.sum() - 0.5 * ay @ gram @ ay)


@dataclass
class SvmBinaryModel:
    """One trained soft-margin RBF SVM.

    ``dual_coeffs[i]`` is alpha_i * y_i for the i-th retained support
    vector; ``support_indices`` locates those vectors in the training set
    (diagnostic, not needed for prediction).
    """

    support_vectors: np.ndarray  # (m, d)
    dual_coeffs: np.ndarray      # (m,)
    bias: float
    gamma: float
    c: float
    support_indices: np.ndarray = field(default_factory=lambda: np.array([], dtype=np.int64))
    converged: bool = True
    passes: int = 0

    @property
    def dim(self) -> int:
        return self.support_vectors.shape[1]

    def decision(self, z: np.ndarray) -> float:
        return float(self.decision_batch(np.asarray(z, dtype=np.float64)[None, :])[0])

    def decision_batch(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=np.float64)
        if z.ndim != 2:
            raise ValueError(f"expected (n, d) queries, got {z.shape}")
        if len(self.dual_coeffs) == 0:
            return np.full(z.shape[0], self.bias)
        if z.shape[1] != self.dim:
            raise ValueError(f"dimension mismatch: model {self.dim}, query {z.shape[1]}")
        k = rbf_cross(z, self.support_vectors, self.gamma)
        return k @ self.dual_coeffs + self.bias


def svm_decision(model: SvmBinaryModel, z: np.ndarray) -> float:
    """Pre-sign decision value: sum_i dual_coeff_i K(z, sv_i) + b."""
    return model.decision(z)


class _SmoState:
    """Mutable solver state; one instance per smo_train call."""

    def __init__(self, x, y, c, gamma, tol):
        self.x = x
        self.y = y
        self.c = c
        self.tol = tol
        self.gram = rbf_gram(x, gamma)
        self.n = len(y)
        self.alpha = np.zeros(self.n)
        self.b = 0.0
        self.errors = -y.astype(np.float64)  # f - y with f identically 0

    def refresh_errors(self):
        self.errors = (self.alpha * self.y) @ self.gram + self.b - self.y

    def violates_kkt(self, i: int) -> bool:
        r = self.errors[i] * self.y[i]
        a = self.alpha[i]
        return (r < -self.tol and a < self.c) or (r > self.tol and a > 0)

    def take_step(self, i: int, j: int) -> bool:
        if i == j:
            return False
        c = self.c
        ai, aj = float(self.alpha[i]), float(self.alpha[j])
        yi, yj = float(self.y[i]), float(self.y[j])
        ei, ej = float(self.errors[i]), float(self.errors[j])
        s = yi * yj
        if yi != yj:
            lo, hi = max(0.0, aj - ai), min(c, c + aj - ai)
        else:
            lo, hi = max(0.0, ai + aj - c), min(c, ai + aj)
        if lo >= hi:
            return False
        kii = self.gram[i, i]
        kjj = self.gram[j, j]
        kij = self.gram[i, j]
        eta = kii + kjj - 2.0 * kij
        if eta > 0:
            aj_new = aj + yj * (ei - ej) / eta
            aj_new = min(max(aj_new, lo), hi)
        else:
            # flat or concave direction: the dual restricted to the pair is
            # W(a) = W(aj) + yj (ei - ej)(a - aj) - eta/2 (a - aj)^2,
            # maximized at an endpoint
            slope = yj * (ei - ej)
            obj_lo = slope * (lo - aj) - 0.5 * eta * (lo - aj) ** 2
            obj_hi = slope * (hi - aj) - 0.5 * eta * (hi - aj) ** 2
            if obj_lo > obj_hi + 1e-12:
                aj_new = lo
            elif obj_hi > obj_lo + 1e-12:
                aj_new = hi
            else:
                return False
        if abs(aj_new - aj) < 1e-12:
            return False
        if aj_new < _ALPHA_EPS:
            aj_new = 0.0
        elif aj_new > c - _ALPHA_EPS:
            aj_new = c
        ai_new = ai + s * (aj - aj_new)  # preserves the equality constraint
        ai_new = min(max(ai_new, 0.0), c)

        dai, daj = ai_new - ai, aj_new - aj
        b1 = self.b - ei - yi * dai * kii - yj * daj * kij
        b2 = self.b - ej - yi * dai * kij - yj * daj * kjj
        if 0.0 < ai_new < c:
            b_new = b1
        elif 0.0 < aj_new < c:
            b_new = b2
        else:
            b_new = 0.5 * (b1 + b2)

        self.errors += yi * dai * self.gram[i] + yj * daj * self.gram[j] + (b_new - self.b)
        self.alpha[i] = ai_new
        self.alpha[j] = aj_new
        self.b = b_new
        return True

    def examine(self, i: int) -> bool:
        if not self.violates_kkt(i):
            return False
        # second choice: largest |E_i - E_j| over the non-bound set (where
        # errors drive useful steps), ties to the lowest index
        nonbound = (self.alpha > 0) & (self.alpha < self.c)
        candidates = nonbound.copy()
        candidates[i] = False
        if np.any(candidates):
            gaps = np.where(candidates, np.abs(self.errors - self.errors[i]), -1.0)
            if self.take_step(i, int(np.argmax(gaps))):
                return True
        # fallback: non-bound partners in ascending order, then everything
        for j in np.flatnonzero(nonbound):
            if self.take_step(i, int(j)):
                return True
        for j in np.flatnonzero(~nonbound):
            if self.take_step(i, int(j)):
                return True
        return False


def smo_train(
    x: np.ndarray,
    y: np.ndarray,
    c: float,
    gamma: float,
    tol: float = DEFAULT_TOL,
    max_passes: int = DEFAULT_MAX_PASSES,
) -> SvmBinaryModel:
    """Train a binary RBF SVM; labels must be +1/-1 with both present.

    Stops when a full index sweep finds no tolerance-violating pair
    (so every KKT residual is within ``tol``); after ``max_passes``
    sweeps the best-so-far model is returned with converged=False.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y)
    if x.ndim != 2 or len(x) != len(y):
        raise ValueError(f"bad training shapes {x.shape} vs {y.shape}")
    if len(y) < 2:
        raise DataError("need at least 2 training points")
    if not np.all(np.isin(y, (-1, 1))):
        raise DataError("labels must be +1/-1")
    if np.all(y == y[0]):
        raise DataError("single-class input: both labels must be present")
    if c <= 0:
        raise ValueError("c must be > 0")
    if gamma <= 0:
        raise ValueError("gamma must be > 0")

    y = y.astype(np.float64)
    state = _SmoState(x, y, float(c), float(gamma), float(tol))
    converged = False
    passes = 0
    examine_all = True
    while passes < max_passes:
        if examine_all:
            state.refresh_errors()
            changed = sum(state.examine(i) for i in range(state.n))
        else:
            nonbound = np.flatnonzero((state.alpha > 0) & (state.alpha < state.c))
            changed = sum(state.examine(int(i)) for i in nonbound)
        passes += 1
        if examine_all:
            if changed == 0:
                converged = True
                break
            examine_all = False
        elif changed == 0:
            examine_all = True

    bias = _optimal_bias(state.alpha, y, state.gram, float(c))
    keep = np.flatnonzero(state.alpha > _ALPHA_EPS)
    return SvmBinaryModel(
        support_vectors=x[keep].copy(),
        dual_coeffs=(state.alpha * y)[keep],
        bias=bias,
        gamma=float(gamma),
        c=float(c),
        support_indices=keep,
        converged=converged,
        passes=passes,
    )


def _optimal_bias(alpha: np.ndarray, y: np.ndarray, gram: np.ndarray, c: float) -> float:
    """Threshold minimizing the worst KKT residual at the final alphas.

    Every training point demands b >= or <= (y_i - g_i) depending on its
    alpha (free points demand equality); the midpoint of the tightest
    [max lower, min upper] window is the minimax choice.  With only
    bound-pinned alphas the window is an interval, where the running
    in-loop threshold may drift off-center.
    """
    g = (alpha * y) @ gram
    demand = y - g
    free = (alpha > _ALPHA_EPS) & (alpha < c - _ALPHA_EPS)
    at_zero = alpha <= _ALPHA_EPS
    pos = y > 0
    lower = free | (at_zero & pos) | (~at_zero & ~free & ~pos)
    upper = free | (at_zero & ~pos) | (~at_zero & ~free & pos)
    lo = demand[lower].max() if np.any(lower) else -np.inf
    hi = demand[upper].min() if np.any(upper) else np.inf
    if not np.isfinite(lo):
        return float(hi)
    if not np.isfinite(hi):
        return float(lo)
    return float(0.5 * (lo + hi))


def kkt_residuals(model: SvmBinaryModel, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Per-point violation of the optimality conditions at the model's alphas.

    Zero-alpha points must satisfy y*f >= 1, bound points y*f <= 1, free
    points y*f = 1; the residual is the distance to the satisfied region.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    alpha = np.zeros(len(y))
    alpha[model.support_indices] = np.abs(model.dual_coeffs)
    margins = y * model.decision_batch(x)
    res = np.empty(len(y))
    free = (alpha > _ALPHA_EPS) & (alpha < model.c - _ALPHA_EPS)
    at_zero = alpha <= _ALPHA_EPS
    at_c = alpha >= model.c - _ALPHA_EPS
    res[at_zero] = np.maximum(0.0, 1.0 - margins[at_zero])
    res[at_c] = np.maximum(0.0, margins[at_c] - 1.0)
    res[free] = np.abs(margins[free] - 1.0)
    return res


@dataclass
class PlattCalibrator:
    """Sigmoid map p(f) = 1 / (1 + exp(a*f + b)); a < 0 when decisions
    and labels agree in orientation."""

    a: float
    b_cal: float

    def probability(self, f) -> np.ndarray:
        u = self.a * np.asarray(f, dtype=np.float64) + self.b_cal
        out = np.empty_like(u)
        pos = u >= 0
        out[pos] = np.exp(-u[pos]) / (1.0 + np.exp(-u[pos]))
        out[~pos] = 1.0 / (1.0 + np.exp(u[~pos]))
        return out

    def to_json(self) -> dict:
        return {"a": self.a, "b": self.b_cal}

    @staticmethod
    def from_json(obj: dict) -> "PlattCalibrator":
        return PlattCalibrator(a=obj["a"], b_cal=obj["b"])


def platt_fit(decisions: np.ndarray, y: np.ndarray) -> PlattCalibrator:
    """Fit the sigmoid by Newton descent on the smoothed log-likelihood.

    Targets use the usual (N+ + 1)/(N+ + 2) and 1/(N- + 2) smoothing;
    iteration stops at gradient norm < 1e-8 or 100 steps.  A positive
    fitted slope means the calibrator is inverted relative to its
    decisions and raises CalibrationWarning.
    """
    f = np.asarray(decisions, dtype=np.float64)
    y = np.asarray(y)
    if not np.all(np.isfinite(f)):
        raise DataError("decision values must be finite")
    n_pos = int(np.sum(y > 0))
    n_neg = len(y) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DataError("single-class input: calibration needs both labels")

    hi = (n_pos + 1.0) / (n_pos + 2.0)
    lo = 1.0 / (n_neg + 2.0)
    t = np.where(y > 0, hi, lo)

    if np.all(f == f[0]):
        # constant decisions: the optimum is a ridge; pick its a = 0 point,
        # where p is exactly the mean smoothed target
        p_bar = float(t.mean())
        return PlattCalibrator(a=0.0, b_cal=float(np.log((1.0 - p_bar) / p_bar)))

    def nll(a, b):
        u = a * f + b
        return float(
            np.sum(np.where(u >= 0, t * u + np.log1p(np.exp(-np.abs(u))),
                            (t - 1.0) * u + np.log1p(np.exp(-np.abs(u)))))
        )

    a, b = 0.0, float(np.log((n_neg + 1.0) / (n_pos + 1.0)))
    fval = nll(a, b)
    ridge = 1e-12
    for _ in range(100):
        u = a * f + b
        eu = np.exp(-np.abs(u))
        p = np.where(u >= 0, eu / (1.0 + eu), 1.0 / (1.0 + eu))
        d2 = p * (1.0 - p)
        d1 = t - p
        g1 = float(np.sum(f * d1))
        g2 = float(np.sum(d1))
        if np.hypot(g1, g2) < 1e-8:
            break
        h11 = ridge + float(np.sum(f * f * d2))
        h22 = ridge + float(np.sum(d2))
        h21 = float(np.sum(f * d2))
        det = h11 * h22 - h21 * h21
        da = -(h22 * g1 - h21 * g2) / det
        db = -(-h21 * g1 + h11 * g2) / det
        gd = g1 * da + g2 * db
        step = 1.0
        while step >= 1e-10:
            na, nb = a + step * da, b + step * db
            nv = nll(na, nb)
            if nv < fval + 1e-4 * step * gd:
                a, b, fval = na, nb, nv
                break
            step *= 0.5
        else:
            break  # line search cannot improve further
    if a > 1e-12:  # meaningfully positive; constant decisions land at ~0
        warnings.warn(
            "calibration slope is positive: decision values are anti-correlated "
            "with the positive class",
            CalibrationWarning,
        )
    return PlattCalibrator(a=a, b_cal=b)


@dataclass
class SvmOvrModel:
    """One binary SVM + calibrator per class id of the label space."""

    label_space: LabelSpace
    binaries: list[SvmBinaryModel]
    calibrators: list[PlattCalibrator]

    @property
    def converged(self) -> bool:
        return all(m.converged for m in self.binaries)

    def probabilities(self, z: np.ndarray) -> np.ndarray:
        """Per-class one-vs-rest probabilities for a batch (not renormalized)."""
        z = np.asarray(z, dtype=np.float64)
        if z.ndim == 1:
            z = z[None, :]
        cols = [
            cal.probability(mod.decision_batch(z))
            for mod, cal in zip(self.binaries, self.calibrators)
        ]
        return np.stack(cols, axis=1)

    def predict(self, z: np.ndarray) -> np.ndarray:
        return np.argmax(self.probabilities(z), axis=1)


def _stratified_folds(labels: np.ndarray, k: int, seed: int) -> np.ndarray:
    """Deterministic stratified fold ids: shuffle within class, deal round-robin."""
    rng = np.random.Generator(np.random.PCG64(seed))
    fold = np.empty(len(labels), dtype=np.int64)
    for cls in np.unique(labels):
        idx = np.flatnonzero(labels == cls)
        idx = idx[rng.permutation(len(idx))]
        fold[idx] = np.arange(len(idx)) % k
    return fold


def _round_robin_folds(flags: np.ndarray, k: int) -> np.ndarray:
    """Fold ids stratified by a boolean flag, no shuffling (index order)."""
    fold = np.empty(len(flags), dtype=np.int64)
    for val in (True, False):
        idx = np.flatnonzero(flags == val)
        fold[idx] = np.arange(len(idx)) % k
    return fold


def _train_one_class(
    x, labels, class_id, c, gamma, tol, max_passes, calib_folds
) -> tuple[SvmBinaryModel, PlattCalibrator]:
    ybin = np.where(labels == class_id, 1.0, -1.0)
    n_pos = int(np.sum(ybin > 0))
    if n_pos < calib_folds:
        raise DataError(
            f"class {class_id} has {n_pos} examples; "
            f"need at least {calib_folds} to fold for calibration"
        )
    fold = _round_robin_folds(ybin > 0, calib_folds)
    oof = np.empty(len(ybin))
    for fi in range(calib_folds):
        train = fold != fi
        sub = smo_train(x[train], ybin[train], c, gamma, tol, max_passes)
        oof[~train] = sub.decision_batch(x[~train])
    calibrator = platt_fit(oof, ybin)
    final = smo_train(x, ybin, c, gamma, tol, max_passes)
    return final, calibrator


def ovr_train(
    x: np.ndarray,
    labels: np.ndarray,
    label_space: LabelSpace,
    c: float,
    gamma: float,
    tol: float = DEFAULT_TOL,
    max_passes: int = DEFAULT_MAX_PASSES,
    calib_folds: int = 3,
    jobs: int = 1,
) -> SvmOvrModel:
    """Train one calibrated binary SVM per class id (one-vs-rest)."""
    x = np.asarray(x, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    present = np.unique(labels)
    if len(present) < 2:
        raise DataError(
            f"found {len(present)} distinct class ({present.tolist()}); "
            "training needs at least 2"
        )
    missing = sorted(set(range(label_space.num_classes)) - set(present.tolist()))
    if missing:
        raise DataError(
            f"classes {missing} absent from labels; "
            f"every class of task {label_space.task} must appear"
        )

    results = parallel_map(
        lambda cid: _train_one_class(
            x, labels, cid, c, gamma, tol, max_passes, calib_folds
        ),
        range(label_space.num_classes),
        jobs=jobs,
    )
    binaries = [r[0] for r in results]
    calibrators = [r[1] for r in results]
    return SvmOvrModel(label_space=label_space, binaries=binaries, calibrators=calibrators)


def ovr_predict(model: SvmOvrModel, z: np.ndarray) -> tuple[int, np.ndarray]:
    """Predicted class id (argmax of calibrated probabilities, ties to
    lowest id) plus the per-class probability vector."""
    probs = model.probabilities(z)[0]
    return int(np.argmax(probs)), probs


def grid_search(
    x: np.ndarray,
    labels: np.ndarray,
    label_space: LabelSpace,
    c_grid=DEFAULT_GRID,
    gamma_grid=DEFAULT_GRID,
    k: int = 3,
    seed: int = 42,
    tol: float = DEFAULT_TOL,
    max_passes: int = DEFAULT_MAX_PASSES,
    jobs: int = 1,
) -> tuple[float, float, list[dict]]:
    """Stratified k-fold search over (C, gamma); score is mean macro-F1.

    Returns (best_c, best_gamma, table); ties resolve to smaller C, then
    smaller gamma.  Fold assignment is deterministic from ``seed``.
    """
    x = np.asarray(x, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    if k < 2:
        raise ValueError("k must be >= 2")
    if len(c_grid) == 0 or len(gamma_grid) == 0:
        raise ValueError("grids must be nonempty")
    classes, counts = np.unique(labels, return_counts=True)
    for cls, cnt in zip(classes, counts):
        if cnt < k:
            raise DataError(f"class {cls} has {cnt} members; needs >= {k} for {k}-fold CV")

    fold = _stratified_folds(labels, k, seed)
    num_classes = label_space.num_classes
    cells = [(float(c), float(g)) for c in c_grid for g in gamma_grid]

    def evaluate(cell):
        c, g = cell
        scores = []
        for fi in range(k):
            train = fold != fi
            model = ovr_train(
                x[train], labels[train], label_space, c, g, tol, max_passes, jobs=1
            )
            pred = model.predict(x[~train])
            cm = confusion_matrix(labels[~train], pred, num_classes)
            scores.append(macro_f1(cm))
        return {"c": c, "gamma": g, "mean_macro_f1": float(np.mean(scores)),
                "fold_macro_f1": [float(s) for s in scores]}

    table = parallel_map(evaluate, cells, jobs=jobs)
    best = min(table, key=lambda row: (-row["mean_macro_f1"], row["c"], row["gamma"]))
    return best["c"], best["gamma"], table


def save_ovr(model: SvmOvrModel, directory) -> None:
    """Persist as one TNSR pair per class plus a JSON sidecar (bit-exact)."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    entries = []
    for cid, (mod, cal) in enumerate(zip(model.binaries, model.calibrators)):
        sv_file = f"class{cid}_sv.tnsr"
        coef_file = f"class{cid}_coef.tnsr"
        write_tensor(mod.support_vectors.astype(np.float32), directory / sv_file)
        write_tensor(mod.dual_coeffs.astype(np.float32), directory / coef_file)
        entries.append(
            {
                "class_id": cid,
                "sv_file": sv_file,
                "coef_file": coef_file,
                "bias": mod.bias,
                "gamma": mod.gamma,
                "c": mod.c,
                "platt": cal.to_json(),
                "converged": mod.converged,
            }
        )
    doc = {"type": "svm_ovr", "label_space": model.label_space.to_json(), "classes": entries}
    with open(directory / "model.json", "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def load_ovr(directory) -> SvmOvrModel:
    directory = Path(directory)
    with open(directory / "model.json", "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("type") != "svm_ovr":
        raise DataError(f"{directory} does not hold an svm_ovr model")
    label_space = LabelSpace.from_json(doc["label_space"])
    binaries, calibrators = [], []
    for entry in doc["classes"]:
        sv = read_tensor(directory / entry["sv_file"]).astype(np.float64)
        coef = read_tensor(directory / entry["coef_file"]).astype(np.float64)
        binaries.append(
            SvmBinaryModel(
                support_vectors=sv,
                dual_coeffs=coef,
                bias=float(entry["bias"]),
                gamma=float(entry["gamma"]),
                c=float(entry["c"]),
                converged=bool(entry.get("converged", True)),
            )
        )
        calibrators.append(PlattCalibrator.from_json(entry["platt"]))
    return SvmOvrModel(label_space=label_space, binaries=binaries, calibrators=calibrators)
