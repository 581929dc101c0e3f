"""Random-walk Metropolis sampling of exp(-S(D)) over the real coefficient
space of the Dirac operators D = sum x_i B_i.

Lebesgue measure on the coefficients stands in for the translation-invariant
measure; a change of basis only rescales it, which cancels in averages.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .triple import check_axioms

TRACE_COLUMNS = ("step", "accepted", "action", "tr_d2", "tr_d4", "min_abs_eig")
OBSERVABLES = ("tr_d2", "tr_d4", "min_abs_eig", "x2")
ADAPT_EVERY = 100
TARGET_ACCEPT = (0.234, 0.5)
DIVERGENCE_BOUND = 1e8


@dataclass(frozen=True)
class ActionConfig:
    """S(D) = g2 tr D^2 + g4 tr D^4, or ``custom(D)`` when given."""

    g2: float = 1.0
    g4: float = 0.0
    custom: object = None
    custom_id: str | None = None

    def validate(self):
        if self.custom is not None:
            return
        if self.g4 < 0 or (self.g4 == 0 and self.g2 <= 0):
            raise ValueError("action is not integrable: need g4 > 0, or g4 = 0 and g2 > 0")

    def evaluate(self, D: np.ndarray, tr_d2: float, tr_d4: float) -> float:
        if self.custom is not None:
            return float(self.custom(D))
        return self.g2 * tr_d2 + self.g4 * tr_d4

    def to_dict(self) -> dict:
        return {"g2": self.g2, "g4": self.g4, "custom": self.custom_id}


@dataclass
class Estimate:
    mean: float
    stderr: float
    n_eff: float

    def to_dict(self) -> dict:
        return {"mean": self.mean, "stderr": self.stderr, "n_eff": self.n_eff}


@dataclass
class EstimateReport:
    estimates: dict
    acceptance_rate: float
    step_size: float
    steps: int
    burn_in: int
    seed: int
    chains: int = 1
    coeff_means: list = field(default_factory=list)
    coeff_stderr: list = field(default_factory=list)
    variance_ratio: dict = field(default_factory=dict)
    histogram: dict = field(default_factory=dict)
    flags: list = field(default_factory=list)
    axiom_spot_checks: int = 0
    samples: dict = field(default_factory=dict, repr=False)

    @property
    def flagged(self) -> bool:
        return bool(self.flags)

    def to_dict(self) -> dict:
        return {
            "estimates": {k: v.to_dict() for k, v in self.estimates.items()},
            "acceptance_rate": self.acceptance_rate,
            "step_size": self.step_size,
            "steps": self.steps,
            "burn_in": self.burn_in,
            "seed": self.seed,
            "chains": self.chains,
            "coeff_means": list(self.coeff_means),
            "coeff_stderr": list(self.coeff_stderr),
            "variance_ratio": dict(self.variance_ratio),
            "histogram": self.histogram,
            "flags": list(self.flags),
            "axiom_spot_checks": self.axiom_spot_checks,
        }


def batch_means(x: np.ndarray, n_batches: int = 20) -> Estimate:
    """Mean with a batch-means standard error and effective sample size."""
    x = np.asarray(x, dtype=float)
    n = x.size
    if n == 0:
        return Estimate(float("nan"), float("nan"), 0.0)
    mean = float(x.mean())
    nb = min(n_batches, n)
    size = n // nb
    if nb < 2 or size < 1:
        return Estimate(mean, float("nan"), float(n))
    means = x[: nb * size].reshape(nb, size).mean(axis=1)
    stderr = float(means.std(ddof=1) / math.sqrt(nb))
    var = float(x.var(ddof=1)) if n > 1 else 0.0
    n_eff = var / stderr**2 if stderr > 0 else float(n)
    return Estimate(mean, stderr, float(n_eff))


def _basis_matrices(basis) -> np.ndarray:
    mats = getattr(basis, "basis", basis)
    mats = [getattr(b, "matrix", b) for b in mats]
    if not mats:
        raise ValueError("the space of Dirac operators is zero-dimensional; nothing to sample")
    return np.array(mats, dtype=complex)


def _observe(D: np.ndarray):
    D2 = D @ D
    tr_d2 = float(np.trace(D2).real)
    tr_d4 = float(np.sum(np.abs(D2) ** 2))
    return tr_d2, tr_d4


def sample_euclidean(basis, action: ActionConfig, steps: int, burn_in: int, seed: int,
                     step_size: float = 0.5, chain: int = 0, eig_every: int = 1,
                     trace_path=None, check_every: int = 1000, hist_bins: int = 40,
                     keep_samples: bool = False) -> EstimateReport:
    """Run one Metropolis chain and estimate observables after burn-in.

    ``basis`` is a GeometryBasis (whose fermion space is then used for axiom
    spot checks) or a plain list of Hermitian matrices.
    """
    if steps <= burn_in or burn_in < 0:
        raise ValueError("need steps > burn_in >= 0")
    if step_size <= 0:
        raise ValueError("step_size must be positive")
    if eig_every < 1:
        raise ValueError("eig_every must be >= 1")
    action.validate()
    B = _basis_matrices(basis)
    fs = getattr(basis, "fermion_space", None)
    m = B.shape[0]
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), int(chain)]))

    # tr D^2 is a quadratic form in the coefficients; D itself is only
    # needed when the action involves more than tr D^2.
    gram = np.einsum("aij,bji->ab", B, B).real
    full = action.custom is not None or action.g4 != 0

    x = np.zeros(m)
    D = np.tensordot(x, B, axes=1)
    tr_d2, tr_d4 = _observe(D)
    S = action.evaluate(D, tr_d2, tr_d4)
    w = np.linalg.eigvalsh(D)
    stale = False

    n_keep = steps - burn_in
    rec = {k: np.full(n_keep, np.nan) for k in OBSERVABLES}
    coeffs = np.empty((n_keep, m))
    eigs = []
    flags = []
    accepted_total = 0
    window_acc = 0
    checks = 0

    writer = None
    fh = None
    if trace_path is not None:
        fh = open(trace_path, "w", newline="")
        writer = csv.writer(fh)
        writer.writerow(TRACE_COLUMNS)
    try:
        for step in range(steps):
            prop = x + step_size * rng.standard_normal(m)
            if full:
                Dp = np.tensordot(prop, B, axes=1)
                p2, p4 = _observe(Dp)
                Sp = action.evaluate(Dp, p2, p4)
            else:
                p2 = float(prop @ gram @ prop)
                Sp = action.g2 * p2
            accept = bool(np.isfinite(Sp) and math.log(rng.random()) < S - Sp)
            if accept:
                if not full:
                    Dp = np.tensordot(prop, B, axes=1)
                    p4 = _observe(Dp)[1]
                x, D, S, tr_d2, tr_d4 = prop, Dp, Sp, p2, p4
                accepted_total += 1
                window_acc += 1
                stale = True

            if step < burn_in and (step + 1) % ADAPT_EVERY == 0:
                rate = window_acc / ADAPT_EVERY
                if rate > TARGET_ACCEPT[1]:
                    step_size *= 1.2
                elif rate < TARGET_ACCEPT[0]:
                    step_size /= 1.2
                window_acc = 0
            elif step == burn_in - 1:
                window_acc = 0

            if not np.isfinite(S) or np.max(np.abs(x)) > DIVERGENCE_BOUND:
                flags.append(f"divergent chain at step {step}: action not integrable?")
                break

            min_abs = ""
            if step % eig_every == 0:
                if stale:
                    w = np.linalg.eigvalsh(D)
                    stale = False
                min_abs = float(np.min(np.abs(w)))
                if step >= burn_in:
                    eigs.append(w)
            if step >= burn_in:
                i = step - burn_in
                rec["tr_d2"][i] = tr_d2
                rec["tr_d4"][i] = tr_d4
                rec["x2"][i] = float(x @ x)
                if min_abs != "":
                    rec["min_abs_eig"][i] = min_abs
                coeffs[i] = x
            if fs is not None and check_every and step % check_every == 0:
                rep = check_axioms(fs, D, tol=1e-10)
                checks += 1
                if not all(rep[k].passed for k in (10, 11, 12, 13)):
                    flags.append(f"sampled operator fails axioms at step {step}")
            if writer is not None:
                writer.writerow([step, int(accept), repr(S), repr(tr_d2), repr(tr_d4),
                                 "" if min_abs == "" else repr(min_abs)])
    finally:
        if fh is not None:
            fh.close()

    est = {k: batch_means(v[~np.isnan(v)]) for k, v in rec.items()}
    cm = [batch_means(coeffs[:, j]) for j in range(m)]
    hist = {}
    if eigs:
        allw = np.concatenate(eigs)
        counts, edges = np.histogram(allw, bins=hist_bins)
        hist = {"edges": edges.tolist(), "counts": counts.tolist()}
    if est["tr_d2"].n_eff and _drifts(rec["tr_d2"]):
        flags.append("running mean of tr D^2 drifts; the action may not be integrable")
    report = EstimateReport(
        estimates=est,
        acceptance_rate=accepted_total / steps,
        step_size=step_size,
        steps=steps,
        burn_in=burn_in,
        seed=seed,
        coeff_means=[c.mean for c in cm],
        coeff_stderr=[c.stderr for c in cm],
        histogram=hist,
        flags=flags,
        axiom_spot_checks=checks,
    )
    if keep_samples:
        report.samples = {**rec, "coeffs": coeffs,
                          "eigs": np.concatenate(eigs) if eigs else np.empty(0)}
    return report


def _drifts(x: np.ndarray) -> bool:
    """Heuristic: the last quarter's mean exceeds the first quarter's by 10x."""
    x = x[~np.isnan(x)]
    if x.size < 8:
        return False
    q = x.size // 4
    a, b = float(np.mean(x[:q])), float(np.mean(x[-q:]))
    return b > 10 * max(a, 1e-300) and b - a > 10 * float(np.std(x[:q]) + 1e-300)


def _threads(requested: int) -> int:
    cap = os.environ.get("FUZZY_TRIPLES_THREADS")
    limit = int(cap) if cap else (os.cpu_count() or 1)
    return max(1, min(requested, limit))


def gelman_rubin(chains: list) -> float:
    """Potential scale reduction sqrt(V/W) from per-chain sample arrays."""
    chains = [np.asarray(c, dtype=float) for c in chains]
    n = min(c.size for c in chains)
    if len(chains) < 2 or n < 2:
        return 1.0
    arr = np.stack([c[:n] for c in chains])
    W = float(arr.var(axis=1, ddof=1).mean())
    B = n * float(arr.mean(axis=1).var(ddof=1))
    if W == 0:
        return 1.0
    V = (n - 1) / n * W + B / n
    return math.sqrt(V / W)


def run_chains(basis, action: ActionConfig, steps: int, burn_in: int, seed: int,
               chain_count: int = 1, step_size: float = 0.5, trace_dir=None,
               **kw) -> EstimateReport:
    """Independent chains on substreams (seed, chain index), merged."""
    if chain_count < 1:
        raise ValueError("chain_count must be >= 1")

    def one(c):
        path = None
        if trace_dir is not None:
            path = os.path.join(trace_dir, f"trace_chain{c}.csv")
        return sample_euclidean(basis, action, steps, burn_in, seed, step_size, chain=c,
                                trace_path=path, keep_samples=True, **kw)

    with ThreadPoolExecutor(max_workers=_threads(chain_count)) as pool:
        reports = list(pool.map(one, range(chain_count)))
    if chain_count == 1:
        r = reports[0]
        r.samples = {}
        return r

    est = {}
    ratio = {}
    for k in OBSERVABLES:
        parts = [r.estimates[k] for r in reports]
        mean = float(np.mean([p.mean for p in parts]))
        stderr = math.sqrt(sum(p.stderr**2 for p in parts)) / chain_count
        est[k] = Estimate(mean, stderr, float(sum(p.n_eff for p in parts)))
        samples = [r.samples[k][~np.isnan(r.samples[k])] for r in reports]
        ratio[k] = gelman_rubin(samples)
    m = len(reports[0].coeff_means)
    coeff_means = [float(np.mean([r.coeff_means[j] for r in reports])) for j in range(m)]
    coeff_se = [math.sqrt(sum(r.coeff_stderr[j] ** 2 for r in reports)) / chain_count
                for j in range(m)]
    hist = {}
    allw = np.concatenate([r.samples["eigs"] for r in reports])
    if allw.size:
        counts, edges = np.histogram(allw, bins=kw.get("hist_bins", 40))
        hist = {"edges": edges.tolist(), "counts": counts.tolist()}
    return EstimateReport(
        estimates=est,
        acceptance_rate=float(np.mean([r.acceptance_rate for r in reports])),
        step_size=float(np.mean([r.step_size for r in reports])),
        steps=steps,
        burn_in=burn_in,
        seed=seed,
        chains=chain_count,
        coeff_means=coeff_means,
        coeff_stderr=coeff_se,
        variance_ratio=ratio,
        histogram=hist,
        flags=[f for r in reports for f in r.flags],
        axiom_spot_checks=sum(r.axiom_spot_checks for r in reports),
    )
