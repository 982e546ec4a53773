"""Sampling campaigns over random rational maps.

Random maps and Moebius transformations with deterministic per-trial seeds,
invariance trials, pairwise collision probes of the spectrum fingerprint,
and isospectrality checks.  Trials are independent work items keyed by an
attempt counter, so parallel execution reduces to the same report as the
serial loop.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import MultspecError
from .forms import DOUBLE, EXTENDED, HomForm2, hom_resultant
from .maps import DEGREE_CAP, Moebius, PROJ_TOL, RationalMap, conjugate_map, make_map
from .spectra import SUPER_TOL, block_distance, rho_vector, spectra_distance, tau_vector

RES_REJECT = 1e-6


@dataclass(frozen=True)
class SampleConfig:
    """Campaign parameters; every tolerance that shapes a verdict lives here."""

    degree: int
    window: tuple
    trials: int
    seed: int
    proj_tol: float = PROJ_TOL
    super_tol: float = SUPER_TOL
    distance_threshold: float = 1e-10
    conjugate_threshold: float = 1e-8
    precision: str = DOUBLE

    def __post_init__(self):
        n, m = self.window
        if not (1 <= n <= m):
            raise ValueError("window must satisfy 1 <= n <= m")
        if self.degree**m > DEGREE_CAP:
            raise ValueError(f"degree**m = {self.degree**m} exceeds cap {DEGREE_CAP}")
        if self.trials < 1:
            raise ValueError("need at least one trial")


@dataclass(frozen=True)
class TrialOutcome:
    label: str
    seed: int
    status: str  # "ok" or the error kind that skipped the trial


@dataclass(frozen=True)
class CollisionCandidate:
    label_a: str
    label_b: str
    distance: float
    refined_distance: float
    confirmed: bool


@dataclass(frozen=True)
class ProbeReport:
    """Outcome of one collision campaign.

    ``max_intra_class``/``min_inter_class`` compare pairs with equal versus
    distinct conjugacy labels; a passing report keeps the former strictly
    below the latter.  ``theorem_backed`` is False below degree 4, where the
    separation evidence is exploratory only.
    """

    config: SampleConfig
    outcomes: tuple
    failure_counts: dict
    min_distance: float
    min_inter_class: float
    max_intra_class: float
    candidates: tuple
    conjugate_flagged: tuple
    theorem_backed: bool

    @property
    def passes(self) -> bool:
        if self.max_intra_class is None or self.min_inter_class is None:
            return True
        return self.max_intra_class < self.min_inter_class

    def to_dict(self) -> dict:
        cfg = self.config
        return {
            "config": {
                "degree": cfg.degree,
                "window": list(cfg.window),
                "trials": cfg.trials,
                "seed": cfg.seed,
                "tolerances": {
                    "projective": cfg.proj_tol,
                    "superattracting": cfg.super_tol,
                    "distance_threshold": cfg.distance_threshold,
                    "conjugate_threshold": cfg.conjugate_threshold,
                },
                "precision": cfg.precision,
            },
            "outcomes": [
                {"label": t.label, "seed": t.seed, "status": t.status}
                for t in self.outcomes
            ],
            "failure_counts": dict(sorted(self.failure_counts.items())),
            "min_distance": self.min_distance,
            "min_inter_class": self.min_inter_class,
            "max_intra_class": self.max_intra_class,
            "candidates": [
                {
                    "pair": [c.label_a, c.label_b],
                    "distance": c.distance,
                    "refined_distance": c.refined_distance,
                    "confirmed": c.confirmed,
                }
                for c in self.candidates
            ],
            "conjugate_flagged": [list(pair) for pair in self.conjugate_flagged],
            "theorem_backed": self.theorem_backed,
            "passes": self.passes,
        }


def derive_seed(campaign_seed: int, index: int) -> int:
    """Counter-based per-trial seed: hash of (campaign seed, trial counter)."""
    ss = np.random.SeedSequence([int(campaign_seed), int(index)])
    return int(ss.generate_state(1, np.uint64)[0])


def _disc_samples(rng, count):
    radius = np.sqrt(rng.random(count))
    angle = 2.0 * np.pi * rng.random(count)
    return radius * np.exp(1j * angle)


def random_map(d: int, seed: int) -> RationalMap:
    """Map with coefficients uniform on the unit disc, resultant-rejected.

    Redraws until |resultant| >= 1e-6 after normalization; deterministic in
    the seed.
    """
    if d < 2:
        raise ValueError("need degree >= 2")
    rng = np.random.default_rng(seed)
    while True:
        coeffs = _disc_samples(rng, 2 * (d + 1))
        P = HomForm2(coeffs[: d + 1].copy())
        Q = HomForm2(coeffs[d + 1 :].copy())
        m = max(np.abs(P.coeffs).max(), np.abs(Q.coeffs).max())
        if m == 0:
            continue
        P = HomForm2(P.coeffs / m)
        Q = HomForm2(Q.coeffs / m)
        if abs(hom_resultant(P, Q)) < RES_REJECT:
            continue
        return make_map(P, Q)


def _haar_rotation(rng):
    """Uniform sphere rotation as a special-unitary 2x2 matrix (quaternion draw)."""
    u1, u2, u3 = rng.random(3)
    q0 = np.sqrt(1 - u1) * np.sin(2 * np.pi * u2)
    q1 = np.sqrt(1 - u1) * np.cos(2 * np.pi * u2)
    q2 = np.sqrt(u1) * np.sin(2 * np.pi * u3)
    q3 = np.sqrt(u1) * np.cos(2 * np.pi * u3)
    a = complex(q0, q1)
    b = complex(q2, q3)
    return np.array([[a, b], [-b.conjugate(), a.conjugate()]])


def random_moebius(seed: int, max_stretch: float = 2.0) -> Moebius:
    """Random bounded-distortion coordinate change.

    Haar rotation, a diagonal stretch with singular-value ratio at most
    max_stretch**2, then another Haar rotation.  Rotations are chordal
    isometries, so conjugates stay numerically resolvable while every
    coordinate path (charts, infinity crossings) still gets exercised.
    """
    rng = np.random.default_rng(seed)
    s = float(np.exp(rng.uniform(-np.log(max_stretch), np.log(max_stretch))))
    mat = _haar_rotation(rng) @ np.diag([s, 1.0 / s]) @ _haar_rotation(rng)
    return Moebius(mat[0, 0], mat[0, 1], mat[1, 0], mat[1, 1])


def invariance_trial(f: RationalMap, phi: Moebius, cfg: SampleConfig) -> float:
    """Fingerprint distance between a map and its conjugate; zero in theory."""
    n, m = cfg.window
    t_f = tau_vector(f, n, m, super_tol=cfg.super_tol, precision=cfg.precision)
    t_g = tau_vector(
        conjugate_map(f, phi), n, m, super_tol=cfg.super_tol, precision=cfg.precision
    )
    return spectra_distance(t_f, t_g)


def _tau_attempt(cfg: SampleConfig, attempt: int):
    """One candidate draw: (attempt, status, map, tau-or-None)."""
    seed = derive_seed(cfg.seed, attempt)
    f = random_map(cfg.degree, seed)
    n, m = cfg.window
    try:
        tv = tau_vector(f, n, m, super_tol=cfg.super_tol, precision=cfg.precision)
        return attempt, seed, "ok", f, tv
    except MultspecError as exc:
        return attempt, seed, type(exc).__name__, f, None


def collision_probe(cfg: SampleConfig, planted=(), workers: int = 0) -> ProbeReport:
    """Pairwise fingerprint distances over random (plus planted) maps.

    ``planted`` entries are (label, map) pairs; equal labels declare known
    conjugacy classes, so duplicate/conjugate plants land in the intra-class
    statistics.  Inter-class pairs below the distance threshold are
    re-examined at extended precision before being reported as candidate
    collisions.
    """
    n, m = cfg.window
    outcomes = []
    entries = []  # (label, map, tau)
    failures = {}
    attempt = 0
    while len(entries) < cfg.trials:
        batch = max(cfg.trials - len(entries), 1)
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(_tau_attempt, [cfg] * batch, range(attempt, attempt + batch)))
        else:
            results = [_tau_attempt(cfg, a) for a in range(attempt, attempt + batch)]
        attempt += batch
        for _, seed, status, f, tv in sorted(results, key=lambda r: r[0]):
            if len(entries) >= cfg.trials:
                break
            if status == "ok":
                label = f"sample-{len(entries):03d}"
                outcomes.append(TrialOutcome(label, seed, "ok"))
                entries.append((label, f, tv))
            else:
                failures[status] = failures.get(status, 0) + 1
                outcomes.append(TrialOutcome(f"skipped-{attempt}", seed, status))

    for label, f in planted:
        try:
            tv = tau_vector(f, n, m, super_tol=cfg.super_tol, precision=cfg.precision)
            entries.append((label, f, tv))
            outcomes.append(TrialOutcome(label, -1, "ok"))
        except MultspecError as exc:
            failures[type(exc).__name__] = failures.get(type(exc).__name__, 0) + 1
            outcomes.append(TrialOutcome(label, -1, type(exc).__name__))

    min_dist = None
    min_inter = None
    max_intra = None
    below = []
    conj_flagged = []
    for i in range(len(entries)):
        for j in range(i + 1, len(entries)):
            la, fa, ta = entries[i]
            lb, fb, tb = entries[j]
            dist = spectra_distance(ta, tb)
            min_dist = dist if min_dist is None else min(min_dist, dist)
            if la == lb:
                max_intra = dist if max_intra is None else max(max_intra, dist)
                if dist < cfg.conjugate_threshold:
                    conj_flagged.append((la, lb))
            else:
                min_inter = dist if min_inter is None else min(min_inter, dist)
                if dist < cfg.distance_threshold:
                    below.append((la, lb, fa, fb, dist))

    candidates = []
    for la, lb, fa, fb, dist in below:
        ta = tau_vector(fa, n, m, super_tol=cfg.super_tol, precision=EXTENDED)
        tb = tau_vector(fb, n, m, super_tol=cfg.super_tol, precision=EXTENDED)
        refined = spectra_distance(ta, tb)
        candidates.append(
            CollisionCandidate(la, lb, dist, refined, refined < cfg.distance_threshold)
        )

    return ProbeReport(
        config=cfg,
        outcomes=tuple(outcomes),
        failure_counts=failures,
        min_distance=min_dist,
        min_inter_class=min_inter,
        max_intra_class=max_intra,
        candidates=tuple(candidates),
        conjugate_flagged=tuple(conj_flagged),
        theorem_backed=cfg.degree >= 4,
    )


def isospectral_check(maps, n_max: int, tol: float) -> bool:
    """True when the sigma coordinates of all layers up to n_max agree pairwise.

    Agreement uses the same normalized entrywise metric as the fingerprint
    distance, so huge top sigma values compare relatively.
    """
    maps = list(maps)
    if len(maps) < 2:
        return True
    degrees = {f.degree for f in maps}
    if len(degrees) != 1:
        raise ValueError("isospectral_check requires equal degrees")
    vectors = [rho_vector(f, 1, n_max) for f in maps]
    for i in range(len(vectors)):
        for j in range(i + 1, len(vectors)):
            if block_distance(vectors[i], vectors[j]) > tol:
                return False
    return True
