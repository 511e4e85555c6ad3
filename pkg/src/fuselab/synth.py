"""Synthetic score panels from an equicorrelated binormal model.

Each model's latent score is ``sqrt(rho) * c + sqrt(1 - rho) * e + mu * y``
where ``c`` is a per-sample factor shared by all models, ``e`` is model
noise and ``y`` the label. Both classes have unit-variance latents, so a
model's AUROC is ``Phi(mu / sqrt(2))``. Latents are squashed to (0, 1) with
the logistic function, which does not change any AUROC.

Normal deviates come from the inverse normal CDF applied to uniforms drawn
from Philox (a counter-based generator), keyed by ``(seed, stream)``.
Stream 0 is the shared factor; model ``i`` uses stream ``i + 1``, so adding
a model never changes existing rows.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.special import expit, ndtr, ndtri

from fuselab.core import ScorePanel
from fuselab.errors import InvalidSpec

_MANTISSA = 2**53


@dataclass(frozen=True)
class SynthSpec:
    n_pos: int
    n_neg: int
    target_auroc: tuple[float, ...]
    rho: float = 0.0
    seed: int = 0
    dataset: str = "synthetic"
    models: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        object.__setattr__(self, "target_auroc", tuple(float(a) for a in self.target_auroc))
        if not self.models:
            object.__setattr__(
                self, "models", tuple(f"m{i + 1}" for i in range(len(self.target_auroc)))
            )
        else:
            object.__setattr__(self, "models", tuple(self.models))
        for name in ("n_pos", "n_neg"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                raise InvalidSpec(f"{name} must be a positive integer, got {v!r}")
        if not self.target_auroc:
            raise InvalidSpec("need at least one target AUROC")
        if any(not (0.0 < a < 1.0) for a in self.target_auroc):
            raise InvalidSpec(f"target AUROCs must lie strictly in (0, 1): {self.target_auroc}")
        if not (isinstance(self.rho, (int, float)) and 0.0 <= self.rho < 1.0):
            raise InvalidSpec(f"rho must lie in [0, 1), got {self.rho!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise InvalidSpec(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if len(self.models) != len(self.target_auroc):
            raise InvalidSpec(f"{len(self.models)} model names for {len(self.target_auroc)} targets")
        if len(set(self.models)) != len(self.models):
            raise InvalidSpec("model names must be unique")

    def to_dict(self) -> dict:
        d = asdict(self)
        d["target_auroc"] = list(self.target_auroc)
        d["models"] = list(self.models)
        return d


def mu_for_auroc(target: float) -> float:
    """Class-mean separation giving binormal AUROC ``target``."""
    return math.sqrt(2.0) * float(ndtri(target))


def expected_auroc_of_mu(mu: float) -> float:
    """Binormal AUROC ``Phi(mu / sqrt(2))``."""
    return float(ndtr(mu / math.sqrt(2.0)))


def normal_stream(seed: int, stream: int, n: int) -> np.ndarray:
    """``n`` standard normal deviates for ``(seed, stream)``.

    Uniforms are ``(k + 0.5) / 2**53`` for 53-bit integers ``k``, so they
    never hit 0 or 1.
    """
    bitgen = np.random.Philox(key=np.array([seed, stream], dtype=np.uint64))
    k = np.random.Generator(bitgen).integers(0, _MANTISSA, size=n, dtype=np.uint64)
    u = (k.astype(np.float64) + 0.5) / _MANTISSA
    return ndtri(u)


def latent_panel(spec: SynthSpec) -> tuple[np.ndarray, np.ndarray]:
    """Labels and raw latent scores (models x samples), positives first."""
    n = spec.n_pos + spec.n_neg
    y = np.concatenate([np.ones(spec.n_pos, dtype=np.int64), np.zeros(spec.n_neg, dtype=np.int64)])
    common = normal_stream(spec.seed, 0, n)
    a, b = math.sqrt(spec.rho), math.sqrt(1.0 - spec.rho)
    rows = []
    for i, target in enumerate(spec.target_auroc):
        noise = normal_stream(spec.seed, i + 1, n)
        rows.append(a * common + b * noise + mu_for_auroc(target) * y)
    return y, np.vstack(rows)


def generate_panel(spec: SynthSpec) -> ScorePanel:
    y, latents = latent_panel(spec)
    width = len(str(len(y)))
    sample_ids = tuple(f"s{j:0{width}d}" for j in range(len(y)))
    return ScorePanel(spec.dataset, spec.models, sample_ids, y, expit(latents))
