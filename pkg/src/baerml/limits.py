"""Resource caps.

Caps are read from the environment once per call to :func:`current` so that a
CLI process can set them before work starts:

``BAERML_MAX_DIM``     largest matrix dimension any operation may build
``BAERML_MAX_DEPTH``   largest tower/system depth explored
``BAERML_MAX_GENS``    largest generator count for Hom/Ext modules
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from .errors import ResourceLimitError


@dataclass(frozen=True)
class Limits:
    max_dim: int = 4000
    max_depth: int = 400
    max_generators: int = 400


def current() -> Limits:
    def read(name: str, default: int) -> int:
        raw = os.environ.get(name)
        if raw is None or raw == "":
            return default
        try:
            value = int(raw)
        except ValueError:
            raise ValueError(f"{name} must be an integer, got {raw!r}") from None
        if value < 1:
            raise ValueError(f"{name} must be positive, got {value}")
        return value

    base = Limits()
    return Limits(
        max_dim=read("BAERML_MAX_DIM", base.max_dim),
        max_depth=read("BAERML_MAX_DEPTH", base.max_depth),
        max_generators=read("BAERML_MAX_GENS", base.max_generators),
    )


def check(cap: str, requested: int) -> None:
    lim = current()
    limit = getattr(lim, cap)
    if requested > limit:
        raise ResourceLimitError(cap, limit, requested)
