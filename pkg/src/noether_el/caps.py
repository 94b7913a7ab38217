"""Resource caps and numeric tolerances.

Every potentially unbounded loop in the package is guarded by one of the
fields below.  Defaults suit interactive use; override per-call, via CLI
flags, or with the ``NOETHER_EL_CAPS`` environment variable, which holds
either a JSON object whose keys are field names
(``NOETHER_EL_CAPS='{"max_gb_pairs": 50000}'``) or the path of a JSON file
with the same shape.
"""

from __future__ import annotations

import dataclasses
import json
import os

from .errors import ParseError


@dataclasses.dataclass
class Caps:
    # Groebner engine
    max_gb_pairs: int = 20_000
    max_gb_degree: int = 40
    # Integer factoring (trial division)
    trial_division_bound: int = 1_000_000
    allow_partial_factorization: bool = False
    # Depth search
    depth_bound: int = 4
    depth_coeff: int = 6
    saturation_iters: int = 256
    certificate_iters: int = 100_000
    # Group enumeration
    max_elements: int = 10_000_000
    max_quotient: int = 4096
    max_det_dim: int = 6
    entry_bound: int = 10 ** 9
    # Numeric tolerances
    fourier_tol: float = 1e-9
    dixon_tol: float = 1e-6
    psd_tol: float = 1e-8
    conj_tol: float = 1e-12
    # Randomised steps
    seed: int = 0

    def replace(self, **kw) -> "Caps":
        return dataclasses.replace(self, **kw)


_ENV_VAR = "NOETHER_EL_CAPS"


def default_caps() -> Caps:
    """Caps from defaults, updated by ``NOETHER_EL_CAPS`` if set.

    The variable holds inline JSON when it starts with ``{``; any other
    value is read as the path of a JSON config file.
    """
    caps = Caps()
    raw = os.environ.get(_ENV_VAR)
    if not raw:
        return caps
    text = raw.strip()
    if not text.startswith("{"):
        try:
            with open(text, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ParseError(
                f"{_ENV_VAR}: cannot read config file {raw!r}: {exc}"
            ) from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{_ENV_VAR} is not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ParseError(f"{_ENV_VAR} must be a JSON object")
    fields = {f.name for f in dataclasses.fields(Caps)}
    for key, value in data.items():
        if key not in fields:
            raise ParseError(f"{_ENV_VAR}: unknown cap {key!r}")
        setattr(caps, key, value)
    return caps
