"""Run configuration read from a ``KEY = value`` file.

The file is parsed by a django-environ reader that never consults the
process environment; the only environment variable involved is the one
naming the file (``settings.LINTRANS_CONFIG_ENV``, ``LINTRANS_CONFIG`` by
default). Keys are grouped by prefix: ``GRID_*``, ``TOL_*``, ``HAAR_*``,
``ADMISSIBILITY_*`` and ``RUN_*``.
"""

from __future__ import annotations

import hashlib
import logging
import os
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Mapping

import environ
from django.conf import settings
from django.core.exceptions import ImproperlyConfigured

from .numerics import Grid, ParameterAxis, ParameterBox, QuadratureKind, QuadratureRule

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RunConfig:
    grid_line_lower: float = -8.0
    grid_line_upper: float = 8.0
    grid_line_points: int = 1024
    grid_chi_lower: float = -1.0
    grid_chi_upper: float = 2.0
    grid_chi_points: int = 1024
    grid_halfline_upper: float = 64.0
    grid_halfline_points: int = 4096
    grid_plane_lower: float = -8.0
    grid_plane_upper: float = 8.0
    grid_plane_points: int = 256

    tol_identity: float = 1e-8
    tol_exact: float = 1e-12
    tol_transfer: float = 1e-10
    tol_spectral: float = 1e-8
    tol_inconclusive: float = 1e-10

    haar_log2_scale: int = 6
    haar_scale_panels: int = 256
    haar_shift: float = 12.0
    haar_shift_panels: int = 384
    haar_transfer_log2_scale: int = 3
    haar_transfer_shift: float = 4.0
    haar_transfer_points: int = 32
    haar_wh_extent: float = 6.0
    haar_wh_panels: int = 192

    admissibility_log2_min: int = -12
    admissibility_log2_max: int = 4
    admissibility_panels: int = 64
    admissibility_nodes: int = 8
    admissibility_decay: float = 1e-3

    run_seed: int = 0
    run_jobs: int = 1
    run_text_output: str = ""
    run_records_output: str = ""

    def __post_init__(self):
        for name in ("tol_identity", "tol_exact", "tol_transfer", "tol_spectral", "tol_inconclusive", "admissibility_decay"):
            if not getattr(self, name) > 0:
                raise ImproperlyConfigured(f"{name.upper()} must be positive, got {getattr(self, name)}.")
        if self.tol_inconclusive > self.tol_spectral:
            raise ImproperlyConfigured("TOL_INCONCLUSIVE must not exceed TOL_SPECTRAL.")
        for prefix in ("grid_line", "grid_chi", "grid_plane"):
            if not getattr(self, f"{prefix}_lower") < getattr(self, f"{prefix}_upper"):
                raise ImproperlyConfigured(f"{prefix.upper()}_LOWER must be below {prefix.upper()}_UPPER.")
        if self.grid_halfline_upper <= 0:
            raise ImproperlyConfigured("GRID_HALFLINE_UPPER must be positive.")
        counts = (
            "grid_line_points", "grid_chi_points", "grid_halfline_points", "grid_plane_points",
            "haar_scale_panels", "haar_shift_panels", "haar_transfer_points", "haar_wh_panels",
            "admissibility_panels", "admissibility_nodes", "run_jobs",
        )
        for name in counts:
            if getattr(self, name) < 1:
                raise ImproperlyConfigured(f"{name.upper()} must be at least 1, got {getattr(self, name)}.")
        for name in ("haar_shift", "haar_transfer_shift", "haar_wh_extent"):
            if getattr(self, name) <= 0:
                raise ImproperlyConfigured(f"{name.upper()} must be positive.")
        if not self.admissibility_log2_min < self.admissibility_log2_max:
            raise ImproperlyConfigured("ADMISSIBILITY_LOG2_MIN must be below ADMISSIBILITY_LOG2_MAX.")

    @classmethod
    def scheme(cls) -> dict[str, tuple[type, object]]:
        return {field.name.upper(): (type(field.default), field.default) for field in fields(cls)}

    @classmethod
    def load(cls, path: str | Path | None = None, overrides: Mapping[str, str] | None = None) -> RunConfig:
        """Read ``path`` (or the file named by the environment, or the default file).

        ``overrides`` replace single keys after the file is read.
        """
        path = resolve_config_path(path)
        reader = type("RunConfigEnv", (environ.Env,), {"ENVIRON": {}})
        if path is not None:
            if not path.is_file():
                raise ImproperlyConfigured(f"Configuration file {path} does not exist.")
            reader.read_env(str(path), overwrite=True)
        scheme = cls.scheme()
        for key, value in (overrides or {}).items():
            reader.ENVIRON[key.strip().upper()] = str(value).strip()
        unknown = sorted(set(reader.ENVIRON) - set(scheme))
        if unknown:
            raise ImproperlyConfigured(f"Unknown configuration keys: {', '.join(unknown)}.")

        env = reader(**scheme)
        values = {}
        for key, (cast, _default) in scheme.items():
            try:
                # environ's float cast drops exponent markers, so "1e-8" is read as text.
                values[key.lower()] = float(env.str(key)) if cast is float else env(key)
            except (TypeError, ValueError) as exc:
                raise ImproperlyConfigured(f"{key} must be a {cast.__name__}: {exc}") from exc
        config = cls(**values)
        logger.debug("Loaded run configuration from %s (digest %s)", path or "defaults", config.digest()[:12])
        return config

    def with_overrides(self, **values) -> RunConfig:
        return replace(self, **values)

    def items(self) -> list[tuple[str, object]]:
        return [(field.name.upper(), getattr(self, field.name)) for field in fields(self)]

    def digest(self) -> str:
        """Stable hash of every setting except the output paths."""
        text = "\n".join(f"{key}={value!r}" for key, value in self.items() if not key.endswith("_OUTPUT"))
        return hashlib.sha256(text.encode("utf-8")).hexdigest()

    def line_grid(self) -> Grid:
        return Grid.line(self.grid_line_lower, self.grid_line_upper, self.grid_line_points)

    def chi_grid(self) -> Grid:
        return Grid.line(self.grid_chi_lower, self.grid_chi_upper, self.grid_chi_points)

    def half_line_grid(self) -> Grid:
        return Grid.line(0.0, self.grid_halfline_upper, self.grid_halfline_points)

    def plane_grid(self) -> Grid:
        return Grid.square(self.grid_plane_lower, self.grid_plane_upper, self.grid_plane_points)

    def energy_box(self) -> ParameterBox:
        return ParameterBox(
            (
                ParameterAxis(
                    "a",
                    2.0 ** -self.haar_log2_scale,
                    2.0 ** self.haar_log2_scale,
                    QuadratureRule(panels=self.haar_scale_panels),
                    log_scale=True,
                    reflect=True,
                ),
                ParameterAxis("b", -self.haar_shift, self.haar_shift, QuadratureRule(panels=self.haar_shift_panels)),
            )
        )

    def transfer_box(self) -> ParameterBox:
        rule = QuadratureRule(panels=self.haar_transfer_points)
        scale = 2.0 ** self.haar_transfer_log2_scale
        return ParameterBox(
            (
                ParameterAxis("a", 1.0 / scale, scale, rule, log_scale=True),
                ParameterAxis("b", -self.haar_transfer_shift, self.haar_transfer_shift, rule),
            )
        )

    def wh_box(self) -> ParameterBox:
        rule = QuadratureRule(panels=self.haar_wh_panels)
        extent = self.haar_wh_extent
        return ParameterBox((ParameterAxis("a", -extent, extent, rule), ParameterAxis("b", -extent, extent, rule)))

    def admissibility_options(self) -> dict:
        return {
            "log2_min": self.admissibility_log2_min,
            "log2_max": self.admissibility_log2_max,
            "rule": QuadratureRule(QuadratureKind.GAUSS_LEGENDRE, self.admissibility_panels, self.admissibility_nodes),
            "decay_tolerance": self.admissibility_decay,
        }


def resolve_config_path(path: str | Path | None) -> Path | None:
    if path:
        return Path(path)
    named = os.environ.get(settings.LINTRANS_CONFIG_ENV)
    if named:
        return Path(named)
    default = Path(settings.LINTRANS_DEFAULT_CONFIG)
    return default if default.is_file() else None


def parse_overrides(assignments) -> dict[str, str]:
    """``["KEY=VALUE", ...]`` from the command line."""
    overrides = {}
    for assignment in assignments or ():
        key, separator, value = assignment.partition("=")
        if not separator or not key.strip():
            raise ImproperlyConfigured(f"Expected KEY=VALUE, got {assignment!r}.")
        overrides[key.strip().upper()] = value.strip()
    return overrides
