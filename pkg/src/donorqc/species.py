"""Donor species parameters and their config-file loader."""

from __future__ import annotations

import dataclasses
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib


class ConfigError(ValueError):
    """Raised for malformed or inconsistent configuration input."""


@dataclass(frozen=True)
class DonorSpecies:
    """Physical parameters of one donor type.

    ``A`` is the contact hyperfine energy expressed as a frequency (A/h, Hz).
    Every calculation uses ``A_eff = strain_factor * A``.
    """

    name: str = "Si:P"
    A: float = 30.0e6
    g_n: float = 1.13
    E_b: float = 0.045  # eV
    a_B: float = 30e-10  # m
    t1_electron: float = 3600.0  # s, ~1 h at 1 K, 0.1 T
    t_phi: float = 0.5e-3  # s
    strain_factor: float = 1.0

    def __post_init__(self):
        if not self.A > 0:
            raise ConfigError(f"{self.name}: hyperfine A must be > 0, got {self.A}")
        if not self.a_B > 0:
            raise ConfigError(f"{self.name}: Bohr radius a_B must be > 0, got {self.a_B}")
        if not self.E_b > 0:
            raise ConfigError(f"{self.name}: binding energy E_b must be > 0, got {self.E_b}")
        if not 0 < self.strain_factor <= 1:
            raise ConfigError(
                f"{self.name}: strain_factor must lie in (0, 1], got {self.strain_factor}"
            )
        if self.t1_electron <= 0 or self.t_phi <= 0:
            raise ConfigError(f"{self.name}: relaxation times must be positive")

    @property
    def A_eff(self) -> float:
        return self.strain_factor * self.A

    def replace(self, **changes) -> "DonorSpecies":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)


SI_P = DonorSpecies()
# hyperfine reduced by roughly half in a strained Si/SiGe quantum well
SI_P_STRAINED = DonorSpecies(name="Si:P (strained well)", strain_factor=0.5)

BUILTIN_SPECIES = {"Si:P": SI_P, "Si:P-strained": SI_P_STRAINED}

_FIELDS = {f.name for f in dataclasses.fields(DonorSpecies)}


def species_from_mapping(data: Mapping[str, Any], base: DonorSpecies = SI_P) -> DonorSpecies:
    unknown = set(data) - _FIELDS
    if unknown:
        raise ConfigError(f"unknown species field(s): {sorted(unknown)}")
    try:
        values = {k: (str(v) if k == "name" else float(v)) for k, v in data.items()}
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"non-numeric species field: {exc}") from None
    return base.replace(**values)


def load_config(path: str | Path) -> dict[str, Any]:
    """Read a TOML key-value config file into a plain dict."""
    path = Path(path)
    try:
        with path.open("rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def load_species(path: str | Path) -> dict[str, DonorSpecies]:
    """Load ``[species.<key>]`` tables from a TOML file.

    Each table overrides the Si:P defaults; a ``base`` key may name a builtin
    species to start from instead.
    """
    cfg = load_config(path)
    out = dict(BUILTIN_SPECIES)
    for key, table in cfg.get("species", {}).items():
        table = dict(table)
        base = BUILTIN_SPECIES.get(table.pop("base", "Si:P"))
        if base is None:
            raise ConfigError(f"species {key}: unknown base")
        table.setdefault("name", key)
        out[key] = species_from_mapping(table, base)
    return out
