"""Two-mesh convergence studies, rate tables and the built-in experiment presets.

Rows of a :class:`ConvergenceTable` are labelled by the *finer* resolution of the
pair they compare: the row for ``N`` holds ``||U^N - U^{N/2}||`` and the row for
``M`` holds the difference between the ``M`` and ``M/2`` spatial meshes.
"""

from __future__ import annotations

import csv
import io
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import ConfigError, DomainError
from .fem import PRESETS as FUNCTION_PRESETS
from .fem import SpatialMesh
from .kernels import SignedPowerLaw, TemperedPowerLaw
from .stepper import ProblemSpec, solve

log = logging.getLogger(__name__)


def _l2_weighted(mesh: SpatialMesh, diff: np.ndarray) -> float:
    return math.sqrt(mesh.cell_measure * float(np.sum(diff * diff)))


def _final(problem: ProblemSpec, N: int, M: int, gamma: float | None) -> np.ndarray:
    return solve(problem, N, M, gamma).final


def temporal_error(problem: ProblemSpec, M: int, N: int, gamma: float | None = None) -> float:
    """``E_tau(N, M)``: weighted l2 distance of the final states computed with N and 2N steps."""
    coarse = _final(problem, N, M, gamma)
    fine = _final(problem, 2 * N, M, gamma)
    mesh = SpatialMesh(problem.dim, M, problem.length_x, problem.length_y)
    return _l2_weighted(mesh, fine - coarse)


def spatial_error(problem: ProblemSpec, N: int, M: int, gamma: float | None = None) -> float:
    """``E_h(N, M)``: the 2M solution sampled at the interior nodes of the M mesh, minus the M solution."""
    coarse = _final(problem, N, M, gamma)
    fine = _final(problem, N, 2 * M, gamma)
    mesh = SpatialMesh(problem.dim, M, problem.length_x, problem.length_y)
    return _l2_weighted(mesh, mesh.restrict_from_fine(fine) - coarse)


def compute_rates(errors) -> list[float | None]:
    errors = [float(e) for e in errors]
    if len(errors) < 2:
        raise DomainError("need at least two errors to compute a rate")
    if any(not e > 0 for e in errors):
        raise DomainError("errors must be positive to take logarithms")
    return [None] + [math.log2(errors[i - 1] / errors[i]) for i in range(1, len(errors))]


@dataclass
class ConvergenceTable:
    label: str  # "N" for temporal studies, "M" for spatial ones
    resolutions: list[int]
    errors: list[float]
    rates: list[float | None] = field(init=False)

    def __post_init__(self):
        self.rates = compute_rates(self.errors)

    @property
    def rows(self):
        return list(zip(self.resolutions, self.errors, self.rates))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([self.label, "error", "rate"])
        for res, err, rate in self.rows:
            w.writerow([res, repr(err), "" if rate is None else repr(rate)])
        return buf.getvalue()

    def to_markdown(self) -> str:
        lines = [f"| {self.label} | error | rate |", "|---:|---:|---:|"]
        for res, err, rate in self.rows:
            lines.append(f"| {res} | {err:.4e} | {'*' if rate is None else f'{rate:.2f}'} |")
        return "\n".join(lines) + "\n"

    def render(self, fmt: str) -> str:
        if fmt == "csv":
            return self.to_csv()
        if fmt == "markdown":
            return self.to_markdown()
        raise ConfigError(f"unknown output format {fmt!r}")

    @classmethod
    def from_csv(cls, text: str) -> ConvergenceTable:
        rows = list(csv.reader(io.StringIO(text)))
        label = rows[0][0]
        table = cls(label, [int(r[0]) for r in rows[1:]], [float(r[1]) for r in rows[1:]])
        parsed = [None if r[2] == "" else float(r[2]) for r in rows[1:]]
        table.rates = parsed
        return table


@dataclass(frozen=True)
class ExperimentSpec:
    problem: ProblemSpec
    study: str  # "temporal" or "spatial"
    resolutions: tuple[int, ...]
    fixed: int  # M for temporal studies, N for spatial ones
    gamma: float | None = None
    output: str | None = None
    format: str = "csv"

    def validate(self) -> None:
        if self.study not in ("temporal", "spatial"):
            raise ConfigError(f"study must be 'temporal' or 'spatial', got {self.study!r}")
        res = list(self.resolutions)
        if len(res) < 2:
            raise ConfigError("a study needs at least two resolutions")
        if any(b != 2 * a for a, b in zip(res, res[1:])):
            raise ConfigError(f"each resolution must double the previous one: {res}")
        smallest = 2 if self.study == "temporal" else 4
        if res[0] < smallest or res[0] % 2:
            raise ConfigError(f"smallest resolution must be even and >= {smallest}, got {res[0]}")
        if self.format not in ("csv", "markdown"):
            raise ConfigError(f"format must be csv or markdown, got {self.format!r}")
        if self.fixed < (1 if self.study == "spatial" else 2):
            raise ConfigError(f"invalid fixed resolution {self.fixed}")
        try:
            self.problem.validate()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    @property
    def label(self) -> str:
        return "N" if self.study == "temporal" else "M"


def _solve_final(args) -> np.ndarray:
    problem, N, M, gamma = args
    return _final(problem, N, M, gamma)


def run_study(spec: ExperimentSpec, jobs: int = 1) -> ConvergenceTable:
    """Solve once per distinct resolution (R/2 for the first row, then every R) and tabulate."""
    spec.validate()
    p = spec.problem
    levels = [spec.resolutions[0] // 2, *spec.resolutions]
    if spec.study == "temporal":
        tasks = [(p, r, spec.fixed, spec.gamma) for r in levels]
    else:
        tasks = [(p, spec.fixed, r, spec.gamma) for r in levels]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            finals = list(pool.map(_solve_final, tasks))
    else:
        finals = [_solve_final(t) for t in tasks]
    errors = []
    for i, r in enumerate(spec.resolutions):
        coarse, fine = finals[i], finals[i + 1]
        if spec.study == "temporal":
            mesh = SpatialMesh(p.dim, spec.fixed, p.length_x, p.length_y)
            errors.append(_l2_weighted(mesh, fine - coarse))
        else:
            mesh = SpatialMesh(p.dim, r // 2, p.length_x, p.length_y)
            errors.append(_l2_weighted(mesh, mesh.restrict_from_fine(fine) - coarse))
        log.info("%s=%d error=%.6e", spec.label, r, errors[-1])
    table = ConvergenceTable(spec.label, list(spec.resolutions), errors)
    if spec.output:
        Path(spec.output).write_text(table.render(spec.format))
    return table


# ---------------------------------------------------------------------------
# configuration files

CONFIG_KEYS = {
    "sigma", "beta", "gamma", "kernel.type", "kernel.coefficient", "kernel.tempering",
    "mu1", "mu2", "dim", "length_x", "length_y", "T", "u0", "f", "study",
    "fixed_M", "fixed_N", "resolutions", "output", "format",
}


def parse_config(text: str) -> dict[str, str]:
    """Flat ``key = value`` lines; ``#`` starts a comment, quotes around values are optional."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in out:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        if len(value) >= 2 and value[0] == value[-1] and value[0] in "\"'":
            value = value[1:-1]
        out[key] = value
    return out


def _num(cfg, key, default=None, cast=float):
    if key not in cfg:
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        return default
    try:
        return cast(cfg[key])
    except ValueError:
        raise ConfigError(f"key {key!r}: cannot parse {cfg[key]!r}") from None


def spec_from_config(cfg: dict[str, str]) -> ExperimentSpec:
    study = cfg.get("study")
    if study is None:
        raise ConfigError("missing required key 'study'")
    fixed_key = "fixed_M" if study == "temporal" else "fixed_N"
    other = "fixed_N" if study == "temporal" else "fixed_M"
    if other in cfg:
        raise ConfigError(f"{other!r} does not apply to a {study} study")
    beta = _num(cfg, "beta")
    ktype = cfg.get("kernel.type", "power")
    coef = _num(cfg, "kernel.coefficient", 1.0)
    try:
        if ktype == "power":
            kernel = SignedPowerLaw(coef, beta)
        elif ktype == "tempered":
            kernel = TemperedPowerLaw(coef, beta, _num(cfg, "kernel.tempering", 1.0))
        else:
            raise ConfigError(f"kernel.type must be 'power' or 'tempered', got {ktype!r}")
        problem = ProblemSpec(
            sigma=_num(cfg, "sigma"),
            kernel=kernel,
            mu1=_num(cfg, "mu1", 1.0),
            mu2=_num(cfg, "mu2", 1.0),
            u0=cfg.get("u0", "zero"),
            f=cfg.get("f", "zero"),
            dim=_num(cfg, "dim", 1, int),
            length_x=_num(cfg, "length_x", 1.0),
            length_y=_num(cfg, "length_y", 1.0),
            T=_num(cfg, "T", 1.0),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    try:
        resolutions = tuple(int(s) for s in cfg.get("resolutions", "").replace(",", " ").split())
    except ValueError:
        raise ConfigError(f"cannot parse resolutions {cfg.get('resolutions')!r}") from None
    spec = ExperimentSpec(
        problem=problem,
        study=study,
        resolutions=resolutions,
        fixed=_num(cfg, fixed_key, cast=int),
        gamma=_num(cfg, "gamma", cast=float) if "gamma" in cfg else None,
        output=cfg.get("output"),
        format=cfg.get("format", "csv"),
    )
    spec.validate()
    for name in (problem.u0, problem.f):
        if name not in FUNCTION_PRESETS:
            raise ConfigError(f"unknown function preset {name!r}; choose from {sorted(FUNCTION_PRESETS)}")
    return spec


def load_config(path) -> ExperimentSpec:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return spec_from_config(parse_config(text))


# ---------------------------------------------------------------------------
# presets for the three reference experiments

def _tag(x: float) -> str:
    return f"{x:g}".replace(".", "")


_PAIRS_1D = {0.2: (0.1, 0.2), 0.4: (0.3, 0.6), 0.7: (0.5, 0.8)}
_PAIRS_2D = {0.2: (0.1, 0.2), 0.4: (0.25, 0.55), 0.6: (0.3, 0.6)}


def _build_presets() -> dict[str, ExperimentSpec]:
    presets = {}
    for example in (1, 2, 3):
        pairs = _PAIRS_2D if example == 3 else _PAIRS_1D
        for sigma, betas in pairs.items():
            for beta in betas:
                if example == 1:
                    problem = ProblemSpec(sigma, SignedPowerLaw(1.0, beta), 1.0, 1.0, "sin_pi_x", "one")
                    temporal = ((128, 256, 512, 1024) if sigma == 0.2 else (512, 1024, 2048, 4096), 32)
                    spatial = ((64, 128, 256, 512), 256)
                elif example == 2:
                    problem = ProblemSpec(sigma, TemperedPowerLaw(1.0, beta, 1.0), 1.0, 1.0, "sin_pi_x", "zero")
                    temporal = ((64, 128, 256, 512), 32)
                    spatial = ((64, 128, 256, 512), 128)
                else:
                    problem = ProblemSpec(sigma, SignedPowerLaw(-1.0, beta), 1.0, 0.0, "zero", "one", dim=2)
                    temporal = ((64, 128, 256, 512), 16)
                    spatial = ((8, 16, 32, 64), 32)
                stem = f"sigma{_tag(sigma)}-beta{_tag(beta)}"
                presets[f"example{example}-t-{stem}"] = ExperimentSpec(problem, "temporal", *temporal)
                presets[f"example{example}-s-{stem}"] = ExperimentSpec(problem, "spatial", *spatial)
    return presets


PRESETS = _build_presets()


def get_preset(name: str, output: str | None = None, fmt: str | None = None) -> ExperimentSpec:
    try:
        spec = PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; run 'memfrac presets' for the list") from None
    changes = {}
    if output is not None:
        changes["output"] = output
    if fmt is not None:
        changes["format"] = fmt
    return replace(spec, **changes) if changes else spec
