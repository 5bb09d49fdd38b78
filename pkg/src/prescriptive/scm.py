"""Structural causal models with known ground truth, and the datasets sampled from them.

Two kinds of model are supported:

* ``tabular`` -- a finite set of covariate cells. Each cell carries a
  probability mass, a treatment propensity and the outcome probability under
  control and under treatment, so every causal quantity is an exact finite sum.
* ``linear`` -- standard-normal features with logistic propensity, baseline
  outcome and effect functions. Population quantities need Monte Carlo.

Sampled datasets keep both potential outcomes, so any policy can be scored
exactly against them.
"""
from __future__ import annotations

import csv
import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Mapping, Sequence

import numpy as np

from prescriptive.errors import InvalidConfig, MissingCounterfactuals, UnknownCell, UnsupportedKind

HIGHER_IS_BETTER = "higher_is_better"
LOWER_IS_BETTER = "lower_is_better"
OUTCOME_DIRECTIONS = (HIGHER_IS_BETTER, LOWER_IS_BETTER)

MASS_TOLERANCE = 1e-12


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * np.asarray(z, dtype=np.float64)))


@dataclass(frozen=True)
class CovariateCell:
    """One stratum of a tabular model."""

    name: str
    mass: float
    p_outcome_control: float
    p_outcome_treated: float
    # treat probability in observational mode; ignored under rct
    propensity: float | None = None
    values: Mapping[str, str] = field(default_factory=dict, hash=False)

    @property
    def effect(self) -> float:
        return self.p_outcome_treated - self.p_outcome_control


@dataclass(frozen=True)
class ScmConfig:
    kind: str = "tabular"
    cells: tuple[CovariateCell, ...] = ()
    mode: str = "rct"
    p_treat: float = 0.5
    outcome_direction: str = HIGHER_IS_BETTER
    noise_feature_count: int = 0
    # linear kind only
    feature_count: int = 0
    propensity_coef: tuple[float, ...] = ()
    propensity_intercept: float = 0.0
    outcome_coef: tuple[float, ...] = ()
    outcome_intercept: float = 0.0
    effect_coef: tuple[float, ...] = ()
    effect_intercept: float = 0.0
    allow_positivity_violation: bool = False
    name: str = ""

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["cells"] = [dict(c, values=dict(c["values"])) for c in d["cells"]]
        for key in ("propensity_coef", "outcome_coef", "effect_coef"):
            d[key] = list(d[key])
        return d

    @classmethod
    def from_dict(cls, data: Mapping) -> "ScmConfig":
        data = dict(data)
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise InvalidConfig(f"unknown config fields: {sorted(unknown)}")
        cell_fields = {f.name for f in dataclasses.fields(CovariateCell)}
        cells = []
        for raw in data.get("cells", ()):
            bad = set(raw) - cell_fields
            if bad:
                raise InvalidConfig(f"unknown cell fields: {sorted(bad)}")
            cells.append(CovariateCell(**{**raw, "values": dict(raw.get("values", {}))}))
        data["cells"] = tuple(cells)
        for key in ("propensity_coef", "outcome_coef", "effect_coef"):
            data[key] = tuple(float(v) for v in data.get(key, ()))
        return cls(**data)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ScmConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise InvalidConfig(f"config is not valid JSON: {exc}") from exc
        return cls.from_dict(data)


def _check_prob(value, what, open_interval=False):
    if value is None or not np.isfinite(value):
        raise InvalidConfig(f"{what} must be a finite probability, got {value!r}")
    if open_interval and not 0.0 < value < 1.0:
        raise InvalidConfig(f"{what} must lie in (0, 1), got {value}")
    if not 0.0 <= value <= 1.0:
        raise InvalidConfig(f"{what} must lie in [0, 1], got {value}")


def _validate(config: ScmConfig) -> None:
    if config.outcome_direction not in OUTCOME_DIRECTIONS:
        raise InvalidConfig(f"unknown outcome_direction {config.outcome_direction!r}")
    if config.mode not in ("rct", "observational"):
        raise InvalidConfig(f"unknown mode {config.mode!r}")
    if config.noise_feature_count < 0:
        raise InvalidConfig("noise_feature_count must be non-negative")
    if config.mode == "rct":
        _check_prob(config.p_treat, "p_treat", open_interval=True)

    if config.kind == "tabular":
        if not config.cells:
            raise InvalidConfig("a tabular model needs at least one cell")
        names = [c.name for c in config.cells]
        if len(set(names)) != len(names):
            raise InvalidConfig("cell names must be unique")
        masses = np.array([c.mass for c in config.cells], dtype=np.float64)
        if not np.all(np.isfinite(masses)) or np.any(masses < 0):
            raise InvalidConfig("cell masses must be finite and non-negative")
        if abs(masses.sum() - 1.0) > MASS_TOLERANCE:
            raise InvalidConfig(f"cell masses sum to {masses.sum()!r}, expected 1")
        for c in config.cells:
            _check_prob(c.p_outcome_control, f"cell {c.name!r} p_outcome_control")
            _check_prob(c.p_outcome_treated, f"cell {c.name!r} p_outcome_treated")
            if config.mode == "observational":
                _check_prob(
                    c.propensity,
                    f"cell {c.name!r} propensity",
                    open_interval=not config.allow_positivity_violation,
                )
    elif config.kind == "linear":
        d = config.feature_count
        if d < 1:
            raise InvalidConfig("a linear model needs feature_count >= 1")
        for key in ("outcome_coef", "effect_coef") + (
            ("propensity_coef",) if config.mode == "observational" else ()
        ):
            coef = getattr(config, key)
            if len(coef) != d:
                raise InvalidConfig(f"{key} has length {len(coef)}, expected {d}")
            if not np.all(np.isfinite(coef)):
                raise InvalidConfig(f"{key} must be finite")
    else:
        raise InvalidConfig(f"unknown kind {config.kind!r}")


class SCM:
    """A validated, immutable structural causal model. Build with :func:`build_scm`."""

    def __init__(self, config: ScmConfig):
        _validate(config)
        self._config = config
        if config.kind == "tabular":
            self._masses = np.array([c.mass for c in config.cells])
            self._p0 = np.array([c.p_outcome_control for c in config.cells])
            self._p1 = np.array([c.p_outcome_treated for c in config.cells])
            if config.mode == "rct":
                self._e = np.full(len(config.cells), config.p_treat)
            else:
                self._e = np.array([c.propensity for c in config.cells], dtype=np.float64)
            for arr in (self._masses, self._p0, self._p1, self._e):
                arr.flags.writeable = False

    @property
    def config(self) -> ScmConfig:
        return self._config

    @property
    def kind(self) -> str:
        return self._config.kind

    @property
    def outcome_direction(self) -> str:
        return self._config.outcome_direction

    @property
    def cell_names(self) -> tuple[str, ...]:
        return tuple(c.name for c in self._config.cells)

    @property
    def feature_count(self) -> int:
        if self.kind == "tabular":
            return len(self._config.cells) + self._config.noise_feature_count
        return self._config.feature_count + self._config.noise_feature_count

    @property
    def n_categorical(self) -> int:
        return len(self._config.cells) if self.kind == "tabular" else 0

    @property
    def feature_names(self) -> tuple[str, ...]:
        if self.kind == "tabular":
            base = [f"cell={name}" for name in self.cell_names]
        else:
            base = [f"z{i}" for i in range(self._config.feature_count)]
        noise = [f"noise{i}" for i in range(self._config.noise_feature_count)]
        return tuple(base + noise)

    def _cell_index(self, cell) -> int:
        if isinstance(cell, str):
            try:
                return self.cell_names.index(cell)
            except ValueError:
                raise UnknownCell(cell) from None
        if isinstance(cell, (int, np.integer)) and 0 <= cell < len(self._config.cells):
            return int(cell)
        raise UnknownCell(cell)

    def cell_of(self, features) -> np.ndarray:
        """Cell index of each row of a tabular feature matrix (argmax of the one-hot block)."""
        X = np.atleast_2d(np.asarray(features, dtype=np.float64))
        return np.argmax(X[:, : self.n_categorical], axis=1)

    # --- exact population quantities -------------------------------------------------

    def true_ate(self) -> float:
        if self.kind != "tabular":
            raise UnsupportedKind("exact ATE needs a tabular model; use monte_carlo_ate")
        return float(np.sum(self._masses * (self._p1 - self._p0)))

    def true_ite(self, cell_or_features) -> float:
        """Exact effect for a cell (name or index) of a tabular model, or a feature point of a linear one."""
        if self.kind == "tabular":
            i = self._cell_index(cell_or_features)
            return float(self._p1[i] - self._p0[i])
        x = np.asarray(cell_or_features, dtype=np.float64)
        p0, p1 = self._linear_outcome_probs(x[None, :])
        return float(p1[0] - p0[0])

    def mean_potential_outcome(self, treatment: int) -> float:
        """Exact E[Y(t)] for a tabular model."""
        if self.kind != "tabular":
            raise UnsupportedKind("exact potential-outcome means need a tabular model")
        p = self._p1 if treatment else self._p0
        return float(np.sum(self._masses * p))

    def naive_contrast(self) -> float:
        """Exact E[Y|T=1] - E[Y|T=0] under the model's assignment mechanism."""
        if self.kind != "tabular":
            raise UnsupportedKind("exact naive contrast needs a tabular model")
        m, e = self._masses, self._e
        treated = np.sum(m * e)
        control = np.sum(m * (1.0 - e))
        return float(np.sum(m * e * self._p1) / treated - np.sum(m * (1.0 - e) * self._p0) / control)

    # --- per-unit functions ------------------------------------------------------------

    def _linear_outcome_probs(self, X):
        c = self._config
        d = c.feature_count
        base = X[:, :d] @ np.asarray(c.outcome_coef) + c.outcome_intercept
        shift = X[:, :d] @ np.asarray(c.effect_coef) + c.effect_intercept
        return _sigmoid(base), _sigmoid(base + shift)

    def outcome_probabilities(self, features) -> tuple[np.ndarray, np.ndarray]:
        """Exact (P(Y=1|x,T=0), P(Y=1|x,T=1)) for each feature row."""
        X = np.atleast_2d(np.asarray(features, dtype=np.float64))
        if self.kind == "tabular":
            idx = self.cell_of(X)
            return self._p0[idx], self._p1[idx]
        return self._linear_outcome_probs(X)

    def outcome_model(self):
        """Oracle outcome model ``mu(X, t)`` suitable for doubly robust evaluation."""

        def mu(X, t):
            p0, p1 = self.outcome_probabilities(X)
            return np.where(np.asarray(t) == 1, p1, p0)

        return mu

    def propensity(self, features) -> np.ndarray:
        X = np.atleast_2d(np.asarray(features, dtype=np.float64))
        c = self._config
        if c.mode == "rct":
            return np.full(X.shape[0], c.p_treat)
        if self.kind == "tabular":
            return self._e[self.cell_of(X)]
        d = c.feature_count
        return _sigmoid(X[:, :d] @ np.asarray(c.propensity_coef) + c.propensity_intercept)

    # --- sampling ------------------------------------------------------------------------

    def sample(self, n: int, seed: int) -> "Dataset":
        if n < 1:
            raise ValueError(f"n must be at least 1, got {n}")
        c = self._config
        rng = np.random.default_rng(seed)
        if self.kind == "tabular":
            k = len(c.cells)
            cum = np.cumsum(self._masses)
            cum[-1] = 1.0
            cell = np.searchsorted(cum, rng.random(n), side="right")
            cell = np.minimum(cell, k - 1)
            noise = rng.standard_normal((n, c.noise_feature_count))
            X = np.zeros((n, k + c.noise_feature_count))
            X[np.arange(n), cell] = 1.0
            X[:, k:] = noise
            e = self._e[cell]
            p0, p1 = self._p0[cell], self._p1[cell]
        else:
            X = rng.standard_normal((n, c.feature_count + c.noise_feature_count))
            e = self.propensity(X)
            p0, p1 = self._linear_outcome_probs(X)
        treatment = (rng.random(n) < e).astype(np.int64)
        # one shared uniform per unit couples the potential outcomes comonotonically
        u = rng.random(n)
        y0 = (u < p0).astype(np.int64)
        y1 = (u < p1).astype(np.int64)
        outcome = np.where(treatment == 1, y1, y0)
        return Dataset(
            unit_id=np.arange(n, dtype=np.int64),
            features=X,
            treatment=treatment,
            outcome=outcome,
            propensity_true=np.asarray(e, dtype=np.float64),
            y0=y0,
            y1=y1,
            tau_true=np.asarray(p1 - p0, dtype=np.float64),
            feature_names=self.feature_names,
            n_categorical=self.n_categorical,
            outcome_direction=c.outcome_direction,
        )


def build_scm(config: ScmConfig) -> SCM:
    """Validate ``config`` and return an immutable model. Raises :class:`InvalidConfig`."""
    return SCM(config)


def sample_dataset(scm: SCM, n: int, seed: int) -> "Dataset":
    return scm.sample(n, seed)


def true_ate(scm: SCM) -> float:
    return scm.true_ate()


def true_ite(scm: SCM, cell_or_features) -> float:
    return scm.true_ite(cell_or_features)


def monte_carlo_ate(scm: SCM, n_samples: int, seed: int) -> float:
    """Population ATE estimated from the outcome-probability gap on sampled features."""
    ds = scm.sample(n_samples, seed)
    return float(ds.tau_true.mean())


# --- presets ------------------------------------------------------------------------------


def simpson_preset() -> ScmConfig:
    """Engagement confounds targeting and churn; the raw contrast has the wrong sign.

    Engaged customers (half the population) rarely get targeted and rarely
    churn; disengaged ones are targeted often and churn often. Targeting lowers
    churn by 5 points in both strata.
    """
    return ScmConfig(
        kind="tabular",
        name="simpson",
        mode="observational",
        outcome_direction=LOWER_IS_BETTER,
        cells=(
            CovariateCell("engaged", 0.5, 0.10, 0.05, propensity=0.2, values={"engagement": "high"}),
            CovariateCell("disengaged", 0.5, 0.60, 0.55, propensity=0.8, values={"engagement": "low"}),
        ),
    )


FOUR_SEGMENTS = ("persuadable", "sure_thing", "lost_cause", "sleeping_dog")


def four_segment_preset() -> ScmConfig:
    """The four retention segments under a 50/50 randomized trial; outcome is 'retained'."""
    probs = {
        "persuadable": (0.4, 0.7),
        "sure_thing": (0.9, 0.9),
        "lost_cause": (0.1, 0.1),
        "sleeping_dog": (0.8, 0.5),
    }
    return ScmConfig(
        kind="tabular",
        name="four_segment",
        mode="rct",
        p_treat=0.5,
        outcome_direction=HIGHER_IS_BETTER,
        noise_feature_count=2,
        cells=tuple(
            CovariateCell(name, 0.25, p0, p1, values={"segment": name})
            for name, (p0, p1) in probs.items()
        ),
    )


def null_preset(p: float = 0.5, p_treat: float = 0.5, noise_feature_count: int = 2) -> ScmConfig:
    """Single-cell randomized model with no treatment effect."""
    return ScmConfig(
        kind="tabular",
        name="null",
        mode="rct",
        p_treat=p_treat,
        noise_feature_count=noise_feature_count,
        cells=(CovariateCell("all", 1.0, p, p),),
    )


def with_positivity_violation(config: ScmConfig, cell: str, propensity: float = 0.0) -> ScmConfig:
    """Copy of a tabular config where ``cell`` is never (0.0) or always (1.0) treated."""
    if cell not in [c.name for c in config.cells]:
        raise UnknownCell(cell)
    base = config.p_treat if config.mode == "rct" else None
    cells = tuple(
        dataclasses.replace(
            c,
            propensity=propensity if c.name == cell else (base if base is not None else c.propensity),
        )
        for c in config.cells
    )
    return dataclasses.replace(config, cells=cells, mode="observational", allow_positivity_violation=True)


PRESETS = {
    "simpson": simpson_preset,
    "four_segment": four_segment_preset,
    "null": null_preset,
}


# --- datasets -----------------------------------------------------------------------------


@dataclass(frozen=True)
class UnitRecord:
    unit_id: int
    features: np.ndarray
    treatment: int
    outcome_observed: int
    propensity_true: float | None = None
    y0: int | None = None
    y1: int | None = None
    tau_true: float | None = None


def _frozen(arr, dtype):
    if arr is None:
        return None
    out = np.array(arr, dtype=dtype, copy=True)
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class Dataset:
    """Column-oriented collection of unit records in generation order.

    The counterfactual columns (``propensity_true``, ``y0``, ``y1``,
    ``tau_true``) are present only for synthetic data.
    """

    unit_id: np.ndarray
    features: np.ndarray
    treatment: np.ndarray
    outcome: np.ndarray
    propensity_true: np.ndarray | None = None
    y0: np.ndarray | None = None
    y1: np.ndarray | None = None
    tau_true: np.ndarray | None = None
    feature_names: tuple[str, ...] = ()
    n_categorical: int = 0
    outcome_direction: str = HIGHER_IS_BETTER

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "unit_id", _frozen(self.unit_id, np.int64))
        X = np.array(self.features, dtype=np.float64, copy=True)
        if X.ndim == 1:
            X = X.reshape(len(self.unit_id), -1)
        X.flags.writeable = False
        set_(self, "features", X)
        for name in ("treatment", "outcome", "y0", "y1"):
            set_(self, name, _frozen(getattr(self, name), np.int64))
        for name in ("propensity_true", "tau_true"):
            set_(self, name, _frozen(getattr(self, name), np.float64))
        n = len(self.unit_id)
        for name in ("treatment", "outcome", "propensity_true", "y0", "y1", "tau_true"):
            col = getattr(self, name)
            if col is not None and col.shape != (n,):
                raise ValueError(f"column {name} has shape {col.shape}, expected ({n},)")
        if X.shape[0] != n:
            raise ValueError(f"features have {X.shape[0]} rows, expected {n}")
        if n > 1 and not np.all(np.diff(self.unit_id) > 0):
            raise ValueError("unit_id must be unique and strictly increasing")
        if not self.feature_names:
            set_(self, "feature_names", tuple(f"x{i}" for i in range(X.shape[1])))
        elif len(self.feature_names) != X.shape[1]:
            raise ValueError("feature_names length does not match the feature count")
        if self.outcome_direction not in OUTCOME_DIRECTIONS:
            raise ValueError(f"unknown outcome_direction {self.outcome_direction!r}")

    def __len__(self) -> int:
        return len(self.unit_id)

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def provenance(self) -> str:
        full = all(
            getattr(self, name) is not None for name in ("propensity_true", "y0", "y1", "tau_true")
        )
        return "synthetic_full" if full else "observational_logged"

    def require_counterfactuals(self) -> None:
        if self.y0 is None or self.y1 is None:
            raise MissingCounterfactuals("dataset carries no potential outcomes")

    def strata(self) -> np.ndarray | None:
        """Stratum index per unit from the leading one-hot block, or None."""
        if self.n_categorical == 0:
            return None
        return np.argmax(self.features[:, : self.n_categorical], axis=1)

    def records(self) -> Iterator[UnitRecord]:
        full = self.provenance == "synthetic_full"
        for i in range(len(self)):
            yield UnitRecord(
                unit_id=int(self.unit_id[i]),
                features=self.features[i],
                treatment=int(self.treatment[i]),
                outcome_observed=int(self.outcome[i]),
                propensity_true=float(self.propensity_true[i]) if full else None,
                y0=int(self.y0[i]) if full else None,
                y1=int(self.y1[i]) if full else None,
                tau_true=float(self.tau_true[i]) if full else None,
            )

    def subset(self, mask) -> "Dataset":
        mask = np.asarray(mask)
        pick = lambda col: None if col is None else col[mask]  # noqa: E731
        return dataclasses.replace(
            self,
            unit_id=self.unit_id[mask],
            features=self.features[mask],
            treatment=self.treatment[mask],
            outcome=self.outcome[mask],
            propensity_true=pick(self.propensity_true),
            y0=pick(self.y0),
            y1=pick(self.y1),
            tau_true=pick(self.tau_true),
        )

    def logged(self) -> "Dataset":
        """The same units with every counterfactual column removed."""
        return dataclasses.replace(self, propensity_true=None, y0=None, y1=None, tau_true=None)

    def equals(self, other: "Dataset") -> bool:
        if not isinstance(other, Dataset):
            return False
        for name in ("unit_id", "features", "treatment", "outcome", "propensity_true", "y0", "y1", "tau_true"):
            a, b = getattr(self, name), getattr(other, name)
            if (a is None) != (b is None):
                return False
            if a is not None and not (a.shape == b.shape and np.array_equal(a, b)):
                return False
        return (self.feature_names, self.n_categorical, self.outcome_direction) == (
            other.feature_names,
            other.n_categorical,
            other.outcome_direction,
        )

    # --- CSV -------------------------------------------------------------------------------

    def csv_header(self) -> list[str]:
        header = ["unit_id", "treatment", "outcome"] + [f"x{i}" for i in range(self.n_features)]
        if self.provenance == "synthetic_full":
            header += ["propensity_true", "y0", "y1", "tau_true"]
        return header

    def to_csv(self, path) -> None:
        full = self.provenance == "synthetic_full"
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(",".join(self.csv_header()) + "\n")
            for i in range(len(self)):
                row = [str(self.unit_id[i]), str(self.treatment[i]), str(self.outcome[i])]
                row += [format(v, ".17g") for v in self.features[i]]
                if full:
                    row += [
                        format(self.propensity_true[i], ".17g"),
                        str(self.y0[i]),
                        str(self.y1[i]),
                        format(self.tau_true[i], ".17g"),
                    ]
                fh.write(",".join(row) + "\n")

    @classmethod
    def from_csv(
        cls,
        path,
        outcome_direction: str = HIGHER_IS_BETTER,
        n_categorical: int | None = None,
    ) -> "Dataset":
        with open(path, encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise ValueError(f"{path}: empty CSV") from None
            rows = list(reader)
        if header[:3] != ["unit_id", "treatment", "outcome"]:
            raise ValueError(f"{path}: header must start with unit_id,treatment,outcome")
        extra = ["propensity_true", "y0", "y1", "tau_true"]
        full = header[-4:] == extra
        feat_cols = header[3 : len(header) - (4 if full else 0)]
        if feat_cols != [f"x{i}" for i in range(len(feat_cols))]:
            raise ValueError(f"{path}: feature columns must be x0..x(d-1)")
        data = np.array(rows, dtype=np.float64).reshape(len(rows), len(header))
        d = len(feat_cols)
        X = data[:, 3 : 3 + d]
        if n_categorical is None:
            n_categorical = _detect_one_hot_prefix(X)
        kwargs = {}
        if full:
            kwargs = dict(
                propensity_true=data[:, 3 + d],
                y0=data[:, 4 + d].astype(np.int64),
                y1=data[:, 5 + d].astype(np.int64),
                tau_true=data[:, 6 + d],
            )
        return cls(
            unit_id=data[:, 0].astype(np.int64),
            features=X,
            treatment=data[:, 1].astype(np.int64),
            outcome=data[:, 2].astype(np.int64),
            n_categorical=n_categorical,
            outcome_direction=outcome_direction,
            **kwargs,
        )


def _detect_one_hot_prefix(X: np.ndarray) -> int:
    """Width of the longest leading block of 0/1 columns whose rows each sum to one."""
    if X.shape[0] == 0:
        return 0
    k = 0
    while k < X.shape[1] and np.all((X[:, k] == 0) | (X[:, k] == 1)):
        k += 1
    while k > 1:
        if np.all(X[:, :k].sum(axis=1) == 1):
            return k
        k -= 1
    return 0


def load_config(path) -> ScmConfig:
    return ScmConfig.from_json(Path(path).read_text(encoding="utf-8"))


def config_from_name_or_path(preset: str | None, config_path: str | None) -> ScmConfig:
    if config_path:
        return load_config(config_path)
    if preset not in PRESETS:
        raise InvalidConfig(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
    return PRESETS[preset]()


__all__: Sequence[str] = (
    "CovariateCell",
    "Dataset",
    "FOUR_SEGMENTS",
    "HIGHER_IS_BETTER",
    "LOWER_IS_BETTER",
    "SCM",
    "ScmConfig",
    "UnitRecord",
    "build_scm",
    "four_segment_preset",
    "monte_carlo_ate",
    "null_preset",
    "sample_dataset",
    "simpson_preset",
    "true_ate",
    "true_ite",
    "with_positivity_violation",
)
