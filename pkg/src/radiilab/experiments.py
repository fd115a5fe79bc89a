"""Experiment runners binding the library modules behind the CLI.

Each experiment has a *prepare* step that consumes and validates every config
key (so a dry run can report exactly what would happen) and an *execute* step
that does the numerical work and emits rows.  Results carry the main table,
optional companion tables (fits, per-center profiles), extra header notes,
and an optional figure callback used when plotting is requested.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .circumsphere import circumsphere
from .config import ExperimentConfig, ParamReader, spec_from_reader
from .errors import InputError, ResourceError
from .incidence import (
    IncidenceQuery,
    PairSearchGrid,
    adversarial_conditional_profile,
    depth_for_epsilon,
    incidence_statistic,
)
from .intersection import dilation_set, intersection_dimension, radii_set_measure
from .measures import (
    DiscreteMeasure,
    Interval,
    ProductSpec,
    SetSpec,
    count_atoms,
    lattice_interval_product,
    realize,
    realize_factors,
    two_piece_cantor,
)
from .scaling import ScalingFit, fit_scaling_exponent
from .spectral import (
    configuration_ft,
    decay_envelope_fit,
    energy_integral,
    measure_ft,
    sphere_surface_ft,
)
from .seeding import spawn_generator

DEFAULT_EPSILONS = [2.0**-k for k in range(4, 13)]
ATOM_BUDGET = 5_000_000

FIT_COLUMNS = ["slope", "intercept", "r_squared", "n_points"]


@dataclass
class ExperimentResult:
    columns: list[str]
    rows: list[tuple]
    extra: dict[str, tuple[list[str], list[tuple]]] = field(default_factory=dict)
    notes: dict[str, str] = field(default_factory=dict)
    figure: Callable | None = None


def _fit_rows(fit: ScalingFit) -> list[tuple]:
    return [(fit.slope, fit.intercept, fit.r_squared, fit.n_points)]


def _auto_mc_budget(eps: float) -> int:
    return int(min(4e7, max(1e6, round(2000.0 / eps))))


# ---------------------------------------------------------------------------
# radius
# ---------------------------------------------------------------------------
def prepare_radius(cfg: ExperimentConfig, reader: ParamReader) -> dict:
    path = reader.require("input")
    return {"input": path, "info": {"input": path}}


def execute_radius(plan: dict, cfg: ExperimentConfig, threads: int) -> ExperimentResult:
    tuples = []
    with open(plan["input"]) as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            values = [float(p) for p in line.split(",")]
            tuples.append(values)
    if not tuples:
        raise InputError(f"no coordinate rows in {plan['input']}")
    length = len(tuples[0])
    # rows carry (d+1)*d coordinates
    d = int(round((-1 + math.sqrt(1 + 4 * length)) / 2))
    if d * (d + 1) != length or d < 2:
        raise InputError(
            f"row length {length} does not match (d+1)*d for any dimension d >= 2"
        )
    columns = ["radius", "degenerate"] + [f"center_{i+1}" for i in range(d)]
    rows = []
    radii = []
    for values in tuples:
        if len(values) != length:
            raise InputError("all rows must have the same number of coordinates")
        ct = circumsphere(np.asarray(values).reshape(d + 1, d))
        center = ct.center if ct.center is not None else [float("nan")] * d
        rows.append((ct.radius, ct.degenerate, *center))
        radii.append(ct.radius)

    def figure(path):
        from . import plotting

        plotting.save_histogram(path, radii, "circumradius", "radius distribution")

    return ExperimentResult(columns, rows, notes={"dimension": str(d)}, figure=figure)


# ---------------------------------------------------------------------------
# incidence
# ---------------------------------------------------------------------------
def prepare_incidence(cfg: ExperimentConfig, reader: ParamReader) -> dict:
    spec = spec_from_reader(reader)
    t = reader.require("t", "float")
    epsilons = sorted(reader.get_grid("epsilons", DEFAULT_EPSILONS), reverse=True)
    mode = reader.get_str("mode", "monte-carlo")
    if mode not in ("exhaustive", "monte-carlo"):
        raise InputError("mode must be 'exhaustive' or 'monte-carlo'")
    budget_raw = reader.get_str("budget", "auto")
    depth = reader.get_int("depth")
    depths = {
        eps: (depth if depth is not None else depth_for_epsilon(spec, eps))
        for eps in epsilons
    }
    atoms = {eps: count_atoms(spec, d) for eps, d in depths.items()}
    info = {
        "mode": mode,
        "t": t,
        "epsilon_count": len(epsilons),
        "max_depth": max(depths.values()),
        "max_atoms": max(atoms.values()),
    }
    if mode == "exhaustive":
        arity = spec.ndim + 1
        info["max_tuples"] = max(a**arity for a in atoms.values())
    return {
        "spec": spec,
        "t": t,
        "epsilons": epsilons,
        "mode": mode,
        "budget_raw": budget_raw,
        "depths": depths,
        "info": info,
    }


def _measure_for(spec: SetSpec, depth: int, mode: str):
    """Factored axes for Monte-Carlo product sampling, else materialized."""
    if mode == "monte-carlo" and isinstance(spec, ProductSpec):
        for f in spec.factors:
            if count_atoms(f, depth) > ATOM_BUDGET:
                raise ResourceError(
                    f"factor of the product needs more than {ATOM_BUDGET} atoms at depth {depth}"
                )
        return realize_factors(spec, depth)
    return realize(spec, depth, budget=ATOM_BUDGET)


def execute_incidence(plan: dict, cfg: ExperimentConfig, threads: int) -> ExperimentResult:
    rows = []
    for eps in plan["epsilons"]:
        depth = plan["depths"][eps]
        measure = _measure_for(plan["spec"], depth, plan["mode"])
        if plan["budget_raw"] == "auto":
            budget = _auto_mc_budget(eps) if plan["mode"] == "monte-carlo" else 20_000_000
        else:
            budget = int(float(plan["budget_raw"]))
        query = IncidenceQuery(
            t=plan["t"], epsilon=eps, mode=plan["mode"], budget=budget, seed=cfg.seed
        )
        est, err = incidence_statistic(measure, query, threads=threads)
        if plan["mode"] == "exhaustive":
            n = len(measure)
            evaluated = n ** (plan["spec"].ndim + 1)
        else:
            evaluated = budget
        rows.append((eps, est, err, plan["mode"], depth, evaluated))

    positive = [(r[0], r[1], r[2]) for r in rows if r[1] > 0]
    fit = fit_scaling_exponent(positive) if len(positive) >= 3 else None
    columns = ["epsilon", "estimate", "stderr", "mode", "depth", "tuples_evaluated"]
    extra = {"fit": (FIT_COLUMNS, _fit_rows(fit))} if fit is not None else {}

    def figure(path):
        from . import plotting

        plotting.save_scaling_figure(
            path,
            [(r[0], r[1]) for r in rows],
            fit,
            xlabel="epsilon",
            ylabel="incidence mass",
            title=f"incidence scaling at t={plan['t']}",
        )

    return ExperimentResult(columns, rows, extra=extra, figure=figure)


# ---------------------------------------------------------------------------
# sharpness
# ---------------------------------------------------------------------------
def prepare_sharpness(cfg: ExperimentConfig, reader: ParamReader) -> dict:
    if any(reader.has(k) for k in ("spec.type", "spec.file")):
        spec = spec_from_reader(reader)
        if not isinstance(spec, ProductSpec) or spec.ndim != 2:
            raise InputError("sharpness needs a 2-D product spec")
    else:
        alpha = reader.get_float("alpha", 1.0 / 3.0)
        span = reader.get_int("span", 20)
        spec = lattice_interval_product(two_piece_cantor(alpha), span)
    t = reader.get_float("t", 10.0)
    epsilons = reader.get_grid("epsilons", DEFAULT_EPSILONS)
    depth = reader.get_int("depth")
    search = PairSearchGrid(
        a_min=reader.get_float("search.a_min", PairSearchGrid.a_min),
        a_max=reader.get_float("search.a_max", PairSearchGrid.a_max),
        a_count=reader.get_int("search.a_count", PairSearchGrid.a_count),
        x_count=reader.get_int("search.x_count", PairSearchGrid.x_count),
        targets_per_extreme=reader.get_int(
            "search.targets_per_extreme", PairSearchGrid.targets_per_extreme
        ),
        bisect_iters=reader.get_int("search.bisect_iters", PairSearchGrid.bisect_iters),
        random_pairs=reader.get_int("search.random_pairs", PairSearchGrid.random_pairs),
    )
    want_global = reader.get_bool("global", False)
    global_budget = reader.get_int("global_budget", 2_000_000)
    info = {
        "t": t,
        "epsilon_count": len(epsilons),
        "max_depth": max(
            depth if depth is not None else depth_for_epsilon(spec, e) for e in epsilons
        ),
        "global": want_global,
    }
    return {
        "spec": spec,
        "t": t,
        "epsilons": epsilons,
        "depth": depth,
        "search": search,
        "global": want_global,
        "global_budget": global_budget,
        "info": info,
    }


def execute_sharpness(plan: dict, cfg: ExperimentConfig, threads: int) -> ExperimentResult:
    fit = adversarial_conditional_profile(
        plan["spec"],
        plan["t"],
        plan["epsilons"],
        plan["search"],
        depth=plan["depth"],
        seed=cfg.seed,
        threads=threads,
    )
    rows = [(eps, value) for eps, value, _ in fit.points]
    extra = {}
    if fit.defined:
        extra["fit"] = (FIT_COLUMNS, _fit_rows(fit))
    notes = {"slope_defined": str(fit.defined).lower()}

    global_rows = []
    if plan["global"]:
        for eps, _value in rows:
            depth = plan["depth"] or depth_for_epsilon(plan["spec"], eps)
            measure = _measure_for(plan["spec"], depth, "monte-carlo")
            query = IncidenceQuery(
                t=plan["t"], epsilon=eps, mode="monte-carlo",
                budget=plan["global_budget"], seed=cfg.seed,
            )
            est, err = incidence_statistic(measure, query, threads=threads)
            global_rows.append((eps, est, err))
        extra["global"] = (["epsilon", "estimate", "stderr"], global_rows)

    def figure(path):
        from . import plotting

        curves = {"adversarial profile": rows}
        if global_rows:
            curves["global statistic"] = [(e, v) for e, v, _ in global_rows]
        plotting.save_scaling_figure(
            path,
            rows,
            fit if fit.defined else None,
            xlabel="epsilon",
            ylabel="conditional mass",
            title=f"strip-pair profile at t={plan['t']}",
            extra_curves=curves,
        )

    return ExperimentResult(["epsilon", "value"], rows, extra=extra, notes=notes, figure=figure)


# ---------------------------------------------------------------------------
# fourier
# ---------------------------------------------------------------------------
def prepare_fourier(cfg: ExperimentConfig, reader: ParamReader) -> dict:
    target = reader.get_str("target", "circle")
    if target not in ("circle", "sphere", "configuration", "measure"):
        raise InputError("target must be circle, sphere, configuration, or measure")
    xi_min = reader.get_float("xi_min", 4.0)
    xi_max = reader.get_float("xi_max", 256.0)
    xi_count = reader.get_int("xi_count", 96)
    if not (0 < xi_min < xi_max) or xi_count < 2:
        raise InputError("need 0 < xi_min < xi_max and xi_count >= 2")
    plan = {
        "target": target,
        "norms": np.geomspace(xi_min, xi_max, xi_count, endpoint=False),
        "fit": reader.get_bool("fit", True),
        "info": {"target": target, "xi_count": xi_count},
    }
    if target == "configuration":
        plan["d"] = reader.get_int("d", 2)
        plan["direction"] = reader.get_str("direction", "difference")
        if plan["d"] not in (2, 3):
            raise InputError("configuration transform supports d in {2, 3}")
    elif target == "measure":
        plan["spec"] = spec_from_reader(reader)
        plan["depth"] = reader.get_int("depth", 8)
        plan["info"]["atoms"] = count_atoms(plan["spec"], plan["depth"])
    return plan


def execute_fourier(plan: dict, cfg: ExperimentConfig, threads: int) -> ExperimentResult:
    norms = plan["norms"]
    target = plan["target"]
    if target == "circle":
        values = [sphere_surface_ft(2, r) for r in norms]
    elif target == "sphere":
        values = [sphere_surface_ft(3, r) for r in norms]
    elif target == "configuration":
        values = [configuration_ft(plan["d"], r, plan["direction"]) for r in norms]
    else:
        measure = realize(plan["spec"], plan["depth"], budget=ATOM_BUDGET)
        rng = spawn_generator(cfg.seed, 11)
        values = []
        for r in norms:
            u = rng.normal(size=measure.dimension)
            u /= np.linalg.norm(u)
            values.append(measure_ft(measure, r * u))

    rows = [(r, v.real, v.imag, abs(v)) for r, v in zip(norms, values)]
    extra = {}
    fit = None
    if plan["fit"]:
        fit = decay_envelope_fit([(r, abs(v)) for r, v in zip(norms, values)])
        extra["fit"] = (FIT_COLUMNS, _fit_rows(fit))

    def figure(path):
        from . import plotting

        plotting.save_scaling_figure(
            path,
            [(r[0], r[3]) for r in rows],
            fit,
            xlabel="|xi|",
            ylabel="|transform|",
            title=f"{target} transform decay",
        )

    return ExperimentResult(
        ["xi_norm", "re", "im", "abs"], rows, extra=extra, figure=figure
    )


# ---------------------------------------------------------------------------
# energy
# ---------------------------------------------------------------------------
def prepare_energy(cfg: ExperimentConfig, reader: ParamReader) -> dict:
    spec = spec_from_reader(reader)
    s_values = reader.get_grid("s", [0.5])
    depths = [int(v) for v in reader.get_grid("depths", [8.0, 10.0, 12.0])]
    atoms = max(count_atoms(spec, d) for d in depths)
    if atoms > ATOM_BUDGET:
        raise ResourceError(f"energy needs {atoms} atoms, budget {ATOM_BUDGET}")
    return {
        "spec": spec,
        "s_values": s_values,
        "depths": depths,
        "info": {"atoms": atoms, "s_count": len(s_values), "depths": depths},
    }


def execute_energy(plan: dict, cfg: ExperimentConfig, threads: int) -> ExperimentResult:
    rows = []
    for depth in plan["depths"]:
        measure = realize(plan["spec"], depth, budget=ATOM_BUDGET)
        for s in plan["s_values"]:
            rep = energy_integral(measure, s)
            rows.append((s, depth, rep.value))

    def figure(path):
        from . import plotting

        curves = {}
        for s in plan["s_values"]:
            curves[f"s={s:g}"] = [(d, v) for ss, d, v in rows if ss == s]
        plotting.save_curves_figure(
            path, curves, xlabel="depth", ylabel="energy", title="Riesz energies",
            logy=True,
        )

    return ExperimentResult(["s", "depth", "energy"], rows, figure=figure)


# ---------------------------------------------------------------------------
# intersect
# ---------------------------------------------------------------------------
def prepare_intersect(cfg: ExperimentConfig, reader: ParamReader) -> dict:
    spec = spec_from_reader(reader)
    depth = reader.get_int("depth", 9)
    n_centers = reader.get_int("centers", 10)
    center = reader.get_grid("center") if reader.has("center") else None
    delta = reader.get_float("delta", 0.02)
    halvings = reader.get_int("delta_halvings", 2)
    threshold = reader.get_float("threshold", 0.0)
    want_dim = reader.get_bool("dimension", True)
    atoms = count_atoms(spec, depth)
    if atoms > ATOM_BUDGET:
        raise ResourceError(f"intersect needs {atoms} atoms, budget {ATOM_BUDGET}")
    return {
        "spec": spec,
        "depth": depth,
        "n_centers": n_centers,
        "center": center,
        "delta": delta,
        "halvings": halvings,
        "threshold": threshold,
        "dimension": want_dim,
        "info": {"atoms": atoms, "centers": 1 if center else n_centers, "delta": delta},
    }


def execute_intersect(plan: dict, cfg: ExperimentConfig, threads: int) -> ExperimentResult:
    measure = realize(plan["spec"], plan["depth"], budget=ATOM_BUDGET)
    if measure.resolution > plan["delta"] / 2.0**plan["halvings"]:
        raise InputError(
            "depth too shallow: the smallest halved delta falls below the resolution"
        )
    if plan["center"] is not None:
        centers = [np.asarray(plan["center"], dtype=float)]
    else:
        rng = spawn_generator(cfg.seed, 23)
        lo = measure.atoms.min(axis=0)
        hi = measure.atoms.max(axis=0)
        centers = [rng.uniform(lo, hi) for _ in range(plan["n_centers"])]

    diam = measure.diameter
    rows = []
    extra = {}
    profile_curves = {}
    for ci, a in enumerate(centers):
        for k in range(plan["halvings"] + 1):
            delta = plan["delta"] / 2.0**k
            grid = np.arange(delta, diam + delta, delta / 2.0)
            ds = dilation_set(measure, a, delta, plan["threshold"], grid)
            slope = r2 = boxes = float("nan")
            if plan["dimension"] and k == 0 and len(ds.intervals) > 0:
                r_star = float(ds.r_grid[np.argmax(ds.masses)])
                scales = [delta * 2.0**j for j in range(5)]
                try:
                    fit = intersection_dimension(measure, a, r_star, delta, scales)
                    slope, r2 = fit.slope, fit.r_squared
                    boxes = fit.points[-1][1]
                except InputError:
                    pass
            rows.append(
                (ci, delta, ds.lebesgue_estimate, len(ds.intervals), slope, r2, boxes)
            )
            if k == 0:
                profile_curves[f"center {ci}"] = list(zip(ds.r_grid, ds.masses))
                extra[f"center{ci}_profile"] = (
                    ["r", "mass"],
                    list(zip(ds.r_grid.tolist(), ds.masses.tolist())),
                )
                extra[f"center{ci}_intervals"] = (
                    ["interval_lo", "interval_hi"],
                    [(lo_, hi_) for lo_, hi_ in ds.intervals],
                )

    def figure(path):
        from . import plotting

        plotting.save_curves_figure(
            path, profile_curves, xlabel="r", ylabel="annulus mass",
            title="dilation-set mass profiles",
        )

    columns = [
        "center_index", "delta", "lebesgue_estimate", "n_intervals",
        "dim_slope", "dim_r_squared", "dim_finest_boxes",
    ]
    return ExperimentResult(columns, rows, extra=extra, figure=figure)


# ---------------------------------------------------------------------------
# radii-set
# ---------------------------------------------------------------------------
def prepare_radii_set(cfg: ExperimentConfig, reader: ParamReader) -> dict:
    spec = spec_from_reader(reader)
    depth = reader.get_int("depth", 5)
    epsilons = reader.get_grid("epsilons", [2.0**-k for k in range(4, 10)])
    budget = reader.get_int("budget", 2_000_000)
    atoms = count_atoms(spec, depth)
    if atoms > ATOM_BUDGET:
        raise ResourceError(f"radii-set needs {atoms} atoms, budget {ATOM_BUDGET}")
    arity = spec.ndim + 1
    return {
        "spec": spec,
        "depth": depth,
        "epsilons": sorted(epsilons, reverse=True),
        "budget": budget,
        "info": {
            "atoms": atoms,
            "tuples": atoms**arity,
            "mode": "exhaustive" if atoms**arity <= budget else "monte-carlo",
        },
    }


def execute_radii_set(plan: dict, cfg: ExperimentConfig, threads: int) -> ExperimentResult:
    measure = realize(plan["spec"], plan["depth"], budget=ATOM_BUDGET)
    rows = radii_set_measure(
        measure, plan["epsilons"], budget=plan["budget"], seed=cfg.seed, threads=threads
    )

    def figure(path):
        from . import plotting

        plotting.save_curves_figure(
            path, {"covered length": rows}, xlabel="epsilon",
            ylabel="covered length", title="radii-set covering", loglog=True,
        )

    return ExperimentResult(["epsilon", "covered_length"], rows, figure=figure)


# ---------------------------------------------------------------------------
# dimension
# ---------------------------------------------------------------------------
def prepare_dimension(cfg: ExperimentConfig, reader: ParamReader) -> dict:
    spec = spec_from_reader(reader)
    depth = reader.get_int("depth", 10)
    scales = reader.get_grid("scales")
    atoms = count_atoms(spec, depth)
    if atoms > ATOM_BUDGET:
        raise ResourceError(f"dimension needs {atoms} atoms, budget {ATOM_BUDGET}")
    return {
        "spec": spec,
        "depth": depth,
        "scales": scales,
        "info": {"atoms": atoms, "depth": depth},
    }


def execute_dimension(plan: dict, cfg: ExperimentConfig, threads: int) -> ExperimentResult:
    from .measures import box_dimension

    measure = realize(plan["spec"], plan["depth"], budget=ATOM_BUDGET)
    scales = plan["scales"]
    if scales is None:
        lo = max(measure.resolution * 4.0, 1e-12)
        hi = measure.diameter / 4.0
        count = max(3, int(math.log2(hi / lo)))
        scales = list(np.geomspace(lo, hi, count))
    fit = box_dimension(measure, scales)
    rows = [(b, n) for b, n, _ in fit.points]
    extra = {"fit": (FIT_COLUMNS, _fit_rows(fit))}

    def figure(path):
        from . import plotting

        plotting.save_scaling_figure(
            path,
            [(1.0 / b, n) for b, n in rows],
            None,
            xlabel="1/scale",
            ylabel="occupied boxes",
            title=f"box-counting dimension (slope {fit.slope:.3f})",
        )

    return ExperimentResult(["scale", "count"], rows, extra=extra, figure=figure)


EXPERIMENTS = {
    "radius": (prepare_radius, execute_radius),
    "incidence": (prepare_incidence, execute_incidence),
    "sharpness": (prepare_sharpness, execute_sharpness),
    "fourier": (prepare_fourier, execute_fourier),
    "energy": (prepare_energy, execute_energy),
    "intersect": (prepare_intersect, execute_intersect),
    "radii-set": (prepare_radii_set, execute_radii_set),
    "dimension": (prepare_dimension, execute_dimension),
}


def run_experiment(cfg: ExperimentConfig, threads: int = 1) -> ExperimentResult:
    prepare, execute = EXPERIMENTS[cfg.experiment]
    reader = cfg.reader()
    plan = prepare(cfg, reader)
    reader.finish()
    return execute(plan, cfg, threads)


def validate_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Dry run: parse everything, report counts and feasibility, execute nothing."""
    rows: list[tuple] = [("experiment", cfg.experiment), ("seed", cfg.seed)]
    would_fail = "none"
    detail = ""
    try:
        prepare, _ = EXPERIMENTS[cfg.experiment]
        reader = cfg.reader()
        plan = prepare(cfg, reader)
        reader.finish()
        for key, value in plan.get("info", {}).items():
            rows.append((key, value))
    except ResourceError as exc:
        would_fail = "resource"
        detail = str(exc)
    except InputError as exc:
        would_fail = "input"
        detail = str(exc)
    rows.append(("would_fail", would_fail))
    if detail:
        rows.append(("detail", detail))
    return ExperimentResult(["key", "value"], rows)
