"""Seeded sampling campaigns that try to falsify the g.o. criteria on a space."""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .algebra import ContractError, DecomposedSpace
from .catalog import build_space, build_wallach, descriptor
from .norm import NormContext, PhiFunction, parse_phi
from .solver import (
    TAU_FEAS,
    TAU_INFEAS,
    check_geodesic_vector,
    classify,
    solve_condition_I,
    solve_geodesic_vector,
    solve_theorem2_condition3,
)

GENERIC_MIN = 1e-3
MAX_INDETERMINATE_FRACTION = 0.01
MAX_WITNESSES = 3
DEFAULT_THETA_PHI = "1+s^2/4"
MODES = ("condition-i", "geodesic", "theta", "theorem2")


@dataclass(frozen=True)
class CampaignConfig:
    space_key: str
    mode: str = "condition-i"
    samples: int = 500
    seed: int = 0
    phi_list: tuple[str, ...] = ()
    theta_list: tuple[float, ...] = ()
    tol_feas: float = TAU_FEAS
    tol_infeas: float = TAU_INFEAS
    jobs: int = 1
    params: tuple[tuple[str, int], ...] = ()
    split: int = 3
    zero_fiber: bool = False

    def __post_init__(self):
        if self.samples < 1:
            raise ContractError("samples must be >= 1")
        if self.mode not in MODES:
            raise ContractError(f"unknown mode {self.mode!r}")
        if any(not 0.0 < t < 1.0 for t in self.theta_list):
            raise ContractError("thetas must lie strictly inside (0, 1)")

    def echo(self) -> dict:
        out = asdict(self)
        out["phi_list"] = list(self.phi_list)
        out["theta_list"] = list(self.theta_list)
        out["params"] = dict(self.params)
        return out


@dataclass
class Trial:
    index: int
    status: str
    residual: float
    witness: dict
    agree: bool = True


@dataclass
class CampaignReport:
    space_key: str
    mode: str
    verdict: str  # "go-verified" | "go-falsified" | "indeterminate"
    counts: dict
    residuals: dict  # min / median / max
    witnesses: list
    config: dict
    basis_fingerprint: str
    extra: dict = field(default_factory=dict)
    wall_time: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "CampaignReport":
        return cls(**data)


def resolve_space(cfg: CampaignConfig) -> DecomposedSpace:
    """Space for a campaign; Wallach keys give a derived triple or a split by mode."""
    desc = descriptor(cfg.space_key)
    if desc.kind == "wallach":
        w = build_wallach(cfg.space_key)
        if cfg.mode in ("condition-i", "theta"):
            return w.derived_triple(cfg.split)
        return w.split(cfg.split)
    return build_space(desc, **dict(cfg.params))


def trial_rng(seed: int, index: int) -> np.random.Generator:
    """Per-trial stream keyed by the trial counter, independent of scheduling."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def generic_vector(space: DecomposedSpace, rng: np.random.Generator) -> np.ndarray:
    """Unit vector in m with both components of norm at least ``GENERIC_MIN``."""
    while True:
        v = space.m.random(rng)
        if min(np.linalg.norm(space.m1.project(v)), np.linalg.norm(space.m2.project(v))) >= GENERIC_MIN:
            return v


def _vec(x) -> list[float]:
    return [float(t) for t in np.asarray(x)]


def _combine(statuses) -> str:
    statuses = list(statuses)
    if "infeasible" in statuses:
        return "infeasible"
    if all(s == "feasible" for s in statuses):
        return "feasible"
    return "indeterminate"


# -- per-trial kernels ---------------------------------------------------------


def _trial_condition_I(space, cfg, i):
    rng = trial_rng(cfg.seed, i)
    v_f, v_b = space.m1.random(rng), space.m2.random(rng)
    if cfg.zero_fiber:
        v_f = np.zeros_like(v_f)
    rep = solve_condition_I(space, v_f, v_b, cfg.tol_feas, cfg.tol_infeas)
    witness = {"v_F": _vec(v_f), "v_B": _vec(v_b), "u": _vec(rep.u), "residual": rep.residual}
    return Trial(i, rep.status, rep.residual, witness)


def _trial_geodesic(space, cfg, i, phis):
    rng = trial_rng(cfg.seed, i)
    v = generic_vector(space, rng)
    statuses, residuals, checks, us = [], [], [], []
    for phi in phis:
        ctx = NormContext(space, phi)
        cand, rep = solve_geodesic_vector(ctx, v, cfg.tol_feas, cfg.tol_infeas)
        chk = check_geodesic_vector(ctx, cand)
        status = rep.status
        if status == "feasible" and not chk < 10 * cfg.tol_feas:
            status = "indeterminate"
        statuses.append(status)
        residuals.append(rep.residual)
        checks.append(chk)
        us.append(_vec(rep.u))
    witness = {
        "v": _vec(v),
        "phi": [p.label for p in phis],
        "u": us,
        "residuals": residuals,
        "checker": checks,
        "residual": max(residuals),
    }
    return Trial(i, _combine(statuses), max(residuals), witness)


def _trial_theta(space, cfg, i, phi):
    rng = trial_rng(cfg.seed, i)
    d_f, d_b = space.m1.random(rng), space.m2.random(rng)
    statuses, residuals = [], []
    for theta in cfg.theta_list:
        # theta = |v_B| / |v| for unit directions
        v_f, v_b = np.sqrt(1.0 - theta**2) * d_f, theta * d_b
        rep = solve_condition_I(space, v_f, v_b, cfg.tol_feas, cfg.tol_infeas)
        statuses.append(rep.status)
        residuals.append(rep.residual)
        if not phi.is_constant():
            ctx = NormContext(space, phi)
            _, geo = solve_geodesic_vector(ctx, v_f + v_b, cfg.tol_feas, cfg.tol_infeas)
            statuses.append(geo.status)
            residuals.append(geo.residual)
    agree = len(set(statuses)) == 1
    witness = {
        "d_F": _vec(d_f),
        "d_B": _vec(d_b),
        "thetas": list(cfg.theta_list),
        "phi": phi.label,
        "statuses": statuses,
        "residuals": residuals,
        "residual": max(residuals),
    }
    status = statuses[0] if agree else "indeterminate"
    return Trial(i, status, max(residuals), witness, agree)


def _trial_theorem2(space, cfg, i):
    rng = trial_rng(cfg.seed, i)
    v1, v2 = space.m1.random(rng), space.m2.random(rng)
    c1, c2 = np.exp(rng.uniform(np.log(0.1), np.log(10.0), size=2))
    rep3 = solve_theorem2_condition3(space, v1, v2, c1, c2, cfg.tol_feas, cfg.tol_infeas)
    # with (a, b) = (c1, c2) the geodesic system is a multiple of condition (3)
    ctx = NormContext(space, PhiFunction.riemannian(c1, c2))
    _, geo = solve_geodesic_vector(ctx, v1 + v2, cfg.tol_feas, cfg.tol_infeas)
    agree = rep3.status == geo.status
    witness = {
        "v1": _vec(v1),
        "v2": _vec(v2),
        "c1": float(c1),
        "c2": float(c2),
        "u": _vec(rep3.u),
        "statuses": [rep3.status, geo.status],
        "residuals": [rep3.residual, geo.residual],
        "residual": max(rep3.residual, geo.residual),
    }
    status = rep3.status if agree else "indeterminate"
    return Trial(i, status, max(rep3.residual, geo.residual), witness, agree)


# -- campaign drivers ----------------------------------------------------------


def _run(cfg: CampaignConfig, space: DecomposedSpace, kernel, extra=None) -> CampaignReport:
    start = time.perf_counter()
    indices = range(cfg.samples)
    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            trials = list(pool.map(kernel, indices))
    else:
        trials = [kernel(i) for i in indices]
    trials.sort(key=lambda t: t.index)
    report = aggregate(cfg, space, trials, extra or {})
    report.wall_time = time.perf_counter() - start
    return report


def verdict_for(counts: dict, samples: int) -> str:
    if counts["indeterminate"] > MAX_INDETERMINATE_FRACTION * samples:
        return "indeterminate"
    if counts["infeasible"] > 0:
        return "go-falsified"
    return "go-verified"


def aggregate(cfg: CampaignConfig, space: DecomposedSpace, trials: list, extra: dict) -> CampaignReport:
    counts = {"feasible": 0, "infeasible": 0, "indeterminate": 0}
    for t in trials:
        counts[t.status] += 1
    res = np.sort([t.residual for t in trials])
    quantiles = {
        "min": float(res[0]),
        "median": float(res[(len(res) - 1) // 2]),
        "max": float(res[-1]),
    }
    verdict = verdict_for(counts, len(trials))
    if verdict == "go-falsified":
        chosen = [t for t in trials if t.status == "infeasible"]
    else:
        chosen = trials
    witnesses = [dict(trial=t.index, status=t.status, **t.witness) for t in chosen[:MAX_WITNESSES]]
    extra = dict(extra)
    disagreements = sum(not t.agree for t in trials)
    extra["disagreements"] = disagreements
    extra["agreement_rate"] = 1.0 - disagreements / len(trials)
    extra["infeasible_fraction"] = counts["infeasible"] / len(trials)
    extra["infeasible_above_tol"] = sum(
        t.status == "infeasible" and t.residual > cfg.tol_infeas for t in trials
    )
    return CampaignReport(
        space_key=space.label,
        mode=cfg.mode,
        verdict=verdict,
        counts=counts,
        residuals=quantiles,
        witnesses=witnesses,
        config=cfg.echo(),
        basis_fingerprint=space.algebra.fingerprint(),
        extra=extra,
    )


def _phis(cfg: CampaignConfig, default: tuple[str, ...]) -> list[PhiFunction]:
    return [parse_phi(t) for t in (cfg.phi_list or default)]


def campaign_condition_I(cfg: CampaignConfig) -> CampaignReport:
    space = resolve_space(cfg)
    if not space.is_triple:
        raise ContractError(f"{space.label}: Condition I needs a triple space")
    return _run(cfg, space, lambda i: _trial_condition_I(space, cfg, i))


def campaign_geodesic(cfg: CampaignConfig) -> CampaignReport:
    phis = _phis(cfg, ("1",))
    space = resolve_space(cfg)
    return _run(cfg, space, lambda i: _trial_geodesic(space, cfg, i, phis))


def campaign_theorem3_theta_independence(cfg: CampaignConfig) -> CampaignReport:
    if len(cfg.theta_list) < 2:
        raise ContractError("theta campaign needs at least two thetas")
    phi = _phis(cfg, (DEFAULT_THETA_PHI,))[0]
    space = resolve_space(cfg)
    if not space.is_triple:
        raise ContractError(f"{space.label}: theta campaign needs a triple space")
    return _run(cfg, space, lambda i: _trial_theta(space, cfg, i, phi))


def cross_validate_theorem2(cfg: CampaignConfig) -> CampaignReport:
    space = resolve_space(cfg)
    return _run(cfg, space, lambda i: _trial_theorem2(space, cfg, i))


CAMPAIGNS = {
    "condition-i": campaign_condition_I,
    "geodesic": campaign_geodesic,
    "theta": campaign_theorem3_theta_independence,
    "theorem2": cross_validate_theorem2,
}


def run_campaign(cfg: CampaignConfig) -> CampaignReport:
    return CAMPAIGNS[cfg.mode](cfg)


def replay_witness(space: DecomposedSpace, mode: str, witness: dict, tol_feas=TAU_FEAS) -> float:
    """Recompute the stored ``residual`` of a serialized witness."""
    arr = np.asarray
    if mode == "condition-i":
        return solve_condition_I(space, arr(witness["v_F"]), arr(witness["v_B"])).residual
    if mode == "geodesic":
        out = []
        for label in witness["phi"]:
            ctx = NormContext(space, _phi_from_label(label))
            out.append(solve_geodesic_vector(ctx, arr(witness["v"]))[1].residual)
        return max(out)
    if mode == "theta":
        phi = _phi_from_label(witness["phi"])
        d_f, d_b = arr(witness["d_F"]), arr(witness["d_B"])
        out = []
        for theta in witness["thetas"]:
            v_f, v_b = np.sqrt(1.0 - theta**2) * d_f, theta * d_b
            out.append(solve_condition_I(space, v_f, v_b).residual)
            if not phi.is_constant():
                out.append(solve_geodesic_vector(NormContext(space, phi), v_f + v_b)[1].residual)
        return max(out)
    if mode == "theorem2":
        v1, v2, c1, c2 = arr(witness["v1"]), arr(witness["v2"]), witness["c1"], witness["c2"]
        r3 = solve_theorem2_condition3(space, v1, v2, c1, c2).residual
        ctx = NormContext(space, PhiFunction.riemannian(c1, c2))
        return max(r3, solve_geodesic_vector(ctx, v1 + v2)[1].residual)
    raise ContractError(f"unknown mode {mode!r}")


def _phi_from_label(label: str) -> PhiFunction:
    if label.startswith("riemannian("):
        a, b = label[len("riemannian(") : -1].split(",")
        return PhiFunction.riemannian(float(a), float(b))
    return parse_phi(label)


def status_of(residual: float, cfg: CampaignConfig) -> str:
    return classify(residual, cfg.tol_feas, cfg.tol_infeas)
