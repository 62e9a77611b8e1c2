"""Executable checks of the secrecy guarantees by exact distribution enumeration.

At desk scale the "learns nothing" guarantees reduce to finite statements: the
joint distribution of what a colluding set observes, taken over all noise
assignments, must be identical under any two message sets (storage secrecy)
or any two desired indices (query privacy).  Enumeration is exact, never
sampled, so a verdict is a proof at the audited parameters.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from itertools import product
import json

from .linalg import EvaluationPoints
from .protocol import (
    InfeasibleParamsError,
    MessageSet,
    ProtocolParams,
    QueryNoise,
    StorageNoise,
    achievable_rate,
    comparison_rate_prior,
    default_points,
    encode_storage,
    gen_queries,
)

DEFAULT_STATE_BUDGET = 10**6


@dataclass(frozen=True)
class AuditConfig:
    """What to audit, who colludes, and how many joint states we may enumerate."""

    params: ProtocolParams
    colluding: tuple[int, ...]
    target: str  # "storage-security" | "query-privacy"
    state_budget: int = DEFAULT_STATE_BUDGET

    def __post_init__(self):
        object.__setattr__(self, "colluding", tuple(sorted(set(self.colluding))))
        if self.target not in ("storage-security", "query-privacy"):
            raise ValueError("target must be storage-security or query-privacy")
        if not self.colluding:
            raise ValueError("colluding set must be non-empty")
        if any(not 1 <= n <= self.params.num_servers for n in self.colluding):
            raise ValueError("colluding server index out of range")

    @property
    def within_budget(self) -> bool:
        bound = (
            self.params.security
            if self.target == "storage-security"
            else self.params.privacy
        )
        return len(self.colluding) <= bound


@dataclass(frozen=True)
class AuditVerdict:
    """Outcome of one exact distribution-equality audit."""

    target: str
    colluding: tuple[int, ...]
    states_enumerated: int
    passed: bool
    support_size: int
    within_budget: bool

    def to_json(self) -> str:
        return json.dumps(
            {
                "target": self.target,
                "colluding_set": list(self.colluding),
                "states_enumerated": self.states_enumerated,
                "pass": self.passed,
                "support_size": self.support_size,
                "within_budget": self.within_budget,
            },
            sort_keys=True,
        )


def _check_budget(cfg: AuditConfig, free_symbols: int, q: int) -> int:
    states = q**free_symbols
    if states > cfg.state_budget:
        raise ValueError(
            f"enumeration needs {states} states, over the budget of {cfg.state_budget}"
        )
    return states


def _storage_distribution(
    cfg: AuditConfig, msgs: MessageSet, points: EvaluationPoints
) -> Counter:
    """Joint distribution of the colluding servers' shares over all storage noise."""
    p = cfg.params
    q = points.field.q
    dist: Counter = Counter()
    free = p.layers * p.security * p.num_messages
    for flat in product(range(q), repeat=free):
        it = iter(flat)
        noise = StorageNoise(
            points.field,
            tuple(
                tuple(
                    tuple(next(it) for _ in range(p.num_messages))
                    for _ in range(p.security)
                )
                for _ in range(p.layers)
            ),
        )
        storages = encode_storage(msgs, noise, points, p)
        obs = tuple(storages[n - 1].shares for n in cfg.colluding)
        dist[obs] += 1
    return dist


def audit_storage_security(
    cfg: AuditConfig,
    msgs_a: MessageSet,
    msgs_b: MessageSet,
    points: EvaluationPoints | None = None,
) -> AuditVerdict:
    """Exact check that colluding shares are identically distributed under two libraries."""
    p = cfg.params
    if cfg.target != "storage-security":
        raise ValueError("config target is not storage-security")
    if p.security == 0:
        raise ValueError("no storage secrecy is claimed at X = 0")
    if points is None:
        points = default_points(p)
    states = _check_budget(cfg, p.layers * p.security * p.num_messages, points.field.q)
    dist_a = _storage_distribution(cfg, msgs_a, points)
    dist_b = _storage_distribution(cfg, msgs_b, points)
    return AuditVerdict(
        target=cfg.target,
        colluding=cfg.colluding,
        states_enumerated=2 * states,
        passed=dist_a == dist_b,
        support_size=len(dist_a | dist_b),
        within_budget=cfg.within_budget,
    )


def _query_distribution(
    cfg: AuditConfig, theta: int, points: EvaluationPoints
) -> Counter:
    """Joint distribution of the colluding servers' queries over all query noise."""
    p = cfg.params
    q = points.field.q
    dist: Counter = Counter()
    free = p.layers * p.privacy * p.code_dim * p.num_messages
    for flat in product(range(q), repeat=free):
        it = iter(flat)
        noise = QueryNoise(
            points.field,
            tuple(
                tuple(
                    tuple(
                        tuple(next(it) for _ in range(p.num_messages))
                        for _ in range(p.code_dim)
                    )
                    for _ in range(p.privacy)
                )
                for _ in range(p.layers)
            ),
        )
        queries = gen_queries(theta, noise, points, p)
        obs = tuple(queries[n - 1].rounds for n in cfg.colluding)
        dist[obs] += 1
    return dist


def audit_query_privacy(
    cfg: AuditConfig,
    theta_pair: tuple[int, int],
    points: EvaluationPoints | None = None,
) -> AuditVerdict:
    """Exact check that colluding queries are identically distributed for two indices.

    Storage is generated independently of the desired index and of the query
    noise (the seed split in the simulator keeps the streams separate), so the
    joint observed-by-colluders test reduces to this query marginal.
    """
    p = cfg.params
    if cfg.target != "query-privacy":
        raise ValueError("config target is not query-privacy")
    if p.privacy == 0:
        raise ValueError("no query privacy is claimed at T = 0")
    theta_a, theta_b = theta_pair
    for th in (theta_a, theta_b):
        if not 1 <= th <= p.num_messages:
            raise ValueError(f"theta must be in 1..{p.num_messages}")
    if points is None:
        points = default_points(p)
    states = _check_budget(
        cfg, p.layers * p.privacy * p.code_dim * p.num_messages, points.field.q
    )
    dist_a = _query_distribution(cfg, theta_a, points)
    dist_b = dist_a if theta_a == theta_b else _query_distribution(cfg, theta_b, points)
    return AuditVerdict(
        target=cfg.target,
        colluding=cfg.colluding,
        states_enumerated=(1 if theta_a == theta_b else 2) * states,
        passed=dist_a == dist_b,
        support_size=len(dist_a | dist_b),
        within_budget=cfg.within_budget,
    )


@dataclass(frozen=True)
class RateReport:
    """Download accounting for one completed retrieval."""

    downloaded_symbols: int
    retrieved_symbols: int
    realized_rate: Fraction
    achievable_rate: Fraction
    prior_rate: Fraction
    matches_achievable: bool = dc_field(init=False)

    def __post_init__(self):
        object.__setattr__(
            self, "matches_achievable", self.realized_rate == self.achievable_rate
        )

    def to_dict(self) -> dict:
        return {
            "downloaded_symbols": self.downloaded_symbols,
            "retrieved_symbols": self.retrieved_symbols,
            "realized_rate": str(self.realized_rate),
            "achievable_rate": str(self.achievable_rate),
            "prior_rate": str(self.prior_rate),
            "matches_achievable": self.matches_achievable,
        }


def rate_report(
    params: ProtocolParams, downloaded_symbols: int, retrieved_symbols: int
) -> RateReport:
    """Realized rate of a transcript, against the exact formula rates."""
    if params.layers < 1:
        raise InfeasibleParamsError("rate undefined for an infeasible instance")
    if downloaded_symbols <= 0:
        raise ValueError("transcript downloaded no symbols")
    return RateReport(
        downloaded_symbols=downloaded_symbols,
        retrieved_symbols=retrieved_symbols,
        realized_rate=Fraction(retrieved_symbols, downloaded_symbols),
        achievable_rate=achievable_rate(params),
        prior_rate=comparison_rate_prior(params),
    )
