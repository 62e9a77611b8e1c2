"""Deterministic multi-server simulation: adversaries, sessions, and sweeps.

Delivery is logical and in-process: unresponsiveness is an omitted answer
(the decoder sees the missing index), Byzantine servers substitute values per
a corruption policy.  Every random draw comes from a child stream derived
from the session master seed, one stream per role, so replaying a seed
reproduces the transcript byte for byte and audits over one noise source can
hold the others fixed.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from itertools import combinations
from random import Random

from .field import PrimeField
from .protocol import (
    AnswerBundle,
    MessageSet,
    ProtocolParams,
    QueryNoise,
    StorageNoise,
    decode,
    default_field,
    default_points,
    derive_params,
    encode_storage,
    gen_queries,
    server_answer,
)
from .audit import RateReport, rate_report
from .robust import DecodingFailure

CORRUPTION_POLICIES = ("random", "constant", "adversarial-replay")


def derive_seed(master: int, role: str) -> int:
    """Stable per-role child seed: sha256 over 'master/role'."""
    digest = hashlib.sha256(f"{master}/{role}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


@dataclass(frozen=True)
class AdversaryConfig:
    """Which servers misbehave and how; empty sets give an honest run."""

    unresponsive: tuple[int, ...] = ()
    byzantine: tuple[int, ...] = ()
    policy: str = "random"
    seed: int = 0
    constant_value: int = 0

    def __post_init__(self):
        object.__setattr__(self, "unresponsive", tuple(sorted(set(self.unresponsive))))
        object.__setattr__(self, "byzantine", tuple(sorted(set(self.byzantine))))
        if self.policy not in CORRUPTION_POLICIES:
            raise ValueError(f"policy must be one of {CORRUPTION_POLICIES}")
        if set(self.unresponsive) & set(self.byzantine):
            raise ValueError("unresponsive and Byzantine sets must be disjoint")

    def validate(self, params: ProtocolParams, strict: bool = True):
        """Against-budget validation; strict mode rejects over-budget sets."""
        for n in self.unresponsive + self.byzantine:
            if not 1 <= n <= params.num_servers:
                raise ValueError(f"server index {n} out of range")
        if strict:
            if len(self.unresponsive) != params.max_unresponsive:
                raise ValueError(
                    f"exactly U={params.max_unresponsive} unresponsive servers required, "
                    f"got {len(self.unresponsive)}"
                )
            if len(self.byzantine) > params.max_byzantine:
                raise ValueError(
                    f"at most B={params.max_byzantine} Byzantine servers allowed, "
                    f"got {len(self.byzantine)}"
                )

    def to_dict(self) -> dict:
        return {
            "unresponsive": list(self.unresponsive),
            "byzantine": list(self.byzantine),
            "policy": self.policy,
            "seed": self.seed,
            "constant_value": self.constant_value,
        }


HONEST = AdversaryConfig()


@dataclass(frozen=True)
class SessionTranscript:
    """Complete replayable record of one retrieval session."""

    params: ProtocolParams
    q: int
    f_points: tuple[int, ...]
    alpha_points: tuple[int, ...]
    theta: int
    master_seed: int
    role_seeds: dict[str, int]
    adversary: AdversaryConfig
    messages: tuple[tuple[int, ...], ...]
    storages: tuple[tuple[tuple[int, ...], ...], ...]     # [server-1][l] -> K-vector
    queries: tuple[tuple[tuple[tuple[int, ...], ...], ...], ...]  # [server-1][round][l]
    answers: tuple[tuple[int, ...] | None, ...]           # delivered; None if silent
    decoded: tuple[int, ...] | None
    ok: bool
    failure: str | None
    rates: RateReport | None

    @property
    def downloaded_symbols(self) -> int:
        return self.params.responsive_count * self.params.code_dim

    @property
    def retrieved_symbols(self) -> int:
        return self.params.message_len

    def to_dict(self) -> dict:
        p = self.params
        return {
            "scheme": "xstpir",
            "params": {
                "N": p.num_servers,
                "Kc": p.code_dim,
                "X": p.security,
                "T": p.privacy,
                "U": p.max_unresponsive,
                "B": p.max_byzantine,
                "K": p.num_messages,
                "L": p.layers,
                "ell": p.message_len,
            },
            "q": self.q,
            "points": {"f": list(self.f_points), "alpha": list(self.alpha_points)},
            "theta": self.theta,
            "seed": self.master_seed,
            "role_seeds": dict(self.role_seeds),
            "adversary": self.adversary.to_dict(),
            "messages": [list(m) for m in self.messages],
            "storages": [[list(v) for v in s] for s in self.storages],
            "queries": [
                [[list(v) for v in layer] for layer in rounds] for rounds in self.queries
            ],
            "answers": [list(a) if a is not None else None for a in self.answers],
            "decoded": list(self.decoded) if self.decoded is not None else None,
            "ok": self.ok,
            "failure": self.failure,
            "rate": self.rates.to_dict() if self.rates is not None else None,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _corrupt(
    true_answers: dict[int, AnswerBundle],
    adversary: AdversaryConfig,
    params: ProtocolParams,
    q: int,
) -> dict[int, AnswerBundle]:
    """Apply the corruption policy to the Byzantine servers' scalars."""
    rng = Random(adversary.seed)
    honest = [
        n
        for n in range(1, params.num_servers + 1)
        if n not in adversary.unresponsive and n not in adversary.byzantine
    ]
    out = dict(true_answers)
    for b in adversary.byzantine:
        truth = true_answers[b].scalars
        if adversary.policy == "random":
            # uniform nonzero offset: the substituted value is always a real error
            scalars = tuple((v + rng.randrange(1, q)) % q for v in truth)
        elif adversary.policy == "constant":
            scalars = tuple(adversary.constant_value % q for _ in truth)
        else:  # adversarial-replay: claim the next honest server's answers
            source = min(
                (n for n in honest if n > b),
                default=min(honest) if honest else b,
            )
            scalars = true_answers[source].scalars
        out[b] = AnswerBundle(b, scalars)
    return out


def run_session(
    params: ProtocolParams,
    adversary: AdversaryConfig = HONEST,
    theta: int = 1,
    seed: int = 0,
    field: PrimeField | None = None,
    strict: bool = True,
) -> SessionTranscript:
    """One full retrieval against the configured adversary.

    Returns a transcript with ok=True and decoded == W_theta, or a structured
    failure when the adversary exceeded the (U, B) budget (reachable only with
    strict=False; strict mode rejects over-budget configs up front).
    """
    adversary.validate(params, strict=strict)
    if field is None:
        field = default_field(params)
    if field.q < params.min_field_size:
        raise ValueError(f"field size {field.q} < L + N = {params.min_field_size}")
    points = default_points(params, field)
    role_seeds = {
        role: derive_seed(seed, role)
        for role in ("messages", "storage-noise", "query-noise")
    }
    messages = MessageSet.random(field, params, Random(role_seeds["messages"]))
    storage_noise = StorageNoise.random(field, params, Random(role_seeds["storage-noise"]))
    query_noise = QueryNoise.random(field, params, Random(role_seeds["query-noise"]))

    storages = encode_storage(messages, storage_noise, points, params)
    queries = gen_queries(theta, query_noise, points, params)
    true_answers = {
        s.server: server_answer(s, qb) for s, qb in zip(storages, queries)
    }
    with_corruption = _corrupt(true_answers, adversary, params, field.q)
    delivered = {
        n: ab for n, ab in with_corruption.items() if n not in adversary.unresponsive
    }

    decoded = None
    failure = None
    try:
        decoded = decode(delivered, points, params)
        ok = decoded == list(messages.messages[theta - 1])
        if not ok:
            failure = "decoded output differs from the requested message"
    except DecodingFailure as exc:
        ok = False
        failure = f"decoding failure: {exc}"

    rates = rate_report(
        params,
        params.responsive_count * params.code_dim,
        params.message_len,
    )
    return SessionTranscript(
        params=params,
        q=field.q,
        f_points=points.f,
        alpha_points=points.alpha,
        theta=theta,
        master_seed=seed,
        role_seeds=role_seeds,
        adversary=adversary,
        messages=messages.messages,
        storages=tuple(s.shares for s in storages),
        queries=tuple(qb.rounds for qb in queries),
        answers=tuple(
            delivered[n].scalars if n in delivered else None
            for n in range(1, params.num_servers + 1)
        ),
        decoded=tuple(decoded) if decoded is not None else None,
        ok=ok,
        failure=failure,
        rates=rates,
    )


@dataclass(frozen=True)
class SweepCell:
    """Aggregated outcomes for one parameter point and adversary description."""

    params_label: str
    adversary_label: str
    sessions: int
    passes: int
    failures: int


@dataclass(frozen=True)
class SweepSummary:
    cells: tuple[SweepCell, ...]

    @property
    def all_passed(self) -> bool:
        return all(c.failures == 0 for c in self.cells)

    @property
    def total_sessions(self) -> int:
        return sum(c.sessions for c in self.cells)

    def to_csv(self) -> str:
        lines = ["params,adversary,sessions,passes,failures"]
        for c in self.cells:
            lines.append(
                f"{c.params_label},{c.adversary_label},{c.sessions},{c.passes},{c.failures}"
            )
        return "\n".join(lines) + "\n"


def _params_label(p: ProtocolParams) -> str:
    return (
        f"N={p.num_servers} Kc={p.code_dim} X={p.security} T={p.privacy} "
        f"U={p.max_unresponsive} B={p.max_byzantine} K={p.num_messages}"
    )


def placements(params: ProtocolParams):
    """All disjoint (unresponsive, Byzantine) index sets at the full budget."""
    servers = range(1, params.num_servers + 1)
    for u_set in combinations(servers, params.max_unresponsive):
        remaining = [n for n in servers if n not in u_set]
        for b_set in combinations(remaining, params.max_byzantine):
            yield u_set, b_set


def sweep(
    grid,
    mode: str = "honest",
    policies=("random",),
    draws: int = 1,
    thetas=None,
    seeds=(0,),
) -> SweepSummary:
    """Run sessions over a params grid; per-cell pass/fail counts.

    mode "honest" runs without an adversary; mode "placements" enumerates every
    disjoint (U, B) placement at the full budget, each policy, `draws` draws.
    """
    if mode not in ("honest", "placements"):
        raise ValueError("mode must be 'honest' or 'placements'")
    cells = []
    for params in grid:
        theta_list = thetas if thetas is not None else range(1, params.num_messages + 1)
        if mode == "honest":
            # |U| = U is part of the model: the first U servers stay silent
            adv = AdversaryConfig(tuple(range(1, params.max_unresponsive + 1)))
            sessions = passes = 0
            for theta in theta_list:
                for seed in seeds:
                    t = run_session(params, adv, theta, seed)
                    sessions += 1
                    passes += t.ok
            cells.append(
                SweepCell(_params_label(params), "honest", sessions, passes, sessions - passes)
            )
        else:
            for u_set, b_set in placements(params):
                for policy in policies:
                    sessions = passes = 0
                    for draw in range(draws):
                        adv = AdversaryConfig(u_set, b_set, policy, seed=draw)
                        for theta in theta_list:
                            for seed in seeds:
                                t = run_session(params, adv, theta, seed)
                                sessions += 1
                                passes += t.ok
                    label = f"U={list(u_set)} B={list(b_set)} policy={policy}"
                    cells.append(
                        SweepCell(
                            _params_label(params), label, sessions, passes, sessions - passes
                        )
                    )
    return SweepSummary(tuple(cells))


def params_grid(
    n_range, kc_range, x_range, t_range, u_range, b_range, k_range
):
    """All feasible parameter tuples in the given ranges.

    Skips infeasible tuples (L < 1) and the one corner (K_c=1, X=0, T=0, B=0)
    where the decoding matrix would be square pure-Cauchy, outside the
    guaranteed-invertibility domain 1 <= L <= rows-1.
    """
    out = []
    for n in n_range:
        for kc in kc_range:
            for x in x_range:
                for t in t_range:
                    for u in u_range:
                        for b in b_range:
                            if kc == 1 and x == 0 and t == 0 and b == 0:
                                continue
                            if u >= n:
                                continue
                            layers = (n - u) - (kc + x + t + 2 * b - 1)
                            if layers < 1:
                                continue
                            for k in k_range:
                                out.append(derive_params(n, kc, x, t, u, b, k))
    return out
