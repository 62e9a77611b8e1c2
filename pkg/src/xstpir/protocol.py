"""The layered private-retrieval scheme over MDS-coded, noise-protected storage.

One message symbol column W_lk (the (L(k-1)+l)-th symbol of every message) is
placed on the Cauchy term 1/(f_l - a_n)^(K_c-k+1) of each server's share, and
the matching query round k scales the selection vector so that round-k answers
expose exactly the L desired symbols (W_lk e_theta) on the terms
1/(f_l - a_n), with every remaining product collapsing onto the shared span
1, a_n, ..., a_n^(K_c+X+T-2).  Decoding runs the rounds in order, subtracting
the already-known contribution of earlier rounds before each linear solve.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .field import PrimeField, smallest_prime_geq
from .linalg import DecodingMatrix, EvaluationPoints, FieldMatrix, build_decoding_matrix
from .robust import decoder_for


class InfeasibleParamsError(ValueError):
    """Parameter tuple leaves no room for a data layer (L < 1)."""


@dataclass(frozen=True)
class ProtocolParams:
    """Validated parameter tuple with the derived layer count and message length.

    layers = (N - U) - (K_c + X + T + 2B - 1) and message_len = layers * K_c.
    """

    num_servers: int        # N
    code_dim: int           # K_c, MDS storage code dimension
    security: int           # X, colluding-server bound for storage secrecy
    privacy: int            # T, colluding-server bound for query privacy
    max_unresponsive: int   # U
    max_byzantine: int      # B
    num_messages: int       # K
    layers: int             # L, derived
    message_len: int        # ell = L * K_c, derived

    def __post_init__(self):
        n, kc, x, t = self.num_servers, self.code_dim, self.security, self.privacy
        u, b, k = self.max_unresponsive, self.max_byzantine, self.num_messages
        if min(n, kc, k) < 1 or min(x, t, u, b) < 0:
            raise ValueError("need N, K_c, K >= 1 and X, T, U, B >= 0")
        if x > n or t > n:
            raise ValueError("X and T cannot exceed the server count")
        if u >= n:
            raise ValueError("U must leave at least one responsive server")
        expected = (n - u) - (kc + x + t + 2 * b - 1)
        if self.layers != expected or self.message_len != self.layers * kc:
            raise ValueError("derived fields inconsistent; use derive_params()")
        if self.layers < 1:
            raise InfeasibleParamsError(
                f"L = {self.layers} < 1: N-U too small for K_c+X+T+2B-1"
            )

    @property
    def interference_span(self) -> int:
        """Vandermonde column count K_c + X + T - 1 of the decoding matrix."""
        return self.code_dim + self.security + self.privacy - 1

    @property
    def decode_width(self) -> int:
        """Unknowns per decoding round: L desired slots plus the interference span."""
        return self.layers + self.interference_span

    @property
    def responsive_count(self) -> int:
        return self.num_servers - self.max_unresponsive

    @property
    def min_field_size(self) -> int:
        """Distinct evaluation points require q >= L + N."""
        return self.layers + self.num_servers


def derive_params(
    num_servers: int,
    code_dim: int,
    security: int,
    privacy: int,
    max_unresponsive: int = 0,
    max_byzantine: int = 0,
    num_messages: int = 1,
) -> ProtocolParams:
    """Compute the derived layer count / message length, rejecting L < 1."""
    layers = (num_servers - max_unresponsive) - (
        code_dim + security + privacy + 2 * max_byzantine - 1
    )
    return ProtocolParams(
        num_servers=num_servers,
        code_dim=code_dim,
        security=security,
        privacy=privacy,
        max_unresponsive=max_unresponsive,
        max_byzantine=max_byzantine,
        num_messages=num_messages,
        layers=layers,
        message_len=layers * code_dim,
    )


def achievable_rate(params: ProtocolParams) -> Fraction:
    """Retrieved symbols per downloaded symbol: L / (N - U)."""
    return Fraction(params.layers, params.responsive_count)


def comparison_rate_prior(params: ProtocolParams) -> Fraction:
    """Best previously reported rate: ours scaled by K_c / (K_c + X)."""
    return achievable_rate(params) * Fraction(
        params.code_dim, params.code_dim + params.security
    )


def default_field(params: ProtocolParams) -> PrimeField:
    """Smallest prime field satisfying q >= L + N."""
    return PrimeField(smallest_prime_geq(params.min_field_size))


def default_points(params: ProtocolParams, field: PrimeField | None = None) -> EvaluationPoints:
    if field is None:
        field = default_field(params)
    return EvaluationPoints.default(field, params.layers, params.num_servers)


@dataclass(frozen=True)
class MessageSet:
    """K messages of ell symbols each, with the dual per-column view W_lk."""

    field: PrimeField
    layers: int
    code_dim: int
    messages: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        q = self.field.q
        ell = self.layers * self.code_dim
        msgs = tuple(tuple(v % q for v in m) for m in self.messages)
        if not msgs or any(len(m) != ell for m in msgs):
            raise ValueError(f"every message must hold exactly {ell} symbols")
        object.__setattr__(self, "messages", msgs)

    @property
    def num_messages(self) -> int:
        return len(self.messages)

    @property
    def message_len(self) -> int:
        return self.layers * self.code_dim

    def symbol_position(self, l: int, k: int) -> int:
        """0-based position of the (l, k) symbol inside a message: L(k-1)+l-1."""
        if not (1 <= l <= self.layers and 1 <= k <= self.code_dim):
            raise ValueError("layer or round index out of range")
        return self.layers * (k - 1) + l - 1

    def layer_vector(self, l: int, k: int) -> list[int]:
        """W_lk: the (L(k-1)+l)-th symbol of every message, as a length-K row."""
        pos = self.symbol_position(l, k)
        return [m[pos] for m in self.messages]

    @classmethod
    def random(cls, field: PrimeField, params: ProtocolParams, rng) -> "MessageSet":
        return cls(
            field,
            params.layers,
            params.code_dim,
            tuple(
                tuple(field.random_vector(rng, params.message_len))
                for _ in range(params.num_messages)
            ),
        )


@dataclass(frozen=True)
class StorageNoise:
    """L x X uniform row vectors of length K protecting the stored data."""

    field: PrimeField
    z: tuple[tuple[tuple[int, ...], ...], ...]  # [l][x] -> K-vector

    @classmethod
    def random(cls, field: PrimeField, params: ProtocolParams, rng) -> "StorageNoise":
        return cls(
            field,
            tuple(
                tuple(
                    tuple(field.random_vector(rng, params.num_messages))
                    for _ in range(params.security)
                )
                for _ in range(params.layers)
            ),
        )

    def vector(self, l: int, x: int) -> tuple[int, ...]:
        return self.z[l - 1][x - 1]


@dataclass(frozen=True)
class QueryNoise:
    """L x T x K_c uniform column vectors of length K protecting the queries."""

    field: PrimeField
    zp: tuple[tuple[tuple[tuple[int, ...], ...], ...], ...]  # [l][t][round] -> K-vector

    @classmethod
    def random(cls, field: PrimeField, params: ProtocolParams, rng) -> "QueryNoise":
        return cls(
            field,
            tuple(
                tuple(
                    tuple(
                        tuple(field.random_vector(rng, params.num_messages))
                        for _ in range(params.code_dim)
                    )
                    for _ in range(params.privacy)
                )
                for _ in range(params.layers)
            ),
        )

    def vector(self, l: int, t: int, round_k: int) -> tuple[int, ...]:
        return self.zp[l - 1][t - 1][round_k - 1]


@dataclass(frozen=True)
class ServerStorage:
    """The L coded share vectors S_n1..S_nL held by one server."""

    server: int
    shares: tuple[tuple[int, ...], ...]  # [l] -> K-vector
    field: PrimeField

    def __post_init__(self):
        q = self.field.q
        object.__setattr__(
            self, "shares", tuple(tuple(v % q for v in row) for row in self.shares)
        )


@dataclass(frozen=True)
class QueryBundle:
    """All K_c rounds of query vectors for one server (sent in one shot)."""

    server: int
    rounds: tuple[tuple[tuple[int, ...], ...], ...]  # [round][l] -> K-vector
    field: PrimeField

    def __post_init__(self):
        q = self.field.q
        object.__setattr__(
            self,
            "rounds",
            tuple(
                tuple(tuple(v % q for v in vec) for vec in layer)
                for layer in self.rounds
            ),
        )


@dataclass(frozen=True)
class AnswerBundle:
    """The K_c answer scalars (reduced residues) returned by one server."""

    server: int
    scalars: tuple[int, ...]


def encode_storage(
    messages: MessageSet,
    noise: StorageNoise,
    points: EvaluationPoints,
    params: ProtocolParams,
) -> list[ServerStorage]:
    """Code each symbol column onto inverse powers of (f_l - a_n), plus noise.

    Share vector: S_nl = sum_k W_lk / (f_l - a_n)^(K_c-k+1)
                         + sum_x (f_l - a_n)^(x-1) Z_lx.
    """
    _check_dims(messages, params, points)
    if len(noise.z) != params.layers or any(len(zl) != params.security for zl in noise.z):
        raise ValueError("storage noise must be L x X vectors")
    field = points.field
    q = field.q
    kc, xx, kk = params.code_dim, params.security, params.num_messages
    w_vecs = [
        [messages.layer_vector(l, k) for k in range(1, kc + 1)]
        for l in range(1, params.layers + 1)
    ]
    out = []
    for n in range(1, params.num_servers + 1):
        shares = []
        for l in range(1, params.layers + 1):
            d = points.diff(l, n)
            inv_d = pow(d, q - 2, q)
            coefs = [pow(inv_d, kc - k + 1, q) for k in range(1, kc + 1)]
            coefs += [pow(d, x - 1, q) for x in range(1, xx + 1)]
            vecs = w_vecs[l - 1] + list(noise.z[l - 1])
            shares.append(
                tuple(
                    sum(c * v[j] for c, v in zip(coefs, vecs)) % q
                    for j in range(kk)
                )
            )
        out.append(ServerStorage(n, tuple(shares), field))
    return out


def gen_queries(
    theta: int,
    noise: QueryNoise,
    points: EvaluationPoints,
    params: ProtocolParams,
) -> list[QueryBundle]:
    """Round-k query vector: (f_l - a_n)^(K_c-k) e_theta plus T noise layers.

    Q_nl = (f_l - a_n)^(K_c-k) e_theta + sum_t (f_l - a_n)^(K_c+t-1) Z'_lt.
    """
    if not 1 <= theta <= params.num_messages:
        raise ValueError(f"theta must be in 1..{params.num_messages}")
    if len(noise.zp) != params.layers or any(
        len(zl) != params.privacy or any(len(zt) != params.code_dim for zt in zl)
        for zl in noise.zp
    ):
        raise ValueError("query noise must be L x T x K_c vectors")
    field = points.field
    q = field.q
    kc, tt, kk = params.code_dim, params.privacy, params.num_messages
    out = []
    for n in range(1, params.num_servers + 1):
        rounds = []
        for rk in range(1, kc + 1):
            per_layer = []
            for l in range(1, params.layers + 1):
                d = points.diff(l, n)
                vec = [0] * kk
                vec[theta - 1] = pow(d, kc - rk, q)
                for t in range(1, tt + 1):
                    c = pow(d, kc + t - 1, q)
                    zv = noise.zp[l - 1][t - 1][rk - 1]
                    for j in range(kk):
                        vec[j] = (vec[j] + c * zv[j]) % q
                per_layer.append(tuple(vec))
            rounds.append(tuple(per_layer))
        out.append(QueryBundle(n, tuple(rounds), field))
    return out


def server_answer(storage: ServerStorage, queries: QueryBundle) -> AnswerBundle:
    """Honest answer: one inner product sum_l S_nl . Q_nl per query round."""
    if storage.server != queries.server:
        raise ValueError("storage and query bundle belong to different servers")
    if storage.field != queries.field:
        raise ValueError("storage and queries live in different fields")
    if not queries.rounds or any(
        len(per_layer) != len(storage.shares) for per_layer in queries.rounds
    ):
        raise ValueError("query layer count must match stored share count")
    q = storage.field.q
    scalars = []
    for per_layer in queries.rounds:
        acc = 0
        for s, qv in zip(storage.shares, per_layer):
            if len(s) != len(qv):
                raise ValueError("share and query vector lengths differ")
            acc += sum(a * b for a, b in zip(s, qv))
        scalars.append(acc % q)
    return AnswerBundle(storage.server, tuple(scalars))


def interference_offset(
    decoded: dict[tuple[int, int], int],
    points: EvaluationPoints,
    params: ProtocolParams,
    round_k: int,
    server: int,
) -> int:
    """Known contribution of rounds < round_k to this server's round-k answer.

    Equals sum_l sum_(k<round_k) decoded[(l,k)] / (f_l - a_n)^(round_k-k+1);
    subtracting it leaves only round-k desired terms plus spanned interference.
    """
    q = points.field.q
    off = 0
    for l in range(1, params.layers + 1):
        inv_d = pow(points.diff(l, server), q - 2, q)
        for k in range(1, round_k):
            try:
                sym = decoded[(l, k)]
            except KeyError:
                raise ValueError(f"round {round_k} offset needs decoded symbol (l={l}, k={k})")
            off = (off + sym * pow(inv_d, round_k - k + 1, q)) % q
    return off


def _normalize_answers(answers) -> dict[int, AnswerBundle]:
    if isinstance(answers, dict):
        bundles = answers.values()
    else:
        bundles = list(answers)
    out = {}
    for ab in bundles:
        if ab.server in out:
            raise ValueError(f"duplicate answer bundle for server {ab.server}")
        out[ab.server] = ab
    return out


def decoding_matrix_for(
    points: EvaluationPoints, params: ProtocolParams, servers
) -> DecodingMatrix:
    return build_decoding_matrix(
        points, tuple(servers), params.layers, params.decode_width
    )


def decode(answers, points: EvaluationPoints, params: ProtocolParams) -> list[int]:
    """Recover all ell desired symbols from >= N-U answer bundles.

    Rounds are decoded in order; each round solves for the full width
    coefficient vector (tolerating up to B corrupted scalars), keeps its first
    L entries as the desired symbols, and discards the interference slots.
    Exactly N-U bundles are consumed (the lowest responsive server indices).
    """
    by_server = _normalize_answers(answers)
    need = params.responsive_count
    if len(by_server) < need:
        raise ValueError(
            f"decoding needs answers from {need} servers, got {len(by_server)}"
        )
    chosen = sorted(by_server)[:need]
    kc = params.code_dim
    for n in chosen:
        if len(by_server[n].scalars) != kc:
            raise ValueError(f"server {n} answer must hold {kc} scalars")
    q = points.field.q
    decoder = decoder_for(decoding_matrix_for(points, params, chosen))
    decoded: dict[tuple[int, int], int] = {}
    for rk in range(1, kc + 1):
        corrected = [
            (by_server[n].scalars[rk - 1]
             - interference_offset(decoded, points, params, rk, n)) % q
            for n in chosen
        ]
        coeffs = decoder.solve(corrected, params.max_byzantine)
        for l in range(1, params.layers + 1):
            decoded[(l, rk)] = coeffs[l - 1]
    return [
        decoded[(l, k)]
        for k in range(1, kc + 1)
        for l in range(1, params.layers + 1)
    ]


def recover_messages(
    storages, points: EvaluationPoints, params: ProtocolParams
) -> MessageSet:
    """Rebuild every message from any K_c + X server shares (the MDS property).

    Independent of the retrieval path: per layer it solves the linear system
    whose row for server n is the storage coefficient pattern
    [1/d^K_c, ..., 1/d, 1, d, ..., d^(X-1)] with d = f_l - a_n.
    """
    storages = list(storages)
    need = params.code_dim + params.security
    if len(storages) < need:
        raise ValueError(f"message recovery needs {need} shares, got {len(storages)}")
    storages = storages[:need]
    field = points.field
    q = field.q
    kc, xx, kk = params.code_dim, params.security, params.num_messages
    symbols = [[0] * params.message_len for _ in range(kk)]
    for l in range(1, params.layers + 1):
        rows = []
        for st in storages:
            d = points.diff(l, st.server)
            inv_d = pow(d, q - 2, q)
            rows.append(
                [pow(inv_d, kc - k + 1, q) for k in range(1, kc + 1)]
                + [pow(d, x - 1, q) for x in range(1, xx + 1)]
            )
        system = FieldMatrix(field, rows)
        for j in range(kk):
            sol = system.solve([st.shares[l - 1][j] for st in storages])
            for k in range(1, kc + 1):
                symbols[j][params.layers * (k - 1) + l - 1] = sol[k - 1]
    return MessageSet(
        field, params.layers, params.code_dim, tuple(tuple(m) for m in symbols)
    )


def _check_dims(messages: MessageSet, params: ProtocolParams, points: EvaluationPoints):
    if messages.layers != params.layers or messages.code_dim != params.code_dim:
        raise ValueError("message layout does not match the parameters")
    if messages.num_messages != params.num_messages:
        raise ValueError("message count does not match the parameters")
    if len(points.f) != params.layers or len(points.alpha) != params.num_servers:
        raise ValueError("evaluation point counts do not match the parameters")
    if messages.field != points.field:
        raise ValueError("messages and points live in different fields")
