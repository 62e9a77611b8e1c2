"""Private secure distributed matrix multiplication built on the retrieval scheme.

The confidential blocks A_1..A_ell are secret-shared exactly like message
columns (Cauchy terms plus X_A noise layers), the library matrices B_1..B_M
are optionally shared with X_B noise on the interference span, and the block
selector Q_theta is hidden like a query.  Each server returns
sum_l A~_nl B~_nl Q_nl per round; the per-entry scalars then decode with the
same round-by-round interference cancellation, because the share product has
the storage shape with an effective noise level of K_c + X_A + X_B - 1
(or X_A when the library is public).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .field import PrimeField, smallest_prime_geq
from .linalg import EvaluationPoints, FieldMatrix, build_decoding_matrix
from .protocol import InfeasibleParamsError


@dataclass(frozen=True)
class PsdmmParams:
    """Parameter tuple for one multiplication instance, with derived layout."""

    num_servers: int    # N
    privacy: int        # T
    security_a: int     # X_A
    security_b: int     # X_B
    library_size: int   # M
    rows_a: int         # lambda
    inner_dim: int      # chi
    cols_b: int         # mu
    code_dim: int       # K_c
    layers: int         # L, derived
    block_count: int    # ell = K_c * L, derived

    def __post_init__(self):
        if min(self.num_servers, self.library_size, self.code_dim) < 1:
            raise ValueError("need N, M, K_c >= 1")
        if min(self.rows_a, self.inner_dim, self.cols_b) < 1:
            raise ValueError("matrix dimensions must be positive")
        if min(self.privacy, self.security_a, self.security_b) < 0:
            raise ValueError("T, X_A, X_B must be non-negative")
        if self.layers != _derived_layers(
            self.num_servers, self.privacy, self.security_a, self.security_b, self.code_dim
        ) or self.block_count != self.layers * self.code_dim:
            raise ValueError("derived fields inconsistent; use derive_psdmm_params()")
        if self.layers < 1:
            raise InfeasibleParamsError(f"L = {self.layers} < 1: K_c too large for N")

    @property
    def shared_library(self) -> bool:
        return self.security_b > 0

    @property
    def effective_security(self) -> int:
        """Noise span of the share product: K_c+X_A+X_B-1 if B is shared, else X_A."""
        if self.shared_library:
            return self.code_dim + self.security_a + self.security_b - 1
        return self.security_a

    @property
    def decode_width(self) -> int:
        return self.layers + self.code_dim + self.effective_security + self.privacy - 1

    @property
    def min_field_size(self) -> int:
        return self.layers + self.num_servers

    @property
    def upload_cost(self) -> Fraction:
        """Share symbols uploaded per confidential symbol: N / K_c."""
        return Fraction(self.num_servers, self.code_dim)

    @property
    def download_cost(self) -> Fraction:
        """Answer symbols downloaded per product symbol: N / L."""
        return Fraction(self.num_servers, self.layers)


def _derived_layers(n: int, t: int, xa: int, xb: int, kc: int) -> int:
    if xb > 0:
        return n - (xa + xb + t + 2 * kc - 2)
    return n - (xa + t + kc - 1)


def derive_psdmm_params(
    num_servers: int,
    privacy: int,
    security_a: int,
    security_b: int,
    library_size: int,
    rows_a: int,
    inner_dim: int,
    cols_b: int,
    code_dim: int,
) -> PsdmmParams:
    layers = _derived_layers(num_servers, privacy, security_a, security_b, code_dim)
    return PsdmmParams(
        num_servers=num_servers,
        privacy=privacy,
        security_a=security_a,
        security_b=security_b,
        library_size=library_size,
        rows_a=rows_a,
        inner_dim=inner_dim,
        cols_b=cols_b,
        code_dim=code_dim,
        layers=layers,
        block_count=layers * code_dim,
    )


def default_field(params: PsdmmParams) -> PrimeField:
    return PrimeField(smallest_prime_geq(params.min_field_size))


def default_points(params: PsdmmParams, field: PrimeField | None = None) -> EvaluationPoints:
    if field is None:
        field = default_field(params)
    return EvaluationPoints.default(field, params.layers, params.num_servers)


def _random_matrix(field: PrimeField, rng, rows: int, cols: int) -> FieldMatrix:
    return FieldMatrix(field, [field.random_vector(rng, cols) for _ in range(rows)])


@dataclass(frozen=True)
class PsdmmInstance:
    """The ell confidential blocks, the library, and its concatenation."""

    field: PrimeField
    a_blocks: tuple[FieldMatrix, ...]   # ell of lambda x chi
    b_library: tuple[FieldMatrix, ...]  # M of chi x mu

    @property
    def b_concat(self) -> FieldMatrix:
        """[B_1 B_2 ... B_M], chi x M*mu."""
        data = [
            [v for bm in self.b_library for v in bm.data[r]]
            for r in range(self.b_library[0].rows)
        ]
        return FieldMatrix(self.field, data)

    def a_block(self, params: PsdmmParams, l: int, k: int) -> FieldMatrix:
        """A_lk = A_(L(k-1)+l), 1-based."""
        return self.a_blocks[params.layers * (k - 1) + l - 1]

    @classmethod
    def random(cls, field: PrimeField, params: PsdmmParams, rng) -> "PsdmmInstance":
        return cls(
            field,
            tuple(
                _random_matrix(field, rng, params.rows_a, params.inner_dim)
                for _ in range(params.block_count)
            ),
            tuple(
                _random_matrix(field, rng, params.inner_dim, params.cols_b)
                for _ in range(params.library_size)
            ),
        )


@dataclass(frozen=True)
class PsdmmNoise:
    """All noise matrices: A-share, B-share, and query layers."""

    a_noise: tuple[tuple[FieldMatrix, ...], ...]      # [l][x] lambda x chi
    b_noise: tuple[tuple[FieldMatrix, ...], ...]      # [l][x'] chi x M*mu
    query_noise: tuple[tuple[tuple[FieldMatrix, ...], ...], ...]  # [l][t][round] M*mu x mu

    @classmethod
    def random(cls, field: PrimeField, params: PsdmmParams, rng) -> "PsdmmNoise":
        wide = params.library_size * params.cols_b
        return cls(
            tuple(
                tuple(
                    _random_matrix(field, rng, params.rows_a, params.inner_dim)
                    for _ in range(params.security_a)
                )
                for _ in range(params.layers)
            ),
            tuple(
                tuple(
                    _random_matrix(field, rng, params.inner_dim, wide)
                    for _ in range(params.security_b)
                )
                for _ in range(params.layers)
            ),
            tuple(
                tuple(
                    tuple(
                        _random_matrix(field, rng, wide, params.cols_b)
                        for _ in range(params.code_dim)
                    )
                    for _ in range(params.privacy)
                )
                for _ in range(params.layers)
            ),
        )


def share_a(
    inst: PsdmmInstance, noise: PsdmmNoise, points: EvaluationPoints, params: PsdmmParams
) -> list[list[FieldMatrix]]:
    """Per-server confidential shares: A~_nl = sum_k A_lk/d^(K_c-k+1) + sum_x d^(x-1) Z_lx."""
    q = points.field.q
    kc = params.code_dim
    out = []
    for n in range(1, params.num_servers + 1):
        per_layer = []
        for l in range(1, params.layers + 1):
            d = points.diff(l, n)
            inv_d = pow(d, q - 2, q)
            acc = FieldMatrix.zeros(points.field, params.rows_a, params.inner_dim)
            for k in range(1, kc + 1):
                acc = acc.add(inst.a_block(params, l, k).scale(pow(inv_d, kc - k + 1, q)))
            for x in range(1, params.security_a + 1):
                acc = acc.add(noise.a_noise[l - 1][x - 1].scale(pow(d, x - 1, q)))
            per_layer.append(acc)
        out.append(per_layer)
    return out


def share_b(
    inst: PsdmmInstance, noise: PsdmmNoise, points: EvaluationPoints, params: PsdmmParams
) -> list[list[FieldMatrix]]:
    """Per-server library shares: B~_nl = B + sum_x' d^(K_c+x'-1) Z'_lx'.

    With X_B = 0 every share is the plain concatenated library.
    """
    b = inst.b_concat
    if not params.shared_library:
        return [[b for _ in range(params.layers)] for _ in range(params.num_servers)]
    q = points.field.q
    kc = params.code_dim
    out = []
    for n in range(1, params.num_servers + 1):
        per_layer = []
        for l in range(1, params.layers + 1):
            d = points.diff(l, n)
            acc = b
            for x in range(1, params.security_b + 1):
                acc = acc.add(noise.b_noise[l - 1][x - 1].scale(pow(d, kc + x - 1, q)))
            per_layer.append(acc)
        out.append(per_layer)
    return out


def block_selector(field: PrimeField, library_size: int, cols_b: int, theta: int) -> FieldMatrix:
    """Q_theta: M*mu x mu block column holding the identity at block theta."""
    if not 1 <= theta <= library_size:
        raise ValueError(f"theta must be in 1..{library_size}")
    wide = library_size * cols_b
    data = [[0] * cols_b for _ in range(wide)]
    base = (theta - 1) * cols_b
    for i in range(cols_b):
        data[base + i][i] = 1
    return FieldMatrix(field, data)


def psdmm_query(
    theta: int, noise: PsdmmNoise, points: EvaluationPoints, params: PsdmmParams
) -> list[list[list[FieldMatrix]]]:
    """Per-server block queries Q_nl = d^(K_c-k) Q_theta + sum_t d^(K_c+t-1) Z''_lt."""
    q = points.field.q
    kc = params.code_dim
    q_theta = block_selector(points.field, params.library_size, params.cols_b, theta)
    out = []
    for n in range(1, params.num_servers + 1):
        rounds = []
        for rk in range(1, kc + 1):
            per_layer = []
            for l in range(1, params.layers + 1):
                d = points.diff(l, n)
                acc = q_theta.scale(pow(d, kc - rk, q))
                for t in range(1, params.privacy + 1):
                    acc = acc.add(
                        noise.query_noise[l - 1][t - 1][rk - 1].scale(pow(d, kc + t - 1, q))
                    )
                per_layer.append(acc)
            rounds.append(per_layer)
        out.append(rounds)
    return out


def psdmm_answer(
    a_share_n: list[FieldMatrix],
    b_share_n: list[FieldMatrix],
    queries_n: list[list[FieldMatrix]],
) -> list[FieldMatrix]:
    """One server's K_c answers: Y_nk = sum_l A~_nl (B~_nl Q_nlk), each lambda x mu."""
    if len(a_share_n) != len(b_share_n):
        raise ValueError("share layer counts differ")
    out = []
    for per_layer in queries_n:
        if len(per_layer) != len(a_share_n):
            raise ValueError("query layer count mismatch")
        acc = None
        for a_m, b_m, q_m in zip(a_share_n, b_share_n, per_layer):
            term = a_m.mul(b_m.mul(q_m))
            acc = term if acc is None else acc.add(term)
        out.append(acc)
    return out


def psdmm_decode(
    answers: list[list[FieldMatrix]], points: EvaluationPoints, params: PsdmmParams
) -> list[FieldMatrix]:
    """Recover (A_1 B_theta, ..., A_ell B_theta) from all N servers' answers.

    Runs the scalar round decoder once per output entry; the single N x N
    decoding matrix inversion is shared by every entry.
    """
    if len(answers) != params.num_servers:
        raise ValueError("answers from all servers are required")
    n_srv = params.num_servers
    if params.decode_width != n_srv:
        raise ValueError("decode width must equal N; wrong derived parameters")
    q = points.field.q
    kc = params.code_dim
    matrix = build_decoding_matrix(
        points, tuple(range(1, n_srv + 1)), params.layers, params.decode_width
    )
    m_inv = matrix.matrix().inverse()
    lam, mu = params.rows_a, params.cols_b
    # decoded[(l, k)] is the lambda x mu product block for round k, layer l
    decoded: dict[tuple[int, int], list[list[int]]] = {}
    inv_diffs = {
        (l, n): pow(points.diff(l, n), q - 2, q)
        for l in range(1, params.layers + 1)
        for n in range(1, n_srv + 1)
    }
    for rk in range(1, kc + 1):
        corrected_rows = []
        for n in range(1, n_srv + 1):
            y = answers[n - 1][rk - 1]
            if (y.rows, y.cols) != (lam, mu):
                raise ValueError("answer block has wrong shape")
            offs = [[0] * mu for _ in range(lam)]
            for l in range(1, params.layers + 1):
                for k in range(1, rk):
                    c = pow(inv_diffs[(l, n)], rk - k + 1, q)
                    prev = decoded[(l, k)]
                    for i in range(lam):
                        for j in range(mu):
                            offs[i][j] = (offs[i][j] + c * prev[i][j]) % q
            corrected_rows.append(
                [
                    [(y.data[i][j] - offs[i][j]) % q for j in range(mu)]
                    for i in range(lam)
                ]
            )
        for l in range(1, params.layers + 1):
            decoded[(l, rk)] = [[0] * mu for _ in range(lam)]
        for i in range(lam):
            for j in range(mu):
                coeffs = m_inv.matvec([corrected_rows[n][i][j] for n in range(n_srv)])
                for l in range(1, params.layers + 1):
                    decoded[(l, rk)][i][j] = coeffs[l - 1]
    return [
        FieldMatrix(points.field, decoded[(l, k)])
        for k in range(1, kc + 1)
        for l in range(1, params.layers + 1)
    ]


@dataclass(frozen=True)
class CostReport:
    """Exact upload/download pair for one feasible code dimension."""

    code_dim: int
    upload: Fraction
    download: Fraction
    shared_library: bool
    prior_download: Fraction | None = None

    @property
    def improves_on_prior(self) -> bool | None:
        if self.prior_download is None:
            return None
        return self.download < self.prior_download


def prior_download_cost(num_servers: int, code_dim: int) -> Fraction:
    """Asymptotic download of the earlier scheme at X_A=T=1, X_B=0."""
    if num_servers - (code_dim + 1) <= 0:
        raise ValueError("prior-cost formula needs N > K_c + 1")
    return Fraction(code_dim + 1, code_dim) * Fraction(
        num_servers, num_servers - (code_dim + 1)
    )


def cost_hull(
    num_servers: int, privacy: int, security_a: int, security_b: int
) -> list[CostReport]:
    """All feasible (upload, download) pairs, one per K_c; infeasible K_c dropped.

    When X_A = T = 1 and X_B = 0 each report carries the prior scheme's
    asymptotic download for comparison.
    """
    if security_b > 0:
        kc_max = (num_servers + 1 - security_a - security_b - privacy) // 2
    else:
        kc_max = num_servers + 1 - security_a - privacy
    reports = []
    for kc in range(1, max(kc_max, 0) + 1):
        layers = _derived_layers(num_servers, privacy, security_a, security_b, kc)
        if layers < 1:
            continue
        prior = None
        if security_a == 1 and privacy == 1 and security_b == 0:
            prior = prior_download_cost(num_servers, kc)
        reports.append(
            CostReport(
                code_dim=kc,
                upload=Fraction(num_servers, kc),
                download=Fraction(num_servers, layers),
                shared_library=security_b > 0,
                prior_download=prior,
            )
        )
    return reports
