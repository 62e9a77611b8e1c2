"""Independent brute-force oracles for the test suite.

These never call the code paths they check: answers are re-derived by
expanding the storage/query product as a Laurent polynomial in (f_l - a_n)
directly from the raw message and noise vectors, and evaluated numerically.
"""

from __future__ import annotations

from xstpir.linalg import EvaluationPoints
from xstpir.protocol import MessageSet, ProtocolParams, QueryNoise, StorageNoise


def _dot(q: int, u, v) -> int:
    return sum(a * b for a, b in zip(u, v)) % q


def answer_coefficients(
    messages: MessageSet,
    storage_noise: StorageNoise,
    query_noise: QueryNoise,
    theta: int,
    params: ProtocolParams,
    round_k: int,
    q: int,
) -> dict[tuple[int, int], int]:
    """Server-independent coefficients c[(l, e)] of the round answer.

    A_nk = sum over (l, e) of c[(l, e)] * (f_l - a_n)^e: the storage share
    contributes exponents -(K_c-k+1) (messages) and x-1 (noise), the query
    contributes K_c - round_k (selector) and K_c + t - 1 (noise); c collects
    the inner products of every cross pair.
    """
    kc = params.code_dim
    e_theta = [1 if j == theta - 1 else 0 for j in range(params.num_messages)]
    coeffs: dict[tuple[int, int], int] = {}
    for l in range(1, params.layers + 1):
        storage_terms = [
            (-(kc - k + 1), messages.layer_vector(l, k)) for k in range(1, kc + 1)
        ] + [
            (x - 1, storage_noise.vector(l, x)) for x in range(1, params.security + 1)
        ]
        query_terms = [(kc - round_k, e_theta)] + [
            (kc + t - 1, query_noise.vector(l, t, round_k))
            for t in range(1, params.privacy + 1)
        ]
        for e1, v1 in storage_terms:
            for e2, v2 in query_terms:
                key = (l, e1 + e2)
                coeffs[key] = (coeffs.get(key, 0) + _dot(q, v1, v2)) % q
    return coeffs


def evaluate_coefficients(
    coeffs: dict[tuple[int, int], int], points: EvaluationPoints, server: int
) -> int:
    """Numeric value of a Laurent expansion at one server's alpha."""
    q = points.field.q
    total = 0
    for (l, e), c in coeffs.items():
        d = points.diff(l, server)
        base = pow(d, q - 2, q) if e < 0 else d
        total = (total + c * pow(base, abs(e), q)) % q
    return total


def brute_force_inverse(q: int, a: int) -> int:
    """Exhaustive search for the multiplicative inverse."""
    for b in range(1, q):
        if (a * b) % q == 1:
            return b
    raise AssertionError(f"{a} has no inverse mod {q}")


def share_product_coefficients(inst, noise, params, layer: int):
    """Exponent -> matrix coefficients of the share product A~_nl B~_nl.

    Expands term by term from the raw blocks and noise matrices, never through
    the share construction: A-share components carry exponents -(K_c-k+1) and
    x-1, B-share components 0 and K_c+x'-1; the product collects all pairs.
    """
    kc = params.code_dim
    a_terms = [
        (-(kc - k + 1), inst.a_block(params, layer, k)) for k in range(1, kc + 1)
    ] + [
        (x - 1, noise.a_noise[layer - 1][x - 1])
        for x in range(1, params.security_a + 1)
    ]
    b_terms = [(0, inst.b_concat)] + [
        (kc + x - 1, noise.b_noise[layer - 1][x - 1])
        for x in range(1, params.security_b + 1)
    ]
    coeffs = {}
    for e1, ma in a_terms:
        for e2, mb in b_terms:
            e = e1 + e2
            term = ma.mul(mb)
            coeffs[e] = coeffs[e].add(term) if e in coeffs else term
    return coeffs


def evaluate_matrix_coefficients(coeffs, points, layer: int, server: int):
    """Numeric share product at one server from its Laurent expansion."""
    q = points.field.q
    d = points.diff(layer, server)
    inv_d = pow(d, q - 2, q)
    total = None
    for e, m in coeffs.items():
        base = inv_d if e < 0 else d
        term = m.scale(pow(base, abs(e), q))
        total = term if total is None else total.add(term)
    return total
