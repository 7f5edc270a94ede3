"""End-to-end synthesis: factor a unitary, then approximate every
non-basic single-qubit gate over the basic alphabet.

The reported eps_total sums the achieved per-gate distances (each at
most epsilon when the recursion depth suffices). Operator-norm errors
add across a product of unitaries, and embedding a one-qubit gate into
the full register preserves the distance, so the reconstruction error
of the final sequence never exceeds eps_total.
"""
from __future__ import annotations

import numpy as np

from ..core.linalg import num_qubits, require_unitary
from ..errors import QwhileError
from .qsd import qsd_decompose
from .sequences import GateOp, GateSequence, GateSet, strip_phase
from .sk import SKNet, default_net, solovay_kitaev
from .two_level import two_level_decompose, two_level_to_circuit

METHODS = ("qr", "qsd")

# Factor expansions re-emit the same few 2x2 matrices (square roots,
# basis-change blocks) hundreds of times; approximate each distinct
# matrix once per (net, epsilon, depth).
_SK_CACHE: dict[tuple, tuple[tuple[str, ...], float]] = {}
_SK_CACHE_MAX = 4096


def _approximate_single_qubit(op: GateOp, basic: GateSet, epsilon: float,
                              net: SKNet, depth: int) -> tuple[list[GateOp], float]:
    name = basic.match_single_qubit(op.matrix)
    if name is not None:
        return [GateOp(name, op.qubits, basic[name])], 0.0
    from .sk import _canonical_key
    key = (id(net), epsilon, depth, _canonical_key(strip_phase(op.matrix)))
    hit = _SK_CACHE.get(key)
    if hit is None:
        approx = solovay_kitaev(op.matrix, epsilon, net, depth)
        hit = (tuple(o.name for o in approx.ops), approx.eps_total)
        if len(_SK_CACHE) < _SK_CACHE_MAX:
            _SK_CACHE[key] = hit
    names, err = hit
    # alphabet matrices are shared read-only across ops
    ops = [GateOp(nm, op.qubits, net.alphabet[nm]) for nm in names]
    return ops, err


def synthesize(u: np.ndarray, method: str = "qsd", basic: GateSet | None = None,
               epsilon: float = 1e-3, net: SKNet | None = None,
               sk_depth: int = 5) -> GateSequence:
    """Decompose a unitary into basic gates; 'qr' uses two-level factors
    with Gray-code circuits, 'qsd' the cosine-sine recursion. Every
    emitted gate is drawn from the basic set."""
    if method not in METHODS:
        raise QwhileError(f"unknown method {method!r}; expected one of {METHODS}")
    u = require_unitary(u, what="synthesis input")
    basic = basic or GateSet.default()
    net = net or default_net()
    n = num_qubits(u.shape[0])

    if n == 1:
        exact = GateSequence((GateOp("u2", (0,), u.copy()),))
    elif method == "qr":
        ops: list[GateOp] = []
        # product(factors) = u, so the last factor acts on the state first
        for factor in reversed(two_level_decompose(u)):
            ops += two_level_to_circuit(factor).ops
        exact = GateSequence(tuple(ops))
    else:
        exact = qsd_decompose(u, basic)

    final: list[GateOp] = []
    eps_total = 0.0
    for op in exact.ops:
        if len(op.qubits) != 1:
            if op.name not in basic:
                raise QwhileError(f"multi-qubit gate {op.name!r} outside the basic set")
            final.append(op)
            continue
        replaced, err = _approximate_single_qubit(op, basic, epsilon, net, sk_depth)
        final.extend(replaced)
        eps_total += err
    return GateSequence(tuple(final), eps_total=eps_total)
