"""Modular exponentiation circuits |k>|1> -> |k>|a^k mod N>.

The accumulator product is built digit by digit from the exponent register:
for each exponent digit, an out-of-place controlled modular multiply writes
acc * A^(k_j) into a fresh register through doubly-controlled modular
additive shifts with precomputed constants, the registers are swapped, and
the stale copy is uncomputed with the inverse multiplier.

Binary exponent digits select the multiply with one strict control; ternary
digits are handled as the strict pair C_1(S_1) C_2(S_2), with the residual
digit-value multiplication decomposed into strict branches as well, so the
circuit is exact on every basis state.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .circuit import Circuit, GateOp
from .errors import SizeError
from .gates import matrix_for_name
from .widgets import adjoint_ops
from .arithmetic import (
    cnot_prim_ops,
    mod_add_binary_ops,
    mod_add_ternary_ops,
    toffoli_prim_ops,
    _pool_size,
)


def _g(name: str, *wires: int) -> GateOp:
    return GateOp(matrix_for_name(name), tuple(wires))


@dataclass(frozen=True)
class ModExpSpec:
    base: int
    modulus: int
    encoding: str = "binary"
    exponent_digits: int | None = None   # default 2n (or 2m)
    control_strategy: str = "full-register"

    def __post_init__(self):
        if gcd(self.base, self.modulus) != 1:
            raise SizeError(f"gcd({self.base},{self.modulus}) != 1")
        if self.encoding not in ("binary", "ternary"):
            raise SizeError(self.encoding)

    @property
    def radix(self) -> int:
        return 2 if self.encoding == "binary" else 3

    @property
    def value_digits(self) -> int:
        """Digits of the value registers: smallest with radix^digits >= 2N."""
        d = 1
        while self.radix**d < 2 * self.modulus:
            d += 1
        return d

    @property
    def exp_digits(self) -> int:
        if self.exponent_digits is not None:
            return self.exponent_digits
        n = 1
        while self.radix**n < self.modulus:
            n += 1
        return 2 * n


@dataclass(frozen=True)
class ModExpLayout:
    circuit: Circuit
    exponent: tuple[int, ...]
    accumulator: tuple[int, ...]
    scratch: tuple[int, ...]
    dctrl_shift_count: int


def _binary_ctrl_mult_ops(kappa, acc, acc2, A, T, x, marker, mu, mult, N):
    """acc2 (=0) <- d_kappa * acc * mult; then swap; then uncompute acc2."""
    n = len(acc)
    inv = pow(mult, -1, N)
    ops: list[GateOp] = []
    shifts = 0
    for ell in range(n):
        w = (2**ell * mult) % N
        if w == 0:
            continue
        pro = [_g("SUM", kappa, acc[ell]), _g("C2[INC]", acc[ell], mu)]
        ops += pro + mod_add_binary_ops(w, N, acc2, A, T, x, marker, u=mu) + adjoint_ops(pro)
        shifts += 1
    for ell in range(n):
        ops += cnot_prim_ops(acc2[ell], acc[ell])
        ops += toffoli_prim_ops(kappa, acc[ell], acc2[ell], marker)
        ops += cnot_prim_ops(acc2[ell], acc[ell])
    for ell in range(n):
        w = (2**ell * inv) % N
        if w == 0:
            continue
        pro = [_g("SUM", kappa, acc[ell]), _g("C2[INC]", acc[ell], mu)]
        ops += pro + mod_add_binary_ops((N - w) % N, N, acc2, A, T, x, marker, u=mu) + adjoint_ops(pro)
        shifts += 1
    return ops, shifts


def _ternary_ctrl_mult_ops(kappa, acc, acc2, A, T, x, marker, u1, u, pool, a_pow, N):
    """Ternary-digit controlled multiply: acc2 <- acc * a_pow^(k) for k on kappa."""
    m = len(acc)
    ops: list[GateOp] = []
    shifts = 0
    for f in (1, 2):
        mult = pow(a_pow, f, N)
        ops += [_g(f"C{f}[INC]", kappa, u1)]
        for ell in range(m):
            for gval in (1, 2):
                w = (gval * 3**ell * mult) % N
                if w == 0:
                    continue
                ops += [_g(f"C{gval}[SUM]", acc[ell], u1, u)]
                ops += mod_add_ternary_ops(w, N, acc2, A, T, x, marker, pool, u=u)
                ops += [_g(f"C{gval}[SUM]_INV", acc[ell], u1, u)]
                shifts += 1
        ops += [_g(f"C{f}[INC]_INV", kappa, u1)]
    # k = 0 branch: digitwise copy
    for ell in range(m):
        ops += [_g("C0[SUM]", kappa, acc[ell], acc2[ell])]
    for ell in range(m):
        ops += [_g("TSWAP", acc[ell], acc2[ell])]
    for f in (1, 2):
        inv = pow(a_pow, -f, N)
        ops += [_g(f"C{f}[INC]", kappa, u1)]
        for ell in range(m):
            for gval in (1, 2):
                w = (gval * 3**ell * inv) % N
                if w == 0:
                    continue
                ops += [_g(f"C{gval}[SUM]", acc[ell], u1, u)]
                ops += mod_add_ternary_ops((N - w) % N, N, acc2, A, T, x, marker, pool, u=u)
                ops += [_g(f"C{gval}[SUM]_INV", acc[ell], u1, u)]
                shifts += 1
        ops += [_g(f"C{f}[INC]_INV", kappa, u1)]
    for ell in range(m):
        ops += [_g("C0[SUM]_INV", kappa, acc[ell], acc2[ell])]
    return ops, shifts


def modexp_circuit(spec: ModExpSpec) -> ModExpLayout:
    """Full-register modular exponentiation circuit."""
    N, base = spec.modulus, spec.base
    d = spec.radix
    e = spec.exp_digits
    v = spec.value_digits
    k_wires = tuple(range(e))
    acc = tuple(range(e, e + v))
    acc2 = tuple(range(e + v, e + 2 * v))
    nxt = e + 2 * v
    A, T, x, marker = nxt, nxt + 1, nxt + 2, nxt + 3
    ops: list[GateOp] = []
    total_shifts = 0

    if spec.encoding == "binary":
        mu = nxt + 4
        width = nxt + 5
        scratch = (A, T, x, marker, mu)
        ops.append(_g("TAU1[0,1]", acc[0]))  # acc <- 1
        for j in range(e):
            mult = pow(base, 2**j, N)
            if mult == 1:
                continue
            sub, shifts = _binary_ctrl_mult_ops(
                k_wires[j], acc, acc2, A, T, x, marker, mu, mult, N)
            ops += sub
            total_shifts += shifts
    else:
        u1, u = nxt + 4, nxt + 5
        pool_base = nxt + 6
        consts = [(w - N) % 3**v for w in range(N)] + [N % 3**v]
        npool = _pool_size(consts, v)
        pool = list(range(pool_base, pool_base + npool))
        width = pool_base + npool
        scratch = (A, T, x, marker, u1, u, *pool)
        ops.append(_g("INC", acc[0]))  # acc <- 1
        for j in range(e):
            a_pow = pow(base, 3**j, N)
            if a_pow == 1:
                continue
            sub, shifts = _ternary_ctrl_mult_ops(
                k_wires[j], acc, acc2, A, T, x, marker, u1, u, pool, a_pow, N)
            ops += sub
            total_shifts += shifts

    circ = Circuit(width, tuple(ops),
                   ancillas=frozenset(acc2) | frozenset(scratch),
                   name=f"modexp-{base}^k mod {N}-{spec.encoding}")
    return ModExpLayout(circ, k_wires, acc, scratch, total_shifts)


def modeled_shift_count(spec: ModExpSpec) -> int:
    """Leading-order doubly-controlled shift tally: 2n^2 binary, 4m^2 ternary."""
    if spec.encoding == "binary":
        n = spec.exp_digits // 2
        return 2 * n * n
    m = spec.exp_digits // 2
    return 4 * m * m
