"""Hamming-weight class and EXACT-one oracles.

The weight class g(x) = min(popcount(x), 2) is tracked on qubit pairs with
the encoding 0 -> (0,0), 1 -> (1,0), 2 -> (0,1); the code (1,1) is never
produced on the output pair of a valid run. Pairs are merged with the
five-gate h block; a full merge tree computes g_n, and the EXACT-one flag
f_n(x) = [popcount(x) = 1] is obtained from three segment rounds that
borrow the idle segments as conditionally clean ancillae, so the oracle
needs only two scratch qubits besides the flag.
"""
from __future__ import annotations

from .circuit import (
    Circuit, RegisterLayout, make_gate, mcx,
    SYSTEM, SCRATCH, FLAG,
)

ENCODE = {0: (0, 0), 1: (1, 0), 2: (0, 1)}
_DECODE = {v: k for k, v in ENCODE.items()}


def encode_weight_class(cls: int) -> tuple[int, int]:
    return ENCODE[cls]


def decode_weight_class(b0: int, b1: int) -> int:
    """Class for an encoding pair; (1,1) is outside the valid code."""
    try:
        return _DECODE[(b0, b1)]
    except KeyError:
        raise ValueError("invalid weight-class code (1,1)") from None


def classical_g(bits) -> int:
    """min(popcount, 2) over an iterable of bits."""
    return min(sum(int(b) for b in bits), 2)


def classical_f(bits) -> int:
    """1 iff the bitstring has Hamming weight exactly one."""
    return int(sum(int(b) for b in bits) == 1)


def classical_h(a: int, b: int) -> int:
    return min(a + b, 2)


# ---------------------------------------------------------------------------
# Gate emitters over explicit qubit indices

def _emit_g2(c: Circuit, x0: int, x1: int, b0: int, b1: int) -> None:
    """b0 <- x0 xor x1 (weight one), b1 <- x0*x1 (weight two)."""
    c.cx(x0, b0)
    c.cx(x1, b0)
    c.ccx(x0, x1, b1)


def _emit_h(c: Circuit, a: tuple[int, int], b: tuple[int, int],
            out: tuple[int, int]) -> None:
    """Merge two weight-class pairs into `out` (zeroed).

    First block: out0 = [A=1][B<2] xor [B=1][A<2]; controlling a0/b0 alone
    suffices for the class-1 check because (1,1) is unreachable, and the
    two Toffolis cancel when both inputs are class 1. Second and third
    blocks: out1 = 1 xor [A<2][B<2] xor [A=1][B=1].
    """
    a0, a1 = a
    b0, b1 = b
    o0, o1 = out
    c.ccx(a0, b1, o0, states=(1, 0))
    c.ccx(b0, a1, o0, states=(1, 0))
    c.x(o1)
    c.ccx(a1, b1, o1, states=(0, 0))
    c.ccx(a0, b0, o1, states=(1, 1))


def _emit_weight_tree(c: Circuit, data: list[int], pool: list[int],
                      out_pair: tuple[int, int]) -> int:
    """Leaf encodings (g_2 per qubit pair, bare g_1 for an odd leftover)
    followed by pairwise h merges; the final merge writes `out_pair`.

    Returns the number of pool qubits consumed. Odd leftover blocks carry
    into the next merge level, which reproduces the remainder handling of
    the recursive construction.
    """
    n = len(data)
    if n < 2:
        raise ValueError("weight tree needs at least two data qubits")
    used = 0

    def take() -> int:
        nonlocal used
        if used >= len(pool):
            raise ValueError("ancilla pool exhausted while building weight tree")
        used += 1
        return pool[used - 1]

    blocks: list[tuple[int, int]] = []
    n_pairs = n // 2
    single_leaf = n_pairs == 1 and n % 2 == 0
    for i in range(n_pairs):
        pair = out_pair if single_leaf else (take(), take())
        _emit_g2(c, data[2 * i], data[2 * i + 1], pair[0], pair[1])
        blocks.append(pair)
    if n % 2:
        blocks.append((data[-1], take()))  # g_1: the data qubit is b0

    while len(blocks) > 1:
        nxt: list[tuple[int, int]] = []
        for i in range(0, len(blocks) - 1, 2):
            final = len(blocks) == 2
            tgt = out_pair if final else (take(), take())
            _emit_h(c, blocks[i], blocks[i + 1], tgt)
            nxt.append(tgt)
        if len(blocks) % 2:
            nxt.append(blocks[-1])
        blocks = nxt
    return used


# ---------------------------------------------------------------------------
# Standalone circuits

def build_g1() -> Circuit:
    """One data qubit plus one zeroed ancilla: the pair (data, ancilla)
    already is the binary encoding of g_1, so no gates are needed."""
    return Circuit(2, RegisterLayout({SYSTEM: (0,), FLAG: (1,)}))


def build_g2() -> Circuit:
    c = Circuit(4, RegisterLayout({SYSTEM: (0, 1), FLAG: (2, 3)}))
    _emit_g2(c, 0, 1, 2, 3)
    return c


def build_h_merge() -> Circuit:
    """Inputs: two encoding pairs on qubits (0,1) and (2,3); output pair on
    zeroed qubits (4,5)."""
    c = Circuit(6, RegisterLayout({SYSTEM: (0, 1, 2, 3), FLAG: (4, 5)}))
    _emit_h(c, (0, 1), (2, 3), (4, 5))
    return c


def intermediate_ancillas(n: int) -> int:
    """Zeroed ancillae needed by G_n besides the output pair: 2(n-2)+r."""
    return 2 * (n - 2) + (n % 2)


def build_gn(n: int, uncompute: bool = False) -> Circuit:
    """Weight-class circuit: G_n |x>|0..0> = |x>|...>|g_n(x)> with the
    encoding pair on the flag register. Intermediate ancillae are left
    computed unless `uncompute` is set, which doubles the depth."""
    if n < 2:
        raise ValueError("build_gn requires n >= 2")
    n_scratch = intermediate_ancillas(n)
    width = n + n_scratch + 2
    layout = RegisterLayout({
        SYSTEM: tuple(range(n)),
        SCRATCH: tuple(range(n, n + n_scratch)),
        FLAG: (width - 2, width - 1),
    })
    c = Circuit(width, layout)
    out_pair = (width - 2, width - 1)
    used = _emit_weight_tree(c, list(range(n)), list(layout[SCRATCH]), out_pair)
    if used != n_scratch:
        raise AssertionError(f"G_{n} consumed {used} ancillae, expected {n_scratch}")
    if uncompute:
        body = [g for g in c.gates if g.targets[0] not in out_pair]
        for g in reversed(body):
            c.append(g)  # X-family gates are self-inverse
    return c


def _segment_bounds(n: int) -> list[tuple[int, int]]:
    """Tri-partition x = x^(k) x^(k+l1) x^(k+l2) with n = 3k + r."""
    k, r = divmod(n, 3)
    l1 = 1 if r >= 1 else 0
    l2 = 1 if r == 2 else 0
    return [(0, k), (k, 2 * k + l1), (2 * k + l1, n)]


def build_exact_one(n: int) -> Circuit:
    """EXACT-one oracle: flag <- [popcount(x) = 1], two scratch ancillae
    restored, data unchanged, depth O(log n).

    Each round tests one segment: a white MCX writes [rest of x all zero]
    onto scratch 2, the segment's weight tree runs with the idle segments
    borrowed as conditionally clean ancillae (its class-1 bit lands on
    scratch 1), and a Toffoli accumulates the product onto the flag before
    everything is uncomputed. The borrowed values only reach the flag when
    scratch 2 certifies they were genuinely zero.
    """
    if n < 1:
        raise ValueError("build_exact_one requires n >= 1")
    width = n + 3
    layout = RegisterLayout({
        SYSTEM: tuple(range(n)),
        SCRATCH: (n, n + 1),
        FLAG: (n + 2,),
    })
    c = Circuit(width, layout)
    s1, s2, flag = n, n + 1, n + 2

    if n == 1:
        c.cx(0, flag)
        return c
    if n == 2:
        c.cx(0, flag)
        c.cx(1, flag)
        return c

    segments = [list(range(a, b)) for a, b in _segment_bounds(n)]
    for seg in reversed(segments):  # third, second, first
        comp = [q for q in range(n) if q not in seg]
        m = len(seg)
        if m >= 2:
            need = intermediate_ancillas(m) + 1  # plus the top b1 slot
            if need > len(comp):
                raise AssertionError(
                    f"segment of size {m} needs {need} borrowed qubits, "
                    f"only {len(comp)} available")
        zero_test = mcx([(q, 0) for q in comp], s2, clean=[s1])
        c.extend(zero_test, range(zero_test.width))

        g_gates: list = []
        if m == 1:
            class1_bit = seg[0]
        else:
            sub = Circuit(width)
            _emit_weight_tree(sub, seg, comp[1:], (s1, comp[0]))
            g_gates = sub.gates
            for g in g_gates:
                c.append(g)
            class1_bit = s1

        c.ccx(class1_bit, s2, flag)

        for g in reversed(g_gates):
            c.append(g)
        c.extend(zero_test.inverse(), range(zero_test.width))
    return c
