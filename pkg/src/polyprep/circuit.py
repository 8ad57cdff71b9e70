"""Gate-level circuit IR: gates with generic open/filled controls, register
layouts, ASAP depth metrics, fan-out and multi-controlled-X builders, and a
JSON wire format.

Conventions:
    - Qubit 0 is the most significant bit of a basis index.
    - Controls are (qubit, state) pairs; state 0 is an open (white) control.
    - CX/CZ/CCX/MCX are naming conventions over X/Z plus controls; the
      canonical kind is derived from the base gate and the control count.
    - r(theta, phi, lam) is the full-angle single-qubit rotation
      [[e^{i(lam+phi)} cos(theta), e^{i phi} sin(theta)],
       [e^{i lam} sin(theta),     -cos(theta)]].
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

BASE_KINDS = ("x", "h", "ry", "rz", "r", "z")
_N_PARAMS = {"x": 0, "h": 0, "ry": 1, "rz": 1, "r": 3, "z": 0}
_KIND_TO_BASE = {
    "cx": "x", "ccx": "x", "mcx": "x", "cz": "z",
    **{k: k for k in BASE_KINDS},
}
GATE_KINDS = tuple(_KIND_TO_BASE)

SYSTEM, CONTROL, FLAG, GQSP, SCRATCH, COPY = (
    "system", "control", "flag", "gqsp", "scratch", "copy")
ROLES = (SYSTEM, CONTROL, FLAG, GQSP, SCRATCH, COPY)


def _canonical_kind(base: str, n_controls: int) -> str:
    if base == "x" and n_controls:
        return {1: "cx", 2: "ccx"}.get(n_controls, "mcx")
    if base == "z" and n_controls == 1:
        return "cz"
    return base


@dataclass(frozen=True)
class Gate:
    """One gate: a base single-qubit unitary plus an arbitrary control set."""
    kind: str
    targets: tuple[int, ...]
    controls: tuple[tuple[int, int], ...] = ()
    params: tuple[float, ...] = ()

    @property
    def base(self) -> str:
        return _KIND_TO_BASE[self.kind]

    @property
    def qubits(self) -> tuple[int, ...]:
        return tuple(q for q, _ in self.controls) + self.targets

    def validate(self, width: int) -> None:
        qs = self.qubits
        if len(set(qs)) != len(qs):
            raise ValueError(f"gate {self.kind}: duplicate qubits {qs}")
        if any(q < 0 or q >= width for q in qs):
            raise ValueError(f"gate {self.kind}: qubit out of range for width {width}")
        if len(self.targets) != 1:
            raise ValueError(f"gate {self.kind}: exactly one target expected")
        if len(self.params) != _N_PARAMS[self.base]:
            raise ValueError(f"gate {self.kind}: expected {_N_PARAMS[self.base]} params")
        if any(not math.isfinite(p) for p in self.params):
            raise ValueError(f"gate {self.kind}: non-finite parameter")
        if any(s not in (0, 1) for _, s in self.controls):
            raise ValueError(f"gate {self.kind}: control state must be 0 or 1")


def make_gate(base: str, targets, controls=(), params=()) -> Gate:
    try:
        base = _KIND_TO_BASE[base]
    except KeyError:
        raise ValueError(f"unknown gate kind {base!r}") from None
    controls = tuple((int(q), int(s)) for q, s in controls)
    return Gate(_canonical_kind(base, len(controls)),
                tuple(int(t) for t in targets),
                controls, tuple(float(p) for p in params))


@dataclass
class RegisterLayout:
    """Role name to ordered qubit-index list; roles are pairwise disjoint."""
    roles: dict[str, tuple[int, ...]] = field(default_factory=dict)

    def __post_init__(self):
        self.roles = {k: tuple(int(q) for q in v)
                      for k, v in self.roles.items() if len(v)}
        seen = set()
        for name, idx in self.roles.items():
            if name not in ROLES:
                raise ValueError(f"unknown register role {name!r}")
            for q in idx:
                if q in seen:
                    raise ValueError(f"role {name!r}: qubit {q} assigned twice")
                seen.add(q)

    def __getitem__(self, role: str) -> tuple[int, ...]:
        return self.roles.get(role, ())

    def validate(self, width: int) -> None:
        for name, idx in self.roles.items():
            if any(q < 0 or q >= width for q in idx):
                raise ValueError(f"role {name!r} exceeds width {width}")


@dataclass(frozen=True)
class CircuitMetrics:
    depth: int
    size: int
    width: int
    ancilla_count: int


class Circuit:
    """Ordered gate list over a fixed width. Builders append; afterwards the
    circuit is treated as immutable and is safe to share read-only."""

    def __init__(self, width: int, layout: RegisterLayout | None = None):
        if width < 1:
            raise ValueError("width must be >= 1")
        self.width = width
        self.layout = layout or RegisterLayout()
        self.layout.validate(width)
        self.gates: list[Gate] = []

    def __len__(self):
        return len(self.gates)

    # -- builder methods -------------------------------------------------
    def append(self, gate: Gate) -> "Circuit":
        gate.validate(self.width)
        self.gates.append(gate)
        return self

    def add(self, base, targets, controls=(), params=()) -> "Circuit":
        return self.append(make_gate(base, targets, controls, params))

    def x(self, q): return self.add("x", [q])
    def h(self, q): return self.add("h", [q])
    def z(self, q): return self.add("z", [q])
    def ry(self, q, theta): return self.add("ry", [q], params=[theta])
    def rz(self, q, theta): return self.add("rz", [q], params=[theta])
    def r(self, q, theta, phi, lam): return self.add("r", [q], params=[theta, phi, lam])
    def cx(self, c, t, state=1): return self.add("x", [t], [(c, state)])
    def cz(self, c, t, state=1): return self.add("z", [t], [(c, state)])

    def ccx(self, c1, c2, t, states=(1, 1)):
        return self.add("x", [t], [(c1, states[0]), (c2, states[1])])

    def extend(self, other: "Circuit", mapping=None) -> "Circuit":
        """Append other's gates, remapping its qubit i to mapping[i]."""
        if mapping is None:
            if other.width > self.width:
                raise ValueError("sub-circuit wider than target")
            mapping = range(other.width)
        mapping = list(mapping)
        for g in other.gates:
            self.append(make_gate(
                g.base, [mapping[t] for t in g.targets],
                [(mapping[q], s) for q, s in g.controls], g.params))
        return self

    # -- derived circuits ------------------------------------------------
    def inverse(self) -> "Circuit":
        inv = Circuit(self.width, self.layout)
        for g in reversed(self.gates):
            if g.base in ("x", "h", "z"):
                inv.append(g)
            elif g.base in ("ry", "rz"):
                inv.add(g.base, g.targets, g.controls, [-g.params[0]])
            else:  # r(theta, phi, lam)^dag = r(theta, -lam, -phi)
                th, ph, la = g.params
                inv.add("r", g.targets, g.controls, [th, -la, -ph])
        return inv

    def metrics(self, expanded: bool = False) -> CircuitMetrics:
        return compute_metrics(self, expanded=expanded)


def controlled(c: Circuit, control: int, state: int = 1) -> Circuit:
    """Generic controlled version: every gate gains (control, state).

    Fallback path; the PREPARE/SELECT constructions use the cheaper
    flag-qubit specialization instead.
    """
    if control >= c.width or control < 0:
        raise ValueError("control qubit outside circuit width")
    if any(control in g.qubits for g in c.gates):
        raise ValueError(f"control qubit {control} already used by the circuit")
    out = Circuit(c.width, c.layout)
    for g in c.gates:
        out.add(g.base, g.targets, ((control, state),) + g.controls, g.params)
    return out


# ---------------------------------------------------------------------------
# Metrics

def compute_metrics(c: Circuit, expanded: bool = False) -> CircuitMetrics:
    """ASAP greedy layering: a gate starts one layer after the latest prior
    gate sharing any of its qubits (controls included)."""
    target = expand_to_cx(c) if expanded else c
    frontier = [0] * target.width
    depth = 0
    for g in target.gates:
        layer = 1 + max(frontier[q] for q in g.qubits)
        for q in g.qubits:
            frontier[q] = layer
        depth = max(depth, layer)
    n_system = len(target.layout[SYSTEM])
    ancilla = target.width - n_system if n_system else 0
    return CircuitMetrics(depth=depth, size=len(target.gates),
                          width=target.width, ancilla_count=ancilla)


def layers(c: Circuit) -> list[list[int]]:
    """Gate indices grouped by ASAP layer."""
    frontier = [0] * c.width
    out: list[list[int]] = []
    for i, g in enumerate(c.gates):
        layer = 1 + max(frontier[q] for q in g.qubits)
        for q in g.qubits:
            frontier[q] = layer
        while len(out) < layer:
            out.append([])
        out[layer - 1].append(i)
    return out


# ---------------------------------------------------------------------------
# Fan-out copy tree

def fanout_copy(source: int, destinations) -> Circuit:
    """CNOT doubling tree copying a basis value onto zeroed destinations.

    Depth ceil(log2(m+1)), size m: each layer doubles the set of qubits
    holding the copied value.
    """
    destinations = list(destinations)
    if not destinations:
        raise ValueError("fanout_copy requires at least one destination")
    qubits = [source] + destinations
    if len(set(qubits)) != len(qubits):
        raise ValueError("fanout_copy qubits must be distinct")
    c = Circuit(max(qubits) + 1)
    holders = [source]
    todo = list(destinations)
    while todo:
        next_holders = []
        for src in holders:
            if not todo:
                break
            dst = todo.pop(0)
            c.cx(src, dst)
            next_holders.append(dst)
        holders += next_holders
    return c


# ---------------------------------------------------------------------------
# Multi-controlled X
#
# Two decompositions, chosen by the size of the clean-ancilla pool:
#   - AND-tree: pairwise CCX into clean ancillae, needs len(controls)-2 or
#     more clean qubits, depth ~2*log2(m).
#   - Conditionally-clean reduction: needs a single clean qubit. After
#     CCX(c1, c2 -> a), the qubits c1, c2 are known to sit in their control
#     state on any branch where the full condition can still fire, so they
#     can absorb further control pairs; each absorption shrinks the
#     condition set by one. All toggles are undone after the central gate,
#     so every borrowed qubit is restored exactly.

def mcx(controls, target: int, clean=(), dirty=()) -> Circuit:
    """Multi-controlled X with open/filled controls in logarithmic depth.

    `clean` qubits must be |0>; they are restored. `dirty` qubits may hold
    arbitrary states; the reduction only ever borrows the retired control
    qubits themselves, so the dirty pool is accepted for interface
    compatibility but never touched.
    """
    controls = [(int(q), int(s)) for q, s in controls]
    clean = list(clean)
    all_qs = [q for q, _ in controls] + [target] + clean + list(dirty)
    if len(set(all_qs)) != len(all_qs):
        raise ValueError("mcx: controls, target and ancillae must be disjoint")
    if not controls:
        raise ValueError("mcx requires at least one control")
    width = max(all_qs) + 1
    c = Circuit(width)
    m = len(controls)
    if m <= 2:
        c.add("x", [target], controls)
        return c
    if len(clean) >= m - 2:
        _mcx_tree(c, controls, target, clean)
        return c
    if len(clean) >= 1:
        _mcx_reduce(c, controls, target, clean[0])
        return c
    raise ValueError(f"mcx with {m} controls needs at least one clean ancilla")


def _mcx_tree(c: Circuit, controls, target, clean):
    """Balanced AND-tree into clean ancillae, then one CX/CCX, then unwind."""
    forward: list[Gate] = []
    pool = list(clean)
    nodes = list(controls)  # (qubit, state) pairs whose AND we need
    while len(nodes) > 2:
        nxt = []
        i = 0
        while i + 1 < len(nodes) and pool:
            anc = pool.pop(0)
            forward.append(make_gate("x", [anc], [nodes[i], nodes[i + 1]]))
            nxt.append((anc, 1))
            i += 2
        nxt.extend(nodes[i:])
        if len(nxt) == len(nodes):
            raise ValueError("mcx: clean ancilla pool exhausted")
        nodes = nxt
    for g in forward:
        c.append(g)
    c.add("x", [target], nodes)
    for g in reversed(forward):
        c.append(g)


def _mcx_dirty_split(c: Circuit, controls, target, dirty):
    """Exact C^k X using one dirty qubit per recursion level.

    With w dirty and controls split into halves L, R:
        [C(R,w->t)][C(L->w)][C(R,w->t)][C(L->w)]
    toggles t by AND(L)*AND(R) and restores w, whatever w held. Only used
    for the constant-size endgame of the reduction, so the quadratic size
    of the recursion never matters.
    """
    k = len(controls)
    if k <= 2:
        c.add("x", [target], controls)
        return
    if not dirty:
        raise ValueError("mcx endgame requires a borrowable qubit")
    w = dirty[0]
    left = controls[:(k + 1) // 2]
    right = controls[(k + 1) // 2:]
    pool_r = dirty[1:] + [q for q, _ in left]
    pool_l = dirty[1:] + [q for q, _ in right] + [target]
    for _ in range(2):
        _mcx_dirty_split(c, right + [(w, 1)], target, pool_r)
        _mcx_dirty_split(c, left, w, pool_l)


def _mcx_reduce(c: Circuit, controls, target, anc):
    """Conditionally-clean reduction with one clean ancilla.

    Invariant: the AND of the condition list always equals the AND of the
    original controls. Absorbing conditions (u, v) into a spare qubit w
    (whose value is a known s on every branch where the remaining conditions
    hold) replaces the pair by the single condition (w, 1-s). A spare is
    legal for a pair only if the conditions backing its value (its guard
    chain) are all still in the list and not part of the absorbed pair;
    retiring a condition invalidates the spares chained through it, and a
    retired qubit re-enters the spare pool chained through the freshly
    written condition. The last few conditions are folded onto the target
    with the dirty-qubit double-toggle identity, which needs no clean
    qubits.
    """
    forward: list[Gate] = []
    (q1, s1), (q2, s2) = controls[0], controls[1]
    forward.append(make_gate("x", [anc], [(q1, s1), (q2, s2)]))
    cond: list[tuple[int, int]] = [(anc, 1)] + list(controls[2:])
    chain: dict[int, tuple[int, ...]] = {q1: (anc,), q2: (anc,)}
    spares: dict[int, int] = {q1: s1, q2: s2}

    def kill(retired: tuple[int, int]) -> None:
        dead = [q for q, ch in chain.items()
                if q in spares and (retired[0] in ch or retired[1] in ch)]
        for q in dead:
            del spares[q]
            del chain[q]

    while len(cond) > 4:
        progressed = False
        busy: set[int] = set()
        i = 0
        while i + 1 < len(cond):
            u, v = cond[i], cond[i + 1]
            if u[0] in busy or v[0] in busy:
                i += 1
                continue
            legal = [q for q in spares
                     if q not in busy and u[0] not in chain[q] and v[0] not in chain[q]]
            if not legal:
                i += 1
                continue
            wq = min(legal, key=lambda q: len(chain[q]))
            wval = spares.pop(wq)
            forward.append(make_gate("x", [wq], [u, v]))
            cond[i:i + 2] = [(wq, 1 - wval)]
            retired = (u[0], v[0])
            new_chain = (wq,) + chain[wq]
            kill(retired)
            for fq, fs in (u, v):
                spares[fq] = fs
                chain[fq] = new_chain
            busy.update((u[0], v[0], wq))
            progressed = True
            i += 1
        if not progressed:
            break

    if len(cond) > 10:
        raise RuntimeError("mcx reduction stalled early; please report")
    for g in forward:
        c.append(g)
    in_cond = {q for q, _ in cond}
    borrow = [q for q, _ in controls if q not in in_cond and q != target]
    _mcx_dirty_split(c, cond, target, borrow)
    for g in reversed(forward):
        c.append(g)


# ---------------------------------------------------------------------------
# Lowering to {1-qubit, CX}

def _phase0(c: Circuit, q: int, alpha: float):
    """diag(e^{i alpha}, 1) on qubit q."""
    c.r(q, math.pi, alpha - math.pi, 0.0)


def _phase1(c: Circuit, q: int, alpha: float):
    """diag(1, e^{i alpha}) on qubit q."""
    c.x(q)
    _phase0(c, q, alpha)
    c.x(q)


def _global_phase(c: Circuit, q: int, alpha: float):
    _phase0(c, q, alpha)
    _phase1(c, q, alpha)


def _zyz(m) -> tuple[float, float, float, float]:
    """U = e^{i alpha} Rz(beta) Ry(gamma) Rz(delta) for a 2x2 unitary."""
    import numpy as np
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    alpha = float(np.angle(det) / 2.0)
    su = np.asarray(m) * np.exp(-1j * alpha)
    gamma = 2.0 * math.atan2(abs(su[1, 0]), abs(su[0, 0]))
    if abs(su[1, 0]) < 1e-14:
        beta, delta = 2.0 * float(np.angle(su[1, 1])), 0.0
    elif abs(su[0, 0]) < 1e-14:
        beta, delta = 2.0 * float(np.angle(su[1, 0])), 0.0
    else:
        half_sum = float(np.angle(su[1, 1]))
        half_diff = float(np.angle(su[1, 0]))
        beta, delta = half_sum + half_diff, half_sum - half_diff
    return alpha, beta, gamma, delta


def _lower_controlled_1q(out: Circuit, gate: Gate):
    """Barenco ABC decomposition of a singly-controlled 2x2 unitary."""
    from . import kernels
    (cq, cs), t = gate.controls[0], gate.targets[0]
    if cs == 0:
        out.x(cq)
    alpha, beta, gamma, delta = _zyz(kernels.base_matrix(gate.base, gate.params))
    out.rz(t, (delta - beta) / 2.0)
    out.cx(cq, t)
    out.rz(t, -(delta + beta) / 2.0)
    out.ry(t, -gamma / 2.0)
    out.cx(cq, t)
    out.ry(t, gamma / 2.0)
    out.rz(t, beta)
    if abs(alpha) > 1e-15:
        _phase1(out, cq, alpha)
    if cs == 0:
        out.x(cq)


def _lower_ccx(out: Circuit, c1: int, c2: int, t: int):
    """Standard 6-CX Toffoli network (T as rz with a global-phase patch)."""
    tq = math.pi / 4
    out.h(t)
    out.cx(c2, t); out.rz(t, -tq)
    out.cx(c1, t); out.rz(t, tq)
    out.cx(c2, t); out.rz(t, -tq)
    out.cx(c1, t)
    out.rz(c2, tq); out.rz(t, tq)
    out.h(t)
    out.cx(c1, c2)
    out.rz(c1, tq); out.rz(c2, -tq)
    out.cx(c1, c2)
    _global_phase(out, c1, math.pi / 8)


def expand_to_cx(c: Circuit) -> Circuit:
    """Rewrite onto the {1-qubit, CX} gate set, preserving the unitary
    exactly (including global phase). Gates with three or more controls are
    not expanded; builders in this package never emit them."""
    out = Circuit(c.width, c.layout)
    for g in c.gates:
        nctl = len(g.controls)
        t = g.targets[0]
        if nctl == 0:
            out.append(g)
        elif g.base == "x" and nctl == 1:
            out.append(g)
        elif g.base == "z" and nctl == 1:
            (cq, cs) = g.controls[0]
            out.h(t)
            out.cx(cq, t, cs)
            out.h(t)
        elif nctl == 1:
            _lower_controlled_1q(out, g)
        elif nctl == 2 and g.base in ("x", "z"):
            (c1, s1), (c2, s2) = g.controls
            if g.base == "z":
                out.h(t)
            for q, s in g.controls:
                if s == 0:
                    out.x(q)
            _lower_ccx(out, c1, c2, t)
            for q, s in g.controls:
                if s == 0:
                    out.x(q)
            if g.base == "z":
                out.h(t)
        else:
            raise NotImplementedError(
                f"expansion of {g.kind} with {nctl} controls is not supported")
    return out


# ---------------------------------------------------------------------------
# JSON wire format

def _gate_to_dict(g: Gate) -> dict:
    return {"kind": g.kind, "targets": list(g.targets),
            "controls": [[q, s] for q, s in g.controls],
            "params": list(g.params)}


def export_circuit(c: Circuit) -> str:
    doc: dict = {"width": c.width}
    if c.layout.roles:
        doc["layout"] = {k: list(v) for k, v in c.layout.roles.items()}
    doc["gates"] = [_gate_to_dict(g) for g in c.gates]
    return json.dumps(doc)


def import_circuit(text: str) -> Circuit:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValueError(f"circuit JSON parse error: {e}") from None
    if not isinstance(doc, dict) or "width" not in doc:
        raise ValueError("circuit JSON must be an object with a 'width' field")
    width = doc["width"]
    if not isinstance(width, int) or width < 1:
        raise ValueError("'width' must be a positive integer")
    layout = RegisterLayout({k: tuple(v) for k, v in doc.get("layout", {}).items()})
    c = Circuit(width, layout)
    for i, gd in enumerate(doc.get("gates", [])):
        try:
            kind = gd["kind"]
            if kind not in _KIND_TO_BASE:
                raise ValueError(f"unknown kind {kind!r}")
            g = make_gate(kind, gd.get("targets", []),
                          gd.get("controls", []), gd.get("params", []))
            g.validate(width)
        except (KeyError, TypeError, ValueError) as e:
            raise ValueError(f"gate {i}: {e}") from None
        c.gates.append(g)
    return c
