"""Electron shuttling on a gate grid: routing, circuit compilation, validation.

Device model
------------
Qubits are nuclear spins on logic donors (``D``). Each logic donor binds one
electron at rest, its *home*. To act on remote qubits an electron takes the
nuclear state (``swap_en``), leaves its home and is shuttled one cell per
step along shuttle gates (``G``). Measure sites (``M``) accept a visiting
electron for readout or initialisation.

Exclusion rules apply to *shuttling* electrons, i.e. electrons away from
home: no two share a cell and none come within ``radius`` (Manhattan) of
another. Electrons bound at home donors are tightly localised and exempt,
otherwise no corridor could pass a donor.

Scheduling is step-synchronous: every step lasts as long as its slowest
action and each electron does at most one action per step.
"""

from __future__ import annotations

import csv
import io
import json
import string
from collections import deque
from dataclasses import asdict, dataclass, field

CELL_KINDS = {"D": "logic", "M": "measure", "G": "gate", "X": "defect", ".": "empty"}

Cell = tuple[int, int]


class UnreachableError(RuntimeError):
    def __init__(self, message: str, cut: list[Cell] | None = None, op_index: int | None = None):
        super().__init__(message)
        self.cut = cut or []
        self.op_index = op_index


class GridError(ValueError):
    pass


def _manhattan(a: Cell, b: Cell) -> int:
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


def _qubit_name(k: int) -> str:
    return string.ascii_lowercase[k] if k < 26 else f"q{k}"


@dataclass(frozen=True)
class DeviceGrid:
    rows: tuple[str, ...]

    def __post_init__(self):
        if not self.rows or len({len(r) for r in self.rows}) != 1:
            raise GridError("grid rows must be nonempty and of equal length")
        bad = {ch for r in self.rows for ch in r} - set(CELL_KINDS)
        if bad:
            raise GridError(f"unknown cell characters {sorted(bad)}; allowed {sorted(CELL_KINDS)}")
        for cell in self.cells("D"):
            if not any(self.char(n) == "G" for n in self.neighbors(cell)):
                raise GridError(f"logic donor at {cell} has no adjacent shuttle gate")

    @classmethod
    def from_text(cls, text: str) -> "DeviceGrid":
        lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
        return cls(tuple(lines))

    def to_text(self) -> str:
        return "\n".join(self.rows) + "\n"

    @property
    def height(self) -> int:
        return len(self.rows)

    @property
    def width(self) -> int:
        return len(self.rows[0])

    def in_bounds(self, cell: Cell) -> bool:
        return 0 <= cell[0] < self.height and 0 <= cell[1] < self.width

    def char(self, cell: Cell) -> str:
        return self.rows[cell[0]][cell[1]]

    def kind(self, cell: Cell) -> str:
        return CELL_KINDS[self.char(cell)]

    def neighbors(self, cell: Cell) -> list[Cell]:
        r, c = cell
        out = [(r - 1, c), (r, c - 1), (r, c + 1), (r + 1, c)]
        return [n for n in out if self.in_bounds(n)]  # already lexicographic

    def cells(self, ch: str) -> list[Cell]:
        return [(r, c) for r, row in enumerate(self.rows) for c, x in enumerate(row) if x == ch]

    def qubits(self) -> dict[str, Cell]:
        """Logic donors named a, b, c, ... in reading order."""
        return {_qubit_name(k): cell for k, cell in enumerate(self.cells("D"))}

    def with_defect(self, cell: Cell) -> "DeviceGrid":
        if self.char(cell) != "G":
            raise GridError(f"only shuttle gates can be marked defective, {cell} is {self.kind(cell)}")
        rows = list(self.rows)
        r, c = cell
        rows[r] = rows[r][:c] + "X" + rows[r][c + 1:]
        return DeviceGrid(tuple(rows))


def _blocked(grid: DeviceGrid, occupied, radius: int) -> set[Cell]:
    out = set()
    for o in occupied:
        for r in range(o[0] - radius, o[0] + radius + 1):
            for c in range(o[1] - radius, o[1] + radius + 1):
                if _manhattan(o, (r, c)) <= radius and grid.in_bounds((r, c)):
                    out.add((r, c))
    return out


def _distances(grid: DeviceGrid, dst: Cell, allowed) -> dict[Cell, int]:
    dist = {dst: 0}
    queue = deque([dst])
    while queue:
        cur = queue.popleft()
        for n in grid.neighbors(cur):
            if n not in dist and allowed(n):
                dist[n] = dist[cur] + 1
                queue.append(n)
    return dist


def route_electron(grid: DeviceGrid, src: Cell, dst: Cell, occupied=frozenset(),
                   radius: int = 1) -> list[Cell]:
    """Shortest 4-connected path ``src .. dst`` whose interior cells are shuttle gates.

    Cells in ``occupied`` and within ``radius`` of them are avoided. Ties are
    broken by taking the lexicographically smallest (row, col) next cell.
    """
    src, dst = tuple(src), tuple(dst)
    for cell in (src, dst):
        if not grid.in_bounds(cell):
            raise GridError(f"cell {cell} is outside the grid")
    if src in occupied:
        raise ValueError("occupied set must not contain the source cell")
    blocked = _blocked(grid, occupied, radius)
    if src == dst:
        return [src]

    def allowed(cell):
        return cell == src or (grid.char(cell) == "G" and cell not in blocked)

    if dst in blocked or grid.char(dst) == "X":
        raise UnreachableError(f"destination {dst} is blocked", [dst])
    dist = _distances(grid, dst, allowed)
    if src not in dist:
        # region reachable from src, and the blocked cells bounding it
        seen = {src}
        queue = deque([src])
        while queue:
            cur = queue.popleft()
            for n in grid.neighbors(cur):
                if n not in seen and allowed(n):
                    seen.add(n)
                    queue.append(n)
        cut = sorted({n for s in seen for n in grid.neighbors(s) if n not in seen and n != dst
                      and grid.char(n) != "."})
        raise UnreachableError(
            f"no path from {src} to {dst}; blocking cut {cut}", cut)
    path = [src]
    cur = src
    while cur != dst:
        d = dist[cur]
        cur = min(n for n in grid.neighbors(cur) if dist.get(n) == d - 1)
        path.append(cur)
    return path


# circuits and schedules

OP_KINDS = ("rotate", "two_qubit", "measure", "init")
ACTION_KINDS = ("move", "swap_en", "pulse", "readout", "init")


@dataclass(frozen=True)
class Op:
    kind: str
    qubits: tuple[str, ...]
    pulse: str = ""

    def __post_init__(self):
        if self.kind not in OP_KINDS:
            raise ValueError(f"unknown op kind {self.kind!r}")
        need = 2 if self.kind == "two_qubit" else 1
        if len(self.qubits) != need:
            raise ValueError(f"{self.kind} takes {need} qubit(s)")
        if need == 2 and self.qubits[0] == self.qubits[1]:
            raise ValueError("two-qubit op needs distinct qubits")


@dataclass
class Circuit:
    ops: list[Op] = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps({"ops": [{"kind": o.kind, "qubits": list(o.qubits), "pulse": o.pulse}
                                   for o in self.ops]}, indent=2)

    @classmethod
    def from_json(cls, text: str) -> "Circuit":
        data = json.loads(text)
        return cls([Op(o["kind"], tuple(o["qubits"]), o.get("pulse", "")) for o in data["ops"]])


@dataclass(frozen=True)
class Timing:
    move: float = 1e-9
    swap_en: float = 35e-6
    pulse: float = 75e-9
    readout: float = 1e-6
    init: float = 1e-6

    def __post_init__(self):
        if min(self.move, self.swap_en, self.pulse, self.readout, self.init) <= 0:
            raise ValueError("all action durations must be positive")

    def of(self, kind: str) -> float:
        return getattr(self, kind)


@dataclass(frozen=True)
class Action:
    kind: str
    electron: str  # qubit whose home electron performs the action
    src: Cell
    dst: Cell
    duration: float
    op_index: int = -1


@dataclass
class Step:
    actions: list[Action] = field(default_factory=list)

    @property
    def duration(self) -> float:
        return max((a.duration for a in self.actions), default=0.0)


@dataclass
class Schedule:
    steps: list[Step] = field(default_factory=list)
    homes: dict[str, Cell] = field(default_factory=dict)
    radius: int = 1

    @property
    def makespan(self) -> float:
        return sum(s.duration for s in self.steps)

    def actions(self):
        for k, s in enumerate(self.steps):
            for a in s.actions:
                yield k, a

    def to_dict(self) -> dict:
        return {
            "radius": self.radius,
            "homes": {q: list(c) for q, c in sorted(self.homes.items())},
            "steps": [[{**asdict(a), "src": list(a.src), "dst": list(a.dst)} for a in s.actions]
                      for s in self.steps],
            "makespan_s": self.makespan,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "Schedule":
        steps = [Step([Action(a["kind"], a["electron"], tuple(a["src"]), tuple(a["dst"]),
                              a["duration"], a.get("op_index", -1)) for a in s])
                 for s in data["steps"]]
        homes = {q: tuple(c) for q, c in data["homes"].items()}
        return cls(steps, homes, data.get("radius", 1))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["step", "action", "from", "to", "duration_s"])
        for k, a in self.actions():
            w.writerow([k, f"{a.kind}:{a.electron}", f"{a.src[0]}:{a.src[1]}",
                        f"{a.dst[0]}:{a.dst[1]}", repr(a.duration)])
        return buf.getvalue()


@dataclass(frozen=True)
class Violation:
    step: int
    kind: str
    message: str


def validate_schedule(schedule: Schedule, grid: DeviceGrid) -> list[Violation]:
    """All invariant violations in step order; an empty list means the schedule is legal."""
    out: list[Violation] = []
    pos = dict(schedule.homes)
    for q, home in pos.items():
        if not grid.in_bounds(home) or grid.char(home) != "D":
            out.append(Violation(-1, "home", f"electron {q} home {home} is not a logic donor"))
    for k, step in enumerate(schedule.steps):
        busy = set()
        for a in step.actions:
            if a.electron not in pos:
                out.append(Violation(k, "unknown", f"unknown electron {a.electron!r}"))
                continue
            if a.electron in busy:
                out.append(Violation(k, "double", f"electron {a.electron} has two actions"))
            busy.add(a.electron)
            if a.kind not in ACTION_KINDS:
                out.append(Violation(k, "kind", f"unknown action {a.kind!r}"))
            if a.duration < 0:
                out.append(Violation(k, "duration", "negative duration"))
            here = pos[a.electron]
            if a.src != here:
                out.append(Violation(k, "continuity",
                                     f"electron {a.electron} acts from {a.src} but is at {here}"))
            if a.kind != "move":
                if _manhattan(a.src, a.dst) > 1:
                    out.append(Violation(k, "locality", f"{a.kind} at {a.dst} from {a.src}"))
                continue
            if not (grid.in_bounds(a.dst) and _manhattan(a.src, a.dst) == 1):
                out.append(Violation(k, "connectivity", f"move {a.src}->{a.dst} is not to a neighbour"))
            elif not (grid.char(a.dst) in "GM" or a.dst == schedule.homes[a.electron]):
                out.append(Violation(k, "connectivity",
                                     f"move into {grid.kind(a.dst)} cell {a.dst}"))
            pos[a.electron] = a.dst
        shuttling = sorted((q, c) for q, c in pos.items() if c != schedule.homes[q])
        cells = [c for _, c in shuttling]
        if len(set(pos.values())) < len(pos):
            out.append(Violation(k, "capacity", "two electrons share a cell"))
        for i in range(len(shuttling)):
            for j in range(i + 1, len(shuttling)):
                if _manhattan(cells[i], cells[j]) <= schedule.radius:
                    out.append(Violation(
                        k, "adjacency",
                        f"electrons {shuttling[i][0]} at {cells[i]} and {shuttling[j][0]} "
                        f"at {cells[j]} are within {schedule.radius}"))
    return out


# compilation

STRATEGIES = ("resonant", "swap")


def _dock(grid, target: Cell, src: Cell, blocked_route):
    """Best gate next to ``target`` reachable from ``src`` and the path to it."""
    best = None
    for g in grid.neighbors(target):
        if grid.char(g) != "G":
            continue
        try:
            path = blocked_route(src, g)
        except UnreachableError:
            continue
        key = (len(path), g)
        if best is None or key < best[0]:
            best = (key, path)
    if best is None:
        raise UnreachableError(f"no reachable shuttle gate next to {target}", [target])
    return best[1]


def _nearest_measure(grid, src: Cell, blocked_route):
    best = None
    for m in grid.cells("M"):
        try:
            path = blocked_route(src, m)
        except UnreachableError:
            continue
        key = (len(path), m)
        if best is None or key < best[0]:
            best = (key, path)
    if best is None:
        raise UnreachableError(f"no reachable measure site from {src}")
    return best[1]


def _op_program(op: Op, k: int, grid: DeviceGrid, homes, timing: Timing, strategy: str, route):
    """(electron, per-step actions) for one op; ``route`` maps (src, dst) -> path."""
    q = op.qubits[0]
    home = homes[q]
    acts: list[Action] = []

    def moves(path):
        return [Action("move", q, a, b, timing.move, k) for a, b in zip(path[:-1], path[1:])]

    def local(kind, cell, at=None):
        at = cell if at is None else at
        return Action(kind, q, at, cell, timing.of(kind), k)

    if op.kind == "rotate":
        return q, [local("pulse", home)]
    if op.kind == "two_qubit":
        target = homes[op.qubits[1]]
        out = _dock(grid, target, home, route)
        dock = out[-1]
        acts.append(local("swap_en", home))
        acts += moves(out)
        if strategy == "resonant":
            acts.append(local("pulse", target, dock))
        else:
            acts += [local("swap_en", target, dock), local("pulse", target, dock),
                     local("swap_en", target, dock)]
        acts += moves(route(dock, home))
        acts.append(local("swap_en", home))
        return q, acts
    out = _nearest_measure(grid, home, route)
    site = out[-1]
    if op.kind == "measure":
        acts.append(local("swap_en", home))
        acts += moves(out)
        acts.append(local("readout", site))
    else:
        acts += moves(out)
        acts.append(local("init", site))
    acts += moves(route(site, home))
    acts.append(local("swap_en", home))
    return q, acts


def _positions(program, start: int, home: Cell) -> dict[int, Cell]:
    """Step -> cell of the electron while away from home during ``program``."""
    out = {}
    cur = home
    for i, a in enumerate(program):
        if a.kind == "move":
            cur = a.dst
        if cur != home:
            out[start + i] = cur
    return out


def compile_circuit(circuit: Circuit, grid: DeviceGrid, timing: Timing = Timing(),
                    strategy: str = "resonant", radius: int = 1,
                    qubits: dict[str, Cell] | None = None) -> Schedule:
    """Greedy list schedule of ``circuit`` honouring the exclusion rules."""
    if strategy not in STRATEGIES:
        raise ValueError(f"strategy must be one of {STRATEGIES}")
    homes = dict(grid.qubits() if qubits is None else qubits)
    for k, op in enumerate(circuit.ops):
        for q in op.qubits:
            if q not in homes:
                raise ValueError(f"op {k} references unknown qubit {q!r}")
    ready = {q: 0 for q in homes}  # first free step per qubit
    away: dict[int, dict[str, Cell]] = {}  # step -> shuttling electron positions
    steps: dict[int, list[Action]] = {}
    for k, op in enumerate(circuit.ops):
        start = max(ready[q] for q in op.qubits)
        last_busy = max(away, default=-1)
        while True:
            others = {c for s, d in away.items() if s >= start for c in d.values()}

            def route(a, b, others=others):
                return route_electron(grid, a, b, others - {a}, radius)

            try:
                q, prog = _op_program(op, k, grid, homes, timing, strategy, route)
            except UnreachableError as err:
                if start > last_busy:
                    raise UnreachableError(f"op {k} ({op.kind} {list(op.qubits)}): {err}",
                                           err.cut, k) from err
                start += 1
                continue
            pos = _positions(prog, start, homes[q])
            if all(_manhattan(c, o) > radius for s, c in pos.items()
                   for o in away.get(s, {}).values()):
                break
            start += 1
        for i, a in enumerate(prog):
            steps.setdefault(start + i, []).append(a)
        for s, c in pos.items():
            away.setdefault(s, {})[q] = c
        end = start + len(prog)
        for qq in op.qubits:
            ready[qq] = end
    n = max(steps, default=-1) + 1
    return Schedule([Step(steps.get(i, [])) for i in range(n)], homes, radius)


# error budget

PER_OP_THRESHOLD = 1e-4


@dataclass(frozen=True)
class ErrorRates:
    move: float = 0.0
    swap_en: float = 0.0
    pulse: float = 0.0
    readout: float = 0.0
    init: float = 0.0
    dephasing_rate: float = 0.0  # 1/s, charged over every action's duration

    def __post_init__(self):
        if min(asdict(self).values()) < 0:
            raise ValueError("error rates must be nonnegative")


@dataclass(frozen=True)
class ScheduleMetrics:
    makespan: float
    move_count: int
    pulse_count: int
    swap_count: int
    readout_count: int
    op_count: int
    action_error: float
    dephasing_error: float
    error_budget: float
    per_op_budget: float
    exceeds_threshold: bool


def error_budget(schedule: Schedule, rates: ErrorRates) -> ScheduleMetrics:
    counts = {k: 0 for k in ACTION_KINDS}
    act, deph = 0.0, 0.0
    ops = set()
    for _, a in schedule.actions():
        counts[a.kind] += 1
        act += getattr(rates, a.kind)
        deph += rates.dephasing_rate * a.duration
        ops.add(a.op_index)
    total = act + deph
    per_op = total / max(len(ops), 1)
    return ScheduleMetrics(schedule.makespan, counts["move"], counts["pulse"], counts["swap_en"],
                           counts["readout"], len(ops), act, deph, total, per_op,
                           per_op > PER_OP_THRESHOLD)


def concatenate(first: Schedule, second: Schedule) -> Schedule:
    if first.homes and second.homes and first.homes != second.homes:
        raise ValueError("schedules place electrons differently")
    offset = 1 + max((a.op_index for _, a in first.actions()), default=-1)
    shifted = [Step([Action(a.kind, a.electron, a.src, a.dst, a.duration, a.op_index + offset)
                     for a in s.actions]) for s in second.steps]
    return Schedule(first.steps + shifted, first.homes or second.homes, first.radius)


FIVE_QUBIT_GRID = """\
.........
.GGGGGGG.
.GDGMGDG.
.GGGGGGG.
.GMGDGMG.
.GGGGGGG.
.GDGMGDG.
.GGGGGGG.
.........
"""
