"""Small-step execution of programs over a global density operator.

A configuration pairs the remaining program with the global state over
all declared registers. The remaining program is kept as a flat tuple of
atomic statements (the sequencing rule is transparent, so popping one
atom is exactly one transition):

* skip        pops.
* q := |0>    applies, per qubit (least significant first),
              rho -> P0 rho P0 + K rho K†  with P0 = |0><0|, K = |0><1|.
* U[...]      conjugates by the embedded unitary.
* if/while    measures; sampled mode draws one outcome, distribution
              mode forks one successor per outcome with weight p_i
              (branches below 1e-12 are dropped). The loop guard
              continues on outcome 1 and exits on 0.

Branch weights are carried separately from states; states stay
normalized (trace 1) and the weighted state weight*rho recovers the
partial-density-operator formulation.
"""
from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass, field

import numpy as np

from ..core.gates import GateLibrary, STANDARD_LIBRARY
from ..core.linalg import conjugate_density, embed, partial_trace, trace_inner
from ..core.types import DensityOperator
from ..errors import QwhileError, StepLimitExceeded
from ..lang.checker import instantiate_measurement, require_valid, resolve_gate
from ..lang.syntax import Case, Init, Seq, Skip, SourceProgram, Stmt, Unitary, While
from .sampler import PROB_FLOOR, SamplerState, sample_outcome

DEFAULT_STEP_LIMIT = 10**6
DEFAULT_MASS_THRESHOLD = 1e-6
DEFAULT_DISTRIBUTION_STEP_LIMIT = 10_000
_FULL_MATRIX_DIM = 128  # embed dense operators up to this dimension


_P0 = np.array([[1, 0], [0, 0]], dtype=complex)
_K01 = np.array([[0, 1], [0, 0]], dtype=complex)


class _Embedded:
    """A k-qubit operator fixed at positions of the n-qubit space."""

    __slots__ = ("op", "positions", "n", "full")

    def __init__(self, op: np.ndarray, positions: tuple[int, ...], n: int):
        self.op = np.asarray(op, dtype=complex)
        self.positions = positions
        self.n = n
        self.full = embed(self.op, positions, n) if (1 << n) <= _FULL_MATRIX_DIM else None

    def sandwich(self, rho: np.ndarray) -> np.ndarray:
        """E rho E†."""
        if self.full is not None:
            return self.full @ rho @ self.full.conj().T
        return conjugate_density(rho, self.op, self.positions, self.n)


class _MeasSite:
    __slots__ = ("site_id", "kind", "ops", "poms", "full_poms", "positions", "n")

    def __init__(self, site_id: int, kind: str, operators, positions, n):
        self.site_id = site_id
        self.kind = kind  # 'case' | 'while'
        self.positions = positions
        self.n = n
        self.ops = [_Embedded(m, positions, n) for m in operators]
        # M†M in the local (k-qubit) space; for larger spaces probabilities
        # come from the reduced state instead of full-space products.
        self.poms = [m.conj().T @ m for m in operators]
        self.full_poms = ([embed(a, positions, n) for a in self.poms]
                          if (1 << n) <= _FULL_MATRIX_DIM else None)

    def probabilities(self, rho: np.ndarray) -> np.ndarray:
        if self.full_poms is not None:
            p = np.array([trace_inner(a, rho) for a in self.full_poms])
        else:
            reduced = partial_trace(rho, self.positions, self.n)
            p = np.array([trace_inner(a, reduced) for a in self.poms])
        p = np.clip(p, 0.0, None)
        total = p.sum()
        if abs(total - 1.0) > 1e-9:
            raise QwhileError(f"measurement probabilities sum to {total}")
        return p / total

    def collapse(self, rho: np.ndarray, outcome: int, p: float) -> np.ndarray:
        post = self.ops[outcome].sandwich(rho)
        return post / post.trace().real


@dataclass
class PreparedProgram:
    """A validated program lowered to embedded operators."""

    program: SourceProgram
    n: int
    positions: dict[str, tuple[int, ...]]
    unitaries: dict[int, _Embedded] = field(default_factory=dict)      # id(stmt) ->
    init_kraus: dict[int, list] = field(default_factory=dict)          # per-qubit (P0, K)
    sites: dict[int, _MeasSite] = field(default_factory=dict)
    case_bodies: dict[int, dict[int, tuple[Stmt, ...]]] = field(default_factory=dict)
    while_bodies: dict[int, tuple[Stmt, ...]] = field(default_factory=dict)
    site_meta: list[tuple[int, str, str]] = field(default_factory=list)  # (id, kind, label)

    @property
    def dim(self) -> int:
        return 1 << self.n

    def initial_state(self) -> np.ndarray:
        rho = np.zeros((self.dim, self.dim), dtype=complex)
        rho[0, 0] = 1.0
        return rho

    def loop_sites(self) -> list[int]:
        return [sid for sid, kind, _ in self.site_meta if kind == "while"]


def prepare(program: SourceProgram, library: GateLibrary = STANDARD_LIBRARY) -> PreparedProgram:
    require_valid(program, library)
    positions: dict[str, tuple[int, ...]] = {}
    at = 0
    for name, width in program.registers:
        positions[name] = tuple(range(at, at + width))
        at += width
    plan = PreparedProgram(program, n=at, positions=positions)

    counter = iter(range(1, 1 << 30))

    def site_positions(regs: tuple[str, ...]) -> tuple[int, ...]:
        out: tuple[int, ...] = ()
        for r in regs:
            out += positions[r]
        return out

    def walk(s: Stmt) -> None:
        if isinstance(s, Skip):
            return
        if isinstance(s, Init):
            # One (P0, K) Kraus pair per qubit, listed least significant first.
            pairs = []
            for q in reversed(positions[s.target]):
                pairs.append((_Embedded(_P0, (q,), plan.n), _Embedded(_K01, (q,), plan.n)))
            plan.init_kraus[id(s)] = pairs
            return
        if isinstance(s, Unitary):
            plan.unitaries[id(s)] = _Embedded(
                resolve_gate(program, s.gate, library), site_positions(s.regs), plan.n)
            return
        if isinstance(s, Seq):
            for sub in s.stmts:
                walk(sub)
            return
        if isinstance(s, (Case, While)):
            pos = site_positions(s.regs)
            decl = program.meas_decl(s.meas)
            mset = instantiate_measurement(decl, 1 << len(pos))
            kind = "case" if isinstance(s, Case) else "while"
            sid = next(counter)
            plan.sites[id(s)] = _MeasSite(sid, kind, mset.operators, pos, plan.n)
            plan.site_meta.append((sid, kind, f"{kind}:{s.meas}[{','.join(s.regs)}]"))
            if isinstance(s, Case):
                plan.case_bodies[id(s)] = {k: flatten(body) for k, body in s.branches}
                for _, body in s.branches:
                    walk(body)
            else:
                plan.while_bodies[id(s)] = flatten(s.body)
                walk(s.body)
            return
        raise QwhileError(f"cannot lower statement {type(s).__name__}")

    walk(program.body)
    return plan


def flatten(s: Stmt) -> tuple[Stmt, ...]:
    if isinstance(s, Seq):
        out: tuple[Stmt, ...] = ()
        for sub in s.stmts:
            out += flatten(sub)
        return out
    return (s,)


@dataclass(frozen=True)
class Configuration:
    """<remaining program, state>; weight carries branch mass in distribution mode."""

    remaining: tuple[Stmt, ...]
    state: DensityOperator
    weight: float = 1.0
    plan: PreparedProgram | None = field(default=None, compare=False, repr=False)

    @property
    def terminated(self) -> bool:
        return not self.remaining


def initial_configuration(program: SourceProgram | PreparedProgram,
                          state: DensityOperator | None = None,
                          library: GateLibrary = STANDARD_LIBRARY) -> Configuration:
    plan = program if isinstance(program, PreparedProgram) else prepare(program, library)
    rho = plan.initial_state() if state is None else state.matrix
    if rho.shape != (plan.dim, plan.dim):
        raise QwhileError(f"state dim {rho.shape[0]} != program dim {plan.dim}")
    return Configuration(flatten(plan.program.body), DensityOperator(rho, validate=False),
                         1.0, plan)


@dataclass(frozen=True)
class _Event:
    site_id: int
    outcome: int
    loop_entry: bool


def _step_full(c: Configuration, rng: SamplerState | None
               ) -> list[tuple[Configuration, _Event | None]]:
    if c.terminated:
        raise QwhileError("cannot step a terminated configuration")
    plan = c.plan
    if plan is None:
        raise QwhileError("configuration was not built by initial_configuration")
    s, rest = c.remaining[0], c.remaining[1:]
    rho = c.state._mat  # engine-internal fast path; states stay normalized

    def conf(remaining, mat, weight=c.weight) -> Configuration:
        return Configuration(remaining, DensityOperator(mat, validate=False), weight, plan)

    if isinstance(s, Skip):
        return [(conf(rest, rho), None)]

    if isinstance(s, Init):
        out = rho
        for p0, k in plan.init_kraus[id(s)]:
            out = p0.sandwich(out) + k.sandwich(out)
        return [(conf(rest, out), None)]

    if isinstance(s, Unitary):
        return [(conf(rest, plan.unitaries[id(s)].sandwich(rho)), None)]

    site = plan.sites[id(s)]
    p = site.probabilities(rho)

    def successor(outcome: int, weight: float) -> tuple[Configuration, _Event]:
        post = site.collapse(rho, outcome, p[outcome])
        if isinstance(s, Case):
            branch = plan.case_bodies[id(s)].get(outcome)
            tail = (branch + rest) if branch is not None else rest
            return conf(tail, post, weight), _Event(site.site_id, outcome, False)
        if outcome == 1:  # loop rule L1: run body then re-check the guard
            tail = plan.while_bodies[id(s)] + (s,) + rest
            return conf(tail, post, weight), _Event(site.site_id, 1, True)
        return conf(rest, post, weight), _Event(site.site_id, 0, False)  # rule L0

    if rng is not None:
        outcome = sample_outcome(p, rng)
        return [successor(outcome, c.weight)]
    return [successor(i, c.weight * float(p[i]))
            for i in range(len(p)) if p[i] > PROB_FLOOR]


def step(c: Configuration, rng: SamplerState | None = None) -> list[Configuration]:
    """One transition. With rng: a single sampled successor. Without rng:
    one successor per measurement outcome, weights multiplied by p_i."""
    return [cfg for cfg, _ in _step_full(c, rng)]


# --- one-shot runs -----------------------------------------------------------

@dataclass
class RunRecord:
    """Trace of one sampled run."""

    outcomes: list[tuple[int, int]]          # (site id, outcome index)
    final_state: DensityOperator
    steps: int
    loop_counts: dict[int, int]              # loop site id -> body entries

    def outcome_sequence(self) -> list[int]:
        return [o for _, o in self.outcomes]


def run_shot(program: SourceProgram | PreparedProgram, seed: int,
             step_limit: int = DEFAULT_STEP_LIMIT,
             state: DensityOperator | None = None) -> RunRecord:
    """Run once with sampled measurements; deterministic for a given seed."""
    c = initial_configuration(program, state)
    rng = SamplerState(seed)
    plan = c.plan
    outcomes: list[tuple[int, int]] = []
    loop_counts: dict[int, int] = {sid: 0 for sid in plan.loop_sites()}
    steps = 0
    while not c.terminated:
        if steps >= step_limit:
            raise StepLimitExceeded(f"no termination after {step_limit} steps")
        [(c, event)] = _step_full(c, rng)
        steps += 1
        if event is not None:
            outcomes.append((event.site_id, event.outcome))
            if event.loop_entry:
                loop_counts[event.site_id] += 1
    return RunRecord(outcomes, c.state, steps, loop_counts)


@dataclass
class ShotStats:
    """Aggregate over n independent seeded shots."""

    shots: int
    seed: int
    site_outcomes: dict[int, Counter]        # site id -> outcome -> count
    loop_histogram: dict[int, Counter]       # loop site id -> body entries -> #shots
    site_meta: list[tuple[int, str, str]]
    mean_final_state: DensityOperator

    def shots_entering(self, site_id: int) -> int:
        hist = self.loop_histogram[site_id]
        return self.shots - hist.get(0, 0)

    def total_entries(self, site_id: int) -> int:
        return sum(k * c for k, c in self.loop_histogram[site_id].items())

    def to_csv_rows(self) -> list[tuple[str, int, int, int]]:
        rows = [("outcome", sid, outcome, count)
                for sid, counter in sorted(self.site_outcomes.items())
                for outcome, count in sorted(counter.items())]
        rows += [("circles", sid, k, count)
                 for sid, counter in sorted(self.loop_histogram.items())
                 for k, count in sorted(counter.items())]
        return rows

    def to_json_dict(self) -> dict:
        return {
            "shots": self.shots,
            "seed": self.seed,
            "sites": [{"id": sid, "kind": kind, "label": label}
                      for sid, kind, label in self.site_meta],
            "outcomes": {str(sid): dict(sorted(c.items()))
                         for sid, c in sorted(self.site_outcomes.items())},
            "circles": {str(sid): dict(sorted(c.items()))
                        for sid, c in sorted(self.loop_histogram.items())},
        }


def run_shots(program: SourceProgram | PreparedProgram, n: int, seed: int,
              step_limit: int = DEFAULT_STEP_LIMIT) -> ShotStats:
    """n independent shots; shot k runs with seed splitmix64(seed, k)."""
    if n < 1:
        raise QwhileError("need at least one shot")
    plan = program if isinstance(program, PreparedProgram) else prepare(program)
    site_outcomes: dict[int, Counter] = {sid: Counter() for sid, _, _ in plan.site_meta}
    loop_histogram: dict[int, Counter] = {sid: Counter() for sid in plan.loop_sites()}
    base = SamplerState(seed)
    mean = np.zeros((plan.dim, plan.dim), dtype=complex)
    for k in range(n):
        record = run_shot(plan, base.child(k).seed, step_limit)
        for sid, outcome in record.outcomes:
            site_outcomes[sid][outcome] += 1
        for sid, count in record.loop_counts.items():
            loop_histogram[sid][count] += 1
        mean += record.final_state._mat
    mean /= n
    return ShotStats(n, seed, site_outcomes, loop_histogram, list(plan.site_meta),
                     DensityOperator(mean, validate=False))


# --- exhaustive distribution mode --------------------------------------------

@dataclass
class DistributionResult:
    """Weighted terminal states plus unexplored (truncated) mass."""

    terminals: list[tuple[float, DensityOperator]]
    residual: float

    def total_weight(self) -> float:
        return sum(w for w, _ in self.terminals)

    def merged(self, atol: float = 1e-10) -> "DistributionResult":
        """Coalesce terminals whose states agree entrywise within atol."""
        out: list[tuple[float, np.ndarray]] = []
        for w, state in self.terminals:
            m = state._mat
            for i, (wi, mi) in enumerate(out):
                if m.shape == mi.shape and np.allclose(m, mi, atol=atol):
                    out[i] = (wi + w, mi)
                    break
            else:
                out.append((w, m))
        out.sort(key=lambda t: -t[0])
        return DistributionResult(
            [(w, DensityOperator(m, validate=False)) for w, m in out], self.residual)


def match_distributions(a: DistributionResult, b: DistributionResult,
                        atol: float = 1e-9) -> bool:
    """True iff both results have the same terminal (weight, state) sets
    and residuals, matching states entrywise within atol."""
    if abs(a.residual - b.residual) > atol:
        return False
    am, bm = a.merged(atol), b.merged(atol)
    if len(am.terminals) != len(bm.terminals):
        return False
    used: set[int] = set()
    for w, s in am.terminals:
        for j, (w2, s2) in enumerate(bm.terminals):
            if j in used:
                continue
            if abs(w - w2) <= atol and np.allclose(s._mat, s2._mat, atol=atol):
                used.add(j)
                break
        else:
            return False
    return True


def run_distribution(program: SourceProgram | PreparedProgram,
                     mass_threshold: float = DEFAULT_MASS_THRESHOLD,
                     step_limit: int = DEFAULT_DISTRIBUTION_STEP_LIMIT,
                     state: DensityOperator | None = None) -> DistributionResult:
    """Explore every measurement branch breadth-first.

    A branch is abandoned (its mass reported as residual) when it is
    about to measure again while holding weight below mass_threshold, or
    when it exceeds step_limit steps; non-measuring tails always run to
    termination.
    """
    c0 = initial_configuration(program, state)
    queue: deque[tuple[Configuration, int]] = deque([(c0, 0)])
    terminals: list[tuple[float, DensityOperator]] = []
    residual = 0.0
    while queue:
        c, steps = queue.popleft()
        if c.terminated:
            terminals.append((c.weight, c.state))
            continue
        at_measurement = isinstance(c.remaining[0], (Case, While))
        if steps >= step_limit or (at_measurement and c.weight < mass_threshold):
            residual += c.weight
            continue
        for succ in step(c, None):
            queue.append((succ, steps + 1))
    return DistributionResult(terminals, residual).merged()
