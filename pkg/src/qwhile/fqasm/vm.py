"""Virtual machine executing f-QASM against the dense quantum state.

Program-counter semantics: INIT/APPLY act on the global state, MEAS_MOV
samples (or forks, in distribution mode) and stores the outcome index,
CMP sets fr1, JE jumps iff fr1 == 1, JMP jumps, and the machine halts
past the last instruction. Classical registers start empty; MOV empties
its source; reading an empty register (or JE before any CMP) is an
error.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from ..core.gates import GateLibrary, STANDARD_LIBRARY
from ..core.types import DensityOperator
from ..errors import QwhileError, StepLimitExceeded, UninitializedRegisterRead
from ..engine.runtime import (
    DEFAULT_DISTRIBUTION_STEP_LIMIT,
    DEFAULT_MASS_THRESHOLD,
    DEFAULT_STEP_LIMIT,
    DistributionResult,
    RunRecord,
    _Embedded,
    _K01,
    _MeasSite,
    _P0,
)
from ..engine.sampler import PROB_FLOOR, SamplerState, sample_outcome
from ..lang.checker import instantiate_measurement
from .ir import (
    Apply,
    Cmp,
    FqasmProgram,
    InitQ,
    Je,
    Jmp,
    Label,
    MeasMov,
    Mov,
    check_wellformed,
)


@dataclass
class PreparedVm:
    prog: FqasmProgram
    n: int
    positions: dict[str, tuple[int, ...]]
    labels: dict[str, int]
    unitaries: dict[int, _Embedded] = field(default_factory=dict)   # instr index ->
    init_kraus: dict[int, list] = field(default_factory=dict)
    sites: dict[int, _MeasSite] = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return 1 << self.n

    def initial_state(self) -> np.ndarray:
        rho = np.zeros((self.dim, self.dim), dtype=complex)
        rho[0, 0] = 1.0
        return rho


def prepare_vm(prog: FqasmProgram, library: GateLibrary = STANDARD_LIBRARY) -> PreparedVm:
    check_wellformed(prog)
    positions: dict[str, tuple[int, ...]] = {}
    at = 0
    for name, width in prog.qregs:
        positions[name] = tuple(range(at, at + width))
        at += width
    plan = PreparedVm(prog, at, positions, prog.labels())

    def gate_matrix(name: str) -> np.ndarray:
        decl = prog.gate_decl(name)
        if decl is not None:
            return decl.matrix
        if name in library:
            return library[name]
        raise QwhileError(f"gate {name!r} is neither declared nor in the library")

    for idx, ins in enumerate(prog.instructions):
        if isinstance(ins, InitQ):
            pairs = []
            for q in reversed(positions[ins.qreg]):
                pairs.append((_Embedded(_P0, (q,), plan.n), _Embedded(_K01, (q,), plan.n)))
            plan.init_kraus[idx] = pairs
        elif isinstance(ins, Apply):
            pos: tuple[int, ...] = ()
            for r in ins.qregs:
                pos += positions[r]
            plan.unitaries[idx] = _Embedded(gate_matrix(ins.gate), pos, plan.n)
        elif isinstance(ins, MeasMov):
            pos = ()
            for r in ins.qregs:
                pos += positions[r]
            mset = instantiate_measurement(prog.meas_decl(ins.meas), 1 << len(pos))
            plan.sites[idx] = _MeasSite(idx, "meas", mset.operators, pos, plan.n)
    return plan


@dataclass(frozen=True)
class _Regs:
    """Immutable classical register file; None marks an empty register."""

    values: tuple[tuple[str, int | None], ...]
    flag: int | None  # fr1

    @classmethod
    def empty(cls, names) -> "_Regs":
        return cls(tuple((nm, None) for nm in names), None)

    def read(self, name: str) -> int:
        for nm, val in self.values:
            if nm == name:
                if val is None:
                    raise UninitializedRegisterRead(f"register {name!r} is empty")
                return val
        raise UninitializedRegisterRead(f"register {name!r} does not exist")

    def write(self, updates: dict[str, int | None]) -> "_Regs":
        return _Regs(tuple((nm, updates.get(nm, val)) for nm, val in self.values), self.flag)

    def with_flag(self, flag: int) -> "_Regs":
        return _Regs(self.values, flag)


def _advance(plan: PreparedVm, pc: int, regs: _Regs, rho: np.ndarray):
    """Execute the non-measurement instruction at pc.

    Returns (new_pc, regs, rho) or the _MeasSite when pc sits on a
    MEAS_MOV (the caller decides how to branch).
    """
    ins = plan.prog.instructions[pc]
    if isinstance(ins, Label):
        return pc + 1, regs, rho
    if isinstance(ins, InitQ):
        out = rho
        for p0, k in plan.init_kraus[pc]:
            out = p0.sandwich(out) + k.sandwich(out)
        return pc + 1, regs, out
    if isinstance(ins, Apply):
        return pc + 1, regs, plan.unitaries[pc].sandwich(rho)
    if isinstance(ins, Mov):
        val = regs.read(ins.src)
        return pc + 1, regs.write({ins.dst: val, ins.src: None}), rho
    if isinstance(ins, Cmp):
        lhs = regs.read(ins.creg)
        rhs = ins.operand if isinstance(ins.operand, int) else regs.read(ins.operand)
        return pc + 1, regs.with_flag(1 if lhs == rhs else 0), rho
    if isinstance(ins, Jmp):
        return plan.labels[ins.label], regs, rho
    if isinstance(ins, Je):
        if regs.flag is None:
            raise UninitializedRegisterRead("JE before any CMP (fr1 is empty)")
        return (plan.labels[ins.label] if regs.flag == 1 else pc + 1), regs, rho
    if isinstance(ins, MeasMov):
        return plan.sites[pc]
    raise QwhileError(f"cannot execute {type(ins).__name__}")


def vm_run(prog: FqasmProgram | PreparedVm, seed: int,
           step_limit: int = DEFAULT_STEP_LIMIT,
           library: GateLibrary = STANDARD_LIBRARY) -> RunRecord:
    """One sampled pass; outcome log entries are (instruction index, outcome)."""
    plan = prog if isinstance(prog, PreparedVm) else prepare_vm(prog, library)
    rng = SamplerState(seed)
    regs = _Regs.empty(plan.prog.cregs)
    rho = plan.initial_state()
    pc = 0
    steps = 0
    outcomes: list[tuple[int, int]] = []
    end = len(plan.prog.instructions)
    while pc < end:
        if steps >= step_limit:
            raise StepLimitExceeded(f"no halt after {step_limit} instructions")
        result = _advance(plan, pc, regs, rho)
        steps += 1
        if isinstance(result, _MeasSite):
            site = result
            p = site.probabilities(rho)
            outcome = sample_outcome(p, rng)
            rho = site.collapse(rho, outcome, p[outcome])
            ins = plan.prog.instructions[pc]
            regs = regs.write({ins.creg: outcome})
            outcomes.append((pc, outcome))
            pc += 1
        else:
            pc, regs, rho = result
    return RunRecord(outcomes, DensityOperator(rho, validate=False), steps, {})


def vm_distribution(prog: FqasmProgram | PreparedVm,
                    mass_threshold: float = DEFAULT_MASS_THRESHOLD,
                    step_limit: int = DEFAULT_DISTRIBUTION_STEP_LIMIT,
                    library: GateLibrary = STANDARD_LIBRARY) -> DistributionResult:
    """Exhaustive branch exploration; mirrors engine run_distribution."""
    plan = prog if isinstance(prog, PreparedVm) else prepare_vm(prog, library)
    end = len(plan.prog.instructions)
    queue = deque([(0, _Regs.empty(plan.prog.cregs), plan.initial_state(), 1.0, 0)])
    terminals: list[tuple[float, DensityOperator]] = []
    residual = 0.0
    while queue:
        pc, regs, rho, weight, steps = queue.popleft()
        if pc >= end:
            terminals.append((weight, DensityOperator(rho, validate=False)))
            continue
        at_measurement = isinstance(plan.prog.instructions[pc], MeasMov)
        if steps >= step_limit or (at_measurement and weight < mass_threshold):
            residual += weight
            continue
        result = _advance(plan, pc, regs, rho)
        if isinstance(result, _MeasSite):
            site = result
            p = site.probabilities(rho)
            ins = plan.prog.instructions[pc]
            for i in range(len(p)):
                if p[i] <= PROB_FLOOR:
                    continue
                post = site.collapse(rho, i, p[i])
                queue.append((pc + 1, regs.write({ins.creg: i}), post,
                              weight * float(p[i]), steps + 1))
        else:
            new_pc, new_regs, new_rho = result
            queue.append((new_pc, new_regs, new_rho, weight, steps + 1))
    return DistributionResult(terminals, residual).merged()
