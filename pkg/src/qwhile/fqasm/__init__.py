"""f-QASM: IR, textual format, compiler from the while-language, and VM."""
from .compiler import compile_program
from .ir import (
    Apply,
    Cmp,
    FqasmProgram,
    InitQ,
    Instruction,
    Je,
    Jmp,
    Label,
    MeasMov,
    Mov,
    check_wellformed,
)
from .text import GATE_TEXT_NAMES, parse_fqasm, serialize
from .vm import PreparedVm, prepare_vm, vm_distribution, vm_run

__all__ = [
    "compile_program",
    "Apply", "Cmp", "FqasmProgram", "InitQ", "Instruction", "Je", "Jmp",
    "Label", "MeasMov", "Mov", "check_wellformed",
    "GATE_TEXT_NAMES", "parse_fqasm", "serialize",
    "PreparedVm", "prepare_vm", "vm_distribution", "vm_run",
]
