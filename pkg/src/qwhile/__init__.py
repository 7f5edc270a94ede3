"""qwhile: a quantum while-language toolchain.

Parses a textual quantum while-language, simulates its small-step
operational semantics (sampled one-shot and exhaustive distribution
modes), compiles programs to the f-QASM instruction set with an
executable virtual machine, and synthesizes arbitrary unitaries into
basic-gate circuits.
"""

__version__ = "0.1.0"
