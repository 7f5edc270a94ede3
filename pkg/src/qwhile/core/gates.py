"""Built-in gate matrices and the named gate library."""
from __future__ import annotations

import numpy as np

from ..errors import NotUnitary, QwhileError
from .linalg import require_unitary

_S2 = np.sqrt(2.0)

H = np.array([[1, 1], [1, -1]], dtype=complex) / _S2
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
I2 = np.eye(2, dtype=complex)
S = np.array([[1, 0], [0, 1j]], dtype=complex)
SDG = S.conj().T
T = np.array([[1, 0], [0, np.exp(1j * np.pi / 4)]], dtype=complex)
TDG = T.conj().T
CNOT = np.array(
    [[1, 0, 0, 0],
     [0, 1, 0, 0],
     [0, 0, 0, 1],
     [0, 0, 1, 0]], dtype=complex)
SWAP = np.array(
    [[1, 0, 0, 0],
     [0, 0, 1, 0],
     [0, 1, 0, 0],
     [0, 0, 0, 1]], dtype=complex)


class GateLibrary:
    """Named unitaries available to programs without declaration.

    The standard library provides H, X, Z, I, CNOT, T and S. Every entry is
    checked to be unitary (within 1e-10) when registered.
    """

    def __init__(self, gates: dict[str, np.ndarray] | None = None):
        self._gates: dict[str, np.ndarray] = {}
        for name, mat in (gates or {}).items():
            self.register(name, mat)

    @classmethod
    def standard(cls) -> "GateLibrary":
        return cls({"H": H, "X": X, "Z": Z, "I": I2, "CNOT": CNOT, "T": T, "S": S})

    def register(self, name: str, matrix: np.ndarray) -> None:
        try:
            m = require_unitary(matrix, what=f"gate {name!r}")
        except NotUnitary:
            raise
        self._gates[name] = m

    def __contains__(self, name: str) -> bool:
        return name in self._gates

    def __getitem__(self, name: str) -> np.ndarray:
        try:
            return self._gates[name].copy()
        except KeyError:
            raise QwhileError(f"unknown gate {name!r}") from None

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(self._gates)


STANDARD_LIBRARY = GateLibrary.standard()
