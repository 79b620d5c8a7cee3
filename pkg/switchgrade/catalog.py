"""
Named matrices and systems of the construction.

Two planar systems carry everything. The A-system (A0, A1) is marginally
stable with an explicit extremal norm. The rotating pair (B0', B1') grows at
rate lambda; shifting it by -lambda gives B = (B0, B1), and adding the zero
matrix gives B0 = (0, B0, B1). The Kronecker lift of A and B0 gives the
4-dimensional X with vertices

    X0 = A0 (x) I + I (x) B0,   X1 = A0 (x) I + I (x) B1,   X2 = A1 (x) I.

lambda is computed once per process by the angular method and cached.
"""

import logging
from functools import lru_cache
from typing import Tuple

import numpy as np

from .errors import InvalidInputError
from .matexp import kron
from .models import SwitchingSystem
from .system import shift

logger = logging.getLogger(__name__)

LOG4_OVER_PI = float(np.log(4.0) / np.pi)
CGM_ALPHA_REFERENCE = -0.88964
I2 = np.eye(2)
Z2 = np.zeros((2, 2))

A0 = np.array([[0.0, 0.0], [0.0, -1.0]])
A1 = np.array([[-1.0, 1.0], [-1.0, -1.0]])
B0_PRIME = np.array([[0.0, -2.0], [0.5, 0.0]])
B1_PRIME = np.array([[0.0, -0.5], [2.0, 0.0]])
M0 = np.array([[0.0, 0.0], [0.0, -1.0]])

for _m in (A0, A1, B0_PRIME, B1_PRIME, M0, I2, Z2):
    _m.setflags(write=False)


def M1(alpha: float) -> np.ndarray:
    """Second CGM generator [[alpha, 3], [-3/5, 7/10]]."""
    return np.array([[alpha, 3.0], [-0.6, 0.7]])


@lru_cache(maxsize=1)
def rotation_lambda() -> float:
    """Growth rate of the rotating pair, by the angular method (cached)."""
    from .lyapunov import lambda_planar_angular

    lam = lambda_planar_angular(system_B_prime()).value
    logger.info(f"📋 lambda = {lam:.12f} (log 4/pi = {LOG4_OVER_PI:.12f})")
    return lam


def system_A() -> SwitchingSystem:
    return SwitchingSystem((A0, A1), 'A')


def system_B_prime() -> SwitchingSystem:
    return SwitchingSystem((B0_PRIME, B1_PRIME), "B'")


def system_B(offset: float = 0.0) -> SwitchingSystem:
    """The rotating pair shifted by -(lambda + offset) I."""
    shifted = shift(system_B_prime(), rotation_lambda() + offset)
    return SwitchingSystem(shifted.generators, 'B' if offset == 0 else f'B[{offset:+g}]')


def system_B0(offset: float = 0.0) -> SwitchingSystem:
    """B with the zero matrix as an extra (first) vertex."""
    B = system_B(offset)
    return SwitchingSystem((Z2,) + B.generators, 'B0' if offset == 0 else f'B0[{offset:+g}]')


def system_X(offset: float = 0.0) -> SwitchingSystem:
    B = system_B(offset)
    lifted_A0 = kron(A0, I2)
    X0 = lifted_A0 + kron(I2, B.generators[0])
    X1 = lifted_A0 + kron(I2, B.generators[1])
    X2 = kron(A1, I2)
    return SwitchingSystem((X0, X1, X2), 'X' if offset == 0 else f'X[{offset:+g}]')


def system_cgm(alpha: float) -> SwitchingSystem:
    return SwitchingSystem((M0, M1(alpha)), 'CGM')


def tensor_families(offset: float = 0.0) -> Tuple[SwitchingSystem, SwitchingSystem]:
    """
    The commuting lifts A (x) I and I (x) B0.

    Every left factor commutes with every right factor, the sum system
    {A_i (x) I + I (x) B_j} contains all three vertices of X, and the union
    is the block system both factors live in.
    """
    lifted_A = SwitchingSystem(tuple(kron(G, I2) for G in system_A().generators), 'A(x)I')
    lifted_B = SwitchingSystem(tuple(kron(I2, G) for G in system_B0(offset).generators), 'I(x)B0')
    return lifted_A, lifted_B


SYSTEMS = {
    'A': system_A,
    "B'": system_B_prime,
    'B': system_B,
    'B0': system_B0,
    'X': system_X,
}


NAMED_MATRICES = ('A0', 'A1', "B0'", "B1'", 'B0', 'B1', 'X0', 'X1', 'X2', 'M0')


def named_matrix(name: str, offset: float = 0.0) -> np.ndarray:
    """
    Look up a matrix by name (A0, A1, B0', B1', B0, B1, X0, X1, X2, M0).

    Only the lambda-dependent names trigger the lambda computation.

    Raises:
        InvalidInputError: Unknown name
    """
    fixed = {'A0': A0, 'A1': A1, "B0'": B0_PRIME, "B1'": B1_PRIME, 'M0': M0}
    if name in fixed:
        return fixed[name]
    if name in ('B0', 'B1'):
        return system_B(offset).generators[int(name[1])]
    if name in ('X0', 'X1', 'X2'):
        return system_X(offset).generators[int(name[1])]
    raise InvalidInputError(f"unknown matrix {name!r}; choose from {', '.join(NAMED_MATRICES)}")


def named_system(name: str, offset: float = 0.0) -> SwitchingSystem:
    try:
        builder = SYSTEMS[name]
    except KeyError:
        raise InvalidInputError(f"unknown system {name!r}; choose from {', '.join(SYSTEMS)}")
    if name in ('A', "B'"):
        return builder()
    return builder(offset)
