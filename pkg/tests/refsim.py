"""Dense numpy reference implementations used as independent oracles.

Everything here works on full statevectors with numpy reshapes, deliberately
sharing no code with the sparse engine under test. Axis 0 of the reshaped
vector is the most significant bit of the basis index, matching the
package's register ordering.
"""

from __future__ import annotations

import numpy as np


def register_axes(layout, name) -> list[int]:
    start = layout.offset(name)
    return list(range(start, start + layout.width(name)))


def dense_swap(vec: np.ndarray, layout, reg_a: str, reg_b: str) -> np.ndarray:
    n = layout.num_qubits
    psi = vec.reshape([2] * n)
    axes = list(range(n))
    for qa, qb in zip(register_axes(layout, reg_a), register_axes(layout, reg_b)):
        axes[qa], axes[qb] = axes[qb], axes[qa]
    return np.transpose(psi, axes).reshape(-1)


def dense_swap_probability(vec: np.ndarray, layout, reg_a: str, reg_b: str) -> float:
    swapped = dense_swap(vec, layout, reg_a, reg_b)
    return float(np.linalg.norm((vec - swapped) / 2.0) ** 2)


def dense_reduced_density(vec: np.ndarray, layout, keep: list[str]) -> np.ndarray:
    n = layout.num_qubits
    psi = vec.reshape([2] * n)
    kept_axes = [ax for name in keep for ax in register_axes(layout, name)]
    traced_axes = [ax for ax in range(n) if ax not in kept_axes]
    psi = np.transpose(psi, kept_axes + traced_axes)
    mat = psi.reshape(2 ** len(kept_axes), 2 ** len(traced_axes))
    return mat @ mat.conj().T


def dense_register_probabilities(vec: np.ndarray, layout, reg: str) -> np.ndarray:
    n = layout.num_qubits
    psi = vec.reshape([2] * n)
    axes = register_axes(layout, reg)
    others = tuple(ax for ax in range(n) if ax not in axes)
    probs = np.sum(np.abs(psi) ** 2, axis=others)
    return probs.reshape(-1)
