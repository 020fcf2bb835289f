"""Small algebras used as fixtures and in the examples."""
from __future__ import annotations

from .liealg import LieAlgebraModel


def abelian(n: int, h=()) -> LieAlgebraModel:
    return LieAlgebraModel.from_entries(n, [], subalgebra_h=tuple(h), name=f"R^{n}")


def heisenberg(h=()) -> LieAlgebraModel:
    """h3: [e1, e2] = e3."""
    return LieAlgebraModel.from_entries(3, [(2, 0, 1, 1)], subalgebra_h=tuple(h), name="h3")


def su2(h=()) -> LieAlgebraModel:
    """su(2) with [e_i, e_j] = eps_ijk e_k."""
    entries = [(2, 0, 1, 1), (0, 1, 2, 1), (1, 2, 0, 1)]
    return LieAlgebraModel.from_entries(3, entries, subalgebra_h=tuple(h), name="su2")


def solvable2(h=()) -> LieAlgebraModel:
    """Non-unimodular aff(1): [e1, e2] = e2."""
    return LieAlgebraModel.from_entries(2, [(1, 0, 1, 1)], subalgebra_h=tuple(h), name="aff1")


def solvable3(h=()) -> LieAlgebraModel:
    """sol: [e3, e1] = e1, [e3, e2] = -e2 (unimodular, Casimir f1*f2)."""
    entries = [(0, 2, 0, 1), (1, 2, 1, -1)]
    return LieAlgebraModel.from_entries(3, entries, subalgebra_h=tuple(h), name="sol")


def catalog() -> dict[str, LieAlgebraModel]:
    return {
        "R2": abelian(2),
        "R3": abelian(3),
        "h3": heisenberg(),
        "su2": su2(),
        "aff1": solvable2(),
        "sol": solvable3(),
    }


def perturbed(model: LieAlgebraModel, a: int, b: int, c: int, value=1) -> LieAlgebraModel:
    """Copy of ``model`` with C^a_{bc} (and its antisymmetric partner) shifted by ``value``."""
    C = [[list(r) for r in m] for m in model.C]
    C[a][b][c] += value
    C[a][c][b] -= value
    return LieAlgebraModel(model.dim, C, model.basis_labels, model.subalgebra_h, None,
                           f"{model.name}+C^{a + 1}_{b + 1}{c + 1}")


def broken_antisymmetry() -> LieAlgebraModel:
    """C^2_12 = 1 with no partner C^2_21 = -1."""
    C = [[[0, 0], [0, 0]], [[0, 1], [0, 0]]]
    return LieAlgebraModel(2, C, name="R2+C^2_12(one-sided)")


def perturbations() -> dict[str, tuple[LieAlgebraModel, str]]:
    """Invalid inputs, each with the violation kind it must be rejected for."""
    return {
        "h3+C^2_23": (perturbed(heisenberg(), 1, 1, 2), "jacobi"),
        "su2+C^3_13": (perturbed(su2(), 2, 0, 2), "jacobi"),
        "R2 one-sided": (broken_antisymmetry(), "antisymmetry"),
        "su2/span(e1,e2)": (su2(h=(0, 1)), "subalgebra"),
    }
