"""Finitely generated subgroups of Q* and the modular homomorphism.

Q* is identified with {+-1} x (free abelian on the primes).  A subgroup
generated by r_1..r_n is the image of the lattice spanned by the rows
``(v_p(r_i) for p in primes) + (sign bit,)`` together with ``(0,..,0,2)``;
the Hermite normal form of that lattice is the canonical representation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from sympy import factorint

from .errors import ElementarySystem, LabelTooLarge, NotCyclic
from .graph import LabelledGraph, Presentation, derive_presentation, is_elementary

FACTOR_BOUND = 10**12


def factorize(n: int, bound: int = FACTOR_BOUND) -> dict[int, int]:
    """Prime factorisation of ``|n|``."""
    n = abs(n)
    if n == 0:
        raise ValueError("cannot factorise 0")
    if n > bound:
        raise LabelTooLarge(f"{n} exceeds the factorisation bound {bound}")
    return {int(p): int(k) for p, k in sorted(factorint(n).items())}


def hermite_normal_form(rows: Iterable[Sequence[int]], ncols: int) -> list[list[int]]:
    """Row-style HNF: echelon, positive pivots, entries above a pivot in [0, pivot).

    Zero rows are dropped, so the result is a basis of the row lattice.
    """
    m = [list(r) for r in rows if any(r)]
    out: list[list[int]] = []
    col = 0
    while m and col < ncols:
        nz = [r for r in m if r[col] != 0]
        rest = [r for r in m if r[col] == 0]
        if not nz:
            col += 1
            continue
        # Euclid on column `col` until a single row is left with a nonzero entry.
        while len(nz) > 1:
            nz.sort(key=lambda r: abs(r[col]))
            piv = nz[0]
            new = [piv]
            for r in nz[1:]:
                q = r[col] // piv[col]
                r2 = [x - q * y for x, y in zip(r, piv)]
                if r2[col] != 0:
                    new.append(r2)
                elif any(r2):
                    rest.append(r2)
            nz = new
        piv = nz[0]
        if piv[col] < 0:
            piv = [-x for x in piv]
        out.append(piv)
        m = rest
        col += 1
    # reduce entries above pivots
    for i in range(len(out)):
        pc = next(j for j, x in enumerate(out[i]) if x)
        for k in range(i):
            q = out[k][pc] // out[i][pc]
            if q:
                out[k] = [x - q * y for x, y in zip(out[k], out[i])]
    return out


@dataclass(frozen=True)
class ModulusSubgroup:
    """Canonical form of a finitely generated subgroup of Q*.

    ``basis`` rows are prime-exponent vectors over ``primes`` in HNF;
    ``signs[i]`` is the sign bit carried by basis row ``i`` (always 0 if
    ``contains_minus_one``).
    """

    contains_minus_one: bool
    primes: tuple[int, ...]
    basis: tuple[tuple[int, ...], ...]
    signs: tuple[int, ...]

    @classmethod
    def generated_by(cls, gens: Iterable[Fraction | int]) -> ModulusSubgroup:
        gens = [Fraction(r) for r in gens]
        if any(r == 0 for r in gens):
            raise ValueError("0 is not in Q*")
        facs = []
        primes: set[int] = set()
        for r in gens:
            f = dict(factorize(r.numerator))
            for p, e in factorize(r.denominator).items():
                f[p] = f.get(p, 0) - e
            facs.append((f, 1 if r < 0 else 0))
            primes.update(f)
        plist = tuple(sorted(primes))
        n = len(plist) + 1
        rows = [[f.get(p, 0) for p in plist] + [s] for f, s in facs]
        rows.append([0] * (n - 1) + [2])
        hnf = hermite_normal_form(rows, n)
        # the (0,..,0,2) row forces a final pivot row (0,..,0,d) with d in {1, 2}
        minus = hnf.pop()[-1] == 1
        basis = tuple(tuple(r[:-1]) for r in hnf)
        signs = tuple(0 if minus else r[-1] for r in hnf)
        used = [i for i, p in enumerate(plist) if any(b[i] for b in basis)]
        return cls(
            minus,
            tuple(plist[i] for i in used),
            tuple(tuple(b[i] for i in used) for b in basis),
            signs,
        )

    @property
    def rank(self) -> int:
        return len(self.basis)

    def basis_rationals(self) -> list[Fraction]:
        out = []
        for row, s in zip(self.basis, self.signs):
            r = Fraction(1)
            for p, e in zip(self.primes, row):
                r *= Fraction(p) ** e
            out.append(-r if s else r)
        return out

    def generators(self) -> list[Fraction]:
        """Canonical generating set (-1 first when present)."""
        return ([Fraction(-1)] if self.contains_minus_one else []) + self.basis_rationals()

    def is_trivial(self) -> bool:
        return not self.contains_minus_one and not self.basis

    def is_cyclic(self) -> bool:
        return self.rank == 0 or (self.rank == 1 and not self.contains_minus_one)

    def __str__(self):
        if self.is_trivial():
            return "{1}"
        if self.rank == 0:
            return "{1, -1}"
        return "<" + ", ".join(str(r) for r in self.generators()) + ">"


def is_pm_one(s: ModulusSubgroup) -> bool:
    return s.contains_minus_one and s.rank == 0


def generated_by_integer(s: ModulusSubgroup) -> tuple[bool, int | None]:
    """For cyclic ``s``: whether a generator is an integer, and that integer.

    ``<r>`` equals ``<n>`` for an integer n iff r or 1/r is an integer.
    """
    if not s.is_cyclic():
        raise NotCyclic(f"{s} is not cyclic")
    if s.rank == 0:
        return True, -1 if s.contains_minus_one else 1
    (r,) = s.basis_rationals()
    if r.denominator == 1:
        return True, r.numerator
    if r.numerator in (1, -1):
        inv = 1 / r
        return True, inv.numerator
    return False, None


def subgroup_equal(a: ModulusSubgroup, b: ModulusSubgroup) -> bool:
    return a == b


def _path_delta(g: LabelledGraph, letters) -> Fraction:
    d = Fraction(1)
    for letter in letters:
        _, _, dep, arr = g.letters[letter]
        d *= Fraction(arr, dep)
    return d


def stable_letter_delta(pres: Presentation, letter: str) -> Fraction:
    """Delta of the stable letter: arrival/departure label ratios along its loop.

    For ``loop t: v[p] -- v[q]`` this is q/p, since ``t v^q t^-1 = v^p``.
    """
    g = pres.graph
    e = g.edge(letter)
    path = pres.path_from_root(e.initial) + ((letter, 1),) + pres.path_to_root(e.terminal)
    return _path_delta(g, path)


def modulus_of_system(
    g: LabelledGraph, pres: Presentation | None = None, *, check_elementary: bool = True
) -> tuple[ModulusSubgroup, dict[str, Fraction]]:
    if pres is None:
        pres = derive_presentation(g)
    if check_elementary:
        kind = is_elementary(g)
        if kind is not None:
            raise ElementarySystem(f"modulus undefined: system is elementary ({kind.value})")
    deltas = {t: stable_letter_delta(pres, t) for t in pres.stable_letters}
    return ModulusSubgroup.generated_by(deltas.values()), deltas


def lcm(*xs: int) -> int:
    out = 1
    for x in xs:
        out = out * abs(x) // math.gcd(out, abs(x))
    return out
