"""Permutation groups on {0..n-1}, with a deterministic Schreier-Sims order."""
from __future__ import annotations

from collections import deque
from typing import Iterable, Iterator, Sequence

from ..errors import UnsupportedError

Perm = tuple[int, ...]

ELEMENT_LIMIT = 10_000


def compose(a: Perm, b: Perm) -> Perm:
    """a then b: x -> b[a[x]]."""
    return tuple(b[x] for x in a)


def inverse(a: Perm) -> Perm:
    out = [0] * len(a)
    for i, x in enumerate(a):
        out[x] = i
    return tuple(out)


def perm_order(a: Perm) -> int:
    from math import lcm

    seen, out = set(), 1
    for i in range(len(a)):
        if i in seen:
            continue
        n, j = 0, i
        while j not in seen:
            seen.add(j)
            j = a[j]
            n += 1
        out = lcm(out, n)
    return out


def support(a: Perm) -> list[int]:
    return [i for i, x in enumerate(a) if x != i]


class _StabilizerChain:
    """Base and strong generating set from the deterministic Schreier-Sims algorithm."""

    def __init__(self, n: int, generators: Sequence[Perm]):
        self.n = n
        self.ident = tuple(range(n))
        self.base: list[int] = []
        self.strong: list[Perm] = []
        self.trans: list[dict[int, Perm]] = []  # point -> coset rep mapping the base point there
        for g in generators:
            if g == self.ident:
                continue
            if all(g[b] == b for b in self.base):
                self.base.append(_first_moved(g))
            self.strong.append(g)
        self.trans = [self._orbit(i) for i in range(len(self.base))]
        self._complete()

    def level_gens(self, i: int) -> list[Perm]:
        fixed = self.base[:i]
        return [s for s in self.strong if all(s[b] == b for b in fixed)]

    def _orbit(self, level: int) -> dict[int, Perm]:
        b = self.base[level]
        gens = self.level_gens(level)
        trans = {b: self.ident}
        queue = deque([b])
        while queue:
            x = queue.popleft()
            for g in gens:
                y = g[x]
                if y not in trans:
                    trans[y] = compose(trans[x], g)
                    queue.append(y)
        return trans

    def sift(self, g: Perm, start: int = 0) -> tuple[Perm, int]:
        for j in range(start, len(self.base)):
            x = g[self.base[j]]
            t = self.trans[j].get(x)
            if t is None:
                return g, j
            g = compose(g, inverse(t))
        return g, len(self.base)

    def _complete(self) -> None:
        i = len(self.base) - 1
        while i >= 0:
            extended = False
            for x, t in list(self.trans[i].items()):
                for s in self.level_gens(i):
                    h = compose(compose(t, s), inverse(self.trans[i][s[x]]))
                    if h == self.ident:
                        continue
                    r, j = self.sift(h, i + 1)
                    if r == self.ident:
                        continue
                    if j == len(self.base):
                        self.base.append(_first_moved(r))
                        self.trans.append({})
                    self.strong.append(r)
                    for lvl in range(i + 1, j + 1):
                        self.trans[lvl] = self._orbit(lvl)
                    i, extended = j, True
                    break
                if extended:
                    break
            if not extended:
                i -= 1

    def order(self) -> int:
        out = 1
        for t in self.trans:
            out *= len(t)
        return out


def _first_moved(g: Perm) -> int:
    return next(i for i, x in enumerate(g) if x != i)


class PermGroup:
    def __init__(self, degree: int, generators: Iterable[Sequence[int]] = ()):
        self.degree = degree
        gens = []
        for g in generators:
            g = tuple(int(x) for x in g)
            if sorted(g) != list(range(degree)):
                raise ValueError("generator is not a permutation of the right degree")
            if g != tuple(range(degree)) and g not in gens:
                gens.append(g)
        self.generators: tuple[Perm, ...] = tuple(gens)
        self._chain: _StabilizerChain | None = None
        self._elements: list[Perm] | None = None

    @property
    def identity(self) -> Perm:
        return tuple(range(self.degree))

    def _stab_chain(self) -> _StabilizerChain:
        if self._chain is None:
            self._chain = _StabilizerChain(self.degree, self.generators)
        return self._chain

    def order(self) -> int:
        return self._stab_chain().order()

    def __contains__(self, g: Sequence[int]) -> bool:
        r, _ = self._stab_chain().sift(tuple(g))
        return r == self.identity

    def orbits(self) -> list[list[int]]:
        seen, out = set(), []
        for i in range(self.degree):
            if i in seen:
                continue
            orb, queue = [i], deque([i])
            seen.add(i)
            while queue:
                x = queue.popleft()
                for g in self.generators:
                    y = g[x]
                    if y not in seen:
                        seen.add(y)
                        orb.append(y)
                        queue.append(y)
            out.append(sorted(orb))
        return out

    def elements(self) -> list[Perm]:
        """All elements in breadth-first order from the identity (desk scale only)."""
        if self._elements is None:
            if self.order() > ELEMENT_LIMIT:
                raise UnsupportedError(f"group of order {self.order()} is too large to enumerate")
            seen = {self.identity}
            out = [self.identity]
            queue = deque(out)
            while queue:
                x = queue.popleft()
                for g in self.generators:
                    y = compose(x, g)
                    if y not in seen:
                        seen.add(y)
                        out.append(y)
                        queue.append(y)
            self._elements = out
        return self._elements

    def __iter__(self) -> Iterator[Perm]:
        return iter(self.elements())

    def __len__(self) -> int:
        return self.order()

    def __repr__(self) -> str:
        return f"PermGroup(degree={self.degree}, order={self.order()})"
