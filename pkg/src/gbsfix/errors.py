"""Exception hierarchy.

Input problems (bad files, bad words, invalid graphs) derive from
``InputError``; calls made outside an operation's domain derive from
``PreconditionViolated``.  The CLI maps these to exit codes 2 and 3.
"""


class GbsError(Exception):
    pass


class InputError(GbsError):
    pass


class PreconditionViolated(GbsError):
    pass


# graph validation


class ZeroLabel(InputError):
    def __init__(self, edge_id, end):
        super().__init__(f"edge {edge_id!r} has label 0 at its {end} end")
        self.edge_id = edge_id


class Disconnected(InputError):
    def __init__(self, unreachable):
        names = ", ".join(sorted(unreachable))
        super().__init__(f"graph is not connected; unreachable vertices: {names}")
        self.unreachable = tuple(sorted(unreachable))


class DanglingEdge(InputError):
    def __init__(self, edge_id, vertex):
        super().__init__(f"edge {edge_id!r} references unknown vertex {vertex!r}")
        self.edge_id = edge_id
        self.vertex = vertex


class DuplicateId(InputError):
    def __init__(self, ident, line=None, first_line=None):
        msg = f"duplicate id {ident!r}"
        if line is not None:
            msg = f"line {line}: {msg}"
        if first_line is not None:
            msg += f" (first declared on line {first_line})"
        super().__init__(msg)
        self.ident = ident
        self.line = line


class EmptyGraph(InputError):
    pass


class UnknownRoot(InputError):
    def __init__(self, root):
        super().__init__(f"unknown root vertex {root!r}")
        self.root = root


class NotCollapsible(PreconditionViolated):
    pass


class LabelTooLarge(InputError):
    pass


# words


class UnknownGenerator(InputError):
    def __init__(self, name, position=None):
        where = "" if position is None else f" at position {position}"
        super().__init__(f"unknown generator {name!r}{where}")
        self.name = name
        self.position = position


class WordSyntaxError(InputError):
    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position


class PresentationMismatch(GbsError):
    pass


class WordTooLong(GbsError):
    pass


class RadiusTooLarge(PreconditionViolated):
    pass


# modulus


class ElementarySystem(PreconditionViolated):
    pass


class NotCyclic(PreconditionViolated):
    pass


# automorphisms


class NotHomomorphism(GbsError):
    def __init__(self, relator):
        super().__init__(f"relator {relator} does not map to the identity")
        self.relator = relator


class NotInvertible(GbsError):
    def __init__(self, generator, detail=""):
        msg = f"declared inverse fails on generator {generator!r}"
        super().__init__(msg + (f": {detail}" if detail else ""))
        self.generator = generator


# classification / witnesses


class NotOneFree(PreconditionViolated):
    def __init__(self, edge_id, label):
        super().__init__(f"system is not 1-free: edge {edge_id!r} carries label {label}")
        self.edge_id = edge_id
        self.label = label


class Elementary(PreconditionViolated):
    """Raised for elementary systems.

    Carries the trivial answer: every subgroup of Z, Z^2 or the Klein
    bottle group is finitely generated of rank at most 2.
    """

    rank_bound = 2

    def __init__(self, kind):
        super().__init__(
            f"system is elementary ({kind}); all fixed subgroups have rank at most 2"
        )
        self.kind = kind


class NonzeroBetti(PreconditionViolated):
    pass


class NoSuitableStableLetter(PreconditionViolated):
    pass


class SearchExhausted(GbsError):
    def __init__(self, what, bound):
        super().__init__(f"{what}: search exhausted at bound {bound}")
        self.bound = bound
