"""Fixed subgroups of automorphisms of generalised Baumslag-Solitar groups."""

__version__ = "0.1.0"
