"""Exact checks of Bochner and Weyl rigidity for polynomial forms and embeddings."""

__version__ = "0.1.0"
