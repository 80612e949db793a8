"""Human-in-the-loop urban intervention pipeline.

Stages: detection ingestion and activity filtering (:mod:`ingest`),
co-occurrence embeddings and top-k complements (:mod:`cooccur`), staged
anchor/pair/semantic recommendation (:mod:`recommend`), text-to-3D asset
normalization (:mod:`mesh`), and the session workflow service
(:mod:`service`). The :mod:`cli` module ties them together for batch and
operator use.
"""

__version__ = "0.1.0"
