"""defquest: definition-driven question generation for textbooks.

Subpackages and modules:

- ``corpus``      textbook/index ingestion and sentence segmentation
- ``depgraph``    dependency-graph model and CoNLL-U reader
- ``patterns``    graph-query DSL (compile + match)
- ``selection``   context selection and answer extraction
- ``generation``  question text generation (template or external)
- ``clients``     HTTP clients for parser / scorer / generator services
- ``pipeline``    the end-to-end run, statistics, sampling, sweeps
- ``evalkit``     annotation scheme, agreement statistics, ROC tooling
- ``service``     review/curation HTTP service with event-log persistence
"""

__version__ = "0.1.0"
