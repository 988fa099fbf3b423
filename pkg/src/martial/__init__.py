"""Martial: a software-similarity detection toolkit.

Analysers: winnowing fingerprints over normalized token streams, comment
semantics via embeddings, linter-directive vectors, and dynamic
performance-counter birthmarks. Ships with an obfuscation mutator for
robustness testing, a CLI, and a human-review HTTP service.
"""

__version__ = "0.1.0"
