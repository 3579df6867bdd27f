"""dsr: natural-language math statements to compiler-checked Lean 4 theorems.

The pipeline decomposes a statement into logical components, formalizes each
component into a Lean fragment plus an operator tree, assembles the tree
leaves into a full theorem statement deterministically, and repairs compile
errors bottom-up through subtree, component, and statement granularity under
a fixed inference-call budget, finishing with a mandatory semantic pass.
All LLM, verifier, and judge dependencies are pluggable clients with
record/replay cassettes, so the symbolic core runs offline.
"""

__version__ = "0.1.0"
