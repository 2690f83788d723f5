"""tmsub: Turing machines compiled into real-time subtyping machines.

The pipeline: parse or build a machine (`tm`), compile it into a class
table and initial query (`encoding`), resolve queries with the deduction
engine (`engine`), and emit equivalent Python type-hint programs
(`codegen`). The `cli` module ties everything together.
"""

__version__ = "0.1.0"
