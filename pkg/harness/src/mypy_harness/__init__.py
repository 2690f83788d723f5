"""Stack-size measurement harness for type-checking generated programs.

Runs Mypy inside a worker thread whose call-stack size is controlled,
classifies the outcome (clean, type error, crash, timeout), and binary
searches the minimal stack that avoids a crash. Communicates with the
compiler only through files and its command line.
"""

__version__ = "0.1.0"
