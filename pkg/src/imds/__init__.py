"""Integrated Model of Distributed Systems: parse, explore, verify.

``imds.lang`` reads the IMDS input language, ``imds.core`` builds the
labelled transition system, ``imds.verify`` checks deadlock and termination
properties, and ``imds.routes`` compiles multi-robot route plans into
specifications.
"""

__version__ = "0.1.0"
