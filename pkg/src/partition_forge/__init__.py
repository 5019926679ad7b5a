"""partition-forge: privilege-separating partitioner for a Solidity subset."""

__version__ = "0.1.0"
