"""Exact statevector workbench for first- and second-quantized lattice fermion simulation.

Modules
-------
lattice     geometry, hopping/potential/Coulomb ingredients, momentum transform
fixedpoint  b-bit arithmetic used for on-the-fly interaction phases
firstq      first-quantized tensor states and their Trotterized evolution (A1)
fock        Fock-space states, ladder operators, sectors, A2 and online A2
bridge      maps between the two pictures and cross-representation checks
measure     von Neumann, Kitaev, kickback and Ramsey readout schemes
oracle      dense brute-force references
cli         the ``fockforge`` command
"""

__version__ = "0.1.0"
