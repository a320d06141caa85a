"""Simulation workbench for entropy along horospherical balls of free-group actions.

The package provides, bottom up:

- reduced words in a finitely generated free group (`words`),
- the boundary of the group, its uniform measure, the boundary action and
  the return-word cocycle along tail classes (`boundary`),
- lazily evaluated Bernoulli shift points and finite partitions (`shifts`),
- Shannon entropy, information functions and convergence experiments
  (`entropy`),
- finite models of hyperfinite equivalence relations, subset functions,
  covering and disjointification algorithms (`hyperfinite`),
- class averages along extended equivalence classes (`averaging`),
- subadditive functionals over subset functions and their normalized
  limits (`subadditive`),
- a command line front end (`cli`) writing delimited reports plus figures.
"""

__version__ = "0.1.0"
