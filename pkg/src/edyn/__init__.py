"""edyn: effective dynamical systems over computable metric spaces.

Semi-decidable questions are total functions of an explicit fuel budget;
all arithmetic is exact rational. Subpackages: kernel (spaces, compact
sets, maps), cantor (word machines and encodings), groups, covers,
extension, algebraic, dynprops, cli.
"""

__version__ = "0.1.0"
