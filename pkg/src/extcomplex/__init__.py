"""Exact calculus of length-3 complexes of finitely generated abelian groups.

Submodules:

* ``zmodule``    -- integer matrices, Smith normal form, f.p. abelian groups
* ``complexes``  -- bounded cochain complexes, cones, truncations, cohomology
* ``roofs``      -- fractions (roofs) and homotopy pullbacks/pushouts
* ``derived``    -- free resolutions, Hom complexes, Ext groups, derived classes
* ``extensions`` -- extensions of length-3 complexes, Theta/Psi, Baer sum
* ``docio``      -- the line-oriented text format
* ``cli``        -- command-line driver
"""

__version__ = "0.1.0"
