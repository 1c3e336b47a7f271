"""Growth of spherical derivatives of entire functions under iteration.

Library plus CLI laboratory: tower-backed comparisons with iterated
maximum modulus, Mittag-Leffler evaluation, sup/area growth measures,
Nevanlinna and Ahlfors-Shimizu characteristics, slow-escape construction,
and theorem-level experiment reports.
"""

__version__ = "0.1.0"
